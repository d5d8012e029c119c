use crate::element::{element_energies, ElementState};
use crate::model::Model;
use crate::so3::So3Error;
use crate::{Rotation, Vec3};

/// Current values of all unknowns.
#[derive(Debug, Clone, PartialEq)]
pub struct State {
    /// Nodal displacements.
    pub u: Vec<Vec3>,
    /// Nodal rotations relative to the reference frames.
    pub lambda: Vec<Rotation>,
    /// Element section forces, material components.
    pub n: Vec<Vec3>,
    /// Element stretch multipliers.
    pub eta: Vec<f64>,
    /// Multipliers of the rotation constraints, in the order the solver lists them.
    pub rho: Vec<Vec3>,
}

impl State {
    /// The stress-free reference: `u = 0`, `Lambda = I`, `eta = 1`, `n = 0`.
    pub fn reference(model: &Model) -> Self {
        let nn = model.nodes.len();
        let ne = model.elements.len();
        let nrot = crate::solver::rotation_constraints(model).len();
        Self {
            u: vec![Vec3::zeros(); nn],
            lambda: vec![Rotation::identity(); nn],
            n: vec![Vec3::zeros(); ne],
            eta: vec![1.0; ne],
            rho: vec![Vec3::zeros(); nrot],
        }
    }

    /// Current nodal positions.
    pub fn positions(&self, model: &Model) -> Vec<Vec3> {
        model.nodes.iter().zip(&self.u).map(|(n, u)| n.position + *u).collect()
    }

    /// Current frame of each node, `Lambda Lambda0`.
    pub fn frames(&self, model: &Model) -> Vec<Rotation> {
        model.nodes.iter().zip(&self.lambda).map(|(n, l)| *l * n.frame).collect()
    }
}

/// Total bending and extension energy over all elements.
pub fn strain_energies(model: &Model, state: &State) -> Result<(f64, f64), So3Error> {
    let mut wb = 0.0;
    let mut we = 0.0;
    for e in 0..model.elements.len() {
        let en = element_energies(&ElementState::from_model(model, state, e))?;
        wb += en.bending;
        we += en.extension;
    }
    Ok((wb, we))
}

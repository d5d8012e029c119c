//! Two-node mixed rod element.
//!
//! Unknowns per element, in element order: the stretch multiplier `eta`, the
//! section force `n` (material components), the nodal displacements `u_a,
//! u_b` and the nodal rotation increments `lambda_a, lambda_b`. Rotations
//! are interpolated along the geodesic between the nodal frames; the
//! element functional is
//!
//! ```text
//! L W_b(Omega) + int_0^L [ AE/2 (eta - 1)^2 - eta n1 + g . R(s) n ] ds,
//! ```
//!
//! with `g` the current chord over the reference chord length, integrated
//! by two-point Gauss quadrature. Derivatives with respect to rotations are
//! taken in exponential coordinates `R -> exp(a) R` at each node, so the
//! tangent is the exact, symmetric second derivative in that chart.

use crate::jet::Jet;
use crate::model::{Material, Model};
use crate::so3::{self, exp_so3, geodesic, log_matrix, log_so3, So3Error};
use crate::state::State;
use crate::{Rotation, Vec3};

pub const NDOF: usize = 16;
pub const ETA: usize = 0;
pub const N: usize = 1;
pub const U: [usize; 2] = [4, 7];
pub const LAMBDA: [usize; 2] = [10, 13];

pub type ElementVector = [f64; NDOF];
pub type ElementMatrix = [[f64; NDOF]; NDOF];

/// Linear shape functions and their derivatives at `tau` on `[0, len]`.
pub fn shape(tau: f64, len: f64) -> ([f64; 2], [f64; 2]) {
    ([1.0 - tau / len, tau / len], [-1.0 / len, 1.0 / len])
}

/// Two-point Gauss rule on `[0, len]` as `(tau, weight)` pairs.
pub fn gauss2(len: f64) -> [(f64, f64); 2] {
    let d = 0.5 / 3f64.sqrt();
    [((0.5 - d) * len, 0.5 * len), ((0.5 + d) * len, 0.5 * len)]
}

/// Everything one element needs to evaluate its functional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementState {
    /// Reference nodal positions.
    pub x0: [Vec3; 2],
    pub u: [Vec3; 2],
    /// Nodal rotations relative to the reference frames.
    pub lambda: [Rotation; 2],
    /// Reference frames at the element ends.
    pub frames: [Rotation; 2],
    pub n: Vec3,
    pub eta: f64,
    pub material: Material,
}

impl ElementState {
    pub fn from_model(model: &Model, state: &State, e: usize) -> Self {
        let el = &model.elements[e];
        let [a, b] = el.nodes;
        Self {
            x0: [model.nodes[a].position, model.nodes[b].position],
            u: [state.u[a], state.u[b]],
            lambda: [state.lambda[a], state.lambda[b]],
            frames: el.frames,
            n: state.n[e],
            eta: state.eta[e],
            material: model.material(el),
        }
    }

    pub fn length(&self) -> f64 {
        (self.x0[1] - self.x0[0]).norm()
    }

    /// Current frames `Lambda Lambda0` at both ends.
    pub fn frames_current(&self) -> [Rotation; 2] {
        [self.lambda[0] * self.frames[0], self.lambda[1] * self.frames[1]]
    }

    /// Current chord divided by the reference length.
    pub fn chord(&self) -> Vec3 {
        let len = self.length();
        ((self.x0[1] + self.u[1]) - (self.x0[0] + self.u[0])).scale(1.0 / len)
    }
}

/// Curvature in material components and its reference value.
pub fn bending_strain(lambda: &[Rotation; 2], frames: &[Rotation; 2], len: f64) -> Result<(Vec3, Vec3), So3Error> {
    let r1 = lambda[0] * frames[0];
    let r2 = lambda[1] * frames[1];
    let omega = log_so3(&(r1.transpose() * r2))?.scale(1.0 / len);
    let omega0 = log_so3(&(frames[0].transpose() * frames[1]))?.scale(1.0 / len);
    Ok((omega, omega0))
}

/// Bending energy density `1/2 (Omega - Omega0)^T D (Omega - Omega0)`.
pub fn bending_energy(omega: &Vec3, omega0: &Vec3, material: &Material) -> f64 {
    let d = material.bending_diag();
    (0..3).map(|k| 0.5 * d[k] * (omega[k] - omega0[k]).powi(2)).sum()
}

/// Extension energy density `AE/2 (eta - 1)^2`.
pub fn extension_energy(eta: f64, material: &Material) -> f64 {
    0.5 * material.ae * (eta - 1.0).powi(2)
}

/// Integrated bending and extension energies of one element.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ElementEnergies {
    pub bending: f64,
    pub extension: f64,
}

pub fn element_energies(es: &ElementState) -> Result<ElementEnergies, So3Error> {
    let len = es.length();
    let (omega, omega0) = bending_strain(&es.lambda, &es.frames, len)?;
    Ok(ElementEnergies {
        bending: len * bending_energy(&omega, &omega0, &es.material),
        extension: len * extension_energy(es.eta, &es.material),
    })
}

/// Value of the element functional.
pub fn element_energy(es: &ElementState) -> Result<f64, So3Error> {
    let len = es.length();
    let en = element_energies(es)?;
    let [r1, r2] = es.frames_current();
    let g = es.chord();
    let mut constraint = -len * es.eta * es.n[0];
    for (tau, w) in gauss2(len) {
        let r = geodesic(&r1, &r2, tau / len)?;
        constraint += w * g.dot(&r.apply(&es.n));
    }
    Ok(en.bending + en.extension + constraint)
}

pub fn element_residual(es: &ElementState) -> Result<ElementVector, So3Error> {
    Ok(element_linearization(es)?.0)
}

pub fn element_tangent(es: &ElementState) -> Result<ElementMatrix, So3Error> {
    Ok(element_linearization(es)?.1)
}

type J6 = Jet<6>;

/// Residual and tangent in one pass.
pub fn element_linearization(es: &ElementState) -> Result<(ElementVector, ElementMatrix), So3Error> {
    let len = es.length();
    let m = &es.material;
    let [ra, rb] = es.frames_current();
    let omega0 = log_so3(&(es.frames[0].transpose() * es.frames[1]))?.scale(1.0 / len);

    let va = so3::Vec3::<J6>::new(J6::variable(0.0, 0), J6::variable(0.0, 1), J6::variable(0.0, 2));
    let vb = so3::Vec3::<J6>::new(J6::variable(0.0, 3), J6::variable(0.0, 4), J6::variable(0.0, 5));
    let raj = exp_so3(&va) * so3::Rotation::lift(&ra);
    let rbj = exp_so3(&vb) * so3::Rotation::lift(&rb);
    let phi = log_matrix((raj.transpose() * rbj).matrix())?;

    let d = m.bending_diag();
    let inv_len = J6::constant(1.0 / len);
    let mut wb = J6::constant(0.0);
    for k in 0..3 {
        let dk = phi[k] * inv_len - J6::constant(omega0[k]);
        wb += dk * dk * J6::constant(0.5 * d[k] * len);
    }

    let g = es.chord();
    let n = es.n;
    let mut res = [0.0; NDOF];
    let mut tan = [[0.0; NDOF]; NDOF];

    res[ETA] = len * (m.ae * (es.eta - 1.0) - n[0]);
    res[N] -= len * es.eta;
    tan[ETA][ETA] = len * m.ae;
    tan[ETA][N] = -len;
    tan[N][ETA] = -len;

    for k in 0..6 {
        res[LAMBDA[0] + k] += wb.g[k];
        for l in 0..6 {
            tan[LAMBDA[0] + k][LAMBDA[0] + l] += wb.h[k][l];
        }
    }

    for (tau, w) in gauss2(len) {
        let rg = *raj.matrix() * *exp_so3(&phi.scale(J6::constant(tau / len))).matrix();
        let rv = rg.values();
        // g . R n and its rotation derivatives.
        let gn = contract_gn(&rg, &g, &n);
        // R n, spatial force at this point.
        let force = rv.mul_vec(&n);
        // R^T g, constraint rows.
        let rtg = rv.transpose().mul_vec(&g);
        for j in 0..3 {
            res[N + j] += w * rtg[j];
            res[U[0] + j] -= 0.5 * force[j];
            res[U[1] + j] += 0.5 * force[j];
        }
        for k in 0..6 {
            res[LAMBDA[0] + k] += w * gn.g[k];
            for l in 0..6 {
                tan[LAMBDA[0] + k][LAMBDA[0] + l] += w * gn.h[k][l];
            }
        }
        for j in 0..3 {
            for i in 0..3 {
                // d(n_j row)/du_b_i = (R e_j)_i / 2 per point.
                tan[N + j][U[0] + i] -= 0.5 * rv.0[i][j];
                tan[N + j][U[1] + i] += 0.5 * rv.0[i][j];
            }
            // g . R e_j as a jet in the rotation coordinates.
            let mut q = J6::constant(0.0);
            // (R n)_j as a jet.
            let mut p = J6::constant(0.0);
            for i in 0..3 {
                q += rg.0[i][j] * J6::constant(g[i]);
                p += rg.0[j][i] * J6::constant(n[i]);
            }
            for k in 0..6 {
                tan[N + j][LAMBDA[0] + k] += w * q.g[k];
                tan[U[0] + j][LAMBDA[0] + k] -= 0.5 * p.g[k];
                tan[U[1] + j][LAMBDA[0] + k] += 0.5 * p.g[k];
            }
        }
    }

    for i in 0..NDOF {
        for j in 0..i {
            let (a, b) = (tan[i][j], tan[j][i]);
            let s = if a == 0.0 {
                b
            } else if b == 0.0 {
                a
            } else {
                0.5 * (a + b)
            };
            tan[i][j] = s;
            tan[j][i] = s;
        }
    }
    Ok((res, tan))
}

fn contract_gn(r: &so3::Mat3<J6>, g: &Vec3, n: &Vec3) -> J6 {
    let mut s = J6::constant(0.0);
    for i in 0..3 {
        for j in 0..3 {
            s += r.0[i][j] * J6::constant(g[i] * n[j]);
        }
    }
    s
}

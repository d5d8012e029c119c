//! Global assembly, supports, Newton iteration and load stepping.

pub mod sparse;

use crate::element::{element_linearization, ElementState, NDOF};
use crate::jet::Jet;
use crate::model::{BoundaryCondition, Component, Control, DofMap, Model};
use crate::so3::{self, exp_so3, skew_axial, So3Error};
use crate::state::State;
use crate::{Rotation, Vec3};

pub use sparse::{solve, Csr, LinearSolveError, Triplets};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    #[error("rotation branch problem ({0}); refine the load step")]
    Branch(#[from] So3Error),
    #[error("linear solve failed: {0}")]
    Linear(#[from] LinearSolveError),
    #[error("no convergence after {iterations} iterations (residual history {history:?})")]
    NotConverged { iterations: usize, history: Vec<f64> },
    #[error("residual diverged to {0}")]
    Diverged(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Convergence threshold on the 2-norm of the reduced residual.
    pub tol: f64,
    pub max_iterations: usize,
    /// Overrides the number of steps of the model's load program.
    pub steps: Option<usize>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { tol: 1e-5, max_iterations: 30, steps: None }
    }
}

/// A node whose rotation is fixed or prescribed; enforced by a multiplier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationConstraint {
    pub node: usize,
    /// Final rotation vector, `None` when the rotation is held at the reference.
    pub rotation: Option<Vec3>,
}

pub fn rotation_constraints(model: &Model) -> Vec<RotationConstraint> {
    model
        .conditions
        .iter()
        .filter_map(|bc| match *bc {
            BoundaryCondition::FixRotation { node } => Some(RotationConstraint { node, rotation: None }),
            BoundaryCondition::PrescribeRotation { node, rotation } => {
                Some(RotationConstraint { node, rotation: Some(rotation) })
            }
            _ => None,
        })
        .collect()
}

/// Loads and support values for one load step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepTargets {
    /// Fraction of the load program, `k / N`.
    pub fraction: f64,
    /// Multiplier on the nodal forces and moments.
    pub load_factor: f64,
    /// Eliminated displacement dofs (global index) and their values.
    pub displacements: Vec<(usize, f64)>,
    /// Target rotation per rotation constraint.
    pub rotations: Vec<Rotation>,
}

impl StepTargets {
    pub fn new(model: &Model, fraction: f64) -> Self {
        let dofs = model.dof_map();
        let mut displacements = Vec::new();
        for bc in &model.conditions {
            match *bc {
                BoundaryCondition::Fix { node, component } => {
                    displacements.push((dofs.u(node, component.index()), 0.0))
                }
                BoundaryCondition::Prescribe { node, component, value } => {
                    displacements.push((dofs.u(node, component.index()), fraction * value))
                }
                _ => {}
            }
        }
        let load_factor = match model.program.control {
            Control::Load => fraction,
            Control::Displacement { node, component, target } => {
                displacements.push((dofs.u(node, component.index()), fraction * target));
                1.0
            }
        };
        let rotations = rotation_constraints(model)
            .iter()
            .map(|c| c.rotation.map_or(Rotation::identity(), |v| exp_so3(&v.scale(fraction))))
            .collect();
        Self { fraction, load_factor, displacements, rotations }
    }
}

/// Assembled residual and tangent: element dofs followed by three
/// multiplier rows per rotation constraint.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub k: Csr,
    pub r: Vec<f64>,
    pub dofs: DofMap,
    pub constraints: Vec<RotationConstraint>,
}

impl GlobalSystem {
    pub fn size(&self) -> usize {
        self.r.len()
    }

    /// Row of the `k`-th multiplier component of rotation constraint `c`.
    pub fn multiplier_row(&self, c: usize, k: usize) -> usize {
        self.dofs.len() + 3 * c + k
    }
}

/// Residual `r = dI/dq - f_ext` and tangent, including rotation constraints.
pub fn assemble(model: &Model, state: &State, targets: &StepTargets) -> Result<GlobalSystem, SolveError> {
    let dofs = model.dof_map();
    let constraints = rotation_constraints(model);
    let size = dofs.len() + 3 * constraints.len();
    let mut r = vec![0.0; size];
    let mut k = Triplets::with_capacity(size, model.elements.len() * NDOF * NDOF + 36 * constraints.len());

    for (e, el) in model.elements.iter().enumerate() {
        let es = ElementState::from_model(model, state, e);
        let (re, ke) = element_linearization(&es)?;
        let map = dofs.element_dofs(e, el.nodes);
        for i in 0..NDOF {
            r[map[i]] += re[i];
            for j in 0..NDOF {
                k.push(map[i], map[j], ke[i][j]);
            }
        }
    }

    let (forces, moments) = model.nodal_loads(targets.load_factor);
    for i in 0..model.nodes.len() {
        for c in 0..3 {
            r[dofs.u(i, c)] -= forces[i][c];
            r[dofs.lambda(i, c)] -= moments[i][c];
        }
    }

    for (ci, con) in constraints.iter().enumerate() {
        let target = targets.rotations[ci];
        let rho = state.rho[ci];
        let (value, jac, hess) = rotation_gap(&target, &state.lambda[con.node]);
        for a in 0..3 {
            let row = dofs.len() + 3 * ci + a;
            r[row] += 2.0 * value[a];
            for l in 0..3 {
                let col = dofs.lambda(con.node, l);
                r[col] += 2.0 * rho[a] * jac[a][l];
                k.push(row, col, 2.0 * jac[a][l]);
                k.push(col, row, 2.0 * jac[a][l]);
            }
        }
        for l in 0..3 {
            for m in 0..3 {
                let h: f64 = (0..3).map(|a| 2.0 * rho[a] * hess[a][l][m]).sum();
                k.push(dofs.lambda(con.node, l), dofs.lambda(con.node, m), h);
            }
        }
    }

    Ok(GlobalSystem { k: k.compress(), r, dofs, constraints })
}

type Gap = ([f64; 3], [[f64; 3]; 3], [[[f64; 3]; 3]; 3]);

/// Axial vector of the skew part of `target^T exp(a) lambda` at `a = 0`, with
/// its first and second derivatives. Twice its dot product with the
/// multiplier equals the contraction of the skew multiplier with
/// `target^T lambda - I`.
fn rotation_gap(target: &Rotation, lambda: &Rotation) -> Gap {
    type J3 = Jet<3>;
    let a = so3::Vec3::<J3>::new(J3::variable(0.0, 0), J3::variable(0.0, 1), J3::variable(0.0, 2));
    let m = so3::Rotation::lift(&target.transpose()) * exp_so3(&a) * so3::Rotation::lift(lambda);
    let w = skew_axial(m.matrix());
    let mut out: Gap = ([0.0; 3], [[0.0; 3]; 3], [[[0.0; 3]; 3]; 3]);
    for k in 0..3 {
        out.0[k] = w[k].v;
        out.1[k] = w[k].g;
        out.2[k] = w[k].h;
    }
    out
}

/// Support force at an eliminated displacement dof.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reaction {
    pub node: usize,
    pub component: Component,
    pub value: f64,
}

/// Outcome of one converged load step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult {
    pub step: usize,
    pub fraction: f64,
    pub load_factor: f64,
    /// Value of the controlling quantity: the load factor under load
    /// control, the driven displacement under displacement control.
    pub control_value: f64,
    /// Load ordinate: the load factor, or the reaction at the driven dof
    /// counted positive in the direction of the driven motion.
    pub load: f64,
    pub iterations: usize,
    pub residual_history: Vec<f64>,
    pub reactions: Vec<Reaction>,
    pub state: State,
}

/// Partition of the global system into free and eliminated dofs.
#[derive(Debug, Clone)]
pub struct ReducedSystem {
    pub k: Csr,
    pub rhs: Vec<f64>,
    /// Global index of each reduced unknown.
    pub free: Vec<usize>,
    /// Residual restricted to the free dofs.
    pub residual: Vec<f64>,
}

/// Eliminates the prescribed displacement dofs. `increments` holds the
/// change still required at each eliminated dof; it enters the right-hand
/// side through the coupling block.
pub fn apply_constraints(sys: &GlobalSystem, eliminated: &[(usize, f64)]) -> ReducedSystem {
    let n = sys.size();
    let mut delta = vec![0.0; n];
    let mut is_elim = vec![false; n];
    for &(g, d) in eliminated {
        is_elim[g] = true;
        delta[g] = d;
    }
    let free: Vec<usize> = (0..n).filter(|&g| !is_elim[g]).collect();
    let k = sys.k.submatrix(&free);
    let residual: Vec<f64> = free.iter().map(|&g| sys.r[g]).collect();
    let rhs = free.iter().map(|&g| -sys.r[g] - sys.k.row(g).map(|(j, v)| v * delta[j]).sum::<f64>()).collect();
    ReducedSystem { k, rhs, free, residual }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Newton iteration for one load step, starting from `state`.
///
/// On success `state` holds the converged solution. The iteration count is
/// the number of linear solves.
pub fn newton_solve(
    model: &Model,
    state: &mut State,
    targets: &StepTargets,
    step: usize,
    config: &SolverConfig,
) -> Result<StepResult, SolveError> {
    let dofs = model.dof_map();
    let mut history = Vec::new();
    let mut iterations = 0;
    loop {
        let sys = assemble(model, state, targets)?;
        let increments: Vec<(usize, f64)> =
            targets.displacements.iter().map(|&(g, v)| (g, v - state.u[g / 3][g % 3])).collect();
        let red = apply_constraints(&sys, &increments);
        let rnorm = norm(&red.residual);
        history.push(rnorm);
        if !rnorm.is_finite() || rnorm > 1e30 {
            return Err(SolveError::Diverged(rnorm));
        }
        let pending = increments.iter().any(|&(_, d)| d != 0.0);
        if rnorm <= config.tol && !pending {
            return Ok(finish(model, state, targets, &sys, step, iterations, history));
        }
        if iterations == config.max_iterations {
            return Err(SolveError::NotConverged { iterations, history });
        }
        let x = solve(&red.k, &red.rhs)?;
        iterations += 1;

        let mut delta = vec![0.0; sys.size()];
        for (i, &g) in red.free.iter().enumerate() {
            delta[g] = x[i];
        }
        for i in 0..model.nodes.len() {
            let dl = Vec3::new(delta[dofs.lambda(i, 0)], delta[dofs.lambda(i, 1)], delta[dofs.lambda(i, 2)]);
            for c in 0..3 {
                state.u[i][c] += delta[dofs.u(i, c)];
            }
            state.lambda[i] = exp_so3(&dl) * state.lambda[i];
        }
        for e in 0..model.elements.len() {
            for c in 0..3 {
                state.n[e][c] += delta[dofs.n(e, c)];
            }
            state.eta[e] += delta[dofs.eta(e)];
        }
        for ci in 0..state.rho.len() {
            for c in 0..3 {
                state.rho[ci][c] += delta[sys.multiplier_row(ci, c)];
            }
        }
        // Hit prescribed values exactly.
        for &(g, v) in &targets.displacements {
            state.u[g / 3][g % 3] = v;
        }
    }
}

fn finish(
    model: &Model,
    state: &State,
    targets: &StepTargets,
    sys: &GlobalSystem,
    step: usize,
    iterations: usize,
    residual_history: Vec<f64>,
) -> StepResult {
    let mut reactions: Vec<Reaction> = targets
        .displacements
        .iter()
        .map(|&(g, _)| Reaction { node: g / 3, component: Component::ALL[g % 3], value: sys.r[g] })
        .collect();
    reactions.sort_by_key(|r| (r.node, r.component));
    reactions.dedup_by_key(|r| (r.node, r.component));
    let (control_value, load) = match model.program.control {
        Control::Load => (targets.load_factor, targets.load_factor),
        Control::Displacement { node, component, target } => {
            let g = sys.dofs.u(node, component.index());
            let sign = if target < 0.0 { -1.0 } else { 1.0 };
            (state.u[node][component.index()], sign * sys.r[g])
        }
    };
    StepResult {
        step,
        fraction: targets.fraction,
        load_factor: targets.load_factor,
        control_value,
        load,
        iterations,
        residual_history,
        reactions,
        state: state.clone(),
    }
}

/// Converged steps in order, and the failure that stopped the path early.
#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub steps: Vec<StepResult>,
    pub failure: Option<(usize, SolveError)>,
}

impl ContinuationResult {
    pub fn completed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn last_state(&self) -> Option<&State> {
        self.steps.last().map(|s| &s.state)
    }
}

/// Steps through the load program from the reference state.
pub fn continuation(model: &Model, config: &SolverConfig) -> ContinuationResult {
    continuation_from(model, State::reference(model), config)
}

pub fn continuation_from(model: &Model, mut state: State, config: &SolverConfig) -> ContinuationResult {
    let n = config.steps.unwrap_or(model.program.steps).max(1);
    let mut steps = Vec::with_capacity(n);
    for k in 1..=n {
        let targets = StepTargets::new(model, k as f64 / n as f64);
        match newton_solve(model, &mut state, &targets, k, config) {
            Ok(r) => steps.push(r),
            Err(e) => return ContinuationResult { steps, failure: Some((k, e)) },
        }
    }
    ContinuationResult { steps, failure: None }
}

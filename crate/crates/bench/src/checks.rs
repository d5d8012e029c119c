//! Randomized property checks of the element and the solver.
//!
//! Finite-difference oracles here are deliberately naive: they only call the
//! f64 energy and residual entry points and never touch the jet code.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use mixed_rod::element::{element_energy, element_linearization, element_residual, ElementState, NDOF};
use mixed_rod::model::{BoundaryCondition, Material, Model, ModelBuilder};
use mixed_rod::so3::{dexp, exp_so3, log_so3};
use mixed_rod::solver::{assemble, continuation, SolverConfig, StepResult, StepTargets};
use mixed_rod::state::State;
use mixed_rod::{Rotation, Vec3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy)]
pub struct CheckConfig {
    pub trials: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { trials: 1000, seed: 1 }
    }
}

/// Worst value of one property over all trials.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub trials: usize,
    pub worst: f64,
    pub limit: f64,
    pub elapsed: Duration,
    /// First trial that broke the property or could not be evaluated.
    pub failure: Option<String>,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.failure.is_none() && self.worst <= self.limit
    }
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub outcomes: Vec<CheckOutcome>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.outcomes.iter().all(CheckOutcome::passed)
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for o in &self.outcomes {
            let _ = write!(
                s,
                "{} {:<24} worst {:.3e} limit {:.0e} trials {} ({:.2} s)",
                if o.passed() { "PASS" } else { "FAIL" },
                o.name,
                o.worst,
                o.limit,
                o.trials,
                o.elapsed.as_secs_f64()
            );
            if let Some(f) = &o.failure {
                let _ = write!(s, ": {f}");
            }
            s.push('\n');
        }
        let _ = writeln!(s, "total {:.2} s", self.elapsed.as_secs_f64());
        s
    }
}

fn check(
    name: &'static str,
    limit: f64,
    trials: usize,
    rng: &mut ChaCha8Rng,
    mut trial: impl FnMut(&mut ChaCha8Rng) -> Result<f64, String>,
) -> CheckOutcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut failure = None;
    for t in 0..trials {
        match trial(rng) {
            Ok(v) if v.is_finite() => {
                worst = worst.max(v);
                if v > limit && failure.is_none() {
                    failure = Some(format!("trial {t}: {v:.3e}"));
                }
            }
            Ok(v) => {
                failure.get_or_insert(format!("trial {t}: {v}"));
            }
            Err(e) => {
                failure.get_or_insert(format!("trial {t}: {e}"));
            }
        }
    }
    CheckOutcome { name, trials, worst, limit, elapsed: start.elapsed(), failure }
}

pub fn run_checks(config: &CheckConfig) -> CheckReport {
    let start = Instant::now();
    let n = config.trials;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let outcomes = vec![
        check("residual_vs_fd", 1e-6, n, &mut rng, residual_trial),
        check("tangent_vs_fd", 1e-5, n, &mut rng, tangent_trial),
        check("tangent_symmetry", 1e-9, n, &mut rng, symmetry_trial),
        check("exp_log_round_trip", 1e-9, n, &mut rng, round_trip_trial),
        check("reaction_equilibrium", 1e-8, n, &mut rng, equilibrium_trial),
        check("path_independence", 1e-8, n, &mut rng, path_trial),
    ];
    CheckReport { outcomes, elapsed: start.elapsed() }
}

pub fn rand_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

fn rand_direction(rng: &mut impl Rng) -> Vec3 {
    loop {
        let v = rand_vec(rng, 1.0);
        let n = v.norm();
        if n > 1e-2 && n <= 1.0 {
            return v.scale(1.0 / n);
        }
    }
}

pub fn rand_rotation(rng: &mut impl Rng, max_angle: f64) -> Rotation {
    let angle = rng.random_range(0.0..max_angle);
    exp_so3(&rand_direction(rng).scale(angle))
}

/// Random element with relative end rotation comfortably inside the
/// principal branch of the logarithm.
pub fn rand_element(rng: &mut impl Rng) -> ElementState {
    let len = rng.random_range(0.3..3.0);
    let xa = rand_vec(rng, 2.0);
    let f0 = rand_rotation(rng, 3.0);
    let f1 = exp_so3(&rand_vec(rng, 0.4)) * f0;
    let la = rand_rotation(rng, 3.0);
    let lb = exp_so3(&rand_vec(rng, 0.6)) * la * f0 * f1.transpose();
    ElementState {
        x0: [xa, xa + rand_direction(rng).scale(len)],
        u: [rand_vec(rng, 0.5), rand_vec(rng, 0.5)],
        lambda: [la, lb],
        frames: [f0, f1],
        n: rand_vec(rng, 2.0),
        eta: rng.random_range(0.7..1.3),
        material: Material::new(
            rng.random_range(1.0..50.0),
            rng.random_range(0.5..5.0),
            rng.random_range(0.5..5.0),
            rng.random_range(0.5..5.0),
        ),
    }
}

/// Moves the element along coordinate direction `k` by `h`; rotations by
/// a left exponential.
fn perturb(es: &ElementState, k: usize, h: f64) -> ElementState {
    let mut p = *es;
    match k {
        0 => p.eta += h,
        1..=3 => p.n[k - 1] += h,
        4..=6 => p.u[0][k - 4] += h,
        7..=9 => p.u[1][k - 7] += h,
        _ => {
            let node = (k - 10) / 3;
            let mut a = Vec3::zeros();
            a[(k - 10) % 3] = h;
            p.lambda[node] = exp_so3(&a) * es.lambda[node];
        }
    }
    p
}

fn richardson(f: impl Fn(f64) -> f64, h: f64) -> f64 {
    let c1 = (f(h) - f(-h)) / (2.0 * h);
    let c2 = (f(2.0 * h) - f(-2.0 * h)) / (4.0 * h);
    (4.0 * c1 - c2) / 3.0
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const FD_STEP: f64 = 1e-4;

fn residual_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let es = rand_element(rng);
    let r = element_residual(&es).map_err(|e| e.to_string())?;
    let mut diff = [0.0; NDOF];
    for k in 0..NDOF {
        let fd = richardson(|t| element_energy(&perturb(&es, k, t)).unwrap_or(f64::NAN), FD_STEP);
        diff[k] = r[k] - fd;
    }
    Ok(norm(&diff) / norm(&r).max(1.0))
}

/// Residual of the element moved by `t` along direction `k`, expressed as
/// the gradient of the pulled-back functional `xi -> I(exp(xi) state)`.
fn chart_residual(es: &ElementState, k: usize, t: f64) -> [f64; NDOF] {
    let mut r = element_residual(&perturb(es, k, t)).unwrap_or([f64::NAN; NDOF]);
    if k >= 10 {
        let node = (k - 10) / 3;
        let o = 10 + 3 * node;
        let mut xi = Vec3::zeros();
        xi[(k - 10) % 3] = t;
        let v = dexp(&xi).transpose().mul_vec(&Vec3::new(r[o], r[o + 1], r[o + 2]));
        r[o..o + 3].copy_from_slice(&v.0);
    }
    r
}

fn tangent_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let es = rand_element(rng);
    let (_, k) = element_linearization(&es).map_err(|e| e.to_string())?;
    let mut diff = 0.0;
    let mut total = 0.0;
    for j in 0..NDOF {
        let p1 = chart_residual(&es, j, FD_STEP);
        let m1 = chart_residual(&es, j, -FD_STEP);
        let p2 = chart_residual(&es, j, 2.0 * FD_STEP);
        let m2 = chart_residual(&es, j, -2.0 * FD_STEP);
        for i in 0..NDOF {
            let c1 = (p1[i] - m1[i]) / (2.0 * FD_STEP);
            let c2 = (p2[i] - m2[i]) / (4.0 * FD_STEP);
            let fd = (4.0 * c1 - c2) / 3.0;
            diff += (k[i][j] - fd).powi(2);
            total += k[i][j].powi(2);
        }
    }
    Ok((diff / total).sqrt())
}

/// Assembled tangent of a random chain, clamped at one end so rotation
/// multipliers take part, at a random state.
fn symmetry_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut model = pinned_chain(rng)?;
    model.conditions.push(BoundaryCondition::FixRotation { node: 0 });
    let mut state = State::reference(&model);
    for i in 0..model.nodes.len() {
        state.u[i] = rand_vec(rng, 0.3);
        state.lambda[i] = rand_rotation(rng, 1.0);
    }
    for e in 0..model.elements.len() {
        state.n[e] = rand_vec(rng, 2.0);
        state.eta[e] = rng.random_range(0.8..1.2);
    }
    for r in state.rho.iter_mut() {
        *r = rand_vec(rng, 2.0);
    }
    let targets = StepTargets::new(&model, rng.random_range(0.0..1.0));
    let sys = assemble(&model, &state, &targets).map_err(|e| e.to_string())?;
    Ok(sys.k.asymmetry() / sys.k.max_abs())
}

fn round_trip_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let angle = rng.random_range(0.0..std::f64::consts::PI - 1e-3);
    let v = rand_direction(rng).scale(angle);
    let r = exp_so3(&v);
    let back = log_so3(&r).map_err(|e| e.to_string())?;
    let r2 = exp_so3(&back);
    let d1 = (back - v).max_abs();
    let d2 = (*r2.matrix() - *r.matrix()).max_abs();
    Ok(d1.max(d2))
}

const TIGHT: SolverConfig = SolverConfig { tol: 1e-11, max_iterations: 30, steps: None };

fn solve(model: &Model, steps: usize) -> Result<StepResult, String> {
    let config = SolverConfig { steps: Some(steps), ..TIGHT };
    let mut result = continuation(model, &config);
    if let Some((step, e)) = result.failure {
        return Err(format!("step {step}: {e}"));
    }
    result.steps.pop().ok_or_else(|| "no steps".into())
}

/// Random four-element chain pinned at three non-collinear nodes and
/// loaded at the other two.
pub fn pinned_chain(rng: &mut impl Rng) -> Result<Model, String> {
    let mut b = ModelBuilder::new();
    b.material(
        0,
        Material::new(
            rng.random_range(50.0..200.0),
            rng.random_range(5.0..20.0),
            rng.random_range(5.0..20.0),
            rng.random_range(5.0..20.0),
        ),
    );
    let mut ids = vec![b.node(Vec3::zeros())];
    let mut x = Vec3::zeros();
    let mut dir = Vec3::new(1.0, 0.0, 0.0);
    for _ in 0..4 {
        dir = exp_so3(&rand_vec(rng, 0.6)).apply(&dir);
        x += dir.scale(rng.random_range(0.5..1.5));
        let id = b.node(x);
        b.element(*ids.last().unwrap(), id, 0);
        ids.push(id);
    }
    // Rigid corners: every element keeps its own chord frame, so the
    // reference is exactly stress free.
    for &i in &ids[1..4] {
        b.joint(i);
    }
    let pinned = [ids[0], ids[2], ids[4]];
    let p = pinned.map(|i| b.position(i));
    let x: Vec<Vec3> = ids.iter().map(|&i| b.position(i)).collect();
    let bent = |a: Vec3, c: Vec3, d: Vec3| {
        let (e, f) = (c - a, d - c);
        e.cross(&f).norm() / (e.norm() * f.norm())
    };
    // Nearly collinear supports or straight pinned spans leave soft modes.
    if (p[1] - p[0]).cross(&(p[2] - p[0])).norm() < 0.2 || bent(x[0], x[1], x[2]) < 0.2 || bent(x[2], x[3], x[4]) < 0.2
    {
        return pinned_chain(rng);
    }
    for &i in &pinned {
        b.fix_displacement(i);
    }
    let loaded = [ids[1], ids[3]];
    for &i in &loaded {
        b.force(i, rand_vec(rng, 0.01)).moment(i, rand_vec(rng, 0.01));
    }
    b.steps(1);
    b.build().map_err(|e| e.to_string())
}

/// Imbalance of force and moment between support reactions and applied
/// loads, relative to the load magnitude.
fn equilibrium_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let model = pinned_chain(rng)?;
    let step = solve(&model, 3)?;

    let positions = step.state.positions(&model);
    let (forces, moments) = model.nodal_loads(1.0);
    let mut f_sum = Vec3::zeros();
    let mut m_sum = Vec3::zeros();
    let mut scale: f64 = 0.0;
    for i in 0..model.nodes.len() {
        f_sum += forces[i];
        m_sum += positions[i].cross(&forces[i]) + moments[i];
        scale = scale.max(forces[i].norm()).max(moments[i].norm());
    }
    // Reactions follow the residual sign: they carry the support force
    // with the sign of internal minus external load.
    let mut reaction = vec![Vec3::zeros(); model.nodes.len()];
    for r in &step.reactions {
        reaction[r.node][r.component.index()] = r.value;
    }
    for i in 0..model.nodes.len() {
        f_sum += reaction[i];
        m_sum += positions[i].cross(&reaction[i]);
    }
    Ok(f_sum.max_abs().max(m_sum.max_abs()) / scale)
}

/// Rigid rotation of an L-shaped cantilever reached along two different
/// step sequences: the equilibria must coincide.
fn path_trial(rng: &mut ChaCha8Rng) -> Result<f64, String> {
    let mut b = ModelBuilder::new();
    b.material(0, Material::new(1e6, 1e3, 1e3, 1e3));
    let root = b.node(Vec3::zeros());
    let corner = *b.line(root, Vec3::new(0.0, 10.0, 0.0), 2, 0).last().unwrap();
    b.line(corner, Vec3::new(10.0, 10.0, 0.0), 2, 0);
    b.joint(corner);
    // Newton needs steps well below a quarter turn; keep them under 0.8 rad.
    let angle = rng.random_range(0.1..std::f64::consts::PI);
    let v = rand_direction(rng).scale(angle);
    b.fix_displacement(root).prescribe_rotation(root, v);
    let model = b.build().map_err(|e| e.to_string())?;
    let coarse = (angle / 0.8).ceil() as usize;
    let a = solve(&model, coarse)?;
    let c = solve(&model, coarse + rng.random_range(1..3))?;
    let mut worst: f64 = 0.0;
    for i in 0..model.nodes.len() {
        worst = worst.max((a.state.u[i] - c.state.u[i]).max_abs() / 10.0);
        worst = worst.max((*a.state.lambda[i].matrix() - *c.state.lambda[i].matrix()).max_abs());
    }
    Ok(worst)
}

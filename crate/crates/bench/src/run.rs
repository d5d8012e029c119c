//! Solving cases and writing their artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use mixed_rod::solver::{continuation, ContinuationResult, SolveError, SolverConfig, StepResult};
use mixed_rod::state::{strain_energies, State};
use mixed_rod::Vec3;

use crate::cases::{case, case_from_file, Case, CaseError, Oracle, Quantity};
use crate::oracles::{elastica_oracle, l2_error, log_log_slope, rolling_oracle, OracleError};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Case(#[from] CaseError),
    #[error("step {step}: {source}")]
    Solve { step: usize, source: SolveError },
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error("{0}")]
    Invalid(String),
    #[error("writing artifacts: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub mesh: Option<usize>,
    pub steps: Option<usize>,
    pub tol: Option<f64>,
    pub out: Option<PathBuf>,
}

impl RunOptions {
    pub fn config(&self) -> SolverConfig {
        let mut c = SolverConfig::default();
        if let Some(t) = self.tol {
            c.tol = t;
        }
        c.steps = self.steps;
        c
    }
}

/// Comparison of one computed quantity with its reference.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub step: usize,
    pub label: String,
    pub computed: Vec<f64>,
    pub reference: Vec<f64>,
    /// Error measure, its meaning given by `label`.
    pub error: f64,
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub case: Case,
    pub result: ContinuationResult,
    /// Bending and extension energies per converged step.
    pub energies: Vec<(f64, f64)>,
    pub comparisons: Vec<Comparison>,
}

impl RunReport {
    pub fn tip(&self, step: &StepResult) -> Vec3 {
        step.state.u[self.case.monitor]
    }

    pub fn failure(&self) -> Option<RunError> {
        self.result.failure.as_ref().map(|(step, e)| RunError::Solve { step: *step, source: e.clone() })
    }

    /// Largest comparison error, if the case has a reference.
    pub fn max_error(&self) -> Option<f64> {
        self.comparisons.iter().map(|c| c.error).reduce(f64::max)
    }
}

/// Point at arc length `s` on a planar curve of constant curvature `k`
/// starting at the origin along `x`.
pub fn arc_point(k: f64, s: f64) -> Vec3 {
    if k.abs() < 1e-14 {
        Vec3::new(s, 0.0, 0.0)
    } else {
        rolling_oracle(k, 1.0, s)
    }
}

pub fn solve_case(case: Case, config: &SolverConfig) -> Result<RunReport, RunError> {
    let result = continuation(&case.model, config);
    let mut energies = Vec::with_capacity(result.steps.len());
    for s in &result.steps {
        let e = strain_energies(&case.model, &s.state)
            .map_err(|e| RunError::Solve { step: s.step, source: SolveError::Branch(e) })?;
        energies.push(e);
    }
    let comparisons = compare(&case, &result.steps)?;
    Ok(RunReport { case, result, energies, comparisons })
}

fn compare(case: &Case, steps: &[StepResult]) -> Result<Vec<Comparison>, RunError> {
    let model = &case.model;
    let mut out = Vec::new();
    match &case.oracle {
        Oracle::None => {}
        Oracle::Rolling { moment, ei } => {
            for s in steps {
                let k = moment * s.load_factor / ei;
                out.push(centerline_comparison(case, s, &|t| arc_point(k, t)));
            }
        }
        Oracle::Unrolling { length } => {
            let k0 = 2.0 * std::f64::consts::PI / length;
            for s in steps {
                let k = k0 * (1.0 - s.load_factor);
                out.push(centerline_comparison(case, s, &|t| arc_point(k, t)));
            }
        }
        Oracle::Elastica { ei, length, load } => {
            for s in steps {
                let tip = elastica_oracle(load * s.load_factor, *ei, *length)?;
                let u = s.state.u[case.monitor];
                let computed = vec![-u[0], -u[1]];
                let reference = vec![tip.horizontal, tip.vertical];
                let error = (computed[0] - reference[0]).abs().max((computed[1] - reference[1]).abs()) / length;
                out.push(Comparison {
                    step: s.step,
                    label: "tip displacement error / L".into(),
                    computed,
                    reference,
                    error,
                });
            }
        }
        Oracle::Reference { quantity, rows, .. } => {
            for (level, reference) in rows {
                let Some(s) =
                    steps.iter().find(|s| (s.load_factor * case.full_load - level).abs() <= 1e-9 * level.abs())
                else {
                    continue;
                };
                let u = s.state.u[case.monitor];
                let v = match quantity {
                    Quantity::TipDisplacement => u,
                    Quantity::TipPosition => model.nodes[case.monitor].position + u,
                };
                let error = (0..3).map(|c| ((v[c] - reference[c]) / reference[c]).abs()).fold(0.0, f64::max);
                out.push(Comparison {
                    step: s.step,
                    label: format!("tip at load {level}: max relative error"),
                    computed: v.0.to_vec(),
                    reference: reference.to_vec(),
                    error,
                });
            }
        }
    }
    Ok(out)
}

fn centerline_comparison(case: &Case, s: &StepResult, exact: &dyn Fn(f64) -> Vec3) -> Comparison {
    let points = s.state.positions(&case.model);
    Comparison {
        step: s.step,
        label: "centerline L2 error".into(),
        computed: Vec::new(),
        reference: Vec::new(),
        error: l2_error(&case.params, &points, exact),
    }
}

/// Builds, solves and, when `opts.out` is set, writes a case. `name` is a
/// library case or a path to a `.rod` model file. Artifacts of the
/// converged steps are written even when the path stops early; the failure
/// is returned as the error in that case.
pub fn run_case(name: &str, opts: &RunOptions) -> Result<RunReport, RunError> {
    let c = if name.ends_with(".rod") { case_from_file(Path::new(name))? } else { case(name, opts.mesh)? };
    let report = solve_case(c, &opts.config())?;
    if let Some(dir) = &opts.out {
        write_artifacts(&report, dir)?;
    }
    match report.failure() {
        Some(e) => Err(e),
        None => Ok(report),
    }
}

/// Float format shared by all artifacts: 17 significant digits.
pub fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn centerline_csv(case: &Case, state: &State) -> String {
    let mut s = String::from("s,x,y,z\n");
    for (p, x) in case.params.iter().zip(state.positions(&case.model)) {
        let _ = writeln!(s, "{},{},{},{}", fmt(*p), fmt(x[0]), fmt(x[1]), fmt(x[2]));
    }
    s
}

pub fn path_csv(report: &RunReport) -> String {
    let mut s = String::from("step,control,load,ux,uy,uz,iterations\n");
    let z = fmt(0.0);
    let _ = writeln!(s, "0,{z},{z},{z},{z},{z},0");
    for st in &report.result.steps {
        let u = report.tip(st);
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            st.step,
            fmt(st.control_value),
            fmt(st.load),
            fmt(u[0]),
            fmt(u[1]),
            fmt(u[2]),
            st.iterations
        );
    }
    s
}

pub fn summary(report: &RunReport) -> String {
    let c = &report.case;
    let mut s = String::new();
    let _ = writeln!(s, "case {}", c.name);
    let _ = writeln!(s, "nodes {} elements {}", c.model.nodes.len(), c.model.elements.len());
    let _ = writeln!(s, "monitor node {}", c.monitor);
    for (st, (wb, we)) in report.result.steps.iter().zip(&report.energies) {
        let u = report.tip(st);
        let _ = writeln!(
            s,
            "step {} iterations {} control {} load {} W_b {} W_e {} tip {} {} {}",
            st.step,
            st.iterations,
            fmt(st.control_value),
            fmt(st.load),
            fmt(*wb),
            fmt(*we),
            fmt(u[0]),
            fmt(u[1]),
            fmt(u[2])
        );
    }
    for cmp in &report.comparisons {
        let _ = write!(s, "step {} {}: {}", cmp.step, cmp.label, fmt(cmp.error));
        if !cmp.computed.is_empty() {
            let join = |v: &[f64]| v.iter().map(|x| format!("{x:.6}")).collect::<Vec<_>>().join(" ");
            let _ = write!(s, " (computed {} reference {})", join(&cmp.computed), join(&cmp.reference));
        }
        s.push('\n');
    }
    match &report.result.failure {
        None => s.push_str("status converged\n"),
        Some((step, e)) => {
            let _ = writeln!(s, "status failed at step {step}: {e}");
        }
    }
    s
}

pub fn write_artifacts(report: &RunReport, dir: &Path) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for st in &report.result.steps {
        fs::write(dir.join(format!("centerline_{}.csv", st.step)), centerline_csv(&report.case, &st.state))?;
    }
    fs::write(dir.join("path.csv"), path_csv(report))?;
    fs::write(dir.join("summary.txt"), summary(report))
}

/// Parses an artifact CSV back into its header and rows.
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), std::num::ParseFloatError> {
    let mut lines = text.lines();
    let header = lines.next().unwrap_or("").split(',').map(str::to_string).collect();
    let rows =
        lines.filter(|l| !l.is_empty()).map(|l| l.split(',').map(str::parse).collect()).collect::<Result<_, _>>()?;
    Ok((header, rows))
}

#[derive(Debug)]
pub struct ConvergenceReport {
    pub case: String,
    pub meshes: Vec<usize>,
    /// Element length per mesh.
    pub h: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: Option<f64>,
    /// Mesh at which the study stopped, if any.
    pub failure: Option<(usize, RunError)>,
}

impl ConvergenceReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.errors.windows(2).all(|w| w[1] < w[0])
    }

    pub fn render(&self) -> String {
        let mut s = format!("case {}\nmesh,h,error\n", self.case);
        for ((m, h), e) in self.meshes.iter().zip(&self.h).zip(&self.errors) {
            let _ = writeln!(s, "{m},{},{}", fmt(*h), fmt(*e));
        }
        if let Some(k) = self.slope {
            let _ = writeln!(s, "slope {k:.4}");
        }
        if let Some((m, e)) = &self.failure {
            let _ = writeln!(s, "failed at mesh {m}: {e}");
        }
        s
    }
}

/// Final-step centerline error over a sequence of meshes.
pub fn convergence_study(name: &str, meshes: &[usize], config: &SolverConfig) -> Result<ConvergenceReport, RunError> {
    let mut report = ConvergenceReport {
        case: name.to_string(),
        meshes: Vec::new(),
        h: Vec::new(),
        errors: Vec::new(),
        slope: None,
        failure: None,
    };
    for &m in meshes {
        let c = case(name, Some(m))?;
        if !matches!(c.oracle, Oracle::Rolling { .. } | Oracle::Unrolling { .. }) {
            return Err(RunError::Invalid(format!("case `{name}` has no exact centerline")));
        }
        let total = c.params.last().copied().unwrap_or(0.0);
        let run = solve_case(c, config)?;
        if let Some(e) = run.failure() {
            report.failure = Some((m, e));
            break;
        }
        let err = run.comparisons.last().map(|c| c.error).unwrap_or(f64::NAN);
        report.meshes.push(m);
        report.h.push(total / m as f64);
        report.errors.push(err);
    }
    if report.errors.len() >= 2 {
        report.slope = Some(log_log_slope(&report.h, &report.errors));
    }
    Ok(report)
}

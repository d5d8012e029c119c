//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use mixed_rod::solver::SolverConfig;
use rod_bench::cases::case;
use rod_bench::checks::{run_checks, CheckConfig};
use rod_bench::run::{convergence_study, solve_case, RunReport};

const MESHES: [usize; 6] = [5, 10, 20, 40, 80, 160];

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: String) -> Verdict {
    Verdict { passed, detail }
}

fn solve(name: &str, mesh: Option<usize>) -> Result<RunReport, String> {
    let c = case(name, mesh).map_err(|e| e.to_string())?;
    solve_case(c, &SolverConfig::default()).map_err(|e| e.to_string())
}

fn within(t: Duration, limit: f64) -> bool {
    t.as_secs_f64() < limit
}

fn frame_indifference() -> Result<Verdict, String> {
    let start = Instant::now();
    let r = solve("frame_indifference", None)?;
    let t = start.elapsed();
    let worst = r.energies.iter().map(|(wb, we)| wb.max(*we)).fold(0.0, f64::max);
    let ok = r.failure().is_none() && r.result.steps.len() == 8 && worst < 1e-10 && within(t, 1.0);
    Ok(verdict(ok, format!("max(W_b, W_e) over 8 steps {worst:.3e} (limit 1e-10), {:.2} s", t.as_secs_f64())))
}

fn convergence(name: &str) -> Result<Verdict, String> {
    let start = Instant::now();
    let r = convergence_study(name, &MESHES, &SolverConfig::default()).map_err(|e| e.to_string())?;
    let t = start.elapsed();
    let slope = r.slope.unwrap_or(f64::NAN);
    let ok = r.failure.is_none() && r.errors.len() == MESHES.len() && (1.85..=2.15).contains(&slope) && within(t, 10.0);
    let errors: Vec<String> = r.errors.iter().map(|e| format!("{e:.2e}")).collect();
    Ok(verdict(
        ok,
        format!("slope {slope:.3} in [1.85, 2.15], errors [{}], {:.2} s", errors.join(", "), t.as_secs_f64()),
    ))
}

fn elastica() -> Result<Verdict, String> {
    let start = Instant::now();
    let r = solve("elastica", Some(20))?;
    let t = start.elapsed();
    let worst = r.max_error().unwrap_or(f64::INFINITY);
    let ok =
        r.failure().is_none() && r.comparisons.len() == r.case.model.program.steps && worst < 0.01 && within(t, 5.0);
    Ok(verdict(
        ok,
        format!(
            "max tip error {worst:.3e} L over {} steps (limit 1e-2 L), {:.2} s",
            r.comparisons.len(),
            t.as_secs_f64()
        ),
    ))
}

fn tip_table(name: &str, levels: usize, tol: f64, limit: f64) -> Result<Verdict, String> {
    let start = Instant::now();
    let r = solve(name, None)?;
    let t = start.elapsed();
    let worst = r.max_error().unwrap_or(f64::INFINITY);
    let rows: Vec<String> = r
        .comparisons
        .iter()
        .map(|c| {
            let v: Vec<String> = c.computed.iter().map(|x| format!("{x:.4}")).collect();
            format!("({}) err {:.2e}", v.join(", "), c.error)
        })
        .collect();
    let ok = r.failure().is_none() && r.comparisons.len() == levels && worst < tol && within(t, limit);
    Ok(verdict(ok, format!("{} (limit {tol}), {:.2} s", rows.join("; "), t.as_secs_f64())))
}

fn arch() -> Result<Verdict, String> {
    let start = Instant::now();
    let r = solve("arch", Some(100))?;
    let t = start.elapsed();
    let steps = &r.result.steps;
    let (peak_at, peak) =
        steps
            .iter()
            .enumerate()
            .map(|(i, s)| (i, s.load))
            .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let last = steps.last().map_or(f64::NAN, |s| s.load);
    let descending = steps[peak_at..].windows(2).filter(|w| w[1].load < w[0].load).count();
    let ok = r.failure().is_none()
        && (878.0..=915.0).contains(&peak)
        && peak_at + 1 < steps.len()
        && last < peak
        && descending > 0
        && within(t, 60.0);
    Ok(verdict(
        ok,
        format!(
            "peak {peak:.2} at crown v {:.2}, {} steps past the peak down to load {last:.2}, {:.2} s",
            steps.get(peak_at).map_or(f64::NAN, |s| s.control_value),
            steps.len() - 1 - peak_at,
            t.as_secs_f64()
        ),
    ))
}

fn spiral() -> Result<Verdict, String> {
    let mut counts = Vec::new();
    for n in [8, 16] {
        let r = solve("spiral", Some(n))?;
        if let Some(e) = r.failure() {
            return Ok(verdict(false, format!("{n} elements: {e}")));
        }
        counts.push(r.result.steps[0].iterations);
    }
    let ok = counts.iter().all(|&c| c <= 5) && counts[0] == counts[1];
    Ok(verdict(ok, format!("iterations {} (8 elements), {} (16 elements), limit 5", counts[0], counts[1])))
}

fn williams() -> Result<Verdict, String> {
    let start = Instant::now();
    let r = solve("williams", None)?;
    let t = start.elapsed();
    let loads: Vec<f64> = r.result.steps.iter().map(|s| s.load).collect();
    let peak_at = (1..loads.len().saturating_sub(1)).find(|&i| loads[i] > loads[i - 1] && loads[i] > loads[i + 1]);
    let Some(p) = peak_at else {
        return Ok(verdict(false, "no interior load maximum".into()));
    };
    let run = loads[p..].windows(2).take_while(|w| w[1] < w[0]).count();
    let ok = r.failure().is_none() && run >= 2;
    Ok(verdict(
        ok,
        format!(
            "peak {:.4} at v {:.3}, load strictly decreasing for {run} steps to {:.4}, {:.2} s",
            loads[p],
            r.result.steps[p].control_value,
            loads[p + run],
            t.as_secs_f64()
        ),
    ))
}

fn oracle_suite() -> Result<Verdict, String> {
    let report = run_checks(&CheckConfig::default());
    let ok = report.passed() && within(report.elapsed, 30.0);
    let worst: Vec<String> = report.outcomes.iter().map(|o| format!("{} {:.1e}", o.name, o.worst)).collect();
    Ok(verdict(
        ok,
        format!(
            "{} ({} trials each), {:.2} s",
            worst.join(", "),
            CheckConfig::default().trials,
            report.elapsed.as_secs_f64()
        ),
    ))
}

fn info(name: &str) {
    let start = Instant::now();
    match solve(name, None) {
        Ok(r) => {
            let status = r.failure().map_or("converged".to_string(), |e| e.to_string());
            let err = r.max_error().map_or(String::new(), |e| format!(", max error {e:.3e}"));
            println!(
                "INFO {name}: {} steps, {status}{err}, {:.2} s",
                r.result.steps.len(),
                start.elapsed().as_secs_f64()
            );
        }
        Err(e) => println!("INFO {name}: {e}"),
    }
}

type Criterion = (&'static str, fn() -> Result<Verdict, String>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("frame indifference", frame_indifference),
        ("rolling convergence", || convergence("rolling")),
        ("unrolling convergence", || convergence("unrolling")),
        ("elastica", elastica),
        ("bent cantilever", || tip_table("bent_cantilever", 2, 0.005, 10.0)),
        ("L-frame", || tip_table("l_frame", 1, 0.01, f64::INFINITY)),
        ("arch limit load", arch),
        ("spiral Newton count", spiral),
        ("Williams frame limit point", williams),
        ("oracle suite", oracle_suite),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let v = run().unwrap_or_else(|e| verdict(false, e));
        if !v.passed {
            failed += 1;
        }
        println!("{} criterion {}: {name}: {}", if v.passed { "PASS" } else { "FAIL" }, i + 1, v.detail);
    }
    info("bent_cantilever_stated");
    info("l_frame_torsion");
    info("star_dome");
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

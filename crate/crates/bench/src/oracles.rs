//! Closed-form and quadrature reference solutions.

use mixed_rod::Vec3;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OracleError {
    #[error("adaptive quadrature did not converge")]
    Quadrature,
    #[error("tip-angle equation did not converge (residual {0:e})")]
    TipAngle(f64),
    #[error("invalid oracle input: {0}")]
    Input(String),
}

/// Point at arc length `s` of a straight cantilever along `x` bent by an end
/// moment `m` about `z`: a circle of radius `EI/m` tangent to `x` at the root.
pub fn rolling_oracle(m: f64, ei: f64, s: f64) -> Vec3 {
    assert!(m != 0.0, "rolling oracle needs a non-zero moment");
    let k = m / ei;
    Vec3::new((k * s).sin() / k, (1.0 - (k * s).cos()) / k, 0.0)
}

/// Reference circle of circumference `length` through the origin, tangent to `x`.
pub fn unrolling_reference(length: f64, s: f64) -> Vec3 {
    rolling_oracle(2.0 * core::f64::consts::PI, length, s)
}

/// The fully unrolled circle: a straight segment along `x`.
pub fn unrolling_oracle(s: f64) -> Vec3 {
    Vec3::new(s, 0.0, 0.0)
}

/// Tip of a clamped inextensible elastica under a transverse dead load.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticaTip {
    /// Tip rotation.
    pub angle: f64,
    /// Shortening of the horizontal projection.
    pub horizontal: f64,
    /// Transverse deflection.
    pub vertical: f64,
    /// Relative residual of the length equation at `angle`.
    pub residual: f64,
}

const QUAD_TOL: f64 = 1e-14;

/// Adaptive Simpson quadrature.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64, OracleError> {
    #[allow(clippy::too_many_arguments)]
    fn step(
        f: &dyn Fn(f64) -> f64,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> Result<f64, OracleError> {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if delta.abs() <= 15.0 * tol || (b - a) < 1e-15 {
            return Ok(left + right + delta / 15.0);
        }
        if depth == 0 {
            return Err(OracleError::Quadrature);
        }
        Ok(step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
            + step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
    }
    let (fa, fm, fb) = (f(a), f(0.5 * (a + b)), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// With `sin(theta) = s0 - u^2` the first integral of the elastica becomes
/// regular; returns `(length, vertical)` in units of `1/k`, `k^2 = 2P/EI`.
fn elastica_integrals(theta0: f64) -> Result<(f64, f64), OracleError> {
    let s0 = theta0.sin();
    let top = s0.sqrt();
    let cos_at = |u: f64| {
        let s = s0 - u * u;
        (1.0 - s * s).sqrt()
    };
    let len = 2.0 * integrate(&|u| 1.0 / cos_at(u), 0.0, top, QUAD_TOL)?;
    let vert = 2.0 * integrate(&|u| (s0 - u * u) / cos_at(u), 0.0, top, QUAD_TOL)?;
    Ok((len, vert))
}

/// Clamped cantilever of length `l` and stiffness `ei` with a dead tip load
/// `p` perpendicular to the undeformed axis.
pub fn elastica_oracle(p: f64, ei: f64, l: f64) -> Result<ElasticaTip, OracleError> {
    // Written so that NaN inputs are rejected too.
    let valid = p >= 0.0 && ei > 0.0 && l > 0.0;
    if !valid {
        return Err(OracleError::Input(format!("P={p}, EI={ei}, L={l}")));
    }
    if p == 0.0 {
        return Ok(ElasticaTip { angle: 0.0, horizontal: 0.0, vertical: 0.0, residual: 0.0 });
    }
    let k = (2.0 * p / ei).sqrt();
    // Length as a function of the tip angle is increasing on (0, pi/2).
    let length = |t: f64| -> Result<f64, OracleError> { Ok(elastica_integrals(t)?.0 / k) };
    let (mut lo, mut hi) = (0.0, core::f64::consts::FRAC_PI_2 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if length(mid)? < l {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let angle = 0.5 * (lo + hi);
    let (len, vert) = elastica_integrals(angle)?;
    let residual = (len / k - l).abs() / l;
    if residual > 1e-10 {
        return Err(OracleError::TipAngle(residual));
    }
    let x_tip = 2.0 * angle.sin().sqrt() / k;
    Ok(ElasticaTip { angle, horizontal: l - x_tip, vertical: vert / k, residual })
}

/// `sqrt(int |a(s) - b(s)|^2 ds)` for a piecewise-linear curve given by its
/// nodal parameters and points, against an exact curve, with two Gauss
/// points per segment.
pub fn l2_error(params: &[f64], points: &[Vec3], exact: &dyn Fn(f64) -> Vec3) -> f64 {
    assert_eq!(params.len(), points.len());
    let d = 0.5 / 3f64.sqrt();
    let mut sum = 0.0;
    for i in 1..params.len() {
        let (s0, s1) = (params[i - 1], params[i]);
        let h = s1 - s0;
        for xi in [0.5 - d, 0.5 + d] {
            let p = points[i - 1].scale(1.0 - xi) + points[i].scale(xi);
            sum += 0.5 * h * (p - exact(s0 + xi * h)).norm_squared();
        }
    }
    sum.sqrt()
}

/// Least-squares slope of `log(y)` against `log(x)`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

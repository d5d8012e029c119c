#![allow(dead_code, clippy::needless_range_loop)]

use mixed_rod::element::{element_energy, element_residual, ElementState, NDOF};
use mixed_rod::model::Material;
use mixed_rod::so3::{dexp, exp_so3};
use mixed_rod::{Mat3, Rotation, Vec3};
use rand::Rng;

pub fn rand_vec(rng: &mut impl Rng, scale: f64) -> Vec3 {
    Vec3::new(rng.random_range(-scale..scale), rng.random_range(-scale..scale), rng.random_range(-scale..scale))
}

pub fn rand_rotation(rng: &mut impl Rng) -> Rotation {
    // Uniform axis, angle well inside the principal branch.
    let mut v = rand_vec(rng, 1.0);
    while v.norm() < 1e-3 {
        v = rand_vec(rng, 1.0);
    }
    let angle = rng.random_range(0.0..3.0);
    exp_so3(&v.scale(angle / v.norm()))
}

/// A random element state whose relative frame rotation stays below about 2 rad.
pub fn rand_element(rng: &mut impl Rng) -> ElementState {
    let len = rng.random_range(0.3..3.0);
    let dir = rand_vec(rng, 1.0);
    let dir = dir.scale(1.0 / dir.norm());
    let xa = rand_vec(rng, 2.0);
    let f0 = rand_rotation(rng);
    let f1 = exp_so3(&rand_vec(rng, 0.4)) * f0;
    let la = rand_rotation(rng);
    let lb = exp_so3(&rand_vec(rng, 0.6)) * la * f0 * f1.transpose();
    let material = Material::new(
        rng.random_range(1.0..50.0),
        rng.random_range(0.5..5.0),
        rng.random_range(0.5..5.0),
        rng.random_range(0.5..5.0),
    );
    ElementState {
        x0: [xa, xa + dir.scale(len)],
        u: [rand_vec(rng, 0.5), rand_vec(rng, 0.5)],
        lambda: [la, lb],
        frames: [f0, f1],
        n: rand_vec(rng, 2.0),
        eta: rng.random_range(0.7..1.3),
        material,
    }
}

/// Moves the state along coordinate direction `d` by `h`: additive for
/// `eta`, `n`, `u`, left exponential for the rotations.
pub fn perturb(es: &ElementState, d: &[f64; NDOF], h: f64) -> ElementState {
    let mut p = *es;
    p.eta += h * d[0];
    for c in 0..3 {
        p.n[c] += h * d[1 + c];
        p.u[0][c] += h * d[4 + c];
        p.u[1][c] += h * d[7 + c];
    }
    for node in 0..2 {
        let a = Vec3::new(d[10 + 3 * node], d[11 + 3 * node], d[12 + 3 * node]).scale(h);
        p.lambda[node] = exp_so3(&a) * es.lambda[node];
    }
    p
}

pub fn unit(k: usize) -> [f64; NDOF] {
    let mut d = [0.0; NDOF];
    d[k] = 1.0;
    d
}

/// Central-difference gradient of the element functional, with one
/// Richardson extrapolation step.
pub fn fd_gradient(es: &ElementState, h: f64) -> [f64; NDOF] {
    let mut g = [0.0; NDOF];
    let f = |d: &[f64; NDOF], t: f64| element_energy(&perturb(es, d, t)).unwrap();
    for k in 0..NDOF {
        let d = unit(k);
        let c1 = (f(&d, h) - f(&d, -h)) / (2.0 * h);
        let c2 = (f(&d, 2.0 * h) - f(&d, -2.0 * h)) / (4.0 * h);
        g[k] = (4.0 * c1 - c2) / 3.0;
    }
    g
}

/// Gradient of `xi -> I(exp(xi) state)` at `xi = t d`, from the residual
/// pulled back through the left Jacobian of the exponential chart.
pub fn chart_gradient(es: &ElementState, d: &[f64; NDOF], t: f64) -> [f64; NDOF] {
    let r = element_residual(&perturb(es, d, t)).unwrap();
    let mut g = r;
    for node in 0..2 {
        let o = 10 + 3 * node;
        let xi = Vec3::new(d[o], d[o + 1], d[o + 2]).scale(t);
        let tt: Mat3 = dexp(&xi).transpose();
        let v = tt.mul_vec(&Vec3::new(r[o], r[o + 1], r[o + 2]));
        for c in 0..3 {
            g[o + c] = v[c];
        }
    }
    g
}

/// Finite-difference tangent from the chart gradient.
pub fn fd_tangent(es: &ElementState, h: f64) -> [[f64; NDOF]; NDOF] {
    let mut k = [[0.0; NDOF]; NDOF];
    for j in 0..NDOF {
        let d = unit(j);
        let p1 = chart_gradient(es, &d, h);
        let m1 = chart_gradient(es, &d, -h);
        let p2 = chart_gradient(es, &d, 2.0 * h);
        let m2 = chart_gradient(es, &d, -2.0 * h);
        for i in 0..NDOF {
            let c1 = (p1[i] - m1[i]) / (2.0 * h);
            let c2 = (p2[i] - m2[i]) / (4.0 * h);
            k[i][j] = (4.0 * c1 - c2) / 3.0;
        }
    }
    k
}

pub fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn frob(m: &[[f64; NDOF]; NDOF]) -> f64 {
    m.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
}

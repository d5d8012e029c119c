mod common;

use common::*;
use mixed_rod::element::{
    bending_energy, bending_strain, element_energies, element_linearization, element_residual, gauss2, shape,
    ElementState, NDOF,
};
use mixed_rod::model::Material;
use mixed_rod::so3::{exp_so3, log_so3, vee_matrix};
use mixed_rod::{Rotation, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn straight(len: f64) -> ElementState {
    ElementState {
        x0: [Vec3::zeros(), Vec3::new(len, 0.0, 0.0)],
        u: [Vec3::zeros(); 2],
        lambda: [Rotation::identity(); 2],
        frames: [Rotation::identity(); 2],
        n: Vec3::zeros(),
        eta: 1.0,
        material: Material::new(10.0, 2.0, 3.0, 4.0),
    }
}

#[test]
fn shape_functions_and_quadrature() {
    let (n, dn) = shape(0.0, 2.0);
    assert_eq!(n, [1.0, 0.0]);
    assert_eq!(dn, [-0.5, 0.5]);
    let (n, _) = shape(2.0, 2.0);
    assert_eq!(n, [0.0, 1.0]);
    // Two-point Gauss integrates cubics exactly.
    let len = 1.7;
    let q: f64 = gauss2(len).iter().map(|&(t, w)| w * (t * t * t - 2.0 * t)).sum();
    let exact = len.powi(4) / 4.0 - len * len;
    assert!((q - exact).abs() < 1e-13);
}

#[test]
fn reference_state_has_zero_residual() {
    let r = element_residual(&straight(1.0)).unwrap();
    assert!(r.iter().all(|x| x.abs() < 1e-15), "{r:?}");
}

#[test]
fn stretch_residual_rows() {
    let mut es = straight(2.0);
    es.eta = 1.1;
    es.n = Vec3::new(0.5, 0.0, 0.0);
    let (r, k) = element_linearization(&es).unwrap();
    // L (AE (eta - 1) - n1)
    assert!((r[0] - 2.0 * (10.0 * 0.1 - 0.5)).abs() < 1e-13);
    // L (-eta + 1)
    assert!((r[1] - 2.0 * (-1.1 + 1.0)).abs() < 1e-13);
    assert_eq!(k[0][0], 20.0);
    assert_eq!(k[0][1], -2.0);
}

#[test]
fn bending_strain_matches_spatial_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let es = rand_element(&mut rng);
        let len = es.length();
        let (omega, _) = bending_strain(&es.lambda, &es.frames, len).unwrap();
        let [r1, r2] = es.frames_current();
        let psi = log_so3(&(r2 * r1.transpose())).unwrap();
        let m = r1.matrix().transpose() * mixed_rod::so3::hat(&psi).matrix() * *r1.matrix();
        let alt = vee_matrix(&m).unwrap().scale(1.0 / len);
        assert!((alt - omega).max_abs() < 1e-12);
    }
}

#[test]
fn pure_twist_uses_gj() {
    let mut es = straight(1.0);
    es.lambda[1] = exp_so3(&Vec3::new(0.1, 0.0, 0.0));
    let (om, om0) = bending_strain(&es.lambda, &es.frames, 1.0).unwrap();
    let w = bending_energy(&om, &om0, &es.material);
    assert!((w - 0.5 * 4.0 * 0.01).abs() < 1e-15);
}

#[test]
fn residual_matches_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..200 {
        let es = rand_element(&mut rng);
        let r = element_residual(&es).unwrap();
        let fd = fd_gradient(&es, 1e-4);
        let diff: Vec<f64> = r.iter().zip(&fd).map(|(a, b)| a - b).collect();
        let rel = norm(&diff) / norm(&r).max(1.0);
        assert!(rel < 1e-6, "trial {trial}: rel {rel:e}\n{r:?}\n{fd:?}");
    }
}

#[test]
fn tangent_matches_finite_differences_and_is_symmetric() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for trial in 0..200 {
        let es = rand_element(&mut rng);
        let (_, k) = element_linearization(&es).unwrap();
        let fd = fd_tangent(&es, 1e-4);
        let mut diff = [[0.0; NDOF]; NDOF];
        let mut asym = [[0.0; NDOF]; NDOF];
        for i in 0..NDOF {
            for j in 0..NDOF {
                diff[i][j] = k[i][j] - fd[i][j];
                asym[i][j] = k[i][j] - k[j][i];
            }
        }
        let rel = frob(&diff) / frob(&k);
        assert!(rel < 1e-5, "trial {trial}: rel {rel:e}");
        assert!(frob(&asym) / frob(&k) < 1e-9);
    }
}

#[test]
fn energies_are_objective() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let es = rand_element(&mut rng);
        let q = rand_rotation(&mut rng);
        let t = rand_vec(&mut rng, 3.0);
        let mut moved = es;
        for i in 0..2 {
            let x = es.x0[i] + es.u[i];
            moved.u[i] = q.apply(&x) + t - es.x0[i];
            moved.lambda[i] = q * es.lambda[i];
        }
        let a = element_energies(&es).unwrap();
        let b = element_energies(&moved).unwrap();
        assert!((a.bending - b.bending).abs() < 1e-10 * (1.0 + a.bending));
        assert!((a.extension - b.extension).abs() < 1e-12 * (1.0 + a.extension));
        let ra = element_residual(&es).unwrap();
        let rb = element_residual(&moved).unwrap();
        for j in 0..4 {
            assert!((ra[j] - rb[j]).abs() < 1e-10, "row {j}");
        }
    }
}

#[test]
fn free_element_has_six_rigid_modes() {
    let mut es = straight(1.3);
    es.frames = [Rotation::identity(); 2];
    let (_, k) = element_linearization(&es).unwrap();
    let m = nalgebra::DMatrix::from_fn(NDOF, NDOF, |i, j| k[i][j]);
    let eig = m.symmetric_eigen();
    let scale = eig.eigenvalues.amax();
    let zeros = eig.eigenvalues.iter().filter(|v| v.abs() < 1e-10 * scale).count();
    assert_eq!(zeros, 6, "{}", eig.eigenvalues);
}

#[test]
fn geodesic_interpolation_is_exact_for_uniform_curvature() {
    // A circular arc with tangent frames: the element is stress free in bending.
    let kappa = 0.7;
    let len = 0.9;
    let f0 = Rotation::identity();
    let f1 = exp_so3(&Vec3::new(0.0, 0.0, kappa * len));
    let (om, om0) = bending_strain(&[Rotation::identity(); 2], &[f0, f1], len).unwrap();
    assert!((om0[2] - kappa).abs() < 1e-14);
    assert_eq!(om, om0);
}

#[test]
fn quadrature_is_inexact_beyond_cubics() {
    // Nodes (3 -+ sqrt 3)/6 with weights 1/2: x^4 integrates to 7/36, not 1/5.
    let q: f64 = gauss2(1.0).iter().map(|&(t, w)| w * t.powi(4)).sum();
    assert!((q - 7.0 / 36.0).abs() < 1e-15, "{q}");
}

#[test]
fn uniform_twist_about_the_axis_of_rotation() {
    let (theta, len) = (0.8, 2.5);
    let lam = [Rotation::identity(), exp_so3(&Vec3::new(0.0, 0.0, theta))];
    let (om, om0) = bending_strain(&lam, &[Rotation::identity(); 2], len).unwrap();
    assert!((om - Vec3::new(0.0, 0.0, theta / len)).max_abs() < 1e-15);
    assert_eq!(om0, Vec3::zeros());
}

#[test]
fn rigid_translation_is_stress_free() {
    let mut es = straight(1.5);
    es.u = [Vec3::new(0.3, -2.0, 1.1); 2];
    let r = element_residual(&es).unwrap();
    assert!(r.iter().all(|x| x.abs() < 1e-14), "{r:?}");
}

use std::f64::consts::PI;

use mixed_rod::so3::{
    self, dexp, exp_so3, geodesic, hat, log_so3, orthogonality_defect, so3_metric, vee, vee_matrix, So3Error,
};
use mixed_rod::{Mat3, Rotation, Vec3};
use nalgebra as na;
use proptest::prelude::*;

fn vec3() -> impl Strategy<Value = Vec3> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

/// Rotation vector with angle below `max`.
fn rotvec(max: f64) -> impl Strategy<Value = Vec3> {
    (vec3(), 0.0..max).prop_filter_map("axis too short", |(a, t)| {
        let n = a.norm();
        (n > 1e-3).then(|| a.scale(t / n))
    })
}

fn to_na(m: &Mat3) -> na::Matrix3<f64> {
    na::Matrix3::from_fn(|i, j| m.0[i][j])
}

fn dist(a: &Rotation, b: &Rotation) -> f64 {
    (*a.matrix() - *b.matrix()).max_abs()
}

proptest! {
    #[test]
    fn exp_matches_nalgebra(v in rotvec(3.1)) {
        let r = exp_so3(&v);
        let n = na::Rotation3::new(na::Vector3::new(v[0], v[1], v[2]));
        prop_assert!((to_na(r.matrix()) - n.matrix()).amax() < 1e-14);
        let (defect, det) = orthogonality_defect(r.matrix());
        prop_assert!(defect < 1e-14 && (det - 1.0).abs() < 1e-14);
    }

    #[test]
    fn log_inverts_exp(v in rotvec(PI - 1e-4)) {
        let back = log_so3(&exp_so3(&v)).unwrap();
        prop_assert!((back - v).max_abs() < 1e-9 * (1.0 + v.norm()), "{v:?} -> {back:?}");
    }

    #[test]
    fn exp_inverts_log(a in rotvec(3.0), b in rotvec(3.0)) {
        let r = exp_so3(&a) * exp_so3(&b);
        if let Ok(v) = log_so3(&r) {
            prop_assert!(dist(&exp_so3(&v), &r) < 1e-12);
            prop_assert!(v.norm() < PI);
        }
    }

    #[test]
    fn hat_vee_round_trip(v in vec3()) {
        prop_assert_eq!(vee(&hat(&v)), v);
        prop_assert_eq!(vee_matrix(&hat(&v).matrix()).unwrap(), v);
        // hat(v) w = v x w
        let w = Vec3::new(0.3, -0.7, 0.2);
        prop_assert!((hat(&v).matrix().mul_vec(&w) - v.cross(&w)).max_abs() < 1e-15);
    }

    #[test]
    fn geodesic_endpoints_and_midpoint(a in rotvec(3.0), d in rotvec(2.5)) {
        let r1 = exp_so3(&a);
        let r2 = exp_so3(&d) * r1;
        prop_assert!(dist(&geodesic(&r1, &r2, 0.0).unwrap(), &r1) < 1e-14);
        prop_assert!(dist(&geodesic(&r1, &r2, 1.0).unwrap(), &r2) < 1e-12);
        // Constant speed: the midpoint is equidistant from both ends.
        let m = geodesic(&r1, &r2, 0.5).unwrap();
        let d1 = log_so3(&(m * r1.transpose())).unwrap().norm();
        let d2 = log_so3(&(r2 * m.transpose())).unwrap().norm();
        prop_assert!((d1 - d2).abs() < 1e-10 && (d1 - 0.5 * d.norm()).abs() < 1e-10);
    }

    #[test]
    fn dexp_is_left_jacobian(psi in rotvec(2.8), d in vec3()) {
        let h = 1e-6;
        let fwd = log_so3(&(exp_so3(&(psi + d.scale(h))) * exp_so3(&psi).transpose())).unwrap();
        let bwd = log_so3(&(exp_so3(&(psi - d.scale(h))) * exp_so3(&psi).transpose())).unwrap();
        let fd = (fwd - bwd).scale(0.5 / h);
        let exact = dexp(&psi).mul_vec(&d);
        prop_assert!((fd - exact).max_abs() < 1e-7, "{fd:?} vs {exact:?}");
    }

    #[test]
    fn metric_is_dot_product_and_invariant(u in vec3(), v in vec3(), a in rotvec(3.0)) {
        prop_assert!((so3_metric(&hat(&u), &hat(&v)) - u.dot(&v)).abs() < 1e-15);
        // Ad-invariance: <R u R^T, R v R^T> = <u, v>
        let r = exp_so3(&a);
        let (ru, rv) = (hat(&r.apply(&u)), hat(&r.apply(&v)));
        prop_assert!((so3_metric(&ru, &rv) - u.dot(&v)).abs() < 1e-14);
    }
}

#[test]
fn log_rejects_angles_at_the_branch_cut() {
    let v = Vec3::new(1.0, 2.0, -2.0).scale((PI - 5e-7) / 3.0);
    assert!(matches!(log_so3(&exp_so3(&v)), Err(So3Error::BranchAmbiguity(_))));
    let half_turn = exp_so3(&Vec3::new(0.0, PI, 0.0));
    assert!(log_so3(&half_turn).is_err());
}

#[test]
fn checked_construction_rejects_non_rotations() {
    let mut m = *exp_so3(&Vec3::new(0.1, 0.2, 0.3)).matrix();
    assert!(Rotation::from_matrix(m).is_ok());
    m.0[0][0] += 1e-6;
    assert!(matches!(Rotation::from_matrix(m), Err(So3Error::NotRotation { .. })));
    let reflection = Mat3::identity().scale(-1.0);
    assert!(Rotation::from_matrix(reflection).is_err());
    let mut s = hat(&Vec3::new(1.0, 0.0, 0.0)).matrix();
    s.0[1][2] += 1e-3;
    assert!(matches!(vee_matrix(&s), Err(So3Error::NotSkew(_))));
}

#[test]
fn small_angle_series_is_continuous() {
    // The series and closed-form branches agree across the switch.
    for t in [0.0999, 0.1, 0.1001] {
        let v = Vec3::new(0.6, -0.8, 0.0).scale(t);
        let n = na::Rotation3::new(na::Vector3::new(v[0], v[1], v[2]));
        assert!((to_na(exp_so3(&v).matrix()) - n.matrix()).amax() < 1e-15);
        assert!((log_so3(&exp_so3(&v)).unwrap() - v).max_abs() < 1e-15);
    }
    let tiny = Vec3::new(1e-9, -2e-9, 3e-9);
    assert!((log_so3(&exp_so3(&tiny)).unwrap() - tiny).max_abs() < 1e-22);
}

#[test]
fn kernel_runs_in_single_precision() {
    let v = so3::Vec3::<f32>::new(0.3, -0.2, 0.9);
    let r = exp_so3(&v);
    let back = log_so3(&r).unwrap();
    assert!((back - v).norm() < 1e-5);
    let (defect, det) = orthogonality_defect(r.matrix());
    assert!(defect < 1e-6 && (det - 1.0).abs() < 1e-6);
    let m: so3::Mat3<f32> = dexp(&v);
    // det dexp(psi) = 2 (1 - cos t) / t^2
    let t = v.norm();
    assert!((m.determinant() - 2.0 * (1.0 - t.cos()) / (t * t)).abs() < 1e-5);
}

#[test]
fn reference_values() {
    let half = exp_so3(&Vec3::new(0.0, 0.0, PI));
    let expect = so3::Mat3([[-1.0, 0.0, 0.0], [0.0, -1.0, 0.0], [0.0, 0.0, 1.0]]);
    assert!((*half.matrix() - expect).max_abs() < 1e-15);
    // Periodic in the angle.
    let u = Vec3::new(2.0, -1.0, 2.0).scale(1.0 / 3.0);
    let (a, b) = (exp_so3(&u.scale(0.7)), exp_so3(&u.scale(0.7 + 2.0 * PI)));
    assert!(dist(&a, &b) < 1e-14);
    assert_eq!(log_so3(&Rotation::identity()).unwrap(), Vec3::zeros());
    let v = Vec3::new(0.1, 0.2, 0.3);
    assert!((log_so3(&exp_so3(&v)).unwrap() - v).max_abs() < 1e-15);
}

#[test]
fn trace_just_above_minus_one_is_still_on_the_branch() {
    // Trace -1 + 2e-6 is an angle about 1.4e-3 short of pi, outside the guard.
    let theta = (-1.0f64 + 1e-6).acos();
    let v = Vec3::new(0.0, 1.0, 0.0).scale(theta);
    let r = exp_so3(&v);
    assert!((r.matrix().trace() - (-1.0 + 2e-6)).abs() < 1e-12);
    let back = log_so3(&r).unwrap();
    assert!((back - v).max_abs() < 1e-8);
}

#[test]
fn hat_of_basis_vectors() {
    let w3 = hat(&Vec3::new(0.0, 0.0, 1.0)).matrix();
    assert_eq!(w3, so3::Mat3([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0]]));
    let w1 = so3::Mat3([[0.0, 0.0, 0.0], [0.0, 0.0, -1.0], [0.0, 1.0, 0.0]]);
    assert_eq!(vee_matrix(&w1).unwrap(), Vec3::new(1.0, 0.0, 0.0));
}

#[test]
fn geodesic_on_a_one_parameter_subgroup() {
    let theta = 2.2;
    let r2 = exp_so3(&Vec3::new(0.0, 0.0, theta));
    let mid = geodesic(&Rotation::identity(), &r2, 0.5).unwrap();
    assert!(dist(&mid, &exp_so3(&Vec3::new(0.0, 0.0, 0.5 * theta))) < 1e-15);
}

#[test]
fn dexp_difference_quotient_is_first_order() {
    let psi = Vec3::new(0.4, -0.2, 0.7);
    let d = Vec3::new(0.3, 0.5, -0.1);
    let gap = |h: f64| {
        let q = log_so3(&(exp_so3(&(psi + d.scale(h))) * exp_so3(&psi).transpose())).unwrap().scale(1.0 / h);
        (dexp(&psi).mul_vec(&d) - q).norm()
    };
    // One-sided quotient: the gap halves with h.
    let (g1, g2) = (gap(1e-3), gap(5e-4));
    assert!(g1 < 1e-3 && (g1 / g2 - 2.0).abs() < 0.05, "{g1} {g2}");
}

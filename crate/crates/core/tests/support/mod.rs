//! Property checks shared by the property suite and the acceptance runner.

#![allow(dead_code)]

use helmscat_core::geometry::{support_function_exact, uniform_angles, Boundary, Vec2};
use helmscat_core::lstsq::{solve_spectral, CMatrix, SpectralLsqProblem};
use helmscat_core::mrc::RadiatingExpansion;
use helmscat_core::sfm::{reconstruct_boundary, SupportSamples};
use helmscat_core::specfun::{bessel_j, bessel_y};
use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub fn complex() -> impl Strategy<Value = Complex64> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

/// `J_{l+1} Y_l - J_l Y_{l+1} = 2/(pi x)`.
pub fn check_bessel_wronskian(l: u32, x: f64) -> Result<(), TestCaseError> {
    let w = bessel_j(l + 1, x).unwrap() * bessel_y(l, x).unwrap() - bessel_j(l, x).unwrap() * bessel_y(l + 1, x).unwrap();
    let want = 2.0 / (std::f64::consts::PI * x);
    prop_assert!((w - want).abs() <= 1e-9 * want, "l = {}, x = {}: {} vs {}", l, x, w, want);
    Ok(())
}

pub fn bessel_wronskian_strategy() -> impl Strategy<Value = (u32, f64)> {
    (0u32..40, 0.5..100.0f64)
}

/// A well-conditioned `m x n` complex matrix with a right-hand side.
pub fn lsq_strategy() -> impl Strategy<Value = (usize, usize, Vec<Complex64>, Vec<Complex64>)> {
    (1usize..=10).prop_flat_map(|n| {
        (n..=20).prop_flat_map(move |m| {
            (
                Just(m),
                Just(n),
                proptest::collection::vec(complex(), m * n),
                proptest::collection::vec(complex(), m),
            )
        })
    })
}

/// Truncated-SVD solution with `w_min = 0` equals the normal-equations solution.
pub fn check_svd_against_normal_equations(m: usize, n: usize, entries: &[Complex64], b: &[Complex64]) -> Result<(), TestCaseError> {
    // Adding the identity on top keeps the random matrix comfortably full rank.
    let a = CMatrix::from_fn(m, n, |i, j| entries[i * n + j] + if i == j { Complex64::new(3.0, 0.0) } else { Complex64::new(0.0, 0.0) });
    let sol = solve_spectral(&SpectralLsqProblem {
        matrix: a.clone(),
        rhs: b.to_vec(),
        w_min: 0.0,
        epsilon: 0.0,
    })
    .unwrap();
    let ah = a.adjoint();
    let normal = &ah * &a;
    let rhs = &ah * DVector::from_column_slice(b);
    let c = normal.lu().solve(&rhs).unwrap();
    for (x, y) in sol.coefficients.iter().zip(c.iter()) {
        prop_assert!((x - y).norm() <= 1e-9 * (1.0 + y.norm()), "{} vs {}", x, y);
    }
    Ok(())
}

pub fn convex_shape_strategy() -> impl Strategy<Value = Boundary> {
    prop_oneof![
        (-5.0..5.0f64, -5.0..5.0f64, 0.3..3.0f64).prop_map(|(x, y, r)| Boundary::circle(Vec2::new(x, y), r).unwrap()),
        (-5.0..5.0f64, -5.0..5.0f64, 0.5..3.0f64, 0.5..3.0f64)
            .prop_map(|(x, y, a, b)| Boundary::ellipse(Vec2::new(x, y), a, b).unwrap()),
    ]
}

/// Exact support samples on 256 directions reconstruct points on the boundary.
pub fn check_support_round_trip(b: &Boundary) -> Result<(), TestCaseError> {
    let d: Vec<f64> = uniform_angles(256)
        .iter()
        .map(|&t| support_function_exact(b, Vec2::polar(t)).unwrap())
        .collect();
    for x in reconstruct_boundary(&SupportSamples::new(d, 1.0)).unwrap() {
        let dist = b.distance_to(x);
        prop_assert!(dist < 5e-3, "{} at ({}, {}): {}", b.kind_name(), x.x, x.y, dist);
    }
    Ok(())
}

pub fn expansion_strategy() -> impl Strategy<Value = (f64, Vec<Vec2>, usize, Vec<Complex64>)> {
    (0.5..5.0f64, 1usize..=3, 0usize..=5).prop_flat_map(|(k, poles, order)| {
        (
            Just(k),
            proptest::collection::vec((-0.7..0.7f64, -0.7..0.7f64).prop_map(|(x, y)| Vec2::new(x, y)), poles),
            Just(order),
            proptest::collection::vec(complex(), poles * (2 * order + 1)),
        )
    })
}

/// `|v(x) - A(x/|x|) e^{ik|x|}/sqrt|x|| <= 5 max|A| / |x|` at `|x| = 1000/k`.
pub fn check_far_near_asymptotics(k: f64, poles: Vec<Vec2>, order: usize, coeffs: Vec<Complex64>) -> Result<(), TestCaseError> {
    let e = RadiatingExpansion::new(k, poles, order, coeffs).unwrap();
    let angles = uniform_angles(16);
    let peak = angles.iter().map(|&t| e.far_field(Vec2::polar(t)).norm()).fold(0.0, f64::max);
    let r = 1000.0 / k;
    for &t in &angles {
        let v = e.near_field(Vec2::polar(t) * r).unwrap();
        let a = e.far_field(Vec2::polar(t));
        let approx = a * Complex64::from_polar(1.0 / r.sqrt(), k * r);
        prop_assert!((v - approx).norm() <= 5.0 * peak / r, "t = {}: {} vs {}", t, v, approx);
    }
    Ok(())
}

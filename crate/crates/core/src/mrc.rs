//! Multipole least-squares solver for exterior Dirichlet scattering.
//!
//! The scattered field is sought as
//! `v(x) = sum_j sum_{|l| <= L} c_lj H_l(k|x - x_j|) e^{il theta_j}` with poles
//! `x_j` inside the obstacle. The coefficients minimize the boundary misfit
//! against `-u_inc` sampled at `M` uniform knots.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::farfield::{far_field_prefactor, AmplitudeSource, FarFieldTable};
use crate::geometry::{Boundary, Vec2};
use crate::lstsq::{solve_with_svd, svd, CMatrix, LsqSolution, Svd};
use crate::specfun::hankel1_sequence;

pub const DEFAULT_ORDER: usize = 5;
pub const DEFAULT_KNOTS: usize = 720;
pub const DEFAULT_W_MIN: f64 = 1e-8;
const COINCIDENCE: f64 = 1e-12;

/// Multipole expansion `sum_j sum_l c_lj H_l(k|x - x_j|) e^{il theta_j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadiatingExpansion {
    pub k: f64,
    pub poles: Vec<Vec2>,
    pub order: usize,
    /// Pole-major: `coefficients[j * (2L + 1) + (l + L)]`.
    pub coefficients: Vec<Complex64>,
}

impl RadiatingExpansion {
    pub fn new(k: f64, poles: Vec<Vec2>, order: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        let want = (2 * order + 1) * poles.len();
        if coefficients.len() != want {
            return Err(Error::InvalidInput(format!(
                "expected {want} coefficients for {} poles at order {order}, got {}",
                poles.len(),
                coefficients.len()
            )));
        }
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        Ok(Self {
            k,
            poles,
            order,
            coefficients,
        })
    }

    pub fn zeros(k: f64, poles: Vec<Vec2>, order: usize) -> Result<Self> {
        let n = (2 * order + 1) * poles.len();
        Self::new(k, poles, order, vec![Complex64::new(0.0, 0.0); n])
    }

    /// `c_lj` for pole index `j` (from 0) and order `l` in `-L..=L`.
    pub fn coefficient(&self, j: usize, l: i32) -> Complex64 {
        self.coefficients[j * (2 * self.order + 1) + (l + self.order as i32) as usize]
    }

    /// `v(x)`; errors when `x` sits on a pole.
    pub fn near_field(&self, x: Vec2) -> Result<Complex64> {
        let row = basis_row(x, &self.poles, self.order, self.k)?;
        Ok(row.iter().zip(&self.coefficients).map(|(a, c)| a * c).sum())
    }

    /// `A(alpha') = sqrt(2/(pi k)) e^{-i pi/4} sum_j e^{-ik alpha'.x_j} sum_l c_lj (-i)^l e^{il theta}`.
    pub fn far_field(&self, alpha_prime: Vec2) -> Complex64 {
        let theta = alpha_prime.angle();
        let big = self.order as i32;
        let width = 2 * self.order + 1;
        let weights: Vec<Complex64> = (-big..=big)
            .map(|l| (-Complex64::i()).powi(l) * Complex64::from_polar(1.0, f64::from(l) * theta))
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (j, pole) in self.poles.iter().enumerate() {
            let inner: Complex64 = self.coefficients[j * width..(j + 1) * width]
                .iter()
                .zip(&weights)
                .map(|(c, w)| c * w)
                .sum();
            total += Complex64::from_polar(1.0, -self.k * alpha_prime.dot(*pole)) * inner;
        }
        far_field_prefactor(self.k) * total
    }
}

/// `H_l(k|x - x_j|) e^{il theta_j}` for every pole and order, pole-major.
pub fn basis_row(x: Vec2, poles: &[Vec2], order: usize, k: f64) -> Result<Vec<Complex64>> {
    let mut row = Vec::with_capacity((2 * order + 1) * poles.len());
    for pole in poles {
        let d = x - *pole;
        let rho = d.norm();
        if rho < COINCIDENCE {
            return Err(Error::Coincidence { distance: rho });
        }
        let h = hankel1_sequence(order as u32, k * rho)?;
        let e = Complex64::from_polar(1.0, d.angle());
        let big = order as i32;
        for l in -big..=big {
            let n = l.unsigned_abs() as usize;
            let sign = if l < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
            row.push(h[n] * sign * e.powi(l));
        }
    }
    Ok(row)
}

/// `psi_lj(t) = H_l(k|r(t) - x_j|) e^{il theta_j(t)}`.
pub fn basis_function(b: &Boundary, pole: Vec2, l: i32, t: f64, k: f64) -> Result<Complex64> {
    let d = b.eval_point(t) - pole;
    let rho = d.norm();
    if rho < COINCIDENCE {
        return Err(Error::Coincidence { distance: rho });
    }
    let n = l.unsigned_abs();
    let h = hankel1_sequence(n, k * rho)?[n as usize];
    let sign = if l < 0 && n % 2 == 1 { -1.0 } else { 1.0 };
    Ok(h * sign * Complex64::from_polar(1.0, f64::from(l) * d.angle()))
}

/// Everything needed for one direct solve.
#[derive(Debug, Clone)]
pub struct DirectProblem {
    pub boundary: Boundary,
    pub k: f64,
    pub alpha: Vec2,
    pub order: usize,
    pub poles: Vec<Vec2>,
    pub knots: usize,
    pub w_min: f64,
    pub epsilon: f64,
}

/// Assembles and factors the boundary collocation matrix once, so that any
/// number of incident directions can be solved cheaply afterwards.
#[derive(Debug, Clone)]
pub struct MrcSolver {
    pub boundary: Boundary,
    pub k: f64,
    pub order: usize,
    pub poles: Vec<Vec2>,
    pub w_min: f64,
    points: Vec<Vec2>,
    matrix: CMatrix,
    svd: Svd,
}

impl MrcSolver {
    pub fn new(boundary: &Boundary, k: f64, order: usize, poles: &[Vec2], knots: usize, w_min: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        if poles.is_empty() {
            return Err(Error::InvalidInput("at least one pole is required".into()));
        }
        let columns = (2 * order + 1) * poles.len();
        if knots < columns {
            return Err(Error::InvalidInput(format!(
                "need at least as many knots as unknowns: M = {knots} < N = {columns}"
            )));
        }
        let points: Vec<Vec2> = (0..knots)
            .map(|m| boundary.eval_point(std::f64::consts::TAU * m as f64 / knots as f64))
            .collect();
        let rows = points
            .par_iter()
            .map(|&x| basis_row(x, poles, order, k))
            .collect::<Result<Vec<_>>>()?;
        let matrix = DMatrix::from_fn(knots, columns, |i, j| rows[i][j]);
        let svd = svd(&matrix)?;
        Ok(Self {
            boundary: boundary.clone(),
            k,
            order,
            poles: poles.to_vec(),
            w_min,
            points,
            matrix,
            svd,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }

    pub fn knot_points(&self) -> &[Vec2] {
        &self.points
    }

    /// `g(t_m) = -e^{ik r(t_m).alpha}`.
    pub fn boundary_data(&self, alpha: Vec2) -> Vec<Complex64> {
        self.points
            .iter()
            .map(|x| -Complex64::from_polar(1.0, self.k * x.dot(alpha)))
            .collect()
    }

    pub fn solve(&self, alpha: Vec2, epsilon: f64) -> Result<(RadiatingExpansion, LsqSolution)> {
        check_unit(alpha)?;
        let g = self.boundary_data(alpha);
        let sol = solve_with_svd(&self.svd, &g, self.w_min, epsilon)?;
        let exp = RadiatingExpansion::new(self.k, self.poles.clone(), self.order, sol.coefficients.clone())?;
        Ok((exp, sol))
    }

    /// Far-field amplitudes for every incident angle in `incident` observed at
    /// every angle in `observation`.
    pub fn far_field_table(&self, incident: &[f64], observation: &[f64]) -> Result<FarFieldTable> {
        let values = incident
            .par_iter()
            .map(|&b| {
                let (e, _) = self.solve(Vec2::polar(b), 0.0)?;
                Ok(observation.iter().map(|&t| e.far_field(Vec2::polar(t))).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        FarFieldTable::new(self.k, incident.to_vec(), observation.to_vec(), values)
    }
}

impl AmplitudeSource for MrcSolver {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn amplitude(&self, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
        Ok(self.solve(alpha, 0.0)?.0.far_field(alpha_prime))
    }

    fn amplitudes(&self, observations: &[Vec2], alpha: Vec2) -> Result<Vec<Complex64>> {
        let (e, _) = self.solve(alpha, 0.0)?;
        Ok(observations.iter().map(|&o| e.far_field(o)).collect())
    }
}

fn check_unit(v: Vec2) -> Result<()> {
    if (v.norm() - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidInput(format!(
            "direction ({}, {}) is not a unit vector",
            v.x, v.y
        )));
    }
    Ok(())
}

/// Builds the collocation system for `p` and solves it.
pub fn solve_direct(p: &DirectProblem) -> Result<(RadiatingExpansion, LsqSolution)> {
    check_unit(p.alpha)?;
    MrcSolver::new(&p.boundary, p.k, p.order, &p.poles, p.knots, p.w_min)?.solve(p.alpha, p.epsilon)
}

/// Fits a single-pole expansion to far-field samples `target[m]` observed at
/// angles `angles[m]`; the residual is normalized by `sqrt(M)`.
pub fn fit_far_field(
    angles: &[f64],
    target: &[Complex64],
    pole: Vec2,
    order: usize,
    k: f64,
    w_min: f64,
) -> Result<(RadiatingExpansion, LsqSolution)> {
    if angles.len() != target.len() || angles.is_empty() {
        return Err(Error::InvalidInput("angles and target samples must match and be non-empty".into()));
    }
    let pre = far_field_prefactor(k);
    let big = order as i32;
    let matrix = DMatrix::from_fn(angles.len(), 2 * order + 1, |m, i| {
        let l = i as i32 - big;
        let a = Vec2::polar(angles[m]);
        pre * Complex64::from_polar(1.0, -k * a.dot(pole))
            * (-Complex64::i()).powi(l)
            * Complex64::from_polar(1.0, f64::from(l) * angles[m])
    });
    let s = svd(&matrix)?;
    let sol = solve_with_svd(&s, target, w_min, 0.0)?;
    let exp = RadiatingExpansion::new(k, vec![pole], order, sol.coefficients.clone())?;
    Ok((exp, sol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{interior_poles, uniform_angles};
    use crate::lstsq::{normalized_norm, residual_vector};
    use crate::oracles::{exact_expansion_coefficients, CircleScatterer};
    use crate::specfun::hankel1;

    fn origin_circle_solve(k: f64) -> (RadiatingExpansion, LsqSolution) {
        solve_direct(&DirectProblem {
            boundary: Boundary::unit_circle(),
            k,
            alpha: Vec2::new(1.0, 0.0),
            order: 5,
            poles: vec![Vec2::default()],
            knots: 720,
            w_min: DEFAULT_W_MIN,
            epsilon: 0.0,
        })
        .unwrap()
    }

    #[test]
    fn basis_examples() {
        let b = Boundary::unit_circle();
        let o = Vec2::default();
        for t in [0.0, 1.0, 4.0] {
            let v = basis_function(&b, o, 0, t, 2.0).unwrap();
            assert!((v - hankel1(0, 2.0).unwrap()).norm() < 1e-14);
            let v = basis_function(&b, o, 1, t, 2.0).unwrap();
            let want = hankel1(1, 2.0).unwrap() * Complex64::from_polar(1.0, t);
            assert!((v - want).norm() < 1e-14);
        }
        let e = Boundary::experiment_ellipse();
        for l in [-3, 0, 2] {
            let v = basis_function(&e, Vec2::new(1.4, 0.0), l, 0.0, 1.5).unwrap();
            assert!((v - hankel1(l, 0.6 * 1.5).unwrap()).norm() < 1e-13);
        }
        assert!(matches!(
            basis_function(&b, Vec2::new(1.0, 0.0), 0, 0.0, 1.0),
            Err(Error::Coincidence { .. })
        ));
    }

    #[test]
    fn zero_expansion_vanishes() {
        let e = RadiatingExpansion::zeros(1.0, vec![Vec2::new(0.1, 0.2)], 3).unwrap();
        assert_eq!(e.near_field(Vec2::new(2.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(e.far_field(Vec2::polar(0.7)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn single_center_circle_solution() {
        let (e, sol) = origin_circle_solve(1.0);
        // What is left on the boundary is the |l| > 5 tail of the incident wave.
        let tail: f64 = (6..40u32).map(|l| 2.0 * crate::specfun::bessel_j(l, 1.0).unwrap().powi(2)).sum::<f64>().sqrt();
        assert!((sol.r_min - tail).abs() < 1e-9 * tail.max(1.0), "r_min = {} tail = {tail}", sol.r_min);
        let exact = exact_expansion_coefficients(1.0, 1.0, Vec2::new(1.0, 0.0), 5).unwrap();
        for (c, a) in e.coefficients.iter().zip(&exact) {
            assert!((c - a).norm() < 1e-5);
        }
    }

    #[test]
    fn exact_coefficients_reproduce_circle_amplitude() {
        let exact = exact_expansion_coefficients(1.0, 1.0, Vec2::new(1.0, 0.0), 5).unwrap();
        let e = RadiatingExpansion::new(1.0, vec![Vec2::default()], 5, exact).unwrap();
        let s = CircleScatterer::dirichlet(Vec2::default(), 1.0).unwrap().series(1.0).unwrap();
        for t in uniform_angles(12) {
            let d = (e.far_field(Vec2::polar(t)) - s.amplitude_at(Vec2::polar(t), Vec2::new(1.0, 0.0))).norm();
            assert!(d < 1e-5);
        }
    }

    #[test]
    fn ellipse_experiment_first_row() {
        let b = Boundary::experiment_ellipse();
        let poles = interior_poles(&b, 4, 0.7).unwrap();
        let solver = MrcSolver::new(&b, 1.0, 5, &poles, 720, DEFAULT_W_MIN).unwrap();
        let (e, sol) = solver.solve(Vec2::new(1.0, 0.0), 0.0).unwrap();
        assert!(sol.r_min <= 6e-4, "r_min = {}", sol.r_min);
        // Restating the minimization: the sampled boundary error equals r_min.
        let g = solver.boundary_data(Vec2::new(1.0, 0.0));
        let direct = normalized_norm(&residual_vector(solver.matrix(), &e.coefficients, &g));
        assert!((direct - sol.r_min).abs() < 1e-12);
    }

    #[test]
    fn near_field_approaches_far_field() {
        let (e, _) = origin_circle_solve(1.0);
        for t in [0.0, 1.3, 3.0] {
            let r = 1000.0;
            let x = Vec2::polar(t) * r;
            let v = e.near_field(x).unwrap();
            let a = e.far_field(Vec2::polar(t));
            let approx = a * Complex64::from_polar(1.0, r) / r.sqrt();
            assert!((v - approx).norm() <= 5.0 * a.norm() / r);
        }
    }

    #[test]
    fn far_field_fit_self_consistency() {
        let pole = Vec2::new(0.3, -0.2);
        let coeffs: Vec<Complex64> = (0..7).map(|i| Complex64::new(0.1 * i as f64, 0.05 - 0.02 * i as f64)).collect();
        let src = RadiatingExpansion::new(2.0, vec![pole], 3, coeffs.clone()).unwrap();
        let angles = uniform_angles(60);
        let target: Vec<Complex64> = angles.iter().map(|&t| src.far_field(Vec2::polar(t))).collect();
        let (fit, sol) = fit_far_field(&angles, &target, pole, 3, 2.0, 0.0).unwrap();
        assert!(sol.r_min < 1e-12);
        for (a, b) in fit.coefficients.iter().zip(&coeffs) {
            assert!((a - b).norm() < 1e-10);
        }
    }

    #[test]
    fn far_field_fit_at_origin_recovers_exact_coefficients() {
        let s = CircleScatterer::dirichlet(Vec2::default(), 1.0).unwrap().series(1.0).unwrap();
        let angles = uniform_angles(120);
        let alpha = Vec2::new(1.0, 0.0);
        let target: Vec<Complex64> = angles.iter().map(|&t| s.amplitude_at(Vec2::polar(t), alpha)).collect();
        let (fit, sol) = fit_far_field(&angles, &target, Vec2::default(), 5, 1.0, DEFAULT_W_MIN).unwrap();
        assert!(sol.r_min < 1e-5);
        let exact = exact_expansion_coefficients(1.0, 1.0, alpha, 5).unwrap();
        for (a, b) in fit.coefficients.iter().zip(&exact) {
            assert!((a - b).norm() < 1e-6);
        }
        let (_, off) = fit_far_field(&angles, &target, Vec2::new(0.8, 0.0), 5, 1.0, DEFAULT_W_MIN).unwrap();
        assert!(off.r_min <= 2e-4);
    }

    #[test]
    fn rejects_bad_inputs() {
        let b = Boundary::unit_circle();
        assert!(MrcSolver::new(&b, 1.0, 5, &[Vec2::default()], 5, 0.0).is_err());
        let s = MrcSolver::new(&b, 1.0, 2, &[Vec2::default()], 40, 0.0).unwrap();
        assert!(s.solve(Vec2::new(1.0, 1.0), 0.0).is_err());
        assert!(RadiatingExpansion::new(1.0, vec![Vec2::default()], 2, vec![]).is_err());
    }
}

//! Nyström solver for the combined-layer boundary integral equation of the
//! exterior Dirichlet problem.
//!
//! The scattered field is `v(x) = int {dPhi(x,y)/dnu(y) - i eta Phi(x,y)} phi(y) ds(y)`
//! with `Phi(x,y) = (i/4) H_0(k|x-y|)`. The density solves
//! `phi + K phi = 2f` on the boundary. The logarithmic kernel singularities are
//! split off and integrated with the periodic log-weight rule; the remainder
//! uses the trapezoid rule on `2n` equispaced parameters.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::farfield::AmplitudeSource;
use crate::geometry::{Boundary, Vec2};
use crate::specfun::{bessel_j_sequence, hankel1_sequence};

pub const DEFAULT_QUADRATURE: usize = 64;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Density values at the parameters `t_j = pi j / n`, `j = 0..2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinedLayerDensity {
    pub boundary: Boundary,
    pub n: usize,
    pub values: Vec<Complex64>,
    pub eta: f64,
}

/// Boundary samples at the quadrature parameters.
#[derive(Debug, Clone)]
struct Nodes {
    t: Vec<f64>,
    x: Vec<Vec2>,
    /// `(x2', -x1')`, the outward normal scaled by `|x'|`.
    normal: Vec<Vec2>,
    speed: Vec<f64>,
    /// `n(t) . x''(t) / |x'|^2 / (2 pi)`, the diagonal of the smooth double-layer part.
    curvature_term: Vec<f64>,
}

fn check_smooth(b: &Boundary) -> Result<()> {
    if !b.is_smooth() {
        return Err(Error::UnsupportedShape(format!(
            "the Nyström solver needs a smooth analytic boundary, got {}",
            b.kind_name()
        )));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("quadrature size must be at least 2, got {n}")));
    }
    Ok(())
}

/// Quadrature parameters `t_j = pi j / n` for `j = 0..2n`.
pub fn quadrature_parameters(n: usize) -> Vec<f64> {
    (0..2 * n).map(|j| PI * j as f64 / n as f64).collect()
}

/// Boundary points at the quadrature parameters.
pub fn quadrature_points(b: &Boundary, n: usize) -> Vec<Vec2> {
    quadrature_parameters(n).into_iter().map(|t| b.eval_point(t)).collect()
}

fn nodes(b: &Boundary, n: usize) -> Result<Nodes> {
    check_smooth(b)?;
    check_n(n)?;
    let t = quadrature_parameters(n);
    let mut x = Vec::with_capacity(2 * n);
    let mut normal = Vec::with_capacity(2 * n);
    let mut speed = Vec::with_capacity(2 * n);
    let mut curvature_term = Vec::with_capacity(2 * n);
    for &s in &t {
        let d = b.eval_tangent(s)?;
        let dd = b.eval_second_derivative(s)?;
        let nu = Vec2::new(d.y, -d.x);
        let sp = d.norm();
        x.push(b.eval_point(s));
        normal.push(nu);
        speed.push(sp);
        curvature_term.push(nu.dot(dd) / (2.0 * PI * sp * sp));
    }
    Ok(Nodes {
        t,
        x,
        normal,
        speed,
        curvature_term,
    })
}

/// Weights `R_j` of the periodic rule for `int_0^{2pi} ln(4 sin^2((t-tau)/2)) g(tau) dtau`.
fn log_weights(n: usize) -> Vec<f64> {
    let nf = n as f64;
    (0..2 * n)
        .map(|j| {
            let s: f64 = (1..n).map(|m| (m as f64 * j as f64 * PI / nf).cos() / m as f64).sum();
            let alt = if j % 2 == 0 { 1.0 } else { -1.0 };
            -2.0 * PI / nf * s - PI / (nf * nf) * alt
        })
        .collect()
}

fn system_matrix(nd: &Nodes, k: f64, eta: f64) -> Result<DMatrix<Complex64>> {
    let size = nd.t.len();
    let n = size / 2;
    let weights = log_weights(n);
    let h = PI / n as f64;
    let i = Complex64::i();
    let rows = (0..size)
        .into_par_iter()
        .map(|a| -> Result<Vec<Complex64>> {
            let mut row = vec![Complex64::new(0.0, 0.0); size];
            for (b, entry) in row.iter_mut().enumerate() {
                let r_weight = weights[a.abs_diff(b)];
                let sp = nd.speed[b];
                let (l1, l2, m1, m2) = if a == b {
                    let m1 = -sp / (2.0 * PI);
                    let m2 = (0.5 * i - EULER_GAMMA / PI - (k * sp / 2.0).ln() / PI) * sp;
                    (0.0, Complex64::from(nd.curvature_term[b]), m1, m2)
                } else {
                    let diff = nd.x[a] - nd.x[b];
                    let r = diff.norm();
                    let nd_dot = nd.normal[b].dot(diff);
                    let jv = bessel_j_sequence(1, k * r)?;
                    let hv = hankel1_sequence(1, k * r)?;
                    let lg = (4.0 * ((nd.t[a] - nd.t[b]) / 2.0).sin().powi(2)).ln();
                    let l = 0.5 * i * k * nd_dot * hv[1] / r;
                    let l1 = -k / (2.0 * PI) * nd_dot * jv[1] / r;
                    let m = 0.5 * i * hv[0] * sp;
                    let m1 = -jv[0] * sp / (2.0 * PI);
                    (l1, l - l1 * lg, m1, m - m1 * lg)
                };
                let k1 = Complex64::from(l1) - i * eta * m1;
                let k2 = l2 - i * eta * m2;
                *entry = r_weight * k1 + h * k2;
            }
            row[a] += 1.0;
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_fn(size, size, |a, b| rows[a][b]))
}

/// Solves `phi + K phi = 2f` where `f` holds boundary data at the `2n`
/// quadrature points.
pub fn solve_density(b: &Boundary, f: &[Complex64], k: f64, eta: f64, n: usize) -> Result<CombinedLayerDensity> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
    }
    if !(eta > 0.0) {
        return Err(Error::InvalidInput(format!("coupling parameter must be positive, got {eta}")));
    }
    check_n(n)?;
    if f.len() != 2 * n {
        return Err(Error::InvalidInput(format!(
            "boundary data has {} samples, expected {}",
            f.len(),
            2 * n
        )));
    }
    let nd = nodes(b, n)?;
    let a = system_matrix(&nd, k, eta)?;
    let rhs = DVector::from_iterator(2 * n, f.iter().map(|z| 2.0 * z));
    let phi = a.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    if phi.iter().any(|z| !z.is_finite()) {
        return Err(Error::SingularSystem);
    }
    Ok(CombinedLayerDensity {
        boundary: b.clone(),
        n,
        values: phi.iter().copied().collect(),
        eta,
    })
}

/// Density for plane-wave incidence, boundary data `f = -e^{ik x.alpha}`.
pub fn solve_dirichlet_plane_wave(b: &Boundary, k: f64, alpha: Vec2, eta: f64, n: usize) -> Result<CombinedLayerDensity> {
    check_smooth(b)?;
    check_n(n)?;
    let f: Vec<Complex64> = quadrature_points(b, n)
        .into_iter()
        .map(|x| -Complex64::from_polar(1.0, k * x.dot(alpha)))
        .collect();
    solve_density(b, &f, k, eta, n)
}

/// `A(alpha') = e^{-i pi/4}/sqrt(8 pi k) int {k nu.alpha' + eta} e^{-ik alpha'.y} phi ds`.
pub fn far_field_biem(d: &CombinedLayerDensity, k: f64, eta: f64, alpha_prime: Vec2) -> Complex64 {
    let h = PI / d.n as f64;
    let mut total = Complex64::new(0.0, 0.0);
    for (j, phi) in quadrature_parameters(d.n).into_iter().zip(&d.values) {
        let x = d.boundary.eval_point(j);
        let tangent = match d.boundary.eval_tangent(j) {
            Ok(v) => v,
            Err(_) => return Complex64::new(f64::NAN, f64::NAN),
        };
        let nu = Vec2::new(tangent.y, -tangent.x);
        let weight = k * nu.dot(alpha_prime) + eta * tangent.norm();
        total += weight * Complex64::from_polar(1.0, -k * alpha_prime.dot(x)) * phi;
    }
    Complex64::from_polar(1.0 / (8.0 * PI * k).sqrt(), -FRAC_PI_4) * h * total
}

/// Combined-layer potential at an exterior point.
pub fn potential(d: &CombinedLayerDensity, k: f64, x: Vec2) -> Result<Complex64> {
    let h = PI / d.n as f64;
    let i = Complex64::i();
    let mut total = Complex64::new(0.0, 0.0);
    for (t, phi) in quadrature_parameters(d.n).into_iter().zip(&d.values) {
        let y = d.boundary.eval_point(t);
        let tangent = d.boundary.eval_tangent(t)?;
        let nu = Vec2::new(tangent.y, -tangent.x);
        let diff = x - y;
        let r = diff.norm();
        if r < 1e-12 {
            return Err(Error::Coincidence { distance: r });
        }
        let hv = hankel1_sequence(1, k * r)?;
        let double = 0.25 * i * k * hv[1] * nu.dot(diff) / r;
        let single = 0.25 * i * hv[0] * tangent.norm();
        total += (double - i * d.eta * single) * phi;
    }
    Ok(h * total)
}

/// Plane-wave far fields of one smooth obstacle, solving the density anew per
/// incident direction.
#[derive(Debug, Clone)]
pub struct BiemSolver {
    pub boundary: Boundary,
    pub k: f64,
    pub eta: f64,
    pub n: usize,
}

impl BiemSolver {
    /// Uses `eta = k`.
    pub fn new(boundary: &Boundary, k: f64, n: usize) -> Result<Self> {
        check_smooth(boundary)?;
        check_n(n)?;
        Ok(Self {
            boundary: boundary.clone(),
            k,
            eta: k,
            n,
        })
    }

    pub fn density(&self, alpha: Vec2) -> Result<CombinedLayerDensity> {
        solve_dirichlet_plane_wave(&self.boundary, self.k, alpha, self.eta, self.n)
    }
}

impl AmplitudeSource for BiemSolver {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn amplitude(&self, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
        let d = self.density(alpha)?;
        Ok(far_field_biem(&d, self.k, self.eta, alpha_prime))
    }

    fn amplitudes(&self, observations: &[Vec2], alpha: Vec2) -> Result<Vec<Complex64>> {
        let d = self.density(alpha)?;
        Ok(observations.iter().map(|&o| far_field_biem(&d, self.k, self.eta, o)).collect())
    }
}

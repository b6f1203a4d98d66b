//! Scattering of plane waves by a sound-soft `L`-periodic profile.
//!
//! The scattered field is expanded in the quasiperiodic Green's function
//! `g(x, xi)` of the half plane `x_2 > -b` with `g = 0` on `x_2 = -b`, with
//! poles placed just below the profile.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::geometry::{GratingProfile, Vec2};
use crate::lstsq::{solve_with_svd, svd, LsqSolution};

pub const DEFAULT_DEPTH: f64 = 1.2;
pub const DEFAULT_JMAX: usize = 120;
pub const DEFAULT_NODES: usize = 256;
pub const DEFAULT_POLES: usize = 64;
const DEGENERACY: f64 = 1e-12;
const COINCIDENCE: f64 = 1e-10;

/// Incidence from angle `theta` on a periodic profile.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingProblem {
    pub profile: GratingProfile,
    pub k: f64,
    pub theta: f64,
    pub b_depth: f64,
    pub jmax: usize,
    modes: Vec<ModeData>,
}

/// One quasiperiodic mode `e^{i lambda_j x}/sqrt(L)` with vertical wavenumber `mu_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeData {
    pub j: i64,
    pub lambda: f64,
    pub mu: Complex64,
    pub propagating: bool,
}

impl GratingProblem {
    pub fn new(profile: GratingProfile, k: f64, theta: f64, b_depth: f64, jmax: usize) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        if !(theta > 0.0 && theta <= std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidInput(format!("incidence angle must lie in (0, pi/2], got {theta}")));
        }
        if !(b_depth > 0.0) {
            return Err(Error::InvalidInput(format!("depth must be positive, got {b_depth}")));
        }
        let big = jmax as i64;
        let modes = (-big..=big)
            .map(|j| {
                let lambda = k * theta.cos() + TAU * j as f64 / profile.period;
                let gap = k * k - lambda * lambda;
                if gap.abs() < DEGENERACY {
                    return Err(Error::DegenerateMode { j });
                }
                Ok(ModeData {
                    j,
                    lambda,
                    mu: Complex64::new(gap, 0.0).sqrt(),
                    propagating: gap > 0.0,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            profile,
            k,
            theta,
            b_depth,
            jmax,
            modes,
        })
    }

    /// Problem with the default depth and mode truncation.
    pub fn with_defaults(profile: GratingProfile, k: f64, theta: f64) -> Result<Self> {
        Self::new(profile, k, theta, DEFAULT_DEPTH, DEFAULT_JMAX)
    }

    /// `nu = e^{ikL cos theta}`.
    pub fn nu(&self) -> Complex64 {
        Complex64::from_polar(1.0, self.k * self.profile.period * self.theta.cos())
    }

    /// Incident direction `(cos theta, -sin theta)`.
    pub fn alpha(&self) -> Vec2 {
        Vec2::new(self.theta.cos(), -self.theta.sin())
    }

    pub fn modes(&self) -> &[ModeData] {
        &self.modes
    }

    /// `u_0(x) = e^{ik alpha.x}`.
    pub fn incident(&self, x: Vec2) -> Complex64 {
        Complex64::from_polar(1.0, self.k * self.alpha().dot(x))
    }
}

/// Mode `j` of `g`, `|j| <= jmax`.
pub fn mode(g: &GratingProblem, j: i64) -> Result<ModeData> {
    if j.unsigned_abs() as usize > g.jmax {
        return Err(Error::InvalidInput(format!("mode {j} exceeds jmax = {}", g.jmax)));
    }
    Ok(g.modes[(j + g.jmax as i64) as usize])
}

impl ModeData {
    /// Normalized eigenfunction `e^{i lambda_j x}/sqrt(L)`.
    pub fn eigenfunction(&self, period: f64, x: f64) -> Complex64 {
        Complex64::from_polar(1.0 / period.sqrt(), self.lambda * x)
    }

    /// `v_j(t) = e^{i mu_j t}`.
    pub fn v(&self, t: f64) -> Complex64 {
        (Complex64::i() * self.mu * t).exp()
    }

    /// `psi_j(t) = mu_j^{-1} e^{i mu_j b} sin(mu_j (t + b))`.
    pub fn psi(&self, t: f64, b: f64) -> Complex64 {
        let i = Complex64::i();
        ((i * self.mu * (t + 2.0 * b)).exp() - (i * self.mu * (-t)).exp()) / (2.0 * i * self.mu)
    }

    /// `(v_j(t) psi_j(s), d/dt ...)` pieces for the Wronskian check.
    fn derivatives(&self, t: f64, b: f64) -> (Complex64, Complex64) {
        let i = Complex64::i();
        let dv = i * self.mu * self.v(t);
        let dpsi = ((i * self.mu * (t + 2.0 * b)).exp() + (i * self.mu * (-t)).exp()) / 2.0;
        (dv, dpsi)
    }

    /// `v_j(y_>) psi_j(y_<)` in combined-exponent form.
    fn vertical(&self, y_hi: f64, y_lo: f64, b: f64) -> Complex64 {
        let i = Complex64::i();
        ((i * self.mu * (y_hi + y_lo + 2.0 * b)).exp() - (i * self.mu * (y_hi - y_lo)).exp()) / (2.0 * i * self.mu)
    }
}

/// `W[v_j, psi_j](t) = v_j psi_j' - v_j' psi_j`.
pub fn wronskian(m: &ModeData, t: f64, b: f64) -> Complex64 {
    let (dv, dpsi) = m.derivatives(t, b);
    m.v(t) * dpsi - dv * m.psi(t, b)
}

/// `g(x, xi) = sum_j phi_j(x_1) conj(phi_j(xi_1)) v_j(max) psi_j(min)`.
pub fn green_g(g: &GratingProblem, x: Vec2, xi: Vec2) -> Result<Complex64> {
    let d = x.distance(xi);
    if d < COINCIDENCE {
        return Err(Error::Coincidence { distance: d });
    }
    let b = g.b_depth;
    if !(x.y > -b && xi.y > -b) {
        return Err(Error::InvalidInput(format!("points must lie above y = -{b}")));
    }
    let (hi, lo) = if x.y >= xi.y { (x.y, xi.y) } else { (xi.y, x.y) };
    let dx = x.x - xi.x;
    let scale = 1.0 / g.profile.period;
    let mut total = Complex64::new(0.0, 0.0);
    for m in &g.modes {
        let term = Complex64::from_polar(scale, m.lambda * dx) * m.vertical(hi, lo, b);
        if !term.is_finite() {
            return Err(Error::Overflow(format!("grating mode {} at ({}, {})", m.j, x.x, x.y)));
        }
        total += term;
    }
    Ok(total)
}

/// `g` evaluated on the boundary line `x_2 = -b`; exactly the same series as
/// `green_g` without the domain check.
pub fn green_g_on_floor(g: &GratingProblem, x1: f64, xi: Vec2) -> Complex64 {
    let b = g.b_depth;
    let scale = 1.0 / g.profile.period;
    g.modes
        .iter()
        .map(|m| Complex64::from_polar(scale, m.lambda * (x1 - xi.x)) * m.vertical(xi.y, -b, b))
        .sum()
}

/// Outcome of a grating solve.
#[derive(Debug, Clone, PartialEq)]
pub struct GratingSolution {
    pub nodes: Vec<Vec2>,
    pub poles: Vec<Vec2>,
    pub coefficients: Vec<Complex64>,
    pub r_min: f64,
    /// `false` when `epsilon` was not reached even after refinement.
    pub converged: bool,
    /// Number of refinement rounds actually run.
    pub refinements: usize,
    pub lsq: LsqSolution,
}

fn solve_once(g: &GratingProblem, n: usize, m: usize, w_min: f64, epsilon: f64) -> Result<GratingSolution> {
    if m >= n {
        return Err(Error::InvalidInput(format!("need M < N, got N = {n}, M = {m}")));
    }
    let (nodes, poles) = g.profile.nodes_and_poles(n, m)?;
    let rows = nodes
        .par_iter()
        .map(|&x| poles.iter().map(|&p| green_g(g, x, p)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    let a = DMatrix::from_fn(n, m, |i, j| rows[i][j]);
    let rhs: Vec<Complex64> = nodes.iter().map(|&x| -g.incident(x)).collect();
    let lsq = solve_with_svd(&svd(&a)?, &rhs, w_min, epsilon)?;
    Ok(GratingSolution {
        nodes,
        poles,
        coefficients: lsq.coefficients.clone(),
        r_min: lsq.r_min,
        converged: epsilon > 0.0 && lsq.r_min <= epsilon,
        refinements: 0,
        lsq,
    })
}

/// Minimizes `||u_0 + A c||` over the profile nodes.
///
/// With `refine` set and `r_min > epsilon`, one more round is run with `N`
/// and `M` doubled. `converged` reports whether `epsilon` was met.
pub fn solve_grating(
    g: &GratingProblem,
    n: usize,
    m: usize,
    w_min: f64,
    epsilon: f64,
    refine: bool,
) -> Result<GratingSolution> {
    let first = solve_once(g, n, m, w_min, epsilon)?;
    if first.converged || !refine {
        return Ok(first);
    }
    let mut second = solve_once(g, 2 * n, 2 * m, w_min, epsilon)?;
    second.refinements = 1;
    if second.r_min < first.r_min {
        return Ok(second);
    }
    let mut kept = first;
    kept.refinements = 1;
    Ok(kept)
}

/// `v(x) = sum_m c_m g(x, xi_m)`.
pub fn scattered_field_grating(c: &[Complex64], poles: &[Vec2], g: &GratingProblem, x: Vec2) -> Result<Complex64> {
    if c.len() != poles.len() {
        return Err(Error::InvalidInput(format!(
            "{} coefficients for {} poles",
            c.len(),
            poles.len()
        )));
    }
    let mut total = Complex64::new(0.0, 0.0);
    for (c, p) in c.iter().zip(poles) {
        if c.norm() != 0.0 {
            total += c * green_g(g, x, *p)?;
        }
    }
    Ok(total)
}

//! Support function recovery from far-field data.
//!
//! For a convex obstacle the high-frequency amplitude behaves like
//! `A(alpha', alpha) ~ -(1/2) sqrt(|alpha - alpha'|/kappa) e^{ik|alpha - alpha'| d(l)}`
//! with `l = (alpha - alpha')/|alpha - alpha'|`. The support value `d(l)` is read off
//! the phases of `A` over pairs sharing the same `l`. The boundary then follows from
//! `d` on a uniform direction grid by the envelope formula or by half-plane
//! intersection.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI, SQRT_2, TAU};

use crate::error::{Error, Result};
use crate::farfield::{AmplitudeSource, FarFieldTable};
use crate::geometry::{uniform_angles, wrap_angle, Boundary, RectGrid, Vec2};

pub const DEFAULT_BRACKET: f64 = 20.0;
pub const DEFAULT_PAIRS: usize = 12;
pub const DEFAULT_ROBIN_POINTS: usize = 32;
const GOLDEN_TOLERANCE: f64 = 1e-6;
const IDENTITY_TOLERANCE: f64 = 1e-12;

/// `-(1/2) sqrt(|alpha - alpha'|/kappa) e^{ik|alpha - alpha'| d}`.
pub fn approx_amplitude(d: f64, kappa: f64, alpha: Vec2, alpha_prime: Vec2, k: f64) -> Complex64 {
    let t = (alpha - alpha_prime).norm();
    Complex64::from_polar(-0.5 * (t / kappa).sqrt(), k * t * d)
}

/// Mirror image of `alpha` in the line perpendicular to `l`, so that
/// `alpha - reflect(alpha, l)` is parallel to `l`.
pub fn reflect(alpha: Vec2, l: Vec2) -> Vec2 {
    alpha - l * (2.0 * alpha.dot(l))
}

/// `n` incident directions spread evenly inside the open aperture
/// `|angle(alpha) - angle(l)| < pi/4`, each paired with its reflection.
pub fn pair_grid(l: Vec2, n: usize) -> Result<Vec<(Vec2, Vec2)>> {
    if n < 2 {
        return Err(Error::InvalidInput(format!("need at least 2 pairs, got {n}")));
    }
    let base = l.angle();
    let step = 2.0 * FRAC_PI_4 / (n + 1) as f64;
    Ok((1..=n)
        .map(|i| {
            let a = Vec2::polar(base - FRAC_PI_4 + step * i as f64);
            (a, reflect(a, l))
        })
        .collect())
}

/// Pairs ordered by `t = |alpha - alpha'|` on `npts` uniform values in
/// `(sqrt 2, 2]`: `alpha` at angle `arccos(t/2)` from `l`.
pub fn robin_pair_grid(l: Vec2, npts: usize) -> Result<Vec<(Vec2, Vec2)>> {
    if npts < 5 {
        return Err(Error::InvalidInput(format!("need at least 5 points, got {npts}")));
    }
    let base = l.angle();
    Ok((1..=npts)
        .map(|i| {
            let t = SQRT_2 + (2.0 - SQRT_2) * i as f64 / npts as f64;
            let a = Vec2::polar(base + (t / 2.0).clamp(-1.0, 1.0).acos());
            (a, reflect(a, l))
        })
        .collect())
}

/// One sample `A(alpha', alpha)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudePair {
    pub alpha: Vec2,
    pub alpha_prime: Vec2,
    pub amplitude: Complex64,
}

impl AmplitudePair {
    /// `|alpha - alpha'|`.
    pub fn separation(&self) -> f64 {
        (self.alpha - self.alpha_prime).norm()
    }
}

/// Amplitudes over pairs sharing the direction `l`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudePairSet {
    pub l: Vec2,
    pub k: f64,
    pub pairs: Vec<AmplitudePair>,
}

impl AmplitudePairSet {
    /// Checks `(alpha - alpha')/|alpha - alpha'| = l` and `alpha.l > 1/sqrt 2` for every pair.
    pub fn new(l: Vec2, k: f64, pairs: Vec<AmplitudePair>) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        for (i, p) in pairs.iter().enumerate() {
            let diff = p.alpha - p.alpha_prime;
            let t = diff.norm();
            if t == 0.0 || (diff * (1.0 / t) - l).norm() > IDENTITY_TOLERANCE {
                return Err(Error::InvalidInput(format!("pair {i} is not aligned with l")));
            }
            if !(p.alpha.dot(l) > FRAC_1_SQRT_2) {
                return Err(Error::InvalidInput(format!("pair {i} lies outside the aperture")));
            }
        }
        Ok(Self { l, k, pairs })
    }

    /// Queries `source` on the given `(alpha, alpha')` pairs.
    pub fn sample<S: AmplitudeSource + ?Sized>(source: &S, l: Vec2, grid: &[(Vec2, Vec2)]) -> Result<Self> {
        let pairs = grid
            .iter()
            .map(|&(alpha, alpha_prime)| {
                Ok(AmplitudePair {
                    alpha,
                    alpha_prime,
                    amplitude: source.amplitude(alpha_prime, alpha)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(l, source.wavenumber(), pairs)
    }

    /// Every table incident direction inside the aperture of `l` whose
    /// reflection is also an observation direction of the table.
    pub fn from_table(table: &FarFieldTable, l: Vec2) -> Result<Self> {
        let mut pairs = Vec::new();
        for (i, &beta) in table.incident.iter().enumerate() {
            let alpha = Vec2::polar(beta);
            if !(alpha.dot(l) > FRAC_1_SQRT_2) {
                continue;
            }
            let reflected = reflect(alpha, l);
            if let Some(j) = table.observation_index(reflected.angle()) {
                pairs.push(AmplitudePair {
                    alpha,
                    alpha_prime: reflected,
                    amplitude: table.get(i, j),
                });
            }
        }
        Self::new(l, table.k, pairs)
    }
}

/// `Psi(t) = sum |A/|A| + e^{ik|alpha - alpha'| t}|^2`, skipping zero amplitudes.
pub fn psi_objective(s: &AmplitudePairSet, t: f64) -> f64 {
    s.pairs
        .iter()
        .filter(|p| p.amplitude.norm() > 0.0)
        .map(|p| {
            let u = p.amplitude / p.amplitude.norm();
            (u + Complex64::from_polar(1.0, s.k * p.separation() * t)).norm_sqr()
        })
        .sum()
}

fn golden_section<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64, tol: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Minimizer of `Psi` on `[-bracket, bracket]`: uniform scan with step
/// `pi/(200k)`, then golden-section refinement to `1e-6`.
pub fn recover_support_dirichlet(s: &AmplitudePairSet, bracket: f64) -> Result<f64> {
    if s.pairs.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 pairs, got {}", s.pairs.len())));
    }
    if s.pairs.iter().all(|p| p.amplitude.norm() == 0.0) {
        return Err(Error::NoPhase);
    }
    if !(bracket > 0.0) {
        return Err(Error::InvalidInput(format!("bracket must be positive, got {bracket}")));
    }
    let step = PI / (200.0 * s.k);
    let count = (2.0 * bracket / step).ceil() as usize;
    let (best, _) = (0..=count)
        .map(|i| {
            let t = (-bracket + step * i as f64).min(bracket);
            (t, psi_objective(s, t))
        })
        .fold((0.0, f64::INFINITY), |acc, (t, v)| if v < acc.1 { (t, v) } else { acc });
    let lo = (best - step).max(-bracket);
    let hi = (best + step).min(bracket);
    Ok(golden_section(|t| psi_objective(s, t), lo, hi, GOLDEN_TOLERANCE))
}

/// Support value and impedance estimate from the phase slope of `A` in `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobinEstimate {
    pub d: f64,
    pub h: f64,
    /// Fitted slope `C_1` and intercept `C_2` of the unwrapped phase.
    pub slope: f64,
    pub intercept: f64,
}

/// Fits the continuously unwrapped phase of `A` against `t = |alpha - alpha'|`
/// with a line `C_1 t + C_2`; `d = C_1/k` and `h = -k tan(C_2/2)`.
pub fn recover_support_robin(s: &AmplitudePairSet) -> Result<RobinEstimate> {
    if s.pairs.len() < 5 {
        return Err(Error::InvalidInput(format!("need at least 5 pairs, got {}", s.pairs.len())));
    }
    let ts: Vec<f64> = s.pairs.iter().map(AmplitudePair::separation).collect();
    if ts.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidInput("pairs must be ordered by increasing |alpha - alpha'|".into()));
    }
    if s.pairs.iter().any(|p| p.amplitude.norm() == 0.0) {
        return Err(Error::NoPhase);
    }
    let mut phase = Vec::with_capacity(ts.len());
    phase.push(s.pairs[0].amplitude.arg());
    for (i, p) in s.pairs.iter().enumerate().skip(1) {
        let prev = phase[i - 1];
        let raw = p.amplitude.arg();
        let next = raw + TAU * ((prev - raw) / TAU).round();
        let jump = next - prev;
        if jump.abs() > PI / 2.0 {
            return Err(Error::UnwrapAmbiguity { index: i - 1, next: i, jump });
        }
        phase.push(next);
    }
    let n = ts.len() as f64;
    let mean_t = ts.iter().sum::<f64>() / n;
    let mean_p = phase.iter().sum::<f64>() / n;
    let sxx: f64 = ts.iter().map(|t| (t - mean_t).powi(2)).sum();
    let sxy: f64 = ts.iter().zip(&phase).map(|(t, p)| (t - mean_t) * (p - mean_p)).sum();
    let slope = sxy / sxx;
    let intercept = mean_p - slope * mean_t;
    Ok(RobinEstimate {
        d: slope / s.k,
        h: -s.k * (intercept / 2.0).tan(),
        slope,
        intercept,
    })
}

/// Support values `p(t_i) = d(l(t_i))` on a uniform angle grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SupportSamples {
    pub angles: Vec<f64>,
    pub d_values: Vec<f64>,
    pub k: f64,
}

impl SupportSamples {
    /// Samples on `t_i = 2 pi i / n` with `n = d_values.len()`.
    pub fn new(d_values: Vec<f64>, k: f64) -> Self {
        Self {
            angles: uniform_angles(d_values.len()),
            d_values,
            k,
        }
    }

    pub fn directions(&self) -> impl Iterator<Item = Vec2> + '_ {
        self.angles.iter().map(|&t| Vec2::polar(t))
    }
}

/// Runs the Dirichlet recovery on `n_directions` uniform directions, sampling
/// `source` on `pair_grid(l, n_pairs)` for each.
pub fn recover_support_curve<S: AmplitudeSource + ?Sized>(
    source: &S,
    n_directions: usize,
    n_pairs: usize,
    bracket: f64,
) -> Result<SupportSamples> {
    let d_values = uniform_angles(n_directions)
        .par_iter()
        .map(|&t| {
            let l = Vec2::polar(t);
            let set = AmplitudePairSet::sample(source, l, &pair_grid(l, n_pairs)?)?;
            recover_support_dirichlet(&set, bracket)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportSamples::new(d_values, source.wavenumber()))
}

/// Same as `recover_support_curve` with the pairs drawn from a table.
pub fn recover_support_curve_from_table(table: &FarFieldTable, n_directions: usize, bracket: f64) -> Result<SupportSamples> {
    let d_values = uniform_angles(n_directions)
        .par_iter()
        .map(|&t| recover_support_dirichlet(&AmplitudePairSet::from_table(table, Vec2::polar(t))?, bracket))
        .collect::<Result<Vec<_>>>()?;
    Ok(SupportSamples::new(d_values, table.k))
}

/// Envelope points `x(t) = p(t) l(t) + p'(t) l(t)^perp`, with `p'` by
/// periodic central differences.
pub fn reconstruct_boundary(s: &SupportSamples) -> Result<Vec<Vec2>> {
    let n = s.d_values.len();
    if n < 8 {
        return Err(Error::InvalidInput(format!("need at least 8 support samples, got {n}")));
    }
    let dt = TAU / n as f64;
    Ok((0..n)
        .map(|i| {
            let p = s.d_values[i];
            let dp = (s.d_values[(i + 1) % n] - s.d_values[(i + n - 1) % n]) / (2.0 * dt);
            let l = Vec2::polar(s.angles[i]);
            l * p + l.perp() * dp
        })
        .collect())
}

/// Marks grid points with `x.l_i >= d_i` for every sample.
pub fn localize_halfplanes(s: &SupportSamples, grid: &RectGrid) -> Vec<bool> {
    let mask: Vec<bool> = grid
        .points()
        .map(|x| s.directions().zip(&s.d_values).all(|(l, &d)| x.dot(l) >= d))
        .collect();
    if !mask.iter().any(|&m| m) {
        log::warn!("half-plane intersection is empty on the requested grid");
    }
    mask
}

/// Directions `l` whose supporting line touches the boundary in two separated
/// points, found as jumps of the support point along a dense direction sweep.
pub fn bitangent_directions(b: &Boundary, directions: usize, boundary_samples: usize) -> Vec<f64> {
    let poly = b.polygon(boundary_samples);
    let support_point = |t: f64| {
        let l = Vec2::polar(t);
        poly.iter()
            .copied()
            .min_by(|p, q| p.dot(l).total_cmp(&q.dot(l)))
            .unwrap_or_default()
    };
    let spacing = poly
        .iter()
        .zip(poly.iter().cycle().skip(1))
        .map(|(a, b)| a.distance(*b))
        .fold(0.0, f64::max);
    let angles = uniform_angles(directions);
    let points: Vec<Vec2> = angles.iter().map(|&t| support_point(t)).collect();
    let mut out = Vec::new();
    for i in 0..directions {
        let j = (i + 1) % directions;
        if points[i].distance(points[j]) > 20.0 * spacing {
            let t = if j == 0 { angles[i] + 0.5 * TAU / directions as f64 } else { 0.5 * (angles[i] + angles[j]) };
            out.push(wrap_angle(t));
        }
    }
    out
}

/// Whether `t` lies at least `exclusion` away from every angle in `bitangents`.
pub fn away_from(t: f64, bitangents: &[f64], exclusion: f64) -> bool {
    bitangents.iter().all(|&b| {
        let d = wrap_angle(t - b).abs();
        d.min(TAU - d) >= exclusion
    })
}

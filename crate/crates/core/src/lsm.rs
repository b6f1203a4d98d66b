//! Linear sampling indicators built from the far-field matrix.
//!
//! For each sampling point `z` the right-hand side `f_n = e^{i pi/4}/sqrt(8 pi k) e^{-ik alpha_n.z}`
//! is expanded in the singular system of `F`. The first indicator solves
//! `F g = f` and the second solves `(F^* F)^{1/4} g = f`. Small values of
//! `||zeta||` are observed at points of the obstacle and the scan reports the minimizer.

use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, PI};

use crate::error::{Error, Result};
use crate::farfield::{AmplitudeSource, FarFieldTable};
use crate::geometry::{uniform_angles, RectGrid, Vec2};
use crate::lstsq::{svd, CMatrix, Svd};

pub const DEFAULT_CUTOFF_RATIO: f64 = 1e-12;
pub const DEFAULT_DIRECTIONS: usize = 128;
pub const DEFAULT_GRID_POINTS: usize = 61;
pub const DEFAULT_GRID_SIDE: f64 = 12.0;

/// `F[i][j] = A(alpha_i, beta_j)` on one uniform set of `N` directions.
#[derive(Debug, Clone)]
pub struct FarFieldMatrix {
    pub k: f64,
    pub directions: Vec<Vec2>,
    pub matrix: CMatrix,
}

impl FarFieldMatrix {
    pub fn from_source<S: AmplitudeSource + ?Sized>(source: &S, n: usize) -> Result<Self> {
        Self::from_table(&FarFieldTable::from_source(source, n, n)?)
    }

    /// Needs equal uniform incident and observation grids.
    pub fn from_table(table: &FarFieldTable) -> Result<Self> {
        let n = table.incident.len();
        if table.observation.len() != n || n == 0 {
            return Err(Error::InvalidInput(format!(
                "far-field matrix needs a square table, got {} x {}",
                n,
                table.observation.len()
            )));
        }
        let uniform = uniform_angles(n);
        let matches = |a: &[f64]| a.iter().zip(&uniform).all(|(x, y)| (x - y).abs() < 1e-9);
        if !matches(&table.incident) || !matches(&table.observation) {
            return Err(Error::InvalidInput("far-field matrix needs uniform direction grids starting at 0".into()));
        }
        Ok(Self {
            k: table.k,
            directions: uniform.iter().map(|&t| Vec2::polar(t)).collect(),
            matrix: CMatrix::from_fn(n, n, |i, j| table.get(j, i)),
        })
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }
}

/// `f_n = e^{i pi/4}/sqrt(8 pi k) e^{-ik alpha_n.z}`.
pub fn build_rhs(z: Vec2, directions: &[Vec2], k: f64) -> Vec<Complex64> {
    let scale = 1.0 / (8.0 * PI * k).sqrt();
    directions
        .iter()
        .map(|a| Complex64::from_polar(scale, FRAC_PI_4 - k * a.dot(z)))
        .collect()
}

/// The singular system of `F` with the retained count under a cutoff.
#[derive(Debug, Clone)]
pub struct LsmOperator {
    pub k: f64,
    pub directions: Vec<Vec2>,
    svd: Svd,
    retained: usize,
}

impl LsmOperator {
    /// Keeps singular values `>= cutoff_ratio * s_max`.
    pub fn new(m: &FarFieldMatrix, cutoff_ratio: f64) -> Result<Self> {
        let svd = svd(&m.matrix)?;
        let s_max = svd.singular_values.first().copied().unwrap_or(0.0);
        let cutoff = cutoff_ratio * s_max;
        let retained = svd.singular_values.iter().take_while(|&&s| s >= cutoff && s > 0.0).count();
        if retained == 0 {
            return Err(Error::AllValuesCut { cutoff });
        }
        Ok(Self {
            k: m.k,
            directions: m.directions.clone(),
            svd,
            retained,
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.svd.singular_values
    }

    pub fn retained(&self) -> usize {
        self.retained
    }

    /// `||zeta||^2 = sum |rho_n|^2 / s_n^2` with `rho = U^H f`.
    pub fn zeta_norm_ck(&self, f: &[Complex64]) -> f64 {
        (0..self.retained)
            .map(|n| {
                let rho: Complex64 = self.svd.u.column(n).iter().zip(f).map(|(u, f)| u.conj() * f).sum();
                rho.norm_sqr() / self.svd.singular_values[n].powi(2)
            })
            .sum::<f64>()
            .sqrt()
    }

    /// `||zeta||^2 = sum |mu_n|^2 / s_n` with `mu = V^H f`.
    pub fn zeta_norm_kirsch(&self, f: &[Complex64]) -> f64 {
        (0..self.retained)
            .map(|n| {
                let mu: Complex64 = self.svd.v.column(n).iter().zip(f).map(|(v, f)| v.conj() * f).sum();
                mu.norm_sqr() / self.svd.singular_values[n]
            })
            .sum::<f64>()
            .sqrt()
    }
}

/// `||zeta||` from `F g = f` keeping singular values `>= s_min_cutoff`.
pub fn zeta_norm_ck(m: &FarFieldMatrix, f: &[Complex64], s_min_cutoff: f64) -> Result<f64> {
    Ok(operator_with_cutoff(m, s_min_cutoff)?.zeta_norm_ck(f))
}

/// `||zeta||` from `(F^* F)^{1/4} g = f` keeping singular values `>= s_min_cutoff`.
pub fn zeta_norm_kirsch(m: &FarFieldMatrix, f: &[Complex64], s_min_cutoff: f64) -> Result<f64> {
    Ok(operator_with_cutoff(m, s_min_cutoff)?.zeta_norm_kirsch(f))
}

fn operator_with_cutoff(m: &FarFieldMatrix, s_min_cutoff: f64) -> Result<LsmOperator> {
    let svd = svd(&m.matrix)?;
    let retained = svd
        .singular_values
        .iter()
        .take_while(|&&s| s >= s_min_cutoff && s > 0.0)
        .count();
    if retained == 0 {
        return Err(Error::AllValuesCut { cutoff: s_min_cutoff });
    }
    Ok(LsmOperator {
        k: m.k,
        directions: m.directions.clone(),
        svd,
        retained,
    })
}

/// `log10 ||zeta||` for both indicators over a grid, row-major with `x` fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct LsmScan {
    pub grid: RectGrid,
    pub values_ck: Vec<f64>,
    pub values_k: Vec<f64>,
    pub cutoff_ratio: f64,
    pub retained: usize,
}

impl LsmScan {
    fn argmin(&self, values: &[f64]) -> Vec2 {
        let i = values
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        self.grid.point(i)
    }

    pub fn argmin_ck(&self) -> Vec2 {
        self.argmin(&self.values_ck)
    }

    pub fn argmin_kirsch(&self) -> Vec2 {
        self.argmin(&self.values_k)
    }
}

/// Factors `F` once and evaluates both indicators on every grid point.
pub fn scan(m: &FarFieldMatrix, grid: &RectGrid, cutoff_ratio: f64) -> Result<LsmScan> {
    let op = LsmOperator::new(m, cutoff_ratio)?;
    let (values_ck, values_k): (Vec<f64>, Vec<f64>) = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let f = build_rhs(grid.point(i), &op.directions, op.k);
            (op.zeta_norm_ck(&f).log10(), op.zeta_norm_kirsch(&f).log10())
        })
        .unzip();
    Ok(LsmScan {
        grid: *grid,
        values_ck,
        values_k,
        cutoff_ratio,
        retained: op.retained,
    })
}

/// Eigenvalue magnitudes of a circulant matrix `C[i][j] = a[(i - j) mod N]`, descending.
pub fn circulant_eigenvalue_magnitudes(first_column: &[Complex64]) -> Vec<f64> {
    let n = first_column.len();
    let mut out: Vec<f64> = (0..n)
        .map(|m| {
            first_column
                .iter()
                .enumerate()
                .map(|(j, a)| a * Complex64::from_polar(1.0, -2.0 * PI * ((m * j) % n) as f64 / n as f64))
                .sum::<Complex64>()
                .norm()
        })
        .collect();
    out.sort_by(|a, b| b.total_cmp(a));
    out
}

//! Complex least squares through the singular value decomposition with a
//! spectral cutoff and one-at-a-time rank growth.
//!
//! Every residual is reported in the normalized norm
//! `||x||^2 = (1/M) sum |x_i|^2`.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const MAX_SVD_ITERATIONS: usize = 200_000;
/// Convergence thresholds tried in turn. A threshold of exactly machine
/// epsilon can stall the complex bidiagonal sweep into a wrong factorization.
const SVD_THRESHOLDS: [f64; 3] = [8.0 * f64::EPSILON, 64.0 * f64::EPSILON, 1024.0 * f64::EPSILON];
/// Largest accepted `||A - U W V^H||_F / ||A||_F`.
const SVD_RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

/// Thin SVD `A = U diag(w) V^H` with `w` descending.
#[derive(Debug, Clone)]
pub struct Svd {
    /// `M x r` left singular vectors, `r = min(M, N)`.
    pub u: CMatrix,
    pub singular_values: Vec<f64>,
    /// `N x r` right singular vectors.
    pub v: CMatrix,
}

/// Thin SVD with descending singular values. The largest-magnitude entry of
/// each right singular vector (first one on ties) is made real and positive,
/// and the matching left vector takes the same phase.
pub fn svd(a: &CMatrix) -> Result<Svd> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidInput("matrix must be non-empty".into()));
    }
    let scale = a.norm();
    let dec = SVD_THRESHOLDS
        .iter()
        .filter_map(|&eps| a.clone().try_svd(true, true, eps, MAX_SVD_ITERATIONS))
        .find(|d| {
            d.clone()
                .recompose()
                .is_ok_and(|r| (r - a).norm() <= SVD_RECONSTRUCTION_TOLERANCE * scale.max(f64::MIN_POSITIVE))
        })
        .ok_or(Error::SvdFailed)?;
    let u_raw = dec.u.ok_or(Error::SvdFailed)?;
    let v_t = dec.v_t.ok_or(Error::SvdFailed)?;
    let r = dec.singular_values.len();

    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| dec.singular_values[j].total_cmp(&dec.singular_values[i]));

    let mut u = CMatrix::zeros(m, r);
    let mut v = CMatrix::zeros(n, r);
    let mut w = Vec::with_capacity(r);
    for (dst, &src) in order.iter().enumerate() {
        w.push(dec.singular_values[src]);
        let mut pivot = 0;
        let mut best = -1.0;
        for i in 0..n {
            let mag = v_t[(src, i)].norm();
            if mag > best {
                best = mag;
                pivot = i;
            }
        }
        // Column of V is the conjugated row of V^H.
        let p = v_t[(src, pivot)].conj();
        let phase = if best > 0.0 { p.conj() / best } else { Complex64::new(1.0, 0.0) };
        for i in 0..n {
            v[(i, dst)] = v_t[(src, i)].conj() * phase;
        }
        for i in 0..m {
            u[(i, dst)] = u_raw[(i, src)] * phase;
        }
    }
    Ok(Svd {
        u,
        singular_values: w,
        v,
    })
}

/// `min ||A c - b||` by truncated SVD.
#[derive(Debug, Clone)]
pub struct SpectralLsqProblem {
    pub matrix: CMatrix,
    pub rhs: Vec<Complex64>,
    pub w_min: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsqSolution {
    pub coefficients: Vec<Complex64>,
    /// Normalized residual at the final retained rank.
    pub r_min: f64,
    pub rank_used: usize,
    /// Number of singular values with `w >= w_min` (and `w > 0`).
    pub retained: usize,
    pub converged: bool,
    /// Normalized residual after retaining `p = 0, 1, ..., rank_used` values.
    pub residual_history: Vec<f64>,
}

impl SpectralLsqProblem {
    pub fn solve(&self) -> Result<LsqSolution> {
        solve_spectral(self)
    }
}

pub fn solve_spectral(p: &SpectralLsqProblem) -> Result<LsqSolution> {
    if p.rhs.len() != p.matrix.nrows() {
        return Err(Error::InvalidInput(format!(
            "right-hand side has {} entries for a matrix with {} rows",
            p.rhs.len(),
            p.matrix.nrows()
        )));
    }
    let s = svd(&p.matrix)?;
    solve_with_svd(&s, &p.rhs, p.w_min, p.epsilon)
}

/// Rank-growing solve against a precomputed decomposition; lets callers
/// factor once and solve for many right-hand sides.
pub fn solve_with_svd(s: &Svd, b: &[Complex64], w_min: f64, epsilon: f64) -> Result<LsqSolution> {
    let m = s.u.nrows();
    if b.len() != m {
        return Err(Error::InvalidInput(format!(
            "right-hand side has {} entries, expected {m}",
            b.len()
        )));
    }
    if !(w_min >= 0.0) {
        return Err(Error::InvalidInput(format!("w_min must be nonnegative, got {w_min}")));
    }
    let retained = s
        .singular_values
        .iter()
        .take_while(|&&w| w >= w_min && w > 0.0)
        .count();
    let scale = 1.0 / (m as f64).sqrt();
    // The residual is tracked as the vector b - U_P U_P^H b rather than through
    // ||b||^2 - sum |rho|^2, which cancels badly once the fit is good.
    let mut remainder: Vec<Complex64> = b.to_vec();
    let norm = |r: &[Complex64]| r.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt() * scale;

    let mut projections = Vec::with_capacity(retained);
    let mut history = vec![norm(&remainder)];
    let mut converged = history[0] <= epsilon;
    if !converged {
        for n in 0..retained {
            let u = s.u.column(n);
            let rho: Complex64 = u.iter().zip(b).map(|(u, b)| u.conj() * b).sum();
            for (r, u) in remainder.iter_mut().zip(u.iter()) {
                *r -= u * rho;
            }
            projections.push(rho);
            let r = norm(&remainder);
            history.push(r);
            if r <= epsilon {
                converged = true;
                break;
            }
        }
    }
    let rank_used = projections.len();
    let n = s.v.nrows();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    for (k, rho) in projections.iter().enumerate() {
        let f = rho / s.singular_values[k];
        for (ci, vi) in c.iter_mut().zip(s.v.column(k).iter()) {
            *ci += f * vi;
        }
    }
    Ok(LsqSolution {
        coefficients: c,
        r_min: *history.last().unwrap(),
        rank_used,
        retained,
        converged,
        residual_history: history,
    })
}

/// `sqrt((1/M) sum |x_i|^2)`.
pub fn normalized_norm(x: &[Complex64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    (x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.len() as f64).sqrt()
}

/// `A c - b` as a vector.
pub fn residual_vector(a: &CMatrix, c: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    (0..a.nrows())
        .map(|i| {
            let row: Complex64 = (0..a.ncols()).map(|j| a[(i, j)] * c[j]).sum();
            row - b[i]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> CMatrix {
        CMatrix::from_fn(m, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    fn random_vector(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
        (0..m)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect()
    }

    fn reconstruct(s: &Svd) -> CMatrix {
        let w = CMatrix::from_diagonal(&DVector::from_iterator(
            s.singular_values.len(),
            s.singular_values.iter().map(|&x| Complex64::new(x, 0.0)),
        ));
        &s.u * w * s.v.adjoint()
    }

    #[test]
    fn identity_and_diagonal() {
        let s = svd(&CMatrix::identity(3, 3)).unwrap();
        assert_eq!(s.singular_values, vec![1.0, 1.0, 1.0]);
        let d = CMatrix::from_diagonal(&DVector::from_vec(vec![
            Complex64::new(3.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(2.0, 0.0),
        ]));
        let s = svd(&d).unwrap();
        assert_eq!(s.singular_values, vec![3.0, 2.0, 0.0]);
    }

    #[test]
    fn random_reconstruction_and_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let a = random_matrix(&mut rng, 8, 5);
        let s = svd(&a).unwrap();
        let err = (reconstruct(&s) - &a).norm() / a.norm();
        assert!(err < 1e-10);
        let utu = s.u.adjoint() * &s.u;
        let vtv = s.v.adjoint() * &s.v;
        assert!((utu - CMatrix::identity(5, 5)).norm() < 1e-10);
        assert!((vtv - CMatrix::identity(5, 5)).norm() < 1e-10);
        let gram = a.adjoint() * &a;
        let mut eig: Vec<f64> = gram
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|&l| l.max(0.0).sqrt())
            .collect();
        eig.sort_by(|x, y| y.total_cmp(x));
        for (w, e) in s.singular_values.iter().zip(&eig) {
            assert!((w - e).abs() < 1e-10 * eig[0]);
        }
    }

    #[test]
    fn phase_convention_holds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s = svd(&random_matrix(&mut rng, 6, 4)).unwrap();
        for k in 0..4 {
            let col = s.v.column(k);
            let big = col.iter().max_by(|a, b| a.norm().total_cmp(&b.norm())).unwrap();
            assert!(big.im.abs() < 1e-14 && big.re > 0.0);
        }
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![Complex64::new(1.0, 2.0), Complex64::new(-3.0, 0.5), Complex64::new(0.0, 1.0)];
        let p = SpectralLsqProblem {
            matrix: CMatrix::identity(3, 3),
            rhs: b.clone(),
            w_min: 0.0,
            epsilon: 0.0,
        };
        let sol = p.solve().unwrap();
        for (c, b) in sol.coefficients.iter().zip(&b) {
            assert!((c - b).norm() < 1e-14);
        }
        assert!(sol.r_min < 1e-14);
        assert_eq!(sol.rank_used, 3);
    }

    #[test]
    fn duplicated_column_is_cut() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut a = random_matrix(&mut rng, 10, 4);
        let col = a.column(0).clone_owned();
        a.set_column(3, &col);
        let b = random_vector(&mut rng, 10);
        let sol = solve_spectral(&SpectralLsqProblem {
            matrix: a,
            rhs: b,
            w_min: 1e-12,
            epsilon: 0.0,
        })
        .unwrap();
        assert_eq!(sol.retained, 3);
        assert!(sol.coefficients.iter().all(|c| c.re.is_finite() && c.im.is_finite()));
        assert!(!sol.converged);
    }

    #[test]
    fn full_rank_matches_normal_equations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = random_matrix(&mut rng, 20, 7);
        let b = random_vector(&mut rng, 20);
        let sol = solve_spectral(&SpectralLsqProblem {
            matrix: a.clone(),
            rhs: b.clone(),
            w_min: 0.0,
            epsilon: 0.0,
        })
        .unwrap();
        let bv = DVector::from_vec(b.clone());
        let normal = (a.adjoint() * &a).lu().solve(&(a.adjoint() * bv)).unwrap();
        for (c, x) in sol.coefficients.iter().zip(normal.iter()) {
            assert!((c - x).norm() < 1e-8);
        }
        let direct = normalized_norm(&residual_vector(&a, &sol.coefficients, &b));
        assert!((direct - sol.r_min).abs() < 1e-10);
    }

    #[test]
    fn stops_at_first_rank_meeting_epsilon() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_matrix(&mut rng, 12, 6);
        let b = random_vector(&mut rng, 12);
        let full = solve_spectral(&SpectralLsqProblem {
            matrix: a.clone(),
            rhs: b.clone(),
            w_min: 0.0,
            epsilon: 0.0,
        })
        .unwrap();
        let target = full.residual_history[3];
        let part = solve_spectral(&SpectralLsqProblem {
            matrix: a,
            rhs: b,
            w_min: 0.0,
            epsilon: target,
        })
        .unwrap();
        assert!(part.converged);
        assert_eq!(part.rank_used, 3);
        assert_eq!(part.r_min, target);
    }

    #[test]
    fn rejects_mismatched_rhs() {
        let p = SpectralLsqProblem {
            matrix: CMatrix::identity(3, 3),
            rhs: vec![Complex64::new(1.0, 0.0); 2],
            w_min: 0.0,
            epsilon: 0.0,
        };
        assert!(matches!(p.solve(), Err(Error::InvalidInput(_))));
    }
}

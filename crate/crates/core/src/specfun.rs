//! Integer-order cylinder functions of a positive real argument.
//!
//! `J_l` comes from Miller's downward recurrence normalized by
//! `J_0 + 2 Σ J_2k = 1`. The same normalized sequence feeds the Neumann
//! series for `Y_0` and `Y_1`, and higher `Y_l` follow by upward recurrence,
//! which is stable for the second kind.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Largest order accepted by any routine in this module.
pub const MAX_ORDER: u32 = 200;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const RESCALE_LIMIT: f64 = 1e200;
const SMALL_ARGUMENT: f64 = 1e-6;

/// One evaluation of all three cylinder functions at a fixed order and argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CylinderFunctionValue {
    pub order: i32,
    pub argument: f64,
    pub j: f64,
    pub y: f64,
    pub h1: Complex64,
}

impl CylinderFunctionValue {
    pub fn evaluate(order: i32, x: f64) -> Result<Self> {
        check_order(order.unsigned_abs())?;
        check_positive(x)?;
        let l = order.unsigned_abs();
        let sign = parity(order);
        let j = sign * bessel_j_sequence(l, x)?[l as usize];
        let y = sign * bessel_y_sequence(l, x)?[l as usize];
        Ok(Self {
            order,
            argument: x,
            j,
            y,
            h1: Complex64::new(j, y),
        })
    }
}

fn check_order(l: u32) -> Result<()> {
    if l > MAX_ORDER {
        return Err(Error::OrderTooLarge {
            order: i64::from(l),
            max: MAX_ORDER,
        });
    }
    Ok(())
}

fn check_positive(x: f64) -> Result<()> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("argument must be positive and finite, got {x}")));
    }
    Ok(())
}

fn parity(order: i32) -> f64 {
    if order < 0 && order % 2 != 0 {
        -1.0
    } else {
        1.0
    }
}

/// Normalized `J_0 ..= J_top` where `top >= lmax` reaches far enough that the
/// omitted tail is negligible for the Neumann series as well.
fn miller(lmax: usize, x: f64) -> Vec<f64> {
    if x < SMALL_ARGUMENT {
        return small_argument_j(lmax.max(24), x);
    }
    let m = lmax.max(x.ceil() as usize);
    let mut start = m + 20 + (6.0 * (m as f64).sqrt()) as usize;
    if start % 2 == 1 {
        start += 1;
    }
    let mut f = vec![0.0; start + 2];
    f[start] = 1e-30;
    let mut norm = 0.0;
    for n in (1..=start).rev() {
        f[n - 1] = 2.0 * n as f64 / x * f[n] - f[n + 1];
        if (n - 1) % 2 == 0 && n > 1 {
            norm += 2.0 * f[n - 1];
        }
        if f[n - 1].abs() > RESCALE_LIMIT {
            let s = 1.0 / RESCALE_LIMIT;
            for v in f[n - 1..].iter_mut() {
                *v *= s;
            }
            norm *= s;
        }
    }
    norm += f[0];
    f.truncate(start + 1);
    for v in f.iter_mut() {
        *v /= norm;
    }
    f
}

fn small_argument_j(top: usize, x: f64) -> Vec<f64> {
    let half = 0.5 * x;
    let mut out = Vec::with_capacity(top + 1);
    let mut lead = 1.0;
    for n in 0..=top {
        if n > 0 {
            lead *= half / n as f64;
        }
        out.push(lead * (1.0 - half * half / (n as f64 + 1.0)));
    }
    out
}

/// `J_0(x) ..= J_lmax(x)`; `x = 0` returns the limit values.
pub fn bessel_j_sequence(lmax: u32, x: f64) -> Result<Vec<f64>> {
    check_order(lmax)?;
    if x == 0.0 {
        let mut out = vec![0.0; lmax as usize + 1];
        out[0] = 1.0;
        return Ok(out);
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::Domain(format!("argument must be nonnegative and finite, got {x}")));
    }
    let mut j = miller(lmax as usize, x);
    j.truncate(lmax as usize + 1);
    Ok(j)
}

/// `Y_0(x) ..= Y_lmax(x)`.
pub fn bessel_y_sequence(lmax: u32, x: f64) -> Result<Vec<f64>> {
    check_order(lmax)?;
    check_positive(x)?;
    let j = miller(lmax as usize, x);
    y_from_j(lmax as usize, x, &j)
}

fn y_from_j(lmax: usize, x: f64, j: &[f64]) -> Result<Vec<f64>> {
    let lg = (0.5 * x).ln() + EULER_GAMMA;
    let top = j.len() - 1;
    let mut s0 = 0.0;
    let mut s1 = 0.0;
    let mut k = 1;
    while 2 * k <= top {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        s0 += sign * j[2 * k] / k as f64;
        let next = if 2 * k < top { j[2 * k + 1] } else { 0.0 };
        s1 += sign * (j[2 * k - 1] - next) / k as f64;
        k += 1;
    }
    let two_pi = std::f64::consts::FRAC_2_PI;
    let y0 = two_pi * (lg * j[0] - 2.0 * s0);
    let y1 = two_pi * (lg * j[1] - j[0] / x + s1);
    let mut y = Vec::with_capacity(lmax + 1);
    y.push(y0);
    if lmax >= 1 {
        y.push(y1);
    }
    for n in 1..lmax {
        let next = 2.0 * n as f64 / x * y[n] - y[n - 1];
        if !next.is_finite() {
            return Err(Error::Overflow(format!(
                "Y_{}({x}) is not representable in double precision",
                n + 1
            )));
        }
        y.push(next);
    }
    Ok(y)
}

/// `H^(1)_0(x) ..= H^(1)_lmax(x)` from one shared recurrence.
pub fn hankel1_sequence(lmax: u32, x: f64) -> Result<Vec<Complex64>> {
    check_order(lmax)?;
    check_positive(x)?;
    let j = miller(lmax as usize, x);
    let y = y_from_j(lmax as usize, x, &j)?;
    Ok(j.iter().zip(&y).map(|(&a, &b)| Complex64::new(a, b)).collect())
}

/// Bessel function of the first kind `J_l(x)`.
pub fn bessel_j(l: u32, x: f64) -> Result<f64> {
    if x < 0.0 {
        return Err(Error::Domain(format!("argument must be nonnegative, got {x}")));
    }
    Ok(bessel_j_sequence(l, x)?[l as usize])
}

/// Neumann function `Y_l(x) = N_l(x)`.
pub fn bessel_y(l: u32, x: f64) -> Result<f64> {
    Ok(bessel_y_sequence(l, x)?[l as usize])
}

/// `J_l(x)` for signed order.
pub fn bessel_j_signed(l: i32, x: f64) -> Result<f64> {
    Ok(parity(l) * bessel_j(l.unsigned_abs(), x)?)
}

/// `H^(1)_l(x) = J_l(x) + i Y_l(x)` with `H_{-l} = (-1)^l H_l`.
pub fn hankel1(l: i32, x: f64) -> Result<Complex64> {
    let n = l.unsigned_abs();
    check_order(n)?;
    Ok(hankel1_sequence(n, x)?[n as usize] * parity(l))
}

/// `d/dx J_l(x) = J_{l-1}(x) - (l/x) J_l(x)`.
pub fn bessel_j_derivative(l: i32, x: f64) -> Result<f64> {
    check_order(l.unsigned_abs() + 1)?;
    check_positive(x)?;
    let below = bessel_j_signed(l - 1, x)?;
    Ok(below - f64::from(l) / x * bessel_j_signed(l, x)?)
}

/// `d/dx H^(1)_l(x) = H_{l-1}(x) - (l/x) H_l(x)`.
pub fn hankel1_derivative(l: i32, x: f64) -> Result<Complex64> {
    check_order(l.unsigned_abs() + 1)?;
    let below = hankel1(l - 1, x)?;
    Ok(below - hankel1(l, x)? * (f64::from(l) / x))
}

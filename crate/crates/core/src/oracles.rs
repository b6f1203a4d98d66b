//! Closed-form scattering by a circle: amplitude series for Dirichlet and
//! Robin conditions, and the exact Dirichlet boundary trace.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::farfield::{far_field_prefactor, AmplitudeSource};
use crate::geometry::Vec2;
use crate::specfun::{bessel_j_derivative, bessel_j_signed, hankel1, hankel1_derivative};

/// Largest order summed in the amplitude series.
pub const SERIES_ORDER_CAP: u32 = 60;
const SERIES_TOLERANCE: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    Dirichlet,
    /// `du/dN + h u = 0`; `h = 0` is the Neumann condition.
    Robin { h: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleScatterer {
    pub center: Vec2,
    pub radius: f64,
    pub condition: BoundaryCondition,
}

impl CircleScatterer {
    pub fn new(center: Vec2, radius: f64, condition: BoundaryCondition) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("radius must be positive, got {radius}")));
        }
        if let BoundaryCondition::Robin { h } = condition {
            if !(h >= 0.0) {
                return Err(Error::InvalidInput(format!("Robin parameter must be nonnegative, got {h}")));
            }
        }
        Ok(Self {
            center,
            radius,
            condition,
        })
    }

    pub fn dirichlet(center: Vec2, radius: f64) -> Result<Self> {
        Self::new(center, radius, BoundaryCondition::Dirichlet)
    }

    /// Scattered-wave coefficient of order `l`: `-J_l/H_l` for Dirichlet and
    /// `-(k J_l' + h J_l)/(k H_l' + h H_l)` for Robin, all at `ka`.
    pub fn coefficient(&self, k: f64, l: i32) -> Result<Complex64> {
        let x = k * self.radius;
        match self.condition {
            BoundaryCondition::Dirichlet => Ok(-bessel_j_signed(l, x)? / hankel1(l, x)?),
            BoundaryCondition::Robin { h } => {
                let num = k * bessel_j_derivative(l, x)? + h * bessel_j_signed(l, x)?;
                let den = hankel1_derivative(l, x)? * k + hankel1(l, x)? * h;
                Ok(-num / den)
            }
        }
    }

    /// Coefficients `q_0, q_1, ...` up to the truncation order; `q_{-l} = q_l`.
    ///
    /// The series stops at the first order above `ka` whose coefficient
    /// falls below `1e-14` of the accumulated coefficient magnitudes.
    pub fn series(&self, k: f64) -> Result<CircleSeries> {
        if !(k > 0.0) {
            return Err(Error::InvalidInput(format!("wavenumber must be positive, got {k}")));
        }
        let ka = k * self.radius;
        let mut coefficients = Vec::new();
        let mut running = 0.0;
        for l in 0..=SERIES_ORDER_CAP as i32 {
            let q = self.coefficient(k, l)?;
            let mag = if l == 0 { q.norm() } else { 2.0 * q.norm() };
            if f64::from(l) > ka && mag < SERIES_TOLERANCE * running {
                return Ok(CircleSeries {
                    k,
                    center: self.center,
                    coefficients,
                });
            }
            running += mag;
            coefficients.push(q);
        }
        Err(Error::Truncation {
            tolerance: SERIES_TOLERANCE,
            max_order: SERIES_ORDER_CAP,
        })
    }
}

/// Truncated amplitude series of a circle at one wavenumber.
#[derive(Debug, Clone, PartialEq)]
pub struct CircleSeries {
    pub k: f64,
    pub center: Vec2,
    /// `q_0, q_1, ..., q_L`; negative orders mirror positive ones.
    pub coefficients: Vec<Complex64>,
}

impl CircleSeries {
    /// `sqrt(2/(pi k)) e^{-i pi/4} e^{ik(alpha - alpha').x0} sum_l q_l e^{il(theta - beta)}`.
    pub fn amplitude_at(&self, alpha_prime: Vec2, alpha: Vec2) -> Complex64 {
        let phi = alpha_prime.angle() - alpha.angle();
        let mut s = self.coefficients[0];
        for (l, q) in self.coefficients.iter().enumerate().skip(1) {
            s += q * (2.0 * (l as f64 * phi).cos());
        }
        let shift = Complex64::from_polar(1.0, self.k * (alpha - alpha_prime).dot(self.center));
        far_field_prefactor(self.k) * shift * s
    }

    pub fn truncation_order(&self) -> usize {
        self.coefficients.len() - 1
    }
}

impl AmplitudeSource for CircleSeries {
    fn wavenumber(&self) -> f64 {
        self.k
    }

    fn amplitude(&self, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
        Ok(self.amplitude_at(alpha_prime, alpha))
    }
}

/// Dirichlet amplitude of a circle.
pub fn circle_amplitude_dirichlet(s: &CircleScatterer, k: f64, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
    if s.condition != BoundaryCondition::Dirichlet {
        return Err(Error::InvalidInput("scatterer does not carry a Dirichlet condition".into()));
    }
    Ok(s.series(k)?.amplitude_at(alpha_prime, alpha))
}

/// Robin amplitude of a circle.
pub fn circle_amplitude_robin(s: &CircleScatterer, k: f64, alpha_prime: Vec2, alpha: Vec2) -> Result<Complex64> {
    if !matches!(s.condition, BoundaryCondition::Robin { .. }) {
        return Err(Error::InvalidInput("scatterer does not carry a Robin condition".into()));
    }
    Ok(s.series(k)?.amplitude_at(alpha_prime, alpha))
}

/// `-e^{ik x.alpha}` at `x = x0 + a(cos theta, sin theta)`.
pub fn exact_boundary_scattered_field(s: &CircleScatterer, k: f64, alpha: Vec2, theta: f64) -> Complex64 {
    let x = s.center + Vec2::polar(theta) * s.radius;
    -Complex64::from_polar(1.0, k * x.dot(alpha))
}

/// Exact single-center expansion `a_l = -(J_l/H_l)(ka) i^l e^{-il beta}` of
/// the Dirichlet field scattered by a circle centered at the origin, for
/// `l = -order..=order` (index `l + order`).
pub fn exact_expansion_coefficients(k: f64, radius: f64, alpha: Vec2, order: usize) -> Result<Vec<Complex64>> {
    let beta = alpha.angle();
    let x = k * radius;
    let big = order as i32;
    (-big..=big)
        .map(|l| {
            let ratio = bessel_j_signed(l, x)? / hankel1(l, x)?;
            let phase = Complex64::i().powi(l) * Complex64::from_polar(1.0, -f64::from(l) * beta);
            Ok(-ratio * phase)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::{bessel_j, bessel_y};
    use std::f64::consts::PI;

    fn unit() -> CircleScatterer {
        CircleScatterer::dirichlet(Vec2::default(), 1.0).unwrap()
    }

    #[test]
    fn depends_on_angle_difference_only() {
        let s = unit().series(1.7).unwrap();
        for (t, b, d) in [(0.3, 1.1, 0.7), (2.0, -0.4, 3.0)] {
            let a = s.amplitude_at(Vec2::polar(t), Vec2::polar(b));
            let c = s.amplitude_at(Vec2::polar(t + d), Vec2::polar(b + d));
            assert!((a - c).norm() < 1e-12);
        }
    }

    #[test]
    fn reciprocity() {
        let s = CircleScatterer::dirichlet(Vec2::new(6.0, 2.0), 1.0).unwrap();
        for k in [1.0, 5.0] {
            for (t, b) in [(0.3, 1.1), (2.0, -0.4), (PI, 0.0)] {
                let ap = Vec2::polar(t);
                let a = Vec2::polar(b);
                let lhs = circle_amplitude_dirichlet(&s, k, ap, a).unwrap();
                let rhs = circle_amplitude_dirichlet(&s, k, -a, -ap).unwrap();
                assert!((lhs - rhs).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn robin_large_h_tends_to_dirichlet() {
        let d = unit();
        let r = CircleScatterer::new(Vec2::default(), 1.0, BoundaryCondition::Robin { h: 1e8 }).unwrap();
        for l in 0..=10 {
            assert!((r.coefficient(3.0, l).unwrap() - d.coefficient(3.0, l).unwrap()).norm() < 1e-6);
        }
    }

    #[test]
    fn robin_zero_h_is_neumann() {
        let r = CircleScatterer::new(Vec2::default(), 1.0, BoundaryCondition::Robin { h: 0.0 }).unwrap();
        for l in 0..=6 {
            let want = -bessel_j_derivative(l, 3.0).unwrap() / hankel1_derivative(l, 3.0).unwrap();
            assert!((r.coefficient(3.0, l).unwrap() - want).norm() < 1e-15);
        }
    }

    #[test]
    fn robin_coefficient_limits_are_monotone_in_their_tails() {
        // The gap to Dirichlet is not monotone for small h at ka = 3, so
        // monotonicity is checked where each limit is approached.
        let d = unit();
        let robin = |h: f64| CircleScatterer::new(Vec2::default(), 1.0, BoundaryCondition::Robin { h }).unwrap();
        for l in 0..=10 {
            let dir = d.coefficient(3.0, l).unwrap();
            let mut last = f64::INFINITY;
            for h in [10.0, 100.0, 1e4, 1e6] {
                let diff = (robin(h).coefficient(3.0, l).unwrap() - dir).norm();
                assert!(diff <= last, "l={l} h={h}");
                last = diff;
            }
            let neu = robin(0.0).coefficient(3.0, l).unwrap();
            let mut last = f64::INFINITY;
            for h in [1e-1, 1e-2, 1e-3, 1e-4] {
                let diff = (robin(h).coefficient(3.0, l).unwrap() - neu).norm();
                assert!(diff <= last, "l={l} h={h}");
                last = diff;
            }
        }
    }

    /// Integrates the radial Bessel equation outward from `r = a` with the
    /// Robin data `u(a) = 1, u'(a) = -h` by classical Runge-Kutta, then reads
    /// off the scattered coefficient from the Bessel decomposition at `r = R`.
    fn radial_shooting_coefficient(k: f64, a: f64, h: f64, l: i32) -> Complex64 {
        let lf = f64::from(l);
        let rhs = |r: f64, u: f64, du: f64| (du, -du / r - (k * k - lf * lf / (r * r)) * u);
        let steps = 4000;
        let outer = a + 2.0;
        let dr = (outer - a) / steps as f64;
        let (mut r, mut u, mut du) = (a, 1.0, -h);
        for _ in 0..steps {
            let (k1u, k1d) = rhs(r, u, du);
            let (k2u, k2d) = rhs(r + 0.5 * dr, u + 0.5 * dr * k1u, du + 0.5 * dr * k1d);
            let (k3u, k3d) = rhs(r + 0.5 * dr, u + 0.5 * dr * k2u, du + 0.5 * dr * k2d);
            let (k4u, k4d) = rhs(r + dr, u + dr * k3u, du + dr * k3d);
            u += dr / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
            du += dr / 6.0 * (k1d + 2.0 * k2d + 2.0 * k3d + k4d);
            r += dr;
        }
        let x = k * r;
        let n = l.unsigned_abs();
        let j = bessel_j(n, x).unwrap();
        let y = bessel_y(n, x).unwrap();
        let jp = k * bessel_j_derivative(l, x).unwrap();
        let yp = if n == 0 {
            -k * bessel_y(1, x).unwrap()
        } else {
            k * bessel_y(n - 1, x).unwrap() - lf / r * y
        };
        // Solve [j y; jp yp] [alpha; beta] = [u; du].
        let det = j * yp - y * jp;
        let alpha = (u * yp - y * du) / det;
        let beta = (j * du - jp * u) / det;
        // u = A (J + c H)  =>  alpha = A (1 + c), beta = i A c.
        Complex64::new(beta, 0.0) / (Complex64::new(-beta, alpha))
    }

    #[test]
    fn robin_coefficient_matches_radial_solve() {
        let s = CircleScatterer::new(Vec2::default(), 1.0, BoundaryCondition::Robin { h: 1.0 }).unwrap();
        for l in 0..=8 {
            let formula = s.coefficient(3.0, l).unwrap();
            let shot = radial_shooting_coefficient(3.0, 1.0, 1.0, l);
            assert!((formula - shot).norm() <= 1e-4, "l={l}: {formula} vs {shot}");
        }
    }

    #[test]
    fn boundary_trace_examples() {
        let s = unit();
        let a = Vec2::new(1.0, 0.0);
        let v = exact_boundary_scattered_field(&s, 1.0, a, 0.0);
        assert!((v - Complex64::new(-0.54030, -0.84147)).norm() < 1e-5);
        let v = exact_boundary_scattered_field(&s, 1.0, a, PI);
        assert!((v - Complex64::new(-0.54030, 0.84147)).norm() < 1e-5);
        let v = exact_boundary_scattered_field(&s, 1.0, a, PI / 2.0);
        assert!((v - Complex64::new(-1.0, 0.0)).norm() < 1e-5);
        for i in 0..30 {
            let t = 0.21 * i as f64;
            assert!((exact_boundary_scattered_field(&s, 2.3, Vec2::polar(0.4), t).norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn series_matches_expansion_coefficients() {
        // Origin-centered amplitude equals the far field of the exact
        // single-center expansion term by term.
        let k = 1.3;
        let alpha = Vec2::polar(0.6);
        let a = exact_expansion_coefficients(k, 1.0, alpha, 30).unwrap();
        let s = unit().series(k).unwrap();
        for t in [0.0, 1.0, 2.5, 4.0] {
            let mut sum = Complex64::new(0.0, 0.0);
            for (i, c) in a.iter().enumerate() {
                let l = i as i32 - 30;
                sum += c * (-Complex64::i()).powi(l) * Complex64::from_polar(1.0, f64::from(l) * t);
            }
            let ff = far_field_prefactor(k) * sum;
            assert!((ff - s.amplitude_at(Vec2::polar(t), alpha)).norm() < 1e-13);
        }
    }

    #[test]
    fn truncation_is_within_cap_at_desk_scale() {
        for k in [0.5, 1.0, 3.0, 5.0, 10.0] {
            let s = unit().series(k).unwrap();
            assert!(s.truncation_order() < 60);
        }
        let big = CircleScatterer::dirichlet(Vec2::default(), 100.0).unwrap();
        assert!(matches!(big.series(1.0), Err(Error::Truncation { .. })));
    }
}

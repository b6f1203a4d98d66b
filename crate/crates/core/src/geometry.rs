//! Parametric obstacle boundaries, pole placement, support functions and
//! periodic grating profiles.

use std::f64::consts::TAU;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};

/// A point or direction in the plane.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Unit vector with polar angle `angle`.
    pub fn polar(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self { x: c, y: s }
    }

    pub fn dot(self, other: Self) -> f64 {
        self.x * other.x + self.y * other.y
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Polar angle in `(-pi, pi]`.
    pub fn angle(self) -> f64 {
        self.y.atan2(self.x)
    }

    /// Counterclockwise rotation by a right angle.
    pub fn perp(self) -> Self {
        Self { x: -self.y, y: self.x }
    }

    pub fn normalized(self) -> Self {
        self * (1.0 / self.norm())
    }

    pub fn distance(self, other: Self) -> f64 {
        (self - other).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Triangle traced by rays from an interior center: `r(t)` is the boundary
/// point hit by the ray from `center` with polar angle `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct Triangle {
    vertices: [Vec2; 3],
    center: Vec2,
    /// Polar angles of the vertices about `center`, ascending in `[0, 2pi)`.
    corner_angles: [f64; 3],
}

impl Triangle {
    pub fn new(v1: Vec2, v2: Vec2, v3: Vec2, center: Vec2) -> Result<Self> {
        let mut vertices = [v1, v2, v3];
        let area2 = (v2 - v1).x * (v3 - v1).y - (v2 - v1).y * (v3 - v1).x;
        if area2.abs() < 1e-14 {
            return Err(Error::InvalidInput("degenerate triangle".into()));
        }
        vertices.sort_by(|a, b| {
            let ta = (*a - center).angle().rem_euclid(TAU);
            let tb = (*b - center).angle().rem_euclid(TAU);
            ta.total_cmp(&tb)
        });
        let tri = Self {
            corner_angles: vertices.map(|v| (v - center).angle().rem_euclid(TAU)),
            vertices,
            center,
        };
        if !tri.contains_strictly(center) {
            return Err(Error::InvalidInput(
                "triangle parametrization center must lie strictly inside".into(),
            ));
        }
        Ok(tri)
    }

    pub fn vertices(&self) -> [Vec2; 3] {
        self.vertices
    }

    pub fn center(&self) -> Vec2 {
        self.center
    }

    fn contains_strictly(&self, p: Vec2) -> bool {
        (0..3).all(|i| {
            let a = self.vertices[i];
            let b = self.vertices[(i + 1) % 3];
            let e = b - a;
            e.x * (p - a).y - e.y * (p - a).x > 1e-12
        })
    }

    /// Edge index whose angular sector contains `t`, plus the outward unit
    /// normal and distance of that edge's line from the center.
    fn edge(&self, t: f64) -> (usize, Vec2, f64) {
        let t = t.rem_euclid(TAU);
        let a = &self.corner_angles;
        let i = if t >= a[0] && t < a[1] {
            0
        } else if t >= a[1] && t < a[2] {
            1
        } else {
            2
        };
        let p = self.vertices[i];
        let q = self.vertices[(i + 1) % 3];
        let n = Vec2::new((q - p).y, -(q - p).x).normalized();
        (i, n, n.dot(p - self.center))
    }

    fn is_corner(&self, t: f64) -> bool {
        let t = t.rem_euclid(TAU);
        self.corner_angles.iter().any(|&c| {
            let d = (t - c).abs();
            d < 1e-12 || (TAU - d) < 1e-12
        })
    }

    fn point(&self, t: f64) -> Vec2 {
        let (_, n, c) = self.edge(t);
        let e = Vec2::polar(t);
        self.center + e * (c / n.dot(e))
    }

    fn tangent(&self, t: f64) -> Result<Vec2> {
        if self.is_corner(t) {
            return Err(Error::Vertex(t));
        }
        let (_, n, c) = self.edge(t);
        let e = Vec2::polar(t);
        let ne = n.dot(e);
        let rho = c / ne;
        let drho = -c * n.dot(e.perp()) / (ne * ne);
        Ok(e * drho + e.perp() * rho)
    }
}

/// A closed boundary curve parametrized over `[0, 2pi)`, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub enum Boundary {
    Circle { center: Vec2, radius: f64 },
    Ellipse { center: Vec2, a: f64, b: f64 },
    /// `offset + (c1 cos t + c2 cos 2t, s1 sin t)`.
    Kite { offset: Vec2, c1: f64, c2: f64, s1: f64 },
    Triangle(Triangle),
    /// Piecewise-linear curve through `(t_i, p_i)` samples.
    Sampled { params: Vec<f64>, points: Vec<Vec2> },
}

impl Boundary {
    pub fn circle(center: Vec2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("circle radius must be positive, got {radius}")));
        }
        Ok(Boundary::Circle { center, radius })
    }

    pub fn unit_circle() -> Self {
        Boundary::Circle {
            center: Vec2::default(),
            radius: 1.0,
        }
    }

    pub fn ellipse(center: Vec2, a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > 0.0) {
            return Err(Error::InvalidInput(format!("ellipse semi-axes must be positive, got {a}, {b}")));
        }
        Ok(Boundary::Ellipse { center, a, b })
    }

    /// Kite `offset + (cos t + 0.65 cos 2t, 1.5 sin t)`.
    pub fn kite(offset: Vec2) -> Self {
        Boundary::Kite {
            offset,
            c1: 1.0,
            c2: 0.65,
            s1: 1.5,
        }
    }

    pub fn triangle(v1: Vec2, v2: Vec2, v3: Vec2) -> Result<Self> {
        Ok(Boundary::Triangle(Triangle::new(v1, v2, v3, Vec2::default())?))
    }

    pub fn sampled(params: Vec<f64>, points: Vec<Vec2>) -> Result<Self> {
        if params.len() != points.len() || params.len() < 3 {
            return Err(Error::InvalidInput(
                "sampled boundary needs at least 3 matching (t, point) pairs".into(),
            ));
        }
        if params.windows(2).any(|w| !(w[1] > w[0])) || params[0] < 0.0 || *params.last().unwrap() >= TAU {
            return Err(Error::InvalidInput(
                "sampled boundary parameters must increase strictly within [0, 2pi)".into(),
            ));
        }
        Ok(Boundary::Sampled { params, points })
    }

    /// Ellipse `(2 cos t, sin t)`.
    pub fn experiment_ellipse() -> Self {
        Boundary::Ellipse {
            center: Vec2::default(),
            a: 2.0,
            b: 1.0,
        }
    }

    /// Kite `(-0.65 + cos t + 0.65 cos 2t, 1.5 sin t)`.
    pub fn experiment_kite() -> Self {
        Boundary::kite(Vec2::new(-0.65, 0.0))
    }

    /// Triangle with vertices `(-1, 0)`, `(1, 1)`, `(1, -1)`.
    pub fn experiment_triangle() -> Self {
        Boundary::triangle(Vec2::new(-1.0, 0.0), Vec2::new(1.0, 1.0), Vec2::new(1.0, -1.0))
            .expect("origin lies inside the experiment triangle")
    }

    /// Thin ellipse `(0.1 cos t, sin t)`.
    pub fn experiment_thin_ellipse() -> Self {
        Boundary::Ellipse {
            center: Vec2::default(),
            a: 0.1,
            b: 1.0,
        }
    }

    /// Circle of radius 1 centered at `(6, 2)`.
    pub fn sfm_circle() -> Self {
        Boundary::Circle {
            center: Vec2::new(6.0, 2.0),
            radius: 1.0,
        }
    }

    /// Kite `(5.35 + cos t + 0.65 cos 2t, 2 + 1.5 sin t)`.
    pub fn sfm_kite() -> Self {
        Boundary::kite(Vec2::new(5.35, 2.0))
    }

    /// True for kinds with a continuous tangent everywhere.
    pub fn is_smooth(&self) -> bool {
        matches!(
            self,
            Boundary::Circle { .. } | Boundary::Ellipse { .. } | Boundary::Kite { .. }
        )
    }

    /// Point toward which interior poles are scaled.
    pub fn anchor(&self) -> Vec2 {
        match self {
            Boundary::Circle { center, .. } | Boundary::Ellipse { center, .. } => *center,
            Boundary::Kite { offset, c2, .. } => *offset + Vec2::new(*c2, 0.0),
            Boundary::Triangle(t) => t.center(),
            Boundary::Sampled { points, .. } => {
                let n = points.len() as f64;
                points.iter().fold(Vec2::default(), |acc, p| acc + *p) * (1.0 / n)
            }
        }
    }

    /// `r(t)`; any real `t` is reduced modulo `2pi`.
    pub fn eval_point(&self, t: f64) -> Vec2 {
        match self {
            Boundary::Circle { center, radius } => *center + Vec2::polar(t) * *radius,
            Boundary::Ellipse { center, a, b } => *center + Vec2::new(a * t.cos(), b * t.sin()),
            Boundary::Kite { offset, c1, c2, s1 } => {
                *offset + Vec2::new(c1 * t.cos() + c2 * (2.0 * t).cos(), s1 * t.sin())
            }
            Boundary::Triangle(tri) => tri.point(t),
            Boundary::Sampled { params, points } => {
                let t = t.rem_euclid(TAU);
                let n = params.len();
                let i = params.partition_point(|&p| p <= t);
                let (t0, p0, t1, p1) = if i == 0 {
                    (params[n - 1] - TAU, points[n - 1], params[0], points[0])
                } else if i == n {
                    (params[n - 1], points[n - 1], params[0] + TAU, points[0])
                } else {
                    (params[i - 1], points[i - 1], params[i], points[i])
                };
                let f = (t - t0) / (t1 - t0);
                p0 + (p1 - p0) * f
            }
        }
    }

    /// `r'(t)`.
    pub fn eval_tangent(&self, t: f64) -> Result<Vec2> {
        match self {
            Boundary::Circle { radius, .. } => Ok(Vec2::polar(t).perp() * *radius),
            Boundary::Ellipse { a, b, .. } => Ok(Vec2::new(-a * t.sin(), b * t.cos())),
            Boundary::Kite { c1, c2, s1, .. } => Ok(Vec2::new(
                -c1 * t.sin() - 2.0 * c2 * (2.0 * t).sin(),
                s1 * t.cos(),
            )),
            Boundary::Triangle(tri) => tri.tangent(t),
            Boundary::Sampled { .. } => Err(Error::UnsupportedShape(
                "derivatives are undefined on sampled boundaries".into(),
            )),
        }
    }

    /// `r''(t)` for smooth kinds.
    pub fn eval_second_derivative(&self, t: f64) -> Result<Vec2> {
        match self {
            Boundary::Circle { radius, .. } => Ok(-Vec2::polar(t) * *radius),
            Boundary::Ellipse { a, b, .. } => Ok(Vec2::new(-a * t.cos(), -b * t.sin())),
            Boundary::Kite { c1, c2, s1, .. } => Ok(Vec2::new(
                -c1 * t.cos() - 4.0 * c2 * (2.0 * t).cos(),
                -s1 * t.sin(),
            )),
            _ => Err(Error::UnsupportedShape(
                "second derivative needs a smooth analytic boundary".into(),
            )),
        }
    }

    /// Outward unit normal at `r(t)`.
    pub fn eval_normal(&self, t: f64) -> Result<Vec2> {
        let d = self.eval_tangent(t)?;
        Ok(Vec2::new(d.y, -d.x).normalized())
    }

    /// Closed polygon approximating the curve; triangle corners are exact.
    pub fn polygon(&self, samples: usize) -> Vec<Vec2> {
        match self {
            Boundary::Triangle(tri) => tri.vertices().to_vec(),
            Boundary::Sampled { points, .. } => points.clone(),
            _ => (0..samples)
                .map(|i| self.eval_point(TAU * i as f64 / samples as f64))
                .collect(),
        }
    }

    /// Winding number of the curve around `p`.
    pub fn winding_number(&self, p: Vec2) -> i32 {
        winding_number(&self.polygon(4096), p)
    }

    /// Euclidean distance from `p` to the curve, measured on a fine polygon.
    pub fn distance_to(&self, p: Vec2) -> f64 {
        let poly = self.polygon(8192);
        let n = poly.len();
        (0..n)
            .map(|i| segment_distance(p, poly[i], poly[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min)
    }
}

fn segment_distance(p: Vec2, a: Vec2, b: Vec2) -> f64 {
    let e = b - a;
    let len2 = e.dot(e);
    let s = if len2 > 0.0 {
        ((p - a).dot(e) / len2).clamp(0.0, 1.0)
    } else {
        0.0
    };
    p.distance(a + e * s)
}

/// Winding number of a closed polygon around `p`.
pub fn winding_number(poly: &[Vec2], p: Vec2) -> i32 {
    let n = poly.len();
    let mut total = 0.0;
    for i in 0..n {
        let a = poly[i] - p;
        let b = poly[(i + 1) % n] - p;
        total += (a.x * b.y - a.y * b.x).atan2(a.dot(b));
    }
    (total / TAU).round() as i32
}

/// `x_j = c + scale (r(2pi(j-1)/J) - c)`, `j = 1..J`, with `c` the anchor of
/// the boundary (the origin for every shape centered there).
pub fn interior_poles(b: &Boundary, count: usize, scale: f64) -> Result<Vec<Vec2>> {
    if !(scale > 0.0 && scale < 1.0) {
        return Err(Error::InvalidInput(format!("pole scale must lie in (0, 1), got {scale}")));
    }
    let c = b.anchor();
    let poly = b.polygon(4096);
    (0..count)
        .map(|j| {
            let t = TAU * j as f64 / count as f64;
            let p = c + (b.eval_point(t) - c) * scale;
            if winding_number(&poly, p) != 1 {
                return Err(Error::PoleOutside {
                    index: j + 1,
                    x: p.x,
                    y: p.y,
                });
            }
            Ok(p)
        })
        .collect()
}

/// `d(l) = min over the boundary of x . l` for circles and ellipses.
pub fn support_function_exact(b: &Boundary, l: Vec2) -> Result<f64> {
    match b {
        Boundary::Circle { center, radius } => Ok(center.dot(l) - radius),
        Boundary::Ellipse { center, a, b } => {
            Ok(center.dot(l) - ((a * l.x).powi(2) + (b * l.y).powi(2)).sqrt())
        }
        other => Err(Error::UnsupportedShape(format!(
            "exact support function needs a circle or ellipse, got {}",
            other.kind_name()
        ))),
    }
}

/// Support function of the convex hull, evaluated on `samples` curve points.
pub fn support_function_sampled(b: &Boundary, l: Vec2, samples: usize) -> f64 {
    b.polygon(samples)
        .iter()
        .map(|p| p.dot(l))
        .fold(f64::INFINITY, f64::min)
}

impl Boundary {
    pub fn kind_name(&self) -> &'static str {
        match self {
            Boundary::Circle { .. } => "circle",
            Boundary::Ellipse { .. } => "ellipse",
            Boundary::Kite { .. } => "kite",
            Boundary::Triangle(_) => "triangle",
            Boundary::Sampled { .. } => "sampled",
        }
    }
}

/// The periodic profile shapes of the grating experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `f(x) = sin 2x`.
    Sine2x,
    /// `f(x) = sin 0.2x` on one period.
    SineSlow,
    /// Symmetric tent `f(x) = min(x, L - x)`.
    Tent,
    /// Sawtooth `f(x) = x` on one period.
    Sawtooth,
    /// `f(x) = 0`.
    Flat,
}

/// An `L`-periodic profile `y = f(x)` with its node and pole rules.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GratingProfile {
    pub period: f64,
    pub kind: ProfileKind,
}

impl GratingProfile {
    pub fn new(kind: ProfileKind, period: f64) -> Result<Self> {
        if !(period > 0.0) {
            return Err(Error::InvalidInput(format!("period must be positive, got {period}")));
        }
        Ok(Self { period, kind })
    }

    fn height_on_period(&self, x: f64) -> f64 {
        let l = self.period;
        match self.kind {
            ProfileKind::Sine2x => (2.0 * x).sin(),
            ProfileKind::SineSlow => (0.2 * x).sin(),
            ProfileKind::Tent => {
                if x <= 0.5 * l {
                    x
                } else {
                    l - x
                }
            }
            ProfileKind::Sawtooth => x,
            ProfileKind::Flat => 0.0,
        }
    }

    /// `f(x)`, extended periodically from `[0, L)`.
    pub fn height(&self, x: f64) -> f64 {
        self.height_on_period(x.rem_euclid(self.period))
    }

    /// Nodes on the profile and poles below it.
    ///
    /// Every profile except the sawtooth takes `x_i = (iL/N, f(iL/N))` and
    /// moves every fourth node down by `0.1`. The sawtooth puts half of the
    /// nodes on the slant and half on the vertical wall `x = L`, and offsets
    /// every fourth node by `(-0.03, -0.05)`.
    pub fn nodes_and_poles(&self, n: usize, m: usize) -> Result<(Vec<Vec2>, Vec<Vec2>)> {
        if m == 0 || 4 * m > n {
            return Err(Error::InvalidInput(format!(
                "need 1 <= M and 4M <= N, got N = {n}, M = {m}"
            )));
        }
        let l = self.period;
        let nodes: Vec<Vec2> = match self.kind {
            ProfileKind::Sawtooth => {
                if !n.is_multiple_of(2) {
                    return Err(Error::InvalidInput("sawtooth node rule needs an even N".into()));
                }
                let half = n / 2;
                (1..=n)
                    .map(|i| {
                        if i <= half {
                            let s = 2.0 * i as f64 * l / n as f64;
                            Vec2::new(s, s)
                        } else {
                            Vec2::new(l, 2.0 * (i - half) as f64 * l / n as f64)
                        }
                    })
                    .collect()
            }
            _ => (1..=n)
                .map(|i| {
                    let t = i as f64 * l / n as f64;
                    Vec2::new(t, self.height_on_period(t))
                })
                .collect(),
        };
        let shift = match self.kind {
            ProfileKind::Sawtooth => Vec2::new(-0.03, -0.05),
            _ => Vec2::new(0.0, -0.1),
        };
        let poles: Vec<Vec2> = (1..=m).map(|j| nodes[4 * j - 1] + shift).collect();
        for (j, p) in poles.iter().enumerate() {
            let x = p.x.clamp(0.0, l);
            if !(p.y < self.height_on_period(x)) {
                return Err(Error::PoleAboveProfile {
                    index: j + 1,
                    x: p.x,
                    y: p.y,
                });
            }
        }
        Ok((nodes, poles))
    }
}

/// Rectangular sampling grid, row-major with `x` varying fastest.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RectGrid {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl RectGrid {
    /// Square of side `side` centered at `center` with `n` points per axis.
    pub fn square(center: Vec2, side: f64, n: usize) -> Self {
        Self {
            x_min: center.x - 0.5 * side,
            x_max: center.x + 0.5 * side,
            y_min: center.y - 0.5 * side,
            y_max: center.y + 0.5 * side,
            nx: n,
            ny: n,
        }
    }

    fn coord(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
        if n <= 1 {
            0.5 * (lo + hi)
        } else {
            lo + (hi - lo) * i as f64 / (n - 1) as f64
        }
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, index: usize) -> Vec2 {
        let ix = index % self.nx;
        let iy = index / self.nx;
        Vec2::new(
            Self::coord(self.x_min, self.x_max, self.nx, ix),
            Self::coord(self.y_min, self.y_max, self.ny, iy),
        )
    }

    pub fn points(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }
}

/// Uniform angles `2pi i / n`, `i = 0..n`.
pub fn uniform_angles(n: usize) -> Vec<f64> {
    (0..n).map(|i| TAU * i as f64 / n as f64).collect()
}

/// Reduce an angle to `[0, 2pi)`.
pub fn wrap_angle(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

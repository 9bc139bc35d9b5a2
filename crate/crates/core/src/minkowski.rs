//! Minkowski linear algebra on `R^{1,n}`.
//!
//! Coordinates are stored as `[t, p_1, ..., p_n]`. The flat form is
//! `b = -dt^2 + sum dp_i^2` and its widened variant replaces `dt^2` by
//! `(1 + eps)^2 dt^2`. All Euclidean-style measurements use the Wick norm.

use std::ops::{Add, Index, Mul, Neg, Sub};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};

/// Inline storage for coordinates; no heap allocation up to `n = 3`.
pub type Coords = SmallVec<[f64; 4]>;

/// Relative band inside which `b(v, v)` counts as zero.
pub const LIGHTLIKE_TOL: f64 = 1e-10;

/// A displacement vector `(t, p)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Vector(pub Coords);

/// A point `(t, p)` of Minkowski space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub Coords);

macro_rules! coord_accessors {
    ($ty:ident) => {
        impl $ty {
            /// Builds from a time coordinate and a spatial part.
            pub fn new(t: f64, p: &[f64]) -> Self {
                let mut c = Coords::with_capacity(p.len() + 1);
                c.push(t);
                c.extend_from_slice(p);
                $ty(c)
            }

            /// Builds from the full coordinate list `[t, p_1, ..]`.
            pub fn from_slice(c: &[f64]) -> Self {
                $ty(Coords::from_slice(c))
            }

            pub fn t(&self) -> f64 {
                self.0[0]
            }

            pub fn p(&self) -> &[f64] {
                &self.0[1..]
            }

            /// Number of spatial dimensions `n`.
            pub fn dim(&self) -> usize {
                self.0.len() - 1
            }

            pub fn coords(&self) -> &[f64] {
                &self.0
            }

            pub fn is_finite(&self) -> bool {
                self.0.iter().all(|c| c.is_finite())
            }
        }

        impl Index<usize> for $ty {
            type Output = f64;
            fn index(&self, i: usize) -> &f64 {
                &self.0[i]
            }
        }
    };
}

coord_accessors!(Vector);
coord_accessors!(Event);

impl Vector {
    pub fn zeros(n: usize) -> Self {
        Vector(SmallVec::from_elem(0.0, n + 1))
    }

    /// The unit time direction `d/dt` in dimension `n`.
    pub fn time_unit(n: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[0] = 1.0;
        v
    }

    pub fn scale(&self, s: f64) -> Vector {
        Vector(self.0.iter().map(|c| c * s).collect())
    }

    /// Euclidean inner product of the coordinate lists.
    pub fn dot_euclid(&self, other: &Vector) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Norm of the spatial part.
    pub fn spatial_norm(&self) -> f64 {
        self.p().iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0.0)
    }
}

impl Event {
    pub fn origin(n: usize) -> Self {
        Event(SmallVec::from_elem(0.0, n + 1))
    }

    /// The point `self + s * v`.
    pub fn offset(&self, v: &Vector, s: f64) -> Event {
        Event(self.0.iter().zip(&v.0).map(|(a, b)| a + s * b).collect())
    }

    /// Reinterprets the coordinates as a position vector.
    pub fn to_vector(&self) -> Vector {
        Vector(self.0.clone())
    }

    /// Affine combination `(1 - s) * self + s * other`.
    pub fn lerp(&self, other: &Event, s: f64) -> Event {
        Event(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + s * (b - a))
                .collect(),
        )
    }
}

impl Sub for &Event {
    type Output = Vector;
    fn sub(self, rhs: &Event) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Add<&Vector> for &Event {
    type Output = Event;
    fn add(self, rhs: &Vector) -> Event {
        self.offset(rhs, 1.0)
    }
}

impl Add for &Vector {
    type Output = Vector;
    fn add(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &Vector {
    type Output = Vector;
    fn sub(self, rhs: &Vector) -> Vector {
        Vector(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Vector {
    type Output = Vector;
    fn neg(self) -> Vector {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &Vector {
    type Output = Vector;
    fn mul(self, s: f64) -> Vector {
        self.scale(s)
    }
}

/// A ray-exit result: a boundary point or the "no exit" sentinel.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint {
    Finite(Event),
    Infinite,
}

impl Endpoint {
    pub fn is_infinite(&self) -> bool {
        matches!(self, Endpoint::Infinite)
    }

    pub fn finite(&self) -> Option<&Event> {
        match self {
            Endpoint::Finite(e) => Some(e),
            Endpoint::Infinite => None,
        }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimensionMismatch {
            expected: a.saturating_sub(1),
            found: b.saturating_sub(1),
        });
    }
    Ok(())
}

/// `b_eps(u, v)` without dimension checks, for hot loops.
#[inline]
pub fn form(u: &[f64], v: &[f64], eps: f64) -> f64 {
    let k = (1.0 + eps) * (1.0 + eps);
    let mut s = -k * u[0] * v[0];
    for i in 1..u.len() {
        s += u[i] * v[i];
    }
    s
}

/// The widened Minkowski form `-(1+eps)^2 u_t v_t + sum u_i v_i`.
pub fn minkowski_form(u: &Vector, v: &Vector, eps: f64) -> Result<f64> {
    check_dims(u.0.len(), v.0.len())?;
    if eps < 0.0 || !eps.is_finite() {
        return Err(Error::InvalidDomain(format!("eps must be >= 0, got {eps}")));
    }
    Ok(form(&u.0, &v.0, eps))
}

/// Euclidean norm of the coordinates (the Wick-rotated metric).
pub fn wick_norm(u: &Vector) -> f64 {
    wick(&u.0)
}

#[inline]
pub(crate) fn wick(u: &[f64]) -> f64 {
    u.iter().map(|c| c * c).sum::<f64>().sqrt()
}

/// Wick distance between two events.
pub fn wick_distance(x: &Event, y: &Event) -> f64 {
    x.0.iter()
        .zip(&y.0)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CausalKind {
    Timelike,
    Lightlike,
    Spacelike,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Future,
    Past,
    None,
}

/// Causal character of a nonzero vector.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub orientation: Orientation,
}

impl CausalClass {
    pub fn is_causal(&self) -> bool {
        self.kind != CausalKind::Spacelike
    }

    pub fn is_future_causal(&self) -> bool {
        self.is_causal() && self.orientation == Orientation::Future
    }
}

/// Classifies `v` with respect to `b_eps`.
pub fn causal_classify(v: &Vector, eps: f64) -> Result<CausalClass> {
    if v.is_zero() {
        return Err(Error::ZeroVector);
    }
    Ok(classify_raw(&v.0, eps))
}

pub(crate) fn classify_raw(v: &[f64], eps: f64) -> CausalClass {
    let q = form(v, v, eps);
    let w2: f64 = v.iter().map(|c| c * c).sum();
    let kind = if q.abs() <= LIGHTLIKE_TOL * w2 {
        CausalKind::Lightlike
    } else if q < 0.0 {
        CausalKind::Timelike
    } else {
        CausalKind::Spacelike
    };
    let orientation = match kind {
        CausalKind::Spacelike => Orientation::None,
        _ if v[0] > 0.0 => Orientation::Future,
        _ => Orientation::Past,
    };
    CausalClass { kind, orientation }
}

/// True when `y - x` is zero or future causal (`x <= y`).
pub fn causally_precedes(x: &Event, y: &Event) -> bool {
    let v = y - x;
    v.is_zero() || classify_raw(&v.0, 0.0).is_future_causal()
}

/// True when `x <= y` or `y <= x`.
pub fn causally_related(x: &Event, y: &Event) -> bool {
    causally_precedes(x, y) || causally_precedes(y, x)
}

/// Lorentzian time separation `T(x, y) = sqrt|b(y - x, y - x)|` for `x <= y`.
pub fn time_separation(x: &Event, y: &Event) -> Result<f64> {
    check_dims(x.0.len(), y.0.len())?;
    if !causally_precedes(x, y) {
        return Err(Error::NotCausal);
    }
    let v = y - x;
    let q = form(&v.0, &v.0, 0.0);
    let w2: f64 = v.0.iter().map(|c| c * c).sum();
    if q.abs() <= LIGHTLIKE_TOL * w2 {
        return Ok(0.0);
    }
    Ok(q.abs().sqrt())
}

/// A strict sub-interval `(lower, upper)` of the real line; one end may be infinite.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectiveInterval {
    lower: f64,
    upper: f64,
}

impl ProjectiveInterval {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let bad = lower.is_nan()
            || upper.is_nan()
            || lower >= upper
            || (lower == f64::NEG_INFINITY && upper == f64::INFINITY)
            || lower == f64::INFINITY
            || upper == f64::NEG_INFINITY;
        if bad {
            return Err(Error::InvalidInterval { lower, upper });
        }
        Ok(ProjectiveInterval { lower, upper })
    }

    /// The model interval `(-1, 1)`.
    pub fn unit() -> Self {
        ProjectiveInterval {
            lower: -1.0,
            upper: 1.0,
        }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn contains(&self, s: f64) -> bool {
        s > self.lower && s < self.upper
    }
}

/// Projective distance on a strict interval (the log cross-ratio with its ends).
pub fn rho_interval(j: &ProjectiveInterval, s: f64, t: f64) -> Result<f64> {
    for v in [s, t] {
        if !j.contains(v) {
            return Err(Error::OutsideInterval {
                value: v,
                lower: j.lower,
                upper: j.upper,
            });
        }
    }
    if s == t {
        return Ok(0.0);
    }
    // ordered inputs make the result bitwise symmetric
    let (s, t) = if s < t { (s, t) } else { (t, s) };
    let (a, b) = (j.lower, j.upper);
    let v = if a.is_infinite() {
        ((b - s) / (b - t)).ln()
    } else if b.is_infinite() {
        ((t - a) / (s - a)).ln()
    } else {
        ((t - a) * (b - s) / ((s - a) * (b - t))).ln()
    };
    Ok(v.abs())
}

/// Log cross-ratio from affine parameters: `p` at 0, `q` at 1, the exits at
/// `-s_minus` and `s_plus` (`None` meaning infinitely far).
#[inline]
pub(crate) fn cross_ratio_params(s_minus: Option<f64>, s_plus: Option<f64>) -> f64 {
    let left = s_minus.map_or(0.0, |a| (1.0 / a).ln_1p());
    let right = s_plus.map_or(0.0, |b| -(-1.0 / b).ln_1p());
    left + right
}

/// `|ln((|q-a| |b-p|) / (|p-a| |b-q|))|` for collinear `a, p, q, b`.
pub fn cross_ratio_log(a: &Endpoint, p: &Event, q: &Event, b: &Endpoint) -> Result<f64> {
    check_dims(p.0.len(), q.0.len())?;
    let dir = q - p;
    let len2 = dir.dot_euclid(&dir);
    if len2 == 0.0 {
        let at_p = |x: &Endpoint| x.finite().is_some_and(|e| e == p);
        if at_p(a) || at_p(b) {
            return Err(Error::OutsideSegment);
        }
        return Ok(0.0);
    }
    let param = |e: &Event| -> Result<f64> {
        check_dims(p.0.len(), e.0.len())?;
        let w = e - p;
        let s = w.dot_euclid(&dir) / len2;
        let resid = &w - &dir.scale(s);
        let scale = 1.0 + wick_norm(&w) + len2.sqrt();
        if wick_norm(&resid) > 1e-9 * scale {
            return Err(Error::NotCollinear);
        }
        Ok(s)
    };
    let sa = a.finite().map(param).transpose()?;
    let sb = b.finite().map(param).transpose()?;
    // orient so that the finite exits straddle [0, 1]
    let (lo, hi) = match (sa, sb) {
        (Some(x), Some(y)) => (Some(x.min(y)), Some(x.max(y))),
        (Some(x), None) | (None, Some(x)) => {
            if x < 0.0 {
                (Some(x), None)
            } else {
                (None, Some(x))
            }
        }
        (None, None) => (None, None),
    };
    if lo.is_some_and(|x| x >= 0.0) || hi.is_some_and(|y| y <= 1.0) {
        return Err(Error::OutsideSegment);
    }
    Ok(cross_ratio_params(lo.map(|x| -x), hi))
}

/// A conformal transformation of Minkowski space.
#[derive(Clone, Debug, PartialEq)]
pub enum ConformalMap {
    /// `x -> lambda * A x + tau` with `A` in `O(1, n)`.
    Similarity {
        lambda: f64,
        a: DMatrix<f64>,
        tau: Vector,
    },
    /// `x -> x / b(x, x)`.
    Inversion,
}

fn eta(n: usize) -> DMatrix<f64> {
    let mut m = DMatrix::identity(n + 1, n + 1);
    m[(0, 0)] = -1.0;
    m
}

impl ConformalMap {
    /// Checks `lambda > 0` and `A^T eta A = eta` to `1e-9`.
    pub fn similarity(lambda: f64, a: DMatrix<f64>, tau: Vector) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InvalidMap(format!("distortion must be > 0, got {lambda}")));
        }
        let d = tau.0.len();
        if a.nrows() != d || a.ncols() != d {
            return Err(Error::InvalidMap("linear part has the wrong shape".into()));
        }
        let e = eta(d - 1);
        let defect = (a.transpose() * &e * &a - &e).amax();
        if defect > 1e-9 {
            return Err(Error::InvalidMap(format!(
                "linear part is not a Lorentz transformation (defect {defect:e})"
            )));
        }
        Ok(ConformalMap::Similarity { lambda, a, tau })
    }

    /// Pure dilation about the origin.
    pub fn dilation(n: usize, lambda: f64) -> Result<Self> {
        Self::similarity(lambda, DMatrix::identity(n + 1, n + 1), Vector::zeros(n))
    }

    /// Boost of rapidity `eta` mixing `t` with spatial axis `axis` (1-based).
    pub fn boost_matrix(n: usize, axis: usize, rapidity: f64) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n + 1, n + 1);
        let (c, s) = (rapidity.cosh(), rapidity.sinh());
        m[(0, 0)] = c;
        m[(0, axis)] = s;
        m[(axis, 0)] = s;
        m[(axis, axis)] = c;
        m
    }

    /// Rotation by `theta` in the spatial plane of axes `i`, `j` (1-based).
    pub fn rotation_matrix(n: usize, i: usize, j: usize, theta: f64) -> DMatrix<f64> {
        let mut m = DMatrix::identity(n + 1, n + 1);
        let (c, s) = (theta.cos(), theta.sin());
        m[(i, i)] = c;
        m[(i, j)] = -s;
        m[(j, i)] = s;
        m[(j, j)] = c;
        m
    }

    /// Linear part `lambda * A`, if this is a similarity.
    pub fn linear_part(&self) -> Option<DMatrix<f64>> {
        match self {
            ConformalMap::Similarity { lambda, a, .. } => Some(a * *lambda),
            ConformalMap::Inversion => None,
        }
    }

    /// Whether the map preserves the time orientation.
    pub fn preserves_time_orientation(&self) -> bool {
        match self {
            ConformalMap::Similarity { a, .. } => a[(0, 0)] > 0.0,
            ConformalMap::Inversion => false,
        }
    }

    /// The inverse map.
    pub fn inverse(&self) -> Result<Self> {
        match self {
            ConformalMap::Similarity { lambda, a, tau } => {
                // A^{-1} = eta A^T eta for Lorentz matrices
                let e = eta(tau.dim());
                let ainv = &e * a.transpose() * &e;
                let t = DMatrix::from_column_slice(tau.0.len(), 1, &tau.0);
                let shift = -(&ainv * t) / *lambda;
                Ok(ConformalMap::Similarity {
                    lambda: 1.0 / lambda,
                    a: ainv,
                    tau: Vector(shift.iter().copied().collect()),
                })
            }
            ConformalMap::Inversion => Ok(ConformalMap::Inversion),
        }
    }

    /// Applies the linear part to a displacement vector.
    pub fn apply_vector(&self, v: &Vector) -> Result<Vector> {
        match self {
            ConformalMap::Similarity { lambda, a, .. } => {
                check_dims(a.nrows(), v.0.len())?;
                let col = DMatrix::from_column_slice(v.0.len(), 1, &v.0);
                let r = (a * col) * *lambda;
                Ok(Vector(r.iter().copied().collect()))
            }
            ConformalMap::Inversion => Err(Error::InvalidMap(
                "inversion has no constant linear part".into(),
            )),
        }
    }
}

/// Applies a conformal map to an event.
pub fn apply_conformal(g: &ConformalMap, x: &Event) -> Result<Event> {
    match g {
        ConformalMap::Similarity { lambda, a, tau } => {
            check_dims(a.nrows(), x.0.len())?;
            let col = DMatrix::from_column_slice(x.0.len(), 1, &x.0);
            let r = (a * col) * *lambda;
            Ok(Event(
                r.iter().zip(&tau.0).map(|(v, s)| v + s).collect(),
            ))
        }
        ConformalMap::Inversion => {
            let q = form(&x.0, &x.0, 0.0);
            let w2: f64 = x.0.iter().map(|c| c * c).sum();
            if q.abs() <= LIGHTLIKE_TOL * w2 {
                return Err(Error::OnLightcone);
            }
            Ok(Event(x.0.iter().map(|c| c / q).collect()))
        }
    }
}

//! Coordinate models of hyperbolic space `H^d` and the isometries between them.
//!
//! Three models are supported:
//!
//! * the Poincaré ball, the open unit ball of `R^d`;
//! * the upper half-space `{(z, x) : z > 0, x in R^(d-1)}`;
//! * the hyperboloid `<x, x> = -1, x0 >= 1` under the Minkowski form with
//!   signature `(-, +, ..., +)`.
//!
//! The half-space to ball map sends the base point `(z = 1, x = 0)` to the
//! origin of the ball; the height direction becomes the last ball coordinate.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::special::arccosh1p;

/// Points with Euclidean norm above this are rejected by the ball model.
pub const BALL_NORM_LIMIT: f64 = 1.0 - 1e-12;

const HYPERBOLOID_TOL: f64 = 1e-9;

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm_sq(a: &[f64]) -> f64 {
    dot(a, a)
}

#[inline]
pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Minkowski bilinear form with the first coordinate negative.
#[inline]
pub fn minkowski_dot(a: &[f64], b: &[f64]) -> f64 {
    -a[0] * b[0] + dot(&a[1..], &b[1..])
}

/// A point of the Poincaré ball model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct PoincarePoint {
    coords: Vec<f64>,
}

impl PoincarePoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return domain(format!("ball points need d >= 2, got d = {}", coords.len()));
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("non-finite ball coordinate");
        }
        let n = norm_sq(&coords).sqrt();
        if n > BALL_NORM_LIMIT {
            return domain(format!("ball point norm {n} is not < 1"));
        }
        Ok(Self { coords })
    }

    pub fn origin(d: usize) -> Result<Self> {
        Self::new(vec![0.0; d])
    }

    /// The point at hyperbolic distance `dist` from the origin along `direction`.
    pub fn from_polar(direction: &[f64], dist: f64) -> Result<Self> {
        let n = norm_sq(direction).sqrt();
        if !(n > 0.0) || !(dist >= 0.0) {
            return domain("polar construction needs a nonzero direction and dist >= 0");
        }
        let rho = (dist / 2.0).tanh() / n;
        Self::new(direction.iter().map(|c| c * rho).collect())
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn euclidean_norm(&self) -> f64 {
        norm_sq(&self.coords).sqrt()
    }

    /// Hyperbolic distance to the origin, `2 artanh |u|`.
    pub fn hyperbolic_norm(&self) -> f64 {
        2.0 * self.euclidean_norm().atanh()
    }

    /// Möbius addition `self ⊕ v`. Left translation by `self` is an isometry
    /// taking the origin to `self`.
    pub fn mobius_add(&self, v: &PoincarePoint) -> Result<PoincarePoint> {
        check_dim(self.dim(), v.dim())?;
        let x = &self.coords;
        let y = &v.coords;
        let xy = dot(x, y);
        let xx = norm_sq(x);
        let yy = norm_sq(y);
        let a = 1.0 + 2.0 * xy + yy;
        let b = 1.0 - xx;
        let den = 1.0 + 2.0 * xy + xx * yy;
        PoincarePoint::new(x.iter().zip(y).map(|(xi, yi)| (a * xi + b * yi) / den).collect())
    }

    /// The point at hyperbolic distance `dist` from `self`, leaving in the
    /// direction of `direction` as seen from the origin before translation.
    pub fn offset(&self, direction: &[f64], dist: f64) -> Result<PoincarePoint> {
        let step = PoincarePoint::from_polar(direction, dist)?;
        self.mobius_add(&step)
    }
}

impl TryFrom<Vec<f64>> for PoincarePoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<PoincarePoint> for Vec<f64> {
    fn from(p: PoincarePoint) -> Self {
        p.coords
    }
}

/// A point of the upper half-space model: height `z > 0` and boundary
/// coordinates `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "HalfSpaceRepr", into = "HalfSpaceRepr")]
pub struct HalfSpacePoint {
    z: f64,
    x: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct HalfSpaceRepr {
    z: f64,
    x: Vec<f64>,
}

impl TryFrom<HalfSpaceRepr> for HalfSpacePoint {
    type Error = Error;
    fn try_from(r: HalfSpaceRepr) -> Result<Self> {
        Self::new(r.z, r.x)
    }
}

impl From<HalfSpacePoint> for HalfSpaceRepr {
    fn from(p: HalfSpacePoint) -> Self {
        HalfSpaceRepr { z: p.z, x: p.x }
    }
}

impl HalfSpacePoint {
    pub fn new(z: f64, x: Vec<f64>) -> Result<Self> {
        if !(z > 0.0) || !z.is_finite() {
            return domain(format!("half-space height must be positive, got {z}"));
        }
        if x.is_empty() {
            return domain("half-space points need d >= 2");
        }
        if x.iter().any(|c| !c.is_finite()) {
            return domain("non-finite half-space coordinate");
        }
        Ok(Self { z, x })
    }

    /// The base point `(1, 0)` that maps to the ball origin.
    pub fn base(d: usize) -> Result<Self> {
        Self::new(1.0, vec![0.0; d.saturating_sub(1)])
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn dim(&self) -> usize {
        self.x.len() + 1
    }
}

/// A point on the upper sheet of the hyperboloid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct HyperboloidPoint {
    coords: Vec<f64>,
}

impl HyperboloidPoint {
    /// Validates `<x, x> = -1` up to `1e-9` relative to `x0^2` and `x0 >= 1`.
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 3 {
            return domain("hyperboloid points need at least 3 coordinates");
        }
        if coords.iter().any(|c| !c.is_finite()) {
            return domain("non-finite hyperboloid coordinate");
        }
        let x0 = coords[0];
        if x0 < 1.0 - HYPERBOLOID_TOL {
            return domain(format!("hyperboloid point has x0 = {x0} < 1"));
        }
        let q = minkowski_dot(&coords, &coords);
        if (q + 1.0).abs() > HYPERBOLOID_TOL * x0 * x0 {
            return domain(format!("Minkowski norm {q} is not -1"));
        }
        Ok(Self { coords })
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }
}

impl TryFrom<Vec<f64>> for HyperboloidPoint {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<HyperboloidPoint> for Vec<f64> {
    fn from(p: HyperboloidPoint) -> Self {
        p.coords
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `arccosh(1 + 2|u-v|^2 / ((1-|u|^2)(1-|v|^2)))`.
pub fn distance_poincare(u: &PoincarePoint, v: &PoincarePoint) -> Result<f64> {
    check_dim(u.dim(), v.dim())?;
    Ok(poincare_distance_raw(&u.coords, &v.coords))
}

#[inline]
pub(crate) fn poincare_distance_raw(u: &[f64], v: &[f64]) -> f64 {
    let du = 1.0 - norm_sq(u);
    let dv = 1.0 - norm_sq(v);
    arccosh1p(2.0 * dist_sq(u, v) / (du * dv))
}

/// `arccosh(1 + (|x1-x2|^2 + (z1-z2)^2) / (2 z1 z2))`.
pub fn distance_halfspace(p: &HalfSpacePoint, q: &HalfSpacePoint) -> Result<f64> {
    check_dim(p.dim(), q.dim())?;
    let dz = p.z - q.z;
    Ok(arccosh1p((dist_sq(&p.x, &q.x) + dz * dz) / (2.0 * p.z * q.z)))
}

/// `arccosh(-<a, b>)`, evaluated through `<a-b, a-b> / 2 = -<a, b> - 1`.
pub fn distance_hyperboloid(a: &HyperboloidPoint, b: &HyperboloidPoint) -> Result<f64> {
    check_dim(a.dim(), b.dim())?;
    let inner = -minkowski_dot(&a.coords, &b.coords);
    if inner < 1.0 - HYPERBOLOID_TOL {
        return domain(format!("-<a,b> = {inner} is below 1"));
    }
    let diff: Vec<f64> = a.coords.iter().zip(&b.coords).map(|(x, y)| x - y).collect();
    let w = 0.5 * minkowski_dot(&diff, &diff);
    Ok(arccosh1p(w.max(0.0)))
}

pub fn poincare_to_hyperboloid(u: &PoincarePoint) -> HyperboloidPoint {
    let s = norm_sq(&u.coords);
    let den = 1.0 - s;
    let mut coords = Vec::with_capacity(u.dim() + 1);
    coords.push((1.0 + s) / den);
    coords.extend(u.coords.iter().map(|c| 2.0 * c / den));
    HyperboloidPoint { coords }
}

pub fn hyperboloid_to_poincare(x: &HyperboloidPoint) -> Result<PoincarePoint> {
    let den = 1.0 + x.coords[0];
    PoincarePoint::new(x.coords[1..].iter().map(|c| c / den).collect())
}

/// Half-space to hyperboloid:
/// `x0 = (1 + s)/(2z)`, `x_i = x_i / z`, `x_d = (1 - s)/(2z)` with `s = |x|^2 + z^2`.
pub fn halfspace_to_hyperboloid(p: &HalfSpacePoint) -> HyperboloidPoint {
    let s = norm_sq(&p.x) + p.z * p.z;
    let mut coords = Vec::with_capacity(p.dim() + 1);
    coords.push((1.0 + s) / (2.0 * p.z));
    coords.extend(p.x.iter().map(|c| c / p.z));
    coords.push((1.0 - s) / (2.0 * p.z));
    HyperboloidPoint { coords }
}

pub fn hyperboloid_to_halfspace(x: &HyperboloidPoint) -> Result<HalfSpacePoint> {
    let c = &x.coords;
    let last = c[c.len() - 1];
    // x0 + x_d = 1/z; computed as 1/(x0 - x_d) when that is better conditioned
    let sum = c[0] + last;
    let z = if sum > 0.5 {
        1.0 / sum
    } else {
        // x0^2 - x_d^2 = 1 + |x_mid|^2
        (c[0] - last) / (1.0 + norm_sq(&c[1..c.len() - 1]))
    };
    HalfSpacePoint::new(z, c[1..c.len() - 1].iter().map(|v| v * z).collect())
}

/// Isometry from the half-space to the ball, normalized so `(1, 0)` maps to
/// the origin:
/// `u_i = 2 x_i / (1 + s + 2z)`, `u_d = (1 - s) / (1 + s + 2z)`, `s = |x|^2 + z^2`.
pub fn halfspace_to_poincare(p: &HalfSpacePoint) -> Result<PoincarePoint> {
    let s = norm_sq(&p.x) + p.z * p.z;
    let den = 1.0 + s + 2.0 * p.z;
    let mut coords: Vec<f64> = p.x.iter().map(|c| 2.0 * c / den).collect();
    coords.push((1.0 - s) / den);
    PoincarePoint::new(coords)
}

/// Inverse of [`halfspace_to_poincare`].
pub fn poincare_to_halfspace(u: &PoincarePoint) -> Result<HalfSpacePoint> {
    let c = &u.coords;
    let d = c.len();
    let last = c[d - 1];
    let head = &c[..d - 1];
    // |u + e_d|^2; the boundary point -e_d is sent to infinity
    let to_pole = norm_sq(head) + (1.0 + last) * (1.0 + last);
    let z = (1.0 - norm_sq(c)) / to_pole;
    HalfSpacePoint::new(z, head.iter().map(|v| 2.0 * v / to_pole).collect())
}

/// A point tagged with its coordinate model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Point {
    Ball { coords: PoincarePoint },
    HalfSpace { coords: HalfSpacePoint },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Ball,
    HalfSpace,
}

impl Point {
    pub fn model(&self) -> Model {
        match self {
            Point::Ball { .. } => Model::Ball,
            Point::HalfSpace { .. } => Model::HalfSpace,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Point::Ball { coords } => coords.dim(),
            Point::HalfSpace { coords } => coords.dim(),
        }
    }

    pub fn to_poincare(&self) -> Result<PoincarePoint> {
        match self {
            Point::Ball { coords } => Ok(coords.clone()),
            Point::HalfSpace { coords } => halfspace_to_poincare(coords),
        }
    }

    pub fn to_halfspace(&self) -> Result<HalfSpacePoint> {
        match self {
            Point::Ball { coords } => poincare_to_halfspace(coords),
            Point::HalfSpace { coords } => Ok(coords.clone()),
        }
    }

    /// Distance in the shared model; errors on mixed models or dimensions.
    pub fn distance(&self, other: &Point) -> Result<f64> {
        match (self, other) {
            (Point::Ball { coords: a }, Point::Ball { coords: b }) => distance_poincare(a, b),
            (Point::HalfSpace { coords: a }, Point::HalfSpace { coords: b }) => {
                distance_halfspace(a, b)
            }
            _ => Err(Error::MixedModels),
        }
    }
}

impl From<PoincarePoint> for Point {
    fn from(p: PoincarePoint) -> Self {
        Point::Ball { coords: p }
    }
}

impl From<HalfSpacePoint> for Point {
    fn from(p: HalfSpacePoint) -> Self {
        Point::HalfSpace { coords: p }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn ball(c: &[f64]) -> PoincarePoint {
        PoincarePoint::new(c.to_vec()).unwrap()
    }

    #[test]
    fn poincare_distance_examples() {
        let u = ball(&[0.3, 0.4]);
        assert_eq!(distance_poincare(&u, &u).unwrap(), 0.0);
        let o = ball(&[0.0, 0.0]);
        let d = distance_poincare(&o, &ball(&[0.5, 0.0])).unwrap();
        assert_abs_diff_eq!(d, 3f64.ln(), epsilon = 1e-14);
        assert_abs_diff_eq!(d, 1.098_612, epsilon = 1e-6);
        let d = distance_poincare(&o, &ball(&[0.99, 0.0])).unwrap();
        assert_abs_diff_eq!(d, 199f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(d, 5.293_305, epsilon = 1e-6);
    }

    #[test]
    fn ball_rejects_boundary_and_low_dimension() {
        assert!(PoincarePoint::new(vec![1.0, 0.0]).is_err());
        assert!(PoincarePoint::new(vec![0.6, 0.8]).is_err());
        assert!(PoincarePoint::new(vec![1.0 - 1e-13, 0.0]).is_err());
        assert!(PoincarePoint::new(vec![0.5]).is_err());
        assert!(PoincarePoint::new(vec![f64::NAN, 0.0]).is_err());
        assert!(PoincarePoint::new(vec![0.999_999, 0.0]).is_ok());
    }

    #[test]
    fn halfspace_distance_examples() {
        let p = HalfSpacePoint::new(1.0, vec![0.0]).unwrap();
        let q = HalfSpacePoint::new(1.0, vec![1.0]).unwrap();
        assert_eq!(distance_halfspace(&p, &p).unwrap(), 0.0);
        assert_abs_diff_eq!(distance_halfspace(&p, &q).unwrap(), 1.5f64.acosh(), epsilon = 1e-15);
        assert_abs_diff_eq!(distance_halfspace(&p, &q).unwrap(), 0.962_424, epsilon = 1e-6);
        assert!(HalfSpacePoint::new(0.0, vec![0.0]).is_err());
        assert!(HalfSpacePoint::new(-1.0, vec![0.0]).is_err());
    }

    #[test]
    fn hyperboloid_examples() {
        let apex = HyperboloidPoint::new(vec![1.0, 0.0, 0.0]).unwrap();
        assert_eq!(distance_hyperboloid(&apex, &apex).unwrap(), 0.0);
        let h = poincare_to_hyperboloid(&ball(&[0.5, 0.0]));
        assert_abs_diff_eq!(h.coords()[0], 5.0 / 3.0, epsilon = 1e-15);
        assert_abs_diff_eq!(h.coords()[1], 4.0 / 3.0, epsilon = 1e-15);
        assert_eq!(h.coords()[2], 0.0);
        assert_abs_diff_eq!(minkowski_dot(h.coords(), h.coords()), -1.0, epsilon = 1e-14);
        let o = poincare_to_hyperboloid(&ball(&[0.0, 0.0]));
        assert_eq!(o.coords(), &[1.0, 0.0, 0.0]);
        assert_abs_diff_eq!(distance_hyperboloid(&o, &h).unwrap(), 3f64.ln(), epsilon = 1e-14);
        assert!(HyperboloidPoint::new(vec![1.0, 1.0, 0.0]).is_err());
        assert!(HyperboloidPoint::new(vec![-1.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn base_point_maps_to_origin() {
        let p = HalfSpacePoint::new(1.0, vec![0.0]).unwrap();
        let u = halfspace_to_poincare(&p).unwrap();
        assert_eq!(u.coords(), &[0.0, 0.0]);
        let back = poincare_to_halfspace(&u).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn mobius_offset_hits_requested_distance() {
        let x = ball(&[0.4, -0.7]);
        let y = x.offset(&[0.3, 1.0], 0.2).unwrap();
        assert_abs_diff_eq!(distance_poincare(&x, &y).unwrap(), 0.2, epsilon = 1e-12);
    }

    #[test]
    fn point_distance_rejects_mixed_models() {
        let a: Point = ball(&[0.1, 0.1]).into();
        let b: Point = HalfSpacePoint::new(1.0, vec![0.0]).unwrap().into();
        assert_eq!(a.distance(&b), Err(Error::MixedModels));
        let c: Point = ball(&[0.1, 0.1, 0.0]).into();
        assert!(matches!(a.distance(&c), Err(Error::DimensionMismatch { .. })));
    }
}

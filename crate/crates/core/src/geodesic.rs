//! Random geodesics of the hyperbolic plane and the geodesic-side hash.
//!
//! A geodesic is given in polar coordinates `(t, theta)` relative to the
//! origin of the Poincaré disk: `t` is its hyperbolic distance to the origin
//! and `theta` the direction of the perpendicular foot. In the disk it is the
//! arc of the Euclidean circle with center `coth(t) e^{i theta}` and radius
//! `1 / sinh(t)`; on the hyperboloid it is `{x : <x, u> = 0}` for the de
//! Sitter normal `u = (sinh t, cosh t cos theta, cosh t sin theta)`.
//!
//! The kinematic measure `cosh(t) dt dtheta` restricted to geodesics meeting
//! `B(0, R)` has total mass `2 pi sinh(R)`; [`KinematicSampler`] draws from
//! its normalization.

use std::f64::consts::{PI, TAU};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};
use crate::geometry::{minkowski_dot, HyperboloidPoint, PoincarePoint};
use crate::special::integrate;

/// Side of a geodesic. `Plus` also covers points on the geodesic itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Plus,
    Minus,
}

impl Label {
    #[inline]
    pub fn from_sign(v: f64) -> Self {
        if v >= 0.0 {
            Label::Plus
        } else {
            Label::Minus
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Label::Plus => 1,
            Label::Minus => -1,
        }
    }

    #[inline]
    pub fn is_plus(self) -> bool {
        self == Label::Plus
    }
}

/// Euclidean shape of a geodesic in the disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Arc {
    Circle { center: [f64; 2], radius: f64 },
    /// `t = 0`: a diameter through the origin.
    Diameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "PolarRepr", into = "PolarRepr")]
pub struct Geodesic {
    t: f64,
    theta: f64,
    arc: Arc,
    normal: [f64; 3],
    tanh_t: f64,
    dir: [f64; 2],
}

#[derive(Serialize, Deserialize)]
struct PolarRepr {
    t: f64,
    theta: f64,
}

impl From<PolarRepr> for Geodesic {
    fn from(p: PolarRepr) -> Self {
        Geodesic::from_polar(p.t, p.theta)
    }
}

impl From<Geodesic> for PolarRepr {
    fn from(g: Geodesic) -> Self {
        PolarRepr { t: g.t, theta: g.theta }
    }
}

impl Geodesic {
    /// Builds the geodesic with polar coordinates `(t, theta)`; `t` is taken
    /// as `|t|` and `theta` is reduced into `[0, 2 pi)`.
    pub fn from_polar(t: f64, theta: f64) -> Self {
        let t = t.abs();
        let mut theta = theta.rem_euclid(TAU);
        if theta >= TAU {
            theta = 0.0;
        }
        let (s, c) = theta.sin_cos();
        let arc = if t > 0.0 {
            let coth = 1.0 / t.tanh();
            Arc::Circle {
                center: [coth * c, coth * s],
                radius: 1.0 / t.sinh(),
            }
        } else {
            Arc::Diameter
        };
        let normal = [t.sinh(), t.cosh() * c, t.cosh() * s];
        Self {
            t,
            theta,
            arc,
            normal,
            tanh_t: t.tanh(),
            dir: [c, s],
        }
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn arc(&self) -> Arc {
        self.arc
    }

    /// The de Sitter normal `u` with `<u, u> = 1`.
    pub fn normal(&self) -> [f64; 3] {
        self.normal
    }

    /// Which side of the geodesic the disk point `x` lies on.
    ///
    /// For `t > 0` this is `sgn(|x - c|^2 - b^2)`, evaluated in the
    /// rearranged form `tanh(t) (1 + |x|^2) - 2 x . e_theta`, which has the
    /// same sign and does not cancel for small `t`. Diameters use the
    /// Minkowski rule.
    pub fn hash_side(&self, x: &PoincarePoint) -> Result<Label> {
        let c = x.coords();
        if c.len() != 2 {
            return domain(format!("geodesic hashing needs d = 2, got d = {}", c.len()));
        }
        Ok(self.side_raw(c[0], c[1]))
    }

    #[inline]
    pub(crate) fn side_raw(&self, x0: f64, x1: f64) -> Label {
        let along = x0 * self.dir[0] + x1 * self.dir[1];
        match self.arc {
            Arc::Circle { .. } => {
                Label::from_sign(self.tanh_t * (1.0 + x0 * x0 + x1 * x1) - 2.0 * along)
            }
            // <X, u> for X = (1 + |x|^2, 2x) / (1 - |x|^2) and u = (0, e_theta)
            Arc::Diameter => Label::from_sign(along),
        }
    }

    /// `sgn <x, u>` on the hyperboloid.
    pub fn hash_side_minkowski(&self, x: &HyperboloidPoint) -> Result<Label> {
        if x.coords().len() != 3 {
            return domain("Minkowski hashing needs a point of H^2");
        }
        Ok(Label::from_sign(minkowski_dot(x.coords(), &self.normal)))
    }

    /// True iff the geodesic puts `x` and `y` on different sides.
    pub fn separates(&self, x: &PoincarePoint, y: &PoincarePoint) -> Result<bool> {
        Ok(self.hash_side(x)? != self.hash_side(y)?)
    }
}

/// Samples geodesics meeting `B(0, R)` from the normalized kinematic measure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KinematicSampler {
    radius: f64,
}

impl KinematicSampler {
    pub fn new(radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return domain(format!("sampler radius must be positive, got {radius}"));
        }
        Ok(Self { radius })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Kinematic measure of all geodesics meeting `B(0, R)`: `2 pi sinh R`.
    pub fn total_measure(&self) -> f64 {
        TAU * self.radius.sinh()
    }

    /// Inverse-CDF map from two uniforms to a geodesic: `theta = 2 pi u_theta`
    /// and `t = arsinh(u_t sinh R)`, the inverse of the CDF `sinh t / sinh R`.
    pub fn geodesic_at(&self, u_t: f64, u_theta: f64) -> Geodesic {
        let t = (u_t * self.radius.sinh()).asinh().min(self.radius);
        Geodesic::from_polar(t, TAU * u_theta)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Geodesic {
        let u_theta: f64 = rng.random();
        let u_t: f64 = rng.random();
        self.geodesic_at(u_t, u_theta)
    }
}

/// Quadrature of `2 * int_{-pi/2}^{pi/2} sinh(artanh(tanh(r/2) cos theta)) dtheta`,
/// the kinematic measure of the geodesics separating two points at distance `r`.
/// The exact value is `2r`.
pub fn separation_measure_quadrature(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("separation measure needs r > 0, got {r}"));
    }
    let a = (r / 2.0).tanh();
    if a >= 1.0 {
        return domain(format!("tanh(r/2) rounds to 1 at r = {r}"));
    }
    let inner = integrate(
        |theta: f64| (a * theta.cos()).atanh().sinh(),
        -PI / 2.0,
        PI / 2.0,
        1e-13,
        1e-14,
    )?;
    Ok(2.0 * inner)
}

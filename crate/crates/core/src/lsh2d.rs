//! The hyperbolic-plane LSH family and its collision probabilities.
//!
//! Two points at distance `r` inside `B(0, R)` collide under a random
//! geodesic with probability `1 - r / (pi sinh R)`, which gives
//! `rho = ln(1/p1) / ln(1/p2) <= 1/c`.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geodesic::KinematicSampler;
use crate::geometry::{distance_poincare, PoincarePoint};

/// Margin added to the largest data norm when choosing `R`.
pub const RADIUS_MARGIN: f64 = 1e-6;

/// `1 - r / (pi sinh R)`.
pub fn collision_probability(r: f64, radius: f64) -> Result<f64> {
    if !(radius > 0.0) {
        return domain(format!("radius must be positive, got {radius}"));
    }
    let w = PI * radius.sinh();
    if !(r >= 0.0) || r > w {
        return domain(format!("distance {r} outside [0, pi sinh R = {w}]"));
    }
    Ok(1.0 - r / w)
}

pub fn rho_bound(c: f64) -> Result<f64> {
    if !(c > 1.0) {
        return domain(format!("approximation factor must exceed 1, got {c}"));
    }
    Ok(1.0 / c)
}

/// `ln(1 - r/w) / ln(1 - c r/w)` with `w = pi sinh R`.
pub fn rho_exact(r: f64, c: f64, radius: f64) -> Result<f64> {
    if !(r > 0.0) || !(c > 1.0) || !(radius > 0.0) {
        return domain("rho_exact needs r > 0, c > 1, R > 0");
    }
    let k = 1.0 / (PI * radius.sinh());
    if c * r * k >= 1.0 {
        return domain(format!("p2 <= 0: c r = {} >= pi sinh R", c * r));
    }
    Ok((-r * k).ln_1p() / (-c * r * k).ln_1p())
}

/// Parameters `(r, c, R)` of the plane family with its collision bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LshFamilyParams {
    pub r: f64,
    pub c: f64,
    pub radius: f64,
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
}

impl LshFamilyParams {
    pub fn new(r: f64, c: f64, radius: f64) -> Result<Self> {
        let rho = rho_exact(r, c, radius)?;
        Ok(Self {
            r,
            c,
            radius,
            p1: collision_probability(r, radius)?,
            p2: collision_probability(c * r, radius)?,
            rho,
        })
    }
}

/// Smallest `R` covering the dataset, plus [`RADIUS_MARGIN`].
pub fn covering_radius(points: &[PoincarePoint]) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let max = points
        .iter()
        .map(PoincarePoint::hyperbolic_norm)
        .fold(0.0, f64::max);
    Ok(max + RADIUS_MARGIN)
}

/// Fraction of `n_samples` random geodesics meeting `B(0, R)` that leave
/// `x` and `y` on the same side.
pub fn estimate_collision_mc<R: Rng + ?Sized>(
    x: &PoincarePoint,
    y: &PoincarePoint,
    radius: f64,
    n_samples: u64,
    rng: &mut R,
) -> Result<f64> {
    if n_samples == 0 {
        return Err(Error::InvalidParameter("n_samples must be >= 1".into()));
    }
    let sampler = KinematicSampler::new(radius)?;
    for p in [x, y] {
        if p.dim() != 2 {
            return domain("plane family needs d = 2");
        }
        if p.hyperbolic_norm() > radius {
            return domain(format!(
                "point at hyperbolic norm {} lies outside B(0, {radius})",
                p.hyperbolic_norm()
            ));
        }
    }
    distance_poincare(x, y)?;
    let (xc, yc) = (x.coords(), y.coords());
    let mut same = 0u64;
    for _ in 0..n_samples {
        let g = sampler.sample(rng);
        if g.side_raw(xc[0], xc[1]) == g.side_raw(yc[0], yc[1]) {
            same += 1;
        }
    }
    Ok(same as f64 / n_samples as f64)
}

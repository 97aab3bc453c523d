//! Distance checks for the embedding of the Hamming cube `{0,1}^d` into
//! `H^(d+1)` at a common height `z`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{distance_halfspace, HalfSpacePoint};
use crate::special::stable_arccosh1p;

const SANDWICH_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HammingEmbedding {
    d: usize,
    z: f64,
    epsilon: f64,
}

impl HammingEmbedding {
    /// Requires `z >= sqrt(d / (2 epsilon))`.
    pub fn new(d: usize, z: f64, epsilon: f64) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidParameter("cube dimension must be >= 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon must be in (0,1), got {epsilon}")));
        }
        let min_z = Self::min_height(d, epsilon);
        // allow one ulp of rounding in sqrt
        if !(z >= min_z * (1.0 - f64::EPSILON)) || !z.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "z = {z} is below sqrt(d / (2 epsilon)) = {min_z}"
            )));
        }
        Ok(Self { d, z, epsilon })
    }

    /// The embedding at the smallest admissible height.
    pub fn minimal(d: usize, epsilon: f64) -> Result<Self> {
        Self::new(d, Self::min_height(d, epsilon), epsilon)
    }

    fn min_height(d: usize, epsilon: f64) -> f64 {
        (d as f64 / (2.0 * epsilon)).sqrt()
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// `x -> (z, x)`.
    pub fn embed(&self, x: &[u8]) -> Result<HalfSpacePoint> {
        if x.len() != self.d {
            return Err(Error::DimensionMismatch { expected: self.d, got: x.len() });
        }
        if let Some(b) = x.iter().find(|&&b| b > 1) {
            return domain(format!("bit vector entries must be 0 or 1, found {b}"));
        }
        HalfSpacePoint::new(self.z, x.iter().map(|&b| b as f64).collect())
    }

    /// `sqrt(h) (1 - eps/12) <= z d_H(p_i, p_j) <= sqrt(h)` for Hamming
    /// distance `h`, with `1e-12` slack. False on invalid input.
    pub fn verify_sandwich(&self, xi: &[u8], xj: &[u8]) -> bool {
        let (Ok(p), Ok(q)) = (self.embed(xi), self.embed(xj)) else {
            return false;
        };
        let Ok(dist) = distance_halfspace(&p, &q) else {
            return false;
        };
        let h = xi.iter().zip(xj).filter(|(a, b)| a != b).count() as f64;
        let scaled = dist * self.z;
        let root = h.sqrt();
        root * (1.0 - self.epsilon / 12.0) - SANDWICH_SLACK <= scaled && scaled <= root + SANDWICH_SLACK
    }
}

/// `(sqrt(2x)(1 - x/12), arccosh(1 + x), sqrt(2x))` for `0 < x < 1`.
pub fn puiseux_sandwich(x: f64) -> Result<(f64, f64, f64)> {
    if !(x > 0.0 && x < 1.0) {
        return domain(format!("sandwich needs 0 < x < 1, got {x}"));
    }
    let root = (2.0 * x).sqrt();
    Ok((root * (1.0 - x / 12.0), stable_arccosh1p(x)?, root))
}

/// Hamming-side ratio `(1 - eps/12)^2 / c_h^2` induced by a hyperbolic
/// approximation factor `c_h`.
pub fn induced_approximation_factor(c_h: f64, epsilon: f64) -> Result<f64> {
    if !(c_h > 1.0) || !(epsilon > 0.0 && epsilon < 1.0) {
        return domain("need c_h > 1 and 0 < epsilon < 1");
    }
    Ok((1.0 - epsilon / 12.0).powi(2) / (c_h * c_h))
}

/// All points of `{0,1}^d` in lexicographic order.
pub fn hamming_cube(d: usize) -> Vec<Vec<u8>> {
    (0..1u64 << d)
        .map(|m| (0..d).map(|i| ((m >> (d - 1 - i)) & 1) as u8).collect())
        .collect()
}

//! Dimension reduction in the half-space model.
//!
//! A linear map `f` on the boundary coordinates lifts to `(z, x) -> (z, f(x))`.
//! Because `F_{z1,z2}(s) = arccosh(1 + (s^2 + (z1 - z2)^2) / (2 z1 z2))` is
//! increasing in `s` and satisfies `F(g s) <= g F(s)` for `g >= 1` (reversed
//! for `g <= 1`), the hyperbolic stretch of every pair is bracketed by its
//! Euclidean stretch.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::geometry::{check_dim, dot, HalfSpacePoint};
use crate::special::{arccosh1p, erfc};

const STRETCH_SLACK: f64 = 1e-12;

/// `F_{z1,z2}(r)`: the half-space distance between points at heights
/// `z1`, `z2` whose boundary coordinates are `r` apart.
pub fn big_f(z1: f64, z2: f64, r: f64) -> Result<f64> {
    if !(z1 > 0.0) || !(z2 > 0.0) {
        return domain("F needs positive heights");
    }
    if !(r >= 0.0) {
        return domain(format!("F needs r >= 0, got {r}"));
    }
    let dz = z1 - z2;
    Ok(arccosh1p((r * r + dz * dz) / (2.0 * z1 * z2)))
}

/// Checks the stretch inequality at `(z1, z2, r, gamma)` with `1e-12` slack.
pub fn check_f_stretch(z1: f64, z2: f64, r: f64, gamma: f64) -> bool {
    let (Ok(scaled), Ok(base)) = (big_f(z1, z2, gamma * r), big_f(z1, z2, r)) else {
        return false;
    };
    let bound = gamma * base;
    let upper_ok = gamma < 1.0 || scaled <= bound + STRETCH_SLACK;
    let lower_ok = gamma > 1.0 || scaled >= bound - STRETCH_SLACK;
    upper_ok && lower_ok
}

/// A linear map on boundary coordinates, `x -> scale * M x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectionMap {
    rows: Vec<Vec<f64>>,
    source_dim: usize,
    scale: f64,
}

impl ProjectionMap {
    pub fn new(rows: Vec<Vec<f64>>, scale: f64) -> Result<Self> {
        let Some(first) = rows.first() else {
            return Err(Error::InvalidParameter("projection needs at least one row".into()));
        };
        let source_dim = first.len();
        if source_dim == 0 {
            return Err(Error::InvalidParameter("projection rows are empty".into()));
        }
        for row in &rows {
            check_dim(source_dim, row.len())?;
        }
        if !(scale > 0.0) {
            return Err(Error::InvalidParameter(format!("scale must be positive, got {scale}")));
        }
        Ok(Self { rows, source_dim, scale })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let rows = (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::new(rows, 1.0)
    }

    /// `target_dim x source_dim` i.i.d. standard normal entries.
    pub fn gaussian<R: Rng + ?Sized>(
        source_dim: usize,
        target_dim: usize,
        scale: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let rows = (0..target_dim)
            .map(|_| (0..source_dim).map(|_| rng.sample(StandardNormal)).collect())
            .collect();
        Self::new(rows, scale)
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Length of the boundary coordinate vector this map accepts (`d - 1`).
    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Length of the boundary coordinate vector produced (`k - 1`).
    pub fn target_dim(&self) -> usize {
        self.rows.len()
    }

    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.source_dim, x.len())?;
        Ok(self.rows.iter().map(|row| self.scale * dot(row, x)).collect())
    }

    /// `(z, x) -> (z, scale * M x)`; the height is copied unchanged.
    pub fn project_point(&self, p: &HalfSpacePoint) -> Result<HalfSpacePoint> {
        HalfSpacePoint::new(p.z(), self.apply(p.x())?)
    }
}

/// Number of Gaussian rows used for `n` points at distortion `epsilon`:
/// `ceil(8 ln n / epsilon^2)`.
pub fn jl_rows(n: usize, epsilon: f64) -> usize {
    ((8.0 * (n as f64).ln() / (epsilon * epsilon)).ceil() as usize).max(1)
}

/// Gaussian JL projection of half-space points to `H^k` with
/// `k - 1 = ceil(8 ln n / eps^2)` rows scaled by `1 / sqrt(k - 1)`.
pub fn jl_transform<R: Rng + ?Sized>(
    points: &[HalfSpacePoint],
    epsilon: f64,
    rng: &mut R,
) -> Result<(ProjectionMap, Vec<HalfSpacePoint>)> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("JL transform needs n >= 2".into()));
    }
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidParameter(format!("epsilon must be in (0,1), got {epsilon}")));
    }
    let source_dim = points[0].x().len();
    let rows = jl_rows(points.len(), epsilon);
    let map = ProjectionMap::gaussian(source_dim, rows, 1.0 / (rows as f64).sqrt(), rng)?;
    let projected = points
        .iter()
        .map(|p| map.project_point(p))
        .collect::<Result<Vec<_>>>()?;
    Ok((map, projected))
}

/// Lower bound on `E|Z| 1{|Z|<=1} + P(|Z| > 1)` for `Z ~ N(0,1)`, the
/// constant in `p(r) <= 1 - alpha r / w`:
/// `sqrt(2/pi) (1 - e^{-1/2}) + erfc(1/sqrt 2)`.
pub fn alpha_constant() -> f64 {
    alpha_terms().0 + alpha_terms().1
}

/// The two summands of [`alpha_constant`].
pub fn alpha_terms() -> (f64, f64) {
    let first = (2.0 / std::f64::consts::PI).sqrt() * (1.0 - (-0.5f64).exp());
    let second = erfc(std::f64::consts::FRAC_1_SQRT_2);
    (first, second)
}

//! Hashing in `H^d` for `d >= 3`: project the boundary coordinates of the
//! half-space model onto one Gaussian direction, land in the half-plane
//! model of `H^2`, and hash there with a random geodesic.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dimreduce::{alpha_constant, ProjectionMap};
use crate::error::{domain, Error, Result};
use crate::geodesic::{Geodesic, KinematicSampler, Label};
use crate::geometry::{check_dim, HalfSpacePoint};

/// Disk coordinates of the half-plane point `(z, x)`, using the same base
/// point convention as [`crate::geometry::halfspace_to_poincare`].
#[inline]
pub(crate) fn plane_to_disk(z: f64, x: f64) -> [f64; 2] {
    let s = x * x + z * z;
    let den = 1.0 + s + 2.0 * z;
    [2.0 * x / den, (1.0 - s) / den]
}

#[inline]
fn disk_norm(u: [f64; 2]) -> f64 {
    2.0 * u[0].hypot(u[1]).atanh()
}

/// A Gaussian projection to `H^2` composed with one geodesic hash.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HdHasher {
    projection: ProjectionMap,
    sampler: KinematicSampler,
    geodesic: Geodesic,
}

impl HdHasher {
    /// Fresh Gaussian direction in `R^(d-1)` and a geodesic drawn from
    /// `B(0, sampler_radius)`.
    pub fn new<R: Rng + ?Sized>(d: usize, sampler_radius: f64, rng: &mut R) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!(
                "H^d hashing needs d >= 3 (use the plane family for d = 2), got {d}"
            )));
        }
        let sampler = KinematicSampler::new(sampler_radius)?;
        let projection = ProjectionMap::gaussian(d - 1, 1, 1.0, rng)?;
        let geodesic = sampler.sample(rng);
        Ok(Self { projection, sampler, geodesic })
    }

    /// Like [`HdHasher::new`], but the sampler radius is the largest
    /// projected hyperbolic norm over `points` plus `margin`.
    pub fn fit<R: Rng + ?Sized>(points: &[HalfSpacePoint], margin: f64, rng: &mut R) -> Result<Self> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let d = first.dim();
        if d < 3 {
            return Err(Error::InvalidParameter(format!("H^d hashing needs d >= 3, got {d}")));
        }
        let projection = ProjectionMap::gaussian(d - 1, 1, 1.0, rng)?;
        let row = &projection.rows()[0];
        let mut max_norm: f64 = 0.0;
        for p in points {
            check_dim(d, p.dim())?;
            let x = crate::geometry::dot(row, p.x());
            max_norm = max_norm.max(disk_norm(plane_to_disk(p.z(), x)));
        }
        let sampler = KinematicSampler::new(max_norm + margin)?;
        let geodesic = sampler.sample(rng);
        Ok(Self { projection, sampler, geodesic })
    }

    /// [`HdHasher::fit`] that also returns the labels of `points`, reusing
    /// the projections computed for the radius.
    pub fn fit_with_labels<R: Rng + ?Sized>(
        points: &[HalfSpacePoint],
        margin: f64,
        rng: &mut R,
    ) -> Result<(Self, Vec<Label>)> {
        let first = points.first().ok_or(Error::EmptyDataset)?;
        let d = first.dim();
        if d < 3 {
            return Err(Error::InvalidParameter(format!("H^d hashing needs d >= 3, got {d}")));
        }
        let projection = ProjectionMap::gaussian(d - 1, 1, 1.0, rng)?;
        let row = &projection.rows()[0];
        let mut disk = Vec::with_capacity(points.len());
        let mut max_norm: f64 = 0.0;
        for p in points {
            check_dim(d, p.dim())?;
            let u = plane_to_disk(p.z(), crate::geometry::dot(row, p.x()));
            max_norm = max_norm.max(disk_norm(u));
            disk.push(u);
        }
        let sampler = KinematicSampler::new(max_norm + margin)?;
        let geodesic = sampler.sample(rng);
        let labels = disk.iter().map(|u| geodesic.side_raw(u[0], u[1])).collect();
        Ok((Self { projection, sampler, geodesic }, labels))
    }

    pub fn from_parts(projection: ProjectionMap, sampler_radius: f64, geodesic: Geodesic) -> Result<Self> {
        if projection.target_dim() != 1 {
            return Err(Error::InvalidParameter("H^d hasher projects to one coordinate".into()));
        }
        Ok(Self {
            projection,
            sampler: KinematicSampler::new(sampler_radius)?,
            geodesic,
        })
    }

    pub fn projection(&self) -> &ProjectionMap {
        &self.projection
    }

    pub fn direction(&self) -> &[f64] {
        &self.projection.rows()[0]
    }

    pub fn sampler_radius(&self) -> f64 {
        self.sampler.radius()
    }

    pub fn geodesic(&self) -> &Geodesic {
        &self.geodesic
    }

    pub fn dim(&self) -> usize {
        self.projection.source_dim() + 1
    }

    /// Disk image of `p` after projection, and whether it had to be pulled
    /// back radially onto `B(0, R)`.
    pub fn project_to_disk(&self, p: &HalfSpacePoint) -> Result<([f64; 2], bool)> {
        check_dim(self.dim(), p.dim())?;
        let x = crate::geometry::dot(self.direction(), p.x()) * self.projection.scale();
        let u = plane_to_disk(p.z(), x);
        let radius = self.sampler.radius();
        if disk_norm(u) > radius {
            let n = u[0].hypot(u[1]);
            let target = (radius / 2.0).tanh();
            return Ok(([u[0] / n * target, u[1] / n * target], true));
        }
        Ok((u, false))
    }

    /// Label of `p` together with the clamping flag.
    pub fn hash_flagged(&self, p: &HalfSpacePoint) -> Result<(Label, bool)> {
        let (u, clamped) = self.project_to_disk(p)?;
        Ok((self.geodesic.side_raw(u[0], u[1]), clamped))
    }

    pub fn hash(&self, p: &HalfSpacePoint) -> Result<Label> {
        Ok(self.hash_flagged(p)?.0)
    }
}

/// `(1 - r/w, 1 - alpha r/w)` with `w = pi sinh R`: the band containing the
/// collision probability of a pair at distance `r`.
pub fn collision_bounds_hd(r: f64, sampler_radius: f64) -> Result<(f64, f64)> {
    if !(r > 0.0) || !(sampler_radius > 0.0) {
        return domain("collision bounds need r > 0 and R > 0");
    }
    let w = PI * sampler_radius.sinh();
    let lower = 1.0 - r / w;
    if lower < 0.0 {
        return domain(format!("lower bound 1 - r/w is negative for r = {r}, w = {w}"));
    }
    Ok((lower, 1.0 - alpha_constant() * r / w))
}

/// Conservative `(r, c, p1, p2)` for the `H^d` family: `p1` from the lower
/// band edge at `r`, `p2` from the upper band edge at `c r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HdFamilyParams {
    pub r: f64,
    pub c: f64,
    pub radius: f64,
    pub p1: f64,
    pub p2: f64,
    pub rho: f64,
}

impl HdFamilyParams {
    pub fn new(r: f64, c: f64, radius: f64) -> Result<Self> {
        let min_c = 1.0 / alpha_constant();
        if !(c >= min_c) {
            return Err(Error::InvalidParameter(format!(
                "H^d family needs c >= 1/alpha = {min_c:.4}, got {c}"
            )));
        }
        let (p1, _) = collision_bounds_hd(r, radius)?;
        let (_, p2) = collision_bounds_hd(c * r, radius)?;
        if !(p2 > 0.0) {
            return domain("p2 <= 0; increase R or decrease c r");
        }
        Ok(Self {
            r,
            c,
            radius,
            p1,
            p2,
            rho: p1.ln() / p2.ln(),
        })
    }
}

//! Synthetic data in hyperbolic balls and Monte-Carlo estimates of
//! `p1`, `p2` and `rho` for the hash families.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geodesic::KinematicSampler;
use crate::geometry::{poincare_distance_raw, poincare_to_halfspace, HalfSpacePoint, PoincarePoint};
use crate::lsh2d::{covering_radius, RADIUS_MARGIN};
use crate::lsh_hd::HdHasher;
use crate::special::gauss_kronrod15;

const RADIAL_CELLS: usize = 4096;
const QUANTILE_TOL: f64 = 1e-10;

/// How hyperbolic radii of generated points are distributed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RadialLaw {
    /// Uniform with respect to hyperbolic volume: density `sinh^(d-1) t`.
    #[default]
    HyperbolicVolume,
    /// Radius uniform on `[0, R]`.
    UniformRadius,
}

/// `ln sinh t` without overflow for large `t`.
fn ln_sinh(t: f64) -> f64 {
    t + (-(-2.0 * t).exp_m1()).ln() - std::f64::consts::LN_2
}

/// Inverse-CDF sampler for the radial law on `[0, R]`.
///
/// The volume density is tabulated on a fixed grid of cells, normalised by
/// its value at `R` in log space, with Gauss-Kronrod per cell; quantiles are
/// found by bisection inside a cell.
#[derive(Debug, Clone)]
pub struct RadialSampler {
    law: RadialLaw,
    d: usize,
    radius: f64,
    log_scale: f64,
    cell: f64,
    total: f64,
    cum: Vec<f64>,
}

impl RadialSampler {
    pub fn new(d: usize, radius: f64, law: RadialLaw) -> Result<Self> {
        if d < 2 {
            return Err(Error::InvalidParameter(format!("need d >= 2, got {d}")));
        }
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidParameter(format!("ball radius must be positive, got {radius}")));
        }
        let mut s = Self {
            law,
            d,
            radius,
            log_scale: (d - 1) as f64 * ln_sinh(radius),
            cell: radius / RADIAL_CELLS as f64,
            total: 1.0,
            cum: Vec::new(),
        };
        if law == RadialLaw::HyperbolicVolume {
            let mut cum = Vec::with_capacity(RADIAL_CELLS + 1);
            cum.push(0.0);
            let mut acc = 0.0;
            for i in 0..RADIAL_CELLS {
                let (a, b) = s.cell_bounds(i);
                acc += gauss_kronrod15(&|t| s.density(t), a, b).0;
                cum.push(acc);
            }
            if !(acc > 0.0) || !acc.is_finite() {
                return Err(Error::QuadratureNonConvergence { estimate: acc, error_estimate: f64::NAN });
            }
            for v in &mut cum {
                *v /= acc;
            }
            s.cum = cum;
            s.total = acc;
        }
        Ok(s)
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    fn cell_bounds(&self, i: usize) -> (f64, f64) {
        let b = if i + 1 == RADIAL_CELLS { self.radius } else { (i + 1) as f64 * self.cell };
        (i as f64 * self.cell, b)
    }

    /// Unnormalised density, equal to 1 at `t = R`.
    fn density(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        ((self.d - 1) as f64 * ln_sinh(t) - self.log_scale).exp()
    }

    fn partial(&self, i: usize, t: f64) -> f64 {
        let a = self.cell_bounds(i).0;
        let part = if t > a { gauss_kronrod15(&|s| self.density(s), a, t).0 } else { 0.0 };
        self.cum[i] + part / self.total
    }

    /// CDF of the radial law at `t`.
    pub fn cdf(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= self.radius {
            return 1.0;
        }
        match self.law {
            RadialLaw::UniformRadius => t / self.radius,
            RadialLaw::HyperbolicVolume => {
                let i = ((t / self.cell) as usize).min(RADIAL_CELLS - 1);
                self.partial(i, t).clamp(0.0, 1.0)
            }
        }
    }

    /// Smallest `t` with `cdf(t) >= u`, to within `1e-10`.
    pub fn quantile(&self, u: f64) -> f64 {
        if !(u > 0.0) {
            return 0.0;
        }
        if u >= 1.0 {
            return self.radius;
        }
        match self.law {
            RadialLaw::UniformRadius => u * self.radius,
            RadialLaw::HyperbolicVolume => {
                let i = self.cum.partition_point(|&c| c < u).clamp(1, RADIAL_CELLS) - 1;
                let (mut lo, mut hi) = self.cell_bounds(i);
                let a = lo;
                let need = (u - self.cum[i]) * self.total;
                while hi - lo > QUANTILE_TOL {
                    let mid = 0.5 * (lo + hi);
                    if gauss_kronrod15(&|s| self.density(s), a, mid).0 < need {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            }
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(rng.random())
    }
}

/// Uniform direction on the unit sphere in `R^d`.
fn random_direction<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 1e-300 {
            return v.into_iter().map(|x| x / n).collect();
        }
    }
}

/// `n` points of the Poincare ball with uniform directions and hyperbolic
/// radii drawn from `law` on `[0, R]`.
pub fn sample_ball<R: Rng + ?Sized>(
    d: usize,
    radius: f64,
    n: usize,
    law: RadialLaw,
    rng: &mut R,
) -> Result<Vec<PoincarePoint>> {
    let sampler = RadialSampler::new(d, radius, law)?;
    (0..n)
        .map(|_| {
            let dir = random_direction(d, rng);
            let t = sampler.sample(rng);
            PoincarePoint::from_polar(&dir, t)
        })
        .collect()
}

/// Points uniform with respect to hyperbolic volume in `B(0, R)`.
pub fn sample_uniform_ball<R: Rng + ?Sized>(
    d: usize,
    radius: f64,
    n: usize,
    rng: &mut R,
) -> Result<Vec<PoincarePoint>> {
    sample_ball(d, radius, n, RadialLaw::HyperbolicVolume, rng)
}

/// Radius of the geodesic sampler.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplerRadius {
    /// A fixed `R`; in `d >= 3` projected points beyond it are clamped.
    Fixed(f64),
    /// Data covering radius plus margin, refitted per projection in `d >= 3`.
    #[default]
    Adaptive,
}

/// Which pairs count as near and far.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairSelection {
    /// Near: `dist <= r`; far: `dist >= c r`.
    #[default]
    Threshold,
    /// Near: `0.9 r <= dist <= r`; far: `c r <= dist <= 1.1 c r`.
    Boundary,
}

impl PairSelection {
    fn near(self, dist: f64, r: f64) -> bool {
        match self {
            PairSelection::Threshold => dist <= r,
            PairSelection::Boundary => (0.9 * r..=r).contains(&dist),
        }
    }

    fn far(self, dist: f64, cr: f64) -> bool {
        match self {
            PairSelection::Threshold => dist >= cr,
            PairSelection::Boundary => (cr..=1.1 * cr).contains(&dist),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RhoEstimate {
    pub c: f64,
    pub p1_hat: f64,
    pub p2_hat: f64,
    pub rho_hat: f64,
    pub n_near_pairs: usize,
    pub n_far_pairs: usize,
}

/// Labels of every point under `reps` hash functions, packed 64 per word.
#[derive(Debug, Clone)]
pub struct LabelMatrix {
    n: usize,
    reps: usize,
    words: usize,
    bits: Vec<u64>,
    clamped: u64,
}

impl LabelMatrix {
    pub fn reps(&self) -> usize {
        self.reps
    }

    /// Number of point evaluations that were clamped onto the sampler ball.
    pub fn clamped(&self) -> u64 {
        self.clamped
    }

    fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    /// Number of hash functions under which points `i` and `j` collide.
    pub fn collisions(&self, i: usize, j: usize) -> u64 {
        let differ: u32 = self
            .row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a ^ b).count_ones())
            .sum();
        self.reps as u64 - differ as u64
    }
}

fn check_points(points: &[PoincarePoint]) -> Result<usize> {
    let d = points.first().ok_or(Error::EmptyDataset)?.dim();
    for p in points {
        crate::geometry::check_dim(d, p.dim())?;
    }
    Ok(d)
}

/// Hashes every point with `reps` independent hash functions: geodesics for
/// `d = 2`, [`HdHasher`]s otherwise. Per-function seeds are drawn in order
/// from `rng`, so the result does not depend on thread scheduling.
pub fn hash_labels<R: Rng + ?Sized>(
    points: &[PoincarePoint],
    sampler: SamplerRadius,
    reps: usize,
    rng: &mut R,
) -> Result<LabelMatrix> {
    if reps == 0 {
        return Err(Error::InvalidParameter("reps must be >= 1".into()));
    }
    let d = check_points(points)?;
    let n = points.len();
    let words = reps.div_ceil(64);
    let seeds: Vec<u64> = (0..reps).map(|_| rng.random()).collect();

    enum Prepared {
        Disk(Vec<[f64; 2]>, KinematicSampler),
        Space(Vec<HalfSpacePoint>),
    }
    let prepared = if d == 2 {
        let radius = match sampler {
            SamplerRadius::Fixed(r) => r,
            SamplerRadius::Adaptive => covering_radius(points)?,
        };
        let disk = points.iter().map(|p| [p.coords()[0], p.coords()[1]]).collect();
        Prepared::Disk(disk, KinematicSampler::new(radius)?)
    } else {
        Prepared::Space(points.iter().map(poincare_to_halfspace).collect::<Result<_>>()?)
    };

    // one column block of 64 functions per task
    let blocks: Vec<(Vec<u64>, u64)> = seeds
        .par_chunks(64)
        .map(|chunk| -> Result<(Vec<u64>, u64)> {
            let mut col = vec![0u64; n];
            let mut clamped = 0u64;
            for (bit, &seed) in chunk.iter().enumerate() {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                match &prepared {
                    Prepared::Disk(disk, s) => {
                        let g = s.sample(&mut rng);
                        for (w, u) in col.iter_mut().zip(disk) {
                            if g.side_raw(u[0], u[1]).is_plus() {
                                *w |= 1 << bit;
                            }
                        }
                    }
                    Prepared::Space(hs) => match sampler {
                        SamplerRadius::Adaptive => {
                            let (_, labels) = HdHasher::fit_with_labels(hs, RADIUS_MARGIN, &mut rng)?;
                            for (w, l) in col.iter_mut().zip(labels) {
                                if l.is_plus() {
                                    *w |= 1 << bit;
                                }
                            }
                        }
                        SamplerRadius::Fixed(radius) => {
                            let h = HdHasher::new(d, radius, &mut rng)?;
                            for (w, p) in col.iter_mut().zip(hs) {
                                let (l, c) = h.hash_flagged(p)?;
                                clamped += c as u64;
                                if l.is_plus() {
                                    *w |= 1 << bit;
                                }
                            }
                        }
                    },
                }
            }
            Ok((col, clamped))
        })
        .collect::<Result<_>>()?;

    let mut bits = vec![0u64; n * words];
    let mut clamped = 0;
    for (b, (col, c)) in blocks.into_iter().enumerate() {
        clamped += c;
        for (i, w) in col.into_iter().enumerate() {
            bits[i * words + b] = w;
        }
    }
    Ok(LabelMatrix { n, reps, words, bits, clamped })
}

/// All unordered pairs `(i, j, dist)` with `i < j`.
pub fn pair_distances(points: &[PoincarePoint]) -> Vec<(u32, u32, f64)> {
    let n = points.len();
    (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).map(move |j| {
                let d = poincare_distance_raw(points[i].coords(), points[j].coords());
                (i as u32, j as u32, d)
            })
        })
        .collect()
}

fn rate(labels: &LabelMatrix, pairs: &[(u32, u32)]) -> f64 {
    let hits: u64 = pairs
        .par_iter()
        .map(|&(i, j)| labels.collisions(i as usize, j as usize))
        .sum();
    hits as f64 / (pairs.len() as f64 * labels.reps as f64)
}

/// Estimates for each `c` from precomputed labels and pair distances. A `c`
/// whose near or far class is empty yields [`Error::InsufficientPairs`].
pub fn estimate_from_labels(
    labels: &LabelMatrix,
    pairs: &[(u32, u32, f64)],
    r: f64,
    c_grid: &[f64],
    selection: PairSelection,
) -> Vec<Result<RhoEstimate>> {
    debug_assert!(pairs.iter().all(|&(i, j, _)| (i as usize) < labels.n && (j as usize) < labels.n));
    c_grid
        .iter()
        .map(|&c| {
            let near: Vec<(u32, u32)> = pairs
                .iter()
                .filter(|p| selection.near(p.2, r))
                .map(|p| (p.0, p.1))
                .collect();
            let far: Vec<(u32, u32)> = pairs
                .iter()
                .filter(|p| selection.far(p.2, c * r))
                .map(|p| (p.0, p.1))
                .collect();
            if near.is_empty() || far.is_empty() {
                return Err(Error::InsufficientPairs { near: near.len(), far: far.len() });
            }
            let p1_hat = rate(labels, &near);
            let p2_hat = rate(labels, &far);
            Ok(RhoEstimate {
                c,
                p1_hat,
                p2_hat,
                rho_hat: p1_hat.ln() / p2_hat.ln(),
                n_near_pairs: near.len(),
                n_far_pairs: far.len(),
            })
        })
        .collect()
}

fn check_rc(r: f64, c_grid: &[f64]) -> Result<()> {
    if !(r > 0.0) {
        return Err(Error::InvalidParameter(format!("r must be positive, got {r}")));
    }
    if c_grid.iter().any(|c| !(*c > 1.0)) {
        return Err(Error::InvalidParameter("every c must exceed 1".into()));
    }
    Ok(())
}

/// One estimate per `c`, sharing the same `reps` hash functions across the
/// grid.
pub fn estimate_curve<R: Rng + ?Sized>(
    points: &[PoincarePoint],
    r: f64,
    c_grid: &[f64],
    sampler: SamplerRadius,
    selection: PairSelection,
    reps: usize,
    rng: &mut R,
) -> Result<Vec<Result<RhoEstimate>>> {
    check_rc(r, c_grid)?;
    let labels = hash_labels(points, sampler, reps, rng)?;
    let pairs = pair_distances(points);
    Ok(estimate_from_labels(&labels, &pairs, r, c_grid, selection))
}

/// `p1`, `p2` over all near (`<= r`) and far (`>= c r`) pairs, hashing with a
/// sampler of fixed radius `R`.
pub fn estimate_p1_p2<R: Rng + ?Sized>(
    points: &[PoincarePoint],
    r: f64,
    c: f64,
    radius: f64,
    reps: usize,
    rng: &mut R,
) -> Result<RhoEstimate> {
    estimate_curve(points, r, &[c], SamplerRadius::Fixed(radius), PairSelection::Threshold, reps, rng)?
        .remove(0)
}

/// As [`estimate_p1_p2`], restricted to pairs in `[0.9 r, r]` and
/// `[c r, 1.1 c r]`.
pub fn boundary_pair_experiment<R: Rng + ?Sized>(
    points: &[PoincarePoint],
    r: f64,
    c: f64,
    radius: f64,
    reps: usize,
    rng: &mut R,
) -> Result<RhoEstimate> {
    estimate_curve(points, r, &[c], SamplerRadius::Fixed(radius), PairSelection::Boundary, reps, rng)?
        .remove(0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub d: usize,
    pub n: usize,
    pub r_hyp: f64,
    pub r: f64,
    pub c_grid: Vec<f64>,
    pub reps: usize,
    pub seed: u64,
    #[serde(default)]
    pub radial: RadialLaw,
    #[serde(default)]
    pub sampler: SamplerRadius,
    #[serde(default)]
    pub selection: PairSelection,
}

impl ExperimentConfig {
    /// `n = 1000`, `R = ln 199`, `r = 0.2`, `c = 1.5, 2.5, ..., 18.5`,
    /// 1000 repetitions.
    pub fn standard(d: usize, seed: u64) -> Self {
        Self {
            d,
            n: 1000,
            r_hyp: 199f64.ln(),
            r: 0.2,
            c_grid: (0..18).map(|k| 1.5 + k as f64).collect(),
            reps: 1000,
            seed,
            radial: RadialLaw::HyperbolicVolume,
            sampler: SamplerRadius::Adaptive,
            selection: PairSelection::Threshold,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::InvalidParameter(format!("need d >= 2, got {}", self.d)));
        }
        if self.n == 0 || self.reps == 0 {
            return Err(Error::InvalidParameter("n and reps must be >= 1".into()));
        }
        if !(self.r_hyp > 0.0) {
            return Err(Error::InvalidParameter("R_hyp must be positive".into()));
        }
        check_rc(self.r, &self.c_grid)?;
        if self.c_grid.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidParameter("c grid must be sorted ascending".into()));
        }
        Ok(())
    }
}

/// Generates the dataset described by `config` and estimates every `c`.
pub fn rho_curve_results(config: &ExperimentConfig) -> Result<Vec<Result<RhoEstimate>>> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let points = sample_ball(config.d, config.r_hyp, config.n, config.radial, &mut rng)?;
    estimate_curve(&points, config.r, &config.c_grid, config.sampler, config.selection, config.reps, &mut rng)
}

/// [`rho_curve_results`] failing on the first `c` without enough pairs.
pub fn rho_curve(config: &ExperimentConfig) -> Result<Vec<RhoEstimate>> {
    rho_curve_results(config)?.into_iter().collect()
}

pub const CSV_HEADER: [&str; 12] = [
    "d", "n", "R_hyp", "r", "c", "p1_hat", "p2_hat", "rho_hat", "one_over_c", "n_near", "n_far", "seed",
];

/// One CSV record; a failed estimate keeps its pair counts and writes `NaN`
/// for the probabilities.
pub fn csv_record(d: usize, n: usize, r_hyp: f64, r: f64, c: f64, est: &Result<RhoEstimate>, seed: u64) -> [String; 12] {
    let (p1, p2, rho, near, far) = match est {
        Ok(e) => (e.p1_hat, e.p2_hat, e.rho_hat, e.n_near_pairs, e.n_far_pairs),
        Err(Error::InsufficientPairs { near, far }) => (f64::NAN, f64::NAN, f64::NAN, *near, *far),
        Err(_) => (f64::NAN, f64::NAN, f64::NAN, 0, 0),
    };
    [
        d.to_string(),
        n.to_string(),
        r_hyp.to_string(),
        r.to_string(),
        c.to_string(),
        p1.to_string(),
        p2.to_string(),
        rho.to_string(),
        (1.0 / c).to_string(),
        near.to_string(),
        far.to_string(),
        seed.to_string(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lsh2d::collision_probability;
    use crate::special::integrate;
    use approx::assert_abs_diff_eq;

    fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        xs.iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn ln_sinh_is_stable() {
        for &t in &[1e-8f64, 0.3, 2.0, 40.0] {
            assert_abs_diff_eq!(ln_sinh(t), t.sinh().ln(), epsilon = 1e-12);
        }
        assert!((ln_sinh(1000.0) - (1000.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    #[test]
    fn radial_cdf_matches_closed_form_in_the_plane() {
        let r = 199f64.ln();
        let s = RadialSampler::new(2, r, RadialLaw::HyperbolicVolume).unwrap();
        for &t in &[0.01f64, 0.5, 1.0, 3.0, 5.0] {
            let exact = (t.cosh() - 1.0) / (r.cosh() - 1.0);
            assert_abs_diff_eq!(s.cdf(t), exact, epsilon = 1e-12);
            assert_abs_diff_eq!(s.quantile(exact), t, epsilon = 1e-9);
        }
        assert_eq!(s.quantile(0.0), 0.0);
        assert_abs_diff_eq!(s.quantile(1.0), r, epsilon = 1e-9);
    }

    #[test]
    fn radial_cdf_matches_adaptive_quadrature() {
        let s = RadialSampler::new(10, 3.0, RadialLaw::HyperbolicVolume).unwrap();
        let f = |t: f64| t.sinh().powi(9);
        let total = integrate(f, 0.0, 3.0, 1e-14, 1e-14).unwrap();
        for &t in &[0.5f64, 1.5, 2.5, 2.9] {
            let exact = integrate(f, 0.0, t, 1e-14, 1e-14).unwrap() / total;
            assert_abs_diff_eq!(s.cdf(t), exact, epsilon = 1e-11);
        }
    }

    #[test]
    fn huge_dimension_does_not_overflow() {
        let s = RadialSampler::new(1000, 199f64.ln(), RadialLaw::HyperbolicVolume).unwrap();
        let t = s.quantile(0.5);
        assert!(t > 5.2 && t < 199f64.ln());
    }

    #[test]
    fn radial_law_ks() {
        for &d in &[2usize, 10] {
            let radius = 199f64.ln();
            let s = RadialSampler::new(d, radius, RadialLaw::HyperbolicVolume).unwrap();
            let mut rng = ChaCha8Rng::seed_from_u64(d as u64);
            let pts = sample_uniform_ball(d, radius, 100_000, &mut rng).unwrap();
            let radii: Vec<f64> = pts.iter().map(PoincarePoint::hyperbolic_norm).collect();
            let ks = ks_statistic(radii, |t| s.cdf(t));
            assert!(ks < 0.01, "d = {d}: KS {ks}");
        }
    }

    #[test]
    fn plane_points_stay_inside_radius() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pts = sample_uniform_ball(2, 199f64.ln(), 2000, &mut rng).unwrap();
        assert!(pts.iter().all(|p| p.euclidean_norm() <= 0.99 + 1e-12));
        let p = sample_uniform_ball(3, 1e-12, 1, &mut rng).unwrap();
        assert!(p[0].euclidean_norm() < 1e-9);
    }

    #[test]
    fn uniform_radius_law() {
        let s = RadialSampler::new(100, 2.0, RadialLaw::UniformRadius).unwrap();
        assert_eq!(s.quantile(0.25), 0.5);
        assert_eq!(s.cdf(1.0), 0.5);
    }

    #[test]
    fn insufficient_pairs() {
        let p = PoincarePoint::new(vec![0.1, 0.1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = estimate_p1_p2(&[p.clone(), p], 0.2, 2.0, 3.0, 10, &mut rng).unwrap_err();
        assert_eq!(err, Error::InsufficientPairs { near: 1, far: 0 });
        let q = PoincarePoint::new(vec![0.3, 0.1]).unwrap();
        let p = PoincarePoint::new(vec![0.1, 0.1]).unwrap();
        assert!(boundary_pair_experiment(&[p, q], 0.01, 2.0, 3.0, 10, &mut rng).is_err());
    }

    #[test]
    fn near_pairs_match_averaged_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let pts = sample_uniform_ball(2, 1.0, 20, &mut rng).unwrap();
        let radius = 1.2;
        let est = estimate_p1_p2(&pts, 10.0, 1.01, radius, 20_000, &mut rng);
        // every pair is near, so the far class is empty
        assert!(matches!(est, Err(Error::InsufficientPairs { far: 0, .. })));
        let labels = hash_labels(&pts, SamplerRadius::Fixed(radius), 20_000, &mut rng).unwrap();
        let pairs = pair_distances(&pts);
        let all: Vec<(u32, u32)> = pairs.iter().map(|p| (p.0, p.1)).collect();
        let expected: f64 = pairs.iter().map(|p| collision_probability(p.2, radius).unwrap()).sum::<f64>() / pairs.len() as f64;
        assert_abs_diff_eq!(rate(&labels, &all), expected, epsilon = 3e-3);
    }

    #[test]
    fn label_matrix_counts_collisions() {
        let pts = vec![PoincarePoint::new(vec![0.1, 0.0]).unwrap(); 3];
        let labels = hash_labels(&pts, SamplerRadius::Fixed(1.0), 130, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(labels.collisions(0, 2), 130);
        assert!(hash_labels(&pts, SamplerRadius::Fixed(1.0), 0, &mut ChaCha8Rng::seed_from_u64(1)).is_err());
    }

    #[test]
    fn curves_are_deterministic() {
        let mut cfg = ExperimentConfig::standard(2, 17);
        cfg.n = 300;
        cfg.reps = 200;
        cfg.c_grid = vec![2.0, 4.0];
        let a = rho_curve_results(&cfg).unwrap();
        let b = rho_curve_results(&cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        cfg.d = 5;
        cfg.radial = RadialLaw::UniformRadius;
        assert_eq!(rho_curve_results(&cfg).unwrap(), rho_curve_results(&cfg).unwrap());
    }

    #[test]
    fn config_validation() {
        let mut cfg = ExperimentConfig::standard(2, 0);
        assert!(cfg.validate().is_ok());
        assert_eq!(cfg.c_grid.len(), 18);
        cfg.c_grid = vec![3.0, 2.0];
        assert!(cfg.validate().is_err());
        cfg.c_grid = vec![1.0];
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn csv_record_layout() {
        let est = Ok(RhoEstimate { c: 2.0, p1_hat: 0.9, p2_hat: 0.5, rho_hat: 0.152, n_near_pairs: 3, n_far_pairs: 4 });
        let rec = csv_record(2, 10, 1.5, 0.2, 2.0, &est, 7);
        assert_eq!(rec[8], "0.5");
        assert_eq!(rec[11], "7");
        let rec = csv_record(2, 10, 1.5, 0.2, 2.0, &Err(Error::InsufficientPairs { near: 0, far: 9 }), 7);
        assert_eq!(rec[5], "NaN");
        assert_eq!(rec[10], "9");
    }
}

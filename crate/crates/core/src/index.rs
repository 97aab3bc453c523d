//! A multi-table (c, r)-ANN index over concatenated hyperbolic hash labels.

use std::collections::{HashMap, HashSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dimreduce::alpha_constant;
use crate::error::{Error, Result};
use crate::geodesic::{Geodesic, KinematicSampler, Label};
use crate::geometry::{check_dim, HalfSpacePoint, Model, Point};
use crate::lsh2d::{collision_probability, RADIUS_MARGIN};
use crate::lsh_hd::{collision_bounds_hd, HdHasher};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndexParams {
    pub k: usize,
    pub l: usize,
    pub r: f64,
    pub c: f64,
}

/// `K = ceil(ln n / ln(1/p2))` and `L = ceil(n^rho)`, both at least 1.
pub fn choose_params(n: usize, p1: f64, p2: f64) -> Result<(usize, usize)> {
    if !(0.0 < p2 && p2 < p1 && p1 < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p2 < p1 < 1, got p1 = {p1}, p2 = {p2}"
        )));
    }
    let n = n.max(1) as f64;
    let k = (n.ln() / -p2.ln()).ceil().max(1.0);
    let rho = p1.ln() / p2.ln();
    // absorb rounding noise when n^rho lands on an integer
    let l = (n.powf(rho) - 1e-9).ceil().max(1.0);
    Ok((k as usize, l as usize))
}

/// One hash function of the index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Hasher {
    Plane(Geodesic),
    Space(HdHasher),
}

/// Packed label bits of one table; bit set for `Plus`.
pub type BucketKey = Vec<u64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TableRepr {
    buckets: Vec<(BucketKey, Vec<u32>)>,
}

#[derive(Debug, Clone, PartialEq)]
struct Table {
    hashers: Vec<Hasher>,
    buckets: HashMap<BucketKey, Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
struct IndexRepr {
    params: IndexParams,
    model: Option<Model>,
    dim: usize,
    hashers: Vec<Vec<Hasher>>,
    tables: Vec<TableRepr>,
    points: Vec<Point>,
}

/// Query-time form of a stored point: disk coordinates for the plane,
/// half-space coordinates otherwise.
#[derive(Debug, Clone)]
enum Prepared {
    Disk([f64; 2]),
    Space(HalfSpacePoint),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LshIndex {
    params: IndexParams,
    model: Option<Model>,
    dim: usize,
    tables: Vec<Table>,
    points: Vec<Point>,
}

fn prepare(p: &Point) -> Result<Prepared> {
    if p.dim() == 2 {
        let u = p.to_poincare()?;
        Ok(Prepared::Disk([u.coords()[0], u.coords()[1]]))
    } else {
        Ok(Prepared::Space(p.to_halfspace()?))
    }
}

fn label(h: &Hasher, p: &Prepared) -> Result<Label> {
    match (h, p) {
        (Hasher::Plane(g), Prepared::Disk(u)) => Ok(g.side_raw(u[0], u[1])),
        (Hasher::Space(h), Prepared::Space(q)) => h.hash(q),
        _ => Err(Error::InvalidParameter("hasher does not match point dimension".into())),
    }
}

fn key(hashers: &[Hasher], p: &Prepared) -> Result<BucketKey> {
    let mut bits = vec![0u64; hashers.len().div_ceil(64)];
    for (i, h) in hashers.iter().enumerate() {
        if label(h, p)?.is_plus() {
            bits[i / 64] |= 1 << (i % 64);
        }
    }
    Ok(bits)
}

/// Largest hyperbolic norm over the data plus [`RADIUS_MARGIN`].
fn data_radius(points: &[Point]) -> Result<f64> {
    let mut max: f64 = 0.0;
    for p in points {
        max = max.max(p.to_poincare()?.hyperbolic_norm());
    }
    Ok(max + RADIUS_MARGIN)
}

impl LshIndex {
    /// Builds `L` tables of `K` hashers. Without `overrides`, `(K, L)` come
    /// from [`choose_params`] with `p1`, `p2` from the plane closed form
    /// (`d = 2`) or the conservative band edges (`d >= 3`), both evaluated at
    /// the data's covering radius.
    pub fn build<R: Rng + ?Sized>(
        points: Vec<Point>,
        r: f64,
        c: f64,
        rng: &mut R,
        overrides: Option<(usize, usize)>,
    ) -> Result<Self> {
        if !(r > 0.0) || !(c > 1.0) {
            return Err(Error::InvalidParameter(format!("need r > 0 and c > 1, got r = {r}, c = {c}")));
        }
        if let Some((k, l)) = overrides {
            if k == 0 || l == 0 {
                return Err(Error::InvalidParameter("K and L must be at least 1".into()));
            }
        }
        let Some(first) = points.first() else {
            let (k, l) = overrides.unwrap_or((1, 1));
            return Ok(Self {
                params: IndexParams { k, l, r, c },
                model: None,
                dim: 0,
                tables: Vec::new(),
                points,
            });
        };
        let (model, dim) = (first.model(), first.dim());
        for p in &points {
            if p.model() != model {
                return Err(Error::MixedModels);
            }
            check_dim(dim, p.dim())?;
        }
        if points.len() > u32::MAX as usize {
            return Err(Error::InvalidParameter("too many points".into()));
        }
        let radius = data_radius(&points)?;
        let (k, l) = match overrides {
            Some(kl) => kl,
            None => {
                let (p1, p2) = if dim == 2 {
                    (collision_probability(r, radius)?, collision_probability(c * r, radius)?)
                } else {
                    let min_c = 1.0 / alpha_constant();
                    if c < min_c {
                        return Err(Error::InvalidParameter(format!(
                            "c = {c} is below 1/alpha = {min_c:.4}; pass explicit (K, L)"
                        )));
                    }
                    (collision_bounds_hd(r, radius)?.0, collision_bounds_hd(c * r, radius)?.1)
                };
                choose_params(points.len(), p1, p2)?
            }
        };

        let prepared = points.iter().map(prepare).collect::<Result<Vec<_>>>()?;
        let halfspace: Vec<HalfSpacePoint> = if dim == 2 {
            Vec::new()
        } else {
            prepared
                .iter()
                .map(|p| match p {
                    Prepared::Space(q) => q.clone(),
                    Prepared::Disk(_) => unreachable!(),
                })
                .collect()
        };
        let sampler = KinematicSampler::new(radius)?;
        let mut tables = Vec::with_capacity(l);
        for _ in 0..l {
            let hashers = (0..k)
                .map(|_| {
                    if dim == 2 {
                        Ok(Hasher::Plane(sampler.sample(rng)))
                    } else {
                        HdHasher::fit(&halfspace, RADIUS_MARGIN, rng).map(Hasher::Space)
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let mut buckets: HashMap<BucketKey, Vec<u32>> = HashMap::new();
            for (id, p) in prepared.iter().enumerate() {
                buckets.entry(key(&hashers, p)?).or_default().push(id as u32);
            }
            tables.push(Table { hashers, buckets });
        }
        Ok(Self {
            params: IndexParams { k, l, r, c },
            model: Some(model),
            dim,
            tables,
            points,
        })
    }

    pub fn params(&self) -> IndexParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Total number of stored `(key, id)` entries.
    pub fn entry_count(&self) -> usize {
        self.tables
            .iter()
            .map(|t| t.buckets.values().map(Vec::len).sum::<usize>())
            .sum()
    }

    /// Key of `p` in table `table`, recomputed from that table's hashers.
    pub fn key_of(&self, table: usize, p: &Point) -> Result<BucketKey> {
        let t = self
            .tables
            .get(table)
            .ok_or_else(|| Error::InvalidParameter(format!("no table {table}")))?;
        key(&t.hashers, &prepare(p)?)
    }

    /// Ids stored under `key` in table `table`.
    pub fn bucket(&self, table: usize, key: &BucketKey) -> &[u32] {
        self.tables
            .get(table)
            .and_then(|t| t.buckets.get(key))
            .map_or(&[], Vec::as_slice)
    }

    fn check_query(&self, q: &Point) -> Result<()> {
        if let Some(model) = self.model {
            if q.model() != model {
                return Err(Error::MixedModels);
            }
            check_dim(self.dim, q.dim())?;
        }
        Ok(())
    }

    /// Default candidate budget, `3L`.
    pub fn default_budget(&self) -> usize {
        3 * self.params.l
    }

    /// Probes the bucket of `q` in every table, examines at most `budget`
    /// distinct candidates, and returns the nearest one within `c r`
    /// (smallest id on ties), or `None`.
    pub fn query(&self, q: &Point, budget: usize) -> Result<Option<(u32, f64)>> {
        self.check_query(q)?;
        if self.points.is_empty() {
            return Ok(None);
        }
        let prepared = prepare(q)?;
        let limit = self.params.c * self.params.r;
        let mut seen = HashSet::new();
        let mut best: Option<(u32, f64)> = None;
        'tables: for t in &self.tables {
            let Some(ids) = t.buckets.get(&key(&t.hashers, &prepared)?) else {
                continue;
            };
            for &id in ids {
                if seen.len() >= budget {
                    break 'tables;
                }
                if !seen.insert(id) {
                    continue;
                }
                let dist = q.distance(&self.points[id as usize])?;
                if dist <= limit {
                    let better = match best {
                        None => true,
                        Some((bid, bd)) => dist < bd || (dist == bd && id < bid),
                    };
                    if better {
                        best = Some((id, dist));
                    }
                }
            }
        }
        Ok(best)
    }

    pub fn to_json(&self) -> Result<String> {
        let repr = IndexRepr {
            params: self.params,
            model: self.model,
            dim: self.dim,
            hashers: self.tables.iter().map(|t| t.hashers.clone()).collect(),
            tables: self
                .tables
                .iter()
                .map(|t| {
                    let mut buckets: Vec<_> = t.buckets.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
                    buckets.sort();
                    TableRepr { buckets }
                })
                .collect(),
            points: self.points.clone(),
        };
        serde_json::to_string(&repr).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let repr: IndexRepr = serde_json::from_str(s).map_err(|e| Error::Serialization(e.to_string()))?;
        if repr.hashers.len() != repr.tables.len() {
            return Err(Error::Serialization("hasher and table counts differ".into()));
        }
        let tables = repr
            .hashers
            .into_iter()
            .zip(repr.tables)
            .map(|(hashers, t)| Table {
                hashers,
                buckets: t.buckets.into_iter().collect(),
            })
            .collect();
        Ok(Self {
            params: repr.params,
            model: repr.model,
            dim: repr.dim,
            tables,
            points: repr.points,
        })
    }
}

/// Exact nearest neighbour by linear scan; ties go to the smallest id.
pub fn brute_force_nn(points: &[Point], q: &Point) -> Result<(u32, f64)> {
    let mut best: Option<(u32, f64)> = None;
    for (id, p) in points.iter().enumerate() {
        let d = q.distance(p)?;
        if best.is_none_or(|(_, bd)| d < bd) {
            best = Some((id as u32, d));
        }
    }
    best.ok_or(Error::EmptyDataset)
}

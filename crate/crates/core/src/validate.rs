//! Numerical validators for the analytic facts the hash families rely on.
//! Each runs on a fixed grid or a fixed seed and reports one line per check.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::dimreduce::{alpha_constant, alpha_terms, big_f, check_f_stretch};
use crate::geodesic::separation_measure_quadrature;
use crate::lowerbound::{hamming_cube, puiseux_sandwich, HammingEmbedding};
use crate::lsh2d::rho_exact;
use crate::special::erfc;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Validator {
    Integral,
    LogRatio,
    MonotoneG,
    FStretch,
    Puiseux,
    Sandwich,
    Stability,
    Alpha,
}

impl Validator {
    pub const ALL: [Validator; 8] = [
        Validator::Integral,
        Validator::LogRatio,
        Validator::MonotoneG,
        Validator::FStretch,
        Validator::Puiseux,
        Validator::Sandwich,
        Validator::Stability,
        Validator::Alpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Validator::Integral => "integral",
            Validator::LogRatio => "log-ratio",
            Validator::MonotoneG => "monotone-g",
            Validator::FStretch => "lemma-f",
            Validator::Puiseux => "puiseux",
            Validator::Sandwich => "sandwich",
            Validator::Stability => "stability",
            Validator::Alpha => "alpha",
        }
    }

    pub fn run(self) -> Report {
        let checks = match self {
            Validator::Integral => integral(),
            Validator::LogRatio => log_ratio(),
            Validator::MonotoneG => monotone_g(),
            Validator::FStretch => f_stretch_checks(),
            Validator::Puiseux => puiseux(),
            Validator::Sandwich => sandwich(),
            Validator::Stability => stability(),
            Validator::Alpha => alpha(),
        };
        Report { validator: self, checks }
    }
}

impl fmt::Display for Validator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Validator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Validator::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown validator '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Self { name: name.into(), passed, detail: detail.into() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub validator: Validator,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = if c.passed { "PASS" } else { "FAIL" };
            writeln!(f, "{tag} {}/{}: {}", self.validator, c.name, c.detail)?;
        }
        Ok(())
    }
}

fn integral() -> Vec<Check> {
    [0.01, 0.1, 0.5, 1.0, 2.0, 5.0]
        .iter()
        .map(|&r| match separation_measure_quadrature(r) {
            Ok(v) => {
                let err = (v - 2.0 * r).abs();
                Check::new(format!("r={r}"), err <= 1e-8, format!("measure {v:.12}, |measure - 2r| = {err:.2e}"))
            }
            Err(e) => Check::new(format!("r={r}"), false, e.to_string()),
        })
        .collect()
}

/// `n` points log-spaced on `[lo, hi]`.
fn logspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(move |i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
}

fn log_ratio() -> Vec<Check> {
    let mut out = Vec::new();
    for &l in &[1.1, 2.0, 5.0, 10.0] {
        let mut worst = f64::NEG_INFINITY;
        for x in logspace(1e-9, 0.99 / l, 1000) {
            let ratio = (-x).ln_1p() / (-l * x).ln_1p();
            worst = worst.max(ratio - 1.0 / l);
        }
        out.push(Check::new(
            format!("ln(1-x)/ln(1-lx) <= 1/l, l={l}"),
            worst <= 1e-12,
            format!("max excess {worst:.3e}"),
        ));
    }
    let mut worst = f64::NEG_INFINITY;
    let mut count = 0;
    for radius in logspace(0.1, 8.0, 10) {
        for c in logspace(1.01, 20.0, 10) {
            let w = std::f64::consts::PI * radius.sinh();
            for r in logspace(1e-6 * w / c, 0.99 * w / c, 10) {
                if let Ok(rho) = rho_exact(r, c, radius) {
                    worst = worst.max(rho - 1.0 / c);
                    count += 1;
                }
            }
        }
    }
    out.push(Check::new(
        "rho_exact <= 1/c",
        count == 1000 && worst <= 1e-12,
        format!("{count} grid points, max excess {worst:.3e}"),
    ));
    let mut worst_limit: f64 = 0.0;
    for c in [1.5, 2.0, 4.0, 10.0] {
        for radius in [1.0, 3.0, 199f64.ln()] {
            worst_limit = worst_limit.max((rho_exact(1e-9, c, radius).unwrap_or(f64::NAN) - 1.0 / c).abs());
        }
    }
    out.push(Check::new(
        "rho_exact(1e-9, c, R) -> 1/c",
        worst_limit <= 1e-6,
        format!("max |rho - 1/c| = {worst_limit:.3e}"),
    ));
    out
}

fn monotone_g() -> Vec<Check> {
    let mut out = Vec::new();
    for &c in &[1.5, 2.0, 4.0] {
        for &radius in &[1.0, 3.0, 199f64.ln()] {
            let rmax = std::f64::consts::PI * radius.sinh() / c;
            let values: Vec<f64> = (1..=1000)
                .map(|i| rho_exact(rmax * i as f64 / 1001.0, c, radius).unwrap_or(f64::NAN))
                .collect();
            let violations = values.windows(2).filter(|w| !(w[1] < w[0])).count();
            out.push(Check::new(
                format!("c={c}, R={radius:.4}"),
                violations == 0,
                format!("{violations} non-decreasing steps over 1000 points, g from {:.6} to {:.6}", values[0], values[999]),
            ));
        }
    }
    out
}

fn f_stretch_checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eedf);
    let log_uniform = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| (lo.ln() + (hi.ln() - lo.ln()) * rng.random::<f64>()).exp();
    let mut failures = 0;
    for _ in 0..100_000 {
        let z1 = log_uniform(&mut rng, 0.1, 10.0);
        let z2 = log_uniform(&mut rng, 0.1, 10.0);
        let r = 10.0 * rng.random::<f64>();
        let gamma = log_uniform(&mut rng, 0.1, 10.0);
        if !check_f_stretch(z1, z2, r, gamma) {
            failures += 1;
        }
    }
    vec![Check::new(
        "F(g r) vs g F(r), 1e5 tuples",
        failures == 0,
        format!("{failures} violations"),
    )]
}

fn puiseux() -> Vec<Check> {
    let mut out = Vec::new();
    let grid: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
    let sweep: Vec<f64> = logspace(1e-6, 0.99, 1000).collect();
    for (name, xs) in [("uniform grid", grid), ("log sweep", sweep)] {
        let bad = xs
            .iter()
            .filter(|&&x| match puiseux_sandwich(x) {
                Ok((lo, mid, hi)) => !(lo <= mid && mid <= hi),
                Err(_) => true,
            })
            .count();
        out.push(Check::new(name, bad == 0, format!("{bad} of {} points out of order", xs.len())));
    }
    out
}

fn sandwich() -> Vec<Check> {
    let cube = hamming_cube(8);
    [0.1, 0.5, 0.9]
        .iter()
        .map(|&eps| {
            let Ok(emb) = HammingEmbedding::minimal(8, eps) else {
                return Check::new(format!("eps={eps}"), false, "embedding rejected");
            };
            let mut pairs = 0;
            let mut bad = 0;
            for i in 0..cube.len() {
                for j in i + 1..cube.len() {
                    pairs += 1;
                    if !emb.verify_sandwich(&cube[i], &cube[j]) {
                        bad += 1;
                    }
                }
            }
            Check::new(
                format!("d=8, eps={eps}, z={:.4}", emb.z()),
                bad == 0,
                format!("{bad} of {pairs} pairs violate the sandwich"),
            )
        })
        .collect()
}

fn stability() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2_57ab);
    let delta = [0.3, -1.2, 0.5, 0.0, 2.0, -0.7, 0.1, 0.9, -0.4];
    let norm = delta.iter().map(|v| v * v).sum::<f64>().sqrt();
    let n = 100_000;
    let mut proj: Vec<f64> = (0..n)
        .map(|_| {
            delta
                .iter()
                .map(|v| v * rng.sample::<f64, _>(StandardNormal))
                .sum::<f64>()
                .abs()
        })
        .collect();
    proj.sort_by(f64::total_cmp);
    // CDF of ||delta|| |N(0,1)|
    let cdf = |x: f64| 1.0 - erfc(x / (norm * std::f64::consts::SQRT_2));
    let ks = proj
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
        })
        .fold(0.0, f64::max);

    // projected distance F(z1, z2, s|g|) has mean at most F(z1, z2, s)
    let mut mean_checks = Vec::new();
    for &(z1, z2, s) in &[(1.0, 1.0, 0.5), (0.7, 1.4, 2.0), (1.0, 3.0, 10.0)] {
        let exact = big_f(z1, z2, s).unwrap_or(f64::NAN);
        let m = 100_000;
        let samples: Vec<f64> = (0..m)
            .map(|_| big_f(z1, z2, s * rng.sample::<f64, _>(StandardNormal).abs()).unwrap_or(f64::NAN))
            .collect();
        let mean = samples.iter().sum::<f64>() / m as f64;
        let var = samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1) as f64;
        let se = (var / m as f64).sqrt();
        mean_checks.push(Check::new(
            format!("E[F(s|g|)] <= F(s) at z=({z1},{z2}), s={s}"),
            mean <= exact + 3.0 * se,
            format!("mean {mean:.6} (se {se:.1e}) vs F(s) {exact:.6}"),
        ));
    }
    let mut out = vec![Check::new(
        "|a.v| ~ ||v|| |N(0,1)|",
        ks < 0.005,
        format!("KS statistic {ks:.5} over {n} Gaussian vectors"),
    )];
    out.extend(mean_checks);
    out
}

fn alpha() -> Vec<Check> {
    let a = alpha_constant();
    let (t1, t2) = alpha_terms();
    vec![
        Check::new("alpha in (0.631, 0.632)", a > 0.631 && a < 0.632, format!("alpha = {a:.6} ({t1:.6} + {t2:.6})")),
        Check::new("1/alpha <= 1.59", 1.0 / a <= 1.59, format!("1/alpha = {:.4}", 1.0 / a)),
    ]
}

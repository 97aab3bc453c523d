//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::{PI, TAU};
use std::time::{Duration, Instant};

use hyperlsh::experiments::{estimate_curve, pair_distances, rho_curve_results};
use hyperlsh::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Criterion = fn() -> Outcome;

struct Outcome {
    passed: bool,
    summary: String,
    notes: Vec<String>,
}

impl Outcome {
    fn new(passed: bool, summary: impl Into<String>) -> Self {
        Self { passed, summary: summary.into(), notes: Vec::new() }
    }
}

fn ln199() -> f64 {
    199f64.ln()
}

fn collision_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    let mut notes = Vec::new();
    for (k, &(r, radius)) in [(0.2, ln199()), (1.0, 3.0), (0.5, 2.0)].iter().enumerate() {
        let start = Instant::now();
        let x = PoincarePoint::origin(2).unwrap();
        let y = PoincarePoint::from_polar(&[0.6, 0.8], r).unwrap();
        let n = 1_000_000;
        let est = estimate_collision_mc(&x, &y, radius, n, &mut ChaCha8Rng::seed_from_u64(100 + k as u64)).unwrap();
        let p = collision_probability(r, radius).unwrap();
        let se = (p * (1.0 - p) / n as f64).sqrt();
        let z = (est - p).abs() / se;
        let elapsed = start.elapsed();
        ok &= z <= 3.0 && elapsed < Duration::from_secs(30);
        worst = worst.max(z);
        notes.push(format!("r={r}, R={radius:.4}: MC {est:.6} vs {p:.6}, |z|={z:.2}, {elapsed:.2?}"));
    }
    let mut out = Outcome::new(ok, format!("max |z| = {worst:.2} over 1e6 geodesics per configuration"));
    out.notes = notes;
    out
}

fn crofton_integral() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for r in [0.01, 0.1, 0.5, 1.0, 2.0, 5.0] {
        let v = separation_measure_quadrature(r).unwrap();
        worst = worst.max((v - 2.0 * r).abs());
    }
    let elapsed = start.elapsed();
    Outcome::new(
        worst <= 1e-8 && elapsed < Duration::from_secs(1),
        format!("max |measure - 2r| = {worst:.2e}, {elapsed:.2?}"),
    )
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64).collect()
}

fn rho_below_one_over_c() -> Outcome {
    let mut worst = f64::NEG_INFINITY;
    let mut evaluated = 0;
    for radius in grid(0.2, 6.0, 10) {
        let w = PI * radius.sinh();
        for c in grid(1.05, 20.0, 10) {
            for frac in grid(0.0, 1.0, 10) {
                // r spans (0, w / c)
                let r = frac * w / c;
                let rho = rho_exact(r, c, radius).unwrap();
                worst = worst.max(rho - 1.0 / c);
                evaluated += 1;
            }
        }
    }
    let mut limit: f64 = 0.0;
    for c in [1.1, 1.5, 2.0, 4.0, 10.0] {
        for radius in [0.5, 3.0, ln199()] {
            limit = limit.max((rho_exact(1e-9, c, radius).unwrap() - 1.0 / c).abs());
        }
    }
    Outcome::new(
        evaluated == 1000 && worst <= 1e-12 && limit <= 1e-6,
        format!("{evaluated} grid points, max rho - 1/c = {worst:.3e}; limit error {limit:.3e}"),
    )
}

fn rho_monotone() -> Outcome {
    let mut violations = 0;
    let radius = 3.0;
    let w = PI * f64::sinh(radius);
    for c in [1.5, 2.0, 4.0] {
        let values: Vec<f64> = grid(0.0, 1.0, 1000).iter().map(|f| rho_exact(f * w / c, c, radius).unwrap()).collect();
        violations += values.windows(2).filter(|p| p[1] >= p[0] || p[1].is_nan()).count();
    }
    Outcome::new(violations == 0, format!("{violations} non-decreasing steps over 3 x 1000 points (R = 3)"))
}

fn f_stretch() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut failures = 0;
    let mut expanding = 0;
    for _ in 0..100_000 {
        let z1 = (rng.random::<f64>() * 6.0 - 3.0).exp();
        let z2 = (rng.random::<f64>() * 6.0 - 3.0).exp();
        let r = rng.random::<f64>() * 20.0;
        let gamma = (rng.random::<f64>() * 6.0 - 3.0).exp();
        expanding += (gamma >= 1.0) as usize;
        if !check_f_stretch(z1, z2, r, gamma) {
            failures += 1;
        }
    }
    let elapsed = start.elapsed();
    Outcome::new(
        failures == 0 && elapsed < Duration::from_secs(5),
        format!("{failures} violations in 1e5 tuples ({expanding} with gamma >= 1), {elapsed:.2?}"),
    )
}

/// A half-space pair in `H^d` at distance exactly `r`, with heights `z1`,
/// `z2` and horizontal offset chosen to fit.
fn pair_at(d: usize, r: f64, z1: f64, z2: f64, rng: &mut ChaCha8Rng) -> (HalfSpacePoint, HalfSpacePoint) {
    let s2 = 2.0 * z1 * z2 * (r.cosh() - 1.0) - (z1 - z2).powi(2);
    assert!(s2 >= -1e-12, "heights {z1}, {z2} too far apart for r = {r}");
    let s = s2.max(0.0).sqrt();
    let dir: Vec<f64> = (0..d - 1).map(|_| rng.sample(StandardNormal)).collect();
    let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    let x1: Vec<f64> = (0..d - 1).map(|_| 0.1 * rng.sample::<f64, _>(StandardNormal)).collect();
    let x2: Vec<f64> = x1.iter().zip(&dir).map(|(a, u)| a + s * u / norm).collect();
    (HalfSpacePoint::new(z1, x1).unwrap(), HalfSpacePoint::new(z2, x2).unwrap())
}

fn hd_sandwich() -> Outcome {
    let d = 10;
    let radius = 5.0;
    let w = PI * f64::sinh(radius);
    let alpha = alpha_constant();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut pairs = Vec::new();
    for &r in &[0.5f64, 1.0, 2.0] {
        // one vertical pair, the rest mixed
        pairs.push((r, HalfSpacePoint::new(0.6, vec![0.0; d - 1]).unwrap(), HalfSpacePoint::new(0.6 * r.exp(), vec![0.0; d - 1]).unwrap()));
    }
    let rs = [0.5f64, 1.0, 2.0];
    while pairs.len() < 20 {
        let r = rs[pairs.len() % 3];
        let z1 = 0.7 + 0.7 * rng.random::<f64>();
        let z2 = (z1 * (1.0 + 0.6 * (rng.random::<f64>() - 0.5) * r.min(1.0))).max(0.5);
        let (p, q) = pair_at(d, r, z1, z2, &mut rng);
        pairs.push((r, p, q));
    }
    for (r, p, q) in &pairs {
        assert!((distance_halfspace(p, q).unwrap() - r).abs() < 1e-9);
    }
    let n = 100_000usize;
    let mut same = vec![0usize; pairs.len()];
    let mut clamped = 0usize;
    for _ in 0..n {
        let h = HdHasher::new(d, radius, &mut rng).unwrap();
        for (k, (_, p, q)) in pairs.iter().enumerate() {
            let (a, ca) = h.hash_flagged(p).unwrap();
            let (b, cb) = h.hash_flagged(q).unwrap();
            clamped += ca as usize + cb as usize;
            same[k] += (a == b) as usize;
        }
    }
    let mut inside = 0;
    let mut notes = Vec::new();
    for (k, (r, _, _)) in pairs.iter().enumerate() {
        let (lo, hi) = collision_bounds_hd(*r, radius).unwrap();
        let est = same[k] as f64 / n as f64;
        let se = (est * (1.0 - est) / n as f64).sqrt().max(1.0 / n as f64);
        let ok = est >= lo - 3.0 * se && est <= hi + 3.0 * se;
        inside += ok as usize;
        if !ok || k < 3 {
            notes.push(format!("pair {k} r={r}: p_hat {est:.5} band [{lo:.5}, {hi:.5}] se {se:.1e}"));
        }
    }
    let alpha_ok = alpha > 0.631 && alpha < 0.632 && 1.0 / alpha <= 1.59;
    let mut out = Outcome::new(
        inside == pairs.len() && alpha_ok,
        format!(
            "{inside}/{} pairs in band over 1e5 hashers in H^10 (R = {radius}, w = {w:.2}); alpha = {alpha:.6}, 1/alpha = {:.4}; {clamped} clamped evaluations",
            pairs.len(),
            1.0 / alpha
        ),
    );
    out.notes = notes;
    out
}

fn section6_reproduction() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    let start = Instant::now();
    let runs = [
        (2, RadialLaw::HyperbolicVolume),
        (2, RadialLaw::UniformRadius),
        (10, RadialLaw::UniformRadius),
        (100, RadialLaw::UniformRadius),
        (1000, RadialLaw::UniformRadius),
    ];
    for (d, law) in runs {
        let t = Instant::now();
        let mut cfg = ExperimentConfig::standard(d, 2024);
        cfg.radial = law;
        let results = rho_curve_results(&cfg).unwrap();
        let mut run_ok = results.len() == 18;
        let mut run_worst = f64::NEG_INFINITY;
        let mut near = 0;
        for res in &results {
            match res {
                Ok(e) => {
                    near = e.n_near_pairs;
                    run_worst = run_worst.max(e.rho_hat - 1.0 / e.c);
                    run_ok &= e.rho_hat < 1.0 / e.c;
                }
                Err(e) => {
                    run_ok = false;
                    notes.push(format!("d={d} {law:?}: {e}"));
                }
            }
        }
        worst = worst.max(run_worst);
        ok &= run_ok;
        notes.push(format!(
            "d={d} {law:?}: {} ({near} near pairs, max rho_hat - 1/c = {run_worst:.4}, {:.2?})",
            if run_ok { "all 18 below 1/c" } else { "FAILED" },
            t.elapsed()
        ));
    }
    // the volume-uniform law leaves no pair within r once d >= 10
    for d in [10, 100] {
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        let pts = sample_uniform_ball(d, ln199(), 1000, &mut rng).unwrap();
        let pairs = pair_distances(&pts);
        let near = pairs.iter().filter(|p| p.2 <= 0.2).count();
        let min = pairs.iter().map(|p| p.2).fold(f64::INFINITY, f64::min);
        notes.push(format!(
            "d={d} HyperbolicVolume: {near} pairs within r (closest pair at {min:.3}); rho_hat undefined, radii drawn uniformly instead"
        ));
    }
    let elapsed = start.elapsed();
    ok &= elapsed < Duration::from_secs(40 * 60);
    let mut out = Outcome::new(ok, format!("max rho_hat - 1/c = {worst:.4} over all runs, {elapsed:.2?}"));
    out.notes = notes;
    out
}

fn boundary_pairs() -> Outcome {
    let radius = ln199();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let pts = sample_uniform_ball(2, radius, 2000, &mut rng).unwrap();
    let cs: Vec<f64> = (2..=10).map(f64::from).collect();
    let reps = 100_000;
    let results: Vec<RhoEstimate> = estimate_curve(&pts, 0.2, &cs, SamplerRadius::Fixed(radius), PairSelection::Boundary, reps, &mut rng)
        .unwrap()
        .into_iter()
        .map(|r| r.unwrap())
        .collect();
    let mut ok = true;
    let mut notes = Vec::new();
    for e in &results {
        if [2.0, 5.0, 10.0].contains(&e.c) {
            let exact = rho_exact(0.2, e.c, radius).unwrap();
            let rel = (e.rho_hat - exact).abs() / exact;
            ok &= rel <= 0.15;
            notes.push(format!(
                "c={}: rho_hat {:.4} vs rho_exact {exact:.4} (rel {rel:.3}), {} near / {} far pairs",
                e.c, e.rho_hat, e.n_near_pairs, e.n_far_pairs
            ));
        }
    }
    // least squares of p2_hat on c
    let n = results.len() as f64;
    let mx = results.iter().map(|e| e.c).sum::<f64>() / n;
    let my = results.iter().map(|e| e.p2_hat).sum::<f64>() / n;
    let sxy: f64 = results.iter().map(|e| (e.c - mx) * (e.p2_hat - my)).sum();
    let sxx: f64 = results.iter().map(|e| (e.c - mx).powi(2)).sum();
    let syy: f64 = results.iter().map(|e| (e.p2_hat - my).powi(2)).sum();
    let r2 = sxy * sxy / (sxx * syy);
    let slope = sxy / sxx;
    ok &= r2 > 0.95 && slope < 0.0;
    let mut out = Outcome::new(ok, format!("p2_hat vs c over c=2..10: slope {slope:.3e}, R^2 = {r2:.5}; {reps} hash functions"));
    out.notes = notes;
    out
}

fn hamming_sandwich() -> Outcome {
    let start = Instant::now();
    let cube = hyperlsh::lowerbound::hamming_cube(8);
    let mut bad = 0;
    let mut pairs = 0;
    for eps in [0.1f64, 0.5, 0.9] {
        let emb = HammingEmbedding::new(8, (8.0 / (2.0 * eps)).sqrt(), eps).unwrap();
        for i in 0..cube.len() {
            for j in i + 1..cube.len() {
                pairs += 1;
                bad += !emb.verify_sandwich(&cube[i], &cube[j]) as usize;
            }
        }
    }
    let mut disorder = 0;
    for i in 0..1000 {
        let x = (i as f64 + 0.5) / 1000.0;
        let (lo, mid, hi) = puiseux_sandwich(x).unwrap();
        disorder += !(lo <= mid && mid <= hi) as usize;
    }
    let elapsed = start.elapsed();
    Outcome::new(
        bad == 0 && disorder == 0 && elapsed < Duration::from_secs(10),
        format!("{bad} of {pairs} cube pairs violate the sandwich; {disorder} of 1000 Puiseux points out of order; {elapsed:.2?}"),
    )
}

fn model_isometry() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut worst: f64 = 0.0;
    let random_point = |rng: &mut ChaCha8Rng, d: usize| {
        let dir: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let dir: Vec<f64> = dir.iter().map(|v| v / norm).collect();
        PoincarePoint::from_polar(&dir, ln199() * rng.random::<f64>()).unwrap()
    };
    for k in 0..10_000 {
        let d = 2 + k % 5;
        let u = random_point(&mut rng, d);
        let v = random_point(&mut rng, d);
        let db = distance_poincare(&u, &v).unwrap();
        let dh = distance_halfspace(&poincare_to_halfspace(&u).unwrap(), &poincare_to_halfspace(&v).unwrap()).unwrap();
        let dm = distance_hyperboloid(&poincare_to_hyperboloid(&u), &poincare_to_hyperboloid(&v)).unwrap();
        worst = worst.max((db - dh).abs()).max((db - dm).abs()).max((dh - dm).abs());
    }
    Outcome::new(worst <= 1e-9, format!("max pairwise model disagreement {worst:.2e} over 1e4 pairs, d in 2..=6"))
}

fn ann_end_to_end() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (r, c) = (0.2, 2.5);
    let pts = sample_uniform_ball(2, ln199(), 1000, &mut rng).unwrap();
    let data: Vec<Point> = pts.iter().cloned().map(Point::from).collect();
    let idx = LshIndex::build(data.clone(), r, c, &mut rng, None).unwrap();
    let params = idx.params();
    let mut found = 0;
    let mut violations = 0;
    for _ in 0..200 {
        let i = rng.random_range(0..pts.len());
        let a = TAU * rng.random::<f64>();
        let dist = r * (1.0 - rng.random::<f64>());
        let q: Point = pts[i].offset(&[a.cos(), a.sin()], dist).unwrap().into();
        let (_, oracle) = brute_force_nn(&data, &q).unwrap();
        assert!(oracle <= r + 1e-12);
        if let Some((id, d)) = idx.query(&q, idx.default_budget()).unwrap() {
            let check = q.distance(&data[id as usize]).unwrap();
            if check > c * r || (check - d).abs() > 1e-12 {
                violations += 1;
            } else {
                found += 1;
            }
        }
    }
    let recall = found as f64 / 200.0;
    let elapsed = start.elapsed();
    Outcome::new(
        recall >= 0.9 && violations == 0 && elapsed < Duration::from_secs(60),
        format!(
            "recall {recall:.3} over 200 planted queries (K = {}, L = {}), {violations} answers beyond c r, {elapsed:.2?}",
            params.k, params.l
        ),
    )
}

fn main() {
    let criteria: [(&str, Criterion); 11] = [
        ("collision closed form", collision_closed_form),
        ("Crofton integral", crofton_integral),
        ("rho <= 1/c", rho_below_one_over_c),
        ("rho monotone in r", rho_monotone),
        ("F stretch", f_stretch),
        ("H^d collision band", hd_sandwich),
        ("rho curves below 1/c", section6_reproduction),
        ("boundary pairs", boundary_pairs),
        ("Hamming sandwich", hamming_sandwich),
        ("model isometry", model_isometry),
        ("ANN end to end", ann_end_to_end),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let tag = if out.passed { "PASS" } else { "FAIL" };
        failed += !out.passed as usize;
        println!("{tag} criterion {} ({name}): {}", k + 1, out.summary);
        for n in &out.notes {
            println!("     {n}");
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

use std::process::ExitCode;
use std::time::{Duration, Instant};

use cbnorm_core::dilation::{compress_12, dilate};
use cbnorm_core::embedding::{
    abelian_embed, embed, pairing, preadjoint, random_characters, truncated_sd_norm,
    EmbeddingSample, TraceClassTuple,
};
use cbnorm_core::experiments::{cb_gap_experiment, embedding_convergence_experiment};
use cbnorm_core::linalg::{ginibre, operator_norm, ComplexMatrix, C64};
use cbnorm_core::norms::{
    ball_level_norm, dilated_value, maxl1_level_norm, pisier_bound, torus_grid_search,
};
use cbnorm_core::{AtomicMeasure, MatrixMeasure, OptimizerConfig, Result, Seed, Witness};
use rand::Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn random_contraction(n: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let g = ginibre(n, n, rng);
    let r: f64 = rng.random_range(0.05..0.999);
    let s = operator_norm(&g);
    g.scale_real(r / s)
}

fn pisier() -> Result<Outcome> {
    let a = pisier_bound(2)?;
    let b = pisier_bound(5)?;
    let c = pisier_bound(10)?;
    let pass = a == 1.0 && b == 1.25 && (c - 5.0 / 3.0).abs() <= 1e-9;
    outcome(pass, format!("n=2 -> {a}, n=5 -> {b}, n=10 -> {c:.10}"))
}

fn dilation_suite() -> Result<Outcome> {
    let mut rng = Seed(2).rng();
    let mut worst = 0.0f64;
    let mut exact = true;
    for i in 0..100 {
        let n = 1 + i % 8;
        let a = random_contraction(n, &mut rng);
        let d = dilate(&a)?;
        worst = worst.max(d.unitarity_residual());
        exact &= compress_12(&d.result)? == a;
    }
    outcome(
        worst <= 1e-9 && exact,
        format!("max residual {worst:.2e}, round-trip exact: {exact}"),
    )
}

fn dilation_mechanization() -> Result<Outcome> {
    let cfg = OptimizerConfig::default();
    let mut rng = Seed(3).rng();
    let mut worst_loss = f64::NEG_INFINITY;
    let mut worst_excess = f64::NEG_INFINITY;
    for i in 0..50u64 {
        let p = rng.random_range(1..=3);
        let m = rng.random_range(1..=3);
        let n = rng.random_range(1..=2);
        let mu = MatrixMeasure::gaussian(p, m, Seed(3).split(i))?;
        let ball = ball_level_norm(&mu, n, &cfg, Seed(i))?;
        let Witness::Contractions(v) = &ball.witness else {
            return outcome(
                false,
                format!("instance {i}: ball witness is not a contraction tuple"),
            );
        };
        let (dilated, _) = dilated_value(&mu, v)?;
        let max = maxl1_level_norm(&mu, n, &cfg, Seed(i))?;
        worst_loss = worst_loss.max(ball.value - dilated);
        worst_excess = worst_excess.max(max.value - ball.value);
    }
    outcome(
        worst_loss <= 1e-8 && worst_excess <= 1e-8,
        format!("max(ball - dilated) = {worst_loss:.2e}, max(maxl1 - ball) = {worst_excess:.2e}"),
    )
}

fn oracle_equivalence() -> Result<Outcome> {
    let cfg = OptimizerConfig::default();
    let mut worst = 0.0f64;
    for i in 0..20u64 {
        let m = 1 + (i % 2) as usize;
        let mu = MatrixMeasure::gaussian(1, m, Seed(4).split(i))?;
        let est = maxl1_level_norm(&mu, 1, &cfg, Seed(i))?;
        let (grid, _) = torus_grid_search(&mu, 1024);
        worst = worst.max((est.value - grid).abs());
    }
    outcome(worst <= 1e-3, format!("max |ascent - grid| = {worst:.2e}"))
}

fn embedding_suite() -> Result<Outcome> {
    let mut point_residual = 0.0f64;
    let mut duality = 0.0f64;
    let mut monotone = true;
    let mut rng = Seed(5).rng();

    let sample = EmbeddingSample::default_for(3, Seed(5))?;
    for k in 0..3 {
        for b in embed(&sample, &MatrixMeasure::point_mass(3, k)?)?.blocks {
            point_residual = point_residual.max(b.unitarity_residual());
        }
    }

    for i in 0..100u64 {
        let m = rng.random_range(1..=4);
        let sample = EmbeddingSample::with_levels(m, &[1, 2, 3], 3, Seed(5).split(i))?;
        let mu = MatrixMeasure::gaussian(1, m, Seed(6).split(i))?;
        let s = TraceClassTuple {
            entries: sample
                .items()
                .iter()
                .map(|u| ginibre(u.n(), u.n(), &mut rng))
                .collect(),
        };
        let lhs = pairing(&embed(&sample, &mu)?, &s)?;
        let rhs: C64 = mu
            .coeffs()
            .iter()
            .zip(preadjoint(&sample, &s)?)
            .map(|(c, h)| c[(0, 0)] * h)
            .sum();
        duality = duality.max((lhs - rhs).norm());
    }

    for i in 0..20u64 {
        let m = rng.random_range(1..=3);
        let p = rng.random_range(1..=2);
        let sample = EmbeddingSample::default_for(m, Seed(7).split(i))?;
        let mu = MatrixMeasure::gaussian(p, m, Seed(8).split(i))?;
        let mut sizes: Vec<usize> = (0..6).map(|_| rng.random_range(1..=sample.len())).collect();
        sizes.sort_unstable();
        let mut prev = f64::NEG_INFINITY;
        for len in sizes {
            let v = truncated_sd_norm(&sample.prefix(len)?, &mu)?;
            monotone &= v >= prev;
            prev = v;
        }
    }

    outcome(
        point_residual <= 1e-9 && duality <= 1e-10 && monotone,
        format!(
            "point-mass residual {point_residual:.2e}, duality error {duality:.2e}, monotone: {monotone}"
        ),
    )
}

fn abelian() -> Result<Outcome> {
    let mut rng = Seed(9).rng();
    let mut worst = 0.0f64;
    for i in 0..50u64 {
        let m = rng.random_range(1..=12);
        let atoms: Vec<C64> = ginibre(m, 1, &mut rng).into_vec();
        let mu = AtomicMeasure::new(atoms)?;
        let tv = mu.total_variation();
        let mut chars = random_characters(m, 64, Seed(9).split(i));
        let first = abelian_embed(&mu, &chars)?;
        chars.push(first.optimal_character.clone());
        let e = abelian_embed(&mu, &chars)?;
        let at_optimum = e.values.last().map(|v| v.norm()).unwrap_or(0.0);
        worst = worst.max((e.sup - tv).abs()).max((at_optimum - tv).abs());
    }
    outcome(worst <= 1e-12, format!("max |sup - TV| = {worst:.2e}"))
}

fn cb_gap() -> Result<Outcome> {
    let cfg = OptimizerConfig::default();
    let small = cb_gap_experiment(4, 4, 20, 4, &cfg, Seed(1))?;
    small.recertify()?;
    let floor_ok = small.trials.iter().all(|t| t.max_norm >= 4.0 - 1e-9);
    let large = cb_gap_experiment(9, 9, 5, 9, &cfg, Seed(1))?;
    large.recertify()?;
    let floor_large = large.trials.iter().all(|t| t.max_norm >= 9.0 - 1e-9);
    let r4 = small.summary.mean_ratio;
    let r9 = large.summary.mean_ratio;
    outcome(
        floor_ok && floor_large && r4 > 1.05 && r9 > r4,
        format!(
            "floors hold: {}, mean ratio n=4: {r4:.4}, n=9: {r9:.4}",
            floor_ok && floor_large
        ),
    )
}

fn zero_clock(mut v: serde_json::Value) -> String {
    if let Some(obj) = v.as_object_mut() {
        obj.insert("wall_clock_s".into(), serde_json::json!(0.0));
    }
    serde_json::to_string(&v).unwrap_or_default()
}

fn determinism() -> Result<Outcome> {
    let cfg = OptimizerConfig {
        restarts: 4,
        ..OptimizerConfig::default()
    };
    let gap = || -> Result<String> {
        Ok(zero_clock(serde_json::to_value(cb_gap_experiment(
            3,
            3,
            3,
            3,
            &cfg,
            Seed(11),
        )?)?))
    };
    let conv = || -> Result<String> {
        Ok(zero_clock(serde_json::to_value(
            embedding_convergence_experiment(3, 1, &[1, 17, 33], &cfg, Seed(12))?,
        )?))
    };
    let norm = || -> Result<String> {
        let mu = MatrixMeasure::gaussian(2, 3, Seed(13))?;
        Ok(serde_json::to_string(&ball_level_norm(
            &mu,
            2,
            &cfg,
            Seed(14),
        )?)?)
    };
    let same_gap = gap()? == gap()?;
    let same_conv = conv()? == conv()?;
    let same_norm = norm()? == norm()?;
    outcome(
        same_gap && same_conv && same_norm,
        format!("cb-gap: {same_gap}, convergence: {same_conv}, ball norm: {same_norm}"),
    )
}

type Criterion = (&'static str, fn() -> Result<Outcome>, Duration);

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("pisier bound", pisier, Duration::from_millis(1)),
        ("dilation suite", dilation_suite, Duration::from_secs(1)),
        (
            "dilation never loses value",
            dilation_mechanization,
            Duration::from_secs(120),
        ),
        (
            "oracle equivalence at level 1",
            oracle_equivalence,
            Duration::from_secs(30),
        ),
        ("embedding suite", embedding_suite, Duration::from_secs(60)),
        ("abelian embedding", abelian, Duration::from_secs(1)),
        ("cb-gap growth", cb_gap, Duration::from_secs(600)),
        ("determinism", determinism, Duration::from_secs(600)),
    ];
    let mut failures = 0;
    for (i, (name, check, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let elapsed = start.elapsed();
        let (pass, detail) = match result {
            Ok(o) => (o.pass && elapsed < *budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !pass {
            failures += 1;
        }
        println!(
            "criterion {}: {} {name} ({detail}; {:.3}s of {:.3}s budget)",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            budget.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance suite: one `[PASS]`/`[FAIL]` line per criterion.

use std::process::Command;
use std::time::{Duration, Instant};

use hypdeloc::bounds::{volume_bound, DelocInput, Mode};
use hypdeloc::fuchsian::{
    builtin_group, count_ball, cyclic_count_oracle, cyclic_group, enumerate_ball, C0Rule, EnumerateOptions,
    GeometryParams, GroupPresentation, WordTable, DEFAULT_FRONTIER_CAP,
};
use hypdeloc::geometry::Point;
use hypdeloc::quadrature::QuadConfig;
use hypdeloc::verify::{
    c0_grid, check_c0_inequality, check_counting_bounds, check_fejer_identity, check_geometric_series,
    check_multiplier_forms, check_selberg_round_trips, check_spectral_action, check_tanh_claim, check_technical_lemma,
    geometric_series_grid, tanh_claim_grid, technical_lemma_grid, CheckReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

const SEED: u64 = 20240601;

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

fn from_reports(reports: &[CheckReport]) -> Outcome {
    let summary: Vec<String> = reports
        .iter()
        .map(|r| format!("{} min_slack={:.3e} status={:?}", r.check, r.min_slack, r.status))
        .collect();
    if reports.iter().all(|r| r.pass) {
        Ok(summary.join("; "))
    } else {
        Err(summary.join("; "))
    }
}

fn within(elapsed: Duration, limit_s: f64, label: &str) -> Outcome {
    if elapsed.as_secs_f64() < limit_s {
        Ok(String::new())
    } else {
        Err(format!(
            "{label} took {:.1} s, limit {limit_s} s",
            elapsed.as_secs_f64()
        ))
    }
}

fn timed(limit_s: Option<f64>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let out = f()?;
    let elapsed = start.elapsed();
    if let Some(limit) = limit_s {
        within(elapsed, limit, "run")?;
    }
    Ok(format!("{out} ({:.2} s)", elapsed.as_secs_f64()))
}

fn criterion_1() -> Outcome {
    timed(Some(5.0), || {
        let rep = check_fejer_identity(64, 10_000).map_err(|e| e.to_string())?;
        from_reports(&[rep])
    })
}

fn criterion_2() -> Outcome {
    timed(Some(5.0), || {
        from_reports(&[check_multiplier_forms(SEED, 500).map_err(|e| e.to_string())?])
    })
}

fn criterion_3() -> Outcome {
    timed(None, || {
        from_reports(&[check_spectral_action(SEED, 500, 200).map_err(|e| e.to_string())?])
    })
}

fn criterion_4() -> Outcome {
    timed(Some(60.0), || {
        let rep = check_selberg_round_trips(&QuadConfig::default()).map_err(|e| e.to_string())?;
        from_reports(&[rep])
    })
}

fn pruned_vs_brute(
    group: &GroupPresentation,
    tables: &(WordTable, WordTable),
    z: Point,
    w: Point,
    r: f64,
) -> Result<usize, String> {
    let pruned = enumerate_ball(group, z, w, r, &EnumerateOptions::default()).map_err(|e| e.to_string())?;
    let short = tables.0.ball(z, w, r);
    let long = tables.1.ball(z, w, r);
    if short.len() != long.len() {
        return Err(format!(
            "{}: brute search not saturated at z={z:?} w={w:?} r={r}",
            group.name
        ));
    }
    if pruned.len() != long.len() {
        return Err(format!(
            "{}: pruned {} vs brute {} at z={z:?} w={w:?} r={r}",
            group.name,
            pruned.len(),
            long.len()
        ));
    }
    for (p, b) in pruned.iter().zip(&long) {
        if !p.element.matrix.approx_eq(&b.element.matrix, 1e-8) {
            return Err(format!("{}: element lists differ at r={r}", group.name));
        }
    }
    Ok(pruned.len())
}

fn criterion_5() -> Outcome {
    timed(Some(120.0), || {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        let cyclic = builtin_group("cyclic").ok_or("missing cyclic")?;
        let pingpong = builtin_group("pingpong").ok_or("missing pingpong")?;
        let build = |g: &GroupPresentation, a: usize, b: usize| -> Result<(WordTable, WordTable), String> {
            Ok((
                WordTable::build(g, a, DEFAULT_FRONTIER_CAP).map_err(|e| e.to_string())?,
                WordTable::build(g, b, DEFAULT_FRONTIER_CAP).map_err(|e| e.to_string())?,
            ))
        };
        let cyclic_tables = build(&cyclic, 24, 30)?;
        let pingpong_tables = build(&pingpong, 8, 10)?;
        let mut total = 0;
        for _ in 0..50 {
            let z = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.6)).map_err(|e| e.to_string())?;
            let w = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.6)).map_err(|e| e.to_string())?;
            let r = rng.gen_range(0.0..=4.0);
            total += pruned_vs_brute(&cyclic, &cyclic_tables, z, w, r)?;
            total += pruned_vs_brute(&pingpong, &pingpong_tables, z, w, r)?;
        }
        for _ in 0..50 {
            let ell = rng.gen_range(0.3..2.0);
            let y = rng.gen_range(0.5..2.0);
            let r = rng.gen_range(0.0..=4.0);
            let p = Point::new(0.0, y).map_err(|e| e.to_string())?;
            let count = count_ball(&cyclic_group(ell), p, p, r).map_err(|e| e.to_string())?;
            let expect = cyclic_count_oracle(ell, r);
            if count != expect {
                return Err(format!("cyclic ell={ell} r={r}: {count} vs 1+2floor(r/ell) = {expect}"));
            }
        }
        Ok(format!(
            "100 pruned/brute instances ({total} elements), 50 cyclic oracle instances"
        ))
    })
}

fn criterion_6() -> Outcome {
    timed(None, || {
        from_reports(&[check_counting_bounds(SEED).map_err(|e| e.to_string())?])
    })
}

fn criterion_7() -> Outcome {
    timed(Some(120.0), || {
        let cfg = QuadConfig::default();
        let mut reports = Vec::new();
        for sigma in [0.01, 0.04, 0.09] {
            reports.push(
                check_technical_lemma(sigma, &technical_lemma_grid(sigma, 200), &cfg).map_err(|e| e.to_string())?,
            );
        }
        reports.push(check_tanh_claim(&tanh_claim_grid(200)).map_err(|e| e.to_string())?);
        reports.push(check_c0_inequality(&c0_grid(200)).map_err(|e| e.to_string())?);
        reports.push(check_geometric_series(&geometric_series_grid(200)).map_err(|e| e.to_string())?);
        from_reports(&reports)
    })
}

fn params(r: f64, cx: f64) -> GeometryParams {
    GeometryParams {
        r,
        cx,
        injrad: 1.0 / cx,
        l: 4.0 * r,
        c0: C0Rule::TangleFree,
        default_delta: 0.005,
    }
}

fn below(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

/// Direct transcription of the tempered formulas, kept free of library helpers.
fn transcribed_tempered(eps: f64, lam: f64, r_big: f64, cx: f64, delta: f64) -> (u64, u64, f64, f64) {
    let s = (lam - 0.25).sqrt();
    let ch = (std::f64::consts::PI * s / 2.0).cosh();
    let n = (8.0 * ch / eps).floor() as u64;
    let r = (r_big / (8.0 * n as f64)).ceil() as u64;
    let c0 = 3.0 * (1.0 / delta).exp();
    let a = 2.0 * c0 * (1.0 + (0.5 - delta).exp());
    let value = eps / (a * cx) * ((0.5 - delta) * r as f64).exp();
    (n, r, 1.0 / (256.0 * ch), value)
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn criterion_8() -> Outcome {
    timed(None, || {
        let input = |eps: f64, lam: f64, r: f64, cx: f64| DelocInput {
            eps,
            lam,
            sigma: None,
            params: params(r, cx),
            delta: Some(0.005),
        };
        let rep = volume_bound(&input(1.0, 0.25, 64.0, 1.0)).map_err(|e| e.to_string())?;
        if rep.n != Some(8) || rep.r != Some(1) || rep.d_lam != Some(1.0 / 256.0) || !rep.valid {
            return Err(format!(
                "instance: N={:?} r={:?} d={:?} valid={}",
                rep.n, rep.r, rep.d_lam, rep.valid
            ));
        }
        let flipped = volume_bound(&input(1.0, 0.25, below(64.0), 1.0)).map_err(|e| e.to_string())?;
        if flipped.valid {
            return Err("R just below 64 still valid".into());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 8);
        let mut worst = 0.0f64;
        for _ in 0..20 {
            let eps = rng.gen_range(0.05..=1.0);
            let lam = rng.gen_range(0.25..4.0);
            let cx = rng.gen_range(1.0..5.0);
            let ch = (std::f64::consts::PI * (lam - 0.25f64).sqrt() / 2.0).cosh();
            let r_big = 64.0 * ch / eps * rng.gen_range(1.0..3.0);
            let rep = volume_bound(&input(eps, lam, r_big, cx)).map_err(|e| e.to_string())?;
            let (n, r, d, value) = transcribed_tempered(eps, lam, r_big, cx, 0.005);
            if !rep.valid || rep.n != Some(n) || rep.r != Some(r) {
                return Err(format!("eps={eps} lam={lam} R={r_big}: N/r/validity mismatch"));
            }
            worst = worst
                .max(rel(rep.d_lam.unwrap_or(f64::NAN), d))
                .max(rel(rep.formula_value, value));
        }
        if worst > 1e-12 {
            return Err(format!("transcription mismatch {worst:e}"));
        }
        Ok(format!(
            "N=8 r=1 d=1/256 valid; flip at 64 exact; cross-check max rel {worst:.1e}"
        ))
    })
}

fn criterion_9() -> Outcome {
    timed(None, || {
        let sigma = 0.04f64;
        let input = |r: f64| DelocInput {
            eps: 1.0,
            lam: 0.1,
            sigma: Some(sigma),
            params: params(r, 1.0),
            delta: None,
        };
        let rep = volume_bound(&input(100.0)).map_err(|e| e.to_string())?;
        if rep.mode != Mode::Untempered || !rep.valid {
            return Err("untempered instance at R=100 invalid".into());
        }
        let log_threshold = rep
            .hypotheses
            .iter()
            .find(|h| h.name.contains("log"))
            .map(|h| h.required)
            .ok_or("log threshold missing")?;
        if rel(log_threshold, 10.0 * 4f64.ln()) > 1e-12 {
            return Err(format!("log threshold {log_threshold} vs 10 log 4"));
        }
        let t_max = rep.hypotheses.iter().map(|h| h.required).fold(f64::MIN, f64::max);
        let at = volume_bound(&input(t_max)).map_err(|e| e.to_string())?;
        let just_below = volume_bound(&input(below(t_max))).map_err(|e| e.to_string())?;
        if !at.valid || just_below.valid {
            return Err(format!("no exact flip at {t_max}"));
        }
        let mid = volume_bound(&input(0.5 * (10.0 * 4f64.ln() + t_max))).map_err(|e| e.to_string())?;
        if mid.valid {
            return Err("valid between the log threshold and t*".into());
        }
        let mut worst = 0.0f64;
        for r in [t_max, 70.0, 100.0, 200.0] {
            let rep = volume_bound(&input(r)).map_err(|e| e.to_string())?;
            let expect = 1.0 / (3.0 * 4f64.exp()) * ((0.25 + sigma.sqrt() / 2.0) * r).exp();
            worst = worst.max(rel(rep.formula_value, expect));
        }
        if worst > 1e-12 {
            return Err(format!("bound value mismatch {worst:e}"));
        }
        Ok(format!(
            "log threshold 10 log 4, flip at max threshold {t_max:.6}, value rel err {worst:.1e}"
        ))
    })
}

fn strip_volatile(mut v: Value) -> Value {
    if let Some(obj) = v.as_object_mut() {
        obj.remove("threads");
        obj.remove("generated_at");
    }
    v
}

fn run_verify(threads: &str) -> Result<Value, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_hypdeloc"))
        .args(["--threads", threads, "--no-timestamps", "--seed", "3", "verify-lemmas"])
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "threads={threads}: exit {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())
}

fn criterion_10() -> Outcome {
    timed(None, || {
        let one = strip_volatile(run_verify("1")?);
        let four = strip_volatile(run_verify("4")?);
        if one != four {
            return Err("reports differ between 1 and 4 threads".into());
        }
        Ok("verify-lemmas reports identical for 1 and 4 threads".into())
    })
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("Fejer identity", criterion_1),
        ("multiplier form equivalence", criterion_2),
        ("spectral-action bounds", criterion_3),
        ("Selberg round trip", criterion_4),
        ("lattice-count oracle equivalence", criterion_5),
        ("counting bound", criterion_6),
        ("inequality certification", criterion_7),
        ("bound-calculator exactness", criterion_8),
        ("untempered bound thresholds", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("[PASS] criterion {} {name}: {msg}", i + 1),
            Err(msg) => {
                failed += 1;
                println!("[FAIL] criterion {} {name}: {msg}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

//! Grid certification of the inequalities behind the bounds, and of the
//! cross-module identities the calculators rely on.
//!
//! Every check sweeps a fixed grid, records the smallest slack
//! `LHS − RHS` of an inequality `LHS >= RHS` and where it occurs. A check
//! passes when that slack is at least `-1e-10`. When a violation could be an
//! artefact of quadrature error the check is reported as inconclusive.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{builtin_group, params_from_hints, verify_counting_bound, EnumerateOptions, BUILTIN_GROUPS};
use crate::geometry::Point;
use crate::multipliers::{
    fejer, fejer_cosine_form, fejer_sine_form, spectral_parameter, tempered_threshold, w_diagonal_lower_bound,
    w_multiplier_direct, w_multiplier_fejer, WaveMultiplierSpec,
};
use crate::quadrature::QuadConfig;
use crate::selberg::{
    ball_profile_integral, inverse_selberg, normalized_ball_transform, selberg_transform, InverseOptions, RadialKernel,
    SpectralFunction, SpectralPoint,
};

/// Smallest slack accepted as a pass.
pub const SLACK_TOL: f64 = -1e-10;

/// A sampled interval; open ends are inset by half a step.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub open_lo: bool,
    pub open_hi: bool,
}

impl Axis {
    pub fn closed(lo: f64, hi: f64, points: usize) -> Self {
        Axis {
            lo,
            hi,
            points,
            open_lo: false,
            open_hi: false,
        }
    }

    pub fn open(lo: f64, hi: f64, points: usize) -> Self {
        Axis {
            lo,
            hi,
            points,
            open_lo: true,
            open_hi: true,
        }
    }

    /// Open at the lower end, closed at the upper.
    pub fn left_open(lo: f64, hi: f64, points: usize) -> Self {
        Axis {
            lo,
            hi,
            points,
            open_lo: true,
            open_hi: false,
        }
    }

    pub fn validate(&self, name: &str) -> Result<()> {
        if self.points == 0 || !(self.hi > self.lo) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::invalid(
                name,
                format!("empty range [{}, {}] with {} points", self.lo, self.hi, self.points),
            ));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.points == 1 {
            return vec![0.5 * (self.lo + self.hi)];
        }
        let off_lo = if self.open_lo { 0.5 } else { 0.0 };
        let off_hi = if self.open_hi { 0.5 } else { 0.0 };
        let step = (self.hi - self.lo) / ((self.points - 1) as f64 + off_lo + off_hi);
        (0..self.points)
            .map(|i| {
                if i + 1 == self.points && !self.open_hi {
                    self.hi
                } else {
                    self.lo + (off_lo + i as f64) * step
                }
            })
            .collect()
    }
}

/// Two named axes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub x_name: String,
    pub x: Axis,
    pub y_name: String,
    pub y: Axis,
}

impl GridSpec {
    pub fn new(x_name: &str, x: Axis, y_name: &str, y: Axis) -> Self {
        GridSpec {
            x_name: x_name.into(),
            x,
            y_name: y_name.into(),
            y,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.x.validate(&self.x_name)?;
        self.y.validate(&self.y_name)
    }

    fn points(&self) -> Vec<(f64, f64)> {
        let ys = self.y.values();
        self.x
            .values()
            .into_iter()
            .flat_map(|x| ys.iter().map(move |&y| (x, y)))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckStatus {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub check: String,
    pub grid_points: usize,
    pub min_slack: f64,
    pub worst_point: BTreeMap<String, f64>,
    /// Points where quadrature could not decide the sign of the slack.
    pub inconclusive_points: usize,
    pub status: CheckStatus,
    pub pass: bool,
    /// Auxiliary quantities recorded for regression tracking.
    pub details: BTreeMap<String, f64>,
    pub notes: Vec<String>,
}

/// Outcome at one grid point.
#[derive(Clone, Copy, Debug)]
enum Sample {
    Value { slack: f64, error: f64 },
    Undecided,
}

impl Sample {
    fn exact(slack: f64) -> Self {
        Sample::Value { slack, error: 0.0 }
    }
}

/// Folds per-point samples in grid order into a report.
fn summarize(check: &str, names: &[&str], points: &[Vec<f64>], samples: &[Sample]) -> CheckReport {
    let mut min_slack = f64::INFINITY;
    let mut worst = 0usize;
    let mut inconclusive = 0usize;
    let mut failed = false;
    for (i, s) in samples.iter().enumerate() {
        match *s {
            Sample::Value { slack, error } => {
                if slack < min_slack || (slack.is_nan() && !min_slack.is_nan()) {
                    min_slack = slack;
                    worst = i;
                }
                if !(slack >= SLACK_TOL) {
                    if slack.is_finite() && slack + error >= SLACK_TOL {
                        inconclusive += 1;
                    } else {
                        failed = true;
                    }
                }
            }
            Sample::Undecided => inconclusive += 1,
        }
    }
    let status = if failed {
        CheckStatus::Fail
    } else if inconclusive > 0 {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Pass
    };
    let worst_point = points
        .get(worst)
        .map(|p| names.iter().map(|n| n.to_string()).zip(p.iter().copied()).collect())
        .unwrap_or_default();
    CheckReport {
        check: check.into(),
        grid_points: samples.len(),
        min_slack,
        worst_point,
        inconclusive_points: inconclusive,
        status,
        pass: status == CheckStatus::Pass,
        details: BTreeMap::new(),
        notes: Vec::new(),
    }
}

fn pairs_to_rows(points: &[(f64, f64)]) -> Vec<Vec<f64>> {
    points.iter().map(|&(x, y)| vec![x, y]).collect()
}

/// Default grid for the technical lemma: `a ∈ (√σ, 1/2)`, `R ∈ [2, 20]`.
pub fn technical_lemma_grid(sigma: f64, points: usize) -> GridSpec {
    GridSpec::new(
        "a",
        Axis::open(sigma.sqrt(), 0.5, points),
        "R",
        Axis::closed(2.0, 20.0, points),
    )
}

/// `∫_0^R cosh(au) √(1 − cosh u / cosh R) du >= sinh(√σ R) / 3` for `a > √σ`, `R >= 2`.
pub fn check_technical_lemma(sigma: f64, grid: &GridSpec, cfg: &QuadConfig) -> Result<CheckReport> {
    if !(sigma > 0.0 && sigma < 0.25) {
        return Err(Error::invalid("sigma", "must lie in (0, 1/4)"));
    }
    grid.validate()?;
    cfg.validate()?;
    let points = grid.points();
    let rs = sigma.sqrt();
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|&(a, r)| match ball_profile_integral(r, SpectralPoint::Imag(a), cfg) {
            Ok(i) => Sample::Value {
                slack: i.value - (rs * r).sinh() / 3.0,
                error: i.abs_error,
            },
            Err(Error::QuadratureNonConvergence { .. }) => Sample::Undecided,
            Err(_) => Sample::Undecided,
        })
        .collect();
    let mut rep = summarize(
        &format!("technical_lemma(sigma={sigma})"),
        &["a", "R"],
        &pairs_to_rows(&points),
        &samples,
    );
    rep.details.insert("sigma".into(), sigma);
    rep.details
        .insert("tempered_threshold".into(), tempered_threshold(sigma)?);
    if rep.inconclusive_points > 0 {
        rep.notes
            .push("some points did not meet the quadrature tolerance; not counted as violations".into());
    }
    Ok(rep)
}

/// `f(x, R) = ((2+2x)/(4x)) tanh(Rx) coth(R)`.
pub fn tanh_claim_value(x: f64, r: f64) -> f64 {
    (2.0 + 2.0 * x) / (4.0 * x) * (r * x).tanh() / r.tanh()
}

pub fn tanh_claim_grid(points: usize) -> GridSpec {
    GridSpec::new(
        "x",
        Axis::left_open(0.0, 0.5, points),
        "R",
        Axis::closed(2.0, 50.0, points),
    )
}

/// `f(x, R) >= 1` on `(0, 1/2] × [2, 50]`, plus the boundary values
/// `f(1/2, R) = (3/2) tanh(R/2) coth R` and `f(0⁺, R) = (R/2) coth R`.
pub fn check_tanh_claim(grid: &GridSpec) -> Result<CheckReport> {
    grid.validate()?;
    let points = grid.points();
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|&(x, r)| Sample::exact(tanh_claim_value(x, r) - 1.0))
        .collect();
    let mut rep = summarize("tanh_claim", &["x", "R"], &pairs_to_rows(&points), &samples);
    let mut edge_mismatch = 0.0f64;
    let mut limit_mismatch = 0.0f64;
    for r in grid.y.values() {
        let half = 1.5 * (0.5 * r).tanh() / r.tanh();
        edge_mismatch = edge_mismatch.max((tanh_claim_value(0.5, r) - half).abs());
        let limit = 0.5 * r / r.tanh();
        limit_mismatch = limit_mismatch.max((tanh_claim_value(1e-7, r) - limit).abs() / limit);
    }
    rep.details.insert("f(1/2, 2)".into(), tanh_claim_value(0.5, 2.0));
    rep.details.insert("f(0+, 2)".into(), 1.0 / 2f64.tanh());
    rep.details.insert("boundary_half_mismatch".into(), edge_mismatch);
    rep.details.insert("boundary_zero_rel_mismatch".into(), limit_mismatch);
    if edge_mismatch > 1e-12 || limit_mismatch > 1e-6 {
        rep.status = CheckStatus::Fail;
        rep.pass = false;
        rep.notes
            .push("boundary values disagree with their closed forms".into());
    }
    Ok(rep)
}

pub fn c0_grid(points: usize) -> GridSpec {
    GridSpec::new(
        "delta",
        Axis::left_open(0.0, 2.0, points),
        "r",
        Axis::left_open(0.0, 100.0, points),
    )
}

/// `2 + r <= 3e^{1/δ} e^{δr}`, with the intermediate steps
/// `3e^{1/δ}e^{δr} >= 3(1+1/δ)(1+δr) >= 3r` and, for `r >= 1`, `3r >= 2 + r`.
pub fn check_c0_inequality(grid: &GridSpec) -> Result<CheckReport> {
    grid.validate()?;
    let points = grid.points();
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|&(d, r)| {
            let big = 3.0 * (1.0 / d + d * r).exp();
            let mid = 3.0 * (1.0 + 1.0 / d) * (1.0 + d * r);
            let mut slack = (big - (2.0 + r)).min(big - mid).min(mid - 3.0 * r);
            if r >= 1.0 {
                slack = slack.min(2.0 * r - 2.0);
            }
            Sample::exact(slack)
        })
        .collect();
    Ok(summarize(
        "c0_inequality",
        &["delta", "r"],
        &pairs_to_rows(&points),
        &samples,
    ))
}

pub fn geometric_series_grid(points: usize) -> GridSpec {
    GridSpec::new(
        "delta",
        Axis::open(0.0, 0.01, points),
        "r",
        Axis::closed(1.0, 100.0, points),
    )
}

/// `2 sinh(1/2−δ) >= 1` and `e^{−(1/2−δ)r}(1 + e^{1/2−δ}) <= e^{1/2−δ}` for
/// `δ < 0.01`, `r >= 1`; the closed form of `Σ_{j>=2} e^{−(1/2−δ)jr}` is
/// compared with a `10⁴`-term partial sum.
pub fn check_geometric_series(grid: &GridSpec) -> Result<CheckReport> {
    grid.validate()?;
    let points = grid.points();
    let results: Vec<(Sample, f64)> = points
        .par_iter()
        .map(|&(d, r)| {
            let q = 0.5 - d;
            let s1 = 2.0 * q.sinh() - 1.0;
            let s2 = q.exp() - (-q * r).exp() * (1.0 + q.exp());
            let ratio = (-q * r).exp();
            let closed = (-2.0 * q * r).exp() / (1.0 - ratio);
            let mut term = ratio * ratio;
            let mut partial = 0.0;
            for _ in 2..10_002 {
                if term == 0.0 {
                    break;
                }
                partial += term;
                term *= ratio;
            }
            (Sample::exact(s1.min(s2)), (closed - partial).abs())
        })
        .collect();
    let samples: Vec<Sample> = results.iter().map(|r| r.0).collect();
    let mut rep = summarize("geometric_series", &["delta", "r"], &pairs_to_rows(&points), &samples);
    let worst_sum = results.iter().map(|r| r.1).fold(0.0, f64::max);
    rep.details.insert("partial_sum_max_abs_diff".into(), worst_sum);
    rep.details.insert("2sinh(0.495)".into(), 2.0 * 0.495f64.sinh());
    if worst_sum > 1e-12 {
        rep.status = CheckStatus::Fail;
        rep.pass = false;
        rep.notes
            .push("closed-form geometric sum disagrees with partial sums".into());
    }
    Ok(rep)
}

/// Sine and cosine forms of `F_N` agree within `1e−10`; `F_N(0) = N`.
pub fn check_fejer_identity(max_n: u32, s_points: usize) -> Result<CheckReport> {
    if max_n == 0 || s_points < 2 {
        return Err(Error::invalid("fejer grid", "need N >= 1 and at least two s values"));
    }
    let ss = Axis::closed(-4.0 * PI, 4.0 * PI, s_points).values();
    let points: Vec<Vec<f64>> = (1..=max_n)
        .flat_map(|n| ss.iter().map(move |&s| vec![n as f64, s]))
        .collect();
    let samples: Vec<Sample> = points
        .par_iter()
        .map(|p| {
            let (n, s) = (p[0] as u32, p[1]);
            let cos_form = fejer_cosine_form(n, s);
            let diff = if (0.5 * s).sin().abs() < 1e-6 {
                (fejer(n, s) - cos_form).abs()
            } else {
                (fejer_sine_form(n, s) - cos_form).abs()
            };
            Sample::exact(1e-10 - diff)
        })
        .collect();
    let mut rep = summarize("fejer_identity", &["N", "s"], &points, &samples);
    let exact_at_zero = (1..=max_n).all(|n| fejer(n, 0.0) == n as f64);
    rep.details
        .insert("F_N(0) == N".into(), if exact_at_zero { 1.0 } else { 0.0 });
    if !exact_at_zero {
        rep.status = CheckStatus::Fail;
        rep.pass = false;
    }
    rep.notes
        .push("slack is 1e-10 minus the difference between the two forms".into());
    Ok(rep)
}

/// Random tuples `(λ, μ, r, N)` with `λ, μ ∈ [1/4, 30]`, `r ∈ 1..=10`, `N ∈ 1..=30`.
fn random_tuples(seed: u64, count: usize) -> Vec<(f64, f64, u32, u32)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            (
                rng.gen_range(0.25..=30.0),
                rng.gen_range(0.25..=30.0),
                rng.gen_range(1..=10),
                rng.gen_range(1..=30),
            )
        })
        .collect()
}

/// Direct and Fejér forms of the wave multiplier agree within `1e−9`.
pub fn check_multiplier_forms(seed: u64, count: usize) -> Result<CheckReport> {
    let tuples = random_tuples(seed, count);
    let samples: Vec<Sample> = tuples
        .par_iter()
        .map(|&(lam, mu, r, n)| {
            let spec = WaveMultiplierSpec::new(spectral_parameter(lam)?, r, n)?;
            let mu = spectral_parameter(mu)?;
            let d = w_multiplier_direct(&spec, &mu);
            let f = w_multiplier_fejer(&spec, &mu)?;
            Ok(Sample::exact(1e-9 - (d - f).abs()))
        })
        .collect::<Result<_>>()?;
    let points: Vec<Vec<f64>> = tuples
        .iter()
        .map(|&(l, m, r, n)| vec![l, m, r as f64, n as f64])
        .collect();
    let mut rep = summarize("multiplier_forms", &["lambda", "mu", "r", "N"], &points, &samples);
    rep.notes
        .push("slack is 1e-9 minus the difference between the two forms".into());
    Ok(rep)
}

/// Sign bounds of the wave multiplier: `>= −1` for tempered `μ`, `>= 0` for
/// untempered `μ`, `= 0` at `μ = 0`, `>= (N−4)/(4cosh(s_λπ/2))` at `μ = λ`.
pub fn check_spectral_action(seed: u64, count: usize, untempered: usize) -> Result<CheckReport> {
    let tuples = random_tuples(seed, count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let untempered_mu: Vec<f64> = (0..untempered).map(|_| rng.gen_range(1e-9..0.25)).collect();
    let mut rows: Vec<(f64, f64, u32, u32, u8)> = Vec::new();
    for (i, &(lam, mu, r, n)) in tuples.iter().enumerate() {
        rows.push((lam, mu, r, n, 0));
        rows.push((lam, lam, r, n, 1));
        rows.push((lam, 0.0, r, n, 2));
        if i < untempered_mu.len() {
            rows.push((lam, untempered_mu[i], r, n, 3));
        }
    }
    for &mu in untempered_mu.iter().skip(tuples.len()) {
        rows.push((1.0, mu, 3, 10, 3));
    }
    let samples: Vec<Sample> = rows
        .par_iter()
        .map(|&(lam, mu, r, n, kind)| {
            let spec = WaveMultiplierSpec::new(spectral_parameter(lam)?, r, n)?;
            let v = w_multiplier_direct(&spec, &spectral_parameter(mu)?);
            let slack = match kind {
                0 => v + 1.0,
                1 => v - w_diagonal_lower_bound(&spec),
                2 => -v.abs(),
                _ => v,
            };
            Ok(Sample::exact(slack))
        })
        .collect::<Result<_>>()?;
    let points: Vec<Vec<f64>> = rows
        .iter()
        .map(|&(l, m, r, n, k)| vec![l, m, r as f64, n as f64, k as f64])
        .collect();
    let mut rep = summarize(
        "spectral_action_bounds",
        &["lambda", "mu", "r", "N", "case"],
        &points,
        &samples,
    );
    rep.notes
        .push("case 0: tempered mu, 1: mu = lambda, 2: mu = 0, 3: untempered mu".into());
    Ok(rep)
}

/// Sample spectral parameters for round-trip comparisons.
pub const ROUND_TRIP_GRID: [f64; 6] = [0.0, 0.5, 1.0, 1.5, 2.0, 3.0];

/// Round trips `h → S(S⁻¹ h)` for the wave pair (`t ∈ {2, 4}`) and the ball
/// kernel (`t ∈ {1, 2, 3}`) within `1e−4`, and the closed form of the
/// normalized ball transform against the generic transform within `1e−8`.
pub fn check_selberg_round_trips(cfg: &QuadConfig) -> Result<CheckReport> {
    let opts = InverseOptions {
        quad: *cfg,
        ..Default::default()
    };
    let mut cases: Vec<(String, SpectralFunction)> = Vec::new();
    for t in [2.0, 4.0] {
        cases.push((format!("wave t={t}"), SpectralFunction::wave(t)));
    }
    for t in [1.0, 2.0, 3.0] {
        cases.push((format!("ball t={t}"), selberg_transform(&RadialKernel::ball(t)?, cfg)));
    }
    let mut points = Vec::new();
    let mut samples = Vec::new();
    let mut details = BTreeMap::new();
    for (ci, (label, h)) in cases.iter().enumerate() {
        let outcome = inverse_selberg(h, &opts).map(|k| selberg_transform(&k, cfg));
        let evals: Vec<Sample> = ROUND_TRIP_GRID
            .par_iter()
            .map(|&s| match &outcome {
                Ok(back) => match (h.eval_real(s), back.eval_real(s)) {
                    (Ok(a), Ok(b)) => Sample::exact(1e-4 - (a - b).abs()),
                    _ => Sample::Undecided,
                },
                Err(_) => Sample::Undecided,
            })
            .collect();
        let worst = evals
            .iter()
            .filter_map(|e| match e {
                Sample::Value { slack, .. } => Some(1e-4 - slack),
                Sample::Undecided => None,
            })
            .fold(0.0, f64::max);
        details.insert(format!("{label}: sup error"), worst);
        for (&s, e) in ROUND_TRIP_GRID.iter().zip(evals) {
            points.push(vec![ci as f64, s]);
            samples.push(e);
        }
    }
    let (t, sigma) = (3.0, 0.04);
    let generic = selberg_transform(&RadialKernel::normalized_ball(t, sigma)?, cfg);
    let spectral: Vec<SpectralPoint> = [0.0, 0.4, 1.0, 2.0, 3.5, 6.0]
        .iter()
        .map(|&s| SpectralPoint::Real(s))
        .chain([0.1, 0.25, 0.4, 0.49].iter().map(|&a| SpectralPoint::Imag(a)))
        .collect();
    let lemma: Vec<Sample> = spectral
        .par_iter()
        .map(
            |&p| match (generic.eval(p), normalized_ball_transform(t, sigma, p, cfg)) {
                (Ok(a), Ok(b)) => Sample::exact(1e-8 - (a - b).abs()),
                _ => Sample::Undecided,
            },
        )
        .collect();
    for (p, e) in spectral.iter().zip(lemma) {
        let (re, im) = match *p {
            SpectralPoint::Real(s) => (s, 0.0),
            SpectralPoint::Imag(a) => (0.0, a),
        };
        points.push(vec![cases.len() as f64, re + im]);
        samples.push(e);
    }
    let mut rep = summarize("selberg_round_trips", &["case", "s"], &points, &samples);
    rep.details = details;
    let labels: Vec<String> = cases.iter().map(|c| c.0.clone()).collect();
    rep.notes.push(format!(
        "cases 0..{}: {}; case {}: closed-form ball transform (t=3, sigma=0.04); slack is tolerance minus error",
        cases.len() - 1,
        labels.join(", "),
        cases.len()
    ));
    Ok(rep)
}

/// Orbit counts on every shipped group stay below `Cx C₀(δ) e^{δr}` for
/// `δ ∈ {0.1, 0.25, 0.5, 1}` and 20 radii up to `R`.
pub fn check_counting_bounds(seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xc0de);
    let mut pairs = vec![(Point::I, Point::I)];
    for _ in 0..3 {
        let z = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.6))?;
        let w = Point::new(rng.gen_range(-0.5..0.5), rng.gen_range(0.6..1.6))?;
        pairs.push((z, w));
    }
    let mut points = Vec::new();
    let mut samples = Vec::new();
    let mut details = BTreeMap::new();
    for (gi, name) in BUILTIN_GROUPS.iter().enumerate() {
        let group = builtin_group(name).ok_or_else(|| Error::invalid("group", format!("missing builtin {name}")))?;
        let params = params_from_hints(&group, 0.25)?;
        let radii: Vec<f64> = (1..=20).map(|k| params.r * k as f64 / 20.0).collect();
        details.insert(format!("{name}: R"), params.r);
        for delta in [0.1, 0.25, 0.5, 1.0] {
            let rep = verify_counting_bound(&group, &params, &pairs, &radii, delta, &EnumerateOptions::default())?;
            for e in rep.entries {
                points.push(vec![gi as f64, delta, e.radius, e.count as f64]);
                samples.push(Sample::exact(e.bound - e.count as f64));
            }
        }
    }
    let mut rep = summarize(
        "counting_bound",
        &["group", "delta", "radius", "count"],
        &points,
        &samples,
    );
    rep.details = details;
    rep.notes.push(format!("groups: {}", BUILTIN_GROUPS.join(", ")));
    Ok(rep)
}

/// Settings for `run_all`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct VerifyConfig {
    pub sigmas: Vec<f64>,
    /// Points per grid axis.
    pub grid_points: usize,
    pub quad: QuadConfig,
    pub seed: u64,
    /// Random multiplier tuples.
    pub multiplier_samples: usize,
    pub untempered_samples: usize,
    pub include_selberg: bool,
    pub include_counting: bool,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            sigmas: vec![0.01, 0.04, 0.09],
            grid_points: 200,
            quad: QuadConfig::default(),
            seed: 0,
            multiplier_samples: 500,
            untempered_samples: 200,
            include_selberg: true,
            include_counting: true,
        }
    }
}

impl VerifyConfig {
    pub fn validate(&self) -> Result<()> {
        for &s in &self.sigmas {
            if !(s > 0.0 && s < 0.25) {
                return Err(Error::invalid("sigma", format!("{s} is outside (0, 1/4)")));
            }
        }
        if self.grid_points == 0 {
            return Err(Error::invalid("grid_points", "must be positive"));
        }
        self.quad.validate()
    }
}

/// Runs every check in a fixed order. Failing inequalities are reported,
/// not raised; errors are reserved for invalid configuration.
pub fn run_all(config: &VerifyConfig) -> Result<Vec<CheckReport>> {
    config.validate()?;
    let n = config.grid_points;
    let mut out = Vec::new();
    for &sigma in &config.sigmas {
        out.push(check_technical_lemma(
            sigma,
            &technical_lemma_grid(sigma, n),
            &config.quad,
        )?);
    }
    out.push(check_tanh_claim(&tanh_claim_grid(n))?);
    out.push(check_c0_inequality(&c0_grid(n))?);
    out.push(check_geometric_series(&geometric_series_grid(n))?);
    out.push(check_fejer_identity(64, 10_000)?);
    out.push(check_multiplier_forms(config.seed, config.multiplier_samples)?);
    out.push(check_spectral_action(
        config.seed,
        config.multiplier_samples,
        config.untempered_samples,
    )?);
    if config.include_selberg {
        out.push(check_selberg_round_trips(&config.quad)?);
    }
    if config.include_counting {
        out.push(check_counting_bounds(config.seed)?);
    }
    Ok(out)
}

/// `Fail` if any check fails, else `Inconclusive` if any is undecided, else `Pass`.
pub fn overall_status(reports: &[CheckReport]) -> CheckStatus {
    if reports.iter().any(|r| r.status == CheckStatus::Fail) {
        CheckStatus::Fail
    } else if reports.iter().any(|r| r.status == CheckStatus::Inconclusive) {
        CheckStatus::Inconclusive
    } else {
        CheckStatus::Pass
    }
}

//! Volume lower bounds for sets carrying a fixed share of an eigenfunction's
//! mass, in the tempered and untempered regimes, and their specialisation to
//! random surfaces of large genus.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{C0Rule, GeometryParams};
use crate::multipliers::{a_constant, tempered_threshold, DELTA_MAX};

/// Default `δ` for the tempered bound.
pub const DEFAULT_TEMPERED_DELTA: f64 = 0.005;
/// `δ` used by the untempered bound.
pub const UNTEMPERED_DELTA: f64 = 0.25;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DelocInput {
    /// Mass `‖ψ 1_E‖²` of the set, in `(0, 1]`.
    pub eps: f64,
    pub lam: f64,
    /// Spectral gap parameter; required when `lam < 1/4`.
    pub sigma: Option<f64>,
    pub params: GeometryParams,
    /// Overrides the default `δ` of the tempered bound.
    pub delta: Option<f64>,
}

impl DelocInput {
    fn validate_common(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::invalid("eps", "must lie in (0, 1]"));
        }
        if !self.lam.is_finite() || self.lam < 0.0 {
            return Err(Error::NegativeEigenvalue(self.lam));
        }
        if !(self.params.r > 0.0) {
            return Err(Error::invalid("R", "must be positive"));
        }
        if !(self.params.cx >= 1.0) {
            return Err(Error::invalid("Cx", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Tempered,
    Untempered,
}

/// One hypothesis of a bound, as `actual` compared with `required`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hypothesis {
    pub name: String,
    pub required: f64,
    pub actual: f64,
    pub satisfied: bool,
}

impl Hypothesis {
    fn at_least(name: &str, actual: f64, required: f64) -> Self {
        Hypothesis {
            name: name.into(),
            required,
            actual,
            satisfied: actual >= required,
        }
    }

    fn at_most(name: &str, actual: f64, required: f64) -> Self {
        Hypothesis {
            name: name.into(),
            required,
            actual,
            satisfied: actual <= required,
        }
    }
}

/// `(1/2−δ) r >= R/(32N) >= εR/(256 cosh(sπ/2))` on a given instance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExponentChain {
    pub exact_exponent: f64,
    pub intermediate: f64,
    pub simplified_exponent: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub mode: Mode,
    #[serde(rename = "N")]
    pub n: Option<u64>,
    pub r: Option<u64>,
    /// `1/(256 cosh(sπ/2))` (tempered).
    pub d_lam: Option<f64>,
    /// Coefficient of `R` in the exponent of the headline bound.
    pub growth_rate: f64,
    pub eps: f64,
    pub lam: f64,
    pub sigma: Option<f64>,
    pub delta: f64,
    #[serde(rename = "R")]
    pub radius: f64,
    #[serde(rename = "Cx")]
    pub cx: f64,
    /// The constant `C` of the bound.
    pub constant: f64,
    /// Evaluated bound formula, reported whether or not the hypotheses hold.
    pub formula_value: f64,
    /// Natural logarithm of `formula_value`, finite even when the value overflows.
    pub log_formula_value: f64,
    /// `(Cε/Cx) e^{d ε R}` (tempered).
    pub simplified_bound: Option<f64>,
    pub chain: Option<ExponentChain>,
    /// The certified lower bound on `Vol(E)`; present only when valid.
    pub lower_bound: Option<f64>,
    pub hypotheses: Vec<Hypothesis>,
    pub valid: bool,
    pub failing: Vec<String>,
}

fn finish(mut report: BoundReport) -> BoundReport {
    report.failing = report
        .hypotheses
        .iter()
        .filter(|h| !h.satisfied)
        .map(|h| h.name.clone())
        .collect();
    report.valid = report.failing.is_empty();
    report.lower_bound = report.valid.then_some(report.formula_value);
    report
}

/// Tempered bound: `N = ⌊8 cosh(sπ/2)/ε⌋`, `r = ⌈R/(8N)⌉`,
/// `Vol(E) >= (Cε/Cx) e^{(1/2−δ) r}` with `C = 1/A(δ)`, valid for
/// `R >= 64 cosh(sπ/2)/ε`.
pub fn tempered_volume_bound(input: &DelocInput) -> Result<BoundReport> {
    input.validate_common()?;
    if input.lam < 0.25 {
        return Err(Error::UntemperedInput(input.lam));
    }
    let delta = input.delta.unwrap_or(DEFAULT_TEMPERED_DELTA);
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    if delta >= DELTA_MAX {
        return Err(Error::DeltaTooLarge(delta));
    }
    let p = &input.params;
    let eps = input.eps;
    let s = (input.lam - 0.25).sqrt();
    let ch = (FRAC_PI_2 * s).cosh();
    let n_real = (8.0 * ch / eps).floor();
    if !(n_real < 1e15) {
        return Err(Error::invalid("lambda", "cosh(s pi / 2) / eps is too large"));
    }
    let n = n_real as u64;
    let r = (p.r / (8.0 * n as f64)).ceil().max(1.0) as u64;
    let d_lam = 1.0 / (256.0 * ch);
    let constant = 1.0 / a_constant(p.c0(delta), delta);
    let prefactor = constant * eps / p.cx;
    let exact_exponent = (0.5 - delta) * r as f64;
    let simplified_exponent = d_lam * eps * p.r;
    let intermediate = p.r / (32.0 * n as f64);
    let chain = ExponentChain {
        exact_exponent,
        intermediate,
        simplified_exponent,
        holds: exact_exponent >= intermediate && intermediate >= simplified_exponent,
    };
    let hypotheses = vec![
        Hypothesis::at_least("R >= 64 cosh(s pi/2) / eps", p.r, 64.0 * ch / eps),
        Hypothesis::at_most("N r <= R/4", (n * r) as f64, p.r / 4.0),
    ];
    Ok(finish(BoundReport {
        mode: Mode::Tempered,
        n: Some(n),
        r: Some(r),
        d_lam: Some(d_lam),
        growth_rate: d_lam * eps,
        eps,
        lam: input.lam,
        sigma: input.sigma,
        delta,
        radius: p.r,
        cx: p.cx,
        constant,
        formula_value: prefactor * exact_exponent.exp(),
        log_formula_value: prefactor.ln() + exact_exponent,
        simplified_bound: Some(prefactor * simplified_exponent.exp()),
        chain: Some(chain),
        lower_bound: None,
        hypotheses,
        valid: false,
        failing: Vec::new(),
    }))
}

/// Untempered bound: `Vol(E) >= (ε/(Cx C₀(1/4))) e^{(1/4+√σ/2)R}`, valid for
/// `R >= 2`, `R >= (2/√σ) log(2+2/ε)` and `R >= t*(σ)`, where `t*` solves
/// `4√2 t = cosh(t)^{√σ/2}`.
pub fn untempered_volume_bound(input: &DelocInput) -> Result<BoundReport> {
    input.validate_common()?;
    let sigma = input
        .sigma
        .ok_or_else(|| Error::invalid("sigma", "required for untempered eigenvalues"))?;
    if !(sigma > 0.0 && sigma < 0.25) {
        return Err(Error::invalid("sigma", "must lie in (0, 1/4)"));
    }
    if !(input.lam > 0.0 && input.lam < 0.25 - sigma) {
        return Err(Error::invalid("lambda", "must lie in (0, 1/4 - sigma)"));
    }
    let p = &input.params;
    let eps = input.eps;
    let rs = sigma.sqrt();
    let c0 = p.c0(UNTEMPERED_DELTA);
    let constant = 1.0 / c0;
    let growth_rate = 0.25 + rs / 2.0;
    let hypotheses = vec![
        Hypothesis::at_least("R >= 2", p.r, 2.0),
        Hypothesis::at_least(
            "R >= (2/sqrt(sigma)) log(2 + 2/eps)",
            p.r,
            2.0 / rs * (2.0 + 2.0 / eps).ln(),
        ),
        Hypothesis::at_least(
            "R >= t* with 4 sqrt(2) t* = cosh(t*)^(sqrt(sigma)/2)",
            p.r,
            tempered_threshold(sigma)?,
        ),
    ];
    Ok(finish(BoundReport {
        mode: Mode::Untempered,
        n: None,
        r: None,
        d_lam: None,
        growth_rate,
        eps,
        lam: input.lam,
        sigma: Some(sigma),
        delta: UNTEMPERED_DELTA,
        radius: p.r,
        cx: p.cx,
        constant,
        formula_value: eps / (p.cx * c0) * (growth_rate * p.r).exp(),
        log_formula_value: (eps / (p.cx * c0)).ln() + growth_rate * p.r,
        simplified_bound: None,
        chain: None,
        lower_bound: None,
        hypotheses,
        valid: false,
        failing: Vec::new(),
    }))
}

/// Dispatches on `lam` relative to `1/4`.
pub fn volume_bound(input: &DelocInput) -> Result<BoundReport> {
    if input.lam >= 0.25 {
        tempered_volume_bound(input)
    } else {
        untempered_volume_bound(input)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModelInput {
    pub genus: u64,
    pub c: f64,
    pub a: f64,
    pub eps: f64,
    pub lam: f64,
    pub sigma: Option<f64>,
}

/// Rate terms of the high-probability statement, without their unknown constants.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RateTerms {
    /// `log(g)² / g^{1−4c}`.
    pub log_squared_over_power: f64,
    /// `g^{−2a}`.
    pub inverse_power: f64,
    pub caveat: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomModelReport {
    pub mode: Mode,
    pub genus: u64,
    pub c: f64,
    pub a: f64,
    /// Genus exponent: `cεd(λ) − a` or `c(1/4+√σ/2) − a`.
    pub exponent: f64,
    pub exponent_positive: bool,
    /// The constant `C` of the deterministic bound.
    pub constant: f64,
    /// `C ε g^{exponent}`.
    pub bound: f64,
    pub rate_terms: RateTerms,
    /// `R = c log g`.
    #[serde(rename = "R")]
    pub radius: f64,
    /// `Cx = g^a`, from `InjRad >= g^{−a}`.
    #[serde(rename = "Cx")]
    pub cx: f64,
    /// Whether the deterministic hypotheses hold at this `R`.
    pub deterministic_hypotheses_hold: bool,
}

pub fn random_model_bound(input: &RandomModelInput) -> Result<RandomModelReport> {
    if input.genus < 2 {
        return Err(Error::invalid("genus", "must be at least 2"));
    }
    if !(input.c > 0.0 && input.c < 0.25) {
        return Err(Error::invalid("c", "must lie in (0, 1/4)"));
    }
    if !(input.a > 0.0) || !input.a.is_finite() {
        return Err(Error::invalid("a", "must be positive"));
    }
    if !(input.eps > 0.0 && input.eps <= 1.0) {
        return Err(Error::invalid("eps", "must lie in (0, 1]"));
    }
    let g = input.genus as f64;
    let log_g = g.ln();
    let radius = input.c * log_g;
    let cx = g.powf(input.a);
    let params = GeometryParams {
        r: radius,
        cx,
        injrad: g.powf(-input.a),
        l: 4.0 * radius,
        c0: C0Rule::TangleFree,
        default_delta: DEFAULT_TEMPERED_DELTA,
    };
    let det = DelocInput {
        eps: input.eps,
        lam: input.lam,
        sigma: input.sigma,
        params,
        delta: None,
    };
    let report = volume_bound(&det)?;
    let exponent = input.c * report.growth_rate - input.a;
    Ok(RandomModelReport {
        mode: report.mode,
        genus: input.genus,
        c: input.c,
        a: input.a,
        exponent,
        exponent_positive: exponent > 0.0,
        constant: report.constant,
        bound: report.constant * input.eps * g.powf(exponent),
        rate_terms: RateTerms {
            log_squared_over_power: log_g * log_g / g.powf(1.0 - 4.0 * input.c),
            inverse_power: g.powf(-2.0 * input.a),
            caveat: "unnormalized: multiplicative constants are unknown".into(),
        },
        radius,
        cx,
        deterministic_hypotheses_hold: report.valid,
    })
}

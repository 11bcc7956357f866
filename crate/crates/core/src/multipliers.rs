//! Spectral multipliers of the wave combination `W_{λ,r,N}` and of the
//! rescaled ball average `B_{t,λ}`, with their operator-norm bounds.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::GeometryParams;
use crate::quadrature::QuadConfig;
use crate::selberg::{log_cosh, normalized_ball_transform, SpectralPoint};

/// Upper limit on `δ` in the wave norm bound.
pub const DELTA_MAX: f64 = 0.01;
/// Slack allowed when comparing a multiplier with its lower bound.
pub const SIGN_SLACK: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "branch", rename_all = "snake_case")]
pub enum Branch {
    /// `λ = s² + 1/4`.
    Tempered { s: f64 },
    /// `λ = 1/4 − a²`, i.e. `s = ia`.
    Untempered { a: f64 },
}

/// A Laplace eigenvalue with its spectral parameter.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralParameter {
    pub lam: f64,
    #[serde(flatten)]
    pub branch: Branch,
}

impl SpectralParameter {
    pub fn is_tempered(&self) -> bool {
        matches!(self.branch, Branch::Tempered { .. })
    }

    /// `λ` rebuilt from the spectral parameter.
    pub fn reconstruct(&self) -> f64 {
        match self.branch {
            Branch::Tempered { s } => s * s + 0.25,
            Branch::Untempered { a } => 0.25 - a * a,
        }
    }

    pub fn spectral_point(&self) -> SpectralPoint {
        match self.branch {
            Branch::Tempered { s } => SpectralPoint::Real(s),
            Branch::Untempered { a } => SpectralPoint::Imag(a),
        }
    }

    /// `cos(x s)`, continued to `cosh(x a)` on the untempered branch.
    pub fn cos_term(&self, x: f64) -> f64 {
        match self.branch {
            Branch::Tempered { s } => (x * s).cos(),
            Branch::Untempered { a } => (x * a).cosh(),
        }
    }

    /// `cosh(sπ/2)`, continued to `cos(aπ/2)` on the untempered branch.
    pub fn cosh_half_pi(&self) -> f64 {
        match self.branch {
            Branch::Tempered { s } => (FRAC_PI_2 * s).cosh(),
            Branch::Untempered { a } => (FRAC_PI_2 * a).cos(),
        }
    }

    fn real_s(&self) -> Result<f64> {
        match self.branch {
            Branch::Tempered { s } => Ok(s),
            Branch::Untempered { .. } => Err(Error::UntemperedInput(self.lam)),
        }
    }
}

pub fn spectral_parameter(lam: f64) -> Result<SpectralParameter> {
    if !lam.is_finite() {
        return Err(Error::invalid("lambda", "must be finite"));
    }
    if lam < 0.0 {
        return Err(Error::NegativeEigenvalue(lam));
    }
    let branch = if lam >= 0.25 {
        Branch::Tempered { s: (lam - 0.25).sqrt() }
    } else {
        Branch::Untempered { a: (0.25 - lam).sqrt() }
    };
    Ok(SpectralParameter { lam, branch })
}

/// The parameter with `s_λ = s`, `λ = s² + 1/4`.
pub fn tempered_from_s(s: f64) -> SpectralParameter {
    let s = s.abs();
    SpectralParameter {
        lam: s * s + 0.25,
        branch: Branch::Tempered { s },
    }
}

/// Fejér kernel `F_N(s) = sin²(Ns/2) / (N sin²(s/2))`, equal to `N` at `s ∈ 2πℤ`.
pub fn fejer(n: u32, s: f64) -> f64 {
    let x = reduce_angle(s);
    if (0.5 * x).sin().abs() < 1e-6 {
        fejer_cosine_form(n, x)
    } else {
        fejer_sine_form(n, x)
    }
}

/// `sin²(Ns/2) / (N sin²(s/2))`; not defined at `s ∈ 2πℤ`.
pub fn fejer_sine_form(n: u32, s: f64) -> f64 {
    let x = reduce_angle(s);
    let nf = n as f64;
    (0.5 * nf * x).sin().powi(2) / (nf * (0.5 * x).sin().powi(2))
}

/// `1 + (2/N) Σ_{j=1}^{N} (N−j) cos(js)`.
pub fn fejer_cosine_form(n: u32, s: f64) -> f64 {
    let nf = n as f64;
    let sum: f64 = (1..n).map(|j| (n - j) as f64 * (j as f64 * s).cos()).sum();
    1.0 + 2.0 * sum / nf
}

/// `s` reduced to `[−π, π]`.
fn reduce_angle(s: f64) -> f64 {
    let two_pi = 2.0 * PI;
    s - two_pi * (s / two_pi).round()
}

/// `W_{λ,r,N} = Σ_{j=1}^{N} ((N−j)/N)(cos(r s_λ j) + 1) P_{jr} Π`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveMultiplierSpec {
    pub lam_param: SpectralParameter,
    pub r: u32,
    #[serde(rename = "N")]
    pub n: u32,
}

impl WaveMultiplierSpec {
    pub fn new(lam_param: SpectralParameter, r: u32, n: u32) -> Result<Self> {
        if r < 1 {
            return Err(Error::invalid("r", "must be at least 1"));
        }
        if n < 1 {
            return Err(Error::invalid("N", "must be at least 1"));
        }
        Ok(WaveMultiplierSpec { lam_param, r, n })
    }
}

/// Eigenvalue of `W_{λ,r,N}` on the `μ`-eigenspace, summed term by term.
pub fn w_multiplier_direct(spec: &WaveMultiplierSpec, mu: &SpectralParameter) -> f64 {
    if mu.lam == 0.0 {
        return 0.0;
    }
    let n = spec.n;
    let r = spec.r as f64;
    let denom = mu.cosh_half_pi();
    let sum: f64 = (1..n)
        .map(|j| {
            let weight = (n - j) as f64 / n as f64;
            let x = r * j as f64;
            weight * (spec.lam_param.cos_term(x) + 1.0) * mu.cos_term(x)
        })
        .sum();
    sum / denom
}

/// The same eigenvalue through Fejér kernels; tempered `λ` and `μ` only.
pub fn w_multiplier_fejer(spec: &WaveMultiplierSpec, mu: &SpectralParameter) -> Result<f64> {
    let s_mu = mu.real_s()?;
    let s_lam = spec.lam_param.real_s()?;
    let r = spec.r as f64;
    let n = spec.n;
    let c = (FRAC_PI_2 * s_mu).cosh();
    let pair = fejer(n, r * (s_lam + s_mu)) + fejer(n, r * (s_lam - s_mu)) - 2.0;
    Ok(pair / (4.0 * c) + (fejer(n, r * s_mu) - 1.0) / (2.0 * c))
}

/// `(N−4) / (4 cosh(s_λπ/2))`, the lower bound of the multiplier at `μ = λ`.
pub fn w_diagonal_lower_bound(spec: &WaveMultiplierSpec) -> f64 {
    (spec.n as f64 - 4.0) / (4.0 * spec.lam_param.cosh_half_pi())
}

/// `A(δ) = 2 C₀(δ)(1 + e^{1/2−δ})`.
pub fn a_constant(c0: f64, delta: f64) -> f64 {
    2.0 * c0 * (1.0 + (0.5 - delta).exp())
}

/// `Cx A(δ) e^{−(1/2−δ) r}`, the `L¹ → L^∞` bound for `W_{λ,r,N}`.
pub fn w_norm_bound(spec: &WaveMultiplierSpec, params: &GeometryParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    if delta >= DELTA_MAX {
        return Err(Error::DeltaTooLarge(delta));
    }
    let reach = spec.n as f64 * spec.r as f64;
    if reach > params.r / 4.0 {
        return Err(Error::HypothesisViolated(format!(
            "N r = {reach} exceeds R/4 = {}",
            params.r / 4.0
        )));
    }
    let a = a_constant(params.c0(delta), delta);
    Ok(params.cx * a * (-(0.5 - delta) * spec.r as f64).exp())
}

/// Ball of radius `t` normalized by `cosh(t)^{(1+√σ)/2}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BallMultiplierSpec {
    pub t: f64,
    pub sigma: f64,
}

impl BallMultiplierSpec {
    pub fn new(t: f64, sigma: f64) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid("t", "must be positive and finite"));
        }
        if !(sigma > 0.0 && sigma < 0.25) {
            return Err(Error::invalid("sigma", "must lie in (0, 1/4)"));
        }
        Ok(BallMultiplierSpec { t, sigma })
    }

    /// `cosh(t)^{√σ/2}` as a logarithm.
    fn log_scale(&self) -> f64 {
        self.sigma.sqrt() / 2.0 * log_cosh(self.t)
    }
}

/// Eigenvalue of `B_{t,λ}` on the `μ`-eigenspace.
pub fn b_multiplier(spec: &BallMultiplierSpec, mu: &SpectralParameter, cfg: &QuadConfig) -> Result<f64> {
    normalized_ball_transform(spec.t, spec.sigma, mu.spectral_point(), cfg)
}

/// `−4√2 t / cosh(t)^{√σ/2}`, valid for tempered `μ`.
pub fn b_tempered_lower_bound(spec: &BallMultiplierSpec) -> f64 {
    -4.0 * SQRT_2 * spec.t * (-spec.log_scale()).exp()
}

/// `(4√2/3) sinh(√σ t) / cosh(t)^{√σ/2}`, valid for `a_μ > √σ` and `t >= 2`.
pub fn b_untempered_lower_bound(spec: &BallMultiplierSpec) -> f64 {
    let rs = spec.sigma.sqrt() * spec.t;
    // log sinh x = x + log(1 − e^{−2x}) − log 2
    let log_sinh = rs + (-(-2.0 * rs).exp_m1()).ln() - std::f64::consts::LN_2;
    4.0 * SQRT_2 / 3.0 * (log_sinh - spec.log_scale()).exp()
}

/// `Cx C₀(δ) e^{(2δ−1−√σ) t / 2}`.
pub fn b_norm_bound(spec: &BallMultiplierSpec, params: &GeometryParams, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::invalid("delta", "must be positive"));
    }
    if spec.t > params.r {
        return Err(Error::HypothesisViolated(format!(
            "t = {} exceeds R = {}",
            spec.t, params.r
        )));
    }
    let exponent = (2.0 * delta - 1.0 - spec.sigma.sqrt()) * spec.t / 2.0;
    Ok(params.cx * params.c0(delta) * exponent.exp())
}

/// The large root `t*` of `4√2 t = cosh(t)^{√σ/2}`; beyond it the tempered
/// lower bound `−4√2 t / cosh(t)^{√σ/2}` is at least `−1`.
pub fn tempered_threshold(sigma: f64) -> Result<f64> {
    if !(sigma > 0.0 && sigma < 0.25) {
        return Err(Error::invalid("sigma", "must lie in (0, 1/4)"));
    }
    let f = |t: f64| sigma.sqrt() / 2.0 * log_cosh(t) - (4.0 * SQRT_2 * t).ln();
    // f is negative at 2 and convex-like beyond; grow the bracket until it turns positive
    let mut lo = 2.0;
    let mut hi = 4.0;
    while f(hi) < 0.0 {
        lo = hi;
        hi *= 2.0;
        if hi > 1e9 {
            return Err(Error::invalid("sigma", "threshold not bracketed"));
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    Ok(hi)
}

/// Which family a multiplier row belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Wave(WaveMultiplierSpec),
    Ball(BallMultiplierSpec),
}

/// One multiplier evaluation against its applicable lower bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultiplierRow {
    pub mu: f64,
    pub value: f64,
    pub lower_bound: Option<f64>,
    pub pass: bool,
}

/// The lower bound that applies to the multiplier at `μ`, if any.
pub fn applicable_lower_bound(family: &Family, mu: &SpectralParameter) -> Option<f64> {
    match family {
        Family::Wave(spec) => {
            if mu.lam == 0.0 {
                return Some(0.0);
            }
            if !spec.lam_param.is_tempered() {
                return None;
            }
            match mu.branch {
                Branch::Untempered { .. } => Some(0.0),
                Branch::Tempered { .. } => {
                    if (mu.lam - spec.lam_param.lam).abs() <= 1e-12 * mu.lam.max(1.0) {
                        Some(w_diagonal_lower_bound(spec).max(-1.0))
                    } else {
                        Some(-1.0)
                    }
                }
            }
        }
        Family::Ball(spec) => match mu.branch {
            Branch::Tempered { .. } => Some(b_tempered_lower_bound(spec)),
            Branch::Untempered { a } if a > spec.sigma.sqrt() && spec.t >= 2.0 => Some(b_untempered_lower_bound(spec)),
            Branch::Untempered { .. } => None,
        },
    }
}

pub fn evaluate_row(family: &Family, mu: &SpectralParameter, cfg: &QuadConfig) -> Result<MultiplierRow> {
    let value = match family {
        Family::Wave(spec) => w_multiplier_direct(spec, mu),
        Family::Ball(spec) => b_multiplier(spec, mu, cfg)?,
    };
    let lower_bound = applicable_lower_bound(family, mu);
    let pass = lower_bound.is_none_or(|b| value >= b - SIGN_SLACK);
    Ok(MultiplierRow {
        mu: mu.lam,
        value,
        lower_bound,
        pass,
    })
}

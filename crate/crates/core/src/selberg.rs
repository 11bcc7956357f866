//! Forward and inverse Selberg transforms between radial kernels `k(ρ)`
//! and even spectral functions `h(r)`, through the intermediate even
//! function `g(u)`:
//!
//! ```text
//! g(u) = √2 ∫_{|u|}^∞ k(ρ) sinh ρ / √(cosh ρ − cosh u) dρ
//! h(r) = ∫ e^{iru} g(u) du
//! k(ρ) = −1/(√2 π) ∫_ρ^∞ g'(u) / √(cosh u − cosh ρ) du
//! ```
//!
//! Endpoint square-root singularities are removed by substitution
//! (`cosh ρ = cosh u + v²` at the lower end, `u = T − w²` at a finite
//! support end), so plain Gauss-Kronrod panels converge quickly.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};
use std::fmt;
use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{panel_breaks, try_integrate, try_integrate_panels, Integral, QuadConfig, Table};

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type FallibleFn = Arc<dyn Fn(f64) -> Result<f64> + Send + Sync>;
pub type SpectralFn = Arc<dyn Fn(SpectralPoint) -> Result<f64> + Send + Sync>;

/// Spectral parameters above this magnitude are outside the validated regime.
pub const OSCILLATORY_THRESHOLD: f64 = 50.0;
/// Default grid step for tabulated kernels and derivatives.
pub const DEFAULT_GRID_STEP: f64 = 0.01;
/// Target for the discarded tail mass of an infinite-support kernel.
const TAIL_TOL: f64 = 1e-10;
const PANEL_WIDTH: f64 = 1.0;

/// A spectral parameter `r`: real, or purely imaginary `r = i a`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum SpectralPoint {
    Real(f64),
    Imag(f64),
}

impl SpectralPoint {
    /// `cos(ru)` for real `r`, `cosh(au)` for `r = ia`.
    pub fn kernel(&self, u: f64) -> f64 {
        match *self {
            SpectralPoint::Real(r) => (r * u).cos(),
            SpectralPoint::Imag(a) => (a * u).cosh(),
        }
    }

    pub fn magnitude(&self) -> f64 {
        match *self {
            SpectralPoint::Real(r) | SpectralPoint::Imag(r) => r.abs(),
        }
    }

    pub fn negate(&self) -> SpectralPoint {
        match *self {
            SpectralPoint::Real(r) => SpectralPoint::Real(-r),
            SpectralPoint::Imag(a) => SpectralPoint::Imag(-a),
        }
    }
}

impl fmt::Display for SpectralPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpectralPoint::Real(r) => write!(f, "{r}"),
            SpectralPoint::Imag(a) => write!(f, "{a}i"),
        }
    }
}

/// Whether an oscillatory integral was evaluated inside the validated range.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    Validated,
    Oscillatory,
}

impl Regime {
    pub fn for_parameter(p: f64) -> Self {
        if p.abs() > OSCILLATORY_THRESHOLD {
            Regime::Oscillatory
        } else {
            Regime::Validated
        }
    }
}

/// `cosh a − cosh b` without cancellation.
fn cosh_diff(a: f64, b: f64) -> f64 {
    2.0 * (0.5 * (a + b)).sinh() * (0.5 * (a - b)).sinh()
}

/// `cosh x − 1` without cancellation.
fn cosh_m1(x: f64) -> f64 {
    2.0 * (0.5 * x).sinh().powi(2)
}

/// `ρ` and `sinh ρ` for `cosh ρ = cosh u + v²`.
fn shifted(u: f64, v: f64) -> (f64, f64) {
    let c = u.cosh();
    let sh = (u.sinh().powi(2) + v * v * (2.0 * c + v * v)).sqrt();
    (sh.asinh(), sh)
}

/// Panel breaks over `[lo, hi]`: unit panels, or the interpolation nodes
/// of a tabulated integrand so that every panel sees a single cubic piece.
fn knot_breaks(lo: f64, hi: f64, step: Option<f64>) -> Vec<f64> {
    let Some(h) = step else {
        return panel_breaks(lo, hi, PANEL_WIDTH);
    };
    let mut out = vec![lo];
    let mut j = (lo / h).floor() + 1.0;
    loop {
        let x = j * h;
        if x >= hi - 1e-9 * h {
            break;
        }
        if x > lo + 1e-9 * h {
            out.push(x);
        }
        j += 1.0;
    }
    out.push(hi);
    out
}

/// `knot_breaks` on `[a, b]` mapped to `v = √(cosh ρ − cosh a)`.
fn knot_breaks_v(a: f64, b: f64, step: Option<f64>) -> Vec<f64> {
    if step.is_none() {
        return panel_breaks(0.0, cosh_diff(b, a).sqrt(), PANEL_WIDTH);
    }
    knot_breaks(a, b, step)
        .into_iter()
        .map(|r| cosh_diff(r, a).max(0.0).sqrt())
        .collect()
}

/// A radial kernel `k(ρ)`, `ρ >= 0`.
#[derive(Clone)]
pub struct RadialKernel {
    pub name: String,
    eval: RealFn,
    deriv: Option<RealFn>,
    /// Spacing of interpolation nodes, for kernels sampled on a grid from 0.
    knot_step: Option<f64>,
    /// `k` vanishes beyond this radius (may be infinite).
    pub support_bound: f64,
    /// `δ` with `|k(ρ)| = O(e^{−ρ(1+δ)})`.
    pub decay_hint: f64,
}

impl fmt::Debug for RadialKernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialKernel")
            .field("name", &self.name)
            .field("support_bound", &self.support_bound)
            .field("decay_hint", &self.decay_hint)
            .finish()
    }
}

impl RadialKernel {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(f64) -> f64 + Send + Sync + 'static,
        support_bound: f64,
        decay_hint: f64,
    ) -> Result<Self> {
        if !(support_bound > 0.0) {
            return Err(Error::invalid("support_bound", "must be positive"));
        }
        if !support_bound.is_finite() && !(decay_hint > -0.5) {
            return Err(Error::invalid("decay_hint", "infinite support needs decay_hint > -1/2"));
        }
        Ok(RadialKernel {
            name: name.into(),
            eval: Arc::new(eval),
            deriv: None,
            knot_step: None,
            support_bound,
            decay_hint,
        })
    }

    /// Attaches `k'(ρ)`, needed for `g'` by differentiating the forward transform.
    pub fn with_derivative(mut self, deriv: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    /// `k(ρ)`; zero beyond the support.
    pub fn eval(&self, rho: f64) -> f64 {
        let rho = rho.abs();
        if rho > self.support_bound {
            0.0
        } else {
            (self.eval)(rho)
        }
    }

    pub fn derivative(&self, rho: f64) -> Option<f64> {
        let rho = rho.abs();
        let d = self.deriv.as_ref()?;
        Some(if rho > self.support_bound { 0.0 } else { d(rho) })
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// The indicator `1_{ρ <= t}`.
    pub fn ball(t: f64) -> Result<Self> {
        Self::scaled_ball(t, 1.0, format!("ball(t={t})"))
    }

    /// `1_{ρ <= t} / cosh(t)^{(1+√σ)/2}`.
    pub fn normalized_ball(t: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma < 0.25) {
            return Err(Error::invalid("sigma", "must lie in (0, 1/4)"));
        }
        let scale = (-(1.0 + sigma.sqrt()) / 2.0 * log_cosh(t)).exp();
        Self::scaled_ball(t, scale, format!("normalized_ball(t={t}, sigma={sigma})"))
    }

    fn scaled_ball(t: f64, scale: f64, name: String) -> Result<Self> {
        if !(t > 0.0) || !t.is_finite() {
            return Err(Error::invalid("t", "ball radius must be positive and finite"));
        }
        Ok(Self::new(name, move |_| scale, t, 0.0)?.with_derivative(|_| 0.0))
    }

    /// `cosh(ρ)^{-2}`, whose intermediate function is `(π/√2) cosh(u)^{-3/2}`.
    pub fn sech_squared() -> Self {
        Self::new("sech_squared", |r| r.cosh().powi(-2), f64::INFINITY, 1.0)
            .expect("valid kernel")
            .with_derivative(|r| -2.0 * r.sinh() / r.cosh().powi(3))
    }

    /// Kernel sampled on a grid; zero beyond the last node.
    pub fn from_table(name: impl Into<String>, table: Table) -> Result<Self> {
        if table.values.len() < 2 || !(table.step > 0.0) || table.start != 0.0 {
            return Err(Error::invalid(
                "table",
                "need at least two nodes starting at 0 with positive step",
            ));
        }
        let end = table.end();
        let step = table.step;
        let mut k = Self::new(name, move |r| table.eval(r), end, 0.0)?;
        k.knot_step = Some(step);
        Ok(k)
    }

    pub fn zero() -> Self {
        Self::new("zero", |_| 0.0, 1.0, 0.0)
            .expect("valid kernel")
            .with_derivative(|_| 0.0)
    }

    /// Radius beyond which the forward-transform tail at `u` is below `1e-10`.
    fn tail_cutoff(&self, u: f64) -> f64 {
        if self.support_bound.is_finite() {
            return self.support_bound;
        }
        let rate = 0.5 + self.decay_hint;
        let mut rho = u + 2.0;
        while rho < 700.0 {
            let est = |r: f64| (self.eval)(r).abs() * (0.5 * r).exp() * 2.0 / rate;
            if est(rho) < TAIL_TOL && est(rho - 0.5) < TAIL_TOL {
                return rho;
            }
            rho += 1.0;
        }
        rho
    }
}

/// `log cosh t` without overflow.
pub fn log_cosh(t: f64) -> f64 {
    let t = t.abs();
    t + (-2.0 * t).exp().ln_1p() - std::f64::consts::LN_2
}

/// Decomposition `g'(u) = R(u) − J sinh u / √(cosh T − cosh u)` at a finite
/// support end `T`, with `R` free of the edge singularity.
#[derive(Clone)]
struct EdgeSplit {
    regular: FallibleFn,
    jump: f64,
}

/// The even intermediate function `g(u)`, with optional `g'`.
#[derive(Clone)]
pub struct IntermediateG {
    eval: FallibleFn,
    deriv: Option<FallibleFn>,
    edge: Option<EdgeSplit>,
    /// Spacing of interpolation nodes of a tabulated `g'`.
    knot_step: Option<f64>,
    /// `g` vanishes for `|u|` beyond this (may be infinite).
    pub support: f64,
    /// Truncation point for integrals over `u`.
    pub u_max: f64,
}

impl fmt::Debug for IntermediateG {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntermediateG")
            .field("support", &self.support)
            .field("u_max", &self.u_max)
            .field("has_derivative", &self.deriv.is_some())
            .finish()
    }
}

impl IntermediateG {
    pub fn new(eval: impl Fn(f64) -> Result<f64> + Send + Sync + 'static, support: f64, u_max: f64) -> Self {
        IntermediateG {
            eval: Arc::new(eval),
            deriv: None,
            edge: None,
            knot_step: None,
            support,
            u_max: u_max.min(support),
        }
    }

    pub fn with_derivative(mut self, deriv: impl Fn(f64) -> Result<f64> + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(deriv));
        self
    }

    pub fn eval(&self, u: f64) -> Result<f64> {
        let u = u.abs();
        if u >= self.support {
            return Ok(0.0);
        }
        (self.eval)(u)
    }

    /// `g'(u)`, odd in `u`.
    pub fn derivative(&self, u: f64) -> Result<f64> {
        let d = self.deriv.as_ref().ok_or(Error::MissingDerivative)?;
        if u.abs() >= self.support {
            return Ok(0.0);
        }
        Ok(u.signum() * d(u.abs())?)
    }

    pub fn has_derivative(&self) -> bool {
        self.deriv.is_some()
    }

    /// Supplies `g'` on a finite support `[−T, T]` as a regular part plus
    /// the edge term `−J sinh u / √(cosh T − cosh u)`.
    pub fn with_edge_derivative(
        mut self,
        regular: impl Fn(f64) -> Result<f64> + Send + Sync + 'static,
        jump: f64,
    ) -> Self {
        let regular: FallibleFn = Arc::new(regular);
        let t = self.support;
        let r = regular.clone();
        self.deriv = Some(Arc::new(move |u| Ok(r(u)? - jump * u.sinh() / cosh_diff(t, u).sqrt())));
        self.edge = Some(EdgeSplit { regular, jump });
        self
    }

    /// `(1/2π)(sech(u−t) + sech(u+t))`, the pair of `cos(rt)/cosh(πr/2)`.
    pub fn wave(t: f64) -> Self {
        let g = move |u: f64| ((u - t).cosh().recip() + (u + t).cosh().recip()) / (2.0 * PI);
        let dg = move |u: f64| {
            let term = |x: f64| -x.tanh() / x.cosh();
            Ok((term(u - t) + term(u + t)) / (2.0 * PI))
        };
        IntermediateG::new(move |u| Ok(g(u)), f64::INFINITY, t.abs() + 60.0).with_derivative(dg)
    }
}

/// `√2 ∫_{|u|}^∞ k(ρ) sinh ρ / √(cosh ρ − cosh u) dρ`.
pub fn abel_forward(k: &RadialKernel, u: f64, cfg: &QuadConfig) -> Result<f64> {
    let u = u.abs();
    let top = k.tail_cutoff(u);
    if u >= top {
        return Ok(0.0);
    }
    let mid = (u + 1.0).min(top);
    // near the singular end: dρ sinh ρ / √(cosh ρ − cosh u) = 2 dv
    let near = try_integrate_panels(
        |v| Ok(2.0 * k.eval(shifted(u, v).0)),
        &knot_breaks_v(u, mid, k.knot_step),
        cfg,
    )?;
    let far = if mid < top {
        try_integrate_panels(
            |r| Ok(k.eval(r) * r.sinh() / cosh_diff(r, u).sqrt()),
            &knot_breaks(mid, top, k.knot_step),
            cfg,
        )?
        .value
    } else {
        0.0
    };
    Ok(SQRT_2 * (near.value + far))
}

/// `g'(u)` obtained by differentiating the forward transform. Needs `k'`;
/// a jump of `k` at a finite support end contributes the boundary term
/// `−√2 k(T) sinh u / √(cosh T − cosh u)`.
pub fn abel_forward_derivative(k: &RadialKernel, u: f64, cfg: &QuadConfig) -> Result<f64> {
    let regular = abel_forward_derivative_regular(k, u, cfg)?;
    let t = k.support_bound;
    if !t.is_finite() || u.abs() >= t {
        return Ok(regular);
    }
    Ok(regular - SQRT_2 * k.eval(t) * u.sinh() / cosh_diff(t, u.abs()).sqrt())
}

/// `g'(u)` without the edge term of a finite support.
fn abel_forward_derivative_regular(k: &RadialKernel, u: f64, cfg: &QuadConfig) -> Result<f64> {
    let kd = k.deriv.as_ref().ok_or(Error::MissingDerivative)?;
    let sign = u.signum();
    let u = u.abs();
    let top = k.tail_cutoff(u);
    if u >= top || u == 0.0 {
        return Ok(0.0);
    }
    let mid = (u + 1.0).min(top);
    let vmax = cosh_diff(mid, u).sqrt();
    let near = try_integrate_panels(
        |v| {
            let (r, sh) = shifted(u, v);
            Ok(2.0 * kd(r) / sh)
        },
        &panel_breaks(0.0, vmax, PANEL_WIDTH),
        cfg,
    )?;
    let far = if mid < top {
        try_integrate_panels(
            |r| Ok(kd(r) / cosh_diff(r, u).sqrt()),
            &panel_breaks(mid, top, PANEL_WIDTH),
            cfg,
        )?
        .value
    } else {
        0.0
    };
    Ok(sign * u.sinh() * SQRT_2 * (near.value + far))
}

/// The intermediate function of `k`, evaluated lazily by quadrature.
pub fn abel_forward_g(k: &RadialKernel, cfg: &QuadConfig) -> IntermediateG {
    let support = k.support_bound;
    let u_max = if support.is_finite() {
        support
    } else {
        k.tail_cutoff(0.0)
    };
    let kk = k.clone();
    let c = *cfg;
    let mut g = IntermediateG::new(move |u| abel_forward(&kk, u, &c), support, u_max);
    if k.has_derivative() {
        let kk = k.clone();
        if support.is_finite() {
            let jump = SQRT_2 * k.eval(support);
            g = g.with_edge_derivative(move |u| abel_forward_derivative_regular(&kk, u, &c), jump);
        } else {
            g = g.with_derivative(move |u| abel_forward_derivative(&kk, u, &c));
        }
    }
    g
}

/// A Fourier-side value together with its quadrature error and regime.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierValue {
    pub value: f64,
    pub abs_error: f64,
    pub regime: Regime,
}

/// `h(r) = 2 ∫_0^{u_max} cos(ru) g(u) du` (or `cosh(au)` for `r = ia`).
pub fn fourier(g: &IntermediateG, r: SpectralPoint, u_max: f64, cfg: &QuadConfig) -> Result<FourierValue> {
    let top = u_max.min(g.support);
    let regime = Regime::for_parameter(r.magnitude());
    if !(top > 0.0) {
        return Ok(FourierValue {
            value: 0.0,
            abs_error: 0.0,
            regime,
        });
    }
    let integrand = |u: f64| Ok(r.kernel(u) * g.eval(u)?);
    let (value, abs_error) = if g.support.is_finite() && top >= g.support {
        // u = T − w² on the last unit removes a square-root edge at T
        let m = top.min(1.0);
        let plain = try_integrate_panels(integrand, &panel_breaks(0.0, top - m, PANEL_WIDTH), cfg)?;
        let edge = try_integrate(
            |w| {
                let u = top - w * w;
                Ok(2.0 * w * r.kernel(u) * g.eval(u)?)
            },
            0.0,
            m.sqrt(),
            cfg,
        )?;
        (plain.value + edge.value, plain.abs_error + edge.abs_error)
    } else {
        let i = try_integrate_panels(integrand, &panel_breaks(0.0, top, PANEL_WIDTH), cfg)?;
        (i.value, i.abs_error)
    };
    Ok(FourierValue {
        value: 2.0 * value,
        abs_error: 2.0 * abs_error,
        regime,
    })
}

/// `g(u) = (1/π) ∫_0^{s_max} cos(su) h(s) ds`.
pub fn inverse_fourier(h: &SpectralFunction, u: f64, s_max: f64, cfg: &QuadConfig) -> Result<f64> {
    let i = try_integrate_panels(
        |s| Ok((s * u).cos() * h.eval(SpectralPoint::Real(s))?),
        &panel_breaks(0.0, s_max, PANEL_WIDTH),
        cfg,
    )?;
    Ok(i.value / PI)
}

/// `g'(u) = −(1/π) ∫_0^{s_max} s sin(su) h(s) ds`.
pub fn inverse_fourier_derivative(h: &SpectralFunction, u: f64, s_max: f64, cfg: &QuadConfig) -> Result<f64> {
    let i = try_integrate_panels(
        |s| Ok(s * (s * u).sin() * h.eval(SpectralPoint::Real(s))?),
        &panel_breaks(0.0, s_max, PANEL_WIDTH),
        cfg,
    )?;
    Ok(-i.value / PI)
}

/// `k(ρ) = −1/(√2 π) ∫_ρ^{u_max} g'(u) / √(cosh u − cosh ρ) du`.
pub fn abel_inverse(g: &IntermediateG, rho: f64, u_max: f64, cfg: &QuadConfig) -> Result<f64> {
    if !g.has_derivative() {
        return Err(Error::MissingDerivative);
    }
    let rho = rho.abs();
    let top = u_max.min(g.support);
    if rho >= top {
        return Ok(0.0);
    }
    let finite_end = g.support.is_finite() && top >= g.support;
    // the edge term inverts in closed form: ∫ sinh u du / √((cosh T − cosh u)(cosh u − cosh ρ)) = π
    let (deriv, edge_value): (FallibleFn, f64) = match &g.edge {
        Some(e) if finite_end => (e.regular.clone(), e.jump / SQRT_2),
        _ => (g.deriv.clone().expect("checked above"), 0.0),
    };
    let dg = |u: f64| deriv(u);
    let integral = if finite_end && top - rho <= 2.0 {
        abel_inverse_angular(&dg, rho, top, cfg)?
    } else {
        let mid = (rho + 1.0).min(top);
        let near = try_integrate_panels(
            |v| {
                let (u, sh) = shifted(rho, v);
                Ok(2.0 * dg(u)? / sh)
            },
            &knot_breaks_v(rho, mid, g.knot_step),
            cfg,
        )?
        .value;
        let end = if finite_end { top - 1.0 } else { top };
        let plain = |u: f64| Ok(dg(u)? / cosh_diff(u, rho).sqrt());
        let body = if mid < end {
            try_integrate_panels(plain, &knot_breaks(mid, end, g.knot_step), cfg)?.value
        } else {
            0.0
        };
        let edge = if finite_end {
            // u = T − w²
            try_integrate(
                |w| {
                    let u = top - w * w;
                    Ok(2.0 * w * dg(u)? / cosh_diff(u, rho).sqrt())
                },
                0.0,
                1.0,
                cfg,
            )?
            .value
        } else {
            0.0
        };
        near + body + edge
    };
    Ok(edge_value - integral / (SQRT_2 * PI))
}

/// Both ends singular and close together: `cosh u = cosh ρ + (cosh T − cosh ρ) sin²θ`.
fn abel_inverse_angular<D>(dg: &D, rho: f64, top: f64, cfg: &QuadConfig) -> Result<f64>
where
    D: Fn(f64) -> Result<f64>,
{
    let span = cosh_diff(top, rho);
    let base = cosh_m1(rho);
    let root = span.sqrt();
    let i = try_integrate(
        |theta: f64| {
            let (s, c) = theta.sin_cos();
            let cm1 = base + span * s * s;
            let sh = (cm1 * (cm1 + 2.0)).sqrt();
            let u = sh.asinh().min(top);
            Ok(dg(u)? * 2.0 * root * c / sh)
        },
        0.0,
        FRAC_PI_2,
        cfg,
    )?;
    Ok(i.value)
}

/// An even spectral function `h`, defined at real and imaginary parameters.
#[derive(Clone)]
pub struct SpectralFunction {
    pub name: String,
    eval: SpectralFn,
    pub even: bool,
    /// Truncation point for integrals over `s`.
    pub s_max: f64,
    /// Truncation point for the intermediate function.
    pub u_max: f64,
    /// Intermediate function, when `h` was built from one.
    pub intermediate: Option<IntermediateG>,
}

impl fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpectralFunction")
            .field("name", &self.name)
            .field("s_max", &self.s_max)
            .field("u_max", &self.u_max)
            .finish()
    }
}

impl SpectralFunction {
    pub fn new(
        name: impl Into<String>,
        eval: impl Fn(SpectralPoint) -> Result<f64> + Send + Sync + 'static,
        s_max: f64,
        u_max: f64,
    ) -> Self {
        SpectralFunction {
            name: name.into(),
            eval: Arc::new(eval),
            even: true,
            s_max,
            u_max,
            intermediate: None,
        }
    }

    pub fn eval(&self, p: SpectralPoint) -> Result<f64> {
        (self.eval)(p)
    }

    pub fn eval_real(&self, s: f64) -> Result<f64> {
        self.eval(SpectralPoint::Real(s))
    }

    /// `h_t(s) = cos(st) / cosh(πs/2)`; `cosh(at)/cos(πa/2)` at `s = ia`.
    pub fn wave(t: f64) -> Self {
        let f = move |p: SpectralPoint| {
            Ok(match p {
                SpectralPoint::Real(s) => (s * t).cos() / (FRAC_PI_2 * s).cosh(),
                SpectralPoint::Imag(a) => (a * t).cosh() / (FRAC_PI_2 * a).cos(),
            })
        };
        SpectralFunction::new(format!("wave(t={t})"), f, 24.0, t.abs() + 32.0)
    }

    pub fn zero() -> Self {
        SpectralFunction::new("zero", |_| Ok(0.0), 1.0, 1.0)
    }

    /// `(s, h(s))` at each real `s` of the grid.
    pub fn sample(&self, grid: &[f64]) -> Result<Vec<(f64, f64)>> {
        grid.par_iter().map(|&s| Ok((s, self.eval_real(s)?))).collect()
    }
}

/// `h = S(k)`, evaluated lazily by nested quadrature.
pub fn selberg_transform(k: &RadialKernel, cfg: &QuadConfig) -> SpectralFunction {
    let g = abel_forward_g(k, cfg);
    let gg = g.clone();
    let c = *cfg;
    let u_max = g.u_max;
    let mut h = SpectralFunction::new(
        format!("S[{}]", k.name),
        move |p| Ok(fourier(&gg, p, u_max, &c)?.value),
        100.0,
        u_max,
    );
    h.intermediate = Some(g);
    h
}

/// Grid and tolerance choices for `inverse_selberg`.
#[derive(Clone, Copy, Debug)]
pub struct InverseOptions {
    pub step: f64,
    pub quad: QuadConfig,
}

impl Default for InverseOptions {
    fn default() -> Self {
        InverseOptions {
            step: DEFAULT_GRID_STEP,
            quad: QuadConfig::default(),
        }
    }
}

fn grid_len(end: f64, step: f64) -> (usize, f64) {
    let n = ((end / step).round() as usize).max(1) + 1;
    (n, end / (n - 1) as f64)
}

/// `k = S⁻¹(h)`, tabulated on a uniform `ρ` grid.
///
/// When `h` carries its intermediate function with a derivative that is
/// used directly; otherwise `g'` is tabulated from the differentiated
/// inverse Fourier integral.
pub fn inverse_selberg(h: &SpectralFunction, opts: &InverseOptions) -> Result<RadialKernel> {
    let cfg = opts.quad;
    let g = match &h.intermediate {
        Some(g) if g.has_derivative() => g.clone(),
        _ => {
            let (n, step) = grid_len(h.u_max, opts.step);
            let values = (0..n)
                .into_par_iter()
                .map(|i| inverse_fourier_derivative(h, i as f64 * step, h.s_max, &cfg))
                .collect::<Result<Vec<_>>>()?;
            let table = Table {
                start: 0.0,
                step,
                values,
            };
            let hh = h.clone();
            let s_max = h.s_max;
            let mut g = IntermediateG::new(move |u| inverse_fourier(&hh, u, s_max, &cfg), f64::INFINITY, h.u_max)
                .with_derivative(move |u| Ok(table.eval(u)));
            g.knot_step = Some(step);
            g
        }
    };
    let end = g.u_max;
    let (n, step) = grid_len(end, opts.step);
    let values = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rho = i as f64 * step;
            if i == n - 1 && g.support.is_finite() {
                // left limit at the support end
                rho = end - 1e-3 * step;
            }
            abel_inverse(&g, rho, end, &cfg)
        })
        .collect::<Result<Vec<_>>>()?;
    RadialKernel::from_table(
        format!("S^-1[{}]", h.name),
        Table {
            start: 0.0,
            step,
            values,
        },
    )
}

/// `h_{t,λ}(r) = (4√2 / cosh(t)^{√σ/2}) ∫_0^t cos(ru) √(1 − cosh u / cosh t) du`,
/// the transform of `1_{ρ<=t} / cosh(t)^{(1+√σ)/2}`.
pub fn normalized_ball_transform(t: f64, sigma: f64, r: SpectralPoint, cfg: &QuadConfig) -> Result<f64> {
    let scale = 4.0 * SQRT_2 * (-(sigma.sqrt() / 2.0) * log_cosh(t)).exp();
    Ok(scale * ball_profile_integral(t, r, cfg)?.value)
}

/// `∫_0^t kernel_r(u) √(1 − cosh u / cosh t) du`, with its error estimate.
pub fn ball_profile_integral(t: f64, r: SpectralPoint, cfg: &QuadConfig) -> Result<Integral> {
    let m = t.min(1.0);
    let plain = |u: f64| Ok(r.kernel(u) * ball_profile(t, u));
    let body = try_integrate_panels(plain, &panel_breaks(0.0, t - m, PANEL_WIDTH), cfg)?;
    let edge = try_integrate(
        |w| {
            let u = t - w * w;
            Ok(2.0 * w * r.kernel(u) * ball_profile(t, u))
        },
        0.0,
        m.sqrt(),
        cfg,
    )?;
    Ok(Integral {
        value: body.value + edge.value,
        abs_error: body.abs_error + edge.abs_error,
        evaluations: body.evaluations + edge.evaluations,
    })
}

/// `√(1 − cosh u / cosh t)` for `0 <= u <= t`, via
/// `(1 − e^{−(t−u)})(1 − e^{−(t+u)}) / (1 + e^{−2t})`.
pub fn ball_profile(t: f64, u: f64) -> f64 {
    let u = u.abs();
    if u >= t {
        return 0.0;
    }
    let num = (-(t - u)).exp_m1() * (-(t + u)).exp_m1();
    (num / (1.0 + (-2.0 * t).exp())).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate;
    use proptest::prelude::*;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    /// Independent closed form for the unnormalized ball: `2√2 √(cosh t − cosh u)`.
    fn ball_g(t: f64, u: f64) -> f64 {
        if u.abs() >= t {
            0.0
        } else {
            2.0 * SQRT_2 * (t.cosh() - u.cosh()).sqrt()
        }
    }

    #[test]
    fn abel_forward_ball_examples() {
        let k = RadialKernel::ball(2.0).unwrap();
        let v = abel_forward(&k, 1.0, &cfg()).unwrap();
        assert!((v - ball_g(2.0, 1.0)).abs() < 1e-12);
        assert_eq!(abel_forward(&k, 2.0, &cfg()).unwrap(), 0.0);
        assert_eq!(abel_forward(&k, 3.0, &cfg()).unwrap(), 0.0);
        for u in [0.0, 0.3, 1.7, 1.99] {
            let v = abel_forward(&k, u, &cfg()).unwrap();
            assert!((v - ball_g(2.0, u)).abs() < 1e-10 * ball_g(2.0, 0.0), "u={u}");
        }
    }

    #[test]
    fn sech_squared_pair() {
        let k = RadialKernel::sech_squared();
        let c = PI / SQRT_2;
        for u in [0.0, 0.5, 2.0, 6.0] {
            let v = abel_forward(&k, u, &cfg()).unwrap();
            let expect = c * u.cosh().powf(-1.5);
            assert!((v - expect).abs() < 1e-9, "u={u}: {v} vs {expect}");
            let d = abel_forward_derivative(&k, u, &cfg()).unwrap();
            let dexpect = -1.5 * c * u.cosh().powf(-2.5) * u.sinh();
            assert!((d - dexpect).abs() < 1e-9, "u={u}: {d} vs {dexpect}");
        }
    }

    #[test]
    fn ball_derivative_matches_closed_form() {
        let k = RadialKernel::ball(2.0).unwrap();
        for u in [0.4, 1.0, 1.9] {
            let d = abel_forward_derivative(&k, u, &cfg()).unwrap();
            let expect = -SQRT_2 * u.sinh() / (2f64.cosh() - u.cosh()).sqrt();
            assert!((d - expect).abs() < 1e-12);
            let h = 1e-6;
            let fd = (ball_g(2.0, u + h) - ball_g(2.0, u - h)) / (2.0 * h);
            assert!((d - fd).abs() < 1e-5);
        }
    }

    #[test]
    fn fourier_examples() {
        let k = RadialKernel::ball(2.0).unwrap();
        let g = abel_forward_g(&k, &cfg());
        let h0 = fourier(&g, SpectralPoint::Real(0.0), g.u_max, &cfg()).unwrap();
        // independent: plain adaptive quadrature of the closed form
        let oracle = 2.0
            * integrate(
                |u| ball_g(2.0, u),
                0.0,
                2.0,
                &QuadConfig {
                    abs_tol: 1e-12,
                    ..cfg()
                },
            )
            .unwrap()
            .value;
        assert!((h0.value - oracle).abs() < 1e-8, "{} vs {oracle}", h0.value);
        assert_eq!(h0.regime, Regime::Validated);

        let zero = IntermediateG::new(|_| Ok(0.0), f64::INFINITY, 10.0);
        assert_eq!(
            fourier(&zero, SpectralPoint::Real(1.0), 10.0, &cfg()).unwrap().value,
            0.0
        );

        let gw = IntermediateG::wave(3.0);
        let v = fourier(&gw, SpectralPoint::Real(1.0), gw.u_max, &cfg()).unwrap().value;
        assert!((v - 3f64.cos() / FRAC_PI_2.cosh()).abs() < 1e-9);
        let big = fourier(&gw, SpectralPoint::Real(60.0), gw.u_max, &cfg()).unwrap();
        assert_eq!(big.regime, Regime::Oscillatory);
    }

    #[test]
    fn wave_pair_at_imaginary_parameter() {
        let gw = IntermediateG::wave(2.0);
        let h = SpectralFunction::wave(2.0);
        for a in [0.1, 0.3, 0.45] {
            let v = fourier(&gw, SpectralPoint::Imag(a), gw.u_max, &cfg()).unwrap().value;
            let expect = h.eval(SpectralPoint::Imag(a)).unwrap();
            assert!((v - expect).abs() < 1e-8, "a={a}");
        }
    }

    #[test]
    fn inverse_fourier_examples() {
        let h = SpectralFunction::wave(3.0);
        let v = inverse_fourier(&h, 0.0, h.s_max, &cfg()).unwrap();
        assert!((v - 3f64.cosh().recip() / PI).abs() < 1e-10);
        assert_eq!(
            inverse_fourier(&SpectralFunction::zero(), 1.0, 10.0, &cfg()).unwrap(),
            0.0
        );
        let sech = SpectralFunction::new("sech", |p| Ok(1.0 / (FRAC_PI_2 * p.magnitude()).cosh()), 24.0, 40.0);
        let v = inverse_fourier(&sech, 1.0, 24.0, &cfg()).unwrap();
        assert!((v - 1f64.cosh().recip() / PI).abs() < 1e-10);
    }

    #[test]
    fn closed_form_wave_pair() {
        for t in [1.0, 3.0] {
            let h = SpectralFunction::wave(t);
            let gw = IntermediateG::wave(t);
            for i in 0..=40 {
                let u = -10.0 + 0.5 * i as f64;
                let v = inverse_fourier(&h, u, h.s_max, &cfg()).unwrap();
                assert!((v - gw.eval(u).unwrap()).abs() < 1e-8, "t={t} u={u}");
                let d = inverse_fourier_derivative(&h, u, h.s_max, &cfg()).unwrap();
                assert!((d - gw.derivative(u).unwrap()).abs() < 1e-8, "t={t} u={u}");
            }
        }
    }

    #[test]
    fn abel_inverse_examples() {
        let k = RadialKernel::ball(2.0).unwrap();
        let g = abel_forward_g(&k, &cfg());
        for rho in [0.0, 0.5, 1.0, 1.5, 1.9] {
            let v = abel_inverse(&g, rho, g.u_max, &cfg()).unwrap();
            assert!((v - 1.0).abs() < 5e-3, "rho={rho}: {v}");
        }
        assert_eq!(abel_inverse(&g, 2.5, g.u_max, &cfg()).unwrap(), 0.0);

        let constant = IntermediateG::new(|_| Ok(1.0), f64::INFINITY, 20.0).with_derivative(|_| Ok(0.0));
        assert_eq!(abel_inverse(&constant, 1.0, 20.0, &cfg()).unwrap(), 0.0);

        let no_deriv = IntermediateG::new(|_| Ok(1.0), f64::INFINITY, 20.0);
        assert!(matches!(
            abel_inverse(&no_deriv, 1.0, 20.0, &cfg()),
            Err(Error::MissingDerivative)
        ));

        let sech = RadialKernel::sech_squared();
        let gs = abel_forward_g(&sech, &cfg());
        for rho in [0.0, 1.0, 3.0] {
            let v = abel_inverse(&gs, rho, gs.u_max, &cfg()).unwrap();
            assert!((v - rho.cosh().powi(-2)).abs() < 1e-7, "rho={rho}: {v}");
        }
    }

    #[test]
    fn wave_kernel_decays() {
        let gw = IntermediateG::wave(4.0);
        let near = abel_inverse(&gw, 0.0, gw.u_max, &cfg()).unwrap().abs();
        let k5 = abel_inverse(&gw, 5.0, gw.u_max, &cfg()).unwrap();
        let k20 = abel_inverse(&gw, 20.0, gw.u_max, &cfg()).unwrap();
        assert!(k5.abs() < near.max(1.0));
        // |k_t(ρ)| ≲ e^{−3(ρ−t)/2}
        assert!(k20.abs() < 10.0 * (-1.5 * 16.0f64).exp(), "{k20}");
    }

    #[test]
    fn lemma_closed_form_matches_transform() {
        let c = cfg();
        for (t, sigma) in [(2.0, 0.04), (5.0, 0.01)] {
            let h = selberg_transform(&RadialKernel::normalized_ball(t, sigma).unwrap(), &c);
            let pts = [
                SpectralPoint::Real(0.0),
                SpectralPoint::Real(0.7),
                SpectralPoint::Real(3.0),
                SpectralPoint::Imag(0.2),
                SpectralPoint::Imag(0.45),
            ];
            for p in pts {
                let a = h.eval(p).unwrap();
                let b = normalized_ball_transform(t, sigma, p, &c).unwrap();
                assert!((a - b).abs() < 1e-8, "t={t} {p}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn ball_round_trip() {
        let c = cfg();
        let k = RadialKernel::ball(2.0).unwrap();
        let h = selberg_transform(&k, &c);
        let back = inverse_selberg(&h, &InverseOptions::default()).unwrap();
        for rho in [0.0, 0.55, 1.23, 1.95] {
            assert!((back.eval(rho) - 1.0).abs() < 1e-6, "rho={rho}: {}", back.eval(rho));
        }
        let h2 = selberg_transform(&back, &c);
        for s in [0.0, 0.5, 1.0, 2.0] {
            let a = h.eval_real(s).unwrap();
            let b = h2.eval_real(s).unwrap();
            assert!((a - b).abs() < 1e-4, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn wave_round_trip() {
        let c = cfg();
        let h = SpectralFunction::wave(2.0);
        let k = inverse_selberg(&h, &InverseOptions::default()).unwrap();
        let back = selberg_transform(&k, &c);
        for s in [0.0, 0.5, 1.0, 2.0] {
            let a = h.eval_real(s).unwrap();
            let b = back.eval_real(s).unwrap();
            assert!((a - b).abs() < 1e-4, "s={s}: {a} vs {b}");
        }
    }

    #[test]
    fn zero_round_trip() {
        let k = inverse_selberg(&SpectralFunction::zero(), &InverseOptions::default()).unwrap();
        for rho in [0.0, 0.3, 0.9] {
            assert_eq!(k.eval(rho), 0.0);
        }
    }

    #[test]
    fn ball_profile_is_stable() {
        assert_eq!(ball_profile(3.0, 3.0), 0.0);
        let direct = (1.0 - 1f64.cosh() / 3f64.cosh()).sqrt();
        assert!((ball_profile(3.0, 1.0) - direct).abs() < 1e-15);
        // no overflow at large radius
        assert!(ball_profile(800.0, 10.0).is_finite());
        assert!((log_cosh(800.0) - (800.0 - std::f64::consts::LN_2)).abs() < 1e-12);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn transforms_are_even(s in 0.0..10.0f64, t in 0.5..4.0f64) {
            let c = cfg();
            let h = selberg_transform(&RadialKernel::ball(t).unwrap(), &c);
            let a = h.eval_real(s).unwrap();
            let b = h.eval_real(-s).unwrap();
            prop_assert!((a - b).abs() <= 1e-10);
            let g = h.intermediate.as_ref().unwrap();
            prop_assert!((g.eval(s / 3.0).unwrap() - g.eval(-s / 3.0).unwrap()).abs() <= 1e-10);
        }
    }
}

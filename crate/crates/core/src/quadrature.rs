//! Adaptive Gauss-Kronrod quadrature and uniformly sampled functions.
//!
//! The integrator is a global adaptive bisection scheme (QAG style) built on
//! the 7/15 point Gauss-Kronrod pair. Subdivision order is a pure function of
//! the integrand values, so results are reproducible bit for bit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances for the adaptive integrator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadConfig {
    /// Absolute tolerance per integration panel.
    pub abs_tol: f64,
    /// Relative tolerance per panel (used when it is looser than `abs_tol`).
    pub rel_tol: f64,
    /// Bound on the summed error estimate over all panels of a composite rule.
    pub composite_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            abs_tol: 1e-10,
            rel_tol: 1e-12,
            composite_tol: 1e-8,
            max_subdivisions: 2000,
        }
    }
}

impl QuadConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("abs_tol", self.abs_tol),
            ("rel_tol", self.rel_tol),
            ("composite_tol", self.composite_tol),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("tolerance must be positive, got {v}")));
            }
        }
        if self.max_subdivisions == 0 {
            return Err(Error::invalid("max_subdivisions", "must be at least 1"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

#[derive(Clone, Copy, Debug)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        let min_err = 50.0 * f64::EPSILON * res_abs;
        if min_err > scaled {
            scaled = min_err;
        }
    }
    scaled
}

fn kronrod15<F>(f: &mut F, lo: f64, hi: f64) -> Result<Segment>
where
    F: FnMut(f64) -> Result<f64>,
{
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center)?;
    let mut res_g = fc * WG[3];
    let mut res_k = fc * WGK[7];
    let mut res_abs = res_k.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx)?;
        let f2 = f(center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }
    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (fc - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = res_k * half;
    let error = rescale_error((res_k - res_g) * half, res_abs * half.abs(), res_asc * half.abs());
    if !value.is_finite() {
        return Err(Error::QuadratureNonConvergence {
            lo,
            hi,
            estimate: f64::INFINITY,
            tolerance: 0.0,
        });
    }
    Ok(Segment { lo, hi, value, error })
}

/// Integrates a fallible integrand over `[lo, hi]`.
///
/// Errors raised by the integrand abort the integration and are returned as-is.
pub fn try_integrate<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    if lo == hi {
        return Ok(Integral {
            value: 0.0,
            abs_error: 0.0,
            evaluations: 0,
        });
    }
    let mut segments = vec![kronrod15(&mut f, lo, hi)?];
    let mut evaluations = 15;
    loop {
        let total: f64 = segments.iter().map(|s| s.value).sum();
        let err: f64 = segments.iter().map(|s| s.error).sum();
        let tol = cfg.abs_tol.max(cfg.rel_tol * total.abs());
        if err <= tol {
            return Ok(Integral {
                value: total,
                abs_error: err,
                evaluations,
            });
        }
        if segments.len() >= cfg.max_subdivisions {
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                estimate: err,
                tolerance: tol,
            });
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, be), (i, s)| {
                if s.error > be {
                    (i, s.error)
                } else {
                    (bi, be)
                }
            });
        let seg = segments[worst];
        let mid = 0.5 * (seg.lo + seg.hi);
        if mid <= seg.lo || mid >= seg.hi {
            return Err(Error::QuadratureNonConvergence {
                lo,
                hi,
                estimate: err,
                tolerance: tol,
            });
        }
        let left = kronrod15(&mut f, seg.lo, mid)?;
        let right = kronrod15(&mut f, mid, seg.hi)?;
        evaluations += 30;
        segments[worst] = left;
        segments.insert(worst + 1, right);
    }
}

pub fn integrate<F>(mut f: F, lo: f64, hi: f64, cfg: &QuadConfig) -> Result<Integral>
where
    F: FnMut(f64) -> f64,
{
    try_integrate(|x| Ok(f(x)), lo, hi, cfg)
}

/// Composite rule over fixed panels `breaks[i]..breaks[i+1]`, each integrated
/// adaptively; the summed error must stay below `composite_tol`.
pub fn try_integrate_panels<F>(mut f: F, breaks: &[f64], cfg: &QuadConfig) -> Result<Integral>
where
    F: FnMut(f64) -> Result<f64>,
{
    let mut out = Integral {
        value: 0.0,
        abs_error: 0.0,
        evaluations: 0,
    };
    for w in breaks.windows(2) {
        let part = try_integrate(&mut f, w[0], w[1], cfg)?;
        out.value += part.value;
        out.abs_error += part.abs_error;
        out.evaluations += part.evaluations;
    }
    let tol = cfg.composite_tol.max(cfg.rel_tol * out.value.abs());
    if out.abs_error > tol {
        return Err(Error::QuadratureNonConvergence {
            lo: breaks.first().copied().unwrap_or(0.0),
            hi: breaks.last().copied().unwrap_or(0.0),
            estimate: out.abs_error,
            tolerance: tol,
        });
    }
    Ok(out)
}

/// Evenly spaced panel breakpoints of width at most `width` covering `[lo, hi]`.
pub fn panel_breaks(lo: f64, hi: f64, width: f64) -> Vec<f64> {
    let n = (((hi - lo) / width).ceil() as usize).max(1);
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo + (hi - lo) * i as f64 / n as f64
            }
        })
        .collect()
}

/// A function sampled on a uniform grid, evaluated by local cubic
/// (four point Lagrange) interpolation. Zero outside the sampled range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub start: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl Table {
    pub fn sample<F: FnMut(f64) -> f64>(start: f64, step: f64, n: usize, mut f: F) -> Self {
        let values = (0..n).map(|i| f(start + step * i as f64)).collect();
        Table { start, step, values }
    }

    pub fn try_sample<F>(start: f64, step: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> Result<f64>,
    {
        let values = (0..n).map(|i| f(start + step * i as f64)).collect::<Result<Vec<_>>>()?;
        Ok(Table { start, step, values })
    }

    pub fn end(&self) -> f64 {
        self.start + self.step * (self.values.len().saturating_sub(1)) as f64
    }

    pub fn abscissa(&self, i: usize) -> f64 {
        self.start + self.step * i as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        if n == 0 || x < self.start || x > self.end() {
            return 0.0;
        }
        if n < 4 {
            // linear fallback
            let t = (x - self.start) / self.step;
            let i = (t.floor() as usize).min(n.saturating_sub(2));
            if n == 1 {
                return self.values[0];
            }
            let f = t - i as f64;
            return self.values[i] * (1.0 - f) + self.values[i + 1] * f;
        }
        let t = (x - self.start) / self.step;
        let i = (t.floor() as isize).clamp(1, n as isize - 3) as usize;
        let p = t - i as f64;
        let (y0, y1, y2, y3) = (
            self.values[i - 1],
            self.values[i],
            self.values[i + 1],
            self.values[i + 2],
        );
        // nodes at -1, 0, 1, 2
        -p * (p - 1.0) * (p - 2.0) / 6.0 * y0 + (p + 1.0) * (p - 1.0) * (p - 2.0) / 2.0 * y1
            - (p + 1.0) * p * (p - 2.0) / 2.0 * y2
            + (p + 1.0) * p * (p - 1.0) / 6.0 * y3
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| x * x * x - 2.0 * x, -1.0, 3.0, &cfg).unwrap();
        assert!((r.value - 12.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory_and_peaked() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| (20.0 * x).cos(), 0.0, 3.0, &cfg).unwrap();
        assert!((r.value - (60.0f64).sin() / 20.0).abs() < 1e-11);
        let r = integrate(|x| 1.0 / (1e-4 + x * x), -1.0, 1.0, &cfg).unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!((r.value - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn sqrt_endpoint_converges() {
        let cfg = QuadConfig::default();
        let r = integrate(|x| (1.0 - x).sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-10);
    }

    #[test]
    fn unreachable_tolerance_reports_nonconvergence() {
        let cfg = QuadConfig {
            abs_tol: 1e-30,
            rel_tol: 1e-30,
            composite_tol: 1e-30,
            max_subdivisions: 50,
        };
        let err = integrate(|x| x.abs().sqrt() * 1e6, -1.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::QuadratureNonConvergence { .. }));
    }

    #[test]
    fn integrand_error_propagates() {
        let cfg = QuadConfig::default();
        let err = try_integrate(|_| Err(Error::MissingDerivative), 0.0, 1.0, &cfg).unwrap_err();
        assert!(matches!(err, Error::MissingDerivative));
    }

    #[test]
    fn table_interpolates_cubics_exactly() {
        let t = Table::sample(0.0, 0.1, 50, |x| 2.0 * x * x * x - x + 1.0);
        for &x in &[0.0, 0.03, 0.55, 2.41, 4.9] {
            let exact = 2.0 * x * x * x - x + 1.0;
            assert!((t.eval(x) - exact).abs() < 1e-12, "x={x}");
        }
        assert_eq!(t.eval(5.2), 0.0);
        assert_eq!(t.eval(-0.1), 0.0);
    }

    #[test]
    fn panel_breaks_cover_range() {
        let b = panel_breaks(0.0, 2.5, 1.0);
        assert_eq!(b, vec![0.0, 2.5 / 3.0, 5.0 / 3.0, 2.5]);
    }
}

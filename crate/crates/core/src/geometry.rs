//! Upper half-plane points and their orientation preserving isometries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance used for projective matrix equality.
pub const ISOMETRY_EQ_TOL: f64 = 1e-9;

/// A point `x + iy` of the upper half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Result<Self> {
        if !(y > 0.0) || !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(
                "point",
                format!("({x}, {y}) is not in the upper half-plane"),
            ));
        }
        Ok(Point { x, y })
    }

    /// The point `i`.
    pub const I: Point = Point { x: 0.0, y: 1.0 };

    fn to_complex(self) -> Complex64 {
        Complex64::new(self.x, self.y)
    }
}

impl std::str::FromStr for Point {
    type Err = Error;

    /// Parses `x,y`.
    fn from_str(s: &str) -> Result<Self> {
        let mut parts = s.split(',');
        let (Some(xs), Some(ys), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(Error::invalid("point", format!("expected `x,y`, got `{s}`")));
        };
        let x = xs
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid("point", e.to_string()))?;
        let y = ys
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::invalid("point", e.to_string()))?;
        Point::new(x, y)
    }
}

/// Real unit-determinant matrix `[[a, b], [c, d]]` acting by `z -> (az+b)/(cz+d)`.
///
/// Equality is projective: `M` and `-M` are the same isometry.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct Isometry {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds an isometry, rescaling the entries so that the determinant is 1.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det > 0.0) || !det.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "matrix [[{a}, {b}], [{c}, {d}]] has determinant {det}; need a positive one"
            )));
        }
        let s = det.sqrt().recip();
        Ok(Isometry {
            a: a * s,
            b: b * s,
            c: c * s,
            d: d * s,
        })
    }

    pub fn from_row_major(m: [f64; 4]) -> Result<Self> {
        Isometry::new(m[0], m[1], m[2], m[3])
    }

    pub fn to_row_major(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    /// Hyperbolic translation by `length` along the imaginary axis.
    pub fn translation(length: f64) -> Self {
        let e = (0.5 * length).exp();
        Isometry {
            a: e,
            b: 0.0,
            c: 0.0,
            d: e.recip(),
        }
    }

    /// Rotation about `i`; tangent vectors at `i` turn by `2 * theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Isometry {
            a: c,
            b: -s,
            c: s,
            d: c,
        }
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        Isometry {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    pub fn apply(&self, z: Point) -> Point {
        apply(self, z)
    }

    /// `self * other`, i.e. apply `other` first.
    pub fn compose(&self, other: &Isometry) -> Isometry {
        compose(self, other)
    }

    pub fn conjugate_by(&self, k: &Isometry) -> Isometry {
        compose(&compose(k, self), &k.inverse())
    }

    /// Projective equality with absolute tolerance `tol`.
    pub fn approx_eq(&self, other: &Isometry, tol: f64) -> bool {
        let p = self.to_row_major();
        let q = other.to_row_major();
        let same = p.iter().zip(&q).all(|(x, y)| (x - y).abs() <= tol);
        let flipped = p.iter().zip(&q).all(|(x, y)| (x + y).abs() <= tol);
        same || flipped
    }

    pub fn is_identity(&self, tol: f64) -> bool {
        self.approx_eq(&Isometry::IDENTITY, tol)
    }

    /// Representative with the first entry of magnitude above `1e-6` positive.
    pub fn sign_normalized(&self) -> Isometry {
        let m = self.to_row_major();
        let flip = m.iter().find(|v| v.abs() > 1e-6).is_some_and(|v| *v < 0.0);
        if flip {
            Isometry {
                a: -self.a,
                b: -self.b,
                c: -self.c,
                d: -self.d,
            }
        } else {
            *self
        }
    }
}

impl PartialEq for Isometry {
    fn eq(&self, other: &Self) -> bool {
        self.approx_eq(other, ISOMETRY_EQ_TOL)
    }
}

pub fn apply(iso: &Isometry, z: Point) -> Point {
    let zc = z.to_complex();
    let w = (zc * iso.a + iso.b) / (zc * iso.c + iso.d);
    // Im w = Im z / |cz + d|^2, which keeps full relative accuracy
    let den = (iso.c * z.x + iso.d).powi(2) + (iso.c * z.y).powi(2);
    Point { x: w.re, y: z.y / den }
}

pub fn compose(g: &Isometry, h: &Isometry) -> Isometry {
    let a = g.a * h.a + g.b * h.c;
    let b = g.a * h.b + g.b * h.d;
    let c = g.c * h.a + g.d * h.c;
    let d = g.c * h.b + g.d * h.d;
    Isometry { a, b, c, d }
}

/// Hyperbolic distance, `2 asinh(|z - w| / (2 sqrt(Im z Im w)))`.
///
/// Algebraically equal to `arccosh(1 + |z-w|^2 / (2 Im z Im w))` but free of
/// the cancellation that form suffers for nearby points.
pub fn distance(z: Point, w: Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let chord = (dx * dx + dy * dy).sqrt();
    2.0 * (chord / (2.0 * (z.y * w.y).sqrt())).asinh()
}

/// `arccosh(1 + |z-w|^2 / (2 Im z Im w))` with the argument clamped to `>= 1`.
pub fn distance_arccosh(z: Point, w: Point) -> f64 {
    let dx = z.x - w.x;
    let dy = z.y - w.y;
    let arg = 1.0 + (dx * dx + dy * dy) / (2.0 * z.y * w.y);
    arg.max(1.0).acosh()
}

/// Translation length `2 arccosh(|tr| / 2)` of a hyperbolic element; `None`
/// for elliptic, parabolic and identity elements (`|tr| <= 2`).
pub fn translation_length(iso: &Isometry) -> Option<f64> {
    let t = iso.trace().abs();
    if t > 2.0 + 1e-12 {
        Some(2.0 * (0.5 * t).acosh())
    } else {
        None
    }
}

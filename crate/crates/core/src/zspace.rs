//! The twistor fiber `SO(4)/U(2)`: orthogonal complex structures on flat
//! `R^4` compatible with the orientation, parametrized by the unit sphere and
//! by the Riemann sphere through stereographic projection.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `a^2 + b^2 + c^2 = 1`.
pub const UNIT_TOL: f64 = 1e-12;

/// A point of the sphere of orthogonal complex structures on `R^4`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OcsPoint {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl OcsPoint {
    pub fn new(a: f64, b: f64, c: f64) -> Result<Self> {
        let p = OcsPoint { a, b, c };
        let n = p.norm_sq();
        if !n.is_finite() || (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::InvalidInput(format!(
                "({a}, {b}, {c}) is not a unit vector (|v|^2 = {n})"
            )));
        }
        Ok(p)
    }

    /// Projects an arbitrary nonzero vector onto the sphere.
    pub fn normalized(a: f64, b: f64, c: f64) -> Self {
        let n = (a * a + b * b + c * c).sqrt();
        OcsPoint {
            a: a / n,
            b: b / n,
            c: c / n,
        }
    }

    pub fn norm_sq(&self) -> f64 {
        self.a * self.a + self.b * self.b + self.c * self.c
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.b, self.c]
    }

    pub fn north() -> Self {
        OcsPoint { a: 0.0, b: 0.0, c: 1.0 }
    }
}

/// A point of `C ∪ {∞}`. The point at infinity is a tag, never a large float.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ExtendedComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtendedComplex {
    pub fn finite(re: f64, im: f64) -> Self {
        ExtendedComplex::Finite(Complex64::new(re, im))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedComplex::Infinity)
    }

    pub fn as_finite(&self) -> Option<Complex64> {
        match self {
            ExtendedComplex::Finite(z) => Some(*z),
            ExtendedComplex::Infinity => None,
        }
    }

    /// `1/z` on the Riemann sphere.
    pub fn recip(&self) -> Self {
        match self {
            ExtendedComplex::Infinity => ExtendedComplex::Finite(Complex64::new(0.0, 0.0)),
            ExtendedComplex::Finite(z) if *z == Complex64::new(0.0, 0.0) => {
                ExtendedComplex::Infinity
            }
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(z.inv()),
        }
    }

    pub fn conj(&self) -> Self {
        match self {
            ExtendedComplex::Finite(z) => ExtendedComplex::Finite(z.conj()),
            ExtendedComplex::Infinity => ExtendedComplex::Infinity,
        }
    }
}

impl From<Complex64> for ExtendedComplex {
    fn from(z: Complex64) -> Self {
        ExtendedComplex::Finite(z)
    }
}

/// Stereographic coordinate to the unit sphere:
/// `a = 2x/(r^2+1)`, `b = 2y/(r^2+1)`, `c = (r^2-1)/(r^2+1)`.
///
/// For `|z| > 1` the formula is evaluated in the reciprocal coordinate so
/// the relative error stays bounded up to the pole.
pub fn stereo_to_sphere(z: ExtendedComplex) -> OcsPoint {
    match z {
        ExtendedComplex::Infinity => OcsPoint::north(),
        ExtendedComplex::Finite(z) => {
            let r2 = z.norm_sqr();
            if r2 <= 1.0 {
                let d = r2 + 1.0;
                OcsPoint {
                    a: 2.0 * z.re / d,
                    b: 2.0 * z.im / d,
                    c: (r2 - 1.0) / d,
                }
            } else {
                // w = 1/z: x = u/|w|^2, y = -v/|w|^2
                let w = z.inv();
                let s2 = w.norm_sqr();
                let d = 1.0 + s2;
                OcsPoint {
                    a: 2.0 * w.re / d,
                    b: -2.0 * w.im / d,
                    c: (1.0 - s2) / d,
                }
            }
        }
    }
}

/// Inverse of [`stereo_to_sphere`]. The north pole maps to the infinity tag.
pub fn sphere_to_stereo(p: OcsPoint) -> ExtendedComplex {
    let rho2 = p.a * p.a + p.b * p.b;
    if p.c <= 0.0 {
        // z = (a + ib) / (1 - c), well conditioned on the southern hemisphere
        ExtendedComplex::Finite(Complex64::new(p.a, p.b) / (1.0 - p.c))
    } else if rho2 == 0.0 {
        ExtendedComplex::Infinity
    } else {
        // z = (1 + c) / (a - ib), using a^2 + b^2 = 1 - c^2
        ExtendedComplex::Finite(Complex64::new(1.0 + p.c, 0.0) / Complex64::new(p.a, -p.b))
    }
}

/// The 4x4 block matrix `[[aE, bE + cI], [bE - cI, -aE]]`, `E = [[0,1],[-1,0]]`.
pub fn j_matrix(p: OcsPoint) -> Matrix4<f64> {
    let OcsPoint { a, b, c } = p;
    Matrix4::new(
        0.0, a, c, b, //
        -a, 0.0, -b, c, //
        -c, b, 0.0, -a, //
        -b, -c, a, 0.0,
    )
}

/// Convenience: `J_z` for a point of the Riemann sphere.
pub fn j_of(z: ExtendedComplex) -> Matrix4<f64> {
    j_matrix(stereo_to_sphere(z))
}

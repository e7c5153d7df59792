//! Lattices in C and the Weierstrass elliptic function.
//!
//! `℘` is summed row by row: with periods `(1, τ)` each row of the lattice
//! sum has the closed form `π²/sin²(π(z + mτ))`, and the conditionally
//! convergent constant is `G₂(τ) = (π²/3) E₂(τ)`:
//!
//! `℘(z) = -G₂(τ) + Σ_m π²/sin²(π(z + mτ))`.
//!
//! The rows decay like `exp(-2π|m| Im τ)`, so after Gauss reduction of the
//! basis (Im τ ≥ √3/2) a handful of rows reaches machine precision.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zspace::ExtendedComplex;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct LatticeSpec {
    w1: Complex64,
    w2: Complex64,
}

/// A rank-2 lattice `Z ω₁ + Z ω₂` with `Im(ω₂/ω₁) > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "LatticeSpec", into = "LatticeSpec")]
pub struct Lattice2 {
    w1: Complex64,
    w2: Complex64,
    // reduced basis data for ℘
    r1: Complex64,
    tau: Complex64,
    g2_unit: Complex64,
    g3_unit: Complex64,
    e2_unit: Complex64,
    rows: i32,
}

impl TryFrom<LatticeSpec> for Lattice2 {
    type Error = Error;
    fn try_from(s: LatticeSpec) -> Result<Self> {
        Lattice2::new(s.w1, s.w2)
    }
}

impl From<Lattice2> for LatticeSpec {
    fn from(l: Lattice2) -> Self {
        LatticeSpec { w1: l.w1, w2: l.w2 }
    }
}

impl Lattice2 {
    /// Orients the basis so that `Im(ω₂/ω₁) > 0` (replacing `ω₂` by `-ω₂` if needed).
    pub fn new(w1: Complex64, w2: Complex64) -> Result<Self> {
        if !(w1.is_finite() && w2.is_finite()) || w1.norm() == 0.0 {
            return Err(Error::InvalidInput("lattice generators must be finite and nonzero".into()));
        }
        let cross = (w1.conj() * w2).im;
        if cross.abs() <= 1e-12 * w1.norm() * w2.norm() {
            return Err(Error::InvalidInput(format!(
                "lattice generators {w1} and {w2} are R-linearly dependent"
            )));
        }
        let w2 = if cross < 0.0 { -w2 } else { w2 };
        let (r1, r2) = gauss_reduce(w1, w2);
        let tau = r2 / r1;
        let q = (Complex64::new(0.0, 2.0 * PI) * tau).exp();
        let (e2, e4, e6) = eisenstein(q);
        let g4 = PI.powi(4) / 45.0 * e4;
        let g6 = 2.0 * PI.powi(6) / 945.0 * e6;
        let rows = (7.5 / tau.im).ceil() as i32 + 1;
        Ok(Lattice2 {
            w1,
            w2,
            r1,
            tau,
            g2_unit: 60.0 * g4,
            g3_unit: 140.0 * g6,
            e2_unit: PI * PI / 3.0 * e2,
            rows,
        })
    }

    /// The square lattice `(1, i)`, area 1.
    pub fn square() -> Self {
        Lattice2::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)).unwrap()
    }

    /// The hexagonal lattice `(s, s e^{iπ/3})` scaled to area 1.
    pub fn hexagonal() -> Self {
        let s = (2.0 / 3f64.sqrt()).sqrt();
        Lattice2::new(
            Complex64::new(s, 0.0),
            Complex64::from_polar(s, PI / 3.0),
        )
        .unwrap()
    }

    pub fn w1(&self) -> Complex64 {
        self.w1
    }

    pub fn w2(&self) -> Complex64 {
        self.w2
    }

    pub fn area(&self) -> f64 {
        (self.w1.conj() * self.w2).im.abs()
    }

    /// The lattice `s L`.
    pub fn scaled(&self, s: f64) -> Self {
        Lattice2::new(self.w1 * s, self.w2 * s).unwrap()
    }

    /// Modular parameter of the reduced basis.
    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    /// Real coordinates `(s, t)` with `z = s ω₁ + t ω₂`.
    pub fn coords(&self, z: Complex64) -> (f64, f64) {
        let det = (self.w1.conj() * self.w2).im;
        let t = (self.w1.conj() * z).im / det;
        let s = (z.conj() * self.w2).im / det;
        (s, t)
    }

    pub fn point(&self, s: f64, t: f64) -> Complex64 {
        self.w1 * s + self.w2 * t
    }

    /// Representative of `z` with coordinates in `[-1/2, 1/2)²` of the given basis.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let (s, t) = self.coords(z);
        z - self.point(s.round(), t.round())
    }

    pub fn contains(&self, z: Complex64, tol: f64) -> bool {
        self.reduce(z).norm() <= tol
    }

    /// `g₂`
    pub fn g2(&self) -> Complex64 {
        self.g2_unit / self.r1.powi(4)
    }

    /// `g₃`
    pub fn g3(&self) -> Complex64 {
        self.g3_unit / self.r1.powi(6)
    }

    /// Reduced coordinate `ζ = z/r₁` moved into the fundamental cell of `(1, τ)`.
    fn unit_reduce(&self, z: Complex64) -> Complex64 {
        let zeta = z / self.r1;
        let y = zeta.im / self.tau.im;
        let x = zeta.re - y * self.tau.re;
        zeta - Complex64::new(x.round(), 0.0) - self.tau * y.round()
    }

    /// `℘(z)`; lattice points return the infinity tag.
    pub fn wp(&self, z: Complex64) -> ExtendedComplex {
        let zeta = self.unit_reduce(z);
        if zeta == Complex64::new(0.0, 0.0) {
            return ExtendedComplex::Infinity;
        }
        let mut s = -self.e2_unit;
        for m in -self.rows..=self.rows {
            s += csc2(zeta + self.tau * m as f64);
        }
        ExtendedComplex::Finite(s / (self.r1 * self.r1))
    }

    /// `℘'(z)`; lattice points return the infinity tag.
    pub fn wp_prime(&self, z: Complex64) -> ExtendedComplex {
        let zeta = self.unit_reduce(z);
        if zeta == Complex64::new(0.0, 0.0) {
            return ExtendedComplex::Infinity;
        }
        let mut s = Complex64::new(0.0, 0.0);
        for m in -self.rows..=self.rows {
            s += csc2_prime(zeta + self.tau * m as f64);
        }
        ExtendedComplex::Finite(s / self.r1.powi(3))
    }

    /// `(℘, ℘', ℘'')` at a non-lattice point, using `℘'' = 6℘² - g₂/2`.
    pub fn wp_jet(&self, z: Complex64) -> Option<(Complex64, Complex64, Complex64)> {
        let p = self.wp(z).as_finite()?;
        let dp = self.wp_prime(z).as_finite()?;
        Some((p, dp, 6.0 * p * p - 0.5 * self.g2()))
    }

    /// Direct symmetric lattice sum over `|m|, |n| <= n_max`. Slow; used as an oracle.
    pub fn wp_direct(&self, z: Complex64, n_max: i32) -> Complex64 {
        let mut s = z.inv().powi(2);
        for m in -n_max..=n_max {
            for n in -n_max..=n_max {
                if m == 0 && n == 0 {
                    continue;
                }
                let w = self.w1 * m as f64 + self.w2 * n as f64;
                s += (z - w).inv().powi(2) - w.inv().powi(2);
            }
        }
        s
    }
}

/// Lagrange–Gauss reduction: `|r₁| <= |r₂|` and `|Re(r₂/r₁)| <= 1/2`, same orientation.
fn gauss_reduce(mut a: Complex64, mut b: Complex64) -> (Complex64, Complex64) {
    loop {
        if b.norm_sqr() < a.norm_sqr() {
            std::mem::swap(&mut a, &mut b);
            b = -b;
        }
        let x = (b / a).re;
        if x.abs() <= 0.5 + 1e-12 {
            break;
        }
        b -= a * x.round();
    }
    if (b / a).im < 0.0 {
        b = -b;
    }
    (a, b)
}

/// `(E₂, E₄, E₆)` from their Lambert series in `q = e^{2πiτ}`.
fn eisenstein(q: Complex64) -> (Complex64, Complex64, Complex64) {
    let mut s1 = Complex64::new(0.0, 0.0);
    let mut s3 = Complex64::new(0.0, 0.0);
    let mut s5 = Complex64::new(0.0, 0.0);
    let mut qn = q;
    for n in 1..200 {
        let nf = n as f64;
        let t = qn / (1.0 - qn);
        s1 += nf * t;
        s3 += nf.powi(3) * t;
        s5 += nf.powi(5) * t;
        if qn.norm() * nf.powi(5) < 1e-20 {
            break;
        }
        qn *= q;
    }
    (1.0 - 24.0 * s1, 1.0 + 240.0 * s3, 1.0 - 504.0 * s5)
}

/// `π²/sin²(πu)`
fn csc2(u: Complex64) -> Complex64 {
    if u.im.abs() < 1.0 {
        let s = (u * PI).sin();
        return PI * PI / (s * s);
    }
    // -4π² x/(1-x)² with x = e^{±2πiu}, |x| < 1
    let x = exp_decaying(u);
    -4.0 * PI * PI * x / ((1.0 - x) * (1.0 - x))
}

/// `d/du π²/sin²(πu) = -2π³ cos(πu)/sin³(πu)`
fn csc2_prime(u: Complex64) -> Complex64 {
    if u.im.abs() < 1.0 {
        let s = (u * PI).sin();
        let c = (u * PI).cos();
        return -2.0 * PI.powi(3) * c / (s * s * s);
    }
    let x = exp_decaying(u);
    let sign = if u.im > 0.0 { 1.0 } else { -1.0 };
    let i = Complex64::new(0.0, 1.0);
    -8.0 * PI.powi(3) * i * sign * x * (1.0 + x) / ((1.0 - x) * (1.0 - x) * (1.0 - x))
}

fn exp_decaying(u: Complex64) -> Complex64 {
    let arg = Complex64::new(0.0, 2.0 * PI) * u;
    if u.im > 0.0 {
        arg.exp()
    } else {
        (-arg).exp()
    }
}

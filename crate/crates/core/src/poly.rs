//! Dense complex polynomials with ascending coefficients.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Poly {
    coeffs: Vec<Complex64>,
}

impl Poly {
    /// Builds a polynomial from ascending coefficients; trailing zeros are dropped.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let mut p = Poly { coeffs };
        p.trim();
        p
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Poly::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn constant(c: Complex64) -> Self {
        Poly::new(vec![c])
    }

    /// `z`
    pub fn identity() -> Self {
        Poly::from_real(&[0.0, 1.0])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[Complex64]) -> Self {
        let mut p = Poly::constant(Complex64::new(1.0, 0.0));
        for &r in roots {
            p = p.mul(&Poly::new(vec![-r, Complex64::new(1.0, 0.0)]));
        }
        p
    }

    fn trim(&mut self) {
        while matches!(self.coeffs.last(), Some(c) if *c == Complex64::new(0.0, 0.0)) {
            self.coeffs.pop();
        }
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> Complex64 {
        self.coeffs.last().copied().unwrap_or_default()
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    /// Value and first derivative by Horner.
    pub fn eval_d(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    pub fn deriv(&self) -> Poly {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| c * k as f64)
                .collect(),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::new(vec![]);
        }
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Poly, k: usize| p.coeffs.get(k).copied().unwrap_or_default();
        Poly::new((0..n).map(|k| get(self, k) + get(other, k)).collect())
    }

    /// `self - c * other`
    pub fn sub_scaled(&self, c: Complex64, other: &Poly) -> Poly {
        self.add(&other.scale(-c))
    }

    /// `z^n p(1/z)` for `n >= deg p`.
    pub fn reversed(&self, n: usize) -> Poly {
        assert!(n >= self.degree() || self.is_zero());
        let mut out = vec![Complex64::new(0.0, 0.0); n + 1];
        for (k, &c) in self.coeffs.iter().enumerate() {
            out[n - k] = c;
        }
        Poly::new(out)
    }

    pub fn conj(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c.conj()).collect())
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// All complex roots by Aberth–Ehrlich iteration.
    pub fn roots(&self) -> Result<Vec<Complex64>> {
        let n = self.degree();
        if self.is_zero() {
            return Err(Error::InvalidInput("roots of the zero polynomial".into()));
        }
        if n == 0 {
            return Ok(vec![]);
        }
        let lead = self.leading();
        let monic = self.scale(lead.inv());
        let dm = monic.deriv();
        // Cauchy bound for the initial circle
        let radius = 1.0
            + monic.coeffs[..n]
                .iter()
                .map(|c| c.norm())
                .fold(0.0, f64::max);
        let mut z: Vec<Complex64> = (0..n)
            .map(|k| {
                let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
                Complex64::from_polar(0.5 * radius, t)
            })
            .collect();
        for _ in 0..500 {
            let mut max_step = 0.0_f64;
            for i in 0..n {
                let p = monic.eval(z[i]);
                if p == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let ratio = p / dm.eval(z[i]);
                let mut s = Complex64::new(0.0, 0.0);
                for j in 0..n {
                    if j != i {
                        s += (z[i] - z[j]).inv();
                    }
                }
                let w = ratio / (Complex64::new(1.0, 0.0) - ratio * s);
                if w.is_finite() {
                    z[i] -= w;
                    max_step = max_step.max(w.norm() / (1.0 + z[i].norm()));
                }
            }
            if max_step < 1e-15 {
                break;
            }
        }
        // one Newton polish against the original coefficients
        let d = self.deriv();
        for r in z.iter_mut() {
            let step = self.eval(*r) / d.eval(*r);
            if step.is_finite() && step.norm() < 1e-6 * (1.0 + r.norm()) {
                *r -= step;
            }
        }
        Ok(z)
    }
}

/// `|Res(p, q)|` with both inputs first scaled to unit max coefficient.
pub fn normalized_resultant(p: &Poly, q: &Poly) -> Result<f64> {
    if p.is_zero() || q.is_zero() {
        return Ok(0.0);
    }
    let pn = p.scale(Complex64::new(1.0 / p.max_abs_coeff(), 0.0));
    let qn = q.scale(Complex64::new(1.0 / q.max_abs_coeff(), 0.0));
    let roots = pn.roots()?;
    let mut r = pn.leading().norm().powi(qn.degree() as i32);
    for z in roots {
        r *= qn.eval(z).norm();
    }
    Ok(r)
}

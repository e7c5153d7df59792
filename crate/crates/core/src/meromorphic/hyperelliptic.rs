//! Hyperelliptic curves `w² = ∏(z - z(P_i))` with sheet tags and analytic
//! continuation of `w` along polygonal paths.
//!
//! A sheet tag is defined relative to the reference product
//! `W(z) = ∏ √(z - z_i)` of principal roots: the tag of `(z, w)` is the sign
//! of `w / W(z)`. `W` jumps across the horizontal cuts running left from each
//! branch value, so tags flip there while `w` itself varies continuously.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;

/// Minimal distance between branch values and to a continuation path.
pub const BRANCH_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sheet {
    Plus,
    Minus,
}

impl Sheet {
    pub fn sign(self) -> f64 {
        match self {
            Sheet::Plus => 1.0,
            Sheet::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sheet {
        match self {
            Sheet::Plus => Sheet::Minus,
            Sheet::Minus => Sheet::Plus,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct HyperellipticCurve {
    branch: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for HyperellipticCurve {
    type Error = Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        HyperellipticCurve::new(v)
    }
}

impl From<HyperellipticCurve> for Vec<Complex64> {
    fn from(c: HyperellipticCurve) -> Self {
        c.branch
    }
}

impl HyperellipticCurve {
    /// Branch values must be pairwise distinct and `2g + 2` in number with `g` odd, `g >= 3`.
    pub fn new(branch: Vec<Complex64>) -> Result<Self> {
        let n = branch.len();
        if n < 8 || !n.is_multiple_of(4) {
            return Err(Error::InvalidInput(format!(
                "{n} branch values: need 2g+2 with g odd and at least 3"
            )));
        }
        for (i, a) in branch.iter().enumerate() {
            if !a.is_finite() {
                return Err(Error::InvalidInput("branch values must be finite".into()));
            }
            for b in &branch[i + 1..] {
                if (a - b).norm() <= BRANCH_TOL {
                    return Err(Error::InvalidInput(format!(
                        "branch values {a} and {b} coincide"
                    )));
                }
            }
        }
        Ok(HyperellipticCurve { branch })
    }

    /// Branch values `radius · e^{2πik/(2g+2)}`.
    pub fn regular(genus: usize, radius: f64) -> Result<Self> {
        let n = 2 * genus + 2;
        HyperellipticCurve::new(
            (0..n)
                .map(|k| Complex64::from_polar(radius, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
                .collect(),
        )
    }

    pub fn genus(&self) -> usize {
        self.branch.len() / 2 - 1
    }

    pub fn branch_values(&self) -> &[Complex64] {
        &self.branch
    }

    /// `∏(z - z_i)` as a polynomial.
    pub fn w_squared_poly(&self) -> Poly {
        Poly::from_roots(&self.branch)
    }

    pub fn w_squared(&self, z: Complex64) -> Complex64 {
        self.branch.iter().map(|b| z - b).product()
    }

    /// `∏_{j≠i}(z - z_j)`, the regular factor near branch value `i`.
    pub fn cofactor(&self, i: usize, z: Complex64) -> Complex64 {
        self.branch
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .map(|(_, b)| z - b)
            .product()
    }

    pub fn branch_distance(&self, z: Complex64) -> f64 {
        self.branch.iter().map(|b| (z - b).norm()).fold(f64::MAX, f64::min)
    }

    pub fn nearest_branch(&self, z: Complex64) -> (usize, f64) {
        self.branch
            .iter()
            .enumerate()
            .map(|(i, b)| (i, (z - b).norm()))
            .fold((0, f64::MAX), |a, b| if b.1 < a.1 { b } else { a })
    }

    /// Reference product of principal square roots.
    pub fn w_ref(&self, z: Complex64) -> Complex64 {
        self.branch.iter().map(|b| (z - b).sqrt()).product()
    }

    /// `w` on the given sheet.
    pub fn w(&self, z: Complex64, sheet: Sheet) -> Complex64 {
        self.w_ref(z) * sheet.sign()
    }

    /// Sheet tag of a point `(z, w)` on the curve.
    pub fn sheet_of(&self, z: Complex64, w: Complex64) -> Result<Sheet> {
        let r = self.w_ref(z);
        if r.norm() == 0.0 {
            return Err(Error::AmbiguousSheet { z: format!("{z}") });
        }
        Ok(if (w / r).re >= 0.0 { Sheet::Plus } else { Sheet::Minus })
    }

    /// Continues `w` from `(path[0], w0)` along the polyline; returns `w` at every vertex.
    pub fn continue_w(&self, path: &[Complex64], w0: Complex64) -> Result<Vec<Complex64>> {
        let mut out = Vec::with_capacity(path.len());
        let Some(&first) = path.first() else {
            return Ok(out);
        };
        if (w0 * w0 - self.w_squared(first)).norm() > 1e-8 * (1.0 + w0.norm_sqr()) {
            return Err(Error::SheetInconsistency(format!(
                "initial value {w0} does not lie over z = {first}"
            )));
        }
        let mut w = w0;
        out.push(w);
        for seg in path.windows(2) {
            w = self.continue_segment(seg[0], seg[1], w)?;
            out.push(w);
        }
        Ok(out)
    }

    /// Continues `w` along the straight segment `a → b`.
    pub fn continue_segment(&self, a: Complex64, b: Complex64, mut w: Complex64) -> Result<Complex64> {
        let mut t = 0.0;
        let len = (b - a).norm();
        if len == 0.0 {
            return Ok(w);
        }
        while t < 1.0 {
            let z = a + (b - a) * t;
            let d = self.branch_distance(z);
            if d <= BRANCH_TOL {
                return Err(Error::SheetInconsistency(format!(
                    "continuation path passes through a branch value near {z}"
                )));
            }
            let dt = (0.1 * d / len).min(1.0 - t);
            t += dt;
            let zn = a + (b - a) * t;
            if self.branch_distance(zn) <= BRANCH_TOL {
                return Err(Error::SheetInconsistency(format!(
                    "continuation path passes through a branch value near {zn}"
                )));
            }
            let cand = self.w_ref(zn);
            w = if (cand - w).norm() <= (cand + w).norm() { cand } else { -cand };
        }
        Ok(w)
    }
}

/// A polyline on the curve with the sheet tag recorded at each vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordedPath {
    pub vertices: Vec<Complex64>,
    pub sheets: Vec<Sheet>,
}

impl RecordedPath {
    /// Records the tags obtained by continuation from `(vertices[0], start)`.
    pub fn record(curve: &HyperellipticCurve, vertices: Vec<Complex64>, start: Sheet) -> Result<Self> {
        let Some(&z0) = vertices.first() else {
            return Ok(RecordedPath { vertices, sheets: vec![] });
        };
        let ws = curve.continue_w(&vertices, curve.w(z0, start))?;
        let sheets = vertices
            .iter()
            .zip(&ws)
            .map(|(&z, &w)| curve.sheet_of(z, w))
            .collect::<Result<Vec<_>>>()?;
        Ok(RecordedPath { vertices, sheets })
    }

    /// Re-runs the continuation and checks it against the recorded tags.
    /// Returns `w` at every vertex.
    pub fn replay(&self, curve: &HyperellipticCurve) -> Result<Vec<Complex64>> {
        if self.vertices.len() != self.sheets.len() {
            return Err(Error::SheetInconsistency("one sheet tag per vertex is required".into()));
        }
        let Some(&z0) = self.vertices.first() else {
            return Ok(vec![]);
        };
        let ws = curve.continue_w(&self.vertices, curve.w(z0, self.sheets[0]))?;
        for (k, (&z, &w)) in self.vertices.iter().zip(&ws).enumerate() {
            let got = curve.sheet_of(z, w)?;
            if got != self.sheets[k] {
                return Err(Error::SheetInconsistency(format!(
                    "vertex {k} at z = {z}: continuation arrives on sheet {got:?}, path records {:?}",
                    self.sheets[k]
                )));
            }
        }
        Ok(ws)
    }
}

/// Closed polygonal loop approximating the circle `|z - c| = r`.
pub fn circle_path(c: Complex64, r: f64, n: usize) -> Vec<Complex64> {
    (0..=n)
        .map(|k| c + Complex64::from_polar(r, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect()
}

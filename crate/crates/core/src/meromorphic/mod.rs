//! Meromorphic maps `f: M₁ → P¹` with derivatives and preimage-count degree.

pub mod hyperelliptic;
pub mod weierstrass;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use hyperelliptic::{HyperellipticCurve, RecordedPath, Sheet};
pub use weierstrass::Lattice2;

use crate::error::{Error, Result};
use crate::poly::{normalized_resultant, Poly};
use crate::zspace::ExtendedComplex;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point of the source surface: the plane / P¹ / torus coordinate, or a
/// point of a hyperelliptic curve given by `z` and an optional sheet tag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SurfacePoint {
    Plane(ExtendedComplex),
    Curve { z: ExtendedComplex, sheet: Option<Sheet> },
}

impl SurfacePoint {
    pub fn z(z: Complex64) -> Self {
        SurfacePoint::Plane(ExtendedComplex::Finite(z))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeromorphicMap {
    /// `num(z) / den(z)` on P¹.
    Rational { num: Poly, den: Poly },
    /// `℘` on the torus `C / L` (degree 2).
    WeierstrassP { lattice: Lattice2 },
    /// `℘'` on the torus `C / L` (degree 3).
    WeierstrassPPrime { lattice: Lattice2 },
    /// A polynomial in `z` on a hyperelliptic curve.
    HyperellipticPhi { curve: HyperellipticCurve, phi: Poly },
    /// `z ↦ conj(f(z))`: an anti-holomorphic map used as a non-integrable control.
    Conjugate { inner: Box<MeromorphicMap> },
}

/// First-order data of `f` at a finite chart point.
///
/// When `value` is finite, `fx`, `fy` are the real partials of `f`; at a pole
/// they are the partials of `1/f` instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: ExtendedComplex,
    pub fx: Complex64,
    pub fy: Complex64,
}

/// `f` or `1/f`, whichever has modulus at most one, with its real partials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChartJet {
    pub inverted: bool,
    pub q: Complex64,
    pub qx: Complex64,
    pub qy: Complex64,
}

impl ChartJet {
    /// `∂q/∂z`
    pub fn dz(&self) -> Complex64 {
        (self.qx - I * self.qy) * 0.5
    }

    /// `∂q/∂z̄`
    pub fn dzbar(&self) -> Complex64 {
        (self.qx + I * self.qy) * 0.5
    }
}

impl Jet {
    fn holomorphic(value: Complex64, d: Complex64) -> Self {
        Jet { value: ExtendedComplex::Finite(value), fx: d, fy: I * d }
    }

    fn pole(d_inv: Complex64) -> Self {
        Jet { value: ExtendedComplex::Infinity, fx: d_inv, fy: I * d_inv }
    }

    pub fn chart(&self) -> ChartJet {
        match self.value {
            ExtendedComplex::Infinity => ChartJet {
                inverted: true,
                q: Complex64::new(0.0, 0.0),
                qx: self.fx,
                qy: self.fy,
            },
            ExtendedComplex::Finite(f) if f.norm() <= 1.0 => ChartJet {
                inverted: false,
                q: f,
                qx: self.fx,
                qy: self.fy,
            },
            ExtendedComplex::Finite(f) => {
                let g = f.inv();
                ChartJet { inverted: true, q: g, qx: -self.fx * g * g, qy: -self.fy * g * g }
            }
        }
    }

    fn conj(&self) -> Self {
        Jet { value: self.value.conj(), fx: self.fx.conj(), fy: self.fy.conj() }
    }
}

impl MeromorphicMap {
    /// A rational map; rejects a zero denominator and common roots.
    pub fn rational(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        if num.is_zero() {
            return Ok(MeromorphicMap::Rational { num, den: Poly::from_real(&[1.0]) });
        }
        if num.degree() > 0 && den.degree() > 0 && normalized_resultant(&num, &den)? <= 1e-9 {
            return Err(Error::InvalidInput(
                "numerator and denominator share a root".into(),
            ));
        }
        Ok(MeromorphicMap::Rational { num, den })
    }

    pub fn identity() -> Self {
        MeromorphicMap::Rational { num: Poly::identity(), den: Poly::from_real(&[1.0]) }
    }

    pub fn constant(c: Complex64) -> Self {
        MeromorphicMap::Rational { num: Poly::constant(c), den: Poly::from_real(&[1.0]) }
    }

    pub fn conjugate(self) -> Self {
        MeromorphicMap::Conjugate { inner: Box::new(self) }
    }

    pub fn is_holomorphic(&self) -> bool {
        !matches!(self, MeromorphicMap::Conjugate { .. })
    }

    pub fn is_constant(&self) -> bool {
        match self {
            MeromorphicMap::Rational { num, den } => num.degree() == 0 && den.degree() == 0,
            MeromorphicMap::HyperellipticPhi { phi, .. } => phi.degree() == 0,
            MeromorphicMap::Conjugate { inner } => inner.is_constant(),
            _ => false,
        }
    }

    /// Evaluates `f` at a surface point; poles give the infinity tag.
    pub fn eval(&self, point: SurfacePoint) -> Result<ExtendedComplex> {
        match (self, point) {
            (MeromorphicMap::Conjugate { inner }, p) => Ok(inner.eval(p)?.conj()),
            (MeromorphicMap::Rational { num, den }, SurfacePoint::Plane(z)) => Ok(match z {
                ExtendedComplex::Finite(z) => rational_value(num, den, z),
                ExtendedComplex::Infinity => rational_at_infinity(num, den),
            }),
            (MeromorphicMap::WeierstrassP { lattice }, SurfacePoint::Plane(ExtendedComplex::Finite(z))) => {
                Ok(lattice.wp(z))
            }
            (MeromorphicMap::WeierstrassPPrime { lattice }, SurfacePoint::Plane(ExtendedComplex::Finite(z))) => {
                Ok(lattice.wp_prime(z))
            }
            (MeromorphicMap::HyperellipticPhi { curve, phi }, SurfacePoint::Curve { z, sheet }) => match z {
                ExtendedComplex::Infinity => Ok(if phi.degree() == 0 {
                    ExtendedComplex::Finite(phi.eval(Complex64::new(0.0, 0.0)))
                } else {
                    ExtendedComplex::Infinity
                }),
                ExtendedComplex::Finite(z) => {
                    if sheet.is_none() && curve.branch_distance(z) <= hyperelliptic::BRANCH_TOL {
                        return Err(Error::AmbiguousSheet { z: format!("{z}") });
                    }
                    Ok(ExtendedComplex::Finite(phi.eval(z)))
                }
            },
            (m, p) => Err(Error::InvalidInput(format!(
                "point {p:?} is not on the domain of {}",
                m.kind_name()
            ))),
        }
    }

    /// Value and derivative in the finite chart coordinate `z`.
    pub fn jet(&self, z: Complex64) -> Jet {
        match self {
            MeromorphicMap::Conjugate { inner } => inner.jet(z).conj(),
            MeromorphicMap::Rational { num, den } => {
                let (p, dp) = num.eval_d(z);
                let (q, dq) = den.eval_d(z);
                if q == Complex64::new(0.0, 0.0) {
                    // d(q/p) = (dq p - q dp)/p² with q = 0
                    return Jet::pole(dq / p);
                }
                Jet::holomorphic(p / q, (dp * q - p * dq) / (q * q))
            }
            MeromorphicMap::WeierstrassP { lattice } => match lattice.wp_jet(z) {
                Some((p, dp, _)) => Jet::holomorphic(p, dp),
                None => Jet::pole(Complex64::new(0.0, 0.0)),
            },
            MeromorphicMap::WeierstrassPPrime { lattice } => match lattice.wp_jet(z) {
                Some((_, dp, ddp)) => Jet::holomorphic(dp, ddp),
                None => Jet::pole(Complex64::new(0.0, 0.0)),
            },
            MeromorphicMap::HyperellipticPhi { phi, .. } => {
                let (v, d) = phi.eval_d(z);
                Jet::holomorphic(v, d)
            }
        }
    }

    /// Finite poles in the chart coordinate, reduced where that makes sense.
    pub fn finite_poles(&self) -> Result<Vec<Complex64>> {
        match self {
            MeromorphicMap::Conjugate { inner } => inner.finite_poles(),
            MeromorphicMap::Rational { den, .. } => den.roots(),
            MeromorphicMap::WeierstrassP { .. } | MeromorphicMap::WeierstrassPPrime { .. } => {
                Ok(vec![Complex64::new(0.0, 0.0)])
            }
            MeromorphicMap::HyperellipticPhi { .. } => Ok(vec![]),
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            MeromorphicMap::Rational { .. } => "rational",
            MeromorphicMap::WeierstrassP { .. } => "weierstrass-p",
            MeromorphicMap::WeierstrassPPrime { .. } => "weierstrass-p-prime",
            MeromorphicMap::HyperellipticPhi { .. } => "hyperelliptic-phi",
            MeromorphicMap::Conjugate { .. } => "conjugate",
        }
    }

    /// For rational maps, the same map expressed in the coordinate `s = 1/z`.
    pub fn rational_at_infinity_chart(&self) -> Option<MeromorphicMap> {
        match self {
            MeromorphicMap::Rational { num, den } => {
                let n = num.degree().max(den.degree());
                Some(MeromorphicMap::Rational { num: num.reversed(n), den: den.reversed(n) })
            }
            MeromorphicMap::Conjugate { inner } => {
                inner.rational_at_infinity_chart().map(MeromorphicMap::conjugate)
            }
            _ => None,
        }
    }

    /// Preimage count of generic values, agreed on by five random targets.
    pub fn degree(&self) -> Result<usize> {
        self.degree_seeded(0x5eed_d15c)
    }

    pub fn degree_seeded(&self, seed: u64) -> Result<usize> {
        if self.is_constant() {
            return Err(Error::NotApplicable("degree of a constant map".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut last_counts = vec![];
        for _attempt in 0..3 {
            let targets: Vec<Complex64> = (0..5)
                .map(|_| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
                .collect();
            let counts = targets
                .iter()
                .map(|&c| self.preimage_count(c, &mut rng))
                .collect::<Result<Vec<_>>>()?;
            if counts.iter().all(|&k| k == counts[0]) && counts[0] > 0 {
                return Ok(counts[0]);
            }
            last_counts = counts;
        }
        Err(Error::DegenerateSampling { counts: last_counts })
    }

    /// Number of solutions of `f = c` with multiplicity.
    pub fn preimage_count(&self, c: Complex64, rng: &mut ChaCha8Rng) -> Result<usize> {
        match self {
            MeromorphicMap::Conjugate { inner } => inner.preimage_count(c.conj(), rng),
            MeromorphicMap::Rational { num, den } => {
                let p = num.sub_scaled(c, den);
                if p.is_zero() {
                    return Err(Error::DegenerateSampling { counts: vec![] });
                }
                let roots = p.roots()?;
                // drop spurious roots where the map is not actually c
                Ok(roots
                    .iter()
                    .filter(|&&r| match rational_value(num, den, r) {
                        ExtendedComplex::Finite(v) => (v - c).norm() < 1e-6 * (1.0 + c.norm()),
                        ExtendedComplex::Infinity => false,
                    })
                    .count())
            }
            MeromorphicMap::WeierstrassP { lattice } => {
                let l = *lattice;
                elliptic_preimage_count(&|z| l.wp(z), lattice, c, rng)
            }
            MeromorphicMap::WeierstrassPPrime { lattice } => {
                let l = *lattice;
                elliptic_preimage_count(&|z| l.wp_prime(z), lattice, c, rng)
            }
            MeromorphicMap::HyperellipticPhi { curve, phi } => {
                let p = phi.sub_scaled(c, &Poly::from_real(&[1.0]));
                let roots = p.roots()?;
                for r in &roots {
                    if curve.branch_distance(*r) < 1e-6 {
                        return Err(Error::DegenerateSampling { counts: vec![roots.len()] });
                    }
                }
                Ok(2 * roots.len())
            }
        }
    }
}

fn rational_value(num: &Poly, den: &Poly, z: Complex64) -> ExtendedComplex {
    let q = den.eval(z);
    if q == Complex64::new(0.0, 0.0) {
        ExtendedComplex::Infinity
    } else {
        ExtendedComplex::Finite(num.eval(z) / q)
    }
}

fn rational_at_infinity(num: &Poly, den: &Poly) -> ExtendedComplex {
    use std::cmp::Ordering;
    match num.degree().cmp(&den.degree()) {
        Ordering::Greater => ExtendedComplex::Infinity,
        Ordering::Less => ExtendedComplex::Finite(Complex64::new(0.0, 0.0)),
        Ordering::Equal => ExtendedComplex::Finite(num.leading() / den.leading()),
    }
}

/// Grid resolution of the argument-principle count.
const ELLIPTIC_GRID: usize = 64;

/// Counts zeros of `f - c` on `C/L` by summing the positive winding numbers
/// of `f - c` around the cells of a randomly shifted grid.
pub fn elliptic_preimage_count(
    f: &dyn Fn(Complex64) -> ExtendedComplex,
    lattice: &Lattice2,
    c: Complex64,
    rng: &mut ChaCha8Rng,
) -> Result<usize> {
    let n = ELLIPTIC_GRID;
    let shift = (rng.gen_range(0.1..0.9) / n as f64, rng.gen_range(0.1..0.9) / n as f64);
    let node = |i: usize, j: usize| {
        lattice.point(shift.0 + i as f64 / n as f64, shift.1 + j as f64 / n as f64)
    };
    let g = |z: Complex64| -> Option<Complex64> { f(z).as_finite().map(|v| v - c) };
    // winding contributions of horizontal edges (i,j)->(i+1,j) and vertical (i,j)->(i,j+1)
    let mut horiz = vec![0.0; n * (n + 1)];
    let mut vert = vec![0.0; (n + 1) * n];
    for j in 0..=n {
        for i in 0..n {
            horiz[j * n + i] = arg_change(&g, node(i, j), node(i + 1, j), 0)?;
        }
    }
    for j in 0..n {
        for i in 0..=n {
            vert[j * (n + 1) + i] = arg_change(&g, node(i, j), node(i, j + 1), 0)?;
        }
    }
    let mut total = 0i64;
    for j in 0..n {
        for i in 0..n {
            let w = horiz[j * n + i] + vert[j * (n + 1) + i + 1]
                - horiz[(j + 1) * n + i]
                - vert[j * (n + 1) + i];
            let k = (w / (2.0 * std::f64::consts::PI)).round() as i64;
            if k > 0 {
                total += k;
            }
        }
    }
    Ok(total as usize)
}

fn arg_change(
    g: &dyn Fn(Complex64) -> Option<Complex64>,
    a: Complex64,
    b: Complex64,
    depth: u32,
) -> Result<f64> {
    let (Some(ga), Some(gb)) = (g(a), g(b)) else {
        return Err(Error::DegenerateSampling { counts: vec![] });
    };
    let d = (gb / ga).arg();
    if d.abs() < 0.4 || depth > 24 {
        if depth > 24 {
            return Err(Error::DegenerateSampling { counts: vec![] });
        }
        return Ok(d);
    }
    let m = (a + b) * 0.5;
    Ok(arg_change(g, a, m, depth + 1)? + arg_change(g, m, b, depth + 1)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rational_examples() {
        let id = MeromorphicMap::identity();
        assert_eq!(id.eval(SurfacePoint::z(c(3.0, 1.0))).unwrap(), ExtendedComplex::finite(3.0, 1.0));
        let inv = MeromorphicMap::rational(Poly::from_real(&[1.0]), Poly::identity()).unwrap();
        assert!(inv.eval(SurfacePoint::z(c(0.0, 0.0))).unwrap().is_infinite());
        assert_eq!(
            inv.eval(SurfacePoint::Plane(ExtendedComplex::Infinity)).unwrap(),
            ExtendedComplex::finite(0.0, 0.0)
        );
        let num = Poly::from_roots(&[c(1.0, 0.0), c(2.0, 1.0), c(-1.0, 0.5)]);
        let den = Poly::from_roots(&[c(0.5, -0.5)]);
        let f = MeromorphicMap::rational(num, den).unwrap();
        assert_eq!(f.degree().unwrap(), 3);
        assert_eq!(id.degree().unwrap(), 1);
    }

    #[test]
    fn common_root_rejected() {
        let p = Poly::from_roots(&[c(1.0, 0.0), c(2.0, 0.0)]);
        let q = Poly::from_roots(&[c(1.0, 0.0)]);
        assert!(MeromorphicMap::rational(p, q).is_err());
    }

    #[test]
    fn elliptic_degrees() {
        for lattice in [Lattice2::square(), Lattice2::hexagonal()] {
            assert_eq!(MeromorphicMap::WeierstrassP { lattice }.degree().unwrap(), 2);
            assert_eq!(MeromorphicMap::WeierstrassPPrime { lattice }.degree().unwrap(), 3);
        }
        let f = MeromorphicMap::WeierstrassP { lattice: Lattice2::square() }.conjugate();
        assert_eq!(f.degree().unwrap(), 2);
    }

    #[test]
    fn translated_elliptic_degree() {
        let l = Lattice2::hexagonal();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let shift = c(0.37, 0.11);
        let n = elliptic_preimage_count(&|z| l.wp(z + shift), &l, c(0.4, -0.9), &mut rng).unwrap();
        assert_eq!(n, 2);
    }

    #[test]
    fn hyperelliptic_degree() {
        let curve = HyperellipticCurve::regular(3, 2.0).unwrap();
        let f = MeromorphicMap::HyperellipticPhi { curve: curve.clone(), phi: Poly::identity() };
        assert_eq!(f.degree().unwrap(), 2);
        let curve5 = HyperellipticCurve::regular(5, 2.0).unwrap();
        let f = MeromorphicMap::HyperellipticPhi {
            curve: curve5,
            phi: Poly::from_real(&[0.1, 0.0, 1.0]),
        };
        assert_eq!(f.degree().unwrap(), 4);
        let b = curve.branch_values()[0];
        let f = MeromorphicMap::HyperellipticPhi { curve, phi: Poly::identity() };
        assert!(matches!(
            f.eval(SurfacePoint::Curve { z: b.into(), sheet: None }),
            Err(Error::AmbiguousSheet { .. })
        ));
        assert!(f.eval(SurfacePoint::Curve { z: b.into(), sheet: Some(Sheet::Plus) }).is_ok());
    }

    #[test]
    fn constant_has_no_degree() {
        assert!(matches!(
            MeromorphicMap::constant(c(1.0, 0.0)).degree(),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn jet_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let l = Lattice2::new(c(1.0, 0.0), c(0.2, 1.1)).unwrap();
        let maps = [
            MeromorphicMap::WeierstrassP { lattice: l },
            MeromorphicMap::WeierstrassPPrime { lattice: l },
            MeromorphicMap::rational(Poly::from_real(&[1.0, 0.0, 2.0]), Poly::from_real(&[0.5, 1.0]))
                .unwrap(),
            MeromorphicMap::WeierstrassP { lattice: l }.conjugate(),
        ];
        for f in &maps {
            let mut checked = 0;
            while checked < 100 {
                let z = l.point(rng.gen(), rng.gen());
                let jet = f.jet(z);
                let Some(v) = jet.value.as_finite() else { continue };
                if v.norm() > 1e3 {
                    continue;
                }
                let h = 1e-5;
                let at = |w: Complex64| f.eval(SurfacePoint::z(w)).unwrap().as_finite().unwrap();
                let fx = (at(z + h) - at(z - h)) / (2.0 * h);
                let fy = (at(z + I * h) - at(z - I * h)) / (2.0 * h);
                let scale = jet.fx.norm() + 1.0;
                assert!((fx - jet.fx).norm() < 1e-6 * scale);
                assert!((fy - jet.fy).norm() < 1e-6 * scale);
                checked += 1;
            }
        }
    }

    #[test]
    fn pole_jet_is_derivative_of_reciprocal() {
        let f = MeromorphicMap::rational(Poly::from_real(&[2.0]), Poly::from_real(&[-1.0, 1.0])).unwrap();
        // 1/f = (z - 1)/2
        let j = f.jet(c(1.0, 0.0));
        assert!(j.value.is_infinite());
        assert!((j.fx - c(0.5, 0.0)).norm() < 1e-15);
        let ch = f.jet(c(1.0 + 1e-3, 0.0)).chart();
        assert!(ch.inverted && (ch.qx - c(0.5, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn infinity_chart() {
        let f = MeromorphicMap::identity();
        let g = f.rational_at_infinity_chart().unwrap();
        // in s = 1/z the identity is 1/s
        assert!(g.eval(SurfacePoint::z(c(0.0, 0.0))).unwrap().is_infinite());
        assert_eq!(g.eval(SurfacePoint::z(c(2.0, 0.0))).unwrap(), ExtendedComplex::finite(0.5, 0.0));
    }
}

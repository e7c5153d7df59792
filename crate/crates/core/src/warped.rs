//! Warped almost complex structures `J = J₁ + J_{f(y₁)}` on `M₁ × T⁴`.
//!
//! A point is `p = (u, v, X₁, X₂, X₃, X₄)` with base coordinate `z = u + iv`
//! and flat fiber coordinates `X`. The base structure is `J₁ ∂_u = ∂_v`; the
//! fiber block is `j_matrix(stereo_to_sphere(f(z)))`.
//!
//! The unitary coframe is written with the real dictionary `x₂ = -X₂`
//! (other `x_i = X_i`); in those coordinates it is the coframe
//! `φ₁ ∝ f(dx₁ - i dx₃) + i(dx₂ - i dx₄)`, `φ₂ ∝ -i(dx₁ - i dx₃) + f(dx₂ - i dx₄)`.
//! Conventions: `Σ|φ_k(v)|²` is half the squared length, so
//! `φ₃ = √(ρ/2) dz` for the base metric `ρ |dz|²` and `iφ₃∧φ̄₃` is its area form.

use nalgebra::{Matrix2, Matrix4, Matrix6, SMatrix, Vector6};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meromorphic::{ChartJet, HyperellipticCurve, Lattice2, MeromorphicMap};
use crate::poly::Poly;
use crate::torsion_algebra::TorsionTensorN3;
use crate::zspace::{j_matrix, stereo_to_sphere, ExtendedComplex};

pub type Point = [f64; 6];
type C6x6 = SMatrix<Complex64, 6, 6>;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Default finite-difference step.
pub const DEFAULT_H: f64 = 1e-4;

/// Four generators of the fiber lattice in `R⁴` (rows).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 4]; 4]", into = "[[f64; 4]; 4]")]
pub struct Lattice4 {
    gens: [[f64; 4]; 4],
}

impl TryFrom<[[f64; 4]; 4]> for Lattice4 {
    type Error = Error;
    fn try_from(g: [[f64; 4]; 4]) -> Result<Self> {
        Lattice4::new(g)
    }
}

impl From<Lattice4> for [[f64; 4]; 4] {
    fn from(l: Lattice4) -> Self {
        l.gens
    }
}

impl Lattice4 {
    pub fn new(gens: [[f64; 4]; 4]) -> Result<Self> {
        let l = Lattice4 { gens };
        let v = l.volume();
        if !(v.is_finite() && v > 1e-12) {
            return Err(Error::InvalidInput(format!(
                "fiber lattice generators are degenerate (volume {v})"
            )));
        }
        Ok(l)
    }

    /// `Z⁴`
    pub fn standard() -> Self {
        Lattice4::diagonal([1.0; 4])
    }

    pub fn diagonal(d: [f64; 4]) -> Self {
        let mut g = [[0.0; 4]; 4];
        for i in 0..4 {
            g[i][i] = d[i];
        }
        Lattice4 { gens: g }
    }

    pub fn generators(&self) -> [[f64; 4]; 4] {
        self.gens
    }

    /// `v₂ = |det|`
    pub fn volume(&self) -> f64 {
        Matrix4::from_fn(|i, j| self.gens[i][j]).determinant().abs()
    }
}

/// The base Riemann surface with its metric `ρ |dz|²` in the `z` chart.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Base {
    /// `C / L` with the flat metric.
    FlatTorus { lattice: Lattice2 },
    /// `P¹` with the round metric `4|dz|²/(1+|z|²)²` of curvature 1.
    RoundSphere,
    /// The hyperelliptic curve with the metric induced by the minimal immersion
    /// attached to `metric_phi`.
    Hyperelliptic { curve: HyperellipticCurve, metric_phi: Poly },
}

impl Base {
    pub fn genus(&self) -> usize {
        match self {
            Base::FlatTorus { .. } => 1,
            Base::RoundSphere => 0,
            Base::Hyperelliptic { curve, .. } => curve.genus(),
        }
    }

    /// Conformal factor of the Riemannian metric in the `z` chart.
    pub fn rho(&self, z: Complex64) -> f64 {
        match self {
            Base::FlatTorus { .. } => 1.0,
            Base::RoundSphere => 4.0 / (1.0 + z.norm_sqr()).powi(2),
            Base::Hyperelliptic { curve, metric_phi } => {
                let p = metric_phi.eval(z).norm_sqr();
                (p + 1.0).powi(2) / (4.0 * curve.w_squared(z).norm())
            }
        }
    }

    /// Gaussian curvature of the base metric.
    pub fn curvature(&self, z: Complex64) -> f64 {
        match self {
            Base::FlatTorus { .. } => 0.0,
            Base::RoundSphere => 1.0,
            Base::Hyperelliptic { curve, metric_phi } => {
                let (p, dp) = metric_phi.eval_d(z);
                -16.0 * dp.norm_sqr() * curve.w_squared(z).norm()
                    / (1.0 + p.norm_sqr()).powi(4)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WarpedThreefold {
    pub base: Base,
    pub fiber: Lattice4,
    pub map: MeromorphicMap,
}

/// Which trivialization of the fiber coframe is used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CoframeChart {
    /// `|f| <= 1`
    Finite,
    /// `|f| >= 1`, written in `g = 1/f`
    Infinite,
}

/// Three complex 1-forms as coefficient rows over `(du, dv, dX₁, …, dX₄)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoframeSample {
    pub chart: CoframeChart,
    pub phi: [[Complex64; 6]; 3],
}

impl CoframeSample {
    /// `φ_k(v)` for a complex tangent vector.
    pub fn apply(&self, k: usize, v: &[Complex64; 6]) -> Complex64 {
        (0..6).map(|a| self.phi[k][a] * v[a]).sum()
    }

    /// Hermitian Gram matrix `⟨φ_k, φ_l⟩` under the inverse metric `diag(1/ρ, 1/ρ, 1, 1, 1, 1)`.
    pub fn gram(&self, rho: f64) -> [[Complex64; 3]; 3] {
        let inv = [1.0 / rho, 1.0 / rho, 1.0, 1.0, 1.0, 1.0];
        let mut g = [[Complex64::new(0.0, 0.0); 3]; 3];
        for k in 0..3 {
            for l in 0..3 {
                g[k][l] = (0..6).map(|a| self.phi[k][a] * self.phi[l][a].conj() * inv[a]).sum();
            }
        }
        g
    }
}

impl WarpedThreefold {
    pub fn new(base: Base, fiber: Lattice4, map: MeromorphicMap) -> Self {
        WarpedThreefold { base, fiber, map }
    }

    /// `C/L × R⁴/Z⁴` with the given map.
    pub fn torus(lattice: Lattice2, map: MeromorphicMap) -> Self {
        WarpedThreefold::new(Base::FlatTorus { lattice }, Lattice4::standard(), map)
    }

    /// The twistor space of the flat 4-torus: `P¹ × T⁴` with `f = id`.
    pub fn twistor() -> Self {
        WarpedThreefold::new(Base::RoundSphere, Lattice4::standard(), MeromorphicMap::identity())
    }

    pub fn base_z(p: &Point) -> Complex64 {
        Complex64::new(p[0], p[1])
    }

    pub fn f_value(&self, z: Complex64) -> ExtendedComplex {
        self.map.jet(z).value
    }

    pub fn fiber_block(&self, z: Complex64) -> Matrix4<f64> {
        j_matrix(stereo_to_sphere(self.f_value(z)))
    }

    /// The 6×6 matrix of `J` at `p`.
    pub fn warped_j(&self, p: &Point) -> Matrix6<f64> {
        let mut j = Matrix6::zeros();
        let j1 = base_j();
        j.fixed_view_mut::<2, 2>(0, 0).copy_from(&j1);
        j.fixed_view_mut::<4, 4>(2, 2).copy_from(&self.fiber_block(Self::base_z(p)));
        j
    }

    /// Once-Richardson-extrapolated central difference of the `J` field along `dir`.
    pub fn dj(&self, p: &Point, dir: &Vector6<f64>, h: f64) -> Matrix6<f64> {
        let central = |h: f64| {
            let plus = shift(p, dir, h);
            let minus = shift(p, dir, -h);
            (self.warped_j(&plus) - self.warped_j(&minus)) / (2.0 * h)
        };
        (central(h / 2.0) * 4.0 - central(h)) / 3.0
    }

    /// `N_J(X, Y) = [X,Y] - [JX,JY] + J[JX,Y] + J[X,JY]` for constant-coefficient `X`, `Y`.
    pub fn nijenhuis(&self, p: &Point, x: &Vector6<f64>, y: &Vector6<f64>, h: f64) -> Result<Vector6<f64>> {
        if !(1e-6..=1e-2).contains(&h) {
            return Err(Error::InvalidInput(format!("finite-difference step {h} outside [1e-6, 1e-2]")));
        }
        let j = self.warped_j(p);
        let jx = j * x;
        let jy = j * y;
        // [JX, JY] = (D_{JX} J) Y - (D_{JY} J) X
        let bracket_jj = self.dj(p, &jx, h) * y - self.dj(p, &jy, h) * x;
        // [JX, Y] = -(D_Y J) X,  [X, JY] = (D_X J) Y
        let bracket_jx_y = -(self.dj(p, y, h) * x);
        let bracket_x_jy = self.dj(p, x, h) * y;
        Ok(-bracket_jj + j * bracket_jx_y + j * bracket_x_jy)
    }

    /// Cauchy–Riemann residual of the stereographic coordinate of `f`
    /// (`f` or `1/f`, whichever is bounded by one at `y₁`): with `' = ∂_v`
    /// and `˙ = ∂_u`, returns `max(|x' + ẏ|, |y' - ẋ|)`.
    pub fn cauchy_riemann_residual(&self, y1: Complex64) -> f64 {
        self.cauchy_riemann_residual_h(y1, DEFAULT_H)
    }

    pub fn cauchy_riemann_residual_h(&self, y1: Complex64, h: f64) -> f64 {
        let inverted = self.map.jet(y1).chart().inverted;
        let q = |z: Complex64| -> Complex64 {
            match self.f_value(z) {
                ExtendedComplex::Finite(f) if inverted => f.inv(),
                ExtendedComplex::Finite(f) => f,
                ExtendedComplex::Infinity => Complex64::new(0.0, 0.0),
            }
        };
        let d = |dir: Complex64| {
            let c = |h: f64| (q(y1 + dir * h) - q(y1 - dir * h)) / (2.0 * h);
            (c(h / 2.0) * 4.0 - c(h)) / 3.0
        };
        let dot = d(Complex64::new(1.0, 0.0));
        let prime = d(I);
        (prime.re + dot.im).abs().max((prime.im - dot.re).abs())
    }

    /// The chart used by [`coframe`](Self::coframe) at base point `z`.
    pub fn chart_at(&self, z: Complex64) -> CoframeChart {
        match self.f_value(z) {
            ExtendedComplex::Finite(f) if f.norm() <= 1.0 => CoframeChart::Finite,
            _ => CoframeChart::Infinite,
        }
    }

    pub fn coframe(&self, p: &Point) -> CoframeSample {
        self.coframe_in(p, self.chart_at(Self::base_z(p)))
    }

    /// The unitary coframe in a prescribed chart (the chart must contain `f(y₁)`).
    pub fn coframe_in(&self, p: &Point, chart: CoframeChart) -> CoframeSample {
        let z = Self::base_z(p);
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        let fiber = match (chart, self.f_value(z)) {
            (CoframeChart::Finite, ExtendedComplex::Finite(f)) => {
                let s = 1.0 / (2.0 * (1.0 + f.norm_sqr())).sqrt();
                [[f, -I, -I * f, one].map(|c| c * s), [-I, -f, one, I * f].map(|c| c * s)]
            }
            (CoframeChart::Infinite, v) => {
                let g = match v {
                    ExtendedComplex::Finite(f) => f.inv(),
                    ExtendedComplex::Infinity => zero,
                };
                let s = 1.0 / (2.0 * (1.0 + g.norm_sqr())).sqrt();
                [[one, -I * g, -I, g].map(|c| c * s), [-I * g, -one, g, I].map(|c| c * s)]
            }
            (CoframeChart::Finite, ExtendedComplex::Infinity) => {
                // the finite chart does not reach the pole; fall back
                return self.coframe_in(p, CoframeChart::Infinite);
            }
        };
        let r = (self.base.rho(z) / 2.0).sqrt();
        let mut phi = [[zero; 6]; 3];
        for k in 0..2 {
            phi[k][2..6].copy_from_slice(&fiber[k]);
        }
        phi[2][0] = Complex64::new(r, 0.0);
        phi[2][1] = I * r;
        CoframeSample { chart, phi }
    }

    /// `λ = T³₁₂` in the chart of [`coframe`](Self::coframe), from
    /// `β = λ̄ φ₃ = -i df / (1 + |f|²)`.
    pub fn torsion_lambda(&self, p: &Point) -> Complex64 {
        let z = Self::base_z(p);
        let cj = self.map.jet(z).chart();
        lambda_from_chart(&cj, self.base.rho(z))
    }

    /// Numeric Chern torsion `T^k_{ij}` from first derivatives of the coframe.
    ///
    /// With `e` the dual frame, `A^k_{ij} = dφ_k(e_i, e_j)` and
    /// `B^k_{ij} = dφ_k(e_i, ē_j)`, the torsion is
    /// `2T^k_{ij} = A^k_{ij} - conj(B^j_{ki}) + conj(B^i_{kj})`.
    pub fn chern_torsion(&self, p: &Point, h: f64) -> Result<TorsionTensorN3> {
        let chart = self.chart_at(Self::base_z(p));
        let c0 = self.coframe_in(p, chart);
        // ∂_b φ_k,a
        let mut dphi = [[[Complex64::new(0.0, 0.0); 6]; 6]; 3];
        for b in 0..6 {
            let mut dir = Vector6::zeros();
            dir[b] = 1.0;
            let central = |h: f64| {
                let cp = self.coframe_in(&shift(p, &dir, h), chart);
                let cm = self.coframe_in(&shift(p, &dir, -h), chart);
                let mut out = [[Complex64::new(0.0, 0.0); 6]; 3];
                for k in 0..3 {
                    for a in 0..6 {
                        out[k][a] = (cp.phi[k][a] - cm.phi[k][a]) / (2.0 * h);
                    }
                }
                out
            };
            let (d1, d2) = (central(h), central(h / 2.0));
            for k in 0..3 {
                for a in 0..6 {
                    dphi[k][b][a] = (d2[k][a] * 4.0 - d1[k][a]) / 3.0;
                }
            }
        }
        let m = C6x6::from_fn(|r, a| if r < 3 { c0.phi[r][a] } else { c0.phi[r - 3][a].conj() });
        let e = m
            .try_inverse()
            .ok_or_else(|| Error::InvalidInput("degenerate coframe".into()))?;
        let frame = |i: usize| -> [Complex64; 6] { std::array::from_fn(|a| e[(a, i)]) };
        let dform = |k: usize, x: &[Complex64; 6], y: &[Complex64; 6]| -> Complex64 {
            let mut s = Complex64::new(0.0, 0.0);
            for b in 0..6 {
                for a in 0..6 {
                    s += dphi[k][b][a] * (x[b] * y[a] - y[b] * x[a]);
                }
            }
            s
        };
        let es: Vec<[Complex64; 6]> = (0..3).map(frame).collect();
        let ebar: Vec<[Complex64; 6]> = (3..6).map(frame).collect();
        let aa = |k: usize, i: usize, j: usize| dform(k, &es[i], &es[j]);
        let bb = |k: usize, i: usize, j: usize| dform(k, &es[i], &ebar[j]);
        let mut t = [[[Complex64::new(0.0, 0.0); 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    t[k][i][j] = (aa(k, i, j) - bb(j, k, i).conj() + bb(i, k, j).conj()) * 0.5;
                }
            }
        }
        Ok(TorsionTensorN3::antisymmetrized(t))
    }

    /// Operator norm of the directional derivative of `J` at `p`.
    pub fn nabla_j_profile(&self, p: &Point, direction: &Vector6<f64>) -> f64 {
        self.dj(p, direction, DEFAULT_H).svd(false, false).singular_values.max()
    }
}

/// `λ` from the bounded chart of `f` and the base conformal factor.
pub fn lambda_from_chart(cj: &ChartJet, rho: f64) -> Complex64 {
    let sign = if cj.inverted { -1.0 } else { 1.0 };
    I * sign * cj.dz().conj() / ((1.0 + cj.q.norm_sqr()) * (rho / 2.0).sqrt())
}

/// `J₁ ∂_u = ∂_v`
pub fn base_j() -> Matrix2<f64> {
    Matrix2::new(0.0, -1.0, 1.0, 0.0)
}

fn shift(p: &Point, dir: &Vector6<f64>, h: f64) -> Point {
    std::array::from_fn(|i| p[i] + h * dir[i])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn wp_threefold() -> WarpedThreefold {
        let l = Lattice2::square();
        WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l })
    }

    fn random_point(rng: &mut ChaCha8Rng) -> Point {
        std::array::from_fn(|_| rng.gen_range(0.02..0.98))
    }

    fn random_dir(rng: &mut ChaCha8Rng) -> Vector6<f64> {
        Vector6::from_fn(|_, _| rng.gen_range(-1.0..1.0))
    }

    #[test]
    fn constant_map_gives_product_structure() {
        let w = WarpedThreefold::torus(Lattice2::square(), MeromorphicMap::constant(Complex64::new(0.0, 0.0)));
        let want = j_matrix(crate::zspace::OcsPoint { a: 0.0, b: 0.0, c: -1.0 });
        let j = w.warped_j(&[0.3, 0.1, 1.0, 2.0, 3.0, 4.0]);
        assert_eq!(j.fixed_view::<4, 4>(2, 2).into_owned(), want);
        assert_eq!(j.fixed_view::<2, 2>(0, 0).into_owned(), base_j());
    }

    #[test]
    fn pole_fiber_block_is_north() {
        let w = wp_threefold();
        let j = w.warped_j(&[0.0, 0.0, 0.5, 0.5, 0.5, 0.5]);
        let want = j_matrix(crate::zspace::OcsPoint::north());
        assert_eq!(j.fixed_view::<4, 4>(2, 2).into_owned(), want);
    }

    #[test]
    fn j_is_orthogonal_complex_structure() {
        let w = wp_threefold();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let j = w.warped_j(&random_point(&mut rng));
            assert!((j * j + Matrix6::identity()).abs().max() < 1e-12);
            assert!((j.transpose() * j - Matrix6::identity()).abs().max() < 1e-12);
            assert!((j.transpose() + j).abs().max() < 1e-12);
        }
    }

    #[test]
    fn nijenhuis_vanishes_for_holomorphic_map() {
        let w = wp_threefold();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..20 {
            let p = random_point(&mut rng);
            let n = w.nijenhuis(&p, &random_dir(&mut rng), &random_dir(&mut rng), DEFAULT_H).unwrap();
            assert!(n.norm() < 1e-5, "{}", n.norm());
        }
    }

    #[test]
    fn nijenhuis_detects_conjugate_map() {
        let l = Lattice2::square();
        let w = WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l }.conjugate());
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let worst = (0..20)
            .map(|_| {
                let p = random_point(&mut rng);
                w.nijenhuis(&p, &random_dir(&mut rng), &random_dir(&mut rng), DEFAULT_H).unwrap().norm()
            })
            .fold(0.0, f64::max);
        assert!(worst > 1e-2);
    }

    #[test]
    fn nijenhuis_fiber_pair_is_exactly_zero() {
        let w = wp_threefold();
        let x = Vector6::new(0.0, 0.0, 1.0, -0.5, 0.2, 0.3);
        let y = Vector6::new(0.0, 0.0, 0.1, 0.9, -0.4, 0.0);
        let n = w.nijenhuis(&[0.3, 0.4, 0.0, 0.0, 0.0, 0.0], &x, &y, DEFAULT_H).unwrap();
        assert!(n.norm() < 1e-12);
        assert!(w.nijenhuis(&[0.3, 0.4, 0.0, 0.0, 0.0, 0.0], &x, &y, 1.0).is_err());
    }

    #[test]
    fn cauchy_riemann_dichotomy() {
        let l = Lattice2::square();
        let w = wp_threefold();
        let wc = WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l }.conjugate());
        let wk = WarpedThreefold::torus(l, MeromorphicMap::constant(Complex64::new(0.5, 0.5)));
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut worst_conj: f64 = 0.0;
        for _ in 0..50 {
            let z = l.point(rng.gen_range(0.05..0.95), rng.gen_range(0.05..0.95));
            assert!(w.cauchy_riemann_residual(z) < 1e-6);
            assert_eq!(wk.cauchy_riemann_residual(z), 0.0);
            worst_conj = worst_conj.max(wc.cauchy_riemann_residual(z));
        }
        assert!(worst_conj > 1e-2);
    }

    #[test]
    fn coframe_at_zero() {
        let w = WarpedThreefold::torus(Lattice2::square(), MeromorphicMap::constant(Complex64::new(0.0, 0.0)));
        let c = w.coframe(&[0.1; 6]);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let o = Complex64::new(0.0, 0.0);
        // in X coordinates (x₂ = -X₂): φ₁ = (i dx₂ + dx₄)/√2, φ₂ = (-i dx₁ + dx₃)/√2
        let want = [[o, -I * s, o, Complex64::new(s, 0.0)], [-I * s, o, Complex64::new(s, 0.0), o]];
        for k in 0..2 {
            for a in 0..4 {
                assert!((c.phi[k][a + 2] - want[k][a]).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn coframe_is_unitary_and_type_one_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for w in [wp_threefold(), WarpedThreefold::twistor()] {
            for _ in 0..100 {
                let p = random_point(&mut rng);
                let c = w.coframe(&p);
                let g = c.gram(w.base.rho(WarpedThreefold::base_z(&p)));
                for k in 0..3 {
                    for l in 0..3 {
                        let want = if k == l { 1.0 } else { 0.0 };
                        assert!((g[k][l] - want).norm() < 1e-10);
                    }
                }
                let j = w.warped_j(&p);
                let v = random_dir(&mut rng);
                let jv = j * v;
                let z: [Complex64; 6] = std::array::from_fn(|a| Complex64::new(v[a], jv[a]));
                for k in 0..3 {
                    assert!(c.apply(k, &z).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn chart_overlap_is_diagonal_unitary() {
        let w = wp_threefold();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..100 {
            let p = random_point(&mut rng);
            let Some(f) = w.f_value(WarpedThreefold::base_z(&p)).as_finite() else { continue };
            let c0 = w.coframe_in(&p, CoframeChart::Finite);
            let c1 = w.coframe_in(&p, CoframeChart::Infinite);
            let phase = f / f.norm();
            for k in 0..2 {
                for a in 0..6 {
                    assert!((c0.phi[k][a] - phase * c1.phi[k][a]).norm() < 1e-10);
                }
            }
            assert_eq!(c0.phi[2], c1.phi[2]);
        }
    }

    #[test]
    fn lambda_matches_closed_form_and_beta() {
        let w = wp_threefold();
        let l = Lattice2::square();
        let p = [0.3, 0.4, 0.0, 0.0, 0.0, 0.0];
        let z = Complex64::new(0.3, 0.4);
        let f = l.wp(z).as_finite().unwrap();
        let df = l.wp_prime(z).as_finite().unwrap();
        // unit coframe: f_ψ = √2 f'/√ρ with ρ = 1
        let want = 2f64.sqrt() * df.norm() / (1.0 + f.norm_sqr());
        assert!((w.torsion_lambda(&p).norm() - want).abs() < 1e-10 * want);
        // β = -i df/(1+|f|²) against finite differences of f, in the bounded chart
        let h = 1e-5;
        let q = |z: Complex64| {
            let v = l.wp(z).as_finite().unwrap();
            if f.norm() <= 1.0 { v } else { v.inv() }
        };
        let qz = (q(z + h) - q(z - h)) / (2.0 * h);
        let qn = q(z);
        let sign = if f.norm() <= 1.0 { 1.0 } else { -1.0 };
        let beta = -I * sign * qz / (1.0 + qn.norm_sqr());
        let lam = w.torsion_lambda(&p);
        // β = λ̄ φ₃ with φ₃ = √(ρ/2) dz
        assert!((beta - lam.conj() * (0.5f64).sqrt()).norm() < 1e-8 * beta.norm());
        let wk = WarpedThreefold::torus(l, MeromorphicMap::constant(Complex64::new(2.0, 0.0)));
        assert_eq!(wk.torsion_lambda(&p), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn numeric_torsion_has_only_lambda() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for w in [wp_threefold(), WarpedThreefold::twistor()] {
            for _ in 0..20 {
                let p = random_point(&mut rng);
                let t = w.chern_torsion(&p, DEFAULT_H).unwrap();
                let lam = w.torsion_lambda(&p);
                for k in 0..3 {
                    for i in 0..3 {
                        for j in 0..3 {
                            let want = match (k, i, j) {
                                (2, 0, 1) => lam,
                                (2, 1, 0) => -lam,
                                _ => Complex64::new(0.0, 0.0),
                            };
                            let tol = 1e-6 * (1.0 + lam.norm());
                            assert!((t.get(k, i, j) - want).norm() < tol, "T^{k}_{i}{j}: {} vs {want}", t.get(k, i, j));
                        }
                    }
                }
                assert!(t.is_balanced(1e-8));
            }
        }
    }

    #[test]
    fn nabla_j_profile_splits_base_and_fiber() {
        let w = wp_threefold();
        let p = [0.3, 0.4, 0.1, 0.2, 0.3, 0.4];
        for a in 2..6 {
            let mut d = Vector6::zeros();
            d[a] = 1.0;
            assert!(w.nabla_j_profile(&p, &d) < 1e-12);
        }
        let du = Vector6::new(1.0, 0.0, 0.0, 0.0, 0.0, 0.0);
        assert!(w.nabla_j_profile(&p, &du) > 1e-6);
        let wk = WarpedThreefold::torus(Lattice2::square(), MeromorphicMap::constant(Complex64::new(1.0, 0.0)));
        assert!(wk.nabla_j_profile(&p, &du) < 1e-12);
    }

    #[test]
    fn lattice4_volume() {
        assert!((Lattice4::diagonal([2.0, 1.0, 1.0, 1.0]).volume() - 2.0).abs() < 1e-15);
        assert!(Lattice4::new([[1.0, 0.0, 0.0, 0.0]; 4]).is_err());
    }
}

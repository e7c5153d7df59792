//! Calabi's complex structure on `M₁ × T⁴` for a hyperelliptic `M₁`.
//!
//! The minimal immersion `F₁ = Re ∫ (ω₁, ω₂, ω₃)` into `R³` together with the
//! identity on `R⁴` gives a hypersurface of `R⁷ = Im O`, and
//! `dF(Ju) = N × dF(u)` defines `J`. With the cross-product table below the
//! fiber block is the matrix with rows `(0, N₁, N₂, N₃)`,
//! `(−N₁, 0, −N₃, N₂)`, `(−N₂, N₃, 0, −N₁)`, `(−N₃, −N₂, N₁, 0)`, i.e.
//! `j_matrix` of `(a, b, c) = (N₁, N₃, N₂)`, the stereographic image of `φ`.

use nalgebra::{Matrix6, SMatrix, SVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meromorphic::{HyperellipticCurve, MeromorphicMap, RecordedPath, Sheet};
use crate::poly::Poly;
use crate::quadrature::gauss_legendre;
use crate::warped::{Base, Lattice4, WarpedThreefold};

pub type Vec7 = SVector<f64, 7>;

/// Oriented lines `(i, j, k)` with `e_i × e_j = e_k`, 1-based.
pub const FANO_LINES: [(usize, usize, usize); 7] =
    [(1, 2, 3), (1, 4, 5), (1, 7, 6), (2, 4, 6), (2, 5, 7), (3, 4, 7), (3, 6, 5)];

/// Basis signs applied to the octonion table so the fiber block takes the
/// block form in the module docs: `e₁, e₂, e₃` are negated.
pub const RELABEL_SIGNS: [f64; 7] = [-1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 1.0];

/// Structure constants of a cross product on `R⁷`: `(u × v)_k = Σ c[i][j][k] u_i v_j`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossProductTable {
    pub c: [[[f64; 7]; 7]; 7],
}

impl CrossProductTable {
    /// The imaginary-octonion product from [`FANO_LINES`].
    pub fn octonion() -> Self {
        let mut c = [[[0.0; 7]; 7]; 7];
        for &(i, j, k) in &FANO_LINES {
            let (i, j, k) = (i - 1, j - 1, k - 1);
            for (a, b, d) in [(i, j, k), (j, k, i), (k, i, j)] {
                c[a][b][d] = 1.0;
                c[b][a][d] = -1.0;
            }
        }
        CrossProductTable { c }
    }

    /// The table in the basis `e'_i = s_i e_i`.
    pub fn relabeled(&self, signs: [f64; 7]) -> Self {
        let mut c = [[[0.0; 7]; 7]; 7];
        for i in 0..7 {
            for j in 0..7 {
                for k in 0..7 {
                    c[i][j][k] = signs[i] * signs[j] * signs[k] * self.c[i][j][k];
                }
            }
        }
        CrossProductTable { c }
    }

    /// The frozen table used for `J`.
    pub fn calabi() -> Self {
        CrossProductTable::octonion().relabeled(RELABEL_SIGNS)
    }

    pub fn cross(&self, u: &Vec7, v: &Vec7) -> Vec7 {
        let mut out = Vec7::zeros();
        for i in 0..7 {
            if u[i] == 0.0 {
                continue;
            }
            for j in 0..7 {
                for k in 0..7 {
                    out[k] += self.c[i][j][k] * u[i] * v[j];
                }
            }
        }
        out
    }
}

/// A hyperelliptic curve, the polynomial `φ` of degree `(g − 1)/2`, the base
/// point `Q₀` and the fiber lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalabiData {
    pub curve: HyperellipticCurve,
    pub phi: Poly,
    pub base_point: Complex64,
    pub base_sheet: Sheet,
    pub fiber: Lattice4,
}

impl CalabiData {
    pub fn new(
        curve: HyperellipticCurve,
        phi: Poly,
        base_point: Complex64,
        base_sheet: Sheet,
        fiber: Lattice4,
    ) -> Result<Self> {
        let want = (curve.genus() - 1) / 2;
        if phi.degree() != want || phi.is_zero() {
            return Err(Error::InvalidInput(format!(
                "phi must have degree (g-1)/2 = {want}, got {}",
                phi.degree()
            )));
        }
        if curve.branch_distance(base_point) <= crate::meromorphic::hyperelliptic::BRANCH_TOL {
            return Err(Error::AmbiguousSheet { z: format!("{base_point}") });
        }
        Ok(CalabiData { curve, phi, base_point, base_sheet, fiber })
    }

    /// Genus 3, branch values `2 e^{2πik/8}`, `φ(z) = z`, `Q₀ = (0, +)`.
    pub fn default_instance() -> Self {
        CalabiData::new(
            HyperellipticCurve::regular(3, 2.0).expect("regular genus-3 curve"),
            Poly::identity(),
            Complex64::new(0.0, 0.0),
            Sheet::Plus,
            Lattice4::standard(),
        )
        .expect("default instance is valid")
    }

    /// The warped threefold with base metric induced by the immersion and `f = φ`.
    pub fn threefold(&self) -> WarpedThreefold {
        WarpedThreefold::new(
            Base::Hyperelliptic { curve: self.curve.clone(), metric_phi: self.phi.clone() },
            self.fiber,
            MeromorphicMap::HyperellipticPhi { curve: self.curve.clone(), phi: self.phi.clone() },
        )
    }
}

/// Coefficients of `ω_i` against `dz` at `(z, w)`.
pub fn forms_at(phi: &Poly, z: Complex64, w: Complex64) -> [Complex64; 3] {
    let p = phi.eval(z);
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    [(p * p - one) / (w * 2.0), -p / w, (p * p + one) / (i * w * 2.0)]
}

/// `(ω₁, ω₂, ω₃)` against `dz` on the given sheet.
pub fn weierstrass_forms(data: &CalabiData, z: Complex64, sheet: Sheet) -> Result<[Complex64; 3]> {
    if data.curve.branch_distance(z) <= crate::meromorphic::hyperelliptic::BRANCH_TOL {
        return Err(Error::AmbiguousSheet { z: format!("{z}") });
    }
    Ok(forms_at(&data.phi, z, data.curve.w(z, sheet)))
}

/// The forms against `dt` in the chart `z = z_i + t²`, `w = t·√cofactor_i(z)`.
pub fn weierstrass_forms_t(data: &CalabiData, i: usize, t: Complex64) -> [Complex64; 3] {
    let z = data.curve.branch_values()[i] + t * t;
    let root = data.curve.cofactor(i, z).sqrt();
    // ω = c(z, w) dz with dz = 2t dt and w = t·root
    forms_at(&data.phi, z, root).map(|c| c * 2.0)
}

/// `Re ∫ ω` along the straight segment `a → b`, continuing `w` from `w_a`.
/// Returns the integral and `w` at `b`.
fn integrate_segment(
    data: &CalabiData,
    a: Complex64,
    b: Complex64,
    mut w: Complex64,
    gl: &crate::quadrature::GaussLegendre,
) -> Result<([f64; 3], Complex64)> {
    let mut acc = [0.0; 3];
    let len = (b - a).norm();
    if len == 0.0 {
        return Ok((acc, w));
    }
    let mut t = 0.0;
    let pick = |z: Complex64, w: Complex64| -> Complex64 {
        let r = data.curve.w_ref(z);
        if (r - w).norm() <= (r + w).norm() {
            r
        } else {
            -r
        }
    };
    while t < 1.0 {
        let z0 = a + (b - a) * t;
        let d = data.curve.branch_distance(z0);
        if d <= crate::meromorphic::hyperelliptic::BRANCH_TOL {
            return Err(Error::SheetInconsistency(format!("path passes through a branch value near {z0}")));
        }
        let dt = (0.1 * d / len).min(1.0 - t);
        let (za, zb) = (z0, a + (b - a) * (t + dt));
        let (mid, half) = ((za + zb) * 0.5, (zb - za) * 0.5);
        // nodes in increasing order keep the continuation monotone
        let mut nodes: Vec<(f64, f64)> = gl.nodes.iter().copied().zip(gl.weights.iter().copied()).collect();
        nodes.sort_by(|x, y| x.0.total_cmp(&y.0));
        for (x, wt) in nodes {
            let z = mid + half * x;
            w = pick(z, w);
            let c = forms_at(&data.phi, z, w);
            for k in 0..3 {
                acc[k] += wt * (c[k] * half).re;
            }
        }
        t += dt;
        w = pick(zb, w);
    }
    Ok((acc, w))
}

/// Integrates along the polyline from `(path[0], sheet)`; returns `x` and the final `w`.
pub fn immersion_along(data: &CalabiData, path: &[Complex64], sheet: Sheet) -> Result<([f64; 3], Complex64)> {
    let gl = gauss_legendre(10);
    let Some(&z0) = path.first() else {
        return Err(Error::InvalidInput("empty path".into()));
    };
    if data.curve.branch_distance(z0) <= crate::meromorphic::hyperelliptic::BRANCH_TOL {
        return Err(Error::AmbiguousSheet { z: format!("{z0}") });
    }
    let mut w = data.curve.w(z0, sheet);
    let mut x = [0.0; 3];
    for seg in path.windows(2) {
        let (dx, w2) = integrate_segment(data, seg[0], seg[1], w, &gl)?;
        for k in 0..3 {
            x[k] += dx[k];
        }
        w = w2;
    }
    Ok((x, w))
}

/// `x_i(Q) = Re ∫_{Q₀}^{Q} ω_i` along a polyline starting at the base point.
pub fn minimal_immersion(data: &CalabiData, path: &[Complex64]) -> Result<[f64; 3]> {
    if path.first() != Some(&data.base_point) {
        return Err(Error::InvalidInput("path must start at the base point".into()));
    }
    Ok(immersion_along(data, path, data.base_sheet)?.0)
}

/// As [`minimal_immersion`], after checking the recorded sheet tags.
pub fn minimal_immersion_recorded(data: &CalabiData, path: &RecordedPath) -> Result<[f64; 3]> {
    path.replay(&data.curve)?;
    if path.sheets.first() != Some(&data.base_sheet) {
        return Err(Error::SheetInconsistency("path does not start on the base sheet".into()));
    }
    minimal_immersion(data, &path.vertices)
}

/// Unit normal `N = (2 Re φ, |φ|² − 1, 2 Im φ)/(|φ|² + 1)` in `R⁷`.
pub fn gauss_normal(data: &CalabiData, z: Complex64) -> Vec7 {
    normal_from_phi(data.phi.eval(z))
}

pub fn normal_from_phi(p: Complex64) -> Vec7 {
    let n = p.norm_sqr() + 1.0;
    Vec7::from_column_slice(&[2.0 * p.re / n, (p.norm_sqr() - 1.0) / n, 2.0 * p.im / n, 0.0, 0.0, 0.0, 0.0])
}

/// `J` in the basis `(∂_u, ∂_v, ∂x₄, …, ∂x₇)` from `dF(Ju) = N × dF(u)`.
pub fn calabi_j(data: &CalabiData, z: Complex64, sheet: Sheet) -> Result<Matrix6<f64>> {
    let table = CrossProductTable::calabi();
    let c = weierstrass_forms(data, z, sheet)?;
    let n = gauss_normal(data, z);
    // dF(∂_u) = Re c, dF(∂_v) = Re(i c)
    let mut t = SMatrix::<f64, 7, 6>::zeros();
    for k in 0..3 {
        t[(k, 0)] = c[k].re;
        t[(k, 1)] = -c[k].im;
    }
    for k in 0..4 {
        t[(3 + k, 2 + k)] = 1.0;
    }
    let mut images = SMatrix::<f64, 7, 6>::zeros();
    for col in 0..6 {
        let v: Vec7 = t.column(col).into_owned();
        images.set_column(col, &table.cross(&n, &v));
    }
    let svd = t.svd(true, true);
    let j = svd
        .solve(&images, 1e-14)
        .map_err(|e| Error::InvalidInput(format!("tangent frame solve failed: {e}")))?;
    let residual = (t * j - images).abs().max();
    if residual > 1e-9 * (1.0 + images.abs().max()) {
        return Err(Error::IdentityFailure {
            entry: "N × dF(u) in the tangent space".into(),
            difference: format!("{residual:e}"),
        });
    }
    Ok(j)
}

/// The closed-form fiber block: rows `(0, N₁, N₂, N₃)`, `(−N₁, 0, −N₃, N₂)`, …
pub fn fiber_block_display(n: &Vec7) -> nalgebra::Matrix4<f64> {
    let (n1, n2, n3) = (n[0], n[1], n[2]);
    nalgebra::Matrix4::new(
        0.0, n1, n2, n3, //
        -n1, 0.0, -n3, n2, //
        -n2, n3, 0.0, -n1, //
        -n3, -n2, n1, 0.0,
    )
}

/// Hermitian coefficient `Σ|∂x_i/∂z|² = (|φ|² + 1)²/(8|w|²)` of the induced metric
/// against `|dz|²`; the Riemannian factor against `du² + dv²` is twice this.
pub fn induced_metric(data: &CalabiData, z: Complex64) -> f64 {
    (data.phi.eval(z).norm_sqr() + 1.0).powi(2) / (8.0 * data.curve.w_squared(z).norm())
}

/// The same coefficient in the chart `z = z_i + t²` (against `|dt|²`).
pub fn induced_metric_t(data: &CalabiData, i: usize, t: Complex64) -> f64 {
    let z = data.curve.branch_values()[i] + t * t;
    (data.phi.eval(z).norm_sqr() + 1.0).powi(2) / (2.0 * data.curve.cofactor(i, z).norm())
}

/// `Σ|∂x_i/∂z|²` computed from the forms.
pub fn metric_from_forms(c: &[Complex64; 3]) -> f64 {
    c.iter().map(|x| (x * 0.5).norm_sqr()).sum()
}

/// `K = −2 [4|φ′ w| / (|φ|² + 1)²]²`, which is `−Δ log h / (2h)` for the
/// coefficient `h` of [`induced_metric`]. The curvature of the Riemannian
/// metric `2h (du² + dv²)` is half of this ([`riemannian_curvature`]).
pub fn gauss_curvature(data: &CalabiData, z: Complex64) -> f64 {
    let (p, dp) = data.phi.eval_d(z);
    let s = 4.0 * (dp.norm() * data.curve.w_squared(z).norm().sqrt()) / (p.norm_sqr() + 1.0).powi(2);
    -2.0 * s * s
}

pub fn riemannian_curvature(data: &CalabiData, z: Complex64) -> f64 {
    0.5 * gauss_curvature(data, z)
}

/// `−Δ log h / (2h)` by a Richardson-extrapolated five-point Laplacian.
pub fn curvature_fd(h: impl Fn(Complex64) -> f64, z: Complex64, step: f64) -> f64 {
    let l = |z: Complex64| h(z).ln();
    let lap = |s: f64| {
        let (e, ie) = (Complex64::new(s, 0.0), Complex64::new(0.0, s));
        (l(z + e) + l(z - e) + l(z + ie) + l(z - ie) - 4.0 * l(z)) / (s * s)
    };
    let rich = (4.0 * lap(0.5 * step) - lap(step)) / 3.0;
    -rich / (2.0 * h(z))
}

/// Mean curvature of the immersed patch around `(z, sheet)` from finite
/// differences of path-integrated positions.
pub fn mean_curvature_fd(data: &CalabiData, z: Complex64, sheet: Sheet, step: f64) -> Result<f64> {
    let pos = |dz: Complex64| -> Result<nalgebra::Vector3<f64>> {
        let (x, _) = immersion_along(data, &[z, z + dz], sheet)?;
        Ok(nalgebra::Vector3::new(x[0], x[1], x[2]))
    };
    let h = step;
    let e = Complex64::new(h, 0.0);
    let ie = Complex64::new(0.0, h);
    let x0 = pos(Complex64::new(0.0, 0.0))?;
    let (xp, xm, yp, ym) = (pos(e)?, pos(-e)?, pos(ie)?, pos(-ie)?);
    let (pp, pm, mp, mm) = (pos(e + ie)?, pos(e - ie)?, pos(-e + ie)?, pos(-e - ie)?);
    let xu = (xp - xm) / (2.0 * h);
    let xv = (yp - ym) / (2.0 * h);
    let xuu = (xp - 2.0 * x0 + xm) / (h * h);
    let xvv = (yp - 2.0 * x0 + ym) / (h * h);
    let xuv = (pp - pm - mp + mm) / (4.0 * h * h);
    let nrm = xu.cross(&xv).normalize();
    let (ee, ff, gg) = (xu.dot(&xu), xu.dot(&xv), xv.dot(&xv));
    let (l, m, n) = (xuu.dot(&nrm), xuv.dot(&nrm), xvv.dot(&nrm));
    Ok((ee * n - 2.0 * ff * m + gg * l) / (2.0 * (ee * gg - ff * ff)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zspace::{j_matrix, stereo_to_sphere, ExtendedComplex};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rand7(rng: &mut ChaCha8Rng) -> Vec7 {
        Vec7::from_fn(|_, _| rng.gen_range(-1.0..1.0))
    }

    fn random_regular_z(data: &CalabiData, rng: &mut ChaCha8Rng) -> Complex64 {
        loop {
            let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
            if data.curve.branch_distance(z) > 0.05 {
                return z;
            }
        }
    }

    #[test]
    fn cross_product_table_axioms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for table in [CrossProductTable::octonion(), CrossProductTable::calabi()] {
            for i in 0..7 {
                for j in 0..7 {
                    for k in 0..7 {
                        assert_eq!(table.c[i][j][k], -table.c[j][i][k]);
                        assert_eq!(table.c[i][j][k], table.c[j][k][i]);
                    }
                }
            }
            for _ in 0..100 {
                let (u, v) = (rand7(&mut rng), rand7(&mut rng));
                let w = table.cross(&u, &v);
                assert!(w.dot(&u).abs() < 1e-12 && w.dot(&v).abs() < 1e-12);
                let lhs = w.norm_squared();
                let rhs = u.norm_squared() * v.norm_squared() - u.dot(&v).powi(2);
                assert!((lhs - rhs).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn forms_are_isotropic_and_flip_with_sheet() {
        let data = CalabiData::default_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        for _ in 0..200 {
            let z = random_regular_z(&data, &mut rng);
            let c = weierstrass_forms(&data, z, Sheet::Plus).unwrap();
            let s: Complex64 = c.iter().map(|x| x * x).sum();
            let scale: f64 = c.iter().map(|x| x.norm_sqr()).sum();
            assert!(s.norm() < 1e-10 * scale);
            let cm = weierstrass_forms(&data, z, Sheet::Minus).unwrap();
            for k in 0..3 {
                assert_eq!(cm[k], -c[k]);
            }
            // against the unit base coframe the triple has constant length
            let rho = 2.0 * induced_metric(&data, z);
            assert!((scale / rho - 2.0).abs() < 1e-10);
        }
        // at a zero of φ
        let w = data.curve.w(Complex64::new(0.0, 0.0), Sheet::Plus);
        let c = weierstrass_forms(&data, Complex64::new(0.0, 0.0), Sheet::Plus).unwrap();
        assert!((c[0] + 1.0 / (w * 2.0)).norm() < 1e-15);
        assert_eq!(c[1].norm(), 0.0);
        assert!((c[2] - 1.0 / (Complex64::new(0.0, 2.0) * w)).norm() < 1e-15);
        assert!(weierstrass_forms(&data, data.curve.branch_values()[0], Sheet::Plus).is_err());
    }

    #[test]
    fn t_chart_forms_are_finite_at_branch_values() {
        let data = CalabiData::default_instance();
        let c0 = weierstrass_forms_t(&data, 3, Complex64::new(0.0, 0.0));
        assert!(c0.iter().all(|x| x.is_finite()) && c0.iter().any(|x| x.norm() > 0.1));
        let t = Complex64::new(0.05, 0.02);
        let z = data.curve.branch_values()[3] + t * t;
        let ct = weierstrass_forms_t(&data, 3, t);
        let cz = weierstrass_forms(&data, z, Sheet::Plus).unwrap();
        let ratio = ct[0] / (cz[0] * t * 2.0);
        assert!((ratio.norm() - 1.0).abs() < 1e-10);
        for k in 0..3 {
            assert!((ct[k] - ratio * cz[k] * t * 2.0).norm() < 1e-10);
        }
        assert!(induced_metric_t(&data, 3, Complex64::new(0.0, 0.0)).is_finite());
        assert!(induced_metric(&data, data.curve.branch_values()[3] + 1e-12) > 1e9);
    }

    #[test]
    fn normal_examples() {
        let n0 = normal_from_phi(Complex64::new(0.0, 0.0));
        assert_eq!(n0.as_slice(), &[0.0, -1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let n1 = normal_from_phi(Complex64::new(1.0, 0.0));
        assert_eq!(n1.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let big = normal_from_phi(Complex64::new(1e8, 0.0));
        assert!((big[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_is_orthogonal_to_tangents() {
        let data = CalabiData::default_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let z = random_regular_z(&data, &mut rng);
            let n = gauss_normal(&data, z);
            assert!((n.norm() - 1.0).abs() < 1e-12);
            let h = 1e-5;
            for dir in [Complex64::new(h, 0.0), Complex64::new(0.0, h)] {
                let (xp, _) = immersion_along(&data, &[z, z + dir], Sheet::Plus).unwrap();
                let (xm, _) = immersion_along(&data, &[z, z - dir], Sheet::Plus).unwrap();
                let tan: Vec<f64> = (0..3).map(|k| (xp[k] - xm[k]) / (2.0 * h)).collect();
                let tn = (tan[0] * tan[0] + tan[1] * tan[1] + tan[2] * tan[2]).sqrt();
                let dot = tan[0] * n[0] + tan[1] * n[1] + tan[2] * n[2];
                assert!(dot.abs() < 1e-6 * tn);
            }
        }
    }

    #[test]
    fn j_matches_display_and_warped_form() {
        let data = CalabiData::default_instance();
        let w3 = data.threefold();
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..300 {
            let z = random_regular_z(&data, &mut rng);
            let sheet = if rng.gen_bool(0.5) { Sheet::Plus } else { Sheet::Minus };
            let j = calabi_j(&data, z, sheet).unwrap();
            let n = gauss_normal(&data, z);
            let block = j.fixed_view::<4, 4>(2, 2).into_owned();
            assert!((block - fiber_block_display(&n)).abs().max() < 1e-12);
            let stereo = j_matrix(stereo_to_sphere(ExtendedComplex::Finite(data.phi.eval(z))));
            assert!((block - stereo).abs().max() < 1e-12);
            let p = [z.re, z.im, 0.1, 0.2, 0.3, 0.4];
            assert!((j - w3.warped_j(&p)).abs().max() < 1e-12);
            assert!((j * j + Matrix6::identity()).abs().max() < 1e-12);
        }
    }

    #[test]
    fn fiber_block_at_zero_phi() {
        let n = normal_from_phi(Complex64::new(0.0, 0.0));
        let b = fiber_block_display(&n);
        let want = nalgebra::Matrix4::new(
            0.0, 0.0, -1.0, 0.0, //
            0.0, 0.0, 0.0, -1.0, //
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0,
        );
        assert_eq!(b, want);
    }

    #[test]
    fn immersion_paths() {
        let data = CalabiData::default_instance();
        let q0 = data.base_point;
        assert_eq!(minimal_immersion(&data, &[q0]).unwrap(), [0.0; 3]);
        let q1 = Complex64::new(0.7, 0.4);
        let q2 = Complex64::new(1.1, -0.3);
        let straight = minimal_immersion(&data, &[q0, q1]).unwrap();
        let bent = minimal_immersion(&data, &[q0, Complex64::new(0.2, 0.6), q1]).unwrap();
        for k in 0..3 {
            assert!((straight[k] - bent[k]).abs() < 1e-8);
        }
        // additivity
        let (x1, w1) = immersion_along(&data, &[q0, q1], data.base_sheet).unwrap();
        let sheet1 = data.curve.sheet_of(q1, w1).unwrap();
        let (x2, _) = immersion_along(&data, &[q1, q2], sheet1).unwrap();
        let x12 = minimal_immersion(&data, &[q0, q1, q2]).unwrap();
        for k in 0..3 {
            assert!((x12[k] - x1[k] - x2[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn cycle_changes_position_by_its_period() {
        let data = CalabiData::default_instance();
        let b0 = data.curve.branch_values()[0];
        let b1 = data.curve.branch_values()[1];
        let mid = (b0 + b1) * 0.5;
        let r = 0.5 * (b0 - b1).norm() + 0.4;
        // closed loop around b0, b1 starting on the ray from the origin through `mid`
        let start = mid * (1.0 - r / mid.norm());
        let a0 = (start - mid).arg();
        let loop_path: Vec<Complex64> = (0..=256)
            .map(|k| mid + Complex64::from_polar(r, a0 + 2.0 * std::f64::consts::PI * k as f64 / 256.0))
            .collect();
        assert!((loop_path[0] - start).norm() < 1e-12);
        let (_, w_start) = immersion_along(&data, &[data.base_point, start], data.base_sheet).unwrap();
        let sheet_start = data.curve.sheet_of(start, w_start).unwrap();
        let (period, w_end) = immersion_along(&data, &loop_path, sheet_start).unwrap();
        assert!((w_end - w_start).norm() < 1e-8 * w_start.norm());
        assert!(period.iter().any(|p| p.abs() > 1e-3));
        let q = Complex64::new(0.9, 0.1);
        let direct = minimal_immersion(&data, &[data.base_point, start, q]).unwrap();
        let mut via: Vec<Complex64> = vec![data.base_point];
        via.extend(loop_path.iter().copied());
        via.push(q);
        let around = minimal_immersion(&data, &via).unwrap();
        for k in 0..3 {
            assert!((around[k] - direct[k] - period[k]).abs() < 1e-8);
        }
    }

    #[test]
    fn recorded_path_tags_are_enforced() {
        let data = CalabiData::default_instance();
        let path = vec![data.base_point, Complex64::new(2.5, 0.3), Complex64::new(2.5, -0.3)];
        let rec = RecordedPath::record(&data.curve, path.clone(), Sheet::Plus).unwrap();
        assert!(minimal_immersion_recorded(&data, &rec).is_ok());
        let mut bad = rec.clone();
        let last = bad.sheets.len() - 1;
        bad.sheets[last] = bad.sheets[last].flip();
        assert!(matches!(minimal_immersion_recorded(&data, &bad), Err(Error::SheetInconsistency(_))));
    }

    #[test]
    fn metric_from_forms_matches_display() {
        let data = CalabiData::default_instance();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for _ in 0..100 {
            let z = random_regular_z(&data, &mut rng);
            for sheet in [Sheet::Plus, Sheet::Minus] {
                let c = weierstrass_forms(&data, z, sheet).unwrap();
                let h = induced_metric(&data, z);
                assert!((metric_from_forms(&c) - h).abs() < 1e-10 * h);
            }
            let base = Base::Hyperelliptic { curve: data.curve.clone(), metric_phi: data.phi.clone() };
            assert!((base.rho(z) - 2.0 * induced_metric(&data, z)).abs() < 1e-12 * base.rho(z));
            assert!((base.curvature(z) - riemannian_curvature(&data, z)).abs() < 1e-12 * base.curvature(z).abs());
        }
    }

    #[test]
    fn curvature_formula_vs_finite_differences() {
        let data = CalabiData::default_instance();
        let base = Base::Hyperelliptic { curve: data.curve.clone(), metric_phi: data.phi.clone() };
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let mut ks = Vec::new();
        for _ in 0..50 {
            let z = random_regular_z(&data, &mut rng);
            let k = gauss_curvature(&data, z);
            let fd = curvature_fd(|z| induced_metric(&data, z), z, 1e-3);
            assert!((fd - k).abs() < 1e-4 * k.abs(), "{z}: {fd} vs {k}");
            let fd_r = curvature_fd(|z| base.rho(z), z, 1e-3);
            assert!((fd_r - base.curvature(z)).abs() < 1e-4 * k.abs());
            ks.push(k);
        }
        let mean = ks.iter().sum::<f64>() / ks.len() as f64;
        let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len() as f64;
        assert!(var > 0.0);
        // φ′ = 0 gives K = 0
        let flat = CalabiData { phi: Poly::constant(Complex64::new(0.5, 0.0)), ..data.clone() };
        assert_eq!(gauss_curvature(&flat, Complex64::new(0.3, 0.1)), 0.0);
    }

    #[test]
    fn patch_is_minimal() {
        let data = CalabiData::default_instance();
        for z in [Complex64::new(0.3, 0.2), Complex64::new(-1.0, 0.7), Complex64::new(2.6, -0.4)] {
            let h = mean_curvature_fd(&data, z, Sheet::Plus, 1e-3).unwrap();
            assert!(h.abs() < 1e-4, "{h}");
        }
    }

    #[test]
    fn data_validation() {
        let curve = HyperellipticCurve::regular(3, 2.0).unwrap();
        let quad = Poly::new(vec![Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)]);
        assert!(CalabiData::new(curve.clone(), quad, Complex64::new(0.0, 0.0), Sheet::Plus, Lattice4::standard()).is_err());
        let b = curve.branch_values()[0];
        assert!(CalabiData::new(curve, Poly::identity(), b, Sheet::Plus, Lattice4::standard()).is_err());
    }
}

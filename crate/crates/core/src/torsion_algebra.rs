//! Pointwise Chern torsion at complex dimension 3: the operators `A_X`,
//! trace conditions, nilpotency, frame normalization and the kernel
//! decomposition `W = N₀ ⊕ N₁' ⊕ N₂'`.
//!
//! Indices are 0-based in code: `t[k][i][j] = T^{k+1}_{i+1, j+1}`.

use nalgebra::{DMatrix, Matrix3, Vector3};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix3 = Matrix3<Complex64>;
pub type CVector3 = Vector3<Complex64>;

pub const TOL: f64 = 1e-12;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorsionTensorN3 {
    t: [[[Complex64; 3]; 3]; 3],
}

impl TorsionTensorN3 {
    pub fn zero() -> Self {
        TorsionTensorN3 { t: [[[ZERO; 3]; 3]; 3] }
    }

    /// Rejects inputs that are not exactly antisymmetric in the lower pair.
    pub fn from_components(t: [[[Complex64; 3]; 3]; 3]) -> Result<Self> {
        for (k, tk) in t.iter().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    if tk[i][j] != -tk[j][i] {
                        return Err(Error::InvalidInput(format!(
                            "T^{}_{}{} is not antisymmetric",
                            k + 1,
                            i + 1,
                            j + 1
                        )));
                    }
                }
            }
        }
        Ok(TorsionTensorN3 { t })
    }

    /// Antisymmetrizes `(t - tᵀ)/2` in the lower pair.
    pub fn antisymmetrized(t: [[[Complex64; 3]; 3]; 3]) -> Self {
        let mut out = [[[ZERO; 3]; 3]; 3];
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    out[k][i][j] = (t[k][i][j] - t[k][j][i]) * 0.5;
                }
            }
        }
        TorsionTensorN3 { t: out }
    }

    /// The balanced tensor with `a_i = T^i_{jk}`, `b_i = T^j_{ij}` for cyclic `(ijk)`.
    pub fn from_balanced(a: [Complex64; 3], b: [Complex64; 3]) -> Self {
        let mut t = TorsionTensorN3::zero();
        // (upper, i, j, value) for i < j in cyclic order
        let entries = [
            (0, 0, 1, b[1]),
            (0, 1, 2, a[0]),
            (0, 2, 0, b[2]),
            (1, 0, 1, b[0]),
            (1, 1, 2, b[2]),
            (1, 2, 0, a[1]),
            (2, 0, 1, a[2]),
            (2, 1, 2, b[1]),
            (2, 2, 0, b[0]),
        ];
        for (k, i, j, v) in entries {
            t.t[k][i][j] = v;
            t.t[k][j][i] = -v;
        }
        t
    }

    /// Only `T³₁₂ = λ` nonzero.
    pub fn single_lambda(lambda: Complex64) -> Self {
        TorsionTensorN3::from_balanced([ZERO, ZERO, lambda], [ZERO; 3])
    }

    pub fn get(&self, k: usize, i: usize, j: usize) -> Complex64 {
        self.t[k][i][j]
    }

    pub fn components(&self) -> &[[[Complex64; 3]; 3]; 3] {
        &self.t
    }

    /// `(a₁, a₂, a₃)`
    pub fn a(&self) -> [Complex64; 3] {
        [self.t[0][1][2], self.t[1][2][0], self.t[2][0][1]]
    }

    /// `(b₁, b₂, b₃)`
    pub fn b(&self) -> [Complex64; 3] {
        [self.t[1][0][1], self.t[2][1][2], self.t[0][2][0]]
    }

    /// `Σ_l T^l_{il}` for each `i`.
    pub fn torsion_trace(&self) -> [Complex64; 3] {
        let mut out = [ZERO; 3];
        for (i, o) in out.iter_mut().enumerate() {
            for l in 0..3 {
                *o += self.t[l][i][l];
            }
        }
        out
    }

    pub fn is_balanced(&self, tol: f64) -> bool {
        self.torsion_trace().iter().all(|c| c.norm() <= tol)
    }

    pub fn max_abs(&self) -> f64 {
        self.t.iter().flatten().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `(A_X)_{ji} = Σ_k X_k T^j_{ki}`
    pub fn a_x(&self, x: &CVector3) -> CMatrix3 {
        CMatrix3::from_fn(|j, i| (0..3).map(|k| x[k] * self.t[j][k][i]).sum())
    }

    pub fn a_e(&self, l: usize) -> CMatrix3 {
        let mut x = CVector3::zeros();
        x[l] = Complex64::new(1.0, 0.0);
        self.a_x(&x)
    }

    /// `T^X_{ij} = Σ_k conj(X_k) T^k_{ij}` as a matrix in `(i, j)`.
    pub fn upper_contract(&self, x: &CVector3) -> CMatrix3 {
        CMatrix3::from_fn(|i, j| (0..3).map(|k| x[k].conj() * self.t[k][i][j]).sum())
    }

    /// The tensor in the frame `e'_i = Σ_a U_{ia} e_a`:
    /// `T'^k_{ij} = Σ U_{ia} U_{jb} conj(U_{kc}) T^c_{ab}`.
    pub fn change_frame(&self, u: &CMatrix3) -> Self {
        let mut out = [[[ZERO; 3]; 3]; 3];
        for (k, ok) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    let mut s = ZERO;
                    for a in 0..3 {
                        for b in 0..3 {
                            let uab = u[(i, a)] * u[(j, b)];
                            for c in 0..3 {
                                s += uab * u[(k, c)].conj() * self.t[c][a][b];
                            }
                        }
                    }
                    ok[i][j] = s;
                }
            }
        }
        TorsionTensorN3 { t: out }
    }
}

/// `b_i² = a_j a_k` and `a_k b_k = b_i b_j` for all cyclic `(ijk)`.
pub fn trace_conditions(t: &TorsionTensorN3) -> bool {
    trace_condition_residual(t) <= TOL
}

pub fn trace_condition_residual(t: &TorsionTensorN3) -> f64 {
    let (a, b) = (t.a(), t.b());
    let mut r = 0.0_f64;
    for (i, j, k) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        r = r.max((b[i] * b[i] - a[j] * a[k]).norm());
        r = r.max((a[k] * b[k] - b[i] * b[j]).norm());
    }
    r
}

/// `max |tr(A_{e_l} A_{e_m})|` over basis pairs.
pub fn trace_form_residual(t: &TorsionTensorN3) -> f64 {
    let mats: Vec<CMatrix3> = (0..3).map(|l| t.a_e(l)).collect();
    let mut r = 0.0_f64;
    for x in &mats {
        for y in &mats {
            r = r.max((x * y).trace().norm());
        }
    }
    r
}

/// Largest entry of `A_{e_l} A_{e_m}` over all basis pairs.
pub fn nilpotency_residual(t: &TorsionTensorN3) -> f64 {
    let mats: Vec<CMatrix3> = (0..3).map(|l| t.a_e(l)).collect();
    let mut r = 0.0_f64;
    for x in &mats {
        for y in &mats {
            r = r.max((x * y).iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
    }
    r
}

pub fn nilpotency(t: &TorsionTensorN3) -> bool {
    nilpotency_residual(t) <= TOL
}

/// Rotates `{e₂, e₃}` so that `b₁ = T²₁₂` vanishes.
///
/// `b₁' = v^† M v` with `v = (p, q)` and `M = [[b₁, -a₂], [a₃, -b₁]]`, which is
/// traceless. Writing `M = H₁ + iH₂` with Hermitian `H_k = h_k·σ`, the Bloch
/// vector of `v` has to be orthogonal to both `h₁` and `h₂`.
pub fn normalize_frame(t: &TorsionTensorN3) -> (CMatrix3, TorsionTensorN3) {
    let (a, b) = (t.a(), t.b());
    if b[0].norm() <= 1e-15 {
        return (CMatrix3::identity(), *t);
    }
    let m = [[b[0], -a[1]], [a[2], -b[0]]];
    let i = Complex64::new(0.0, 1.0);
    let herm = |h: [[Complex64; 2]; 2]| -> [f64; 3] {
        // h = hx σx + hy σy + hz σz
        [h[1][0].re, h[1][0].im, h[0][0].re]
    };
    let h1 = herm([
        [(m[0][0] + m[0][0].conj()) * 0.5, (m[0][1] + m[1][0].conj()) * 0.5],
        [(m[1][0] + m[0][1].conj()) * 0.5, (m[1][1] + m[1][1].conj()) * 0.5],
    ]);
    let h2 = herm([
        [(m[0][0] - m[0][0].conj()) / (2.0 * i), (m[0][1] - m[1][0].conj()) / (2.0 * i)],
        [(m[1][0] - m[0][1].conj()) / (2.0 * i), (m[1][1] - m[1][1].conj()) / (2.0 * i)],
    ]);
    let n = orthogonal_unit(h1, h2);
    let theta = n[2].clamp(-1.0, 1.0).acos();
    let phi = n[1].atan2(n[0]);
    let p = Complex64::new((theta / 2.0).cos(), 0.0);
    let q = Complex64::from_polar((theta / 2.0).sin(), phi);
    let u = CMatrix3::new(
        Complex64::new(1.0, 0.0), ZERO, ZERO, //
        ZERO, p, q, //
        ZERO, -q.conj(), p.conj(),
    );
    (u, t.change_frame(&u))
}

/// A unit vector orthogonal to both inputs.
fn orthogonal_unit(x: [f64; 3], y: [f64; 3]) -> [f64; 3] {
    let cross = |a: [f64; 3], b: [f64; 3]| {
        [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
    };
    let norm = |a: [f64; 3]| (a[0] * a[0] + a[1] * a[1] + a[2] * a[2]).sqrt();
    let scale = norm(x).max(norm(y)).max(1e-300);
    let c = cross(x, y);
    if norm(c) > 1e-10 * scale * scale {
        let l = norm(c);
        return [c[0] / l, c[1] / l, c[2] / l];
    }
    // parallel or zero inputs: any vector orthogonal to the dominant one
    let d = if norm(x) >= norm(y) { x } else { y };
    if norm(d) == 0.0 {
        return [0.0, 0.0, 1.0];
    }
    let trial = if d[0].abs() < 0.9 * norm(d) { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
    let c = cross(d, trial);
    let l = norm(c);
    [c[0] / l, c[1] / l, c[2] / l]
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelDecomposition {
    pub n0: Vec<CVector3>,
    pub n1_prime: Vec<CVector3>,
    pub n2_prime: Vec<CVector3>,
    /// Basis of `Σ_X Im(A_X)`.
    pub image: Vec<CVector3>,
}

impl KernelDecomposition {
    pub fn dims(&self) -> (usize, usize, usize) {
        (self.n0.len(), self.n1_prime.len(), self.n2_prime.len())
    }

    /// Largest `|⟨u, v⟩|` between vectors of different summands.
    pub fn orthogonality_defect(&self) -> f64 {
        let parts = [&self.n0, &self.n1_prime, &self.n2_prime];
        let mut r = 0.0_f64;
        for (p, a) in parts.iter().enumerate() {
            for b in parts.iter().skip(p + 1) {
                for u in a.iter() {
                    for v in b.iter() {
                        r = r.max(u.dotc(v).norm());
                    }
                }
            }
        }
        r
    }
}

fn to_dyn(rows: &[CMatrix3]) -> DMatrix<Complex64> {
    let mut m = DMatrix::zeros(3 * rows.len(), 3);
    for (b, a) in rows.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                m[(3 * b + i, j)] = a[(i, j)];
            }
        }
    }
    m
}

/// Orthonormal basis of the null space of `m` (columns of length 3).
fn null_space(m: &DMatrix<Complex64>, tol: f64) -> Vec<CVector3> {
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sv = &svd.singular_values;
    let mut out = vec![];
    for r in 0..3 {
        let s = if r < sv.len() { sv[r] } else { 0.0 };
        if s <= tol {
            // rows of V^H are conjugated right singular vectors
            out.push(CVector3::new(v_t[(r, 0)].conj(), v_t[(r, 1)].conj(), v_t[(r, 2)].conj()));
        }
    }
    out
}

/// Orthonormal basis of the span of the given vectors.
fn span(vectors: &[CVector3], tol: f64) -> Vec<CVector3> {
    if vectors.is_empty() {
        return vec![];
    }
    let mut m = DMatrix::zeros(3, vectors.len().max(3));
    for (c, v) in vectors.iter().enumerate() {
        for i in 0..3 {
            m[(i, c)] = v[i];
        }
    }
    let svd = m.svd(true, false);
    let u = svd.u.expect("requested U");
    (0..3)
        .filter(|&r| svd.singular_values.get(r).copied().unwrap_or(0.0) > tol)
        .map(|r| CVector3::new(u[(0, r)], u[(1, r)], u[(2, r)]))
        .collect()
}

fn complement(basis: &[CVector3]) -> Vec<CVector3> {
    if basis.is_empty() {
        return (0..3)
            .map(|i| {
                let mut v = CVector3::zeros();
                v[i] = Complex64::new(1.0, 0.0);
                v
            })
            .collect();
    }
    let rows: Vec<CMatrix3> = vec![projector(basis)];
    null_space(&to_dyn(&rows), 1e-8)
}

fn projector(basis: &[CVector3]) -> CMatrix3 {
    basis.iter().map(|v| v * v.adjoint()).fold(CMatrix3::zeros(), |a, b| a + b)
}

/// `N₁ = ∩ ker A_X`, `N₂ = (Σ Im A_X)^⊥`, `N₀ = N₁ ∩ N₂` and the primed complements.
pub fn kernel_decomposition(t: &TorsionTensorN3) -> Result<KernelDecomposition> {
    if !nilpotency(t) {
        return Err(Error::NotApplicable(format!(
            "A_X A_Y does not vanish (max entry {:.3e})",
            nilpotency_residual(t)
        )));
    }
    let mats: Vec<CMatrix3> = (0..3).map(|l| t.a_e(l)).collect();
    let scale = t.max_abs().max(1.0);
    let tol = 1e-9 * scale;
    let n1 = null_space(&to_dyn(&mats), tol);
    let image_vectors: Vec<CVector3> = mats
        .iter()
        .flat_map(|m| (0..3).map(move |c| m.column(c).into_owned()))
        .collect();
    let image = span(&image_vectors, tol);
    let n2 = complement(&image);
    let id = CMatrix3::identity();
    let n0 = null_space(&to_dyn(&[id - projector(&n1), id - projector(&n2)]), 1e-8);
    let p0 = projector(&n0);
    let strip = |basis: &[CVector3]| -> Vec<CVector3> {
        let projected: Vec<CVector3> = basis.iter().map(|v| (id - p0) * v).collect();
        span(&projected, 1e-8)
    };
    Ok(KernelDecomposition { n1_prime: strip(&n1), n2_prime: strip(&n2), n0, image })
}

/// `max_X |A_X y|` over the image basis: zero iff `Im ⊆ ∩ ker`.
pub fn image_in_kernel_residual(t: &TorsionTensorN3, d: &KernelDecomposition) -> f64 {
    let mut r = 0.0_f64;
    for l in 0..3 {
        let a = t.a_e(l);
        for y in &d.image {
            r = r.max((a * y).norm());
        }
    }
    r
}

/// Haar-distributed unitary from the QR factorization of a complex Gaussian matrix.
pub fn random_unitary<R: Rng>(rng: &mut R) -> CMatrix3 {
    let g = CMatrix3::from_fn(|_, _| Complex64::new(gaussian(rng), gaussian(rng)));
    let qr = g.qr();
    let (q, r) = (qr.q(), qr.r());
    let mut out = q;
    for c in 0..3 {
        let d = r[(c, c)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..3 {
            out[(i, c)] *= phase;
        }
    }
    out
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u: f64 = rng.gen_range(f64::EPSILON..1.0);
    let v: f64 = rng.gen();
    (-2.0 * u.ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
}

fn random_complex<R: Rng>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

/// A generic balanced tensor (usually off the trace-condition variety).
pub fn random_balanced<R: Rng>(rng: &mut R) -> TorsionTensorN3 {
    let a = [random_complex(rng), random_complex(rng), random_complex(rng)];
    let b = [random_complex(rng), random_complex(rng), random_complex(rng)];
    TorsionTensorN3::from_balanced(a, b)
}

/// A nonzero point of the trace-condition variety in a random unitary frame.
///
/// Seeds come from the two normal-form families with `b₁ = 0`:
/// `a₃ ≠ 0, b₃ = a₂ = 0, b₂² = a₁a₃`, or only `a₁ ≠ 0`.
pub fn sample_variety<R: Rng>(rng: &mut R) -> TorsionTensorN3 {
    let nonzero = |rng: &mut R| loop {
        let c = random_complex(rng);
        if c.norm() > 0.1 {
            break c;
        }
    };
    let t = if rng.gen_bool(0.5) {
        let a3 = nonzero(rng);
        let b2 = random_complex(rng);
        let a1 = b2 * b2 / a3;
        TorsionTensorN3::from_balanced([a1, ZERO, a3], [ZERO, b2, ZERO])
    } else {
        TorsionTensorN3::from_balanced([nonzero(rng), ZERO, ZERO], [ZERO; 3])
    };
    t.change_frame(&random_unitary(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn balanced_parametrization_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let t = random_balanced(&mut rng);
        assert!(t.is_balanced(1e-15));
        let t2 = TorsionTensorN3::from_balanced(t.a(), t.b());
        assert_eq!(t, t2);
        assert!(TorsionTensorN3::from_components(*t.components()).is_ok());
    }

    #[test]
    fn a_e1_display() {
        let a = [c(1.0), c(2.0), c(3.0)];
        let b = [c(5.0), c(7.0), c(11.0)];
        let t = TorsionTensorN3::from_balanced(a, b);
        let m = t.a_e(0).transpose();
        let want = CMatrix3::new(
            c(0.0), c(0.0), c(0.0), //
            b[1], b[0], a[2], //
            -b[2], -a[1], -b[0],
        );
        assert_eq!(m, want);
    }

    #[test]
    fn single_lambda_a_x() {
        let lam = Complex64::new(0.3, -0.2);
        let t = TorsionTensorN3::single_lambda(lam);
        let m = t.a_e(0);
        for i in 0..3 {
            for j in 0..3 {
                let want = if (i, j) == (2, 1) { lam } else { ZERO };
                assert_eq!(m[(i, j)], want);
            }
        }
        assert_eq!(t.a_x(&CVector3::zeros()), CMatrix3::zeros());
        assert!(nilpotency(&t));
    }

    #[test]
    fn trace_condition_examples() {
        let yes = TorsionTensorN3::from_balanced([c(1.0), c(0.0), c(1.0)], [c(0.0), c(1.0), c(0.0)]);
        assert!(trace_conditions(&yes) && nilpotency(&yes));
        let only_a1 = TorsionTensorN3::from_balanced([c(2.0), c(0.0), c(0.0)], [c(0.0); 3]);
        assert!(trace_conditions(&only_a1) && nilpotency(&only_a1));
        let no = TorsionTensorN3::from_balanced([c(1.0), c(1.0), c(0.0)], [c(1.0), c(0.0), c(0.0)]);
        assert!(!trace_conditions(&no));
        assert!(!nilpotency(&no));
    }

    #[test]
    fn trace_conditions_match_traces() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..100 {
            let t = sample_variety(&mut rng);
            assert!(trace_form_residual(&t) < 1e-12);
            let g = random_balanced(&mut rng);
            assert!(trace_form_residual(&g) > 1e-6);
            assert!(!trace_conditions(&g));
        }
    }

    #[test]
    fn normalize_frame_kills_b1() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for _ in 0..200 {
            let t = random_balanced(&mut rng);
            let (u, t2) = normalize_frame(&t);
            assert!((u * u.adjoint() - CMatrix3::identity()).norm() < 1e-13);
            assert!(t2.b()[0].norm() < 1e-12);
            assert!(t2.is_balanced(1e-12));
            let v = sample_variety(&mut rng);
            let (_, v2) = normalize_frame(&v);
            assert_eq!(trace_condition_residual(&v) < 1e-12, trace_condition_residual(&v2) < 1e-12);
        }
        let fixed = TorsionTensorN3::from_balanced([c(1.0); 3], [c(0.0), c(1.0), c(2.0)]);
        assert_eq!(normalize_frame(&fixed).0, CMatrix3::identity());
    }

    #[test]
    fn kernel_examples() {
        let t = TorsionTensorN3::single_lambda(c(0.7));
        let d = kernel_decomposition(&t).unwrap();
        assert_eq!(d.dims(), (0, 1, 2));
        assert!((d.n1_prime[0][2].norm() - 1.0).abs() < 1e-12);
        for v in &d.n2_prime {
            assert!(v[2].norm() < 1e-12);
        }
        let d = kernel_decomposition(&TorsionTensorN3::zero()).unwrap();
        assert_eq!(d.dims(), (3, 0, 0));
        let t = TorsionTensorN3::from_balanced([c(1.0), c(0.0), c(1.0)], [c(0.0), c(1.0), c(0.0)]);
        let d = kernel_decomposition(&t).unwrap();
        assert_eq!(d.dims(), (0, 1, 2));
        assert!(image_in_kernel_residual(&t, &d) < 1e-12);
        let bad = TorsionTensorN3::from_balanced([c(1.0), c(1.0), c(0.0)], [c(1.0), c(0.0), c(0.0)]);
        assert!(matches!(kernel_decomposition(&bad), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn n1_prime_vectors_are_not_annihilated() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..50 {
            let t = sample_variety(&mut rng);
            let d = kernel_decomposition(&t).unwrap();
            for x in &d.n1_prime {
                let m = t.upper_contract(x);
                assert!(m.iter().any(|v| v.norm() > 1e-8));
            }
        }
    }

    proptest! {
        #[test]
        fn frame_change_is_a_group_action(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = random_balanced(&mut rng);
            let u = random_unitary(&mut rng);
            let v = random_unitary(&mut rng);
            let lhs = t.change_frame(&u).change_frame(&v);
            let rhs = t.change_frame(&(v * u));
            for k in 0..3 { for i in 0..3 { for j in 0..3 {
                prop_assert!((lhs.get(k, i, j) - rhs.get(k, i, j)).norm() < 1e-12);
            }}}
            prop_assert!(t.change_frame(&u).is_balanced(1e-12));
        }

        #[test]
        fn variety_samples_are_nilpotent(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let t = sample_variety(&mut rng);
            prop_assert!(trace_conditions(&t));
            prop_assert!(nilpotency_residual(&t) < 1e-12);
        }
    }
}

//! Adaptive quadrature over base surfaces and the integral identities of the
//! warped threefolds.
//!
//! Base integrals are assembled from charts. Each chart maps a parameter
//! rectangle into a local holomorphic coordinate and supplies a
//! [`LocalSample`]: the bounded chart of `f` with its partials, the local
//! conformal factor of the base metric, the Gaussian curvature, and the
//! weight (parameter Jacobian times partition-of-unity weight).
//!
//! Threefold integrals factor as (base integral) × (fiber volume `v₂`)
//! because every integrand is constant along the fibers.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::meromorphic::{ChartJet, HyperellipticCurve, Lattice2, MeromorphicMap};
use crate::poly::Poly;
use crate::warped::{lambda_from_chart, Base, WarpedThreefold};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub fn gauss_legendre(n: usize) -> GaussLegendre {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        nodes[i] = x;
        weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    GaussLegendre { nodes, weights }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: f64,
    pub x1: f64,
    pub y0: f64,
    pub y1: f64,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Rect { x0, x1, y0, y1 }
    }

    pub fn contains(&self, p: (f64, f64)) -> bool {
        (self.x0..=self.x1).contains(&p.0) && (self.y0..=self.y1).contains(&p.1)
    }

    fn split(&self) -> [Rect; 4] {
        let xm = 0.5 * (self.x0 + self.x1);
        let ym = 0.5 * (self.y0 + self.y1);
        [
            Rect::new(self.x0, xm, self.y0, ym),
            Rect::new(xm, self.x1, self.y0, ym),
            Rect::new(self.x0, xm, ym, self.y1),
            Rect::new(xm, self.x1, ym, self.y1),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadSettings {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum number of active cells per chart.
    pub max_cells: usize,
    /// Initial cells per parameter direction.
    pub initial_grid: usize,
}

impl Default for QuadSettings {
    fn default() -> Self {
        QuadSettings { rel_tol: 1e-10, abs_tol: 1e-13, max_cells: 50_000, initial_grid: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
    pub forced_refinements: usize,
}

impl QuadResult {
    fn zero() -> Self {
        QuadResult { value: 0.0, error_estimate: 0.0, cells: 0, forced_refinements: 0 }
    }

    fn combine(self, other: QuadResult) -> Self {
        QuadResult {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            cells: self.cells + other.cells,
            forced_refinements: self.forced_refinements + other.forced_refinements,
        }
    }

    pub fn scaled(self, k: f64) -> Self {
        QuadResult { value: self.value * k, error_estimate: self.error_estimate * k.abs(), ..self }
    }
}

struct Rules {
    coarse: GaussLegendre,
    fine: GaussLegendre,
}

fn tensor_rule<F: Fn(f64, f64) -> f64>(f: &F, r: &Rect, g: &GaussLegendre) -> f64 {
    let (cx, hx) = (0.5 * (r.x0 + r.x1), 0.5 * (r.x1 - r.x0));
    let (cy, hy) = (0.5 * (r.y0 + r.y1), 0.5 * (r.y1 - r.y0));
    let mut s = 0.0;
    for (xi, wi) in g.nodes.iter().zip(&g.weights) {
        let mut row = 0.0;
        for (yj, wj) in g.nodes.iter().zip(&g.weights) {
            row += wj * f(cx + hx * xi, cy + hy * yj);
        }
        s += wi * row;
    }
    s * hx * hy
}

struct Cell {
    rect: Rect,
    fine: f64,
    err: f64,
}

/// Pairwise summation for a reproducible, order-fixed total.
fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

/// Adaptive tensor Gauss–Legendre on a rectangle.
///
/// Each cell is integrated with the 8- and 12-point rules; their difference
/// is the cell's error estimate. The worst cell is split dyadically until the
/// summed estimate meets the tolerance. Cells containing a listed pole get one
/// extra split up front.
pub fn integrate_rect<F: Fn(f64, f64) -> f64>(
    f: &F,
    rect: Rect,
    poles: &[(f64, f64)],
    settings: &QuadSettings,
) -> Result<QuadResult> {
    let rules = Rules { coarse: gauss_legendre(8), fine: gauss_legendre(12) };
    let eval = |r: &Rect| -> Result<Cell> {
        let fine = tensor_rule(f, r, &rules.fine);
        let coarse = tensor_rule(f, r, &rules.coarse);
        if !(fine.is_finite() && coarse.is_finite()) {
            return Err(Error::InvalidInput(format!("non-finite integrand on cell {r:?}")));
        }
        Ok(Cell { rect: *r, fine, err: (fine - coarse).abs() })
    };
    let n0 = settings.initial_grid.max(1);
    let mut initial = Vec::new();
    for j in 0..n0 {
        for i in 0..n0 {
            let (a, b) = (i as f64 / n0 as f64, (i + 1) as f64 / n0 as f64);
            let (c, d) = (j as f64 / n0 as f64, (j + 1) as f64 / n0 as f64);
            initial.push(Rect::new(
                rect.x0 + a * (rect.x1 - rect.x0),
                rect.x0 + b * (rect.x1 - rect.x0),
                rect.y0 + c * (rect.y1 - rect.y0),
                rect.y0 + d * (rect.y1 - rect.y0),
            ));
        }
    }
    let mut forced = 0;
    let mut cells: Vec<Option<Cell>> = Vec::new();
    for r in initial {
        if poles.iter().any(|p| r.contains(*p)) {
            forced += 1;
            for c in r.split() {
                cells.push(Some(eval(&c)?));
            }
        } else {
            cells.push(Some(eval(&r)?));
        }
    }
    let mut heap: BinaryHeap<(u64, Reverse<usize>)> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.as_ref().unwrap().err.to_bits(), Reverse(i)))
        .collect();
    let mut active = cells.len();
    let exact_totals = |cells: &[Option<Cell>]| -> (f64, f64) {
        let vals: Vec<f64> = cells.iter().flatten().map(|c| c.fine).collect();
        let errs: Vec<f64> = cells.iter().flatten().map(|c| c.err).collect();
        (pairwise_sum(&vals), pairwise_sum(&errs))
    };
    let (mut total, mut err) = exact_totals(&cells);
    loop {
        if err <= settings.abs_tol.max(settings.rel_tol * total.abs()) {
            let (t, e) = exact_totals(&cells);
            total = t;
            err = e;
            if err <= settings.abs_tol.max(settings.rel_tol * total.abs()) {
                break;
            }
        }
        if active + 3 > settings.max_cells {
            return Err(Error::ConvergenceFailure {
                achieved: err,
                target: settings.abs_tol.max(settings.rel_tol * total.abs()),
                cells: active,
            });
        }
        let Some((_, Reverse(idx))) = heap.pop() else { break };
        let cell = cells[idx].take().expect("heap refers to an active cell");
        total -= cell.fine;
        err -= cell.err;
        for r in cell.rect.split() {
            let c = eval(&r)?;
            total += c.fine;
            err += c.err;
            heap.push((c.err.to_bits(), Reverse(cells.len())));
            cells.push(Some(c));
        }
        active += 3;
    }
    Ok(QuadResult { value: total, error_estimate: err, cells: active, forced_refinements: forced })
}

/// Local data of the base surface at a chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalSample {
    /// The bounded chart of `f` and its partials in the local coordinate.
    pub jet: ChartJet,
    /// Conformal factor of the base metric in the local coordinate.
    pub rho: f64,
    /// Gaussian curvature.
    pub curvature: f64,
    /// Parameter Jacobian times partition weight.
    pub weight: f64,
}

/// Integrands per unit local coordinate area.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Density {
    /// Pullback of the Fubini–Study form with Euclidean target normalization
    /// `|dw|²/(1+|w|²)²` (total π per sheet of P¹).
    FsForm,
    /// `|λ|² dA`
    LambdaSqArea,
    /// `K dA`
    CurvatureArea,
}

impl Density {
    pub fn eval(self, s: &LocalSample) -> f64 {
        let q = &s.jet;
        match self {
            Density::FsForm => -(q.qx * q.qy.conj()).im / (1.0 + q.q.norm_sqr()).powi(2),
            Density::LambdaSqArea => lambda_from_chart(q, s.rho).norm_sqr() * s.rho,
            Density::CurvatureArea => s.curvature * s.rho,
        }
    }
}

type Sampler = Box<dyn Fn(f64, f64) -> Option<LocalSample> + Send + Sync>;

pub struct Chart {
    pub name: String,
    pub rect: Rect,
    /// Parameter points of poles of `f`, for forced refinement.
    pub poles: Vec<(f64, f64)>,
    sampler: Sampler,
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Chart").field("name", &self.name).field("rect", &self.rect).finish()
    }
}

impl Chart {
    pub fn sample(&self, x: f64, y: f64) -> Option<LocalSample> {
        (self.sampler)(x, y)
    }
}

/// Charts covering a base surface, with a partition of unity folded into the weights.
#[derive(Debug)]
pub struct IntegrationDomain {
    pub charts: Vec<Chart>,
    pub settings: QuadSettings,
}

/// `χ(u) = 1` for `u <= 1/2`, `0` for `u >= 1`, smooth in between.
pub fn bump(u: f64) -> f64 {
    let h = |x: f64| if x > 0.0 { (-1.0 / x).exp() } else { 0.0 };
    let a = h(1.0 - u);
    let b = h(u - 0.5);
    if a + b == 0.0 {
        0.0
    } else {
        a / (a + b)
    }
}

/// Derivatives of `q` composed with a holomorphic change of coordinate of derivative `h1`.
pub fn compose_holomorphic(cj: ChartJet, h1: Complex64) -> ChartJet {
    let (a, b) = (cj.dz(), cj.dzbar());
    ChartJet { qx: a * h1 + b * h1.conj(), qy: I * (a * h1 - b * h1.conj()), ..cj }
}

fn polar(r: f64, theta: f64) -> Complex64 {
    Complex64::from_polar(r, theta)
}

fn polar_param(p: Complex64) -> (f64, f64) {
    let th = p.arg();
    (p.norm(), if th < 0.0 { th + 2.0 * PI } else { th })
}

impl IntegrationDomain {
    /// The parallelogram `origin + s·e1 + t·e2`, `(s, t) ∈ [0,1]²`, for the flat metric.
    pub fn parallelogram(map: &MeromorphicMap, origin: Complex64, e1: Complex64, e2: Complex64) -> Result<Self> {
        let area = (e1.conj() * e2).im.abs();
        if area <= 0.0 {
            return Err(Error::InvalidInput("degenerate fundamental parallelogram".into()));
        }
        let mut poles = Vec::new();
        if let Ok(ps) = map.finite_poles() {
            let lattice = Lattice2::new(e1, e2)?;
            for p in ps {
                let (s, t) = lattice.coords(p - origin);
                let (s, t) = (s - s.floor(), t - t.floor());
                for ds in [0.0, 1.0] {
                    for dt in [0.0, 1.0] {
                        let q = (s + ds, t + dt);
                        if q.0 <= 1.0 && q.1 <= 1.0 {
                            poles.push(q);
                        }
                    }
                }
            }
        }
        let m = map.clone();
        let sampler: Sampler = Box::new(move |s, t| {
            let z = origin + e1 * s + e2 * t;
            Some(LocalSample { jet: m.jet(z).chart(), rho: 1.0, curvature: 0.0, weight: area })
        });
        Ok(IntegrationDomain {
            charts: vec![Chart { name: "parallelogram".into(), rect: Rect::new(0.0, 1.0, 0.0, 1.0), poles, sampler }],
            settings: QuadSettings::default(),
        })
    }

    /// Fundamental domain of `C / L` spanned by the lattice basis.
    pub fn torus(lattice: &Lattice2, map: &MeromorphicMap) -> Result<Self> {
        IntegrationDomain::parallelogram(map, Complex64::new(0.0, 0.0), lattice.w1(), lattice.w2())
    }

    /// P¹ with the round metric: the unit disks in `z` and in `s = 1/z`.
    pub fn sphere(map: &MeromorphicMap) -> Result<Self> {
        let at_inf = map.rational_at_infinity_chart().ok_or_else(|| {
            Error::InvalidInput(format!("{} map has no chart at infinity on P¹", map.kind_name()))
        })?;
        let rect = Rect::new(0.0, 1.0, 0.0, 2.0 * PI);
        let mut charts = Vec::new();
        for (name, m) in [("disk z", map.clone()), ("disk 1/z", at_inf)] {
            let poles = m
                .finite_poles()
                .unwrap_or_default()
                .into_iter()
                .filter(|p| p.norm() <= 1.0)
                .map(polar_param)
                .collect();
            let sampler: Sampler = Box::new(move |r, th| {
                let z = polar(r, th);
                Some(LocalSample {
                    jet: m.jet(z).chart(),
                    rho: 4.0 / (1.0 + r * r).powi(2),
                    curvature: 1.0,
                    weight: r,
                })
            });
            charts.push(Chart { name: name.into(), rect, poles, sampler });
        }
        Ok(IntegrationDomain { charts, settings: QuadSettings::default() })
    }

    /// A hyperelliptic curve with the metric attached to `metric_phi` and `f = phi(z)`.
    ///
    /// Two sheets of the `z` plane (each a disk `|z| <= R` plus a disk in
    /// `s = 1/z`) are blended with a disk in `t` around every branch value,
    /// `z = z_i + t²`, where the metric is smooth.
    pub fn hyperelliptic(curve: &HyperellipticCurve, metric_phi: &Poly, phi: &Poly) -> Result<Self> {
        let branch = curve.branch_values().to_vec();
        let radii: Vec<f64> = branch
            .iter()
            .map(|b| {
                let sep = branch
                    .iter()
                    .filter(|c| *c != b)
                    .map(|c| (c - b).norm())
                    .fold(f64::MAX, f64::min);
                (0.4 * sep).min(0.3)
            })
            .collect();
        let chi = {
            let (branch, radii) = (branch.clone(), radii.clone());
            move |z: Complex64| -> f64 {
                branch.iter().zip(&radii).map(|(b, r)| bump((z - b).norm() / r)).sum()
            }
        };
        let base = Base::Hyperelliptic { curve: curve.clone(), metric_phi: metric_phi.clone() };
        let map_z = MeromorphicMap::HyperellipticPhi { curve: curve.clone(), phi: phi.clone() };
        let n = phi.degree();
        let mut den = vec![Complex64::new(0.0, 0.0); n + 1];
        den[n] = Complex64::new(1.0, 0.0);
        let map_s = MeromorphicMap::Rational { num: phi.reversed(n), den: Poly::new(den) };
        let r_in = 1.0;
        let mut charts = Vec::new();
        for sheet in ["+", "-"] {
            {
                let (base, m, chi) = (base.clone(), map_z.clone(), chi.clone());
                let sampler: Sampler = Box::new(move |r, th| {
                    let z = polar(r, th);
                    let w = r * (1.0 - chi(z));
                    (w > 0.0).then(|| LocalSample {
                        jet: m.jet(z).chart(),
                        rho: base.rho(z),
                        curvature: base.curvature(z),
                        weight: w,
                    })
                });
                charts.push(Chart {
                    name: format!("sheet {sheet} disk z"),
                    rect: Rect::new(0.0, r_in, 0.0, 2.0 * PI),
                    poles: vec![],
                    sampler,
                });
            }
            {
                let (base, m, chi) = (base.clone(), map_s.clone(), chi.clone());
                let sampler: Sampler = Box::new(move |r, th| {
                    let s = polar(r, th);
                    let z = s.inv();
                    let w = r * (1.0 - chi(z));
                    (w > 0.0).then(|| LocalSample {
                        jet: m.jet(s).chart(),
                        rho: base.rho(z) / (r * r * r * r),
                        curvature: base.curvature(z),
                        weight: w,
                    })
                });
                charts.push(Chart {
                    name: format!("sheet {sheet} disk 1/z"),
                    rect: Rect::new(0.0, 1.0 / r_in, 0.0, 2.0 * PI),
                    poles: vec![],
                    sampler,
                });
            }
        }
        for (i, (&b, &rad)) in branch.iter().zip(&radii).enumerate() {
            let (base, m, c, mp) = (base.clone(), map_z.clone(), curve.clone(), metric_phi.clone());
            let sampler: Sampler = Box::new(move |r, th| {
                let t = polar(r, th);
                let z = b + t * t;
                let w = r * bump((z - b).norm() / rad);
                (w > 0.0).then(|| LocalSample {
                    jet: compose_holomorphic(m.jet(z).chart(), t * 2.0),
                    // ρ_z |dz/dt|² with |w|² = |t|² |cofactor|
                    rho: (mp.eval(z).norm_sqr() + 1.0).powi(2) / c.cofactor(i, z).norm(),
                    curvature: base.curvature(z),
                    weight: w,
                })
            });
            charts.push(Chart {
                name: format!("branch {i} disk t"),
                rect: Rect::new(0.0, rad.sqrt(), 0.0, 2.0 * PI),
                poles: vec![],
                sampler,
            });
        }
        Ok(IntegrationDomain { charts, settings: QuadSettings::default() })
    }

    /// The base of a warped threefold with its map.
    pub fn for_threefold(w: &WarpedThreefold) -> Result<Self> {
        match (&w.base, &w.map) {
            (Base::FlatTorus { lattice }, m) => IntegrationDomain::torus(lattice, m),
            (Base::RoundSphere, m) => IntegrationDomain::sphere(m),
            (Base::Hyperelliptic { curve, metric_phi }, MeromorphicMap::HyperellipticPhi { phi, .. }) => {
                IntegrationDomain::hyperelliptic(curve, metric_phi, phi)
            }
            (Base::Hyperelliptic { .. }, m) => Err(Error::InvalidInput(format!(
                "a hyperelliptic base needs a hyperelliptic-phi map, got {}",
                m.kind_name()
            ))),
        }
    }

    pub fn with_settings(mut self, settings: QuadSettings) -> Self {
        self.settings = settings;
        self
    }

    /// `∫ density` over the surface in Euclidean local area.
    pub fn integrate(&self, density: Density) -> Result<QuadResult> {
        let mut total = QuadResult::zero();
        for chart in &self.charts {
            let f = |x: f64, y: f64| match chart.sample(x, y) {
                Some(s) => density.eval(&s) * s.weight,
                None => 0.0,
            };
            total = total.combine(integrate_rect(&f, chart.rect, &chart.poles, &self.settings)?);
        }
        Ok(total)
    }
}

/// Normalization of the base area form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AreaConvention {
    /// `dA = ρ dx∧dy` (for the Fubini–Study form: `|dw|²/(1+|w|²)²`).
    Euclidean,
    /// `i ψ∧ψ̄` for a unit (1,0)-form `ψ` with `|dz|² = 2`: twice the Euclidean area.
    IForm,
}

impl AreaConvention {
    pub fn factor(self) -> f64 {
        match self {
            AreaConvention::Euclidean => 1.0,
            AreaConvention::IForm => 2.0,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            AreaConvention::Euclidean => "area:euclidean",
            AreaConvention::IForm => "area:i-psi-psibar",
        }
    }
}

/// The conventions every reported integral is computed under, with the
/// constants they reproduce.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionLedger {
    pub fs_area: AreaConvention,
    pub torsion_area: AreaConvention,
    pub kodaira_area: AreaConvention,
    pub torsion_norm: String,
    pub volume: String,
    /// `∫ f*ω_FS = fs_constant · deg f`
    pub fs_constant: f64,
    /// `∫|T^c|² dv = torsion_constant · v₂ · deg f`
    pub torsion_constant: f64,
    /// `−(m/3π)∫|λ|²ω³ = kodaira_constant · m · deg f · v₂`
    pub kodaira_constant: f64,
    /// `−m ∫ (i/2π) tr Θ ∧ ω² = kodaira_trace_constant · m · (1 + d − g) · v₂`
    pub kodaira_trace_constant: f64,
}

impl Default for ConventionLedger {
    fn default() -> Self {
        ConventionLedger {
            fs_area: AreaConvention::IForm,
            torsion_area: AreaConvention::Euclidean,
            kodaira_area: AreaConvention::Euclidean,
            torsion_norm: "|T^c|^2 = 8 sum |T^k_ij|^2 = 16 |lambda|^2".into(),
            volume: "dv = dA x dvol(T^4), omega^3 = 6 dv".into(),
            fs_constant: 2.0 * PI,
            torsion_constant: 32.0 * PI,
            kodaira_constant: -4.0,
            kodaira_trace_constant: -4.0,
        }
    }
}

impl ConventionLedger {
    /// Convention tags for a named identity.
    pub fn tags(&self, identity: &str) -> Vec<String> {
        match identity {
            "fs" => vec![self.fs_area.tag().into()],
            "torsion" => vec![self.torsion_area.tag().into(), self.torsion_norm.clone(), self.volume.clone()],
            "kodaira" => vec![self.kodaira_area.tag().into(), self.volume.clone()],
            "c1" => vec!["c1 = (i/2pi) tr Theta".into(), "i phi3 phi3bar = dA".into()],
            _ => vec![],
        }
    }
}

/// An integral reported under both area conventions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionalValue {
    pub euclidean: f64,
    pub i_form: f64,
    pub convention: AreaConvention,
    pub value: f64,
    pub error_estimate: f64,
    pub cells: usize,
}

impl ConventionalValue {
    fn new(euclidean: QuadResult, convention: AreaConvention) -> Self {
        ConventionalValue {
            euclidean: euclidean.value,
            i_form: 2.0 * euclidean.value,
            convention,
            value: euclidean.value * convention.factor(),
            error_estimate: euclidean.error_estimate * convention.factor(),
            cells: euclidean.cells,
        }
    }
}

/// `∫ f*ω_FS` over the base.
pub fn fs_pullback_integral(domain: &IntegrationDomain, ledger: &ConventionLedger) -> Result<ConventionalValue> {
    Ok(ConventionalValue::new(domain.integrate(Density::FsForm)?, ledger.fs_area))
}

/// `∫_M |T^c|² dv = 16 v₂ ∫ |λ|² dA`
pub fn total_chern_torsion(w: &WarpedThreefold, ledger: &ConventionLedger) -> Result<ConventionalValue> {
    let d = IntegrationDomain::for_threefold(w)?;
    let base = d.integrate(Density::LambdaSqArea)?;
    Ok(ConventionalValue::new(base.scaled(16.0 * w.fiber.volume()), ledger.torsion_area))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairingValue {
    pub value: f64,
    /// `(1/2π) ∫ K dA`
    pub curvature_part: f64,
    /// `(1/π) ∫ |λ|² dA`
    pub torsion_part: f64,
    pub error_estimate: f64,
}

/// `⟨c₁, [M₁ × {y₂}]⟩ = (1/2π) ∫ K dA + (1/π) ∫ |λ|² dA`
pub fn chern_number_pairing(w: &WarpedThreefold) -> Result<PairingValue> {
    let d = IntegrationDomain::for_threefold(w)?;
    let k = d.integrate(Density::CurvatureArea)?;
    let l = d.integrate(Density::LambdaSqArea)?;
    let curvature_part = k.value / (2.0 * PI);
    let torsion_part = l.value / PI;
    Ok(PairingValue {
        value: curvature_part + torsion_part,
        curvature_part,
        torsion_part,
        error_estimate: k.error_estimate / (2.0 * PI) + l.error_estimate / PI,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KodairaValue {
    /// `−(m/3π) ∫ |λ|² ω³`
    pub display: ConventionalValue,
    /// `−m ∫ (i/2π) tr Θ ∧ ω²`
    pub full_trace: f64,
}

/// `−(m/3π) ∫_M |λ|² ω³ = −(2m/π) v₂ ∫ |λ|² dA`, together with the
/// full-trace form `−2m v₂ ⟨c₁, [M₁]⟩`.
pub fn canonical_degree_integral(w: &WarpedThreefold, m: u32, ledger: &ConventionLedger) -> Result<KodairaValue> {
    if m == 0 {
        return Err(Error::InvalidInput("m must be a positive integer".into()));
    }
    let v2 = w.fiber.volume();
    let d = IntegrationDomain::for_threefold(w)?;
    let l = d.integrate(Density::LambdaSqArea)?;
    let mf = m as f64;
    let display = ConventionalValue::new(l.scaled(-2.0 * mf * v2 / PI), ledger.kodaira_area);
    let pairing = chern_number_pairing(w)?;
    Ok(KodairaValue { display, full_trace: -2.0 * mf * v2 * pairing.value * ledger.kodaira_area.factor() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::warped::Lattice4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn gauss_legendre_exactness() {
        for n in [1, 2, 5, 8, 12] {
            let g = gauss_legendre(n);
            assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
            for k in 0..2 * n {
                let exact = if k % 2 == 1 { 0.0 } else { 2.0 / (k as f64 + 1.0) };
                let got: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * x.powi(k as i32)).sum();
                assert!((got - exact).abs() < 1e-14, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let f = |x: f64, y: f64| 1.0 / (1e-3 + (x - 0.3).powi(2) + (y - 0.7).powi(2));
        let r = integrate_rect(&f, Rect::new(0.0, 1.0, 0.0, 1.0), &[(0.3, 0.7)], &QuadSettings::default()).unwrap();
        // reference: same integral on a finer tolerance
        let s = QuadSettings { rel_tol: 1e-13, ..QuadSettings::default() };
        let r2 = integrate_rect(&f, Rect::new(0.0, 1.0, 0.0, 1.0), &[], &s).unwrap();
        assert!((r.value - r2.value).abs() < 1e-8 * r2.value);
        assert_eq!(r.forced_refinements, 1);
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let f = |x: f64, _y: f64| if x < 0.3 { 0.0 } else { 1.0 };
        let s = QuadSettings { max_cells: 40, ..QuadSettings::default() };
        let r = integrate_rect(&f, Rect::new(0.0, 1.0, 0.0, 1.0), &[], &s);
        assert!(matches!(r, Err(Error::ConvergenceFailure { .. })));
    }

    #[test]
    fn bump_is_a_partition() {
        assert_eq!(bump(0.2), 1.0);
        assert_eq!(bump(1.3), 0.0);
        let v = bump(0.75);
        assert!((v - 0.5).abs() < 1e-12);
    }

    #[test]
    fn fs_identity_on_sphere() {
        let d = IntegrationDomain::sphere(&MeromorphicMap::identity()).unwrap();
        let v = fs_pullback_integral(&d, &ConventionLedger::default()).unwrap();
        assert!((v.value - 2.0 * PI).abs() < 1e-9);
        assert!((v.euclidean - PI).abs() < 1e-9);
    }

    #[test]
    fn fs_rational_degree() {
        // (z² + 1)/(z - 2) has degree 2
        let m = MeromorphicMap::rational(
            Poly::new(vec![c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]),
            Poly::new(vec![c(-2.0, 0.0), c(1.0, 0.0)]),
        )
        .unwrap();
        let d = IntegrationDomain::sphere(&m).unwrap();
        let v = fs_pullback_integral(&d, &ConventionLedger::default()).unwrap();
        assert!((v.value / (2.0 * PI) - 2.0).abs() < 1e-6, "{}", v.value);
        // orientation-reversing maps integrate to minus the degree
        let dc = IntegrationDomain::sphere(&m.conjugate()).unwrap();
        let vc = fs_pullback_integral(&dc, &ConventionLedger::default()).unwrap();
        assert!((vc.value + v.value).abs() < 1e-6);
    }

    #[test]
    fn fs_wp_and_constant() {
        let l = Lattice2::square();
        let d = IntegrationDomain::torus(&l, &MeromorphicMap::WeierstrassP { lattice: l }).unwrap();
        let v = fs_pullback_integral(&d, &ConventionLedger::default()).unwrap();
        assert!((v.value - 4.0 * PI).abs() < 4.0 * PI * 1e-6, "{}", v.value);
        let dk = IntegrationDomain::torus(&l, &MeromorphicMap::constant(c(0.3, 0.0))).unwrap();
        assert_eq!(fs_pullback_integral(&dk, &ConventionLedger::default()).unwrap().value, 0.0);
    }

    #[test]
    fn reparametrized_domain_agrees() {
        let l = Lattice2::hexagonal();
        let m = MeromorphicMap::WeierstrassPPrime { lattice: l };
        let a = IntegrationDomain::torus(&l, &m).unwrap().integrate(Density::LambdaSqArea).unwrap();
        let b = IntegrationDomain::parallelogram(&m, c(0.21, -0.13), l.w1(), l.w1() + l.w2())
            .unwrap()
            .integrate(Density::LambdaSqArea)
            .unwrap();
        assert!((a.value - b.value).abs() < 1e-8 * a.value);
        assert!((a.value - 6.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn torsion_constant_and_scaling() {
        let ledger = ConventionLedger::default();
        let l = Lattice2::square();
        let w = WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l });
        let t = total_chern_torsion(&w, &ledger).unwrap();
        assert!((t.value - 64.0 * PI).abs() < 64.0 * PI * 1e-6);
        assert!((t.i_form - 128.0 * PI).abs() < 128.0 * PI * 1e-6);
        let mut w2 = w.clone();
        w2.fiber = Lattice4::diagonal([2.0, 1.0, 1.0, 1.0]);
        let t2 = total_chern_torsion(&w2, &ledger).unwrap();
        assert!((t2.value / t.value - 2.0).abs() < 1e-9);
    }

    #[test]
    fn pairings_flat_and_sphere() {
        let l = Lattice2::square();
        let w = WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l });
        assert!((chern_number_pairing(&w).unwrap().value - 4.0).abs() < 1e-6);
        let p = chern_number_pairing(&WarpedThreefold::twistor()).unwrap();
        assert!((p.value - 4.0).abs() < 1e-6);
        assert!((p.curvature_part - 2.0).abs() < 1e-6);
    }

    #[test]
    fn hyperelliptic_pairing_vanishes() {
        let curve = HyperellipticCurve::regular(3, 2.0).unwrap();
        let phi = Poly::identity();
        let d = IntegrationDomain::hyperelliptic(&curve, &phi, &phi).unwrap();
        let k = d.integrate(Density::CurvatureArea).unwrap();
        let l = d.integrate(Density::LambdaSqArea).unwrap();
        assert!((k.value + 8.0 * PI).abs() < 1e-6, "{}", k.value);
        assert!((l.value - 4.0 * PI).abs() < 1e-6, "{}", l.value);
    }

    #[test]
    fn kodaira_signs_and_linearity() {
        let ledger = ConventionLedger::default();
        let l = Lattice2::square();
        let w = WarpedThreefold::torus(l, MeromorphicMap::WeierstrassP { lattice: l });
        let k1 = canonical_degree_integral(&w, 1, &ledger).unwrap();
        let k2 = canonical_degree_integral(&w, 2, &ledger).unwrap();
        assert!(k1.display.value < 0.0);
        assert!((k1.display.value + 8.0).abs() < 1e-6);
        assert_eq!(k2.display.value, 2.0 * k1.display.value);
        assert!((k1.full_trace + 8.0).abs() < 1e-5);
        let tw = canonical_degree_integral(&WarpedThreefold::twistor(), 1, &ledger).unwrap();
        assert!((tw.display.value + 4.0).abs() < 1e-6);
        assert!(canonical_degree_integral(&w, 0, &ledger).is_err());
    }

    #[test]
    fn compose_matches_direct_derivative() {
        let m = MeromorphicMap::identity();
        let t = c(0.3, 0.2);
        let z = c(1.0, 0.0) + t * t;
        let cj = compose_holomorphic(m.jet(z).chart(), t * 2.0);
        // q(t) = 1/(1 + t²) in the inverted chart
        let dq = -(t * 2.0) / ((c(1.0, 0.0) + t * t) * (c(1.0, 0.0) + t * t));
        assert!((cj.qx - dq).norm() < 1e-14);
        assert!((cj.qy - I * dq).norm() < 1e-14);
    }
}

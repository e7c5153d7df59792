//! Scenario configuration, check orchestration and JSON/CSV output.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::Vector6;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::calabi::{self, CalabiData};
use crate::error::{Error, Result};
use crate::framecalc;
use crate::meromorphic::{HyperellipticCurve, Lattice2, MeromorphicMap, Sheet};
use crate::poly::Poly;
use crate::quadrature::{
    canonical_degree_integral, chern_number_pairing, fs_pullback_integral, total_chern_torsion, ConventionLedger,
    Density, IntegrationDomain, LocalSample,
};
use crate::torsion_algebra as ta;
use crate::warped::{Base, Lattice4, WarpedThreefold, DEFAULT_H};
use crate::zspace::{j_matrix, sphere_to_stereo, stereo_to_sphere, OcsPoint};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    Bsv,
    Twistor,
    Calabi,
    TorsionAlgebra,
    FrameIdentities,
}

/// A map on the base, resolved against the configured lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MapSpec {
    Identity,
    Constant { value: [f64; 2] },
    /// Coefficients in increasing degree, as `[re, im]` pairs.
    Rational { num: Vec<[f64; 2]>, den: Vec<[f64; 2]> },
    WeierstrassP,
    WeierstrassPPrime,
    Conjugate { inner: Box<MapSpec> },
}

fn poly_from(c: &[[f64; 2]]) -> Poly {
    Poly::new(c.iter().map(|&[re, im]| Complex64::new(re, im)).collect())
}

impl MapSpec {
    fn needs_torus(&self) -> bool {
        match self {
            MapSpec::WeierstrassP | MapSpec::WeierstrassPPrime => true,
            MapSpec::Conjugate { inner } => inner.needs_torus(),
            _ => false,
        }
    }

    fn needs_sphere(&self) -> bool {
        match self {
            MapSpec::Identity | MapSpec::Rational { .. } => true,
            MapSpec::Conjugate { inner } => inner.needs_sphere(),
            _ => false,
        }
    }

    pub fn build(&self, lattice: &Lattice2) -> Result<MeromorphicMap> {
        Ok(match self {
            MapSpec::Identity => MeromorphicMap::identity(),
            MapSpec::Constant { value } => MeromorphicMap::constant(Complex64::new(value[0], value[1])),
            MapSpec::Rational { num, den } => MeromorphicMap::rational(poly_from(num), poly_from(den))?,
            MapSpec::WeierstrassP => MeromorphicMap::WeierstrassP { lattice: *lattice },
            MapSpec::WeierstrassPPrime => MeromorphicMap::WeierstrassPPrime { lattice: *lattice },
            MapSpec::Conjugate { inner } => inner.build(lattice)?.conjugate(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeSpec {
    pub w1: [f64; 2],
    pub w2: [f64; 2],
}

impl Default for LatticeSpec {
    fn default() -> Self {
        LatticeSpec { w1: [1.0, 0.0], w2: [0.0, 1.0] }
    }
}

impl LatticeSpec {
    pub fn build(&self) -> Result<Lattice2> {
        Lattice2::new(Complex64::new(self.w1[0], self.w1[1]), Complex64::new(self.w2[0], self.w2[1]))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CalabiSpec {
    pub genus: usize,
    pub radius: f64,
    /// Coefficients of `φ` in increasing degree.
    pub phi: Vec<[f64; 2]>,
}

impl Default for CalabiSpec {
    fn default() -> Self {
        CalabiSpec { genus: 3, radius: 2.0, phi: vec![[0.0, 0.0], [1.0, 0.0]] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub algebra: f64,
    pub wp_ode: f64,
    pub wp_g3: f64,
    pub nijenhuis_integrable: f64,
    pub nijenhuis_nonintegrable: f64,
    pub cr_integrable: f64,
    pub cr_nonintegrable: f64,
    pub integral_rel: f64,
    pub pairing_abs: f64,
    pub torsion_component: f64,
    pub balanced: f64,
    pub fiber_constancy: f64,
    pub variety: f64,
    pub calabi_j: f64,
    pub isotropy: f64,
    pub mean_curvature: f64,
    pub curvature_fd: f64,
    pub metric: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            algebra: 1e-12,
            wp_ode: 1e-8,
            wp_g3: 1e-10,
            nijenhuis_integrable: 1e-5,
            nijenhuis_nonintegrable: 1e-2,
            cr_integrable: 1e-6,
            cr_nonintegrable: 1e-2,
            integral_rel: 1e-3,
            pairing_abs: 0.05,
            torsion_component: 1e-6,
            balanced: 1e-8,
            fiber_constancy: 1e-5,
            variety: 1e-12,
            calabi_j: 1e-12,
            isotropy: 1e-10,
            mean_curvature: 1e-4,
            curvature_fd: 1e-4,
            metric: 1e-10,
        }
    }
}

impl Tolerances {
    fn entries(&self) -> [(&'static str, f64); 18] {
        [
            ("algebra", self.algebra),
            ("wp_ode", self.wp_ode),
            ("wp_g3", self.wp_g3),
            ("nijenhuis_integrable", self.nijenhuis_integrable),
            ("nijenhuis_nonintegrable", self.nijenhuis_nonintegrable),
            ("cr_integrable", self.cr_integrable),
            ("cr_nonintegrable", self.cr_nonintegrable),
            ("integral_rel", self.integral_rel),
            ("pairing_abs", self.pairing_abs),
            ("torsion_component", self.torsion_component),
            ("balanced", self.balanced),
            ("fiber_constancy", self.fiber_constancy),
            ("variety", self.variety),
            ("calabi_j", self.calabi_j),
            ("isotropy", self.isotropy),
            ("mean_curvature", self.mean_curvature),
            ("curvature_fd", self.curvature_fd),
            ("metric", self.metric),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Samples {
    pub algebra: usize,
    pub wp: usize,
    pub nijenhuis: usize,
    pub torsion_points: usize,
    pub variety: usize,
    pub calabi_points: usize,
    pub curvature_points: usize,
    pub patch_points: usize,
}

impl Default for Samples {
    fn default() -> Self {
        Samples {
            algebra: 1000,
            wp: 100,
            nijenhuis: 100,
            torsion_points: 50,
            variety: 10_000,
            calabi_points: 1000,
            curvature_points: 50,
            patch_points: 5,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSpec {
    pub report: Option<PathBuf>,
    pub grid: Option<PathBuf>,
}

impl OutputSpec {
    fn is_empty(&self) -> bool {
        self.report.is_none() && self.grid.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub lattice: LatticeSpec,
    #[serde(default)]
    pub map: Option<MapSpec>,
    #[serde(default)]
    pub fiber: Option<[[f64; 4]; 4]>,
    #[serde(default)]
    pub calabi: CalabiSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub samples: Samples,
    /// Record per-check wall time. Off by default so reports stay byte-identical.
    #[serde(default)]
    pub timings: bool,
    #[serde(default, skip_serializing_if = "OutputSpec::is_empty")]
    pub output: OutputSpec,
}

fn config_err(field: &str, message: impl Into<String>) -> Error {
    Error::Config { field: field.into(), message: message.into() }
}

impl ScenarioConfig {
    pub fn new(scenario: ScenarioKind) -> Self {
        ScenarioConfig {
            scenario,
            seed: 0,
            lattice: LatticeSpec::default(),
            map: None,
            fiber: None,
            calabi: CalabiSpec::default(),
            tolerances: Tolerances::default(),
            samples: Samples::default(),
            timings: false,
            output: OutputSpec::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            let field = msg
                .split('`')
                .nth(1)
                .map(str::to_string)
                .unwrap_or_else(|| "<document>".into());
            config_err(&field, msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| config_err("<file>", format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in self.tolerances.entries() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(config_err(&format!("tolerances.{name}"), "must be positive"));
            }
        }
        self.lattice.build().map_err(|e| config_err("lattice", e.to_string()))?;
        if let Some(f) = self.fiber {
            Lattice4::new(f).map_err(|e| config_err("fiber", e.to_string()))?;
        }
        let map = self.map_spec();
        match self.scenario {
            ScenarioKind::Bsv if map.needs_sphere() => {
                return Err(config_err("map", "bsv needs a map on the torus"));
            }
            ScenarioKind::Twistor if map.needs_torus() => {
                return Err(config_err("map", "twistor needs a map on P^1"));
            }
            _ => {}
        }
        map.build(&self.lattice.build()?).map_err(|e| config_err("map", e.to_string()))?;
        if self.scenario == ScenarioKind::Calabi {
            self.calabi_data()?;
        }
        Ok(())
    }

    pub fn map_spec(&self) -> MapSpec {
        self.map.clone().unwrap_or(match self.scenario {
            ScenarioKind::Twistor => MapSpec::Identity,
            _ => MapSpec::WeierstrassP,
        })
    }

    pub fn fiber_lattice(&self) -> Lattice4 {
        self.fiber.and_then(|f| Lattice4::new(f).ok()).unwrap_or_else(Lattice4::standard)
    }

    pub fn calabi_data(&self) -> Result<CalabiData> {
        let c = &self.calabi;
        if c.genus < 3 || c.genus.is_multiple_of(2) {
            return Err(config_err("calabi.genus", "must be odd and at least 3"));
        }
        let curve = HyperellipticCurve::regular(c.genus, c.radius).map_err(|e| config_err("calabi.radius", e.to_string()))?;
        CalabiData::new(curve, poly_from(&c.phi), Complex64::new(0.0, 0.0), Sheet::Plus, self.fiber_lattice())
            .map_err(|e| config_err("calabi.phi", e.to_string()))
    }

    /// The threefold of this scenario, if it has one.
    pub fn threefold(&self) -> Result<WarpedThreefold> {
        let lattice = self.lattice.build()?;
        let fiber = self.fiber_lattice();
        match self.scenario {
            ScenarioKind::Bsv => {
                Ok(WarpedThreefold::new(Base::FlatTorus { lattice }, fiber, self.map_spec().build(&lattice)?))
            }
            ScenarioKind::Twistor => Ok(WarpedThreefold::new(Base::RoundSphere, fiber, self.map_spec().build(&lattice)?)),
            ScenarioKind::Calabi => Ok(self.calabi_data()?.threefold()),
            _ => Err(Error::NotApplicable(format!("{:?} has no threefold", self.scenario))),
        }
    }

    fn echo(&self) -> ScenarioConfig {
        ScenarioConfig { output: OutputSpec::default(), ..self.clone() }
    }
}

/// A number, an integer, or a tag such as `"exact-zero"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Integer(i64),
    Number(f64),
    Text(String),
}

pub const EXACT_ZERO: &str = "exact-zero";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    /// The claim being checked.
    pub anchor: String,
    pub conventions: Vec<String>,
    pub expected: Value,
    pub computed: Value,
    pub abs_err: Option<f64>,
    pub rel_err: Option<f64>,
    pub tolerance: Option<f64>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub details: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub all_pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub config: ScenarioConfig,
    pub records: Vec<CheckRecord>,
    pub summary: Summary,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn record(&self, name: &str) -> Option<&CheckRecord> {
        self.records.iter().find(|r| r.name == name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }
}

/// The computed part of a record.
struct Outcome {
    expected: Value,
    computed: Value,
    abs_err: Option<f64>,
    rel_err: Option<f64>,
    tolerance: Option<f64>,
    pass: bool,
    details: BTreeMap<String, f64>,
}

impl Outcome {
    /// `computed` against `expected` with an absolute tolerance.
    fn abs(expected: f64, computed: f64, tol: f64) -> Self {
        let abs_err = (computed - expected).abs();
        Outcome {
            expected: Value::Number(expected),
            computed: Value::Number(computed),
            abs_err: Some(abs_err),
            rel_err: (expected != 0.0).then(|| abs_err / expected.abs()),
            tolerance: Some(tol),
            pass: abs_err <= tol,
            details: BTreeMap::new(),
        }
    }

    /// `computed` against `expected` with a relative tolerance.
    fn rel(expected: f64, computed: f64, tol: f64) -> Self {
        let abs_err = (computed - expected).abs();
        let rel = abs_err / expected.abs();
        Outcome {
            expected: Value::Number(expected),
            computed: Value::Number(computed),
            abs_err: Some(abs_err),
            rel_err: Some(rel),
            tolerance: Some(tol),
            pass: rel <= tol,
            details: BTreeMap::new(),
        }
    }

    fn integer(expected: i64, computed: f64, tol: f64) -> Self {
        Outcome { expected: Value::Integer(expected), ..Outcome::abs(expected as f64, computed, tol) }
    }

    fn detail(mut self, key: &str, v: f64) -> Self {
        self.details.insert(key.into(), v);
        self
    }

    /// An extra condition that must hold for the record to pass.
    fn require(mut self, key: &str, ok: bool) -> Self {
        self.details.insert(format!("ok.{key}"), if ok { 1.0 } else { 0.0 });
        self.pass &= ok;
        self
    }
}

type CheckFn<'a> = Box<dyn FnOnce(&mut ChaCha8Rng) -> Result<Outcome> + 'a>;

struct Check<'a> {
    name: String,
    anchor: String,
    conventions: Vec<String>,
    run: CheckFn<'a>,
}

fn check<'a>(
    name: &str,
    anchor: &str,
    conventions: Vec<String>,
    run: impl FnOnce(&mut ChaCha8Rng) -> Result<Outcome> + 'a,
) -> Check<'a> {
    Check { name: name.into(), anchor: anchor.into(), conventions, run: Box::new(run) }
}

/// Runs every check of the configured scenario.
pub fn run(config: &ScenarioConfig) -> Result<Report> {
    config.validate()?;
    let ledger = ConventionLedger::default();
    let checks = match config.scenario {
        ScenarioKind::Bsv => bsv_checks(config, &ledger)?,
        ScenarioKind::Twistor => twistor_checks(config, &ledger)?,
        ScenarioKind::Calabi => calabi_checks(config)?,
        ScenarioKind::TorsionAlgebra => vec![torsion_algebra_check(config)],
        ScenarioKind::FrameIdentities => return Ok(assemble(config, frame_records())),
    };
    let mut master = ChaCha8Rng::seed_from_u64(config.seed);
    let mut records = Vec::with_capacity(checks.len());
    for c in checks {
        let mut rng = ChaCha8Rng::seed_from_u64(master.gen());
        let start = Instant::now();
        let outcome = (c.run)(&mut rng);
        let elapsed = start.elapsed().as_secs_f64();
        let mut rec = match outcome {
            Ok(o) => CheckRecord {
                name: c.name,
                anchor: c.anchor,
                conventions: c.conventions,
                expected: o.expected,
                computed: o.computed,
                abs_err: o.abs_err,
                rel_err: o.rel_err,
                tolerance: o.tolerance,
                pass: o.pass,
                details: o.details,
                wall_time_s: None,
            },
            Err(e) => CheckRecord {
                name: c.name,
                anchor: c.anchor,
                conventions: c.conventions,
                expected: Value::Text("no error".into()),
                computed: Value::Text(e.to_string()),
                abs_err: None,
                rel_err: None,
                tolerance: None,
                pass: false,
                details: BTreeMap::new(),
                wall_time_s: None,
            },
        };
        if config.timings {
            rec.wall_time_s = Some(elapsed);
        }
        records.push(rec);
    }
    Ok(assemble(config, records))
}

fn assemble(config: &ScenarioConfig, mut records: Vec<CheckRecord>) -> Report {
    records.sort_by(|a, b| a.name.cmp(&b.name));
    let passed = records.iter().filter(|r| r.pass).count();
    let summary = Summary { total: records.len(), passed, failed: records.len() - passed, all_pass: passed == records.len() };
    Report { schema_version: SCHEMA_VERSION, config: config.echo(), records, summary }
}

fn unit3(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 0.1 && n <= 1.0 {
            return [v[0] / n, v[1] / n, v[2] / n];
        }
    }
}

fn unit6(rng: &mut ChaCha8Rng) -> Vector6<f64> {
    loop {
        let v = Vector6::from_fn(|_, _| rng.gen_range(-1.0..1.0));
        let n = v.norm();
        if n > 0.1 && n <= 1.0 {
            return v / n;
        }
    }
}

fn torus_point(lattice: &Lattice2, rng: &mut ChaCha8Rng) -> [f64; 6] {
    let z = lattice.point(rng.gen(), rng.gen());
    [z.re, z.im, rng.gen(), rng.gen(), rng.gen(), rng.gen()]
}

fn signed_degree(map: &MeromorphicMap) -> Result<i64> {
    let d = map.degree()? as i64;
    Ok(if map.is_holomorphic() { d } else { -d })
}

/// Identity (1): `J² = −I`, `JᵀJ = I`, `Jᵀ = −J` and the stereographic round trip.
fn z2_algebra(n: usize, tol: f64, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let id = nalgebra::Matrix4::<f64>::identity();
    let (mut square, mut orth, mut skew, mut trip) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n {
        let [a, b, c] = unit3(rng);
        let p = OcsPoint::normalized(a, b, c);
        let j = j_matrix(p);
        square = square.max((j * j + id).abs().max());
        orth = orth.max((j.transpose() * j - id).abs().max());
        skew = skew.max((j.transpose() + j).abs().max());
        let back = stereo_to_sphere(sphere_to_stereo(p)).as_array();
        let q = p.as_array();
        trip = trip.max((0..3).map(|k| (back[k] - q[k]).abs()).fold(0.0, f64::max));
    }
    let worst = square.max(orth).max(skew).max(trip);
    Ok(Outcome::abs(0.0, worst, tol)
        .detail("j_squared_plus_identity", square)
        .detail("jt_j_minus_identity", orth)
        .detail("jt_plus_j", skew)
        .detail("stereographic_round_trip", trip))
}

fn wp_accuracy(n: usize, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let mut worst = 0.0_f64;
    for l in [Lattice2::square(), Lattice2::hexagonal()] {
        for _ in 0..n {
            let z = l.point(rng.gen(), rng.gen());
            let (p, dp, _) = l
                .wp_jet(z)
                .ok_or_else(|| Error::InvalidInput(format!("sample {z} hit a lattice point")))?;
            let r = dp * dp - (4.0 * p * p * p - l.g2() * p - l.g3());
            worst = worst.max(r.norm() / (1.0 + p.norm().powi(3)));
        }
    }
    let g3 = Lattice2::square().g3().norm();
    Ok(Outcome::abs(0.0, worst, tol.wp_ode).detail("square_g3_abs", g3).require("square_g3", g3 <= tol.wp_g3))
}

fn max_nijenhuis(w: &WarpedThreefold, pts: &[([f64; 6], Vector6<f64>, Vector6<f64>)]) -> Result<f64> {
    let mut m = 0.0_f64;
    for (p, x, y) in pts {
        m = m.max(w.nijenhuis(p, x, y, DEFAULT_H)?.norm());
    }
    Ok(m)
}

fn dichotomy(lattice: Lattice2, fiber: Lattice4, n: usize, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let pts: Vec<_> = (0..n).map(|_| (torus_point(&lattice, rng), unit6(rng), unit6(rng))).collect();
    let base = Base::FlatTorus { lattice };
    let (mut nij_hol, mut nij_anti, mut cr_hol, mut cr_anti) = (0.0_f64, f64::MAX, 0.0_f64, f64::MAX);
    for f in [MeromorphicMap::WeierstrassP { lattice }, MeromorphicMap::WeierstrassPPrime { lattice }] {
        let hol = WarpedThreefold::new(base.clone(), fiber, f.clone());
        let anti = WarpedThreefold::new(base.clone(), fiber, f.conjugate());
        nij_hol = nij_hol.max(max_nijenhuis(&hol, &pts)?);
        nij_anti = nij_anti.min(max_nijenhuis(&anti, &pts)?);
        let cr = |w: &WarpedThreefold| {
            pts.iter().map(|(p, _, _)| w.cauchy_riemann_residual(WarpedThreefold::base_z(p))).fold(0.0, f64::max)
        };
        cr_hol = cr_hol.max(cr(&hol));
        cr_anti = cr_anti.min(cr(&anti));
    }
    Ok(Outcome::abs(0.0, nij_hol, tol.nijenhuis_integrable)
        .detail("nijenhuis_max_holomorphic", nij_hol)
        .detail("nijenhuis_max_conjugated_min_over_maps", nij_anti)
        .detail("cr_max_holomorphic", cr_hol)
        .detail("cr_max_conjugated_min_over_maps", cr_anti)
        .require("conjugated_nonintegrable", nij_anti > tol.nijenhuis_nonintegrable)
        .require("cr_holomorphic", cr_hol < tol.cr_integrable)
        .require("cr_conjugated", cr_anti > tol.cr_nonintegrable))
}

fn fs_degree(domain: &IntegrationDomain, map: &MeromorphicMap, ledger: &ConventionLedger, tol: f64) -> Result<Outcome> {
    let d = signed_degree(map)?;
    let v = fs_pullback_integral(domain, ledger)?;
    let expected = ledger.fs_constant * d as f64;
    let rounded = (v.value / ledger.fs_constant).round() as i64;
    let out = if expected == 0.0 {
        Outcome::abs(0.0, v.value, tol)
    } else {
        Outcome::rel(expected, v.value, tol)
    };
    Ok(out
        .detail("degree", d as f64)
        .detail("euclidean", v.euclidean)
        .detail("i_form", v.i_form)
        .detail("error_estimate", v.error_estimate)
        .require("rounds_to_degree", rounded == d))
}

fn total_torsion(lattice: Lattice2, fiber: Lattice4, ledger: &ConventionLedger, tol: f64) -> Result<Outcome> {
    let base = Base::FlatTorus { lattice };
    let wp = MeromorphicMap::WeierstrassP { lattice };
    let wpp = MeromorphicMap::WeierstrassPPrime { lattice };
    let v2 = fiber.volume();
    let g = fiber.generators();
    let doubled = Lattice4::new([g[0].map(|x| 2.0 * x), g[1], g[2], g[3]])?;
    let t2 = total_chern_torsion(&WarpedThreefold::new(base.clone(), fiber, wp.clone()), ledger)?;
    let t2x = total_chern_torsion(&WarpedThreefold::new(base.clone(), doubled, wp), ledger)?;
    let t3 = total_chern_torsion(&WarpedThreefold::new(base, fiber, wpp), ledger)?;
    let constant = t2.value / (2.0 * v2);
    let vol_ratio = t2x.value / t2.value;
    let deg_ratio = t3.value / t2.value;
    Ok(Outcome::rel(ledger.torsion_constant, constant, tol)
        .detail("total_d2", t2.value)
        .detail("total_d3", t3.value)
        .detail("volume_ratio", vol_ratio)
        .detail("degree_ratio", deg_ratio)
        .detail("i_form_constant", t2.i_form / (2.0 * v2))
        .require("volume_ratio", ((vol_ratio - 2.0) / 2.0).abs() < tol)
        .require("degree_ratio", ((deg_ratio - 1.5) / 1.5).abs() < tol))
}

fn pairing(w: &WarpedThreefold, genus: i64, degree: i64, tol: f64) -> Result<Outcome> {
    let p = chern_number_pairing(w)?;
    let expected = 2 * (1 + degree - genus);
    Ok(Outcome::integer(expected, p.value, tol)
        .detail("curvature_part", p.curvature_part)
        .detail("torsion_part", p.torsion_part)
        .detail("error_estimate", p.error_estimate))
}

/// `m ↦ K(m)` negative and linear; optionally the ratio against a second map.
fn kodaira(
    w: &WarpedThreefold,
    other: Option<(&WarpedThreefold, f64)>,
    degree: i64,
    ledger: &ConventionLedger,
    tol: f64,
) -> Result<Outcome> {
    let vals: Vec<f64> = (1..=3)
        .map(|m| canonical_degree_integral(w, m, ledger).map(|k| k.display.value))
        .collect::<Result<_>>()?;
    let expected = ledger.kodaira_constant * degree as f64 * w.fiber.volume();
    let lin = (1..3).map(|i| (vals[i] / (i as f64 + 1.0) - vals[0]).abs()).fold(0.0, f64::max);
    let k1 = canonical_degree_integral(w, 1, ledger)?;
    let mut out = Outcome::rel(expected, vals[0], tol)
        .detail("m1", vals[0])
        .detail("m2", vals[1])
        .detail("m3", vals[2])
        .detail("full_trace_m1", k1.full_trace)
        .detail("linearity_defect", lin)
        .require("negative", vals.iter().all(|v| *v < 0.0))
        .require("linear", lin <= 1e-12 * vals[0].abs());
    if let Some((w2, want)) = other {
        let r = canonical_degree_integral(w2, 1, ledger)?.display.value / vals[0];
        out = out.detail("degree_ratio", r).require("degree_ratio", ((r - want) / want).abs() < tol);
    }
    Ok(out)
}

fn pointwise_torsion(w: &WarpedThreefold, lattice: &Lattice2, n: usize, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let (mut others, mut balanced, mut fiber, mut lambda_err) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n {
        let p = torus_point(lattice, rng);
        let t = w.chern_torsion(&p, DEFAULT_H)?;
        let lam = w.torsion_lambda(&p);
        for k in 0..3 {
            for i in 0..3 {
                for j in 0..3 {
                    if !matches!((k, i, j), (2, 0, 1) | (2, 1, 0)) {
                        others = others.max(t.get(k, i, j).norm());
                    }
                }
            }
        }
        lambda_err = lambda_err.max((t.get(2, 0, 1) - lam).norm() / (1.0 + lam.norm()));
        balanced = balanced.max(t.torsion_trace().iter().map(|c| c.norm()).fold(0.0, f64::max));
        let mut q = p;
        for x in q.iter_mut().skip(2) {
            *x += rng.gen_range(-3.0..3.0);
        }
        let tq = w.chern_torsion(&q, DEFAULT_H)?;
        fiber = fiber.max((tq.get(2, 0, 1) - t.get(2, 0, 1)).norm());
    }
    Ok(Outcome::abs(0.0, others, tol.torsion_component)
        .detail("lambda_match", lambda_err)
        .detail("balanced_max", balanced)
        .detail("fiber_variation", fiber)
        .require("lambda_match", lambda_err < tol.torsion_component)
        .require("balanced", balanced < tol.balanced)
        .require("fiber_constancy", fiber < tol.fiber_constancy))
}

fn bsv_checks<'a>(config: &'a ScenarioConfig, ledger: &'a ConventionLedger) -> Result<Vec<Check<'a>>> {
    let tol = &config.tolerances;
    let n = &config.samples;
    let lattice = config.lattice.build()?;
    let fiber = config.fiber_lattice();
    let map = config.map_spec().build(&lattice)?;
    let w = config.threefold()?;
    let d = signed_degree(&map)?;
    let wp = WarpedThreefold::new(Base::FlatTorus { lattice }, fiber, MeromorphicMap::WeierstrassP { lattice });
    let wpp = WarpedThreefold::new(Base::FlatTorus { lattice }, fiber, MeromorphicMap::WeierstrassPPrime { lattice });
    let w2 = w.clone();
    Ok(vec![
        check("z2-algebra", "J(a,b,c) is orthogonal, skew and squares to -I; stereographic chart inverts", vec![], move |r| {
            z2_algebra(n.algebra, tol.algebra, r)
        }),
        check("wp-accuracy", "wp'^2 = 4wp^3 - g2 wp - g3; g3 = 0 on the square lattice", vec![], move |r| {
            wp_accuracy(n.wp, tol, r)
        }),
        check(
            "integrability-dichotomy",
            "J integrable iff f holomorphic",
            vec!["nijenhuis: max |N(X,Y)|, unit X,Y".into(), "cr: max(|x'+y.|, |y'-x.|)".into()],
            move |r| dichotomy(lattice, fiber, n.nijenhuis, tol, r),
        ),
        check("fs-degree-torus", "int f*omega_FS = 2 pi deg f", ledger.tags("fs"), {
            let map = map.clone();
            move |_| fs_degree(&IntegrationDomain::torus(&lattice, &map)?, &map, ledger, tol.integral_rel)
        }),
        check("total-torsion", "int |T^c|^2 dv = 32 pi v2 deg f", ledger.tags("torsion"), move |_| {
            total_torsion(lattice, fiber, ledger, tol.integral_rel)
        }),
        check("chern-pairing-torus", "<c1, [M1]> = 2(1 + d - g1)", ledger.tags("c1"), move |_| {
            pairing(&w, 1, d, tol.pairing_abs)
        }),
        check("kodaira-torus", "-(m/3pi) int |lambda|^2 omega^3 = -4 m d v2", ledger.tags("kodaira"), move |_| {
            kodaira(&wp, Some((&wpp, 1.5)), 2, ledger, tol.integral_rel)
        }),
        check("pointwise-torsion", "only T^3_12 = lambda is nonzero; balanced; constant along fibers", vec![], move |r| {
            pointwise_torsion(&w2, &lattice, n.torsion_points, tol, r)
        }),
    ])
}

fn twistor_checks<'a>(config: &'a ScenarioConfig, ledger: &'a ConventionLedger) -> Result<Vec<Check<'a>>> {
    let tol = &config.tolerances;
    let lattice = config.lattice.build()?;
    let map = config.map_spec().build(&lattice)?;
    let w = config.threefold()?;
    let d = signed_degree(&map)?;
    let w2 = w.clone();
    Ok(vec![
        check("fs-degree-sphere", "int f*omega_FS = 2 pi deg f", ledger.tags("fs"), {
            let map = map.clone();
            move |_| fs_degree(&IntegrationDomain::sphere(&map)?, &map, ledger, tol.integral_rel)
        }),
        check("chern-pairing-sphere", "<c1, [M1]> = 2(1 + d - g1)", ledger.tags("c1"), move |_| {
            pairing(&w, 0, d, tol.pairing_abs)
        }),
        check("kodaira-sphere", "-(m/3pi) int |lambda|^2 omega^3 = -4 m d v2", ledger.tags("kodaira"), move |_| {
            kodaira(&w2, None, d, ledger, tol.integral_rel)
        }),
    ])
}

fn random_regular_z(data: &CalabiData, rng: &mut ChaCha8Rng) -> Complex64 {
    loop {
        let z = Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        if data.curve.branch_distance(z) > 0.05 {
            return z;
        }
    }
}

fn calabi_suite(data: &CalabiData, n: &Samples, tol: &Tolerances, rng: &mut ChaCha8Rng) -> Result<Outcome> {
    let w = data.threefold();
    let (mut j_display, mut j_warped, mut iso, mut metric) = (0.0_f64, 0.0_f64, 0.0_f64, 0.0_f64);
    for _ in 0..n.calabi_points {
        let z = random_regular_z(data, rng);
        let sheet = if rng.gen_bool(0.5) { Sheet::Plus } else { Sheet::Minus };
        let j = calabi::calabi_j(data, z, sheet)?;
        let block = j.fixed_view::<4, 4>(2, 2).into_owned();
        j_display = j_display.max((block - calabi::fiber_block_display(&calabi::gauss_normal(data, z))).abs().max());
        let p = [z.re, z.im, rng.gen(), rng.gen(), rng.gen(), rng.gen()];
        j_warped = j_warped.max((j - w.warped_j(&p)).abs().max());
        let c = calabi::weierstrass_forms(data, z, sheet)?;
        let s: Complex64 = c.iter().map(|x| x * x).sum();
        let scale: f64 = c.iter().map(|x| x.norm_sqr()).sum();
        iso = iso.max(s.norm() / scale);
        let h = calabi::induced_metric(data, z);
        metric = metric.max((calabi::metric_from_forms(&c) - h).abs() / h);
    }
    let mut mean_h = 0.0_f64;
    for _ in 0..n.patch_points {
        let z = random_regular_z(data, rng);
        mean_h = mean_h.max(calabi::mean_curvature_fd(data, z, Sheet::Plus, 1e-3)?.abs());
    }
    let (mut k_fd, mut ks) = (0.0_f64, Vec::with_capacity(n.curvature_points));
    for _ in 0..n.curvature_points {
        let z = random_regular_z(data, rng);
        let k = calabi::gauss_curvature(data, z);
        let fd = calabi::curvature_fd(|z| calabi::induced_metric(data, z), z, 1e-3);
        k_fd = k_fd.max((fd - k).abs() / k.abs().max(f64::MIN_POSITIVE));
        ks.push(k);
    }
    let mean = ks.iter().sum::<f64>() / ks.len().max(1) as f64;
    let var = ks.iter().map(|k| (k - mean).powi(2)).sum::<f64>() / ks.len().max(1) as f64;
    let worst_j = j_display.max(j_warped);
    Ok(Outcome::abs(0.0, worst_j, tol.calabi_j)
        .detail("j_vs_display", j_display)
        .detail("j_vs_warped", j_warped)
        .detail("isotropy", iso)
        .detail("mean_curvature", mean_h)
        .detail("curvature_fd_rel", k_fd)
        .detail("curvature_variance", var)
        .detail("metric_rel", metric)
        .require("isotropy", iso <= tol.isotropy)
        .require("mean_curvature", mean_h < tol.mean_curvature)
        .require("curvature_fd", k_fd < tol.curvature_fd)
        .require("curvature_variance", var > 0.0)
        .require("metric", metric <= tol.metric))
}

fn calabi_checks(config: &ScenarioConfig) -> Result<Vec<Check<'_>>> {
    let tol = &config.tolerances;
    let data = config.calabi_data()?;
    let w = data.threefold();
    let genus = data.curve.genus() as i64;
    let d = 2 * data.phi.degree() as i64;
    Ok(vec![
        check(
            "calabi-suite",
            "J = N x on Im(O) equals J1 + J(phi); minimal, isotropic; K formula",
            vec!["metric: h |dz|^2 with h = sum |dx_i/dz|^2".into()],
            move |r| calabi_suite(&data, &config.samples, tol, r),
        ),
        check("chern-pairing-calabi", "<c1, [M1]> = 2(1 + d - g1)", ConventionLedger::default().tags("c1"), move |_| {
            pairing(&w, genus, d, tol.pairing_abs)
        }),
    ])
}

fn torsion_algebra_check(config: &ScenarioConfig) -> Check<'_> {
    let tol = config.tolerances.variety;
    let n = config.samples.variety;
    check(
        "torsion-algebra",
        "trace conditions iff A_X A_Y = 0; ker splits 0 + 1 + 2; image inside common kernel",
        vec![],
        move |rng| {
            let (mut nil, mut img, mut bad_dims) = (0.0_f64, 0.0_f64, 0usize);
            for _ in 0..n {
                let t = ta::sample_variety(rng).change_frame(&ta::random_unitary(rng));
                nil = nil.max(ta::nilpotency_residual(&t));
                match ta::kernel_decomposition(&t) {
                    Ok(d) => {
                        bad_dims += usize::from(d.dims() != (0, 1, 2));
                        img = img.max(ta::image_in_kernel_residual(&t, &d));
                    }
                    Err(_) => bad_dims += 1,
                }
            }
            let mut converse = 0usize;
            for _ in 0..n / 10 {
                let t = ta::random_balanced(rng);
                converse += usize::from(ta::nilpotency(&t) != ta::trace_conditions(&t));
            }
            Ok(Outcome::abs(0.0, nil, tol)
                .detail("image_in_kernel", img)
                .detail("wrong_dimensions", bad_dims as f64)
                .detail("converse_violations", converse as f64)
                .require("image_in_kernel", img <= tol)
                .require("dimensions", bad_dims == 0)
                .require("converse", converse == 0))
        },
    )
}

fn frame_records() -> Vec<CheckRecord> {
    let suite = framecalc::frame_identity_suite();
    let mut seen: BTreeMap<String, usize> = BTreeMap::new();
    suite
        .checks
        .iter()
        .map(|c| {
            let k = seen.entry(c.name.clone()).or_insert(0);
            *k += 1;
            let name = if *k == 1 { format!("frame/{}", c.name) } else { format!("frame/{}#{}", c.name, k) };
            CheckRecord {
                name,
                anchor: c.name.clone(),
                conventions: vec!["exact rational arithmetic".into()],
                expected: Value::Text(EXACT_ZERO.into()),
                computed: Value::Text(if c.passed() { "0".into() } else { c.residual.to_string() }),
                abs_err: None,
                rel_err: None,
                tolerance: None,
                pass: c.passed(),
                details: BTreeMap::new(),
                wall_time_s: None,
            }
        })
        .collect()
}

/// Fields available to [`sample_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridField {
    LambdaSq,
    Nijenhuis,
    GaussCurvature,
    FsDensity,
}

impl std::str::FromStr for GridField {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lambda-sq" => Ok(GridField::LambdaSq),
            "nijenhuis" => Ok(GridField::Nijenhuis),
            "gauss-curvature" => Ok(GridField::GaussCurvature),
            "fs-density" => Ok(GridField::FsDensity),
            _ => Err(config_err(
                "field",
                format!("unknown field {s:?}; expected lambda-sq, nijenhuis, gauss-curvature or fs-density"),
            )),
        }
    }
}

impl GridField {
    pub fn column(self) -> &'static str {
        match self {
            GridField::LambdaSq => "lambda_sq",
            GridField::Nijenhuis => "nijenhuis_norm",
            GridField::GaussCurvature => "gauss_curvature",
            GridField::FsDensity => "fs_density",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub header: [String; 3],
    pub rows: Vec<[f64; 3]>,
}

impl Grid {
    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&format!("{},{},{}\n", r[0], r[1], r[2]));
        }
        s
    }
}

/// Largest `|N(e_a, e_b)|` over coordinate pairs.
fn nijenhuis_norm(w: &WarpedThreefold, p: &[f64; 6]) -> Result<f64> {
    let mut m = 0.0_f64;
    for a in 0..6 {
        for b in a + 1..6 {
            let (mut x, mut y) = (Vector6::zeros(), Vector6::zeros());
            x[a] = 1.0;
            y[b] = 1.0;
            m = m.max(w.nijenhuis(p, &x, &y, DEFAULT_H)?.norm());
        }
    }
    Ok(m)
}

/// `field` on an `n × n` grid of cell centers over the base fundamental domain
/// (the lattice parallelogram, `[−2, 2]²` on P¹, `[−3, 3]²` on the first sheet
/// of a hyperelliptic curve). Coordinates are `Re z`, `Im z`.
pub fn sample_grid(config: &ScenarioConfig, field: GridField, n: usize) -> Result<Grid> {
    let w = config.threefold()?;
    let header = ["x".to_string(), "y".to_string(), field.column().to_string()];
    let point = |i: usize, j: usize| -> Complex64 {
        let (s, t) = ((i as f64 + 0.5) / n as f64, (j as f64 + 0.5) / n as f64);
        match &w.base {
            Base::FlatTorus { lattice } => lattice.point(s, t),
            Base::RoundSphere => Complex64::new(-2.0 + 4.0 * s, -2.0 + 4.0 * t),
            Base::Hyperelliptic { .. } => Complex64::new(-3.0 + 6.0 * s, -3.0 + 6.0 * t),
        }
    };
    let mut rows = Vec::with_capacity(n * n);
    for j in 0..n {
        for i in 0..n {
            let z = point(i, j);
            let p = [z.re, z.im, 0.0, 0.0, 0.0, 0.0];
            let v = match field {
                GridField::LambdaSq => w.torsion_lambda(&p).norm_sqr(),
                GridField::Nijenhuis => nijenhuis_norm(&w, &p)?,
                GridField::GaussCurvature => w.base.curvature(z),
                GridField::FsDensity => {
                    let s = LocalSample { jet: w.map.jet(z).chart(), rho: w.base.rho(z), curvature: 0.0, weight: 1.0 };
                    Density::FsForm.eval(&s)
                }
            };
            rows.push([z.re, z.im, v]);
        }
    }
    Ok(Grid { header, rows })
}

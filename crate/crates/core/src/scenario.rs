//! Configuration-driven scenarios: a registry of named runners behind a
//! common trait, strict config parsing and ordered JSON reports.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::blaschke::{BlaschkeProduct, Family, PairSpec, RationalFn};
use crate::clark::{clark_atoms, decompose_mu, herglotz_consistency, interior_grid, verify_poisson_identity};
use crate::cyclic::{cyclicity_verdict, h0_basis, section4_orthogonality_check};
use crate::decomp::{
    verify_hayashi_identities, verify_set_equality, verify_theorem1, verify_theorem3, DecompositionReport,
};
use crate::hardy::OuterMode;
use crate::hb::HbContext;
use crate::poly::{closed_disk_zero_count, cohn_step, ComplexPoly};
use crate::{Error, Result, C64};

pub const SCHEMA: u32 = 1;
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_TRUNC: usize = 256;
pub const DEFAULT_SEED: u64 = 424242;
pub const DEFAULT_PROBES: usize = 20;

/// Inner function: `monomial = d` or explicit `zeros` with optional `rotation`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InnerSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub monomial: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zeros: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rotation: Option<C64>,
}

impl InnerSpec {
    pub fn monomial(d: usize) -> Self {
        InnerSpec { monomial: Some(d), zeros: None, rotation: None }
    }

    pub fn build(&self) -> Result<BlaschkeProduct> {
        let rotation = self.rotation.unwrap_or(C64::new(1.0, 0.0));
        match (&self.monomial, &self.zeros) {
            (Some(d), None) => {
                if *d == 0 {
                    return Err(Error::Config("monomial degree must be positive".into()));
                }
                BlaschkeProduct::new(vec![C64::new(0.0, 0.0); *d], rotation)
            }
            (None, Some(z)) => BlaschkeProduct::new(z.clone(), rotation),
            _ => Err(Error::Config("inner needs exactly one of `monomial` and `zeros`".into())),
        }
        .map_err(|e| Error::Config(format!("inner function: {e}")))
    }
}

/// `monomial:d` or `zeros:z1;z2;...` with complex entries like `0.3+0.2i`.
impl FromStr for InnerSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Config(format!("inner `{s}`: expected monomial:d or zeros:...")))?;
        match head.trim() {
            "monomial" => rest
                .trim()
                .parse()
                .map(InnerSpec::monomial)
                .map_err(|_| Error::Config(format!("bad monomial degree `{rest}`"))),
            "zeros" => Ok(InnerSpec {
                monomial: None,
                zeros: Some(rest.split(';').map(parse_complex).collect::<Result<_>>()?),
                rotation: None,
            }),
            other => Err(Error::Config(format!("unknown inner form `{other}`"))),
        }
    }
}

pub fn parse_complex(s: &str) -> Result<C64> {
    C64::from_str(s.trim()).map_err(|_| Error::Config(format!("bad complex number `{s}`")))
}

/// Comma-separated coefficients, lowest degree first.
pub fn parse_coeffs(s: &str) -> Result<Vec<C64>> {
    s.split(',').map(parse_complex).collect()
}

/// Rational function by coefficient lists, lowest degree first.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RationalSpec {
    pub num: Vec<C64>,
    #[serde(default = "unit_den")]
    pub den: Vec<C64>,
}

fn unit_den() -> Vec<C64> {
    vec![C64::new(1.0, 0.0)]
}

impl RationalSpec {
    pub fn build(&self) -> Result<RationalFn> {
        RationalFn::new(ComplexPoly::new(self.num.clone()), ComplexPoly::new(self.den.clone()))
            .map_err(|e| Error::Config(format!("rational function: {e}")))
    }
}

/// `num-coeffs/den-coeffs`, the denominator optional.
impl FromStr for RationalSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (parse_coeffs(n)?, parse_coeffs(d)?),
            None => (parse_coeffs(s)?, unit_den()),
        };
        Ok(RationalSpec { num, den })
    }
}

/// A second space for set-equality scenarios.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    #[serde(default = "family_one")]
    pub family: Family,
    pub inner: InnerSpec,
    #[serde(default)]
    pub n: usize,
}

fn family_one() -> Family {
    Family::One
}

impl SpaceSpec {
    pub fn build(&self) -> Result<PairSpec> {
        let spec = PairSpec { family: self.family, inner: self.inner.build()?, n: self.n };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<Family>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inner: Option<InnerSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trunc: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<C64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<RationalSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<OuterMode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coeffs: Option<Vec<C64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub other: Option<SpaceSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tolerances: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn new(kind: impl Into<String>) -> Self {
        ScenarioConfig {
            kind: kind.into(),
            name: None,
            family: None,
            inner: None,
            n: None,
            trunc: None,
            seed: None,
            lambda: None,
            f: None,
            mode: None,
            coeffs: None,
            other: None,
            probes: None,
            tolerances: BTreeMap::new(),
        }
    }

    fn inner(&self) -> Result<BlaschkeProduct> {
        self.inner
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{}: missing `inner`", self.kind)))?
            .build()
    }

    fn pair_spec(&self) -> Result<PairSpec> {
        let spec = PairSpec {
            family: self.family.unwrap_or(Family::One),
            inner: self.inner()?,
            n: self.n.unwrap_or(0),
        };
        spec.validate().map_err(|e| Error::Config(e.to_string()))?;
        Ok(spec)
    }

    fn rational(&self) -> Result<RationalFn> {
        self.f
            .as_ref()
            .ok_or_else(|| Error::Config(format!("{}: missing `f`", self.kind)))?
            .build()
    }

    fn trunc(&self) -> usize {
        self.trunc.unwrap_or(DEFAULT_TRUNC)
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Values inherited by every scenario that does not set them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Defaults {
    #[serde(default)]
    pub trunc: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub defaults: Defaults,
    #[serde(rename = "scenario")]
    pub scenarios: Vec<ScenarioConfig>,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// JSON for `.json` files, TOML otherwise.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) {
            Self::from_json(&text)
        } else {
            Self::from_toml(&text)
        }
    }

    /// Scenarios with defaults filled in, validated against `registry`.
    pub fn resolve(&self, registry: &Registry) -> Result<Vec<ScenarioConfig>> {
        if self.scenarios.is_empty() {
            return Err(Error::Config("no scenarios".into()));
        }
        self.scenarios
            .iter()
            .map(|s| {
                let mut s = s.clone();
                s.trunc = Some(s.trunc.or(self.defaults.trunc).unwrap_or(DEFAULT_TRUNC));
                s.seed = Some(s.seed.or(self.defaults.seed).unwrap_or(DEFAULT_SEED));
                registry.check(&s)?;
                Ok(s)
            })
            .collect()
    }
}

pub struct Outcome {
    pub pass: bool,
    pub metrics: Value,
}

pub trait Scenario: Send + Sync {
    fn kind(&self) -> &'static str;
    fn summary(&self) -> &'static str;
    /// Overridable tolerances and their defaults.
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        &[]
    }
    /// Configuration errors only; numerical failures belong in `run`.
    fn check(&self, cfg: &ScenarioConfig) -> Result<()>;
    fn run(&self, cfg: &ScenarioConfig, tol: &BTreeMap<String, f64>) -> Result<Outcome>;
}

pub struct Registry {
    scenarios: BTreeMap<&'static str, Box<dyn Scenario>>,
}

impl Default for Registry {
    fn default() -> Self {
        Self::standard()
    }
}

impl Registry {
    pub fn empty() -> Self {
        Registry { scenarios: BTreeMap::new() }
    }

    pub fn standard() -> Self {
        let mut r = Self::empty();
        r.register(Box::new(Theorem1));
        r.register(Box::new(Theorem3));
        r.register(Box::new(Hayashi));
        r.register(Box::new(Clark));
        r.register(Box::new(Cohn));
        r.register(Box::new(Cyclic));
        r.register(Box::new(SetEquality));
        r.register(Box::new(Section4));
        r
    }

    pub fn register(&mut self, s: Box<dyn Scenario>) {
        self.scenarios.insert(s.kind(), s);
    }

    pub fn get(&self, kind: &str) -> Option<&dyn Scenario> {
        self.scenarios.get(kind).map(|b| b.as_ref())
    }

    pub fn kinds(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.scenarios.keys().copied()
    }

    fn lookup(&self, kind: &str) -> Result<&dyn Scenario> {
        self.get(kind).ok_or_else(|| {
            Error::Config(format!(
                "unknown scenario kind `{kind}` (known: {})",
                self.kinds().collect::<Vec<_>>().join(", ")
            ))
        })
    }

    pub fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        let s = self.lookup(&cfg.kind)?;
        for key in cfg.tolerances.keys() {
            if !s.tolerances().iter().any(|(k, _)| k == key) {
                return Err(Error::Config(format!("{}: unknown tolerance `{key}`", cfg.kind)));
            }
        }
        if let Some((k, v)) = cfg.tolerances.iter().find(|(_, v)| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::Config(format!("{}: tolerance `{k}` = {v} must be positive", cfg.kind)));
        }
        s.check(cfg)
    }

    /// Runs one already resolved scenario; numerical errors land in the report.
    pub fn run_one(&self, index: usize, cfg: &ScenarioConfig, timings: bool) -> ScenarioReport {
        let start = Instant::now();
        let mut tolerances: BTreeMap<String, f64> = BTreeMap::new();
        let result = self.lookup(&cfg.kind).and_then(|s| {
            for (k, v) in s.tolerances() {
                tolerances.insert((*k).to_string(), cfg.tolerances.get(*k).copied().unwrap_or(*v));
            }
            s.run(cfg, &tolerances)
        });
        let elapsed = start.elapsed().as_secs_f64() * 1e3;
        let (pass, metrics, error) = match result {
            Ok(o) => (o.pass, o.metrics, None),
            Err(e) => (false, Value::Null, Some(e.to_string())),
        };
        ScenarioReport {
            schema: SCHEMA,
            version: VERSION.to_string(),
            index,
            kind: cfg.kind.clone(),
            name: cfg.name.clone(),
            pass,
            error,
            config: cfg.clone(),
            tolerances,
            metrics,
            timing_ms: timings.then_some(elapsed),
        }
    }
}

/// One line of a run report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioReport {
    pub schema: u32,
    pub version: String,
    pub index: usize,
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub pass: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub config: ScenarioConfig,
    pub tolerances: BTreeMap<String, f64>,
    pub metrics: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing_ms: Option<f64>,
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Numerical(e.to_string()))
}

/// Drops the verdict computed with module default tolerances.
fn metrics_without_pass<T: Serialize>(v: &T) -> Result<Value> {
    let mut v = to_value(v)?;
    if let Value::Object(m) = &mut v {
        m.remove("pass");
    }
    Ok(v)
}

fn tol(t: &BTreeMap<String, f64>, key: &str) -> f64 {
    t[key]
}

fn require<T>(field: &Option<T>, kind: &str, name: &str) -> Result<()> {
    field
        .as_ref()
        .map(|_| ())
        .ok_or_else(|| Error::Config(format!("{kind}: missing `{name}`")))
}

fn decomposition_outcome(r: DecompositionReport, t: &BTreeMap<String, f64>) -> Result<Outcome> {
    let pass = r.max_cross_orthogonality < tol(t, "orthogonality")
        && r.max_completeness() < tol(t, "completeness")
        && r.monotone != Some(false);
    Ok(Outcome { pass, metrics: metrics_without_pass(&r)? })
}

const DECOMPOSITION_TOLERANCES: &[(&str, f64)] = &[
    ("orthogonality", crate::decomp::ORTHOGONALITY_TOL),
    ("completeness", crate::decomp::COMPLETENESS_TOL),
];

struct Theorem1;

impl Scenario for Theorem1 {
    fn kind(&self) -> &'static str {
        "thm1"
    }
    fn summary(&self) -> &'static str {
        "orthogonal decomposition of H(I^n (1 + I)/2)"
    }
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        DECOMPOSITION_TOLERANCES
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        if cfg.family == Some(Family::Two) {
            return Err(Error::Config("thm1 is a family 1 scenario".into()));
        }
        cfg.inner().map(|_| ())
    }
    fn run(&self, cfg: &ScenarioConfig, t: &BTreeMap<String, f64>) -> Result<Outcome> {
        decomposition_outcome(verify_theorem1(&cfg.inner()?, cfg.n.unwrap_or(0), cfg.trunc())?, t)
    }
}

struct Theorem3;

impl Scenario for Theorem3 {
    fn kind(&self) -> &'static str {
        "thm3"
    }
    fn summary(&self) -> &'static str {
        "three-way decomposition of H(I (1 + I^2)/2)"
    }
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        DECOMPOSITION_TOLERANCES
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        PairSpec::family2(cfg.inner()?)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }
    fn run(&self, cfg: &ScenarioConfig, t: &BTreeMap<String, f64>) -> Result<Outcome> {
        decomposition_outcome(verify_theorem3(&cfg.inner()?, cfg.trunc())?, t)
    }
}

struct Hayashi;

impl Scenario for Hayashi {
    fn kind(&self) -> &'static str {
        "hayashi"
    }
    fn summary(&self) -> &'static str {
        "pair, norm and Toeplitz-kernel identities for the family 2 density"
    }
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        &[
            ("grid", crate::decomp::HAYASHI_GRID_TOL),
            ("norm", crate::decomp::HAYASHI_NORM_TOL),
            ("operator", crate::decomp::HAYASHI_OPERATOR_TOL),
        ]
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        PairSpec::family2(cfg.inner()?)
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }
    fn run(&self, cfg: &ScenarioConfig, t: &BTreeMap<String, f64>) -> Result<Outcome> {
        let r = verify_hayashi_identities(&cfg.inner()?, cfg.trunc())?;
        let (grid, norm, op) = (tol(t, "grid"), tol(t, "norm"), tol(t, "operator"));
        let pass = r.real_part_defect < grid
            && r.f1_norm_defect < norm
            && r.pair_defect < grid
            && r.representation_defect < grid
            && r.f0_squared_defect < grid
            && r.f0_squared_rigid
            && r.symbol_defect < grid
            && r.kernel_membership < op
            && r.image_identity < op
            && r.image_map_conditioning > 1e-8;
        Ok(Outcome { pass, metrics: metrics_without_pass(&r)? })
    }
}

struct Clark;

impl Scenario for Clark {
    fn kind(&self) -> &'static str {
        "clark"
    }
    fn summary(&self) -> &'static str {
        "Clark atoms, Poisson identity and the decomposition of mu"
    }
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        &[("poisson", 1e-8), ("boundary", 1e-10), ("herglotz", 1e-7)]
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        if let Some(l) = cfg.lambda {
            if ((l.norm() - 1.0).abs()) > 1e-12 {
                return Err(Error::Config(format!("lambda must be unimodular, |lambda| = {}", l.norm())));
            }
        }
        cfg.pair_spec().map(|_| ())
    }
    fn run(&self, cfg: &ScenarioConfig, t: &BTreeMap<String, f64>) -> Result<Outcome> {
        let spec = cfg.pair_spec()?;
        let lambda = cfg.lambda.unwrap_or(C64::new(1.0, 0.0));
        let atoms = clark_atoms(&spec.inner, lambda)?;
        let poisson = verify_poisson_identity(&spec.inner, &interior_grid())?;
        let dec = decompose_mu(&spec)?;
        let quad = dec.quadrature_points()?;
        let herglotz = herglotz_consistency(&dec, None)?;
        let (p, q) = dec.singular_coeff_fraction;
        let pass = poisson < tol(t, "poisson")
            && dec.boundary_defect < tol(t, "boundary")
            && herglotz < tol(t, "herglotz");
        Ok(Outcome {
            pass,
            metrics: json!({
                "pair": spec.label(),
                "lambda": lambda,
                "atoms": atoms,
                "total_mass": atoms.total_mass(),
                "poisson_error": poisson,
                "singular_coeff": dec.singular_coeff,
                "singular_coeff_fraction": format!("{p}/{q}"),
                "boundary_defect": dec.boundary_defect,
                "herglotz_residual": herglotz,
                "quadrature_points": quad,
            }),
        })
    }
}

struct Cohn;

impl Scenario for Cohn {
    fn kind(&self) -> &'static str {
        "cohn"
    }
    fn summary(&self) -> &'static str {
        "closed-disk zero count by Cohn reduction against the root census"
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        require(&cfg.coeffs, "cohn", "coeffs")?;
        if ComplexPoly::new(cfg.coeffs.clone().unwrap()).is_zero() {
            return Err(Error::Config("cohn: zero polynomial".into()));
        }
        Ok(())
    }
    fn run(&self, cfg: &ScenarioConfig, _: &BTreeMap<String, f64>) -> Result<Outcome> {
        let p = ComplexPoly::new(cfg.coeffs.clone().unwrap_or_default());
        let count = closed_disk_zero_count(&p)?;
        let (census, min_modulus, residual) = if p.degree() == Some(0) {
            (0, f64::INFINITY, 0.0)
        } else {
            let rs = p.roots()?;
            (rs.roots.iter().filter(|r| r.norm() <= 1.0).count(), rs.min_modulus(), rs.residual)
        };
        let reduced = match cohn_step(&p) {
            Ok(q) => Some(closed_disk_zero_count(&q)?),
            Err(Error::CohnInapplicable { .. }) | Err(Error::ZeroPolynomial) => None,
            Err(e) => return Err(e),
        };
        Ok(Outcome {
            pass: count == census && reduced.is_none_or(|r| r == count),
            metrics: json!({
                "degree": p.degree(),
                "zero_count": count,
                "census_count": census,
                "reduced_count": reduced,
                "min_root_modulus": if min_modulus.is_finite() { json!(min_modulus) } else { Value::Null },
                "root_residual": residual,
            }),
        })
    }
}

struct Cyclic;

impl Scenario for Cyclic {
    fn kind(&self) -> &'static str {
        "cyclic"
    }
    fn summary(&self) -> &'static str {
        "atom criterion against the polynomial density oracle"
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        cfg.pair_spec()?;
        cfg.rational().map(|_| ())
    }
    fn run(&self, cfg: &ScenarioConfig, _: &BTreeMap<String, f64>) -> Result<Outcome> {
        let spec = cfg.pair_spec()?;
        let ctx = HbContext::new(&spec, cfg.trunc())?;
        let label = cfg.name.clone().unwrap_or_else(|| spec.label());
        let v = cyclicity_verdict(&ctx, &cfg.rational()?, cfg.mode.unwrap_or_default(), label)?;
        Ok(Outcome { pass: v.agreement && !v.dead_band, metrics: to_value(&v)? })
    }
}

struct SetEquality;

impl Scenario for SetEquality {
    fn kind(&self) -> &'static str {
        "set-eq"
    }
    fn summary(&self) -> &'static str {
        "polynomial probes accepted by two spaces claimed equal as sets"
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        cfg.pair_spec()?;
        require(&cfg.other, "set-eq", "other")?;
        cfg.other.as_ref().unwrap().build().map(|_| ())
    }
    fn run(&self, cfg: &ScenarioConfig, _: &BTreeMap<String, f64>) -> Result<Outcome> {
        let a = cfg.pair_spec()?;
        let b = cfg.other.as_ref().unwrap().build()?;
        let r = verify_set_equality(&a, &b, cfg.probes.unwrap_or(DEFAULT_PROBES), cfg.seed(), cfg.trunc())?;
        Ok(Outcome { pass: r.pass, metrics: to_value(&r)? })
    }
}

struct Section4;

impl Scenario for Section4 {
    fn kind(&self) -> &'static str {
        "section4"
    }
    fn summary(&self) -> &'static str {
        "kernel functions at the atoms: evaluation, rank and elimination"
    }
    fn tolerances(&self) -> &'static [(&'static str, f64)] {
        &[("evaluation", crate::cyclic::EVALUATION_TOL)]
    }
    fn check(&self, cfg: &ScenarioConfig) -> Result<()> {
        let spec = cfg.pair_spec()?;
        if spec.family != Family::One || spec.n != 0 {
            return Err(Error::Config("section4 needs family 1 with n = 0".into()));
        }
        cfg.rational().map(|_| ())
    }
    fn run(&self, cfg: &ScenarioConfig, t: &BTreeMap<String, f64>) -> Result<Outcome> {
        let spec = cfg.pair_spec()?;
        let ctx = HbContext::new(&spec, cfg.trunc())?;
        let r = section4_orthogonality_check(&ctx, &cfg.rational()?)?;
        let h0 = h0_basis(&ctx, 16)?;
        let ev = tol(t, "evaluation");
        let pass = r.max_evaluation_defect < ev
            && r.max_diagonal_defect < ev
            && r.max_offdiagonal < ev
            && h0.gram_rank == r.atoms.len()
            && h0.max_orthogonality_to_ma < ev;
        Ok(Outcome {
            pass,
            metrics: json!({
                "check": r,
                "h0_dimension": h0.gram_rank,
                "h0_orthogonality_to_ma": h0.max_orthogonality_to_ma,
            }),
        })
    }
}

//! Flat TOML experiment configuration with dotted sections.
//!
//! Every key is optional except `gamma`. Unknown keys and range violations are collected and
//! reported together. [`ExperimentConfig::to_toml`] writes every key, defaults included, and
//! parses back to an equal value; its SHA-256 is the config hash in output headers.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use fracsep::fracops::presets::{neumann_family, robin0_family, robin_family, sloped_robin_family, smooth_family};
use fracsep::fracops::{TestClass, TestFunction};
use fracsep::pde::{classify_regime, InitialProfile, RegimeSpec};
use fracsep::process::{BarrierSpec, SlowSet, SimOptions};
use sha2::{Digest, Sha256};
use thiserror::Error;
use toml::Value;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("config is not valid TOML: {0}")]
    Syntax(String),
    #[error("{} config error(s):\n  {}", .0.len(), .0.join("\n  "))]
    Invalid(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BarrierTag {
    None,
    Thick,
    Thin,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BarrierConfig {
    pub kind: BarrierTag,
    /// `None` selects the bonds `{x, 0}`, `x < 0`; otherwise an explicit list.
    pub bonds: Option<Vec<(i64, i64)>>,
    pub delta: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// The family of the regime's test class.
    Auto,
    Smooth,
    Robin,
    SlopedRobin,
    Robin0,
    Neumann,
}

const FAMILIES: [(&str, Family); 6] = [
    ("auto", Family::Auto),
    ("smooth", Family::Smooth),
    ("robin", Family::Robin),
    ("sloped_robin", Family::SlopedRobin),
    ("robin0", Family::Robin0),
    ("neumann", Family::Neumann),
];

#[derive(Clone, Debug, PartialEq)]
pub struct TestFunctionConfig {
    pub family: Family,
    /// Preset names to keep; empty keeps the whole family.
    pub names: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareConfig {
    /// Reference grid; `None` means four times the largest simulated `n`.
    pub n_ref: Option<u64>,
    pub half_width: f64,
    /// Solve the reference with a thick barrier of this `β` instead (negative control).
    pub reference_beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyConfig {
    /// Random densities for the moving-particle ratio.
    pub samples: usize,
    /// Random densities for the Dirichlet identity.
    pub densities: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub barrier: BarrierConfig,
    pub n_list: Vec<u64>,
    pub replicas: usize,
    /// Horizon `T`.
    pub horizon: f64,
    /// Observation times in `(0, T]`.
    pub times: Vec<f64>,
    pub profile: InitialProfile,
    pub test_functions: TestFunctionConfig,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
    pub event_budget: u64,
    pub compare: CompareConfig,
    pub verify: VerifyConfig,
}

pub const DEFAULT_N_LIST: [u64; 3] = [64, 128, 256];
pub const DEFAULT_REPLICAS: usize = 100;
pub const DEFAULT_HORIZON: f64 = 0.5;
pub const DEFAULT_TIME_COUNT: usize = 5;

/// Key-value pairs of the flattened document, consumed as they are read.
struct Doc {
    map: BTreeMap<String, Value>,
    errors: Vec<String>,
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::String(_) => "string",
        Value::Integer(_) => "integer",
        Value::Float(_) => "float",
        Value::Boolean(_) => "boolean",
        Value::Datetime(_) => "datetime",
        Value::Array(_) => "array",
        Value::Table(_) => "table",
    }
}

impl Doc {
    fn flatten(prefix: &str, table: toml::Table, map: &mut BTreeMap<String, Value>, errors: &mut Vec<String>) {
        for (k, v) in table {
            let key = if prefix.is_empty() { k } else { format!("{prefix}.{k}") };
            match v {
                Value::Table(t) => Self::flatten(&key, t, map, errors),
                Value::Array(a) if a.iter().any(|x| matches!(x, Value::Array(_) | Value::Table(_))) => {
                    errors.push(format!("{key}: only lists of scalars are allowed"));
                }
                other => {
                    map.insert(key, other);
                }
            }
        }
    }

    fn float(&mut self, key: &str) -> Option<f64> {
        match self.map.remove(key)? {
            Value::Float(f) => Some(f),
            Value::Integer(i) => Some(i as f64),
            other => {
                self.errors.push(format!("{key}: expected a number, got {}", type_name(&other)));
                None
            }
        }
    }

    fn int(&mut self, key: &str) -> Option<i64> {
        match self.map.remove(key)? {
            Value::Integer(i) => Some(i),
            other => {
                self.errors.push(format!("{key}: expected an integer, got {}", type_name(&other)));
                None
            }
        }
    }

    fn uint(&mut self, key: &str) -> Option<u64> {
        let v = self.int(key)?;
        if v < 0 {
            self.errors.push(format!("{key}: must be non-negative, got {v}"));
            return None;
        }
        Some(v as u64)
    }

    /// TOML integers stop at `i64::MAX`; larger seeds are written as decimal strings.
    fn seed(&mut self) -> u64 {
        match self.map.remove("seed") {
            None => 0,
            Some(Value::Integer(i)) if i >= 0 => i as u64,
            Some(Value::String(s)) => s.parse().unwrap_or_else(|_| {
                self.errors.push(format!("seed: '{s}' is not a 64-bit unsigned integer"));
                0
            }),
            Some(other) => {
                self.errors.push(format!("seed: expected a non-negative integer, got {other}"));
                0
            }
        }
    }

    fn string(&mut self, key: &str) -> Option<String> {
        match self.map.remove(key)? {
            Value::String(s) => Some(s),
            other => {
                self.errors.push(format!("{key}: expected a string, got {}", type_name(&other)));
                None
            }
        }
    }

    fn list(&mut self, key: &str) -> Option<Vec<Value>> {
        match self.map.remove(key)? {
            Value::Array(a) => Some(a),
            other => {
                self.errors.push(format!("{key}: expected a list, got {}", type_name(&other)));
                None
            }
        }
    }

    fn float_list(&mut self, key: &str) -> Option<Vec<f64>> {
        let items = self.list(key)?;
        let mut out = Vec::with_capacity(items.len());
        for v in items {
            match v {
                Value::Float(f) => out.push(f),
                Value::Integer(i) => out.push(i as f64),
                other => {
                    self.errors.push(format!("{key}: expected numbers, got {}", type_name(&other)));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn int_list(&mut self, key: &str) -> Option<Vec<i64>> {
        let items = self.list(key)?;
        let mut out = Vec::with_capacity(items.len());
        for v in items {
            match v {
                Value::Integer(i) => out.push(i),
                other => {
                    self.errors.push(format!("{key}: expected integers, got {}", type_name(&other)));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn string_list(&mut self, key: &str) -> Option<Vec<String>> {
        let items = self.list(key)?;
        let mut out = Vec::with_capacity(items.len());
        for v in items {
            match v {
                Value::String(s) => out.push(s),
                other => {
                    self.errors.push(format!("{key}: expected strings, got {}", type_name(&other)));
                    return None;
                }
            }
        }
        Some(out)
    }

    fn require(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.errors.push(message());
        }
    }
}

fn parse_profile(doc: &mut Doc) -> InitialProfile {
    let kind = doc.string("profile.kind").unwrap_or_else(|| "step".into());
    let mut f = |key: &str, default: f64| doc.float(&format!("profile.{key}")).unwrap_or(default);
    match kind.as_str() {
        "constant" => InitialProfile::Constant { a: f("a", 0.5) },
        "step" => InitialProfile::Step { left: f("left", 0.8), right: f("right", 0.2) },
        "window_step" => InitialProfile::WindowStep {
            left: f("left", 0.8),
            right: f("right", 0.2),
            outside: f("outside", 0.5),
            half_width: f("half_width", 1.0),
        },
        "bump" => InitialProfile::Bump {
            base: f("base", 0.3),
            height: f("height", 0.4),
            center: f("center", 0.0),
            radius: f("radius", 0.5),
        },
        other => {
            doc.errors.push(format!("profile.kind: unknown profile '{other}' (constant, step, window_step, bump)"));
            InitialProfile::Constant { a: 0.5 }
        }
    }
}

fn parse_barrier(doc: &mut Doc) -> BarrierConfig {
    let kind = match doc.string("barrier.kind").as_deref() {
        None | Some("thick") => BarrierTag::Thick,
        Some("none") => BarrierTag::None,
        Some("thin") => BarrierTag::Thin,
        Some(other) => {
            doc.errors.push(format!("barrier.kind: unknown barrier '{other}' (none, thick, thin)"));
            BarrierTag::Thick
        }
    };
    let set = doc.string("barrier.slow_set");
    let flat = doc.int_list("barrier.bonds");
    let bonds = match (set.as_deref(), flat) {
        (None | Some("touching_origin"), None) => None,
        (Some("touching_origin"), Some(_)) => {
            doc.errors.push("barrier.bonds: only used with barrier.slow_set = \"bonds\"".into());
            None
        }
        (None | Some("bonds"), Some(flat)) => {
            if flat.len() % 2 != 0 {
                doc.errors.push("barrier.bonds: expected an even number of entries x1, y1, x2, y2, ...".into());
                None
            } else {
                Some(flat.chunks(2).map(|c| (c[0], c[1])).collect())
            }
        }
        (Some("bonds"), None) => {
            doc.errors.push("barrier.bonds: required when barrier.slow_set = \"bonds\"".into());
            None
        }
        (Some(other), _) => {
            doc.errors.push(format!("barrier.slow_set: unknown set '{other}' (touching_origin, bonds)"));
            None
        }
    };
    let delta = doc.float("barrier.delta").unwrap_or(1.0);
    if kind != BarrierTag::Thin && (bonds.is_some() || set.is_some()) {
        doc.errors.push("barrier.slow_set and barrier.bonds apply to thin barriers only".into());
    }
    BarrierConfig { kind, bonds, delta }
}

/// Parses and validates a document, reporting every violation found.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Syntax(e.message().to_string()))?;
    let mut doc = Doc { map: BTreeMap::new(), errors: Vec::new() };
    Doc::flatten("", table, &mut doc.map, &mut doc.errors);

    let gamma = doc.float("gamma");
    if gamma.is_none() && !doc.errors.iter().any(|e| e.starts_with("gamma")) {
        doc.errors.push("gamma: required".into());
    }
    let gamma = gamma.unwrap_or(1.5);
    doc.require(gamma > 0.0 && gamma < 2.0, || format!("gamma: must lie in (0, 2), got {gamma}"));
    let alpha = doc.float("alpha").unwrap_or(1.0);
    doc.require(alpha > 0.0 && alpha.is_finite(), || format!("alpha: must be positive, got {alpha}"));
    let beta = doc.float("beta").unwrap_or(0.0);
    doc.require(beta >= 0.0 && beta.is_finite(), || format!("beta: must be non-negative, got {beta}"));
    let barrier = parse_barrier(&mut doc);

    let n_list: Vec<u64> = match doc.int_list("n_list") {
        Some(v) => {
            doc.require(!v.is_empty(), || "n_list: must not be empty".into());
            doc.require(v.iter().all(|&n| n >= 1), || "n_list: entries must be at least 1".into());
            doc.require(v.windows(2).all(|w| w[1] > w[0]), || "n_list: must be strictly increasing".into());
            v.into_iter().map(|n| n.max(1) as u64).collect()
        }
        None => DEFAULT_N_LIST.to_vec(),
    };
    let replicas = doc.uint("replicas").unwrap_or(DEFAULT_REPLICAS as u64) as usize;
    doc.require(replicas >= 1, || "replicas: must be at least 1".into());
    let horizon = doc.float("T").unwrap_or(DEFAULT_HORIZON);
    doc.require(horizon > 0.0 && horizon.is_finite(), || format!("T: must be positive, got {horizon}"));
    let times = doc.float_list("times").unwrap_or_else(|| {
        // The last time is `T` itself; `T·k/K` can overshoot by one ulp.
        (1..=DEFAULT_TIME_COUNT).map(|k| (horizon * k as f64 / DEFAULT_TIME_COUNT as f64).min(horizon)).collect()
    });
    doc.require(!times.is_empty(), || "times: must not be empty".into());
    doc.require(times.iter().all(|&t| t > 0.0 && t <= horizon), || format!("times: must lie in (0, T = {horizon}]"));
    doc.require(times.windows(2).all(|w| w[1] > w[0]), || "times: must be strictly increasing".into());

    let profile = parse_profile(&mut doc);
    if let Err(e) = profile.validate() {
        doc.errors.push(format!("profile: {e}"));
    }
    let family = match doc.string("test_functions.family") {
        None => Family::Auto,
        Some(s) => FAMILIES.iter().find(|f| f.0 == s).map(|f| f.1).unwrap_or_else(|| {
            doc.errors.push(format!("test_functions.family: unknown family '{s}'"));
            Family::Auto
        }),
    };
    let names = doc.string_list("test_functions.names").unwrap_or_default();
    let seed = doc.seed();
    let output_dir = doc.string("output_dir").map(PathBuf::from);
    let event_budget = doc.uint("event_budget").unwrap_or(SimOptions::default().event_budget);
    doc.require(event_budget >= 1, || "event_budget: must be at least 1".into());

    let n_ref = doc.uint("compare.n_ref");
    doc.require(n_ref.is_none_or(|r| n_list.iter().all(|&n| n <= r)), || {
        "compare.n_ref: must be at least the largest n".into()
    });
    let half_width = doc.float("compare.half_width").unwrap_or(2.0);
    doc.require(half_width > 0.0 && half_width.is_finite(), || format!("compare.half_width: must be positive, got {half_width}"));
    let reference_beta = doc.float("compare.reference_beta");
    doc.require(reference_beta.is_none_or(|b| b >= 0.0), || "compare.reference_beta: must be non-negative".into());
    let samples = doc.uint("verify.samples").unwrap_or(1000) as usize;
    let densities = doc.uint("verify.densities").unwrap_or(100) as usize;
    doc.require(samples >= 1 && densities >= 1, || "verify.samples and verify.densities must be at least 1".into());

    let unknown: Vec<String> = doc.map.keys().cloned().collect();
    if !unknown.is_empty() {
        doc.errors.push(format!("unknown keys: {}", unknown.join(", ")));
    }
    let config = ExperimentConfig {
        gamma,
        alpha,
        beta,
        barrier,
        n_list,
        replicas,
        horizon,
        times,
        profile,
        test_functions: TestFunctionConfig { family, names },
        seed,
        output_dir,
        event_budget,
        compare: CompareConfig { n_ref, half_width, reference_beta },
        verify: VerifyConfig { samples, densities },
    };
    // Checks on the assembled barrier need valid model parameters; the test-function check
    // needs everything else valid too.
    let model_ok = !doc.errors.iter().any(|e| ["gamma", "alpha", "beta", "barrier"].iter().any(|k| e.starts_with(k)));
    if model_ok {
        let others_ok = doc.errors.is_empty();
        match config.barrier_spec() {
            Ok(b) => {
                if let Err(e) = classify_regime(gamma, &b) {
                    doc.errors.push(format!("regime: {e}"));
                } else if others_ok {
                    if let Err(e) = config.tests() {
                        doc.errors.push(format!("test_functions: {e}"));
                    }
                }
            }
            Err(e) => doc.errors.push(e),
        }
    }
    if doc.errors.is_empty() {
        Ok(config)
    } else {
        Err(ConfigError::Invalid(doc.errors))
    }
}

fn float(v: f64) -> String {
    // Debug keeps a decimal point or exponent, so the value reads back as a TOML float.
    format!("{v:?}")
}

fn quote(s: &str) -> String {
    Value::String(s.to_string()).to_string()
}

impl ExperimentConfig {
    pub fn barrier_spec(&self) -> Result<BarrierSpec, String> {
        let b = match self.barrier.kind {
            BarrierTag::None => Ok(BarrierSpec::none()),
            BarrierTag::Thick => BarrierSpec::thick(self.alpha, self.beta),
            BarrierTag::Thin => {
                let slow = match &self.barrier.bonds {
                    None => SlowSet::TouchingOrigin,
                    Some(list) => SlowSet::Bonds(list.clone()),
                };
                BarrierSpec::thin(slow, self.barrier.delta, self.alpha, self.beta, self.gamma)
            }
        };
        b.map_err(|e| e.to_string())
    }

    pub fn regime(&self) -> Result<RegimeSpec, String> {
        classify_regime(self.gamma, &self.barrier_spec()?).map_err(|e| e.to_string())
    }

    /// The configured test functions, checked against the regime's test class.
    pub fn tests(&self) -> Result<Vec<TestFunction<f64>>, String> {
        let regime = self.regime()?;
        let family = match self.test_functions.family {
            Family::Auto => match regime.test_class {
                TestClass::Dif => Family::Smooth,
                TestClass::Rob => Family::Robin,
                TestClass::Rob0 => Family::Robin0,
                TestClass::Neu => Family::Neumann,
            },
            f => f,
        };
        let all = match family {
            Family::Smooth | Family::Auto => smooth_family(),
            Family::Robin => robin_family(),
            Family::SlopedRobin => sloped_robin_family(),
            Family::Robin0 => robin0_family(),
            Family::Neumann => neumann_family(),
        }
        .map_err(|e| e.to_string())?;
        let names = &self.test_functions.names;
        if let Some(missing) = names.iter().find(|n| !all.iter().any(|g| g.name() == n.as_str())) {
            return Err(format!("no preset named '{missing}' in the chosen family"));
        }
        let chosen: Vec<_> = all.into_iter().filter(|g| names.is_empty() || names.iter().any(|n| n == g.name())).collect();
        if let Some(g) = chosen.iter().find(|g| !regime.test_class.admits(g.class())) {
            return Err(format!("{} is {:?}, outside the regime's class {:?}", g.name(), g.class(), regime.test_class));
        }
        Ok(chosen)
    }

    pub fn n_ref(&self) -> u64 {
        self.compare.n_ref.unwrap_or(4 * self.n_list.iter().max().copied().unwrap_or(64))
    }

    /// Canonical document: every key, fixed order.
    pub fn to_toml(&self) -> String {
        let mut s = String::new();
        let mut line = |k: &str, v: String| {
            writeln!(s, "{k} = {v}").expect("string write");
        };
        let floats = |v: &[f64]| format!("[{}]", v.iter().map(|x| float(*x)).collect::<Vec<_>>().join(", "));
        line("gamma", float(self.gamma));
        line("alpha", float(self.alpha));
        line("beta", float(self.beta));
        line("n_list", format!("[{}]", self.n_list.iter().map(u64::to_string).collect::<Vec<_>>().join(", ")));
        line("replicas", self.replicas.to_string());
        line("T", float(self.horizon));
        line("times", floats(&self.times));
        line("seed", if self.seed <= i64::MAX as u64 { self.seed.to_string() } else { quote(&self.seed.to_string()) });
        line("event_budget", self.event_budget.to_string());
        if let Some(dir) = &self.output_dir {
            line("output_dir", quote(&dir.to_string_lossy()));
        }
        let kind = match self.barrier.kind {
            BarrierTag::None => "none",
            BarrierTag::Thick => "thick",
            BarrierTag::Thin => "thin",
        };
        line("barrier.kind", quote(kind));
        line("barrier.delta", float(self.barrier.delta));
        if self.barrier.kind == BarrierTag::Thin {
            match &self.barrier.bonds {
                None => line("barrier.slow_set", quote("touching_origin")),
                Some(list) => {
                    line("barrier.slow_set", quote("bonds"));
                    let flat: Vec<String> = list.iter().flat_map(|(x, y)| [x.to_string(), y.to_string()]).collect();
                    line("barrier.bonds", format!("[{}]", flat.join(", ")));
                }
            }
        }
        match self.profile {
            InitialProfile::Constant { a } => {
                line("profile.kind", quote("constant"));
                line("profile.a", float(a));
            }
            InitialProfile::Step { left, right } => {
                line("profile.kind", quote("step"));
                line("profile.left", float(left));
                line("profile.right", float(right));
            }
            InitialProfile::WindowStep { left, right, outside, half_width } => {
                line("profile.kind", quote("window_step"));
                line("profile.left", float(left));
                line("profile.right", float(right));
                line("profile.outside", float(outside));
                line("profile.half_width", float(half_width));
            }
            InitialProfile::Bump { base, height, center, radius } => {
                line("profile.kind", quote("bump"));
                line("profile.base", float(base));
                line("profile.height", float(height));
                line("profile.center", float(center));
                line("profile.radius", float(radius));
            }
        }
        let family = FAMILIES.iter().find(|f| f.1 == self.test_functions.family).expect("listed").0;
        line("test_functions.family", quote(family));
        line(
            "test_functions.names",
            format!("[{}]", self.test_functions.names.iter().map(|n| quote(n)).collect::<Vec<_>>().join(", ")),
        );
        if let Some(r) = self.compare.n_ref {
            line("compare.n_ref", r.to_string());
        }
        line("compare.half_width", float(self.compare.half_width));
        if let Some(b) = self.compare.reference_beta {
            line("compare.reference_beta", float(b));
        }
        line("verify.samples", self.verify.samples.to_string());
        line("verify.densities", self.verify.densities.to_string());
        s
    }

    /// SHA-256 of [`ExperimentConfig::to_toml`], lowercase hex.
    pub fn hash(&self) -> String {
        hash_text(&self.to_toml())
    }
}

pub fn hash_text(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

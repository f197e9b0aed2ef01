//! Run configuration: a flat key-value JSON file overridden by CLI flags, and
//! the single place where the default tolerances live.

use baxterq::grading::{GradingSignature, TwistConfig};
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::PathBuf;

#[derive(Debug, Clone)]
pub struct Tolerances {
    pub ybe: f64,
    pub commutativity: f64,
    pub qq: f64,
    pub tqq: f64,
    pub xqqq: f64,
    pub factorization: f64,
    pub traces: f64,
    pub spectrum_energy: f64,
    pub bethe: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ybe: 1e-11,
            commutativity: 1e-10,
            qq: 1e-9,
            tqq: 1e-10,
            xqqq: 1e-8,
            factorization: 1e-10,
            traces: 1e-6,
            spectrum_energy: 1e-7,
            bethe: 1e-7,
        }
    }
}

impl Tolerances {
    pub fn entries(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("ybe", self.ybe),
            ("commutativity", self.commutativity),
            ("qq", self.qq),
            ("tqq", self.tqq),
            ("xqqq", self.xqqq),
            ("factorization", self.factorization),
            ("traces", self.traces),
            ("spectrum_energy", self.spectrum_energy),
            ("bethe", self.bethe),
        ]
    }

    pub fn override_all(&mut self, tol: f64) {
        self.ybe = tol;
        self.commutativity = tol;
        self.qq = tol;
        self.tqq = tol;
        self.xqqq = tol;
        self.factorization = tol;
        self.traces = tol;
        self.spectrum_energy = tol;
        self.bethe = tol;
    }
}

/// Twist selection: the generic default or an explicit list in radians.
#[derive(Debug, Clone)]
pub enum TwistMode {
    Generic,
    Zero,
    Explicit(Vec<f64>),
}

impl TwistMode {
    pub fn parse(s: &str) -> Result<Self, String> {
        match s {
            "generic" => Ok(TwistMode::Generic),
            "zero" => Ok(TwistMode::Zero),
            other => {
                let vals: Result<Vec<f64>, _> =
                    other.split(',').map(|p| p.trim().parse::<f64>()).collect();
                vals.map(TwistMode::Explicit)
                    .map_err(|e| format!("twists: expected 'generic', 'zero', or a comma list of radians: {e}"))
            }
        }
    }

    pub fn realize(&self, sig: GradingSignature) -> Result<TwistConfig, String> {
        match self {
            TwistMode::Generic => Ok(TwistConfig::generic(sig)),
            TwistMode::Zero => Ok(TwistConfig::zero(sig)),
            TwistMode::Explicit(v) => {
                if v.len() != sig.dim() {
                    return Err(format!(
                        "twists: expected {} angles for {}, got {}",
                        sig.dim(),
                        sig,
                        v.len()
                    ));
                }
                Ok(TwistConfig::new(v.clone()))
            }
        }
    }
}

/// Merged configuration for one invocation.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub n: usize,
    pub m: usize,
    pub chain_len: usize,
    pub twists: TwistMode,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub tolerances: Tolerances,
}

/// Flat key-value config file content.
pub fn load_config_file(path: &PathBuf) -> Result<BTreeMap<String, Value>, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("config {}: {e}", path.display()))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))?;
    match value {
        Value::Object(map) => Ok(map.into_iter().collect()),
        _ => Err(format!(
            "config {}: expected a flat JSON object",
            path.display()
        )),
    }
}

pub struct ConfigBuilder {
    file: BTreeMap<String, Value>,
}

impl ConfigBuilder {
    pub fn new(file: Option<BTreeMap<String, Value>>) -> Self {
        Self {
            file: file.unwrap_or_default(),
        }
    }

    pub fn usize_field(&self, key: &str, flag: Option<usize>, default: usize) -> Result<usize, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            None => Ok(default),
            Some(Value::Number(x)) => x
                .as_u64()
                .map(|v| v as usize)
                .ok_or_else(|| format!("config field '{key}': expected a nonnegative integer")),
            Some(other) => Err(format!("config field '{key}': expected integer, got {other}")),
        }
    }

    pub fn u64_field(&self, key: &str, flag: Option<u64>, default: u64) -> Result<u64, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            None => Ok(default),
            Some(Value::Number(x)) => x
                .as_u64()
                .ok_or_else(|| format!("config field '{key}': expected a nonnegative integer")),
            Some(other) => Err(format!("config field '{key}': expected integer, got {other}")),
        }
    }

    pub fn string_field(
        &self,
        key: &str,
        flag: Option<String>,
        default: &str,
    ) -> Result<String, String> {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            None => Ok(default.to_string()),
            Some(Value::String(s)) => Ok(s.clone()),
            Some(other) => Err(format!("config field '{key}': expected string, got {other}")),
        }
    }

    pub fn f64_field(&self, key: &str, flag: Option<f64>) -> Result<Option<f64>, String> {
        if let Some(v) = flag {
            return Ok(Some(v));
        }
        match self.file.get(key) {
            None => Ok(None),
            Some(Value::Number(x)) => Ok(x.as_f64()),
            Some(other) => Err(format!("config field '{key}': expected number, got {other}")),
        }
    }
}

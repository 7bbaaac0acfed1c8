use std::path::{Path, PathBuf};

use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::arith::{FnSpec, IdealFn, WModulus};
use crate::intpoly::{form_resultant, BinaryForm};
use crate::lattice2d::{hnf, Lattice2};
use crate::numfield::NumberField;
use crate::region::{Region, RegularityReport};
use crate::sieve::DEFAULT_ETA;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    pub path: PathBuf,
    #[serde(default = "default_format")]
    pub format: Format,
}

fn default_format() -> Format {
    Format::Json
}

/// Knobs of the lemma suites; every field has a default.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LemmaParams {
    /// Half-width of the square scanned by L23.
    pub box_size: i64,
    /// Largest ideal norm checked by L24.
    pub norm_bound: u64,
    /// Disc radii for L21.
    pub radii: Vec<f64>,
    /// Moduli q for L21.
    pub moduli: Vec<u64>,
    /// Residue x0 for L21 when q > 1.
    pub residue: (i64, i64),
    /// Bound on |exact - main| / error scale in L21.
    pub lattice_constant: f64,
    /// Norm bounds x for L22.
    pub xs: Vec<u64>,
    /// M of the companion function in L22.
    pub dagger_m: f64,
    /// Largest allowed ratio in L22.
    pub knut_cap: f64,
    /// Largest allowed growth factor between consecutive L22 rungs.
    pub knut_growth: f64,
    /// S and T of L32.
    pub s: f64,
    pub t: f64,
    /// Table size for u in L32.
    pub u_cap: u64,
    /// Largest allowed ratio in L32.
    pub l32_cap: f64,
}

impl Default for LemmaParams {
    fn default() -> Self {
        LemmaParams {
            box_size: 50,
            norm_bound: 200,
            radii: vec![100.0, 200.0, 400.0],
            moduli: vec![1, 3],
            residue: (1, 1),
            lattice_constant: 10.0,
            xs: vec![100, 1_000, 10_000],
            dagger_m: 2.0,
            knut_cap: 10.0,
            knut_growth: 1.25,
            s: 100.0,
            t: 1_000.0,
            u_cap: 100_000,
            l32_cap: 10.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub forms: Vec<BinaryForm>,
    pub functions: Vec<FnSpec>,
    pub region: Region,
    #[serde(default = "identity")]
    pub lattice: [[i64; 2]; 2],
    pub w: u64,
    pub omega: f64,
    #[serde(default = "default_eta")]
    pub eta: f64,
    pub c1: f64,
    pub c2: f64,
    pub epsilon: f64,
    /// Rescales the region to this area before anything else.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub volume: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<OutputSpec>,
    #[serde(default)]
    pub lemma: LemmaParams,
}

fn identity() -> [[i64; 2]; 2] {
    [[1, 0], [0, 1]]
}

fn default_eta() -> f64 {
    DEFAULT_ETA
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        serde_json::from_str(text).map_err(|e| HarnessError::Config(format!("invalid scenario: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }
}

/// A configuration with its fields, functions and lattice built and the
/// structural hypotheses checked.
#[derive(Debug)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub fields: Vec<NumberField>,
    pub fns: Vec<IdealFn>,
    pub region: Region,
    pub lattice: Lattice2,
    pub w: WModulus,
}

fn config_err<E: std::fmt::Display>(what: &str) -> impl Fn(E) -> HarnessError + '_ {
    move |e| HarnessError::Config(format!("{what}: {e}"))
}

impl Scenario {
    /// Checks: forms irreducible and pairwise coprime, one function per
    /// form, `w > |D_i|` and `w > |res(F_i, F_j)|`, nonsingular lattice.
    pub fn new(config: ScenarioConfig) -> Result<Self, HarnessError> {
        if config.forms.is_empty() {
            return Err(HarnessError::Config("at least one form is required".into()));
        }
        if config.forms.len() != config.functions.len() {
            return Err(HarnessError::Config(format!(
                "{} forms but {} functions",
                config.forms.len(),
                config.functions.len()
            )));
        }
        let mut fields = Vec::with_capacity(config.forms.len());
        for f in &config.forms {
            fields.push(NumberField::new(f.clone()).map_err(config_err(&format!("form {f}")))?);
        }
        let fns = config
            .functions
            .iter()
            .map(|s| s.build().map_err(config_err(&format!("function {}", s.name))))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, k) in fields.iter().enumerate() {
            let d = k.big_d().abs();
            if d.to_u64().is_none_or(|d| config.w <= d) {
                return Err(HarnessError::Config(format!(
                    "w = {} must exceed |D| = {d} for form {}",
                    config.w, config.forms[i]
                )));
            }
        }
        for i in 0..config.forms.len() {
            for j in i + 1..config.forms.len() {
                let r = form_resultant(&config.forms[i], &config.forms[j]).abs();
                if r == 0.into() {
                    return Err(HarnessError::Config(format!(
                        "forms {} and {} share a factor",
                        config.forms[i], config.forms[j]
                    )));
                }
                if r.to_u64().is_none_or(|r| config.w <= r) {
                    return Err(HarnessError::Config(format!(
                        "w = {} must exceed |res| = {r} for forms {} and {}",
                        config.w, config.forms[i], config.forms[j]
                    )));
                }
            }
        }
        let lattice = hnf(config.lattice).map_err(config_err("lattice"))?;
        let region = match config.volume {
            Some(v) if !(v > 0.0 && v.is_finite()) => {
                return Err(HarnessError::Config(format!("volume must be positive, got {v}")))
            }
            Some(v) => config.region.with_volume(v),
            None => config.region.clone(),
        };
        region.validate().map_err(config_err("region"))?;
        let w = WModulus::new(config.w);
        Ok(Scenario { config, fields, fns, region, lattice, w })
    }

    pub fn from_path(path: &Path) -> Result<Self, HarnessError> {
        Scenario::new(ScenarioConfig::load(path)?)
    }

    /// The same scenario with the region rescaled to area `v`.
    pub fn at_volume(&self, v: f64) -> Result<Scenario, HarnessError> {
        let mut cfg = self.config.clone();
        cfg.volume = Some(v);
        Scenario::new(cfg)
    }

    pub fn field_refs(&self) -> Vec<&NumberField> {
        self.fields.iter().collect()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.fields.iter().map(|k| k.degree()).collect()
    }

    /// Hypotheses of the theorem run: regular region, `q_G <= V^c2`, `V > e`,
    /// and admissible `omega`, `eta`, `c1`, `c2`, `epsilon`.
    pub fn check_theorem_hypotheses(&self) -> Result<RegularityReport, HarnessError> {
        let c = &self.config;
        for (name, v) in [("c1", c.c1), ("c2", c.c2), ("epsilon", c.epsilon)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(HarnessError::Config(format!("{name} must be positive, got {v}")));
            }
        }
        if !(c.omega > 0.0 && c.omega < 1.0) || !(c.eta > 0.0 && c.eta < 1.0) {
            return Err(HarnessError::Config("omega and eta must lie in (0, 1)".into()));
        }
        let v = self.region.vol();
        if v <= std::f64::consts::E {
            return Err(HarnessError::Config(format!("volume {v} must exceed e")));
        }
        if self.lattice.det() as f64 > v.powf(c.c2) {
            return Err(HarnessError::Config(format!(
                "q_G = {} exceeds V^c2 = {}",
                self.lattice.det(),
                v.powf(c.c2)
            )));
        }
        let forms: Vec<BinaryForm> = c.forms.clone();
        let reg = self.region.is_regular(&forms, c.c1);
        if !reg.regular {
            let why = if reg.contains_origin {
                "region contains the origin".to_string()
            } else if !reg.zero_line_hits.is_empty() {
                format!("region meets a zero-line of forms {:?}", reg.zero_line_hits)
            } else {
                format!("vol = {} is below K_R^c1 = {}", reg.vol, reg.k_r_pow_c1)
            };
            return Err(HarnessError::Config(format!("region is not regular: {why}")));
        }
        Ok(reg)
    }
}

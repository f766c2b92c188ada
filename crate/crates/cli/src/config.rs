//! Run configuration: a TOML file plus `key=value` overrides.
//!
//! ```toml
//! seed = 0
//! workers = 0            # 0 = one per core
//! output_dir = "out"
//!
//! [grid]                 # spatial box on the slice t
//! t = 0.0
//! lo = [-2.0, -2.0, -2.0]
//! hi = [2.0, 2.0, 2.0]
//! n = [16, 16, 16]
//! times = [0.0]          # caustics: slices to track (default [t])
//!
//! [tolerances]           # any field of adw_core::Tolerances
//! locus_tol = 1e-8
//!
//! [congruence]
//! pi = "G*t1 - t2"       # over G, t1, t2
//! kerr_a = 0.0           # shifts z -> z + i a
//!
//! [caustics]
//! pi = "G*t1 - t2"
//! kerr_a = 1.0
//! pair = "kerr-a1"       # bundled pair, or give pi1/pi2 over xi0, xi1, tau0, tau1
//!
//! [fields]
//! source = "static"      # static | kerr | screw
//! kerr_a = 0.5
//! branch = 1.0           # sign of the root branch
//! components = ["E", "H"]
//! charge_radii = [0.5, 1.0, 2.0]
//! quadrature_order = 32
//!
//! [uwl]
//! worldline = ["s", "s^2", "0", "0"]   # x^mu(s)
//! observer = ["s", "2", "0", "0"]      # X^mu(s), evaluated at s = tau
//! tau = [0.0, 10.0]
//! samples = 200
//! implicit = ["x^2 - t", "y", "z"]     # optional, over t, x, y, z
//! times = [-1.0, 1.0]
//!
//! [render]
//! source = "screw"
//! radius = 1.0
//! n_theta = 13
//! n_phi = 24
//! file = "polarization.svg"
//! ```

use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use adw_core::congruence::BUNDLED_PAIRS;
use adw_core::Tolerances;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Congruence,
    Caustics,
    Fields,
    Uwl,
    Render,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Congruence => "congruence",
            Mode::Caustics => "caustics",
            Mode::Fields => "fields",
            Mode::Uwl => "uwl",
            Mode::Render => "render",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub mode: Option<Mode>,
    #[serde(default)]
    pub seed: u64,
    /// Thread count for grid sweeps; results do not depend on it.
    #[serde(default, skip_serializing)]
    pub workers: usize,
    /// Not part of the run identity: excluded from the hash and manifest.
    #[serde(default = "default_output_dir", skip_serializing)]
    pub output_dir: String,
    #[serde(default)]
    pub grid: GridSpec,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub congruence: Option<CongruenceSpec>,
    #[serde(default)]
    pub caustics: Option<CausticsSpec>,
    #[serde(default)]
    pub fields: Option<FieldsSpec>,
    #[serde(default)]
    pub uwl: Option<UwlSpec>,
    #[serde(default)]
    pub render: Option<RenderSpec>,
}

fn default_output_dir() -> String {
    "out".into()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub t: f64,
    pub lo: [f64; 3],
    pub hi: [f64; 3],
    pub n: [usize; 3],
    pub times: Option<Vec<f64>>,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { t: 0.0, lo: [-2.0; 3], hi: [2.0; 3], n: [16; 3], times: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CongruenceSpec {
    pub pi: String,
    #[serde(default)]
    pub kerr_a: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CausticsSpec {
    #[serde(default)]
    pub pi: Option<String>,
    #[serde(default)]
    pub kerr_a: f64,
    #[serde(default)]
    pub pair: Option<String>,
    #[serde(default)]
    pub pi1: Option<String>,
    #[serde(default)]
    pub pi2: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldSource {
    Static,
    Kerr,
    Screw,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldsSpec {
    pub source: FieldSource,
    #[serde(default)]
    pub kerr_a: f64,
    #[serde(default = "one")]
    pub branch: f64,
    #[serde(default = "default_components")]
    pub components: Vec<String>,
    #[serde(default)]
    pub charge_radii: Vec<f64>,
    #[serde(default = "default_order")]
    pub quadrature_order: usize,
}

fn one() -> f64 {
    1.0
}

fn default_components() -> Vec<String> {
    vec!["E".into(), "H".into()]
}

fn default_order() -> usize {
    32
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UwlSpec {
    pub worldline: [String; 4],
    pub observer: [String; 4],
    #[serde(default = "default_tau")]
    pub tau: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub implicit: Option<[String; 3]>,
    #[serde(default)]
    pub times: Option<[f64; 2]>,
}

fn default_tau() -> [f64; 2] {
    [0.0, 10.0]
}

fn default_samples() -> usize {
    200
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenderSpec {
    #[serde(default = "default_render_source")]
    pub source: FieldSource,
    #[serde(default)]
    pub kerr_a: f64,
    #[serde(default = "one")]
    pub radius: f64,
    #[serde(default = "default_n_theta")]
    pub n_theta: usize,
    #[serde(default = "default_n_phi")]
    pub n_phi: usize,
    #[serde(default = "default_svg")]
    pub file: String,
}

fn default_render_source() -> FieldSource {
    FieldSource::Screw
}

fn default_n_theta() -> usize {
    13
}

fn default_n_phi() -> usize {
    24
}

fn default_svg() -> String {
    "polarization.svg".into()
}

/// Parses `value` as a TOML value, falling back to a bare string.
fn override_value(value: &str) -> toml::Value {
    match format!("v = {value}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").expect("key just written"),
        Err(_) => toml::Value::String(value.to_string()),
    }
}

/// Applies `a.b.c=value` to the table, creating intermediate tables.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<(), CliError> {
    let (key, value) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override `{assignment}` is not of the form key=value")))?;
    let path: Vec<&str> = key.trim().split('.').collect();
    if path.iter().any(|p| p.is_empty()) {
        return Err(CliError::Config(format!("override key `{key}` has an empty segment")));
    }
    let mut cur = table;
    for seg in &path[..path.len() - 1] {
        let entry = cur.entry(seg.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| CliError::Config(format!("override `{key}`: `{seg}` is not a table")))?;
    }
    cur.insert(path[path.len() - 1].to_string(), override_value(value.trim()));
    Ok(())
}

impl RunConfig {
    pub fn from_toml_str(text: &str, overrides: &[String]) -> Result<Self, CliError> {
        let err = |e: toml::de::Error| CliError::Config(e.to_string());
        // Straight from the text when possible, so errors carry line numbers.
        let mut cfg: RunConfig = if overrides.is_empty() {
            toml::from_str(text).map_err(err)?
        } else {
            let mut table: toml::Table = text.parse().map_err(err)?;
            for o in overrides {
                apply_override(&mut table, o)?;
            }
            table.try_into().map_err(err)?
        };
        cfg.tolerances.seed = cfg.seed;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[String]) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_toml_str(&text, overrides)
    }

    /// Checks that the section required by `mode` is present and the grid is usable.
    pub fn validate(&self, mode: Mode) -> Result<(), CliError> {
        if let Some(m) = self.mode {
            if m != mode {
                return Err(CliError::Config(format!(
                    "config declares mode `{}` but `{}` was requested",
                    m.name(),
                    mode.name()
                )));
            }
        }
        let g = &self.grid;
        for a in 0..3 {
            if g.n[a] == 0 || !(g.hi[a] > g.lo[a]) && g.n[a] > 1 {
                return Err(CliError::Config(format!("grid: axis {a} needs n > 0 and hi > lo")));
            }
        }
        let missing = |s: &str| CliError::Config(format!("mode `{}` requires a [{s}] section", mode.name()));
        match mode {
            Mode::Congruence => self.congruence.as_ref().map(|_| ()).ok_or_else(|| missing("congruence")),
            Mode::Caustics => {
                let c = self.caustics.as_ref().ok_or_else(|| missing("caustics"))?;
                if c.pi.is_none() && c.pair.is_none() && c.pi1.is_none() {
                    return Err(CliError::Config("caustics: give `pi`, `pair`, or `pi1`/`pi2`".into()));
                }
                if let Some(name) = &c.pair {
                    if !BUNDLED_PAIRS.iter().any(|b| b.name == name) {
                        let names: Vec<_> = BUNDLED_PAIRS.iter().map(|b| b.name).collect();
                        return Err(CliError::Config(format!(
                            "caustics.pair: unknown pair `{name}`; bundled pairs are {names:?}"
                        )));
                    }
                }
                if c.pi1.is_some() != c.pi2.is_some() {
                    return Err(CliError::Config("caustics: `pi1` and `pi2` must be given together".into()));
                }
                Ok(())
            }
            Mode::Fields => {
                let f = self.fields.as_ref().ok_or_else(|| missing("fields"))?;
                for c in &f.components {
                    if !matches!(c.as_str(), "E" | "H" | "C") {
                        return Err(CliError::Config(format!("fields.components: unknown component `{c}`")));
                    }
                }
                Ok(())
            }
            Mode::Uwl => {
                let u = self.uwl.as_ref().ok_or_else(|| missing("uwl"))?;
                if u.samples < 2 || !(u.tau[1] > u.tau[0]) {
                    return Err(CliError::Config("uwl: need samples >= 2 and tau[1] > tau[0]".into()));
                }
                if let Some([a, b]) = u.times {
                    if !(b > a) {
                        return Err(CliError::Config("uwl.times: need times[1] > times[0]".into()));
                    }
                }
                Ok(())
            }
            Mode::Render => {
                let r = self.render.as_ref().ok_or_else(|| missing("render"))?;
                if r.n_theta == 0 || r.n_phi == 0 || !(r.radius > 0.0) {
                    return Err(CliError::Config("render: need n_theta, n_phi > 0 and radius > 0".into()));
                }
                Ok(())
            }
        }
    }
}

//! Run configuration: a JSON document whose fields flags may override.
//!
//! After [`RunConfig::resolve`] every optional field the selected mode needs
//! is filled in, so serializing the resolved record reproduces the run.

use std::path::{Path, PathBuf};

use gauge_sim::dynamics::{GridSpec, ZbHamiltonianSpec, DEFAULT_DT, DEFAULT_N_MAX, DEFAULT_T_MAX};
use gauge_sim::gauge::{couplings, FieldConfiguration, Mat3, PhysicalConstants, PhysicalParams, Preset, Vec3};
use gauge_sim::hilbert::BasisSpec;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const CONSTANTS_ENV: &str = "GAUGE_SIM_CONSTANTS";
pub const DEFAULT_STATE: &str = "fock(0,0,+)";
pub const DEFAULT_K: usize = 20;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<FieldBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub atom: Option<AtomBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimensionless: Option<DimensionlessBlock>,
    #[serde(default)]
    pub basis: BasisBlock,
    #[serde(default)]
    pub experiment: ExperimentBlock,
    #[serde(default)]
    pub output: OutputBlock,
}

/// Either `preset` with `b_prime` (T/m) or an explicit `gradient` (T/m).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b_prime: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gradient: Option<Mat3>,
    /// B(0), T.
    #[serde(default)]
    pub uniform: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomBlock {
    /// kg
    pub mass: f64,
    /// Trap angular frequency, rad/s.
    pub omega: f64,
    #[serde(default = "default_g")]
    pub g_factor: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constants: Option<PhysicalConstants>,
}

fn default_g() -> f64 {
    2.0
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionlessBlock {
    #[serde(default)]
    pub b1: f64,
    #[serde(default)]
    pub b0: Vec3,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisBlock {
    pub n_max: usize,
}

impl Default for BasisBlock {
    fn default() -> Self {
        BasisBlock { n_max: DEFAULT_N_MAX }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state: Option<String>,
    pub t_max: f64,
    pub dt: f64,
    /// ωt of the density snapshot.
    pub t_snapshot: f64,
    pub grid: GridSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b1_sweep: Option<Vec<f64>>,
    /// Number of eigenvalues per spectrum row.
    pub k: usize,
    pub oracle: bool,
}

impl Default for ExperimentBlock {
    fn default() -> Self {
        ExperimentBlock {
            state: None,
            t_max: DEFAULT_T_MAX,
            dt: DEFAULT_DT,
            t_snapshot: 0.0,
            grid: GridSpec {
                min: -6.0,
                max: 6.0,
                step: 0.05,
            },
            b1_sweep: None,
            k: DEFAULT_K,
            oracle: false,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Density layout: three columns `y, z, p` or a y-by-z matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Layout {
    #[default]
    Long,
    Grid,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    pub format: Format,
    pub layout: Layout,
}

/// Command-line values that take precedence over the file.
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub b1: Option<Vec<f64>>,
    pub b0: Option<Vec3>,
    pub n_max: Option<usize>,
    pub state: Option<String>,
    pub t_max: Option<f64>,
    pub dt: Option<f64>,
    pub oracle: bool,
    pub grid: Option<GridSpec>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

/// How the Hamiltonian is parameterized.
#[derive(Clone, Debug, PartialEq)]
pub enum Model {
    Dimensionless { b1: f64, b0: Vec3 },
    Field { field: FieldConfiguration, params: PhysicalParams, preset: Option<Preset> },
}

impl Model {
    pub fn spec(&self, basis: BasisSpec) -> ZbHamiltonianSpec {
        match self {
            Model::Dimensionless { b1, b0 } => ZbHamiltonianSpec::rashba(*b1, basis).with_b0(*b0),
            Model::Field { field, params, .. } => ZbHamiltonianSpec::general(&couplings(field, params), basis),
        }
    }
}

/// What the single-run commands need to know about `--b1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum B1Use {
    /// One value, stored in the dimensionless block.
    Single,
    /// A list, stored as the sweep.
    Sweep,
}

impl RunConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::malformed(format!("config {}: {e}", path.display())))
    }

    /// Apply flags, fill defaults, check the mode invariants and return the model.
    pub fn resolve(&mut self, o: &Overrides, b1_use: B1Use, env_constants: Option<&Path>) -> CliResult<Model> {
        if let Some(b1) = &o.b1 {
            match b1_use {
                B1Use::Sweep => self.experiment.b1_sweep = Some(b1.clone()),
                B1Use::Single => {
                    let [v] = b1.as_slice() else {
                        return Err(CliError::malformed("--b1 takes a single value for this command"));
                    };
                    if self.field.is_some() {
                        return Err(CliError::malformed("--b1 conflicts with the field block; use one mode"));
                    }
                    self.dimensionless.get_or_insert_with(Default::default).b1 = *v;
                }
            }
        }
        if let Some(b0) = o.b0 {
            if self.field.is_some() {
                return Err(CliError::malformed("--b0 conflicts with the field block; set field.uniform instead"));
            }
            self.dimensionless.get_or_insert_with(Default::default).b0 = b0;
        }
        if let Some(n) = o.n_max {
            self.basis.n_max = n;
        }
        let exp = &mut self.experiment;
        if let Some(s) = &o.state {
            exp.state = Some(s.clone());
        }
        exp.state.get_or_insert_with(|| DEFAULT_STATE.to_string());
        if let Some(t) = o.t_max {
            exp.t_max = t;
        }
        if let Some(dt) = o.dt {
            exp.dt = dt;
        }
        if let Some(g) = o.grid {
            exp.grid = g;
        }
        exp.oracle |= o.oracle;
        if let Some(p) = &o.out {
            self.output.path = Some(p.clone());
        }
        if let Some(f) = o.format {
            self.output.format = f;
        }

        match (&self.field, &self.dimensionless) {
            (Some(_), Some(_)) => Err(CliError::malformed(
                "config has both a field block and a dimensionless block; keep exactly one",
            )),
            (None, _) => {
                if self.atom.is_some() {
                    return Err(CliError::malformed("atom block given without a field block"));
                }
                let d = self.dimensionless.get_or_insert_with(Default::default);
                if !d.b1.is_finite() || d.b0.iter().any(|v| !v.is_finite()) {
                    return Err(CliError::malformed("dimensionless.b1 and dimensionless.b0 must be finite"));
                }
                Ok(Model::Dimensionless { b1: d.b1, b0: d.b0 })
            }
            (Some(block), None) => {
                let (field, preset) = field_configuration(block)?;
                let atom = self
                    .atom
                    .as_mut()
                    .ok_or_else(|| CliError::malformed("field block needs an atom block (mass, omega, g_factor)"))?;
                if atom.constants.is_none() {
                    atom.constants = Some(match env_constants {
                        Some(path) => load_constants(path)?,
                        None => PhysicalConstants::default(),
                    });
                }
                let constants = atom.constants.expect("filled above");
                let params = PhysicalParams::with_constants(atom.mass, atom.omega, atom.g_factor, constants)
                    .map_err(|e| CliError::malformed(format!("atom: {e}")))?;
                Ok(Model::Field { field, params, preset })
            }
        }
    }
}

fn field_configuration(block: &FieldBlock) -> CliResult<(FieldConfiguration, Option<Preset>)> {
    if block.uniform.iter().any(|v| !v.is_finite()) {
        return Err(CliError::malformed("field.uniform must be finite"));
    }
    let (cfg, preset) = match (block.preset, block.gradient) {
        (Some(p), None) => {
            let b = block
                .b_prime
                .ok_or_else(|| CliError::malformed("field.preset needs field.b_prime (T/m)"))?;
            let cfg = p.field(b).map_err(|e| CliError::malformed(format!("field.b_prime: {e}")))?;
            (cfg, Some(p))
        }
        (None, Some(g)) => {
            if block.b_prime.is_some() {
                return Err(CliError::malformed("field.b_prime only applies together with field.preset"));
            }
            if g.iter().flatten().any(|v| !v.is_finite()) {
                return Err(CliError::malformed("field.gradient must be finite"));
            }
            (FieldConfiguration::from_gradient(g), None)
        }
        _ => {
            return Err(CliError::malformed(
                "field block needs exactly one of field.preset or field.gradient",
            ))
        }
    };
    Ok((cfg.with_uniform(block.uniform), preset))
}

fn load_constants(path: &Path) -> CliResult<PhysicalConstants> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::malformed(format!("{CONSTANTS_ENV}={}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::malformed(format!("{CONSTANTS_ENV}={}: {e}", path.display())))
}

/// `0.1`, `0,0.1,0.2` or the inclusive range `start:stop:step`.
pub fn parse_b1_list(s: &str) -> Result<Vec<f64>, String> {
    let parts: Vec<&str> = s.split(':').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or(format!("'{t}' is not a number"));
    match parts.as_slice() {
        [list] => list.split(',').map(|t| num(t.trim())).collect(),
        [start, stop, step] => {
            let (a, b, h) = (num(start)?, num(stop)?, num(step)?);
            if h <= 0.0 || b < a {
                return Err(format!("range {s} needs step > 0 and stop >= start"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            let span = n as f64 * h;
            // k·span/n keeps grid points like 0.06 exactly representable
            Ok((0..=n).map(|k| if n == 0 { a } else { a + k as f64 * span / n as f64 }).collect())
        }
        _ => Err(format!("'{s}' is neither a list nor start:stop:step")),
    }
}

/// Three comma-separated numbers.
pub fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| format!("'{t}' is not a number")))
        .collect::<Result<_, _>>()?;
    <[f64; 3]>::try_from(v).map_err(|v| format!("expected 3 comma-separated numbers, got {}", v.len()))
}

pub fn parse_grid(s: &str) -> Result<GridSpec, String> {
    let [min, max, step] = parse_triple(s)?;
    GridSpec::new(min, max, step).map_err(|e| e.to_string())
}

use std::io::Write;

use gauge_sim::dynamics::{density, spectra, time_grid, Experiment, OBSERVABLES};
use gauge_sim::gauge::{
    anisotropy, couplings, gauge_potential, required_gradient, validate_field, FieldValidation, GaugeCoupling,
    Mat3, Preset, GAUSS_PER_MM_PER_TESLA_PER_M,
};
use gauge_sim::hilbert::BasisSpec;
use gauge_sim::oracle::{compare, perturbative_series, CompareReport, InitialConditions};
use gauge_sim::{Execution, C64};
use serde::Serialize;

use crate::config::{B1Use, Format, Model, Overrides, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, sink, write_density, write_json, write_table, Provenance, Table};
use crate::state::{Prepared, StateDescriptor};

/// Largest truncation loss of a coherent initial state accepted without complaint.
pub const MAX_TAIL_WEIGHT: f64 = 1e-3;
/// Largest probability allowed outside the density grid.
pub const MAX_LOST_MASS: f64 = 1e-3;

pub struct Context {
    pub config: RunConfig,
    pub overrides: Overrides,
    pub env_constants: Option<std::path::PathBuf>,
}

fn prepare_state(cfg: &RunConfig, basis: BasisSpec) -> CliResult<Prepared> {
    let text = cfg.experiment.state.as_deref().expect("resolved");
    let p = StateDescriptor::parse(text)?.prepare(basis)?;
    if p.discarded_weight > MAX_TAIL_WEIGHT {
        return Err(CliError::Advisory(format!(
            "initial state '{text}' loses weight {:.3e} to truncation at n_max = {} (limit {MAX_TAIL_WEIGHT:e}); \
             increase --nmax",
            p.discarded_weight, basis.n_max
        )));
    }
    Ok(p)
}

/// Reports go to stdout when the data went to a file, otherwise to stderr.
fn print_report<T: Serialize>(value: &T, data_on_stdout: bool) -> CliResult<()> {
    if data_on_stdout {
        let mut err = std::io::stderr().lock();
        serde_json::to_writer_pretty(&mut err, value)
            .map_err(std::io::Error::from)
            .and_then(|_| writeln!(err))
            .map_err(|e| CliError::io("<stderr>", e))
    } else {
        write_json(value, None)
    }
}

#[derive(Serialize)]
struct OracleSummary<'a> {
    oracle: &'a CompareReport,
}

pub fn evolve(mut ctx: Context) -> CliResult<()> {
    let model = ctx.config.resolve(&ctx.overrides, B1Use::Single, ctx.env_constants.as_deref())?;
    let cfg = &ctx.config;
    let basis = BasisSpec::new(cfg.basis.n_max);
    let exp_block = &cfg.experiment;
    if exp_block.oracle {
        match model {
            Model::Dimensionless { b0, .. } if b0 == [0.0; 3] => {}
            Model::Dimensionless { .. } => {
                return Err(CliError::malformed("--oracle predicts the b0 = 0 dynamics; drop b0 or the oracle"))
            }
            Model::Field { .. } => {
                return Err(CliError::malformed("--oracle needs the dimensionless block (b1, b0)"))
            }
        }
    }
    let times = time_grid(exp_block.t_max, exp_block.dt)?;
    let psi = prepare_state(cfg, basis)?.state;
    let spec = model.spec(basis);
    let series = Experiment::new(spec)?.run_at(&psi, &times, Execution::default())?;

    let mut columns = vec!["wt".to_string()];
    let mut data: Vec<&[f64]> = vec![&series.times];
    for name in OBSERVABLES {
        columns.push(name.to_string());
        data.push(series.column(name).expect("engine emits every observable"));
    }
    let mut report = None;
    let predicted;
    if exp_block.oracle {
        let ic = InitialConditions::from_state(&psi, basis)?;
        predicted = perturbative_series(&ic, spec.b1, &series.times);
        for col in &predicted.columns {
            columns.push(format!("{}_oracle", col.name));
            data.push(&col.values);
        }
        report = Some(compare(&series, &predicted)?);
    }
    let rows = (0..series.len()).map(|i| data.iter().map(|c| c[i]).collect()).collect();
    let table = Table { columns, rows };
    let prov = Provenance::new("evolve", cfg);
    write_table(&prov, &table, cfg.output.format, cfg.output.path.as_deref())?;
    if let Some(r) = report {
        print_report(&OracleSummary { oracle: &r }, cfg.output.path.is_none())?;
    }
    Ok(())
}

pub fn spectrum(mut ctx: Context) -> CliResult<()> {
    let model = ctx.config.resolve(&ctx.overrides, B1Use::Sweep, ctx.env_constants.as_deref())?;
    let basis = BasisSpec::new(ctx.config.basis.n_max);
    let base = model.spec(basis);
    let sweep = ctx.config.experiment.b1_sweep.get_or_insert_with(|| vec![base.b1]).clone();
    if let (Model::Field { .. }, true) = (&model, base.b1 == 0.0 && sweep.iter().any(|b| *b != 0.0)) {
        return Err(CliError::malformed(
            "the field has no y/z gradient coupling to rescale; a b1 sweep needs a nonzero gradient",
        ));
    }
    let specs: Vec<_> = sweep.iter().map(|&b| base.with_b1(b)).collect();
    let k = ctx.config.experiment.k;
    let energies = spectra(&specs, k, Execution::default())?;

    let mut columns = vec!["b1".to_string()];
    columns.extend((1..=k).map(|i| format!("E_{i}")));
    let rows = sweep
        .iter()
        .zip(energies)
        .map(|(b, e)| std::iter::once(*b).chain(e).collect())
        .collect();
    let cfg = &ctx.config;
    let prov = Provenance::new("spectrum", cfg);
    write_table(&prov, &Table { columns, rows }, cfg.output.format, cfg.output.path.as_deref())
}

pub fn density_cmd(mut ctx: Context) -> CliResult<()> {
    // the snapshot time takes --tmax
    let snapshot = ctx.overrides.t_max.take();
    let model = ctx.config.resolve(&ctx.overrides, B1Use::Single, ctx.env_constants.as_deref())?;
    if let Some(t) = snapshot {
        ctx.config.experiment.t_snapshot = t;
    }
    let cfg = &ctx.config;
    let t = cfg.experiment.t_snapshot;
    if !t.is_finite() {
        return Err(CliError::malformed(format!("snapshot time must be finite, got {t}")));
    }
    let basis = BasisSpec::new(cfg.basis.n_max);
    let psi = prepare_state(cfg, basis)?.state;
    let evolved = Experiment::new(model.spec(basis))?.state_at(&psi, t)?;
    let d = density(&evolved, basis, cfg.experiment.grid, Execution::default())?;
    let prov = Provenance::new("density", cfg);
    write_density(&prov, &d, cfg.output.format, cfg.output.layout, cfg.output.path.as_deref())?;
    let lost = 1.0 - d.normalization();
    if lost > MAX_LOST_MASS {
        return Err(CliError::Advisory(format!(
            "probability {lost:.3e} lies outside the grid (limit {MAX_LOST_MASS:e}); widen --grid"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct FieldReport<'a> {
    provenance: Provenance<'a>,
    #[serde(skip_serializing_if = "Option::is_none")]
    preset: Option<Preset>,
    gradient: Mat3,
    #[serde(flatten)]
    validation: FieldValidation,
    coupling: GaugeCoupling,
    b1: f64,
    gauge_potential_coeff: Mat3,
    inv_inertia: Mat3,
    phi_matrix: [[C64; 2]; 2],
    required_gradient_t_per_m: f64,
    required_gradient_gauss_per_mm: f64,
    warnings: Vec<String>,
}

pub fn field_check(mut ctx: Context) -> CliResult<()> {
    let model = ctx.config.resolve(&ctx.overrides, B1Use::Single, ctx.env_constants.as_deref())?;
    let Model::Field { field, params, preset } = model else {
        return Err(CliError::malformed("field-check needs a field block and an atom block in --config"));
    };
    let validation = validate_field(&field);
    let coupling = couplings(&field, &params);
    let mut warnings = Vec::new();
    if coupling.has_x_row() {
        let w = format!(
            "coupling terms {} lie outside the two-oscillator engine and are dropped in simulations",
            coupling.x_row_terms().join(", ")
        );
        log::warn!("{w}");
        warnings.push(w);
    }
    if !validation.admissible {
        warnings.push(format!(
            "div B = {} T/m: no static magnetic field has this gradient",
            fmt_f64(validation.divergence)
        ));
    }
    let req = required_gradient(&params);
    let report = FieldReport {
        provenance: Provenance::new("field-check", &ctx.config),
        preset,
        gradient: field.gradient,
        validation,
        coupling,
        b1: coupling.b1(),
        gauge_potential_coeff: gauge_potential(&field, &params).coeff,
        inv_inertia: anisotropy(&field, &params).inv_inertia,
        phi_matrix: anisotropy(&field, &params).phi_matrix,
        required_gradient_t_per_m: req,
        required_gradient_gauss_per_mm: req * GAUSS_PER_MM_PER_TESLA_PER_M,
        warnings,
    };
    write_json(&report, ctx.config.output.path.as_deref())?;
    if validation.admissible {
        Ok(())
    } else {
        Err(CliError::Advisory(format!(
            "gradient is not divergence-free (trace = {} T/m)",
            fmt_f64(validation.divergence)
        )))
    }
}

#[derive(Serialize)]
struct PresetEntry {
    name: &'static str,
    /// ∂_i B_j for B′ = 1 T/m.
    gradient: Mat3,
    #[serde(flatten)]
    validation: FieldValidation,
}

#[derive(Serialize)]
struct PresetDoc<'a> {
    provenance: Provenance<'a>,
    presets: Vec<PresetEntry>,
}

pub fn presets(ctx: Context) -> CliResult<()> {
    let mut cfg = ctx.config;
    if let Some(f) = ctx.overrides.format {
        cfg.output.format = f;
    }
    if let Some(p) = &ctx.overrides.out {
        cfg.output.path = Some(p.clone());
    }
    let entries: Vec<PresetEntry> = Preset::ALL
        .iter()
        .map(|p| {
            let field = p.field(1.0).expect("finite strength");
            PresetEntry {
                name: p.name(),
                gradient: field.gradient,
                validation: validate_field(&field),
            }
        })
        .collect();
    let path = cfg.output.path.clone();
    let prov = Provenance::new("presets", &cfg);
    match cfg.output.format {
        Format::Json => write_json(&PresetDoc { provenance: prov, presets: entries }, path.as_deref()),
        Format::Csv => {
            let mut w = sink(path.as_deref())?;
            let mut text = format!("# gauge-sim {} presets\n# gradient dB_j/dx_i for B' = 1 T/m\n", prov.version);
            text.push_str("preset,gxx,gxy,gxz,gyx,gyy,gyz,gzx,gzy,gzz,div,curl_x,curl_y,curl_z\n");
            for e in &entries {
                let nums: Vec<String> = e
                    .gradient
                    .iter()
                    .flatten()
                    .chain(std::iter::once(&e.validation.divergence))
                    .chain(&e.validation.curl)
                    .map(|v| fmt_f64(*v))
                    .collect();
                text.push_str(&format!("{},{}\n", e.name, nums.join(",")));
            }
            w.write_all(text.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| CliError::io(path.unwrap_or_else(|| "<stdout>".into()), e))
        }
    }
}

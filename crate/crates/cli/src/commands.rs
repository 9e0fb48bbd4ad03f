//! Subcommand implementations. Each returns the process exit status or a
//! [`CliError`] carrying one.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use nalgebra::Vector2;
use nniquad::control::{
    axis_storage_matrix, controller_state_space, plant_axis_state_space, validate_params, Axis,
    ParamCheck,
};
use nniquad::ni_analysis::{
    certificate_check, ni_frequency_test, residue_check, CertificateMode, CertificateReport,
    ResidueReport,
};
use nniquad::sim::simulate;
use nniquad::{Error as CoreError, FrequencyGrid, NiClass, NiVerdict, TrajectoryLog};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{parse_config, OutputFormat, RunConfig};
use crate::plot::render_svg;
use crate::{exit, CliError, OUTPUT_DIR_ENV};

/// Tolerance for the storage-matrix certificate and residue checks.
pub const CERT_TOL: f64 = 1e-9;
/// Settling band used by `sweep`, as a fraction of the initial distance.
pub const SETTLING_FRACTION: f64 = 0.02;

/// Shortest decimal rendering, rounded to 12 significant decimals.
pub fn fmt_num(v: f64) -> String {
    if !v.is_finite() {
        return v.to_string();
    }
    let s = format!("{v:.12}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" { "0".into() } else { s.into() }
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::new(exit::IO, format!("cannot read {}: {e}", path.display())))?;
    parse_config(&text).map_err(|e| CliError::new(exit::USAGE, e.to_string()))
}

/// Applies the output-directory override: the file name of `output_path`
/// is placed inside `dir`.
pub fn resolve_output(cfg: &RunConfig, dir: Option<&Path>) -> PathBuf {
    match dir {
        Some(d) => d.join(cfg.output_path.file_name().unwrap_or_default()),
        None => cfg.output_path.clone(),
    }
}

fn env_output_dir() -> Option<PathBuf> {
    std::env::var_os(OUTPUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from)
}

fn core_failure(e: CoreError) -> CliError {
    CliError::new(exit::CONSTRAINT, e.to_string())
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::new(exit::IO, format!("cannot write {}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

pub fn render_log(log: &TrajectoryLog, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => log.to_csv_string(),
        OutputFormat::Json => log.to_json().expect("log serializes"),
    }
}

pub fn cmd_simulate(config: &Path, allow_invalid: bool, out: &mut impl Write) -> Result<u8, CliError> {
    let mut cfg = load_config(config)?;
    cfg.sim.override_validation |= allow_invalid;
    let log = simulate(&cfg.quad, &cfg.controller, &cfg.sim).map_err(core_failure)?;
    let path = resolve_output(&cfg, env_output_dir().as_deref());
    write_file(&path, render_log(&log, cfg.output_format).as_bytes())?;
    let _ = writeln!(out, "wrote {} samples to {}", log.len(), path.display());
    if cfg.emit_plot {
        let svg_path = path.with_extension("svg");
        write_file(&svg_path, render_svg(&log).as_bytes())?;
        let _ = writeln!(out, "wrote plot to {}", svg_path.display());
    }
    if let Some(n) = log.final_position_norm() {
        let _ = writeln!(out, "final |xi_h| = {}", fmt_num(n));
    }
    Ok(exit::SUCCESS)
}

pub fn cmd_validate_params(config: &Path, out: &mut impl Write) -> Result<u8, CliError> {
    let cfg = load_config(config)?;
    let ParamCheck { passed, delta_min, margin } = validate_params(&cfg.quad, &cfg.controller);
    let _ = writeln!(out, "delta     = {}", fmt_num(cfg.controller.delta));
    let _ = writeln!(out, "delta_min = {}", fmt_num(delta_min));
    let _ = writeln!(out, "margin    = {}", fmt_num(margin));
    let _ = writeln!(out, "{}", if passed { "PASS" } else { "FAIL" });
    Ok(if passed { exit::SUCCESS } else { exit::CONSTRAINT })
}

#[derive(Debug, Serialize)]
pub struct AxisReport {
    pub axis: &'static str,
    pub kp: f64,
    pub verdict: NiVerdict,
    pub residue: ResidueReport,
    pub certificate: CertificateReport,
}

#[derive(Debug, Serialize)]
pub struct NiReport {
    pub controller: NiVerdict,
    pub plant: Vec<AxisReport>,
    pub passed: bool,
}

pub fn ni_report(cfg: &RunConfig) -> Result<NiReport, CliError> {
    let grid = FrequencyGrid::default();
    let controller = ni_frequency_test(&controller_state_space(&cfg.controller), &grid);
    let mut plant = Vec::new();
    for (axis, name) in [(Axis::X, "x"), (Axis::Y, "y")] {
        let kp = cfg.controller.kp_axis(axis);
        let ss = plant_axis_state_space(&cfg.quad, kp);
        let residue = residue_check(&ss, kp.sqrt(), CERT_TOL).map_err(core_failure)?;
        let certificate = certificate_check(
            &ss,
            &axis_storage_matrix(&cfg.quad, kp),
            CertificateMode::Corrected,
            CERT_TOL,
        )
        .map_err(core_failure)?;
        plant.push(AxisReport { axis: name, kp, verdict: ni_frequency_test(&ss, &grid), residue, certificate });
    }
    let passed = controller.classification == NiClass::Sni && plant.iter().all(|a| a.certificate.passed);
    Ok(NiReport { controller, plant, passed })
}

pub fn cmd_check_ni(config: &Path, json: bool, out: &mut impl Write) -> Result<u8, CliError> {
    let cfg = load_config(config)?;
    let report = ni_report(&cfg)?;
    if json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        let c = &report.controller;
        let _ = write!(out, "controller: {}", c.classification);
        if let (Some(e), Some(w)) = (c.min_eigenvalue, c.min_eigenvalue_omega) {
            let _ = write!(out, " (min eigenvalue {e:.6e} at omega = {w:.6e})");
        }
        let _ = writeln!(out);
        for a in &report.plant {
            let _ = writeln!(
                out,
                "plant {}: {} ({} grid points skipped); residue at omega = {}: {}; certificate: {}",
                a.axis,
                a.verdict.classification,
                a.verdict.skipped.len(),
                fmt_num(a.residue.omega0),
                if a.residue.positive_semidefinite { "PSD" } else { "NOT PSD" },
                if a.certificate.passed { "PASS" } else { "FAIL" },
            );
        }
        let _ = writeln!(out, "{}", if report.passed { "PASS" } else { "FAIL" });
    }
    Ok(if report.passed { exit::SUCCESS } else { exit::CONSTRAINT })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    Delta,
    GammaIr,
    Kp,
}

impl SweepParam {
    fn apply(self, cfg: &mut RunConfig, v: f64) {
        match self {
            SweepParam::Delta => cfg.controller.delta = v,
            SweepParam::GammaIr => cfg.controller.gamma_ir = v,
            SweepParam::Kp => cfg.controller.kp = Vector2::new(v, v),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub status: String,
    pub final_norm: Option<f64>,
    pub peak_norm: Option<f64>,
    pub settling_time: Option<f64>,
}

pub fn sweep_values(from: f64, to: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite()) || steps == 0 {
        return Err(CliError::new(exit::USAGE, "sweep needs finite --from/--to and --steps >= 1"));
    }
    if steps == 1 {
        return Ok(vec![from]);
    }
    let h = (to - from) / (steps - 1) as f64;
    Ok((0..steps).map(|k| if k + 1 == steps { to } else { from + k as f64 * h }).collect())
}

/// Runs one simulation per value concurrently; rows come back in the order
/// of `values`.
pub fn run_sweep(base: &RunConfig, param: SweepParam, values: &[f64]) -> Vec<SweepRow> {
    values
        .par_iter()
        .map(|&value| {
            let mut cfg = base.clone();
            param.apply(&mut cfg, value);
            let run = cfg
                .controller
                .validate()
                .and_then(|_| simulate(&cfg.quad, &cfg.controller, &cfg.sim));
            match run {
                Ok(log) => {
                    let norms = log.position_norms();
                    SweepRow {
                        value,
                        status: "ok".into(),
                        final_norm: norms.last().copied(),
                        peak_norm: Some(norms.iter().copied().fold(0.0, f64::max)),
                        settling_time: log.settling_time(SETTLING_FRACTION),
                    }
                }
                Err(e) => SweepRow {
                    value,
                    status: match e {
                        CoreError::ConfigInvalid(_) | CoreError::InvalidParameter { .. } => "invalid".into(),
                        _ => "failed".into(),
                    },
                    final_norm: None,
                    peak_norm: None,
                    settling_time: None,
                },
            }
        })
        .collect()
}

pub struct SweepArgs {
    pub param: SweepParam,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
    pub allow_invalid: bool,
    pub json: bool,
}

pub fn cmd_sweep(config: &Path, args: &SweepArgs, out: &mut impl Write) -> Result<u8, CliError> {
    let mut cfg = load_config(config)?;
    cfg.sim.override_validation |= args.allow_invalid;
    let values = sweep_values(args.from, args.to, args.steps)?;
    let rows = run_sweep(&cfg, args.param, &values);
    if args.json {
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
        return Ok(exit::SUCCESS);
    }
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
    let name = serde_json::to_value(args.param).expect("param serializes");
    let _ = writeln!(
        out,
        "{:>14} {:>8} {:>14} {:>14} {:>14}",
        name.as_str().unwrap_or("value"),
        "status",
        "final_norm",
        "peak_norm",
        "settling_2pct"
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{:>14} {:>8} {:>14} {:>14} {:>14}",
            fmt_num(r.value),
            r.status,
            opt(r.final_norm),
            opt(r.peak_norm),
            opt(r.settling_time)
        );
    }
    Ok(exit::SUCCESS)
}

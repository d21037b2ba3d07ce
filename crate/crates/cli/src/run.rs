//! Scenario execution and output files.

use std::fs;
use std::path::{Path, PathBuf};

use qwm_core::atom::Physicality;
use qwm_core::spectrum::{detect_peaks, fmt17, phase_grid_run, required_periods, time_trace_run, SpectrumRun};
use qwm_core::{Sequence, Spectrum};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{Format, Method, Resolved, ScenarioConfig};
use crate::error::CliError;

pub const TOOL: &str = "qwm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// What a run computed, in sweep order.
#[derive(Clone, Debug)]
pub struct RunResult {
    pub spectra: Vec<Spectrum>,
    pub physicality: Vec<Physicality>,
    pub files: Vec<PathBuf>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    tool: &'static str,
    version: &'static str,
    seed: Option<u64>,
    config: &'a ScenarioConfig,
    resolved: ResolvedParams,
    points: Vec<PointEntry<'a>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    sweep_table: Option<String>,
    warnings: &'a [String],
}

#[derive(Serialize)]
struct ResolvedParams {
    levels: usize,
    transition_elements: Vec<f64>,
    gamma1_rad_per_s: f64,
    gamma_phi_rad_per_s: f64,
    method: Method,
    grid_size: usize,
    max_mode: usize,
    threshold: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    n_periods: Option<usize>,
}

#[derive(Serialize)]
struct PointEntry<'a> {
    index: usize,
    swept_value: Option<f64>,
    sequence: &'a Sequence,
    files: Vec<String>,
    peaks: Vec<i32>,
    coherent_photons: f64,
    total_photons: f64,
    physicality: Physicality,
}

fn n_periods(resolved: &Resolved, seq: &Sequence) -> usize {
    resolved.config.spectrum.n_periods.unwrap_or_else(|| required_periods(seq))
}

fn compute(resolved: &Resolved, seq: &Sequence) -> Result<SpectrumRun<f64>, CliError> {
    let s = &resolved.config.spectrum;
    let run = match s.method {
        Method::PhaseGrid => phase_grid_run(&resolved.atom, seq, s.grid_size, s.max_mode, None)?,
        Method::TimeTrace => time_trace_run(&resolved.atom, seq, n_periods(resolved, seq), s.max_mode, None)?,
    };
    if !run.physicality.within_contract() {
        return Err(CliError::Numerical(format!(
            "state left the physical set: |Tr ρ − 1| = {:e}, Hermiticity residual = {:e}, min eigenvalue = {:e}",
            run.physicality.trace_error, run.physicality.hermiticity, run.physicality.min_eigenvalue
        )));
    }
    Ok(run)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn sweep_table(resolved: &Resolved, spectra: &[Spectrum]) -> Option<String> {
    let sweep = resolved.config.sweep.as_ref()?;
    let k = resolved.config.spectrum.max_mode as i32;
    let mut out = String::from(sweep.column());
    for m in -k..=k {
        out.push_str(&format!(",N_{m}"));
    }
    out.push('\n');
    for (point, spec) in resolved.points.iter().zip(spectra) {
        out.push_str(&fmt17(point.swept_value.unwrap_or(f64::NAN)));
        for m in -k..=k {
            out.push(',');
            out.push_str(&fmt17(spec.photons(m)));
        }
        out.push('\n');
    }
    Some(out)
}

/// Runs every point, then writes spectra, the sweep table, the resolved
/// config and the manifest into `out` (or the configured directory).
pub fn run_scenario(mut resolved: Resolved, out: Option<PathBuf>, seed: Option<u64>) -> Result<RunResult, CliError> {
    if let Some(dir) = out {
        resolved.config.output.directory = dir;
    }
    let outcomes: Vec<Result<SpectrumRun<f64>, CliError>> = resolved
        .points
        .par_iter()
        .map(|p| compute(&resolved, &p.sequence))
        .collect();
    let runs = outcomes.into_iter().collect::<Result<Vec<_>, _>>()?;

    let dir = resolved.config.output.directory.clone();
    fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let threshold = resolved.config.spectrum.threshold;
    let mut files = Vec::new();
    let mut entries = Vec::new();
    for (i, (point, run)) in resolved.points.iter().zip(&runs).enumerate() {
        let mut names = Vec::new();
        for format in &resolved.config.output.formats {
            let (name, text) = match format {
                Format::Csv => (format!("spectrum_{i:04}.csv"), run.spectrum.to_csv()),
                Format::Json => (format!("spectrum_{i:04}.json"), run.spectrum.to_json()? + "\n"),
            };
            let path = dir.join(&name);
            write(&path, &text)?;
            files.push(path);
            names.push(name);
        }
        entries.push(PointEntry {
            index: i,
            swept_value: point.swept_value,
            sequence: &point.sequence,
            files: names,
            peaks: detect_peaks(&run.spectrum, threshold)?,
            coherent_photons: run.spectrum.coherent_photons(),
            total_photons: run.spectrum.total_photons,
            physicality: run.physicality,
        });
    }
    let spectra: Vec<Spectrum> = runs.iter().map(|r| r.spectrum.clone()).collect();
    let table = sweep_table(&resolved, &spectra);
    if let Some(text) = &table {
        let path = dir.join("sweep.csv");
        write(&path, text)?;
        files.push(path);
    }
    let config_path = dir.join("config.toml");
    write(&config_path, &resolved.config.to_toml())?;
    files.push(config_path);

    let s = &resolved.config.spectrum;
    let manifest = Manifest {
        tool: TOOL,
        version: VERSION,
        seed,
        config: &resolved.config,
        resolved: ResolvedParams {
            levels: resolved.atom.levels(),
            transition_elements: resolved.atom.transition_elements().to_vec(),
            gamma1_rad_per_s: resolved.atom.gamma1(),
            gamma_phi_rad_per_s: resolved.atom.gamma_phi(),
            method: s.method,
            grid_size: s.grid_size,
            max_mode: s.max_mode,
            threshold: s.threshold,
            n_periods: (s.method == Method::TimeTrace)
                .then(|| n_periods(&resolved, &resolved.points[0].sequence)),
        },
        points: entries,
        sweep_table: table.map(|_| "sweep.csv".to_string()),
        warnings: &resolved.warnings,
    };
    let text = serde_json::to_string_pretty(&manifest).map_err(|e| CliError::Io(e.to_string()))? + "\n";
    let path = dir.join("manifest.json");
    write(&path, &text)?;
    files.push(path);

    Ok(RunResult {
        physicality: runs.iter().map(|r| r.physicality).collect(),
        spectra,
        files,
    })
}

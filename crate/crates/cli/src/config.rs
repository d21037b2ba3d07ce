//! Scenario files.  Every physical quantity carries its unit in the key name.

use std::f64::consts::PI;
use std::path::PathBuf;

use qwm_core::pulse::{preset_classical, preset_quantum, sweep_grid, SweepParameter};
use qwm_core::{Atom, Sequence};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

const MHZ: f64 = 2.0 * PI * 1e6;
const KHZ: f64 = 2.0 * PI * 1e3;
const NS: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub atom: AtomConfig,
    pub sequence: SequenceConfig,
    #[serde(default)]
    pub spectrum: SpectrumConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomConfig {
    #[serde(default = "two")]
    pub levels: usize,
    #[serde(default = "device_gamma1")]
    pub gamma1_over_2pi_mhz: f64,
    #[serde(default)]
    pub gamma_phi_over_2pi_mhz: f64,
    /// e–f dipole element relative to g–e; used only when `levels = 3`.
    #[serde(default = "sqrt_two")]
    pub ef_dipole: f64,
}

impl Default for AtomConfig {
    fn default() -> Self {
        Self {
            levels: 2,
            gamma1_over_2pi_mhz: device_gamma1(),
            gamma_phi_over_2pi_mhz: 0.0,
            ef_dipole: sqrt_two(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FirstTone {
    /// ω₋ first, mixing line at 2ω₊ − ω₋.
    Minus,
    Plus,
}

impl FirstTone {
    fn index(self) -> i32 {
        match self {
            Self::Minus => -1,
            Self::Plus => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case", deny_unknown_fields)]
pub enum SequenceConfig {
    Classical {
        omega_rabi_over_2pi_mhz: f64,
        #[serde(default = "device_dt")]
        dt_ns: f64,
        #[serde(default = "device_period")]
        t_r_ns: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_omega_over_2pi_khz: Option<f64>,
    },
    Quantum {
        omega1_over_2pi_mhz: f64,
        omega2_over_2pi_mhz: f64,
        #[serde(default = "device_dt")]
        dt1_ns: f64,
        #[serde(default = "device_dt")]
        dt2_ns: f64,
        #[serde(default)]
        gap_ns: f64,
        #[serde(default = "device_period")]
        t_r_ns: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        d_omega_over_2pi_khz: Option<f64>,
        #[serde(default = "minus")]
        first_tone: FirstTone,
    },
}

impl SequenceConfig {
    fn d_omega_mut(&mut self) -> &mut Option<f64> {
        match self {
            Self::Classical { d_omega_over_2pi_khz, .. } | Self::Quantum { d_omega_over_2pi_khz, .. } => {
                d_omega_over_2pi_khz
            }
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PhaseGrid,
    TimeTrace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectrumConfig {
    #[serde(default = "phase_grid")]
    pub method: Method,
    #[serde(default = "grid_64")]
    pub grid_size: usize,
    #[serde(default = "nine")]
    pub max_mode: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    /// Time-trace only; defaults to one beat cycle.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_periods: Option<usize>,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        Self {
            method: Method::PhaseGrid,
            grid_size: 64,
            max_mode: 9,
            threshold: default_threshold(),
            n_periods: None,
        }
    }
}

/// Sweep values are in the units of the swept key: MHz (Ω/2π) for Rabi
/// frequencies, ns for the pulse length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub parameter: SweepParameter,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stop: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<usize>,
}

impl SweepConfig {
    /// Column name of the swept value, with its unit.
    pub fn column(&self) -> &'static str {
        match self.parameter {
            SweepParameter::OmegaRabi => "omega_rabi_over_2pi_mhz",
            SweepParameter::Dt => "dt_ns",
            SweepParameter::Omega1 => "omega1_over_2pi_mhz",
            SweepParameter::Omega2 => "omega2_over_2pi_mhz",
        }
    }

    fn to_si(&self, v: f64) -> f64 {
        match self.parameter {
            SweepParameter::Dt => v * NS,
            _ => v * MHZ,
        }
    }

    pub fn resolved_values(&self) -> Result<Vec<f64>, CliError> {
        let values = match (&self.values, self.start, self.stop, self.points) {
            (Some(v), None, None, None) => v.clone(),
            (None, Some(a), Some(b), Some(n)) => match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            },
            _ => {
                return Err(CliError::config(
                    "sweep",
                    "give either `values` or all of `start`, `stop`, `points`",
                ))
            }
        };
        if values.is_empty() {
            return Err(CliError::config("sweep", "sweep has no values"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(CliError::config("sweep.values", "values must be finite"));
        }
        Ok(values)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "out_dir")]
    pub directory: PathBuf,
    #[serde(default = "both_formats")]
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            directory: out_dir(),
            formats: both_formats(),
        }
    }
}

fn two() -> usize {
    2
}
fn nine() -> usize {
    9
}
fn grid_64() -> usize {
    64
}
fn sqrt_two() -> f64 {
    std::f64::consts::SQRT_2
}

fn device_gamma1() -> f64 {
    20.0
}
fn device_dt() -> f64 {
    2.0
}
fn device_period() -> f64 {
    100.0
}
fn minus() -> FirstTone {
    FirstTone::Minus
}
fn phase_grid() -> Method {
    Method::PhaseGrid
}
fn default_threshold() -> f64 {
    qwm_core::spectrum::DEFAULT_THRESHOLD
}
fn out_dir() -> PathBuf {
    PathBuf::from("out")
}
fn both_formats() -> Vec<Format> {
    vec![Format::Csv, Format::Json]
}

/// One point of a run: the swept value in config units (if any) and its sequence.
#[derive(Clone, Debug)]
pub struct Point {
    pub swept_value: Option<f64>,
    pub sequence: Sequence,
}

/// Config with defaults filled in, plus the simulator objects it describes.
#[derive(Clone, Debug)]
pub struct Resolved {
    pub config: ScenarioConfig,
    pub atom: Atom,
    pub points: Vec<Point>,
    pub warnings: Vec<String>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario config serializes to TOML")
    }

    pub fn resolve(mut self) -> Result<Resolved, CliError> {
        let a = &self.atom;
        let atom = Atom::new(
            a.levels,
            if a.levels == 3 { vec![1.0, a.ef_dipole] } else { vec![1.0] },
            a.gamma1_over_2pi_mhz * MHZ,
            a.gamma_phi_over_2pi_mhz * MHZ,
        )
        .map_err(|e| CliError::config("atom", e))?;

        let d_omega = self.sequence.d_omega_mut();
        let khz = *d_omega.get_or_insert(atom.gamma1() / 20.0 / KHZ);
        let beat = khz * KHZ;

        let base = match &self.sequence {
            SequenceConfig::Classical {
                omega_rabi_over_2pi_mhz,
                dt_ns,
                t_r_ns,
                ..
            } => preset_classical(omega_rabi_over_2pi_mhz * MHZ, dt_ns * NS, t_r_ns * NS, beat),
            SequenceConfig::Quantum {
                omega1_over_2pi_mhz,
                omega2_over_2pi_mhz,
                dt1_ns,
                dt2_ns,
                gap_ns,
                t_r_ns,
                first_tone,
                ..
            } => preset_quantum(
                omega1_over_2pi_mhz * MHZ,
                omega2_over_2pi_mhz * MHZ,
                dt1_ns * NS,
                dt2_ns * NS,
                gap_ns * NS,
                t_r_ns * NS,
                beat,
                first_tone.index(),
            ),
        }
        .map_err(|e| CliError::config("sequence", e))?;

        let s = &self.spectrum;
        if !(s.threshold > 0.0 && s.threshold < 1.0) {
            return Err(CliError::config("spectrum.threshold", "must lie in (0, 1)"));
        }
        if s.grid_size < 2 * s.max_mode + 2 {
            return Err(CliError::config(
                "spectrum.grid_size",
                format!("must be at least 2·max_mode + 2 = {}", 2 * s.max_mode + 2),
            ));
        }
        if self.output.formats.is_empty() {
            return Err(CliError::config("output.formats", "choose at least one of csv, json"));
        }
        self.output.formats.sort();
        self.output.formats.dedup();

        let points = match &self.sweep {
            None => vec![Point {
                swept_value: None,
                sequence: base.clone(),
            }],
            Some(sweep) => {
                let values = sweep.resolved_values()?;
                let si: Vec<f64> = values.iter().map(|&v| sweep.to_si(v)).collect();
                sweep_grid(&base, sweep.parameter, &si)
                    .map_err(|e| CliError::config("sweep.parameter", e))?
                    .into_iter()
                    .zip(values)
                    .map(|(sequence, v)| Point {
                        swept_value: Some(v),
                        sequence,
                    })
                    .collect()
            }
        };

        let mut warnings = Vec::new();
        if let Some(w) = base.detuning_warning(&atom) {
            warnings.push(w);
        }
        let expected = points
            .iter()
            .map(|p| expected_max_mode(&atom, &p.sequence, s.threshold))
            .max()
            .unwrap_or(0);
        if s.max_mode < expected {
            warnings.push(format!(
                "spectrum.max_mode = {} is below the largest mode expected above threshold ({expected})",
                s.max_mode
            ));
        }
        Ok(Resolved {
            config: self,
            atom,
            points,
            warnings,
        })
    }
}

/// Largest |m| expected above `threshold` of the strongest line.
fn expected_max_mode(atom: &Atom, seq: &Sequence, threshold: f64) -> usize {
    use qwm_core::pulse::Protocol;
    match seq.protocol {
        Protocol::Classical { omega_rabi, dt } => {
            let z = (2.0 * omega_rabi * dt).min(qwm_core::special::BESSEL_MAX_ARG);
            let power = |n: u32| qwm_core::special::bessel_j(n, z).map(|j| j * j).unwrap_or(0.0);
            let max = (0..40).map(|k| power(2 * k + 1)).fold(0.0, f64::max);
            (0..40)
                .map(|k| 2 * k + 1)
                .filter(|&n| max > 0.0 && power(n) >= threshold * max)
                .max()
                .unwrap_or(0) as usize
        }
        _ => 2 * atom.levels() - 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CLASSICAL: &str = r#"
[sequence]
preset = "classical"
omega_rabi_over_2pi_mhz = 50.0
"#;

    #[test]
    fn defaults_follow_the_reference_device() {
        let cfg = ScenarioConfig::from_toml(CLASSICAL).unwrap();
        assert_eq!(cfg.atom, AtomConfig::default());
        assert_eq!(cfg.spectrum, SpectrumConfig::default());
        let r = cfg.resolve().unwrap();
        assert_eq!(r.points.len(), 1);
        let seq = &r.points[0].sequence;
        assert!((seq.repetition_period - 100e-9).abs() < 1e-20);
        assert!((seq.detuning - 2.0 * PI * 1e6).abs() < 1e-6);
        assert!((r.atom.gamma1() - 2.0 * PI * 20e6).abs() < 1e-3);
        match &r.config.sequence {
            SequenceConfig::Classical { d_omega_over_2pi_khz, .. } => {
                assert!((d_omega_over_2pi_khz.unwrap() - 1000.0).abs() < 1e-9)
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let r = ScenarioConfig::from_toml(CLASSICAL).unwrap().resolve().unwrap();
        let again = ScenarioConfig::from_toml(&r.config.to_toml()).unwrap();
        assert_eq!(again, r.config);
    }

    #[test]
    fn unknown_keys_are_rejected_with_their_name() {
        let err = ScenarioConfig::from_toml(&format!("{CLASSICAL}\nomega_mhz = 3.0\n")).unwrap_err();
        assert!(err.to_string().contains("omega_mhz"), "{err}");
        let err = ScenarioConfig::from_toml("[sequence]\npreset = \"loud\"\n").unwrap_err();
        assert!(err.to_string().contains("loud"), "{err}");
    }

    #[test]
    fn sweep_ranges_and_errors() {
        let text = format!("{CLASSICAL}\n[sweep]\nparameter = \"omega_rabi\"\nstart = 0.0\nstop = 100.0\npoints = 60\n");
        let r = ScenarioConfig::from_toml(&text).unwrap().resolve().unwrap();
        assert_eq!(r.points.len(), 60);
        assert_eq!(r.points[59].swept_value, Some(100.0));
        let omega = r.points[59].sequence.segments[0].tones[0].rabi_amplitude;
        assert!((omega - 100.0 * MHZ).abs() < 1e-3);

        let empty = format!("{CLASSICAL}\n[sweep]\nparameter = \"omega_rabi\"\nvalues = []\n");
        let err = ScenarioConfig::from_toml(&empty).unwrap().resolve().unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("sweep"));

        let wrong = format!("{CLASSICAL}\n[sweep]\nparameter = \"omega1\"\nvalues = [1.0]\n");
        assert!(ScenarioConfig::from_toml(&wrong).unwrap().resolve().is_err());
    }

    #[test]
    fn semantic_errors_name_the_field() {
        let text = "[sequence]\npreset = \"classical\"\nomega_rabi_over_2pi_mhz = 50.0\ndt_ns = 200.0\n";
        let err = ScenarioConfig::from_toml(text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().starts_with("sequence:"), "{err}");
        let text = format!("{CLASSICAL}\n[spectrum]\ngrid_size = 8\nmax_mode = 9\n");
        let err = ScenarioConfig::from_toml(&text).unwrap().resolve().unwrap_err();
        assert!(err.to_string().contains("spectrum.grid_size"), "{err}");
    }

    #[test]
    fn warns_when_max_mode_is_too_small() {
        let text = "[sequence]\npreset = \"classical\"\nomega_rabi_over_2pi_mhz = 300.0\n";
        let r = ScenarioConfig::from_toml(text).unwrap().resolve().unwrap();
        assert!(r.warnings.iter().any(|w| w.contains("max_mode")));
        let quantum = "[atom]\nlevels = 3\n[sequence]\npreset = \"quantum\"\nomega1_over_2pi_mhz = 125.0\nomega2_over_2pi_mhz = 175.0\n";
        let r = ScenarioConfig::from_toml(quantum).unwrap().resolve().unwrap();
        assert!(r.warnings.is_empty(), "{:?}", r.warnings);
        assert_eq!(r.points[0].sequence.segments[0].tones[0].mode_index, -1);
    }
}

//! Acceptance suite A1–A10.
//!
//! Each criterion runs at desk scale and reports a pass/fail verdict with the
//! measured error.  A6 audits the physicality of every state visited by A1–A5
//! and runs them itself when they were not selected.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::atom::{AtomSpec, Physicality};
use crate::error::{Error, Result};
use crate::oracles::{
    jacobi_anger_residual, predicted_peak_count, two_pulse_spectrum, PeakCount, PhotonContent,
};
use crate::pulse::{preset_classical, preset_quantum, PulseSequence};
use crate::special::bessel_j;
use crate::spectrum::{
    detect_peaks, phase_grid_run, pulse_coherence_spectrum, time_trace_run, ModeSpectrum,
    DEFAULT_THRESHOLD,
};

/// Γ₁ in rad/s (Γ₁/2π = 20 MHz).
pub const GAMMA1: f64 = 2.0 * PI * 20e6;
pub const PULSE_NS: f64 = 2.0;
pub const PERIOD_NS: f64 = 100.0;
/// δω = Γ₁/20.
pub const BEAT: f64 = GAMMA1 / 20.0;

const NS: f64 = 1e-9;

/// First maxima of J_1, J_3, J_5, J_7.
const DECAY_FREE_MAXIMA: [f64; 4] = [1.841_183_781, 4.201_188_941, 6.415_616_376, 8.577_836_490];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Criterion {
    A1,
    A2,
    A3,
    A4,
    A5,
    A6,
    A7,
    A8,
    A9,
    A10,
}

impl Criterion {
    pub const ALL: [Criterion; 10] = [
        Self::A1,
        Self::A2,
        Self::A3,
        Self::A4,
        Self::A5,
        Self::A6,
        Self::A7,
        Self::A8,
        Self::A9,
        Self::A10,
    ];

    pub fn title(self) -> &'static str {
        match self {
            Self::A1 => "Bessel law, short pulses",
            Self::A2 => "Bessel shape at 2 ns pulses",
            Self::A3 => "two-level sequential peaks",
            Self::A4 => "three-level sequential peaks",
            Self::A5 => "phase grid vs time trace",
            Self::A6 => "physicality along trajectories",
            Self::A7 => "Jacobi-Anger expansion",
            Self::A8 => "closed-form two-pulse amplitudes",
            Self::A9 => "peak-count law",
            Self::A10 => "mirror symmetry",
        }
    }

    pub fn budget(self) -> Duration {
        Duration::from_secs(match self {
            Self::A1 | Self::A8 | Self::A9 => 60,
            Self::A2 | Self::A3 | Self::A4 => 120,
            Self::A5 => 300,
            Self::A6 => 600,
            Self::A7 => 1,
            Self::A10 => 30,
        })
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for Criterion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_uppercase();
        Self::ALL
            .into_iter()
            .find(|c| c.to_string() == t)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown criterion {s:?}")))
    }
}

/// Parses a comma-separated list such as `A1,A7`.
pub fn parse_criteria(list: &str) -> Result<BTreeSet<Criterion>> {
    let set: BTreeSet<Criterion> = list
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty criteria list".into()));
    }
    Ok(set)
}

#[derive(Clone, Debug, Default)]
pub struct SuiteOptions {
    /// Criteria to report; `None` runs all.
    pub criteria: Option<BTreeSet<Criterion>>,
    /// Test hook: perturbs the Bessel reference table used by A1.
    pub corrupt_bessel_table: bool,
}

#[derive(Clone, Debug)]
pub struct CriterionReport {
    pub criterion: Criterion,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl fmt::Display for CriterionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:<4}{}  {}: {} [{:.2} s, budget {} s]",
            self.criterion.to_string(),
            if self.passed { "PASS" } else { "FAIL" },
            self.criterion.title(),
            self.detail,
            self.elapsed.as_secs_f64(),
            self.criterion.budget().as_secs()
        )
    }
}

struct Outcome {
    passed: bool,
    detail: String,
    physicality: Physicality,
}

impl Outcome {
    fn pure(passed: bool, detail: String) -> Self {
        Self {
            passed,
            detail,
            physicality: Physicality::default(),
        }
    }
}

/// Runs the selected criteria in order.  The returned reports are in
/// criterion order; an `Err` means a simulation aborted.
pub fn run_suite(options: &SuiteOptions, mut on_report: impl FnMut(&CriterionReport)) -> Result<Vec<CriterionReport>> {
    let selected: BTreeSet<Criterion> = options
        .criteria
        .clone()
        .unwrap_or_else(|| Criterion::ALL.into_iter().collect());
    let mut audit = Physicality::default();
    let mut audited = BTreeSet::new();
    let mut reports = Vec::new();
    let needs_audit = selected.contains(&Criterion::A6);
    for criterion in Criterion::ALL {
        let feeds_audit = criterion <= Criterion::A5 && needs_audit;
        if !selected.contains(&criterion) && !feeds_audit {
            continue;
        }
        let start = Instant::now();
        let outcome = match criterion {
            Criterion::A1 => a1(options.corrupt_bessel_table)?,
            Criterion::A2 => a2()?,
            Criterion::A3 => a3()?,
            Criterion::A4 => a4()?,
            Criterion::A5 => a5()?,
            Criterion::A6 => a6(&audit, &audited),
            Criterion::A7 => a7()?,
            Criterion::A8 => a8()?,
            Criterion::A9 => a9()?,
            Criterion::A10 => a10()?,
        };
        let elapsed = start.elapsed();
        if criterion <= Criterion::A5 {
            audit = audit.merge(outcome.physicality);
            audited.insert(criterion);
        }
        if selected.contains(&criterion) {
            let report = CriterionReport {
                criterion,
                passed: outcome.passed && elapsed <= criterion.budget(),
                detail: outcome.detail,
                elapsed,
            };
            on_report(&report);
            reports.push(report);
        }
    }
    Ok(reports)
}

fn reference_atom() -> AtomSpec<f64> {
    AtomSpec::two_level(GAMMA1)
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn classical_at(z: f64, dt: f64) -> Result<PulseSequence<f64>> {
    preset_classical(z / (2.0 * dt), dt, PERIOD_NS * NS, BEAT)
}

/// Sequential pulses with areas θ = ΩΔt.
fn sequential_at(theta1: f64, theta2: f64, first_tone: i32) -> Result<PulseSequence<f64>> {
    let dt = PULSE_NS * NS;
    preset_quantum(theta1 / dt, theta2 / dt, dt, dt, 0.0, PERIOD_NS * NS, BEAT, first_tone)
}

fn a1(corrupt: bool) -> Result<Outcome> {
    let atom = reference_atom();
    let dt = 0.01 / GAMMA1;
    let zs = linspace(0.0, 8.0, 33);
    let mut table: Vec<[f64; 4]> = zs
        .iter()
        .map(|&z| {
            let mut row = [0.0; 4];
            for (k, j) in row.iter_mut().enumerate() {
                *j = bessel_j(2 * k as u32 + 1, z)?;
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    if corrupt {
        for row in &mut table {
            row.reverse();
        }
    }
    let mut physicality = Physicality::default();
    let mut worst = (0.0f64, 0, 0.0);
    let mut compared = 0;
    for (&z, row) in zs.iter().zip(&table) {
        let seq = classical_at(z, dt)?;
        let run = phase_grid_run(&atom, &seq, 64, 7, None)?;
        physicality = physicality.merge(run.physicality);
        for (k, j) in row.iter().enumerate() {
            let expected = j * j / 4.0;
            if expected <= 1e-6 {
                continue;
            }
            for m in [2 * k as i32 + 1, -(2 * k as i32 + 1)] {
                let rel = (run.spectrum.photons(m) - expected) / expected;
                compared += 1;
                if rel.abs() > worst.0.abs() {
                    worst = (rel, m, z);
                }
            }
        }
    }
    Ok(Outcome {
        passed: worst.0.abs() < 0.02,
        detail: format!(
            "{compared} comparisons, worst relative error {:+.3e} at m = {}, 2ΩΔt = {} (tolerance 2e-2)",
            worst.0, worst.1, worst.2
        ),
        physicality,
    })
}

/// Refined position of the first interior local maximum of `ys` on the
/// uniform grid `xs`.
fn first_maximum(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let i = (1..ys.len() - 1).find(|&i| ys[i] > 0.0 && ys[i] >= ys[i - 1] && ys[i] > ys[i + 1])?;
    let h = xs[1] - xs[0];
    let curvature = ys[i - 1] - 2.0 * ys[i] + ys[i + 1];
    let shift = if curvature != 0.0 {
        0.5 * (ys[i - 1] - ys[i + 1]) / curvature
    } else {
        0.0
    };
    Some(xs[i] + h * shift)
}

fn a2() -> Result<Outcome> {
    let atom = reference_atom();
    let dt = PULSE_NS * NS;
    let zs = linspace(0.0, 12.0, 121);
    let mut physicality = Physicality::default();
    let mut curves = vec![Vec::new(); 4];
    for &z in &zs {
        let run = phase_grid_run(&atom, &classical_at(z, dt)?, 64, 7, None)?;
        physicality = physicality.merge(run.physicality);
        for (k, curve) in curves.iter_mut().enumerate() {
            curve.push(run.spectrum.photons(2 * k as i32 + 1));
        }
    }
    let mut passed = true;
    let mut parts = Vec::new();
    let mut previous = 0.0;
    for (k, curve) in curves.iter().enumerate() {
        let reference = DECAY_FREE_MAXIMA[k];
        match first_maximum(&zs, curve) {
            Some(z) => {
                let rel = (z - reference) / reference;
                passed &= rel.abs() < 0.10 && z > previous;
                previous = z;
                parts.push(format!("k={k}: {z:.3} vs {reference:.3} ({:+.1}%)", 100.0 * rel));
            }
            None => {
                passed = false;
                parts.push(format!("k={k}: no maximum"));
            }
        }
    }
    Ok(Outcome {
        passed,
        detail: format!("first maxima {}", parts.join(", ")),
        physicality,
    })
}

/// Checks that `spec` shows exactly `expected` at the default threshold and
/// that all other modes stay below 1e−4 of the strongest line.
fn peak_check(spec: &ModeSpectrum<f64>, expected: &[i32]) -> Result<(bool, f64, f64)> {
    let peaks = detect_peaks(spec, DEFAULT_THRESHOLD)?;
    let max = spec.max_photons();
    let weakest = expected
        .iter()
        .map(|&m| spec.photons(m) / max)
        .fold(f64::INFINITY, f64::min);
    let leak = spec
        .modes
        .iter()
        .filter(|(m, _)| !expected.contains(m))
        .map(|(_, l)| l.photons_per_cycle / max)
        .fold(0.0, f64::max);
    Ok((peaks == expected && leak < 1e-4, weakest, leak))
}

/// Emits over the A3 grid, returning (pass, detail, physicality).
fn sequential_grid(atom: &AtomSpec<f64>, first_tone: i32, expected: &[i32]) -> Result<Outcome> {
    let thetas = linspace(0.2 * PI, 0.8 * PI, 10);
    let mut physicality = Physicality::default();
    let mut failures = 0;
    let mut weakest = f64::INFINITY;
    let mut leak = 0.0f64;
    for &t1 in &thetas {
        for &t2 in &thetas {
            let run = phase_grid_run(atom, &sequential_at(t1, t2, first_tone)?, 32, 9, None)?;
            physicality = physicality.merge(run.physicality);
            let (ok, w, l) = peak_check(&run.spectrum, expected)?;
            failures += usize::from(!ok);
            weakest = weakest.min(w);
            leak = leak.max(l);
        }
    }
    Ok(Outcome {
        passed: failures == 0,
        detail: format!(
            "{} of 100 grid points give {expected:?}; weakest expected peak {weakest:.2e} of max, largest other mode {leak:.1e}",
            100 - failures
        ),
        physicality,
    })
}

fn a3() -> Result<Outcome> {
    sequential_grid(&reference_atom(), -1, &[-1, 1, 3])
}

fn a4() -> Result<Outcome> {
    let atom = AtomSpec::three_level(GAMMA1);
    let run = phase_grid_run(&atom, &sequential_at(0.5 * PI, 0.7 * PI, -1)?, 32, 9, None)?;
    let peaks = detect_peaks(&run.spectrum, DEFAULT_THRESHOLD)?;
    let emission = peaks.iter().filter(|&&m| m > 0).count();
    let absorption = peaks.iter().filter(|&&m| m < 0).count();
    let (ok, weakest, leak) = peak_check(&run.spectrum, &[-3, -1, 1, 3, 5])?;
    Ok(Outcome {
        passed: ok && emission == 3 && absorption == 2,
        detail: format!(
            "peaks {peaks:?}, {emission} emission / {absorption} absorption; weakest {weakest:.2e} of max, largest other mode {leak:.1e}"
        ),
        physicality: run.physicality,
    })
}

fn a5() -> Result<Outcome> {
    let atom = reference_atom();
    let cases = [
        ("classical", classical_at(0.8, PULSE_NS * NS)?),
        ("sequential", sequential_at(0.5 * PI, 0.7 * PI, -1)?),
    ];
    let mut physicality = Physicality::default();
    let mut worst = (0.0f64, "", 0);
    for (name, seq) in &cases {
        let n_periods = crate::spectrum::required_periods(seq);
        let grid = phase_grid_run(&atom, seq, 16, 4, None)?;
        let trace = time_trace_run(&atom, seq, n_periods, 4, None)?;
        physicality = physicality.merge(grid.physicality).merge(trace.physicality);
        for (&m, line) in &grid.spectrum.modes {
            let n = line.photons_per_cycle;
            if n <= 1e-8 {
                continue;
            }
            let rel = (trace.spectrum.photons(m) - n) / n;
            if rel.abs() > worst.0.abs() {
                worst = (rel, *name, m);
            }
        }
    }
    Ok(Outcome {
        passed: worst.0.abs() < 0.01,
        detail: format!(
            "worst relative difference {:+.3e} ({} preset, m = {}; tolerance 1e-2)",
            worst.0, worst.1, worst.2
        ),
        physicality,
    })
}

fn a6(audit: &Physicality, audited: &BTreeSet<Criterion>) -> Outcome {
    let complete = (1..=5).all(|i| audited.contains(&Criterion::ALL[i - 1]));
    Outcome::pure(
        complete && audit.within_contract(),
        format!(
            "max |Tr ρ − 1| = {:.1e}, max Hermiticity residual = {:.1e}, min eigenvalue = {:.1e}",
            audit.trace_error, audit.hermiticity, audit.min_eigenvalue
        ),
    )
}

fn a7() -> Result<Outcome> {
    let mut worst = 0.0f64;
    for i in 1..=20 {
        let z = 0.5 * i as f64;
        for j in 0..64 {
            let phi = 2.0 * PI * j as f64 / 64.0;
            worst = worst.max(jacobi_anger_residual(z, phi, 40)?);
        }
    }
    Ok(Outcome::pure(worst < 1e-10, format!("max residual {worst:.2e} (tolerance 1e-10)")))
}

fn a8() -> Result<Outcome> {
    let atom = AtomSpec::two_level(0.0);
    let thetas = linspace(0.0, PI, 20);
    let mut worst = 0.0f64;
    for &t1 in &thetas {
        for &t2 in &thetas {
            let sim = pulse_coherence_spectrum(&atom, &sequential_at(t1, t2, -1)?, 16, 5)?;
            let oracle = two_pulse_spectrum(t1, t2);
            for m in [-1, 1, 3] {
                worst = worst.max((sim[&m].norm() - oracle.magnitude(m)).abs());
            }
        }
    }
    let sym = pulse_coherence_spectrum(&atom, &sequential_at(0.5 * PI, PI, -1)?, 16, 5)?;
    let side = sym[&3].norm();
    let others = sym[&-1].norm().max(sym[&1].norm());
    Ok(Outcome::pure(
        worst < 1e-6 && (side - 0.5).abs() < 1e-6 && others < 1e-10,
        format!("max magnitude error {worst:.2e}; at (π/2, π) side peak {side:.12}, others {others:.1e}"),
    ))
}

fn a9() -> Result<Outcome> {
    let mut passed = true;
    let mut parts = Vec::new();
    let three = AtomSpec::three_level(GAMMA1);
    let two = reference_atom();
    for (n_ph, atom) in [(1u32, &two), (2u32, &three)] {
        let spec = phase_grid_run(atom, &sequential_at(0.5 * PI, 0.7 * PI, -1)?, 32, 9, None)?.spectrum;
        let detected = detect_peaks(&spec, DEFAULT_THRESHOLD)?.len();
        let predicted = predicted_peak_count(PhotonContent::Finite(n_ph));
        passed &= predicted == PeakCount::Finite(detected as u32);
        parts.push(format!("N_ph={n_ph}: predicted {predicted:?}, detected {detected}"));
    }
    let seq = classical_at(8.0, PULSE_NS * NS)?;
    let spec = phase_grid_run(&two, &seq, 64, 25, None)?.spectrum;
    let many = detect_peaks(&spec, 1e-6)?.len();
    let unbounded = predicted_peak_count(PhotonContent::Coherent) == PeakCount::Unbounded;
    passed &= many >= 7 && unbounded;
    parts.push(format!("classical 2ΩΔt = 8: {many} peaks above 1e-6 of max"));
    Ok(Outcome::pure(passed, parts.join("; ")))
}

fn a10() -> Result<Outcome> {
    let outcome = sequential_grid(&reference_atom(), 1, &[-3, -1, 1])?;
    Ok(Outcome::pure(outcome.passed, outcome.detail))
}

//! Emitted field and mode spectrum.
//!
//! Mode m is the e^{+imφ} Fourier component of the emission amplitude in the
//! beat phase φ and radiates at ω₀ + m·δω.  Field units are normalized so the
//! amplitude is the dipole-weighted coherence itself.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::atom::{evolve_beating, evolve_from, AtomSpec, DensityMatrix, Physicality, Trajectory};
use crate::error::{Error, Result};
use crate::pulse::PulseSequence;
use crate::scalar::{phasor, Real};

/// Default relative peak threshold (−30 dB).
pub const DEFAULT_THRESHOLD: f64 = 1e-3;

/// Emission amplitude Σ_j μ_j ρ_{j,j+1}(t) sampled along a trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct EmissionRecord<T> {
    pub beat_phase: T,
    pub samples: Vec<(T, Complex<T>)>,
}

impl<T: Real> EmissionRecord<T> {
    pub fn at_phase(mut self, beat_phase: T) -> Self {
        self.beat_phase = beat_phase;
        self
    }

    pub fn times(&self) -> impl Iterator<Item = T> + '_ {
        self.samples.iter().map(|s| s.0)
    }

    pub fn amplitudes(&self) -> impl Iterator<Item = Complex<T>> + '_ {
        self.samples.iter().map(|s| s.1)
    }
}

pub fn emission_amplitude<T: Real>(atom: &AtomSpec<T>, rho: &DensityMatrix<T>) -> Complex<T> {
    atom.transition_elements()
        .iter()
        .enumerate()
        .fold(Complex::new(T::zero(), T::zero()), |acc, (j, &mu)| acc + rho.get(j, j + 1) * mu)
}

pub fn emission_record<T: Real>(trajectory: &Trajectory<T>, atom: &AtomSpec<T>) -> EmissionRecord<T> {
    EmissionRecord {
        beat_phase: T::zero(),
        samples: trajectory
            .times
            .iter()
            .zip(&trajectory.states)
            .map(|(&t, rho)| (t, emission_amplitude(atom, rho)))
            .collect(),
    }
}

/// One spectral line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeLine<T> {
    pub amplitude: Complex<T>,
    pub photons_per_cycle: T,
}

/// Coherent emission per comb line ω₀ + m·δω, for one repetition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSpectrum<T> {
    pub d_omega: T,
    pub modes: BTreeMap<i32, ModeLine<T>>,
    /// All photons emitted per repetition, coherent and incoherent.
    pub total_photons: T,
}

impl<T: Real> ModeSpectrum<T> {
    pub fn photons(&self, m: i32) -> T {
        self.modes.get(&m).map_or(T::zero(), |l| l.photons_per_cycle)
    }

    pub fn amplitude(&self, m: i32) -> Complex<T> {
        self.modes
            .get(&m)
            .map_or(Complex::new(T::zero(), T::zero()), |l| l.amplitude)
    }

    pub fn max_photons(&self) -> T {
        self.modes
            .values()
            .fold(T::zero(), |acc, l| acc.max(l.photons_per_cycle))
    }

    pub fn coherent_photons(&self) -> T {
        self.modes.values().fold(T::zero(), |acc, l| acc + l.photons_per_cycle)
    }

    /// CSV with a header row; floats carry 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,re,im,photons_per_cycle\n");
        for (m, line) in &self.modes {
            let _ = writeln!(
                out,
                "{m},{},{},{}",
                fmt17(line.amplitude.re),
                fmt17(line.amplitude.im),
                fmt17(line.photons_per_cycle)
            );
        }
        out
    }
}

impl ModeSpectrum<f64> {
    pub fn to_json(&self) -> Result<String> {
        serde_json::to_string_pretty(self).map_err(|e| Error::Serialization(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Serialization(e.to_string()))
    }
}

/// Scientific notation with 17 significant digits.
pub fn fmt17<T: Real>(x: T) -> String {
    format!("{:.16e}", x.to_f64().unwrap_or(f64::NAN))
}

/// Spectrum with the physicality of every state visited while computing it.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectrumRun<T> {
    pub spectrum: ModeSpectrum<T>,
    pub physicality: Physicality,
}

/// Default integration step: 1/(50Γ₁), and never coarser than T_r/1000.
pub fn default_step<T: Real>(atom: &AtomSpec<T>, seq: &PulseSequence<T>) -> T {
    let by_period = seq.repetition_period / T::lit(1000.0);
    if atom.gamma1() > T::zero() {
        by_period.min(T::one() / (T::lit(50.0) * atom.gamma1()))
    } else {
        by_period
    }
}

/// One repetition from the ground state with the beat phase frozen at φ.
pub fn simulate_repetition<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    beat_phase: T,
    dt_max: T,
) -> Result<Trajectory<T>> {
    run_segments(atom, seq, beat_phase, dt_max, true)
}

fn run_segments<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    beat_phase: T,
    dt_max: T,
    with_tail: bool,
) -> Result<Trajectory<T>> {
    seq.validate()?;
    let mut rho = DensityMatrix::ground(atom.levels());
    let mut t = T::zero();
    let mut traj = Trajectory {
        times: vec![t],
        states: vec![rho.clone()],
    };
    let segments = if with_tail { seq.repetition() } else { seq.segments.clone() };
    for seg in segments.iter().filter(|s| s.duration > T::zero()) {
        let part = evolve_from(atom, &seg.tones, beat_phase, &rho, t, seg.duration, dt_max)?;
        rho = part.final_state().clone();
        t = t + seg.duration;
        traj.extend(part);
    }
    Ok(traj)
}

fn check_grid(grid_size: usize, max_mode: usize) -> Result<()> {
    let required = 2 * max_mode + 2;
    if grid_size < required {
        return Err(Error::GridTooSmall {
            grid_size,
            max_mode,
            required,
        });
    }
    Ok(())
}

fn grid_phase<T: Real>(j: usize, grid_size: usize) -> T {
    T::lit(2.0) * T::PI() * T::count(j) / T::count(grid_size)
}

fn trapezoid<T: Real>(times: &[T], values: impl Iterator<Item = Complex<T>>) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    let mut prev: Option<(T, Complex<T>)> = None;
    for (&t, v) in times.iter().zip(values) {
        if let Some((tp, vp)) = prev {
            acc = acc + (vp + v) * ((t - tp) * T::lit(0.5));
        }
        prev = Some((t, v));
    }
    acc
}

fn to_line<T: Real>(atom: &AtomSpec<T>, times: &[T], series: &[Complex<T>]) -> ModeLine<T> {
    let g = atom.gamma1();
    let weight = trapezoid(times, series.iter().map(|a| Complex::new(a.norm_sqr(), T::zero()))).re;
    let integral = trapezoid(times, series.iter().copied());
    ModeLine {
        amplitude: integral * (g * T::lit(0.5)),
        photons_per_cycle: g * weight,
    }
}

fn mode_range(max_mode: usize) -> impl Iterator<Item = i32> {
    let k = max_mode as i32;
    -k..=k
}

/// Spectrum from M one-repetition simulations at φ_j = 2πj/M.
///
/// For mode m, a_m(t) = (1/M)Σ_j A(t; φ_j)e^{−imφ_j}; N_m = Γ₁∫|a_m|²dt and the
/// reported amplitude is (Γ₁/2)∫a_m dt, which equals the post-pulse coherence
/// component when the pulses are short.
pub fn phase_grid_spectrum<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    grid_size: usize,
    max_mode: usize,
) -> Result<ModeSpectrum<T>> {
    Ok(phase_grid_run(atom, seq, grid_size, max_mode, None)?.spectrum)
}

/// Times, emission record, photon integral and physicality of one grid phase.
type GridSample<T> = (Vec<T>, Vec<Complex<T>>, T, Physicality);

/// [`phase_grid_spectrum`] with an explicit step and physicality diagnostics.
pub fn phase_grid_run<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    grid_size: usize,
    max_mode: usize,
    dt_max: Option<T>,
) -> Result<SpectrumRun<T>> {
    check_grid(grid_size, max_mode)?;
    let dt = dt_max.unwrap_or_else(|| default_step(atom, seq));
    let runs: Vec<GridSample<T>> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let traj = simulate_repetition(atom, seq, grid_phase(j, grid_size), dt)?;
            let rate_op = atom.emission_rate_operator();
            let total = trapezoid(&traj.times, traj.states.iter().map(|r| r.expectation(&rate_op))).re;
            let record = emission_record(&traj, atom);
            Ok((traj.times.clone(), record.amplitudes().collect(), total, traj.physicality()))
        })
        .collect::<Result<_>>()?;

    let times = &runs[0].0;
    let inv_m = T::one() / T::count(grid_size);
    let mut modes = BTreeMap::new();
    for m in mode_range(max_mode) {
        let mut series = vec![Complex::new(T::zero(), T::zero()); times.len()];
        for (j, run) in runs.iter().enumerate() {
            let w = phasor(-T::lit(f64::from(m)) * grid_phase::<T>(j, grid_size)) * inv_m;
            for (s, a) in series.iter_mut().zip(&run.1) {
                *s = *s + *a * w;
            }
        }
        modes.insert(m, to_line(atom, times, &series));
    }
    let total_photons = runs.iter().fold(T::zero(), |acc, r| acc + r.2) * inv_m;
    let physicality = runs
        .iter()
        .fold(Physicality::default(), |acc, r| acc.merge(r.3));
    Ok(SpectrumRun {
        spectrum: ModeSpectrum {
            d_omega: seq.detuning,
            modes,
            total_photons,
        },
        physicality,
    })
}

/// Fourier components of the emission amplitude right after the last pulse,
/// with no decay tail.  Meant for atoms with Γ₁ = 0, where they are the
/// coherent amplitudes c_m and |c_m|² the photons that the free decay would
/// release into mode m.
pub fn pulse_coherence_spectrum<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    grid_size: usize,
    max_mode: usize,
) -> Result<BTreeMap<i32, Complex<T>>> {
    check_grid(grid_size, max_mode)?;
    let dt = default_step(atom, seq);
    let finals: Vec<Complex<T>> = (0..grid_size)
        .into_par_iter()
        .map(|j| {
            let traj = run_segments(atom, seq, grid_phase(j, grid_size), dt, false)?;
            Ok(emission_amplitude(atom, traj.final_state()))
        })
        .collect::<Result<_>>()?;
    let inv_m = T::one() / T::count(grid_size);
    Ok(mode_range(max_mode)
        .map(|m| {
            let c = finals.iter().enumerate().fold(Complex::new(T::zero(), T::zero()), |acc, (j, a)| {
                acc + *a * phasor(-T::lit(f64::from(m)) * grid_phase::<T>(j, grid_size))
            });
            (m, c * inv_m)
        })
        .collect())
}

/// Repetitions needed to cover one beat cycle 2π/δω.
pub fn required_periods<T: Real>(seq: &PulseSequence<T>) -> usize {
    let p = seq.periods_per_beat();
    (p * (T::one() - T::epsilon() * T::lit(64.0)))
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
}

/// Spectrum from `n_periods` consecutive repetitions with the beat phase
/// advancing continuously, φ = δω·t, and the atom state carried across.
///
/// Demodulation is done per offset τ within a repetition:
/// a_m(τ) = (1/n)Σ_p A(pT_r + τ)e^{−imδω(pT_r + τ)}.  The repetitions sample
/// the beat at P = 2π/(δωT_r) phases, so lines m and m + P alias and
/// P ≥ 2·max_mode + 2 is required.  The state left over from one repetition
/// seeds the next; agreement with [`phase_grid_spectrum`] therefore needs
/// e^{−Γ₁T_r/2} to be negligible.
pub fn time_trace_spectrum<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    n_periods: usize,
    max_mode: usize,
) -> Result<ModeSpectrum<T>> {
    Ok(time_trace_run(atom, seq, n_periods, max_mode, None)?.spectrum)
}

pub fn time_trace_run<T: Real>(
    atom: &AtomSpec<T>,
    seq: &PulseSequence<T>,
    n_periods: usize,
    max_mode: usize,
    dt_max: Option<T>,
) -> Result<SpectrumRun<T>> {
    seq.validate()?;
    let required = required_periods(seq);
    if n_periods < required || n_periods == 0 {
        return Err(Error::TooFewPeriods {
            n_periods,
            required: required.max(1),
        });
    }
    let per_beat = seq.periods_per_beat() * (T::one() + T::epsilon() * T::lit(64.0));
    if per_beat < T::count(2 * max_mode + 2) {
        return Err(Error::GridTooSmall {
            grid_size: per_beat.floor().to_usize().unwrap_or(0),
            max_mode,
            required: 2 * max_mode + 2,
        });
    }
    let dt = dt_max.unwrap_or_else(|| default_step(atom, seq));
    let repetition = seq.repetition();
    let rate_op = atom.emission_rate_operator();

    let mut rho = DensityMatrix::ground(atom.levels());
    let mut periods: Vec<(Vec<T>, Vec<Complex<T>>)> = Vec::with_capacity(n_periods);
    let mut total = T::zero();
    let mut physicality = Physicality::default();
    for p in 0..n_periods {
        let t0 = T::count(p) * seq.repetition_period;
        let mut t = t0;
        let mut traj = Trajectory {
            times: vec![t],
            states: vec![rho.clone()],
        };
        for seg in repetition.iter().filter(|s| s.duration > T::zero()) {
            let part = evolve_beating(atom, &seg.tones, seq.detuning, &rho, t, seg.duration, dt)?;
            rho = part.final_state().clone();
            t = t + seg.duration;
            traj.extend(part);
        }
        physicality = physicality.merge(traj.physicality());
        total = total + trapezoid(&traj.times, traj.states.iter().map(|r| r.expectation(&rate_op))).re;
        let record = emission_record(&traj, atom);
        periods.push((traj.times, record.amplitudes().collect()));
    }

    let offsets: Vec<T> = periods[0].0.iter().map(|&t| t - periods[0].0[0]).collect();
    let inv_n = T::one() / T::count(n_periods);
    let mut modes = BTreeMap::new();
    for m in mode_range(max_mode) {
        let freq = T::lit(f64::from(m)) * seq.detuning;
        let mut series = vec![Complex::new(T::zero(), T::zero()); offsets.len()];
        for (times, amps) in &periods {
            for ((s, &t), a) in series.iter_mut().zip(times).zip(amps) {
                *s = *s + *a * phasor(-freq * t) * inv_n;
            }
        }
        modes.insert(m, to_line(atom, &offsets, &series));
    }
    Ok(SpectrumRun {
        spectrum: ModeSpectrum {
            d_omega: seq.detuning,
            modes,
            total_photons: total * inv_n,
        },
        physicality,
    })
}

/// Modes carrying at least `rel_threshold` of the strongest line, ascending.
pub fn detect_peaks<T: Real>(spectrum: &ModeSpectrum<T>, rel_threshold: T) -> Result<Vec<i32>> {
    if !(rel_threshold > T::zero() && rel_threshold < T::one()) {
        return Err(Error::InvalidArgument(format!(
            "peak threshold must lie in (0, 1), got {rel_threshold}"
        )));
    }
    let max = spectrum.max_photons();
    if max <= T::zero() {
        return Ok(Vec::new());
    }
    let cut = rel_threshold * max;
    Ok(spectrum
        .modes
        .iter()
        .filter(|(_, l)| l.photons_per_cycle >= cut)
        .map(|(&m, _)| m)
        .collect())
}

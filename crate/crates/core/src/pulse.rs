//! Pulse protocols: simultaneous two-tone pulses (classical mixing),
//! sequential single-tone pulses (quantum mixing), and sweeps over them.
//!
//! Times are in seconds and frequencies in rad/s.

use serde::{Deserialize, Serialize};

use crate::atom::{AtomSpec, DriveTone};
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSegment<T> {
    /// Empty means free decay.
    pub tones: Vec<DriveTone<T>>,
    pub duration: T,
}

impl<T: Real> PulseSegment<T> {
    pub fn new(tones: Vec<DriveTone<T>>, duration: T) -> Self {
        Self { tones, duration }
    }

    pub fn free(duration: T) -> Self {
        Self {
            tones: Vec::new(),
            duration,
        }
    }

    pub fn is_free(&self) -> bool {
        self.tones.iter().all(|t| t.rabi_amplitude == T::zero())
    }
}

/// Parameters a sequence was generated from, kept so that sweeps can
/// regenerate it with one parameter changed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum Protocol<T> {
    /// Two simultaneous equal-amplitude tones at m = ∓1.
    Classical { omega_rabi: T, dt: T },
    /// A pulse at m = `first_tone`, an optional gap, then a pulse at m = −`first_tone`.
    Quantum {
        omega1: T,
        omega2: T,
        dt1: T,
        dt2: T,
        gap: T,
        first_tone: i32,
    },
    /// Hand-built segment list.
    Custom,
}

/// One repetition of the drive.  Segments run back to back from t = 0; the
/// remainder of the repetition period is free decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence<T> {
    pub segments: Vec<PulseSegment<T>>,
    /// T_r in seconds.
    pub repetition_period: T,
    /// δω in rad/s.
    pub detuning: T,
    pub protocol: Protocol<T>,
}

impl<T: Real> PulseSequence<T> {
    pub fn new(segments: Vec<PulseSegment<T>>, repetition_period: T, detuning: T) -> Result<Self> {
        let seq = Self {
            segments,
            repetition_period,
            detuning,
            protocol: Protocol::Custom,
        };
        seq.validate()?;
        Ok(seq)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.repetition_period.is_finite() && self.repetition_period > T::zero()) {
            return Err(Error::InvalidSequence("repetition period must be positive".into()));
        }
        if !(self.detuning.is_finite() && self.detuning > T::zero()) {
            return Err(Error::InvalidSequence("detuning must be positive".into()));
        }
        for seg in &self.segments {
            if !(seg.duration.is_finite() && seg.duration >= T::zero()) {
                return Err(Error::InvalidSequence("segment durations must be non-negative".into()));
            }
            for tone in &seg.tones {
                tone.validate()?;
            }
        }
        let total = self.pulse_duration();
        let slack = self.repetition_period * T::epsilon() * T::lit(16.0);
        if total > self.repetition_period + slack {
            return Err(Error::InvalidSequence(format!(
                "segments last {total} s, longer than the repetition period {} s",
                self.repetition_period
            )));
        }
        Ok(())
    }

    /// Total duration of the explicit segments.
    pub fn pulse_duration(&self) -> T {
        self.segments.iter().fold(T::zero(), |s, seg| s + seg.duration)
    }

    /// Free decay after the last segment until the next repetition.
    pub fn tail_duration(&self) -> T {
        (self.repetition_period - self.pulse_duration()).max(T::zero())
    }

    /// Segments followed by the free-decay tail, i.e. one whole repetition.
    pub fn repetition(&self) -> Vec<PulseSegment<T>> {
        let mut all = self.segments.clone();
        all.push(PulseSegment::free(self.tail_duration()));
        all
    }

    /// Beat cycles are 2π/δω long; this many repetitions cover one.
    pub fn periods_per_beat(&self) -> T {
        T::lit(2.0) * T::PI() / (self.detuning * self.repetition_period)
    }

    /// Largest |m| over all tones.
    pub fn max_tone_index(&self) -> u32 {
        self.segments
            .iter()
            .flat_map(|s| s.tones.iter())
            .map(|t| t.mode_index.unsigned_abs())
            .max()
            .unwrap_or(0)
    }

    /// Advisory: mixing lines stay resolved only while δω ≲ Γ₁/2.
    pub fn detuning_warning(&self, atom: &AtomSpec<T>) -> Option<String> {
        let limit = atom.gamma1() / T::lit(2.0);
        (self.detuning > limit).then(|| {
            format!(
                "detuning {} rad/s exceeds gamma1/2 = {} rad/s; the beat is no longer slow",
                self.detuning, limit
            )
        })
    }

    /// Same sequence with zero-length segments removed.
    pub fn without_empty_segments(&self) -> Self {
        Self {
            segments: self
                .segments
                .iter()
                .filter(|s| s.duration > T::zero())
                .cloned()
                .collect(),
            ..self.clone()
        }
    }

    /// Mirror every tone m → −m.
    pub fn mirrored(&self) -> Self {
        let mut out = self.clone();
        for seg in &mut out.segments {
            for tone in &mut seg.tones {
                tone.mode_index = -tone.mode_index;
            }
        }
        out.protocol = match self.protocol {
            Protocol::Quantum {
                omega1,
                omega2,
                dt1,
                dt2,
                gap,
                first_tone,
            } => Protocol::Quantum {
                omega1,
                omega2,
                dt1,
                dt2,
                gap,
                first_tone: -first_tone,
            },
            p => p,
        };
        out
    }

    /// Adds a common phase offset to every tone.
    pub fn with_global_phase(&self, phase: T) -> Self {
        let mut out = self.clone();
        for seg in &mut out.segments {
            for tone in &mut seg.tones {
                tone.phase_offset = tone.phase_offset + phase;
            }
        }
        out.protocol = Protocol::Custom;
        out
    }
}

fn require_non_negative<T: Real>(name: &str, value: T) -> Result<()> {
    if !(value.is_finite() && value >= T::zero()) {
        return Err(Error::InvalidSequence(format!("{name} must be finite and non-negative")));
    }
    Ok(())
}

/// Two simultaneous tones at ω₋ and ω₊ with equal Rabi frequency for `dt`,
/// then free decay until `t_r`.
pub fn preset_classical<T: Real>(omega_rabi: T, dt: T, t_r: T, d_omega: T) -> Result<PulseSequence<T>> {
    require_non_negative("omega_rabi", omega_rabi)?;
    require_non_negative("dt", dt)?;
    if dt > t_r {
        return Err(Error::InvalidSequence(format!("pulse length {dt} s exceeds the period {t_r} s")));
    }
    let tones = vec![DriveTone::new(-1, omega_rabi), DriveTone::new(1, omega_rabi)];
    let mut seq = PulseSequence::new(vec![PulseSegment::new(tones, dt)], t_r, d_omega)?;
    seq.protocol = Protocol::Classical { omega_rabi, dt };
    Ok(seq)
}

/// Pulse at m = `first_tone` (Ω₁, dt1), a free gap, then a pulse at
/// m = −`first_tone` (Ω₂, dt2).  `first_tone = −1` is the ω₋-then-ω₊ order.
#[allow(clippy::too_many_arguments)]
pub fn preset_quantum<T: Real>(
    omega1: T,
    omega2: T,
    dt1: T,
    dt2: T,
    gap: T,
    t_r: T,
    d_omega: T,
    first_tone: i32,
) -> Result<PulseSequence<T>> {
    if first_tone.abs() != 1 {
        return Err(Error::InvalidSequence(format!("first_tone must be +1 or -1, got {first_tone}")));
    }
    for (name, v) in [("omega1", omega1), ("omega2", omega2), ("dt1", dt1), ("dt2", dt2), ("gap", gap)] {
        require_non_negative(name, v)?;
    }
    if dt1 + gap + dt2 > t_r {
        return Err(Error::InvalidSequence(format!(
            "dt1 + gap + dt2 = {} s exceeds the period {t_r} s",
            dt1 + gap + dt2
        )));
    }
    let segments = vec![
        PulseSegment::new(vec![DriveTone::new(first_tone, omega1)], dt1),
        PulseSegment::free(gap),
        PulseSegment::new(vec![DriveTone::new(-first_tone, omega2)], dt2),
    ];
    let mut seq = PulseSequence::new(segments, t_r, d_omega)?;
    seq.protocol = Protocol::Quantum {
        omega1,
        omega2,
        dt1,
        dt2,
        gap,
        first_tone,
    };
    Ok(seq)
}

/// Parameter varied by [`sweep_grid`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParameter {
    OmegaRabi,
    Dt,
    Omega1,
    Omega2,
}

impl SweepParameter {
    pub fn name(self) -> &'static str {
        match self {
            Self::OmegaRabi => "omega_rabi",
            Self::Dt => "dt",
            Self::Omega1 => "omega1",
            Self::Omega2 => "omega2",
        }
    }
}

/// One sequence per value, each regenerated from `base`'s protocol with the
/// chosen parameter replaced.
pub fn sweep_grid<T: Real>(
    base: &PulseSequence<T>,
    parameter: SweepParameter,
    values: &[T],
) -> Result<Vec<PulseSequence<T>>> {
    if values.is_empty() {
        return Err(Error::InvalidArgument("sweep needs at least one value".into()));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("sweep values"));
    }
    let (t_r, d_omega) = (base.repetition_period, base.detuning);
    values
        .iter()
        .map(|&v| match (base.protocol, parameter) {
            (Protocol::Classical { dt, .. }, SweepParameter::OmegaRabi) => preset_classical(v, dt, t_r, d_omega),
            (Protocol::Classical { omega_rabi, .. }, SweepParameter::Dt) => {
                preset_classical(omega_rabi, v, t_r, d_omega)
            }
            (
                Protocol::Quantum {
                    omega2,
                    dt1,
                    dt2,
                    gap,
                    first_tone,
                    ..
                },
                SweepParameter::Omega1,
            ) => preset_quantum(v, omega2, dt1, dt2, gap, t_r, d_omega, first_tone),
            (
                Protocol::Quantum {
                    omega1,
                    dt1,
                    dt2,
                    gap,
                    first_tone,
                    ..
                },
                SweepParameter::Omega2,
            ) => preset_quantum(omega1, v, dt1, dt2, gap, t_r, d_omega, first_tone),
            (protocol, p) => Err(Error::InvalidArgument(format!(
                "parameter {} does not apply to {protocol:?}",
                p.name()
            ))),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    const NS: f64 = 1e-9;

    #[test]
    fn classical_preset_structure() {
        let d_omega = 2.0 * PI * 10e3;
        let seq = preset_classical(1e8, 2.0 * NS, 100.0 * NS, d_omega).unwrap();
        assert_eq!(seq.segments.len(), 1);
        let tones = &seq.segments[0].tones;
        assert_eq!(tones.iter().map(|t| t.mode_index).collect::<Vec<_>>(), vec![-1, 1]);
        assert!(tones.iter().all(|t| t.rabi_amplitude == 1e8 && t.phase_offset == 0.0));
        assert!((seq.tail_duration() - 98.0 * NS).abs() < 1e-20);
        assert_eq!(seq.repetition().len(), 2);
        assert_eq!(seq.detuning, d_omega);
    }

    #[test]
    fn classical_preset_errors_and_degenerate_cases() {
        assert!(preset_classical(1e8, 200.0 * NS, 100.0 * NS, 1e6).is_err());
        assert!(preset_classical(1e8, 2.0 * NS, 100.0 * NS, 0.0).is_err());
        assert!(preset_classical(-1.0, 2.0 * NS, 100.0 * NS, 1e6).is_err());
        let silent = preset_classical(1e8, 0.0, 100.0 * NS, 1e6).unwrap();
        assert_eq!(silent.pulse_duration(), 0.0);
        let undriven = preset_classical(0.0, 2.0 * NS, 100.0 * NS, 1e6).unwrap();
        assert!(undriven.segments[0].is_free());
    }

    #[test]
    fn quantum_preset_structure() {
        let seq = preset_quantum(1e8, 2e8, 2.0 * NS, 3.0 * NS, 1.0 * NS, 100.0 * NS, 1e6, -1).unwrap();
        assert_eq!(seq.segments.len(), 3);
        assert_eq!(seq.segments[0].tones[0].mode_index, -1);
        assert!(seq.segments[1].tones.is_empty());
        assert_eq!(seq.segments[2].tones[0].mode_index, 1);
        assert_eq!(seq.segments[2].tones[0].rabi_amplitude, 2e8);
        assert!((seq.tail_duration() - 94.0 * NS).abs() < 1e-20);

        let mirrored = preset_quantum(1e8, 2e8, 2.0 * NS, 3.0 * NS, 1.0 * NS, 100.0 * NS, 1e6, 1).unwrap();
        assert_eq!(mirrored, seq.mirrored());
    }

    #[test]
    fn quantum_preset_errors() {
        assert!(preset_quantum(1e8, 1e8, 50.0 * NS, 50.0 * NS, 1.0 * NS, 100.0 * NS, 1e6, -1).is_err());
        assert!(preset_quantum(1e8, 1e8, 2.0 * NS, 2.0 * NS, 0.0, 100.0 * NS, 1e6, 0).is_err());
        assert!(preset_quantum(1e8, 1e8, 2.0 * NS, -2.0 * NS, 0.0, 100.0 * NS, 1e6, 1).is_err());
    }

    #[test]
    fn quantum_preset_reduces_to_single_pulse() {
        let seq = preset_quantum(1e8, 5e8, 2.0 * NS, 0.0, 0.0, 100.0 * NS, 1e6, -1).unwrap();
        let single = PulseSequence::new(
            vec![PulseSegment::new(vec![DriveTone::new(-1, 1e8)], 2.0 * NS)],
            100.0 * NS,
            1e6,
        )
        .unwrap();
        assert_eq!(seq.without_empty_segments().segments, single.segments);
        // and with dt1 = 0 only the second tone remains
        let second_only = preset_quantum(1e8, 5e8, 0.0, 2.0 * NS, 0.0, 100.0 * NS, 1e6, -1).unwrap();
        let kept = second_only.without_empty_segments();
        assert_eq!(kept.segments.len(), 1);
        assert_eq!(kept.segments[0].tones[0].mode_index, 1);
    }

    #[test]
    fn presets_are_referentially_transparent() {
        let a = preset_quantum(1.5e8, 2e8, 2.0 * NS, 2.0 * NS, 0.0, 100.0 * NS, 1e6, -1).unwrap();
        let b = preset_quantum(1.5e8, 2e8, 2.0 * NS, 2.0 * NS, 0.0, 100.0 * NS, 1e6, -1).unwrap();
        assert_eq!(a, b);
        let json = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<PulseSequence<f64>>(&json).unwrap(), a);
    }

    #[test]
    fn sweeps_change_only_the_swept_parameter() {
        let base = preset_classical(1e8, 2.0 * NS, 100.0 * NS, 1e6).unwrap();
        let values: Vec<f64> = (0..50).map(|i| 1e7 * i as f64).collect();
        let grid = sweep_grid(&base, SweepParameter::OmegaRabi, &values).unwrap();
        assert_eq!(grid.len(), 50);
        for (seq, &v) in grid.iter().zip(&values) {
            assert_eq!(seq.protocol, Protocol::Classical { omega_rabi: v, dt: 2.0 * NS });
            assert_eq!(seq.repetition_period, base.repetition_period);
            assert_eq!(seq.detuning, base.detuning);
        }
        let dts = sweep_grid(&base, SweepParameter::Dt, &[1.0 * NS, 3.0 * NS]).unwrap();
        assert_eq!(dts[1].segments[0].duration, 3.0 * NS);
    }

    #[test]
    fn nested_sweeps_build_a_two_dimensional_grid() {
        let base = preset_quantum(1e8, 1e8, 2.0 * NS, 2.0 * NS, 0.0, 100.0 * NS, 1e6, -1).unwrap();
        let omegas = [1e8, 2e8, 3e8];
        let grid: Vec<PulseSequence<f64>> = sweep_grid(&base, SweepParameter::Omega1, &omegas)
            .unwrap()
            .iter()
            .flat_map(|row| sweep_grid(row, SweepParameter::Omega2, &omegas).unwrap())
            .collect();
        assert_eq!(grid.len(), 9);
        assert_eq!(grid[5].segments[0].tones[0].rabi_amplitude, 2e8);
        assert_eq!(grid[5].segments[2].tones[0].rabi_amplitude, 3e8);
    }

    #[test]
    fn sweep_errors() {
        let base = preset_classical(1e8, 2.0 * NS, 100.0 * NS, 1e6).unwrap();
        assert!(sweep_grid(&base, SweepParameter::OmegaRabi, &[]).is_err());
        assert!(sweep_grid(&base, SweepParameter::Omega1, &[1.0]).is_err());
        assert!(sweep_grid(&base, SweepParameter::OmegaRabi, &[f64::NAN]).is_err());
        let custom = PulseSequence::new(vec![PulseSegment::free(1.0 * NS)], 100.0 * NS, 1e6).unwrap();
        assert!(sweep_grid(&custom, SweepParameter::Dt, &[1.0]).is_err());
    }

    #[test]
    fn sequence_validation() {
        assert!(PulseSequence::new(vec![PulseSegment::<f64>::free(2.0)], 1.0, 1.0).is_err());
        assert!(PulseSequence::new(vec![PulseSegment::<f64>::free(1.0)], 1.0, 1.0).is_ok());
        assert!(PulseSequence::new(vec![PulseSegment::<f64>::free(0.5)], 1.0, -1.0).is_err());
    }

    #[test]
    fn detuning_warning_above_half_gamma() {
        let atom = AtomSpec::<f64>::two_level(2.0 * PI * 20e6);
        let slow = preset_classical(1e8, 2.0 * NS, 100.0 * NS, atom.gamma1() / 20.0).unwrap();
        assert!(slow.detuning_warning(&atom).is_none());
        let fast = preset_classical(1e8, 2.0 * NS, 100.0 * NS, atom.gamma1()).unwrap();
        assert!(fast.detuning_warning(&atom).is_some());
        assert!((slow.periods_per_beat() - 10.0).abs() < 1e-9);
    }
}

//! Closed-form predictions for wave mixing on a single atom.
//!
//! These are independent of the master-equation machinery and serve as the
//! reference the simulator is checked against: the Bessel law for classical
//! two-tone mixing, its Jacobi–Anger origin, the three-line spectrum of two
//! sequential pulses, photonic state constructors and the peak-count law.

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::special::bessel_j;

/// Mode amplitude ⟨b_{2k+1}⟩ = (−1)^k/2 · J_{2k+1}(2ΩΔt) of classical mixing
/// in the short-pulse limit.
pub fn classical_mode_amplitude<T: Real>(k: u32, omega_rabi: T, dt: T) -> Result<Complex<T>> {
    let z = T::lit(2.0) * omega_rabi * dt;
    if !z.is_finite() {
        return Err(Error::NonFinite("pulse area"));
    }
    let sign = if k.is_multiple_of(2) { T::one() } else { -T::one() };
    let j = bessel_j(2 * k + 1, z)?;
    Ok(Complex::new(sign * j / T::lit(2.0), T::zero()))
}

/// Photons per cycle J²_{2k+1}(2ΩΔt)/4 emitted into mode ±(2k+1).
pub fn classical_photons<T: Real>(k: u32, omega_rabi: T, dt: T) -> Result<T> {
    Ok(classical_mode_amplitude(k, omega_rabi, dt)?.norm_sqr())
}

/// |sin(z·cos φ) − 2·Σ_{k=0}^{K} (−1)^k J_{2k+1}(z) cos((2k+1)φ)|.
pub fn jacobi_anger_residual<T: Real>(z: T, phi: T, terms: u32) -> Result<T> {
    let mut series = T::zero();
    for k in 0..=terms {
        let order = 2 * k + 1;
        let sign = if k % 2 == 0 { T::one() } else { -T::one() };
        series = series + sign * bessel_j(order, z)? * (T::from_u32(order).unwrap() * phi).cos();
    }
    Ok(((z * phi.cos()).sin() - T::lit(2.0) * series).abs())
}

/// Predicted spectral lines: mode indices (strictly increasing) and their
/// complex amplitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeakPrediction<T> {
    pub modes: Vec<i32>,
    pub amplitudes: Vec<Complex<T>>,
}

impl<T: Real> PeakPrediction<T> {
    /// Amplitude of mode `m`, zero when the mode is absent.
    pub fn amplitude(&self, m: i32) -> Complex<T> {
        self.modes
            .iter()
            .position(|&x| x == m)
            .map_or_else(Complex::zero, |i| self.amplitudes[i])
    }

    pub fn magnitude(&self, m: i32) -> T {
        self.amplitude(m).norm()
    }
}

/// Final-coherence Fourier components after a pulse of area θ₁ at ω₋ followed
/// by a pulse of area θ₂ at ω₊ on a two-level atom, without decay.
///
/// Convention: ρ_ge carries e^{+imφ} for mode m, so the lone mixing line sits
/// at m = +3 (2ω₊ − ω₋).
pub fn two_pulse_spectrum<T: Real>(theta1: T, theta2: T) -> PeakPrediction<T> {
    let half = T::lit(0.5);
    let i_half = Complex::new(T::zero(), half);
    let (s1, c1) = theta1.sin_cos();
    let s2 = theta2.sin();
    let cos_sq = (theta2 * half).cos().powi(2);
    let sin_sq = (theta2 * half).sin().powi(2);
    PeakPrediction {
        modes: vec![-1, 1, 3],
        amplitudes: vec![i_half * (s1 * cos_sq), i_half * (s2 * c1), -i_half * (s1 * sin_sq)],
    }
}

/// Truncated photon-number (Fock) expansion c_0 … c_N of a field state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector<T> {
    coefficients: Vec<Complex<T>>,
}

impl<T: Real> FockVector<T> {
    /// Normalizes `coefficients` to unit norm.
    pub fn normalized(coefficients: Vec<Complex<T>>) -> Result<Self> {
        let norm = coefficients.iter().fold(T::zero(), |s, c| s + c.norm_sqr()).sqrt();
        if coefficients.is_empty() || !(norm > T::zero() && norm.is_finite()) {
            return Err(Error::InvalidArgument("Fock coefficients must be finite and non-zero".into()));
        }
        Ok(Self {
            coefficients: coefficients.into_iter().map(|c| c / norm).collect(),
        })
    }

    pub fn truncation(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[Complex<T>] {
        &self.coefficients
    }

    pub fn norm_sqr(&self) -> T {
        self.coefficients.iter().fold(T::zero(), |s, c| s + c.norm_sqr())
    }

    /// Highest photon number with a non-zero coefficient.
    pub fn max_photons(&self) -> usize {
        self.coefficients.iter().rposition(|c| !c.is_zero()).unwrap_or(0)
    }
}

/// Photonic states a single atom can map onto the field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PhotonState<T> {
    /// Coherent state |α⟩ truncated at `truncation` photons.
    Coherent { alpha: Complex<T>, truncation: usize },
    /// |cos(θ/2)|·(|0⟩ + β|1⟩), β = tan(θ/2), released by a two-level atom.
    ZeroOne { theta: T },
    /// (|0⟩ + γ₁|1⟩ + γ₂|2⟩)/√(1 + |γ₁|² + |γ₂|²), released by a three-level atom.
    TwoPhoton { gamma1: Complex<T>, gamma2: Complex<T> },
}

pub fn make_state<T: Real>(state: PhotonState<T>) -> Result<FockVector<T>> {
    match state {
        PhotonState::Coherent { alpha, truncation } => {
            let mean = alpha.norm_sqr();
            if truncation == 0 || mean / T::count(truncation) >= T::lit(0.5) || mean.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "truncation {truncation} too small for |alpha|^2 = {mean}; need |alpha|^2 / N < 1/2"
                )));
            }
            let prefactor = (-mean / T::lit(2.0)).exp();
            let mut coeffs = Vec::with_capacity(truncation + 1);
            let mut term = Complex::new(prefactor, T::zero());
            for n in 0..=truncation {
                if n > 0 {
                    term = term * alpha / T::count(n).sqrt();
                }
                coeffs.push(term);
            }
            FockVector::normalized(coeffs)
        }
        PhotonState::ZeroOne { theta } => {
            if !theta.is_finite() {
                return Err(Error::NonFinite("theta"));
            }
            let (s, c) = (theta / T::lit(2.0)).sin_cos();
            // |cos|·(1, tan) without dividing by a vanishing cosine
            let sign = if c < T::zero() { -T::one() } else { T::one() };
            FockVector::normalized(vec![Complex::new(c.abs(), T::zero()), Complex::new(sign * s, T::zero())])
        }
        PhotonState::TwoPhoton { gamma1, gamma2 } => {
            FockVector::normalized(vec![Complex::new(T::one(), T::zero()), gamma1, gamma2])
        }
    }
}

/// Photon content of the probed state.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhotonContent {
    /// Superposition of Fock states up to this many photons.
    Finite(u32),
    /// Classical coherent field, infinitely many Fock components.
    Coherent,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeakCount {
    Finite(u32),
    Unbounded,
}

/// N_peaks = 2·N_ph + 1.
pub fn predicted_peak_count(content: PhotonContent) -> PeakCount {
    match content {
        PhotonContent::Finite(n) => PeakCount::Finite(2 * n + 1),
        PhotonContent::Coherent => PeakCount::Unbounded,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

    fn c(re: f64, im: f64) -> Complex<f64> {
        Complex::new(re, im)
    }

    /// ρ_ge after brute-force composition of the two 2×2 pulse rotations at beat phase φ.
    fn brute_rho_ge(theta1: f64, theta2: f64, phi: f64) -> Complex<f64> {
        // a tone at mode m couples through e^{-imφ}σ⁺ + h.c.; rotation angle θ
        let rot = |theta: f64, m: f64, g: Complex<f64>, e: Complex<f64>| {
            let (s, co) = (theta / 2.0).sin_cos();
            let up = c((m * phi).cos(), -(m * phi).sin());
            let new_g = g * co - c(0.0, 1.0) * s * up.conj() * e;
            let new_e = e * co - c(0.0, 1.0) * s * up * g;
            (new_g, new_e)
        };
        let (g, e) = rot(theta1, -1.0, c(1.0, 0.0), c(0.0, 0.0));
        let (g, e) = rot(theta2, 1.0, g, e);
        g * e.conj()
    }

    /// Discrete Fourier coefficient of ρ_ge(φ) for mode m ↔ e^{+imφ}.
    fn brute_force_two_pulse(theta1: f64, theta2: f64, grid: usize, m: i32) -> Complex<f64> {
        let mut acc = c(0.0, 0.0);
        for j in 0..grid {
            let phi = 2.0 * PI * j as f64 / grid as f64;
            let w = -(m as f64) * phi;
            acc += brute_rho_ge(theta1, theta2, phi) * c(w.cos(), w.sin());
        }
        acc / grid as f64
    }

    #[test]
    fn classical_amplitude_examples() {
        assert_eq!(classical_mode_amplitude(0, 0.0, 1.0).unwrap(), c(0.0, 0.0));
        // 2ΩΔt at the first J_1 maximum
        let z = 1.841_183_781_340_659;
        let a: Complex<f64> = classical_mode_amplitude(0, z / 2.0, 1.0).unwrap();
        assert!((a.norm() - 0.290_932_612_140_798_f64).abs() < 1e-12);
        assert!((classical_photons(0, z / 2.0, 1.0).unwrap() - 0.290_932_612_140_798f64.powi(2)).abs() < 1e-12);
        // sign alternates with k
        let b = classical_mode_amplitude(1, 2.0, 1.0).unwrap();
        assert!(b.re < 0.0);
    }

    #[test]
    fn first_maxima_delayed_with_order() {
        let mut previous = 0.0;
        for k in 0..4 {
            let zs: Vec<f64> = (1..=1200).map(|i| i as f64 * 0.01).collect();
            let n: Vec<f64> = zs.iter().map(|&z| classical_photons(k, z / 2.0, 1.0).unwrap()).collect();
            let first = (1..n.len() - 1).find(|&i| n[i] >= n[i - 1] && n[i] >= n[i + 1]).unwrap();
            assert!(zs[first] > previous, "k={k}");
            // grows roughly linearly in k + 1
            assert!((zs[first] / (k as f64 + 1.0) - 2.0).abs() < 0.25, "k={k}: {}", zs[first]);
            previous = zs[first];
        }
        // at fixed argument, higher orders carry fewer photons
        for k in 0..5 {
            assert!(classical_photons(k, 0.5, 1.0).unwrap() > classical_photons(k + 1, 0.5, 1.0).unwrap());
        }
    }

    #[test]
    fn jacobi_anger_examples() {
        assert_eq!(jacobi_anger_residual(0.0, 1.3, 5).unwrap(), 0.0);
        for j in 0..16 {
            let phi = 2.0 * PI * j as f64 / 16.0;
            assert!(jacobi_anger_residual(5.0, phi, 40).unwrap() < 1e-10);
        }
        // single-term truncation is dominated by the J_3 term
        let r: f64 = jacobi_anger_residual(3.0, 0.0, 0).unwrap();
        let j3: f64 = bessel_j(3, 3.0).unwrap();
        assert!(r > 0.1 && r < 1.0, "{r}");
        assert!((r - 2.0 * j3).abs() < 0.1, "{r} vs {}", 2.0 * j3);
    }

    #[test]
    fn sine_square_average_parseval() {
        // (1/2π)∫ sin²(z cos φ) dφ = 2 Σ_k J²_{2k+1}(z)
        for i in 1..=20 {
            let z = 0.5 * i as f64;
            let grid = 512;
            let avg = (0..grid)
                .map(|j| (z * (2.0 * PI * j as f64 / grid as f64).cos()).sin().powi(2))
                .sum::<f64>()
                / grid as f64;
            let series: f64 = (0..40).map(|k| bessel_j(2 * k + 1, z).unwrap().powi(2)).sum::<f64>() * 2.0;
            assert!((avg - series).abs() < 1e-10, "z={z}");
        }
    }

    #[test]
    fn two_pulse_matches_brute_force() {
        for &(t1, t2) in &[(FRAC_PI_2, PI), (0.3, 2.0), (2.5, 0.7), (1.0, 1.0), (0.0, 1.2), (1.3, 0.0)] {
            let pred = two_pulse_spectrum(t1, t2);
            for m in -5..=5 {
                let brute = brute_force_two_pulse(t1, t2, 32, m);
                assert!((brute - pred.amplitude(m)).norm() < 1e-14, "θ=({t1},{t2}) m={m}");
            }
        }
    }

    #[test]
    fn two_pulse_parseval() {
        for &(t1, t2) in &[(0.4, 2.9), (1.7, 1.1), (3.0, 0.2)] {
            let pred = two_pulse_spectrum(t1, t2);
            let sum: f64 = pred.amplitudes.iter().map(|a| a.norm_sqr()).sum();
            let grid = 64;
            let avg = (0..grid)
                .map(|j| brute_rho_ge(t1, t2, 2.0 * PI * j as f64 / grid as f64).norm_sqr())
                .sum::<f64>()
                / grid as f64;
            assert!((avg - sum).abs() < 1e-12);
        }
    }

    #[test]
    fn two_pulse_limits() {
        let side_only = two_pulse_spectrum(FRAC_PI_2, PI);
        assert!((side_only.magnitude(3) - 0.5).abs() < 1e-15);
        assert!(side_only.magnitude(-1) < 1e-15 && side_only.magnitude(1) < 1e-15);

        let no_first = two_pulse_spectrum(0.0, 1.1);
        assert!((no_first.magnitude(1) - 0.5 * 1.1f64.sin()).abs() < 1e-15);
        assert_eq!(no_first.magnitude(-1), 0.0);
        assert_eq!(no_first.magnitude(3), 0.0);

        let no_second = two_pulse_spectrum(0.9, 0.0);
        assert!((no_second.magnitude(-1) - 0.5 * 0.9f64.sin()).abs() < 1e-15);
        assert_eq!(no_second.magnitude(1), 0.0);
        assert_eq!(no_second.magnitude(5), 0.0);
    }

    #[test]
    fn state_constructors() {
        let vacuum = make_state(PhotonState::Coherent { alpha: c(0.0, 0.0), truncation: 4 }).unwrap();
        assert_eq!(vacuum.coefficients()[0], c(1.0, 0.0));
        assert!(vacuum.coefficients()[1..].iter().all(|x| *x == c(0.0, 0.0)));

        let beta = make_state(PhotonState::ZeroOne { theta: FRAC_PI_2 }).unwrap();
        assert!((beta.coefficients()[0].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((beta.coefficients()[1].re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(beta.max_photons(), 1);

        let gamma = make_state(PhotonState::TwoPhoton { gamma1: c(1.0, 0.0), gamma2: c(1.0, 0.0) }).unwrap();
        for x in gamma.coefficients() {
            assert!((x.re - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        }
        assert_eq!(gamma.truncation(), 2);
    }

    #[test]
    fn coherent_state_needs_room() {
        assert!(make_state(PhotonState::Coherent { alpha: c(2.0, 0.0), truncation: 8 }).is_err());
        let s = make_state(PhotonState::Coherent { alpha: c(2.0, 1.0), truncation: 40 }).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        // Poisson weights: |c_n|² = e^{−|α|²}|α|^{2n}/n!
        let mean: f64 = 5.0;
        let p3 = (-mean).exp() * mean.powi(3) / 6.0;
        assert!((s.coefficients()[3].norm_sqr() - p3).abs() < 1e-12);
    }

    #[test]
    fn zero_one_weights_swap_under_reflection() {
        for i in 0..20 {
            let theta = 0.15 * i as f64;
            let a = make_state(PhotonState::ZeroOne { theta }).unwrap();
            let b = make_state(PhotonState::ZeroOne { theta: PI - theta }).unwrap();
            assert!((a.coefficients()[0].norm() - b.coefficients()[1].norm()).abs() < 1e-15);
            let mirrored = make_state(PhotonState::ZeroOne { theta: 2.0 * PI - theta }).unwrap();
            assert!((a.coefficients()[1].norm() - mirrored.coefficients()[1].norm()).abs() < 1e-15);
            // β = tan(θ/2) whenever the cosine is non-zero
            if (theta / 2.0).cos().abs() > 1e-6 {
                let beta = a.coefficients()[1].re / a.coefficients()[0].re;
                assert!((beta - (theta / 2.0).tan()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn peak_count_law() {
        assert_eq!(predicted_peak_count(PhotonContent::Finite(1)), PeakCount::Finite(3));
        assert_eq!(predicted_peak_count(PhotonContent::Finite(2)), PeakCount::Finite(5));
        assert_eq!(predicted_peak_count(PhotonContent::Coherent), PeakCount::Unbounded);
    }
}

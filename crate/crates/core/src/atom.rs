//! The driven N-level ladder atom: rotating-frame drive Hamiltonian,
//! Lindblad generator and time evolution.
//!
//! Everything here lives in the frame rotating at the atomic frequency ω₀.
//! A tone with mode index `m` sits at ω₀ + m·δω and therefore picks up the
//! slowly varying phase `m·φ`, φ = δω·t, relative to that frame.

use num_complex::Complex;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::scalar::{contract_tol, phasor, Real};

/// Level structure and relaxation rates of the artificial atom.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AtomSpecRepr<T>", into = "AtomSpecRepr<T>")]
#[serde(bound(
    serialize = "T: Real + Serialize",
    deserialize = "T: Real + Deserialize<'de>"
))]
pub struct AtomSpec<T> {
    levels: usize,
    transition_elements: Vec<T>,
    gamma1: T,
    gamma_phi: T,
}

#[derive(Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
struct AtomSpecRepr<T> {
    levels: usize,
    transition_elements: Vec<T>,
    gamma1: T,
    #[serde(default = "Zero::zero")]
    gamma_phi: T,
}

impl<T: Real> TryFrom<AtomSpecRepr<T>> for AtomSpec<T> {
    type Error = Error;

    fn try_from(r: AtomSpecRepr<T>) -> Result<Self> {
        AtomSpec::new(r.levels, r.transition_elements, r.gamma1, r.gamma_phi)
    }
}

impl<T: Real> From<AtomSpec<T>> for AtomSpecRepr<T> {
    fn from(a: AtomSpec<T>) -> Self {
        Self {
            levels: a.levels,
            transition_elements: a.transition_elements,
            gamma1: a.gamma1,
            gamma_phi: a.gamma_phi,
        }
    }
}

impl<T: Real> AtomSpec<T> {
    /// `transition_elements[j]` is the dipole element of `j → j+1` relative to
    /// the g–e element, so the first entry must be 1.  Rates are in rad/s.
    pub fn new(levels: usize, transition_elements: Vec<T>, gamma1: T, gamma_phi: T) -> Result<Self> {
        if !(2..=3).contains(&levels) {
            return Err(Error::InvalidAtom(format!("levels must be 2 or 3, got {levels}")));
        }
        if transition_elements.len() != levels - 1 {
            return Err(Error::InvalidAtom(format!(
                "{levels}-level atom needs {} transition elements, got {}",
                levels - 1,
                transition_elements.len()
            )));
        }
        if transition_elements[0] != T::one() {
            return Err(Error::InvalidAtom("the g-e transition element must be 1".into()));
        }
        if transition_elements.iter().any(|mu| !mu.is_finite() || *mu < T::zero()) {
            return Err(Error::InvalidAtom("transition elements must be finite and non-negative".into()));
        }
        if !(gamma1.is_finite() && gamma1 >= T::zero()) {
            return Err(Error::InvalidAtom("gamma1 must be finite and non-negative".into()));
        }
        if !(gamma_phi.is_finite() && gamma_phi >= T::zero()) {
            return Err(Error::InvalidAtom("gamma_phi must be finite and non-negative".into()));
        }
        Ok(Self {
            levels,
            transition_elements,
            gamma1,
            gamma_phi,
        })
    }

    pub fn two_level(gamma1: T) -> Self {
        Self::new(2, vec![T::one()], gamma1, T::zero()).expect("valid two-level atom")
    }

    /// Ladder with the weakly anharmonic e–f element √2.
    pub fn three_level(gamma1: T) -> Self {
        Self::new(3, vec![T::one(), T::lit(2.0).sqrt()], gamma1, T::zero())
            .expect("valid three-level atom")
    }

    pub fn with_gamma1(self, gamma1: T) -> Result<Self> {
        Self::new(self.levels, self.transition_elements, gamma1, self.gamma_phi)
    }

    pub fn with_dephasing(self, gamma_phi: T) -> Result<Self> {
        Self::new(self.levels, self.transition_elements, self.gamma1, gamma_phi)
    }

    pub fn levels(&self) -> usize {
        self.levels
    }

    pub fn transition_elements(&self) -> &[T] {
        &self.transition_elements
    }

    pub fn gamma1(&self) -> T {
        self.gamma1
    }

    pub fn gamma_phi(&self) -> T {
        self.gamma_phi
    }

    /// Radiative rate of each ladder transition, Γ_j = Γ₁·μ_j².
    pub fn decay_rates(&self) -> Vec<T> {
        self.transition_elements
            .iter()
            .map(|&mu| self.gamma1 * mu * mu)
            .collect()
    }

    /// Dipole-weighted lowering operator Σ_j μ_j |j⟩⟨j+1|.
    pub fn lowering_operator(&self) -> ComplexMatrix<T> {
        let mut op = ComplexMatrix::zeros(self.levels);
        for (j, &mu) in self.transition_elements.iter().enumerate() {
            op[(j, j + 1)] = Complex::new(mu, T::zero());
        }
        op
    }

    /// Collapse operators with their rates folded in: √Γ_j |j⟩⟨j+1| for each
    /// transition, plus √(2γ_φ)·n̂ so that the g–e coherence dephases at γ_φ.
    pub fn collapse_operators(&self) -> Vec<ComplexMatrix<T>> {
        let n = self.levels;
        let mut ops: Vec<_> = self
            .decay_rates()
            .into_iter()
            .enumerate()
            .filter(|(_, rate)| *rate > T::zero())
            .map(|(j, rate)| ComplexMatrix::unit(n, j, j + 1).scale_real(rate.sqrt()))
            .collect();
        if self.gamma_phi > T::zero() {
            let mut number = ComplexMatrix::zeros(n);
            for j in 0..n {
                number[(j, j)] = Complex::new(T::count(j), T::zero());
            }
            ops.push(number.scale_real((T::lit(2.0) * self.gamma_phi).sqrt()));
        }
        ops
    }

    /// Photon emission rate operator L†L for the radiative channel, whose
    /// expectation value is the total (coherent + incoherent) emission rate.
    pub fn emission_rate_operator(&self) -> ComplexMatrix<T> {
        let mut op = ComplexMatrix::zeros(self.levels);
        for (j, rate) in self.decay_rates().into_iter().enumerate() {
            op[(j + 1, j + 1)] = Complex::new(rate, T::zero());
        }
        op
    }
}

/// Atomic state: Hermitian, unit-trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix<T> {
    entries: ComplexMatrix<T>,
}

/// Deviation of a state from physicality.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Physicality {
    /// |Tr ρ − 1|
    pub trace_error: f64,
    /// max |ρ − ρ†|
    pub hermiticity: f64,
    /// smallest eigenvalue of the Hermitian part
    pub min_eigenvalue: f64,
}

impl Default for Physicality {
    fn default() -> Self {
        Self {
            trace_error: 0.0,
            hermiticity: 0.0,
            min_eigenvalue: f64::INFINITY,
        }
    }
}

impl Physicality {
    /// Worst case of two reports.
    pub fn merge(self, other: Self) -> Self {
        Self {
            trace_error: self.trace_error.max(other.trace_error),
            hermiticity: self.hermiticity.max(other.hermiticity),
            min_eigenvalue: self.min_eigenvalue.min(other.min_eigenvalue),
        }
    }

    /// Checks the trajectory contract: trace and Hermiticity within 1e−10,
    /// eigenvalues no lower than −1e−9.
    pub fn within_contract(&self) -> bool {
        self.trace_error < 1e-10 && self.hermiticity < 1e-10 && self.min_eigenvalue >= -1e-9
    }
}

impl<T: Real> DensityMatrix<T> {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: ComplexMatrix<T>) -> Result<Self> {
        let rho = Self { entries };
        let p = rho.physicality();
        let tol = contract_tol::<T>(1e-10).to_f64().unwrap_or(1e-10);
        let eig_tol = contract_tol::<T>(1e-9).to_f64().unwrap_or(1e-9);
        if p.trace_error > tol || p.hermiticity > tol || p.min_eigenvalue < -eig_tol {
            return Err(Error::InvalidArgument(format!(
                "not a density matrix: trace error {:e}, hermiticity {:e}, min eigenvalue {:e}",
                p.trace_error, p.hermiticity, p.min_eigenvalue
            )));
        }
        Ok(rho)
    }

    pub(crate) fn from_unchecked(entries: ComplexMatrix<T>) -> Self {
        Self { entries }
    }

    /// Projector on basis level `k`.
    pub fn basis(dim: usize, k: usize) -> Self {
        assert!(k < dim, "level {k} outside a {dim}-level space");
        Self {
            entries: ComplexMatrix::unit(dim, k, k),
        }
    }

    pub fn ground(dim: usize) -> Self {
        Self::basis(dim, 0)
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) state vector.
    pub fn pure(amplitudes: &[Complex<T>]) -> Result<Self> {
        let norm = amplitudes.iter().fold(T::zero(), |s, a| s + a.norm_sqr()).sqrt();
        if amplitudes.is_empty() || norm <= T::zero() || !norm.is_finite() {
            return Err(Error::InvalidArgument("state vector must be non-zero and finite".into()));
        }
        let n = amplitudes.len();
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = amplitudes[i] * amplitudes[j].conj() / (norm * norm);
            }
        }
        Ok(Self { entries: m })
    }

    /// Bloch-sphere state cos(θ/2)|g⟩ + e^{iχ} sin(θ/2)|e⟩.
    pub fn bloch(theta: T, azimuth: T) -> Self {
        let half = theta / T::lit(2.0);
        Self::pure(&[
            Complex::new(half.cos(), T::zero()),
            phasor(azimuth) * half.sin(),
        ])
        .expect("unit Bloch vector")
    }

    pub fn dim(&self) -> usize {
        self.entries.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> ComplexMatrix<T> {
        self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        self.entries[(i, j)]
    }

    pub fn population(&self, k: usize) -> T {
        self.entries[(k, k)].re
    }

    pub fn trace(&self) -> Complex<T> {
        self.entries.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> T {
        let s = self.entries.as_slice();
        s.iter().fold(T::zero(), |acc, z| acc + z.norm_sqr())
    }

    /// Tr(ρ·op).
    pub fn expectation(&self, op: &ComplexMatrix<T>) -> Complex<T> {
        (&self.entries * op).trace()
    }

    pub fn physicality(&self) -> Physicality {
        let tr = self.entries.trace();
        let to = |x: T| x.to_f64().unwrap_or(f64::NAN);
        Physicality {
            trace_error: to((tr - Complex::one()).norm()),
            hermiticity: to(self.entries.hermiticity_residual()),
            min_eigenvalue: to(self.entries.min_hermitian_eigenvalue()),
        }
    }
}

/// One spectral component of the drive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveTone<T> {
    /// Tone frequency is ω₀ + mode_index·δω.
    pub mode_index: i32,
    /// Rabi frequency Ω in rad/s: alone and resonant, the tone drives
    /// ρ_ee(t) = sin²(Ωt/2).
    pub rabi_amplitude: T,
    pub phase_offset: T,
}

impl<T: Real> DriveTone<T> {
    pub fn new(mode_index: i32, rabi_amplitude: T) -> Self {
        Self {
            mode_index,
            rabi_amplitude,
            phase_offset: T::zero(),
        }
    }

    pub fn with_phase(mut self, phase_offset: T) -> Self {
        self.phase_offset = phase_offset;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rabi_amplitude.is_finite() && self.rabi_amplitude >= T::zero()) {
            return Err(Error::InvalidSequence(
                "rabi_amplitude must be finite and non-negative".into(),
            ));
        }
        if !self.phase_offset.is_finite() {
            return Err(Error::NonFinite("tone phase offset"));
        }
        Ok(())
    }
}

/// Rotating-wave drive Hamiltonian H/ħ at frozen beat phase φ:
/// Σ_tones Σ_j (Ω/2)·μ_j·(e^{−i(mφ + χ)}|j+1⟩⟨j| + h.c.).
pub fn drive_hamiltonian<T: Real>(atom: &AtomSpec<T>, tones: &[DriveTone<T>], beat_phase: T) -> ComplexMatrix<T> {
    let n = atom.levels();
    let mut h = ComplexMatrix::zeros(n);
    let half = T::lit(0.5);
    for tone in tones {
        let coupling = phasor(-(T::from_i32(tone.mode_index).unwrap() * beat_phase + tone.phase_offset))
            * (tone.rabi_amplitude * half);
        for (j, &mu) in atom.transition_elements().iter().enumerate() {
            let up = coupling * mu;
            h[(j + 1, j)] = h[(j + 1, j)] + up;
            h[(j, j + 1)] = h[(j, j + 1)] + up.conj();
        }
    }
    h
}

/// dρ/dt = −i[H, ρ] + Σ_k 𝒟[L_k]ρ with 𝒟[L]ρ = LρL† − ½{L†L, ρ}.
pub fn lindblad_rhs<T: Real>(
    atom: &AtomSpec<T>,
    hamiltonian: &ComplexMatrix<T>,
    rho: &ComplexMatrix<T>,
) -> Result<ComplexMatrix<T>> {
    let n = atom.levels();
    for d in [hamiltonian.dim(), rho.dim()] {
        if d != n {
            return Err(Error::DimensionMismatch { left: n, right: d });
        }
    }
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut out = hamiltonian.commutator(rho)?.scale(minus_i);
    for l in atom.collapse_operators() {
        let ld = l.adjoint();
        let jump = &(&l * rho) * &ld;
        let ldl = &ld * &l;
        let anti = ldl.anticommutator(rho)?.scale_real(T::lit(0.5));
        out = &out + &(&jump - &anti);
    }
    Ok(out)
}

/// Lindblad generator as a superoperator acting on row-major vec(ρ),
/// using vec(AρB) = (A ⊗ Bᵀ)·vec(ρ).
pub fn liouvillian<T: Real>(atom: &AtomSpec<T>, hamiltonian: &ComplexMatrix<T>) -> ComplexMatrix<T> {
    let n = atom.levels();
    let id = ComplexMatrix::identity(n);
    let minus_i = Complex::new(T::zero(), -T::one());
    let mut sup = (&hamiltonian.kron(&id) - &id.kron(&hamiltonian.transpose())).scale(minus_i);
    let half = T::lit(0.5);
    for l in atom.collapse_operators() {
        let l_conj = l.adjoint().transpose();
        let ldl = &l.adjoint() * &l;
        let jump = l.kron(&l_conj);
        let left = ldl.kron(&id).scale_real(half);
        let right = id.kron(&ldl.transpose()).scale_real(half);
        sup = &sup + &(&(&jump - &left) - &right);
    }
    sup
}

/// Time-ordered states with their times (seconds).
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<T> {
    pub times: Vec<T>,
    pub states: Vec<DensityMatrix<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &DensityMatrix<T> {
        self.states.last().expect("trajectory holds at least its initial state")
    }

    pub fn physicality(&self) -> Physicality {
        self.states
            .iter()
            .fold(Physicality::default(), |acc, s| acc.merge(s.physicality()))
    }

    /// Appends `other`, dropping its first sample when it duplicates our last one.
    pub fn extend(&mut self, other: Trajectory<T>) {
        let skip = usize::from(matches!((self.times.last(), other.times.first()), (Some(a), Some(b)) if a == b));
        self.times.extend(other.times.into_iter().skip(skip));
        self.states.extend(other.states.into_iter().skip(skip));
    }
}

/// Number of equal steps of length ≤ `dt_max` covering `duration`.
pub(crate) fn step_count<T: Real>(duration: T, dt_max: T) -> usize {
    if duration <= T::zero() {
        return 0;
    }
    // shave round-off so that duration = k·dt_max gives exactly k steps
    let ratio = duration / dt_max * (T::one() - T::epsilon() * T::lit(8.0));
    ratio.ceil().to_usize().unwrap_or(usize::MAX).max(1)
}

fn check_evolve_args<T: Real>(atom: &AtomSpec<T>, rho0: &DensityMatrix<T>, duration: T, dt_max: T) -> Result<()> {
    if rho0.dim() != atom.levels() {
        return Err(Error::DimensionMismatch {
            left: atom.levels(),
            right: rho0.dim(),
        });
    }
    if !(duration.is_finite() && duration >= T::zero()) {
        return Err(Error::InvalidArgument("duration must be finite and non-negative".into()));
    }
    if !(dt_max.is_finite() && dt_max > T::zero()) {
        return Err(Error::InvalidArgument("dt_max must be positive".into()));
    }
    Ok(())
}

fn check_trace<T: Real>(rho: &ComplexMatrix<T>, time: T) -> Result<()> {
    let drift = (rho.trace() - Complex::one()).norm();
    if drift > contract_tol::<T>(1e-8) || !drift.is_finite() {
        return Err(Error::TraceDrift {
            drift: drift.to_f64().unwrap_or(f64::NAN),
            time: time.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Integrates the Lindblad equation over one segment with the beat phase
/// frozen.  The generator is constant, so each step applies the exact
/// propagator exp(𝓛·h); samples are returned at every step, starting with
/// `rho0` at `t_start`.
pub fn evolve_from<T: Real>(
    atom: &AtomSpec<T>,
    tones: &[DriveTone<T>],
    beat_phase: T,
    rho0: &DensityMatrix<T>,
    t_start: T,
    duration: T,
    dt_max: T,
) -> Result<Trajectory<T>> {
    check_evolve_args(atom, rho0, duration, dt_max)?;
    for tone in tones {
        tone.validate()?;
    }
    let steps = step_count(duration, dt_max);
    let mut traj = Trajectory {
        times: Vec::with_capacity(steps + 1),
        states: Vec::with_capacity(steps + 1),
    };
    traj.times.push(t_start);
    traj.states.push(rho0.clone());
    if steps == 0 {
        return Ok(traj);
    }
    let h = duration / T::count(steps);
    let generator = liouvillian(atom, &drive_hamiltonian(atom, tones, beat_phase));
    let propagator = generator.scale_real(h).expm()?;
    let n = atom.levels();
    let mut vec = rho0.matrix().as_slice().to_vec();
    for k in 1..=steps {
        vec = propagator.apply(&vec)?;
        let time = t_start + h * T::count(k);
        let m = ComplexMatrix::from_vec(n, vec.clone())?;
        check_trace(&m, time)?;
        traj.times.push(time);
        traj.states.push(DensityMatrix::from_unchecked(m));
    }
    Ok(traj)
}

/// [`evolve_from`] starting at t = 0.
pub fn evolve<T: Real>(
    atom: &AtomSpec<T>,
    tones: &[DriveTone<T>],
    beat_phase: T,
    rho0: &DensityMatrix<T>,
    duration: T,
    dt_max: T,
) -> Result<Trajectory<T>> {
    evolve_from(atom, tones, beat_phase, rho0, T::zero(), duration, dt_max)
}

/// Integrates with the beat phase advancing continuously, φ(t) = δω·t, using
/// classical fourth-order Runge–Kutta on the time-dependent generator.
#[allow(clippy::too_many_arguments)]
pub fn evolve_beating<T: Real>(
    atom: &AtomSpec<T>,
    tones: &[DriveTone<T>],
    detuning: T,
    rho0: &DensityMatrix<T>,
    t_start: T,
    duration: T,
    dt_max: T,
) -> Result<Trajectory<T>> {
    if tones.is_empty() || detuning == T::zero() {
        return evolve_from(atom, tones, detuning * t_start, rho0, t_start, duration, dt_max);
    }
    check_evolve_args(atom, rho0, duration, dt_max)?;
    for tone in tones {
        tone.validate()?;
    }
    let steps = step_count(duration, dt_max);
    let mut traj = Trajectory {
        times: vec![t_start],
        states: vec![rho0.clone()],
    };
    if steps == 0 {
        return Ok(traj);
    }
    let h = duration / T::count(steps);
    let half = T::lit(0.5);
    let rhs = |t: T, rho: &ComplexMatrix<T>| -> Result<ComplexMatrix<T>> {
        lindblad_rhs(atom, &drive_hamiltonian(atom, tones, detuning * t), rho)
    };
    let mut rho = rho0.matrix().clone();
    for k in 0..steps {
        let t = t_start + h * T::count(k);
        let k1 = rhs(t, &rho)?;
        let k2 = rhs(t + h * half, &(&rho + &k1.scale_real(h * half)))?;
        let k3 = rhs(t + h * half, &(&rho + &k2.scale_real(h * half)))?;
        let k4 = rhs(t + h, &(&rho + &k3.scale_real(h)))?;
        let incr = &(&k1 + &k4) + &(&k2 + &k3).scale_real(T::lit(2.0));
        rho = &rho + &incr.scale_real(h / T::lit(6.0));
        let time = t_start + h * T::count(k + 1);
        check_trace(&rho, time)?;
        traj.times.push(time);
        traj.states.push(DensityMatrix::from_unchecked(rho.clone()));
    }
    Ok(traj)
}

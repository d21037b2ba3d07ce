//! Two-tone wave mixing on a single driven atom.
//!
//! A two- or three-level ladder is driven by pulses built from tones at
//! ω₀ + m·δω, relaxes under a Lindblad master equation, and emits a coherent
//! field whose spectrum is resolved into comb lines m by Fourier analysis in
//! the slow beat phase φ = δω·t.
//!
//! All numerics are generic over [`scalar::Real`]; the aliases below fix the
//! scalar to `f64`, which the acceptance suite and the command-line tool use.

pub mod atom;
pub mod error;
pub mod matrix;
pub mod oracles;
pub mod pulse;
pub mod scalar;
pub mod special;
pub mod spectrum;
pub mod validation;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Complex = num_complex::Complex<f64>;
pub type Matrix = matrix::ComplexMatrix<f64>;
pub type Atom = atom::AtomSpec<f64>;
pub type Density = atom::DensityMatrix<f64>;
pub type Tone = atom::DriveTone<f64>;
pub type Segment = pulse::PulseSegment<f64>;
pub type Sequence = pulse::PulseSequence<f64>;
pub type Spectrum = spectrum::ModeSpectrum<f64>;

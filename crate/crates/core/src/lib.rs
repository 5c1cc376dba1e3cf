//! Sampling theory for lattice shift-invariant spaces of Hilbert–Schmidt
//! operators, realized exactly on the finite phase space `Z_L x Z_L`.
//!
//! Every object is finite: signals are vectors of length `L`, operators are
//! `L x L` kernels, lattices are subgroups of `Z_L x Z_L`. All the identities
//! that relate diagonal channel samples, transfer matrices, dual frames and
//! reconstruction operators therefore hold up to floating-point rounding,
//! which is what the test suites check.
//!
//! Module map:
//!
//! * [`phase_space`]: the group `Z_L x Z_L`, lattices, annihilators,
//!   symplectic Fourier series and lattice convolution.
//! * [`timefreq`]: signals, unitary DFT, time-frequency shifts, STFT,
//!   Rihaczek and cross-Wigner distributions, Gaussian window.
//! * [`hs_ops`]: operators as kernels, operator translation, Kohn–Nirenberg
//!   and Weyl symbols, Fourier–Wigner transform, Gabor multipliers.
//! * [`si_space`]: generator systems, synthesis, Riesz checks by three routes,
//!   coefficient recovery.
//! * [`sampling`]: diagonal channel and average samples, transfer matrices,
//!   frame bounds, dual frames, reconstruction kits, sub-lattices.

pub mod error;
pub mod hs_ops;
pub mod linalg;
pub mod phase_space;
pub mod random;
pub mod sampling;
pub mod si_space;
pub mod timefreq;

pub use error::{Error, Result};
pub use hs_ops::HsOperator;
pub use num_complex::Complex64;
pub use phase_space::{DualTransversal, Lattice, LatticeDescriptor, LatticeSeq, PhasePoint, PhaseSpace};
pub use random::SeededRng;
pub use sampling::{FrameBounds, ReconstructionKit, SampleSet, SamplingScheme, TransferMatrix, WindowPair};
pub use si_space::{BruteGram, CoefArray, GeneratorSystem, RieszReport, RieszRoute};
pub use timefreq::{PhaseFn, Signal};

/// `exp(2 pi i k / L)` with `k` reduced mod `L`.
#[inline]
pub(crate) fn unit_root(k: i64, modulus: usize) -> Complex64 {
    let l = modulus as i64;
    let k = k.rem_euclid(l);
    Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / l as f64)
}

/// Table of `exp(2 pi i k / L)` for `k = 0..L`.
pub(crate) fn root_table(modulus: usize) -> Vec<Complex64> {
    (0..modulus as i64).map(|k| unit_root(k, modulus)).collect()
}

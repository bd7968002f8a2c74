//! Dense few-qubit linear algebra: states, gates, projections, Pauli strings.
//!
//! Qubit position 0 is the first-emitted photon and is the most significant
//! bit of a basis index, so `|h v⟩` on two qubits is index `0b01`.

mod gate;
pub mod linalg;
mod matrix;
mod pauli;
mod state;

pub use gate::SingleQubitGate;
pub use matrix::CMatrix;
pub use pauli::{Pauli, PauliString, Phase};
pub use state::{MeasurementBasis, Polarization, QuantumState, MAX_MIXED_QUBITS, MAX_PURE_QUBITS};

/// Algebraic tolerance for normalisation and unitarity checks.
pub const ALGEBRAIC_TOL: f64 = 1e-12;
/// Tolerance for quantities accumulated over many operations.
pub const ACCUMULATED_TOL: f64 = 1e-10;

/// Bit mask of qubit `q` in an `n`-qubit basis index.
#[inline]
pub(crate) fn bit(n: usize, q: usize) -> usize {
    1 << (n - 1 - q)
}

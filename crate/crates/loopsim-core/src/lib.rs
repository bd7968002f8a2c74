//! Simulation core for sequential, loop-based generation of linear photonic
//! cluster states from a single-photon emitter.
//!
//! The crate is `no_std` (with `alloc`). Everything here is pure computation:
//!
//! * [`qcore`] dense few-qubit states, gates, projections and Pauli algebra
//! * [`protocol`] the delay-loop entangler: injection, PBS fusion with
//!   post-selection, fusion noise channels and in-loop rotations
//! * [`analysis`] visibilities, amplitude tables, stabilizer generators,
//!   phase scans and HOM utilities
//! * [`entlen`] streaming end-pair concurrence and entanglement length
//! * [`scaling`] detection-rate and scaling-ratio models
//! * [`montecarlo`] event-level detection pipeline with coincidence counting
//!
//! IO, parallel drivers, file formats and the command line live in the
//! companion `loopsim` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analysis;
pub mod entlen;
mod error;
pub mod montecarlo;
pub mod protocol;
pub mod qcore;
pub mod scaling;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;

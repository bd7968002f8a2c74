//! Parallel drivers over the core library. Work is split into fixed chunks
//! whose results are combined in input order, so outputs do not depend on
//! the number of threads.

use rayon::prelude::*;

use loopsim_core::analysis::{PhaseScan, ScanRow};
use loopsim_core::entlen::{entanglement_length, ChainSweep, EntanglementLengthResult};
use loopsim_core::montecarlo::{background_seed, background_simulators, CoincidenceTally, MonteCarloConfig, Simulator};
use loopsim_core::Result;

/// Shots per work unit.
pub const SHOT_CHUNK: u64 = 1 << 16;

/// Runs `shots` sequences of `sim` split across the current thread pool.
pub fn run_shots(sim: &Simulator, shots: u64, seed: u64) -> Result<CoincidenceTally> {
    if shots == 0 {
        return Err(loopsim_core::Error::Argument("need at least one shot".into()));
    }
    let chunks = shots.div_ceil(SHOT_CHUNK);
    let parts: Vec<CoincidenceTally> = (0..chunks)
        .into_par_iter()
        .map(|c| sim.run_range(seed, c * SHOT_CHUNK..((c + 1) * SHOT_CHUNK).min(shots)))
        .collect();
    let mut total = CoincidenceTally::empty(sim.photons(), seed);
    for p in &parts {
        total.merge(p)?;
    }
    Ok(total)
}

/// Measurement tally for a configuration.
pub fn run_sequence(cfg: &MonteCarloConfig, shots: u64, seed: u64) -> Result<CoincidenceTally> {
    run_shots(&Simulator::new(cfg.clone())?, shots, seed)
}

/// Background tallies (one bin closed each) for a configuration.
pub fn background_runs(cfg: &MonteCarloConfig, shots: u64, seed: u64) -> Result<Vec<CoincidenceTally>> {
    background_simulators(cfg)?
        .iter()
        .enumerate()
        .map(|(i, sim)| run_shots(sim, shots, background_seed(seed, i + 1)))
        .collect()
}

/// Phase scan evaluated point-parallel.
pub fn phase_scan(cfg: &PhaseScan) -> Result<Vec<ScanRow>> {
    cfg.phis().par_iter().map(|&phi| cfg.row(phi)).collect()
}

/// Entanglement lengths for several sweeps.
pub fn entanglement_lengths(sweeps: &[ChainSweep]) -> Result<Vec<EntanglementLengthResult>> {
    sweeps.par_iter().map(entanglement_length).collect()
}

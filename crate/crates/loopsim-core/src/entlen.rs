//! Entanglement length of noisy chains: the longest chain whose end photons
//! stay entangled after every middle photon is measured along `y`.
//!
//! Chains are grown in streaming fashion: each middle photon is measured the
//! moment it leaves the loop, so at most three photons are ever live.

use alloc::vec::Vec;

use crate::error::arg_err;
use crate::protocol::{build_chain, NoiseKindTag, NoiseModel, ProtocolState};
use crate::qcore::linalg::{hermitian_eigenvalues, psd_sqrt};
use crate::qcore::{CMatrix, MeasurementBasis, QuantumState, SingleQubitGate};
use crate::{Error, Result, C64};

/// Default chain-length cap of a sweep.
pub const DEFAULT_CAP: usize = 64;
/// Default positivity threshold for the concurrence.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;
/// Agreement required between Pauli-corrected measurement branches.
const BRANCH_TOLERANCE: f64 = 1e-9;

/// Noise parameterised by its two-photon visibility.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSweep {
    v2: f64,
    kind: NoiseKindTag,
    cap: usize,
    tolerance: f64,
}

impl ChainSweep {
    pub fn new(v2: f64, kind: NoiseKindTag) -> Result<Self> {
        if !(v2 > 0.0 && v2 <= 1.0) {
            return Err(arg_err!("two-photon visibility {v2} outside (0, 1]"));
        }
        Ok(Self { v2, kind, cap: DEFAULT_CAP, tolerance: DEFAULT_TOLERANCE })
    }

    pub fn with_cap(mut self, cap: usize) -> Result<Self> {
        if cap < 2 {
            return Err(arg_err!("chain cap must be at least 2, got {cap}"));
        }
        self.cap = cap;
        Ok(self)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&tolerance) {
            return Err(arg_err!("concurrence tolerance {tolerance} outside [0, 1)"));
        }
        self.tolerance = tolerance;
        Ok(self)
    }

    pub fn v2(&self) -> f64 {
        self.v2
    }

    pub fn kind(&self) -> NoiseKindTag {
        self.kind
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// Effective number of distinguishable modes, `1/V₂`.
    pub fn modes(&self) -> f64 {
        1.0 / self.v2
    }

    pub fn noise(&self) -> Result<NoiseModel> {
        NoiseModel::from_v2(self.kind, self.v2)
    }
}

/// Outcome of an entanglement-length scan.
#[derive(Debug, Clone, PartialEq)]
pub struct EntanglementLengthResult {
    /// Longest chain with end-pair concurrence above the tolerance (1 if even
    /// the two-photon pair is separable).
    pub length: usize,
    /// `(n, concurrence)` for every chain length evaluated.
    pub concurrences: Vec<(usize, f64)>,
    /// The cap was reached while the concurrence was still positive.
    pub cap_limited: bool,
}

/// Wootters concurrence of a two-qubit density matrix.
pub fn concurrence(rho: &CMatrix) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(arg_err!("concurrence needs a 4x4 density matrix, got {0}x{0}", rho.dim()));
    }
    if rho.hermiticity_error() > 1e-9 {
        return Err(arg_err!("density matrix is not Hermitian"));
    }
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
        return Err(arg_err!("density matrix trace is {tr}, expected 1"));
    }
    let yy = spin_flip();
    let tilde = yy.matmul(&rho.conj()).matmul(&yy);
    let root = psd_sqrt(rho);
    let r = root.matmul(&tilde).matmul(&root);
    let lambdas: Vec<f64> = hermitian_eigenvalues(&r).into_iter().map(|x| libm::sqrt(x.max(0.0))).collect();
    let c = lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3];
    Ok(c.clamp(0.0, 1.0))
}

/// `Y ⊗ Y`
fn spin_flip() -> CMatrix {
    let y = SingleQubitGate::pauli_y().m;
    let y = CMatrix::from_rows(2, y.iter().flatten().copied().collect());
    y.kron(&y)
}

/// The sixteen two-qubit Pauli corrections.
fn pauli_pairs() -> Vec<(SingleQubitGate, SingleQubitGate)> {
    let ps = [
        SingleQubitGate::identity(),
        SingleQubitGate::pauli_x(),
        SingleQubitGate::pauli_y(),
        SingleQubitGate::pauli_z(),
    ];
    ps.iter().flat_map(|a| ps.iter().map(move |b| (*a, *b))).collect()
}

/// Checks that the two `y` outcomes of a middle photon leave states related
/// by a local Pauli correction on the (first, loop) photons.
fn check_branches(plus: &QuantumState, minus: &QuantumState, photon: usize) -> Result<()> {
    let target = plus.to_density();
    let (q1, q2) = (0, plus.num_qubits() - 1);
    for (a, b) in pauli_pairs() {
        let mut c = minus.clone();
        c.apply_gate(q1, &a)?;
        c.apply_gate(q2, &b)?;
        if c.to_density().max_abs_diff(&target) < BRANCH_TOLERANCE {
            return Ok(());
        }
    }
    Err(Error::OutcomeAsymmetry { photon })
}

/// Streams a chain and calls `visit(n, end_pair)` after each photon `n ≥ 2`
/// has been fused; stops when `visit` returns `false` or at `n_max`.
fn stream_chain(
    n_max: usize,
    noise: &NoiseModel,
    mut visit: impl FnMut(usize, &QuantumState) -> Result<bool>,
) -> Result<()> {
    let mut ps = ProtocolState::new();
    ps.inject_photon()?;
    for k in 2..=n_max {
        if k > 2 {
            ps.rotate_loop_photon(0.0)?;
        }
        ps.inject_photon()?;
        ps.fuse(noise)?;
        if k > 2 {
            let middle = k - 1;
            let mut minus = ps.clone();
            minus.measure_photon(middle, MeasurementBasis::Y, 1)?;
            ps.measure_photon(middle, MeasurementBasis::Y, 0)?;
            let (plus_state, minus_state) = match (ps.state(), minus.state()) {
                (Some(p), Some(m)) => (p, m),
                _ => return Err(Error::ProtocolOrder("chain lost its photons")),
            };
            check_branches(plus_state, minus_state, middle)?;
        }
        let state = ps.state().ok_or(Error::ProtocolOrder("chain lost its photons"))?;
        if !visit(k, state)? {
            break;
        }
    }
    Ok(())
}

/// Reduced state of photons `(1, n)` after all middle photons were measured
/// along `y` (the all-`+` branch).
pub fn chain_end_pair(n: usize, sweep: &ChainSweep) -> Result<CMatrix> {
    if n < 2 || n > sweep.cap {
        return Err(arg_err!("chain length {n} outside [2, {}]", sweep.cap));
    }
    let noise = sweep.noise()?;
    let mut pair = None;
    stream_chain(n, &noise, |k, s| {
        if k == n {
            pair = Some(s.to_density());
        }
        Ok(k < n)
    })?;
    pair.ok_or(Error::ProtocolOrder("chain ended early"))
}

/// Scans chain lengths upward until the end-pair concurrence drops to the
/// tolerance or the cap is reached.
pub fn entanglement_length(sweep: &ChainSweep) -> Result<EntanglementLengthResult> {
    let noise = sweep.noise()?;
    let mut concurrences = Vec::new();
    let mut length = 1;
    stream_chain(sweep.cap, &noise, |k, s| {
        let c = concurrence(&s.to_density())?;
        concurrences.push((k, c));
        if c > sweep.tolerance {
            length = k;
            Ok(true)
        } else {
            Ok(false)
        }
    })?;
    let cap_limited = length == sweep.cap;
    Ok(EntanglementLengthResult { length, concurrences, cap_limited })
}

/// Minimum two-photon visibility for an entangled `n`-photon chain under
/// depolarising noise: `(1/3)^{1/(n−1)}`.
pub fn min_v2_threshold(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(arg_err!("threshold needs n >= 2, got {n}"));
    }
    if n == 2 {
        return Ok(1.0 / 3.0);
    }
    Ok(libm::pow(1.0 / 3.0, 1.0 / (n - 1) as f64))
}

/// `V_n = V₂^{n−1}`.
pub fn vn_from_v2(v2: f64, n: usize) -> Result<f64> {
    if !(v2 > 0.0 && v2 <= 1.0) || n < 2 {
        return Err(arg_err!("need v2 in (0, 1] and n >= 2, got v2 = {v2}, n = {n}"));
    }
    Ok(libm::pow(v2, (n - 1) as f64))
}

/// Largest `n` with `V₂^{n−1} > 1/3`, searched up to `cap`.
pub fn depolarizing_length_bound(v2: f64, cap: usize) -> Result<usize> {
    let mut best = 1;
    for n in 2..=cap {
        if vn_from_v2(v2, n)? > 1.0 / 3.0 {
            best = n;
        } else {
            break;
        }
    }
    Ok(best)
}

/// End pair computed from the full `n`-photon density matrix, with middle
/// photons measured along `y` with the given outcomes (bit `i` for photon
/// `i + 2`). Limited to the density-matrix capacity.
pub fn brute_force_end_pair(n: usize, sweep: &ChainSweep, outcomes: usize) -> Result<CMatrix> {
    let mut noise = sweep.noise()?;
    if noise.is_coherent() {
        // Force the mixed path so both representations are exercised alike.
        noise = NoiseModel::distinguishing(1.0)?;
    }
    let chain = build_chain(n, 0.0, &noise)?;
    let mut state = chain.into_state().ok_or(Error::ProtocolOrder("empty chain"))?;
    state.make_mixed()?;
    for i in 0..n.saturating_sub(2) {
        let photon = i + 2;
        let q = state.position_of(photon).ok_or(Error::ProtocolOrder("photon missing"))?;
        let (_, rest) = state.project(q, MeasurementBasis::Y, (outcomes >> i) & 1)?;
        state = rest;
    }
    Ok(state.to_density())
}

/// `|ψ⟩⟨ψ|` of a two-qubit pure state, for oracles.
pub fn pure_pair(a: [C64; 4]) -> Result<CMatrix> {
    let s = QuantumState::from_amplitudes(a.to_vec())?;
    Ok(s.to_density())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn werner(p: f64) -> CMatrix {
        let bell = pure_pair([c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        bell.scale_real(p).add(&CMatrix::identity(4).scale_real((1.0 - p) / 4.0))
    }

    #[test]
    fn concurrence_limits() {
        let bell = pure_pair([c(1.0), c(0.0), c(0.0), c(1.0)]).unwrap();
        assert_abs_diff_eq!(concurrence(&bell).unwrap(), 1.0, epsilon = 1e-9);
        assert_abs_diff_eq!(concurrence(&CMatrix::identity(4).scale_real(0.25)).unwrap(), 0.0);
        let product = pure_pair([c(1.0), c(1.0), c(0.0), c(0.0)]).unwrap();
        assert_abs_diff_eq!(concurrence(&product).unwrap(), 0.0, epsilon = 1e-7);
    }

    #[test]
    fn werner_concurrence() {
        for k in 0..=20 {
            let p = k as f64 / 20.0;
            let want = ((3.0 * p - 1.0) / 2.0).max(0.0);
            assert_abs_diff_eq!(concurrence(&werner(p)).unwrap(), want, epsilon = 1e-7);
        }
    }

    #[test]
    fn concurrence_rejects_invalid_input() {
        assert!(concurrence(&CMatrix::identity(4)).is_err());
        assert!(concurrence(&CMatrix::identity(2).scale_real(0.5)).is_err());
    }

    #[test]
    fn ideal_end_pairs_are_maximally_entangled() {
        let sweep = ChainSweep::new(1.0, NoiseKindTag::Distinguishing).unwrap();
        for n in 2..=6 {
            let pair = chain_end_pair(n, &sweep).unwrap();
            assert_abs_diff_eq!(concurrence(&pair).unwrap(), 1.0, epsilon = 1e-7);
        }
    }

    #[test]
    fn streaming_matches_brute_force() {
        for kind in [NoiseKindTag::Distinguishing, NoiseKindTag::Depolarizing] {
            let sweep = ChainSweep::new(0.85, kind).unwrap();
            for n in 2..=7 {
                let stream = chain_end_pair(n, &sweep).unwrap();
                let brute = brute_force_end_pair(n, &sweep, 0).unwrap();
                assert!(stream.max_abs_diff(&brute) < 1e-9, "{kind:?} n={n}");
            }
        }
    }

    #[test]
    fn concurrence_is_branch_independent() {
        for kind in [NoiseKindTag::Distinguishing, NoiseKindTag::Depolarizing] {
            let sweep = ChainSweep::new(0.9, kind).unwrap();
            for n in 3..=6 {
                let reference = concurrence(&brute_force_end_pair(n, &sweep, 0).unwrap()).unwrap();
                for branch in 1..1usize << (n - 2) {
                    let c = concurrence(&brute_force_end_pair(n, &sweep, branch).unwrap()).unwrap();
                    assert_abs_diff_eq!(c, reference, epsilon = 1e-9);
                }
            }
        }
    }

    #[test]
    fn small_lengths() {
        let d = |v2| {
            let s = ChainSweep::new(v2, NoiseKindTag::Depolarizing).unwrap();
            entanglement_length(&s).unwrap().length
        };
        assert_eq!(d(0.76), 5);
        assert_eq!(d(0.3), 1);
        let s = ChainSweep::new(0.76, NoiseKindTag::Distinguishing).unwrap();
        assert_eq!(entanglement_length(&s).unwrap().length, 7);
    }

    #[test]
    fn cap_limited_flag() {
        let s = ChainSweep::new(1.0, NoiseKindTag::Distinguishing).unwrap().with_cap(5).unwrap();
        let r = entanglement_length(&s).unwrap();
        assert_eq!(r.length, 5);
        assert!(r.cap_limited);
        assert_eq!(r.concurrences.len(), 4);
    }

    #[test]
    fn thresholds() {
        assert_eq!(min_v2_threshold(2).unwrap(), 1.0 / 3.0);
        assert_abs_diff_eq!(min_v2_threshold(4).unwrap(), 0.693_361_274_350_634_7, epsilon = 1e-12);
        let mut prev = 0.0;
        for n in 2..200 {
            let t = min_v2_threshold(n).unwrap();
            assert!(t > prev && t < 1.0);
            assert_abs_diff_eq!(vn_from_v2(t, n).unwrap(), 1.0 / 3.0, epsilon = 1e-12);
            prev = t;
        }
        assert!(min_v2_threshold(1).is_err());
        assert_abs_diff_eq!(vn_from_v2(1.0, 17).unwrap(), 1.0);
        assert_abs_diff_eq!(vn_from_v2(0.76, 5).unwrap(), 0.333_621_76, epsilon = 1e-8);
        assert!(vn_from_v2(0.93, 16).unwrap() > 1.0 / 3.0);
        assert!(vn_from_v2(0.93, 17).unwrap() < 1.0 / 3.0);
        assert_eq!(depolarizing_length_bound(0.93, 64).unwrap(), 16);
    }

    #[test]
    fn sweep_validation() {
        assert!(ChainSweep::new(0.0, NoiseKindTag::Depolarizing).is_err());
        assert!(ChainSweep::new(1.01, NoiseKindTag::Depolarizing).is_err());
        let s = ChainSweep::new(0.5, NoiseKindTag::Depolarizing).unwrap();
        assert!(s.with_cap(1).is_err());
        assert_abs_diff_eq!(s.modes(), 2.0);
    }
}

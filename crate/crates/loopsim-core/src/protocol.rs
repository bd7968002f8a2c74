//! Sequential loop entangler: photon injection, post-selected PBS fusion with
//! noise, in-loop rotations, and closed-form reference states.
//!
//! Chain convention: photon 1 enters the loop as `|p⟩`; every later photon is
//! injected as `|p⟩` and fused with the loop photon, after which the loop
//! photon is rotated by `H·Z_φ` before the next injection. The last photon
//! receives `Z_φ` only, unless the graph-state convention is requested.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use crate::error::arg_err;
use crate::qcore::{CMatrix, MeasurementBasis, Polarization, QuantumState, SingleQubitGate};
use crate::{Error, Result, C64};

/// Which fusion noise channel acts on the (loop, fresh) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NoiseKind {
    Ideal,
    /// Partial distinguishability with mean wave-packet overlap `m`.
    Distinguishing { m: f64 },
    /// White noise of strength `delta` on the fused pair.
    Depolarizing { delta: f64 },
}

/// Fusion noise plus the source's two-photon emission probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    kind: NoiseKind,
    g2: f64,
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&x) {
        return Err(arg_err!("{name} = {x} outside [0, 1]"));
    }
    Ok(())
}

impl NoiseModel {
    pub const fn ideal() -> Self {
        Self { kind: NoiseKind::Ideal, g2: 0.0 }
    }

    pub fn distinguishing(m: f64) -> Result<Self> {
        check_unit("M", m)?;
        Ok(Self { kind: NoiseKind::Distinguishing { m }, g2: 0.0 })
    }

    pub fn depolarizing(delta: f64) -> Result<Self> {
        check_unit("delta", delta)?;
        Ok(Self { kind: NoiseKind::Depolarizing { delta }, g2: 0.0 })
    }

    /// Noise parameterised by its two-photon visibility: `M = v2` for
    /// distinguishing noise, `δ = 1 − v2` for depolarising noise.
    pub fn from_v2(kind: NoiseKindTag, v2: f64) -> Result<Self> {
        match kind {
            NoiseKindTag::Distinguishing => Self::distinguishing(v2),
            NoiseKindTag::Depolarizing => Self::depolarizing(1.0 - v2),
        }
    }

    pub fn with_g2(mut self, g2: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&g2) {
            return Err(arg_err!("g2 = {g2} outside [0, 1)"));
        }
        self.g2 = g2;
        Ok(self)
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn g2(&self) -> f64 {
        self.g2
    }

    /// Mean wave-packet overlap (1 unless distinguishing).
    pub fn overlap(&self) -> f64 {
        match self.kind {
            NoiseKind::Distinguishing { m } => m,
            _ => 1.0,
        }
    }

    /// Two-photon visibility produced by one noisy fusion, ignoring g².
    pub fn v2(&self) -> f64 {
        match self.kind {
            NoiseKind::Ideal => 1.0,
            NoiseKind::Distinguishing { m } => m,
            NoiseKind::Depolarizing { delta } => 1.0 - delta,
        }
    }

    /// Whether the fusion channel keeps pure states pure.
    pub fn is_coherent(&self) -> bool {
        match self.kind {
            NoiseKind::Ideal => true,
            NoiseKind::Distinguishing { m } => m == 1.0,
            NoiseKind::Depolarizing { delta } => delta == 0.0,
        }
    }

    pub fn is_ideal(&self) -> bool {
        self.is_coherent() && self.g2 == 0.0
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

/// Noise family selector for visibility-parameterised sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NoiseKindTag {
    Distinguishing,
    Depolarizing,
}

/// Rotation applied to the last photon when it leaves the loop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LastPhoton {
    /// `Z_φ` only: the state on which visibilities are defined.
    #[default]
    PhaseOnly,
    /// `H·Z_φ`, giving the graph-state form of the chain.
    Rotated,
}

/// `ε₀ = (I⊗I + Z⊗Z)/2`: projector onto `{hh, vv}`.
pub fn fusion_even() -> CMatrix {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    CMatrix::from_diagonal(&[o, z, z, o])
}

/// `ε₁ = (I⊗Z + Z⊗I)/2`: Z-parity phase on `{hh, vv}`.
pub fn fusion_odd() -> CMatrix {
    let (o, z) = (C64::new(1.0, 0.0), C64::new(0.0, 0.0));
    CMatrix::from_diagonal(&[o, z, z, -o])
}

/// Loop-protocol state with post-selection bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolState {
    state: Option<QuantumState>,
    photons_emitted: usize,
    loop_photon: Option<usize>,
    fresh_photon: Option<usize>,
    cumulative_success_probability: f64,
}

impl Default for ProtocolState {
    fn default() -> Self {
        Self::new()
    }
}

impl ProtocolState {
    pub fn new() -> Self {
        Self {
            state: None,
            photons_emitted: 0,
            loop_photon: None,
            fresh_photon: None,
            cumulative_success_probability: 1.0,
        }
    }

    /// The photons' joint state, if any photon has been emitted.
    pub fn state(&self) -> Option<&QuantumState> {
        self.state.as_ref()
    }

    pub fn into_state(self) -> Option<QuantumState> {
        self.state
    }

    pub fn photons_emitted(&self) -> usize {
        self.photons_emitted
    }

    pub fn loop_occupied(&self) -> bool {
        self.loop_photon.is_some()
    }

    /// Photon number currently circulating in the loop.
    pub fn loop_photon(&self) -> Option<usize> {
        self.loop_photon
    }

    pub fn cumulative_success_probability(&self) -> f64 {
        self.cumulative_success_probability
    }

    fn live(&mut self) -> Result<&mut QuantumState> {
        self.state.as_mut().ok_or(Error::ProtocolOrder("no photon emitted yet"))
    }

    fn position(&self, label: usize) -> Result<usize> {
        self.state
            .as_ref()
            .and_then(|s| s.position_of(label))
            .ok_or(Error::ProtocolOrder("photon is no longer part of the state"))
    }

    /// Emits a photon in `|p⟩`. The first photon enters the empty loop with
    /// probability ½; later photons wait at the PBS for fusion.
    pub fn inject_photon(&mut self) -> Result<()> {
        if self.fresh_photon.is_some() {
            return Err(Error::ProtocolOrder("previous photon has not been fused"));
        }
        let label = self.photons_emitted + 1;
        let photon = QuantumState::photon(Polarization::P, label);
        match (&self.state, self.loop_photon) {
            (None, _) => {
                self.state = Some(photon);
                self.loop_photon = Some(label);
                self.cumulative_success_probability *= 0.5;
            }
            (Some(_), None) => return Err(Error::ProtocolOrder("loop already emptied")),
            (Some(s), Some(_)) => {
                self.state = Some(s.tensor(&photon)?);
                self.fresh_photon = Some(label);
            }
        }
        self.photons_emitted = label;
        Ok(())
    }

    /// Post-selected fusion of the loop photon with the fresh photon. The
    /// loop photon exits and the fresh photon becomes the loop photon.
    pub fn fuse(&mut self, noise: &NoiseModel) -> Result<()> {
        let loop_label = self.loop_photon.ok_or(Error::ProtocolOrder("fusion with empty loop"))?;
        let fresh = self.fresh_photon.ok_or(Error::ProtocolOrder("fusion without a fresh photon"))?;
        let (ql, qf) = (self.position(loop_label)?, self.position(fresh)?);
        let state = self.live()?;
        match noise.kind() {
            NoiseKind::Distinguishing { m } if m < 1.0 => {
                let even = fusion_even().scale_real(libm::sqrt((1.0 + m) / 2.0));
                let odd = fusion_odd().scale_real(libm::sqrt((1.0 - m) / 2.0));
                state.apply_kraus(ql, qf, &[even, odd])?;
            }
            _ => state.apply_two_qubit(ql, qf, &fusion_even())?,
        }
        let p = state.renormalize()?;
        if let NoiseKind::Depolarizing { delta } = noise.kind() {
            state.depolarize_pair(ql, qf, delta)?;
        }
        self.cumulative_success_probability *= p;
        self.loop_photon = Some(fresh);
        self.fresh_photon = None;
        Ok(())
    }

    /// Applies `Z_φ` then `H` to the loop photon.
    pub fn rotate_loop_photon(&mut self, phi: f64) -> Result<()> {
        let q = self.loop_position()?;
        let g = SingleQubitGate::hadamard().then_after(&SingleQubitGate::phase_z(phi));
        self.live()?.apply_gate(q, &g)
    }

    fn loop_position(&self) -> Result<usize> {
        let label = self.loop_photon.ok_or(Error::ProtocolOrder("loop is empty"))?;
        if self.fresh_photon.is_some() {
            return Err(Error::ProtocolOrder("fresh photon waiting for fusion"));
        }
        self.position(label)
    }

    /// Releases the last photon after its final rotation; the loop is empty
    /// afterwards.
    pub fn extract_last(&mut self, phi: f64, last: LastPhoton) -> Result<()> {
        let q = self.loop_position()?;
        let gate = match last {
            LastPhoton::PhaseOnly => SingleQubitGate::phase_z(phi),
            LastPhoton::Rotated => SingleQubitGate::hadamard().then_after(&SingleQubitGate::phase_z(phi)),
        };
        self.live()?.apply_gate(q, &gate)?;
        self.loop_photon = None;
        Ok(())
    }
}

impl ProtocolState {
    /// Measures an exited photon, keeps `outcome` and removes the photon from
    /// the state. The branch probability is folded into the cumulative
    /// success probability and returned.
    pub fn measure_photon(&mut self, label: usize, basis: MeasurementBasis, outcome: usize) -> Result<f64> {
        if Some(label) == self.loop_photon || Some(label) == self.fresh_photon {
            return Err(Error::ProtocolOrder("photon has not left the loop"));
        }
        let q = self.position(label)?;
        let state = self.state.as_ref().ok_or(Error::ProtocolOrder("no photon emitted yet"))?;
        if state.num_qubits() == 1 {
            return Err(Error::ProtocolOrder("cannot measure the only photon"));
        }
        let (p, rest) = state.project(q, basis, outcome)?;
        self.state = Some(rest);
        self.cumulative_success_probability *= p;
        Ok(p)
    }
}

/// Builds an `n`-photon chain at phase `φ` in the visibility convention.
pub fn build_chain(n: usize, phi: f64, noise: &NoiseModel) -> Result<ProtocolState> {
    build_chain_with(n, phi, noise, LastPhoton::PhaseOnly)
}

/// Builds an `n`-photon chain with an explicit last-photon convention.
pub fn build_chain_with(n: usize, phi: f64, noise: &NoiseModel, last: LastPhoton) -> Result<ProtocolState> {
    if n < 2 {
        return Err(arg_err!("a chain needs at least 2 photons, got {n}"));
    }
    let limit = if noise.is_coherent() {
        crate::qcore::MAX_PURE_QUBITS
    } else {
        crate::qcore::MAX_MIXED_QUBITS
    };
    if n > limit {
        return Err(Error::Capacity { requested: n, limit });
    }
    let mut ps = ProtocolState::new();
    ps.inject_photon()?;
    for k in 2..=n {
        if k > 2 {
            ps.rotate_loop_photon(phi)?;
        }
        ps.inject_photon()?;
        ps.fuse(noise)?;
    }
    ps.extract_last(phi, last)?;
    Ok(ps)
}

fn e(phi: f64) -> C64 {
    C64::new(libm::cos(phi), libm::sin(phi))
}

/// Builds a state from `(label, amplitude)` pairs over `h`/`v` strings.
fn from_terms(n: usize, terms: &[(&str, C64)]) -> Result<QuantumState> {
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (label, a) in terms {
        amps[crate::analysis::pattern_index(label)?] += *a;
    }
    QuantumState::from_amplitudes(amps)
}

/// Expands a product of single-photon polarisation strings (e.g. `"phhp"`)
/// into `h/v` amplitudes.
fn product_terms(word: &str, weight: C64) -> Result<Vec<(Vec<u8>, C64)>> {
    let mut out = vec![(Vec::new(), weight)];
    for c in word.chars() {
        let pol = Polarization::from_char(c).ok_or_else(|| arg_err!("unknown polarisation {c:?}"))?;
        let [a, b] = pol.amplitudes();
        out = out
            .into_iter()
            .flat_map(|(bits, w)| {
                let mut zero = bits.clone();
                zero.push(0);
                let mut one = bits;
                one.push(1);
                [(zero, w * a), (one, w * b)]
            })
            .filter(|(_, w)| w.norm() > 0.0)
            .collect();
    }
    Ok(out)
}

/// Superposition of polarisation words, e.g. `[("phhp", 1), ("mvvm", -1)]`.
pub fn state_from_words(words: &[(&str, C64)]) -> Result<QuantumState> {
    let n = words.first().map(|(w, _)| w.chars().count()).ok_or(Error::EmptyData("no terms"))?;
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (word, weight) in words {
        if word.chars().count() != n {
            return Err(arg_err!("word {word:?} has the wrong length"));
        }
        for (bits, a) in product_terms(word, *weight)? {
            let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | b as usize);
            amps[idx] += a;
        }
    }
    QuantumState::from_amplitudes(amps)
}

/// Closed-form φ-dressed chain state for `n ∈ {2, 3, 4}` in the visibility
/// convention (before the final rotation of the last photon).
pub fn reference_state(n: usize, phi: f64) -> Result<QuantumState> {
    let s = FRAC_1_SQRT_2;
    let one = C64::new(1.0, 0.0);
    let ep = e(phi);
    // First-photon superpositions h ± e^{iφ} v.
    let hp = [one * s, ep * s];
    let hm = [one * s, -ep * s];
    match n {
        2 => from_terms(2, &[("hh", one), ("vv", ep)]),
        3 => {
            let mut terms = Vec::new();
            for (b, a) in [("h", hp[0]), ("v", hp[1])] {
                terms.push((alloc::format!("{b}hh"), a));
            }
            for (b, a) in [("h", hm[0]), ("v", hm[1])] {
                terms.push((alloc::format!("{b}vv"), ep * a));
            }
            let refs: Vec<(&str, C64)> = terms.iter().map(|(l, a)| (l.as_str(), *a)).collect();
            from_terms(3, &refs)
        }
        4 => {
            let mut terms = Vec::new();
            let groups = [(hp, "hhh", one), (hp, "hvv", ep), (hm, "vhh", ep), (hm, "vvv", -ep * ep)];
            for (first, tail, w) in groups {
                for (b, a) in [("h", first[0]), ("v", first[1])] {
                    terms.push((alloc::format!("{b}{tail}"), w * a));
                }
            }
            let refs: Vec<(&str, C64)> = terms.iter().map(|(l, a)| (l.as_str(), *a)).collect();
            from_terms(4, &refs)
        }
        _ => Err(arg_err!("reference states exist for 2, 3 or 4 photons, got {n}")),
    }
}

/// The chain states as written in graph-state form: the Bell pair, the
/// three-photon GHZ state and the four-photon linear cluster.
pub fn graph_form_state(n: usize) -> Result<QuantumState> {
    let one = C64::new(1.0, 0.0);
    match n {
        2 => state_from_words(&[("hh", one), ("vv", one)]),
        3 => state_from_words(&[("php", one), ("mvm", one)]),
        4 => state_from_words(&[("phhp", one), ("phvm", one), ("mvhp", one), ("mvvm", -one)]),
        _ => Err(arg_err!("graph-form states exist for 2, 3 or 4 photons, got {n}")),
    }
}

/// Two-photon visibility reduced by multi-photon emission: `(1 − g²/2)·M`.
pub fn two_photon_visibility_with_g2(m: f64, g2: f64) -> Result<f64> {
    check_unit("M", m)?;
    if !(0.0..1.0).contains(&g2) {
        return Err(arg_err!("g2 = {g2} outside [0, 1)"));
    }
    Ok((1.0 - g2 / 2.0) * m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::PauliString;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::PI;

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn first_injection_enters_loop_with_half_probability() {
        let mut p = ProtocolState::new();
        p.inject_photon().unwrap();
        assert_abs_diff_eq!(p.cumulative_success_probability(), 0.5);
        assert!(p.loop_occupied());
        assert_eq!(p.state().unwrap().num_qubits(), 1);
    }

    #[test]
    fn ideal_fusion_gives_bell_pair_with_half_branch() {
        let mut p = ProtocolState::new();
        p.inject_photon().unwrap();
        p.inject_photon().unwrap();
        p.fuse(&NoiseModel::ideal()).unwrap();
        assert_abs_diff_eq!(p.cumulative_success_probability(), 0.25, epsilon = 1e-15);
        let bell = graph_form_state(2).unwrap();
        assert_abs_diff_eq!(p.state().unwrap().fidelity(&bell).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rotation_after_first_fusion() {
        let mut p = ProtocolState::new();
        p.inject_photon().unwrap();
        p.inject_photon().unwrap();
        p.fuse(&NoiseModel::ideal()).unwrap();
        p.rotate_loop_photon(0.0).unwrap();
        let want = state_from_words(&[("hp", C64::new(1.0, 0.0)), ("vm", C64::new(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(p.state().unwrap().fidelity(&want).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn rotating_p_by_pi_gives_v() {
        let mut p = ProtocolState::new();
        p.inject_photon().unwrap();
        p.rotate_loop_photon(PI).unwrap();
        let v = QuantumState::photon(Polarization::V, 1);
        assert_abs_diff_eq!(p.state().unwrap().fidelity(&v).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn order_violations_are_reported() {
        let mut p = ProtocolState::new();
        assert!(matches!(p.fuse(&NoiseModel::ideal()), Err(Error::ProtocolOrder(_))));
        assert!(matches!(p.rotate_loop_photon(0.0), Err(Error::ProtocolOrder(_))));
        p.inject_photon().unwrap();
        assert!(matches!(p.fuse(&NoiseModel::ideal()), Err(Error::ProtocolOrder(_))));
    }

    #[test]
    fn distinguishing_fusion_visibility_is_m() {
        for m in [0.0, 0.5, 0.77, 1.0] {
            let chain = build_chain(2, 0.0, &NoiseModel::distinguishing(m).unwrap()).unwrap();
            let s = chain.state().unwrap();
            assert_abs_diff_eq!(s.expectation(&ps("XX")).unwrap(), m, epsilon = 1e-14);
            assert_abs_diff_eq!(chain.cumulative_success_probability(), 0.25, epsilon = 1e-15);
        }
    }

    #[test]
    fn fully_distinguishable_pair_is_classical_mixture() {
        let chain = build_chain(2, 0.0, &NoiseModel::distinguishing(0.0).unwrap()).unwrap();
        let rho = chain.state().unwrap().to_density();
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[(3, 3)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho[(0, 3)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn depolarizing_fusion_visibility_is_one_minus_delta() {
        let chain = build_chain(2, 0.0, &NoiseModel::depolarizing(0.24).unwrap()).unwrap();
        assert_abs_diff_eq!(chain.state().unwrap().expectation(&ps("XX")).unwrap(), 0.76, epsilon = 1e-14);
    }

    #[test]
    fn odd_fusion_operator_structure() {
        let odd = fusion_odd();
        let mut basis = QuantumState::photon(Polarization::H, 1)
            .tensor(&QuantumState::photon(Polarization::V, 2))
            .unwrap();
        basis.apply_two_qubit(0, 1, &odd).unwrap();
        assert_abs_diff_eq!(basis.norm(), 0.0);
        assert_abs_diff_eq!(odd[(0, 0)].re, 1.0);
        assert_abs_diff_eq!(odd[(3, 3)].re, -1.0);
        assert_abs_diff_eq!(odd[(1, 1)].norm() + odd[(2, 2)].norm(), 0.0);
    }

    #[test]
    fn chain_success_probability() {
        for n in 2..=8 {
            let chain = build_chain(n, 0.3, &NoiseModel::ideal()).unwrap();
            assert_abs_diff_eq!(
                chain.cumulative_success_probability(),
                0.5f64.powi(n as i32),
                epsilon = 1e-14
            );
        }
    }

    #[test]
    fn chain_matches_reference_states() {
        for n in 2..=4 {
            for k in 0..13 {
                let phi = -PI + 0.5 * k as f64;
                let chain = build_chain(n, phi, &NoiseModel::ideal()).unwrap();
                let f = chain.state().unwrap().fidelity(&reference_state(n, phi).unwrap()).unwrap();
                assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn rotated_chains_match_graph_forms() {
        for n in 2..=4 {
            let last = if n == 2 { LastPhoton::PhaseOnly } else { LastPhoton::Rotated };
            let chain = build_chain_with(n, 0.0, &NoiseModel::ideal(), last).unwrap();
            let f = chain.state().unwrap().fidelity(&graph_form_state(n).unwrap()).unwrap();
            assert_abs_diff_eq!(f, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn four_photon_phase_dressing_is_local() {
        // The φ-dressed four-photon state is the φ = 0 state with Z_φ on the
        // first three photons.
        let phi = 0.83;
        let mut s = reference_state(4, 0.0).unwrap();
        for q in 0..3 {
            s.apply_gate(q, &SingleQubitGate::phase_z(phi)).unwrap();
        }
        assert_abs_diff_eq!(s.fidelity(&reference_state(4, phi).unwrap()).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ghz_measurement_collapses_to_product() {
        let chain = build_chain_with(3, 0.0, &NoiseModel::ideal(), LastPhoton::Rotated).unwrap();
        let (p, rest) = chain.state().unwrap().project(1, MeasurementBasis::HV, 0).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
        let pp = state_from_words(&[("pp", C64::new(1.0, 0.0))]).unwrap();
        assert_abs_diff_eq!(rest.fidelity(&pp).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn visibility_with_g2() {
        assert_abs_diff_eq!(two_photon_visibility_with_g2(1.0, 0.0).unwrap(), 1.0);
        assert_abs_diff_eq!(two_photon_visibility_with_g2(0.77, 0.0).unwrap(), 0.77);
        assert_abs_diff_eq!(two_photon_visibility_with_g2(0.9, 0.1).unwrap(), 0.855, epsilon = 1e-15);
        assert!(two_photon_visibility_with_g2(1.1, 0.0).is_err());
        assert!(two_photon_visibility_with_g2(0.5, 1.0).is_err());
    }

    #[test]
    fn capacity_limits() {
        let noisy = NoiseModel::distinguishing(0.9).unwrap();
        assert!(matches!(build_chain(11, 0.0, &noisy), Err(Error::Capacity { .. })));
        assert!(matches!(build_chain(25, 0.0, &NoiseModel::ideal()), Err(Error::Capacity { .. })));
        assert!(build_chain(1, 0.0, &noisy).is_err());
    }

    #[test]
    fn noise_parameter_ranges() {
        assert!(NoiseModel::distinguishing(1.2).is_err());
        assert!(NoiseModel::depolarizing(-0.1).is_err());
        assert!(NoiseModel::ideal().with_g2(1.0).is_err());
        assert!(NoiseModel::ideal().is_ideal());
        assert!(!NoiseModel::ideal().with_g2(0.01).unwrap().is_ideal());
    }
}

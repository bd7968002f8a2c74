//! Observables on chain states: visibilities, amplitude tables, phase scans,
//! stabilizer generators and HOM/g² relations.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::arg_err;
use crate::protocol::{build_chain, NoiseKind, NoiseModel};
use crate::qcore::{MeasurementBasis, Pauli, PauliString, QuantumState, SingleQubitGate};
use crate::{Error, Result, C64};

/// Index of an outcome label such as `"hvh"` (`h`/`0` → 0, `v`/`1` → 1,
/// first photon most significant).
pub fn pattern_index(label: &str) -> Result<usize> {
    if label.is_empty() || label.len() > usize::BITS as usize - 1 {
        return Err(arg_err!("invalid outcome label {label:?}"));
    }
    label.chars().try_fold(0usize, |acc, c| match c {
        'h' | 'H' | '0' => Ok(acc << 1),
        'v' | 'V' | '1' => Ok((acc << 1) | 1),
        other => Err(arg_err!("invalid outcome symbol {other:?} in {label:?}")),
    })
}

/// Outcome label of `index` over `n` photons, e.g. `hvh`.
pub fn pattern_label(index: usize, n: usize) -> String {
    (0..n).map(|q| if index & (1 << (n - 1 - q)) == 0 { 'h' } else { 'v' }).collect()
}

/// Which correlation observable a scan evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Observable {
    /// `X^{⊗n}`
    Xn,
    /// `(X⊗I)^{n/2−1} ⊗ X ⊗ X` for even `n`.
    SvnPrime,
}

impl Observable {
    pub fn pauli(self, n: usize) -> Result<PauliString> {
        match self {
            Observable::Xn => {
                if n < 2 {
                    return Err(arg_err!("X correlations need at least 2 photons"));
                }
                Ok(PauliString::uniform(Pauli::X, n))
            }
            Observable::SvnPrime => svn_prime(n),
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            Observable::Xn => "xn",
            Observable::SvnPrime => "svnp",
        }
    }
}

/// Expectation value of `observable` on `state`.
pub fn visibility(state: &QuantumState, observable: &PauliString) -> Result<f64> {
    state.expectation(observable)
}

/// Per-photon measurement bases realising a Pauli-string observable, with
/// the signed population combination that estimates it.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementPlan {
    bases: Vec<MeasurementBasis>,
    observable: PauliString,
}

impl MeasurementPlan {
    /// Identity letters are read out in the diagonal basis, like their
    /// neighbours.
    pub fn new(observable: PauliString) -> Result<Self> {
        if !observable.is_hermitian() {
            return Err(arg_err!("observable {observable} is not Hermitian"));
        }
        let bases = observable
            .letters()
            .iter()
            .map(|&l| MeasurementBasis::of_pauli(l).unwrap_or(MeasurementBasis::PM))
            .collect();
        Ok(Self { bases, observable })
    }

    pub fn bases(&self) -> &[MeasurementBasis] {
        &self.bases
    }

    pub fn observable(&self) -> &PauliString {
        &self.observable
    }

    /// `±1` weight of each outcome index: the product of `(−1)^{bit}` over
    /// non-identity letters, times the observable's sign.
    pub fn signs(&self) -> Vec<f64> {
        let n = self.observable.len();
        let sign = self.observable.phase().as_sign().unwrap_or(1.0);
        let mask = self
            .observable
            .letters()
            .iter()
            .enumerate()
            .filter(|(_, l)| **l != Pauli::I)
            .fold(0usize, |m, (q, _)| m | (1 << (n - 1 - q)));
        (0..1usize << n)
            .map(|j| if (j & mask).count_ones() % 2 == 0 { sign } else { -sign })
            .collect()
    }

    /// Signed combination `Σ_j s_j P_j` of outcome probabilities.
    pub fn combine(&self, populations: &[f64]) -> Result<f64> {
        let signs = self.signs();
        if populations.len() != signs.len() {
            return Err(arg_err!("{} populations for {} outcomes", populations.len(), signs.len()));
        }
        Ok(signs.iter().zip(populations).map(|(s, p)| s * p).sum())
    }

    /// Exact outcome distribution of `state` in this plan's bases.
    pub fn populations(&self, state: &QuantumState) -> Result<Vec<f64>> {
        state.basis_populations(&self.bases)
    }
}

fn e_pow(phi: f64, k: i32) -> C64 {
    let a = phi * k as f64;
    C64::new(libm::cos(a), libm::sin(a))
}

/// Closed-form amplitudes of the `n`-photon chain in the diagonal basis
/// (`h` ↔ `p`, `v` ↔ `m` per photon), normalised, with a fixed global phase.
pub fn amplitudes(n: usize, phi: f64) -> Result<Vec<C64>> {
    let one = C64::new(1.0, 0.0);
    let e1 = e_pow(phi, 1);
    let e2 = e_pow(phi, 2);
    let e3 = e_pow(phi, 3);
    let table: Vec<(&[&str], C64)> = match n {
        2 => vec![(&["hh", "vv"], one + e1), (&["hv", "vh"], one - e1)],
        3 => vec![
            (&["hhh", "hvv"], one + e1 * 2.0 - e2),
            (&["hhv", "hvh", "vhh", "vvv"], one + e2),
            (&["vhv", "vvh"], one - e1 * 2.0 - e2),
        ],
        4 => vec![
            (&["hhhh", "hhvv"], one + e1 * 3.0 - e2 + e3),
            (&["vhhv", "vhvh"], one - e1 + e2 * 3.0 + e3),
            (&["hhhv", "hhvh", "vhhh", "vhvv"], (one - e1) * (one + e1) * (one + e1)),
            (&["hvhv", "hvvh", "vvhh", "vvvv"], (one + e1) * (one - e1) * (one - e1)),
            (&["hvhh", "hvvv"], one + e1 + e2 * 3.0 - e3),
            (&["vvhv", "vvvh"], one - e1 * 3.0 - e2 - e3),
        ],
        _ => return Err(arg_err!("amplitude tables exist for 2, 3 or 4 photons, got {n}")),
    };
    // Denominator 2^{(2n−1)/2}.
    let norm = libm::pow(2.0, (2 * n - 1) as f64 / 2.0);
    let mut amps = vec![C64::new(0.0, 0.0); 1 << n];
    for (labels, a) in table {
        for l in labels {
            amps[pattern_index(l)?] = a / norm;
        }
    }
    Ok(amps)
}

/// Amplitudes of a state after a Hadamard on every photon.
pub fn diagonal_basis_amplitudes(state: &QuantumState) -> Result<Vec<C64>> {
    let mut s = state.clone();
    for q in 0..s.num_qubits() {
        s.apply_gate(q, &SingleQubitGate::hadamard())?;
    }
    s.amplitudes().map(<[C64]>::to_vec).ok_or_else(|| arg_err!("state is not pure"))
}

/// Closed-form visibility of an ideal `n`-photon chain.
pub fn ideal_visibility(n: usize, phi: f64, observable: Observable) -> Result<f64> {
    let (c, s) = (libm::cos(phi), libm::sin(phi));
    match observable {
        Observable::Xn => match n {
            0 | 1 => Err(arg_err!("X correlations need at least 2 photons")),
            2 => Ok(c),
            _ => {
                let sign = if (n - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
                Ok(sign * libm::pow(c, (n - 3) as f64) * s * s)
            }
        },
        Observable::SvnPrime => {
            svn_prime(n)?;
            Ok(libm::pow(c, (n / 2) as f64))
        }
    }
}

/// Closed-form visibility including fusion noise and the g² reduction.
///
/// Distinguishing noise scales `X^{⊗n}` by `M^{n−1}` and the `S_{V_n'}`
/// observable by `M^{n/2}`; depolarising noise scales both by `(1−δ)^{n−1}`.
/// Multi-photon emission misroutes the first photon and scales every
/// visibility by `1 − g²/2`.
pub fn predicted_visibility(n: usize, phi: f64, noise: &NoiseModel, observable: Observable) -> Result<f64> {
    let ideal = ideal_visibility(n, phi, observable)?;
    let factor = match (noise.kind(), observable) {
        (NoiseKind::Ideal, _) => 1.0,
        (NoiseKind::Distinguishing { m }, Observable::Xn) => libm::pow(m, (n - 1) as f64),
        (NoiseKind::Distinguishing { m }, Observable::SvnPrime) => libm::pow(m, (n / 2) as f64),
        (NoiseKind::Depolarizing { delta }, _) => libm::pow(1.0 - delta, (n - 1) as f64),
    };
    Ok(ideal * factor * (1.0 - noise.g2() / 2.0))
}

/// Simulated visibility of the chain built at `φ`, with the g² reduction.
pub fn simulated_visibility(n: usize, phi: f64, noise: &NoiseModel, observable: Observable) -> Result<f64> {
    let obs = observable.pauli(n)?;
    let chain = build_chain(n, phi, noise)?;
    let state = chain.state().ok_or(Error::ProtocolOrder("empty chain"))?;
    Ok(visibility(state, &obs)? * (1.0 - noise.g2() / 2.0))
}

/// Phase-scan configuration over an inclusive, strictly increasing grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseScan {
    phis: Vec<f64>,
    n: usize,
    noise: NoiseModel,
    observable: Observable,
}

/// One phase-scan record.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRow {
    pub phi: f64,
    pub simulated: f64,
    pub predicted: f64,
}

impl PhaseScan {
    pub fn new(phis: Vec<f64>, n: usize, noise: NoiseModel, observable: Observable) -> Result<Self> {
        if n < 2 {
            return Err(arg_err!("phase scans need at least 2 photons, got {n}"));
        }
        observable.pauli(n)?;
        if phis.is_empty() {
            return Err(Error::EmptyData("phase grid"));
        }
        if phis.iter().any(|p| !p.is_finite()) || phis.windows(2).any(|w| w[0] >= w[1]) {
            return Err(arg_err!("phase grid must be finite and strictly increasing"));
        }
        Ok(Self { phis, n, noise, observable })
    }

    /// `points` evenly spaced phases from `min` to `max` inclusive.
    pub fn uniform(
        n: usize,
        noise: NoiseModel,
        observable: Observable,
        points: usize,
        min: f64,
        max: f64,
    ) -> Result<Self> {
        let phis = match points {
            0 => return Err(Error::EmptyData("phase grid")),
            1 => vec![min],
            _ => (0..points).map(|k| min + (max - min) * k as f64 / (points - 1) as f64).collect(),
        };
        Self::new(phis, n, noise, observable)
    }

    pub fn phis(&self) -> &[f64] {
        &self.phis
    }

    pub fn photons(&self) -> usize {
        self.n
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn observable(&self) -> Observable {
        self.observable
    }

    /// Evaluates one grid point.
    pub fn row(&self, phi: f64) -> Result<ScanRow> {
        Ok(ScanRow {
            phi,
            simulated: simulated_visibility(self.n, phi, &self.noise, self.observable)?,
            predicted: predicted_visibility(self.n, phi, &self.noise, self.observable)?,
        })
    }
}

/// Runs a phase scan sequentially.
pub fn phase_scan(cfg: &PhaseScan) -> Result<Vec<ScanRow>> {
    cfg.phis.iter().map(|&phi| cfg.row(phi)).collect()
}

/// Cluster stabilizer generators `Z_{i−1} X_i Z_{i+1}` with `X ↔ Z` swapped
/// on the last photon (the chain's last photon is not rotated).
pub fn stabilizer_generators(n: usize) -> Result<Vec<PauliString>> {
    if n < 2 {
        return Err(arg_err!("stabilizer generators need at least 2 photons, got {n}"));
    }
    Ok((0..n)
        .map(|i| {
            let mut letters = vec![Pauli::I; n];
            letters[i] = Pauli::X;
            if i > 0 {
                letters[i - 1] = Pauli::Z;
            }
            if i + 1 < n {
                letters[i + 1] = Pauli::Z;
            }
            letters[n - 1] = match letters[n - 1] {
                Pauli::X => Pauli::Z,
                Pauli::Z => Pauli::X,
                other => other,
            };
            PauliString::new(letters)
        })
        .collect())
}

/// `(X⊗I)^{n/2−1} ⊗ X ⊗ X` for even `n ≥ 4`.
pub fn svn_prime(n: usize) -> Result<PauliString> {
    if n < 4 || !n.is_multiple_of(2) {
        return Err(arg_err!("S_Vn' is defined for even n >= 4, got {n}"));
    }
    let mut letters = Vec::with_capacity(n);
    for _ in 0..n / 2 - 1 {
        letters.extend([Pauli::X, Pauli::I]);
    }
    letters.extend([Pauli::X, Pauli::X]);
    Ok(PauliString::new(letters))
}

/// Product of the odd-numbered generators `g₁ g₃ … g_{n−1}`.
pub fn odd_generator_product(n: usize) -> Result<PauliString> {
    let gens = stabilizer_generators(n)?;
    gens.iter().step_by(2).try_fold(PauliString::identity(n), |acc, g| acc.product(g))
}

/// All `2ⁿ` products of the generators (with exact phases).
pub fn stabilizer_group(generators: &[PauliString]) -> Result<Vec<PauliString>> {
    let n = generators.first().map(PauliString::len).ok_or(Error::EmptyData("generators"))?;
    let mut group = vec![PauliString::identity(n)];
    for g in generators {
        let extra = group.iter().map(|h| h.product(g)).collect::<Result<Vec<_>>>()?;
        group.extend(extra);
    }
    Ok(group)
}

/// Delay setting of a Hong–Ou–Mandel measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HomDelay {
    Zero,
    Far,
}

/// Coincidence probability behind a balanced beam splitter: `½(1 − M)` at
/// zero delay, `½` far from overlap.
pub fn hom_dip(m: f64, delay: HomDelay) -> Result<f64> {
    if !(0.0..=1.0).contains(&m) {
        return Err(arg_err!("M = {m} outside [0, 1]"));
    }
    Ok(match delay {
        HomDelay::Zero => 0.5 * (1.0 - m),
        HomDelay::Far => 0.5,
    })
}

/// Indistinguishability bound `M ≥ V_HOM + g²`, clipped to `[0, 1]`.
pub fn m_lower_bound(v_hom: f64, g2: f64) -> f64 {
    (v_hom + g2).clamp(0.0, 1.0)
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::{reference_state, LastPhoton};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn labels_round_trip() {
        assert_eq!(pattern_index("hvh").unwrap(), 0b010);
        assert_eq!(pattern_label(0b010, 3), "hvh");
        assert_eq!(pattern_index("0110").unwrap(), 6);
        assert!(pattern_index("hx").is_err());
        assert!(pattern_index("").is_err());
    }

    #[test]
    fn amplitude_tables_are_normalized() {
        for n in 2..=4 {
            for k in 0..40 {
                let phi = 0.16 * k as f64;
                let a = amplitudes(n, phi).unwrap();
                let total: f64 = a.iter().map(|x| x.norm_sqr()).sum();
                assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
            }
        }
        assert!(amplitudes(5, 0.0).is_err());
    }

    #[test]
    fn amplitude_tables_match_chain_phase_exactly() {
        for n in 2..=4 {
            for k in 0..9 {
                let phi = -2.0 + 0.55 * k as f64;
                let table = amplitudes(n, phi).unwrap();
                let sim = diagonal_basis_amplitudes(&reference_state(n, phi).unwrap()).unwrap();
                // Fix the global phase on the largest entry.
                let j = (0..sim.len()).max_by(|&a, &b| sim[a].norm().total_cmp(&sim[b].norm())).unwrap();
                let g = table[j] / sim[j];
                for (t, s) in table.iter().zip(&sim) {
                    assert_abs_diff_eq!((t - s * g).norm(), 0.0, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn two_photon_amplitudes() {
        let a = amplitudes(2, 0.7).unwrap();
        let e = C64::new(libm::cos(0.7), libm::sin(0.7));
        let d = libm::pow(2.0, 1.5);
        assert_abs_diff_eq!((a[0] - (1.0 + e) / d).norm(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!((a[1] - (1.0 - e) / d).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn visibility_laws_on_reference_states() {
        for k in 0..21 {
            let phi = -PI + PI * k as f64 / 10.0;
            let (c, s) = (libm::cos(phi), libm::sin(phi));
            let v2 = visibility(&reference_state(2, phi).unwrap(), &ps("XX")).unwrap();
            let v3 = visibility(&reference_state(3, phi).unwrap(), &ps("XXX")).unwrap();
            let s4 = reference_state(4, phi).unwrap();
            assert_abs_diff_eq!(v2, c, epsilon = 1e-12);
            assert_abs_diff_eq!(v3, s * s, epsilon = 1e-12);
            assert_abs_diff_eq!(visibility(&s4, &ps("XIXX")).unwrap(), c * c, epsilon = 1e-12);
            assert_abs_diff_eq!(visibility(&s4, &ps("XXXX")).unwrap(), -c * s * s, epsilon = 1e-12);
        }
        let s3 = reference_state(3, FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(visibility(&s3, &ps("XXX")).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn general_n_laws_for_ideal_chains() {
        for n in 2..=8 {
            for k in 0..7 {
                let phi = 0.45 * k as f64 - 1.3;
                let noise = NoiseModel::ideal();
                let sim = simulated_visibility(n, phi, &noise, Observable::Xn).unwrap();
                let pred = ideal_visibility(n, phi, Observable::Xn).unwrap();
                assert_abs_diff_eq!(sim, pred, epsilon = 1e-10);
                if n % 2 == 0 && n >= 4 {
                    let sim = simulated_visibility(n, phi, &noise, Observable::SvnPrime).unwrap();
                    let pred = ideal_visibility(n, phi, Observable::SvnPrime).unwrap();
                    assert_abs_diff_eq!(sim, pred, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn noisy_predictions_match_simulation() {
        let noises = [
            NoiseModel::distinguishing(0.77).unwrap(),
            NoiseModel::depolarizing(0.2).unwrap(),
            NoiseModel::distinguishing(0.9).unwrap().with_g2(0.05).unwrap(),
        ];
        for noise in noises {
            for n in 2..=6 {
                for phi in [0.0, 0.6, FRAC_PI_2, 2.2] {
                    let sim = simulated_visibility(n, phi, &noise, Observable::Xn).unwrap();
                    let pred = predicted_visibility(n, phi, &noise, Observable::Xn).unwrap();
                    assert_abs_diff_eq!(sim, pred, epsilon = 1e-10);
                    if n % 2 == 0 && n >= 4 {
                        let sim = simulated_visibility(n, phi, &noise, Observable::SvnPrime).unwrap();
                        let pred = predicted_visibility(n, phi, &noise, Observable::SvnPrime).unwrap();
                        assert_abs_diff_eq!(sim, pred, epsilon = 1e-10);
                    }
                }
            }
        }
    }

    #[test]
    fn scan_examples() {
        let scan = PhaseScan::new(vec![0.0, FRAC_PI_4, FRAC_PI_2], 2, NoiseModel::ideal(), Observable::Xn).unwrap();
        let rows = phase_scan(&scan).unwrap();
        let want = [1.0, FRAC_1_SQRT_2, 0.0];
        for (r, w) in rows.iter().zip(want) {
            assert_abs_diff_eq!(r.simulated, w, epsilon = 1e-12);
            assert_abs_diff_eq!(r.predicted, w, epsilon = 1e-12);
        }
        let m = NoiseModel::distinguishing(0.9).unwrap();
        let r = PhaseScan::new(vec![FRAC_PI_2], 3, m, Observable::Xn).unwrap().row(FRAC_PI_2).unwrap();
        assert_abs_diff_eq!(r.simulated, 0.81, epsilon = 1e-12);
        let m = NoiseModel::distinguishing(0.77).unwrap();
        let r = PhaseScan::new(vec![0.0], 4, m, Observable::SvnPrime).unwrap().row(0.0).unwrap();
        assert_abs_diff_eq!(r.simulated, 0.5929, epsilon = 1e-12);
    }

    #[test]
    fn scan_grid_validation() {
        let ideal = NoiseModel::ideal();
        assert!(PhaseScan::new(vec![0.0, 0.0], 2, ideal, Observable::Xn).is_err());
        assert!(PhaseScan::new(vec![], 2, ideal, Observable::Xn).is_err());
        assert!(PhaseScan::new(vec![0.0], 3, ideal, Observable::SvnPrime).is_err());
        let u = PhaseScan::uniform(2, ideal, Observable::Xn, 5, 0.0, 1.0).unwrap();
        assert_eq!(u.phis(), &[0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn four_photon_generators() {
        let g = stabilizer_generators(4).unwrap();
        let want = ["XZII", "ZXZI", "IZXX", "IIZZ"];
        for (g, w) in g.iter().zip(want) {
            assert_eq!(*g, ps(w));
        }
        assert_eq!(stabilizer_generators(2).unwrap(), vec![ps("XX"), ps("ZZ")]);
        assert!(stabilizer_generators(1).is_err());
    }

    #[test]
    fn generators_stabilize_chains() {
        for n in 2..=6 {
            let gens = stabilizer_generators(n).unwrap();
            let chain = build_chain(n, 0.0, &NoiseModel::ideal()).unwrap();
            let s = chain.state().unwrap();
            for g in stabilizer_group(&gens).unwrap() {
                assert_abs_diff_eq!(s.expectation(&g).unwrap(), 1.0, epsilon = 1e-10);
            }
            assert_eq!(stabilizer_group(&gens).unwrap().len(), 1 << n);
        }
    }

    #[test]
    fn generators_commute() {
        let g = stabilizer_generators(7).unwrap();
        for a in &g {
            for b in &g {
                assert!(a.commutes_with(b));
            }
        }
    }

    #[test]
    fn svn_prime_is_odd_generator_product() {
        for n in [4, 6, 8, 10] {
            assert_eq!(svn_prime(n).unwrap(), odd_generator_product(n).unwrap());
        }
        assert_eq!(svn_prime(6).unwrap(), ps("XIXIXX"));
        assert!(svn_prime(5).is_err());
        assert!(svn_prime(2).is_err());
    }

    #[test]
    fn measurement_plan_matches_expectation() {
        let state = reference_state(4, 0.4).unwrap();
        for obs in ["XXXX", "XIXX", "-XIXX"] {
            let plan = MeasurementPlan::new(ps(obs)).unwrap();
            let pops = plan.populations(&state).unwrap();
            assert_abs_diff_eq!(
                plan.combine(&pops).unwrap(),
                state.expectation(&ps(obs)).unwrap(),
                epsilon = 1e-12
            );
        }
        assert!(MeasurementPlan::new(ps("iXX")).is_err());
    }

    #[test]
    fn rotated_last_photon_flag() {
        let chain = crate::protocol::build_chain_with(2, 0.0, &NoiseModel::ideal(), LastPhoton::Rotated).unwrap();
        assert_abs_diff_eq!(chain.state().unwrap().expectation(&ps("XZ")).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn hom_and_bounds() {
        assert_abs_diff_eq!(hom_dip(1.0, HomDelay::Zero).unwrap(), 0.0);
        assert_abs_diff_eq!(hom_dip(0.0, HomDelay::Zero).unwrap(), 0.5);
        assert_abs_diff_eq!(hom_dip(0.95, HomDelay::Zero).unwrap(), 0.025, epsilon = 1e-15);
        assert_abs_diff_eq!(hom_dip(0.3, HomDelay::Far).unwrap(), 0.5);
        assert!(hom_dip(1.5, HomDelay::Zero).is_err());
        assert_abs_diff_eq!(m_lower_bound(0.78, 0.0), 0.78);
        assert_abs_diff_eq!(m_lower_bound(0.9, 0.05), 0.95, epsilon = 1e-15);
        assert_abs_diff_eq!(m_lower_bound(0.98, 0.05), 1.0);
        assert_abs_diff_eq!(m_lower_bound(0.0, 0.0), 0.0);
    }
}

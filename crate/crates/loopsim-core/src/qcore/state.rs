use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use super::linalg::psd_sqrt;
use super::{bit, CMatrix, Pauli, PauliString, SingleQubitGate, ALGEBRAIC_TOL};
use crate::error::arg_err;
use crate::{Error, Result, C64};

/// Largest register held as a state vector.
pub const MAX_PURE_QUBITS: usize = 24;
/// Largest register held as a density matrix.
pub const MAX_MIXED_QUBITS: usize = 10;

/// Branch probabilities below this are treated as impossible.
const BRANCH_FLOOR: f64 = 1e-15;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Polarisation eigenstates. `P`/`M` are diagonal (±45°), `YPlus`/`YMinus`
/// are circular.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Polarization {
    H,
    V,
    P,
    M,
    YPlus,
    YMinus,
}

impl Polarization {
    /// Amplitudes in the `{h, v}` basis.
    pub fn amplitudes(self) -> [C64; 2] {
        let s = FRAC_1_SQRT_2;
        match self {
            Polarization::H => [ONE, ZERO],
            Polarization::V => [ZERO, ONE],
            Polarization::P => [C64::new(s, 0.0), C64::new(s, 0.0)],
            Polarization::M => [C64::new(s, 0.0), C64::new(-s, 0.0)],
            Polarization::YPlus => [C64::new(s, 0.0), C64::new(0.0, s)],
            Polarization::YMinus => [C64::new(s, 0.0), C64::new(0.0, -s)],
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'h' | 'H' => Some(Polarization::H),
            'v' | 'V' => Some(Polarization::V),
            'p' | 'P' | 'd' | 'D' => Some(Polarization::P),
            'm' | 'M' | 'a' | 'A' => Some(Polarization::M),
            'r' | 'R' => Some(Polarization::YPlus),
            'l' | 'L' => Some(Polarization::YMinus),
            _ => None,
        }
    }
}

/// Projective single-photon measurement basis; outcome 0 is the first state
/// of [`MeasurementBasis::states`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MeasurementBasis {
    HV,
    PM,
    Y,
}

impl MeasurementBasis {
    pub fn states(self) -> [Polarization; 2] {
        match self {
            MeasurementBasis::HV => [Polarization::H, Polarization::V],
            MeasurementBasis::PM => [Polarization::P, Polarization::M],
            MeasurementBasis::Y => [Polarization::YPlus, Polarization::YMinus],
        }
    }

    /// Eigenbasis of a Pauli letter (`None` for the identity).
    pub fn of_pauli(p: Pauli) -> Option<Self> {
        match p {
            Pauli::I => None,
            Pauli::X => Some(MeasurementBasis::PM),
            Pauli::Y => Some(MeasurementBasis::Y),
            Pauli::Z => Some(MeasurementBasis::HV),
        }
    }

    /// Gate mapping this basis onto `{h, v}`, i.e. `U|b_k⟩ = |k⟩`.
    fn to_computational(self) -> SingleQubitGate {
        let [a, b] = self.states();
        let (a, b) = (a.amplitudes(), b.amplitudes());
        SingleQubitGate::new([[a[0].conj(), a[1].conj()], [b[0].conj(), b[1].conj()]])
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    Vector(Vec<C64>),
    Density(CMatrix),
}

/// Register of polarisation qubits held either as a normalised state vector or
/// as a unit-trace density matrix. Each qubit carries a label (the photon
/// number) so that qubits can be tracked through projections and traces.
#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n: usize,
    labels: Vec<usize>,
    repr: Repr,
}

fn check_capacity(n: usize, mixed: bool) -> Result<()> {
    let limit = if mixed { MAX_MIXED_QUBITS } else { MAX_PURE_QUBITS };
    if n > limit {
        return Err(Error::Capacity { requested: n, limit });
    }
    Ok(())
}

/// Applies a 2×2 matrix to qubit `q` of a raw `nq`-qubit amplitude array.
fn apply_1q(data: &mut [C64], nq: usize, q: usize, m: &[[C64; 2]; 2]) {
    let mask = bit(nq, q);
    for i in 0..data.len() {
        if i & mask == 0 {
            let (a, b) = (data[i], data[i | mask]);
            data[i] = m[0][0] * a + m[0][1] * b;
            data[i | mask] = m[1][0] * a + m[1][1] * b;
        }
    }
}

/// Applies a 4×4 matrix to qubits `(q1, q2)` (q1 is the high bit of the
/// local index) of a raw `nq`-qubit amplitude array.
fn apply_2q(data: &mut [C64], nq: usize, q1: usize, q2: usize, m: &CMatrix) {
    let (m1, m2) = (bit(nq, q1), bit(nq, q2));
    let offsets = [0, m2, m1, m1 | m2];
    for i in 0..data.len() {
        if i & (m1 | m2) == 0 {
            let v = offsets.map(|o| data[i | o]);
            for (r, o) in offsets.iter().enumerate() {
                data[i | o] = (0..4).map(|c| m[(r, c)] * v[c]).sum();
            }
        }
    }
}

fn conj_gate(m: &[[C64; 2]; 2]) -> [[C64; 2]; 2] {
    m.map(|row| row.map(|x| x.conj()))
}

/// Inserts bit `b` at qubit position `q` into an `(n-1)`-qubit index.
fn insert_bit(rest: usize, n: usize, q: usize, b: usize) -> usize {
    let low_bits = n - 1 - q;
    let low = rest & ((1 << low_bits) - 1);
    let high = rest >> low_bits;
    (high << (low_bits + 1)) | (b << low_bits) | low
}

/// Scatters the bits of `value` (MSB first) onto qubit `positions`.
fn scatter(value: usize, n: usize, positions: &[usize]) -> usize {
    let k = positions.len();
    positions
        .iter()
        .enumerate()
        .filter(|(i, _)| value & (1 << (k - 1 - i)) != 0)
        .fold(0, |acc, (_, &q)| acc | bit(n, q))
}

impl QuantumState {
    /// Single photon in the given polarisation.
    pub fn photon(pol: Polarization, label: usize) -> Self {
        Self { n: 1, labels: vec![label], repr: Repr::Vector(pol.amplitudes().to_vec()) }
    }

    /// State vector from (not necessarily normalised) amplitudes; labels are
    /// `1..=n`.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let n = qubits_of(amps.len())?;
        check_capacity(n, false)?;
        let norm = libm::sqrt(amps.iter().map(|a| a.norm_sqr()).sum::<f64>());
        if norm < BRANCH_FLOOR {
            return Err(arg_err!("state vector has zero norm"));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(Self { n, labels: (1..=n).collect(), repr: Repr::Vector(amps) })
    }

    /// Density matrix; must be Hermitian with unit trace.
    pub fn from_density(rho: CMatrix) -> Result<Self> {
        let n = qubits_of(rho.dim())?;
        check_capacity(n, true)?;
        if rho.hermiticity_error() > 1e-9 {
            return Err(arg_err!("density matrix is not Hermitian"));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-9 {
            return Err(arg_err!("density matrix trace is {tr}, expected 1"));
        }
        Ok(Self { n, labels: (1..=n).collect(), repr: Repr::Density(rho) })
    }

    pub fn with_labels(mut self, labels: Vec<usize>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(arg_err!("{} labels given for {} qubits", labels.len(), self.n));
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Position of the qubit carrying `label`.
    pub fn position_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn is_pure(&self) -> bool {
        matches!(self.repr, Repr::Vector(_))
    }

    pub fn amplitudes(&self) -> Option<&[C64]> {
        match &self.repr {
            Repr::Vector(v) => Some(v),
            Repr::Density(_) => None,
        }
    }

    pub fn to_density(&self) -> CMatrix {
        match &self.repr {
            Repr::Vector(v) => CMatrix::outer(v),
            Repr::Density(m) => m.clone(),
        }
    }

    /// Converts to the density representation in place.
    pub fn make_mixed(&mut self) -> Result<()> {
        if let Repr::Vector(v) = &self.repr {
            check_capacity(self.n, true)?;
            self.repr = Repr::Density(CMatrix::outer(v));
        }
        Ok(())
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.n {
            return Err(arg_err!("qubit {q} out of range for {} qubits", self.n));
        }
        Ok(())
    }

    /// `self ⊗ other`.
    pub fn tensor(&self, other: &Self) -> Result<Self> {
        let n = self.n + other.n;
        let mut labels = self.labels.clone();
        labels.extend_from_slice(&other.labels);
        let repr = match (&self.repr, &other.repr) {
            (Repr::Vector(a), Repr::Vector(b)) => {
                check_capacity(n, false)?;
                Repr::Vector(a.iter().flat_map(|x| b.iter().map(move |y| x * y)).collect())
            }
            _ => {
                check_capacity(n, true)?;
                Repr::Density(self.to_density().kron(&other.to_density()))
            }
        };
        Ok(Self { n, labels, repr })
    }

    pub fn apply_gate(&mut self, q: usize, gate: &SingleQubitGate) -> Result<()> {
        self.check_qubit(q)?;
        let n = self.n;
        match &mut self.repr {
            Repr::Vector(v) => apply_1q(v, n, q, &gate.m),
            Repr::Density(rho) => {
                let data = density_data_mut(rho);
                apply_1q(data, 2 * n, q, &gate.m);
                apply_1q(data, 2 * n, n + q, &conj_gate(&gate.m));
            }
        }
        Ok(())
    }

    /// Applies `K ρ K†` (or `K|ψ⟩`) for a 4×4 `K` on qubits `(q1, q2)`
    /// without renormalising.
    pub fn apply_two_qubit(&mut self, q1: usize, q2: usize, k: &CMatrix) -> Result<()> {
        self.check_qubit(q1)?;
        self.check_qubit(q2)?;
        if q1 == q2 || k.dim() != 4 {
            return Err(arg_err!("two-qubit operator needs distinct qubits and a 4x4 matrix"));
        }
        let n = self.n;
        match &mut self.repr {
            Repr::Vector(v) => apply_2q(v, n, q1, q2, k),
            Repr::Density(rho) => {
                let data = density_data_mut(rho);
                apply_2q(data, 2 * n, q1, q2, k);
                apply_2q(data, 2 * n, n + q1, n + q2, &k.conj());
            }
        }
        Ok(())
    }

    /// Applies the map `ρ ↦ Σ_k K_k ρ K_k†` on qubits `(q1, q2)`; the result
    /// is a density matrix and is not renormalised.
    pub fn apply_kraus(&mut self, q1: usize, q2: usize, kraus: &[CMatrix]) -> Result<()> {
        let Some((first, rest)) = kraus.split_first() else {
            return Err(arg_err!("empty Kraus set"));
        };
        if rest.is_empty() {
            return self.apply_two_qubit(q1, q2, first);
        }
        self.make_mixed()?;
        let mut acc: Option<CMatrix> = None;
        for k in kraus {
            let mut branch = self.clone();
            branch.apply_two_qubit(q1, q2, k)?;
            let m = branch.to_density();
            acc = Some(match acc {
                None => m,
                Some(a) => a.add(&m),
            });
        }
        self.repr = Repr::Density(acc.expect("non-empty Kraus set"));
        Ok(())
    }

    /// Replaces the pair `(q1, q2)` by the maximally mixed state with
    /// probability `delta`: `ρ ↦ (1−δ)ρ + δ·Tr_pair(ρ) ⊗ I/4`.
    pub fn depolarize_pair(&mut self, q1: usize, q2: usize, delta: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&delta) {
            return Err(arg_err!("depolarising probability {delta} outside [0, 1]"));
        }
        if delta == 0.0 {
            return Ok(());
        }
        self.make_mixed()?;
        // Twirling over the 16 two-qubit Paulis maps ρ to Tr_pair(ρ) ⊗ I/4.
        let paulis = [
            SingleQubitGate::identity(),
            SingleQubitGate::pauli_x(),
            SingleQubitGate::pauli_y(),
            SingleQubitGate::pauli_z(),
        ];
        let mut twirled = CMatrix::zeros(1 << self.n);
        for a in &paulis {
            for b in &paulis {
                let mut s = self.clone();
                s.apply_gate(q1, a)?;
                s.apply_gate(q2, b)?;
                twirled = twirled.add(&s.to_density());
            }
        }
        let rho = self.to_density().scale_real(1.0 - delta).add(&twirled.scale_real(delta / 16.0));
        self.repr = Repr::Density(rho);
        Ok(())
    }

    /// Trace (density) or squared norm (vector).
    pub fn norm(&self) -> f64 {
        match &self.repr {
            Repr::Vector(v) => v.iter().map(|a| a.norm_sqr()).sum(),
            Repr::Density(rho) => rho.trace().re,
        }
    }

    /// Rescales to unit norm and returns the norm before rescaling.
    pub fn renormalize(&mut self) -> Result<f64> {
        let p = self.norm();
        if p < BRANCH_FLOOR {
            return Err(Error::BranchImpossible);
        }
        match &mut self.repr {
            Repr::Vector(v) => {
                let s = 1.0 / libm::sqrt(p);
                v.iter_mut().for_each(|a| *a *= s);
            }
            Repr::Density(rho) => *rho = rho.scale_real(1.0 / p),
        }
        Ok(p)
    }

    /// Convex combination `(1−w)·self + w·other`.
    pub fn mix(&self, other: &Self, w: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(arg_err!("cannot mix {}- and {}-qubit states", self.n, other.n));
        }
        if !(0.0..=1.0).contains(&w) {
            return Err(arg_err!("mixing weight {w} outside [0, 1]"));
        }
        check_capacity(self.n, true)?;
        let rho = self.to_density().scale_real(1.0 - w).add(&other.to_density().scale_real(w));
        Ok(Self { n: self.n, labels: self.labels.clone(), repr: Repr::Density(rho) })
    }

    /// Probability of `outcome` when qubit `q` is measured in `basis`.
    pub fn outcome_probability(&self, q: usize, basis: MeasurementBasis, outcome: usize) -> Result<f64> {
        let mut s = self.clone();
        s.unnormalized_project(q, basis, outcome)?;
        Ok(s.norm())
    }

    /// Measures qubit `q` in `basis`, post-selects `outcome` and removes the
    /// qubit. Returns the branch probability and the normalised remainder.
    pub fn project(&self, q: usize, basis: MeasurementBasis, outcome: usize) -> Result<(f64, Self)> {
        let mut s = self.clone();
        s.unnormalized_project(q, basis, outcome)?;
        let p = s.renormalize()?;
        Ok((p, s))
    }

    fn unnormalized_project(&mut self, q: usize, basis: MeasurementBasis, outcome: usize) -> Result<()> {
        self.check_qubit(q)?;
        if outcome > 1 {
            return Err(arg_err!("binary measurement outcome must be 0 or 1, got {outcome}"));
        }
        self.apply_gate(q, &basis.to_computational())?;
        let n = self.n;
        let m = n - 1;
        self.repr = match &self.repr {
            Repr::Vector(v) => {
                Repr::Vector((0..1usize << m).map(|r| v[insert_bit(r, n, q, outcome)]).collect())
            }
            Repr::Density(rho) => {
                let dim = 1usize << m;
                let mut out = CMatrix::zeros(dim);
                for r in 0..dim {
                    for c in 0..dim {
                        out[(r, c)] = rho[(insert_bit(r, n, q, outcome), insert_bit(c, n, q, outcome))];
                    }
                }
                Repr::Density(out)
            }
        };
        self.labels.remove(q);
        self.n = m;
        Ok(())
    }

    /// Reduced state on the qubits at `keep` (in the given order, which must
    /// be strictly increasing).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(arg_err!("partial trace must keep at least one qubit"));
        }
        if keep.windows(2).any(|w| w[0] >= w[1]) || keep.iter().any(|&q| q >= self.n) {
            return Err(arg_err!("partial trace needs strictly increasing in-range qubits"));
        }
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let k = keep.len();
        check_capacity(k, true)?;
        let dim = 1usize << k;
        let mut out = CMatrix::zeros(dim);
        let (n, t) = (self.n, traced.len());
        for r in 0..dim {
            let ri = scatter(r, n, keep);
            for c in 0..dim {
                let ci = scatter(c, n, keep);
                out[(r, c)] = (0..1usize << t)
                    .map(|e| {
                        let ei = scatter(e, n, &traced);
                        self.element(ri | ei, ci | ei)
                    })
                    .sum();
            }
        }
        let labels = keep.iter().map(|&q| self.labels[q]).collect();
        Ok(Self { n: k, labels, repr: Repr::Density(out) })
    }

    fn element(&self, r: usize, c: usize) -> C64 {
        match &self.repr {
            Repr::Vector(v) => v[r] * v[c].conj(),
            Repr::Density(rho) => rho[(r, c)],
        }
    }

    /// `Tr(P ρ)` for a Pauli string `P`, possibly complex.
    pub fn expectation_complex(&self, p: &PauliString) -> Result<C64> {
        if p.len() != self.n {
            return Err(arg_err!("{}-qubit observable on a {}-qubit state", p.len(), self.n));
        }
        let f = p.flip_mask();
        Ok(match &self.repr {
            Repr::Vector(v) => {
                (0..v.len()).map(|j| v[j ^ f].conj() * p.coefficient(j) * v[j]).sum()
            }
            Repr::Density(rho) => (0..rho.dim()).map(|j| p.coefficient(j) * rho[(j, j ^ f)]).sum(),
        })
    }

    /// Expectation value of a Hermitian Pauli string.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(arg_err!("Pauli string {p} is not Hermitian"));
        }
        Ok(self.expectation_complex(p)?.re)
    }

    /// Uhlmann fidelity `(Tr √(√ρ σ √ρ))²`; reduces to `|⟨ψ|φ⟩|²` for pure
    /// states.
    pub fn fidelity(&self, other: &Self) -> Result<f64> {
        if self.n != other.n {
            return Err(arg_err!("fidelity between {}- and {}-qubit states", self.n, other.n));
        }
        match (&self.repr, &other.repr) {
            (Repr::Vector(a), Repr::Vector(b)) => {
                Ok(a.iter().zip(b).map(|(x, y)| x.conj() * y).sum::<C64>().norm_sqr())
            }
            (Repr::Vector(a), Repr::Density(rho)) | (Repr::Density(rho), Repr::Vector(a)) => {
                Ok(a.iter().zip(rho.apply(a)).map(|(x, y)| x.conj() * y).sum::<C64>().re)
            }
            (Repr::Density(r), Repr::Density(s)) => {
                let sr = psd_sqrt(r);
                let inner = sr.matmul(s).matmul(&sr);
                let t = psd_sqrt(&inner).trace().re;
                Ok(t * t)
            }
        }
    }

    /// Computational-basis populations `⟨j|ρ|j⟩`.
    pub fn populations(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Vector(v) => v.iter().map(|a| a.norm_sqr()).collect(),
            Repr::Density(rho) => (0..rho.dim()).map(|j| rho[(j, j)].re).collect(),
        }
    }

    /// Joint outcome probabilities when qubit `i` is measured in `bases[i]`;
    /// index bit `i` (MSB first) is the outcome of qubit `i`.
    pub fn basis_populations(&self, bases: &[MeasurementBasis]) -> Result<Vec<f64>> {
        if bases.len() != self.n {
            return Err(arg_err!("{} bases for {} qubits", bases.len(), self.n));
        }
        let mut s = self.clone();
        for (q, b) in bases.iter().enumerate() {
            if *b != MeasurementBasis::HV {
                s.apply_gate(q, &b.to_computational())?;
            }
        }
        Ok(s.populations())
    }

    /// Whether the norm is within tolerance of one.
    pub fn is_normalized(&self) -> bool {
        (self.norm() - 1.0).abs() < ALGEBRAIC_TOL * (1 << self.n.min(20)) as f64
    }
}

fn qubits_of(len: usize) -> Result<usize> {
    if len < 2 || !len.is_power_of_two() {
        return Err(arg_err!("dimension {len} is not a power of two of at least 2"));
    }
    Ok(len.trailing_zeros() as usize)
}

fn density_data_mut(rho: &mut CMatrix) -> &mut [C64] {
    rho.as_mut_slice()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn bell() -> QuantumState {
        let s = FRAC_1_SQRT_2;
        QuantumState::from_amplitudes(vec![C64::new(s, 0.0), ZERO, ZERO, C64::new(s, 0.0)]).unwrap()
    }

    fn ps(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn bell_stabilizers() {
        for st in [bell(), {
            let mut b = bell();
            b.make_mixed().unwrap();
            b
        }] {
            assert_abs_diff_eq!(st.expectation(&ps("XX")).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(st.expectation(&ps("ZZ")).unwrap(), 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(st.expectation(&ps("YY")).unwrap(), -1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(st.expectation(&ps("ZI")).unwrap(), 0.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn projection_removes_qubit_and_reports_probability() {
        let (p, rest) = bell().project(0, MeasurementBasis::PM, 1).unwrap();
        assert_abs_diff_eq!(p, 0.5, epsilon = 1e-14);
        assert_eq!(rest.num_qubits(), 1);
        assert_eq!(rest.labels(), &[2]);
        let m = QuantumState::photon(Polarization::M, 0);
        assert_abs_diff_eq!(rest.fidelity(&m.with_labels(vec![2]).unwrap()).unwrap(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn impossible_branch_is_an_error() {
        let h = QuantumState::photon(Polarization::H, 1)
            .tensor(&QuantumState::photon(Polarization::H, 2))
            .unwrap();
        assert_eq!(h.project(0, MeasurementBasis::HV, 1).unwrap_err(), Error::BranchImpossible);
    }

    #[test]
    fn bell_reduced_state_is_maximally_mixed() {
        let r = bell().partial_trace(&[1]).unwrap();
        let rho = r.to_density();
        assert_abs_diff_eq!(rho[(0, 0)].re, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(rho[(0, 1)].norm(), 0.0, epsilon = 1e-14);
        assert_eq!(r.labels(), &[2]);
    }

    #[test]
    fn depolarizing_bell_gives_werner() {
        let mut w = bell();
        w.depolarize_pair(0, 1, 0.3).unwrap();
        assert_abs_diff_eq!(w.expectation(&ps("XX")).unwrap(), 0.7, epsilon = 1e-14);
        assert_abs_diff_eq!(w.norm(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(w.to_density()[(1, 1)].re, 0.3 / 4.0, epsilon = 1e-14);
    }

    #[test]
    fn gate_on_density_matches_gate_on_vector() {
        let mut v = bell().tensor(&QuantumState::photon(Polarization::YPlus, 3)).unwrap();
        let mut d = v.clone();
        d.make_mixed().unwrap();
        let g = SingleQubitGate::phase_z(0.7).then_after(&SingleQubitGate::hadamard());
        for s in [&mut v, &mut d] {
            s.apply_gate(1, &g).unwrap();
            s.apply_gate(2, &SingleQubitGate::hadamard()).unwrap();
        }
        assert!(v.to_density().max_abs_diff(&d.to_density()) < 1e-14);
        let cz = CMatrix::from_diagonal(&[ONE, ONE, ONE, -ONE]);
        v.apply_two_qubit(2, 0, &cz).unwrap();
        d.apply_two_qubit(2, 0, &cz).unwrap();
        assert!(v.to_density().max_abs_diff(&d.to_density()) < 1e-14);
    }

    #[test]
    fn basis_populations_of_plus_state() {
        let p = QuantumState::photon(Polarization::P, 1);
        let pops = p.basis_populations(&[MeasurementBasis::PM]).unwrap();
        assert_abs_diff_eq!(pops[0], 1.0, epsilon = 1e-14);
        let y = QuantumState::photon(Polarization::YMinus, 1);
        let pops = y.basis_populations(&[MeasurementBasis::Y]).unwrap();
        assert_abs_diff_eq!(pops[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn capacity_is_enforced() {
        let mut s = QuantumState::photon(Polarization::H, 1);
        for k in 2..=MAX_MIXED_QUBITS + 1 {
            s = s.tensor(&QuantumState::photon(Polarization::H, k)).unwrap();
        }
        assert!(matches!(s.make_mixed(), Err(Error::Capacity { limit: MAX_MIXED_QUBITS, .. })));
    }

    #[test]
    fn mixed_fidelity_matches_pure_formula() {
        let a = bell();
        let mut b = bell();
        b.depolarize_pair(0, 1, 0.2).unwrap();
        let f1 = a.fidelity(&b).unwrap();
        let mut a_mixed = a.clone();
        a_mixed.make_mixed().unwrap();
        let f2 = b.fidelity(&a_mixed).unwrap();
        assert_abs_diff_eq!(f1, 1.0 - 0.2 * 0.75, epsilon = 1e-12);
        assert_abs_diff_eq!(f2, f1, epsilon = 1e-7);
    }
}

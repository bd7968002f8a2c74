use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;
use core::str::FromStr;

use crate::error::arg_err;
use crate::{Error, C64};

/// Single-qubit Pauli letter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    /// Product of two letters as `(phase, letter)`, e.g. `X·Y = i Z`.
    pub fn times(self, rhs: Pauli) -> (Phase, Pauli) {
        use Pauli::*;
        match (self, rhs) {
            (I, p) | (p, I) => (Phase::One, p),
            (X, X) | (Y, Y) | (Z, Z) => (Phase::One, I),
            (X, Y) => (Phase::I, Z),
            (Y, X) => (Phase::MinusI, Z),
            (Y, Z) => (Phase::I, X),
            (Z, Y) => (Phase::MinusI, X),
            (Z, X) => (Phase::I, Y),
            (X, Z) => (Phase::MinusI, Y),
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Whether the letter flips the computational-basis bit.
    #[inline]
    pub(crate) fn flips(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }
}

/// Power of `i` carried by a Pauli product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    One,
    I,
    MinusOne,
    MinusI,
}

impl Phase {
    fn power(self) -> u8 {
        match self {
            Phase::One => 0,
            Phase::I => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    fn from_power(p: u8) -> Self {
        match p % 4 {
            0 => Phase::One,
            1 => Phase::I,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn to_complex(self) -> C64 {
        match self {
            Phase::One => C64::new(1.0, 0.0),
            Phase::I => C64::new(0.0, 1.0),
            Phase::MinusOne => C64::new(-1.0, 0.0),
            Phase::MinusI => C64::new(0.0, -1.0),
        }
    }

    /// `Some(±1)` for real phases.
    pub fn as_sign(self) -> Option<f64> {
        match self {
            Phase::One => Some(1.0),
            Phase::MinusOne => Some(-1.0),
            _ => None,
        }
    }
}

impl Mul for Phase {
    type Output = Phase;

    // Phases are powers of i, so multiplying adds exponents.
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn mul(self, rhs: Phase) -> Phase {
        Phase::from_power(self.power() + rhs.power())
    }
}

/// Tensor product of Pauli letters with an exact phase in `{±1, ±i}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    phase: Phase,
    letters: Vec<Pauli>,
}

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        Self { phase: Phase::One, letters }
    }

    pub fn with_phase(phase: Phase, letters: Vec<Pauli>) -> Self {
        Self { phase, letters }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(alloc::vec![Pauli::I; n])
    }

    /// The same letter on every qubit, e.g. `X⊗X⊗X`.
    pub fn uniform(letter: Pauli, n: usize) -> Self {
        Self::new(alloc::vec![letter; n])
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.letters
    }

    pub fn phase(&self) -> Phase {
        self.phase
    }

    /// A string is an observable when its phase is real.
    pub fn is_hermitian(&self) -> bool {
        self.phase.as_sign().is_some()
    }

    pub fn negate(mut self) -> Self {
        self.phase = self.phase * Phase::MinusOne;
        self
    }

    /// Letterwise product with exact phase tracking.
    pub fn product(&self, rhs: &PauliString) -> Result<PauliString, Error> {
        if self.len() != rhs.len() {
            return Err(arg_err!(
                "cannot multiply Pauli strings of length {} and {}",
                self.len(),
                rhs.len()
            ));
        }
        let mut phase = self.phase * rhs.phase;
        let letters = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .map(|(&a, &b)| {
                let (p, l) = a.times(b);
                phase = phase * p;
                l
            })
            .collect();
        Ok(PauliString { phase, letters })
    }

    pub fn commutes_with(&self, rhs: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&rhs.letters)
            .filter(|(&a, &b)| a != Pauli::I && b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    /// Action on a computational basis index of an `n = len()` qubit register:
    /// `P|j⟩ = coefficient · |j ⊕ flip_mask⟩`.
    pub(crate) fn flip_mask(&self) -> usize {
        let n = self.len();
        self.letters
            .iter()
            .enumerate()
            .filter(|(_, l)| l.flips())
            .fold(0, |m, (q, _)| m | super::bit(n, q))
    }

    pub(crate) fn coefficient(&self, index: usize) -> C64 {
        let n = self.len();
        let mut power = self.phase.power();
        for (q, l) in self.letters.iter().enumerate() {
            let set = index & super::bit(n, q) != 0;
            match (l, set) {
                (Pauli::Z, true) => power += 2,
                // Y|0> = i|1>, Y|1> = -i|0>
                (Pauli::Y, false) => power += 1,
                (Pauli::Y, true) => power += 3,
                _ => {}
            }
        }
        Phase::from_power(power).to_complex()
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let prefix = match self.phase {
            Phase::One => "",
            Phase::I => "i",
            Phase::MinusOne => "-",
            Phase::MinusI => "-i",
        };
        f.write_str(prefix)?;
        for l in &self.letters {
            write!(f, "{}", l.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `XIXX`, `+ZZ`, `-YY`, `iXZ` or `-iZ`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (phase, rest) = if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix("+i") {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::I, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else if let Some(r) = s.strip_prefix('+') {
            (Phase::One, r)
        } else {
            (Phase::One, s)
        };
        let letters = rest
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(arg_err!("unknown Pauli letter {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        if letters.is_empty() {
            return Err(arg_err!("empty Pauli string"));
        }
        Ok(Self { phase, letters })
    }
}

impl From<PauliString> for String {
    fn from(p: PauliString) -> String {
        alloc::format!("{p}")
    }
}

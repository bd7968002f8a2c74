use core::f64::consts::FRAC_1_SQRT_2;

use crate::C64;

/// 2×2 unitary acting on one polarisation qubit, `[[a, b], [c, d]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleQubitGate {
    pub m: [[C64; 2]; 2],
}

const fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

impl SingleQubitGate {
    pub const fn new(m: [[C64; 2]; 2]) -> Self {
        Self { m }
    }

    pub const fn identity() -> Self {
        Self::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    /// Half-wave plate at 22.5°: maps h ↔ p and v ↔ m.
    pub const fn hadamard() -> Self {
        let s = FRAC_1_SQRT_2;
        Self::new([[c(s, 0.0), c(s, 0.0)], [c(s, 0.0), c(-s, 0.0)]])
    }

    pub const fn pauli_x() -> Self {
        Self::new([[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]])
    }

    pub const fn pauli_y() -> Self {
        Self::new([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]])
    }

    pub const fn pauli_z() -> Self {
        Self::new([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]])
    }

    /// Symmetric phase rotation `diag(e^{-iφ/2}, e^{iφ/2})` applied by the
    /// electro-optic modulator.
    pub fn phase_z(phi: f64) -> Self {
        let (s, co) = (libm::sin(phi / 2.0), libm::cos(phi / 2.0));
        Self::new([[c(co, -s), c(0.0, 0.0)], [c(0.0, 0.0), c(co, s)]])
    }

    /// Composition `self · rhs` (apply `rhs` first).
    pub fn then_after(&self, rhs: &Self) -> Self {
        let a = &self.m;
        let b = &rhs.m;
        let mut m = [[c(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Self::new(m)
    }

    pub fn adjoint(&self) -> Self {
        let m = &self.m;
        Self::new([[m[0][0].conj(), m[1][0].conj()], [m[0][1].conj(), m[1][1].conj()]])
    }

    /// Largest entry of `|U†U − I|`.
    pub fn unitarity_error(&self) -> f64 {
        let p = self.adjoint().then_after(self);
        let id = Self::identity();
        let mut worst = 0.0f64;
        for i in 0..2 {
            for j in 0..2 {
                worst = worst.max((p.m[i][j] - id.m[i][j]).norm());
            }
        }
        worst
    }

    pub fn is_unitary(&self) -> bool {
        self.unitarity_error() < super::ALGEBRAIC_TOL
    }
}

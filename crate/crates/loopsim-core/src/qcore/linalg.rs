//! Small dense eigensolvers.
//!
//! Hermitian problems are solved through the real symmetric embedding
//! `[[Re A, -Im A], [Im A, Re A]]`, which carries every eigenvalue of `A`
//! twice and commutes with matrix functions. Only a cyclic Jacobi solver for
//! real symmetric matrices is needed; the matrices here are at most a few
//! dozen rows.

use alloc::vec;
use alloc::vec::Vec;

use super::CMatrix;
use crate::C64;

/// Real symmetric matrix, row-major.
#[derive(Debug, Clone)]
struct SymMatrix {
    n: usize,
    a: Vec<f64>,
}

impl SymMatrix {
    #[inline]
    fn get(&self, r: usize, c: usize) -> f64 {
        self.a[r * self.n + c]
    }

    #[inline]
    fn set(&mut self, r: usize, c: usize, v: f64) {
        self.a[r * self.n + c] = v;
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues and the row-major orthogonal matrix whose columns are
/// the matching eigenvectors.
fn jacobi(mut m: SymMatrix) -> (Vec<f64>, Vec<f64>) {
    let n = m.n;
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let scale: f64 = m.a.iter().map(|x| x * x).sum::<f64>();
    if scale == 0.0 {
        return (vec![0.0; n], v);
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for r in 0..n {
            for c in r + 1..n {
                off += m.get(r, c) * m.get(r, c);
            }
        }
        if off <= 1e-34 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = m.get(k, p);
                    let akq = m.get(k, q);
                    m.set(k, p, c * akp - s * akq);
                    m.set(k, q, s * akp + c * akq);
                }
                for k in 0..n {
                    let apk = m.get(p, k);
                    let aqk = m.get(q, k);
                    m.set(p, k, c * apk - s * aqk);
                    m.set(q, k, s * apk + c * aqk);
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let values = (0..n).map(|i| m.get(i, i)).collect();
    (values, v)
}

fn embed(a: &CMatrix) -> SymMatrix {
    let d = a.dim();
    let n = 2 * d;
    let mut m = SymMatrix { n, a: vec![0.0; n * n] };
    for r in 0..d {
        for c in 0..d {
            // symmetrise so round-off in the input cannot break the solver
            let z = (a[(r, c)] + a[(c, r)].conj()) * 0.5;
            m.set(r, c, z.re);
            m.set(r + d, c + d, z.re);
            m.set(r, c + d, -z.im);
            m.set(r + d, c, z.im);
        }
    }
    m
}

/// Eigenvalues of a Hermitian matrix in descending order.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let (mut values, _) = jacobi(embed(a));
    values.sort_by(|x, y| y.total_cmp(x));
    // every eigenvalue appears twice in the embedding
    values.into_iter().step_by(2).collect()
}

/// Applies a real function to the spectrum of a Hermitian matrix.
pub fn hermitian_map(a: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let d = a.dim();
    let n = 2 * d;
    let (values, v) = jacobi(embed(a));
    let fv: Vec<f64> = values.iter().map(|&x| f(x)).collect();
    let mut out = CMatrix::zeros(d);
    for r in 0..d {
        for c in 0..d {
            let mut re = 0.0;
            let mut im = 0.0;
            for k in 0..n {
                re += v[r * n + k] * fv[k] * v[c * n + k];
                im += v[(r + d) * n + k] * fv[k] * v[c * n + k];
            }
            out[(r, c)] = C64::new(re, im);
        }
    }
    out
}

/// Principal square root of a positive semidefinite Hermitian matrix;
/// negative round-off eigenvalues are clamped to zero.
pub fn psd_sqrt(a: &CMatrix) -> CMatrix {
    hermitian_map(a, |x| libm::sqrt(x.max(0.0)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn pauli_y_spectrum() {
        let y = CMatrix::from_rows(2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]);
        let ev = hermitian_eigenvalues(&y);
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] + 1.0).abs() < 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        // |p><p| + 0.5 |y+><y+| is PSD with complex off-diagonals
        let s = 0.5f64.sqrt();
        let p = CMatrix::outer(&[c(s, 0.), c(s, 0.)]);
        let y = CMatrix::outer(&[c(s, 0.), c(0., s)]).scale_real(0.5);
        let a = p.add(&y);
        let r = psd_sqrt(&a);
        assert!(r.matmul(&r).max_abs_diff(&a) < 1e-13);
        assert!(r.hermiticity_error() < 1e-14);
    }

    #[test]
    fn diagonal_is_already_solved() {
        let d = CMatrix::from_diagonal(&[c(0.1, 0.), c(0.7, 0.), c(0.2, 0.)]);
        let ev = hermitian_eigenvalues(&d);
        assert_eq!(ev.len(), 3);
        assert!((ev[0] - 0.7).abs() < 1e-15);
        assert!((ev[2] - 0.1).abs() < 1e-15);
    }
}

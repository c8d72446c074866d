//! Bare gate tables, written in the computational basis with no frame phases.

use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;
use num_complex::Complex64;

use super::UnitaryOp;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn real(dim: usize, rows: &[f64]) -> UnitaryOp {
    UnitaryOp::new_unchecked(dim, rows.iter().map(|&x| c(x)).collect())
}

pub fn identity(n_qubits: usize) -> UnitaryOp {
    let dim = 1usize << n_qubits;
    let mut data = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for col in 0..dim {
            data.push(if r == col { c(1.0) } else { c(0.0) });
        }
    }
    UnitaryOp::new_unchecked(dim, data)
}

pub fn x() -> UnitaryOp {
    real(2, &[0.0, 1.0, 1.0, 0.0])
}

pub fn y() -> UnitaryOp {
    let i = Complex64::i();
    UnitaryOp::new_unchecked(2, [c(0.0), -i, i, c(0.0)].into())
}

pub fn z() -> UnitaryOp {
    real(2, &[1.0, 0.0, 0.0, -1.0])
}

/// `Z·X = [[0, 1], [-1, 0]]`, the real form of the Y flip used by the
/// superdense encoder.
pub fn zx() -> UnitaryOp {
    real(2, &[0.0, 1.0, -1.0, 0.0])
}

pub fn h() -> UnitaryOp {
    let s = FRAC_1_SQRT_2;
    real(2, &[s, s, s, -s])
}

/// Controlled-NOT, control on the first target.
pub fn cnot() -> UnitaryOp {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0, //
            0.0, 0.0, 1.0, 0.0,
        ],
    )
}

pub fn cz() -> UnitaryOp {
    UnitaryOp::diagonal(&[c(1.0), c(1.0), c(1.0), c(-1.0)])
}

pub fn swap() -> UnitaryOp {
    real(
        4,
        &[
            1.0, 0.0, 0.0, 0.0, //
            0.0, 0.0, 1.0, 0.0, //
            0.0, 1.0, 0.0, 0.0, //
            0.0, 0.0, 0.0, 1.0,
        ],
    )
}

/// Preparation unitary taking `|0>` to `a|0> + b|1>`; requires `|a|^2 + |b|^2 = 1`.
pub fn prepare(a: Complex64, b: Complex64) -> UnitaryOp {
    UnitaryOp::new_unchecked(2, [a, -b.conj(), b, a.conj()].into())
}

/// Block-diagonal gate that applies `branches[s]` to the last qubits when the
/// leading control register reads `s`.
pub fn multiplexed(branches: &[UnitaryOp]) -> UnitaryOp {
    let inner = branches[0].dim();
    let dim = inner * branches.len();
    let mut data = alloc::vec![c(0.0); dim * dim];
    for (s, u) in branches.iter().enumerate() {
        assert_eq!(u.dim(), inner);
        for r in 0..inner {
            for col in 0..inner {
                data[(s * inner + r) * dim + s * inner + col] = u.get(r, col);
            }
        }
    }
    UnitaryOp::new_unchecked(dim, data)
}

/// Two-qubit gate that applies `u` to the second qubit when the first is `|1>`.
pub fn controlled(u: &UnitaryOp) -> UnitaryOp {
    multiplexed(&[identity(u.n_qubits()), u.clone()])
}

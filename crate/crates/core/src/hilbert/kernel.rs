//! Index bookkeeping shared by pure and mixed evolution.
//!
//! Qubit 0 is the most significant bit of a basis index. A qubit `q` of an
//! `n`-qubit register therefore lives at bit position `n - 1 - q`.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

pub(crate) fn check_targets(n_qubits: usize, targets: &[usize]) -> Result<()> {
    for (i, &t) in targets.iter().enumerate() {
        if t >= n_qubits {
            return Err(Error::QubitOutOfRange { index: t, n_qubits });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

pub(crate) fn bit_positions(n_qubits: usize, targets: &[usize]) -> Vec<usize> {
    targets.iter().map(|&t| n_qubits - 1 - t).collect()
}

/// Offsets of every sub-index over `positions`, first position most significant.
pub(crate) fn offsets(positions: &[usize]) -> Vec<usize> {
    let k = positions.len();
    (0..1usize << k)
        .map(|s| {
            positions
                .iter()
                .enumerate()
                .filter(|(j, _)| (s >> (k - 1 - j)) & 1 == 1)
                .fold(0usize, |off, (_, &p)| off | (1 << p))
        })
        .collect()
}

/// Positions (as bit positions) of the qubits not listed in `targets`, in qubit order.
pub(crate) fn complement_positions(n_qubits: usize, targets: &[usize]) -> Vec<usize> {
    (0..n_qubits)
        .filter(|q| !targets.contains(q))
        .map(|q| n_qubits - 1 - q)
        .collect()
}

/// In-place `data <- (M on positions) data`, where `data` is a vector over
/// `total_bits` bits and `matrix` is row-major of size `2^k x 2^k`.
pub(crate) fn apply_dense(
    data: &mut [Complex64],
    total_bits: usize,
    matrix: &[Complex64],
    positions: &[usize],
) {
    let d = 1usize << positions.len();
    debug_assert_eq!(matrix.len(), d * d);
    let offs = offsets(positions);
    let mask = positions.iter().fold(0usize, |m, &p| m | (1 << p));
    let mut buf = vec![Complex64::zero(); d];
    for base in 0..(1usize << total_bits) {
        if base & mask != 0 {
            continue;
        }
        for (slot, &off) in buf.iter_mut().zip(&offs) {
            *slot = data[base | off];
        }
        for (r, &off) in offs.iter().enumerate() {
            let row = &matrix[r * d..(r + 1) * d];
            data[base | off] = row.iter().zip(&buf).map(|(m, v)| m * v).sum();
        }
    }
}

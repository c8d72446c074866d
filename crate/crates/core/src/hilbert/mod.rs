//! Dense complex linear algebra for small multi-qubit registers.
//!
//! States are stored as full amplitude vectors or full density matrices. The
//! basis convention is fixed crate-wide: qubit 0 is the most significant bit
//! of a basis index, so `|q0 q1 ... q(n-1)>` has index `q0·2^(n-1) + ... + q(n-1)`.

pub mod gates;
pub(crate) mod kernel;

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Deref;

use nalgebra::DMatrix;
use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest register accepted by any dense representation.
pub const MAX_QUBITS: usize = 16;
/// Largest register accepted for density matrices (`4^n` entries).
pub const MAX_MIXED_QUBITS: usize = 12;

pub(crate) const NORM_TOL: f64 = 1e-12;
pub(crate) const HERMITIAN_TOL: f64 = 1e-12;
pub(crate) const PSD_TOL: f64 = 1e-10;
pub(crate) const UNITARY_TOL: f64 = 1e-10;

fn qubits_for_dim(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(dim));
    }
    Ok(dim.trailing_zeros() as usize)
}

/// Square complex matrix over a power-of-two dimension, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    dim: usize,
    data: Vec<Complex64>,
}

impl Operator {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        qubits_for_dim(dim)?;
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut op = Self::zeros(dim);
        for i in 0..dim {
            op.data[i * dim + i] = Complex64::one();
        }
        op
    }

    pub fn diagonal(entries: &[Complex64]) -> Self {
        let mut op = Self::zeros(entries.len());
        for (i, &e) in entries.iter().enumerate() {
            op.data[i * entries.len() + i] = e;
        }
        op
    }

    /// `|ket><bra|`.
    pub fn outer(ket: &[Complex64], bra: &[Complex64]) -> Self {
        let dim = ket.len();
        let mut data = Vec::with_capacity(dim * dim);
        for k in ket {
            for b in bra {
                data.push(k * b.conj());
            }
        }
        Self { dim, data }
    }

    /// Rank-one projector onto `state`.
    pub fn projector(state: &PureState) -> Self {
        Self::outer(&state.amps, &state.amps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_qubits(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let d = self.dim;
        let mut data = vec![Complex64::zero(); d * d];
        for r in 0..d {
            for c in 0..d {
                data[c * d + r] = self.data[r * d + c].conj();
            }
        }
        Self { dim: d, data }
    }

    pub fn matmul(&self, rhs: &Operator) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim, rhs.dim));
        }
        let d = self.dim;
        let mut data = vec![Complex64::zero(); d * d];
        for r in 0..d {
            for k in 0..d {
                let a = self.data[r * d + k];
                if a.is_zero() {
                    continue;
                }
                for c in 0..d {
                    data[r * d + c] += a * rhs.data[k * d + c];
                }
            }
        }
        Ok(Self { dim: d, data })
    }

    pub fn add(&self, rhs: &Operator) -> Result<Self> {
        if self.dim != rhs.dim {
            return Err(Error::DimensionMismatch(self.dim, rhs.dim));
        }
        let data = self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect();
        Ok(Self { dim: self.dim, data })
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    /// Kronecker product, `self` on the leading qubits.
    pub fn kron(&self, rhs: &Operator) -> Self {
        let (da, db) = (self.dim, rhs.dim);
        let d = da * db;
        let mut data = vec![Complex64::zero(); d * d];
        for ar in 0..da {
            for ac in 0..da {
                let a = self.data[ar * da + ac];
                if a.is_zero() {
                    continue;
                }
                for br in 0..db {
                    for bc in 0..db {
                        data[(ar * db + br) * d + ac * db + bc] = a * rhs.data[br * db + bc];
                    }
                }
            }
        }
        Self { dim: d, data }
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_distance(&self, rhs: &Operator) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `sqrt(sum |a_ij - b_ij|^2)`, an upper bound on the operator-norm distance.
    pub fn frobenius_distance(&self, rhs: &Operator) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_unitary(&self, tol: f64) -> bool {
        self.unitarity_defect() <= tol
    }

    fn unitarity_defect(&self) -> f64 {
        self.adjoint()
            .matmul(self)
            .map(|g| g.frobenius_distance(&Operator::identity(self.dim)))
            .unwrap_or(f64::INFINITY)
    }
}

/// Unitary operator; `U†U = I` within `1e-10` is checked on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryOp(Operator);

impl UnitaryOp {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        Self::from_operator(Operator::new(dim, data)?)
    }

    pub fn from_operator(op: Operator) -> Result<Self> {
        let defect = op.unitarity_defect();
        if defect > UNITARY_TOL {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self(op))
    }

    pub(crate) fn new_unchecked(dim: usize, data: Vec<Complex64>) -> Self {
        Self(Operator { dim, data })
    }

    pub(crate) fn from_operator_unchecked(op: Operator) -> Self {
        Self(op)
    }

    pub fn diagonal(phases: &[Complex64]) -> Self {
        Self(Operator::diagonal(phases))
    }

    pub fn as_operator(&self) -> &Operator {
        &self.0
    }

    pub fn into_operator(self) -> Operator {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn compose(&self, rhs: &UnitaryOp) -> Result<Self> {
        self.0.matmul(&rhs.0).map(Self)
    }

    pub fn kron(&self, rhs: &UnitaryOp) -> Self {
        Self(self.0.kron(&rhs.0))
    }
}

impl Deref for UnitaryOp {
    type Target = Operator;

    fn deref(&self) -> &Operator {
        &self.0
    }
}

/// Normalized pure state of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    /// Validates length `2^n_qubits` and squared norm within `1e-12` of one.
    pub fn new(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, amps.len(), MAX_QUBITS)?;
        let norm = norm_sqr(&amps);
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Rescales `amps` to unit norm.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, amps.len(), MAX_QUBITS)?;
        let norm = norm_sqr(&amps).sqrt();
        if norm < 1e-300 {
            return Err(Error::ZeroVector);
        }
        for a in &mut amps {
            *a /= norm;
        }
        Ok(Self { n_qubits, amps })
    }

    pub(crate) fn from_raw(n_qubits: usize, amps: Vec<Complex64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n_qubits);
        Self { n_qubits, amps }
    }

    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        check_len(n_qubits, 1 << n_qubits, MAX_QUBITS)?;
        if index >= 1 << n_qubits {
            return Err(Error::OutOfRange(alloc::format!(
                "basis index {index} for {n_qubits} qubits"
            )));
        }
        let mut amps = vec![Complex64::zero(); 1 << n_qubits];
        amps[index] = Complex64::one();
        Ok(Self { n_qubits, amps })
    }

    /// Basis state from a bit string given qubit 0 first, e.g. `&[0, 1]` is `|01>`.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let index = bits.iter().fold(0usize, |acc, &b| (acc << 1) | usize::from(b & 1));
        Self::basis(bits.len(), index)
    }

    /// `a|0> + b|1>`, normalized.
    pub fn qubit(a: Complex64, b: Complex64) -> Result<Self> {
        Self::normalized(1, vec![a, b])
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.amps)
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(self.dim(), other.dim()));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub fn tensor(&self, other: &PureState) -> Result<Self> {
        tensor(&[self, other])
    }

    /// Reduced density matrix on `keep`, in the listed order.
    pub fn reduced(&self, keep: &[usize]) -> Result<MixedState> {
        if keep.is_empty() {
            return Err(Error::EmptySubset);
        }
        kernel::check_targets(self.n_qubits, keep)?;
        let n = self.n_qubits;
        let keep_offs = kernel::offsets(&kernel::bit_positions(n, keep));
        let env_offs = kernel::offsets(&kernel::complement_positions(n, keep));
        let d = keep_offs.len();
        let mut data = vec![Complex64::zero(); d * d];
        for &e in &env_offs {
            for (i, &ki) in keep_offs.iter().enumerate() {
                let a = self.amps[ki | e];
                if a.is_zero() {
                    continue;
                }
                for (j, &kj) in keep_offs.iter().enumerate() {
                    data[i * d + j] += a * self.amps[kj | e].conj();
                }
            }
        }
        Ok(MixedState::from_raw(keep.len(), data))
    }

    /// Reorders qubits so that new qubit `i` is old qubit `order[i]`.
    pub fn permute(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.n_qubits {
            return Err(Error::DimensionMismatch(order.len(), self.n_qubits));
        }
        kernel::check_targets(self.n_qubits, order)?;
        let offs = kernel::offsets(&kernel::bit_positions(self.n_qubits, order));
        let amps = offs.iter().map(|&o| self.amps[o]).collect();
        Ok(Self::from_raw(self.n_qubits, amps))
    }

    /// Applies an arbitrary (possibly non-unitary) operator and returns the raw image.
    pub fn apply_operator(&self, op: &Operator, targets: &[usize]) -> Result<Vec<Complex64>> {
        check_operator_targets(self.n_qubits, op, targets)?;
        let mut amps = self.amps.clone();
        kernel::apply_dense(
            &mut amps,
            self.n_qubits,
            op.entries(),
            &kernel::bit_positions(self.n_qubits, targets),
        );
        Ok(amps)
    }

    pub fn to_mixed(&self) -> MixedState {
        MixedState::from_raw(
            self.n_qubits,
            Operator::outer(&self.amps, &self.amps).data,
        )
    }
}

/// Density matrix of `n_qubits` qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct MixedState {
    n_qubits: usize,
    data: Vec<Complex64>,
}

impl MixedState {
    /// Validates Hermiticity and unit trace within `1e-12` and a minimum
    /// eigenvalue of at least `-1e-10`.
    pub fn new(n_qubits: usize, data: Vec<Complex64>) -> Result<Self> {
        check_len(n_qubits, 1 << n_qubits, MAX_MIXED_QUBITS)?;
        let dim = 1usize << n_qubits;
        if data.len() != dim * dim {
            return Err(Error::LengthMismatch {
                expected: dim * dim,
                got: data.len(),
            });
        }
        let rho = Self { n_qubits, data };
        let herm = rho.hermiticity_defect();
        if herm > HERMITIAN_TOL {
            return Err(Error::NotHermitian(herm));
        }
        let tr = rho.trace();
        if (tr.re - 1.0).abs() > NORM_TOL || tr.im.abs() > NORM_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min = rho.min_eigenvalue();
        if min < -PSD_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(rho)
    }

    pub(crate) fn from_raw(n_qubits: usize, data: Vec<Complex64>) -> Self {
        debug_assert_eq!(data.len(), 1 << (2 * n_qubits));
        Self { n_qubits, data }
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let op = Operator::identity(dim).scale(Complex64::new(1.0 / dim as f64, 0.0));
        Self::from_raw(n_qubits, op.data)
    }

    /// Convex mixture of pure states.
    pub fn mixture(components: &[(f64, &PureState)]) -> Result<Self> {
        let first = components.first().ok_or(Error::EmptySubset)?.1;
        let mut acc = Operator::zeros(first.dim());
        for (w, psi) in components {
            if psi.dim() != first.dim() {
                return Err(Error::DimensionMismatch(first.dim(), psi.dim()));
            }
            acc = acc.add(&Operator::projector(psi).scale(Complex64::new(*w, 0.0)))?;
        }
        Self::new(first.n_qubits(), acc.data)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        1 << self.n_qubits
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    pub(crate) fn entries_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.get(i, i)).sum()
    }

    pub fn as_operator(&self) -> Operator {
        Operator {
            dim: self.dim(),
            data: self.data.clone(),
        }
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim(), &self.data)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_distance(&self, rhs: &MixedState) -> f64 {
        self.data
            .iter()
            .zip(&rhs.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Applies `op ρ op†` on `targets` without renormalizing.
    fn conjugate_by(&self, op: &Operator, targets: &[usize]) -> Result<Vec<Complex64>> {
        check_operator_targets(self.n_qubits, op, targets)?;
        let n = self.n_qubits;
        let cols = kernel::bit_positions(n, targets);
        let rows: Vec<usize> = cols.iter().map(|p| p + n).collect();
        let conj: Vec<Complex64> = op.entries().iter().map(|z| z.conj()).collect();
        let mut data = self.data.clone();
        kernel::apply_dense(&mut data, 2 * n, op.entries(), &rows);
        kernel::apply_dense(&mut data, 2 * n, &conj, &cols);
        Ok(data)
    }

    pub fn reduced(&self, keep: &[usize]) -> Result<MixedState> {
        partial_trace(self, keep)
    }
}

/// Operations shared by pure and mixed states.
pub trait QuantumState: Clone + Sized {
    fn n_qubits(&self) -> usize;

    /// Embeds `u` on `targets` (first target most significant), identity elsewhere.
    fn apply_unitary(&self, u: &UnitaryOp, targets: &[usize]) -> Result<Self>;

    /// Applies the Kraus operator `k` and returns the outcome probability with
    /// the renormalized post-state (`None` when the probability vanishes).
    fn apply_kraus(&self, k: &Operator, targets: &[usize]) -> Result<(f64, Option<Self>)>;

    /// `<probe| ρ |probe>`.
    fn expectation(&self, probe: &PureState) -> Result<f64>;

    fn to_density(&self) -> MixedState;
}

impl QuantumState for PureState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &UnitaryOp, targets: &[usize]) -> Result<Self> {
        let amps = self.apply_operator(u, targets)?;
        Ok(Self::from_raw(self.n_qubits, amps))
    }

    fn apply_kraus(&self, k: &Operator, targets: &[usize]) -> Result<(f64, Option<Self>)> {
        let amps = self.apply_operator(k, targets)?;
        let p = norm_sqr(&amps);
        if p < 1e-300 {
            return Ok((0.0, None));
        }
        let post = Self::normalized(self.n_qubits, amps)?;
        Ok((p, Some(post)))
    }

    fn expectation(&self, probe: &PureState) -> Result<f64> {
        Ok(probe.inner(self)?.norm_sqr())
    }

    fn to_density(&self) -> MixedState {
        self.to_mixed()
    }
}

impl QuantumState for MixedState {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn apply_unitary(&self, u: &UnitaryOp, targets: &[usize]) -> Result<Self> {
        Ok(Self::from_raw(self.n_qubits, self.conjugate_by(u, targets)?))
    }

    fn apply_kraus(&self, k: &Operator, targets: &[usize]) -> Result<(f64, Option<Self>)> {
        let data = self.conjugate_by(k, targets)?;
        let d = self.dim();
        let p: f64 = (0..d).map(|i| data[i * d + i].re).sum();
        if p < 1e-300 {
            return Ok((0.0, None));
        }
        let inv = Complex64::new(1.0 / p, 0.0);
        let data = data.into_iter().map(|z| z * inv).collect();
        Ok((p, Some(Self::from_raw(self.n_qubits, data))))
    }

    fn expectation(&self, probe: &PureState) -> Result<f64> {
        if probe.dim() != self.dim() {
            return Err(Error::DimensionMismatch(probe.dim(), self.dim()));
        }
        let d = self.dim();
        let mut acc = Complex64::zero();
        for r in 0..d {
            let pr = probe.amps[r].conj();
            if pr.is_zero() {
                continue;
            }
            for c in 0..d {
                acc += pr * self.data[r * d + c] * probe.amps[c];
            }
        }
        Ok(acc.re)
    }

    fn to_density(&self) -> MixedState {
        self.clone()
    }
}

fn check_len(n_qubits: usize, len: usize, cap: usize) -> Result<()> {
    if n_qubits > cap {
        return Err(Error::TooManyQubits(n_qubits));
    }
    let expected = 1usize << n_qubits;
    if len != expected {
        return Err(Error::LengthMismatch { expected, got: len });
    }
    Ok(())
}

fn check_operator_targets(n_qubits: usize, op: &Operator, targets: &[usize]) -> Result<()> {
    if targets.is_empty() {
        return Err(Error::EmptySubset);
    }
    kernel::check_targets(n_qubits, targets)?;
    let expected = 1usize << targets.len();
    if op.dim() != expected {
        return Err(Error::DimensionMismatch(op.dim(), expected));
    }
    Ok(())
}

fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Kronecker product of `states` in the given order.
pub fn tensor(states: &[&PureState]) -> Result<PureState> {
    let n: usize = states.iter().map(|s| s.n_qubits).sum();
    if n > MAX_QUBITS {
        return Err(Error::TooManyQubits(n));
    }
    let mut amps = vec![Complex64::one()];
    for s in states {
        let mut next = Vec::with_capacity(amps.len() * s.dim());
        for a in &amps {
            next.extend(s.amps.iter().map(|b| a * b));
        }
        amps = next;
    }
    Ok(PureState::from_raw(n, amps))
}

/// `state` evolved by `u` on `targets`.
pub fn apply_unitary<S: QuantumState>(state: &S, u: &UnitaryOp, targets: &[usize]) -> Result<S> {
    state.apply_unitary(u, targets)
}

/// Reduced density matrix on `keep` (output qubit order follows `keep`).
pub fn partial_trace(state: &MixedState, keep: &[usize]) -> Result<MixedState> {
    if keep.is_empty() {
        return Err(Error::EmptySubset);
    }
    kernel::check_targets(state.n_qubits, keep)?;
    let n = state.n_qubits;
    let keep_offs = kernel::offsets(&kernel::bit_positions(n, keep));
    let env_offs = kernel::offsets(&kernel::complement_positions(n, keep));
    let d = keep_offs.len();
    let full = state.dim();
    let mut data = vec![Complex64::zero(); d * d];
    for (i, &ki) in keep_offs.iter().enumerate() {
        for (j, &kj) in keep_offs.iter().enumerate() {
            data[i * d + j] = env_offs
                .iter()
                .map(|&e| state.data[(ki | e) * full + (kj | e)])
                .sum();
        }
    }
    Ok(MixedState::from_raw(keep.len(), data))
}

/// Eigenvalues of a Hermitian matrix given row-major.
pub(crate) fn hermitian_eigenvalues(dim: usize, data: &[Complex64]) -> Vec<f64> {
    let m = DMatrix::<Complex64>::from_row_slice(dim, dim, data);
    m.symmetric_eigenvalues().iter().copied().collect()
}

/// `-Σ λ log2 λ` over a spectrum, with `0·log 0 = 0`.
pub fn spectrum_entropy(eigenvalues: &[f64]) -> f64 {
    eigenvalues
        .iter()
        .filter(|&&l| l > 1e-15)
        .map(|&l| -l * l.log2())
        .sum::<f64>()
        .max(0.0)
}

/// Binary Shannon entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    spectrum_entropy(&[p, 1.0 - p])
}

/// Shannon entropy of a probability vector in bits.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    spectrum_entropy(probs)
}

pub fn von_neumann_entropy(state: &MixedState) -> f64 {
    spectrum_entropy(&state.eigenvalues())
}

/// Von Neumann entropy (bits) of the reduced state on `cut`.
///
/// The Schmidt spectrum is taken from the Gram matrix of the smaller side
/// after dropping all-zero rows and columns of the coefficient matrix.
pub fn entanglement_entropy(state: &PureState, cut: &[usize]) -> Result<f64> {
    let n = state.n_qubits;
    if cut.is_empty() || cut.len() >= n {
        return Err(Error::InvalidCut);
    }
    kernel::check_targets(n, cut).map_err(|_| Error::InvalidCut)?;
    let row_offs = kernel::offsets(&kernel::bit_positions(n, cut));
    let col_offs = kernel::offsets(&kernel::complement_positions(n, cut));

    let rows: Vec<usize> = row_offs
        .iter()
        .copied()
        .filter(|&r| col_offs.iter().any(|&c| !state.amps[r | c].is_zero()))
        .collect();
    let cols: Vec<usize> = col_offs
        .iter()
        .copied()
        .filter(|&c| rows.iter().any(|&r| !state.amps[r | c].is_zero()))
        .collect();
    if rows.len() <= 1 || cols.len() <= 1 {
        return Ok(0.0);
    }
    let (outer, inner) = if rows.len() <= cols.len() { (&rows, &cols) } else { (&cols, &rows) };
    let amp = |o: usize, i: usize| state.amps[o | i];
    let d = outer.len();
    let mut gram = vec![Complex64::zero(); d * d];
    for (a, &oa) in outer.iter().enumerate() {
        for (b, &ob) in outer.iter().enumerate().skip(a) {
            let v: Complex64 = inner.iter().map(|&i| amp(oa, i) * amp(ob, i).conj()).sum();
            gram[a * d + b] = v;
            gram[b * d + a] = v.conj();
        }
    }
    Ok(spectrum_entropy(&hermitian_eigenvalues(d, &gram)))
}

/// `|<a|b>|^2` for pure `b`, `<a|b|a>` for mixed `b`.
pub fn fidelity<S: QuantumState>(a: &PureState, b: &S) -> Result<f64> {
    Ok(b.expectation(a)?.clamp(0.0, 1.0))
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &MixedState, b: &MixedState) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let diff: Vec<Complex64> = a.data.iter().zip(&b.data).map(|(x, y)| x - y).collect();
    let sum: f64 = hermitian_eigenvalues(a.dim(), &diff)
        .iter()
        .map(|l| l.abs())
        .sum();
    Ok((0.5 * sum).clamp(0.0, 1.0))
}

/// Fidelity maximized over a global phase is `|<a|b>|^2` already; this helper
/// strips the global phase of `b` relative to `a` for amplitude comparisons.
pub fn align_global_phase(reference: &PureState, state: &PureState) -> Result<PureState> {
    let ov = state.inner(reference)?;
    if ov.norm() < 1e-300 {
        return Ok(state.clone());
    }
    let phase = ov / ov.norm();
    Ok(PureState::from_raw(
        state.n_qubits,
        state.amps.iter().map(|a| a * phase).collect(),
    ))
}

#[cfg(test)]
impl PureState {
    pub(crate) fn max_amp_distance(&self, other: &PureState) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn bell_01_10() -> PureState {
        PureState::new(2, vec![c(0.0), c(FRAC_1_SQRT_2), c(FRAC_1_SQRT_2), c(0.0)]).unwrap()
    }

    #[test]
    fn tensor_orders_qubits_by_concatenation() {
        let zero = PureState::from_bits(&[0]).unwrap();
        let one = PureState::from_bits(&[1]).unwrap();
        let s = tensor(&[&zero, &one]).unwrap();
        assert_eq!(s.amplitude(1), c(1.0));

        let plus = PureState::qubit(c(1.0), c(1.0)).unwrap();
        let pp = tensor(&[&plus, &plus]).unwrap();
        for a in pp.amplitudes() {
            assert!((a - c(0.5)).norm() < 1e-15);
        }

        let s = tensor(&[&bell_01_10(), &zero]).unwrap();
        assert_eq!(s.n_qubits(), 3);
        for (i, a) in s.amplitudes().iter().enumerate() {
            let expected = if i == 2 || i == 4 { FRAC_1_SQRT_2 } else { 0.0 };
            assert!((a - c(expected)).norm() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn unitary_embedding_examples() {
        let zero = PureState::from_bits(&[0]).unwrap();
        let out = zero.apply_unitary(&gates::x(), &[0]).unwrap();
        assert_eq!(out, PureState::from_bits(&[1]).unwrap());

        let s = PureState::from_bits(&[1, 0]).unwrap();
        let out = s.apply_unitary(&gates::cnot(), &[0, 1]).unwrap();
        assert_eq!(out, PureState::from_bits(&[1, 1]).unwrap());

        let plus = PureState::qubit(c(1.0), c(1.0)).unwrap();
        let out = plus.apply_unitary(&gates::z(), &[0]).unwrap();
        let minus = PureState::qubit(c(1.0), c(-1.0)).unwrap();
        assert!(out.max_amp_distance(&minus) < 1e-15);
    }

    #[test]
    fn reversed_targets_swap_control() {
        let s = PureState::from_bits(&[0, 1]).unwrap();
        let out = s.apply_unitary(&gates::cnot(), &[1, 0]).unwrap();
        assert_eq!(out, PureState::from_bits(&[1, 1]).unwrap());
    }

    #[test]
    fn embedding_errors() {
        let s = PureState::from_bits(&[0, 0]).unwrap();
        assert_eq!(
            s.apply_unitary(&gates::cnot(), &[0]),
            Err(Error::DimensionMismatch(4, 2))
        );
        assert_eq!(
            s.apply_unitary(&gates::cnot(), &[1, 1]),
            Err(Error::DuplicateQubit(1))
        );
        assert!(matches!(
            s.apply_unitary(&gates::x(), &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }

    #[test]
    fn construction_validates() {
        assert!(matches!(
            PureState::new(1, vec![c(1.0), c(1.0)]),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::new(2, vec![c(1.0), c(0.0)]),
            Err(Error::LengthMismatch { .. })
        ));
        assert_eq!(
            PureState::basis(17, 0),
            Err(Error::TooManyQubits(17))
        );
        assert!(matches!(
            UnitaryOp::new(2, vec![c(1.0), c(1.0), c(0.0), c(1.0)]),
            Err(Error::NotUnitary(_))
        ));
        assert!(matches!(
            MixedState::new(1, vec![c(1.0), c(0.0), c(0.0), c(1.0)]),
            Err(Error::InvalidTrace(_))
        ));
        assert!(matches!(
            MixedState::new(1, vec![c(1.5), c(0.0), c(0.0), c(-0.5)]),
            Err(Error::NotPositive(_))
        ));
        assert!(matches!(
            MixedState::new(1, vec![c(0.5), c(0.5), c(0.0), c(0.5)]),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn partial_trace_examples() {
        let rho = bell_01_10().to_mixed();
        let red = partial_trace(&rho, &[0]).unwrap();
        assert!(red.max_distance(&MixedState::maximally_mixed(1)) < 1e-15);

        let rho = PureState::from_bits(&[0, 0]).unwrap().to_mixed();
        let red = partial_trace(&rho, &[0]).unwrap();
        assert!(red.max_distance(&PureState::from_bits(&[0]).unwrap().to_mixed()) < 1e-15);

        assert_eq!(partial_trace(&rho, &[]), Err(Error::EmptySubset));
    }

    #[test]
    fn pure_and_mixed_reductions_agree() {
        let psi = PureState::normalized(
            3,
            (0..8).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect(),
        )
        .unwrap();
        let a = psi.reduced(&[2, 0]).unwrap();
        let b = partial_trace(&psi.to_mixed(), &[2, 0]).unwrap();
        assert!(a.max_distance(&b) < 1e-14);
    }

    #[test]
    fn entanglement_entropy_examples() {
        assert!((entanglement_entropy(&bell_01_10(), &[0]).unwrap() - 1.0).abs() < 1e-12);
        let prod = PureState::from_bits(&[0, 1]).unwrap();
        assert_eq!(entanglement_entropy(&prod, &[0]).unwrap(), 0.0);
        let skew = PureState::new(
            2,
            vec![c(0.0), c((2.0f64 / 3.0).sqrt()), c((1.0f64 / 3.0).sqrt()), c(0.0)],
        )
        .unwrap();
        let e = entanglement_entropy(&skew, &[0]).unwrap();
        assert!((e - 0.918_295_834_054_489_6).abs() < 1e-12);
        assert_eq!(entanglement_entropy(&skew, &[0, 1]), Err(Error::InvalidCut));
        assert_eq!(entanglement_entropy(&skew, &[]), Err(Error::InvalidCut));
    }

    #[test]
    fn fidelity_examples() {
        let zero = PureState::from_bits(&[0]).unwrap();
        let one = PureState::from_bits(&[1]).unwrap();
        let plus = PureState::qubit(c(1.0), c(1.0)).unwrap();
        assert!((fidelity(&plus, &plus).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
        let f = fidelity(&plus, &MixedState::maximally_mixed(1)).unwrap();
        assert!((f - 0.5).abs() < 1e-15);
        assert!(fidelity(&plus, &bell_01_10()).is_err());
    }

    #[test]
    fn trace_distance_examples() {
        let zero = PureState::from_bits(&[0]).unwrap().to_mixed();
        let one = PureState::from_bits(&[1]).unwrap().to_mixed();
        assert!(trace_distance(&zero, &zero).unwrap() < 1e-15);
        assert!((trace_distance(&zero, &one).unwrap() - 1.0).abs() < 1e-15);
        assert!(trace_distance(&zero, &bell_01_10().to_mixed()).is_err());
    }

    #[test]
    fn entropy_helpers() {
        assert_eq!(binary_entropy(0.0), 0.0);
        assert!((binary_entropy(0.5) - 1.0).abs() < 1e-15);
        assert!((shannon_entropy(&[0.25; 4]) - 2.0).abs() < 1e-15);
        let rho = MixedState::maximally_mixed(2);
        assert!((von_neumann_entropy(&rho) - 2.0).abs() < 1e-12);
    }
}

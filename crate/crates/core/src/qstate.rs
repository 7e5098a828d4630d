//! Dense linear algebra on multi-qubit states.
//!
//! Index convention: in a `2^n`-dimensional basis index, particle 1 is the
//! most significant bit and particle `n` the least significant. Every other
//! module (Pauli placement, partial traces, JSON files) relies on this.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::stabilizer::PauliString;

/// Default cap on the qubit count of dense objects (2^12 x 2^12 entries).
pub const DEFAULT_DENSE_LIMIT: usize = 12;

/// Tolerance for Hermiticity, unit trace and the negative-eigenvalue clamp.
pub const STATE_TOL: f64 = 1e-10;

const IMAG_TOL: f64 = 1e-8;

pub type CMatrix = DMatrix<Complex64>;

/// Number of qubits for a `2^n` dimension, if `dim` is a power of two.
pub fn qubits_for_dim(dim: usize) -> Option<usize> {
    (dim.is_power_of_two()).then(|| dim.trailing_zeros() as usize)
}

/// Bit position, within a basis index, of 1-based particle `label`.
#[inline]
pub(crate) fn bit_of(n_qubits: usize, label: usize) -> usize {
    n_qubits - label
}

/// A nonempty, strictly increasing set of 1-based particle labels.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SubsetIndex {
    members: Vec<usize>,
}

impl SubsetIndex {
    pub fn new(members: impl Into<Vec<usize>>, n_qubits: usize) -> Result<Self> {
        let mut members = members.into();
        if members.is_empty() {
            return Err(Error::Argument("subset must be nonempty".into()));
        }
        members.sort_unstable();
        if let Some(w) = members.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::Argument(format!("duplicate particle label {}", w[0])));
        }
        if let Some(&bad) = members.iter().find(|&&m| m == 0 || m > n_qubits) {
            return Err(Error::Argument(format!(
                "particle label {bad} outside 1..={n_qubits}"
            )));
        }
        Ok(Self { members })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// All subsets of `{1..n}` with exactly `size` members, in lexicographic order.
    pub fn all_of_size(n_qubits: usize, size: usize) -> Vec<SubsetIndex> {
        let mut out = Vec::new();
        let mut current = Vec::with_capacity(size);
        fn rec(start: usize, n: usize, size: usize, cur: &mut Vec<usize>, out: &mut Vec<SubsetIndex>) {
            if cur.len() == size {
                out.push(SubsetIndex { members: cur.clone() });
                return;
            }
            for label in start..=n {
                cur.push(label);
                rec(label + 1, n, size, cur, out);
                cur.pop();
            }
        }
        if size >= 1 && size <= n_qubits {
            rec(1, n_qubits, size, &mut current, &mut out);
        }
        out
    }
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<Complex64>) -> Result<Self> {
        let n_qubits = qubits_for_dim(amplitudes.len())
            .filter(|&n| n >= 1)
            .ok_or_else(|| {
                Error::Argument(format!(
                    "vector length {} is not a power of two >= 2",
                    amplitudes.len()
                ))
            })?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::Argument(format!("state vector norm {norm} is not 1")));
        }
        Ok(Self { n_qubits, amplitudes })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn to_density_matrix(&self) -> DensityMatrix {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityMatrix::from_raw(self.n_qubits, m)
    }
}

/// Dense Hermitian, unit-trace, positive semidefinite operator on `n` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all within `1e-10`).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(Error::Argument(format!("matrix is {rows}x{cols}, not square")));
        }
        let n_qubits = qubits_for_dim(rows).filter(|&n| n >= 1).ok_or_else(|| {
            Error::Argument(format!("dimension {rows} is not a power of two >= 2"))
        })?;
        if let Some((i, j, dev)) = hermiticity_violation(&matrix) {
            return Err(Error::Argument(format!(
                "matrix is not Hermitian: entry ({i},{j}) deviates from its conjugate transpose by {dev:e}"
            )));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::Argument(format!("trace {tr} is not 1")));
        }
        let rho = Self { n_qubits, matrix };
        let min = rho.raw_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min);
        if min < -STATE_TOL {
            return Err(Error::NotAState { eigenvalue: min });
        }
        Ok(rho)
    }

    /// Wraps a matrix known to satisfy the invariants by construction.
    pub(crate) fn from_raw(n_qubits: usize, matrix: CMatrix) -> Self {
        debug_assert_eq!(matrix.nrows(), 1 << n_qubits);
        Self { n_qubits, matrix }
    }

    pub fn maximally_mixed(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let m = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);
        Self::from_raw(n_qubits, m)
    }

    /// Diagonal state with the given probabilities in the computational basis.
    pub fn from_diagonal(probabilities: &[f64]) -> Result<Self> {
        let v = DVector::from_iterator(
            probabilities.len(),
            probabilities.iter().map(|&p| Complex64::new(p, 0.0)),
        );
        Self::new(CMatrix::from_diagonal(&v))
    }

    /// Projector onto computational basis state `index`.
    pub fn basis_state(n_qubits: usize, index: usize) -> Self {
        let dim = 1usize << n_qubits;
        let mut m = CMatrix::zeros(dim, dim);
        m[(index, index)] = Complex64::new(1.0, 0.0);
        Self::from_raw(n_qubits, m)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    fn raw_eigenvalues(&self) -> Vec<f64> {
        SymmetricEigen::new(self.matrix.clone()).eigenvalues.iter().copied().collect()
    }

    /// Eigenvalues in ascending order, with values in `[-1e-10, 0)` clamped to zero.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut ev = self.raw_eigenvalues();
        ev.sort_by(f64::total_cmp);
        clamp_spectrum(&mut ev)?;
        Ok(ev)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.raw_eigenvalues().into_iter().fold(f64::INFINITY, f64::min)
    }
}

fn clamp_spectrum(ev: &mut [f64]) -> Result<()> {
    for p in ev.iter_mut() {
        if *p < -STATE_TOL {
            return Err(Error::NotAState { eigenvalue: *p });
        }
        if *p < 0.0 {
            *p = 0.0;
        }
    }
    Ok(())
}

fn hermiticity_violation(m: &CMatrix) -> Option<(usize, usize, f64)> {
    let d = m.nrows();
    for i in 0..d {
        for j in i..d {
            let dev = (m[(i, j)] - m[(j, i)].conj()).norm();
            if dev > STATE_TOL {
                return Some((i, j, dev));
            }
        }
    }
    None
}

pub fn tensor(a: &DensityMatrix, b: &DensityMatrix) -> Result<DensityMatrix> {
    tensor_with_limit(a, b, DEFAULT_DENSE_LIMIT)
}

pub fn tensor_with_limit(a: &DensityMatrix, b: &DensityMatrix, limit: usize) -> Result<DensityMatrix> {
    let qubits = a.n_qubits + b.n_qubits;
    if qubits > limit {
        return Err(Error::Size { qubits, limit });
    }
    Ok(DensityMatrix::from_raw(qubits, a.matrix.kronecker(&b.matrix)))
}

/// Reduced state on the particles in `keep`; everything else is traced out.
pub fn partial_trace(rho: &DensityMatrix, keep: &SubsetIndex) -> Result<DensityMatrix> {
    let n = rho.n_qubits;
    if keep.members().iter().any(|&m| m > n) {
        return Err(Error::Argument(format!(
            "subset {:?} is not within a {n}-qubit system",
            keep.members()
        )));
    }
    let k = keep.len();
    if k == n {
        return Ok(rho.clone());
    }
    let kept_bits: Vec<usize> = keep.members().iter().map(|&l| bit_of(n, l)).collect();
    let traced_bits: Vec<usize> = (1..=n)
        .filter(|l| !keep.members().contains(l))
        .map(|l| bit_of(n, l))
        .collect();
    let kept_index = scatter_table(&kept_bits);
    let traced_index = scatter_table(&traced_bits);

    let dim = 1usize << k;
    let mut out = CMatrix::zeros(dim, dim);
    for &t in &traced_index {
        for (r, &kr) in kept_index.iter().enumerate() {
            for (c, &kc) in kept_index.iter().enumerate() {
                out[(r, c)] += rho.matrix[(kr | t, kc | t)];
            }
        }
    }
    Ok(DensityMatrix::from_raw(k, out))
}

/// Maps each local index (first listed bit most significant) to its full index.
fn scatter_table(bits: &[usize]) -> Vec<usize> {
    let k = bits.len();
    (0..1usize << k)
        .map(|local| {
            bits.iter()
                .enumerate()
                .filter(|(i, _)| local >> (k - 1 - i) & 1 == 1)
                .fold(0usize, |acc, (_, &b)| acc | 1 << b)
        })
        .collect()
}

/// Shannon entropy in bits of a probability vector, with `0 log 0 = 0`.
pub fn entropy_bits(probabilities: &[f64]) -> f64 {
    probabilities
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(entropy_bits(&rho.eigenvalues()?))
}

/// Binary entropy `-x log2 x - (1-x) log2 (1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    entropy_bits(&[x, 1.0 - x])
}

fn check_hermitian(h: &CMatrix) -> Result<()> {
    if !h.is_square() {
        return Err(Error::Argument("matrix is not square".into()));
    }
    if let Some((i, j, dev)) = hermiticity_violation(h) {
        return Err(Error::Argument(format!(
            "matrix is not Hermitian at ({i},{j}), deviation {dev:e}"
        )));
    }
    Ok(())
}

/// Applies a real function to the spectrum of a Hermitian matrix.
fn hermitian_function(h: &CMatrix, f: impl Fn(f64) -> f64) -> CMatrix {
    let eig = SymmetricEigen::new(h.clone());
    let u = &eig.eigenvectors;
    let mut scaled = u.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let w = f(lambda);
        scaled.column_mut(j).scale_mut(w);
    }
    let out = scaled * u.adjoint();
    (&out + out.adjoint()).scale(0.5)
}

/// Matrix exponential of a Hermitian matrix via eigendecomposition.
pub fn hermitian_exp(h: &CMatrix) -> Result<CMatrix> {
    check_hermitian(h)?;
    Ok(hermitian_function(h, f64::exp))
}

/// Natural-log matrix logarithm of a positive definite Hermitian matrix.
pub fn hermitian_log(h: &CMatrix) -> Result<CMatrix> {
    check_hermitian(h)?;
    let eig = SymmetricEigen::new(h.clone());
    if let Some(&bad) = eig.eigenvalues.iter().find(|&&l| l <= 0.0) {
        return Err(Error::Argument(format!(
            "matrix logarithm needs a positive definite input (eigenvalue {bad:e})"
        )));
    }
    Ok(hermitian_function(h, f64::ln))
}

/// `Tr(rho P)`; the imaginary part is checked against `1e-8` and dropped.
pub fn pauli_expectation(rho: &DensityMatrix, p: &PauliString) -> Result<f64> {
    if p.n_qubits() != rho.n_qubits {
        return Err(Error::Argument(format!(
            "Pauli string on {} qubits applied to a {}-qubit state",
            p.n_qubits(),
            rho.n_qubits
        )));
    }
    let value = operator_trace(&rho.matrix, p);
    if value.im.abs() > IMAG_TOL {
        return Err(Error::Internal(format!(
            "expectation of {p} has imaginary part {:e}",
            value.im
        )));
    }
    Ok(value.re)
}

/// `Tr(M P)` in `O(2^n)` using the one-nonzero-per-column structure of `P`.
pub(crate) fn operator_trace(m: &CMatrix, p: &PauliString) -> Complex64 {
    let x = p.x_mask() as usize;
    (0..m.nrows())
        .map(|col| m[(col, col ^ x)] * p.column_entry(col as u64))
        .sum()
}

/// `(1 - eps) rho + eps I / 2^n`.
pub fn depolarize(rho: &DensityMatrix, eps: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::Argument(format!("depolarizing strength {eps} outside [0, 1]")));
    }
    let dim = rho.dim();
    let mut m = rho.matrix.scale(1.0 - eps);
    let shift = Complex64::new(eps / dim as f64, 0.0);
    for i in 0..dim {
        m[(i, i)] += shift;
    }
    Ok(DensityMatrix::from_raw(rho.n_qubits, m))
}

/// Half the trace norm of `a - b`.
pub fn trace_distance(a: &CMatrix, b: &CMatrix) -> f64 {
    let diff = a - b;
    let diff = (&diff + diff.adjoint()).scale(0.5);
    0.5 * SymmetricEigen::new(diff).eigenvalues.iter().map(|l| l.abs()).sum::<f64>()
}

/// Largest entrywise modulus of `a - b`.
pub fn max_entry_deviation(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

//! Maximum-entropy reconstruction from all `l`-particle marginals.
//!
//! The maximizer of the von Neumann entropy subject to fixed `l`-particle
//! marginals has the exponential form `exp(sum_P theta_P P) / Z` with `P`
//! running over the Pauli strings of support at most `l`. The coefficients
//! are found by minimizing the convex dual
//!
//! ```text
//! f(theta) = ln Tr exp(sum_P theta_P P) - sum_P theta_P t_P
//! ```
//!
//! whose gradient is `<P>_theta - t_P`. Pauli coordinates are a
//! non-redundant parametrization of all operators supported on `l`-subsets.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qstate::{
    operator_trace, partial_trace, tensor, von_neumann_entropy, CMatrix, DensityMatrix,
    SubsetIndex,
};
use crate::stabilizer::PauliString;

/// Dual coefficients beyond this magnitude are treated as divergence.
pub const THETA_GUARD: f64 = 1e3;

const ARMIJO_SHRINK: f64 = 0.5;
const ARMIJO_SLOPE: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Optimizer {
    /// Steepest descent with Armijo backtracking from a unit step.
    GradientDescent,
    /// Newton direction from the exact dual Hessian, same line search.
    Newton,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stop once the max-norm of the dual gradient is at most this.
    pub tol: f64,
    pub max_iter: usize,
    pub optimizer: Optimizer,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-9, max_iter: 10_000, optimizer: Optimizer::Newton }
    }
}

/// All non-identity Pauli strings on `n` qubits with support at most `l`,
/// ordered by support, then by subset, then by letters.
pub fn pauli_basis(n_qubits: usize, order: usize) -> Result<Vec<PauliString>> {
    if order == 0 || order > n_qubits {
        return Err(Error::Argument(format!("order {order} outside 1..={n_qubits}")));
    }
    let mut out = Vec::new();
    for weight in 1..=order {
        for subset in SubsetIndex::all_of_size(n_qubits, weight) {
            // Letters X, Y, Z as (x, z) bits: (1,0), (1,1), (0,1).
            for code in 0..3usize.pow(weight as u32) {
                let (mut x, mut z, mut rest) = (0u64, 0u64, code);
                for &label in subset.members().iter().rev() {
                    let bit = 1u64 << (n_qubits - label);
                    match rest % 3 {
                        0 => x |= bit,
                        1 => {
                            x |= bit;
                            z |= bit
                        }
                        _ => z |= bit,
                    }
                    rest /= 3;
                }
                out.push(PauliString::from_masks(n_qubits, x, z, 0)?);
            }
        }
    }
    Ok(out)
}

/// Target expectations `t_P = Tr(rho P)` for every Pauli string of support `<= l`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintSet {
    n_qubits: usize,
    order: usize,
    paulis: Vec<PauliString>,
    targets: Vec<f64>,
}

impl ConstraintSet {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn len(&self) -> usize {
        self.paulis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.paulis.is_empty()
    }

    pub fn paulis(&self) -> &[PauliString] {
        &self.paulis
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn target(&self, p: &PauliString) -> Option<f64> {
        self.paulis.iter().position(|q| q == p).map(|i| self.targets[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.paulis.iter().zip(self.targets.iter().copied())
    }

    /// Rebuilds the reduced state on `keep` (`|keep| <= l`) from the targets alone.
    pub fn marginal(&self, keep: &SubsetIndex) -> Result<DensityMatrix> {
        let k = keep.len();
        if k > self.order || keep.members().iter().any(|&m| m > self.n_qubits) {
            return Err(Error::Argument(format!(
                "subset {:?} is not covered by order-{} constraints on {} qubits",
                keep.members(),
                self.order,
                self.n_qubits
            )));
        }
        let dim = 1usize << k;
        let mut m = CMatrix::identity(dim, dim);
        let kept_bits: Vec<u64> = keep
            .members()
            .iter()
            .map(|&l| 1u64 << (self.n_qubits - l))
            .collect();
        let kept_mask = kept_bits.iter().fold(0, |a, b| a | b);
        for (p, t) in self.iter() {
            if (p.x_mask() | p.z_mask()) & !kept_mask != 0 {
                continue;
            }
            let compress = |mask: u64| {
                kept_bits
                    .iter()
                    .enumerate()
                    .filter(|(_, &b)| mask & b != 0)
                    .fold(0u64, |acc, (i, _)| acc | 1 << (k - 1 - i))
            };
            let local = PauliString::from_masks(k, compress(p.x_mask()), compress(p.z_mask()), 0)?;
            local.add_scaled_to(&mut m, Complex64::new(t, 0.0));
        }
        Ok(DensityMatrix::from_raw(k, m.scale(1.0 / dim as f64)))
    }
}

pub fn extract_constraints(rho: &DensityMatrix, order: usize) -> Result<ConstraintSet> {
    let paulis = pauli_basis(rho.n_qubits(), order)?;
    let targets = paulis
        .iter()
        .map(|p| operator_trace(rho.matrix(), p).re)
        .collect();
    Ok(ConstraintSet { n_qubits: rho.n_qubits(), order, paulis, targets })
}

/// Dual coefficients `theta_P`, keyed by the same Pauli strings as a [`ConstraintSet`].
#[derive(Debug, Clone, PartialEq)]
pub struct DualParameters {
    paulis: Vec<PauliString>,
    coefficients: Vec<f64>,
}

impl DualParameters {
    pub fn zeros(c: &ConstraintSet) -> Self {
        Self { paulis: c.paulis.clone(), coefficients: vec![0.0; c.len()] }
    }

    pub fn new(paulis: Vec<PauliString>, coefficients: Vec<f64>) -> Result<Self> {
        if paulis.len() != coefficients.len() {
            return Err(Error::Argument("one coefficient per Pauli string required".into()));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::Argument(format!("non-finite dual coefficient {bad}")));
        }
        Ok(Self { paulis, coefficients })
    }

    pub fn paulis(&self) -> &[PauliString] {
        &self.paulis
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn get(&self, p: &PauliString) -> Option<f64> {
        self.paulis.iter().position(|q| q == p).map(|i| self.coefficients[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&PauliString, f64)> {
        self.paulis.iter().zip(self.coefficients.iter().copied())
    }

    fn max_abs(&self) -> f64 {
        self.coefficients.iter().fold(0.0, |m, c| m.max(c.abs()))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxEntResult {
    pub order: usize,
    pub state: DensityMatrix,
    pub dual: DualParameters,
    pub entropy_bits: f64,
    /// Largest absolute constraint violation.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Per-fit diagnostics record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitDiagnostics {
    pub l: usize,
    pub iterations: usize,
    pub residual: f64,
    pub entropy_bits: f64,
    pub converged: bool,
}

impl MaxEntResult {
    pub fn diagnostics(&self) -> FitDiagnostics {
        FitDiagnostics {
            l: self.order,
            iterations: self.iterations,
            residual: self.residual,
            entropy_bits: self.entropy_bits,
            converged: self.converged,
        }
    }
}

/// The normalized exponential state at one point of the dual.
struct DualPoint {
    value: f64,
    gradient: Vec<f64>,
    expectations: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
    probabilities: Vec<f64>,
}

impl DualPoint {
    fn evaluate(theta: &[f64], c: &ConstraintSet) -> DualPoint {
        let dim = 1usize << c.n_qubits;
        let mut h = CMatrix::zeros(dim, dim);
        for (p, &t) in c.paulis.iter().zip(theta) {
            p.add_scaled_to(&mut h, Complex64::new(t, 0.0));
        }
        let eig = SymmetricEigen::new(h);
        let eigenvalues: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let top = eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let weights: Vec<f64> = eigenvalues.iter().map(|l| (l - top).exp()).collect();
        let partition: f64 = weights.iter().sum();
        let probabilities: Vec<f64> = weights.iter().map(|w| w / partition).collect();
        let log_z = top + partition.ln();

        let u = &eig.eigenvectors;
        let mut scaled = u.clone();
        for (j, &p) in probabilities.iter().enumerate() {
            scaled.column_mut(j).scale_mut(p);
        }
        let sigma = scaled * u.adjoint();
        let expectations: Vec<f64> = c.paulis.iter().map(|p| operator_trace(&sigma, p).re).collect();
        let gradient = expectations.iter().zip(&c.targets).map(|(e, t)| e - t).collect();
        let value = log_z - theta.iter().zip(&c.targets).map(|(a, b)| a * b).sum::<f64>();
        DualPoint {
            value,
            gradient,
            expectations,
            eigenvalues,
            eigenvectors: eig.eigenvectors,
            probabilities,
        }
    }

    fn residual(&self) -> f64 {
        self.gradient.iter().fold(0.0, |m, g| m.max(g.abs()))
    }

    fn state(&self, n_qubits: usize) -> DensityMatrix {
        let u = &self.eigenvectors;
        let mut scaled = u.clone();
        for (j, &p) in self.probabilities.iter().enumerate() {
            scaled.column_mut(j).scale_mut(p);
        }
        let m = scaled * u.adjoint();
        DensityMatrix::from_raw(n_qubits, (&m + m.adjoint()).scale(0.5))
    }

    fn entropy_bits(&self) -> f64 {
        crate::qstate::entropy_bits(&self.probabilities)
    }

    /// Hessian of `ln Z`: the Kubo-Mori covariance of the basis operators.
    ///
    /// In the eigenbasis of the exponent, `d2 Z / d_a d_b = sum_ij A_a[i,j] conj(A_b[i,j]) K_ij`
    /// with `K_ij` the divided difference of `exp` at eigenvalues `i`, `j`.
    fn hessian(&self, c: &ConstraintSet) -> DMatrix<f64> {
        let dim = self.eigenvalues.len();
        let top = self.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let shifted: Vec<f64> = self.eigenvalues.iter().map(|l| l - top).collect();
        let partition: f64 = shifted.iter().map(|s| s.exp()).sum();
        let mut root_k = DMatrix::<f64>::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                let d = shifted[i] - shifted[j];
                let ej = shifted[j].exp();
                let k = if d.abs() < 1e-12 { ej } else { ej * d.exp_m1() / d };
                root_k[(i, j)] = (k / partition).sqrt();
            }
        }
        let u = &self.eigenvectors;
        let u_adj = u.adjoint();
        let p = c.len();
        let mut w = CMatrix::zeros(p, dim * dim);
        let mut pu = CMatrix::zeros(dim, dim);
        for (a, pauli) in c.paulis.iter().enumerate() {
            let x = pauli.x_mask() as usize;
            for col in 0..dim {
                let v = pauli.column_entry(col as u64);
                for j in 0..dim {
                    pu[(col ^ x, j)] = v * u[(col, j)];
                }
            }
            let rotated = &u_adj * &pu;
            for j in 0..dim {
                for i in 0..dim {
                    w[(a, i + j * dim)] = rotated[(i, j)] * root_k[(i, j)];
                }
            }
        }
        let gram = &w * w.adjoint();
        DMatrix::from_fn(p, p, |a, b| {
            gram[(a, b)].re - self.expectations[a] * self.expectations[b]
        })
    }
}

/// Dual objective (natural log) and its gradient `<P>_theta - t_P`.
pub fn dual_value_and_gradient(theta: &DualParameters, c: &ConstraintSet) -> Result<(f64, Vec<f64>)> {
    if theta.paulis != c.paulis {
        return Err(Error::Argument("dual parameters and constraints use different keys".into()));
    }
    let magnitude = theta.max_abs();
    if magnitude > THETA_GUARD {
        return Err(Error::Diverged { magnitude, iteration: 0 });
    }
    let point = DualPoint::evaluate(&theta.coefficients, c);
    Ok((point.value, point.gradient))
}

/// Solves a symmetric positive (semi)definite system, regularizing as needed.
fn newton_direction(hessian: DMatrix<f64>, gradient: &[f64]) -> Option<Vec<f64>> {
    let p = gradient.len();
    let rhs = nalgebra::DVector::from_iterator(p, gradient.iter().map(|g| -g));
    let scale = (0..p).map(|i| hessian[(i, i)].abs()).fold(0.0, f64::max).max(1e-300);
    let mut shift = 0.0;
    for _ in 0..12 {
        let mut h = hessian.clone();
        for i in 0..p {
            h[(i, i)] += shift;
        }
        if let Some(chol) = h.cholesky() {
            let d = chol.solve(&rhs);
            if d.iter().all(|v| v.is_finite()) {
                return Some(d.iter().copied().collect());
            }
        }
        shift = if shift == 0.0 { 1e-14 * scale } else { shift * 100.0 };
    }
    None
}

/// Fits the maximum-entropy state for a constraint set.
///
/// Starts from `theta = 0` (maximally mixed) and stops when the gradient
/// max-norm drops to `opts.tol`. Non-convergence returns
/// [`Error::NotConverged`] carrying the best iterate.
pub fn fit(c: &ConstraintSet, opts: &SolverOptions) -> Result<MaxEntResult> {
    let n = c.n_qubits;
    let mut theta = vec![0.0; c.len()];
    let mut point = DualPoint::evaluate(&theta, c);
    let mut iterations = 0;

    while point.residual() > opts.tol {
        if iterations >= opts.max_iter {
            break;
        }
        let direction = match opts.optimizer {
            Optimizer::GradientDescent => point.gradient.iter().map(|g| -g).collect(),
            Optimizer::Newton => newton_direction(point.hessian(c), &point.gradient)
                .unwrap_or_else(|| point.gradient.iter().map(|g| -g).collect()),
        };
        let mut slope: f64 = direction.iter().zip(&point.gradient).map(|(d, g)| d * g).sum();
        let direction: Vec<f64> = if slope < 0.0 {
            direction
        } else {
            slope = -point.gradient.iter().map(|g| g * g).sum::<f64>();
            point.gradient.iter().map(|g| -g).collect()
        };

        let mut step = 1.0;
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let trial: Vec<f64> = theta.iter().zip(&direction).map(|(t, d)| t + step * d).collect();
            let magnitude = trial.iter().fold(0.0, |m: f64, t| m.max(t.abs()));
            if magnitude > THETA_GUARD {
                return Err(Error::Diverged { magnitude, iteration: iterations + 1 });
            }
            let candidate = DualPoint::evaluate(&trial, c);
            let armijo = candidate.value <= point.value + ARMIJO_SLOPE * step * slope;
            // Near the optimum the decrease can fall below the rounding of the value.
            let flat = candidate.value <= point.value + 1e-14 * point.value.abs().max(1.0)
                && candidate.residual() < point.residual();
            if armijo || flat {
                accepted = Some((trial, candidate));
                break;
            }
            step *= ARMIJO_SHRINK;
        }
        iterations += 1;
        match accepted {
            Some((t, p)) => {
                theta = t;
                point = p;
            }
            None => break,
        }
    }

    let residual = point.residual();
    let result = MaxEntResult {
        order: c.order,
        state: point.state(n),
        dual: DualParameters { paulis: c.paulis.clone(), coefficients: theta },
        entropy_bits: point.entropy_bits(),
        residual,
        iterations,
        converged: residual <= opts.tol,
    };
    if result.converged {
        Ok(result)
    } else {
        Err(Error::NotConverged { best: Box::new(result) })
    }
}

/// The `l = 1` reconstruction: the product of all single-particle marginals.
pub fn product_state_closure(rho: &DensityMatrix) -> Result<MaxEntResult> {
    let n = rho.n_qubits();
    let marginals: Vec<DensityMatrix> = (1..=n)
        .map(|label| partial_trace(rho, &SubsetIndex::new([label], n)?))
        .collect::<Result<_>>()?;
    let mut state = marginals[0].clone();
    for m in &marginals[1..] {
        state = tensor(&state, m)?;
    }
    let mut entropy_bits = 0.0;
    let mut paulis = Vec::with_capacity(3 * n);
    let mut coefficients = Vec::with_capacity(3 * n);
    for (i, m) in marginals.iter().enumerate() {
        entropy_bits += von_neumann_entropy(m)?;
        let bloch: Vec<f64> = ['X', 'Y', 'Z']
            .iter()
            .map(|&l| operator_trace(m.matrix(), &PauliString::single(1, 1, l).unwrap()).re)
            .collect();
        let length = bloch.iter().map(|b| b * b).sum::<f64>().sqrt();
        // rho = (1 + r.sigma)/2 = exp(atanh|r| r_hat.sigma) / Z
        let magnitude = if length < 1.0 - 1e-15 { length.atanh() } else { THETA_GUARD };
        for (&letter, b) in ['X', 'Y', 'Z'].iter().zip(&bloch) {
            paulis.push(PauliString::single(n, i + 1, letter)?);
            coefficients.push(if length > 0.0 { magnitude * b / length } else { 0.0 });
        }
    }
    let c = extract_constraints(rho, 1)?;
    let dual = reorder(&c, &paulis, &coefficients);
    Ok(MaxEntResult {
        order: 1,
        state,
        dual,
        entropy_bits,
        residual: 0.0,
        iterations: 0,
        converged: true,
    })
}

fn reorder(c: &ConstraintSet, paulis: &[PauliString], coefficients: &[f64]) -> DualParameters {
    let coefficients = c
        .paulis
        .iter()
        .map(|p| paulis.iter().position(|q| q == p).map_or(0.0, |i| coefficients[i]))
        .collect();
    DualParameters { paulis: c.paulis.clone(), coefficients }
}

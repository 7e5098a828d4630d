//! Correlation spectra `C(2) ... C(n)` and total correlation `C_T`, in bits.
//!
//! Given the entropy ladder `S_1 >= S_2 >= ... >= S_n` of the maximum-entropy
//! reconstructions from `l`-particle marginals, the irreducible `k`-particle
//! correlation is `C(k) = S_{k-1} - S_k` and `C_T = S_1 - S_n`.

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maxent::{extract_constraints, fit, product_state_closure, SolverOptions};
use crate::qstate::{
    binary_entropy, depolarize, partial_trace, von_neumann_entropy, CMatrix, DensityMatrix,
    StateVector, SubsetIndex, DEFAULT_DENSE_LIMIT,
};
use crate::stabilizer::PauliString;

/// Smallest eigenvalue accepted by the full-rank pipeline.
pub const FULL_RANK_GATE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpectrumMethod {
    Numeric,
    NumericExtrapolated,
    StabilizerExact,
    GhzAnalytic,
}

impl SpectrumMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            SpectrumMethod::Numeric => "numeric",
            SpectrumMethod::NumericExtrapolated => "numeric-extrapolated",
            SpectrumMethod::StabilizerExact => "stabilizer-exact",
            SpectrumMethod::GhzAnalytic => "ghz-analytic",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationSpectrum {
    #[serde(rename = "n")]
    pub n_qubits: usize,
    pub method: SpectrumMethod,
    /// `S(rho_1) ... S(rho_K)` in bits, `K = n` unless truncated.
    pub entropy_ladder: Vec<f64>,
    #[serde(rename = "C")]
    pub c_of_k: BTreeMap<usize, f64>,
    #[serde(rename = "C_total")]
    pub c_total: f64,
    pub uncertainty: Option<f64>,
    /// Every maximum-entropy fit met its tolerance.
    #[serde(default = "default_true")]
    pub converged: bool,
    /// Continuity pipeline only: the schedule met its successive-difference rule.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub extrapolation_converged: Option<bool>,
}

fn default_true() -> bool {
    true
}

impl CorrelationSpectrum {
    pub fn from_ladder(n_qubits: usize, entropy_ladder: Vec<f64>, method: SpectrumMethod) -> Self {
        let c_of_k = entropy_ladder
            .windows(2)
            .enumerate()
            .map(|(i, w)| (i + 2, w[0] - w[1]))
            .collect();
        let c_total = match (entropy_ladder.first(), entropy_ladder.last()) {
            (Some(first), Some(last)) => first - last,
            _ => 0.0,
        };
        Self {
            n_qubits,
            method,
            entropy_ladder,
            c_of_k,
            c_total,
            uncertainty: None,
            converged: true,
            extrapolation_converged: None,
        }
    }

    /// `C(k)`, zero for orders not present.
    pub fn c(&self, k: usize) -> f64 {
        self.c_of_k.get(&k).copied().unwrap_or(0.0)
    }

    /// True when the ladder covers every order `1..=n`.
    pub fn is_complete(&self) -> bool {
        self.entropy_ladder.len() == self.n_qubits
    }

    /// Largest absolute difference over all `C(k)` and `C_T`.
    pub fn max_deviation(&self, other: &CorrelationSpectrum) -> f64 {
        let keys = self.c_of_k.keys().chain(other.c_of_k.keys());
        keys.map(|&k| (self.c(k) - other.c(k)).abs())
            .fold((self.c_total - other.c_total).abs(), f64::max)
    }
}

/// `sum_i S(rho_i) - S(rho)`.
pub fn total_correlation(rho: &DensityMatrix) -> Result<f64> {
    let n = rho.n_qubits();
    let mut singles = 0.0;
    for label in 1..=n {
        singles += von_neumann_entropy(&partial_trace(rho, &SubsetIndex::new([label], n)?)?)?;
    }
    Ok(singles - von_neumann_entropy(rho)?)
}

/// Numeric spectrum of a full-rank state.
pub fn spectrum_full_rank(rho: &DensityMatrix, opts: &SolverOptions) -> Result<CorrelationSpectrum> {
    spectrum_full_rank_up_to(rho, opts, rho.n_qubits())
}

/// As [`spectrum_full_rank`], fitting only orders `l <= max_order`.
///
/// A truncated spectrum still reports the exact `C_T`; its `C(k)` entries
/// then sum to `S_1 - S_max_order` rather than to `C_T`.
pub fn spectrum_full_rank_up_to(
    rho: &DensityMatrix,
    opts: &SolverOptions,
    max_order: usize,
) -> Result<CorrelationSpectrum> {
    let min_eigenvalue = rho.min_eigenvalue();
    if min_eigenvalue < FULL_RANK_GATE {
        return Err(Error::RankDeficient { min_eigenvalue });
    }
    numeric_spectrum(rho, opts, max_order)
}

fn numeric_spectrum(rho: &DensityMatrix, opts: &SolverOptions, max_order: usize) -> Result<CorrelationSpectrum> {
    let n = rho.n_qubits();
    if max_order == 0 || max_order > n {
        return Err(Error::Argument(format!("maximum order {max_order} outside 1..={n}")));
    }
    let full_entropy = von_neumann_entropy(rho)?;
    let mut converged = true;
    let mut ladder = Vec::with_capacity(max_order);
    for l in 1..=max_order {
        let s = if l == 1 {
            product_state_closure(rho)?.entropy_bits
        } else if l == n {
            full_entropy
        } else {
            match fit(&extract_constraints(rho, l)?, opts) {
                Ok(r) => r.entropy_bits,
                Err(Error::NotConverged { best }) => {
                    converged = false;
                    best.entropy_bits
                }
                Err(e) => return Err(e),
            }
        };
        ladder.push(s);
    }
    let mut spectrum = CorrelationSpectrum::from_ladder(n, ladder, SpectrumMethod::Numeric);
    if max_order < n {
        spectrum.c_total = spectrum.entropy_ladder[0] - full_entropy;
    }
    spectrum.converged = converged;
    Ok(spectrum)
}

/// Depolarization strengths for the continuity pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuitySchedule {
    eps_sequence: Vec<f64>,
    convergence_tol: f64,
}

impl Default for ContinuitySchedule {
    fn default() -> Self {
        Self {
            eps_sequence: vec![1e-2, 3e-3, 1e-3, 3e-4, 1e-4],
            convergence_tol: 1e-3,
        }
    }
}

impl ContinuitySchedule {
    pub fn new(eps_sequence: Vec<f64>, convergence_tol: f64) -> Result<Self> {
        if eps_sequence.is_empty() {
            return Err(Error::Argument("empty depolarization schedule".into()));
        }
        if let Some(bad) = eps_sequence.iter().find(|e| !(**e > 0.0 && **e < 1.0)) {
            return Err(Error::Argument(format!("schedule entry {bad} outside (0, 1)")));
        }
        if eps_sequence.windows(2).any(|w| w[1] >= w[0]) {
            return Err(Error::Argument("schedule must be strictly decreasing".into()));
        }
        if !(convergence_tol > 0.0) {
            return Err(Error::Argument(format!("convergence tolerance {convergence_tol} must be positive")));
        }
        Ok(Self { eps_sequence, convergence_tol })
    }

    pub fn eps_sequence(&self) -> &[f64] {
        &self.eps_sequence
    }

    pub fn convergence_tol(&self) -> f64 {
        self.convergence_tol
    }
}

/// Spectrum of an arbitrary state as the limit of depolarized full-rank states.
///
/// Walks the schedule until successive spectra agree within the schedule's
/// tolerance. The reported uncertainty is the last successive difference. An
/// exhausted schedule yields the last spectrum with
/// `extrapolation_converged = Some(false)`; a fit that fails at a later
/// strength ends the walk with the previous spectrum.
pub fn spectrum_continuity(
    rho: &DensityMatrix,
    sched: &ContinuitySchedule,
    opts: &SolverOptions,
) -> Result<CorrelationSpectrum> {
    spectrum_continuity_up_to(rho, sched, opts, rho.n_qubits())
}

pub fn spectrum_continuity_up_to(
    rho: &DensityMatrix,
    sched: &ContinuitySchedule,
    opts: &SolverOptions,
    max_order: usize,
) -> Result<CorrelationSpectrum> {
    let mut previous: Option<CorrelationSpectrum> = None;
    for &eps in &sched.eps_sequence {
        let current = match numeric_spectrum(&depolarize(rho, eps)?, opts, max_order) {
            Ok(s) if s.converged || previous.is_none() => s,
            // A failing fit at smaller eps keeps the last good spectrum.
            Ok(_) => break,
            Err(Error::Diverged { .. }) | Err(Error::NotConverged { .. }) if previous.is_some() => break,
            Err(e) => return Err(e),
        };
        let delta = previous.as_ref().map(|p| p.max_deviation(&current));
        let done = delta.is_some_and(|d| d < sched.convergence_tol);
        let spectrum = CorrelationSpectrum {
            method: SpectrumMethod::NumericExtrapolated,
            uncertainty: delta,
            extrapolation_converged: Some(done),
            ..current
        };
        if done || !spectrum.converged {
            return Ok(spectrum);
        }
        previous = Some(spectrum);
    }
    Ok(previous.expect("schedule is nonempty"))
}

/// Generalized GHZ parameters: `alpha |0...0> + beta |1...1>`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GhzSpec {
    n_qubits: usize,
    alpha_sq: f64,
    phi: f64,
}

impl GhzSpec {
    /// `alpha = sqrt(alpha_sq)`, `beta = sqrt(1 - alpha_sq) e^{i phi}`; requires `alpha beta != 0`.
    pub fn new(n_qubits: usize, alpha_sq: f64, phi: f64) -> Result<Self> {
        if n_qubits < 2 {
            return Err(Error::Argument(format!("GHZ states need n >= 2, got {n_qubits}")));
        }
        if !(alpha_sq > 0.0 && alpha_sq < 1.0) {
            return Err(Error::Argument(format!(
                "|alpha|^2 = {alpha_sq} must lie strictly between 0 and 1"
            )));
        }
        if !phi.is_finite() {
            return Err(Error::Argument("phase must be finite".into()));
        }
        Ok(Self { n_qubits, alpha_sq, phi })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn alpha_sq(&self) -> f64 {
        self.alpha_sq
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    /// Unit vector `(sin t cos phi, sin t sin phi, cos t)` with `alpha = cos(t/2)`.
    pub fn bloch_direction(&self) -> [f64; 3] {
        let cos_t = 2.0 * self.alpha_sq - 1.0;
        let sin_t = 2.0 * (self.alpha_sq * (1.0 - self.alpha_sq)).sqrt();
        [sin_t * self.phi.cos(), sin_t * self.phi.sin(), cos_t]
    }
}

pub fn ghz_state(spec: &GhzSpec) -> StateVector {
    let dim = 1usize << spec.n_qubits;
    let mut v = DVector::zeros(dim);
    v[0] = Complex64::new(spec.alpha_sq.sqrt(), 0.0);
    v[dim - 1] = Complex64::from_polar((1.0 - spec.alpha_sq).sqrt(), spec.phi);
    StateVector::new(v).expect("normalized by construction")
}

/// Closed-form spectrum: `C(2) = (n-1) E`, `C(n) = E`, all others zero.
///
/// The ladder is `S_1 = n E`, `S_k = E` for `2 <= k < n` and `S_n = 0`; for
/// `n = 2` both closed-form terms land on `C(2) = 2 E`.
pub fn theorem3_spectrum(spec: &GhzSpec) -> CorrelationSpectrum {
    let n = spec.n_qubits;
    let e = binary_entropy(spec.alpha_sq);
    let ladder = (1..=n)
        .map(|k| match k {
            1 => n as f64 * e,
            k if k == n => 0.0,
            _ => e,
        })
        .collect();
    CorrelationSpectrum::from_ladder(n, ladder, SpectrumMethod::GhzAnalytic)
}

/// Strings of the `Sigma` operator vector: `X..X`, `Y X..X`, `Z I..I`.
fn sigma_strings(n: usize) -> [PauliString; 3] {
    let all = (1u64 << n) - 1;
    let top = 1u64 << (n - 1);
    [
        PauliString::from_masks(n, all, 0, 0).unwrap(),
        PauliString::from_masks(n, all, top, 0).unwrap(),
        PauliString::from_masks(n, 0, top, 0).unwrap(),
    ]
}

/// `Z_1 Z_i` for `i = 2..=n`.
fn pair_strings(n: usize) -> Vec<PauliString> {
    let top = 1u64 << (n - 1);
    (2..=n)
        .map(|i| PauliString::from_masks(n, 0, top | 1u64 << (n - i), 0).unwrap())
        .collect()
}

/// The normalized `exp(gamma sum_i Z_1 Z_i + lambda . Sigma)`, built from its product form
/// `2^-n prod_i [1 + tanh(gamma) Z_1 Z_i] [1 + tanh(|lambda|) Sigma_hat]`.
pub fn ghz_family(n_qubits: usize, gamma: f64, lambda_vec: [f64; 3]) -> Result<DensityMatrix> {
    if n_qubits < 2 {
        return Err(Error::Argument(format!("GHZ family needs n >= 2, got {n_qubits}")));
    }
    if n_qubits > DEFAULT_DENSE_LIMIT {
        return Err(Error::Size { qubits: n_qubits, limit: DEFAULT_DENSE_LIMIT });
    }
    let dim = 1usize << n_qubits;
    let tg = gamma.tanh();
    let mut terms = vec![(PauliString::identity(n_qubits), 1.0)];
    for zz in pair_strings(n_qubits) {
        let with: Vec<_> = terms.iter().map(|&(p, c)| (p * zz, c * tg)).collect();
        terms.extend(with);
    }
    let mut pairs = CMatrix::zeros(dim, dim);
    for (p, c) in terms {
        p.add_scaled_to(&mut pairs, Complex64::new(c, 0.0));
    }

    let mut sigma = CMatrix::identity(dim, dim);
    let norm = lambda_vec.iter().map(|l| l * l).sum::<f64>().sqrt();
    if norm > 0.0 {
        let t = norm.tanh();
        for (s, l) in sigma_strings(n_qubits).iter().zip(lambda_vec) {
            s.add_scaled_to(&mut sigma, Complex64::new(t * l / norm, 0.0));
        }
    }
    let m = (pairs * sigma).scale(1.0 / dim as f64);
    Ok(DensityMatrix::from_raw(n_qubits, (&m + m.adjoint()).scale(0.5)))
}

/// Hermitian exponent `gamma sum_i Z_1 Z_i + lambda . Sigma` of [`ghz_family`].
pub fn ghz_family_exponent(n_qubits: usize, gamma: f64, lambda_vec: [f64; 3]) -> CMatrix {
    let dim = 1usize << n_qubits;
    let mut h = CMatrix::zeros(dim, dim);
    for zz in pair_strings(n_qubits) {
        zz.add_scaled_to(&mut h, Complex64::new(gamma, 0.0));
    }
    for (s, l) in sigma_strings(n_qubits).iter().zip(lambda_vec) {
        s.add_scaled_to(&mut h, Complex64::new(l, 0.0));
    }
    h
}

/// Diagonal `lambda'` with the same `(n-1)`-particle marginals:
/// `lambda'_x = lambda'_y = 0`, `tanh(lambda'_z) = (lambda_z / |lambda|) tanh |lambda|`.
pub fn ghz_marginal_condition(lambda_vec: [f64; 3]) -> Result<[f64; 3]> {
    let norm = lambda_vec.iter().map(|l| l * l).sum::<f64>().sqrt();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::Argument(format!("|lambda| = {norm} must be positive and finite")));
    }
    let target = lambda_vec[2] / norm * norm.tanh();
    if target.abs() >= 1.0 {
        return Err(Error::Argument(format!(
            "tanh(lambda'_z) = {target} saturates; lambda'_z overflows"
        )));
    }
    Ok([0.0, 0.0, target.atanh()])
}

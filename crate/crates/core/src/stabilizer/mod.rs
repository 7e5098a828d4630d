//! Stabilizer groups over signed Pauli strings and their exact correlation spectra.
//!
//! For a stabilizer state the whole correlation spectrum is combinatorial:
//! with `r_k` the GF(2) rank of all group elements supported on at most `k`
//! qubits, the ladder of maximum-entropy reconstructions is `S_k = n - r_k`
//! and the irreducible `k`-particle correlation is `r_k - r_{k-1}` bits.

mod gf2;
mod pauli;

use std::collections::HashMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::correlations::{CorrelationSpectrum, SpectrumMethod};
use crate::error::{Error, Result};
use crate::qstate::{CMatrix, DensityMatrix, DEFAULT_DENSE_LIMIT};

pub use gf2::{gf2_rank, Gf2Basis};
pub use pauli::{pauli_multiply, PauliString, MAX_PAULI_QUBITS};

/// Default cap on `m` for enumerating all `2^m` group elements.
pub const DEFAULT_ENUMERATION_GUARD: usize = 20;

/// Parses a comma-separated generator list such as `"+XXX,+ZZI,-IZZ"`.
pub fn parse_generators(text: &str) -> Result<Vec<PauliString>> {
    let gens: Vec<PauliString> = text
        .split(',')
        .enumerate()
        .map(|(i, token)| {
            token.parse::<PauliString>().map_err(|e| match e {
                Error::Parse { location, message } => Error::Parse {
                    location: format!("generator {} ({location})", i + 1),
                    message,
                },
                other => other,
            })
        })
        .collect::<Result<_>>()?;
    if let Some((i, g)) = gens.iter().enumerate().find(|(_, g)| g.n_qubits() != gens[0].n_qubits()) {
        return Err(Error::Parse {
            location: format!("generator {}", i + 1),
            message: format!(
                "{g} has {} qubits but generator 1 has {}",
                g.n_qubits(),
                gens[0].n_qubits()
            ),
        });
    }
    Ok(gens)
}

/// A validated set of independent, commuting, Hermitian generators.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilizerGroup {
    n_qubits: usize,
    generators: Vec<PauliString>,
}

impl StabilizerGroup {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn generators(&self) -> &[PauliString] {
        &self.generators
    }

    /// Number of generators `m`.
    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn enumerate_elements(&self) -> Result<Vec<PauliString>> {
        self.enumerate_elements_with_guard(DEFAULT_ENUMERATION_GUARD)
    }

    /// All `2^m` products `g_1^a_1 ... g_m^a_m`; element `a` has bit `i` set for `g_{i+1}`.
    pub fn enumerate_elements_with_guard(&self, guard: usize) -> Result<Vec<PauliString>> {
        let m = self.generators.len();
        if m > guard {
            return Err(Error::Guard { generators: m, limit: guard });
        }
        let mut elements = Vec::with_capacity(1 << m);
        elements.push(PauliString::identity(self.n_qubits));
        for g in &self.generators {
            let with_g: Vec<_> = elements.iter().map(|&e| e * *g).collect();
            elements.extend(with_g);
        }
        Ok(elements)
    }

    pub fn rank_profile(&self) -> Result<RankProfile> {
        self.rank_profile_with_guard(DEFAULT_ENUMERATION_GUARD)
    }

    pub fn rank_profile_with_guard(&self, guard: usize) -> Result<RankProfile> {
        let n = self.n_qubits;
        let mut by_support: Vec<Vec<u128>> = vec![Vec::new(); n + 1];
        for e in self.enumerate_elements_with_guard(guard)? {
            by_support[e.support()].push(e.symplectic());
        }
        let mut basis = Gf2Basis::new();
        let ranks = (1..=n)
            .map(|k| {
                for &v in &by_support[k] {
                    basis.insert(v);
                }
                basis.rank()
            })
            .collect();
        Ok(RankProfile { ranks, m: self.len() })
    }

    /// Exact spectrum `C(k) = r_k - r_{k-1}`, `C_T = r_n - r_1`.
    pub fn theorem2_spectrum(&self) -> Result<CorrelationSpectrum> {
        Ok(self.rank_profile()?.spectrum(self.n_qubits))
    }

    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        self.to_density_matrix_with_limit(DEFAULT_DENSE_LIMIT)
    }

    /// `2^-n` times the sum of all group elements.
    pub fn to_density_matrix_with_limit(&self, dense_limit: usize) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if n > dense_limit {
            return Err(Error::Size { qubits: n, limit: dense_limit });
        }
        let dim = 1usize << n;
        let weight = Complex64::new(1.0 / dim as f64, 0.0);
        let mut m = CMatrix::zeros(dim, dim);
        for e in self.enumerate_elements()? {
            e.add_scaled_to(&mut m, weight);
        }
        Ok(DensityMatrix::from_raw(n, m))
    }

    /// Greedy basis of the group sorted into nested weight classes.
    ///
    /// Level `k` receives elements of support exactly `k` that are independent
    /// of everything chosen at lower levels, so the generators at levels `<= k`
    /// span the same space as all elements of support `<= k`.
    pub fn nested_generators(&self) -> Result<NestedGenerators> {
        let elements = self.enumerate_elements()?;
        let mut basis = Gf2Basis::new();
        let mut entries = Vec::with_capacity(self.len());
        for level in 1..=self.n_qubits {
            for e in elements.iter().filter(|e| e.support() == level) {
                if basis.insert(e.symplectic()) {
                    entries.push((level, *e));
                }
            }
        }
        debug_assert_eq!(entries.len(), self.len());
        Ok(NestedGenerators { n_qubits: self.n_qubits, entries })
    }
}

/// Checks commutation, independence and Hermiticity of a generator list.
///
/// Error indices are 1-based positions in `gens`.
pub fn validate_group(gens: &[PauliString]) -> Result<StabilizerGroup> {
    let first = gens
        .first()
        .ok_or_else(|| Error::Argument("a stabilizer group needs at least one generator".into()))?;
    let n_qubits = first.n_qubits();
    if let Some((i, g)) = gens.iter().enumerate().find(|(_, g)| g.n_qubits() != n_qubits) {
        return Err(Error::Argument(format!(
            "generator {} acts on {} qubits, expected {n_qubits}",
            i + 1,
            g.n_qubits()
        )));
    }
    for (i, g) in gens.iter().enumerate() {
        if !g.is_hermitian() {
            return Err(Error::OddPhase { index: i + 1, phase: g.phase() });
        }
    }
    for i in 0..gens.len() {
        for j in i + 1..gens.len() {
            if !gens[i].commutes_with(&gens[j]) {
                return Err(Error::NonCommuting { first: i + 1, second: j + 1 });
            }
        }
    }
    let mut basis = Gf2Basis::new();
    for (i, g) in gens.iter().enumerate() {
        if !basis.insert(g.symplectic()) {
            return Err(Error::Dependent { index: i + 1 });
        }
    }
    Ok(StabilizerGroup { n_qubits, generators: gens.to_vec() })
}

/// `r_k` for `k = 1..=n`: GF(2) rank of all elements supported on at most `k` qubits.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankProfile {
    pub ranks: Vec<usize>,
    pub m: usize,
}

impl RankProfile {
    /// `r_k`, with `r_0 = 0`.
    pub fn rank(&self, k: usize) -> usize {
        if k == 0 {
            0
        } else {
            self.ranks[k - 1]
        }
    }

    pub fn spectrum(&self, n_qubits: usize) -> CorrelationSpectrum {
        let ladder = self.ranks.iter().map(|&r| (n_qubits - r) as f64).collect();
        CorrelationSpectrum::from_ladder(n_qubits, ladder, SpectrumMethod::StabilizerExact)
    }
}

/// Group generators tagged with nested weight levels `1..=n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedGenerators {
    n_qubits: usize,
    entries: Vec<(usize, PauliString)>,
}

impl NestedGenerators {
    /// Validates a caller-chosen nested generating set for `group`.
    ///
    /// Every entry must be a group element (sign included) with support at most
    /// its level, levels must be nondecreasing, and for each `k` the entries at
    /// levels `<= k` must be independent and number exactly `r_k`.
    pub fn new(group: &StabilizerGroup, entries: Vec<(usize, PauliString)>) -> Result<Self> {
        let n = group.n_qubits();
        let members: HashMap<u128, PauliString> = group
            .enumerate_elements()?
            .into_iter()
            .map(|e| (e.symplectic(), e))
            .collect();
        let profile = group.rank_profile()?;
        let mut basis = Gf2Basis::new();
        let mut previous_level = 1;
        for (i, &(level, g)) in entries.iter().enumerate() {
            if level < previous_level || level == 0 || level > n {
                return Err(Error::Argument(format!(
                    "entry {}: level {level} breaks the nondecreasing order within 1..={n}",
                    i + 1
                )));
            }
            previous_level = level;
            if members.get(&g.symplectic()) != Some(&g) {
                return Err(Error::Argument(format!("entry {}: {g} is not a group element", i + 1)));
            }
            if g.support() > level {
                return Err(Error::Argument(format!(
                    "entry {}: {g} has support {} above its level {level}",
                    i + 1,
                    g.support()
                )));
            }
            if !basis.insert(g.symplectic()) {
                return Err(Error::Argument(format!("entry {}: {g} is dependent", i + 1)));
            }
        }
        for k in 1..=n {
            let count = entries.iter().filter(|(level, _)| *level <= k).count();
            if count != profile.rank(k) {
                return Err(Error::Argument(format!(
                    "levels <= {k} hold {count} generators but the weight-{k} rank is {}",
                    profile.rank(k)
                )));
            }
        }
        Ok(Self { n_qubits: n, entries })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &[(usize, PauliString)] {
        &self.entries
    }

    /// Generators with level at most `order`.
    pub fn up_to(&self, order: usize) -> impl Iterator<Item = &PauliString> {
        self.entries.iter().filter(move |(l, _)| *l <= order).map(|(_, g)| g)
    }

    /// `2^-n (1 + sum_d tanh^d(lambda) * sum of all d-fold products)` over the
    /// generators of level `<= order`; the normalized `exp(lambda * sum g)`.
    pub fn lambda_family(&self, order: usize, lambda: f64) -> Result<DensityMatrix> {
        let n = self.n_qubits;
        if order == 0 || order > n {
            return Err(Error::Argument(format!("order {order} outside 1..={n}")));
        }
        if n > DEFAULT_DENSE_LIMIT {
            return Err(Error::Size { qubits: n, limit: DEFAULT_DENSE_LIMIT });
        }
        let t = lambda.tanh();
        let mut terms = vec![(PauliString::identity(n), 1.0)];
        for g in self.up_to(order) {
            let with_g: Vec<_> = terms.iter().map(|&(e, c)| (e * *g, c * t)).collect();
            terms.extend(with_g);
        }
        let dim = 1usize << n;
        let mut m = CMatrix::zeros(dim, dim);
        for (e, c) in terms {
            e.add_scaled_to(&mut m, Complex64::new(c / dim as f64, 0.0));
        }
        Ok(DensityMatrix::from_raw(n, m))
    }
}

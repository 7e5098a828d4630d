//! Irreducible multi-particle correlations of multi-qubit states.
//!
//! The correlation in an `n`-qubit state splits into irreducible `k`-particle
//! parts `C(k)`, each the entropy drop between the maximum-entropy states
//! consistent with all `(k-1)`- and all `k`-particle marginals. This crate
//! computes that spectrum three ways:
//!
//! * numerically, by fitting maximum-entropy states on the dual of the
//!   marginal-matching problem ([`maxent`]), with depolarization limits for
//!   rank-deficient inputs ([`correlations::spectrum_continuity`]);
//! * exactly for stabilizer states, from GF(2) ranks of weight-filtered group
//!   elements ([`stabilizer`]);
//! * in closed form for generalized GHZ states ([`correlations::theorem3_spectrum`]).
//!
//! All entropies and correlations are in bits. Particle 1 is the most
//! significant qubit of every basis index.

pub mod cli;
pub mod correlations;
pub mod error;
pub mod io;
pub mod maxent;
pub mod qstate;
pub mod stabilizer;

pub use correlations::{
    ghz_family, ghz_marginal_condition, ghz_state, spectrum_continuity, spectrum_full_rank,
    theorem3_spectrum, total_correlation, ContinuitySchedule, CorrelationSpectrum, GhzSpec,
    SpectrumMethod,
};
pub use error::{Error, Result};
pub use maxent::{
    dual_value_and_gradient, extract_constraints, fit, product_state_closure, ConstraintSet,
    DualParameters, MaxEntResult, Optimizer, SolverOptions,
};
pub use qstate::{
    depolarize, hermitian_exp, partial_trace, pauli_expectation, tensor, von_neumann_entropy,
    DensityMatrix, StateVector, SubsetIndex,
};
pub use stabilizer::{
    parse_generators, pauli_multiply, validate_group, NestedGenerators, PauliString, RankProfile,
    StabilizerGroup,
};

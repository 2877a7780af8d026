//! Numerical laboratory for correlations in chaotic many-qubit states.
//!
//! The crate samples random-matrix eigenvectors (GUE/GOE) and eigenstates of a
//! disordered spin-1/2 chain, and measures on them:
//!
//! * the variance-covariance matrix (VCM) of all single-site Pauli observables
//!   and its extremal eigenvalues,
//! * bipartite purities of reduced density matrices,
//! * multi-point connected correlations (joint cumulants),
//! * level-spacing statistics of the chain,
//!
//! together with the closed-form random-matrix predictions these quantities
//! are compared against.
//!
//! # Conventions
//!
//! Sites are numbered `1..=N`. Site `l` is stored in bit `l - 1` of the basis
//! index (little-endian), and bit value `0` is spin up (`σ_z = +1`).

extern crate openblas_src;

pub mod consts;
pub mod correlations;
pub mod ensembles;
pub mod entanglement;
mod error;
pub mod linalg;
pub mod local_ops;
pub mod quantum_state;
pub mod spin_chain;
pub mod stats;

pub use error::{Error, Result};

/// Crate version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

pub use correlations::{
    additive_fluctuation, compute_vcm, connected_correlation, extremal_eigenvalues, two_point_sq_correlation_stat,
    AdditiveOperatorSpec, AxisPairs, CumulantRequest, VarianceCovarianceMatrix,
};
pub use ensembles::{
    moment_statistics, predicted_cross_moment, predicted_moment2, predicted_moment4, predicted_purity,
    predicted_sq_correlation, predicted_vcm_element, sample_state, sample_state_via_matrix, EnsembleClass,
    MomentStatistics, SampleSeed,
};
pub use entanglement::{purity_asymptotic_check, purity_bound, purity_sweep, PuritySweepResult, SubsystemPolicy};
pub use local_ops::{
    apply_local_unitary, disentangling_cost_probe, invariance_experiment, projective_measure, BasisChoice,
    InvarianceConfig, InvarianceReport, InvarianceStatistic, LocalUnitary, MeasurementMode, MeasurementRecord,
    ProbeResult, StateFamily,
};
pub use quantum_state::{
    make_cat_state, partial_trace, pauli_expectation, purity, purity_direct, Axis, DensityMatrix, LocalObservable,
    PauliString, StateVector,
};
pub use spin_chain::{
    build_hamiltonian, diagonalize, sample_spec, select_eigenstate, unfold_and_spacings, EigenSelector,
    SpacingStatistics, SpectrumResult, SpinChainSpec,
};
pub use stats::EnsembleSummary;

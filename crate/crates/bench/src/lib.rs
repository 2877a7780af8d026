//! Fixtures shared by the benchmarks in `benches/`.

use chaoscorr_core::{sample_spec, sample_state, EnsembleClass, SampleSeed, SpinChainSpec, StateVector};

/// Seed used by every fixture, so runs compare like with like.
pub const BENCH_SEED: u64 = 0x5eed;

/// A GUE state on `n_sites` sites.
pub fn gue_state(n_sites: usize) -> StateVector {
    sample_state(EnsembleClass::Gue, n_sites, SampleSeed::new(BENCH_SEED, n_sites as u64)).expect("valid size")
}

/// A disordered chain with `J = h = 1`.
pub fn chain(n_sites: usize) -> SpinChainSpec {
    sample_spec(n_sites, 1.0, 1.0, SampleSeed::new(BENCH_SEED, n_sites as u64)).expect("valid size")
}

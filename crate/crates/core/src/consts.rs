//! Shared tolerances and size caps.

use std::sync::OnceLock;

/// Tolerance for physical identities (normalization, Hermiticity, Born rule).
pub const PHYSICAL_TOL: f64 = 1e-10;

/// Tolerance for purely algebraic re-arrangements of the same quantity.
pub const ALGEBRAIC_TOL: f64 = 1e-12;

/// Default cap on the number of sites of a state vector (2^20 amplitudes).
pub const DEFAULT_MAX_STATE_SITES: usize = 20;

/// Default cap on the number of sites for dense diagonalization.
pub const DEFAULT_MAX_DENSE_SITES: usize = 14;

/// Cap on the number of sites for the matrix-diagonalization sampler.
pub const MAX_MATRIX_SAMPLER_SITES: usize = 8;

/// Maximum order of a connected correlation.
pub const MAX_CUMULANT_ORDER: usize = 6;

/// Environment variable that raises (or lowers) both size caps.
pub const MAX_N_ENV: &str = "CHAOSCORR_MAX_N";

fn env_override() -> Option<usize> {
    static CELL: OnceLock<Option<usize>> = OnceLock::new();
    *CELL.get_or_init(|| {
        std::env::var(MAX_N_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|n| (1..31).contains(n))
    })
}

/// Largest number of sites accepted for a state vector.
pub fn max_state_sites() -> usize {
    env_override().unwrap_or(DEFAULT_MAX_STATE_SITES)
}

/// Largest number of sites accepted for a dense Hamiltonian.
pub fn max_dense_sites() -> usize {
    env_override().unwrap_or(DEFAULT_MAX_DENSE_SITES)
}

//! Experiment harness for `chaoscorr-core`: ensemble sweeps for the VCM
//! extremal eigenvalues and subsystem purities, the check suite comparing
//! ensemble averages with closed forms, level spacings, measurement
//! invariance and the disentangling probe.
//!
//! Every run is a pure function of its [`ExperimentConfig`]; samples are
//! drawn from independent seeded streams and aggregated in index order,
//! so outputs do not depend on the number of threads.

pub mod checks;
pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod figures;
pub mod output;
pub mod plot;
pub mod seeds;
pub mod states;

pub use checks::{run_checks, Check, CheckReport, Rule};
pub use config::{resolve, EnsembleKind, Experiment, ExperimentConfig, Overrides, SubsystemChoice, SCHEMA_VERSION};
pub use error::{HarnessError, Result, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
pub use figures::{run_fig1, run_fig2, Claim, Fig1Result, Fig1Row, Fig2Result, Fig2Row};
pub use plot::emit_plots;
pub use states::{CentralStateCache, ChainKey, HaarSampler, StateProvider, StateSampler};

/// Makes sure OpenBLAS runs with kernels known to give correct
/// eigenvectors.
///
/// The AVX-512 kernels of some OpenBLAS releases return wrong eigenvectors
/// for matrices of dimension 128 and above. OpenBLAS picks its kernels when
/// the library is loaded, so on CPUs with AVX-512 the process re-executes
/// itself once with `OPENBLAS_CORETYPE=Haswell` unless the variable is
/// already set. Eigenpair residuals are verified regardless.
pub fn ensure_reliable_blas() {
    #[cfg(all(unix, target_arch = "x86_64"))]
    {
        use std::os::unix::process::CommandExt;
        const VAR: &str = "OPENBLAS_CORETYPE";
        if std::env::var_os(VAR).is_some() || !std::arch::is_x86_feature_detected!("avx512f") {
            return;
        }
        let Ok(exe) = std::env::current_exe() else { return };
        let err = std::process::Command::new(exe)
            .args(std::env::args_os().skip(1))
            .env(VAR, "Haswell")
            .exec();
        eprintln!("warning: could not re-execute with {VAR}=Haswell: {err}");
    }
}

//! Level spacings, measurement invariance and the disentangling probe.

use chaoscorr_core::local_ops::InvarianceReport;
use chaoscorr_core::spin_chain::{eigenvalues_only, poisson_pdf, pooled_statistics, wigner_surmise_pdf};
use chaoscorr_core::{
    build_hamiltonian, disentangling_cost_probe, invariance_experiment, sample_spec, unfold_and_spacings,
    EnsembleClass, InvarianceConfig, ProbeResult, SampleSeed, SpacingStatistics, StateFamily,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, ReferenceFamily};
use crate::error::Result;
use crate::seeds::{auxiliary_seed, chain_seed, ensemble_seed};

/// KS distances of one disorder realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RealizationSpacing {
    pub realization: u64,
    pub spacings: usize,
    pub ks_distance_goe: f64,
    pub ks_distance_poisson: f64,
}

/// One histogram bin of the pooled unfolded spacings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingBin {
    pub s_lo: f64,
    pub s_hi: f64,
    pub density: f64,
    pub wigner: f64,
    pub poisson: f64,
}

pub const SPACING_COLUMNS: [&str; 5] = ["s_lo", "s_hi", "density", "wigner", "poisson"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingResult {
    pub n_sites: usize,
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "h")]
    pub field: f64,
    pub window_fraction: f64,
    pub realizations: Vec<RealizationSpacing>,
    pub pooled_spacings: usize,
    pub mean_spacing: f64,
    pub ks_distance_goe: f64,
    pub ks_distance_poisson: f64,
    pub closer_to_goe: bool,
    #[serde(skip)]
    pub histogram: Vec<SpacingBin>,
}

pub const HISTOGRAM_BIN_WIDTH: f64 = 0.1;
pub const HISTOGRAM_MAX_S: f64 = 4.0;

/// Unfolded spacings of `realizations` chains, each unfolded on its own
/// and then pooled.
pub fn run_spacing(
    n_sites: usize,
    coupling: f64,
    field: f64,
    master_seed: u64,
    realizations: usize,
    window_fraction: f64,
) -> Result<SpacingResult> {
    let seed = chain_seed(master_seed, n_sites);
    let parts: Vec<SpacingStatistics> = (0..realizations as u64)
        .into_par_iter()
        .map(|k| -> Result<SpacingStatistics> {
            let spec = sample_spec(n_sites, coupling, field, SampleSeed::new(seed, k))?;
            let spectrum = eigenvalues_only(&build_hamiltonian(&spec)?)?;
            Ok(unfold_and_spacings(&spectrum.eigenvalues, window_fraction)?)
        })
        .collect::<Result<_>>()?;
    let pooled = pooled_statistics(&parts);
    let realizations = parts
        .iter()
        .enumerate()
        .map(|(k, p)| RealizationSpacing {
            realization: k as u64,
            spacings: p.unfolded_spacings.len(),
            ks_distance_goe: p.ks_distance_goe,
            ks_distance_poisson: p.ks_distance_poisson,
        })
        .collect();
    Ok(SpacingResult {
        n_sites,
        coupling,
        field,
        window_fraction,
        realizations,
        pooled_spacings: pooled.unfolded_spacings.len(),
        mean_spacing: pooled.mean_spacing(),
        ks_distance_goe: pooled.ks_distance_goe,
        ks_distance_poisson: pooled.ks_distance_poisson,
        closer_to_goe: pooled.closer_to_goe(),
        histogram: histogram(&pooled.unfolded_spacings),
    })
}

fn histogram(spacings: &[f64]) -> Vec<SpacingBin> {
    let bins = (HISTOGRAM_MAX_S / HISTOGRAM_BIN_WIDTH).round() as usize;
    let mut counts = vec![0usize; bins];
    for &s in spacings {
        let b = (s / HISTOGRAM_BIN_WIDTH).floor();
        if b >= 0.0 && (b as usize) < bins {
            counts[b as usize] += 1;
        }
    }
    let total = spacings.len().max(1) as f64;
    counts
        .iter()
        .enumerate()
        .map(|(b, &c)| {
            let s_lo = b as f64 * HISTOGRAM_BIN_WIDTH;
            let s_hi = s_lo + HISTOGRAM_BIN_WIDTH;
            let mid = 0.5 * (s_lo + s_hi);
            SpacingBin {
                s_lo,
                s_hi,
                density: c as f64 / (total * HISTOGRAM_BIN_WIDTH),
                wigner: wigner_surmise_pdf(mid),
                poisson: poisson_pdf(mid),
            }
        })
        .collect()
}

/// One CSV line of the invariance experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceRow {
    pub ensemble: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub mean: f64,
    pub std: f64,
    pub se: f64,
    pub predicted: f64,
    pub z: f64,
    pub agrees: bool,
}

pub const INVARIANCE_COLUMNS: [&str; 9] = [
    "ensemble",
    "N",
    "samples",
    "mean",
    "std",
    "se",
    "predicted",
    "z",
    "agrees",
];

/// Measurement invariance for every random-matrix ensemble of `config`.
pub fn run_invariance(
    config: &ExperimentConfig,
    tag: &str,
    n_sites: usize,
    samples: usize,
) -> Result<Vec<InvarianceReport>> {
    config
        .classes()
        .into_iter()
        .map(|class| {
            let c = InvarianceConfig {
                class,
                n_sites,
                final_sites: config.invariance.final_sites,
                samples,
                statistic: config.invariance.statistic,
                basis: config.invariance.basis,
                master_seed: ensemble_seed(config.master_seed, tag, n_sites, class),
            };
            Ok(invariance_experiment(&c)?)
        })
        .collect()
}

pub fn invariance_rows(reports: &[InvarianceReport]) -> Vec<InvarianceRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.steps.iter().map(move |s| InvarianceRow {
                ensemble: r.config.class.to_string(),
                n: s.n_sites,
                samples: s.summary.sample_count,
                mean: s.summary.mean,
                std: s.summary.std,
                se: s.summary.standard_error,
                predicted: s.summary.prediction.unwrap_or(f64::NAN),
                z: s.summary.z_score.unwrap_or(f64::NAN),
                agrees: s.agrees,
            })
        })
        .collect()
}

/// Starting family of one probe run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeFamily {
    Chaotic(EnsembleClass),
    Reference(ReferenceFamily),
}

impl ProbeFamily {
    pub fn label(self) -> String {
        match self {
            ProbeFamily::Chaotic(class) => class.to_string(),
            ProbeFamily::Reference(ReferenceFamily::Cat) => "cat".into(),
            ProbeFamily::Reference(ReferenceFamily::Product) => "product".into(),
        }
    }

    fn state_family(self) -> StateFamily {
        match self {
            ProbeFamily::Chaotic(class) => StateFamily::Chaotic(class),
            ProbeFamily::Reference(ReferenceFamily::Cat) => StateFamily::Cat,
            ProbeFamily::Reference(ReferenceFamily::Product) => StateFamily::Product,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRun {
    pub family: ProbeFamily,
    pub sample: u64,
    pub n_sites: usize,
    pub max_ops: usize,
    pub result: ProbeResult,
}

/// One CSV line of the disentangling probe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeRow {
    pub family: String,
    pub sample: u64,
    #[serde(rename = "N")]
    pub n: usize,
    pub max_ops: usize,
    /// Empty when the budget was exhausted.
    pub disentangled_after: Option<usize>,
}

pub const PROBE_COLUMNS: [&str; 5] = ["family", "sample", "N", "max_ops", "disentangled_after"];

/// Runs the probe on `samples` states of every family.
pub fn run_probe(
    families: &[ProbeFamily],
    n_sites: usize,
    max_ops: usize,
    samples: usize,
    master_seed: u64,
    tag: &str,
) -> Result<Vec<ProbeRun>> {
    let jobs: Vec<(ProbeFamily, u64)> = families
        .iter()
        .flat_map(|&f| (0..samples as u64).map(move |k| (f, k)))
        .collect();
    jobs.into_par_iter()
        .map(|(family, sample)| -> Result<ProbeRun> {
            let seed = auxiliary_seed(master_seed, tag, &family.label(), n_sites);
            let result =
                disentangling_cost_probe(family.state_family(), n_sites, max_ops, SampleSeed::new(seed, sample))?;
            Ok(ProbeRun {
                family,
                sample,
                n_sites,
                max_ops,
                result,
            })
        })
        .collect()
}

pub fn probe_families(config: &ExperimentConfig) -> Vec<ProbeFamily> {
    config
        .classes()
        .into_iter()
        .map(ProbeFamily::Chaotic)
        .chain(
            config
                .disentangle
                .reference_families
                .iter()
                .map(|&r| ProbeFamily::Reference(r)),
        )
        .collect()
}

pub fn probe_rows(runs: &[ProbeRun]) -> Vec<ProbeRow> {
    runs.iter()
        .map(|r| ProbeRow {
            family: r.family.label(),
            sample: r.sample,
            n: r.n_sites,
            max_ops: r.max_ops,
            disentangled_after: r.result.disentangled_after,
        })
        .collect()
}

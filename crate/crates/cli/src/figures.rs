//! Extremal VCM eigenvalues versus `N`, and subsystem purity versus `m`.

use chaoscorr_core::stats::EnsembleSummary;
use chaoscorr_core::{
    compute_vcm, extremal_eigenvalues, purity_sweep, EnsembleClass, PuritySweepResult, StateVector, SubsystemPolicy,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::{EnsembleKind, ExperimentConfig, SubsystemChoice};
use crate::error::Result;
use crate::seeds::{auxiliary_seed, ensemble_seed};
use crate::states::StateProvider;

/// A yes/no statement about a result, with the numbers behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Claim {
    pub name: String,
    pub key: String,
    pub pass: bool,
    pub detail: String,
}

impl Claim {
    fn new(name: &str, key: impl Into<String>, pass: bool, detail: String) -> Self {
        Self {
            name: name.into(),
            key: key.into(),
            pass,
            detail,
        }
    }
}

/// Means must approach 1 within this many standard deviations at the
/// largest size.
pub const CONCENTRATION_STDS: f64 = 5.0;
/// Chain and random-matrix means must agree within this many combined
/// standard deviations.
pub const AGREEMENT_STDS: f64 = 3.0;
/// Smallest size at which the chain is compared with random matrices.
pub const AGREEMENT_MIN_N: usize = 8;
/// Allowed relative deviation of the chain's purity curve from the
/// closed form for small subsystems.
pub const CHAIN_PURITY_RELATIVE_TOLERANCE: f64 = 0.10;
/// Largest `m` at which the chain's purity curve is compared.
pub const CHAIN_PURITY_MAX_M: usize = 4;
/// Allowed `|z|` of the mean purity against the closed form.
pub const PURITY_SIGMAS: f64 = 3.0;

/// Source of the `k`-th state of `kind` at `N` for `experiment`.
pub fn state_for(
    kind: EnsembleKind,
    experiment: &str,
    n_sites: usize,
    index: u64,
    config: &ExperimentConfig,
    states: &StateProvider,
) -> Result<StateVector> {
    match kind.class() {
        Some(class) => states.random_state(
            class,
            n_sites,
            ensemble_seed(config.master_seed, experiment, n_sites, class),
            index,
        ),
        None => states.chain_state(
            n_sites,
            config.coupling,
            config.field,
            config.master_seed,
            config.selector,
            index,
        ),
    }
}

/// One CSV line of the extremal-eigenvalue sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Row {
    pub ensemble: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub samples: usize,
    pub e_max_mean: f64,
    pub e_max_std: f64,
    pub e_min_mean: f64,
    pub e_min_std: f64,
}

pub const FIG1_COLUMNS: [&str; 7] = [
    "ensemble",
    "N",
    "samples",
    "e_max_mean",
    "e_max_std",
    "e_min_mean",
    "e_min_std",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Group {
    pub ensemble: EnsembleKind,
    pub n_sites: usize,
    pub e_max: EnsembleSummary,
    pub e_min: EnsembleSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig1Result {
    pub groups: Vec<Fig1Group>,
    pub claims: Vec<Claim>,
}

impl Fig1Result {
    pub fn rows(&self) -> Vec<Fig1Row> {
        self.groups
            .iter()
            .map(|g| Fig1Row {
                ensemble: g.ensemble.label().into(),
                n: g.n_sites,
                samples: g.e_max.sample_count,
                e_max_mean: g.e_max.mean,
                e_max_std: g.e_max.std,
                e_min_mean: g.e_min.mean,
                e_min_std: g.e_min.std,
            })
            .collect()
    }

    pub fn group(&self, ensemble: EnsembleKind, n_sites: usize) -> Option<&Fig1Group> {
        self.groups
            .iter()
            .find(|g| g.ensemble == ensemble && g.n_sites == n_sites)
    }

    pub fn all_claims_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

/// Extremal VCM eigenvalues for every ensemble and size of `config`.
pub fn run_fig1(config: &ExperimentConfig, states: &StateProvider) -> Result<Fig1Result> {
    let mut groups = Vec::new();
    for &kind in &config.ensembles {
        let mut sizes = config.n_range.clone();
        sizes.sort_unstable();
        for n in sizes {
            let pairs: Vec<(f64, f64)> = (0..config.samples as u64)
                .into_par_iter()
                .map(|k| -> Result<(f64, f64)> {
                    let state = state_for(kind, "fig1", n, k, config, states)?;
                    Ok(extremal_eigenvalues(&compute_vcm(&state)?)?)
                })
                .collect::<Result<_>>()?;
            let maxima: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let minima: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let key = format!("{kind} N={n}");
            groups.push(Fig1Group {
                ensemble: kind,
                n_sites: n,
                e_max: EnsembleSummary::from_samples("e_max", key.clone(), &maxima),
                e_min: EnsembleSummary::from_samples("e_min", key, &minima),
            });
        }
    }
    let claims = fig1_claims(&groups);
    Ok(Fig1Result { groups, claims })
}

fn fig1_claims(groups: &[Fig1Group]) -> Vec<Claim> {
    let mut claims = Vec::new();
    let of = |kind: EnsembleKind| {
        groups
            .iter()
            .filter(move |g| g.ensemble == kind && g.e_max.sample_count >= 2)
    };
    for kind in [EnsembleKind::Gue, EnsembleKind::Goe] {
        let series: Vec<&Fig1Group> = of(kind).collect();
        if series.len() >= 2 {
            let ns = series
                .iter()
                .map(|g| g.n_sites.to_string())
                .collect::<Vec<_>>()
                .join(",");
            let maxima: Vec<f64> = series.iter().map(|g| g.e_max.mean).collect();
            let minima: Vec<f64> = series.iter().map(|g| g.e_min.mean).collect();
            claims.push(Claim::new(
                "e_max_mean_strictly_decreasing",
                format!("{kind} N={ns}"),
                maxima.windows(2).all(|w| w[1] < w[0]),
                format!("{maxima:?}"),
            ));
            claims.push(Claim::new(
                "e_min_mean_strictly_increasing",
                format!("{kind} N={ns}"),
                minima.windows(2).all(|w| w[1] > w[0]),
                format!("{minima:?}"),
            ));
        }
        if let Some(last) = series.last() {
            for s in [&last.e_max, &last.e_min] {
                let deviation = (s.mean - 1.0).abs();
                claims.push(Claim::new(
                    &format!("{}_concentrates_on_one", s.quantity),
                    format!("{kind} N={}", last.n_sites),
                    deviation <= CONCENTRATION_STDS * s.std,
                    format!(
                        "|mean - 1| = {deviation:.6} vs {CONCENTRATION_STDS} std = {:.6}",
                        CONCENTRATION_STDS * s.std
                    ),
                ));
            }
        }
    }
    let reference = if of(EnsembleKind::Gue).next().is_some() {
        EnsembleKind::Gue
    } else {
        EnsembleKind::Goe
    };
    for chain in of(EnsembleKind::SpinChain).filter(|g| g.n_sites >= AGREEMENT_MIN_N) {
        let Some(rmt) = of(reference).find(|g| g.n_sites == chain.n_sites) else {
            continue;
        };
        for (a, b) in [(&chain.e_max, &rmt.e_max), (&chain.e_min, &rmt.e_min)] {
            let combined = a.std.hypot(b.std);
            let gap = (a.mean - b.mean).abs();
            claims.push(Claim::new(
                &format!("spin_chain_{}_agrees_with_{reference}", a.quantity),
                format!("N={}", chain.n_sites),
                gap <= AGREEMENT_STDS * combined,
                format!(
                    "|Δmean| = {gap:.6} vs {AGREEMENT_STDS} combined std = {:.6}",
                    AGREEMENT_STDS * combined
                ),
            ));
        }
    }
    claims
}

/// One CSV line of the purity sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Row {
    pub source: String,
    pub m: usize,
    pub neg_log2_mean_purity: f64,
    pub std: f64,
    pub analytic: f64,
    pub bound: f64,
}

pub const FIG2_COLUMNS: [&str; 6] = ["source", "m", "neg_log2_mean_purity", "std", "analytic", "bound"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Source {
    pub source: EnsembleKind,
    /// Class whose closed form the curve is compared with; the chain's
    /// eigenstates are real, so it is compared with GOE.
    pub analytic_class: EnsembleClass,
    pub sweep: PuritySweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fig2Result {
    pub n_sites: usize,
    pub sources: Vec<Fig2Source>,
    pub claims: Vec<Claim>,
}

impl Fig2Result {
    pub fn rows(&self) -> Vec<Fig2Row> {
        self.sources
            .iter()
            .flat_map(|s| {
                s.sweep.per_m.iter().map(move |r| Fig2Row {
                    source: s.source.label().into(),
                    m: r.m,
                    neg_log2_mean_purity: r.neg_log2_mean_purity,
                    std: r.neg_log2_std,
                    analytic: r.analytic_neg_log2.expect("every source carries a closed form"),
                    bound: r.bound,
                })
            })
            .collect()
    }

    pub fn source(&self, kind: EnsembleKind) -> Option<&Fig2Source> {
        self.sources.iter().find(|s| s.source == kind)
    }

    pub fn all_claims_pass(&self) -> bool {
        self.claims.iter().all(|c| c.pass)
    }
}

/// Purity of `m`-site subsystems, `m = 1..N-1`, for every ensemble.
pub fn run_fig2(config: &ExperimentConfig, states: &StateProvider) -> Result<Fig2Result> {
    let n = config.single_n()?;
    let m_range: Vec<usize> = (1..n).collect();
    let policy = match config.subsystem {
        SubsystemChoice::Contiguous => SubsystemPolicy::Contiguous,
        SubsystemChoice::Random => SubsystemPolicy::RandomSubset {
            master_seed: auxiliary_seed(config.master_seed, "fig2", "subsystem", n),
        },
    };
    let mut sources = Vec::new();
    for &kind in &config.ensembles {
        let analytic_class = kind.class().unwrap_or(EnsembleClass::Goe);
        let source = |k: u64| -> chaoscorr_core::Result<StateVector> {
            state_for(kind, "fig2", n, k, config, states).map_err(|e| match e {
                crate::error::HarnessError::Core(inner) => inner,
                other => chaoscorr_core::Error::InvalidArgument(other.to_string()),
            })
        };
        let sweep = purity_sweep(source, n, &m_range, config.samples, &policy, Some(analytic_class))?;
        sources.push(Fig2Source {
            source: kind,
            analytic_class,
            sweep,
        });
    }
    let claims = fig2_claims(&sources);
    Ok(Fig2Result {
        n_sites: n,
        sources,
        claims,
    })
}

fn log_scale_se(row: &chaoscorr_core::entanglement::PurityRow) -> f64 {
    row.se_purity / (row.mean_purity * std::f64::consts::LN_2)
}

fn fig2_claims(sources: &[Fig2Source]) -> Vec<Claim> {
    let mut claims = Vec::new();
    for s in sources.iter().filter(|s| s.source.class().is_some()) {
        for row in &s.sweep.per_m {
            let analytic = row.analytic_purity.expect("closed form attached");
            let z = if row.se_purity > 0.0 {
                (row.mean_purity - analytic) / row.se_purity
            } else {
                f64::INFINITY
            };
            claims.push(Claim::new(
                "mean_purity_matches_closed_form",
                format!("{} m={}", s.source, row.m),
                z.abs() <= PURITY_SIGMAS,
                format!("mean {:.8} vs {:.8}, z = {z:.3}", row.mean_purity, analytic),
            ));
        }
    }
    if let (Some(gue), Some(goe)) = (
        sources.iter().find(|s| s.source == EnsembleKind::Gue),
        sources.iter().find(|s| s.source == EnsembleKind::Goe),
    ) {
        for (a, b) in gue.sweep.per_m.iter().zip(&goe.sweep.per_m) {
            let band = log_scale_se(a).hypot(log_scale_se(b));
            let gap = (a.neg_log2_mean_purity - b.neg_log2_mean_purity).abs();
            claims.push(Claim::new(
                "gue_goe_curves_overlap",
                format!("m={}", a.m),
                gap < band,
                format!("|Δ| = {gap:.6} vs combined SE = {band:.6} ({:.2} SE)", gap / band),
            ));
        }
    }
    if let Some(chain) = sources.iter().find(|s| s.source == EnsembleKind::SpinChain) {
        for row in chain.sweep.per_m.iter().filter(|r| r.m <= CHAIN_PURITY_MAX_M) {
            let analytic = row.analytic_neg_log2.expect("closed form attached");
            let relative = (row.neg_log2_mean_purity - analytic).abs() / analytic;
            claims.push(Claim::new(
                "spin_chain_purity_close_to_closed_form",
                format!("m={}", row.m),
                relative <= CHAIN_PURITY_RELATIVE_TOLERANCE,
                format!(
                    "{:.6} vs {analytic:.6}, relative deviation {relative:.4} (limit {CHAIN_PURITY_RELATIVE_TOLERANCE})",
                    row.neg_log2_mean_purity
                ),
            ));
        }
    }
    claims
}

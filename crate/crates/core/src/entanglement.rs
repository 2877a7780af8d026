//! Purity of `m`-site subsystems across an ensemble of states.

use rand::seq::index::sample as sample_indices;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{predicted_purity, purity_leading_expansion, EnsembleClass, SampleSeed, Stream};
use crate::quantum_state::{purity_direct, StateVector};
use crate::stats::{mean, standard_error, std_dev};
use crate::{Error, Result};

/// How subsystem `A` is chosen for each `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemPolicy {
    /// Sites `1..=m`.
    Contiguous,
    /// A fresh uniformly random `m`-subset per sample, drawn from the
    /// sample's own stream of `master_seed`.
    RandomSubset { master_seed: u64 },
    /// One fixed site list per `m`; the list of length `m` is used.
    Explicit(Vec<Vec<usize>>),
}

impl SubsystemPolicy {
    pub fn describe(&self) -> String {
        match self {
            SubsystemPolicy::Contiguous => "contiguous-from-site-1".into(),
            SubsystemPolicy::RandomSubset { master_seed } => format!("random-subset(seed={master_seed})"),
            SubsystemPolicy::Explicit(lists) => format!("explicit{lists:?}"),
        }
    }

    fn sites(&self, m: usize, n_sites: usize, sample_index: u64) -> Result<Vec<usize>> {
        match self {
            SubsystemPolicy::Contiguous => Ok((1..=m).collect()),
            SubsystemPolicy::RandomSubset { master_seed } => {
                // independent stream per (sample, m)
                let key = master_seed ^ (m as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
                let mut rng = SampleSeed::new(key, sample_index).rng(Stream::Subsystem);
                let mut sites: Vec<usize> = sample_indices(&mut rng, n_sites, m)
                    .into_iter()
                    .map(|i| i + 1)
                    .collect();
                sites.sort_unstable();
                Ok(sites)
            }
            SubsystemPolicy::Explicit(lists) => lists
                .iter()
                .find(|l| l.len() == m)
                .cloned()
                .ok_or_else(|| Error::InvalidArgument(format!("explicit policy has no subset of size {m}"))),
        }
    }
}

/// Aggregated purity of `m`-site subsystems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PurityRow {
    pub m: usize,
    pub sample_count: usize,
    pub mean_purity: f64,
    pub std_purity: f64,
    pub se_purity: f64,
    /// `-log₂` of the ensemble-averaged purity.
    pub neg_log2_mean_purity: f64,
    /// Standard deviation of the purity carried to the log scale,
    /// `std / (mean · ln 2)`.
    pub neg_log2_std: f64,
    /// Ensemble average of the per-sample `-log₂ Tr ρ²`.
    pub mean_neg_log2_purity: f64,
    pub std_neg_log2_purity: f64,
    pub analytic_purity: Option<f64>,
    pub analytic_neg_log2: Option<f64>,
    /// `min(m, N - m)`, the largest reachable `-log₂ Tr ρ²`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PuritySweepResult {
    pub n_sites: usize,
    pub subsystem_policy: String,
    pub per_m: Vec<PurityRow>,
}

/// Smallest purity an `m`-site subsystem of an `N`-site pure state can have,
/// `2^{-min(m, N-m)}`.
pub fn purity_bound(m: usize, n_sites: usize) -> Result<f64> {
    if m == 0 || m >= n_sites {
        return Err(Error::InvalidArgument(format!(
            "subsystem size {m} must lie in 1..{n_sites}"
        )));
    }
    Ok((-(m.min(n_sites - m) as f64)).exp2())
}

/// Computes `Tr ρ_m²` for every sample and every `m` in `m_range`, then
/// averages purity first and takes `-log₂` of the average.
///
/// `source(k)` must return the `k`-th sample. Samples are evaluated in
/// parallel and aggregated in index order. When `prediction` is given, each
/// row carries the random-matrix mean purity for that class.
pub fn purity_sweep<F>(
    source: F,
    n_sites: usize,
    m_range: &[usize],
    samples: usize,
    policy: &SubsystemPolicy,
    prediction: Option<EnsembleClass>,
) -> Result<PuritySweepResult>
where
    F: Fn(u64) -> Result<StateVector> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("purity sweep needs at least one sample".into()));
    }
    for &m in m_range {
        if m == 0 || m >= n_sites {
            return Err(Error::InvalidArgument(format!(
                "subsystem size {m} must lie in 1..{n_sites}"
            )));
        }
    }
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let state = source(k)?;
            if state.n_sites() != n_sites {
                return Err(Error::InvalidArgument(format!(
                    "sample {k} has {} sites, expected {n_sites}",
                    state.n_sites()
                )));
            }
            m_range
                .iter()
                .map(|&m| purity_direct(&state, &policy.sites(m, n_sites, k)?))
                .collect()
        })
        .collect::<Result<_>>()?;

    let per_m = m_range
        .iter()
        .enumerate()
        .map(|(col, &m)| {
            let values: Vec<f64> = per_sample.iter().map(|row| row[col]).collect();
            let logs: Vec<f64> = values.iter().map(|p| -p.log2()).collect();
            let mean_purity = mean(&values);
            let std_purity = std_dev(&values);
            let analytic_purity = prediction.map(|class| predicted_purity(m, n_sites - m, class));
            PurityRow {
                m,
                sample_count: values.len(),
                mean_purity,
                std_purity,
                se_purity: standard_error(&values),
                neg_log2_mean_purity: -mean_purity.log2(),
                neg_log2_std: std_purity / (mean_purity * std::f64::consts::LN_2),
                mean_neg_log2_purity: mean(&logs),
                std_neg_log2_purity: std_dev(&logs),
                analytic_purity,
                analytic_neg_log2: analytic_purity.map(|p| -p.log2()),
                bound: m.min(n_sites - m) as f64,
            }
        })
        .collect();
    Ok(PuritySweepResult {
        n_sites,
        subsystem_policy: policy.describe(),
        per_m,
    })
}

/// One line of [`purity_asymptotic_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticRow {
    pub m: usize,
    pub delta_n: usize,
    pub exact: f64,
    pub expansion: f64,
    /// `|exact - expansion| / exact`.
    pub relative_gap: f64,
    /// `exact · d_A - 1`, which the expansion puts at `2^{-ΔN}`.
    pub excess_over_minimum: f64,
}

/// Exact mean purity next to its leading expansion for every cut
/// `m = 1..=N/2`, ordered by decreasing `ΔN = N - 2m`.
pub fn purity_asymptotic_check(n_sites: usize, class: EnsembleClass) -> Result<Vec<AsymptoticRow>> {
    if n_sites < 4 {
        return Err(Error::InvalidArgument(format!(
            "asymptotic check needs N >= 4, got {n_sites}"
        )));
    }
    Ok((1..=n_sites / 2)
        .map(|m| {
            let exact = predicted_purity(m, n_sites - m, class);
            let expansion = purity_leading_expansion(m, n_sites - m);
            AsymptoticRow {
                m,
                delta_n: n_sites - 2 * m,
                exact,
                expansion,
                relative_gap: (exact - expansion).abs() / exact,
                excess_over_minimum: exact * (m as f64).exp2() - 1.0,
            }
        })
        .collect())
}

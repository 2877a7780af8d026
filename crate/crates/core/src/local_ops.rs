//! Single-site unitaries and projective measurements, and the ensemble
//! experiments built on them.
//!
//! Measuring site `l` of an `N`-site state leaves an `(N-1)`-site state in
//! which the remaining sites are relabeled `1..N-1` in their original order.

use nalgebra::Matrix2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{ALGEBRAIC_TOL, PHYSICAL_TOL};
use crate::correlations::compute_vcm;
use crate::ensembles::{
    predicted_moment4, predicted_purity, predicted_vcm_element, random_unit_vector, sample_state, EnsembleClass,
    SampleSeed, Stream,
};
use crate::quantum_state::{make_cat_state, purity_direct, Axis, StateVector};
use crate::stats::EnsembleSummary;
use crate::{Error, Result};

/// Purity deficit below which a bipartition counts as unentangled.
pub const DISENTANGLE_EPSILON: f64 = 1e-6;

/// Agreement threshold, in standard errors, for the invariance experiment.
pub const AGREEMENT_SIGMAS: f64 = 3.0;

pub type LocalUnitary = Matrix2<Complex64>;

fn unitarity_defect(u: &LocalUnitary) -> f64 {
    (u.adjoint() * u - LocalUnitary::identity())
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max)
}

fn check_unitary(u: &LocalUnitary) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > PHYSICAL_TOL {
        Err(Error::NotUnitary(defect))
    } else {
        Ok(())
    }
}

/// Applies the 2×2 unitary `u` to site `site`.
pub fn apply_local_unitary(state: &StateVector, site: usize, u: &LocalUnitary) -> Result<StateVector> {
    state.check_site(site)?;
    check_unitary(u)?;
    let bit = 1usize << (site - 1);
    let mut out = state.amplitudes().to_vec();
    for i in (0..state.dim()).filter(|i| i & bit == 0) {
        let a = out[i];
        let b = out[i | bit];
        out[i] = u[(0, 0)] * a + u[(0, 1)] * b;
        out[i | bit] = u[(1, 0)] * a + u[(1, 1)] * b;
    }
    Ok(StateVector::new_unchecked(state.n_sites(), out))
}

/// Haar-random element of U(2).
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> LocalUnitary {
    let mut g = || -> f64 { rng.sample(StandardNormal) };
    let a = Complex64::new(g(), g());
    let b = Complex64::new(g(), g());
    let norm = (a.norm_sqr() + b.norm_sqr()).sqrt();
    let (a, b) = (a / norm, b / norm);
    let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * rng.random::<f64>());
    LocalUnitary::new(a, -b.conj(), b, a.conj()) * phase
}

/// Haar-random element of O(2).
pub fn random_orthogonal<R: Rng + ?Sized>(rng: &mut R) -> LocalUnitary {
    let t = std::f64::consts::TAU * rng.random::<f64>();
    let (s, c) = t.sin_cos();
    let det = if rng.random::<bool>() { 1.0 } else { -1.0 };
    let r = |x: f64| Complex64::new(x, 0.0);
    LocalUnitary::new(r(c), r(-s * det), r(s), r(c * det))
}

/// Random local basis that preserves the symmetry class: U(2) for GUE,
/// O(2) for GOE (so real states stay real).
pub fn random_local_basis<R: Rng + ?Sized>(class: EnsembleClass, rng: &mut R) -> LocalUnitary {
    match class {
        EnsembleClass::Gue => haar_unitary(rng),
        EnsembleClass::Goe => random_orthogonal(rng),
    }
}

/// How the measurement outcome is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeasurementMode {
    /// Born-rule sampling: outcome 0 iff `uniform < p_0`.
    Sample { uniform: f64 },
    /// Post-select the given outcome; fails if its probability is below
    /// `1e-12`.
    Forced(u8),
}

#[derive(Debug, Clone)]
pub struct MeasurementRecord {
    pub site: usize,
    /// Columns are the measured basis vectors.
    pub basis: LocalUnitary,
    pub outcome: u8,
    pub probability: f64,
    /// Probabilities of outcomes 0 and 1.
    pub probabilities: [f64; 2],
    /// Remaining `N-1` sites, relabeled in order.
    pub post_state: StateVector,
}

/// Projective measurement of `site` in the basis given by the columns of
/// `basis`. The post-state is the renormalized slice of the coefficients
/// with the measured site fixed to the outcome (after rotating the site
/// into the measured basis).
pub fn projective_measure(
    state: &StateVector,
    site: usize,
    basis: &LocalUnitary,
    mode: MeasurementMode,
) -> Result<MeasurementRecord> {
    state.check_site(site)?;
    check_unitary(basis)?;
    if state.n_sites() < 2 {
        return Err(Error::InvalidArgument(
            "cannot factor out the only remaining site".into(),
        ));
    }
    let n = state.n_sites();
    let bit = 1usize << (site - 1);
    let low_mask = bit - 1;
    let half = state.dim() / 2;
    let amps = state.amplitudes();
    let is_computational = *basis == LocalUnitary::identity();
    // slices[k][j]: amplitude of reduced index j with the site in basis state k
    let (slice0, slice1): (Vec<Complex64>, Vec<Complex64>) = (0..half)
        .map(|j| {
            let i0 = (j & low_mask) | ((j & !low_mask) << 1);
            let (a, b) = (amps[i0], amps[i0 | bit]);
            if is_computational {
                (a, b)
            } else {
                (
                    basis[(0, 0)].conj() * a + basis[(1, 0)].conj() * b,
                    basis[(0, 1)].conj() * a + basis[(1, 1)].conj() * b,
                )
            }
        })
        .unzip();
    let slices = [slice0, slice1];
    let probabilities = [
        crate::quantum_state::squared_norm(&slices[0]),
        crate::quantum_state::squared_norm(&slices[1]),
    ];
    let outcome: u8 = match mode {
        MeasurementMode::Sample { uniform } => {
            if !(0.0..1.0).contains(&uniform) {
                return Err(Error::InvalidArgument(format!("uniform draw {uniform} not in [0, 1)")));
            }
            u8::from(uniform >= probabilities[0] / (probabilities[0] + probabilities[1]))
        }
        MeasurementMode::Forced(k @ (0 | 1)) => k,
        MeasurementMode::Forced(k) => return Err(Error::InvalidArgument(format!("outcome must be 0 or 1, got {k}"))),
    };
    let probability = probabilities[outcome as usize];
    if probability < ALGEBRAIC_TOL {
        return Err(Error::ImpossibleOutcome { outcome, probability });
    }
    let [s0, s1] = slices;
    let slice = if outcome == 0 { s0 } else { s1 };
    let post_state = StateVector::from_unnormalized(n - 1, slice)?;
    Ok(MeasurementRecord {
        site,
        basis: *basis,
        outcome,
        probability,
        probabilities,
        post_state,
    })
}

/// Statistic tracked through the invariance experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InvarianceStatistic {
    /// Purity of sites `1..=m`.
    MeanPurity { m: usize },
    /// Mean over components of `|c_i|⁴`.
    FourthMoment,
    /// Mean VCM diagonal entry over the axes the closed form covers
    /// (all three for GUE; `x` and `z` for GOE, whose `y` entries are 1).
    VcmMeanDiagonal,
}

impl InvarianceStatistic {
    fn evaluate(&self, class: EnsembleClass, state: &StateVector) -> Result<f64> {
        match *self {
            InvarianceStatistic::MeanPurity { m } => purity_direct(state, &(1..=m).collect::<Vec<_>>()),
            InvarianceStatistic::FourthMoment => {
                Ok(state.amplitudes().iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>() / state.dim() as f64)
            }
            InvarianceStatistic::VcmMeanDiagonal => Ok(compute_vcm(state)?.mean_diagonal(vcm_axes(class))),
        }
    }

    fn predict(&self, class: EnsembleClass, n_sites: usize) -> f64 {
        match *self {
            InvarianceStatistic::MeanPurity { m } => predicted_purity(m, n_sites - m, class),
            InvarianceStatistic::FourthMoment => predicted_moment4(1 << n_sites, class),
            InvarianceStatistic::VcmMeanDiagonal => predicted_vcm_element(n_sites, class),
        }
    }
}

/// Axes whose mean VCM diagonal follows the closed form for `class`.
pub fn vcm_axes(class: EnsembleClass) -> &'static [Axis] {
    match class {
        EnsembleClass::Gue => &Axis::ALL,
        EnsembleClass::Goe => &[Axis::X, Axis::Z],
    }
}

/// Measurement basis used in the invariance experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    Computational,
    /// Fresh random local basis per measurement (see [`random_local_basis`]).
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceConfig {
    pub class: EnsembleClass,
    pub n_sites: usize,
    /// Keep measuring the last site until this many sites remain.
    pub final_sites: usize,
    pub samples: usize,
    pub statistic: InvarianceStatistic,
    pub basis: BasisChoice,
    pub master_seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceStep {
    /// Sites left after this round of measurements.
    pub n_sites: usize,
    pub summary: EnsembleSummary,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceReport {
    pub config: InvarianceConfig,
    pub steps: Vec<InvarianceStep>,
    pub all_agree: bool,
}

/// Samples `N`-site states, repeatedly measures the last site with
/// Born-sampled outcomes, and compares the statistic of the post-measurement
/// states with the `(N-k)`-site random-matrix prediction after every step.
pub fn invariance_experiment(config: &InvarianceConfig) -> Result<InvarianceReport> {
    let InvarianceConfig {
        class,
        n_sites,
        final_sites,
        samples,
        statistic,
        basis,
        master_seed,
    } = *config;
    if final_sites == 0 || final_sites >= n_sites {
        return Err(Error::InvalidArgument(format!(
            "final_sites must lie in 1..{n_sites}, got {final_sites}"
        )));
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if let InvarianceStatistic::MeanPurity { m } = statistic {
        if m == 0 || m >= final_sites {
            return Err(Error::InvalidArgument(format!(
                "purity subsystem {m} must be smaller than {final_sites}"
            )));
        }
    }
    let steps = n_sites - final_sites;
    let per_sample: Vec<Vec<f64>> = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<Vec<f64>> {
            let seed = SampleSeed::new(master_seed, k);
            let mut state = sample_state(class, n_sites, seed)?;
            let mut outcomes = seed.rng(Stream::Measurement);
            let mut bases = seed.rng(Stream::LocalBasis);
            let mut values = Vec::with_capacity(steps);
            for _ in 0..steps {
                let u = match basis {
                    BasisChoice::Computational => LocalUnitary::identity(),
                    BasisChoice::Random => random_local_basis(class, &mut bases),
                };
                let site = state.n_sites();
                let mode = MeasurementMode::Sample {
                    uniform: outcomes.random(),
                };
                state = projective_measure(&state, site, &u, mode)?.post_state;
                values.push(statistic.evaluate(class, &state)?);
            }
            Ok(values)
        })
        .collect::<Result<_>>()?;

    let steps: Vec<InvarianceStep> = (0..steps)
        .map(|step| {
            let n_left = n_sites - step - 1;
            let values: Vec<f64> = per_sample.iter().map(|v| v[step]).collect();
            let summary = EnsembleSummary::from_samples(format!("{statistic:?}"), format!("N={n_left}"), &values)
                .with_prediction(statistic.predict(class, n_left));
            let agrees = summary.agrees_within(AGREEMENT_SIGMAS);
            InvarianceStep {
                n_sites: n_left,
                summary,
                agrees,
            }
        })
        .collect();
    let all_agree = steps.iter().all(|s| s.agrees);
    Ok(InvarianceReport {
        config: config.clone(),
        steps,
        all_agree,
    })
}

/// Starting states for [`disentangling_cost_probe`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateFamily {
    Chaotic(EnsembleClass),
    Cat,
    Product,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeStep {
    pub measurements: usize,
    pub n_sites: usize,
    /// Largest `1 - Tr ρ_A²` over all bipartitions of the remaining sites.
    pub max_purity_deficit: f64,
    /// Purity of sites `1..=⌊n/2⌋`, when at least two sites remain.
    pub half_cut_purity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    /// Measurements after which every bipartition was within `ε` of pure,
    /// or `None` if `max_ops` measurements did not get there.
    pub disentangled_after: Option<usize>,
    pub history: Vec<ProbeStep>,
}

/// Largest purity deficit over all bipartitions `A | B` of `state`.
pub fn max_purity_deficit(state: &StateVector) -> Result<f64> {
    let n = state.n_sites();
    let mut worst = 0.0f64;
    // A always contains site 1; every bipartition appears once.
    for mask in 0..(1usize << (n - 1)) - 1 {
        let sites: Vec<usize> = std::iter::once(1)
            .chain((2..=n).filter(|s| mask & (1 << (s - 2)) != 0))
            .collect();
        worst = worst.max(1.0 - purity_direct(state, &sites)?);
    }
    Ok(worst)
}

fn probe_step(measurements: usize, state: &StateVector, deficit: f64) -> Result<ProbeStep> {
    let n = state.n_sites();
    let half_cut_purity = if n >= 2 {
        Some(purity_direct(state, &(1..=n / 2).collect::<Vec<_>>())?)
    } else {
        None
    };
    Ok(ProbeStep {
        measurements,
        n_sites: n,
        max_purity_deficit: deficit,
        half_cut_purity,
    })
}

/// Measures sites one at a time (computational basis, Born-sampled
/// outcomes) until every bipartition of the remaining state is within
/// [`DISENTANGLE_EPSILON`] of pure. Each round greedily picks the site
/// whose measurement leaves the smallest maximal purity deficit, trying all
/// sites with the same outcome draw.
///
/// Only fixed-basis measurements are explored; adaptive bases are not.
pub fn disentangling_cost_probe(
    family: StateFamily,
    n_sites: usize,
    max_ops: usize,
    seed: SampleSeed,
) -> Result<ProbeResult> {
    if max_ops > n_sites {
        return Err(Error::InvalidArgument(format!(
            "max_ops {max_ops} exceeds N = {n_sites}"
        )));
    }
    if n_sites > 14 {
        return Err(Error::CapExceeded {
            what: "n_sites (disentangling probe)",
            value: n_sites,
            cap: 14,
        });
    }
    let mut state = match family {
        StateFamily::Chaotic(class) => random_unit_vector(class, n_sites, &mut seed.rng(Stream::State)),
        StateFamily::Cat => make_cat_state(n_sites)?,
        StateFamily::Product => StateVector::all_up(n_sites)?,
    };
    let mut outcomes = seed.rng(Stream::Measurement);
    let mut deficit = max_purity_deficit(&state)?;
    let mut history = vec![probe_step(0, &state, deficit)?];
    for k in 1..=max_ops {
        if deficit < DISENTANGLE_EPSILON {
            break;
        }
        let mode = MeasurementMode::Sample {
            uniform: outcomes.random(),
        };
        let mut best: Option<(f64, StateVector)> = None;
        for site in 1..=state.n_sites() {
            let post = projective_measure(&state, site, &LocalUnitary::identity(), mode)?.post_state;
            let d = max_purity_deficit(&post)?;
            if best.as_ref().is_none_or(|(bd, _)| d < *bd) {
                best = Some((d, post));
            }
        }
        let (d, post) = best.expect("at least two sites remain while entangled");
        state = post;
        deficit = d;
        history.push(probe_step(k, &state, deficit)?);
    }
    let disentangled_after = (deficit < DISENTANGLE_EPSILON).then(|| history.last().map_or(0, |s| s.measurements));
    Ok(ProbeResult {
        disentangled_after,
        history,
    })
}

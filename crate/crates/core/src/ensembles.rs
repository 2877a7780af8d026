//! Random-matrix eigenvector sampling and the closed-form ensemble averages
//! the measurements are checked against.
//!
//! Eigenvectors of GUE (GOE) matrices are uniformly distributed on the
//! complex (real) unit sphere, independently of the eigenvalue they belong
//! to. [`sample_state`] draws them directly as normalized Gaussian vectors.
//! [`sample_state_via_matrix`] diagonalizes a full random matrix instead and
//! is kept only to cross-validate the direct sampler.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::MAX_MATRIX_SAMPLER_SITES;
use crate::linalg::{hermitian_eigen, symmetric_eigen};
use crate::quantum_state::{check_state_sites, StateVector};
use crate::stats::EnsembleSummary;
use crate::{Error, Result};

/// Symmetry class of the random-matrix ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleClass {
    #[serde(rename = "GUE")]
    Gue,
    #[serde(rename = "GOE")]
    Goe,
}

impl EnsembleClass {
    pub const ALL: [EnsembleClass; 2] = [EnsembleClass::Gue, EnsembleClass::Goe];

    /// 0 for GUE, 1 for GOE.
    pub fn q(self) -> u32 {
        match self {
            EnsembleClass::Gue => 0,
            EnsembleClass::Goe => 1,
        }
    }

    fn qf(self) -> f64 {
        f64::from(self.q())
    }
}

impl fmt::Display for EnsembleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnsembleClass::Gue => "GUE",
            EnsembleClass::Goe => "GOE",
        })
    }
}

impl FromStr for EnsembleClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(EnsembleClass::Gue),
            "goe" => Ok(EnsembleClass::Goe),
            other => Err(Error::InvalidArgument(format!("unknown ensemble class '{other}'"))),
        }
    }
}

/// Independent random streams derived from one seed. Each purpose gets its
/// own key so that, e.g., measurement outcomes never reuse state draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stream {
    State = 1,
    SpinChainSpec = 2,
    Measurement = 3,
    Subsystem = 4,
    LocalBasis = 5,
    MatrixSampler = 6,
    Auxiliary = 7,
}

/// Identifies one sample of an ensemble run.
///
/// The random stream is a pure function of `(master_seed, sample_index)`:
/// a ChaCha key built from the master seed and stream purpose, with the
/// sample index selecting the ChaCha stream. Samples can therefore be drawn
/// in any order or in parallel without changing results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SampleSeed {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SampleSeed {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            master_seed,
            sample_index,
        }
    }

    pub fn rng(&self, stream: Stream) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&self.master_seed.to_le_bytes());
        key[8..16].copy_from_slice(&(stream as u64).to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(self.sample_index);
        rng
    }
}

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniformly random unit vector of the ensemble's symmetry class.
pub fn sample_state(class: EnsembleClass, n_sites: usize, seed: SampleSeed) -> Result<StateVector> {
    check_state_sites(n_sites)?;
    let mut rng = seed.rng(Stream::State);
    Ok(random_unit_vector(class, n_sites, &mut rng))
}

pub(crate) fn random_unit_vector<R: Rng + ?Sized>(class: EnsembleClass, n_sites: usize, rng: &mut R) -> StateVector {
    let dim = 1usize << n_sites;
    let amplitudes: Vec<Complex64> = match class {
        EnsembleClass::Gue => (0..dim).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect(),
        EnsembleClass::Goe => (0..dim).map(|_| Complex64::new(gaussian(rng), 0.0)).collect(),
    };
    StateVector::from_unnormalized(n_sites, amplitudes).expect("a Gaussian vector is non-zero with probability 1")
}

/// Eigenvector of a freshly drawn `2^N × 2^N` GUE/GOE matrix, chosen
/// uniformly among all eigenvectors and multiplied by a random phase (sign
/// for GOE). Capped at 8 sites.
pub fn sample_state_via_matrix(class: EnsembleClass, n_sites: usize, seed: SampleSeed) -> Result<StateVector> {
    check_state_sites(n_sites)?;
    if n_sites > MAX_MATRIX_SAMPLER_SITES {
        return Err(Error::CapExceeded {
            what: "n_sites (matrix sampler)",
            value: n_sites,
            cap: MAX_MATRIX_SAMPLER_SITES,
        });
    }
    let dim = 1usize << n_sites;
    let mut rng = seed.rng(Stream::MatrixSampler);
    let pick = rng.random_range(0..dim);
    let amplitudes: Vec<Complex64> = match class {
        EnsembleClass::Gue => {
            let mut h = DMatrix::<Complex64>::zeros(dim, dim);
            for j in 0..dim {
                h[(j, j)] = Complex64::new(gaussian(&mut rng), 0.0);
                for i in j + 1..dim {
                    let v = Complex64::new(gaussian(&mut rng), gaussian(&mut rng)) * std::f64::consts::FRAC_1_SQRT_2;
                    h[(i, j)] = v;
                    h[(j, i)] = v.conj();
                }
            }
            let (_, vectors) = hermitian_eigen(&h)?;
            let phase = Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
            vectors.column(pick).iter().map(|z| z * phase).collect()
        }
        EnsembleClass::Goe => {
            let mut h = DMatrix::<f64>::zeros(dim, dim);
            for j in 0..dim {
                h[(j, j)] = gaussian(&mut rng) * std::f64::consts::SQRT_2;
                for i in j + 1..dim {
                    let v = gaussian(&mut rng);
                    h[(i, j)] = v;
                    h[(j, i)] = v;
                }
            }
            let (_, vectors) = symmetric_eigen(&h)?;
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            vectors
                .column(pick)
                .iter()
                .map(|&x| Complex64::new(sign * x, 0.0))
                .collect()
        }
    };
    StateVector::from_unnormalized(n_sites, amplitudes)
}

fn pow2(n: usize) -> f64 {
    (n as f64).exp2()
}

/// Ensemble mean of `|c_i|²` in dimension `d`: `1/d`.
pub fn predicted_moment2(d: usize) -> f64 {
    1.0 / d as f64
}

/// Ensemble mean of `|c_i|⁴`: `(2+q) / (d(d+1+q))`.
pub fn predicted_moment4(d: usize, class: EnsembleClass) -> f64 {
    let d = d as f64;
    let q = class.qf();
    (2.0 + q) / (d * (d + 1.0 + q))
}

/// Ensemble mean of `|c_i|²|c_j|²` for `i ≠ j`: `1 / (d(d+1+q))`.
pub fn predicted_cross_moment(d: usize, class: EnsembleClass) -> f64 {
    let d = d as f64;
    1.0 / (d * (d + 1.0 + class.qf()))
}

/// Mean diagonal VCM element `2^N / (2^N + 1 + q)`. The predicted mean of
/// every off-diagonal element is zero.
///
/// For GOE this holds for the `x` and `z` axes only: real states have
/// `⟨σ_y⟩ = 0` identically, so their `y` diagonal entries are exactly 1.
pub fn predicted_vcm_element(n_sites: usize, class: EnsembleClass) -> f64 {
    let d = pow2(n_sites);
    d / (d + 1.0 + class.qf())
}

/// Mean of `|⟨σ_α(l)σ_β(l')⟩|²` for `l ≠ l'`: `(1+q) / (2^N + 1 + q)`.
///
/// For GOE this holds for axis pairs with an even number of `y` factors;
/// the others vanish identically on real states.
pub fn predicted_sq_correlation(n_sites: usize, class: EnsembleClass) -> f64 {
    let q = class.qf();
    (1.0 + q) / (pow2(n_sites) + 1.0 + q)
}

/// Mean purity of an `n_a | n_b` bipartition:
/// `(d_A + d_B + q) / (d_A d_B + 1 + q)`.
pub fn predicted_purity(n_a_sites: usize, n_b_sites: usize, class: EnsembleClass) -> f64 {
    let da = pow2(n_a_sites);
    let db = pow2(n_b_sites);
    let q = class.qf();
    (da + db + q) / (da * db + 1.0 + q)
}

/// Leading large-dimension form of [`predicted_purity`]:
/// `(1/d_A)(1 + 2^{-ΔN})` with `d_A` the smaller side and `ΔN = |N_B - N_A|`.
pub fn purity_leading_expansion(n_a_sites: usize, n_b_sites: usize) -> f64 {
    let small = n_a_sites.min(n_b_sites);
    let delta = n_a_sites.abs_diff(n_b_sites);
    (1.0 + pow2(delta).recip()) / pow2(small)
}

/// Empirical amplitude moments of an ensemble of states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentStatistics {
    /// `Σ|c_i|²` per state, predicted 1.
    pub norm: EnsembleSummary,
    /// `|c_k|²` with `k` cycling through the components with the sample index.
    pub moment2: EnsembleSummary,
    /// Per-state mean of `|c_i|⁴` over all components.
    pub moment4: EnsembleSummary,
    /// `|c_k|²|c_{k+1}|²` with `k` cycling as for `moment2`.
    pub cross: EnsembleSummary,
}

/// Collects the amplitude moments of `samples` states drawn from `source`
/// and attaches the random-matrix predictions for `class`.
pub fn moment_statistics<F>(class: EnsembleClass, n_sites: usize, samples: usize, source: F) -> Result<MomentStatistics>
where
    F: Fn(u64) -> Result<StateVector> + Sync,
{
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let d = 1usize << n_sites;
    let rows: Vec<[f64; 4]> = (0..samples as u64)
        .into_par_iter()
        .map(|k| -> Result<[f64; 4]> {
            let state = source(k)?;
            if state.n_sites() != n_sites {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    actual: state.dim(),
                });
            }
            let p: Vec<f64> = state.amplitudes().iter().map(|c| c.norm_sqr()).collect();
            let i = k as usize % d;
            let fourth: f64 = p.iter().map(|x| x * x).sum::<f64>() / d as f64;
            Ok([p.iter().sum(), p[i], fourth, p[i] * p[(i + 1) % d]])
        })
        .collect::<Result<_>>()?;
    let column = |c: usize| rows.iter().map(|r| r[c]).collect::<Vec<f64>>();
    let key = format!("{class} N={n_sites}");
    Ok(MomentStatistics {
        norm: EnsembleSummary::from_samples("norm", key.clone(), &column(0)).with_prediction(1.0),
        moment2: EnsembleSummary::from_samples("moment2", key.clone(), &column(1))
            .with_prediction(predicted_moment2(d)),
        moment4: EnsembleSummary::from_samples("moment4", key.clone(), &column(2))
            .with_prediction(predicted_moment4(d, class)),
        cross: EnsembleSummary::from_samples("cross_moment", key, &column(3))
            .with_prediction(predicted_cross_moment(d, class)),
    })
}

//! Spectral unfolding and nearest-neighbour spacing statistics.
//!
//! The levels in the central part of the spectrum are mapped through a
//! smooth fit of the integrated density of states (the staircase function),
//! so that the unfolded levels have unit mean spacing. The spacing
//! distribution is then compared with the GOE Wigner surmise and the
//! Poisson law through Kolmogorov-Smirnov distances.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::stats::ks_distance;
use crate::{Error, Result};

/// Fraction of the spectrum (centred) kept for statistics by default.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.5;

/// Degree of the polynomial fitted to the staircase.
pub const UNFOLDING_DEGREE: usize = 9;

/// Minimum number of levels left after windowing.
pub const MIN_LEVELS: usize = 64;

/// `P(s) = (π/2) s exp(-πs²/4)`.
pub fn wigner_surmise_pdf(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        0.5 * PI * s * (-0.25 * PI * s * s).exp()
    }
}

pub fn wigner_surmise_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -(-0.25 * PI * s * s).exp_m1()
    }
}

pub fn poisson_pdf(s: f64) -> f64 {
    if s < 0.0 {
        0.0
    } else {
        (-s).exp()
    }
}

pub fn poisson_cdf(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else {
        -(-s).exp_m1()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpacingStatistics {
    pub unfolded_spacings: Vec<f64>,
    pub ks_distance_goe: f64,
    pub ks_distance_poisson: f64,
}

impl SpacingStatistics {
    pub fn from_spacings(unfolded_spacings: Vec<f64>) -> Self {
        let ks_distance_goe = ks_distance(&unfolded_spacings, wigner_surmise_cdf);
        let ks_distance_poisson = ks_distance(&unfolded_spacings, poisson_cdf);
        Self {
            unfolded_spacings,
            ks_distance_goe,
            ks_distance_poisson,
        }
    }

    pub fn mean_spacing(&self) -> f64 {
        crate::stats::mean(&self.unfolded_spacings)
    }

    /// True when the spacings look more like the Wigner surmise than Poisson.
    pub fn closer_to_goe(&self) -> bool {
        self.ks_distance_goe < self.ks_distance_poisson
    }
}

/// Merges the unfolded spacings of several spectra (each unfolded on its
/// own) and recomputes the KS distances on the pooled sample.
pub fn pooled_statistics<'a>(parts: impl IntoIterator<Item = &'a SpacingStatistics>) -> SpacingStatistics {
    let spacings = parts
        .into_iter()
        .flat_map(|p| p.unfolded_spacings.iter().copied())
        .collect();
    SpacingStatistics::from_spacings(spacings)
}

/// Chebyshev polynomials `T_0..=T_degree` at `t`.
fn chebyshev_row(t: f64, degree: usize, row: &mut [f64]) {
    row[0] = 1.0;
    if degree >= 1 {
        row[1] = t;
    }
    for k in 2..=degree {
        row[k] = 2.0 * t * row[k - 1] - row[k - 2];
    }
}

/// Keeps the central `window_fraction` of the sorted levels, fits the
/// staircase with a degree-9 polynomial and returns the consecutive
/// differences of the unfolded levels.
pub fn unfold_and_spacings(eigenvalues: &[f64], window_fraction: f64) -> Result<SpacingStatistics> {
    if !(window_fraction > 0.0 && window_fraction <= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "window fraction {window_fraction} not in (0, 1]"
        )));
    }
    if eigenvalues.iter().any(|e| !e.is_finite()) {
        return Err(Error::InvalidArgument("eigenvalues must be finite".into()));
    }
    let mut levels = eigenvalues.to_vec();
    levels.sort_by(f64::total_cmp);
    let total = levels.len();
    let count = ((total as f64) * window_fraction).round() as usize;
    if count < MIN_LEVELS {
        return Err(Error::TooFewLevels {
            needed: MIN_LEVELS,
            got: count,
        });
    }
    let start = (total - count) / 2;
    let window = &levels[start..start + count];

    let lo = window[0];
    let hi = window[count - 1];
    let half = 0.5 * (hi - lo);
    if half.is_nan() || half <= 0.0 {
        return Err(Error::InvalidArgument("all levels in the window coincide".into()));
    }
    let mid = 0.5 * (hi + lo);
    let ts: Vec<f64> = window.iter().map(|e| ((e - mid) / half).clamp(-1.0, 1.0)).collect();

    let degree = UNFOLDING_DEGREE.min(count - 1);
    let mut design = DMatrix::<f64>::zeros(count, degree + 1);
    let mut row = vec![0.0; degree + 1];
    for (k, &t) in ts.iter().enumerate() {
        chebyshev_row(t, degree, &mut row);
        for (c, v) in row.iter().enumerate() {
            design[(k, c)] = *v;
        }
    }
    let staircase = DVector::from_iterator(count, (0..count).map(|k| (start + k) as f64));
    let coefficients = design
        .clone()
        .svd(true, true)
        .solve(&staircase, 1e-14)
        .map_err(|e| Error::InvalidArgument(format!("staircase fit failed: {e}")))?;
    let unfolded = &design * coefficients;
    let spacings: Vec<f64> = unfolded.as_slice().windows(2).map(|w| w[1] - w[0]).collect();
    Ok(SpacingStatistics::from_spacings(spacings))
}

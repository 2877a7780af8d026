//! Order-stable aggregation of per-sample values.
//!
//! All sums use Neumaier compensation and consume samples in the order they
//! are given, so a fixed sample ordering yields bit-identical results no
//! matter how the samples were produced.

use serde::{Deserialize, Serialize};

/// Compensated (Neumaier) running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

impl FromIterator<f64> for NeumaierSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = NeumaierSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

pub fn compensated_sum(values: &[f64]) -> f64 {
    values.iter().copied().collect::<NeumaierSum>().value()
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    compensated_sum(values) / values.len() as f64
}

/// Sample standard deviation (Bessel-corrected); zero for a single sample.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(values);
    let ss: NeumaierSum = values.iter().map(|x| (x - m) * (x - m)).collect();
    (ss.value() / (n - 1) as f64).sqrt()
}

pub fn standard_error(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    std_dev(values) / (values.len() as f64).sqrt()
}

/// Per-group aggregate of one measured quantity, optionally next to its
/// analytic prediction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSummary {
    pub quantity: String,
    pub key: String,
    pub sample_count: usize,
    pub mean: f64,
    pub std: f64,
    pub standard_error: f64,
    pub prediction: Option<f64>,
    pub z_score: Option<f64>,
}

impl EnsembleSummary {
    pub fn from_samples(quantity: impl Into<String>, key: impl Into<String>, values: &[f64]) -> Self {
        Self {
            quantity: quantity.into(),
            key: key.into(),
            sample_count: values.len(),
            mean: mean(values),
            std: std_dev(values),
            standard_error: standard_error(values),
            prediction: None,
            z_score: None,
        }
    }

    /// Attach an analytic prediction and compute `(mean - prediction) / SE`.
    ///
    /// A vanishing standard error gives `z = 0` when the mean hits the
    /// prediction exactly and an infinite `z` otherwise.
    pub fn with_prediction(mut self, prediction: f64) -> Self {
        self.prediction = Some(prediction);
        let diff = self.mean - prediction;
        self.z_score = Some(if self.standard_error > 0.0 {
            diff / self.standard_error
        } else if diff == 0.0 {
            0.0
        } else {
            diff.signum() * f64::INFINITY
        });
        self
    }

    /// True when the mean lies within `n_se` standard errors of the prediction.
    pub fn agrees_within(&self, n_se: f64) -> bool {
        self.z_score.is_some_and(|z| z.abs() <= n_se)
    }
}

/// Two-sided Kolmogorov-Smirnov distance between the empirical distribution
/// of `samples` and the continuous CDF `cdf`.
pub fn ks_distance(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            let lo = f - i as f64 / n;
            let hi = (i + 1) as f64 / n - f;
            lo.max(hi)
        })
        .fold(0.0, f64::max)
}

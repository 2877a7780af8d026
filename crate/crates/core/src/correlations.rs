//! Two-point and multi-point correlations of single-site Pauli observables.
//!
//! The variance-covariance matrix (VCM) collects the connected two-point
//! functions `V[αl, βl'] = ⟨δσ_α(l) δσ_β(l')⟩` with `δσ = σ - ⟨σ⟩`. Rows and
//! columns are site-major: index `3(l-1) + axis`, axes ordered `x, y, z`.
//!
//! Observables use the Pauli normalization `Tr[σ_α σ_β] = 2 δ_αβ`; a product
//! state then has a VCM with largest eigenvalue 2.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::consts::{MAX_CUMULANT_ORDER, PHYSICAL_TOL};
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect};
use crate::quantum_state::{
    check_state_sites, partial_trace, pauli_expectation, Axis, LocalObservable, PauliString, StateVector,
};
use crate::stats::EnsembleSummary;
use crate::{Error, Result};

/// `3N × 3N` Hermitian matrix of connected two-point functions.
#[derive(Debug, Clone, PartialEq)]
pub struct VarianceCovarianceMatrix {
    n_sites: usize,
    matrix: DMatrix<Complex64>,
    bloch: Vec<[f64; 3]>,
}

impl VarianceCovarianceMatrix {
    pub fn index(site: usize, axis: Axis) -> usize {
        3 * (site - 1) + axis.index()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn entry(&self, site_a: usize, axis_a: Axis, site_b: usize, axis_b: Axis) -> Complex64 {
        self.matrix[(Self::index(site_a, axis_a), Self::index(site_b, axis_b))]
    }

    /// Single-site Bloch vectors `⟨σ⃗(l)⟩`, indexed by `l - 1`.
    pub fn bloch_vectors(&self) -> &[[f64; 3]] {
        &self.bloch
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// Mean of the diagonal entries whose axis is in `axes`.
    pub fn mean_diagonal(&self, axes: &[Axis]) -> f64 {
        let mut sum = 0.0;
        let mut count = 0;
        for l in 1..=self.n_sites {
            for &a in axes {
                sum += self.entry(l, a, l, a).re;
                count += 1;
            }
        }
        sum / count as f64
    }

    /// Mean of all off-diagonal entries. Hermiticity makes it real.
    pub fn mean_off_diagonal(&self) -> f64 {
        let n = self.matrix.nrows();
        let total: f64 = self.matrix.iter().map(|z| z.re).sum::<f64>() - self.trace();
        total / (n * n - n) as f64
    }

    pub fn hermiticity_defect(&self) -> f64 {
        hermiticity_defect(&self.matrix)
    }
}

fn levi_civita(a: usize, b: usize) -> Option<(usize, f64)> {
    match (a, b) {
        (0, 1) => Some((2, 1.0)),
        (1, 2) => Some((0, 1.0)),
        (2, 0) => Some((1, 1.0)),
        (1, 0) => Some((2, -1.0)),
        (2, 1) => Some((0, -1.0)),
        (0, 2) => Some((1, -1.0)),
        _ => None,
    }
}

/// Builds the VCM from Pauli-string expectations. Same-site blocks use
/// `σ_α σ_β = δ_αβ I + i ε_αβγ σ_γ`.
pub fn compute_vcm(state: &StateVector) -> Result<VarianceCovarianceMatrix> {
    let n = state.n_sites();
    check_state_sites(n)?;
    let mut bloch = vec![[0.0; 3]; n];
    for (l, r) in bloch.iter_mut().enumerate() {
        for axis in Axis::ALL {
            r[axis.index()] = pauli_expectation(state, &PauliString::single(l + 1, axis)?)?.re;
        }
    }

    let dim = 3 * n;
    let mut matrix = DMatrix::<Complex64>::zeros(dim, dim);
    for l in 1..=n {
        let r = bloch[l - 1];
        for a in 0..3 {
            for b in 0..3 {
                let mut v = Complex64::new(-r[a] * r[b], 0.0);
                if a == b {
                    v.re += 1.0;
                } else if let Some((c, sign)) = levi_civita(a, b) {
                    v.im += sign * r[c];
                }
                matrix[(3 * (l - 1) + a, 3 * (l - 1) + b)] = v;
            }
        }
    }

    let pairs: Vec<(usize, usize)> = (1..=n).flat_map(|l| (l + 1..=n).map(move |m| (l, m))).collect();
    let blocks: Vec<[[f64; 3]; 3]> = pairs
        .par_iter()
        .map(|&(l, m)| -> Result<[[f64; 3]; 3]> {
            let mut block = [[0.0; 3]; 3];
            for a in Axis::ALL {
                for b in Axis::ALL {
                    let e = pauli_expectation(state, &PauliString::pair(l, a, m, b)?)?.re;
                    block[a.index()][b.index()] = e - bloch[l - 1][a.index()] * bloch[m - 1][b.index()];
                }
            }
            Ok(block)
        })
        .collect::<Result<_>>()?;
    for (&(l, m), block) in pairs.iter().zip(&blocks) {
        for a in 0..3 {
            for b in 0..3 {
                let v = Complex64::new(block[a][b], 0.0);
                matrix[(3 * (l - 1) + a, 3 * (m - 1) + b)] = v;
                matrix[(3 * (m - 1) + b, 3 * (l - 1) + a)] = v;
            }
        }
    }
    Ok(VarianceCovarianceMatrix {
        n_sites: n,
        matrix,
        bloch,
    })
}

/// `(e_max, e_min)` of the VCM.
pub fn extremal_eigenvalues(vcm: &VarianceCovarianceMatrix) -> Result<(f64, f64)> {
    let w = hermitian_eigenvalues(&vcm.matrix)?;
    Ok((*w.last().expect("VCM is never empty"), w[0]))
}

/// Coefficients `c_{αl}` of an additive operator `A = Σ c_{αl} σ_α(l)`,
/// normalized so that `Σ |c_{αl}|² = N`. Same ordering as the VCM.
#[derive(Debug, Clone, PartialEq)]
pub struct AdditiveOperatorSpec {
    n_sites: usize,
    coefficients: Vec<Complex64>,
}

impl AdditiveOperatorSpec {
    pub fn new(n_sites: usize, coefficients: Vec<Complex64>) -> Result<Self> {
        if coefficients.len() != 3 * n_sites {
            return Err(Error::DimensionMismatch {
                expected: 3 * n_sites,
                actual: coefficients.len(),
            });
        }
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if (norm - n_sites as f64).abs() > PHYSICAL_TOL * (n_sites as f64).max(1.0) {
            return Err(Error::InvalidArgument(format!(
                "additive operator coefficients have squared norm {norm}, expected {n_sites}"
            )));
        }
        Ok(Self { n_sites, coefficients })
    }

    /// Rescales arbitrary non-zero coefficients to squared norm `N`.
    pub fn normalized(n_sites: usize, mut coefficients: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = coefficients.iter().map(|c| c.norm_sqr()).sum();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidArgument("all coefficients are zero".into()));
        }
        let scale = (n_sites as f64 / norm).sqrt();
        for c in &mut coefficients {
            *c *= scale;
        }
        Self::new(n_sites, coefficients)
    }

    /// `Σ_l σ_axis(l)`.
    pub fn uniform(n_sites: usize, axis: Axis) -> Self {
        let mut coefficients = vec![Complex64::new(0.0, 0.0); 3 * n_sites];
        for l in 1..=n_sites {
            coefficients[VarianceCovarianceMatrix::index(l, axis)] = Complex64::new(1.0, 0.0);
        }
        Self { n_sites, coefficients }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn coefficients(&self) -> &[Complex64] {
        &self.coefficients
    }

    /// `c† V c` for a precomputed VCM.
    pub fn fluctuation(&self, vcm: &VarianceCovarianceMatrix) -> Result<f64> {
        if vcm.n_sites != self.n_sites {
            return Err(Error::DimensionMismatch {
                expected: 3 * vcm.n_sites,
                actual: self.coefficients.len(),
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, ci) in self.coefficients.iter().enumerate() {
            if ci.norm_sqr() == 0.0 {
                continue;
            }
            let row: Complex64 = self
                .coefficients
                .iter()
                .enumerate()
                .map(|(j, cj)| vcm.matrix[(i, j)] * cj)
                .sum();
            acc += ci.conj() * row;
        }
        Ok(acc.re)
    }
}

/// `⟨δA† δA⟩ = c† V c`, bounded by `N · e_max`.
pub fn additive_fluctuation(state: &StateVector, spec: &AdditiveOperatorSpec) -> Result<f64> {
    if spec.n_sites != state.n_sites() {
        return Err(Error::InvalidArgument(format!(
            "operator has {} sites, state has {}",
            spec.n_sites,
            state.n_sites()
        )));
    }
    spec.fluctuation(&compute_vcm(state)?)
}

/// Observables at pairwise-distinct sites whose joint cumulant is wanted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CumulantRequest {
    observables: Vec<LocalObservable>,
}

impl CumulantRequest {
    pub fn new(observables: Vec<LocalObservable>) -> Result<Self> {
        if observables.is_empty() {
            return Err(Error::InvalidArgument("cumulant needs at least one observable".into()));
        }
        if observables.len() > MAX_CUMULANT_ORDER {
            return Err(Error::CapExceeded {
                what: "cumulant order",
                value: observables.len(),
                cap: MAX_CUMULANT_ORDER,
            });
        }
        for (k, o) in observables.iter().enumerate() {
            if observables[..k].iter().any(|p| p.site == o.site) {
                return Err(Error::DuplicateSite(o.site));
            }
        }
        Ok(Self { observables })
    }

    pub fn order(&self) -> usize {
        self.observables.len()
    }

    pub fn observables(&self) -> &[LocalObservable] {
        &self.observables
    }
}

/// Calls `visit` with every set partition of `{0, …, m-1}`, given as a
/// list of blocks, each block a bit mask.
pub fn for_each_set_partition(m: usize, mut visit: impl FnMut(&[usize])) {
    // restricted growth strings: a[0] = 0, a[i] <= max(a[..i]) + 1
    fn recurse(i: usize, m: usize, labels: &mut Vec<usize>, blocks: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if i == m {
            visit(blocks);
            return;
        }
        for b in 0..blocks.len() {
            blocks[b] |= 1 << i;
            labels.push(b);
            recurse(i + 1, m, labels, blocks, visit);
            labels.pop();
            blocks[b] &= !(1 << i);
        }
        blocks.push(1 << i);
        labels.push(blocks.len() - 1);
        recurse(i + 1, m, labels, blocks, visit);
        labels.pop();
        blocks.pop();
    }
    if m == 0 {
        visit(&[]);
        return;
    }
    recurse(0, m, &mut Vec::with_capacity(m), &mut Vec::with_capacity(m), &mut visit);
}

/// Joint cumulant `⟨a_1 … a_m⟩_c` of commuting observables at distinct
/// sites, equal to `(-1)^m ∂^m ln Z / ∂J_1…∂J_m` at `J = 0` with
/// `Z = ⟨exp(-Σ J_i a_i)⟩`.
///
/// Evaluated by the set-partition (Möbius) formula
/// `κ = Σ_π (-1)^{|π|-1} (|π|-1)! Π_{B∈π} E[Π_{i∈B} a_i]`, with every
/// moment read off the reduced density matrix of the `m` sites.
pub fn connected_correlation(state: &StateVector, request: &CumulantRequest) -> Result<f64> {
    let m = request.order();
    let sites: Vec<usize> = request.observables.iter().map(|o| o.site).collect();
    let rho = partial_trace(state, &sites)?;
    let mut moments = vec![0.0; 1 << m];
    for (mask, moment) in moments.iter_mut().enumerate() {
        let factors = (0..m)
            .filter(|k| mask & (1 << k) != 0)
            .map(|k| LocalObservable::new(k + 1, request.observables[k].axis));
        *moment = rho.expectation(&PauliString::new(factors)?)?.re;
    }
    let factorials = [1.0, 1.0, 2.0, 6.0, 24.0, 120.0];
    let mut kappa = 0.0;
    for_each_set_partition(m, |blocks| {
        let b = blocks.len();
        let sign = if b % 2 == 1 { 1.0 } else { -1.0 };
        let product: f64 = blocks.iter().map(|&mask| moments[mask]).product();
        kappa += sign * factorials[b - 1] * product;
    });
    Ok(kappa)
}

/// Which `(α, β)` axis pairs enter a squared two-point correlation average.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AxisPairs {
    /// All nine pairs.
    All,
    /// The five pairs with an even number of `y` factors
    /// (`xx, xz, zx, zz, yy`). On real states the other four expectations
    /// vanish identically.
    TimeReversalEven,
}

impl AxisPairs {
    pub fn pairs(self) -> Vec<(Axis, Axis)> {
        Axis::ALL
            .iter()
            .flat_map(|&a| Axis::ALL.iter().map(move |&b| (a, b)))
            .filter(|&(a, b)| match self {
                AxisPairs::All => true,
                AxisPairs::TimeReversalEven => ((a == Axis::Y) as u8 + (b == Axis::Y) as u8).is_multiple_of(2),
            })
            .collect()
    }
}

/// Per-state mean of `|⟨σ_α(l)σ_β(l')⟩|²` over the chosen axis pairs,
/// summarized over the states.
pub fn two_point_sq_correlation_stat(
    states: &[StateVector],
    site_a: usize,
    site_b: usize,
    pairs: AxisPairs,
) -> Result<EnsembleSummary> {
    if site_a == site_b {
        return Err(Error::InvalidArgument(
            "two-point correlation needs distinct sites".into(),
        ));
    }
    let strings: Vec<PauliString> = pairs
        .pairs()
        .into_iter()
        .map(|(a, b)| PauliString::pair(site_a, a, site_b, b))
        .collect::<Result<_>>()?;
    let per_state: Vec<f64> = states
        .iter()
        .map(|s| -> Result<f64> {
            let total: f64 = strings
                .iter()
                .map(|p| pauli_expectation(s, p).map(|e| e.norm_sqr()))
                .sum::<Result<f64>>()?;
            Ok(total / strings.len() as f64)
        })
        .collect::<Result<_>>()?;
    Ok(EnsembleSummary::from_samples(
        "two_point_sq_correlation",
        format!("l={site_a},l'={site_b}"),
        &per_state,
    ))
}

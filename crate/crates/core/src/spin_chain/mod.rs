//! Periodic spin-1/2 chain with random `yy` couplings and a random in-plane
//! field:
//!
//! ```text
//! H = J Σ_l [σx(l)σx(l+1) + σz(l)σz(l+1) + √2 cos φ_l σy(l)σy(l+1)]
//!     - h Σ_l [sin θ_l σx(l) + cos θ_l σz(l)],      σ(N+1) = σ(1)
//! ```
//!
//! Every term is real in the computational basis (`σy ⊗ σy` is real), so
//! the Hamiltonian is stored and diagonalized as a real symmetric matrix.

mod spacing;

pub use spacing::{
    poisson_cdf, poisson_pdf, pooled_statistics, unfold_and_spacings, wigner_surmise_cdf, wigner_surmise_pdf,
    SpacingStatistics, DEFAULT_WINDOW_FRACTION, MIN_LEVELS, UNFOLDING_DEGREE,
};

use std::f64::consts::{SQRT_2, TAU};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::consts::max_dense_sites;
use crate::ensembles::{SampleSeed, Stream};
use crate::linalg::{
    symmetric_eigen, symmetric_eigen_range, symmetric_eigenpair, symmetric_eigenvalues, symmetry_defect,
};
use crate::quantum_state::{apply_pauli_accumulate, Axis, PauliString, StateVector};
use crate::{Error, Result};

/// Parameters of one disorder realization of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinChainSpec {
    pub n_sites: usize,
    /// `J`
    pub coupling: f64,
    /// `h`
    pub field: f64,
    /// `φ_l`, one per bond `(l, l+1)`.
    pub phases: Vec<f64>,
    /// `θ_l`, one per site.
    pub angles: Vec<f64>,
}

impl SpinChainSpec {
    pub fn new(n_sites: usize, coupling: f64, field: f64, phases: Vec<f64>, angles: Vec<f64>) -> Result<Self> {
        let spec = Self {
            n_sites,
            coupling,
            field,
            phases,
            angles,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_sites < 2 {
            return Err(Error::InvalidArgument(format!(
                "spin chain needs N >= 2, got {}",
                self.n_sites
            )));
        }
        if self.phases.len() != self.n_sites || self.angles.len() != self.n_sites {
            return Err(Error::InvalidArgument(format!(
                "expected {} phases and angles, got {} and {}",
                self.n_sites,
                self.phases.len(),
                self.angles.len()
            )));
        }
        let in_range = |x: &f64| (0.0..TAU).contains(x);
        if !self.phases.iter().all(in_range) || !self.angles.iter().all(in_range) {
            return Err(Error::InvalidArgument("phases and angles must lie in [0, 2π)".into()));
        }
        if !self.coupling.is_finite() || !self.field.is_finite() {
            return Err(Error::InvalidArgument("J and h must be finite".into()));
        }
        Ok(())
    }

    fn check_dense_cap(&self) -> Result<()> {
        let cap = max_dense_sites();
        if self.n_sites > cap {
            return Err(Error::CapExceeded {
                what: "n_sites (dense Hamiltonian)",
                value: self.n_sites,
                cap,
            });
        }
        Ok(())
    }

    /// Sites `(l, l+1)` of bond `l`, with wrap-around.
    fn bond(&self, l: usize) -> (usize, usize) {
        (l, l % self.n_sites + 1)
    }
}

/// Draws i.i.d. uniform `φ_l, θ_l ∈ [0, 2π)`.
pub fn sample_spec(n_sites: usize, coupling: f64, field: f64, seed: SampleSeed) -> Result<SpinChainSpec> {
    let mut rng = seed.rng(Stream::SpinChainSpec);
    let phases = (0..n_sites).map(|_| rng.random_range(0.0..TAU)).collect();
    let angles = (0..n_sites).map(|_| rng.random_range(0.0..TAU)).collect();
    SpinChainSpec::new(n_sites, coupling, field, phases, angles)
}

/// The Hamiltonian as a list of weighted Pauli strings.
pub fn hamiltonian_terms(spec: &SpinChainSpec) -> Result<Vec<(f64, PauliString)>> {
    spec.validate()?;
    let mut terms = Vec::with_capacity(5 * spec.n_sites);
    for l in 1..=spec.n_sites {
        let (a, b) = spec.bond(l);
        let phi = spec.phases[l - 1];
        terms.push((spec.coupling, PauliString::pair(a, Axis::X, b, Axis::X)?));
        terms.push((spec.coupling, PauliString::pair(a, Axis::Z, b, Axis::Z)?));
        terms.push((
            spec.coupling * SQRT_2 * phi.cos(),
            PauliString::pair(a, Axis::Y, b, Axis::Y)?,
        ));
    }
    for l in 1..=spec.n_sites {
        let theta = spec.angles[l - 1];
        terms.push((-spec.field * theta.sin(), PauliString::single(l, Axis::X)?));
        terms.push((-spec.field * theta.cos(), PauliString::single(l, Axis::Z)?));
    }
    Ok(terms)
}

/// Dense real-symmetric Hamiltonian of dimension `2^N`.
pub fn build_hamiltonian(spec: &SpinChainSpec) -> Result<DMatrix<f64>> {
    spec.validate()?;
    spec.check_dense_cap()?;
    let n = spec.n_sites;
    let dim = 1usize << n;
    let j = spec.coupling;
    let yy: Vec<f64> = spec.phases.iter().map(|phi| j * SQRT_2 * phi.cos()).collect();
    let fx: Vec<f64> = spec.angles.iter().map(|t| -spec.field * t.sin()).collect();
    let fz: Vec<f64> = spec.angles.iter().map(|t| -spec.field * t.cos()).collect();
    let spin = |i: usize, site: usize| if (i >> (site - 1)) & 1 == 0 { 1.0 } else { -1.0 };

    let mut h = DMatrix::<f64>::zeros(dim, dim);
    for i in 0..dim {
        let mut diag = 0.0;
        for l in 1..=n {
            let (a, b) = spec.bond(l);
            let (sa, sb) = (spin(i, a), spin(i, b));
            let flipped = i ^ (1 << (a - 1)) ^ (1 << (b - 1));
            diag += j * sa * sb;
            // σx⊗σx flips both spins; σy⊗σy does too, with factor i·sa · i·sb.
            h[(flipped, i)] += j - yy[l - 1] * sa * sb;
        }
        for l in 1..=n {
            diag += fz[l - 1] * spin(i, l);
            h[(i ^ (1 << (l - 1)), i)] += fx[l - 1];
        }
        h[(i, i)] += diag;
    }
    Ok(h)
}

/// `H|v⟩` assembled from the Pauli-string kernels, never forming `H`.
pub fn apply_hamiltonian(spec: &SpinChainSpec, amplitudes: &[Complex64]) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); amplitudes.len()];
    for (coefficient, term) in hamiltonian_terms(spec)? {
        apply_pauli_accumulate(
            amplitudes,
            spec.n_sites,
            &term,
            Complex64::new(coefficient, 0.0),
            &mut out,
        )?;
    }
    Ok(out)
}

/// Eigenvalues (ascending) and optionally some eigenvectors of a Hamiltonian.
///
/// `eigenvalues[k]` is the level with 0-based global index
/// `first_index + k`; when present, column `k` of `eigenvectors` belongs
/// to it.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub dim: usize,
    pub first_index: usize,
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Option<DMatrix<f64>>,
}

impl SpectrumResult {
    pub fn is_complete(&self) -> bool {
        self.first_index == 0 && self.eigenvalues.len() == self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.dim.trailing_zeros() as usize
    }

    /// Eigenvector with 0-based global index `index`.
    pub fn eigenvector(&self, index: usize) -> Result<StateVector> {
        let vectors = self
            .eigenvectors
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("spectrum was computed without eigenvectors".into()))?;
        let k = index
            .checked_sub(self.first_index)
            .filter(|&k| k < self.eigenvalues.len())
            .ok_or_else(|| Error::InvalidArgument(format!("eigenvector {index} was not computed")))?;
        StateVector::from_real(self.n_sites(), vectors.column(k).iter().copied().collect())
    }

    /// Largest `‖Hv - Ev‖` over the stored eigenpairs.
    pub fn max_residual(&self, h: &DMatrix<f64>) -> f64 {
        let Some(vectors) = &self.eigenvectors else { return 0.0 };
        (0..self.eigenvalues.len())
            .map(|k| {
                let v = vectors.column(k);
                (h * v - v * self.eigenvalues[k]).norm()
            })
            .fold(0.0, f64::max)
    }
}

fn check_symmetric(h: &DMatrix<f64>) -> Result<()> {
    if h.nrows() != h.ncols() || !h.nrows().is_power_of_two() {
        return Err(Error::InvalidArgument(format!(
            "expected a 2^N x 2^N matrix, got {}x{}",
            h.nrows(),
            h.ncols()
        )));
    }
    let scale = h.amax().max(1.0);
    let defect = symmetry_defect(h);
    if defect > 1e-12 * scale {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.nrows().trailing_zeros() as usize;
    let cap = max_dense_sites();
    if n > cap {
        return Err(Error::CapExceeded {
            what: "n_sites (dense Hamiltonian)",
            value: n,
            cap,
        });
    }
    Ok(())
}

/// Recomputes `‖Hv - Ev‖` for up to 16 evenly spread returned pairs and
/// rejects the result if any exceeds `1e-8 ‖H‖_F`.
fn verify_residuals(h: &DMatrix<f64>, spectrum: SpectrumResult) -> Result<SpectrumResult> {
    let Some(vectors) = &spectrum.eigenvectors else {
        return Ok(spectrum);
    };
    let count = spectrum.eigenvalues.len();
    let probes = count.min(16);
    let tolerance = 1e-8 * h.norm().max(f64::MIN_POSITIVE);
    let mut worst = 0.0f64;
    for p in 0..probes {
        let k = if probes == 1 { 0 } else { p * (count - 1) / (probes - 1) };
        let v = vectors.column(k);
        worst = worst.max((h * v - v * spectrum.eigenvalues[k]).norm());
    }
    if worst > tolerance {
        return Err(Error::InaccurateEigenpairs {
            residual: worst,
            tolerance,
        });
    }
    Ok(spectrum)
}

/// Full eigendecomposition.
pub fn diagonalize(h: &DMatrix<f64>) -> Result<SpectrumResult> {
    check_symmetric(h)?;
    let (eigenvalues, vectors) = symmetric_eigen(h)?;
    verify_residuals(
        h,
        SpectrumResult {
            dim: h.nrows(),
            first_index: 0,
            eigenvalues,
            eigenvectors: Some(vectors),
        },
    )
}

/// All eigenvalues, no eigenvectors.
pub fn eigenvalues_only(h: &DMatrix<f64>) -> Result<SpectrumResult> {
    check_symmetric(h)?;
    let eigenvalues = symmetric_eigenvalues(h)?;
    Ok(SpectrumResult {
        dim: h.nrows(),
        first_index: 0,
        eigenvalues,
        eigenvectors: None,
    })
}

/// Eigenpairs with 0-based ascending indices `lo..=hi` only.
pub fn diagonalize_range(h: &DMatrix<f64>, lo: usize, hi: usize) -> Result<SpectrumResult> {
    check_symmetric(h)?;
    let (eigenvalues, vectors) = symmetric_eigen_range(h, lo, hi)?;
    verify_residuals(
        h,
        SpectrumResult {
            dim: h.nrows(),
            first_index: lo,
            eigenvalues,
            eigenvectors: Some(vectors),
        },
    )
}

/// 0-based index of the central eigenstate: the `2^{N-1}`-th level counted
/// from 1 in ascending order, i.e. the lower of the two middle levels.
pub fn central_index(dim: usize) -> usize {
    dim / 2 - 1
}

/// Energy and eigenvector of the central eigenstate of a chain realization.
pub fn central_eigenstate(spec: &SpinChainSpec) -> Result<(f64, StateVector)> {
    let h = build_hamiltonian(spec)?;
    let k = central_index(h.nrows());
    check_symmetric(&h)?;
    let (energy, vector) = symmetric_eigenpair(&h, k)?;
    let spectrum = verify_residuals(
        &h,
        SpectrumResult {
            dim: h.nrows(),
            first_index: k,
            eigenvalues: vec![energy],
            eigenvectors: Some(DMatrix::from_columns(&[vector])),
        },
    )?;
    Ok((energy, spectrum.eigenvector(k)?))
}

/// Which eigenstates to pick from a spectrum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EigenSelector {
    /// The `2^{N-1}`-th state (1-based, ascending).
    Central,
    /// The `k`-th state, 1-based ascending.
    Index(usize),
    /// Every state with energy in `(energy - width/2, energy + width/2]`.
    EnergyWindow { energy: f64, width: f64 },
}

/// One selected eigenstate.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    /// 1-based ascending position in the full spectrum.
    pub position: usize,
    pub energy: f64,
    pub state: StateVector,
}

/// Eigenstates chosen by `selector`. Central and index selectors yield one
/// state; the energy window yields every computed state inside it.
pub fn select_eigenstate(spectrum: &SpectrumResult, selector: EigenSelector) -> Result<Vec<Eigenstate>> {
    let pick = |index: usize| -> Result<Eigenstate> {
        let k = index
            .checked_sub(spectrum.first_index)
            .filter(|&k| k < spectrum.eigenvalues.len())
            .ok_or_else(|| Error::InvalidArgument(format!("eigenstate {} is not available", index + 1)))?;
        Ok(Eigenstate {
            position: index + 1,
            energy: spectrum.eigenvalues[k],
            state: spectrum.eigenvector(index)?,
        })
    };
    match selector {
        EigenSelector::Central => Ok(vec![pick(central_index(spectrum.dim))?]),
        EigenSelector::Index(k) => {
            if k == 0 || k > spectrum.dim {
                return Err(Error::InvalidArgument(format!(
                    "eigenstate index {k} outside 1..={}",
                    spectrum.dim
                )));
            }
            Ok(vec![pick(k - 1)?])
        }
        EigenSelector::EnergyWindow { energy, width } => {
            let lo = energy - width / 2.0;
            let hi = energy + width / 2.0;
            let chosen: Vec<Eigenstate> = spectrum
                .eigenvalues
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > lo && e <= hi)
                .map(|(k, _)| pick(spectrum.first_index + k))
                .collect::<Result<_>>()?;
            if chosen.is_empty() {
                return Err(Error::EmptySelection(format!("no level in ({lo}, {hi}]")));
            }
            Ok(chosen)
        }
    }
}

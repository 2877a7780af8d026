//! Pure states of `N` qubits and the bitwise kernels that act on them.
//!
//! A [`StateVector`] stores all `2^N` amplitudes. Basis index bit `l - 1`
//! holds the spin of site `l`; bit value `0` is `|↑⟩`, the `σ_z = +1`
//! eigenstate.

mod density;
mod pauli;

pub use density::{coefficient_matrix, partial_trace, purity, purity_direct, DensityMatrix};
pub use pauli::{apply_pauli, apply_pauli_accumulate, pauli_expectation, Axis, LocalObservable, PauliString};

use num_complex::Complex64;

use crate::consts::{max_state_sites, PHYSICAL_TOL};
use crate::{Error, Result};

pub(crate) fn check_state_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::InvalidArgument("a state needs at least one site".into()));
    }
    let cap = max_state_sites();
    if n_sites > cap {
        return Err(Error::CapExceeded {
            what: "n_sites",
            value: n_sites,
            cap,
        });
    }
    Ok(())
}

/// Normalized pure state of `n_sites` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: Vec<Complex64>,
    is_real: bool,
}

impl StateVector {
    /// Wraps `amplitudes`, which must already be normalized to within `1e-10`.
    pub fn new(n_sites: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_state_sites(n_sites)?;
        let expected = 1usize << n_sites;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm_sqr = squared_norm(&amplitudes);
        if (norm_sqr - 1.0).abs() > PHYSICAL_TOL {
            return Err(Error::NotNormalized(norm_sqr));
        }
        Ok(Self::new_unchecked(n_sites, amplitudes))
    }

    /// Normalizes `amplitudes` before wrapping them.
    pub fn from_unnormalized(n_sites: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        check_state_sites(n_sites)?;
        let expected = 1usize << n_sites;
        if amplitudes.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: amplitudes.len(),
            });
        }
        let norm_sqr = squared_norm(&amplitudes);
        if norm_sqr <= 0.0 || !norm_sqr.is_finite() {
            return Err(Error::NotNormalized(norm_sqr));
        }
        let scale = norm_sqr.sqrt().recip();
        for a in &mut amplitudes {
            *a *= scale;
        }
        Ok(Self::new_unchecked(n_sites, amplitudes))
    }

    /// Real amplitudes, normalized on the way in.
    pub fn from_real(n_sites: usize, amplitudes: Vec<f64>) -> Result<Self> {
        Self::from_unnormalized(
            n_sites,
            amplitudes.into_iter().map(|x| Complex64::new(x, 0.0)).collect(),
        )
    }

    /// Skips every validation. Length must still be `2^n_sites`.
    ///
    /// Exists for fault-injection tests of the norm checks; kernels in this
    /// crate assume normalized input.
    pub fn new_unchecked(n_sites: usize, amplitudes: Vec<Complex64>) -> Self {
        assert_eq!(amplitudes.len(), 1usize << n_sites, "amplitude count must be 2^n_sites");
        let is_real = amplitudes.iter().all(|a| a.im == 0.0);
        Self {
            n_sites,
            amplitudes,
            is_real,
        }
    }

    /// Computational basis state `|index⟩`.
    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_state_sites(n_sites)?;
        let dim = 1usize << n_sites;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} >= {dim}")));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self::new_unchecked(n_sites, amplitudes))
    }

    /// `|↑↑…↑⟩`.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.is_real
    }

    pub fn norm_sqr(&self) -> f64 {
        squared_norm(&self.amplitudes)
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub(crate) fn check_site(&self, site: usize) -> Result<()> {
        if site == 0 || site > self.n_sites {
            Err(Error::SiteOutOfRange {
                site,
                n_sites: self.n_sites,
            })
        } else {
            Ok(())
        }
    }
}

pub(crate) fn squared_norm(amplitudes: &[Complex64]) -> f64 {
    amplitudes
        .iter()
        .map(|a| a.norm_sqr())
        .collect::<crate::stats::NeumaierSum>()
        .value()
}

/// `(|↑…↑⟩ + |↓…↓⟩)/√2`.
pub fn make_cat_state(n_sites: usize) -> Result<StateVector> {
    check_state_sites(n_sites)?;
    let dim = 1usize << n_sites;
    let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
    let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amplitudes[0] = h;
    amplitudes[dim - 1] = h;
    Ok(StateVector::new_unchecked(n_sites, amplitudes))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_validate() {
        assert!(StateVector::new(2, vec![Complex64::new(1.0, 0.0); 4]).is_err());
        assert!(StateVector::new(2, vec![Complex64::new(1.0, 0.0); 3]).is_err());
        assert!(StateVector::new(0, vec![Complex64::new(1.0, 0.0)]).is_err());
        assert!(StateVector::from_unnormalized(1, vec![Complex64::new(0.0, 0.0); 2]).is_err());
        let s = StateVector::from_unnormalized(1, vec![Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
        assert!(!s.is_real());
        assert!(StateVector::all_up(3).unwrap().is_real());
    }

    #[test]
    fn cap_is_a_configuration_error() {
        assert!(matches!(StateVector::all_up(64), Err(Error::CapExceeded { .. })));
        assert!(matches!(make_cat_state(64), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn cat_state_amplitudes() {
        let c1 = make_cat_state(1).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(c1.amplitudes(), &[Complex64::new(h, 0.0), Complex64::new(h, 0.0)]);
        let c3 = make_cat_state(3).unwrap();
        let nonzero: Vec<usize> = (0..8).filter(|&i| c3.amplitudes()[i].norm() > 0.0).collect();
        assert_eq!(nonzero, vec![0, 7]);
        assert!((c3.amplitudes()[0].re - h).abs() == 0.0);
        assert!((c3.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cat_single_site_purity_is_half() {
        let c = make_cat_state(4).unwrap();
        for site in 1..=4 {
            assert!((purity_direct(&c, &[site]).unwrap() - 0.5).abs() < 1e-15);
        }
    }
}

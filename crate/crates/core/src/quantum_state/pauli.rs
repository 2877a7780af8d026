use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::StateVector;
use crate::{Error, Result};

/// Pauli axis. `index()` is the axis offset inside a site's VCM block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        Axis::ALL.get(i).copied()
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        })
    }
}

/// `σ_axis` acting on site `site` (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalObservable {
    pub site: usize,
    pub axis: Axis,
}

impl LocalObservable {
    pub fn new(site: usize, axis: Axis) -> Self {
        Self { site, axis }
    }
}

impl fmt::Display for LocalObservable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ{}({})", self.axis, self.site)
    }
}

/// Product of single-site Pauli matrices on pairwise-distinct sites.
///
/// Factors on distinct sites commute, so the product is Hermitian and its
/// square is the identity. Factors are kept sorted by site.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PauliString {
    factors: Vec<LocalObservable>,
}

/// Bit masks describing how a Pauli string acts on basis states:
/// `P|i⟩ = i^{n_y} (-1)^{popcount(i & sign_mask)} |i ^ flip_mask⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct PauliMasks {
    pub flip: usize,
    pub sign: usize,
    pub n_y: u32,
}

impl PauliMasks {
    /// `i^{n_y}`.
    pub fn global_phase(&self) -> Complex64 {
        match self.n_y % 4 {
            0 => Complex64::new(1.0, 0.0),
            1 => Complex64::new(0.0, 1.0),
            2 => Complex64::new(-1.0, 0.0),
            _ => Complex64::new(0.0, -1.0),
        }
    }
}

impl PauliString {
    pub fn new(factors: impl IntoIterator<Item = LocalObservable>) -> Result<Self> {
        let mut factors: Vec<LocalObservable> = factors.into_iter().collect();
        factors.sort_by_key(|f| f.site);
        for f in &factors {
            if f.site == 0 {
                return Err(Error::SiteOutOfRange { site: 0, n_sites: 0 });
            }
        }
        for w in factors.windows(2) {
            if w[0].site == w[1].site {
                return Err(Error::DuplicateSite(w[0].site));
            }
        }
        Ok(Self { factors })
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(site: usize, axis: Axis) -> Result<Self> {
        Self::new([LocalObservable::new(site, axis)])
    }

    pub fn pair(site_a: usize, axis_a: Axis, site_b: usize, axis_b: Axis) -> Result<Self> {
        Self::new([
            LocalObservable::new(site_a, axis_a),
            LocalObservable::new(site_b, axis_b),
        ])
    }

    pub fn factors(&self) -> &[LocalObservable] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    /// Number of `σ_y` factors.
    pub fn y_count(&self) -> usize {
        self.factors.iter().filter(|f| f.axis == Axis::Y).count()
    }

    pub(crate) fn masks(&self, n_sites: usize) -> Result<PauliMasks> {
        let mut m = PauliMasks {
            flip: 0,
            sign: 0,
            n_y: 0,
        };
        for f in &self.factors {
            if f.site > n_sites {
                return Err(Error::SiteOutOfRange { site: f.site, n_sites });
            }
            let bit = 1usize << (f.site - 1);
            match f.axis {
                Axis::X => m.flip |= bit,
                Axis::Y => {
                    m.flip |= bit;
                    m.sign |= bit;
                    m.n_y += 1;
                }
                Axis::Z => m.sign |= bit,
            }
        }
        Ok(m)
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("I");
        }
        for (k, factor) in self.factors.iter().enumerate() {
            if k > 0 {
                f.write_str("·")?;
            }
            write!(f, "{factor}")?;
        }
        Ok(())
    }
}

#[inline]
fn parity(x: usize) -> bool {
    x.count_ones() & 1 == 1
}

/// `Σ_i conj(c[i ^ flip]) (-1)^{popcount(i & sign)} c[i]`, without the
/// global `i^{n_y}` phase.
pub(crate) fn masked_overlap(amplitudes: &[Complex64], masks: PauliMasks) -> Complex64 {
    let mut plus = Complex64::new(0.0, 0.0);
    let mut minus = Complex64::new(0.0, 0.0);
    if masks.flip == 0 {
        for (i, a) in amplitudes.iter().enumerate() {
            if parity(i & masks.sign) {
                minus.re += a.norm_sqr();
            } else {
                plus.re += a.norm_sqr();
            }
        }
    } else {
        for (i, a) in amplitudes.iter().enumerate() {
            let t = amplitudes[i ^ masks.flip].conj() * a;
            if parity(i & masks.sign) {
                minus += t;
            } else {
                plus += t;
            }
        }
    }
    plus - minus
}

/// `⟨Ψ|P|Ψ⟩` in one pass over the amplitudes.
///
/// The result is real up to rounding; for real states and strings with an
/// odd number of `σ_y` factors it vanishes up to rounding. The empty string gives 1.
pub fn pauli_expectation(state: &StateVector, obs: &PauliString) -> Result<Complex64> {
    let masks = obs.masks(state.n_sites())?;
    Ok(masks.global_phase() * masked_overlap(state.amplitudes(), masks))
}

/// `out += coefficient · P|Ψ⟩` for amplitude vectors of matching length.
pub fn apply_pauli_accumulate(
    amplitudes: &[Complex64],
    n_sites: usize,
    obs: &PauliString,
    coefficient: Complex64,
    out: &mut [Complex64],
) -> Result<()> {
    let masks = obs.masks(n_sites)?;
    if amplitudes.len() != 1usize << n_sites || out.len() != amplitudes.len() {
        return Err(Error::DimensionMismatch {
            expected: 1usize << n_sites,
            actual: out.len(),
        });
    }
    let base = coefficient * masks.global_phase();
    for (i, a) in amplitudes.iter().enumerate() {
        let v = base * a;
        if parity(i & masks.sign) {
            out[i ^ masks.flip] -= v;
        } else {
            out[i ^ masks.flip] += v;
        }
    }
    Ok(())
}

/// `P|Ψ⟩` as a raw amplitude vector.
pub fn apply_pauli(state: &StateVector, obs: &PauliString) -> Result<Vec<Complex64>> {
    let mut out = vec![Complex64::new(0.0, 0.0); state.dim()];
    apply_pauli_accumulate(
        state.amplitudes(),
        state.n_sites(),
        obs,
        Complex64::new(1.0, 0.0),
        &mut out,
    )?;
    Ok(out)
}

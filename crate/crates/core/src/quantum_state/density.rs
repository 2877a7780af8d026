use nalgebra::DMatrix;
use num_complex::Complex64;

use super::pauli::PauliMasks;
use super::{PauliString, StateVector};
use crate::consts::PHYSICAL_TOL;
use crate::linalg::{hermitian_eigenvalues, hermiticity_defect};
use crate::{Error, Result};

/// Reduced density matrix of `n_sites` qubits. Local site `k` (1-based) is
/// bit `k - 1` of the row/column index.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_sites: usize,
    matrix: DMatrix<Complex64>,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity (all to `1e-10`).
    pub fn new(n_sites: usize, matrix: DMatrix<Complex64>) -> Result<Self> {
        let dim = 1usize << n_sites;
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::InvalidDensityMatrix(format!(
                "expected {dim}x{dim}, got {}x{}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let defect = hermiticity_defect(&matrix);
        if defect > PHYSICAL_TOL {
            return Err(Error::NotHermitian(defect));
        }
        let trace = matrix.trace();
        if (trace - Complex64::new(1.0, 0.0)).norm() > PHYSICAL_TOL {
            return Err(Error::InvalidDensityMatrix(format!("trace {trace}")));
        }
        let eigenvalues = hermitian_eigenvalues(&matrix)?;
        if let Some(&lowest) = eigenvalues.first() {
            if lowest < -PHYSICAL_TOL {
                return Err(Error::InvalidDensityMatrix(format!("negative eigenvalue {lowest:e}")));
            }
        }
        Ok(Self { n_sites, matrix })
    }

    pub(crate) fn from_trusted(n_sites: usize, matrix: DMatrix<Complex64>) -> Self {
        Self { n_sites, matrix }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `Tr(ρ P)` for a Pauli string over the local sites `1..=n_sites`.
    pub fn expectation(&self, obs: &PauliString) -> Result<Complex64> {
        let masks: PauliMasks = obs.masks(self.n_sites)?;
        // (ρP)_jj = ρ_{j, j^f} · phase(j)
        let mut plus = Complex64::new(0.0, 0.0);
        let mut minus = Complex64::new(0.0, 0.0);
        for j in 0..self.matrix.nrows() {
            let v = self.matrix[(j, j ^ masks.flip)];
            if (j & masks.sign).count_ones() & 1 == 1 {
                minus += v;
            } else {
                plus += v;
            }
        }
        Ok(masks.global_phase() * (plus - minus))
    }
}

fn validate_keep_sites(n_sites: usize, keep_sites: &[usize]) -> Result<()> {
    if keep_sites.is_empty() {
        return Err(Error::InvalidArgument("keep_sites must not be empty".into()));
    }
    let mut seen = 0usize;
    for &s in keep_sites {
        if s == 0 || s > n_sites {
            return Err(Error::SiteOutOfRange { site: s, n_sites });
        }
        let bit = 1usize << (s - 1);
        if seen & bit != 0 {
            return Err(Error::DuplicateSite(s));
        }
        seen |= bit;
    }
    Ok(())
}

/// For every value of the bits listed in `sites` (listed order = little-endian
/// order of the packed value), the full basis index they occupy.
fn scatter_table(sites: &[usize]) -> Vec<usize> {
    let mut table = vec![0usize; 1 << sites.len()];
    for (k, &s) in sites.iter().enumerate() {
        let half = 1usize << k;
        let bit = 1usize << (s - 1);
        for v in 0..half {
            table[v | half] = table[v] | bit;
        }
    }
    table
}

/// Coefficient matrix `C` with `C[r, c] = ψ[row bits r on keep_sites,
/// column bits c on the remaining sites in ascending order]`, so that
/// `ρ_keep = C C†`. Returned as `(rows, cols, row-major data)`.
fn coefficient_rows(state: &StateVector, keep_sites: &[usize]) -> Result<(usize, usize, Vec<Complex64>)> {
    let n = state.n_sites();
    validate_keep_sites(n, keep_sites)?;
    let rest: Vec<usize> = (1..=n).filter(|s| !keep_sites.contains(s)).collect();
    let rows = scatter_table(keep_sites);
    let cols = scatter_table(&rest);
    let amps = state.amplitudes();
    let mut data = Vec::with_capacity(amps.len());
    for &r in &rows {
        data.extend(cols.iter().map(|&c| amps[r | c]));
    }
    Ok((rows.len(), cols.len(), data))
}

/// The `2^m × 2^{N-m}` coefficient matrix of the bipartition `keep_sites | rest`.
pub fn coefficient_matrix(state: &StateVector, keep_sites: &[usize]) -> Result<DMatrix<Complex64>> {
    let (r, c, data) = coefficient_rows(state, keep_sites)?;
    Ok(DMatrix::from_row_slice(r, c, &data))
}

/// Hermitian Gram matrix `G = A A†` of a row-major `rows × cols` matrix,
/// returned column-major.
fn gram(data: &[Complex64], rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut g = DMatrix::<Complex64>::zeros(rows, rows);
    for a in 0..rows {
        let ra = &data[a * cols..(a + 1) * cols];
        for b in 0..=a {
            let rb = &data[b * cols..(b + 1) * cols];
            let v: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            g[(a, b)] = v;
            g[(b, a)] = v.conj();
        }
    }
    g
}

/// Reduced density matrix `ρ_A = Tr_B |Ψ⟩⟨Ψ|` on `keep_sites`.
///
/// Local site `k` of the result is `keep_sites[k - 1]`, so the listed
/// order fixes the bit layout of `ρ_A`.
pub fn partial_trace(state: &StateVector, keep_sites: &[usize]) -> Result<DensityMatrix> {
    let (rows, cols, data) = coefficient_rows(state, keep_sites)?;
    Ok(DensityMatrix::from_trusted(keep_sites.len(), gram(&data, rows, cols)))
}

/// `Tr ρ²`, the squared Frobenius norm.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.iter().map(|z| z.norm_sqr()).sum()
}

fn gram_purity(data: &[Complex64], rows: usize, cols: usize) -> f64 {
    let mut diag = 0.0;
    let mut off = 0.0;
    for a in 0..rows {
        let ra = &data[a * cols..(a + 1) * cols];
        diag += ra.iter().map(|x| x.norm_sqr()).sum::<f64>().powi(2);
        for b in 0..a {
            let rb = &data[b * cols..(b + 1) * cols];
            let v: Complex64 = ra.iter().zip(rb).map(|(x, y)| x * y.conj()).sum();
            off += v.norm_sqr();
        }
    }
    diag + 2.0 * off
}

fn transpose(data: &[Complex64], rows: usize, cols: usize) -> Vec<Complex64> {
    let mut t = vec![Complex64::new(0.0, 0.0); data.len()];
    for r in 0..rows {
        for c in 0..cols {
            t[c * rows + r] = data[r * cols + c];
        }
    }
    t
}

/// Purity of the reduced state on `keep_sites` without forming `ρ` when the
/// complement is smaller: uses `‖CC†‖_F² = ‖C†C‖_F²` on the smaller side.
pub fn purity_direct(state: &StateVector, keep_sites: &[usize]) -> Result<f64> {
    let (rows, cols, data) = coefficient_rows(state, keep_sites)?;
    if rows <= cols {
        Ok(gram_purity(&data, rows, cols))
    } else {
        // C†C has the same Frobenius norm as its complex conjugate CᵀC̄.
        Ok(gram_purity(&transpose(&data, rows, cols), cols, rows))
    }
}

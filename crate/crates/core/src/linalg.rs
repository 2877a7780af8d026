//! Dense symmetric/Hermitian eigensolvers backed by LAPACK.
//!
//! Matrices are `nalgebra` column-major storage and are handed to LAPACK
//! as-is. Only the lower triangle is read.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::{Error, Result};

extern "C" {
    fn openblas_set_num_threads(num_threads: std::os::raw::c_int);
}

/// Sets the number of threads OpenBLAS uses inside a single call.
///
/// With one thread every LAPACK result is independent of how many calls run
/// concurrently, which keeps sample-parallel runs bit-reproducible.
pub fn set_blas_threads(threads: usize) {
    let threads = threads.clamp(1, std::os::raw::c_int::MAX as usize) as std::os::raw::c_int;
    unsafe { openblas_set_num_threads(threads) }
}

fn check_square<T>(a: &DMatrix<T>) -> Result<i32> {
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidArgument(format!(
            "expected a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    i32::try_from(a.nrows()).map_err(|_| Error::InvalidArgument("matrix too large".into()))
}

fn lapack_ok(routine: &'static str, info: i32) -> Result<()> {
    if info == 0 {
        Ok(())
    } else {
        Err(Error::Lapack { routine, info })
    }
}

type DsyevdFn = unsafe fn(u8, u8, i32, &mut [f64], i32, &mut [f64], &mut [f64], i32, &mut [i32], i32, &mut i32);

fn dsyevd(a: &mut DMatrix<f64>, want_vectors: bool) -> Result<Vec<f64>> {
    let n = check_square(a)?;
    let jobz = if want_vectors { b'V' } else { b'N' };
    let mut w = vec![0.0; a.nrows()];
    if n == 0 {
        return Ok(w);
    }
    let mut work = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    let mut info = 0;
    let data = a.as_mut_slice();
    // the two-stage reduction is several times faster but only supports
    // eigenvalues
    let (routine, driver): (&'static str, DsyevdFn) = if want_vectors {
        ("dsyevd", lapack::dsyevd)
    } else {
        ("dsyevd_2stage", lapack::dsyevd_2stage)
    };
    unsafe {
        driver(jobz, b'L', n, data, n, &mut w, &mut work, -1, &mut iwork, -1, &mut info);
    }
    lapack_ok(routine, info)?;
    let lwork = work[0] as i32;
    let liwork = iwork[0];
    let mut work = vec![0.0; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        driver(
            jobz, b'L', n, data, n, &mut w, &mut work, lwork, &mut iwork, liwork, &mut info,
        );
    }
    lapack_ok(routine, info)?;
    Ok(w)
}

/// Full eigendecomposition of a real symmetric matrix.
///
/// Eigenvalues are ascending; column `k` of the returned matrix is the
/// eigenvector of eigenvalue `k`.
pub fn symmetric_eigen(a: &DMatrix<f64>) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let mut z = a.clone();
    let w = dsyevd(&mut z, true)?;
    Ok((w, z))
}

/// Ascending eigenvalues of a real symmetric matrix.
pub fn symmetric_eigenvalues(a: &DMatrix<f64>) -> Result<Vec<f64>> {
    let mut z = a.clone();
    dsyevd(&mut z, false)
}

/// Eigenpairs with 0-based ascending indices `lo..=hi` of a real symmetric
/// matrix, computed without the full decomposition.
pub fn symmetric_eigen_range(a: &DMatrix<f64>, lo: usize, hi: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    let n = check_square(a)?;
    let dim = a.nrows();
    if lo > hi || hi >= dim {
        return Err(Error::InvalidArgument(format!(
            "eigen index range {lo}..={hi} invalid for dimension {dim}"
        )));
    }
    let count = hi - lo + 1;
    let mut work_a = a.clone();
    let mut w = vec![0.0; dim];
    let mut z = DMatrix::<f64>::zeros(dim, count);
    let mut isuppz = vec![0i32; 2 * count];
    let mut m = 0;
    let mut info = 0;
    let il = lo as i32 + 1;
    let iu = hi as i32 + 1;
    let mut work = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    unsafe {
        lapack::dsyevr(
            b'V',
            b'I',
            b'L',
            n,
            work_a.as_mut_slice(),
            n,
            0.0,
            0.0,
            il,
            iu,
            0.0,
            &mut m,
            &mut w,
            z.as_mut_slice(),
            n,
            &mut isuppz,
            &mut work,
            -1,
            &mut iwork,
            -1,
            &mut info,
        );
    }
    lapack_ok("dsyevr", info)?;
    let lwork = work[0] as i32;
    let liwork = iwork[0];
    let mut work = vec![0.0; lwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack::dsyevr(
            b'V',
            b'I',
            b'L',
            n,
            work_a.as_mut_slice(),
            n,
            0.0,
            0.0,
            il,
            iu,
            0.0,
            &mut m,
            &mut w,
            z.as_mut_slice(),
            n,
            &mut isuppz,
            &mut work,
            lwork,
            &mut iwork,
            liwork,
            &mut info,
        );
    }
    lapack_ok("dsyevr", info)?;
    if m as usize != count {
        return Err(Error::Lapack {
            routine: "dsyevr",
            info: -1000 - m,
        });
    }
    w.truncate(count);
    Ok((w, z))
}

/// Eigenpair with 0-based ascending index `index` of a real symmetric
/// matrix.
///
/// The eigenvalue comes from the eigenvalue-only solver; when it is well
/// separated from its neighbours the eigenvector is obtained by shifted
/// inverse iteration on an LDLᵀ factorization, otherwise by the range
/// solver.
pub fn symmetric_eigenpair(a: &DMatrix<f64>, index: usize) -> Result<(f64, DVector<f64>)> {
    check_square(a)?;
    let dim = a.nrows();
    if index >= dim {
        return Err(Error::InvalidArgument(format!(
            "eigen index {index} invalid for dimension {dim}"
        )));
    }
    let w = symmetric_eigenvalues(a)?;
    let e = w[index];
    let scale = w[0].abs().max(w[dim - 1].abs()).max(f64::MIN_POSITIVE);
    let gap = [index.checked_sub(1).map(|k| e - w[k]), w.get(index + 1).map(|&x| x - e)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    if gap > 1e-6 * scale {
        if let Some(v) = inverse_iteration(a, e, scale)? {
            return Ok((e, v));
        }
    }
    let (values, z) = symmetric_eigen_range(a, index, index)?;
    Ok((values[0], z.column(0).into_owned()))
}

fn inverse_iteration(a: &DMatrix<f64>, shift: f64, scale: f64) -> Result<Option<DVector<f64>>> {
    let n = check_square(a)?;
    let dim = a.nrows();
    for attempt in 0..3 {
        let sigma = shift + attempt as f64 * 1e-12 * scale;
        let mut f = a.clone();
        for i in 0..dim {
            f[(i, i)] -= sigma;
        }
        let mut ipiv = vec![0i32; dim];
        let mut work = vec![0.0; 1];
        let mut info = 0;
        unsafe {
            lapack::dsytrf(b'L', n, f.as_mut_slice(), n, &mut ipiv, &mut work, -1, &mut info);
        }
        lapack_ok("dsytrf", info)?;
        let lwork = (work[0] as i32).max(1);
        let mut work = vec![0.0; lwork as usize];
        unsafe {
            lapack::dsytrf(b'L', n, f.as_mut_slice(), n, &mut ipiv, &mut work, lwork, &mut info);
        }
        if info > 0 {
            continue;
        }
        lapack_ok("dsytrf", info)?;
        let mut x = DVector::from_fn(dim, |i, _| 1.0 + ((i * 7919) % 113) as f64 / 113.0);
        for _ in 0..3 {
            let norm = x.norm();
            if !norm.is_finite() || norm == 0.0 {
                break;
            }
            x /= norm;
            unsafe {
                lapack::dsytrs(b'L', n, 1, f.as_slice(), n, &ipiv, x.as_mut_slice(), n, &mut info);
            }
            lapack_ok("dsytrs", info)?;
        }
        let norm = x.norm();
        if norm.is_finite() && norm > 0.0 {
            x /= norm;
            return Ok(Some(x));
        }
    }
    Ok(None)
}

fn zheevd(a: &mut DMatrix<Complex64>, want_vectors: bool) -> Result<Vec<f64>> {
    let n = check_square(a)?;
    let jobz = if want_vectors { b'V' } else { b'N' };
    let mut w = vec![0.0; a.nrows()];
    if n == 0 {
        return Ok(w);
    }
    let mut work = vec![Complex64::new(0.0, 0.0); 1];
    let mut rwork = vec![0.0; 1];
    let mut iwork = vec![0i32; 1];
    let mut info = 0;
    let data = a.as_mut_slice();
    unsafe {
        lapack::zheevd(
            jobz, b'L', n, data, n, &mut w, &mut work, -1, &mut rwork, -1, &mut iwork, -1, &mut info,
        );
    }
    lapack_ok("zheevd", info)?;
    let lwork = work[0].re as i32;
    let lrwork = rwork[0] as i32;
    let liwork = iwork[0];
    let mut work = vec![Complex64::new(0.0, 0.0); lwork.max(1) as usize];
    let mut rwork = vec![0.0; lrwork.max(1) as usize];
    let mut iwork = vec![0i32; liwork.max(1) as usize];
    unsafe {
        lapack::zheevd(
            jobz, b'L', n, data, n, &mut w, &mut work, lwork, &mut rwork, lrwork, &mut iwork, liwork, &mut info,
        );
    }
    lapack_ok("zheevd", info)?;
    Ok(w)
}

/// Full eigendecomposition of a complex Hermitian matrix (ascending).
pub fn hermitian_eigen(a: &DMatrix<Complex64>) -> Result<(Vec<f64>, DMatrix<Complex64>)> {
    let mut z = a.clone();
    let w = zheevd(&mut z, true)?;
    Ok((w, z))
}

/// Ascending eigenvalues of a complex Hermitian matrix.
pub fn hermitian_eigenvalues(a: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    let mut z = a.clone();
    zheevd(&mut z, false)
}

/// Largest |a_ij - conj(a_ji)|.
pub fn hermiticity_defect(a: &DMatrix<Complex64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j..n {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Largest |a_ij - a_ji|.
pub fn symmetry_defect(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in j + 1..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

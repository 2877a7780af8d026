//! Dense reference implementations used to cross-check the fast paths.
//!
//! Everything here is built from explicit 2^N × 2^N matrices (Kronecker
//! products of 2×2 Pauli matrices) and textbook formulas, and shares no
//! code with the library beyond its data types.

#![allow(dead_code, clippy::needless_range_loop)]

use chaoscorr_core::local_ops::haar_unitary;
use chaoscorr_core::spin_chain::apply_hamiltonian;
use chaoscorr_core::{
    apply_local_unitary, build_hamiltonian, compute_vcm, connected_correlation, partial_trace, pauli_expectation,
    projective_measure, purity, purity_direct, sample_spec, Axis, CumulantRequest, LocalObservable, LocalUnitary,
    MeasurementMode, PauliString, SampleSeed, SpinChainSpec, StateVector,
};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;

pub type CMat = DMatrix<Complex64>;

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn pauli(axis: Axis) -> CMat {
    let z = c(0.0, 0.0);
    let one = c(1.0, 0.0);
    match axis {
        Axis::X => CMat::from_row_slice(2, 2, &[z, one, one, z]),
        Axis::Y => CMat::from_row_slice(2, 2, &[z, c(0.0, -1.0), c(0.0, 1.0), z]),
        Axis::Z => CMat::from_row_slice(2, 2, &[one, z, z, -one]),
    }
}

/// `⊗` of per-site 2×2 operators; site 1 is the least significant factor.
pub fn kron_sites(ops: &[CMat]) -> CMat {
    let mut out = CMat::identity(1, 1);
    for op in ops {
        out = op.kronecker(&out);
    }
    out
}

/// `op` on `site`, identity elsewhere.
pub fn embed(n: usize, site: usize, op: &CMat) -> CMat {
    let ops: Vec<CMat> = (1..=n)
        .map(|l| if l == site { op.clone() } else { CMat::identity(2, 2) })
        .collect();
    kron_sites(&ops)
}

pub fn dense_single(n: usize, site: usize, axis: Axis) -> CMat {
    embed(n, site, &pauli(axis))
}

pub fn dense_pauli_string(n: usize, p: &PauliString) -> CMat {
    let ops: Vec<CMat> = (1..=n)
        .map(|l| match p.factors().iter().find(|f| f.site == l) {
            Some(f) => pauli(f.axis),
            None => CMat::identity(2, 2),
        })
        .collect();
    kron_sites(&ops)
}

pub fn ket(state: &StateVector) -> DVector<Complex64> {
    DVector::from_column_slice(state.amplitudes())
}

pub fn dense_expectation(state: &StateVector, op: &CMat) -> Complex64 {
    let v = ket(state);
    (v.adjoint() * op * &v)[(0, 0)]
}

/// `ρ[a, b] = Σ_env ψ(a, env) ψ*(b, env)`, with bit `k` of `a` the value
/// of site `keep[k]`.
pub fn naive_partial_trace(state: &StateVector, keep: &[usize]) -> CMat {
    let n = state.n_sites();
    let m = keep.len();
    let rest: Vec<usize> = (1..=n).filter(|s| !keep.contains(s)).collect();
    let assemble = |a: usize, e: usize| -> usize {
        let mut i = 0;
        for (k, &s) in keep.iter().enumerate() {
            i |= ((a >> k) & 1) << (s - 1);
        }
        for (k, &s) in rest.iter().enumerate() {
            i |= ((e >> k) & 1) << (s - 1);
        }
        i
    };
    let amps = state.amplitudes();
    let mut rho = CMat::zeros(1 << m, 1 << m);
    for a in 0..1 << m {
        for b in 0..1 << m {
            let mut sum = c(0.0, 0.0);
            for e in 0..1 << (n - m) {
                sum += amps[assemble(a, e)] * amps[assemble(b, e)].conj();
            }
            rho[(a, b)] = sum;
        }
    }
    rho
}

/// `Σ λ²` over the eigenvalues of a Hermitian matrix.
pub fn eigen_purity(rho: &CMat) -> f64 {
    rho.clone().symmetric_eigenvalues().iter().map(|l| l * l).sum()
}

/// VCM from dense operators, including same-site products.
pub fn dense_vcm(state: &StateVector) -> CMat {
    let n = state.n_sites();
    let ops: Vec<CMat> = (1..=n).flat_map(|l| Axis::ALL.map(|a| dense_single(n, l, a))).collect();
    let means: Vec<Complex64> = ops.iter().map(|o| dense_expectation(state, o)).collect();
    let mut v = CMat::zeros(3 * n, 3 * n);
    for i in 0..3 * n {
        for j in 0..3 * n {
            v[(i, j)] = dense_expectation(state, &(&ops[i] * &ops[j])) - means[i] * means[j];
        }
    }
    v
}

/// Hamiltonian as a sum of Kronecker products.
pub fn dense_hamiltonian(spec: &SpinChainSpec) -> CMat {
    let n = spec.n_sites;
    let mut h = CMat::zeros(1 << n, 1 << n);
    let j = c(spec.coupling, 0.0);
    let hf = c(spec.field, 0.0);
    for l in 1..=n {
        let r = l % n + 1;
        let pair = |a: Axis| dense_single(n, l, a) * dense_single(n, r, a);
        let yy = c(std::f64::consts::SQRT_2 * spec.phases[l - 1].cos(), 0.0);
        h += (pair(Axis::X) + pair(Axis::Z) + pair(Axis::Y) * yy) * j;
        let field = dense_single(n, l, Axis::X) * c(spec.angles[l - 1].sin(), 0.0)
            + dense_single(n, l, Axis::Z) * c(spec.angles[l - 1].cos(), 0.0);
        h -= field * hf;
    }
    h
}

fn moment(state: &StateVector, obs: &[LocalObservable], subset: &[usize]) -> f64 {
    let n = state.n_sites();
    let mut op = CMat::identity(1 << n, 1 << n);
    for &k in subset {
        op *= dense_single(n, obs[k].site, obs[k].axis);
    }
    dense_expectation(state, &op).re
}

/// Textbook cumulant formulas for orders 2, 3 and 4.
pub fn explicit_cumulant(state: &StateVector, obs: &[LocalObservable]) -> f64 {
    let e = |s: &[usize]| moment(state, obs, s);
    match obs.len() {
        2 => e(&[0, 1]) - e(&[0]) * e(&[1]),
        3 => {
            e(&[0, 1, 2]) - e(&[0]) * e(&[1, 2]) - e(&[1]) * e(&[0, 2]) - e(&[2]) * e(&[0, 1])
                + 2.0 * e(&[0]) * e(&[1]) * e(&[2])
        }
        4 => {
            let (m1, m2, m3, m4) = (e(&[0]), e(&[1]), e(&[2]), e(&[3]));
            let (m12, m13, m14, m23, m24, m34) =
                (e(&[0, 1]), e(&[0, 2]), e(&[0, 3]), e(&[1, 2]), e(&[1, 3]), e(&[2, 3]));
            e(&[0, 1, 2, 3])
                - m1 * e(&[1, 2, 3])
                - m2 * e(&[0, 2, 3])
                - m3 * e(&[0, 1, 3])
                - m4 * e(&[0, 1, 2])
                - m12 * m34
                - m13 * m24
                - m14 * m23
                + 2.0 * (m12 * m3 * m4 + m13 * m2 * m4 + m14 * m2 * m3 + m23 * m1 * m4 + m24 * m1 * m3 + m34 * m1 * m2)
                - 6.0 * m1 * m2 * m3 * m4
        }
        k => panic!("no explicit formula for order {k}"),
    }
}

/// Dense moments `E[Π_{k ∈ mask} a_k]` for every subset mask.
pub fn moment_table(state: &StateVector, obs: &[LocalObservable]) -> Vec<f64> {
    let m = obs.len();
    (0usize..1 << m)
        .map(|mask| moment(state, obs, &(0..m).filter(|k| mask & (1 << k) != 0).collect::<Vec<_>>()))
        .collect()
}

/// `ln Z(J)` with `Z = ⟨Π_i exp(-J_i a_i)⟩ = ⟨Π_i (cosh J_i - sinh J_i a_i)⟩`.
///
/// `Z - 1` is accumulated term by term over subsets so that `ln_1p` keeps
/// full relative precision for small `J`.
pub fn ln_z(moments: &[f64], j: &[f64]) -> f64 {
    let m = j.len();
    let mut z_minus_one = j.iter().map(|x| x.cosh().ln()).sum::<f64>().exp_m1();
    for mask in 1usize..1 << m {
        let mut coeff = 1.0;
        for k in 0..m {
            coeff *= if mask & (1 << k) != 0 {
                -j[k].sinh()
            } else {
                j[k].cosh()
            };
        }
        z_minus_one += coeff * moments[mask];
    }
    z_minus_one.ln_1p()
}

/// `(-1)^m ∂^m ln Z / ∂J_1 … ∂J_m` at `J = 0` by nested central differences.
pub fn finite_difference_cumulant(state: &StateVector, obs: &[LocalObservable], step: f64) -> f64 {
    let m = obs.len();
    let moments = moment_table(state, obs);
    let mut acc = 0.0;
    for signs in 0usize..1 << m {
        let j: Vec<f64> = (0..m)
            .map(|k| if signs & (1 << k) != 0 { -step } else { step })
            .collect();
        let parity = if signs.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
        acc += parity * ln_z(&moments, &j);
    }
    let sign = if m.is_multiple_of(2) { 1.0 } else { -1.0 };
    sign * acc / (2.0 * step).powi(m as i32)
}

pub fn max_abs_diff(a: &CMat, b: &CMat) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Every Pauli string on `n` sites (4^n of them, including the identity).
pub fn all_pauli_strings(n: usize) -> Vec<PauliString> {
    (0..4usize.pow(n as u32))
        .map(|code| {
            let factors = (1..=n).filter_map(|l| {
                let digit = (code / 4usize.pow(l as u32 - 1)) % 4;
                Axis::from_index(digit.wrapping_sub(1)).map(|a| LocalObservable::new(l, a))
            });
            PauliString::new(factors).expect("distinct sites")
        })
        .collect()
}

/// All non-empty subsets of `1..=n`, as sorted site lists.
pub fn all_subsets(n: usize) -> Vec<Vec<usize>> {
    (1usize..(1 << n))
        .map(|mask| (1..=n).filter(|s| mask & (1 << (s - 1)) != 0).collect())
        .collect()
}

/// `(name, max |fast - dense|)` for every fast-path quantity on `state`.
/// `seed` drives the auxiliary random choices (chain parameters, local
/// unitaries).
pub fn equivalence_defects(state: &StateVector, seed: u64) -> Vec<(&'static str, f64)> {
    let n = state.n_sites();
    let mut out = Vec::new();

    let pauli_err = all_pauli_strings(n)
        .iter()
        .map(|p| (pauli_expectation(state, p).unwrap() - dense_expectation(state, &dense_pauli_string(n, p))).norm())
        .fold(0.0, f64::max);
    out.push(("pauli_expectation", pauli_err));

    let mut trace_err = 0.0f64;
    let mut purity_err = 0.0f64;
    for subset in all_subsets(n) {
        for keep in [subset.clone(), subset.iter().rev().copied().collect()] {
            let naive = naive_partial_trace(state, &keep);
            let rho = partial_trace(state, &keep).unwrap();
            trace_err = trace_err.max(max_abs_diff(rho.matrix(), &naive));
            let reference = eigen_purity(&naive);
            purity_err = purity_err
                .max((purity(&rho) - reference).abs())
                .max((purity_direct(state, &keep).unwrap() - reference).abs());
        }
    }
    out.push(("partial_trace", trace_err));
    out.push(("purity", purity_err));

    let vcm = compute_vcm(state).unwrap();
    out.push(("vcm", max_abs_diff(vcm.matrix(), &dense_vcm(state))));

    let mut cumulant_err = 0.0f64;
    for order in 2..=n.min(4) {
        for pattern in 0..9usize {
            let obs: Vec<LocalObservable> = (0..order)
                .map(|k| LocalObservable::new(n - k, Axis::ALL[(pattern + 2 * k + pattern / 3) % 3]))
                .collect();
            let fast = connected_correlation(state, &CumulantRequest::new(obs.clone()).unwrap()).unwrap();
            cumulant_err = cumulant_err.max((fast - explicit_cumulant(state, &obs)).abs());
        }
    }
    out.push(("cumulant", cumulant_err));

    if n >= 2 {
        let spec = sample_spec(n, 0.7, 1.3, SampleSeed::new(seed, n as u64)).unwrap();
        let dense = dense_hamiltonian(&spec);
        let built = build_hamiltonian(&spec).unwrap().map(|x| c(x, 0.0));
        let applied = DVector::from_vec(apply_hamiltonian(&spec, state.amplitudes()).unwrap());
        let h_err = max_abs_diff(&built, &dense).max((applied - &dense * ket(state)).camax());
        out.push(("hamiltonian", h_err));
    }

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut unitary_err = 0.0f64;
    let mut measure_err = 0.0f64;
    for site in 1..=n {
        let u: LocalUnitary = haar_unitary(&mut rng);
        let u_dense = CMat::from_fn(2, 2, |r, col| u[(r, col)]);
        let fast = apply_local_unitary(state, site, &u).unwrap();
        unitary_err = unitary_err.max((ket(&fast) - embed(n, site, &u_dense) * ket(state)).camax());
        if n >= 2 {
            for outcome in 0..2u8 {
                let Ok(rec) = projective_measure(state, site, &u, MeasurementMode::Forced(outcome)) else {
                    continue;
                };
                // project with |b⟩⟨b| ⊗ I, then drop the measured site
                let b = u_dense.column(outcome as usize).into_owned();
                let projected = embed(n, site, &(&b * b.adjoint())) * ket(state);
                let p = projected.norm_squared();
                let rotated = embed(n, site, &u_dense.adjoint()) * projected * c(1.0 / p.sqrt(), 0.0);
                let bit = 1usize << (site - 1);
                let expected: Vec<Complex64> = (0..1usize << n)
                    .filter(|i| (i & bit != 0) == (outcome == 1))
                    .map(|i| rotated[i])
                    .collect();
                let got = rec.post_state.amplitudes();
                let diff = got
                    .iter()
                    .zip(&expected)
                    .map(|(x, y)| (x - y).norm())
                    .fold(0.0, f64::max);
                measure_err = measure_err.max(diff).max((rec.probability - p).abs());
            }
        }
    }
    out.push(("local_unitary", unitary_err));
    if n >= 2 {
        out.push(("measurement", measure_err));
    }
    out
}

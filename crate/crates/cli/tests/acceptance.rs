//! Acceptance suite: one PASS/FAIL line per criterion, followed by the
//! individual comparisons behind it.
//!
//! Environment:
//! - `ACCEPTANCE_ONLY=4,5` runs a subset of the criteria.
//! - `ACCEPTANCE_CACHE_DIR=<dir>` keeps spin-chain eigenstates between runs.
//! - `ACCEPTANCE_STRICT=1` makes any FAIL line a non-zero exit.
//!
//! Statistical shortfalls are reported, not hidden; without
//! `ACCEPTANCE_STRICT` only errors and panics fail the test binary.

#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use chaoscorr_cli::checks::run_checks;
use chaoscorr_cli::config::{EnsembleKind, Experiment, ExperimentConfig, DEFAULT_SEED};
use chaoscorr_cli::experiments::{run_invariance, run_spacing};
use chaoscorr_cli::figures::{run_fig1, run_fig2};
use chaoscorr_cli::seeds::auxiliary_seed;
use chaoscorr_cli::{CentralStateCache, HaarSampler, StateProvider};
use chaoscorr_core::local_ops::max_purity_deficit;
use chaoscorr_core::{
    additive_fluctuation, compute_vcm, connected_correlation, disentangling_cost_probe, extremal_eigenvalues,
    make_cat_state, pauli_expectation, projective_measure, purity_direct, sample_state, AdditiveOperatorSpec, Axis,
    CumulantRequest, EnsembleClass, EnsembleSummary, LocalObservable, LocalUnitary, MeasurementMode, PauliString,
    SampleSeed, SpacingStatistics, StateFamily, StateVector,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

type Failure = Box<dyn std::error::Error + Send + Sync>;

#[derive(Default)]
struct Outcome {
    lines: Vec<(bool, String)>,
}

impl Outcome {
    fn check(&mut self, pass: bool, text: impl Into<String>) {
        self.lines.push((pass, text.into()));
    }

    fn z(&mut self, label: &str, mean: f64, target: f64, se: f64, sigmas: f64) {
        let z = (mean - target) / se;
        self.check(
            z.abs() <= sigmas,
            format!("{label}: {mean:.7e} vs {target:.7e}, z = {z:+.2} (limit {sigmas})"),
        );
    }

    fn pass(&self) -> bool {
        self.lines.iter().all(|(p, _)| *p)
    }
}

struct Context {
    seed: u64,
    states: StateProvider,
}

struct Criterion {
    number: u32,
    title: &'static str,
    budget: Option<Duration>,
    run: fn(&Context) -> Result<Outcome, Failure>,
}

const MINUTE: u64 = 60;

fn criteria() -> Vec<Criterion> {
    vec![
        Criterion {
            number: 1,
            title: "moment oracles",
            budget: Some(Duration::from_secs(30)),
            run: moments,
        },
        Criterion {
            number: 2,
            title: "mean VCM",
            budget: Some(Duration::from_secs(2 * MINUTE)),
            run: mean_vcm,
        },
        Criterion {
            number: 3,
            title: "two-point correlation",
            budget: Some(Duration::from_secs(2 * MINUTE)),
            run: two_point,
        },
        Criterion {
            number: 4,
            title: "VCM extremal eigenvalues",
            budget: Some(Duration::from_secs(20 * MINUTE)),
            run: fig1,
        },
        Criterion {
            number: 5,
            title: "subsystem purity",
            budget: Some(Duration::from_secs(25 * MINUTE)),
            run: fig2,
        },
        Criterion {
            number: 6,
            title: "spacing statistics",
            budget: None,
            run: spacing,
        },
        Criterion {
            number: 7,
            title: "invariance under local measurements",
            budget: Some(Duration::from_secs(5 * MINUTE)),
            run: invariance,
        },
        Criterion {
            number: 8,
            title: "cat-state contrasts",
            budget: Some(Duration::from_secs(MINUTE)),
            run: cat_contrasts,
        },
        Criterion {
            number: 9,
            title: "oracle equivalence",
            budget: Some(Duration::from_secs(MINUTE)),
            run: equivalence,
        },
        Criterion {
            number: 10,
            title: "cumulant correctness",
            budget: None,
            run: cumulants,
        },
    ]
}

fn pow2(n: usize) -> f64 {
    (1u64 << n) as f64
}

fn classes() -> [EnsembleClass; 2] {
    [EnsembleClass::Gue, EnsembleClass::Goe]
}

/// Haar moments of one component of a unit vector in `C^d` or `R^d`.
fn haar_moments(class: EnsembleClass, d: f64) -> (f64, f64, f64) {
    match class {
        EnsembleClass::Gue => (1.0 / d, 2.0 / (d * (d + 1.0)), 1.0 / (d * (d + 1.0))),
        EnsembleClass::Goe => (1.0 / d, 3.0 / (d * (d + 2.0)), 1.0 / (d * (d + 2.0))),
    }
}

/// Mean purity of `m` sites of a Haar state on `n` sites.
fn haar_purity(class: EnsembleClass, m: usize, n: usize) -> f64 {
    let (da, db) = (pow2(m), pow2(n - m));
    match class {
        EnsembleClass::Gue => (da + db) / (da * db + 1.0),
        EnsembleClass::Goe => (da + db + 1.0) / (da * db + 2.0),
    }
}

fn moments(ctx: &Context) -> Result<Outcome, Failure> {
    let mut config = ExperimentConfig::defaults(Experiment::MomentsCheck);
    config.master_seed = ctx.seed;
    config.checks.moment_sizes = vec![2, 4, 6];
    config.checks.moment_samples = 5000;
    let report = run_checks(&config, &ctx.states)?;
    let mut out = Outcome::default();
    for class in classes() {
        for n in [2usize, 4, 6] {
            let (m2, m4, cross) = haar_moments(class, pow2(n));
            let norm = report
                .find(&format!("norm {class} N={n}"))
                .ok_or("norm check missing")?;
            out.check(norm.pass, format!("norm {class} N={n}: mean {:.15}", norm.empirical));
            for (name, target) in [("moment2", m2), ("moment4", m4), ("cross_moment", cross)] {
                let key = format!("{name} {class} N={n}");
                let c = report.find(&key).ok_or_else(|| format!("{key} missing"))?;
                out.z(
                    &format!("{key} ({} samples)", config.checks.moment_samples),
                    c.empirical,
                    target,
                    c.se.unwrap(),
                    4.0,
                );
            }
        }
    }
    Ok(out)
}

fn mean_vcm(ctx: &Context) -> Result<Outcome, Failure> {
    let (n, samples, class) = (8usize, 1000u64, EnsembleClass::Gue);
    let master = auxiliary_seed(ctx.seed, "acceptance", "vcm", n);
    let rows: Vec<(f64, f64)> = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<(f64, f64), Failure> {
            let vcm = compute_vcm(&ctx.states.random_state(class, n, master, k)?)?;
            let m = vcm.matrix();
            let dim = m.nrows() as f64;
            let trace: f64 = (0..m.nrows()).map(|i| m[(i, i)].re).sum();
            let total: f64 = m.iter().map(|x| x.re).sum();
            Ok((trace / dim, (total - trace) / (dim * dim - dim)))
        })
        .collect::<Result<_, _>>()?;
    let diag = EnsembleSummary::from_samples("diag", "", &rows.iter().map(|r| r.0).collect::<Vec<_>>());
    let off = EnsembleSummary::from_samples("off", "", &rows.iter().map(|r| r.1).collect::<Vec<_>>());
    let mut out = Outcome::default();
    let exact = 256.0 / 257.0;
    out.check((exact - 0.996109f64).abs() < 5e-7, format!("2^8/(2^8+1) = {exact:.7}"));
    out.z(
        "mean diagonal element, GUE N=8, 1000 samples",
        diag.mean,
        0.996109,
        diag.standard_error,
        3.0,
    );
    out.z(
        "mean off-diagonal element, GUE N=8, 1000 samples",
        off.mean,
        0.0,
        off.standard_error,
        3.0,
    );
    Ok(out)
}

fn mean_sq_two_point(ctx: &Context, class: EnsembleClass, n: usize, samples: u64) -> Result<EnsembleSummary, Failure> {
    // real states have <s_a s_b> = 0 whenever an odd number of the axes is y
    let pairs: Vec<PauliString> = Axis::ALL
        .iter()
        .flat_map(|&a| Axis::ALL.iter().map(move |&b| (a, b)))
        .filter(|&(a, b)| class == EnsembleClass::Gue || ((a == Axis::Y) == (b == Axis::Y)))
        .map(|(a, b)| PauliString::pair(1, a, 2, b))
        .collect::<Result<_, _>>()?;
    let master = auxiliary_seed(ctx.seed, "acceptance", &format!("two-point {class}"), n);
    let values: Vec<f64> = (0..samples)
        .into_par_iter()
        .map(|k| -> Result<f64, Failure> {
            let s = ctx.states.random_state(class, n, master, k)?;
            let mut total = 0.0;
            for p in &pairs {
                total += pauli_expectation(&s, p)?.norm_sqr();
            }
            Ok(total / pairs.len() as f64)
        })
        .collect::<Result<_, _>>()?;
    Ok(EnsembleSummary::from_samples(
        "two_point",
        format!("{class} N={n}"),
        &values,
    ))
}

fn two_point(ctx: &Context) -> Result<Outcome, Failure> {
    let mut out = Outcome::default();
    out.check(
        (2.0f64 / 258.0 - 0.0077519).abs() < 5e-8,
        format!("2/258 = {:.7}", 2.0 / 258.0),
    );
    let goe = mean_sq_two_point(ctx, EnsembleClass::Goe, 8, 1000)?;
    out.z(
        "GOE N=8, 5 time-reversal-even axis pairs, 1000 samples",
        goe.mean,
        0.0077519,
        goe.standard_error,
        3.0,
    );
    let gue = mean_sq_two_point(ctx, EnsembleClass::Gue, 6, 1000)?;
    out.z(
        "GUE N=6, all 9 axis pairs, 1000 samples",
        gue.mean,
        1.0 / 66.0,
        gue.standard_error,
        3.0,
    );
    Ok(out)
}

fn fig1(ctx: &Context) -> Result<Outcome, Failure> {
    let mut config = ExperimentConfig::defaults(Experiment::Fig1);
    config.master_seed = ctx.seed;
    config.ensembles = vec![EnsembleKind::Gue, EnsembleKind::SpinChain];
    config.n_range = vec![4, 6, 8, 10, 12];
    config.samples = 100;
    let result = run_fig1(&config, &ctx.states)?;
    let gue = |n| result.group(EnsembleKind::Gue, n).ok_or("missing GUE group");
    let chain = |n| {
        result
            .group(EnsembleKind::SpinChain, n)
            .ok_or("missing spin-chain group")
    };
    let mut out = Outcome::default();
    let e_max: Vec<f64> = config
        .n_range
        .iter()
        .map(|&n| gue(n).map(|g| g.e_max.mean))
        .collect::<Result<_, _>>()?;
    let e_min: Vec<f64> = config
        .n_range
        .iter()
        .map(|&n| gue(n).map(|g| g.e_min.mean))
        .collect::<Result<_, _>>()?;
    let fmt = |v: &[f64]| v.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
    out.check(
        e_max.windows(2).all(|w| w[1] < w[0]),
        format!("GUE mean e_max strictly decreasing: {}", fmt(&e_max)),
    );
    out.check(
        e_min.windows(2).all(|w| w[1] > w[0]),
        format!("GUE mean e_min strictly increasing: {}", fmt(&e_min)),
    );
    let g12 = gue(12)?;
    for (name, s) in [("e_max", &g12.e_max), ("e_min", &g12.e_min)] {
        let (lo, hi) = (1.0 - 5.0 * s.std, 1.0 + 5.0 * s.std);
        out.check(
            (lo..=hi).contains(&s.mean),
            format!(
                "GUE N=12 mean {name} {:.5} in [1 - 5 std, 1 + 5 std] = [{lo:.5}, {hi:.5}]",
                s.mean
            ),
        );
    }
    for n in [10, 12] {
        let (g, c) = (gue(n)?, chain(n)?);
        for (name, a, b) in [("e_max", &c.e_max, &g.e_max), ("e_min", &c.e_min, &g.e_min)] {
            let limit = 3.0 * a.std.hypot(b.std);
            let gap = (a.mean - b.mean).abs();
            out.check(
                gap <= limit,
                format!(
                    "spin-chain vs GUE N={n} {name}: {:.5} vs {:.5}, |diff| {gap:.5} (limit 3 combined std = {limit:.5})",
                    a.mean, b.mean
                ),
            );
        }
    }
    Ok(out)
}

fn fig2(ctx: &Context) -> Result<Outcome, Failure> {
    let mut config = ExperimentConfig::defaults(Experiment::Fig2);
    config.master_seed = ctx.seed;
    config.n_range = vec![12];
    config.samples = 100;
    let n = 12;
    let result = run_fig2(&config, &ctx.states)?;
    let source = |k| result.source(k).ok_or("missing fig2 source");
    let (gue, goe, chain) = (
        source(EnsembleKind::Gue)?,
        source(EnsembleKind::Goe)?,
        source(EnsembleKind::SpinChain)?,
    );
    let log_se = |r: &chaoscorr_core::entanglement::PurityRow| r.se_purity / (r.mean_purity * std::f64::consts::LN_2);
    let mut out = Outcome::default();
    for r in &gue.sweep.per_m {
        out.z(
            &format!("GUE mean purity m={}", r.m),
            r.mean_purity,
            haar_purity(EnsembleClass::Gue, r.m, n),
            r.se_purity,
            3.0,
        );
    }
    let m6 = gue.sweep.per_m.iter().find(|r| r.m == 6).ok_or("no m=6 row")?;
    out.z(
        "GUE m=6 -log2(mean purity), 5.001 within 3 SE",
        m6.neg_log2_mean_purity,
        5.001,
        log_se(m6),
        3.0,
    );
    for (a, b) in gue.sweep.per_m.iter().zip(&goe.sweep.per_m) {
        let band = log_se(a).hypot(log_se(b));
        let gap = (a.neg_log2_mean_purity - b.neg_log2_mean_purity).abs();
        out.check(
            gap < band,
            format!(
                "GUE/GOE overlap m={}: {:.5} vs {:.5}, |diff| {gap:.5} (limit 1 combined SE = {band:.5}, {:.2} SE)",
                a.m,
                a.neg_log2_mean_purity,
                b.neg_log2_mean_purity,
                gap / band
            ),
        );
    }
    for r in chain.sweep.per_m.iter().filter(|r| r.m <= 4) {
        let analytic = -haar_purity(EnsembleClass::Goe, r.m, n).log2();
        let rel = (r.neg_log2_mean_purity - analytic).abs() / analytic;
        out.check(
            rel <= 0.10,
            format!(
                "spin-chain m={}: {:.5} vs {analytic:.5}, relative deviation {rel:.4} (limit 0.10)",
                r.m, r.neg_log2_mean_purity
            ),
        );
    }
    Ok(out)
}

/// Draws from the Wigner surmise by inverting its distribution function.
fn synthetic_wigner(count: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let u: f64 = rng.random();
            (-4.0 * (-u).ln_1p() / std::f64::consts::PI).sqrt()
        })
        .collect()
}

fn spacing(ctx: &Context) -> Result<Outcome, Failure> {
    let mut out = Outcome::default();
    let chaotic = run_spacing(12, 1.0, 1.0, ctx.seed, 20, 0.5)?;
    let calibration = SpacingStatistics::from_spacings(synthetic_wigner(chaotic.pooled_spacings, ctx.seed));
    out.check(
        calibration.ks_distance_goe < 0.05 && calibration.ks_distance_goe < calibration.ks_distance_poisson,
        format!(
            "calibration: {} synthetic Wigner spacings give KS to Wigner {:.5}, to Poisson {:.5}",
            chaotic.pooled_spacings, calibration.ks_distance_goe, calibration.ks_distance_poisson
        ),
    );
    let summary = |r: &chaoscorr_cli::experiments::SpacingResult| {
        format!(
            "N=12 J=h={}: {} realizations, {} spacings, KS to Wigner {:.5}, KS to Poisson {:.5}",
            r.coupling,
            r.realizations.len(),
            r.pooled_spacings,
            r.ks_distance_goe,
            r.ks_distance_poisson
        )
    };
    out.check(
        chaotic.ks_distance_goe < chaotic.ks_distance_poisson && chaotic.ks_distance_goe < 0.05,
        format!("{}; needs Wigner < Poisson and Wigner < 0.05", summary(&chaotic)),
    );
    let control = run_spacing(12, 0.01, 0.01, ctx.seed, 20, 0.5)?;
    out.check(
        control.ks_distance_poisson < control.ks_distance_goe,
        format!("control {}; needs Poisson < Wigner", summary(&control)),
    );
    Ok(out)
}

fn invariance(ctx: &Context) -> Result<Outcome, Failure> {
    let mut config = ExperimentConfig::defaults(Experiment::Invariance);
    config.master_seed = ctx.seed;
    config.ensembles = vec![EnsembleKind::Gue];
    config.invariance.final_sites = 4;
    let reports = run_invariance(&config, "acceptance-invariance", 8, 500)?;
    let report = reports.first().ok_or("no invariance report")?;
    let mut out = Outcome::default();
    let sizes: Vec<usize> = report.steps.iter().map(|s| s.n_sites).collect();
    out.check(
        sizes == [7, 6, 5, 4],
        format!("post-measurement sizes {sizes:?}, last site measured each time"),
    );
    for step in &report.steps {
        let s = &step.summary;
        let target = haar_purity(EnsembleClass::Gue, 3, step.n_sites);
        out.z(
            &format!(
                "GUE 8 -> {} sites, mean purity m=3, {} samples",
                step.n_sites, s.sample_count
            ),
            s.mean,
            target,
            s.standard_error,
            3.0,
        );
    }
    Ok(out)
}

fn sz_fluctuation(state: &StateVector) -> f64 {
    let n = state.n_sites() as i32;
    let (mut first, mut second) = (0.0, 0.0);
    for (i, c) in state.amplitudes().iter().enumerate() {
        let total = (n - 2 * (i.count_ones() as i32)) as f64;
        first += c.norm_sqr() * total;
        second += c.norm_sqr() * total * total;
    }
    second - first * first
}

fn cat_contrasts(ctx: &Context) -> Result<Outcome, Failure> {
    let mut out = Outcome::default();
    let (mut worst_emax, mut worst_dense, mut worst_fluct, mut worst_oracle, mut worst_deficit) =
        (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let mut all_basis_states = true;
    for n in 3..=12usize {
        let cat = make_cat_state(n)?;
        let vcm = compute_vcm(&cat)?;
        let (e_max, _) = extremal_eigenvalues(&vcm)?;
        worst_emax = worst_emax.max((e_max - n as f64).abs());
        let dense_max = vcm
            .matrix()
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::MIN, f64::max);
        worst_dense = worst_dense.max((dense_max - n as f64).abs());
        let nn = (n * n) as f64;
        worst_fluct =
            worst_fluct.max((additive_fluctuation(&cat, &AdditiveOperatorSpec::uniform(n, Axis::Z))? - nn).abs());
        worst_oracle = worst_oracle.max((sz_fluctuation(&cat) - nn).abs());
        for outcome in [0u8, 1] {
            let post =
                projective_measure(&cat, 1, &LocalUnitary::identity(), MeasurementMode::Forced(outcome))?.post_state;
            worst_deficit = worst_deficit.max(max_purity_deficit(&post)?);
            let m = post.n_sites();
            for mask in 1usize..(1 << m) - 1 {
                let keep: Vec<usize> = (1..=m).filter(|s| mask & (1 << (s - 1)) != 0).collect();
                worst_deficit = worst_deficit.max(1.0 - purity_direct(&post, &keep)?);
            }
            all_basis_states &= post.amplitudes().iter().filter(|c| c.norm() > 1e-12).count() == 1;
        }
    }
    out.check(
        worst_emax <= 1e-8,
        format!("N=3..12: max |e_max - N| = {worst_emax:.2e} (limit 1e-8)"),
    );
    out.check(
        worst_dense <= 1e-8,
        format!("N=3..12: independent eigen-solve max |e_max - N| = {worst_dense:.2e}"),
    );
    out.check(
        worst_fluct <= 1e-8,
        format!("N=3..12: max |Var(sum s_z) - N^2| = {worst_fluct:.2e} (limit 1e-8)"),
    );
    out.check(
        worst_oracle <= 1e-8,
        format!("N=3..12: direct amplitude sum max |Var - N^2| = {worst_oracle:.2e}"),
    );
    out.check(
        worst_deficit <= 1e-12 && all_basis_states,
        format!("one forced measurement of site 1: max 1 - Tr rho_A^2 over all bipartitions = {worst_deficit:.2e} (limit 1e-12), post-states are basis states: {all_basis_states}"),
    );
    for n in [6usize, 8, 10] {
        let runs: Vec<_> = (0..5u64)
            .map(|k| {
                disentangling_cost_probe(
                    StateFamily::Chaotic(EnsembleClass::Gue),
                    n,
                    n - 2,
                    SampleSeed::new(auxiliary_seed(ctx.seed, "acceptance", "probe", n), k),
                )
            })
            .collect::<Result<_, _>>()?;
        let still = runs.iter().filter(|r| r.disentangled_after.is_none()).count();
        let smallest = runs
            .iter()
            .filter_map(|r| r.history.last())
            .map(|h| h.max_purity_deficit)
            .fold(f64::INFINITY, f64::min);
        out.check(
            still == runs.len(),
            format!("GUE N={n}: {still} of {} states still entangled after {} measurements (smallest deficit {smallest:.3e})", runs.len(), n - 2),
        );
    }
    Ok(out)
}

fn equivalence(ctx: &Context) -> Result<Outcome, Failure> {
    let mut worst: std::collections::BTreeMap<&'static str, f64> = Default::default();
    let mut states = 0;
    for n in 1..=4usize {
        let mut family: Vec<StateVector> = Vec::new();
        for class in classes() {
            for k in 0..4u64 {
                family.push(sample_state(
                    class,
                    n,
                    SampleSeed::new(auxiliary_seed(ctx.seed, "acceptance", "oracle", n), k),
                )?);
            }
        }
        family.push(StateVector::basis(n, (1 << n) - 1)?);
        family.push(StateVector::all_up(n)?);
        if n >= 2 {
            family.push(make_cat_state(n)?);
        }
        for (k, s) in family.iter().enumerate() {
            for (name, err) in oracle::equivalence_defects(s, ctx.seed ^ (k as u64 + 16 * n as u64)) {
                let e = worst.entry(name).or_insert(0.0);
                *e = e.max(err);
            }
            states += 1;
        }
    }
    let mut out = Outcome::default();
    for (name, err) in worst {
        out.check(
            err <= 1e-10,
            format!("{name}: max |fast - dense| = {err:.2e} over {states} states, N = 1..4 (limit 1e-10)"),
        );
    }
    Ok(out)
}

fn random_product_state(n: usize, rng: &mut ChaCha8Rng) -> Result<StateVector, Failure> {
    let mut amps = vec![Complex64::new(1.0, 0.0)];
    for _ in 0..n {
        let theta: f64 = rng.random::<f64>() * std::f64::consts::PI;
        let phi: f64 = rng.random::<f64>() * std::f64::consts::TAU;
        let up = Complex64::new((theta / 2.0).cos(), 0.0);
        let down = Complex64::from_polar((theta / 2.0).sin(), phi);
        // the new site is the most significant bit so far
        amps = amps
            .iter()
            .map(|a| a * up)
            .chain(amps.iter().map(|a| a * down))
            .collect();
    }
    Ok(StateVector::new(n, amps)?)
}

fn cumulants(ctx: &Context) -> Result<Outcome, Failure> {
    let n = 6;
    let observables = |order: usize, pattern: usize| -> Vec<LocalObservable> {
        let sites: Vec<usize> = match pattern % 3 {
            0 => (1..=order).collect(),
            1 => (n + 1 - order..=n).rev().collect(),
            _ => (0..order)
                .map(|k| 1 + (2 * k + pattern) % n)
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect(),
        };
        sites
            .iter()
            .enumerate()
            .map(|(k, &s)| LocalObservable::new(s, Axis::ALL[(pattern + k + k * k) % 3]))
            .collect()
    };
    let mut out = Outcome::default();
    let (mut worst_fd, mut cases) = (0.0f64, 0);
    for class in classes() {
        for k in 0..3u64 {
            let state = sample_state(
                class,
                n,
                SampleSeed::new(auxiliary_seed(ctx.seed, "acceptance", "cumulant", n), k),
            )?;
            for order in [3usize, 4] {
                for pattern in 0..9 {
                    let obs = observables(order, pattern);
                    if obs.len() != order {
                        continue;
                    }
                    let kappa = connected_correlation(&state, &CumulantRequest::new(obs.clone())?)?;
                    let fd = oracle::finite_difference_cumulant(&state, &obs, 1e-3);
                    worst_fd = worst_fd.max((kappa - fd).abs());
                    cases += 1;
                }
            }
        }
    }
    out.check(worst_fd <= 1e-6, format!("orders 3 and 4 on {cases} (state, observables) cases at N=6: max |kappa - finite difference of ln Z| = {worst_fd:.2e} (limit 1e-6)"));

    let mut rng = ChaCha8Rng::seed_from_u64(auxiliary_seed(ctx.seed, "acceptance", "product", n));
    let (mut worst_product, mut product_cases) = (0.0f64, 0);
    for _ in 0..5 {
        let state = random_product_state(n, &mut rng)?;
        for order in 2..=n {
            for pattern in 0..9 {
                let obs = observables(order, pattern);
                if obs.len() != order {
                    continue;
                }
                let kappa = connected_correlation(&state, &CumulantRequest::new(obs)?)?;
                worst_product = worst_product.max(kappa.abs());
                product_cases += 1;
            }
        }
    }
    out.check(worst_product < 1e-12, format!("orders 2..=6 on {product_cases} random product-state cases: max |kappa| = {worst_product:.2e} (limit 1e-12)"));
    Ok(out)
}

fn selected() -> Option<BTreeSet<u32>> {
    let raw = std::env::var("ACCEPTANCE_ONLY").ok()?;
    Some(raw.split(',').filter_map(|s| s.trim().parse().ok()).collect())
}

fn main() {
    chaoscorr_core::linalg::set_blas_threads(1);
    let strict = std::env::var_os("ACCEPTANCE_STRICT").is_some_and(|v| !v.is_empty() && v != "0");
    let cache = match std::env::var_os("ACCEPTANCE_CACHE_DIR") {
        Some(dir) => CentralStateCache::with_directory(dir),
        None => CentralStateCache::new(),
    };
    let ctx = Context {
        seed: DEFAULT_SEED,
        states: StateProvider::new(Box::new(HaarSampler), cache),
    };
    let only = selected();
    let (mut passed, mut failed, mut errors) = (0, 0, 0);
    println!("acceptance suite (seed {})", ctx.seed);
    for c in criteria()
        .into_iter()
        .filter(|c| only.as_ref().is_none_or(|o| o.contains(&c.number)))
    {
        let start = Instant::now();
        let result = (c.run)(&ctx);
        let elapsed = start.elapsed();
        let mut outcome = match result {
            Ok(o) => o,
            Err(e) => {
                errors += 1;
                let mut o = Outcome::default();
                o.check(false, format!("error: {e}"));
                o
            }
        };
        if let Some(budget) = c.budget {
            outcome.check(
                elapsed <= budget,
                format!("runtime {:.1} s (budget {} s)", elapsed.as_secs_f64(), budget.as_secs()),
            );
        }
        let pass = outcome.pass();
        if pass {
            passed += 1;
        } else {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {} ({:.1} s)",
            c.number,
            c.title,
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        for (ok, text) in &outcome.lines {
            println!("    [{}] {text}", if *ok { "ok" } else { "no" });
        }
    }
    println!("acceptance: {passed} passed, {failed} failed");
    if errors > 0 || (strict && failed > 0) {
        std::process::exit(1);
    }
}

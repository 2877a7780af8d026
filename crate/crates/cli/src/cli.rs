//! Command-line front end.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checks::run_checks;
use crate::config::{resolve, EnsembleKind, Experiment, ExperimentConfig, Overrides};
use crate::error::{HarnessError, Result, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};
use crate::experiments::{
    invariance_rows, probe_families, probe_rows, run_invariance, run_probe, run_spacing, INVARIANCE_COLUMNS,
    PROBE_COLUMNS, SPACING_COLUMNS,
};
use crate::figures::{run_fig1, run_fig2, Claim, FIG1_COLUMNS, FIG2_COLUMNS};
use crate::output::{write_csv, write_json, write_metadata};
use crate::plot::emit_plots;
use crate::states::{CentralStateCache, HaarSampler, StateProvider};

#[derive(Debug, Parser)]
#[command(
    name = "chaoscorr",
    version,
    about = "Correlations and entanglement of chaotic many-qubit states"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Extremal VCM eigenvalues versus system size.
    Fig1(RunArgs),
    /// Subsystem purity versus subsystem size.
    Fig2(RunArgs),
    /// Every closed-form prediction against its ensemble average.
    Checks(ChecksArgs),
    /// Level-spacing statistics of the spin chain.
    Spacing(RunArgs),
    /// Ensemble statistics after repeated local measurements.
    Invariance(RunArgs),
    /// Number of local measurements needed to disentangle a state.
    Disentangle(RunArgs),
    /// SVG figures from fig1/fig2 CSV files.
    Plot(PlotArgs),
}

fn parse_ensemble(s: &str) -> std::result::Result<EnsembleKind, String> {
    s.parse::<EnsembleKind>().map_err(|e| e.to_string())
}

/// Flags shared by every experiment. Unset flags keep the value from
/// `--config` or the experiment's default.
#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// GUE, GOE or spin-chain; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', value_parser = parse_ensemble)]
    pub ensemble: Vec<EnsembleKind>,
    /// Run at a single system size.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "n-min")]
    pub n_min: Option<usize>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Step of the --n-min..--n-max range (default 2).
    #[arg(long = "n-step")]
    pub n_step: Option<usize>,
    /// States, or disorder realizations, per ensemble and size.
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Spin-chain coupling.
    #[arg(long = "J", allow_negative_numbers = true)]
    pub coupling: Option<f64>,
    /// Spin-chain field strength.
    #[arg(long = "h", allow_negative_numbers = true)]
    pub field: Option<f64>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// TOML configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: one per core).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Directory in which spin-chain eigenstates are kept between runs.
    #[arg(long = "cache-dir")]
    pub cache_dir: Option<PathBuf>,
    /// Print the resolved configuration as TOML and exit.
    #[arg(long = "print-config")]
    pub print_config: bool,
}

impl RunArgs {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            ensembles: (!self.ensemble.is_empty()).then(|| self.ensemble.clone()),
            n: self.n,
            n_min: self.n_min,
            n_max: self.n_max,
            n_step: self.n_step,
            samples: self.samples,
            seed: self.seed,
            coupling: self.coupling,
            field: self.field,
            out: self.out.clone(),
            threads: self.threads,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    /// Amplitude moments only.
    Moments,
    /// Squared two-point correlations only.
    TwoPoint,
}

#[derive(Debug, Clone, Args)]
pub struct ChecksArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Restrict the suite.
    #[arg(long, value_enum)]
    pub only: Option<Suite>,
}

#[derive(Debug, Clone, Args)]
pub struct PlotArgs {
    /// fig1 or fig2 CSV files.
    #[arg(required = true)]
    pub csv: Vec<PathBuf>,
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
    }
}

pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn prepare(experiment: Experiment, args: &RunArgs) -> Result<(ExperimentConfig, StateProvider)> {
    let config = resolve(experiment, args.config.as_deref(), &args.overrides())?;
    if let Some(threads) = config.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    chaoscorr_core::linalg::set_blas_threads(1);
    let cache = match &args.cache_dir {
        Some(dir) => CentralStateCache::with_directory(dir),
        None => CentralStateCache::new(),
    };
    Ok((config, StateProvider::new(Box::new(HaarSampler), cache)))
}

fn print_claims(claims: &[Claim]) -> i32 {
    for c in claims {
        println!(
            "{} {} [{}]: {}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.key,
            c.detail
        );
    }
    if claims.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    }
}

fn print_written(paths: &[PathBuf]) {
    for p in paths {
        eprintln!("wrote {}", p.display());
    }
}

fn execute(cli: Cli) -> Result<i32> {
    let (experiment, args) = match &cli.command {
        Command::Fig1(a) => (Experiment::Fig1, a.clone()),
        Command::Fig2(a) => (Experiment::Fig2, a.clone()),
        Command::Checks(c) => (
            match c.only {
                None => Experiment::Checks,
                Some(Suite::Moments) => Experiment::MomentsCheck,
                Some(Suite::TwoPoint) => Experiment::Eq5Check,
            },
            c.run.clone(),
        ),
        Command::Spacing(a) => (Experiment::SpinSpacing, a.clone()),
        Command::Invariance(a) => (Experiment::Invariance, a.clone()),
        Command::Disentangle(a) => (Experiment::DisentangleProbe, a.clone()),
        Command::Plot(p) => {
            let written = emit_plots(&p.csv, &p.out)?;
            print_written(&written);
            return Ok(EXIT_OK);
        }
    };
    let (config, states) = prepare(experiment, &args)?;
    if args.print_config {
        print!("{}", config.to_toml()?);
        return Ok(EXIT_OK);
    }
    let dir = config.output_dir.clone();
    let stem = match experiment {
        Experiment::Eq5Check | Experiment::MomentsCheck => "checks",
        Experiment::SpinSpacing => "spacing",
        Experiment::DisentangleProbe => "disentangle",
        other => other.name(),
    };
    let csv = dir.join(format!("{stem}.csv"));
    let json = dir.join(format!("{stem}.json"));
    eprintln!(
        "{experiment}: ensembles {:?}, N {:?}, samples {}, seed {}",
        config.ensembles.iter().map(|e| e.label()).collect::<Vec<_>>(),
        config.n_range,
        config.samples,
        config.master_seed
    );
    let (outputs, code) = match experiment {
        Experiment::Fig1 => {
            let result = run_fig1(&config, &states)?;
            for r in result.rows() {
                println!(
                    "{:<10} N={:<3} e_max {:.6} ± {:.6}   e_min {:.6} ± {:.6}",
                    r.ensemble, r.n, r.e_max_mean, r.e_max_std, r.e_min_mean, r.e_min_std
                );
            }
            write_csv(&csv, &FIG1_COLUMNS, &result.rows())?;
            write_json(&json, &result)?;
            (vec![csv, json], print_claims(&result.claims))
        }
        Experiment::Fig2 => {
            let result = run_fig2(&config, &states)?;
            for r in result.rows() {
                println!(
                    "{:<10} m={:<3} {:.6} ± {:.6}   closed form {:.6}   bound {}",
                    r.source, r.m, r.neg_log2_mean_purity, r.std, r.analytic, r.bound
                );
            }
            write_csv(&csv, &FIG2_COLUMNS, &result.rows())?;
            write_json(&json, &result)?;
            (vec![csv, json], print_claims(&result.claims))
        }
        Experiment::Checks | Experiment::Eq5Check | Experiment::MomentsCheck => {
            let report = run_checks(&config, &states)?;
            for c in &report.checks {
                let status = match (c.pass, c.expected_failure) {
                    (true, false) => "PASS",
                    (false, false) => "FAIL",
                    (false, true) => "XFAIL",
                    (true, true) => "XPASS",
                };
                let z = c.z.map(|z| format!(" z={z:+.3}")).unwrap_or_default();
                println!("{status:<5} {}{z}  ({})", c.name, c.detail);
            }
            println!(
                "{} checks, {} with an unexpected outcome",
                report.checks.len(),
                report.unexpected
            );
            write_json(&json, &report)?;
            (vec![json], report.exit_code())
        }
        Experiment::SpinSpacing => {
            let n = config.single_n()?;
            let result = run_spacing(
                n,
                config.coupling,
                config.field,
                config.master_seed,
                config.samples,
                config.spacing.window_fraction,
            )?;
            println!(
                "N={n} J={} h={}: {} spacings, KS to Wigner {:.5}, KS to Poisson {:.5} ({})",
                config.coupling,
                config.field,
                result.pooled_spacings,
                result.ks_distance_goe,
                result.ks_distance_poisson,
                if result.closer_to_goe {
                    "closer to Wigner"
                } else {
                    "closer to Poisson"
                }
            );
            write_csv(&csv, &SPACING_COLUMNS, &result.histogram)?;
            write_json(&json, &result)?;
            (vec![csv, json], EXIT_OK)
        }
        Experiment::Invariance => {
            let n = config.single_n()?;
            let reports = run_invariance(&config, "invariance", n, config.samples)?;
            let rows = invariance_rows(&reports);
            for r in &rows {
                println!(
                    "{} N={:<3} mean {:.6e} predicted {:.6e} z={:+.3} {}",
                    r.ensemble,
                    r.n,
                    r.mean,
                    r.predicted,
                    r.z,
                    if r.agrees { "agrees" } else { "DISAGREES" }
                );
            }
            write_csv(&csv, &INVARIANCE_COLUMNS, &rows)?;
            write_json(&json, &reports)?;
            let code = if reports.iter().all(|r| r.all_agree) {
                EXIT_OK
            } else {
                EXIT_CHECK_FAILED
            };
            (vec![csv, json], code)
        }
        Experiment::DisentangleProbe => {
            let n = config.single_n()?;
            let max_ops = config.disentangle.max_ops.unwrap_or(n);
            let runs = run_probe(
                &probe_families(&config),
                n,
                max_ops,
                config.samples,
                config.master_seed,
                "disentangle",
            )?;
            let rows = probe_rows(&runs);
            for family in probe_families(&config) {
                let label = family.label();
                let counts: Vec<String> = rows
                    .iter()
                    .filter(|r| r.family == label)
                    .map(|r| r.disentangled_after.map_or("-".into(), |k| k.to_string()))
                    .collect();
                println!("{label:<8} N={n} measurements needed: {}", counts.join(" "));
            }
            write_csv(&csv, &PROBE_COLUMNS, &rows)?;
            write_json(&json, &runs)?;
            (vec![csv, json], EXIT_OK)
        }
    };
    let meta = write_metadata(&config, stem, &outputs)?;
    print_written(&outputs);
    print_written(&[meta]);
    Ok(code)
}

impl From<clap::Error> for HarnessError {
    fn from(e: clap::Error) -> Self {
        HarnessError::Config(e.to_string())
    }
}

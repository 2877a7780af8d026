//! Run configuration: experiment defaults, TOML files and flag overrides.
//!
//! A configuration is assembled in three layers. The experiment's defaults
//! come first, then the keys present in an optional TOML file, and finally
//! the command-line flags. The result is validated as a whole before any
//! computation starts.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chaoscorr_core::consts::{max_dense_sites, max_state_sites};
use chaoscorr_core::spin_chain::{DEFAULT_WINDOW_FRACTION, MIN_LEVELS};
use chaoscorr_core::{BasisChoice, EigenSelector, EnsembleClass, InvarianceStatistic};
use serde::{Deserialize, Serialize};

use crate::error::{HarnessError, Result};

/// Version of the CSV and JSON layouts written by the harness.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Fig1,
    Fig2,
    /// The full check suite.
    Checks,
    /// Only the squared two-point correlation checks.
    Eq5Check,
    /// Only the amplitude moment checks.
    MomentsCheck,
    SpinSpacing,
    Invariance,
    DisentangleProbe,
}

impl Experiment {
    pub const ALL: [Experiment; 8] = [
        Experiment::Fig1,
        Experiment::Fig2,
        Experiment::Checks,
        Experiment::Eq5Check,
        Experiment::MomentsCheck,
        Experiment::SpinSpacing,
        Experiment::Invariance,
        Experiment::DisentangleProbe,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Experiment::Fig1 => "fig1",
            Experiment::Fig2 => "fig2",
            Experiment::Checks => "checks",
            Experiment::Eq5Check => "eq5-check",
            Experiment::MomentsCheck => "moments-check",
            Experiment::SpinSpacing => "spin-spacing",
            Experiment::Invariance => "invariance",
            Experiment::DisentangleProbe => "disentangle-probe",
        }
    }

    pub fn is_check_suite(self) -> bool {
        matches!(
            self,
            Experiment::Checks | Experiment::Eq5Check | Experiment::MomentsCheck
        )
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Experiment {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        Experiment::ALL
            .into_iter()
            .find(|e| e.name() == s)
            .ok_or_else(|| HarnessError::Config(format!("unknown experiment '{s}'")))
    }
}

/// Source of states: a random-matrix class or the disordered spin chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EnsembleKind {
    #[serde(rename = "GUE")]
    Gue,
    #[serde(rename = "GOE")]
    Goe,
    #[serde(rename = "spin-chain")]
    SpinChain,
}

impl EnsembleKind {
    pub fn class(self) -> Option<EnsembleClass> {
        match self {
            EnsembleKind::Gue => Some(EnsembleClass::Gue),
            EnsembleKind::Goe => Some(EnsembleClass::Goe),
            EnsembleKind::SpinChain => None,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EnsembleKind::Gue => "GUE",
            EnsembleKind::Goe => "GOE",
            EnsembleKind::SpinChain => "spin-chain",
        }
    }
}

impl fmt::Display for EnsembleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for EnsembleKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gue" => Ok(EnsembleKind::Gue),
            "goe" => Ok(EnsembleKind::Goe),
            "spin-chain" | "spin_chain" | "spinchain" | "chain" => Ok(EnsembleKind::SpinChain),
            other => Err(HarnessError::Config(format!(
                "unknown ensemble '{other}' (expected GUE, GOE or spin-chain)"
            ))),
        }
    }
}

impl From<EnsembleClass> for EnsembleKind {
    fn from(class: EnsembleClass) -> Self {
        match class {
            EnsembleClass::Gue => EnsembleKind::Gue,
            EnsembleClass::Goe => EnsembleKind::Goe,
        }
    }
}

/// How the `m`-site subsystem is chosen in purity sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubsystemChoice {
    /// Sites `1..=m`.
    Contiguous,
    /// A seeded random `m`-subset per sample.
    Random,
}

/// Starting-state families of the disentangling probe besides the
/// random-matrix ensembles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReferenceFamily {
    Cat,
    Product,
}

/// Sample sizes and thresholds of the check suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSettings {
    /// Sizes at which the amplitude moments are checked.
    pub moment_sizes: Vec<usize>,
    pub moment_samples: usize,
    /// Allowed `|z|` for the amplitude moments.
    pub moment_sigmas: f64,
    /// Allowed `|z|` for every other statistical check.
    pub sigmas: f64,
    /// Allowed `|Σ|c|² - 1|` of the mean squared norm.
    pub norm_tolerance: f64,
    pub vcm_n: usize,
    pub vcm_samples: usize,
    pub two_point_n_gue: usize,
    pub two_point_n_goe: usize,
    pub two_point_samples: usize,
    pub purity_n: usize,
    pub purity_samples: usize,
    pub cumulant_n: usize,
    pub cumulant_orders: Vec<usize>,
    pub cumulant_samples: usize,
    pub cat_sizes: Vec<usize>,
    /// Size and number of random-matrix states of the disentangling check.
    pub probe_n: usize,
    pub probe_samples: usize,
    /// Whether the spacing check is expected to find Poisson statistics.
    /// Unset means: expected exactly when both couplings are at most
    /// [`WEAK_COUPLING`].
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub expect_integrable: Option<bool>,
}

/// Couplings at or below this size mark the chain as near-integrable.
pub const WEAK_COUPLING: f64 = 0.05;

impl Default for CheckSettings {
    fn default() -> Self {
        Self {
            moment_sizes: vec![2, 4, 6],
            moment_samples: 5000,
            moment_sigmas: 4.0,
            sigmas: 3.0,
            norm_tolerance: 1e-10,
            vcm_n: 8,
            vcm_samples: 1000,
            two_point_n_gue: 6,
            two_point_n_goe: 8,
            two_point_samples: 1000,
            purity_n: 12,
            purity_samples: 100,
            cumulant_n: 8,
            cumulant_orders: vec![3, 4],
            cumulant_samples: 200,
            cat_sizes: (3..=12).collect(),
            probe_n: 8,
            probe_samples: 5,
            expect_integrable: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpacingSettings {
    /// Central fraction of each spectrum that is unfolded.
    pub window_fraction: f64,
    /// Largest accepted KS distance to the Wigner surmise.
    pub ks_threshold: f64,
}

impl Default for SpacingSettings {
    fn default() -> Self {
        Self {
            window_fraction: DEFAULT_WINDOW_FRACTION,
            ks_threshold: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InvarianceSettings {
    /// Measurements continue until this many sites remain.
    pub final_sites: usize,
    pub statistic: InvarianceStatistic,
    pub basis: BasisChoice,
    /// Initial size and sample count used by the check suite.
    pub check_n: usize,
    pub check_samples: usize,
}

impl Default for InvarianceSettings {
    fn default() -> Self {
        Self {
            final_sites: 4,
            statistic: InvarianceStatistic::MeanPurity { m: 3 },
            basis: BasisChoice::Computational,
            check_n: 8,
            check_samples: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DisentangleSettings {
    /// Families probed in addition to the configured ensembles.
    pub reference_families: Vec<ReferenceFamily>,
    /// Measurement budget; unset means `N`.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_ops: Option<usize>,
}

impl Default for DisentangleSettings {
    fn default() -> Self {
        Self {
            reference_families: vec![ReferenceFamily::Cat, ReferenceFamily::Product],
            max_ops: None,
        }
    }
}

/// Everything a run depends on. Serializes to TOML losslessly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub ensembles: Vec<EnsembleKind>,
    pub n_range: Vec<usize>,
    /// States (or disorder realizations) per ensemble and size.
    pub samples: usize,
    pub master_seed: u64,
    #[serde(rename = "J")]
    pub coupling: f64,
    #[serde(rename = "h")]
    pub field: f64,
    pub subsystem: SubsystemChoice,
    pub output_dir: PathBuf,
    /// Worker threads; unset means one per core.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub threads: Option<usize>,
    pub selector: EigenSelector,
    pub checks: CheckSettings,
    pub spacing: SpacingSettings,
    pub invariance: InvarianceSettings,
    pub disentangle: DisentangleSettings,
}

pub const DEFAULT_SEED: u64 = 20_240_601;

impl ExperimentConfig {
    /// Defaults for `experiment`.
    pub fn defaults(experiment: Experiment) -> Self {
        use EnsembleKind::*;
        let (ensembles, n_range, samples) = match experiment {
            Experiment::Fig1 => (vec![Gue, Goe, SpinChain], vec![4, 6, 8, 10, 12], 100),
            Experiment::Fig2 => (vec![Gue, Goe, SpinChain], vec![12], 100),
            Experiment::Checks => (vec![Gue, Goe, SpinChain], vec![10], 20),
            Experiment::Eq5Check | Experiment::MomentsCheck => (vec![Gue, Goe], vec![10], 20),
            Experiment::SpinSpacing => (vec![SpinChain], vec![12], 20),
            Experiment::Invariance => (vec![Gue], vec![8], 500),
            Experiment::DisentangleProbe => (vec![Gue, Goe], vec![8], 10),
        };
        Self {
            experiment,
            ensembles,
            n_range,
            samples,
            master_seed: DEFAULT_SEED,
            coupling: 1.0,
            field: 1.0,
            subsystem: SubsystemChoice::Contiguous,
            output_dir: PathBuf::from("out"),
            threads: None,
            selector: EigenSelector::Central,
            checks: CheckSettings::default(),
            spacing: SpacingSettings::default(),
            invariance: InvarianceSettings::default(),
            disentangle: DisentangleSettings::default(),
        }
    }

    /// Defaults for `experiment` overlaid with the keys of a TOML document.
    /// An `experiment` key in the document must agree with `experiment`.
    pub fn from_toml_overlay(experiment: Experiment, text: &str) -> Result<Self> {
        let overlay: toml::Table =
            toml::from_str(text).map_err(|e| HarnessError::Config(format!("malformed TOML: {e}")))?;
        if let Some(value) = overlay.get("experiment") {
            let named = value
                .as_str()
                .ok_or_else(|| HarnessError::Config("'experiment' must be a string".into()))?
                .parse::<Experiment>()?;
            let compatible = named == experiment || (named.is_check_suite() && experiment == Experiment::Checks);
            if !compatible {
                return Err(HarnessError::Config(format!(
                    "configuration is for '{named}' but the '{experiment}' command was run"
                )));
            }
        }
        let base = Self::defaults(
            overlay
                .get("experiment")
                .and_then(|v| v.as_str())
                .and_then(|s| s.parse().ok())
                .unwrap_or(experiment),
        );
        let mut table = toml::Table::try_from(&base).map_err(|e| HarnessError::Serialize(e.to_string()))?;
        merge_tables(&mut table, overlay);
        table
            .try_into()
            .map_err(|e: toml::de::Error| HarnessError::Config(e.message().to_string()))
    }

    pub fn from_toml_file(experiment: Experiment, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_toml_overlay(experiment, &text).map_err(|e| HarnessError::Config(format!("{}: {e}", path.display())))
    }

    /// Parses a complete document (as written by [`to_toml`](Self::to_toml)).
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| HarnessError::Config(e.message().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Serialize(e.to_string()))
    }

    /// The single size of an experiment that runs at one `N`.
    pub fn single_n(&self) -> Result<usize> {
        match self.n_range.as_slice() {
            [n] => Ok(*n),
            other => Err(HarnessError::Config(format!(
                "'{}' runs at a single N, got n_range = {other:?}",
                self.experiment
            ))),
        }
    }

    /// Whether the spacing check should find Poisson rather than
    /// Wigner-surmise statistics.
    pub fn expects_integrable(&self) -> bool {
        self.checks
            .expect_integrable
            .unwrap_or(self.coupling.abs() <= WEAK_COUPLING && self.field.abs() <= WEAK_COUPLING)
    }

    pub fn has(&self, kind: EnsembleKind) -> bool {
        self.ensembles.contains(&kind)
    }

    pub fn classes(&self) -> Vec<EnsembleClass> {
        self.ensembles.iter().filter_map(|k| k.class()).collect()
    }

    /// Checks every field; called before any computation.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if self.ensembles.is_empty() {
            return bad("at least one ensemble is required".into());
        }
        for (i, e) in self.ensembles.iter().enumerate() {
            if self.ensembles[..i].contains(e) {
                return bad(format!("ensemble {e} listed twice"));
            }
        }
        if self.n_range.is_empty() {
            return bad("n_range must not be empty".into());
        }
        for (i, n) in self.n_range.iter().enumerate() {
            if self.n_range[..i].contains(n) {
                return bad(format!("N = {n} listed twice"));
            }
        }
        if !self.coupling.is_finite() || !self.field.is_finite() {
            return bad("J and h must be finite".into());
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        if self.output_dir.as_os_str().is_empty() {
            return bad("output_dir must not be empty".into());
        }
        for &n in &self.n_range {
            self.validate_size(n)?;
        }
        match self.experiment {
            Experiment::Fig1 => {}
            Experiment::Fig2 => {
                let n = self.single_n()?;
                if n < 2 {
                    return bad("fig2 needs N >= 2".into());
                }
            }
            Experiment::Checks | Experiment::Eq5Check | Experiment::MomentsCheck => {
                self.single_n()?;
                self.validate_checks()?;
            }
            Experiment::SpinSpacing => {
                self.single_n()?;
                if self.ensembles != [EnsembleKind::SpinChain] {
                    return bad("spin-spacing only supports the spin-chain ensemble".into());
                }
                self.validate_spacing(self.n_range[0])?;
            }
            Experiment::Invariance => {
                let n = self.single_n()?;
                if self.has(EnsembleKind::SpinChain) {
                    return bad("invariance runs on random-matrix ensembles only".into());
                }
                self.validate_invariance(n)?;
            }
            Experiment::DisentangleProbe => {
                let n = self.single_n()?;
                if self.has(EnsembleKind::SpinChain) {
                    return bad("disentangle-probe runs on random-matrix and reference states only".into());
                }
                if !(2..=14).contains(&n) {
                    return bad(format!("disentangle-probe needs 2 <= N <= 14, got {n}"));
                }
                if let Some(ops) = self.disentangle.max_ops {
                    if ops > n {
                        return bad(format!("max_ops = {ops} exceeds N = {n}"));
                    }
                }
            }
        }
        if let EigenSelector::EnergyWindow { width, energy } = self.selector {
            if !(width > 0.0 && width.is_finite() && energy.is_finite()) {
                return bad("energy window needs a finite energy and a positive width".into());
            }
        }
        Ok(())
    }

    fn validate_size(&self, n: usize) -> Result<()> {
        let bad = |msg: String| Err(HarnessError::Config(msg));
        if n == 0 {
            return bad("N must be at least 1".into());
        }
        if !self.classes().is_empty() && n > max_state_sites() {
            return bad(format!(
                "N = {n} exceeds the state-vector cap of {} (CHAOSCORR_MAX_N)",
                max_state_sites()
            ));
        }
        if self.has(EnsembleKind::SpinChain) {
            if n < 2 {
                return bad("the spin chain needs N >= 2".into());
            }
            if n > max_dense_sites() {
                return bad(format!(
                    "N = {n} exceeds the dense-diagonalization cap of {} (CHAOSCORR_MAX_N)",
                    max_dense_sites()
                ));
            }
            if let EigenSelector::Index(k) = self.selector {
                if k == 0 || k > 1 << n {
                    return bad(format!("eigenstate index {k} outside 1..={} for N = {n}", 1usize << n));
                }
            }
        }
        Ok(())
    }

    fn validate_spacing(&self, n: usize) -> Result<()> {
        let wf = self.spacing.window_fraction;
        if !(wf > 0.0 && wf <= 1.0) {
            return Err(HarnessError::Config(format!("window_fraction {wf} not in (0, 1]")));
        }
        let levels = ((1usize << n) as f64 * wf).round() as usize;
        if levels < MIN_LEVELS {
            return Err(HarnessError::Config(format!(
                "N = {n} leaves {levels} levels in the spacing window, fewer than {MIN_LEVELS}"
            )));
        }
        if self.spacing.ks_threshold.is_nan() || self.spacing.ks_threshold <= 0.0 {
            return Err(HarnessError::Config("ks_threshold must be positive".into()));
        }
        Ok(())
    }

    fn validate_invariance(&self, n: usize) -> Result<()> {
        let s = &self.invariance;
        if s.final_sites == 0 || s.final_sites >= n {
            return Err(HarnessError::Config(format!(
                "final_sites must lie in 1..{n}, got {}",
                s.final_sites
            )));
        }
        if let InvarianceStatistic::MeanPurity { m } = s.statistic {
            if m == 0 || m >= s.final_sites {
                return Err(HarnessError::Config(format!(
                    "purity subsystem m = {m} must lie in 1..{}",
                    s.final_sites
                )));
            }
        }
        Ok(())
    }

    fn validate_checks(&self) -> Result<()> {
        let c = &self.checks;
        let bad = |msg: String| Err(HarnessError::Config(msg));
        let cap = max_state_sites();
        for (name, n) in [
            ("vcm_n", c.vcm_n),
            ("two_point_n_gue", c.two_point_n_gue),
            ("two_point_n_goe", c.two_point_n_goe),
            ("purity_n", c.purity_n),
            ("cumulant_n", c.cumulant_n),
        ] {
            if !(2..=cap).contains(&n) {
                return bad(format!("checks.{name} = {n} must lie in 2..={cap}"));
            }
        }
        for (name, count) in [
            ("moment_samples", c.moment_samples),
            ("vcm_samples", c.vcm_samples),
            ("two_point_samples", c.two_point_samples),
            ("purity_samples", c.purity_samples),
            ("cumulant_samples", c.cumulant_samples),
            ("probe_samples", c.probe_samples),
        ] {
            if count < 2 {
                return bad(format!("checks.{name} must be at least 2 to estimate a standard error"));
            }
        }
        if c.moment_sizes.is_empty() || c.moment_sizes.iter().any(|&n| n == 0 || n > cap) {
            return bad(format!("checks.moment_sizes must be non-empty and within 1..={cap}"));
        }
        if c.cat_sizes.iter().any(|&n| !(2..=cap).contains(&n)) {
            return bad(format!("checks.cat_sizes must lie within 2..={cap}"));
        }
        if c.cumulant_orders
            .iter()
            .any(|&m| !(2..=6).contains(&m) || m > c.cumulant_n)
        {
            return bad("checks.cumulant_orders must lie in 2..=min(6, cumulant_n)".into());
        }
        if !(3..=14).contains(&c.probe_n) {
            return bad(format!("checks.probe_n = {} must lie in 3..=14", c.probe_n));
        }
        for (name, v) in [
            ("moment_sigmas", c.moment_sigmas),
            ("sigmas", c.sigmas),
            ("norm_tolerance", c.norm_tolerance),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("checks.{name} must be positive"));
            }
        }
        self.validate_invariance(self.invariance.check_n)?;
        if self.invariance.check_samples < 2 {
            return bad("invariance.check_samples must be at least 2".into());
        }
        if self.has(EnsembleKind::SpinChain) && self.experiment == Experiment::Checks {
            self.validate_spacing(self.n_range[0])?;
            if self.samples < 1 {
                return bad("the spacing check needs at least one realization".into());
            }
        }
        Ok(())
    }
}

fn merge_tables(base: &mut toml::Table, overlay: toml::Table) {
    for (key, value) in overlay {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) if key != "selector" => merge_tables(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

/// Command-line overrides; unset fields keep the configured value.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub ensembles: Option<Vec<EnsembleKind>>,
    pub n: Option<usize>,
    pub n_min: Option<usize>,
    pub n_max: Option<usize>,
    pub n_step: Option<usize>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub coupling: Option<f64>,
    pub field: Option<f64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Overrides {
    pub fn apply(&self, config: &mut ExperimentConfig) -> Result<()> {
        if let Some(e) = &self.ensembles {
            config.ensembles = e.clone();
        }
        match (self.n, self.n_min, self.n_max) {
            (Some(_), Some(_), _) | (Some(_), _, Some(_)) => {
                return Err(HarnessError::Config(
                    "--n cannot be combined with --n-min/--n-max".into(),
                ));
            }
            (Some(n), None, None) => config.n_range = vec![n],
            (None, None, None) => {
                if self.n_step.is_some() {
                    return Err(HarnessError::Config("--n-step needs --n-min and --n-max".into()));
                }
            }
            (None, lo, hi) => {
                let lo = lo.or(config.n_range.iter().min().copied()).unwrap_or(1);
                let hi = hi.or(config.n_range.iter().max().copied()).unwrap_or(lo);
                let step = self.n_step.unwrap_or(2);
                if step == 0 {
                    return Err(HarnessError::Config("--n-step must be positive".into()));
                }
                if lo > hi {
                    return Err(HarnessError::Config(format!("--n-min {lo} exceeds --n-max {hi}")));
                }
                config.n_range = (lo..=hi).step_by(step).collect();
            }
        }
        if let Some(s) = self.samples {
            config.samples = s;
        }
        if let Some(s) = self.seed {
            config.master_seed = s;
        }
        if let Some(j) = self.coupling {
            config.coupling = j;
        }
        if let Some(h) = self.field {
            config.field = h;
        }
        if let Some(o) = &self.out {
            config.output_dir = o.clone();
        }
        if let Some(t) = self.threads {
            config.threads = Some(t);
        }
        Ok(())
    }
}

/// Defaults, then `config_file`, then `overrides`, then validation.
pub fn resolve(experiment: Experiment, config_file: Option<&Path>, overrides: &Overrides) -> Result<ExperimentConfig> {
    let mut config = match config_file {
        Some(path) => ExperimentConfig::from_toml_file(experiment, path)?,
        None => ExperimentConfig::defaults(experiment),
    };
    overrides.apply(&mut config)?;
    config.validate()?;
    Ok(config)
}

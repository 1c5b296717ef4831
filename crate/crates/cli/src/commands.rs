use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, ValueEnum};
use gospa_core::estimators::run_estimator;
use gospa_core::oracle::{exact_mse, monte_carlo_mse};
use gospa_core::set_metrics::{self, gospa_alpha2_decomposed};
use gospa_core::sweeps::{self, cardinality_table, region_grid, regions_csv, regions_gnuplot};
use gospa_core::validation::{run_validation, ValidationConfig};
use gospa_core::{
    BaseDistance, DetectionVector, EstimatorKind, LabeledPoint, MetricConfig, MetricKind, MseEvaluator, MultiBernoulli,
    TargetSet,
};

use crate::OutputArgs;

pub struct Output {
    pub text: String,
    /// Exit with the validation-failure code after writing `text`.
    pub failed: bool,
}

impl From<String> for Output {
    fn from(text: String) -> Self {
        Self { text, failed: false }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricName {
    Ospa,
    Uospa,
    Gospa,
}

impl MetricName {
    fn kind(self, alpha: f64) -> MetricKind {
        match self {
            MetricName::Ospa => MetricKind::Ospa,
            MetricName::Uospa => MetricKind::Uospa,
            MetricName::Gospa if alpha == 2.0 => MetricKind::Gospa,
            MetricName::Gospa => MetricKind::GospaAlpha,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorName {
    Gospa,
    Uospa,
    Ospa,
    Mam,
    Jom,
    Maxcard,
}

impl EstimatorName {
    fn kind(self, alpha: f64) -> EstimatorKind {
        match self {
            EstimatorName::Gospa if alpha == 2.0 => EstimatorKind::OptGospa2,
            EstimatorName::Gospa => EstimatorKind::OptGospaAlpha,
            EstimatorName::Uospa => EstimatorKind::OptUospa,
            EstimatorName::Ospa => EstimatorKind::OptOspa,
            EstimatorName::Mam => EstimatorKind::MarginalMultitarget,
            EstimatorName::Jom => EstimatorKind::Jom,
            EstimatorName::Maxcard => EstimatorKind::MaxCardinality,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Closed,
    Exact,
    MonteCarlo,
}

#[derive(Args, Debug)]
pub struct MetricArgs {
    /// Ground-truth set (JSON array of points).
    x: PathBuf,
    /// Estimated set (JSON array of points).
    y: PathBuf,
    #[arg(long, value_enum, default_value = "gospa")]
    metric: MetricName,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, default_value = "euclidean")]
    base_distance: BaseDistance,
    /// Also print localisation, missed and false costs (GOSPA with alpha = 2 only).
    #[arg(long)]
    decompose: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Either a model file or existence probabilities on evenly spaced 1-D locations.
#[derive(Args, Debug)]
pub struct ModelArgs {
    /// Multi-Bernoulli JSON file.
    #[arg(long, value_name = "FILE", conflicts_with = "r", required_unless_present = "r")]
    mb: Option<PathBuf>,
    /// Existence probabilities, e.g. 0.4,0.9.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    r: Option<Vec<f64>>,
    /// Distance between consecutive locations when using --r.
    #[arg(long, default_value_t = 10.0, conflicts_with = "mb")]
    spacing: f64,
}

impl ModelArgs {
    fn load(&self) -> Result<MultiBernoulli> {
        match (&self.mb, &self.r) {
            (Some(path), _) => read_json(path),
            (None, Some(rs)) => Ok(MultiBernoulli::evenly_spaced(rs, self.spacing)?),
            (None, None) => bail!("either --mb or --r is required"),
        }
    }
}

#[derive(Args, Debug)]
pub struct MseArgs {
    #[command(flatten)]
    model: ModelArgs,
    /// Detection vector, e.g. 1,0.
    #[arg(long)]
    e_hat: DetectionVector,
    #[arg(long, value_enum, default_value = "gospa")]
    metric: MetricName,
    #[arg(long, default_value_t = 2.0)]
    p: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[arg(long, value_enum, default_value = "closed")]
    method: Method,
    #[arg(long, default_value_t = 100_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct EstimateArgs {
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_enum)]
    estimator: EstimatorName,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepRegionsArgs {
    /// Estimators to sweep; all of them by default.
    #[arg(long, value_enum, value_delimiter = ',')]
    estimator: Vec<EstimatorName>,
    #[arg(long, default_value_t = sweeps::DEFAULT_GRID_STEP)]
    grid_step: f64,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long, default_value_t = 2.0)]
    alpha: f64,
    /// The two component locations, points separated by ';' and
    /// coordinates by ',', e.g. "0;10" or "0,0;5,5".
    #[arg(long, default_value = "0;10")]
    locations: String,
    /// Emit a gnuplot script with the data inline instead of CSV.
    #[arg(long)]
    gnuplot: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct SweepCardinalityArgs {
    /// Existence probability shared by every component.
    #[arg(long)]
    r: f64,
    #[arg(long, default_value_t = 30)]
    n_max: usize,
    #[arg(long, default_value_t = 1.0)]
    c: f64,
    #[arg(long)]
    gnuplot: bool,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = ValidationConfig::default().seed)]
    seed: u64,
    #[arg(long, default_value_t = ValidationConfig::default().n_instances)]
    instances: usize,
    #[arg(long, default_value_t = ValidationConfig::default().n_samples)]
    samples: u64,
    #[arg(long, default_value_t = ValidationConfig::default().tolerance)]
    tolerance: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn metric(args: &MetricArgs) -> Result<Output> {
    let x: TargetSet = read_json(&args.x)?;
    let y: TargetSet = read_json(&args.y)?;
    let cfg = MetricConfig::new(args.p, args.c, args.alpha, args.base_distance)?;
    let name = args.metric.to_possible_value().expect("no skipped variants");
    let mut out = String::new();
    if args.decompose {
        ensure!(
            args.metric == MetricName::Gospa && args.alpha == 2.0,
            "--decompose needs --metric gospa with --alpha 2"
        );
        let d = gospa_alpha2_decomposed(&x, &y, &cfg)?;
        out.push_str("metric,value,localisation,missed,false\n");
        writeln!(
            out,
            "{},{},{},{},{}",
            name.get_name(),
            d.total,
            d.localisation_cost,
            d.missed_cost,
            d.false_cost
        )?;
    } else {
        let value = match args.metric {
            MetricName::Ospa => set_metrics::ospa(&x, &y, &cfg)?,
            MetricName::Uospa => set_metrics::uospa(&x, &y, &cfg)?,
            MetricName::Gospa => set_metrics::gospa(&x, &y, &cfg)?,
        };
        out.push_str("metric,value\n");
        writeln!(out, "{},{}", name.get_name(), value)?;
    }
    Ok(out.into())
}

pub fn mse(args: &MseArgs) -> Result<Output> {
    let mb = args.model.load()?;
    ensure!(
        args.e_hat.len() == mb.len(),
        "--e-hat has {} entries but the model has {} components",
        args.e_hat.len(),
        mb.len()
    );
    let kind = args.metric.kind(args.alpha);
    let cfg = MetricConfig::euclidean(args.p, args.c, args.alpha)?;
    let (value, std_err) = match args.method {
        Method::Closed => (
            MseEvaluator::from_config(&mb, &cfg)?
                .evaluate(kind, &args.e_hat, args.alpha)?
                .value,
            0.0,
        ),
        Method::Exact => (exact_mse(&mb, &mb.report(&args.e_hat)?, kind, &cfg)?.mean, 0.0),
        Method::MonteCarlo => {
            let est = monte_carlo_mse(&mb, &mb.report(&args.e_hat)?, kind, &cfg, args.samples, args.seed)?;
            (est.mean, est.std_err)
        }
    };
    let alpha = kind
        .effective_alpha(args.alpha)
        .map(|a| a.to_string())
        .unwrap_or_default();
    let method = args.method.to_possible_value().expect("no skipped variants");
    let mut out = String::from("metric,alpha,e_hat,method,mse,std_err\n");
    writeln!(
        out,
        "{},{},\"{}\",{},{},{}",
        args.metric.to_possible_value().expect("no skipped variants").get_name(),
        alpha,
        args.e_hat,
        method.get_name(),
        value,
        std_err
    )?;
    Ok(out.into())
}

pub fn estimate(args: &EstimateArgs) -> Result<Output> {
    let mb = args.model.load()?;
    let kind = args.estimator.kind(args.alpha);
    let outcome = run_estimator(kind, &mb, args.c, args.alpha)?;
    let mut out = String::from("estimator,e_hat,n_hat,objective,ties\n");
    writeln!(
        out,
        "{},\"{}\",{},{},{}",
        kind,
        outcome.e_hat,
        outcome.e_hat.count(),
        outcome.objective_value,
        outcome.ties.len()
    )?;
    Ok(out.into())
}

pub fn sweep_regions(args: &SweepRegionsArgs) -> Result<Output> {
    let locations = parse_locations(&args.locations)?;
    let names = if args.estimator.is_empty() {
        EstimatorName::value_variants().to_vec()
    } else {
        args.estimator.clone()
    };
    let grids = names
        .iter()
        .map(|name| region_grid(name.kind(args.alpha), args.grid_step, args.c, args.alpha, &locations))
        .collect::<gospa_core::Result<Vec<_>>>()?;
    Ok(if args.gnuplot {
        regions_gnuplot(&grids)
    } else {
        regions_csv(&grids)
    }
    .into())
}

pub fn sweep_cardinality(args: &SweepCardinalityArgs) -> Result<Output> {
    let table = cardinality_table(args.r, args.n_max, args.c)?;
    Ok(if args.gnuplot {
        table.to_gnuplot()
    } else {
        table.to_csv()
    }
    .into())
}

pub fn validate(args: &ValidateArgs) -> Result<Output> {
    let report = run_validation(&ValidationConfig {
        seed: args.seed,
        n_instances: args.instances,
        n_samples: args.samples,
        tolerance: args.tolerance,
    })?;
    let mut text = serde_json::to_string_pretty(&report)?;
    text.push('\n');
    Ok(Output {
        text,
        failed: !report.passed,
    })
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid input in {}", path.display()))
}

fn parse_locations(text: &str) -> Result<[LabeledPoint; 2]> {
    let points = text
        .split(';')
        .map(|p| {
            let coords = p
                .split(',')
                .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad coordinate {v:?}")))
                .collect::<Result<Vec<_>>>()?;
            Ok(LabeledPoint::new(coords)?)
        })
        .collect::<Result<Vec<_>>>()?;
    points
        .try_into()
        .map_err(|p: Vec<_>| anyhow::anyhow!("--locations needs exactly two points, got {}", p.len()))
}

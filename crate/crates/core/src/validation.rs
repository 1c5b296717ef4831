//! Seeded self-check comparing the closed-form mean-square errors with
//! event sums, exhaustive enumeration of the set metrics and Monte-Carlo
//! estimates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::{DetectionVector, ExistenceEvent};
use crate::mse::{square_error_given_event, MetricKind, MseEvaluator};
use crate::multi_bernoulli::{BernoulliComponent, MultiBernoulli};
use crate::numeric::CompensatedSum;
use crate::oracle::{exact_mse, monte_carlo_mse};
use crate::set_metrics::{LabeledPoint, MetricConfig};

/// Instances with at most this many components are checked on every detection vector.
const EXHAUSTIVE_MAX_COMPONENTS: usize = 6;
const MAX_COMPONENTS: usize = 10;
const RANDOM_VECTORS_PER_INSTANCE: usize = 8;
const MONTE_CARLO_CONFIGS: usize = 20;
const MONTE_CARLO_MAX_COMPONENTS: usize = 8;
/// Monte-Carlo estimates must land within this many standard errors.
const MONTE_CARLO_SE_BOUND: f64 = 4.0;
const MONTE_CARLO_REQUIRED_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidationConfig {
    pub seed: u64,
    pub n_instances: usize,
    pub n_samples: u64,
    pub tolerance: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            n_instances: 200,
            n_samples: 10_000,
            tolerance: 1e-9,
        }
    }
}

/// Largest absolute discrepancy over all cases of one comparison; passes
/// when strictly below the tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceCheck {
    pub name: String,
    pub cases: usize,
    pub max_abs_error: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonteCarloCheck {
    pub configs: usize,
    pub within_bound: usize,
    pub required: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub config: ValidationConfig,
    pub checks: Vec<ToleranceCheck>,
    pub monte_carlo: MonteCarloCheck,
    pub passed: bool,
}

/// A random model with `n` components on the real line, each gap between
/// neighbours in `(1.5c, 4.5c)`.
pub fn random_separated_model<R: Rng + ?Sized>(rng: &mut R, n: usize, c: f64) -> Result<MultiBernoulli> {
    let mut x = 0.0;
    let mut components = Vec::with_capacity(n);
    for _ in 0..n {
        components.push(BernoulliComponent::new(rng.gen(), LabeledPoint::scalar(x)?)?);
        x += c * rng.gen_range(1.5..4.5);
    }
    MultiBernoulli::new(components)
}

pub fn run_validation(config: &ValidationConfig) -> Result<ValidationReport> {
    if config.tolerance.is_nan() || config.tolerance < 0.0 {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: config.tolerance,
            reason: "must be non-negative",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    // per kind: closed form vs event sum, closed form vs enumerated metric
    let mut event_sum = [Acc::default(); 4];
    let mut enumerated = [Acc::default(); 4];

    for _ in 0..config.n_instances {
        let n = rng.gen_range(0..=MAX_COMPONENTS);
        let c = rng.gen_range(0.5..3.0);
        let alpha = rng.gen_range(0.05..=2.0);
        let mb = random_separated_model(&mut rng, n, c)?;
        let eval = MseEvaluator::new(&mb, c)?;
        let cfg = MetricConfig::euclidean(2.0, c, alpha)?;

        let vectors: Vec<DetectionVector> = if n <= EXHAUSTIVE_MAX_COMPONENTS {
            (0..1u64 << n).map(|m| DetectionVector::from_mask(n, m)).collect()
        } else {
            (0..RANDOM_VECTORS_PER_INSTANCE)
                .map(|_| DetectionVector::new((0..n).map(|_| rng.gen()).collect()))
                .collect()
        };

        for e_hat in &vectors {
            let estimate = mb.report(e_hat)?;
            for (k, kind) in MetricKind::ALL.into_iter().enumerate() {
                let closed = eval.evaluate(kind, e_hat, alpha)?.value;
                let summed = event_sum_mse(&mb, kind, e_hat, c, alpha)?;
                let exact = exact_mse(&mb, &estimate, kind, &cfg)?.mean;
                event_sum[k].record((closed - summed).abs());
                enumerated[k].record((closed - exact).abs());
            }
        }
    }

    let mut checks = Vec::new();
    for (k, kind) in MetricKind::ALL.into_iter().enumerate() {
        checks.push(event_sum[k].finish(format!("{kind}: closed form vs event sum"), config.tolerance));
        checks.push(enumerated[k].finish(format!("{kind}: closed form vs enumerated metric"), config.tolerance));
    }

    let monte_carlo = monte_carlo_check(&mut rng, config.n_samples)?;
    let passed = monte_carlo.passed && checks.iter().all(|c| c.passed);
    Ok(ValidationReport {
        config: *config,
        checks,
        monte_carlo,
        passed,
    })
}

fn monte_carlo_check(rng: &mut ChaCha8Rng, n_samples: u64) -> Result<MonteCarloCheck> {
    let mut within_bound = 0;
    for k in 0..MONTE_CARLO_CONFIGS {
        let kind = MetricKind::ALL[k % MetricKind::ALL.len()];
        let n = rng.gen_range(1..=MONTE_CARLO_MAX_COMPONENTS);
        let c = rng.gen_range(0.5..3.0);
        let alpha = rng.gen_range(0.05..=2.0);
        let mb = random_separated_model(rng, n, c)?;
        let cfg = MetricConfig::euclidean(2.0, c, alpha)?;
        let estimate = mb.report(&DetectionVector::new((0..n).map(|_| rng.gen()).collect()))?;
        let seed = rng.gen();
        let exact = exact_mse(&mb, &estimate, kind, &cfg)?.mean;
        let mc = monte_carlo_mse(&mb, &estimate, kind, &cfg, n_samples, seed)?;
        if (mc.mean - exact).abs() <= MONTE_CARLO_SE_BOUND * mc.std_err {
            within_bound += 1;
        }
    }
    let required = (MONTE_CARLO_REQUIRED_FRACTION * MONTE_CARLO_CONFIGS as f64).ceil() as usize;
    Ok(MonteCarloCheck {
        configs: MONTE_CARLO_CONFIGS,
        within_bound,
        required,
        passed: within_bound >= required,
    })
}

/// `Σ_e P(e) · square_error_given_event(e, ê)`.
pub fn event_sum_mse(
    mb: &MultiBernoulli,
    kind: MetricKind,
    e_hat: &DetectionVector,
    c: f64,
    alpha: f64,
) -> Result<f64> {
    let n = mb.len();
    let mut sum = CompensatedSum::new();
    for mask in 0..1u64 << n {
        let e = ExistenceEvent::from_mask(n, mask);
        sum.add(mb.event_probability(&e)? * square_error_given_event(kind, &e, e_hat, c, alpha)?);
    }
    Ok(sum.value())
}

#[derive(Debug, Clone, Copy, Default)]
struct Acc {
    cases: usize,
    max: f64,
}

impl Acc {
    fn record(&mut self, err: f64) {
        self.cases += 1;
        self.max = self.max.max(err);
    }

    fn finish(self, name: String, tolerance: f64) -> ToleranceCheck {
        ToleranceCheck {
            name,
            cases: self.cases,
            max_abs_error: self.max,
            passed: self.max < tolerance,
        }
    }
}

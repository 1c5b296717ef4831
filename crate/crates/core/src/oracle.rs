//! Mean-square errors computed from the set metrics themselves, by
//! exhaustive event enumeration or by seeded Monte-Carlo sampling.
//!
//! Nothing here uses the closed forms of [`crate::mse`]; these engines are
//! what the closed forms are checked against.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::{DetectionVector, ExistenceEvent};
use crate::mse::MetricKind;
use crate::multi_bernoulli::MultiBernoulli;
use crate::numeric::{nearly_equal, CompensatedSum};
use crate::set_metrics::{self, MetricConfig, TargetSet};

pub const EXACT_MAX_COMPONENTS: usize = 16;
pub const PROBE_MAX_COMPONENTS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseEstimate {
    pub mean: f64,
    /// Zero for exact enumeration.
    pub std_err: f64,
    /// Zero for exact enumeration.
    pub n_samples: u64,
}

/// Squared set distance of `kind` between a realisation and an estimate.
///
/// `Gospa` uses `alpha = 2`, `Uospa` `alpha = 1` and `GospaAlpha` the
/// configured alpha.
pub fn squared_distance(truth: &TargetSet, estimate: &TargetSet, kind: MetricKind, cfg: &MetricConfig) -> Result<f64> {
    let d = match kind {
        MetricKind::Gospa => set_metrics::gospa(truth, estimate, &cfg.with_alpha(2.0)?)?,
        MetricKind::Uospa => set_metrics::uospa(truth, estimate, cfg)?,
        MetricKind::Ospa => set_metrics::ospa(truth, estimate, cfg)?,
        MetricKind::GospaAlpha => set_metrics::gospa(truth, estimate, cfg)?,
    };
    Ok(d * d)
}

/// `Σ_e P(e) d(realize(e), estimate)²` over all `2^N` existence events,
/// in binary counting order.
pub fn exact_mse(
    mb: &MultiBernoulli,
    estimate: &TargetSet,
    kind: MetricKind,
    cfg: &MetricConfig,
) -> Result<MseEstimate> {
    check_order(cfg)?;
    let n = mb.len();
    if n > EXACT_MAX_COMPONENTS {
        return Err(Error::SizeCap {
            size: n,
            cap: EXACT_MAX_COMPONENTS,
            hint: "use monte_carlo_mse for larger scenes",
        });
    }
    let mut sum = CompensatedSum::new();
    for mask in 0..1u64 << n {
        let e = ExistenceEvent::from_mask(n, mask);
        let p = mb.event_probability(&e)?;
        if p == 0.0 {
            continue;
        }
        sum.add(p * squared_distance(&mb.realize(&e)?, estimate, kind, cfg)?);
    }
    Ok(MseEstimate {
        mean: sum.value(),
        std_err: 0.0,
        n_samples: 0,
    })
}

/// Sample mean of the squared distance over `n_samples` draws from a
/// ChaCha8 generator seeded with `seed`.
pub fn monte_carlo_mse(
    mb: &MultiBernoulli,
    estimate: &TargetSet,
    kind: MetricKind,
    cfg: &MetricConfig,
    n_samples: u64,
    seed: u64,
) -> Result<MseEstimate> {
    check_order(cfg)?;
    if n_samples == 0 {
        return Err(Error::InvalidParameter {
            name: "n_samples",
            value: 0.0,
            reason: "need at least one sample",
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut memo: HashMap<ExistenceEvent, f64> = HashMap::new();
    // Welford
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for k in 1..=n_samples {
        let e = mb.sample_event(&mut rng);
        let value = match memo.get(&e) {
            Some(&v) => v,
            None => {
                let v = squared_distance(&mb.realize(&e)?, estimate, kind, cfg)?;
                memo.insert(e, v);
                v
            }
        };
        let delta = value - mean;
        mean += delta / k as f64;
        m2 += delta * (value - mean);
    }
    let std_err = if n_samples > 1 {
        (m2 / (n_samples - 1) as f64).sqrt() / (n_samples as f64).sqrt()
    } else {
        0.0
    };
    Ok(MseEstimate {
        mean,
        std_err,
        n_samples,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeCase {
    /// The on-location estimate being perturbed.
    pub base: DetectionVector,
    /// Component whose reported location is moved.
    pub component: usize,
    pub epsilon: f64,
    pub base_mse: f64,
    pub perturbed_mse: f64,
    /// `perturbed_mse − base_mse`.
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub metric_kind: MetricKind,
    pub best_mse: f64,
    /// Every on-location estimate attaining `best_mse`.
    pub best: Vec<DetectionVector>,
    pub cases: Vec<ProbeCase>,
}

impl ProbeReport {
    pub fn min_margin(&self) -> Option<f64> {
        self.cases.iter().map(|c| c.margin).reduce(f64::min)
    }

    /// True when every case with `epsilon > 0` has a strictly positive margin.
    pub fn all_strictly_worse(&self) -> bool {
        self.cases.iter().filter(|c| c.epsilon > 0.0).all(|c| c.margin > 0.0)
    }
}

/// Finds the best estimates among the `2^N` subsets of the component
/// locations, then moves each reported point of each of them along the
/// first coordinate axis by every magnitude and records the change in
/// exact mean-square error.
pub fn subset_optimality_probe(
    mb: &MultiBernoulli,
    cfg: &MetricConfig,
    kind: MetricKind,
    magnitudes: &[f64],
) -> Result<ProbeReport> {
    let n = mb.len();
    if n > PROBE_MAX_COMPONENTS {
        return Err(Error::SizeCap {
            size: n,
            cap: PROBE_MAX_COMPONENTS,
            hint: "probe smaller scenes",
        });
    }
    if let Some(&bad) = magnitudes.iter().find(|m| !m.is_finite() || **m < 0.0) {
        return Err(Error::InvalidParameter {
            name: "perturbation magnitude",
            value: bad,
            reason: "must be finite and non-negative",
        });
    }

    let mut scored = Vec::with_capacity(1 << n);
    for mask in 0..1u64 << n {
        let e_hat = DetectionVector::from_mask(n, mask);
        let value = exact_mse(mb, &mb.report(&e_hat)?, kind, cfg)?.mean;
        scored.push((e_hat, value));
    }
    let best_mse = scored.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let best: Vec<DetectionVector> = scored
        .into_iter()
        .filter(|(_, v)| nearly_equal(*v, best_mse, 1e-12))
        .map(|(e, _)| e)
        .collect();

    let mut cases = Vec::new();
    for base in &best {
        let base_set = mb.report(base)?;
        let base_mse = exact_mse(mb, &base_set, kind, cfg)?.mean;
        for (slot, component) in base.ones_indices().enumerate() {
            for &epsilon in magnitudes {
                let mut points = base_set.points().to_vec();
                points[slot] = points[slot].shifted(0, epsilon)?;
                let perturbed_mse = exact_mse(mb, &TargetSet::new(points)?, kind, cfg)?.mean;
                cases.push(ProbeCase {
                    base: base.clone(),
                    component,
                    epsilon,
                    base_mse,
                    perturbed_mse,
                    margin: perturbed_mse - base_mse,
                });
            }
        }
    }
    Ok(ProbeReport {
        metric_kind: kind,
        best_mse,
        best,
        cases,
    })
}

fn check_order(cfg: &MetricConfig) -> Result<()> {
    if cfg.p() != 2.0 {
        Err(Error::OrderNotTwo(cfg.p()))
    } else {
        Ok(())
    }
}

//! Optimal mean-square estimators and the comparison estimators.
//!
//! Every estimator returns a [`DetectionVector`]: the estimate is the set of
//! locations of the reported components. Ties are resolved toward fewer
//! detections, then toward the lexicographically smallest vector, and all
//! co-optimal vectors are listed in [`EstimateOutcome::ties`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::DetectionVector;
use crate::mse::{self, check_alpha, check_cutoff, MetricKind, MseEvaluator};
use crate::multi_bernoulli::MultiBernoulli;
use crate::numeric::nearly_equal;

/// Largest number of components for which the `2^N` enumerations run.
pub const ENUMERATION_MAX_COMPONENTS: usize = 20;

/// At most this many co-optimal vectors are listed in an outcome.
pub const MAX_REPORTED_TIES: usize = 1024;

/// Objective values within this relative distance of the optimum are ties.
pub const TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum EstimatorKind {
    OptGospa2,
    OptUospa,
    OptOspa,
    OptGospaAlpha,
    MarginalMultitarget,
    Jom,
    MaxCardinality,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 7] = [
        EstimatorKind::OptGospa2,
        EstimatorKind::OptUospa,
        EstimatorKind::OptOspa,
        EstimatorKind::OptGospaAlpha,
        EstimatorKind::MarginalMultitarget,
        EstimatorKind::Jom,
        EstimatorKind::MaxCardinality,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EstimatorKind::OptGospa2 => "gospa",
            EstimatorKind::OptUospa => "uospa",
            EstimatorKind::OptOspa => "ospa",
            EstimatorKind::OptGospaAlpha => "gospa-alpha",
            EstimatorKind::MarginalMultitarget => "mam",
            EstimatorKind::Jom => "jom",
            EstimatorKind::MaxCardinality => "maxcard",
        }
    }

    /// The metric an optimal estimator minimises, if any.
    pub fn metric(self) -> Option<MetricKind> {
        match self {
            EstimatorKind::OptGospa2 => Some(MetricKind::Gospa),
            EstimatorKind::OptUospa => Some(MetricKind::Uospa),
            EstimatorKind::OptOspa => Some(MetricKind::Ospa),
            EstimatorKind::OptGospaAlpha => Some(MetricKind::GospaAlpha),
            _ => None,
        }
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EstimatorKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownName {
                what: "estimator",
                value: s.to_owned(),
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimateOutcome {
    pub e_hat: DetectionVector,
    /// Minimised mean-square error for the metric estimators, maximised
    /// score for the others.
    pub objective_value: f64,
    /// Every co-optimal vector (capped at [`MAX_REPORTED_TIES`]), ordered by
    /// the tie-break rule; `ties[0] == e_hat`.
    pub ties: Vec<DetectionVector>,
}

/// Optimal number of reported targets when all components share one `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IdenticalROutcome {
    pub n_hat: usize,
    pub mse: f64,
}

/// Mean-square GOSPA optimum: report component `i` iff `rᵢ > 0.5`.
///
/// Each decision depends on that component's probability alone. Components
/// with `rᵢ = 0.5` exactly are not reported; flipping them gives the ties.
pub fn optimal_gospa2(mb: &MultiBernoulli, c: f64) -> Result<EstimateOutcome> {
    check_cutoff(c)?;
    let e_hat = DetectionVector::new(mb.existence_probabilities().map(|r| r > 0.5).collect());
    let objective_value = MseEvaluator::new_unchecked(mb, c)?.msgospa(&e_hat)?;
    let boundary: Vec<usize> = mb
        .existence_probabilities()
        .enumerate()
        .filter(|&(_, r)| r == 0.5)
        .map(|(i, _)| i)
        .collect();
    let mut ties = Vec::new();
    for k in 0..=boundary.len() {
        for_each_combination(boundary.len(), k, &mut |chosen| {
            if ties.len() >= MAX_REPORTED_TIES {
                return false;
            }
            let mut bits = e_hat.as_slice().to_vec();
            for &b in chosen {
                bits[boundary[b]] = true;
            }
            ties.push(DetectionVector::new(bits));
            true
        });
    }
    ties.sort_by(tie_order);
    Ok(EstimateOutcome {
        e_hat,
        objective_value,
        ties,
    })
}

/// Minimises the closed-form mean-square error of `kind` over all `2^N`
/// detection vectors. `alpha` is read only for [`MetricKind::GospaAlpha`].
pub fn optimal_by_enumeration(mb: &MultiBernoulli, kind: MetricKind, c: f64, alpha: f64) -> Result<EstimateOutcome> {
    check_enumeration_size(mb.len())?;
    if kind == MetricKind::GospaAlpha {
        check_alpha(alpha)?;
    }
    let eval = MseEvaluator::new(mb, c)?;
    Ok(enumerate_best(mb.len(), Goal::Minimise, |detected| {
        eval.value_at(kind, detected, alpha)
    }))
}

/// OSPA optimum for `n_components` components sharing existence probability
/// `r`: all of them when `(1 − r)^N < r`, none otherwise.
pub fn optimal_ospa_identical_r(n_components: usize, r: f64, c: f64) -> Result<IdenticalROutcome> {
    check_identical(n_components, r, c)?;
    let none_exist = (1.0 - r).powi(n_components as i32);
    Ok(if none_exist < r {
        IdenticalROutcome {
            n_hat: n_components,
            mse: c * c * (1.0 - r),
        }
    } else {
        IdenticalROutcome {
            n_hat: 0,
            mse: c * c * (1.0 - none_exist),
        }
    })
}

/// UOSPA optimum for `n_components` components sharing existence probability
/// `r`; ties go to the smaller count.
pub fn optimal_uospa_identical_r(n_components: usize, r: f64, c: f64) -> Result<IdenticalROutcome> {
    check_identical(n_components, r, c)?;
    let mut best = IdenticalROutcome {
        n_hat: 0,
        mse: mse::msuospa_identical_r(n_components, r, 0, c)?,
    };
    for n_hat in 1..=n_components {
        let value = mse::msuospa_identical_r(n_components, r, n_hat, c)?;
        if value < best.mse - TIE_TOLERANCE * best.mse.abs().max(1.0) {
            best = IdenticalROutcome { n_hat, mse: value };
        }
    }
    Ok(best)
}

/// GOSPA optimum for `n_components` components sharing existence probability `r`.
pub fn optimal_gospa2_identical_r(n_components: usize, r: f64, c: f64) -> Result<IdenticalROutcome> {
    check_identical(n_components, r, c)?;
    let per_component = if r > 0.5 { 1.0 - r } else { r };
    Ok(IdenticalROutcome {
        n_hat: if r > 0.5 { n_components } else { 0 },
        mse: 0.5 * c * c * n_components as f64 * per_component,
    })
}

/// Reports the most probable number of targets, choosing the components
/// with the largest existence probabilities (lower index first on ties).
/// The objective is the probability of that cardinality.
pub fn max_cardinality_estimator(mb: &MultiBernoulli) -> EstimateOutcome {
    let rho = mb.cardinality_distribution();
    let best_p = rho.as_slice().iter().copied().fold(0.0, f64::max);
    let modes: Vec<usize> = (0..=mb.len())
        .filter(|&n| nearly_equal(rho.get(n), best_p, TIE_TOLERANCE))
        .collect();
    let n_star = modes[0];

    let mut order: Vec<usize> = (0..mb.len()).collect();
    let r: Vec<f64> = mb.existence_probabilities().collect();
    order.sort_by(|&a, &b| r[b].total_cmp(&r[a]).then(a.cmp(&b)));

    let top = |n: usize| {
        let mut bits = vec![false; mb.len()];
        for &i in &order[..n] {
            bits[i] = true;
        }
        DetectionVector::new(bits)
    };

    let mut ties = Vec::new();
    for &n in &modes {
        if n == 0 || n == mb.len() {
            ties.push(top(n));
            continue;
        }
        // components with r equal to the n-th largest are interchangeable
        let pivot = r[order[n - 1]];
        let forced: Vec<usize> = (0..mb.len()).filter(|&i| r[i] > pivot).collect();
        let swappable: Vec<usize> = (0..mb.len()).filter(|&i| r[i] == pivot).collect();
        for_each_combination(swappable.len(), n - forced.len(), &mut |chosen| {
            if ties.len() >= MAX_REPORTED_TIES {
                return false;
            }
            let mut bits = vec![false; mb.len()];
            for &i in forced.iter().chain(chosen.iter().map(|&k| &swappable[k])) {
                bits[i] = true;
            }
            ties.push(DetectionVector::new(bits));
            true
        });
    }
    ties.sort_by(tie_order);
    ties.dedup();

    EstimateOutcome {
        e_hat: top(n_star),
        objective_value: rho.get(n_star),
        ties,
    }
}

/// Marginal multitarget estimator. For separated Dirac-located components
/// its decision coincides with [`max_cardinality_estimator`], which it
/// delegates to.
pub fn marginal_multitarget_estimator(mb: &MultiBernoulli) -> EstimateOutcome {
    max_cardinality_estimator(mb)
}

/// Joint multitarget estimator in the separated-component limit, where its
/// score reduces to `p(ê) / n̂!`.
pub fn jom_estimator(mb: &MultiBernoulli) -> Result<EstimateOutcome> {
    check_enumeration_size(mb.len())?;
    let r: Vec<f64> = mb.existence_probabilities().collect();
    let log_miss: f64 = r.iter().map(|&ri| 1.0 - ri).product();
    Ok(enumerate_best(mb.len(), Goal::Maximise, |detected| {
        jom_score(&r, detected, log_miss)
    }))
}

/// `p(ê) / n̂!` for the vector reporting `detected`.
fn jom_score(r: &[f64], detected: &[usize], all_missing: f64) -> f64 {
    let mut p = if all_missing > 0.0 {
        let mut p = all_missing;
        for &i in detected {
            p *= r[i] / (1.0 - r[i]);
        }
        p
    } else {
        // some component has r = 1; fall back to the direct product
        let mut next = detected.iter().peekable();
        r.iter()
            .enumerate()
            .map(|(i, &ri)| {
                if next.next_if(|&&d| d == i).is_some() {
                    ri
                } else {
                    1.0 - ri
                }
            })
            .product()
    };
    for k in 2..=detected.len() {
        p /= k as f64;
    }
    p
}

/// Runs the estimator `kind`. `alpha` is read only by [`EstimatorKind::OptGospaAlpha`].
pub fn run_estimator(kind: EstimatorKind, mb: &MultiBernoulli, c: f64, alpha: f64) -> Result<EstimateOutcome> {
    match kind {
        EstimatorKind::OptGospa2 => optimal_gospa2(mb, c),
        EstimatorKind::OptUospa => optimal_by_enumeration(mb, MetricKind::Uospa, c, alpha),
        EstimatorKind::OptOspa => optimal_by_enumeration(mb, MetricKind::Ospa, c, alpha),
        EstimatorKind::OptGospaAlpha => optimal_by_enumeration(mb, MetricKind::GospaAlpha, c, alpha),
        EstimatorKind::MarginalMultitarget => Ok(marginal_multitarget_estimator(mb)),
        EstimatorKind::Jom => jom_estimator(mb),
        EstimatorKind::MaxCardinality => Ok(max_cardinality_estimator(mb)),
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Goal {
    Minimise,
    Maximise,
}

/// Evaluates `objective` on every subset of `0..n` (binary counting order)
/// and returns the best one under the tie-break rule.
fn enumerate_best(n: usize, goal: Goal, mut objective: impl FnMut(&[usize]) -> f64) -> EstimateOutcome {
    let total = 1u64 << n;
    let mut values = Vec::with_capacity(total as usize);
    let mut detected = Vec::with_capacity(n);
    for mask in 0..total {
        detected.clear();
        detected.extend((0..n).filter(|&i| mask >> i & 1 == 1));
        values.push(objective(&detected));
    }
    let best = match goal {
        Goal::Minimise => values.iter().copied().fold(f64::INFINITY, f64::min),
        Goal::Maximise => values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    let mut ties: Vec<DetectionVector> = values
        .iter()
        .enumerate()
        .filter(|&(_, &v)| nearly_equal(v, best, TIE_TOLERANCE))
        .map(|(mask, _)| DetectionVector::from_mask(n, mask as u64))
        .collect();
    ties.sort_by(tie_order);
    ties.truncate(MAX_REPORTED_TIES);
    let e_hat = ties[0].clone();
    let objective_value = values[mask_of(&e_hat) as usize];
    EstimateOutcome {
        e_hat,
        objective_value,
        ties,
    }
}

fn mask_of(e_hat: &DetectionVector) -> u64 {
    e_hat.ones_indices().fold(0u64, |m, i| m | 1 << i)
}

/// Fewest detections first, then lexicographic with `0 < 1`.
fn tie_order(a: &DetectionVector, b: &DetectionVector) -> Ordering {
    a.count().cmp(&b.count()).then_with(|| a.cmp(b))
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order until it
/// returns `false`.
fn for_each_combination(n: usize, k: usize, f: &mut dyn FnMut(&[usize]) -> bool) {
    fn go(start: usize, n: usize, k: usize, current: &mut Vec<usize>, f: &mut dyn FnMut(&[usize]) -> bool) -> bool {
        if current.len() == k {
            return f(current);
        }
        for i in start..n {
            if n - i < k - current.len() {
                break;
            }
            current.push(i);
            let keep_going = go(i + 1, n, k, current, f);
            current.pop();
            if !keep_going {
                return false;
            }
        }
        true
    }
    if k <= n {
        go(0, n, k, &mut Vec::with_capacity(k), f);
    }
}

fn check_enumeration_size(n: usize) -> Result<()> {
    if n > ENUMERATION_MAX_COMPONENTS {
        Err(Error::SizeCap {
            size: n,
            cap: ENUMERATION_MAX_COMPONENTS,
            hint: "use the identical-r fast paths for larger scenes",
        })
    } else {
        Ok(())
    }
}

fn check_identical(n_components: usize, r: f64, c: f64) -> Result<()> {
    check_cutoff(c)?;
    if n_components == 0 {
        return Err(Error::InvalidParameter {
            name: "n_components",
            value: 0.0,
            reason: "need at least one component",
        });
    }
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "existence probability must lie in [0, 1]",
        });
    }
    Ok(())
}

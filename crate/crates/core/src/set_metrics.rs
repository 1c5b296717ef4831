//! OSPA, UOSPA and GOSPA distances between finite target sets.
//!
//! All three are computed from a minimum-cost assignment of the smaller set
//! into the larger one under the cut-off distance `min(d, c)`. For `alpha = 2`
//! GOSPA can additionally be written as an optimisation over partial
//! assignments with uncut distances, which splits the value into localisation,
//! missed-target and false-target costs ([`gospa_alpha2_decomposed`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::assignment::{solve_full_assignment, solve_partial_assignment, CostMatrix};
use crate::error::{Error, Result};

/// A single-target state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LabeledPoint {
    coords: Vec<f64>,
}

impl LabeledPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::EmptyPoint);
        }
        if coords.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        Ok(Self { coords })
    }

    /// One-dimensional point.
    pub fn scalar(value: f64) -> Result<Self> {
        Self::new(vec![value])
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Copy of this point moved by `offset` along coordinate `axis`.
    pub fn shifted(&self, axis: usize, offset: f64) -> Result<Self> {
        if axis >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: axis,
                len: self.dim(),
            });
        }
        let mut coords = self.coords.clone();
        coords[axis] += offset;
        Self::new(coords)
    }
}

impl TryFrom<Vec<f64>> for LabeledPoint {
    type Error = Error;

    fn try_from(coords: Vec<f64>) -> Result<Self> {
        Self::new(coords)
    }
}

impl From<LabeledPoint> for Vec<f64> {
    fn from(point: LabeledPoint) -> Self {
        point.coords
    }
}

/// Finite collection of points sharing one dimension. Duplicates are kept as
/// distinct elements.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LabeledPoint>", into = "Vec<LabeledPoint>")]
pub struct TargetSet {
    points: Vec<LabeledPoint>,
}

impl TargetSet {
    pub fn new(points: Vec<LabeledPoint>) -> Result<Self> {
        if let Some(first) = points.first() {
            let dim = first.dim();
            if let Some(bad) = points.iter().find(|p| p.dim() != dim) {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: bad.dim(),
                });
            }
        }
        Ok(Self { points })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Set of one-dimensional points.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        values
            .iter()
            .map(|&v| LabeledPoint::scalar(v))
            .collect::<Result<Vec<_>>>()
            .and_then(Self::new)
    }

    pub fn points(&self) -> &[LabeledPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Dimension of the points, `None` for the empty set.
    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(LabeledPoint::dim)
    }
}

impl TryFrom<Vec<LabeledPoint>> for TargetSet {
    type Error = Error;

    fn try_from(points: Vec<LabeledPoint>) -> Result<Self> {
        Self::new(points)
    }
}

impl From<TargetSet> for Vec<LabeledPoint> {
    fn from(set: TargetSet) -> Self {
        set.points
    }
}

/// Single-target base metric.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaseDistance {
    #[default]
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl BaseDistance {
    /// Distance between two coordinate slices of equal length.
    pub fn distance(self, x: &[f64], y: &[f64]) -> f64 {
        let diffs = x.iter().zip(y).map(|(a, b)| (a - b).abs());
        match self {
            BaseDistance::Euclidean => diffs.map(|d| d * d).sum::<f64>().sqrt(),
            BaseDistance::Manhattan => diffs.sum(),
            BaseDistance::Chebyshev => diffs.fold(0.0, f64::max),
        }
    }
}

impl FromStr for BaseDistance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" => Ok(Self::Euclidean),
            "manhattan" => Ok(Self::Manhattan),
            "chebyshev" => Ok(Self::Chebyshev),
            _ => Err(Error::UnknownName {
                what: "base distance",
                value: s.to_owned(),
            }),
        }
    }
}

impl fmt::Display for BaseDistance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseDistance::Euclidean => "euclidean",
            BaseDistance::Manhattan => "manhattan",
            BaseDistance::Chebyshev => "chebyshev",
        })
    }
}

/// Order `p`, cut-off `c`, cardinality penalty `alpha` and base metric.
///
/// `alpha` is only read by GOSPA.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawMetricConfig", into = "RawMetricConfig")]
pub struct MetricConfig {
    p: f64,
    c: f64,
    alpha: f64,
    base_distance: BaseDistance,
}

#[derive(Serialize, Deserialize)]
struct RawMetricConfig {
    p: f64,
    c: f64,
    alpha: f64,
    #[serde(default)]
    base_distance: BaseDistance,
}

impl MetricConfig {
    pub fn new(p: f64, c: f64, alpha: f64, base_distance: BaseDistance) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::InvalidParameter {
                name: "p",
                value: p,
                reason: "must satisfy 1 <= p < inf",
            });
        }
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                reason: "must be finite and positive",
            });
        }
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must lie in (0, 2]",
            });
        }
        Ok(Self {
            p,
            c,
            alpha,
            base_distance,
        })
    }

    /// Euclidean configuration.
    pub fn euclidean(p: f64, c: f64, alpha: f64) -> Result<Self> {
        Self::new(p, c, alpha, BaseDistance::Euclidean)
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn base_distance(&self) -> BaseDistance {
        self.base_distance
    }

    /// Same configuration with a different `alpha`.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.p, self.c, alpha, self.base_distance)
    }

    fn c_pow(&self) -> f64 {
        self.c.powf(self.p)
    }
}

impl TryFrom<RawMetricConfig> for MetricConfig {
    type Error = Error;

    fn try_from(raw: RawMetricConfig) -> Result<Self> {
        Self::new(raw.p, raw.c, raw.alpha, raw.base_distance)
    }
}

impl From<MetricConfig> for RawMetricConfig {
    fn from(cfg: MetricConfig) -> Self {
        RawMetricConfig {
            p: cfg.p,
            c: cfg.c,
            alpha: cfg.alpha,
            base_distance: cfg.base_distance,
        }
    }
}

/// GOSPA (`alpha = 2`) split into its cost terms.
///
/// The cost fields are pre-root sums: `total = (localisation + missed + false)^(1/p)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GospaDecomposition {
    pub total: f64,
    pub localisation_cost: f64,
    pub missed_cost: f64,
    pub false_cost: f64,
    /// `(index in X, index in Y)` pairs, sorted by the X index.
    pub assignment: Vec<(usize, usize)>,
}

pub fn base_distance(x: &LabeledPoint, y: &LabeledPoint, cfg: &MetricConfig) -> Result<f64> {
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            expected: x.dim(),
            found: y.dim(),
        });
    }
    Ok(cfg.base_distance.distance(&x.coords, &y.coords))
}

pub fn cutoff_distance(x: &LabeledPoint, y: &LabeledPoint, cfg: &MetricConfig) -> Result<f64> {
    Ok(base_distance(x, y, cfg)?.min(cfg.c))
}

/// OSPA distance; `c` when exactly one set is empty, `0` when both are.
pub fn ospa(x: &TargetSet, y: &TargetSet, cfg: &MetricConfig) -> Result<f64> {
    check_dims(x, y)?;
    let (small, large) = ordered(x, y);
    if large.is_empty() {
        return Ok(0.0);
    }
    if small.is_empty() {
        return Ok(cfg.c);
    }
    let matched = cutoff_assignment_cost(small, large, cfg)?;
    let padding = cfg.c_pow() * (large.len() - small.len()) as f64;
    let value = ((matched + padding) / large.len() as f64).powf(1.0 / cfg.p);
    Ok(value.min(cfg.c))
}

/// GOSPA distance with the configured `alpha`.
pub fn gospa(x: &TargetSet, y: &TargetSet, cfg: &MetricConfig) -> Result<f64> {
    check_dims(x, y)?;
    let (small, large) = ordered(x, y);
    let matched = cutoff_assignment_cost(small, large, cfg)?;
    let padding = cfg.c_pow() / cfg.alpha * (large.len() - small.len()) as f64;
    Ok((matched + padding).powf(1.0 / cfg.p))
}

/// Unnormalised OSPA, i.e. GOSPA with `alpha = 1` (the configured alpha is ignored).
pub fn uospa(x: &TargetSet, y: &TargetSet, cfg: &MetricConfig) -> Result<f64> {
    gospa(x, y, &cfg.with_alpha(1.0)?)
}

/// GOSPA for `alpha = 2` via optimal partial assignment with uncut distances.
///
/// `x` plays the role of the ground truth: its unassigned points are missed
/// targets, unassigned points of `y` are false targets.
pub fn gospa_alpha2_decomposed(x: &TargetSet, y: &TargetSet, cfg: &MetricConfig) -> Result<GospaDecomposition> {
    if cfg.alpha != 2.0 {
        return Err(Error::AlphaNotTwo(cfg.alpha));
    }
    check_dims(x, y)?;
    let half = cfg.c_pow() / 2.0;
    // Pairs with d^p >= c^p are never assigned, so capping them at 2c^p keeps
    // far-apart coordinates finite without changing the optimum.
    let cap = 2f64.powf(1.0 / cfg.p) * cfg.c;
    let costs = distance_matrix(x, y, cfg, cap)?;
    let solved = solve_partial_assignment(&costs, half)?;
    let assigned = solved.pairs.len();
    let localisation_cost: f64 = solved.pairs.iter().map(|&(i, j)| costs.get(i, j)).sum();
    let missed_cost = half * (x.len() - assigned) as f64;
    let false_cost = half * (y.len() - assigned) as f64;
    Ok(GospaDecomposition {
        total: (localisation_cost + missed_cost + false_cost).powf(1.0 / cfg.p),
        localisation_cost,
        missed_cost,
        false_cost,
        assignment: solved.pairs,
    })
}

fn check_dims(x: &TargetSet, y: &TargetSet) -> Result<()> {
    match (x.dim(), y.dim()) {
        (Some(a), Some(b)) if a != b => Err(Error::DimensionMismatch { expected: a, found: b }),
        _ => Ok(()),
    }
}

fn ordered<'a>(x: &'a TargetSet, y: &'a TargetSet) -> (&'a TargetSet, &'a TargetSet) {
    if x.len() <= y.len() {
        (x, y)
    } else {
        (y, x)
    }
}

/// `min(d, cutoff)^p` for every pair.
fn distance_matrix(x: &TargetSet, y: &TargetSet, cfg: &MetricConfig, cutoff: f64) -> Result<CostMatrix> {
    let mut data = Vec::with_capacity(x.len() * y.len());
    for a in &x.points {
        for b in &y.points {
            data.push(base_distance(a, b, cfg)?.min(cutoff).powf(cfg.p));
        }
    }
    CostMatrix::new(x.len(), y.len(), data)
}

fn cutoff_assignment_cost(small: &TargetSet, large: &TargetSet, cfg: &MetricConfig) -> Result<f64> {
    if small.is_empty() {
        return Ok(0.0);
    }
    let costs = distance_matrix(small, large, cfg, cfg.c)?;
    Ok(solve_full_assignment(&costs)?.total_cost)
}

//! Closed-form mean-square metric errors (p = 2) for estimates that report a
//! subset of the component locations.
//!
//! The formulas hold only when every pair of components is further apart
//! than the cut-off `c`; [`MseEvaluator::new`] enforces that. With
//! `ρ` the cardinality pmf, `ρ₋ᵢ` the pmf without component `i`,
//! `n̂ = Σ êᵢ` and `D = Σ êᵢ rᵢ`:
//!
//! ```text
//! GOSPA (α = 2)  (c²/2) Σᵢ [rᵢ(1 − êᵢ) + (1 − rᵢ)êᵢ]
//! UOSPA          c² [Σₙ ρ(n) max(n, n̂) − D]
//! OSPA           c² (1 − Σᵢ êᵢ rᵢ Σₙ ρ₋ᵢ(n) / max(n + 1, n̂))    (n̂ > 0)
//!                c² (1 − ρ(0))                                   (n̂ = 0)
//! GOSPA (α)      Σₙ [(c²/α)|n − n̂| + c² min(n, n̂)] ρ(n) − c² D
//! ```

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::indicator::{DetectionVector, ExistenceEvent};
use crate::multi_bernoulli::{CardinalityPmf, MultiBernoulli};
use crate::numeric::{compensated_sum, CompensatedSum};
use crate::set_metrics::MetricConfig;

/// Which set metric a mean-square error refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MetricKind {
    /// GOSPA with `alpha = 2`.
    Gospa,
    Uospa,
    Ospa,
    /// GOSPA with a caller-supplied `alpha`.
    GospaAlpha,
}

impl MetricKind {
    pub const ALL: [MetricKind; 4] = [
        MetricKind::Gospa,
        MetricKind::Uospa,
        MetricKind::Ospa,
        MetricKind::GospaAlpha,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Gospa => "gospa",
            MetricKind::Uospa => "uospa",
            MetricKind::Ospa => "ospa",
            MetricKind::GospaAlpha => "gospa-alpha",
        }
    }

    /// The `alpha` this kind uses, given the caller's value.
    pub fn effective_alpha(self, alpha: f64) -> Option<f64> {
        match self {
            MetricKind::Gospa => Some(2.0),
            MetricKind::Uospa => Some(1.0),
            MetricKind::Ospa => None,
            MetricKind::GospaAlpha => Some(alpha),
        }
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gospa" | "gospa2" => Ok(MetricKind::Gospa),
            "uospa" => Ok(MetricKind::Uospa),
            "ospa" => Ok(MetricKind::Ospa),
            "gospa-alpha" | "gospa_alpha" => Ok(MetricKind::GospaAlpha),
            _ => Err(Error::UnknownName {
                what: "metric kind",
                value: s.to_owned(),
            }),
        }
    }
}

/// A closed-form mean-square error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MseReport {
    pub value: f64,
    pub metric_kind: MetricKind,
    pub c: f64,
    pub alpha: Option<f64>,
}

/// Closed-form mean-square errors for one posterior and cut-off.
///
/// Construction precomputes `ρ` and, for every component `i` and estimate
/// size `n̂`, the OSPA weight `Σₙ ρ₋ᵢ(n) / max(n + 1, n̂)`, so each query is
/// linear in the number of components.
#[derive(Debug, Clone)]
pub struct MseEvaluator<'a> {
    mb: &'a MultiBernoulli,
    c: f64,
    rho: CardinalityPmf,
    /// `ospa_weights[i][n̂ − 1]`
    ospa_weights: Vec<Vec<f64>>,
}

impl<'a> MseEvaluator<'a> {
    /// Fails when two components are within `c` of each other.
    pub fn new(mb: &'a MultiBernoulli, c: f64) -> Result<Self> {
        check_cutoff(c)?;
        mb.validate_separation(c).into_result()?;
        Ok(Self::build(mb, c))
    }

    /// Skips the separation check. The returned values are still the
    /// formulas above, but they no longer equal the expected squared metric
    /// when components are within `c` of each other.
    pub fn new_unchecked(mb: &'a MultiBernoulli, c: f64) -> Result<Self> {
        check_cutoff(c)?;
        Ok(Self::build(mb, c))
    }

    /// Uses `cfg.c()`; rejects any order other than `p = 2`.
    pub fn from_config(mb: &'a MultiBernoulli, cfg: &MetricConfig) -> Result<Self> {
        if cfg.p() != 2.0 {
            return Err(Error::OrderNotTwo(cfg.p()));
        }
        Self::new(mb, cfg.c())
    }

    fn build(mb: &'a MultiBernoulli, c: f64) -> Self {
        let n = mb.len();
        let ospa_weights = (0..n)
            .map(|i| {
                let loo = mb.leave_one_out_cardinality(i).expect("index in range");
                (1..=n)
                    .map(|n_hat| {
                        compensated_sum(
                            loo.as_slice()
                                .iter()
                                .enumerate()
                                .map(|(k, &p)| p / (k + 1).max(n_hat) as f64),
                        )
                    })
                    .collect()
            })
            .collect();
        Self {
            mb,
            c,
            rho: mb.cardinality_distribution(),
            ospa_weights,
        }
    }

    pub fn model(&self) -> &MultiBernoulli {
        self.mb
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn cardinality(&self) -> &CardinalityPmf {
        &self.rho
    }

    pub fn msgospa(&self, e_hat: &DetectionVector) -> Result<f64> {
        Ok(self.msgospa_at(&self.detected(e_hat)?))
    }

    pub fn msuospa(&self, e_hat: &DetectionVector) -> Result<f64> {
        Ok(self.msuospa_at(&self.detected(e_hat)?))
    }

    pub fn msospa(&self, e_hat: &DetectionVector) -> Result<f64> {
        Ok(self.msospa_at(&self.detected(e_hat)?))
    }

    pub fn msgospa_alpha(&self, e_hat: &DetectionVector, alpha: f64) -> Result<f64> {
        check_alpha(alpha)?;
        Ok(self.msgospa_alpha_at(&self.detected(e_hat)?, alpha))
    }

    /// Mean-square error of `kind`; `alpha` is read only for [`MetricKind::GospaAlpha`].
    pub fn evaluate(&self, kind: MetricKind, e_hat: &DetectionVector, alpha: f64) -> Result<MseReport> {
        if kind == MetricKind::GospaAlpha {
            check_alpha(alpha)?;
        }
        let detected = self.detected(e_hat)?;
        Ok(MseReport {
            value: self.value_at(kind, &detected, alpha),
            metric_kind: kind,
            c: self.c,
            alpha: kind.effective_alpha(alpha),
        })
    }

    /// Value for the estimate reporting exactly the components in `detected`
    /// (ascending, in range). `alpha` must already be validated.
    pub(crate) fn value_at(&self, kind: MetricKind, detected: &[usize], alpha: f64) -> f64 {
        match kind {
            MetricKind::Gospa => self.msgospa_at(detected),
            MetricKind::Uospa => self.msuospa_at(detected),
            MetricKind::Ospa => self.msospa_at(detected),
            MetricKind::GospaAlpha => self.msgospa_alpha_at(detected, alpha),
        }
    }

    fn detected(&self, e_hat: &DetectionVector) -> Result<Vec<usize>> {
        if e_hat.len() != self.mb.len() {
            return Err(Error::LengthMismatch {
                expected: self.mb.len(),
                found: e_hat.len(),
            });
        }
        Ok(e_hat.ones_indices().collect())
    }

    fn r(&self, i: usize) -> f64 {
        self.mb.components()[i].r()
    }

    fn detected_mass(&self, detected: &[usize]) -> f64 {
        compensated_sum(detected.iter().map(|&i| self.r(i)))
    }

    fn msgospa_at(&self, detected: &[usize]) -> f64 {
        let mut acc = CompensatedSum::new();
        let mut next = detected.iter().peekable();
        for (i, component) in self.mb.components().iter().enumerate() {
            let reported = next.next_if(|&&d| d == i).is_some();
            acc.add(if reported { 1.0 - component.r() } else { component.r() });
        }
        0.5 * self.c * self.c * acc.value()
    }

    fn msuospa_at(&self, detected: &[usize]) -> f64 {
        let n_hat = detected.len();
        let expected_max = compensated_sum(
            self.rho
                .as_slice()
                .iter()
                .enumerate()
                .map(|(n, &p)| p * n.max(n_hat) as f64),
        );
        self.c * self.c * (expected_max - self.detected_mass(detected))
    }

    fn msospa_at(&self, detected: &[usize]) -> f64 {
        let n_hat = detected.len();
        if n_hat == 0 {
            return self.c * self.c * (1.0 - self.rho.get(0));
        }
        let matched = compensated_sum(detected.iter().map(|&i| self.r(i) * self.ospa_weights[i][n_hat - 1]));
        self.c * self.c * (1.0 - matched)
    }

    fn msgospa_alpha_at(&self, detected: &[usize], alpha: f64) -> f64 {
        let n_hat = detected.len();
        let c2 = self.c * self.c;
        let expected = compensated_sum(
            self.rho
                .as_slice()
                .iter()
                .enumerate()
                .map(|(n, &p)| (c2 / alpha * n.abs_diff(n_hat) as f64 + c2 * n.min(n_hat) as f64) * p),
        );
        expected - c2 * self.detected_mass(detected)
    }
}

/// Mean-square GOSPA (`alpha = 2`) error of the estimate `e_hat`.
pub fn msgospa(mb: &MultiBernoulli, e_hat: &DetectionVector, c: f64) -> Result<f64> {
    MseEvaluator::new(mb, c)?.msgospa(e_hat)
}

/// Mean-square UOSPA error of the estimate `e_hat`.
pub fn msuospa(mb: &MultiBernoulli, e_hat: &DetectionVector, c: f64) -> Result<f64> {
    MseEvaluator::new(mb, c)?.msuospa(e_hat)
}

/// Mean-square OSPA error of the estimate `e_hat`.
pub fn msospa(mb: &MultiBernoulli, e_hat: &DetectionVector, c: f64) -> Result<f64> {
    MseEvaluator::new(mb, c)?.msospa(e_hat)
}

/// Mean-square GOSPA error for a general `alpha` in `(0, 2]`.
pub fn msgospa_general_alpha(mb: &MultiBernoulli, e_hat: &DetectionVector, c: f64, alpha: f64) -> Result<f64> {
    MseEvaluator::new(mb, c)?.msgospa_alpha(e_hat, alpha)
}

/// Squared metric between the realisation `e` and the estimate `e_hat` when
/// all components are separated by more than `c`.
///
/// Every correctly reported component costs nothing and every other
/// discrepancy is saturated at `c`, so only counts matter.
pub fn square_error_given_event(
    kind: MetricKind,
    e: &ExistenceEvent,
    e_hat: &DetectionVector,
    c: f64,
    alpha: f64,
) -> Result<f64> {
    check_cutoff(c)?;
    if e.len() != e_hat.len() {
        return Err(Error::LengthMismatch {
            expected: e.len(),
            found: e_hat.len(),
        });
    }
    let n = e.count();
    let n_hat = e_hat.count();
    let hits = e
        .as_slice()
        .iter()
        .zip(e_hat.as_slice())
        .filter(|(&a, &b)| a && b)
        .count();
    let c2 = c * c;
    let value = match kind {
        MetricKind::Gospa => 0.5 * c2 * (n + n_hat - 2 * hits) as f64,
        MetricKind::Uospa => c2 * (n.max(n_hat) - hits) as f64,
        MetricKind::Ospa => {
            if n == 0 && n_hat == 0 {
                0.0
            } else {
                c2 * (1.0 - hits as f64 / n.max(n_hat) as f64)
            }
        }
        MetricKind::GospaAlpha => {
            check_alpha(alpha)?;
            c2 / alpha * n.abs_diff(n_hat) as f64 + c2 * (n.min(n_hat) - hits) as f64
        }
    };
    Ok(value)
}

/// Mean-square UOSPA error when all `n_components` share existence
/// probability `r` and `n_hat` of them are reported.
pub fn msuospa_identical_r(n_components: usize, r: f64, n_hat: usize, c: f64) -> Result<f64> {
    check_identical(n_components, r, n_hat, c)?;
    let rho = CardinalityPmf::from_probabilities(std::iter::repeat_n(r, n_components));
    let expected_max = compensated_sum(rho.as_slice().iter().enumerate().map(|(n, &p)| p * n.max(n_hat) as f64));
    Ok(c * c * (expected_max - n_hat as f64 * r))
}

/// Mean-square OSPA error when all `n_components` share existence
/// probability `r` and `n_hat` of them are reported.
pub fn msospa_identical_r(n_components: usize, r: f64, n_hat: usize, c: f64) -> Result<f64> {
    check_identical(n_components, r, n_hat, c)?;
    if n_hat == 0 {
        let rho = CardinalityPmf::from_probabilities(std::iter::repeat_n(r, n_components));
        return Ok(c * c * (1.0 - rho.get(0)));
    }
    let loo = CardinalityPmf::from_probabilities(std::iter::repeat_n(r, n_components - 1));
    let weight = compensated_sum(
        loo.as_slice()
            .iter()
            .enumerate()
            .map(|(n, &p)| p / (n + 1).max(n_hat) as f64),
    );
    Ok(c * c * (1.0 - n_hat as f64 * r * weight))
}

fn check_identical(n_components: usize, r: f64, n_hat: usize, c: f64) -> Result<()> {
    check_cutoff(c)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidParameter {
            name: "r",
            value: r,
            reason: "existence probability must lie in [0, 1]",
        });
    }
    if n_hat > n_components {
        return Err(Error::IndexOutOfRange {
            index: n_hat,
            len: n_components + 1,
        });
    }
    Ok(())
}

pub(crate) fn check_cutoff(c: f64) -> Result<()> {
    if c.is_finite() && c > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "c",
            value: c,
            reason: "must be finite and positive",
        })
    }
}

pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha <= 2.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 2]",
        })
    }
}

//! Set metrics (OSPA, UOSPA, GOSPA) and optimal mean-square estimation for
//! multi-Bernoulli posteriors with well-separated, Dirac-located components.
//!
//! The crate is organised bottom-up:
//!
//! - [`assignment`]: exact rectangular and partial assignment solvers.
//! - [`set_metrics`]: the three set distances and the GOSPA decomposition.
//! - [`multi_bernoulli`]: the posterior, its event space and cardinality pmf.
//! - [`mse`]: closed-form mean-square errors of subset estimates.
//! - [`estimators`]: optimal and comparison estimators.
//! - [`oracle`]: exhaustive and Monte-Carlo mean-square errors computed from
//!   the set metrics directly.
//! - [`sweeps`] and [`validation`]: decision-region rasters, cardinality
//!   tables and the self-check report used by the command-line tool.

pub mod assignment;
pub mod error;
pub mod estimators;
pub mod indicator;
pub mod mse;
pub mod multi_bernoulli;
pub mod numeric;
pub mod oracle;
pub mod set_metrics;
pub mod sweeps;
pub mod validation;

pub use error::{Error, Result};
pub use estimators::{EstimateOutcome, EstimatorKind, IdenticalROutcome};
pub use indicator::{DetectionVector, ExistenceEvent};
pub use mse::{MetricKind, MseEvaluator, MseReport};
pub use multi_bernoulli::{BernoulliComponent, CardinalityPmf, MultiBernoulli, SeparationReport};
pub use oracle::{MseEstimate, ProbeCase, ProbeReport};
pub use set_metrics::{BaseDistance, GospaDecomposition, LabeledPoint, MetricConfig, TargetSet};
pub use sweeps::{CardinalityRow, CardinalityTable, RegionGrid, SpookyWitness};
pub use validation::{ValidationConfig, ValidationReport};

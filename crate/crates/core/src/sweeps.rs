//! Parameter sweeps: decision regions over two existence probabilities and
//! optimal reported counts for identical components.
//!
//! CSV output uses a one-line header, LF line endings and the shortest
//! round-trip formatting of each number, so it is byte-stable.

use std::fmt::Write as _;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimators::{
    optimal_gospa2_identical_r, optimal_ospa_identical_r, optimal_uospa_identical_r, run_estimator, EstimatorKind,
};
use crate::mse::check_cutoff;
use crate::multi_bernoulli::{BernoulliComponent, MultiBernoulli};
use crate::set_metrics::{BaseDistance, LabeledPoint};

pub const DEFAULT_GRID_STEP: f64 = 0.01;
pub const CARDINALITY_MAX_COMPONENTS: usize = 30;

/// `(0)` and `(10)` on the real line.
pub fn default_locations() -> [LabeledPoint; 2] {
    [
        LabeledPoint::scalar(0.0).expect("finite"),
        LabeledPoint::scalar(10.0).expect("finite"),
    ]
}

/// Decision codes of one estimator over a square raster of `(r₁, r₂)`.
///
/// Code `ê₁ + 2ê₂`: 0 none, 1 only the first, 2 only the second, 3 both.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionGrid {
    pub estimator: EstimatorKind,
    pub grid_step: f64,
    /// Probabilities along each axis, ascending from 0.
    pub axis: Vec<f64>,
    /// `cells[i * axis.len() + j]` holds the code at `(axis[i], axis[j])`.
    pub cells: Vec<u8>,
}

/// Two cells in one `r₁` row whose first-component decisions differ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpookyWitness {
    pub r1: f64,
    pub r2_before: f64,
    pub r2_after: f64,
    pub code_before: u8,
    pub code_after: u8,
}

impl RegionGrid {
    pub fn side(&self) -> usize {
        self.axis.len()
    }

    pub fn code(&self, i1: usize, i2: usize) -> u8 {
        self.cells[i1 * self.side() + i2]
    }

    /// Cells whose code differs from reporting exactly the components with `r > 0.5`.
    pub fn product_rule_mismatches(&self) -> usize {
        let mut count = 0;
        for (i1, &r1) in self.axis.iter().enumerate() {
            for (i2, &r2) in self.axis.iter().enumerate() {
                let expected = u8::from(r1 > 0.5) + 2 * u8::from(r2 > 0.5);
                if self.code(i1, i2) != expected {
                    count += 1;
                }
            }
        }
        count
    }

    /// First pair of neighbouring cells, scanning `r₁` then `r₂`, where only
    /// `r₂` changes and the decision on the first component flips.
    pub fn spooky_witness(&self) -> Option<SpookyWitness> {
        for (i1, &r1) in self.axis.iter().enumerate() {
            for i2 in 1..self.side() {
                let (a, b) = (self.code(i1, i2 - 1), self.code(i1, i2));
                if a & 1 != b & 1 {
                    return Some(SpookyWitness {
                        r1,
                        r2_before: self.axis[i2 - 1],
                        r2_after: self.axis[i2],
                        code_before: a,
                        code_after: b,
                    });
                }
            }
        }
        None
    }
}

/// Grid values `0, step, 2·step, …`. When `1/step` is an integer `K` the
/// values are computed as `k/K` so that `0.5` and `1` land exactly.
pub fn grid_axis(step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step <= 0.5) {
        return Err(Error::InvalidParameter {
            name: "grid_step",
            value: step,
            reason: "must lie in (0, 0.5]",
        });
    }
    let inverse = 1.0 / step;
    let k_max = (inverse + 1e-9).floor() as usize;
    let integral = (inverse - inverse.round()).abs() < 1e-9;
    Ok((0..=k_max)
        .map(|k| {
            if integral {
                k as f64 / k_max as f64
            } else {
                k as f64 * step
            }
        })
        .collect())
}

/// Runs `kind` at every raster point for two components at `locations`.
/// `alpha` is read only by [`EstimatorKind::OptGospaAlpha`].
pub fn region_grid(
    kind: EstimatorKind,
    step: f64,
    c: f64,
    alpha: f64,
    locations: &[LabeledPoint; 2],
) -> Result<RegionGrid> {
    check_cutoff(c)?;
    let distance = BaseDistance::Euclidean.distance(locations[0].coords(), locations[1].coords());
    if locations[0].dim() != locations[1].dim() {
        return Err(Error::DimensionMismatch {
            expected: locations[0].dim(),
            found: locations[1].dim(),
        });
    }
    if distance <= c {
        return Err(Error::SeparationViolated {
            first: 0,
            second: 1,
            distance,
            c,
        });
    }
    let axis = grid_axis(step)?;
    let mut cells = Vec::with_capacity(axis.len() * axis.len());
    for &r1 in &axis {
        for &r2 in &axis {
            let mb = MultiBernoulli::new(vec![
                BernoulliComponent::new(r1, locations[0].clone())?,
                BernoulliComponent::new(r2, locations[1].clone())?,
            ])?;
            let e_hat = run_estimator(kind, &mb, c, alpha)?.e_hat;
            cells.push(u8::from(e_hat.get(0)) + 2 * u8::from(e_hat.get(1)));
        }
    }
    Ok(RegionGrid {
        estimator: kind,
        grid_step: step,
        axis,
        cells,
    })
}

/// `estimator,r1,r2,code`, grids in the given order, rows by `r₁` then `r₂`.
pub fn regions_csv(grids: &[RegionGrid]) -> String {
    let mut out = String::from("estimator,r1,r2,code\n");
    for grid in grids {
        for (i1, r1) in grid.axis.iter().enumerate() {
            for (i2, r2) in grid.axis.iter().enumerate() {
                writeln!(out, "{},{},{},{}", grid.estimator, r1, r2, grid.code(i1, i2)).unwrap();
            }
        }
    }
    out
}

/// Self-contained gnuplot script drawing one panel per grid.
pub fn regions_gnuplot(grids: &[RegionGrid]) -> String {
    let mut out = String::new();
    for (k, grid) in grids.iter().enumerate() {
        writeln!(out, "$grid{k} << EOD").unwrap();
        for (i1, r1) in grid.axis.iter().enumerate() {
            for (i2, r2) in grid.axis.iter().enumerate() {
                writeln!(out, "{} {} {}", r1, r2, grid.code(i1, i2)).unwrap();
            }
            out.push('\n');
        }
        out.push_str("EOD\n");
    }
    out.push_str("set xlabel 'r1'\nset ylabel 'r2'\nset xrange [0:1]\nset yrange [0:1]\nset size ratio -1\n");
    out.push_str("set cbrange [0:3]\nset cbtics ('none' 0, 'only 1' 1, 'only 2' 2, 'both' 3)\n");
    out.push_str("set palette maxcolors 4 defined (0 'white', 1 '#4477aa', 2 '#ee6677', 3 '#228833')\n");
    writeln!(out, "set multiplot layout 1,{}", grids.len().max(1)).unwrap();
    for (k, grid) in grids.iter().enumerate() {
        writeln!(out, "set title '{}'", grid.estimator).unwrap();
        writeln!(out, "plot $grid{k} using 1:2:3 with image notitle").unwrap();
    }
    out.push_str("unset multiplot\n");
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CardinalityRow {
    pub n: usize,
    pub gospa: usize,
    pub uospa: usize,
    pub ospa: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CardinalityTable {
    pub r: f64,
    pub c: f64,
    pub rows: Vec<CardinalityRow>,
}

/// Optimal reported counts for `N = 1..=n_max` components sharing `r`.
pub fn cardinality_table(r: f64, n_max: usize, c: f64) -> Result<CardinalityTable> {
    if n_max == 0 || n_max > CARDINALITY_MAX_COMPONENTS {
        return Err(Error::SizeCap {
            size: n_max,
            cap: CARDINALITY_MAX_COMPONENTS,
            hint: "n_max must lie in 1..=30",
        });
    }
    let rows = (1..=n_max)
        .map(|n| {
            Ok(CardinalityRow {
                n,
                gospa: optimal_gospa2_identical_r(n, r, c)?.n_hat,
                uospa: optimal_uospa_identical_r(n, r, c)?.n_hat,
                ospa: optimal_ospa_identical_r(n, r, c)?.n_hat,
            })
        })
        .collect::<Result<_>>()?;
    Ok(CardinalityTable { r, c, rows })
}

impl CardinalityTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("N,gospa,uospa,ospa\n");
        for row in &self.rows {
            writeln!(out, "{},{},{},{}", row.n, row.gospa, row.uospa, row.ospa).unwrap();
        }
        out
    }

    pub fn to_gnuplot(&self) -> String {
        let mut out = String::from("$table << EOD\n");
        for row in &self.rows {
            writeln!(out, "{} {} {} {}", row.n, row.gospa, row.uospa, row.ospa).unwrap();
        }
        out.push_str("EOD\n");
        writeln!(out, "set title 'r = {}'", self.r).unwrap();
        out.push_str("set xlabel 'N'\nset ylabel 'reported targets'\nset key left top\n");
        out.push_str(
            "plot $table using 1:2 with linespoints title 'GOSPA', \\\n     \
             $table using 1:3 with linespoints title 'UOSPA', \\\n     \
             $table using 1:4 with linespoints title 'OSPA'\n",
        );
        out
    }
}

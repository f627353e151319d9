//! Exhaustive grid search over `(a, alpha, c_inf)`, used as a brute-force
//! reference for the continuous fit.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{DataLawParams, ObservationPoint};

pub const MAX_GRID_CELLS: u64 = 100_000_000;

/// `steps` evenly spaced values from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridAxis {
    pub min: f64,
    pub max: f64,
    pub steps: usize,
}

impl GridAxis {
    pub fn new(min: f64, max: f64, steps: usize) -> Self {
        GridAxis { min, max, steps }
    }

    pub fn value(&self, i: usize) -> f64 {
        if i + 1 == self.steps {
            return self.max;
        }
        self.min + (self.max - self.min) * (i as f64 / (self.steps - 1) as f64)
    }

    fn check(&self, name: &str, lower: f64, strict: bool) -> Result<()> {
        if self.steps < 2 {
            return Err(Error::Validation(format!("grid axis {name} needs >= 2 steps")));
        }
        let min_ok = if strict {
            self.min > lower
        } else {
            self.min >= lower
        };
        if !min_ok || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(Error::Validation(format!(
                "grid axis {name} [{}, {}] is outside the parameter domain",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DataLawGrid {
    pub a: GridAxis,
    pub alpha: GridAxis,
    pub c_inf: GridAxis,
}

impl DataLawGrid {
    pub fn cells(&self) -> u128 {
        self.a.steps as u128 * self.alpha.steps as u128 * self.c_inf.steps as u128
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridFit {
    pub params: DataLawParams,
    pub sse: f64,
    /// Lexicographic cell index `(i_a * steps_alpha + i_alpha) * steps_c + i_c`.
    pub index: u64,
}

/// Evaluates the SSE on every grid cell and returns the smallest one.
///
/// Ties resolve to the lowest lexicographic index, independent of how the
/// work is split across threads.
pub fn grid_oracle_fit(points: &[ObservationPoint], grid: &DataLawGrid) -> Result<GridFit> {
    if points.is_empty() {
        return Err(Error::EmptyObservations);
    }
    grid.a.check("a", 0.0, true)?;
    grid.alpha.check("alpha", 0.0, true)?;
    grid.c_inf.check("c_inf", 0.0, false)?;
    let cells = grid.cells();
    if cells > MAX_GRID_CELLS as u128 {
        return Err(Error::GridTooLarge {
            cells,
            limit: MAX_GRID_CELLS,
        });
    }

    let ln_n: Vec<f64> = points.iter().map(|p| p.n.ln()).collect();
    let observed: Vec<f64> = points.iter().map(|p| p.error).collect();
    let c_values: Vec<f64> = (0..grid.c_inf.steps).map(|i| grid.c_inf.value(i)).collect();
    let steps_alpha = grid.alpha.steps;
    let steps_c = grid.c_inf.steps;

    let (sse, index) = (0..grid.a.steps)
        .into_par_iter()
        .map(|ia| {
            let a = grid.a.value(ia);
            let mut power = vec![0.0; ln_n.len()];
            let mut best = (f64::INFINITY, u64::MAX);
            for ialpha in 0..steps_alpha {
                let alpha = grid.alpha.value(ialpha);
                for (t, &l) in power.iter_mut().zip(&ln_n) {
                    *t = a * (-alpha * l).exp();
                }
                for (ic, &c) in c_values.iter().enumerate() {
                    let s: f64 = power
                        .iter()
                        .zip(&observed)
                        .map(|(t, e)| {
                            let r = t + c - e;
                            r * r
                        })
                        .sum();
                    if s < best.0 {
                        let index = ((ia * steps_alpha + ialpha) * steps_c + ic) as u64;
                        best = (s, index);
                    }
                }
            }
            best
        })
        .reduce(
            || (f64::INFINITY, u64::MAX),
            |x, y| {
                if y.0 < x.0 || (y.0 == x.0 && y.1 < x.1) {
                    y
                } else {
                    x
                }
            },
        );

    if index == u64::MAX {
        return Err(Error::NumericalFailure {
            iteration: 0,
            reason: "no grid cell produced a finite SSE".into(),
            params: vec![],
            sse,
        });
    }
    let ic = (index % steps_c as u64) as usize;
    let ialpha = ((index / steps_c as u64) % steps_alpha as u64) as usize;
    let ia = (index / (steps_c * steps_alpha) as u64) as usize;
    let params = DataLawParams::new(grid.a.value(ia), grid.alpha.value(ialpha), c_values[ic])?;
    Ok(GridFit { params, sse, index })
}

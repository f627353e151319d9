//! Constrained least-squares fitting of the scaling laws.
//!
//! Both fits minimise the plain sum of squared residuals subject to
//! `a, alpha (, b, beta) > 0` and `c_inf >= 0`, using projected
//! Levenberg-Marquardt with analytic Jacobians. Fitting stops as soon as the
//! mean squared residual drops to `mse_stop`, the relative parameter step
//! drops to `step_stop`, or `max_iterations` is reached.

mod grid;
mod lm;

use nalgebra::DMatrix;
use rayon::prelude::*;

pub use grid::{grid_oracle_fit, DataLawGrid, GridAxis, GridFit, MAX_GRID_CELLS};

use crate::error::{Error, Result};
use crate::model;
use crate::rng::Stream;
use crate::types::{DataLawParams, FitResult, JointLawParams, ObservationPoint, ObservationSet};
use lm::{Residuals, Tolerances};

/// Smallest value a strictly positive parameter is projected onto.
pub const POSITIVE_FLOOR: f64 = 1e-12;

/// How residuals are weighted inside the objective.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Weighting {
    #[default]
    Unweighted,
    /// Residual `i` scaled by `1 / std_i`; every point must carry a positive std.
    InverseVariance,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitOptions {
    pub init: DataLawParams,
    /// Initial point of the joint fit; derived from `init` when absent.
    pub joint_init: Option<JointLawParams>,
    pub fix_c_inf_to_zero: bool,
    pub mse_stop: f64,
    pub step_stop: f64,
    pub max_iterations: usize,
    /// Number of extra seeded starts on top of `init`.
    pub multi_start: usize,
    pub seed: u64,
    pub weighting: Weighting,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            init: DataLawParams::new_unchecked(0.5, 0.001, 0.01),
            joint_init: None,
            fix_c_inf_to_zero: false,
            mse_stop: 1e-6,
            step_stop: 1e-12,
            max_iterations: 10_000,
            multi_start: 0,
            seed: 0,
            weighting: Weighting::Unweighted,
        }
    }
}

impl FitOptions {
    fn validate(&self) -> Result<()> {
        if !(self.mse_stop > 0.0) || !(self.step_stop > 0.0) {
            return Err(Error::Validation("fit tolerances must be > 0".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::Validation("max_iterations must be >= 1".into()));
        }
        Ok(())
    }

    fn tolerances(&self) -> Tolerances {
        Tolerances {
            mse_stop: self.mse_stop,
            step_stop: self.step_stop,
            max_iterations: self.max_iterations,
        }
    }

    fn joint_start(&self) -> JointLawParams {
        self.joint_init.unwrap_or_else(|| {
            let p = &self.init;
            JointLawParams::new_unchecked(p.a(), p.alpha(), p.a(), p.alpha(), p.c_inf())
        })
    }
}

/// A law that predicts the error of an observation.
pub trait ScalingLaw {
    fn predict(&self, point: &ObservationPoint) -> Result<f64>;
}

impl ScalingLaw for DataLawParams {
    fn predict(&self, point: &ObservationPoint) -> Result<f64> {
        model::eval_data_law(self, point.n)
    }
}

impl ScalingLaw for JointLawParams {
    fn predict(&self, point: &ObservationPoint) -> Result<f64> {
        let m = point
            .m
            .ok_or_else(|| Error::Validation(format!("point n={} has no model size", point.n)))?;
        model::eval_joint_law(self, m, point.n)
    }
}

/// Sum of squared differences between the law and the observed errors.
pub fn sse<L: ScalingLaw>(law: &L, points: &[ObservationPoint]) -> Result<f64> {
    points.iter().try_fold(0.0, |acc, p| {
        let r = law.predict(p)? - p.error;
        Ok(acc + r * r)
    })
}

fn weights(points: &ObservationSet, weighting: Weighting) -> Result<Vec<f64>> {
    match weighting {
        Weighting::Unweighted => Ok(vec![1.0; points.len()]),
        Weighting::InverseVariance => points
            .iter()
            .map(|p| match p.std {
                Some(s) if s > 0.0 => Ok(1.0 / s),
                _ => Err(Error::Validation(format!(
                    "inverse-variance weighting needs a positive std at n={}",
                    p.n
                ))),
            })
            .collect(),
    }
}

struct DataLawProblem {
    ln_n: Vec<f64>,
    observed: Vec<f64>,
    weights: Vec<f64>,
    fixed_zero_floor: bool,
    lower: Vec<f64>,
}

impl DataLawProblem {
    fn new(points: &ObservationSet, weights: Vec<f64>, fixed_zero_floor: bool) -> Self {
        let lower = if fixed_zero_floor {
            vec![POSITIVE_FLOOR, POSITIVE_FLOOR]
        } else {
            vec![POSITIVE_FLOOR, POSITIVE_FLOOR, 0.0]
        };
        DataLawProblem {
            ln_n: points.iter().map(|p| p.n.ln()).collect(),
            observed: points.iter().map(|p| p.error).collect(),
            weights,
            fixed_zero_floor,
            lower,
        }
    }

    fn c_inf(&self, x: &[f64]) -> f64 {
        if self.fixed_zero_floor {
            0.0
        } else {
            x[2]
        }
    }

    fn params(&self, x: &[f64]) -> DataLawParams {
        DataLawParams::new_unchecked(x[0], x[1], self.c_inf(x))
    }
}

impl Residuals for DataLawProblem {
    fn num_params(&self) -> usize {
        self.lower.len()
    }

    fn num_residuals(&self) -> usize {
        self.ln_n.len()
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        let c = self.c_inf(x);
        for (i, o) in out.iter_mut().enumerate() {
            let fitted = x[0] * (-x[1] * self.ln_n[i]).exp() + c;
            *o = self.weights[i] * (fitted - self.observed[i]);
        }
    }

    fn jacobian(&self, x: &[f64], out: &mut DMatrix<f64>) {
        for (i, &ln_n) in self.ln_n.iter().enumerate() {
            let w = self.weights[i];
            let t = (-x[1] * ln_n).exp();
            out[(i, 0)] = w * t;
            out[(i, 1)] = -w * x[0] * ln_n * t;
            if !self.fixed_zero_floor {
                out[(i, 2)] = w;
            }
        }
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }
}

struct JointLawProblem {
    ln_n: Vec<f64>,
    ln_m: Vec<f64>,
    observed: Vec<f64>,
    weights: Vec<f64>,
    lower: [f64; 5],
}

impl Residuals for JointLawProblem {
    fn num_params(&self) -> usize {
        5
    }

    fn num_residuals(&self) -> usize {
        self.ln_n.len()
    }

    fn residuals(&self, x: &[f64], out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let fitted = x[0] * (-x[1] * self.ln_n[i]).exp() + x[2] * (-x[3] * self.ln_m[i]).exp() + x[4];
            *o = self.weights[i] * (fitted - self.observed[i]);
        }
    }

    fn jacobian(&self, x: &[f64], out: &mut DMatrix<f64>) {
        for i in 0..self.ln_n.len() {
            let w = self.weights[i];
            let tn = (-x[1] * self.ln_n[i]).exp();
            let tm = (-x[3] * self.ln_m[i]).exp();
            out[(i, 0)] = w * tn;
            out[(i, 1)] = -w * x[0] * self.ln_n[i] * tn;
            out[(i, 2)] = w * tm;
            out[(i, 3)] = -w * x[2] * self.ln_m[i] * tm;
            out[(i, 4)] = w;
        }
    }

    fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }
}

fn finish<L: ScalingLaw>(
    params: L,
    points: &ObservationSet,
    iterations: usize,
    stop: crate::types::StopReason,
    start_index: usize,
) -> Result<FitResult<L>> {
    let residuals = points
        .iter()
        .map(|p| Ok(params.predict(p)? - p.error))
        .collect::<Result<Vec<f64>>>()?;
    let sse = residuals.iter().map(|r| r * r).sum::<f64>();
    Ok(FitResult {
        params,
        sse,
        mse: sse / points.len() as f64,
        iterations,
        converged: stop.is_converged(),
        stop,
        residuals,
        start_index,
    })
}

/// Runs every start, keeping the lowest SSE; ties go to the lowest index.
fn best_of<L, F>(starts: usize, run: F) -> Result<FitResult<L>>
where
    L: Send,
    F: Fn(usize) -> Result<FitResult<L>> + Sync,
{
    let outcomes: Vec<Result<FitResult<L>>> = (0..starts).into_par_iter().map(&run).collect();
    let mut best: Option<FitResult<L>> = None;
    let mut first_error = None;
    for outcome in outcomes {
        match outcome {
            Ok(fit) => {
                if best.as_ref().map_or(true, |b| fit.sse < b.sse) {
                    best = Some(fit);
                }
            }
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_error.expect("at least one start"))
}

/// Fits `a * n^-alpha + c_inf` to the observed errors.
pub fn fit_data_law(points: &ObservationSet, opts: &FitOptions) -> Result<FitResult<DataLawParams>> {
    opts.validate()?;
    let needed = if opts.fix_c_inf_to_zero { 3 } else { 4 };
    if points.len() < needed {
        return Err(Error::Underdetermined {
            needed,
            got: points.len(),
        });
    }
    let problem = DataLawProblem::new(points, weights(points, opts.weighting)?, opts.fix_c_inf_to_zero);
    let c_ceiling = points.min_error();

    best_of(opts.multi_start + 1, |index| {
        let start = if index == 0 {
            opts.init.to_array()
        } else {
            let mut s = Stream::new(opts.seed, index as u64);
            [
                s.log_uniform(1e-2, 1.0),
                s.log_uniform(1e-3, 1.0),
                s.uniform() * c_ceiling,
            ]
        };
        let start = &start[..problem.num_params()];
        let sol = lm::minimize(&problem, start, opts.tolerances())?;
        finish(problem.params(&sol.x), points, sol.iterations, sol.stop, index)
    })
}

/// Fits `a * n^-alpha + b * m^-beta + c_inf` on a model/data grid.
pub fn fit_joint_law(points: &ObservationSet, opts: &FitOptions) -> Result<FitResult<JointLawParams>> {
    opts.validate()?;
    if points.len() < 6 {
        return Err(Error::Underdetermined {
            needed: 6,
            got: points.len(),
        });
    }
    let mut ln_m = Vec::with_capacity(points.len());
    for p in points {
        let m = p
            .m
            .ok_or_else(|| Error::DegenerateJointDesign(format!("point n={} carries no model size", p.n)))?;
        ln_m.push(m.ln());
    }
    let distinct = |mut v: Vec<f64>| {
        v.sort_by(f64::total_cmp);
        v.dedup();
        v.len()
    };
    if distinct(points.iter().filter_map(|p| p.m).collect()) < 2 {
        return Err(Error::DegenerateJointDesign(
            "all points share one model size".into(),
        ));
    }
    if distinct(points.iter().map(|p| p.n).collect()) < 2 {
        return Err(Error::DegenerateJointDesign(
            "all points share one dataset size".into(),
        ));
    }

    let mut lower = [POSITIVE_FLOOR; 5];
    lower[4] = 0.0;
    let problem = JointLawProblem {
        ln_n: points.iter().map(|p| p.n.ln()).collect(),
        ln_m,
        observed: points.iter().map(|p| p.error).collect(),
        weights: weights(points, opts.weighting)?,
        lower,
    };
    let c_ceiling = points.min_error();

    best_of(opts.multi_start + 1, |index| {
        let start = if index == 0 {
            opts.joint_start().to_array()
        } else {
            let mut s = Stream::new(opts.seed, index as u64);
            [
                s.log_uniform(1e-2, 1.0),
                s.log_uniform(1e-3, 1.0),
                s.log_uniform(1e-2, 1.0),
                s.log_uniform(1e-3, 1.0),
                s.uniform() * c_ceiling,
            ]
        };
        let sol = lm::minimize(&problem, &start, opts.tolerances())?;
        let x = &sol.x;
        let params = JointLawParams::new_unchecked(x[0], x[1], x[2], x[3], x[4]);
        finish(params, points, sol.iterations, sol.stop, index)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::validate_points;

    fn table1() -> ObservationSet {
        validate_points(vec![
            ObservationPoint::new(20_000.0, 0.3767),
            ObservationPoint::new(100_000.0, 0.3522),
            ObservationPoint::new(200_000.0, 0.3401),
            ObservationPoint::new(1_000_000.0, 0.3169),
        ])
        .unwrap()
    }

    fn exact(p: &DataLawParams, sizes: &[f64]) -> ObservationSet {
        validate_points(
            sizes
                .iter()
                .map(|&n| ObservationPoint::new(n, model::eval_data_law(p, n).unwrap()))
                .collect(),
        )
        .unwrap()
    }

    fn tight() -> FitOptions {
        FitOptions {
            mse_stop: 1e-30,
            ..FitOptions::default()
        }
    }

    #[test]
    fn sse_of_published_coefficients() {
        let p = DataLawParams::new(0.492415, 0.086236, 0.168059).unwrap();
        let s = sse(&p, &table1()).unwrap();
        assert!((s - 4.4e-6).abs() <= 0.3e-6, "{s}");
    }

    #[test]
    fn sse_is_zero_on_own_values() {
        let p = DataLawParams::new(0.4, 0.09, 0.15).unwrap();
        let pts = exact(&p, &[1e4, 1e5]);
        assert!(sse(&p, &pts).unwrap() < 1e-20);
        assert_eq!(sse(&p, &pts[..1]).unwrap(), 0.0);
    }

    #[test]
    fn table1_default_fit() {
        let fit = fit_data_law(&table1(), &FitOptions::default()).unwrap();
        assert!(fit.converged);
        assert!(fit.sse <= 5e-6, "{}", fit.sse);
        let published = DataLawParams::new(0.492415, 0.086236, 0.168059).unwrap();
        for p in table1().iter() {
            let ours = model::eval_data_law(&fit.params, p.n).unwrap();
            let theirs = model::eval_data_law(&published, p.n).unwrap();
            assert!((ours - theirs).abs() <= 2e-3);
        }
        assert!((fit.sse - sse(&fit.params, &table1()).unwrap()).abs() <= 1e-15 * fit.sse);
    }

    #[test]
    fn table1_zero_floor_fit() {
        let opts = FitOptions {
            fix_c_inf_to_zero: true,
            ..FitOptions::default()
        };
        let fit = fit_data_law(&table1(), &opts).unwrap();
        assert_eq!(fit.params.c_inf(), 0.0);
        let at_2m = model::eval_data_law(&fit.params, 2e6).unwrap();
        let at_20m = model::eval_data_law(&fit.params, 2e7).unwrap();
        assert!((at_2m - 0.307).abs() <= 2e-3, "{at_2m}");
        assert!((at_20m - 0.278).abs() <= 2e-3, "{at_20m}");
    }

    #[test]
    fn noiseless_recovery() {
        let truth = DataLawParams::new(0.4, 0.09, 0.15).unwrap();
        let pts = exact(&truth, &[1e4, 3e4, 1e5, 3e5, 1e6, 3e6]);
        let fit = fit_data_law(&pts, &tight()).unwrap();
        for (got, want) in fit.params.to_array().iter().zip(truth.to_array()) {
            assert!((got - want).abs() / want <= 1e-4, "{:?}", fit.params);
        }
    }

    #[test]
    fn too_few_points() {
        let pts = validate_points(table1()[..3].to_vec()).unwrap();
        assert!(matches!(
            fit_data_law(&pts, &FitOptions::default()),
            Err(Error::Underdetermined { needed: 4, got: 3 })
        ));
        let opts = FitOptions {
            fix_c_inf_to_zero: true,
            ..FitOptions::default()
        };
        assert!(fit_data_law(&pts, &opts).is_ok());
    }

    #[test]
    fn rejects_bad_options() {
        let opts = FitOptions {
            mse_stop: 0.0,
            ..FitOptions::default()
        };
        assert!(fit_data_law(&table1(), &opts).is_err());
    }

    #[test]
    fn fit_is_deterministic() {
        let opts = FitOptions {
            multi_start: 8,
            seed: 3,
            ..FitOptions::default()
        };
        let a = fit_data_law(&table1(), &opts).unwrap();
        let b = fit_data_law(&table1(), &opts).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.sse.to_bits(), b.sse.to_bits());
    }

    #[test]
    fn more_starts_never_hurt() {
        let mut last = f64::INFINITY;
        for k in 0..6 {
            let opts = FitOptions {
                multi_start: k,
                seed: 11,
                ..tight()
            };
            let fit = fit_data_law(&table1(), &opts).unwrap();
            assert!(fit.sse <= last);
            last = fit.sse;
        }
    }

    #[test]
    fn inverse_variance_weighting_needs_std() {
        let opts = FitOptions {
            weighting: Weighting::InverseVariance,
            ..FitOptions::default()
        };
        assert!(fit_data_law(&table1(), &opts).is_err());
        let pts = validate_points(table1().iter().map(|p| p.with_std(0.01)).collect()).unwrap();
        let weighted = fit_data_law(&pts, &opts).unwrap();
        assert!((weighted.sse - sse(&weighted.params, &pts).unwrap()).abs() < 1e-18);
    }

    fn joint_grid(p: &JointLawParams, ms: &[f64], ns: &[f64]) -> ObservationSet {
        let mut pts = Vec::new();
        for &m in ms {
            for &n in ns {
                let e = model::eval_joint_law(p, m, n).unwrap();
                pts.push(ObservationPoint::new(n, e).with_model_size(m));
            }
        }
        validate_points(pts).unwrap()
    }

    #[test]
    fn joint_recovery() {
        let truth = JointLawParams::new(0.4, 0.09, 0.3, 0.2, 0.1).unwrap();
        let pts = joint_grid(&truth, &[1e4, 1e5, 1e6], &[1e4, 1e5, 1e6]);
        let fit = fit_joint_law(&pts, &tight()).unwrap();
        for (got, want) in fit.params.to_array().iter().zip(truth.to_array()) {
            assert!((got - want).abs() / want <= 1e-3, "{:?}", fit.params);
        }
    }

    #[test]
    fn joint_rejects_degenerate_designs() {
        let truth = JointLawParams::new(0.4, 0.09, 0.3, 0.2, 0.1).unwrap();
        let same_m = joint_grid(&truth, &[1e3], &[1e1, 1e2, 1e3, 1e4, 1e5, 1e6]);
        let err = fit_joint_law(&same_m, &FitOptions::default()).unwrap_err();
        assert!(err.to_string().contains("degenerate joint design"));
        let same_n = joint_grid(&truth, &[1e1, 1e2, 1e3, 1e4, 1e5, 1e6], &[1e3]);
        assert!(matches!(
            fit_joint_law(&same_n, &FitOptions::default()),
            Err(Error::DegenerateJointDesign(_))
        ));
        let few = joint_grid(&truth, &[1e1, 1e2], &[1e1, 1e2]);
        assert!(matches!(
            fit_joint_law(&few, &FitOptions::default()),
            Err(Error::Underdetermined { .. })
        ));
    }
}

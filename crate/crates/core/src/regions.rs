//! Small-data / power-law / irreducible-error labelling of learning-curve
//! points.
//!
//! A point is in the small-data region while its error is within
//! `tol_guess` of the random-guess error, and in the irreducible region once
//! the fitted power term `a * n^-alpha` has fallen to `tol_floor`. Both
//! thresholds are conventions, exposed as [`RegionTolerances`].

use std::fmt;

use crate::error::{Error, Result};
use crate::model::{data_power_term, invert_data_law};
use crate::types::{DataLawParams, EnvelopeParams, FitResult, ObservationPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionLabel {
    SmallData,
    PowerLaw,
    IrreducibleError,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegionLabel::SmallData => "small-data",
            RegionLabel::PowerLaw => "power-law",
            RegionLabel::IrreducibleError => "irreducible-error",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionTolerances {
    pub tol_guess: f64,
    pub tol_floor: f64,
}

impl Default for RegionTolerances {
    fn default() -> Self {
        RegionTolerances {
            tol_guess: 0.02,
            tol_floor: 0.005,
        }
    }
}

impl RegionTolerances {
    fn validate(&self) -> Result<()> {
        if !(self.tol_guess >= 0.0) || !(self.tol_floor > 0.0) {
            return Err(Error::Validation(format!(
                "region tolerances must satisfy tol_guess >= 0 and tol_floor > 0, got {self:?}"
            )));
        }
        Ok(())
    }
}

/// Labels each point, in the given order.
///
/// Labels never move backwards along increasing `n`: a point that would
/// classify into an earlier region than its predecessor inherits the
/// predecessor's label.
pub fn classify_points(
    points: &[ObservationPoint],
    fit: &FitResult<DataLawParams>,
    envelope: &EnvelopeParams,
    tol: RegionTolerances,
) -> Result<Vec<(ObservationPoint, RegionLabel)>> {
    if !fit.converged {
        return Err(Error::UnconvergedFit);
    }
    tol.validate()?;
    let guess_threshold = envelope.eps0() - tol.tol_guess;

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| points[i].n.total_cmp(&points[j].n));

    let mut labels = vec![RegionLabel::SmallData; points.len()];
    let mut floor = RegionLabel::SmallData;
    for i in order {
        let p = &points[i];
        let raw = if p.error >= guess_threshold {
            RegionLabel::SmallData
        } else if data_power_term(&fit.params, p.n)? <= tol.tol_floor {
            RegionLabel::IrreducibleError
        } else {
            RegionLabel::PowerLaw
        };
        floor = floor.max(raw);
        labels[i] = floor;
    }
    Ok(points.iter().copied().zip(labels).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionBoundaries {
    /// Dataset size at which the law leaves the small-data region.
    pub enter_power_law: f64,
    /// Dataset size at which the power term reaches `tol_floor`.
    pub enter_irreducible: f64,
}

pub fn region_boundaries(
    p: &DataLawParams,
    envelope: &EnvelopeParams,
    tol: RegionTolerances,
) -> Result<RegionBoundaries> {
    tol.validate()?;
    let threshold = envelope.eps0() - tol.tol_guess;
    if threshold <= p.c_inf() {
        return Err(Error::NeverExitsSmallData {
            threshold,
            c_inf: p.c_inf(),
        });
    }
    let enter_power_law = if p.a() + p.c_inf() < threshold {
        1.0
    } else {
        invert_data_law(p, threshold)?
    };
    let floor_size = if p.a() <= tol.tol_floor {
        1.0
    } else {
        ((p.a() / tol.tol_floor).ln() / p.alpha()).exp()
    };
    Ok(RegionBoundaries {
        enter_power_law,
        // an empty power-law region pushes the irreducible boundary out to
        // where the small-data test stops firing
        enter_irreducible: floor_size.max(enter_power_law),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::eval_data_law;
    use crate::types::StopReason;

    fn published() -> DataLawParams {
        DataLawParams::new(0.492415, 0.086236, 0.168059).unwrap()
    }

    fn as_fit(params: DataLawParams) -> FitResult<DataLawParams> {
        FitResult {
            params,
            sse: 0.0,
            mse: 0.0,
            iterations: 1,
            converged: true,
            stop: StopReason::MseBelowThreshold,
            residuals: vec![],
            start_index: 0,
        }
    }

    fn half() -> EnvelopeParams {
        EnvelopeParams::new(0.5, 1.0).unwrap()
    }

    #[test]
    fn table_points_are_all_power_law() {
        let pts = [
            ObservationPoint::new(20_000.0, 0.3767),
            ObservationPoint::new(100_000.0, 0.3522),
            ObservationPoint::new(200_000.0, 0.3401),
            ObservationPoint::new(1_000_000.0, 0.3169),
        ];
        let labels =
            classify_points(&pts, &as_fit(published()), &half(), RegionTolerances::default()).unwrap();
        assert!(labels.iter().all(|(_, l)| *l == RegionLabel::PowerLaw));
        assert!(data_power_term(&published(), 1e6).unwrap() > 0.149);
    }

    #[test]
    fn near_guess_point_is_small_data() {
        let pts = [ObservationPoint::new(50.0, 0.499)];
        let labels =
            classify_points(&pts, &as_fit(published()), &half(), RegionTolerances::default()).unwrap();
        assert_eq!(labels[0].1, RegionLabel::SmallData);
    }

    #[test]
    fn far_point_is_irreducible() {
        let p = published();
        let n = invert_data_law(&p, p.c_inf() + 0.004).unwrap();
        let pt = ObservationPoint::new(n.ceil(), eval_data_law(&p, n.ceil()).unwrap());
        let labels = classify_points(&[pt], &as_fit(p), &half(), RegionTolerances::default()).unwrap();
        assert_eq!(labels[0].1, RegionLabel::IrreducibleError);
    }

    #[test]
    fn unconverged_fit_is_rejected() {
        let mut fit = as_fit(published());
        fit.converged = false;
        let err = classify_points(&[], &fit, &half(), RegionTolerances::default()).unwrap_err();
        assert!(err.to_string().contains("cannot classify without fit"));
    }

    #[test]
    fn labels_never_regress() {
        let pts = [
            ObservationPoint::new(10.0, 0.49),
            ObservationPoint::new(1000.0, 0.40),
            ObservationPoint::new(2000.0, 0.495),
        ];
        let labels =
            classify_points(&pts, &as_fit(published()), &half(), RegionTolerances::default()).unwrap();
        let l: Vec<RegionLabel> = labels.iter().map(|x| x.1).collect();
        assert_eq!(
            l,
            [
                RegionLabel::SmallData,
                RegionLabel::PowerLaw,
                RegionLabel::PowerLaw
            ]
        );
    }

    #[test]
    fn published_boundaries() {
        let b = region_boundaries(&published(), &half(), RegionTolerances::default()).unwrap();
        let expected_pl = ((0.48f64 - 0.168059) / 0.492415).powf(-1.0 / 0.086236);
        assert!((b.enter_power_law - expected_pl).abs() / expected_pl < 1e-10);
        let expected_irr = (0.492415f64 / 0.005).powf(1.0 / 0.086236);
        assert!((b.enter_irreducible - expected_irr).abs() / expected_irr < 1e-10);
        // bisection cross-check of the irreducible boundary on ln n
        let (mut lo, mut hi) = (0.0f64, 200.0f64);
        for _ in 0..300 {
            let mid = 0.5 * (lo + hi);
            if data_power_term(&published(), mid.exp()).unwrap() > 0.005 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((lo.exp() - expected_irr).abs() / expected_irr < 1e-9);
    }

    #[test]
    fn boundary_clamps_to_unit_size() {
        let p = DataLawParams::new(0.3, 0.2, 0.0).unwrap();
        let b = region_boundaries(&p, &half(), RegionTolerances::default()).unwrap();
        assert_eq!(b.enter_power_law, 1.0);
    }

    #[test]
    fn floor_above_guess_threshold_is_an_error() {
        let p = DataLawParams::new(0.3, 0.2, 0.49).unwrap();
        let err = region_boundaries(&p, &half(), RegionTolerances::default()).unwrap_err();
        assert!(err.to_string().contains("never exits small-data region"));
    }

    #[test]
    fn labels_flip_across_boundaries() {
        let p = published();
        let tol = RegionTolerances::default();
        let b = region_boundaries(&p, &half(), tol).unwrap();
        let at = |n: f64| {
            let pt = ObservationPoint::new(n.round(), eval_data_law(&p, n.round()).unwrap());
            classify_points(&[pt], &as_fit(p), &half(), tol).unwrap()[0].1
        };
        assert_eq!(at(b.enter_power_law * 0.99), RegionLabel::SmallData);
        assert_eq!(at(b.enter_power_law * 1.01), RegionLabel::PowerLaw);
        assert_eq!(at(b.enter_irreducible * 0.99), RegionLabel::PowerLaw);
        assert_eq!(at(b.enter_irreducible * 1.01), RegionLabel::IrreducibleError);
    }
}

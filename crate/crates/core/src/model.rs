//! Closed-form evaluation of the data and joint scaling laws.
//!
//! Powers are taken as `exp(-alpha * ln n)`. Sizes are accepted as reals so
//! that inversion and plotting stay smooth.

use crate::error::{Error, Result};
use crate::types::{DataLawParams, EnvelopeParams, JointLawParams};

fn check_size(x: f64, name: &str) -> Result<f64> {
    if x >= 1.0 && x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Domain(format!(
            "{name} must be a finite size >= 1, got {x}"
        )))
    }
}

/// `n^-rate`, for `n >= 1`.
#[inline]
pub(crate) fn decay(n: f64, rate: f64) -> f64 {
    (-rate * n.ln()).exp()
}

pub fn eval_data_law(p: &DataLawParams, n: f64) -> Result<f64> {
    let n = check_size(n, "n")?;
    Ok(p.a() * decay(n, p.alpha()) + p.c_inf())
}

/// The reducible part `a * n^-alpha` of the data law.
pub fn data_power_term(p: &DataLawParams, n: f64) -> Result<f64> {
    let n = check_size(n, "n")?;
    Ok(p.a() * decay(n, p.alpha()))
}

pub fn eval_joint_law(p: &JointLawParams, m: f64, n: f64) -> Result<f64> {
    let m = check_size(m, "m")?;
    let n = check_size(n, "n")?;
    Ok(p.a() * decay(n, p.alpha()) + p.b() * decay(m, p.beta()) + p.c_inf())
}

/// Modulus of `eps0 * x / (x - i*eta)`, i.e. `eps0 * x / sqrt(x^2 + eta^2)`.
pub fn envelope(eps_tilde: f64, e: &EnvelopeParams) -> Result<f64> {
    if !(eps_tilde >= 0.0) {
        return Err(Error::Domain(format!(
            "envelope input must be >= 0, got {eps_tilde}"
        )));
    }
    if eps_tilde.is_infinite() {
        return Ok(e.eps0());
    }
    // every step is a monotone rounded operation, so the result is
    // non-decreasing in eps_tilde and never overflows
    let r = e.eta() / eps_tilde;
    Ok(e.eps0() / (1.0 + r * r).sqrt())
}

pub fn eval_enveloped_joint(p: &JointLawParams, e: &EnvelopeParams, m: f64, n: f64) -> Result<f64> {
    envelope(eval_joint_law(p, m, n)?, e)
}

/// Dataset size at which the law reaches `target_error`.
pub fn invert_data_law(p: &DataLawParams, target_error: f64) -> Result<f64> {
    if target_error.is_nan() {
        return Err(Error::Domain("target error is NaN".into()));
    }
    if target_error <= p.c_inf() {
        return Err(Error::BelowIrreducible {
            target: target_error,
            c_inf: p.c_inf(),
        });
    }
    let ceiling = p.a() + p.c_inf();
    if target_error > ceiling {
        return Err(Error::AboveUnitSize {
            target: target_error,
            ceiling,
        });
    }
    let ratio = (target_error - p.c_inf()) / p.a();
    // ratio in (0, 1], so the log is <= 0 and n >= 1
    Ok((-ratio.ln() / p.alpha()).exp().max(1.0))
}

/// Partial derivatives of the data law w.r.t. `(a, alpha, c_inf)`.
pub fn data_law_jacobian(p: &DataLawParams, n: f64) -> Result<[f64; 3]> {
    let n = check_size(n, "n")?;
    let t = decay(n, p.alpha());
    Ok([t, -p.a() * n.ln() * t, 1.0])
}

/// Partial derivatives of the joint law w.r.t. `(a, alpha, b, beta, c_inf)`.
pub fn joint_law_jacobian(p: &JointLawParams, m: f64, n: f64) -> Result<[f64; 5]> {
    let m = check_size(m, "m")?;
    let n = check_size(n, "n")?;
    let tn = decay(n, p.alpha());
    let tm = decay(m, p.beta());
    Ok([tn, -p.a() * n.ln() * tn, tm, -p.b() * m.ln() * tm, 1.0])
}

//! Deterministic synthetic learning curves.
//!
//! Point `k` of a generated set (in emission order) draws its noise from
//! stream `k` of [`crate::rng`], so the output depends only on the
//! arguments and can be regenerated in parallel or in another language.

use crate::error::{Error, Result};
use crate::model;
use crate::rng::Stream;
use crate::types::{DataLawParams, EnvelopeParams, JointLawParams, ObservationPoint};

fn check_sizes(sizes: &[f64], what: &str) -> Result<()> {
    if sizes.is_empty() {
        return Err(Error::Validation(format!("{what} list is empty")));
    }
    for &s in sizes {
        if !(s >= 1.0 && s.is_finite() && s.fract() == 0.0) {
            return Err(Error::Domain(format!("{what} must be integers >= 1, got {s}")));
        }
    }
    Ok(())
}

fn check_noise(noise_sd: f64) -> Result<()> {
    if noise_sd >= 0.0 && noise_sd.is_finite() {
        Ok(())
    } else {
        Err(Error::Validation(format!(
            "noise_sd must be >= 0, got {noise_sd}"
        )))
    }
}

fn noisy(value: f64, noise_sd: f64, seed: u64, index: u64) -> f64 {
    let noise = if noise_sd > 0.0 {
        noise_sd * Stream::new(seed, index).standard_normal()
    } else {
        0.0
    };
    (value + noise).clamp(0.0, 1.0)
}

/// Samples the data law at every size, `replicates` times each.
///
/// Points are emitted size-major: all replicates of `sizes[0]` first.
pub fn gen_curve(
    p: &DataLawParams,
    sizes: &[f64],
    noise_sd: f64,
    seed: u64,
    replicates: u32,
) -> Result<Vec<ObservationPoint>> {
    check_sizes(sizes, "sizes")?;
    check_noise(noise_sd)?;
    if replicates == 0 {
        return Err(Error::Validation("replicates must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(sizes.len() * replicates as usize);
    for (i, &n) in sizes.iter().enumerate() {
        let clean = model::eval_data_law(p, n)?;
        for r in 0..replicates as u64 {
            let index = i as u64 * replicates as u64 + r;
            out.push(ObservationPoint::new(n, noisy(clean, noise_sd, seed, index)));
        }
    }
    Ok(out)
}

/// Samples the joint law on the `m_sizes x n_sizes` grid, `m`-major, optionally
/// passing each value through the random-guess envelope before adding noise.
pub fn gen_joint_grid(
    p: &JointLawParams,
    envelope: Option<&EnvelopeParams>,
    m_sizes: &[f64],
    n_sizes: &[f64],
    noise_sd: f64,
    seed: u64,
) -> Result<Vec<ObservationPoint>> {
    check_sizes(m_sizes, "model sizes")?;
    check_sizes(n_sizes, "dataset sizes")?;
    check_noise(noise_sd)?;
    let mut out = Vec::with_capacity(m_sizes.len() * n_sizes.len());
    for &m in m_sizes {
        for &n in n_sizes {
            let raw = model::eval_joint_law(p, m, n)?;
            let clean = match envelope {
                Some(e) => model::envelope(raw, e)?,
                None => raw,
            };
            let index = out.len() as u64;
            out.push(ObservationPoint::new(n, noisy(clean, noise_sd, seed, index)).with_model_size(m));
        }
    }
    Ok(out)
}

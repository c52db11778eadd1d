//! Theoretical diagnostics: the non-uniform Berry-Esseen envelope for block
//! means, its integral form in the truncation parameter, and the
//! contamination error envelope.
//!
//! All bounds carry unspecified absolute constants in their source; outputs
//! here use the unit-constant convention and are meant for relative
//! comparisons and envelope fitting, never as absolute truths.

use crate::distributions::NamedDistribution;
use crate::error::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

/// Moment data of a scalar functional: standard deviation, the `(2+delta)`
/// absolute central moment, and the tail exponent `delta`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentProfile {
    pub sigma: f64,
    pub abs_central_moment: f64,
    pub delta_exponent: f64,
}

impl MomentProfile {
    pub fn new(sigma: f64, abs_central_moment: f64, delta_exponent: f64) -> Result<Self> {
        if !(sigma > 0.0) || !(abs_central_moment > 0.0) {
            return Err(Error::Parameter(
                "sigma and abs_central_moment must be positive".into(),
            ));
        }
        if !(delta_exponent > 0.0 && delta_exponent <= 1.0) {
            return Err(Error::Parameter(format!(
                "delta_exponent must lie in (0, 1], got {delta_exponent}"
            )));
        }
        let mp = MomentProfile {
            sigma,
            abs_central_moment,
            delta_exponent,
        };
        if mp.kappa() < 1.0 - 1e-12 {
            return Err(Error::Parameter(format!(
                "abs_central_moment {abs_central_moment} below sigma^(2+delta); kappa = {}",
                mp.kappa()
            )));
        }
        Ok(mp)
    }

    /// Normalized moment ratio `kappa >= 1`.
    pub fn kappa(&self) -> f64 {
        self.abs_central_moment / self.sigma.powf(2.0 + self.delta_exponent)
    }

    /// Profile of a named distribution (requires finite variance).
    pub fn of_distribution(
        dist: &NamedDistribution,
        delta_exponent: f64,
        mc_budget: usize,
        seed: u64,
    ) -> Result<Self> {
        let sigma = dist
            .true_sigma()
            .ok_or_else(|| Error::Parameter(format!("{dist:?} has infinite variance")))?;
        let moment = dist.abs_central_moment(delta_exponent, mc_budget, seed)?;
        MomentProfile::new(sigma, moment, delta_exponent)
    }
}

/// Envelope for the non-uniform CLT approximation error of a standardized
/// block mean at point `t`, block size `n` (unit-constant convention).
pub fn clt_error_envelope(mp: &MomentProfile, n: usize, t: f64) -> f64 {
    let p = 2.0 + mp.delta_exponent;
    mp.abs_central_moment / ((n as f64).powf(0.5 * mp.delta_exponent) * (mp.sigma + t.abs()).powf(p))
}

/// Integrated envelope entering the deviation bounds through the truncation
/// parameter (unit-constant convention).
pub fn clt_integral_envelope(mp: &MomentProfile, n: usize, delta: f64) -> f64 {
    let p = 2.0 + mp.delta_exponent;
    mp.abs_central_moment / (delta.powf(p) * (n as f64).powf(0.5 * mp.delta_exponent))
}

/// Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloValue {
    pub value: f64,
    pub std_error: f64,
    /// Set when the target family has infinite variance and standardization
    /// used a scale proxy.
    pub flagged: bool,
}

/// Monte Carlo estimate of the true CLT error
/// `|P( sum (X_j - mean) / (sigma sqrt(n)) <= t ) - Phi(t)|`.
pub fn clt_error_monte_carlo(
    dist: &NamedDistribution,
    n: usize,
    t: f64,
    mc_budget: usize,
    seed: u64,
) -> Result<MonteCarloValue> {
    if n < 1 || mc_budget < 1 {
        return Err(Error::Parameter("need n >= 1 and mc_budget >= 1".into()));
    }
    dist.validate()?;
    let (sigma, flagged) = match dist.true_sigma() {
        Some(s) => (s, false),
        // scale proxy keeps the study runnable; the result is flagged
        None => (1.0, true),
    };
    let mean = dist.true_mean();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    let mut buf = vec![0.0; n];
    let denom = sigma * (n as f64).sqrt();
    for _ in 0..mc_budget {
        dist.sample_into(&mut rng, &mut buf);
        let standardized = buf.iter().map(|x| x - mean).sum::<f64>() / denom;
        if standardized <= t {
            hits += 1;
        }
    }
    let p_hat = hits as f64 / mc_budget as f64;
    let phi = Normal::standard().cdf(t);
    let std_error = (p_hat * (1.0 - p_hat) / mc_budget as f64).sqrt();
    Ok(MonteCarloValue {
        value: (p_hat - phi).abs(),
        std_error,
        flagged,
    })
}

/// Shape of the contamination-aware multivariate error envelope
/// (unit-constant convention): used for fitting, never as a pass/fail
/// absolute threshold.
#[allow(clippy::too_many_arguments)]
pub fn contamination_envelope(
    sigma_max: f64,
    tr_sigma: f64,
    n_total: usize,
    eps: f64,
    delta_exp: f64,
    kappa: f64,
    s: f64,
) -> Result<f64> {
    let n_f = n_total as f64;
    if !(eps >= 1.0 / n_f && eps < 0.5) {
        return Err(Error::Parameter(format!(
            "eps must lie in [1/N, 1/2), got {eps}"
        )));
    }
    if !(s > 0.0) || !(sigma_max > 0.0) || !(tr_sigma > 0.0) {
        return Err(Error::Parameter(
            "s, sigma_max and tr_sigma must be positive".into(),
        ));
    }
    if !(delta_exp > 0.0 && delta_exp <= 1.0) {
        return Err(Error::Parameter("delta_exp must lie in (0, 1]".into()));
    }
    let p = 2.0 + delta_exp;
    let kappa_pow = kappa.powf(1.0 / p);
    Ok((tr_sigma / n_f).sqrt()
        + sigma_max.sqrt() * ((s / n_f).sqrt() + eps.powf((1.0 + delta_exp) / p) * kappa_pow)
        + kappa_pow * s / (eps.powf(1.0 / p) * n_f))
}

//! Synthetic heavy-tailed sample generators with analytic moments.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::{Distribution, LogNormal, Normal, Pareto, StandardNormal, StudentT};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

/// A named distribution family with seed-deterministic sampling and
/// analytic mean / scale where a closed form exists.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum NamedDistribution {
    Normal { mean: f64, std: f64 },
    StudentT { nu: f64, loc: f64, scale: f64 },
    Pareto { alpha: f64, loc: f64, scale: f64 },
    LogNormal { mu: f64, sigma: f64 },
    /// `a` with probability `p`, otherwise `b`.
    TwoPoint { p: f64, a: f64, b: f64 },
}

impl NamedDistribution {
    pub fn standard_normal() -> Self {
        NamedDistribution::Normal {
            mean: 0.0,
            std: 1.0,
        }
    }

    pub fn student_t(nu: f64) -> Self {
        NamedDistribution::StudentT {
            nu,
            loc: 0.0,
            scale: 1.0,
        }
    }

    pub fn family_name(&self) -> &'static str {
        match self {
            NamedDistribution::Normal { .. } => "normal",
            NamedDistribution::StudentT { .. } => "student_t",
            NamedDistribution::Pareto { .. } => "pareto",
            NamedDistribution::LogNormal { .. } => "lognormal",
            NamedDistribution::TwoPoint { .. } => "two_point",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            NamedDistribution::Normal { std, .. } => std > 0.0,
            NamedDistribution::StudentT { nu, scale, .. } => nu > 1.0 && scale > 0.0,
            NamedDistribution::Pareto { alpha, scale, .. } => alpha > 1.0 && scale > 0.0,
            NamedDistribution::LogNormal { sigma, .. } => sigma > 0.0,
            NamedDistribution::TwoPoint { p, .. } => (0.0..=1.0).contains(&p),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Parameter(format!("invalid distribution {self:?}")))
        }
    }

    /// Analytic mean.
    pub fn true_mean(&self) -> f64 {
        match *self {
            NamedDistribution::Normal { mean, .. } => mean,
            NamedDistribution::StudentT { loc, .. } => loc,
            NamedDistribution::Pareto { alpha, loc, scale } => loc + scale * alpha / (alpha - 1.0),
            NamedDistribution::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            NamedDistribution::TwoPoint { p, a, b } => p * a + (1.0 - p) * b,
        }
    }

    /// Analytic standard deviation; `None` when the variance is infinite.
    pub fn true_sigma(&self) -> Option<f64> {
        match *self {
            NamedDistribution::Normal { std, .. } => Some(std),
            NamedDistribution::StudentT { nu, scale, .. } => {
                (nu > 2.0).then(|| scale * (nu / (nu - 2.0)).sqrt())
            }
            NamedDistribution::Pareto { alpha, scale, .. } => (alpha > 2.0).then(|| {
                scale * (alpha / ((alpha - 1.0) * (alpha - 1.0) * (alpha - 2.0))).sqrt()
            }),
            NamedDistribution::LogNormal { mu, sigma } => {
                let s2 = sigma * sigma;
                Some(((s2.exp() - 1.0).sqrt()) * (mu + 0.5 * s2).exp())
            }
            NamedDistribution::TwoPoint { p, a, b } => Some((p * (1.0 - p)).sqrt() * (a - b).abs()),
        }
    }

    /// `E|X - EX|^{2+delta}`: closed form where available, otherwise Monte
    /// Carlo with the given budget.
    pub fn abs_central_moment(&self, delta: f64, mc_budget: usize, seed: u64) -> Result<f64> {
        let p = 2.0 + delta;
        match *self {
            NamedDistribution::Normal { std, .. } => {
                // E|Z|^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi)
                Ok(std.powf(p) * 2f64.powf(0.5 * p) * gamma(0.5 * (p + 1.0))
                    / std::f64::consts::PI.sqrt())
            }
            NamedDistribution::StudentT { nu, scale, .. } => {
                if p >= nu {
                    return Ok(f64::INFINITY);
                }
                Ok(scale.powf(p) * nu.powf(0.5 * p) * gamma(0.5 * (p + 1.0))
                    * gamma(0.5 * (nu - p))
                    / (std::f64::consts::PI.sqrt() * gamma(0.5 * nu)))
            }
            NamedDistribution::TwoPoint { p: prob, a, b } => {
                let m = self.true_mean();
                Ok(prob * (a - m).abs().powf(p) + (1.0 - prob) * (b - m).abs().powf(p))
            }
            NamedDistribution::Pareto { alpha, .. } => {
                if p >= alpha {
                    return Ok(f64::INFINITY);
                }
                self.mc_abs_central_moment(p, mc_budget, seed)
            }
            NamedDistribution::LogNormal { .. } => self.mc_abs_central_moment(p, mc_budget, seed),
        }
    }

    fn mc_abs_central_moment(&self, p: f64, budget: usize, seed: u64) -> Result<f64> {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let m = self.true_mean();
        let mut acc = 0.0;
        for _ in 0..budget.max(1) {
            acc += (self.sample(&mut rng) - m).abs().powf(p);
        }
        Ok(acc / budget.max(1) as f64)
    }

    /// One seed-deterministic draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            NamedDistribution::Normal { mean, std } => {
                let z: f64 = StandardNormal.sample(rng);
                mean + std * z
            }
            NamedDistribution::StudentT { nu, loc, scale } => {
                let t: f64 = StudentT::new(nu).expect("validated nu").sample(rng);
                loc + scale * t
            }
            NamedDistribution::Pareto { alpha, loc, scale } => {
                let x: f64 = Pareto::new(scale, alpha).expect("validated pareto").sample(rng);
                loc + x
            }
            NamedDistribution::LogNormal { mu, sigma } => {
                LogNormal::new(mu, sigma).expect("validated lognormal").sample(rng)
            }
            NamedDistribution::TwoPoint { p, a, b } => {
                if rng.random::<f64>() < p {
                    a
                } else {
                    b
                }
            }
        }
    }

    /// Fill a buffer with i.i.d. draws.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        // constructing the sampler once per buffer avoids per-draw setup
        match *self {
            NamedDistribution::Normal { mean, std } => {
                let d = Normal::new(mean, std).expect("validated normal");
                out.iter_mut().for_each(|x| *x = d.sample(rng));
            }
            NamedDistribution::StudentT { nu, loc, scale } => {
                let d = StudentT::new(nu).expect("validated nu");
                out.iter_mut()
                    .for_each(|x| *x = loc + scale * d.sample(rng));
            }
            _ => out.iter_mut().for_each(|x| *x = self.sample(rng)),
        }
    }

    pub fn sample_vec<R: Rng + ?Sized>(&self, rng: &mut R, count: usize) -> Vec<f64> {
        let mut out = vec![0.0; count];
        self.sample_into(rng, &mut out);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn check_moments(dist: NamedDistribution, budget: usize) {
        let mut rng = ChaCha8Rng::seed_from_u64(1234);
        let sample = dist.sample_vec(&mut rng, budget);
        let mean = sample.iter().sum::<f64>() / budget as f64;
        let var = sample.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / budget as f64;
        let sigma = dist.true_sigma().expect("finite variance family");
        // standard error of the mean, 3-sigma band
        let se_mean = sigma / (budget as f64).sqrt();
        assert!(
            (mean - dist.true_mean()).abs() < 3.0 * se_mean + 1e-9,
            "{dist:?}: mean {mean} vs {}",
            dist.true_mean()
        );
        // crude band for the variance (heavy tails make this noisy)
        assert!(
            (var.sqrt() - sigma).abs() / sigma < 0.1,
            "{dist:?}: sigma {} vs {sigma}",
            var.sqrt()
        );
    }

    #[test]
    fn analytic_moments_match_monte_carlo() {
        check_moments(NamedDistribution::Normal { mean: 2.0, std: 3.0 }, 1_000_000);
        check_moments(
            NamedDistribution::StudentT {
                nu: 5.0,
                loc: -1.0,
                scale: 2.0,
            },
            1_000_000,
        );
        check_moments(
            NamedDistribution::Pareto {
                alpha: 4.0,
                loc: 0.0,
                scale: 1.0,
            },
            1_000_000,
        );
        check_moments(
            NamedDistribution::LogNormal {
                mu: 0.0,
                sigma: 0.5,
            },
            1_000_000,
        );
        check_moments(
            NamedDistribution::TwoPoint {
                p: 0.3,
                a: -1.0,
                b: 2.0,
            },
            1_000_000,
        );
    }

    #[test]
    fn sampling_is_seed_deterministic() {
        let dist = NamedDistribution::student_t(3.0);
        let mut a = ChaCha8Rng::seed_from_u64(9);
        let mut b = ChaCha8Rng::seed_from_u64(9);
        assert_eq!(dist.sample_vec(&mut a, 100), dist.sample_vec(&mut b, 100));
    }

    #[test]
    fn normal_abs_third_moment_closed_form() {
        // E|Z|^3 = 2 sqrt(2/pi)
        let d = NamedDistribution::standard_normal();
        let expected = 2.0 * (2.0 / std::f64::consts::PI).sqrt();
        let got = d.abs_central_moment(1.0, 0, 0).unwrap();
        assert!((got - expected).abs() < 1e-12);
    }

    #[test]
    fn student_t_moment_infinite_when_tail_too_heavy() {
        let d = NamedDistribution::student_t(3.0);
        assert!(d.abs_central_moment(1.0, 0, 0).unwrap().is_infinite());
        assert!(d.abs_central_moment(0.5, 0, 0).unwrap().is_finite());
    }

    #[test]
    fn infinite_variance_flagged() {
        let d = NamedDistribution::StudentT {
            nu: 1.5,
            loc: 0.0,
            scale: 1.0,
        };
        assert!(d.true_sigma().is_none());
    }
}

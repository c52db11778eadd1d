//! Bounded-score loss functions for block-wise robust mean estimation.
//!
//! The loss `rho` is convex, even and continuously differentiable, with a
//! derivative `psi` that is the identity on `[-1, 1]`, constant beyond the
//! saturation band, 1-Lipschitz and bounded by 2. The estimators only ever
//! evaluate `psi`; `rho` is kept for diagnostics and derivative checks.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Start of the saturation band.
pub const TRANSITION_LO: f64 = 1.0;
/// Full saturation point.
pub const TRANSITION_HI: f64 = 2.0;

/// Largest admissible saturation value for the smoothed score.
///
/// The smooth interpolant on `[1, 2]` has slope at most `1.5 * (psi_max - 1)`,
/// so `psi_max <= 5/3` keeps the score 1-Lipschitz.
pub const PSI_MAX_LIMIT: f64 = 5.0 / 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Huber,
    SmoothedHuber,
}

/// The pair `(rho, psi = rho')`: the estimator's influence kernel.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreFunction {
    pub kind: ScoreKind,
    pub transition_lo: f64,
    pub transition_hi: f64,
    /// Saturation value `psi(z)` for `z >= transition_hi`. Always 1 for Huber.
    pub psi_max: f64,
}

impl Default for ScoreFunction {
    fn default() -> Self {
        ScoreFunction::huber()
    }
}

impl ScoreFunction {
    /// Standard Huber score: `psi(z) = clamp(z, -1, 1)`.
    pub fn huber() -> Self {
        ScoreFunction {
            kind: ScoreKind::Huber,
            transition_lo: TRANSITION_LO,
            transition_hi: TRANSITION_HI,
            psi_max: 1.0,
        }
    }

    /// Smoothed Huber score with a cubic rise from `psi(1) = 1` to
    /// `psi(2) = psi_max` and constant saturation afterwards.
    ///
    /// `psi_max = 1` reduces to the plain Huber score. Values above
    /// [`PSI_MAX_LIMIT`] would break the 1-Lipschitz requirement and are
    /// rejected.
    pub fn smoothed_huber(psi_max: f64) -> Result<Self> {
        if !psi_max.is_finite() || psi_max < 1.0 || psi_max > PSI_MAX_LIMIT {
            return Err(Error::Parameter(format!(
                "psi_max must lie in [1, {PSI_MAX_LIMIT}], got {psi_max}"
            )));
        }
        Ok(ScoreFunction {
            kind: ScoreKind::SmoothedHuber,
            transition_lo: TRANSITION_LO,
            transition_hi: TRANSITION_HI,
            psi_max,
        })
    }

    /// Construct from the CLI-facing name.
    pub fn from_name(name: &str) -> Result<Self> {
        match name {
            "huber" => Ok(ScoreFunction::huber()),
            "smoothed_huber" => ScoreFunction::smoothed_huber(1.0),
            other => Err(Error::Parameter(format!(
                "unknown score '{other}' (expected 'huber' or 'smoothed_huber')"
            ))),
        }
    }

    /// The score `psi(z) = rho'(z)`.
    ///
    /// NaN inputs propagate; callers validating untrusted data should use
    /// [`ScoreFunction::psi_checked`].
    #[inline]
    pub fn psi(&self, z: f64) -> f64 {
        let a = z.abs();
        let val = match self.kind {
            ScoreKind::Huber => a.min(1.0),
            ScoreKind::SmoothedHuber => {
                if a <= 1.0 {
                    a
                } else if a >= 2.0 {
                    self.psi_max
                } else {
                    let u = a - 1.0;
                    1.0 + (self.psi_max - 1.0) * u * u * (3.0 - 2.0 * u)
                }
            }
        };
        if z < 0.0 {
            -val
        } else {
            val
        }
    }

    /// Like [`ScoreFunction::psi`] but rejects non-finite input.
    pub fn psi_checked(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("psi requires finite z, got {z}")));
        }
        Ok(self.psi(z))
    }

    /// The loss `rho(z)`; its derivative is [`ScoreFunction::psi`].
    #[inline]
    pub fn rho(&self, z: f64) -> f64 {
        let a = z.abs();
        match self.kind {
            ScoreKind::Huber => {
                if a <= 1.0 {
                    0.5 * a * a
                } else {
                    a - 0.5
                }
            }
            ScoreKind::SmoothedHuber => {
                let g = self.psi_max - 1.0;
                if a <= 1.0 {
                    0.5 * a * a
                } else if a <= 2.0 {
                    let u = a - 1.0;
                    0.5 + u + g * u * u * u * (1.0 - 0.5 * u)
                } else {
                    // rho(2) + psi_max * (|z| - 2)
                    1.5 + 0.5 * g + self.psi_max * (a - 2.0)
                }
            }
        }
    }

    /// Like [`ScoreFunction::rho`] but rejects non-finite input.
    pub fn rho_checked(&self, z: f64) -> Result<f64> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("rho requires finite z, got {z}")));
        }
        Ok(self.rho(z))
    }
}

/// Maximal observed violation of each score invariant on a symmetric grid.
///
/// A value of 0 means the invariant held exactly at every grid point.
#[derive(Debug, Clone, Copy, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    /// `|psi(-z) + psi(z)|`
    pub oddness: f64,
    /// `|psi(z) - z|` on `|z| <= 1`
    pub identity_region: f64,
    /// `|psi(z) - psi(2)|` on `z >= 2`
    pub saturation: f64,
    /// excess of `|psi(a) - psi(b)|` over `|a - b|` on adjacent grid points
    pub lipschitz: f64,
    /// excess of `|psi(z)|` over 2
    pub bounded: f64,
    /// decrease of `z - psi(z)` between adjacent grid points
    pub gap_monotone: f64,
}

impl ValidationReport {
    pub fn max_violation(&self) -> f64 {
        [
            self.oddness,
            self.identity_region,
            self.saturation,
            self.lipschitz,
            self.bounded,
            self.gap_monotone,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// Check every score invariant for an arbitrary `psi` on a symmetric grid
/// over `[-10, 10]` with the given step. Violations are reported, not thrown.
pub fn validate_psi<F: Fn(f64) -> f64>(psi: F, grid_step: f64) -> Result<ValidationReport> {
    if !(grid_step > 0.0) {
        return Err(Error::Parameter(format!(
            "grid_step must be positive, got {grid_step}"
        )));
    }
    let mut report = ValidationReport::default();
    let steps = (20.0 / grid_step).ceil() as usize;
    let psi_sat = psi(2.0);
    let mut prev: Option<(f64, f64)> = None;
    for i in 0..=steps {
        let z = -10.0 + grid_step * i as f64;
        let p = psi(z);
        report.oddness = report.oddness.max((psi(-z) + p).abs());
        if z.abs() <= 1.0 {
            report.identity_region = report.identity_region.max((p - z).abs());
        }
        if z >= 2.0 {
            report.saturation = report.saturation.max((p - psi_sat).abs());
        }
        report.bounded = report.bounded.max(p.abs() - 2.0).max(0.0);
        if let Some((zp, pp)) = prev {
            report.lipschitz = report.lipschitz.max((p - pp).abs() - (z - zp)).max(0.0);
            report.gap_monotone = report
                .gap_monotone
                .max((zp - pp) - (z - p))
                .max(0.0);
        }
        prev = Some((z, p));
    }
    Ok(report)
}

/// Check all score invariants for a [`ScoreFunction`].
pub fn validate_assumption(s: &ScoreFunction, grid_step: f64) -> Result<ValidationReport> {
    validate_psi(|z| s.psi(z), grid_step)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huber_psi_values() {
        let s = ScoreFunction::huber();
        assert_eq!(s.psi(0.5), 0.5);
        assert_eq!(s.psi(3.0), 1.0);
        assert_eq!(s.psi(-0.25), -0.25);
        assert_eq!(s.psi(-7.0), -1.0);
    }

    #[test]
    fn huber_rho_values() {
        let s = ScoreFunction::huber();
        assert_eq!(s.rho(0.0), 0.0);
        assert_eq!(s.rho(1.0), 0.5);
        assert_eq!(s.rho(-3.0), 2.5);
    }

    #[test]
    fn non_finite_input_is_domain_error() {
        let s = ScoreFunction::huber();
        assert!(matches!(s.psi_checked(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(
            s.rho_checked(f64::INFINITY),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn huber_validates_exactly() {
        let r = validate_assumption(&ScoreFunction::huber(), 1e-3).unwrap();
        assert_eq!(r.max_violation(), 0.0);
    }

    #[test]
    fn smoothed_huber_validates_to_tolerance() {
        let s = ScoreFunction::smoothed_huber(1.5).unwrap();
        let r = validate_assumption(&s, 1e-3).unwrap();
        assert!(r.max_violation() <= 1e-12, "violations: {r:?}");
    }

    #[test]
    fn smoothed_huber_default_reduces_to_huber() {
        let s = ScoreFunction::smoothed_huber(1.0).unwrap();
        let h = ScoreFunction::huber();
        for i in -100..=100 {
            let z = i as f64 * 0.05;
            assert_eq!(s.psi(z), h.psi(z));
        }
    }

    #[test]
    fn broken_score_reports_lipschitz_violation() {
        let r = validate_psi(|z| 2.0 * z, 1e-2).unwrap();
        assert!(r.lipschitz > 0.0);
    }

    #[test]
    fn psi_max_out_of_range_rejected() {
        assert!(ScoreFunction::smoothed_huber(1.8).is_err());
        assert!(ScoreFunction::smoothed_huber(0.9).is_err());
    }

    #[test]
    fn rho_derivative_matches_psi() {
        // central differences, step 1e-5, tolerance 1e-6
        for s in [
            ScoreFunction::huber(),
            ScoreFunction::smoothed_huber(1.4).unwrap(),
        ] {
            let h = 1e-5;
            for i in -40..=40 {
                let z = i as f64 * 0.25 + 0.013;
                let numeric = (s.rho(z + h) - s.rho(z - h)) / (2.0 * h);
                assert!(
                    (numeric - s.psi(z)).abs() < 1e-6,
                    "kind {:?} at z={z}: {numeric} vs {}",
                    s.kind,
                    s.psi(z)
                );
            }
        }
    }
}

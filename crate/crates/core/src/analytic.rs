//! Closed-form SIR results for Poisson deployments.
//!
//! Everything here is exact: ccdfs for the single- and multi-tier Poisson
//! model at `alpha = 4`, the distance-ratio moments, MISRs of the baseline,
//! silencing and worst-case cooperation schemes, and the resulting
//! asymptotic gains.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{gamma_ratio, ln_gamma, ln_gamma_ratio};

/// Path loss exponent of the law `r^-alpha`, always `> 2`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct PathLossExponent(f64);

impl PathLossExponent {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha > 2.0 {
            Ok(PathLossExponent(alpha))
        } else {
            Err(Error::DivergentMisr { alpha })
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }

    pub fn half(self) -> f64 {
        0.5 * self.0
    }

    fn require_four(self) -> Result<()> {
        if self.0 == 4.0 {
            Ok(())
        } else {
            Err(Error::UnsupportedExponent { alpha: self.0 })
        }
    }
}

impl TryFrom<f64> for PathLossExponent {
    type Error = Error;
    fn try_from(alpha: f64) -> Result<Self> {
        PathLossExponent::new(alpha)
    }
}

impl From<PathLossExponent> for f64 {
    fn from(a: PathLossExponent) -> f64 {
        a.0
    }
}

/// Asymptotic SIR gain of a scheme over a baseline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GainReport {
    pub misr_baseline: f64,
    pub misr_scheme: f64,
    pub gain_linear: f64,
    pub gain_db: f64,
}

impl GainReport {
    pub fn from_misrs(misr_baseline: f64, misr_scheme: f64) -> Result<Self> {
        if !(misr_baseline > 0.0) || !(misr_scheme > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "MISRs must be positive, got {misr_baseline} and {misr_scheme}"
            )));
        }
        let gain_linear = misr_baseline / misr_scheme;
        Ok(GainReport {
            misr_baseline,
            misr_scheme,
            gain_linear,
            gain_db: to_db(gain_linear),
        })
    }
}

pub fn to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn check_theta(theta: f64) -> Result<()> {
    if theta > 0.0 && theta.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain {
            what: "theta",
            value: theta,
        })
    }
}

fn hip4_unchecked(theta: f64) -> f64 {
    let s = theta.sqrt();
    1.0 / (1.0 + s * s.atan())
}

/// SIR ccdf of the typical user in the Poisson (HIP) model with Rayleigh
/// fading and `alpha = 4`: `1 / (1 + sqrt(theta) atan(sqrt(theta)))`.
pub fn ccdf_hip_alpha4(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(hip4_unchecked(theta))
}

/// SIR ccdf of a worst-case (Voronoi vertex) user served jointly by its three
/// equidistant base stations, `alpha = 4`, Rayleigh fading.
pub fn ccdf_worstcase_coop3_alpha4(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    let base = hip4_unchecked(theta / 3.0);
    Ok(base * base)
}

/// Closed-form ccdfs, addressable by name from configs and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClosedFormCcdf {
    /// Typical user, Poisson deployment, no cooperation.
    Hip,
    /// Worst-case user with 3-BS non-coherent joint transmission.
    WorstCaseCoop3,
}

impl ClosedFormCcdf {
    pub fn parse(name: &str) -> Option<Self> {
        match name {
            "hip4" | "hip" | "ppp4" => Some(ClosedFormCcdf::Hip),
            "coop3" | "worstcase-coop3" | "coop3-4" => Some(ClosedFormCcdf::WorstCaseCoop3),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClosedFormCcdf::Hip => "hip4",
            ClosedFormCcdf::WorstCaseCoop3 => "coop3",
        }
    }

    pub fn eval(self, alpha: PathLossExponent, theta: f64) -> Result<f64> {
        alpha.require_four()?;
        match self {
            ClosedFormCcdf::Hip => ccdf_hip_alpha4(theta),
            ClosedFormCcdf::WorstCaseCoop3 => ccdf_worstcase_coop3_alpha4(theta),
        }
    }

    /// MISR that governs the small-theta behaviour of this ccdf.
    pub fn misr(self, alpha: PathLossExponent) -> Result<f64> {
        match self {
            ClosedFormCcdf::Hip => Ok(misr_ppp(alpha)),
            ClosedFormCcdf::WorstCaseCoop3 => misr_worstcase_coop(3, alpha),
        }
    }
}

/// `E(nu_k^alpha)` for the distance ratio `nu_k = R_1 / R_k` in a PPP:
/// `Γ(1 + α/2) Γ(k) / Γ(k + α/2)`.
pub fn moment_nu(k: u64, alpha: PathLossExponent) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParameter("moment_nu needs k >= 1".into()));
    }
    if k == 1 {
        return Ok(1.0);
    }
    let a = alpha.half();
    Ok((ln_gamma(1.0 + a) - ln_gamma_ratio(k as f64, a)).exp())
}

/// MISR of the Poisson model with equal powers, `2 / (alpha - 2)`.
pub fn misr_ppp(alpha: PathLossExponent) -> f64 {
    2.0 / (alpha.get() - 2.0)
}

/// MISR when the `n` strongest interferers are silenced.
pub fn misr_silencing(n: u32, alpha: PathLossExponent) -> f64 {
    let a = alpha.half();
    let lead = 2.0 / (alpha.get() - 2.0);
    if n == 0 {
        return lead;
    }
    // Γ(1+a) Γ(n+2) / Γ(n+1+a)
    lead * (ln_gamma(1.0 + a) - ln_gamma_ratio(n as f64 + 2.0, a - 1.0)).exp()
}

pub fn gain_silencing(n: u32, alpha: PathLossExponent) -> Result<GainReport> {
    GainReport::from_misrs(misr_ppp(alpha), misr_silencing(n, alpha))
}

/// MISR of a worst-case user served by one of its three equidistant BSs.
pub fn misr_worstcase(alpha: PathLossExponent) -> f64 {
    2.0 + 4.0 / (alpha.get() - 2.0)
}

/// MISR of a worst-case user with `n` of its three equidistant BSs
/// cooperating; `n = 1` is the non-cooperative case.
pub fn misr_worstcase_coop(n: u32, alpha: PathLossExponent) -> Result<f64> {
    if !(1..=3).contains(&n) {
        return Err(Error::InvalidParameter(format!(
            "cooperation set size must be 1, 2 or 3, got {n}"
        )));
    }
    let am2 = alpha.get() - 2.0;
    let n = n as f64;
    Ok((4.0 + (3.0 - n) * am2) / (n * am2))
}

pub fn gain_coop(n: u32, alpha: PathLossExponent) -> Result<GainReport> {
    GainReport::from_misrs(misr_worstcase(alpha), misr_worstcase_coop(n, alpha)?)
}

/// The ccdf `base` shifted right by `gain_linear`: `base(theta / gain)`.
pub fn shifted_ccdf<F>(base: F, gain_linear: f64, theta: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(gain_linear > 0.0) || !gain_linear.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gain must be positive, got {gain_linear}"
        )));
    }
    base(theta / gain_linear)
}

/// Partial sum `sum_{k=2}^{k_max} E(nu_k^alpha)`, accumulated from the
/// smallest term up.
pub fn moment_partial_sum(k_max: u64, alpha: PathLossExponent) -> f64 {
    let a = alpha.half();
    let c = ln_gamma(1.0 + a);
    (2..=k_max)
        .rev()
        .map(|k| (c - ln_gamma_ratio(k as f64, a)).exp())
        .sum()
}

/// Closed form of [`moment_partial_sum`]:
/// `2/(α-2) - Γ(1+α/2) Γ(K+1) / ((α/2 - 1) Γ(K+α/2))`.
pub fn moment_partial_sum_exact(k_max: u64, alpha: PathLossExponent) -> f64 {
    let a = alpha.half();
    let tail = (ln_gamma(1.0 + a)).exp() * gamma_ratio(k_max as f64 + 1.0, a - 1.0) / (a - 1.0);
    misr_ppp(alpha) - tail
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn alpha(a: f64) -> PathLossExponent {
        PathLossExponent::new(a).unwrap()
    }

    #[test]
    fn exponent_must_exceed_two() {
        assert!(matches!(
            PathLossExponent::new(2.0),
            Err(Error::DivergentMisr { .. })
        ));
        assert!(PathLossExponent::new(1.5).is_err());
        assert!(PathLossExponent::new(f64::NAN).is_err());
        assert!(PathLossExponent::new(2.0001).is_ok());
    }

    #[test]
    fn hip_ccdf_values() {
        // direct substitution
        assert_relative_eq!(
            ccdf_hip_alpha4(1.0).unwrap(),
            1.0 / (1.0 + std::f64::consts::FRAC_PI_4),
            max_relative = 1e-15
        );
        assert_relative_eq!(ccdf_hip_alpha4(1.0).unwrap(), 0.560_099_153_4, epsilon = 1e-9);
        assert_relative_eq!(ccdf_hip_alpha4(10.0).unwrap(), 0.200_049_610_28, epsilon = 1e-10);
        let t = 1e-6;
        assert!((1.0 - ccdf_hip_alpha4(t).unwrap() - t).abs() < 1e-10);
    }

    #[test]
    fn coop_ccdf_values() {
        let at3 = ccdf_worstcase_coop3_alpha4(3.0).unwrap();
        assert_relative_eq!(at3, ccdf_hip_alpha4(1.0).unwrap().powi(2), max_relative = 1e-15);
        assert_relative_eq!(at3, 0.313_711_06, epsilon = 1e-8);
        let t = 1e-6;
        let lin = (1.0 - ccdf_worstcase_coop3_alpha4(t).unwrap()) / t;
        assert_relative_eq!(lin, 2.0 / 3.0, max_relative = 1e-5);
    }

    #[test]
    fn ccdf_domain_errors() {
        for bad in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(ccdf_hip_alpha4(bad).is_err());
            assert!(ccdf_worstcase_coop3_alpha4(bad).is_err());
        }
        assert!(matches!(
            ClosedFormCcdf::Hip.eval(alpha(3.0), 1.0),
            Err(Error::UnsupportedExponent { .. })
        ));
        assert!(ClosedFormCcdf::Hip.eval(alpha(4.0), 1.0).is_ok());
    }

    #[test]
    fn small_theta_slope_is_misr() {
        let t = 1e-4;
        for (f, misr) in [
            (ClosedFormCcdf::Hip, 1.0),
            (ClosedFormCcdf::WorstCaseCoop3, 2.0 / 3.0),
        ] {
            let slope = (1.0 - f.eval(alpha(4.0), t).unwrap()) / t;
            assert_relative_eq!(slope, misr, max_relative = 0.01);
            assert_relative_eq!(f.misr(alpha(4.0)).unwrap(), misr, max_relative = 1e-15);
        }
    }

    #[test]
    fn nu_moments() {
        assert_eq!(moment_nu(1, alpha(3.7)).unwrap(), 1.0);
        assert_relative_eq!(moment_nu(2, alpha(4.0)).unwrap(), 1.0 / 3.0, max_relative = 1e-14);
        assert_relative_eq!(moment_nu(3, alpha(4.0)).unwrap(), 1.0 / 6.0, max_relative = 1e-14);
        assert!(moment_nu(0, alpha(4.0)).is_err());
        // 2/(k(k+1)) at alpha = 4, deep in the asymptotic branch
        let k = 1_000_000u64;
        let want = 2.0 / (k as f64 * (k as f64 + 1.0));
        assert_relative_eq!(moment_nu(k, alpha(4.0)).unwrap(), want, max_relative = 1e-12);
        let mut prev = 1.0;
        for k in 2..200 {
            let m = moment_nu(k, alpha(3.3)).unwrap();
            assert!(m < prev);
            prev = m;
        }
    }

    #[test]
    fn misr_values() {
        assert_eq!(misr_ppp(alpha(4.0)), 1.0);
        assert_eq!(misr_ppp(alpha(3.0)), 2.0);
        assert_relative_eq!(misr_silencing(1, alpha(4.0)), 2.0 / 3.0, max_relative = 1e-14);
        for a in [2.5, 3.0, 4.0, 5.5] {
            assert_relative_eq!(
                misr_silencing(1, alpha(a)),
                8.0 / (a * a - 4.0),
                max_relative = 1e-13
            );
            assert_eq!(misr_silencing(0, alpha(a)), misr_ppp(alpha(a)));
        }
        for n in 0..=6u32 {
            assert_relative_eq!(
                misr_silencing(n, alpha(4.0)),
                2.0 / (n as f64 + 2.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn silencing_telescopes() {
        for a in [2.5, 3.0, 4.0, 4.7, 6.0] {
            let al = alpha(a);
            let mut acc = misr_ppp(al);
            for n in 1..=6u32 {
                acc -= moment_nu(n as u64 + 1, al).unwrap();
                assert!(
                    (misr_silencing(n, al) - acc).abs() < 1e-12,
                    "alpha={a} n={n}: {} vs {acc}",
                    misr_silencing(n, al)
                );
            }
        }
    }

    #[test]
    fn silencing_gain() {
        let g = gain_silencing(1, alpha(4.0)).unwrap();
        assert_relative_eq!(g.gain_linear, 1.5, max_relative = 1e-14);
        assert_relative_eq!(g.gain_db, 1.760_912_59, epsilon = 1e-8);
        assert_eq!(gain_silencing(0, alpha(4.0)).unwrap().gain_db, 0.0);
        for n in 0..8 {
            assert_relative_eq!(
                gain_silencing(n, alpha(4.0)).unwrap().gain_linear,
                1.0 + n as f64 / 2.0,
                max_relative = 1e-13
            );
        }
        // alpha = 3, n = 2: 2 / (2 Γ(2.5) Γ(4) / Γ(4.5)) with Γ(4.5)/Γ(2.5) = 3.5 * 2.5
        let want = 2.0 / (2.0 * 6.0 / (3.5 * 2.5));
        assert_relative_eq!(
            gain_silencing(2, alpha(3.0)).unwrap().gain_linear,
            want,
            max_relative = 1e-13
        );
    }

    #[test]
    fn worstcase_misrs_and_gains() {
        assert_eq!(misr_worstcase(alpha(4.0)), 4.0);
        assert_relative_eq!(misr_worstcase_coop(3, alpha(4.0)).unwrap(), 2.0 / 3.0);
        assert_eq!(misr_worstcase_coop(1, alpha(4.0)).unwrap(), 4.0);
        assert_eq!(misr_worstcase_coop(2, alpha(4.0)).unwrap(), 1.5);
        assert!(misr_worstcase_coop(0, alpha(4.0)).is_err());
        assert!(misr_worstcase_coop(4, alpha(4.0)).is_err());

        let g = gain_coop(3, alpha(4.0)).unwrap();
        assert_relative_eq!(g.gain_linear, 6.0, max_relative = 1e-14);
        assert_relative_eq!(g.gain_db, 7.781_512_5, epsilon = 1e-7);
        assert_eq!(gain_coop(1, alpha(3.3)).unwrap().gain_linear, 1.0);
        assert_relative_eq!(gain_coop(2, alpha(4.0)).unwrap().gain_linear, 8.0 / 3.0);
        for a in [2.5, 3.0, 5.0, 7.0] {
            assert_relative_eq!(
                gain_coop(3, alpha(a)).unwrap().gain_linear,
                3.0 + 1.5 * (a - 2.0),
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn shifted() {
        let base = ccdf_hip_alpha4;
        assert_eq!(shifted_ccdf(base, 1.0, 0.7).unwrap(), base(0.7).unwrap());
        assert_eq!(shifted_ccdf(base, 2.0, 2.0).unwrap(), base(1.0).unwrap());
        assert_eq!(shifted_ccdf(base, 6.0, 6.0).unwrap(), base(1.0).unwrap());
        assert!(shifted_ccdf(base, 0.0, 1.0).is_err());
    }

    #[test]
    fn partial_sums_match_closed_form() {
        for a in [3.0, 4.0, 5.0] {
            for k in [2u64, 3, 10, 1000, 100_000] {
                let num = moment_partial_sum(k, alpha(a));
                let exact = moment_partial_sum_exact(k, alpha(a));
                assert_relative_eq!(num, exact, max_relative = 1e-11);
            }
        }
        // alpha = 4 has the rational form 1 - 2/(K+1)
        assert_relative_eq!(
            moment_partial_sum_exact(999, alpha(4.0)),
            1.0 - 2.0 / 1000.0,
            max_relative = 1e-14
        );
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analytic::PathLossExponent;
use crate::error::{Error, Result};
use crate::fading::FadingModel;
use crate::pointfields::{Region, TierSpec};

/// Smallest simulation window, in expected base stations.
pub const MIN_WINDOW_POINTS: u32 = 100;
pub const DEFAULT_WINDOW_POINTS: u32 = 2000;
/// Window used when `2 < alpha < 3`, where the far-field tail decays slowly.
pub const DEFAULT_WINDOW_POINTS_LOW_ALPHA: u32 = 10_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DeploymentKind {
    Ppp,
    Hip(Vec<TierSpec>),
    SquareLattice,
    TriangularLattice,
}

impl DeploymentKind {
    pub fn total_intensity(&self) -> f64 {
        match self {
            DeploymentKind::Hip(tiers) => tiers.iter().map(|t| t.intensity).sum(),
            _ => 1.0,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            DeploymentKind::Ppp => "ppp",
            DeploymentKind::Hip(_) => "hip",
            DeploymentKind::SquareLattice => "square",
            DeploymentKind::TriangularLattice => "triangular",
        }
    }
}

impl FromStr for DeploymentKind {
    type Err = Error;

    /// `ppp`, `square`, `triangular`; `hip` yields an empty tier list to be
    /// filled by the caller.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ppp" | "poisson" => Ok(DeploymentKind::Ppp),
            "hip" => Ok(DeploymentKind::Hip(Vec::new())),
            "square" | "square-lattice" => Ok(DeploymentKind::SquareLattice),
            "triangular" | "triangular-lattice" | "hex" => Ok(DeploymentKind::TriangularLattice),
            other => Err(Error::InvalidParameter(format!(
                "unknown deployment `{other}` (expected ppp, hip, square or triangular)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    Baseline,
    /// The `n` strongest interferers (on average) are switched off.
    Silence(u32),
    /// User at a Voronoi vertex, served by one of its three equidistant BSs.
    WorstCase,
    /// User at a Voronoi vertex, served by `n` of its equidistant BSs with
    /// non-coherent joint transmission.
    WorstCaseCoop(u32),
}

impl Scheme {
    pub fn is_worst_case(self) -> bool {
        matches!(self, Scheme::WorstCase | Scheme::WorstCaseCoop(_))
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Baseline => f.write_str("baseline"),
            Scheme::Silence(n) => write!(f, "silence:{n}"),
            Scheme::WorstCase => f.write_str("worstcase"),
            Scheme::WorstCaseCoop(n) => write!(f, "coop:{n}"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    /// `baseline`, `silence:<n>`, `worstcase`, `coop:<n>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((a, b)) => (a.trim(), Some(b.trim())),
            None => (s, None),
        };
        let count = |a: Option<&str>| -> Result<u32> {
            a.ok_or_else(|| Error::InvalidParameter(format!("scheme `{s}` needs a count, e.g. `{name}:1`")))?
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad count in scheme `{s}`")))
        };
        match name.to_ascii_lowercase().as_str() {
            "baseline" if arg.is_none() => Ok(Scheme::Baseline),
            "silence" => Ok(Scheme::Silence(count(arg)?)),
            "worstcase" | "worst-case" if arg.is_none() => Ok(Scheme::WorstCase),
            "coop" | "worstcase-coop" | "worstcase_coop" => Ok(Scheme::WorstCaseCoop(count(arg)?)),
            _ => Err(Error::InvalidParameter(format!(
                "unknown scheme `{s}` (expected baseline, silence:<n>, worstcase or coop:<n>)"
            ))),
        }
    }
}

/// Full description of one Monte Carlo experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub deployment: DeploymentKind,
    pub alpha: PathLossExponent,
    pub scheme: Scheme,
    pub fading: FadingModel,
    /// Apply i.i.d. fading from `fading` to every interfering link as well as
    /// the serving link when sampling SIRs.
    pub interferer_fading: bool,
    /// Expected number of base stations in the simulation window.
    pub window_points: u32,
    pub realizations: u64,
    pub master_seed: u64,
}

impl Scenario {
    /// PPP baseline with Rayleigh fading and the default window for `alpha`.
    pub fn new(alpha: PathLossExponent) -> Self {
        Scenario {
            deployment: DeploymentKind::Ppp,
            alpha,
            scheme: Scheme::Baseline,
            fading: FadingModel::Rayleigh,
            interferer_fading: true,
            window_points: default_window_points(alpha),
            realizations: 10_000,
            master_seed: 0,
        }
    }

    pub fn with_deployment(mut self, d: DeploymentKind) -> Self {
        self.deployment = d;
        self
    }

    pub fn with_scheme(mut self, s: Scheme) -> Self {
        self.scheme = s;
        self
    }

    pub fn with_fading(mut self, f: FadingModel) -> Self {
        self.fading = f;
        self
    }

    pub fn with_realizations(mut self, n: u64) -> Self {
        self.realizations = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_window_points(mut self, n: u32) -> Self {
        self.window_points = n;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParameter(m));
        if self.realizations < 1 {
            return bad("realizations must be >= 1".into());
        }
        if self.window_points < MIN_WINDOW_POINTS {
            return bad(format!(
                "window_points must be >= {MIN_WINDOW_POINTS}, got {}",
                self.window_points
            ));
        }
        self.fading.validate()?;
        match self.scheme {
            Scheme::Silence(0) => return bad("silence(n) needs n >= 1; use baseline for n = 0".into()),
            Scheme::WorstCaseCoop(n) if !(2..=3).contains(&n) => {
                return bad(format!("worst-case cooperation needs n in {{2, 3}}, got {n}"))
            }
            s if s.is_worst_case() && self.deployment != DeploymentKind::Ppp => {
                return bad("worst-case schemes are defined for the single-tier PPP only".into())
            }
            _ => {}
        }
        if let DeploymentKind::Hip(tiers) = &self.deployment {
            if tiers.is_empty() {
                return bad("HIP deployment needs at least one tier".into());
            }
            for t in tiers {
                t.validate()?;
            }
        }
        Ok(())
    }

    /// Simulation window holding `window_points` base stations on average.
    pub fn region(&self) -> Result<Region> {
        Region::for_expected_points(self.window_points as f64, self.deployment.total_intensity())
    }

    /// Stable 64-bit FNV-1a hash of the serialized scenario.
    pub fn fingerprint(&self) -> u64 {
        let text = serde_json::to_string(self).expect("scenario serializes");
        text.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
            (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
        })
    }
}

/// Default window size for a path loss exponent.
pub fn default_window_points(alpha: PathLossExponent) -> u32 {
    if alpha.get() < 3.0 {
        DEFAULT_WINDOW_POINTS_LOW_ALPHA
    } else {
        DEFAULT_WINDOW_POINTS
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a(x: f64) -> PathLossExponent {
        PathLossExponent::new(x).unwrap()
    }

    #[test]
    fn scheme_roundtrip() {
        for s in ["baseline", "silence:1", "worstcase", "coop:3"] {
            assert_eq!(s.parse::<Scheme>().unwrap().to_string(), s);
        }
        assert_eq!("worstcase_coop:2".parse::<Scheme>().unwrap(), Scheme::WorstCaseCoop(2));
        assert!("silence".parse::<Scheme>().is_err());
        assert!("silence:x".parse::<Scheme>().is_err());
        assert!("blah".parse::<Scheme>().is_err());
    }

    #[test]
    fn validation() {
        let base = Scenario::new(a(4.0));
        assert!(base.validate().is_ok());
        assert!(base.clone().with_realizations(0).validate().is_err());
        assert!(base.clone().with_window_points(99).validate().is_err());
        assert!(base.clone().with_scheme(Scheme::Silence(0)).validate().is_err());
        assert!(base.clone().with_scheme(Scheme::WorstCaseCoop(1)).validate().is_err());
        assert!(base.clone().with_scheme(Scheme::WorstCaseCoop(3)).validate().is_ok());
        assert!(base
            .clone()
            .with_scheme(Scheme::WorstCase)
            .with_deployment(DeploymentKind::SquareLattice)
            .validate()
            .is_err());
        assert!(base.clone().with_deployment(DeploymentKind::Hip(vec![])).validate().is_err());
    }

    #[test]
    fn window_defaults() {
        assert_eq!(default_window_points(a(4.0)), 2000);
        assert_eq!(default_window_points(a(3.0)), 2000);
        assert_eq!(default_window_points(a(2.5)), 10_000);
        let r = Scenario::new(a(4.0)).region().unwrap();
        assert!((r.area() - 2000.0).abs() < 1e-9);
    }

    #[test]
    fn fingerprint_tracks_every_field() {
        let s = Scenario::new(a(4.0));
        assert_eq!(s.fingerprint(), s.clone().fingerprint());
        assert_ne!(s.fingerprint(), s.clone().with_seed(1).fingerprint());
        assert_ne!(s.fingerprint(), s.clone().with_scheme(Scheme::Silence(1)).fingerprint());
        let mut t = s.clone();
        t.interferer_fading = false;
        assert_ne!(s.fingerprint(), t.fingerprint());
    }
}

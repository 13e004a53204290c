//! Unit-mean power fading.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::{gamma, gamma_lr};

use crate::error::{Error, Result};

/// Largest integer Nakagami parameter drawn as a sum of exponentials.
const ERLANG_MAX_SHAPE: u32 = 16;

/// Power fading model. All variants have `E(h) = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum FadingModel {
    None,
    Rayleigh,
    Nakagami { m: f64 },
}

impl FadingModel {
    pub fn nakagami(m: f64) -> Result<Self> {
        if m.is_finite() && m >= 0.5 {
            Ok(FadingModel::Nakagami { m })
        } else {
            Err(Error::InvalidParameter(format!(
                "Nakagami parameter must be >= 0.5, got {m}"
            )))
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            FadingModel::Nakagami { m } => FadingModel::nakagami(m).map(|_| ()),
            _ => Ok(()),
        }
    }

    pub fn is_none(&self) -> bool {
        matches!(self, FadingModel::None)
    }

    /// Builds a sampler for repeated draws.
    pub fn sampler(&self) -> Result<FadingSampler> {
        self.validate()?;
        Ok(match *self {
            FadingModel::None => FadingSampler::Unit,
            FadingModel::Rayleigh => FadingSampler::Erlang { shape: 1 },
            FadingModel::Nakagami { m } if m.fract() == 0.0 && m <= ERLANG_MAX_SHAPE as f64 => {
                FadingSampler::Erlang { shape: m as u32 }
            }
            FadingModel::Nakagami { m } => FadingSampler::Gamma(
                Gamma::new(m, 1.0 / m).map_err(|e| Error::InvalidParameter(e.to_string()))?,
            ),
        })
    }

    /// One power gain draw.
    pub fn sample_gain<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }

    /// The pair `(a, m)` with `F_h(x) ~ a x^m` as `x -> 0`.
    pub fn small_x_cdf_exponent(&self) -> Result<(f64, f64)> {
        match *self {
            FadingModel::None => Err(Error::NoSmallXExpansion),
            FadingModel::Rayleigh => Ok((1.0, 1.0)),
            FadingModel::Nakagami { m } => {
                self.validate()?;
                Ok((m.powf(m) / gamma(m + 1.0), m))
            }
        }
    }

    /// Cumulative distribution function of the power gain.
    pub fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        match *self {
            FadingModel::None => {
                if x >= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            FadingModel::Rayleigh => -(-x).exp_m1(),
            FadingModel::Nakagami { m } => gamma_lr(m, m * x),
        }
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FadingModel::None => f.write_str("none"),
            FadingModel::Rayleigh => f.write_str("rayleigh"),
            FadingModel::Nakagami { m } => write!(f, "nakagami:{m}"),
        }
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    /// Accepts `none`, `rayleigh` and `nakagami:<m>`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n.trim(), Some(a.trim())),
            None => (s, None),
        };
        match (name.to_ascii_lowercase().as_str(), arg) {
            ("none", None) => Ok(FadingModel::None),
            ("rayleigh", None) => Ok(FadingModel::Rayleigh),
            ("nakagami", Some(m)) => {
                let m: f64 = m
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad Nakagami parameter `{m}`")))?;
                FadingModel::nakagami(m)
            }
            _ => Err(Error::InvalidParameter(format!(
                "unknown fading model `{s}` (expected none, rayleigh or nakagami:<m>)"
            ))),
        }
    }
}

impl TryFrom<String> for FadingModel {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<FadingModel> for String {
    fn from(m: FadingModel) -> String {
        m.to_string()
    }
}

/// Prepared sampler for a [`FadingModel`].
#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    Unit,
    /// Mean of `shape` unit exponentials.
    Erlang { shape: u32 },
    Gamma(Gamma<f64>),
}

impl FadingSampler {
    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match *self {
            FadingSampler::Unit => 1.0,
            FadingSampler::Erlang { shape: 1 } => Exp1.sample(rng),
            FadingSampler::Erlang { shape } => {
                let mut s = 0.0;
                for _ in 0..shape {
                    let e: f64 = Exp1.sample(rng);
                    s += e;
                }
                s / shape as f64
            }
            FadingSampler::Gamma(g) => g.sample(rng),
        }
    }
}

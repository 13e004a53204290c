use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} = {value} is outside the domain of the function")]
    Domain { what: &'static str, value: f64 },

    #[error("path loss exponent alpha = {alpha} gives a divergent MISR (need alpha > 2)")]
    DivergentMisr { alpha: f64 },

    #[error("closed form only available for alpha = 4, got alpha = {alpha}")]
    UnsupportedExponent { alpha: f64 },

    #[error("window of radius {radius} holds fewer than 2 lattice points")]
    InsufficientWindow { radius: f64 },

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error("fading model has no small-x power-law cdf expansion")]
    NoSmallXExpansion,

    #[error("probability {p} outside the achievable range ({lo}, {hi})")]
    OutOfRange { p: f64, lo: f64, hi: f64 },

    #[error("insufficient resolution: {0}")]
    InsufficientResolution(String),

    #[error("realization {index}: no worst-case site found after {attempts} attempts (scenario {fingerprint:016x})")]
    NoSite {
        index: u64,
        attempts: u32,
        fingerprint: u64,
    },
}

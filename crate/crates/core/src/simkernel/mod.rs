//! Monte Carlo estimation of ISR statistics and SIR distributions.
//!
//! Realization `i` of a scenario draws everything from the stream
//! `(master_seed, i)`, so sample sets are bit-identical for any worker count.

mod ccdf;
mod engine;
mod estimate;
mod isr;
mod scenario;

pub use ccdf::{
    diversity_estimate, diversity_estimate_fn, empirical_ccdf, empirical_ccdf_grouped,
    horizontal_gap, inverse_ccdf, loglog_slope, AnalyticCcdf, DiversityFit, EmpiricalCcdf,
    InvertibleCcdf, ThetaGrid, ANALYTIC_INVERSE_TOL, DEFAULT_GAP_PROBABILITIES,
    MAX_START_OUTAGE, MIN_OUTAGE_EVENTS,
};
pub use engine::{Engine, Execution};
pub use estimate::{IsrSampleSet, MisrEstimate, SampleSet, HEAVY_TAIL_SHARE};
pub use isr::INNER_RADIUS_FRACTION;
pub use scenario::{
    default_window_points, DeploymentKind, Scenario, Scheme, DEFAULT_WINDOW_POINTS,
    DEFAULT_WINDOW_POINTS_LOW_ALPHA, MIN_WINDOW_POINTS,
};

use crate::analytic::{to_db, GainReport};
use crate::error::{Error, Result};
use isr::{Kernel, Output};

/// Highest ISR moment order accepted by the estimators.
pub const MAX_MOMENT_ORDER: f64 = 4.0;

impl Engine {
    /// Fading-free ISR samples of every realization.
    pub fn isr_samples(&self, scenario: &Scenario) -> Result<IsrSampleSet> {
        isr::collect(self, scenario, Output::MeanIsr)
    }

    /// SIR samples `h / ISR`, one per ISR sample.
    pub fn sir_samples(&self, scenario: &Scenario) -> Result<SampleSet> {
        isr::collect(self, scenario, Output::Sir)
    }

    pub fn estimate_misr(&self, scenario: &Scenario) -> Result<MisrEstimate> {
        self.isr_samples(scenario)?.mean_of(|x| x)
    }

    /// `E(ISR^m)` for `0 < m <= 4`.
    pub fn estimate_isr_moment(&self, scenario: &Scenario, m: f64) -> Result<MisrEstimate> {
        check_moment_order(m)?;
        let set = self.isr_samples(scenario)?;
        if m == 1.0 {
            set.mean_of(|x| x)
        } else {
            set.mean_of(|x| x.powf(m))
        }
    }

    /// Asymptotic gain of `scheme` over `baseline` from estimated MISRs.
    pub fn misr_gain(&self, baseline: &Scenario, scheme: &Scenario) -> Result<GainReport> {
        let b = self.estimate_misr(baseline)?;
        let s = self.estimate_misr(scheme)?;
        GainReport::from_misrs(b.mean, s.mean)
    }

    /// `10 log10 (E(ISR_1^m) / E(ISR_2^m))^(1/m)`.
    pub fn gain_from_moments(&self, scenario1: &Scenario, scenario2: &Scenario, m: f64) -> Result<f64> {
        let a = self.estimate_isr_moment(scenario1, m)?;
        let b = self.estimate_isr_moment(scenario2, m)?;
        Ok(to_db((a.mean / b.mean).powf(1.0 / m)))
    }
}

fn check_moment_order(m: f64) -> Result<()> {
    if m > 0.0 && m <= MAX_MOMENT_ORDER {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "moment order must lie in (0, {MAX_MOMENT_ORDER}], got {m}"
        )))
    }
}

/// ISR samples of realization `index` alone: one value for typical-user
/// schemes, one per Voronoi vertex for worst-case schemes.
pub fn isr_realization(scenario: &Scenario, index: u64) -> Result<Vec<f64>> {
    if index >= scenario.realizations {
        return Err(Error::InvalidParameter(format!(
            "realization index {index} out of range (< {})",
            scenario.realizations
        )));
    }
    let kernel = Kernel::new(scenario)?;
    let mut out = Vec::new();
    kernel.realization(index, Output::MeanIsr, &mut out)?;
    Ok(out)
}

pub fn estimate_misr(scenario: &Scenario) -> Result<MisrEstimate> {
    Engine::default().estimate_misr(scenario)
}

pub fn estimate_isr_moment(scenario: &Scenario, m: f64) -> Result<MisrEstimate> {
    Engine::default().estimate_isr_moment(scenario, m)
}

pub fn sir_samples(scenario: &Scenario) -> Result<SampleSet> {
    Engine::default().sir_samples(scenario)
}

pub fn gain_from_moments(scenario1: &Scenario, scenario2: &Scenario, m: f64) -> Result<f64> {
    Engine::default().gain_from_moments(scenario1, scenario2, m)
}

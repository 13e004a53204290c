//! Empirical ccdfs, their inverses, horizontal gaps and diversity slopes.

use serde::{Deserialize, Serialize};

use super::estimate::SampleSet;
use crate::analytic::{from_db, to_db};
use crate::error::{Error, Result};

/// Strictly increasing SIR thresholds, kept in dB and linear scale.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaGrid {
    db: Vec<f64>,
    linear: Vec<f64>,
}

impl ThetaGrid {
    pub fn from_db(db: Vec<f64>) -> Result<Self> {
        if db.is_empty() {
            return Err(Error::InvalidParameter("theta grid is empty".into()));
        }
        if db.iter().any(|x| !x.is_finite()) || db.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidParameter(
                "theta grid must be finite and strictly increasing".into(),
            ));
        }
        let linear = db.iter().map(|&x| from_db(x)).collect();
        Ok(ThetaGrid { db, linear })
    }

    pub fn from_linear(linear: Vec<f64>) -> Result<Self> {
        if linear.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter("theta values must be positive".into()));
        }
        let db = linear.iter().map(|&x| to_db(x)).collect();
        let g = ThetaGrid::from_db(db)?;
        Ok(ThetaGrid { linear, ..g })
    }

    /// Grid with both columns given, e.g. as read back from a file.
    pub fn from_parts(db: Vec<f64>, linear: Vec<f64>) -> Result<Self> {
        if db.len() != linear.len() {
            return Err(Error::InvalidParameter("theta columns differ in length".into()));
        }
        if linear.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::InvalidParameter("theta values must be positive".into()));
        }
        let g = ThetaGrid::from_db(db)?;
        Ok(ThetaGrid { linear, ..g })
    }

    /// `lo_db, lo_db + step, ...` up to and including `hi_db`.
    pub fn range_db(lo_db: f64, hi_db: f64, step_db: f64) -> Result<Self> {
        if !(step_db > 0.0) || hi_db < lo_db {
            return Err(Error::InvalidParameter("bad theta range".into()));
        }
        let n = ((hi_db - lo_db) / step_db + 1e-9).floor() as usize;
        ThetaGrid::from_db((0..=n).map(|i| lo_db + i as f64 * step_db).collect())
    }

    pub fn db(&self) -> &[f64] {
        &self.db
    }

    pub fn linear(&self) -> &[f64] {
        &self.linear
    }

    pub fn len(&self) -> usize {
        self.db.len()
    }

    pub fn is_empty(&self) -> bool {
        self.db.is_empty()
    }
}

impl Default for ThetaGrid {
    /// -30 dB to +30 dB in 0.5 dB steps.
    fn default() -> Self {
        ThetaGrid::range_db(-30.0, 30.0, 0.5).expect("static grid")
    }
}

/// Tabulated estimate of `P(SIR > theta)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalCcdf {
    pub theta_db: Vec<f64>,
    pub theta_linear: Vec<f64>,
    pub probs: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_samples: u64,
}

impl EmpiricalCcdf {
    /// Assembles a ccdf from stored columns, checking its invariants.
    pub fn from_parts(
        grid: ThetaGrid,
        probs: Vec<f64>,
        stderr: Vec<f64>,
        n_samples: u64,
    ) -> Result<Self> {
        if probs.len() != grid.len() || stderr.len() != grid.len() {
            return Err(Error::InvalidParameter("ccdf columns differ in length".into()));
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(Error::InvalidParameter("ccdf values must lie in [0, 1]".into()));
        }
        if probs.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::InvalidParameter("ccdf must be non-increasing".into()));
        }
        Ok(EmpiricalCcdf {
            theta_db: grid.db,
            theta_linear: grid.linear,
            probs,
            stderr,
            n_samples,
        })
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Number of samples at or below `theta_linear[i]`.
    pub fn outage_events(&self, i: usize) -> f64 {
        ((1.0 - self.probs[i]) * self.n_samples as f64).round()
    }
}

fn count_above(sorted: &[f64], theta: f64) -> usize {
    sorted.len() - sorted.partition_point(|&x| x <= theta)
}

/// Fraction of `samples` strictly above each grid threshold, with binomial
/// standard errors.
pub fn empirical_ccdf(samples: &[f64], grid: &ThetaGrid) -> Result<EmpiricalCcdf> {
    if samples.is_empty() {
        return Err(Error::InsufficientPoints { needed: 1, got: 0 });
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let probs: Vec<f64> = grid
        .linear()
        .iter()
        .map(|&t| count_above(&sorted, t) as f64 / n)
        .collect();
    let stderr = probs.iter().map(|&p| (p * (1.0 - p) / n).sqrt()).collect();
    EmpiricalCcdf::from_parts(grid.clone(), probs, stderr, sorted.len() as u64)
}

/// Like [`empirical_ccdf`], with batch-means standard errors over the
/// realization groups of `set` (binomial when samples are ungrouped).
pub fn empirical_ccdf_grouped(set: &SampleSet, grid: &ThetaGrid) -> Result<EmpiricalCcdf> {
    let mut ccdf = empirical_ccdf(set.values(), grid)?;
    let Some(sizes) = set.group_sizes() else {
        return Ok(ccdf);
    };
    let b = sizes.len();
    let n = set.len() as f64;
    if b < 2 {
        ccdf.stderr.iter_mut().for_each(|s| *s = f64::INFINITY);
        return Ok(ccdf);
    }
    let mut ss = vec![0.0; grid.len()];
    for g in set.group_slices() {
        let mut sorted = g.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        for (i, &t) in grid.linear().iter().enumerate() {
            let hits = count_above(&sorted, t) as f64;
            ss[i] += (hits - ccdf.probs[i] * g.len() as f64).powi(2);
        }
    }
    let mean_count = n / b as f64;
    for (s, q) in ccdf.stderr.iter_mut().zip(ss) {
        *s = (q / (b as f64 * (b - 1) as f64)).sqrt() / mean_count;
    }
    Ok(ccdf)
}

/// A ccdf that can be inverted at a success probability.
pub trait InvertibleCcdf {
    /// `theta` with `ccdf(theta) = p`.
    fn inverse(&self, p: f64) -> Result<f64>;
}

impl InvertibleCcdf for EmpiricalCcdf {
    /// Linear interpolation in `log theta` between the bracketing grid points.
    fn inverse(&self, p: f64) -> Result<f64> {
        let hi = self.probs.first().copied().unwrap_or(0.0);
        let lo = self.probs.last().copied().unwrap_or(0.0);
        if !(p > lo && p < hi) {
            return Err(Error::OutOfRange { p, lo, hi });
        }
        // first index whose value drops below p; probs are non-increasing
        let j = self.probs.partition_point(|&q| q >= p);
        let (p0, p1) = (self.probs[j - 1], self.probs[j]);
        let (l0, l1) = (self.theta_linear[j - 1].ln(), self.theta_linear[j].ln());
        let t = (p0 - p) / (p0 - p1);
        Ok((l0 + t * (l1 - l0)).exp())
    }
}

/// A closed-form ccdf searched by bisection over `[theta_lo, theta_hi]`.
pub struct AnalyticCcdf<F> {
    f: F,
    theta_lo: f64,
    theta_hi: f64,
}

/// Bisection stops once `|ccdf(theta) - p|` is below this.
pub const ANALYTIC_INVERSE_TOL: f64 = 1e-10;

impl<F: Fn(f64) -> f64> AnalyticCcdf<F> {
    pub fn new(f: F) -> Self {
        AnalyticCcdf {
            f,
            theta_lo: 1e-15,
            theta_hi: 1e15,
        }
    }

    pub fn with_range(mut self, lo: f64, hi: f64) -> Self {
        self.theta_lo = lo;
        self.theta_hi = hi;
        self
    }

    pub fn eval(&self, theta: f64) -> f64 {
        (self.f)(theta)
    }
}

impl<F: Fn(f64) -> f64> InvertibleCcdf for AnalyticCcdf<F> {
    fn inverse(&self, p: f64) -> Result<f64> {
        let (mut a, mut b) = (self.theta_lo.ln(), self.theta_hi.ln());
        let (fa, fb) = (self.eval(a.exp()), self.eval(b.exp()));
        if !(p < fa && p > fb) {
            return Err(Error::OutOfRange { p, lo: fb, hi: fa });
        }
        let mut mid = 0.5 * (a + b);
        for _ in 0..400 {
            mid = 0.5 * (a + b);
            let v = self.eval(mid.exp());
            if (v - p).abs() < ANALYTIC_INVERSE_TOL && b - a < 1e-13 {
                break;
            }
            if v > p {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(mid.exp())
    }
}

pub fn inverse_ccdf(ccdf: &dyn InvertibleCcdf, p: f64) -> Result<f64> {
    ccdf.inverse(p)
}

/// SIR gain of `ccdf2` over `ccdf1` at success probability `p`, in dB.
pub fn horizontal_gap(ccdf1: &dyn InvertibleCcdf, ccdf2: &dyn InvertibleCcdf, p: f64) -> Result<f64> {
    Ok(to_db(ccdf2.inverse(p)? / ccdf1.inverse(p)?))
}

/// Success probabilities at which gaps are reported by default.
pub const DEFAULT_GAP_PROBABILITIES: [f64; 5] = [0.75, 0.80, 0.85, 0.90, 0.95];

/// Outage events needed at the low end of the diversity fitting window.
pub const MIN_OUTAGE_EVENTS: f64 = 100.0;
/// Largest outage probability at which the fit may start.
pub const MAX_START_OUTAGE: f64 = 1e-2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversityFit {
    pub slope: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub points: usize,
}

/// Least-squares slope of `log10 outage` against `log10 theta`.
pub fn loglog_slope(theta: &[f64], outage: &[f64]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = theta
        .iter()
        .zip(outage)
        .filter(|(_, &o)| o > 0.0)
        .map(|(&t, &o)| (t.log10(), o.log10()))
        .collect();
    if pts.len() < 2 {
        return Err(Error::InsufficientResolution(
            "need at least two points with positive outage".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Diversity slope of an empirical ccdf over one decade of theta starting
/// at the smallest grid point with at least 100 outage events.
pub fn diversity_estimate(ccdf: &EmpiricalCcdf) -> Result<DiversityFit> {
    let start = (0..ccdf.len())
        .find(|&i| ccdf.outage_events(i) >= MIN_OUTAGE_EVENTS)
        .ok_or_else(|| {
            Error::InsufficientResolution(format!(
                "no grid point has {MIN_OUTAGE_EVENTS} outage events ({} samples)",
                ccdf.n_samples
            ))
        })?;
    let start_outage = 1.0 - ccdf.probs[start];
    if start_outage > MAX_START_OUTAGE {
        return Err(Error::InsufficientResolution(format!(
            "outage at the fitting start is {start_outage:.3e}; extend the grid or add samples"
        )));
    }
    let end_db = ccdf.theta_db[start] + 10.0 + 1e-9;
    let idx: Vec<usize> = (start..ccdf.len()).take_while(|&i| ccdf.theta_db[i] <= end_db).collect();
    let theta: Vec<f64> = idx.iter().map(|&i| ccdf.theta_linear[i]).collect();
    let outage: Vec<f64> = idx.iter().map(|&i| 1.0 - ccdf.probs[i]).collect();
    Ok(DiversityFit {
        slope: loglog_slope(&theta, &outage)?,
        theta_min: theta[0],
        theta_max: *theta.last().unwrap(),
        points: theta.len(),
    })
}

/// Diversity slope of a closed-form outage function over
/// `[theta_min, 10 theta_min]`, sampled at `points` log-spaced values.
pub fn diversity_estimate_fn<F: Fn(f64) -> f64>(outage: F, theta_min: f64, points: usize) -> Result<f64> {
    let points = points.max(2);
    let theta: Vec<f64> = (0..points)
        .map(|i| theta_min * 10f64.powf(i as f64 / (points - 1) as f64))
        .collect();
    let out: Vec<f64> = theta.iter().map(|&t| outage(t)).collect();
    loglog_slope(&theta, &out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytic::{ccdf_hip_alpha4, ccdf_worstcase_coop3_alpha4};
    use approx::assert_relative_eq;

    fn hip(t: f64) -> f64 {
        ccdf_hip_alpha4(t).unwrap()
    }

    #[test]
    fn default_grid() {
        let g = ThetaGrid::default();
        assert_eq!(g.len(), 121);
        assert_eq!(g.db()[0], -30.0);
        assert_eq!(g.db()[60], 0.0);
        assert_eq!(g.db()[120], 30.0);
        assert_eq!(g.linear()[60], 1.0);
        assert!(ThetaGrid::from_db(vec![1.0, 1.0]).is_err());
        assert!(ThetaGrid::from_db(vec![]).is_err());
    }

    #[test]
    fn counting() {
        let g = ThetaGrid::from_linear(vec![0.5, 2.0, 5.0]).unwrap();
        let c = empirical_ccdf(&[1.0, 2.0, 3.0], &g).unwrap();
        assert_eq!(c.probs, vec![1.0, 1.0 / 3.0, 0.0]);
        assert_eq!(c.n_samples, 3);
        assert!(empirical_ccdf(&[], &g).is_err());
    }

    #[test]
    fn grouped_singletons_match_binomial() {
        let v: Vec<f64> = (1..=50).map(|i| i as f64 / 10.0).collect();
        let g = ThetaGrid::from_linear(vec![0.5, 1.0, 2.5, 4.0]).unwrap();
        let a = empirical_ccdf(&v, &g).unwrap();
        let set = SampleSet::new(v, Some(vec![1; 50]), 0, 0).unwrap();
        let b = empirical_ccdf_grouped(&set, &g).unwrap();
        assert_eq!(a.probs, b.probs);
        for (x, y) in a.stderr.iter().zip(&b.stderr) {
            // batch means uses n-1, binomial uses n
            assert_relative_eq!(x * (50.0f64 / 49.0).sqrt(), *y, max_relative = 1e-12);
        }
    }

    #[test]
    fn empirical_inverse() {
        let g = ThetaGrid::from_linear(vec![1.0, 10.0, 100.0]).unwrap();
        let c = EmpiricalCcdf::from_parts(g, vec![0.9, 0.5, 0.1], vec![0.0; 3], 10).unwrap();
        assert_relative_eq!(c.inverse(0.5).unwrap(), 10.0, max_relative = 1e-12);
        // halfway in probability is halfway in log theta
        assert_relative_eq!(c.inverse(0.7).unwrap(), 10f64.sqrt(), max_relative = 1e-12);
        assert!(matches!(c.inverse(0.95), Err(Error::OutOfRange { .. })));
        assert!(c.inverse(0.9).is_err());
        assert!(c.inverse(0.05).is_err());
    }

    #[test]
    fn analytic_inverse() {
        let f = AnalyticCcdf::new(hip);
        let p = 1.0 / (1.0 + std::f64::consts::FRAC_PI_4);
        assert!((f.inverse(p).unwrap() - 1.0).abs() < 1e-8);
        for p in [1.0 - 1e-3, 1.0 - 1e-4] {
            let t = f.inverse(p).unwrap();
            assert_relative_eq!(t, 1.0 - p, max_relative = 2e-3);
        }
        let mut prev = f64::INFINITY;
        for p in [0.1, 0.3, 0.5, 0.7, 0.9, 0.99] {
            let t = f.inverse(p).unwrap();
            assert!((hip(t) - p).abs() < ANALYTIC_INVERSE_TOL);
            assert!(t < prev);
            prev = t;
        }
        assert!(f.inverse(1.0).is_err());
        assert!(f.inverse(0.0).is_err());
    }

    #[test]
    fn gaps() {
        let a = AnalyticCcdf::new(hip);
        let shifted = AnalyticCcdf::new(|t| hip(t / 2.0));
        for p in [0.2, 0.5, 0.9] {
            assert!(horizontal_gap(&a, &a, p).unwrap().abs() < 1e-9);
            assert!((horizontal_gap(&a, &shifted, p).unwrap() - 3.010_299_956_6).abs() < 1e-8);
        }
        // typical user vs 3-BS cooperation at a vertex: MISR 1 vs 2/3
        let coop = AnalyticCcdf::new(|t| ccdf_worstcase_coop3_alpha4(t).unwrap());
        let g = horizontal_gap(&a, &coop, 0.9999).unwrap();
        assert!((g - to_db(1.5)).abs() < 0.01, "{g}");
    }

    #[test]
    fn diversity_exact_power_law() {
        let theta: Vec<f64> = (0..11).map(|i| 1e-3 * 10f64.powf(i as f64 / 10.0)).collect();
        let out: Vec<f64> = theta.iter().map(|t| t * t).collect();
        assert!((loglog_slope(&theta, &out).unwrap() - 2.0).abs() < 1e-12);

        let grid = ThetaGrid::range_db(-40.0, 0.0, 1.0).unwrap();
        let probs = grid.linear().iter().map(|t| 1.0 - t * t).collect();
        let c = EmpiricalCcdf::from_parts(grid.clone(), probs, vec![0.0; grid.len()], 1 << 40).unwrap();
        let fit = diversity_estimate(&c).unwrap();
        assert!((fit.slope - 2.0).abs() < 1e-6, "{fit:?}");
        assert_eq!(fit.points, 11);
    }

    #[test]
    fn diversity_hip_tends_to_one() {
        let mut last = 0.0;
        for t in [1e-1, 1e-2, 1e-3, 1e-4] {
            let s = diversity_estimate_fn(|x| 1.0 - hip(x), t, 21).unwrap();
            assert!(s > last);
            last = s;
        }
        assert!((last - 1.0).abs() < 1e-2);
    }

    #[test]
    fn diversity_needs_events() {
        let grid = ThetaGrid::range_db(-10.0, 0.0, 1.0).unwrap();
        let c = EmpiricalCcdf::from_parts(grid.clone(), vec![1.0; grid.len()], vec![0.0; grid.len()], 1000).unwrap();
        assert!(matches!(diversity_estimate(&c), Err(Error::InsufficientResolution(_))));
    }
}

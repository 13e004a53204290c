//! Executes a [`RunConfig`]: simulates or evaluates each requested output
//! and writes its artifact.

use std::cell::OnceCell;

use misr_core::analytic::{to_db, ClosedFormCcdf, GainReport, PathLossExponent};
use misr_core::simkernel::{
    diversity_estimate, empirical_ccdf_grouped, horizontal_gap, AnalyticCcdf, Engine,
    EmpiricalCcdf, InvertibleCcdf, MisrEstimate, SampleSet, Scenario, ThetaGrid,
    DEFAULT_WINDOW_POINTS_LOW_ALPHA,
};
use serde::{Deserialize, Serialize};

use crate::config::{OutputKind, Reference, RunConfig};
use crate::error::{CliError, Result};
use crate::output::{ccdf_csv_string, emit, fmt_sig, to_json};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub p: f64,
    pub gain_db: f64,
}

/// JSON body of a gain output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GainSummary {
    #[serde(flatten)]
    pub report: GainReport,
    pub gaps: Vec<GapEntry>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub moment_order: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub moment_gain_db: Option<f64>,
}

/// JSON body of a diversity output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiversitySummary {
    pub slope: f64,
    pub theta_min_db: f64,
    pub theta_max_db: f64,
    pub points: usize,
    pub n_samples: u64,
}

#[derive(Debug, Default)]
pub struct RunReport {
    /// One human-readable line per output.
    pub summaries: Vec<String>,
    /// Artifacts with no path, to be printed on stdout.
    pub stdout: Vec<String>,
    pub warnings: Vec<String>,
}

fn sim<T>(scenario: &Scenario, r: misr_core::Result<T>) -> Result<T> {
    r.map_err(|source| CliError::Simulation {
        fingerprint: scenario.fingerprint(),
        source,
    })
}

/// Simulation results of one scenario, computed on first use.
struct Lazy<'a> {
    scenario: &'a Scenario,
    engine: &'a Engine,
    sir: OnceCell<SampleSet>,
    isr: OnceCell<SampleSet>,
}

impl<'a> Lazy<'a> {
    fn new(scenario: &'a Scenario, engine: &'a Engine) -> Self {
        Lazy {
            scenario,
            engine,
            sir: OnceCell::new(),
            isr: OnceCell::new(),
        }
    }

    fn sir(&self) -> Result<&SampleSet> {
        if self.sir.get().is_none() {
            let s = sim(self.scenario, self.engine.sir_samples(self.scenario))?;
            let _ = self.sir.set(s);
        }
        Ok(self.sir.get().expect("just set"))
    }

    fn isr(&self) -> Result<&SampleSet> {
        if self.isr.get().is_none() {
            let s = sim(self.scenario, self.engine.isr_samples(self.scenario))?;
            let _ = self.isr.set(s);
        }
        Ok(self.isr.get().expect("just set"))
    }

    fn misr(&self) -> Result<MisrEstimate> {
        sim(self.scenario, self.isr()?.mean_of(|x| x))
    }

    fn moment(&self, m: f64) -> Result<MisrEstimate> {
        sim(self.scenario, self.isr()?.mean_of(|x| x.powf(m)))
    }

    fn ccdf(&self, grid: &ThetaGrid) -> Result<EmpiricalCcdf> {
        sim(self.scenario, empirical_ccdf_grouped(self.sir()?, grid))
    }
}

pub fn analytic_ccdf(form: ClosedFormCcdf, alpha: PathLossExponent, grid: &ThetaGrid) -> Result<EmpiricalCcdf> {
    let probs = grid
        .linear()
        .iter()
        .map(|&t| form.eval(alpha, t))
        .collect::<misr_core::Result<Vec<_>>>()?;
    Ok(EmpiricalCcdf::from_parts(grid.clone(), probs, vec![0.0; grid.len()], 0)?)
}

fn scenario_warnings(s: &Scenario, out: &mut Vec<String>) {
    if s.alpha.get() < 3.0 && s.window_points < DEFAULT_WINDOW_POINTS_LOW_ALPHA {
        out.push(format!(
            "alpha = {} with only {} window points: truncation bias is noticeable below alpha = 3 \
             (use at least {DEFAULT_WINDOW_POINTS_LOW_ALPHA})",
            s.alpha.get(),
            s.window_points
        ));
    }
}

fn heavy_tail_warning(label: &str, e: &MisrEstimate, out: &mut Vec<String>) {
    if e.heavy_tail {
        out.push(format!(
            "{label}: the top 1% of samples carry more than half of the estimate; treat it with care"
        ));
    }
}

/// Runs every output of `cfg` in order.
pub fn run(cfg: &RunConfig, engine: &Engine) -> Result<RunReport> {
    cfg.validate()?;
    let mut report = RunReport::default();
    scenario_warnings(&cfg.scenario, &mut report.warnings);
    let main = Lazy::new(&cfg.scenario, engine);
    let reference = match &cfg.reference {
        Some(Reference::Scenario(s)) => {
            scenario_warnings(s, &mut report.warnings);
            Some(Lazy::new(s, engine))
        }
        _ => None,
    };

    for &kind in &cfg.outputs {
        let path = cfg.paths.get(kind);
        let target = path.map(|p| format!(" -> {}", p.display())).unwrap_or_default();
        match kind {
            OutputKind::Misr => {
                let e = main.misr()?;
                heavy_tail_warning("misr", &e, &mut report.warnings);
                report.summaries.push(format!(
                    "misr: {} ± {} ({} samples){target}",
                    fmt_sig(e.mean),
                    fmt_sig(e.stderr),
                    e.n
                ));
                if let Some(p) = path {
                    emit(Some(p), &to_json(&e)?)?;
                }
            }
            OutputKind::Ccdf => {
                let grid = cfg.precision.grid_for(kind);
                let (ccdf, source) = match cfg.analytic_ccdf {
                    Some(form) => (analytic_ccdf(form, cfg.scenario.alpha, &grid)?, form.name().to_string()),
                    None => {
                        let c = main.ccdf(&grid)?;
                        let n = c.n_samples;
                        (c, format!("{n} samples"))
                    }
                };
                report.summaries.push(format!("ccdf: {} thresholds, {source}{target}", ccdf.len()));
                if let Some(text) = emit(path, &ccdf_csv_string(&ccdf)?)? {
                    report.stdout.push(text);
                }
            }
            OutputKind::Gain => {
                let summary = gain(cfg, &main, reference.as_ref())?;
                let gaps: Vec<String> = summary
                    .gaps
                    .iter()
                    .map(|g| format!("p={}: {} dB", fmt_sig(g.p), fmt_sig(g.gain_db)))
                    .collect();
                let moment = match (summary.moment_order, summary.moment_gain_db) {
                    (Some(m), Some(g)) => format!("; order-{} moment gain {} dB", fmt_sig(m), fmt_sig(g)),
                    _ => String::new(),
                };
                report.summaries.push(format!(
                    "gain: {} ({} dB) from MISR; {}{moment}{target}",
                    fmt_sig(summary.report.gain_linear),
                    fmt_sig(summary.report.gain_db),
                    gaps.join(", ")
                ));
                if let Some(p) = path {
                    emit(Some(p), &to_json(&summary)?)?;
                }
            }
            OutputKind::Diversity => {
                let ccdf = main.ccdf(&cfg.precision.grid_for(kind))?;
                let fit = sim(&cfg.scenario, diversity_estimate(&ccdf))?;
                let s = DiversitySummary {
                    slope: fit.slope,
                    theta_min_db: to_db(fit.theta_min),
                    theta_max_db: to_db(fit.theta_max),
                    points: fit.points,
                    n_samples: ccdf.n_samples,
                };
                report.summaries.push(format!(
                    "diversity: slope {} over [{}, {}] dB ({} samples){target}",
                    fmt_sig(s.slope),
                    fmt_sig(s.theta_min_db),
                    fmt_sig(s.theta_max_db),
                    s.n_samples
                ));
                if let Some(p) = path {
                    emit(Some(p), &to_json(&s)?)?;
                }
            }
        }
    }
    Ok(report)
}

fn gain(cfg: &RunConfig, main: &Lazy, reference: Option<&Lazy>) -> Result<GainSummary> {
    let grid = cfg.precision.grid_for(OutputKind::Gain);
    let alpha = cfg.scenario.alpha;
    let scheme_ccdf = main.ccdf(&grid)?;
    let scheme_misr = main.misr()?.mean;
    let m = cfg.precision.moment;
    let mut gaps = Vec::new();
    let (report, moment_gain_db) = match (&cfg.reference, reference) {
        (Some(Reference::Analytic(form)), _) => {
            form.eval(alpha, 1.0)?;
            let f = *form;
            let base = AnalyticCcdf::new(move |t| f.eval(alpha, t).unwrap_or(f64::NAN));
            for &p in &cfg.precision.p {
                gaps.push(gap_entry(&base, &scheme_ccdf, p, &cfg.scenario)?);
            }
            if m != 1.0 {
                return Err(CliError::Usage(
                    "moment-based gains need a simulated reference scenario".into(),
                ));
            }
            (GainReport::from_misrs(form.misr(alpha)?, scheme_misr)?, None)
        }
        (Some(Reference::Scenario(_)), Some(r)) => {
            let base_ccdf = r.ccdf(&grid)?;
            for &p in &cfg.precision.p {
                gaps.push(gap_entry(&base_ccdf, &scheme_ccdf, p, &cfg.scenario)?);
            }
            let moment = if m != 1.0 {
                Some(to_db((r.moment(m)?.mean / main.moment(m)?.mean).powf(1.0 / m)))
            } else {
                None
            };
            (GainReport::from_misrs(r.misr()?.mean, scheme_misr)?, moment)
        }
        _ => return Err(CliError::Usage("gain output needs a reference".into())),
    };
    Ok(GainSummary {
        report,
        gaps,
        moment_order: moment_gain_db.map(|_| m),
        moment_gain_db,
    })
}

fn gap_entry(base: &dyn InvertibleCcdf, scheme: &dyn InvertibleCcdf, p: f64, s: &Scenario) -> Result<GapEntry> {
    Ok(GapEntry {
        p,
        gain_db: sim(s, horizontal_gap(base, scheme, p))?,
    })
}


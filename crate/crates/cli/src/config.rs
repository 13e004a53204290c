//! Run configuration: a TOML file with `[scenario]`, `[reference]` and
//! `[output]` sections, overlaid by command-line flags.
//!
//! ```toml
//! [scenario]
//! deployment = "square"
//! alpha = 4.0
//! realizations = 100000
//! master_seed = 7
//!
//! [reference]            # keys not given here are taken from [scenario]
//! deployment = "ppp"
//!
//! [output]
//! outputs = ["gain"]
//! gain = "gain.json"
//! p = [0.8, 0.9]
//! ```

use std::path::{Path, PathBuf};
use std::str::FromStr;

use misr_core::analytic::{ClosedFormCcdf, PathLossExponent};
use misr_core::fading::FadingModel;
use misr_core::pointfields::TierSpec;
use misr_core::simkernel::{
    default_window_points, DeploymentKind, Scenario, Scheme, ThetaGrid, DEFAULT_GAP_PROBABILITIES,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Keys accepted in `[scenario]` and `[reference]`; each mirrors a
/// [`Scenario`] field.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioKeys {
    pub deployment: Option<String>,
    pub alpha: Option<f64>,
    pub scheme: Option<String>,
    pub fading: Option<String>,
    pub interferer_fading: Option<bool>,
    pub window_points: Option<u32>,
    pub realizations: Option<u64>,
    #[serde(alias = "seed")]
    pub master_seed: Option<u64>,
    /// HIP tiers, e.g. `[{ intensity = 0.9, power = 1.0 }]`.
    pub tiers: Option<Vec<TierSpec>>,
    /// `[reference]` only: compare against a closed-form ccdf instead.
    pub analytic: Option<String>,
}

impl ScenarioKeys {
    /// Keys of `other` replace those of `self` where present. Tiers belong
    /// to a deployment and are not inherited when `other` names its own.
    pub fn overlay(&self, other: &ScenarioKeys) -> ScenarioKeys {
        macro_rules! pick {
            ($($f:ident),*) => { ScenarioKeys { $($f: other.$f.clone().or_else(|| self.$f.clone()),)* } };
        }
        let mut merged = pick!(
            deployment,
            alpha,
            scheme,
            fading,
            interferer_fading,
            window_points,
            realizations,
            master_seed,
            tiers,
            analytic
        );
        if other.deployment.is_some() {
            merged.tiers = other.tiers.clone();
        }
        merged
    }

    pub fn to_scenario(&self) -> std::result::Result<Scenario, (&'static str, String)> {
        let alpha = PathLossExponent::new(self.alpha.unwrap_or(4.0)).map_err(|e| ("alpha", e.to_string()))?;
        let mut s = Scenario::new(alpha).with_window_points(default_window_points(alpha));
        if let Some(d) = &self.deployment {
            s.deployment = DeploymentKind::from_str(d).map_err(|e| ("deployment", e.to_string()))?;
        }
        match (&mut s.deployment, &self.tiers) {
            (DeploymentKind::Hip(t), Some(tiers)) => *t = tiers.clone(),
            (DeploymentKind::Hip(_), None) => {
                return Err(("tiers", "deployment `hip` needs a `tiers` list".into()))
            }
            (_, Some(_)) => return Err(("tiers", "`tiers` is only valid with deployment `hip`".into())),
            _ => {}
        }
        if let Some(x) = &self.scheme {
            s.scheme = Scheme::from_str(x).map_err(|e| ("scheme", e.to_string()))?;
        }
        if let Some(x) = &self.fading {
            s.fading = FadingModel::from_str(x).map_err(|e| ("fading", e.to_string()))?;
        }
        if let Some(x) = self.interferer_fading {
            s.interferer_fading = x;
        }
        if let Some(x) = self.window_points {
            s.window_points = x;
        }
        if let Some(x) = self.realizations {
            s.realizations = x;
        }
        if let Some(x) = self.master_seed {
            s.master_seed = x;
        }
        s.validate().map_err(|e| ("scenario", e.to_string()))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputKeys {
    pub outputs: Option<Vec<String>>,
    pub ccdf: Option<PathBuf>,
    pub misr: Option<PathBuf>,
    pub gain: Option<PathBuf>,
    pub diversity: Option<PathBuf>,
    /// Success probabilities for horizontal gaps.
    pub p: Option<Vec<f64>>,
    pub theta_db_min: Option<f64>,
    pub theta_db_max: Option<f64>,
    pub theta_db_step: Option<f64>,
    /// Moment order for the moment-based gain.
    pub moment: Option<f64>,
    /// Tabulate a closed-form ccdf instead of simulating.
    pub analytic: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub scenario: ScenarioKeys,
    pub reference: Option<ScenarioKeys>,
    #[serde(default)]
    pub output: OutputKeys,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_string(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<(Self, String)> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Ok((ConfigFile::parse(&text, &path.display().to_string())?, text))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputKind {
    Ccdf,
    Misr,
    Gain,
    Diversity,
}

impl FromStr for OutputKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "ccdf" => Ok(OutputKind::Ccdf),
            "misr" => Ok(OutputKind::Misr),
            "gain" => Ok(OutputKind::Gain),
            "diversity" => Ok(OutputKind::Diversity),
            _ => Err(format!("unknown output `{s}` (expected ccdf, misr, gain or diversity)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Reference {
    Scenario(Box<Scenario>),
    Analytic(ClosedFormCcdf),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OutputPaths {
    pub ccdf: Option<PathBuf>,
    pub misr: Option<PathBuf>,
    pub gain: Option<PathBuf>,
    pub diversity: Option<PathBuf>,
}

impl OutputPaths {
    pub fn get(&self, kind: OutputKind) -> Option<&Path> {
        match kind {
            OutputKind::Ccdf => self.ccdf.as_deref(),
            OutputKind::Misr => self.misr.as_deref(),
            OutputKind::Gain => self.gain.as_deref(),
            OutputKind::Diversity => self.diversity.as_deref(),
        }
    }

    pub fn set(&mut self, kind: OutputKind, path: PathBuf) {
        let slot = match kind {
            OutputKind::Ccdf => &mut self.ccdf,
            OutputKind::Misr => &mut self.misr,
            OutputKind::Gain => &mut self.gain,
            OutputKind::Diversity => &mut self.diversity,
        };
        *slot = Some(path);
    }
}

/// Threshold grid for diversity fits: deep enough for 10^7 samples.
pub fn diversity_grid() -> ThetaGrid {
    ThetaGrid::range_db(-60.0, 10.0, 0.25).expect("static grid")
}

/// Threshold grid for horizontal gaps.
pub fn gap_grid() -> ThetaGrid {
    ThetaGrid::range_db(-40.0, 40.0, 0.1).expect("static grid")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Precision {
    /// Overrides the per-output default grid when set.
    pub grid: Option<ThetaGrid>,
    pub p: Vec<f64>,
    pub moment: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Precision {
            grid: None,
            p: DEFAULT_GAP_PROBABILITIES.to_vec(),
            moment: 1.0,
        }
    }
}

impl Precision {
    pub fn grid_for(&self, kind: OutputKind) -> ThetaGrid {
        match (&self.grid, kind) {
            (Some(g), _) => g.clone(),
            (None, OutputKind::Diversity) => diversity_grid(),
            (None, OutputKind::Gain) => gap_grid(),
            (None, _) => ThetaGrid::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scenario: Scenario,
    pub outputs: Vec<OutputKind>,
    pub reference: Option<Reference>,
    pub paths: OutputPaths,
    pub precision: Precision,
    /// When set, the ccdf output tabulates this closed form.
    pub analytic_ccdf: Option<ClosedFormCcdf>,
}

impl RunConfig {
    pub fn new(scenario: Scenario) -> Self {
        RunConfig {
            scenario,
            outputs: Vec::new(),
            reference: None,
            paths: OutputPaths::default(),
            precision: Precision::default(),
            analytic_ccdf: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        if self.outputs.is_empty() {
            return usage("no outputs requested".into());
        }
        if self.outputs.contains(&OutputKind::Gain) && self.reference.is_none() {
            return usage("gain output needs a reference scenario or an analytic reference name".into());
        }
        if self.precision.p.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return usage("success probabilities must lie in (0, 1)".into());
        }
        if !(self.precision.moment > 0.0 && self.precision.moment <= 4.0) {
            return usage(format!("moment order must lie in (0, 4], got {}", self.precision.moment));
        }
        if let Some(Reference::Scenario(r)) = &self.reference {
            r.validate()?;
        }
        self.scenario.validate()?;
        for kind in &self.outputs {
            if let Some(path) = self.paths.get(*kind) {
                let dir = match path.parent() {
                    Some(d) if !d.as_os_str().is_empty() => d,
                    _ => Path::new("."),
                };
                if !dir.is_dir() {
                    return usage(format!("output directory {} does not exist", dir.display()));
                }
            }
        }
        Ok(())
    }
}

/// 1-based line of `key = ...` within `[section]`, for diagnostics.
pub fn line_of(text: &str, section: &str, key: &str) -> Option<usize> {
    let mut current = String::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if t.starts_with('[') {
            current = t.trim_matches(|c| c == '[' || c == ']').trim().to_string();
        } else if current == section {
            if let Some((k, _)) = t.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

/// Builds a scenario from keys, naming the offending field (and its line
/// when the source text is known) on failure.
pub fn scenario_from_keys(keys: &ScenarioKeys, section: &str, origin: &str, text: Option<&str>) -> Result<Scenario> {
    keys.to_scenario().map_err(|(field, message)| {
        let line = text
            .and_then(|t| line_of(t, section, field))
            .map(|l| format!(" (line {l})"))
            .unwrap_or_default();
        CliError::Config {
            path: origin.to_string(),
            message: format!("[{section}] {field}{line}: {message}"),
        }
    })
}

/// Resolves a `[reference]` section: analytic name or scenario keys
/// layered over the main scenario.
pub fn reference_from_keys(
    base: &ScenarioKeys,
    keys: &ScenarioKeys,
    origin: &str,
    text: Option<&str>,
) -> Result<Reference> {
    if let Some(name) = &keys.analytic {
        return ClosedFormCcdf::parse(name)
            .map(Reference::Analytic)
            .ok_or_else(|| CliError::Config {
                path: origin.to_string(),
                message: format!("[reference] analytic: unknown closed form `{name}` (expected hip4 or coop3)"),
            });
    }
    let merged = base.overlay(keys);
    scenario_from_keys(&merged, "reference", origin, text).map(|s| Reference::Scenario(Box::new(s)))
}

/// Reads the `[output]` section into outputs, paths and precision.
pub fn apply_output_keys(cfg: &mut RunConfig, keys: &OutputKeys, origin: &str) -> Result<()> {
    let bad = |field: &str, message: String| CliError::Config {
        path: origin.to_string(),
        message: format!("[output] {field}: {message}"),
    };
    if let Some(list) = &keys.outputs {
        cfg.outputs = list
            .iter()
            .map(|s| OutputKind::from_str(s).map_err(|m| bad("outputs", m)))
            .collect::<Result<_>>()?;
    }
    for (kind, path) in [
        (OutputKind::Ccdf, &keys.ccdf),
        (OutputKind::Misr, &keys.misr),
        (OutputKind::Gain, &keys.gain),
        (OutputKind::Diversity, &keys.diversity),
    ] {
        if let Some(p) = path {
            cfg.paths.set(kind, p.clone());
        }
    }
    if let Some(p) = &keys.p {
        cfg.precision.p = p.clone();
    }
    if let Some(m) = keys.moment {
        cfg.precision.moment = m;
    }
    match (keys.theta_db_min, keys.theta_db_max, keys.theta_db_step) {
        (None, None, None) => {}
        (lo, hi, step) => {
            let grid = ThetaGrid::range_db(lo.unwrap_or(-30.0), hi.unwrap_or(30.0), step.unwrap_or(0.5))
                .map_err(|e| bad("theta_db_*", e.to_string()))?;
            cfg.precision.grid = Some(grid);
        }
    }
    if let Some(name) = &keys.analytic {
        cfg.analytic_ccdf = Some(
            ClosedFormCcdf::parse(name)
                .ok_or_else(|| bad("analytic", format!("unknown closed form `{name}`")))?,
        );
    }
    Ok(())
}

/// Whole-file conversion with no flag overrides.
pub fn run_config_from_file(file: &ConfigFile, origin: &str, text: Option<&str>) -> Result<RunConfig> {
    if file.scenario.analytic.is_some() {
        return Err(CliError::Config {
            path: origin.to_string(),
            message: "[scenario] analytic: only valid in [reference] or [output]".into(),
        });
    }
    let mut cfg = RunConfig::new(scenario_from_keys(&file.scenario, "scenario", origin, text)?);
    if let Some(r) = &file.reference {
        cfg.reference = Some(reference_from_keys(&file.scenario, r, origin, text)?);
    }
    apply_output_keys(&mut cfg, &file.output, origin)?;
    Ok(cfg)
}

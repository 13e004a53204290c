use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use misr_cli::config::{
    reference_from_keys, run_config_from_file, ConfigFile, OutputKind, Reference, ScenarioKeys,
};
use misr_cli::validation::{Corrupted, Exact, Mode, Suite};
use misr_cli::{engine_from_env, run, CliError, Result, RunConfig};
use misr_core::analytic::ClosedFormCcdf;
use misr_core::pointfields::TierSpec;
use misr_core::simkernel::ThetaGrid;

#[derive(Parser)]
#[command(name = "misr", version, about = "MISR, SIR-gain and diversity experiments for cellular networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the mean interference-to-average-signal ratio.
    Misr(Common),
    /// Tabulate the SIR ccdf (simulated, or closed form with --analytic).
    Ccdf {
        #[command(flatten)]
        common: Common,
        /// Closed-form ccdf to tabulate instead of simulating (hip4, coop3).
        #[arg(long)]
        analytic: Option<String>,
        /// Threshold grid in dB as `min:max:step`.
        #[arg(long)]
        grid: Option<String>,
    },
    /// SIR gain of the scenario over a reference.
    Gain {
        #[command(flatten)]
        common: Common,
        /// Reference config file or closed-form name (hip4, coop3).
        #[arg(long)]
        reference: Option<String>,
        /// Success probabilities for horizontal gaps.
        #[arg(long, value_delimiter = ',')]
        p: Option<Vec<f64>>,
        /// Also report the gain from ISR moments of this order.
        #[arg(long)]
        moment: Option<f64>,
    },
    /// Small-threshold log-log slope of the outage probability.
    Diversity(Common),
    /// Run every output declared in the config file.
    Run(Common),
    /// Run the built-in acceptance suite.
    Validate {
        /// Subsampled runs with widened tolerances.
        #[arg(long)]
        fast: bool,
        /// Write the machine-readable report here.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Run only these criteria.
        #[arg(long, value_delimiter = ',')]
        only: Vec<u32>,
        /// Scale one closed-form constant (`name` or `name:factor`) to
        /// check that the suite notices.
        #[arg(long, hide = true)]
        inject_fault: Option<String>,
    },
}

#[derive(Args)]
struct Common {
    /// Config file with [scenario], [reference] and [output] sections.
    #[arg(long, alias = "scenario")]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<u64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// ppp, hip, square or triangular.
    #[arg(long)]
    deployment: Option<String>,
    /// baseline, silence:<n>, worstcase or coop:<n>.
    #[arg(long)]
    scheme: Option<String>,
    /// none, rayleigh or nakagami:<m>.
    #[arg(long)]
    fading: Option<String>,
    /// Expected number of base stations in the simulation window.
    #[arg(long)]
    window_points: Option<u32>,
    /// HIP tiers as `intensity:power,...`.
    #[arg(long)]
    tiers: Option<String>,
    /// Apply fading to interfering links too (true or false).
    #[arg(long)]
    interferer_fading: Option<bool>,
    /// Output file; stdout for CSV when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn parse_tiers(s: &str) -> Result<Vec<TierSpec>> {
    s.split(',')
        .map(|t| {
            let (l, p) = t
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("tier `{t}` must be intensity:power")))?;
            let num = |x: &str| x.trim().parse::<f64>().map_err(|_| CliError::Usage(format!("bad number `{x}`")));
            Ok(TierSpec::new(num(l)?, num(p)?)?)
        })
        .collect()
}

impl Common {
    fn overrides(&self) -> Result<ScenarioKeys> {
        Ok(ScenarioKeys {
            deployment: self.deployment.clone(),
            alpha: self.alpha,
            scheme: self.scheme.clone(),
            fading: self.fading.clone(),
            interferer_fading: self.interferer_fading,
            window_points: self.window_points,
            realizations: self.realizations,
            master_seed: self.seed,
            tiers: self.tiers.as_deref().map(parse_tiers).transpose()?,
            analytic: None,
        })
    }

    /// Config file (if any) overlaid with flags; the subcommand's output
    /// kind replaces the file's output list unless `kind` is None.
    fn build(&self, kind: Option<OutputKind>) -> Result<RunConfig> {
        let (file, text, origin) = match &self.config {
            Some(p) => {
                let (f, t) = ConfigFile::load(p)?;
                (f, Some(t), p.display().to_string())
            }
            None => (ConfigFile::default(), None, "<flags>".to_string()),
        };
        let flags = self.overrides()?;
        let mut merged = file.clone();
        merged.scenario = file.scenario.overlay(&flags);
        // flags that fix the experiment size and randomness apply to the reference too
        merged.reference = file.reference.as_ref().map(|r| {
            r.overlay(&ScenarioKeys {
                alpha: flags.alpha,
                realizations: flags.realizations,
                master_seed: flags.master_seed,
                ..Default::default()
            })
        });
        let mut cfg = run_config_from_file(&merged, &origin, text.as_deref())?;
        if let Some(kind) = kind {
            cfg.outputs = vec![kind];
            if let Some(out) = &self.out {
                cfg.paths.set(kind, out.clone());
            }
        } else if self.out.is_some() {
            return Err(CliError::Usage("use the [output] section to name files for `run`".into()));
        }
        Ok(cfg)
    }
}

fn parse_grid(s: &str) -> Result<ThetaGrid> {
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| CliError::Usage(format!("grid `{s}` must be min:max:step in dB")))?;
    match parts[..] {
        [lo, hi, step] => Ok(ThetaGrid::range_db(lo, hi, step)?),
        _ => Err(CliError::Usage(format!("grid `{s}` must be min:max:step in dB"))),
    }
}

fn resolve_reference(cfg: &mut RunConfig, common: &Common, spec: &str) -> Result<()> {
    let path = Path::new(spec);
    if !path.exists() {
        if let Some(form) = ClosedFormCcdf::parse(spec) {
            cfg.reference = Some(Reference::Analytic(form));
            return Ok(());
        }
        return Err(CliError::Usage(format!(
            "reference `{spec}` is neither a file nor a closed-form name (hip4, coop3)"
        )));
    }
    let (file, text) = ConfigFile::load(path)?;
    let origin = path.display().to_string();
    // the reference file's [scenario] is the reference; shared flags still apply
    let flags = common.overrides()?;
    let keys = file.scenario.overlay(&ScenarioKeys {
        alpha: flags.alpha,
        realizations: flags.realizations,
        master_seed: flags.master_seed,
        ..Default::default()
    });
    cfg.reference = Some(reference_from_keys(&ScenarioKeys::default(), &keys, &origin, Some(&text))?);
    Ok(())
}

fn execute(cfg: &RunConfig) -> Result<()> {
    let engine = engine_from_env()?;
    let report = run(cfg, &engine)?;
    for w in &report.warnings {
        eprintln!("warning: {w}");
    }
    for text in &report.stdout {
        print!("{text}");
    }
    for line in &report.summaries {
        if report.stdout.is_empty() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(())
}

fn validate(fast: bool, json: Option<PathBuf>, only: Vec<u32>, fault: Option<String>) -> Result<bool> {
    let engine = engine_from_env()?;
    let mode = if fast { Mode::Fast } else { Mode::Full };
    let corrupted = match fault {
        None => None,
        Some(spec) => {
            let (name, factor) = match spec.split_once(':') {
                Some((n, f)) => (n, f.parse().map_err(|_| CliError::Usage(format!("bad factor in `{spec}`")))?),
                None => (spec.as_str(), 1.05),
            };
            Some(Corrupted {
                constant: name.parse().map_err(CliError::Usage)?,
                factor,
            })
        }
    };
    let forms: &dyn misr_cli::validation::ClosedForms = match &corrupted {
        Some(c) => c,
        None => &Exact,
    };
    let report = Suite::new(mode, engine, forms).run(&only, |c| println!("{}", c.render()));
    let failed = report.criteria.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} criteria passed ({:?} mode)",
        report.criteria.len() - failed,
        report.criteria.len(),
        report.mode
    );
    if let Some(p) = json {
        std::fs::write(&p, misr_cli::output::to_json(&report)?).map_err(|e| CliError::io(&p, e))?;
    }
    Ok(report.passed)
}

fn main_inner(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Misr(c) => execute(&c.build(Some(OutputKind::Misr))?)?,
        Command::Diversity(c) => execute(&c.build(Some(OutputKind::Diversity))?)?,
        Command::Run(c) => execute(&c.build(None)?)?,
        Command::Ccdf { common, analytic, grid } => {
            let mut cfg = common.build(Some(OutputKind::Ccdf))?;
            if let Some(name) = analytic {
                cfg.analytic_ccdf = Some(
                    ClosedFormCcdf::parse(&name)
                        .ok_or_else(|| CliError::Usage(format!("unknown closed form `{name}` (hip4, coop3)")))?,
                );
            }
            if let Some(g) = grid {
                cfg.precision.grid = Some(parse_grid(&g)?);
            }
            execute(&cfg)?
        }
        Command::Gain {
            common,
            reference,
            p,
            moment,
        } => {
            let mut cfg = common.build(Some(OutputKind::Gain))?;
            if let Some(r) = reference {
                resolve_reference(&mut cfg, &common, &r)?;
            }
            if let Some(p) = p {
                cfg.precision.p = p;
            }
            if let Some(m) = moment {
                cfg.precision.moment = m;
            }
            execute(&cfg)?
        }
        Command::Validate {
            fast,
            json,
            only,
            inject_fault,
        } => return validate(fast, json, only, inject_fault),
    }
    Ok(true)
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

//! Command-line front end for `hopf-lab`: configuration parsing, subcommand
//! dispatch and report emission.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use commands::{run_command, Failure};
pub use config::{parse_config, CommandKind, ConfigError, RunConfig};

use config::{
    parse_raw, validate, DirectionChoice, RawAnalyze, RawConfig, RawCycle, RawOutput, RawPredPrey, RawSweep,
    RawSystem, RawTolerances,
};

#[derive(Debug, Parser)]
#[command(name = "hopf-lab", version, about = "Hopf bifurcation analysis toolkit")]
pub struct Cli {
    /// TOML run configuration; command-line flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Locate Hopf points, compute H11/H22, classify and predict branches.
    Analyze(AnalyzeArgs),
    /// Predator–prey report at λ*: geometry, conditions, H11/H22.
    Predprey(PredPreyArgs),
    /// Amplitude sweep over a λ grid (CSV).
    Sweep(SweepArgs),
    /// A single periodic orbit with Floquet data (JSON).
    Cycle(CycleArgs),
}

#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Built-in system label.
    #[arg(long)]
    pub system: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub tau_trans: Option<f64>,
    #[arg(long)]
    pub tau_deg: Option<f64>,
    #[arg(long)]
    pub tau_coeff: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Default, Args)]
pub struct PredPreyArgs {
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, allow_negative_numbers = true)]
    pub d1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub d2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Domain length (0, ℓπ) used for the list of Hopf points; defaults to ℓₙ.
    #[arg(long)]
    pub ell: Option<f64>,
    /// Critical mode index.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub tau_trans: Option<f64>,
    #[arg(long)]
    pub tau_deg: Option<f64>,
    #[arg(long)]
    pub tau_coeff: Option<f64>,
}

#[derive(Debug, Default, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// λ grid: LO HI COUNT.
    #[arg(long, num_args = 3, value_names = ["LO", "HI", "COUNT"], allow_negative_numbers = true)]
    pub grid: Option<Vec<f64>>,
    /// Window searched for the Hopf point the sweep is seeded from.
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
}

#[derive(Debug, Default, Args)]
pub struct CycleArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Initial modal amplitude r of the seed.
    #[arg(long)]
    pub amplitude: Option<f64>,
    #[arg(long, value_enum)]
    pub direction: Option<DirectionArg>,
    #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true)]
    pub window: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
pub enum DirectionArg {
    Auto,
    Forward,
    Backward,
}

fn pair(v: &[f64]) -> [f64; 2] {
    [v[0], v[1]]
}

fn apply_common(raw: &mut RawConfig, c: &CommonArgs) {
    if let Some(label) = &c.system {
        raw.system = Some(RawSystem {
            label: Some(label.clone()),
            ..RawSystem::default()
        });
    }
    apply_misc(raw, c.seed, c.output.clone(), [c.tau_trans, c.tau_deg, c.tau_coeff]);
}

fn apply_misc(raw: &mut RawConfig, seed: Option<u64>, output: Option<PathBuf>, taus: [Option<f64>; 3]) {
    if seed.is_some() {
        raw.seed = seed;
    }
    if output.is_some() {
        raw.output = Some(RawOutput { path: output });
    }
    let t = raw.tolerances.get_or_insert_with(RawTolerances::default);
    let [a, b, c] = taus;
    t.tau_trans = a.or(t.tau_trans);
    t.tau_deg = b.or(t.tau_deg);
    t.tau_coeff = c.or(t.tau_coeff);
}

fn merge(raw: &mut RawConfig, command: &Command) -> Result<CommandKind, ConfigError> {
    Ok(match command {
        Command::Analyze(a) => {
            apply_common(raw, &a.common);
            let an = raw.analyze.get_or_insert_with(RawAnalyze::default);
            if let Some(w) = &a.window {
                an.window = Some(pair(w));
            }
            an.grid_points = a.grid_points.or(an.grid_points);
            CommandKind::Analyze
        }
        Command::Predprey(p) => {
            apply_misc(raw, p.seed, p.output.clone(), [p.tau_trans, p.tau_deg, p.tau_coeff]);
            let flags = [p.d1, p.d2, p.k, p.theta, p.ell];
            if flags.iter().any(Option::is_some) || p.n.is_some() {
                let sys = raw.system.get_or_insert_with(RawSystem::default);
                // flags select the predator–prey source over any other
                sys.label = None;
                sys.polynomial = None;
                let pp = sys.predprey.get_or_insert_with(RawPredPrey::default);
                pp.d1 = p.d1.or(pp.d1);
                pp.d2 = p.d2.or(pp.d2);
                pp.k = p.k.or(pp.k);
                pp.theta = p.theta.or(pp.theta);
                pp.ell = p.ell.or(pp.ell);
                pp.n = p.n.or(pp.n);
            }
            CommandKind::Predprey
        }
        Command::Sweep(s) => {
            apply_common(raw, &s.common);
            let sw = raw.sweep.get_or_insert_with(RawSweep::default);
            if let Some(g) = &s.grid {
                let count = g[2];
                if !(count >= 1.0 && count.fract() == 0.0 && count <= 1e6) {
                    return Err(ConfigError {
                        line: None,
                        message: format!("--grid COUNT must be a positive integer (got {count})"),
                    });
                }
                sw.grid = Some((g[0], g[1], count as usize));
            }
            if let Some(w) = &s.window {
                sw.window = Some(pair(w));
            }
            CommandKind::Sweep
        }
        Command::Cycle(c) => {
            apply_common(raw, &c.common);
            let cy = raw.cycle.get_or_insert_with(RawCycle::default);
            cy.lambda = c.lambda.or(cy.lambda);
            cy.amplitude = c.amplitude.or(cy.amplitude);
            if let Some(d) = c.direction {
                cy.direction = Some(match d {
                    DirectionArg::Auto => DirectionChoice::Auto,
                    DirectionArg::Forward => DirectionChoice::Forward,
                    DirectionArg::Backward => DirectionChoice::Backward,
                });
            }
            if let Some(w) = &c.window {
                cy.window = Some(pair(w));
            }
            CommandKind::Cycle
        }
    })
}

/// Resolves the parsed command line (plus optional config file) into a
/// validated configuration and the command to run.
pub fn resolve(cli: &Cli) -> Result<(RunConfig, CommandKind), Failure> {
    let text = match &cli.config {
        Some(path) => Some(std::fs::read_to_string(path).map_err(|e| {
            Failure::Config(ConfigError {
                line: None,
                message: format!("cannot read {}: {e}", path.display()),
            })
        })?),
        None => None,
    };
    let mut raw = match &text {
        Some(t) => parse_raw(t)?,
        None => RawConfig::default(),
    };
    let command = match &cli.command {
        Some(c) => merge(&mut raw, c)?,
        None => raw.command.ok_or_else(|| {
            Failure::Config(ConfigError {
                line: None,
                message: "no subcommand given and the configuration names no command".into(),
            })
        })?,
    };
    let cfg = validate(&raw, text.as_deref())?;
    Ok((cfg, command))
}

/// Applies `HOPF_LAB_THREADS` to the global rayon pool.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("HOPF_LAB_THREADS") else {
        return Ok(());
    };
    let n: usize = value.trim().parse().ok().filter(|n| *n > 0).ok_or_else(|| {
        Failure::Config(ConfigError {
            line: None,
            message: format!("HOPF_LAB_THREADS must be a positive integer (got '{value}')"),
        })
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Failure::Numerical(format!("thread pool: {e}")))
}

/// Full program: parse, resolve, run and emit. Returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let outcome = configure_threads()
        .and_then(|_| resolve(&cli))
        .and_then(|(cfg, cmd)| run_command(&cfg, cmd).map(|bytes| (cfg, bytes)));
    match outcome {
        Ok((cfg, bytes)) => match emit(cfg.output.as_deref(), &bytes) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("hopf-lab: cannot write report: {e}");
                2
            }
        },
        Err(f) => {
            eprintln!("hopf-lab: {f}");
            f.exit_code()
        }
    }
}

fn emit(path: Option<&std::path::Path>, bytes: &[u8]) -> std::io::Result<()> {
    use std::io::Write;
    match path {
        Some(p) => std::fs::write(p, bytes),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}

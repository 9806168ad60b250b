//! Subcommand runners. Each returns the bytes of its report.

use hopf_lab::dynamics::{
    amplitude_sweep, find_limit_cycle, monodromy, CycleOptions, IntegratorOptions, ModalFrame, SweepPlan,
    TimeDirection,
};
use hopf_lab::hopf::{analyze_point, Classification, ConditionCheck, Stability};
use hopf_lab::predprey::{report, PredPreyReport};
use hopf_lab::spectral::{locate_hopf, HopfCandidate, LocateOptions};
use hopf_lab::{Analysis, Cycle, Floquet, HopfError, System, Tolerances};
use serde::Serialize;

use crate::config::{CommandKind, ConfigError, DirectionChoice, RunConfig, SystemSource};
use crate::format::{sweep_csv, to_json};

const TOOL: &str = "hopf-lab";

/// Why a command did not produce its report, mapped onto exit codes.
#[derive(Debug)]
pub enum Failure {
    /// Invalid configuration or arguments (exit 2).
    Config(ConfigError),
    /// A numerical routine failed (exit 3).
    Numerical(String),
    /// No Hopf candidate in the requested window (exit 4).
    NoCandidate(String),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Config(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::NoCandidate(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Config(e) => write!(f, "configuration error: {e}"),
            Failure::Numerical(m) => write!(f, "numerical failure: {m}"),
            Failure::NoCandidate(m) => write!(f, "no Hopf candidate: {m}"),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

impl From<HopfError> for Failure {
    fn from(e: HopfError) -> Self {
        match e {
            HopfError::InvalidArgument(m) => Failure::Config(ConfigError { line: None, message: m }),
            other => Failure::Numerical(other.to_string()),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure::Config(ConfigError {
        line: None,
        message: message.into(),
    })
}

fn json<S: Serialize>(value: &S) -> Result<Vec<u8>, Failure> {
    to_json(value).map_err(|e| Failure::Numerical(format!("serialization failed: {e}")))
}

/// Runs `command` for a validated configuration.
pub fn run_command(cfg: &RunConfig, command: CommandKind) -> Result<Vec<u8>, Failure> {
    match command {
        CommandKind::Analyze => analyze(cfg),
        CommandKind::Predprey => predprey(cfg),
        CommandKind::Sweep => sweep(cfg),
        CommandKind::Cycle => cycle(cfg),
    }
}

#[derive(Serialize)]
struct AnalyzeReport<'a> {
    tool: &'static str,
    command: &'static str,
    system: String,
    seed: u64,
    window: (f64, f64),
    locate: LocateOptions<f64>,
    tolerances: &'a Tolerances,
    candidates: Vec<HopfCandidate<f64>>,
    analyses: Vec<Analysis>,
}

fn locate_options(cfg: &RunConfig) -> LocateOptions<f64> {
    LocateOptions {
        grid_points: cfg.grid_points,
        tau_deg: cfg.tolerances.tau_deg,
        ..LocateOptions::default()
    }
}

fn candidates(cfg: &RunConfig, sys: &System) -> Result<((f64, f64), Vec<HopfCandidate<f64>>), Failure> {
    let window = cfg.window.unwrap_or(sys.window());
    let found = locate_hopf(sys, window, &locate_options(cfg))?;
    if found.is_empty() {
        return Err(Failure::NoCandidate(format!(
            "no purely imaginary eigenvalue pair of {} in [{}, {}]",
            sys.label(),
            window.0,
            window.1
        )));
    }
    Ok((window, found))
}

fn analyze(cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
    let sys = cfg.build_system()?;
    let (window, found) = candidates(cfg, &sys)?;
    let analyses = found
        .iter()
        .map(|c| analyze_point(&sys, c.lambda0, c.kappa0, &cfg.tolerances))
        .collect::<hopf_lab::Result<Vec<_>>>()?;
    json(&AnalyzeReport {
        tool: TOOL,
        command: "analyze",
        system: cfg.system_label(),
        seed: cfg.seed,
        window,
        locate: locate_options(cfg),
        tolerances: &cfg.tolerances,
        candidates: found,
        analyses,
    })
}

#[derive(Serialize)]
struct PredPreyCommandReport<'a> {
    tool: &'static str,
    command: &'static str,
    seed: u64,
    tolerances: &'a Tolerances,
    report: PredPreyReport<f64>,
}

fn predprey(cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
    let SystemSource::Predprey(src) = &cfg.system else {
        return Err(usage("the predprey command needs a predator–prey system (d1, d2, k, theta)"));
    };
    let rep = report(&src.params, src.n, Some(src.params.ell), &cfg.tolerances)?;
    json(&PredPreyCommandReport {
        tool: TOOL,
        command: "predprey",
        seed: cfg.seed,
        tolerances: &cfg.tolerances,
        report: rep,
    })
}

/// The candidate closest to `target`, analyzed.
fn nearest_analysis(cfg: &RunConfig, sys: &System, target: f64) -> Result<Analysis, Failure> {
    let (_, found) = candidates(cfg, sys)?;
    let best = found
        .iter()
        .min_by(|a, b| {
            (a.lambda0 - target)
                .abs()
                .partial_cmp(&(b.lambda0 - target).abs())
                .unwrap()
        })
        .unwrap();
    Ok(analyze_point(sys, best.lambda0, best.kappa0, &cfg.tolerances)?)
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![lo];
    }
    let step = (hi - lo) / (count - 1) as f64;
    (0..count)
        .map(|i| if i + 1 == count { hi } else { lo + step * i as f64 })
        .collect()
}

fn sweep(cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
    let (lo, hi, count) = cfg
        .sweep_grid
        .ok_or_else(|| usage("sweep needs a λ grid (--grid LO HI COUNT or [sweep] grid)"))?;
    let sys = cfg.build_system()?;
    let analysis = nearest_analysis(cfg, &sys, 0.5 * (lo + hi))?;
    let plan = SweepPlan {
        prediction: analysis.prediction.as_ref(),
        classification: Some(&analysis.classification),
    };
    let rows = amplitude_sweep(
        &sys,
        &linspace(lo, hi, count),
        &ModalFrame::from(&analysis),
        &plan,
        &CycleOptions::default(),
    );
    sweep_csv(&rows).map_err(|e| Failure::Numerical(format!("CSV output failed: {e}")))
}

#[derive(Serialize)]
struct CycleSamples<'a> {
    period: f64,
    amplitude_r: f64,
    closure: f64,
    /// Phase of each sample as a fraction of the period.
    phase: Vec<f64>,
    samples: &'a [Vec<f64>],
}

#[derive(Serialize)]
struct CycleReport<'a> {
    tool: &'static str,
    command: &'static str,
    system: String,
    seed: u64,
    lambda: f64,
    lambda0: f64,
    kappa0: f64,
    direction: TimeDirection,
    seed_amplitude: f64,
    classification: &'a Classification,
    conditions: &'a [ConditionCheck],
    tolerances: &'a Tolerances,
    cycle: CycleSamples<'a>,
    floquet: Floquet,
}

fn directions(choice: DirectionChoice, class: &Classification) -> Vec<TimeDirection> {
    match choice {
        DirectionChoice::Forward => vec![TimeDirection::Forward],
        DirectionChoice::Backward => vec![TimeDirection::Backward],
        DirectionChoice::Auto => match class.stability_cycle {
            Some(Stability::Stable) => vec![TimeDirection::Forward],
            Some(Stability::Unstable) => vec![TimeDirection::Backward],
            None => vec![TimeDirection::Backward, TimeDirection::Forward],
        },
    }
}

fn cycle(cfg: &RunConfig) -> Result<Vec<u8>, Failure> {
    let lambda = cfg
        .cycle_lambda
        .ok_or_else(|| usage("cycle needs a parameter value (--lambda or [cycle] lambda)"))?;
    let sys = cfg.build_system()?;
    let analysis = nearest_analysis(cfg, &sys, lambda)?;
    let amp = match cfg.cycle_amplitude {
        Some(a) => a,
        None => analysis
            .prediction
            .as_ref()
            .and_then(|p| p.amplitude_at(analysis.lambda0, lambda))
            .filter(|a| *a > 0.0)
            .unwrap_or_else(|| (lambda - analysis.lambda0).abs().sqrt().max(1e-3)),
    };
    let frame = ModalFrame::from(&analysis);
    let copts = CycleOptions::default();
    let mut found: Option<(Cycle, TimeDirection)> = None;
    let mut last = String::from("no direction tried");
    for dir in directions(cfg.direction, &analysis.classification) {
        match find_limit_cycle(&sys, lambda, &frame, amp, dir, &copts) {
            Ok(c) => {
                found = Some((c, dir));
                break;
            }
            Err(e) => last = e.to_string(),
        }
    }
    let (cyc, dir) = found.ok_or(Failure::Numerical(last))?;
    let floquet = monodromy(&sys, lambda, &cyc, &IntegratorOptions::new(copts.shoot_rtol, copts.shoot_atol))?;
    let m = cyc.samples.len();
    json(&CycleReport {
        tool: TOOL,
        command: "cycle",
        system: cfg.system_label(),
        seed: cfg.seed,
        lambda,
        lambda0: analysis.lambda0,
        kappa0: analysis.kappa0,
        direction: dir,
        seed_amplitude: amp,
        classification: &analysis.classification,
        conditions: &analysis.conditions,
        tolerances: &cfg.tolerances,
        cycle: CycleSamples {
            period: cyc.period,
            amplitude_r: cyc.amplitude_r,
            closure: cyc.closure,
            phase: (0..m).map(|j| j as f64 / m as f64).collect(),
            samples: &cyc.samples,
        },
        floquet,
    })
}

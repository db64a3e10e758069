//! Subcommands of the `fermi-ghz` binary.
//!
//! Every command writes its data files atomically into an output directory,
//! followed by a `manifest.json` describing the run. Data files depend only
//! on the flags and seed; the manifest additionally records wall-clock time.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use fermi_ghz::amplitude::Sign;
use fermi_ghz::hv_models::{
    compare_to_quantum, exchangeability_report, run_asymmetric, verify_theorem, AsymmetricConfig,
    LocalResponses, ParityTarget, ResponseTable,
};
use fermi_ghz::measurement::{outcome_distribution, parity_expectation, Outcome, STATION_NAMES};
use fermi_ghz::optics::{simulate, CircuitConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_COUNTEREXAMPLE: u8 = 2;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Parser)]
#[command(name = "fermi-ghz", version, about = "Three-source fermionic interferometer and hidden-variable testbed")]
pub struct Cli {
    /// Output directory for all written files.
    #[arg(long, global = true, env = "FERMI_GHZ_OUT", default_value = ".")]
    pub out: PathBuf,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the interferometer once and write its outcome distribution.
    Simulate(SimulateArgs),
    /// Sweep the effective phase over a uniform grid on [0, 2π].
    Sweep(SweepArgs),
    /// Exhaustively check symmetric local+non-local strategies.
    HvSym(HvSymArgs),
    /// Sample the asymmetric model and compare it with the interferometer.
    HvAsym(HvAsymArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct SimulateArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long)]
    pub beta: f64,
    #[arg(long)]
    pub gamma: f64,
    /// Read angles in degrees instead of radians.
    #[arg(long)]
    pub degrees: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SweepArgs {
    /// Number of grid points, endpoints included.
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..))]
    pub steps: u32,
}

#[derive(Debug, Clone, Args, Serialize)]
#[command(allow_negative_numbers = true)]
pub struct HvSymArgs {
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub parties: u32,
    /// Size of every party's local hidden-variable domain.
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub domain_size: u32,
    /// Required product of all results: +1 or -1.
    #[arg(long, value_parser = parse_parity)]
    pub parity: i8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum AsymMode {
    FairCoin,
    Tables,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
pub enum Station {
    D,
    E,
    F,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct HvAsymArgs {
    /// Parity flag: 0 for product +1, 1 for product -1.
    #[arg(long, value_parser = clap::value_parser!(u8).range(0..=1))]
    pub q: u8,
    #[arg(long, value_enum, default_value = "fair-coin")]
    pub mode: AsymMode,
    /// Number of trials.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Station whose result is enforced by the parity law.
    #[arg(long, value_enum, default_value = "f")]
    pub enforced: Station,
    /// Response table of the first independent station, e.g. "+-+" (tables mode).
    #[arg(long, allow_hyphen_values = true)]
    pub table_i: Option<String>,
    /// Response table of the second independent station (tables mode).
    #[arg(long, allow_hyphen_values = true)]
    pub table_j: Option<String>,
}

fn parse_parity(s: &str) -> Result<i8, String> {
    match s {
        "+1" | "1" | "+" => Ok(1),
        "-1" | "-" => Ok(-1),
        _ => Err(format!("parity must be +1 or -1, got {s:?}")),
    }
}

/// Record of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub parameters: serde_json::Value,
    pub seed: Option<u64>,
    pub version: String,
    pub outputs: Vec<String>,
    pub duration_ms: f64,
}

/// Files written and the process exit status a command asks for.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub exit_code: u8,
    pub files: Vec<PathBuf>,
}

struct Output<'a> {
    dir: &'a Path,
    written: Vec<String>,
}

impl<'a> Output<'a> {
    fn new(dir: &'a Path) -> anyhow::Result<Self> {
        std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        Ok(Output {
            dir,
            written: Vec::new(),
        })
    }

    /// Writes via a temp file in the same directory, then renames.
    fn write(&mut self, name: &str, contents: &str) -> anyhow::Result<()> {
        let target = self.dir.join(name);
        let mut tmp = tempfile::NamedTempFile::new_in(self.dir)
            .with_context(|| format!("creating temp file in {}", self.dir.display()))?;
        tmp.write_all(contents.as_bytes())?;
        tmp.persist(&target)
            .with_context(|| format!("writing {}", target.display()))?;
        self.written.push(name.to_owned());
        Ok(())
    }

    fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, &text)
    }

    fn finish(
        mut self,
        command: &str,
        parameters: impl Serialize,
        seed: Option<u64>,
        started: Instant,
        exit_code: u8,
    ) -> anyhow::Result<RunReport> {
        let manifest = RunManifest {
            command: command.to_owned(),
            parameters: serde_json::to_value(parameters)?,
            seed,
            version: env!("CARGO_PKG_VERSION").to_owned(),
            outputs: self.written.clone(),
            duration_ms: started.elapsed().as_secs_f64() * 1e3,
        };
        self.write_json(MANIFEST_FILE, &manifest)?;
        Ok(RunReport {
            exit_code,
            files: self.written.iter().map(|n| self.dir.join(n)).collect(),
        })
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<RunReport> {
    match &cli.command {
        Command::Simulate(args) => cmd_simulate(args, &cli.out),
        Command::Sweep(args) => cmd_sweep(args, &cli.out),
        Command::HvSym(args) => cmd_hv_sym(args, &cli.out),
        Command::HvAsym(args) => cmd_hv_asym(args, &cli.out),
    }
}

#[derive(Serialize)]
struct SimulateSummary {
    alpha: f64,
    beta: f64,
    gamma: f64,
    theta: f64,
    theta_reduced: f64,
    keep_probability: f64,
    parity_expectation: f64,
    marginals_plus: Vec<f64>,
}

/// Writes `distribution.json`, `distribution.csv` and `summary.json`.
pub fn cmd_simulate(args: &SimulateArgs, out: &Path) -> anyhow::Result<RunReport> {
    let started = Instant::now();
    let to_rad = |x: f64| if args.degrees { x.to_radians() } else { x };
    let config = CircuitConfig::new(to_rad(args.alpha), to_rad(args.beta), to_rad(args.gamma));
    if !config.is_finite() {
        bail!("angles must be finite");
    }
    let run = simulate(&config);
    let dist = outcome_distribution(&run.final_state)?;
    let summary = SimulateSummary {
        alpha: config.alpha,
        beta: config.beta,
        gamma: config.gamma,
        theta: config.theta(),
        theta_reduced: config.theta_reduced(),
        keep_probability: run.keep_probability,
        parity_expectation: parity_expectation(&dist),
        marginals_plus: (0..dist.station_count()).map(|s| dist.marginal_plus(s)).collect(),
    };

    let mut output = Output::new(out)?;
    let mut json = dist.to_json()?;
    json.push('\n');
    output.write("distribution.json", &json)?;
    output.write("distribution.csv", &dist.to_csv()?)?;
    output.write_json("summary.json", &summary)?;
    output.finish("simulate", args, None, started, EXIT_OK)
}

/// Grid `θ_k = 2πk/(steps−1)`, `k = 0..steps`.
pub fn sweep_grid(steps: u32) -> Vec<f64> {
    let last = f64::from(steps - 1);
    (0..steps).map(|k| TAU * f64::from(k) / last).collect()
}

/// Writes `sweep.csv`: `theta,parity` then one probability column per outcome.
pub fn cmd_sweep(args: &SweepArgs, out: &Path) -> anyhow::Result<RunReport> {
    let started = Instant::now();
    if args.steps < 2 {
        bail!("sweep needs at least 2 steps");
    }
    let outcomes: Vec<Outcome> = Outcome::all(STATION_NAMES.len()).collect();
    let mut csv = String::from("theta,parity");
    for o in &outcomes {
        write!(csv, ",p{o}")?;
    }
    csv.push('\n');
    for theta in sweep_grid(args.steps) {
        let dist = outcome_distribution(&simulate(&CircuitConfig::from_theta(theta)).final_state)?;
        write!(csv, "{theta},{}", parity_expectation(&dist))?;
        for o in &outcomes {
            write!(csv, ",{}", dist.probability(o))?;
        }
        csv.push('\n');
    }
    let mut output = Output::new(out)?;
    output.write("sweep.csv", &csv)?;
    output.finish("sweep", args, None, started, EXIT_OK)
}

/// Writes `theorem.json`; exit code 2 if a non-constant strategy satisfies
/// the parity law.
pub fn cmd_hv_sym(args: &HvSymArgs, out: &Path) -> anyhow::Result<RunReport> {
    let started = Instant::now();
    let target = ParityTarget::from_sign(if args.parity > 0 { Sign::Plus } else { Sign::Minus });
    let sizes = vec![args.domain_size as usize; args.parties as usize];
    // fails before any file is written
    let report = verify_theorem(&sizes, target)?;
    let exit = if report.all_constant {
        EXIT_OK
    } else {
        EXIT_COUNTEREXAMPLE
    };
    let mut output = Output::new(out)?;
    output.write_json("theorem.json", &report)?;
    output.finish("hv-sym", args, None, started, exit)
}

/// Writes `samples.csv`, `exchangeability.json` and `divergence.json`.
pub fn cmd_hv_asym(args: &HvAsymArgs, out: &Path) -> anyhow::Result<RunReport> {
    let started = Instant::now();
    let target = ParityTarget::from_q(i64::from(args.q))?;
    let responses = match args.mode {
        AsymMode::FairCoin => LocalResponses::FairCoin,
        AsymMode::Tables => {
            let (Some(i), Some(j)) = (&args.table_i, &args.table_j) else {
                bail!("tables mode needs --table-i and --table-j");
            };
            LocalResponses::Tables {
                first: i.parse::<ResponseTable>()?,
                second: j.parse::<ResponseTable>()?,
            }
        }
    };
    let enforced = args.enforced as usize;
    let independent = match enforced {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    };
    let cfg = AsymmetricConfig::new(independent, enforced, target, responses)?;

    let run = run_asymmetric(&cfg, args.seed, args.n);
    let exchange = exchangeability_report(&run.outcomes, target)?;
    let phase = (target.theta() + PI / 2.0) / 3.0;
    let divergence = compare_to_quantum(&cfg, &CircuitConfig::new(phase, phase, phase), args.n, args.seed)?;

    let mut samples = String::from("trial,outcome\n");
    for (k, o) in run.outcomes.iter().enumerate() {
        writeln!(samples, "{k},{o}")?;
    }
    let mut output = Output::new(out)?;
    output.write("samples.csv", &samples)?;
    output.write_json("exchangeability.json", &exchange)?;
    output.write_json("divergence.json", &divergence)?;
    output.finish("hv-asym", args, Some(args.seed), started, EXIT_OK)
}

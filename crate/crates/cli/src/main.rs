//! `tbandit`: oracle allocations, bound curves, simulations and figure presets.
//!
//! Exit codes: 0 success, 2 usage error, 3 invalid input or configuration,
//! 4 I/O failure.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use tbandit::bounds::BoundFamily;
use tbandit::config::{log_spaced, ExperimentConfig};
use tbandit::env::Environment;
use tbandit::harness::{
    bound_curves, float, run_experiment, tau_tail_diagnostic, toy_experiment, write_bounds_csv,
    write_tail_csv,
};
use tbandit::index::IndexFunction;
use tbandit::oracle::oracle_allocation;
use tbandit::presets::{preset, PRESET_NAMES};
use tbandit::rng::DEFAULT_SEED;
use tbandit::{Error, ProblemInstance};

#[derive(Parser)]
#[command(name = "tbandit", version, about = "Fixed-budget thresholding bandits")]
struct Cli {
    /// Base seed for every random stream [default: 20211206, or the config's seed]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for replications (0 = one per core)
    #[arg(long, global = true, default_value_t = 0)]
    workers: usize,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the non-adaptive oracle allocation
    Oracle {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Budget
        #[arg(long = "T")]
        horizon: f64,
    },
    /// Evaluate loss bounds on a horizon grid and print bounds.csv
    Bounds {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Bound families (apt, lsa, fwt, fwt_large_T, sum_of_gaps, apt_zero_one, oracle, lower)
        #[arg(long, value_delimiter = ',', required = true)]
        family: Vec<String>,
        /// Horizons
        #[arg(long = "T", value_delimiter = ',', conflicts_with = "t_min")]
        horizons: Vec<u64>,
        /// Smallest horizon of a log-spaced grid
        #[arg(long = "T-min", requires = "t_max")]
        t_min: Option<u64>,
        /// Largest horizon of a log-spaced grid
        #[arg(long = "T-max", requires = "t_min")]
        t_max: Option<u64>,
        /// Points of the log-spaced grid
        #[arg(long, default_value_t = 20)]
        points: usize,
    },
    /// Run a Monte Carlo experiment from a JSON configuration
    Simulate {
        /// Experiment configuration file
        #[arg(long)]
        config: PathBuf,
        /// Override the replication count
        #[arg(long)]
        replications: Option<usize>,
        /// Only validate the configuration and print it with defaults filled in
        #[arg(long)]
        check: bool,
    },
    /// Reproduce a figure preset (fig1, fig2, fig3_left, fig3_right)
    Figure {
        name: String,
        /// Override the replication count
        #[arg(long)]
        replications: Option<usize>,
    },
    /// The two-point example: adaptive versus uniform sampling
    Toy {
        #[arg(long = "K", default_value_t = 10)]
        arms: usize,
        #[arg(long = "T", default_value_t = 100)]
        horizon: u64,
        #[arg(long = "R", default_value_t = 100_000)]
        replications: usize,
    },
    /// Empirical tails of first-crossing times against exp(-Δ²x²)
    Diagnose {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Index policies
        #[arg(long, value_delimiter = ',', default_value = "apt,fwt")]
        policy: Vec<String>,
        /// Probe levels C
        #[arg(long, value_delimiter = ',', default_value = "2,4,8")]
        levels: Vec<f64>,
        /// Offsets x
        #[arg(long, value_delimiter = ',', default_value = "0,0.5,1,2")]
        x: Vec<f64>,
        #[arg(long = "R", default_value_t = 10_000)]
        replications: u64,
    },
}

/// A problem instance given inline: means, gaps or `K` equal gaps.
#[derive(Args)]
struct InstanceArgs {
    /// Arm means
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, conflicts_with_all = ["gaps", "delta"])]
    means: Vec<f64>,
    /// Normalized gaps
    #[arg(long, value_delimiter = ',', conflicts_with = "delta")]
    gaps: Vec<f64>,
    /// Number of arms sharing the gap given by --delta
    #[arg(long = "K", requires = "delta")]
    arms: Option<usize>,
    /// Common normalized gap
    #[arg(long, requires = "arms")]
    delta: Option<f64>,
    /// Arm costs [default: 1 for every arm]
    #[arg(long, value_delimiter = ',')]
    costs: Vec<f64>,
    /// Noise scale of the arms given by --means
    #[arg(long, default_value_t = 1.0)]
    sigma: f64,
    /// Threshold of the arms given by --means
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    theta: f64,
}

impl InstanceArgs {
    fn build(&self) -> Result<ProblemInstance, Error> {
        let costs = |k: usize| {
            if self.costs.is_empty() {
                vec![1.0; k]
            } else {
                self.costs.clone()
            }
        };
        if !self.means.is_empty() {
            return ProblemInstance::new(
                self.means.clone(),
                costs(self.means.len()),
                self.sigma,
                self.theta,
            );
        }
        if !self.gaps.is_empty() {
            return ProblemInstance::from_gaps(self.gaps.clone(), costs(self.gaps.len()));
        }
        match (self.arms, self.delta) {
            (Some(k), Some(d)) => ProblemInstance::from_gaps(vec![d; k], costs(k)),
            _ => Err(Error::InvalidArgument(
                "give the arms with --means, --gaps, or --K and --delta".into(),
            )),
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        // The reader went away (e.g. `| head`); nothing left to report.
        Err(Error::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 3 } else { 4 })
        }
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    let stdout = io::stdout();
    match cli.command {
        Command::Oracle { instance, horizon } => {
            let inst = instance.build()?;
            print_oracle(&inst, horizon, &mut stdout.lock())
        }
        Command::Bounds {
            instance,
            family,
            horizons,
            t_min,
            t_max,
            points,
        } => {
            let inst = instance.build()?;
            let families = family
                .iter()
                .map(|f| f.parse::<BoundFamily>())
                .collect::<Result<Vec<_>, _>>()?;
            let grid = match (t_min, t_max) {
                (Some(lo), Some(hi)) => log_spaced(lo, hi, points),
                _ if !horizons.is_empty() => horizons,
                _ => return Err(Error::InvalidArgument("give --T or --T-min/--T-max".into())),
            };
            let rows = bound_curves(&inst, &families, &grid, cli.workers)?;
            let mut buf = Vec::new();
            write_bounds_csv(&rows, inst.total_cost(), &mut buf)?;
            emit(cli.out.as_deref(), "bounds.csv", &buf)
        }
        Command::Simulate {
            config,
            replications,
            check,
        } => {
            let mut cfg = ExperimentConfig::from_file(&config)?;
            if let Some(seed) = cli.seed {
                cfg.seed = seed;
            }
            if let Some(r) = replications {
                cfg.replications = r.max(1);
            }
            if check {
                let text = serde_json::to_string_pretty(&cfg.to_json())?;
                writeln!(stdout.lock(), "{text}")?;
                return Ok(());
            }
            let out = cli
                .out
                .or_else(|| cfg.output.clone())
                .unwrap_or_else(|| PathBuf::from("results"));
            let report = run_experiment(&cfg, cli.workers)?;
            for path in report.write_csvs(&out)? {
                writeln!(stdout.lock(), "wrote {}", path.display())?;
            }
            Ok(())
        }
        Command::Figure { name, replications } => {
            let p = preset(&name).map_err(|e| match e {
                Error::UnknownPreset(n) => Error::UnknownPreset(format!(
                    "{n}; expected one of {}",
                    PRESET_NAMES.join(", ")
                )),
                other => other,
            })?;
            let mut cfg = p.config;
            cfg.seed = cli.seed.unwrap_or(DEFAULT_SEED);
            if let Some(r) = replications {
                cfg.replications = r.max(1);
            }
            let out = cli.out.unwrap_or_else(|| PathBuf::from(p.name));
            let report = run_experiment(&cfg, cli.workers)?;
            for path in report.write_csvs(&out)? {
                writeln!(stdout.lock(), "wrote {}", path.display())?;
            }
            Ok(())
        }
        Command::Toy {
            arms,
            horizon,
            replications,
        } => {
            let report = toy_experiment(
                arms,
                horizon,
                replications,
                cli.seed.unwrap_or(DEFAULT_SEED),
                cli.workers,
            )?;
            let mut buf = Vec::new();
            report.write_csv(&mut buf)?;
            emit(cli.out.as_deref(), "toy.csv", &buf)
        }
        Command::Diagnose {
            instance,
            policy,
            levels,
            x,
            replications,
        } => {
            let env = Environment::gaussian(instance.build()?);
            let policies = policy
                .iter()
                .map(|p| IndexFunction::from_name(p))
                .collect::<Result<Vec<_>, _>>()?;
            let rows = tau_tail_diagnostic(
                &env,
                &policies,
                &levels,
                &x,
                replications,
                cli.seed.unwrap_or(DEFAULT_SEED),
                cli.workers,
            )?;
            let mut buf = Vec::new();
            write_tail_csv(&rows, &mut buf)?;
            emit(cli.out.as_deref(), "tail.csv", &buf)
        }
    }
}

/// Writes to `dir/name` when an output directory is given, else to stdout.
fn emit(dir: Option<&Path>, name: &str, bytes: &[u8]) -> Result<(), Error> {
    match dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            let path = dir.join(name);
            fs::write(&path, bytes)?;
            println!("wrote {}", path.display());
        }
        None => io::stdout().lock().write_all(bytes)?,
    }
    Ok(())
}

fn print_oracle(inst: &ProblemInstance, horizon: f64, out: &mut impl Write) -> Result<(), Error> {
    let sol = oracle_allocation(inst, horizon)?;
    let list = |items: Vec<String>| items.join(",");
    writeln!(
        out,
        "# S={{{}}}",
        list(sol.support.iter().map(|k| (k + 1).to_string()).collect())
    )?;
    writeln!(out, "# k0={}", sol.k0)?;
    writeln!(out, "# gamma={}", float(sol.gamma))?;
    if let Some(int) = &sol.integral {
        writeln!(
            out,
            "# N=({})",
            list(int.pulls.iter().map(u64::to_string).collect())
        )?;
    }
    writeln!(out, "arm,mu,gap,n_fractional,n_integral,in_support")?;
    for k in 0..inst.arms() {
        let n_int = sol
            .integral
            .as_ref()
            .map_or_else(String::new, |a| a.pulls[k].to_string());
        writeln!(
            out,
            "{},{},{},{},{},{}",
            k + 1,
            float(inst.means()[k]),
            float(inst.gaps()[k]),
            float(sol.fractional.pulls[k]),
            n_int,
            sol.in_support(k)
        )?;
    }
    Ok(())
}

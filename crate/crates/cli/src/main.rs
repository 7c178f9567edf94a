use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wsnsim::experiment::{compare_command, plan_report, run_command};
use wsnsim::{load_config, CoveragePlan, Error, ProtocolKind, SimulationConfig};

#[derive(Parser)]
#[command(name = "simulate", version, about = "Clustered wireless sensor network simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol on one seed and write per-round metrics as CSV.
    Run {
        /// Config file; built-in defaults when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum)]
        protocol: Protocol,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run both protocols on paired deployments for every seed.
    Compare {
        #[arg(long)]
        config: Option<PathBuf>,
        /// Comma-separated seeds; falls back to `seeds` in the config.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        #[arg(long)]
        out_dir: PathBuf,
    },
    /// Print the node density and sleep budget needed for a coverage target.
    Plan {
        #[arg(long)]
        target: f64,
        /// Sensing range, m.
        #[arg(long, default_value_t = 10.0)]
        range: f64,
        /// Fraction of rounds a node is awake.
        #[arg(long, default_value_t = 0.53)]
        duty: f64,
        #[arg(long, default_value_t = 150)]
        nodes: u64,
        /// Field width, m.
        #[arg(long, default_value_t = 100.0)]
        width: f64,
        /// Field height, m.
        #[arg(long, default_value_t = 100.0)]
        height: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Protocol {
    Leach,
    Proposed,
}

impl From<Protocol> for ProtocolKind {
    fn from(p: Protocol) -> Self {
        match p {
            Protocol::Leach => ProtocolKind::Leach,
            Protocol::Proposed => ProtocolKind::Proposed,
        }
    }
}

fn config_from(path: Option<&PathBuf>) -> Result<SimulationConfig, Error> {
    match path {
        Some(p) => load_config(p),
        None => Ok(SimulationConfig::default()),
    }
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.command {
        Command::Run {
            config,
            protocol,
            seed,
            out,
        } => {
            let config = config_from(config.as_ref())?;
            let result = run_command(&config, protocol.into(), seed, &out)?;
            eprintln!(
                "{} seed {}: {} rounds, fnd={:?} hna={:?} -> {}",
                result.protocol,
                seed,
                result.records.len(),
                result.fnd_round,
                result.hna_round,
                out.display()
            );
        }
        Command::Compare {
            config,
            seeds,
            out_dir,
        } => {
            let config = config_from(config.as_ref())?;
            let seeds = seeds.unwrap_or_else(|| config.seeds.clone());
            let cmp = compare_command(&config, &seeds, &out_dir)?;
            println!(
                "{} seeds: mean FND leach={:.1} proposed={:.1} ({:+.1}%), mean HNA leach={:.1} proposed={:.1} ({:+.1}%)",
                cmp.runs.len(),
                cmp.mean_fnd(ProtocolKind::Leach),
                cmp.mean_fnd(ProtocolKind::Proposed),
                cmp.mean_fnd_improvement_pct(),
                cmp.mean_hna(ProtocolKind::Leach),
                cmp.mean_hna(ProtocolKind::Proposed),
                cmp.mean_hna_improvement_pct(),
            );
        }
        Command::Plan {
            target,
            range,
            duty,
            nodes,
            width,
            height,
        } => {
            if !(width > 0.0 && height > 0.0) {
                return Err(Error::Domain("field width and height must be positive".into()));
            }
            let area = width * height;
            let plan = CoveragePlan::new(target, range, duty, nodes, area)?;
            print!("{}", plan_report(&plan, nodes, area));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_io() { 2 } else { 1 })
        }
    }
}

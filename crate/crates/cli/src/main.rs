//! `dispersat` command-line front end. Every command produces one [`report::Report`].

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use report::{Report, Status};

#[derive(Parser, Debug)]
#[command(name = "dispersat", version, about = "Diverse satisfying assignments of k-CNF formulas")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Multiplier on every automatic repetition budget.
    #[arg(long, global = true, default_value_t = 1.0)]
    pub effort: f64,
    /// Worker threads for parallel loops; 0 uses all cores.
    #[arg(long, global = true, env = "DISPERSAT_WORKERS", default_value_t = 0)]
    pub workers: usize,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Two solutions at maximum (or approximately maximum) Hamming distance.
    Diameter {
        /// DIMACS file, or - for stdin.
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = DiameterAlgo::Fwht)]
        algo: DiameterAlgo,
        #[command(flatten)]
        ls: LocalSearch,
    },
    /// s solutions spread out under a dispersion objective.
    Disperse {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Objective::Min)]
        objective: Objective,
        #[arg(long, short)]
        s: usize,
        #[arg(long, value_enum, default_value_t = DisperseAlgo::Exact)]
        algo: DisperseAlgo,
        /// Only solutions of weight at least W (weight windows for approximate algorithms).
        #[arg(long, conflicts_with = "weight_max")]
        weight_min: Option<usize>,
        /// Only solutions of weight at most W.
        #[arg(long)]
        weight_max: Option<usize>,
        #[command(flatten)]
        ls: LocalSearch,
    },
    /// s diverse small feasible sets of a subset problem.
    DiverseMin {
        file: PathBuf,
        #[arg(long, value_enum)]
        problem: Problem,
        #[arg(long, short)]
        s: usize,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
    },
    /// CNF encoding of a subset problem, as DIMACS.
    Reduce {
        file: PathBuf,
        #[arg(long, value_enum)]
        problem: Problem,
    },
    /// Growth base and budget of anchored local search.
    EstimateRuntime {
        #[arg(long)]
        c: f64,
        #[arg(long, default_value_t = 1.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        delta: f64,
        /// Also report the radius and log₂ budget at this n.
        #[arg(long)]
        n: Option<usize>,
    },
    /// Iterations-to-first-solution on planted instances, as CSV.
    ProbeSpeedup {
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// Planted solution counts, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "1,8")]
        planted: Vec<usize>,
        #[arg(long, default_value_t = 5)]
        separation: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 1 << 24)]
        max_iterations: u64,
    },
    /// All solutions in lexicographic order.
    Enumerate {
        file: PathBuf,
        #[arg(long, default_value_t = dispersat::cnf::DEFAULT_ENUMERATION_LIMIT)]
        limit: usize,
    },
}

#[derive(Args, Debug, Clone, Copy)]
pub struct LocalSearch {
    /// Approximation slack of the Schoening oracles; defaults to min(1/2, largest admissible).
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long, value_enum, default_value_t = Variant::V1)]
    pub variant: Variant,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiameterAlgo {
    Fwht,
    Brute,
    MinOnes,
    Ppz,
    Schoening,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum DisperseAlgo {
    /// Farthest insertion / swap search with an exhaustive oracle.
    Exact,
    Fwht,
    Clique,
    Brute,
    Ppz,
    Schoening,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Objective {
    Min,
    Sum,
    SumDistinct,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Problem {
    Vc,
    Is,
    Hs,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variant {
    V1,
    V2,
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.global.workers > 0 {
        // only fails if a pool already exists, which cannot happen this early
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.global.workers)
            .build_global();
    }
    let mut report = Report::new(argv[1..].to_vec(), cli.global.seed);
    let start = Instant::now();
    if let Err(e) = commands::run(&cli, &mut report) {
        if matches!(e, dispersat::Error::Usage(_)) {
            eprintln!("{}", Cli::command().render_usage());
        }
        report.fail(&e);
    }
    report.wall_time_ms = start.elapsed().as_millis() as u64;
    let text = match cli.global.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.to_text(),
    };
    let written = match &cli.global.output {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("{}: {e}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return ExitCode::from(2);
    }
    if report.status == Status::Error {
        if let Some(m) = &report.message {
            eprintln!("error: {m}");
        }
    }
    ExitCode::from(report.status.exit_code() as u8)
}

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use report::{CliError, EXIT_USAGE};

#[derive(Debug, Parser)]
#[command(
    name = "gridhard",
    version,
    about = "Knossos and Hour-Glass puzzles and their reductions"
)]
pub struct Cli {
    /// Print key=value lines instead of prose.
    #[arg(long, global = true)]
    pub porcelain: bool,
    #[command(subcommand)]
    pub cmd: Cmd,
}

#[derive(Debug, Subcommand)]
pub enum Cmd {
    /// Verify, solve or brute-force Knossos instances.
    #[command(subcommand)]
    Knossos(KnossosCmd),
    /// Solve or verify Hour-Glass instances.
    #[command(subcommand)]
    Hourglass(HourglassCmd),
    /// Compile SAT or SUBSET-SUM instances.
    #[command(subcommand)]
    Reduce(ReduceCmd),
    /// Map a solution of a reduced instance back to the source problem.
    #[command(subcommand)]
    Decode(DecodeCmd),
    /// Check gadget templates against their port relations.
    #[command(subcommand)]
    Gadget(GadgetCmd),
    /// Build the Knossos solution induced by a satisfying assignment.
    Synthesize {
        manifest: PathBuf,
        /// Comma-separated `var=bool` pairs, e.g. `1=true,2=false`.
        #[arg(long)]
        assign: String,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    /// Random test instances.
    #[command(subcommand)]
    Generate(GenerateCmd),
}

#[derive(Debug, Subcommand)]
pub enum KnossosCmd {
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    Solve {
        instance: PathBuf,
        #[arg(long, default_value_t = 50_000_000)]
        max_nodes: u64,
        #[arg(long, default_value_t = 60.0)]
        timeout: f64,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    Oracle {
        instance: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Dp,
    Dfs,
}

#[derive(Debug, Subcommand)]
pub enum HourglassCmd {
    Solve {
        instance: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Dp)]
        method: Method,
        #[arg(short = 'o', long)]
        out: Option<PathBuf>,
    },
    Verify {
        instance: PathBuf,
        path: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Outputs {
    #[arg(short = 'o', long)]
    pub out: PathBuf,
    #[arg(short = 'm', long)]
    pub manifest: PathBuf,
}

#[derive(Debug, Subcommand)]
pub enum ReduceCmd {
    Sat2knossos {
        cnf: PathBuf,
        #[command(flatten)]
        outputs: Outputs,
    },
    Ss2hg {
        values: PathBuf,
        #[command(flatten)]
        outputs: Outputs,
    },
}

#[derive(Debug, Subcommand)]
pub enum DecodeCmd {
    Knossos {
        manifest: PathBuf,
        solution: PathBuf,
    },
    Hourglass {
        manifest: PathBuf,
        solution: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GadgetCmd {
    Check {
        /// Bundled template name or a template file.
        #[arg(required_unless_present = "all", conflicts_with = "all")]
        template: Option<String>,
        #[arg(long)]
        all: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenerateCmd {
    Cnf {
        #[arg(long, default_value_t = 3)]
        vars: usize,
        #[arg(long, default_value_t = 3)]
        clauses: usize,
        #[arg(long, default_value_t = 3)]
        width: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    Subsetsum {
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        max_value: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.cmd) {
        Ok(report) => {
            report.print(cli.porcelain);
            ExitCode::from(report.code)
        }
        Err(e) => {
            if cli.porcelain {
                println!("status=error");
            }
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("run with --help for usage");
            }
            ExitCode::from(EXIT_USAGE)
        }
    }
}

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{CliResult, Common};

#[derive(Parser, Debug)]
#[command(
    name = "ehrhart-dp",
    version,
    about = "Privacy/fidelity trade-off of geometric histogram sanitizers"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Limiting minimum distortion under every closed form.
    Tradeoff {
        /// Extra θ values for the CSV sweep, comma separated.
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<String>,
    },
    /// Runs the counting and closed-form identity suite.
    Verify {
        /// Corrupts one face count to exercise the failure path.
        #[arg(long)]
        poison_counts: bool,
    },
    /// Linear-programming ground truth.
    Lp {
        #[command(subcommand)]
        action: LpAction,
    },
    /// Finite-n distortion against the limit, as CSV.
    Converge {
        /// Database sizes; defaults depend on K.
        #[arg(long, value_delimiter = ',')]
        ns: Vec<u64>,
    },
    /// Sanitizes a record database.
    Sanitize {
        #[arg(long)]
        records: PathBuf,
        #[arg(long)]
        schema: PathBuf,
        /// Also write a synthetic record CSV with the sanitized histogram.
        #[arg(long)]
        records_out: Option<PathBuf>,
    },
    /// Emits the neighbor graph of the histogram space as DOT.
    Graph,
}

#[derive(Subcommand, Debug)]
enum LpAction {
    /// Solves the primal and dual programs.
    Solve,
    /// Checks the closed-form dual certificate against the mechanism.
    Certify,
    /// Writes the program in text form.
    Export {
        /// Export the dual instead of the primal.
        #[arg(long)]
        dual: bool,
    },
}

fn run(cli: Cli) -> CliResult<()> {
    let c = &cli.common;
    match cli.command {
        Command::Tradeoff { thetas } => commands::tradeoff::run(c, &thetas),
        Command::Verify { poison_counts } => commands::verify::run(c, poison_counts),
        Command::Lp { action } => match action {
            LpAction::Solve => commands::lp::solve(c),
            LpAction::Certify => commands::lp::certify(c),
            LpAction::Export { dual } => commands::lp::export(c, dual),
        },
        Command::Converge { ns } => commands::converge::run(c, &ns),
        Command::Sanitize {
            records,
            schema,
            records_out,
        } => commands::sanitize::run(c, &records, &schema, records_out.as_deref()),
        Command::Graph => commands::graph::run(c),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if e.exit_code() == 3 {
                eprintln!("hint: {} raises every size cap", config::CAP_ENV);
            }
            ExitCode::from(e.exit_code())
        }
    }
}

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qlocal_cli::commands::{cmd_check, cmd_decompose, cmd_demo, cmd_verify, Options, Outcome, ScheduleKind, EXIT_INPUT};

#[derive(Parser)]
#[command(name = "qlocal", version, about = "Certify causal unitaries on graphs and compile them into local circuits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Certify that an operator is causal with respect to a graph.
    Check {
        graph: PathBuf,
        operator: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compile a causal operator into a circuit of local gates.
    Decompose {
        graph: PathBuf,
        operator: PathBuf,
        /// Where to write the circuit document.
        #[arg(short, long)]
        out: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Compare a circuit against an operator on basis and random states.
    Verify {
        circuit: PathBuf,
        operator: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Run a built-in instance end to end (`shift`, `counterexample`, or any instance name).
    Demo {
        name: String,
        /// Directory for the instance's graph, operator and circuit documents.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Greedy,
    TorusOffsets,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value_t = 1e-8)]
    verify_tol: f64,
    #[arg(long, default_value_t = 20)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also certify the adjoint on the transposed graph.
    #[arg(long)]
    inverse: bool,
    #[arg(long, value_enum, default_value = "greedy")]
    schedule: ScheduleArg,
    /// Torus axis lengths for the offset schedule, e.g. `2,2`.
    #[arg(long, value_delimiter = ',')]
    axes: Option<Vec<usize>>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Leave the timing field empty so reports are byte-stable.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn options(&self) -> Options {
        Options {
            tol: self.tol,
            verify_tol: self.verify_tol,
            samples: self.samples,
            seed: self.seed,
            inverse: self.inverse,
            schedule: match self.schedule {
                ScheduleArg::Greedy => ScheduleKind::Greedy,
                ScheduleArg::TorusOffsets => ScheduleKind::TorusOffsets,
            },
            axes: self.axes.clone(),
            timing: !self.no_timing,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (outcome, common): (Outcome, &Common) = match &cli.command {
        Command::Check { graph, operator, common } => (cmd_check(graph, operator, &common.options()), common),
        Command::Decompose {
            graph,
            operator,
            out,
            common,
        } => (cmd_decompose(graph, operator, out, &common.options()), common),
        Command::Verify {
            circuit,
            operator,
            common,
        } => (cmd_verify(circuit, operator, &common.options()), common),
        Command::Demo { name, out_dir, common } => (cmd_demo(name, &common.options(), out_dir.as_deref()), common),
    };
    for line in &outcome.lines {
        println!("{line}");
    }
    if let Some(path) = &common.report {
        if let Err(e) = fs::write(path, outcome.report.to_json()) {
            eprintln!("cannot write report {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT as u8);
        }
    }
    ExitCode::from(outcome.exit_code as u8)
}

use std::io::{self, Read, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use machine_space::cli::{run_command, Command, OutputFormat, RunConfig, EXIT_SYNTAX};
use machine_space::quantifier::{Caps, Schedule, DEFAULT_FUEL};
use machine_space::spaces::SpaceKind;

/// Covers, quantifiers and search over machines on presented spaces.
#[derive(Parser)]
#[command(name = "machspace", version)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decide whether the machine halts on every point (exact).
    Covers(Opts),
    /// Semi-decide that the machine halts on every point.
    Forall(Opts),
    /// Semi-decide that the machine halts on some point.
    Exists(Opts),
    /// Print the normal form.
    Normalize(Opts),
    /// Find a word of length --depth, followed by zeros, that the machine accepts.
    Search(Opts),
}

#[derive(Clone, Copy, ValueEnum)]
enum SpaceArg {
    CantorDigits,
    CantorPrefix,
    Interval,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScheduleArg {
    Exhaustive,
    Basic,
}

#[derive(Args)]
struct Opts {
    /// Machine expression, or '-' to read it from stdin.
    expr: String,
    #[arg(long, value_enum, default_value = "cantor-digits")]
    space: SpaceArg,
    #[arg(long, default_value_t = DEFAULT_FUEL, value_parser = clap::value_parser!(u64).range(1..))]
    fuel: u64,
    #[arg(long, default_value_t = Caps::default().max_family_size)]
    max_family_size: usize,
    #[arg(long, default_value_t = Caps::default().max_generator_index)]
    max_generator_index: u64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    schedule: ScheduleArg,
    /// Search depth; defaults to the deepest digit the machine reads.
    #[arg(long)]
    depth: Option<usize>,
    /// Emit one JSON object instead of plain text.
    #[arg(long)]
    json: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_SYNTAX as u8 } else { 0 });
        }
    };
    let (cmd, opts) = match cli.command {
        Cmd::Covers(o) => (Command::Covers, o),
        Cmd::Forall(o) => (Command::Forall, o),
        Cmd::Exists(o) => (Command::Exists, o),
        Cmd::Normalize(o) => (Command::Normalize, o),
        Cmd::Search(o) => (Command::Search, o),
    };
    let text = if opts.expr == "-" {
        let mut s = String::new();
        if let Err(e) = io::stdin().read_to_string(&mut s) {
            eprintln!("error: reading stdin: {e}");
            return ExitCode::from(EXIT_SYNTAX as u8);
        }
        s
    } else {
        opts.expr.clone()
    };
    let cfg = RunConfig {
        space: match opts.space {
            SpaceArg::CantorDigits => SpaceKind::CantorDigits,
            SpaceArg::CantorPrefix => SpaceKind::CantorPrefix,
            SpaceArg::Interval => SpaceKind::UnitInterval,
        },
        fuel: opts.fuel,
        caps: Caps {
            max_generator_index: opts.max_generator_index,
            max_family_size: opts.max_family_size,
        },
        schedule: match opts.schedule {
            ScheduleArg::Exhaustive => Schedule::Exhaustive,
            ScheduleArg::Basic => Schedule::Basic,
        },
        output: if opts.json {
            OutputFormat::Json
        } else {
            OutputFormat::Plain
        },
        depth: opts.depth,
    };
    let report = run_command(cmd, &cfg, &text);
    let _ = io::stdout().write_all(report.stdout.as_bytes());
    let _ = io::stderr().write_all(report.stderr.as_bytes());
    ExitCode::from(report.code as u8)
}

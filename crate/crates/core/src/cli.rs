//! Command execution behind the `machspace` binary.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::Serialize;

use crate::dsl::{parse_machine, ParseError};
use crate::presentation::{Presentation, SpaceError};
use crate::quantifier::{
    cantor_search_with_fuel, Caps, QuantError, Quantifier, Schedule, SearchReport, SearchResult,
};
use crate::runtime::{compile, Outcome};
use crate::spaces::{contains, covers, ConcretePoint, SpaceKind, StreamPoint};
use crate::syntax::{normalize, FormalMachine, GeneratorId, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 2;
pub const EXIT_SYNTAX: i32 = 3;
pub const EXIT_LIMIT: i32 = 4;

/// Deepest search the command line accepts.
pub const MAX_SEARCH_DEPTH: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Covers,
    Forall,
    Exists,
    Normalize,
    Search,
}

impl Command {
    pub const ALL: [Command; 5] = [
        Command::Covers,
        Command::Forall,
        Command::Exists,
        Command::Normalize,
        Command::Search,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Covers => "covers",
            Command::Forall => "forall",
            Command::Exists => "exists",
            Command::Normalize => "normalize",
            Command::Search => "search",
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputFormat {
    #[default]
    Plain,
    Json,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub space: SpaceKind,
    pub fuel: u64,
    pub caps: Caps,
    pub schedule: Schedule,
    pub output: OutputFormat,
    /// Word length for `search`; by default the deepest digit the machine reads.
    pub depth: Option<usize>,
}

impl RunConfig {
    pub fn new(space: SpaceKind) -> Self {
        RunConfig {
            space,
            fuel: crate::quantifier::DEFAULT_FUEL,
            caps: Caps::default(),
            schedule: Schedule::Exhaustive,
            output: OutputFormat::Plain,
            depth: None,
        }
    }
}

/// What a command printed and how it exited.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExitReport {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl ExitReport {
    fn fail(code: i32, message: impl fmt::Display) -> Self {
        ExitReport {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

#[derive(Serialize)]
struct JsonOutput<'a> {
    command: &'a str,
    space: &'a str,
    input: &'a str,
    result: serde_json::Value,
    fuel_used: Option<u64>,
}

struct Answer {
    result: serde_json::Value,
    plain: String,
    fuel_used: Option<u64>,
    /// Set when the answer is printed but the run hit a limit.
    warning: Option<String>,
}

impl Answer {
    fn outcome(o: &Outcome) -> Self {
        Answer {
            result: o.to_string().into(),
            plain: o.to_string(),
            fuel_used: Some(o.fuel_used()),
            warning: None,
        }
    }
}

/// Why a command failed, grouped by exit code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CommandError {
    Syntax(String),
    Mismatch(String),
    Limit(String),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Syntax(_) => EXIT_SYNTAX,
            CommandError::Mismatch(_) => EXIT_MISMATCH,
            CommandError::Limit(_) => EXIT_LIMIT,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CommandError::Syntax(m) | CommandError::Mismatch(m) | CommandError::Limit(m) => m,
        }
    }
}

impl fmt::Display for CommandError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

impl std::error::Error for CommandError {}

impl From<ParseError> for CommandError {
    fn from(e: ParseError) -> Self {
        match e {
            ParseError::Syntax { .. } => CommandError::Syntax(e.to_string()),
            ParseError::Mismatch(e) => CommandError::Mismatch(e.to_string()),
        }
    }
}

impl From<SpaceError> for CommandError {
    fn from(e: SpaceError) -> Self {
        CommandError::Mismatch(e.to_string())
    }
}

impl From<QuantError> for CommandError {
    fn from(e: QuantError) -> Self {
        match e {
            QuantError::Space(e) => e.into(),
            other => CommandError::Limit(other.to_string()),
        }
    }
}

/// Parses `text` and runs `cmd` on it. Never panics on user input.
pub fn run_command(cmd: Command, cfg: &RunConfig, text: &str) -> ExitReport {
    if cfg.fuel == 0 {
        return ExitReport::fail(EXIT_LIMIT, "fuel must be at least 1");
    }
    let answer = match answer(cmd, cfg, text) {
        Ok(a) => a,
        Err(e) => return ExitReport::fail(e.exit_code(), e),
    };
    let stdout = match cfg.output {
        OutputFormat::Plain => format!("{}\n", answer.plain),
        OutputFormat::Json => {
            let out = JsonOutput {
                command: cmd.name(),
                space: cfg.space.name(),
                input: text.trim(),
                result: answer.result,
                fuel_used: answer.fuel_used,
            };
            format!(
                "{}\n",
                serde_json::to_string(&out).expect("plain data serializes")
            )
        }
    };
    match answer.warning {
        None => ExitReport {
            code: EXIT_OK,
            stdout,
            stderr: String::new(),
        },
        Some(w) => ExitReport {
            code: EXIT_LIMIT,
            stdout,
            stderr: format!("error: {w}\n"),
        },
    }
}

fn answer(cmd: Command, cfg: &RunConfig, text: &str) -> Result<Answer, CommandError> {
    let m = parse_machine(text)?;
    cfg.space.check_machine(&m)?;
    match cmd {
        Command::Covers => {
            let b = covers(cfg.space, &m)?;
            Ok(Answer {
                result: b.into(),
                plain: b.to_string(),
                fuel_used: None,
                warning: None,
            })
        }
        Command::Normalize => {
            let n = normalize(&m).to_string();
            Ok(Answer {
                result: n.clone().into(),
                plain: n,
                fuel_used: None,
                warning: None,
            })
        }
        Command::Forall | Command::Exists => {
            let (outcome, exhausted) = run_quantifier(cmd == Command::Forall, cfg, &m)?;
            let mut a = Answer::outcome(&outcome);
            if exhausted && !outcome.is_halted() {
                a.warning =
                    Some("the enumeration was exhausted within the caps without a halt".into());
            }
            Ok(a)
        }
        Command::Search => {
            let report = run_search(cfg, &m)?;
            let (result, plain) = match report.result {
                SearchResult::Found(w) => (w.to_string().into(), format!("\"{w}\"")),
                SearchResult::NoWitness => (serde_json::Value::Null, "none".to_string()),
                SearchResult::Undecided => {
                    let o = Outcome::Suspended {
                        fuel: report.fuel_used,
                    };
                    (o.to_string().into(), o.to_string())
                }
            };
            Ok(Answer {
                result,
                plain,
                fuel_used: Some(report.fuel_used),
                warning: None,
            })
        }
    }
}

/// Runs `forall` (or `exists`) on `m` with the caps, schedule and fuel of
/// `cfg`. Also returns whether the enumeration ran out within the caps.
pub fn run_quantifier(
    forall: bool,
    cfg: &RunConfig,
    m: &FormalMachine,
) -> Result<(Outcome, bool), CommandError> {
    cfg.space.check_machine(m)?;
    let q = Quantifier::with_presentation(Arc::new(cfg.space), cfg.caps, cfg.schedule)?;
    if cfg.schedule == Schedule::Exhaustive {
        check_caps(&q, m)?;
    }
    let mp = compile(m);
    Ok(if forall {
        let r = q.run_forall(&mp, cfg.fuel);
        (r.outcome, r.exhausted)
    } else {
        let r = q.run_exists(&mp, cfg.fuel);
        (r.outcome, r.exhausted)
    })
}

/// Rejects machines that mention generators the enumeration never reaches.
fn check_caps(q: &Quantifier, m: &FormalMachine) -> Result<(), CommandError> {
    for g in m.branches().iter().flat_map(|b| b.iter()) {
        match q.presentation().index_of(g) {
            Some(i) if i <= q.caps().max_generator_index => {}
            _ => return Err(QuantError::OutsideCaps(g.clone()).into()),
        }
    }
    Ok(())
}

fn reads(g: &GeneratorId) -> usize {
    match g {
        GeneratorId::Digit { index, .. } => *index as usize + 1,
        GeneratorId::Prefix(w) => w.len(),
        _ => 0,
    }
}

/// Searches the words of length `cfg.depth`, each followed by zeros, for
/// one that `m` accepts.
pub fn run_search(cfg: &RunConfig, m: &FormalMachine) -> Result<SearchReport, CommandError> {
    cfg.space.check_machine(m)?;
    if cfg.space == SpaceKind::UnitInterval {
        return Err(SpaceError::Unsupported {
            space: cfg.space.tag(),
            operation: "search",
        }
        .into());
    }
    let needed = m
        .branches()
        .iter()
        .flat_map(|b| b.iter())
        .map(reads)
        .max()
        .unwrap_or(0);
    let depth = cfg.depth.unwrap_or(needed);
    if depth > MAX_SEARCH_DEPTH {
        return Err(CommandError::Limit(format!(
            "search depth {depth} exceeds the limit of {MAX_SEARCH_DEPTH}"
        )));
    }
    if needed > depth {
        return Err(CommandError::Limit(format!(
            "the machine reads {needed} digits, beyond the search depth {depth}"
        )));
    }
    let (space, m) = (cfg.space, m.clone());
    let pred = Arc::new(move |w: &Word| {
        let x = ConcretePoint::Stream(StreamPoint::eventually_constant(w, false, depth as u64 + 1));
        contains(space, &m, &x).expect("the machine reads within the depth")
    });
    Ok(cantor_search_with_fuel(pred, depth, cfg.fuel))
}

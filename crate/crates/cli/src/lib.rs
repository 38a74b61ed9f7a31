//! Command-line front end: answer goals, print rule ladders, and time the
//! original recursion against runtime unfolding.

pub mod bench;
pub mod report;
pub mod size;

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use recunfold::{
    parse_goal, parse_program, rule_to_string, Caps, Engine, Error, Example, Program,
    UnfoldingScheme, DEFAULT_MAX_STEPS,
};

pub use bench::{run_bench, BenchConfig, BenchMode, Format, MeasurementRow, Mode};
pub use size::{parse_sizes, Size, SizeList};

/// Directory for bench output when `--out` is not given.
pub const OUT_DIR_ENV: &str = "RECUNFOLD_OUT_DIR";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(Error),
    #[error("{0}")]
    Runtime(Error),
    #[error("answer mismatch: {0}")]
    Mismatch(String),
    #[error("{0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn from_core(e: Error) -> Self {
        match e {
            Error::Parse(_) | Error::Validation(_) => CliError::Input(e),
            _ => CliError::Runtime(e),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Input(_) => 2,
            CliError::Runtime(_) | CliError::Io(_) => 3,
            CliError::Mismatch(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "recunfold",
    version,
    about = "Runtime repeated recursion unfolding"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Answer a goal and print its bindings and counters.
    Run(RunArgs),
    /// Print the rule ladder unfolded for a goal.
    Rules(RulesArgs),
    /// Time the interpreters over a grid of sizes.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Program file.
    #[arg(long, required_unless_present = "example", conflicts_with = "example")]
    pub program: Option<PathBuf>,
    /// Shipped example instead of a program file.
    #[arg(long)]
    pub example: Option<Example>,
    #[arg(long)]
    pub goal: String,
    #[arg(long, value_enum, default_value_t = Mode::Unfolded)]
    pub mode: Mode,
    #[arg(long)]
    pub no_cache: bool,
    #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
    pub max_steps: u64,
}

#[derive(Debug, Args)]
pub struct RulesArgs {
    #[arg(long)]
    pub example: Example,
    #[arg(long)]
    pub goal: String,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub example: Example,
    #[arg(long, value_enum, default_value_t = BenchMode::Both)]
    pub mode: BenchMode,
    /// Comma-separated sizes such as `2^12,2^12+1,5000`.
    #[arg(long)]
    pub sizes: Option<SizeList>,
    #[arg(long, default_value_t = 3)]
    pub reps: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Md)]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub no_cache: bool,
    /// Run sizes on separate engines in parallel; timings are not comparable.
    #[arg(long)]
    pub parallel: bool,
}

/// The scheme whose template the program's recursive rule is an instance
/// of, renamed to the program's predicate.
pub fn detect_scheme(program: &Program) -> Option<UnfoldingScheme> {
    UnfoldingScheme::builtin()
        .into_iter()
        .filter(|s| s.predicate.arity == program.predicate.arity)
        .find(|s| (s.step)(program.recursive_rule()).is_ok())
        .map(|s| s.for_predicate(program.predicate.clone()))
}

fn load_program(args: &RunArgs) -> Result<(Program, Option<Example>), CliError> {
    if let Some(ex) = args.example {
        return Ok((ex.program(), Some(ex)));
    }
    let path = args.program.as_ref().expect("clap requires one of the two");
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let program = parse_program(&text).map_err(CliError::Input)?;
    let shipped = Example::ALL.into_iter().find(|e| e.program() == program);
    Ok((program, shipped))
}

pub fn cmd_run(args: &RunArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let (program, shipped) = load_program(args)?;
    let caps = Caps {
        max_steps: args.max_steps,
        ..Caps::default()
    };
    let mut engine = Engine::new();
    engine.set_caching(!args.no_cache);
    let registered = match (shipped, detect_scheme(&program)) {
        (Some(ex), _) => {
            ex.register_with(&mut engine, caps)
                .map_err(CliError::from_core)?;
            true
        }
        (None, Some(scheme)) => {
            engine
                .register(program.clone(), scheme, caps)
                .map_err(CliError::from_core)?;
            true
        }
        (None, None) => false,
    };
    let (goal, vars) =
        parse_goal(&args.goal, &mut engine.machine.gen).map_err(|e| CliError::Input(e.into()))?;
    let answer =
        match (args.mode, registered) {
            (Mode::Unfolded, true) => engine.call(&goal),
            (Mode::Original, true) => engine.call_original(&goal),
            (Mode::Original, false) => {
                if !program.predicate.matches(&goal) {
                    return Err(CliError::Runtime(Error::NotRegistered(goal.to_string())));
                }
                engine.machine.run_original(&goal, &program, args.max_steps)
            }
            (Mode::Unfolded, false) => return Err(CliError::Usage(
                "no unfolding scheme matches this program's recursive rule; use --mode original"
                    .into(),
            )),
        }
        .map_err(CliError::from_core)?;
    for (name, v) in &vars {
        if let Some(value) = answer.value(*v) {
            writeln!(out, "{name} = {value}")?;
        }
    }
    let s = &answer.stats;
    writeln!(out, "rule_applications: {}", s.rule_applications)?;
    writeln!(out, "guard_checks: {}", s.guard_checks)?;
    writeln!(out, "rules_generated: {}", s.rules_generated)?;
    writeln!(out, "applied_rule_indices: {:?}", s.applied_rule_indices)?;
    writeln!(out, "cache_extended: {}", s.cache_extended)?;
    Ok(())
}

pub fn cmd_rules(args: &RulesArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let mut engine = Engine::new();
    args.example
        .register(&mut engine)
        .map_err(CliError::from_core)?;
    let (goal, _) =
        parse_goal(&args.goal, &mut engine.machine.gen).map_err(|e| CliError::Input(e.into()))?;
    let ladder = engine.ladder_for(&goal).map_err(CliError::from_core)?;
    for r in &ladder.rules {
        writeln!(out, "{}", rule_to_string(r))?;
    }
    Ok(())
}

impl BenchArgs {
    pub fn config(&self) -> BenchConfig {
        BenchConfig {
            example: self.example,
            mode: self.mode,
            sizes: self
                .sizes
                .clone()
                .map(|s| s.0)
                .unwrap_or_else(|| bench::default_sizes(self.example, self.mode)),
            reps: self.reps,
            seed: self.seed,
            format: self.format,
            cache: !self.no_cache,
            parallel: self.parallel,
        }
    }
}

fn out_path(args: &BenchArgs, cfg: &BenchConfig) -> Option<PathBuf> {
    if let Some(p) = &args.out {
        return Some(p.clone());
    }
    let dir = std::env::var_os(OUT_DIR_ENV)?;
    let ext = match cfg.format {
        Format::Csv => "csv",
        Format::Md => "md",
    };
    let mode = format!("{:?}", cfg.mode).to_lowercase();
    Some(PathBuf::from(dir).join(format!("bench-{}-{mode}.{ext}", cfg.example)))
}

pub fn cmd_bench(
    args: &BenchArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = args.config();
    let rows = run_bench(&cfg)?;
    let path = out_path(args, &cfg);
    let mut file;
    let dest: &mut dyn Write = match &path {
        Some(p) => {
            file = File::create(p)?;
            &mut file
        }
        None => out,
    };
    match cfg.format {
        Format::Csv => report::write_csv(&rows, &cfg, dest, err)?,
        Format::Md => report::write_markdown(&rows, &cfg, dest)?,
    }
    if let Some(p) = path {
        writeln!(err, "wrote {}", p.display())?;
    }
    Ok(())
}

pub fn execute(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(a) => cmd_run(a, out),
        Command::Rules(a) => cmd_rules(a, out),
        Command::Bench(a) => cmd_bench(a, out, err),
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use recunfold::{parse_program, ValidationError};

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Usage(String::new()).exit_code(), 1);
        let v = Error::Validation(ValidationError::Empty);
        assert_eq!(CliError::from_core(v).exit_code(), 2);
        assert_eq!(
            CliError::from_core(Error::StepLimitExceeded(1)).exit_code(),
            3
        );
        assert_eq!(CliError::Mismatch(String::new()).exit_code(), 4);
    }

    #[test]
    fn schemes_are_detected_from_the_recursive_rule() {
        for ex in Example::ALL {
            let s = detect_scheme(&ex.program()).unwrap();
            assert_eq!(s.name, ex.scheme().name);
        }
        let p = parse_program("q(N) <=> N=\\=1 | M is N-1, q(M).\nq(N) <=> N=1 | true.").unwrap();
        let s = detect_scheme(&p).unwrap();
        assert_eq!(
            (s.name, s.predicate.to_string()),
            ("countdown", "q/1".to_string())
        );
        let p =
            parse_program("s(A,C) <=> A>1 | B is A-1, s(B,D), C is A+D.\ns(A,C) <=> A=1 | C=1.")
                .unwrap();
        assert!(detect_scheme(&p).is_none());
    }

    #[test]
    fn main_with_captures_output() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = main_with(
            [
                "recunfold",
                "run",
                "--example",
                "summation",
                "--goal",
                "sum(3,R)",
                "--mode",
                "original",
            ],
            &mut out,
            &mut err,
        );
        assert_eq!(code, 0);
        assert!(String::from_utf8(out).unwrap().starts_with("R = 6\n"));
    }
}

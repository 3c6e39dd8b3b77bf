//! The `funcnet` command line.
//!
//! Exit codes: 0 consistent or pass, 1 findings or fail, 2 parse error,
//! 3 usage error, 4 inconclusive.

use std::ffi::OsString;
use std::io::{IsTerminal, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::dsl::{self, comment_count, merge, parse_unresolved, render_model, Model, ParseErrors};
use crate::pipeline::{check_model, run, RunError, RunInput};
use crate::report::{self, Style};
use crate::sim::{load_trace, Outcome, Trace};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_USAGE: i32 = 3;
pub const EXIT_INCONCLUSIVE: i32 = 4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "funcnet", version, about = "Check function-net views and run scenario monitors")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check nets, views, scenarios, mode machines and variant sets.
    Check {
        #[arg(long, value_enum, default_value_t)]
        format: Format,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Run a scenario monitor on a trace or on a simulation.
    Run(RunArgs),
    /// Rewrite files in canonical form.
    Fmt {
        /// Report files that are not canonical without writing them.
        #[arg(long)]
        check: bool,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[arg(long)]
    pub scenario: String,
    #[arg(long, conflicts_with_all = ["stimuli", "horizon"], required_unless_present = "stimuli")]
    pub trace: Option<PathBuf>,
    #[arg(long, requires = "horizon")]
    pub stimuli: Option<PathBuf>,
    #[arg(long, requires = "stimuli", value_parser = clap::value_parser!(u64).range(1..))]
    pub horizon: Option<u64>,
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
    #[arg(required = true)]
    pub files: Vec<PathBuf>,
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
    style: Style,
}

impl Io<'_> {
    fn usage(&mut self, command: &str, format: Format, message: &str) -> i32 {
        if format == Format::Json {
            self.json(&report::usage_error_json(command, message));
        }
        let _ = writeln!(self.err, "error: {message}");
        EXIT_USAGE
    }

    fn parse_failure(&mut self, command: &str, format: Format, errors: &ParseErrors) -> i32 {
        if format == Format::Json {
            self.json(&report::parse_errors_json(command, errors));
        }
        let _ = write!(self.err, "{}", report::parse_errors_text(errors));
        EXIT_PARSE
    }

    fn json(&mut self, value: &impl serde::Serialize) {
        let text = serde_json::to_string_pretty(value).expect("reports serialize");
        let _ = writeln!(self.out, "{text}");
    }
}

enum Loaded {
    Model(Model),
    Exit(i32),
}

fn read(io: &mut Io, command: &str, format: Format, path: &PathBuf) -> Result<String, i32> {
    std::fs::read_to_string(path)
        .map_err(|e| io.usage(command, format, &format!("cannot read {}: {e}", path.display())))
}

fn load(io: &mut Io, command: &str, format: Format, files: &[PathBuf]) -> Loaded {
    let mut texts = Vec::new();
    for path in files {
        match read(io, command, format, path) {
            Ok(t) => texts.push((path.display().to_string(), t)),
            Err(code) => return Loaded::Exit(code),
        }
    }
    let mut models = Vec::new();
    let mut errors = Vec::new();
    for (name, text) in &texts {
        match parse_unresolved(text, name) {
            Ok(m) => models.push(m),
            Err(ParseErrors(e)) => errors.extend(e),
        }
    }
    if !errors.is_empty() {
        return Loaded::Exit(io.parse_failure(command, format, &ParseErrors(errors)));
    }
    match merge(models) {
        Ok(m) => Loaded::Model(m),
        Err(e) => Loaded::Exit(io.parse_failure(command, format, &e)),
    }
}

fn cmd_check(io: &mut Io, format: Format, files: &[PathBuf]) -> i32 {
    let model = match load(io, "check", format, files) {
        Loaded::Model(m) => m,
        Loaded::Exit(code) => return code,
    };
    let outcome = check_model(&model);
    match format {
        Format::Json => io.json(&report::check_json(&outcome)),
        Format::Text => {
            let _ = write!(io.out, "{}", report::check_text(&outcome, io.style));
        }
    }
    if outcome.is_consistent() {
        EXIT_OK
    } else {
        EXIT_FINDINGS
    }
}

fn load_events(io: &mut Io, format: Format, path: &PathBuf) -> Result<Trace, i32> {
    let text = read(io, "run", format, path)?;
    load_trace(&text).map_err(|e| {
        let err = dsl::ParseError {
            span: crate::model::Span::new(path.display().to_string().into(), e.line as u32, 1, 0),
            code: dsl::ErrorCode::Syntax,
            message: format!("{:?}: {}", e.code, e.message),
            expected: Vec::new(),
        };
        io.parse_failure("run", format, &ParseErrors(vec![err]))
    })
}

fn cmd_run(io: &mut Io, args: &RunArgs) -> i32 {
    let format = args.format;
    let model = match load(io, "run", format, &args.files) {
        Loaded::Model(m) => m,
        Loaded::Exit(code) => return code,
    };
    let input = match (&args.trace, &args.stimuli, args.horizon) {
        (Some(t), None, None) => match load_events(io, format, t) {
            Ok(trace) => RunInput::Trace(trace),
            Err(code) => return code,
        },
        (None, Some(s), Some(horizon)) => match load_events(io, format, s) {
            Ok(stimuli) => RunInput::Stimuli { stimuli, horizon },
            Err(code) => return code,
        },
        _ => return io.usage("run", format, "give exactly one of --trace or --stimuli with --horizon"),
    };
    let outcome = match run(&model, &args.scenario, input) {
        Ok(o) => o,
        Err(RunError::Inconsistent { name, report }) => {
            let _ = writeln!(io.err, "error: scenario `{name}` is not consistent:");
            for f in &report.findings {
                let _ = writeln!(io.err, "  {} [{}]: {}", f.condition, f.subjects.join(", "), f.message);
            }
            if format == Format::Json {
                io.json(&report::usage_error_json("run", &format!("scenario `{name}` is not consistent")));
            }
            return EXIT_FINDINGS;
        }
        Err(e) => return io.usage("run", format, &e.to_string()),
    };
    match format {
        Format::Json => io.json(&report::run_json(&outcome)),
        Format::Text => {
            let _ = write!(io.out, "{}", report::run_text(&outcome, io.style));
        }
    }
    match outcome.verdict.outcome {
        Outcome::Pass => EXIT_OK,
        Outcome::Fail => EXIT_FINDINGS,
        Outcome::Inconclusive => EXIT_INCONCLUSIVE,
    }
}

fn cmd_fmt(io: &mut Io, check: bool, files: &[PathBuf]) -> i32 {
    let mut rendered = Vec::new();
    let mut errors = Vec::new();
    for path in files {
        let text = match read(io, "fmt", Format::Text, path) {
            Ok(t) => t,
            Err(code) => return code,
        };
        match parse_unresolved(&text, &path.display().to_string()) {
            Ok(m) => rendered.push((path, text, render_model(&m))),
            Err(ParseErrors(e)) => errors.extend(e),
        }
    }
    if !errors.is_empty() {
        return io.parse_failure("fmt", Format::Text, &ParseErrors(errors));
    }
    let mut differs = false;
    for (path, before, after) in rendered {
        if before == after {
            continue;
        }
        differs = true;
        if check {
            let _ = writeln!(io.out, "{}: not canonical", path.display());
            continue;
        }
        let lost = comment_count(&before).unwrap_or(0) - comment_count(&after).unwrap_or(0);
        if lost > 0 {
            let _ = writeln!(
                io.err,
                "warning: {}: {lost} comment(s) inside elements are not kept",
                path.display()
            );
        }
        if let Err(e) = std::fs::write(path, &after) {
            return io.usage("fmt", Format::Text, &format!("cannot write {}: {e}", path.display()));
        }
        let _ = writeln!(io.out, "{}: formatted", path.display());
    }
    if check && differs {
        EXIT_FINDINGS
    } else {
        EXIT_OK
    }
}

/// Whether terminal styling is wanted for standard output.
pub fn color_wanted() -> bool {
    std::env::var_os("NO_COLOR").is_none_or(|v| v.is_empty()) && std::io::stdout().is_terminal()
}

/// Runs the command line and returns the exit code.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write, style: Style) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err, style };
    match &cli.command {
        Command::Check { format, files } => cmd_check(&mut io, *format, files),
        Command::Run(args) => cmd_run(&mut io, args),
        Command::Fmt { check, files } => cmd_fmt(&mut io, *check, files),
    }
}

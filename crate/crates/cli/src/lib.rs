//! `loopcheck` command line: casegen, generate, execute and pipeline.
//!
//! Exit codes: 0 success, 1 a requirement was violated, 2 usage or parse
//! error, 3 internal error or an exceeded cap.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use loopcheck::casegen::{self, header_max_len, Study};
use loopcheck::dsl::{
    parse_model_file, parse_requirements_file, parse_suite_file, serialize_suite, RequirementSet,
};
use loopcheck::engine::{TestSuite, DEFAULT_STEP_CAP};
use loopcheck::exec::{execute_suite, ExecConfig, ExecReport};
use loopcheck::ir::CompiledModel;
use loopcheck::ltl::SubformulaMode;
use loopcheck::testgen::{
    generate_suite, Backend, GenError, GenerationReport, GeneratorConfig, GoalConfig,
    DEFAULT_STATE_CAP,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "loopcheck", version, about = "Closed-loop test generation and LTL test execution")]
pub struct Cli {
    /// Worker threads for the parallel stages (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write a parameterized case study model and its requirements.
    Casegen {
        study: StudyArg,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Generate a coverage test suite.
    Generate {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        gen: GenArgs,
        /// Suite file; the generation report goes next to it as `<stem>.gen.txt`.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run requirements against a test suite.
    Execute {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long)]
        suite: PathBuf,
        #[command(flatten)]
        exec: ExecArgs,
        /// Verdict report file.
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate, then execute; writes all artifacts into one directory.
    Pipeline {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        gen: GenArgs,
        #[command(flatten)]
        exec: ExecArgs,
        #[arg(long)]
        out_dir: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StudyArg {
    Elevator,
    Pnp,
}

impl From<StudyArg> for Study {
    fn from(s: StudyArg) -> Self {
        match s {
            StudyArg::Elevator => Study::Elevator,
            StudyArg::Pnp => Study::Pnp,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GoalsArg {
    /// Value goals for non-nondet variables; maximal Boolean subformulas.
    Maximal,
    /// Value goals for non-nondet variables; every Boolean subformula.
    All,
    /// Like `all`, plus value goals for nondet variables.
    AllKinds,
}

impl From<GoalsArg> for GoalConfig {
    fn from(g: GoalsArg) -> Self {
        match g {
            GoalsArg::Maximal => GoalConfig {
                subformulas: SubformulaMode::Maximal,
                include_nondet: false,
            },
            GoalsArg::All => GoalConfig {
                subformulas: SubformulaMode::All,
                include_nondet: false,
            },
            GoalsArg::AllKinds => GoalConfig {
                subformulas: SubformulaMode::All,
                include_nondet: true,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BackendArg {
    Auto,
    Explicit,
    Bmc,
}

impl From<BackendArg> for Backend {
    fn from(b: BackendArg) -> Self {
        match b {
            BackendArg::Auto => Backend::Auto,
            BackendArg::Explicit => Backend::Explicit,
            BackendArg::Bmc => Backend::Bmc,
        }
    }
}

#[derive(Debug, Args)]
pub struct Inputs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub reqs: PathBuf,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Maximum test length (default: `max-len=` in the model header).
    #[arg(long)]
    pub max_len: Option<usize>,
    #[arg(long, value_enum, default_value_t = GoalsArg::Maximal)]
    pub goals: GoalsArg,
    #[arg(long, value_enum, default_value_t = BackendArg::Auto)]
    pub backend: BackendArg,
    #[arg(long, default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
}

#[derive(Debug, Args)]
pub struct ExecArgs {
    #[arg(long, default_value_t = DEFAULT_STEP_CAP)]
    pub step_cap: usize,
    /// Flag requirements whose verdict contradicts their expect-pass/expect-fail tag.
    #[arg(long)]
    pub check_expectations: bool,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Internal(_) => EXIT_INTERNAL,
        }
    }
}

fn usage(e: impl ToString) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal(e: impl ToString) -> CliError {
    CliError::Internal(e.to_string())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{text}")
            } else {
                write!(err, "{text}")
            };
            return code;
        }
    };
    let mut buf = Vec::new();
    let result = with_jobs(cli.jobs, || dispatch(cli.command, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(feature = "parallel")]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<R, CliError> + Send) -> Result<R, CliError> {
    match jobs {
        None => f(),
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(internal)?
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_jobs<R: Send>(jobs: Option<usize>, f: impl FnOnce() -> Result<R, CliError> + Send) -> Result<R, CliError> {
    match jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        _ => f(),
    }
}

fn dispatch(cmd: Command, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    match cmd {
        Command::Casegen { study, n, out_dir } => cmd_casegen(study.into(), n, &out_dir, out),
        Command::Generate { inputs, gen, out: path } => {
            let loaded = Loaded::read(&inputs)?;
            ensure_parent(&path)?;
            let cfg = loaded.gen_config(&gen)?;
            let (suite, report) = loaded.generate(&cfg)?;
            write_atomic(&path, &serialize_suite(&suite, loaded.model.model()))?;
            write_atomic(&sibling(&path, "gen.txt"), &report.render())?;
            writeln!(out, "{}", report.summary()).map_err(internal)?;
            Ok(EXIT_OK)
        }
        Command::Execute { inputs, suite, exec, out: path } => {
            let loaded = Loaded::read(&inputs)?;
            let text = read(&suite)?;
            let suite = parse_suite_file(&suite.display().to_string(), &text, loaded.model.model())
                .map_err(usage)?;
            ensure_parent(&path)?;
            let report = loaded.execute(&suite, &exec)?;
            write_atomic(&path, &report.render(&loaded.model, exec.check_expectations))?;
            writeln!(out, "{}", report.footer(exec.check_expectations)).map_err(internal)?;
            Ok(verdict_code(&report))
        }
        Command::Pipeline { inputs, gen, exec, out_dir } => {
            let loaded = Loaded::read(&inputs)?;
            ensure_dir(&out_dir)?;
            let cfg = loaded.gen_config(&gen)?;
            let stem = inputs
                .model
                .file_stem()
                .map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned());
            let (suite, gen_report) = loaded.generate(&cfg)?;
            let report = loaded.execute(&suite, &exec)?;
            write_atomic(
                &out_dir.join(format!("{stem}.cts")),
                &serialize_suite(&suite, loaded.model.model()),
            )?;
            write_atomic(&out_dir.join(format!("{stem}.gen.txt")), &gen_report.render())?;
            write_atomic(
                &out_dir.join(format!("{stem}.report.txt")),
                &report.render(&loaded.model, exec.check_expectations),
            )?;
            let c = report.counts();
            let mut line = format!(
                "generated={}/{} violated={} passed={}",
                gen_report.tests, gen_report.elements, c.violated, c.passed
            );
            if c.errored > 0 {
                line.push_str(&format!(" errored={}", c.errored));
            }
            if exec.check_expectations {
                line.push_str(&format!(" expectation-misses={}", c.expectation_misses));
            }
            writeln!(out, "{line}").map_err(internal)?;
            Ok(verdict_code(&report))
        }
    }
}

fn cmd_casegen(study: Study, n: usize, out_dir: &Path, out: &mut (dyn Write + Send)) -> Result<i32, CliError> {
    let case = casegen::generate(study, n).map_err(|e| match e {
        casegen::CasegenError::UnsupportedN { .. } => usage(e),
        casegen::CasegenError::Malformed { .. } => internal(e),
    })?;
    ensure_dir(out_dir)?;
    let model = out_dir.join(format!("{}.clm", case.stem()));
    let reqs = out_dir.join(format!("{}.ltl", case.stem()));
    write_atomic(&model, &case.model_text)?;
    write_atomic(&reqs, &case.reqs_text)?;
    writeln!(
        out,
        "wrote {}\nwrote {}\nmax-len={} k-opt={}",
        model.display(),
        reqs.display(),
        case.max_len,
        case.k_opt
    )
    .map_err(internal)?;
    Ok(EXIT_OK)
}

/// Errored verdicts outrank violations: the suite could not be run as given.
fn verdict_code(report: &ExecReport) -> i32 {
    let c = report.counts();
    if c.errored > 0 {
        EXIT_INTERNAL
    } else if c.violated > 0 {
        EXIT_VIOLATED
    } else {
        EXIT_OK
    }
}

struct Loaded {
    model: CompiledModel,
    reqs: RequirementSet,
    header_max_len: Option<usize>,
}

impl Loaded {
    fn read(inputs: &Inputs) -> Result<Self, CliError> {
        let model_text = read(&inputs.model)?;
        let reqs_text = read(&inputs.reqs)?;
        let model = parse_model_file(&inputs.model.display().to_string(), &model_text).map_err(usage)?;
        let reqs =
            parse_requirements_file(&inputs.reqs.display().to_string(), &reqs_text).map_err(usage)?;
        let model = CompiledModel::new(&model).map_err(usage)?;
        Ok(Self {
            model,
            reqs,
            header_max_len: header_max_len(&model_text),
        })
    }

    fn gen_config(&self, args: &GenArgs) -> Result<GeneratorConfig, CliError> {
        let max_len = args
            .max_len
            .or(self.header_max_len)
            .ok_or_else(|| usage("--max-len is required (model header has no max-len=)"))?;
        if max_len == 0 {
            return Err(usage("--max-len must be at least 1"));
        }
        Ok(GeneratorConfig {
            max_len,
            backend: args.backend.into(),
            goals: args.goals.into(),
            state_cap: args.state_cap,
            ..Default::default()
        })
    }

    fn generate(&self, cfg: &GeneratorConfig) -> Result<(TestSuite, GenerationReport), CliError> {
        generate_suite(&self.model, &self.reqs, cfg).map_err(|f| match f.error {
            GenError::Goal { .. } => usage(f.error),
            _ => internal(format!(
                "generation aborted after {}/{} goals: {}",
                f.partial.processed(),
                f.partial.goals.len(),
                f.error
            )),
        })
    }

    fn execute(&self, suite: &TestSuite, args: &ExecArgs) -> Result<ExecReport, CliError> {
        let cfg = ExecConfig {
            step_cap: args.step_cap,
        };
        execute_suite(&self.model, &self.reqs, suite, &cfg).map_err(usage)
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))
}

fn ensure_parent(path: &Path) -> Result<(), CliError> {
    match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => ensure_dir(p),
        _ => Ok(()),
    }
}

/// `dir/name.cts` becomes `dir/name.<ext>`.
fn sibling(path: &Path, ext: &str) -> PathBuf {
    path.with_extension(ext)
}

/// Writes via a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: io::Error| usage(format!("{}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(contents.as_bytes()).map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goal_flags_map_to_configs() {
        let g: GoalConfig = GoalsArg::AllKinds.into();
        assert!(g.include_nondet && g.subformulas == SubformulaMode::All);
        let g: GoalConfig = GoalsArg::Maximal.into();
        assert!(!g.include_nondet && g.subformulas == SubformulaMode::Maximal);
    }

    #[test]
    fn sibling_replaces_extension() {
        assert_eq!(sibling(Path::new("a/b.cts"), "gen.txt"), PathBuf::from("a/b.gen.txt"));
        assert_eq!(sibling(Path::new("b"), "gen.txt"), PathBuf::from("b.gen.txt"));
    }

    #[test]
    fn usage_errors_exit_two() {
        let (mut o, mut e) = (Vec::new(), Vec::new());
        assert_eq!(run(["loopcheck", "bogus"], &mut o, &mut e), EXIT_USAGE);
        assert_eq!(run(["loopcheck", "casegen", "elevator", "--n", "1"], &mut o, &mut e), EXIT_USAGE);
        assert!(String::from_utf8_lossy(&e).contains("unsupported n=1"));
        assert_eq!(run(["loopcheck", "--help"], &mut o, &mut e), EXIT_OK);
    }
}

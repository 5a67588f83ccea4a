use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use krein_cli::batch::{problem_files, run_files, run_path};
use krein_cli::{certify, read_problem, Overrides, ResultFile, Status};

/// Indefinite least-squares, spline and smoothing problems in Krein spaces.
#[derive(Parser, Debug)]
#[command(name = "krein", version)]
struct Cli {
    #[command(flatten)]
    flags: Flags,
    /// Run every `*.json` file in DIR in parallel; prints a JSON array.
    #[arg(long, value_name = "DIR", global = true, conflicts_with = "json_out")]
    batch: Option<PathBuf>,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args, Debug)]
struct Flags {
    /// Rank tolerance.
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Positivity tolerance.
    #[arg(long, global = true)]
    psd_tol: Option<f64>,
    /// Seed of the certification oracle.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Number of oracle samples.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Exit with 4 when a solved result fails its oracle checks.
    #[arg(long, global = true)]
    strict: bool,
    /// Also write the result file to PATH.
    #[arg(long, value_name = "PATH", global = true)]
    json_out: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the problem as typed in the file.
    Run { file: PathBuf },
    /// Re-certify a result file against its problem.
    Certify {
        file: PathBuf,
        #[arg(long, value_name = "RESULT")]
        result: PathBuf,
    },
    Ilsq { file: PathBuf },
    Spline { file: PathBuf },
    Smoothing { file: PathBuf },
    Schur { file: PathBuf },
    OptimalInverse { file: PathBuf },
    Adjoint { file: PathBuf },
    Jtrace { file: PathBuf },
}

impl Command {
    fn type_override(&self) -> Option<&'static str> {
        Some(match self {
            Command::Run { .. } | Command::Certify { .. } => return None,
            Command::Ilsq { .. } => "ilsq",
            Command::Spline { .. } => "spline",
            Command::Smoothing { .. } => "smoothing",
            Command::Schur { .. } => "schur",
            Command::OptimalInverse { .. } => "optimal_inverse",
            Command::Adjoint { .. } => "adjoint",
            Command::Jtrace { .. } => "jtrace",
        })
    }

    fn file(&self) -> &Path {
        match self {
            Command::Run { file }
            | Command::Certify { file, .. }
            | Command::Ilsq { file }
            | Command::Spline { file }
            | Command::Smoothing { file }
            | Command::Schur { file }
            | Command::OptimalInverse { file }
            | Command::Adjoint { file }
            | Command::Jtrace { file } => file,
        }
    }
}

fn exit_code(result: &ResultFile, strict: bool) -> u8 {
    let oracle_failed = result.certificate.as_ref().and_then(|c| c.oracle.as_ref()).is_some_and(|o| !o.passed);
    if strict && result.status == Status::Solved && oracle_failed {
        4
    } else {
        result.status.exit_code() as u8
    }
}

fn diagnose(result: &ResultFile) {
    match (&result.status, &result.error, &result.reason) {
        (_, Some(e), _) => eprintln!("{}: {} at `{}`: {}", status_word(result.status), e.kind, e.path, e.message),
        (_, None, Some(reason)) => eprintln!("{}: {reason}", status_word(result.status)),
        _ => eprintln!("{}", status_word(result.status)),
    }
    if let Some(o) = result.certificate.as_ref().and_then(|c| c.oracle.as_ref()) {
        if !o.passed {
            eprintln!("oracle check failed: {o:?}");
        }
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Solved => "solved",
        Status::NoSolution => "no_solution",
        Status::InvalidInput => "invalid_input",
        Status::InternalError => "internal_error",
    }
}

/// Writes to stdout; a reader that closed the pipe early is not an error.
fn print_stdout(text: &str) {
    let mut stdout = std::io::stdout().lock();
    let _ = writeln!(stdout, "{text}");
}

fn emit(json: &str, out: Option<&Path>) -> Result<(), String> {
    print_stdout(json);
    if let Some(path) = out {
        std::fs::write(path, format!("{json}\n")).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn certify_file(file: &Path, result: &Path, overrides: &Overrides) -> Result<ResultFile, String> {
    let problem = read_problem(file, overrides).map_err(|e| e.to_string())?;
    let text = std::fs::read_to_string(result).map_err(|e| format!("cannot read {}: {e}", result.display()))?;
    let previous: ResultFile = serde_json::from_str(&text).map_err(|e| format!("malformed result file: {e}"))?;
    certify(&problem, &previous, problem.n_samples, problem.seed).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let flags = &cli.flags;
    let mut overrides = Overrides {
        problem_type: cli.command.as_ref().and_then(Command::type_override).map(String::from),
        rank_tol: flags.tol,
        psd_tol: flags.psd_tol,
        seed: flags.seed,
        n_samples: flags.samples,
    };

    if let Some(dir) = &cli.batch {
        let files = match problem_files(dir) {
            Ok(f) => f,
            Err(e) => {
                eprintln!("cannot read {}: {e}", dir.display());
                return ExitCode::from(3);
            }
        };
        let results = run_files(&files, &overrides);
        for (path, r) in files.iter().zip(&results) {
            eprint!("{}: ", path.display());
            diagnose(r);
        }
        print_stdout(&serde_json::to_string_pretty(&results).expect("results serialize"));
        let worst = results.iter().map(|r| exit_code(r, flags.strict)).max().unwrap_or(0);
        return ExitCode::from(worst);
    }

    let Some(command) = &cli.command else {
        eprintln!("no problem file given; see --help");
        return ExitCode::from(3);
    };
    let result = match command {
        Command::Certify { file, result } => {
            overrides.problem_type = None;
            match certify_file(file, result, &overrides) {
                Ok(r) => r,
                Err(message) => {
                    eprintln!("certify: {message}");
                    return ExitCode::from(3);
                }
            }
        }
        other => run_path(other.file(), &overrides),
    };
    diagnose(&result);
    let json = serde_json::to_string_pretty(&result).expect("result serializes");
    if let Err(message) = emit(&json, flags.json_out.as_deref()) {
        eprintln!("{message}");
        return ExitCode::from(1);
    }
    ExitCode::from(exit_code(&result, flags.strict))
}

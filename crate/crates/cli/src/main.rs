mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clap::{Parser, ValueEnum};
use lctrs::confluence::{analyze, AnalysisConfig, Criterion, Report, SearchConfig, Verdict};
use lctrs::frontend::{load, validate, Lctrs};
use lctrs::smt::{Solver, SolverConfig};

const EXIT_TIMEOUT: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_SOLVER: u8 = 3;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Kv,
}

/// Confluence analysis for logically constrained term rewrite systems.
#[derive(Parser, Debug)]
#[command(name = "lctrs", version)]
struct Args {
    /// System file to analyse.
    #[arg(required_unless_present = "bench")]
    file: Option<PathBuf>,
    /// Global timeout in seconds.
    #[arg(long, default_value_t = 5.0, value_parser = positive_seconds)]
    timeout: f64,
    /// Step bound for closing derivations.
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u32).range(1..))]
    steps: u32,
    /// Step bound when joining under the termination assumption.
    #[arg(long = "join-steps", default_value_t = 100, value_parser = clap::value_parser!(u32).range(1..))]
    join_steps: u32,
    /// Assume the system terminates and also try joinability of all
    /// critical pairs.
    #[arg(long = "assume-terminating")]
    assume_terminating: bool,
    /// Comma-separated criteria out of o, wo, sc, pc, apc.
    #[arg(long, value_delimiter = ',')]
    criteria: Vec<Criterion>,
    /// SMT solver executable (SMT-LIB 2 on standard input).
    #[arg(long)]
    solver: Option<PathBuf>,
    /// Run criteria one at a time in a fixed order.
    #[arg(long)]
    sequential: bool,
    /// Leave out the dummy constraints on extra variables (unsound).
    #[arg(long = "no-psi")]
    no_psi: bool,
    /// Analyse every file in a directory and print a summary.
    #[arg(long, conflicts_with = "file")]
    bench: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

fn positive_seconds(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err("timeout must be positive".into())
    }
}

impl Args {
    fn config(&self, sys: &Lctrs) -> AnalysisConfig {
        let mut solver = SolverConfig::default();
        if let Some(path) = self.solver.clone().or_else(|| sys.solver.as_ref().map(PathBuf::from)) {
            solver.executable = path;
        }
        AnalysisConfig {
            timeout: Duration::from_secs_f64(self.timeout),
            search: SearchConfig {
                step_bound: self.steps as usize,
                join_bound: self.join_steps as usize,
                ..SearchConfig::default()
            },
            assume_terminating: self.assume_terminating,
            criteria: if self.criteria.is_empty() { Criterion::DEFAULT.to_vec() } else { self.criteria.clone() },
            solver,
            include_psi: !self.no_psi,
            sequential: self.sequential,
            ..AnalysisConfig::default()
        }
    }
}

enum Failure {
    Input(String),
    Solver(String),
}

/// Loads and validates a system. Warnings go to standard error.
fn load_system(path: &Path, args: &Args) -> Result<Lctrs, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let sys = load(&text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    let config = args.config(&sys);
    let solver = Solver::new(config.solver.with_logic(sys.theory.logic));
    let diags = validate(&sys, Some(&solver));
    let mut errors = Vec::new();
    for d in diags {
        if d.is_error() {
            errors.push(format!("{}: {d}", path.display()));
        } else {
            eprintln!("{}: {d}", path.display());
        }
    }
    if errors.is_empty() {
        Ok(sys)
    } else {
        Err(Failure::Input(errors.join("\n")))
    }
}

fn run_file(path: &Path, args: &Args) -> Result<Report, Failure> {
    let sys = load_system(path, args)?;
    analyze(&sys, &args.config(&sys)).map_err(|e| Failure::Solver(e.to_string()))
}

fn single(path: &Path, args: &Args) -> ExitCode {
    match run_file(path, args) {
        Ok(report) => {
            let out = match args.format {
                Format::Text => report::text(&report),
                Format::Kv => report::kv(&report),
            };
            print!("{out}");
            match report.verdict {
                Verdict::Timeout => ExitCode::from(EXIT_TIMEOUT),
                _ => ExitCode::SUCCESS,
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_SOLVER)
        }
    }
}

fn bench(dir: &Path, args: &Args) -> ExitCode {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: {}: {e}", dir.display());
            return ExitCode::from(EXIT_INPUT);
        }
    };
    let mut files: Vec<PathBuf> = entries.filter_map(|e| e.ok().map(|e| e.path())).filter(|p| p.is_file()).collect();
    files.sort();
    let mut rows = Vec::new();
    for path in files {
        let started = Instant::now();
        let outcome = match run_file(&path, args) {
            Ok(report) => report::BenchOutcome::Verdict(report.verdict.label(), report.verdict.criterion()),
            Err(Failure::Input(msg) | Failure::Solver(msg)) => report::BenchOutcome::Error(msg),
        };
        let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
        rows.push(report::BenchRow { name, outcome, elapsed: started.elapsed() });
    }
    print!("{}", report::bench(&rows, args.format == Format::Kv));
    ExitCode::SUCCESS
}

fn main() -> ExitCode {
    let args = Args::parse();
    match (&args.bench, &args.file) {
        (Some(dir), _) => bench(dir, &args),
        (None, Some(file)) => single(file, &args),
        (None, None) => unreachable!("clap requires a file or --bench"),
    }
}

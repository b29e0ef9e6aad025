//! `pseudoherm`: batch front end for the analysis pipeline.
//!
//! Exit codes: 0 affirmative, 1 negative verdict, 2 input error, 3 numerical
//! failure.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use pseudoherm::io::read_matrix;
use pseudoherm::jordan::jordan_decompose;
use pseudoherm::report::{
    self, analyze, kramers_section, metric_section, render_jordan, render_kramers, render_metric, InputSummary,
    JordanSection, StageError,
};
use pseudoherm::sweep::{sweep, Family};
use pseudoherm::{Error, TolerancePolicy};

const EXIT_AFFIRMATIVE: u8 = 0;
const EXIT_NEGATIVE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(name = "pseudoherm", version, about = "Pseudo-Hermiticity analysis of complex matrices")]
struct Cli {
    #[command(flatten)]
    global: GlobalOpts,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalOpts {
    /// Relative eigenvalue clustering tolerance.
    #[arg(long, global = true)]
    eig_tol: Option<f64>,

    /// Relative singular-value cutoff for rank decisions.
    #[arg(long, global = true)]
    rank_tol: Option<f64>,

    /// Bound on relative certificate residuals.
    #[arg(long, global = true)]
    residual_tol: Option<f64>,

    /// Relative imaginary-part bound below which an eigenvalue is real.
    #[arg(long, global = true)]
    realness_tol: Option<f64>,

    /// Write the machine-readable report (JSON) to this path.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,

    /// Suppress the human-readable report.
    #[arg(long, short, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline. Exits 0 when H is pseudo-Hermitian, 1 when not.
    Analyze { file: PathBuf },
    /// Jordan ledger and its certificates.
    Jordan { file: PathBuf },
    /// Spectral classification, metric eta and its inertia. Exits 1 when condition i) fails.
    Metric { file: PathBuf },
    /// Kramers pairing and antilinear T with T^2 = -1. Exits 1 when no T exists.
    Kramers { file: PathBuf },
    /// Track Jordan structure along a one-parameter family.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct SweepArgs {
    /// `heff` or the path of an affine template file {"base": ..., "slope": ...}.
    #[arg(long)]
    family: String,

    #[arg(long, allow_hyphen_values = true)]
    from: f64,

    #[arg(long, allow_hyphen_values = true)]
    to: f64,

    #[arg(long)]
    steps: usize,

    /// Diagonal energy E of the heff family.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    energy: f64,

    /// Coupling r of the heff family.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    r: f64,
}

struct Outcome {
    code: u8,
    text: String,
    json: String,
}

fn exit_for(err: &Error) -> u8 {
    if err.is_numerical() {
        EXIT_NUMERICAL
    } else {
        EXIT_INPUT
    }
}

fn policy(g: &GlobalOpts) -> Result<TolerancePolicy, Error> {
    let d = TolerancePolicy::default();
    TolerancePolicy::new(
        g.eig_tol.unwrap_or(d.eig_cluster_tol),
        g.rank_tol.unwrap_or(d.rank_tol),
        g.residual_tol.unwrap_or(d.residual_tol),
        g.realness_tol.unwrap_or(d.realness_tol),
    )
}

fn section_json(input: &InputSummary, tol: &TolerancePolicy, key: &str, value: Value, errors: &[StageError]) -> String {
    let doc = json!({
        "input": input,
        "tolerances": tol,
        key: value,
        "stage_errors": errors,
    });
    report::to_json(&doc)
}

fn render_errors(out: &mut String, errors: &[StageError]) {
    for e in errors {
        out.push_str(&format!("stage {} failed: {}\n", e.stage, e.message));
    }
}

fn run_analyze(file: &Path, tol: &TolerancePolicy) -> Result<Outcome, Error> {
    let h = read_matrix(file)?;
    let report = analyze(&h, tol)?;
    let code = if report.is_pseudo_hermitian() { EXIT_AFFIRMATIVE } else { EXIT_NEGATIVE };
    Ok(Outcome {
        code,
        text: report.to_string(),
        json: report.to_json(),
    })
}

fn run_jordan(file: &Path, tol: &TolerancePolicy) -> Result<Outcome, Error> {
    let h = read_matrix(file)?;
    let jd = jordan_decompose(&h, tol)?;
    let section = JordanSection::of(&jd);
    let mut text = String::new();
    render_jordan(&mut text, &section);
    let json = section_json(&InputSummary::of(&h), tol, "jordan", json!(section), &[]);
    Ok(Outcome {
        code: EXIT_AFFIRMATIVE,
        text,
        json,
    })
}

fn run_metric(file: &Path, tol: &TolerancePolicy) -> Result<Outcome, Error> {
    let h = read_matrix(file)?;
    let jd = jordan_decompose(&h, tol)?;
    let mut errors = Vec::new();
    let section = metric_section(&jd, tol, &mut errors)?;
    let code = match (&section.eta, section.classification.condition_i_holds) {
        (Some(_), _) => EXIT_AFFIRMATIVE,
        (None, false) => EXIT_NEGATIVE,
        (None, true) => EXIT_NUMERICAL,
    };
    let mut text = String::new();
    render_metric(&mut text, &section);
    render_errors(&mut text, &errors);
    let json = section_json(&InputSummary::of(&h), tol, "metric", json!(section), &errors);
    Ok(Outcome { code, text, json })
}

fn run_kramers(file: &Path, tol: &TolerancePolicy) -> Result<Outcome, Error> {
    let h = read_matrix(file)?;
    let jd = jordan_decompose(&h, tol)?;
    let cls = pseudoherm::pseudoherm::classify_spectrum(&jd, tol)?;
    let mut errors = Vec::new();
    let (section, symplectic) = kramers_section(&jd, &cls, tol, &mut errors);
    let code = if section.t_built { EXIT_AFFIRMATIVE } else { EXIT_NEGATIVE };
    let mut text = String::new();
    render_kramers(&mut text, &section, symplectic.as_ref());
    render_errors(&mut text, &errors);
    let value = json!({ "verdict": section, "symplectic": symplectic });
    let json = section_json(&InputSummary::of(&h), tol, "kramers", value, &errors);
    Ok(Outcome { code, text, json })
}

fn run_sweep(args: &SweepArgs, tol: &TolerancePolicy) -> Result<Outcome, Error> {
    let family = Family::resolve(&args.family, args.energy, args.r)?;
    let report = sweep(&family, args.from, args.to, args.steps, tol)?;
    let text = report.to_table();
    Ok(Outcome {
        code: EXIT_AFFIRMATIVE,
        text,
        json: report::to_json(&report),
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = policy(&cli.global).and_then(|tol| match &cli.command {
        Command::Analyze { file } => run_analyze(file, &tol),
        Command::Jordan { file } => run_jordan(file, &tol),
        Command::Metric { file } => run_metric(file, &tol),
        Command::Kramers { file } => run_kramers(file, &tol),
        Command::Sweep(args) => run_sweep(args, &tol),
    });
    let outcome = match outcome {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_for(&e));
        }
    };
    if !cli.global.quiet {
        print!("{}", outcome.text);
    }
    if let Some(path) = &cli.global.output {
        if let Err(e) = fs::write(path, &outcome.json) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INPUT);
        }
    }
    ExitCode::from(outcome.code)
}

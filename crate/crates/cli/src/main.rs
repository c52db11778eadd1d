//! `blockmean` — estimate robust means from CSV files and run the Monte
//! Carlo studies.
//!
//! Exit codes: 0 success, 2 I/O failure, 3 configuration error, 4 numeric
//! failure. On failure a machine-readable JSON error object is printed to
//! standard output.

use blockmean::{
    default_delta, estimate_block_huber, estimate_multivariate, robust_sigma,
    ContaminationSweepConfig, DeltaRegime, DeviationStudyConfig, EstimatorConfig,
    RegimeSweepConfig, ScoreFunction, UstatAgreementConfig,
};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const EXIT_IO: u8 = 2;
const EXIT_CONFIG: u8 = 3;
const EXIT_NUMERIC: u8 = 4;

#[derive(Parser)]
#[command(name = "blockmean", version, about = "Robust mean estimation and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a scalar mean from a one-column CSV file.
    Estimate(EstimateArgs),
    /// Estimate a multivariate mean from a d-column CSV file.
    EstimateMv(EstimateMvArgs),
    /// Run the deviation-quantile study from a JSON config.
    StudyDeviation(StudyArgs),
    /// Run the truncation/block regime sweep from a JSON config.
    StudyRegimes(StudyArgs),
    /// Run the contamination scaling sweep from a JSON config.
    StudyContamination(StudyArgs),
    /// Run the U-statistic agreement study from a JSON config.
    StudyUstat(StudyArgs),
    /// Validate a study config (or a score function) without running it.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct EstimateArgs {
    /// Headerless CSV file with one numeric column.
    #[arg(long)]
    input: PathBuf,
    /// Number of blocks.
    #[arg(long)]
    k: usize,
    /// Truncation parameter: a number, or auto:mom_like | auto:catoni_like
    /// | auto:confidence:<s>.
    #[arg(long)]
    delta: String,
    /// Block size (defaults to floor(N/k)).
    #[arg(long)]
    n: Option<usize>,
    /// Score function name: huber | smoothed_huber.
    #[arg(long, default_value = "huber")]
    score: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Absolute bracket-width tolerance of the root solve.
    #[arg(long, default_value_t = 1e-10)]
    root_tol: f64,
}

#[derive(Args)]
struct EstimateMvArgs {
    #[command(flatten)]
    base: EstimateArgs,
    /// Number of random sphere directions (basis directions are always added).
    #[arg(long, default_value_t = 16)]
    directions: usize,
    /// Slab-intersection solver tolerance.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct StudyArgs {
    /// JSON config file for the study.
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to $BLOCKMEAN_OUTPUT_DIR, then ".".
    #[arg(long)]
    output_dir: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    /// Study kind of the config file: deviation | regimes | contamination | ustat.
    #[arg(long, requires = "config")]
    study: Option<String>,
    /// JSON config file to validate.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Score function to validate numerically: huber | smoothed_huber.
    #[arg(long)]
    score: Option<String>,
}

struct Failure {
    code: u8,
    body: serde_json::Value,
}

impl Failure {
    fn new(code: u8, kind: &str, message: String) -> Self {
        Failure {
            code,
            body: json!({ "kind": kind, "message": message }),
        }
    }

    fn parse(line: usize, message: String) -> Self {
        Failure {
            code: EXIT_IO,
            body: json!({ "kind": "parse", "line": line, "message": message }),
        }
    }
}

impl From<blockmean::Error> for Failure {
    fn from(err: blockmean::Error) -> Self {
        let (code, kind) = match err {
            blockmean::Error::Io(_) => (EXIT_IO, "io"),
            blockmean::Error::Numeric(_) | blockmean::Error::Domain(_) => (EXIT_NUMERIC, "numeric"),
            _ => (EXIT_CONFIG, "config"),
        };
        Failure::new(code, kind, err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if err.use_stderr() => {
            let f = Failure::new(EXIT_CONFIG, "config", err.to_string());
            println!("{}", serde_json::to_string_pretty(&f.body).unwrap());
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(err) => {
            // --help / --version
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    let outcome = match cli.command {
        Command::Estimate(args) => cmd_estimate(&args),
        Command::EstimateMv(args) => cmd_estimate_mv(&args),
        Command::StudyDeviation(args) => cmd_study(&args, StudyKind::Deviation),
        Command::StudyRegimes(args) => cmd_study(&args, StudyKind::Regimes),
        Command::StudyContamination(args) => cmd_study(&args, StudyKind::Contamination),
        Command::StudyUstat(args) => cmd_study(&args, StudyKind::Ustat),
        Command::Validate(args) => cmd_validate(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            println!("{}", serde_json::to_string_pretty(&f.body).unwrap());
            ExitCode::from(f.code)
        }
    }
}

// ---------------------------------------------------------------------------
// CSV input

/// Parse a headerless CSV of numeric rows ('.' decimal separator). Every row
/// must have the same column count; errors carry 1-based line numbers.
fn read_csv_rows(path: &Path) -> Result<Vec<Vec<f64>>, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("{}: {e}", path.display())))?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for field in line.split(',') {
            let value: f64 = field.trim().parse().map_err(|_| {
                Failure::parse(lineno, format!("not a number: {:?}", field.trim()))
            })?;
            if !value.is_finite() {
                return Err(Failure::new(
                    EXIT_NUMERIC,
                    "numeric",
                    format!("non-finite entry {value} at line {lineno}"),
                ));
            }
            row.push(value);
        }
        if let Some(first) = rows.first() {
            if row.len() != first.len() {
                return Err(Failure::parse(
                    lineno,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Failure::new(
            EXIT_CONFIG,
            "config",
            format!("{}: no data rows", path.display()),
        ));
    }
    Ok(rows)
}

// ---------------------------------------------------------------------------
// delta resolution

enum DeltaArg {
    Numeric(f64),
    Auto(DeltaRegime),
}

fn parse_delta(spec: &str) -> Result<DeltaArg, Failure> {
    if let Some(regime) = spec.strip_prefix("auto:") {
        let regime = match regime {
            "mom_like" => DeltaRegime::MomLike,
            "catoni_like" => DeltaRegime::CatoniLike,
            other => match other.strip_prefix("confidence:") {
                Some(s) => {
                    let s: f64 = s.parse().map_err(|_| {
                        Failure::new(
                            EXIT_CONFIG,
                            "config",
                            format!("bad confidence parameter in --delta {spec:?}"),
                        )
                    })?;
                    DeltaRegime::Confidence(s)
                }
                None => {
                    return Err(Failure::new(
                        EXIT_CONFIG,
                        "config",
                        format!(
                            "unknown regime in --delta {spec:?}; expected \
                             auto:mom_like, auto:catoni_like or auto:confidence:<s>"
                        ),
                    ))
                }
            },
        };
        return Ok(DeltaArg::Auto(regime));
    }
    let value: f64 = spec.parse().map_err(|_| {
        Failure::new(EXIT_CONFIG, "config", format!("bad --delta value {spec:?}"))
    })?;
    if !(value > 0.0 && value.is_finite()) {
        return Err(Failure::new(
            EXIT_CONFIG,
            "config",
            format!("--delta must be positive and finite, got {value}"),
        ));
    }
    Ok(DeltaArg::Numeric(value))
}

fn build_config(args: &EstimateArgs, delta: f64) -> Result<EstimatorConfig, Failure> {
    let score = ScoreFunction::from_name(&args.score)?;
    let mut cfg = EstimatorConfig::new(args.k, delta)
        .with_seed(args.seed)
        .with_score(score);
    cfg.n = args.n;
    cfg.root_tol = args.root_tol;
    Ok(cfg)
}

fn print_json<T: Serialize>(value: &T) {
    println!("{}", serde_json::to_string_pretty(value).unwrap());
}

// ---------------------------------------------------------------------------
// commands

fn cmd_estimate(args: &EstimateArgs) -> Result<(), Failure> {
    let rows = read_csv_rows(&args.input)?;
    if rows[0].len() != 1 {
        return Err(Failure::new(
            EXIT_CONFIG,
            "config",
            format!("estimate expects one column, found {}", rows[0].len()),
        ));
    }
    let sample: Vec<f64> = rows.into_iter().map(|r| r[0]).collect();
    let delta = match parse_delta(&args.delta)? {
        DeltaArg::Numeric(v) => v,
        DeltaArg::Auto(regime) => default_delta(&sample, args.k, regime, args.seed)?,
    };
    let cfg = build_config(args, delta)?;
    let result = estimate_block_huber(&sample, &cfg)?;
    print_json(&json!({
        "command": "estimate",
        "input": args.input,
        "sample_size": sample.len(),
        "delta_resolved": delta,
        "result": result,
    }));
    Ok(())
}

fn cmd_estimate_mv(args: &EstimateMvArgs) -> Result<(), Failure> {
    let rows = read_csv_rows(&args.base.input)?;
    let delta = match parse_delta(&args.base.delta)? {
        DeltaArg::Numeric(v) => v,
        DeltaArg::Auto(regime) => {
            // scale reference from the pooled coordinates
            let pooled: Vec<f64> = rows.iter().flatten().copied().collect();
            match regime {
                DeltaRegime::MomLike => robust_sigma(&pooled, args.base.k, args.base.seed)?,
                _ => default_delta(&pooled, args.base.k, regime, args.base.seed)?,
            }
        }
    };
    let cfg = build_config(&args.base, delta)?;
    let solution = estimate_multivariate(&rows, args.directions, &cfg, args.tol)?;
    print_json(&json!({
        "command": "estimate-mv",
        "input": args.base.input,
        "sample_size": rows.len(),
        "dim": rows[0].len(),
        "directions": args.directions,
        "tol": args.tol,
        "delta_resolved": delta,
        "config": cfg,
        "solution": solution,
    }));
    Ok(())
}

#[derive(Clone, Copy)]
enum StudyKind {
    Deviation,
    Regimes,
    Contamination,
    Ustat,
}

impl StudyKind {
    fn from_name(name: &str) -> Result<Self, Failure> {
        match name {
            "deviation" => Ok(StudyKind::Deviation),
            "regimes" => Ok(StudyKind::Regimes),
            "contamination" => Ok(StudyKind::Contamination),
            "ustat" => Ok(StudyKind::Ustat),
            other => Err(Failure::new(
                EXIT_CONFIG,
                "config",
                format!("unknown study kind {other:?}"),
            )),
        }
    }
}

fn read_config<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| {
        Failure::new(
            EXIT_CONFIG,
            "config",
            format!("{}: {e}", path.display()),
        )
    })
}

fn output_dir(args: &StudyArgs) -> PathBuf {
    args.output_dir
        .clone()
        .or_else(|| std::env::var_os("BLOCKMEAN_OUTPUT_DIR").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

fn write_study_outputs<R: Serialize>(
    dir: &Path,
    study_id: &str,
    rows: &[blockmean::CsvRow],
    summary: &R,
) -> Result<(), Failure> {
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("{}: {e}", dir.display())))?;
    let csv_path = dir.join(format!("{study_id}.csv"));
    let mut csv = Vec::new();
    blockmean::write_csv(&mut csv, rows)?;
    std::fs::write(&csv_path, csv)
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("{}: {e}", csv_path.display())))?;
    let json_path = dir.join(format!("{study_id}_summary.json"));
    std::fs::write(&json_path, serde_json::to_string_pretty(summary).unwrap())
        .map_err(|e| Failure::new(EXIT_IO, "io", format!("{}: {e}", json_path.display())))?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "study_id": study_id,
            "csv": csv_path,
            "summary": json_path,
        }))
        .unwrap()
    );
    Ok(())
}

fn cmd_study(args: &StudyArgs, kind: StudyKind) -> Result<(), Failure> {
    let dir = output_dir(args);
    match kind {
        StudyKind::Deviation => {
            let cfg: DeviationStudyConfig = read_config(&args.config)?;
            let report = blockmean::run_deviation_study(&cfg)?;
            let summary = json!({ "config": cfg, "report": report });
            write_study_outputs(&dir, &report.study_id, &report.csv_rows(), &summary)
        }
        StudyKind::Regimes => {
            let cfg: RegimeSweepConfig = read_config(&args.config)?;
            let report = blockmean::run_regime_sweep(&cfg)?;
            let summary = json!({ "config": cfg, "report": report });
            write_study_outputs(&dir, &report.study_id, &report.csv_rows(), &summary)
        }
        StudyKind::Contamination => {
            let cfg: ContaminationSweepConfig = read_config(&args.config)?;
            let report = blockmean::run_contamination_sweep(&cfg)?;
            let rows = report.csv_rows(cfg.dist.family_name(), cfg.sample_size);
            let summary = json!({ "config": cfg, "report": report });
            write_study_outputs(&dir, &report.study_id, &rows, &summary)
        }
        StudyKind::Ustat => {
            let cfg: UstatAgreementConfig = read_config(&args.config)?;
            let report = blockmean::run_ustat_agreement(&cfg)?;
            let rows = report.csv_rows(
                cfg.dist.family_name(),
                cfg.sample_size,
                cfg.subset_size,
                cfg.delta,
            );
            let summary = json!({ "config": cfg, "report": report });
            write_study_outputs(&dir, &report.study_id, &rows, &summary)
        }
    }
}

fn cmd_validate(args: &ValidateArgs) -> Result<(), Failure> {
    if args.study.is_none() && args.score.is_none() {
        return Err(Failure::new(
            EXIT_CONFIG,
            "config",
            "validate needs --study with --config, and/or --score".into(),
        ));
    }
    let mut output = serde_json::Map::new();
    if let Some(study) = &args.study {
        let path = args.config.as_ref().expect("clap requires config");
        let resolved = match StudyKind::from_name(study)? {
            StudyKind::Deviation => {
                let cfg: DeviationStudyConfig = read_config(path)?;
                cfg.validate()?;
                serde_json::to_value(&cfg).unwrap()
            }
            StudyKind::Regimes => {
                let cfg: RegimeSweepConfig = read_config(path)?;
                cfg.dist.validate()?;
                serde_json::to_value(&cfg).unwrap()
            }
            StudyKind::Contamination => {
                let cfg: ContaminationSweepConfig = read_config(path)?;
                cfg.validate()?;
                serde_json::to_value(&cfg).unwrap()
            }
            StudyKind::Ustat => {
                let cfg: UstatAgreementConfig = read_config(path)?;
                cfg.validate()?;
                serde_json::to_value(&cfg).unwrap()
            }
        };
        output.insert("study".into(), json!(study));
        output.insert("config".into(), resolved);
    }
    if let Some(score) = &args.score {
        let score_fn = ScoreFunction::from_name(score)?;
        let report = blockmean::validate_assumption(&score_fn, 1e-3)?;
        output.insert("score".into(), json!(score));
        output.insert("score_validation".into(), serde_json::to_value(&report).unwrap());
        if report.max_violation() > 1e-12 {
            output.insert("valid".into(), json!(false));
            println!("{}", serde_json::to_string_pretty(&output).unwrap());
            return Err(Failure::new(
                EXIT_NUMERIC,
                "numeric",
                format!("score violates the assumptions by {}", report.max_violation()),
            ));
        }
    }
    output.insert("valid".into(), json!(true));
    println!("{}", serde_json::to_string_pretty(&output).unwrap());
    Ok(())
}

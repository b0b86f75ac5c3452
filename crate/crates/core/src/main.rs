use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use qhm::report::{parse_config, run_job, serialize_report, ReportError, EXIT_ASSERT_FAILED};

/// Run a metric verification job and write report.json and tables.csv.
#[derive(Parser, Debug)]
#[command(name = "qhm", version)]
struct Cli {
    /// JSON job description.
    jobfile: PathBuf,
    /// Exit with status 1 when any verdict fails.
    #[arg(long)]
    assert: bool,
    /// Output directory (overrides `out_dir` in the job file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated grid sizes, e.g. 129,257,513.
    #[arg(long, value_delimiter = ',')]
    refine: Option<Vec<usize>>,
}

fn run(cli: &Cli) -> Result<bool, ReportError> {
    let text = std::fs::read_to_string(&cli.jobfile)
        .map_err(|e| ReportError::Io(format!("{}: {e}", cli.jobfile.display())))?;
    let mut cfg = parse_config(&text)?;
    if let Some(sizes) = &cli.refine {
        cfg.grid.refinement = Some(sizes.clone());
        cfg.validate()?;
    }
    if let Some(out) = &cli.out {
        cfg.out_dir = Some(out.clone());
    }
    let doc = run_job(&cfg)?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let (json, csv) = serialize_report(&doc, &dir)?;
    for v in &doc.verdicts {
        println!(
            "{}: {} ({:?} {} {})",
            v.name,
            v.label(),
            v.value,
            v.comparison,
            v.limit
        );
    }
    println!("wrote {} and {}", json.display(), csv.display());
    Ok(doc.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = std::env::var("QHM_LOG").unwrap_or_else(|_| "error".into());
    if !matches!(level.as_str(), "error" | "info" | "debug") {
        eprintln!("QHM_LOG must be one of error, info, debug; using error");
    }
    env_logger::Builder::new()
        .parse_filters(match level.as_str() {
            "info" | "debug" => &level,
            _ => "error",
        })
        .init();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) if cli.assert => ExitCode::from(EXIT_ASSERT_FAILED as u8),
        Ok(false) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qhm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

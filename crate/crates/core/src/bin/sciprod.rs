use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sciprod::analytics::write_reports;
use sciprod::baselines::write_baselines;
use sciprod::config::{parse_country_pair, ReportFormat, RunConfig, RunConfigFile};
use sciprod::ingest::{load_dataset, Country, DatasetPaths, ValidationReport};
use sciprod::pipeline::{compute, create_file, load_validated, with_threads, write_cohort, write_indicators};
use sciprod::synth::{generate, SynthConfig};
use sciprod::validate::validate_dataset;
use sciprod::{Error, Output, Result};

#[derive(Parser)]
#[command(name = "sciprod", version, about = "Research productivity indicators and country comparisons")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the input tables and write validation_report.json.
    Validate(RunArgs),
    /// Compute per-professor indicators (indicators.csv, cohort.csv).
    Compute(RunArgs),
    /// Compute indicators and write the comparison reports.
    Report(RunArgs),
    /// Validate, compute and report in one go.
    Run(RunArgs),
    /// Write a synthetic dataset.
    Generate(GenerateArgs),
}

#[derive(Args, Clone)]
struct RunArgs {
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Directory holding the seven input tables under their standard names.
    #[arg(long)]
    input_dir: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0: all cores).
    #[arg(long)]
    parallel: Option<usize>,
    #[arg(long, value_enum)]
    format: Option<ReportFormat>,
    /// Also write report.txt.
    #[arg(long)]
    text: bool,
    #[arg(long)]
    top_k: Option<usize>,
    #[arg(long)]
    decile: Option<f64>,
    /// Country pair A,B: gaps are A minus B.
    #[arg(long, value_delimiter = ',')]
    countries: Option<Vec<String>>,
    /// Write the (year, SC) baseline cells to this CSV.
    #[arg(long)]
    emit_baselines: Option<PathBuf>,
}

#[derive(Clone, Copy, clap::ValueEnum)]
enum Preset {
    /// 40 professors, 3 SCs.
    Small,
    /// 1000 professors, 12 SCs.
    Standard,
    /// 40 000 professors, 180 SCs, about half a million publications.
    Large,
}

#[derive(Args)]
struct GenerateArgs {
    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Synthetic-data TOML.
    #[arg(long, conflicts_with = "preset")]
    config: Option<PathBuf>,
    /// Built-in setup used without `--config`.
    #[arg(long, value_enum, default_value = "standard")]
    preset: Preset,
    #[arg(long)]
    out: PathBuf,
}

fn resolve(args: &RunArgs) -> Result<RunConfig> {
    let mut cfg = match &args.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::from_parts(RunConfigFile::default(), Path::new("."))?,
    };
    if let Some(dir) = &args.input_dir {
        cfg.inputs = DatasetPaths::in_dir(dir);
    }
    if let Some(out) = &args.out {
        cfg.out_dir = out.clone();
    }
    if let Some(n) = args.parallel {
        cfg.parallel = n;
    }
    if let Some(f) = args.format {
        cfg.report.format = f;
    }
    cfg.report.text |= args.text;
    if let Some(k) = args.top_k {
        cfg.report.top_k = k;
    }
    if let Some(d) = args.decile {
        cfg.report.decile = d;
    }
    if let Some(c) = &args.countries {
        let codes: Vec<Country> = c.iter().map(|s| Country::new(s.trim())).collect();
        cfg.report.countries = Some(parse_country_pair(&codes)?);
    }
    if let Some(p) = &args.emit_baselines {
        cfg.emit_baselines = Some(p.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn write_validation(cfg: &RunConfig, report: &ValidationReport) -> Result<()> {
    let path = cfg.out_dir.join("validation_report.json");
    let mut file = create_file(&path)?;
    serde_json::to_writer_pretty(&mut file, report)?;
    std::io::Write::write_all(&mut file, b"\n").map_err(|e| Error::Io { path, source: e })
}

fn cmd_validate(cfg: &RunConfig) -> Result<bool> {
    let loaded = load_dataset(&cfg.inputs, cfg.analysis.observation_window)?;
    let report = validate_dataset(&loaded, &cfg.analysis);
    write_validation(cfg, &report)?;
    for issue in report.fatal_issues() {
        log::error!("{issue}");
    }
    println!(
        "{}: {} fatal, {} row errors, {} warnings",
        if report.valid { "valid" } else { "invalid" },
        report.fatal,
        report.errors,
        report.warnings
    );
    Ok(report.valid)
}

fn cmd_compute(cfg: &RunConfig) -> Result<Output> {
    let (bundle, validation) = load_validated(&cfg.inputs, &cfg.analysis)?;
    log::info!("{} warning(s) during validation", validation.warnings);
    let output = compute::<f64>(&bundle, &cfg.analysis)?;
    write_indicators(&output.results, create_file(&cfg.out_dir.join("indicators.csv"))?)?;
    write_cohort(&output.cohort, create_file(&cfg.out_dir.join("cohort.csv"))?)?;
    if let Some(path) = &cfg.emit_baselines {
        write_baselines(&output.baselines, create_file(path)?)?;
    }
    println!(
        "{} of {} professors in the cohort",
        output.results.len(),
        output.cohort.assignments.len()
    );
    Ok(output)
}

fn cmd_report(cfg: &RunConfig, output: &Output) -> Result<()> {
    let bundle = output.report(&cfg.report)?;
    let written = write_reports(&bundle, &cfg.out_dir, cfg.report.format, cfg.report.text)?;
    println!("wrote {} report file(s) to {}", written.len(), cfg.out_dir.display());
    Ok(())
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let mut cfg = match &args.config {
        Some(path) => SynthConfig::from_file(path)?,
        None => match args.preset {
            Preset::Small => SynthConfig::small(0),
            Preset::Standard => SynthConfig::standard(0),
            Preset::Large => SynthConfig::large(0),
        },
    };
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let bundle = generate(&cfg)?;
    bundle.write_dir(&args.out)?;
    println!(
        "generated {} professors, {} publications in {}",
        bundle.professors.len(),
        bundle.publications.len(),
        args.out.display()
    );
    Ok(())
}

/// Exit code 1 for bad inputs or configuration, 2 for anything else.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Invalid(_) | Error::Schema { .. } | Error::Config { .. } => 1,
        _ => 2,
    }
}

fn report_error(err: &Error) -> ExitCode {
    let mut body = json!({
        "error": err.kind(),
        "module": err.module(),
        "message": err.to_string(),
    });
    if let Error::Invalid(issues) = err {
        body["issues"] = json!(issues);
    }
    eprintln!("{body}");
    ExitCode::from(exit_code(err))
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Generate(args) => cmd_generate(&args).map(|_| true),
        Command::Validate(args) => {
            let cfg = resolve(&args)?;
            with_threads(cfg.parallel, || cmd_validate(&cfg))?
        }
        Command::Compute(args) => {
            let cfg = resolve(&args)?;
            with_threads(cfg.parallel, || cmd_compute(&cfg).map(|_| true))?
        }
        Command::Report(args) => {
            let cfg = resolve(&args)?;
            with_threads(cfg.parallel, || {
                let (bundle, _) = load_validated(&cfg.inputs, &cfg.analysis)?;
                let output = compute::<f64>(&bundle, &cfg.analysis)?;
                cmd_report(&cfg, &output).map(|_| true)
            })?
        }
        Command::Run(args) => {
            let cfg = resolve(&args)?;
            with_threads(cfg.parallel, || {
                if !cmd_validate(&cfg)? {
                    return Ok(false);
                }
                let output = cmd_compute(&cfg)?;
                cmd_report(&cfg, &output).map(|_| true)
            })?
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("SCIPROD_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("{}", json!({"error": "invalid_dataset", "module": "ingestion", "message": "validation failed; see validation_report.json"}));
            ExitCode::from(1)
        }
        Err(e) => report_error(&e),
    }
}

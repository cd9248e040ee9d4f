use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use riseval_harness::config::HarnessConfig;
use riseval_harness::pipeline::{self, StageAction};
use riseval_harness::HarnessError;
use riseval_harness::store::Run;
use riseval_harness::{corpus, engines, report};

#[derive(Parser)]
#[command(
    name = "riseval",
    version,
    about = "Measures how retrievable images are through reverse image search engines"
)]
struct Cli {
    /// Configuration file; RISEVAL_CONFIG or ./riseval.toml otherwise.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Run identifier under the runs directory.
    #[arg(long, global = true, default_value = "default")]
    run: String,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fetch scaled renditions for each category term and deduplicate
    /// them into the corpus snapshot.
    Acquire(AcquireArgs),
    /// Upload every corpus image to the enabled engines, archive the
    /// responses, and parse them into the SER log.
    Submit(SubmitArgs),
    /// Fetch result thumbnails and judge each against its query image.
    Judge(JudgeArgs),
    /// Render coverage tables, metric CSVs, and figures.
    Report,
    /// Run acquire, submit, judge, and report in order, skipping
    /// stages whose inputs have not changed.
    Pipeline,
}

#[derive(Args)]
struct AcquireArgs {
    /// Comma-separated search terms; each doubles as the category label.
    #[arg(long, value_delimiter = ',')]
    terms: Vec<String>,
    /// Images to request per term.
    #[arg(long)]
    per_term: Option<usize>,
    /// Rendition width in pixels.
    #[arg(long)]
    width: Option<u32>,
    /// Corpus directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SubmitArgs {
    /// Comma-separated engines to submit to.
    #[arg(long, value_delimiter = ',')]
    engines: Vec<String>,
    /// Corpus directory.
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Rebuild the SER log from archived bundles without uploading.
    #[arg(long)]
    reparse: bool,
}

#[derive(Args)]
struct JudgeArgs {
    /// Comma-separated hash methods (phash, vishash).
    #[arg(long, value_delimiter = ',')]
    methods: Vec<String>,
    /// Identity threshold for pHash, in Hamming bits.
    #[arg(long)]
    phash_bits: Option<u32>,
    /// Identity threshold for VisHash, as a normalized distance.
    #[arg(long)]
    vishash_distance: Option<f64>,
}

const EXIT_PARTIAL: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[tokio::main]
async fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| "riseval=info,riseval_harness=info".into()),
        )
        .with_writer(std::io::stderr)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };

    match run(cli).await {
        Ok(code) => code,
        Err(HarnessError::Config(e)) => {
            eprintln!("configuration error: {e}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

async fn run(cli: Cli) -> Result<ExitCode, HarnessError> {
    let mut config = HarnessConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Acquire(args) => {
            if !args.terms.is_empty() {
                config.acquire.terms = args.terms;
            }
            if let Some(per_term) = args.per_term {
                config.acquire.per_term = per_term;
            }
            if let Some(width) = args.width {
                config.acquire.width = width;
            }
            if let Some(out) = args.out {
                config.paths.corpus_dir = out;
            }
            config.validate()?;
            let outcome = corpus::acquire_corpus(&config).await?;
            let counts = outcome.snapshot.category_counts();
            println!(
                "corpus: {} unique images ({} fetched this invocation, {} download failures)",
                outcome.snapshot.images.len(),
                outcome.downloaded,
                outcome.failures.len()
            );
            for (category, count) in counts {
                println!("  {}: {count}", category.as_str());
            }
            for shortfall in &outcome.snapshot.shortfalls {
                println!(
                    "  note: {} returned {} of {} requested",
                    shortfall.category.as_str(),
                    shortfall.found,
                    shortfall.requested
                );
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Submit(args) => {
            if !args.engines.is_empty() {
                config.engines.enabled = args.engines;
            }
            if let Some(dir) = args.corpus {
                config.paths.corpus_dir = dir;
            }
            config.validate()?;
            let mut run = Run::open_or_create(&config.paths.runs_dir, &cli.run, config.thresholds()?)?;
            if args.reparse {
                let records = engines::reparse_run(&run)?;
                println!("reparsed {records} records from archived bundles");
                return Ok(ExitCode::SUCCESS);
            }
            let outcome = pipeline::submit_stage(&config, &mut run).await?;
            println!(
                "submit: {} queries submitted, {} resumed from archive, {} records, {} failures",
                outcome.submitted,
                outcome.resumed,
                outcome.records,
                outcome.failures.len()
            );
            let partial = report::run_is_partial(&run)?;
            Ok(exit_for(partial))
        }
        Command::Judge(args) => {
            if !args.methods.is_empty() {
                config.judge.methods = args.methods;
            }
            if let Some(bits) = args.phash_bits {
                config.judge.phash_bits = bits;
            }
            if let Some(distance) = args.vishash_distance {
                config.judge.vishash_distance = distance;
            }
            config.validate()?;
            let mut run = Run::open(&config.paths.runs_dir, &cli.run)?;
            let summary = pipeline::judge_stage(&config, &mut run).await?;
            println!(
                "judge: {} records, {} judgments across {} method(s)",
                summary.records,
                summary.judgments,
                summary.methods.len()
            );
            for (failure, count) in &summary.failure_counts {
                let percent = summary.failure_percent.get(failure).copied().unwrap_or(0.0);
                println!("  {failure}: {count} ({percent:.3}%)");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Report => {
            let mut run = Run::open(&config.paths.runs_dir, &cli.run)?;
            let outcome = pipeline::report_stage(&config, &mut run)?;
            println!("report written to {}", outcome.report_dir.display());
            for notice in &outcome.notices {
                println!("  note: {notice}");
            }
            Ok(exit_for(outcome.partial))
        }
        Command::Pipeline => {
            let outcome = pipeline::run_pipeline(&config, &cli.run).await?;
            for (stage, action) in &outcome.stages {
                let verb = match action {
                    StageAction::Ran => "ran",
                    StageAction::Skipped => "skipped (up to date)",
                };
                println!("{}: {verb}", stage.as_str());
            }
            println!("report written to {}", outcome.report_dir.display());
            for notice in &outcome.notices {
                println!("  note: {notice}");
            }
            Ok(exit_for(outcome.partial))
        }
    }
}

fn exit_for(partial: bool) -> ExitCode {
    if partial {
        ExitCode::from(EXIT_PARTIAL)
    } else {
        ExitCode::SUCCESS
    }
}

mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};
use itinguard::corrector::{CorrectionError, CorrectionTrace, Field};
use itinguard::duration::{AeroDataBoxClient, DEFAULT_BASE_URL};
use itinguard::gateway::{
    generate_itinerary_with, City, GenerationClient, GenerationError, GenerationRequest, LiveClient, ReplayClient,
    DEFAULT_MAX_RETRIES,
};
use itinguard::metrics::{evaluate_entry, load_manifest, CorpusRecord};
use itinguard::validator::Subject;
use itinguard::{
    aggregate, correct, parse_itinerary_any, render_stats, validate, CachingProvider, Exact, FixtureProvider,
    FlightDurations, GreatCircleProvider, Issue, Itinerary, ProviderConfig, SegmentCounting, ValidationError,
    ValidationReport,
};
use rayon::prelude::*;
use serde_json::json;

use crate::config::{AppConfig, Layer, OutputFormat, ProviderKind};

const EXIT_VALID: u8 = 0;
const EXIT_INVALID: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;
const EXIT_GENERATION: u8 = 4;

#[derive(Parser)]
#[command(name = "itinguard", version, about = "Validate and repair multi-city flight itineraries")]
struct Cli {
    #[command(flatten)]
    settings: Settings,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Settings {
    /// JSON config file; flags override it, it overrides ITINGUARD_* variables.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    provider: Option<ProviderKind>,
    /// Route durations, one `ORIGIN DEST minutes` line each (fixture provider).
    #[arg(long, global = true)]
    fixture_file: Option<PathBuf>,
    #[arg(long, global = true)]
    buffer_hours: Option<f64>,
    #[arg(long, global = true)]
    min_stay_hours: Option<f64>,
    #[arg(long, global = true)]
    max_multiplier: Option<f64>,
    /// Attempts per uncached route (live provider).
    #[arg(long, global = true)]
    max_retries: Option<u32>,
    /// Treat a route without duration data as an error.
    #[arg(long, global = true)]
    strict: bool,
    /// Print the adjustment log to stderr.
    #[arg(long, global = true)]
    trace: bool,
    #[arg(long, global = true, value_enum)]
    format: Option<OutputFormat>,
    /// Persistent route cache (live provider).
    #[arg(long, global = true)]
    cache_file: Option<PathBuf>,
    /// Worker threads for bench; 0 picks one per core.
    #[arg(long, global = true)]
    workers: Option<usize>,
}

impl Settings {
    fn layer(&self) -> Layer {
        Layer {
            provider: self.provider,
            fixture_file: self.fixture_file.clone(),
            buffer_hours: self.buffer_hours,
            min_stay_hours: self.min_stay_hours,
            max_multiplier: self.max_multiplier,
            max_retries: self.max_retries,
            strict: self.strict.then_some(true),
            trace: self.trace.then_some(true),
            format: self.format,
            cache_file: self.cache_file.clone(),
            workers: self.workers,
            aerodatabox_api_key: None,
        }
    }

    fn resolve(&self) -> Result<AppConfig> {
        let file = match &self.config {
            Some(path) => Layer::from_file(path)?,
            None => Layer::default(),
        };
        AppConfig::resolve(self.layer().or(file).or(Layer::from_env()?))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check itinerary files; exit 1 if any has issues.
    Validate {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
    },
    /// Repair an itinerary and print the corrected document.
    Correct {
        input: PathBuf,
        /// Write the corrected document here instead of stdout.
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Ask a model for an itinerary, then validate and repair it.
    Generate(GenerateArgs),
    /// Validate a corpus listed in a manifest and print per-group statistics.
    Bench {
        manifest: PathBuf,
        #[arg(long, value_enum, default_value = "segments-only")]
        counting: Counting,
    },
}

#[derive(Args)]
struct GenerateArgs {
    /// Candidate cities as `Name (XXX)`, comma separated or repeated.
    #[arg(long, required = true, value_delimiter = ',')]
    cities: Vec<String>,
    #[arg(long, default_value_t = 4)]
    destinations: usize,
    #[arg(long, default_value = "2025-06-01")]
    start: NaiveDate,
    #[arg(long, default_value = "2025-06-30")]
    end: NaiveDate,
    /// Visit the first `destinations` cities in the given order.
    #[arg(long)]
    fixed_sequence: bool,
    /// Serve recorded responses from `<dir>/<model-tag>/<destinations>/`.
    #[arg(long)]
    replay_dir: Option<PathBuf>,
    #[arg(long, default_value = "replay")]
    model_tag: String,
    /// Chat-completions URL for a live model; the key is read from `<TAG>_API_KEY`.
    #[arg(long, conflicts_with = "replay_dir")]
    endpoint: Option<String>,
    #[arg(long, default_value = "gpt-4o-mini")]
    model: String,
    /// Retries after the first attempt when the response is malformed.
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    generation_retries: u32,
    /// Print the generated itinerary without repairing it.
    #[arg(long)]
    no_correct: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Counting {
    SegmentsOnly,
    IncludeStays,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}

fn run(cli: Cli) -> Result<u8> {
    let cfg = cli.settings.resolve()?;
    match cli.command {
        Command::Validate { inputs } => cmd_validate(&inputs, &cfg),
        Command::Correct { input, output } => cmd_correct(&input, output.as_deref(), &cfg),
        Command::Generate(args) => cmd_generate(&args, &cfg),
        Command::Bench { manifest, counting } => cmd_bench(&manifest, counting, &cfg),
    }
}

fn build_provider(cfg: &AppConfig) -> Result<Box<dyn FlightDurations>> {
    Ok(match cfg.provider {
        ProviderKind::GreatCircle => Box::new(GreatCircleProvider::new()),
        ProviderKind::Fixture => {
            let path = cfg.fixture_file.as_ref().context("the fixture provider needs --fixture-file")?;
            Box::new(FixtureProvider::from_file(path).map_err(anyhow::Error::msg)?)
        }
        ProviderKind::Live => {
            let key = cfg.aerodatabox_api_key.clone().with_context(|| {
                format!("the live provider needs {}", itinguard::duration::API_KEY_ENV)
            })?;
            let provider_config = ProviderConfig {
                buffer: cfg.policy.buffer,
                max_retries: cfg.max_retries,
                cache_path: cfg.cache_file.clone(),
                strict_mode: cfg.policy.strict_mode,
            };
            let source = AeroDataBoxClient::new(DEFAULT_BASE_URL, Some(key));
            Box::new(CachingProvider::new(source, provider_config).context("opening route cache")?)
        }
    })
}

fn read_itinerary(path: &Path) -> Result<Itinerary> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_itinerary_any(&text).with_context(|| format!("{}", path.display()))
}

fn describe_subject(itin: &Itinerary, subject: Subject) -> String {
    match subject {
        Subject::Stop(i) => format!("stop {i} {}", itin.stops()[i].label()),
        Subject::Segment(i) => {
            let s = &itin.stops();
            format!("segment {i} {} -> {}", s[i].airport, s[i + 1].airport)
        }
    }
}

fn describe_issue(itin: &Itinerary, issue: &Issue) -> String {
    let mut line = format!("{}  {}", issue.kind, describe_subject(itin, issue.subject));
    if let (Some(observed), Some(required)) = (issue.observed, issue.required) {
        line.push_str(&format!("  observed {observed}, required {required}"));
    }
    line
}

fn print_report(path: &Path, itin: &Itinerary, report: &ValidationReport) {
    let verdict = if report.is_valid() { "valid" } else { "invalid" };
    println!(
        "{}: {verdict} ({} issues, {} checks)",
        path.display(),
        report.issues.len(),
        report.checks_performed
    );
    for issue in &report.issues {
        println!("  {}", describe_issue(itin, issue));
    }
    for seg in &report.unverifiable_segments {
        println!("  unverifiable  {}", describe_subject(itin, Subject::Segment(*seg)));
    }
}

fn cmd_validate(inputs: &[PathBuf], cfg: &AppConfig) -> Result<u8> {
    let provider = build_provider(cfg)?;
    let mut code = EXIT_VALID;
    let mut json_out = Vec::new();
    for path in inputs {
        let outcome = read_itinerary(path)
            .and_then(|itin| validate(&itin, &provider, &cfg.policy).map(|r| (itin, r)).map_err(Into::into));
        match outcome {
            Ok((itin, report)) => {
                if !report.is_valid() && code == EXIT_VALID {
                    code = EXIT_INVALID;
                }
                match cfg.format {
                    OutputFormat::Json => json_out.push(json!({"file": path, "report": report})),
                    _ => print_report(path, &itin, &report),
                }
            }
            Err(e) => {
                code = EXIT_INPUT;
                match cfg.format {
                    OutputFormat::Json => json_out.push(json!({"file": path, "error": format!("{e:#}")})),
                    _ => println!("{}: error: {e:#}", path.display()),
                }
            }
        }
    }
    if cfg.format == OutputFormat::Json {
        println!("{}", serde_json::to_string_pretty(&json_out)?);
    }
    Ok(code)
}

fn print_trace(itin: &Itinerary, trace: &CorrectionTrace, format: OutputFormat) -> Result<()> {
    let mut err = std::io::stderr().lock();
    if format == OutputFormat::Json {
        writeln!(err, "{}", serde_json::to_string_pretty(trace)?)?;
        return Ok(());
    }
    writeln!(err, "{} adjustments in {} pass(es)", trace.adjustments.len(), trace.passes)?;
    for a in &trace.adjustments {
        let field = match a.field {
            Field::Arrival => "arrival",
            Field::Departure => "departure",
        };
        let shift = a.new - a.old;
        let sign = if shift.is_negative() { "" } else { "+" };
        writeln!(
            err,
            "  stop {} {} {field}: {} -> {} ({sign}{shift}, {})",
            a.stop_index,
            itin.stops()[a.stop_index].label(),
            a.old,
            a.new,
            a.reason
        )?;
    }
    for seg in &trace.skipped_segments {
        writeln!(err, "  skipped {}", describe_subject(itin, Subject::Segment(*seg)))?;
    }
    Ok(())
}

/// Maps a correction failure to its exit code after reporting it.
fn correction_failure(e: CorrectionError) -> Result<u8> {
    match e {
        CorrectionError::NonConvergence { .. } => {
            eprintln!("error: {e}");
            Ok(EXIT_NON_CONVERGENCE)
        }
        other => Err(other.into()),
    }
}

fn cmd_correct(input: &Path, output: Option<&Path>, cfg: &AppConfig) -> Result<u8> {
    let provider = build_provider(cfg)?;
    let itin = read_itinerary(input)?;
    let fixed = match correct(&itin, &provider, &cfg.policy) {
        Ok(c) => c,
        Err(e) => return correction_failure(e),
    };
    if cfg.trace {
        print_trace(&fixed.itinerary, &fixed.trace, cfg.format)?;
    }
    let rendered = fixed.itinerary.render();
    match output {
        Some(path) => fs::write(path, &rendered).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{rendered}"),
    }
    Ok(if fixed.report.is_valid() { EXIT_VALID } else { EXIT_INVALID })
}

fn cmd_generate(args: &GenerateArgs, cfg: &AppConfig) -> Result<u8> {
    let pool = args
        .cities
        .iter()
        .map(|label| City::parse(label).with_context(|| format!("city {label:?} is not of the form \"Name (XXX)\"")))
        .collect::<Result<Vec<_>>>()?;
    let fixed_sequence = args.fixed_sequence.then(|| pool.iter().take(args.destinations).cloned().collect());
    let request = GenerationRequest {
        num_destinations: args.destinations,
        city_pool: pool,
        date_window: (args.start, args.end),
        fixed_sequence,
    };
    let client: Box<dyn GenerationClient> = match (&args.replay_dir, &args.endpoint) {
        (Some(dir), _) => Box::new(ReplayClient::open(dir, &args.model_tag, args.destinations)?),
        (None, Some(endpoint)) => Box::new(LiveClient::from_env(&args.model_tag, endpoint.as_str(), args.model.as_str())?),
        (None, None) => bail!("generate needs --replay-dir or --endpoint"),
    };
    let generated = match generate_itinerary_with(&client, &request, args.generation_retries) {
        Ok(g) => g,
        Err(GenerationError::Request(e)) => return Err(e.into()),
        Err(e) => {
            eprintln!("error: {e}");
            return Ok(EXIT_GENERATION);
        }
    };
    let provider = build_provider(cfg)?;
    let report = validate(&generated.itinerary, &provider, &cfg.policy).map_err(|e: ValidationError| anyhow::Error::from(e))?;
    eprintln!(
        "generated in {} attempt(s); {} issues found",
        generated.attempts,
        report.issues.len()
    );
    if args.no_correct {
        print!("{}", generated.itinerary.render());
        return Ok(if report.is_valid() { EXIT_VALID } else { EXIT_INVALID });
    }
    let fixed = match correct(&generated.itinerary, &provider, &cfg.policy) {
        Ok(c) => c,
        Err(e) => return correction_failure(e),
    };
    eprintln!(
        "{} adjustments; {} issues remain",
        fixed.trace.adjustments.len(),
        fixed.report.issues.len()
    );
    if cfg.trace {
        print_trace(&fixed.itinerary, &fixed.trace, cfg.format)?;
    }
    print!("{}", fixed.itinerary.render());
    Ok(if fixed.report.is_valid() { EXIT_VALID } else { EXIT_INVALID })
}

fn cmd_bench(manifest: &Path, counting: Counting, cfg: &AppConfig) -> Result<u8> {
    let entries = load_manifest(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let provider = build_provider(cfg)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build()?;
    // par_iter().collect() keeps manifest order
    let results: Vec<_> = pool.install(|| {
        entries.par_iter().map(|entry| (entry, evaluate_entry(base, entry, &provider, &cfg.policy))).collect()
    });
    let mut records: Vec<CorpusRecord> = Vec::with_capacity(results.len());
    for (entry, result) in results {
        match result {
            Ok(r) => records.push(r),
            Err(e) => {
                eprintln!("warning: skipping {}: {e}", entry.file.display());
            }
        }
    }
    let counting = match counting {
        Counting::SegmentsOnly => SegmentCounting::SegmentsOnly,
        Counting::IncludeStays => SegmentCounting::IncludeStays,
    };
    let stats = aggregate::<Exact>(&records, counting);
    print!("{}", render_stats(&stats, cfg.format.into()));
    Ok(EXIT_VALID)
}

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::{Arc, Mutex};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mediascope::analyzer::Analyzer;
use mediascope::config::{ConfigError, PipelineConfig};
use mediascope::fetch::fetcher_from;
use mediascope::formats::{read_file, read_gazetteer, read_labeled_corpus, write_labeled_corpus, write_tweet_stream, FormatError, ModelKind};
use mediascope::pipeline::{load_roster, run_pipeline, FailureKind, PipelineError, Resources};
use mediascope::report::{build_report, eval_table, render_text};
use mediascope::server::{router, serve, shutdown_signal, AppState};
use mediascope::store::{DocFilter, Store, StoreError};
use mediascope::synth;
use mediascope::training::{self, TrainingError};
use mediascope_core::geo::{disambiguate, match_toponyms, RejectTags};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mediascope", version, about = "News-tweet media diagnosis toolkit")]
struct Cli {
    /// Config file (TOML); defaults to $MEDIASCOPE_CONFIG.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a setting, e.g. `--set server.port=9000`.
    #[arg(long = "set", value_name = "SECTION.KEY=VALUE", global = true)]
    overrides: Vec<String>,
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline over the configured tweet stream into the store.
    Ingest {
        #[arg(long)]
        json: bool,
    },
    /// Train the POS tagger from the tagged corpus.
    TrainTagger {
        #[arg(long)]
        out: PathBuf,
    },
    /// Train the topic classifier from the labeled corpus.
    TrainClassifier {
        #[arg(long)]
        out: PathBuf,
    },
    /// Cross-validate the classifier on the labeled corpus.
    Evaluate {
        #[arg(long)]
        folds: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        /// Decimal comma.
        #[arg(long)]
        localized: bool,
        #[arg(long)]
        json: bool,
    },
    /// Classify texts given as arguments, or one per stdin line.
    Classify { texts: Vec<String> },
    /// Resolve place names in texts given as arguments, or one per stdin line.
    Geotag { texts: Vec<String> },
    /// Indicators over the stored documents.
    Report {
        #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
        format: ReportFormat,
        #[arg(long)]
        localized: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Serve the read-only HTTP API.
    Serve {
        #[arg(long)]
        bind: Option<String>,
        #[arg(long)]
        port: Option<u16>,
    },
    /// Generate synthetic data.
    Synth(SynthArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ReportFormat {
    Text,
    Json,
}

#[derive(Args)]
struct SynthArgs {
    #[command(subcommand)]
    what: SynthCommand,
    #[arg(long, default_value_t = 42, global = true)]
    seed: u64,
}

#[derive(Subcommand)]
enum SynthCommand {
    /// Self-contained pipeline fixture directory.
    Fixture {
        dir: PathBuf,
        #[arg(long, default_value_t = 100)]
        docs: usize,
    },
    /// Labeled corpus (NDJSON).
    Corpus {
        out: PathBuf,
        #[arg(long, default_value_t = 50)]
        per_class: usize,
    },
    /// October 2015 tweet stream: 123,952 tweets, 65,572 distinct items.
    October { out: PathBuf },
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn usage(m: impl ToString) -> Self {
        CliError { code: 1, message: m.to_string() }
    }

    fn data(m: impl ToString) -> Self {
        CliError { code: 2, message: m.to_string() }
    }

    fn internal(m: impl ToString) -> Self {
        CliError { code: 3, message: m.to_string() }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Override(_) => CliError::usage(e),
            _ => CliError::data(e),
        }
    }
}

impl From<FormatError> for CliError {
    fn from(e: FormatError) -> Self {
        if e.is_io() {
            CliError::internal(e)
        } else {
            CliError::data(e)
        }
    }
}

impl From<TrainingError> for CliError {
    fn from(e: TrainingError) -> Self {
        match e {
            TrainingError::Config(c) => c.into(),
            TrainingError::Format(f) => f.into(),
            other => CliError::data(other),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e.kind {
            FailureKind::Data => CliError::data(e),
            FailureKind::Internal => CliError::internal(e),
        }
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io(_) | StoreError::Encode { .. } => CliError::internal(e),
            _ => CliError::data(e),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::internal(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn load_config(cli: &Cli) -> Result<PipelineConfig, CliError> {
    let config = PipelineConfig::discover(cli.config.as_deref(), &cli.overrides)?;
    config.validate()?;
    Ok(config)
}

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    let mut out = io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).map_err(CliError::internal)?;
    writeln!(out)?;
    Ok(())
}

/// Arguments, or stdin lines when there are none.
fn inputs(texts: &[String]) -> Result<Vec<String>, CliError> {
    if !texts.is_empty() {
        return Ok(texts.to_vec());
    }
    let mut out = Vec::new();
    for line in io::stdin().lock().lines() {
        let line = line?;
        if !line.trim().is_empty() {
            out.push(line);
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Ingest { json } => {
            let config = load_config(&cli)?;
            let resources = Resources::load(&config)?;
            let fetcher = fetcher_from(&config)?;
            let summary = run_pipeline(&config, &resources, fetcher.as_ref())?;
            if *json {
                print_json(&summary)?;
            } else {
                print!("{summary}");
            }
        }
        Command::TrainTagger { out } => {
            let config = load_config(&cli)?;
            let corpus = config.require("paths.tagged_corpus", &config.paths.tagged_corpus)?;
            let model = training::train_tagger_file(corpus, config.nlp.hmm_alpha)?;
            training::save_model_file(ModelKind::Tagger, &model, out)?;
            println!("tagger: {} tags, {} words -> {}", model.tagset().len(), model.vocabulary_size(), out.display());
        }
        Command::TrainClassifier { out } => {
            let mut config = load_config(&cli)?;
            config.paths.classifier_model = None;
            let analyzer = training::analyzer_from(&config)?;
            let model = training::classifier_from(&config, &analyzer)?;
            training::save_model_file(ModelKind::Classifier, &model, out)?;
            println!("classifier: {} labels, {} features -> {}", model.labels.len(), model.vocabulary.len(), out.display());
        }
        Command::Evaluate { folds, seed, localized, json } => {
            let config = load_config(&cli)?;
            let analyzer = training::analyzer_from(&config)?;
            let corpus = config.require("paths.labeled_corpus", &config.paths.labeled_corpus)?;
            let docs = read_file(corpus, read_labeled_corpus)?;
            let report = training::evaluate_lemmatized(
                &training::labeled_lemmas(&docs, &analyzer),
                folds.unwrap_or(config.classifier.folds),
                seed.unwrap_or(config.classifier.seed),
                &config.classifier.svm_params(),
            )?;
            for w in &report.warnings {
                log::warn!("{w}");
            }
            if *json {
                print_json(&report)?;
            } else {
                print!("{}", eval_table(&report, *localized));
            }
        }
        Command::Classify { texts } => {
            let config = load_config(&cli)?;
            let analyzer = training::analyzer_from(&config)?;
            let model = training::classifier_from(&config, &analyzer)?;
            for (i, text) in inputs(texts)?.iter().enumerate() {
                let c = model.classify(&model.featurize(&i.to_string(), &analyzer.lemmas(text)));
                println!("{}", serde_json::to_string(&c).map_err(CliError::internal)?);
            }
        }
        Command::Geotag { texts } => {
            let config = load_config(&cli)?;
            let analyzer: Analyzer = training::analyzer_from(&config)?;
            let path = config.require("paths.gazetteer", &config.paths.gazetteer)?;
            let gazetteer = read_file(path, read_gazetteer)?.index;
            for text in inputs(texts)? {
                let tokens = analyzer.analyze(&text);
                let candidates = match_toponyms(&tokens, &gazetteer, config.geo.max_ngram, &RejectTags::default());
                let mentions = disambiguate(&candidates, &config.ingest.country_hint);
                println!("{}", serde_json::to_string(&mentions).map_err(CliError::internal)?);
            }
        }
        Command::Report { format, localized, out } => {
            let config = load_config(&cli)?;
            let tz = config.timezone()?;
            let dir = config.require("paths.store", &config.paths.store)?;
            let store = Store::open_reader(dir, tz)?;
            let docs = store.select(&DocFilter::default()).map_err(CliError::internal)?;
            let roster = load_roster(&config)?;
            let report = build_report(&docs, &roster, tz, &config.report);
            let text = match format {
                ReportFormat::Text => render_text(&report, *localized),
                ReportFormat::Json => serde_json::to_string_pretty(&report).map_err(CliError::internal)? + "\n",
            };
            match out {
                Some(path) => fs::write(path, text)?,
                None => print!("{text}"),
            }
        }
        Command::Serve { bind, port } => {
            let config = load_config(&cli)?;
            let tz = config.timezone()?;
            let dir = config.require("paths.store", &config.paths.store)?;
            let store = Store::open_reader(dir, tz)?;
            let analyzer = match training::analyzer_from(&config) {
                Ok(a) => Some(a),
                Err(e) => {
                    log::warn!("no analyzer ({e}); q is matched on folded words");
                    None
                }
            };
            let state = AppState { store: Mutex::new(store), roster: load_roster(&config)?, analyzer, tz, top_k: config.report.top_k };
            let app = router(Arc::new(state), &config.server.cors_origins);
            let addr = format!("{}:{}", bind.as_deref().unwrap_or(&config.server.bind), port.unwrap_or(config.port()?));
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(async {
                let listener = tokio::net::TcpListener::bind(&addr)
                    .await
                    .map_err(|e| CliError::internal(format!("binding {addr}: {e}")))?;
                log::info!("listening on {addr}");
                eprintln!("listening on http://{addr}");
                serve(listener, app, shutdown_signal()).await.map_err(CliError::internal)
            })?;
        }
        Command::Synth(args) => synth_command(args)?,
    }
    Ok(())
}

fn create_parent(path: &Path) -> io::Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir),
        _ => Ok(()),
    }
}

fn synth_command(args: &SynthArgs) -> Result<(), CliError> {
    match &args.what {
        SynthCommand::Fixture { dir, docs } => {
            let manifest = synth::write_pipeline_fixture(dir, *docs, args.seed)?;
            println!(
                "fixture: {} docs, {} tweets -> {}",
                manifest.expected.unique_docs,
                manifest.expected.records,
                dir.join(synth::FIXTURE_CONFIG).display()
            );
        }
        SynthCommand::Corpus { out, per_class } => {
            create_parent(out)?;
            let mut file = io::BufWriter::new(fs::File::create(out)?);
            write_labeled_corpus(&synth::separable_corpus(*per_class, args.seed), &mut file)?;
            file.flush()?;
        }
        SynthCommand::October { out } => {
            create_parent(out)?;
            let tweets = synth::october_stream(chrono_tz::America::Santiago, args.seed);
            let mut file = io::BufWriter::new(fs::File::create(out)?);
            write_tweet_stream(&tweets, &mut file)?;
            file.flush()?;
        }
    }
    Ok(())
}

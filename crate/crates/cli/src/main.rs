use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use revsum_core::embed::{DEFAULT_CONTEXT_WINDOW, DEFAULT_DIMENSION};
use revsum_core::graph::{to_dot, to_json_dump, DEFAULT_TAU};
use revsum_core::json::{to_canonical_line, to_canonical_string};
use revsum_core::pipeline::{ask_report, extract, summarize, SummarizeConfig};
use revsum_core::qa::{load_question_groups, ClusterParams, DEFAULT_MAX_IN_FLIGHT};
use revsum_core::ranking::{DEFAULT_DAMPING, DEFAULT_MAX_ITER, DEFAULT_TOLERANCE};
use revsum_core::segment::{load_reviews, DEFAULT_MIN_TOKENS};
use revsum_core::{
    AnswerProvider, EmbeddingProvider, Error, FixtureProvider, HashEmbedder, RemoteAnswerProvider, RemoteConfig,
    RemoteEmbedder,
};

const EXIT_INPUT: u8 = 2;
const EXIT_NO_COMMUNITIES: u8 = 3;
const EXIT_PROVIDER: u8 = 4;

/// Summarize review corpora into tagged sentence communities, and extract
/// distinct answers to customer questions.
#[derive(Parser)]
#[command(name = "revsum", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster review sentences into communities and tag each one.
    Summarize {
        #[command(flatten)]
        common: Common,
        /// Write the similarity graph here (`.json` for a JSON dump, DOT otherwise).
        #[arg(long)]
        export_graph: Option<PathBuf>,
    },
    /// Answer every question group over all reviews and cluster the answers.
    Extract {
        #[command(flatten)]
        common: Common,
        /// JSON array of {"id", "original", "paraphrases"}.
        #[arg(long)]
        questions: PathBuf,
        #[command(flatten)]
        answers: AnswerSource,
    },
    /// Answer one question and print the top clusters as JSON.
    Ask {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        question: String,
        #[arg(long, default_value_t = 3)]
        top_k: usize,
        #[command(flatten)]
        answers: AnswerSource,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ProviderMode {
    /// Built-in deterministic hash embedder.
    Hash,
    /// Model server at --endpoint.
    Remote,
}

#[derive(Args)]
struct Common {
    /// JSON Lines corpus, one {"id", "text", "rating"} object per line.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = DEFAULT_TAU)]
    tau: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_TOKENS)]
    min_tokens: usize,
    #[arg(long, default_value_t = DEFAULT_DAMPING)]
    damping: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Token vector dimension.
    #[arg(long, default_value_t = DEFAULT_DIMENSION)]
    dim: usize,
    /// Neighbouring tokens on each side that shape a hash-embedder vector.
    #[arg(long, default_value_t = DEFAULT_CONTEXT_WINDOW)]
    context_window: usize,
    #[arg(long, value_enum, default_value_t = ProviderMode::Hash)]
    provider: ProviderMode,
    /// Base URL of the model server (POST /embed, POST /answer).
    #[arg(long)]
    endpoint: Option<String>,
    /// Provider calls in flight at once.
    #[arg(long, default_value_t = DEFAULT_MAX_IN_FLIGHT)]
    max_in_flight: usize,
    /// Report path; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct AnswerSource {
    /// Recorded answers keyed by "<question>␟<review id>". Without it,
    /// answers come from the model server at --endpoint.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::UndefinedModularity => {
                return Failure {
                    code: EXIT_NO_COMMUNITIES,
                    message: "no communities above threshold, lower --tau".into(),
                }
            }
            Error::ProviderFailure { .. } | Error::Transport(_) | Error::Protocol { .. } => EXIT_PROVIDER,
            Error::Contract(_) | Error::Pair { .. } => 1,
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn config_error(msg: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_INPUT,
        message: msg.into(),
    }
}

impl Common {
    fn validate(&self) -> Result<(), Failure> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(config_error(format!("--tau {} must lie in (0, 1)", self.tau)));
        }
        if !(self.damping > 0.0 && self.damping < 1.0) {
            return Err(config_error(format!("--damping {} must lie in (0, 1)", self.damping)));
        }
        if self.min_tokens == 0 {
            return Err(config_error("--min-tokens must be at least 1"));
        }
        if self.max_in_flight == 0 {
            return Err(config_error("--max-in-flight must be at least 1"));
        }
        if self.provider == ProviderMode::Remote && self.endpoint.is_none() {
            return Err(config_error("--provider remote requires --endpoint"));
        }
        Ok(())
    }

    fn params(&self) -> ClusterParams {
        ClusterParams {
            tau: self.tau,
            seed: self.seed,
            damping: self.damping,
            tolerance: DEFAULT_TOLERANCE,
            max_iter: DEFAULT_MAX_ITER,
        }
    }

    fn embedder(&self) -> Result<Box<dyn EmbeddingProvider>, Failure> {
        Ok(match self.provider {
            ProviderMode::Hash => Box::new(HashEmbedder::new(self.dim, self.context_window, self.seed)?),
            ProviderMode::Remote => {
                let endpoint = self.endpoint.clone().unwrap_or_default();
                Box::new(RemoteEmbedder::new(RemoteConfig::new(endpoint), self.dim)?)
            }
        })
    }

    fn answer_provider(&self, source: &AnswerSource) -> Result<Box<dyn AnswerProvider>, Failure> {
        match (&source.fixtures, &self.endpoint) {
            (Some(path), _) => Ok(Box::new(FixtureProvider::load(path)?)),
            (None, Some(endpoint)) => Ok(Box::new(RemoteAnswerProvider::new(RemoteConfig::new(endpoint.clone()))?)),
            (None, None) => Err(config_error("answers need --fixtures or --endpoint")),
        }
    }
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| config_error(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(|e| config_error(format!("stdout: {e}")))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Summarize { common, export_graph } => {
            common.validate()?;
            let reviews = load_reviews(&common.input)?;
            let embedder = common.embedder()?;
            let config = SummarizeConfig {
                min_tokens: common.min_tokens,
                cluster: common.params(),
            };
            let summary = summarize(&reviews, &embedder, &config)?;
            write_output(common.output.as_deref(), &to_canonical_string(&summary.report)?)?;
            if let Some(path) = export_graph {
                let text = if path.extension().is_some_and(|e| e == "json") {
                    to_canonical_string(&to_json_dump(&summary.graph))?
                } else {
                    to_dot(&summary.graph, Some(&summary.partition))
                };
                std::fs::write(&path, text)
                    .map_err(|e| config_error(format!("cannot write {}: {e}", path.display())))?;
            }
        }
        Command::Extract {
            common,
            questions,
            answers,
        } => {
            common.validate()?;
            let groups = load_question_groups(&questions)?;
            let reviews = load_reviews(&common.input)?;
            let provider = common.answer_provider(&answers)?;
            let embedder = common.embedder()?;
            let report = extract(&reviews, &groups, &provider, &embedder, &common.params(), common.max_in_flight)?;
            if report.provider_failures > 0 {
                eprintln!(
                    "revsum: {} of {} provider calls failed",
                    report.provider_failures, report.provider_calls
                );
            }
            write_output(common.output.as_deref(), &to_canonical_string(&report)?)?;
        }
        Command::Ask {
            common,
            question,
            top_k,
            answers,
        } => {
            common.validate()?;
            if top_k == 0 {
                return Err(config_error("--top-k must be at least 1"));
            }
            if question.trim().is_empty() {
                return Err(config_error("--question is empty"));
            }
            let reviews = load_reviews(&common.input)?;
            let provider = common.answer_provider(&answers)?;
            let embedder = common.embedder()?;
            let report = ask_report(
                &question,
                &reviews,
                &provider,
                &embedder,
                &common.params(),
                top_k,
                common.max_in_flight,
            )?;
            write_output(common.output.as_deref(), &to_canonical_line(&report)?)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("revsum: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

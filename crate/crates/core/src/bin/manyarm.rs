use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use manyarm::corpus::{export_synthetic, generate_synthetic, write_embeddings_text, write_log, SyntheticConfig};
use manyarm::experiment::{
    corpus_stats, format_stats, grid_cells, run_manifest, Cell, CorpusSource, Grid, Manifest,
};
use manyarm::policies::{FeatureMap, PolicyKind, PolicySpec};
use manyarm::replay::{ReplayConfig, SelectionStrategy};
use manyarm::selection::KSchedule;
use manyarm::Error;

#[derive(Parser)]
#[command(name = "manyarm", version, about = "Candidate selection and replay for many-armed contextual bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a manifest, or a single cell described by flags.
    Run(RunArgs),
    /// Print query and session counts before and after the length filter.
    Stats(StatsArgs),
    /// Print a manifest for a named grid (fig2, fig3, fig4).
    Grid(GridArgs),
    /// Write a synthetic corpus as a log file plus text embeddings.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct CorpusArgs {
    #[arg(long, conflicts_with = "synthetic", requires = "embeddings")]
    log: Option<PathBuf>,
    #[arg(long, requires = "log")]
    embeddings: Option<PathBuf>,
    /// Use a generated corpus instead of files.
    #[arg(long)]
    synthetic: bool,
    #[arg(long, default_value_t = 500)]
    sessions: usize,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    distractors: usize,
    #[arg(long, default_value_t = manyarm::corpus::DEFAULT_MIN_SESSION_LEN)]
    min_len: usize,
    #[arg(long, default_value_t = manyarm::corpus::DEFAULT_MAX_SESSION_LEN)]
    max_len: usize,
}

impl CorpusArgs {
    fn source(&self) -> Result<CorpusSource, Error> {
        match (&self.log, &self.embeddings, self.synthetic) {
            (Some(log), Some(emb), false) => Ok(CorpusSource::Files {
                log: log.clone(),
                embeddings: emb.clone(),
            }),
            (None, None, true) => Ok(CorpusSource::Synthetic {
                config: SyntheticConfig {
                    num_sessions: self.sessions,
                    dim: self.dim,
                    num_distractors: self.distractors,
                    ..SyntheticConfig::default()
                },
                seed: None,
            }),
            _ => Err(Error::Config("give --synthetic or both --log and --embeddings".into())),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    /// Manifest file; when given, the single-cell flags are ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[command(flatten)]
    corpus: CorpusArgs,
    /// Run seeds, comma separated.
    #[arg(long, env = "MANYARM_SEED", value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    #[arg(long, default_value = "max-utility")]
    strategy: String,
    #[arg(long, default_value = "linucb")]
    policy: String,
    #[arg(long, default_value_t = 0.5)]
    epsilon: f64,
    #[arg(long, conflicts_with = "k_schedule")]
    k: Option<usize>,
    /// e.g. `scaled:alpha=2,tau=50,kmax=250` or `anytime:beta=1,exponent=ratio,kmax=500`.
    #[arg(long)]
    k_schedule: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    alpha_ucb: f64,
    #[arg(long, default_value_t = 1.0)]
    lambda: f64,
    #[arg(long, default_value_t = 0.25)]
    v: f64,
    #[arg(long, default_value = "concat-hadamard")]
    feature_map: String,
    #[arg(long)]
    reset_per_session: bool,
    #[arg(long, default_value_t = 4)]
    partitions: usize,
    #[arg(long, default_value = "results")]
    out: PathBuf,
    #[arg(long, default_value_t = 1)]
    stride: usize,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
    /// Also write per-round logs.
    #[arg(long)]
    round_log: bool,
}

impl RunArgs {
    fn manifest(&self) -> Result<Manifest, Error> {
        if let Some(path) = &self.manifest {
            return Manifest::load(path);
        }
        let k_schedule = match (&self.k, &self.k_schedule) {
            (Some(k), None) => KSchedule::Fixed { k: *k },
            (None, Some(spec)) => spec.parse()?,
            _ => KSchedule::default(),
        };
        let replay = ReplayConfig {
            epsilon: self.epsilon,
            k_schedule,
            policy: PolicySpec {
                kind: self.policy.parse::<PolicyKind>()?,
                alpha_ucb: self.alpha_ucb,
                lambda: self.lambda,
                v: self.v,
                feature_map: self.feature_map.parse::<FeatureMap>()?,
            },
            strategy: self.strategy.parse::<SelectionStrategy>()?,
            reset_per_session: self.reset_per_session,
            partitions: self.partitions,
            ..ReplayConfig::default()
        };
        let m = Manifest {
            corpus: self.corpus.source()?,
            min_session_len: self.corpus.min_len,
            max_session_len: self.corpus.max_len,
            cells: vec![Cell::new(replay)],
            seeds: self.seed.clone(),
            out_dir: self.out.clone(),
            stride: self.stride,
            jobs: self.jobs,
            round_log: self.round_log,
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, env = "MANYARM_SEED", default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct GridArgs {
    grid: String,
    #[command(flatten)]
    corpus: CorpusArgs,
    #[arg(long, env = "MANYARM_SEED", value_delimiter = ',', default_value = "0")]
    seed: Vec<u64>,
    #[arg(long, default_value = "results")]
    out: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    out_log: PathBuf,
    #[arg(long)]
    out_embeddings: PathBuf,
    #[arg(long, default_value_t = 500)]
    sessions: usize,
    #[arg(long, default_value_t = 16)]
    dim: usize,
    #[arg(long, default_value_t = 10_000)]
    distractors: usize,
    #[arg(long, env = "MANYARM_SEED", default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let manifest = match args.manifest() {
                Ok(m) => m,
                Err(e @ Error::Io { .. }) => return fail(1, e),
                Err(e) => return fail(2, e),
            };
            match run_manifest(&manifest) {
                Ok(report) => {
                    for r in &report.rows {
                        println!("{} seed {}: T={} R(T)/T={:.4}", r.cell, r.seed, r.horizon, r.final_per_round);
                    }
                    ExitCode::SUCCESS
                }
                Err(e) => fail(1, e),
            }
        }
        Command::Stats(args) => {
            let source = match args.corpus.source() {
                Ok(s) => s,
                Err(e) => return fail(2, e),
            };
            match corpus_stats(&source, args.corpus.min_len, args.corpus.max_len, args.seed) {
                Ok(s) => {
                    print!("{}", format_stats(&s));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(1, e),
            }
        }
        Command::Grid(args) => {
            let built = args.grid.parse::<Grid>().and_then(|g| {
                let m = Manifest {
                    corpus: args.corpus.source()?,
                    min_session_len: args.corpus.min_len,
                    max_session_len: args.corpus.max_len,
                    cells: grid_cells(g),
                    seeds: args.seed.clone(),
                    out_dir: args.out.clone(),
                    ..Manifest::default()
                };
                m.validate()?;
                Ok(m)
            });
            match built {
                Ok(m) => {
                    print!("{}", m.to_text());
                    ExitCode::SUCCESS
                }
                Err(e) => fail(2, e),
            }
        }
        Command::Synth(args) => match synth(&args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => fail(1, e),
        },
    }
}

fn synth(args: &SynthArgs) -> Result<(), Error> {
    let cfg = SyntheticConfig {
        num_sessions: args.sessions,
        dim: args.dim,
        num_distractors: args.distractors,
        rng_seed: args.seed,
        ..SyntheticConfig::default()
    };
    let (sessions, table) = generate_synthetic(&cfg)?;
    let (records, table) = export_synthetic(&sessions, &table)?;
    let create = |p: &PathBuf| {
        File::create(p)
            .map(BufWriter::new)
            .map_err(|e| Error::Config(format!("{}: {e}", p.display())))
    };
    write_log(create(&args.out_log)?, &records)
        .map_err(|e| Error::Config(format!("{}: {e}", args.out_log.display())))?;
    write_embeddings_text(create(&args.out_embeddings)?, &table)
        .map_err(|e| Error::Config(format!("{}: {e}", args.out_embeddings.display())))?;
    println!(
        "wrote {} sessions to {} and {} embeddings to {}",
        sessions.len(),
        args.out_log.display(),
        table.len(),
        args.out_embeddings.display()
    );
    Ok(())
}

fn fail(code: u8, e: Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(code)
}

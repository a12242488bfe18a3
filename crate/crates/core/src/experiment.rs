//! Experiment manifests, sweep execution and CSV output.
//!
//! A manifest is flat `key = value` text. Keys before the first `[cell]`
//! header describe the corpus and the run; cell keys given there act as
//! defaults for every cell. Each `[cell]` block is one configuration:
//!
//! ```text
//! synthetic = true
//! synthetic.sessions = 500
//! seeds = 1, 2, 3
//! out = results
//! epsilon = 0.5
//!
//! [cell]
//! name = mu-linucb
//! strategy = max-utility
//! policy = linucb
//! k = 250
//! ```
//!
//! Every cell runs once per seed. Each run writes `<cell>.seed<seed>.csv`
//! (`t,cumulative_regret,per_round_regret`), and the sweep writes
//! `summary.csv` (`cell,seed,T,final_R,final_R_over_T`). Files are written
//! to a temporary name and renamed into place.

use std::collections::{BTreeMap, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use rayon::prelude::*;

use crate::corpus::{
    build_sessions, filter_sessions, generate_synthetic, load_embeddings, parse_log, CorpusStats, LogFormat, Session,
    SyntheticConfig, DEFAULT_MAX_SESSION_LEN, DEFAULT_MIN_SESSION_LEN,
};
use crate::error::{Error, Result};
use crate::policies::{PolicyKind, PolicySpec};
use crate::replay::{replay_corpus, write_round_log, ReplayConfig, ReplayOutcome, ReplayPool, SelectionStrategy};
use crate::selection::{KSchedule, UtilityModel, UtilityVariant};

#[derive(Debug, Clone, PartialEq)]
pub enum CorpusSource {
    Files { log: PathBuf, embeddings: PathBuf },
    /// With `seed: None` the corpus is regenerated from each run seed.
    Synthetic { config: SyntheticConfig, seed: Option<u64> },
}

impl Default for CorpusSource {
    fn default() -> Self {
        CorpusSource::Synthetic {
            config: SyntheticConfig::default(),
            seed: None,
        }
    }
}

/// One sweep configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub name: String,
    /// `rng_seed` is replaced by the run seed.
    pub replay: ReplayConfig,
}

impl Cell {
    pub fn new(replay: ReplayConfig) -> Self {
        Self {
            name: default_name(&replay),
            replay,
        }
    }
}

fn default_name(c: &ReplayConfig) -> String {
    let k = match c.strategy {
        SelectionStrategy::Zooming => String::new(),
        _ => match c.k_schedule {
            KSchedule::Fixed { k } => format!("-k{k}"),
            other => format!("-{}", other.to_string().split(':').next().unwrap_or("sched")),
        },
    };
    format!("{}-{}-eps{}{}", c.strategy, c.policy.kind, c.epsilon, k)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Manifest {
    pub corpus: CorpusSource,
    pub min_session_len: usize,
    pub max_session_len: usize,
    pub cells: Vec<Cell>,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
    /// Keep every `stride`-th curve row (the last row is always kept).
    pub stride: usize,
    /// Worker threads; 0 uses all cores.
    pub jobs: usize,
    /// Also write `<cell>.seed<seed>.rounds.csv`.
    pub round_log: bool,
}

impl Default for Manifest {
    fn default() -> Self {
        Self {
            corpus: CorpusSource::default(),
            min_session_len: DEFAULT_MIN_SESSION_LEN,
            max_session_len: DEFAULT_MAX_SESSION_LEN,
            cells: Vec::new(),
            seeds: vec![0],
            out_dir: PathBuf::from("results"),
            stride: 1,
            jobs: 0,
            round_log: false,
        }
    }
}

impl Manifest {
    pub fn validate(&self) -> Result<()> {
        if self.cells.is_empty() {
            return Err(Error::config("manifest has no cells"));
        }
        if self.seeds.is_empty() {
            return Err(Error::config("manifest has no seeds"));
        }
        if self.stride == 0 {
            return Err(Error::config("stride must be at least 1"));
        }
        if self.min_session_len < 2 || self.min_session_len > self.max_session_len {
            return Err(Error::config("session length bounds must satisfy 2 <= min <= max"));
        }
        if let CorpusSource::Synthetic { config, .. } = &self.corpus {
            config.validate()?;
        }
        let mut names = HashSet::new();
        for c in &self.cells {
            if c.name.is_empty() || !c.name.chars().all(|ch| ch.is_ascii_alphanumeric() || "-_.".contains(ch)) {
                return Err(Error::config(format!(
                    "cell name {:?} must be non-empty and use only letters, digits, '-', '_' or '.'",
                    c.name
                )));
            }
            if !names.insert(c.name.as_str()) {
                return Err(Error::config(format!("duplicate cell name {:?}", c.name)));
            }
            c.replay
                .validate()
                .map_err(|e| Error::config(format!("cell {}: {e}", c.name)))?;
        }
        let mut seeds = HashSet::new();
        if !self.seeds.iter().all(|s| seeds.insert(s)) {
            return Err(Error::config("seeds must be distinct"));
        }
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, path)
    }

    /// Parses and validates manifest text; `origin` names the source in errors.
    pub fn parse(text: &str, origin: impl AsRef<Path>) -> Result<Self> {
        let origin = origin.as_ref();
        let err = |line: usize, message: String| Error::Parse {
            path: origin.to_path_buf(),
            line,
            message,
        };
        let mut m = Manifest::default();
        let mut synth = SyntheticConfig::default();
        let mut synth_seed = None;
        let mut synthetic = false;
        let mut log = None;
        let mut embeddings = None;
        let mut defaults: Vec<(usize, String, String)> = Vec::new();
        let mut blocks: Vec<Vec<(usize, String, String)>> = Vec::new();

        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if line == "[cell]" {
                blocks.push(Vec::new());
                continue;
            }
            if line.starts_with('[') {
                return Err(err(n, format!("unknown section {line}")));
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| err(n, format!("expected key = value, got {line:?}")))?;
            let (key, value) = (key.trim().to_string(), value.trim().to_string());
            if let Some(block) = blocks.last_mut() {
                block.push((n, key, value));
                continue;
            }
            let bad = |what: &str| err(n, format!("{key}: invalid {what} {value:?}"));
            let num = || value.parse::<usize>().map_err(|_| bad("integer"));
            let float = || value.parse::<f64>().map_err(|_| bad("number"));
            match key.as_str() {
                "log" => log = Some(PathBuf::from(&value)),
                "embeddings" => embeddings = Some(PathBuf::from(&value)),
                "synthetic" => synthetic = parse_bool(&value).ok_or_else(|| bad("boolean"))?,
                "synthetic.sessions" => synth.num_sessions = num()?,
                "synthetic.dim" => synth.dim = num()?,
                "synthetic.topics" => synth.num_topics = num()?,
                "synthetic.spread" => synth.topic_spread = float()?,
                "synthetic.drift" => synth.session_drift = float()?,
                "synthetic.min_len" => synth.session_length_range.0 = num()?,
                "synthetic.max_len" => synth.session_length_range.1 = num()?,
                "synthetic.noise" => synth.noise_fraction = float()?,
                "synthetic.distractors" => synth.num_distractors = num()?,
                "synthetic.seed" => synth_seed = Some(value.parse().map_err(|_| bad("integer"))?),
                "min_session_len" => m.min_session_len = num()?,
                "max_session_len" => m.max_session_len = num()?,
                "seeds" => {
                    m.seeds = value
                        .split(',')
                        .map(|s| s.trim().parse::<u64>())
                        .collect::<std::result::Result<_, _>>()
                        .map_err(|_| bad("seed list"))?
                }
                "out" => m.out_dir = PathBuf::from(&value),
                "stride" => m.stride = num()?,
                "jobs" => m.jobs = num()?,
                "round_log" => m.round_log = parse_bool(&value).ok_or_else(|| bad("boolean"))?,
                _ if CELL_KEYS.contains(&key.as_str()) && key != "name" => defaults.push((n, key, value)),
                _ => return Err(err(n, format!("unknown key {key:?}"))),
            }
        }

        m.corpus = match (synthetic, log, embeddings) {
            (true, None, None) => CorpusSource::Synthetic {
                config: synth,
                seed: synth_seed,
            },
            (false, Some(log), Some(embeddings)) => CorpusSource::Files { log, embeddings },
            (true, _, _) => return Err(err(0, "synthetic corpus cannot also name log or embeddings files".into())),
            _ => return Err(err(0, "need either synthetic = true or both log and embeddings".into())),
        };

        for block in blocks {
            let mut builder = CellBuilder::default();
            for (n, key, value) in defaults.iter().chain(&block) {
                builder.set(key, value).map_err(|m| err(*n, m))?;
            }
            m.cells.push(builder.build());
        }
        m.validate()?;
        Ok(m)
    }

    /// Manifest text that parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        match &self.corpus {
            CorpusSource::Files { log, embeddings } => {
                let _ = writeln!(s, "log = {}", log.display());
                let _ = writeln!(s, "embeddings = {}", embeddings.display());
            }
            CorpusSource::Synthetic { config: c, seed } => {
                let _ = writeln!(s, "synthetic = true");
                let _ = writeln!(s, "synthetic.sessions = {}", c.num_sessions);
                let _ = writeln!(s, "synthetic.dim = {}", c.dim);
                let _ = writeln!(s, "synthetic.topics = {}", c.num_topics);
                let _ = writeln!(s, "synthetic.spread = {}", c.topic_spread);
                let _ = writeln!(s, "synthetic.drift = {}", c.session_drift);
                let _ = writeln!(s, "synthetic.min_len = {}", c.session_length_range.0);
                let _ = writeln!(s, "synthetic.max_len = {}", c.session_length_range.1);
                let _ = writeln!(s, "synthetic.noise = {}", c.noise_fraction);
                let _ = writeln!(s, "synthetic.distractors = {}", c.num_distractors);
                if let Some(seed) = seed {
                    let _ = writeln!(s, "synthetic.seed = {seed}");
                }
            }
        }
        let _ = writeln!(s, "min_session_len = {}", self.min_session_len);
        let _ = writeln!(s, "max_session_len = {}", self.max_session_len);
        let seeds: Vec<String> = self.seeds.iter().map(u64::to_string).collect();
        let _ = writeln!(s, "seeds = {}", seeds.join(", "));
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        let _ = writeln!(s, "stride = {}", self.stride);
        let _ = writeln!(s, "jobs = {}", self.jobs);
        let _ = writeln!(s, "round_log = {}", self.round_log);
        for cell in &self.cells {
            let c = &cell.replay;
            let _ = writeln!(s, "\n[cell]");
            let _ = writeln!(s, "name = {}", cell.name);
            let _ = writeln!(s, "strategy = {}", c.strategy);
            let _ = writeln!(s, "policy = {}", c.policy.kind);
            let _ = writeln!(s, "epsilon = {}", c.epsilon);
            let _ = writeln!(s, "k_schedule = {}", c.k_schedule);
            let _ = writeln!(s, "alpha_ucb = {}", c.policy.alpha_ucb);
            let _ = writeln!(s, "lambda = {}", c.policy.lambda);
            let _ = writeln!(s, "v = {}", c.policy.v);
            let _ = writeln!(s, "feature_map = {}", c.policy.feature_map);
            let _ = writeln!(s, "utility = {}", variant_name(c.utility_model.variant));
            let _ = writeln!(s, "utility_scale = {}", c.utility_model.scale);
            let _ = writeln!(s, "reset_per_session = {}", c.reset_per_session);
            let _ = writeln!(s, "partitions = {}", c.partitions);
            if let Some(k0) = c.k0 {
                let _ = writeln!(s, "k0 = {k0}");
            }
        }
        s
    }
}

const CELL_KEYS: &[&str] = &[
    "name",
    "strategy",
    "policy",
    "epsilon",
    "k",
    "k_schedule",
    "alpha_ucb",
    "lambda",
    "v",
    "feature_map",
    "utility",
    "utility_scale",
    "reset_per_session",
    "partitions",
    "k0",
];

fn parse_bool(s: &str) -> Option<bool> {
    match s {
        "true" | "yes" | "1" => Some(true),
        "false" | "no" | "0" => Some(false),
        _ => None,
    }
}

fn variant_name(v: UtilityVariant) -> &'static str {
    match v {
        UtilityVariant::GeneralizedJoint => "joint",
        UtilityVariant::ModularLogMarginal => "modular",
    }
}

#[derive(Default)]
struct CellBuilder {
    name: Option<String>,
    replay: ReplayConfig,
}

impl CellBuilder {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<(), String> {
        let bad = |what: &str| format!("{key}: invalid {what} {value:?}");
        let float = || value.parse::<f64>().map_err(|_| bad("number"));
        let r = &mut self.replay;
        match key {
            "name" => self.name = Some(value.to_string()),
            "strategy" => r.strategy = value.parse().map_err(|e: Error| e.to_string())?,
            "policy" => r.policy.kind = value.parse().map_err(|e: Error| e.to_string())?,
            "epsilon" => r.epsilon = float()?,
            "k" => {
                r.k_schedule = KSchedule::Fixed {
                    k: value.parse().map_err(|_| bad("integer"))?,
                }
            }
            "k_schedule" => r.k_schedule = value.parse().map_err(|e: Error| e.to_string())?,
            "alpha_ucb" => r.policy.alpha_ucb = float()?,
            "lambda" => r.policy.lambda = float()?,
            "v" => r.policy.v = float()?,
            "feature_map" => r.policy.feature_map = value.parse().map_err(|e: Error| e.to_string())?,
            "utility" => {
                r.utility_model.variant = match value {
                    "joint" => UtilityVariant::GeneralizedJoint,
                    "modular" => UtilityVariant::ModularLogMarginal,
                    _ => return Err(bad("utility (joint|modular)")),
                }
            }
            "utility_scale" => {
                r.utility_model =
                    UtilityModel::new(r.utility_model.variant, float()?).map_err(|e| e.to_string())?
            }
            "reset_per_session" => r.reset_per_session = parse_bool(value).ok_or_else(|| bad("boolean"))?,
            "partitions" => r.partitions = value.parse().map_err(|_| bad("integer"))?,
            "k0" => r.k0 = Some(value.parse().map_err(|_| bad("integer"))?),
            _ => return Err(format!("unknown cell key {key:?}")),
        }
        Ok(())
    }

    fn build(self) -> Cell {
        let name = self.name.unwrap_or_else(|| default_name(&self.replay));
        Cell {
            name,
            replay: self.replay,
        }
    }
}

/// Sessions and arm pool ready for replay.
#[derive(Debug, Clone)]
pub struct LoadedCorpus {
    pub sessions: Vec<Session>,
    pub pool: ReplayPool,
    pub stats: CorpusStats,
}

/// Loads (or generates, for synthetic sources) the corpus used with `seed`.
pub fn load_corpus(source: &CorpusSource, min_len: usize, max_len: usize, seed: u64) -> Result<LoadedCorpus> {
    let (sessions, table, stats) = match source {
        CorpusSource::Files { log, embeddings } => {
            let records = parse_log(log, &LogFormat::default())?;
            let (sessions, stats) = build_sessions(&records, min_len, max_len);
            let table = load_embeddings(embeddings)?;
            (sessions, table, stats)
        }
        CorpusSource::Synthetic { config, seed: fixed } => {
            let cfg = SyntheticConfig {
                rng_seed: fixed.unwrap_or(seed),
                ..config.clone()
            };
            let (all, table) = generate_synthetic(&cfg)?;
            let kept = filter_sessions(&all, min_len, max_len);
            let stats = CorpusStats::from_sessions(&all, &kept);
            (kept, table, stats)
        }
    };
    table.resolve_sessions(&sessions)?;
    if sessions.is_empty() {
        return Err(Error::config("no sessions survive the length filter"));
    }
    Ok(LoadedCorpus {
        sessions,
        pool: ReplayPool::new(table)?,
        stats,
    })
}

/// Counts for the `stats` report; synthetic sources use `seed` when they
/// have no fixed seed.
pub fn corpus_stats(source: &CorpusSource, min_len: usize, max_len: usize, seed: u64) -> Result<CorpusStats> {
    match source {
        CorpusSource::Files { log, .. } => {
            let records = parse_log(log, &LogFormat::default())?;
            Ok(build_sessions(&records, min_len, max_len).1)
        }
        CorpusSource::Synthetic { config, seed: fixed } => {
            let cfg = SyntheticConfig {
                rng_seed: fixed.unwrap_or(seed),
                ..config.clone()
            };
            let (all, _) = generate_synthetic(&cfg)?;
            Ok(CorpusStats::from_sessions(&all, &filter_sessions(&all, min_len, max_len)))
        }
    }
}

pub fn format_stats(s: &CorpusStats) -> String {
    format!(
        "{:<14}{:>12}{:>12}{:>16}\n{:<14}{:>12}{:>12}{:>16.3}\n{:<14}{:>12}{:>12}{:>16.3}\n",
        "",
        "queries",
        "sessions",
        "queries/session",
        "before filter",
        s.queries_before,
        s.sessions_before,
        s.mean_len_before(),
        "after filter",
        s.queries_after,
        s.sessions_after,
        s.mean_len_after(),
    )
}

/// Replays one cell with one seed.
pub fn run_cell(corpus: &LoadedCorpus, cell: &Cell, seed: u64) -> Result<ReplayOutcome> {
    let cfg = ReplayConfig {
        rng_seed: seed,
        ..cell.replay
    };
    replay_corpus(&corpus.sessions, &cfg, &corpus.pool)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub cell: String,
    pub seed: u64,
    pub horizon: u64,
    pub final_regret: u64,
    pub final_per_round: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub rows: Vec<SummaryRow>,
    pub files: Vec<PathBuf>,
}

pub fn curve_file_name(cell: &str, seed: u64) -> String {
    format!("{cell}.seed{seed}.csv")
}

pub fn round_log_file_name(cell: &str, seed: u64) -> String {
    format!("{cell}.seed{seed}.rounds.csv")
}

pub const SUMMARY_FILE: &str = "summary.csv";

/// Runs every cell for every seed, writes the outputs and returns the summary.
pub fn run_manifest(m: &Manifest) -> Result<RunReport> {
    m.validate()?;
    fs::create_dir_all(&m.out_dir).map_err(|e| Error::io(&m.out_dir, e))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(m.jobs)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;

    pool.install(|| {
        let per_seed_corpus = matches!(m.corpus, CorpusSource::Synthetic { seed: None, .. });
        let shared = if per_seed_corpus {
            None
        } else {
            Some(Arc::new(load_corpus(&m.corpus, m.min_session_len, m.max_session_len, m.seeds[0])?))
        };

        let mut results: BTreeMap<(usize, usize), (SummaryRow, Vec<PathBuf>)> = BTreeMap::new();
        for (si, &seed) in m.seeds.iter().enumerate() {
            let corpus = match &shared {
                Some(c) => Arc::clone(c),
                None => Arc::new(load_corpus(&m.corpus, m.min_session_len, m.max_session_len, seed)?),
            };
            let done: Vec<_> = m
                .cells
                .par_iter()
                .enumerate()
                .map(|(ci, cell)| {
                    let outcome = run_cell(&corpus, cell, seed)?;
                    log::info!(
                        "{} seed {}: T={} R/T={:.4}",
                        cell.name,
                        seed,
                        outcome.horizon(),
                        outcome.final_per_round_regret()
                    );
                    let files = write_run_files(m, &cell.name, seed, &outcome)?;
                    let row = SummaryRow {
                        cell: cell.name.clone(),
                        seed,
                        horizon: outcome.horizon(),
                        final_regret: outcome.final_regret(),
                        final_per_round: outcome.final_per_round_regret(),
                    };
                    Ok(((ci, si), (row, files)))
                })
                .collect::<Result<_>>()?;
            results.extend(done);
        }

        let mut rows = Vec::with_capacity(results.len());
        let mut files = Vec::new();
        for (row, f) in results.into_values() {
            rows.push(row);
            files.extend(f);
        }
        let summary = m.out_dir.join(SUMMARY_FILE);
        write_atomic(&summary, |w| write_summary(w, &rows))?;
        files.push(summary);
        Ok(RunReport { rows, files })
    })
}

fn write_run_files(m: &Manifest, cell: &str, seed: u64, outcome: &ReplayOutcome) -> Result<Vec<PathBuf>> {
    let curve = m.out_dir.join(curve_file_name(cell, seed));
    write_atomic(&curve, |w| write_curve(w, outcome, m.stride))?;
    let mut files = vec![curve];
    if m.round_log {
        let rounds = m.out_dir.join(round_log_file_name(cell, seed));
        write_atomic(&rounds, |w| write_round_log(w, &outcome.rounds))?;
        files.push(rounds);
    }
    Ok(files)
}

/// Writes through a sibling temporary file and renames it over `path`.
pub fn write_atomic(path: &Path, body: impl FnOnce(&mut dyn Write) -> std::io::Result<()>) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    let file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| Error::io(&tmp, e))?;
    w.flush().map_err(|e| Error::io(&tmp, e))?;
    drop(w);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

/// Regret curve, keeping rows with `t % stride == 0` plus the final row.
pub fn write_curve(w: &mut dyn Write, outcome: &ReplayOutcome, stride: usize) -> std::io::Result<()> {
    writeln!(w, "t,cumulative_regret,per_round_regret")?;
    let n = outcome.cumulative_regret.len();
    for i in 0..n {
        let t = i + 1;
        if t % stride.max(1) == 0 || t == n {
            writeln!(
                w,
                "{t},{},{:.6}",
                outcome.cumulative_regret[i], outcome.per_round_regret[i]
            )?;
        }
    }
    Ok(())
}

pub fn write_summary(w: &mut dyn Write, rows: &[SummaryRow]) -> std::io::Result<()> {
    writeln!(w, "cell,seed,T,final_R,final_R_over_T")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{:.6}",
            r.cell, r.seed, r.horizon, r.final_regret, r.final_per_round
        )?;
    }
    Ok(())
}

/// Named experiment grids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Grid {
    /// Strategy × policy comparison at ε = 0.5, k = 250.
    Fig2,
    /// k ∈ {10, 50, 100, 250, 500} at ε = 0.5.
    Fig3,
    /// ε ∈ {0.2, …, 0.8} at k = 250.
    Fig4,
}

impl std::str::FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fig2" => Ok(Grid::Fig2),
            "fig3" => Ok(Grid::Fig3),
            "fig4" => Ok(Grid::Fig4),
            other => Err(Error::config(format!("unknown grid {other:?} (fig2|fig3|fig4)"))),
        }
    }
}

fn cell(strategy: SelectionStrategy, kind: PolicyKind, epsilon: f64, k: usize) -> Cell {
    Cell::new(ReplayConfig {
        strategy,
        policy: PolicySpec::of(kind),
        epsilon,
        k_schedule: KSchedule::Fixed { k },
        ..ReplayConfig::default()
    })
}

pub fn grid_cells(grid: Grid) -> Vec<Cell> {
    use PolicyKind::*;
    use SelectionStrategy::*;
    match grid {
        Grid::Fig2 => {
            let mut cells = Vec::new();
            for strategy in [MaxUtility, RandomK] {
                for kind in [LinUcb, LinThompSamp, Random, MostSimilar] {
                    cells.push(cell(strategy, kind, 0.5, 250));
                }
            }
            cells.push(cell(Zooming, LinUcb, 0.5, 250));
            cells
        }
        Grid::Fig3 => [10, 50, 100, 250, 500]
            .into_iter()
            .map(|k| cell(MaxUtility, LinUcb, 0.5, k))
            .collect(),
        Grid::Fig4 => (2..=8)
            .map(|i| cell(MaxUtility, LinUcb, i as f64 / 10.0, 250))
            .collect(),
    }
}

//! Session logs, embedding tables and synthetic corpora.
//!
//! A log is a UTF-8 file with one `session_id<TAB>timestamp_ms<TAB>query_text`
//! record per line. Query ids are dense integers handed out in order of first
//! appearance; two records share an id exactly when their texts are equal.
//!
//! Embeddings come either as text (`n d` header, then `query_id v1 .. vd` rows)
//! or as a little-endian binary blob: `EMB1`, `u32 n`, `u32 d`, then `n * d`
//! `f32`s with implicit ids `0..n`.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::ArmId;

pub const DEFAULT_MIN_SESSION_LEN: usize = 4;
pub const DEFAULT_MAX_SESSION_LEN: usize = 50;

const BINARY_MAGIC: &[u8; 4] = b"EMB1";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryRecord {
    pub session_id: String,
    pub timestamp: i64,
    pub query_text: String,
    pub query_id: ArmId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogFormat {
    pub delimiter: char,
    /// Skip lines that are empty after trimming the line terminator.
    pub skip_blank: bool,
}

impl Default for LogFormat {
    fn default() -> Self {
        Self {
            delimiter: '\t',
            skip_blank: true,
        }
    }
}

/// Reads a session log from disk. See [`parse_log_reader`].
pub fn parse_log(path: impl AsRef<Path>, format: &LogFormat) -> Result<Vec<QueryRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    parse_log_reader(BufReader::new(file), path, format)
}

/// Parses log records in file order, assigning dense query ids by exact text match.
pub fn parse_log_reader<R: BufRead>(
    reader: R,
    name: impl AsRef<Path>,
    format: &LogFormat,
) -> Result<Vec<QueryRecord>> {
    let name = name.as_ref();
    let mut ids: HashMap<String, ArmId> = HashMap::new();
    let mut records = Vec::new();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if format.skip_blank && line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(format.delimiter).collect();
        if fields.len() != 3 {
            return Err(Error::Parse {
                path: name.to_path_buf(),
                line: lineno,
                message: format!("expected 3 fields, found {}", fields.len()),
            });
        }
        let timestamp = fields[1].trim().parse::<i64>().map_err(|e| Error::Parse {
            path: name.to_path_buf(),
            line: lineno,
            message: format!("bad timestamp {:?}: {e}", fields[1]),
        })?;
        let text = fields[2].to_string();
        let next_id = ids.len() as ArmId;
        let query_id = *ids.entry(text.clone()).or_insert(next_id);
        records.push(QueryRecord {
            session_id: fields[0].to_string(),
            timestamp,
            query_text: text,
            query_id,
        });
    }
    Ok(records)
}

/// Writes records back in the on-disk log format.
pub fn write_log<W: Write>(mut out: W, records: &[QueryRecord]) -> std::io::Result<()> {
    for r in records {
        writeln!(out, "{}\t{}\t{}", r.session_id, r.timestamp, r.query_text)?;
    }
    out.flush()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Session {
    pub session_id: String,
    pub query_ids: Vec<ArmId>,
}

impl Session {
    pub fn len(&self) -> usize {
        self.query_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.query_ids.is_empty()
    }
}

/// Counts before and after the session-length filter.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CorpusStats {
    pub queries_before: usize,
    pub sessions_before: usize,
    pub queries_after: usize,
    pub sessions_after: usize,
    /// Distinct query ids referenced by the retained sessions.
    pub distinct_after: usize,
}

impl CorpusStats {
    pub fn mean_len_before(&self) -> f64 {
        ratio(self.queries_before, self.sessions_before)
    }

    pub fn mean_len_after(&self) -> f64 {
        ratio(self.queries_after, self.sessions_after)
    }

    pub fn from_sessions(before: &[Session], after: &[Session]) -> Self {
        let mut distinct: Vec<ArmId> = after.iter().flat_map(|s| s.query_ids.iter().copied()).collect();
        distinct.sort_unstable();
        distinct.dedup();
        Self {
            queries_before: before.iter().map(Session::len).sum(),
            sessions_before: before.len(),
            queries_after: after.iter().map(Session::len).sum(),
            sessions_after: after.len(),
            distinct_after: distinct.len(),
        }
    }
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

/// Groups records into sessions (in order of first appearance), sorts each
/// session stably by timestamp, and keeps sessions with `min_len..=max_len` queries.
pub fn build_sessions(
    records: &[QueryRecord],
    min_len: usize,
    max_len: usize,
) -> (Vec<Session>, CorpusStats) {
    let mut order: Vec<&str> = Vec::new();
    let mut grouped: HashMap<&str, Vec<(i64, ArmId)>> = HashMap::new();
    for r in records {
        grouped
            .entry(r.session_id.as_str())
            .or_insert_with(|| {
                order.push(r.session_id.as_str());
                Vec::new()
            })
            .push((r.timestamp, r.query_id));
    }

    let all: Vec<Session> = order
        .into_iter()
        .map(|sid| {
            let mut qs = grouped.remove(sid).unwrap_or_default();
            qs.sort_by_key(|&(ts, _)| ts);
            Session {
                session_id: sid.to_string(),
                query_ids: qs.into_iter().map(|(_, q)| q).collect(),
            }
        })
        .collect();
    let kept = filter_sessions(&all, min_len, max_len);
    let stats = CorpusStats::from_sessions(&all, &kept);
    log::info!(
        "kept {} of {} sessions ({} queries)",
        stats.sessions_after,
        stats.sessions_before,
        stats.queries_after
    );
    (kept, stats)
}

pub fn filter_sessions(sessions: &[Session], min_len: usize, max_len: usize) -> Vec<Session> {
    sessions
        .iter()
        .filter(|s| (min_len..=max_len).contains(&s.len()))
        .cloned()
        .collect()
}

/// Query id → context vector, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    ids: Vec<ArmId>,
    data: Vec<f64>,
    index: HashMap<ArmId, usize>,
    unit_norm: bool,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "embedding dimension must be positive");
        Self {
            dim,
            ids: Vec::new(),
            data: Vec::new(),
            index: HashMap::new(),
            unit_norm: false,
        }
    }

    pub fn insert(&mut self, id: ArmId, vector: &[f64]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch(id, self.dim, vector.len()));
        }
        if vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite(id));
        }
        if self.index.contains_key(&id) {
            return Err(Error::DuplicateQuery(id));
        }
        self.index.insert(id, self.ids.len());
        self.ids.push(id);
        self.data.extend_from_slice(vector);
        self.unit_norm = false;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Ids in insertion order.
    pub fn ids(&self) -> &[ArmId] {
        &self.ids
    }

    pub fn get(&self, id: ArmId) -> Option<&[f64]> {
        self.index.get(&id).map(|&row| self.row(row))
    }

    pub fn vector(&self, id: ArmId) -> Result<&[f64]> {
        self.get(id).ok_or(Error::MissingEmbedding(id))
    }

    pub fn position(&self, id: ArmId) -> Option<usize> {
        self.index.get(&id).copied()
    }

    /// Vector stored at insertion position `row`.
    pub fn row(&self, row: usize) -> &[f64] {
        &self.data[row * self.dim..(row + 1) * self.dim]
    }

    pub fn iter(&self) -> impl Iterator<Item = (ArmId, &[f64])> + '_ {
        self.ids.iter().copied().zip(self.data.chunks_exact(self.dim))
    }

    pub fn is_unit_norm(&self) -> bool {
        self.unit_norm
    }

    /// Scales every vector to unit L2 norm. Zero vectors are an error.
    pub fn normalize(&mut self) -> Result<()> {
        for (row, id) in self.ids.iter().enumerate() {
            let v = &mut self.data[row * self.dim..(row + 1) * self.dim];
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm == 0.0 {
                log::warn!("query {id} has a zero embedding");
                return Err(Error::ZeroVector);
            }
            v.iter_mut().for_each(|x| *x /= norm);
        }
        self.unit_norm = true;
        Ok(())
    }

    /// Every vector has L2 norm within `tol` of one.
    pub fn check_unit_norm(&self, tol: f64) -> bool {
        self.data
            .chunks_exact(self.dim)
            .all(|v| (v.iter().map(|x| x * x).sum::<f64>().sqrt() - 1.0).abs() <= tol)
    }

    /// Fails with the first query id referenced by a session that has no vector.
    pub fn resolve_sessions(&self, sessions: &[Session]) -> Result<()> {
        for s in sessions {
            for &q in &s.query_ids {
                if !self.index.contains_key(&q) {
                    return Err(Error::MissingEmbedding(q));
                }
            }
        }
        Ok(())
    }
}

/// Loads an embedding table, picking the text or binary reader by the leading magic bytes.
pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = BufReader::new(file);
    let head = reader.fill_buf().map_err(|e| Error::io(path, e))?;
    if head.starts_with(BINARY_MAGIC) {
        read_embeddings_binary(reader, path)
    } else {
        read_embeddings_text(reader, path)
    }
}

pub fn read_embeddings_text<R: BufRead>(reader: R, name: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let name = name.as_ref();
    let parse_err = |line: usize, message: String| Error::Parse {
        path: name.to_path_buf(),
        line,
        message,
    };

    let mut lines = reader
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !matches!(l, Ok(s) if s.trim().is_empty()));

    let (hline, header) = match lines.next() {
        Some((n, l)) => (n, l.map_err(|e| Error::io(name, e))?),
        None => return Err(parse_err(1, "missing `n d` header".into())),
    };
    let hdr: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|e| parse_err(hline, format!("bad header: {e}")))?;
    let [n, d] = hdr[..] else {
        return Err(parse_err(hline, "header must be `n d`".into()));
    };
    if d == 0 {
        return Err(parse_err(hline, "dimension must be positive".into()));
    }

    let mut table = EmbeddingTable::new(d);
    let mut buf = Vec::with_capacity(d);
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::io(name, e))?;
        if table.len() == n {
            return Err(parse_err(lineno, format!("more than {n} rows")));
        }
        let mut tok = line.split_whitespace();
        let id: ArmId = tok
            .next()
            .unwrap_or_default()
            .parse()
            .map_err(|e| parse_err(lineno, format!("bad query id: {e}")))?;
        buf.clear();
        for t in tok {
            let v: f64 = t
                .parse()
                .map_err(|e| parse_err(lineno, format!("bad value {t:?} for query {id}: {e}")))?;
            buf.push(v);
        }
        table.insert(id, &buf)?;
    }
    if table.len() != n {
        return Err(parse_err(hline, format!("header promises {n} rows, found {}", table.len())));
    }
    Ok(table)
}

pub fn read_embeddings_binary<R: Read>(mut reader: R, name: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let name = name.as_ref();
    let mut head = [0u8; 12];
    reader.read_exact(&mut head).map_err(|e| Error::io(name, e))?;
    if &head[..4] != BINARY_MAGIC {
        return Err(Error::Parse {
            path: name.to_path_buf(),
            line: 0,
            message: "missing EMB1 magic".into(),
        });
    }
    let n = u32::from_le_bytes(head[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(head[8..12].try_into().unwrap()) as usize;
    if d == 0 {
        return Err(Error::Parse {
            path: name.to_path_buf(),
            line: 0,
            message: "dimension must be positive".into(),
        });
    }
    let mut table = EmbeddingTable::new(d);
    let mut raw = vec![0u8; 4 * d];
    let mut row = vec![0f64; d];
    for id in 0..n {
        reader.read_exact(&mut raw).map_err(|e| Error::io(name, e))?;
        for (dst, chunk) in row.iter_mut().zip(raw.chunks_exact(4)) {
            *dst = f32::from_le_bytes(chunk.try_into().unwrap()) as f64;
        }
        table.insert(id as ArmId, &row)?;
    }
    Ok(table)
}

/// Writes the text format. Values use Rust's shortest round-trip formatting.
pub fn write_embeddings_text<W: Write>(out: W, table: &EmbeddingTable) -> std::io::Result<()> {
    let mut out = BufWriter::new(out);
    writeln!(out, "{} {}", table.len(), table.dim())?;
    for (id, v) in table.iter() {
        write!(out, "{id}")?;
        for x in v {
            write!(out, " {x}")?;
        }
        writeln!(out)?;
    }
    out.flush()
}

/// Writes the binary format. Ids must be exactly `0..n` in order, since the format has no id column.
pub fn write_embeddings_binary<W: Write>(out: W, table: &EmbeddingTable) -> Result<()> {
    if let Some((pos, &id)) = table.ids().iter().enumerate().find(|&(i, &id)| id as usize != i) {
        return Err(Error::config(format!(
            "binary embeddings need ids 0..n in order; row {pos} has id {id}"
        )));
    }
    let mut out = BufWriter::new(out);
    let io = |e| Error::io("<binary embeddings>", e);
    out.write_all(BINARY_MAGIC).map_err(io)?;
    out.write_all(&(table.len() as u32).to_le_bytes()).map_err(io)?;
    out.write_all(&(table.dim() as u32).to_le_bytes()).map_err(io)?;
    for (_, v) in table.iter() {
        for &x in v {
            out.write_all(&(x as f32).to_le_bytes()).map_err(io)?;
        }
    }
    out.flush().map_err(io)
}

/// Shape of a synthetic corpus.
///
/// Topics are random unit directions. Each session picks a topic, draws its
/// own centre at `session_drift` around it, and emits queries at
/// `topic_spread` around that centre; `noise_fraction` of queries are
/// uniformly random directions instead. Distractor arms are generated the
/// same way but belong to no session.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub num_sessions: usize,
    pub dim: usize,
    pub num_topics: usize,
    /// Per-coordinate std-dev of queries around their session centre.
    pub topic_spread: f64,
    /// Per-coordinate std-dev of a session centre around its topic.
    pub session_drift: f64,
    pub session_length_range: (usize, usize),
    pub noise_fraction: f64,
    /// Arms that belong to no session.
    pub num_distractors: usize,
    pub rng_seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            num_sessions: 500,
            dim: 16,
            num_topics: 5,
            topic_spread: 0.12,
            session_drift: 0.2,
            session_length_range: (4, 12),
            noise_fraction: 0.05,
            num_distractors: 10_000,
            rng_seed: 7,
        }
    }
}

impl SyntheticConfig {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.session_length_range;
        if lo < DEFAULT_MIN_SESSION_LEN || hi > DEFAULT_MAX_SESSION_LEN || lo > hi {
            return Err(Error::config(format!(
                "session_length_range [{lo},{hi}] must lie within [{DEFAULT_MIN_SESSION_LEN},{DEFAULT_MAX_SESSION_LEN}]"
            )));
        }
        if self.dim == 0 || self.num_topics == 0 {
            return Err(Error::config("dim and num_topics must be positive"));
        }
        if !(self.topic_spread >= 0.0 && self.topic_spread.is_finite())
            || !(self.session_drift >= 0.0 && self.session_drift.is_finite())
        {
            return Err(Error::config("spreads must be finite and non-negative"));
        }
        if !(0.0..=1.0).contains(&self.noise_fraction) {
            return Err(Error::config("noise_fraction must lie in [0,1]"));
        }
        Ok(())
    }
}

/// Generates sessions plus a unit-norm embedding table covering session
/// queries and distractors. Ids are shuffled so they carry no information
/// about which arms belong to sessions.
pub fn generate_synthetic(cfg: &SyntheticConfig) -> Result<(Vec<Session>, EmbeddingTable)> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let d = cfg.dim;

    let topics: Vec<Vec<f64>> = (0..cfg.num_topics).map(|_| random_unit(&mut rng, d)).collect();
    let mut vectors: Vec<Vec<f64>> = Vec::new();
    let mut layout: Vec<(usize, usize)> = Vec::with_capacity(cfg.num_sessions);

    for _ in 0..cfg.num_sessions {
        let topic = &topics[rng.random_range(0..cfg.num_topics)];
        let centre = jitter(&mut rng, topic, cfg.session_drift);
        let len = rng.random_range(cfg.session_length_range.0..=cfg.session_length_range.1);
        let start = vectors.len();
        for _ in 0..len {
            vectors.push(draw_query(&mut rng, &centre, cfg));
        }
        layout.push((start, len));
    }
    for _ in 0..cfg.num_distractors {
        let topic = &topics[rng.random_range(0..cfg.num_topics)];
        let centre = jitter(&mut rng, topic, cfg.session_drift);
        vectors.push(draw_query(&mut rng, &centre, cfg));
    }

    let mut ids: Vec<ArmId> = (0..vectors.len() as ArmId).collect();
    ids.shuffle(&mut rng);

    let sessions = layout
        .iter()
        .enumerate()
        .map(|(i, &(start, len))| Session {
            session_id: format!("s{i:05}"),
            query_ids: ids[start..start + len].to_vec(),
        })
        .collect();

    let mut order: Vec<usize> = (0..vectors.len()).collect();
    order.sort_by_key(|&i| ids[i]);
    let mut table = EmbeddingTable::new(d);
    for i in order {
        table.insert(ids[i], &vectors[i])?;
    }
    table.unit_norm = true;
    Ok((sessions, table))
}

/// Log records for synthetic sessions (`q<id>` texts, one-second spacing), so
/// a generated corpus can be written out and re-ingested.
pub fn synthetic_log_records(sessions: &[Session]) -> Vec<QueryRecord> {
    let mut out = Vec::new();
    for s in sessions {
        for (i, &q) in s.query_ids.iter().enumerate() {
            out.push(QueryRecord {
                session_id: s.session_id.clone(),
                timestamp: 1_600_000_000_000 + 1000 * i as i64,
                query_text: format!("q{q}"),
                query_id: q,
            });
        }
    }
    out
}

fn draw_query(rng: &mut ChaCha8Rng, centre: &[f64], cfg: &SyntheticConfig) -> Vec<f64> {
    if cfg.noise_fraction > 0.0 && rng.random_bool(cfg.noise_fraction) {
        random_unit(rng, centre.len())
    } else {
        jitter(rng, centre, cfg.topic_spread)
    }
}

fn jitter(rng: &mut ChaCha8Rng, centre: &[f64], spread: f64) -> Vec<f64> {
    if spread == 0.0 {
        return centre.to_vec();
    }
    let v: Vec<f64> = centre
        .iter()
        .map(|&c| c + spread * rng.sample::<f64, _>(StandardNormal))
        .collect();
    unit(v).unwrap_or_else(|| centre.to_vec())
}

fn random_unit(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
        if let Some(u) = unit(v) {
            return u;
        }
    }
}

fn unit(mut v: Vec<f64>) -> Option<Vec<f64>> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if n == 0.0 || !n.is_finite() {
        return None;
    }
    v.iter_mut().for_each(|x| *x /= n);
    Some(v)
}

/// Log records plus an embedding table whose ids match what [`parse_log`]
/// assigns when those records are read back: session queries in log order,
/// then the remaining arms in table order.
pub fn export_synthetic(sessions: &[Session], table: &EmbeddingTable) -> Result<(Vec<QueryRecord>, EmbeddingTable)> {
    let mut records = synthetic_log_records(sessions);
    let mut relabel: HashMap<ArmId, ArmId> = HashMap::new();
    let mut order: Vec<ArmId> = Vec::with_capacity(table.len());
    for r in &mut records {
        let next = relabel.len() as ArmId;
        let id = *relabel.entry(r.query_id).or_insert_with(|| {
            order.push(r.query_id);
            next
        });
        r.query_id = id;
    }
    for &old in table.ids() {
        if !relabel.contains_key(&old) {
            relabel.insert(old, order.len() as ArmId);
            order.push(old);
        }
    }
    let mut out = EmbeddingTable::new(table.dim());
    for (new, old) in order.into_iter().enumerate() {
        out.insert(new as ArmId, table.vector(old)?)?;
    }
    out.unit_norm = table.unit_norm;
    Ok((records, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(s: &str) -> Result<Vec<QueryRecord>> {
        parse_log_reader(Cursor::new(s), "mem.log", &LogFormat::default())
    }

    fn session(id: &str, n: usize) -> Vec<QueryRecord> {
        (0..n)
            .map(|i| QueryRecord {
                session_id: id.into(),
                timestamp: i as i64,
                query_text: format!("{id}-{i}"),
                query_id: i as ArmId,
            })
            .collect()
    }

    #[test]
    fn dedups_by_exact_text() {
        let recs = parse("a\t1\tfoo\na\t2\tbar\nb\t3\tfoo\n").unwrap();
        assert_eq!(recs.len(), 3);
        assert_eq!(recs[0].query_id, recs[2].query_id);
        assert_ne!(recs[0].query_id, recs[1].query_id);
    }

    #[test]
    fn parses_fuzzing_session_row() {
        let recs = parse("XXXX495\t1600000243000\tprotocol state fuzzing of tls implementations\n").unwrap();
        assert_eq!(recs[0].session_id, "XXXX495");
        assert_eq!(recs[0].query_text, "protocol state fuzzing of tls implementations");
        assert_eq!(recs[0].timestamp, 1_600_000_243_000);
    }

    #[test]
    fn two_field_line_names_its_line() {
        let err = parse("a\t1\tfoo\nb\t2\n").unwrap_err();
        match err {
            Error::Parse { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn empty_log_is_empty() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn session_length_filter() {
        assert!(build_sessions(&session("a", 3), 4, 50).0.is_empty());
        assert_eq!(build_sessions(&session("a", 7), 4, 50).0.len(), 1);
        assert!(build_sessions(&session("a", 51), 4, 50).0.is_empty());
    }

    #[test]
    fn sessions_sorted_stably_by_timestamp() {
        let recs = parse("s\t5\tc\ns\t1\ta\ns\t5\td\ns\t3\tb\n").unwrap();
        let (sessions, stats) = build_sessions(&recs, 1, 50);
        let texts: Vec<&str> = sessions[0]
            .query_ids
            .iter()
            .map(|&q| recs.iter().find(|r| r.query_id == q).unwrap().query_text.as_str())
            .collect();
        assert_eq!(texts, ["a", "b", "c", "d"]);
        assert_eq!(stats.sessions_after, 1);
        assert_eq!(stats.queries_after, 4);
    }

    #[test]
    fn text_embeddings() {
        let t = read_embeddings_text(Cursor::new("2 3\n0 1 0 0\n5 0.5 0.5 0\n"), "e").unwrap();
        assert_eq!(t.dim(), 3);
        assert_eq!(t.len(), 2);
        assert_eq!(t.get(5).unwrap(), &[0.5, 0.5, 0.0]);
    }

    #[test]
    fn short_row_is_rejected() {
        let err = read_embeddings_text(Cursor::new("2 3\n0 1 0 0\n1 0.5 0.5\n"), "e").unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(1, 3, 2)));
    }

    #[test]
    fn duplicate_and_nonfinite_rows_are_rejected() {
        let err = read_embeddings_text(Cursor::new("2 1\n0 1\n0 2\n"), "e").unwrap_err();
        assert!(matches!(err, Error::DuplicateQuery(0)));
        let err = read_embeddings_text(Cursor::new("1 1\n0 NaN\n"), "e").unwrap_err();
        assert!(matches!(err, Error::NonFinite(0)));
    }

    #[test]
    fn row_count_must_match_header() {
        assert!(read_embeddings_text(Cursor::new("3 1\n0 1\n1 2\n"), "e").is_err());
        assert!(read_embeddings_text(Cursor::new("1 1\n0 1\n1 2\n"), "e").is_err());
    }

    #[test]
    fn binary_embeddings_round_trip() {
        let mut t = EmbeddingTable::new(2);
        t.insert(0, &[1.0, 0.5]).unwrap();
        t.insert(1, &[-0.25, 2.0]).unwrap();
        let mut buf = Vec::new();
        write_embeddings_binary(&mut buf, &t).unwrap();
        assert_eq!(&buf[..4], b"EMB1");
        let back = read_embeddings_binary(Cursor::new(buf), "b").unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn missing_embedding_is_reported() {
        let mut t = EmbeddingTable::new(1);
        t.insert(0, &[1.0]).unwrap();
        let s = Session {
            session_id: "x".into(),
            query_ids: vec![0, 9],
        };
        assert!(matches!(t.resolve_sessions(&[s]), Err(Error::MissingEmbedding(9))));
    }

    fn small_cfg() -> SyntheticConfig {
        SyntheticConfig {
            num_sessions: 100,
            dim: 8,
            num_topics: 5,
            session_length_range: (4, 12),
            num_distractors: 50,
            ..SyntheticConfig::default()
        }
    }

    #[test]
    fn zero_spread_sessions_collapse_to_centre() {
        let cfg = SyntheticConfig {
            topic_spread: 0.0,
            noise_fraction: 0.0,
            ..small_cfg()
        };
        let (sessions, table) = generate_synthetic(&cfg).unwrap();
        for s in &sessions {
            let first = table.get(s.query_ids[0]).unwrap();
            for &q in &s.query_ids[1..] {
                assert_eq!(table.get(q).unwrap(), first);
            }
        }
    }

    #[test]
    fn synthetic_is_deterministic_and_sized() {
        let (a, ta) = generate_synthetic(&small_cfg()).unwrap();
        let (b, tb) = generate_synthetic(&small_cfg()).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta, tb);
        let total: usize = a.iter().map(Session::len).sum();
        assert!((400..=1200).contains(&total), "{total}");
        assert_eq!(ta.len(), total + 50);
        assert!(ta.is_unit_norm() && ta.check_unit_norm(1e-9));
        ta.resolve_sessions(&a).unwrap();
    }

    #[test]
    fn invalid_synthetic_config() {
        let cfg = SyntheticConfig {
            session_length_range: (2, 10),
            ..small_cfg()
        };
        assert!(generate_synthetic(&cfg).is_err());
    }

    #[test]
    fn exported_synthetic_round_trips_through_the_log_reader() {
        let (sessions, table) = generate_synthetic(&small_cfg()).unwrap();
        let (records, relabelled) = export_synthetic(&sessions, &table).unwrap();
        let mut buf = Vec::new();
        write_log(&mut buf, &records).unwrap();
        let back = parse_log_reader(buf.as_slice(), "mem", &LogFormat::default()).unwrap();
        assert_eq!(back, records);
        let (again, _) = build_sessions(&back, 4, 50);
        assert_eq!(again.len(), sessions.len());
        for (a, b) in again.iter().zip(&sessions) {
            let va: Vec<&[f64]> = a.query_ids.iter().map(|&q| relabelled.get(q).unwrap()).collect();
            let vb: Vec<&[f64]> = b.query_ids.iter().map(|&q| table.get(q).unwrap()).collect();
            assert_eq!(va, vb);
        }
        assert_eq!(relabelled.len(), table.len());
    }
}

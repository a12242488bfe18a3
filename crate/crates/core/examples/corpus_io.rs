//! Session logs and embedding files.
//!
//! Generates a small synthetic corpus, writes it as a tab-separated log plus
//! text and binary embeddings, reads everything back, and prints the
//! before/after filter statistics.
//!
//! ```bash
//! cargo run --example corpus_io
//! ```

use std::fs::File;
use std::io::BufWriter;

use manyarm::corpus::{
    build_sessions, export_synthetic, generate_synthetic, load_embeddings, parse_log, write_embeddings_binary,
    write_embeddings_text, write_log, LogFormat, SyntheticConfig, DEFAULT_MAX_SESSION_LEN, DEFAULT_MIN_SESSION_LEN,
};
use manyarm::experiment::format_stats;
use manyarm::Error;

fn main() -> manyarm::Result<()> {
    let dir = std::env::temp_dir().join(format!("manyarm-corpus-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| Error::Config(e.to_string()))?;
    let create = |name: &str| {
        File::create(dir.join(name))
            .map(BufWriter::new)
            .map_err(|e| Error::Config(e.to_string()))
    };

    let (sessions, table) = generate_synthetic(&SyntheticConfig {
        num_sessions: 100,
        dim: 8,
        num_distractors: 400,
        ..SyntheticConfig::default()
    })?;
    let (records, table) = export_synthetic(&sessions, &table)?;
    write_log(create("log.tsv")?, &records).map_err(|e| Error::Config(e.to_string()))?;
    write_embeddings_text(create("emb.txt")?, &table).map_err(|e| Error::Config(e.to_string()))?;
    write_embeddings_binary(create("emb.bin")?, &table)?;

    let records = parse_log(dir.join("log.tsv"), &LogFormat::default())?;
    let (kept, stats) = build_sessions(&records, DEFAULT_MIN_SESSION_LEN, DEFAULT_MAX_SESSION_LEN);
    print!("{}", format_stats(&stats));

    let text = load_embeddings(dir.join("emb.txt"))?;
    let binary = load_embeddings(dir.join("emb.bin"))?;
    text.resolve_sessions(&kept)?;
    println!("text embeddings: {} x {}", text.len(), text.dim());
    println!("binary embeddings: {} x {} (f32)", binary.len(), binary.dim());
    let worst = text
        .iter()
        .map(|(id, v)| {
            let b = binary.get(id).unwrap();
            v.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);
    println!("largest text/binary difference: {worst:.2e}");

    let _ = std::fs::remove_dir_all(&dir);
    Ok(())
}

//! Episode log interchange format: JSON Lines, one episode per line.
//!
//! Items are not serialized; they regenerate deterministically from the
//! episode's seed and the generating config (whose hash each line carries).

use crate::error::{Error, Result};
use crate::simulator::Episode;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

/// Serialize episodes as JSONL.
pub fn write_episodes(path: &Path, episodes: &[Episode]) -> Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = std::io::BufWriter::new(file);
    for episode in episodes {
        serde_json::to_writer(&mut out, episode)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

/// Read a JSONL episode log.
pub fn read_episodes(path: &Path) -> Result<Vec<Episode>> {
    let file = std::fs::File::open(path)?;
    let reader = BufReader::new(file);
    let mut episodes = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let episode: Episode = serde_json::from_str(&line)
            .map_err(|e| Error::MalformedData(format!("episode log line {}: {e}", lineno + 1)))?;
        episodes.push(episode);
    }
    if episodes.is_empty() {
        return Err(Error::EmptyInput("episode log"));
    }
    Ok(episodes)
}

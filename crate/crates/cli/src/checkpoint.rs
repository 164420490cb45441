//! Search checkpoint files.
//!
//! Line 1 is the header `SPOOFSEARCH-CKPT v1 k=<k> primitive=<bool>`; every
//! following line is a JSON object, either a frontier node
//! `{"node":{"triples":[["x","b","c-or-null"],...],"depth":d}}` (a null
//! third coordinate means the exponent range is open) or an already-found
//! result `{"result":"<canonical text>"}`. Bases and exponent bounds are
//! decimal strings. A load of a save is the identity, so a resumed search
//! produces output identical to an uninterrupted run.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use spoof_core::bounds::{ExponentRange, PartialFactor, PartialFactorization};
use spoof_core::factorization::parse;
use spoof_core::search::SearchNode;
use spoof_core::Factorization;

pub const FORMAT_VERSION: &str = "v1";

#[derive(Clone, Debug)]
pub struct Checkpoint {
    pub max_bases: usize,
    pub require_primitive: bool,
    pub frontier: Vec<SearchNode>,
    pub results: Vec<Factorization>,
}

#[derive(Debug)]
pub enum CheckpointError {
    Io(io::Error),
    /// The header names a format version this build does not understand.
    VersionMismatch { found: String },
    /// Structurally invalid file (bad header, bad JSON, bad field values,
    /// or a truncated line).
    Corrupt { line: usize, reason: String },
}

impl fmt::Display for CheckpointError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CheckpointError::Io(e) => write!(f, "checkpoint io error: {}", e),
            CheckpointError::VersionMismatch { found } => {
                write!(f, "unsupported checkpoint version {:?}", found)
            }
            CheckpointError::Corrupt { line, reason } => {
                write!(f, "corrupt checkpoint at line {}: {}", line, reason)
            }
        }
    }
}

impl std::error::Error for CheckpointError {}

impl From<io::Error> for CheckpointError {
    fn from(e: io::Error) -> Self {
        CheckpointError::Io(e)
    }
}

#[derive(Serialize, Deserialize)]
struct LineJson {
    #[serde(skip_serializing_if = "Option::is_none")]
    node: Option<NodeJson>,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<String>,
}

#[derive(Serialize, Deserialize)]
struct NodeJson {
    triples: Vec<(String, String, Option<String>)>,
    depth: u32,
}

fn node_to_json(node: &SearchNode) -> NodeJson {
    NodeJson {
        triples: node
            .partial
            .entries()
            .iter()
            .map(|e| {
                let (b, c) = match e.range {
                    ExponentRange::Fixed(b) => (b, Some(b.to_string())),
                    ExponentRange::AtLeast(b) => (b, None),
                };
                (e.base.to_string(), b.to_string(), c)
            })
            .collect(),
        depth: node.depth,
    }
}

fn node_from_json(node: NodeJson, line: usize) -> Result<SearchNode, CheckpointError> {
    let corrupt = |reason: String| CheckpointError::Corrupt { line, reason };
    let mut entries = Vec::with_capacity(node.triples.len());
    for (x, b, c) in node.triples {
        let base: BigInt =
            x.parse().map_err(|_| corrupt(format!("invalid base {:?}", x)))?;
        let lower: u64 = b.parse().map_err(|_| corrupt(format!("invalid bound {:?}", b)))?;
        let range = match c {
            None => ExponentRange::AtLeast(lower),
            Some(c) => {
                let upper: u64 =
                    c.parse().map_err(|_| corrupt(format!("invalid bound {:?}", c)))?;
                if upper != lower {
                    return Err(corrupt(format!(
                        "exponent range [{}, {}] is neither fixed nor open",
                        lower, upper
                    )));
                }
                ExponentRange::Fixed(lower)
            }
        };
        entries.push(PartialFactor { base, range });
    }
    let partial = PartialFactorization::new(entries)
        .map_err(|e| corrupt(format!("invalid partial factorization: {}", e)))?;
    Ok(SearchNode { partial, depth: node.depth })
}

/// Writes the checkpoint atomically (temp file + rename).
pub fn save(checkpoint: &Checkpoint, path: &Path) -> Result<(), CheckpointError> {
    let tmp = path.with_extension("tmp");
    {
        let mut out = io::BufWriter::new(fs::File::create(&tmp)?);
        writeln!(
            out,
            "SPOOFSEARCH-CKPT {} k={} primitive={}",
            FORMAT_VERSION, checkpoint.max_bases, checkpoint.require_primitive
        )?;
        for node in &checkpoint.frontier {
            let line = LineJson { node: Some(node_to_json(node)), result: None };
            writeln!(out, "{}", serde_json::to_string(&line).expect("serializable"))?;
        }
        for result in &checkpoint.results {
            let line = LineJson { node: None, result: Some(result.to_string()) };
            writeln!(out, "{}", serde_json::to_string(&line).expect("serializable"))?;
        }
        out.flush()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

pub fn load(path: &Path) -> Result<Checkpoint, CheckpointError> {
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(CheckpointError::Corrupt { line: 1, reason: "empty file".into() })?;
    let (max_bases, require_primitive) = parse_header(header)?;
    let mut frontier = Vec::new();
    let mut results = Vec::new();
    for (idx, raw) in lines {
        let line_no = idx + 1;
        if raw.trim().is_empty() {
            return Err(CheckpointError::Corrupt {
                line: line_no,
                reason: "blank line (file truncated?)".into(),
            });
        }
        let parsed: LineJson = serde_json::from_str(raw).map_err(|e| {
            CheckpointError::Corrupt { line: line_no, reason: format!("invalid JSON: {}", e) }
        })?;
        match (parsed.node, parsed.result) {
            (Some(node), None) => frontier.push(node_from_json(node, line_no)?),
            (None, Some(text)) => results.push(parse(&text).map_err(|e| {
                CheckpointError::Corrupt { line: line_no, reason: format!("bad result: {}", e) }
            })?),
            _ => {
                return Err(CheckpointError::Corrupt {
                    line: line_no,
                    reason: "expected exactly one of \"node\" or \"result\"".into(),
                })
            }
        }
    }
    Ok(Checkpoint { max_bases, require_primitive, frontier, results })
}

fn parse_header(header: &str) -> Result<(usize, bool), CheckpointError> {
    let corrupt = |reason: &str| CheckpointError::Corrupt { line: 1, reason: reason.into() };
    let mut parts = header.split_whitespace();
    if parts.next() != Some("SPOOFSEARCH-CKPT") {
        return Err(corrupt("missing SPOOFSEARCH-CKPT magic"));
    }
    let version = parts.next().ok_or_else(|| corrupt("missing version"))?;
    if version != FORMAT_VERSION {
        return Err(CheckpointError::VersionMismatch { found: version.to_string() });
    }
    let k = parts
        .next()
        .and_then(|t| t.strip_prefix("k="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| corrupt("missing or invalid k="))?;
    let primitive = parts
        .next()
        .and_then(|t| t.strip_prefix("primitive="))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| corrupt("missing or invalid primitive="))?;
    if parts.next().is_some() {
        return Err(corrupt("trailing header tokens"));
    }
    Ok((k, primitive))
}

#[cfg(test)]
mod tests {
    use super::*;
    use spoof_core::bounds::PartialFactorization;

    fn sample() -> Checkpoint {
        let partial =
            PartialFactorization::from_triples(&[(1, 2, Some(2)), (-3, 1, None)]).unwrap();
        Checkpoint {
            max_bases: 4,
            require_primitive: true,
            frontier: vec![SearchNode { partial, depth: 3 }],
            results: vec![parse("1^1").unwrap(), parse("1^2 * (-3)^1").unwrap()],
        }
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let ck = sample();
        save(&ck, &path).unwrap();
        let loaded = load(&path).unwrap();
        assert_eq!(loaded.max_bases, 4);
        assert!(loaded.require_primitive);
        assert_eq!(loaded.frontier, ck.frontier);
        assert_eq!(loaded.results, ck.results);
    }

    #[test]
    fn rejects_version_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        std::fs::write(&path, "SPOOFSEARCH-CKPT v2 k=3 primitive=true\n").unwrap();
        assert!(matches!(load(&path), Err(CheckpointError::VersionMismatch { .. })));
    }

    #[test]
    fn rejects_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let ck = sample();
        save(&ck, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        std::fs::write(&path, &text[..text.len() - 10]).unwrap();
        assert!(matches!(load(&path), Err(CheckpointError::Corrupt { .. })));
    }

    #[test]
    fn empty_frontier_roundtrips() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ck.jsonl");
        let ck = Checkpoint {
            max_bases: 2,
            require_primitive: false,
            frontier: vec![],
            results: sample().results,
        };
        save(&ck, &path).unwrap();
        let loaded = load(&path).unwrap();
        assert!(loaded.frontier.is_empty());
        assert_eq!(loaded.results.len(), 2);
        assert!(!loaded.require_primitive);
    }
}

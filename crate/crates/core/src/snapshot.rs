//! Sketch snapshot files.
//!
//! Layout:
//!
//! ```text
//! ordsketch-snapshot <version>\n
//! <one-line JSON header>\n
//! <table 0 level-ordered coordinates as little-endian f64> <table 1> ...
//! ```
//!
//! The header records every parameter, the generator id, the hash
//! quadruples `(a, b, p, n)` and the payload length, so a snapshot can be
//! validated and reloaded without outside context. Floats in the header use
//! shortest round-trip formatting and the payload stores raw bits, so a
//! write/read cycle is bit-exact.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::EventMapKind;
use crate::hashing::{AffineHash, PRNG_ID};
use crate::sketch::{OrderSketch, SketchConfig};
use crate::tensor::GradedTensor;

pub const FORMAT_VERSION: u32 = 1;
const MAGIC: &str = "ordsketch-snapshot";

#[derive(Debug, Serialize, Deserialize)]
struct Header {
    format_version: u32,
    epsilon: f64,
    delta: f64,
    depth: usize,
    kind: EventMapKind,
    alphabet_size: u64,
    seed: u64,
    prng: String,
    hash_count: usize,
    target_size: u64,
    hashes: Vec<[u64; 4]>,
    events_seen: u64,
    stream_l1: f64,
    coordinates_per_table: usize,
    byte_order: String,
}

fn snap_err(msg: impl Into<String>) -> Error {
    Error::Snapshot(msg.into())
}

pub fn write_snapshot<W: Write>(sketch: &OrderSketch, mut out: W) -> Result<()> {
    let c = sketch.config();
    let header = Header {
        format_version: FORMAT_VERSION,
        epsilon: c.epsilon,
        delta: c.delta,
        depth: c.depth,
        kind: c.kind,
        alphabet_size: c.alphabet_size,
        seed: c.seed,
        prng: PRNG_ID.to_string(),
        hash_count: c.hash_count,
        target_size: c.target_size,
        hashes: sketch.hashes().iter().map(|h| [h.a, h.b, h.p, h.n]).collect(),
        events_seen: sketch.events_seen(),
        stream_l1: sketch.stream_l1(),
        coordinates_per_table: sketch.tables().first().map_or(0, GradedTensor::len),
        byte_order: "little-endian".into(),
    };
    let json = serde_json::to_string(&header).map_err(|e| snap_err(e.to_string()))?;
    let io = |e: std::io::Error| snap_err(e.to_string());
    writeln!(out, "{MAGIC} {FORMAT_VERSION}").map_err(io)?;
    writeln!(out, "{json}").map_err(io)?;
    let mut buf = Vec::with_capacity(sketch.memory_coordinates() * 8);
    for t in sketch.tables() {
        for v in t.as_flat() {
            buf.extend_from_slice(&v.to_le_bytes());
        }
    }
    out.write_all(&buf).map_err(io)?;
    out.flush().map_err(io)
}

pub fn snapshot_bytes(sketch: &OrderSketch) -> Vec<u8> {
    let mut out = Vec::new();
    write_snapshot(sketch, &mut out).expect("writing to a Vec cannot fail");
    out
}

pub fn read_snapshot<R: BufRead>(mut input: R) -> Result<OrderSketch> {
    let io = |e: std::io::Error| snap_err(e.to_string());
    let mut line = String::new();
    input.read_line(&mut line).map_err(io)?;
    let version = line
        .trim_end()
        .strip_prefix(MAGIC)
        .map(str::trim)
        .ok_or_else(|| snap_err("missing snapshot magic"))?;
    if version != FORMAT_VERSION.to_string() {
        return Err(snap_err(format!("unsupported format version {version:?}")));
    }
    line.clear();
    input.read_line(&mut line).map_err(io)?;
    let header: Header =
        serde_json::from_str(line.trim_end()).map_err(|e| snap_err(format!("header: {e}")))?;
    if header.format_version != FORMAT_VERSION {
        return Err(snap_err("header version disagrees with magic line"));
    }
    if header.prng != PRNG_ID {
        return Err(snap_err(format!("unknown generator {:?}", header.prng)));
    }
    if header.byte_order != "little-endian" {
        return Err(snap_err(format!("unsupported byte order {:?}", header.byte_order)));
    }
    let config = SketchConfig {
        epsilon: header.epsilon,
        delta: header.delta,
        depth: header.depth,
        kind: header.kind,
        alphabet_size: header.alphabet_size,
        seed: header.seed,
        target_size: header.target_size,
        hash_count: header.hash_count,
    };
    let hashes = header
        .hashes
        .iter()
        .map(|&[a, b, p, n]| AffineHash::new(a, b, p, n))
        .collect::<Result<Vec<_>>>()?;
    let per_table = config
        .memory_coordinates()
        .map(|total| total / config.hash_count.max(1))
        .ok_or_else(|| snap_err("table size overflows"))?;
    if per_table != header.coordinates_per_table {
        return Err(snap_err(format!(
            "header claims {} coordinates per table, shape implies {per_table}",
            header.coordinates_per_table
        )));
    }
    let mut payload = Vec::new();
    input.read_to_end(&mut payload).map_err(io)?;
    if payload.len() != per_table * config.hash_count * 8 {
        return Err(snap_err(format!(
            "payload has {} bytes, expected {}",
            payload.len(),
            per_table * config.hash_count * 8
        )));
    }
    let tables = payload
        .chunks_exact(per_table * 8)
        .map(|chunk| {
            let data = chunk
                .chunks_exact(8)
                .map(|b| f64::from_le_bytes(b.try_into().expect("8-byte chunk")))
                .collect();
            GradedTensor::from_flat(config.target_size as usize, config.depth, data)
        })
        .collect::<Result<Vec<_>>>()?;
    OrderSketch::from_state(config, hashes, tables, header.events_seen, header.stream_l1)
}

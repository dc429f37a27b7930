//! Sketch quality sweep on a single heavy-tailed stream.
//!
//! The exact features are computed once; every `(|B|, r)` cell is then
//! sketched under several hash seeds and scored with the relative l1 error.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::experiments::derive_seed;
use crate::experiments::generators::gen_heavy_tail_stream;
use crate::experiments::metric::{error_metric, Normalization};
use crate::features::{stream_features, EventMapKind};
use crate::hashing::{smallest_prime_geq, AffineHash};
use crate::sketch::{OrderSketch, SketchConfig};
use crate::tensor::{coordinate_count, Stream};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table1Config {
    pub alphabet_size: usize,
    pub length: usize,
    pub heavy_count: usize,
    pub heavy_mass: f64,
    pub depth: usize,
    pub kind: EventMapKind,
    pub target_sizes: Vec<u64>,
    pub hash_counts: Vec<usize>,
    /// Hash seeds per cell.
    pub repeats: usize,
    pub seed: u64,
    pub normalization: Normalization,
    /// Adds a collision-free `|B| = |A|`, `r = 1` row.
    pub identity_row: bool,
}

impl Default for Table1Config {
    fn default() -> Self {
        Table1Config {
            alphabet_size: 100,
            length: 100_000,
            heavy_count: 10,
            heavy_mass: 0.10,
            depth: 2,
            kind: EventMapKind::Exp,
            target_sizes: vec![4, 8, 16, 32],
            hash_counts: vec![2, 4, 8],
            repeats: 10,
            seed: 0,
            normalization: Normalization::PerLevel,
            identity_row: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Row {
    pub target_size: u64,
    pub hash_count: usize,
    /// `(sum_m |A|^m) / (r * sum_m |B|^m)`.
    pub memory_ratio: f64,
    /// Median `Error_M` over the repeats.
    pub median_error: f64,
    pub errors: Vec<f64>,
    /// Median update throughput; wall-clock and hardware dependent.
    pub events_per_second: f64,
}

fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

fn run_cell(stream: &Stream, sketch: &mut OrderSketch) -> Result<f64> {
    let start = Instant::now();
    for e in stream.events() {
        sketch.update(*e)?;
    }
    let secs = start.elapsed().as_secs_f64();
    Ok(stream.len() as f64 / secs.max(1e-12))
}

pub fn run_experiment_1(cfg: &Table1Config) -> Result<Vec<Table1Row>> {
    let stream = gen_heavy_tail_stream(
        cfg.alphabet_size,
        cfg.length,
        cfg.heavy_count,
        cfg.heavy_mass,
        cfg.seed,
    )?;
    let exact = stream_features(&stream, cfg.kind, cfg.depth);
    let full = coordinate_count(cfg.alphabet_size, cfg.depth).unwrap_or(usize::MAX) as f64;
    let alphabet = cfg.alphabet_size as u64;

    let mut cells: Vec<(u64, usize, u64)> = Vec::new();
    for &b in &cfg.target_sizes {
        for &r in &cfg.hash_counts {
            for k in 0..cfg.repeats {
                cells.push((b, r, derive_seed(cfg.seed, &[b, r as u64, k as u64])));
            }
        }
    }
    let results = cells
        .par_iter()
        .map(|&(b, r, seed)| -> Result<(f64, f64)> {
            let config = SketchConfig::with_shape(b, r, cfg.depth, cfg.kind, alphabet, seed)?;
            let mut sketch = OrderSketch::new(config)?;
            let rate = run_cell(&stream, &mut sketch)?;
            let report = error_metric(&exact, &sketch.pullback_estimates()?, cfg.normalization)?;
            Ok((report.aggregate, rate))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    if cfg.identity_row {
        let config = SketchConfig::with_shape(alphabet, 1, cfg.depth, cfg.kind, alphabet, cfg.seed)?;
        let id = AffineHash::new(1, 0, smallest_prime_geq(alphabet.max(2)), alphabet)?;
        let mut sketch = OrderSketch::with_hashes(config, vec![id])?;
        let rate = run_cell(&stream, &mut sketch)?;
        let report = error_metric(&exact, &sketch.pullback_estimates()?, cfg.normalization)?;
        rows.push(Table1Row {
            target_size: alphabet,
            hash_count: 1,
            memory_ratio: full / config.memory_coordinates().unwrap_or(usize::MAX) as f64,
            median_error: report.aggregate,
            errors: vec![report.aggregate],
            events_per_second: rate,
        });
    }
    for (chunk, cell) in results
        .chunks(cfg.repeats.max(1))
        .zip(cells.chunks(cfg.repeats.max(1)))
    {
        let (b, r, _) = cell[0];
        let errors: Vec<f64> = chunk.iter().map(|x| x.0).collect();
        let rates: Vec<f64> = chunk.iter().map(|x| x.1).collect();
        let sketch_size = coordinate_count(b as usize, cfg.depth).unwrap_or(usize::MAX) as f64 * r as f64;
        rows.push(Table1Row {
            target_size: b,
            hash_count: r,
            memory_ratio: full / sketch_size,
            median_error: median(&errors),
            errors,
            events_per_second: median(&rates),
        });
    }
    Ok(rows)
}

//! The count-min order sketch.
//!
//! `r` hash functions map the big alphabet `A` into a small alphabet `B`;
//! table `j` holds the exact features of the hashed stream
//! `(lambda_i, H_j(a_i))_i` over `B`. A coordinate query reads the hashed
//! word from every table and takes the minimum. Because every table is a
//! sum of non-negative original coordinates that collide with the query,
//! the estimate never undercounts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{apply_event_unchecked, EventMapKind};
use crate::hashing::{sample_hashes, AffineHash, HashFamilySpec};
use crate::tensor::{check_letter, coordinate_count, Event, GradedTensor, Word};

const ROUNDING_SLACK: f64 = 1e-9;

/// Every parameter that determines a sketch's hash draws and table shape.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SketchConfig {
    pub epsilon: f64,
    pub delta: f64,
    pub depth: usize,
    pub kind: EventMapKind,
    pub alphabet_size: u64,
    pub seed: u64,
    /// `|B|`.
    pub target_size: u64,
    /// `r`.
    pub hash_count: usize,
}

impl SketchConfig {
    /// `|B| = ceil(2 / epsilon)` and `r = max(1, ceil(log2(1 / delta)))`.
    pub fn new(
        epsilon: f64,
        delta: f64,
        depth: usize,
        kind: EventMapKind,
        alphabet_size: u64,
        seed: u64,
    ) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "delta must lie in (0, 1), got {delta}"
            )));
        }
        check_shape(depth, alphabet_size)?;
        let target_size = (2.0 / epsilon - ROUNDING_SLACK).ceil() as u64;
        let hash_count = ((1.0 / delta).log2() - ROUNDING_SLACK).ceil().max(1.0) as usize;
        Ok(SketchConfig {
            epsilon,
            delta,
            depth,
            kind,
            alphabet_size,
            seed,
            target_size,
            hash_count,
        })
    }

    /// Sets `|B|` and `r` directly; `epsilon = 2 / |B|`, `delta = 2^-r`.
    pub fn with_shape(
        target_size: u64,
        hash_count: usize,
        depth: usize,
        kind: EventMapKind,
        alphabet_size: u64,
        seed: u64,
    ) -> Result<Self> {
        if target_size == 0 || hash_count == 0 {
            return Err(Error::InvalidParameter(
                "target alphabet and hash count must be positive".into(),
            ));
        }
        check_shape(depth, alphabet_size)?;
        Ok(SketchConfig {
            epsilon: 2.0 / target_size as f64,
            delta: 0.5f64.powi(hash_count as i32),
            depth,
            kind,
            alphabet_size,
            seed,
            target_size,
            hash_count,
        })
    }

    /// Coordinates stored across all tables, `r * sum_{m<=M} |B|^m`.
    pub fn memory_coordinates(&self) -> Option<usize> {
        coordinate_count(self.target_size as usize, self.depth)?.checked_mul(self.hash_count)
    }
}

fn check_shape(depth: usize, alphabet_size: u64) -> Result<()> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    if alphabet_size == 0 {
        return Err(Error::InvalidParameter("alphabet size must be positive".into()));
    }
    Ok(())
}

/// An `(epsilon, delta, M)` count-min sketch of stream features.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderSketch {
    config: SketchConfig,
    hashes: Vec<AffineHash>,
    tables: Vec<GradedTensor>,
    events_seen: u64,
    stream_l1: f64,
}

impl OrderSketch {
    /// Fresh sketch with hashes drawn from the seeded affine family.
    pub fn new(config: SketchConfig) -> Result<Self> {
        let spec = HashFamilySpec::new(config.alphabet_size, config.target_size, config.seed)?;
        let hashes = sample_hashes(&spec, config.hash_count);
        Self::with_hashes(config, hashes)
    }

    /// Fresh sketch with caller-chosen hash functions.
    pub fn with_hashes(config: SketchConfig, hashes: Vec<AffineHash>) -> Result<Self> {
        if hashes.len() != config.hash_count {
            return Err(Error::ShapeMismatch(format!(
                "config asks for {} hashes, got {}",
                config.hash_count,
                hashes.len()
            )));
        }
        if let Some(h) = hashes.iter().find(|h| h.n != config.target_size) {
            return Err(Error::ShapeMismatch(format!(
                "hash targets {} letters, table alphabet has {}",
                h.n, config.target_size
            )));
        }
        if config.memory_coordinates().is_none() {
            return Err(Error::InvalidParameter("sketch size overflows usize".into()));
        }
        let tables = (0..config.hash_count)
            .map(|_| GradedTensor::unit(config.target_size as usize, config.depth))
            .collect();
        Ok(OrderSketch {
            config,
            hashes,
            tables,
            events_seen: 0,
            stream_l1: 0.0,
        })
    }

    /// Reassembles a sketch from stored state.
    pub fn from_state(
        config: SketchConfig,
        hashes: Vec<AffineHash>,
        tables: Vec<GradedTensor>,
        events_seen: u64,
        stream_l1: f64,
    ) -> Result<Self> {
        let mut sketch = Self::with_hashes(config, hashes)?;
        if tables.len() != sketch.tables.len()
            || tables
                .iter()
                .any(|t| t.alphabet_size() as u64 != config.target_size || t.depth() != config.depth)
        {
            return Err(Error::ShapeMismatch("tables do not match the config".into()));
        }
        sketch.tables = tables;
        sketch.events_seen = events_seen;
        sketch.stream_l1 = stream_l1;
        Ok(sketch)
    }

    pub fn config(&self) -> &SketchConfig {
        &self.config
    }

    pub fn hashes(&self) -> &[AffineHash] {
        &self.hashes
    }

    pub fn tables(&self) -> &[GradedTensor] {
        &self.tables
    }

    pub fn events_seen(&self) -> u64 {
        self.events_seen
    }

    /// Running `sum_i lambda_i`.
    pub fn stream_l1(&self) -> f64 {
        self.stream_l1
    }

    pub fn depth(&self) -> usize {
        self.config.depth
    }

    pub fn memory_coordinates(&self) -> usize {
        self.tables.iter().map(GradedTensor::len).sum()
    }

    fn check_event(&self, event: &Event) -> Result<()> {
        check_letter(event.letter, self.config.alphabet_size as usize)?;
        if !(event.lambda.is_finite() && event.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "counter increase {} is not a finite non-negative real",
                event.lambda
            )));
        }
        Ok(())
    }

    /// Multiplies every table by the event map of the hashed letter.
    pub fn update(&mut self, event: Event) -> Result<()> {
        self.check_event(&event)?;
        let kind = self.config.kind;
        for (table, h) in self.tables.iter_mut().zip(&self.hashes) {
            let b = h.eval_id(event.letter.0) as usize;
            apply_event_unchecked(table, b, event.lambda, kind);
        }
        self.events_seen += 1;
        self.stream_l1 += event.lambda;
        Ok(())
    }

    /// Applies a batch of events. With `parallel`, tables are updated on the
    /// rayon pool, one worker per table; the result is identical either way.
    pub fn update_batch(&mut self, events: &[Event], parallel: bool) -> Result<()> {
        for e in events {
            self.check_event(e)?;
        }
        let kind = self.config.kind;
        let apply = |(table, h): (&mut GradedTensor, &AffineHash)| {
            for e in events {
                let b = h.eval_id(e.letter.0) as usize;
                apply_event_unchecked(table, b, e.lambda, kind);
            }
        };
        if parallel {
            self.tables.par_iter_mut().zip(self.hashes.par_iter()).for_each(apply);
        } else {
            self.tables.iter_mut().zip(self.hashes.iter()).for_each(apply);
        }
        self.events_seen += events.len() as u64;
        for e in events {
            self.stream_l1 += e.lambda;
        }
        Ok(())
    }

    fn check_word(&self, word: &Word) -> Result<()> {
        if word.len() > self.config.depth {
            return Err(Error::WordTooLong {
                len: word.len(),
                depth: self.config.depth,
            });
        }
        for &l in word.letters() {
            check_letter(l, self.config.alphabet_size as usize)?;
        }
        Ok(())
    }

    /// `<Phi_j, H_j(w)>` for a single table.
    pub fn table_estimate(&self, j: usize, word: &Word) -> Result<f64> {
        self.check_word(word)?;
        Ok(self.table_coordinate(j, word))
    }

    fn table_coordinate(&self, j: usize, word: &Word) -> f64 {
        let h = &self.hashes[j];
        let n = self.config.target_size as usize;
        let offset = word
            .letters()
            .iter()
            .fold(0usize, |acc, l| acc * n + h.eval_id(l.0) as usize);
        self.tables[j].level(word.len())[offset]
    }

    /// `min_j <Phi_j, H_j(w)>`, an upper bound on `Phi_w`.
    pub fn query(&self, word: &Word) -> Result<f64> {
        self.check_word(word)?;
        Ok((0..self.tables.len())
            .map(|j| self.table_coordinate(j, word))
            .fold(f64::INFINITY, f64::min))
    }

    /// Estimate of a single letter, `Phi_a`.
    pub fn letter_estimate(&self, letter: u64) -> f64 {
        self.tables
            .iter()
            .zip(&self.hashes)
            .map(|(t, h)| t.level(1)[h.eval_id(letter) as usize])
            .fold(f64::INFINITY, f64::min)
    }

    /// Every estimate `min_j <Phi_j, H_j(w)>` for `|w| <= M`, as a dense
    /// tensor over the big alphabet. Only viable for small alphabets.
    pub fn pullback_estimates(&self) -> Result<GradedTensor> {
        let n = self.config.alphabet_size as usize;
        let b = self.config.target_size as usize;
        coordinate_count(n, self.config.depth).ok_or_else(|| {
            Error::InvalidParameter("pull-back over this alphabet overflows usize".into())
        })?;
        let mut out = GradedTensor::zeros(n, self.config.depth);
        for m in 0..=self.config.depth {
            out.level_mut(m).fill(f64::INFINITY);
        }
        for (table, h) in self.tables.iter().zip(&self.hashes) {
            let letter_hash: Vec<usize> = (0..n as u64).map(|x| h.eval_id(x) as usize).collect();
            // hashed dense index of every word at the current level
            let mut hashed = vec![0usize];
            for m in 0..=self.config.depth {
                if m > 0 {
                    hashed = hashed
                        .iter()
                        .flat_map(|&u| letter_hash.iter().map(move |&a| u * b + a))
                        .collect();
                }
                let src = table.level(m);
                for (d, &i) in out.level_mut(m).iter_mut().zip(&hashed) {
                    *d = d.min(src[i]);
                }
            }
        }
        Ok(out)
    }

    fn check_compatible(&self, other: &OrderSketch) -> Result<()> {
        if self.config != other.config || self.hashes != other.hashes {
            return Err(Error::ShapeMismatch(
                "sketches differ in parameters, seed or hash functions".into(),
            ));
        }
        Ok(())
    }

    /// Sketch of the concatenation `self` then `later`.
    pub fn merge(&self, later: &OrderSketch) -> Result<OrderSketch> {
        self.check_compatible(later)?;
        let tables = self
            .tables
            .iter()
            .zip(&later.tables)
            .map(|(x, y)| x.product(y))
            .collect::<Result<Vec<_>>>()?;
        Ok(OrderSketch {
            config: self.config,
            hashes: self.hashes.clone(),
            tables,
            events_seen: self.events_seen + later.events_seen,
            stream_l1: self.stream_l1 + later.stream_l1,
        })
    }
}

/// Free-function form of [`OrderSketch::merge`].
pub fn sketch_merge(first: &OrderSketch, second: &OrderSketch) -> Result<OrderSketch> {
    first.merge(second)
}

//! Heavy-hitter pattern mining over one sketch pass.
//!
//! While the stream is consumed, every event's letter is checked against the
//! sketch and joins the heavy-letter set of each threshold it exceeds. Letter
//! estimates of a cash-register stream only grow, and a letter's estimate at
//! its last occurrence already bounds its final count, so the set collects
//! every truly heavy letter. After the pass, words over the heavy letters up
//! to the sketch depth are queried and kept when their estimate exceeds
//! `rho^|w|`.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::sketch::{OrderSketch, SketchConfig};
use crate::tensor::{Event, Letter, Word};

/// Default bound on the number of candidate words examined per threshold.
pub const DEFAULT_CANDIDATE_CAP: usize = 1_000_000;

/// Heavy patterns found for one threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct HeavyPatternResult {
    pub rho: f64,
    pub depth: usize,
    /// Letters whose estimate exceeded `rho` at some point of the pass.
    pub heavy_letters: BTreeSet<u64>,
    /// Words with `estimate > rho^|w|`, ordered by length then letters.
    pub words: Vec<(Word, f64)>,
}

impl HeavyPatternResult {
    pub fn contains(&self, word: &Word) -> bool {
        self.words.iter().any(|(w, _)| w == word)
    }

    pub fn estimate(&self, word: &Word) -> Option<f64> {
        self.words.iter().find(|(w, _)| w == word).map(|&(_, e)| e)
    }
}

/// One sketch serving several thresholds at once.
#[derive(Debug, Clone)]
pub struct HeavyPatternMiner {
    sketch: OrderSketch,
    thresholds: Vec<f64>,
    heavy: Vec<BTreeSet<u64>>,
}

impl HeavyPatternMiner {
    pub fn new(config: SketchConfig, thresholds: &[f64]) -> Result<Self> {
        Self::from_sketch(OrderSketch::new(config)?, thresholds)
    }

    /// Wraps an empty sketch. The heavy-letter sets are only sound when
    /// every event passes through [`HeavyPatternMiner::update`].
    pub fn from_sketch(sketch: OrderSketch, thresholds: &[f64]) -> Result<Self> {
        if sketch.events_seen() != 0 {
            return Err(Error::InvalidParameter(
                "heavy-letter tracking must start from an empty sketch".into(),
            ));
        }
        if let Some(rho) = thresholds.iter().find(|&&r| !(r.is_finite() && r > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "threshold must be a positive real, got {rho}"
            )));
        }
        Ok(HeavyPatternMiner {
            sketch,
            heavy: vec![BTreeSet::new(); thresholds.len()],
            thresholds: thresholds.to_vec(),
        })
    }

    pub fn update(&mut self, event: Event) -> Result<()> {
        self.sketch.update(event)?;
        let estimate = self.sketch.letter_estimate(event.letter.0);
        for (rho, set) in self.thresholds.iter().zip(self.heavy.iter_mut()) {
            if estimate > *rho {
                set.insert(event.letter.0);
            }
        }
        Ok(())
    }

    pub fn sketch(&self) -> &OrderSketch {
        &self.sketch
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    /// Patterns for threshold number `i`.
    pub fn patterns(&self, i: usize, candidate_cap: usize) -> Result<HeavyPatternResult> {
        let rho = self.thresholds[i];
        let letters: Vec<u64> = self.heavy[i].iter().copied().collect();
        let depth = self.sketch.depth();
        let needed = candidate_count(letters.len(), depth);
        if needed > candidate_cap as u128 {
            return Err(Error::CandidateOverflow {
                needed,
                cap: candidate_cap,
            });
        }
        let mut words = Vec::new();
        let mut level: Vec<Word> = vec![Word::empty()];
        let mut bar = 1.0;
        for _ in 1..=depth {
            bar *= rho;
            let mut next = Vec::with_capacity(level.len() * letters.len());
            for prefix in &level {
                for &a in &letters {
                    let mut w = prefix.clone();
                    w.0.push(Letter(a));
                    let estimate = self.sketch.query(&w)?;
                    if estimate > bar {
                        words.push((w.clone(), estimate));
                    }
                    next.push(w);
                }
            }
            level = next;
        }
        Ok(HeavyPatternResult {
            rho,
            depth,
            heavy_letters: self.heavy[i].clone(),
            words,
        })
    }

    /// Patterns for every threshold, in threshold order.
    pub fn all_patterns(&self, candidate_cap: usize) -> Vec<Result<HeavyPatternResult>> {
        (0..self.thresholds.len())
            .map(|i| self.patterns(i, candidate_cap))
            .collect()
    }
}

/// `sum_{m=1..depth} k^m`, saturating.
fn candidate_count(k: usize, depth: usize) -> u128 {
    let mut total: u128 = 0;
    let mut level: u128 = 1;
    for _ in 0..depth {
        level = level.saturating_mul(k as u128);
        total = total.saturating_add(level);
    }
    total
}

/// Single-threshold convenience: one pass over `events`, then enumeration.
pub fn heavy_hitter_patterns(
    events: impl IntoIterator<Item = Event>,
    rho: f64,
    config: SketchConfig,
    candidate_cap: usize,
) -> Result<HeavyPatternResult> {
    let mut miner = HeavyPatternMiner::new(config, &[rho])?;
    for e in events {
        miner.update(e)?;
    }
    miner.patterns(0, candidate_cap)
}

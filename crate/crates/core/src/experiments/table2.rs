//! Order-sensitive classification of two Markov stream types.
//!
//! Each stream is sketched once at depth 2 while heavy letters are tracked.
//! The feature words are all words of length `<= M` over the letters found
//! heavy in every stream; a stream's feature vector is the sketch estimate
//! of each such word. A logistic model is fit on random 80/20 splits.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::experiments::classifier::train_linear_classifier;
use crate::experiments::derive_seed;
use crate::experiments::generators::{gen_markov_stream, MarkovExperimentConfig, StreamClass};
use crate::features::EventMapKind;
use crate::heavy::HeavyPatternMiner;
use crate::sketch::SketchConfig;
use crate::tensor::{Letter, Word};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Table2Config {
    pub alphabet_size: usize,
    pub total_length: usize,
    pub p: f64,
    pub q_values: Vec<f64>,
    pub streams_per_class: usize,
    pub target_size: u64,
    pub hash_count: usize,
    pub kind: EventMapKind,
    /// Heavy-letter threshold as a fraction of the stream length.
    pub rho_fraction: f64,
    pub splits: usize,
    pub l2: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for Table2Config {
    fn default() -> Self {
        Table2Config {
            alphabet_size: 1000,
            total_length: 10_000,
            p: 0.1,
            q_values: vec![0.101, 0.105, 0.11, 0.13],
            streams_per_class: 200,
            target_size: 50,
            hash_count: 10,
            kind: EventMapKind::Exp,
            rho_fraction: 0.04,
            splits: 5,
            l2: 1e-3,
            epochs: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table2Row {
    pub q: f64,
    pub q_minus_p: f64,
    /// Letters found heavy in every stream.
    pub heavy_letters: Vec<u64>,
    pub accuracy_m1: f64,
    pub accuracy_m2: f64,
}

const DEPTH: usize = 2;

struct Sketched {
    heavy: BTreeSet<u64>,
    miner: HeavyPatternMiner,
    label: bool,
}

fn words_over(letters: &[u64], depth: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut level = vec![Word::empty()];
    for _ in 0..depth {
        let mut next = Vec::new();
        for prefix in &level {
            for &a in letters {
                let mut w = prefix.clone();
                w.0.push(Letter(a));
                next.push(w);
            }
        }
        out.extend(next.iter().cloned());
        level = next;
    }
    out
}

fn held_out_accuracy(samples: &[(Vec<f64>, bool)], cfg: &Table2Config, seed: u64) -> Result<f64> {
    let mut total = 0.0;
    for split in 0..cfg.splits {
        let mut order: Vec<usize> = (0..samples.len()).collect();
        let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, &[split as u64]));
        order.shuffle(&mut rng);
        let cut = (samples.len() * 4) / 5;
        let train: Vec<_> = order[..cut].iter().map(|&i| samples[i].clone()).collect();
        let test: Vec<_> = order[cut..].iter().map(|&i| samples[i].clone()).collect();
        let model = train_linear_classifier(&train, cfg.l2, cfg.epochs, seed)?;
        total += model.accuracy(&test);
    }
    Ok(total / cfg.splits as f64)
}

pub fn run_experiment_2(cfg: &Table2Config) -> Result<Vec<Table2Row>> {
    if cfg.streams_per_class < 5 || cfg.splits == 0 {
        return Err(Error::InvalidParameter(
            "need at least 5 streams per class and one split".into(),
        ));
    }
    let sketch_config = SketchConfig::with_shape(
        cfg.target_size,
        cfg.hash_count,
        DEPTH,
        cfg.kind,
        cfg.alphabet_size as u64,
        cfg.seed,
    )?;
    let rho = cfg.rho_fraction * cfg.total_length as f64;
    let mut rows = Vec::new();
    for (qi, &q) in cfg.q_values.iter().enumerate() {
        let jobs: Vec<(StreamClass, u64)> = [StreamClass::TypeA, StreamClass::TypeB]
            .iter()
            .enumerate()
            .flat_map(|(ci, &class)| {
                (0..cfg.streams_per_class).map(move |i| {
                    (class, derive_seed(cfg.seed, &[qi as u64, ci as u64, i as u64]))
                })
            })
            .collect();
        let sketched = jobs
            .par_iter()
            .map(|&(class, seed)| -> Result<Sketched> {
                let mc = MarkovExperimentConfig::quartered(
                    cfg.alphabet_size,
                    cfg.total_length,
                    cfg.p,
                    q,
                    class,
                    seed,
                );
                let stream = gen_markov_stream(&mc)?;
                let mut miner = HeavyPatternMiner::new(sketch_config, &[rho])?;
                for e in stream.events() {
                    miner.update(*e)?;
                }
                let heavy = miner.patterns(0, usize::MAX)?.heavy_letters;
                Ok(Sketched {
                    heavy,
                    miner,
                    label: class == StreamClass::TypeA,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let mut common = sketched[0].heavy.clone();
        for s in &sketched[1..] {
            common = common.intersection(&s.heavy).copied().collect();
        }
        let letters: Vec<u64> = common.iter().copied().collect();
        let mut accuracy = [0.5; 2];
        if !letters.is_empty() {
            for (slot, depth) in accuracy.iter_mut().zip(1..=DEPTH) {
                let words = words_over(&letters, depth);
                let samples = sketched
                    .iter()
                    .map(|s| {
                        let x = words
                            .iter()
                            .map(|w| s.miner.sketch().query(w))
                            .collect::<Result<Vec<_>>>()?;
                        Ok((x, s.label))
                    })
                    .collect::<Result<Vec<_>>>()?;
                *slot = held_out_accuracy(&samples, cfg, derive_seed(cfg.seed, &[qi as u64, 99]))?;
            }
        }
        rows.push(Table2Row {
            q,
            q_minus_p: q - cfg.p,
            heavy_letters: letters,
            accuracy_m1: accuracy[0],
            accuracy_m2: accuracy[1],
        });
    }
    Ok(rows)
}

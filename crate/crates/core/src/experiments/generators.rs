//! Synthetic cash-register streams with unit counter increases.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Event, Stream};

/// I.i.d. letters: the first `heavy_count` ids share probability
/// `heavy_mass` uniformly, the remaining ids share the rest.
pub fn gen_heavy_tail_stream(
    alphabet_size: usize,
    length: usize,
    heavy_count: usize,
    heavy_mass: f64,
    seed: u64,
) -> Result<Stream> {
    if heavy_count >= alphabet_size {
        return Err(Error::InvalidParameter(format!(
            "need fewer heavy letters ({heavy_count}) than alphabet letters ({alphabet_size})"
        )));
    }
    if !(0.0..1.0).contains(&heavy_mass) || (heavy_count == 0) != (heavy_mass == 0.0) {
        return Err(Error::InvalidParameter(format!(
            "heavy mass {heavy_mass} must lie in (0, 1), or be 0 with no heavy letters"
        )));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let light = alphabet_size - heavy_count;
    let mut stream = Stream::new(alphabet_size)?;
    for _ in 0..length {
        let letter = if heavy_count > 0 && rng.gen_bool(heavy_mass) {
            rng.gen_range(0..heavy_count)
        } else {
            heavy_count + rng.gen_range(0..light)
        };
        stream.push(Event::new(1.0, letter as u64))?;
    }
    Ok(stream)
}

/// Which of the two Markov stream types to draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum StreamClass {
    /// Letter 1 heavy first (probability `p`), then letter 2 (probability `q`).
    TypeA,
    /// Letter 2 heavy first (probability `p`), then letter 1 (probability `q`).
    TypeB,
}

/// Three-regime stream: two single-heavy-hitter segments, then a segment
/// where both heavy hitters share probability `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovExperimentConfig {
    pub alphabet_size: usize,
    pub total_length: usize,
    pub p: f64,
    pub q: f64,
    pub segments: [usize; 3],
    pub class: StreamClass,
    pub seed: u64,
}

impl MarkovExperimentConfig {
    /// Segments `(L/4, L/4, L - L/2)`.
    pub fn quartered(
        alphabet_size: usize,
        total_length: usize,
        p: f64,
        q: f64,
        class: StreamClass,
        seed: u64,
    ) -> Self {
        let quarter = total_length / 4;
        MarkovExperimentConfig {
            alphabet_size,
            total_length,
            p,
            q,
            segments: [quarter, quarter, total_length - 2 * quarter],
            class,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.alphabet_size < 4 {
            return Err(Error::InvalidParameter(
                "need at least two background letters besides 1 and 2".into(),
            ));
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if !(0.0..1.0).contains(&v) {
                return Err(Error::InvalidParameter(format!("{name} = {v} is not in [0, 1)")));
            }
        }
        if self.segments.iter().sum::<usize>() != self.total_length {
            return Err(Error::InvalidParameter(format!(
                "segments {:?} do not sum to {}",
                self.segments, self.total_length
            )));
        }
        Ok(())
    }
}

pub const HEAVY_ONE: u64 = 1;
pub const HEAVY_TWO: u64 = 2;

pub fn gen_markov_stream(cfg: &MarkovExperimentConfig) -> Result<Stream> {
    cfg.validate()?;
    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let background = cfg.alphabet_size as u64 - 2;
    let draw_background = |rng: &mut ChaCha20Rng| match rng.gen_range(0..background) {
        0 => 0,
        k => k + 2,
    };
    let (first, second) = match cfg.class {
        StreamClass::TypeA => (HEAVY_ONE, HEAVY_TWO),
        StreamClass::TypeB => (HEAVY_TWO, HEAVY_ONE),
    };
    let mut stream = Stream::new(cfg.alphabet_size)?;
    let regimes = [(first, cfg.p), (second, cfg.q)];
    for (&(heavy, prob), &len) in regimes.iter().zip(&cfg.segments[..2]) {
        for _ in 0..len {
            let letter = if rng.gen_bool(prob) {
                heavy
            } else {
                draw_background(&mut rng)
            };
            stream.push(Event::new(1.0, letter))?;
        }
    }
    for _ in 0..cfg.segments[2] {
        let letter = if rng.gen_bool(cfg.p) {
            if rng.gen_bool(0.5) {
                HEAVY_ONE
            } else {
                HEAVY_TWO
            }
        } else {
            draw_background(&mut rng)
        };
        stream.push(Event::new(1.0, letter))?;
    }
    Ok(stream)
}

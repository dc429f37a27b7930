//! Order-aware streaming features: truncated tensor features of weighted
//! event streams, their linear functionals, and a count-min sketch of the
//! features with heavy-hitter pattern mining on top.
//!
//! ```
//! use ordsketch::{stream_features, EventMapKind, Event, Stream, Word};
//!
//! let s = Stream::from_events(2, [Event::new(1.0, 0), Event::new(1.5, 1)]).unwrap();
//! let phi = stream_features(&s, EventMapKind::Linear, 2);
//! assert_eq!(phi.get(&"0.1".parse::<Word>().unwrap()).unwrap(), 1.5);
//! ```

pub mod dual;
pub mod error;
pub mod experiments;
pub mod features;
pub mod hashing;
pub mod heavy;
pub mod sketch;
pub mod snapshot;
pub mod tensor;

pub use dual::{infiltration_product, pairing, shuffle_product, LinearFunctional};
pub use error::{Error, Result};
pub use features::{
    apply_event_inplace, brute_force_oracle, concat_features, event_polynomial, multi_factorial,
    stream_features, EventMapKind,
};
pub use hashing::{
    eval_hash, hash_word, is_prime, sample_hashes, smallest_prime_geq, AffineHash, HashFamilySpec,
    PRNG_ID,
};
pub use heavy::{
    heavy_hitter_patterns, HeavyPatternMiner, HeavyPatternResult, DEFAULT_CANDIDATE_CAP,
};
pub use sketch::{sketch_merge, OrderSketch, SketchConfig};
pub use snapshot::{read_snapshot, snapshot_bytes, write_snapshot, FORMAT_VERSION};
pub use tensor::{
    coordinate_count, scale_stream, truncated_product, word_from_index, word_index, Event,
    GradedTensor, Letter, Stream, Word,
};

//! Stream generators, the sketch error metric and the two experiment
//! harnesses.

pub mod classifier;
pub mod generators;
pub mod metric;
pub mod table1;
pub mod table2;

pub use classifier::{train_linear_classifier, LogisticModel};
pub use generators::{
    gen_heavy_tail_stream, gen_markov_stream, MarkovExperimentConfig, StreamClass, HEAVY_ONE,
    HEAVY_TWO,
};
pub use metric::{error_metric, ErrorReport, Normalization};
pub use table1::{run_experiment_1, Table1Config, Table1Row};
pub use table2::{run_experiment_2, Table2Config, Table2Row};

/// Mixes `parts` into `base` with splitmix64 finalization.
pub fn derive_seed(base: u64, parts: &[u64]) -> u64 {
    let mut z = base;
    for &p in parts {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15) ^ p;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

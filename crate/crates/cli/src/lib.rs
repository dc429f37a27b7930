//! Command-line front end for `ordsketch`.
//!
//! Machine-readable results go to stdout as one JSON object per line, each
//! tagged with a `record` field; human summaries go to stderr. Exit codes:
//! 0 success, 1 usage, 2 data error, 3 resource guard.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ordsketch::experiments::{run_experiment_1, run_experiment_2, Table1Config, Table2Config};
use ordsketch::{
    coordinate_count, read_snapshot, stream_features, write_snapshot, EventMapKind,
    HeavyPatternMiner, OrderSketch, SketchConfig, Word, DEFAULT_CANDIDATE_CAP,
};
use serde::Serialize;

pub mod streamfile;

use streamfile::{read_stream, StreamReader};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Resource(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

impl From<ordsketch::Error> for CliError {
    fn from(e: ordsketch::Error) -> Self {
        match e {
            ordsketch::Error::CandidateOverflow { .. } => CliError::Resource(e.to_string()),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

#[derive(Parser, Debug)]
#[command(name = "ordsketch", version, about = "Order-aware stream features and their count-min sketch")]
struct Cli {
    /// Worker threads for table updates and experiment sweeps.
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum MapArg {
    Linear,
    Exp,
}

impl From<MapArg> for EventMapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Linear => EventMapKind::Linear,
            MapArg::Exp => EventMapKind::Exp,
        }
    }
}

#[derive(Args, Debug, Clone)]
struct SketchArgs {
    /// Additive error, as a fraction of the level norm; `|B| = ceil(2/epsilon)`.
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    /// Failure probability; `r = ceil(log2(1/delta))`.
    #[arg(long, default_value_t = 0.05)]
    delta: f64,
    /// Truncation depth M.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, value_enum, default_value_t = MapArg::Exp)]
    event_map: MapArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SketchArgs {
    fn config(&self, alphabet_size: usize) -> Result<SketchConfig, CliError> {
        Ok(SketchConfig::new(
            self.epsilon,
            self.delta,
            self.depth,
            self.event_map.into(),
            alphabet_size as u64,
            self.seed,
        )?)
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExperimentName {
    Table1,
    Table2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sketch a stream file in one pass and write a snapshot.
    Build {
        stream: PathBuf,
        #[arg(long, short)]
        out: PathBuf,
        #[command(flatten)]
        sketch: SketchArgs,
        /// Include events/second in the output record.
        #[arg(long)]
        timing: bool,
    },
    /// Estimate coordinates from a snapshot. Words are '.'-joined letter ids;
    /// pass "" for the empty word.
    Query {
        snapshot: PathBuf,
        #[arg(required = true)]
        words: Vec<String>,
    },
    /// Merge snapshots of consecutive stream chunks, in the given order.
    Merge {
        #[arg(required = true, num_args = 2..)]
        snapshots: Vec<PathBuf>,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Mine heavy-hitter patterns for one or more thresholds in one pass.
    Heavy {
        stream: PathBuf,
        #[arg(long, required = true)]
        rho: Vec<f64>,
        #[command(flatten)]
        sketch: SketchArgs,
        #[arg(long, default_value_t = DEFAULT_CANDIDATE_CAP)]
        candidate_cap: usize,
    },
    /// Dump every exact coordinate up to the given depth.
    Exact {
        stream: PathBuf,
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value_t = MapArg::Exp)]
        event_map: MapArg,
        /// Refuse when the tensor would hold more coordinates than this.
        #[arg(long, default_value_t = 10_000_000)]
        max_coordinates: usize,
    },
    /// Run an experiment harness from a JSON config (defaults if omitted).
    Experiment {
        #[arg(value_enum)]
        name: ExperimentName,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the config seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        timing: bool,
    },
}

fn emit<W: Write + ?Sized, T: Serialize>(out: &mut W, record: &T) -> Result<(), CliError> {
    let line = serde_json::to_string(record).map_err(|e| CliError::Data(e.to_string()))?;
    writeln!(out, "{line}").map_err(|e| CliError::Data(format!("stdout: {e}")))
}

fn open_stream(path: &Path) -> Result<StreamReader<BufReader<File>>, CliError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    StreamReader::new(BufReader::new(f), &path.display().to_string())
}

fn load_snapshot(path: &Path) -> Result<OrderSketch, CliError> {
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    read_snapshot(BufReader::new(f)).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

fn save_snapshot(sketch: &OrderSketch, path: &Path) -> Result<(), CliError> {
    let f = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(f);
    write_snapshot(sketch, &mut w)?;
    w.flush().map_err(|e| io_err(path, e))
}

#[derive(Serialize)]
struct BuildRecord<'a> {
    record: &'static str,
    snapshot: &'a str,
    events: u64,
    stream_l1: f64,
    alphabet_size: u64,
    depth: usize,
    event_map: EventMapKind,
    seed: u64,
    target_size: u64,
    hash_count: usize,
    memory_coordinates: usize,
    memory_bytes: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    events_per_second: Option<f64>,
}

const BATCH: usize = 4096;

fn cmd_build(
    stream: &Path,
    out_path: &Path,
    args: &SketchArgs,
    timing: bool,
    threads: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let mut reader = open_stream(stream)?;
    let mut sketch = OrderSketch::new(args.config(reader.alphabet_size())?)?;
    let mut batch = Vec::with_capacity(BATCH);
    let mut busy = 0.0;
    loop {
        batch.clear();
        for e in reader.by_ref().take(BATCH) {
            batch.push(e?);
        }
        if batch.is_empty() {
            break;
        }
        let start = Instant::now();
        sketch.update_batch(&batch, threads > 1)?;
        busy += start.elapsed().as_secs_f64();
    }
    save_snapshot(&sketch, out_path)?;
    let rate = sketch.events_seen() as f64 / busy.max(1e-12);
    let c = sketch.config();
    emit(
        out,
        &BuildRecord {
            record: "build",
            snapshot: &out_path.display().to_string(),
            events: sketch.events_seen(),
            stream_l1: sketch.stream_l1(),
            alphabet_size: c.alphabet_size,
            depth: c.depth,
            event_map: c.kind,
            seed: c.seed,
            target_size: c.target_size,
            hash_count: c.hash_count,
            memory_coordinates: sketch.memory_coordinates(),
            memory_bytes: sketch.memory_coordinates() * 8,
            events_per_second: timing.then_some(rate),
        },
    )?;
    let _ = writeln!(
        err,
        "built {} events into {} tables of {} letters ({} coordinates, {:.3e} events/s)",
        sketch.events_seen(),
        c.hash_count,
        c.target_size,
        sketch.memory_coordinates(),
        rate
    );
    Ok(())
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum QueryRecord<'a> {
    Estimate { word: &'a str, estimate: f64 },
    Error { word: &'a str, error: String },
}

fn cmd_query(snapshot: &Path, words: &[String], out: &mut dyn Write) -> Result<(), CliError> {
    let sketch = load_snapshot(snapshot)?;
    let mut failed = 0;
    for text in words {
        let result = text
            .parse::<Word>()
            .and_then(|w| sketch.query(&w));
        match result {
            Ok(estimate) => emit(out, &QueryRecord::Estimate { word: text, estimate })?,
            Err(e) => {
                failed += 1;
                emit(out, &QueryRecord::Error { word: text, error: e.to_string() })?;
            }
        }
    }
    if failed > 0 {
        return Err(CliError::Data(format!("{failed} of {} queries failed", words.len())));
    }
    Ok(())
}

#[derive(Serialize)]
struct MergeRecord {
    record: &'static str,
    inputs: Vec<String>,
    snapshot: String,
    events: u64,
    stream_l1: f64,
}

fn cmd_merge(inputs: &[PathBuf], out_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let mut merged = load_snapshot(&inputs[0])?;
    for p in &inputs[1..] {
        merged = merged
            .merge(&load_snapshot(p)?)
            .map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
    }
    save_snapshot(&merged, out_path)?;
    emit(
        out,
        &MergeRecord {
            record: "merge",
            inputs: inputs.iter().map(|p| p.display().to_string()).collect(),
            snapshot: out_path.display().to_string(),
            events: merged.events_seen(),
            stream_l1: merged.stream_l1(),
        },
    )
}

#[derive(Serialize)]
struct Pattern {
    word: String,
    estimate: f64,
}

#[derive(Serialize)]
#[serde(tag = "record", rename_all = "lowercase")]
enum HeavyRecord {
    Heavy {
        rho: f64,
        depth: usize,
        heavy_letters: Vec<u64>,
        patterns: Vec<Pattern>,
    },
    Error {
        rho: f64,
        error: String,
    },
}

fn cmd_heavy(
    stream: &Path,
    rhos: &[f64],
    args: &SketchArgs,
    cap: usize,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    let reader = open_stream(stream)?;
    let mut miner = HeavyPatternMiner::new(args.config(reader.alphabet_size())?, rhos)?;
    for e in reader {
        miner.update(e?)?;
    }
    let mut overflow = None;
    for (rho, result) in rhos.iter().zip(miner.all_patterns(cap)) {
        match result {
            Ok(r) => {
                let _ = writeln!(
                    err,
                    "rho {rho}: {} heavy letters, {} patterns",
                    r.heavy_letters.len(),
                    r.words.len()
                );
                emit(
                    out,
                    &HeavyRecord::Heavy {
                        rho: *rho,
                        depth: r.depth,
                        heavy_letters: r.heavy_letters.into_iter().collect(),
                        patterns: r
                            .words
                            .into_iter()
                            .map(|(w, estimate)| Pattern { word: w.to_string(), estimate })
                            .collect(),
                    },
                )?;
            }
            Err(e) => {
                let e = CliError::from(e);
                emit(out, &HeavyRecord::Error { rho: *rho, error: e.to_string() })?;
                overflow.get_or_insert(match e {
                    CliError::Resource(m) => CliError::Resource(format!("rho {rho}: {m}")),
                    other => other,
                });
            }
        }
    }
    overflow.map_or(Ok(()), Err)
}

#[derive(Serialize)]
struct CoordinateRecord {
    record: &'static str,
    level: usize,
    word: String,
    value: f64,
}

fn cmd_exact(
    stream: &Path,
    depth: usize,
    kind: EventMapKind,
    guard: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let f = File::open(stream).map_err(|e| io_err(stream, e))?;
    let s = read_stream(BufReader::new(f), &stream.display().to_string())?;
    let needed = coordinate_count(s.alphabet_size(), depth);
    match needed {
        Some(c) if c <= guard => {}
        _ => {
            let needed = needed.map_or("more than usize::MAX".to_string(), |c| {
                format!("{c} coordinates ({} bytes)", c as u128 * 8)
            });
            return Err(CliError::Resource(format!(
                "exact features need {needed}, above the guard of {guard} coordinates"
            )));
        }
    }
    let phi = stream_features(&s, kind, depth);
    for (w, value) in phi.iter_words() {
        emit(
            out,
            &CoordinateRecord {
                record: "coordinate",
                level: w.len(),
                word: w.to_string(),
                value,
            },
        )?;
    }
    Ok(())
}

fn read_config<T: serde::de::DeserializeOwned + Default>(path: Option<&Path>) -> Result<T, CliError> {
    let Some(path) = path else {
        return Ok(T::default());
    };
    let f = File::open(path).map_err(|e| io_err(path, e))?;
    serde_json::from_reader(BufReader::new(f))
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

#[derive(Serialize)]
struct Table1Record {
    record: &'static str,
    target_size: u64,
    hash_count: usize,
    memory_ratio: f64,
    median_error: f64,
    errors: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    events_per_second: Option<f64>,
}

#[derive(Serialize)]
struct Table2Record {
    record: &'static str,
    q: f64,
    q_minus_p: f64,
    heavy_letters: Vec<u64>,
    accuracy_m1: f64,
    accuracy_m2: f64,
}

fn cmd_experiment(
    name: ExperimentName,
    config: Option<&Path>,
    seed: Option<u64>,
    timing: bool,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<(), CliError> {
    match name {
        ExperimentName::Table1 => {
            let mut cfg: Table1Config = read_config(config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            for row in run_experiment_1(&cfg)? {
                let _ = writeln!(
                    err,
                    "|B|={:<4} r={:<3} ratio={:<10.3} error={:.4} ({:.3e} events/s)",
                    row.target_size, row.hash_count, row.memory_ratio, row.median_error, row.events_per_second
                );
                emit(
                    out,
                    &Table1Record {
                        record: "table1",
                        target_size: row.target_size,
                        hash_count: row.hash_count,
                        memory_ratio: row.memory_ratio,
                        median_error: row.median_error,
                        errors: row.errors,
                        events_per_second: timing.then_some(row.events_per_second),
                    },
                )?;
            }
        }
        ExperimentName::Table2 => {
            let mut cfg: Table2Config = read_config(config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            for row in run_experiment_2(&cfg)? {
                let _ = writeln!(
                    err,
                    "q={} q-p={:.4} M=1 {:.3} M=2 {:.3}",
                    row.q, row.q_minus_p, row.accuracy_m1, row.accuracy_m2
                );
                emit(
                    out,
                    &Table2Record {
                        record: "table2",
                        q: row.q,
                        q_minus_p: row.q_minus_p,
                        heavy_letters: row.heavy_letters,
                        accuracy_m1: row.accuracy_m1,
                        accuracy_m2: row.accuracy_m2,
                    },
                )?;
            }
        }
    }
    Ok(())
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if cli.threads == 0 {
        return Err(CliError::Usage("--threads must be at least 1".into()));
    }
    // A second call in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global();
    match cli.command {
        Command::Build {
            stream,
            out: path,
            sketch,
            timing,
        } => cmd_build(&stream, &path, &sketch, timing, cli.threads, out, err),
        Command::Query { snapshot, words } => cmd_query(&snapshot, &words, out),
        Command::Merge { snapshots, out: path } => cmd_merge(&snapshots, &path, out),
        Command::Heavy {
            stream,
            rho,
            sketch,
            candidate_cap,
        } => cmd_heavy(&stream, &rho, &sketch, candidate_cap, out, err),
        Command::Exact {
            stream,
            depth,
            event_map,
            max_coordinates,
        } => cmd_exact(&stream, depth, event_map.into(), max_coordinates, out),
        Command::Experiment {
            name,
            config,
            seed,
            timing,
        } => cmd_experiment(name, config.as_deref(), seed, timing, out, err),
    }
}

/// Parses `args` (including the program name) and runs the command,
/// returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                1
            } else {
                let _ = write!(out, "{text}");
                0
            };
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs with `cargo test -p ordsketch-cli --test acceptance`.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use ordsketch::experiments::{
    gen_heavy_tail_stream, run_experiment_1, run_experiment_2, Table1Config, Table2Config,
};
use ordsketch::{
    brute_force_oracle, infiltration_product, pairing, shuffle_product, sketch_merge,
    stream_features, Event, EventMapKind, GradedTensor, HeavyPatternMiner, LinearFunctional,
    OrderSketch, SketchConfig, Stream, Word,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

type Outcome = Result<String, String>;

const KINDS: [EventMapKind; 2] = [EventMapKind::Linear, EventMapKind::Exp];

fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn random_stream(rng: &mut ChaCha20Rng, n: usize, len: usize) -> Stream {
    Stream::from_events(
        n,
        (0..len).map(|_| Event::new(rng.gen_range(0.1..3.0), rng.gen_range(0..n as u64))),
    )
    .unwrap()
}

fn sketch_stream(config: SketchConfig, events: &[Event]) -> OrderSketch {
    let mut s = OrderSketch::new(config).unwrap();
    for e in events {
        s.update(*e).unwrap();
    }
    s
}

fn binomial_slack(p: f64, trials: usize) -> f64 {
    3.0 * (p * (1.0 - p) / trials as f64).sqrt()
}

fn c1_oracle() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(1);
    let mut worst: f64 = 0.0;
    let mut coords = 0usize;
    for _ in 0..200 {
        let n = rng.gen_range(1..=4);
        let len = rng.gen_range(0..=12);
        let depth = rng.gen_range(0..=4);
        let s = random_stream(&mut rng, n, len);
        for kind in KINDS {
            for (w, v) in stream_features(&s, kind, depth).iter_words() {
                let o = brute_force_oracle(&s, &w, kind);
                let err = if v == o { 0.0 } else { rel_err(v, o) };
                worst = worst.max(err);
                coords += 1;
                if err > 1e-9 {
                    return Err(format!("{kind} word {w}: {v} vs oracle {o}"));
                }
            }
        }
    }
    Ok(format!("200 streams, {coords} coordinates, max rel err {worst:.1e}"))
}

fn exact_records(file: &Path, kind: &str) -> BTreeMap<String, f64> {
    let out = Command::new(env!("CARGO_BIN_EXE_ordsketch"))
        .args(["exact", file.to_str().unwrap(), "--depth", "2", "--event-map", kind])
        .output()
        .unwrap();
    assert!(out.status.success());
    String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            (v["word"].as_str().unwrap().to_string(), v["value"].as_f64().unwrap())
        })
        .collect()
}

fn c2_worked_example() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("example.txt");
    // (1, a), (1.5, b), (1, b), (2, a) with a = 0, b = 1
    std::fs::write(&file, "alphabet_size=2\n1\t0\n1.5\t1\n1\t1\n2\t0\n").unwrap();
    let lin = exact_records(&file, "linear");
    let exp = exact_records(&file, "exp");
    let expected_lin = [("0", 3.0), ("1", 2.5), ("0.0", 2.0), ("0.1", 2.5), ("1.1", 1.5)];
    for (w, v) in expected_lin {
        if lin[w] != v {
            return Err(format!("linear {w} = {} (expected {v})", lin[w]));
        }
    }
    for (w, v) in [("0.0", 4.5), ("0.1", 2.5)] {
        if exp[w] != v {
            return Err(format!("exp {w} = {} (expected {v})", exp[w]));
        }
    }
    let stream = Stream::from_events(
        2,
        [Event::new(1.0, 0), Event::new(1.5, 1), Event::new(1.0, 1), Event::new(2.0, 0)],
    )
    .unwrap();
    let oracle = brute_force_oracle(&stream, &Word::from_ids(&[1, 0]), EventMapKind::Linear);
    if lin["1.0"] != oracle || oracle != 5.0 || lin["1.0"] == 5.5 {
        return Err(format!("ba = {} with oracle {oracle}", lin["1.0"]));
    }
    Ok("linear a=3 b=2.5 aa=2 ab=2.5 bb=1.5; exp aa=4.5 ab=2.5; ba=5 (oracle) != printed 5.5".into())
}

fn c3_overestimation() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(3);
    let mut checked = 0usize;
    for i in 0..20 {
        let n = rng.gen_range(4..=10);
        let len = rng.gen_range(10..=40);
        let s = random_stream(&mut rng, n, len);
        let kind = KINDS[i % 2];
        let depth = 1 + i % 3;
        let exact = stream_features(&s, kind, depth);
        for seed in 0..500u64 {
            let b = 1 + seed % 4;
            let r = 1 + (seed as usize / 4) % 3;
            let config = SketchConfig::with_shape(b, r, depth, kind, n as u64, seed).unwrap();
            let est = sketch_stream(config, s.events()).pullback_estimates().unwrap();
            for (x, e) in exact.as_flat().iter().zip(est.as_flat()) {
                checked += 1;
                if e < x {
                    return Err(format!("stream {i} seed {seed}: estimate {e} < exact {x}"));
                }
            }
        }
    }
    Ok(format!("20 streams x 500 seeds, {checked} estimates, 0 violations"))
}

/// Fixed stream and 50 words for the Monte-Carlo criteria.
fn tail_setup() -> (Stream, GradedTensor, Vec<Word>) {
    let stream = gen_heavy_tail_stream(64, 1000, 8, 0.3, 2024).unwrap();
    let exact = stream_features(&stream, EventMapKind::Exp, 2);
    let mut rng = ChaCha20Rng::seed_from_u64(4);
    let mut words = BTreeSet::new();
    while words.len() < 50 {
        let len = rng.gen_range(1..=2);
        // half the letters follow the stream's frequencies, half are uniform
        let ids: Vec<u64> = (0..len)
            .map(|_| {
                if rng.gen_bool(0.5) {
                    stream.events()[rng.gen_range(0..stream.len())].letter.0
                } else {
                    rng.gen_range(0..64)
                }
            })
            .collect();
        words.insert(Word::from_ids(&ids));
    }
    (stream, exact, words.into_iter().collect())
}

fn c4_tail() -> Outcome {
    let (stream, exact, words) = tail_setup();
    let (eps, delta, seeds) = (0.5, 0.25, 2000);
    let total = stream.l1_norm();
    let mut fails = vec![0usize; words.len()];
    let mut fails_corollary = vec![0usize; words.len()];
    for seed in 0..seeds as u64 {
        let config = SketchConfig::new(eps, delta, 2, EventMapKind::Exp, 64, seed).unwrap();
        let sketch = sketch_stream(config, stream.events());
        for (k, w) in words.iter().enumerate() {
            let m = w.len();
            let gap = sketch.query(w).unwrap() - exact.get(w).unwrap();
            if gap > eps * exact.l1_level_norm(m).unwrap() {
                fails[k] += 1;
            }
            let factorial: f64 = (1..=m).map(|i| i as f64).product();
            if gap > eps * total.powi(m as i32) / factorial {
                fails_corollary[k] += 1;
            }
        }
    }
    let bound = delta + binomial_slack(delta, seeds);
    let worst = *fails.iter().max().unwrap() as f64 / seeds as f64;
    let worst_c = *fails_corollary.iter().max().unwrap() as f64 / seeds as f64;
    let detail = format!(
        "|B|=4 r=2, 50 words x {seeds} seeds: max failure freq {worst:.4} (corollary form {worst_c:.4}) <= {bound:.4}"
    );
    if worst <= bound && worst_c <= bound {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c5_bias() -> Outcome {
    let (stream, exact, words) = tail_setup();
    let (b, seeds) = (4u64, 2000usize);
    let mut sum = vec![0.0; words.len()];
    let mut sum_sq = vec![0.0; words.len()];
    for seed in 0..seeds as u64 {
        let config = SketchConfig::with_shape(b, 1, 2, EventMapKind::Exp, 64, seed).unwrap();
        let sketch = sketch_stream(config, stream.events());
        for (k, w) in words.iter().enumerate() {
            let gap = sketch.query(w).unwrap() - exact.get(w).unwrap();
            sum[k] += gap;
            sum_sq[k] += gap * gap;
        }
    }
    let mut worst_ratio: f64 = 0.0;
    for (k, w) in words.iter().enumerate() {
        let mean = sum[k] / seeds as f64;
        let var = (sum_sq[k] / seeds as f64 - mean * mean).max(0.0);
        let slack = 3.0 * (var / seeds as f64).sqrt();
        let cap = exact.l1_level_norm(w.len()).unwrap() / b as f64;
        if mean < -slack || mean > cap + slack {
            return Err(format!("word {w}: mean gap {mean} outside [0, {cap}] +- {slack}"));
        }
        worst_ratio = worst_ratio.max(mean / cap);
    }
    Ok(format!(
        "|B|=4 r=1, 50 words x {seeds} seeds: max mean gap = {worst_ratio:.3} of ||Phi||/|B|"
    ))
}

fn c6_norms() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let n = rng.gen_range(1..=5);
        let len = rng.gen_range(0..=40);
        let s = random_stream(&mut rng, n, len);
        let exp = stream_features(&s, EventMapKind::Exp, 4);
        let lin = stream_features(&s, EventMapKind::Linear, 4);
        let mut bound = 1.0;
        for m in 0..=4 {
            if m > 0 {
                bound *= s.l1_norm() / m as f64;
            }
            let e = exp.l1_level_norm(m).unwrap();
            let err = if e == bound { 0.0 } else { rel_err(e, bound) };
            worst = worst.max(err);
            if err > 1e-9 {
                return Err(format!("exp level {m}: {e} vs {bound}"));
            }
            let l = lin.l1_level_norm(m).unwrap();
            if l > bound * (1.0 + 1e-12) {
                return Err(format!("linear level {m}: {l} above {bound}"));
            }
        }
    }
    Ok(format!("100 streams, m <= 4: exp max rel err {worst:.1e}, linear within bound"))
}

fn c7_merge() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let len = rng.gen_range(0..=300);
        let s = random_stream(&mut rng, 50, len);
        let cut = rng.gen_range(0..=len);
        let kind = KINDS[i % 2];
        let config = SketchConfig::new(0.2, 0.05, 3, kind, 50, i as u64).unwrap();
        let whole = sketch_stream(config, s.events());
        let merged = sketch_merge(
            &sketch_stream(config, &s.events()[..cut]),
            &sketch_stream(config, &s.events()[cut..]),
        )
        .unwrap();
        for (t, u) in whole.tables().iter().zip(merged.tables()) {
            for (a, b) in t.as_flat().iter().zip(u.as_flat()) {
                let err = if a == b { 0.0 } else { rel_err(*a, *b) };
                worst = worst.max(err);
                if err > 1e-10 {
                    return Err(format!("split {i} at {cut}: {a} vs {b}"));
                }
            }
        }
    }
    Ok(format!("100 random splits, max rel err {worst:.1e}"))
}

/// Every interleaving of `u` and `v`, by choosing the positions of `u`.
fn enumerate_shuffle(u: &[u64], v: &[u64]) -> BTreeMap<Vec<u64>, f64> {
    let (p, q) = (u.len(), v.len());
    let mut out = BTreeMap::new();
    for mask in 0u32..(1 << (p + q)) {
        if mask.count_ones() as usize != p {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let word: Vec<u64> = (0..p + q)
            .map(|k| {
                if mask & (1 << k) != 0 {
                    i += 1;
                    u[i - 1]
                } else {
                    j += 1;
                    v[j - 1]
                }
            })
            .collect();
        *out.entry(word).or_insert(0.0) += 1.0;
    }
    out
}

/// Every pair of position sets `I, J` covering `0..k` with `|I| = |u|`,
/// `|J| = |v|`, agreeing on `I ∩ J`.
fn enumerate_infiltration(u: &[u64], v: &[u64]) -> BTreeMap<Vec<u64>, f64> {
    let (p, q) = (u.len(), v.len());
    let mut out = BTreeMap::new();
    for k in p.max(q)..=p + q {
        for mi in 0u32..(1 << k) {
            if mi.count_ones() as usize != p {
                continue;
            }
            for mj in 0u32..(1 << k) {
                if mj.count_ones() as usize != q || (mi | mj) != (1 << k) - 1 {
                    continue;
                }
                let (mut i, mut j) = (0, 0);
                let mut word = Vec::with_capacity(k);
                let mut ok = true;
                for pos in 0..k {
                    let from_u = (mi & (1 << pos) != 0).then(|| {
                        i += 1;
                        u[i - 1]
                    });
                    let from_v = (mj & (1 << pos) != 0).then(|| {
                        j += 1;
                        v[j - 1]
                    });
                    match (from_u, from_v) {
                        (Some(a), Some(b)) if a != b => ok = false,
                        (Some(a), _) | (None, Some(a)) => word.push(a),
                        (None, None) => unreachable!(),
                    }
                }
                if ok {
                    *out.entry(word).or_insert(0.0) += 1.0;
                }
            }
        }
    }
    out
}

fn as_map(l: &LinearFunctional) -> BTreeMap<Vec<u64>, f64> {
    l.terms()
        .map(|(w, c)| (w.letters().iter().map(|x| x.0).collect(), c))
        .collect()
}

fn c8_duality() -> Outcome {
    let (a, b) = (0u64, 1u64);
    let ab = LinearFunctional::word(Word::from_ids(&[a, b]));
    let ba = LinearFunctional::word(Word::from_ids(&[b, a]));
    let shuffle_expected: BTreeMap<Vec<u64>, f64> = [
        (vec![a, b, a, b], 1.0),
        (vec![a, b, b, a], 2.0),
        (vec![b, a, a, b], 2.0),
        (vec![b, a, b, a], 1.0),
    ]
    .into();
    let mut infiltration_expected = shuffle_expected.clone();
    infiltration_expected.insert(vec![a, b, a], 1.0);
    infiltration_expected.insert(vec![b, a, b], 1.0);
    let sh = as_map(&shuffle_product(&ab, &ba));
    if sh != shuffle_expected || enumerate_shuffle(&[a, b], &[b, a]) != shuffle_expected {
        return Err(format!("ab shuffle ba = {sh:?}"));
    }
    let inf = as_map(&infiltration_product(&ab, &ba));
    if inf != infiltration_expected || enumerate_infiltration(&[a, b], &[b, a]) != infiltration_expected {
        return Err(format!("ab infiltration ba = {inf:?}"));
    }

    let mut rng = ChaCha20Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let len = rng.gen_range(0..=10);
        let weighted = random_stream(&mut rng, 3, len);
        // the infiltration identity needs unit counter increases
        let unit = Stream::from_events(3, weighted.events().iter().map(|e| Event::new(1.0, e.letter.0)))
            .unwrap();
        let word = |rng: &mut ChaCha20Rng| -> Vec<u64> {
            (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..3)).collect()
        };
        let (u, v) = (word(&mut rng), word(&mut rng));
        let (lu, lv) = (LinearFunctional::word(Word::from_ids(&u)), LinearFunctional::word(Word::from_ids(&v)));
        let shuffle = shuffle_product(&lu, &lv);
        let infiltration = infiltration_product(&lu, &lv);
        if as_map(&shuffle) != enumerate_shuffle(&u, &v)
            || as_map(&infiltration) != enumerate_infiltration(&u, &v)
        {
            return Err(format!("case {case}: product of {u:?}, {v:?} disagrees with enumeration"));
        }
        let exp = stream_features(&weighted, EventMapKind::Exp, 4);
        let lin = stream_features(&unit, EventMapKind::Linear, 4);
        let pairs = [
            (pairing(&shuffle, &exp).unwrap(), pairing(&lu, &exp).unwrap() * pairing(&lv, &exp).unwrap()),
            (pairing(&infiltration, &lin).unwrap(), pairing(&lu, &lin).unwrap() * pairing(&lv, &lin).unwrap()),
        ];
        for (x, y) in pairs {
            let err = if x == y { 0.0 } else { rel_err(x, y) };
            worst = worst.max(err);
            if err > 1e-9 {
                return Err(format!("case {case}: {x} vs {y}"));
            }
        }
    }
    Ok(format!(
        "ab shuffle ba = abab+2abba+2baab+baba, ab infiltration ba matches; 100 cases max rel err {worst:.1e}"
    ))
}

fn c9_count_min() -> Outcome {
    let mut rng = ChaCha20Rng::seed_from_u64(9);
    for i in 0..20 {
        let n = rng.gen_range(10..2000usize);
        let len = rng.gen_range(0..3000);
        let s = random_stream(&mut rng, n, len);
        let kind = KINDS[i % 2];
        let config = SketchConfig::new(0.05, 0.01, 1, kind, n as u64, i as u64).unwrap();
        let sketch = sketch_stream(config, s.events());
        // classical count-min: r rows of |B| counters, add lambda, read the min
        let rows: Vec<_> = sketch.hashes().iter().map(|h| (h.a as u128, h.b as u128, h.p as u128, h.n as u128)).collect();
        let bucket = |row: &(u128, u128, u128, u128), x: u64| (((row.0 * x as u128 + row.1) % row.2) % row.3) as usize;
        let mut counts = vec![vec![0.0f64; config.target_size as usize]; rows.len()];
        for e in s.events() {
            for (row, c) in rows.iter().zip(counts.iter_mut()) {
                c[bucket(row, e.letter.0)] += e.lambda;
            }
        }
        for x in 0..n as u64 {
            let cms = rows
                .iter()
                .zip(&counts)
                .map(|(row, c)| c[bucket(row, x)])
                .fold(f64::INFINITY, f64::min);
            let q = sketch.query(&Word::from_ids(&[x])).unwrap();
            if q.to_bits() != cms.to_bits() {
                return Err(format!("stream {i} letter {x}: {q} vs count-min {cms}"));
            }
        }
    }
    Ok("20 streams, every letter bit-identical to a classical count-min".into())
}

/// Letter 0 is heavy in the first half, letter 1 in the second; letter 2 is
/// frequent but below the threshold; the rest is uniform background.
fn planted_stream(seed: u64) -> Stream {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let len = 2000;
    Stream::from_events(
        100,
        (0..len).map(|i| {
            let u: f64 = rng.gen();
            let letter = if u < 0.6 {
                if i < len / 2 { 0 } else { 1 }
            } else if u < 0.7 {
                2
            } else {
                rng.gen_range(3..100)
            };
            Event::new(1.0, letter)
        }),
    )
    .unwrap()
}

fn mine(stream: &Stream, config: SketchConfig, rho: f64) -> ordsketch::HeavyPatternResult {
    let mut miner = HeavyPatternMiner::new(config, &[rho]).unwrap();
    for e in stream.events() {
        miner.update(*e).unwrap();
    }
    miner.patterns(0, 1_000_000).unwrap()
}

fn c10_heavy() -> Outcome {
    let (eps, delta, rho) = (0.05, 0.1, 400.0);
    let kind = EventMapKind::Exp;
    let mut planted_words = 0usize;
    for i in 0..50u64 {
        let s = planted_stream(1000 + i);
        let exact = stream_features(&s, kind, 2);
        let config = SketchConfig::new(eps, delta, 2, kind, 100, i).unwrap();
        let result = mine(&s, config, rho);
        for (w, v) in exact.iter_words() {
            if w.is_empty() || v <= rho.powi(w.len() as i32) {
                continue;
            }
            if w.letters().iter().all(|l| exact.get(&Word(vec![*l])).unwrap() > rho) {
                planted_words += 1;
                if !result.contains(&w) {
                    return Err(format!("stream {i}: heavy word {w} ({v}) missing"));
                }
            }
        }
        if !result.contains(&Word::from_ids(&[0, 1])) {
            return Err(format!("stream {i}: planted pattern 0.1 missing"));
        }
    }

    let s = planted_stream(7);
    let exact = stream_features(&s, kind, 2);
    let seeds = 500;
    let mut false_hits: BTreeMap<Word, usize> = BTreeMap::new();
    for seed in 0..seeds as u64 {
        let config = SketchConfig::new(eps, delta, 2, kind, 100, seed).unwrap();
        for (w, _) in mine(&s, config, rho).words {
            let m = w.len();
            let light = rho.powi(m as i32) - eps * exact.l1_level_norm(m).unwrap();
            if exact.get(&w).unwrap() < light {
                *false_hits.entry(w).or_insert(0) += 1;
            }
        }
    }
    let light_words = exact
        .iter_words()
        .filter(|(w, v)| !w.is_empty() && *v < rho.powi(w.len() as i32) - eps * exact.l1_level_norm(w.len()).unwrap())
        .count();
    let worst = false_hits.values().max().copied().unwrap_or(0) as f64 / seeds as f64;
    let bound = delta + binomial_slack(delta, seeds);
    let detail = format!(
        "50 streams: {planted_words} heavy words all found; {light_words} light words x {seeds} seeds: max false-positive freq {worst:.4} <= {bound:.4}"
    );
    if worst <= bound {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c11_experiment1() -> Outcome {
    let cfg = Table1Config::default();
    let rows = run_experiment_1(&cfg).unwrap();
    let cell = |b: u64, r: usize| rows.iter().find(|x| x.target_size == b && x.hash_count == r).unwrap();
    let mut problems = Vec::new();
    for &r in &cfg.hash_counts {
        for pair in cfg.target_sizes.windows(2) {
            if cell(pair[1], r).median_error >= cell(pair[0], r).median_error {
                problems.push(format!("r={r}: |B| {} -> {}", pair[0], pair[1]));
            }
        }
    }
    for &b in &cfg.target_sizes {
        for pair in cfg.hash_counts.windows(2) {
            if cell(b, pair[1]).median_error >= cell(b, pair[0]).median_error {
                problems.push(format!("|B|={b}: r {} -> {}", pair[0], pair[1]));
            }
        }
    }
    let table: Vec<String> = rows
        .iter()
        .map(|x| format!("({},{}): {:.3} @ {:.2e} ev/s", x.target_size, x.hash_count, x.median_error, x.events_per_second))
        .collect();
    let detail = format!("median Error_2 {}", table.join(", "));
    if problems.is_empty() {
        Ok(detail)
    } else {
        Err(format!("not decreasing at {}; {detail}", problems.join(", ")))
    }
}

fn c12_experiment2() -> Outcome {
    let cfg = Table2Config {
        q_values: vec![0.13, 0.105],
        ..Table2Config::default()
    };
    let rows = run_experiment_2(&cfg).unwrap();
    let (wide, narrow) = (&rows[0], &rows[1]);
    let detail = format!(
        "heavy {:?}; q-p=0.03: M1 {:.3} M2 {:.3}; q-p=0.005: M1 {:.3} M2 {:.3}",
        wide.heavy_letters, wide.accuracy_m1, wide.accuracy_m2, narrow.accuracy_m1, narrow.accuracy_m2
    );
    let ok = wide.accuracy_m2 >= 0.95
        && wide.accuracy_m2 >= wide.accuracy_m1
        && narrow.accuracy_m2 - narrow.accuracy_m1 >= 0.2;
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn c13_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let d = |n: &str| dir.path().join(n).to_str().unwrap().to_string();
    let stream = gen_heavy_tail_stream(200, 4000, 5, 0.4, 13).unwrap();
    let (head, tail) = stream.split_at(1500);
    for (name, s) in [("s.txt", &stream), ("a.txt", &head), ("b.txt", &tail)] {
        let mut buf = Vec::new();
        ordsketch_cli::streamfile::write_stream(s, &mut buf).unwrap();
        std::fs::write(d(name), buf).unwrap();
    }
    std::fs::write(
        d("t1.json"),
        r#"{"alphabet_size": 30, "length": 3000, "heavy_count": 3, "heavy_mass": 0.2, "target_sizes": [4, 8], "hash_counts": [1, 3], "repeats": 3}"#,
    )
    .unwrap();
    std::fs::write(
        d("t2.json"),
        r#"{"alphabet_size": 200, "total_length": 2000, "q_values": [0.2], "streams_per_class": 20, "target_size": 20, "hash_count": 6, "rho_fraction": 0.06, "epochs": 100, "splits": 2}"#,
    )
    .unwrap();
    let seed = "31";
    let commands: Vec<(Vec<String>, Option<String>)> = vec![
        (vec!["build".into(), d("s.txt"), "-o".into(), d("s.snap"), "--seed".into(), seed.into()], Some(d("s.snap"))),
        (vec!["build".into(), d("a.txt"), "-o".into(), d("a.snap"), "--seed".into(), seed.into()], Some(d("a.snap"))),
        (vec!["build".into(), d("b.txt"), "-o".into(), d("b.snap"), "--seed".into(), seed.into()], Some(d("b.snap"))),
        (vec!["merge".into(), d("a.snap"), d("b.snap"), "-o".into(), d("m.snap")], Some(d("m.snap"))),
        (vec!["query".into(), d("s.snap"), "0".into(), "1.2".into(), "".into(), "199.0".into()], None),
        (vec!["heavy".into(), d("s.txt"), "--rho".into(), "200".into(), "--rho".into(), "600".into(), "--seed".into(), seed.into()], None),
        (vec!["exact".into(), d("a.txt"), "--depth".into(), "1".into()], None),
        (vec!["experiment".into(), "table1".into(), "--config".into(), d("t1.json"), "--seed".into(), seed.into()], None),
        (vec!["experiment".into(), "table2".into(), "--config".into(), d("t2.json"), "--seed".into(), seed.into()], None),
    ];
    for (args, artifact) in &commands {
        let mut outputs = Vec::new();
        for _ in 0..2 {
            let out = Command::new(env!("CARGO_BIN_EXE_ordsketch")).args(args).output().unwrap();
            if !out.status.success() {
                return Err(format!("{} failed: {}", args[0], String::from_utf8_lossy(&out.stderr)));
            }
            let file = artifact.as_ref().map(|p| std::fs::read(p).unwrap());
            outputs.push((out.stdout, file));
        }
        if outputs[0] != outputs[1] {
            return Err(format!("{} {:?} differs between runs", args[0], args.get(1)));
        }
    }
    Ok(format!("{} commands (build, merge, query, heavy, exact, table1, table2) byte-identical across reruns", commands.len()))
}

type Criterion = (u32, &'static str, u64, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        (1, "oracle equivalence", 30, c1_oracle),
        (2, "worked example", 1, c2_worked_example),
        (3, "overestimation", 60, c3_overestimation),
        (4, "tail guarantee", 300, c4_tail),
        (5, "bias bound", 300, c5_bias),
        (6, "norm identity", 10, c6_norms),
        (7, "merge homomorphism", 30, c7_merge),
        (8, "duality identities", 10, c8_duality),
        (9, "count-min reduction", 10, c9_count_min),
        (10, "heavy-hitter patterns", 300, c10_heavy),
        (11, "experiment 1 trend", 600, c11_experiment1),
        (12, "experiment 2 accuracy", 600, c12_experiment2),
        (13, "determinism", 600, c13_determinism),
    ];
    let mut failed = 0;
    for (id, name, budget, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(budget);
        let (tag, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over the {budget} s budget")),
            (Err(d), _) => ("FAIL", d.clone()),
        };
        if tag == "FAIL" {
            failed += 1;
        }
        println!("{tag} [{id:>2}] {name}: {detail} ({:.2} s)", elapsed.as_secs_f64());
    }
    println!("acceptance: {}/{} criteria passed", 13 - failed, 13);
    if failed > 0 {
        std::process::exit(1);
    }
}

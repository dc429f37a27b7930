//! Event maps and the streaming feature map `Phi(sigma) = p(sigma_1) ... p(sigma_L)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{check_letter, Event, GradedTensor, Stream, Word};

/// Which event map turns a single event into an element of the tensor algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum EventMapKind {
    /// `p(lambda, a) = 1 + lambda a`. Coordinates are weighted subsequence counts.
    Linear,
    /// `p(lambda, a) = exp(lambda a)`, truncated at the tensor depth.
    #[default]
    Exp,
}

impl fmt::Display for EventMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EventMapKind::Linear => "linear",
            EventMapKind::Exp => "exp",
        })
    }
}

impl FromStr for EventMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(EventMapKind::Linear),
            "exp" => Ok(EventMapKind::Exp),
            other => Err(Error::InvalidParameter(format!(
                "unknown event map {other:?} (expected linear or exp)"
            ))),
        }
    }
}

/// `p(e)` as a tensor over an alphabet of size `n`, truncated at `depth`.
pub fn event_polynomial(
    event: Event,
    kind: EventMapKind,
    n: usize,
    depth: usize,
) -> Result<GradedTensor> {
    check_letter(event.letter, n)?;
    let mut t = GradedTensor::unit(n, depth);
    let a = event.letter.0 as usize;
    let top = match kind {
        EventMapKind::Linear => depth.min(1),
        EventMapKind::Exp => depth,
    };
    let mut coef = 1.0;
    let mut index = 0usize;
    for k in 1..=top {
        coef = coef * event.lambda / k as f64;
        index = index * n + a;
        t.level_mut(k)[index] = coef;
    }
    Ok(t)
}

/// `phi <- phi * p(e)`, truncated at the depth of `phi`.
pub fn apply_event_inplace(phi: &mut GradedTensor, event: Event, kind: EventMapKind) -> Result<()> {
    check_letter(event.letter, phi.alphabet_size())?;
    apply_event_unchecked(phi, event.letter.0 as usize, event.lambda, kind);
    Ok(())
}

/// In-place right multiplication by `p(lambda, letter)`.
///
/// Target levels are visited from the top down, so every source level read
/// (strictly lower degree) still holds its value from before this event.
pub(crate) fn apply_event_unchecked(
    phi: &mut GradedTensor,
    letter: usize,
    lambda: f64,
    kind: EventMapKind,
) {
    let n = phi.alphabet_size();
    let depth = phi.depth();
    let (offsets, data) = phi.raw_parts_mut();
    match kind {
        EventMapKind::Linear => {
            for m in (1..=depth).rev() {
                let (lower, upper) = data.split_at_mut(offsets[m]);
                let src = &lower[offsets[m - 1]..];
                let dst = &mut upper[..offsets[m + 1] - offsets[m]];
                for (u, &s) in src.iter().enumerate() {
                    dst[u * n + letter] += lambda * s;
                }
            }
        }
        EventMapKind::Exp => {
            for m in (1..=depth).rev() {
                let (lower, upper) = data.split_at_mut(offsets[m]);
                let dst = &mut upper[..offsets[m + 1] - offsets[m]];
                let mut coef = 1.0;
                let mut suffix = 0usize;
                let mut stride = 1usize;
                for k in 1..=m {
                    coef = coef * lambda / k as f64;
                    suffix = suffix * n + letter;
                    stride *= n;
                    let src = &lower[offsets[m - k]..offsets[m - k + 1]];
                    for (u, &s) in src.iter().enumerate() {
                        if s != 0.0 {
                            dst[u * stride + suffix] += coef * s;
                        }
                    }
                }
            }
        }
    }
}

/// Features of a whole stream, folding events into the unit tensor.
pub fn stream_features(stream: &Stream, kind: EventMapKind, depth: usize) -> GradedTensor {
    let mut phi = GradedTensor::unit(stream.alphabet_size(), depth);
    for e in stream.events() {
        apply_event_unchecked(&mut phi, e.letter.0 as usize, e.lambda, kind);
    }
    phi
}

/// `Phi(sigma, tau) = Phi(sigma) Phi(tau)`.
pub fn concat_features(first: &GradedTensor, second: &GradedTensor) -> Result<GradedTensor> {
    first.product(second)
}

/// Product over maximal runs of equal consecutive indices of `(run length)!`.
pub fn multi_factorial(indices: &[usize]) -> f64 {
    let mut total = 1.0;
    let mut run = 0usize;
    for (j, &i) in indices.iter().enumerate() {
        if j > 0 && indices[j - 1] == i {
            run += 1;
        } else {
            run = 1;
        }
        total *= run as f64;
    }
    total
}

/// Coordinate `Phi_w(sigma)` by direct enumeration of index tuples.
///
/// Linear: sum of `lambda(i)` over strictly increasing `i` with `a(i) = w`.
/// Exp: sum of `lambda(i) / i!` over weakly increasing `i` with `a(i) = w`.
/// Cost grows like `L^|w|`; intended for small instances only.
pub fn brute_force_oracle(stream: &Stream, word: &Word, kind: EventMapKind) -> f64 {
    let events = stream.events();
    let mut tuple = Vec::with_capacity(word.len());
    let mut total = 0.0;
    enumerate_tuples(events, word, kind, 0, &mut tuple, &mut total);
    total
}

fn enumerate_tuples(
    events: &[Event],
    word: &Word,
    kind: EventMapKind,
    first: usize,
    tuple: &mut Vec<usize>,
    total: &mut f64,
) {
    let j = tuple.len();
    if j == word.len() {
        let weight: f64 = tuple.iter().map(|&i| events[i].lambda).product();
        *total += match kind {
            EventMapKind::Linear => weight,
            EventMapKind::Exp => weight / multi_factorial(tuple),
        };
        return;
    }
    let target = word.letters()[j];
    for i in first..events.len() {
        if events[i].letter != target {
            continue;
        }
        tuple.push(i);
        let next = match kind {
            EventMapKind::Linear => i + 1,
            EventMapKind::Exp => i,
        };
        enumerate_tuples(events, word, kind, next, tuple, total);
        tuple.pop();
    }
}

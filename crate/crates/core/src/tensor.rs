//! Alphabets, words, streams and the dense truncated tensor algebra.
//!
//! A [`GradedTensor`] over an alphabet of size `n` truncated at depth `M`
//! stores one dense level per word length. The coordinate of the word
//! `a_1 ... a_m` lives in level `m` at the base-`n` positional index
//! `sum_j id(a_j) * n^(m-1-j)`, so the first letter is the most significant
//! digit. All levels share one flat buffer.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A letter of an alphabet, identified by its id.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(pub u64);

impl Letter {
    #[inline]
    pub fn id(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// One stream element: counter increase `lambda` for `letter`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub lambda: f64,
    pub letter: Letter,
}

impl Event {
    pub fn new(lambda: f64, letter: u64) -> Self {
        Event {
            lambda,
            letter: Letter(letter),
        }
    }
}

/// A cash-register stream over a fixed alphabet.
#[derive(Debug, Clone, PartialEq)]
pub struct Stream {
    alphabet_size: usize,
    events: Vec<Event>,
}

impl Stream {
    pub fn new(alphabet_size: usize) -> Result<Self> {
        if alphabet_size == 0 {
            return Err(Error::InvalidParameter(
                "alphabet size must be positive".into(),
            ));
        }
        Ok(Stream {
            alphabet_size,
            events: Vec::new(),
        })
    }

    pub fn from_events(alphabet_size: usize, events: impl IntoIterator<Item = Event>) -> Result<Self> {
        let mut stream = Stream::new(alphabet_size)?;
        for e in events {
            stream.push(e)?;
        }
        Ok(stream)
    }

    /// Appends an event. Counter increases must be finite and non-negative;
    /// a zero increase is accepted and leaves every feature unchanged.
    pub fn push(&mut self, event: Event) -> Result<()> {
        check_letter(event.letter, self.alphabet_size)?;
        if !(event.lambda.is_finite() && event.lambda >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "counter increase {} is not a finite non-negative real",
                event.lambda
            )));
        }
        self.events.push(event);
        Ok(())
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `sum_i |lambda_i|`.
    pub fn l1_norm(&self) -> f64 {
        self.events.iter().map(|e| e.lambda.abs()).sum()
    }

    /// The stream with every counter increase multiplied by `c`.
    pub fn scale(&self, c: f64) -> Result<Stream> {
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "scale factor must be a positive real, got {c}"
            )));
        }
        Ok(Stream {
            alphabet_size: self.alphabet_size,
            events: self
                .events
                .iter()
                .map(|e| Event {
                    lambda: c * e.lambda,
                    letter: e.letter,
                })
                .collect(),
        })
    }

    /// Splits into the first `at` events and the rest.
    pub fn split_at(&self, at: usize) -> (Stream, Stream) {
        let (head, tail) = self.events.split_at(at);
        (
            Stream {
                alphabet_size: self.alphabet_size,
                events: head.to_vec(),
            },
            Stream {
                alphabet_size: self.alphabet_size,
                events: tail.to_vec(),
            },
        )
    }
}

/// Free-function form of [`Stream::scale`].
pub fn scale_stream(stream: &Stream, c: f64) -> Result<Stream> {
    stream.scale(c)
}

pub(crate) fn check_letter(letter: Letter, alphabet_size: usize) -> Result<()> {
    if letter.0 >= alphabet_size as u64 {
        Err(Error::LetterOutOfRange {
            letter: letter.0,
            alphabet_size,
        })
    } else {
        Ok(())
    }
}

/// A finite word; the empty word is the unit.
///
/// The text form joins letter ids with `.` (`"0.1.0"`); the empty string is
/// the empty word.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn from_ids(ids: &[u64]) -> Self {
        Word(ids.iter().copied().map(Letter).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.0);
        letters.extend_from_slice(&other.0);
        Word(letters)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl FromStr for Word {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Word::empty());
        }
        s.split('.')
            .map(|part| {
                part.parse::<u64>().map(Letter).map_err(|_| {
                    Error::InvalidParameter(format!("bad letter id {part:?} in word {s:?}"))
                })
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }
}

/// Number of coordinates `sum_{m<=depth} n^m`, or `None` on overflow.
pub fn coordinate_count(alphabet_size: usize, depth: usize) -> Option<usize> {
    let mut total = 0usize;
    let mut level = 1usize;
    for m in 0..=depth {
        if m > 0 {
            level = level.checked_mul(alphabet_size)?;
        }
        total = total.checked_add(level)?;
    }
    Some(total)
}

/// Dense position of `word` as `(level, offset)` within a tensor over an
/// alphabet of size `n`.
pub fn word_index(word: &Word, n: usize) -> Result<(usize, usize)> {
    let mut offset = 0usize;
    for &l in word.letters() {
        check_letter(l, n)?;
        offset = offset
            .checked_mul(n)
            .and_then(|o| o.checked_add(l.0 as usize))
            .ok_or_else(|| Error::InvalidParameter("word index overflows usize".into()))?;
    }
    Ok((word.len(), offset))
}

/// Inverse of [`word_index`].
pub fn word_from_index(level: usize, mut offset: usize, n: usize) -> Word {
    let mut letters = vec![Letter(0); level];
    for slot in letters.iter_mut().rev() {
        *slot = Letter((offset % n) as u64);
        offset /= n;
    }
    Word(letters)
}

/// Dense truncated element of the tensor algebra over `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedTensor {
    alphabet_size: usize,
    depth: usize,
    /// `offsets[m]..offsets[m + 1]` is level `m`.
    offsets: Vec<usize>,
    data: Vec<f64>,
}

impl GradedTensor {
    /// The zero tensor.
    ///
    /// Panics if `alphabet_size` is zero or the coordinate count overflows.
    pub fn zeros(alphabet_size: usize, depth: usize) -> Self {
        assert!(alphabet_size > 0, "alphabet size must be positive");
        let total = coordinate_count(alphabet_size, depth)
            .expect("coordinate count overflows usize");
        let mut offsets = Vec::with_capacity(depth + 2);
        let mut start = 0;
        let mut width: usize = 1;
        for _ in 0..=depth {
            offsets.push(start);
            start += width;
            width = width.saturating_mul(alphabet_size);
        }
        offsets.push(total);
        GradedTensor {
            alphabet_size,
            depth,
            offsets,
            data: vec![0.0; total],
        }
    }

    /// The multiplicative unit `1`, the features of the empty stream.
    pub fn unit(alphabet_size: usize, depth: usize) -> Self {
        let mut t = GradedTensor::zeros(alphabet_size, depth);
        t.data[0] = 1.0;
        t
    }

    /// Rebuilds a tensor from its flat level-ordered coordinates.
    pub fn from_flat(alphabet_size: usize, depth: usize, data: Vec<f64>) -> Result<Self> {
        let mut t = GradedTensor::zeros(alphabet_size, depth);
        if data.len() != t.data.len() {
            return Err(Error::ShapeMismatch(format!(
                "expected {} coordinates, got {}",
                t.data.len(),
                data.len()
            )));
        }
        t.data = data;
        Ok(t)
    }

    pub fn alphabet_size(&self) -> usize {
        self.alphabet_size
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// All coordinates in level order.
    pub fn as_flat(&self) -> &[f64] {
        &self.data
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn level(&self, m: usize) -> &[f64] {
        &self.data[self.offsets[m]..self.offsets[m + 1]]
    }

    pub fn level_mut(&mut self, m: usize) -> &mut [f64] {
        let (lo, hi) = (self.offsets[m], self.offsets[m + 1]);
        &mut self.data[lo..hi]
    }

    /// Level offsets (`offsets[m]..offsets[m + 1]` is level `m`) and the
    /// mutable flat buffer, borrowed independently.
    pub(crate) fn raw_parts_mut(&mut self) -> (&[usize], &mut [f64]) {
        (&self.offsets, &mut self.data)
    }

    /// Coordinate of `word`.
    pub fn get(&self, word: &Word) -> Result<f64> {
        if word.len() > self.depth {
            return Err(Error::WordTooLong {
                len: word.len(),
                depth: self.depth,
            });
        }
        let (level, offset) = word_index(word, self.alphabet_size)?;
        Ok(self.level(level)[offset])
    }

    pub fn set(&mut self, word: &Word, value: f64) -> Result<()> {
        if word.len() > self.depth {
            return Err(Error::WordTooLong {
                len: word.len(),
                depth: self.depth,
            });
        }
        let (level, offset) = word_index(word, self.alphabet_size)?;
        self.level_mut(level)[offset] = value;
        Ok(())
    }

    /// Iterates `(word, coordinate)` in level order, then by index.
    pub fn iter_words(&self) -> impl Iterator<Item = (Word, f64)> + '_ {
        (0..=self.depth).flat_map(move |m| {
            self.level(m)
                .iter()
                .enumerate()
                .map(move |(i, &v)| (word_from_index(m, i, self.alphabet_size), v))
        })
    }

    fn check_same_shape(&self, other: &GradedTensor) -> Result<()> {
        if self.alphabet_size != other.alphabet_size || self.depth != other.depth {
            return Err(Error::ShapeMismatch(format!(
                "(n={}, M={}) vs (n={}, M={})",
                self.alphabet_size, self.depth, other.alphabet_size, other.depth
            )));
        }
        Ok(())
    }

    /// Truncated non-commutative product: the level-`m` coordinate of `uv`
    /// collects `self_u * other_v` over every split of the word.
    pub fn product(&self, other: &GradedTensor) -> Result<GradedTensor> {
        self.check_same_shape(other)?;
        let mut out = GradedTensor::zeros(self.alphabet_size, self.depth);
        for m in 0..=self.depth {
            let start = out.offsets[m];
            let end = out.offsets[m + 1];
            let dst_level = &mut out.data[start..end];
            for k in 0..=m {
                let xs = self.level(k);
                let ys = other.level(m - k);
                let stride = ys.len();
                for (i, &xv) in xs.iter().enumerate() {
                    if xv == 0.0 {
                        continue;
                    }
                    let dst = &mut dst_level[i * stride..(i + 1) * stride];
                    for (d, &yv) in dst.iter_mut().zip(ys) {
                        *d += xv * yv;
                    }
                }
            }
        }
        Ok(out)
    }

    /// `sum_{|w| = m} |c_w|`.
    pub fn l1_level_norm(&self, m: usize) -> Result<f64> {
        if m > self.depth {
            return Err(Error::WordTooLong {
                len: m,
                depth: self.depth,
            });
        }
        Ok(self.level(m).iter().map(|v| v.abs()).sum())
    }

    /// `sum_{|w| <= m} |c_w|`.
    pub fn l1_upto(&self, m: usize) -> Result<f64> {
        (0..=m).map(|k| self.l1_level_norm(k)).sum()
    }
}

/// Free-function form of [`GradedTensor::product`].
pub fn truncated_product(x: &GradedTensor, y: &GradedTensor) -> Result<GradedTensor> {
    x.product(y)
}

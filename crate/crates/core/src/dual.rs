//! Finite linear functionals on feature space and their two commutative
//! products.
//!
//! Pairing a functional with stream features turns products of coordinates
//! into single coordinates: under the exp event map
//! `<u, Phi> <v, Phi> = <u shuffle v, Phi>`. Under the linear event map the
//! same identity holds with the infiltration product, provided every counter
//! increase is 0 or 1: the coincidence term counts a repeated event once,
//! the product of pairings counts it `lambda^2` times.

use std::collections::btree_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::tensor::{GradedTensor, Letter, Word};

/// A finite linear combination of words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LinearFunctional {
    terms: BTreeMap<Word, f64>,
}

impl LinearFunctional {
    pub fn zero() -> Self {
        Self::default()
    }

    /// The functional `1 * word`.
    pub fn word(word: Word) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(word, 1.0);
        LinearFunctional { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Word, f64)>) -> Self {
        let mut out = LinearFunctional::zero();
        for (w, c) in terms {
            out.add_term(w, c);
        }
        out
    }

    /// Adds `coef * word`, dropping the term if it cancels to zero.
    pub fn add_term(&mut self, word: Word, coef: f64) {
        match self.terms.entry(word) {
            Entry::Occupied(mut slot) => {
                *slot.get_mut() += coef;
                if *slot.get() == 0.0 {
                    slot.remove();
                }
            }
            Entry::Vacant(slot) => {
                if coef != 0.0 {
                    slot.insert(coef);
                }
            }
        }
    }

    pub fn coefficient(&self, word: &Word) -> f64 {
        self.terms.get(word).copied().unwrap_or(0.0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, f64)> {
        self.terms.iter().map(|(w, &c)| (w, c))
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Longest word in the support, 0 for the zero functional.
    pub fn max_word_len(&self) -> usize {
        self.terms.keys().map(Word::len).max().unwrap_or(0)
    }

    /// `<l, phi> = sum_w l_w phi_w`.
    pub fn pairing(&self, phi: &GradedTensor) -> Result<f64> {
        let mut total = 0.0;
        for (w, c) in self.terms() {
            if w.len() > phi.depth() {
                return Err(Error::WordTooLong {
                    len: w.len(),
                    depth: phi.depth(),
                });
            }
            total += c * phi.get(w)?;
        }
        Ok(total)
    }

    pub fn shuffle(&self, other: &LinearFunctional) -> LinearFunctional {
        self.bilinear(other, WordProduct::Shuffle)
    }

    pub fn infiltration(&self, other: &LinearFunctional) -> LinearFunctional {
        self.bilinear(other, WordProduct::Infiltration)
    }

    fn bilinear(&self, other: &LinearFunctional, product: WordProduct) -> LinearFunctional {
        let mut out = LinearFunctional::zero();
        for (u, cu) in self.terms() {
            for (v, cv) in other.terms() {
                for (w, c) in word_product(u, v, product) {
                    out.add_term(w, cu * cv * c);
                }
            }
        }
        out
    }
}

impl Add for &LinearFunctional {
    type Output = LinearFunctional;

    fn add(self, rhs: &LinearFunctional) -> LinearFunctional {
        let mut out = self.clone();
        for (w, c) in rhs.terms() {
            out.add_term(w.clone(), c);
        }
        out
    }
}

impl Mul<f64> for &LinearFunctional {
    type Output = LinearFunctional;

    fn mul(self, rhs: f64) -> LinearFunctional {
        LinearFunctional::from_terms(self.terms().map(|(w, c)| (w.clone(), c * rhs)))
    }
}

/// Free-function form of [`LinearFunctional::pairing`].
pub fn pairing(l: &LinearFunctional, phi: &GradedTensor) -> Result<f64> {
    l.pairing(phi)
}

pub fn shuffle_product(l1: &LinearFunctional, l2: &LinearFunctional) -> LinearFunctional {
    l1.shuffle(l2)
}

pub fn infiltration_product(l1: &LinearFunctional, l2: &LinearFunctional) -> LinearFunctional {
    l1.infiltration(l2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum WordProduct {
    Shuffle,
    Infiltration,
}

type Terms = BTreeMap<Word, f64>;

/// Product of two words, by recursion on their first letters:
/// `au * bv = a (u * bv) + b (au * v) [+ [a = b] a (u * v)]`,
/// the bracketed coincidence term only for the infiltration product.
fn word_product(u: &Word, v: &Word, product: WordProduct) -> Terms {
    let mut memo = HashMap::new();
    suffix_product(u.letters(), v.letters(), 0, 0, product, &mut memo)
}

fn suffix_product(
    u: &[Letter],
    v: &[Letter],
    i: usize,
    j: usize,
    product: WordProduct,
    memo: &mut HashMap<(usize, usize), Terms>,
) -> Terms {
    if let Some(hit) = memo.get(&(i, j)) {
        return hit.clone();
    }
    let out = if i == u.len() {
        single(&v[j..])
    } else if j == v.len() {
        single(&u[i..])
    } else {
        let mut out = Terms::new();
        let a = u[i];
        let b = v[j];
        prepend_into(&mut out, a, &suffix_product(u, v, i + 1, j, product, memo));
        prepend_into(&mut out, b, &suffix_product(u, v, i, j + 1, product, memo));
        if product == WordProduct::Infiltration && a == b {
            prepend_into(&mut out, a, &suffix_product(u, v, i + 1, j + 1, product, memo));
        }
        out
    };
    memo.insert((i, j), out.clone());
    out
}

fn single(letters: &[Letter]) -> Terms {
    let mut t = Terms::new();
    t.insert(Word(letters.to_vec()), 1.0);
    t
}

fn prepend_into(out: &mut Terms, letter: Letter, terms: &Terms) {
    for (w, &c) in terms {
        let mut letters = Vec::with_capacity(w.len() + 1);
        letters.push(letter);
        letters.extend_from_slice(w.letters());
        *out.entry(Word(letters)).or_insert(0.0) += c;
    }
}

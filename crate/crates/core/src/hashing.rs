//! The 2-universal affine family `h_{a,b}(x) = ((a x + b) mod p) mod n`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::{Letter, Word};

/// Identifier of the generator behind [`sample_hashes`], recorded in snapshots.
pub const PRNG_ID: &str = "chacha20";

/// One member of the affine family, mapping a big alphabet into `0..n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AffineHash {
    pub a: u64,
    pub b: u64,
    pub p: u64,
    pub n: u64,
}

impl AffineHash {
    pub fn new(a: u64, b: u64, p: u64, n: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::InvalidParameter(format!("modulus {p} is not prime")));
        }
        if a == 0 || a >= p || b >= p {
            return Err(Error::InvalidParameter(format!(
                "need 1 <= a < p and 0 <= b < p, got a={a}, b={b}, p={p}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParameter("target alphabet must be non-empty".into()));
        }
        Ok(AffineHash { a, b, p, n })
    }

    /// `((a x + b) mod p) mod n`, exact for any 64-bit modulus.
    #[inline]
    pub fn eval(&self, x: Letter) -> Letter {
        Letter(self.eval_id(x.0))
    }

    #[inline]
    pub(crate) fn eval_id(&self, x: u64) -> u64 {
        let v = (self.a as u128 * x as u128 + self.b as u128) % self.p as u128;
        (v as u64) % self.n
    }

    pub fn hash_word(&self, word: &Word) -> Word {
        Word(word.letters().iter().map(|&l| self.eval(l)).collect())
    }
}

pub fn eval_hash(h: &AffineHash, x: Letter) -> Letter {
    h.eval(x)
}

pub fn hash_word(h: &AffineHash, word: &Word) -> Word {
    h.hash_word(word)
}

/// Parameters of the family `A -> B` plus the seed that fixes every draw.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct HashFamilySpec {
    pub source_size: u64,
    pub target_size: u64,
    pub prime: u64,
    pub seed: u64,
}

impl HashFamilySpec {
    /// Uses the smallest prime not below the source alphabet size.
    pub fn new(source_size: u64, target_size: u64, seed: u64) -> Result<Self> {
        if source_size == 0 || target_size == 0 {
            return Err(Error::InvalidParameter(
                "alphabet sizes must be positive".into(),
            ));
        }
        Ok(HashFamilySpec {
            source_size,
            target_size,
            prime: smallest_prime_geq(source_size.max(2)),
            seed,
        })
    }
}

/// `r` independent uniform draws of `(a, b)`, reproducible from the seed.
pub fn sample_hashes(spec: &HashFamilySpec, r: usize) -> Vec<AffineHash> {
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    (0..r)
        .map(|_| AffineHash {
            a: rng.gen_range(1..spec.prime),
            b: rng.gen_range(0..spec.prime),
            p: spec.prime,
            n: spec.target_size,
        })
        .collect()
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin, exact on the whole `u64` range.
pub fn is_prime(n: u64) -> bool {
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &q in &BASES {
        if n.is_multiple_of(q) {
            return n == q;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Least prime `>= m`.
pub fn smallest_prime_geq(m: u64) -> u64 {
    let mut c = m.max(2);
    while !is_prime(c) {
        c += 1;
    }
    c
}

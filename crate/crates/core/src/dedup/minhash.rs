use std::collections::HashSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use crate::error::{Error, Result};

pub const DEFAULT_PERMUTATIONS: usize = 128;

/// Mersenne prime 2^61 - 1.
const PRIME: u64 = (1 << 61) - 1;

/// Minimum of the empty set; never equal to anything.
const EMPTY: u64 = u64::MAX;

pub type Trigram = [u32; 3];

/// All contiguous index triples of `vector`.
pub fn trigram_set(vector: &[u32]) -> HashSet<Trigram> {
    vector.windows(3).map(|w| [w[0], w[1], w[2]]).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinHashSignature {
    #[serde(rename = "sig")]
    pub values: Vec<u64>,
    pub seed: u64,
}

impl MinHashSignature {
    /// Signature of an empty trigram set.
    pub fn is_empty_set(&self) -> bool {
        self.values.iter().all(|&v| v == EMPTY)
    }
}

/// A family of `perms` hash functions `h_i(x) = (a_i * base(x) + b_i) mod p`
/// drawn from `seed`.
#[derive(Debug, Clone)]
pub struct MinHasher {
    seed: u64,
    a: Vec<u64>,
    b: Vec<u64>,
}

impl MinHasher {
    pub fn new(perms: usize, seed: u64) -> MinHasher {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let (a, b) = (0..perms).map(|_| (rng.gen_range(1..PRIME), rng.gen_range(0..PRIME))).unzip();
        MinHasher { seed, a, b }
    }

    pub fn perms(&self) -> usize {
        self.a.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn signature<'a>(&self, trigrams: impl IntoIterator<Item = &'a Trigram>) -> MinHashSignature {
        let mut values = vec![EMPTY; self.perms()];
        for t in trigrams {
            let x = base_hash(t) % PRIME;
            for ((v, &a), &b) in values.iter_mut().zip(&self.a).zip(&self.b) {
                *v = (*v).min(mul_add_mod(a, x, b));
            }
        }
        MinHashSignature { values, seed: self.seed }
    }

    pub fn sign_vector(&self, vector: &[u32]) -> MinHashSignature {
        self.signature(&trigram_set(vector))
    }
}

fn base_hash(t: &Trigram) -> u64 {
    let mut bytes = [0u8; 12];
    for (chunk, v) in bytes.chunks_exact_mut(4).zip(t) {
        chunk.copy_from_slice(&v.to_le_bytes());
    }
    xxh3_64(&bytes)
}

fn mul_add_mod(a: u64, x: u64, b: u64) -> u64 {
    let v = a as u128 * x as u128 + b as u128;
    let folded = (v & PRIME as u128) + (v >> 61);
    let folded = (folded & PRIME as u128) + (folded >> 61);
    let r = folded as u64;
    if r >= PRIME {
        r - PRIME
    } else {
        r
    }
}

/// Signature with the default number of permutations.
pub fn minhash<'a>(trigrams: impl IntoIterator<Item = &'a Trigram>, seed: u64) -> MinHashSignature {
    MinHasher::new(DEFAULT_PERMUTATIONS, seed).signature(trigrams)
}

/// Fraction of positions where the two signatures agree. The empty-set
/// signature agrees with nothing.
pub fn signature_similarity(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64> {
    if a.seed != b.seed || a.values.len() != b.values.len() || a.values.is_empty() {
        return Err(Error::SignatureMismatch(format!(
            "seed {} / {} values vs seed {} / {} values",
            a.seed,
            a.values.len(),
            b.seed,
            b.values.len()
        )));
    }
    let equal = a.values.iter().zip(&b.values).filter(|(x, y)| x == y && **x != EMPTY).count();
    Ok(equal as f64 / a.values.len() as f64)
}

/// Exact Jaccard similarity; 0 for two empty sets.
pub fn jaccard<T: Eq + std::hash::Hash>(a: &HashSet<T>, b: &HashSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

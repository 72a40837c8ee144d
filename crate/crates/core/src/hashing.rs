//! Simple tabulation hashing and the `((a·x + b) mod p) mod m` family.

use rand::RngCore;
use thiserror::Error;

use crate::rng::stream_rng;

/// Characters per 64-bit key used by [`TabulationHash::new`].
pub const TAB_CHARS: u32 = 4;
/// Bits per character used by [`TabulationHash::new`].
pub const TAB_CHAR_BITS: u32 = 16;

/// Modulus of the universal family, the Mersenne prime `2^127 − 1`.
pub const UNIVERSAL_PRIME: u128 = (1u128 << 127) - 1;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum HashError {
    #[error("output width {0} is outside 1..=64")]
    InvalidOutBits(u32),
    #[error("hash range must be at least 1")]
    ZeroRange,
    #[error("invalid tabulation tables: {0}")]
    InvalidTables(String),
    #[error("invalid universal coefficients: {0}")]
    InvalidCoefficients(String),
}

/// `h(x) = T_1[x_1] ⊕ … ⊕ T_c[x_c]`, with `x_1` the lowest-order character.
#[derive(Clone, PartialEq, Eq)]
pub struct TabulationHash {
    chars: u32,
    char_bits: u32,
    out_bits: u32,
    // c tables of 2^char_bits entries, stored back to back.
    tables: Vec<u64>,
}

impl std::fmt::Debug for TabulationHash {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("TabulationHash")
            .field("chars", &self.chars)
            .field("char_bits", &self.char_bits)
            .field("out_bits", &self.out_bits)
            .finish_non_exhaustive()
    }
}

fn out_mask(out_bits: u32) -> u64 {
    if out_bits == 64 {
        u64::MAX
    } else {
        (1u64 << out_bits) - 1
    }
}

impl TabulationHash {
    /// Four 16-bit characters, tables filled from the `(seed, 0)` stream.
    pub fn new(seed: u64, out_bits: u32) -> Result<Self, HashError> {
        if !(1..=64).contains(&out_bits) {
            return Err(HashError::InvalidOutBits(out_bits));
        }
        let mask = out_mask(out_bits);
        let mut rng = stream_rng(seed, 0);
        let len = (TAB_CHARS as usize) << TAB_CHAR_BITS;
        let tables = (0..len).map(|_| rng.next_u64() & mask).collect();
        Ok(Self {
            chars: TAB_CHARS,
            char_bits: TAB_CHAR_BITS,
            out_bits,
            tables,
        })
    }

    /// Builds a hash from explicit tables. Keys are read as
    /// `tables.len()` characters of `char_bits` bits each.
    pub fn from_tables(char_bits: u32, tables: Vec<Vec<u64>>, out_bits: u32) -> Result<Self, HashError> {
        if !(1..=64).contains(&out_bits) {
            return Err(HashError::InvalidOutBits(out_bits));
        }
        let chars = tables.len() as u32;
        if chars == 0 || char_bits == 0 || char_bits > 32 || chars * char_bits > 64 {
            return Err(HashError::InvalidTables(format!(
                "{chars} characters of {char_bits} bits do not fit a 64-bit key"
            )));
        }
        let width = 1usize << char_bits;
        let mask = out_mask(out_bits);
        let mut flat = Vec::with_capacity(width * chars as usize);
        for (i, t) in tables.into_iter().enumerate() {
            if t.len() != width {
                return Err(HashError::InvalidTables(format!("table {i} has {} entries, expected {width}", t.len())));
            }
            if t.iter().any(|&e| e & !mask != 0) {
                return Err(HashError::InvalidTables(format!("table {i} has entries wider than {out_bits} bits")));
            }
            flat.extend(t);
        }
        Ok(Self {
            chars,
            char_bits,
            out_bits,
            tables: flat,
        })
    }

    pub fn out_bits(&self) -> u32 {
        self.out_bits
    }

    pub fn chars(&self) -> u32 {
        self.chars
    }

    pub fn char_bits(&self) -> u32 {
        self.char_bits
    }

    pub fn table(&self, i: usize) -> &[u64] {
        let width = 1usize << self.char_bits;
        &self.tables[i * width..(i + 1) * width]
    }

    #[inline]
    pub fn hash(&self, key: u64) -> u64 {
        let width = 1usize << self.char_bits;
        let char_mask = (width - 1) as u64;
        let mut h = 0u64;
        for i in 0..self.chars as usize {
            let x = ((key >> (i as u32 * self.char_bits)) & char_mask) as usize;
            h ^= self.tables[i * width + x];
        }
        h
    }

    /// Maps the hash onto `[0, buckets)` with multiply-shift:
    /// `(h(key) · buckets) >> w`. Requires `buckets ≤ 2^w`.
    #[inline]
    pub fn bucket(&self, key: u64, buckets: u64) -> u64 {
        debug_assert!(self.out_bits == 64 || buckets <= 1u64 << self.out_bits);
        ((self.hash(key) as u128 * buckets as u128) >> self.out_bits) as u64
    }
}

/// `g(x) = ((a·x + b) mod p) mod m` with `p = 2^127 − 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UniversalHash {
    a: u128,
    b: u128,
    m: u128,
}

#[inline]
fn reduce_mersenne(v: u128) -> u128 {
    // v < 2^128; one fold brings it below 2^127 + 1.
    let r = (v & UNIVERSAL_PRIME) + (v >> 127);
    if r >= UNIVERSAL_PRIME {
        r - UNIVERSAL_PRIME
    } else {
        r
    }
}

/// `(a · x) mod p` for `a < p`, exact.
#[inline]
pub fn mul_mod_prime(a: u128, x: u64) -> u128 {
    let a_lo = a as u64 as u128;
    let a_hi = a >> 64; // < 2^63
    let x = x as u128;
    let low = reduce_mersenne(a_lo * x);
    // a_hi·x·2^64 with a_hi·x = t_hi·2^63 + t_lo, and 2^127 ≡ 1.
    let t = a_hi * x;
    let t_hi = t >> 63;
    let t_lo = t & ((1u128 << 63) - 1);
    let high = reduce_mersenne(t_hi + (t_lo << 64));
    reduce_mersenne(low + high)
}

fn random_below_prime(rng: &mut impl RngCore, bound: u128) -> u128 {
    loop {
        let v = (((rng.next_u64() as u128) << 64) | rng.next_u64() as u128) & UNIVERSAL_PRIME;
        if v < bound {
            return v;
        }
    }
}

impl UniversalHash {
    /// Draws `a ∈ [1, p)` and `b ∈ [0, p)` from the `(seed, stream)` stream.
    pub fn new(seed: u64, stream: u64, m: u128) -> Result<Self, HashError> {
        let mut rng = stream_rng(seed, stream);
        Self::from_rng(&mut rng, m)
    }

    pub fn from_rng(rng: &mut impl RngCore, m: u128) -> Result<Self, HashError> {
        if m == 0 {
            return Err(HashError::ZeroRange);
        }
        let a = 1 + random_below_prime(rng, UNIVERSAL_PRIME - 1);
        let b = random_below_prime(rng, UNIVERSAL_PRIME);
        Ok(Self { a, b, m })
    }

    pub fn with_params(a: u128, b: u128, m: u128) -> Result<Self, HashError> {
        if m == 0 {
            return Err(HashError::ZeroRange);
        }
        if a == 0 || a >= UNIVERSAL_PRIME || b >= UNIVERSAL_PRIME {
            return Err(HashError::InvalidCoefficients(format!("a={a}, b={b}")));
        }
        Ok(Self { a, b, m })
    }

    pub fn range(&self) -> u128 {
        self.m
    }

    #[inline]
    pub fn hash(&self, key: u64) -> u128 {
        let ax = mul_mod_prime(self.a, key);
        reduce_mersenne(ax + self.b) % self.m
    }
}

/// True iff some adjacent pair has equal hash and distinct keys. The input
/// must be sorted by hash.
pub fn detect_collision<H: PartialEq>(sorted_by_hash: &[(H, u64)]) -> bool {
    sorted_by_hash
        .windows(2)
        .any(|w| w[0].0 == w[1].0 && w[0].1 != w[1].1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use proptest::prelude::*;

    fn desk_hash() -> TabulationHash {
        // c = 2 characters of 4 bits.
        let mut t1 = vec![0u64; 16];
        let mut t2 = vec![0u64; 16];
        t1[0x3] = 0b1010;
        t2[0x5] = 0b0110;
        TabulationHash::from_tables(4, vec![t1, t2], 4).unwrap()
    }

    #[test]
    fn tabulation_desk_instance() {
        let h = desk_hash();
        // x_1 = 0x3 (low nibble), x_2 = 0x5.
        assert_eq!(h.hash(0x53), 0b1100);
        // Characters indexing zero entries.
        assert_eq!(h.hash(0x00), 0);
        assert_eq!(h.hash(0x53), h.hash(0x53));
    }

    #[test]
    fn tabulation_seeding() {
        let a = TabulationHash::new(7, 10).unwrap();
        let b = TabulationHash::new(7, 10).unwrap();
        assert!(a == b);
        let c = TabulationHash::new(8, 10).unwrap();
        assert!(a != c);
        assert!(a.tables.iter().all(|&e| e < 1 << 10));
        assert_eq!(a.chars() * a.char_bits(), 64);
        assert_eq!(TabulationHash::new(7, 0).unwrap_err(), HashError::InvalidOutBits(0));
        assert_eq!(TabulationHash::new(7, 65).unwrap_err(), HashError::InvalidOutBits(65));
    }

    #[test]
    fn tabulation_buckets_in_range() {
        let h = TabulationHash::new(1, 7).unwrap();
        for k in 0..10_000u64 {
            assert!(h.bucket(k.wrapping_mul(0x9E37_79B9_7F4A_7C15), 100) < 100);
        }
    }

    #[test]
    fn universal_examples() {
        let id = UniversalHash::with_params(1, 0, UNIVERSAL_PRIME).unwrap();
        for k in [0u64, 1, 12345, u64::MAX] {
            assert_eq!(id.hash(k), k as u128);
        }
        let parity = UniversalHash::with_params(1, 0, 2).unwrap();
        assert_eq!(parity.hash(5), 1);
        assert_eq!(UniversalHash::new(1, 0, 0).unwrap_err(), HashError::ZeroRange);
        assert!(UniversalHash::with_params(0, 0, 2).is_err());
    }

    #[test]
    fn universal_is_pure_and_in_range() {
        let g = UniversalHash::new(3, 1, 1000).unwrap();
        for k in 0..1000u64 {
            let v = g.hash(k);
            assert!(v < 1000);
            assert_eq!(v, g.hash(k));
        }
    }

    #[test]
    fn collision_examples() {
        assert!(!detect_collision(&[(3u64, 1), (3, 1), (5, 2)]));
        assert!(detect_collision(&[(3u64, 1), (3, 2)]));
        assert!(!detect_collision::<u64>(&[]));
    }

    proptest! {
        #[test]
        fn mul_mod_matches_bigint(a in 1u128..UNIVERSAL_PRIME, x in any::<u64>(), b in 0u128..UNIVERSAL_PRIME, m in 1u128..u128::MAX) {
            let p = BigUint::from(UNIVERSAL_PRIME);
            let expect = ((BigUint::from(a) * BigUint::from(x) + BigUint::from(b)) % &p) % BigUint::from(m);
            let g = UniversalHash::with_params(a, b, m).unwrap();
            prop_assert_eq!(BigUint::from(g.hash(x)), expect);
        }
    }
}

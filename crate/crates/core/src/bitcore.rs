//! Finite binary strings and their identification with natural numbers.
//!
//! Strings are ordered length-first, then lexicographically
//! (`ε, 0, 1, 00, 01, 10, 11, 000, ...`), and the position of a string in
//! that order is its index. Every "least string" elsewhere in the crate
//! refers to this order, which is also the [`Ord`] impl of [`BitString`].

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BitError {
    #[error("length mismatch: {left} vs {right} bits")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid bit character {0:?}, expected '0' or '1'")]
    InvalidDigit(char),
}

/// A finite binary string.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn empty() -> Self {
        Self { bits: Vec::new() }
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        Self { bits }
    }

    pub fn zeros(len: usize) -> Self {
        Self {
            bits: vec![false; len],
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn into_bits(self) -> Vec<bool> {
        self.bits
    }

    pub fn get(&self, i: usize) -> Option<bool> {
        self.bits.get(i).copied()
    }

    pub fn push(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn extend_from(&mut self, other: &BitString) {
        self.bits.extend_from_slice(&other.bits);
    }

    /// True when `self` is a prefix of `other` (including equality).
    pub fn is_prefix_of(&self, other: &BitString) -> bool {
        other.bits.starts_with(&self.bits)
    }

    pub fn is_proper_prefix_of(&self, other: &BitString) -> bool {
        self.len() < other.len() && self.is_prefix_of(other)
    }

    /// Renders the empty string as `eps` instead of an empty field.
    pub fn human(&self) -> String {
        if self.is_empty() {
            "eps".to_string()
        } else {
            self.to_string()
        }
    }

    /// Parses digits, accepting `eps` for the empty string.
    pub fn parse_human(s: &str) -> Result<Self, BitError> {
        if s == "eps" {
            Ok(Self::empty())
        } else {
            s.parse()
        }
    }

    /// All strings of length `len` in lexicographic order.
    pub fn all_of_length(len: usize) -> impl Iterator<Item = BitString> {
        assert!(len < 64, "cannot enumerate strings of length {len}");
        (0u64..(1u64 << len)).map(move |v| {
            BitString::from_bits((0..len).rev().map(|i| (v >> i) & 1 == 1).collect())
        })
    }

    /// All strings of length at most `max_len`, in length-lex order.
    pub fn all_up_to(max_len: usize) -> impl Iterator<Item = BitString> {
        (0..=max_len).flat_map(BitString::all_of_length)
    }
}

impl Ord for BitString {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.bits.cmp(&other.bits))
    }
}

impl PartialOrd for BitString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.human())
    }
}

impl FromStr for BitString {
    type Err = BitError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(BitError::InvalidDigit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitString::from_bits)
    }
}

impl From<&[bool]> for BitString {
    fn from(bits: &[bool]) -> Self {
        Self::from_bits(bits.to_vec())
    }
}

/// The `i`-th string in length-lex order: the binary expansion of `i + 1`
/// with its leading one removed.
pub fn string_of(i: &BigUint) -> BitString {
    let succ = i + 1u32;
    let width = succ.bits() as usize;
    let bits = (0..width - 1)
        .rev()
        .map(|k| succ.bit(k as u64))
        .collect();
    BitString::from_bits(bits)
}

pub fn string_of_u64(i: u64) -> BitString {
    string_of(&BigUint::from(i))
}

/// Inverse of [`string_of`].
pub fn index(x: &BitString) -> BigUint {
    let mut v = BigUint::one();
    for &b in x.bits() {
        v <<= 1u32;
        if b {
            v += 1u32;
        }
    }
    v - 1u32
}

/// [`index`] when it fits in a `u64`.
pub fn index_u64(x: &BitString) -> Option<u64> {
    index(x).to_u64()
}

/// Code of a pair of naturals under `y + (x+y+1)(x+y)/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PairCode(pub BigUint);

impl PairCode {
    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn unpair(&self) -> (BigUint, BigUint) {
        unpair(&self.0)
    }
}

pub fn pair(x: &BigUint, y: &BigUint) -> PairCode {
    let s = x + y;
    let tri = (&s + 1u32) * &s / 2u32;
    PairCode(y + tri)
}

/// Inverse of [`pair`]: finds the diagonal `s = x + y` containing `z`.
pub fn unpair(z: &BigUint) -> (BigUint, BigUint) {
    // largest s with s(s+1)/2 <= z
    let disc: BigUint = z * 8u32 + 1u32;
    let mut s = (disc.sqrt() - 1u32) / 2u32;
    let tri = |s: &BigUint| (s + 1u32) * s / 2u32;
    while tri(&s) > *z {
        s -= 1u32;
    }
    while tri(&(&s + 1u32)) <= *z {
        s += 1u32;
    }
    let y = z - tri(&s);
    let x = &s - &y;
    (x, y)
}

/// Bitwise exclusive or of two equal-length strings.
pub fn xor(v: &BitString, u: &BitString) -> Result<BitString, BitError> {
    if v.len() != u.len() {
        return Err(BitError::LengthMismatch {
            left: v.len(),
            right: u.len(),
        });
    }
    Ok(BitString::from_bits(
        v.bits().iter().zip(u.bits()).map(|(a, b)| a ^ b).collect(),
    ))
}

/// `ceil(log2 n)`, with `n <= 1` mapping to 0.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

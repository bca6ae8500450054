//! Reference oracles shared by the integration tests and the acceptance
//! harness. Nothing here calls into the crate's machine or search code: the
//! interpreter below is written straight from the opcode table and runs a
//! whole program without budget, pruning or resumable state.

#![allow(dead_code)]

use std::collections::HashMap;

/// Output bits beyond this count are treated as a fault.
const REF_TAPE: usize = 1 << 20;

/// A finished run of the reference interpreter.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RefRun {
    pub output: Vec<bool>,
    pub steps: u64,
}

/// `index(y)` in length-lex order: the binary number `1y` minus one.
pub fn ref_index(y: &[bool]) -> u64 {
    y.iter().fold(1u64, |acc, &b| acc * 2 + b as u64) - 1
}

/// The string with length-lex index `n`.
pub fn ref_string(n: u64) -> Vec<bool> {
    let m = n + 1;
    let width = 64 - m.leading_zeros();
    (0..width - 1).rev().map(|k| m >> k & 1 == 1).collect()
}

pub fn ref_t(a: u64, b: u32, c: u64, n: u64) -> u64 {
    a.saturating_mul(n.saturating_pow(b)).saturating_add(c)
}

/// Runs `code` to completion. `Some` iff it executes HALT having read every
/// bit of `code`; steps are counted without any budget.
pub fn ref_run(code: &[bool], cond: &[bool]) -> Option<RefRun> {
    let mut pos = 0usize;
    let mut take = |n: usize| -> Option<&[bool]> {
        let s = code.get(pos..pos + n)?;
        pos += n;
        Some(s)
    };
    let mut out: Vec<bool> = Vec::new();
    let mut steps = 0u64;
    let mut block: Option<Vec<bool>> = None;
    loop {
        let op = take(3)?.iter().fold(0u8, |a, &b| a * 2 + b as u8);
        steps += 1;
        match op {
            0b000 => break,
            0b001 => out.push(false),
            0b010 => out.push(true),
            0b011 => {
                out.extend_from_slice(cond);
                steps += cond.len() as u64;
            }
            0b100 | 0b101 | 0b110 => {
                // Elias gamma header
                let mut zeros = 0usize;
                while !take(1)?[0] {
                    zeros += 1;
                    if zeros > 62 {
                        return None;
                    }
                }
                let mut value = 1u64;
                for &b in take(zeros)? {
                    value = value * 2 + b as u64;
                }
                match op {
                    0b100 => {
                        let bits = take(value as usize)?.to_vec();
                        out.extend_from_slice(&bits);
                        block = Some(bits);
                        steps += value;
                    }
                    0b101 => {
                        let blk = block.clone()?;
                        if (value as usize).saturating_mul(blk.len()) > REF_TAPE {
                            return None;
                        }
                        for _ in 0..value {
                            out.extend_from_slice(&blk);
                        }
                        steps += value * blk.len() as u64;
                    }
                    _ => {
                        let bits = take(value as usize)?.to_vec();
                        for (i, b) in bits.into_iter().enumerate() {
                            if i < out.len() {
                                out[i] ^= b;
                            } else {
                                out.push(b);
                            }
                        }
                        steps += value;
                    }
                }
            }
            _ => {
                let z = ref_index(cond);
                if z as usize > REF_TAPE {
                    return None;
                }
                out.extend(std::iter::repeat(false).take(z as usize));
                steps += z;
            }
        }
        if out.len() > REF_TAPE {
            return None;
        }
    }
    (pos == code.len()).then_some(RefRun { output: out, steps })
}

/// All bit strings of length exactly `n`, in lexicographic order.
pub fn strings_of_len(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |v| (0..n).rev().map(|k| v >> k & 1 == 1).collect())
}

/// All codes of length `0..=max_len`, shortest first.
pub fn codes_up_to(max_len: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..=max_len).flat_map(strings_of_len)
}

/// Shortest accepted code length for every output reachable by codes of
/// length `<= max_code` within `t(|output|)` steps.
pub fn brute_table(cond: &[bool], (a, b, c): (u64, u32, u64), max_code: usize) -> HashMap<Vec<bool>, usize> {
    let mut best = HashMap::new();
    for code in codes_up_to(max_code) {
        if let Some(r) = ref_run(&code, cond) {
            if r.steps <= ref_t(a, b, c, r.output.len() as u64) {
                best.entry(r.output).or_insert(code.len());
            }
        }
    }
    best
}

/// Brute-force `K^t(x | cond)` over codes of length `<= cap`.
pub fn brute_k(x: &[bool], cond: &[bool], bound: (u64, u32, u64), cap: usize) -> Option<usize> {
    brute_table(cond, bound, cap).get(x).copied()
}

/// Least (lexicographic) `n`-bit string missing from a table.
pub fn least_missing(table: &HashMap<Vec<bool>, usize>, n: usize) -> Vec<bool> {
    strings_of_len(n)
        .find(|s| !table.contains_key(s))
        .expect("counting leaves one string free")
}

pub fn bits(s: &str) -> Vec<bool> {
    s.chars().map(|c| c == '1').collect()
}

pub fn show(b: &[bool]) -> String {
    if b.is_empty() {
        "eps".into()
    } else {
        b.iter().map(|&x| if x { '1' } else { '0' }).collect()
    }
}

/// Least `i <= cap` with `e[i] * denom >= big_e[i]`, by plain scanning over
/// `(numerator, denominator)` pairs.
pub fn linear_scan(e: &[(i128, i128)], big_e: &[(i128, i128)], denom: i128, cap: usize) -> Option<usize> {
    let mut i = 0;
    while i <= cap && i < e.len() && i < big_e.len() {
        let (en, ed) = e[i];
        let (bn, bd) = big_e[i];
        if en * denom * bd >= bn * ed {
            return Some(i);
        }
        i += 1;
    }
    None
}

/// `ceil(log2 n)` with `n <= 1` giving 0.
pub fn ref_ceil_log2(n: u64) -> u64 {
    let mut k = 0;
    while (1u64 << k) < n {
        k += 1;
    }
    k
}

#[test]
fn oracle_self_check() {
    assert_eq!(ref_index(&[]), 0);
    assert_eq!(ref_index(&bits("001")), 8);
    assert_eq!(ref_string(8), bits("001"));
    for n in 0..100 {
        assert_eq!(ref_index(&ref_string(n)), n);
    }
    // LITERAL gamma(2) "01" HALT
    assert_eq!(
        ref_run(&bits("10001001000"), &[]),
        Some(RefRun { output: bits("01"), steps: 4 })
    );
    assert_eq!(ref_run(&bits("000000"), &[]), None);
    assert_eq!(ref_run(&bits("10"), &[]), None);
    assert_eq!(ref_ceil_log2(8), 3);
    assert_eq!(ref_ceil_log2(9), 4);
}

use std::collections::HashSet;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use super::{checked, joint_len, ncd_from_lengths, Compressor, CorpusItem, NcdError};
use crate::exec::{map_ordered, Execution};

/// Square symmetric matrix of exact distances with row/column labels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    entries: Vec<Vec<BigRational>>,
}

/// Count and size of triangle violations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangleAudit {
    /// Ordered triples `(i, j, k)` with `d(i,k) > d(i,j) + d(j,k) + slack`.
    pub violations: usize,
    /// Largest `d(i,k) - d(i,j) - d(j,k)` over all triples, floored at 0.
    pub max_excess: BigRational,
    pub triples: usize,
}

/// Mean off-diagonal distance within and between groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Separation {
    pub within: BigRational,
    pub between: BigRational,
}

impl Separation {
    pub fn is_separated(&self) -> bool {
        self.within < self.between
    }
}

fn check_labels<'a>(labels: impl Iterator<Item = &'a str>) -> Result<usize, NcdError> {
    let mut seen = HashSet::new();
    for l in labels {
        if !seen.insert(l) {
            return Err(NcdError::DuplicateLabel(l.to_string()));
        }
    }
    if seen.len() < 2 {
        return Err(NcdError::TooFewItems(seen.len()));
    }
    Ok(seen.len())
}

impl DistanceMatrix {
    /// Checks labels, shape, symmetry and the value range.
    pub fn new(labels: Vec<String>, entries: Vec<Vec<BigRational>>) -> Result<Self, NcdError> {
        let n = check_labels(labels.iter().map(String::as_str))?;
        let bad = |message: String| NcdError::Parse { line: 0, message };
        if entries.len() != n || entries.iter().any(|r| r.len() != n) {
            return Err(bad(format!("matrix is not {n}x{n}")));
        }
        for i in 0..n {
            for j in 0..n {
                let v = &entries[i][j];
                if v.is_negative() || *v > super::ncd_ceiling() {
                    return Err(bad(format!("entry ({i},{j}) = {v} out of range")));
                }
                if *v != entries[j][i] {
                    return Err(bad(format!("entries ({i},{j}) and ({j},{i}) differ")));
                }
            }
        }
        Ok(Self { labels, entries })
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<BigRational>] {
        &self.entries
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.len()).all(|i| (0..i).all(|j| self.entries[i][j] == self.entries[j][i]))
    }

    /// Label row, then one row per item; entries with 6 fractional digits.
    pub fn to_tsv(&self) -> String {
        let mut s = String::new();
        for l in &self.labels {
            s.push('\t');
            s.push_str(l);
        }
        s.push('\n');
        for (l, row) in self.labels.iter().zip(&self.entries) {
            s.push_str(l);
            for v in row {
                let _ = write!(s, "\t{}", decimal(v, 6));
            }
            s.push('\n');
        }
        s
    }

    /// Inverse of [`Self::to_tsv`]; lines starting with `#` are skipped.
    /// Entries become the exact rationals of their decimal text.
    pub fn from_tsv(text: &str) -> Result<Self, NcdError> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.starts_with('#') && !l.trim().is_empty());
        let err = |line: usize, message: String| NcdError::Parse {
            line: line + 1,
            message,
        };
        let (hl, header) = lines.next().ok_or_else(|| err(0, "empty matrix".into()))?;
        let labels: Vec<String> = header
            .strip_prefix('\t')
            .ok_or_else(|| err(hl, "header must start with a tab".into()))?
            .split('\t')
            .map(str::to_string)
            .collect();
        let mut entries = Vec::new();
        for (i, line) in lines {
            let mut cells = line.split('\t');
            let label = cells.next().unwrap_or_default();
            if labels.get(entries.len()).map(String::as_str) != Some(label) {
                return Err(err(i, format!("row label {label:?} out of order")));
            }
            let row = cells
                .map(|c| parse_decimal(c).ok_or_else(|| err(i, format!("bad entry {c:?}"))))
                .collect::<Result<Vec<_>, _>>()?;
            entries.push(row);
        }
        Self::new(labels, entries)
    }

    pub fn triangle_audit(&self, slack: &BigRational) -> TriangleAudit {
        let n = self.len();
        let d = &self.entries;
        let mut violations = 0;
        let mut max_excess = BigRational::zero();
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let excess = &d[i][k] - &d[i][j] - &d[j][k];
                    if &excess > slack {
                        violations += 1;
                    }
                    if excess > max_excess {
                        max_excess = excess;
                    }
                }
            }
        }
        TriangleAudit {
            violations,
            max_excess,
            triples: n * n * n,
        }
    }

    /// `groups[i]` is the group of item `i`; diagonal entries are excluded.
    pub fn separation(&self, groups: &[usize]) -> Separation {
        assert_eq!(groups.len(), self.len(), "one group per item");
        let (mut ws, mut wn, mut bs, mut bn) = (BigRational::zero(), 0u64, BigRational::zero(), 0u64);
        for i in 0..self.len() {
            for j in 0..i {
                if groups[i] == groups[j] {
                    ws += &self.entries[i][j];
                    wn += 1;
                } else {
                    bs += &self.entries[i][j];
                    bn += 1;
                }
            }
        }
        let mean = |s: BigRational, n: u64| {
            if n == 0 {
                BigRational::zero()
            } else {
                s / BigRational::from_integer(n.into())
            }
        };
        Separation {
            within: mean(ws, wn),
            between: mean(bs, bn),
        }
    }

    /// Same matrix with items reordered: row `i` of the result is row
    /// `order[i]` of `self`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        Self {
            labels: order.iter().map(|&i| self.labels[i].clone()).collect(),
            entries: order
                .iter()
                .map(|&i| order.iter().map(|&j| self.entries[i][j].clone()).collect())
                .collect(),
        }
    }
}

pub fn matrix(corpus: &[CorpusItem], c: &dyn Compressor) -> Result<DistanceMatrix, NcdError> {
    matrix_with(corpus, c, Execution::default())
}

/// All pairwise distances, diagonal included. Each single length is
/// computed once; serial compressors always run sequentially.
pub fn matrix_with(
    corpus: &[CorpusItem],
    c: &dyn Compressor,
    exec: Execution,
) -> Result<DistanceMatrix, NcdError> {
    let n = check_labels(corpus.iter().map(|it| it.label.as_str()))?;
    let exec = if c.is_concurrent() {
        exec
    } else {
        Execution::Sequential
    };
    let single = map_ordered(exec, corpus, |it| c.compressed_len(&it.payload))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j))).collect();
    let joint = map_ordered(exec, &pairs, |&(i, j)| {
        joint_len(&corpus[i].payload, &corpus[j].payload, c)
    });
    let mut entries = vec![vec![BigRational::zero(); n]; n];
    for (&(i, j), cij) in pairs.iter().zip(joint) {
        let v = checked(
            &corpus[i].label,
            &corpus[j].label,
            ncd_from_lengths(single[i], single[j], cij?),
        )?;
        entries[j][i] = v.clone();
        entries[i][j] = v;
    }
    Ok(DistanceMatrix {
        labels: corpus.iter().map(|it| it.label.clone()).collect(),
        entries,
    })
}

/// Decimal rendering with `digits` fractional digits, rounded half away
/// from zero.
pub fn decimal(v: &BigRational, digits: u32) -> String {
    let scale = BigInt::from(10u32).pow(digits);
    let scaled = v.abs() * BigRational::from_integer(scale.clone());
    let rounded = (scaled + BigRational::new(1.into(), 2.into())).floor().to_integer();
    let int = &rounded / &scale;
    let frac = &rounded % &scale;
    let sign = if v.is_negative() && !rounded.is_zero() { "-" } else { "" };
    if digits == 0 {
        return format!("{sign}{int}");
    }
    format!("{sign}{int}.{frac:0>width$}", width = digits as usize)
}

/// Exact rational value of a decimal like `-0.125` or `3`.
pub fn parse_decimal(s: &str) -> Option<BigRational> {
    let s = s.trim();
    let (neg, body) = match s.strip_prefix('-') {
        Some(b) => (true, b),
        None => (false, s),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("0{int}{frac}").parse().ok()?;
    let v = BigRational::new(digits, BigInt::from(10u32).pow(frac.len() as u32));
    Some(if neg { -v } else { v })
}

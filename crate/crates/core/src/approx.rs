//! Finite approximation traces and fluctuation counting.
//!
//! A trace is a finite prefix of a rational approximation sequence
//! `φ(x, 0), φ(x, 1), ...`. A fluctuation is a strict drop
//! `φ(x, k+1) < φ(x, k)`; equal neighbours never count. Only prefixes exist
//! at runtime, so every count here is a lower bound on the fluctuation
//! count of the infinite sequence the prefix was taken from.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TraceError {
    #[error("a trace needs at least one value")]
    Empty,
    #[error("line {line}: cannot parse rational {text:?}")]
    BadRational { line: usize, text: String },
    #[error("missing '# ' label header")]
    MissingHeader,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationTrace {
    values: Vec<BigRational>,
    pub label: String,
}

/// Shape of a trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TraceClass {
    /// Nonincreasing (constant traces land here by convention).
    UpperStyle,
    /// Nondecreasing and not constant.
    LowerStyle,
    /// Neither; carries the fluctuation count.
    Mixed(usize),
}

impl fmt::Display for TraceClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceClass::UpperStyle => f.write_str("upper-style"),
            TraceClass::LowerStyle => f.write_str("lower-style"),
            TraceClass::Mixed(k) => write!(f, "mixed({k})"),
        }
    }
}

impl ApproximationTrace {
    pub fn new(label: impl Into<String>, values: Vec<BigRational>) -> Result<Self, TraceError> {
        if values.is_empty() {
            return Err(TraceError::Empty);
        }
        Ok(Self {
            values,
            label: label.into(),
        })
    }

    /// Convenience for integer-valued traces.
    pub fn from_integers<I>(label: impl Into<String>, values: I) -> Result<Self, TraceError>
    where
        I: IntoIterator,
        I::Item: Into<BigInt>,
    {
        Self::new(
            label,
            values.into_iter().map(|v| BigRational::from_integer(v.into())).collect(),
        )
    }

    pub fn values(&self) -> &[BigRational] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn last(&self) -> &BigRational {
        self.values.last().expect("nonempty by construction")
    }

    pub fn is_nonincreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] <= w[0])
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    /// Serializes as a `# label` header line plus one `n/d` per line.
    pub fn to_text(&self) -> String {
        let mut s = format!("# {}\n", self.label.replace('\n', " "));
        for v in &self.values {
            s.push_str(&format!("{}/{}\n", v.numer(), v.denom()));
        }
        s
    }

    pub fn map_values<F>(&self, label: impl Into<String>, f: F) -> Self
    where
        F: Fn(&BigRational) -> BigRational,
    {
        Self {
            values: self.values.iter().map(f).collect(),
            label: label.into(),
        }
    }
}

impl FromStr for ApproximationTrace {
    type Err = TraceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut lines = s.lines().enumerate();
        let label = match lines.next() {
            Some((_, l)) if l.starts_with('#') => l.trim_start_matches('#').trim().to_string(),
            _ => return Err(TraceError::MissingHeader),
        };
        let mut values = Vec::new();
        for (i, line) in lines {
            let t = line.trim();
            if t.is_empty() {
                continue;
            }
            values.push(parse_rational(t).ok_or_else(|| TraceError::BadRational {
                line: i + 1,
                text: t.to_string(),
            })?);
        }
        Self::new(label, values)
    }
}

/// Parses `n/d` or a bare integer.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            if d.is_positive() || d.is_negative() {
                Some(BigRational::new(n, d))
            } else {
                None
            }
        }
        None => s.trim().parse::<BigInt>().ok().map(BigRational::from_integer),
    }
}

/// Number of `k` with `values[k+1] < values[k]`.
pub fn fluctuation_count(trace: &ApproximationTrace) -> usize {
    trace.values.windows(2).filter(|w| w[1] < w[0]).count()
}

/// True iff the trace has at most `n - 1` fluctuations.
///
/// # Panics
///
/// When `n == 0`.
pub fn is_n_approx(trace: &ApproximationTrace, n: usize) -> bool {
    assert!(n >= 1, "n-approximability starts at n = 1");
    fluctuation_count(trace) < n
}

pub fn classify(trace: &ApproximationTrace) -> TraceClass {
    if trace.is_nonincreasing() {
        TraceClass::UpperStyle
    } else if trace.is_nondecreasing() {
        TraceClass::LowerStyle
    } else {
        TraceClass::Mixed(fluctuation_count(trace))
    }
}

/// `1 / v` for a positive rational.
pub(crate) fn recip(v: &BigRational) -> BigRational {
    BigRational::one() / v
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn tr(v: &[i64]) -> ApproximationTrace {
        ApproximationTrace::from_integers("t", v.iter().copied()).unwrap()
    }

    #[test]
    fn counts() {
        assert_eq!(fluctuation_count(&tr(&[5, 4, 4, 3])), 2);
        assert_eq!(fluctuation_count(&tr(&[1, 1, 1])), 0);
        assert_eq!(fluctuation_count(&tr(&[0, 1, 0, 1, 0])), 2);
    }

    #[test]
    fn n_approx_thresholds() {
        assert!(is_n_approx(&tr(&[0, 1, 2, 2, 7]), 1));
        assert!(!is_n_approx(&tr(&[0, 1, 0]), 1));
        assert!(is_n_approx(&tr(&[0, 1, 0]), 2));
    }

    #[test]
    #[should_panic]
    fn n_zero_panics() {
        is_n_approx(&tr(&[1]), 0);
    }

    #[test]
    fn classification() {
        assert_eq!(classify(&tr(&[3, 3, 3])), TraceClass::UpperStyle);
        assert_eq!(classify(&tr(&[9, 7, 7, 2])), TraceClass::UpperStyle);
        assert_eq!(classify(&tr(&[1, 2, 2])), TraceClass::LowerStyle);
        assert_eq!(classify(&tr(&[0, 1, 0])), TraceClass::Mixed(1));
        assert_eq!(TraceClass::Mixed(3).to_string(), "mixed(3)");
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(ApproximationTrace::new("x", vec![]), Err(TraceError::Empty));
    }

    #[test]
    fn text_format() {
        let t = ApproximationTrace::new(
            "K upper trace",
            vec![
                BigRational::new(3.into(), 7.into()),
                BigRational::from_integer(2.into()),
                BigRational::new((-1).into(), 2.into()),
            ],
        )
        .unwrap();
        let text = t.to_text();
        assert_eq!(text, "# K upper trace\n3/7\n2/1\n-1/2\n");
        assert_eq!(text.parse::<ApproximationTrace>().unwrap(), t);
        assert!(matches!("3/7\n".parse::<ApproximationTrace>(), Err(TraceError::MissingHeader)));
        assert!(matches!(
            "# x\n1/0\n".parse::<ApproximationTrace>(),
            Err(TraceError::BadRational { line: 2, .. })
        ));
    }

    proptest! {
        #[test]
        fn sorted_ascending_has_no_fluctuation(mut v in prop::collection::vec(-50i64..50, 1..30)) {
            v.sort_unstable();
            prop_assert_eq!(fluctuation_count(&tr(&v)), 0);
            // strictly descending drops at every step
            v.dedup();
            v.reverse();
            prop_assert_eq!(fluctuation_count(&tr(&v)), v.len() - 1);
        }

        #[test]
        fn rescale_and_append_invariance(v in prop::collection::vec(-50i64..50, 1..30), scale in 1i64..20) {
            let t = tr(&v);
            let k = fluctuation_count(&t);
            let scaled = t.map_values("s", |x| x * BigRational::from_integer(scale.into()));
            prop_assert_eq!(fluctuation_count(&scaled), k);
            let mut w = v.clone();
            w.push(*v.last().unwrap());
            prop_assert_eq!(fluctuation_count(&tr(&w)), k);
        }

        #[test]
        fn n_approx_monotone_in_n(v in prop::collection::vec(0i64..4, 1..20), n in 1usize..10) {
            let t = tr(&v);
            if is_n_approx(&t, n) {
                prop_assert!(is_n_approx(&t, n + 1));
            }
        }

        #[test]
        fn alternating_starting_high(m in 0usize..20) {
            let v: Vec<i64> = (0..2 * m + 1).map(|i| if i % 2 == 0 { 1 } else { 0 }).collect();
            prop_assert_eq!(fluctuation_count(&tr(&v)), m);
        }
    }
}

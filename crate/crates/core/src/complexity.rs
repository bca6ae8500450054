//! Time-bounded complexities on the prefix machine.
//!
//! `K^t(x|y)` is the length of the shortest accepted program that prints `x`
//! on conditional `y` within `t(|x|)` steps, searched over codes up to a
//! length cap. `E^t(x,y)` is the larger of the two directions. Raising the
//! time bound or the cap can only shrink these values, so a growing schedule
//! of `(bound, cap)` pairs yields a nonincreasing trace: a finite prefix of
//! an approximation from above.
//!
//! [`nid_time`] is the time-bounded ratio `E^t(x,y) / max(K^t(x), K^t(y))`.
//! It is a surrogate only. The true normalized information distance has no
//! semicomputable approximation, so this value carries no convergence
//! guarantee in either direction as bounds grow.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::approx::ApproximationTrace;
use crate::bitcore::BitString;
use crate::exec::{map_ordered, Execution};
use crate::prefix_machine::{walk, Program, StepBound, Walk};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ComplexityError {
    #[error("no accepted program of length <= {cap} prints {} on {} within t={bound}", target.human(), conditional.human())]
    NoWitness {
        target: BitString,
        conditional: BitString,
        bound: StepBound,
        cap: usize,
    },
    #[error("schedule must be nonempty and nondecreasing in bound and cap (entry {0})")]
    InvalidSchedule(usize),
}

/// A `K^t` value with the program that realizes it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityEstimate {
    pub target: BitString,
    pub conditional: BitString,
    pub value: usize,
    pub witness: Program,
    pub steps_used: u64,
    pub bound: StepBound,
    pub search_cap: usize,
}

impl ComplexityEstimate {
    /// One-line `key=value` record; ε is an empty field.
    pub fn to_record(&self) -> String {
        format!(
            "x={} y={} a={} b={} c={} cap={} value={} witness={} steps={}",
            self.target,
            self.conditional,
            self.bound.a,
            self.bound.b,
            self.bound.c,
            self.search_cap,
            self.value,
            self.witness.code,
            self.steps_used
        )
    }
}

impl fmt::Display for ComplexityEstimate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "K^t({} | {}) = {} via {} (t={}, cap {})",
            self.target.human(),
            self.conditional.human(),
            self.value,
            self.witness.code.human(),
            self.bound,
            self.search_cap
        )
    }
}

/// One step of an approximation schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScheduleEntry {
    pub bound: StepBound,
    pub cap: usize,
}

impl ScheduleEntry {
    pub fn new(bound: StepBound, cap: usize) -> Self {
        Self { bound, cap }
    }
}

pub fn validate_schedule(schedule: &[ScheduleEntry]) -> Result<(), ComplexityError> {
    if schedule.is_empty() {
        return Err(ComplexityError::InvalidSchedule(0));
    }
    for (i, w) in schedule.windows(2).enumerate() {
        if !w[0].bound.dominated_by(&w[1].bound) || w[1].cap < w[0].cap {
            return Err(ComplexityError::InvalidSchedule(i + 1));
        }
    }
    Ok(())
}

pub fn k_time(
    x: &BitString,
    y: &BitString,
    bound: &StepBound,
    search_cap: usize,
) -> Result<ComplexityEstimate, ComplexityError> {
    k_time_with(x, y, bound, search_cap, Execution::default())
}

/// Branch-and-bound search for the least (length, then length-lex) accepted
/// program printing `x`.
pub fn k_time_with(
    x: &BitString,
    y: &BitString,
    bound: &StepBound,
    search_cap: usize,
    exec: Execution,
) -> Result<ComplexityEstimate, ComplexityError> {
    let budget = bound.t(x.len() as u64);
    let best = AtomicUsize::new(usize::MAX);
    let w = Walk {
        cond: y,
        budget,
        cap: search_cap,
        out_limit: x.len(),
        min_output: x.len(),
    };
    let hits = walk(
        &w,
        exec,
        |code, m| {
            if m.output() == x.bits() {
                best.fetch_min(code.len(), Ordering::Relaxed);
                Some(m.steps())
            } else {
                None
            }
        },
        |min_total| min_total > best.load(Ordering::Relaxed),
    );
    hits.into_iter()
        .next()
        .map(|(code, steps)| ComplexityEstimate {
            target: x.clone(),
            conditional: y.clone(),
            value: code.len(),
            witness: Program::new(code),
            steps_used: steps,
            bound: *bound,
            search_cap,
        })
        .ok_or_else(|| ComplexityError::NoWitness {
            target: x.clone(),
            conditional: y.clone(),
            bound: *bound,
            cap: search_cap,
        })
}

/// `K^t(x|y)` for every `x` up to a length, from a single walk.
#[derive(Debug, Clone)]
pub struct ConditionalTable {
    pub conditional: BitString,
    pub bound: StepBound,
    pub search_cap: usize,
    pub max_len: usize,
    entries: BTreeMap<BitString, ComplexityEstimate>,
}

impl ConditionalTable {
    pub fn build(y: &BitString, bound: &StepBound, search_cap: usize, max_len: usize) -> Self {
        Self::build_with(y, bound, search_cap, max_len, Execution::default())
    }

    pub fn build_with(
        y: &BitString,
        bound: &StepBound,
        search_cap: usize,
        max_len: usize,
        exec: Execution,
    ) -> Self {
        let w = Walk {
            cond: y,
            budget: bound.t(max_len as u64),
            cap: search_cap,
            out_limit: max_len,
            min_output: 0,
        };
        let hits = walk(
            &w,
            exec,
            |_, m| {
                (m.steps() <= bound.t(m.output_len() as u64))
                    .then(|| (BitString::from_bits(m.output().to_vec()), m.steps()))
            },
            |_| false,
        );
        let mut entries = BTreeMap::new();
        // hits are in length-lex code order, so the first per output wins
        for (code, (out, steps)) in hits {
            entries.entry(out.clone()).or_insert_with(|| ComplexityEstimate {
                target: out,
                conditional: y.clone(),
                value: code.len(),
                witness: Program::new(code),
                steps_used: steps,
                bound: *bound,
                search_cap,
            });
        }
        Self {
            conditional: y.clone(),
            bound: *bound,
            search_cap,
            max_len,
            entries,
        }
    }

    /// # Panics
    ///
    /// When `x` is longer than the table's `max_len`.
    pub fn get(&self, x: &BitString) -> Result<&ComplexityEstimate, ComplexityError> {
        assert!(x.len() <= self.max_len, "target longer than table range");
        self.entries.get(x).ok_or_else(|| ComplexityError::NoWitness {
            target: x.clone(),
            conditional: self.conditional.clone(),
            bound: self.bound,
            cap: self.search_cap,
        })
    }

    pub fn value(&self, x: &BitString) -> Option<usize> {
        self.entries.get(x).map(|e| e.value)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ComplexityEstimate> {
        self.entries.values()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `max(K^t(x|y), K^t(y|x))`.
pub fn e_time(
    x: &BitString,
    y: &BitString,
    bound: &StepBound,
    search_cap: usize,
) -> Result<usize, ComplexityError> {
    let xy = k_time(x, y, bound, search_cap)?;
    let yx = k_time(y, x, bound, search_cap)?;
    Ok(xy.value.max(yx.value))
}

fn trace_values(
    x: &BitString,
    y: &BitString,
    schedule: &[ScheduleEntry],
) -> Result<Vec<usize>, ComplexityError> {
    validate_schedule(schedule)?;
    let first = k_time(x, y, &schedule[0].bound, schedule[0].cap)?;
    let rest = map_ordered(Execution::default(), &schedule[1..], |e| {
        k_time_with(x, y, &e.bound, e.cap, Execution::Sequential).map(|k| k.value)
    });
    let mut values = vec![first.value];
    for v in rest {
        values.push(v?);
    }
    Ok(values)
}

/// `K^t(x|y)` along a growing schedule: nonincreasing by construction.
pub fn k_upper_trace(
    x: &BitString,
    y: &BitString,
    schedule: &[ScheduleEntry],
) -> Result<ApproximationTrace, ComplexityError> {
    let values = trace_values(x, y, schedule)?;
    Ok(ApproximationTrace::from_integers(
        format!("K^t({}|{}) upper trace", x.human(), y.human()),
        values.into_iter().map(|v| BigInt::from(v as u64)),
    )
    .expect("schedule is nonempty"))
}

/// `E^t(x,y)` along a growing schedule: pointwise max of both directions.
pub fn e_upper_trace(
    x: &BitString,
    y: &BitString,
    schedule: &[ScheduleEntry],
) -> Result<ApproximationTrace, ComplexityError> {
    let xy = trace_values(x, y, schedule)?;
    let yx = trace_values(y, x, schedule)?;
    Ok(ApproximationTrace::from_integers(
        format!("E^t({},{}) upper trace", x.human(), y.human()),
        xy.iter().zip(&yx).map(|(a, b)| BigInt::from(*a.max(b) as u64)),
    )
    .expect("schedule is nonempty"))
}

/// Time-bounded normalized distance `E^t(x,y) / max(K^t(x), K^t(y))`.
pub fn nid_time(
    x: &BitString,
    y: &BitString,
    bound: &StepBound,
    search_cap: usize,
) -> Result<BigRational, ComplexityError> {
    let eps = BitString::empty();
    let e = e_time(x, y, bound, search_cap)?;
    let kx = k_time(x, &eps, bound, search_cap)?.value;
    let ky = k_time(y, &eps, bound, search_cap)?.value;
    // every accepted program reads at least one opcode, so kx, ky >= 3
    Ok(BigRational::new(
        BigInt::from(e as u64),
        BigInt::from(kx.max(ky) as u64),
    ))
}

//! Desk-scale runs of the diagonal constructions behind the
//! non-semicomputability argument for the normalized information distance.
//!
//! - [`diagonal_u`]: the least `n`-bit string that no program shorter than
//!   `n` prints within `t'(n)` steps, with the conditional carrying `n`.
//! - [`random_v`]: the least `n`-bit string with `K^t(v | n) >= n`.
//! - [`xor_pair`]: `w = v XOR u`, an explicit short `v <-> w` program and the
//!   measured `E^t(v, w)`.
//! - [`threshold_search`] / [`s_of_n`]: the least index at which a
//!   nondecreasing trace `e_i` clears `E_i / (n + 2·ceil(log2 n) + c)`, and its
//!   maximum over all pairs of a given length.
//! - [`diagonal_nid`]: `1 / K^t(x)` along a schedule.
//!
//! The threshold machinery is real but its input is hypothetical: a
//! computable nondecreasing approximation of the true distance cannot exist,
//! so the search runs on caller-supplied traces. [`nid_surrogate_traces`]
//! builds the ones shipped with the crate. Nothing here certifies the
//! asymptotic statements; the outputs are finite trends on one frozen
//! machine table.

use num_bigint::BigInt;
use num_rational::BigRational;
use thiserror::Error;

use crate::approx::{recip, ApproximationTrace};
use crate::bitcore::{ceil_log2, string_of_u64, xor, BitString};
use crate::complexity::{
    e_time, e_upper_trace, k_time, k_upper_trace, ComplexityError, ConditionalTable,
    ScheduleEntry,
};
use crate::exec::{map_ordered, Execution};
use crate::prefix_machine::{assemble, literal_bound, run, Instr, Program, StepBound};

/// Largest `n` accepted by the enumeration-based constructions.
pub const ENUMERATION_LIMIT: usize = 16;
/// Largest `n` for [`s_of_n`], which visits all `2^(2n)` pairs.
pub const PAIR_SWEEP_LIMIT: usize = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("n = {n} is outside the feasible range 1..={limit}")]
    Infeasible { n: usize, limit: usize },
    #[error("trace {which} is not {expected} at index {index}")]
    MalformedTrace {
        which: &'static str,
        expected: &'static str,
        index: usize,
    },
    #[error("post-verification failed: {0}")]
    Verification(String),
    #[error(transparent)]
    Complexity(#[from] ComplexityError),
}

/// The conditional that carries a length: `n` in length-lex indexing.
pub fn encode_length(n: usize) -> BitString {
    string_of_u64(n as u64)
}

fn check_feasible(n: usize, limit: usize) -> Result<(), ConstructionError> {
    if n == 0 || n > limit {
        Err(ConstructionError::Infeasible { n, limit })
    } else {
        Ok(())
    }
}

/// Least `n`-bit string not printed by any code shorter than `n`.
fn least_unprinted(n: usize, bound: &StepBound) -> BitString {
    let cond = encode_length(n);
    let table = ConditionalTable::build(&cond, bound, n - 1, n);
    BitString::all_of_length(n)
        .find(|s| table.value(s).is_none())
        .expect("fewer than 2^n codes are shorter than n")
}

pub fn diagonal_u(n: usize, bound_prime: &StepBound) -> Result<BitString, ConstructionError> {
    check_feasible(n, ENUMERATION_LIMIT)?;
    Ok(least_unprinted(n, bound_prime))
}

/// Codes shorter than `n` that print `u` within `bound_prime.t(n)` steps,
/// found by running every code directly. Empty for a correct diagonal string.
pub fn diagonal_violations(u: &BitString, n: usize, bound_prime: &StepBound) -> Vec<Program> {
    let cond = encode_length(n);
    let budget = bound_prime.t(n as u64);
    (0..n)
        .flat_map(BitString::all_of_length)
        .filter(|code| {
            let r = run(code, &cond, budget);
            r.is_accepted_within(code.len(), bound_prime) && r.output == *u
        })
        .map(Program::new)
        .collect()
}

/// Least `n`-bit `v` with `K^t(v | n) >= n`; the result is re-checked with
/// [`k_time`] at `search_cap`.
pub fn random_v(n: usize, bound: &StepBound, search_cap: usize) -> Result<BitString, ConstructionError> {
    check_feasible(n, ENUMERATION_LIMIT)?;
    let v = least_unprinted(n, bound);
    match k_time(&v, &encode_length(n), bound, search_cap) {
        Ok(k) if k.value < n => Err(ConstructionError::Verification(format!(
            "K^t({}|n) = {} < {n}",
            v.human(),
            k.value
        ))),
        Ok(_) | Err(ComplexityError::NoWitness { .. }) => Ok(v),
        Err(e) => Err(e.into()),
    }
}

/// `COPYCOND XORLIT(u) HALT`: maps `v` to `v XOR u` and back.
pub fn xor_witness(u: &BitString) -> Program {
    assert!(!u.is_empty(), "xor witness needs a nonempty mask");
    Program::new(assemble(&[Instr::CopyCond, Instr::XorLit(u.clone()), Instr::Halt]))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapReport {
    pub n: usize,
    pub v: BitString,
    pub u: BitString,
    pub w: BitString,
    pub witness: Program,
    /// Length of [`Self::witness`], the measured stand-in for the small `E(v, w)`.
    pub e_upper_witness_len: usize,
    /// Measured `E^t(v, w)`.
    pub e_t_value: usize,
    pub bound: StepBound,
    pub bound_prime: StepBound,
    pub search_cap: usize,
}

impl GapReport {
    pub fn to_record(&self) -> String {
        format!(
            "n={} v={} u={} w={} witness={} e_upper_witness_len={} e_t_value={} a={} b={} c={} a_prime={} b_prime={} c_prime={} cap={}",
            self.n,
            self.v,
            self.u,
            self.w,
            self.witness.code,
            self.e_upper_witness_len,
            self.e_t_value,
            self.bound.a,
            self.bound.b,
            self.bound.c,
            self.bound_prime.a,
            self.bound_prime.b,
            self.bound_prime.c,
            self.search_cap
        )
    }
}

pub fn xor_pair(
    n: usize,
    bound: &StepBound,
    bound_prime: &StepBound,
    search_cap: usize,
) -> Result<GapReport, ConstructionError> {
    let v = random_v(n, bound, search_cap)?;
    let u = diagonal_u(n, bound_prime)?;
    let w = xor(&v, &u).expect("both strings have length n");
    let witness = xor_witness(&u);
    let budget = bound.t(n as u64);
    for (from, to) in [(&v, &w), (&w, &v)] {
        let r = run(&witness.code, from, budget);
        if !r.is_accepted_within(witness.len(), bound) || r.output != *to {
            return Err(ConstructionError::Verification(format!(
                "xor witness does not map {} to {}",
                from.human(),
                to.human()
            )));
        }
    }
    let e_t_value = e_time(&v, &w, bound, search_cap)?;
    Ok(GapReport {
        n,
        e_upper_witness_len: witness.len(),
        v,
        u,
        w,
        witness,
        e_t_value,
        bound: *bound,
        bound_prime: *bound_prime,
        search_cap,
    })
}

/// [`xor_pair`] over a range of lengths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GapSweep {
    pub reports: Vec<GapReport>,
    /// Least `n` from which the witness is shorter than `E^t` for every
    /// larger `n` in the sweep.
    pub n0: Option<usize>,
    /// `e_t_value` nondecreasing in `n` and strictly larger at the top.
    pub trend_holds: bool,
    /// Witness length at the largest `n` minus at the smallest.
    pub witness_growth: usize,
}

pub fn gap_sweep(
    ns: std::ops::RangeInclusive<usize>,
    bound: &StepBound,
    bound_prime: &StepBound,
    search_cap: usize,
) -> Result<GapSweep, ConstructionError> {
    let ns: Vec<usize> = ns.collect();
    let reports = map_ordered(Execution::default(), &ns, |&n| {
        xor_pair(n, bound, bound_prime, search_cap)
    })
    .into_iter()
    .collect::<Result<Vec<_>, _>>()?;
    let e: Vec<usize> = reports.iter().map(|r| r.e_t_value).collect();
    let trend_holds = !e.is_empty()
        && e.windows(2).all(|w| w[0] <= w[1])
        && e.last() > e.first();
    let n0 = (0..reports.len())
        .find(|&i| reports[i..].iter().all(|r| r.e_upper_witness_len < r.e_t_value))
        .map(|i| reports[i].n);
    let witness_growth = match (reports.first(), reports.last()) {
        (Some(a), Some(b)) => b.e_upper_witness_len.saturating_sub(a.e_upper_witness_len),
        _ => 0,
    };
    Ok(GapSweep {
        reports,
        n0,
        trend_holds,
        witness_growth,
    })
}

/// `n + 2·ceil(log2 n) + c`.
pub fn threshold_denominator(n: usize, c: u64) -> u64 {
    n as u64 + 2 * ceil_log2(n as u64) as u64 + c
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdResult {
    pub n: usize,
    /// `None` when no index up to the step cap qualifies.
    pub index: Option<usize>,
    pub c: u64,
    pub denominator: u64,
    pub trace_e: ApproximationTrace,
    pub trace_big_e: ApproximationTrace,
}

impl ThresholdResult {
    pub fn is_exhausted(&self) -> bool {
        self.index.is_none()
    }

    pub fn to_record(&self) -> String {
        let index = self
            .index
            .map_or_else(|| "exhausted".to_string(), |i| i.to_string());
        format!(
            "n={} c={} denominator={} index={} e_len={} E_len={}",
            self.n,
            self.c,
            self.denominator,
            index,
            self.trace_e.len(),
            self.trace_big_e.len()
        )
    }
}

/// Least `i <= step_cap` with `trace_e[i] >= trace_big_e[i] / denominator`.
/// Indices past the end of either trace are not examined.
pub fn threshold_search(
    n: usize,
    trace_e: &ApproximationTrace,
    trace_big_e: &ApproximationTrace,
    c: u64,
    step_cap: usize,
) -> Result<ThresholdResult, ConstructionError> {
    if let Some(i) = first_break(trace_e, |a, b| b >= a) {
        return Err(ConstructionError::MalformedTrace {
            which: "e",
            expected: "nondecreasing",
            index: i,
        });
    }
    if let Some(i) = first_break(trace_big_e, |a, b| b <= a) {
        return Err(ConstructionError::MalformedTrace {
            which: "E",
            expected: "nonincreasing",
            index: i,
        });
    }
    let denominator = threshold_denominator(n, c);
    let d = BigRational::from_integer(BigInt::from(denominator));
    let last = step_cap.min(trace_e.len() - 1).min(trace_big_e.len() - 1);
    let index = (0..=last).find(|&i| &trace_e.values()[i] * &d >= trace_big_e.values()[i]);
    Ok(ThresholdResult {
        n,
        index,
        c,
        denominator,
        trace_e: trace_e.clone(),
        trace_big_e: trace_big_e.clone(),
    })
}

fn first_break(t: &ApproximationTrace, ok: impl Fn(&BigRational, &BigRational) -> bool) -> Option<usize> {
    t.values().windows(2).position(|w| !ok(&w[0], &w[1])).map(|i| i + 1)
}

/// Maximum threshold index over all pairs of `n`-bit strings; `None` when
/// some pair exhausts.
pub fn s_of_n<F>(n: usize, trace_supplier: F, c: u64, step_cap: usize) -> Result<Option<usize>, ConstructionError>
where
    F: Fn(&BitString, &BitString) -> Result<(ApproximationTrace, ApproximationTrace), ConstructionError>
        + Sync
        + Send,
{
    s_of_n_with(n, trace_supplier, c, step_cap, Execution::default())
}

pub fn s_of_n_with<F>(
    n: usize,
    trace_supplier: F,
    c: u64,
    step_cap: usize,
    exec: Execution,
) -> Result<Option<usize>, ConstructionError>
where
    F: Fn(&BitString, &BitString) -> Result<(ApproximationTrace, ApproximationTrace), ConstructionError>
        + Sync
        + Send,
{
    check_feasible(n, PAIR_SWEEP_LIMIT)?;
    let strings: Vec<BitString> = BitString::all_of_length(n).collect();
    let pairs: Vec<(BitString, BitString)> = strings
        .iter()
        .flat_map(|x| strings.iter().map(move |y| (x.clone(), y.clone())))
        .collect();
    let results = map_ordered(exec, &pairs, |(x, y)| {
        let (e, big_e) = trace_supplier(x, y)?;
        threshold_search(n, &e, &big_e, c, step_cap).map(|r| r.index)
    });
    let mut s = Some(0);
    for r in results {
        match (r?, s) {
            (Some(i), Some(cur)) => s = Some(cur.max(i)),
            _ => s = None,
        }
    }
    Ok(s)
}

/// `1 / K^t(x)` along a growing schedule; nondecreasing by construction.
pub fn diagonal_nid(x: &BitString, schedule: &[ScheduleEntry]) -> Result<ApproximationTrace, ConstructionError> {
    let k = k_upper_trace(x, &BitString::empty(), schedule)?;
    Ok(k.map_values(format!("1/K^t({}) diagonal trace", x.human()), recip))
}

/// Surrogate inputs for [`threshold_search`] on a pair:
/// `E_i` is the `E^t` upper trace, and `e_i` is the running maximum of
/// `E_i · min(1/K_i(x), 1/K_i(y))` built from the two [`diagonal_nid`] traces.
pub fn nid_surrogate_traces(
    x: &BitString,
    y: &BitString,
    schedule: &[ScheduleEntry],
) -> Result<(ApproximationTrace, ApproximationTrace), ConstructionError> {
    let big_e = e_upper_trace(x, y, schedule)?;
    let dx = diagonal_nid(x, schedule)?;
    let dy = diagonal_nid(y, schedule)?;
    let mut running: Option<BigRational> = None;
    let values = big_e
        .values()
        .iter()
        .zip(dx.values().iter().zip(dy.values()))
        .map(|(e, (a, b))| {
            let v = e * a.min(b);
            let v = match running.take() {
                Some(r) if r > v => r,
                _ => v,
            };
            running = Some(v.clone());
            v
        })
        .collect();
    let e = ApproximationTrace::new(
        format!("running-max NID surrogate({},{})", x.human(), y.human()),
        values,
    )
    .expect("schedule is nonempty");
    Ok((e, big_e))
}

/// A schedule of `len` entries growing from `bound` by `step` in the constant
/// term, at a fixed cap large enough for literal programs of `max_len` bits.
pub fn linear_schedule(bound: &StepBound, step: u64, len: usize, max_len: usize) -> Vec<ScheduleEntry> {
    (0..len as u64)
        .map(|i| {
            ScheduleEntry::new(
                StepBound::new(bound.a, bound.b, bound.c + i * step),
                literal_bound(max_len),
            )
        })
        .collect()
}

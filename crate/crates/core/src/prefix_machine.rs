//! A deterministic prefix-free toy machine with step-bounded execution.
//!
//! The machine reads its program strictly on demand, left to right, in
//! 3-bit opcode groups. It has a read-only conditional tape, a write-only
//! output tape (which `XORLIT` may also rewrite in place) and a small fixed
//! working state. A run is accepted as a halting program only when it
//! executes `HALT` after consuming exactly every bit of its code, so the set
//! of accepted codes is prefix-free.
//!
//! The machine is complete (every string has a literal program of length
//! `|x| + O(log |x|)`) but it is **not universal**: it cannot simulate other
//! machines, so quantities measured on it are desk-scale stand-ins for the
//! complexities defined over a universal reference machine.
//!
//! Frozen opcode table (version [`MACHINE_TABLE_VERSION`]):
//!
//! | code | name     | effect                                                        | steps       |
//! |------|----------|---------------------------------------------------------------|-------------|
//! | 000  | HALT     | stop                                                          | 1           |
//! | 001  | WRITE0   | append 0                                                      | 1           |
//! | 010  | WRITE1   | append 1                                                      | 1           |
//! | 011  | COPYCOND | append the whole conditional tape                             | 1 + \|y\|   |
//! | 100  | LITERAL  | header `L`, then copy the next `L` program bits to the output | 1 + L       |
//! | 101  | REPEAT   | header `k`, append the last LITERAL block `k` more times      | 1 + k·\|blk\| |
//! | 110  | XORLIT   | header `L`, XOR the next `L` program bits onto output cells `0..L`, appending past the end | 1 + L |
//! | 111  | ZEROS    | append `index(y)` zeros (the conditional read as a number)    | 1 + index(y) |
//!
//! Headers are Elias-gamma codes of a positive integer: `z` zeros, then the
//! `z + 1` bit binary expansion. `REPEAT` without an earlier `LITERAL` faults,
//! and so does running off the end of the program.

use num_traits::ToPrimitive;

use crate::bitcore::{index, BitString};
use crate::exec::Execution;

pub const MACHINE_TABLE_VERSION: u32 = 1;
pub const OPCODE_WIDTH: usize = 3;
/// Additive constant of the literal upper bound
/// `|x| + 2·ceil(log2(|x|+2)) + LITERAL_OVERHEAD`.
pub const LITERAL_OVERHEAD: usize = 7;
/// Length of `COPYCOND HALT`.
pub const COPY_PROGRAM_LEN: usize = 6;
/// Output tape capacity in bits; writing past it faults.
pub const MAX_TAPE: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Opcode {
    Halt,
    Write0,
    Write1,
    CopyCond,
    Literal,
    Repeat,
    XorLit,
    Zeros,
}

impl Opcode {
    pub const ALL: [Opcode; 8] = [
        Opcode::Halt,
        Opcode::Write0,
        Opcode::Write1,
        Opcode::CopyCond,
        Opcode::Literal,
        Opcode::Repeat,
        Opcode::XorLit,
        Opcode::Zeros,
    ];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(c: u8) -> Opcode {
        Opcode::ALL[(c & 0b111) as usize]
    }

    pub fn mnemonic(self) -> &'static str {
        match self {
            Opcode::Halt => "HALT",
            Opcode::Write0 => "WRITE0",
            Opcode::Write1 => "WRITE1",
            Opcode::CopyCond => "COPYCOND",
            Opcode::Literal => "LITERAL",
            Opcode::Repeat => "REPEAT",
            Opcode::XorLit => "XORLIT",
            Opcode::Zeros => "ZEROS",
        }
    }
}

/// Elias-gamma code of `n >= 1`.
pub fn gamma_encode(n: u64) -> Vec<bool> {
    assert!(n >= 1, "gamma code is defined for positive integers");
    let width = 64 - n.leading_zeros() as usize;
    let mut bits = vec![false; width - 1];
    bits.extend((0..width).rev().map(|i| (n >> i) & 1 == 1));
    bits
}

pub fn gamma_len(n: u64) -> usize {
    2 * (64 - n.leading_zeros() as usize) - 1
}

/// One assembler instruction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instr {
    Halt,
    Write0,
    Write1,
    CopyCond,
    Literal(BitString),
    Repeat(u64),
    XorLit(BitString),
    Zeros,
}

/// Assembles instructions into program bits.
///
/// # Panics
///
/// On an empty `Literal`/`XorLit` block or a zero `Repeat` count, which have
/// no gamma encoding.
pub fn assemble(instrs: &[Instr]) -> BitString {
    let mut bits = Vec::new();
    let op = |bits: &mut Vec<bool>, o: Opcode| {
        let c = o.code();
        bits.extend([(c >> 2) & 1 == 1, (c >> 1) & 1 == 1, c & 1 == 1]);
    };
    for ins in instrs {
        match ins {
            Instr::Halt => op(&mut bits, Opcode::Halt),
            Instr::Write0 => op(&mut bits, Opcode::Write0),
            Instr::Write1 => op(&mut bits, Opcode::Write1),
            Instr::CopyCond => op(&mut bits, Opcode::CopyCond),
            Instr::Zeros => op(&mut bits, Opcode::Zeros),
            Instr::Literal(block) | Instr::XorLit(block) => {
                let o = if matches!(ins, Instr::Literal(_)) {
                    Opcode::Literal
                } else {
                    Opcode::XorLit
                };
                op(&mut bits, o);
                bits.extend(gamma_encode(block.len() as u64));
                bits.extend_from_slice(block.bits());
            }
            Instr::Repeat(k) => {
                op(&mut bits, Opcode::Repeat);
                bits.extend(gamma_encode(*k));
            }
        }
    }
    BitString::from_bits(bits)
}

/// The canonical literal program `LITERAL x HALT` (just `HALT` for ε).
pub fn literal_program(x: &BitString) -> Program {
    if x.is_empty() {
        Program::new(assemble(&[Instr::Halt]))
    } else {
        Program::new(assemble(&[Instr::Literal(x.clone()), Instr::Halt]))
    }
}

/// `COPYCOND HALT`: outputs its conditional.
pub fn copy_program() -> Program {
    Program::new(assemble(&[Instr::CopyCond, Instr::Halt]))
}

/// Upper bound on the literal program length for a target of `len` bits.
pub fn literal_bound(len: usize) -> usize {
    len + 2 * crate::bitcore::ceil_log2(len as u64 + 2) as usize + LITERAL_OVERHEAD
}

/// A program: its self-delimiting code bits.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Program {
    pub code: BitString,
}

impl Program {
    pub fn new(code: BitString) -> Self {
        Self { code }
    }

    pub fn len(&self) -> usize {
        self.code.len()
    }

    pub fn is_empty(&self) -> bool {
        self.code.is_empty()
    }
}

/// Time bound `t(n) = a·n^b + c`, with `0^0 = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StepBound {
    pub a: u64,
    pub b: u32,
    pub c: u64,
}

impl StepBound {
    pub const fn new(a: u64, b: u32, c: u64) -> Self {
        Self { a, b, c }
    }

    /// `t(n) = 8n + 16`.
    pub const fn linear_default() -> Self {
        Self::new(8, 1, 16)
    }

    /// Saturates at `u64::MAX`.
    pub fn t(&self, n: u64) -> u64 {
        n.checked_pow(self.b)
            .and_then(|p| p.checked_mul(self.a))
            .and_then(|p| p.checked_add(self.c))
            .unwrap_or(u64::MAX)
    }

    /// The bound `2·t`.
    pub fn doubled(&self) -> Self {
        Self::new(self.a.saturating_mul(2), self.b, self.c.saturating_mul(2))
    }

    /// True when `self.t(n) <= other.t(n)` for every `n`.
    pub fn dominated_by(&self, other: &StepBound) -> bool {
        self.a <= other.a && self.b <= other.b && self.c <= other.c && self.t(0) <= other.t(0)
    }
}

impl std::fmt::Display for StepBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionResult {
    pub halted: bool,
    pub output: BitString,
    pub steps_used: u64,
    pub bits_read: usize,
}

impl ExecutionResult {
    /// Halted after reading exactly `code_len` bits.
    pub fn is_accepted(&self, code_len: usize) -> bool {
        self.halted && self.bits_read == code_len
    }

    /// Accepted, and within `bound` measured on the output length.
    pub fn is_accepted_within(&self, code_len: usize, bound: &StepBound) -> bool {
        self.is_accepted(code_len) && self.steps_used <= bound.t(self.output.len() as u64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Status {
    NeedBit,
    Halted,
    Fault,
    OutOfBudget,
    OutputLimit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum HeaderOp {
    Literal,
    Repeat,
    XorLit,
}

#[derive(Debug, Clone)]
enum Phase {
    Opcode { acc: u8, got: u8 },
    GammaZeros { op: HeaderOp, zeros: u32 },
    GammaBits { op: HeaderOp, left: u32, value: u64 },
    LiteralPayload { left: u64 },
    XorPayload { left: u64, pos: usize },
}

/// Resumable machine state; the program is pushed in one bit at a time.
#[derive(Debug, Clone)]
pub(crate) struct Machine<'c> {
    cond: &'c BitString,
    cond_index: Option<u64>,
    budget: u64,
    out_limit: usize,
    out: Vec<bool>,
    steps: u64,
    read: usize,
    block: Vec<bool>,
    has_block: bool,
    phase: Phase,
    status: Status,
}

impl<'c> Machine<'c> {
    pub(crate) fn new(cond: &'c BitString, budget: u64) -> Self {
        Self::with_output_limit(cond, budget, MAX_TAPE)
    }

    /// Runs exceeding `out_limit` output bits stop with [`Status::OutputLimit`].
    pub(crate) fn with_output_limit(cond: &'c BitString, budget: u64, out_limit: usize) -> Self {
        Self {
            cond,
            cond_index: index(cond).to_u64(),
            budget,
            out_limit: out_limit.min(MAX_TAPE),
            out: Vec::new(),
            steps: 0,
            read: 0,
            block: Vec::new(),
            has_block: false,
            phase: Phase::Opcode { acc: 0, got: 0 },
            status: Status::NeedBit,
        }
    }

    pub(crate) fn status(&self) -> Status {
        self.status
    }

    pub(crate) fn bits_read(&self) -> usize {
        self.read
    }

    pub(crate) fn output_len(&self) -> usize {
        self.out.len()
    }

    pub(crate) fn steps(&self) -> u64 {
        self.steps
    }

    pub(crate) fn result(&self) -> ExecutionResult {
        ExecutionResult {
            halted: self.status == Status::Halted,
            output: BitString::from_bits(self.out.clone()),
            steps_used: self.steps,
            bits_read: self.read,
        }
    }

    pub(crate) fn output(&self) -> &[bool] {
        &self.out
    }

    /// Lower bound on further program bits needed before an accepting halt.
    pub(crate) fn min_code_to_halt(&self) -> u64 {
        let halt = OPCODE_WIDTH as u64;
        match &self.phase {
            Phase::Opcode { got, .. } => (OPCODE_WIDTH as u64) - *got as u64,
            Phase::GammaZeros { op, zeros } => {
                let payload = if *op == HeaderOp::Repeat { 0 } else { 1u64 << zeros };
                1 + *zeros as u64 + payload + halt
            }
            Phase::GammaBits { op, left, value } => {
                let payload = if *op == HeaderOp::Repeat {
                    0
                } else {
                    value.checked_shl(*left).unwrap_or(u64::MAX)
                };
                (*left as u64).saturating_add(payload).saturating_add(halt)
            }
            Phase::LiteralPayload { left } | Phase::XorPayload { left, .. } => left + halt,
        }
    }

    /// Lower bound on steps still to be spent before an accepting halt, for
    /// a run that must end with at least `min_final_output` output bits.
    pub(crate) fn min_steps_to_halt(&self, min_final_output: usize) -> u64 {
        let pending: u64 = match &self.phase {
            Phase::Opcode { .. } => 0,
            Phase::GammaZeros { op, zeros } => match op {
                HeaderOp::Repeat => (1u64 << zeros).saturating_mul(self.block.len() as u64),
                _ => 1u64 << zeros,
            },
            Phase::GammaBits { op, left, value } => {
                let v = value.checked_shl(*left).unwrap_or(u64::MAX);
                match op {
                    HeaderOp::Repeat => v.saturating_mul(self.block.len() as u64),
                    _ => v,
                }
            }
            Phase::LiteralPayload { left } | Phase::XorPayload { left, .. } => *left,
        };
        let reached = (self.out.len() as u64).saturating_add(self.min_output_growth());
        let missing = (min_final_output as u64).saturating_sub(reached);
        // every output bit costs at least one step; HALT costs one more
        pending.saturating_add(missing).saturating_add(1)
    }

    /// Lower bound on output growth still to come before a halt.
    pub(crate) fn min_output_growth(&self) -> u64 {
        match &self.phase {
            Phase::Opcode { .. } => 0,
            Phase::GammaZeros { op, zeros } => match op {
                HeaderOp::Literal => 1u64 << zeros,
                HeaderOp::Repeat => (1u64 << zeros).saturating_mul(self.block.len() as u64),
                HeaderOp::XorLit => ((1u64 << zeros) as usize).saturating_sub(self.out.len()) as u64,
            },
            Phase::GammaBits { op, left, value } => {
                let v = value.checked_shl(*left).unwrap_or(u64::MAX);
                match op {
                    HeaderOp::Literal => v,
                    HeaderOp::Repeat => v.saturating_mul(self.block.len() as u64),
                    HeaderOp::XorLit => v.saturating_sub(self.out.len() as u64),
                }
            }
            Phase::LiteralPayload { left } => *left,
            Phase::XorPayload { left, pos } => {
                (pos + *left as usize).saturating_sub(self.out.len()) as u64
            }
        }
    }

    fn charge(&mut self, n: u64) -> bool {
        match self.steps.checked_add(n) {
            Some(s) if s <= self.budget => {
                self.steps = s;
                true
            }
            _ => {
                self.status = Status::OutOfBudget;
                false
            }
        }
    }

    fn room(&mut self, n: u64) -> bool {
        if (self.out.len() as u64).saturating_add(n) > self.out_limit as u64 {
            self.status = if self.out_limit == MAX_TAPE {
                Status::Fault
            } else {
                Status::OutputLimit
            };
            false
        } else {
            true
        }
    }

    /// Feeds one program bit and executes everything it completes.
    pub(crate) fn feed(&mut self, bit: bool) -> Status {
        debug_assert_eq!(self.status, Status::NeedBit);
        self.read += 1;
        let phase = std::mem::replace(&mut self.phase, Phase::Opcode { acc: 0, got: 0 });
        match phase {
            Phase::Opcode { acc, got } => {
                let acc = (acc << 1) | bit as u8;
                if got + 1 < OPCODE_WIDTH as u8 {
                    self.phase = Phase::Opcode { acc, got: got + 1 };
                } else {
                    self.dispatch(Opcode::from_code(acc));
                }
            }
            Phase::GammaZeros { op, zeros } => {
                if !bit {
                    if zeros >= 62 {
                        self.status = Status::Fault;
                    } else {
                        self.phase = Phase::GammaZeros { op, zeros: zeros + 1 };
                    }
                } else if zeros == 0 {
                    self.header_done(op, 1);
                } else {
                    self.phase = Phase::GammaBits { op, left: zeros, value: 1 };
                }
            }
            Phase::GammaBits { op, left, value } => {
                let value = (value << 1) | bit as u64;
                if left == 1 {
                    self.header_done(op, value);
                } else {
                    self.phase = Phase::GammaBits { op, left: left - 1, value };
                }
            }
            Phase::LiteralPayload { left } => {
                if self.charge(1) && self.room(1) {
                    self.out.push(bit);
                    self.block.push(bit);
                    if left > 1 {
                        self.phase = Phase::LiteralPayload { left: left - 1 };
                    } else {
                        self.has_block = true;
                    }
                }
            }
            Phase::XorPayload { left, pos } => {
                if self.charge(1) {
                    if pos < self.out.len() {
                        self.out[pos] ^= bit;
                    } else if self.room(1) {
                        self.out.push(bit);
                    }
                    if left > 1 && self.status == Status::NeedBit {
                        self.phase = Phase::XorPayload { left: left - 1, pos: pos + 1 };
                    }
                }
            }
        }
        self.status
    }

    fn dispatch(&mut self, op: Opcode) {
        if !self.charge(1) {
            return;
        }
        match op {
            Opcode::Halt => self.status = Status::Halted,
            Opcode::Write0 | Opcode::Write1 => {
                if self.room(1) {
                    self.out.push(op == Opcode::Write1);
                }
            }
            Opcode::CopyCond => {
                let n = self.cond.len() as u64;
                if self.charge(n) && self.room(n) {
                    self.out.extend_from_slice(self.cond.bits());
                }
            }
            Opcode::Zeros => match self.cond_index {
                Some(n) => {
                    if self.charge(n) && self.room(n) {
                        self.out.resize(self.out.len() + n as usize, false);
                    }
                }
                None => self.status = Status::OutOfBudget,
            },
            Opcode::Literal => self.phase = Phase::GammaZeros { op: HeaderOp::Literal, zeros: 0 },
            Opcode::Repeat => self.phase = Phase::GammaZeros { op: HeaderOp::Repeat, zeros: 0 },
            Opcode::XorLit => self.phase = Phase::GammaZeros { op: HeaderOp::XorLit, zeros: 0 },
        }
    }

    fn header_done(&mut self, op: HeaderOp, value: u64) {
        match op {
            HeaderOp::Literal => {
                self.block.clear();
                self.has_block = false;
                self.phase = Phase::LiteralPayload { left: value };
            }
            HeaderOp::XorLit => self.phase = Phase::XorPayload { left: value, pos: 0 },
            HeaderOp::Repeat => {
                if !self.has_block {
                    self.status = Status::Fault;
                    return;
                }
                let n = value.saturating_mul(self.block.len() as u64);
                if self.charge(n) && self.room(n) {
                    for _ in 0..value {
                        self.out.extend_from_slice(&self.block);
                    }
                }
            }
        }
    }
}

/// Runs `code` on conditional `conditional` for at most `step_budget` steps.
///
/// `halted` means `HALT` was executed within the budget; whether the run
/// counts as a program is [`ExecutionResult::is_accepted`].
pub fn run(code: &BitString, conditional: &BitString, step_budget: u64) -> ExecutionResult {
    let mut m = Machine::new(conditional, step_budget);
    for &b in code.bits() {
        if m.feed(b) != Status::NeedBit {
            break;
        }
    }
    m.result()
}

/// Upper bound on the output length of any code of length at most
/// `max_code_len` on conditional `cond`.
pub fn output_ceiling(max_code_len: usize, cond: &BitString) -> u64 {
    let dispatches = (max_code_len / OPCODE_WIDTH) as u64;
    let l = max_code_len as u64;
    let repeat = 1u64
        .checked_shl(max_code_len as u32)
        .unwrap_or(u64::MAX)
        .saturating_mul(l);
    let zeros = index(cond).to_u64().unwrap_or(u64::MAX);
    let per = repeat.max(zeros).max(cond.len() as u64).max(l);
    dispatches.saturating_mul(per).min(MAX_TAPE as u64)
}

/// Runs `code` and reports its output when it is accepted within `bound`.
pub fn accepted_output(code: &BitString, cond: &BitString, bound: &StepBound) -> Option<BitString> {
    let budget = bound.t(output_ceiling(code.len(), cond));
    let r = run(code, cond, budget);
    r.is_accepted_within(code.len(), bound).then_some(r.output)
}

/// Parameters of a depth-first walk over the program tree.
pub(crate) struct Walk<'c> {
    pub cond: &'c BitString,
    pub budget: u64,
    pub cap: usize,
    pub out_limit: usize,
    /// Only runs ending with at least this many output bits are wanted.
    pub min_output: usize,
}

/// Visits every code of length `<= cap` that halts exactly at its last bit
/// within the walk's budget and output limit. Codes that can no longer halt
/// within the limits are pruned. `prune(n)` receives a lower bound on the
/// final code length and lets the visitor cut by length (branch and bound). Results come back in length-lex code order.
pub(crate) fn walk<R, V, P>(walk: &Walk<'_>, exec: Execution, visit: V, prune: P) -> Vec<(BitString, R)>
where
    R: Send,
    V: Fn(&BitString, &Machine<'_>) -> Option<R> + Sync + Send,
    P: Fn(usize) -> bool + Sync + Send,
{
    let root = Machine::with_output_limit(walk.cond, walk.budget, walk.out_limit);
    let viable = |m: &Machine<'_>| {
        (m.bits_read() as u64).saturating_add(m.min_code_to_halt()) <= walk.cap as u64
            && (m.output_len() as u64).saturating_add(m.min_output_growth()) <= walk.out_limit as u64
            && m.steps().saturating_add(m.min_steps_to_halt(walk.min_output)) <= walk.budget
            && !prune(m.bits_read() + m.min_code_to_halt() as usize)
    };

    let mut found: Vec<(BitString, R)> = Vec::new();
    // breadth-first until there is enough independent work to spread out
    let mut frontier: Vec<(Vec<bool>, Machine<'_>)> = vec![(Vec::new(), root)];
    let target = if exec.is_parallel() { 256 } else { 1 };
    while frontier.len() < target && !frontier.is_empty() {
        let mut next = Vec::with_capacity(frontier.len() * 2);
        for (code, m) in frontier {
            expand(&code, &m, walk.cap, &viable, |code, child| match child.status() {
                Status::NeedBit => next.push((code, child)),
                Status::Halted => {
                    let c = BitString::from_bits(code);
                    if let Some(r) = visit(&c, &child) {
                        found.push((c, r));
                    }
                }
                _ => {}
            });
        }
        frontier = next;
    }

    let sub = crate::exec::map_ordered(exec, &frontier, |(code, m)| {
        let mut out = Vec::new();
        let mut stack = code.clone();
        dfs(&mut stack, m, walk.cap, &viable, &visit, &mut out);
        out
    });
    found.extend(sub.into_iter().flatten());
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found
}

fn expand<'c, F>(
    code: &[bool],
    m: &Machine<'c>,
    cap: usize,
    viable: &impl Fn(&Machine<'_>) -> bool,
    mut emit: F,
) where
    F: FnMut(Vec<bool>, Machine<'c>),
{
    if code.len() >= cap {
        return;
    }
    for bit in [false, true] {
        let mut child = m.clone();
        let st = child.feed(bit);
        if st == Status::Halted || (st == Status::NeedBit && viable(&child)) {
            let mut c = code.to_vec();
            c.push(bit);
            emit(c, child);
        }
    }
}

fn dfs<R, V>(
    stack: &mut Vec<bool>,
    m: &Machine<'_>,
    cap: usize,
    viable: &impl Fn(&Machine<'_>) -> bool,
    visit: &V,
    out: &mut Vec<(BitString, R)>,
) where
    V: Fn(&BitString, &Machine<'_>) -> Option<R>,
{
    if stack.len() >= cap {
        return;
    }
    for bit in [false, true] {
        let mut child = m.clone();
        stack.push(bit);
        match child.feed(bit) {
            Status::NeedBit => {
                if viable(&child) {
                    dfs(stack, &child, cap, viable, visit, out);
                }
            }
            Status::Halted => {
                let c = BitString::from_bits(stack.clone());
                if let Some(r) = visit(&c, &child) {
                    out.push((c, r));
                }
            }
            _ => {}
        }
        stack.pop();
    }
}

/// Every `(program, output)` with `|program| <= max_code_len` accepted on
/// `conditional` within `bound.t(|output|)` steps, in length-lex code order.
pub fn enumerate(max_code_len: usize, conditional: &BitString, bound: &StepBound) -> Vec<(Program, BitString)> {
    enumerate_with(max_code_len, conditional, bound, Execution::default())
}

pub fn enumerate_with(
    max_code_len: usize,
    conditional: &BitString,
    bound: &StepBound,
    exec: Execution,
) -> Vec<(Program, BitString)> {
    let ceiling = output_ceiling(max_code_len, conditional);
    let w = Walk {
        cond: conditional,
        budget: bound.t(ceiling),
        cap: max_code_len,
        out_limit: ceiling as usize,
        min_output: 0,
    };
    walk(
        &w,
        exec,
        |_, m| {
            (m.steps() <= bound.t(m.output_len() as u64))
                .then(|| BitString::from_bits(m.output().to_vec()))
        },
        |_| false,
    )
    .into_iter()
    .map(|(c, out)| (Program::new(c), out))
    .collect()
}

/// Human-readable description of the frozen opcode table.
pub fn machine_spec_document() -> String {
    let mut s = String::new();
    s.push_str(&format!("nidkit prefix machine, table version {MACHINE_TABLE_VERSION}\n"));
    s.push_str(&format!("opcode width: {OPCODE_WIDTH} bits, read on demand, left to right\n"));
    s.push_str("acceptance: HALT executed after consuming exactly every program bit\n");
    s.push_str("time: steps <= t(|output|), t(n) = a*n^b + c\n");
    s.push_str("header: Elias gamma of a positive integer (z zeros, then z+1 binary digits)\n");
    s.push_str("\ncode  name      effect; steps\n");
    let rows = [
        (Opcode::Halt, "stop; 1"),
        (Opcode::Write0, "append 0; 1"),
        (Opcode::Write1, "append 1; 1"),
        (Opcode::CopyCond, "append the conditional tape; 1 + |y|"),
        (Opcode::Literal, "header L, copy next L program bits to output; 1 + L"),
        (Opcode::Repeat, "header k, append last LITERAL block k more times (fault if none); 1 + k*|block|"),
        (Opcode::XorLit, "header L, xor next L program bits onto output cells 0..L, appending past the end; 1 + L"),
        (Opcode::Zeros, "append index(y) zeros; 1 + index(y)"),
    ];
    for (op, effect) in rows {
        let c = op.code();
        s.push_str(&format!(
            "{}{}{}   {:<9} {}\n",
            (c >> 2) & 1,
            (c >> 1) & 1,
            c & 1,
            op.mnemonic(),
            effect
        ));
    }
    s.push_str("\nfaults: reading past the program end, REPEAT before LITERAL, header over 62 zeros, ");
    s.push_str(&format!("output beyond {MAX_TAPE} bits\n"));
    s.push_str(&format!(
        "constants: literal overhead c_m = {LITERAL_OVERHEAD}, copy program length c_copy = {COPY_PROGRAM_LEN}\n"
    ));
    s.push_str("literal program: LITERAL gamma(|x|) x HALT, length <= |x| + 2*ceil(log2(|x|+2)) + c_m\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bs(s: &str) -> BitString {
        s.parse().unwrap()
    }

    #[test]
    fn gamma_codes() {
        assert_eq!(BitString::from_bits(gamma_encode(1)), bs("1"));
        assert_eq!(BitString::from_bits(gamma_encode(2)), bs("010"));
        assert_eq!(BitString::from_bits(gamma_encode(5)), bs("00101"));
        for n in 1..200 {
            assert_eq!(gamma_encode(n).len(), gamma_len(n));
        }
    }

    #[test]
    fn halt_only() {
        let r = run(&bs("000"), &BitString::empty(), 10);
        assert!(r.is_accepted(3));
        assert_eq!(r.output, BitString::empty());
        assert_eq!(r.steps_used, 1);
    }

    #[test]
    fn literal_01() {
        // LITERAL gamma(2)=010 "01" HALT
        let code = literal_program(&bs("01")).code;
        assert_eq!(code, bs("10001001000"));
        let r = run(&code, &BitString::empty(), 100);
        assert!(r.is_accepted(code.len()));
        assert_eq!(r.output, bs("01"));
        assert_eq!(r.steps_used, 1 + 2 + 1);
    }

    #[test]
    fn zero_budget_never_halts() {
        for code in ["000", "001000", "011000"] {
            let r = run(&bs(code), &bs("01"), 0);
            assert!(!r.halted);
            assert_eq!(r.steps_used, 0);
        }
    }

    #[test]
    fn trailing_bits_are_not_accepted() {
        let r = run(&bs("0001"), &BitString::empty(), 10);
        assert!(r.halted);
        assert_eq!(r.bits_read, 3);
        assert!(!r.is_accepted(4));
    }

    #[test]
    fn running_off_the_end_is_not_halting() {
        let r = run(&bs("10001"), &BitString::empty(), 100);
        assert!(!r.halted);
        assert_eq!(r.bits_read, 5);
    }

    #[test]
    fn copycond_and_zeros() {
        let y = bs("0110");
        let r = run(&copy_program().code, &y, 100);
        assert!(r.is_accepted(COPY_PROGRAM_LEN));
        assert_eq!(r.output, y);
        assert_eq!(r.steps_used, 1 + 4 + 1);

        // index("001") = 8
        let z = run(&assemble(&[Instr::Zeros, Instr::Halt]), &bs("001"), 100);
        assert_eq!(z.output, BitString::zeros(8));
        assert_eq!(z.steps_used, 1 + 8 + 1);
    }

    #[test]
    fn repeat_and_xor() {
        let code = assemble(&[Instr::Literal(bs("01")), Instr::Repeat(5), Instr::Halt]);
        let r = run(&code, &BitString::empty(), 1000);
        assert!(r.is_accepted(code.len()));
        assert_eq!(r.output, bs("010101010101"));
        assert_eq!(r.steps_used, 3 + 11 + 1);

        let code = assemble(&[Instr::CopyCond, Instr::XorLit(bs("0110")), Instr::Halt]);
        let r = run(&code, &bs("1010"), 1000);
        assert_eq!(r.output, bs("1100"));
        // xor past the end appends
        let code = assemble(&[Instr::Write1, Instr::XorLit(bs("111")), Instr::Halt]);
        assert_eq!(run(&code, &BitString::empty(), 100).output, bs("011"));
    }

    #[test]
    fn repeat_without_block_faults() {
        let code = assemble(&[Instr::Write1, Instr::Repeat(2), Instr::Halt]);
        let r = run(&code, &BitString::empty(), 1000);
        assert!(!r.halted);
    }

    #[test]
    fn budget_is_measured_on_output() {
        let code = literal_program(&bs("0110")).code;
        let tight = StepBound::new(0, 0, 6);
        let r = run(&code, &BitString::empty(), 100);
        assert_eq!(r.steps_used, 6);
        assert!(r.is_accepted_within(code.len(), &tight));
        assert!(!r.is_accepted_within(code.len(), &StepBound::new(0, 0, 5)));
        assert_eq!(accepted_output(&code, &BitString::empty(), &tight), Some(bs("0110")));
    }

    #[test]
    fn step_bound_arithmetic() {
        let t = StepBound::linear_default();
        assert_eq!(t.t(0), 16);
        assert_eq!(t.t(4), 48);
        assert_eq!(t.doubled().t(4), 96);
        assert_eq!(StepBound::new(1, 0, 0).t(0), 1);
        assert_eq!(StepBound::new(u64::MAX, 3, 1).t(1 << 30), u64::MAX);
        assert!(t.dominated_by(&t.doubled()));
        assert!(!t.doubled().dominated_by(&t));
        assert!(!StepBound::new(1, 0, 0).dominated_by(&StepBound::new(1, 1, 0)));
    }

    #[test]
    fn literal_bound_holds_for_canonical_literals() {
        for x in BitString::all_up_to(12) {
            let p = literal_program(&x);
            assert!(p.len() <= literal_bound(x.len()), "{x:?}");
            let r = run(&p.code, &BitString::empty(), u64::MAX);
            assert!(r.is_accepted(p.len()));
            assert_eq!(r.output, x);
        }
    }

    #[test]
    fn enumerate_trivial_cases() {
        assert!(enumerate(0, &BitString::empty(), &StepBound::linear_default()).is_empty());
        assert!(enumerate(10, &BitString::empty(), &StepBound::new(0, 0, 0)).is_empty());
        let all = enumerate(3, &BitString::empty(), &StepBound::linear_default());
        assert_eq!(all, vec![(Program::new(bs("000")), BitString::empty())]);
    }

    #[test]
    fn enumerate_modes_agree() {
        let cond = bs("01");
        let b = StepBound::linear_default();
        let s = enumerate_with(12, &cond, &b, Execution::Sequential);
        let p = enumerate_with(12, &cond, &b, Execution::Parallel);
        assert_eq!(s, p);
        assert!(s.windows(2).all(|w| w[0].0.code < w[1].0.code));
    }

    #[test]
    fn spec_document_lists_every_opcode() {
        let doc = machine_spec_document();
        for op in Opcode::ALL {
            assert!(doc.contains(op.mnemonic()));
        }
        assert!(doc.contains("table version 1"));
    }
}

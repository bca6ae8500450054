//! Normalized compression distance over byte corpora.
//!
//! `ncd(x, y) = (C(xy) - min(C(x), C(y))) / max(C(x), C(y))` where `C` is a
//! compressed length in bytes and `C(xy)` is the smaller of the two
//! concatenation orders, which makes the value symmetric by construction.
//! Values are exact rationals. Negative values are clamped to 0 and logged;
//! values above [`NCD_CEILING`] are treated as a broken compressor.

mod corpus;
pub mod lzss;
mod matrix;
mod upgma;

use std::io::{Read, Write};
use std::process::{Command, Stdio};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

pub use corpus::{
    load_dir, load_manifest, synthetic_corpus, CorpusItem, SyntheticCorpus, SyntheticSpec,
    DEFAULT_SEED,
};
pub use matrix::{
    decimal, matrix, matrix_with, parse_decimal, DistanceMatrix, Separation, TriangleAudit,
};
pub use upgma::{upgma, Tree};

/// Upper sanity limit for a single distance: `6/5`.
pub fn ncd_ceiling() -> BigRational {
    BigRational::new(6.into(), 5.into())
}

/// `6/5` as a float, for messages.
pub const NCD_CEILING: f64 = 1.2;

#[derive(Debug, Error)]
pub enum NcdError {
    #[error("compressor {name} failed: {message}")]
    CompressorFailed { name: String, message: String },
    #[error("ncd({x}, {y}) = {value} exceeds {NCD_CEILING}: compressor is not sane")]
    CompressorInsane { x: String, y: String, value: BigRational },
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("a corpus needs at least 2 items, got {0}")]
    TooFewItems(usize),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// A compressed-length oracle `C`.
pub trait Compressor: Sync {
    fn name(&self) -> &str;

    /// Compressed size of `data` in bytes; at least 1 for every input.
    fn compressed_len(&self, data: &[u8]) -> Result<u64, NcdError>;

    /// Whether concurrent calls are safe. Serial compressors are driven from
    /// a single thread.
    fn is_concurrent(&self) -> bool {
        true
    }
}

/// The in-crate [`lzss`] compressor.
#[derive(Debug, Clone, Copy, Default)]
pub struct Builtin;

impl Compressor for Builtin {
    fn name(&self) -> &str {
        "builtin-lzss"
    }

    fn compressed_len(&self, data: &[u8]) -> Result<u64, NcdError> {
        Ok(lzss::compressed_len(data))
    }
}

/// Runs an external program that reads raw bytes on stdin and writes the
/// compressed stream on stdout; only the output size is used.
#[derive(Debug, Clone)]
pub struct CommandCompressor {
    program: String,
    args: Vec<String>,
    display: String,
    concurrent: bool,
}

impl CommandCompressor {
    /// Splits `command` on whitespace: program then arguments.
    pub fn parse(command: &str) -> Option<Self> {
        let mut parts = command.split_whitespace().map(str::to_string);
        let program = parts.next()?;
        Some(Self {
            program,
            args: parts.collect(),
            display: command.trim().to_string(),
            concurrent: true,
        })
    }

    pub fn serial(mut self) -> Self {
        self.concurrent = false;
        self
    }
}

impl Compressor for CommandCompressor {
    fn name(&self) -> &str {
        &self.display
    }

    fn compressed_len(&self, data: &[u8]) -> Result<u64, NcdError> {
        let fail = |message: String| NcdError::CompressorFailed {
            name: self.display.clone(),
            message,
        };
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| fail(e.to_string()))?;
        let mut stdin = child.stdin.take().expect("stdin is piped");
        let mut stdout = child.stdout.take().expect("stdout is piped");
        let (written, counted) = std::thread::scope(|s| {
            let writer = s.spawn(move || stdin.write_all(data));
            let mut sink = Vec::new();
            let counted = stdout.read_to_end(&mut sink);
            (writer.join().expect("writer thread"), counted)
        });
        let status = child.wait().map_err(|e| fail(e.to_string()))?;
        if !status.success() {
            return Err(fail(format!("exited with {status}")));
        }
        written.map_err(|e| fail(format!("writing stdin: {e}")))?;
        let n = counted.map_err(|e| fail(format!("reading stdout: {e}")))? as u64;
        if n == 0 {
            return Err(fail("produced no output".into()));
        }
        Ok(n)
    }

    fn is_concurrent(&self) -> bool {
        self.concurrent
    }
}

/// The distance from the three compressed lengths.
pub fn ncd_from_lengths(cx: u64, cy: u64, cxy: u64) -> BigRational {
    let (lo, hi) = (cx.min(cy), cx.max(cy));
    BigRational::new(
        BigInt::from(cxy) - BigInt::from(lo),
        BigInt::from(hi.max(1)),
    )
}

/// Clamps low values to 0 and rejects values above the ceiling.
fn checked(x: &str, y: &str, value: BigRational) -> Result<BigRational, NcdError> {
    if value < BigRational::zero() {
        log::warn!("ncd({x}, {y}) = {value} is negative; clamped to 0");
        return Ok(BigRational::zero());
    }
    if value > ncd_ceiling() {
        return Err(NcdError::CompressorInsane {
            x: x.to_string(),
            y: y.to_string(),
            value,
        });
    }
    Ok(value)
}

fn joint_len(x: &[u8], y: &[u8], c: &dyn Compressor) -> Result<u64, NcdError> {
    let mut buf = Vec::with_capacity(x.len() + y.len());
    buf.extend_from_slice(x);
    buf.extend_from_slice(y);
    let xy = c.compressed_len(&buf)?;
    if x == y {
        return Ok(xy);
    }
    buf.clear();
    buf.extend_from_slice(y);
    buf.extend_from_slice(x);
    Ok(xy.min(c.compressed_len(&buf)?))
}

pub fn ncd(x: &CorpusItem, y: &CorpusItem, c: &dyn Compressor) -> Result<BigRational, NcdError> {
    let cx = c.compressed_len(&x.payload)?;
    let cy = c.compressed_len(&y.payload)?;
    let cxy = joint_len(&x.payload, &y.payload, c)?;
    checked(&x.label, &y.label, ncd_from_lengths(cx, cy, cxy))
}

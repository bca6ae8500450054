//! Time-bounded algorithmic-information experiments on a prefix-free toy
//! machine, and normalized compression distance clustering.
//!
//! - [`bitcore`]: binary strings, length-lex indexing, pairing, XOR.
//! - [`prefix_machine`]: the frozen-table prefix machine and program enumeration.
//! - [`complexity`]: `K^t`, `E^t`, upper traces and the time-bounded NID surrogate.
//! - [`constructions`]: the diagonal string, the XOR gap pair, threshold search.
//! - [`approx`]: approximation traces and fluctuation counting.
//! - [`ncd`]: compressors, NCD matrices, UPGMA trees and the synthetic corpus.

pub mod approx;
pub mod bitcore;
pub mod complexity;
pub mod constructions;
pub mod exec;
pub mod ncd;
pub mod prefix_machine;

pub use bitcore::BitString;
pub use exec::Execution;
pub use prefix_machine::{Program, StepBound};

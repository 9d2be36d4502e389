//! A Turing-machine workbench.
//!
//! * [`machine`]: deterministic machines, tapes and step-accounted runs.
//! * [`cost`]: selection functions deciding which transitions are counted.
//! * [`measures`]: strictly increasing measure functions, transforms and
//!   empirical bound checks.
//! * [`nondet`]: checking relations and exhaustive certificate search.
//! * [`convergence`]: lookup-trie machines for arbitrary languages and
//!   convergence-index search.
//! * [`format`]: the machine, language and syntax text formats.
//! * [`profile`]: worst-case step profiles and the contains-a-1 demonstration.

pub mod convergence;
pub mod cost;
pub mod error;
pub mod format;
pub mod machine;
pub mod measures;
pub mod nondet;
pub mod profile;

pub use cost::CostModel;
pub use error::{Error, Result};
pub use machine::{Machine, RunResult, Runner, Verdict, BLANK};
pub use measures::{BoundSpec, MeasureFunction};

//! Library side of the `specmom` command-line driver: run specifications,
//! crossover tables, modal-decay reports and the benchmark harness.

pub mod bench;
pub mod modes;
pub mod output;
pub mod run;
pub mod table;

pub use run::{MatrixSource, RunSpec, StartVector};

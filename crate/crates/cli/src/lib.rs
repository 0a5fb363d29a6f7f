//! Benchmark harness for encrypted sparse matrix multiplication: matrix
//! generation, sparsity sweeps, verification against the plaintext oracle,
//! and runtime reports.

pub mod config;
pub mod files;
pub mod record;
pub mod report;
pub mod sweep;
pub mod verify;

pub use config::{matrix_pair, sub_seed, BenchConfig};
pub use record::BenchRecord;
pub use report::Report;
pub use sweep::{run_sweep, Harness, RunResult};
pub use verify::{verify_pair, VerifyReport};

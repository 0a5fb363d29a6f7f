//! Encrypted sparse x sparse matrix multiplication under leveled CKKS.

pub mod ckks;
pub mod enc;
pub mod engine;
mod error;
pub mod metrics;
pub mod sparse;

pub use ckks::{Ciphertext, CkksContext, CkksParams, KeyBundle, Plaintext};
pub use enc::{
    decrypt_result, encrypt_sparse, EncryptedResult, EncryptedSparseMatrix, Layout, SparseMeta,
};
pub use engine::{EngineOptions, MatmulMethod, OpCounter, RunOutput, SkipRule, SpmmEngine};
pub use error::{Error, Result};
pub use metrics::{frobenius_error, plain_matmul, predicted_op_counts, PredictedCounts};
pub use sparse::{CscMatrix, CsrMatrix, DenseMatrix, VcscMatrix, VcsrMatrix};

//! Plaintext sparse layouts and conversions to and from dense storage.
//!
//! Conversions drop exact zeros only. Every layout keeps the invariants
//! checked by its `from_parts` constructor, so a converted matrix can always
//! be rebuilt from its parts.

mod compressed;
mod dense;
mod generate;
pub mod io;
mod sliced;

pub use compressed::{CscMatrix, CsrMatrix};
pub use dense::DenseMatrix;
pub use generate::{generate_nested_family, generate_random_sparse, zero_count};
pub use sliced::{VcscMatrix, VcsrMatrix, DEFAULT_SLICE_HEIGHT};

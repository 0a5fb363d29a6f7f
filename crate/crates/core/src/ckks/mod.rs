//! Leveled CKKS over an RNS modulus chain.
//!
//! Polynomials live in `Z[X]/(X^n + 1)` and are kept in NTT form over each
//! prime of the chain. A ciphertext at level `l` uses primes `q_0..q_l`;
//! rescaling divides by `q_l` and drops it. Key switching (relinearization
//! and rotation) decomposes by RNS limb and uses one auxiliary prime.

pub mod arith;
mod context;
mod encoding;
mod eval;
mod keys;
mod ntt;
mod params;
mod poly;
pub mod serialize;
mod types;

pub use context::{CkksContext, EvalStats};
pub use eval::{HoistedCiphertext, SCALE_MATCH_TOLERANCE};
pub use keys::{KeyBundle, KeySwitchKey, PublicKey, SecretKey};
pub use ntt::NttTable;
pub use params::CkksParams;
pub use poly::RnsPoly;
pub use types::{Ciphertext, Plaintext};

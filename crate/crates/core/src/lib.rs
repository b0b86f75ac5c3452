//! Quasi-Hermitian metric checks for the minimal-length deformed Swanson model.
//!
//! Operators live on a truncated, uniformly sampled momentum grid. The
//! position operator acts as `X = iℏ((1 + τp²)∂_p + γ̃p)` and momentum as
//! multiplication by `p`. Hamiltonians are composed symbolically and realized
//! as dense matrices, after which candidate metrics `ρ` are tested against
//! `H†ρ = ρH`, recovered by least squares, and compared across `τ → 0`.

pub mod error;
pub mod metrics;
pub mod models;
pub mod opcore;
pub mod report;
pub mod verify;

pub use error::{Error, Result};

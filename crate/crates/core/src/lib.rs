//! Exact arithmetic, congruence images and level computations for
//! finitely generated subgroups of `SL(n, Q)` and `Sp(n, Q)`.

pub mod engine;
pub mod error;
pub mod exact;
pub mod group;
pub mod level;
pub mod scan;

pub use error::{Error, Result};

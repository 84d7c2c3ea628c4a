//! Finite congruence images and their orders.

mod bfs;
mod chain;
mod image;
mod modmat;
mod order;

pub use bfs::{closure_order, BfsOutcome};
pub use chain::{ChainConfig, ChainSummary, LevelSummary, StabChain};
pub use image::{image_order, order_bfs, order_lifted, order_stabchain, EngineConfig, FiniteImage};
pub use modmat::{MatRing, ModMat};
pub use order::{full_order, full_order_prime_power, full_order_value, layer_dimension};

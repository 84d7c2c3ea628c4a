//! Exact arithmetic: rationals, rational matrices, factored integers and
//! prime utilities.

mod factored;
mod matrix;
pub mod primes;

pub use factored::{crt_split, factorize, FactoredInt};
pub use matrix::{format_rat, int, parse_rat, rat, Rat, RatMatrix};

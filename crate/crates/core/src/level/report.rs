use std::collections::BTreeMap;

use serde::Serialize;

use super::TraceEntry;
use crate::exact::FactoredInt;
use crate::group::GroupKind;

/// Outcome of the level computation.
#[derive(Clone, Debug, Serialize)]
pub struct LevelReport {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<String>,
    pub kind: GroupKind,
    pub degree: usize,
    pub mu: FactoredInt,
    pub pi: Vec<u64>,
    pub pi_certified: bool,
    pub pi_tilde: Vec<u64>,
    pub exponents: BTreeMap<u64, u32>,
    pub level: FactoredInt,
    pub closure_index: FactoredInt,
    pub trace: Vec<TraceEntry>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelPiece {
    /// Level of the congruence kernel inside the `modulus` quotient.
    pub level: FactoredInt,
    pub modulus: FactoredInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientPieces {
    pub full_factor_modulus: FactoredInt,
    pub kernel_piece: KernelPiece,
    pub top_quotient_modulus: FactoredInt,
}

/// `phi_m(H)` split as `m = a b c`: `a = gcd(m, level)`, `b` the part of
/// `m / a` on the primes of `a`, `c` the rest.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuotientDescriptor {
    pub m: FactoredInt,
    pub a: FactoredInt,
    pub b: FactoredInt,
    pub c: FactoredInt,
    pub order_phi_m: FactoredInt,
    pub delta: FactoredInt,
    pub pieces: QuotientPieces,
}

//! Bounded search for primes where the group fails to surject. Heuristic:
//! nothing is claimed about primes beyond the bound.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::primes::primes_up_to;
use crate::exact::FactoredInt;
use crate::group::{is_transvection, GroupSpec};
use crate::level::{DeltaOracle, LevelConfig};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeCheck {
    pub prime: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<FactoredInt>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanResult {
    pub bound: u64,
    pub nonsurjective: BTreeSet<u64>,
    /// Always false.
    pub certified: bool,
    /// Primes of `mu`, which are never tested.
    pub skipped: Vec<u64>,
    pub checks: Vec<PrimeCheck>,
}

impl ScanResult {
    pub fn failures(&self) -> impl Iterator<Item = &PrimeCheck> {
        self.checks.iter().filter(|c| c.error.is_some())
    }
}

/// Scan with a caller-owned oracle, so the evaluations land in its cache.
pub fn scan_pi_with(oracle: &DeltaOracle<'_>, bound: u64) -> Result<ScanResult> {
    if bound < 2 {
        return Err(Error::Domain(format!("scan bound must be at least 2, got {bound}")));
    }
    let mu = oracle.spec().mu();
    let (skipped, tested): (Vec<u64>, Vec<u64>) =
        primes_up_to(bound).into_iter().partition(|&p| mu.exponent(p) > 0);
    let checks: Vec<PrimeCheck> = tested
        .par_iter()
        .map(|&p| match oracle.delta(&FactoredInt::prime(p)) {
            Ok(d) => PrimeCheck {
                prime: p,
                delta: Some(d),
                error: None,
            },
            Err(e) => PrimeCheck {
                prime: p,
                delta: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let nonsurjective = checks
        .iter()
        .filter(|c| c.delta.as_ref().is_some_and(|d| !d.is_one()))
        .map(|c| c.prime)
        .collect();
    Ok(ScanResult {
        bound,
        nonsurjective,
        certified: false,
        skipped,
        checks,
    })
}

pub fn scan_pi(spec: &GroupSpec, bound: u64) -> Result<ScanResult> {
    scan_pi_with(&DeltaOracle::new(spec, LevelConfig::default()), bound)
}

pub fn has_transvection_generator(spec: &GroupSpec) -> bool {
    spec.generators().iter().any(is_transvection)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::catalog;

    #[test]
    fn small_scans() {
        let g1 = catalog::lookup("G1").unwrap();
        let r = scan_pi(&g1, 50).unwrap();
        assert_eq!(r.nonsurjective, [11].into());
        assert!(!r.certified);
        assert!(r.failures().next().is_none());
        assert!(!has_transvection_generator(&g1));
        assert!(has_transvection_generator(&catalog::lookup("H4sp:25/3:29/3").unwrap()));
    }

    #[test]
    fn mu_primes_are_skipped() {
        let spec = catalog::lookup("G_s:11/3").unwrap();
        let r = scan_pi(&spec, 20).unwrap();
        assert_eq!(r.skipped, vec![3, 11]);
        assert!(r.checks.iter().all(|c| c.prime != 3 && c.prime != 11));
    }
}

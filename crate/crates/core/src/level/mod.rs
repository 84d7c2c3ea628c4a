//! Index function, exceptional primes, level and congruence quotients.

mod oracle;
mod report;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

pub use oracle::{DeltaOracle, LevelConfig, TraceEntry};
pub use report::{KernelPiece, LevelReport, QuotientDescriptor, QuotientPieces};

use crate::engine::full_order;
use crate::error::{Error, Result};
use crate::exact::FactoredInt;
use crate::group::GroupSpec;
use crate::scan::scan_pi_with;

fn product(primes: impl IntoIterator<Item = u64>) -> FactoredInt {
    primes
        .into_iter()
        .fold(FactoredInt::one(), |acc, p| acc.mul(&FactoredInt::prime(p)))
}

impl DeltaOracle<'_> {
    /// `p^e`, or 1 when `p` is inverted in the coefficient ring (such a prime
    /// never divides an admissible modulus).
    fn local(&self, p: u64, e: u32) -> FactoredInt {
        if self.spec().mu().exponent(p) > 0 {
            FactoredInt::one()
        } else {
            FactoredInt::prime(p).pow(e)
        }
    }

    fn grows(&self, small: &FactoredInt, big: &FactoredInt) -> Result<bool> {
        if small == big {
            return Ok(false);
        }
        Ok(self.delta(small)? != self.delta(big)?)
    }

    /// The primes of the level: `pi` plus the exceptional primes detected by
    /// the degree-specific tests.
    pub fn pi_tilde(&self, pi: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
        let spec = self.spec();
        for &p in pi {
            if spec.mu().exponent(p) > 0 {
                return Err(Error::ModulusNotCoprime {
                    modulus: p.to_string(),
                    mu: spec.mu().to_string(),
                });
            }
        }
        let inverted = |p: u64| spec.mu().exponent(p) > 0;
        let mut out = pi.clone();
        match spec.degree() {
            2 => {
                let r5 = product(pi.iter().copied().filter(|&p| p > 5));
                if !pi.contains(&5) && !inverted(5) && self.grows(&r5, &r5.mul(&self.local(5, 1)))? {
                    out.insert(5);
                }
                let r3 = if out.contains(&5) {
                    r5.mul(&FactoredInt::prime(5))
                } else {
                    r5
                };
                let (two, four) = (self.local(2, 1), self.local(2, 2));
                let (three, nine) = (self.local(3, 1), self.local(3, 2));
                let r3_2 = r3.mul(&two);
                let r3_3 = r3.mul(&three);
                let r3_6 = r3_2.mul(&three);
                if !pi.contains(&3) && !inverted(3) {
                    let admit = self.grows(&four, &four.mul(&nine))? || self.grows(&r3_2, &r3_6)?;
                    if admit {
                        out.insert(3);
                    }
                }
                if !pi.contains(&2) && !inverted(2) {
                    let admit = self.grows(&nine, &four.mul(&nine))? || self.grows(&r3_3, &r3_6)?;
                    if admit {
                        out.insert(2);
                    }
                }
            }
            3 | 4 => {
                if !pi.contains(&2) && !inverted(2) {
                    let q = product(pi.iter().copied().filter(|&p| p % 2 == 1));
                    if self.grows(&q, &q.mul(&FactoredInt::prime(2).pow(2)))? {
                        out.insert(2);
                    }
                }
            }
            _ => {}
        }
        Ok(out)
    }

    /// Smallest `nu` with `delta(p^(nu+1) z) == delta(p^nu z)`, starting at 1.
    fn stable_exponent(&self, p: u64, z: &FactoredInt) -> Result<u32> {
        let cap = self.config().nu_cap;
        let pf = FactoredInt::prime(p);
        let mut nu = 1;
        loop {
            let low = pf.pow(nu).mul(z);
            let high = low.mul(&pf);
            if self.delta(&high)? == self.delta(&low)? {
                return Ok(nu);
            }
            nu += 1;
            if nu > cap {
                return Err(Error::NoStabilization { prime: p, cap });
            }
        }
    }

    /// Level of the congruence closure, given its prime support `omega`.
    /// Returns the level and the exponent of each prime.
    pub fn level_max_pcs(&self, omega: &BTreeSet<u64>) -> Result<(FactoredInt, BTreeMap<u64, u32>)> {
        // The cofactor z_p only involves the other primes to the first power,
        // so incrementing one exponent never changes another prime's test and
        // the primes can be resolved independently.
        let exps: Vec<(u64, u32)> = omega
            .par_iter()
            .map(|&p| {
                let z = product(omega.iter().copied().filter(|&q| q != p));
                self.stable_exponent(p, &z).map(|nu| (p, nu))
            })
            .collect::<Result<_>>()?;
        let level = FactoredInt::from_factors(exps.iter().copied())?;
        Ok((level, exps.into_iter().collect()))
    }

    /// Full pipeline for a given `pi`.
    pub fn report(&self, pi: &BTreeSet<u64>, pi_certified: bool) -> Result<LevelReport> {
        let spec = self.spec();
        let pi_tilde = self.pi_tilde(pi)?;
        let (level, exponents) = self.level_max_pcs(&pi_tilde)?;
        let closure_index = self.delta(&level)?;
        let mut warnings = Vec::new();
        if !pi_certified {
            warnings.push(format!(
                "pi was found by a bounded scan up to {} and is not certified",
                self.config().scan_bound
            ));
        }
        if !spec.density_asserted() {
            warnings.push("density was not asserted; termination is only guaranteed for dense input".into());
        }
        Ok(LevelReport {
            group: spec.name().map(str::to_owned),
            kind: spec.kind(),
            degree: spec.degree(),
            mu: spec.mu().clone(),
            pi: pi.iter().copied().collect(),
            pi_certified,
            pi_tilde: pi_tilde.into_iter().collect(),
            exponents,
            level,
            closure_index,
            trace: self.trace(),
            warnings,
        })
    }

    /// `closure_index` using the group's own `pi`, or a bounded scan when
    /// none was supplied.
    pub fn closure_index(&self) -> Result<LevelReport> {
        match self.spec().pi() {
            Some(pi) => self.report(pi, true),
            None => {
                let scan = scan_pi_with(self, self.config().scan_bound)?;
                self.report(&scan.nonsurjective, false)
            }
        }
    }

    /// Decompose `phi_m(H)` against the level in `report`.
    pub fn quotient_descriptor(&self, report: &LevelReport, m: &FactoredInt) -> Result<QuotientDescriptor> {
        let spec = self.spec();
        spec.check_modulus(m)?;
        let kind = spec.kind();
        let n = spec.degree();
        let a = m.gcd(&report.level);
        let rest = m.checked_div(&a).expect("gcd divides");
        let b = rest.restrict(|p| a.exponent(p) > 0);
        let c = rest.restrict(|p| a.exponent(p) == 0);
        let top = if a.is_one() {
            FactoredInt::one()
        } else {
            spec.reduce_mod(&a)?.order(&self.config().engine)?
        };
        let ab = a.mul(&b);
        let layer = full_order(kind, n, &ab)
            .checked_div(&full_order(kind, n, &a))
            .expect("full orders are multiplicative along divisibility");
        let order = top.mul(&layer).mul(&full_order(kind, n, &c));
        let delta = full_order(kind, n, m)
            .checked_div(&order)
            .expect("image order divides the ambient order");
        Ok(QuotientDescriptor {
            m: m.clone(),
            a: a.clone(),
            b,
            c: c.clone(),
            order_phi_m: order,
            delta,
            pieces: QuotientPieces {
                full_factor_modulus: c,
                kernel_piece: KernelPiece { level: a.clone(), modulus: ab },
                top_quotient_modulus: a,
            },
        })
    }

    /// Whether the group surjects onto every congruence quotient, given a
    /// certified `pi`.
    pub fn profinite_certificate(&self, pi: &BTreeSet<u64>) -> Result<bool> {
        if !pi.is_empty() {
            return Ok(false);
        }
        match self.spec().degree() {
            2 => Ok(self.pi_tilde(pi)?.is_empty()),
            3 | 4 => {
                if self.spec().mu().exponent(2) > 0 {
                    return Ok(true);
                }
                Ok(self.delta(&FactoredInt::prime(2).pow(2))?.is_one())
            }
            _ => Ok(true),
        }
    }
}

/// `delta_H(m)` with default settings.
pub fn delta(spec: &GroupSpec, m: &FactoredInt) -> Result<FactoredInt> {
    DeltaOracle::new(spec, LevelConfig::default()).delta(m)
}

pub fn pi_tilde(spec: &GroupSpec, pi: &BTreeSet<u64>) -> Result<BTreeSet<u64>> {
    DeltaOracle::new(spec, LevelConfig::default()).pi_tilde(pi)
}

pub fn level_max_pcs(spec: &GroupSpec, omega: &BTreeSet<u64>) -> Result<FactoredInt> {
    Ok(DeltaOracle::new(spec, LevelConfig::default()).level_max_pcs(omega)?.0)
}

pub fn closure_index(spec: &GroupSpec) -> Result<LevelReport> {
    DeltaOracle::new(spec, LevelConfig::default()).closure_index()
}

pub fn quotient_descriptor(spec: &GroupSpec, report: &LevelReport, m: &FactoredInt) -> Result<QuotientDescriptor> {
    DeltaOracle::new(spec, LevelConfig::default()).quotient_descriptor(report, m)
}

pub fn profinite_certificate(spec: &GroupSpec, pi: &BTreeSet<u64>) -> Result<bool> {
    DeltaOracle::new(spec, LevelConfig::default()).profinite_certificate(pi)
}

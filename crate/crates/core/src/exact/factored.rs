use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::primes::{factor_big, factor_u64, is_prime};
use crate::error::{Error, Result};

/// A positive integer kept together with its prime factorization.
///
/// Moduli, levels, group orders and indices are all carried in this form.
/// The textual form is `p1^e1*p2^e2*...` with primes ascending and `^1`
/// omitted; the integer 1 prints as `1`.
#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct FactoredInt {
    factors: BTreeMap<u64, u32>,
}

impl FactoredInt {
    pub fn one() -> Self {
        Self::default()
    }

    /// Build from `(prime, exponent)` pairs. Zero exponents are dropped and
    /// repeated primes accumulate.
    pub fn from_factors<I: IntoIterator<Item = (u64, u32)>>(pairs: I) -> Result<Self> {
        let mut factors = BTreeMap::new();
        for (p, e) in pairs {
            if !is_prime(p) {
                return Err(Error::Domain(format!("{p} is not prime")));
            }
            if e > 0 {
                *factors.entry(p).or_insert(0) += e;
            }
        }
        Ok(Self { factors })
    }

    pub fn prime(p: u64) -> Self {
        Self::prime_power(p, 1)
    }

    pub(crate) fn prime_power(p: u64, e: u32) -> Self {
        debug_assert!(is_prime(p));
        let mut factors = BTreeMap::new();
        if e > 0 {
            factors.insert(p, e);
        }
        Self { factors }
    }

    pub fn from_u64(k: u64) -> Result<Self> {
        factorize(k)
    }

    pub fn from_biguint(k: &BigUint) -> Result<Self> {
        if k.is_one() {
            return Ok(Self::one());
        }
        let pairs = factor_big(k).map_err(Error::Domain)?;
        Ok(Self {
            factors: pairs.into_iter().collect(),
        })
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors.get(&p).copied().unwrap_or(0)
    }

    /// Prime support, ascending.
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.keys().copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (u64, u32)> + '_ {
        self.factors.iter().map(|(&p, &e)| (p, e))
    }

    pub fn num_primes(&self) -> usize {
        self.factors.len()
    }

    pub fn value(&self) -> BigUint {
        let mut acc = BigUint::one();
        for (&p, &e) in &self.factors {
            acc *= BigUint::from(p).pow(e);
        }
        acc
    }

    /// The value as `u64`, or `None` on overflow.
    pub fn to_u64(&self) -> Option<u64> {
        let mut acc: u64 = 1;
        for (&p, &e) in &self.factors {
            for _ in 0..e {
                acc = acc.checked_mul(p)?;
            }
        }
        Some(acc)
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            *factors.entry(p).or_insert(0) += e;
        }
        Self { factors }
    }

    pub fn pow(&self, k: u32) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .filter(|_| k > 0)
                .map(|(&p, &e)| (p, e * k))
                .collect(),
        }
    }

    pub fn divides(&self, other: &Self) -> bool {
        self.factors.iter().all(|(&p, &e)| other.exponent(p) >= e)
    }

    /// Exact quotient `self / other`; `None` unless `other` divides `self`.
    pub fn checked_div(&self, other: &Self) -> Option<Self> {
        if !other.divides(self) {
            return None;
        }
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.get_mut(&p).expect("divisibility checked");
            *slot -= e;
            if *slot == 0 {
                factors.remove(&p);
            }
        }
        Some(Self { factors })
    }

    pub fn gcd(&self, other: &Self) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .filter_map(|(&p, &e)| {
                    let f = e.min(other.exponent(p));
                    (f > 0).then_some((p, f))
                })
                .collect(),
        }
    }

    pub fn lcm(&self, other: &Self) -> Self {
        let mut factors = self.factors.clone();
        for (&p, &e) in &other.factors {
            let slot = factors.entry(p).or_insert(0);
            *slot = (*slot).max(e);
        }
        Self { factors }
    }

    /// Product of the distinct primes.
    pub fn radical(&self) -> Self {
        Self {
            factors: self.factors.keys().map(|&p| (p, 1)).collect(),
        }
    }

    pub fn is_coprime(&self, other: &Self) -> bool {
        self.primes().all(|p| other.exponent(p) == 0)
    }

    /// The part of `self` supported on the primes satisfying `keep`.
    pub fn restrict<F: Fn(u64) -> bool>(&self, keep: F) -> Self {
        Self {
            factors: self
                .factors
                .iter()
                .filter(|(&p, _)| keep(p))
                .map(|(&p, &e)| (p, e))
                .collect(),
        }
    }

    /// Pairwise coprime prime-power components, sorted by prime.
    pub fn crt_split(&self) -> Vec<FactoredInt> {
        self.factors
            .iter()
            .map(|(&p, &e)| Self::prime_power(p, e))
            .collect()
    }

    /// Parse either a factored string (`2^2*3*13`) or a plain decimal integer.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::Parse("empty integer".into()));
        }
        if !s.contains(['^', '*']) {
            let k = BigUint::from_str(s)
                .map_err(|_| Error::Parse(format!("not a positive integer: {s:?}")))?;
            if k == BigUint::ZERO {
                return Err(Error::Domain("integer must be positive".into()));
            }
            return Self::from_biguint(&k);
        }
        let mut acc = Self::one();
        for term in s.split('*') {
            let (base, exp) = match term.split_once('^') {
                Some((b, e)) => (b.trim(), e.trim()),
                None => (term.trim(), "1"),
            };
            let base: u64 = base
                .parse()
                .map_err(|_| Error::Parse(format!("bad factor {term:?} in {s:?}")))?;
            let exp: u32 = exp
                .parse()
                .map_err(|_| Error::Parse(format!("bad exponent {term:?} in {s:?}")))?;
            if base == 0 {
                return Err(Error::Domain("integer must be positive".into()));
            }
            acc = acc.mul(&factorize(base)?.pow(exp));
        }
        Ok(acc)
    }
}

/// Factor a positive integer.
pub fn factorize(k: u64) -> Result<FactoredInt> {
    if k == 0 {
        return Err(Error::Domain("factorize requires k >= 1".into()));
    }
    Ok(FactoredInt {
        factors: factor_u64(k).into_iter().collect(),
    })
}

/// Prime-power components of `m`, sorted by prime.
pub fn crt_split(m: &FactoredInt) -> Vec<FactoredInt> {
    m.crt_split()
}

impl fmt::Display for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("1");
        }
        let mut first = true;
        for (&p, &e) in &self.factors {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if e == 1 {
                write!(f, "{p}")?;
            } else {
                write!(f, "{p}^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for FactoredInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FactoredInt({self})")
    }
}

impl FromStr for FactoredInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse(s)
    }
}

impl PartialOrd for FactoredInt {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Numeric order.
impl Ord for FactoredInt {
    fn cmp(&self, other: &Self) -> Ordering {
        if self == other {
            return Ordering::Equal;
        }
        match (self.to_u64(), other.to_u64()) {
            (Some(a), Some(b)) => a.cmp(&b),
            _ => self.value().cmp(&other.value()),
        }
    }
}

impl Serialize for FactoredInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for FactoredInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        FactoredInt::parse(&s).map_err(serde::de::Error::custom)
    }
}

impl From<FactoredInt> for BigUint {
    fn from(f: FactoredInt) -> Self {
        f.value()
    }
}

impl TryFrom<u64> for FactoredInt {
    type Error = Error;

    fn try_from(k: u64) -> Result<Self> {
        factorize(k)
    }
}

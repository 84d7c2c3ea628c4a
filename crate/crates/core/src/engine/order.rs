//! Orders of SL(n, Z/mZ) and Sp(n, Z/mZ).

use std::collections::HashMap;
use std::sync::LazyLock;

use num_bigint::BigUint;
use num_traits::One;
use parking_lot::Mutex;

use crate::exact::FactoredInt;
use crate::group::GroupKind;

static POW_MINUS_ONE: LazyLock<Mutex<HashMap<(u64, u32), FactoredInt>>> =
    LazyLock::new(|| Mutex::new(HashMap::new()));

/// Values of the cyclotomic polynomials `Phi_d(x)` for every divisor `d` of `i`.
fn cyclotomic_values(x: u64, i: u32) -> Vec<BigUint> {
    let x = BigUint::from(x);
    let mut phi: HashMap<u32, BigUint> = HashMap::new();
    let divisors: Vec<u32> = (1..=i).filter(|d| i % d == 0).collect();
    for &d in &divisors {
        let mut v = x.pow(d) - BigUint::one();
        for (&e, val) in &phi {
            if d % e == 0 {
                v /= val;
            }
        }
        phi.insert(d, v);
    }
    divisors.iter().map(|d| phi[d].clone()).collect()
}

/// `p^i - 1`, factored through its cyclotomic pieces and memoized.
pub(crate) fn pow_minus_one(p: u64, i: u32) -> FactoredInt {
    if let Some(f) = POW_MINUS_ONE.lock().get(&(p, i)) {
        return f.clone();
    }
    let f = cyclotomic_values(p, i)
        .iter()
        .fold(FactoredInt::one(), |acc, v| {
            acc.mul(&FactoredInt::from_biguint(v).expect("cyclotomic values have 64-bit prime factors"))
        });
    POW_MINUS_ONE.lock().insert((p, i), f.clone());
    f
}

/// Dimension of the Lie algebra, i.e. the maximal rank of a congruence
/// kernel layer: `n^2 - 1` for SL and `d(2d + 1)` for Sp(2d).
pub fn layer_dimension(kind: GroupKind, n: usize) -> u32 {
    match kind {
        GroupKind::SpecialLinear => (n * n - 1) as u32,
        GroupKind::Symplectic => {
            let d = n / 2;
            (d * (2 * d + 1)) as u32
        }
    }
}

/// `|Gamma(n, Z/p^k)|`.
pub fn full_order_prime_power(kind: GroupKind, n: usize, p: u64, k: u32) -> FactoredInt {
    if k == 0 {
        return FactoredInt::one();
    }
    let pf = FactoredInt::prime(p);
    match kind {
        GroupKind::SpecialLinear => {
            let mut acc = pf.pow((k - 1) * layer_dimension(kind, n) + (n * (n - 1) / 2) as u32);
            for i in 2..=n as u32 {
                acc = acc.mul(&pow_minus_one(p, i));
            }
            acc
        }
        GroupKind::Symplectic => {
            let d = (n / 2) as u32;
            let mut acc = pf.pow((k - 1) * layer_dimension(kind, n) + d * d);
            for i in 1..=d {
                acc = acc.mul(&pow_minus_one(p, 2 * i));
            }
            acc
        }
    }
}

/// `|Gamma(n, Z/mZ)|`, multiplicative over the prime-power components;
/// 1 for `m = 1`.
pub fn full_order(kind: GroupKind, n: usize, m: &FactoredInt) -> FactoredInt {
    m.iter().fold(FactoredInt::one(), |acc, (p, k)| {
        acc.mul(&full_order_prime_power(kind, n, p, k))
    })
}

/// Plain-integer variant used by tests and diagnostics.
pub fn full_order_value(kind: GroupKind, n: usize, m: &FactoredInt) -> BigUint {
    full_order(kind, n, m).value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::factorize;

    fn sl(n: usize, m: u64) -> u64 {
        full_order(GroupKind::SpecialLinear, n, &factorize(m).unwrap())
            .to_u64()
            .unwrap()
    }

    fn sp(n: usize, m: u64) -> u64 {
        full_order(GroupKind::Symplectic, n, &factorize(m).unwrap())
            .to_u64()
            .unwrap()
    }

    #[test]
    fn small_orders() {
        assert_eq!(sl(2, 5), 120);
        assert_eq!(sl(2, 11), 1320);
        assert_eq!(sl(2, 36), 31104);
        assert_eq!(sl(2, 55), 158_400);
        assert_eq!(sl(2, 1), 1);
        assert_eq!(sl(3, 2), 168);
        assert_eq!(sl(3, 4), 43008);
        assert_eq!(sp(4, 2), 720);
        assert_eq!(sp(4, 3), 51840);
        assert_eq!(sp(2, 7), sl(2, 7));
    }

    #[test]
    fn sp4_mod_29() {
        let f = full_order(GroupKind::Symplectic, 4, &factorize(29).unwrap());
        assert_eq!(f.to_string(), "2^7*3^2*5^2*7^2*29^4*421");
    }

    #[test]
    fn cyclotomic_split_is_exact() {
        assert_eq!(pow_minus_one(13633, 2).to_u64(), Some(13633u64 * 13633 - 1));
        assert_eq!(pow_minus_one(97, 5).to_u64(), Some(97u64.pow(5) - 1));
        // beyond 64 bits
        let big = pow_minus_one(10_007, 5).value();
        assert_eq!(big, BigUint::from(10_007u64).pow(5) - BigUint::one());
    }
}

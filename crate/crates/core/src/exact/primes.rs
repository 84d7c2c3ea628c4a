//! Primality testing and integer factorization.
//!
//! Trial division up to 10^6 followed by Brent's variant of Pollard's rho,
//! with every reported factor certified by deterministic Miller-Rabin.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use std::sync::LazyLock;

const TRIAL_LIMIT: u64 = 1_000_000;

static SMALL_PRIMES: LazyLock<Vec<u64>> = LazyLock::new(|| primes_up_to(TRIAL_LIMIT));

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(bound: u64) -> Vec<u64> {
    if bound < 2 {
        return Vec::new();
    }
    let n = bound as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho_u64(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut y, mut r, mut q) = (2u64, 1u64, 1u64);
        let (mut g, mut x, mut ys) = (1u64, 0u64, 0u64);
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..(128.min(r - k)) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = q.gcd(&n);
                k += 128;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = x.abs_diff(ys).gcd(&n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn split_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = rho_u64(n);
    split_u64(d, out);
    split_u64(n / d, out);
}

fn collect(mut primes: Vec<u64>) -> Vec<(u64, u32)> {
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Full factorization of `n >= 1` as sorted `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factor_u64 requires n >= 1");
    let mut found = Vec::new();
    for &p in [2u64, 3, 5, 7, 11, 13].iter() {
        while n % p == 0 {
            found.push(p);
            n /= p;
        }
    }
    if n > 1 && n < 289 {
        found.push(n);
        n = 1;
    }
    if n > 1 && !is_prime(n) {
        // Small cofactors are cheapest by trial division; larger ones go to rho.
        if n < 1 << 40 {
            for &p in SMALL_PRIMES.iter().skip(6) {
                if p * p > n {
                    break;
                }
                while n % p == 0 {
                    found.push(p);
                    n /= p;
                }
            }
        }
        split_u64(n, &mut found);
    } else if n > 1 {
        found.push(n);
    }
    collect(found)
}

fn big_is_probable_prime(n: &BigUint) -> bool {
    let one = BigUint::one();
    let two = &one + &one;
    if n < &two {
        return false;
    }
    let n_minus_1 = n - &one;
    let s = n_minus_1.trailing_zeros().unwrap_or(0);
    let d = &n_minus_1 >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53] {
        let a = BigUint::from(a);
        if &a >= n {
            continue;
        }
        let mut x = a.modpow(&d, n);
        if x == one || x == n_minus_1 {
            continue;
        }
        for _ in 1..s {
            x = x.modpow(&two, n);
            if x == n_minus_1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn big_rho(n: &BigUint) -> BigUint {
    let mut c = BigUint::one();
    loop {
        let f = |x: &BigUint| (x * x + &c) % n;
        let mut x = BigUint::from(2u32);
        let mut y = x.clone();
        let mut g = BigUint::one();
        while g.is_one() {
            x = f(&x);
            y = f(&f(&y));
            let diff = if x > y { &x - &y } else { &y - &x };
            g = diff.gcd(n);
        }
        if &g != n {
            return g;
        }
        c += 1u32;
    }
}

fn split_big(n: BigUint, out: &mut Vec<u64>) -> Result<(), String> {
    if n.is_one() {
        return Ok(());
    }
    if let Some(small) = n.to_u64() {
        out.extend(factor_u64(small).into_iter().flat_map(|(p, e)| std::iter::repeat(p).take(e as usize)));
        return Ok(());
    }
    if big_is_probable_prime(&n) {
        return Err(format!("prime factor {n} exceeds 64 bits"));
    }
    let d = big_rho(&n);
    let q = &n / &d;
    split_big(d, out)?;
    split_big(q, out)
}

/// Factorization of an arbitrary-precision integer whose prime factors fit in
/// 64 bits. Errors when a prime factor is larger.
pub fn factor_big(n: &BigUint) -> Result<Vec<(u64, u32)>, String> {
    if n.is_zero() {
        return Err("cannot factor 0".into());
    }
    if let Some(small) = n.to_u64() {
        return Ok(factor_u64(small));
    }
    let mut rest = n.clone();
    let mut found = Vec::new();
    for &p in SMALL_PRIMES.iter() {
        if rest.to_u64().is_some() {
            break;
        }
        let bp = BigUint::from(p);
        while (&rest % &bp).is_zero() {
            rest /= &bp;
            found.push(p);
        }
    }
    split_big(rest, &mut found)?;
    Ok(collect(found))
}

/// Primes `p` with `lo <= p <= hi`.
pub fn primes_between(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p >= lo).collect()
}

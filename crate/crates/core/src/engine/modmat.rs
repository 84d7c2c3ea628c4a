//! Dense square matrices over `Z/mZ` for moduli below 2^62.

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::exact::primes::{inv_mod, mul_mod};
use crate::exact::RatMatrix;

use num_bigint::{BigInt, Sign};
use num_traits::ToPrimitive;

/// Row-major entries; the degree and modulus live in the [`MatRing`].
pub type ModMat = SmallVec<[u64; 16]>;

pub(crate) const MAX_MODULUS: u64 = 1 << 62;

/// Arithmetic context for `n x n` matrices modulo `m`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatRing {
    n: usize,
    m: u64,
    // n * (m-1)^2 fits in a u64, so row sums need one reduction.
    narrow: bool,
}

impl MatRing {
    pub fn new(n: usize, m: u64) -> Result<Self> {
        if m < 1 || m >= MAX_MODULUS {
            return Err(Error::ResourceExceeded {
                modulus: m.to_string(),
                level: "arithmetic".into(),
                detail: "moduli must lie below 2^62".into(),
            });
        }
        let bound = (m as u128 - 1).pow(2) * n as u128;
        Ok(Self {
            n,
            m,
            narrow: bound < u64::MAX as u128,
        })
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.m
    }

    pub fn identity(&self) -> ModMat {
        let mut out: ModMat = SmallVec::from_elem(0, self.n * self.n);
        if self.m > 1 {
            for i in 0..self.n {
                out[i * self.n + i] = 1;
            }
        }
        out
    }

    pub fn is_identity(&self, a: &[u64]) -> bool {
        let n = self.n;
        let one = if self.m > 1 { 1 } else { 0 };
        a.iter()
            .enumerate()
            .all(|(k, &v)| v == if k / n == k % n { one } else { 0 })
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> ModMat {
        let n = self.n;
        let m = self.m;
        let mut out: ModMat = SmallVec::from_elem(0, n * n);
        if self.narrow {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u64;
                    for k in 0..n {
                        acc += a[i * n + k] * b[k * n + j];
                    }
                    out[i * n + j] = acc % m;
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = 0u128;
                    for k in 0..n {
                        acc += a[i * n + k] as u128 * b[k * n + j] as u128;
                    }
                    out[i * n + j] = (acc % m as u128) as u64;
                }
            }
        }
        out
    }

    pub fn pow(&self, a: &[u64], mut e: u64) -> ModMat {
        let mut base: ModMat = a.into();
        let mut acc = self.identity();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            e >>= 1;
            if e > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }

    fn det_rec(&self, a: &[u64], n: usize) -> u64 {
        let m = self.m;
        match n {
            1 => a[0] % m,
            2 => (mul_mod(a[0], a[3], m) + m - mul_mod(a[1], a[2], m)) % m,
            _ => {
                let mut acc = 0u64;
                let mut minor = vec![0u64; (n - 1) * (n - 1)];
                for col in 0..n {
                    if a[col] == 0 {
                        continue;
                    }
                    let mut k = 0;
                    for r in 1..n {
                        for c in 0..n {
                            if c != col {
                                minor[k] = a[r * n + c];
                                k += 1;
                            }
                        }
                    }
                    let term = mul_mod(a[col], self.det_rec(&minor, n - 1), m);
                    acc = if col % 2 == 0 {
                        (acc + term) % m
                    } else {
                        (acc + m - term) % m
                    };
                }
                acc
            }
        }
    }

    pub fn det(&self, a: &[u64]) -> u64 {
        self.det_rec(a, self.n)
    }

    /// Adjugate matrix; equals the inverse for determinant-one matrices.
    pub fn adjugate(&self, a: &[u64]) -> ModMat {
        let n = self.n;
        let m = self.m;
        let mut out: ModMat = SmallVec::from_elem(0, n * n);
        if n == 1 {
            out[0] = 1 % m;
            return out;
        }
        let mut minor = vec![0u64; (n - 1) * (n - 1)];
        for i in 0..n {
            for j in 0..n {
                let mut k = 0;
                for r in 0..n {
                    if r == i {
                        continue;
                    }
                    for c in 0..n {
                        if c != j {
                            minor[k] = a[r * n + c];
                            k += 1;
                        }
                    }
                }
                let d = self.det_rec(&minor, n - 1);
                // cofactor (i, j) lands at (j, i)
                out[j * n + i] = if (i + j) % 2 == 0 { d } else { (m - d) % m };
            }
        }
        out
    }

    /// Inverse of a determinant-one matrix.
    pub fn inverse_sl(&self, a: &[u64]) -> ModMat {
        debug_assert_eq!(self.det(a), 1 % self.m);
        self.adjugate(a)
    }

    pub fn transpose(&self, a: &[u64]) -> ModMat {
        let n = self.n;
        let mut out: ModMat = SmallVec::from_elem(0, n * n);
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = a[i * n + j];
            }
        }
        out
    }

    /// Reduce the entries of `a` modulo a divisor `q` of the modulus.
    pub fn reduce(&self, a: &[u64], q: u64) -> ModMat {
        debug_assert_eq!(self.m % q, 0);
        a.iter().map(|&x| x % q).collect()
    }

    /// Entrywise image of a rational matrix; fails when a denominator is not
    /// invertible modulo `m`.
    pub fn from_rat(&self, g: &RatMatrix) -> Result<ModMat> {
        if g.degree() != self.n {
            return Err(Error::Domain("degree mismatch in reduction".into()));
        }
        let m = self.m;
        let big_m = BigInt::from(m);
        let red = |x: &BigInt| -> u64 {
            let r = x % &big_m;
            let r = if r.sign() == Sign::Minus { r + &big_m } else { r };
            r.to_u64().expect("residue fits")
        };
        g.entries()
            .iter()
            .map(|e| {
                let num = red(e.numer());
                let den = red(e.denom());
                let inv = inv_mod(den, m).ok_or_else(|| {
                    Error::Domain(format!("denominator {} not invertible mod {m}", e.denom()))
                })?;
                Ok(mul_mod(num, inv, m))
            })
            .collect()
    }

    pub fn rows(&self, a: &[u64]) -> Vec<Vec<u64>> {
        a.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn adjugate_inverts_det_one() {
        let r = MatRing::new(3, 1_000_000_007 * 3).unwrap();
        let a: ModMat = SmallVec::from_slice(&[1, 2, 3, 0, 1, 4, 5, 6, 0]);
        // det = 1*(0-24) - 2*(0-20) + 3*(0-5) = 1
        assert_eq!(r.det(&a), 1);
        let inv = r.inverse_sl(&a);
        assert!(r.is_identity(&r.mul(&a, &inv)));
        assert!(r.is_identity(&r.mul(&inv, &a)));
    }

    #[test]
    fn wide_and_narrow_products_agree() {
        let big = MatRing::new(2, (1 << 61) - 1).unwrap();
        assert!(!big.narrow);
        let a: ModMat = SmallVec::from_slice(&[(1 << 61) - 2, 5, 7, 3]);
        let sq = big.mul(&a, &a);
        // (-1)^2 + 5*7 = 36
        assert_eq!(sq[0], 36);
        let small = MatRing::new(2, 97).unwrap();
        assert!(small.narrow);
        let b: ModMat = SmallVec::from_slice(&[96, 5, 7, 3]);
        assert_eq!(small.mul(&b, &b)[0], 36);
    }

    #[test]
    fn rational_reduction() {
        let r = MatRing::new(2, 5).unwrap();
        let g = RatMatrix::from_rows(vec![
            vec![rat(0, 1), rat(-11, 3)],
            vec![rat(3, 11), rat(1, 1)],
        ])
        .unwrap();
        // -11/3 = -11 * 2 = -22 = 3 mod 5 ; 3/11 = 3 * 1 = 3 mod 5
        assert_eq!(r.from_rat(&g).unwrap().as_slice(), &[0, 3, 3, 1]);
        let r11 = MatRing::new(2, 11).unwrap();
        assert!(r11.from_rat(&g).is_err());
    }

    #[test]
    fn pow_matches_repeated_product() {
        let r = MatRing::new(2, 36).unwrap();
        let a: ModMat = SmallVec::from_slice(&[1, 1, 0, 1]);
        assert_eq!(r.pow(&a, 35).as_slice(), &[1, 35, 0, 1]);
        assert!(r.is_identity(&r.pow(&a, 36)));
    }
}

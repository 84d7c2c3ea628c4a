//! Square matrices over the rationals.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number; always stored in lowest terms with positive
/// denominator.
pub type Rat = BigRational;

/// Parse `"a/b"`, `"a"` or `"-a/b"` into a reduced rational.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let num = BigInt::from_str(a.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(b.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Domain(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(num, den))
        }
        None => Ok(Rat::from_integer(BigInt::from_str(s).map_err(|_| bad())?)),
    }
}

/// Render a rational as `"a/b"`, or `"a"` when integral.
pub fn format_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    n: usize,
    entries: Vec<Rat>,
}

impl RatMatrix {
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n);
        for i in 0..n {
            m.entries[i * n + i] = Rat::one();
        }
        m
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            entries: vec![Rat::zero(); n * n],
        }
    }

    pub fn from_rows(rows: Vec<Vec<Rat>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Domain("matrix must be square and nonempty".into()));
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Convenience constructor from integer rows.
    pub fn from_int_rows(rows: &[&[i64]]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| int(x)).collect()).collect())
    }

    /// Parse rows of `"a/b"` strings.
    pub fn parse_rows<S: AsRef<str>>(rows: &[Vec<S>]) -> Result<Self> {
        let parsed = rows
            .iter()
            .map(|r| r.iter().map(|s| parse_rat(s.as_ref())).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(parsed)
    }

    /// The elementary matrix with ones on the diagonal and `a` at `(i, j)`.
    pub fn elementary(n: usize, i: usize, j: usize, a: Rat) -> Self {
        assert!(i != j && i < n && j < n);
        let mut m = Self::identity(n);
        m.entries[i * n + j] = a;
        m
    }

    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rat {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rat) {
        self.entries[i * self.n + j] = v;
    }

    pub fn entries(&self) -> &[Rat] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<Rat>> {
        self.entries.chunks(self.n).map(|r| r.to_vec()).collect()
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries
            .chunks(self.n)
            .map(|r| r.iter().map(format_rat).collect())
            .collect()
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.n)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut t = Self::zero(n);
        for i in 0..n {
            for j in 0..n {
                t.entries[j * n + i] = self.get(i, j).clone();
            }
        }
        t
    }

    fn check_conformable(&self, other: &Self) -> Result<()> {
        if self.n != other.n {
            return Err(Error::Domain(format!(
                "degree mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        Ok(())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_conformable(other)?;
        let n = self.n;
        let mut out = Self::zero(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_conformable(other)?;
        Ok(Self {
            n: self.n,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Row-reduces a copy of the matrix; returns the rank and the determinant.
    fn eliminate(&self) -> (usize, Rat) {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut det = Rat::one();
        let mut rank = 0;
        for col in 0..n {
            let Some(piv) = (rank..n).find(|&r| !a[r * n + col].is_zero()) else {
                det = Rat::zero();
                continue;
            };
            if piv != rank {
                for j in 0..n {
                    a.swap(piv * n + j, rank * n + j);
                }
                det = -det;
            }
            let p = a[rank * n + col].clone();
            det *= &p;
            for r in (rank + 1)..n {
                let f = &a[r * n + col] / &p;
                if f.is_zero() {
                    continue;
                }
                for j in col..n {
                    let v = &f * &a[rank * n + j];
                    a[r * n + j] -= v;
                }
            }
            rank += 1;
        }
        (rank, det)
    }

    pub fn det(&self) -> Rat {
        self.eliminate().1
    }

    pub fn rank(&self) -> usize {
        self.eliminate().0
    }

    /// Exact inverse by Gauss-Jordan elimination.
    pub fn inverse(&self) -> Result<Self> {
        let n = self.n;
        let mut a = self.entries.clone();
        let mut inv = Self::identity(n).entries;
        for col in 0..n {
            let piv = (col..n)
                .find(|&r| !a[r * n + col].is_zero())
                .ok_or_else(|| Error::Domain("singular matrix".into()))?;
            if piv != col {
                for j in 0..n {
                    a.swap(piv * n + j, col * n + j);
                    inv.swap(piv * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].clone();
            for j in 0..n {
                a[col * n + j] /= &p;
                inv[col * n + j] /= &p;
            }
            for r in 0..n {
                if r == col || a[r * n + col].is_zero() {
                    continue;
                }
                let f = a[r * n + col].clone();
                for j in 0..n {
                    let va = &f * &a[col * n + j];
                    a[r * n + j] -= va;
                    let vi = &f * &inv[col * n + j];
                    inv[r * n + j] -= vi;
                }
            }
        }
        let inv = Self { n, entries: inv };
        debug_assert!(self.mul(&inv).map(|m| m.is_identity()).unwrap_or(false));
        Ok(inv)
    }

    /// Integer power; negative exponents go through the inverse.
    pub fn pow(&self, k: i64) -> Result<Self> {
        let mut base = if k < 0 { self.inverse()? } else { self.clone() };
        let mut e = k.unsigned_abs();
        let mut acc = Self::identity(self.n);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// `h^-1 * self * h`.
    pub fn conjugate_by(&self, h: &Self) -> Result<Self> {
        h.inverse()?.mul(self)?.mul(h)
    }

    /// Least common multiple of the entry denominators.
    pub fn denominator_lcm(&self) -> BigUint {
        self.entries.iter().fold(BigUint::one(), |acc, e| {
            acc.lcm(e.denom().magnitude())
        })
    }

    /// Whether every entry is an integer.
    pub fn is_integral(&self) -> bool {
        self.entries.iter().all(|e| e.denom().is_one())
    }

    /// Largest absolute value of a numerator, for diagnostics.
    pub fn height(&self) -> BigInt {
        self.entries
            .iter()
            .map(|e| e.numer().abs())
            .max()
            .unwrap_or_default()
    }
}

impl fmt::Debug for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, row) in self.to_strings().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "[{}]", row.join(", "))?;
        }
        f.write_str("]")
    }
}

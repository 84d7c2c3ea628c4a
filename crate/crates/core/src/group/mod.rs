//! Input groups: kind, generators, coefficient ring and congruence images.

pub mod catalog;
mod input;

use std::collections::BTreeSet;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::engine::{FiniteImage, MatRing};
use crate::error::{Error, Result};
use crate::exact::{int, FactoredInt, RatMatrix};

pub use input::SpecFile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupKind {
    #[serde(rename = "SL")]
    SpecialLinear,
    #[serde(rename = "Sp")]
    Symplectic,
}

impl fmt::Display for GroupKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GroupKind::SpecialLinear => "SL",
            GroupKind::Symplectic => "Sp",
        })
    }
}

/// The antidiagonal form preserved by the degree-4 catalog groups:
/// rows `[0,0,0,1], [0,0,-1,0], [0,1,0,0], [-1,0,0,0]`.
pub fn antidiagonal_form4() -> RatMatrix {
    RatMatrix::from_int_rows(&[&[0, 0, 0, 1], &[0, 0, -1, 0], &[0, 1, 0, 0], &[-1, 0, 0, 0]])
        .expect("square")
}

/// The block form `[[0, 1], [-1, 0]]` with identity blocks of size `n/2`.
pub fn block_form(n: usize) -> RatMatrix {
    let h = n / 2;
    let mut f = RatMatrix::zero(n);
    for i in 0..h {
        f.set(i, h + i, int(1));
        f.set(h + i, i, int(-1));
    }
    f
}

/// Default symplectic form for a given even degree.
pub fn default_form(n: usize) -> RatMatrix {
    if n == 4 {
        antidiagonal_form4()
    } else {
        block_form(n)
    }
}

/// A finitely generated subgroup of SL(n, Q) or Sp(n, Q), validated.
///
/// Construction checks determinants and form preservation and derives the
/// coefficient ring `Z[1/mu]`. The struct is immutable afterwards.
#[derive(Clone, Debug)]
pub struct GroupSpec {
    kind: GroupKind,
    degree: usize,
    generators: Vec<RatMatrix>,
    inverses: Vec<RatMatrix>,
    form: Option<RatMatrix>,
    mu: FactoredInt,
    pi: Option<BTreeSet<u64>>,
    density_asserted: bool,
    name: Option<String>,
}

impl GroupSpec {
    /// Validate and assemble a group. For the symplectic kind a missing form
    /// defaults to [`default_form`].
    pub fn new(
        kind: GroupKind,
        generators: Vec<RatMatrix>,
        form: Option<RatMatrix>,
        pi: Option<BTreeSet<u64>>,
        density_asserted: bool,
    ) -> Result<Self> {
        let degree = generators
            .first()
            .map(RatMatrix::degree)
            .ok_or_else(|| Error::Domain("at least one generator is required".into()))?;
        if degree < 2 {
            return Err(Error::Degree(format!("degree must be at least 2, got {degree}")));
        }
        let form = match kind {
            GroupKind::SpecialLinear => {
                if form.is_some() {
                    return Err(Error::Domain("a form matrix is only meaningful for Sp".into()));
                }
                None
            }
            GroupKind::Symplectic => {
                if degree % 2 != 0 {
                    return Err(Error::Degree(format!(
                        "symplectic groups need even degree, got {degree}"
                    )));
                }
                Some(form.unwrap_or_else(|| default_form(degree)))
            }
        };
        let mut spec = Self {
            kind,
            degree,
            generators,
            inverses: Vec::new(),
            form,
            mu: FactoredInt::one(),
            pi,
            density_asserted,
            name: None,
        };
        validate(&spec)?;
        spec.inverses = spec
            .generators
            .iter()
            .map(RatMatrix::inverse)
            .collect::<Result<_>>()?;
        spec.mu = derive_ring(&spec.generators)?;
        if let Some(pi) = &spec.pi {
            for &p in pi {
                if !crate::exact::primes::is_prime(p) {
                    return Err(Error::Domain(format!("Pi entry {p} is not prime")));
                }
                if spec.mu.exponent(p) > 0 {
                    return Err(Error::Domain(format!("Pi entry {p} divides mu = {}", spec.mu)));
                }
            }
        }
        Ok(spec)
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Replace the certified prime set.
    pub fn with_pi(mut self, pi: Option<BTreeSet<u64>>) -> Result<Self> {
        if let Some(set) = &pi {
            if let Some(&p) = set.iter().find(|&&p| self.mu.exponent(p) > 0 || !crate::exact::primes::is_prime(p)) {
                return Err(Error::Domain(format!("invalid Pi entry {p} for mu = {}", self.mu)));
            }
        }
        self.pi = pi;
        Ok(self)
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[RatMatrix] {
        &self.generators
    }

    pub fn inverses(&self) -> &[RatMatrix] {
        &self.inverses
    }

    pub fn form(&self) -> Option<&RatMatrix> {
        self.form.as_ref()
    }

    /// Squarefree `mu` with `Z[1/mu]` the coefficient ring.
    pub fn mu(&self) -> &FactoredInt {
        &self.mu
    }

    pub fn pi(&self) -> Option<&BTreeSet<u64>> {
        self.pi.as_ref()
    }

    pub fn density_asserted(&self) -> bool {
        self.density_asserted
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    /// `1/p` for every prime `p` of `mu`.
    pub fn s_set(&self) -> Vec<String> {
        self.mu.primes().map(|p| format!("1/{p}")).collect()
    }

    /// Whether `m` avoids the primes of `mu`.
    pub fn admits_modulus(&self, m: &FactoredInt) -> bool {
        m.is_coprime(&self.mu)
    }

    pub(crate) fn check_modulus(&self, m: &FactoredInt) -> Result<()> {
        if !self.admits_modulus(m) {
            return Err(Error::ModulusNotCoprime {
                modulus: m.to_string(),
                mu: self.mu.to_string(),
            });
        }
        Ok(())
    }

    /// The congruence image modulo `m`.
    pub fn reduce_mod(&self, m: &FactoredInt) -> Result<FiniteImage> {
        reduce_mod(self, m)
    }
}

/// Radical of the lcm of all entry denominators of the generators and their
/// inverses.
pub fn derive_ring(generators: &[RatMatrix]) -> Result<FactoredInt> {
    let mut acc = FactoredInt::one();
    for g in generators {
        let inv = g.inverse()?;
        for mat in [g, &inv] {
            let den = mat.denominator_lcm();
            acc = acc.lcm(&FactoredInt::from_biguint(&den)?.radical());
        }
    }
    Ok(acc)
}

/// Check determinant one and, for symplectic groups, even degree and
/// preservation of the form.
pub fn validate(spec: &GroupSpec) -> Result<()> {
    let n = spec.degree;
    if spec.kind == GroupKind::Symplectic && n % 2 != 0 {
        return Err(Error::Degree(format!("symplectic groups need even degree, got {n}")));
    }
    for (index, g) in spec.generators.iter().enumerate() {
        if g.degree() != n {
            return Err(Error::Degree(format!(
                "generator {index} has degree {} but the group has degree {n}",
                g.degree()
            )));
        }
        let det = g.det();
        if !det.is_one() {
            return Err(Error::NotInGroup {
                index,
                reason: format!("determinant {det}"),
            });
        }
    }
    if let Some(form) = &spec.form {
        if form.degree() != n {
            return Err(Error::Degree("form degree differs from group degree".into()));
        }
        if form.transpose() != negate(form) {
            return Err(Error::Domain("form matrix is not antisymmetric".into()));
        }
        if form.det().is_zero() {
            return Err(Error::Domain("form matrix is singular".into()));
        }
        for (index, g) in spec.generators.iter().enumerate() {
            if g.transpose().mul(form)?.mul(g)? != *form {
                return Err(Error::NotSymplectic { index });
            }
        }
    }
    Ok(())
}

fn negate(m: &RatMatrix) -> RatMatrix {
    let n = m.degree();
    let mut out = RatMatrix::zero(n);
    for i in 0..n {
        for j in 0..n {
            out.set(i, j, -m.get(i, j).clone());
        }
    }
    out
}

/// Entrywise reduction of every generator modulo `m`.
pub fn reduce_mod(spec: &GroupSpec, m: &FactoredInt) -> Result<FiniteImage> {
    spec.check_modulus(m)?;
    let value = m.to_u64().ok_or_else(|| Error::ResourceExceeded {
        modulus: m.to_string(),
        level: "reduction".into(),
        detail: "modulus does not fit in 64 bits".into(),
    })?;
    if value < 2 {
        return Err(Error::Domain("reduction needs a modulus of at least 2".into()));
    }
    let ring = MatRing::new(spec.degree, value)?;
    let gens = spec
        .generators
        .iter()
        .map(|g| ring.from_rat(g))
        .collect::<Result<Vec<_>>>()?;
    let form = spec.form.as_ref().map(|f| ring.from_rat(f)).transpose()?;
    FiniteImage::new(spec.kind, m.clone(), ring, gens, form)
}

/// Whether `g - 1` is nonzero, squares to zero, and has rank one.
pub fn is_transvection(g: &RatMatrix) -> bool {
    let n = g.degree();
    let Ok(x) = g.sub(&RatMatrix::identity(n)) else {
        return false;
    };
    if x.is_zero() {
        return false;
    }
    match x.mul(&x) {
        Ok(sq) => sq.is_zero() && x.rank() == 1,
        Err(_) => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{factorize, rat, Rat};

    fn g_s(s: Rat) -> Vec<RatMatrix> {
        let t = RatMatrix::from_int_rows(&[&[0, 1], &[-1, 0]]).unwrap();
        let k = RatMatrix::from_rows(vec![
            vec![int(0), -s.clone()],
            vec![s.recip(), int(1)],
        ])
        .unwrap();
        vec![t, k]
    }

    #[test]
    fn ring_of_integral_group_is_z() {
        let gens = vec![RatMatrix::from_int_rows(&[&[-11, -105], &[2, 19]]).unwrap()];
        assert!(derive_ring(&gens).unwrap().is_one());
    }

    #[test]
    fn ring_reads_denominators_of_inverses() {
        assert_eq!(derive_ring(&g_s(int(11))).unwrap(), factorize(11).unwrap());
        assert_eq!(derive_ring(&g_s(rat(11, 3))).unwrap(), factorize(33).unwrap());
        // squarefree even when denominators are prime powers
        assert_eq!(derive_ring(&g_s(rat(1, 9))).unwrap(), factorize(3).unwrap());
    }

    #[test]
    fn rejects_bad_determinant() {
        let g = RatMatrix::from_int_rows(&[&[2, 0], &[0, 1]]).unwrap();
        let err = GroupSpec::new(GroupKind::SpecialLinear, vec![g], None, None, false).unwrap_err();
        assert!(matches!(err, Error::NotInGroup { index: 0, .. }));
    }

    #[test]
    fn rejects_odd_symplectic_degree() {
        let err = GroupSpec::new(GroupKind::Symplectic, vec![RatMatrix::identity(3)], None, None, false)
            .unwrap_err();
        assert!(matches!(err, Error::Degree(_)));
    }

    #[test]
    fn rejects_non_symplectic_generator() {
        let g = RatMatrix::elementary(4, 0, 1, int(1));
        let err = GroupSpec::new(GroupKind::Symplectic, vec![g], None, None, false).unwrap_err();
        assert_eq!(err, Error::NotSymplectic { index: 0 });
    }

    #[test]
    fn rejects_pi_entries_dividing_mu() {
        let err = GroupSpec::new(
            GroupKind::SpecialLinear,
            g_s(int(11)),
            None,
            Some([11].into_iter().collect()),
            true,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Domain(_)));
    }

    #[test]
    fn transvections() {
        assert!(is_transvection(&RatMatrix::elementary(4, 3, 0, int(3))));
        assert!(!is_transvection(&RatMatrix::identity(3)));
        assert!(!is_transvection(&RatMatrix::from_int_rows(&[&[0, 1], &[-1, 0]]).unwrap()));
        // unipotent but rank two
        let mut u = RatMatrix::identity(4);
        u.set(0, 2, int(1));
        u.set(1, 3, int(1));
        assert!(!is_transvection(&u));
    }

    #[test]
    fn reduction_requires_coprime_modulus() {
        let spec = GroupSpec::new(GroupKind::SpecialLinear, g_s(int(11)), None, None, true).unwrap();
        let img = spec.reduce_mod(&factorize(5).unwrap()).unwrap();
        assert_eq!(img.generator_rows(0), vec![vec![0, 1], vec![4, 0]]);
        assert!(matches!(
            spec.reduce_mod(&factorize(11).unwrap()),
            Err(Error::ModulusNotCoprime { .. })
        ));
    }
}

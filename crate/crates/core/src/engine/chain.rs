//! Stabilizer chain for subgroups of `SL(n, Z/m)`.
//!
//! For each prime `p | m` (ascending) the chain first walks the projective
//! points `<e_1>, ..., <e_n>, <e_1 + ... + e_n>` mod `p`, then the vector
//! `e_1` mod `p` (odd `p` only). After those levels an element is `1 mod p`.
//! The congruence layers `p^{j-1} -> p^j` are elementary abelian and are
//! handled by linear algebra on `(g - 1) / p^{j-1} mod p`, so no orbit ever
//! lives mod a higher power of `p`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashMap;
use serde::Serialize;

use super::modmat::{MatRing, ModMat};
use crate::error::{Error, Result};
use crate::exact::primes::{inv_mod, mul_mod};
use crate::exact::FactoredInt;

#[derive(Clone, Debug)]
pub struct ChainConfig {
    /// Largest orbit any single level may hold.
    pub orbit_budget: usize,
    /// Consecutive random elements that must sift before the deterministic
    /// verification pass starts.
    pub random_rounds: usize,
    pub seed: u64,
}

impl Default for ChainConfig {
    fn default() -> Self {
        Self {
            orbit_budget: 2_000_000,
            random_rounds: 24,
            seed: 0x5eed_1e7e1,
        }
    }
}

#[derive(Clone, Debug)]
enum Base {
    Line { p: u64, v: Vec<u64> },
    Vector { p: u64, v: Vec<u64> },
    Layer { p: u64, j: u32, q: u64 },
}

impl Base {
    fn describe(&self) -> String {
        match self {
            Base::Line { p, v } => format!("line {v:?} mod {p}"),
            Base::Vector { p, v } => format!("vector {v:?} mod {p}"),
            Base::Layer { p, j, .. } => format!("kernel {p}^{} -> {p}^{j}", j - 1),
        }
    }
}

struct Orbit {
    points: Vec<u64>,
    index: FxHashMap<u64, u32>,
    // inverse transversal elements, n*n words each
    inv_trans: Vec<u64>,
    // generators acting here: (reduced mod p, inverse mod m)
    acting: Vec<(ModMat, ModMat)>,
}

struct Layer {
    rows: Vec<(Vec<u64>, usize)>,
    elems: Vec<usize>,
}

enum Data {
    Orbit(Orbit),
    Layer(Layer),
}

struct Level {
    base: Base,
    data: Data,
}

struct Strong {
    g: ModMat,
    inv: ModMat,
    level: usize,
}

enum Sift {
    Identity,
    Residue(usize, ModMat),
}

/// One level of a [`StabChain`], for diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct LevelSummary {
    pub base: String,
    pub size: String,
}

/// Serializable description of a [`StabChain`].
#[derive(Clone, Debug, Serialize)]
pub struct ChainSummary {
    pub modulus: String,
    pub order: String,
    pub verified: bool,
    pub strong_generators: usize,
    pub levels: Vec<LevelSummary>,
}

pub struct StabChain {
    ring: MatRing,
    modulus: FactoredInt,
    levels: Vec<Level>,
    strong: Vec<Strong>,
    budget: usize,
    verified: bool,
}

fn encode(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0u64, |acc, &x| acc * p + x)
}

fn decode(mut code: u64, p: u64, n: usize) -> Vec<u64> {
    let mut v = vec![0; n];
    for x in v.iter_mut() {
        *x = code % p;
        code /= p;
    }
    v
}

fn normalize(v: &mut [u64], p: u64) {
    if let Some(&lead) = v.iter().find(|&&x| x != 0) {
        if lead != 1 {
            let inv = inv_mod(lead, p).expect("p is prime");
            for x in v.iter_mut() {
                *x = mul_mod(*x, inv, p);
            }
        }
    }
}

/// `g v mod p` for a matrix with entries mod a multiple of `p`.
fn apply(g: &[u64], v: &[u64], p: u64) -> Vec<u64> {
    let n = v.len();
    (0..n)
        .map(|i| {
            let mut acc = 0u128;
            for j in 0..n {
                if v[j] != 0 {
                    acc += (g[i * n + j] % p) as u128 * v[j] as u128;
                }
            }
            (acc % p as u128) as u64
        })
        .collect()
}

impl StabChain {
    fn empty(ring: MatRing, modulus: &FactoredInt, budget: usize) -> Result<Self> {
        let n = ring.degree();
        let mut levels = Vec::new();
        for (p, a) in modulus.iter() {
            if (p as u128).pow(n as u32) > u64::MAX as u128 {
                return Err(Error::ResourceExceeded {
                    modulus: modulus.to_string(),
                    level: format!("lines mod {p}"),
                    detail: "projective points do not fit in 64 bits".into(),
                });
            }
            let mut vecs: Vec<Vec<u64>> = (0..n)
                .map(|i| (0..n).map(|k| u64::from(k == i)).collect())
                .collect();
            if n > 1 {
                vecs.push(vec![1; n]);
            }
            for v in vecs {
                levels.push(Level::orbit(Base::Line { p, v }, n));
            }
            if p > 2 {
                let v = (0..n).map(|k| u64::from(k == 0)).collect();
                levels.push(Level::orbit(Base::Vector { p, v }, n));
            }
            let mut q = p;
            for j in 2..=a {
                levels.push(Level {
                    base: Base::Layer { p, j, q },
                    data: Data::Layer(Layer {
                        rows: Vec::new(),
                        elems: Vec::new(),
                    }),
                });
                q *= p;
            }
        }
        Ok(Self {
            ring,
            modulus: modulus.clone(),
            levels,
            strong: Vec::new(),
            budget,
            verified: false,
        })
    }

    /// Builds a verified chain for `<gens>`. `target`, when given, is an
    /// upper bound for the order (the order of the ambient group); reaching
    /// it ends the construction early.
    pub fn build(
        ring: MatRing,
        modulus: &FactoredInt,
        gens: &[ModMat],
        target: Option<&FactoredInt>,
        cfg: &ChainConfig,
    ) -> Result<Self> {
        let mut chain = Self::empty(ring, modulus, cfg.orbit_budget)?;
        for g in gens {
            chain.absorb(g.clone())?;
        }
        let nontrivial: Vec<ModMat> = gens
            .iter()
            .filter(|g| !ring.is_identity(g))
            .cloned()
            .collect();
        let reached = |c: &Self| target.is_some_and(|t| &c.order() == t);
        if nontrivial.is_empty() || reached(&chain) {
            chain.verified = true;
            return Ok(chain);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ modulus.to_u64().unwrap_or(0));
        let mut slots = nontrivial.clone();
        while slots.len() < 10 {
            slots.push(nontrivial[slots.len() % nontrivial.len()].clone());
        }
        let mut acc = ring.identity();
        let step = |rng: &mut ChaCha8Rng, slots: &mut Vec<ModMat>, acc: &mut ModMat| {
            let i = rng.gen_range(0..slots.len());
            let mut j = rng.gen_range(0..slots.len() - 1);
            if j >= i {
                j += 1;
            }
            slots[i] = if rng.gen_bool(0.5) {
                ring.mul(&slots[i], &slots[j])
            } else {
                ring.mul(&slots[j], &slots[i])
            };
            *acc = ring.mul(acc, &slots[i]);
        };
        for _ in 0..40 {
            step(&mut rng, &mut slots, &mut acc);
        }
        let mut quiet = 0;
        while quiet < cfg.random_rounds {
            step(&mut rng, &mut slots, &mut acc);
            if chain.absorb(acc.clone())? {
                quiet = 0;
                if reached(&chain) {
                    chain.verified = true;
                    return Ok(chain);
                }
            } else {
                quiet += 1;
            }
        }
        chain.verify()?;
        Ok(chain)
    }

    /// Sifts `g`; adds the residue as a strong generator when it is not the
    /// identity. Returns whether the chain grew.
    fn absorb(&mut self, g: ModMat) -> Result<bool> {
        match self.sift_from(g, 0) {
            Sift::Identity => Ok(false),
            Sift::Residue(level, r) => {
                self.add_strong(r, level)?;
                Ok(true)
            }
        }
    }

    fn phi(&self, g: &[u64], p: u64, q: u64) -> Vec<u64> {
        let n = self.ring.degree();
        let pq = p * q;
        g.iter()
            .enumerate()
            .map(|(k, &x)| {
                let diag = u64::from(k / n == k % n);
                let y = (x % pq + pq - diag) % pq;
                debug_assert_eq!(y % q, 0);
                y / q
            })
            .collect()
    }

    fn sift_from(&self, mut g: ModMat, start: usize) -> Sift {
        let nn = self.ring.degree() * self.ring.degree();
        for i in start..self.levels.len() {
            let level = &self.levels[i];
            match (&level.base, &level.data) {
                (Base::Line { p, v }, Data::Orbit(o)) | (Base::Vector { p, v }, Data::Orbit(o)) => {
                    let mut w = apply(&g, v, *p);
                    if matches!(level.base, Base::Line { .. }) {
                        normalize(&mut w, *p);
                    }
                    match o.index.get(&encode(&w, *p)) {
                        None => return Sift::Residue(i, g),
                        Some(&k) => {
                            let k = k as usize;
                            g = self.ring.mul(&o.inv_trans[k * nn..(k + 1) * nn], &g);
                        }
                    }
                }
                (Base::Layer { p, q, .. }, Data::Layer(l)) => {
                    let p = *p;
                    let mut x = self.phi(&g, p, *q);
                    for ((row, piv), &si) in l.rows.iter().zip(&l.elems) {
                        if x[*piv] == 0 {
                            continue;
                        }
                        let c = mul_mod(x[*piv], inv_mod(row[*piv], p).expect("nonzero pivot"), p);
                        for (a, b) in x.iter_mut().zip(row) {
                            *a = (*a + p - mul_mod(c, *b, p)) % p;
                        }
                        g = self.ring.mul(&g, &self.ring.pow(&self.strong[si].inv, c));
                    }
                    if x.iter().any(|&a| a != 0) {
                        return Sift::Residue(i, g);
                    }
                }
                _ => unreachable!("level data matches its base"),
            }
        }
        debug_assert!(self.ring.is_identity(&g), "sifted element is not the identity");
        Sift::Identity
    }

    fn add_strong(&mut self, g: ModMat, level: usize) -> Result<()> {
        let inv = self.ring.inverse_sl(&g);
        let si = self.strong.len();
        self.strong.push(Strong {
            g: g.clone(),
            inv: inv.clone(),
            level,
        });
        if let (Base::Layer { p, q, .. }, Data::Layer(_)) =
            (&self.levels[level].base, &self.levels[level].data)
        {
            let mut x = self.phi(&g, *p, *q);
            // the residue is already reduced against the existing rows
            let piv = x.iter().position(|&a| a != 0).expect("nonzero residue");
            x.shrink_to_fit();
            if let Data::Layer(l) = &mut self.levels[level].data {
                l.rows.push((x, piv));
                l.elems.push(si);
            }
        }
        for l in 0..=level {
            if matches!(self.levels[l].data, Data::Orbit(_)) {
                self.extend_orbit(l, &g, &inv)?;
            }
        }
        Ok(())
    }

    fn extend_orbit(&mut self, l: usize, s: &[u64], s_inv: &[u64]) -> Result<()> {
        let ring = self.ring;
        let n = ring.degree();
        let nn = n * n;
        let budget = self.budget;
        let modulus = self.modulus.to_string();
        let level = &mut self.levels[l];
        let (p, projective) = match &level.base {
            Base::Line { p, .. } => (*p, true),
            Base::Vector { p, .. } => (*p, false),
            Base::Layer { .. } => unreachable!(),
        };
        let describe = level.base.describe();
        let Data::Orbit(o) = &mut level.data else {
            unreachable!()
        };
        let s_p: ModMat = s.iter().map(|x| x % p).collect();
        o.acting.push((s_p, s_inv.into()));

        let try_add = |o: &mut Orbit, k: usize, gen: usize| -> Result<()> {
            let v = decode(o.points[k], p, n);
            let mut w = apply(&o.acting[gen].0, &v, p);
            if projective {
                normalize(&mut w, p);
            }
            let code = encode(&w, p);
            if o.index.contains_key(&code) {
                return Ok(());
            }
            if o.points.len() >= budget {
                return Err(Error::ResourceExceeded {
                    modulus: modulus.clone(),
                    level: describe.clone(),
                    detail: format!("orbit exceeds the budget of {budget} points"),
                });
            }
            let t = ring.mul(&o.inv_trans[k * nn..(k + 1) * nn], &o.acting[gen].1);
            o.index.insert(code, o.points.len() as u32);
            o.points.push(code);
            o.inv_trans.extend_from_slice(&t);
            Ok(())
        };

        let old = o.points.len();
        let newest = o.acting.len() - 1;
        for k in 0..old {
            try_add(o, k, newest)?;
        }
        let mut head = old;
        while head < o.points.len() {
            for gen in 0..o.acting.len() {
                try_add(o, head, gen)?;
            }
            head += 1;
        }
        Ok(())
    }

    /// First element of the subgroup generated at level `i` that the chain
    /// below `i` fails to recognise, if any. Levels below `i` must already
    /// be complete.
    fn find_failure(&self, i: usize) -> Option<(usize, ModMat)> {
        let ring = &self.ring;
        let nn = ring.degree() * ring.degree();
        let gens_here: Vec<usize> = (0..self.strong.len())
            .filter(|&s| self.strong[s].level >= i)
            .collect();
        let check = |h: ModMat, from: usize| match self.sift_from(h, from) {
            Sift::Identity => None,
            Sift::Residue(l, r) => Some((l, r)),
        };
        match (&self.levels[i].base, &self.levels[i].data) {
            (_, Data::Orbit(o)) => {
                for k in 0..o.points.len() {
                    let u = ring.adjugate(&o.inv_trans[k * nn..(k + 1) * nn]);
                    for &s in &gens_here {
                        let h = ring.mul(&self.strong[s].g, &u);
                        if let Some(f) = check(h, i) {
                            return Some(f);
                        }
                    }
                }
                None
            }
            (Base::Layer { p, .. }, Data::Layer(l)) => {
                let deeper: Vec<usize> = gens_here
                    .iter()
                    .copied()
                    .filter(|&s| self.strong[s].level > i)
                    .collect();
                for (a, &ba) in l.elems.iter().enumerate() {
                    let b = &self.strong[ba];
                    if let Some(f) = check(ring.pow(&b.g, *p), i) {
                        return Some(f);
                    }
                    for &bb in &l.elems[a + 1..] {
                        let c = &self.strong[bb];
                        let comm = ring.mul(&ring.mul(&b.inv, &c.inv), &ring.mul(&b.g, &c.g));
                        if let Some(f) = check(comm, i) {
                            return Some(f);
                        }
                    }
                    for &t in &deeper {
                        let conj = ring.mul(&ring.mul(&b.inv, &self.strong[t].g), &b.g);
                        if let Some(f) = check(conj, i) {
                            return Some(f);
                        }
                    }
                }
                None
            }
            _ => unreachable!(),
        }
    }

    /// Deterministic completeness check, bottom-up; residues found on the
    /// way are added and the affected levels re-checked.
    fn verify(&mut self) -> Result<()> {
        let mut i = self.levels.len();
        while i > 0 {
            i -= 1;
            if let Some((l, r)) = self.find_failure(i) {
                self.add_strong(r, l)?;
                i = l + 1;
            }
        }
        self.verified = true;
        Ok(())
    }

    pub fn order(&self) -> FactoredInt {
        self.levels
            .iter()
            .fold(FactoredInt::one(), |acc, level| acc.mul(&level.size()))
    }

    pub fn contains(&self, g: &[u64]) -> bool {
        matches!(self.sift_from(g.into(), 0), Sift::Identity)
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn summary(&self) -> ChainSummary {
        ChainSummary {
            modulus: self.modulus.to_string(),
            order: self.order().to_string(),
            verified: self.verified,
            strong_generators: self.strong.len(),
            levels: self
                .levels
                .iter()
                .map(|l| LevelSummary {
                    base: l.base.describe(),
                    size: l.size().to_string(),
                })
                .collect(),
        }
    }
}

impl Level {
    fn orbit(base: Base, n: usize) -> Self {
        let (p, v) = match &base {
            Base::Line { p, v } | Base::Vector { p, v } => (*p, v),
            Base::Layer { .. } => unreachable!(),
        };
        let code = encode(v, p);
        let mut index = FxHashMap::default();
        index.insert(code, 0);
        let mut inv_trans = vec![0u64; n * n];
        for i in 0..n {
            inv_trans[i * n + i] = 1;
        }
        Level {
            base,
            data: Data::Orbit(Orbit {
                points: vec![code],
                index,
                inv_trans,
                acting: Vec::new(),
            }),
        }
    }

    fn size(&self) -> FactoredInt {
        match (&self.base, &self.data) {
            (_, Data::Orbit(o)) => FactoredInt::from_u64(o.points.len() as u64).expect("orbit sizes are positive"),
            (Base::Layer { p, .. }, Data::Layer(l)) => FactoredInt::prime(*p).pow(l.rows.len() as u32),
            _ => unreachable!(),
        }
    }
}

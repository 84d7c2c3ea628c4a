//! Congruence images and their orders.

use std::sync::OnceLock;

use super::bfs::{closure_order, BfsOutcome};
use super::chain::{ChainConfig, StabChain};
use super::modmat::{MatRing, ModMat};
use super::order::{full_order, full_order_prime_power};
use crate::error::{Error, Result};
use crate::exact::FactoredInt;
use crate::group::{GroupKind, GroupSpec};

/// Tunables for order computations.
#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Element cap for exhaustive closure.
    pub bfs_cap: usize,
    /// Exhaustive closure is used when the ambient group has at most this
    /// many elements.
    pub bfs_dispatch: u64,
    pub chain: ChainConfig,
    /// Use the mod-`p` surjectivity shortcut for `p >= 5` and the CRT split
    /// in degree 2.
    pub shortcuts: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            bfs_cap: 5_000_000,
            bfs_dispatch: 20_000,
            chain: ChainConfig::default(),
            shortcuts: true,
        }
    }
}

/// The image of a group in `Gamma(n, Z/m)`.
#[derive(Debug)]
pub struct FiniteImage {
    kind: GroupKind,
    modulus: FactoredInt,
    ring: MatRing,
    gens: Vec<ModMat>,
    form: Option<ModMat>,
    order: OnceLock<FactoredInt>,
}

impl Clone for FiniteImage {
    fn clone(&self) -> Self {
        Self {
            kind: self.kind,
            modulus: self.modulus.clone(),
            ring: self.ring,
            gens: self.gens.clone(),
            form: self.form.clone(),
            order: self.order.clone(),
        }
    }
}

impl FiniteImage {
    pub fn new(
        kind: GroupKind,
        modulus: FactoredInt,
        ring: MatRing,
        gens: Vec<ModMat>,
        form: Option<ModMat>,
    ) -> Result<Self> {
        if modulus.to_u64() != Some(ring.modulus()) {
            return Err(Error::Domain("modulus and matrix ring disagree".into()));
        }
        let one = 1 % ring.modulus();
        for (index, g) in gens.iter().enumerate() {
            if g.len() != ring.degree() * ring.degree() {
                return Err(Error::Degree(format!("generator {index} has the wrong size")));
            }
            if ring.det(g) != one {
                return Err(Error::NotInGroup {
                    index,
                    reason: format!("determinant is not 1 mod {modulus}"),
                });
            }
        }
        Ok(Self {
            kind,
            modulus,
            ring,
            gens,
            form,
            order: OnceLock::new(),
        })
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn degree(&self) -> usize {
        self.ring.degree()
    }

    pub fn modulus(&self) -> &FactoredInt {
        &self.modulus
    }

    pub fn ring(&self) -> &MatRing {
        &self.ring
    }

    pub fn generators(&self) -> &[ModMat] {
        &self.gens
    }

    pub fn form(&self) -> Option<&ModMat> {
        self.form.as_ref()
    }

    pub fn generator_rows(&self, i: usize) -> Vec<Vec<u64>> {
        self.ring.rows(&self.gens[i])
    }

    /// Order of the ambient group `Gamma(n, Z/m)`.
    pub fn ambient_order(&self) -> FactoredInt {
        full_order(self.kind, self.degree(), &self.modulus)
    }

    /// The image modulo a divisor `q >= 2` of the modulus.
    pub fn project(&self, q: &FactoredInt) -> Result<FiniteImage> {
        if !q.divides(&self.modulus) {
            return Err(Error::Domain(format!("{q} does not divide {}", self.modulus)));
        }
        let qv = q.to_u64().expect("divisor of a 64-bit modulus");
        if qv < 2 {
            return Err(Error::Domain("projection needs a modulus of at least 2".into()));
        }
        let ring = MatRing::new(self.degree(), qv)?;
        let gens = self.gens.iter().map(|g| self.ring.reduce(g, qv)).collect();
        let form = self.form.as_ref().map(|f| self.ring.reduce(f, qv));
        FiniteImage::new(self.kind, q.clone(), ring, gens, form)
    }

    /// Order of the image, memoized on first success.
    pub fn order(&self, cfg: &EngineConfig) -> Result<FactoredInt> {
        if let Some(o) = self.order.get() {
            return Ok(o.clone());
        }
        let o = image_order(self, cfg)?;
        let _ = self.order.set(o.clone());
        Ok(o)
    }

    pub fn is_full(&self, cfg: &EngineConfig) -> Result<bool> {
        Ok(self.order(cfg)? == self.ambient_order())
    }

    pub fn stab_chain(&self, cfg: &EngineConfig) -> Result<StabChain> {
        StabChain::build(
            self.ring,
            &self.modulus,
            &self.gens,
            Some(&self.ambient_order()),
            &cfg.chain,
        )
    }
}

/// Exhaustive closure order.
pub fn order_bfs(img: &FiniteImage, cap: usize) -> BfsOutcome {
    closure_order(&img.ring, &img.gens, cap)
}

/// Order via a stabilizer chain.
pub fn order_stabchain(img: &FiniteImage, cfg: &EngineConfig) -> Result<FactoredInt> {
    Ok(img.stab_chain(cfg)?.order())
}

/// `|phi_{p^k}(H)|`. For `p >= 5`, surjectivity mod `p` forces surjectivity
/// mod every power of `p`; for 2 and 3 the image is always computed directly.
pub fn order_lifted(spec: &GroupSpec, p: u64, k: u32, cfg: &EngineConfig) -> Result<FactoredInt> {
    let m = FactoredInt::prime(p).pow(k);
    spec.reduce_mod(&m)?.order(cfg)
}

fn lifted(img: &FiniteImage, p: u64, k: u32, cfg: &EngineConfig) -> Result<Option<FactoredInt>> {
    if !cfg.shortcuts || p < 5 || k < 2 {
        return Ok(None);
    }
    let low = img.project(&FactoredInt::prime(p))?;
    if low.is_full(cfg)? {
        return Ok(Some(full_order_prime_power(img.kind, img.degree(), p, k)));
    }
    Ok(None)
}

/// `|phi_m(H)|`, dispatching between closure, lifting, the degree-2 CRT
/// split and the stabilizer chain. The result always divides the ambient
/// order.
pub fn image_order(img: &FiniteImage, cfg: &EngineConfig) -> Result<FactoredInt> {
    let full = img.ambient_order();
    let order = compute(img, &full, cfg)?;
    assert!(
        order.divides(&full),
        "image order {order} does not divide {full} mod {}",
        img.modulus
    );
    Ok(order)
}

fn compute(img: &FiniteImage, full: &FactoredInt, cfg: &EngineConfig) -> Result<FactoredInt> {
    if img.gens.iter().all(|g| img.ring.is_identity(g)) {
        return Ok(FactoredInt::one());
    }
    if let Some(f) = full.to_u64().filter(|&f| f <= cfg.bfs_dispatch) {
        if let BfsOutcome::Order(o) = order_bfs(img, cfg.bfs_cap.max(f as usize)) {
            return Ok(FactoredInt::from_u64(o).expect("orders are positive"));
        }
    }
    let parts: Vec<(u64, u32)> = img.modulus.iter().collect();
    if parts.len() == 1 {
        let (p, k) = parts[0];
        if let Some(o) = lifted(img, p, k, cfg)? {
            return Ok(o);
        }
    } else if cfg.shortcuts && img.degree() == 2 {
        // A full SL(2, Z/p^a) factor with p > 5 splits off the rest.
        let mut split = FactoredInt::one();
        let mut rest = img.modulus.clone();
        for &(p, a) in parts.iter().filter(|(p, _)| *p > 5) {
            let q = FactoredInt::prime(p).pow(a);
            let component = img.project(&q)?;
            if component.is_full(cfg)? {
                split = split.mul(&component.ambient_order());
                rest = rest.checked_div(&q).expect("component divides the modulus");
            }
        }
        if !split.is_one() {
            let tail = if rest.is_one() {
                FactoredInt::one()
            } else {
                img.project(&rest)?.order(cfg)?
            };
            return Ok(split.mul(&tail));
        }
    }
    order_stabchain(img, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::factorize;
    use crate::group::catalog;

    fn order(id: &str, m: u64) -> String {
        let spec = catalog::lookup(id).unwrap();
        spec.reduce_mod(&factorize(m).unwrap())
            .unwrap()
            .order(&EngineConfig::default())
            .unwrap()
            .to_string()
    }

    #[test]
    fn g2_mod_nine() {
        // 648 / 27
        assert_eq!(order("G2", 9), "2^3*3");
    }

    #[test]
    fn paths_agree() {
        let spec = catalog::lookup("G_s:1/3").unwrap();
        let plain = EngineConfig {
            shortcuts: false,
            bfs_dispatch: 0,
            ..Default::default()
        };
        for m in [7u64, 49, 7 * 11, 5 * 7 * 11, 11 * 11 * 7] {
            let img = spec.reduce_mod(&factorize(m).unwrap()).unwrap();
            let fast = img.order(&EngineConfig::default()).unwrap();
            let slow = image_order(&img, &plain).unwrap();
            assert_eq!(fast, slow, "m = {m}");
        }
    }

    #[test]
    fn projection_commutes_with_reduction() {
        let spec = catalog::lookup("H4sp:25/3:29/3").unwrap();
        let big = spec.reduce_mod(&factorize(5 * 7).unwrap()).unwrap();
        let small = spec.reduce_mod(&factorize(7).unwrap()).unwrap();
        assert_eq!(
            big.project(&factorize(7).unwrap()).unwrap().generators(),
            small.generators()
        );
    }
}

use std::collections::HashMap;

use parking_lot::{Mutex, RwLock};
use serde::Serialize;

use crate::engine::{full_order, EngineConfig};
use crate::error::Result;
use crate::exact::FactoredInt;
use crate::group::GroupSpec;

#[derive(Clone, Debug)]
pub struct LevelConfig {
    pub engine: EngineConfig,
    /// Largest exponent the level search may reach for one prime.
    pub nu_cap: u32,
    /// Scan bound used when a group carries no `pi`.
    pub scan_bound: u64,
}

impl Default for LevelConfig {
    fn default() -> Self {
        Self {
            engine: EngineConfig::default(),
            nu_cap: 64,
            scan_bound: 200,
        }
    }
}

/// One evaluated index.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceEntry {
    pub modulus: FactoredInt,
    pub delta: FactoredInt,
}

/// Memoized evaluation of `delta_H(m) = |Gamma(n, Z/m) : phi_m(H)|`.
/// Shareable between threads; the first finished evaluation of a modulus
/// is the one kept.
pub struct DeltaOracle<'a> {
    spec: &'a GroupSpec,
    config: LevelConfig,
    cache: RwLock<HashMap<FactoredInt, FactoredInt>>,
    trace: Mutex<Vec<TraceEntry>>,
}

impl<'a> DeltaOracle<'a> {
    pub fn new(spec: &'a GroupSpec, config: LevelConfig) -> Self {
        Self {
            spec,
            config,
            cache: RwLock::new(HashMap::new()),
            trace: Mutex::new(Vec::new()),
        }
    }

    pub fn spec(&self) -> &'a GroupSpec {
        self.spec
    }

    pub fn config(&self) -> &LevelConfig {
        &self.config
    }

    pub fn delta(&self, m: &FactoredInt) -> Result<FactoredInt> {
        if m.is_one() {
            return Ok(FactoredInt::one());
        }
        if let Some(d) = self.cache.read().get(m) {
            return Ok(d.clone());
        }
        let spec = self.spec;
        let img = spec.reduce_mod(m)?;
        let order = img.order(&self.config.engine)?;
        let d = full_order(spec.kind(), spec.degree(), m)
            .checked_div(&order)
            .expect("image order divides the ambient order");
        let mut cache = self.cache.write();
        if !cache.contains_key(m) {
            cache.insert(m.clone(), d.clone());
            self.trace.lock().push(TraceEntry {
                modulus: m.clone(),
                delta: d.clone(),
            });
        }
        Ok(cache[m].clone())
    }

    pub fn delta_u64(&self, m: u64) -> Result<FactoredInt> {
        self.delta(&FactoredInt::from_u64(m)?)
    }

    /// Evaluations so far, in order of completion.
    pub fn trace(&self) -> Vec<TraceEntry> {
        self.trace.lock().clone()
    }
}

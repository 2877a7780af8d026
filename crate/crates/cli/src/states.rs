//! Where the harness gets its states from.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use chaoscorr_core::linalg::symmetric_eigenpair;
use chaoscorr_core::spin_chain::{central_eigenstate, central_index, diagonalize};
use chaoscorr_core::{
    build_hamiltonian, sample_spec, sample_state, select_eigenstate, EigenSelector, EnsembleClass, SampleSeed,
    StateVector,
};
use num_complex::Complex64;

use crate::error::{HarnessError, Result};
use crate::seeds::chain_seed;

type CachedState = Arc<(f64, StateVector)>;

/// Draws random-matrix states. Replaceable so that tests can inject faults.
pub trait StateSampler: Send + Sync {
    fn sample(&self, class: EnsembleClass, n_sites: usize, seed: SampleSeed) -> chaoscorr_core::Result<StateVector>;
}

/// Uniform (Haar) states of the ensemble's symmetry class.
#[derive(Debug, Clone, Copy, Default)]
pub struct HaarSampler;

impl StateSampler for HaarSampler {
    fn sample(&self, class: EnsembleClass, n_sites: usize, seed: SampleSeed) -> chaoscorr_core::Result<StateVector> {
        sample_state(class, n_sites, seed)
    }
}

/// Identifies one disorder realization of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ChainKey {
    pub n_sites: usize,
    pub coupling_bits: u64,
    pub field_bits: u64,
    pub seed: u64,
    pub realization: u64,
}

impl ChainKey {
    pub fn new(n_sites: usize, coupling: f64, field: f64, master_seed: u64, realization: u64) -> Self {
        Self {
            n_sites,
            coupling_bits: coupling.to_bits(),
            field_bits: field.to_bits(),
            seed: chain_seed(master_seed, n_sites),
            realization,
        }
    }

    pub fn coupling(&self) -> f64 {
        f64::from_bits(self.coupling_bits)
    }

    pub fn field(&self) -> f64 {
        f64::from_bits(self.field_bits)
    }

    pub fn sample_seed(&self) -> SampleSeed {
        SampleSeed::new(self.seed, self.realization)
    }

    fn file_name(&self) -> String {
        format!(
            "central_n{}_j{:016x}_h{:016x}_s{:016x}_r{}.bin",
            self.n_sites, self.coupling_bits, self.field_bits, self.seed, self.realization
        )
    }
}

/// Central eigenstates of chain realizations, kept in memory and
/// optionally on disk. Diagonalizing at `N = 12` takes seconds, and the
/// same realizations feed several experiments.
#[derive(Debug, Clone, Default)]
pub struct CentralStateCache {
    memory: Arc<Mutex<HashMap<ChainKey, CachedState>>>,
    directory: Option<PathBuf>,
}

impl CentralStateCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Also persists states under `directory`.
    pub fn with_directory(directory: impl Into<PathBuf>) -> Self {
        Self {
            memory: Arc::default(),
            directory: Some(directory.into()),
        }
    }

    pub fn len(&self) -> usize {
        self.memory.lock().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Energy and state of the central eigenstate of realization `key`.
    pub fn get(&self, key: ChainKey) -> Result<Arc<(f64, StateVector)>> {
        if let Some(hit) = self.memory.lock().expect("cache lock").get(&key) {
            return Ok(hit.clone());
        }
        let entry = match self.load(&key)? {
            Some(entry) => entry,
            None => {
                let spec = sample_spec(key.n_sites, key.coupling(), key.field(), key.sample_seed())?;
                let entry = central_eigenstate(&spec)?;
                self.store(&key, &entry)?;
                entry
            }
        };
        let entry = Arc::new(entry);
        self.memory.lock().expect("cache lock").insert(key, entry.clone());
        Ok(entry)
    }

    fn load(&self, key: &ChainKey) -> Result<Option<(f64, StateVector)>> {
        let Some(dir) = &self.directory else { return Ok(None) };
        let path = dir.join(key.file_name());
        let bytes = match std::fs::read(&path) {
            Ok(b) => b,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(HarnessError::io(path, e)),
        };
        let dim = 1usize << key.n_sites;
        if bytes.len() != 8 * (1 + dim) {
            return Err(HarnessError::schema(
                path,
                format!("expected {} bytes, found {}", 8 * (1 + dim), bytes.len()),
            ));
        }
        let words: Vec<f64> = bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
            .collect();
        let amplitudes = words[1..].iter().map(|&x| Complex64::new(x, 0.0)).collect();
        let state =
            StateVector::new(key.n_sites, amplitudes).map_err(|e| HarnessError::schema(&path, e.to_string()))?;
        Ok(Some((words[0], state)))
    }

    fn store(&self, key: &ChainKey, entry: &(f64, StateVector)) -> Result<()> {
        let Some(dir) = &self.directory else { return Ok(()) };
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir, e))?;
        let mut bytes = Vec::with_capacity(8 * (1 + entry.1.dim()));
        bytes.extend_from_slice(&entry.0.to_le_bytes());
        for c in entry.1.amplitudes() {
            bytes.extend_from_slice(&c.re.to_le_bytes());
        }
        let path = dir.join(key.file_name());
        let tmp = path.with_extension("tmp");
        std::fs::write(&tmp, bytes).map_err(|e| HarnessError::io(&tmp, e))?;
        std::fs::rename(&tmp, &path).map_err(|e| HarnessError::io(&path, e))
    }
}

/// Supplies every state an experiment needs.
pub struct StateProvider {
    sampler: Box<dyn StateSampler>,
    cache: CentralStateCache,
}

impl Default for StateProvider {
    fn default() -> Self {
        Self::new(Box::new(HaarSampler), CentralStateCache::new())
    }
}

impl StateProvider {
    pub fn new(sampler: Box<dyn StateSampler>, cache: CentralStateCache) -> Self {
        Self { sampler, cache }
    }

    pub fn with_sampler(sampler: Box<dyn StateSampler>) -> Self {
        Self::new(sampler, CentralStateCache::new())
    }

    pub fn cache(&self) -> &CentralStateCache {
        &self.cache
    }

    /// Sample `index` of `class` at `N` under `master_seed`.
    pub fn random_state(
        &self,
        class: EnsembleClass,
        n_sites: usize,
        master_seed: u64,
        index: u64,
    ) -> Result<StateVector> {
        Ok(self
            .sampler
            .sample(class, n_sites, SampleSeed::new(master_seed, index))?)
    }

    /// The selected eigenstate of disorder realization `index`.
    ///
    /// An energy window picks the state in the window closest to its
    /// center, so every realization contributes exactly one state.
    pub fn chain_state(
        &self,
        n_sites: usize,
        coupling: f64,
        field: f64,
        master_seed: u64,
        selector: EigenSelector,
        index: u64,
    ) -> Result<StateVector> {
        let key = ChainKey::new(n_sites, coupling, field, master_seed, index);
        let dim = 1usize << n_sites;
        match selector {
            EigenSelector::Central => Ok(self.cache.get(key)?.1.clone()),
            EigenSelector::Index(k) if k == central_index(dim) + 1 => Ok(self.cache.get(key)?.1.clone()),
            EigenSelector::Index(k) => {
                let spec = sample_spec(n_sites, coupling, field, key.sample_seed())?;
                let h = build_hamiltonian(&spec)?;
                let (_, v) = symmetric_eigenpair(&h, k - 1)?;
                let amplitudes = v.iter().map(|&x| Complex64::new(x, 0.0)).collect();
                Ok(StateVector::from_unnormalized(n_sites, amplitudes)?)
            }
            EigenSelector::EnergyWindow { energy, .. } => {
                let spec = sample_spec(n_sites, coupling, field, key.sample_seed())?;
                let spectrum = diagonalize(&build_hamiltonian(&spec)?)?;
                let chosen = select_eigenstate(&spectrum, selector)?;
                let closest = chosen
                    .into_iter()
                    .min_by(|a, b| (a.energy - energy).abs().total_cmp(&(b.energy - energy).abs()))
                    .expect("selection is never empty");
                Ok(closest.state)
            }
        }
    }
}

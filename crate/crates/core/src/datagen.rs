//! Synthetic instances: Benford-like profit profiles with a Poisson shape
//! parameter per loanee, an Erdős–Rényi association graph, and log-uniform
//! provisions.

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{AssocGraph, ProblemInstance};
use crate::rng::substream;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub n_loanees: usize,
    pub n_actions: usize,
    pub poisson_mean: f64,
    pub mean_degree: f64,
    pub seed: u64,
    /// Association weights are uniform on `(low, high]`.
    pub assoc_weight_range: (f64, f64),
    /// Provisions are log-uniform on `[low, high]`.
    pub provision_range: (f64, f64),
    pub epsilon: f64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_loanees: 600,
            n_actions: 5,
            poisson_mean: 0.7,
            mean_degree: 2.0,
            seed: 0,
            assoc_weight_range: (0.0, 0.7),
            provision_range: (1e-5, 1.0),
            epsilon: 0.5,
        }
    }
}

impl GenConfig {
    pub fn new(n_loanees: usize, n_actions: usize, seed: u64) -> Self {
        Self {
            n_loanees,
            n_actions,
            seed,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n_loanees < 2 {
            return fail(format!(
                "n_loanees must be at least 2, got {}",
                self.n_loanees
            ));
        }
        if self.n_actions < 2 {
            return fail(format!(
                "n_actions must be at least 2, got {}",
                self.n_actions
            ));
        }
        if !(self.poisson_mean > 0.0 && self.poisson_mean.is_finite()) {
            return fail(format!(
                "poisson_mean must be positive, got {}",
                self.poisson_mean
            ));
        }
        if !(self.mean_degree >= 0.0 && self.mean_degree <= (self.n_loanees - 1) as f64) {
            return fail(format!(
                "mean_degree must lie in [0, {}], got {}",
                self.n_loanees - 1,
                self.mean_degree
            ));
        }
        let (wl, wh) = self.assoc_weight_range;
        if !(wl >= 0.0 && wh > wl && wh.is_finite()) {
            return fail(format!("bad assoc_weight_range ({wl}, {wh}]"));
        }
        let (pl, ph) = self.provision_range;
        if !(pl > 0.0 && ph >= pl && ph.is_finite()) {
            return fail(format!("bad provision_range [{pl}, {ph}]"));
        }
        if !(0.0..1.0).contains(&self.epsilon) {
            return fail(format!("epsilon {} is outside [0, 1)", self.epsilon));
        }
        Ok(())
    }

    /// Edge probability of the G(N, p) ensemble.
    pub fn edge_probability(&self) -> f64 {
        self.mean_degree / (self.n_loanees - 1) as f64
    }
}

/// Poisson sample by sequential inversion of the CDF at `u ∈ [0, 1)`.
pub fn poisson_inversion(mean: f64, u: f64) -> u64 {
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut cdf = p;
    while u > cdf && p > 0.0 {
        k += 1;
        p *= mean / k as f64;
        cdf += p;
    }
    k
}

/// Normalized profile `(log10(j + 2) - (1 - r) log10(j + 1)) / C` over `j = 1..=M`.
pub fn benford_profile(r: u64, n_actions: usize) -> Vec<f64> {
    let shift = 1.0 - r as f64;
    let raw: Vec<f64> = (1..=n_actions)
        .map(|j| ((j + 2) as f64).log10() - shift * ((j + 1) as f64).log10())
        .collect();
    let norm: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / norm).collect()
}

pub fn gen_h(config: &GenConfig) -> Vec<Vec<f64>> {
    (0..config.n_loanees)
        .map(|i| {
            let mut rng = substream(config.seed, "profit", i as u64);
            let r = poisson_inversion(config.poisson_mean, rng.random::<f64>());
            benford_profile(r, config.n_actions)
        })
        .collect()
}

pub fn gen_assoc(config: &GenConfig) -> AssocGraph {
    let n = config.n_loanees;
    let p = config.edge_probability();
    let (low, high) = config.assoc_weight_range;
    let mut edges = Vec::new();
    if p > 0.0 {
        for a in 0..n {
            let mut rng = substream(config.seed, "assoc", a as u64);
            for b in a + 1..n {
                if rng.random::<f64>() < p {
                    let u: f64 = rng.random();
                    edges.push((a, b, high - u * (high - low)));
                }
            }
        }
    }
    AssocGraph::new(n, edges).expect("generated edges are valid")
}

pub fn gen_provisions(config: &GenConfig) -> Vec<Vec<f64>> {
    let (low, high) = config.provision_range;
    let (log_low, log_high) = (low.log10(), high.log10());
    (0..config.n_loanees)
        .map(|i| {
            let mut rng = substream(config.seed, "provision", i as u64);
            (0..config.n_actions)
                .map(|_| {
                    let u: f64 = rng.random();
                    10f64
                        .powf(log_low + u * (log_high - log_low))
                        .clamp(low, high)
                })
                .collect()
        })
        .collect()
}

/// Generated instance plus the metadata recorded under `provenance`.
#[derive(Debug, Clone)]
pub struct Generated {
    pub instance: ProblemInstance,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub generator: GenConfig,
    pub realized_mean_degree: f64,
    pub n_edges: usize,
}

pub fn generate(config: &GenConfig) -> Result<Generated> {
    config.validate()?;
    let assoc = gen_assoc(config);
    let provenance = Provenance {
        generator: config.clone(),
        realized_mean_degree: assoc.mean_degree(),
        n_edges: assoc.n_edges(),
    };
    let instance = ProblemInstance::new(
        gen_h(config),
        gen_provisions(config),
        assoc,
        config.epsilon,
        None,
    )?;
    Ok(Generated {
        instance,
        provenance,
    })
}

impl Generated {
    pub fn to_json(&self) -> Result<String> {
        let provenance = serde_json::to_value(&self.provenance)?;
        self.instance.to_file(Some(provenance)).to_json()
    }
}

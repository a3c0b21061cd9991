//! End-to-end runs: hybrid (divide, QAOA per group, reconstruct, GPR) and
//! the standalone baseline (GPR from a uniformly random assignment), plus
//! the file outputs of the command-line verbs.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::RngExt;
use serde::{Deserialize, Serialize};

use crate::datagen::{generate, GenConfig};
use crate::error::{Error, Result};
use crate::gpr::{run_gpr, GprTrace, Termination};
use crate::model::{
    bank_profit, dpo_count, objective, provision, ActionAssignment, ProblemInstance,
};
use crate::oracle::{brute_force_best, OracleResult};
use crate::partition::{divide, PartitionReport};
use crate::qaoa::{optimize, CycleOrder, QaoaConfig};
use crate::reconstruct::{reconstruct, DEFAULT_LAMBDA};
use crate::rng::{derive_seed, substream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Hybrid,
    StandaloneGpr,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Hybrid => "hybrid",
            Mode::StandaloneGpr => "standalone-gpr",
        }
    }
}

/// Where the instance comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InstanceSource {
    File(PathBuf),
    Generated(GenConfig),
}

impl InstanceSource {
    pub fn load(&self) -> Result<ProblemInstance> {
        match self {
            InstanceSource::File(path) => ProblemInstance::load(path),
            InstanceSource::Generated(cfg) => Ok(generate(cfg)?.instance),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub nu: usize,
    pub cycles: usize,
    pub qaoa_iters: usize,
    /// GPR step budget; defaults to `N * M`.
    pub gpr_iters: Option<usize>,
    pub lambda: usize,
    pub restarts: usize,
    /// Overrides the instance's epsilon when set.
    pub epsilon: Option<f64>,
    /// Overrides the instance's provision cap when set.
    pub provision_cap: Option<f64>,
    pub mode: Mode,
    pub order: CycleOrder,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            nu: 7,
            cycles: 2,
            qaoa_iters: 200,
            gpr_iters: None,
            lambda: DEFAULT_LAMBDA,
            restarts: 4,
            epsilon: None,
            provision_cap: None,
            mode: Mode::Hybrid,
            order: CycleOrder::MixerFirst,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::InvalidConfig(m.into()));
        if self.nu < 2 {
            return fail("nu must be at least 2");
        }
        if self.cycles == 0 || self.qaoa_iters == 0 || self.restarts == 0 || self.lambda == 0 {
            return fail("cycles, qaoa iterations, restarts and lambda must be positive");
        }
        if let Some(cap) = self.provision_cap {
            if !(cap.is_finite() && cap >= 0.0) {
                return fail("provision cap must be non-negative");
            }
        }
        Ok(())
    }

    fn qaoa(&self) -> QaoaConfig {
        QaoaConfig {
            cycles: self.cycles,
            max_iters: self.qaoa_iters,
            restarts: self.restarts,
            order: self.order,
        }
    }

    /// Applies the epsilon and cap overrides.
    pub fn prepare(&self, instance: &ProblemInstance) -> Result<ProblemInstance> {
        let with_eps = match self.epsilon {
            Some(eps) => instance.with_epsilon(eps)?,
            None => instance.clone(),
        };
        Ok(match self.provision_cap {
            Some(cap) => with_eps.with_provision_cap(Some(cap)),
            None => with_eps,
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub partition_ms: f64,
    pub qaoa_ms: f64,
    pub reconstruct_ms: f64,
    pub gpr_ms: f64,
    pub total_ms: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunFlags {
    pub forced_merges: usize,
    /// A provision cap was set but GPR stopped above it.
    pub cap_unreached: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub version: String,
    pub config: RunConfig,
    pub epsilon: f64,
    pub provision_cap: Option<f64>,
    pub n_loanees: usize,
    pub n_actions: usize,
    pub n_groups: usize,
    pub largest_group: usize,
    /// Objective of the GPR input (reconstructed or random).
    pub start_objective: f64,
    pub start_provision: f64,
    /// Final 1-based actions.
    pub assignment: Vec<usize>,
    pub objective: f64,
    pub provision: f64,
    pub dpo_count: usize,
    pub bank_profit: f64,
    pub gpr_steps: usize,
    pub gpr_termination: Termination,
    pub trace_path: Option<String>,
    pub flags: RunFlags,
    pub timings: Timings,
}

impl RunManifest {
    /// Recomputes objective and provision from the stored assignment.
    pub fn verify(&self, instance: &ProblemInstance) -> Result<bool> {
        let inst = instance.with_epsilon(self.epsilon)?;
        let a = ActionAssignment::new(self.assignment.clone(), inst.n_actions())?;
        Ok((objective(&inst, &a)? - self.objective).abs() <= 1e-9
            && (provision(&inst, &a)? - self.provision).abs() <= 1e-9)
    }

    /// Manifest JSON with the wall-clock timings removed.
    pub fn without_timings(&self) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("timings");
        }
        v
    }
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub manifest: RunManifest,
    pub assignment: ActionAssignment,
    pub trace: GprTrace,
    pub partition: Option<PartitionReport>,
}

fn elapsed_ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Uniformly random valid assignment.
pub fn random_assignment(n_loanees: usize, n_actions: usize, seed: u64) -> ActionAssignment {
    let mut rng = substream(seed, "baseline", 0);
    let actions = (0..n_loanees)
        .map(|_| rng.random_range(1..=n_actions))
        .collect();
    ActionAssignment::new(actions, n_actions).expect("actions drawn in range")
}

/// Runs one configuration on an instance (after applying the overrides).
pub fn solve(instance: &ProblemInstance, config: &RunConfig) -> Result<SolveOutcome> {
    config.validate()?;
    let instance = config.prepare(instance)?;
    let (n, m) = (instance.n_loanees(), instance.n_actions());
    let total = Instant::now();
    let mut timings = Timings::default();
    let mut flags = RunFlags::default();
    let mut partition = None;
    let (mut n_groups, mut largest_group) = (0, 0);

    let start = match config.mode {
        Mode::Hybrid => {
            let t = Instant::now();
            let groups = divide(
                instance.assoc(),
                config.nu,
                derive_seed(config.seed, "partition", 0),
            )?;
            timings.partition_ms = elapsed_ms(t);
            n_groups = groups.len();
            largest_group = groups.iter().map(|g| g.len()).max().unwrap_or(0);

            let t = Instant::now();
            let qaoa = config.qaoa();
            let distributions = groups
                .iter()
                .enumerate()
                .map(|(k, g)| {
                    let seed = derive_seed(config.seed, "qaoa", k as u64);
                    optimize(&instance, g, instance.epsilon(), &qaoa, seed).map(|o| o.distribution)
                })
                .collect::<Result<Vec<_>>>()?;
            timings.qaoa_ms = elapsed_ms(t);

            let t = Instant::now();
            let rebuilt = reconstruct(&instance, &groups, &distributions, config.lambda, None)?;
            timings.reconstruct_ms = elapsed_ms(t);
            flags.forced_merges = rebuilt.forced_merges;
            partition = Some(PartitionReport::new(config.nu, &groups));
            rebuilt.assignment
        }
        Mode::StandaloneGpr => random_assignment(n, m, derive_seed(config.seed, "baseline", 0)),
    };

    let t = Instant::now();
    let budget = config.gpr_iters.unwrap_or(n * m);
    let cap = instance.provision_cap();
    let (assignment, trace) = run_gpr(&instance, &start, cap, Some(budget));
    timings.gpr_ms = elapsed_ms(t);
    flags.cap_unreached = cap.is_some() && trace.termination != Termination::CapReached;
    timings.total_ms = elapsed_ms(total);

    let manifest = RunManifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        epsilon: instance.epsilon(),
        provision_cap: cap,
        n_loanees: n,
        n_actions: m,
        n_groups,
        largest_group,
        start_objective: trace.initial_objective,
        start_provision: trace.initial_provision,
        assignment: assignment.actions().to_vec(),
        objective: objective(&instance, &assignment)?,
        provision: provision(&instance, &assignment)?,
        dpo_count: dpo_count(&assignment),
        bank_profit: bank_profit(&instance, &assignment)?,
        gpr_steps: trace.steps.len(),
        gpr_termination: trace.termination,
        trace_path: None,
        flags,
        timings,
    };
    Ok(SolveOutcome {
        manifest,
        assignment,
        trace,
        partition,
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// Writes a generated instance file and returns it.
pub fn cmd_generate(config: &GenConfig, out: &Path) -> Result<ProblemInstance> {
    let generated = generate(config)?;
    if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let mut text = generated.to_json()?;
    text.push('\n');
    fs::write(out, text)?;
    Ok(generated.instance)
}

/// Solves and writes `manifest.json`, `trace.csv` and, in hybrid mode,
/// `partition.json` into `out_dir`.
pub fn cmd_solve(
    source: &InstanceSource,
    config: &RunConfig,
    out_dir: &Path,
) -> Result<RunManifest> {
    let instance = source.load()?;
    let mut outcome = solve(&instance, config)?;
    fs::create_dir_all(out_dir)?;
    let trace_path = out_dir.join("trace.csv");
    fs::write(&trace_path, outcome.trace.to_csv())?;
    outcome.manifest.trace_path = Some("trace.csv".into());
    if let Some(report) = &outcome.partition {
        write_json(&out_dir.join("partition.json"), report)?;
    }
    write_json(&out_dir.join("manifest.json"), &outcome.manifest)?;
    Ok(outcome.manifest)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub epsilon: f64,
    pub mode: Mode,
    pub objective: f64,
    pub provision: f64,
    pub dpo_count: usize,
    pub bank_profit: f64,
}

/// Both modes at every epsilon, ascending epsilon, hybrid row first.
pub fn sweep(
    instance: &ProblemInstance,
    config: &RunConfig,
    grid: &[f64],
) -> Result<Vec<SweepRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidConfig("epsilon grid is empty".into()));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(2 * grid.len());
    for &eps in &grid {
        for mode in [Mode::Hybrid, Mode::StandaloneGpr] {
            let run = RunConfig {
                epsilon: Some(eps),
                mode,
                ..config.clone()
            };
            let m = solve(instance, &run)?.manifest;
            rows.push(SweepRow {
                epsilon: eps,
                mode,
                objective: m.objective,
                provision: m.provision,
                dpo_count: m.dpo_count,
                bank_profit: m.bank_profit,
            });
        }
    }
    Ok(rows)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from("epsilon,mode,Y,provision,dpo_count,bank_profit\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.epsilon,
            r.mode.name(),
            r.objective,
            r.provision,
            r.dpo_count,
            r.bank_profit
        ));
    }
    out
}

/// Writes `sweep.csv` into `out_dir`.
pub fn cmd_sweep(
    source: &InstanceSource,
    config: &RunConfig,
    grid: &[f64],
    out_dir: &Path,
) -> Result<Vec<SweepRow>> {
    let instance = source.load()?;
    let rows = sweep(&instance, config, grid)?;
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join("sweep.csv"), sweep_csv(&rows))?;
    Ok(rows)
}

/// Writes `oracle.json` into `out_dir`.
pub fn cmd_oracle(
    source: &InstanceSource,
    cap: Option<f64>,
    epsilon: Option<f64>,
    out_dir: &Path,
) -> Result<OracleResult> {
    let mut instance = source.load()?;
    if let Some(eps) = epsilon {
        instance = instance.with_epsilon(eps)?;
    }
    let result = brute_force_best(&instance, cap.or(instance.provision_cap()))?;
    fs::create_dir_all(out_dir)?;
    write_json(&out_dir.join("oracle.json"), &result)?;
    Ok(result)
}

//! Stage 2: delay-energy-aware task placement.
//!
//! Every scheduler works on the same [`Instance`]: for each task a list of
//! candidate executors (the association satellite first, then every other
//! reachable satellite by increasing route cost). Continuous optimizers
//! decode a position by flooring each coordinate into that list; GA works
//! on the index vector directly.

mod ga;
mod mayfly;
mod pso;

use std::sync::atomic::{AtomicU64, Ordering};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::geo::Routes;
use crate::perf::{self, CostWeights, TaskCostBreakdown};
use crate::rng::SimRng;
use crate::tasks::TaskRequest;
use crate::{Error, Result};

pub use mayfly::{ma_step, mate, Female, Male, MayflyState};

/// Additive cost for each task that cannot be delivered.
pub const INFEASIBLE_PENALTY: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Candidate {
    pub sat: usize,
    /// Seconds per bit along the ISL route from the association satellite.
    pub path_rate_inverse: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Stage2Task {
    pub task: TaskRequest,
    pub assoc: usize,
    pub downlink_rate: f64,
    pub candidates: Vec<Candidate>,
}

impl Stage2Task {
    /// Candidates reachable from `assoc`, association satellite first, then by
    /// route cost and id.
    pub fn new(task: TaskRequest, assoc: usize, downlink_rate: f64, routes: &Routes) -> Self {
        let mut candidates: Vec<Candidate> = (0..routes.len())
            .filter_map(|m| {
                routes.cost(assoc, m).map(|c| Candidate {
                    sat: m,
                    path_rate_inverse: c,
                })
            })
            .collect();
        candidates.sort_by(|a, b| {
            (a.sat != assoc)
                .cmp(&(b.sat != assoc))
                .then(a.path_rate_inverse.total_cmp(&b.path_rate_inverse))
                .then(a.sat.cmp(&b.sat))
        });
        Self {
            task,
            assoc,
            downlink_rate,
            candidates,
        }
    }
}

/// A Stage-2 problem: tasks (ascending user index) and satellite resources.
#[derive(Debug)]
pub struct Instance {
    tasks: Vec<Stage2Task>,
    sat_cpu_hz: Vec<f64>,
    tx_power_w: f64,
    weights: CostWeights,
    backlog_cycles: Vec<f64>,
    scale: (f64, f64),
    evaluations: AtomicU64,
}

impl Clone for Instance {
    fn clone(&self) -> Self {
        Self {
            tasks: self.tasks.clone(),
            sat_cpu_hz: self.sat_cpu_hz.clone(),
            tx_power_w: self.tx_power_w,
            weights: self.weights.clone(),
            backlog_cycles: self.backlog_cycles.clone(),
            scale: self.scale,
            evaluations: AtomicU64::new(self.evaluations()),
        }
    }
}

impl Instance {
    pub fn new(
        mut tasks: Vec<Stage2Task>,
        sat_cpu_hz: Vec<f64>,
        tx_power_w: f64,
        weights: CostWeights,
        backlog_cycles: Option<Vec<f64>>,
    ) -> Result<Self> {
        tasks.sort_by_key(|t| t.task.user);
        if tasks.windows(2).any(|w| w[0].task.user == w[1].task.user) {
            return Err(Error::invalid("at most one task per user"));
        }
        let n = sat_cpu_hz.len();
        if tasks
            .iter()
            .flat_map(|t| t.candidates.iter().map(|c| c.sat).chain([t.assoc]))
            .any(|s| s >= n)
        {
            return Err(Error::invalid("candidate satellite out of range"));
        }
        let backlog_cycles = backlog_cycles.unwrap_or_else(|| vec![0.0; n]);
        if backlog_cycles.len() != n {
            return Err(Error::invalid("backlog length must match satellite count"));
        }
        let mut inst = Self {
            tasks,
            sat_cpu_hz,
            tx_power_w,
            weights,
            backlog_cycles,
            scale: (1.0, 1.0),
            evaluations: AtomicU64::new(0),
        };
        if inst.weights.normalize_cost {
            let local = inst.local_indices();
            let (delay, energy) = inst
                .breakdowns(&local)
                .iter()
                .flatten()
                .fold((0.0, 0.0), |(d, e), b| {
                    (d + b.total_delay, e + b.total_energy)
                });
            inst.scale = (
                if delay > 0.0 { delay } else { 1.0 },
                if energy > 0.0 { energy } else { 1.0 },
            );
        }
        Ok(inst)
    }

    pub fn tasks(&self) -> &[Stage2Task] {
        &self.tasks
    }

    pub fn dim(&self) -> usize {
        self.tasks.len()
    }

    pub fn sat_count(&self) -> usize {
        self.sat_cpu_hz.len()
    }

    pub fn weights(&self) -> &CostWeights {
        &self.weights
    }

    /// Exclusive upper decode bound per dimension (the candidate count).
    pub fn upper_bounds(&self) -> Vec<f64> {
        self.tasks
            .iter()
            .map(|t| t.candidates.len() as f64)
            .collect()
    }

    pub fn candidate_counts(&self) -> Vec<usize> {
        self.tasks.iter().map(|t| t.candidates.len()).collect()
    }

    /// Fitness evaluations performed so far.
    pub fn evaluations(&self) -> u64 {
        self.evaluations.load(Ordering::Relaxed)
    }

    pub fn reset_evaluations(&self) {
        self.evaluations.store(0, Ordering::Relaxed);
    }

    /// Every task on its association satellite.
    pub fn local_indices(&self) -> Vec<Option<usize>> {
        self.tasks
            .iter()
            .map(|t| (!t.candidates.is_empty()).then_some(0))
            .collect()
    }

    /// Map a continuous position onto candidate indices.
    pub fn decode(&self, position: &[f64]) -> Vec<Option<usize>> {
        decode(position, &self.candidate_counts())
    }

    /// Per-task cost breakdowns; `None` for tasks that cannot be delivered.
    pub fn breakdowns(&self, indices: &[Option<usize>]) -> Vec<Option<TaskCostBreakdown>> {
        let mut queued = self.backlog_cycles.clone();
        self.tasks
            .iter()
            .zip(indices)
            .map(|(t, idx)| {
                let cand = t.candidates.get((*idx)?)?;
                let f = self.sat_cpu_hz[cand.sat];
                let d_trans = perf::transmission_delay(
                    t.task.size_bits,
                    t.downlink_rate,
                    Some(cand.path_rate_inverse),
                )?;
                let d_comp = perf::computation_delay(&t.task, f);
                let d_queue = queued[cand.sat] / f;
                queued[cand.sat] += t.task.cycles();
                let (e_trans, e_comp) = perf::energy(
                    d_trans,
                    d_comp,
                    self.tx_power_w,
                    self.weights.energy_coeff,
                    f,
                );
                Some(TaskCostBreakdown::new(
                    d_trans,
                    d_comp,
                    d_queue,
                    e_trans,
                    e_comp,
                    &self.weights,
                ))
            })
            .collect()
    }

    /// Weighted cost plus the infeasibility penalty. Counts one evaluation.
    pub fn fitness(&self, indices: &[Option<usize>]) -> f64 {
        self.evaluations.fetch_add(1, Ordering::Relaxed);
        let (ds, es) = self.scale;
        self.breakdowns(indices)
            .iter()
            .map(|b| match b {
                Some(b) => self
                    .weights
                    .combine(b.total_delay / ds, b.total_energy / es),
                None => INFEASIBLE_PENALTY,
            })
            .sum()
    }

    pub fn fitness_of_position(&self, position: &[f64]) -> f64 {
        self.fitness(&self.decode(position))
    }

    /// Full decision record for an index vector (does not count as an evaluation).
    pub fn decision(&self, indices: Vec<Option<usize>>) -> ScheduleDecision {
        let breakdowns = self.breakdowns(&indices);
        let (ds, es) = self.scale;
        let fitness = breakdowns
            .iter()
            .map(|b| {
                b.map_or(INFEASIBLE_PENALTY, |b| {
                    self.weights
                        .combine(b.total_delay / ds, b.total_energy / es)
                })
            })
            .sum();
        let executors = self
            .tasks
            .iter()
            .zip(&indices)
            .map(|(t, i)| i.and_then(|i| t.candidates.get(i)).map(|c| c.sat))
            .collect();
        let infeasible = breakdowns.iter().filter(|b| b.is_none()).count();
        ScheduleDecision {
            users: self.tasks.iter().map(|t| t.task.user).collect(),
            executors,
            indices,
            fitness,
            breakdowns,
            infeasible,
        }
    }
}

/// `floor(clamp(x, 0, k − ulp))` per dimension; `None` for empty candidate lists.
pub fn decode(position: &[f64], counts: &[usize]) -> Vec<Option<usize>> {
    position
        .iter()
        .zip(counts)
        .map(|(&x, &k)| {
            if k == 0 {
                return None;
            }
            let x = if x.is_nan() { 0.0 } else { x.max(0.0) };
            Some((x.floor() as usize).min(k - 1))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScheduleDecision {
    /// User index of each task (ascending).
    pub users: Vec<usize>,
    pub executors: Vec<Option<usize>>,
    pub indices: Vec<Option<usize>>,
    pub fitness: f64,
    pub breakdowns: Vec<Option<TaskCostBreakdown>>,
    pub infeasible: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Optimizer {
    Ma,
    Pso,
    Ga,
    Random,
    Greedy,
}

impl Optimizer {
    pub fn name(self) -> &'static str {
        match self {
            Optimizer::Ma => "ma",
            Optimizer::Pso => "pso",
            Optimizer::Ga => "ga",
            Optimizer::Random => "random",
            Optimizer::Greedy => "greedy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MetaheuristicConfig {
    /// Individuals per iteration (MA splits them evenly into males and females).
    pub population: usize,
    pub iterations: usize,
    pub a1: f64,
    pub a2: f64,
    pub beta: f64,
    pub nuptial_k: f64,
    pub nuptial_decay: f64,
    pub fl: f64,
    pub fl_decay: f64,
    /// Inertia on the previous velocity in every mayfly update.
    pub gravity: f64,
    /// Velocity limit as a fraction of each dimension's decode range.
    pub velocity_clamp: f64,
    /// Top-ranked pairs that mate each iteration; their offspring replace the worst of each sex.
    pub mating_pairs: usize,
    /// Females move towards their mate when their own cost is worse (otherwise when better).
    pub female_attract_when_worse: bool,
    /// Measure attraction distances per unit of decode range, averaged over
    /// dimensions, so `beta` means the same thing for any task count.
    pub normalize_distance: bool,
    /// Per-gene probability that an offspring gene gets a Gaussian kick.
    pub offspring_mutation: f64,
    /// Standard deviation of that kick as a fraction of the decode range.
    pub offspring_sigma: f64,
    pub pso_inertia: f64,
    pub pso_c1: f64,
    pub pso_c2: f64,
    pub ga_tournament: usize,
    pub ga_crossover_rate: f64,
}

impl Default for MetaheuristicConfig {
    fn default() -> Self {
        Self {
            population: 30,
            iterations: 200,
            a1: 1.0,
            a2: 1.5,
            beta: 2.0,
            nuptial_k: 5.0,
            nuptial_decay: 0.99,
            fl: 1.0,
            fl_decay: 0.99,
            gravity: 0.8,
            velocity_clamp: 0.1,
            mating_pairs: 7,
            female_attract_when_worse: true,
            normalize_distance: true,
            offspring_mutation: 0.1,
            offspring_sigma: 0.2,
            pso_inertia: 0.72,
            pso_c1: 1.49,
            pso_c2: 1.49,
            ga_tournament: 2,
            ga_crossover_rate: 0.9,
        }
    }
}

impl MetaheuristicConfig {
    pub fn validate(&self) -> Result<()> {
        if self.population < 2 || self.population % 2 != 0 {
            return Err(Error::config("population must be even and at least 2"));
        }
        if self.iterations == 0 {
            return Err(Error::config("iterations must be at least 1"));
        }
        let coeffs = [
            self.a1,
            self.a2,
            self.beta,
            self.nuptial_k,
            self.fl,
            self.velocity_clamp,
        ];
        if coeffs.iter().any(|c| !(*c > 0.0)) {
            return Err(Error::config("mayfly coefficients must be positive"));
        }
        if !(0.0..=1.0).contains(&self.nuptial_decay) || !(0.0..=1.0).contains(&self.fl_decay) {
            return Err(Error::config("decay factors must lie in [0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.offspring_mutation) || !(self.offspring_sigma >= 0.0) {
            return Err(Error::config("invalid offspring mutation settings"));
        }
        if self.mating_pairs > self.population / 2 {
            return Err(Error::config(
                "mating_pairs cannot exceed the number of males",
            ));
        }
        if self.ga_tournament == 0 || !(0.0..=1.0).contains(&self.ga_crossover_rate) {
            return Err(Error::config("invalid GA settings"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunResult {
    pub optimizer: Optimizer,
    pub decision: ScheduleDecision,
    /// Best fitness after each iteration (a single entry for greedy/random).
    pub trace: Vec<f64>,
    pub evaluations: u64,
}

/// Solve `instance` with `optimizer`.
///
/// Returns [`Error::Infeasible`] when the instance has tasks but none of them
/// can be delivered to any satellite.
pub fn run(
    optimizer: Optimizer,
    instance: &Instance,
    cfg: &MetaheuristicConfig,
    rng: &mut SimRng,
) -> Result<RunResult> {
    cfg.validate()?;
    if instance.dim() > 0
        && instance
            .breakdowns(&instance.local_indices())
            .iter()
            .all(Option::is_none)
    {
        return Err(Error::Infeasible(format!(
            "none of {} tasks has a feasible executor",
            instance.dim()
        )));
    }
    instance.reset_evaluations();
    let (indices, trace) = if instance.dim() == 0 {
        let len = match optimizer {
            Optimizer::Greedy | Optimizer::Random => 1,
            _ => cfg.iterations,
        };
        (Vec::new(), vec![0.0; len])
    } else {
        match optimizer {
            Optimizer::Greedy => {
                let idx = instance.local_indices();
                let f = instance.fitness(&idx);
                (idx, vec![f])
            }
            Optimizer::Random => {
                let idx: Vec<Option<usize>> = instance
                    .candidate_counts()
                    .iter()
                    .map(|&k| (k > 0).then(|| rng.random_range(0..k)))
                    .collect();
                let f = instance.fitness(&idx);
                (idx, vec![f])
            }
            Optimizer::Ma => {
                let (pos, trace) = mayfly::run(instance, cfg, rng);
                (instance.decode(&pos), trace)
            }
            Optimizer::Pso => {
                let (pos, trace) = pso::run(instance, cfg, rng);
                (instance.decode(&pos), trace)
            }
            Optimizer::Ga => ga::run(instance, cfg, rng),
        }
    };
    Ok(RunResult {
        optimizer,
        decision: instance.decision(indices),
        trace,
        evaluations: instance.evaluations(),
    })
}

/// Uniform random position inside the decode box.
pub(crate) fn random_position(upper: &[f64], rng: &mut SimRng) -> Vec<f64> {
    upper
        .iter()
        .map(|&u| {
            if u > 0.0 {
                rng.random_range(0.0..u)
            } else {
                0.0
            }
        })
        .collect()
}

pub(crate) fn clamp_into(x: &mut [f64], upper: &[f64]) {
    for (v, &u) in x.iter_mut().zip(upper) {
        *v = v.clamp(0.0, u);
    }
}

pub(crate) fn clamp_velocity(v: &mut [f64], vmax: &[f64]) {
    for (x, &m) in v.iter_mut().zip(vmax) {
        *x = x.clamp(-m, m);
    }
}

pub(crate) fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

//! Scenario configuration, the per-slot two-stage loop, seeded sweeps and
//! result files.

mod experiment;
mod output;

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channel::{ChannelParams, FadingModel, LinkTable};
use crate::geo::{
    place_ground_nodes, ConstellationConfig, GroundNode, PlacementConfig, Role, TopologySnapshot,
};
use crate::perf::CostWeights;
use crate::rng::{self, Stream};
use crate::stage1::{self, AssociationDecision, Stage1Config};
use crate::stage2::{self, Instance, MetaheuristicConfig, Optimizer, Stage2Task};
use crate::tasks::{generate_tasks, TaskGenConfig};
use crate::{Error, Result};

pub use experiment::{
    run_experiment, Axis, AxisValues, CellSummary, Experiment, MetricStats, RunRow,
};
pub use output::{
    sig6, write_convergence_csv, write_runs_csv, write_slots_csv, write_summary_json,
    write_tasks_csv,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    Proposed,
    Random,
    Greedy,
    NoAn,
    Pso,
    Ga,
}

impl Scheme {
    pub const ALL: [Scheme; 6] = [
        Scheme::Proposed,
        Scheme::Random,
        Scheme::Greedy,
        Scheme::NoAn,
        Scheme::Pso,
        Scheme::Ga,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scheme::Proposed => "proposed",
            Scheme::Random => "random",
            Scheme::Greedy => "greedy",
            Scheme::NoAn => "no_an",
            Scheme::Pso => "pso",
            Scheme::Ga => "ga",
        }
    }

    pub fn optimizer(self) -> Optimizer {
        match self {
            Scheme::Proposed | Scheme::NoAn => Optimizer::Ma,
            Scheme::Pso => Optimizer::Pso,
            Scheme::Ga => Optimizer::Ga,
            Scheme::Random => Optimizer::Random,
            Scheme::Greedy => Optimizer::Greedy,
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::config(format!("unknown scheme `{s}` (expected one of proposed, random, greedy, no_an, pso, ga)")))
    }
}

/// Everything needed to run one scenario. Missing keys take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constellation: ConstellationConfig,
    pub channel: ChannelParams,
    pub fading: FadingModel,
    pub weights: CostWeights,
    pub stage1: Stage1Config,
    pub stage2: MetaheuristicConfig,
    pub placement: PlacementConfig,
    pub tasks: TaskGenConfig,
    pub users: usize,
    pub eavesdroppers: usize,
    pub slots: usize,
    pub master_seed: u64,
    pub scheme: Scheme,
    /// Unfinished cycles stay queued into the next slot.
    pub carry_backlog: bool,
    /// Only users meeting the secrecy threshold offload.
    pub drop_insecure_users: bool,
    /// Upload at the secrecy rate instead of the legitimate rate.
    pub transmit_at_secrecy_rate: bool,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            constellation: ConstellationConfig::default(),
            channel: ChannelParams::default(),
            fading: FadingModel::default(),
            weights: CostWeights::default(),
            stage1: Stage1Config::default(),
            stage2: MetaheuristicConfig::default(),
            placement: PlacementConfig::default(),
            tasks: TaskGenConfig::default(),
            users: 30,
            eavesdroppers: 5,
            slots: 10,
            master_seed: 1,
            scheme: Scheme::Proposed,
            carry_backlog: false,
            drop_insecure_users: true,
            transmit_at_secrecy_rate: false,
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)
            .map_err(|e| Error::config(format!("invalid config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::config(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        self.constellation.validate()?;
        self.channel.validate()?;
        self.fading.validate()?;
        self.weights.validate()?;
        self.stage1.validate()?;
        self.stage2.validate()?;
        self.placement.validate()?;
        self.tasks.validate()?;
        self.weights
            .sat_cpu_hz
            .expand(self.constellation.sat_count())?;
        if self.slots == 0 {
            return Err(Error::config("slots must be at least 1"));
        }
        Ok(())
    }
}

/// Seed-dependent, slot-independent state: ground nodes and CPU speeds.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub users: Vec<GroundNode>,
    pub eves: Vec<GroundNode>,
    pub sat_cpu_hz: Vec<f64>,
}

impl Scenario {
    pub fn new(cfg: &ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let users = place_ground_nodes(
            &cfg.placement,
            &cfg.constellation,
            Role::User,
            cfg.users,
            cfg.master_seed,
        )?;
        let eves = place_ground_nodes(
            &cfg.placement,
            &cfg.constellation,
            Role::Eavesdropper,
            cfg.eavesdroppers,
            cfg.master_seed,
        )?;
        let sat_cpu_hz = cfg
            .weights
            .sat_cpu_hz
            .expand(cfg.constellation.sat_count())?;
        Ok(Self {
            users,
            eves,
            sat_cpu_hz,
        })
    }

    /// Topology for `slot`. Coincident satellites get a zero-rate (unused) ISL.
    pub fn snapshot(&self, cfg: &ScenarioConfig, slot: usize) -> TopologySnapshot {
        TopologySnapshot::build(
            &cfg.constellation,
            slot,
            &self.users,
            &self.eves,
            cfg.channel.isl_max_range_km,
            |d| cfg.channel.isl_rate_at(d).unwrap_or(0.0),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskStatus {
    Scheduled,
    /// The user sees no satellite.
    Unassociated,
    /// Dropped for missing the secrecy threshold.
    Insecure,
    /// No executor can receive the task (zero rate or unreachable).
    Undeliverable,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TaskRecord {
    pub slot: usize,
    pub user: usize,
    pub status: TaskStatus,
    pub assoc: Option<usize>,
    pub executor: Option<usize>,
    pub secure: bool,
    pub secrecy_rate_bps: f64,
    pub size_bits: f64,
    pub cycles: f64,
    pub d_trans: Option<f64>,
    pub d_comp: Option<f64>,
    pub d_queue: Option<f64>,
    pub e_trans: Option<f64>,
    pub e_comp: Option<f64>,
    pub total_delay: Option<f64>,
    pub total_energy: Option<f64>,
    pub weighted_cost: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlotResult {
    pub slot: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub psi_star: f64,
    pub rtp: f64,
    pub secure_users: usize,
    pub scheduled_tasks: usize,
    pub unserved_tasks: usize,
    /// Arithmetic means over scheduled tasks (NaN when none).
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    /// Sum of `κD·D + κE·E` over scheduled tasks.
    pub weighted_cost: f64,
    /// Stage 2 found no deliverable task at all.
    pub infeasible: bool,
    pub stage1_evaluations: u64,
    pub stage2_evaluations: u64,
    pub optimizer: Optimizer,
    pub trace: Vec<f64>,
    pub tasks: Vec<TaskRecord>,
}

/// Stage 1 under the scheme's association rule.
pub fn associate(
    cfg: &ScenarioConfig,
    snapshot: &TopologySnapshot,
    links: &LinkTable,
) -> AssociationDecision {
    let eps = cfg.stage1.epsilon_secrecy;
    match cfg.scheme {
        Scheme::Proposed | Scheme::Pso | Scheme::Ga => stage1::search(links, &cfg.stage1),
        Scheme::NoAn => {
            let a = stage1::associate_for_psi(links, 1.0, eps);
            let mut d = stage1::evaluate_fixed(links, a.assoc, 1.0, eps);
            d.evaluations += a.evaluations;
            d
        }
        Scheme::Greedy => stage1::evaluate_fixed(
            links,
            stage1::nearest_association(links, &snapshot.user_angles),
            1.0,
            eps,
        ),
        Scheme::Random => {
            let slot = snapshot.slot as u64;
            let assoc = stage1::random_association(links, |u| {
                rng::stream(cfg.master_seed, Stream::Association, slot, u as u64, 0)
            });
            stage1::evaluate_fixed(links, assoc, 1.0, eps)
        }
    }
}

/// One slot of the two-stage loop. `backlog` holds cycles already queued on
/// each satellite at the start of the slot.
pub fn run_slot(
    cfg: &ScenarioConfig,
    scenario: &Scenario,
    slot: usize,
    backlog: &[f64],
) -> Result<SlotResult> {
    let snapshot = scenario.snapshot(cfg, slot);
    let links = LinkTable::sample(&cfg.channel, &cfg.fading, &snapshot, cfg.master_seed)?;
    let decision = associate(cfg, &snapshot, &links);
    let requests = generate_tasks(&cfg.tasks, cfg.users, slot, cfg.master_seed);

    let mut per_sat = vec![0usize; snapshot.sat_count()];
    for n in decision.assoc.iter().flatten() {
        per_sat[*n] += 1;
    }
    let psi = decision.psi_star;
    let mut stage2_tasks = Vec::new();
    for (u, req) in requests.iter().enumerate() {
        let Some(n0) = decision.assoc[u] else {
            continue;
        };
        if cfg.drop_insecure_users && !decision.secure[u] {
            continue;
        }
        let rate = if cfg.transmit_at_secrecy_rate {
            decision.per_user_secrecy[u]
        } else if cfg.channel.bandwidth_split {
            let w = cfg.channel.bandwidth_hz / per_sat[n0] as f64;
            links.user_rate_in_band(u, n0, psi, w, cfg.channel.noise_power_for(w))
        } else {
            links.user_rate(u, n0, psi)
        };
        stage2_tasks.push(Stage2Task::new(*req, n0, rate, &snapshot.routes));
    }
    let instance = Instance::new(
        stage2_tasks,
        scenario.sat_cpu_hz.clone(),
        cfg.channel.tx_power_w,
        cfg.weights.clone(),
        Some(backlog.to_vec()),
    )?;
    let optimizer = cfg.scheme.optimizer();
    let mut sched_rng = rng::stream(cfg.master_seed, Stream::Scheduler, slot as u64, 0, 0);
    let outcome = match stage2::run(optimizer, &instance, &cfg.stage2, &mut sched_rng) {
        Ok(r) => Some(r),
        Err(Error::Infeasible(_)) => None,
        Err(e) => return Err(e),
    };

    let mut records: Vec<TaskRecord> = requests
        .iter()
        .enumerate()
        .map(|(u, req)| TaskRecord {
            slot,
            user: u,
            status: match decision.assoc[u] {
                None => TaskStatus::Unassociated,
                Some(_) if cfg.drop_insecure_users && !decision.secure[u] => TaskStatus::Insecure,
                Some(_) => TaskStatus::Undeliverable,
            },
            assoc: decision.assoc[u],
            executor: None,
            secure: decision.secure[u],
            secrecy_rate_bps: decision.per_user_secrecy[u],
            size_bits: req.size_bits,
            cycles: req.cycles(),
            d_trans: None,
            d_comp: None,
            d_queue: None,
            e_trans: None,
            e_comp: None,
            total_delay: None,
            total_energy: None,
            weighted_cost: None,
        })
        .collect();
    if let Some(r) = &outcome {
        let d = &r.decision;
        for ((&u, exec), b) in d.users.iter().zip(&d.executors).zip(&d.breakdowns) {
            let rec = &mut records[u];
            if let (Some(e), Some(b)) = (exec, b) {
                rec.status = TaskStatus::Scheduled;
                rec.executor = Some(*e);
                rec.d_trans = Some(b.d_trans);
                rec.d_comp = Some(b.d_comp);
                rec.d_queue = Some(b.d_queue);
                rec.e_trans = Some(b.e_trans);
                rec.e_comp = Some(b.e_comp);
                rec.total_delay = Some(b.total_delay);
                rec.total_energy = Some(b.total_energy);
                rec.weighted_cost = Some(b.weighted_cost);
            }
        }
    }
    let scheduled: Vec<&TaskRecord> = records
        .iter()
        .filter(|r| r.status == TaskStatus::Scheduled)
        .collect();
    let n = scheduled.len();
    let mean = |f: fn(&TaskRecord) -> Option<f64>| {
        if n == 0 {
            f64::NAN
        } else {
            scheduled.iter().filter_map(|r| f(r)).sum::<f64>() / n as f64
        }
    };
    Ok(SlotResult {
        slot,
        scheme: cfg.scheme,
        seed: cfg.master_seed,
        psi_star: psi,
        rtp: decision.rtp,
        secure_users: decision.secure_count,
        scheduled_tasks: n,
        unserved_tasks: records.len() - n,
        mean_delay_s: mean(|r| r.total_delay),
        mean_energy_j: mean(|r| r.total_energy),
        weighted_cost: scheduled.iter().filter_map(|r| r.weighted_cost).sum(),
        infeasible: outcome.is_none(),
        stage1_evaluations: decision.evaluations,
        stage2_evaluations: outcome.as_ref().map_or(0, |r| r.evaluations),
        optimizer,
        trace: outcome.map(|r| r.trace).unwrap_or_default(),
        tasks: records,
    })
}

/// Queue left on each satellite after `slot_seconds` of processing.
pub fn next_backlog(
    backlog: &[f64],
    result: &SlotResult,
    sat_cpu_hz: &[f64],
    slot_seconds: f64,
) -> Vec<f64> {
    let mut next = backlog.to_vec();
    for r in &result.tasks {
        if let Some(e) = r.executor {
            next[e] += r.cycles;
        }
    }
    next.iter()
        .zip(sat_cpu_hz)
        .map(|(q, f)| (q - f * slot_seconds).max(0.0))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunOutput {
    pub scheme: Scheme,
    pub seed: u64,
    pub slots: Vec<SlotResult>,
    pub psi_star: f64,
    pub rtp: f64,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub weighted_cost: f64,
    pub infeasible_slots: usize,
}

/// Mean of the finite entries; NaN when there are none.
pub(crate) fn finite_mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = xs
        .into_iter()
        .filter(|x| x.is_finite())
        .fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    if n == 0 {
        f64::NAN
    } else {
        sum / n as f64
    }
}

/// All `cfg.slots` slots in order, averaging per-slot metrics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let scenario = Scenario::new(cfg)?;
    let mut backlog = vec![0.0; scenario.sat_cpu_hz.len()];
    let mut slots = Vec::with_capacity(cfg.slots);
    for t in 0..cfg.slots {
        let r = run_slot(cfg, &scenario, t, &backlog)?;
        if cfg.carry_backlog {
            backlog = next_backlog(
                &backlog,
                &r,
                &scenario.sat_cpu_hz,
                cfg.constellation.slot_seconds,
            );
        }
        slots.push(r);
    }
    Ok(RunOutput {
        scheme: cfg.scheme,
        seed: cfg.master_seed,
        psi_star: finite_mean(slots.iter().map(|s| s.psi_star)),
        rtp: finite_mean(slots.iter().map(|s| s.rtp)),
        mean_delay_s: finite_mean(slots.iter().map(|s| s.mean_delay_s)),
        mean_energy_j: finite_mean(slots.iter().map(|s| s.mean_energy_j)),
        weighted_cost: finite_mean(slots.iter().map(|s| s.weighted_cost)),
        infeasible_slots: slots.iter().filter(|s| s.infeasible).count(),
        slots,
    })
}

use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use super::{finite_mean, run_scenario, ScenarioConfig, Scheme};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    Users,
    Eves,
    Slots,
}

/// One sweep axis, parsed from `users=10:30:5` (inclusive range with step)
/// or `eves=2,4,8` (explicit list).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisValues {
    pub axis: Axis,
    pub values: Vec<usize>,
}

impl FromStr for AxisValues {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, values_text) = s
            .split_once('=')
            .ok_or_else(|| Error::config(format!("axis `{s}` must look like name=values")))?;
        let axis = match name.trim() {
            "users" => Axis::Users,
            "eves" | "eavesdroppers" => Axis::Eves,
            "slots" => Axis::Slots,
            other => return Err(Error::config(format!("unknown sweep axis `{other}`"))),
        };
        let num = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::config(format!("bad axis value `{t}` in `{s}`")))
        };
        let values = if values_text.contains(':') {
            let parts: Vec<&str> = values_text.split(':').collect();
            let (lo, hi, step) = match parts.as_slice() {
                [lo, hi] => (num(lo)?, num(hi)?, 1),
                [lo, hi, step] => (num(lo)?, num(hi)?, num(step)?),
                _ => {
                    return Err(Error::config(format!(
                        "axis range `{values_text}` must be lo:hi[:step]"
                    )))
                }
            };
            if step == 0 || lo > hi {
                return Err(Error::config(format!(
                    "axis range `{values_text}` is empty or has zero step"
                )));
            }
            (lo..=hi).step_by(step).collect()
        } else {
            values_text
                .split(',')
                .map(num)
                .collect::<Result<Vec<_>>>()?
        };
        if values.is_empty() {
            return Err(Error::config(format!("axis `{s}` has no values")));
        }
        Ok(Self { axis, values })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRow {
    pub users: usize,
    pub eavesdroppers: usize,
    pub slots: usize,
    pub scheme: Scheme,
    pub seed: u64,
    pub psi_star: f64,
    pub rtp: f64,
    pub mean_delay_s: f64,
    pub mean_energy_j: f64,
    pub weighted_cost: f64,
    pub infeasible_slots: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricStats {
    pub mean: f64,
    /// Sample standard deviation across seeds (0 for a single seed).
    pub std: f64,
}

impl MetricStats {
    pub fn of(xs: &[f64]) -> Self {
        let finite: Vec<f64> = xs.iter().copied().filter(|x| x.is_finite()).collect();
        let mean = finite_mean(finite.iter().copied());
        let std = if finite.len() < 2 {
            0.0
        } else {
            (finite.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (finite.len() - 1) as f64)
                .sqrt()
        };
        Self { mean, std }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub users: usize,
    pub eavesdroppers: usize,
    pub slots: usize,
    pub scheme: Scheme,
    pub runs: usize,
    pub psi_star: MetricStats,
    pub rtp: MetricStats,
    pub mean_delay_s: MetricStats,
    pub mean_energy_j: MetricStats,
    pub weighted_cost: MetricStats,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Experiment {
    pub rows: Vec<RunRow>,
    pub summary: Vec<CellSummary>,
}

impl Experiment {
    pub fn cell(&self, users: usize, eavesdroppers: usize, scheme: Scheme) -> Option<&CellSummary> {
        self.summary
            .iter()
            .find(|c| c.users == users && c.eavesdroppers == eavesdroppers && c.scheme == scheme)
    }
}

/// Every (grid point × scheme × seed) run, in parallel. Rows come back in
/// grid, scheme, seed order regardless of scheduling.
pub fn run_experiment(
    base: &ScenarioConfig,
    axes: &[AxisValues],
    seeds: &[u64],
    schemes: &[Scheme],
) -> Result<Experiment> {
    if seeds.is_empty() {
        return Err(Error::config("a sweep needs at least one seed"));
    }
    if schemes.is_empty() {
        return Err(Error::config("a sweep needs at least one scheme"));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].iter().any(|b| b.axis == a.axis) {
            return Err(Error::config(format!("axis {:?} given twice", a.axis)));
        }
    }
    let mut grid = vec![base.clone()];
    for a in axes {
        grid = grid
            .into_iter()
            .flat_map(|cfg| {
                a.values.iter().map(move |&v| {
                    let mut c = cfg.clone();
                    match a.axis {
                        Axis::Users => c.users = v,
                        Axis::Eves => c.eavesdroppers = v,
                        Axis::Slots => c.slots = v,
                    }
                    c
                })
            })
            .collect();
    }
    let mut jobs = Vec::new();
    for cell in &grid {
        for &scheme in schemes {
            for &seed in seeds {
                let mut c = cell.clone();
                c.scheme = scheme;
                c.master_seed = seed;
                c.validate()?;
                jobs.push(c);
            }
        }
    }
    let rows = jobs
        .par_iter()
        .map(|c| {
            let out = run_scenario(c)?;
            Ok(RunRow {
                users: c.users,
                eavesdroppers: c.eavesdroppers,
                slots: c.slots,
                scheme: c.scheme,
                seed: c.master_seed,
                psi_star: out.psi_star,
                rtp: out.rtp,
                mean_delay_s: out.mean_delay_s,
                mean_energy_j: out.mean_energy_j,
                weighted_cost: out.weighted_cost,
                infeasible_slots: out.infeasible_slots,
            })
        })
        .collect::<Result<Vec<RunRow>>>()?;
    let summary = rows
        .chunks(seeds.len())
        .map(|chunk| {
            let col =
                |f: fn(&RunRow) -> f64| MetricStats::of(&chunk.iter().map(f).collect::<Vec<_>>());
            let first = &chunk[0];
            CellSummary {
                users: first.users,
                eavesdroppers: first.eavesdroppers,
                slots: first.slots,
                scheme: first.scheme,
                runs: chunk.len(),
                psi_star: col(|r| r.psi_star),
                rtp: col(|r| r.rtp),
                mean_delay_s: col(|r| r.mean_delay_s),
                mean_energy_j: col(|r| r.mean_energy_j),
                weighted_cost: col(|r| r.weighted_cost),
            }
        })
        .collect();
    Ok(Experiment { rows, summary })
}

//! Delay and energy accounting for one task placement.

use serde::{Deserialize, Serialize};

use crate::tasks::TaskRequest;
use crate::{Error, Result};

/// Satellite CPU speed, either shared or listed per satellite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CpuSpeed {
    Uniform(f64),
    PerSatellite(Vec<f64>),
}

impl CpuSpeed {
    pub fn for_sat(&self, sat: usize) -> f64 {
        match self {
            CpuSpeed::Uniform(f) => *f,
            CpuSpeed::PerSatellite(v) => v[sat],
        }
    }

    pub fn expand(&self, sat_count: usize) -> Result<Vec<f64>> {
        match self {
            CpuSpeed::Uniform(f) => Ok(vec![*f; sat_count]),
            CpuSpeed::PerSatellite(v) if v.len() == sat_count => Ok(v.clone()),
            CpuSpeed::PerSatellite(v) => Err(Error::config(format!(
                "{} per-satellite CPU speeds given for {sat_count} satellites",
                v.len()
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CostWeights {
    pub kappa_d: f64,
    pub kappa_e: f64,
    /// Effective switched capacitance: compute power is `energy_coeff · f³`.
    pub energy_coeff: f64,
    pub sat_cpu_hz: CpuSpeed,
    /// Scale delay and energy by the all-local schedule's totals before weighting.
    pub normalize_cost: bool,
}

impl Default for CostWeights {
    fn default() -> Self {
        Self {
            kappa_d: 0.5,
            kappa_e: 0.5,
            energy_coeff: 1e-28,
            sat_cpu_hz: CpuSpeed::Uniform(2e9),
            normalize_cost: false,
        }
    }
}

impl CostWeights {
    pub fn validate(&self) -> Result<()> {
        if !(self.kappa_d >= 0.0 && self.kappa_e >= 0.0)
            || (self.kappa_d + self.kappa_e - 1.0).abs() > 1e-9
        {
            return Err(Error::config(
                "cost weights must be non-negative and sum to 1",
            ));
        }
        if !(self.energy_coeff > 0.0) {
            return Err(Error::config("energy coefficient must be positive"));
        }
        let ok = match &self.sat_cpu_hz {
            CpuSpeed::Uniform(f) => *f > 0.0,
            CpuSpeed::PerSatellite(v) => !v.is_empty() && v.iter().all(|f| *f > 0.0),
        };
        if !ok {
            return Err(Error::config("satellite CPU speeds must be positive"));
        }
        Ok(())
    }

    /// Weighted cost of one task given its total delay and energy.
    pub fn combine(&self, delay: f64, energy: f64) -> f64 {
        self.kappa_d * delay + self.kappa_e * energy
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaskCostBreakdown {
    pub d_trans: f64,
    pub d_comp: f64,
    pub d_queue: f64,
    pub e_trans: f64,
    pub e_comp: f64,
    pub total_delay: f64,
    pub total_energy: f64,
    pub weighted_cost: f64,
}

impl TaskCostBreakdown {
    pub fn new(
        d_trans: f64,
        d_comp: f64,
        d_queue: f64,
        e_trans: f64,
        e_comp: f64,
        w: &CostWeights,
    ) -> Self {
        let total_delay = d_trans + d_comp + d_queue;
        let total_energy = e_trans + e_comp;
        Self {
            d_trans,
            d_comp,
            d_queue,
            e_trans,
            e_comp,
            total_delay,
            total_energy,
            weighted_cost: w.combine(total_delay, total_energy),
        }
    }
}

/// Downlink plus ISL delivery time. `None` marks an infeasible placement
/// (no downlink rate or no route).
pub fn transmission_delay(
    size_bits: f64,
    rate_down: f64,
    path_rate_inverse: Option<f64>,
) -> Option<f64> {
    let path = path_rate_inverse?;
    if size_bits == 0.0 {
        return Some(0.0);
    }
    if !(rate_down > 0.0) || !path.is_finite() {
        return None;
    }
    Some(size_bits / rate_down + size_bits * path)
}

pub fn computation_delay(task: &TaskRequest, cpu_hz: f64) -> f64 {
    task.cycles() / cpu_hz
}

/// Waiting time behind the tasks already queued.
pub fn queuing_delay(ahead: &[TaskRequest], cpu_hz: f64) -> f64 {
    ahead.iter().map(|t| t.cycles()).sum::<f64>() / cpu_hz
}

/// `(P_t · d_trans, energy_coeff · f³ · d_comp)`.
pub fn energy(
    d_trans: f64,
    d_comp: f64,
    tx_power_w: f64,
    energy_coeff: f64,
    cpu_hz: f64,
) -> (f64, f64) {
    (tx_power_w * d_trans, energy_coeff * cpu_hz.powi(3) * d_comp)
}

pub fn weighted_cost(breakdowns: &[TaskCostBreakdown], w: &CostWeights) -> f64 {
    breakdowns
        .iter()
        .map(|b| w.combine(b.total_delay, b.total_energy))
        .sum()
}

//! Per-slot task arrivals and per-satellite FIFO queues.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{self, Stream};
use crate::{Error, Result};

pub const BITS_PER_MB: f64 = 8.0e6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TaskRequest {
    pub user: usize,
    pub slot: usize,
    pub size_bits: f64,
    pub cycles_per_bit: f64,
}

impl TaskRequest {
    pub fn cycles(&self) -> f64 {
        self.size_bits * self.cycles_per_bit
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TaskGenConfig {
    pub size_min_mb: f64,
    pub size_max_mb: f64,
    pub cycles_min: u32,
    pub cycles_max: u32,
}

impl Default for TaskGenConfig {
    fn default() -> Self {
        Self {
            size_min_mb: 10.0,
            size_max_mb: 20.0,
            cycles_min: 300,
            cycles_max: 500,
        }
    }
}

impl TaskGenConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.size_min_mb >= 0.0 && self.size_min_mb <= self.size_max_mb) {
            return Err(Error::config(
                "task size range must be non-negative and ordered",
            ));
        }
        if self.cycles_min > self.cycles_max {
            return Err(Error::config("cycles-per-bit range must be ordered"));
        }
        Ok(())
    }
}

/// One task per user for `slot`. Task `(slot, user)` has its own stream, so
/// adding users never changes the tasks of existing ones.
pub fn generate_tasks(
    cfg: &TaskGenConfig,
    user_count: usize,
    slot: usize,
    seed: u64,
) -> Vec<TaskRequest> {
    (0..user_count)
        .map(|user| {
            let mut r = rng::stream(seed, Stream::Tasks, slot as u64, user as u64, 0);
            let size_mb = r.random_range(cfg.size_min_mb..=cfg.size_max_mb);
            let cycles = r.random_range(cfg.cycles_min..=cfg.cycles_max);
            TaskRequest {
                user,
                slot,
                size_bits: size_mb * BITS_PER_MB,
                cycles_per_bit: f64::from(cycles),
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct QueueEntry {
    pub task: TaskRequest,
    pub remaining_cycles: f64,
}

/// Per-satellite FIFO queues for one slot.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct QueueState {
    pub queues: Vec<Vec<QueueEntry>>,
}

impl QueueState {
    /// Enqueue every `(task, satellite)` pair. Tasks bound for the same
    /// satellite are ordered by ascending user index.
    pub fn build(sat_count: usize, placed: &[(TaskRequest, usize)]) -> Self {
        let mut order: Vec<&(TaskRequest, usize)> = placed.iter().collect();
        order.sort_by_key(|(t, _)| t.user);
        let mut queues = vec![Vec::new(); sat_count];
        for (task, sat) in order {
            queues[*sat].push(QueueEntry {
                task: *task,
                remaining_cycles: task.cycles(),
            });
        }
        Self { queues }
    }

    pub fn len(&self) -> usize {
        self.queues.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Tasks queued at `sat` ahead of the task of `user`, in arrival order.
    pub fn queue_ahead(&self, sat: usize, user: usize) -> Result<Vec<TaskRequest>> {
        let queue = self.queues.get(sat).ok_or(Error::NotQueued { user, sat })?;
        let pos = queue
            .iter()
            .position(|e| e.task.user == user)
            .ok_or(Error::NotQueued { user, sat })?;
        Ok(queue[..pos].iter().map(|e| e.task).collect())
    }
}

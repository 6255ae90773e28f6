//! Time-slotted simulator for secure task scheduling in a LEO
//! satellite-terrestrial edge computing network.
//!
//! Each slot runs two stages. Stage 1 picks a shared artificial-noise power
//! ratio and associates every user with the visible satellite that gives the
//! best secrecy rate. Stage 2 places the resulting tasks on satellites
//! (locally or across inter-satellite links) by minimizing a weighted sum of
//! delay and energy with the Mayfly Algorithm, or with one of the baseline
//! schedulers.
//!
//! Module map:
//!
//! - [`geo`]: orbits, beam coverage, ground nodes, ISL grid and routing
//! - [`channel`]: path loss, fading, SINR, rates and secrecy
//! - [`tasks`]: task generation and per-satellite FIFO queues
//! - [`perf`]: delay/energy accounting
//! - [`stage1`]: AN ratio search and secrecy-aware association
//! - [`stage2`]: schedulers (MA, PSO, GA, greedy, random)
//! - [`harness`]: scenario configuration, slot loop, sweeps and outputs

pub mod channel;
pub mod error;
pub mod geo;
pub mod harness;
pub mod perf;
pub mod rng;
pub mod stage1;
pub mod stage2;
pub mod tasks;

pub use error::{Error, Result};

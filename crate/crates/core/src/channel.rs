//! Link budget: free-space loss, Shadowed-Rician fading, SINR with
//! artificial noise, Shannon rates, secrecy rate and ISL rates.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::geo::{distance_km, TopologySnapshot};
use crate::rng::{self, Stream};
use crate::{Error, Result};

pub const SPEED_OF_LIGHT_M_S: f64 = 2.997_924_58e8;
pub const BOLTZMANN_J_K: f64 = 1.380_649e-23;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ChannelParams {
    pub carrier_hz: f64,
    /// Satellite transmit plus ground receive antenna gain.
    pub combined_gain_db: f64,
    pub bandwidth_hz: f64,
    pub noise_temp_dbk: f64,
    pub tx_power_w: f64,
    pub boltzmann: f64,
    pub isl_noise_temp_dbk: f64,
    pub ebn0_db: f64,
    pub link_margin_db: f64,
    pub isl_max_range_km: f64,
    pub isl_carrier_hz: f64,
    /// Per-terminal ISL antenna gain (applied at both ends).
    pub isl_antenna_gain_db: f64,
    /// Split the downlink bandwidth evenly among the users served by one satellite.
    pub bandwidth_split: bool,
}

impl Default for ChannelParams {
    fn default() -> Self {
        Self {
            carrier_hz: 1.0e10,
            combined_gain_db: 24.0,
            bandwidth_hz: 1.0e6,
            noise_temp_dbk: 25.0,
            tx_power_w: 5.0,
            boltzmann: BOLTZMANN_J_K,
            isl_noise_temp_dbk: 25.0,
            ebn0_db: 9.6,
            link_margin_db: 3.0,
            isl_max_range_km: 2500.0,
            isl_carrier_hz: 23.0e9,
            isl_antenna_gain_db: 23.0,
            bandwidth_split: true,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("carrier_hz", self.carrier_hz),
            ("bandwidth_hz", self.bandwidth_hz),
            ("tx_power_w", self.tx_power_w),
            ("boltzmann", self.boltzmann),
            ("isl_max_range_km", self.isl_max_range_km),
            ("isl_carrier_hz", self.isl_carrier_hz),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("channel.{name} must be positive")));
            }
        }
        let finite = [
            self.combined_gain_db,
            self.noise_temp_dbk,
            self.isl_noise_temp_dbk,
            self.ebn0_db,
            self.link_margin_db,
            self.isl_antenna_gain_db,
        ];
        if finite.iter().any(|v| !v.is_finite()) {
            return Err(Error::config("channel dB quantities must be finite"));
        }
        Ok(())
    }

    /// Thermal noise power σ² = b·T·W0, watts.
    pub fn noise_power_w(&self) -> f64 {
        self.noise_power_for(self.bandwidth_hz)
    }

    pub fn noise_power_for(&self, bandwidth_hz: f64) -> f64 {
        self.boltzmann * db_to_linear(self.noise_temp_dbk) * bandwidth_hz
    }

    /// Downlink received power at distance `distance_km` under fading power `h2`.
    pub fn downlink_power(&self, distance_km: f64, h2: f64) -> Result<f64> {
        Ok(received_power(
            self,
            h2,
            path_loss(self.carrier_hz, distance_km * 1e3)?,
        ))
    }

    /// ISL rate for a link of `distance_km`.
    pub fn isl_rate_at(&self, distance_km: f64) -> Result<f64> {
        isl_rate(self, path_loss(self.isl_carrier_hz, distance_km * 1e3)?)
    }
}

/// Free-space path gain `(c / (4π f d))²`.
pub fn path_loss(carrier_hz: f64, distance_m: f64) -> Result<f64> {
    if !(distance_m > 0.0) {
        return Err(Error::invalid("path length must be positive"));
    }
    if !(carrier_hz > 0.0) {
        return Err(Error::invalid("carrier frequency must be positive"));
    }
    Ok((SPEED_OF_LIGHT_M_S / (4.0 * PI * carrier_hz * distance_m)).powi(2))
}

/// `P_t · G · L · |h|²`.
pub fn received_power(p: &ChannelParams, h2: f64, loss: f64) -> f64 {
    p.tx_power_w * db_to_linear(p.combined_gain_db) * loss * h2
}

/// SINR of a legitimate user: `ψ·own / (Σ interferers + σ²)`.
pub fn sinr_user(psi: f64, own: f64, interferers: &[f64], noise_w: f64) -> f64 {
    psi * own / (interferers.iter().sum::<f64>() + noise_w)
}

/// SINR of an eavesdropper, which also receives the serving satellite's AN.
pub fn sinr_eve(psi: f64, own: f64, interferers: &[f64], noise_w: f64) -> f64 {
    psi * own / ((1.0 - psi) * own + interferers.iter().sum::<f64>() + noise_w)
}

/// Shannon rate `W0·log2(1 + sinr)`.
pub fn rate(bandwidth_hz: f64, sinr: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr).log2()
}

/// `[R_u − max_e R_e]⁺`; an empty eavesdropper set contributes 0.
pub fn secrecy_rate(rate_user: f64, eve_rates: &[f64]) -> f64 {
    let worst = eve_rates.iter().copied().fold(0.0, f64::max);
    (rate_user - worst).max(0.0)
}

/// ISL rate `P·G_tx·G_rx·L / (b·T_s·(Eb/N0)·M)`.
pub fn isl_rate(p: &ChannelParams, loss: f64) -> Result<f64> {
    if !(loss > 0.0) {
        return Err(Error::invalid("ISL path gain must be positive"));
    }
    let gains = db_to_linear(p.isl_antenna_gain_db).powi(2);
    let denom = p.boltzmann
        * db_to_linear(p.isl_noise_temp_dbk)
        * db_to_linear(p.ebn0_db)
        * db_to_linear(p.link_margin_db);
    Ok(p.tx_power_w * gains * loss / denom)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FadingMode {
    Stochastic,
    DeterministicUnit,
}

/// Shadowed-Rician small-scale fading.
///
/// `b_sr` is half the scattered power, `m_sr` the Nakagami parameter of the
/// line-of-sight amplitude and `omega_sr` the mean line-of-sight power, so
/// `E|h|² = 2·b_sr + omega_sr`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FadingModel {
    pub b_sr: f64,
    pub m_sr: f64,
    pub omega_sr: f64,
    pub mode: FadingMode,
}

impl Default for FadingModel {
    fn default() -> Self {
        Self {
            b_sr: 0.126,
            m_sr: 10.1,
            omega_sr: 0.835,
            mode: FadingMode::Stochastic,
        }
    }
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.m_sr > 0.0) || !(self.b_sr > 0.0) || !(self.omega_sr >= 0.0) {
            return Err(Error::config(
                "fading needs m_sr > 0, b_sr > 0, omega_sr ≥ 0",
            ));
        }
        Ok(())
    }

    pub fn mean_power(&self) -> f64 {
        match self.mode {
            FadingMode::Stochastic => 2.0 * self.b_sr + self.omega_sr,
            FadingMode::DeterministicUnit => 1.0,
        }
    }
}

/// Draw one fading power `|h|²`.
pub fn sample_fading<R: Rng + ?Sized>(model: &FadingModel, rng: &mut R) -> f64 {
    match model.mode {
        FadingMode::DeterministicUnit => 1.0,
        FadingMode::Stochastic => {
            // The scatter term is circularly symmetric, so the LOS phase can be fixed at zero.
            let los_power = if model.omega_sr > 0.0 {
                Gamma::new(model.m_sr, model.omega_sr / model.m_sr)
                    .expect("validated fading parameters")
                    .sample(rng)
            } else {
                0.0
            };
            let sigma = model.b_sr.sqrt();
            let re: f64 = los_power.sqrt() + sigma * rng.sample::<f64, _>(StandardNormal);
            let im: f64 = sigma * rng.sample::<f64, _>(StandardNormal);
            re * re + im * im
        }
    }
}

/// Received powers for every (visible satellite, ground node) pair in one slot.
#[derive(Debug, Clone)]
pub struct LinkTable {
    pub noise_w: f64,
    pub bandwidth_hz: f64,
    /// `user_rx[u]` is aligned with `snapshot.visible_users[u]`.
    pub user_sats: Vec<Vec<usize>>,
    pub user_rx: Vec<Vec<f64>>,
    pub eve_sats: Vec<Vec<usize>>,
    pub eve_rx: Vec<Vec<f64>>,
}

const EVE_KEY: u64 = 1 << 32;

impl LinkTable {
    /// Sample block fading for the slot and compute every received power.
    /// Each (satellite, node, slot) triple owns a fading stream.
    pub fn sample(
        params: &ChannelParams,
        fading: &FadingModel,
        snapshot: &TopologySnapshot,
        seed: u64,
    ) -> Result<Self> {
        let slot = snapshot.slot as u64;
        let rx = |sat: usize, pos: &crate::geo::Vec3, key: u64| -> Result<f64> {
            let mut s = rng::stream(seed, Stream::Fading, slot, sat as u64, key);
            let h2 = sample_fading(fading, &mut s);
            params.downlink_power(distance_km(&snapshot.sats[sat].position, pos), h2)
        };
        let user_rx = snapshot
            .visible_users
            .iter()
            .enumerate()
            .map(|(u, vis)| {
                vis.iter()
                    .map(|&n| rx(n, &snapshot.user_positions[u], u as u64))
                    .collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        let eve_rx = snapshot
            .visible_eves
            .iter()
            .enumerate()
            .map(|(e, vis)| {
                vis.iter()
                    .map(|&n| rx(n, &snapshot.eve_positions[e], EVE_KEY | e as u64))
                    .collect()
            })
            .collect::<Result<Vec<Vec<f64>>>>()?;
        Ok(Self {
            noise_w: params.noise_power_w(),
            bandwidth_hz: params.bandwidth_hz,
            user_sats: snapshot.visible_users.clone(),
            user_rx,
            eve_sats: snapshot.visible_eves.clone(),
            eve_rx,
        })
    }

    pub fn user_count(&self) -> usize {
        self.user_sats.len()
    }

    pub fn eve_count(&self) -> usize {
        self.eve_sats.len()
    }

    fn split(sats: &[usize], rx: &[f64], n: usize) -> Option<(f64, Vec<f64>)> {
        let idx = sats.iter().position(|&s| s == n)?;
        let others = rx
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != idx)
            .map(|(_, &p)| p)
            .collect();
        Some((rx[idx], others))
    }

    pub fn user_sinr(&self, u: usize, n: usize, psi: f64) -> f64 {
        match Self::split(&self.user_sats[u], &self.user_rx[u], n) {
            Some((own, others)) => sinr_user(psi, own, &others, self.noise_w),
            None => 0.0,
        }
    }

    /// Legitimate rate of user `u` served by `n`; zero when `n` is not visible.
    pub fn user_rate(&self, u: usize, n: usize, psi: f64) -> f64 {
        rate(self.bandwidth_hz, self.user_sinr(u, n, psi))
    }

    /// Legitimate rate over a sub-band of `bandwidth_hz` with noise `noise_w`.
    pub fn user_rate_in_band(
        &self,
        u: usize,
        n: usize,
        psi: f64,
        bandwidth_hz: f64,
        noise_w: f64,
    ) -> f64 {
        match Self::split(&self.user_sats[u], &self.user_rx[u], n) {
            Some((own, others)) => rate(bandwidth_hz, sinr_user(psi, own, &others, noise_w)),
            None => 0.0,
        }
    }

    /// Rate at which eavesdropper `e` decodes satellite `n`; zero outside `n`'s beam.
    pub fn eve_rate(&self, e: usize, n: usize, psi: f64) -> f64 {
        match Self::split(&self.eve_sats[e], &self.eve_rx[e], n) {
            Some((own, others)) => {
                rate(self.bandwidth_hz, sinr_eve(psi, own, &others, self.noise_w))
            }
            None => 0.0,
        }
    }

    pub fn secrecy(&self, u: usize, n: usize, psi: f64) -> f64 {
        let eves: Vec<f64> = (0..self.eve_count())
            .map(|e| self.eve_rate(e, n, psi))
            .collect();
        secrecy_rate(self.user_rate(u, n, psi), &eves)
    }
}

//! Constellation geometry: circular orbits, conical beam coverage, ground
//! node placement and the per-slot topology snapshot.

pub mod routing;

use std::f64::consts::PI;

use chrono::{DateTime, Utc};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::rng::{self, Stream};
use crate::{Error, Result};

pub use routing::{isl_routes, Routes};

/// Standard gravitational parameter of Earth, km³/s².
pub const MU_EARTH_KM3_S2: f64 = 3.986_004_418e5;
/// Sidereal rotation rate of Earth, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.292_115_9e-5;

pub type Vec3 = [f64; 3];

pub(crate) fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn distance_km(a: &Vec3, b: &Vec3) -> f64 {
    norm(&[a[0] - b[0], a[1] - b[1], a[2] - b[2]])
}

/// How orbital planes and in-plane slots are spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Layout {
    /// Planes spread evenly over 360° of right ascension, satellites evenly
    /// phased over 360° of argument of latitude.
    Global {
        #[serde(default)]
        raan_offset_deg: f64,
        /// Extra in-plane phase added per plane index.
        #[serde(default)]
        phasing_deg: f64,
    },
    /// Adjacent planes and closely spaced satellites forming a cluster whose
    /// centre passes over the anchor point (ascending) at the epoch.
    Regional {
        plane_spacing_deg: f64,
        slot_spacing_deg: f64,
        anchor_lat_deg: f64,
        anchor_lon_deg: f64,
    },
}

impl Default for Layout {
    fn default() -> Self {
        Layout::Regional {
            plane_spacing_deg: 4.5,
            slot_spacing_deg: 4.5,
            anchor_lat_deg: 30.15,
            anchor_lon_deg: 111.8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConstellationConfig {
    pub planes: usize,
    pub sats_per_plane: usize,
    pub altitude_km: f64,
    pub inclination_deg: f64,
    pub epoch: DateTime<Utc>,
    pub earth_radius_km: f64,
    pub slot_seconds: f64,
    /// Full beamwidth; the coverage bound uses half of it.
    pub beamwidth_deg: f64,
    pub layout: Layout,
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        Self {
            planes: 5,
            sats_per_plane: 4,
            altitude_km: 750.0,
            inclination_deg: 58.5,
            epoch: "2025-07-01T04:00:00Z".parse().expect("valid epoch literal"),
            earth_radius_km: 6371.0,
            slot_seconds: 5.0,
            beamwidth_deg: 40.0,
            layout: Layout::default(),
        }
    }
}

impl ConstellationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.planes == 0 || self.sats_per_plane == 0 {
            return Err(Error::config("constellation needs at least one satellite"));
        }
        if !(self.altitude_km > 0.0) || !(self.earth_radius_km > 0.0) {
            return Err(Error::config("altitude and earth radius must be positive"));
        }
        if !(0.0..=180.0).contains(&self.inclination_deg) {
            return Err(Error::config("inclination must lie in [0, 180] degrees"));
        }
        if !(self.slot_seconds > 0.0) {
            return Err(Error::config("slot length must be positive"));
        }
        if !(self.beamwidth_deg > 0.0 && self.beamwidth_deg < 180.0) {
            return Err(Error::config("beamwidth must lie in (0, 180) degrees"));
        }
        if let Layout::Regional { anchor_lat_deg, .. } = self.layout {
            let reach = self.inclination_deg.min(180.0 - self.inclination_deg);
            if anchor_lat_deg.abs() > reach {
                return Err(Error::config(format!(
                    "anchor latitude {anchor_lat_deg}° is never overflown at inclination {}°",
                    self.inclination_deg
                )));
            }
        }
        Ok(())
    }

    pub fn sat_count(&self) -> usize {
        self.planes * self.sats_per_plane
    }

    pub fn orbit_radius_km(&self) -> f64 {
        self.earth_radius_km + self.altitude_km
    }

    pub fn orbital_period_s(&self) -> f64 {
        2.0 * PI * (self.orbit_radius_km().powi(3) / MU_EARTH_KM3_S2).sqrt()
    }

    /// Half-beamwidth in radians.
    pub fn theta_beam(&self) -> f64 {
        (self.beamwidth_deg / 2.0).to_radians()
    }

    pub fn theta_max(&self) -> f64 {
        coverage_limit(
            self.theta_beam(),
            self.earth_radius_km,
            self.orbit_radius_km(),
        )
        .expect("validated constellation")
    }

    pub fn slot_time_s(&self, slot: usize) -> f64 {
        slot as f64 * self.slot_seconds
    }

    /// Right ascension of the ascending node and initial argument of latitude
    /// (both radians) of satellite `(plane, slot)`.
    fn orbit_elements(&self, plane: usize, slot: usize) -> (f64, f64) {
        match self.layout {
            Layout::Global {
                raan_offset_deg,
                phasing_deg,
            } => {
                let raan =
                    raan_offset_deg.to_radians() + 2.0 * PI * plane as f64 / self.planes as f64;
                let u = 2.0 * PI * slot as f64 / self.sats_per_plane as f64
                    + phasing_deg.to_radians() * plane as f64;
                (raan, u)
            }
            Layout::Regional {
                plane_spacing_deg,
                slot_spacing_deg,
                anchor_lat_deg,
                anchor_lon_deg,
            } => {
                let inc = self.inclination_deg.to_radians();
                let lat = anchor_lat_deg.to_radians();
                let u_c = (lat.sin() / inc.sin()).clamp(-1.0, 1.0).asin();
                let raan_c = anchor_lon_deg.to_radians() - (inc.cos() * u_c.sin()).atan2(u_c.cos());
                let dp = plane as f64 - (self.planes as f64 - 1.0) / 2.0;
                let ds = slot as f64 - (self.sats_per_plane as f64 - 1.0) / 2.0;
                (
                    raan_c + dp * plane_spacing_deg.to_radians(),
                    u_c + ds * slot_spacing_deg.to_radians(),
                )
            }
        }
    }

    /// Inertial position of satellite `(plane, slot)` at `t` seconds past the epoch.
    pub fn position_at(&self, plane: usize, slot: usize, t: f64) -> Vec3 {
        let (raan, u0) = self.orbit_elements(plane, slot);
        let r = self.orbit_radius_km();
        let inc = self.inclination_deg.to_radians();
        let u = u0 + 2.0 * PI * t / self.orbital_period_s();
        let (su, cu) = u.sin_cos();
        let (so, co) = raan.sin_cos();
        let (si, ci) = inc.sin_cos();
        [
            r * (co * cu - so * su * ci),
            r * (so * cu + co * su * ci),
            r * su * si,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SatelliteState {
    pub id: usize,
    pub plane: usize,
    pub slot_in_plane: usize,
    pub position: Vec3,
    pub orbit_radius_km: f64,
}

/// Satellite states at a given slot.
pub fn propagate(cfg: &ConstellationConfig, slot: usize) -> Vec<SatelliteState> {
    propagate_at(cfg, cfg.slot_time_s(slot))
}

/// Satellite states at an arbitrary time (fractional slots allowed).
pub fn propagate_at(cfg: &ConstellationConfig, t: f64) -> Vec<SatelliteState> {
    let mut out = Vec::with_capacity(cfg.sat_count());
    for plane in 0..cfg.planes {
        for s in 0..cfg.sats_per_plane {
            out.push(SatelliteState {
                id: plane * cfg.sats_per_plane + s,
                plane,
                slot_in_plane: s,
                position: cfg.position_at(plane, s, t),
                orbit_radius_km: cfg.orbit_radius_km(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    User,
    Eavesdropper,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroundNode {
    pub id: usize,
    pub role: Role,
    pub lat_deg: f64,
    pub lon_deg: f64,
    /// Earth-fixed position; coincides with the inertial frame at the epoch.
    pub position: Vec3,
}

impl GroundNode {
    pub fn new(id: usize, role: Role, lat_deg: f64, lon_deg: f64, earth_radius_km: f64) -> Self {
        let (lat, lon) = (lat_deg.to_radians(), lon_deg.to_radians());
        let position = [
            earth_radius_km * lat.cos() * lon.cos(),
            earth_radius_km * lat.cos() * lon.sin(),
            earth_radius_km * lat.sin(),
        ];
        Self {
            id,
            role,
            lat_deg,
            lon_deg,
            position,
        }
    }

    /// Inertial position after Earth has rotated for `t` seconds.
    pub fn position_at(&self, t: f64) -> Vec3 {
        let (s, c) = (EARTH_ROTATION_RAD_S * t).sin_cos();
        let [x, y, z] = self.position;
        [c * x - s * y, s * x + c * y, z]
    }
}

/// Earth-centre angle between a satellite and a ground point, in `[0, π]`.
pub fn central_angle(sat: &Vec3, node: &Vec3) -> f64 {
    let cos = dot(sat, node) / (norm(sat) * norm(node));
    cos.clamp(-1.0, 1.0).acos()
}

/// Largest central angle at which a ground point still sits inside a
/// satellite beam of half-width `theta_beam`.
pub fn coverage_limit(theta_beam: f64, r0: f64, rn: f64) -> Result<f64> {
    if !(r0 > 0.0) || !(rn > 0.0) {
        return Err(Error::invalid("radii must be positive"));
    }
    if rn <= r0 {
        return Err(Error::invalid("orbit radius must exceed the earth radius"));
    }
    if !(theta_beam > 0.0 && theta_beam < PI / 2.0) {
        return Err(Error::invalid("half beamwidth must lie in (0, π/2)"));
    }
    // Beam edge grazes the horizon once theta_beam reaches asin(r0/rn).
    if theta_beam < (r0 / rn).asin() {
        Ok(((rn / r0) * theta_beam.sin()).asin() - theta_beam)
    } else {
        Ok((r0 / rn).acos())
    }
}

/// Ids (ascending) of satellites whose central angle to `node` is within `theta_max`.
pub fn visible_set(node: &Vec3, sats: &[SatelliteState], theta_max: f64) -> Vec<usize> {
    sats.iter()
        .filter(|s| central_angle(&s.position, node) <= theta_max)
        .map(|s| s.id)
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlacementMode {
    /// Uniform over the lat/lon box.
    Box,
    /// Uniform over the part of the box inside at least one beam at the first slot.
    Covered,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlacementConfig {
    pub lat_min_deg: f64,
    pub lat_max_deg: f64,
    pub lon_min_deg: f64,
    pub lon_max_deg: f64,
    pub mode: PlacementMode,
    pub max_attempts: usize,
}

impl Default for PlacementConfig {
    fn default() -> Self {
        Self {
            lat_min_deg: 23.7,
            lat_max_deg: 36.6,
            lon_min_deg: 94.5,
            lon_max_deg: 129.1,
            mode: PlacementMode::Covered,
            max_attempts: 100_000,
        }
    }
}

impl PlacementConfig {
    pub fn validate(&self) -> Result<()> {
        let lat_ok = -90.0 <= self.lat_min_deg
            && self.lat_min_deg <= self.lat_max_deg
            && self.lat_max_deg <= 90.0;
        let lon_ok = -180.0 <= self.lon_min_deg
            && self.lon_min_deg <= self.lon_max_deg
            && self.lon_max_deg <= 180.0;
        if !lat_ok || !lon_ok {
            return Err(Error::config(
                "placement box must satisfy lat ⊂ [-90, 90], lon ⊂ [-180, 180]",
            ));
        }
        if self.max_attempts == 0 {
            return Err(Error::config("placement needs at least one attempt"));
        }
        Ok(())
    }
}

/// Place `count` ground nodes of one role. Node `i` draws from its own
/// stream, so the first `k` nodes are identical for any `count >= k`.
pub fn place_ground_nodes(
    placement: &PlacementConfig,
    constellation: &ConstellationConfig,
    role: Role,
    count: usize,
    seed: u64,
) -> Result<Vec<GroundNode>> {
    let tag = match role {
        Role::User => Stream::UserPlacement,
        Role::Eavesdropper => Stream::EvePlacement,
    };
    let sats = propagate(constellation, 0);
    let theta_max = constellation.theta_max();
    let r0 = constellation.earth_radius_km;
    (0..count)
        .map(|id| {
            let mut rng = rng::stream(seed, tag, id as u64, 0, 0);
            for _ in 0..placement.max_attempts {
                let lat = rng.random_range(placement.lat_min_deg..=placement.lat_max_deg);
                let lon = rng.random_range(placement.lon_min_deg..=placement.lon_max_deg);
                let node = GroundNode::new(id, role, lat, lon, r0);
                let accept = match placement.mode {
                    PlacementMode::Box => true,
                    PlacementMode::Covered => !visible_set(&node.position, &sats, theta_max).is_empty(),
                };
                if accept {
                    return Ok(node);
                }
            }
            Err(Error::Infeasible(format!(
                "no point of the placement box is covered at the first slot ({} attempts for {role:?} {id})",
                placement.max_attempts
            )))
        })
        .collect()
}

/// Grid ISL neighbours: ring within each plane and ring across planes.
/// Duplicate pairs (rings of length ≤ 2) are collapsed.
pub fn grid_neighbors(cfg: &ConstellationConfig) -> Vec<(usize, usize)> {
    let (p, s) = (cfg.planes, cfg.sats_per_plane);
    let id = |plane: usize, slot: usize| plane * s + slot;
    let mut pairs = Vec::new();
    for plane in 0..p {
        for slot in 0..s {
            let me = id(plane, slot);
            for other in [id(plane, (slot + 1) % s), id((plane + 1) % p, slot)] {
                if other != me {
                    pairs.push((me.min(other), me.max(other)));
                }
            }
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IslEdge {
    pub a: usize,
    pub b: usize,
    pub distance_km: f64,
    pub rate_bps: f64,
}

/// Read-only view of one slot: positions, visibility, ISL graph and routes.
#[derive(Debug, Clone, Serialize)]
pub struct TopologySnapshot {
    pub slot: usize,
    pub time_s: f64,
    pub theta_max: f64,
    pub sats: Vec<SatelliteState>,
    pub user_positions: Vec<Vec3>,
    pub eve_positions: Vec<Vec3>,
    pub visible_users: Vec<Vec<usize>>,
    pub visible_eves: Vec<Vec<usize>>,
    pub user_angles: Vec<Vec<f64>>,
    pub isl_edges: Vec<IslEdge>,
    #[serde(skip)]
    pub routes: Routes,
}

impl TopologySnapshot {
    /// Build the snapshot for `slot`. `isl_rate` maps an ISL length (km) to
    /// its rate in bit/s; links longer than `isl_max_range_km` are dropped.
    pub fn build(
        cfg: &ConstellationConfig,
        slot: usize,
        users: &[GroundNode],
        eves: &[GroundNode],
        isl_max_range_km: f64,
        isl_rate: impl Fn(f64) -> f64,
    ) -> Self {
        let t = cfg.slot_time_s(slot);
        let sats = propagate(cfg, slot);
        let theta_max = cfg.theta_max();
        let user_positions: Vec<Vec3> = users.iter().map(|g| g.position_at(t)).collect();
        let eve_positions: Vec<Vec3> = eves.iter().map(|g| g.position_at(t)).collect();
        let visible_users: Vec<Vec<usize>> = user_positions
            .iter()
            .map(|p| visible_set(p, &sats, theta_max))
            .collect();
        let visible_eves = eve_positions
            .iter()
            .map(|p| visible_set(p, &sats, theta_max))
            .collect();
        let user_angles = user_positions
            .iter()
            .zip(&visible_users)
            .map(|(p, vis)| {
                vis.iter()
                    .map(|&n| central_angle(&sats[n].position, p))
                    .collect()
            })
            .collect();
        let isl_edges: Vec<IslEdge> = grid_neighbors(cfg)
            .into_iter()
            .filter_map(|(a, b)| {
                let d = distance_km(&sats[a].position, &sats[b].position);
                (d <= isl_max_range_km).then(|| IslEdge {
                    a,
                    b,
                    distance_km: d,
                    rate_bps: isl_rate(d),
                })
            })
            .collect();
        let weighted: Vec<(usize, usize, f64)> =
            isl_edges.iter().map(|e| (e.a, e.b, e.rate_bps)).collect();
        let routes = isl_routes(sats.len(), &weighted);
        Self {
            slot,
            time_s: t,
            theta_max,
            sats,
            user_positions,
            eve_positions,
            visible_users,
            visible_eves,
            user_angles,
            isl_edges,
            routes,
        }
    }

    pub fn sat_count(&self) -> usize {
        self.sats.len()
    }
}

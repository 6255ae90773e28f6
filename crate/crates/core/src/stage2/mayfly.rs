use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{clamp_into, clamp_velocity, distance, random_position, Instance, MetaheuristicConfig};

use crate::rng::SimRng;

#[derive(Debug, Clone, PartialEq)]
pub struct Male {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub cost: f64,
    pub best_position: Vec<f64>,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Female {
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    pub cost: f64,
}

/// Population state between iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct MayflyState {
    pub males: Vec<Male>,
    pub females: Vec<Female>,
    /// Best personal best among males.
    pub gbest_position: Vec<f64>,
    pub gbest_cost: f64,
    /// Best individual of either sex seen so far.
    pub elite_position: Vec<f64>,
    pub elite_cost: f64,
    pub nuptial_k: f64,
    pub fl: f64,
    pub upper: Vec<f64>,
    pub vmax: Vec<f64>,
}

impl MayflyState {
    /// Random population, evaluated once (`population` evaluations).
    pub fn init(instance: &Instance, cfg: &MetaheuristicConfig, rng: &mut SimRng) -> Self {
        let upper = instance.upper_bounds();
        let vmax: Vec<f64> = upper.iter().map(|u| cfg.velocity_clamp * u).collect();
        let half = cfg.population / 2;
        let random_velocity = |rng: &mut SimRng| -> Vec<f64> {
            vmax.iter()
                .map(|&m| {
                    if m > 0.0 {
                        rng.random_range(-m..=m)
                    } else {
                        0.0
                    }
                })
                .collect()
        };
        let mut males = Vec::with_capacity(half);
        for _ in 0..half {
            let position = random_position(&upper, rng);
            let velocity = random_velocity(rng);
            let cost = instance.fitness_of_position(&position);
            males.push(Male {
                best_position: position.clone(),
                best_cost: cost,
                position,
                velocity,
                cost,
            });
        }
        let mut females = Vec::with_capacity(half);
        for _ in 0..half {
            let position = random_position(&upper, rng);
            let velocity = random_velocity(rng);
            let cost = instance.fitness_of_position(&position);
            females.push(Female {
                position,
                velocity,
                cost,
            });
        }
        let mut state = Self {
            gbest_position: males[0].position.clone(),
            gbest_cost: f64::INFINITY,
            elite_position: males[0].position.clone(),
            elite_cost: f64::INFINITY,
            males,
            females,
            nuptial_k: cfg.nuptial_k,
            fl: cfg.fl,
            upper,
            vmax,
        };
        state.refresh_bests();
        state
    }

    fn refresh_bests(&mut self) {
        for m in &self.males {
            if m.best_cost < self.gbest_cost {
                self.gbest_cost = m.best_cost;
                self.gbest_position.clone_from(&m.best_position);
            }
            if m.cost < self.elite_cost {
                self.elite_cost = m.cost;
                self.elite_position.clone_from(&m.position);
            }
        }
        for f in &self.females {
            if f.cost < self.elite_cost {
                self.elite_cost = f.cost;
                self.elite_position.clone_from(&f.position);
            }
        }
    }

    /// Indices sorted by current cost, ties by index.
    fn male_ranking(&self) -> Vec<usize> {
        rank(self.males.iter().map(|m| m.cost))
    }

    fn female_ranking(&self) -> Vec<usize> {
        rank(self.females.iter().map(|f| f.cost))
    }
}

fn rank(costs: impl Iterator<Item = f64>) -> Vec<usize> {
    let costs: Vec<f64> = costs.collect();
    let mut idx: Vec<usize> = (0..costs.len()).collect();
    idx.sort_by(|&a, &b| costs[a].total_cmp(&costs[b]).then(a.cmp(&b)));
    idx
}

/// Arithmetic crossover of a male `x` and female `y` with weight `l`.
pub fn mate(x: &[f64], y: &[f64], l: f64) -> (Vec<f64>, Vec<f64>) {
    let o1 = x
        .iter()
        .zip(y)
        .map(|(a, b)| l * a + (1.0 - l) * b)
        .collect();
    let o2 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (1.0 - l) * a + l * b)
        .collect();
    (o1, o2)
}

fn mutate(x: &mut [f64], upper: &[f64], cfg: &MetaheuristicConfig, rng: &mut SimRng) {
    if cfg.offspring_mutation <= 0.0 {
        return;
    }
    for (xi, &u) in x.iter_mut().zip(upper) {
        if rng.random::<f64>() < cfg.offspring_mutation {
            let z: f64 = StandardNormal.sample(rng);
            *xi += cfg.offspring_sigma * u * z;
        }
    }
    clamp_into(x, upper);
}

fn attraction(coeff: f64, beta: f64, r: f64) -> f64 {
    coeff * (-beta * r * r).exp()
}

/// Cartesian distance, optionally per unit range and dimension.
fn gap(cfg: &MetaheuristicConfig, upper: &[f64], a: &[f64], b: &[f64]) -> f64 {
    if !cfg.normalize_distance {
        return distance(a, b);
    }
    let (sum, n) = a
        .iter()
        .zip(b)
        .zip(upper)
        .filter(|(_, &u)| u > 0.0)
        .fold((0.0, 0usize), |(s, n), ((x, y), u)| {
            (s + ((x - y) / u).powi(2), n + 1)
        });
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// One iteration: mating, movement, then evaluation of the whole population
/// (`population` evaluations).
pub fn ma_step(
    state: &mut MayflyState,
    instance: &Instance,
    cfg: &MetaheuristicConfig,
    rng: &mut SimRng,
) {
    let half = state.males.len();
    let male_rank = state.male_ranking();
    let female_rank = state.female_ranking();
    let dim = state.upper.len();

    // Pairing by rank, captured before anything moves.
    let mate_of_female: Vec<(Vec<f64>, f64)> = {
        let mut v = vec![(Vec::new(), 0.0); half];
        for (r, &fi) in female_rank.iter().enumerate() {
            let m = &state.males[male_rank[r]];
            v[fi] = (m.position.clone(), m.cost);
        }
        v
    };

    let pairs = cfg.mating_pairs.min(half);
    let mut offspring = Vec::with_capacity(pairs);
    for r in 0..pairs {
        let x = &state.males[male_rank[r]].position;
        let y = &state.females[female_rank[r]].position;
        let (mut o1, mut o2) = mate(x, y, rng.random());
        mutate(&mut o1, &state.upper, cfg, rng);
        mutate(&mut o2, &state.upper, cfg, rng);
        offspring.push((o1, o2));
    }
    let mut fresh_male = vec![false; half];
    let mut fresh_female = vec![false; half];
    for (r, (o1, o2)) in offspring.into_iter().enumerate() {
        let mi = male_rank[half - 1 - r];
        let fi = female_rank[half - 1 - r];
        let m = &mut state.males[mi];
        m.position = o1;
        m.velocity = vec![0.0; dim];
        m.best_cost = f64::INFINITY;
        fresh_male[mi] = true;
        let f = &mut state.females[fi];
        f.position = o2;
        f.velocity = vec![0.0; dim];
        fresh_female[fi] = true;
    }

    let dancer = male_rank[0];
    let g = cfg.gravity;
    for (i, m) in state.males.iter_mut().enumerate() {
        if fresh_male[i] {
            continue;
        }
        if i == dancer {
            for v in m.velocity.iter_mut() {
                *v = g * *v + state.nuptial_k * rng.random_range(-1.0..=1.0);
            }
        } else {
            let ap = attraction(
                cfg.a1,
                cfg.beta,
                gap(cfg, &state.upper, &m.position, &m.best_position),
            );
            let ag = attraction(
                cfg.a2,
                cfg.beta,
                gap(cfg, &state.upper, &m.position, &state.gbest_position),
            );
            for d in 0..dim {
                let x = m.position[d];
                m.velocity[d] = g * m.velocity[d]
                    + ap * (m.best_position[d] - x)
                    + ag * (state.gbest_position[d] - x);
            }
        }
        clamp_velocity(&mut m.velocity, &state.vmax);
        for (x, v) in m.position.iter_mut().zip(&m.velocity) {
            *x += v;
        }
        clamp_into(&mut m.position, &state.upper);
    }

    for (i, f) in state.females.iter_mut().enumerate() {
        if fresh_female[i] {
            continue;
        }
        let (mate_pos, mate_cost) = &mate_of_female[i];
        let attracted = if cfg.female_attract_when_worse {
            f.cost > *mate_cost
        } else {
            f.cost < *mate_cost
        };
        if attracted {
            let a = attraction(
                cfg.a2,
                cfg.beta,
                gap(cfg, &state.upper, &f.position, mate_pos),
            );
            for d in 0..dim {
                f.velocity[d] = g * f.velocity[d] + a * (mate_pos[d] - f.position[d]);
            }
        } else {
            for v in f.velocity.iter_mut() {
                *v = g * *v + state.fl * rng.random_range(-1.0..=1.0);
            }
        }
        clamp_velocity(&mut f.velocity, &state.vmax);
        for (x, v) in f.position.iter_mut().zip(&f.velocity) {
            *x += v;
        }
        clamp_into(&mut f.position, &state.upper);
    }

    for m in state.males.iter_mut() {
        m.cost = instance.fitness_of_position(&m.position);
        if m.cost < m.best_cost {
            m.best_cost = m.cost;
            m.best_position.clone_from(&m.position);
        }
    }
    for f in state.females.iter_mut() {
        f.cost = instance.fitness_of_position(&f.position);
    }
    state.refresh_bests();
    state.nuptial_k *= cfg.nuptial_decay;
    state.fl *= cfg.fl_decay;
}

pub(super) fn run(
    instance: &Instance,
    cfg: &MetaheuristicConfig,
    rng: &mut SimRng,
) -> (Vec<f64>, Vec<f64>) {
    let mut state = MayflyState::init(instance, cfg, rng);
    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        ma_step(&mut state, instance, cfg, rng);
        trace.push(state.elite_cost);
    }
    (state.elite_position, trace)
}

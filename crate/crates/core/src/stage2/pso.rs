use rand::Rng;

use super::{clamp_into, clamp_velocity, random_position, Instance, MetaheuristicConfig};
use crate::rng::SimRng;

struct Particle {
    position: Vec<f64>,
    velocity: Vec<f64>,
    best_position: Vec<f64>,
    best_cost: f64,
}

/// Global-best PSO over the same decode box as the mayfly search.
pub(super) fn run(
    instance: &Instance,
    cfg: &MetaheuristicConfig,
    rng: &mut SimRng,
) -> (Vec<f64>, Vec<f64>) {
    let upper = instance.upper_bounds();
    let vmax: Vec<f64> = upper.iter().map(|u| cfg.velocity_clamp * u).collect();
    let mut swarm: Vec<Particle> = (0..cfg.population)
        .map(|_| {
            let position = random_position(&upper, rng);
            let velocity = vmax
                .iter()
                .map(|&m| {
                    if m > 0.0 {
                        rng.random_range(-m..=m)
                    } else {
                        0.0
                    }
                })
                .collect();
            let cost = instance.fitness_of_position(&position);
            Particle {
                best_position: position.clone(),
                best_cost: cost,
                position,
                velocity,
            }
        })
        .collect();
    let (mut gbest, mut gbest_cost) = best_of(&swarm);
    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        for p in swarm.iter_mut() {
            for d in 0..upper.len() {
                let (r1, r2): (f64, f64) = (rng.random(), rng.random());
                p.velocity[d] = cfg.pso_inertia * p.velocity[d]
                    + cfg.pso_c1 * r1 * (p.best_position[d] - p.position[d])
                    + cfg.pso_c2 * r2 * (gbest[d] - p.position[d]);
            }
            clamp_velocity(&mut p.velocity, &vmax);
            for (x, v) in p.position.iter_mut().zip(&p.velocity) {
                *x += v;
            }
            clamp_into(&mut p.position, &upper);
        }
        for p in swarm.iter_mut() {
            let cost = instance.fitness_of_position(&p.position);
            if cost < p.best_cost {
                p.best_cost = cost;
                p.best_position.clone_from(&p.position);
            }
        }
        let (pos, cost) = best_of(&swarm);
        if cost < gbest_cost {
            gbest = pos;
            gbest_cost = cost;
        }
        trace.push(gbest_cost);
    }
    (gbest, trace)
}

fn best_of(swarm: &[Particle]) -> (Vec<f64>, f64) {
    let best = swarm
        .iter()
        .min_by(|a, b| a.best_cost.total_cmp(&b.best_cost))
        .expect("non-empty swarm");
    (best.best_position.clone(), best.best_cost)
}

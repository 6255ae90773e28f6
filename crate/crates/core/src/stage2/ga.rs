use rand::Rng;

use super::{Instance, MetaheuristicConfig};
use crate::rng::SimRng;

type Genome = Vec<Option<usize>>;

/// Integer GA: tournament selection, one-point crossover, per-gene resampling
/// mutation at rate 1/dim, single elitism.
pub(super) fn run(
    instance: &Instance,
    cfg: &MetaheuristicConfig,
    rng: &mut SimRng,
) -> (Genome, Vec<f64>) {
    let counts = instance.candidate_counts();
    let dim = counts.len();
    let sample = |rng: &mut SimRng, k: usize| (k > 0).then(|| rng.random_range(0..k));
    let mut pop: Vec<(Genome, f64)> = (0..cfg.population)
        .map(|_| {
            let g: Genome = counts.iter().map(|&k| sample(rng, k)).collect();
            let c = instance.fitness(&g);
            (g, c)
        })
        .collect();
    let mut elite = best(&pop).clone();
    let mutation = 1.0 / dim as f64;
    let mut trace = Vec::with_capacity(cfg.iterations);
    for _ in 0..cfg.iterations {
        let mut children: Vec<Genome> = Vec::with_capacity(cfg.population);
        while children.len() < cfg.population {
            let a = tournament(&pop, cfg.ga_tournament, rng);
            let b = tournament(&pop, cfg.ga_tournament, rng);
            let (mut c1, mut c2) = (pop[a].0.clone(), pop[b].0.clone());
            if dim > 1 && rng.random::<f64>() < cfg.ga_crossover_rate {
                let cut = rng.random_range(1..dim);
                c1[cut..].swap_with_slice(&mut c2[cut..]);
            }
            for c in [&mut c1, &mut c2] {
                for (gene, &k) in c.iter_mut().zip(&counts) {
                    if rng.random::<f64>() < mutation {
                        *gene = sample(rng, k);
                    }
                }
            }
            children.push(c1);
            if children.len() < cfg.population {
                children.push(c2);
            }
        }
        let mut next: Vec<(Genome, f64)> = children
            .into_iter()
            .map(|g| {
                let c = instance.fitness(&g);
                (g, c)
            })
            .collect();
        if best(&next).1 > elite.1 {
            let worst = next
                .iter()
                .enumerate()
                .max_by(|x, y| x.1 .1.total_cmp(&y.1 .1))
                .map(|(i, _)| i)
                .expect("non-empty population");
            next[worst] = elite.clone();
        }
        pop = next;
        if best(&pop).1 < elite.1 {
            elite = best(&pop).clone();
        }
        trace.push(elite.1);
    }
    (elite.0, trace)
}

fn best(pop: &[(Genome, f64)]) -> &(Genome, f64) {
    pop.iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .expect("non-empty population")
}

fn tournament(pop: &[(Genome, f64)], k: usize, rng: &mut SimRng) -> usize {
    let mut winner = rng.random_range(0..pop.len());
    for _ in 1..k {
        let c = rng.random_range(0..pop.len());
        if pop[c].1 < pop[winner].1 {
            winner = c;
        }
    }
    winner
}

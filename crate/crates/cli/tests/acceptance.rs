use std::path::Path;
use std::process::Command;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::Rng;
use rayon::prelude::*;
use stecn::channel::{path_loss, rate, secrecy_rate, sinr_eve, sinr_user, LinkTable};
use stecn::geo::isl_routes;
use stecn::harness::{
    run_experiment, run_scenario, Experiment, MetricStats, Scenario, ScenarioConfig, Scheme,
};
use stecn::perf::{computation_delay, energy, transmission_delay, CostWeights, TaskCostBreakdown};
use stecn::rng::{self, Stream};
use stecn::stage1::{self, SecrecySource, Stage1Config};
use stecn::stage2::{self, Instance, MetaheuristicConfig, Optimizer, Stage2Task};
use stecn::tasks::{QueueState, TaskRequest};

const C1_INSTANCES: usize = 100;
const C1_MA_RATIO: f64 = 1.05;
const C1_BASELINE_RATIO: f64 = 1.10;
const C1_REQUIRED: usize = 95;
const C1_BUDGET: Duration = Duration::from_secs(120);
const C2_INSTANCES: usize = 50;
const C3_CASES_PER_PROPERTY: u32 = 2000;
const C3_REQUIRED: usize = 10_000;
const C4_SEEDS: u64 = 20;
const C4_PLATEAU: f64 = 0.01;
const C4_BUDGET: Duration = Duration::from_secs(600);
const SWEEP_SEEDS: u64 = 20;
const C9_R2: f64 = 0.99;
const REL_EPS: f64 = 1e-12;

struct Verdict {
    id: usize,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn pooled(a: MetricStats, b: MetricStats) -> f64 {
    ((a.std * a.std + b.std * b.std) / 2.0).sqrt()
}

fn sim_rng(tag: Stream, a: u64) -> stecn::rng::SimRng {
    rng::stream(0xACCE97, tag, a, 0, 0)
}

/// Random ring of four satellites with `k` tasks on it.
fn synthetic_instance(seed: u64) -> Instance {
    let mut r = sim_rng(Stream::Tasks, seed);
    let sats = 4;
    let edges: Vec<_> = (0..sats)
        .map(|i| (i, (i + 1) % sats, r.random_range(5e6..5e7)))
        .collect();
    let routes = isl_routes(sats, &edges);
    let k = r.random_range(1..=5);
    let tasks = (0..k)
        .map(|u| {
            let t = TaskRequest {
                user: u,
                slot: 0,
                size_bits: r.random_range(8e6..8e7),
                cycles_per_bit: r.random_range(300.0..500.0),
            };
            Stage2Task::new(
                t,
                r.random_range(0..sats),
                r.random_range(1e6..1e7),
                &routes,
            )
        })
        .collect();
    let cpu = (0..sats).map(|_| r.random_range(1e9..3e9)).collect();
    Instance::new(tasks, cpu, 5.0, CostWeights::default(), None).unwrap()
}

fn exhaustive(inst: &Instance) -> f64 {
    let counts = inst.candidate_counts();
    let total: usize = counts.iter().product();
    (0..total)
        .map(|mut code| {
            let idx: Vec<Option<usize>> = counts
                .iter()
                .map(|&c| {
                    let i = code % c;
                    code /= c;
                    Some(i)
                })
                .collect();
            inst.fitness(&idx)
        })
        .fold(f64::INFINITY, f64::min)
}

fn stage2_vs_exhaustive() -> Verdict {
    let start = Instant::now();
    let cfg = MetaheuristicConfig::default();
    let ratios: Vec<[f64; 3]> = (0..C1_INSTANCES as u64)
        .into_par_iter()
        .map(|i| {
            let inst = synthetic_instance(i);
            assert!(inst.candidate_counts().iter().all(|&c| c <= 4));
            let opt = exhaustive(&inst);
            let mut out = [0.0; 3];
            for (k, o) in [Optimizer::Ma, Optimizer::Pso, Optimizer::Ga]
                .into_iter()
                .enumerate()
            {
                let mut r = sim_rng(Stream::Scheduler, i * 3 + k as u64);
                let res = stage2::run(o, &inst, &cfg, &mut r).unwrap();
                out[k] = res.decision.fitness / opt;
            }
            out
        })
        .collect();
    let elapsed = start.elapsed();
    let within = |k: usize, tol: f64| ratios.iter().filter(|r| r[k] <= tol).count();
    let (ma, pso, ga) = (
        within(0, C1_MA_RATIO),
        within(1, C1_BASELINE_RATIO),
        within(2, C1_BASELINE_RATIO),
    );
    Verdict {
        id: 1,
        name: "stage-2 optimizers vs exhaustive search",
        pass: ma >= C1_REQUIRED && pso >= C1_REQUIRED && ga >= C1_REQUIRED && elapsed < C1_BUDGET,
        detail: format!(
            "MA<=1.05x {ma}/{C1_INSTANCES}, PSO<=1.10x {pso}, GA<=1.10x {ga}, need {C1_REQUIRED}; {:.1}s of {}s",
            elapsed.as_secs_f64(),
            C1_BUDGET.as_secs()
        ),
    }
}

/// Secrecy recomputed from the raw received powers.
fn raw_secrecy(l: &LinkTable, u: usize, n: usize, psi: f64) -> f64 {
    let split = |sats: &[usize], rx: &[f64]| {
        sats.iter().position(|&s| s == n).map(|i| {
            let others: Vec<f64> = rx
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, p)| *p)
                .collect();
            (rx[i], others)
        })
    };
    let Some((own, others)) = split(&l.user_sats[u], &l.user_rx[u]) else {
        return 0.0;
    };
    let ru = rate(l.bandwidth_hz, sinr_user(psi, own, &others, l.noise_w));
    let eves: Vec<f64> = (0..l.eve_sats.len())
        .map(|e| {
            split(&l.eve_sats[e], &l.eve_rx[e]).map_or(0.0, |(own, others)| {
                rate(l.bandwidth_hz, sinr_eve(psi, own, &others, l.noise_w))
            })
        })
        .collect();
    secrecy_rate(ru, &eves)
}

/// Every (ψ, Γ) pair; most secure users, then larger ψ, then higher total
/// secrecy, then lexicographically smallest satellite ids.
fn brute_force(l: &LinkTable, cfg: &Stage1Config) -> (f64, Vec<Option<usize>>) {
    let steps = (1.0 / cfg.delta).round() as usize;
    let users = l.user_sats.len();
    let mut best: Option<(usize, f64, f64, Vec<Option<usize>>)> = None;
    for k in 0..=steps {
        let psi = k as f64 / steps as f64;
        let choices: Vec<Vec<Option<usize>>> = (0..users)
            .map(|u| {
                if l.user_sats[u].is_empty() {
                    vec![None]
                } else {
                    l.user_sats[u].iter().map(|&n| Some(n)).collect()
                }
            })
            .collect();
        let total: usize = choices.iter().map(Vec::len).product();
        for mut code in 0..total {
            let gamma: Vec<Option<usize>> = choices
                .iter()
                .map(|c| {
                    let x = c[code % c.len()];
                    code /= c.len();
                    x
                })
                .collect();
            let rates: Vec<f64> = gamma
                .iter()
                .enumerate()
                .map(|(u, n)| n.map_or(0.0, |n| raw_secrecy(l, u, n, psi)))
                .collect();
            let secure = gamma
                .iter()
                .zip(&rates)
                .filter(|(n, s)| n.is_some() && **s >= cfg.epsilon_secrecy)
                .count();
            let sum: f64 = rates.iter().sum();
            let better = match &best {
                None => true,
                Some((bs, bp, bsum, bg)) => {
                    (secure, psi) > (*bs, *bp)
                        || (secure == *bs
                            && psi == *bp
                            && (sum > *bsum || (sum == *bsum && gamma < *bg)))
                }
            };
            if better {
                best = Some((secure, psi, sum, gamma));
            }
        }
    }
    let (_, psi, _, gamma) = best.unwrap();
    (psi, gamma)
}

fn stage1_vs_brute_force() -> Verdict {
    let mut checked = 0;
    let mut mismatches = 0;
    let mut attempt = 0u64;
    let mut secure_total = 0;
    while checked < C2_INSTANCES {
        attempt += 1;
        let mut r = sim_rng(Stream::Association, attempt);
        let mut cfg = ScenarioConfig {
            users: r.random_range(1..=6),
            eavesdroppers: r.random_range(0..=3),
            master_seed: attempt,
            ..ScenarioConfig::default()
        };
        cfg.constellation.planes = 2;
        cfg.constellation.sats_per_plane = 2;
        cfg.stage1.delta = 0.25;
        let Ok(scenario) = Scenario::new(&cfg) else {
            continue;
        };
        let snap = scenario.snapshot(&cfg, r.random_range(0..10));
        let links = LinkTable::sample(&cfg.channel, &cfg.fading, &snap, cfg.master_seed).unwrap();
        if links.user_count() == 0 {
            continue;
        }
        let got = stage1::search(&links, &cfg.stage1);
        let (psi, gamma) = brute_force(&links, &cfg.stage1);
        if got.psi_star != psi || got.assoc != gamma {
            mismatches += 1;
        }
        secure_total += got.secure_count;
        checked += 1;
        assert!(links.user_count() <= 6 && snap.sats.len() <= 4 && links.eve_count() <= 3);
        assert!((0..links.user_count()).all(|u| links.visible(u).len() <= 4));
    }
    Verdict {
        id: 2,
        name: "stage-1 search vs brute force",
        pass: mismatches == 0,
        detail: format!(
            "{mismatches} mismatches over {checked} instances ({secure_total} secure users in total)"
        ),
    }
}

fn rel_eq(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

fn physics_invariants() -> Verdict {
    let cases = AtomicUsize::new(0);
    let mut failures = Vec::new();
    let runner = || {
        TestRunner::new(Config {
            cases: C3_CASES_PER_PROPERTY,
            failure_persistence: None,
            ..Config::default()
        })
    };

    let r = runner().run(
        &(0.0f64..1e8, prop::collection::vec(0.0f64..1e8, 0..6)),
        |(ru, eves)| {
            cases.fetch_add(1, Ordering::Relaxed);
            let s = secrecy_rate(ru, &eves);
            let worst = eves.iter().copied().fold(0.0, f64::max);
            prop_assert_eq!(s, (ru - worst).max(0.0));
            Ok(())
        },
    );
    failures.extend(r.err().map(|e| format!("secrecy clamp: {e}")));

    let r = runner().run(&(1e9f64..5e10, 1e5f64..5e6, 1.1f64..8.0), |(f, d, k)| {
        cases.fetch_add(1, Ordering::Relaxed);
        let l = path_loss(f, d).unwrap();
        prop_assert!(rel_eq(path_loss(f, k * d).unwrap(), l / (k * k), REL_EPS));
        Ok(())
    });
    failures.extend(r.err().map(|e| format!("inverse square: {e}")));

    let r = runner().run(
        &(
            1e-18f64..1e-9,
            prop::collection::vec(1e-18f64..1e-9, 0..5),
            1e-16f64..1e-12,
            0.0f64..=1.0,
            0.0f64..=1.0,
        ),
        |(own, intf, noise, a, b)| {
            cases.fetch_add(1, Ordering::Relaxed);
            let (lo, hi) = (a.min(b), a.max(b));
            prop_assert!(sinr_user(lo, own, &intf, noise) <= sinr_user(hi, own, &intf, noise));
            prop_assert!(sinr_eve(lo, own, &intf, noise) <= sinr_eve(hi, own, &intf, noise));
            Ok(())
        },
    );
    failures.extend(r.err().map(|e| format!("SINR monotonicity: {e}")));

    let r = runner().run(
        &(
            0.0f64..2e8,
            300.0f64..500.0,
            1e4f64..1e8,
            0.0f64..1e-5,
            0.0f64..500.0,
            1e9f64..2e10,
        ),
        |(size, cpb, rd, path, queue, cpu)| {
            cases.fetch_add(1, Ordering::Relaxed);
            let w = CostWeights::default();
            let t = TaskRequest {
                user: 0,
                slot: 0,
                size_bits: size,
                cycles_per_bit: cpb,
            };
            let dt = transmission_delay(size, rd, Some(path)).unwrap();
            let dc = computation_delay(&t, cpu);
            let (et, ec) = energy(dt, dc, 5.0, w.energy_coeff, cpu);
            let b = TaskCostBreakdown::new(dt, dc, queue, et, ec, &w);
            prop_assert_eq!(b.total_delay, dt + dc + queue);
            prop_assert_eq!(b.total_energy, et + ec);
            prop_assert!(rel_eq(dt, size / rd + size * path, REL_EPS) || size == 0.0);
            Ok(())
        },
    );
    failures.extend(r.err().map(|e| format!("delay/energy decomposition: {e}")));

    let routes = isl_routes(4, &[(0, 1, 1e7), (1, 2, 2e7), (2, 3, 1e7), (3, 0, 5e6)]);
    let r = runner().run(
        &(
            prop::collection::vec((1.0f64..20.0, 0usize..4), 1..9),
            prop::collection::vec(0.0f64..10.0, 9),
        ),
        |(tasks, picks)| {
            cases.fetch_add(1, Ordering::Relaxed);
            let st: Vec<Stage2Task> = tasks
                .iter()
                .enumerate()
                .map(|(u, &(mb, a))| {
                    let t = TaskRequest {
                        user: u,
                        slot: 0,
                        size_bits: mb * 8e6,
                        cycles_per_bit: 400.0,
                    };
                    Stage2Task::new(t, a, 2e6, &routes)
                })
                .collect();
            let inst = Instance::new(st, vec![2e9; 4], 5.0, CostWeights::default(), None).unwrap();
            let d = inst.decision(stage2::decode(
                &picks[..tasks.len()],
                &inst.candidate_counts(),
            ));
            let placed: Vec<_> = inst
                .tasks()
                .iter()
                .zip(&d.executors)
                .map(|(t, e)| (t.task, e.unwrap()))
                .collect();
            let q = QueueState::build(4, &placed);
            prop_assert_eq!(q.len(), tasks.len());
            let bits_in: f64 = tasks.iter().map(|(mb, _)| mb * 8e6).sum();
            let bits_q: f64 = q.queues.iter().flatten().map(|e| e.task.size_bits).sum();
            prop_assert!(rel_eq(bits_in, bits_q, REL_EPS));
            Ok(())
        },
    );
    failures.extend(r.err().map(|e| format!("task conservation: {e}")));

    let n = cases.load(Ordering::Relaxed);
    Verdict {
        id: 3,
        name: "physics invariants",
        pass: failures.is_empty() && n >= C3_REQUIRED,
        detail: if failures.is_empty() {
            format!("{n} generated cases over 5 properties, need {C3_REQUIRED}")
        } else {
            failures.join("; ")
        },
    }
}

fn convergence() -> Verdict {
    let start = Instant::now();
    let base = ScenarioConfig::default();
    let iters = base.stage2.iterations;
    let schemes = [Scheme::Proposed, Scheme::Pso, Scheme::Ga];
    let runs: Vec<_> = (1..=C4_SEEDS)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let base = base.clone();
            schemes.map(move |scheme| {
                run_scenario(&ScenarioConfig {
                    scheme,
                    master_seed: seed,
                    ..base.clone()
                })
                .unwrap()
            })
        })
        .collect();
    let elapsed = start.elapsed();
    let mut mean = vec![vec![0.0; iters]; 3];
    let mut count = 0usize;
    let mut monotone = true;
    for run in &runs {
        let k = schemes.iter().position(|s| *s == run.scheme).unwrap();
        for slot in run.slots.iter().filter(|s| s.scheduled_tasks > 0) {
            if k == 0 {
                monotone &= slot.trace.windows(2).all(|w| w[1] <= w[0]);
                count += 1;
            }
            for (m, x) in mean[k].iter_mut().zip(&slot.trace) {
                *m += x;
            }
        }
    }
    for m in mean.iter_mut().flatten() {
        *m /= count as f64;
    }
    let fin = |k: usize| mean[k][iters - 1];
    let plateau = (mean[0][149] - fin(0)) / mean[0][149];
    let pass = monotone
        && fin(0) <= fin(1)
        && fin(0) <= fin(2)
        && plateau < C4_PLATEAU
        && elapsed < C4_BUDGET;
    Verdict {
        id: 4,
        name: "convergence",
        pass,
        detail: format!(
            "MA monotone {monotone}; final MA {:.4} PSO {:.4} GA {:.4}; MA gain 150->200 {:.4}% (<1%); {count} slots, {:.1}s of {}s",
            fin(0),
            fin(1),
            fin(2),
            100.0 * plateau,
            elapsed.as_secs_f64(),
            C4_BUDGET.as_secs()
        ),
    }
}

fn seeds() -> Vec<u64> {
    (1..=SWEEP_SEEDS).collect()
}

fn users_sweep() -> Experiment {
    let base = ScenarioConfig::default();
    run_experiment(
        &base,
        &["users=10:30:5".parse().unwrap()],
        &seeds(),
        &Scheme::ALL,
    )
    .unwrap()
}

fn rtp_ordering(exp: &Experiment) -> Verdict {
    let c = |s| exp.cell(30, 5, s).unwrap().rtp;
    let gap = |a: Scheme, b: Scheme| (c(a).mean - c(b).mean) / pooled(c(a), c(b));
    let pairs = [
        (Scheme::Proposed, Scheme::NoAn),
        (Scheme::NoAn, Scheme::Greedy),
        (Scheme::Proposed, Scheme::Random),
    ];
    let z: Vec<f64> = pairs.iter().map(|&(a, b)| gap(a, b)).collect();
    Verdict {
        id: 5,
        name: "RTP ordering at U=30, E=5",
        pass: z.iter().all(|&z| z > 1.0),
        detail: format!(
            "RTP proposed {:.4} no_an {:.4} greedy {:.4} random {:.4}; gaps in pooled std: {:.2}, {:.2}, {:.2} (need >1)",
            c(Scheme::Proposed).mean,
            c(Scheme::NoAn).mean,
            c(Scheme::Greedy).mean,
            c(Scheme::Random).mean,
            z[0],
            z[1],
            z[2]
        ),
    }
}

fn eavesdropper_trend() -> Verdict {
    let base = ScenarioConfig {
        users: 30,
        ..ScenarioConfig::default()
    };
    let exp = run_experiment(
        &base,
        &["eves=2:12:2".parse().unwrap()],
        &seeds(),
        &[Scheme::Proposed],
    )
    .unwrap();
    let cells: Vec<MetricStats> = (2..=12)
        .step_by(2)
        .map(|e| exp.cell(30, e, Scheme::Proposed).unwrap().rtp)
        .collect();
    let ok = cells
        .windows(2)
        .all(|w| w[1].mean <= w[0].mean + w[0].std.max(w[1].std));
    let means: Vec<String> = cells.iter().map(|c| format!("{:.3}", c.mean)).collect();
    Verdict {
        id: 6,
        name: "RTP non-increasing in eavesdroppers",
        pass: ok,
        detail: format!("RTP(proposed) for E=2..12: {}", means.join(", ")),
    }
}

fn delay_and_energy(exp: &Experiment) -> Verdict {
    let users: Vec<usize> = (10..=30).step_by(5).collect();
    let monotone = Scheme::ALL.iter().all(|&s| {
        users.windows(2).all(|w| {
            exp.cell(w[1], 5, s).unwrap().mean_delay_s.mean
                > exp.cell(w[0], 5, s).unwrap().mean_delay_s.mean
        })
    });
    let at = |s| exp.cell(25, 5, s).unwrap();
    let prop = at(Scheme::Proposed);
    let others = [Scheme::Random, Scheme::Greedy, Scheme::Pso, Scheme::Ga];
    let delay_ok = others.iter().all(|&s| {
        let o = at(s).mean_delay_s;
        prop.mean_delay_s.mean <= o.mean + pooled(prop.mean_delay_s, o)
    });
    let mut energy: Vec<(f64, Scheme)> = [Scheme::Proposed]
        .iter()
        .chain(&others)
        .map(|&s| (at(s).mean_energy_j.mean, s))
        .collect();
    energy.sort_by(|a, b| a.0.total_cmp(&b.0));
    let energy_ok = energy[0].1 == Scheme::Greedy && energy[1].1 == Scheme::Proposed;
    let order: Vec<String> = energy.iter().map(|(e, s)| format!("{s} {e:.1}")).collect();
    Verdict {
        id: 7,
        name: "delay and energy trends",
        pass: monotone && delay_ok && energy_ok,
        detail: format!(
            "delay rises with U for all schemes {monotone}; proposed delay at U=25 within noise of baselines {delay_ok}; energy at U=25: {}",
            order.join(" < ")
        ),
    }
}

fn cli(args: &[&str], out: &Path, threads: Option<&str>) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_stecn"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(t) = threads {
        cmd.env("RAYON_NUM_THREADS", t);
    }
    let status = cmd.status().unwrap();
    assert!(status.success(), "{args:?} exited with {status}");
}

fn determinism() -> Verdict {
    let dirs: Vec<_> = (0..4).map(|_| tempfile::tempdir().unwrap()).collect();
    let sim = [
        "simulate", "--scheme", "all", "--users", "12", "--slots", "3", "--seed", "9",
    ];
    cli(&sim, dirs[0].path(), None);
    cli(&sim, dirs[1].path(), None);
    let sweep = [
        "sweep",
        "--axis",
        "users=6:10:2",
        "--seeds",
        "3",
        "--slots",
        "2",
        "--schemes",
        "proposed,greedy",
    ];
    cli(&sweep, dirs[2].path(), Some("1"));
    cli(&sweep, dirs[3].path(), None);
    let same = |a: &Path, b: &Path, f: &str| {
        std::fs::read(a.join(f)).unwrap() == std::fs::read(b.join(f)).unwrap()
    };
    let mut differing = Vec::new();
    for f in ["slots.csv", "tasks.csv", "convergence.csv", "summary.json"] {
        if !same(dirs[0].path(), dirs[1].path(), f) {
            differing.push(f);
        }
    }
    for f in ["runs.csv", "summary.json"] {
        if !same(dirs[2].path(), dirs[3].path(), f) {
            differing.push(f);
        }
    }
    Verdict {
        id: 8,
        name: "determinism",
        pass: differing.is_empty(),
        detail: if differing.is_empty() {
            "simulate outputs byte-identical across runs; sweep identical with 1 thread and the default pool".into()
        } else {
            format!("differing files: {}", differing.join(", "))
        },
    }
}

fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy * sxy / (sxx * syy)
}

fn complexity() -> Verdict {
    let users: Vec<usize> = (10..=50).step_by(5).collect();
    let evals: Vec<f64> = users
        .iter()
        .map(|&u| {
            let cfg = ScenarioConfig {
                users: u,
                ..ScenarioConfig::default()
            };
            let scenario = Scenario::new(&cfg).unwrap();
            (0..cfg.slots)
                .map(|t| {
                    let snap = scenario.snapshot(&cfg, t);
                    let links =
                        LinkTable::sample(&cfg.channel, &cfg.fading, &snap, cfg.master_seed)
                            .unwrap();
                    stage1::search(&links, &cfg.stage1).evaluations as f64
                })
                .sum::<f64>()
                / cfg.slots as f64
        })
        .collect();
    let xs: Vec<f64> = users.iter().map(|&u| u as f64).collect();
    let r2 = r_squared(&xs, &evals);

    let inst = synthetic_instance(7);
    let mut exact = true;
    let mut seen = Vec::new();
    for (population, iterations) in [(30, 200), (12, 37), (50, 11)] {
        let cfg = MetaheuristicConfig {
            population,
            iterations,
            mating_pairs: 5,
            ..MetaheuristicConfig::default()
        };
        for o in [Optimizer::Ma, Optimizer::Pso, Optimizer::Ga] {
            let mut r = sim_rng(Stream::Scheduler, population as u64);
            let got = stage2::run(o, &inst, &cfg, &mut r).unwrap().evaluations;
            let want = (iterations * population + population) as u64;
            exact &= got == want;
            seen.push(format!("{}:{got}/{want}", o.name()));
        }
    }
    Verdict {
        id: 9,
        name: "complexity counters",
        pass: r2 >= C9_R2 && exact,
        detail: format!(
            "stage-1 evaluations vs U=10..50 R^2 {r2:.5} (need {C9_R2}); stage-2 evaluations {}",
            seen.join(" ")
        ),
    }
}

fn main() {
    let verdicts = [
        stage2_vs_exhaustive(),
        stage1_vs_brute_force(),
        physics_invariants(),
        convergence(),
    ];
    let exp = users_sweep();
    let verdicts: Vec<Verdict> = verdicts
        .into_iter()
        .chain([
            rtp_ordering(&exp),
            eavesdropper_trend(),
            delay_and_energy(&exp),
            determinism(),
            complexity(),
        ])
        .collect();
    let mut failed = 0;
    for v in &verdicts {
        println!(
            "criterion {} {}: {} ({})",
            v.id,
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        );
        failed += usize::from(!v.pass);
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

use proptest::prelude::*;
use stecn::geo::{grid_neighbors, isl_routes, ConstellationConfig, Layout};

/// Single-source shortest paths by repeated edge relaxation.
fn bellman_ford(n: usize, edges: &[(usize, usize, f64)], src: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; n];
    dist[src] = 0.0;
    for _ in 0..n {
        let mut changed = false;
        for &(a, b, rate) in edges {
            if !(rate > 0.0 && rate.is_finite()) {
                continue;
            }
            let w = 1.0 / rate;
            for (x, y) in [(a, b), (b, a)] {
                if dist[x] + w < dist[y] {
                    dist[y] = dist[x] + w;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    dist
}

fn graph() -> impl Strategy<Value = (usize, Vec<(usize, usize, f64)>)> {
    (2usize..9).prop_flat_map(|n| {
        let edge = (0..n, 0..n, prop_oneof![Just(0.0), 1e3f64..1e9]);
        (Just(n), prop::collection::vec(edge, 0..20))
    })
}

fn close(a: f64, b: f64) -> bool {
    (a.is_infinite() && b.is_infinite()) || (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn floyd_matches_bellman_ford((n, edges) in graph()) {
        let r = isl_routes(n, &edges);
        for s in 0..n {
            let oracle = bellman_ford(n, &edges, s);
            for t in 0..n {
                prop_assert!(close(r.path_rate_inverse[s][t], oracle[t]),
                    "{s}->{t}: {} vs {}", r.path_rate_inverse[s][t], oracle[t]);
            }
        }
    }

    #[test]
    fn costs_obey_triangle_inequality((n, edges) in graph()) {
        let r = isl_routes(n, &edges);
        let c = &r.path_rate_inverse;
        for i in 0..n {
            for j in 0..n {
                prop_assert!(close(c[i][j], c[j][i]));
                for k in 0..n {
                    prop_assert!(c[i][j] <= (c[i][k] + c[k][j]) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn reconstructed_paths_cost_what_the_table_says((n, edges) in graph()) {
        let r = isl_routes(n, &edges);
        let edge_cost = |a: usize, b: usize| {
            edges
                .iter()
                .filter(|&&(x, y, rate)| ((x, y) == (a, b) || (x, y) == (b, a)) && rate > 0.0)
                .map(|&(_, _, rate)| 1.0 / rate)
                .fold(f64::INFINITY, f64::min)
        };
        for s in 0..n {
            for t in 0..n {
                match r.path(s, t) {
                    None => prop_assert!(!r.reachable(s, t)),
                    Some(p) => {
                        prop_assert_eq!(p[0], s);
                        prop_assert_eq!(*p.last().unwrap(), t);
                        let sum: f64 = p.windows(2).map(|w| edge_cost(w[0], w[1])).sum();
                        prop_assert!(close(sum, r.path_rate_inverse[s][t]));
                    }
                }
            }
        }
    }
}

#[test]
fn uniform_grid_hop_counts() {
    let cfg = ConstellationConfig {
        layout: Layout::Global {
            raan_offset_deg: 0.0,
            phasing_deg: 0.0,
        },
        ..Default::default()
    };
    let edges: Vec<_> = grid_neighbors(&cfg)
        .into_iter()
        .map(|(a, b)| (a, b, 1.0))
        .collect();
    let r = isl_routes(cfg.sat_count(), &edges);
    let per_plane = cfg.sats_per_plane;
    let planes = cfg.planes;
    let ring = |d: usize, m: usize| d.min(m - d) as f64;
    for a in 0..cfg.sat_count() {
        for b in 0..cfg.sat_count() {
            let (pa, sa) = (a / per_plane, a % per_plane);
            let (pb, sb) = (b / per_plane, b % per_plane);
            let hops = ring(pa.abs_diff(pb), planes) + ring(sa.abs_diff(sb), per_plane);
            assert_eq!(r.path_rate_inverse[a][b], hops, "{a}->{b}");
        }
    }
}

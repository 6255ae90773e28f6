//! All-pairs ISL routing by Floyd–Warshall over per-bit link cost 1/R.

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Routes {
    /// `next_hop[a][b]`: first hop from `a` towards `b`; `None` when unreachable
    /// (and on the diagonal).
    pub next_hop: Vec<Vec<Option<usize>>>,
    /// Accumulated 1/R along the chosen path, seconds per bit. `f64::INFINITY`
    /// when unreachable.
    pub path_rate_inverse: Vec<Vec<f64>>,
}

/// Shortest paths over undirected edges `(a, b, rate_bps)`.
/// Edges with non-positive or non-finite rates are ignored.
pub fn isl_routes(n: usize, edges: &[(usize, usize, f64)]) -> Routes {
    let mut cost = vec![vec![f64::INFINITY; n]; n];
    let mut next = vec![vec![None; n]; n];
    for (i, row) in cost.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, rate) in edges {
        if !(rate > 0.0 && rate.is_finite()) {
            continue;
        }
        let w = 1.0 / rate;
        if w < cost[a][b] {
            cost[a][b] = w;
            cost[b][a] = w;
            next[a][b] = Some(b);
            next[b][a] = Some(a);
        }
    }
    for k in 0..n {
        for i in 0..n {
            let ik = cost[i][k];
            if !ik.is_finite() {
                continue;
            }
            for j in 0..n {
                let via = ik + cost[k][j];
                if via < cost[i][j] {
                    cost[i][j] = via;
                    next[i][j] = next[i][k];
                }
            }
        }
    }
    Routes {
        next_hop: next,
        path_rate_inverse: cost,
    }
}

impl Routes {
    pub fn len(&self) -> usize {
        self.path_rate_inverse.len()
    }

    pub fn is_empty(&self) -> bool {
        self.path_rate_inverse.is_empty()
    }

    pub fn reachable(&self, a: usize, b: usize) -> bool {
        self.path_rate_inverse[a][b].is_finite()
    }

    /// Seconds per bit from `a` to `b`, or `None` when unreachable.
    pub fn cost(&self, a: usize, b: usize) -> Option<f64> {
        let c = self.path_rate_inverse[a][b];
        c.is_finite().then_some(c)
    }

    /// Node sequence from `a` to `b` inclusive.
    pub fn path(&self, a: usize, b: usize) -> Option<Vec<usize>> {
        if !self.reachable(a, b) {
            return None;
        }
        let mut path = vec![a];
        let mut at = a;
        while at != b {
            at = self.next_hop[at][b]?;
            if path.len() > self.len() {
                return None;
            }
            path.push(at);
        }
        Some(path)
    }
}

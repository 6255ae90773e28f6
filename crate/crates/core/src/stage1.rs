//! Stage 1: shared AN power-ratio grid search with secrecy-aware greedy
//! association, plus the fixed association rules of the baselines.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::LinkTable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Stage1Config {
    pub delta: f64,
    /// Minimum secrecy rate (bit/s) for a user to count as securely served.
    pub epsilon_secrecy: f64,
}

impl Default for Stage1Config {
    fn default() -> Self {
        Self {
            delta: 0.05,
            epsilon_secrecy: 2.0e5,
        }
    }
}

impl Stage1Config {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return Err(Error::config("stage1.delta must lie in (0, 1]"));
        }
        if !(self.epsilon_secrecy >= 0.0) {
            return Err(Error::config("stage1.epsilon_secrecy must be non-negative"));
        }
        Ok(())
    }

    /// `{0, Δ, 2Δ, …, 1}`; 1 is appended when it is not a grid multiple.
    pub fn psi_grid(&self) -> Vec<f64> {
        let ratio = 1.0 / self.delta;
        let steps = ratio.round();
        if (ratio - steps).abs() < 1e-9 {
            let steps = steps as usize;
            (0..=steps).map(|k| k as f64 / steps as f64).collect()
        } else {
            let mut grid: Vec<f64> = (0..=ratio.floor() as usize)
                .map(|k| k as f64 * self.delta)
                .collect();
            grid.push(1.0);
            grid
        }
    }
}

/// Anything that can report per-(user, satellite) secrecy rates.
pub trait SecrecySource {
    fn user_count(&self) -> usize;
    /// Candidate satellites of user `u`, ascending id.
    fn visible(&self, u: usize) -> &[usize];
    fn secrecy(&self, u: usize, n: usize, psi: f64) -> f64;
}

impl SecrecySource for LinkTable {
    fn user_count(&self) -> usize {
        self.user_sats.len()
    }

    fn visible(&self, u: usize) -> &[usize] {
        &self.user_sats[u]
    }

    fn secrecy(&self, u: usize, n: usize, psi: f64) -> f64 {
        LinkTable::secrecy(self, u, n, psi)
    }
}

/// Association for one fixed ψ.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiAssociation {
    pub psi: f64,
    pub assoc: Vec<Option<usize>>,
    pub per_user_secrecy: Vec<f64>,
    pub secure_count: usize,
    /// Number of (user, satellite) secrecy evaluations performed.
    pub evaluations: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssociationDecision {
    pub psi_star: f64,
    pub assoc: Vec<Option<usize>>,
    pub per_user_secrecy: Vec<f64>,
    pub secure: Vec<bool>,
    pub secure_count: usize,
    /// Fraction of users meeting the secrecy threshold (1 when there are no users).
    pub rtp: f64,
    pub evaluations: u64,
}

impl AssociationDecision {
    fn from_psi(a: PsiAssociation, epsilon: f64, evaluations: u64) -> Self {
        let users = a.assoc.len();
        let secure: Vec<bool> = a
            .assoc
            .iter()
            .zip(&a.per_user_secrecy)
            .map(|(n, &s)| n.is_some() && s >= epsilon)
            .collect();
        let rtp = if users == 0 {
            1.0
        } else {
            a.secure_count as f64 / users as f64
        };
        Self {
            psi_star: a.psi,
            assoc: a.assoc,
            per_user_secrecy: a.per_user_secrecy,
            secure,
            secure_count: a.secure_count,
            rtp,
            evaluations,
        }
    }
}

/// Give every user the visible satellite with the highest secrecy rate at
/// `psi` (ties go to the lowest id) and count users meeting `epsilon`.
pub fn associate_for_psi<S: SecrecySource + ?Sized>(
    src: &S,
    psi: f64,
    epsilon: f64,
) -> PsiAssociation {
    let mut evaluations = 0;
    let mut assoc = Vec::with_capacity(src.user_count());
    let mut per_user_secrecy = Vec::with_capacity(src.user_count());
    let mut secure_count = 0;
    for u in 0..src.user_count() {
        let mut best: Option<(usize, f64)> = None;
        for &n in src.visible(u) {
            let s = src.secrecy(u, n, psi);
            evaluations += 1;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((n, s));
            }
        }
        let secrecy = best.map_or(0.0, |(_, s)| s);
        if best.is_some() && secrecy >= epsilon {
            secure_count += 1;
        }
        assoc.push(best.map(|(n, _)| n));
        per_user_secrecy.push(secrecy);
    }
    PsiAssociation {
        psi,
        assoc,
        per_user_secrecy,
        secure_count,
        evaluations,
    }
}

/// Grid search over ψ maximizing the securely served count; ties favour the larger ψ.
pub fn search<S: SecrecySource + ?Sized>(src: &S, cfg: &Stage1Config) -> AssociationDecision {
    let mut total = 0;
    let mut best: Option<PsiAssociation> = None;
    for psi in cfg.psi_grid() {
        let cand = associate_for_psi(src, psi, cfg.epsilon_secrecy);
        total += cand.evaluations;
        if best
            .as_ref()
            .is_none_or(|b| cand.secure_count >= b.secure_count)
        {
            best = Some(cand);
        }
    }
    let best = best.expect("grid is never empty");
    AssociationDecision::from_psi(best, cfg.epsilon_secrecy, total)
}

/// Secrecy bookkeeping for an association chosen by some other rule.
pub fn evaluate_fixed<S: SecrecySource + ?Sized>(
    src: &S,
    assoc: Vec<Option<usize>>,
    psi: f64,
    epsilon: f64,
) -> AssociationDecision {
    let mut evaluations = 0;
    let per_user_secrecy: Vec<f64> = assoc
        .iter()
        .enumerate()
        .map(|(u, n)| {
            n.map_or(0.0, |n| {
                evaluations += 1;
                src.secrecy(u, n, psi)
            })
        })
        .collect();
    let secure_count = assoc
        .iter()
        .zip(&per_user_secrecy)
        .filter(|(n, &s)| n.is_some() && s >= epsilon)
        .count();
    let a = PsiAssociation {
        psi,
        assoc,
        per_user_secrecy,
        secure_count,
        evaluations,
    };
    AssociationDecision::from_psi(a, epsilon, evaluations)
}

/// Nearest visible satellite (smallest central angle; ties to the lowest id).
/// `angles[u]` is aligned with `src.visible(u)`.
pub fn nearest_association<S: SecrecySource + ?Sized>(
    src: &S,
    angles: &[Vec<f64>],
) -> Vec<Option<usize>> {
    (0..src.user_count())
        .map(|u| {
            src.visible(u)
                .iter()
                .zip(&angles[u])
                .fold(None, |best: Option<(usize, f64)>, (&n, &a)| match best {
                    Some((_, b)) if b <= a => best,
                    _ => Some((n, a)),
                })
                .map(|(n, _)| n)
        })
        .collect()
}

/// Uniformly random visible satellite; `rng_for(u)` supplies the user's stream.
pub fn random_association<S, R, F>(src: &S, mut rng_for: F) -> Vec<Option<usize>>
where
    S: SecrecySource + ?Sized,
    R: Rng,
    F: FnMut(usize) -> R,
{
    (0..src.user_count())
        .map(|u| {
            let vis = src.visible(u);
            (!vis.is_empty()).then(|| vis[rng_for(u).random_range(0..vis.len())])
        })
        .collect()
}

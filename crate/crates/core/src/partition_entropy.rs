//! Batty's entropy and the Karlström–Ceccato neighbourhood entropy over an
//! area partition, for a single category of interest.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::Point;
use crate::partitioning::{PartitionSummary, SummaryRow};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BattyResult {
    pub value: f64,
    pub table: Vec<SummaryRow>,
    /// `log T_g*`, g* the smallest area with positive probability.
    pub lower_bound: f64,
    /// `log T`.
    pub upper_bound: f64,
}

/// `sum_g p_g log(T_g / p_g)` from raw probabilities and sizes.
pub fn batty_value(p: &[f64], sizes: &[f64]) -> Result<f64> {
    if p.len() != sizes.len() {
        return Err(Error::Dimension(format!("{} probabilities but {} sizes", p.len(), sizes.len())));
    }
    let mut h = 0.0;
    for (g, (&pg, &tg)) in p.iter().zip(sizes).enumerate() {
        if pg > 0.0 {
            if !(tg > 0.0) {
                return Err(Error::DegenerateArea { area: g + 1 });
            }
            h += pg * (tg / pg).ln();
        }
    }
    Ok(h)
}

pub fn batty(summary: &PartitionSummary) -> Result<BattyResult> {
    let p = summary.rel_freqs();
    let sizes = summary.sizes();
    let value = batty_value(&p, &sizes)?;
    let min_size = p
        .iter()
        .zip(&sizes)
        .filter(|(&pg, _)| pg > 0.0)
        .map(|(_, &t)| t)
        .fold(f64::INFINITY, f64::min);
    Ok(BattyResult {
        value,
        table: summary.rows.clone(),
        lower_bound: min_size.ln(),
        upper_bound: summary.total_size.ln(),
    })
}

/// Symmetric G x G neighbourhood relation between sub-areas; every area
/// neighbours itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborhoodSystem {
    g: usize,
    adj: Vec<bool>,
}

impl NeighborhoodSystem {
    /// Areas whose centroids are at most `max_dist` apart.
    pub fn from_centroids(centroids: &[Point], max_dist: f64) -> Result<Self> {
        if !(max_dist >= 0.0) {
            return Err(Error::Argument(format!("neighbourhood distance must be >= 0, got {max_dist}")));
        }
        let g = centroids.len();
        let mut adj = vec![false; g * g];
        for a in 0..g {
            for b in 0..g {
                adj[a * g + b] = a == b || centroids[a].dist(&centroids[b]) <= max_dist;
            }
        }
        Ok(Self { g, adj })
    }

    /// From explicit neighbour sets (0-based). Self-membership is forced
    /// and the relation is symmetrised.
    pub fn from_sets(sets: &[Vec<usize>]) -> Result<Self> {
        let g = sets.len();
        let mut adj = vec![false; g * g];
        for (a, set) in sets.iter().enumerate() {
            adj[a * g + a] = true;
            for &b in set {
                if b >= g {
                    return Err(Error::Dimension(format!("neighbour {} out of range", b + 1)));
                }
                adj[a * g + b] = true;
                adj[b * g + a] = true;
            }
        }
        Ok(Self { g, adj })
    }

    pub fn identity(g: usize) -> Self {
        Self::from_sets(&vec![Vec::new(); g]).expect("in range")
    }

    pub fn full(g: usize) -> Self {
        Self { g, adj: vec![true; g * g] }
    }

    pub fn len(&self) -> usize {
        self.g
    }

    pub fn is_empty(&self) -> bool {
        self.g == 0
    }

    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.adj[a * self.g + b]
    }

    pub fn neighbors(&self, a: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.g).filter(move |&b| self.contains(a, b))
    }
}

/// How neighbouring probabilities are combined into `p~_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SmoothingMode {
    /// Mean over the neighbourhood, self included.
    #[default]
    Mean,
    /// Plain sum over the neighbourhood; may exceed 1.
    Sum,
}

pub fn kc_ptilde(p: &[f64], neigh: &NeighborhoodSystem, mode: SmoothingMode) -> Result<Vec<f64>> {
    if p.len() != neigh.len() {
        return Err(Error::Dimension(format!("{} probabilities for {} areas", p.len(), neigh.len())));
    }
    Ok((0..neigh.len())
        .map(|g| {
            let (sum, count) = neigh.neighbors(g).fold((0.0, 0usize), |(s, c), h| (s + p[h], c + 1));
            let v = match mode {
                SmoothingMode::Mean => sum / count as f64,
                SmoothingMode::Sum => sum,
            };
            // rounding can push a sum of pmf entries past 1
            v.min(1.0)
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KarlstromRow {
    pub area_id: usize,
    pub abs_freq: u64,
    pub rel_freq: f64,
    pub p_tilde: f64,
    /// Local term `p_g log(1/p~_g)`.
    pub local: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KarlstromResult {
    pub value: f64,
    pub table: Vec<KarlstromRow>,
    pub mode: SmoothingMode,
}

impl KarlstromResult {
    pub fn local_terms(&self) -> Vec<f64> {
        self.table.iter().map(|r| r.local).collect()
    }
}

/// Karlström–Ceccato entropy for probabilities `p` under `neigh`.
/// Returns the smoothed probabilities and local terms.
pub fn karlstrom_terms(p: &[f64], neigh: &NeighborhoodSystem, mode: SmoothingMode) -> Result<(Vec<f64>, Vec<f64>)> {
    let pt = kc_ptilde(p, neigh, mode)?;
    let local = p
        .iter()
        .zip(&pt)
        .map(|(&pg, &ptg)| {
            if pg > 0.0 {
                // p~_g includes p_g itself, so it cannot vanish here
                assert!(ptg > 0.0, "smoothed probability vanished for an occupied area");
                -pg * ptg.ln() + 0.0
            } else {
                0.0
            }
        })
        .collect();
    Ok((pt, local))
}

pub fn karlstrom_with(summary: &PartitionSummary, neigh: &NeighborhoodSystem, mode: SmoothingMode) -> Result<KarlstromResult> {
    let p = summary.rel_freqs();
    let (pt, local) = karlstrom_terms(&p, neigh, mode)?;
    let table: Vec<KarlstromRow> = summary
        .rows
        .iter()
        .zip(pt.iter().zip(&local))
        .map(|(r, (&p_tilde, &l))| KarlstromRow {
            area_id: r.area_id,
            abs_freq: r.abs_freq,
            rel_freq: r.rel_freq,
            p_tilde,
            local: l,
        })
        .collect();
    Ok(KarlstromResult { value: local.iter().sum(), table, mode })
}

/// Karlström–Ceccato entropy with neighbourhoods of centroids within
/// `neigh_dist` of each other.
pub fn karlstrom(summary: &PartitionSummary, neigh_dist: f64, mode: SmoothingMode) -> Result<KarlstromResult> {
    let neigh = NeighborhoodSystem::from_centroids(&summary.centroids, neigh_dist)?;
    karlstrom_with(summary, &neigh, mode)
}

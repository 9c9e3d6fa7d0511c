//! Seeded generators for lattice and point data with controllable spatial
//! association.
//!
//! All randomness comes from ChaCha8 streams keyed by `(seed, Stream)`, so
//! different purposes (centroids, grids, patterns) never share a sequence.

use rand::distr::weighted::WeightedIndex;
use rand::distr::{Bernoulli, Distribution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Normal;

use crate::error::{Error, Result};
use crate::model::{CategoricalData, CategoricalGrid, MarkedPointPattern, Point, Window};

/// Name of the generator family, reported in result provenance.
pub const GENERATOR: &str = "ChaCha8/rand_chacha-0.9";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Centroids = 1,
    Grid = 2,
    Pattern = 3,
    Raster = 4,
}

pub fn stream_rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}

fn binary_categories() -> Vec<String> {
    vec!["0".to_string(), "1".to_string()]
}

fn bernoulli(p: f64) -> Result<Bernoulli> {
    Bernoulli::new(p).map_err(|_| Error::Argument(format!("probability {p} is outside [0, 1]")))
}

/// I.i.d. binary grid: each cell is "1" with probability `p`.
pub fn bernoulli_grid(rows: usize, cols: usize, p: f64, seed: u64) -> Result<CategoricalGrid> {
    clustered_grid(rows, cols, p, 1, seed)
}

/// Binary grid constant over `block x block` tiles (edge tiles truncated),
/// tile labels i.i.d. Bernoulli(`p`).
pub fn clustered_grid(rows: usize, cols: usize, p: f64, block: usize, seed: u64) -> Result<CategoricalGrid> {
    if block < 1 {
        return Err(Error::Argument("block size must be at least 1".into()));
    }
    if rows == 0 || cols == 0 {
        return Err(Error::Argument("grid dimensions must be positive".into()));
    }
    let dist = bernoulli(p)?;
    let mut rng = stream_rng(seed, Stream::Grid);
    let tile_rows = rows.div_ceil(block);
    let tile_cols = cols.div_ceil(block);
    let tiles: Vec<bool> = (0..tile_rows * tile_cols).map(|_| dist.sample(&mut rng)).collect();
    let labels = (0..rows * cols).map(|i| {
        let (r, c) = (i / cols, i % cols);
        if tiles[(r / block) * tile_cols + c / block] { "1" } else { "0" }
    });
    let values = CategoricalData::from_labels(labels, Some(&binary_categories()))?;
    CategoricalGrid::from_data(rows, cols, values, None)
}

fn mark_sampler(marks: &[(String, f64)]) -> Result<(WeightedIndex<f64>, Vec<String>)> {
    if marks.is_empty() {
        return Err(Error::Argument("at least one mark is required".into()));
    }
    let total: f64 = marks.iter().map(|m| m.1).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::Argument(format!("mark probabilities sum to {total}, expected 1")));
    }
    let idx = WeightedIndex::new(marks.iter().map(|m| m.1))
        .map_err(|e| Error::Argument(format!("invalid mark probabilities: {e}")))?;
    Ok((idx, marks.iter().map(|m| m.0.clone()).collect()))
}

fn uniform_point(rng: &mut impl Rng, w: &Window) -> Point {
    Point::new(rng.random_range(w.x_min..=w.x_max), rng.random_range(w.y_min..=w.y_max))
}

/// `n` uniform points with i.i.d. marks drawn from `marks` (label, probability).
pub fn poisson_pattern(window: Window, n: usize, marks: &[(String, f64)], seed: u64) -> Result<MarkedPointPattern> {
    if n == 0 {
        return Err(Error::Argument("n must be at least 1".into()));
    }
    let (idx, names) = mark_sampler(marks)?;
    let mut rng = stream_rng(seed, Stream::Pattern);
    let mut points = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        points.push(uniform_point(&mut rng, &window));
        labels.push(names[idx.sample(&mut rng)].as_str());
    }
    let marks = CategoricalData::from_labels(labels, Some(&names))?;
    MarkedPointPattern::from_parts(points, marks, window)
}

/// Cluster process: uniform parents, Gaussian offspring (clipped to the
/// window), one mark per cluster drawn from `marks`.
pub fn clustered_pattern(
    window: Window,
    n_parents: usize,
    n_offspring: usize,
    spread: f64,
    marks: &[(String, f64)],
    seed: u64,
) -> Result<MarkedPointPattern> {
    if !(spread > 0.0) || !spread.is_finite() {
        return Err(Error::Argument(format!("spread must be positive, got {spread}")));
    }
    if n_parents == 0 || n_offspring == 0 {
        return Err(Error::Argument("parent and offspring counts must be positive".into()));
    }
    let (idx, names) = mark_sampler(marks)?;
    let normal = Normal::new(0.0, spread).map_err(|e| Error::Argument(e.to_string()))?;
    let mut rng = stream_rng(seed, Stream::Pattern);
    let mut points = Vec::with_capacity(n_parents * n_offspring);
    let mut labels = Vec::with_capacity(n_parents * n_offspring);
    for _ in 0..n_parents {
        let parent = uniform_point(&mut rng, &window);
        let mark = names[idx.sample(&mut rng)].as_str();
        for _ in 0..n_offspring {
            let child = Point::new(parent.x + normal.sample(&mut rng), parent.y + normal.sample(&mut rng));
            points.push(window.clamp(child));
            labels.push(mark);
        }
    }
    let marks = CategoricalData::from_labels(labels, Some(&names))?;
    MarkedPointPattern::from_parts(points, marks, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shannon::{estimate_pmf, shannon_entropy};

    fn unit_square(side: f64) -> Window {
        Window::new(0.0, side, 0.0, side).unwrap()
    }

    fn rainforest_marks() -> Vec<(String, f64)> {
        [("acaldi", 0.19374369), ("cha2sc", 0.06205853), ("ingape", 0.02320888), ("rinosy", 0.72098890)]
            .iter()
            .map(|(l, p)| (l.to_string(), *p))
            .collect()
    }

    #[test]
    fn bernoulli_edge_cases() {
        let g = bernoulli_grid(5, 4, 0.0, 1).unwrap();
        assert!(g.values().labels().all(|l| l == "0"));
        assert_eq!(g.values().categories(), &["0", "1"]);
        let g = bernoulli_grid(50, 50, 0.5, 11).unwrap();
        let ones = g.values().counts()[1] as f64 / 2500.0;
        assert!((ones - 0.5).abs() < 0.03, "{ones}");
        assert_eq!(bernoulli_grid(7, 9, 0.3, 5).unwrap(), bernoulli_grid(7, 9, 0.3, 5).unwrap());
        assert!(bernoulli_grid(3, 3, 1.5, 0).is_err());
    }

    #[test]
    fn clustered_grid_tiles() {
        assert_eq!(clustered_grid(6, 6, 0.4, 1, 3).unwrap(), bernoulli_grid(6, 6, 0.4, 3).unwrap());
        for seed in 0..10 {
            let g = clustered_grid(8, 8, 0.5, 8, seed).unwrap();
            let first = g.get(0, 0).to_string();
            assert!(g.values().labels().all(|l| l == first));
        }
        let g = clustered_grid(7, 7, 0.5, 3, 9).unwrap();
        for r in 0..7 {
            for c in 0..7 {
                assert_eq!(g.get(r, c), g.get(r / 3 * 3, c / 3 * 3));
            }
        }
        assert!(matches!(clustered_grid(4, 4, 0.5, 0, 1), Err(Error::Argument(_))));
    }

    #[test]
    fn poisson_pattern_marks() {
        let w = Window::new(350.0, 800.0, 300.0, 500.0).unwrap();
        let one = poisson_pattern(w, 1, &rainforest_marks(), 2).unwrap();
        assert_eq!(one.len(), 1);
        assert!(w.contains(&one.points()[0]));

        let p = poisson_pattern(w, 2000, &rainforest_marks(), 42).unwrap();
        let h = shannon_entropy(&estimate_pmf(p.marks()).unwrap()).value;
        assert!((h - 0.8136769).abs() < 0.05, "{h}");
        assert_eq!(p, poisson_pattern(w, 2000, &rainforest_marks(), 42).unwrap());
        assert!(poisson_pattern(w, 10, &[("a".into(), 0.5)], 1).is_err());
    }

    #[test]
    fn clustered_pattern_shape() {
        let w = unit_square(100.0);
        let marks = vec![("a".to_string(), 0.5), ("b".to_string(), 0.5)];
        let p = clustered_pattern(w, 20, 25, 1.0, &marks, 4).unwrap();
        assert_eq!(p.len(), 500);
        assert!(p.points().iter().all(|q| w.contains(q)));
        for cluster in p.marks().codes().chunks(25) {
            assert!(cluster.iter().all(|&c| c == cluster[0]));
        }
        assert_eq!(p, clustered_pattern(w, 20, 25, 1.0, &marks, 4).unwrap());
        assert!(clustered_pattern(w, 2, 2, 0.0, &marks, 4).is_err());
    }

    #[test]
    fn streams_are_distinct() {
        let a: u64 = stream_rng(1, Stream::Grid).random();
        let b: u64 = stream_rng(1, Stream::Pattern).random();
        assert_ne!(a, b);
    }
}

//! Pairwise distances and distance-interval adjacency.
//!
//! Everything here works on the strict upper triangle: a pair is always the
//! unit indices `(u, v)` with `u < v`, enumerated row-major (by `u`, then `v`).
//! Adjacency intervals are half-open, `(d0, d1]`, so coincident units
//! (distance 0) are never paired.

use std::cell::Cell;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Point, UnitCoordinates};

thread_local! {
    static BUILDS: Cell<usize> = const { Cell::new(0) };
}

/// Number of distance matrices built on the current thread.
pub fn distance_matrix_builds() -> usize {
    BUILDS.with(Cell::get)
}

#[inline]
pub fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Condensed strict-upper-triangle Euclidean distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of stored distances, `n(n-1)/2`.
    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    fn row_offset(&self, u: usize) -> usize {
        // Start of row u in the condensed layout.
        u * self.n - u * (u + 1) / 2
    }

    /// Distance between two distinct units, in either order.
    pub fn get(&self, u: usize, v: usize) -> f64 {
        assert!(u != v && u < self.n && v < self.n, "pair ({u}, {v}) out of range");
        let (u, v) = if u < v { (u, v) } else { (v, u) };
        self.data[self.row_offset(u) + (v - u - 1)]
    }

    /// Distances from `u` to every `v > u`.
    pub fn row(&self, u: usize) -> &[f64] {
        let start = self.row_offset(u);
        &self.data[start..start + (self.n - u - 1)]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn max(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// `(u, v, d)` for all `u < v`, row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |u| self.row(u).iter().enumerate().map(move |(j, &d)| (u, u + 1 + j, d)))
    }
}

/// Euclidean distances between all unit pairs.
pub fn pairwise_distances(coords: &UnitCoordinates) -> Result<DistanceMatrix> {
    let pts: &[Point] = coords.as_slice();
    let n = pts.len();
    if n < 2 {
        return Err(Error::InsufficientUnits(n));
    }
    let data: Vec<f64> = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| {
            let pu = pts[u];
            pts[u + 1..].iter().map(move |pv| pu.dist(pv))
        })
        .collect();
    BUILDS.with(|b| b.set(b.get() + 1));

    let coincident = data.par_iter().filter(|&&d| d == 0.0).count();
    if coincident > 0 {
        log::warn!("{coincident} pairs of units share identical coordinates; they are never paired");
    }
    Ok(DistanceMatrix { n, data })
}

/// Selected unit pairs for one distance interval `(d0, d1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjacencyStructure {
    n: usize,
    d0: f64,
    d1: f64,
    pairs: Vec<(u32, u32)>,
}

impl AdjacencyStructure {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.d0, self.d1)
    }

    /// Number of selected pairs, Q.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    /// Pair predicate; argument order is irrelevant.
    pub fn contains(&self, u: usize, v: usize) -> bool {
        if u == v {
            return false;
        }
        let key = if u < v { (u as u32, v as u32) } else { (v as u32, u as u32) };
        self.pairs.binary_search(&key).is_ok()
    }
}

fn check_interval(d0: f64, d1: f64) -> Result<()> {
    if !(d0 >= 0.0 && d1 > d0) || d0.is_nan() || d1.is_nan() {
        return Err(Error::Interval { d0, d1 });
    }
    Ok(())
}

/// Pairs with `d0 < d <= d1`.
pub fn adjacency_from_distances(dmat: &DistanceMatrix, d0: f64, d1: f64) -> Result<AdjacencyStructure> {
    check_interval(d0, d1)?;
    let pairs: Vec<(u32, u32)> = (0..dmat.n)
        .into_par_iter()
        .flat_map_iter(|u| {
            dmat.row(u)
                .iter()
                .enumerate()
                .filter(move |(_, &d)| d > d0 && d <= d1)
                .map(move |(j, _)| (u as u32, (u + 1 + j) as u32))
        })
        .collect();
    Ok(AdjacencyStructure { n: dmat.n, d0, d1, pairs })
}

/// Adjacency structures for consecutive distance classes `(b[k-1], b[k]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceClassList {
    breaks: Vec<f64>,
    classes: Vec<AdjacencyStructure>,
}

impl DistanceClassList {
    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn classes(&self) -> &[AdjacencyStructure] {
        &self.classes
    }

    /// Number of classes, K.
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn n(&self) -> usize {
        self.classes.first().map_or(0, AdjacencyStructure::n)
    }

    /// Pair count per class, Q_k.
    pub fn counts(&self) -> Vec<usize> {
        self.classes.iter().map(AdjacencyStructure::len).collect()
    }

    /// Total pair count Q.
    pub fn total(&self) -> usize {
        self.classes.iter().map(AdjacencyStructure::len).sum()
    }
}

pub fn validate_breaks(breaks: &[f64]) -> Result<()> {
    if breaks.len() < 2 {
        return Err(Error::Breaks("at least two breaks are required".into()));
    }
    if breaks[0] != 0.0 {
        return Err(Error::Breaks(format!("first break must be 0, got {}", breaks[0])));
    }
    if breaks.iter().any(|b| !b.is_finite()) {
        return Err(Error::Breaks("breaks must be finite".into()));
    }
    if let Some(w) = breaks.windows(2).find(|w| w[1] <= w[0]) {
        return Err(Error::Breaks(format!("breaks must be strictly increasing ({} then {})", w[0], w[1])));
    }
    Ok(())
}

/// Splits all pairs of positive distance into the classes defined by `breaks`.
pub fn build_distance_classes(dmat: &DistanceMatrix, breaks: &[f64]) -> Result<DistanceClassList> {
    validate_breaks(breaks)?;
    let last = *breaks.last().expect("validated");
    let max = dmat.max();
    if last < max {
        return Err(Error::Coverage { last, max });
    }
    let k = breaks.len() - 1;
    let n = dmat.n;

    let per_row: Vec<Vec<Vec<(u32, u32)>>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut buckets = vec![Vec::new(); k];
            for (j, &d) in dmat.row(u).iter().enumerate() {
                if d > 0.0 {
                    // first break >= d; breaks[0] = 0 < d so idx >= 1
                    let idx = breaks.partition_point(|&b| b < d);
                    buckets[idx - 1].push((u as u32, (u + 1 + j) as u32));
                }
            }
            buckets
        })
        .collect();

    let mut pairs: Vec<Vec<(u32, u32)>> = (0..k)
        .map(|c| Vec::with_capacity(per_row.iter().map(|r| r[c].len()).sum()))
        .collect();
    for row in per_row {
        for (c, bucket) in row.into_iter().enumerate() {
            pairs[c].extend(bucket);
        }
    }
    let classes = pairs
        .into_iter()
        .enumerate()
        .map(|(c, pairs)| AdjacencyStructure { n, d0: breaks[c], d1: breaks[c + 1], pairs })
        .collect();
    Ok(DistanceClassList { breaks: breaks.to_vec(), classes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CategoricalGrid;

    fn unit_grid(rows: usize, cols: usize) -> UnitCoordinates {
        let m = vec![vec!["a"; cols]; rows];
        CategoricalGrid::from_matrix(&m, None, None).unwrap().pixel_centroids()
    }

    #[test]
    fn three_four_five() {
        let d = pairwise_distances(&vec![Point::new(0.0, 0.0), Point::new(3.0, 4.0)].into()).unwrap();
        assert_eq!(d.as_slice(), &[5.0]);
    }

    #[test]
    fn two_by_two_distances() {
        let d = pairwise_distances(&unit_grid(2, 2)).unwrap();
        assert_eq!(d.len(), 6);
        let ones = d.as_slice().iter().filter(|&&x| x == 1.0).count();
        let diag = d.as_slice().iter().filter(|&&x| (x - 2f64.sqrt()).abs() < 1e-15).count();
        assert_eq!((ones, diag), (4, 2));
    }

    #[test]
    fn too_few_units() {
        let err = pairwise_distances(&vec![Point::new(0.0, 0.0)].into()).unwrap_err();
        assert!(matches!(err, Error::InsufficientUnits(1)));
    }

    #[test]
    fn condensed_indexing_matches_direct_distance() {
        let cc = unit_grid(4, 3);
        let d = pairwise_distances(&cc).unwrap();
        for u in 0..cc.len() {
            for v in 0..cc.len() {
                if u != v {
                    assert_eq!(d.get(u, v), cc.0[u].dist(&cc.0[v]));
                }
            }
        }
        assert_eq!(d.iter().count(), pair_count(12));
    }

    #[test]
    fn contiguity_counts() {
        let d = pairwise_distances(&unit_grid(50, 50)).unwrap();
        assert_eq!(adjacency_from_distances(&d, 0.0, 1.0).unwrap().len(), 4900);
        let d = pairwise_distances(&unit_grid(2, 2)).unwrap();
        let adj = adjacency_from_distances(&d, 0.0, 1.5).unwrap();
        assert_eq!(adj.len(), 6);
        assert!(adj.contains(3, 0) && adj.contains(0, 3));
        assert!(!adj.contains(1, 1));
        assert!(matches!(adjacency_from_distances(&d, 1.0, 1.0), Err(Error::Interval { .. })));
        assert!(matches!(adjacency_from_distances(&d, -1.0, 1.0), Err(Error::Interval { .. })));
    }

    #[test]
    fn distance_classes_on_grids() {
        let d = pairwise_distances(&unit_grid(2, 2)).unwrap();
        let cl = build_distance_classes(&d, &[0.0, 1.0, 2.0]).unwrap();
        assert_eq!(cl.counts(), vec![4, 2]);

        let d = pairwise_distances(&unit_grid(50, 50)).unwrap();
        let diag = 50f64 * 2f64.sqrt();
        let cl = build_distance_classes(&d, &[0.0, 2.0, 4.0, 10.0, diag]).unwrap();
        assert_eq!(cl.len(), 4);
        assert_eq!(cl.total(), 2500 * 2499 / 2);
        let single = build_distance_classes(&d, &[0.0, diag]).unwrap();
        assert_eq!(single.counts(), vec![2500 * 2499 / 2]);
    }

    #[test]
    fn break_errors() {
        let d = pairwise_distances(&unit_grid(3, 3)).unwrap();
        assert!(matches!(build_distance_classes(&d, &[0.0, 2.0, 1.0, 5.0]), Err(Error::Breaks(_))));
        assert!(matches!(build_distance_classes(&d, &[1.0, 5.0]), Err(Error::Breaks(_))));
        assert!(matches!(build_distance_classes(&d, &[0.0, 2.0]), Err(Error::Coverage { .. })));
    }

    #[test]
    fn coincident_points_are_never_paired() {
        let cc: UnitCoordinates = vec![Point::new(1.0, 1.0), Point::new(1.0, 1.0), Point::new(2.0, 1.0)].into();
        let d = pairwise_distances(&cc).unwrap();
        let adj = adjacency_from_distances(&d, 0.0, 10.0).unwrap();
        assert_eq!(adj.pairs(), &[(0, 2), (1, 2)]);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn rook_pair_formula(rows in 1usize..9, cols in 1usize..9) {
                prop_assume!(rows * cols >= 2);
                let d = pairwise_distances(&unit_grid(rows, cols)).unwrap();
                let adj = adjacency_from_distances(&d, 0.0, 1.0).unwrap();
                prop_assert_eq!(adj.len(), rows * (cols - 1) + cols * (rows - 1));
            }

            #[test]
            fn classes_partition_pairs(rows in 1usize..7, cols in 2usize..7,
                                       cuts in proptest::collection::btree_set(1u32..80, 0..5)) {
                let d = pairwise_distances(&unit_grid(rows, cols)).unwrap();
                let mut breaks = vec![0.0];
                breaks.extend(cuts.iter().map(|&c| c as f64 / 10.0));
                breaks.push(d.max().max(10.0));
                let cl = build_distance_classes(&d, &breaks).unwrap();
                prop_assert_eq!(cl.total(), pair_count(rows * cols));
                for (u, v, dist) in d.iter() {
                    let owners: Vec<usize> = cl.classes().iter().enumerate()
                        .filter(|(_, c)| c.contains(u, v)).map(|(k, _)| k).collect();
                    prop_assert_eq!(owners.len(), 1);
                    let k = owners[0];
                    prop_assert!(dist > breaks[k] && dist <= breaks[k + 1]);
                }
            }

            #[test]
            fn interval_is_set_difference(d0 in 0.0f64..3.0, width in 0.1f64..3.0) {
                let d = pairwise_distances(&unit_grid(5, 4)).unwrap();
                let d1 = d0 + width;
                let mid = adjacency_from_distances(&d, d0, d1).unwrap();
                let outer = adjacency_from_distances(&d, 0.0, d1).unwrap();
                let expected: Vec<(u32, u32)> = if d0 > 0.0 {
                    let inner = adjacency_from_distances(&d, 0.0, d0).unwrap();
                    outer.pairs().iter().filter(|p| !inner.contains(p.0 as usize, p.1 as usize)).copied().collect()
                } else {
                    outer.pairs().to_vec()
                };
                prop_assert_eq!(mid.pairs(), expected.as_slice());
            }
        }
    }
}

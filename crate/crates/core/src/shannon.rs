//! Non-spatial entropy: plug-in pmf, Shannon entropy and its second
//! information moment, and frequency tables of the co-occurrence variable Z.
//!
//! All logarithms are natural, so entropies are in nats. Terms with zero
//! probability contribute zero.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::AdjacencyStructure;
use crate::model::CategoricalData;

/// Tolerance on `sum(p) = 1` for probability vectors.
pub const PROB_TOLERANCE: f64 = 1e-12;

/// `sum p log(1/p)` over the positive entries.
pub fn entropy(probs: &[f64]) -> f64 {
    probs.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum::<f64>() + 0.0
}

/// `sum p log(1/p)^2` over the positive entries.
pub fn entropy_second_moment(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| {
            let info = -p.ln();
            p * info * info
        })
        .sum::<f64>()
        + 0.0
}

/// Labeled probability mass function.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbVector {
    categories: Vec<String>,
    probs: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    n: Option<u64>,
}

impl ProbVector {
    pub fn new(categories: Vec<String>, probs: Vec<f64>) -> Result<Self> {
        if categories.len() != probs.len() {
            return Err(Error::Dimension(format!(
                "{} categories but {} probabilities",
                categories.len(),
                probs.len()
            )));
        }
        if probs.is_empty() {
            return Err(Error::Estimation("empty probability vector".into()));
        }
        if probs.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(Error::Estimation("probabilities must be finite and non-negative".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PROB_TOLERANCE {
            return Err(Error::Estimation(format!("probabilities sum to {total}, expected 1")));
        }
        Ok(Self { categories, probs, n: None })
    }

    /// Unlabeled vector; categories are named by 1-based position.
    pub fn from_probs(probs: &[f64]) -> Result<Self> {
        let names = (1..=probs.len()).map(|i| i.to_string()).collect();
        Self::new(names, probs.to_vec())
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Sample size the proportions were estimated from, if known.
    pub fn n(&self) -> Option<u64> {
        self.n
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyEstimate {
    /// Entropy in nats.
    pub value: f64,
    /// `sum p log(1/p)^2`, when computed.
    pub second_moment: Option<f64>,
    /// `second_moment - value^2`, when computed.
    pub variance: Option<f64>,
    pub n: Option<u64>,
}

/// Observed proportions `n_i / n`; declared-but-absent categories get 0.
pub fn estimate_pmf(values: &CategoricalData) -> Result<ProbVector> {
    if values.is_empty() {
        return Err(Error::Estimation("cannot estimate a pmf from no observations".into()));
    }
    let n = values.len() as u64;
    let probs = values.counts().iter().map(|&c| c as f64 / n as f64).collect();
    Ok(ProbVector { categories: values.categories().to_vec(), probs, n: Some(n) })
}

pub fn shannon_entropy(p: &ProbVector) -> EntropyEstimate {
    EntropyEstimate { value: entropy(&p.probs), second_moment: None, variance: None, n: p.n }
}

/// Entropy together with its second information moment and the plug-in
/// variance `H2 - H^2`.
///
/// The variance carries no `1/n` factor, so it does not shrink with the
/// sample size; it is the variance of the information function under `p`.
pub fn shannon_squared(p: &ProbVector) -> EntropyEstimate {
    let h = entropy(&p.probs);
    let h2 = entropy_second_moment(&p.probs);
    EntropyEstimate { value: h, second_moment: Some(h2), variance: Some((h2 - h * h).max(0.0)), n: p.n }
}

/// One category of Z: a couple (ordered) or pair (unordered) of X labels.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZRow {
    pub first: String,
    pub second: String,
    pub count: u64,
    pub proportion: f64,
}

/// Absolute counts over the full category space of Z.
///
/// Ordered tables index `(i, j)` as `i * I + j`; unordered tables list
/// `{i, j}` with `i <= j` in lexicographic order of `(i, j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFrequencyTable {
    ordered: bool,
    categories: Vec<String>,
    counts: Vec<u64>,
    total: u64,
}

/// Size of Z's category space for `i` categories of X.
pub fn z_space_size(i: usize, ordered: bool) -> usize {
    if ordered {
        i * i
    } else {
        i * (i + 1) / 2
    }
}

impl PairFrequencyTable {
    pub(crate) fn from_square(square: Vec<u64>, categories: Vec<String>, ordered: bool) -> Self {
        let i = categories.len();
        let counts = if ordered {
            square
        } else {
            let mut out = Vec::with_capacity(z_space_size(i, false));
            for a in 0..i {
                out.push(square[a * i + a]);
                for b in a + 1..i {
                    out.push(square[a * i + b] + square[b * i + a]);
                }
            }
            out
        };
        let total = counts.iter().sum();
        Self { ordered, categories, counts, total }
    }

    /// Table from counts already laid out in Z order (see type docs).
    pub fn from_counts(categories: Vec<String>, counts: Vec<u64>, ordered: bool) -> Result<Self> {
        let r = z_space_size(categories.len(), ordered);
        if counts.len() != r {
            return Err(Error::Dimension(format!("{} counts for a Z space of size {r}", counts.len())));
        }
        let total = counts.iter().sum();
        Ok(Self { ordered, categories, counts, total })
    }

    pub fn ordered(&self) -> bool {
        self.ordered
    }

    /// Categories of X the table was built over.
    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    /// R, the number of categories of Z.
    pub fn space_size(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total pair count Q.
    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn proportions(&self) -> Vec<f64> {
        if self.total == 0 {
            return vec![0.0; self.counts.len()];
        }
        let q = self.total as f64;
        self.counts.iter().map(|&c| c as f64 / q).collect()
    }

    /// Label indices `(first, second)` for each Z category, in table order.
    pub fn z_categories(&self) -> Vec<(usize, usize)> {
        let i = self.categories.len();
        if self.ordered {
            (0..i).flat_map(|a| (0..i).map(move |b| (a, b))).collect()
        } else {
            (0..i).flat_map(|a| (a..i).map(move |b| (a, b))).collect()
        }
    }

    pub fn rows(&self) -> Vec<ZRow> {
        self.z_categories()
            .into_iter()
            .zip(self.counts.iter().zip(self.proportions()))
            .map(|((a, b), (&count, proportion))| ZRow {
                first: self.categories[a].clone(),
                second: self.categories[b].clone(),
                count,
                proportion,
            })
            .collect()
    }

    /// Count of the couple or pair `(a, b)` by label.
    pub fn count_of(&self, a: &str, b: &str) -> u64 {
        let pos = |l: &str| self.categories.iter().position(|c| c == l);
        let (Some(ia), Some(ib)) = (pos(a), pos(b)) else { return 0 };
        let key = if self.ordered || ia <= ib { (ia, ib) } else { (ib, ia) };
        self.z_categories()
            .iter()
            .position(|&z| z == key)
            .map_or(0, |r| self.counts[r])
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.proportions())
    }
}

const CHUNK: usize = 1 << 16;

/// Ordered `I x I` tally of `(code[u], code[v])` over the given pairs.
pub(crate) fn tally_couples(codes: &[u32], n_categories: usize, pairs: &[(u32, u32)]) -> Vec<u64> {
    let width = n_categories;
    pairs
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut local = vec![0u64; width * width];
            for &(u, v) in chunk {
                local[codes[u as usize] as usize * width + codes[v as usize] as usize] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; width * width],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}

fn table_from_adjacency(values: &CategoricalData, adj: &AdjacencyStructure, ordered: bool) -> Result<PairFrequencyTable> {
    if adj.n() != values.len() {
        return Err(Error::Mismatch { data: values.len(), structure: adj.n() });
    }
    if adj.is_empty() {
        return Err(Error::NoPairs);
    }
    let square = tally_couples(values.codes(), values.n_categories(), adj.pairs());
    Ok(PairFrequencyTable::from_square(square, values.categories().to_vec(), ordered))
}

/// Ordered couples `(label(u), label(v))` for every selected pair `u < v`.
/// On a grid the second unit lies to the right of or below the first.
pub fn couple_frequencies(values: &CategoricalData, adj: &AdjacencyStructure) -> Result<PairFrequencyTable> {
    table_from_adjacency(values, adj, true)
}

/// Unordered pairs `{label(u), label(v)}` for every selected pair.
pub fn pair_frequencies(values: &CategoricalData, adj: &AdjacencyStructure) -> Result<PairFrequencyTable> {
    table_from_adjacency(values, adj, false)
}

/// Pair table and entropy of Z over all unordered pairs of units.
#[derive(Debug, Clone, PartialEq)]
pub struct ShannonZ {
    pub table: PairFrequencyTable,
    pub entropy: EntropyEstimate,
}

/// H(Z) over all `n(n-1)/2` unordered pairs. Counts follow from the
/// category counts alone: `n_i(n_i-1)/2` for `{i, i}` and `n_i n_j` for
/// `{i, j}`.
pub fn shannon_z(values: &CategoricalData) -> Result<ShannonZ> {
    let n = values.len();
    if n < 2 {
        return Err(Error::InsufficientUnits(n));
    }
    let counts = values.counts();
    let i = counts.len();
    let mut z = Vec::with_capacity(z_space_size(i, false));
    for a in 0..i {
        z.push(counts[a] * counts[a].saturating_sub(1) / 2);
        for b in a + 1..i {
            z.push(counts[a] * counts[b]);
        }
    }
    let total = z.iter().sum();
    let table = PairFrequencyTable { ordered: false, categories: values.categories().to_vec(), counts: z, total };
    let entropy = EntropyEstimate { value: table.entropy(), second_moment: None, variance: None, n: Some(total) };
    Ok(ShannonZ { table, entropy })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{adjacency_from_distances, pairwise_distances};
    use crate::model::CategoricalGrid;
    use approx::assert_abs_diff_eq;

    fn labels(v: &[&str]) -> CategoricalData {
        CategoricalData::from_labels(v.iter().copied(), None).unwrap()
    }

    fn checker() -> CategoricalGrid {
        CategoricalGrid::from_matrix(&[vec!["a", "b"], vec!["b", "a"]], None, None).unwrap()
    }

    #[test]
    fn pmf_estimation() {
        let p = estimate_pmf(&labels(&["0", "1", "1", "1"])).unwrap();
        assert_eq!(p.probs(), &[0.25, 0.75]);
        let decl: Vec<String> = ["a", "b", "c"].iter().map(|s| s.to_string()).collect();
        let only_a = CategoricalData::from_labels(["a", "a"], Some(&decl)).unwrap();
        assert_eq!(estimate_pmf(&only_a).unwrap().probs(), &[1.0, 0.0, 0.0]);
        let empty = CategoricalData::from_labels(Vec::<&str>::new(), None).unwrap();
        assert!(matches!(estimate_pmf(&empty), Err(Error::Estimation(_))));
    }

    #[test]
    fn printed_entropies() {
        let bo = ProbVector::from_probs(&[0.5178777, 0.4821223]).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&bo).value, 0.6925078, epsilon = 1e-7);
        assert_abs_diff_eq!(shannon_squared(&bo).variance.unwrap(), 0.001277909, epsilon = 1e-6);

        let tree = ProbVector::from_probs(&[0.19374369, 0.06205853, 0.02320888, 0.72098890]).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&tree).value, 0.8136769, epsilon = 1e-7);
        assert_abs_diff_eq!(shannon_squared(&tree).variance.unwrap(), 0.7451366, epsilon = 1e-6);

        let half = ProbVector::from_probs(&[0.5, 0.5]).unwrap();
        assert_abs_diff_eq!(shannon_entropy(&half).value, 2f64.ln(), epsilon = 1e-15);
        assert_abs_diff_eq!(shannon_squared(&half).variance.unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn prob_vector_validation() {
        assert!(ProbVector::from_probs(&[0.5, 0.6]).is_err());
        assert!(ProbVector::from_probs(&[-0.5, 1.5]).is_err());
        assert!(ProbVector::new(vec!["a".into()], vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn checkerboard_couples_and_pairs() {
        let g = checker();
        let d = pairwise_distances(&g.pixel_centroids()).unwrap();
        let contig = adjacency_from_distances(&d, 0.0, 1.0).unwrap();
        let t = couple_frequencies(g.values(), &contig).unwrap();
        assert_eq!(t.count_of("a", "b"), 2);
        assert_eq!(t.count_of("b", "a"), 2);
        assert_eq!(t.total(), 4);
        assert_eq!(t.space_size(), 4);

        let p = pair_frequencies(g.values(), &contig).unwrap();
        assert_eq!(p.counts(), &[0, 4, 0]);
        assert_eq!(p.space_size(), 3);

        let all = adjacency_from_distances(&d, 0.0, 1.5).unwrap();
        let p = pair_frequencies(g.values(), &all).unwrap();
        assert_eq!((p.count_of("a", "b"), p.count_of("a", "a"), p.count_of("b", "b")), (4, 1, 1));
    }

    #[test]
    fn constant_grid_single_couple() {
        let g = CategoricalGrid::from_matrix(&vec![vec!["x"; 4]; 3], None, None).unwrap();
        let d = pairwise_distances(&g.pixel_centroids()).unwrap();
        let t = couple_frequencies(g.values(), &adjacency_from_distances(&d, 0.0, 1.0).unwrap()).unwrap();
        assert_eq!(t.proportions(), vec![1.0]);
        assert_eq!(t.total(), 17);
    }

    #[test]
    fn empty_adjacency_is_an_error() {
        let g = checker();
        let d = pairwise_distances(&g.pixel_centroids()).unwrap();
        let none = adjacency_from_distances(&d, 0.0, 0.5).unwrap();
        assert!(matches!(couple_frequencies(g.values(), &none), Err(Error::NoPairs)));
        let short = labels(&["a", "b"]);
        assert!(matches!(pair_frequencies(&short, &none), Err(Error::Mismatch { .. })));
    }

    #[test]
    fn shannon_z_small_cases() {
        let z = shannon_z(&labels(&["a", "a", "b"])).unwrap();
        assert_eq!(z.table.counts(), &[1, 2, 0]);
        let expected = (1.0 / 3.0) * 3f64.ln() + (2.0 / 3.0) * 1.5f64.ln();
        assert_abs_diff_eq!(z.entropy.value, expected, epsilon = 1e-15);
        assert_eq!(shannon_z(&labels(&["q"; 5])).unwrap().entropy.value, 0.0);
        assert!(matches!(shannon_z(&labels(&["a"])), Err(Error::InsufficientUnits(1))));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn grid_strategy() -> impl Strategy<Value = CategoricalGrid> {
            (1usize..6, 2usize..6, 1u32..4).prop_flat_map(|(r, c, k)| {
                proptest::collection::vec(0..k, r * c).prop_map(move |cells| {
                    let m: Vec<Vec<String>> =
                        cells.chunks(c).map(|row| row.iter().map(|v| format!("c{v}")).collect()).collect();
                    CategoricalGrid::from_matrix(&m, None, None).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn entropy_bounds_and_variance(weights in proptest::collection::vec(0u32..50, 1..8)) {
                prop_assume!(weights.iter().any(|&w| w > 0));
                let total: u32 = weights.iter().sum();
                let probs: Vec<f64> = weights.iter().map(|&w| w as f64 / total as f64).collect();
                let p = ProbVector::from_probs(&probs).unwrap();
                let e = shannon_squared(&p);
                prop_assert!(e.value >= 0.0);
                prop_assert!(e.value <= (probs.len() as f64).ln() + 1e-12);
                prop_assert!(e.variance.unwrap() >= 0.0);
                let positive: Vec<u32> = weights.iter().copied().filter(|&w| w > 0).collect();
                if positive.iter().all(|&w| w == positive[0]) {
                    prop_assert!(e.variance.unwrap() < 1e-12);
                }
            }

            #[test]
            fn entropy_is_permutation_invariant(probs in proptest::collection::vec(1u32..30, 2..7), rot in 0usize..7) {
                let total: u32 = probs.iter().sum();
                let p: Vec<f64> = probs.iter().map(|&w| w as f64 / total as f64).collect();
                let mut q = p.clone();
                q.rotate_left(rot % p.len());
                prop_assert!((entropy(&p) - entropy(&q)).abs() < 1e-12);
            }

            #[test]
            fn couples_collapse_to_pairs(g in grid_strategy(), d1 in 1.0f64..4.0) {
                let d = pairwise_distances(&g.pixel_centroids()).unwrap();
                let adj = adjacency_from_distances(&d, 0.0, d1).unwrap();
                let couples = couple_frequencies(g.values(), &adj).unwrap();
                let pairs = pair_frequencies(g.values(), &adj).unwrap();
                prop_assert_eq!(couples.total() as usize, adj.len());
                let cats = g.values().categories();
                for (i, a) in cats.iter().enumerate() {
                    for b in &cats[i..] {
                        let merged = if a == b { couples.count_of(a, a) }
                                     else { couples.count_of(a, b) + couples.count_of(b, a) };
                        prop_assert_eq!(merged, pairs.count_of(a, b));
                    }
                }
                prop_assert!(couples.entropy() <= (couples.space_size() as f64).ln() + 1e-12);
                prop_assert!(pairs.entropy() <= (pairs.space_size() as f64).ln() + 1e-12);
            }
        }
    }
}

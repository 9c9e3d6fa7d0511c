//! Entropy of the co-occurrence variable Z restricted to an adjacency
//! structure: O'Neill (contiguous ordered couples), Leibovici (couples or
//! pairs within a distance), and the contagion indices derived from them.

use crate::error::{Error, Result};
use crate::geometry::{adjacency_from_distances, AdjacencyStructure, DistanceMatrix};
use crate::model::{CategoricalData, CategoricalGrid};
use crate::shannon::{couple_frequencies, pair_frequencies, EntropyEstimate, PairFrequencyTable};

/// Slack when checking an entropy against its theoretical maximum.
const BOUND_SLACK: f64 = 1e-9;

/// Shannon entropy of the proportions in `table`.
pub fn conditional_entropy_z(table: &PairFrequencyTable) -> Result<EntropyEstimate> {
    if table.total() == 0 {
        return Err(Error::NoPairs);
    }
    Ok(EntropyEstimate { value: table.entropy(), second_moment: None, variance: None, n: Some(table.total()) })
}

/// `1 - H / log(I^2)`.
pub fn relative_contagion(entropy: f64, n_cat: usize) -> Result<f64> {
    if n_cat < 2 {
        return Err(Error::Argument(format!("relative contagion needs at least 2 categories, got {n_cat}")));
    }
    let max = ((n_cat * n_cat) as f64).ln();
    if entropy < 0.0 || entropy > max + BOUND_SLACK {
        return Err(Error::Inconsistency { entropy, n_cat });
    }
    Ok(1.0 - entropy / max)
}

/// Parresol–Edwards index, `-H`.
pub fn parresol_edwards(entropy: f64) -> Result<f64> {
    if entropy < 0.0 {
        return Err(Error::Argument(format!("entropy must be non-negative, got {entropy}")));
    }
    Ok(-entropy)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CooccurrenceEntropy {
    pub entropy: EntropyEstimate,
    pub table: PairFrequencyTable,
}

impl CooccurrenceEntropy {
    /// Number of categories of X the table was built over.
    pub fn n_categories(&self) -> usize {
        self.table.categories().len()
    }

    pub fn relative_contagion(&self) -> Result<f64> {
        relative_contagion(self.entropy.value, self.n_categories())
    }

    pub fn parresol_edwards(&self) -> Result<f64> {
        parresol_edwards(self.entropy.value)
    }
}

/// Entropy of Z over the pairs of `adj`, as couples or pairs.
pub fn cooccurrence_entropy(values: &CategoricalData, adj: &AdjacencyStructure, ordered: bool) -> Result<CooccurrenceEntropy> {
    let table = if ordered { couple_frequencies(values, adj)? } else { pair_frequencies(values, adj)? };
    let entropy = conditional_entropy_z(&table)?;
    Ok(CooccurrenceEntropy { entropy, table })
}

/// Leibovici entropy: couples (or pairs) at any distance in `(0, d]`.
/// `missing` lists categories absent from the data that still count
/// towards the category space.
pub fn leibovici(
    values: &CategoricalData,
    dmat: &DistanceMatrix,
    d: f64,
    ordered: bool,
    missing: &[String],
) -> Result<CooccurrenceEntropy> {
    if !(d > 0.0) {
        return Err(Error::Interval { d0: 0.0, d1: d });
    }
    let adj = adjacency_from_distances(dmat, 0.0, d)?;
    let values = values.with_extra_categories(missing);
    cooccurrence_entropy(&values, &adj, ordered)
}

/// O'Neill entropy of a grid: ordered couples of pixels sharing a border.
pub fn oneill(grid: &CategoricalGrid, dmat: &DistanceMatrix, missing: &[String]) -> Result<CooccurrenceEntropy> {
    leibovici(grid.values(), dmat, grid.pixel_width(), true, missing)
}

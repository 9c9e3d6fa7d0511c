//! Single-dataset analysis context that computes unit coordinates and the
//! distance matrix at most once and reuses them for every measure.

use std::cell::OnceCell;

use crate::cooccurrence::{leibovici, CooccurrenceEntropy};
use crate::decomposition::{default_breaks, spatial_decomposition, DecompositionResult};
use crate::error::{Error, Result};
use crate::geometry::{build_distance_classes, pairwise_distances, DistanceMatrix};
use crate::model::{CategoricalData, SpatialData, UnitCoordinates};
use crate::shannon::{shannon_z, ShannonZ};

pub struct Analysis {
    data: SpatialData,
    coords: OnceCell<UnitCoordinates>,
    dmat: OnceCell<DistanceMatrix>,
}

impl Analysis {
    pub fn new(data: SpatialData) -> Self {
        Self { data, coords: OnceCell::new(), dmat: OnceCell::new() }
    }

    pub fn data(&self) -> &SpatialData {
        &self.data
    }

    pub fn values(&self) -> &CategoricalData {
        self.data.values()
    }

    pub fn coordinates(&self) -> &UnitCoordinates {
        self.coords.get_or_init(|| self.data.coordinates())
    }

    pub fn distances(&self) -> Result<&DistanceMatrix> {
        if let Some(d) = self.dmat.get() {
            return Ok(d);
        }
        let d = pairwise_distances(self.coordinates())?;
        Ok(self.dmat.get_or_init(|| d))
    }

    pub fn shannon_z(&self) -> Result<ShannonZ> {
        shannon_z(self.values())
    }

    pub fn leibovici(&self, d: f64, ordered: bool, missing: &[String]) -> Result<CooccurrenceEntropy> {
        leibovici(self.values(), self.distances()?, d, ordered, missing)
    }

    /// O'Neill entropy; only defined for lattice data.
    pub fn oneill(&self, missing: &[String]) -> Result<CooccurrenceEntropy> {
        match &self.data {
            SpatialData::Grid(g) => self.leibovici(g.pixel_width(), true, missing),
            SpatialData::Points(_) => {
                Err(Error::Argument("O'Neill entropy needs lattice data; use leibovici for points".into()))
            }
        }
    }

    pub fn default_breaks(&self) -> Vec<f64> {
        default_breaks(self.data.window())
    }

    /// Decomposition over `breaks`, or the window-based default breaks.
    pub fn decompose(&self, breaks: Option<&[f64]>, missing: &[String]) -> Result<DecompositionResult> {
        let owned;
        let breaks = match breaks {
            Some(b) => b,
            None => {
                owned = self.default_breaks();
                &owned
            }
        };
        let classes = build_distance_classes(self.distances()?, breaks)?;
        spatial_decomposition(&self.values().with_extra_categories(missing), &classes)
    }
}

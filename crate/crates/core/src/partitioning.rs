//! Partition of the observation window into sub-areas around centroids.
//!
//! Units go to the nearest centroid (ties to the lowest area id). For
//! lattice data a sub-area's size is its pixel count times the pixel area;
//! for point data it is the Voronoi cell area of the centroid within the
//! window, estimated on a `resolution x resolution` raster.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CategoricalData, CategoricalGrid, MarkedPointPattern, Point, UnitCoordinates, Window};
use crate::synth::{stream_rng, Stream};

/// Default raster resolution for point-mode area sizes.
pub const DEFAULT_RESOLUTION: usize = 500;

/// `g` centroids uniform over the window.
pub fn random_centroids(window: &Window, g: usize, seed: u64) -> Result<Vec<Point>> {
    if g < 1 {
        return Err(Error::Argument("number of sub-areas must be at least 1".into()));
    }
    let mut rng = stream_rng(seed, Stream::Centroids);
    Ok((0..g)
        .map(|_| {
            Point::new(
                rng.random_range(window.x_min..=window.x_max),
                rng.random_range(window.y_min..=window.y_max),
            )
        })
        .collect())
}

#[inline]
fn nearest(p: &Point, centroids: &[Point]) -> usize {
    let mut best = 0;
    let mut best_d = p.dist_sq(&centroids[0]);
    for (g, c) in centroids.iter().enumerate().skip(1) {
        let d = p.dist_sq(c);
        if d < best_d {
            best = g;
            best_d = d;
        }
    }
    best
}

/// 0-based sub-area index of the nearest centroid for every unit.
pub fn assign_nearest(coords: &UnitCoordinates, centroids: &[Point]) -> Result<Vec<usize>> {
    if centroids.is_empty() {
        return Err(Error::Argument("at least one centroid is required".into()));
    }
    Ok(coords.as_slice().par_iter().map(|p| nearest(p, centroids)).collect())
}

/// Pixel count per sub-area times the pixel area.
pub fn lattice_sizes(assignment: &[usize], g: usize, pixel_area: f64) -> Vec<f64> {
    let mut counts = vec![0usize; g];
    for &a in assignment {
        counts[a] += 1;
    }
    counts.into_iter().map(|c| c as f64 * pixel_area).collect()
}

/// Voronoi cell areas of `centroids` clipped to the window, by nearest-centroid
/// counting over raster cell centres.
pub fn voronoi_sizes(window: &Window, centroids: &[Point], resolution: usize) -> Result<Vec<f64>> {
    if centroids.is_empty() {
        return Err(Error::Argument("at least one centroid is required".into()));
    }
    if resolution == 0 {
        return Err(Error::Argument("raster resolution must be positive".into()));
    }
    let g = centroids.len();
    let dx = window.width() / resolution as f64;
    let dy = window.height() / resolution as f64;
    let counts = (0..resolution)
        .into_par_iter()
        .map(|r| {
            let y = window.y_min + (r as f64 + 0.5) * dy;
            let mut local = vec![0u64; g];
            for c in 0..resolution {
                let p = Point::new(window.x_min + (c as f64 + 0.5) * dx, y);
                local[nearest(&p, centroids)] += 1;
            }
            local
        })
        .reduce(
            || vec![0u64; g],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let cell = dx * dy;
    Ok(counts.into_iter().map(|c| c as f64 * cell).collect())
}

/// Assignment of units to sub-areas, with sub-area sizes T_g.
#[derive(Debug, Clone, PartialEq)]
pub struct AreaPartition {
    centroids: Vec<Point>,
    assignment: Vec<usize>,
    sizes: Vec<f64>,
}

impl AreaPartition {
    pub fn new(centroids: Vec<Point>, assignment: Vec<usize>, sizes: Vec<f64>) -> Result<Self> {
        let g = centroids.len();
        if g == 0 || sizes.len() != g {
            return Err(Error::Dimension(format!("{g} centroids but {} sizes", sizes.len())));
        }
        if let Some(&bad) = assignment.iter().find(|&&a| a >= g) {
            return Err(Error::Dimension(format!("assignment to unknown sub-area {}", bad + 1)));
        }
        for (i, s) in sizes.iter().enumerate() {
            if *s == 0.0 {
                log::warn!("sub-area {} is empty (T_g = 0)", i + 1);
            }
        }
        Ok(Self { centroids, assignment, sizes })
    }

    /// Lattice partition: pixels assigned by centroid, sizes in pixel area.
    pub fn for_grid(grid: &CategoricalGrid, centroids: Vec<Point>) -> Result<Self> {
        let assignment = assign_nearest(&grid.pixel_centroids(), &centroids)?;
        let sizes = lattice_sizes(&assignment, centroids.len(), grid.pixel_area());
        Self::new(centroids, assignment, sizes)
    }

    /// Point partition: Dirichlet tessellation of the window.
    pub fn for_pattern(pattern: &MarkedPointPattern, centroids: Vec<Point>, resolution: usize) -> Result<Self> {
        let assignment = assign_nearest(&pattern.coordinates(), &centroids)?;
        let sizes = voronoi_sizes(pattern.window(), &centroids, resolution)?;
        Self::new(centroids, assignment, sizes)
    }

    /// Number of sub-areas, G.
    pub fn len(&self) -> usize {
        self.centroids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.centroids.is_empty()
    }

    pub fn centroids(&self) -> &[Point] {
        &self.centroids
    }

    /// 0-based sub-area index per unit.
    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn total_size(&self) -> f64 {
        self.sizes.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    /// 1-based sub-area id.
    pub area_id: usize,
    pub abs_freq: u64,
    pub rel_freq: f64,
    pub size: f64,
}

/// Occurrence of one category across the sub-areas.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartitionSummary {
    pub category: String,
    pub rows: Vec<SummaryRow>,
    /// Window size T.
    pub total_size: f64,
    #[serde(skip)]
    pub centroids: Vec<Point>,
}

impl PartitionSummary {
    pub fn rel_freqs(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rel_freq).collect()
    }

    pub fn sizes(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.size).collect()
    }
}

/// Per sub-area counts of units carrying `category`, normalised over areas.
pub fn partition_summary(
    values: &CategoricalData,
    partition: &AreaPartition,
    category: &str,
    window: &Window,
) -> Result<PartitionSummary> {
    if values.len() != partition.assignment.len() {
        return Err(Error::Mismatch { data: values.len(), structure: partition.assignment.len() });
    }
    let code = values
        .code_of(category)
        .ok_or_else(|| Error::Category(format!("category {category:?} is not a category of the data")))?;
    let mut abs = vec![0u64; partition.len()];
    for (&c, &a) in values.codes().iter().zip(&partition.assignment) {
        if c == code {
            abs[a] += 1;
        }
    }
    let total: u64 = abs.iter().sum();
    if total == 0 {
        return Err(Error::EmptyPhenomenon(category.to_string()));
    }
    let rows = abs
        .iter()
        .zip(&partition.sizes)
        .enumerate()
        .map(|(g, (&a, &size))| SummaryRow { area_id: g + 1, abs_freq: a, rel_freq: a as f64 / total as f64, size })
        .collect();
    Ok(PartitionSummary {
        category: category.to_string(),
        rows,
        total_size: window.area(),
        centroids: partition.centroids.clone(),
    })
}

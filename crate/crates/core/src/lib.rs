//! Entropy and spatial entropy measures for categorical data observed on a
//! lattice or as a marked point pattern.
//!
//! | Module | Measures |
//! |--------|----------|
//! | [`shannon`] | plug-in pmf, H(X), its variance, pair/couple tables, H(Z) |
//! | [`partition_entropy`] | Batty, Karlström–Ceccato |
//! | [`cooccurrence`] | O'Neill, Leibovici, relative contagion, Parresol–Edwards |
//! | [`decomposition`] | H(Z) = MI(Z,W) + H(Z)_W with per-distance-class terms |
//!
//! [`geometry`] and [`partitioning`] provide distances, adjacency and area
//! partitions; [`synth`] generates seeded test data; [`io`] reads and writes
//! the grid and point file formats. Entropies are in nats.

pub mod cooccurrence;
pub mod decomposition;
pub mod error;
pub mod geometry;
pub mod io;
pub mod model;
pub mod partition_entropy;
pub mod partitioning;
pub mod pipeline;
pub mod shannon;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use model::{CategoricalData, CategoricalGrid, MarkedPointPattern, Point, SpatialData, UnitCoordinates, Window};
pub use pipeline::Analysis;

//! Domain types: observation windows, categorical label vectors, lattice
//! grids and marked point patterns.
//!
//! Coordinate convention for grids: matrix row 0 is the top of the window,
//! so `y` decreases as the row index grows. Column 0 is the left edge.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    #[inline]
    pub fn dist(&self, other: &Point) -> f64 {
        self.dist_sq(other).sqrt()
    }
}

/// Rectangular observation window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Window {
    pub fn new(x_min: f64, x_max: f64, y_min: f64, y_max: f64) -> Result<Self> {
        let finite = [x_min, x_max, y_min, y_max].iter().all(|v| v.is_finite());
        if !finite || x_max <= x_min || y_max <= y_min {
            return Err(Error::Window(format!(
                "[{x_min}, {x_max}] x [{y_min}, {y_max}] is empty or not finite"
            )));
        }
        Ok(Self { x_min, x_max, y_min, y_max })
    }

    pub fn width(&self) -> f64 {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> f64 {
        self.y_max - self.y_min
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    /// Length of the window diagonal: an upper bound on any distance
    /// between two points of the window.
    pub fn diagonal(&self) -> f64 {
        self.width().hypot(self.height())
    }

    pub fn center(&self) -> Point {
        Point::new(0.5 * (self.x_min + self.x_max), 0.5 * (self.y_min + self.y_max))
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: &Point) -> bool {
        p.x >= self.x_min && p.x <= self.x_max && p.y >= self.y_min && p.y <= self.y_max
    }

    pub fn clamp(&self, p: Point) -> Point {
        Point::new(p.x.clamp(self.x_min, self.x_max), p.y.clamp(self.y_min, self.y_max))
    }

    /// Smallest window containing all points. Degenerate extents are padded
    /// by half a unit on each side.
    pub fn bounding(points: &[Point]) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let (mut x0, mut x1, mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
        for p in points {
            x0 = x0.min(p.x);
            x1 = x1.max(p.x);
            y0 = y0.min(p.y);
            y1 = y1.max(p.y);
        }
        if x1 <= x0 {
            x0 -= 0.5;
            x1 += 0.5;
        }
        if y1 <= y0 {
            y0 -= 0.5;
            y1 += 0.5;
        }
        Window::new(x0, x1, y0, y1)
    }
}

/// A vector of category labels encoded against a sorted category list.
///
/// The category list is the union of the declared categories (if any) and
/// the observed labels, in lexicographic order. Codes index into it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CategoricalData {
    categories: Vec<String>,
    codes: Vec<u32>,
}

impl CategoricalData {
    /// Encodes `labels`. When `declared` is given it must contain every
    /// observed label; declared-but-absent categories are kept.
    pub fn from_labels<I, S>(labels: I, declared: Option<&[String]>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let labels: Vec<String> = labels.into_iter().map(|s| s.as_ref().to_owned()).collect();
        let observed: BTreeSet<&str> = labels.iter().map(String::as_str).collect();
        let categories: Vec<String> = match declared {
            Some(decl) => {
                let decl: BTreeSet<&str> = decl.iter().map(String::as_str).collect();
                if let Some(missing) = observed.iter().find(|l| !decl.contains(*l)) {
                    return Err(Error::Category(format!(
                        "observed label {missing:?} is not among the declared categories"
                    )));
                }
                decl.into_iter().map(str::to_owned).collect()
            }
            None => observed.into_iter().map(str::to_owned).collect(),
        };
        let index: BTreeMap<&str, u32> =
            categories.iter().enumerate().map(|(i, c)| (c.as_str(), i as u32)).collect();
        let codes = labels.iter().map(|l| index[l.as_str()]).collect();
        Ok(Self { categories, codes })
    }

    /// Adds categories known to be possible but absent from the data.
    pub fn with_extra_categories(&self, extra: &[String]) -> Self {
        if extra.iter().all(|e| self.categories.contains(e)) {
            return self.clone();
        }
        let mut all: BTreeSet<&str> = self.categories.iter().map(String::as_str).collect();
        all.extend(extra.iter().map(String::as_str));
        let categories: Vec<String> = all.into_iter().map(str::to_owned).collect();
        let remap: Vec<u32> = self
            .categories
            .iter()
            .map(|c| categories.binary_search(c).expect("superset") as u32)
            .collect();
        let codes = self.codes.iter().map(|&c| remap[c as usize]).collect();
        Self { categories, codes }
    }

    pub fn len(&self) -> usize {
        self.codes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.codes.is_empty()
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn n_categories(&self) -> usize {
        self.categories.len()
    }

    pub fn codes(&self) -> &[u32] {
        &self.codes
    }

    pub fn label(&self, unit: usize) -> &str {
        &self.categories[self.codes[unit] as usize]
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> + '_ {
        self.codes.iter().map(|&c| self.categories[c as usize].as_str())
    }

    pub fn code_of(&self, label: &str) -> Option<u32> {
        self.categories.binary_search_by(|c| c.as_str().cmp(label)).ok().map(|i| i as u32)
    }

    /// Absolute frequency of each category, aligned with `categories()`.
    pub fn counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.categories.len()];
        for &c in &self.codes {
            counts[c as usize] += 1;
        }
        counts
    }
}

/// Representative coordinates, one per spatial unit.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitCoordinates(pub Vec<Point>);

impl UnitCoordinates {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Point] {
        &self.0
    }
}

impl From<Vec<Point>> for UnitCoordinates {
    fn from(v: Vec<Point>) -> Self {
        Self(v)
    }
}

/// An R x C matrix of category labels over a rectangular window.
#[derive(Debug, Clone, PartialEq)]
pub struct CategoricalGrid {
    rows: usize,
    cols: usize,
    window: Window,
    values: CategoricalData,
}

impl CategoricalGrid {
    /// Builds a grid from a row-major label matrix. Without a window the grid
    /// covers `[0, cols] x [0, rows]` with unit pixels.
    pub fn from_matrix<S: AsRef<str>>(
        matrix: &[Vec<S>],
        window: Option<Window>,
        categories: Option<&[String]>,
    ) -> Result<Self> {
        let rows = matrix.len();
        let cols = matrix.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(Error::Dimension("label matrix is empty".into()));
        }
        if let Some((r, row)) = matrix.iter().enumerate().find(|(_, row)| row.len() != cols) {
            return Err(Error::Dimension(format!(
                "row {} has {} columns, expected {cols}",
                r + 1,
                row.len()
            )));
        }
        let values = CategoricalData::from_labels(matrix.iter().flatten(), categories)?;
        Self::from_data(rows, cols, values, window)
    }

    /// Builds a grid from already-encoded row-major values.
    pub fn from_data(rows: usize, cols: usize, values: CategoricalData, window: Option<Window>) -> Result<Self> {
        if rows == 0 || cols == 0 || values.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} values do not fill a {rows}x{cols} grid",
                values.len()
            )));
        }
        let window = match window {
            Some(w) => w,
            None => Window::new(0.0, cols as f64, 0.0, rows as f64)?,
        };
        Ok(Self { rows, cols, window, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn values(&self) -> &CategoricalData {
        &self.values
    }

    pub fn pixel_width(&self) -> f64 {
        self.window.width() / self.cols as f64
    }

    pub fn pixel_height(&self) -> f64 {
        self.window.height() / self.rows as f64
    }

    pub fn pixel_area(&self) -> f64 {
        self.pixel_width() * self.pixel_height()
    }

    /// Label at 0-based matrix position `(r, c)`.
    pub fn get(&self, r: usize, c: usize) -> &str {
        self.values.label(r * self.cols + c)
    }

    /// Centroid of 0-based matrix cell `(r, c)`.
    pub fn cell_centroid(&self, r: usize, c: usize) -> Point {
        Point::new(
            self.window.x_min + (c as f64 + 0.5) * self.pixel_width(),
            self.window.y_max - (r as f64 + 0.5) * self.pixel_height(),
        )
    }

    /// Pixel centroids in row-major order.
    pub fn pixel_centroids(&self) -> UnitCoordinates {
        let mut pts = Vec::with_capacity(self.rows * self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                pts.push(self.cell_centroid(r, c));
            }
        }
        UnitCoordinates(pts)
    }

    /// Inverse of `cell_centroid`: the 0-based cell containing `p`.
    pub fn cell_at(&self, p: &Point) -> Option<(usize, usize)> {
        if !self.window.contains(p) {
            return None;
        }
        let c = ((p.x - self.window.x_min) / self.pixel_width()).floor() as usize;
        let r = ((self.window.y_max - p.y) / self.pixel_height()).floor() as usize;
        Some((r.min(self.rows - 1), c.min(self.cols - 1)))
    }
}

/// Points with categorical marks inside a rectangular window.
#[derive(Debug, Clone, PartialEq)]
pub struct MarkedPointPattern {
    points: Vec<Point>,
    window: Window,
    marks: CategoricalData,
}

impl MarkedPointPattern {
    pub fn from_records<S: AsRef<str>>(
        records: &[(f64, f64, S)],
        window: Window,
        categories: Option<&[String]>,
    ) -> Result<Self> {
        if records.is_empty() {
            return Err(Error::EmptyPattern);
        }
        let points: Vec<Point> = records.iter().map(|(x, y, _)| Point::new(*x, *y)).collect();
        let marks = CategoricalData::from_labels(records.iter().map(|r| r.2.as_ref()), categories)?;
        Self::from_parts(points, marks, window)
    }

    pub fn from_parts(points: Vec<Point>, marks: CategoricalData, window: Window) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPattern);
        }
        if points.len() != marks.len() {
            return Err(Error::Dimension(format!("{} points but {} marks", points.len(), marks.len())));
        }
        if let Some((index, p)) = points.iter().enumerate().find(|(_, p)| !window.contains(p)) {
            return Err(Error::Containment { index: index + 1, x: p.x, y: p.y });
        }
        Ok(Self { points, window, marks })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn marks(&self) -> &CategoricalData {
        &self.marks
    }

    pub fn coordinates(&self) -> UnitCoordinates {
        UnitCoordinates(self.points.clone())
    }
}

/// Either form of spatial categorical data, for code paths that accept both.
#[derive(Debug, Clone, PartialEq)]
pub enum SpatialData {
    Grid(CategoricalGrid),
    Points(MarkedPointPattern),
}

impl SpatialData {
    pub fn values(&self) -> &CategoricalData {
        match self {
            SpatialData::Grid(g) => g.values(),
            SpatialData::Points(p) => p.marks(),
        }
    }

    pub fn window(&self) -> &Window {
        match self {
            SpatialData::Grid(g) => g.window(),
            SpatialData::Points(p) => p.window(),
        }
    }

    pub fn coordinates(&self) -> UnitCoordinates {
        match self {
            SpatialData::Grid(g) => g.pixel_centroids(),
            SpatialData::Points(p) => p.coordinates(),
        }
    }

    pub fn is_lattice(&self) -> bool {
        matches!(self, SpatialData::Grid(_))
    }
}

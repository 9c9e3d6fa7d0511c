//! Text formats for grids, point patterns and centroid lists.
//!
//! Grids are one matrix row per line, first line = top row, labels separated
//! by whitespace (`ascii`) or commas (`csv`). Optional leading directives:
//!
//! ```text
//! # window 0 50 0 50
//! # categories 0,1,2
//! ```
//!
//! Point files are CSV with an `x,y,mark` header and the same optional
//! directives before it. `write_*` output is canonical: both directives are
//! always emitted, so writing a parsed canonical file reproduces it byte for
//! byte.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::model::{CategoricalData, CategoricalGrid, MarkedPointPattern, Point, Window};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum GridFormat {
    #[default]
    Ascii,
    Csv,
}

impl FromStr for GridFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ascii" | "ascii-grid" => Ok(GridFormat::Ascii),
            "csv" => Ok(GridFormat::Csv),
            other => Err(Error::Argument(format!("unknown grid format {other:?}"))),
        }
    }
}

#[derive(Debug, Default)]
struct Directives {
    window: Option<Window>,
    categories: Option<Vec<String>>,
}

fn parse_error(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_directive(d: &mut Directives, body: &str, line: usize) -> Result<()> {
    let mut parts = body.split_whitespace();
    match parts.next() {
        Some("window") => {
            let nums: Vec<f64> = parts
                .map(|t| t.parse::<f64>().map_err(|_| parse_error(line, format!("bad window value {t:?}"))))
                .collect::<Result<_>>()?;
            if nums.len() != 4 {
                return Err(parse_error(line, "window needs x_min x_max y_min y_max"));
            }
            let w = Window::new(nums[0], nums[1], nums[2], nums[3]).map_err(|e| parse_error(line, e.to_string()))?;
            d.window = Some(w);
        }
        Some("categories") => {
            let rest: String = parts.collect::<Vec<_>>().join(" ");
            let cats: Vec<String> =
                rest.split(',').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
            if cats.is_empty() {
                return Err(parse_error(line, "empty category list"));
            }
            d.categories = Some(cats);
        }
        Some(other) => return Err(parse_error(line, format!("unknown directive {other:?}"))),
        None => return Err(parse_error(line, "empty directive")),
    }
    Ok(())
}

/// Splits leading `#` directives from the body. Returns the directives and
/// the 1-based line number where the body starts.
fn split_directives(text: &str) -> Result<(Directives, usize)> {
    let mut d = Directives::default();
    let mut start = 1;
    for (i, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if let Some(body) = trimmed.strip_prefix('#') {
            parse_directive(&mut d, body, i + 1)?;
            start = i + 2;
        } else if trimmed.is_empty() && start == i + 1 {
            start = i + 2;
        } else {
            break;
        }
    }
    Ok((d, start))
}

pub fn parse_grid(text: &str, format: GridFormat) -> Result<CategoricalGrid> {
    let (directives, start) = split_directives(text)?;
    let mut rows: Vec<Vec<String>> = Vec::new();
    let mut width = None;
    for (i, line) in text.lines().enumerate().skip(start - 1) {
        let lineno = i + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if trimmed.starts_with('#') {
            return Err(parse_error(lineno, "directives must precede the data"));
        }
        let row: Vec<String> = match format {
            GridFormat::Ascii => trimmed.split_whitespace().map(str::to_string).collect(),
            GridFormat::Csv => trimmed.split(',').map(|s| s.trim().to_string()).collect(),
        };
        if row.iter().any(String::is_empty) {
            return Err(parse_error(lineno, "empty label"));
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(parse_error(lineno, format!("row has {} labels, expected {w}", row.len())))
            }
            _ => {}
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(start, "no grid rows"));
    }
    CategoricalGrid::from_matrix(&rows, directives.window, directives.categories.as_deref())
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

pub fn read_grid(path: impl AsRef<Path>, format: GridFormat) -> Result<CategoricalGrid> {
    parse_grid(&read_text(path.as_ref())?, format)
}

fn window_directive(w: &Window) -> String {
    format!("# window {} {} {} {}\n", w.x_min, w.x_max, w.y_min, w.y_max)
}

fn categories_directive(values: &CategoricalData) -> String {
    format!("# categories {}\n", values.categories().join(","))
}

pub fn write_grid(grid: &CategoricalGrid, format: GridFormat) -> String {
    let sep = match format {
        GridFormat::Ascii => " ",
        GridFormat::Csv => ",",
    };
    let mut out = window_directive(grid.window());
    out.push_str(&categories_directive(grid.values()));
    for r in 0..grid.rows() {
        let row: Vec<&str> = (0..grid.cols()).map(|c| grid.get(r, c)).collect();
        out.push_str(&row.join(sep));
        out.push('\n');
    }
    out
}

fn csv_body(text: &str, start: usize) -> String {
    text.lines().skip(start - 1).collect::<Vec<_>>().join("\n")
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers
        .iter()
        .position(|h| h.trim() == name)
        .ok_or_else(|| Error::Schema(format!("missing column {name:?}")))
}

fn parse_coordinate(field: Option<&str>, name: &str, line: usize) -> Result<f64> {
    let field = field.ok_or_else(|| parse_error(line, format!("missing {name}")))?;
    let v: f64 = field.trim().parse().map_err(|_| parse_error(line, format!("non-numeric {name} {field:?}")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("non-finite {name}")));
    }
    Ok(v)
}

/// Parses a point CSV. Without a window directive the tight bounding box
/// of the points is used.
pub fn parse_points(text: &str) -> Result<MarkedPointPattern> {
    let (directives, start) = split_directives(text)?;
    let body = csv_body(text, start);
    let mut reader = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(body.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    let (ix, iy, im) = (column(&headers, "x")?, column(&headers, "y")?, column(&headers, "mark")?);

    let mut points = Vec::new();
    let mut marks = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize + start - 1);
            parse_error(line, e.to_string())
        })?;
        let line = rec.position().map_or(0, |p| p.line() as usize) + start - 1;
        let x = parse_coordinate(rec.get(ix), "x", line)?;
        let y = parse_coordinate(rec.get(iy), "y", line)?;
        let mark = rec.get(im).filter(|m| !m.is_empty()).ok_or_else(|| parse_error(line, "missing mark"))?;
        points.push(Point::new(x, y));
        marks.push(mark.to_string());
    }
    if points.is_empty() {
        return Err(Error::EmptyPattern);
    }
    let window = match directives.window {
        Some(w) => w,
        None => {
            log::warn!("no window directive; using the bounding box of the points");
            Window::bounding(&points)?
        }
    };
    let marks = CategoricalData::from_labels(&marks, directives.categories.as_deref())?;
    MarkedPointPattern::from_parts(points, marks, window)
}

pub fn read_points(path: impl AsRef<Path>) -> Result<MarkedPointPattern> {
    parse_points(&read_text(path.as_ref())?)
}

pub fn write_points(pattern: &MarkedPointPattern) -> String {
    let mut out = window_directive(pattern.window());
    out.push_str(&categories_directive(pattern.marks()));
    out.push_str("x,y,mark\n");
    for (p, m) in pattern.points().iter().zip(pattern.marks().labels()) {
        out.push_str(&format!("{},{},{}\n", p.x, p.y, m));
    }
    out
}

/// Centroid list: CSV with an `x,y` header.
pub fn parse_centroids(text: &str) -> Result<Vec<Point>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    let (ix, iy) = (column(&headers, "x")?, column(&headers, "y")?);
    let mut out = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| parse_error(e.position().map_or(0, |p| p.line() as usize), e.to_string()))?;
        let line = rec.position().map_or(0, |p| p.line() as usize);
        out.push(Point::new(parse_coordinate(rec.get(ix), "x", line)?, parse_coordinate(rec.get(iy), "y", line)?));
    }
    if out.is_empty() {
        return Err(Error::Schema("centroid file has no rows".into()));
    }
    Ok(out)
}

pub fn read_centroids(path: impl AsRef<Path>) -> Result<Vec<Point>> {
    parse_centroids(&read_text(path.as_ref())?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn plain_ascii_grid() {
        let g = parse_grid("a b\nb a", GridFormat::Ascii).unwrap();
        assert_eq!((g.rows(), g.cols()), (2, 2));
        assert_eq!(g.get(0, 1), "b");
        let csv = parse_grid("a,b\nb,a\n", GridFormat::Csv).unwrap();
        assert_eq!(g, csv);
    }

    #[test]
    fn directives_are_applied() {
        let g = parse_grid("# window 0 4 0 2\n# categories 0,1,2\n0 1\n1 0\n", GridFormat::Ascii).unwrap();
        assert_eq!(g.values().categories(), &["0", "1", "2"]);
        assert_eq!(g.pixel_width(), 2.0);
        assert_eq!(g.pixel_height(), 1.0);
    }

    #[test]
    fn grid_errors_carry_line_numbers() {
        let err = parse_grid("a b\nb\n", GridFormat::Ascii).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_grid("# colour red\na\n", GridFormat::Ascii).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        let err = parse_grid("# window 0 1\na\n", GridFormat::Ascii).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(parse_grid("", GridFormat::Ascii).is_err());
    }

    #[test]
    fn canonical_grid_round_trip() {
        let text = "# window 0 3 0 2\n# categories a,b,c\na b a\nc a b\n";
        let g = parse_grid(text, GridFormat::Ascii).unwrap();
        assert_eq!(write_grid(&g, GridFormat::Ascii), text);
        let csv = write_grid(&g, GridFormat::Csv);
        assert_eq!(write_grid(&parse_grid(&csv, GridFormat::Csv).unwrap(), GridFormat::Csv), csv);
    }

    #[test]
    fn points_with_window() {
        let text = "# window 0 10 0 10\nx,y,mark\n1,2,a\n3.5,4,b\n10,0,a\n";
        let p = parse_points(text).unwrap();
        assert_eq!(p.len(), 3);
        assert_eq!(write_points(&p), "# window 0 10 0 10\n# categories a,b\nx,y,mark\n1,2,a\n3.5,4,b\n10,0,a\n");
    }

    #[test]
    fn points_without_window_use_bounding_box() {
        let p = parse_points("x,y,mark\n1,2,a\n3,5,b\n").unwrap();
        assert_eq!(*p.window(), Window::new(1.0, 3.0, 2.0, 5.0).unwrap());
    }

    #[test]
    fn point_errors() {
        let err = parse_points("x,mark\n1,a\n").unwrap_err();
        assert!(matches!(err, Error::Schema(_)));
        let err = parse_points("x,y,mark\n1,2,a\n1,oops,b\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_points("# window 0 10 0 10\nx,y,mark\n1,2,a\n11,5,b\n").unwrap_err();
        assert!(matches!(err, Error::Containment { index: 2, .. }), "{err}");
    }

    #[test]
    fn centroid_list() {
        let c = parse_centroids("x,y\n1,2\n3,4\n").unwrap();
        assert_eq!(c, vec![Point::new(1.0, 2.0), Point::new(3.0, 4.0)]);
        assert!(parse_centroids("a,b\n1,2\n").is_err());
    }

    mod props {
        use super::*;
        use crate::synth::{bernoulli_grid, poisson_pattern};
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn written_files_are_fixed_points(rows in 1usize..8, cols in 1usize..8, seed in 0u64..1000) {
                let g = bernoulli_grid(rows, cols, 0.4, seed).unwrap();
                let text = write_grid(&g, GridFormat::Ascii);
                let back = parse_grid(&text, GridFormat::Ascii).unwrap();
                prop_assert_eq!(&back, &g);
                prop_assert_eq!(write_grid(&back, GridFormat::Ascii), text);

                let w = Window::new(-3.0, 7.5, 1.0, 4.0).unwrap();
                let marks = vec![("p".to_string(), 0.3), ("q".to_string(), 0.7)];
                let pat = poisson_pattern(w, rows * cols, &marks, seed).unwrap();
                let text = write_points(&pat);
                let back = parse_points(&text).unwrap();
                prop_assert_eq!(&back, &pat);
                prop_assert_eq!(write_points(&back), text);
            }
        }
    }
}

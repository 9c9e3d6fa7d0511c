use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{ArgAction, Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use spatent::cooccurrence::{cooccurrence_entropy, parresol_edwards, relative_contagion, CooccurrenceEntropy};
use spatent::decomposition::{mi_proportion, proportional_profile};
use spatent::geometry::adjacency_from_distances;
use spatent::io::{read_centroids, read_grid, read_points, write_grid, write_points, GridFormat};
use spatent::partition_entropy::{batty, karlstrom, SmoothingMode};
use spatent::partitioning::{partition_summary, random_centroids, AreaPartition, DEFAULT_RESOLUTION};
use spatent::shannon::{estimate_pmf, shannon_squared, PairFrequencyTable};
use spatent::synth::{bernoulli_grid, clustered_grid, clustered_pattern, poisson_pattern, GENERATOR};
use spatent::{Analysis, ErrorKind, SpatialData, Window};

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Lib(#[from] spatent::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Lib(e) => match e.kind() {
                ErrorKind::Usage => 1,
                ErrorKind::Data => 2,
                ErrorKind::Numeric => 3,
            },
        }
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

#[derive(Parser)]
#[command(name = "spatent", version, about = "Spatial entropy measures for categorical grids and marked point patterns")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Shannon entropy of the category distribution.
    Shannon(MeasureArgs),
    /// Shannon entropy of unordered pairs over all unit pairs.
    ShannonZ(MeasureArgs),
    /// Batty entropy of one category over a partition of the window.
    Batty(MeasureArgs),
    /// Karlstrom-Ceccato entropy of one category over a partition.
    Karlstrom(MeasureArgs),
    /// O'Neill entropy of contiguous ordered couples (grids only).
    Oneill(MeasureArgs),
    /// Relative contagion index.
    Contagion(MeasureArgs),
    /// Parresol-Edwards index.
    Parresol(MeasureArgs),
    /// Co-occurrence entropy of couples within a distance interval.
    Leibovici(MeasureArgs),
    /// Spatial mutual information / residual entropy decomposition.
    Decompose(MeasureArgs),
    /// Generate a synthetic grid or point pattern.
    Synth(SynthArgs),
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[arg(long, conflicts_with = "points")]
    grid: Option<PathBuf>,
    #[arg(long)]
    points: Option<PathBuf>,
    /// Grid file format.
    #[arg(long, default_value = "ascii")]
    format: String,
    /// Category of interest (batty, karlstrom).
    #[arg(long)]
    category: Option<String>,
    /// Number of random sub-areas.
    #[arg(long, conflicts_with = "centroids")]
    areas: Option<usize>,
    /// CSV of sub-area centroids (x,y).
    #[arg(long)]
    centroids: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Raster resolution for Voronoi areas of point data.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    neigh_dist: Option<f64>,
    #[arg(long, value_enum, default_value_t = ModeArg::Mean)]
    mode: ModeArg,
    #[arg(long)]
    d0: Option<f64>,
    #[arg(long)]
    d1: Option<f64>,
    #[arg(long, value_delimiter = ',')]
    breaks: Option<Vec<f64>>,
    #[arg(long, action = ArgAction::Set)]
    ordered: Option<bool>,
    #[arg(long = "missing-cat", value_delimiter = ',')]
    missing_cat: Vec<String>,
    /// Precomputed co-occurrence entropy (contagion, parresol).
    #[arg(long)]
    entropy: Option<f64>,
    /// Number of categories of X (contagion).
    #[arg(long)]
    n_cat: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-class PI/H shares as CSV (decompose).
    #[arg(long)]
    profile_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Mean,
    Sum,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SynthKind {
    Bernoulli,
    Clustered,
    Poisson,
    ClusteredPoints,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_enum)]
    kind: SynthKind,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    #[arg(long, default_value_t = 1)]
    block: usize,
    #[arg(long)]
    n: Option<usize>,
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_delimiter = ',', num_args = 1)]
    window: Option<Vec<f64>>,
    /// label:prob,label:prob
    #[arg(long, default_value = "a:0.5,b:0.5")]
    marks: String,
    #[arg(long)]
    parents: Option<usize>,
    #[arg(long)]
    offspring: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    spread: f64,
    #[arg(long, default_value = "ascii")]
    format: String,
    /// Output data file; the JSON report goes to stdout.
    #[arg(long)]
    out: PathBuf,
}

struct Loaded {
    analysis: Analysis,
    input: String,
}

impl MeasureArgs {
    fn load(&self) -> CliResult<Loaded> {
        match (&self.grid, &self.points) {
            (Some(path), None) => {
                let format: GridFormat = self.format.parse()?;
                let grid = read_grid(path, format)?;
                Ok(Loaded { analysis: Analysis::new(SpatialData::Grid(grid)), input: path.display().to_string() })
            }
            (None, Some(path)) => {
                let pattern = read_points(path)?;
                Ok(Loaded { analysis: Analysis::new(SpatialData::Points(pattern)), input: path.display().to_string() })
            }
            _ => Err(usage("exactly one of --grid or --points is required")),
        }
    }

    fn params(&self) -> Value {
        let mut m = serde_json::Map::new();
        let mut put = |k: &str, v: Value| {
            if !v.is_null() {
                m.insert(k.to_string(), v);
            }
        };
        put("grid", json!(self.grid.as_ref().map(|p| p.display().to_string())));
        put("points", json!(self.points.as_ref().map(|p| p.display().to_string())));
        if self.grid.is_some() {
            put("format", json!(self.format));
        }
        put("category", json!(self.category));
        put("areas", json!(self.areas));
        put("centroids", json!(self.centroids.as_ref().map(|p| p.display().to_string())));
        put("neigh_dist", json!(self.neigh_dist));
        put("d0", json!(self.d0));
        put("d1", json!(self.d1));
        put("breaks", json!(self.breaks));
        put("ordered", json!(self.ordered));
        if !self.missing_cat.is_empty() {
            put("missing_cat", json!(self.missing_cat));
        }
        put("entropy", json!(self.entropy));
        put("n_cat", json!(self.n_cat));
        Value::Object(m)
    }
}

fn table_json(table: &PairFrequencyTable) -> Value {
    json!({
        "ordered": table.ordered(),
        "categories": table.categories(),
        "total": table.total(),
        "rows": table.rows(),
    })
}

fn cooc_json(c: &CooccurrenceEntropy) -> Value {
    json!({
        "entropy": c.entropy.value,
        "second_moment": c.entropy.second_moment,
        "variance": c.entropy.variance,
        "n_pairs": c.table.total(),
        "table": table_json(&c.table),
    })
}

struct Report {
    results: Value,
    seed: Option<u64>,
}

fn partition(a: &MeasureArgs, loaded: &Loaded) -> CliResult<(AreaPartition, Option<u64>)> {
    let data = loaded.analysis.data();
    let (centroids, seed) = match (&a.centroids, a.areas) {
        (Some(path), None) => (read_centroids(path)?, None),
        (None, Some(g)) => {
            let seed = a.seed.unwrap_or(0);
            (random_centroids(data.window(), g, seed)?, Some(seed))
        }
        _ => return Err(usage("exactly one of --areas or --centroids is required")),
    };
    let part = match data {
        SpatialData::Grid(g) => AreaPartition::for_grid(g, centroids)?,
        SpatialData::Points(p) => AreaPartition::for_pattern(p, centroids, a.resolution)?,
    };
    Ok((part, seed))
}

fn run_measure(cmd: &Command, a: &MeasureArgs) -> CliResult<(Report, String)> {
    let needs_input = !matches!(cmd, Command::Contagion(_) | Command::Parresol(_)) || a.entropy.is_none();
    let loaded = if needs_input { Some(a.load()?) } else { None };
    let input = loaded.as_ref().map_or_else(String::new, |l| l.input.clone());
    let report = match cmd {
        Command::Shannon(_) => {
            let l = loaded.as_ref().unwrap();
            let pmf = estimate_pmf(l.analysis.values())?;
            let est = shannon_squared(&pmf);
            let counts = l.analysis.values().counts();
            let probs: Vec<Value> = pmf
                .categories()
                .iter()
                .zip(pmf.probs())
                .zip(&counts)
                .map(|((c, p), n)| json!({"category": c, "count": n, "probability": p}))
                .collect();
            Report {
                results: json!({
                    "entropy": est.value,
                    "second_moment": est.second_moment,
                    "variance": est.variance,
                    "n": est.n,
                    "probabilities": probs,
                }),
                seed: None,
            }
        }
        Command::ShannonZ(_) => {
            let z = loaded.as_ref().unwrap().analysis.shannon_z()?;
            Report {
                results: json!({
                    "entropy": z.entropy.value,
                    "second_moment": z.entropy.second_moment,
                    "variance": z.entropy.variance,
                    "n_pairs": z.table.total(),
                    "table": table_json(&z.table),
                }),
                seed: None,
            }
        }
        Command::Batty(_) | Command::Karlstrom(_) => {
            let l = loaded.as_ref().unwrap();
            let category = a.category.as_deref().ok_or_else(|| usage("--category is required"))?;
            let (part, seed) = partition(a, l)?;
            let summary = partition_summary(l.analysis.values(), &part, category, l.analysis.data().window())?;
            let centroids: Vec<[f64; 2]> = part.centroids().iter().map(|p| [p.x, p.y]).collect();
            let results = if matches!(cmd, Command::Batty(_)) {
                let b = batty(&summary)?;
                json!({
                    "entropy": b.value,
                    "lower_bound": b.lower_bound,
                    "upper_bound": b.upper_bound,
                    "window_size": summary.total_size,
                    "table": b.table,
                    "centroids": centroids,
                })
            } else {
                let d = a.neigh_dist.ok_or_else(|| usage("--neigh-dist is required"))?;
                let mode = match a.mode {
                    ModeArg::Mean => SmoothingMode::Mean,
                    ModeArg::Sum => SmoothingMode::Sum,
                };
                let k = karlstrom(&summary, d, mode)?;
                json!({
                    "entropy": k.value,
                    "mode": k.mode,
                    "local_terms": k.local_terms(),
                    "table": k.table,
                    "centroids": centroids,
                })
            };
            Report { results, seed }
        }
        Command::Oneill(_) => {
            let c = loaded.as_ref().unwrap().analysis.oneill(&a.missing_cat)?;
            let mut r = cooc_json(&c);
            r["relative_contagion"] = json!(c.relative_contagion().ok());
            Report { results: r, seed: None }
        }
        Command::Contagion(_) | Command::Parresol(_) => {
            let (h, n_cat) = match a.entropy {
                Some(h) => (h, a.n_cat),
                None => {
                    let c = loaded.as_ref().unwrap().analysis.oneill(&a.missing_cat)?;
                    (c.entropy.value, Some(c.n_categories()))
                }
            };
            let results = if matches!(cmd, Command::Contagion(_)) {
                let n_cat = n_cat.ok_or_else(|| usage("--n-cat is required with --entropy"))?;
                json!({"relative_contagion": relative_contagion(h, n_cat)?, "entropy": h, "n_categories": n_cat})
            } else {
                json!({"parresol_edwards": parresol_edwards(h)?, "entropy": h})
            };
            Report { results, seed: None }
        }
        Command::Leibovici(_) => {
            let an = &loaded.as_ref().unwrap().analysis;
            let d1 = a.d1.ok_or_else(|| usage("--d1 is required"))?;
            let d0 = a.d0.unwrap_or(0.0);
            let ordered = a.ordered.unwrap_or(true);
            let c = if d0 == 0.0 {
                an.leibovici(d1, ordered, &a.missing_cat)?
            } else {
                let adj = adjacency_from_distances(an.distances()?, d0, d1)?;
                cooccurrence_entropy(&an.values().with_extra_categories(&a.missing_cat), &adj, ordered)?
            };
            let mut r = cooc_json(&c);
            r["interval"] = json!([d0, d1]);
            Report { results: r, seed: None }
        }
        Command::Decompose(_) => {
            let an = &loaded.as_ref().unwrap().analysis;
            let d = an.decompose(a.breaks.as_deref(), &a.missing_cat)?;
            let mi_prop = match mi_proportion(&d) {
                Ok(v) => Some(v),
                Err(spatent::Error::UndefinedProportion) => None,
                Err(e) => return Err(e.into()),
            };
            let profile = proportional_profile(&d);
            if let Some(path) = &a.profile_csv {
                let mut w = csv::Writer::from_path(path).map_err(|e| spatent::Error::Io(e.into()))?;
                for row in &profile {
                    w.serialize(row).map_err(|e| spatent::Error::Io(e.into()))?;
                }
                w.flush().map_err(spatent::Error::Io)?;
            }
            let mut r = serde_json::to_value(&d).expect("serializable");
            r["mi_prop"] = json!(mi_prop);
            r["profile"] = json!(profile);
            Report { results: r, seed: None }
        }
        Command::Synth(_) => unreachable!(),
    };
    Ok((report, input))
}

fn measure_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Shannon(_) => "shannon",
        Command::ShannonZ(_) => "shannon-z",
        Command::Batty(_) => "batty",
        Command::Karlstrom(_) => "karlstrom",
        Command::Oneill(_) => "oneill",
        Command::Contagion(_) => "contagion",
        Command::Parresol(_) => "parresol",
        Command::Leibovici(_) => "leibovici",
        Command::Decompose(_) => "decompose",
        Command::Synth(_) => "synth",
    }
}

fn parse_marks(text: &str) -> CliResult<Vec<(String, f64)>> {
    text.split(',')
        .map(|item| {
            let (label, p) = item.split_once(':').ok_or_else(|| usage(format!("bad mark {item:?}, expected label:prob")))?;
            let p: f64 = p.parse().map_err(|_| usage(format!("bad probability in {item:?}")))?;
            Ok((label.to_string(), p))
        })
        .collect()
}

fn synth_window(s: &SynthArgs) -> CliResult<Window> {
    match s.window.as_deref() {
        None => Ok(Window::new(0.0, 100.0, 0.0, 100.0)?),
        Some(&[x0, x1, y0, y1]) => Ok(Window::new(x0, x1, y0, y1)?),
        Some(_) => Err(usage("--window needs x_min,x_max,y_min,y_max")),
    }
}

fn run_synth(s: &SynthArgs) -> CliResult<Value> {
    let (text, results) = match s.kind {
        SynthKind::Bernoulli | SynthKind::Clustered => {
            let rows = s.rows.ok_or_else(|| usage("--rows is required"))?;
            let cols = s.cols.ok_or_else(|| usage("--cols is required"))?;
            let grid = match s.kind {
                SynthKind::Bernoulli => bernoulli_grid(rows, cols, s.p, s.seed)?,
                _ => clustered_grid(rows, cols, s.p, s.block, s.seed)?,
            };
            let format: GridFormat = s.format.parse()?;
            let counts = grid.values().counts();
            (write_grid(&grid, format), json!({"n_units": rows * cols, "rows": rows, "cols": cols, "categories": grid.values().categories(), "counts": counts}))
        }
        SynthKind::Poisson | SynthKind::ClusteredPoints => {
            let window = synth_window(s)?;
            let marks = parse_marks(&s.marks)?;
            let pattern = match s.kind {
                SynthKind::Poisson => poisson_pattern(window, s.n.ok_or_else(|| usage("--n is required"))?, &marks, s.seed)?,
                _ => clustered_pattern(
                    window,
                    s.parents.ok_or_else(|| usage("--parents is required"))?,
                    s.offspring.ok_or_else(|| usage("--offspring is required"))?,
                    s.spread,
                    &marks,
                    s.seed,
                )?,
            };
            let counts = pattern.marks().counts();
            (write_points(&pattern), json!({"n_units": pattern.len(), "categories": pattern.marks().categories(), "counts": counts}))
        }
    };
    fs::write(&s.out, text).map_err(spatent::Error::Io)?;
    let kind = s.kind.to_possible_value().expect("named").get_name().to_string();
    let mut results = results;
    results["kind"] = json!(kind);
    results["output"] = json!(s.out.display().to_string());
    Ok(json!({
        "measure": "synth",
        "parameters": {
            "kind": kind, "rows": s.rows, "cols": s.cols, "p": s.p, "block": s.block, "n": s.n,
            "window": s.window, "marks": s.marks, "parents": s.parents, "offspring": s.offspring,
            "spread": s.spread, "format": s.format,
        },
        "results": results,
        "provenance": provenance(None, Some(s.seed)),
    }))
}

fn provenance(input: Option<String>, seed: Option<u64>) -> Value {
    json!({
        "input": input,
        "seed": seed,
        "version": env!("CARGO_PKG_VERSION"),
        "generator": GENERATOR,
    })
}

fn emit(doc: &Value, out: Option<&Path>) -> CliResult<()> {
    let text = serde_json::to_string_pretty(doc).expect("serializable") + "\n";
    match out {
        Some(path) => fs::write(path, text).map_err(spatent::Error::Io)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()).and_then(|()| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => return Err(spatent::Error::Io(e).into()),
                _ => {}
            }
        }
    }
    Ok(())
}

fn run(cli: Cli) -> CliResult<()> {
    match &cli.command {
        Command::Synth(s) => emit(&run_synth(s)?, None),
        Command::Shannon(a)
        | Command::ShannonZ(a)
        | Command::Batty(a)
        | Command::Karlstrom(a)
        | Command::Oneill(a)
        | Command::Contagion(a)
        | Command::Parresol(a)
        | Command::Leibovici(a)
        | Command::Decompose(a) => {
            let (report, input) = run_measure(&cli.command, a)?;
            let input = (!input.is_empty()).then_some(input);
            let doc = json!({
                "measure": measure_name(&cli.command),
                "parameters": a.params(),
                "results": report.results,
                "provenance": provenance(input, report.seed),
            });
            emit(&doc, a.out.as_deref())
        }
    }
}

fn init_threads() -> CliResult<()> {
    let Ok(v) = std::env::var("SPATENT_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| usage(format!("SPATENT_THREADS must be a non-negative integer, got {v:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind as K;
            let _ = e.print();
            return match e.kind() {
                K::DisplayHelp | K::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match init_threads().and_then(|()| run(cli)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}

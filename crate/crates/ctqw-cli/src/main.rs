//! `ctqw` — walk simulations on finite graphs from the command line.
//!
//! Exit codes: 0 success, 2 invalid input (bad node ids, malformed graph
//! files, inconsistent flags), 3 numerical failure, 4 I/O failure.

mod output;

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ctqw::{
    build_glued_tree, chi_profile, decompose_symmetric, group_degenerate, left_right_partition,
    reduce, row_partition, CollapseError, GluedTreeSpec, Graph, GraphError, ReducedChain,
    SpectralDecomposition, SpectralError, WalkDistribution, WalkError, WalkParams,
};
use output::*;

/// Classical probabilities below this have no meaningful quantum/classical
/// ratio; mirrors the library's missing-value rule.
const RATIO_FLOOR: f64 = ctqw::walk::RATIO_FLOOR;

const DEFAULT_RELATIVE_TOL: f64 = 1e-8;

#[derive(Parser)]
#[command(
    name = "ctqw",
    version,
    about = "Continuous-time quantum and classical walks on finite graphs",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the edge list of a glued binary Cayley tree
    Generate(GenerateArgs),
    /// Dump eigenvalues and degeneracy groups as JSON
    Spectrum(SpectrumArgs),
    /// Tabulate p, pi, and their ratio for one start node over a time grid
    Propagate(PropagateArgs),
    /// Long-time averaged quantum distribution seen from one start node
    Limit(LimitArgs),
    /// Collapse a glued tree onto its cluster chain and walk on the chain
    Collapse(CollapseArgs),
    /// Tabulate p, pi, and ratio for selected (j, k) pairs over time
    Compare(CompareArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct GraphSource {
    /// Generation of the glued Cayley tree to build
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    generation: Option<u32>,
    /// Edge-list file (one "a b" pair per line, '#' starts a comment)
    #[arg(long, value_name = "PATH")]
    graph_file: Option<PathBuf>,
}

impl GraphSource {
    fn load(&self) -> Result<Graph, CliError> {
        match (self.generation, &self.graph_file) {
            (Some(generation), None) => Ok(build_glued_tree(generation)?),
            (None, Some(path)) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|err| CliError::io(path, err))?;
                Ok(Graph::parse_edge_list(&text)?)
            }
            _ => unreachable!("clap enforces exactly one graph source"),
        }
    }
}

#[derive(Args)]
struct TimeGrid {
    /// Comma-separated list of times
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["t_max", "t_steps"])]
    times: Option<Vec<f64>>,
    /// End of a uniform grid starting at t = 0
    #[arg(long, requires = "t_steps")]
    t_max: Option<f64>,
    /// Number of uniform steps (the grid has t-steps + 1 points)
    #[arg(long, requires = "t_max")]
    t_steps: Option<usize>,
}

impl TimeGrid {
    fn resolve(&self) -> Result<Vec<f64>, CliError> {
        let times: Vec<f64> = match (&self.times, self.t_max, self.t_steps) {
            (Some(times), None, None) => times.clone(),
            (None, Some(t_max), Some(steps)) => {
                if !(t_max.is_finite() && t_max >= 0.0) {
                    return Err(CliError::input(format!("--t-max must be >= 0, got {t_max}")));
                }
                if steps == 0 {
                    return Err(CliError::input("--t-steps must be at least 1"));
                }
                (0..=steps).map(|i| t_max * i as f64 / steps as f64).collect()
            }
            _ => {
                return Err(CliError::input(
                    "specify a time grid: --times or --t-max with --t-steps",
                ))
            }
        };
        if times.is_empty() {
            return Err(CliError::input("the time grid is empty"));
        }
        if let Some(bad) = times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
            return Err(CliError::input(format!("times must be >= 0, got {bad}")));
        }
        Ok(times)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Write to this file instead of stdout
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Directory resolved against relative --output paths
    #[arg(long, env = "CTQW_OUTPUT_DIR", default_value = ".", value_name = "DIR")]
    output_dir: PathBuf,
    /// Prefix data files with a tool/version header
    #[arg(long)]
    version_header: bool,
}

impl OutputArgs {
    fn version(&self) -> Option<String> {
        self.version_header
            .then(|| format!("ctqw {}", env!("CARGO_PKG_VERSION")))
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_owned()
        } else {
            self.output_dir.join(path)
        }
    }

    fn write(&self, content: &str) -> Result<(), CliError> {
        match &self.output {
            Some(path) => {
                let path = self.resolve(path);
                std::fs::write(&path, content).map_err(|err| CliError::io(&path, err))
            }
            None => {
                print!("{content}");
                Ok(())
            }
        }
    }

    fn csv(&self, header: &str, rows: impl Iterator<Item = String>) -> String {
        let mut text = String::new();
        if let Some(version) = self.version() {
            text.push_str(&format!("# {version}\n"));
        }
        text.push_str(header);
        text.push('\n');
        for row in rows {
            text.push_str(&row);
            text.push('\n');
        }
        text
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum Direction {
    /// Breadth-first clusters seeded on the left half of the axis row
    LeftRight,
    /// The 2G + 1 horizontal rows
    TopBottom,
}

impl Direction {
    fn as_str(self) -> &'static str {
        match self {
            Direction::LeftRight => "left-right",
            Direction::TopBottom => "top-bottom",
        }
    }
}

#[derive(Args)]
struct GenerateArgs {
    /// Generation of the glued Cayley tree
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    generation: u32,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Degeneracy tolerance, relative to the spectral radius
    #[arg(long, env = "CTQW_TOL")]
    tol: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct PropagateArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Start node (1-based)
    #[arg(long)]
    start: usize,
    /// Uniform transmission rate per bond
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    grid: TimeGrid,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct LimitArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Start node (1-based)
    #[arg(long)]
    start: usize,
    /// Degeneracy tolerance, relative to the spectral radius
    #[arg(long, env = "CTQW_TOL")]
    tol: Option<f64>,
    /// Average |alpha|^2 over a finite horizon instead of using the exact
    /// degeneracy-group sum (slow; a cross-check)
    #[arg(long)]
    numeric: bool,
    /// Averaging horizon in units of the inverse transmission rate
    #[arg(long, default_value_t = 2000.0, requires = "numeric")]
    horizon: f64,
    /// Number of trapezoid steps over the horizon
    #[arg(long, default_value_t = 200_000, requires = "numeric")]
    steps: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CollapseArgs {
    /// Generation of the glued Cayley tree
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=20))]
    generation: u32,
    /// Which family of clusters to collapse onto
    #[arg(long, value_enum, default_value_t = Direction::LeftRight)]
    direction: Direction,
    /// Start cluster (1-based)
    #[arg(long, default_value_t = 1)]
    start: usize,
    /// Uniform transmission rate per bond
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    grid: TimeGrid,
    /// Degeneracy tolerance, relative to the spectral radius
    #[arg(long, env = "CTQW_TOL")]
    tol: Option<f64>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Also write the partition and chain matrix as JSON to this file
    #[arg(long, value_name = "PATH")]
    structure_out: Option<PathBuf>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    source: GraphSource,
    /// Comma-separated node pairs "j:k", e.g. 10:1,7:4
    #[arg(long, value_delimiter = ',', value_parser = parse_pair, required = true)]
    pairs: Vec<(usize, usize)>,
    /// Uniform transmission rate per bond
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[command(flatten)]
    grid: TimeGrid,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[command(flatten)]
    out: OutputArgs,
}

fn parse_pair(s: &str) -> Result<(usize, usize), String> {
    let (j, k) = s
        .split_once(':')
        .ok_or_else(|| format!("expected j:k, got {s:?}"))?;
    let parse = |field: &str| {
        field
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&v| v >= 1)
            .ok_or_else(|| format!("node ids must be positive integers, got {field:?}"))
    };
    Ok((parse(j)?, parse(k)?))
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Numerical(String),
    Io(String),
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError::Input(message.into())
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io(format!("{}: {err}", path.display()))
    }

    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Numerical(_) => ExitCode::from(3),
            CliError::Io(_) => ExitCode::from(4),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Numerical(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<GraphError> for CliError {
    fn from(err: GraphError) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<WalkError> for CliError {
    fn from(err: WalkError) -> Self {
        CliError::Input(err.to_string())
    }
}

impl From<SpectralError> for CliError {
    fn from(err: SpectralError) -> Self {
        CliError::Numerical(err.to_string())
    }
}

impl From<CollapseError> for CliError {
    fn from(err: CollapseError) -> Self {
        CliError::Numerical(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Generate(args) => generate(args),
        Command::Spectrum(args) => spectrum(args),
        Command::Propagate(args) => propagate(args),
        Command::Limit(args) => limit(args),
        Command::Collapse(args) => collapse(args),
        Command::Compare(args) => compare(args),
    }
}

fn check_node(label: &str, node: usize, n: usize) -> Result<(), CliError> {
    if node >= 1 && node <= n {
        Ok(())
    } else {
        Err(CliError::input(format!(
            "{label} {node} outside 1..={n}"
        )))
    }
}

fn relative_tolerance(tol: Option<f64>) -> Result<f64, CliError> {
    let tol = tol.unwrap_or(DEFAULT_RELATIVE_TOL);
    if tol.is_finite() && tol > 0.0 {
        Ok(tol)
    } else {
        Err(CliError::input(format!("--tol must be positive, got {tol}")))
    }
}

fn absolute_tolerance(d: &SpectralDecomposition, relative: f64) -> f64 {
    let radius = d
        .eigenvalues()
        .iter()
        .fold(0.0f64, |acc, &l| acc.max(l.abs()));
    relative * radius.max(1.0)
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let graph = build_glued_tree(args.generation)?;
    let mut text = String::new();
    if let Some(version) = args.out.version() {
        text.push_str(&format!("# {version}\n"));
    }
    text.push_str(&graph.to_edge_list());
    args.out.write(&text)
}

fn spectrum(args: SpectrumArgs) -> Result<(), CliError> {
    let graph = args.source.load()?;
    let d = decompose_symmetric(&graph.adjacency_matrix())?;
    let relative = relative_tolerance(args.tol)?;
    let tolerance = absolute_tolerance(&d, relative);
    let groups = group_degenerate(&d, tolerance);
    let doc = SpectrumDoc {
        version: args.out.version(),
        n: d.n(),
        tolerance: round12(tolerance),
        eigenvalues: d.eigenvalues().iter().map(|&l| round12(l)).collect(),
        groups: groups
            .iter()
            .map(|(indices, value)| GroupDoc {
                value: round12(value),
                indices: indices.to_vec(),
            })
            .collect(),
    };
    args.out.write(&to_json(&doc))
}

/// Rows of the shared CSV schema for one start column at one time.
fn column_rows(dist: &WalkDistribution, t: f64, start: usize) -> Vec<PropagationRow> {
    (0..dist.classical().len())
        .map(|idx| {
            let p = dist.classical()[idx];
            let pi = dist.quantum()[idx];
            PropagationRow {
                t,
                j: idx + 1,
                k: start,
                p,
                pi,
                ratio: if p < RATIO_FLOOR { f64::NAN } else { pi / p },
            }
        })
        .collect()
}

fn time_slice(dist: &WalkDistribution, t: f64) -> TimeSlice {
    let p: Vec<f64> = dist.classical().iter().map(|&x| round12(x.max(0.0))).collect();
    let pi: Vec<f64> = dist.quantum().iter().map(|&x| round12(x)).collect();
    let ratio = dist
        .classical()
        .iter()
        .zip(dist.quantum().iter())
        .map(|(&p, &pi)| {
            if p < RATIO_FLOOR {
                None
            } else {
                json_num(pi / p)
            }
        })
        .collect();
    TimeSlice { t: round12(t), p, pi, ratio }
}

fn propagate(args: PropagateArgs) -> Result<(), CliError> {
    let graph = args.source.load()?;
    check_node("start node", args.start, graph.n_nodes())?;
    WalkParams::new(args.gamma, 0.0)?;
    let times = args.grid.resolve()?;
    let d = decompose_symmetric(&graph.adjacency_matrix())?;

    let distributions: Vec<(f64, WalkDistribution)> = times
        .iter()
        .map(|&t| {
            let params = WalkParams::new(args.gamma, t)?;
            Ok((t, WalkDistribution::evaluate(&d, &params, args.start)))
        })
        .collect::<Result<_, WalkError>>()?;

    match args.format {
        Format::Csv => {
            let rows = distributions
                .iter()
                .flat_map(|(t, dist)| column_rows(dist, *t, args.start))
                .map(|row| row.to_csv());
            args.out.write(&args.out.csv(CSV_HEADER, rows))
        }
        Format::Json => {
            let doc = PropagateDoc {
                version: args.out.version(),
                start: args.start,
                gamma: round12(args.gamma),
                nodes: graph.n_nodes(),
                series: distributions
                    .iter()
                    .map(|(t, dist)| time_slice(dist, *t))
                    .collect(),
            };
            args.out.write(&to_json(&doc))
        }
    }
}

fn limit(args: LimitArgs) -> Result<(), CliError> {
    let graph = args.source.load()?;
    check_node("start node", args.start, graph.n_nodes())?;
    let d = decompose_symmetric(&graph.adjacency_matrix())?;
    let chi: Vec<f64> = if args.numeric {
        if !(args.horizon.is_finite() && args.horizon > 0.0) {
            return Err(CliError::input(format!(
                "--horizon must be positive, got {}",
                args.horizon
            )));
        }
        if args.steps < 1000 {
            return Err(CliError::input(format!(
                "--steps must be at least 1000, got {}",
                args.steps
            )));
        }
        let averaged = ctqw::chi_numeric_matrix(&d, 1.0, args.horizon, args.steps);
        averaged.column(args.start - 1).iter().copied().collect()
    } else {
        let relative = relative_tolerance(args.tol)?;
        let groups = group_degenerate(&d, absolute_tolerance(&d, relative));
        chi_profile(&d, &groups, args.start).chi().to_vec()
    };
    match args.format {
        Format::Json => {
            let doc = LimitDoc {
                version: args.out.version(),
                start: args.start,
                chi: chi.iter().map(|&x| round12(x)).collect(),
            };
            args.out.write(&to_json(&doc))
        }
        Format::Csv => {
            let rows = chi
                .iter()
                .enumerate()
                .map(|(idx, &chi)| format!("{},{}", idx + 1, sig12(chi)));
            args.out.write(&args.out.csv("j,chi", rows))
        }
    }
}

fn build_chain(args: &CollapseArgs) -> Result<(GluedTreeSpec, ReducedChain), CliError> {
    let spec = GluedTreeSpec::new(args.generation)?;
    let graph = spec.build();
    let partition = match args.direction {
        Direction::LeftRight => left_right_partition(&spec, &graph)?,
        Direction::TopBottom => row_partition(&spec, &graph)?,
    };
    let chain = reduce(partition, &graph.adjacency_matrix())?;
    Ok((spec, chain))
}

fn collapse(args: CollapseArgs) -> Result<(), CliError> {
    let (_, chain) = build_chain(&args)?;
    check_node("start cluster", args.start, chain.len())?;
    WalkParams::new(args.gamma, 0.0)?;
    let times = args.grid.resolve()?;
    let d = chain.decompose()?;
    let relative = relative_tolerance(args.tol)?;
    let groups = group_degenerate(&d, absolute_tolerance(&d, relative));
    let profile = chi_profile(&d, &groups, args.start);

    let structure = StructureDoc {
        generation: args.generation,
        direction: args.direction.as_str().to_owned(),
        clusters: chain.partition().clusters().to_vec(),
        sizes: chain.partition().sizes().to_vec(),
        bonds: chain.partition().bonds().to_vec(),
        functionality: chain.partition().functionality().to_vec(),
        matrix: chain
            .matrix()
            .rows()
            .into_iter()
            .map(|row| row.iter().map(|&x| round12(x)).collect())
            .collect(),
    };
    if let Some(path) = &args.structure_out {
        let path = args.out.resolve(path);
        std::fs::write(&path, to_json(&structure)).map_err(|err| CliError::io(&path, err))?;
    }

    let distributions: Vec<(f64, WalkDistribution)> = times
        .iter()
        .map(|&t| {
            let params = WalkParams::new(args.gamma, t)?;
            Ok((t, WalkDistribution::evaluate(&d, &params, args.start)))
        })
        .collect::<Result<_, WalkError>>()?;

    match args.format {
        Format::Csv => {
            let rows = distributions
                .iter()
                .flat_map(|(t, dist)| column_rows(dist, *t, args.start))
                .map(|row| row.to_csv());
            args.out.write(&args.out.csv(CSV_HEADER, rows))
        }
        Format::Json => {
            let doc = CollapseDoc {
                version: args.out.version(),
                structure,
                start: args.start,
                gamma: round12(args.gamma),
                chi: profile.chi().iter().map(|&x| round12(x)).collect(),
                series: distributions
                    .iter()
                    .map(|(t, dist)| time_slice(dist, *t))
                    .collect(),
            };
            args.out.write(&to_json(&doc))
        }
    }
}

fn compare(args: CompareArgs) -> Result<(), CliError> {
    let graph = args.source.load()?;
    for &(j, k) in &args.pairs {
        check_node("node", j, graph.n_nodes())?;
        check_node("node", k, graph.n_nodes())?;
    }
    WalkParams::new(args.gamma, 0.0)?;
    let times = args.grid.resolve()?;
    let d = decompose_symmetric(&graph.adjacency_matrix())?;

    let mut rows: Vec<PropagationRow> = Vec::with_capacity(times.len() * args.pairs.len());
    for &t in &times {
        let params = WalkParams::new(args.gamma, t)?;
        let mut columns: BTreeMap<usize, WalkDistribution> = BTreeMap::new();
        for &(j, k) in &args.pairs {
            let dist = columns
                .entry(k)
                .or_insert_with(|| WalkDistribution::evaluate(&d, &params, k));
            let p = dist.classical()[j - 1];
            let pi = dist.quantum()[j - 1];
            rows.push(PropagationRow {
                t,
                j,
                k,
                p,
                pi,
                ratio: if p < RATIO_FLOOR { f64::NAN } else { pi / p },
            });
        }
    }

    match args.format {
        Format::Csv => {
            let rows = rows.iter().map(|row| row.to_csv());
            args.out.write(&args.out.csv(CSV_HEADER, rows))
        }
        Format::Json => {
            let doc = CompareDoc {
                version: args.out.version(),
                gamma: round12(args.gamma),
                rows: rows
                    .iter()
                    .map(|row| CompareRow {
                        t: round12(row.t),
                        j: row.j,
                        k: row.k,
                        p: round12(row.p.max(0.0)),
                        pi: round12(row.pi),
                        ratio: json_num(row.ratio),
                    })
                    .collect(),
            };
            args.out.write(&to_json(&doc))
        }
    }
}

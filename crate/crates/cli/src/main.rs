use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use atsp_core::construction::ConstructionParams;
use atsp_core::datasets::{generate, Dataset, DatasetKind, DatasetSpec, Isometry};
use atsp_core::filtration::{dyadic_filtration, square_sum};
use atsp_core::io::write_points_csv;
use atsp_core::jones::{integral_estimate, jones_sum, Target};
use atsp_core::mst::{euler_parametrization, mst};
use atsp_core::nets::{MultiresolutionFamily, NetConfig};
use atsp_core::pipeline::{compare_dataset, standard_suite, CompareOptions};
use atsp_core::{construct, PolylineCurve};

#[derive(Parser)]
#[command(name = "atsp", version, about = "Jones beta numbers, square sums and traveling salesman constructions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset and print its points.
    Gen(GenArgs),
    /// Nested nets and the ball family as JSON.
    Nets(FamilyArgs),
    /// Square sum of betas over the ball family.
    BetaSum(BetaSumArgs),
    /// Integral form of the square sum along the dataset's curve.
    Integral(IntegralArgs),
    /// Local farthest-insertion construction.
    Construct(ConstructArgs),
    /// Minimum spanning tree, optionally with its doubled Euler tour.
    Mst(MstArgs),
    /// Arc-beta square sum over a dyadic filtration of the curve.
    Filtration(FiltrationArgs),
    /// Full comparison report for one dataset.
    Compare(CompareArgs),
    /// Comparison reports for the standard dataset suite.
    Suite(SuiteArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Koch,
    Circle,
    Spiral,
    Cantor4,
    RandomWalk,
    UniformSquare,
    Collinear,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct DataArgs {
    /// Generator; ignored when --input is given.
    #[arg(long, value_enum, default_value = "koch")]
    kind: Kind,
    /// Iteration depth for koch and cantor4.
    #[arg(long, default_value_t = 3)]
    k: u32,
    /// Point count for the other generators.
    #[arg(long, default_value_t = 100)]
    n: usize,
    #[arg(long, default_value_t = 3.0)]
    turns: f64,
    #[arg(long, default_value_t = 0.05)]
    step: f64,
    /// Ambient dimension of random_walk.
    #[arg(long, default_value_t = 3)]
    walk_dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Point CSV (one point per row, optional header).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Embed isometrically into this dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum, default_value = "json")]
    out: Format,
}

impl DataArgs {
    fn spec(&self) -> DatasetSpec {
        let kind = match (&self.input, self.kind) {
            (Some(path), _) => DatasetKind::CustomFile { path: path.clone() },
            (None, Kind::Koch) => DatasetKind::Koch { k: self.k },
            (None, Kind::Circle) => DatasetKind::Circle { n: self.n },
            (None, Kind::Spiral) => DatasetKind::Spiral { n: self.n, turns: self.turns },
            (None, Kind::Cantor4) => DatasetKind::Cantor4 { k: self.k },
            (None, Kind::RandomWalk) => DatasetKind::RandomWalk { n: self.n, step: self.step, dim: self.walk_dim },
            (None, Kind::UniformSquare) => DatasetKind::UniformSquare { n: self.n },
            (None, Kind::Collinear) => DatasetKind::Collinear { n: self.n },
        };
        DatasetSpec::new(kind, self.seed)
    }

    /// The dataset, embedded into `--dim` when that is larger.
    fn load(&self) -> atsp_core::Result<Dataset> {
        let mut ds = generate(&self.spec())?;
        if let Some(d) = self.dim.filter(|&d| d != ds.points.dim()) {
            let iso = Isometry::random(ds.points.dim(), d, self.seed)?;
            ds.points = iso.apply(&ds.points)?;
            if let Some(c) = &ds.curve {
                ds.curve = Some(PolylineCurve::new(iso.apply(c.vertices())?));
            }
        }
        Ok(ds)
    }
}

#[derive(Args)]
struct GenArgs {
    #[command(flatten)]
    data: DataArgs,
}

#[derive(Args)]
struct FamilyArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "A", default_value_t = 4.0)]
    a: f64,
    #[arg(long)]
    n0: Option<i32>,
    #[arg(long)]
    nmax: Option<i32>,
}

impl FamilyArgs {
    fn family(&self, ds: &Dataset) -> atsp_core::Result<MultiresolutionFamily> {
        let cfg = NetConfig { n0: self.n0, n_max: self.nmax, ..NetConfig::default() };
        MultiresolutionFamily::for_points(&ds.points, self.a, &cfg)
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TargetKind {
    Points,
    Curve,
}

#[derive(Args)]
struct BetaSumArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Measure flatness of the points or of the dataset's curve.
    #[arg(long, value_enum, default_value = "points")]
    target: TargetKind,
}

#[derive(Args)]
struct IntegralArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "A", default_value_t = 4.0)]
    a: f64,
    #[arg(long, default_value_t = 256)]
    x_samples: usize,
    #[arg(long, default_value_t = 4)]
    t_levels: usize,
}

#[derive(Args)]
struct ConstructArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long = "A", default_value_t = 8.0)]
    a: f64,
    #[arg(long, default_value_t = 0.1)]
    eps0: f64,
    #[arg(long)]
    n0: Option<i32>,
    /// Write the per-insertion trace here as JSON lines.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args)]
struct MstArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Print the doubled-edge Euler tour instead of the tree.
    #[arg(long)]
    tour: bool,
}

#[derive(Args)]
struct FiltrationArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value_t = 8)]
    depth: u32,
    #[arg(long, default_value_t = 1)]
    j: u32,
}

#[derive(Args)]
struct CompareArgs {
    #[command(flatten)]
    family: FamilyArgs,
    /// Family constant of the construction.
    #[arg(long, default_value_t = 8.0)]
    construction_a: f64,
    #[arg(long, default_value_t = 0.1)]
    eps0: f64,
    /// Include wall times in the report.
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct SuiteArgs {
    #[arg(long = "A", default_value_t = 4.0)]
    a: f64,
    #[arg(long, default_value_t = 8.0)]
    construction_a: f64,
    #[arg(long, default_value_t = 0.1)]
    eps0: f64,
    /// Embed every dataset into this dimension.
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    timing: bool,
}

fn out() -> BufWriter<io::StdoutLock<'static>> {
    BufWriter::new(io::stdout().lock())
}

fn print_json<T: serde::Serialize>(value: &T) -> Result<()> {
    let mut w = out();
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn require_curve(ds: &Dataset) -> Result<&PolylineCurve> {
    match &ds.curve {
        Some(c) => Ok(c),
        None => bail!(atsp_core::Error::InvalidParameter(format!("dataset {} has no curve", ds.id))),
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(args) => {
            let ds = args.data.load()?;
            match args.data.out {
                Format::Csv => write_points_csv(&ds.points, out())?,
                Format::Json => {
                    let rows: Vec<&[f64]> = ds.points.iter().collect();
                    print_json(&serde_json::json!({ "dataset": ds.id, "points": rows }))?
                }
            }
        }
        Command::Nets(args) => {
            let ds = args.data.load()?;
            let fam = args.family(&ds)?;
            fam.nets().check_invariants()?;
            let dump = fam.dump();
            match args.data.out {
                Format::Json => print_json(&dump)?,
                Format::Csv => {
                    let mut w = out();
                    writeln!(w, "n,member")?;
                    for level in &dump.levels {
                        for m in &level.members {
                            writeln!(w, "{},{m}", level.n)?;
                        }
                    }
                    w.flush()?;
                }
            }
        }
        Command::BetaSum(args) => {
            let f = &args.family;
            let ds = f.data.load()?;
            let fam = f.family(&ds)?;
            let report = match args.target {
                TargetKind::Points => jones_sum(&fam, Target::Points(&ds.points))?,
                TargetKind::Curve => jones_sum(&fam, Target::Curve(require_curve(&ds)?))?,
            };
            match f.data.out {
                Format::Json => print_json(&report)?,
                Format::Csv => report.write_csv(out())?,
            }
        }
        Command::Integral(args) => {
            let ds = args.data.load()?;
            let est = integral_estimate(require_curve(&ds)?, args.a, args.x_samples, args.t_levels)?;
            if est.zero_length_warnings > 0 {
                eprintln!("warning: {} strata had zero clipped length", est.zero_length_warnings);
            }
            print_json(&est)?;
        }
        Command::Construct(args) => {
            let ds = args.data.load()?;
            let c = construct(&ds.points, ConstructionParams { a: args.a, eps0: args.eps0, n0: args.n0 })?;
            if let Some(path) = &args.trace {
                let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
                c.write_trace(BufWriter::new(f))?;
            }
            match args.data.out {
                Format::Csv => c.g.write_csv(out())?,
                Format::Json => print_json(&serde_json::json!({
                    "dataset": ds.id,
                    "A": args.a,
                    "eps0": args.eps0,
                    "g_length": c.g_length(),
                    "h_length": c.h_length(),
                    "union_length": c.union_length,
                    "case_counts": c.case_counts(),
                    "p1_repairs": c.p1_repairs(),
                    "connected": c.g.is_connected(),
                }))?,
            }
        }
        Command::Mst(args) => {
            let ds = args.data.load()?;
            let t = mst(&ds.points)?;
            match (args.tour, args.data.out) {
                (false, Format::Csv) => t.write_csv(out())?,
                (false, Format::Json) => print_json(&serde_json::json!({
                    "dataset": ds.id,
                    "length": t.total_length(),
                    "edges": t.edges(),
                }))?,
                (true, fmt) => {
                    let tour = euler_parametrization(&t)?;
                    match fmt {
                        Format::Csv => tour.write_csv(out())?,
                        Format::Json => print_json(&serde_json::json!({
                            "dataset": ds.id,
                            "length": tour.curve.length(),
                            "sequence": tour.sequence,
                        }))?,
                    }
                }
            }
        }
        Command::Filtration(args) => {
            let ds = args.data.load()?;
            let c = require_curve(&ds)?;
            let f = dyadic_filtration(c, args.depth, args.j)?;
            match args.data.out {
                Format::Csv => f.write_csv(out())?,
                Format::Json => {
                    let total = square_sum(&f);
                    let worst = f.ancestor_sums().iter().map(|(s, l)| s / l).fold(0.0, f64::max);
                    print_json(&serde_json::json!({
                        "dataset": ds.id,
                        "depth": f.depth,
                        "J": f.j,
                        "length": f.length,
                        "square_sum": total,
                        "ratio": total / f.length,
                        "max_ancestor_ratio": worst,
                    }))?
                }
            }
        }
        Command::Compare(args) => {
            let f = &args.family;
            let ds = f.data.load()?;
            let opts = CompareOptions {
                a: f.a,
                construction: ConstructionParams { a: args.construction_a, eps0: args.eps0, n0: None },
                nets: NetConfig { n0: f.n0, n_max: f.nmax, ..NetConfig::default() },
                ..CompareOptions::default()
            };
            let mut report = compare_dataset(&ds, f.data.seed, &opts)?;
            if !args.timing {
                report = report.without_timing();
            }
            print_json(&report)?;
        }
        Command::Suite(args) => {
            let opts = CompareOptions {
                a: args.a,
                construction: ConstructionParams { a: args.construction_a, eps0: args.eps0, n0: None },
                dim: args.dim,
                embed_seed: args.seed,
                ..CompareOptions::default()
            };
            let mut reports = Vec::new();
            for spec in standard_suite() {
                let r = compare_dataset(&generate(&spec)?, spec.seed, &opts)?;
                reports.push(if args.timing { r } else { r.without_timing() });
            }
            print_json(&reports)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        // downstream closed the pipe (`| head`)
        Err(e) if broken_pipe(&e) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            let internal = e.downcast_ref::<atsp_core::Error>().is_some_and(|e| !e.is_input_error());
            ExitCode::from(if internal { 1 } else { 2 })
        }
    }
}

fn broken_pipe(e: &anyhow::Error) -> bool {
    use std::io::ErrorKind::BrokenPipe;
    let is_pipe = |io: &std::io::Error| io.kind() == BrokenPipe;
    e.chain().any(|c| {
        if let Some(io) = c.downcast_ref::<std::io::Error>() {
            return is_pipe(io);
        }
        match c.downcast_ref::<atsp_core::Error>() {
            Some(atsp_core::Error::Io(io)) => is_pipe(io),
            Some(atsp_core::Error::Json(j)) => j.io_error_kind() == Some(BrokenPipe),
            _ => c.downcast_ref::<serde_json::Error>().is_some_and(|j| j.io_error_kind() == Some(BrokenPipe)),
        }
    })
}

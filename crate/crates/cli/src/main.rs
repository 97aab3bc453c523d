#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hyperlsh::experiments::{csv_record, estimate_curve, CSV_HEADER};
use hyperlsh::lsh2d::covering_radius;
use hyperlsh::validate::Validator;
use hyperlsh::{sample_ball, LshIndex, PairSelection, PoincarePoint, Point, RadialLaw, SamplerRadius};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

mod records;

/// On-disk index: record ids in data-file order next to the core index blob.
#[derive(Serialize, Deserialize)]
struct IndexFile {
    ids: Vec<u64>,
    index: Box<RawValue>,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Validation(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Validation(_) => 3,
        }
    }
}

impl From<hyperlsh::Error> for CliError {
    fn from(e: hyperlsh::Error) -> Self {
        match e {
            hyperlsh::Error::InvalidParameter(m) => CliError::Usage(m),
            other => CliError::Data(other.to_string()),
        }
    }
}

fn io_err(path: &str) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Data(format!("{path}: {e}"))
}

#[derive(Parser)]
#[command(name = "hyperlsh", version, about = "Locality-sensitive hashing in hyperbolic space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Radial {
    HyperbolicVolume,
    UniformRadius,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutModel {
    Ball,
    Halfspace,
}

#[derive(Subcommand)]
enum Command {
    /// Sample points in a hyperbolic ball and write them as JSONL.
    Gen {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        n: usize,
        /// Hyperbolic radius of the ball.
        #[arg(long)]
        radius: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: String,
        #[arg(long, value_enum, default_value = "hyperbolic-volume")]
        radial: Radial,
        #[arg(long, value_enum, default_value = "ball")]
        model: OutModel,
    },
    /// Estimate p1, p2 and rho for a grid of c and write CSV.
    Rho {
        #[arg(long)]
        data: String,
        #[arg(long)]
        r: f64,
        /// Comma-separated, ascending, every value > 1.
        #[arg(long, value_delimiter = ',', required = true)]
        c_grid: Vec<f64>,
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: String,
        /// Only use pairs in [0.9 r, r] and [c r, 1.1 c r].
        #[arg(long)]
        boundary: bool,
        /// Fixed sampler radius; defaults to the data covering radius.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Build or query an ANN index.
    #[command(subcommand)]
    Index(IndexCommand),
    /// Run a numerical validator (or `all`).
    Validate {
        which: String,
    },
}

#[derive(Subcommand)]
enum IndexCommand {
    Build {
        #[arg(long)]
        data: String,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: String,
        /// Labels per table; requires --l.
        #[arg(long, requires = "l")]
        k: Option<usize>,
        /// Number of tables; requires --k.
        #[arg(long, requires = "k")]
        l: Option<usize>,
    },
    Query {
        #[arg(long)]
        index: String,
        /// A point record, e.g. '{"model":"ball","coords":[0.1,0.2]}'.
        #[arg(long)]
        point: String,
        /// Candidate budget; defaults to 3L.
        #[arg(long)]
        budget: Option<usize>,
    },
}

fn create(path: &str) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(io_err(path))
}

fn cmd_gen(d: usize, n: usize, radius: f64, seed: u64, out: &str, radial: Radial, model: OutModel) -> Result<(), CliError> {
    let law = match radial {
        Radial::HyperbolicVolume => RadialLaw::HyperbolicVolume,
        Radial::UniformRadius => RadialLaw::UniformRadius,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = sample_ball(d, radius, n, law, &mut rng)?;
    let points = pts
        .into_iter()
        .map(|p| match model {
            OutModel::Ball => Ok(Point::from(p)),
            OutModel::Halfspace => hyperlsh::poincare_to_halfspace(&p).map(Point::from),
        })
        .collect::<hyperlsh::Result<Vec<_>>>()?;
    let mut w = create(out)?;
    records::write_points(&mut w, &points).map_err(io_err(out))?;
    w.flush().map_err(io_err(out))
}

#[allow(clippy::too_many_arguments)]
fn cmd_rho(
    data: &str,
    r: f64,
    c_grid: &[f64],
    reps: usize,
    seed: u64,
    out: &str,
    boundary: bool,
    radius: Option<f64>,
) -> Result<(), CliError> {
    if !(r > 0.0) {
        return Err(CliError::Usage(format!("--r must be positive, got {r}")));
    }
    if c_grid.iter().any(|c| !(*c > 1.0)) || c_grid.windows(2).any(|w| w[0] > w[1]) {
        return Err(CliError::Usage("--c-grid must be ascending with every value > 1".into()));
    }
    if reps == 0 {
        return Err(CliError::Usage("--reps must be at least 1".into()));
    }
    let (_, points) = records::read_points(data)?;
    let ball: Vec<PoincarePoint> = points.iter().map(Point::to_poincare).collect::<hyperlsh::Result<_>>()?;
    if ball.is_empty() {
        return Err(CliError::Data(format!("{data} contains no points")));
    }
    let (sampler, r_hyp) = match radius {
        Some(v) => (SamplerRadius::Fixed(v), v),
        None => (SamplerRadius::Adaptive, covering_radius(&ball)?),
    };
    let selection = if boundary { PairSelection::Boundary } else { PairSelection::Threshold };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let results = estimate_curve(&ball, r, c_grid, sampler, selection, reps, &mut rng)?;
    let mut w = csv::Writer::from_writer(create(out)?);
    let csv_err = |e: csv::Error| CliError::Data(format!("{out}: {e}"));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    let d = ball[0].dim();
    for (c, res) in c_grid.iter().zip(&results) {
        if let Err(e) = res {
            eprintln!("c = {c}: {e}");
        }
        w.write_record(csv_record(d, ball.len(), r_hyp, r, *c, res, seed)).map_err(csv_err)?;
    }
    w.flush().map_err(io_err(out))
}

fn cmd_index_build(
    data: &str,
    r: f64,
    c: f64,
    seed: u64,
    out: &str,
    overrides: Option<(usize, usize)>,
) -> Result<(), CliError> {
    let (ids, points) = records::read_points(data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let index = LshIndex::build(points, r, c, &mut rng, overrides)?;
    let p = index.params();
    eprintln!("built {} points, K = {}, L = {}", index.len(), p.k, p.l);
    let raw = RawValue::from_string(index.to_json()?).map_err(|e| CliError::Data(e.to_string()))?;
    let file = IndexFile { ids, index: raw };
    let mut w = create(out)?;
    serde_json::to_writer(&mut w, &file).map_err(|e| CliError::Data(format!("{out}: {e}")))?;
    w.flush().map_err(io_err(out))
}

fn cmd_index_query(index: &str, point: &str, budget: Option<usize>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(index).map_err(io_err(index))?;
    let file: IndexFile = serde_json::from_str(&text).map_err(|e| CliError::Data(format!("{index}: {e}")))?;
    let ids = file.ids;
    let index = LshIndex::from_json(file.index.get())?;
    if ids.len() != index.len() {
        return Err(CliError::Data("index file has mismatched id list".into()));
    }
    let q = records::parse_record(point)?.to_point()?;
    let budget = budget.unwrap_or_else(|| index.default_budget());
    if budget == 0 {
        return Err(CliError::Usage("--budget must be at least 1".into()));
    }
    match index.query(&q, budget)? {
        Some((pos, dist)) => println!("{},{dist}", ids[pos as usize]),
        None => println!("none"),
    }
    Ok(())
}

fn cmd_validate(which: &str) -> Result<(), CliError> {
    let validators: Vec<Validator> = if which == "all" {
        Validator::ALL.to_vec()
    } else {
        vec![which.parse().map_err(CliError::Usage)?]
    };
    let mut failed = Vec::new();
    for v in validators {
        let report = v.run();
        print!("{report}");
        if !report.passed() {
            failed.push(v.name());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!("failed: {}", failed.join(", "))))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Gen { d, n, radius, seed, out, radial, model } => cmd_gen(d, n, radius, seed, &out, radial, model),
        Command::Rho { data, r, c_grid, reps, seed, out, boundary, radius } => {
            cmd_rho(&data, r, &c_grid, reps, seed, &out, boundary, radius)
        }
        Command::Index(IndexCommand::Build { data, r, c, seed, out, k, l }) => {
            cmd_index_build(&data, r, c, seed, &out, k.zip(l))
        }
        Command::Index(IndexCommand::Query { index, point, budget }) => cmd_index_query(&index, &point, budget),
        Command::Validate { which } => cmd_validate(&which),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("usage error: {m}"),
                CliError::Data(m) => eprintln!("error: {m}"),
                CliError::Validation(m) => eprintln!("validation failed: {m}"),
            }
            ExitCode::from(e.code())
        }
    }
}

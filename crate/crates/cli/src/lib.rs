//! Command-line front end for `setreach`.
//!
//! Exit codes: 0 safe, 1 unknown, 2 falsified, 3 any error (including bad
//! arguments). Subcommands that do not produce a verdict exit 0 on success.

pub mod error;
pub mod plot;
pub mod report;
pub mod spec;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use setreach::{
    certify_homeomorphism, extract_subset, monte_carlo, verify, Activation, Domain, Mode, Network,
    Status, VerificationProblem,
};

pub use error::{CliError, CliResult};
use error::{read, usage, write};
use plot::{CellKind, Plot, Rect};
use report::{CompareRow, VerdictReport};
use spec::{parse_box, parse_grid, ProblemSpec};

pub const EXIT_ERROR: i32 = 3;

/// Per-dimension `[lo, hi]` pairs (an alias so clap treats it as one value).
pub type Bounds = Vec<[f64; 2]>;
pub type Counts = Vec<usize>;

#[derive(Debug, Parser)]
#[command(name = "setreach", version, about = "Set-boundary reachability verification for smooth networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether every output over the input box lies in the safe box.
    Verify(ProblemArgs),
    /// Run boundary, subset and full modes on the same grid and tabulate them.
    Compare(ProblemArgs),
    /// Classify grid cells by the sign of the interval Jacobian determinant.
    Certify(ProblemArgs),
    /// Sample the input box and write input/output pairs as CSV.
    Mc(McArgs),
    /// Render reach-cell and sample CSVs as an SVG.
    Plot(PlotArgs),
    /// Write a seeded random network as model JSON.
    Generate(GenerateArgs),
}

#[derive(Debug, Default, Args)]
pub struct ProblemArgs {
    /// Problem spec JSON; flags override its fields.
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Input box, "lo,hi;lo,hi;...".
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    pub input: Option<Bounds>,
    /// Safe box, "lo,hi;lo,hi;...".
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    pub safe: Option<Bounds>,
    /// box | zono
    #[arg(long, value_parser = parse_domain)]
    pub domain: Option<Domain>,
    /// boundary | subset | full | auto
    #[arg(long, value_parser = parse_mode)]
    pub mode: Option<Mode>,
    /// Per-dimension cell counts, "k" or "k,k,...".
    #[arg(long, value_parser = parse_grid)]
    pub grid: Option<Counts>,
    #[arg(long = "max-refine")]
    pub max_refine: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Monte-Carlo samples used to falsify unknown verdicts (0 disables).
    #[arg(long)]
    pub falsify_samples: Option<usize>,
    /// Output file (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write propagated cells as CSV.
    #[arg(long)]
    pub cells: Option<PathBuf>,
}

impl ProblemArgs {
    pub fn resolve(&self) -> CliResult<ProblemSpec> {
        let base = match &self.spec {
            Some(p) => ProblemSpec::load(p)?,
            None => ProblemSpec::default(),
        };
        Ok(base.overlay(ProblemSpec {
            model: self.model.clone(),
            input: self.input.clone(),
            safe: self.safe.clone(),
            domain: self.domain,
            mode: self.mode,
            grid: self.grid.clone(),
            max_refinements: self.max_refine,
            seed: self.seed,
            falsify_samples: self.falsify_samples,
            out: self.out.clone(),
            cells: self.cells.clone(),
        }))
    }
}

#[derive(Debug, Args)]
pub struct McArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long, short = 'n', default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    /// Cell CSV from a full run (drawn blue); repeatable.
    #[arg(long)]
    pub full: Vec<PathBuf>,
    /// Cell CSV from a boundary or subset run (drawn red); repeatable.
    #[arg(long, alias = "subset")]
    pub boundary: Vec<PathBuf>,
    /// Monte-Carlo CSV (drawn yellow).
    #[arg(long)]
    pub mc: Option<PathBuf>,
    /// Safe box outline (drawn green).
    #[arg(long, value_parser = parse_box, allow_hyphen_values = true)]
    pub safe: Option<Bounds>,
    /// Output dimensions to plot.
    #[arg(long, num_args = 2, value_names = ["I", "J"])]
    pub proj: Option<Vec<usize>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Layer widths, e.g. "2,5,2".
    #[arg(long, value_parser = parse_grid)]
    pub dims: Counts,
    #[arg(long, default_value = "tanh", value_parser = parse_activation)]
    pub activation: Activation,
    #[arg(long, default_value = "linear", value_parser = parse_activation)]
    pub output_activation: Activation,
    /// Weights and biases are uniform in [-scale, scale].
    #[arg(long, default_value_t = 1.0)]
    pub scale: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_domain(s: &str) -> Result<Domain, String> {
    s.parse().map_err(|e: setreach::Error| e.to_string())
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: setreach::Error| e.to_string())
}

fn parse_activation(s: &str) -> Result<Activation, String> {
    s.parse().map_err(|e: setreach::Error| e.to_string())
}

fn emit(out: Option<&Path>, text: &str) -> CliResult<()> {
    match out {
        Some(p) => write(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_verify(args: &ProblemArgs) -> CliResult<i32> {
    let spec = args.resolve()?;
    let v = verify(&spec.problem()?)?;
    let report = VerdictReport::new(&v);
    emit(spec.out.as_deref(), &report.to_json())?;
    if spec.out.is_some() {
        println!("{} ({} cells, level {})", v.status, v.stats.cells_propagated, v.stats.refinement_level);
    }
    if let Some(p) = &spec.cells {
        write(p, &report::cells_csv(&v))?;
    }
    Ok(report::exit_code(v.status))
}

fn cmd_compare(args: &ProblemArgs) -> CliResult<i32> {
    let spec = args.resolve()?;
    let base = spec.problem()?;
    let mut rows = Vec::new();
    for mode in [Mode::Boundary, Mode::Subset, Mode::Full] {
        let p = VerificationProblem { mode, max_refinements: 0, ..base.clone() };
        rows.push(CompareRow::new(mode, &verify(&p)?));
    }
    let mut table = report::compare_table(&rows);
    let invertible = base.net.is_square()
        && base.net.input_dim() <= setreach::interval::MAX_DET_DIM
        && certify_homeomorphism(&base.net, &base.input)?.certified;
    if !invertible {
        table += "note: the network is not certified invertible on the input; the boundary row is not a valid safety proof\n";
    }
    print!("{table}");
    if let Some(p) = &spec.out {
        write(p, &(serde_json::to_string_pretty(&rows).expect("rows serialize") + "\n"))?;
    }
    Ok(0)
}

fn cmd_certify(args: &ProblemArgs) -> CliResult<i32> {
    let spec = args.resolve()?;
    let input = spec.input_box()?;
    let net = spec.network()?;
    let grid = match &spec.grid {
        Some(g) if g.len() == 1 => vec![g[0]; input.dim()],
        Some(g) => g.clone(),
        None => vec![1; input.dim()],
    };
    let ex = extract_subset(&net, &input, &grid)?;
    emit(spec.out.as_deref(), &report::certify_csv(&ex))?;
    let summary = report::certify_summary(&ex);
    if spec.out.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(0)
}

fn cmd_mc(args: &McArgs) -> CliResult<i32> {
    let spec = args.problem.resolve()?;
    let net = spec.network()?;
    let input = spec.input_box()?;
    let safe = spec.safe.as_ref().map(|_| spec.safe_box()).transpose()?;
    let mc = monte_carlo(&net, &input, args.samples, spec.seed.unwrap_or(0), safe.as_ref())?;
    emit(spec.out.as_deref(), &report::mc_csv(&mc))?;
    let hull: Vec<String> = mc.image_hull.iter().map(|d| format!("[{}, {}]", d.lo(), d.hi())).collect();
    eprintln!("samples {}  image hull {}  violations {}", args.samples, hull.join(" x "), mc.violations.len());
    Ok(if mc.violations.is_empty() { 0 } else { report::exit_code(Status::Falsified) })
}

fn cmd_plot(args: &PlotArgs) -> CliResult<i32> {
    let proj = match args.proj.as_deref() {
        Some(&[i, j]) => Some([i, j]),
        Some(_) => return Err(usage("--proj takes two dimensions")),
        None => None,
    };
    let mut plot = Plot::default();
    for (paths, kind) in [(&args.full, CellKind::Full), (&args.boundary, CellKind::Boundary)] {
        for p in paths {
            plot.cells.extend(plot::read_cells(&read(p)?, kind, proj)?);
        }
    }
    if let Some(p) = &args.mc {
        plot.points = plot::read_points(&read(p)?, proj)?;
    }
    let [i, j] = proj.unwrap_or([0, 1]);
    if let Some(s) = &args.safe {
        let [i, j] = plot::projection(s.len(), proj)?;
        plot.safe = Some(Rect { x: s[i], y: s[j], kind: CellKind::Full });
    }
    plot.labels = [format!("y{i}"), format!("y{j}")];
    emit(args.out.as_deref(), &plot::render(&plot))?;
    Ok(0)
}

fn cmd_generate(args: &GenerateArgs) -> CliResult<i32> {
    let net = Network::generate_with_output(args.seed, &args.dims, args.activation, args.output_activation, args.scale)?;
    emit(args.out.as_deref(), &(net.to_json() + "\n"))?;
    Ok(0)
}

pub fn run(cli: &Cli) -> CliResult<i32> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Mc(a) => cmd_mc(a),
        Command::Plot(a) => cmd_plot(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_ERROR,
            };
        }
    };
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

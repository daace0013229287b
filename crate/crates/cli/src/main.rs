mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hodgekit::io::MeshFormat;
use hodgekit::{Error, StarKind};

/// Harmonic cochains on simplicial meshes.
#[derive(Parser, Debug)]
#[command(name = "hodgekit", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print counts, Euler characteristic and Betti numbers as JSON.
    Info(InfoArgs),
    /// Harmonic representative of a cocycle.
    Harmonic(HarmonicArgs),
    /// Harmonic basis from an eigenproblem.
    Basis(BasisArgs),
    /// Project a cocycle onto the harmonic basis.
    Project(ProjectArgs),
    /// Harmonic cochains dual to a set of homology cycles.
    Pair(PairArgs),
    /// Run several methods on one cocycle and report sizes, times and differences.
    Compare(CompareArgs),
    /// Picket-fence cocycle of a dual path.
    CocycleFromDualPath(DualPathArgs),
    /// Write one of the built-in test meshes as JSON.
    Generate(GenerateArgs),
}

#[derive(Args, Debug, Clone)]
pub struct MeshArgs {
    /// Mesh file (.off, .json, or a Triangle/TetGen .node/.ele pair).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Mesh format; guessed from the extension when absent.
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    /// Refuse non-manifold input.
    #[arg(long)]
    pub require_manifold: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum FormatArg {
    Off,
    Json,
    Triangle,
    Tetgen,
}

impl From<FormatArg> for MeshFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Off => MeshFormat::Off,
            FormatArg::Json => MeshFormat::NativeJson,
            FormatArg::Triangle => MeshFormat::TriangleNodeEle,
            FormatArg::Tetgen => MeshFormat::TetgenNodeEle,
        }
    }
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarArg {
    Dec,
    Whitney,
}

#[derive(Args, Debug, Clone)]
pub struct CalcArgs {
    #[arg(long, value_enum, default_value = "dec")]
    pub star: StarArg,
    /// Accept circumcentric stars with nonpositive entries.
    #[arg(long)]
    pub allow_indefinite_star: bool,
    /// Largest dense factorization or eigenproblem.
    #[arg(long, default_value_t = 4000)]
    pub dense_limit: usize,
}

impl CalcArgs {
    pub fn kind(&self) -> StarKind {
        star_kind(self.star, self.allow_indefinite_star)
    }
}

pub fn star_kind(s: StarArg, allow_indefinite: bool) -> StarKind {
    match s {
        StarArg::Dec => StarKind::Dec { allow_indefinite },
        StarArg::Whitney => StarKind::Whitney,
    }
}

#[derive(Args, Debug, Clone)]
pub struct SolveArgs {
    /// Relative residual target of the iterative solver.
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[arg(long, default_value_t = 100_000)]
    pub max_iter: usize,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum MethodArg {
    Ls,
    Projection,
    GuYau,
    Desbrun,
}

impl From<MethodArg> for hodgekit::harmonic::Method {
    fn from(m: MethodArg) -> Self {
        use hodgekit::harmonic::Method;
        match m {
            MethodArg::Ls => Method::Ls,
            MethodArg::Projection => Method::Projection,
            MethodArg::GuYau => Method::GuYau,
            MethodArg::Desbrun => Method::Desbrun,
        }
    }
}

#[derive(Args, Debug)]
pub struct InfoArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Skip Betti numbers above this many simplices per dimension.
    #[arg(long, default_value_t = 5000)]
    pub dense_limit: usize,
}

#[derive(Args, Debug)]
pub struct HarmonicArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub calc: CalcArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    /// Cochain file with the input cocycle.
    #[arg(long)]
    pub cocycle: PathBuf,
    /// Expected degree of the cocycle.
    #[arg(long)]
    pub p: Option<usize>,
    #[arg(long, value_enum, default_value = "ls")]
    pub method: MethodArg,
    /// Fix alpha to zero at this vertex (p = 1, least squares only).
    #[arg(long)]
    pub pin_vertex: Option<usize>,
    /// Output files are named `<prefix>.h.cochain`, `<prefix>.diagnostics.json`, ...
    #[arg(long)]
    pub out_prefix: PathBuf,
    /// Also write `<prefix>.vtk` with the Whitney proxy field (p = 1).
    #[arg(long)]
    pub vtk: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisMethodArg {
    EigenDirect,
    EigenMixed,
    /// Both methods, reporting the principal angle between their spans.
    Both,
}

#[derive(Args, Debug)]
pub struct BasisArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub calc: CalcArgs,
    #[arg(long)]
    pub p: usize,
    #[arg(long, value_enum, default_value = "eigen-direct")]
    pub method: BasisMethodArg,
    /// Eigenvalues below this fraction of the largest count as zero.
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    /// Largest accepted relative Laplacian residual of a basis column.
    #[arg(long, default_value_t = 1e-8)]
    pub harmonic_tol: f64,
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Args, Debug)]
pub struct ProjectArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub calc: CalcArgs,
    #[arg(long)]
    pub cocycle: PathBuf,
    /// Basis file (cochain blocks); computed with the direct method when absent.
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long)]
    pub out_prefix: PathBuf,
    #[arg(long)]
    pub vtk: bool,
}

#[derive(Args, Debug)]
pub struct PairArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub calc: CalcArgs,
    /// Chain file with one integer cycle per block.
    #[arg(long)]
    pub cycles: PathBuf,
    #[arg(long)]
    pub basis: Option<PathBuf>,
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Args, Debug)]
pub struct CompareArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    #[command(flatten)]
    pub solve: SolveArgs,
    #[arg(long)]
    pub cocycle: PathBuf,
    #[arg(long = "method", value_enum, value_delimiter = ',', default_value = "ls,desbrun")]
    pub methods: Vec<MethodArg>,
    #[arg(long = "star", value_enum, value_delimiter = ',', default_value = "dec,whitney")]
    pub stars: Vec<StarArg>,
    #[arg(long)]
    pub allow_indefinite_star: bool,
    #[arg(long, default_value_t = 4000)]
    pub dense_limit: usize,
    /// Write `<prefix>.compare.json`; the report goes to stdout otherwise.
    #[arg(long)]
    pub out_prefix: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("route").required(true).args(["path", "from"])))]
pub struct DualPathArgs {
    #[command(flatten)]
    pub mesh: MeshArgs,
    /// Top-simplex indices, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub path: Option<Vec<usize>>,
    /// Follow the straight segment from this point (comma separated coordinates).
    #[arg(long, value_delimiter = ',', requires = "to", allow_negative_numbers = true)]
    pub from: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', requires = "from", allow_negative_numbers = true)]
    pub to: Option<Vec<f64>>,
    /// The path returns to its first simplex.
    #[arg(long)]
    pub closed: bool,
    /// Output cochain file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(ValueEnum, Debug, Clone, Copy)]
pub enum Shape {
    Torus,
    FourHoledDisc,
    Annulus,
    Square,
    SolidAnnulus,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub shape: Shape,
    /// Lattice spacing (planar shapes) or cube size (solid annulus).
    #[arg(long)]
    pub spacing: Option<f64>,
    /// Torus resolution as `<around the axis>,<around the tube>`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pub resolution: Option<Vec<usize>>,
    /// Torus radii as `<major>,<minor>`.
    #[arg(long, value_delimiter = ',', num_args = 1, default_value = "4,1")]
    pub radii: Vec<f64>,
    #[arg(long)]
    pub out: PathBuf,
}

/// Stable exit codes.
pub mod exit {
    pub const PARSE: u8 = 2;
    pub const BAD_COCHAIN: u8 = 3;
    pub const SOLVER: u8 = 4;
    pub const CONSISTENCY: u8 = 5;
}

pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::Io(_)
        | Error::Json(_)
        | Error::VertexIndex { .. }
        | Error::InvalidComplex(_)
        | Error::NonManifold(_)
        | Error::Dimension(_) => exit::PARSE,
        Error::NotCocycle { .. } | Error::Shape(_) | Error::DualPath(_) => exit::BAD_COCHAIN,
        Error::Degenerate { .. }
        | Error::IndefiniteStar { .. }
        | Error::SizeLimit { .. }
        | Error::Singular(_)
        | Error::NotPositiveDefinite(_)
        | Error::Inconsistent { .. } => exit::SOLVER,
        Error::BettiMismatch { .. } | Error::SigmaNotNegligible { .. } | Error::NotHarmonic { .. } => exit::CONSISTENCY,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Info(a) => commands::info(&a),
        Command::Harmonic(a) => commands::harmonic(&a),
        Command::Basis(a) => commands::basis(&a),
        Command::Project(a) => commands::project(&a),
        Command::Pair(a) => commands::pair(&a),
        Command::Compare(a) => commands::compare(&a),
        Command::CocycleFromDualPath(a) => commands::cocycle_from_dual_path(&a),
        Command::Generate(a) => commands::generate(&a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hodgekit: {e}");
            if let Error::IndefiniteStar { .. } = e {
                eprintln!("hint: use --star whitney, or --allow-indefinite-star to accept it");
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

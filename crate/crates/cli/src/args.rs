use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "cr", version, about = "CR invariants of real-algebraic hypersurfaces")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Levi form, signature and verdict at one point
    Levi {
        #[command(flatten)]
        at: SurfacePoint,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Seeded Levi scan over sampled points of the surface, written as CSV
    Scan {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// JSON: {"center": point, "radius": r, "direction": "radial" | point, "max_abs": [null | bound, ...]}
        #[arg(long)]
        region: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Segre polynomial of a base point
    Segre {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        base: String,
    },
    /// Decide whether a polynomial map sends one surface into another
    MapCheck {
        #[arg(long)]
        surface: PathBuf,
        #[arg(long)]
        target: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long, conflicts_with = "numeric")]
        exact: bool,
        #[arg(long)]
        numeric: bool,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Normalize to weight 4 at a point and extract the (2,2) curvature tensor
    Cmw {
        #[command(flatten)]
        at: SurfacePoint,
        /// Tensor file readable by `cone-check`
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sign of a tensor on the Levi null cone
    ConeCheck {
        #[arg(long)]
        tensor: PathBuf,
        #[command(flatten)]
        cone: ConeArgs,
    },
    /// Hyperquadric embedding obstruction at a point
    Obstruction {
        #[command(flatten)]
        at: SurfacePoint,
        #[command(flatten)]
        cone: ConeArgs,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// Also write the JSON report here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Named hypersurfaces
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Run the expected checks of a catalog entry; exit 0 iff all pass
    Check {
        id: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        /// m-eps only: comma-separated eps values for a signature stability sweep
        #[arg(long)]
        eps_sweep: Option<String>,
        #[arg(long, default_value_t = 200)]
        sweep_samples: usize,
    },
}

#[derive(Subcommand, Debug)]
pub enum CatalogAction {
    List {
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    Make {
        id: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug)]
pub struct SurfacePoint {
    #[arg(long)]
    pub surface: PathBuf,
    /// JSON array; coordinates are numbers, "p/q" strings or [re, im] pairs
    #[arg(long)]
    pub point: String,
}

#[derive(Args, Debug)]
pub struct ConeArgs {
    #[arg(long, default_value_t = 20000)]
    pub samples: usize,
    #[arg(long)]
    pub refine: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1e-10)]
    pub rel_tol: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Text,
    Json,
}

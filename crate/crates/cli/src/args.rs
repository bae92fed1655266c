use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "sharpcomm",
    version,
    about = "Numerical laboratory for weighted commutator inequalities"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct Global {
    /// Write the tabular output (samples or sweep rows) as CSV.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for randomized inputs; bound as `seed` in ids.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Grid resolution L (2^L cells per axis).
    #[arg(long, global = true, default_value_t = 8)]
    pub resolution: u32,
    #[arg(long, global = true, default_value_t = 1)]
    pub dim: usize,
    /// Relative quadrature tolerance for the radial sweeps.
    #[arg(long, global = true, default_value_t = 1e-10)]
    pub tol: f64,
    /// Tree levels `a..b` (the domain is level 0, finer cubes are negative).
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub levels: Option<String>,
    /// Domain `a:b`, meaning `[a,b)^n`.
    #[arg(long, global = true, allow_hyphen_values = true, default_value = "-4:4")]
    pub domain: String,
    /// JSON object of flag values; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyArg {
    Dyadic,
    Shifted,
    Centered,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FlavorArg {
    Dyadic,
    AllCubes,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Luxemburg norm of f on a cube.
    Luxemburg {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        phi: String,
        /// Tree cube `k:i1,i2,...`; defaults to the whole domain.
        #[arg(long, allow_hyphen_values = true)]
        cube: Option<String>,
    },
    /// Orlicz maximal function M_{Φ,α} f.
    Maximal {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        phi: String,
        #[arg(long, default_value = "0")]
        alpha: String,
        #[arg(long, value_enum, default_value_t = FlavorArg::Dyadic)]
        flavor: FlavorArg,
        /// Report the value at a point (coordinates comma separated); repeatable.
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// A_{p,q} lattice constant of a weight.
    Apq {
        #[arg(long, allow_hyphen_values = true)]
        w: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Dyadic)]
        family: FamilyArg,
    },
    /// Bump constant of a weight pair.
    Bump {
        #[arg(long, allow_hyphen_values = true)]
        u: String,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long = "A")]
        a: String,
        #[arg(long = "B")]
        b: String,
        #[arg(long)]
        p: String,
        #[arg(long)]
        q: Option<String>,
        #[arg(long, default_value = "0")]
        alpha: String,
        #[arg(long, allow_hyphen_values = true)]
        delta: Option<String>,
        #[arg(long, value_enum, default_value_t = FamilyArg::Dyadic)]
        family: FamilyArg,
    },
    /// BMO lattice norm.
    Bmo {
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, value_enum, default_value_t = FamilyArg::Dyadic)]
        family: FamilyArg,
    },
    /// Apply an operator, optionally as a commutator.
    Transform {
        /// `hilbert`, `haarshift:petermichl`, `ialpha:<α>` or `ialphad:<α>`.
        op: String,
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        commutator_symbol: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        at: Vec<String>,
    },
    /// Stopping-time decompositions.
    Decompose {
        #[command(subcommand)]
        kind: Decompose,
    },
    /// Sharpness sweeps.
    Sweep {
        #[command(subcommand)]
        kind: Sweep,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Decompose {
    /// Calderón–Zygmund cubes at heights h·base^k.
    Cz {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long)]
        height: String,
        /// Defaults to 4^n.
        #[arg(long)]
        base: Option<String>,
    },
    /// Lerner's local-oscillation decomposition.
    Lerner {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
    },
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sweep {
    /// Weighted Sobolev example.
    Sobolev {
        #[arg(long, default_value = "1")]
        p: String,
        #[arg(long, value_delimiter = ',', default_values = ["0.4", "0.2", "0.1", "0.05"])]
        deltas: Vec<String>,
        /// Add the A_{p,q} column, computed at the global resolution.
        #[arg(long)]
        apq: bool,
        /// Multiply the weight by this constant.
        #[arg(long, default_value = "1")]
        weight_scale: String,
    },
    /// Fractional commutator lower bound.
    FracCommutator {
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value = "4/3")]
        p: String,
        #[arg(long, value_delimiter = ',', default_values = ["0.4", "0.2", "0.1", "0.05"])]
        deltas: Vec<String>,
    },
    /// Two-weight failure at δ = 0.
    TwoWeight {
        #[arg(long, default_value = "1")]
        alpha: String,
        #[arg(long, default_value_t = 2)]
        k: u32,
        /// Radii 10^{10·2^j} for j up to this count.
        #[arg(long, default_value_t = 120)]
        squarings: usize,
    },
}

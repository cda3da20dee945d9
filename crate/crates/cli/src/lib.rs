//! `bdr`: check, scan, inspect and project soliton surfaces given as
//! definition files.

// `!(x <= tol)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod mesh;
pub mod scan;

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

pub use commands::{run, CliError};

#[derive(Debug, Parser)]
#[command(name = "bdr", version, about = "Betchov-Da Rios soliton surfaces in E4")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unit-speed, B-DR and orthogonality residuals over the grid.
    Check {
        file: PathBuf,
        /// Largest residual accepted.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Full pipeline: frames, curvatures, invariants, classification.
    Scan {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        /// Output path; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run even when the unit-speed check fails.
        #[arg(long)]
        force: bool,
        /// Classification band.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
    /// Frame and curvatures at the grid node nearest to a point.
    Frames {
        file: PathBuf,
        /// `S,T`; each may be a constant expression such as `pi/2`.
        #[arg(long, value_name = "S,T", allow_hyphen_values = true)]
        at: String,
    },
    /// Quad mesh of the surface with one coordinate dropped, as OBJ.
    Project {
        file: PathBuf,
        #[arg(long, value_enum)]
        drop: Axis,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Axis {
    X,
    Y,
    Z,
    W,
}

impl Axis {
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
            Axis::W => 3,
        }
    }
}

/// Fixed 17-significant-digit rendering used by every numeric output.
/// Negative zero prints as zero.
pub fn fmt_num(x: f64) -> String {
    let x = if x == 0.0 { 0.0 } else { x };
    format!("{x:.16e}")
}

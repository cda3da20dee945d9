use thiserror::Error;

use crate::expr::ExprError;

/// Why a grid cell cannot carry a surface-invariant report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Degeneracy {
    /// `Q` below threshold: the s-curve is straight, `N1` undefined.
    ZeroCurvature,
    /// `W` below threshold: `Psi_t` vanishes, the patch is not regular.
    ZeroSpeedInT,
}

impl std::fmt::Display for Degeneracy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Degeneracy::ZeroCurvature => f.write_str("Q below threshold"),
            Degeneracy::ZeroSpeedInT => f.write_str("W below threshold"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Expr(#[from] ExprError),

    #[error("degenerate input: vector {index} is linearly dependent on its predecessors (residual {residual:e})")]
    DegenerateInput { index: usize, residual: f64 },

    #[error("surface definition line {line}, `{key}`: {source}")]
    ExprAt {
        line: usize,
        key: String,
        #[source]
        source: ExprError,
    },

    #[error("surface definition line {line}: {message}")]
    Definition { line: usize, message: String },

    #[error("bad domain: {0}")]
    BadDomain(String),

    #[error("not unit speed: |<psi_s, psi_s> - 1| = {residual:e} at (s, t) = ({s}, {t})")]
    NotUnitSpeed { s: f64, t: f64, residual: f64 },

    #[error("degenerate normal space at (s, t) = ({s}, {t}): psi_ss and psi_t both vanish")]
    DegenerateNormalSpace { s: f64, t: f64 },

    #[error(
        "frame re-orthonormalization correction {correction:e} exceeds 1e-6 at (s, t) = ({s}, {t}); grid too coarse"
    )]
    DriftExceeded { s: f64, t: f64, correction: f64 },

    #[error("degenerate point at (s, t) = ({s}, {t}): {reason}")]
    DegeneratePoint { s: f64, t: f64, reason: Degeneracy },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

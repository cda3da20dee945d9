//! The whole chain over the grid: frames, curvatures, per-cell invariant
//! reports and classes, surface predicates.

use rayon::prelude::*;

use crate::classify::{classify_point, surface_predicates, PointClass, PointTag, SurfacePredicates};
use crate::error::{Degeneracy, Error, Result};
use crate::grid::{Cell, Grid};
use crate::invariants::{compatibility_residuals, invariant_report, is_interior, InvariantField, InvariantReport};
use crate::ptframe::{curvatures, propagate_t, propagate_t_from, CurvatureField, Frame, FrameField};
use crate::scalar::Scalar;
use crate::surface::SurfaceDef;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellResult<T> {
    pub report: InvariantReport<T>,
    pub class: PointClass<T>,
}

pub type CellOutcome<T> = std::result::Result<CellResult<T>, Degeneracy>;

#[derive(Debug, Clone)]
pub struct Analysis<T> {
    pub surface: SurfaceDef<T>,
    pub frames: FrameField<T>,
    pub curvatures: CurvatureField<T>,
    pub cells: Grid<CellOutcome<T>>,
    pub predicates: SurfacePredicates<T>,
    pub tol: T,
}

/// Runs the pipeline with the default initial frame.
pub fn analyze<T: Scalar>(sd: &SurfaceDef<T>, tol: T) -> Result<Analysis<T>> {
    let ff = propagate_t(sd)?;
    finish(sd, ff, tol)
}

/// Runs the pipeline from a given frame at the anchor node.
pub fn analyze_from<T: Scalar>(sd: &SurfaceDef<T>, init: Frame<T>, tol: T) -> Result<Analysis<T>> {
    let ff = propagate_t_from(sd, init)?;
    finish(sd, ff, tol)
}

/// Completes the pipeline for an already transported frame field.
pub fn finish<T: Scalar>(sd: &SurfaceDef<T>, ff: FrameField<T>, tol: T) -> Result<Analysis<T>> {
    let cf = curvatures(&ff, sd)?;
    let cells = {
        let field = InvariantField::new(sd, &ff, &cf)?;
        let columns: Result<Vec<Vec<CellOutcome<T>>>> = (0..sd.nt)
            .into_par_iter()
            .map(|j| (0..sd.ns).map(|i| cell_outcome(&field, Cell::new(i, j), tol)).collect())
            .collect();
        Grid::from_columns(columns?)
    };
    let predicates = surface_predicates(
        cells.values().iter().filter_map(|c| c.as_ref().ok()).map(|c| &c.report),
        tol,
    );
    Ok(Analysis {
        surface: sd.clone(),
        frames: ff,
        curvatures: cf,
        cells,
        predicates,
        tol,
    })
}

fn cell_outcome<T: Scalar>(field: &InvariantField<T>, cell: Cell, tol: T) -> Result<CellOutcome<T>> {
    match invariant_report(field, cell) {
        Ok(report) => Ok(Ok(CellResult {
            report,
            class: classify_point(&report, tol),
        })),
        Err(Error::DegeneratePoint { reason, .. }) => Ok(Err(reason)),
        Err(e) => Err(e),
    }
}

/// Counts per class, parabolic cells split by subtype.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Histogram {
    pub hyperbolic: usize,
    pub elliptic: usize,
    pub inflection_imaginary: usize,
    pub non_degenerate: usize,
    pub inflection_real: usize,
    pub inflection_flat: usize,
    pub unresolved: usize,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.hyperbolic
            + self.elliptic
            + self.inflection_imaginary
            + self.non_degenerate
            + self.inflection_real
            + self.inflection_flat
            + self.unresolved
    }

    pub fn parabolic(&self) -> usize {
        self.total() - self.hyperbolic - self.elliptic
    }
}

impl<T: Scalar> Analysis<T> {
    /// Non-degenerate cells in grid order (`j` outer, `i` inner).
    pub fn results(&self) -> impl Iterator<Item = &CellResult<T>> {
        self.cells.values().iter().filter_map(|c| c.as_ref().ok())
    }

    pub fn reports(&self) -> impl Iterator<Item = &InvariantReport<T>> {
        self.results().map(|c| &c.report)
    }

    pub fn degenerate_count(&self) -> usize {
        self.cells.values().iter().filter(|c| c.is_err()).count()
    }

    pub fn histogram(&self) -> Histogram {
        use crate::classify::ParabolicSubtype as P;
        let mut h = Histogram::default();
        for c in self.results() {
            let slot = match (c.class.tag, c.class.subtype) {
                (PointTag::Hyperbolic, _) => &mut h.hyperbolic,
                (PointTag::Elliptic, _) => &mut h.elliptic,
                (_, Some(P::InflectionImaginary)) => &mut h.inflection_imaginary,
                (_, Some(P::NonDegenerate)) => &mut h.non_degenerate,
                (_, Some(P::InflectionReal)) => &mut h.inflection_real,
                (_, Some(P::InflectionFlat)) => &mut h.inflection_flat,
                (_, _) => &mut h.unresolved,
            };
            *slot += 1;
        }
        h
    }

    /// Largest `|r_m|` of the compatibility residuals over interior cells.
    pub fn max_compatibility_residual(&self) -> T {
        let (ns, nt) = (self.surface.ns, self.surface.nt);
        (0..nt)
            .flat_map(|j| (0..ns).map(move |i| Cell::new(i, j)))
            .filter(|&c| is_interior(c, ns, nt))
            .flat_map(|c| compatibility_residuals(&self.curvatures, c))
            .fold(T::zero(), |m, r| m.max(r.abs()))
    }
}

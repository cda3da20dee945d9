//! The closed-form invariants against invariants of the immersion computed
//! directly from its derivatives.

mod common;

use bdr_core::analysis::analyze;
use bdr_core::grid::Cell;
use bdr_core::invariants::is_interior;
use common::*;

struct Errors {
    gaussian: f64,
    mean: f64,
    normal: f64,
    delta: f64,
}

fn worst_errors(c: [&str; 4], ns: usize, nt: usize) -> Errors {
    let sd = surface(c, ns, nt);
    let jets = sd.jet_grid().unwrap();
    let a = analyze(&sd, 1e-8).unwrap();
    assert_eq!(a.degenerate_count(), 0);
    let mut e = Errors {
        gaussian: 0.0,
        mean: 0.0,
        normal: 0.0,
        delta: 0.0,
    };
    for r in a.reports() {
        let (i, j) = r.cell;
        if !is_interior(Cell::new(i, j), ns, nt) {
            continue;
        }
        let d = direct_invariants(&jets[(i, j)]);
        let rel = |x: f64, y: f64| (x - y).abs() / 1f64.max(x.abs()).max(y.abs());
        e.gaussian = e.gaussian.max(rel(r.gaussian, d.gaussian));
        e.mean = e.mean.max(rel(r.mean_norm2, d.mean_norm2));
        e.normal = e.normal.max(rel(r.torsion.abs(), d.normal_curvature_abs));
        e.delta = e.delta.max(rel(r.delta_p, d.delta_p));
    }
    e
}

fn assert_errors(name: &str, e: Errors, tol: f64) {
    assert!(e.gaussian <= tol, "{name}: K off by {:e}", e.gaussian);
    assert!(e.mean <= tol, "{name}: |H|^2 off by {:e}", e.mean);
    assert!(e.normal <= tol, "{name}: |K_N| off by {:e}", e.normal);
    assert!(e.delta <= tol, "{name}: Delta(p) off by {:e}", e.delta);
}

#[test]
fn soliton_matches_direct_geometry() {
    assert_errors("soliton", worst_errors(SOLITON, 257, 33), 1e-10);
}

#[test]
fn helix_matches_direct_geometry() {
    assert_errors("helix", worst_errors(HELIX, 257, 33), 1e-10);
}

#[test]
fn clifford_matches_direct_geometry() {
    assert_errors("clifford", worst_errors(CLIFFORD, 257, 65), 1e-10);
}

#[test]
fn clifford_has_nonzero_normal_curvature_and_delta() {
    let sd = surface(CLIFFORD, 65, 17);
    let jets = sd.jet_grid().unwrap();
    let d = direct_invariants(&jets[(10, 5)]);
    assert!(d.normal_curvature_abs > 0.1 && d.delta_p < -0.1, "{d:?}");
}

#[test]
fn soliton_with_constants_is_still_a_flat_cylinder() {
    let sd = with_constants(surface(SOLITON, 257, 33), 0.3, 0.2, 0.1);
    let a = analyze(&sd, 1e-8).unwrap();
    let h = a.histogram();
    assert_eq!(h.inflection_flat, h.total(), "{h:?}");
    assert!(a.reports().all(|r| r.gaussian.abs() < 1e-12 && r.b.abs() < 1e-12));
}

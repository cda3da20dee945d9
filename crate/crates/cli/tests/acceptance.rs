//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::{Command, ExitCode};
use std::time::Instant;

use bdr_cli::mesh::read_obj_vertices;
use bdr_core::analysis::{analyze, finish, Analysis};
use bdr_core::classify::{classify_point, delta_p_det, ParabolicSubtype, PointTag};
use bdr_core::grid::{d_ds, Cell, Grid};
use bdr_core::invariants::{compatibility_residuals, is_interior, InvariantReport};
use bdr_core::ptframe::CurvatureField;
use bdr_core::ptframe::{axis_angle, curvatures, derive_curvature_field, propagate_t, propagate_t_rotated, rotate3};
use bdr_core::surface::{load_surface, Params, SurfaceDef};

const TOL: f64 = 1e-8;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn corpus_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../surfaces").join(name)
}

fn load(name: &str) -> SurfaceDef<f64> {
    let text = std::fs::read_to_string(corpus_path(name)).unwrap();
    load_surface(&text).unwrap()
}

fn soliton() -> SurfaceDef<f64> {
    load("soliton.bdr")
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / 1f64.max(x.abs()).max(y.abs())
}

fn gate(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn bdr_verification() -> Outcome {
    let r = soliton().residuals().unwrap();
    gate(
        r.bdr <= 1e-10 && r.unit_speed <= 1e-10,
        format!(
            "max B-DR residual {:.2e}, max unit-speed residual {:.2e}",
            r.bdr, r.unit_speed
        ),
    )
}

fn frame_fidelity() -> Outcome {
    let sd = soliton();
    let ff = propagate_t(&sd).unwrap();
    let cf = curvatures(&ff, &sd).unwrap();
    let jets = sd.jet_grid().unwrap();
    let gram = ff.max_gram_deviation();
    let (mut recon, mut q) = (0.0f64, 0.0f64);
    for j in 0..sd.nt {
        for i in 0..sd.ns {
            let f = &ff.frames[(i, j)];
            let k = cf.k_at(i, j);
            let rebuilt = f.p[0] * k[0] + f.p[1] * k[1] + f.p[2] * k[2];
            recon = recon.max((rebuilt - jets[(i, j)].psi_ss).norm());
            q = q.max((cf.q[(i, j)] - FRAC_1_SQRT_2).abs());
        }
    }
    gate(
        gram <= 1e-9 && recon <= 1e-8 && q <= 1e-8,
        format!("Gram deviation {gram:.2e}, psi_ss reconstruction {recon:.2e}, |Q - 1/sqrt 2| {q:.2e}"),
    )
}

fn example_invariants() -> Outcome {
    let a = analyze(&soliton(), TOL).unwrap();
    let (mut h, mut kn, mut g22, mut w) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for r in a.reports() {
        h = h.max(r.h_inv.abs());
        kn = kn.max(r.torsion.abs());
        g22 = g22.max((r.tangent.g22 - 0.125).abs());
        w = w.max((r.tangent.w - 1.0 / (2.0 * SQRT_2)).abs());
    }
    let cells = a.reports().count();
    gate(
        a.degenerate_count() == 0 && h <= 1e-7 && kn <= 1e-7 && g22 <= 1e-8 && w <= 1e-8,
        format!(
            "{cells} cells, max |h| {h:.2e}, max |K_N| {kn:.2e}, |g22 - 1/8| {g22:.2e}, |W - 1/(2 sqrt 2)| {w:.2e}"
        ),
    )
}

fn gaussian_grid(a: &Analysis<f64>) -> Grid<f64> {
    Grid::from_fn(a.surface.ns, a.surface.nt, |i, j| {
        a.cells[(i, j)].as_ref().unwrap().report.gaussian
    })
}

fn gaussian_shape() -> Outcome {
    let sd = soliton();
    let a = analyze(&sd, TOL).unwrap();
    let k = gaussian_grid(&a);
    let (ns, nt) = (sd.ns, sd.nt);
    let mut spread = 0.0f64;
    for i in 0..ns {
        let column: Vec<f64> = (0..nt).map(|j| k[(i, j)]).collect();
        let hi = column.iter().cloned().fold(f64::MIN, f64::max);
        let lo = column.iter().cloned().fold(f64::MAX, f64::min);
        spread = spread.max(hi - lo);
    }
    let kss = d_ds(&k, 2, sd.hs());
    let mut ode = 0.0f64;
    for j in 0..nt {
        for i in 0..ns {
            if is_interior(Cell::new(i, j), ns, nt) {
                ode = ode.max((kss[(i, j)] + k[(i, j)] / 2.0).abs());
            }
        }
    }
    // K = 2 (q2 cos(s / sqrt 2) + q1 sin(s / sqrt 2)); a phase r only rotates (q1, q2)
    let basis = |i: usize| {
        let x = sd.node(i, 0).0 / SQRT_2;
        (2.0 * x.sin(), 2.0 * x.cos())
    };
    let (i1, i2, jm) = (ns / 5, ns / 3, nt / 2);
    let ((a1, b1), (a2, b2)) = (basis(i1), basis(i2));
    let det = a1 * b2 - a2 * b1;
    let q1 = (k[(i1, jm)] * b2 - k[(i2, jm)] * b1) / det;
    let q2 = (a1 * k[(i2, jm)] - a2 * k[(i1, jm)]) / det;
    let mut fit = 0.0f64;
    for j in 0..nt {
        for i in 0..ns {
            let (x, y) = basis(i);
            fit = fit.max((q1 * x + q2 * y - k[(i, j)]).abs());
        }
    }
    gate(
        spread <= 1e-7 && ode <= 1e-5 && fit <= 1e-6,
        format!("fiber spread {spread:.2e}, |K_ss + K/2| {ode:.2e}, fitted (q1, q2) = ({q1:.2e}, {q2:.2e}), fit error {fit:.2e}"),
    )
}

fn three_surfaces() -> Vec<(&'static str, SurfaceDef<f64>)> {
    vec![
        ("soliton", soliton()),
        ("helix", load("helix.bdr")),
        ("clifford", load("clifford.bdr")),
    ]
}

fn identity_errors(r: &InvariantReport<f64>) -> [f64; 5] {
    let (q, w, a, b, c) = (r.q, r.tangent.w, r.a, r.b, r.c);
    let hk = (b * b * w * w + c * c * (a + q * q * w * w).powi(2)) / w.powi(8);
    let mean = (r.mean - r.checks.mean_from_traces).norm() / 1f64.max(r.mean_norm());
    [
        rel(r.k_inv, 4.0 * r.delta_p),
        rel(r.h_inv, r.torsion),
        rel(r.h_inv * r.h_inv - r.k_inv, hk),
        rel(r.gaussian, r.checks.gaussian_from_shape),
        mean,
    ]
}

fn identity_suite() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, sd) in three_surfaces() {
        let res = sd.residuals().unwrap();
        let checked = res.bdr <= 1e-10 && res.unit_speed <= 1e-10;
        let a = analyze(&sd, TOL).unwrap();
        let mut worst = [0.0f64; 5];
        for r in a.reports() {
            for (w, e) in worst.iter_mut().zip(identity_errors(r)) {
                *w = w.max(e);
            }
        }
        let max = worst.iter().cloned().fold(0.0, f64::max);
        ok &= checked && max <= 1e-8 && a.degenerate_count() == 0;
        detail.push(format!(
            "{name} {max:.1e}{}",
            if checked { "" } else { " (B-DR check failed)" }
        ));
    }
    gate(ok, format!("worst relative error: {}", detail.join(", ")))
}

fn wintgen() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for (name, sd) in three_surfaces() {
        let a = analyze(&sd, TOL).unwrap();
        let excess = a
            .reports()
            .map(|r| r.gaussian + r.torsion.abs() - r.mean_norm2)
            .fold(f64::MIN, f64::max);
        ok &= excess <= 1e-9;
        detail.push(format!("{name} {excess:.2e}"));
    }
    gate(ok, format!("max K + |K_N| - |H|^2: {}", detail.join(", ")))
}

fn worst_compatibility(cf: &CurvatureField<f64>) -> f64 {
    let (ns, nt) = (cf.ns(), cf.nt());
    let mut worst = 0.0f64;
    for j in 0..nt {
        for i in 0..ns {
            let cell = Cell::new(i, j);
            if is_interior(cell, ns, nt) {
                worst = compatibility_residuals(cf, cell)
                    .iter()
                    .fold(worst, |m, r| m.max(r.abs()));
            }
        }
    }
    worst
}

fn compatibility() -> Outcome {
    let sd = soliton();
    let ff = propagate_t(&sd).unwrap();
    let cf = curvatures(&ff, &sd).unwrap();
    let base = worst_compatibility(&cf);
    let mut k = cf.k.clone();
    k[1] = k[1].map(|v| v + 0.1);
    let shifted = derive_curvature_field(k, [cf.k_s.clone(), cf.k_ss.clone(), cf.k_sss.clone()], &sd, ff.anchor);
    let perturbed = worst_compatibility(&shifted);
    gate(
        base <= 1e-5 && perturbed > 1e-2,
        format!("interior residual {base:.2e}, with k2 + 0.1: {perturbed:.2e}"),
    )
}

/// Cells with `|delta_p|` beyond the band, and how many of them are hyperbolic.
fn hyperbolic_gate(a: &Analysis<f64>) -> (usize, usize, f64) {
    let (mut gated, mut hyperbolic, mut det) = (0usize, 0usize, 0.0f64);
    for cr in a.results() {
        let (r, class) = (&cr.report, &cr.class);
        det = det.max(rel(r.delta_p, delta_p_det(r)));
        if r.delta_p.abs() > TOL * r.tangent.w.powi(6) {
            gated += 1;
            hyperbolic += (class.tag == PointTag::Hyperbolic) as usize;
        }
    }
    (gated, hyperbolic, det)
}

fn classification() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    for (c23, c24) in [(0.0, 0.0), (0.3, 0.2)] {
        let sd = soliton()
            .with_params(Params {
                s0: None,
                c23,
                c24,
                c34: 0.0,
            })
            .unwrap();
        let a = analyze(&sd, TOL).unwrap();
        let (gated, hyperbolic, det) = hyperbolic_gate(&a);
        ok &= gated == hyperbolic && det <= 1e-9;
        detail.push(format!(
            "soliton, constants ({c23}, {c24}): {hyperbolic}/{gated} gated cells hyperbolic, {} flat parabolic, delta_p vs det {det:.1e}",
            a.histogram().inflection_flat
        ));
    }
    // delta_p vanishes identically on the soliton, so the gate is also run
    // where it is non-trivial
    let a = analyze(&load("clifford.bdr"), TOL).unwrap();
    let (gated, hyperbolic, det) = hyperbolic_gate(&a);
    ok &= gated > 0 && gated == hyperbolic && det <= 1e-9;
    detail.push(format!(
        "clifford: {hyperbolic}/{gated} gated cells hyperbolic, delta_p vs det {det:.1e}"
    ));
    let flat = classify_point(&InvariantReport::synthetic(0.7, 0.35, 0.0, 0.0, 0.0), TOL);
    let flat_ok = flat.tag == PointTag::Parabolic && flat.subtype == Some(ParabolicSubtype::InflectionFlat);
    ok &= flat_ok;
    detail.push(format!(
        "A = B = C = 0 -> {}",
        flat.subtype.map_or("none", |s| s.name())
    ));
    gate(ok, detail.join("; "))
}

fn gauge() -> Outcome {
    let mut ok = true;
    let mut detail = Vec::new();
    let rot = axis_angle([0.3, -0.5, 0.8], 1.1);
    for (name, sd) in [("soliton", soliton()), ("clifford", load("clifford.bdr"))] {
        let base = analyze(&sd, TOL).unwrap();
        let turned = finish(&sd, propagate_t_rotated(&sd, &rot).unwrap(), TOL).unwrap();
        let (mut dk, mut dinv, mut classes) = (0.0f64, 0.0f64, 0usize);
        for j in 0..sd.nt {
            for i in 0..sd.ns {
                let k = rotate3(&rot, base.curvatures.k_at(i, j));
                let k2 = turned.curvatures.k_at(i, j);
                dk = (0..3).fold(dk, |m, c| m.max((k[c] - k2[c]).abs()));
                let (a, b) = (
                    base.cells[(i, j)].as_ref().unwrap(),
                    turned.cells[(i, j)].as_ref().unwrap(),
                );
                let (ra, rb) = (&a.report, &b.report);
                for (x, y) in [
                    (ra.q, rb.q),
                    (ra.gaussian, rb.gaussian),
                    (ra.h_inv, rb.h_inv),
                    (ra.torsion.abs(), rb.torsion.abs()),
                    (ra.mean_norm(), rb.mean_norm()),
                    (ra.delta_p, rb.delta_p),
                ] {
                    dinv = dinv.max(rel(x, y));
                }
                classes += (a.class.tag != b.class.tag || a.class.subtype != b.class.subtype) as usize;
            }
        }
        ok &= dk <= 1e-8 && dinv <= 1e-7 && classes == 0;
        detail.push(format!(
            "{name}: k vs rotated k {dk:.1e}, invariants {dinv:.1e}, {classes} class changes"
        ));
    }
    gate(ok, detail.join("; "))
}

fn projections() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let sd = soliton();
    let file = corpus_path("soliton.bdr");
    let mut detail = Vec::new();
    let mut ok = true;
    let mut row_gap = f64::NAN;
    for axis in ["w", "z", "y", "x"] {
        let out = dir.path().join(format!("drop-{axis}.obj"));
        let status = Command::new(env!("CARGO_BIN_EXE_bdr"))
            .arg("project")
            .arg(&file)
            .args(["--drop", axis, "--out"])
            .arg(&out)
            .status()
            .unwrap();
        let verts = read_obj_vertices(&std::fs::read_to_string(&out).unwrap_or_default());
        ok &= status.success() && verts.len() == sd.ns * sd.nt;
        if axis == "w" && verts.len() == sd.ns * sd.nt {
            row_gap = 0.0;
            for j in 1..sd.nt {
                for i in 0..sd.ns {
                    let (a, b) = (verts[j * sd.ns + i], verts[i]);
                    row_gap = (0..3).fold(row_gap, |m, c| m.max((a[c] - b[c]).abs()));
                }
            }
        }
        detail.push(format!("drop {axis}: {} vertices", verts.len()));
    }
    ok &= row_gap <= 1e-12;
    gate(
        ok,
        format!("{}; drop-w t-rows coincide within {row_gap:.1e}", detail.join(", ")),
    )
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("B-DR verification", bdr_verification),
        ("frame fidelity", frame_fidelity),
        ("example invariants", example_invariants),
        ("shape of K", gaussian_shape),
        ("algebraic identities", identity_suite),
        ("Wintgen inequality", wintgen),
        ("compatibility residuals", compatibility),
        ("classification", classification),
        ("gauge invariance", gauge),
        ("projections", projections),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("acceptance #{} {name}: PASS ({d}) [{secs:.1}s]", n + 1),
            Err(d) => {
                failed += 1;
                println!("acceptance #{} {name}: FAIL ({d}) [{secs:.1}s]", n + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

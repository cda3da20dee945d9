//! Scan results: one row per cell plus a summary, written as CSV or JSON with
//! fixed number formatting. Degenerate cells keep their row, with class
//! `Degenerate`, the reason as subtype, and no numbers.

use std::io::{self, Write};

use bdr_core::analysis::{Analysis, CellResult};
use bdr_core::classify::{Predicate, SurfacePredicates};
use bdr_core::Degeneracy;
use serde::ser::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::fmt_num;

pub const COLUMNS: [&str; 25] = [
    "s", "t", "k1", "k2", "k3", "Q", "P", "R", "S", "W", "A", "B", "C", "k", "h", "K", "Hx", "Hy", "Hz", "Hw",
    "H_norm", "K_N", "delta_p", "class", "subtype",
];

/// Fraction of degenerate cells above which a scan reports failure.
pub const DEGENERATE_LIMIT: f64 = 0.1;

/// A number that serializes with [`fmt_num`]; non-finite values become `null`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Num(pub f64);

impl Serialize for Num {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let raw = RawValue::from_string(fmt_num(self.0)).map_err(serde::ser::Error::custom)?;
        raw.serialize(s)
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Row {
    pub s: Num,
    pub t: Num,
    pub k1: Num,
    pub k2: Num,
    pub k3: Num,
    #[serde(rename = "Q")]
    pub q: Num,
    #[serde(rename = "P")]
    pub p: Num,
    #[serde(rename = "R")]
    pub r: Num,
    #[serde(rename = "S")]
    pub s_coef: Num,
    #[serde(rename = "W")]
    pub w: Num,
    #[serde(rename = "A")]
    pub a: Num,
    #[serde(rename = "B")]
    pub b: Num,
    #[serde(rename = "C")]
    pub c: Num,
    pub k: Num,
    pub h: Num,
    #[serde(rename = "K")]
    pub gaussian: Num,
    #[serde(rename = "Hx")]
    pub hx: Num,
    #[serde(rename = "Hy")]
    pub hy: Num,
    #[serde(rename = "Hz")]
    pub hz: Num,
    #[serde(rename = "Hw")]
    pub hw: Num,
    #[serde(rename = "H_norm")]
    pub h_norm: Num,
    #[serde(rename = "K_N")]
    pub k_n: Num,
    pub delta_p: Num,
    pub class: &'static str,
    pub subtype: Option<&'static str>,
}

impl Row {
    pub fn from_cell(c: &CellResult<f64>) -> Self {
        let r = &c.report;
        let h = r.mean.to_array();
        Row {
            s: Num(r.s),
            t: Num(r.t),
            k1: Num(r.k[0]),
            k2: Num(r.k[1]),
            k3: Num(r.k[2]),
            q: Num(r.q),
            p: Num(r.tangent.p),
            r: Num(r.tangent.r),
            s_coef: Num(r.tangent.s),
            w: Num(r.tangent.w),
            a: Num(r.a),
            b: Num(r.b),
            c: Num(r.c),
            k: Num(r.k_inv),
            h: Num(r.h_inv),
            gaussian: Num(r.gaussian),
            hx: Num(h[0]),
            hy: Num(h[1]),
            hz: Num(h[2]),
            hw: Num(h[3]),
            h_norm: Num(r.mean_norm()),
            k_n: Num(r.torsion),
            delta_p: Num(r.delta_p),
            class: c.class.tag.name(),
            subtype: c.class.subtype.map(|s| s.name()),
        }
    }

    pub fn degenerate(s: f64, t: f64, d: Degeneracy) -> Self {
        let none = Num(f64::NAN);
        Row {
            s: Num(s),
            t: Num(t),
            k1: none,
            k2: none,
            k3: none,
            q: none,
            p: none,
            r: none,
            s_coef: none,
            w: none,
            a: none,
            b: none,
            c: none,
            k: none,
            h: none,
            gaussian: none,
            hx: none,
            hy: none,
            hz: none,
            hw: none,
            h_norm: none,
            k_n: none,
            delta_p: none,
            class: "Degenerate",
            subtype: Some(reason_name(d)),
        }
    }

    fn numbers(&self) -> [Num; 23] {
        [
            self.s,
            self.t,
            self.k1,
            self.k2,
            self.k3,
            self.q,
            self.p,
            self.r,
            self.s_coef,
            self.w,
            self.a,
            self.b,
            self.c,
            self.k,
            self.h,
            self.gaussian,
            self.hx,
            self.hy,
            self.hz,
            self.hw,
            self.h_norm,
            self.k_n,
            self.delta_p,
        ]
    }

    pub fn record(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .numbers()
            .iter()
            .map(|n| if n.0.is_finite() { fmt_num(n.0) } else { String::new() })
            .collect();
        v.push(self.class.to_string());
        v.push(self.subtype.unwrap_or("").to_string());
        v
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Stats {
    pub min: Num,
    pub max: Num,
    pub mean: Num,
}

impl Stats {
    fn of(xs: impl Iterator<Item = f64>) -> Self {
        let (mut min, mut max, mut sum, mut n) = (f64::INFINITY, f64::NEG_INFINITY, 0.0, 0usize);
        for x in xs {
            min = min.min(x);
            max = max.max(x);
            sum += x;
            n += 1;
        }
        let mean = if n == 0 { f64::NAN } else { sum / n as f64 };
        Stats {
            min: Num(min),
            max: Num(max),
            mean: Num(mean),
        }
    }
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Histogram {
    #[serde(rename = "Hyperbolic")]
    pub hyperbolic: usize,
    #[serde(rename = "Elliptic")]
    pub elliptic: usize,
    #[serde(rename = "Parabolic/InflectionImaginary")]
    pub inflection_imaginary: usize,
    #[serde(rename = "Parabolic/NonDegenerate")]
    pub non_degenerate: usize,
    #[serde(rename = "Parabolic/InflectionReal")]
    pub inflection_real: usize,
    #[serde(rename = "Parabolic/InflectionFlat")]
    pub inflection_flat: usize,
    #[serde(rename = "Parabolic/Unresolved")]
    pub unresolved: usize,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Witness {
    pub s: Num,
    pub t: Num,
    pub violation: Num,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct PredicateOut {
    pub holds: bool,
    /// Worst cell seen, reported whether or not the predicate holds.
    pub worst: Option<Witness>,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Predicates {
    pub flat: PredicateOut,
    pub minimal: PredicateOut,
    pub semi_umbilic: PredicateOut,
    pub wintgen_ideal: PredicateOut,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Summary {
    pub cells: usize,
    pub rows: usize,
    pub degenerate: usize,
    #[serde(rename = "K")]
    pub gaussian: Stats,
    #[serde(rename = "H_norm")]
    pub h_norm: Stats,
    #[serde(rename = "K_N")]
    pub k_n: Stats,
    pub delta_p: Stats,
    pub h_max_abs: Num,
    #[serde(rename = "K_N_max_abs")]
    pub k_n_max_abs: Num,
    /// Largest spread of K over the t-fibre of a fixed s.
    #[serde(rename = "K_fiber_spread")]
    pub k_fiber_spread: Num,
    pub wintgen_gap_min: Num,
    /// Largest compatibility residual over interior cells.
    pub compatibility_residual_max: Num,
    pub classes: Histogram,
    pub predicates: Predicates,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
    pub s_range: [Num; 2],
    pub t_range: [Num; 2],
    pub s0: Num,
    pub c23: Num,
    pub c24: Num,
    pub c34: Num,
    pub tol: Num,
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct ScanResult {
    pub surface: String,
    pub grid: Grid,
    pub rows: Vec<Row>,
    pub summary: Summary,
}

fn predicate_out(p: &Predicate<f64>, a: &Analysis<f64>) -> PredicateOut {
    PredicateOut {
        holds: p.holds,
        worst: p.worst.map(|(c, v)| {
            let (s, t) = a.surface.node(c.i, c.j);
            Witness {
                s: Num(s),
                t: Num(t),
                violation: Num(v),
            }
        }),
    }
}

fn predicates(p: &SurfacePredicates<f64>, a: &Analysis<f64>) -> Predicates {
    Predicates {
        flat: predicate_out(&p.flat, a),
        minimal: predicate_out(&p.minimal, a),
        semi_umbilic: predicate_out(&p.semi_umbilic, a),
        wintgen_ideal: predicate_out(&p.wintgen_ideal, a),
    }
}

fn reason_name(d: Degeneracy) -> &'static str {
    match d {
        Degeneracy::ZeroCurvature => "ZeroCurvature",
        Degeneracy::ZeroSpeedInT => "ZeroSpeedInT",
    }
}

impl ScanResult {
    pub fn new(id: &str, a: &Analysis<f64>) -> Self {
        let sd = &a.surface;
        let mut rows = Vec::with_capacity(sd.ns * sd.nt);
        for j in 0..sd.nt {
            for i in 0..sd.ns {
                rows.push(match &a.cells[(i, j)] {
                    Ok(c) => Row::from_cell(c),
                    Err(d) => {
                        let (s, t) = sd.node(i, j);
                        Row::degenerate(s, t, *d)
                    }
                });
            }
        }
        let max_abs = |f: fn(&bdr_core::InvariantReport64) -> f64| a.reports().fold(0.0f64, |m, r| m.max(f(r).abs()));
        let k_fiber_spread = (0..sd.ns)
            .map(|i| {
                let ks: Vec<f64> = (0..sd.nt)
                    .filter_map(|j| a.cells[(i, j)].ok())
                    .map(|c| c.report.gaussian)
                    .collect();
                let lo = ks.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = ks.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                if ks.is_empty() {
                    0.0
                } else {
                    hi - lo
                }
            })
            .fold(0.0, f64::max);
        let h = a.histogram();
        let summary = Summary {
            cells: sd.ns * sd.nt,
            rows: rows.len(),
            degenerate: a.degenerate_count(),
            gaussian: Stats::of(a.reports().map(|r| r.gaussian)),
            h_norm: Stats::of(a.reports().map(|r| r.mean_norm())),
            k_n: Stats::of(a.reports().map(|r| r.torsion)),
            delta_p: Stats::of(a.reports().map(|r| r.delta_p)),
            h_max_abs: Num(max_abs(|r| r.h_inv)),
            k_n_max_abs: Num(max_abs(|r| r.torsion)),
            k_fiber_spread: Num(k_fiber_spread),
            wintgen_gap_min: Num(a.reports().map(|r| r.wintgen_gap).fold(f64::INFINITY, f64::min)),
            compatibility_residual_max: Num(a.max_compatibility_residual()),
            classes: Histogram {
                hyperbolic: h.hyperbolic,
                elliptic: h.elliptic,
                inflection_imaginary: h.inflection_imaginary,
                non_degenerate: h.non_degenerate,
                inflection_real: h.inflection_real,
                inflection_flat: h.inflection_flat,
                unresolved: h.unresolved,
            },
            predicates: predicates(&a.predicates, a),
        };
        let p = sd.params;
        ScanResult {
            surface: id.to_string(),
            grid: Grid {
                ns: sd.ns,
                nt: sd.nt,
                s_range: [Num(sd.s_range.start), Num(sd.s_range.end)],
                t_range: [Num(sd.t_range.start), Num(sd.t_range.end)],
                s0: Num(sd.s0()),
                c23: Num(p.c23),
                c24: Num(p.c24),
                c34: Num(p.c34),
                tol: Num(a.tol),
            },
            rows,
            summary,
        }
    }

    /// More than [`DEGENERATE_LIMIT`] of the cells are degenerate.
    pub fn too_degenerate(&self) -> bool {
        self.summary.degenerate as f64 > DEGENERATE_LIMIT * self.summary.cells as f64
    }

    pub fn write_csv(&self, out: impl Write) -> io::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(COLUMNS)?;
        for r in &self.rows {
            w.write_record(r.record())?;
        }
        w.flush()
    }

    pub fn write_json(&self, mut out: impl Write) -> io::Result<()> {
        serde_json::to_writer_pretty(&mut out, self)?;
        writeln!(out)
    }
}

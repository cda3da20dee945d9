//! Surface definitions: four closed-form components in `(s, t)`, the grid
//! they are sampled on, and exact derivative jets.
//!
//! Definition files are line oriented:
//!
//! ```text
//! [surface]
//! x = (sin(s)+s)/2
//! y = cos(s)/sqrt(2)
//! z = (sin(s)-s)/2
//! w = -t/(2*sqrt(2))
//! [domain]
//! s = 0 .. 4*pi
//! t = -1 .. 1
//! ns = 257
//! nt = 65
//! [params]
//! s0 = 0
//! c23 = 0
//! c24 = 0
//! c34 = 0
//! ```
//!
//! `#` starts a comment. Range bounds and parameters may be any constant
//! expression. The `[params]` section is optional; `s0` defaults to the start
//! of the s-range and the constants to zero.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::expr::{differentiate, evaluate, parse, Expr, Var};
use crate::grid::{linspace, Grid};
use crate::linalg4::{ternary_cross, Vec4};
use crate::scalar::Scalar;

/// Unit-speed residual accepted by [`load_surface`].
pub const UNIT_SPEED_TOL: f64 = 1e-8;

/// Smallest admissible grid count in either direction.
pub const MIN_GRID: usize = 8;

/// Closed interval `[start, end]`, `start < end`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range<T> {
    pub start: T,
    pub end: T,
}

impl<T: Scalar> Range<T> {
    pub fn new(start: T, end: T) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && end > start) {
            return Err(Error::BadDomain(format!("empty or non-finite range {start} .. {end}")));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, x: T) -> bool {
        x >= self.start && x <= self.end
    }

    pub fn len(&self) -> T {
        self.end - self.start
    }
}

/// Quadrature anchor and integration constants of the normal connection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params<T> {
    /// Anchor of the cumulative integrals along s. `None` means the start of
    /// the s-range.
    pub s0: Option<T>,
    pub c23: T,
    pub c24: T,
    pub c34: T,
}

impl<T: Scalar> Default for Params<T> {
    fn default() -> Self {
        Self {
            s0: None,
            c23: T::zero(),
            c24: T::zero(),
            c34: T::zero(),
        }
    }
}

/// Psi and its derivatives at one `(s, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet<T> {
    pub psi: Vec4<T>,
    pub psi_s: Vec4<T>,
    pub psi_ss: Vec4<T>,
    pub psi_sss: Vec4<T>,
    pub psi_t: Vec4<T>,
    pub psi_st: Vec4<T>,
    pub psi_tt: Vec4<T>,
    /// Fourth and fifth s-derivatives; they give the curvature derivatives
    /// `(k_i)_ss`, `(k_i)_sss` without differencing.
    pub psi_ssss: Vec4<T>,
    pub psi_sssss: Vec4<T>,
}

/// Which derivative of Psi a symbolic jet row holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetPart {
    Psi,
    S,
    SS,
    SSS,
    T,
    ST,
    TT,
    SSSS,
    SSSSS,
}

impl JetPart {
    pub const ALL: [JetPart; 9] = [
        JetPart::Psi,
        JetPart::S,
        JetPart::SS,
        JetPart::SSS,
        JetPart::T,
        JetPart::ST,
        JetPart::TT,
        JetPart::SSSS,
        JetPart::SSSSS,
    ];
}

/// A parametrized surface `Psi(s, t)` in E4 with its sampling grid.
#[derive(Debug, Clone)]
pub struct SurfaceDef<T> {
    pub name: Option<String>,
    pub s_range: Range<T>,
    pub t_range: Range<T>,
    pub ns: usize,
    pub nt: usize,
    pub params: Params<T>,
    /// Symbolic jets, indexed like [`JetPart::ALL`], four components each.
    jets: Vec<[Expr; 4]>,
}

impl<T: Scalar> SurfaceDef<T> {
    /// Builds a definition without the unit-speed check.
    pub fn new_unchecked(
        components: [Expr; 4],
        s_range: Range<T>,
        t_range: Range<T>,
        ns: usize,
        nt: usize,
        params: Params<T>,
    ) -> Result<Self> {
        if ns < MIN_GRID || nt < MIN_GRID {
            return Err(Error::BadDomain(format!(
                "grid {ns} x {nt} below the minimum {MIN_GRID} x {MIN_GRID}"
            )));
        }
        if let Some(s0) = params.s0 {
            if !s_range.contains(s0) {
                return Err(Error::BadDomain(format!("s0 = {s0} outside the s-range")));
            }
        }
        let d = |e: &[Expr; 4], v: Var| -> [Expr; 4] { e.clone().map(|c| differentiate(&c, v)) };
        let psi = components;
        let s = d(&psi, Var::S);
        let ss = d(&s, Var::S);
        let sss = d(&ss, Var::S);
        let t = d(&psi, Var::T);
        let st = d(&s, Var::T);
        let tt = d(&t, Var::T);
        let s4 = d(&sss, Var::S);
        let s5 = d(&s4, Var::S);
        Ok(Self {
            name: None,
            s_range,
            t_range,
            ns,
            nt,
            params,
            jets: vec![psi, s, ss, sss, t, st, tt, s4, s5],
        })
    }

    /// Builds a definition and validates the unit-speed hypothesis on the grid.
    pub fn new(
        components: [Expr; 4],
        s_range: Range<T>,
        t_range: Range<T>,
        ns: usize,
        nt: usize,
        params: Params<T>,
    ) -> Result<Self> {
        let sd = Self::new_unchecked(components, s_range, t_range, ns, nt, params)?;
        sd.validate()?;
        Ok(sd)
    }

    /// Convenience constructor from component source text.
    pub fn from_strs(components: [&str; 4], s_range: (T, T), t_range: (T, T), ns: usize, nt: usize) -> Result<Self> {
        let mut exprs = Vec::with_capacity(4);
        for c in components {
            exprs.push(parse(c)?);
        }
        let exprs: [Expr; 4] = exprs.try_into().expect("four components");
        Self::new(
            exprs,
            Range::new(s_range.0, s_range.1)?,
            Range::new(t_range.0, t_range.1)?,
            ns,
            nt,
            Params::default(),
        )
    }

    pub fn with_params(mut self, params: Params<T>) -> Result<Self> {
        if let Some(s0) = params.s0 {
            if !self.s_range.contains(s0) {
                return Err(Error::BadDomain(format!("s0 = {s0} outside the s-range")));
            }
        }
        self.params = params;
        Ok(self)
    }

    /// Same surface on a different grid (no revalidation).
    pub fn with_grid(mut self, ns: usize, nt: usize) -> Result<Self> {
        if ns < MIN_GRID || nt < MIN_GRID {
            return Err(Error::BadDomain(format!(
                "grid {ns} x {nt} below the minimum {MIN_GRID} x {MIN_GRID}"
            )));
        }
        self.ns = ns;
        self.nt = nt;
        Ok(self)
    }

    pub fn component(&self, k: usize) -> &Expr {
        &self.jets[0][k]
    }

    pub fn components(&self) -> &[Expr; 4] {
        &self.jets[0]
    }

    /// Symbolic form of one derivative of Psi.
    pub fn jet_expr(&self, part: JetPart) -> &[Expr; 4] {
        let k = JetPart::ALL.iter().position(|p| *p == part).expect("jet part");
        &self.jets[k]
    }

    pub fn s_grid(&self) -> Vec<T> {
        linspace(self.s_range.start, self.s_range.end, self.ns)
    }

    pub fn t_grid(&self) -> Vec<T> {
        linspace(self.t_range.start, self.t_range.end, self.nt)
    }

    pub fn hs(&self) -> T {
        self.s_range.len() / T::lit((self.ns - 1) as f64)
    }

    pub fn ht(&self) -> T {
        self.t_range.len() / T::lit((self.nt - 1) as f64)
    }

    pub fn s0(&self) -> T {
        self.params.s0.unwrap_or(self.s_range.start)
    }

    /// Grid index along s nearest to the quadrature anchor.
    pub fn anchor_index(&self) -> usize {
        let k = ((self.s0() - self.s_range.start) / self.hs()).round();
        k.to_usize().unwrap_or(0).min(self.ns - 1)
    }

    pub fn node(&self, i: usize, j: usize) -> (T, T) {
        let s = self.s_range.start + self.hs() * T::lit(i as f64);
        let t = self.t_range.start + self.ht() * T::lit(j as f64);
        (s, t)
    }

    /// Grid node nearest to `(s, t)`; `None` outside the domain.
    pub fn nearest_node(&self, s: T, t: T) -> Option<(usize, usize)> {
        if !(self.s_range.contains(s) && self.t_range.contains(t)) {
            return None;
        }
        let i = ((s - self.s_range.start) / self.hs()).round().to_usize()?;
        let j = ((t - self.t_range.start) / self.ht()).round().to_usize()?;
        Some((i.min(self.ns - 1), j.min(self.nt - 1)))
    }

    fn eval4(&self, part: usize, s: T, t: T) -> Result<Vec4<T>> {
        let e = &self.jets[part];
        Ok(Vec4::new(
            evaluate(&e[0], s, t)?,
            evaluate(&e[1], s, t)?,
            evaluate(&e[2], s, t)?,
            evaluate(&e[3], s, t)?,
        ))
    }

    pub fn psi(&self, s: T, t: T) -> Result<Vec4<T>> {
        self.eval4(0, s, t)
    }

    pub fn psi_s(&self, s: T, t: T) -> Result<Vec4<T>> {
        self.eval4(1, s, t)
    }

    pub fn psi_ss(&self, s: T, t: T) -> Result<Vec4<T>> {
        self.eval4(2, s, t)
    }

    pub fn jet(&self, s: T, t: T) -> Result<Jet<T>> {
        Ok(Jet {
            psi: self.eval4(0, s, t)?,
            psi_s: self.eval4(1, s, t)?,
            psi_ss: self.eval4(2, s, t)?,
            psi_sss: self.eval4(3, s, t)?,
            psi_t: self.eval4(4, s, t)?,
            psi_st: self.eval4(5, s, t)?,
            psi_tt: self.eval4(6, s, t)?,
            psi_ssss: self.eval4(7, s, t)?,
            psi_sssss: self.eval4(8, s, t)?,
        })
    }

    /// Jets at every grid node, evaluated in parallel.
    pub fn jet_grid(&self) -> Result<Grid<Jet<T>>> {
        let columns: Result<Vec<Vec<Jet<T>>>> = (0..self.nt)
            .into_par_iter()
            .map(|j| {
                (0..self.ns)
                    .map(|i| {
                        let (s, t) = self.node(i, j);
                        self.jet(s, t)
                    })
                    .collect()
            })
            .collect();
        Ok(Grid::from_columns(columns?))
    }

    /// `|Psi_t - Psi_s x Psi_ss x Psi_sss|`.
    pub fn bdr_residual(&self, s: T, t: T) -> Result<T> {
        Ok(bdr_residual_of(&self.jet(s, t)?))
    }

    /// `|<Psi_s, Psi_s> - 1|`.
    pub fn unit_speed_residual(&self, s: T, t: T) -> Result<T> {
        Ok((self.psi_s(s, t)?.norm_squared() - T::one()).abs())
    }

    /// Grid-wide maxima of the three global residuals.
    pub fn residuals(&self) -> Result<Residuals<T>> {
        let jets = self.jet_grid()?;
        let mut r = Residuals::default();
        for j in 0..self.nt {
            for i in 0..self.ns {
                let jet = &jets[(i, j)];
                let (s, t) = self.node(i, j);
                let us = (jet.psi_s.norm_squared() - T::one()).abs();
                if us > r.unit_speed || r.worst_unit_speed.is_none() {
                    r.unit_speed = us;
                    r.worst_unit_speed = Some((s, t));
                }
                r.bdr = r.bdr.max(bdr_residual_of(jet));
                r.g12 = r.g12.max(jet.psi_s.dot(jet.psi_t).abs());
            }
        }
        Ok(r)
    }

    /// Checks the unit-speed hypothesis at every grid node.
    pub fn validate(&self) -> Result<()> {
        let r = self.residuals()?;
        if !(r.unit_speed < T::lit(UNIT_SPEED_TOL)) {
            let (s, t) = r.worst_unit_speed.unwrap_or((self.s_range.start, self.t_range.start));
            return Err(Error::NotUnitSpeed {
                s: s.as_f64(),
                t: t.as_f64(),
                residual: r.unit_speed.as_f64(),
            });
        }
        Ok(())
    }
}

/// Maxima over the grid of the unit-speed, B-DR and `g12` residuals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Residuals<T> {
    pub unit_speed: T,
    pub worst_unit_speed: Option<(T, T)>,
    pub bdr: T,
    pub g12: T,
}

pub fn bdr_residual_of<T: Scalar>(jet: &Jet<T>) -> T {
    (jet.psi_t - ternary_cross(jet.psi_s, jet.psi_ss, jet.psi_sss)).norm()
}

/// Parses a definition document and validates the unit-speed hypothesis.
pub fn load_surface<T: Scalar>(doc: &str) -> Result<SurfaceDef<T>> {
    let sd = parse_definition(doc)?;
    sd.validate()?;
    Ok(sd)
}

/// Parses a definition document without the unit-speed check.
pub fn parse_definition<T: Scalar>(doc: &str) -> Result<SurfaceDef<T>> {
    const SECTIONS: [(&str, &[&str]); 3] = [
        ("surface", &["x", "y", "z", "w"]),
        ("domain", &["s", "t", "ns", "nt"]),
        ("params", &["s0", "c23", "c24", "c34"]),
    ];
    let mut section: Option<&str> = None;
    let mut seen_sections: Vec<&str> = Vec::new();
    let mut entries: HashMap<(&str, &str), (usize, String)> = HashMap::new();

    for (k, raw) in doc.lines().enumerate() {
        let line = k + 1;
        let text = raw.split('#').next().unwrap_or("").trim();
        if text.is_empty() {
            continue;
        }
        let bad = |message: String| Error::Definition { line, message };
        if let Some(name) = text.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            let Some((known, _)) = SECTIONS.iter().find(|(n, _)| *n == name) else {
                return Err(bad(format!("unknown section [{name}]")));
            };
            if seen_sections.contains(known) {
                return Err(bad(format!("duplicate section [{name}]")));
            }
            seen_sections.push(known);
            section = Some(known);
            continue;
        }
        let Some(sec) = section else {
            return Err(bad("entry before any section header".into()));
        };
        let Some((key, value)) = text.split_once('=') else {
            return Err(bad(format!("expected `key = value`, found `{text}`")));
        };
        let key = key.trim();
        let keys = SECTIONS.iter().find(|(n, _)| *n == sec).map(|(_, k)| *k).unwrap_or(&[]);
        let Some(known_key) = keys.iter().find(|k| **k == key) else {
            return Err(bad(format!("unknown key `{key}` in [{sec}]")));
        };
        if entries
            .insert((sec, known_key), (line, value.trim().to_string()))
            .is_some()
        {
            return Err(bad(format!("duplicate key `{key}` in [{sec}]")));
        }
    }

    let last_line = doc.lines().count().max(1);
    let required = |sec: &'static str, key: &'static str| -> Result<&(usize, String)> {
        entries.get(&(sec, key)).ok_or_else(|| Error::Definition {
            line: last_line,
            message: format!("missing `{key}` in [{sec}]"),
        })
    };
    let expr_at = |line: usize, key: &str, text: &str| -> Result<Expr> {
        parse(text).map_err(|source| Error::ExprAt {
            line,
            key: key.to_string(),
            source,
        })
    };
    let constant = |line: usize, key: &str, text: &str| -> Result<T> {
        let e = expr_at(line, key, text)?;
        if !e.is_constant() {
            return Err(Error::Definition {
                line,
                message: format!("`{key}` must be constant"),
            });
        }
        evaluate(&e, T::zero(), T::zero()).map_err(|source| Error::ExprAt {
            line,
            key: key.to_string(),
            source,
        })
    };
    let range = |key: &'static str| -> Result<Range<T>> {
        let (line, text) = required("domain", key)?;
        let Some((a, b)) = text.split_once("..") else {
            return Err(Error::Definition {
                line: *line,
                message: format!("`{key}` must have the form `start .. end`"),
            });
        };
        Range::new(constant(*line, key, a)?, constant(*line, key, b)?)
    };
    let count = |key: &'static str| -> Result<usize> {
        let (line, text) = required("domain", key)?;
        text.parse().map_err(|_| Error::Definition {
            line: *line,
            message: format!("`{key}` must be a non-negative integer, found `{text}`"),
        })
    };

    let mut comps = Vec::with_capacity(4);
    for key in ["x", "y", "z", "w"] {
        let (line, text) = required("surface", key)?;
        comps.push(expr_at(*line, key, text)?);
    }
    let components: [Expr; 4] = comps.try_into().expect("four components");

    let param = |key: &'static str| -> Result<Option<T>> {
        entries
            .get(&("params", key))
            .map(|(line, text)| constant(*line, key, text))
            .transpose()
    };
    let params = Params {
        s0: param("s0")?,
        c23: param("c23")?.unwrap_or_else(T::zero),
        c24: param("c24")?.unwrap_or_else(T::zero),
        c34: param("c34")?.unwrap_or_else(T::zero),
    };

    SurfaceDef::new_unchecked(components, range("s")?, range("t")?, count("ns")?, count("nt")?, params)
}

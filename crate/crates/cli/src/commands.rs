//! Subcommand implementations. Each returns the process exit code or a
//! [`CliError`] that carries one.

use std::fs;
use std::io::{self, Write};
use std::path::Path;

use bdr_core::analysis::analyze;
use bdr_core::expr::{evaluate, parse};
use bdr_core::ptframe::{curvatures, propagate_t};
use bdr_core::surface::{load_surface, parse_definition};
use bdr_core::{Error, SurfaceDef64, Vec4f};

use crate::mesh::{projected_vertices, write_obj};
use crate::scan::ScanResult;
use crate::{fmt_num, Axis, Cli, Command, Format};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable input, malformed definition, bad arguments.
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] io::Error),
    /// The surface fails a hypothesis of the analysis.
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Failed(_) => EXIT_FAILED,
            CliError::Usage(_) | CliError::Io(_) => EXIT_USAGE,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Expr(_) | Error::ExprAt { .. } | Error::Definition { .. } | Error::BadDomain(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Failed(e.to_string()),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn load(path: &Path, checked: bool) -> Result<SurfaceDef64, CliError> {
    let doc = read(path)?;
    let sd = if checked {
        load_surface(&doc)?
    } else {
        parse_definition(&doc)?
    };
    Ok(sd)
}

fn surface_id(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default()
}

/// Runs one command, writing normal output to `out`.
pub fn run(cli: &Cli, out: &mut impl Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Check { file, tol } => check(file, *tol, out),
        Command::Scan {
            file,
            format,
            out: path,
            force,
            tol,
        } => scan(file, *format, path.as_deref(), *force, *tol, out),
        Command::Frames { file, at } => frames(file, at, out),
        Command::Project { file, drop, out: path } => project(file, *drop, path),
    }
}

pub fn check(file: &Path, tol: f64, out: &mut impl Write) -> Result<u8, CliError> {
    let sd = load(file, false)?;
    let r = sd.residuals()?;
    writeln!(out, "grid            {} x {}", sd.ns, sd.nt)?;
    writeln!(
        out,
        "unit speed      max |<psi_s, psi_s> - 1|                = {}",
        fmt_num(r.unit_speed)
    )?;
    writeln!(
        out,
        "B-DR            max |psi_t - psi_s x psi_ss x psi_sss| = {}",
        fmt_num(r.bdr)
    )?;
    writeln!(
        out,
        "orthogonality   max |g12|                               = {}",
        fmt_num(r.g12)
    )?;
    let mut failures = Vec::new();
    if !(r.unit_speed <= tol) {
        let (s, t) = r.worst_unit_speed.unwrap_or_default();
        failures.push(
            Error::NotUnitSpeed {
                s,
                t,
                residual: r.unit_speed,
            }
            .to_string(),
        );
    }
    if !(r.bdr <= tol) {
        failures.push(format!("B-DR residual {} exceeds {tol:e}", fmt_num(r.bdr)));
    }
    if !(r.g12 <= tol) {
        failures.push(format!("g12 {} exceeds {tol:e}", fmt_num(r.g12)));
    }
    if failures.is_empty() {
        writeln!(out, "ok (tol {tol:e})")?;
        Ok(EXIT_OK)
    } else {
        Err(CliError::Failed(failures.join("\n")))
    }
}

pub fn scan(
    file: &Path,
    format: Format,
    path: Option<&Path>,
    force: bool,
    tol: f64,
    out: &mut impl Write,
) -> Result<u8, CliError> {
    let sd = load(file, !force)?;
    let analysis = analyze(&sd, tol)?;
    let result = ScanResult::new(&surface_id(file), &analysis);
    let mut buf = Vec::new();
    match format {
        Format::Csv => result.write_csv(&mut buf)?,
        Format::Json => result.write_json(&mut buf)?,
    }
    match path {
        Some(p) => fs::write(p, &buf).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?,
        None => out.write_all(&buf)?,
    }
    if result.too_degenerate() {
        return Err(CliError::Failed(format!(
            "{} of {} cells are degenerate",
            result.summary.degenerate, result.summary.cells
        )));
    }
    Ok(EXIT_OK)
}

fn constant(text: &str) -> Result<f64, CliError> {
    let bad = || CliError::Usage(format!("`{text}` is not a constant expression"));
    let e = parse(text.trim()).map_err(|_| bad())?;
    if !e.is_constant() {
        return Err(bad());
    }
    evaluate(&e, 0.0, 0.0).map_err(|_| bad())
}

/// Parses `S,T`.
pub fn parse_point(text: &str) -> Result<(f64, f64), CliError> {
    match text.split(',').collect::<Vec<_>>()[..] {
        [s, t] => Ok((constant(s)?, constant(t)?)),
        _ => Err(CliError::Usage(format!("expected S,T, got `{text}`"))),
    }
}

fn vec_line(out: &mut impl Write, label: &str, v: Vec4f) -> io::Result<()> {
    let [a, b, c, d] = v.to_array().map(fmt_num);
    writeln!(out, "{label:<4} ({a}, {b}, {c}, {d})")
}

pub fn frames(file: &Path, at: &str, out: &mut impl Write) -> Result<u8, CliError> {
    let (s, t) = parse_point(at)?;
    let sd = load(file, true)?;
    let Some((i, j)) = sd.nearest_node(s, t) else {
        return Err(CliError::Usage(format!(
            "({s}, {t}) outside [{}, {}] x [{}, {}]",
            sd.s_range.start, sd.s_range.end, sd.t_range.start, sd.t_range.end
        )));
    };
    let ff = propagate_t(&sd)?;
    let cf = curvatures(&ff, &sd)?;
    let frame = ff.frames[(i, j)];
    let (sn, tn) = sd.node(i, j);
    writeln!(
        out,
        "node i = {i}, j = {j}, (s, t) = ({}, {})",
        fmt_num(sn),
        fmt_num(tn)
    )?;
    vec_line(out, "T", frame.t)?;
    for (m, p) in frame.p.iter().enumerate() {
        vec_line(out, &format!("P{}", m + 1), *p)?;
    }
    let k = cf.k_at(i, j);
    for (m, km) in k.iter().enumerate() {
        writeln!(out, "k{}   {}", m + 1, fmt_num(*km))?;
    }
    writeln!(out, "Q    {}", fmt_num(cf.q[(i, j)]))?;
    writeln!(out, "max |<V_a, V_b> - delta_ab|  {}", fmt_num(frame.gram_deviation()))?;
    writeln!(out, "orientation det(T, P1, P2, P3)  {}", fmt_num(frame.orientation()))?;
    writeln!(
        out,
        "note: (P1, P2, P3) is fixed up to one constant rotation; k1, k2, k3 rotate with it, Q does not"
    )?;
    Ok(EXIT_OK)
}

pub fn project(file: &Path, drop: Axis, path: &Path) -> Result<u8, CliError> {
    let sd = load(file, false)?;
    let vertices = projected_vertices(&sd, drop)?;
    let kept: String = ['x', 'y', 'z', 'w']
        .iter()
        .enumerate()
        .filter(|(k, _)| *k != drop.index())
        .map(|(_, c)| c)
        .collect();
    let mut buf = Vec::new();
    write_obj(
        &mut buf,
        &vertices,
        sd.ns,
        sd.nt,
        &format!("{} projected to {kept}", surface_id(file)),
    )?;
    fs::write(path, buf).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok(EXIT_OK)
}

//! OBJ export of coordinate projections.

use std::io::{self, Write};

use bdr_core::surface::SurfaceDef;
use bdr_core::Result;

use crate::{fmt_num, Axis};

/// Vertices of the projection in row-major grid order: row `j` (fixed t)
/// holds nodes `i = 0..ns`.
pub fn projected_vertices(sd: &SurfaceDef<f64>, drop: Axis) -> Result<Vec<[f64; 3]>> {
    let mut out = Vec::with_capacity(sd.ns * sd.nt);
    for j in 0..sd.nt {
        for i in 0..sd.ns {
            let (s, t) = sd.node(i, j);
            let p = sd.psi(s, t)?.to_array();
            let mut v = [0.0; 3];
            let mut k = 0;
            for (axis, x) in p.into_iter().enumerate() {
                if axis != drop.index() {
                    v[k] = x;
                    k += 1;
                }
            }
            out.push(v);
        }
    }
    Ok(out)
}

/// Writes `v` lines followed by one quad per grid cell (1-based indices).
pub fn write_obj(out: &mut impl Write, vertices: &[[f64; 3]], ns: usize, nt: usize, comment: &str) -> io::Result<()> {
    writeln!(out, "# {comment}")?;
    writeln!(out, "# {ns} x {nt} grid, {} vertices", vertices.len())?;
    for v in vertices {
        writeln!(out, "v {} {} {}", fmt_num(v[0]), fmt_num(v[1]), fmt_num(v[2]))?;
    }
    for j in 0..nt - 1 {
        for i in 0..ns - 1 {
            let a = j * ns + i + 1;
            let b = (j + 1) * ns + i + 1;
            writeln!(out, "f {} {} {} {}", a, a + 1, b + 1, b)?;
        }
    }
    Ok(())
}

/// Reads the `v` lines back.
pub fn read_obj_vertices(text: &str) -> Vec<[f64; 3]> {
    text.lines()
        .filter_map(|l| l.strip_prefix("v "))
        .filter_map(|l| {
            let xs: Vec<f64> = l.split_whitespace().filter_map(|x| x.parse().ok()).collect();
            (xs.len() == 3).then(|| [xs[0], xs[1], xs[2]])
        })
        .collect()
}

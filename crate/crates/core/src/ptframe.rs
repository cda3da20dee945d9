//! Parallel transport frame field `{T, P1, P2, P3}` over the `(s, t)` grid and
//! the curvature functions `k1, k2, k3`, `Q`.
//!
//! Along each s-curve the normals obey `(P_i)_s = -k_i T` with
//! `k_i = <T_s, P_i>`. The frames of different t-columns are tied together at
//! the quadrature anchor `s0`, where the normal triple is carried along t by
//! normal parallel transport (`(P_i)_t = -<Psi_st, P_i> T`). There the normal
//! connection coefficients `a23, a24, a34` of the frame vanish, which is what
//! the quadrature with zero integration constants assumes.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{cumulative_simpson, d_ds, d_dt, Grid};
use crate::linalg4::{det4, gram_deviation, Vec4};
use crate::scalar::Scalar;
use crate::surface::SurfaceDef;

/// RK4 substeps per grid interval.
pub const SUBSTEPS: usize = 4;

/// Largest re-orthonormalization correction tolerated in one grid step.
pub const DRIFT_LIMIT: f64 = 1e-6;

/// Threshold under which a curvature function counts as identically zero.
pub const ZERO_CURVATURE: f64 = 1e-10;

/// Rotation of the normal triple, `P'_i = sum_j r[i][j] P_j`.
pub type Rotation3<T> = [[T; 3]; 3];

pub fn identity_rotation<T: Scalar>() -> Rotation3<T> {
    let (o, z) = (T::one(), T::zero());
    [[o, z, z], [z, o, z], [z, z, o]]
}

/// Rotation by `angle` about `axis` (Rodrigues).
pub fn axis_angle<T: Scalar>(axis: [T; 3], angle: T) -> Rotation3<T> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [x, y, z] = axis.map(|a| a / n);
    let (s, c) = angle.sin_cos();
    let v = T::one() - c;
    [
        [c + x * x * v, x * y * v - z * s, x * z * v + y * s],
        [y * x * v + z * s, c + y * y * v, y * z * v - x * s],
        [z * x * v - y * s, z * y * v + x * s, c + z * z * v],
    ]
}

pub fn rotate3<T: Scalar>(r: &Rotation3<T>, k: [T; 3]) -> [T; 3] {
    [0, 1, 2].map(|i| r[i][0] * k[0] + r[i][1] * k[1] + r[i][2] * k[2])
}

/// Orthonormal frame: unit tangent and three normals.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Frame<T> {
    pub t: Vec4<T>,
    pub p: [Vec4<T>; 3],
}

impl<T: Scalar> Frame<T> {
    pub fn vectors(&self) -> [Vec4<T>; 4] {
        [self.t, self.p[0], self.p[1], self.p[2]]
    }

    pub fn gram_deviation(&self) -> T {
        gram_deviation(&self.vectors())
    }

    /// `det[T; P1; P2; P3]`, `+1` for a positively oriented frame.
    pub fn orientation(&self) -> T {
        det4(self.t, self.p[0], self.p[1], self.p[2])
    }

    /// Frame with the normals replaced by `r` applied to them.
    pub fn rotated(&self, r: &Rotation3<T>) -> Self {
        let p = [0, 1, 2].map(|i| self.p[0] * r[i][0] + self.p[1] * r[i][1] + self.p[2] * r[i][2]);
        Self { t: self.t, p }
    }

    /// Coordinates `<v, P_i>` of `v` in the normal triple.
    pub fn normal_coords(&self, v: Vec4<T>) -> [T; 3] {
        self.p.map(|p| p.dot(v))
    }
}

/// Frames at every grid node.
#[derive(Debug, Clone)]
pub struct FrameField<T> {
    pub frames: Grid<Frame<T>>,
    pub s_grid: Vec<T>,
    pub t_grid: Vec<T>,
    /// s-index where the columns are tied together.
    pub anchor: usize,
    /// Largest re-orthonormalization correction applied anywhere.
    pub max_correction: T,
}

impl<T: Scalar> FrameField<T> {
    pub fn max_gram_deviation(&self) -> T {
        self.frames
            .values()
            .iter()
            .fold(T::zero(), |m, f| m.max(f.gram_deviation()))
    }
}

/// Curvature functions and their derivatives on the grid, plus the
/// connection coefficients that feed the t-derivatives.
#[derive(Debug, Clone)]
pub struct CurvatureField<T> {
    pub k: [Grid<T>; 3],
    pub q: Grid<T>,
    /// `(k_i)_s = <Psi_sss, P_i>`, exact given the frame.
    pub k_s: [Grid<T>; 3],
    /// `(k_i)_s` by fourth-order differences; cross-check only.
    pub k_s_fd: [Grid<T>; 3],
    /// `(k_i)_ss` and `(k_i)_sss`, also from the jet.
    pub k_ss: [Grid<T>; 3],
    pub k_sss: [Grid<T>; 3],
    /// `(k_i)_t` from the closed forms (pure s-data plus quadrature).
    pub k_t: [Grid<T>; 3],
    /// `(k_i)_t` by fourth-order differences along t; cross-check only.
    pub k_t_fd: [Grid<T>; 3],
    /// s-derivative of the closed-form `(k_i)_t`.
    pub k_st: [Grid<T>; 3],
    pub conn: ConnectionField<T>,
    /// At least two of the curvature functions are non-zero somewhere.
    pub standing_assumption: bool,
}

impl<T: Scalar> CurvatureField<T> {
    pub fn ns(&self) -> usize {
        self.q.ns()
    }

    pub fn nt(&self) -> usize {
        self.q.nt()
    }

    pub fn k_at(&self, i: usize, j: usize) -> [T; 3] {
        [0, 1, 2].map(|m| self.k[m][(i, j)])
    }
}

/// Coefficients `a_ij` of the t-derivative matrix of the frame.
#[derive(Debug, Clone)]
pub struct ConnectionField<T> {
    pub a12: Grid<T>,
    pub a13: Grid<T>,
    pub a14: Grid<T>,
    pub a23: Grid<T>,
    pub a24: Grid<T>,
    pub a34: Grid<T>,
    /// Integrands of `a23, a24, a34` before quadrature.
    pub integrands: [Grid<T>; 3],
}

fn complete_frame<T: Scalar>(t: Vec4<T>, hints: &[Vec4<T>]) -> Option<[Vec4<T>; 3]> {
    let threshold = T::lit(crate::linalg4::DEPENDENCE_THRESHOLD);
    let mut basis = vec![t];
    let project = |basis: &[Vec4<T>], v: Vec4<T>| {
        let mut r = v;
        for _ in 0..2 {
            for q in basis {
                r -= *q * q.dot(r);
            }
        }
        r
    };
    for &h in hints {
        let r = project(&basis, h);
        let n = r.norm();
        if n > threshold * h.norm().max(T::one()) {
            basis.push(r / n);
        }
    }
    if basis.len() == 1 {
        return None;
    }
    while basis.len() < 4 {
        // the coordinate axis least aligned with what we have
        let best = (0..4)
            .map(|k| project(&basis, Vec4::basis(k)))
            .max_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap_or(std::cmp::Ordering::Equal))
            .expect("four axes");
        let n = best.norm();
        basis.push(best / n);
    }
    let mut p = [basis[1], basis[2], basis[3]];
    if det4(t, p[0], p[1], p[2]) < T::zero() {
        p[2] = -p[2];
    }
    Some(p)
}

/// Frame at `(s0, t0)`: `T = Psi_s`, normals from Gram-Schmidt of
/// `Psi_ss, Psi_t` completed by coordinate axes, positively oriented.
pub fn initial_frame<T: Scalar>(sd: &SurfaceDef<T>, s0: T, t0: T) -> Result<Frame<T>> {
    let jet = sd.jet(s0, t0)?;
    let t = jet.psi_s / jet.psi_s.norm();
    let p = complete_frame(t, &[jet.psi_ss, jet.psi_t]).ok_or(Error::DegenerateNormalSpace {
        s: s0.as_f64(),
        t: t0.as_f64(),
    })?;
    Ok(Frame { t, p })
}

/// Re-orthonormalizes `p` against the exact tangent `t`; returns the frame
/// and the size of the correction.
fn reorthonormalize<T: Scalar>(t: Vec4<T>, p: [Vec4<T>; 3]) -> (Frame<T>, T) {
    let mut out = p;
    for v in out.iter_mut() {
        for _ in 0..2 {
            *v -= t * t.dot(*v);
        }
    }
    // Newton-Schulz steps X <- X (3I - X^T X) / 2 towards the polar factor;
    // unlike Gram-Schmidt this commutes with constant rotations of the P_i
    let (half, three_halves) = (T::lit(0.5), T::lit(1.5));
    for _ in 0..3 {
        let g = [0, 1, 2].map(|a| [0, 1, 2].map(|b| out[a].dot(out[b])));
        out = [0, 1, 2].map(|a| {
            (0..3).fold(Vec4::zero(), |acc, b| {
                let delta = if a == b { three_halves } else { T::zero() };
                acc + out[b] * (delta - half * g[a][b])
            })
        });
    }
    let correction = (0..3).fold(T::zero(), |m, k| m.max((out[k] - p[k]).norm()));
    (Frame { t, p: out }, correction)
}

/// One RK4 step of `P' = -<D(x), P> T(x)` from `x` to `x + h`, where
/// `field(x) = (T(x), D(x))`.
fn rk4_step<T: Scalar>(
    p: [Vec4<T>; 3],
    x: T,
    h: T,
    field: &impl Fn(T) -> Result<(Vec4<T>, Vec4<T>)>,
) -> Result<[Vec4<T>; 3]> {
    let half = h / T::lit(2.0);
    let rhs = |(t, d): (Vec4<T>, Vec4<T>), p: [Vec4<T>; 3]| p.map(|pi| t * (-d.dot(pi)));
    let add = |a: [Vec4<T>; 3], b: [Vec4<T>; 3], c: T| [0, 1, 2].map(|i| a[i] + b[i] * c);
    let f0 = field(x)?;
    let fm = field(x + half)?;
    let f1 = field(x + h)?;
    let k1 = rhs(f0, p);
    let k2 = rhs(fm, add(p, k1, half));
    let k3 = rhs(fm, add(p, k2, half));
    let k4 = rhs(f1, add(p, k3, h));
    let sixth = h / T::lit(6.0);
    Ok([0, 1, 2].map(|i| p[i] + (k1[i] + k2[i] * T::lit(2.0) + k3[i] * T::lit(2.0) + k4[i]) * sixth))
}

/// Transports `p` from `x0` to `x1` with [`SUBSTEPS`] RK4 substeps.
fn transport_interval<T: Scalar>(
    p: [Vec4<T>; 3],
    x0: T,
    x1: T,
    field: &impl Fn(T) -> Result<(Vec4<T>, Vec4<T>)>,
) -> Result<[Vec4<T>; 3]> {
    let h = (x1 - x0) / T::lit(SUBSTEPS as f64);
    let mut p = p;
    for k in 0..SUBSTEPS {
        p = rk4_step(p, x0 + h * T::lit(k as f64), h, field)?;
    }
    Ok(p)
}

/// Parallel transport along the s-curve at `t` through the samples `s_grid`
/// (increasing or decreasing), starting from `init` at `s_grid[0]`.
///
/// Returns the frames and the largest re-orthonormalization correction.
pub fn transport_s<T: Scalar>(sd: &SurfaceDef<T>, t: T, s_grid: &[T], init: Frame<T>) -> Result<(Vec<Frame<T>>, T)> {
    let field = |s: T| Ok((sd.psi_s(s, t)?, sd.psi_ss(s, t)?));
    let mut out = Vec::with_capacity(s_grid.len());
    out.push(init);
    let mut worst = T::zero();
    for w in s_grid.windows(2) {
        let prev = out.last().expect("non-empty").p;
        let p = transport_interval(prev, w[0], w[1], &field)?;
        let (frame, correction) = reorthonormalize(sd.psi_s(w[1], t)?, p);
        if correction > T::lit(DRIFT_LIMIT) {
            return Err(Error::DriftExceeded {
                s: w[1].as_f64(),
                t: t.as_f64(),
                correction: correction.as_f64(),
            });
        }
        worst = worst.max(correction);
        out.push(frame);
    }
    Ok((out, worst))
}

/// Builds the frame field with the default initial frame.
pub fn propagate_t<T: Scalar>(sd: &SurfaceDef<T>) -> Result<FrameField<T>> {
    propagate_t_rotated(sd, &identity_rotation())
}

/// Builds the frame field from the default initial frame with its normals
/// rotated by `r` (a change of gauge).
pub fn propagate_t_rotated<T: Scalar>(sd: &SurfaceDef<T>, r: &Rotation3<T>) -> Result<FrameField<T>> {
    let s_grid = sd.s_grid();
    let t_grid = sd.t_grid();
    let a = sd.anchor_index();
    let init = initial_frame(sd, s_grid[a], t_grid[0])?.rotated(r);
    propagate_t_from(sd, init)
}

/// Builds the frame field from `init`, the frame at the anchor node of the
/// first t-column.
pub fn propagate_t_from<T: Scalar>(sd: &SurfaceDef<T>, init: Frame<T>) -> Result<FrameField<T>> {
    let s_grid = sd.s_grid();
    let t_grid = sd.t_grid();
    let a = sd.anchor_index();
    let sa = s_grid[a];

    // sequential scan along t at the anchor
    let field = |t: T| Ok((sd.psi_s(sa, t)?, sd.jet(sa, t)?.psi_st));
    let mut anchors = Vec::with_capacity(t_grid.len());
    anchors.push(init);
    let mut worst = T::zero();
    for w in t_grid.windows(2) {
        let prev = anchors.last().expect("non-empty").p;
        let p = transport_interval(prev, w[0], w[1], &field)?;
        let (frame, correction) = reorthonormalize(sd.psi_s(sa, w[1])?, p);
        if correction > T::lit(DRIFT_LIMIT) {
            return Err(Error::DriftExceeded {
                s: sa.as_f64(),
                t: w[1].as_f64(),
                correction: correction.as_f64(),
            });
        }
        worst = worst.max(correction);
        anchors.push(frame);
    }

    let forward: Vec<T> = s_grid[a..].to_vec();
    let backward: Vec<T> = s_grid[..=a].iter().rev().copied().collect();
    let columns: Result<Vec<(Vec<Frame<T>>, T)>> = anchors
        .par_iter()
        .zip(t_grid.par_iter())
        .map(|(&start, &t)| {
            let (fwd, c1) = transport_s(sd, t, &forward, start)?;
            let (bwd, c2) = transport_s(sd, t, &backward, start)?;
            let mut col: Vec<Frame<T>> = bwd.into_iter().rev().collect();
            col.extend_from_slice(&fwd[1..]);
            Ok((col, c1.max(c2)))
        })
        .collect();
    let columns = columns?;
    for (_, c) in &columns {
        worst = worst.max(*c);
    }
    Ok(FrameField {
        frames: Grid::from_columns(columns.into_iter().map(|(c, _)| c).collect()),
        s_grid,
        t_grid,
        anchor: a,
        max_correction: worst,
    })
}

/// Curvature functions of `ff` and everything derived from them.
pub fn curvatures<T: Scalar>(ff: &FrameField<T>, sd: &SurfaceDef<T>) -> Result<CurvatureField<T>> {
    let jets = sd.jet_grid()?;
    let (ns, nt) = (sd.ns, sd.nt);
    let project = |m: usize, pick: fn(&crate::surface::Jet<T>) -> Vec4<T>| {
        Grid::from_fn(ns, nt, |i, j| pick(&jets[(i, j)]).dot(ff.frames[(i, j)].p[m]))
    };
    let k = [0, 1, 2].map(|m| project(m, |j| j.psi_ss));
    // With (P_i)_s = -k_i T, <Psi_sss, T> = -Q^2 and <Psi_ssss, T> = -3/2 (Q^2)_s:
    //   (k_i)_s   = <Psi_sss, P_i>
    //   (k_i)_ss  = <Psi_ssss, P_i> + Q^2 k_i
    //   (k_i)_sss = <Psi_sssss, P_i> + 5/2 (Q^2)_s k_i + Q^2 (k_i)_s
    let k_s = [0, 1, 2].map(|m| project(m, |j| j.psi_sss));
    let p4 = [0, 1, 2].map(|m| project(m, |j| j.psi_ssss));
    let p5 = [0, 1, 2].map(|m| project(m, |j| j.psi_sssss));
    let q2 = Grid::from_fn(ns, nt, |i, j| (0..3).fold(T::zero(), |a, m| a + k[m][(i, j)].powi(2)));
    let q2_s = Grid::from_fn(ns, nt, |i, j| {
        (0..3).fold(T::zero(), |a, m| a + T::lit(2.0) * k[m][(i, j)] * k_s[m][(i, j)])
    });
    let k_ss = [0, 1, 2].map(|m| Grid::from_fn(ns, nt, |i, j| p4[m][(i, j)] + q2[(i, j)] * k[m][(i, j)]));
    let k_sss = [0, 1, 2].map(|m| {
        Grid::from_fn(ns, nt, |i, j| {
            let c = (i, j);
            p5[m][c] + T::lit(2.5) * q2_s[c] * k[m][c] + q2[c] * k_s[m][c]
        })
    });
    Ok(derive_curvature_field(k, [k_s, k_ss, k_sss], sd, ff.anchor))
}

/// Completes a curvature field from the `k_i` grids and their first three
/// s-derivatives: connection coefficients and both t-derivative paths.
pub fn derive_curvature_field<T: Scalar>(
    k: [Grid<T>; 3],
    s_derivs: [[Grid<T>; 3]; 3],
    sd: &SurfaceDef<T>,
    anchor: usize,
) -> CurvatureField<T> {
    let (hs, ht) = (sd.hs(), sd.ht());
    let (ns, nt) = (k[0].ns(), k[0].nt());
    let q = Grid::from_fn(ns, nt, |i, j| {
        (k[0][(i, j)].powi(2) + k[1][(i, j)].powi(2) + k[2][(i, j)].powi(2)).sqrt()
    });
    let [k_s, k_ss, k_sss] = s_derivs;
    let k_s_fd = [0, 1, 2].map(|m| d_ds(&k[m], 1, hs));
    let conn = connection_field(&k, &k_ss, sd, anchor);

    let cell = |g: &Grid<T>, i, j| g[(i, j)];
    let p = sd.params;
    // The constants add c x k to k_t (an infinitesimal rotation of k); that
    // part is differentiated in s exactly, the rest by differences.
    let rotation = |v: [T; 3]| {
        [
            p.c23 * v[1] + p.c24 * v[2],
            p.c34 * v[2] - p.c23 * v[0],
            -p.c34 * v[1] - p.c24 * v[0],
        ]
    };
    let k_t_free = {
        let kt = |m: usize| {
            Grid::from_fn(ns, nt, |i, j| {
                let [k1, k2, k3] = [0, 1, 2].map(|n| cell(&k[n], i, j));
                let [k1s, k2s, k3s] = [0, 1, 2].map(|n| cell(&k_s[n], i, j));
                let [k1ss, k2ss, k3ss] = [0, 1, 2].map(|n| cell(&k_ss[n], i, j));
                let [k1sss, k2sss, k3sss] = [0, 1, 2].map(|n| cell(&k_sss[n], i, j));
                let a23 = conn.a23[(i, j)] - p.c23;
                let a24 = conn.a24[(i, j)] - p.c24;
                let a34 = conn.a34[(i, j)] - p.c34;
                match m {
                    0 => -k2s * k3ss + k3s * k2ss + k2 * (a23 - k3sss) + k3 * (a24 + k2sss),
                    1 => -k3s * k1ss + k1s * k3ss + k3 * (a34 - k1sss) + k1 * (-a23 + k3sss),
                    _ => k2s * k1ss - k1s * k2ss + k2 * (-a34 + k1sss) - k1 * (a24 + k2sss),
                }
            })
        };
        [kt(0), kt(1), kt(2)]
    };
    let with_rotation = |free: &[Grid<T>; 3], v: &[Grid<T>; 3]| {
        [0, 1, 2].map(|m| {
            Grid::from_fn(ns, nt, |i, j| {
                free[m][(i, j)] + rotation([0, 1, 2].map(|n| cell(&v[n], i, j)))[m]
            })
        })
    };
    let k_t = with_rotation(&k_t_free, &k);
    let k_st = with_rotation(&[0, 1, 2].map(|m| d_ds(&k_t_free[m], 1, hs)), &k_s);
    let k_t_fd = [0, 1, 2].map(|m| d_dt(&k[m], 1, ht));

    let zero = T::lit(ZERO_CURVATURE);
    let nonzero = k.iter().filter(|g| g.values().iter().any(|v| v.abs() > zero)).count();
    CurvatureField {
        k,
        q,
        k_s,
        k_s_fd,
        k_ss,
        k_sss,
        k_t,
        k_t_fd,
        k_st,
        conn,
        standing_assumption: nonzero >= 2,
    }
}

/// `a12, a13, a14` by direct evaluation; `a23, a24, a34` by cumulative
/// Simpson quadrature along s from the anchor plus the configured constants.
pub fn connection_field<T: Scalar>(
    k: &[Grid<T>; 3],
    k_ss: &[Grid<T>; 3],
    sd: &SurfaceDef<T>,
    anchor: usize,
) -> ConnectionField<T> {
    let (ns, nt) = (k[0].ns(), k[0].nt());
    let at = |g: &[Grid<T>; 3], i, j| [0, 1, 2].map(|m| g[m][(i, j)]);
    let direct = |f: fn([T; 3], [T; 3]) -> T| Grid::from_fn(ns, nt, |i, j| f(at(k, i, j), at(k_ss, i, j)));
    let a12 = direct(|[_, k2, k3], [_, k2ss, k3ss]| k3 * k2ss - k2 * k3ss);
    let a13 = direct(|[k1, _, k3], [k1ss, _, k3ss]| k1 * k3ss - k3 * k1ss);
    let a14 = direct(|[k1, k2, _], [k1ss, k2ss, _]| k2 * k1ss - k1 * k2ss);
    let integrands = [
        direct(|[k1, k2, k3], [k1ss, k2ss, k3ss]| k3 * (k1 * k1ss + k2 * k2ss) - k3ss * (k1 * k1 + k2 * k2)),
        direct(|[k1, k2, k3], [k1ss, k2ss, k3ss]| -k2 * (k1 * k1ss + k3 * k3ss) + k2ss * (k1 * k1 + k3 * k3)),
        direct(|[k1, k2, k3], [k1ss, k2ss, k3ss]| k1 * (k2 * k2ss + k3 * k3ss) - k1ss * (k2 * k2 + k3 * k3)),
    ];
    let hs = sd.hs();
    let integrate = |g: &Grid<T>, c: T| {
        let columns: Vec<Vec<T>> = (0..nt)
            .into_par_iter()
            .map(|j| {
                cumulative_simpson(g.column(j), hs, anchor)
                    .into_iter()
                    .map(|v| v + c)
                    .collect()
            })
            .collect();
        Grid::from_columns(columns)
    };
    let p = sd.params;
    ConnectionField {
        a23: integrate(&integrands[0], p.c23),
        a24: integrate(&integrands[1], p.c24),
        a34: integrate(&integrands[2], p.c34),
        a12,
        a13,
        a14,
        integrands,
    }
}

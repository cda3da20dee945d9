#![allow(dead_code)]

use std::f64::consts::PI;

use bdr_core::linalg4::det4;
use bdr_core::surface::{Jet, Params, SurfaceDef};
use bdr_core::Vec4f;

pub const SOLITON: [&str; 4] = ["(sin(s)+s)/2", "cos(s)/sqrt(2)", "(sin(s)-s)/2", "-t/(2*sqrt(2))"];
pub const HELIX: [&str; 4] = ["0.6*cos(s)", "0.6*sin(s)", "0.8*s", "-0.288*t"];
pub const CLIFFORD: [&str; 4] = [
    "exp(15/8*t)*cos(s)/sqrt(1+exp(15/4*t))",
    "exp(15/8*t)*sin(s)/sqrt(1+exp(15/4*t))",
    "cos(1.5*s)/(1.5*sqrt(1+exp(15/4*t)))",
    "sin(1.5*s)/(1.5*sqrt(1+exp(15/4*t)))",
];

pub fn surface(c: [&str; 4], ns: usize, nt: usize) -> SurfaceDef<f64> {
    SurfaceDef::from_strs(c, (0.0, 4.0 * PI), (-1.0, 1.0), ns, nt).unwrap()
}

pub fn with_constants(sd: SurfaceDef<f64>, c23: f64, c24: f64, c34: f64) -> SurfaceDef<f64> {
    sd.with_params(Params {
        s0: None,
        c23,
        c24,
        c34,
    })
    .unwrap()
}

/// Invariants computed straight from the second derivatives of Psi in an
/// orthonormal tangent frame, with no curvature functions involved.
#[derive(Debug, Clone, Copy)]
pub struct Direct {
    pub gaussian: f64,
    pub mean_norm2: f64,
    pub normal_curvature_abs: f64,
    pub delta_p: f64,
}

pub fn direct_invariants(j: &Jet<f64>) -> Direct {
    let (ps, pt) = (j.psi_s, j.psi_t);
    let alpha = 1.0 / ps.norm();
    let e1 = ps * alpha;
    let u = pt - e1 * pt.dot(e1);
    let gamma = 1.0 / u.norm();
    let beta = -pt.dot(e1) * alpha * gamma;
    let e2 = u * gamma;
    // e1 = alpha d_s, e2 = beta d_s + gamma d_t
    let h11 = j.psi_ss * (alpha * alpha);
    let h12 = (j.psi_ss * beta + j.psi_st * gamma) * alpha;
    let h22 = j.psi_ss * (beta * beta) + j.psi_st * (2.0 * beta * gamma) + j.psi_tt * (gamma * gamma);

    let mut normals: Vec<Vec4f> = Vec::new();
    let mut candidates: Vec<Vec4f> = (0..4).map(Vec4f::basis).collect();
    while normals.len() < 2 {
        let residual = |b: Vec4f| {
            let mut r = b - e1 * b.dot(e1) - e2 * b.dot(e2);
            for n in &normals {
                r = r - *n * r.dot(*n);
            }
            r
        };
        let best = candidates
            .iter()
            .enumerate()
            .max_by(|a, b| residual(*a.1).norm().total_cmp(&residual(*b.1).norm()))
            .map(|(k, _)| k)
            .unwrap();
        let r = residual(candidates.remove(best));
        normals.push(r * (1.0 / r.norm()));
    }
    let h = |n: Vec4f| [h11.dot(n), h12.dot(n), h22.dot(n)];
    let [a, b] = [h(normals[0]), h(normals[1])];
    let gaussian = a[0] * a[2] - a[1] * a[1] + b[0] * b[2] - b[1] * b[1];
    let mean_norm2 = ((a[0] + a[2]).powi(2) + (b[0] + b[2]).powi(2)) / 4.0;
    let normal_curvature_abs = ((a[0] - a[2]) * b[1] - (b[0] - b[2]) * a[1]).abs();
    let row = |x: [f64; 4]| Vec4f::from_array(x);
    let delta_p = det4(
        row([a[0], 2.0 * a[1], a[2], 0.0]),
        row([b[0], 2.0 * b[1], b[2], 0.0]),
        row([0.0, a[0], 2.0 * a[1], a[2]]),
        row([0.0, b[0], 2.0 * b[1], b[2]]),
    ) / 4.0;
    Direct {
        gaussian,
        mean_norm2,
        normal_curvature_abs,
        delta_p,
    }
}

/// `|x - y| <= tol * max(1, |x|, |y|)`.
pub fn close(x: f64, y: f64, tol: f64) -> bool {
    (x - y).abs() <= tol * 1f64.max(x.abs()).max(y.abs())
}

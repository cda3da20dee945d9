//! Surface invariants at grid cells: tangent coefficients, fundamental forms,
//! the normal frame `N1, N2`, connection coefficients, the scalars
//! `A`, `B`, `C`, the invariants `k`, `h`, shape operators, `K`, `H`, `K_N`
//! and `Delta(p)`.

use crate::error::{Degeneracy, Error, Result};
use crate::grid::{d_ds, Cell, Grid};
use crate::linalg4::{Mat2, Vec4};
use crate::ptframe::{CurvatureField, FrameField};
use crate::scalar::Scalar;
use crate::surface::{Jet, SurfaceDef};

/// `Q` or `W` below this marks a cell degenerate.
pub const DEGENERACY_THRESHOLD: f64 = 1e-10;

/// Tangent-plane data: `Psi_t = P P1 + R P2 + S P3` and the first
/// fundamental form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TangentData<T> {
    pub p: T,
    pub r: T,
    pub s: T,
    pub g11: T,
    pub g12: T,
    pub g22: T,
    pub w: T,
    /// `<Psi_s, Psi_s>`, `<Psi_s, Psi_t>` and `<Psi_t, Psi_t>` from the jet.
    pub g_jet: [T; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ConnectionData<T> {
    pub a12: T,
    pub a13: T,
    pub a14: T,
    pub a23: T,
    pub a24: T,
    pub a34: T,
}

/// Normal components `c_ij^k = <Psi_ij, N_k>` of the second derivatives.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CCoeffs<T> {
    pub c11_1: T,
    pub c11_2: T,
    pub c12_1: T,
    pub c12_2: T,
    pub c22_1: T,
    pub c22_2: T,
}

/// Second routes to quantities the report carries in closed form.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CrossChecks<T> {
    /// `det(A_N1) + det(A_N2)`.
    pub gaussian_from_shape: T,
    /// `(tr(A_N1) N1 + tr(A_N2) N2) / 2`.
    pub mean_from_traces: Vec4<T>,
    /// Gaussian torsion from the general `c_ij^k` formula.
    pub torsion_general: T,
    /// `k` and `h` as `det(gamma)` and `-tr(gamma)/2`.
    pub k_from_gamma: T,
    pub h_from_gamma: T,
    /// Quarter determinant of the 4x4 matrix of second fundamental form
    /// coefficients.
    pub delta_from_det: T,
}

/// Everything known about one non-degenerate grid cell.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct InvariantReport<T> {
    pub cell: (usize, usize),
    pub s: T,
    pub t: T,
    pub k: [T; 3],
    pub q: T,
    pub tangent: TangentData<T>,
    pub connection: ConnectionData<T>,
    pub a: T,
    pub b: T,
    pub c: T,
    pub c_coeffs: CCoeffs<T>,
    pub delta1: T,
    pub delta2: T,
    pub delta3: T,
    pub l11: T,
    pub l12: T,
    pub l22: T,
    pub gamma: Mat2<T>,
    pub k_inv: T,
    pub h_inv: T,
    pub shape_n1: Mat2<T>,
    pub shape_n2: Mat2<T>,
    pub gaussian: T,
    pub mean: Vec4<T>,
    pub mean_norm2: T,
    pub torsion: T,
    pub wintgen_gap: T,
    pub delta_p: T,
    pub n1: Vec4<T>,
    pub n2: Vec4<T>,
    pub checks: CrossChecks<T>,
}

impl<T: Scalar> InvariantReport<T> {
    pub fn mean_norm(&self) -> T {
        self.mean_norm2.sqrt()
    }

    /// `h^k_ij` as the matrix `[[h11^1, h12^1, h22^1], [h11^2, h12^2, h22^2]]`.
    pub fn second_form_matrix(&self) -> [[T; 3]; 2] {
        let (a, b) = (self.shape_n1, self.shape_n2);
        [[a.a11, a.a12, a.a22], [b.a11, b.a12, b.a22]]
    }
}

/// Grid data shared by all cell computations.
pub struct InvariantField<'a, T> {
    pub sd: &'a SurfaceDef<T>,
    pub ff: &'a FrameField<T>,
    pub cf: &'a CurvatureField<T>,
    pub jets: Grid<Jet<T>>,
    /// `P, R, S` on the grid.
    pub prs: [Grid<T>; 3],
    /// Their s-derivatives. The `k_s k_s` terms cancel, leaving
    /// `(P, R, S)_s = (a12, a13, a14)`.
    pub prs_s: [Grid<T>; 3],
    /// The same by finite differences; cross-check only.
    pub prs_s_fd: [Grid<T>; 3],
}

impl<'a, T: Scalar> InvariantField<'a, T> {
    pub fn new(sd: &'a SurfaceDef<T>, ff: &'a FrameField<T>, cf: &'a CurvatureField<T>) -> Result<Self> {
        let jets = sd.jet_grid()?;
        let (ns, nt) = (cf.ns(), cf.nt());
        let prs = [0, 1, 2].map(|m| Grid::from_fn(ns, nt, |i, j| prs_at(cf, i, j)[m]));
        let c = &cf.conn;
        let prs_s = [c.a12.clone(), c.a13.clone(), c.a14.clone()];
        let prs_s_fd = [0, 1, 2].map(|m| d_ds(&prs[m], 1, sd.hs()));
        Ok(Self {
            sd,
            ff,
            cf,
            jets,
            prs,
            prs_s,
            prs_s_fd,
        })
    }

    pub fn ns(&self) -> usize {
        self.cf.ns()
    }

    pub fn nt(&self) -> usize {
        self.cf.nt()
    }

    fn degenerate(&self, cell: Cell, reason: Degeneracy) -> Error {
        let (s, t) = self.sd.node(cell.i, cell.j);
        Error::DegeneratePoint {
            s: s.as_f64(),
            t: t.as_f64(),
            reason,
        }
    }
}

fn prs_at<T: Scalar>(cf: &CurvatureField<T>, i: usize, j: usize) -> [T; 3] {
    let [k1, k2, k3] = cf.k_at(i, j);
    let [k1s, k2s, k3s] = [0, 1, 2].map(|m| cf.k_s[m][(i, j)]);
    [k3 * k2s - k2 * k3s, k1 * k3s - k3 * k1s, k2 * k1s - k1 * k2s]
}

/// `P, R, S`, the first fundamental form and `W`.
pub fn tangent_data<T: Scalar>(f: &InvariantField<T>, cell: Cell) -> Result<TangentData<T>> {
    let [p, r, s] = [0, 1, 2].map(|m| f.prs[m][cell]);
    let g22 = p * p + r * r + s * s;
    let w = g22.sqrt();
    if !(w >= T::lit(DEGENERACY_THRESHOLD)) {
        return Err(f.degenerate(cell, Degeneracy::ZeroSpeedInT));
    }
    let jet = &f.jets[cell];
    Ok(TangentData {
        p,
        r,
        s,
        g11: T::one(),
        g12: T::zero(),
        g22,
        w,
        g_jet: [
            jet.psi_s.norm_squared(),
            jet.psi_s.dot(jet.psi_t),
            jet.psi_t.norm_squared(),
        ],
    })
}

/// The orthonormal normal frame `N1, N2` of the surface.
pub fn normal_frame<T: Scalar>(f: &InvariantField<T>, td: &TangentData<T>, cell: Cell) -> Result<(Vec4<T>, Vec4<T>)> {
    let q = f.cf.q[cell];
    if !(q >= T::lit(DEGENERACY_THRESHOLD)) {
        return Err(f.degenerate(cell, Degeneracy::ZeroCurvature));
    }
    if !(td.w >= T::lit(DEGENERACY_THRESHOLD)) {
        return Err(f.degenerate(cell, Degeneracy::ZeroSpeedInT));
    }
    let [k1, k2, k3] = f.cf.k_at(cell.i, cell.j);
    let [p1, p2, p3] = f.ff.frames[cell].p;
    let (p, r, s) = (td.p, td.r, td.s);
    let n1 = (p1 * k1 + p2 * k2 + p3 * k3) / q;
    let n2 = (p1 * (k2 * s - k3 * r) + p2 * (k3 * p - k1 * s) + p3 * (k1 * r - k2 * p)) / (q * td.w);
    Ok((n1, n2))
}

/// Connection coefficients at `cell`.
pub fn connection<T: Scalar>(cf: &CurvatureField<T>, cell: Cell) -> ConnectionData<T> {
    let c = &cf.conn;
    ConnectionData {
        a12: c.a12[cell],
        a13: c.a13[cell],
        a14: c.a14[cell],
        a23: c.a23[cell],
        a24: c.a24[cell],
        a34: c.a34[cell],
    }
}

/// t-derivatives of `P, R, S` from the closed-form `(k_i)_t` and its
/// s-derivative.
pub fn prs_t<T: Scalar>(cf: &CurvatureField<T>, cell: Cell) -> [T; 3] {
    let at = |g: &[Grid<T>; 3]| [0, 1, 2].map(|m| g[m][cell]);
    let [k1, k2, k3] = at(&cf.k);
    let [k1s, k2s, k3s] = at(&cf.k_s);
    let [k1t, k2t, k3t] = at(&cf.k_t);
    let [k1st, k2st, k3st] = at(&cf.k_st);
    [
        k3t * k2s + k3 * k2st - k2t * k3s - k2 * k3st,
        k1t * k3s + k1 * k3st - k3t * k1s - k3 * k1st,
        k2t * k1s + k2 * k1st - k1t * k2s - k1 * k2st,
    ]
}

/// The scalars `A`, `B`, `C`.
pub fn abc_scalars<T: Scalar>(
    f: &InvariantField<T>,
    td: &TangentData<T>,
    cd: &ConnectionData<T>,
    cell: Cell,
) -> (T, T, T) {
    let cf = f.cf;
    let [k1, k2, k3] = cf.k_at(cell.i, cell.j);
    let [k1t, k2t, k3t] = [0, 1, 2].map(|m| cf.k_t[m][cell]);
    let [k1s, k2s, k3s] = [0, 1, 2].map(|m| cf.k_s[m][cell]);
    let [pt, rt, st] = prs_t(cf, cell);
    let [ps, rs, ss] = [0, 1, 2].map(|m| f.prs_s[m][cell]);
    let (p, r, s) = (td.p, td.r, td.s);
    let a = (p * k3 - s * k1) * cd.a24 + (p * k2 - r * k1) * cd.a23 + (r * k3 - s * k2) * cd.a34
        - r * k2t
        - s * k3t
        - p * k1t;
    let b = td.g22 * (k1 * cd.a34 - k2 * cd.a24 + k3 * cd.a23)
        + s * (k2 * pt - k1 * rt)
        + r * (k1 * st - k3 * pt)
        + p * (k3 * rt - k2 * st);
    let c = k1s * ps + k2s * rs + k3s * ss;
    (a, b, c)
}

fn det4x4<T: Scalar>(m: [[T; 4]; 4]) -> T {
    let rows = m.map(Vec4::from_array);
    crate::linalg4::det4(rows[0], rows[1], rows[2], rows[3])
}

/// `Delta(p)` as a quarter of the 4x4 determinant built from `h^k_ij`.
pub fn delta_from_second_form<T: Scalar>(h: [[T; 3]; 2]) -> T {
    let two = T::lit(2.0);
    let z = T::zero();
    let [[a11, a12, a22], [b11, b12, b22]] = h;
    det4x4([
        [a11, two * a12, a22, z],
        [b11, two * b12, b22, z],
        [z, a11, two * a12, a22],
        [z, b11, two * b12, b22],
    ]) / T::lit(4.0)
}

/// Full report at `cell`.
pub fn invariant_report<T: Scalar>(f: &InvariantField<T>, cell: Cell) -> Result<InvariantReport<T>> {
    let td = tangent_data(f, cell)?;
    let (n1, n2) = normal_frame(f, &td, cell)?;
    let cd = connection(f.cf, cell);
    let (a, b, c) = abc_scalars(f, &td, &cd, cell);
    let (s, t) = f.sd.node(cell.i, cell.j);
    Ok(assemble(Inputs {
        cell,
        point: (s, t),
        frame: f.ff.frames[cell].p,
        k: f.cf.k_at(cell.i, cell.j),
        q: f.cf.q[cell],
        td,
        cd,
        abc: (a, b, c),
        normals: (n1, n2),
    }))
}

impl<T: Scalar> InvariantReport<T> {
    /// A report determined by `Q`, `W` and `A, B, C` alone, in the standard
    /// ambient basis: `T = e1`, `P_i = e_(i+1)`, `k = (Q, 0, 0)`,
    /// `(P, R, S) = (0, W, 0)`, zero connection. Everything the classification
    /// reads is consistent with these scalars.
    pub fn synthetic(q: T, w: T, a: T, b: T, c: T) -> Self {
        let z = T::zero();
        let g22 = w * w;
        let td = TangentData {
            p: z,
            r: w,
            s: z,
            g11: T::one(),
            g12: z,
            g22,
            w,
            g_jet: [T::one(), z, g22],
        };
        assemble(Inputs {
            cell: Cell::new(0, 0),
            point: (z, z),
            frame: [Vec4::basis(1), Vec4::basis(2), Vec4::basis(3)],
            k: [q, z, z],
            q,
            td,
            cd: ConnectionData::default(),
            abc: (a, b, c),
            normals: (Vec4::basis(1), Vec4::basis(3)),
        })
    }
}

struct Inputs<T> {
    cell: Cell,
    point: (T, T),
    frame: [Vec4<T>; 3],
    k: [T; 3],
    q: T,
    td: TangentData<T>,
    cd: ConnectionData<T>,
    abc: (T, T, T),
    normals: (Vec4<T>, Vec4<T>),
}

fn assemble<T: Scalar>(inp: Inputs<T>) -> InvariantReport<T> {
    let Inputs {
        cell,
        point,
        frame,
        k,
        q,
        td,
        cd,
        abc: (a, b, c),
        normals: (n1, n2),
    } = inp;
    let w = td.w;
    let (w2, q2) = (w * w, q * q);
    let (w3, w4) = (w2 * w, w2 * w2);
    let w6 = w4 * w2;
    let two = T::lit(2.0);
    let four = T::lit(4.0);

    let cc = CCoeffs {
        c11_1: q,
        c11_2: T::zero(),
        c12_1: T::zero(),
        c12_2: q * c / w,
        c22_1: a / q,
        c22_2: b / (w * q),
    };
    let delta1 = q2 * c / w;
    let delta2 = b / w;
    let delta3 = -a * c / w;
    let (l11, l12, l22) = (two * delta1 / w, delta2 / w, two * delta3 / w);
    let (g11, g12, g22) = (td.g11, td.g12, td.g22);
    let g = g11 * g22 - g12 * g12;
    let gamma = Mat2::new(
        (g12 * l12 - g22 * l11) / g,
        (g12 * l11 - g11 * l12) / g,
        (g12 * l22 - g22 * l12) / g,
        (g12 * l12 - g11 * l22) / g,
    );
    let k_inv = -(b * b + four * q2 * a * c * c) / w6;
    let h_inv = (q2 * w2 - a) * c / w4;

    let h12_2 = q * c / w2;
    let shape_n1 = Mat2::new(q, T::zero(), T::zero(), a / (q * w2));
    let shape_n2 = Mat2::new(T::zero(), h12_2, h12_2, b / (q * w3));
    let gaussian = (a * w2 - q2 * c * c) / w4;

    let [p1, p2, p3] = frame;
    let [k1, k2, k3] = k;
    let (p, r, s) = (td.p, td.r, td.s);
    let qa = q2 * w2 + a;
    let mean = (p1 * ((s * k2 - r * k3) * b + w2 * k1 * qa)
        + p2 * ((-s * k1 + p * k3) * b + w2 * k2 * qa)
        + p3 * ((r * k1 - p * k2) * b + w2 * k3 * qa))
        / (two * q2 * w4);
    let mean_norm2 = mean.norm_squared();
    let torsion = (q2 * w2 - a) * c / w4;
    let delta_p = -(b * b + four * q2 * a * c * c) / (four * w6);

    let torsion_general = (g11 * (cc.c12_1 * cc.c22_2 - cc.c12_2 * cc.c22_1)
        - g12 * (cc.c11_1 * cc.c22_2 - cc.c11_2 * cc.c22_1)
        + g22 * (cc.c11_1 * cc.c12_2 - cc.c11_2 * cc.c12_1))
        / (g.sqrt() * g);
    let mut report = InvariantReport {
        cell: (cell.i, cell.j),
        s: point.0,
        t: point.1,
        k,
        q,
        tangent: td,
        connection: cd,
        a,
        b,
        c,
        c_coeffs: cc,
        delta1,
        delta2,
        delta3,
        l11,
        l12,
        l22,
        gamma,
        k_inv,
        h_inv,
        shape_n1,
        shape_n2,
        gaussian,
        mean,
        mean_norm2,
        torsion,
        wintgen_gap: mean_norm2 - gaussian - torsion.abs(),
        delta_p,
        n1,
        n2,
        checks: CrossChecks::default(),
    };
    report.checks = CrossChecks {
        gaussian_from_shape: shape_n1.det() + shape_n2.det(),
        mean_from_traces: (n1 * shape_n1.trace() + n2 * shape_n2.trace()) / two,
        torsion_general,
        k_from_gamma: gamma.det(),
        h_from_gamma: -gamma.trace() / two,
        delta_from_det: delta_from_second_form(report.second_form_matrix()),
    };
    report
}

/// Compatibility residuals: the closed-form `(k_i)_t` minus the t-differenced one.
pub fn compatibility_residuals<T: Scalar>(cf: &CurvatureField<T>, cell: Cell) -> [T; 3] {
    [0, 1, 2].map(|m| cf.k_t[m][cell] - cf.k_t_fd[m][cell])
}

/// Cells whose s- and t-stencils are all centred.
pub fn is_interior(cell: Cell, ns: usize, nt: usize) -> bool {
    const MARGIN: usize = 3;
    cell.i >= MARGIN && cell.i + MARGIN < ns && cell.j >= 2 && cell.j + 2 < nt
}

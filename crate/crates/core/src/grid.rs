//! Uniform (s, t) grids, fourth-order finite differences and cumulative
//! Simpson quadrature on grid columns.

use std::ops::{Index, IndexMut};

use crate::scalar::Scalar;

/// Accuracy order of every finite-difference stencil in this module.
pub const FD_ORDER: usize = 4;

/// Grid cell `(i, j)`: `i` indexes s, `j` indexes t.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Cell {
    pub i: usize,
    pub j: usize,
}

impl Cell {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

/// Scalar field on an `ns x nt` grid. Stored column by column: each fixed-t
/// column (an s-curve) is contiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid<T> {
    ns: usize,
    nt: usize,
    data: Vec<T>,
}

impl<T: Copy> Grid<T> {
    pub fn filled(ns: usize, nt: usize, value: T) -> Self {
        Self {
            ns,
            nt,
            data: vec![value; ns * nt],
        }
    }

    pub fn from_fn(ns: usize, nt: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(ns * nt);
        for j in 0..nt {
            for i in 0..ns {
                data.push(f(i, j));
            }
        }
        Self { ns, nt, data }
    }

    /// Builds a grid from per-column vectors (each of length `ns`).
    pub fn from_columns(columns: Vec<Vec<T>>) -> Self {
        let nt = columns.len();
        let ns = columns.first().map_or(0, Vec::len);
        assert!(columns.iter().all(|c| c.len() == ns), "ragged columns");
        Self {
            ns,
            nt,
            data: columns.into_iter().flatten().collect(),
        }
    }

    pub fn ns(&self) -> usize {
        self.ns
    }

    pub fn nt(&self) -> usize {
        self.nt
    }

    pub fn column(&self, j: usize) -> &[T] {
        &self.data[j * self.ns..(j + 1) * self.ns]
    }

    pub fn values(&self) -> &[T] {
        &self.data
    }

    pub fn map<U: Copy>(&self, f: impl Fn(T) -> U) -> Grid<U> {
        Grid {
            ns: self.ns,
            nt: self.nt,
            data: self.data.iter().map(|&x| f(x)).collect(),
        }
    }

    /// Values along the t-direction at fixed `i`.
    pub fn row(&self, i: usize) -> Vec<T> {
        (0..self.nt).map(|j| self[(i, j)]).collect()
    }
}

impl<T> Index<(usize, usize)> for Grid<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.data[j * self.ns + i]
    }
}

impl<T> IndexMut<(usize, usize)> for Grid<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.data[j * self.ns + i]
    }
}

impl<T> Index<Cell> for Grid<T> {
    type Output = T;
    fn index(&self, c: Cell) -> &T {
        &self.data[c.j * self.ns + c.i]
    }
}

/// Evenly spaced samples `start + k (end - start) / (n - 1)`, `k = 0..n`.
pub fn linspace<T: Scalar>(start: T, end: T, n: usize) -> Vec<T> {
    let steps = T::lit((n.max(2) - 1) as f64);
    (0..n)
        .map(|k| start + (end - start) * T::lit(k as f64) / steps)
        .collect()
}

/// Finite-difference weights (Fornberg) for the `order`-th derivative at
/// `z` from samples at abscissae `x`, in units where the spacing is 1.
pub fn fd_weights(z: f64, x: &[f64], order: usize) -> Vec<f64> {
    let n = x.len();
    assert!(n > order, "need more than {order} points");
    let mut c = vec![vec![0.0; order + 1]; n];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(order);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[i][k] = c1 * (k as f64 * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                }
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for k in (1..=mn).rev() {
                c[j][k] = (c4 * c[j][k] - k as f64 * c[j][k - 1]) / c3;
            }
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    c.into_iter().map(|row| row[order]).collect()
}

/// Fourth-order stencils for derivative `order` (1..=3) on `n` uniformly
/// spaced points: central where they fit, shifted one-sided near the ends.
#[derive(Debug, Clone)]
pub struct Stencils {
    order: usize,
    /// `(first index, weights)` for each node, weights already divided by `h^order`.
    nodes: Vec<(usize, Vec<f64>)>,
}

impl Stencils {
    pub fn new(order: usize, n: usize, h: f64) -> Self {
        assert!((1..=3).contains(&order), "derivative order {order} unsupported");
        // symmetric stencils gain one order; shifted ones need order + 4 points
        let central = if order == 3 { 7 } else { 5 };
        let shifted = order + FD_ORDER;
        assert!(
            n >= shifted.max(central),
            "grid of {n} points too small for order {order}"
        );
        let scale = h.powi(order as i32);
        let nodes = (0..n)
            .map(|i| {
                let half = central / 2;
                let (lo, width) = if i >= half && i + half < n {
                    (i - half, central)
                } else {
                    let lo = i.saturating_sub(shifted / 2).min(n - shifted);
                    (lo, shifted)
                };
                let x: Vec<f64> = (lo..lo + width).map(|k| k as f64).collect();
                let w = fd_weights(i as f64, &x, order).into_iter().map(|w| w / scale).collect();
                (lo, w)
            })
            .collect();
        Self { order, nodes }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn apply<T: Scalar>(&self, values: &[T]) -> Vec<T> {
        assert_eq!(values.len(), self.nodes.len());
        self.nodes
            .iter()
            .map(|(lo, w)| {
                w.iter()
                    .zip(&values[*lo..])
                    .fold(T::zero(), |acc, (&wk, &v)| acc + T::lit(wk) * v)
            })
            .collect()
    }

    pub fn apply_at<T: Scalar>(&self, values: &[T], i: usize) -> T {
        let (lo, w) = &self.nodes[i];
        w.iter()
            .zip(&values[*lo..])
            .fold(T::zero(), |acc, (&wk, &v)| acc + T::lit(wk) * v)
    }
}

/// `order`-th s-derivative of every column of `g`.
pub fn d_ds<T: Scalar>(g: &Grid<T>, order: usize, hs: T) -> Grid<T> {
    let st = Stencils::new(order, g.ns(), hs.as_f64());
    Grid::from_columns((0..g.nt()).map(|j| st.apply(g.column(j))).collect())
}

/// `order`-th t-derivative of every row of `g`.
pub fn d_dt<T: Scalar>(g: &Grid<T>, order: usize, ht: T) -> Grid<T> {
    let st = Stencils::new(order, g.nt(), ht.as_f64());
    let rows: Vec<Vec<T>> = (0..g.ns()).map(|i| st.apply(&g.row(i))).collect();
    Grid::from_fn(g.ns(), g.nt(), |i, j| rows[i][j])
}

/// Cumulative integral of uniformly sampled `f` (spacing `h`), zero at
/// `anchor` and signed in both directions.
///
/// Nodes an even number of intervals from the anchor use composite Simpson.
/// The others add one interval to their even neighbour with the four-point
/// cubic rule, whose local error is one order higher than Simpson's global
/// error, so differencing the result does not pick up an even/odd ripple.
pub fn cumulative_simpson<T: Scalar>(f: &[T], h: T, anchor: usize) -> Vec<T> {
    let n = f.len();
    assert!(n >= 4, "need at least four samples");
    assert!(anchor < n, "anchor outside samples");
    let mut out = vec![T::zero(); n];
    let third = h / T::lit(3.0);
    let four = T::lit(4.0);
    let interval = |k: usize| interval_integral(f, h, k);

    for k in anchor + 1..n {
        out[k] = if (k - anchor).is_multiple_of(2) {
            out[k - 2] + third * (f[k - 2] + four * f[k - 1] + f[k])
        } else {
            out[k - 1] + interval(k - 1)
        };
    }
    for k in (0..anchor).rev() {
        out[k] = if (anchor - k).is_multiple_of(2) {
            out[k + 2] - third * (f[k + 2] + four * f[k + 1] + f[k])
        } else {
            out[k + 1] - interval(k)
        };
    }
    out
}

/// Integral of the cubic through four neighbouring samples over
/// `[x_k, x_{k+1}]`; centred where possible.
fn interval_integral<T: Scalar>(f: &[T], h: T, k: usize) -> T {
    let n = f.len();
    let w = h / T::lit(24.0);
    let c = |x: f64| T::lit(x);
    if k >= 1 && k + 2 < n {
        w * (-f[k - 1] + c(13.0) * f[k] + c(13.0) * f[k + 1] - f[k + 2])
    } else if k == 0 {
        w * (c(9.0) * f[0] + c(19.0) * f[1] - c(5.0) * f[2] + f[3])
    } else {
        // last interval: mirror of the left-end rule
        w * (c(9.0) * f[k + 1] + c(19.0) * f[k] - c(5.0) * f[k - 1] + f[k - 2])
    }
}

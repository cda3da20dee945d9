//! Position of the normal-space origin relative to the curvature ellipse,
//! and surface-wide predicates (flat, minimal, semi-umbilic, Wintgen ideal).
//!
//! Every zero test uses a band scaled by the cell's natural magnitude:
//! `Delta(p)` against `tol W^6`, `K` against `tol W^4`, and `A`, `B`, `C`
//! through the second fundamental form entries they produce
//! (`h22^1 = A/(Q W^2)`, `h22^2 = B/(Q W^3)`, `h12^2 = Q C / W^2`).

use std::fmt;

use crate::grid::Cell;
use crate::invariants::{delta_from_second_form, InvariantReport};
use crate::linalg4::{rank_2x3, Mat2x3};
use crate::scalar::Scalar;

pub const DEFAULT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PointTag {
    Hyperbolic,
    Elliptic,
    Parabolic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ParabolicSubtype {
    InflectionImaginary,
    NonDegenerate,
    InflectionReal,
    InflectionFlat,
    Unresolved,
}

/// Which of the two alternatives of the `K < 0` parabolic case held.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NegativeKHypothesis {
    /// `A < 0` and `B^2 + 4 Q^2 A C^2 = 0`.
    NegativeA,
    /// `A = B = 0` and `C != 0`.
    VanishingAB,
    /// Neither alternative within the bands.
    Neither,
}

impl PointTag {
    pub fn name(self) -> &'static str {
        match self {
            PointTag::Hyperbolic => "Hyperbolic",
            PointTag::Elliptic => "Elliptic",
            PointTag::Parabolic => "Parabolic",
        }
    }
}

impl ParabolicSubtype {
    pub fn name(self) -> &'static str {
        match self {
            ParabolicSubtype::InflectionImaginary => "InflectionImaginary",
            ParabolicSubtype::NonDegenerate => "NonDegenerate",
            ParabolicSubtype::InflectionReal => "InflectionReal",
            ParabolicSubtype::InflectionFlat => "InflectionFlat",
            ParabolicSubtype::Unresolved => "Unresolved",
        }
    }
}

impl fmt::Display for PointTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ParabolicSubtype {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointClass<T> {
    pub tag: PointTag,
    /// Set exactly when `tag` is `Parabolic`.
    pub subtype: Option<ParabolicSubtype>,
    pub delta_p: T,
    pub gaussian: T,
    /// Rank of `[[h11^1, h12^1, h22^1], [h11^2, h12^2, h22^2]]`.
    pub rank_a: u8,
    /// Only for parabolic cells with `K < 0`.
    pub hypothesis: Option<NegativeKHypothesis>,
}

/// `Delta(p) = -(B^2 + 4 Q^2 A C^2) / (4 W^6)`.
pub fn delta_p<T: Scalar>(r: &InvariantReport<T>) -> T {
    r.delta_p
}

/// `Delta(p)` as a quarter of the 4x4 determinant of second fundamental form
/// coefficients.
pub fn delta_p_det<T: Scalar>(r: &InvariantReport<T>) -> T {
    delta_from_second_form(r.second_form_matrix())
}

/// Zero tests for one report at a given tolerance.
struct Bands<T> {
    tol: T,
    q: T,
    w: T,
}

impl<T: Scalar> Bands<T> {
    fn new(r: &InvariantReport<T>, tol: T) -> Self {
        Self {
            tol,
            q: r.q,
            w: r.tangent.w,
        }
    }

    fn delta(&self) -> T {
        self.tol * self.w.powi(6)
    }

    fn gaussian(&self) -> T {
        self.tol * self.w.powi(4)
    }

    fn a_zero(&self, a: T) -> bool {
        (a / (self.q * self.w * self.w)).abs() <= self.tol
    }

    fn a_positive(&self, a: T) -> bool {
        a / (self.q * self.w * self.w) > self.tol
    }

    fn a_negative(&self, a: T) -> bool {
        a / (self.q * self.w * self.w) < -self.tol
    }

    fn b_zero(&self, b: T) -> bool {
        (b / (self.q * self.w.powi(3))).abs() <= self.tol
    }

    fn c_zero(&self, c: T) -> bool {
        (self.q * c / (self.w * self.w)).abs() <= self.tol
    }
}

/// Classifies the origin of the normal space at one cell.
pub fn classify_point<T: Scalar>(r: &InvariantReport<T>, tol: T) -> PointClass<T> {
    let bands = Bands::new(r, tol);
    let (dp, k) = (r.delta_p, r.gaussian);
    let rank_a = rank_2x3(&Mat2x3::new(r.second_form_matrix()), tol);
    let tag = if dp < -bands.delta() {
        PointTag::Hyperbolic
    } else if dp > bands.delta() {
        PointTag::Elliptic
    } else {
        PointTag::Parabolic
    };
    let mut class = PointClass {
        tag,
        subtype: None,
        delta_p: dp,
        gaussian: k,
        rank_a,
        hypothesis: None,
    };
    if tag != PointTag::Parabolic {
        return class;
    }
    let (a0, b0, c0) = (bands.a_zero(r.a), bands.b_zero(r.b), bands.c_zero(r.c));
    let kb = bands.gaussian();
    class.subtype = Some(if a0 && b0 && c0 {
        ParabolicSubtype::InflectionFlat
    } else if k > kb {
        if bands.a_positive(r.a) && b0 && c0 {
            ParabolicSubtype::InflectionImaginary
        } else {
            ParabolicSubtype::Unresolved
        }
    } else if k < -kb {
        class.hypothesis = Some(if bands.a_negative(r.a) {
            NegativeKHypothesis::NegativeA
        } else if a0 && b0 && !c0 {
            NegativeKHypothesis::VanishingAB
        } else {
            NegativeKHypothesis::Neither
        });
        match rank_a {
            2 => ParabolicSubtype::NonDegenerate,
            1 => ParabolicSubtype::InflectionReal,
            _ => ParabolicSubtype::Unresolved,
        }
    } else {
        ParabolicSubtype::Unresolved
    });
    class
}

/// Outcome of one surface-wide predicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Predicate<T> {
    pub holds: bool,
    /// Cell with the largest violation and its size, over all cells seen.
    pub worst: Option<(Cell, T)>,
}

impl<T: Scalar> Predicate<T> {
    /// The worst cell, when the predicate fails.
    pub fn witness(&self) -> Option<Cell> {
        if self.holds {
            None
        } else {
            self.worst.map(|(c, _)| c)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePredicates<T> {
    pub flat: Predicate<T>,
    pub minimal: Predicate<T>,
    pub semi_umbilic: Predicate<T>,
    pub wintgen_ideal: Predicate<T>,
}

/// Scaled violations of the four defining equations at one cell:
/// flat `|A W^2 - Q^2 C^2| / W^4`, minimal
/// `max(|B|, |Q^2 W^2 + A|) / (Q^2 W^2)`, semi-umbilic
/// `|(Q^2 W^2 - A) C| / W^4`, Wintgen ideal `|gap|`.
pub fn violations<T: Scalar>(r: &InvariantReport<T>) -> [T; 4] {
    let (q2, w2) = (r.q * r.q, r.tangent.w * r.tangent.w);
    let w4 = w2 * w2;
    [
        (r.a * w2 - q2 * r.c * r.c).abs() / w4,
        r.b.abs().max((q2 * w2 + r.a).abs()) / (q2 * w2),
        ((q2 * w2 - r.a) * r.c).abs() / w4,
        r.wintgen_gap.abs(),
    ]
}

/// Evaluates the predicates over every non-degenerate report. With no
/// reports at all, every predicate holds vacuously.
pub fn surface_predicates<'a, T: Scalar + 'a>(
    reports: impl IntoIterator<Item = &'a InvariantReport<T>>,
    tol: T,
) -> SurfacePredicates<T> {
    let mut worst: [Option<(Cell, T)>; 4] = [None; 4];
    for r in reports {
        let cell = Cell::new(r.cell.0, r.cell.1);
        for (w, v) in worst.iter_mut().zip(violations(r)) {
            // NaN counts as the worst possible violation
            if w.is_none_or(|(_, m)| v > m || v.is_nan()) {
                *w = Some((cell, v));
            }
        }
    }
    let pred = |w: Option<(Cell, T)>| Predicate {
        holds: w.is_none_or(|(_, v)| v <= tol),
        worst: w,
    };
    SurfacePredicates {
        flat: pred(worst[0]),
        minimal: pred(worst[1]),
        semi_umbilic: pred(worst[2]),
        wintgen_ideal: pred(worst[3]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type R = InvariantReport<f64>;

    fn classify(q: f64, w: f64, a: f64, b: f64, c: f64) -> PointClass<f64> {
        classify_point(&R::synthetic(q, w, a, b, c), DEFAULT_TOL)
    }

    #[test]
    fn all_scalars_zero_is_flat_inflection() {
        let p = classify(0.7, 0.4, 0.0, 0.0, 0.0);
        assert_eq!(p.tag, PointTag::Parabolic);
        assert_eq!(p.subtype, Some(ParabolicSubtype::InflectionFlat));
        assert_eq!(p.gaussian, 0.0);
        assert_eq!(p.delta_p, 0.0);
    }

    #[test]
    fn sign_cases() {
        assert_eq!(classify(1.0, 0.5, 0.3, 0.2, 0.1).tag, PointTag::Hyperbolic);
        // B^2 + 4 Q^2 A C^2 < 0 needs A < 0
        let e = classify(1.0, 0.5, -0.5, 0.1, 0.4);
        assert_eq!(e.tag, PointTag::Elliptic);
        assert!(e.subtype.is_none());
    }

    #[test]
    fn positive_k_with_b_c_zero_is_imaginary() {
        let p = classify(1.0, 0.5, 0.3, 0.0, 0.0);
        assert!(p.gaussian > 0.0);
        assert_eq!(p.subtype, Some(ParabolicSubtype::InflectionImaginary));
    }

    #[test]
    fn negative_k_cases() {
        // A < 0, B = C = 0: Delta = 0, K = A/W^2 < 0, rows (Q,0,A/..) and (0,0,0)
        let p = classify(1.0, 0.5, -0.3, 0.0, 0.0);
        assert_eq!(p.tag, PointTag::Parabolic);
        assert_eq!(p.rank_a, 1);
        assert_eq!(p.subtype, Some(ParabolicSubtype::InflectionReal));
        assert_eq!(p.hypothesis, Some(NegativeKHypothesis::NegativeA));

        // A = B = 0, C != 0: Delta = 0, K = -Q^2 C^2 / W^4 < 0, full rank
        let p = classify(1.0, 0.5, 0.0, 0.0, 0.2);
        assert_eq!(p.rank_a, 2);
        assert_eq!(p.subtype, Some(ParabolicSubtype::NonDegenerate));
        assert_eq!(p.hypothesis, Some(NegativeKHypothesis::VanishingAB));
    }

    #[test]
    fn k_zero_but_not_flat_is_unresolved() {
        // A W^2 = Q^2 C^2 puts K at zero while Delta = -Q^4 C^4 / W^8 only
        // falls inside a wide band; C stays outside its own band
        let r = R::synthetic(1.0, 1.0, 1e-6, 0.0, 1e-3);
        assert!(r.gaussian.abs() < 1e-12);
        let p = classify_point(&r, 1e-4);
        assert_eq!(p.tag, PointTag::Parabolic);
        assert_eq!(p.subtype, Some(ParabolicSubtype::Unresolved));
    }

    #[test]
    fn closed_form_matches_determinant() {
        for (a, b, c) in [(0.3, 0.2, 0.1), (-0.5, 0.1, 0.4), (0.0, 0.0, 0.2), (1.2, -0.7, 0.9)] {
            let r = R::synthetic(0.8, 0.6, a, b, c);
            let (x, y) = (delta_p(&r), delta_p_det(&r));
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0), "{x} vs {y}");
        }
    }

    #[test]
    fn tag_follows_band() {
        let w: f64 = 0.5;
        // Delta = -B^2 / (4 W^6) placed just outside and inside tol W^6
        let b_out = (4.0 * 2e-8 * w.powi(12)).sqrt();
        let b_in = (4.0 * 0.5e-8 * w.powi(12)).sqrt();
        assert_eq!(classify(1.0, w, 0.0, b_out, 0.0).tag, PointTag::Hyperbolic);
        assert_eq!(classify(1.0, w, 0.0, b_in, 0.0).tag, PointTag::Parabolic);
    }

    #[test]
    fn predicates_and_witness() {
        let reports = [
            R::synthetic(1.0, 0.5, 0.0, 0.0, 0.0),
            R::synthetic(1.0, 0.5, 0.0, 0.0, 0.2),
        ];
        let p = surface_predicates(&reports[..1], DEFAULT_TOL);
        assert!(p.flat.holds && p.semi_umbilic.holds && !p.minimal.holds);
        let mut second = reports[1];
        second.cell = (4, 2);
        let p = surface_predicates([&reports[0], &second], DEFAULT_TOL);
        assert!(!p.flat.holds && !p.semi_umbilic.holds);
        assert_eq!(p.flat.witness(), Some(Cell::new(4, 2)));
        assert!(surface_predicates(std::iter::empty::<&R>(), 1e-8).flat.holds);
    }

    #[test]
    fn minimal_when_b_zero_and_a_balances() {
        let (q, w) = (0.9, 0.7);
        let r = R::synthetic(q, w, -q * q * w * w, 0.0, 0.0);
        assert!(r.mean_norm2 < 1e-20);
        assert!(surface_predicates([&r], DEFAULT_TOL).minimal.holds);
    }
}

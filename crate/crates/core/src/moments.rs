//! Moment sequences, Hankel blocks and feasibility classification.
//!
//! Hankel blocks come in two layouts. The *standard* block of order `N` and shift `m` has
//! entry `(i, j) = s_{i+j+m}` (0-based) and is the Gram matrix of the monomials
//! `1, λ, …, λ^{N-1}` under the moment functional. The *flipped* block reverses both axes,
//! placing `s_{2N-2+m}` in the top-left corner; it is the layout that appears in the
//! factorizations of the connecting and companion operators.

use serde::Serialize;

use crate::error::{Diagnostic, Error, Result};
use crate::matrix::{definiteness, Definiteness, Matrix};
use crate::scalar::{convert, Backend, Rational, Scalar};

/// Real moments `s_0, …, s_M` in a single arithmetic backend.
#[derive(Debug, Clone, PartialEq)]
pub enum MomentSequence {
    Float(Vec<f64>),
    Rational(Vec<Rational>),
}

impl MomentSequence {
    pub fn from_f64(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("moment sequence is empty".into()));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidInput(format!("moment s_{k} is not finite")));
        }
        Ok(MomentSequence::Float(values))
    }

    pub fn from_rationals(values: Vec<Rational>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidInput("moment sequence is empty".into()));
        }
        Ok(MomentSequence::Rational(values))
    }

    /// Builds a sequence from scalars of either backend.
    pub fn from_scalars<T: Scalar>(values: &[T]) -> Result<Self> {
        match T::BACKEND {
            Backend::Float => Self::from_f64(convert(values)),
            Backend::Rational => Self::from_rationals(convert(values)),
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            MomentSequence::Float(_) => Backend::Float,
            MomentSequence::Rational(_) => Backend::Rational,
        }
    }

    pub fn len(&self) -> usize {
        match self {
            MomentSequence::Float(v) => v.len(),
            MomentSequence::Rational(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The values in backend `T` (exact when `T` is exact).
    pub fn values<T: Scalar>(&self) -> Vec<T> {
        match self {
            MomentSequence::Float(v) => convert(v),
            MomentSequence::Rational(v) => convert(v),
        }
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.values()
    }

    /// Same values re-tagged with another backend (float -> rational is exact).
    pub fn with_backend(&self, backend: Backend) -> Self {
        match backend {
            Backend::Float => MomentSequence::Float(self.values()),
            Backend::Rational => MomentSequence::Rational(self.values()),
        }
    }

    pub fn truncated(&self, len: usize) -> Self {
        match self {
            MomentSequence::Float(v) => MomentSequence::Float(v[..len.min(v.len())].to_vec()),
            MomentSequence::Rational(v) => MomentSequence::Rational(v[..len.min(v.len())].to_vec()),
        }
    }

    pub fn require(&self, required: usize) -> Result<()> {
        if self.len() < required {
            Err(Error::InsufficientMoments {
                required,
                available: self.len(),
            })
        } else {
            Ok(())
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Standard,
    Flipped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HankelBlock<T> {
    pub order: usize,
    pub shift: usize,
    pub orientation: Orientation,
    pub entries: Matrix<T>,
}

/// Number of moments a block of the given order and shift reads.
pub fn hankel_moments_required(order: usize, shift: usize) -> usize {
    2 * order - 1 + shift
}

pub fn hankel_block<T: Scalar>(
    s: &[T],
    shift: usize,
    order: usize,
    orientation: Orientation,
) -> Result<HankelBlock<T>> {
    if order == 0 {
        return Err(Error::InvalidInput("Hankel order must be positive".into()));
    }
    let required = hankel_moments_required(order, shift);
    if s.len() < required {
        return Err(Error::InsufficientMoments {
            required,
            available: s.len(),
        });
    }
    let n = order;
    let entries = match orientation {
        Orientation::Standard => Matrix::from_fn(n, n, |i, j| s[i + j + shift].clone()),
        Orientation::Flipped => Matrix::from_fn(n, n, |i, j| s[2 * n - 2 - i - j + shift].clone()),
    };
    Ok(HankelBlock {
        order,
        shift,
        orientation,
        entries,
    })
}

/// Standard-orientation Hankel matrix `(s_{i+j+shift})`, the workhorse for internal formulas.
pub fn hankel<T: Scalar>(s: &[T], shift: usize, order: usize) -> Result<Matrix<T>> {
    if order == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    Ok(hankel_block(s, shift, order, Orientation::Standard)?.entries)
}

/// Definiteness flags of one truncation order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderFlags {
    pub order: usize,
    pub s0_positive_definite: bool,
    /// `None` when fewer than `2N` moments are available.
    pub s1_positive_definite: Option<bool>,
    pub s0_minus_s1_semidefinite: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    HamburgerFeasible,
    StieltjesFeasible,
    HausdorffFeasible,
    InfeasibleAtOrder(usize),
}

impl Verdict {
    /// Support class implied by the verdict, from widest to narrowest.
    fn rank(self) -> u8 {
        match self {
            Verdict::InfeasibleAtOrder(_) => 0,
            Verdict::HamburgerFeasible => 1,
            Verdict::StieltjesFeasible => 2,
            Verdict::HausdorffFeasible => 3,
        }
    }

    pub fn is_hamburger(self) -> bool {
        self.rank() >= 1
    }

    pub fn is_stieltjes(self) -> bool {
        self.rank() >= 2
    }

    pub fn is_hausdorff(self) -> bool {
        self.rank() >= 3
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub backend: Backend,
    pub orders: Vec<OrderFlags>,
    pub verdict: Verdict,
    pub diagnostics: Vec<Diagnostic>,
}

/// Positivity tests of `S_0`, `S_1` and `S_0 - S_1` for `N = 1..=max_order`.
///
/// Needs `2·max_order - 1` moments; the `S_1` tests of an order are skipped (and the
/// verdict capped at Hamburger) when that order's `2N`-th moment is missing.
pub fn classify<T: Scalar>(s: &[T], max_order: usize) -> Result<Classification> {
    if max_order == 0 {
        return Err(Error::InvalidInput(
            "classification order must be positive".into(),
        ));
    }
    let required = hankel_moments_required(max_order, 0);
    if s.len() < required {
        return Err(Error::InsufficientMoments {
            required,
            available: s.len(),
        });
    }
    let mut diagnostics = Vec::new();
    let mut orders = Vec::with_capacity(max_order);
    let mut verdict = Verdict::HausdorffFeasible;
    let mut note_degenerate = |what: &str, n: usize, d: Definiteness| {
        if !T::EXACT && d == Definiteness::PositiveSemidefinite {
            diagnostics.push(Diagnostic::new(
                "degenerate-pivot",
                format!("{what} at order {n} has a pivot below the relative threshold"),
            ));
        }
    };
    for n in 1..=max_order {
        let s0 = hankel(s, 0, n)?;
        let d0 = definiteness(&s0);
        note_degenerate("S0", n, d0);
        let s0_pd = d0 == Definiteness::PositiveDefinite;
        let (s1_pd, diff_psd) = if s.len() >= 2 * n {
            let s1 = hankel(s, 1, n)?;
            let d1 = definiteness(&s1);
            note_degenerate("S1", n, d1);
            let dd = definiteness(&s0.sub(&s1));
            (
                Some(d1 == Definiteness::PositiveDefinite),
                Some(dd != Definiteness::Indefinite),
            )
        } else {
            (None, None)
        };
        let here = if !s0_pd {
            Verdict::InfeasibleAtOrder(n)
        } else {
            match (s1_pd, diff_psd) {
                (Some(true), Some(true)) => Verdict::HausdorffFeasible,
                (Some(true), _) => Verdict::StieltjesFeasible,
                _ => Verdict::HamburgerFeasible,
            }
        };
        if verdict.rank() > 0 && here.rank() < verdict.rank() {
            verdict = here;
        }
        orders.push(OrderFlags {
            order: n,
            s0_positive_definite: s0_pd,
            s1_positive_definite: s1_pd,
            s0_minus_s1_semidefinite: diff_psd,
        });
    }
    Ok(Classification {
        backend: T::BACKEND,
        orders,
        verdict,
        diagnostics,
    })
}

impl MomentSequence {
    pub fn classify(&self, max_order: usize) -> Result<Classification> {
        match self {
            MomentSequence::Float(v) => classify(v, max_order),
            MomentSequence::Rational(v) => classify(v, max_order),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::leading_minors;

    fn q(p: i64, r: i64) -> Rational {
        Rational::new(p.into(), r.into())
    }

    fn hilbert(len: usize) -> Vec<Rational> {
        (0..len).map(|k| q(1, k as i64 + 1)).collect()
    }

    #[test]
    fn flipped_blocks_match_hand_evaluation() {
        let s = [1.0, 0.0, 1.0, 0.0];
        let b = hankel_block(&s, 0, 2, Orientation::Flipped).unwrap();
        assert_eq!(b.entries.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let b = hankel_block(&s, 1, 2, Orientation::Flipped).unwrap();
        assert_eq!(b.entries.to_rows(), vec![vec![0.0, 1.0], vec![1.0, 0.0]]);
        for o in [Orientation::Standard, Orientation::Flipped] {
            let b = hankel_block(&[7.5], 0, 1, o).unwrap();
            assert_eq!(b.entries.to_rows(), vec![vec![7.5]]);
        }
    }

    #[test]
    fn flipped_top_left_is_highest_moment() {
        let s: Vec<f64> = (0..7).map(|k| k as f64).collect();
        let b = hankel_block(&s, 1, 3, Orientation::Flipped).unwrap();
        assert_eq!(b.entries[(0, 0)], 5.0);
        assert_eq!(b.entries[(2, 2)], 1.0);
    }

    #[test]
    fn insufficient_moments_reports_count() {
        let err = hankel_block(&[1.0, 2.0], 1, 2, Orientation::Standard).unwrap_err();
        assert_eq!(
            err,
            Error::InsufficientMoments {
                required: 4,
                available: 2
            }
        );
    }

    #[test]
    fn hilbert_moments_are_hausdorff() {
        let c = classify(&hilbert(4), 2).unwrap();
        assert_eq!(c.verdict, Verdict::HausdorffFeasible);
        // S0 - S1 = [[1/2, 1/6], [1/6, 1/12]] with determinant 1/72.
        let d = hankel(&hilbert(4), 0, 2)
            .unwrap()
            .sub(&hankel(&hilbert(4), 1, 2).unwrap());
        assert_eq!(d.determinant(), q(1, 72));
        assert_eq!(leading_minors(&d), vec![q(1, 2), q(1, 72)]);
    }

    #[test]
    fn symmetric_two_atoms_are_not_stieltjes() {
        let s = [1.0, 0.0, 1.0, 0.0];
        let c = classify(&s, 2).unwrap();
        assert_eq!(c.verdict, Verdict::HamburgerFeasible);
        assert_eq!(c.orders[1].s1_positive_definite, Some(false));
    }

    #[test]
    fn single_atom_is_rank_deficient_at_order_two() {
        for c in [
            classify(&[1.0, 2.0, 4.0, 8.0], 2).unwrap(),
            classify(&[q(1, 1), q(2, 1), q(4, 1), q(8, 1)], 2).unwrap(),
        ] {
            assert_eq!(c.verdict, Verdict::InfeasibleAtOrder(2));
            assert!(c.orders[0].s0_positive_definite);
            assert!(!c.orders[1].s0_positive_definite);
        }
    }

    #[test]
    fn odd_length_caps_at_hamburger() {
        let c = classify(&hilbert(3), 2).unwrap();
        assert_eq!(c.orders[1].s1_positive_definite, None);
        assert_eq!(c.verdict, Verdict::HamburgerFeasible);
    }

    #[test]
    fn backend_roundtrip_is_exact() {
        let m = MomentSequence::from_f64(vec![0.1, 0.2]).unwrap();
        let r = m.with_backend(Backend::Rational);
        assert_eq!(r.to_f64(), vec![0.1, 0.2]);
        assert!(MomentSequence::from_f64(vec![]).is_err());
        assert!(MomentSequence::from_f64(vec![f64::NAN]).is_err());
    }
}

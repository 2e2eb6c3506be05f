//! Finite-order determinacy diagnostics.
//!
//! For each order `T` the Hamburger table holds
//! `q1_T = ((C^T)⁻¹Γ_T, Γ_T)` and `q2_T = ((C^T)⁻¹Ω_T, Ω_T)`, the Stieltjes table holds
//! `M_T = q1_T` and `L_T = ((C^T)⁻¹(R^T)ᵀΓ_T, e_1)/((C^T)⁻¹Γ_T, e_1)`. Each value is checked
//! against a ratio of Hankel determinants:
//!
//! * `q1_T = det S_2^{T−1} / det S_0^T`;
//! * `q2_T = det S_0^{T,(2)} / det S_0^T`, with `S_0^{T,(2)}` the block with its second row and
//!   column removed;
//! * `L_T = det S_{0,0}^T / det S_1^{T−1}`, where `S_{0,0}^T` borders `S_1^{T−1}` by
//!   `(s_0, …, s_{T−2})` and has a zero corner.
//!
//! With `h = (s_0, …, s_{T−2})` this gives `L_T = −((S_1^{T−1})⁻¹h, h) ≤ 0`, so the string
//! length is `−L_T`; monotonicity and the trend test use it.
//!
//! Determinacy is a statement about `T → ∞`. Nothing here takes a limit: the report lists
//! finite-order values and a trend heuristic, never a proof of indeterminacy.

use rayon::prelude::*;

use crate::bc_operators::{connecting_operator, response_matrix};
use crate::chebyshev::{boundary_vectors, moments_to_response};
use crate::error::{Diagnostic, Error, Result};
use crate::matrix::{dot, Ldlt, Matrix, PD_REL_TOL};
use crate::moments::{classify, hankel, hankel_block, MomentSequence, Orientation};
use crate::scalar::Scalar;

/// Relative tolerance for float agreement between forms and determinant ratios.
pub const RATIO_REL_TOL: f64 = 1e-8;

/// Increments of the last orders must shrink by at least this factor for a bounded trend.
const TREND_FACTOR: f64 = 0.9;
/// Fewest orders a trend verdict is drawn from.
const TREND_MIN_ORDERS: usize = 5;

/// `det [[0, hᵀ], [c, D]]`.
pub fn bordered_determinant<T: Scalar>(d: &Matrix<T>, h: &[T], c: &[T]) -> T {
    let n = d.rows();
    assert_eq!(h.len(), n);
    assert_eq!(c.len(), n);
    let m = Matrix::from_fn(n + 1, n + 1, |i, j| match (i, j) {
        (0, 0) => T::zero(),
        (0, j) => h[j - 1].clone(),
        (i, 0) => c[i - 1].clone(),
        (i, j) => d[(i - 1, j - 1)].clone(),
    });
    m.determinant()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinearForm<T> {
    /// `(D⁻¹h, c)` from a linear solve.
    pub value: T,
    pub bordered: T,
    pub determinant: T,
}

/// `(D⁻¹h, c)` by a solve, checked against `det [[0, hᵀ], [c, D]] = −det D · (D⁻¹h, c)`.
pub fn inverse_bilinear_form<T: Scalar>(
    d: &Matrix<T>,
    h: &[T],
    c: &[T],
) -> Result<BilinearForm<T>> {
    let x = d.solve(h)?;
    let value = dot(&x, c);
    let determinant = d.determinant();
    if determinant.is_zero() {
        return Err(Error::SingularMatrix);
    }
    let bordered = bordered_determinant(d, h, c);
    let predicted = -(determinant.clone() * value.clone());
    if !T::EXACT {
        let scale = f64::abs(determinant.to_f64())
            * (0..h.len())
                .map(|i| f64::abs(x[i].to_f64() * c[i].to_f64()))
                .sum::<f64>();
        let gap = f64::abs(predicted.to_f64() - bordered.to_f64());
        if gap > 1e-9 * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::CrossCheck {
                what: "bordered determinant and inverse bilinear form",
                discrepancy: gap / scale.max(f64::MIN_POSITIVE),
            });
        }
    } else if predicted != bordered {
        return Err(Error::CrossCheck {
            what: "bordered determinant and inverse bilinear form",
            discrepancy: f64::abs((predicted - bordered).to_f64()),
        });
    }
    Ok(BilinearForm {
        value,
        bordered,
        determinant,
    })
}

/// `h_{2k} = s_k`, `h_{2k+1} = 0`.
pub fn interleave_values<T: Scalar>(s: &[T]) -> Vec<T> {
    s.iter().flat_map(|v| [v.clone(), T::zero()]).collect()
}

pub fn interleave(s: &MomentSequence) -> MomentSequence {
    match s {
        MomentSequence::Float(v) => MomentSequence::Float(interleave_values(v)),
        MomentSequence::Rational(v) => MomentSequence::Rational(interleave_values(v)),
    }
}

/// Determinants entering `det H̃_0^{2T} = det S̃_0^T · det S̃_1^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct InterleavingDeterminants<T> {
    pub order: usize,
    pub hamburger: T,
    pub stieltjes_s0: T,
    pub stieltjes_s1: T,
}

impl<T: Scalar> InterleavingDeterminants<T> {
    pub fn product(&self) -> T {
        self.stieltjes_s0.clone() * self.stieltjes_s1.clone()
    }
}

/// Needs `s_0, …, s_{2T−1}`.
pub fn interleaving_determinants<T: Scalar>(
    s: &[T],
    order: usize,
) -> Result<InterleavingDeterminants<T>> {
    let h = interleave_values(&s[..s.len().min(2 * order)]);
    let det = |v: &[T], shift, n| -> Result<T> {
        Ok(hankel_block(v, shift, n, Orientation::Flipped)?
            .entries
            .determinant())
    };
    Ok(InterleavingDeterminants {
        order,
        stieltjes_s0: det(s, 0, order)?,
        stieltjes_s1: det(s, 1, order)?,
        hamburger: det(&h, 0, 2 * order)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Problem {
    Hamburger,
    Stieltjes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeterminacyVerdict {
    /// Hausdorff-feasible data: determinate regardless of the tables.
    Determinate,
    NoIndeterminacyEvidence,
    /// Both sequences level off over the last orders; finite-order evidence only.
    BoundedTrend,
    /// A sequence that must be nondecreasing decreased.
    Degenerate,
}

/// One order of the table.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderRow<T> {
    pub order: usize,
    /// `q1_T` (Hamburger) or `M_T` (Stieltjes).
    pub q1: T,
    pub q1_ratio: T,
    /// `q2_T` (Hamburger) or `L_T` (Stieltjes).
    pub second: T,
    pub second_ratio: T,
    /// `((S_0^T)⁻¹g, g)` with `g = (0, s_0, …, s_{T−2})`; Stieltjes only.
    pub xi_form: Option<T>,
    /// Forms equal the determinant ratios in absolute value.
    pub forms_match_ratios: bool,
    /// The ratios also carry the sign of the forms.
    pub printed_sign_matched: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DeterminacyReport<T> {
    pub problem: Problem,
    pub rows: Vec<OrderRow<T>>,
    pub q1_monotone: bool,
    /// `q2_T` nondecreasing, or for Stieltjes data the length `−L_T`.
    pub second_monotone: bool,
    pub verdict: DeterminacyVerdict,
    pub diagnostics: Vec<Diagnostic>,
}

fn agree<T: Scalar>(a: &T, b: &T) -> bool {
    T::approx_eq(a, b, RATIO_REL_TOL)
        || (!T::EXACT && T::negligible(&(a.clone() - b.clone()), &T::one(), 1e-14))
}

fn nondecreasing<T: Scalar>(v: &[T]) -> bool {
    v.windows(2).all(|w| {
        w[1] >= w[0] || (!T::EXACT && T::negligible(&(w[0].clone() - w[1].clone()), &w[0], 1e-10))
    })
}

fn bounded_trend<T: Scalar>(v: &[T]) -> bool {
    let x: Vec<f64> = v.iter().map(Scalar::to_f64).collect();
    let d: Vec<f64> = (0..x.len())
        .map(|i| if i == 0 { x[0] } else { x[i] - x[i - 1] })
        .collect();
    let n = d.len();
    (n - 3..n).all(|i| d[i] <= TREND_FACTOR * d[i - 1].max(d[i - 2]))
}

fn unit<T: Scalar>(n: usize, i: usize) -> Vec<T> {
    (0..n)
        .map(|k| if k == i { T::one() } else { T::zero() })
        .collect()
}

struct OrderData<T> {
    c: Ldlt<T>,
    gamma: Vec<T>,
    omega: Vec<T>,
    r: Vec<T>,
}

fn order_data<T: Scalar>(s: &[T], t: usize) -> Result<OrderData<T>> {
    let r = moments_to_response(&s[..2 * t - 1]).values;
    let c = connecting_operator(&r, t)?.entries;
    let c = Ldlt::factor(&c, PD_REL_TOL)?;
    let b = boundary_vectors(t);
    Ok(OrderData {
        c,
        gamma: b.gamma_as(),
        omega: b.omega_as(),
        r,
    })
}

/// `det S_2^{T−1} / det S_0^T`.
fn q1_ratio<T: Scalar>(s: &[T], t: usize, det_s0: &T) -> Result<T> {
    let minor = if t == 1 {
        T::one()
    } else {
        hankel(s, 2, t - 1)?.determinant()
    };
    Ok(minor / det_s0.clone())
}

fn hamburger_row<T: Scalar>(s: &[T], t: usize) -> Result<OrderRow<T>> {
    let data = order_data(s, t)?;
    let q1 = dot(&data.c.solve(&data.gamma), &data.gamma);
    let q2 = dot(&data.c.solve(&data.omega), &data.omega);
    let s0 = hankel(s, 0, t)?;
    let det_s0 = s0.determinant();
    let q1_ratio = q1_ratio(s, t, &det_s0)?;
    let q2_ratio = if t == 1 {
        T::zero()
    } else {
        let keep: Vec<usize> = (0..t).filter(|&i| i != 1).collect();
        s0.principal(&keep).determinant() / det_s0
    };
    let forms_match_ratios = agree(&q1.abs(), &q1_ratio.abs()) && agree(&q2.abs(), &q2_ratio.abs());
    let printed_sign_matched = forms_match_ratios && (q1 >= T::zero()) == (q1_ratio >= T::zero());
    Ok(OrderRow {
        order: t,
        q1,
        q1_ratio,
        second: q2,
        second_ratio: q2_ratio,
        xi_form: None,
        forms_match_ratios,
        printed_sign_matched,
    })
}

fn stieltjes_row<T: Scalar>(s: &[T], t: usize) -> Result<OrderRow<T>> {
    let data = order_data(s, t)?;
    let m = dot(&data.c.solve(&data.gamma), &data.gamma);
    let rt = response_matrix(&data.r, t)?.entries.transpose();
    let e1 = unit::<T>(t, 0);
    let numerator = dot(&data.c.solve(&rt.mul_vec(&data.gamma)), &e1);
    let denominator = dot(&data.c.solve(&data.gamma), &e1);
    if T::negligible(&denominator, &m, 1e-14) {
        return Err(Error::Degenerate(format!("L_{t} denominator vanishes")));
    }
    let l = numerator / denominator;

    let s0 = hankel(s, 0, t)?;
    let det_s0 = s0.determinant();
    let m_ratio = q1_ratio(s, t, &det_s0)?;
    let l_ratio = if t == 1 {
        T::zero()
    } else {
        let s1 = hankel(s, 1, t - 1)?;
        let det_s1 = Ldlt::factor(&s1, PD_REL_TOL)?.determinant();
        let border: Vec<T> = s[..t - 1].to_vec();
        bordered_determinant(&s1, &border, &border) / det_s1
    };
    let mut g = vec![T::zero()];
    g.extend_from_slice(&s[..t - 1]);
    let xi = dot(&Ldlt::factor(&s0, PD_REL_TOL)?.solve(&g), &g);

    let forms_match_ratios = agree(&m.abs(), &m_ratio.abs()) && agree(&l.abs(), &l_ratio.abs());
    let printed_sign_matched = forms_match_ratios
        && (m >= T::zero()) == (m_ratio >= T::zero())
        && (l >= T::zero()) == (l_ratio >= T::zero());
    Ok(OrderRow {
        order: t,
        q1: m,
        q1_ratio: m_ratio,
        second: l,
        second_ratio: l_ratio,
        xi_form: Some(xi),
        forms_match_ratios,
        printed_sign_matched,
    })
}

fn build_report<T: Scalar>(
    s: &[T],
    tmax: usize,
    problem: Problem,
    row: fn(&[T], usize) -> Result<OrderRow<T>>,
) -> Result<DeterminacyReport<T>> {
    if tmax == 0 {
        return Err(Error::InvalidInput("tmax must be positive".into()));
    }
    let required = 2 * tmax - 1;
    if s.len() < required {
        return Err(Error::InsufficientMoments {
            required,
            available: s.len(),
        });
    }
    let rows: Vec<OrderRow<T>> = (1..=tmax)
        .into_par_iter()
        .map(|t| row(s, t))
        .collect::<Result<_>>()?;
    let q1: Vec<T> = rows.iter().map(|r| r.q1.clone()).collect();
    let second: Vec<T> = rows
        .iter()
        .map(|r| match problem {
            Problem::Hamburger => r.second.clone(),
            Problem::Stieltjes => -r.second.clone(),
        })
        .collect();
    let q1_monotone = nondecreasing(&q1);
    let second_monotone = nondecreasing(&second);

    let mut diagnostics = Vec::new();
    for r in rows.iter().filter(|r| !r.forms_match_ratios) {
        diagnostics.push(Diagnostic::new(
            "ratio-mismatch",
            format!(
                "order {}: quadratic forms and determinant ratios disagree",
                r.order
            ),
        ));
    }
    let hausdorff = classify(s, tmax)
        .map(|c| c.verdict.is_hausdorff())
        .unwrap_or(false);
    let verdict = if hausdorff {
        diagnostics.push(Diagnostic::new(
            "hausdorff-determinate",
            "Hausdorff-feasible data determine the measure uniquely",
        ));
        DeterminacyVerdict::Determinate
    } else if !q1_monotone || !second_monotone {
        DeterminacyVerdict::Degenerate
    } else if tmax >= TREND_MIN_ORDERS && bounded_trend(&q1) && bounded_trend(&second) {
        DeterminacyVerdict::BoundedTrend
    } else {
        DeterminacyVerdict::NoIndeterminacyEvidence
    };
    if !q1_monotone {
        diagnostics.push(Diagnostic::new("non-monotone", "q1 sequence decreases"));
    }
    if !second_monotone {
        let what = match problem {
            Problem::Hamburger => "q2 sequence decreases",
            Problem::Stieltjes => "length -L sequence decreases",
        };
        diagnostics.push(Diagnostic::new("non-monotone", what));
    }
    Ok(DeterminacyReport {
        problem,
        rows,
        q1_monotone,
        second_monotone,
        verdict,
        diagnostics,
    })
}

/// `q1_T`, `q2_T` for `T = 1..=tmax`; needs `s_0, …, s_{2·tmax−2}`.
pub fn hamburger_report<T: Scalar>(s: &[T], tmax: usize) -> Result<DeterminacyReport<T>> {
    build_report(s, tmax, Problem::Hamburger, hamburger_row)
}

/// `M_T`, `L_T` and the `ξ` form for `T = 1..=tmax`; needs `s_0, …, s_{2·tmax−2}`.
pub fn stieltjes_report<T: Scalar>(s: &[T], tmax: usize) -> Result<DeterminacyReport<T>> {
    build_report(s, tmax, Problem::Stieltjes, stieltjes_row)
}

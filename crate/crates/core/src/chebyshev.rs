//! Chebyshev polynomials of the second kind in the control normalization
//! `𝒯_{t+1} = λ𝒯_t − 𝒯_{t−1}`, `𝒯_0 = 0`, `𝒯_1 = 1`, and the integer change of basis
//! between them and the monomials.
//!
//! Moments and response entries are related by `r_{t−1} = ∫ 𝒯_t dρ`, i.e. `r = Λ_n s`.

use num_bigint::BigInt;
use num_integer::binomial;
use num_traits::{One, Zero};

use crate::matrix::Matrix;
use crate::moments::MomentSequence;
use crate::scalar::{Rational, Scalar};

/// `𝒯_t(x)`.
pub fn cheb_second_kind<T: Scalar>(t: usize, x: &T) -> T {
    let (mut prev, mut cur) = (T::zero(), T::one());
    if t == 0 {
        return prev;
    }
    for _ in 1..t {
        let next = x.clone() * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `[𝒯_0(x), 𝒯_1(x), …, 𝒯_n(x)]`.
pub fn cheb_values<T: Scalar>(n: usize, x: &T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::zero());
    if n == 0 {
        return out;
    }
    out.push(T::one());
    for t in 1..n {
        let next = x.clone() * out[t].clone() - out[t - 1].clone();
        out.push(next);
    }
    out
}

/// `[𝒯'_0(x), …, 𝒯'_n(x)]` from `𝒯'_{t+1} = 𝒯_t + x𝒯'_t − 𝒯'_{t−1}`.
pub fn cheb_derivative_values<T: Scalar>(n: usize, x: &T) -> Vec<T> {
    let vals = cheb_values(n, x);
    let mut out = vec![T::zero(); n + 1];
    for t in 1..n {
        out[t + 1] = vals[t].clone() + x.clone() * out[t].clone() - out[t - 1].clone();
    }
    out
}

/// The "reversed" Chebyshev vector `(𝒯_n(x), 𝒯_{n−1}(x), …, 𝒯_1(x))`.
pub fn cheb_reversed<T: Scalar>(n: usize, x: &T) -> Vec<T> {
    let vals = cheb_values(n, x);
    (1..=n).rev().map(|t| vals[t].clone()).collect()
}

/// Lower unitriangular integer matrix whose row `t` (1-based) lists the monomial coefficients
/// of `𝒯_t`: `𝒯_t(λ) = Σ_j Λ[t][j] λ^{j−1}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LambdaMatrix {
    rows: Vec<Vec<BigInt>>,
}

impl LambdaMatrix {
    /// Generated by propagating coefficients through the three-term recursion.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Λ_n needs n >= 1");
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut first = vec![BigInt::zero(); n];
        first[0] = BigInt::one();
        rows.push(first);
        if n >= 2 {
            let mut second = vec![BigInt::zero(); n];
            second[1] = BigInt::one();
            rows.push(second);
        }
        for t in 2..n {
            // 𝒯_{t+1} = λ𝒯_t − 𝒯_{t−1}
            let mut next = vec![BigInt::zero(); n];
            for j in 0..n - 1 {
                next[j + 1] += &rows[t - 1][j];
            }
            for j in 0..n {
                next[j] -= &rows[t - 2][j];
            }
            rows.push(next);
        }
        LambdaMatrix { rows }
    }

    /// Binomial closed form, 0-based indices: zero above the diagonal and where `i + j` is
    /// odd, otherwise `C((i+j)/2, j)·(−1)^{(i+j)/2 + j}`.
    pub fn closed_form(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if j > i || (i + j) % 2 == 1 {
                            BigInt::zero()
                        } else {
                            let h = (i + j) / 2;
                            let c = binomial(BigInt::from(h), BigInt::from(j));
                            if (h + j) % 2 == 0 {
                                c
                            } else {
                                -c
                            }
                        }
                    })
                    .collect()
            })
            .collect();
        LambdaMatrix { rows }
    }

    pub fn order(&self) -> usize {
        self.rows.len()
    }

    /// 0-based entry.
    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.rows[i][j]
    }

    pub fn to_matrix<T: Scalar>(&self) -> Matrix<T> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| T::from_bigint(&self.rows[i][j]))
    }

    /// `Λ̃_n = J_n Λ_n J_n`, upper unitriangular.
    pub fn flipped<T: Scalar>(&self) -> Matrix<T> {
        self.to_matrix::<T>().flipped()
    }

    pub fn rows_i64(&self) -> Option<Vec<Vec<i64>>> {
        self.rows
            .iter()
            .map(|r| r.iter().map(|v| i64::try_from(v).ok()).collect())
            .collect()
    }

    /// `Λ x`, accumulated exactly and rounded once.
    pub fn apply<T: Scalar>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.order());
        let exact: Vec<Rational> = x.iter().map(Scalar::to_rational).collect();
        (0..self.order())
            .map(|i| {
                let mut acc = Rational::zero();
                for (j, xj) in exact.iter().enumerate().take(i + 1) {
                    if !self.rows[i][j].is_zero() {
                        acc += Rational::from_integer(self.rows[i][j].clone()) * xj;
                    }
                }
                T::from_rational(&acc)
            })
            .collect()
    }

    /// `Λ⁻¹ y` by exact forward substitution, rounded once.
    pub fn solve<T: Scalar>(&self, y: &[T]) -> Vec<T> {
        assert_eq!(y.len(), self.order());
        let mut x: Vec<Rational> = Vec::with_capacity(y.len());
        for (i, yi) in y.iter().enumerate() {
            let mut acc = yi.to_rational();
            for (j, xj) in x.iter().enumerate() {
                if !self.rows[i][j].is_zero() {
                    acc -= Rational::from_integer(self.rows[i][j].clone()) * xj;
                }
            }
            x.push(acc);
        }
        x.iter().map(T::from_rational).collect()
    }
}

/// Dynamic inverse data `r_0, …, r_{T−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseVector<T> {
    pub values: Vec<T>,
}

impl<T: Scalar> ResponseVector<T> {
    pub fn new(values: Vec<T>) -> crate::error::Result<Self> {
        if values.is_empty() {
            return Err(crate::error::Error::InvalidInput(
                "response vector is empty".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(crate::error::Error::InvalidInput(
                "response entry not finite".into(),
            ));
        }
        Ok(ResponseVector { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `r = Λ_n s` with `n = s.len()`.
pub fn moments_to_response<T: Scalar>(s: &[T]) -> ResponseVector<T> {
    if s.is_empty() {
        return ResponseVector { values: Vec::new() };
    }
    ResponseVector {
        values: LambdaMatrix::new(s.len()).apply(s),
    }
}

/// `s = Λ_n⁻¹ r`.
pub fn response_to_moments<T: Scalar>(r: &[T]) -> Vec<T> {
    if r.is_empty() {
        return Vec::new();
    }
    LambdaMatrix::new(r.len()).solve(r)
}

impl MomentSequence {
    pub fn to_response<T: Scalar>(&self) -> ResponseVector<T> {
        moments_to_response(&self.values::<T>())
    }
}

/// `Γ_T = (𝒯_T(0), …, 𝒯_1(0))` and `Ω_T = (𝒯'_T(0), …, 𝒯'_1(0))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryVectors {
    pub gamma: Vec<i64>,
    pub omega: Vec<i64>,
}

impl BoundaryVectors {
    pub fn gamma_as<T: Scalar>(&self) -> Vec<T> {
        self.gamma.iter().map(|&v| T::from_i64(v)).collect()
    }

    pub fn omega_as<T: Scalar>(&self) -> Vec<T> {
        self.omega.iter().map(|&v| T::from_i64(v)).collect()
    }
}

pub fn boundary_vectors(t: usize) -> BoundaryVectors {
    assert!(t >= 1, "boundary vectors need T >= 1");
    let vals = cheb_values::<Rational>(t, &Rational::zero());
    let ders = cheb_derivative_values::<Rational>(t, &Rational::zero());
    let as_i64 = |v: &Rational| i64::try_from(v.to_integer()).expect("boundary entry overflow");
    BoundaryVectors {
        gamma: (1..=t).rev().map(|k| as_i64(&vals[k])).collect(),
        omega: (1..=t).rev().map(|k| as_i64(&ders[k])).collect(),
    }
}

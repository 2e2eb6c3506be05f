//! Boundary-control operators assembled from response data.
//!
//! With `c_{p,q} = ∫ 𝒯_p 𝒯_q dρ` (Chebyshev indices, `c_{p,0} = 0`), the product rule
//! `𝒯_p 𝒯_q = Σ_{k<min(p,q)} 𝒯_{|p−q|+1+2k}` turns every entry into a sum of response
//! values: `c_{p,q} = Σ_{k<min(p,q)} r_{|p−q|+2k}`.
//!
//! * the connecting operator `C^T` has entry `(l, m) = c_{T−l, T−m}` (0-based `l, m`);
//! * the companion operator `B^N` has entry `(i, j) = c_{N−i, N+1−j} + c_{N−i, N−1−j}`, the
//!   Gram matrix of multiplication by `λ` in the same basis;
//! * the response matrix `R^T` is the strictly lower Toeplitz matrix of `r_0, r_1, …`.
//!
//! Both `C^N` and `B^N` factor through the flipped Hankel blocks:
//! `C^N = Λ̃ S_0 Λ̃ᵀ`, `B^N = Λ̃ S_1 Λ̃ᵀ` with `Λ̃ = J Λ_N J`.

use crate::chebyshev::{cheb_values, LambdaMatrix};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::{hankel_block, Orientation};
use crate::recovery::DiscreteMeasure;
use crate::scalar::Scalar;

/// `c_{p,q} = ∫ 𝒯_p 𝒯_q dρ` expressed through response entries (`r` must reach index
/// `p + q − 2`).
pub fn chebyshev_gram_entry<T: Scalar>(r: &[T], p: usize, q: usize) -> T {
    if p == 0 || q == 0 {
        return T::zero();
    }
    let d = p.abs_diff(q);
    (0..p.min(q)).fold(T::zero(), |acc, k| acc + r[d + 2 * k].clone())
}

fn require_response<T>(r: &[T], required: usize) -> Result<()> {
    if r.len() < required {
        Err(Error::InsufficientResponse {
            required,
            available: r.len(),
        })
    } else {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConnectingOperator<T> {
    pub order: usize,
    pub entries: Matrix<T>,
}

/// `C^T` from `r_0, …, r_{2T−2}`.
pub fn connecting_operator<T: Scalar>(r: &[T], order: usize) -> Result<ConnectingOperator<T>> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "connecting operator order must be positive".into(),
        ));
    }
    require_response(r, 2 * order - 1)?;
    let t = order;
    let entries = Matrix::from_fn(t, t, |l, m| chebyshev_gram_entry(r, t - l, t - m));
    debug_assert!(!T::EXACT || entries.is_symmetric());
    Ok(ConnectingOperator { order, entries })
}

/// `C^T` by direct summation of `w_k 𝒯_{T−l}(λ_k) 𝒯_{T−m}(λ_k)` over atoms.
pub fn connecting_from_measure<T: Scalar>(
    measure: &DiscreteMeasure<T>,
    order: usize,
) -> ConnectingOperator<T> {
    let t = order;
    let mut entries = Matrix::<T>::zeros(t, t);
    for (x, w) in measure.atoms().iter().zip(measure.weights()) {
        let vals = cheb_values(t, x);
        for l in 0..t {
            for m in 0..t {
                let v =
                    entries[(l, m)].clone() + w.clone() * vals[t - l].clone() * vals[t - m].clone();
                entries[(l, m)] = v;
            }
        }
    }
    ConnectingOperator { order, entries }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompanionOperator<T> {
    pub order: usize,
    pub entries: Matrix<T>,
}

/// `B^N` from `r_0, …, r_{2N−1}`.
///
/// The `c_{p,q}` it reads are entries of the order-`N+1` connecting operator
/// (`c_{p,q} = C^{N+1}[N+1−p][N+1−q]`); only indices with `p ≤ N` occur, so `r_{2N}` is never
/// needed.
pub fn companion_operator<T: Scalar>(r: &[T], order: usize) -> Result<CompanionOperator<T>> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "companion operator order must be positive".into(),
        ));
    }
    require_response(r, 2 * order)?;
    let n = order;
    let entries = Matrix::from_fn(n, n, |i, j| {
        let p = n - i;
        let upper = chebyshev_gram_entry(r, p, n + 1 - j);
        let lower = if n >= j + 2 {
            chebyshev_gram_entry(r, p, n - 1 - j)
        } else {
            T::zero()
        };
        upper + lower
    });
    debug_assert!(!T::EXACT || entries.is_symmetric());
    Ok(CompanionOperator { order, entries })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix<T> {
    pub order: usize,
    pub entries: Matrix<T>,
}

/// `R^T`, entry `(i, j) = r_{i−j−1}` below the diagonal.
pub fn response_matrix<T: Scalar>(r: &[T], order: usize) -> Result<ResponseMatrix<T>> {
    if order == 0 {
        return Err(Error::InvalidInput(
            "response matrix order must be positive".into(),
        ));
    }
    require_response(r, order - 1)?;
    let entries = Matrix::from_fn(order, order, |i, j| {
        if i > j {
            r[i - j - 1].clone()
        } else {
            T::zero()
        }
    });
    Ok(ResponseMatrix { order, entries })
}

/// `Λ̃_N H Λ̃_Nᵀ` for the flipped Hankel block `H` of the given shift: the right-hand sides of
/// the factorization identities (`shift = 0` gives `C^N`, `shift = 1` gives `B^N`).
pub fn hankel_congruence<T: Scalar>(s: &[T], shift: usize, order: usize) -> Result<Matrix<T>> {
    let h = hankel_block(s, shift, order, Orientation::Flipped)?.entries;
    let lt: Matrix<T> = LambdaMatrix::new(order).flipped();
    Ok(lt.mul(&h).mul(&lt.transpose()))
}

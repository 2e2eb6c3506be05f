//! Discrete-time Jacobi dynamics and the spectral data of finite Jacobi matrices.
//!
//! The wave field obeys
//! `v_{n,t+1} + v_{n,t−1} − a_n v_{n+1,t} − a_{n−1} v_{n−1,t} − b_n v_{n,t} = 0`
//! for `n ≥ 1, t ≥ 0`, starts from rest (`v_{n,−1} = v_{n,0} = 0`) and is driven through the
//! boundary `v_{0,t} = f_t`. The response to `f = δ` is `r_{t−1} = v_{1,t}`.
//!
//! Everything here is computed independently of the boundary-control operators and is used to
//! check them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::moments::MomentSequence;
use crate::pencil::symmetric_eigen;
use crate::recovery::DiscreteMeasure;
use crate::scalar::{Rational, Scalar};

/// `a_0 = 1, a_1, …, a_{N−1} > 0` and `b_1, …, b_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JacobiCoefficients<T> {
    a: Vec<T>,
    b: Vec<T>,
}

impl<T: Scalar> JacobiCoefficients<T> {
    /// `a` may either include the leading `a_0 = 1` (length `N`) or omit it (length `N − 1`).
    pub fn new(a: Vec<T>, b: Vec<T>) -> Result<Self> {
        let n = b.len();
        if n == 0 {
            return Err(Error::InvalidInput(
                "Jacobi matrix needs at least one b".into(),
            ));
        }
        let a = if a.len() + 1 == n {
            std::iter::once(T::one()).chain(a).collect::<Vec<_>>()
        } else if a.len() == n {
            a
        } else {
            return Err(Error::InvalidInput(format!(
                "expected {} or {} off-diagonal entries for {} diagonal entries, got {}",
                n - 1,
                n,
                n,
                a.len()
            )));
        };
        if a[0] != T::one() {
            return Err(Error::InvalidInput("a_0 must equal 1".into()));
        }
        if a.iter().chain(&b).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput(
                "Jacobi coefficients must be finite".into(),
            ));
        }
        if a.iter().any(|x| *x <= T::zero()) {
            return Err(Error::InvalidInput(
                "off-diagonal entries must be positive".into(),
            ));
        }
        Ok(JacobiCoefficients { a, b })
    }

    /// `a = 1`, `b = 0`.
    pub fn free(order: usize) -> Self {
        JacobiCoefficients {
            a: vec![T::one(); order],
            b: vec![T::zero(); order],
        }
    }

    pub fn order(&self) -> usize {
        self.b.len()
    }

    /// `a_n`; indices past the stored range read as the free value `1`.
    pub fn a(&self, n: usize) -> T {
        self.a.get(n).cloned().unwrap_or_else(T::one)
    }

    /// `b_n` (1-based); indices past the stored range read as `0`.
    pub fn b(&self, n: usize) -> T {
        assert!(n >= 1, "b is indexed from 1");
        self.b.get(n - 1).cloned().unwrap_or_else(T::zero)
    }

    /// `a_1, …, a_{N−1}`.
    pub fn off_diagonal(&self) -> &[T] {
        &self.a[1..]
    }

    pub fn diagonal(&self) -> &[T] {
        &self.b
    }

    /// Leading `N × N` block with the first `N` coefficients.
    pub fn truncated(&self, order: usize) -> Self {
        assert!(order >= 1 && order <= self.order());
        JacobiCoefficients {
            a: self.a[..order].to_vec(),
            b: self.b[..order].to_vec(),
        }
    }

    /// `A^N`: diagonal `b_1..b_N`, off-diagonal `a_1..a_{N−1}`.
    pub fn matrix(&self) -> Matrix<T> {
        let n = self.order();
        Matrix::from_fn(n, n, |i, j| {
            if i == j {
                self.b[i].clone()
            } else if i.abs_diff(j) == 1 {
                self.a[i.max(j)].clone()
            } else {
                T::zero()
            }
        })
    }

    pub fn to_f64(&self) -> JacobiCoefficients<f64> {
        JacobiCoefficients {
            a: self.a.iter().map(|x| x.to_f64()).collect(),
            b: self.b.iter().map(|x| x.to_f64()).collect(),
        }
    }

    pub fn to_rational(&self) -> JacobiCoefficients<Rational> {
        JacobiCoefficients {
            a: self.a.iter().map(|x| x.to_rational()).collect(),
            b: self.b.iter().map(|x| x.to_rational()).collect(),
        }
    }
}

/// Boundary control `f_0, f_1, …`; entries past the end are zero.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Control<T> {
    Delta,
    Values(Vec<T>),
}

impl<T: Scalar> Control<T> {
    pub fn at(&self, t: usize) -> T {
        match self {
            Control::Delta => {
                if t == 0 {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Control::Values(v) => v.get(t).cloned().unwrap_or_else(T::zero),
        }
    }
}

/// Full grid `v_{n,t}` for `n = 0..=sites`, `t = −1..=horizon`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaveField<T> {
    pub sites: usize,
    pub horizon: usize,
    pub dirichlet: bool,
    values: Vec<Vec<T>>,
}

impl<T: Scalar> WaveField<T> {
    pub fn get(&self, n: usize, t: isize) -> &T {
        assert!(t >= -1, "time starts at -1");
        &self.values[n][(t + 1) as usize]
    }

    /// Row `n` over `t = −1..=horizon`.
    pub fn site(&self, n: usize) -> &[T] {
        &self.values[n]
    }
}

/// Explicit time stepping up to `horizon`.
///
/// With `dirichlet` the lattice has sites `0..=N+1` and `v_{N+1,t} = 0`. Otherwise it is widened
/// to `max(N, horizon) + 1` interior sites, continued with free coefficients, so that the far
/// end is never reached within the horizon.
pub fn simulate<T: Scalar>(
    jacobi: &JacobiCoefficients<T>,
    control: &Control<T>,
    horizon: usize,
    dirichlet: bool,
) -> WaveField<T> {
    let interior = if dirichlet {
        jacobi.order()
    } else {
        jacobi.order().max(horizon) + 1
    };
    let sites = interior + 1;
    let mut v = vec![vec![T::zero(); horizon + 2]; sites + 1];
    for t in 0..=horizon {
        v[0][t + 1] = control.at(t);
    }
    for t in 0..horizon {
        // Column t+1 (time t) and t (time t−1) are complete; fill time t+1.
        for n in 1..=interior {
            let next = jacobi.a(n) * v[n + 1][t + 1].clone()
                + jacobi.a(n - 1) * v[n - 1][t + 1].clone()
                + jacobi.b(n) * v[n][t + 1].clone()
                - v[n][t].clone();
            v[n][t + 2] = next;
        }
    }
    WaveField {
        sites,
        horizon,
        dirichlet,
        values: v,
    }
}

/// `r_{t−1} = v^δ_{1,t}` for `t = 1..=horizon`.
pub fn response_by_simulation<T: Scalar>(
    jacobi: &JacobiCoefficients<T>,
    horizon: usize,
    dirichlet: bool,
) -> Vec<T> {
    let field = simulate(jacobi, &Control::Delta, horizon, dirichlet);
    (1..=horizon)
        .map(|t| field.get(1, t as isize).clone())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialSolutions<T> {
    /// `φ_0, …, φ_nmax`.
    pub phi: Vec<T>,
    /// `ξ_0, …, ξ_nmax`.
    pub xi: Vec<T>,
}

/// Solutions of `a_n y_{n+1} + a_{n−1} y_{n−1} + b_n y_n = λ y_n` with `φ_0 = 0, φ_1 = 1` and
/// `ξ_0 = −1, ξ_1 = 0`. Coefficients beyond the stored range take free values.
pub fn phi_xi<T: Scalar>(
    jacobi: &JacobiCoefficients<T>,
    lambda: &T,
    nmax: usize,
) -> PolynomialSolutions<T> {
    let run = |y0: T, y1: T| {
        let mut y = vec![y0, y1];
        for n in 1..nmax {
            let next = ((lambda.clone() - jacobi.b(n)) * y[n].clone()
                - jacobi.a(n - 1) * y[n - 1].clone())
                / jacobi.a(n);
            y.push(next);
        }
        y.truncate(nmax + 1);
        y
    };
    PolynomialSolutions {
        phi: run(T::zero(), T::one()),
        xi: run(-T::one(), T::zero()),
    }
}

/// Spectral measure of `A^N`: atoms are its eigenvalues, `ρ_k = Σ_{i=1}^N φ_i(λ_k)²` and the
/// weights are `1/ρ_k`.
pub fn dirichlet_spectral_data(
    jacobi: &JacobiCoefficients<f64>,
    order: usize,
) -> Result<DiscreteMeasure<f64>> {
    if order == 0 || order > jacobi.order() {
        return Err(Error::InvalidInput(format!(
            "order {order} outside 1..={}",
            jacobi.order()
        )));
    }
    let block = jacobi.truncated(order);
    let (mut atoms, _, _) = symmetric_eigen(&block.matrix(), 1e-15)?;
    atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let pairs = atoms
        .into_iter()
        .map(|x| {
            let phi = phi_xi(&block, &x, order).phi;
            let rho: f64 = phi[1..].iter().map(|p| p * p).sum();
            (x, 1.0 / rho)
        })
        .collect();
    DiscreteMeasure::from_unsorted(pairs)
}

/// `s_k = (A^k e_1, e_1)` for `k = 0..=kmax`: the moments of the spectral measure of `A^N`,
/// computed from the matrix without diagonalizing it.
pub fn spectral_moments<T: Scalar>(jacobi: &JacobiCoefficients<T>, kmax: usize) -> Vec<T> {
    let a = jacobi.matrix();
    let mut x = vec![T::zero(); jacobi.order()];
    x[0] = T::one();
    let mut out = Vec::with_capacity(kmax + 1);
    for _ in 0..=kmax {
        out.push(x[0].clone());
        x = a.mul_vec(&x);
    }
    out
}

/// Three-term recurrence of the orthonormal polynomials of the normalized moment functional
/// `s_k / s_0`, by the Stieltjes procedure on monic polynomials in exact arithmetic.
///
/// `b_{k+1} = ⟨λp_k, p_k⟩/⟨p_k, p_k⟩`, `a_k² = ⟨p_k, p_k⟩/⟨p_{k−1}, p_{k−1}⟩`.
pub fn jacobi_from_moments(s: &MomentSequence, order: usize) -> Result<JacobiCoefficients<f64>> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    s.require(2 * order)?;
    let raw: Vec<Rational> = s.values();
    if raw[0] <= Rational::from_i64(0) {
        return Err(Error::NotPositiveDefinite { order, index: 1 });
    }
    let m: Vec<Rational> = raw.iter().map(|x| x.clone() / raw[0].clone()).collect();
    // ⟨p, q⟩ for coefficient vectors in the monomial basis, optionally multiplied by λ.
    let pair = |p: &[Rational], q: &[Rational], shift: usize| {
        let mut acc = Rational::from_i64(0);
        for (i, pi) in p.iter().enumerate() {
            for (j, qj) in q.iter().enumerate() {
                acc += pi.clone() * qj.clone() * m[i + j + shift].clone();
            }
        }
        acc
    };
    let mut prev: Vec<Rational> = Vec::new();
    let mut cur = vec![Rational::from_i64(1)];
    let mut prev_norm = Rational::from_i64(1);
    let mut a = vec![1.0];
    let mut b = Vec::with_capacity(order);
    for k in 0..order {
        let norm = pair(&cur, &cur, 0);
        if norm <= Rational::from_i64(0) {
            return Err(Error::NotPositiveDefinite {
                order,
                index: k + 1,
            });
        }
        if k > 0 {
            a.push((norm.clone() / prev_norm.clone()).to_f64().sqrt());
        }
        let bk = pair(&cur, &cur, 1) / norm.clone();
        b.push(bk.to_f64());
        if k + 1 == order {
            break;
        }
        let a2 = if k > 0 {
            norm.clone() / prev_norm.clone()
        } else {
            Rational::from_i64(0)
        };
        let mut next = vec![Rational::from_i64(0); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i + 1] += c.clone();
            next[i] -= bk.clone() * c.clone();
        }
        for (i, p) in prev.iter().enumerate() {
            next[i] -= a2.clone() * p.clone();
        }
        prev = std::mem::replace(&mut cur, next);
        prev_norm = norm;
    }
    JacobiCoefficients::new(a, b)
}

/// `W^N f = (u^f_{1,N}, …, u^f_{N,N})`: the state reached at time `N` by the control
/// `f_0, …, f_{N−1}`.
pub fn control_to_state<T: Scalar>(
    jacobi: &JacobiCoefficients<T>,
    f: &[T],
    order: usize,
) -> Result<Vec<T>> {
    if f.len() != order || order == 0 {
        return Err(Error::InvalidInput(format!(
            "control of length {} for order {order}",
            f.len()
        )));
    }
    let field = simulate(jacobi, &Control::Values(f.to_vec()), order, false);
    Ok((1..=order)
        .map(|n| field.get(n, order as isize).clone())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> JacobiCoefficients<f64> {
        JacobiCoefficients::new(vec![0.7, 1.3, 0.9], vec![0.2, -0.4, 0.5, 0.1]).unwrap()
    }

    #[test]
    fn coefficient_validation() {
        assert!(JacobiCoefficients::new(vec![1.0, 0.5], vec![0.0, 0.0]).is_ok());
        assert!(JacobiCoefficients::new(vec![0.5], vec![0.0, 0.0]).is_ok());
        assert!(JacobiCoefficients::new(vec![2.0, 0.5], vec![0.0, 0.0]).is_err());
        assert!(JacobiCoefficients::new(vec![-0.5], vec![0.0, 0.0]).is_err());
        assert!(JacobiCoefficients::<f64>::new(vec![], vec![]).is_err());
        let j = sample();
        assert_eq!(j.matrix()[(0, 1)], 0.7);
        assert_eq!(j.matrix()[(2, 3)], 0.9);
    }

    #[test]
    fn first_responses() {
        let r = response_by_simulation(&JacobiCoefficients::<f64>::free(2), 4, true);
        assert_eq!(r, vec![1.0, 0.0, 0.0, 0.0]);
        let j = JacobiCoefficients::new(vec![], vec![5.0]).unwrap();
        assert_eq!(response_by_simulation(&j, 2, false), vec![1.0, 5.0]);
        assert_eq!(response_by_simulation(&sample(), 1, false), vec![1.0]);
        let zero = simulate(&sample(), &Control::Values(vec![0.0; 5]), 6, false);
        assert!((0..=zero.sites).all(|n| zero.site(n).iter().all(|v| *v == 0.0)));
    }

    #[test]
    fn phi_xi_initial_data_and_free_case() {
        let p = phi_xi(&JacobiCoefficients::<f64>::free(3), &1.0, 2);
        assert_eq!(p.phi, vec![0.0, 1.0, 1.0]);
        assert_eq!(&p.xi[..2], &[-1.0, 0.0]);
        let x = 0.37;
        let p = phi_xi(&JacobiCoefficients::<f64>::free(6), &x, 6);
        for (t, v) in p.phi.iter().enumerate() {
            assert!((v - crate::chebyshev::cheb_second_kind(t, &x)).abs() < 1e-15);
        }
    }

    #[test]
    fn spectral_data_examples() {
        let mu = dirichlet_spectral_data(&JacobiCoefficients::free(2), 2).unwrap();
        assert!((mu.atoms()[0] + 1.0).abs() < 1e-15 && (mu.atoms()[1] - 1.0).abs() < 1e-15);
        assert!(mu.weights().iter().all(|w| (w - 0.5).abs() < 1e-15));
        let j = JacobiCoefficients::new(vec![], vec![0.3]).unwrap();
        let mu = dirichlet_spectral_data(&j, 1).unwrap();
        assert_eq!((mu.atoms(), mu.weights()), (&[0.3][..], &[1.0][..]));
        let mu = dirichlet_spectral_data(&JacobiCoefficients::free(3), 3).unwrap();
        let r2 = 2f64.sqrt();
        for (x, y) in mu.atoms().iter().zip([-r2, 0.0, r2]) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn atoms_are_roots_of_phi() {
        let j = sample();
        let mu = dirichlet_spectral_data(&j, 4).unwrap();
        for x in mu.atoms() {
            assert!(phi_xi(&j, x, 5).phi[5].abs() < 1e-12);
        }
        assert!((mu.total_mass() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn spectral_moments_match_measure() {
        let j = sample();
        let mu = dirichlet_spectral_data(&j, 4).unwrap();
        let s = spectral_moments(&j, 7);
        let t = crate::recovery::moments_of_measure(&mu, 7);
        for (x, y) in s.iter().zip(&t) {
            assert!((x - y).abs() < 1e-13 * (1.0 + x.abs()));
        }
    }

    #[test]
    fn jacobi_from_moment_examples() {
        let s = MomentSequence::from_f64(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let j = jacobi_from_moments(&s, 2).unwrap();
        assert_eq!(j.diagonal(), &[0.0, 0.0]);
        assert_eq!(j.off_diagonal(), &[1.0]);
        let s = MomentSequence::from_f64(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert_eq!(jacobi_from_moments(&s, 1).unwrap().diagonal(), &[2.0]);
        assert!(matches!(
            jacobi_from_moments(&s, 2),
            Err(Error::NotPositiveDefinite { order: 2, index: 2 })
        ));
        let s = MomentSequence::from_f64(vec![3.0, -1.5]).unwrap();
        assert_eq!(jacobi_from_moments(&s, 1).unwrap().diagonal(), &[-0.5]);
    }

    #[test]
    fn jacobi_from_moments_round_trip() {
        let j = sample();
        let s = spectral_moments(&j.to_rational(), 7);
        let back = jacobi_from_moments(&MomentSequence::from_rationals(s).unwrap(), 4).unwrap();
        for (x, y) in back.off_diagonal().iter().zip(j.off_diagonal()) {
            assert!((x - y).abs() < 1e-14);
        }
        for (x, y) in back.diagonal().iter().zip(j.diagonal()) {
            assert!((x - y).abs() < 1e-14);
        }
    }

    #[test]
    fn control_to_state_is_triangular_and_linear() {
        let j = sample().to_rational();
        let n = 4;
        let cols: Vec<Vec<Rational>> = (0..n)
            .map(|k| {
                let mut e = vec![Rational::from_i64(0); n];
                e[k] = Rational::from_i64(1);
                control_to_state(&j, &e, n).unwrap()
            })
            .collect();
        // f_k reaches site N − k at time N and no further.
        for (k, col) in cols.iter().enumerate() {
            for (i, v) in col.iter().enumerate() {
                if i + 1 > n - k {
                    assert_eq!(*v, Rational::from_i64(0));
                } else if i + 1 == n - k {
                    assert_ne!(*v, Rational::from_i64(0));
                }
            }
        }
        let f: Vec<Rational> = [3, -1, 4, 1]
            .iter()
            .map(|&x| Rational::from_i64(x))
            .collect();
        let g: Vec<Rational> = [2, 7, -1, 8]
            .iter()
            .map(|&x| Rational::from_i64(x))
            .collect();
        let (al, be) = (Rational::new(2.into(), 3.into()), Rational::from_i64(-5));
        let h: Vec<Rational> = f
            .iter()
            .zip(&g)
            .map(|(x, y)| al.clone() * x + be.clone() * y)
            .collect();
        let wf = control_to_state(&j, &f, n).unwrap();
        let wg = control_to_state(&j, &g, n).unwrap();
        let wh = control_to_state(&j, &h, n).unwrap();
        for i in 0..n {
            assert_eq!(wh[i], al.clone() * &wf[i] + be.clone() * &wg[i]);
        }
    }
}

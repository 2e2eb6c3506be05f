//! Truncated moment problems solved through the connecting and companion operators.
//!
//! For an order `N` the pencil `B^N f = λ C^N f` has the atoms as eigenvalues. With the
//! eigenvectors normalized by `(C^N f_k, f_k) = 1` the weight of atom `λ_k` is `α_k²`, where
//! `α_k = (R f_k)_N` is the last entry of the response to `f_k`, equivalently the last row of
//! `C^N` applied to `f_k` (the pairing `⟨F_k, 1⟩`). The norming constant is `ρ_k = 1/α_k²`.
//!
//! The whole reduction runs in exact rational arithmetic on the given moments; only the final
//! symmetric eigensolve is done in `f64`.

use crate::bc_operators::{companion_operator, connecting_operator};
use crate::chebyshev::moments_to_response;
use crate::error::{Diagnostic, Error, Result};
use crate::matrix::Matrix;
use crate::moments::MomentSequence;
use crate::pencil::{solve_pencil_projected, EigenSolution, PencilProblem, DEFAULT_TOL};
use crate::scalar::{Rational, Scalar};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Atoms closer than this fraction of the spectral diameter are treated as coincident.
pub const ATOM_SEPARATION_REL: f64 = 1e-9;

/// Finitely supported positive measure `Σ w_k δ_{λ_k}`.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct DiscreteMeasure<T> {
    atoms: Vec<T>,
    weights: Vec<T>,
}

impl<T: Scalar> DiscreteMeasure<T> {
    /// Requires strictly increasing atoms and positive weights.
    pub fn new(atoms: Vec<T>, weights: Vec<T>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidInput(format!(
                "measure needs matching nonempty atom and weight lists, got {} and {}",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().chain(&weights).any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("measure entries must be finite".into()));
        }
        if atoms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidInput(
                "atoms must be strictly increasing".into(),
            ));
        }
        if weights.iter().any(|w| *w <= T::zero()) {
            return Err(Error::InvalidInput("weights must be positive".into()));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// Sorts the atoms first.
    pub fn from_unsorted(pairs: Vec<(T, T)>) -> Result<Self> {
        let mut pairs = pairs;
        pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal));
        let (atoms, weights) = pairs.into_iter().unzip();
        Self::new(atoms, weights)
    }

    pub fn atoms(&self) -> &[T] {
        &self.atoms
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `ρ_k = 1 / w_k`.
    pub fn norming_constants(&self) -> Vec<T> {
        self.weights.iter().map(|w| T::one() / w.clone()).collect()
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().fold(T::zero(), |a, w| a + w.clone())
    }

    /// Jump points of the distribution function: `(λ_k, Σ_{j≤k} w_j)`.
    pub fn step_function(&self) -> Vec<(T, T)> {
        let mut acc = T::zero();
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| {
                acc = acc.clone() + w.clone();
                (x.clone(), acc.clone())
            })
            .collect()
    }

    /// `ρ^N(λ) = Σ_{λ_k < λ} w_k`.
    pub fn distribution(&self, lambda: &T) -> T {
        self.atoms
            .iter()
            .zip(&self.weights)
            .filter(|(x, _)| *x < lambda)
            .fold(T::zero(), |a, (_, w)| a + w.clone())
    }

    pub fn to_f64(&self) -> DiscreteMeasure<f64> {
        DiscreteMeasure {
            atoms: self.atoms.iter().map(|x| x.to_f64()).collect(),
            weights: self.weights.iter().map(|x| x.to_f64()).collect(),
        }
    }
}

/// `s_j = Σ_k w_k λ_k^j` for `j = 0..=kmax`.
pub fn moments_of_measure<T: Scalar>(measure: &DiscreteMeasure<T>, kmax: usize) -> Vec<T> {
    let mut s = vec![T::zero(); kmax + 1];
    for (x, w) in measure.atoms.iter().zip(&measure.weights) {
        let mut p = w.clone();
        for sj in s.iter_mut() {
            *sj = sj.clone() + p.clone();
            p = p * x.clone();
        }
    }
    s
}

/// `max_j |s_j − t_j| / Σ_k w_k |λ_k|^j`, the moment error relative to the absolute moments
/// of the measure that produced `t`.
pub fn relative_moment_error(measure: &DiscreteMeasure<f64>, s: &[f64]) -> f64 {
    let kmax = s.len().saturating_sub(1);
    let reproduced = moments_of_measure(measure, kmax);
    let abs = DiscreteMeasure {
        atoms: measure.atoms.iter().map(|x| x.abs()).collect(),
        weights: measure.weights.clone(),
    };
    let scale = moments_of_measure(&abs, kmax);
    s.iter()
        .zip(&reproduced)
        .zip(&scale)
        .map(|((a, b), c)| {
            let d = (a - b).abs();
            if *c > 0.0 {
                d / c
            } else {
                d
            }
        })
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct TruncatedSolution {
    pub order: usize,
    pub measure: DiscreteMeasure<f64>,
    /// `ρ_k = 1/w_k`.
    pub norming_constants: Vec<f64>,
    pub reproduced_moments: Vec<f64>,
    pub max_relative_moment_error: f64,
    pub spectrum: EigenSolution,
    pub diagnostics: Vec<Diagnostic>,
}

fn reject_close_atoms(atoms: &[f64]) -> Result<()> {
    if atoms.len() < 2 {
        return Ok(());
    }
    let diameter = atoms[atoms.len() - 1] - atoms[0];
    for w in atoms.windows(2) {
        if w[1] - w[0] <= ATOM_SEPARATION_REL * diameter {
            return Err(Error::DegenerateSpectrum {
                left: w[0],
                right: w[1],
            });
        }
    }
    Ok(())
}

fn measure_from_alphas(atoms: &[f64], alphas: &[f64]) -> Result<DiscreteMeasure<f64>> {
    reject_close_atoms(atoms)?;
    let weights: Vec<f64> = alphas.iter().map(|a| a * a).collect();
    if let Some(k) = weights.iter().position(|w| w.is_nan() || *w <= 0.0) {
        return Err(Error::Degenerate(format!(
            "atom {} received zero weight",
            atoms[k]
        )));
    }
    DiscreteMeasure::new(atoms.to_vec(), weights)
}

/// Recovers the `N`-atom measure matching `s_0, …, s_{2N−1}`.
pub fn solve_truncated(s: &MomentSequence, order: usize) -> Result<TruncatedSolution> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    let needed = 2 * order;
    s.require(needed)?;
    let mut diagnostics = Vec::new();
    if s.len() > needed {
        diagnostics.push(Diagnostic::new(
            "ignored-moments",
            format!(
                "using s_0..s_{} of {} supplied moments",
                needed - 1,
                s.len()
            ),
        ));
    }
    let values: Vec<Rational> = s.values::<Rational>()[..needed].to_vec();
    let r = moments_to_response(&values).values;
    let c = connecting_operator(&r, order)?.entries;
    let b = companion_operator(&r, order)?.entries;
    let last_row = c.row(order - 1).to_vec();
    let problem = PencilProblem::new(b, c)?;
    let out = solve_pencil_projected(&problem, DEFAULT_TOL, &[last_row], false)?;
    let measure = measure_from_alphas(&out.solution.eigenvalues, &out.functionals[0])?;

    let target: Vec<f64> = values.iter().map(|x| x.to_f64()).collect();
    let reproduced = moments_of_measure(&measure, needed - 1);
    let err = relative_moment_error(&measure, &target);
    diagnostics.extend(out.solution.diagnostics.iter().cloned());
    Ok(TruncatedSolution {
        order,
        norming_constants: measure.norming_constants(),
        measure,
        reproduced_moments: reproduced,
        max_relative_moment_error: err,
        spectrum: out.solution,
        diagnostics,
    })
}

/// Largest denominator tried when snapping a float atom or weight to a rational.
pub const SNAP_MAX_DENOMINATOR: u64 = 1 << 24;
/// Relative distance within which a convergent is taken as the snapped value.
pub const SNAP_REL_TOL: f64 = 1e-9;

/// First continued-fraction convergent of `x` within `SNAP_REL_TOL`, if its denominator is small.
fn snap(x: f64, scale: f64) -> Option<Rational> {
    let target = x.to_rational();
    let tol = SNAP_REL_TOL * scale;
    let limit = BigInt::from(SNAP_MAX_DENOMINATOR);
    let (mut num, mut den) = (target.numer().clone(), target.denom().clone());
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    while !den.is_zero() {
        let (a, rem) = num.div_mod_floor(&den);
        let h = &a * &h1 + &h0;
        let k = &a * &k1 + &k0;
        if k > limit {
            return None;
        }
        let c = Rational::new(h.clone(), k.clone());
        if (c.to_f64() - x).abs() <= tol {
            return Some(c);
        }
        (h0, h1, k0, k1) = (h1, h, k1, k);
        (num, den) = (den, rem);
    }
    None
}

/// Exact `N`-atom solution when its atoms and weights are rationals with small denominators.
///
/// Candidates are continued-fraction convergents of the float solution. They are accepted only
/// when they reproduce `s_0, …, s_{2N−1}` exactly; the `N`-atom solution is unique, so an
/// accepted candidate is the solution.
pub fn exact_solution(
    s: &[Rational],
    approx: &DiscreteMeasure<f64>,
) -> Option<DiscreteMeasure<Rational>> {
    let n = approx.len();
    if s.len() < 2 * n {
        return None;
    }
    let radius = approx.atoms().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    let atoms: Vec<Rational> = approx
        .atoms()
        .iter()
        .map(|&x| snap(x, radius))
        .collect::<Option<_>>()?;
    let weights: Vec<Rational> = approx
        .weights()
        .iter()
        .map(|&w| snap(w, w.abs()))
        .collect::<Option<_>>()?;
    let measure = DiscreteMeasure::new(atoms, weights).ok()?;
    (moments_of_measure(&measure, 2 * n - 1)[..] == s[..2 * n]).then_some(measure)
}

/// Shift operator on extended controls: `(D f)_t = f_{t+1} + f_{t−1}` with
/// `f_{−1} = f_N = 0`.
pub fn shift_operator<T: Scalar>(order: usize) -> Matrix<T> {
    Matrix::from_fn(order, order, |i, j| {
        if i.abs_diff(j) == 1 {
            T::one()
        } else {
            T::zero()
        }
    })
}

/// The pencil `(Pᵀ C D P, Pᵀ C P)` on the subspace `f_0 = 0`.
pub fn restricted_pencil<T: Scalar>(c: &Matrix<T>, d: &Matrix<T>) -> Result<PencilProblem<T>> {
    let n = c.rows();
    if n < 2 {
        return Err(Error::InvalidInput(
            "restricted pencil needs order at least 2".into(),
        ));
    }
    let idx: Vec<usize> = (1..n).collect();
    let cd = c.mul(d);
    PencilProblem::new(cd.submatrix(&idx, &idx), c.submatrix(&idx, &idx))
}

#[derive(Debug, Clone, serde::Serialize)]
pub struct RestrictedSolution {
    pub order: usize,
    /// Eigenpairs in reduced coordinates `(f_1, …, f_{N−1})`.
    pub spectrum: EigenSolution,
    /// Spectral measure of the `(N−1)`-block, weights `α_k²` as in [`solve_truncated`].
    pub measure: DiscreteMeasure<f64>,
}

/// Dirichlet spectrum of the leading `(N−1)×(N−1)` Jacobi block from `s_0, …, s_{2N−2}`.
///
/// This is the variational route: the Rayleigh quotient `(C D f, f)/(C f, f)` minimized over
/// `f_0 = 0`, successively under `C`-orthogonality to earlier minimizers, has the eigenvalues
/// of the restricted pencil as its critical values.
pub fn dirichlet_spectrum_restricted(
    s: &MomentSequence,
    order: usize,
) -> Result<RestrictedSolution> {
    if order < 2 {
        return Err(Error::InvalidInput(
            "restricted route needs order at least 2".into(),
        ));
    }
    s.require(2 * order - 1)?;
    let values: Vec<Rational> = s.values::<Rational>()[..2 * order - 1].to_vec();
    let r = moments_to_response(&values).values;
    let c = connecting_operator(&r, order)?.entries;
    let problem = restricted_pencil(&c, &shift_operator(order))?;
    let functional = c.row(order - 1)[1..].to_vec();
    let out = solve_pencil_projected(&problem, DEFAULT_TOL, &[functional], false)?;
    let measure = measure_from_alphas(&out.solution.eigenvalues, &out.functionals[0])?;
    Ok(RestrictedSolution {
        order,
        spectrum: out.solution,
        measure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn symmetric_two_atoms() {
        let s = MomentSequence::from_f64(vec![1.0, 0.0, 1.0, 0.0]).unwrap();
        let sol = solve_truncated(&s, 2).unwrap();
        let m = &sol.measure;
        assert!(close(m.atoms()[0], -1.0, 1e-14) && close(m.atoms()[1], 1.0, 1e-14));
        assert!(close(m.weights()[0], 0.5, 1e-14) && close(m.weights()[1], 0.5, 1e-14));
        assert!(close(sol.norming_constants[0], 2.0, 1e-13));
        assert!(sol.max_relative_moment_error < 1e-15);
    }

    #[test]
    fn single_atom() {
        let s = MomentSequence::from_f64(vec![1.0, 2.0]).unwrap();
        let sol = solve_truncated(&s, 1).unwrap();
        assert_eq!(sol.measure.atoms(), &[2.0]);
        assert_eq!(sol.measure.weights(), &[1.0]);
        let s = MomentSequence::from_f64(vec![0.25, -0.75, 9.0]).unwrap();
        let sol = solve_truncated(&s, 1).unwrap();
        assert_eq!(sol.measure.atoms(), &[-3.0]);
        assert_eq!(sol.measure.weights(), &[0.25]);
        assert_eq!(sol.diagnostics[0].code, "ignored-moments");
    }

    #[test]
    fn rank_deficient_data_is_rejected() {
        let s = MomentSequence::from_f64(vec![1.0, 2.0, 4.0, 8.0]).unwrap();
        assert!(matches!(
            solve_truncated(&s, 2).unwrap_err(),
            Error::NotPositiveDefinite { order: 2, .. }
        ));
        let s = MomentSequence::from_f64(vec![1.0, 0.0, 1.0]).unwrap();
        assert_eq!(
            solve_truncated(&s, 2).unwrap_err(),
            Error::InsufficientMoments {
                required: 4,
                available: 3
            }
        );
    }

    #[test]
    fn three_atoms_rational_input() {
        let mu = DiscreteMeasure::new(vec![-1.5, 0.25, 2.0], vec![0.5, 1.25, 0.75]).unwrap();
        let s = MomentSequence::from_f64(moments_of_measure(&mu, 5)).unwrap();
        let s = s.with_backend(crate::scalar::Backend::Rational);
        let sol = solve_truncated(&s, 3).unwrap();
        for k in 0..3 {
            assert!(close(sol.measure.atoms()[k], mu.atoms()[k], 1e-13));
            assert!(close(sol.measure.weights()[k], mu.weights()[k], 1e-13));
        }
    }

    #[test]
    fn measure_helpers() {
        let mu = DiscreteMeasure::new(vec![-1.0, 1.0], vec![0.5, 0.5]).unwrap();
        assert_eq!(moments_of_measure(&mu, 3), vec![1.0, 0.0, 1.0, 0.0]);
        let mu = DiscreteMeasure::new(vec![2.0], vec![1.0]).unwrap();
        assert_eq!(moments_of_measure(&mu, 3), vec![1.0, 2.0, 4.0, 8.0]);
        let mu = DiscreteMeasure::new(vec![0.0], vec![3.0]).unwrap();
        assert_eq!(moments_of_measure(&mu, 2), vec![3.0, 0.0, 0.0]);
        let mu = DiscreteMeasure::from_unsorted(vec![(1.0, 0.25), (-2.0, 0.5)]).unwrap();
        assert_eq!(mu.atoms(), &[-2.0, 1.0]);
        assert_eq!(mu.step_function(), vec![(-2.0, 0.5), (1.0, 0.75)]);
        assert_eq!(mu.distribution(&1.0), 0.5);
        assert_eq!(mu.norming_constants(), vec![2.0, 4.0]);
        assert!(DiscreteMeasure::new(vec![1.0, 1.0], vec![1.0, 1.0]).is_err());
        assert!(DiscreteMeasure::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn restricted_route_free_example() {
        let s = MomentSequence::from_f64(vec![1.0, 0.0, 1.0]).unwrap();
        let sol = dirichlet_spectrum_restricted(&s, 2).unwrap();
        assert_eq!(sol.spectrum.eigenvalues.len(), 1);
        assert!(sol.spectrum.eigenvalues[0].abs() < 1e-15);
        assert!(close(sol.measure.weights()[0], 1.0, 1e-15));
    }

    #[test]
    fn restricted_pencil_with_zero_shift() {
        let c: Matrix<f64> = Matrix::from_rows(vec![
            vec![3.0, 1.0, 0.5],
            vec![1.0, 2.0, 0.25],
            vec![0.5, 0.25, 1.0],
        ]);
        let p = restricted_pencil(&c, &Matrix::zeros(3, 3)).unwrap();
        let sol = crate::pencil::solve_pencil(&p, DEFAULT_TOL).unwrap();
        assert!(sol.eigenvalues.iter().all(|x| *x == 0.0));
    }

    #[test]
    fn sequential_minimization_matches_pencil() {
        // Moments of 0.3δ_{-2} + 0.2δ_{-0.5} + 0.4δ_{1} + 0.1δ_{3}.
        let mu =
            DiscreteMeasure::new(vec![-2.0, -0.5, 1.0, 3.0], vec![0.3, 0.2, 0.4, 0.1]).unwrap();
        let n = 4;
        let s = moments_of_measure(&mu, 2 * n - 2);
        let pencil =
            dirichlet_spectrum_restricted(&MomentSequence::from_f64(s.clone()).unwrap(), n)
                .unwrap()
                .spectrum;
        let r = moments_to_response(&s).values;
        let c = connecting_operator(&r, n).unwrap().entries;
        let cd = c.mul(&shift_operator(n));
        // Coordinates with f_0 = 0, C-orthonormalized.
        let idx: Vec<usize> = (1..n).collect();
        let c0 = c.submatrix(&idx, &idx);
        let a0 = cd.submatrix(&idx, &idx);
        let mut found: Vec<Vec<f64>> = Vec::new();
        for step in 0..n - 1 {
            // Basis of the C-orthogonal complement of the earlier minimizers.
            let mut basis: Vec<Vec<f64>> = Vec::new();
            for e in 0..n - 1 {
                let mut v = vec![0.0; n - 1];
                v[e] = 1.0;
                for u in found.iter().chain(basis.iter()) {
                    let p = crate::matrix::dot(&c0.mul_vec(&v), u);
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= p * y);
                }
                let nn = crate::matrix::dot(&c0.mul_vec(&v), &v);
                if nn > 1e-10 {
                    v.iter_mut().for_each(|x| *x /= nn.sqrt());
                    basis.push(v);
                }
            }
            assert_eq!(basis.len(), n - 1 - step);
            let k = basis.len();
            let q = Matrix::from_fn(k, k, |i, j| {
                crate::matrix::dot(&a0.mul_vec(&basis[j]), &basis[i])
            });
            let (vals, vecs, _) = crate::pencil::symmetric_eigen(&q, 1e-15).unwrap();
            let (imin, &vmin) = vals
                .iter()
                .enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .unwrap();
            assert!(
                close(vmin, pencil.eigenvalues[step], 1e-10),
                "{vmin} vs {:?}",
                pencil
            );
            let mut f = vec![0.0; n - 1];
            for (j, b) in basis.iter().enumerate() {
                f.iter_mut()
                    .zip(b)
                    .for_each(|(x, y)| *x += vecs[(j, imin)] * y);
            }
            found.push(f);
        }
    }

    #[test]
    fn exact_solution_recovers_rational_measures() {
        let q = |p: i64, r: i64| Rational::new(p.into(), r.into());
        let mu = DiscreteMeasure::new(
            vec![q(-3, 2), q(1, 3), q(5, 1)],
            vec![q(1, 7), q(2, 5), q(1, 2)],
        )
        .unwrap();
        let s = moments_of_measure(&mu, 5);
        let sol = solve_truncated(&MomentSequence::from_scalars(&s).unwrap(), 3).unwrap();
        assert_eq!(exact_solution(&s, &sol.measure), Some(mu));

        // Irrational atoms ±√2 have no certified snap.
        let s: Vec<Rational> = [1, 0, 2, 0].iter().map(|&v| q(v, 1)).collect();
        let sol = solve_truncated(&MomentSequence::from_scalars(&s).unwrap(), 2).unwrap();
        assert_eq!(exact_solution(&s, &sol.measure), None);

        // A perturbed approximation still snaps, but only to values that verify.
        let approx = DiscreteMeasure::new(vec![-1.0 + 1e-12, 1.0], vec![0.5, 0.5 - 1e-12]).unwrap();
        let s: Vec<Rational> = [1, 0, 1, 0].iter().map(|&v| q(v, 1)).collect();
        let exact = exact_solution(&s, &approx).unwrap();
        assert_eq!(exact.atoms(), &[q(-1, 1), q(1, 1)]);
        let wrong: Vec<Rational> = [1, 0, 1, 1].iter().map(|&v| q(v, 1)).collect();
        assert_eq!(exact_solution(&wrong, &approx), None);
    }
}

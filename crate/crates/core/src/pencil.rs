//! Symmetric-definite pencils `B f = λ C f`.
//!
//! `C` is factored as `L D Lᵀ` in the problem's own backend, the reduced matrix
//! `K = L⁻¹ B L⁻ᵀ` is formed in the same backend, and only then is
//! `M = D^{-1/2} K D^{-1/2}` rounded to `f64` for a cyclic Jacobi eigensolve. With rational
//! input the ill-conditioned part of the work is therefore exact. Eigenvectors are mapped back
//! as `f = L⁻ᵀ D^{-1/2} y`, which makes them `C`-orthonormal.
//!
//! Float problems whose `C` has a condition estimate above [`CONDITION_WARNING`] get a
//! diagnostic and, unless disabled, are re-solved through the exact reduction of their
//! (exactly representable) float entries.

use crate::error::{Diagnostic, Error, Result};
use crate::matrix::{Ldlt, Matrix, PD_REL_TOL};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::scalar::{Rational, Scalar, ScaledFloat};

pub const SYMMETRY_REL_TOL: f64 = 1e-12;
pub const MAX_SWEEPS: usize = 100;
pub const CONDITION_WARNING: f64 = 1e12;
pub const DEFAULT_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub struct PencilProblem<T> {
    b: Matrix<T>,
    c: Matrix<T>,
}

impl<T: Scalar> PencilProblem<T> {
    /// Validates shapes and symmetry (relative asymmetry at most `1e-12`, exact symmetry for
    /// rational input) and stores the symmetrized pair.
    pub fn new(b: Matrix<T>, c: Matrix<T>) -> Result<Self> {
        if !b.is_square() || !c.is_square() || b.rows() != c.rows() || b.rows() == 0 {
            return Err(Error::InvalidInput(format!(
                "pencil needs two nonempty square matrices of equal order, got {}x{} and {}x{}",
                b.rows(),
                b.cols(),
                c.rows(),
                c.cols()
            )));
        }
        for (name, m) in [("B", &b), ("C", &c)] {
            let ok = if T::EXACT {
                m.is_symmetric()
            } else {
                m.relative_asymmetry() <= SYMMETRY_REL_TOL
            };
            if !ok {
                return Err(Error::InvalidInput(format!(
                    "{name} is not symmetric (relative asymmetry {:e})",
                    m.relative_asymmetry()
                )));
            }
        }
        Ok(PencilProblem {
            b: b.symmetrized(),
            c: c.symmetrized(),
        })
    }

    pub fn order(&self) -> usize {
        self.b.rows()
    }

    pub fn b(&self) -> &Matrix<T> {
        &self.b
    }

    pub fn c(&self) -> &Matrix<T> {
        &self.c
    }

    pub fn to_rational(&self) -> PencilProblem<Rational> {
        PencilProblem {
            b: self.b.map(|x| x.to_rational()),
            c: self.c.map(|x| x.to_rational()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct EigenSolution {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[k]` is `f_k`, normalized so that `(C f_k, f_k) = 1`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// `‖C‖₁ ‖C⁻¹‖₁`.
    pub condition_estimate: f64,
    pub sweeps: usize,
    pub diagnostics: Vec<Diagnostic>,
}

impl EigenSolution {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `max_k ‖B f_k − λ_k C f_k‖_∞ / ‖B‖_max`.
    pub fn relative_residual(&self, b: &Matrix<f64>, c: &Matrix<f64>) -> f64 {
        let scale = b.max_abs().max(f64::MIN_POSITIVE);
        self.eigenvalues
            .iter()
            .zip(&self.eigenvectors)
            .map(|(&l, f)| {
                let bf = b.mul_vec(f);
                let cf = c.mul_vec(f);
                bf.iter()
                    .zip(&cf)
                    .map(|(x, y)| (x - l * y).abs())
                    .fold(0.0, f64::max)
                    / scale
            })
            .fold(0.0, f64::max)
    }
}

/// Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.
///
/// Sweeps visit `(p, q)` with `p < q` in row order and stop once the off-diagonal Frobenius
/// norm is at most `tol` times the full Frobenius norm. Returns unsorted eigenvalues and the
/// eigenvectors as columns of an orthogonal matrix.
pub fn symmetric_eigen(a: &Matrix<f64>, tol: f64) -> Result<(Vec<f64>, Matrix<f64>, usize)> {
    assert!(a.is_square());
    let n = a.rows();
    let mut a = a.symmetrized();
    let mut v = Matrix::<f64>::identity(n);
    let frob = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| a[(i, j)] * a[(i, j)])
        .sum::<f64>()
        .sqrt();
    let off = |a: &Matrix<f64>| {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[(i, j)] * a[(i, j)];
                }
            }
        }
        s.sqrt()
    };
    let mut sweeps = 0;
    while off(&a) > tol * frob {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence { sweeps });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let (app, aqq) = (a[(p, p)], a[(q, q)]);
                // Skip rotations that cannot change the diagonal in floating point.
                if apq.abs() <= f64::EPSILON * 1e-3 * (app.abs() + aqq.abs()) {
                    a[(p, q)] = 0.0;
                    a[(q, p)] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let values = (0..n).map(|i| a[(i, i)]).collect();
    Ok((values, v, sweeps))
}

/// Factorization of `C` that maps the pencil to a standard symmetric problem.
///
/// Float problems use `C = L D Lᵀ` directly. Exact problems are scaled to integers and run
/// through one fraction-free elimination of `[C | I]`: row `i` of the right block then holds
/// `u_i = Δ_i · (L⁻¹)_i` and the pivots are the leading minors `Δ_{i+1}`, all integers. Every
/// reduced quantity is a ratio of such integers, rounded once at the end.
#[derive(Debug, Clone)]
pub struct Reduction<T> {
    kind: Kind<T>,
}

#[derive(Debug, Clone)]
enum Kind<T> {
    Direct { ldlt: Ldlt<T>, sqrt_d: Vec<f64> },
    FractionFree(FractionFree),
}

#[derive(Debug, Clone)]
struct FractionFree {
    /// Positive integer `σ` with `σ C` integral.
    scale: BigInt,
    u: Vec<Vec<BigInt>>,
    /// `√(Δ_i Δ_{i+1})`.
    norms: Vec<ScaledFloat>,
    sqrt_scale: ScaledFloat,
}

fn common_denominator<'a>(values: impl Iterator<Item = &'a Rational>) -> BigInt {
    values.fold(BigInt::one(), |acc, v| acc.lcm(v.denom()))
}

fn integral(m: &Matrix<Rational>, scale: &BigInt) -> Vec<Vec<BigInt>> {
    (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| {
                    let v = m[(i, j)].clone() * Rational::from_integer(scale.clone());
                    debug_assert!(v.is_integer());
                    v.to_integer()
                })
                .collect()
        })
        .collect()
}

impl FractionFree {
    fn new(c: &Matrix<Rational>) -> Result<Self> {
        let n = c.rows();
        let scale = common_denominator(c.to_rows().iter().flatten());
        let ci = integral(c, &scale);
        let mut a: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let mut row = ci[i].clone();
                row.extend((0..n).map(|j| {
                    if i == j {
                        BigInt::one()
                    } else {
                        BigInt::zero()
                    }
                }));
                row
            })
            .collect();
        let mut minors = vec![BigInt::one()];
        let mut u = Vec::with_capacity(n);
        for k in 0..n {
            let pivot = a[k][k].clone();
            if pivot <= BigInt::zero() {
                return Err(Error::NotPositiveDefinite {
                    order: n,
                    index: k + 1,
                });
            }
            u.push(a[k][n..].to_vec());
            let prev = minors[k].clone();
            let (head, tail) = a.split_at_mut(k + 1);
            let pivot_row = &head[k];
            for row in tail.iter_mut().take(n - k - 1) {
                let aik = row[k].clone();
                for (x, p) in row[k + 1..2 * n].iter_mut().zip(&pivot_row[k + 1..2 * n]) {
                    *x = (&pivot * &*x - &aik * p) / &prev;
                }
            }
            minors.push(pivot);
        }
        let scaled: Vec<ScaledFloat> = minors.iter().map(ScaledFloat::from_bigint).collect();
        let norms = (0..n)
            .map(|i| scaled[i].mul(scaled[i + 1]).sqrt())
            .collect();
        let sqrt_scale = ScaledFloat::from_bigint(&scale).sqrt();
        Ok(FractionFree {
            scale,
            u,
            norms,
            sqrt_scale,
        })
    }

    fn reduced_matrix(&self, b: &Matrix<Rational>) -> Matrix<f64> {
        let n = self.u.len();
        // σ B = bi / τ with bi integral.
        let sb = b.map(|x| x.clone() * Rational::from_integer(self.scale.clone()));
        let tau = common_denominator(sb.to_rows().iter().flatten());
        let bi = integral(&sb, &tau);
        let tau = ScaledFloat::from_bigint(&tau);
        let bu: Vec<Vec<BigInt>> = self
            .u
            .iter()
            .map(|uj| {
                (0..n)
                    .map(|r| bi[r].iter().zip(uj).map(|(x, y)| x * y).sum::<BigInt>())
                    .collect()
            })
            .collect();
        Matrix::from_fn(n, n, |i, j| {
            let num: BigInt = self.u[i].iter().zip(&bu[j]).map(|(x, y)| x * y).sum();
            ScaledFloat::from_bigint(&num)
                .div(tau)
                .div(self.norms[i].mul(self.norms[j]))
                .to_f64()
        })
        .symmetrized()
    }

    fn project(&self, v: &[Rational]) -> Vec<f64> {
        self.u
            .iter()
            .zip(&self.norms)
            .map(|(ui, ni)| {
                let dotv: Rational = ui
                    .iter()
                    .zip(v)
                    .map(|(x, y)| Rational::from_integer(x.clone()) * y)
                    .sum();
                ScaledFloat::from_rational(&dotv)
                    .mul(self.sqrt_scale)
                    .div(*ni)
                    .to_f64()
            })
            .collect()
    }

    /// Rows of `√σ · D^{-1/2} L⁻¹` in `f64`.
    fn rows_f64(&self) -> Vec<Vec<f64>> {
        self.u
            .iter()
            .zip(&self.norms)
            .map(|(ui, ni)| {
                ui.iter()
                    .map(|x| {
                        ScaledFloat::from_bigint(x)
                            .mul(self.sqrt_scale)
                            .div(*ni)
                            .to_f64()
                    })
                    .collect()
            })
            .collect()
    }
}

impl<T: Scalar> Reduction<T> {
    pub fn new(c: &Matrix<T>) -> Result<Self> {
        if T::EXACT {
            let exact = c.map(|x| x.to_rational());
            return Ok(Reduction {
                kind: Kind::FractionFree(FractionFree::new(&exact)?),
            });
        }
        let ldlt = Ldlt::factor(c, PD_REL_TOL)?;
        let sqrt_d = ldlt.d.iter().map(|d| d.to_f64().sqrt()).collect();
        Ok(Reduction {
            kind: Kind::Direct { ldlt, sqrt_d },
        })
    }

    /// `D^{-1/2} L⁻¹ B L⁻ᵀ D^{-1/2}`, each entry rounded once from its backend value.
    pub fn reduced_matrix(&self, b: &Matrix<T>) -> Matrix<f64> {
        match &self.kind {
            Kind::Direct { ldlt, sqrt_d } => {
                let linv = ldlt.l_inverse();
                let k = linv.mul(b).mul(&linv.transpose());
                let n = k.rows();
                Matrix::from_fn(n, n, |i, j| k[(i, j)].to_f64() / (sqrt_d[i] * sqrt_d[j]))
                    .symmetrized()
            }
            Kind::FractionFree(ff) => ff.reduced_matrix(&b.map(|x| x.to_rational())),
        }
    }

    /// `D^{-1/2} L⁻¹ v`: coordinates of the functional `x ↦ vᵀx` in the reduced basis, so that
    /// `vᵀ f_k = project(v) · y_k`.
    pub fn project(&self, v: &[T]) -> Vec<f64> {
        match &self.kind {
            Kind::Direct { ldlt, sqrt_d } => ldlt
                .forward(v)
                .iter()
                .zip(sqrt_d)
                .map(|(x, s)| x.to_f64() / s)
                .collect(),
            Kind::FractionFree(ff) => {
                ff.project(&v.iter().map(|x| x.to_rational()).collect::<Vec<_>>())
            }
        }
    }

    /// `L⁻ᵀ D^{-1/2} y`.
    pub fn lift(&self, y: &[f64]) -> Vec<f64> {
        let n = y.len();
        match &self.kind {
            Kind::Direct { ldlt, sqrt_d } => {
                let mut x: Vec<f64> = y.iter().zip(sqrt_d).map(|(v, s)| v / s).collect();
                for i in (0..n).rev() {
                    for k in i + 1..n {
                        x[i] -= ldlt.l[(k, i)].to_f64() * x[k];
                    }
                }
                x
            }
            Kind::FractionFree(ff) => {
                let rows = ff.rows_f64();
                (0..n)
                    .map(|j| (0..n).map(|i| rows[i][j] * y[i]).sum())
                    .collect()
            }
        }
    }

    /// `‖C‖₁ ‖C⁻¹‖₁`, with `C⁻¹ = L⁻ᵀ D⁻¹ L⁻¹` evaluated in `f64`.
    pub fn condition_estimate(&self, c: &Matrix<T>) -> f64 {
        let n = c.rows();
        let g: Vec<Vec<f64>> = match &self.kind {
            Kind::Direct { ldlt, sqrt_d } => {
                let linv = ldlt.l_inverse();
                (0..n)
                    .map(|i| (0..n).map(|j| linv[(i, j)].to_f64() / sqrt_d[i]).collect())
                    .collect()
            }
            Kind::FractionFree(ff) => ff.rows_f64(),
        };
        let inv = |i: usize, j: usize| (0..n).map(|k| g[k][i] * g[k][j]).sum::<f64>();
        let norm1 = |m: &dyn Fn(usize, usize) -> f64| {
            (0..n)
                .map(|j| (0..n).map(|i| m(i, j).abs()).sum::<f64>())
                .fold(0.0, f64::max)
        };
        norm1(&|i, j| c[(i, j)].to_f64()) * norm1(&inv)
    }
}

/// Output of [`solve_pencil_projected`]: the solution and `vᵀ f_k` for each requested `v`.
#[derive(Debug, Clone)]
pub struct ProjectedSolution {
    pub solution: EigenSolution,
    /// `functionals[i][k] = v_iᵀ f_k`.
    pub functionals: Vec<Vec<f64>>,
}

pub fn solve_pencil<T: Scalar>(problem: &PencilProblem<T>, tol: f64) -> Result<EigenSolution> {
    Ok(solve_pencil_projected(problem, tol, &[], true)?.solution)
}

/// Solves the pencil and evaluates linear functionals on the eigenvectors through the
/// reduction, so that `vᵀ f_k` is as accurate as the reduced eigenvectors themselves.
///
/// With `refine` set, an ill-conditioned float problem is re-solved from its exact rational
/// values.
pub fn solve_pencil_projected<T: Scalar>(
    problem: &PencilProblem<T>,
    tol: f64,
    functionals: &[Vec<T>],
    refine: bool,
) -> Result<ProjectedSolution> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = problem.order();
    if let Some(v) = functionals.iter().find(|v| v.len() != n) {
        return Err(Error::InvalidInput(format!(
            "functional of length {} for a pencil of order {n}",
            v.len()
        )));
    }
    let reduction = Reduction::new(&problem.c)?;
    let condition = reduction.condition_estimate(&problem.c);
    let mut diagnostics = Vec::new();
    if condition > CONDITION_WARNING {
        diagnostics.push(Diagnostic::new(
            "ill-conditioned",
            format!("condition estimate of C is {condition:.3e}"),
        ));
        if refine && !T::EXACT {
            let exact = problem.to_rational();
            let exact_functionals: Vec<Vec<Rational>> = functionals
                .iter()
                .map(|v| v.iter().map(|x| x.to_rational()).collect())
                .collect();
            let mut out = solve_pencil_projected(&exact, tol, &exact_functionals, false)?;
            diagnostics.push(Diagnostic::new(
                "refined",
                "reduction recomputed in exact rational arithmetic",
            ));
            for d in out.solution.diagnostics.drain(..) {
                if !diagnostics.iter().any(|e| e.code == d.code) {
                    diagnostics.push(d);
                }
            }
            out.solution.diagnostics = diagnostics;
            return Ok(out);
        }
    }
    let m = reduction.reduced_matrix(&problem.b);
    let (values, y, sweeps) = symmetric_eigen(&m, tol)?;

    let mut columns: Vec<(f64, Vec<f64>)> = (0..n)
        .map(|k| {
            let mut col = y.column(k);
            if let Some(first) = col.iter().find(|x| x.abs() > 1e-300) {
                if *first < 0.0 {
                    col.iter_mut().for_each(|x| *x = -*x);
                }
            }
            (values[k], col)
        })
        .collect();
    columns.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal))
    });

    let projections: Vec<Vec<f64>> = functionals.iter().map(|v| reduction.project(v)).collect();
    let functional_values = projections
        .iter()
        .map(|p| {
            columns
                .iter()
                .map(|(_, y)| crate::matrix::dot(p, y))
                .collect()
        })
        .collect();
    let solution = EigenSolution {
        eigenvalues: columns.iter().map(|c| c.0).collect(),
        eigenvectors: columns.iter().map(|c| reduction.lift(&c.1)).collect(),
        condition_estimate: condition,
        sweeps,
        diagnostics,
    };
    Ok(ProjectedSolution {
        solution,
        functionals: functional_values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[f64]]) -> Matrix<f64> {
        Matrix::from_rows(rows.iter().map(|r| r.to_vec()).collect())
    }

    #[test]
    fn one_by_one() {
        let p = PencilProblem::new(m(&[&[2.0]]), m(&[&[1.0]])).unwrap();
        let sol = solve_pencil(&p, DEFAULT_TOL).unwrap();
        assert_eq!(sol.eigenvalues, vec![2.0]);
        assert_eq!(sol.eigenvectors, vec![vec![1.0]]);
    }

    #[test]
    fn swap_pencil_has_plus_minus_one() {
        let p = PencilProblem::new(m(&[&[0.0, 1.0], &[1.0, 0.0]]), Matrix::identity(2)).unwrap();
        let sol = solve_pencil(&p, DEFAULT_TOL).unwrap();
        assert!((sol.eigenvalues[0] + 1.0).abs() < 1e-15);
        assert!((sol.eigenvalues[1] - 1.0).abs() < 1e-15);
        // First nonzero component positive.
        for f in &sol.eigenvectors {
            assert!(f[0] > 0.0);
        }
    }

    #[test]
    fn identity_pencil() {
        let c = m(&[&[4.0, 1.0, 0.5], &[1.0, 3.0, 0.2], &[0.5, 0.2, 2.0]]);
        let sol = solve_pencil(&PencilProblem::new(c.clone(), c.clone()).unwrap(), 1e-14).unwrap();
        for l in &sol.eigenvalues {
            assert!((l - 1.0).abs() < 1e-13);
        }
        // C-orthonormal eigenvectors.
        for (i, f) in sol.eigenvectors.iter().enumerate() {
            for (j, g) in sol.eigenvectors.iter().enumerate() {
                let v = crate::matrix::dot(&c.mul_vec(f), g);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((v - want).abs() < 1e-12, "{i} {j} {v}");
            }
        }
    }

    #[test]
    fn rejects_asymmetric_and_indefinite() {
        let err = PencilProblem::new(m(&[&[0.0, 1.0], &[2.0, 0.0]]), Matrix::identity(2));
        assert!(matches!(err, Err(Error::InvalidInput(_))));
        let p = PencilProblem::new(Matrix::identity(2), m(&[&[1.0, 2.0], &[2.0, 1.0]])).unwrap();
        assert_eq!(
            solve_pencil(&p, DEFAULT_TOL).unwrap_err(),
            Error::NotPositiveDefinite { order: 2, index: 2 }
        );
    }

    #[test]
    fn residual_and_functionals() {
        let b = m(&[&[1.0, 2.0, 0.0], &[2.0, -1.0, 0.5], &[0.0, 0.5, 3.0]]);
        let c = m(&[&[2.0, 0.3, 0.1], &[0.3, 1.5, 0.2], &[0.1, 0.2, 1.0]]);
        let p = PencilProblem::new(b.clone(), c.clone()).unwrap();
        let v = vec![0.7, -0.2, 1.1];
        let out = solve_pencil_projected(&p, 1e-14, std::slice::from_ref(&v), true).unwrap();
        assert!(out.solution.relative_residual(&b, &c) < 1e-13);
        for (k, f) in out.solution.eigenvectors.iter().enumerate() {
            assert!((crate::matrix::dot(&v, f) - out.functionals[0][k]).abs() < 1e-13);
        }
        let exact = solve_pencil(&p.to_rational(), 1e-14).unwrap();
        for (x, y) in exact.eigenvalues.iter().zip(&out.solution.eigenvalues) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn ill_conditioned_float_pencil_is_refined() {
        // C = L Lᵀ with L unit lower triangular, all subdiagonal entries -1: unit pivots, but
        // the condition number grows like 4^n.
        let n = 24;
        let l = Matrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Equal => 1.0,
            std::cmp::Ordering::Greater => -1.0,
            std::cmp::Ordering::Less => 0.0,
        });
        let c = l.mul(&l.transpose());
        let b = Matrix::from_fn(n, n, |i, j| 2.0 * c[(i, j)]);
        let sol = solve_pencil(&PencilProblem::new(b, c).unwrap(), DEFAULT_TOL).unwrap();
        assert!(sol.condition_estimate > CONDITION_WARNING);
        let codes: Vec<_> = sol.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, vec!["ill-conditioned", "refined"]);
        assert!(sol.eigenvalues.iter().all(|x| (x - 2.0).abs() < 1e-13));
    }

    #[test]
    fn near_singular_float_c_is_rejected() {
        let n = 10;
        let h = |shift: usize| Matrix::from_fn(n, n, |i, j| 1.0 / (i + j + shift + 1) as f64);
        let p = PencilProblem::new(h(1), h(0)).unwrap();
        assert!(matches!(
            solve_pencil(&p, DEFAULT_TOL),
            Err(Error::NotPositiveDefinite { .. })
        ));
        let sol = solve_pencil(&p.to_rational(), DEFAULT_TOL).unwrap();
        assert!(sol.eigenvalues.iter().all(|&x| x > 0.0 && x < 1.0));
    }

    #[test]
    fn jacobi_eigen_diagonalizes() {
        let a = m(&[&[4.0, -2.0, 1.0], &[-2.0, 2.0, 0.0], &[1.0, 0.0, 3.0]]);
        let (vals, v, _) = symmetric_eigen(&a, 1e-15).unwrap();
        let d = v.transpose().mul(&a).mul(&v);
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { vals[i] } else { 0.0 };
                assert!((d[(i, j)] - want).abs() < 1e-13);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 9.0).abs() < 1e-13);
    }
}

//! Small dense row-major matrices over either arithmetic backend.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Relative pivot threshold of the float backend's definiteness tests.
pub const PD_REL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Scalar> Matrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |i, j| if i == j { T::one() } else { T::zero() })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Panics if the rows are ragged.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == m), "ragged rows");
        Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    /// `J·M·J` with `J` the anti-diagonal exchange matrix (reverses row and column order).
    pub fn flipped(&self) -> Self {
        let (r, c) = (self.rows, self.cols);
        Self::from_fn(r, c, |i, j| self[(r - 1 - i, c - 1 - j)].clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn mul(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        Matrix::from_fn(self.rows, other.cols, |i, j| {
            let mut acc = T::zero();
            for k in 0..self.cols {
                acc = acc + self[(i, k)].clone() * other[(k, j)].clone();
            }
            acc
        })
    }

    pub fn mul_vec(&self, v: &[T]) -> Vec<T> {
        assert_eq!(
            self.cols,
            v.len(),
            "dimension mismatch in matrix-vector product"
        );
        (0..self.rows).map(|i| dot(self.row(i), v)).collect()
    }

    pub fn sub(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() - other[(i, j)].clone()
        })
    }

    pub fn add(&self, other: &Matrix<T>) -> Matrix<T> {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            self[(i, j)].clone() + other[(i, j)].clone()
        })
    }

    /// Principal submatrix on the given index set, in the given order.
    pub fn principal(&self, idx: &[usize]) -> Matrix<T> {
        Matrix::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        Matrix::from_fn(rows.len(), cols.len(), |i, j| {
            self[(rows[i], cols[j])].clone()
        })
    }

    pub fn max_abs(&self) -> T {
        self.data.iter().fold(T::zero(), |m, x| {
            let a = x.abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn max_abs_diagonal(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |m, i| {
            let a = self[(i, i)].abs();
            if a > m {
                a
            } else {
                m
            }
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self[(i, j)] == self[(j, i)]))
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry; zero for exactly symmetric input.
    pub fn relative_asymmetry(&self) -> f64 {
        let scale = self.max_abs().to_f64();
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                let d = (self[(i, j)].clone() - self[(j, i)].clone()).abs().to_f64();
                worst = worst.max(d);
            }
        }
        worst / scale
    }

    /// Averages `a_ij` and `a_ji`.
    pub fn symmetrized(&self) -> Matrix<T> {
        let two = T::one() + T::one();
        Matrix::from_fn(self.rows, self.cols, |i, j| {
            if i == j {
                self[(i, j)].clone()
            } else {
                (self[(i, j)].clone() + self[(j, i)].clone()) / two.clone()
            }
        })
    }

    /// Determinant by Gaussian elimination. Exact backends pivot on the first nonzero entry,
    /// the float backend on the largest magnitude in the column.
    pub fn determinant(&self) -> T {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut det = T::one();
        for k in 0..n {
            let Some(p) = a.choose_pivot(k) else {
                return T::zero();
            };
            if p != k {
                a.swap_rows(p, k);
                det = -det;
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k..n {
                    let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
            }
            det = det * pivot;
        }
        det
    }

    /// Solves `A x = b` by Gaussian elimination with pivoting.
    pub fn solve(&self, b: &[T]) -> Result<Vec<T>> {
        assert!(self.is_square(), "solve with a non-square matrix");
        assert_eq!(b.len(), self.rows);
        let n = self.rows;
        let scale = self.max_abs();
        let mut a = self.clone();
        let mut rhs = b.to_vec();
        for k in 0..n {
            let p = a.choose_pivot(k).ok_or(Error::SingularMatrix)?;
            if T::negligible(&a[(p, k)], &scale, f64::EPSILON * n as f64) {
                return Err(Error::SingularMatrix);
            }
            if p != k {
                a.swap_rows(p, k);
                rhs.swap(p, k);
            }
            let pivot = a[(k, k)].clone();
            for i in k + 1..n {
                if a[(i, k)].is_zero() {
                    continue;
                }
                let factor = a[(i, k)].clone() / pivot.clone();
                for j in k..n {
                    let v = a[(i, j)].clone() - factor.clone() * a[(k, j)].clone();
                    a[(i, j)] = v;
                }
                rhs[i] = rhs[i].clone() - factor * rhs[k].clone();
            }
        }
        let mut x = vec![T::zero(); n];
        for i in (0..n).rev() {
            let mut acc = rhs[i].clone();
            for j in i + 1..n {
                acc = acc - a[(i, j)].clone() * x[j].clone();
            }
            x[i] = acc / a[(i, i)].clone();
        }
        Ok(x)
    }

    fn choose_pivot(&self, k: usize) -> Option<usize> {
        if T::EXACT {
            (k..self.rows).find(|&i| !self[(i, k)].is_zero())
        } else {
            let mut best: Option<(usize, T)> = None;
            for i in k..self.rows {
                let a = self[(i, k)].abs();
                if a.is_zero() {
                    continue;
                }
                match &best {
                    Some((_, b)) if *b >= a => {}
                    _ => best = Some((i, a)),
                }
            }
            best.map(|(i, _)| i)
        }
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;

    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

/// `A = L·D·Lᵀ` with `L` unit lower triangular, computed without pivoting.
///
/// The pivots `d_k` are the ratios of consecutive leading principal minors, so all of them
/// are positive exactly when the matrix is positive definite.
#[derive(Debug, Clone)]
pub struct Ldlt<T> {
    pub l: Matrix<T>,
    pub d: Vec<T>,
}

impl<T: Scalar> Ldlt<T> {
    /// Factors a symmetric matrix. Fails with `NotPositiveDefinite` at the first pivot that is
    /// not positive: exactly `<= 0` for exact scalars, `<= rel_tol * max_diag` for floats.
    pub fn factor(a: &Matrix<T>, rel_tol: f64) -> Result<Self> {
        assert!(a.is_square());
        let n = a.rows();
        let scale = a.max_abs_diagonal();
        let mut l = Matrix::<T>::identity(n);
        let mut d: Vec<T> = Vec::with_capacity(n);
        for j in 0..n {
            let mut dj = a[(j, j)].clone();
            for k in 0..j {
                dj = dj - l[(j, k)].clone() * l[(j, k)].clone() * d[k].clone();
            }
            if dj <= T::zero() || T::negligible(&dj, &scale, rel_tol) {
                return Err(Error::NotPositiveDefinite {
                    order: n,
                    index: j + 1,
                });
            }
            for i in j + 1..n {
                let mut v = a[(i, j)].clone();
                for k in 0..j {
                    v = v - l[(i, k)].clone() * l[(j, k)].clone() * d[k].clone();
                }
                l[(i, j)] = v / dj.clone();
            }
            d.push(dj);
        }
        Ok(Ldlt { l, d })
    }

    pub fn order(&self) -> usize {
        self.d.len()
    }

    /// `L⁻¹ b` by forward substitution.
    pub fn forward(&self, b: &[T]) -> Vec<T> {
        let n = self.order();
        let mut y = b.to_vec();
        for i in 0..n {
            for k in 0..i {
                let v = y[i].clone() - self.l[(i, k)].clone() * y[k].clone();
                y[i] = v;
            }
        }
        y
    }

    /// `L⁻ᵀ y` by back substitution.
    pub fn backward(&self, y: &[T]) -> Vec<T> {
        let n = self.order();
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            for k in i + 1..n {
                let v = x[i].clone() - self.l[(k, i)].clone() * x[k].clone();
                x[i] = v;
            }
        }
        x
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let mut y = self.forward(b);
        for (yi, di) in y.iter_mut().zip(&self.d) {
            *yi = yi.clone() / di.clone();
        }
        self.backward(&y)
    }

    /// Explicit `L⁻¹`.
    pub fn l_inverse(&self) -> Matrix<T> {
        let n = self.order();
        let mut inv = Matrix::<T>::zeros(n, n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = self.forward(&e);
            for (i, v) in col.into_iter().enumerate() {
                inv[(i, j)] = v;
            }
        }
        inv
    }

    pub fn determinant(&self) -> T {
        self.d.iter().fold(T::one(), |acc, d| acc * d.clone())
    }
}

/// Outcome of a definiteness test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Definiteness {
    PositiveDefinite,
    /// Positive semidefinite but singular.
    PositiveSemidefinite,
    /// Negative pivot, or (float backend) a pivot below the relative threshold that cannot
    /// be told apart from rank deficiency.
    Indefinite,
}

/// Definiteness via `L·D·Lᵀ` with symmetric diagonal pivoting.
///
/// Exact backends compare pivots with zero. The float backend calls a pivot positive when it
/// exceeds `PD_REL_TOL` times the largest diagonal entry and zero when its magnitude is below
/// that threshold.
pub fn definiteness<T: Scalar>(a: &Matrix<T>) -> Definiteness {
    assert!(a.is_square());
    let n = a.rows();
    if n == 0 {
        return Definiteness::PositiveDefinite;
    }
    let scale = a.max_abs_diagonal();
    let scale = if scale.is_zero() { a.max_abs() } else { scale };
    let mut w = a.clone();
    let mut order: Vec<usize> = (0..n).collect();
    let mut singular = false;
    for k in 0..n {
        // Largest remaining diagonal entry.
        let mut p = k;
        for i in k + 1..n {
            if w[(order[i], order[i])] > w[(order[p], order[p])] {
                p = i;
            }
        }
        order.swap(k, p);
        let pk = order[k];
        let pivot = w[(pk, pk)].clone();
        let tiny = T::negligible(&pivot, &scale, PD_REL_TOL);
        if pivot < T::zero() && !tiny {
            return Definiteness::Indefinite;
        }
        if pivot <= T::zero() || tiny {
            // The remaining block must vanish for semidefiniteness.
            let rest = &order[k..];
            let all_zero = rest.iter().all(|&i| {
                rest.iter()
                    .all(|&j| T::negligible(&w[(i, j)], &scale, PD_REL_TOL))
            });
            if all_zero {
                singular = true;
                break;
            }
            return Definiteness::Indefinite;
        }
        for &i in &order[k + 1..] {
            let f = w[(i, pk)].clone() / pivot.clone();
            for &j in &order[k + 1..] {
                let v = w[(i, j)].clone() - f.clone() * w[(pk, j)].clone();
                w[(i, j)] = v;
            }
        }
    }
    if singular {
        Definiteness::PositiveSemidefinite
    } else {
        Definiteness::PositiveDefinite
    }
}

/// Leading principal minors `Δ_1, …, Δ_n`, computed from exact elimination when available.
pub fn leading_minors<T: Scalar>(a: &Matrix<T>) -> Vec<T> {
    (1..=a.rows())
        .map(|k| {
            let idx: Vec<usize> = (0..k).collect();
            a.principal(&idx).determinant()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(p: i64, r: i64) -> Rational {
        Rational::new(p.into(), r.into())
    }

    #[test]
    fn determinant_small_cases() {
        let m = Matrix::from_rows(vec![vec![2.0, 1.0], vec![1.0, 3.0]]);
        assert!((m.determinant() - 5.0).abs() < 1e-14);
        let bordered = Matrix::from_rows(vec![
            vec![0.0, 1.0, 0.0],
            vec![1.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert!((bordered.determinant() + 1.0).abs() < 1e-14);
        let z: Matrix<Rational> = Matrix::zeros(3, 3);
        assert_eq!(z.determinant(), Rational::from_i64(0));
    }

    #[test]
    fn exact_hilbert_determinant() {
        let h = Matrix::from_fn(3, 3, |i, j| q(1, (i + j + 1) as i64));
        assert_eq!(h.determinant(), q(1, 2160));
    }

    #[test]
    fn flip_reverses_both_axes() {
        let m = Matrix::from_rows(vec![vec![1.0, 2.0], vec![3.0, 4.0]]);
        assert_eq!(m.flipped().to_rows(), vec![vec![4.0, 3.0], vec![2.0, 1.0]]);
    }

    #[test]
    fn ldlt_solves_and_detects_indefinite() {
        let a = Matrix::from_rows(vec![vec![4.0, 2.0], vec![2.0, 3.0]]);
        let f = Ldlt::factor(&a, 1e-14).unwrap();
        let x = f.solve(&[2.0, 1.0]);
        let r = a.mul_vec(&x);
        assert!((r[0] - 2.0).abs() < 1e-14 && (r[1] - 1.0).abs() < 1e-14);
        assert!((f.determinant() - 8.0).abs() < 1e-13);

        let swap = Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
        assert!(matches!(
            Ldlt::factor(&swap, 0.0),
            Err(Error::NotPositiveDefinite { index: 1, .. })
        ));
    }

    #[test]
    fn l_inverse_is_inverse() {
        let a = Matrix::from_fn(4, 4, |i, j| q(1, (i + j + 1) as i64));
        let f = Ldlt::factor(&a, 0.0).unwrap();
        let prod = f.l_inverse().mul(&f.l);
        assert_eq!(prod, Matrix::identity(4));
    }

    #[test]
    fn definiteness_cases() {
        let pd = Matrix::from_rows(vec![vec![q(1, 1), q(1, 2)], vec![q(1, 2), q(1, 3)]]);
        assert_eq!(definiteness(&pd), Definiteness::PositiveDefinite);
        let psd = Matrix::from_rows(vec![vec![q(1, 1), q(2, 1)], vec![q(2, 1), q(4, 1)]]);
        assert_eq!(definiteness(&psd), Definiteness::PositiveSemidefinite);
        let ind = Matrix::from_rows(vec![vec![q(0, 1), q(1, 1)], vec![q(1, 1), q(0, 1)]]);
        assert_eq!(definiteness(&ind), Definiteness::Indefinite);
        // Zero diagonal with nonzero off-diagonal is caught after pivoting.
        let ind2 = Matrix::from_rows(vec![
            vec![q(1, 1), q(0, 1), q(0, 1)],
            vec![q(0, 1), q(0, 1), q(1, 1)],
            vec![q(0, 1), q(1, 1), q(0, 1)],
        ]);
        assert_eq!(definiteness(&ind2), Definiteness::Indefinite);

        let fpsd = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert_ne!(definiteness(&fpsd), Definiteness::PositiveDefinite);
    }

    #[test]
    fn solve_detects_singularity() {
        let a = Matrix::from_rows(vec![vec![1.0, 2.0], vec![2.0, 4.0]]);
        assert!(matches!(a.solve(&[1.0, 1.0]), Err(Error::SingularMatrix)));
    }

    #[test]
    fn leading_minors_of_hilbert() {
        let h = Matrix::from_fn(2, 2, |i, j| q(1, (i + j + 1) as i64));
        assert_eq!(leading_minors(&h), vec![q(1, 1), q(1, 12)]);
    }
}

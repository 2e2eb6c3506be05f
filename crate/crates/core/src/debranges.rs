//! Polynomials of degree below `N` with the inner product induced by `C^N`.
//!
//! A control `f = (f_0, …, f_{N−1})` represents `F(λ) = Σ_{k=1}^N 𝒯_k(λ) f_{N−k}`, and
//! `[F, G] = (C^N f, g) = Σ s_{n+m} α_n β_m` in monomial coefficients. The reproducing kernel
//! is `K_N(z, λ) = ((C^N)⁻¹ 𝒯(z), 𝒯(λ))` with `𝒯(z) = (𝒯_N(z), …, 𝒯_1(z))`, and
//! `K_z` is the element whose control solves `C^N j^z = 𝒯(z)`.

use serde::Serialize;

use crate::bc_operators::{connecting_operator, ConnectingOperator};
use crate::chebyshev::{cheb_reversed, moments_to_response, LambdaMatrix};
use crate::determinacy::bordered_determinant;
use crate::error::{Error, Result};
use crate::matrix::{dot, Ldlt, Matrix, PD_REL_TOL};
use crate::moments::hankel;
use crate::scalar::{Rational, Scalar};

/// Polynomial of degree at most `N − 1` held in both coordinate systems.
#[derive(Debug, Clone, PartialEq)]
pub struct PolynomialElement<T> {
    control: Vec<T>,
    monomial: Vec<T>,
}

impl<T: Scalar> PolynomialElement<T> {
    /// From `f_0, …, f_{N−1}`.
    pub fn from_control(f: Vec<T>) -> Self {
        assert!(!f.is_empty(), "element needs at least one coefficient");
        let n = f.len();
        let reversed: Vec<T> = f.iter().rev().cloned().collect();
        // α = Λᵀ J f.
        let lambda = LambdaMatrix::new(n).to_matrix::<T>();
        let monomial = lambda.transpose().mul_vec(&reversed);
        PolynomialElement {
            control: f,
            monomial,
        }
    }

    /// From `α_0 + α_1 λ + … + α_{N−1} λ^{N−1}`.
    pub fn from_monomial(alpha: Vec<T>) -> Self {
        assert!(!alpha.is_empty(), "element needs at least one coefficient");
        let n = alpha.len();
        // Solve Λᵀ y = α by back substitution (Λᵀ is upper unitriangular), then f = J y.
        let lambda = LambdaMatrix::new(n);
        let mut y = alpha.clone();
        for i in (0..n).rev() {
            for k in i + 1..n {
                let e = T::from_bigint(lambda.entry(k, i));
                if !e.is_zero() {
                    y[i] = y[i].clone() - e * y[k].clone();
                }
            }
        }
        y.reverse();
        PolynomialElement {
            control: y,
            monomial: alpha,
        }
    }

    pub fn order(&self) -> usize {
        self.control.len()
    }

    pub fn control(&self) -> &[T] {
        &self.control
    }

    pub fn monomial(&self) -> &[T] {
        &self.monomial
    }

    /// Same polynomial in a space of higher order.
    pub fn padded(&self, order: usize) -> Self {
        assert!(order >= self.order());
        let mut alpha = self.monomial.clone();
        alpha.resize(order, T::zero());
        Self::from_monomial(alpha)
    }

    pub fn evaluate(&self, x: &T) -> T {
        self.monomial
            .iter()
            .rev()
            .fold(T::zero(), |acc, a| acc * x.clone() + a.clone())
    }
}

/// Solves `C^N j^z = (𝒯_N(z), …, 𝒯_1(z))`.
///
/// Float input is solved exactly and rounded once.
pub fn krein_control<T: Scalar>(c: &ConnectingOperator<T>, z: &T) -> Result<Vec<T>> {
    let ldlt = Ldlt::factor(&c.entries, PD_REL_TOL)?;
    if T::EXACT {
        return Ok(ldlt.solve(&cheb_reversed(c.order, z)));
    }
    let exact = Ldlt::factor(&c.entries.map(|x| x.to_rational()), PD_REL_TOL)?;
    let rhs = cheb_reversed(c.order, &z.to_rational());
    Ok(exact.solve(&rhs).iter().map(T::from_rational).collect())
}

/// `(C f, g)`; float input is evaluated exactly and rounded once.
fn gram_form<T: Scalar>(c: &Matrix<T>, f: &[T], g: &[T]) -> T {
    if T::EXACT {
        return dot(&c.mul_vec(f), g);
    }
    let exact = |v: &[T]| v.iter().map(Scalar::to_rational).collect::<Vec<Rational>>();
    let cq = c.map(|x| x.to_rational());
    T::from_rational(&dot(&cq.mul_vec(&exact(f)), &exact(g)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelForm {
    Bilinear,
    Determinant,
}

fn connecting_from_moments<T: Scalar>(s: &[T], order: usize) -> Result<ConnectingOperator<T>> {
    if order == 0 {
        return Err(Error::InvalidInput("order must be positive".into()));
    }
    let needed = 2 * order - 1;
    if s.len() < needed {
        return Err(Error::InsufficientMoments {
            required: needed,
            available: s.len(),
        });
    }
    connecting_operator(&moments_to_response(&s[..needed]).values, order)
}

fn powers<T: Scalar>(x: &T, n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n);
    let mut p = T::one();
    for _ in 0..n {
        out.push(p.clone());
        p = p * x.clone();
    }
    out
}

/// The bordered determinant `det [[0, v(z)ᵀ], [v(λ), S_0]] / det S_0` with
/// `v(x) = (1, x, …, x^{N−1})`, before any sign correction.
fn bordered_kernel<T: Scalar>(s: &[T], order: usize, z: &T, lambda: &T) -> Result<T> {
    let s0 = hankel(s, 0, order)?;
    let det = s0.determinant();
    if det.is_zero() || !det.is_finite() {
        return Err(Error::SingularHankel { order });
    }
    Ok(bordered_determinant(&s0, &powers(z, order), &powers(lambda, order)) / det)
}

/// Sign that turns the bordered determinant into the kernel, fixed by agreement with the
/// bilinear form at `z = λ = 0` (where the kernel equals `(S_0⁻¹)_{11}`).
pub fn determinant_form_sign<T: Scalar>(s: &[T], order: usize) -> Result<T> {
    let raw = bordered_kernel(s, order, &T::zero(), &T::zero())?;
    let s0 = hankel(s, 0, order)?;
    let mut e = vec![T::zero(); order];
    e[0] = T::one();
    let reference = s0.solve(&e)?[0].clone();
    let agree = (raw < T::zero()) == (reference < T::zero());
    Ok(if agree { T::one() } else { -T::one() })
}

/// `K_N(z, λ)` in either form.
pub fn reproducing_kernel<T: Scalar>(
    s: &[T],
    order: usize,
    z: &T,
    lambda: &T,
    form: KernelForm,
) -> Result<T> {
    match form {
        KernelForm::Bilinear => {
            let c = connecting_from_moments(s, order)?;
            let j = krein_control(&c, z)?;
            Ok(dot(&j, &cheb_reversed(order, lambda)))
        }
        KernelForm::Determinant => {
            let sign = determinant_form_sign(s, order)?;
            Ok(sign * bordered_kernel(s, order, z, lambda)?)
        }
    }
}

/// Kernel diagonal `K_N(λ, λ) = Σ φ_k(λ)²` and the Christoffel function `κ_N = 1/K_N(λ, λ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Christoffel<T> {
    pub kernel_diagonal: T,
    pub kappa: T,
}

pub fn christoffel<T: Scalar>(s: &[T], order: usize, lambda: &T) -> Result<Christoffel<T>> {
    let k = reproducing_kernel(s, order, lambda, lambda, KernelForm::Bilinear)?;
    Ok(Christoffel {
        kappa: T::one() / k.clone(),
        kernel_diagonal: k,
    })
}

/// `[F, G]`, computed both as `(C^N f, g)` and as the Hankel form `αᵀ S_0 β`.
pub fn scalar_product<T: Scalar>(
    f: &PolynomialElement<T>,
    g: &PolynomialElement<T>,
    s: &[T],
) -> Result<T> {
    let n = f.order().max(g.order());
    let (f, g) = (f.padded(n), g.padded(n));
    let c = connecting_from_moments(s, n)?.entries;
    let control = gram_form(&c, f.control(), g.control());
    let s0: Matrix<T> = hankel(s, 0, n)?;
    let monomial = dot(&s0.mul_vec(f.monomial()), g.monomial());
    let scale = s0
        .map(|x| x.abs())
        .mul_vec(&f.monomial().iter().map(|x| x.abs()).collect::<Vec<_>>())
        .iter()
        .zip(g.monomial())
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.abs());
    let diff = control.clone() - monomial;
    if !T::negligible(&diff, &scale, 1e-9) {
        return Err(Error::CrossCheck {
            what: "control and monomial scalar products",
            discrepancy: diff.to_f64(),
        });
    }
    Ok(control)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    fn q(v: &[i64]) -> Vec<Rational> {
        v.iter().map(|&x| Rational::from_i64(x)).collect()
    }

    #[test]
    fn basis_conversion_roundtrip() {
        let f = PolynomialElement::from_control(q(&[2, -1, 3, 5]));
        // F = 2𝒯_4 − 𝒯_3 + 3𝒯_2 + 5𝒯_1 = 2(λ³−2λ) − (λ²−1) + 3λ + 5.
        assert_eq!(f.monomial(), &q(&[6, -1, -1, 2])[..]);
        let back = PolynomialElement::from_monomial(f.monomial().to_vec());
        assert_eq!(back.control(), f.control());
        let x = Rational::new(3.into(), 7.into());
        let direct = cheb_reversed(4, &x)
            .iter()
            .zip(f.control())
            .fold(Rational::from_i64(0), |a, (t, c)| a + t * c);
        assert_eq!(f.evaluate(&x), direct);
    }

    #[test]
    fn krein_examples() {
        let c = connecting_operator(&[1.0, 0.0, 0.0], 2).unwrap();
        assert_eq!(krein_control(&c, &0.7).unwrap(), vec![0.7, 1.0]);
        let c = connecting_operator(&[4.0], 1).unwrap();
        assert_eq!(krein_control(&c, &3.0).unwrap(), vec![0.25]);
    }

    #[test]
    fn kernel_examples() {
        let s = [1.0, 0.0, 1.0, 0.0];
        for (z, l) in [(0.0, 0.0), (0.5, -2.0), (3.0, 1.5)] {
            let k = reproducing_kernel(&s, 2, &z, &l, KernelForm::Bilinear).unwrap();
            assert!((k - (z * l + 1.0)).abs() < 1e-15);
            let d = reproducing_kernel(&s, 2, &z, &l, KernelForm::Determinant).unwrap();
            assert!((d - k).abs() < 1e-14);
        }
        assert_eq!(
            reproducing_kernel(&[4.0], 1, &1.0, &2.0, KernelForm::Bilinear).unwrap(),
            0.25
        );
        let c = christoffel(&s, 2, &0.0).unwrap();
        assert_eq!((c.kernel_diagonal, c.kappa), (1.0, 1.0));
        let c = christoffel(&s, 2, &1.0).unwrap();
        assert_eq!((c.kernel_diagonal, c.kappa), (2.0, 0.5));
        assert_eq!(christoffel(&[3.0], 1, &9.0).unwrap().kappa, 3.0);
    }

    #[test]
    fn determinant_form_needs_the_corrected_sign() {
        let s = q(&[2, 1, 3, 1, 7]);
        assert_eq!(
            determinant_form_sign(&s, 3).unwrap(),
            Rational::from_i64(-1)
        );
        let (z, l) = (Rational::new(1.into(), 3.into()), Rational::from_i64(-2));
        assert_eq!(
            reproducing_kernel(&s, 3, &z, &l, KernelForm::Bilinear).unwrap(),
            reproducing_kernel(&s, 3, &z, &l, KernelForm::Determinant).unwrap()
        );
        assert_eq!(
            reproducing_kernel(&q(&[1, 2, 4]), 2, &z, &l, KernelForm::Determinant),
            Err(Error::SingularHankel { order: 2 })
        );
    }

    #[test]
    fn scalar_product_examples() {
        let s = [1.0, 0.0, 1.0, 0.0, 1.0];
        let one = PolynomialElement::from_monomial(vec![1.0]);
        let lam = PolynomialElement::from_monomial(vec![0.0, 1.0]);
        assert_eq!(scalar_product(&one, &one, &[5.0]).unwrap(), 5.0);
        assert_eq!(scalar_product(&one, &lam, &s).unwrap(), 0.0);
        assert_eq!(scalar_product(&lam, &lam, &s).unwrap(), 1.0);
    }

    #[test]
    fn reproducing_property_exact() {
        // Moments of unit masses at -1, 0, 1, 2, 3.
        let s = q(&[5, 5, 15, 35, 99, 275, 795]);
        let n = 4;
        let c = connecting_from_moments(&s, n).unwrap();
        let z = Rational::new((-5).into(), 4.into());
        let kz = PolynomialElement::from_control(krein_control(&c, &z).unwrap());
        let f = PolynomialElement::from_monomial(q(&[1, -2, 0, 7]));
        assert_eq!(scalar_product(&kz, &f, &s).unwrap(), f.evaluate(&z));
    }
}

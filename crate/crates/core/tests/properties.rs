use momentbc::bc_operators::{companion_operator, connecting_operator, hankel_congruence};
use momentbc::chebyshev::{moments_to_response, response_to_moments};
use momentbc::debranges::{reproducing_kernel, scalar_product, KernelForm, PolynomialElement};
use momentbc::determinacy::{
    hamburger_report, interleaving_determinants, inverse_bilinear_form, stieltjes_report,
};
use momentbc::jacobi_sim::{simulate, Control, JacobiCoefficients};
use momentbc::recovery::{moments_of_measure, DiscreteMeasure};
use momentbc::{Matrix, Rational, Scalar};
use proptest::prelude::*;

fn q(p: i64, r: i64) -> Rational {
    Rational::new(p.into(), r.into())
}

/// Measure with `n` distinct atoms `k/4` drawn from `lo..hi` and small positive weights.
fn measure(lo: i64, hi: i64, max_atoms: usize) -> impl Strategy<Value = DiscreteMeasure<Rational>> {
    (
        proptest::collection::btree_set(lo..hi, 1..=max_atoms),
        proptest::collection::vec(1i64..6, max_atoms),
    )
        .prop_map(|(atoms, weights)| {
            let atoms: Vec<Rational> = atoms.into_iter().map(|a| q(a, 4)).collect();
            let weights = weights[..atoms.len()].iter().map(|&w| q(w, 3)).collect();
            DiscreteMeasure::new(atoms, weights).unwrap()
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transforms_are_inverse(s in proptest::collection::vec(-50i64..50, 1..16)) {
        let s: Vec<Rational> = s.into_iter().map(|v| q(v, 7)).collect();
        let r = moments_to_response(&s).values;
        prop_assert_eq!(response_to_moments(&r), s);
    }

    #[test]
    fn operators_factor_through_hankel_blocks(s in proptest::collection::vec(-20i64..20, 12)) {
        let s: Vec<Rational> = s.into_iter().map(|v| q(v, 3)).collect();
        let r = moments_to_response(&s).values;
        for n in 1..=6 {
            prop_assert_eq!(connecting_operator(&r, n).unwrap().entries, hankel_congruence(&s, 0, n).unwrap());
            prop_assert_eq!(companion_operator(&r, n).unwrap().entries, hankel_congruence(&s, 1, n).unwrap());
        }
    }

    #[test]
    fn bordered_identity(entries in proptest::collection::vec(-1.0f64..1.0, 36), n in 1usize..=6,
                         h in proptest::collection::vec(-1.0f64..1.0, 6),
                         c in proptest::collection::vec(-1.0f64..1.0, 6)) {
        let a = Matrix::from_fn(n, n, |i, j| entries[6 * i + j]);
        let d = a.mul(&a.transpose()).add(&Matrix::from_fn(n, n, |i, j| if i == j { 0.5 } else { 0.0 }));
        let form = inverse_bilinear_form(&d, &h[..n], &c[..n]).unwrap();
        let scale = form.determinant.abs() * (form.value.abs() + 1.0);
        prop_assert!((form.bordered + form.determinant * form.value).abs() <= 1e-10 * scale);
    }

    #[test]
    fn scalar_product_is_basis_independent(mu in measure(-12, 12, 6),
                                           f in proptest::collection::vec(-9i64..9, 1..6),
                                           g in proptest::collection::vec(-9i64..9, 1..6)) {
        let s = moments_of_measure(&mu, 12);
        let f = PolynomialElement::from_monomial(f.into_iter().map(|v| q(v, 2)).collect());
        let g = PolynomialElement::from_monomial(g.into_iter().map(|v| q(v, 2)).collect());
        let n = f.order().max(g.order());
        prop_assume!(mu.len() >= n);
        let expected: Rational = mu.atoms().iter().zip(mu.weights())
            .map(|(x, w)| w.clone() * f.evaluate(x) * g.evaluate(x))
            .fold(q(0, 1), |a, b| a + b);
        prop_assert_eq!(scalar_product(&f, &g, &s).unwrap(), expected);
    }

    #[test]
    fn kernel_forms_agree_and_diagonal_grows(mu in measure(-12, 12, 7), z in -8i64..8, l in -8i64..8) {
        let s = moments_of_measure(&mu, 14);
        let (z, l) = (q(z, 3), q(l, 3));
        let mut previous = q(0, 1);
        for n in 1..=mu.len() {
            let bil = reproducing_kernel(&s, n, &z, &l, KernelForm::Bilinear).unwrap();
            let det = reproducing_kernel(&s, n, &z, &l, KernelForm::Determinant).unwrap();
            prop_assert_eq!(&bil, &det);
            let diag = reproducing_kernel(&s, n, &q(0, 1), &q(0, 1), KernelForm::Bilinear).unwrap();
            prop_assert!(diag >= previous);
            previous = diag;
        }
    }

    #[test]
    fn hamburger_forms_match_ratios(mu in measure(-12, 12, 6)) {
        let s = moments_of_measure(&mu, 2 * mu.len());
        let rep = hamburger_report(&s, mu.len()).unwrap();
        prop_assert!(rep.q1_monotone && rep.second_monotone);
        prop_assert!(rep.rows.iter().all(|r| r.forms_match_ratios));
    }

    #[test]
    fn stieltjes_mass_and_length_grow(mu in measure(1, 30, 6)) {
        let s = moments_of_measure(&mu, 2 * mu.len());
        let rep = stieltjes_report(&s, mu.len()).unwrap();
        prop_assert!(rep.q1_monotone && rep.second_monotone);
        prop_assert!(rep.rows.iter().all(|r| r.forms_match_ratios && r.second <= q(0, 1)));
    }

    #[test]
    fn interleaving_determinants_factor(mu in measure(1, 30, 5)) {
        let s = moments_of_measure(&mu, 2 * mu.len());
        for t in 1..=mu.len() {
            let d = interleaving_determinants(&s, t).unwrap();
            prop_assert_eq!(d.hamburger.clone(), d.product());
        }
    }

    #[test]
    fn waves_travel_one_site_per_step(a in proptest::collection::vec(1i64..9, 0..7),
                                      b in proptest::collection::vec(-5i64..5, 7),
                                      f in proptest::collection::vec(-5i64..5, 1..10),
                                      dirichlet in any::<bool>()) {
        let n = a.len() + 1;
        let j = JacobiCoefficients::new(
            a.into_iter().map(|v| q(v, 4)).collect(),
            b[..n].iter().map(|&v| q(v, 2)).collect(),
        ).unwrap();
        let horizon = 2 * n + 1;
        let field = simulate(&j, &Control::Values(f.into_iter().map(|v| q(v, 1)).collect()), horizon, dirichlet);
        for site in 1..=field.sites {
            for t in -1..=(site as isize - 1).min(horizon as isize) {
                prop_assert_eq!(field.get(site, t).to_f64(), 0.0);
            }
        }
    }
}

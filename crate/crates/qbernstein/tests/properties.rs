//! Property tests for the structural invariants the rest of the crate
//! leans on: ring axioms for scalars and free polynomials, the adjoint
//! involution, text round trips, the partition lattice order, rewrite
//! confluence on monomials, and exact univariate root extraction.

use proptest::prelude::*;
use qbernstein::algebra::{monomial_reduce, FreePolynomial};
use qbernstein::coeff::{rat, Rat, Scalar};
use qbernstein::cumulant::{cumulants_from_moments, moments_from_cumulants, DistributionSpec};
use qbernstein::kernel::{preset_presentation, PresetKind};
use qbernstein::nc::{enumerate_nc, SetPartition};
use qbernstein::univar::UniPoly;

fn arb_rat() -> impl Strategy<Value = Rat> {
    (-20i64..=20, 1i64..=12).prop_map(|(n, d)| rat(n, d))
}

fn arb_scalar() -> impl Strategy<Value = Scalar> {
    let params = prop_oneof![Just(None), Just(Some("a")), Just(Some("k{3,1}"))];
    proptest::collection::vec((arb_rat(), params), 0..3).prop_map(|terms| {
        let mut acc = Scalar::zero();
        for (value, param) in terms {
            let term = match param {
                None => Scalar::from_rat(value),
                Some(name) => Scalar::param(name).unwrap().mul_rat(&value),
            };
            acc = acc.add(&term);
        }
        acc
    })
}

/// Random polynomials on the 2 x 2 grid with up to four short terms.
fn arb_poly() -> impl Strategy<Value = FreePolynomial> {
    let letter = (1u8..=2, 1u8..=2);
    let term = (proptest::collection::vec(letter, 0..=3), arb_scalar());
    proptest::collection::vec(term, 0..=4).prop_map(|terms| {
        let mut acc = FreePolynomial::zero(2);
        for (letters, coeff) in terms {
            let word = FreePolynomial::word(2, &letters).unwrap();
            acc = acc.add(&word.scale(&coeff)).unwrap();
        }
        acc
    })
}

/// A random non-crossing partition of `n` points, `3 <= n <= 6`.
fn arb_nc() -> impl Strategy<Value = SetPartition> {
    (3usize..=6)
        .prop_flat_map(|n| {
            let lattice = enumerate_nc(n).unwrap();
            (0..lattice.len()).prop_map(move |k| lattice[k].clone())
        })
}

proptest! {
    #[test]
    fn scalar_ring_axioms(a in arb_scalar(), b in arb_scalar(), c in arb_scalar()) {
        prop_assert_eq!(a.add(&b), b.add(&a));
        prop_assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert!(a.add(&a.neg()).is_zero());
        prop_assert_eq!(a.mul(&Scalar::one()), a.clone());
        prop_assert_eq!(a.add(&Scalar::zero()), a);
    }

    #[test]
    fn polynomial_ring_axioms(p in arb_poly(), q in arb_poly(), r in arb_poly()) {
        prop_assert_eq!(p.add(&q).unwrap(), q.add(&p).unwrap());
        prop_assert_eq!(
            p.add(&q).unwrap().add(&r).unwrap(),
            p.add(&q.add(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.mul(&q).unwrap().mul(&r).unwrap(),
            p.mul(&q.mul(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.mul(&q.add(&r).unwrap()).unwrap(),
            p.mul(&q).unwrap().add(&p.mul(&r).unwrap()).unwrap()
        );
        prop_assert_eq!(
            p.add(&q).unwrap().mul(&r).unwrap(),
            p.mul(&r).unwrap().add(&q.mul(&r).unwrap()).unwrap()
        );
    }

    #[test]
    fn adjoint_is_an_involutive_antihomomorphism(p in arb_poly(), q in arb_poly()) {
        prop_assert_eq!(p.adjoint().adjoint(), p.clone());
        prop_assert_eq!(
            p.add(&q).unwrap().adjoint(),
            p.adjoint().add(&q.adjoint()).unwrap()
        );
        prop_assert_eq!(
            p.mul(&q).unwrap().adjoint(),
            q.adjoint().mul(&p.adjoint()).unwrap()
        );
    }

    #[test]
    fn rendered_polynomials_parse_back(p in arb_poly()) {
        let text = p.to_string();
        let back = FreePolynomial::parse(2, &text).unwrap();
        prop_assert_eq!(back, p);
    }

    #[test]
    fn refinement_is_a_partial_order(pi in arb_nc(), sigma in arb_nc(), tau in arb_nc()) {
        prop_assert!(pi.refines(&pi).unwrap());
        let bottom = SetPartition::discrete(pi.n());
        let top = SetPartition::full(pi.n());
        prop_assert!(bottom.refines(&pi).unwrap());
        prop_assert!(pi.refines(&top).unwrap());
        if pi.n() == sigma.n() {
            if pi != sigma && pi.refines(&sigma).unwrap() {
                prop_assert!(!sigma.refines(&pi).unwrap());
            }
            if sigma.n() == tau.n()
                && pi.refines(&sigma).unwrap()
                && sigma.refines(&tau).unwrap()
            {
                prop_assert!(pi.refines(&tau).unwrap());
            }
        }
    }

    #[test]
    fn block_lists_round_trip(pi in arb_nc()) {
        let rebuilt = SetPartition::from_blocks(pi.n(), &pi.blocks()).unwrap();
        prop_assert_eq!(rebuilt, pi);
    }

    #[test]
    fn monomial_reduction_is_idempotent_and_complete(p in arb_poly()) {
        let presentation = preset_presentation(PresetKind::HPlus, 2).unwrap();
        let rules = presentation.rules();
        let once = monomial_reduce(&p, rules).unwrap();
        let twice = monomial_reduce(&once, rules).unwrap();
        prop_assert_eq!(&twice, &once);
        // Completeness: no term of the normal form still contains a window.
        for (word, _) in once.terms() {
            let letters = word.letters();
            for l in 0..letters.len().saturating_sub(1) {
                for rule in rules {
                    let pattern = rule.pattern();
                    prop_assert!(
                        !(pattern[0] == letters[l] && pattern[1] == letters[l + 1]),
                        "normal form still contains a rewrite window"
                    );
                }
            }
        }
    }

    #[test]
    fn division_reconstructs_the_dividend(
        a in proptest::collection::vec(-9i64..=9, 0..=6),
        b in proptest::collection::vec(-9i64..=9, 1..=4),
    ) {
        let dividend = UniPoly::from_int_coeffs(&a);
        let divisor = UniPoly::from_int_coeffs(&b);
        prop_assume!(!divisor.is_zero());
        let (q, r) = dividend.divmod(&divisor).unwrap();
        prop_assert_eq!(divisor.mul(&q).add(&r), dividend.clone());
        if let Some(r_deg) = r.degree() {
            prop_assert!(r_deg < divisor.degree().unwrap());
        }
        let g = dividend.gcd(&divisor);
        if !g.is_zero() {
            let (_, rem_a) = dividend.divmod(&g).unwrap();
            let (_, rem_b) = divisor.divmod(&g).unwrap();
            prop_assert!(rem_a.is_zero());
            prop_assert!(rem_b.is_zero());
        }
    }

    #[test]
    fn products_of_distinct_linear_factors_return_their_roots(
        roots in proptest::collection::btree_set(-12i64..=12, 1..=3)
    ) {
        let mut poly = UniPoly::from_int_coeffs(&[1]);
        for &root in &roots {
            poly = poly.mul(&UniPoly::from_int_coeffs(&[-root, 1]));
        }
        let found = poly.real_roots_exact().unwrap();
        let expected: Vec<Rat> = roots.iter().map(|&r| rat(r, 1)).collect();
        prop_assert_eq!(found, expected);
    }

    #[test]
    fn moment_cumulant_transforms_invert_each_other(
        kappa in proptest::collection::vec(arb_rat(), 2..=6)
    ) {
        let spec = DistributionSpec::new(
            kappa.iter().map(|v| Scalar::from_rat(v.clone())).collect()
        ).unwrap();
        let order = spec.order();
        let moments = moments_from_cumulants(&spec, order).unwrap();
        let back = cumulants_from_moments(&moments).unwrap();
        for n in 1..=order {
            prop_assert_eq!(spec.kappa(n).unwrap(), back.kappa(n).unwrap());
        }
    }
}

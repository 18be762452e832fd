use super::*;
use crate::algebra::RatMatrix;
use crate::coeff::{rat_int, Scalar};
use crate::univar::UniPoly;

fn poly(d: u8, text: &str) -> FreePolynomial {
    FreePolynomial::parse(d, text).expect("test polynomial parses")
}

fn unipoly(coeffs: &[i64]) -> UniPoly {
    UniPoly::from_int_coeffs(coeffs)
}

fn one_triple(session: &Session, d: u8, left: &str, name: &str, right: &str) -> (FreePolynomial, usize, FreePolynomial) {
    (
        poly(d, left),
        session.fact_named(name).expect("relation fact"),
        poly(d, right),
    )
}

#[test]
fn preset_relation_and_rule_counts_are_pinned() {
    let oplus2 = preset_presentation(PresetKind::OPlus, 2).unwrap();
    assert_eq!(oplus2.relations().len(), 8);
    assert_eq!(oplus2.rules().len(), 0);
    assert_eq!(oplus2.contraction_set().len(), 4);

    let hplus2 = preset_presentation(PresetKind::HPlus, 2).unwrap();
    assert_eq!(hplus2.relations().len(), 12);
    assert_eq!(
        hplus2
            .relations()
            .iter()
            .filter(|(n, _)| n.contains("annih"))
            .count(),
        4
    );
    assert_eq!(hplus2.rules().len(), 8);

    let ominus3 = preset_presentation(PresetKind::OMinusOne, 3).unwrap();
    assert_eq!(ominus3.relations().len(), 18 + 18 + 18);
    assert_eq!(
        ominus3
            .relations()
            .iter()
            .filter(|(n, _)| n.starts_with("acom"))
            .count(),
        18
    );
    assert_eq!(
        ominus3
            .relations()
            .iter()
            .filter(|(n, _)| n.starts_with("com["))
            .count(),
        18
    );
    assert_eq!(ominus3.rules().len(), 36);

    assert!(matches!(
        preset_presentation(PresetKind::OPlus, 1),
        Err(KernelError::PresetTooSmall(1))
    ));
}

#[test]
fn preset_rules_are_justified_and_unjustified_rules_are_rejected() {
    // The preset constructors validate every rule against the relations;
    // building them at several sizes exercises that path.
    for kind in [PresetKind::OPlus, PresetKind::HPlus, PresetKind::OMinusOne] {
        for d in 2..=3 {
            preset_presentation(kind, d).unwrap();
        }
    }

    let relations = vec![("norm".to_string(), poly(2, "u[1,1] u[1,1] + u[1,2] u[1,2] - 1"))];
    let rogue = RewriteRule::annihilate([Generator::new(1, 1), Generator::new(1, 2)]);
    let err = Presentation::new(2, relations, vec![rogue], Default::default()).unwrap_err();
    assert!(matches!(err, KernelError::RuleNotJustified(_)));
}

#[test]
fn certificates_derive_facts_and_failures_carry_residuals() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let before = session.facts().len();

    // row_norm[1] * u[1,1] expands to u11^3 + u12^2 u11 - u11.
    let target = poly(2, "u[1,1] u[1,1] u[1,1] + u[1,2] u[1,2] u[1,1] - u[1,1]");
    let cert = Certificate::new(
        target.clone(),
        vec![one_triple(&session, 2, "1", "row_norm[1]", "u[1,1]")],
    );
    let index = session.check_certificate(&cert).unwrap();
    assert_eq!(index, before);
    assert_eq!(session.find_fact(&target), Some(index));
    assert_eq!(
        session.fact(index).unwrap().provenance(),
        &Provenance::Derived {
            rule: "certificate".into(),
            inputs: vec![session.fact_named("row_norm[1]").unwrap()],
        }
    );

    // A wrong target leaves a nonzero residual, is logged, and derives nothing.
    let wrong = Certificate::new(
        poly(2, "u[1,1]"),
        vec![one_triple(&session, 2, "1", "row_norm[1]", "u[1,1]")],
    );
    let err = session.check_certificate(&wrong).unwrap_err();
    let KernelError::CertificateInvalid { residual } = err else {
        panic!("expected invalid certificate, got {err:?}");
    };
    assert!(!residual.is_empty());
    assert!(session.find_fact(&poly(2, "u[1,1]")).is_none());
    assert!(matches!(
        session.log().last(),
        Some(LogEntry::CheckCertificate {
            outcome: crate::kernel::transcript::StepRepr::Failed { .. },
            ..
        })
    ));

    assert!(matches!(
        session.check_certificate(&Certificate::new(FreePolynomial::zero(2), vec![])),
        Err(KernelError::TrivialTarget)
    ));
    assert!(matches!(
        session.check_certificate(&Certificate::new(
            poly(2, "u[1,1]"),
            vec![(poly(2, "1"), 99, poly(2, "1"))],
        )),
        Err(KernelError::BadFactIndex(99))
    ));
}

#[test]
fn certificate_acceptance_is_stable_under_fact_permutation() {
    let f1 = poly(2, "u[1,1] u[2,2]");
    let f2 = poly(2, "u[1,2] u[2,1]");
    let target = f1.add(&f2).unwrap();

    let mut forward = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let a1 = forward.add_assumed_fact(f1.clone()).unwrap().index().unwrap();
    let a2 = forward.add_assumed_fact(f2.clone()).unwrap().index().unwrap();

    let mut backward = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let b2 = backward.add_assumed_fact(f2.clone()).unwrap().index().unwrap();
    let b1 = backward.add_assumed_fact(f1.clone()).unwrap().index().unwrap();

    let unit = FreePolynomial::one(2);
    for (session, i1, i2) in [(&mut forward, a1, a2), (&mut backward, b1, b2)] {
        let cert = Certificate::new(
            target.clone(),
            vec![
                (unit.clone(), i1, unit.clone()),
                (unit.clone(), i2, unit.clone()),
            ],
        );
        session.check_certificate(&cert).unwrap();
        assert!(session.find_fact(&target).is_some());
    }
}

#[test]
fn assumed_facts_deduplicate_and_reject_zero() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    assert_eq!(
        session.add_assumed_fact(FreePolynomial::zero(2)).unwrap(),
        AddOutcome::RejectedZero
    );
    let p = poly(2, "u[1,1] u[2,2] - u[2,2] u[1,1]");
    let first = session.add_assumed_fact(p.clone()).unwrap();
    let AddOutcome::Added(index) = first else {
        panic!("expected a fresh fact");
    };
    assert_eq!(
        session.add_assumed_fact(p).unwrap(),
        AddOutcome::Duplicate(index)
    );
    // Re-adding a preset relation is also a duplicate.
    let norm = session.presentation().relation_named("row_norm[1]").unwrap().clone();
    assert_eq!(
        session.add_assumed_fact(norm).unwrap(),
        AddOutcome::Duplicate(session.fact_named("row_norm[1]").unwrap())
    );
}

#[test]
fn inverted_parameters_require_a_nonzero_declaration() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let p = poly(2, "k{4,1}^-1 * u[1,1]");
    let err = session.add_assumed_fact(p.clone()).unwrap_err();
    assert!(matches!(err, KernelError::UndeclaredInverse(name) if name == "k{4,1}"));

    session.declare_nonzero(crate::coeff::Param::new("k{4,1}").unwrap());
    session.add_assumed_fact(p).unwrap();
}

#[test]
fn adjoint_facts_reverse_words_and_deduplicate_symmetric_facts() {
    let mut session = Session::new(preset_presentation(PresetKind::HPlus, 2).unwrap());
    let annih = session.fact_named("row_annih[1;1,2]").unwrap();
    let reversed = session.adjoint_fact(annih).unwrap();
    assert_eq!(
        session.fact(reversed).unwrap().poly(),
        &poly(2, "u[1,2] u[1,1]")
    );
    // row_norm[1] is self-adjoint, so its adjoint lands on itself.
    let norm = session.fact_named("row_norm[1]").unwrap();
    assert_eq!(session.adjoint_fact(norm).unwrap(), norm);
}

/// The even-case inner step at d = 2: assuming the mixed-column fact
/// `sum_i u[i,2]^2 u[i,1]^2`, the norms certify that
/// `sum_i (u[i,1]^2 - u[i,1]^4)` vanishes, and splitting that sum of
/// positives yields `(1 - u[i,1]^2) u[i,1]` for each row.
#[test]
fn positivity_split_derives_each_summand() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let mixed = session
        .add_assumed_fact(poly(
            2,
            "u[1,2] u[1,2] u[1,1] u[1,1] + u[2,2] u[2,2] u[2,1] u[2,1]",
        ))
        .unwrap()
        .index()
        .unwrap();

    let target = poly(
        2,
        "u[1,1] u[1,1] + u[2,1] u[2,1] - u[1,1] u[1,1] u[1,1] u[1,1] - u[2,1] u[2,1] u[2,1] u[2,1]",
    );
    let witness = Certificate::new(
        target,
        vec![
            (poly(2, "1"), mixed, poly(2, "1")),
            one_triple(&session, 2, "-1", "row_norm[1]", "u[1,1] u[1,1]"),
            one_triple(&session, 2, "-1", "row_norm[2]", "u[2,1] u[2,1]"),
        ],
    );
    let decomposition = vec![
        (
            poly(2, "u[1,1]"),
            PositiveForm::UnitMinusSquare(Generator::new(1, 1)),
        ),
        (
            poly(2, "u[2,1]"),
            PositiveForm::UnitMinusSquare(Generator::new(2, 1)),
        ),
    ];
    let indices = session.positivity_split(&decomposition, &witness).unwrap();
    assert_eq!(indices.len(), 2);
    assert_eq!(
        session.fact(indices[0]).unwrap().poly(),
        &poly(2, "u[1,1] - u[1,1] u[1,1] u[1,1]")
    );
    assert_eq!(
        session.fact(indices[1]).unwrap().poly(),
        &poly(2, "u[2,1] - u[2,1] u[2,1] u[2,1]")
    );

    // A witness whose target is not the positive sum is rejected.
    let bogus = Certificate::new(poly(2, "u[1,1]"), vec![]);
    assert!(matches!(
        session.positivity_split(&decomposition, &bogus),
        Err(KernelError::WitnessMismatch { .. })
    ));
}

#[test]
fn positivity_split_requires_contraction_membership() {
    // A handmade presentation whose contraction set is empty.
    let presentation = Presentation::new(
        2,
        vec![("zero[1]".into(), poly(2, "u[1,1] u[1,1]"))],
        vec![],
        Default::default(),
    )
    .unwrap();
    let mut session = Session::new(presentation);
    let decomposition = vec![(
        FreePolynomial::one(2),
        PositiveForm::UnitMinusSquare(Generator::new(1, 1)),
    )];
    let witness = Certificate::new(poly(2, "1 - u[1,1] u[1,1]"), vec![]);
    assert!(matches!(
        session.positivity_split(&decomposition, &witness),
        Err(KernelError::NotContraction(1, 1))
    ));
}

#[test]
fn star_cancel_requires_the_exact_product_witness() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let p = poly(2, "u[1,1] + u[1,2]");
    let pp_star = p.mul(&p.adjoint()).unwrap();
    let assumed = session
        .add_assumed_fact(pp_star.clone())
        .unwrap()
        .index()
        .unwrap();

    let wrong = Certificate::new(p.clone(), vec![(poly(2, "1"), assumed, poly(2, "1"))]);
    assert!(matches!(
        session.star_cancel(&p, &wrong),
        Err(KernelError::WitnessMismatch { .. })
    ));

    let witness = Certificate::new(pp_star, vec![(poly(2, "1"), assumed, poly(2, "1"))]);
    let index = session.star_cancel(&p, &witness).unwrap();
    assert_eq!(session.fact(index).unwrap().poly(), &p);
}

#[test]
fn spectral_shrink_confines_the_spectrum_to_certified_roots() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let g = Generator::new(1, 1);
    // Assume the cube fact u - u^3 directly; its real roots are -1, 0, 1.
    let cube = poly(2, "u[1,1] - u[1,1] u[1,1] u[1,1]");
    let assumed = session.add_assumed_fact(cube.clone()).unwrap().index().unwrap();
    let witness = Certificate::new(cube, vec![(poly(2, "1"), assumed, poly(2, "1"))]);

    let p = unipoly(&[0, 1, 0, -1]);
    // t^2 - t^4 vanishes on {-1, 0, 1}.
    let q = unipoly(&[0, 0, 1, 0, -1]);
    let index = session.spectral_shrink(g, &p, &q, &witness).unwrap();
    assert_eq!(
        session.fact(index).unwrap().poly(),
        &poly(2, "u[1,1] u[1,1] - u[1,1] u[1,1] u[1,1] u[1,1]")
    );

    // t - t^2 misses the root -1.
    let bad = unipoly(&[0, 1, -1]);
    assert!(matches!(
        session.spectral_shrink(g, &p, &bad, &witness),
        Err(KernelError::RootNotContained { root }) if root == "-1"
    ));

    // t^2 - 2 has irrational roots, which the root finder refuses to locate.
    let irrational = unipoly(&[-2, 0, 1]);
    let sq = poly(2, "u[1,1] u[1,1] - 2");
    let sq_assumed = session.add_assumed_fact(sq.clone()).unwrap().index().unwrap();
    let sq_witness = Certificate::new(sq, vec![(poly(2, "1"), sq_assumed, poly(2, "1"))]);
    assert!(matches!(
        session.spectral_shrink(g, &irrational, &q, &sq_witness),
        Err(KernelError::Univar(crate::univar::UnivarError::PossiblyIrrational { count: 2 }))
    ));
}

#[test]
fn spectral_shrink_with_no_real_roots_accepts_any_containment() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let g = Generator::new(1, 1);
    let no_roots = poly(2, "u[1,1] u[1,1] + 1");
    let assumed = session.add_assumed_fact(no_roots.clone()).unwrap().index().unwrap();
    let witness = Certificate::new(no_roots, vec![(poly(2, "1"), assumed, poly(2, "1"))]);
    // t^2 + 1 has no real roots, so the containment is vacuous and even a
    // root-free target like t - 5 is accepted.
    let p = unipoly(&[1, 0, 1]);
    let q = unipoly(&[-5, 1]);
    let index = session.spectral_shrink(g, &p, &q, &witness).unwrap();
    assert_eq!(session.fact(index).unwrap().poly(), &poly(2, "u[1,1] - 5"));
}

#[test]
fn search_finds_small_ideal_members_and_certificates_replay() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let target = poly(2, "u[1,1] u[1,1] u[1,1] + u[1,2] u[1,2] u[1,1] - u[1,1]");
    let outcome = session.search_membership(&target, 3).unwrap();
    let SearchOutcome::Member(certificate) = outcome else {
        panic!("expected membership, got {outcome:?}");
    };
    assert_eq!(certificate.target, target);

    // The extracted certificate is replayable in a fresh session.
    let mut fresh = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let index = fresh.check_certificate(&certificate).unwrap();
    assert_eq!(fresh.fact(index).unwrap().poly(), &target);
}

#[test]
fn search_distinguishes_inconclusive_from_resource_exhaustion() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    // A single generator is not in the relation ideal at any bound; the
    // bounded search reports only that its span missed the target.
    let lone = poly(2, "u[1,1]");
    assert!(matches!(
        session.search_membership(&lone, 3).unwrap(),
        SearchOutcome::Inconclusive { .. }
    ));

    assert!(matches!(
        session.search_membership(&lone, 12),
        Err(KernelError::ResourceCap { .. })
    ));

    let cubic = poly(2, "u[1,1] u[1,1] u[1,1]");
    assert!(matches!(
        session.search_membership(&cubic, 2),
        Err(KernelError::DegreeBound { degree: 3, bound: 2 })
    ));
}

#[test]
fn search_uses_assumed_facts() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    session
        .add_assumed_fact(poly(2, "u[1,1] u[2,2] - u[2,2] u[1,1]"))
        .unwrap();
    // u11 u22 u11 - u22 u11 u11 = (u11 u22 - u22 u11) u11.
    let target = poly(2, "u[1,1] u[2,2] u[1,1] - u[2,2] u[1,1] u[1,1]");
    let outcome = session.search_membership(&target, 3).unwrap();
    assert!(matches!(outcome, SearchOutcome::Member(_)));
}

#[test]
fn transcripts_round_trip_replay_and_hash_deterministically() {
    let build = || -> Session {
        let mut session = Session::new(preset_presentation(PresetKind::HPlus, 2).unwrap());
        session.declare_nonzero(crate::coeff::Param::new("k{4,1}").unwrap());
        session
            .add_assumed_fact(poly(2, "k{4,1}^-1 * u[1,1] u[2,2]"))
            .unwrap();
        let annih = session.fact_named("row_annih[1;1,2]").unwrap();
        session.adjoint_fact(annih).unwrap();

        let target = poly(2, "u[1,1] u[1,1] u[1,1] + u[1,2] u[1,2] u[1,1] - u[1,1]");
        let cert = Certificate::new(
            target,
            vec![one_triple(&session, 2, "1", "row_norm[1]", "u[1,1]")],
        );
        session.check_certificate(&cert).unwrap();

        // One failed certificate, kept in the log.
        let bad = Certificate::new(
            poly(2, "u[2,2]"),
            vec![one_triple(&session, 2, "1", "row_norm[1]", "1")],
        );
        session.check_certificate(&bad).unwrap_err();

        // One member search and one inconclusive search.
        let member_target = poly(2, "u[1,1] u[1,1] + u[1,2] u[1,2] - 1");
        assert!(matches!(
            session.search_membership(&member_target, 2).unwrap(),
            SearchOutcome::Member(_)
        ));
        assert!(matches!(
            session.search_membership(&poly(2, "u[2,1]"), 2).unwrap(),
            SearchOutcome::Inconclusive { .. }
        ));

        let cube = poly(2, "u[1,1] - u[1,1] u[1,1] u[1,1]");
        let assumed = session.add_assumed_fact(cube.clone()).unwrap().index().unwrap();
        let witness = Certificate::new(cube, vec![(poly(2, "1"), assumed, poly(2, "1"))]);
        session
            .spectral_shrink(
                Generator::new(1, 1),
                &unipoly(&[0, 1, 0, -1]),
                &unipoly(&[0, 0, 1, 0, -1]),
                &witness,
            )
            .unwrap();
        session
    };

    let session = build();
    let transcript = session.transcript();

    // Serialization round-trips exactly.
    let bytes = transcript.canonical_bytes();
    let parsed = Transcript::from_bytes(&bytes).unwrap();
    assert_eq!(parsed, transcript);

    // The hash depends only on content.
    assert_eq!(transcript.content_hash(), build().transcript().content_hash());

    // Replay rebuilds the identical fact store and log.
    let replayed = replay(&transcript).unwrap();
    assert!(same_fact_store(&session, &replayed));
    assert_eq!(replayed.log(), session.log());
    assert_eq!(replayed.transcript().content_hash(), transcript.content_hash());

    // Tampering with a stored outcome makes replay diverge.
    let mut tampered = transcript.clone();
    let mut changed = false;
    for entry in &mut tampered.entries {
        if let LogEntry::AdjointFact { index, .. } = entry {
            *index += 1;
            changed = true;
        }
    }
    assert!(changed);
    assert!(matches!(
        replay(&tampered),
        Err(KernelError::ReplayDivergence(_))
    ));
}

#[test]
fn transcripts_write_hash_named_files() {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    session
        .add_assumed_fact(poly(2, "u[1,1] u[2,2]"))
        .unwrap();
    let transcript = session.transcript();
    let dir = std::env::temp_dir().join(format!("qbernstein-test-{}", std::process::id()));
    let path = transcript.write_to_dir(&dir).unwrap();
    assert_eq!(
        path.file_name().unwrap().to_str().unwrap(),
        format!("{}.json", transcript.content_hash())
    );
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(Transcript::from_bytes(&bytes).unwrap(), transcript);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn fact_stores_evaluate_to_zero_on_signed_permutations() {
    // A 1 x 1 signed-permutation assignment models all three presets.
    let mut assignment = std::collections::BTreeMap::new();
    for (i, j, v) in [(1, 1, 0), (1, 2, 1), (2, 1, -1), (2, 2, 0)] {
        assignment.insert(
            Generator::new(i, j),
            RatMatrix::from_int_rows(&[vec![v]]).unwrap(),
        );
    }
    let params = std::collections::BTreeMap::new();
    for kind in [PresetKind::OPlus, PresetKind::HPlus, PresetKind::OMinusOne] {
        let session = Session::new(preset_presentation(kind, 2).unwrap());
        assert_eq!(session.eval_all_facts(&assignment, &params).unwrap(), None);
    }

    // An all-ones assignment violates orthogonality and is caught.
    let mut ones = std::collections::BTreeMap::new();
    for i in 1..=2 {
        for j in 1..=2 {
            ones.insert(Generator::new(i, j), RatMatrix::from_int_rows(&[vec![1]]).unwrap());
        }
    }
    let session = Session::new(preset_presentation(PresetKind::OPlus, 2).unwrap());
    let hit = session.eval_all_facts(&ones, &params).unwrap();
    assert!(hit.is_some());
}

#[test]
fn polynomials_in_one_generator_expand_correctly() {
    let p = unipoly(&[2, 0, -3, 1]);
    let expanded = poly_of_generator(2, Generator::new(2, 1), &p).unwrap();
    assert_eq!(
        expanded,
        poly(2, "u[2,1] u[2,1] u[2,1] - 3 u[2,1] u[2,1] + 2")
    );
    let scalar_only = poly_of_generator(2, Generator::new(1, 1), &unipoly(&[7])).unwrap();
    assert_eq!(scalar_only, FreePolynomial::scalar(2, Scalar::from_rat(rat_int(7))));
}

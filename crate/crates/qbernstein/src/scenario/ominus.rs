//! Non-triviality probes for the sign-twisted orthogonal presentation.
//!
//! Three probes:
//!
//! * (a) adding commutators for the anticommuting pairs collapses each
//!   shared-row and shared-column product to zero — `2ab = {a,b} + [a,b]`
//!   — recovering the pair-annihilation relations, so the commutative
//!   points of the twisted presentation satisfy the hyperoctahedral ones;
//! * (b) the pair-annihilation monomial `u[1,1]u[1,2]` is **not** a
//!   consequence of the twisted relations: a bounded membership search
//!   finds no certificate and, at `d = 3`, an explicit 16-dimensional
//!   exact representation satisfies every relation while sending the
//!   monomial to a nonzero matrix, refuting membership outright;
//! * (c) a bounded search for disjoint-entry commutators inside the
//!   hyperoctahedral presentation, recording member or inconclusive per
//!   pair with nothing asserted either way.
//!
//! Probe (b) is a designed refutation, so a run of this scenario exits
//! nonzero at `d = 3`.
//!
//! The representation behind (b): three pairwise anticommuting symmetric
//! involutions `e_1, e_2, e_3` (a Pauli-style triple over the rationals),
//! a second copy `f_j`, and a rational orthogonal matrix `A`; the
//! assignment `u[i,j] = A_ij * (e_i (x) f_j)` satisfies the norms and
//! orthogonality because `A` does, anticommutation because the `e_i` and
//! `f_j` do, and disjoint commutation because the two signs cancel.

use super::report::{CaseReport, Report};
use super::{derive_expect, finish_report, named_fact, seal_session, ScenarioContext, ScenarioError};
use crate::algebra::{eval_matrix, FreePolynomial, Generator, RatMatrix};
use crate::coeff::rat;
use crate::kernel::{preset_presentation, KernelError, PresetKind, SearchOutcome, Session};
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

/// Runs the three probes.
pub fn scenario_o_minus_one(
    d: u8,
    degree_bound: usize,
    ctx: &ScenarioContext,
) -> Result<Report, ScenarioError> {
    if d < 3 {
        return Err(ScenarioError::BadParameter(format!(
            "the non-triviality probes need d >= 3, got {d}"
        )));
    }
    let started = Instant::now();
    let mut cases = Vec::new();

    let (commute_session, mut commute_cases) = classical_points_probe(d)?;
    let commute_hash = seal_session(&commute_session, ctx, "ominus-commute")?;
    for case in &mut commute_cases {
        case.transcript_hash = Some(commute_hash.clone());
    }
    cases.extend(commute_cases);

    let (membership_session, mut membership_case) = membership_probe(d, degree_bound)?;
    let membership_hash = seal_session(&membership_session, ctx, "ominus-membership")?;
    membership_case.transcript_hash = Some(membership_hash);
    cases.push(membership_case);

    let (chain_session, mut chain_cases) = commutator_search_probe(d, degree_bound)?;
    let chain_hash = seal_session(&chain_session, ctx, "ominus-chain")?;
    for case in &mut chain_cases {
        case.transcript_hash = Some(chain_hash.clone());
    }
    cases.extend(chain_cases);

    Ok(finish_report(
        "ominus",
        vec![
            ("d", d.to_string()),
            ("degree-bound", degree_bound.to_string()),
            ("seed", ctx.seed.to_string()),
        ],
        cases,
        started,
    ))
}

/// Probe (a): anticommutator plus commutator halves to the plain product.
fn classical_points_probe(d: u8) -> Result<(Session, Vec<CaseReport>), ScenarioError> {
    let mut session = Session::new(preset_presentation(PresetKind::OMinusOne, d)?);
    let one = FreePolynomial::one(d);
    let half = one.scale_rat(&rat(1, 2));

    // Assume commutators for the shared-index pairs; the disjoint pairs
    // already commute by presentation relation.
    let mut row_commutator: BTreeMap<(u8, u8, u8), usize> = BTreeMap::new();
    let mut col_commutator: BTreeMap<(u8, u8, u8), usize> = BTreeMap::new();
    for i in 1..=d {
        for j1 in 1..=d {
            for j2 in (j1 + 1)..=d {
                let poly = FreePolynomial::word(d, &[(i, j1), (i, j2)])?
                    .sub(&FreePolynomial::word(d, &[(i, j2), (i, j1)])?)?;
                let index = session
                    .add_assumed_fact(poly)?
                    .index()
                    .ok_or_else(|| ScenarioError::Drift("commutator is zero".into()))?;
                row_commutator.insert((i, j1, j2), index);
            }
        }
    }
    for j in 1..=d {
        for i1 in 1..=d {
            for i2 in (i1 + 1)..=d {
                let poly = FreePolynomial::word(d, &[(i1, j), (i2, j)])?
                    .sub(&FreePolynomial::word(d, &[(i2, j), (i1, j)])?)?;
                let index = session
                    .add_assumed_fact(poly)?
                    .index()
                    .ok_or_else(|| ScenarioError::Drift("commutator is zero".into()))?;
                col_commutator.insert((j, i1, i2), index);
            }
        }
    }

    let mut cases = Vec::new();
    for i in 1..=d {
        for j1 in 1..=d {
            for j2 in 1..=d {
                if j1 == j2 {
                    continue;
                }
                let (lo, hi) = (j1.min(j2), j1.max(j2));
                let acom = named_fact(&session, &format!("acom_row[{i};{lo},{hi}]"))?;
                let sign = if j1 < j2 { half.clone() } else { half.neg() };
                let expect = FreePolynomial::word(d, &[(i, j1), (i, j2)])?;
                derive_expect(
                    &mut session,
                    vec![
                        (half.clone(), acom, one.clone()),
                        (sign, row_commutator[&(i, lo, hi)], one.clone()),
                    ],
                    &expect,
                    "shared-row product",
                )?;
                cases.push(CaseReport::verified(
                    format!("classical row-pair[{i};{j1},{j2}]"),
                    None,
                ));
            }
        }
    }
    for j in 1..=d {
        for i1 in 1..=d {
            for i2 in 1..=d {
                if i1 == i2 {
                    continue;
                }
                let (lo, hi) = (i1.min(i2), i1.max(i2));
                let acom = named_fact(&session, &format!("acom_col[{j};{lo},{hi}]"))?;
                let sign = if i1 < i2 { half.clone() } else { half.neg() };
                let expect = FreePolynomial::word(d, &[(i1, j), (i2, j)])?;
                derive_expect(
                    &mut session,
                    vec![
                        (half.clone(), acom, one.clone()),
                        (sign, col_commutator[&(j, lo, hi)], one.clone()),
                    ],
                    &expect,
                    "shared-column product",
                )?;
                cases.push(CaseReport::verified(
                    format!("classical col-pair[{j};{i1},{i2}]"),
                    None,
                ));
            }
        }
    }
    Ok((session, cases))
}

/// Probe (b): bounded search plus the exact representation witness.
fn membership_probe(d: u8, degree_bound: usize) -> Result<(Session, CaseReport), ScenarioError> {
    let mut session = Session::new(preset_presentation(PresetKind::OMinusOne, d)?);
    let target = FreePolynomial::word(d, &[(1, 1), (1, 2)])?;
    let search_note = match session.search_membership(&target, degree_bound) {
        Ok(SearchOutcome::Member(certificate)) => {
            // A certificate would contradict the representation below; verify
            // it so the contradiction is loud rather than silent.
            session.check_certificate(&certificate)?;
            "search unexpectedly produced a certificate".to_string()
        }
        Ok(SearchOutcome::Inconclusive { rows }) => {
            format!("membership search spanned {rows} rows at degree {degree_bound} without a certificate")
        }
        Err(KernelError::ResourceCap { rows, cap }) => {
            format!("membership search hit the resource cap ({rows} rows over {cap})")
        }
        Err(other) => return Err(other.into()),
    };

    if d != 3 {
        let case = CaseReport::inconclusive(
            "hplus-membership",
            format!("{search_note}; the representation witness is implemented for d = 3"),
            None,
        );
        return Ok((session, case));
    }

    let assignment = anticommuting_model()?;
    let no_params = BTreeMap::new();
    if let Some((index, _)) = session.eval_all_facts(&assignment, &no_params)? {
        return Err(ScenarioError::Soundness(format!(
            "the representation violates relation fact {index}"
        )));
    }
    let value = eval_matrix(&target, &assignment, &no_params, &BTreeSet::new())?;
    if value.is_zero() {
        return Err(ScenarioError::Drift(
            "the representation sends the probe monomial to zero".into(),
        ));
    }
    let case = CaseReport::refuted(
        "hplus-membership",
        format!(
            "u[1,1]u[1,2] evaluates to a nonzero 16x16 matrix in an exact representation \
             satisfying every relation, so it is not a consequence of them; {search_note}"
        ),
        None,
    );
    Ok((session, case))
}

/// Three pairwise anticommuting symmetric involutions over the rationals.
fn involution_triple() -> Result<[RatMatrix; 3], ScenarioError> {
    let x = RatMatrix::from_int_rows(&[vec![0, 1], vec![1, 0]])?;
    let z = RatMatrix::from_int_rows(&[vec![1, 0], vec![0, -1]])?;
    let id = RatMatrix::identity(2);
    Ok([x.kron(&id), z.kron(&x), z.kron(&z)])
}

/// The `d = 3` assignment `u[i,j] = A_ij * (e_i (x) f_j)` with `A` a
/// rational rotation.
fn anticommuting_model() -> Result<BTreeMap<Generator, RatMatrix>, ScenarioError> {
    let e = involution_triple()?;
    let f = involution_triple()?;
    let a = [
        [rat(3, 5), rat(4, 5), rat(0, 1)],
        [rat(-4, 5), rat(3, 5), rat(0, 1)],
        [rat(0, 1), rat(0, 1), rat(1, 1)],
    ];
    let mut assignment = BTreeMap::new();
    for i in 0..3 {
        for j in 0..3 {
            assignment.insert(
                Generator::new(i as u8 + 1, j as u8 + 1),
                e[i].kron(&f[j]).scale(&a[i][j]),
            );
        }
    }
    Ok(assignment)
}

/// Probe (c): bounded searches for disjoint commutators, outcome recorded.
fn commutator_search_probe(
    d: u8,
    degree_bound: usize,
) -> Result<(Session, Vec<CaseReport>), ScenarioError> {
    let mut session = Session::new(preset_presentation(PresetKind::HPlus, d)?);
    let mut cases = Vec::new();
    for i in 1..=d {
        for i2 in (i + 1)..=d {
            for j in 1..=d {
                for j2 in 1..=d {
                    if j2 == j {
                        continue;
                    }
                    let key = format!("hplus-commutator[{i},{j};{i2},{j2}]");
                    let target = FreePolynomial::word(d, &[(i, j), (i2, j2)])?
                        .sub(&FreePolynomial::word(d, &[(i2, j2), (i, j)])?)?;
                    match session.search_membership(&target, degree_bound) {
                        Ok(SearchOutcome::Member(certificate)) => {
                            session.check_certificate(&certificate)?;
                            cases.push(CaseReport::verified(key, None));
                        }
                        Ok(SearchOutcome::Inconclusive { rows }) => {
                            cases.push(CaseReport::inconclusive(
                                key,
                                format!(
                                    "no certificate within degree {degree_bound} ({rows} rows spanned)"
                                ),
                                None,
                            ));
                        }
                        Err(KernelError::ResourceCap { rows, cap }) => {
                            cases.push(CaseReport::inconclusive(
                                key,
                                format!("resource cap: {rows} rows over the cap of {cap}"),
                                None,
                            ));
                        }
                        Err(other) => return Err(other.into()),
                    }
                }
            }
        }
    }
    Ok((session, cases))
}

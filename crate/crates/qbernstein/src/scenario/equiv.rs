//! Equivalence of the cube relation and the pair-annihilation relation
//! over the orthogonal core, plus a negative control.
//!
//! Direction one: assuming `u_{ij} u_{i'j} = 0` for distinct rows (and the
//! row-mirrored pairs), the square of each column norm collapses to
//! `sum_i (u_{ij}^2 - u_{ij}^4)`, a conjugated positive sum that splits
//! into `u = u^3` per entry.
//!
//! Direction two: assuming `u = u^3` everywhere, conjugating a norm by a
//! squared entry isolates `sum_{i != k} u_{kj}^2 u_{ij}^2 u_{kj}^2`, a sum
//! of squares that splits into `u_{ij} u_{kj}^2 = 0`; cancelling the star
//! square recovers `u_{ij} u_{kj} = 0` for every ordered pair, in both the
//! column and the row direction.
//!
//! Negative control: dropping the norm relations from the presentation
//! makes the first direction's certificate fail — the missing norm is
//! reported as the residual, and the control case is expected to be
//! refuted. A run of this scenario therefore exits nonzero by design.

use super::report::{CaseReport, Report};
use super::{
    derive, finish_report, named_fact, poly_sum, quote, seal_session, upow, ScenarioContext,
    ScenarioError,
};
use crate::algebra::{FreePolynomial, Generator};
use crate::kernel::{
    preset_presentation, Certificate, KernelError, PositiveForm, Presentation, PresetKind, Session,
};
use std::collections::BTreeMap;
use std::time::Instant;

/// Runs both directions and the negative control.
pub fn scenario_relation_equivalence(
    d: u8,
    ctx: &ScenarioContext,
) -> Result<Report, ScenarioError> {
    let started = Instant::now();
    let mut cases = Vec::new();

    let (forward_session, mut forward_cases) = forward_direction(d, ctx)?;
    let forward_hash = seal_session(&forward_session, ctx, "equiv-forward")?;
    for case in &mut forward_cases {
        case.transcript_hash = Some(forward_hash.clone());
    }
    cases.extend(forward_cases);

    let (backward_session, mut backward_cases) = backward_direction(d, ctx)?;
    let backward_hash = seal_session(&backward_session, ctx, "equiv-backward")?;
    for case in &mut backward_cases {
        case.transcript_hash = Some(backward_hash.clone());
    }
    cases.extend(backward_cases);

    let (control_session, mut control_case) = negative_control(d)?;
    let control_hash = seal_session(&control_session, ctx, "equiv-control")?;
    control_case.transcript_hash = Some(control_hash);
    cases.push(control_case);

    Ok(finish_report(
        "equiv",
        vec![("d", d.to_string()), ("seed", ctx.seed.to_string())],
        cases,
        started,
    ))
}

/// Assumes the annihilation relations on the orthogonal core; one fact per
/// ordered pair of distinct rows within a column, adjoints included.
fn assume_column_annihilation(
    session: &mut Session,
    d: u8,
) -> Result<BTreeMap<(u8, u8, u8), usize>, ScenarioError> {
    let mut annihilation = BTreeMap::new();
    for j in 1..=d {
        for i in 1..=d {
            for i2 in (i + 1)..=d {
                let word = FreePolynomial::word(d, &[(i, j), (i2, j)])?;
                let index = session
                    .add_assumed_fact(word)?
                    .index()
                    .ok_or_else(|| ScenarioError::Drift("annihilation fact is zero".into()))?;
                annihilation.insert((i, i2, j), index);
                let mirrored = session.adjoint_fact(index)?;
                annihilation.insert((i2, i, j), mirrored);
            }
        }
    }
    Ok(annihilation)
}

/// Direction one: annihilation implies the cube relation.
fn forward_direction(
    d: u8,
    _ctx: &ScenarioContext,
) -> Result<(Session, Vec<CaseReport>), ScenarioError> {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, d)?);
    let annihilation = assume_column_annihilation(&mut session, d)?;
    let one = FreePolynomial::one(d);
    let mut cases = Vec::new();

    for j in 1..=d {
        let result = (|| -> Result<(), ScenarioError> {
            // -col_norm[j] * (sum_i u_{ij}^2) plus the cross terms
            // u_{ij} (u_{ij} u_{i'j}) u_{i'j} equals sum_i (u^2 - u^4).
            let squares = poly_sum(
                d,
                (1..=d).map(|i| upow(d, i, j, 2)).collect::<Result<Vec<_>, _>>()?,
            )?;
            let mut triples = vec![(
                one.neg(),
                named_fact(&session, &format!("col_norm[{j}]"))?,
                squares,
            )];
            for i in 1..=d {
                for i2 in 1..=d {
                    if i2 != i {
                        triples.push((
                            FreePolynomial::generator(d, i, j)?,
                            annihilation[&(i, i2, j)],
                            FreePolynomial::generator(d, i2, j)?,
                        ));
                    }
                }
            }
            let (positive_idx, _) = derive(&mut session, triples)?;
            let terms: Vec<(FreePolynomial, PositiveForm)> = (1..=d)
                .map(|i| {
                    Ok((
                        FreePolynomial::generator(d, i, j)?,
                        PositiveForm::UnitMinusSquare(Generator::new(i, j)),
                    ))
                })
                .collect::<Result<_, ScenarioError>>()?;
            session.positivity_split(&terms, &quote(&session, positive_idx)?)?;
            Ok(())
        })();
        match result {
            Ok(()) => {
                for i in 1..=d {
                    cases.push(CaseReport::verified(format!("cube[{i},{j}]"), None));
                }
            }
            Err(ScenarioError::Kernel(err)) => {
                for i in 1..=d {
                    cases.push(CaseReport::refuted(
                        format!("cube[{i},{j}]"),
                        err.to_string(),
                        None,
                    ));
                }
            }
            Err(other) => return Err(other),
        }
    }
    Ok((session, cases))
}

/// Direction two: the cube relation implies annihilation, rows and columns.
fn backward_direction(
    d: u8,
    _ctx: &ScenarioContext,
) -> Result<(Session, Vec<CaseReport>), ScenarioError> {
    let mut session = Session::new(preset_presentation(PresetKind::OPlus, d)?);
    let one = FreePolynomial::one(d);

    let mut cube: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    for i in 1..=d {
        for j in 1..=d {
            let poly = FreePolynomial::generator(d, i, j)?.sub(&upow(d, i, j, 3)?)?;
            let index = session
                .add_assumed_fact(poly)?
                .index()
                .ok_or_else(|| ScenarioError::Drift("cube fact is zero".into()))?;
            cube.insert((i, j), index);
        }
    }

    let mut cases = Vec::new();
    // Column direction: for a pivot entry (k, j), every other row's entry
    // in column j annihilates against it.
    for j in 1..=d {
        for k in 1..=d {
            let result = (|| -> Result<(), ScenarioError> {
                let norm = named_fact(&session, &format!("col_norm[{j}]"))?;
                let (sum_idx, _) = derive(
                    &mut session,
                    vec![
                        (upow(d, k, j, 2)?, norm, upow(d, k, j, 2)?),
                        (upow(d, k, j, 3)?, cube[&(k, j)], one.clone()),
                    ],
                )?;
                let others: Vec<u8> = (1..=d).filter(|&i| i != k).collect();
                let terms: Vec<(FreePolynomial, PositiveForm)> = others
                    .iter()
                    .map(|&i| Ok((upow(d, k, j, 2)?, PositiveForm::Square(Generator::new(i, j)))))
                    .collect::<Result<_, ScenarioError>>()?;
                let split = session.positivity_split(&terms, &quote(&session, sum_idx)?)?;
                for (&i, half_idx) in others.iter().zip(split) {
                    let target = FreePolynomial::word(d, &[(i, j), (k, j)])?;
                    let expansion = target.mul(&target.adjoint())?;
                    let witness = Certificate::new(
                        expansion,
                        vec![(one.clone(), half_idx, FreePolynomial::generator(d, i, j)?)],
                    );
                    session.star_cancel(&target, &witness)?;
                }
                Ok(())
            })();
            push_annihilation_cases(&mut cases, result, "col-annih", j, k, d)?;
        }
    }
    // Row direction: same derivation against the row norms.
    for i in 1..=d {
        for k in 1..=d {
            let result = (|| -> Result<(), ScenarioError> {
                let norm = named_fact(&session, &format!("row_norm[{i}]"))?;
                let (sum_idx, _) = derive(
                    &mut session,
                    vec![
                        (upow(d, i, k, 2)?, norm, upow(d, i, k, 2)?),
                        (upow(d, i, k, 3)?, cube[&(i, k)], one.clone()),
                    ],
                )?;
                let others: Vec<u8> = (1..=d).filter(|&j| j != k).collect();
                let terms: Vec<(FreePolynomial, PositiveForm)> = others
                    .iter()
                    .map(|&j| Ok((upow(d, i, k, 2)?, PositiveForm::Square(Generator::new(i, j)))))
                    .collect::<Result<_, ScenarioError>>()?;
                let split = session.positivity_split(&terms, &quote(&session, sum_idx)?)?;
                for (&j, half_idx) in others.iter().zip(split) {
                    let target = FreePolynomial::word(d, &[(i, j), (i, k)])?;
                    let expansion = target.mul(&target.adjoint())?;
                    let witness = Certificate::new(
                        expansion,
                        vec![(one.clone(), half_idx, FreePolynomial::generator(d, i, j)?)],
                    );
                    session.star_cancel(&target, &witness)?;
                }
                Ok(())
            })();
            push_annihilation_cases(&mut cases, result, "row-annih", i, k, d)?;
        }
    }
    Ok((session, cases))
}

/// One case per non-pivot index for a pivot derivation.
fn push_annihilation_cases(
    cases: &mut Vec<CaseReport>,
    result: Result<(), ScenarioError>,
    label: &str,
    fixed: u8,
    pivot: u8,
    d: u8,
) -> Result<(), ScenarioError> {
    match result {
        Ok(()) => {
            for other in (1..=d).filter(|&x| x != pivot) {
                cases.push(CaseReport::verified(
                    format!("{label}[{fixed};{other},{pivot}]"),
                    None,
                ));
            }
            Ok(())
        }
        Err(ScenarioError::Kernel(err)) => {
            for other in (1..=d).filter(|&x| x != pivot) {
                cases.push(CaseReport::refuted(
                    format!("{label}[{fixed};{other},{pivot}]"),
                    err.to_string(),
                    None,
                ));
            }
            Ok(())
        }
        Err(other) => Err(other),
    }
}

/// The control: without norm relations the forward certificate must fail,
/// and its residual names exactly the missing norm combination.
fn negative_control(d: u8) -> Result<(Session, CaseReport), ScenarioError> {
    let mut relations = Vec::new();
    for a in 1..=d {
        for b in 1..=d {
            if a == b {
                continue;
            }
            let row = poly_sum(
                d,
                (1..=d)
                    .map(|k| FreePolynomial::word(d, &[(a, k), (b, k)]))
                    .collect::<Result<Vec<_>, _>>()?,
            )?;
            relations.push((format!("row_ortho[{a},{b}]"), row));
            let col = poly_sum(
                d,
                (1..=d)
                    .map(|k| FreePolynomial::word(d, &[(k, a), (k, b)]))
                    .collect::<Result<Vec<_>, _>>()?,
            )?;
            relations.push((format!("col_ortho[{a},{b}]"), col));
        }
    }
    let presentation = Presentation::new(d, relations, Vec::new(), BTreeMap::new())?;
    let mut session = Session::new(presentation);
    let annihilation = assume_column_annihilation(&mut session, d)?;

    // The forward target for column 1 with the only triples available.
    let j = 1u8;
    let target = poly_sum(
        d,
        (1..=d)
            .map(|i| Ok(upow(d, i, j, 2)?.sub(&upow(d, i, j, 4)?)?))
            .collect::<Result<Vec<_>, ScenarioError>>()?,
    )?;
    let mut triples = Vec::new();
    for i in 1..=d {
        for i2 in 1..=d {
            if i2 != i {
                triples.push((
                    FreePolynomial::generator(d, i, j)?,
                    annihilation[&(i, i2, j)],
                    FreePolynomial::generator(d, i2, j)?,
                ));
            }
        }
    }
    let case = match session.check_certificate(&Certificate::new(target, triples)) {
        Err(KernelError::CertificateInvalid { residual }) => CaseReport::refuted(
            "negative-control",
            format!("without the norm relations the cube derivation fails; residual: {residual}"),
            None,
        ),
        Err(other) => return Err(other.into()),
        Ok(_) => {
            return Err(ScenarioError::Soundness(
                "certificate verified without the norm relations".into(),
            ))
        }
    };
    Ok((session, case))
}

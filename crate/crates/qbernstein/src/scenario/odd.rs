//! Odd-order projection chain over the free orthogonal presentation.
//!
//! For an odd order `n >= 3`, assume the mixed freeness constraints
//! `sum_i u_{ij} u_{ij'}^2 u_{iv_1}^2 ... u_{iv_m}^2` with `m = (n-3)/2`
//! middle indices, the order-`n` cumulant declared nonzero. The chain:
//!
//! 1. telescope the middle indices away against the row norms, leaving
//!    `B_{j,j'} = sum_i u_{ij} u_{ij'}^2` for every ordered pair;
//! 2. sum over `j' != j` to get `C_j = sum_i (u_{ij} - u_{ij}^3)`;
//! 3. square: `B*B` expands the two-row sum, and summing it over `j != j'`
//!    against norms and orthogonality leaves
//!    `sum_i u_{ij'}^4 - (sum_i u_{ij'}^3)^2`;
//! 4. eliminate the square via `C_j'`, leaving
//!    `sum_i (u^4 - u^2) - sum_{i != i'} u_{ij'} u_{i'j'}` per column;
//! 5. sum over all columns: the cross terms assemble into orthogonality
//!    relations, leaving `sum_{i,j} (u^2 - u^4)`, the conjugated positive
//!    sum `sum u (1 - u^2) u`;
//! 6. positivity split to `u - u^3` per entry, spectral step to `u^2 = u^4`.

use super::report::{CaseReport, Report};
use super::{
    derive, finish_report, identical_rotation, index_tuples, named_fact, poly_sum, power_gap,
    quote, seal_session, upow, ScenarioContext, ScenarioError,
};
use crate::algebra::{FreePolynomial, Generator};
use crate::coeff::Param;
use crate::kernel::{preset_presentation, PositiveForm, PresetKind, Session};
use crate::opval::{freeness_constraints, OpWord};
use std::collections::BTreeMap;
use std::time::Instant;

/// Runs the odd-order chain and reports one case per matrix entry.
pub fn scenario_odd(d: u8, n: usize, ctx: &ScenarioContext) -> Result<Report, ScenarioError> {
    if n < 3 || n % 2 == 0 {
        return Err(ScenarioError::BadParameter(format!(
            "the odd chain needs an odd order n >= 3, got {n}"
        )));
    }
    let started = Instant::now();
    let presentation = preset_presentation(PresetKind::OPlus, d)?;
    let mut session = Session::new(presentation.clone());
    session.declare_nonzero(Param::new(&format!("k{{{n},1}}"))?);
    let family = identical_rotation(presentation, n)?;
    let m = (n - 3) / 2;

    // Assumed constraints: one per ordered pair (j, j') and middle tuple v.
    let mut level: BTreeMap<(u8, u8, Vec<u8>), usize> = BTreeMap::new();
    for j in 1..=d {
        for jp in 1..=d {
            if jp == j {
                continue;
            }
            for tuple in index_tuples(d, m) {
                let mut cols = vec![j, jp, jp];
                for &v in &tuple {
                    cols.extend([v, v]);
                }
                let word = OpWord::from_columns(d, &cols)?;
                let poly = freeness_constraints(&family, &word)?.swap_remove(0);
                let index = session.add_assumed_fact(poly)?.index().ok_or_else(|| {
                    ScenarioError::Drift(format!("constraint ({j},{jp},{tuple:?}) is zero"))
                })?;
                level.insert((j, jp, tuple), index);
            }
        }
    }

    let mut cases = Vec::new();
    match derive_projections(&mut session, d, m, level) {
        Ok(()) => {
            for i in 1..=d {
                for j in 1..=d {
                    cases.push(CaseReport::verified(format!("entry[{i},{j}]"), None));
                }
            }
        }
        Err(ScenarioError::Kernel(err)) => {
            for i in 1..=d {
                for j in 1..=d {
                    cases.push(CaseReport::refuted(
                        format!("entry[{i},{j}]"),
                        err.to_string(),
                        None,
                    ));
                }
            }
        }
        Err(other) => return Err(other),
    }

    let hash = seal_session(&session, ctx, "odd")?;
    for case in &mut cases {
        case.transcript_hash = Some(hash.clone());
    }
    Ok(finish_report(
        "odd",
        vec![
            ("d", d.to_string()),
            ("n", n.to_string()),
            ("seed", ctx.seed.to_string()),
        ],
        cases,
        started,
    ))
}

/// The full odd derivation, from assumed constraints to `u^2 = u^4` facts.
fn derive_projections(
    session: &mut Session,
    d: u8,
    m: usize,
    mut level: BTreeMap<(u8, u8, Vec<u8>), usize>,
) -> Result<(), ScenarioError> {
    let one = FreePolynomial::one(d);
    let gen = |i: u8, j: u8| FreePolynomial::generator(d, i, j);

    // Telescope: each middle index sums against the row norms to a shorter
    // constraint, ending at B_{j,j'} = sum_i u_{ij} u_{ij'}^2.
    for len in (0..m).rev() {
        let mut shorter: BTreeMap<(u8, u8, Vec<u8>), usize> = BTreeMap::new();
        for j in 1..=d {
            for jp in 1..=d {
                if jp == j {
                    continue;
                }
                for prefix in index_tuples(d, len) {
                    let mut triples = Vec::new();
                    for w in 1..=d {
                        let mut longer = prefix.clone();
                        longer.push(w);
                        triples.push((one.clone(), level[&(j, jp, longer)], one.clone()));
                    }
                    for i in 1..=d {
                        let mut head = gen(i, j)?.mul(&upow(d, i, jp, 2)?)?;
                        for &v in &prefix {
                            head = head.mul(&upow(d, i, v, 2)?)?;
                        }
                        let norm = named_fact(session, &format!("row_norm[{i}]"))?;
                        triples.push((head.neg(), norm, one.clone()));
                    }
                    let (index, _) = derive(session, triples)?;
                    shorter.insert((j, jp, prefix), index);
                }
            }
        }
        level = shorter;
    }
    let base: BTreeMap<(u8, u8), usize> = level
        .into_iter()
        .map(|((j, jp, _), index)| ((j, jp), index))
        .collect();

    // C_j = sum_i (u_{ij} - u_{ij}^3), the single-power identity per column.
    let mut single_gap: BTreeMap<u8, usize> = BTreeMap::new();
    for j in 1..=d {
        let mut triples = Vec::new();
        for jp in 1..=d {
            if jp != j {
                triples.push((one.clone(), base[&(j, jp)], one.clone()));
            }
        }
        for i in 1..=d {
            let norm = named_fact(session, &format!("row_norm[{i}]"))?;
            triples.push((gen(i, j)?.neg(), norm, one.clone()));
        }
        let (index, _) = derive(session, triples)?;
        single_gap.insert(j, index);
    }

    // Per column j': square B, sum over j != j', strip norms and
    // orthogonality, then cancel (sum u^3)^2 against C.
    let mut column_sum = Vec::new();
    for jp in 1..=d {
        let mut star_triples = Vec::new();
        for j in 1..=d {
            if j == jp {
                continue;
            }
            let b_poly = session.fact(base[&(j, jp)])?.poly().clone();
            let (squared, _) = derive(session, vec![(b_poly.adjoint(), base[&(j, jp)], one.clone())])?;
            star_triples.push((one.clone(), squared, one.clone()));
        }
        let (summed, _) = derive(session, star_triples)?;

        // sum_i u^4 - (sum_i u^3)^2
        let mut quartic = vec![(one.clone(), summed, one.clone())];
        for i in 1..=d {
            let norm = named_fact(session, &format!("row_norm[{i}]"))?;
            quartic.push((upow(d, i, jp, 2)?.neg(), norm, upow(d, i, jp, 2)?));
        }
        for i in 1..=d {
            for i2 in 1..=d {
                if i2 == i {
                    continue;
                }
                let ortho = named_fact(session, &format!("row_ortho[{i},{i2}]"))?;
                quartic.push((upow(d, i, jp, 2)?.neg(), ortho, upow(d, i2, jp, 2)?));
            }
        }
        let (quartic_idx, _) = derive(session, quartic)?;

        // sum_i (u^4 - u^2) - sum_{i != i'} u_{ij'} u_{i'j'}
        let linear = poly_sum(d, (1..=d).map(|i| gen(i, jp)).collect::<Result<Vec<_>, _>>()?)?;
        let cubic = (1..=d)
            .map(|i| upow(d, i, jp, 3))
            .collect::<Result<Vec<_>, _>>()?;
        let cubic = poly_sum(d, cubic)?;
        let (column_idx, _) = derive(
            session,
            vec![
                (one.clone(), quartic_idx, one.clone()),
                (cubic.neg(), single_gap[&jp], one.clone()),
                (one.neg(), single_gap[&jp], linear),
            ],
        )?;
        column_sum.push((one.clone(), column_idx, one.clone()));
    }
    let (all_columns, _) = derive(session, column_sum)?;

    // G = sum_{i,j} (u^2 - u^4): the cross terms are orthogonality sums.
    let mut final_triples = vec![(one.neg(), all_columns, one.clone())];
    for i in 1..=d {
        for i2 in 1..=d {
            if i2 != i {
                let ortho = named_fact(session, &format!("row_ortho[{i},{i2}]"))?;
                final_triples.push((one.neg(), ortho, one.clone()));
            }
        }
    }
    let (positive_idx, _) = derive(session, final_triples)?;

    // Split into u - u^3 per entry and shrink the spectrum to {0, -1, 1}.
    let mut entries = Vec::new();
    let mut terms = Vec::new();
    for i in 1..=d {
        for j in 1..=d {
            entries.push(Generator::new(i, j));
            terms.push((gen(i, j)?, PositiveForm::UnitMinusSquare(Generator::new(i, j))));
        }
    }
    let split = session.positivity_split(&terms, &quote(session, positive_idx)?)?;
    for (g, split_index) in entries.into_iter().zip(split) {
        let witness = quote(session, split_index)?;
        session.spectral_shrink(g, &power_gap(1, 3), &power_gap(2, 4), &witness)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Verdict;

    #[test]
    fn smallest_odd_chain_verifies_every_entry() {
        let report = scenario_odd(2, 3, &ScenarioContext::new()).unwrap();
        assert_eq!(report.totals.verified, 4);
        assert_eq!(report.exit_code(), 0);
        assert!(report
            .cases
            .iter()
            .all(|c| c.verdict == Verdict::Verified && c.transcript_hash.is_some()));
    }

    #[test]
    fn middle_indices_telescope_at_order_five() {
        let report = scenario_odd(2, 5, &ScenarioContext::new()).unwrap();
        assert_eq!(report.totals.verified, 4);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn even_or_small_orders_are_rejected() {
        assert!(matches!(
            scenario_odd(2, 4, &ScenarioContext::new()),
            Err(ScenarioError::BadParameter(_))
        ));
        assert!(matches!(
            scenario_odd(2, 1, &ScenarioContext::new()),
            Err(ScenarioError::BadParameter(_))
        ));
    }
}

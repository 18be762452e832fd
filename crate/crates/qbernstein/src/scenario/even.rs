//! Even-order projection chain over the free orthogonal presentation.
//!
//! For an even order `n >= 4`, assume the mixed freeness constraints of a
//! rotated identically distributed family, `sum_i u_{ij'}^2 u_{ij}^{n-2}`
//! for every ordered column pair, with the order-`n` cumulant declared
//! nonzero. Summing the constraints over `j' != j` against the row norms
//! leaves `sum_i (u_{ij}^{n-2} - u_{ij}^n)`, which is the conjugated
//! positive sum `sum_i u^m (1 - u^2) u^m` with `m = n/2 - 1`. Positivity
//! splits it into per-entry factors `u^m - u^{m+2}`, and the spectral step
//! shrinks each entry to the projection identity `u^2 = u^4`.

use super::report::{CaseReport, Report};
use super::{
    derive, finish_report, identical_rotation, named_fact, power_gap, quote, seal_session, upow,
    ScenarioContext, ScenarioError,
};
use crate::algebra::{FreePolynomial, Generator};
use crate::coeff::Param;
use crate::kernel::{preset_presentation, PositiveForm, PresetKind, Session};
use crate::opval::{freeness_constraints, OpWord};
use std::collections::BTreeMap;
use std::time::Instant;

/// Runs the even-order chain and reports one case per matrix entry.
pub fn scenario_even(d: u8, n: usize, ctx: &ScenarioContext) -> Result<Report, ScenarioError> {
    if n < 4 || n % 2 != 0 {
        return Err(ScenarioError::BadParameter(format!(
            "the even chain needs an even order n >= 4, got {n}"
        )));
    }
    let started = Instant::now();
    let presentation = preset_presentation(PresetKind::OPlus, d)?;
    let mut session = Session::new(presentation.clone());
    session.declare_nonzero(Param::new(&format!("k{{{n},1}}"))?);
    let family = identical_rotation(presentation, n)?;

    // One assumed constraint per ordered column pair (j', j).
    let mut constraint: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    for j in 1..=d {
        for jp in 1..=d {
            if jp == j {
                continue;
            }
            let mut cols = vec![jp, jp];
            cols.extend(std::iter::repeat(j).take(n - 2));
            let word = OpWord::from_columns(d, &cols)?;
            let poly = freeness_constraints(&family, &word)?.swap_remove(0);
            let index = session.add_assumed_fact(poly)?.index().ok_or_else(|| {
                ScenarioError::Drift(format!("constraint ({jp},{j}) collapsed to zero"))
            })?;
            constraint.insert((jp, j), index);
        }
    }

    let mut cases = Vec::new();
    for j in 1..=d {
        match derive_column(&mut session, d, n, j, &constraint) {
            Ok(()) => {
                for i in 1..=d {
                    cases.push(CaseReport::verified(format!("entry[{i},{j}]"), None));
                }
            }
            Err(ScenarioError::Kernel(err)) => {
                for i in 1..=d {
                    cases.push(CaseReport::refuted(
                        format!("entry[{i},{j}]"),
                        err.to_string(),
                        None,
                    ));
                }
            }
            Err(other) => return Err(other),
        }
    }

    let hash = seal_session(&session, ctx, "even")?;
    for case in &mut cases {
        case.transcript_hash = Some(hash.clone());
    }
    Ok(finish_report(
        "even",
        vec![
            ("d", d.to_string()),
            ("n", n.to_string()),
            ("seed", ctx.seed.to_string()),
        ],
        cases,
        started,
    ))
}

/// Derives `u^2 = u^4` for every entry of column `j`.
fn derive_column(
    session: &mut Session,
    d: u8,
    n: usize,
    j: u8,
    constraint: &BTreeMap<(u8, u8), usize>,
) -> Result<(), ScenarioError> {
    let one = FreePolynomial::one(d);
    let m = n / 2 - 1;

    // sum_{j' != j} constraint - sum_i row_norm[i] * u_{ij}^{n-2}
    //   = sum_i (u_{ij}^{n-2} - u_{ij}^n)
    let mut triples = Vec::new();
    for jp in 1..=d {
        if jp != j {
            triples.push((one.clone(), constraint[&(jp, j)], one.clone()));
        }
    }
    for i in 1..=d {
        let norm = named_fact(session, &format!("row_norm[{i}]"))?;
        triples.push((one.neg(), norm, upow(d, i, j, n - 2)?));
    }
    let (gap_index, _) = derive(session, triples)?;

    // The derived fact is syntactically sum_i u^m (1 - u^2) u^m; the kernel
    // re-checks that shape against the witness before splitting.
    let terms: Vec<(FreePolynomial, PositiveForm)> = (1..=d)
        .map(|i| {
            Ok((
                upow(d, i, j, m)?,
                PositiveForm::UnitMinusSquare(Generator::new(i, j)),
            ))
        })
        .collect::<Result<_, ScenarioError>>()?;
    let split = session.positivity_split(&terms, &quote(session, gap_index)?)?;

    // u^m - u^{m+2} vanishes, so the spectrum of each entry sits inside
    // {0, -1, 1}, where t^2 = t^4.
    for (i, split_index) in (1..=d).zip(split) {
        let witness = quote(session, split_index)?;
        session.spectral_shrink(
            Generator::new(i, j),
            &power_gap(m, m + 2),
            &power_gap(2, 4),
            &witness,
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::Verdict;

    #[test]
    fn smallest_even_chain_verifies_every_entry() {
        let report = scenario_even(2, 4, &ScenarioContext::new()).unwrap();
        assert_eq!(report.scenario, "even");
        assert_eq!(report.totals.verified, 4);
        assert_eq!(report.totals.refuted, 0);
        assert_eq!(report.totals.inconclusive, 0);
        assert_eq!(report.exit_code(), 0);
        let keys: Vec<&str> = report.cases.iter().map(|c| c.key.as_str()).collect();
        assert_eq!(
            keys,
            ["entry[1,1]", "entry[1,2]", "entry[2,1]", "entry[2,2]"]
        );
        assert!(report
            .cases
            .iter()
            .all(|c| c.verdict == Verdict::Verified && c.transcript_hash.is_some()));
    }

    #[test]
    fn higher_order_reuses_the_same_chain() {
        let report = scenario_even(2, 6, &ScenarioContext::new()).unwrap();
        assert_eq!(report.totals.verified, 4);
        assert_eq!(report.exit_code(), 0);
    }

    #[test]
    fn odd_or_small_orders_are_rejected() {
        assert!(matches!(
            scenario_even(2, 5, &ScenarioContext::new()),
            Err(ScenarioError::BadParameter(_))
        ));
        assert!(matches!(
            scenario_even(2, 2, &ScenarioContext::new()),
            Err(ScenarioError::BadParameter(_))
        ));
    }
}

//! Two-variable chain without the identical-distribution hypothesis.
//!
//! At `d = 2` the freeness constraints stay parameter-weighted: with
//! independent order-`n` cumulants `a_1 = k{n,1}` and `a_2 = k{n,2}`, the
//! assumed facts are
//!
//! * `R1 = a_1 u_{1j}^2 u_{1j'}^{n-2} + a_2 u_{2j}^2 u_{2j'}^{n-2}` and
//! * `R2 = a_1 u_{1j} u_{1j'}^{n-1} + a_2 u_{2j} u_{2j'}^{n-1}`
//!
//! for both ordered column pairs. For each target row `r` (other row `s`),
//! the chain strips the row norms from `R1`, multiplies by `u_{sj'}` on the
//! left, exchanges the cross term through orthogonality, substitutes `R2`,
//! collapses the parenthesis with the `s` row norm, and lands on
//! `a_r (u_{rj'}^{n-2} - u_{rj'}^n)` as a fact. From there the conclusion
//! is a disjunction: on the branch that declares both cumulants nonzero,
//! a Laurent rescale and a spectral step derive `u^2 = u^4` for every
//! entry; on the other branch `a_r = 0` is recorded as such, with nothing
//! further claimed.

use super::report::{CaseReport, Report};
use super::{
    derive, derive_expect, finish_report, named_fact, per_index_rotation, power_gap, quote,
    seal_session, upow, ScenarioContext, ScenarioError, Verdict,
};
use crate::algebra::{FreePolynomial, Generator};
use crate::coeff::{Param, ParamMono, Rat, Scalar};
use crate::kernel::{preset_presentation, PresetKind, Session};
use crate::opval::{opval_cumulant_closed, OpWord};
use num::One;
use std::collections::BTreeMap;
use std::time::Instant;

/// Runs the two-variable chain for order `n >= 3`.
pub fn scenario_d2_remark(n: usize, ctx: &ScenarioContext) -> Result<Report, ScenarioError> {
    if n < 3 {
        return Err(ScenarioError::BadParameter(format!(
            "the two-variable chain needs n >= 3, got {n}"
        )));
    }
    let started = Instant::now();
    let d = 2u8;
    let presentation = preset_presentation(PresetKind::OPlus, d)?;
    let mut main = Session::new(presentation.clone());
    let family = per_index_rotation(presentation, n)?;

    // Assumed parameter-weighted constraints for both ordered column pairs.
    let mut quad: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    let mut linear: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    for (j, jp) in [(1u8, 2u8), (2, 1)] {
        let mut cols = vec![j, j];
        cols.extend(std::iter::repeat(jp).take(n - 2));
        let poly = opval_cumulant_closed(&family, &OpWord::from_columns(d, &cols)?)?;
        quad.insert(
            (j, jp),
            main.add_assumed_fact(poly)?
                .index()
                .ok_or_else(|| ScenarioError::Drift("weighted constraint is zero".into()))?,
        );
        let mut cols = vec![j];
        cols.extend(std::iter::repeat(jp).take(n - 1));
        let poly = opval_cumulant_closed(&family, &OpWord::from_columns(d, &cols)?)?;
        linear.insert(
            (j, jp),
            main.add_assumed_fact(poly)?
                .index()
                .ok_or_else(|| ScenarioError::Drift("weighted constraint is zero".into()))?,
        );
    }

    let mut cases = Vec::new();
    let mut weighted_gap: BTreeMap<(u8, u8), usize> = BTreeMap::new();
    for r in [1u8, 2] {
        for jp in [1u8, 2] {
            match derive_weighted_gap(&mut main, n, r, jp, &quad, &linear) {
                Ok(index) => {
                    weighted_gap.insert((r, jp), index);
                    cases.push(CaseReport::verified(format!("chain[{r},{jp}]"), None));
                }
                Err(ScenarioError::Kernel(err)) => {
                    cases.push(CaseReport::refuted(
                        format!("chain[{r},{jp}]"),
                        err.to_string(),
                        None,
                    ));
                }
                Err(other) => return Err(other),
            }
        }
    }

    // Branch A: both cumulants declared nonzero; rescale by the Laurent
    // inverse and shrink the spectrum.
    let mut branch = main.clone();
    for r in [1u8, 2] {
        branch.declare_nonzero(Param::new(&format!("k{{{n},{r}}}"))?);
    }
    let mut branch_cases = Vec::new();
    for (&(r, jp), &gap_index) in &weighted_gap {
        match derive_projection(&mut branch, n, r, jp, gap_index) {
            Ok(()) => branch_cases.push(CaseReport::verified(
                format!("branch-a entry[{r},{jp}]"),
                None,
            )),
            Err(ScenarioError::Kernel(err)) => branch_cases.push(CaseReport::refuted(
                format!("branch-a entry[{r},{jp}]"),
                err.to_string(),
                None,
            )),
            Err(other) => return Err(other),
        }
    }

    // Branch B: the complementary disjunct is a record, not a derivation.
    for r in [1u8, 2] {
        cases.push(CaseReport {
            key: format!("branch-b[{r}]"),
            verdict: Verdict::Verified,
            witness: Some(format!(
                "k{{{n},{r}}} (u^{} - u^{}) vanishes; on the branch where k{{{n},{r}}} = 0 \
                 the order-{n} cumulant of row {r} vanishes and no projection identity is claimed",
                n - 2,
                n
            )),
            transcript_hash: None,
        });
    }

    let main_hash = seal_session(&main, ctx, "d2-main")?;
    let branch_hash = seal_session(&branch, ctx, "d2-branch")?;
    for case in &mut cases {
        case.transcript_hash = Some(main_hash.clone());
    }
    for case in &mut branch_cases {
        case.transcript_hash = Some(branch_hash.clone());
    }
    cases.extend(branch_cases);
    Ok(finish_report(
        "d2",
        vec![
            ("d", "2".to_string()),
            ("n", n.to_string()),
            ("seed", ctx.seed.to_string()),
        ],
        cases,
        started,
    ))
}

/// Derives `a_r (u_{rj'}^{n-2} - u_{rj'}^n)` in the main session.
fn derive_weighted_gap(
    session: &mut Session,
    n: usize,
    r: u8,
    jp: u8,
    quad: &BTreeMap<(u8, u8), usize>,
    linear: &BTreeMap<(u8, u8), usize>,
) -> Result<usize, ScenarioError> {
    let d = 2u8;
    let s = 3 - r;
    let j = 3 - jp;
    let one = FreePolynomial::one(d);
    let gen = |i: u8, c: u8| FreePolynomial::generator(d, i, c);
    let weight = |i: u8| Scalar::param(&format!("k{{{n},{i}}}"));
    let a_r = weight(r)?;
    let a_s = weight(s)?;

    let norm_r = named_fact(session, &format!("row_norm[{r}]"))?;
    let norm_s = named_fact(session, &format!("row_norm[{s}]"))?;
    let ortho_sr = named_fact(session, &format!("row_ortho[{s},{r}]"))?;
    let col_norm = named_fact(session, &format!("col_norm[{jp}]"))?;

    // Strip the row norms: both rows' power gaps, parameter-weighted.
    let (step1, _) = derive(
        session,
        vec![
            (one.clone(), quad[&(j, jp)], one.clone()),
            (one.scale(&a_r).neg(), norm_r, upow(d, r, jp, n - 2)?),
            (one.scale(&a_s).neg(), norm_s, upow(d, s, jp, n - 2)?),
        ],
    )?;

    // Multiply by u_{sj'} on the left.
    let (step2, _) = derive(session, vec![(gen(s, jp)?, step1, one.clone())])?;

    // Exchange the cross term through row orthogonality.
    let (step3, _) = derive(
        session,
        vec![
            (one.clone(), step2, one.clone()),
            (one.scale(&a_r), ortho_sr, upow(d, r, jp, n - 1)?),
        ],
    )?;

    // Substitute the linear constraint and collapse the parenthesis with
    // the s row norm, leaving a single weighted monomial.
    let expect4 = gen(s, jp)?.mul(&upow(d, r, jp, n - 2)?)?.scale(&a_r);
    let step4 = derive_expect(
        session,
        vec![
            (one.clone(), step3, one.clone()),
            (gen(s, j)?.neg(), linear[&(j, jp)], one.clone()),
            (one.scale(&a_s), norm_s, upow(d, s, jp, n - 1)?),
        ],
        &expect4,
        "single weighted monomial",
    )?;

    // Multiply by u_{sj'} again and strip the column norm.
    let expect5 = upow(d, r, jp, n - 2)?.sub(&upow(d, r, jp, n)?)?.scale(&a_r);
    let step5 = derive_expect(
        session,
        vec![
            (gen(s, jp)?, step4, one.clone()),
            (one.scale(&a_r).neg(), col_norm, upow(d, r, jp, n - 2)?),
        ],
        &expect5,
        "weighted power gap",
    )?;
    Ok(step5)
}

/// In the nonzero branch, rescales the weighted gap by `k{n,r}^-1` and
/// shrinks the spectrum of `u_{rj'}` to the projection identity.
fn derive_projection(
    session: &mut Session,
    n: usize,
    r: u8,
    jp: u8,
    gap_index: usize,
) -> Result<(), ScenarioError> {
    let d = 2u8;
    let one = FreePolynomial::one(d);
    let inverse = Scalar::term(
        ParamMono::from_powers([(Param::new(&format!("k{{{n},{r}}}"))?, -1)]),
        Rat::one(),
    );
    let expect = upow(d, r, jp, n - 2)?.sub(&upow(d, r, jp, n)?)?;
    let plain = derive_expect(
        session,
        vec![(one.scale(&inverse), gap_index, one.clone())],
        &expect,
        "rescaled power gap",
    )?;
    session.spectral_shrink(
        Generator::new(r, jp),
        &power_gap(n - 2, n),
        &power_gap(2, 4),
        &quote(session, plain)?,
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn order_three_runs_both_branches() {
        let report = scenario_d2_remark(3, &ScenarioContext::new()).unwrap();
        assert_eq!(report.totals.verified, 10);
        assert_eq!(report.totals.refuted, 0);
        assert_eq!(report.exit_code(), 0);
        let chain_hash = report
            .cases
            .iter()
            .find(|c| c.key.starts_with("chain"))
            .unwrap()
            .transcript_hash
            .clone();
        let branch_hash = report
            .cases
            .iter()
            .find(|c| c.key.starts_with("branch-a"))
            .unwrap()
            .transcript_hash
            .clone();
        assert!(chain_hash.is_some() && branch_hash.is_some());
        assert_ne!(chain_hash, branch_hash);
    }

    #[test]
    fn higher_orders_rerun_the_same_chain() {
        for n in [4usize, 5] {
            let report = scenario_d2_remark(n, &ScenarioContext::new()).unwrap();
            assert_eq!(report.totals.verified, 10, "order {n}");
            assert_eq!(report.exit_code(), 0);
        }
    }

    #[test]
    fn too_small_orders_are_rejected() {
        assert!(matches!(
            scenario_d2_remark(2, &ScenarioContext::new()),
            Err(ScenarioError::BadParameter(_))
        ));
    }
}

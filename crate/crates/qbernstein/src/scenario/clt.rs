//! Central-limit demonstration on exact cumulant arithmetic.
//!
//! Scaling a centered, unit-variance spec by a count `N` multiplies the
//! order-`n` cumulant by `N^(1 - n/2)`, which stays rational exactly when
//! `N` is a perfect square. The demonstration checks three identities:
//!
//! * the fourth moment of the scaled spec is `2 + kappa_4 / N` with fully
//!   symbolic cumulants, for each requested count;
//! * scaling by `N = 1` changes nothing;
//! * with all higher cumulants set to 1, the distance from the sixth
//!   moment to the semicircular value 5 strictly shrinks as the count
//!   grows.
//!
//! Everything here is moment arithmetic, not ideal membership, so the
//! cases carry no transcript hash; the replay audit applies to the
//! kernel-backed scenarios.

use super::report::{CaseReport, Report};
use super::{finish_report, ScenarioError};
use crate::coeff::{rat, Rat, Scalar};
use crate::cumulant::{clt_scaled_spec, moments_from_cumulants, DistributionSpec};
use num::Signed;
use std::time::Instant;

/// Runs the three identity checks over the requested counts.
pub fn clt_demo(order: usize, counts: &[u64]) -> Result<Report, ScenarioError> {
    if !(2..=8).contains(&order) {
        return Err(ScenarioError::BadParameter(format!(
            "the demonstration supports orders 2 through 8, got {order}"
        )));
    }
    if counts.is_empty() {
        return Err(ScenarioError::BadParameter("no counts given".into()));
    }
    for &count in counts {
        if count == 0 || !is_square(count) {
            return Err(ScenarioError::BadParameter(format!(
                "counts must be positive perfect squares so the scaling stays rational, got {count}"
            )));
        }
    }
    let started = Instant::now();
    let mut cases = Vec::new();

    if order >= 4 {
        let spec = symbolic_centered_spec(order)?;
        for &count in counts {
            cases.push(fourth_moment_case(&spec, count)?);
        }
    } else {
        cases.push(CaseReport::inconclusive(
            "m4-identity",
            format!("the fourth-moment identity needs order >= 4, got {order}"),
            None,
        ));
    }

    if counts.contains(&1) {
        cases.push(count_one_case(order)?);
    }

    cases.push(sixth_moment_decay_case(order, counts)?);

    Ok(finish_report(
        "clt",
        vec![
            ("order", order.to_string()),
            (
                "counts",
                counts
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        ],
        cases,
        started,
    ))
}

fn is_square(count: u64) -> bool {
    let root = (count as f64).sqrt() as u64;
    (root.saturating_sub(1)..=root + 1).any(|s| s.checked_mul(s) == Some(count))
}

/// Centered unit-variance spec with symbolic higher cumulants `k{n,1}`.
fn symbolic_centered_spec(order: usize) -> Result<DistributionSpec, ScenarioError> {
    let mut kappa = vec![Scalar::zero(), Scalar::one()];
    for n in 3..=order {
        kappa.push(Scalar::param(&format!("k{{{n},1}}"))?);
    }
    Ok(DistributionSpec::new(kappa)?)
}

/// `m_4` of the scaled spec must be exactly `2 + kappa_4 / N`.
fn fourth_moment_case(
    spec: &DistributionSpec,
    count: u64,
) -> Result<CaseReport, ScenarioError> {
    let key = format!("m4-identity[{count:012}]");
    let scaled = clt_scaled_spec(spec, count)?;
    let moments = moments_from_cumulants(&scaled, 4)?;
    let fourth = &moments[3];
    let expected = Scalar::from_int(2).add(
        &Scalar::param("k{4,1}")?.mul_rat(&rat(1, count as i64)),
    );
    if fourth == &expected {
        Ok(CaseReport::verified(key, None))
    } else {
        Ok(CaseReport::refuted(
            key,
            format!("m_4 of the scaled spec is {fourth}, expected {expected}"),
            None,
        ))
    }
}

/// Scaling by one count must return the cumulants unchanged.
fn count_one_case(order: usize) -> Result<CaseReport, ScenarioError> {
    let spec = symbolic_centered_spec(order)?;
    let scaled = clt_scaled_spec(&spec, 1)?;
    for n in 1..=order {
        if spec.kappa(n)? != scaled.kappa(n)? {
            return Ok(CaseReport::refuted(
                "count-one-unchanged",
                format!("scaling by 1 changed kappa_{n}"),
                None,
            ));
        }
    }
    Ok(CaseReport::verified("count-one-unchanged", None))
}

/// With every higher cumulant 1, `|m_6 - 5|` strictly decreases along
/// ascending counts.
fn sixth_moment_decay_case(order: usize, counts: &[u64]) -> Result<CaseReport, ScenarioError> {
    let key = "order6-decay";
    if order < 6 {
        return Ok(CaseReport::inconclusive(
            key,
            format!("the sixth-moment comparison needs order >= 6, got {order}"),
            None,
        ));
    }
    let mut ascending: Vec<u64> = counts.to_vec();
    ascending.sort_unstable();
    ascending.dedup();
    if ascending.len() < 2 {
        return Ok(CaseReport::inconclusive(
            key,
            "the decay comparison needs at least two distinct counts".to_string(),
            None,
        ));
    }
    let mut kappa = vec![Scalar::zero(), Scalar::one()];
    kappa.resize(order, Scalar::one());
    let spec = DistributionSpec::new(kappa)?;
    let semicircle_sixth = rat(5, 1);
    let mut deviations: Vec<Rat> = Vec::new();
    for &count in &ascending {
        let scaled = clt_scaled_spec(&spec, count)?;
        let sixth = moments_from_cumulants(&scaled, 6)?[5]
            .as_rational()
            .ok_or_else(|| ScenarioError::Drift("a concrete moment came out symbolic".into()))?;
        deviations.push((sixth - &semicircle_sixth).abs());
    }
    if deviations.windows(2).all(|pair| pair[0] > pair[1]) {
        Ok(CaseReport::verified(key, None))
    } else {
        let shown = deviations
            .iter()
            .map(Rat::to_string)
            .collect::<Vec<_>>()
            .join(", ");
        Ok(CaseReport::refuted(
            key,
            format!("deviations {shown} along counts {ascending:?} fail to decrease"),
            None,
        ))
    }
}

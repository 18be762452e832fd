//! Freeness preservation under hyperoctahedral rotation.
//!
//! For each order `n`, each non-constant column word `j = (j_1, ..., j_n)`,
//! and each tuple of inserted monomials `b = (b_1, ..., b_n)` up to a total
//! degree budget, the order-`n` operator-valued cumulant of the rotated
//! family is a combination `sum_i kappa_n(X_i) * u[i,j_1] b_1 ... u[i,j_n] b_n`.
//! With independent cumulant parameters, freeness of the rotated rows
//! requires every coefficient row to lie in the relation ideal.  Each case
//! owns a private session; rows are certified by a one-step annihilation
//! window where an adjacent letter pair matches a rewrite rule, falling
//! back to a bounded membership search, and the verdict is `verified` only
//! when every row is certified.
//!
//! Without insertions every non-constant column word has an adjacent
//! unequal pair, and the matching pair-annihilation relation kills the row
//! in one step.  Insertions can separate the row letters: at `d = 3` the
//! row `u[1,1] u[2,3] u[1,2]` has no adjacent pair sharing a row or a
//! column, and a 6-dimensional representation built from twisted
//! permutation projections shows it is genuinely outside the ideal (see
//! the tests), so those cases come back `inconclusive` rather than
//! verified.  At `d = 2` every insertion of degree at most one still
//! leaves an annihilating window.

use super::report::{CaseReport, Report};
use super::{
    finish_report, per_index_rotation, rat_ratio, seal_session, ScenarioContext, ScenarioError,
};
use crate::algebra::{AlgebraError, FreePolynomial, Generator};
use crate::coeff::Rat;
use crate::kernel::{
    preset_presentation, Certificate, KernelError, PresetKind, SearchOutcome, Session,
};
use crate::opval::{freeness_constraints, opval_cumulant_closed, opval_cumulant_mobius, OpWord};
use rayon::prelude::*;
use std::time::Instant;

/// One letter of an inserted monomial.
type Letter = (u8, u8);

/// Runs every `(n, column word, insertion tuple)` case up to the bounds.
pub fn scenario_hplus_preservation(
    d: u8,
    n_max: usize,
    b_degree: usize,
    degree_bound: usize,
    ctx: &ScenarioContext,
) -> Result<Report, ScenarioError> {
    if d < 2 {
        return Err(ScenarioError::BadParameter(format!(
            "the rotation grid needs d >= 2, got {d}"
        )));
    }
    if n_max < 2 {
        return Err(ScenarioError::BadParameter(format!(
            "cumulants of order below 2 carry no freeness constraint, got n-max {n_max}"
        )));
    }
    let started = Instant::now();

    let mut descriptors: Vec<(usize, Vec<u8>, Vec<Vec<Letter>>)> = Vec::new();
    for n in 2..=n_max {
        for jword in super::index_tuples(d, n) {
            if jword.iter().all(|&j| j == jword[0]) {
                continue;
            }
            for b in insertion_tuples(d, n, b_degree) {
                descriptors.push((n, jword.clone(), b));
            }
        }
    }

    let cases = descriptors
        .par_iter()
        .map(|(n, jword, b)| run_case(d, *n, jword, b, degree_bound, ctx))
        .collect::<Result<Vec<_>, ScenarioError>>()?;

    Ok(finish_report(
        "hplus",
        vec![
            ("d", d.to_string()),
            ("n-max", n_max.to_string()),
            ("b-degree", b_degree.to_string()),
            ("degree-bound", degree_bound.to_string()),
            ("seed", ctx.seed.to_string()),
        ],
        cases,
        started,
    ))
}

/// All monomials of exactly `len` letters over the `d x d` grid.
fn letter_words(d: u8, len: usize) -> Vec<Vec<Letter>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|w| {
                let mut next = Vec::new();
                for i in 1..=d {
                    for j in 1..=d {
                        let mut grown = w.clone();
                        grown.push((i, j));
                        next.push(grown);
                    }
                }
                next
            })
            .collect();
    }
    out
}

/// All insertion tuples for `slots` positions with total degree `<= budget`.
fn insertion_tuples(d: u8, slots: usize, budget: usize) -> Vec<Vec<Vec<Letter>>> {
    fn fill(
        d: u8,
        slots: usize,
        budget: usize,
        current: &mut Vec<Vec<Letter>>,
        out: &mut Vec<Vec<Vec<Letter>>>,
    ) {
        if current.len() == slots {
            out.push(current.clone());
            return;
        }
        for len in 0..=budget {
            for word in letter_words(d, len) {
                current.push(word);
                fill(d, slots, budget - len, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    fill(d, slots, budget, &mut Vec::with_capacity(slots), &mut out);
    out
}

fn case_key(n: usize, jword: &[u8], b: &[Vec<Letter>]) -> String {
    let j = jword
        .iter()
        .map(u8::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let inserted = b
        .iter()
        .map(|letters| {
            if letters.is_empty() {
                "1".to_string()
            } else {
                letters
                    .iter()
                    .map(|(i, j)| format!("u[{i},{j}]"))
                    .collect::<String>()
            }
        })
        .collect::<Vec<_>>()
        .join(",");
    format!("n={n} j=({j}) b=({inserted})")
}

/// Maps each rewrite rule to the relation fact carrying its pattern: the
/// rule polynomial is a rational multiple of a stored relation or of its
/// adjoint, in which case the adjoint is materialized as a fact.
fn rule_table(session: &mut Session) -> Result<Vec<([Generator; 2], usize, Rat)>, ScenarioError> {
    let d = session.d();
    let deltas = session
        .presentation()
        .rules()
        .iter()
        .map(|rule| Ok((rule.pattern(), rule.as_polynomial(d)?)))
        .collect::<Result<Vec<_>, AlgebraError>>()?;
    let relation_count = session.presentation().relations().len();
    let mut table = Vec::with_capacity(deltas.len());
    for (pattern, delta) in deltas {
        let mut found = None;
        for index in 0..relation_count {
            let fact = session.fact(index)?.poly().clone();
            if let Some(ratio) = rat_ratio(&delta, &fact) {
                found = Some((index, ratio, false));
                break;
            }
            if let Some(ratio) = rat_ratio(&delta, &fact.adjoint()) {
                found = Some((index, ratio, true));
                break;
            }
        }
        let (index, ratio, needs_adjoint) = found.ok_or_else(|| {
            ScenarioError::Drift("a rewrite rule matches no relation fact".into())
        })?;
        let index = if needs_adjoint {
            session.adjoint_fact(index)?
        } else {
            index
        };
        table.push((pattern, index, ratio));
    }
    Ok(table)
}

/// Builds a certificate for `row` by finding, in every term, an adjacent
/// letter pair matching a rule pattern; `None` when some term has no
/// window.
fn annihilation_certificate(
    session: &Session,
    table: &[([Generator; 2], usize, Rat)],
    row: &FreePolynomial,
) -> Result<Option<Certificate>, ScenarioError> {
    let d = session.d();
    let mut triples = Vec::new();
    for (word, coeff) in row.terms() {
        let letters = word.letters();
        let mut window = None;
        'scan: for l in 0..letters.len().saturating_sub(1) {
            for (pattern, index, ratio) in table {
                if pattern[0] == letters[l] && pattern[1] == letters[l + 1] {
                    window = Some((l, *index, ratio.clone()));
                    break 'scan;
                }
            }
        }
        let Some((l, index, ratio)) = window else {
            return Ok(None);
        };
        let pairs = |slice: &[Generator]| slice.iter().map(|g| (g.i, g.j)).collect::<Vec<_>>();
        let left = FreePolynomial::word(d, &pairs(&letters[..l]))?
            .scale(coeff)
            .scale_rat(&ratio);
        let right = FreePolynomial::word(d, &pairs(&letters[l + 2..]))?;
        triples.push((left, index, right));
    }
    Ok(Some(Certificate::new(row.clone(), triples)))
}

/// Certifies every constraint row of one `(n, j, b)` case in a private
/// session and seals it.
fn run_case(
    d: u8,
    n: usize,
    jword: &[u8],
    b: &[Vec<Letter>],
    degree_bound: usize,
    ctx: &ScenarioContext,
) -> Result<CaseReport, ScenarioError> {
    let key = case_key(n, jword, b);
    let mut session = Session::new(preset_presentation(PresetKind::HPlus, d)?);
    let table = rule_table(&mut session)?;

    let rotation = per_index_rotation(preset_presentation(PresetKind::HPlus, d)?, n)?;
    let items = jword
        .iter()
        .zip(b)
        .map(|(&j, letters)| {
            let poly = if letters.is_empty() {
                FreePolynomial::one(d)
            } else {
                FreePolynomial::word(d, letters)?
            };
            Ok((j, poly))
        })
        .collect::<Result<Vec<_>, ScenarioError>>()?;
    let word = OpWord::new(d, items)?;

    // Low orders are cheap enough to cross-check the closed form against
    // the partition sum in every case.
    if n <= 4 {
        let closed = opval_cumulant_closed(&rotation, &word)?;
        let mobius = opval_cumulant_mobius(&rotation, &word)?;
        if closed != mobius {
            return Err(ScenarioError::Drift(format!(
                "closed-form and partition-sum cumulants disagree for {key}"
            )));
        }
    }

    let rows = freeness_constraints(&rotation, &word)?;
    let mut pending = Vec::new();
    for (offset, row) in rows.iter().enumerate() {
        let i = offset + 1;
        if let Some(certificate) = annihilation_certificate(&session, &table, row)? {
            session.check_certificate(&certificate)?;
            continue;
        }
        let degree = row
            .terms()
            .map(|(w, _)| w.letters().len())
            .max()
            .unwrap_or(0);
        if degree > degree_bound {
            pending.push(format!(
                "row {i}: degree {degree} exceeds the search bound {degree_bound}"
            ));
            continue;
        }
        match session.search_membership(row, degree_bound) {
            Ok(SearchOutcome::Member(certificate)) => {
                session.check_certificate(&certificate)?;
            }
            Ok(SearchOutcome::Inconclusive { rows: spanned }) => {
                pending.push(format!(
                    "row {i}: no certificate within degree {degree_bound} ({spanned} rows spanned)"
                ));
            }
            Err(KernelError::ResourceCap { rows: spanned, cap }) => {
                pending.push(format!(
                    "row {i}: search stopped at the resource cap ({spanned} rows over {cap})"
                ));
            }
            Err(other) => return Err(other.into()),
        }
    }

    let hash = seal_session(&session, ctx, &key)?;
    if pending.is_empty() {
        Ok(CaseReport::verified(key, Some(hash)))
    } else {
        Ok(CaseReport::inconclusive(key, pending.join("; "), Some(hash)))
    }
}

//! Degree-bounded ideal-membership search.
//!
//! The spanning set is every `w_left * fact * w_right` with word multipliers
//! whose combined length keeps the total degree at or below the bound. Exact
//! rational elimination over the (word, parameter-monomial) coordinate
//! space either expresses the target in that span, yielding a replayable
//! [`Certificate`], or reports that the bounded span does not reach it,
//! which asserts nothing about larger bounds.

use super::{Certificate, KernelError, Session};
use crate::algebra::{FreePolynomial, Generator, Word};
use crate::coeff::{ParamMono, Rat};
use num::Zero;
use std::collections::BTreeMap;

/// Hard cap on the number of spanning rows a single search may generate.
pub const SEARCH_ROW_CAP: usize = 10_000_000;

/// Outcome of [`Session::search_membership`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome {
    /// The target lies in the bounded span; the certificate replays through
    /// certificate checking.
    Member(Certificate),
    /// The bounded span does not contain the target. Says nothing about
    /// membership at larger bounds.
    Inconclusive { rows: usize },
}

/// One coordinate of the linear space: a word paired with a parameter
/// monomial from its scalar coefficient.
type ColKey = (Word, ParamMono);

/// A sparse row together with the combination of original spanning rows it
/// equals. The invariant `cols == sum(combo[id] * row_id)` is maintained
/// through every elimination step.
struct Row {
    cols: BTreeMap<ColKey, Rat>,
    combo: BTreeMap<usize, Rat>,
}

impl Row {
    /// Eliminates the leading (largest) column against the pivots until the
    /// row is empty or its leading column has no pivot.
    fn reduce(&mut self, pivots: &BTreeMap<ColKey, Row>) {
        while let Some((lead, coeff)) = self.cols.last_key_value() {
            let Some(pivot) = pivots.get(lead) else {
                return;
            };
            let factor = coeff.clone();
            subtract_scaled(&mut self.cols, &pivot.cols, &factor);
            subtract_scaled(&mut self.combo, &pivot.combo, &factor);
        }
    }

    /// Scales so the leading coefficient is one.
    fn normalize(&mut self) {
        let inv = self
            .cols
            .last_key_value()
            .expect("normalize requires a nonzero row")
            .1
            .recip();
        for value in self.cols.values_mut() {
            *value *= &inv;
        }
        for value in self.combo.values_mut() {
            *value *= &inv;
        }
    }
}

/// `into[k] -= factor * from[k]`, dropping entries that become zero.
fn subtract_scaled<K: Ord + Clone>(
    into: &mut BTreeMap<K, Rat>,
    from: &BTreeMap<K, Rat>,
    factor: &Rat,
) {
    for (key, value) in from {
        let delta = factor * value;
        let entry = into.entry(key.clone()).or_insert_with(Rat::zero);
        *entry -= delta;
        if entry.is_zero() {
            into.remove(key);
        }
    }
}

fn columns_of(poly: &FreePolynomial) -> BTreeMap<ColKey, Rat> {
    let mut cols = BTreeMap::new();
    for (word, scalar) in poly.terms() {
        for (mono, value) in scalar.terms() {
            cols.insert((word.clone(), mono.clone()), value.clone());
        }
    }
    cols
}

/// Counts the rows the spanning set would contain, without building them.
fn count_rows(session: &Session, degree_bound: usize) -> u128 {
    let width = (session.d() as u128) * (session.d() as u128);
    let mut total = 0u128;
    for fact in session.facts() {
        let deg = fact.poly().degree();
        if deg > degree_bound {
            continue;
        }
        let budget = degree_bound - deg;
        let mut words_of_len = 1u128;
        for m in 0..=budget {
            total = total.saturating_add((m as u128 + 1).saturating_mul(words_of_len));
            words_of_len = words_of_len.saturating_mul(width);
        }
    }
    total
}

fn each_word<E>(
    gens: &[Generator],
    len: usize,
    buf: &mut Vec<Generator>,
    f: &mut impl FnMut(&[Generator]) -> Result<(), E>,
) -> Result<(), E> {
    if buf.len() == len {
        return f(buf);
    }
    for &g in gens {
        buf.push(g);
        each_word(gens, len, buf, f)?;
        buf.pop();
    }
    Ok(())
}

pub(super) fn run(
    session: &Session,
    target: &FreePolynomial,
    degree_bound: usize,
) -> Result<SearchOutcome, KernelError> {
    if target.is_zero() {
        return Err(KernelError::TrivialTarget);
    }
    if target.degree() > degree_bound {
        return Err(KernelError::DegreeBound {
            degree: target.degree(),
            bound: degree_bound,
        });
    }
    let total_rows = count_rows(session, degree_bound);
    if total_rows > SEARCH_ROW_CAP as u128 {
        return Err(KernelError::ResourceCap {
            rows: total_rows.min(usize::MAX as u128) as usize,
            cap: SEARCH_ROW_CAP,
        });
    }

    let d = session.d();
    let mut gens = Vec::new();
    for i in 1..=d {
        for j in 1..=d {
            gens.push(Generator { i, j });
        }
    }

    // origins[id] identifies the spanning row `w_left * fact * w_right`
    // behind combination entry `id`; only rows that became pivots are kept.
    let mut origins: Vec<(usize, Word, Word)> = Vec::new();
    let mut pivots: BTreeMap<ColKey, Row> = BTreeMap::new();
    let mut rows_seen = 0usize;

    for (fact_index, fact) in session.facts().iter().enumerate() {
        let deg = fact.poly().degree();
        if deg > degree_bound {
            continue;
        }
        let budget = degree_bound - deg;
        for m in 0..=budget {
            for a in 0..=m {
                let b = m - a;
                let mut left_buf = Vec::with_capacity(a);
                each_word::<KernelError>(&gens, a, &mut left_buf, &mut |left| {
                    let left_word = Word::from_letters(left.to_vec());
                    let mut right_buf = Vec::with_capacity(b);
                    each_word::<KernelError>(&gens, b, &mut right_buf, &mut |right| {
                        rows_seen += 1;
                        let right_word = Word::from_letters(right.to_vec());
                        let mut cols = BTreeMap::new();
                        for (word, scalar) in fact.poly().terms() {
                            let full = left_word.concat(word).concat(&right_word);
                            for (mono, value) in scalar.terms() {
                                let entry = cols
                                    .entry((full.clone(), mono.clone()))
                                    .or_insert_with(Rat::zero);
                                *entry += value;
                                if entry.is_zero() {
                                    cols.remove(&(full.clone(), mono.clone()));
                                }
                            }
                        }
                        let id = origins.len();
                        let mut row = Row {
                            cols,
                            combo: BTreeMap::from([(id, Rat::from_integer(1.into()))]),
                        };
                        row.reduce(&pivots);
                        if !row.cols.is_empty() {
                            row.normalize();
                            let lead = row.cols.last_key_value().expect("nonzero").0.clone();
                            origins.push((fact_index, left_word.clone(), right_word.clone()));
                            pivots.insert(lead, row);
                        }
                        Ok(())
                    })
                })?;
            }
        }
    }

    // Reduce the target against the pivot basis, accumulating the
    // combination. An empty remainder expresses the target exactly.
    let mut remainder = columns_of(target);
    let mut combo: BTreeMap<usize, Rat> = BTreeMap::new();
    while let Some((lead, coeff)) = remainder.last_key_value() {
        let Some(pivot) = pivots.get(lead) else {
            return Ok(SearchOutcome::Inconclusive { rows: rows_seen });
        };
        let factor = coeff.clone();
        subtract_scaled(&mut remainder, &pivot.cols, &factor);
        for (id, value) in &pivot.combo {
            let entry = combo.entry(*id).or_insert_with(Rat::zero);
            *entry += factor.clone() * value;
            if entry.is_zero() {
                combo.remove(id);
            }
        }
    }

    let mut triples = Vec::new();
    for (id, value) in &combo {
        let (fact_index, left_word, right_word) = &origins[*id];
        let left = FreePolynomial::word(d, &word_pairs(left_word))?.scale_rat(value);
        let right = FreePolynomial::word(d, &word_pairs(right_word))?;
        triples.push((left, *fact_index, right));
    }
    Ok(SearchOutcome::Member(Certificate::new(
        target.clone(),
        triples,
    )))
}

fn word_pairs(word: &Word) -> Vec<(u8, u8)> {
    word.letters().iter().map(|g| (g.i, g.j)).collect()
}

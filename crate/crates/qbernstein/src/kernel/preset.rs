//! The three built-in presentations on a `d x d` generator grid.
//!
//! All three share the orthogonality core: every row and column of the
//! self-adjoint generator matrix is a unit vector (`row_norm`, `col_norm`)
//! and distinct rows and columns are orthogonal (`row_ortho`, `col_ortho`,
//! one relation per ordered pair, so the core is closed under adjoints).
//!
//! On top of that core, the hyperoctahedral presentation annihilates
//! products of distinct entries sharing a row or a column, while the
//! sign-twisted orthogonal presentation makes such pairs anticommute and
//! makes entries with no shared index commute. Pair-indexed relations are
//! listed once per unordered pair; [`super::Session::adjoint_fact`] recovers
//! the reversed orientation when a derivation needs it.

use super::{KernelError, Presentation};
use crate::algebra::{FreePolynomial, Generator, RewriteRule};
use crate::coeff::rat_int;
use std::collections::BTreeMap;
use std::fmt;

/// The built-in presentation families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PresetKind {
    /// Free orthogonal: norms and orthogonality only.
    OPlus,
    /// Hyperoctahedral: adds annihilation of same-row and same-column pairs.
    HPlus,
    /// Sign-twisted orthogonal: shared-index pairs anticommute, disjoint
    /// pairs commute.
    OMinusOne,
}

impl PresetKind {
    pub fn as_str(self) -> &'static str {
        match self {
            PresetKind::OPlus => "oplus",
            PresetKind::HPlus => "hplus",
            PresetKind::OMinusOne => "ominus",
        }
    }

    pub fn parse(text: &str) -> Option<PresetKind> {
        match text {
            "oplus" => Some(PresetKind::OPlus),
            "hplus" => Some(PresetKind::HPlus),
            "ominus" => Some(PresetKind::OMinusOne),
            _ => None,
        }
    }
}

impl fmt::Display for PresetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `sum_j u[i,j]^2 - 1` (axis = rows) or `sum_i u[i,j]^2 - 1`.
fn norm_relation(d: u8, fixed: u8, rows_fixed: bool) -> Result<FreePolynomial, KernelError> {
    let mut acc = FreePolynomial::one(d).neg();
    for k in 1..=d {
        let (i, j) = if rows_fixed { (fixed, k) } else { (k, fixed) };
        acc = acc.add(&FreePolynomial::word(d, &[(i, j), (i, j)])?)?;
    }
    Ok(acc)
}

/// `sum_j u[a,j] u[b,j]` (rows a, b) or `sum_i u[i,a] u[i,b]` (columns).
fn ortho_relation(d: u8, a: u8, b: u8, rows: bool) -> Result<FreePolynomial, KernelError> {
    let mut acc = FreePolynomial::zero(d);
    for k in 1..=d {
        let (first, second) = if rows {
            ((a, k), (b, k))
        } else {
            ((k, a), (k, b))
        };
        acc = acc.add(&FreePolynomial::word(d, &[first, second])?)?;
    }
    Ok(acc)
}

fn pair_word(d: u8, x: (u8, u8), y: (u8, u8)) -> Result<FreePolynomial, KernelError> {
    Ok(FreePolynomial::word(d, &[x, y])?)
}

/// Shares a row or column but is a different generator.
fn shares_index(a: Generator, b: Generator) -> bool {
    a != b && (a.i == b.i || a.j == b.j)
}

/// Builds the orthogonality core shared by all presets.
fn core_relations(d: u8) -> Result<Vec<(String, FreePolynomial)>, KernelError> {
    let mut relations = Vec::new();
    for i in 1..=d {
        relations.push((format!("row_norm[{i}]"), norm_relation(d, i, true)?));
    }
    for j in 1..=d {
        relations.push((format!("col_norm[{j}]"), norm_relation(d, j, false)?));
    }
    for a in 1..=d {
        for b in 1..=d {
            if a != b {
                relations.push((format!("row_ortho[{a},{b}]"), ortho_relation(d, a, b, true)?));
            }
        }
    }
    for a in 1..=d {
        for b in 1..=d {
            if a != b {
                relations.push((
                    format!("col_ortho[{a},{b}]"),
                    ortho_relation(d, a, b, false)?,
                ));
            }
        }
    }
    Ok(relations)
}

/// The presentation for `kind` at matrix size `d`; sizes below 2 have no
/// off-diagonal structure and are rejected.
pub fn preset_presentation(kind: PresetKind, d: u8) -> Result<Presentation, KernelError> {
    if d < 2 {
        return Err(KernelError::PresetTooSmall(d));
    }
    let mut relations = core_relations(d)?;
    let mut rules: Vec<RewriteRule> = Vec::new();

    match kind {
        PresetKind::OPlus => {}
        PresetKind::HPlus => {
            // u[i,j] u[i,j'] = 0 within a row, u[i,j] u[i',j] = 0 within a
            // column, one relation per unordered pair; rules cover both
            // orientations, each justified by the relation or its adjoint.
            for i in 1..=d {
                for j in 1..=d {
                    for j2 in (j + 1)..=d {
                        relations.push((
                            format!("row_annih[{i};{j},{j2}]"),
                            pair_word(d, (i, j), (i, j2))?,
                        ));
                        rules.push(RewriteRule::annihilate([
                            Generator::new(i, j),
                            Generator::new(i, j2),
                        ]));
                        rules.push(RewriteRule::annihilate([
                            Generator::new(i, j2),
                            Generator::new(i, j),
                        ]));
                    }
                }
            }
            for j in 1..=d {
                for i in 1..=d {
                    for i2 in (i + 1)..=d {
                        relations.push((
                            format!("col_annih[{j};{i},{i2}]"),
                            pair_word(d, (i, j), (i2, j))?,
                        ));
                        rules.push(RewriteRule::annihilate([
                            Generator::new(i, j),
                            Generator::new(i2, j),
                        ]));
                        rules.push(RewriteRule::annihilate([
                            Generator::new(i2, j),
                            Generator::new(i, j),
                        ]));
                    }
                }
            }
        }
        PresetKind::OMinusOne => {
            // Shared-index pairs anticommute, disjoint pairs commute; one
            // relation per unordered generator pair. The rules sort every
            // descending two-letter word, flipping the sign on shared-index
            // pairs, and are confluent because each unordered pair has
            // exactly one sorted form.
            let mut gens = Vec::new();
            for i in 1..=d {
                for j in 1..=d {
                    gens.push(Generator::new(i, j));
                }
            }
            for (x, a) in gens.iter().enumerate() {
                for b in gens.iter().skip(x + 1) {
                    if shares_index(*a, *b) {
                        let name = if a.i == b.i {
                            format!("acom_row[{};{},{}]", a.i, a.j, b.j)
                        } else {
                            format!("acom_col[{};{},{}]", a.j, a.i, b.i)
                        };
                        let poly = pair_word(d, (a.i, a.j), (b.i, b.j))?
                            .add(&pair_word(d, (b.i, b.j), (a.i, a.j))?)?;
                        relations.push((name, poly));
                        rules.push(
                            RewriteRule::exchange([*b, *a], rat_int(-1), [*a, *b])
                                .expect("sorted pair is smaller"),
                        );
                    } else {
                        let name = format!("com[{},{};{},{}]", a.i, a.j, b.i, b.j);
                        let poly = pair_word(d, (a.i, a.j), (b.i, b.j))?
                            .sub(&pair_word(d, (b.i, b.j), (a.i, a.j))?)?;
                        relations.push((name, poly));
                        rules.push(
                            RewriteRule::exchange([*b, *a], rat_int(1), [*a, *b])
                                .expect("sorted pair is smaller"),
                        );
                    }
                }
            }
        }
    }

    // Every generator is a contraction: its square is one summand of a
    // norm relation whose other summands are squares of self-adjoints.
    let mut contraction = BTreeMap::new();
    for i in 1..=d {
        for j in 1..=d {
            contraction.insert(
                Generator::new(i, j),
                format!("row_norm[{i}] bounds u[{i},{j}]^2 by 1"),
            );
        }
    }

    Ok(Presentation::new(d, relations, rules, contraction)?.with_kind(kind))
}

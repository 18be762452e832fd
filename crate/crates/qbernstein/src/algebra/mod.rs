//! The free *-algebra on self-adjoint generators `u[i,j]`, `1 <= i,j <= d`,
//! with [`Scalar`](crate::coeff::Scalar) coefficients: exact arithmetic,
//! adjoints, terminating monomial rewriting, and evaluation in explicit
//! rational matrix representations.

mod matrix;
mod text;

pub use matrix::{eval_matrix, RatMatrix};

use crate::coeff::{CoeffError, Rat, Scalar};
use num::Zero;
use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

/// Default bound on stored terms; operations that would exceed it fail with
/// [`AlgebraError::TooManyTerms`] instead of exhausting memory.
pub const DEFAULT_TERM_CAP: usize = 1_000_000;

/// Errors from free-algebra operations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("polynomials over different generator grids (d = {0} vs d = {1})")]
    DimensionMismatch(u8, u8),
    #[error("generator u[{i},{j}] outside the {d} x {d} grid")]
    GeneratorOutOfRange { i: u8, j: u8, d: u8 },
    #[error("result would have {terms} terms, over the cap of {cap}")]
    TooManyTerms { terms: usize, cap: usize },
    #[error("invalid rewrite rule: {0}")]
    BadRule(String),
    #[error("matrix problem: {0}")]
    Matrix(String),
    #[error("no matrix assigned to generator u[{0},{1}]")]
    MissingGenerator(u8, u8),
    #[error("parameter {0} is declared nonzero but assigned zero")]
    ZeroDeclaredNonzero(String),
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
}

/// One generator `u[i,j]`, row `i` and column `j`, both one-based.
/// Generators are formally self-adjoint.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub i: u8,
    pub j: u8,
}

impl Generator {
    pub fn new(i: u8, j: u8) -> Generator {
        Generator { i, j }
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "u[{},{}]", self.i, self.j)
    }
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

/// A word in the generators; the empty word is the unit.
///
/// Comparison is degree-lexicographic: shorter words first, ties broken
/// letter by letter on `(i, j)`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word(Vec<Generator>);

impl Word {
    pub fn unit() -> Word {
        Word(Vec::new())
    }

    pub fn single(g: Generator) -> Word {
        Word(vec![g])
    }

    pub fn from_letters(letters: impl IntoIterator<Item = Generator>) -> Word {
        Word(letters.into_iter().collect())
    }

    pub fn from_pairs(pairs: &[(u8, u8)]) -> Word {
        Word(pairs.iter().map(|&(i, j)| Generator::new(i, j)).collect())
    }

    pub fn letters(&self) -> &[Generator] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn is_unit(&self) -> bool {
        self.0.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        Word(self.0.iter().chain(other.0.iter()).copied().collect())
    }

    /// The adjoint word: letters reversed (generators are self-adjoint).
    pub fn reversed(&self) -> Word {
        Word(self.0.iter().rev().copied().collect())
    }
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_unit() {
            return f.write_str("1");
        }
        for (k, g) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", g)?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({})", self)
    }
}

/// An element of the free *-algebra on the `d x d` generator grid: a finite
/// map from words to nonzero scalar coefficients.
///
/// ```
/// use qbernstein::algebra::FreePolynomial;
///
/// let u11 = FreePolynomial::generator(2, 1, 1).unwrap();
/// let u21 = FreePolynomial::generator(2, 2, 1).unwrap();
/// let p = u11.add(&u21).unwrap().mul(&u11.sub(&u21).unwrap()).unwrap();
/// // Cross terms do not cancel in the free algebra.
/// assert_eq!(p.num_terms(), 4);
/// assert_eq!(p.to_string(), "-u[2,1] u[2,1] + u[2,1] u[1,1] - u[1,1] u[2,1] + u[1,1] u[1,1]");
/// ```
#[derive(Clone, PartialEq, Eq)]
pub struct FreePolynomial {
    d: u8,
    terms: BTreeMap<Word, Scalar>,
}

impl FreePolynomial {
    pub fn zero(d: u8) -> FreePolynomial {
        FreePolynomial {
            d,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(d: u8) -> FreePolynomial {
        FreePolynomial::scalar(d, Scalar::one())
    }

    pub fn scalar(d: u8, s: Scalar) -> FreePolynomial {
        let mut terms = BTreeMap::new();
        if !s.is_zero() {
            terms.insert(Word::unit(), s);
        }
        FreePolynomial { d, terms }
    }

    pub fn generator(d: u8, i: u8, j: u8) -> Result<FreePolynomial, AlgebraError> {
        check_generator(d, Generator::new(i, j))?;
        Ok(FreePolynomial {
            d,
            terms: BTreeMap::from([(Word::from_pairs(&[(i, j)]), Scalar::one())]),
        })
    }

    /// The monomial with coefficient one on the given letters.
    pub fn word(d: u8, pairs: &[(u8, u8)]) -> Result<FreePolynomial, AlgebraError> {
        FreePolynomial::from_terms(d, [(Word::from_pairs(pairs), Scalar::one())])
    }

    pub fn from_terms(
        d: u8,
        terms: impl IntoIterator<Item = (Word, Scalar)>,
    ) -> Result<FreePolynomial, AlgebraError> {
        let mut map: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (w, s) in terms {
            for &g in w.letters() {
                check_generator(d, g)?;
            }
            let entry = map.entry(w).or_insert_with(Scalar::zero);
            *entry = entry.add(&s);
        }
        map.retain(|_, s| !s.is_zero());
        if map.len() > DEFAULT_TERM_CAP {
            return Err(AlgebraError::TooManyTerms {
                terms: map.len(),
                cap: DEFAULT_TERM_CAP,
            });
        }
        Ok(FreePolynomial { d, terms: map })
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Largest word length in the support; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(Word::degree).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Scalar)> {
        self.terms.iter()
    }

    pub fn coefficient_of(&self, w: &Word) -> Scalar {
        self.terms.get(w).cloned().unwrap_or_else(Scalar::zero)
    }

    fn check_same_d(&self, other: &FreePolynomial) -> Result<(), AlgebraError> {
        if self.d != other.d {
            return Err(AlgebraError::DimensionMismatch(self.d, other.d));
        }
        Ok(())
    }

    pub fn add(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        self.check_same_d(other)?;
        let mut terms = self.terms.clone();
        for (w, s) in &other.terms {
            let entry = terms.entry(w.clone()).or_insert_with(Scalar::zero);
            *entry = entry.add(s);
        }
        terms.retain(|_, s| !s.is_zero());
        if terms.len() > DEFAULT_TERM_CAP {
            return Err(AlgebraError::TooManyTerms {
                terms: terms.len(),
                cap: DEFAULT_TERM_CAP,
            });
        }
        Ok(FreePolynomial { d: self.d, terms })
    }

    pub fn sub(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FreePolynomial {
        FreePolynomial {
            d: self.d,
            terms: self.terms.iter().map(|(w, s)| (w.clone(), s.neg())).collect(),
        }
    }

    pub fn scale(&self, s: &Scalar) -> FreePolynomial {
        if s.is_zero() {
            return FreePolynomial::zero(self.d);
        }
        FreePolynomial {
            d: self.d,
            terms: self.terms.iter().map(|(w, c)| (w.clone(), c.mul(s))).collect(),
        }
    }

    pub fn scale_rat(&self, r: &Rat) -> FreePolynomial {
        if r.is_zero() {
            return FreePolynomial::zero(self.d);
        }
        FreePolynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(w, c)| (w.clone(), c.mul_rat(r)))
                .collect(),
        }
    }

    pub fn mul(&self, other: &FreePolynomial) -> Result<FreePolynomial, AlgebraError> {
        self.mul_capped(other, DEFAULT_TERM_CAP)
    }

    /// Bilinear word-concatenation product with an explicit term cap.
    pub fn mul_capped(
        &self,
        other: &FreePolynomial,
        cap: usize,
    ) -> Result<FreePolynomial, AlgebraError> {
        self.check_same_d(other)?;
        let mut terms: BTreeMap<Word, Scalar> = BTreeMap::new();
        for (w1, s1) in &self.terms {
            for (w2, s2) in &other.terms {
                let w = w1.concat(w2);
                let entry = terms.entry(w).or_insert_with(Scalar::zero);
                *entry = entry.add(&s1.mul(s2));
                if terms.len() > cap {
                    return Err(AlgebraError::TooManyTerms {
                        terms: terms.len(),
                        cap,
                    });
                }
            }
        }
        terms.retain(|_, s| !s.is_zero());
        Ok(FreePolynomial { d: self.d, terms })
    }

    /// The adjoint: every word is reversed; rational coefficients are their
    /// own conjugates and parameters are formally real, so scalars are fixed.
    pub fn adjoint(&self) -> FreePolynomial {
        FreePolynomial {
            d: self.d,
            terms: self
                .terms
                .iter()
                .map(|(w, s)| (w.reversed(), s.clone()))
                .collect(),
        }
    }

    /// Sums `make(v)` over `v` in `1..=d`.
    pub fn sum_over(
        d: u8,
        make: impl Fn(u8) -> Result<FreePolynomial, AlgebraError>,
    ) -> Result<FreePolynomial, AlgebraError> {
        let mut acc = FreePolynomial::zero(d);
        for v in 1..=d {
            acc = acc.add(&make(v)?)?;
        }
        Ok(acc)
    }

    /// Parses the canonical text form; inverse of `to_string`.
    pub fn parse(d: u8, input: &str) -> Result<FreePolynomial, AlgebraError> {
        text::parse(d, input)
    }
}

fn check_generator(d: u8, g: Generator) -> Result<(), AlgebraError> {
    if g.i < 1 || g.i > d || g.j < 1 || g.j > d {
        return Err(AlgebraError::GeneratorOutOfRange { i: g.i, j: g.j, d });
    }
    Ok(())
}

impl fmt::Display for FreePolynomial {
    /// Canonical text form; see [`FreePolynomial::parse`] for the grammar.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&text::render(self))
    }
}

impl fmt::Debug for FreePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FreePolynomial[d={}]({})", self.d, self)
    }
}

/// A terminating two-letter rewrite rule.
///
/// The replacement is either zero or a single signed word of the same degree
/// that is strictly smaller in the canonical order, so every rewrite strictly
/// decreases a word and rewriting terminates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewriteRule {
    pattern: [Generator; 2],
    replacement: Option<(Rat, [Generator; 2])>,
}

impl RewriteRule {
    /// A rule `pattern -> 0`.
    pub fn annihilate(pattern: [Generator; 2]) -> RewriteRule {
        RewriteRule {
            pattern,
            replacement: None,
        }
    }

    /// A rule `pattern -> coeff * replacement`; the replacement word must be
    /// strictly smaller than the pattern and the coefficient nonzero.
    pub fn exchange(
        pattern: [Generator; 2],
        coeff: Rat,
        replacement: [Generator; 2],
    ) -> Result<RewriteRule, AlgebraError> {
        if coeff.is_zero() {
            return Err(AlgebraError::BadRule(
                "zero replacement coefficient; use an annihilation rule".into(),
            ));
        }
        if replacement >= pattern {
            return Err(AlgebraError::BadRule(format!(
                "replacement {} {} is not smaller than pattern {} {}",
                replacement[0], replacement[1], pattern[0], pattern[1]
            )));
        }
        Ok(RewriteRule {
            pattern,
            replacement: Some((coeff, replacement)),
        })
    }

    pub fn pattern(&self) -> [Generator; 2] {
        self.pattern
    }

    pub fn replacement(&self) -> Option<(&Rat, [Generator; 2])> {
        self.replacement.as_ref().map(|(c, w)| (c, *w))
    }

    /// `pattern - replacement` as a polynomial, the element the rule asserts
    /// to vanish.
    pub fn as_polynomial(&self, d: u8) -> Result<FreePolynomial, AlgebraError> {
        let pat = FreePolynomial::word(d, &[(self.pattern[0].i, self.pattern[0].j), (self.pattern[1].i, self.pattern[1].j)])?;
        match &self.replacement {
            None => Ok(pat),
            Some((c, rep)) => {
                let rep = FreePolynomial::word(d, &[(rep[0].i, rep[0].j), (rep[1].i, rep[1].j)])?
                    .scale_rat(c);
                pat.sub(&rep)
            }
        }
    }
}

/// Applies the rules to every word, leftmost match first, until no pattern
/// occurs. Terminates because each rewrite strictly decreases a word in the
/// well-founded canonical order. Results never exceed the term cap.
///
/// ```
/// use num::rational::BigRational;
/// use qbernstein::algebra::{monomial_reduce, FreePolynomial, Generator, RewriteRule};
///
/// let rule = RewriteRule::annihilate([Generator::new(1, 1), Generator::new(1, 2)]);
/// let p = FreePolynomial::word(2, &[(1, 1), (1, 2)]).unwrap();
/// assert!(monomial_reduce(&p, &[rule]).unwrap().is_zero());
/// ```
pub fn monomial_reduce(
    p: &FreePolynomial,
    rules: &[RewriteRule],
) -> Result<FreePolynomial, AlgebraError> {
    monomial_reduce_capped(p, rules, DEFAULT_TERM_CAP)
}

/// [`monomial_reduce`] with an explicit term cap.
pub fn monomial_reduce_capped(
    p: &FreePolynomial,
    rules: &[RewriteRule],
    cap: usize,
) -> Result<FreePolynomial, AlgebraError> {
    let mut done: BTreeMap<Word, Scalar> = BTreeMap::new();
    let mut pending: Vec<(Word, Scalar)> =
        p.terms.iter().map(|(w, s)| (w.clone(), s.clone())).collect();
    while let Some((w, s)) = pending.pop() {
        match leftmost_match(&w, rules) {
            None => {
                let entry = done.entry(w).or_insert_with(Scalar::zero);
                *entry = entry.add(&s);
            }
            Some((k, rule)) => match &rule.replacement {
                None => {}
                Some((c, rep)) => {
                    let mut letters = w.letters().to_vec();
                    letters[k] = rep[0];
                    letters[k + 1] = rep[1];
                    pending.push((Word(letters), s.mul_rat(c)));
                }
            },
        }
        if done.len() + pending.len() > cap {
            return Err(AlgebraError::TooManyTerms {
                terms: done.len() + pending.len(),
                cap,
            });
        }
    }
    done.retain(|_, s| !s.is_zero());
    Ok(FreePolynomial { d: p.d, terms: done })
}

fn leftmost_match<'r>(w: &Word, rules: &'r [RewriteRule]) -> Option<(usize, &'r RewriteRule)> {
    let letters = w.letters();
    for k in 0..letters.len().saturating_sub(1) {
        for rule in rules {
            if rule.pattern[0] == letters[k] && rule.pattern[1] == letters[k + 1] {
                return Some((k, rule));
            }
        }
    }
    None
}

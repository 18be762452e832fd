//! A small proof kernel for finitely presented *-algebras.
//!
//! A [`Session`] owns a [`Presentation`] and an ordered store of [`Fact`]s,
//! polynomials that vanish in every *-representation of the presentation
//! (generators mapped to bounded self-adjoint operators satisfying the
//! relations and all assumed facts). The store only grows through checked
//! inference steps:
//!
//! * [`Session::check_certificate`]: pure arithmetic replay of an explicit
//!   two-sided ideal combination;
//! * [`Session::search_membership`]: bounded search for such a combination;
//! * [`Session::positivity_split`]: a vanishing sum of positive operators
//!   forces each summand to vanish;
//! * [`Session::star_cancel`]: `p p* = 0` forces `p = 0`;
//! * [`Session::spectral_shrink`]: a vanishing polynomial in one self-adjoint
//!   generator confines its spectrum to the polynomial's real roots;
//! * [`Session::adjoint_fact`]: the adjoint of a vanishing element vanishes.
//!
//! Every step, including failed ones, is logged; a serialized transcript
//! replays to the identical fact store.

mod preset;
mod search;
pub mod transcript;

pub use preset::{preset_presentation, PresetKind};
pub use search::{SearchOutcome, SEARCH_ROW_CAP};
pub use transcript::{replay, same_fact_store, LogEntry, Transcript};

use crate::algebra::{AlgebraError, FreePolynomial, Generator, RatMatrix, RewriteRule};
use crate::coeff::{Param, Rat};
use crate::univar::{UniPoly, UnivarError};
use num::Zero;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

/// Errors from kernel operations.
#[derive(Debug, Clone, thiserror::Error)]
pub enum KernelError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Univar(#[from] UnivarError),
    #[error("presentations require d >= 2, got {0}")]
    PresetTooSmall(u8),
    #[error("no fact with index {0}")]
    BadFactIndex(usize),
    #[error("certificate does not expand to its target; residual: {residual}")]
    CertificateInvalid { residual: String },
    #[error("certificate target is the zero polynomial")]
    TrivialTarget,
    #[error("witness target mismatch: expected {expected}, got {got}")]
    WitnessMismatch { expected: String, got: String },
    #[error("generator u[{0},{1}] is not in the contraction set")]
    NotContraction(u8, u8),
    #[error("parameter {0} is inverted but was never declared nonzero")]
    UndeclaredInverse(String),
    #[error("real root {root} of the vanishing polynomial is not a root of the target")]
    RootNotContained { root: String },
    #[error("degree bound {bound} is below the target degree {degree}")]
    DegreeBound { degree: usize, bound: usize },
    #[error("search would generate {rows} spanning rows, over the cap of {cap}")]
    ResourceCap { rows: usize, cap: usize },
    #[error("rewrite rule ({0}) is not a scalar multiple of a relation or a relation adjoint")]
    RuleNotJustified(String),
    #[error("relation {0} is the zero polynomial")]
    ZeroRelation(String),
    #[error("transcript replay diverged: {0}")]
    ReplayDivergence(String),
    #[error("cannot parse transcript: {0}")]
    Transcript(String),
}

/// A finitely presented *-algebra: generators `u[i,j]` on a `d x d` grid,
/// relations that vanish, a terminating monomial-rule subset implied by the
/// relations, and a contraction set of generators with recorded norm bounds.
#[derive(Debug, Clone)]
pub struct Presentation {
    kind: Option<PresetKind>,
    d: u8,
    relations: Vec<(String, FreePolynomial)>,
    rules: Vec<RewriteRule>,
    contraction: BTreeMap<Generator, String>,
}

impl Presentation {
    /// Builds a presentation, checking that every monomial rule's
    /// pattern-minus-replacement is a scalar multiple of a listed relation or
    /// of a relation's adjoint (sound: the adjoint of a vanishing element
    /// vanishes).
    pub fn new(
        d: u8,
        relations: Vec<(String, FreePolynomial)>,
        rules: Vec<RewriteRule>,
        contraction: BTreeMap<Generator, String>,
    ) -> Result<Presentation, KernelError> {
        for (name, poly) in &relations {
            if poly.is_zero() {
                return Err(KernelError::ZeroRelation(name.clone()));
            }
        }
        for rule in &rules {
            let delta = rule.as_polynomial(d)?;
            let justified = relations.iter().any(|(_, r)| {
                is_rat_multiple(&delta, r) || is_rat_multiple(&delta, &r.adjoint())
            });
            if !justified {
                return Err(KernelError::RuleNotJustified(delta.to_string()));
            }
        }
        Ok(Presentation {
            kind: None,
            d,
            relations,
            rules,
            contraction,
        })
    }

    pub(crate) fn with_kind(mut self, kind: PresetKind) -> Presentation {
        self.kind = Some(kind);
        self
    }

    pub fn kind(&self) -> Option<PresetKind> {
        self.kind
    }

    pub fn d(&self) -> u8 {
        self.d
    }

    pub fn relations(&self) -> &[(String, FreePolynomial)] {
        &self.relations
    }

    pub fn relation_named(&self, name: &str) -> Option<&FreePolynomial> {
        self.relations
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, p)| p)
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn contraction_set(&self) -> &BTreeMap<Generator, String> {
        &self.contraction
    }
}

/// `p == c * r` for some nonzero rational `c`?
fn is_rat_multiple(p: &FreePolynomial, r: &FreePolynomial) -> bool {
    if p.num_terms() != r.num_terms() || p.is_zero() {
        return false;
    }
    let (first_word, first_coeff) = r.terms().next().expect("nonzero");
    let p_coeff = p.coefficient_of(first_word);
    let (Some(num), Some(den)) = (p_coeff.as_rational(), first_coeff.as_rational()) else {
        return false;
    };
    if den.is_zero() || num.is_zero() {
        return false;
    }
    let c = num / den;
    match r.scale_rat(&c).sub(p) {
        Ok(diff) => diff.is_zero(),
        Err(_) => false,
    }
}

/// Why a fact is in the store.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    /// A defining relation of the presentation.
    Preset { name: String },
    /// Assumed for the scope of the session.
    Assumed,
    /// Derived by a named inference rule from earlier facts.
    Derived { rule: String, inputs: Vec<usize> },
}

/// A polynomial known to vanish in every *-representation of the session.
#[derive(Debug, Clone)]
pub struct Fact {
    poly: FreePolynomial,
    provenance: Provenance,
}

impl Fact {
    pub fn poly(&self) -> &FreePolynomial {
        &self.poly
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }
}

/// An explicit two-sided ideal combination: the claim that
/// `target = sum over k of left_k * fact_k * right_k`,
/// checkable by expanding the right-hand side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub target: FreePolynomial,
    pub triples: Vec<(FreePolynomial, usize, FreePolynomial)>,
}

impl Certificate {
    pub fn new(
        target: FreePolynomial,
        triples: Vec<(FreePolynomial, usize, FreePolynomial)>,
    ) -> Certificate {
        Certificate { target, triples }
    }
}

/// The `h` factor in a positivity split: as an operator, `g^2` is positive
/// because `g` is self-adjoint, and `1 - g^2` is positive whenever `g` is a
/// contraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PositiveForm {
    Square(Generator),
    UnitMinusSquare(Generator),
}

impl PositiveForm {
    pub fn generator(&self) -> Generator {
        match *self {
            PositiveForm::Square(g) | PositiveForm::UnitMinusSquare(g) => g,
        }
    }

    fn as_polynomial(&self, d: u8) -> Result<FreePolynomial, AlgebraError> {
        let g = self.generator();
        let square = FreePolynomial::word(d, &[(g.i, g.j), (g.i, g.j)])?;
        match self {
            PositiveForm::Square(_) => Ok(square),
            PositiveForm::UnitMinusSquare(_) => FreePolynomial::one(d).sub(&square),
        }
    }

    /// The factor that survives the split: `g` for `g^2`, `1 - g^2` itself
    /// for the contraction form.
    fn surviving_factor(&self, d: u8) -> Result<FreePolynomial, AlgebraError> {
        match self {
            PositiveForm::Square(g) => FreePolynomial::generator(d, g.i, g.j),
            PositiveForm::UnitMinusSquare(_) => self.as_polynomial(d),
        }
    }
}

impl fmt::Display for PositiveForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.generator();
        match self {
            PositiveForm::Square(_) => write!(f, "square of u[{},{}]", g.i, g.j),
            PositiveForm::UnitMinusSquare(_) => write!(f, "1 - u[{},{}]^2", g.i, g.j),
        }
    }
}

/// The result of [`Session::add_assumed_fact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AddOutcome {
    Added(usize),
    Duplicate(usize),
    RejectedZero,
}

impl AddOutcome {
    pub fn index(&self) -> Option<usize> {
        match *self {
            AddOutcome::Added(k) | AddOutcome::Duplicate(k) => Some(k),
            AddOutcome::RejectedZero => None,
        }
    }
}

/// A single-owner proof state: presentation, fact store, nonzero-parameter
/// declarations, and a replayable log of every step taken.
#[derive(Debug, Clone)]
pub struct Session {
    presentation: Presentation,
    facts: Vec<Fact>,
    index_by_text: BTreeMap<String, usize>,
    nonzero_params: BTreeSet<Param>,
    log: Vec<LogEntry>,
}

impl Session {
    /// Opens a session; the presentation's relations seed the fact store.
    pub fn new(presentation: Presentation) -> Session {
        let mut session = Session {
            presentation,
            facts: Vec::new(),
            index_by_text: BTreeMap::new(),
            nonzero_params: BTreeSet::new(),
            log: Vec::new(),
        };
        let relations: Vec<(String, FreePolynomial)> =
            session.presentation.relations().to_vec();
        for (name, poly) in relations {
            session.push_fact(poly, Provenance::Preset { name });
        }
        session
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn d(&self) -> u8 {
        self.presentation.d()
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn fact(&self, index: usize) -> Result<&Fact, KernelError> {
        self.facts.get(index).ok_or(KernelError::BadFactIndex(index))
    }

    pub fn find_fact(&self, poly: &FreePolynomial) -> Option<usize> {
        self.index_by_text.get(&poly.to_string()).copied()
    }

    /// Index of the fact seeded from the named presentation relation.
    pub fn fact_named(&self, name: &str) -> Option<usize> {
        let poly = self.presentation.relation_named(name)?;
        self.find_fact(poly)
    }

    pub fn nonzero_params(&self) -> &BTreeSet<Param> {
        &self.nonzero_params
    }

    pub fn log(&self) -> &[LogEntry] {
        &self.log
    }

    fn push_fact(&mut self, poly: FreePolynomial, provenance: Provenance) -> usize {
        let text = poly.to_string();
        if let Some(&index) = self.index_by_text.get(&text) {
            return index;
        }
        let index = self.facts.len();
        self.facts.push(Fact { poly, provenance });
        self.index_by_text.insert(text, index);
        index
    }

    /// Negative parameter exponents are only meaningful for parameters the
    /// session has declared nonzero.
    fn validate_params(&self, poly: &FreePolynomial) -> Result<(), KernelError> {
        for (_, scalar) in poly.terms() {
            for (mono, _) in scalar.terms() {
                for (param, exp) in mono.powers() {
                    if exp < 0 && !self.nonzero_params.contains(param) {
                        return Err(KernelError::UndeclaredInverse(param.name().to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    /// Declares a parameter nonzero, licensing division by it.
    pub fn declare_nonzero(&mut self, param: Param) {
        self.nonzero_params.insert(param.clone());
        self.log.push(LogEntry::declare_nonzero(&param));
    }

    /// Appends an assumed fact. The zero polynomial is rejected as trivial
    /// and re-adding an existing polynomial is a deduplicated no-op; both are
    /// still logged.
    pub fn add_assumed_fact(&mut self, poly: FreePolynomial) -> Result<AddOutcome, KernelError> {
        self.validate_params(&poly)?;
        let outcome = if poly.is_zero() {
            AddOutcome::RejectedZero
        } else if let Some(index) = self.find_fact(&poly) {
            AddOutcome::Duplicate(index)
        } else {
            AddOutcome::Added(self.push_fact(poly.clone(), Provenance::Assumed))
        };
        self.log.push(LogEntry::add_assumed(&poly, outcome));
        Ok(outcome)
    }

    /// Appends the adjoint of a stored fact: a *-representation sends `p*`
    /// to `pi(p)*`, which is zero whenever `pi(p)` is. Relations are listed
    /// once per unordered pair where their adjoints are distinct elements,
    /// so chains that need the reversed orientation derive it here.
    pub fn adjoint_fact(&mut self, index: usize) -> Result<usize, KernelError> {
        let poly = self.fact(index)?.poly().adjoint();
        let new_index = self.push_fact(
            poly,
            Provenance::Derived {
                rule: "adjoint".into(),
                inputs: vec![index],
            },
        );
        self.log.push(LogEntry::adjoint_fact(index, new_index));
        Ok(new_index)
    }

    /// Expands `target - sum(left_k * fact_k * right_k)`. An exactly zero
    /// residual appends the target as a derived fact; anything else is an
    /// error carrying the residual. Both outcomes are logged.
    pub fn check_certificate(&mut self, certificate: &Certificate) -> Result<usize, KernelError> {
        if certificate.target.is_zero() {
            return Err(KernelError::TrivialTarget);
        }
        self.validate_params(&certificate.target)?;
        for (left, _, right) in &certificate.triples {
            self.validate_params(left)?;
            self.validate_params(right)?;
        }
        match self.certificate_residual(certificate) {
            Ok(residual) if residual.is_zero() => {
                let inputs = certificate.triples.iter().map(|&(_, k, _)| k).collect();
                let index = self.push_fact(
                    certificate.target.clone(),
                    Provenance::Derived {
                        rule: "certificate".into(),
                        inputs,
                    },
                );
                self.log.push(LogEntry::check_certificate(
                    certificate,
                    Ok(index),
                ));
                Ok(index)
            }
            Ok(residual) => {
                let error = KernelError::CertificateInvalid {
                    residual: residual.to_string(),
                };
                self.log.push(LogEntry::check_certificate(
                    certificate,
                    Err(residual.to_string()),
                ));
                Err(error)
            }
            Err(error) => Err(error),
        }
    }

    /// `target - sum(left * fact * right)`, without touching the store.
    pub fn certificate_residual(
        &self,
        certificate: &Certificate,
    ) -> Result<FreePolynomial, KernelError> {
        let mut acc = certificate.target.clone();
        for (left, index, right) in &certificate.triples {
            let fact = self.fact(*index)?;
            let product = left.mul(fact.poly())?.mul(right)?;
            acc = acc.sub(&product)?;
        }
        Ok(acc)
    }

    /// Bounded search for a certificate expressing `target` as a two-sided
    /// combination of facts with word multipliers of total degree at most
    /// `degree_bound`. `Member` carries a certificate that
    /// [`Session::check_certificate`] accepts; `Inconclusive` asserts
    /// nothing. Exceeding the row cap is an error, distinct from
    /// `Inconclusive`. The search itself never appends facts.
    pub fn search_membership(
        &mut self,
        target: &FreePolynomial,
        degree_bound: usize,
    ) -> Result<SearchOutcome, KernelError> {
        self.validate_params(target)?;
        let result = search::run(self, target, degree_bound);
        match &result {
            Ok(outcome) => {
                self.log
                    .push(LogEntry::search(target, degree_bound, Ok(outcome)));
            }
            Err(KernelError::ResourceCap { rows, cap }) => {
                self.log.push(LogEntry::search(
                    target,
                    degree_bound,
                    Err((*rows, *cap)),
                ));
            }
            Err(_) => {}
        }
        result
    }

    /// From a certified vanishing sum `sum_k q_k* h_k q_k = 0` with every
    /// `h_k` a positive form, each summand `q_k* h_k q_k` is a vanishing
    /// positive operator, so `h_k^(1/2) q_k = 0`, and multiplying by
    /// `h_k^(1/2)` again gives the appended facts `h'_k q_k`.
    ///
    /// The `1 - g^2` form additionally requires `g` in the contraction set,
    /// which is what makes `1 - g^2` positive.
    pub fn positivity_split(
        &mut self,
        decomposition: &[(FreePolynomial, PositiveForm)],
        witness: &Certificate,
    ) -> Result<Vec<usize>, KernelError> {
        let d = self.d();
        for (q, form) in decomposition {
            self.validate_params(q)?;
            if let PositiveForm::UnitMinusSquare(g) = form {
                if !self.presentation.contraction_set().contains_key(g) {
                    let error = KernelError::NotContraction(g.i, g.j);
                    self.log.push(LogEntry::positivity_split(
                        decomposition,
                        witness,
                        Err(error.to_string()),
                    ));
                    return Err(error);
                }
            }
        }
        let mut expected = FreePolynomial::zero(d);
        for (q, form) in decomposition {
            let h = form.as_polynomial(d)?;
            expected = expected.add(&q.adjoint().mul(&h)?.mul(q)?)?;
        }
        if let Err(error) = self.require_witness(witness, &expected) {
            self.log.push(LogEntry::positivity_split(
                decomposition,
                witness,
                Err(error.to_string()),
            ));
            return Err(error);
        }
        let witness_index = self.push_witness_fact(witness);
        let mut indices = Vec::with_capacity(decomposition.len());
        for (q, form) in decomposition {
            let fact = form.surviving_factor(d)?.mul(q)?;
            indices.push(self.push_fact(
                fact,
                Provenance::Derived {
                    rule: "positivity-split".into(),
                    inputs: vec![witness_index],
                },
            ));
        }
        self.log.push(LogEntry::positivity_split(
            decomposition,
            witness,
            Ok(indices.as_slice()),
        ));
        Ok(indices)
    }

    /// From a certified `p p* = 0`, appends `p`: in any *-representation
    /// `||p||^2 = ||p p*|| = 0`.
    pub fn star_cancel(
        &mut self,
        p: &FreePolynomial,
        witness: &Certificate,
    ) -> Result<usize, KernelError> {
        self.validate_params(p)?;
        let expected = p.mul(&p.adjoint())?;
        if let Err(error) = self.require_witness(witness, &expected) {
            self.log
                .push(LogEntry::star_cancel(p, witness, Err(error.to_string())));
            return Err(error);
        }
        let witness_index = self.push_witness_fact(witness);
        let index = self.push_fact(
            p.clone(),
            Provenance::Derived {
                rule: "star-cancel".into(),
                inputs: vec![witness_index],
            },
        );
        self.log.push(LogEntry::star_cancel(p, witness, Ok(index)));
        Ok(index)
    }

    /// From a certified `p(g) = 0` with `p` a nonzero rational univariate
    /// polynomial: the spectrum of the self-adjoint `g` lies in the real
    /// root set of `p`, computed exactly or refused. If every real root of
    /// `p` is also a root of `q`, then `q(g) = 0` is appended.
    pub fn spectral_shrink(
        &mut self,
        g: Generator,
        p: &UniPoly,
        q: &UniPoly,
        witness: &Certificate,
    ) -> Result<usize, KernelError> {
        let d = self.d();
        let expected = poly_of_generator(d, g, p)?;
        let fail = |s: &mut Session, error: &KernelError| {
            s.log
                .push(LogEntry::spectral_shrink(g, p, q, witness, Err(error.to_string())));
        };
        if let Err(error) = self.require_witness(witness, &expected) {
            fail(self, &error);
            return Err(error);
        }
        let roots = match p.real_roots_exact() {
            Ok(roots) => roots,
            Err(error) => {
                let error = KernelError::Univar(error);
                fail(self, &error);
                return Err(error);
            }
        };
        for root in &roots {
            if !q.eval(root).is_zero() {
                let error = KernelError::RootNotContained {
                    root: root.to_string(),
                };
                fail(self, &error);
                return Err(error);
            }
        }
        let witness_index = self.push_witness_fact(witness);
        let index = self.push_fact(
            poly_of_generator(d, g, q)?,
            Provenance::Derived {
                rule: "spectral-shrink".into(),
                inputs: vec![witness_index],
            },
        );
        self.log
            .push(LogEntry::spectral_shrink(g, p, q, witness, Ok(index)));
        Ok(index)
    }

    /// Checks that `witness` certifies exactly `expected` (same polynomial,
    /// zero residual). Used by the rules whose soundness depends on the shape
    /// of the certified target.
    fn require_witness(
        &self,
        witness: &Certificate,
        expected: &FreePolynomial,
    ) -> Result<(), KernelError> {
        if expected.is_zero() {
            return Err(KernelError::TrivialTarget);
        }
        if &witness.target != expected {
            return Err(KernelError::WitnessMismatch {
                expected: expected.to_string(),
                got: witness.target.to_string(),
            });
        }
        for (left, _, right) in &witness.triples {
            self.validate_params(left)?;
            self.validate_params(right)?;
        }
        let residual = self.certificate_residual(witness)?;
        if !residual.is_zero() {
            return Err(KernelError::CertificateInvalid {
                residual: residual.to_string(),
            });
        }
        Ok(())
    }

    /// Records a validated witness target as a derived fact so that facts
    /// derived from it can reference it by index.
    fn push_witness_fact(&mut self, witness: &Certificate) -> usize {
        let inputs = witness.triples.iter().map(|&(_, k, _)| k).collect();
        self.push_fact(
            witness.target.clone(),
            Provenance::Derived {
                rule: "certificate".into(),
                inputs,
            },
        )
    }

    /// Evaluates every stored fact in an explicit matrix representation;
    /// returns the first nonzero evaluation as a counterexample.
    pub fn eval_all_facts(
        &self,
        assignment: &BTreeMap<Generator, RatMatrix>,
        params: &BTreeMap<Param, Rat>,
    ) -> Result<Option<(usize, RatMatrix)>, KernelError> {
        for (index, fact) in self.facts.iter().enumerate() {
            let value =
                crate::algebra::eval_matrix(fact.poly(), assignment, params, &self.nonzero_params)?;
            if !value.is_zero() {
                return Ok(Some((index, value)));
            }
        }
        Ok(None)
    }

    /// Serializes presentation, declarations, and log for storage or replay.
    pub fn transcript(&self) -> Transcript {
        transcript::from_session(self)
    }
}

/// `p(g)` as a free polynomial: powers of a single generator.
pub fn poly_of_generator(
    d: u8,
    g: Generator,
    p: &UniPoly,
) -> Result<FreePolynomial, KernelError> {
    let mut acc = FreePolynomial::zero(d);
    let gen_poly = FreePolynomial::generator(d, g.i, g.j)?;
    let mut power = FreePolynomial::one(d);
    for k in 0..p.coeffs().len() {
        let c = p.coeff(k);
        if !c.is_zero() {
            acc = acc.add(&power.scale_rat(&c))?;
        }
        if k + 1 < p.coeffs().len() {
            power = power.mul(&gen_poly)?;
        }
    }
    Ok(acc)
}

#[cfg(test)]
mod tests;

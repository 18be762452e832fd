//! End-to-end verification pipelines over the proof kernel.
//!
//! Each scenario assembles kernel sessions, assumes exactly the freeness
//! constraints of a rotated free family, derives its target facts through
//! checked inference steps, and emits a machine-readable [`report::Report`].
//! Scenarios never assert a claim the kernel did not certify: a claim that
//! cannot be certified within the configured bounds is reported as
//! inconclusive, and a claim contradicted by an explicit witness is reported
//! as refuted.
//!
//! Before any report is emitted, every session behind it must pass two
//! self-audits:
//!
//! * a randomized signed permutation soundness check
//!   ([`smoke::signed_permutation_check`]), and
//! * a full transcript replay: the serialized transcript must rebuild to the
//!   identical fact store and re-serialize to the identical content hash.
//!
//! A session that fails either audit aborts the run with an error instead of
//! producing a report.

pub mod clt;
pub mod d2;
pub mod equiv;
pub mod even;
pub mod hplus;
pub mod odd;
pub mod ominus;
pub mod report;
pub mod semicircle;
pub mod smoke;

pub use clt::clt_demo;
pub use d2::scenario_d2_remark;
pub use equiv::scenario_relation_equivalence;
pub use even::scenario_even;
pub use hplus::scenario_hplus_preservation;
pub use odd::scenario_odd;
pub use ominus::scenario_o_minus_one;
pub use report::{CaseReport, Report, Totals, Verdict};
pub use semicircle::scenario_semicircle_conclusion;

use crate::algebra::{AlgebraError, FreePolynomial};
use crate::coeff::{CoeffError, Rat, Scalar};
use crate::cumulant::{CumulantError, DistributionSpec, FreeFamilySpec};
use crate::kernel::{Certificate, KernelError, Presentation, Session};
use crate::opval::{OpvalError, RotatedFamily};
use crate::univar::UniPoly;
use num::Zero;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::time::Instant;

/// Default seed for the randomized spot checks; fixed so runs reproduce.
pub const DEFAULT_SEED: u64 = 20260818;

/// Default number of random signed permutation rounds per session.
pub const DEFAULT_SMOKE_ROUNDS: usize = 20;

/// Errors that abort a scenario run outright. Bounded-search exhaustion and
/// expected refutations are verdicts, not errors; these are the conditions
/// under which no honest report can be produced at all.
#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Opval(#[from] OpvalError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Cumulant(#[from] CumulantError),
    #[error(transparent)]
    Coeff(#[from] CoeffError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    /// A fact store violates a model every presentation satisfies.
    #[error("soundness check failed: {0}")]
    Soundness(String),
    /// A transcript did not replay to the session that produced it.
    #[error("transcript replay failed: {0}")]
    Replay(String),
    /// A derivation produced a different polynomial than the chain expects.
    #[error("derivation drifted from its blueprint: {0}")]
    Drift(String),
    #[error("bad parameter: {0}")]
    BadParameter(String),
}

/// Shared run configuration: where to store transcripts, the seed for the
/// randomized audits, and how many audit rounds to run per session.
#[derive(Debug, Clone)]
pub struct ScenarioContext {
    pub transcript_dir: Option<PathBuf>,
    pub seed: u64,
    pub smoke_rounds: usize,
}

impl ScenarioContext {
    pub fn new() -> ScenarioContext {
        ScenarioContext {
            transcript_dir: None,
            seed: DEFAULT_SEED,
            smoke_rounds: DEFAULT_SMOKE_ROUNDS,
        }
    }
}

impl Default for ScenarioContext {
    fn default() -> ScenarioContext {
        ScenarioContext::new()
    }
}

/// `u[i,j]^e` as a polynomial; the zeroth power is the unit.
pub(crate) fn upow(d: u8, i: u8, j: u8, e: usize) -> Result<FreePolynomial, ScenarioError> {
    Ok(FreePolynomial::word(d, &vec![(i, j); e])?)
}

/// Sums a sequence of polynomials over the same grid.
pub(crate) fn poly_sum(
    d: u8,
    parts: impl IntoIterator<Item = FreePolynomial>,
) -> Result<FreePolynomial, ScenarioError> {
    let mut acc = FreePolynomial::zero(d);
    for p in parts {
        acc = acc.add(&p)?;
    }
    Ok(acc)
}

/// `t^lo - t^hi` with `lo < hi`: the power-gap polynomials whose real roots
/// are exactly `{0, -1, 1}`, the spectra the spectral steps confine to.
pub(crate) fn power_gap(lo: usize, hi: usize) -> UniPoly {
    let mut coeffs = vec![0i64; hi + 1];
    coeffs[lo] = 1;
    coeffs[hi] = -1;
    UniPoly::from_int_coeffs(&coeffs)
}

/// Looks up a presentation relation by name in the session's fact store.
pub(crate) fn named_fact(session: &Session, name: &str) -> Result<usize, ScenarioError> {
    session
        .fact_named(name)
        .ok_or_else(|| ScenarioError::Drift(format!("missing relation fact {name}")))
}

/// Expands the two-sided combination `sum left * fact * right` over the
/// session's fact store.
pub(crate) fn combination(
    session: &Session,
    triples: &[(FreePolynomial, usize, FreePolynomial)],
) -> Result<FreePolynomial, ScenarioError> {
    let mut acc = FreePolynomial::zero(session.d());
    for (left, index, right) in triples {
        let fact = session.fact(*index)?.poly().clone();
        acc = acc.add(&left.mul(&fact)?.mul(right)?)?;
    }
    Ok(acc)
}

/// Derives the combination of `triples` as a new fact. The target is the
/// expansion of the triples themselves; the kernel re-expands and verifies
/// it independently before appending. Returns the fact index and the
/// derived polynomial so callers can drift-check it against the chain's
/// intended value.
pub(crate) fn derive(
    session: &mut Session,
    triples: Vec<(FreePolynomial, usize, FreePolynomial)>,
) -> Result<(usize, FreePolynomial), ScenarioError> {
    let target = combination(session, &triples)?;
    let index = session.check_certificate(&Certificate::new(target.clone(), triples))?;
    Ok((index, target))
}

/// A one-step certificate quoting an existing fact verbatim; the standard
/// witness handed to positivity and spectral steps.
pub(crate) fn quote(session: &Session, index: usize) -> Result<Certificate, ScenarioError> {
    let poly = session.fact(index)?.poly().clone();
    let one = FreePolynomial::one(session.d());
    Ok(Certificate::new(poly, vec![(one.clone(), index, one)]))
}

/// Derives and drift-checks in one step: the combination must equal
/// `expect` exactly or the scenario aborts.
pub(crate) fn derive_expect(
    session: &mut Session,
    triples: Vec<(FreePolynomial, usize, FreePolynomial)>,
    expect: &FreePolynomial,
    label: &str,
) -> Result<usize, ScenarioError> {
    let (index, got) = derive(session, triples)?;
    if &got != expect {
        return Err(ScenarioError::Drift(format!(
            "{label}: expected {expect}, derived {got}"
        )));
    }
    Ok(index)
}

/// Marginal spec of order `order` whose cumulants are the free symbols
/// `k{m,label}`.
pub(crate) fn symbolic_spec(order: usize, label: usize) -> Result<DistributionSpec, ScenarioError> {
    let kappa = (1..=order)
        .map(|m| Scalar::param(&format!("k{{{m},{label}}}")))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DistributionSpec::new(kappa)?)
}

/// `d` identically distributed variables with symbolic cumulants `k{m,1}`,
/// rotated by the presentation's generator matrix.
pub(crate) fn identical_rotation(
    presentation: Presentation,
    order: usize,
) -> Result<RotatedFamily, ScenarioError> {
    let d = presentation.d() as usize;
    let family = FreeFamilySpec::identical(symbolic_spec(order, 1)?, d)?;
    Ok(RotatedFamily::new(family, presentation)?)
}

/// `d` variables with independent symbolic cumulants `k{m,i}`, one
/// parameter family per variable index.
pub(crate) fn per_index_rotation(
    presentation: Presentation,
    order: usize,
) -> Result<RotatedFamily, ScenarioError> {
    let d = presentation.d() as usize;
    let specs = (1..=d)
        .map(|i| symbolic_spec(order, i))
        .collect::<Result<Vec<_>, _>>()?;
    let family = FreeFamilySpec::new(specs, false)?;
    Ok(RotatedFamily::new(family, presentation)?)
}

/// All tuples over `{1..d}` of the given length, in odometer order.
pub(crate) fn index_tuples(d: u8, len: usize) -> Vec<Vec<u8>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|t| {
                (1..=d).map(move |x| {
                    let mut next = t.clone();
                    next.push(x);
                    next
                })
            })
            .collect();
    }
    out
}

/// The rational ratio `r` with `a = r * b`, when one exists and both sides
/// are parameter-free.
pub(crate) fn rat_ratio(a: &FreePolynomial, b: &FreePolynomial) -> Option<Rat> {
    let (word, coeff_b) = b.terms().next()?;
    let coeff_b = coeff_b.as_rational()?;
    if coeff_b.is_zero() {
        return None;
    }
    let coeff_a = a.terms().find(|(w, _)| *w == word)?.1.as_rational()?;
    let ratio = coeff_a / coeff_b;
    if *a == b.scale_rat(&ratio) {
        Some(ratio)
    } else {
        None
    }
}

/// Audits a finished session and returns its transcript hash: runs the
/// signed permutation check, replays the transcript against the live fact
/// store, verifies the replayed serialization is bit-identical, and writes
/// the transcript out when a directory is configured.
pub(crate) fn seal_session(
    session: &Session,
    ctx: &ScenarioContext,
    label: &str,
) -> Result<String, ScenarioError> {
    smoke::signed_permutation_check(session, ctx.seed, ctx.smoke_rounds)?;
    let transcript = session.transcript();
    let hash = transcript.content_hash();
    let replayed = crate::kernel::replay(&transcript)?;
    if !crate::kernel::same_fact_store(session, &replayed) {
        return Err(ScenarioError::Replay(format!(
            "{label}: replayed fact store differs from the live session"
        )));
    }
    let replayed_hash = replayed.transcript().content_hash();
    if replayed_hash != hash {
        return Err(ScenarioError::Replay(format!(
            "{label}: replayed transcript hashes to {replayed_hash}, expected {hash}"
        )));
    }
    if let Some(dir) = &ctx.transcript_dir {
        std::fs::create_dir_all(dir)?;
        transcript.write_to_dir(dir)?;
    }
    Ok(hash)
}

/// Assembles the final report with wall-clock duration.
pub(crate) fn finish_report(
    scenario: &str,
    params: Vec<(&str, String)>,
    cases: Vec<CaseReport>,
    started: Instant,
) -> Report {
    let params: BTreeMap<String, String> = params
        .into_iter()
        .map(|(k, v)| (k.to_string(), v))
        .collect();
    Report::new(scenario, params, cases, started.elapsed().as_millis() as u64)
}

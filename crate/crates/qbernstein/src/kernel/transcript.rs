//! Serializable session transcripts.
//!
//! A [`Transcript`] captures the presentation and the ordered log of every
//! kernel step, with all polynomials in their canonical text form. Replaying
//! a transcript re-runs each step and checks that it produces the recorded
//! outcome, reconstructing the identical fact store; membership searches are
//! not re-run, their stored certificates are re-verified instead.

use super::{
    AddOutcome, Certificate, KernelError, PositiveForm, Presentation, PresetKind, SearchOutcome,
    Session,
};
use crate::algebra::{FreePolynomial, Generator, RewriteRule};
use crate::coeff::{Param, Rat};
use crate::univar::UniPoly;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

/// A complete, replayable record of one session.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Transcript {
    pub version: String,
    pub presentation: PresentationRepr,
    pub entries: Vec<LogEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PresentationRepr {
    pub kind: Option<String>,
    pub d: u8,
    pub relations: Vec<RelationRepr>,
    pub rules: Vec<RuleRepr>,
    pub contraction: Vec<ContractionRepr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationRepr {
    pub name: String,
    pub poly: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleRepr {
    pub pattern: [[u8; 2]; 2],
    /// Absent for annihilation rules.
    pub replacement: Option<ReplacementRepr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplacementRepr {
    pub coeff: String,
    pub word: [[u8; 2]; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRepr {
    pub generator: [u8; 2],
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateRepr {
    pub target: String,
    pub triples: Vec<TripleRepr>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleRepr {
    pub left: String,
    pub fact: usize,
    pub right: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitTermRepr {
    pub q: String,
    /// `"square"` or `"unit-minus-square"`.
    pub form: String,
    pub generator: [u8; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum AddedRepr {
    Added { index: usize },
    Duplicate { index: usize },
    RejectedZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum StepRepr {
    Ok { index: usize },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SplitRepr {
    Ok { indices: Vec<usize> },
    Failed { error: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchRepr {
    Member { certificate: CertificateRepr },
    Inconclusive { rows: usize },
    ResourceCap { rows: usize, cap: usize },
}

/// One logged kernel step, successful or failed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "kebab-case")]
pub enum LogEntry {
    DeclareNonzero {
        param: String,
    },
    AddAssumedFact {
        poly: String,
        outcome: AddedRepr,
    },
    AdjointFact {
        input: usize,
        index: usize,
    },
    CheckCertificate {
        certificate: CertificateRepr,
        outcome: StepRepr,
    },
    SearchMembership {
        target: String,
        degree_bound: usize,
        outcome: SearchRepr,
    },
    PositivitySplit {
        decomposition: Vec<SplitTermRepr>,
        witness: CertificateRepr,
        outcome: SplitRepr,
    },
    StarCancel {
        poly: String,
        witness: CertificateRepr,
        outcome: StepRepr,
    },
    SpectralShrink {
        generator: [u8; 2],
        /// Ascending coefficients of the certified vanishing polynomial.
        vanishing: Vec<String>,
        /// Ascending coefficients of the polynomial the spectrum shrinks to.
        shrink_to: Vec<String>,
        witness: CertificateRepr,
        outcome: StepRepr,
    },
}

fn cert_repr(certificate: &Certificate) -> CertificateRepr {
    CertificateRepr {
        target: certificate.target.to_string(),
        triples: certificate
            .triples
            .iter()
            .map(|(left, fact, right)| TripleRepr {
                left: left.to_string(),
                fact: *fact,
                right: right.to_string(),
            })
            .collect(),
    }
}

fn unipoly_repr(p: &UniPoly) -> Vec<String> {
    p.coeffs().iter().map(Rat::to_string).collect()
}

fn step_repr(outcome: Result<usize, String>) -> StepRepr {
    match outcome {
        Ok(index) => StepRepr::Ok { index },
        Err(error) => StepRepr::Failed { error },
    }
}

impl LogEntry {
    pub(super) fn declare_nonzero(param: &Param) -> LogEntry {
        LogEntry::DeclareNonzero {
            param: param.name().to_string(),
        }
    }

    pub(super) fn add_assumed(poly: &FreePolynomial, outcome: AddOutcome) -> LogEntry {
        LogEntry::AddAssumedFact {
            poly: poly.to_string(),
            outcome: match outcome {
                AddOutcome::Added(index) => AddedRepr::Added { index },
                AddOutcome::Duplicate(index) => AddedRepr::Duplicate { index },
                AddOutcome::RejectedZero => AddedRepr::RejectedZero,
            },
        }
    }

    pub(super) fn adjoint_fact(input: usize, index: usize) -> LogEntry {
        LogEntry::AdjointFact { input, index }
    }

    pub(super) fn check_certificate(
        certificate: &Certificate,
        outcome: Result<usize, String>,
    ) -> LogEntry {
        LogEntry::CheckCertificate {
            certificate: cert_repr(certificate),
            outcome: step_repr(outcome),
        }
    }

    pub(super) fn search(
        target: &FreePolynomial,
        degree_bound: usize,
        outcome: Result<&SearchOutcome, (usize, usize)>,
    ) -> LogEntry {
        LogEntry::SearchMembership {
            target: target.to_string(),
            degree_bound,
            outcome: match outcome {
                Ok(SearchOutcome::Member(certificate)) => SearchRepr::Member {
                    certificate: cert_repr(certificate),
                },
                Ok(SearchOutcome::Inconclusive { rows }) => {
                    SearchRepr::Inconclusive { rows: *rows }
                }
                Err((rows, cap)) => SearchRepr::ResourceCap { rows, cap },
            },
        }
    }

    pub(super) fn positivity_split(
        decomposition: &[(FreePolynomial, PositiveForm)],
        witness: &Certificate,
        outcome: Result<&[usize], String>,
    ) -> LogEntry {
        LogEntry::PositivitySplit {
            decomposition: decomposition
                .iter()
                .map(|(q, form)| {
                    let g = form.generator();
                    SplitTermRepr {
                        q: q.to_string(),
                        form: match form {
                            PositiveForm::Square(_) => "square".into(),
                            PositiveForm::UnitMinusSquare(_) => "unit-minus-square".into(),
                        },
                        generator: [g.i, g.j],
                    }
                })
                .collect(),
            witness: cert_repr(witness),
            outcome: match outcome {
                Ok(indices) => SplitRepr::Ok {
                    indices: indices.to_vec(),
                },
                Err(error) => SplitRepr::Failed { error },
            },
        }
    }

    pub(super) fn star_cancel(
        poly: &FreePolynomial,
        witness: &Certificate,
        outcome: Result<usize, String>,
    ) -> LogEntry {
        LogEntry::StarCancel {
            poly: poly.to_string(),
            witness: cert_repr(witness),
            outcome: step_repr(outcome),
        }
    }

    pub(super) fn spectral_shrink(
        g: Generator,
        vanishing: &UniPoly,
        shrink_to: &UniPoly,
        witness: &Certificate,
        outcome: Result<usize, String>,
    ) -> LogEntry {
        LogEntry::SpectralShrink {
            generator: [g.i, g.j],
            vanishing: unipoly_repr(vanishing),
            shrink_to: unipoly_repr(shrink_to),
            witness: cert_repr(witness),
            outcome: step_repr(outcome),
        }
    }
}

pub(super) fn from_session(session: &Session) -> Transcript {
    let presentation = session.presentation();
    Transcript {
        version: format!("qbernstein-{}", env!("CARGO_PKG_VERSION")),
        presentation: PresentationRepr {
            kind: presentation.kind().map(|k| k.as_str().to_string()),
            d: presentation.d(),
            relations: presentation
                .relations()
                .iter()
                .map(|(name, poly)| RelationRepr {
                    name: name.clone(),
                    poly: poly.to_string(),
                })
                .collect(),
            rules: presentation
                .rules()
                .iter()
                .map(|rule| {
                    let [a, b] = rule.pattern();
                    RuleRepr {
                        pattern: [[a.i, a.j], [b.i, b.j]],
                        replacement: rule.replacement().map(|(coeff, [x, y])| ReplacementRepr {
                            coeff: coeff.to_string(),
                            word: [[x.i, x.j], [y.i, y.j]],
                        }),
                    }
                })
                .collect(),
            contraction: presentation
                .contraction_set()
                .iter()
                .map(|(g, reason)| ContractionRepr {
                    generator: [g.i, g.j],
                    reason: reason.clone(),
                })
                .collect(),
        },
        entries: session.log().to_vec(),
    }
}

impl Transcript {
    /// The exact bytes [`Transcript::write_to_dir`] stores.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut bytes = serde_json::to_string_pretty(self)
            .expect("transcripts serialize without fallible types")
            .into_bytes();
        bytes.push(b'\n');
        bytes
    }

    /// Hex SHA-256 of the canonical bytes; also the file stem used on disk.
    pub fn content_hash(&self) -> String {
        let mut hasher = Sha256::new();
        hasher.update(self.canonical_bytes());
        let digest = hasher.finalize();
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Writes `<hash>.json` under `dir`, creating the directory if needed.
    pub fn write_to_dir(&self, dir: &Path) -> std::io::Result<PathBuf> {
        std::fs::create_dir_all(dir)?;
        let path = dir.join(format!("{}.json", self.content_hash()));
        std::fs::write(&path, self.canonical_bytes())?;
        Ok(path)
    }

    /// Parses the exact format produced by [`Transcript::canonical_bytes`].
    pub fn from_bytes(bytes: &[u8]) -> Result<Transcript, KernelError> {
        serde_json::from_slice(bytes).map_err(|e| KernelError::Transcript(e.to_string()))
    }
}

fn parse_poly(d: u8, text: &str) -> Result<FreePolynomial, KernelError> {
    Ok(FreePolynomial::parse(d, text)?)
}

fn parse_rat(text: &str) -> Result<Rat, KernelError> {
    text.parse::<Rat>()
        .map_err(|e| KernelError::Transcript(format!("bad rational {text:?}: {e}")))
}

fn parse_cert(d: u8, repr: &CertificateRepr) -> Result<Certificate, KernelError> {
    let target = parse_poly(d, &repr.target)?;
    let mut triples = Vec::with_capacity(repr.triples.len());
    for t in &repr.triples {
        triples.push((parse_poly(d, &t.left)?, t.fact, parse_poly(d, &t.right)?));
    }
    Ok(Certificate::new(target, triples))
}

fn parse_unipoly(coeffs: &[String]) -> Result<UniPoly, KernelError> {
    let parsed: Result<Vec<Rat>, KernelError> = coeffs.iter().map(|s| parse_rat(s)).collect();
    Ok(UniPoly::new(parsed?))
}

fn parse_form(term: &SplitTermRepr) -> Result<PositiveForm, KernelError> {
    let g = Generator {
        i: term.generator[0],
        j: term.generator[1],
    };
    match term.form.as_str() {
        "square" => Ok(PositiveForm::Square(g)),
        "unit-minus-square" => Ok(PositiveForm::UnitMinusSquare(g)),
        other => Err(KernelError::Transcript(format!(
            "unknown positive form {other:?}"
        ))),
    }
}

fn diverged(step: usize, detail: impl Into<String>) -> KernelError {
    KernelError::ReplayDivergence(format!("entry {}: {}", step, detail.into()))
}

/// Rebuilds a session by re-running every logged step against the recorded
/// presentation and insisting on the recorded outcomes. The returned session
/// holds the same fact store, provenance, declarations, and log as the one
/// that produced the transcript.
pub fn replay(transcript: &Transcript) -> Result<Session, KernelError> {
    let d = transcript.presentation.d;
    let mut relations = Vec::with_capacity(transcript.presentation.relations.len());
    for r in &transcript.presentation.relations {
        relations.push((r.name.clone(), parse_poly(d, &r.poly)?));
    }
    let mut rules = Vec::with_capacity(transcript.presentation.rules.len());
    for r in &transcript.presentation.rules {
        let pattern = [
            Generator {
                i: r.pattern[0][0],
                j: r.pattern[0][1],
            },
            Generator {
                i: r.pattern[1][0],
                j: r.pattern[1][1],
            },
        ];
        let rule = match &r.replacement {
            None => RewriteRule::annihilate(pattern),
            Some(rep) => RewriteRule::exchange(
                pattern,
                parse_rat(&rep.coeff)?,
                [
                    Generator {
                        i: rep.word[0][0],
                        j: rep.word[0][1],
                    },
                    Generator {
                        i: rep.word[1][0],
                        j: rep.word[1][1],
                    },
                ],
            )?,
        };
        rules.push(rule);
    }
    let mut contraction = BTreeMap::new();
    for c in &transcript.presentation.contraction {
        contraction.insert(
            Generator {
                i: c.generator[0],
                j: c.generator[1],
            },
            c.reason.clone(),
        );
    }
    let mut presentation = Presentation::new(d, relations, rules, contraction)?;
    if let Some(kind_text) = &transcript.presentation.kind {
        let kind = PresetKind::parse(kind_text).ok_or_else(|| {
            KernelError::Transcript(format!("unknown preset kind {kind_text:?}"))
        })?;
        presentation = presentation.with_kind(kind);
    }
    let mut session = Session::new(presentation);
    for (step, entry) in transcript.entries.iter().enumerate() {
        apply_entry(&mut session, step, entry)?;
    }
    Ok(session)
}

fn apply_entry(session: &mut Session, step: usize, entry: &LogEntry) -> Result<(), KernelError> {
    let d = session.d();
    match entry {
        LogEntry::DeclareNonzero { param } => {
            let param = Param::new(param)
                .map_err(|e| KernelError::Transcript(format!("bad parameter: {e}")))?;
            session.declare_nonzero(param);
            Ok(())
        }
        LogEntry::AddAssumedFact { poly, outcome } => {
            let got = session.add_assumed_fact(parse_poly(d, poly)?)?;
            let expected = match outcome {
                AddedRepr::Added { index } => AddOutcome::Added(*index),
                AddedRepr::Duplicate { index } => AddOutcome::Duplicate(*index),
                AddedRepr::RejectedZero => AddOutcome::RejectedZero,
            };
            if got == expected {
                Ok(())
            } else {
                Err(diverged(step, format!("assumed-fact outcome {got:?}")))
            }
        }
        LogEntry::AdjointFact { input, index } => {
            let got = session.adjoint_fact(*input)?;
            if got == *index {
                Ok(())
            } else {
                Err(diverged(step, format!("adjoint landed at {got}")))
            }
        }
        LogEntry::CheckCertificate {
            certificate,
            outcome,
        } => {
            let cert = parse_cert(d, certificate)?;
            match (session.check_certificate(&cert), outcome) {
                (Ok(got), StepRepr::Ok { index }) if got == *index => Ok(()),
                (Err(KernelError::CertificateInvalid { residual }), StepRepr::Failed { error })
                    if residual == *error =>
                {
                    Ok(())
                }
                (got, _) => Err(diverged(step, format!("certificate outcome {got:?}"))),
            }
        }
        LogEntry::SearchMembership { target, outcome, .. } => {
            // Searches are not re-run. A stored member certificate is
            // re-verified against the current fact store before the entry is
            // restored verbatim.
            if let SearchRepr::Member { certificate } = outcome {
                let cert = parse_cert(d, certificate)?;
                if cert.target != parse_poly(d, target)? {
                    return Err(diverged(step, "member certificate targets a different polynomial"));
                }
                let residual = session.certificate_residual(&cert)?;
                if !residual.is_zero() {
                    return Err(diverged(step, "stored search certificate no longer checks"));
                }
            }
            session.log.push(entry.clone());
            Ok(())
        }
        LogEntry::PositivitySplit {
            decomposition,
            witness,
            outcome,
        } => {
            let mut decomp = Vec::with_capacity(decomposition.len());
            for term in decomposition {
                decomp.push((parse_poly(d, &term.q)?, parse_form(term)?));
            }
            let wit = parse_cert(d, witness)?;
            match (session.positivity_split(&decomp, &wit), outcome) {
                (Ok(got), SplitRepr::Ok { indices }) if got == *indices => Ok(()),
                (Err(e), SplitRepr::Failed { error }) if e.to_string() == *error => Ok(()),
                (got, _) => Err(diverged(step, format!("split outcome {got:?}"))),
            }
        }
        LogEntry::StarCancel {
            poly,
            witness,
            outcome,
        } => {
            let p = parse_poly(d, poly)?;
            let wit = parse_cert(d, witness)?;
            match (session.star_cancel(&p, &wit), outcome) {
                (Ok(got), StepRepr::Ok { index }) if got == *index => Ok(()),
                (Err(e), StepRepr::Failed { error }) if e.to_string() == *error => Ok(()),
                (got, _) => Err(diverged(step, format!("star-cancel outcome {got:?}"))),
            }
        }
        LogEntry::SpectralShrink {
            generator,
            vanishing,
            shrink_to,
            witness,
            outcome,
        } => {
            let g = Generator {
                i: generator[0],
                j: generator[1],
            };
            let p = parse_unipoly(vanishing)?;
            let q = parse_unipoly(shrink_to)?;
            let wit = parse_cert(d, witness)?;
            match (session.spectral_shrink(g, &p, &q, &wit), outcome) {
                (Ok(got), StepRepr::Ok { index }) if got == *index => Ok(()),
                (Err(e), StepRepr::Failed { error }) if e.to_string() == *error => Ok(()),
                (got, _) => Err(diverged(step, format!("spectral outcome {got:?}"))),
            }
        }
    }
}

/// Compares the parts of two sessions that replay promises to reproduce.
pub fn same_fact_store(a: &Session, b: &Session) -> bool {
    a.facts().len() == b.facts().len()
        && a.facts().iter().zip(b.facts()).all(|(x, y)| {
            x.poly() == y.poly() && x.provenance() == y.provenance()
        })
        && a.nonzero_params() == b.nonzero_params()
}

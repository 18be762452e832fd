//! Machine-readable run reports.
//!
//! Each scenario run produces a [`Report`]: one [`CaseReport`] per checked
//! claim, aggregate totals, and the parameters the run was invoked with.
//! Reports serialize as single-line JSON so successive runs can be appended
//! to a shared log and diffed across versions. Cases are sorted by key, so
//! two runs of the same scenario produce byte-identical case listings even
//! when the cases were checked in parallel.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

/// Outcome of one checked claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    /// The claim was certified by the kernel or by exact arithmetic.
    Verified,
    /// The claim is false; `witness` records the concrete counterexample.
    RefutedWithWitness,
    /// Neither certified nor refuted within the configured bounds.
    Inconclusive,
}

/// One checked claim inside a scenario.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseReport {
    /// Stable identifier, unique within the scenario run.
    pub key: String,
    pub verdict: Verdict,
    /// Counterexample or explanatory note; required for refutations.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    /// Content hash of the kernel transcript backing this case, when one
    /// exists. Claims certified by a kernel session always carry one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transcript_hash: Option<String>,
}

impl CaseReport {
    pub fn verified(key: impl Into<String>, transcript_hash: Option<String>) -> CaseReport {
        CaseReport {
            key: key.into(),
            verdict: Verdict::Verified,
            witness: None,
            transcript_hash,
        }
    }

    pub fn refuted(
        key: impl Into<String>,
        witness: impl Into<String>,
        transcript_hash: Option<String>,
    ) -> CaseReport {
        CaseReport {
            key: key.into(),
            verdict: Verdict::RefutedWithWitness,
            witness: Some(witness.into()),
            transcript_hash,
        }
    }

    pub fn inconclusive(
        key: impl Into<String>,
        note: impl Into<String>,
        transcript_hash: Option<String>,
    ) -> CaseReport {
        CaseReport {
            key: key.into(),
            verdict: Verdict::Inconclusive,
            witness: Some(note.into()),
            transcript_hash,
        }
    }
}

/// Aggregate verdict counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Totals {
    pub verified: usize,
    pub refuted: usize,
    pub inconclusive: usize,
}

/// A complete scenario run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    /// Invocation parameters, stringified for stable serialization.
    pub params: BTreeMap<String, String>,
    pub cases: Vec<CaseReport>,
    pub totals: Totals,
    pub duration_ms: u64,
    pub version: String,
}

impl Report {
    /// Assembles a report: sorts cases by key and tallies totals.
    pub fn new(
        scenario: &str,
        params: BTreeMap<String, String>,
        mut cases: Vec<CaseReport>,
        duration_ms: u64,
    ) -> Report {
        cases.sort_by(|a, b| a.key.cmp(&b.key));
        let count = |v: Verdict| cases.iter().filter(|c| c.verdict == v).count();
        let totals = Totals {
            verified: count(Verdict::Verified),
            refuted: count(Verdict::RefutedWithWitness),
            inconclusive: count(Verdict::Inconclusive),
        };
        Report {
            scenario: scenario.to_string(),
            params,
            cases,
            totals,
            duration_ms,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    /// Process exit status: 0 when everything verified, 2 when anything was
    /// refuted, 3 when anything was left inconclusive. Refutation wins.
    pub fn exit_code(&self) -> i32 {
        if self.totals.refuted > 0 {
            2
        } else if self.totals.inconclusive > 0 {
            3
        } else {
            0
        }
    }

    /// Appends the report as one JSON line to `path`, creating the file if
    /// needed. Existing content is never rewritten.
    pub fn append_jsonl(&self, path: &Path) -> std::io::Result<()> {
        let mut line = serde_json::to_string(self).map_err(std::io::Error::other)?;
        line.push('\n');
        let mut file = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)?;
        file.write_all(line.as_bytes())
    }
}

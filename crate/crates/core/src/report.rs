//! Pass/fail reports produced by the axiom checkers.

use serde::Serialize;
use serde_json::Value;

/// Outcome of one identity evaluated over a set of cases.
#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct CheckOutcome {
    pub identity: String,
    pub passed: bool,
    pub cases: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

#[derive(Clone, Debug, Default, Serialize, PartialEq)]
pub struct Report {
    pub subject: String,
    pub passed: bool,
    pub checks: Vec<CheckOutcome>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(subject: impl Into<String>) -> Self {
        Report { subject: subject.into(), passed: true, checks: Vec::new(), notes: Vec::new() }
    }

    /// Starts an identity check; see [`Check`].
    pub fn check(&mut self, identity: impl Into<String>) -> Check<'_> {
        Check { report: self, identity: identity.into(), cases: 0, witness: None }
    }

    pub fn record(&mut self, outcome: CheckOutcome) {
        self.passed &= outcome.passed;
        self.checks.push(outcome);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Appends the checks of `other`, prefixing identities with `prefix`.
    pub fn absorb(&mut self, prefix: &str, other: Report) {
        for mut c in other.checks {
            if !prefix.is_empty() {
                c.identity = format!("{prefix}: {}", c.identity);
            }
            self.record(c);
        }
        self.notes.extend(other.notes);
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn first_failure(&self) -> Option<String> {
        self.failures().next().map(|c| match &c.witness {
            Some(w) => format!("{} (witness {w})", c.identity),
            None => c.identity.clone(),
        })
    }

    pub fn find(&self, identity: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.identity == identity)
    }

    pub fn into_result(self) -> crate::Result<Report> {
        if self.passed {
            Ok(self)
        } else {
            Err(crate::Error::Axiom(Box::new(self)))
        }
    }
}

/// Accumulates cases for one identity; the first failing case is kept as witness.
pub struct Check<'a> {
    report: &'a mut Report,
    identity: String,
    cases: usize,
    witness: Option<Value>,
}

impl Check<'_> {
    /// Records one case. `witness` is only evaluated when the case fails.
    pub fn case(&mut self, ok: bool, witness: impl FnOnce() -> Value) -> bool {
        self.cases += 1;
        if !ok && self.witness.is_none() {
            self.witness = Some(witness());
        }
        ok
    }

    pub fn failed(&self) -> bool {
        self.witness.is_some()
    }

    pub fn finish(self) -> bool {
        let passed = self.witness.is_none();
        self.report.record(CheckOutcome { identity: self.identity, passed, cases: self.cases, witness: self.witness });
        passed
    }
}

/// Sampling parameters for randomized identity checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CheckConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for CheckConfig {
    fn default() -> Self {
        CheckConfig { samples: 100, seed: 0 }
    }
}

impl CheckConfig {
    pub fn new(samples: usize, seed: u64) -> Self {
        CheckConfig { samples, seed }
    }

    /// A generator for one named check, so checks do not share random streams.
    pub fn rng(&self, salt: &str) -> rand_chacha::ChaCha8Rng {
        use rand::SeedableRng;
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in salt.bytes() {
            h = (h ^ b as u64).wrapping_mul(0x0100_0000_01b3);
        }
        rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ h)
    }
}

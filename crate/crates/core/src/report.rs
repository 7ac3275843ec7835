//! Outcome of a degreewise axiom check. Failures are data, not errors.

use std::fmt;

/// Failures kept per report; the count of all failures is tracked separately.
const MAX_WITNESSES: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Which identity failed, e.g. `coassociativity`.
    pub property: String,
    /// Basis element (or tuple of elements) where it failed.
    pub at: String,
    /// The nonzero residual, printed.
    pub residual: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckReport {
    pub check: String,
    /// Inclusive degree window the check covered.
    pub window: Option<(i64, i64)>,
    pub checked: usize,
    pub failure_count: usize,
    pub witnesses: Vec<Witness>,
    pub notes: Vec<String>,
}

impl CheckReport {
    pub fn new(check: impl Into<String>) -> Self {
        CheckReport {
            check: check.into(),
            window: None,
            checked: 0,
            failure_count: 0,
            witnesses: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn with_window(mut self, lo: i64, hi: i64) -> Self {
        self.window = Some((lo, hi));
        self
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    /// Records one verified instance.
    pub fn tick(&mut self) {
        self.checked += 1;
    }

    pub fn fail(&mut self, property: impl Into<String>, at: impl fmt::Display, residual: impl fmt::Display) {
        self.failure_count += 1;
        if self.witnesses.len() < MAX_WITNESSES {
            self.witnesses.push(Witness { property: property.into(), at: at.to_string(), residual: residual.to_string() });
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// Folds another report's results into this one.
    pub fn absorb(&mut self, other: CheckReport) {
        self.checked += other.checked;
        self.failure_count += other.failure_count;
        for w in other.witnesses {
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(w);
            }
        }
        self.notes.extend(other.notes);
        self.window = match (self.window, other.window) {
            (Some((a, b)), Some((c, d))) => Some((a.min(c), b.max(d))),
            (w, None) | (None, w) => w,
        };
    }

    pub fn first_witness(&self) -> Option<&Witness> {
        self.witnesses.first()
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{status} {} ({} instances", self.check, self.checked)?;
        if let Some((lo, hi)) = self.window {
            write!(f, ", degrees {lo}..={hi}")?;
        }
        write!(f, ")")?;
        for w in &self.witnesses {
            write!(f, "\n  {} fails at {}: {}", w.property, w.at, w.residual)?;
        }
        if self.failure_count > self.witnesses.len() {
            write!(f, "\n  ... {} more", self.failure_count - self.witnesses.len())?;
        }
        for n in &self.notes {
            write!(f, "\n  note: {n}")?;
        }
        Ok(())
    }
}

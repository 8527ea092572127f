//! Verification reports: named residuals with tolerances and a pass flag,
//! serialized deterministically.

use serde::{Deserialize, Serialize};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    /// A residual compared against a tolerance.
    Checked,
    /// A hypothesis that cannot be decided from samples; recorded, not tested.
    Assumed,
    /// A measured quantity that is reported but not judged.
    Informational,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub check_id: String,
    /// The identity being checked, stated as a formula.
    pub paper_anchor: String,
    pub residual: Option<f64>,
    pub tolerance: Option<f64>,
    pub samples: usize,
    pub pass: bool,
    pub status: Status,
}

impl ReportEntry {
    /// `pass = residual < tolerance`; a non-finite residual fails.
    pub fn checked(id: &str, anchor: &str, residual: f64, tolerance: f64, samples: usize) -> Self {
        ReportEntry {
            check_id: id.to_string(),
            paper_anchor: anchor.to_string(),
            residual: Some(residual),
            tolerance: Some(tolerance),
            samples,
            pass: residual < tolerance,
            status: Status::Checked,
        }
    }

    pub fn informational(id: &str, anchor: &str, value: f64, samples: usize) -> Self {
        ReportEntry {
            check_id: id.to_string(),
            paper_anchor: anchor.to_string(),
            residual: Some(value),
            tolerance: None,
            samples,
            pass: true,
            status: Status::Informational,
        }
    }

    pub fn assumed(id: &str, anchor: &str) -> Self {
        ReportEntry {
            check_id: id.to_string(),
            paper_anchor: anchor.to_string(),
            residual: None,
            tolerance: None,
            samples: 0,
            pass: true,
            status: Status::Assumed,
        }
    }

    /// Replace the tolerance of a checked entry and recompute `pass`.
    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        if self.status == Status::Checked {
            self.tolerance = Some(tolerance);
            self.pass = self.residual.is_some_and(|r| r < tolerance);
        }
        self
    }

    /// Prepend `prefix.` to the check id.
    pub fn prefixed(mut self, prefix: &str) -> Self {
        self.check_id = format!("{prefix}.{}", self.check_id);
        self
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Checked && !self.pass
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub version: String,
    pub geometry: String,
    pub seed: u64,
    pub entries: Vec<ReportEntry>,
}

impl VerificationReport {
    /// Entries are sorted by check id.
    pub fn new(geometry: &str, seed: u64, mut entries: Vec<ReportEntry>) -> Self {
        entries.sort_by(|a, b| a.check_id.cmp(&b.check_id));
        VerificationReport { version: REPORT_VERSION.to_string(), geometry: geometry.to_string(), seed, entries }
    }

    pub fn passed(&self) -> bool {
        self.entries.iter().all(|e| !e.failed())
    }

    pub fn failures(&self) -> impl Iterator<Item = &ReportEntry> {
        self.entries.iter().filter(|e| e.failed())
    }

    pub fn entry(&self, id: &str) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.check_id == id)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per entry, aligned for terminals.
    pub fn to_text(&self) -> String {
        let width = self.entries.iter().map(|e| e.check_id.len()).max().unwrap_or(0);
        let mut out = format!("geometry {}  seed {}  version {}\n", self.geometry, self.seed, self.version);
        for e in &self.entries {
            let verdict = match e.status {
                Status::Checked if e.pass => "PASS",
                Status::Checked => "FAIL",
                Status::Assumed => "ASSUMED",
                Status::Informational => "INFO",
            };
            let residual = e.residual.map_or("-".to_string(), |r| format!("{r:.3e}"));
            let tol = e.tolerance.map_or(String::new(), |t| format!(" < {t:.0e}"));
            out.push_str(&format!(
                "{verdict:<8} {:<width$}  {residual}{tol}  (n={})  {}\n",
                e.check_id, e.samples, e.paper_anchor
            ));
        }
        let failed = self.failures().count();
        out.push_str(&format!("{} entries, {failed} failed\n", self.entries.len()));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_flag_follows_tolerance() {
        let e = ReportEntry::checked("a", "x", 1e-9, 1e-8, 3);
        assert!(e.pass);
        let e = e.with_tolerance(1e-10);
        assert!(!e.pass && e.failed());
        assert!(!ReportEntry::checked("a", "x", f64::NAN, 1.0, 1).pass);
        assert!(!ReportEntry::assumed("h", "x").failed());
    }

    #[test]
    fn entries_are_sorted_and_json_is_stable() {
        let r = VerificationReport::new(
            "g",
            7,
            vec![ReportEntry::checked("b", "", 0.5, 1.0, 1), ReportEntry::informational("a", "", 2.0, 1)],
        );
        assert_eq!(r.entries[0].check_id, "a");
        assert_eq!(r.to_json(), r.clone().to_json());
        let back: VerificationReport = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert!(r.passed());
    }
}

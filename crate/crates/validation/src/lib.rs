//! Reporting helpers for the acceptance suite in `tests/acceptance.rs`.

use std::fmt::Write;
use std::time::Instant;

/// Verdict of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub id: u32,
    pub title: String,
    pub passed: bool,
    pub detail: String,
}

/// Collects verdicts and prints one line per criterion as it completes.
#[derive(Debug, Default)]
pub struct Report {
    verdicts: Vec<Verdict>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    /// Run `check`, which returns (passed, detail), and print its line.
    pub fn criterion(&mut self, id: u32, title: &str, check: impl FnOnce() -> (bool, String)) {
        let t = Instant::now();
        let (passed, detail) = check();
        let v = Verdict {
            id,
            title: title.to_string(),
            passed,
            detail,
        };
        println!("{}  [{:.1}s]", v.line(), t.elapsed().as_secs_f64());
        self.verdicts.push(v);
    }

    pub fn verdicts(&self) -> &[Verdict] {
        &self.verdicts
    }

    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }

    pub fn summary(&self) -> String {
        let passed = self.verdicts.iter().filter(|v| v.passed).count();
        let mut s = format!("acceptance: {passed}/{} criteria passed", self.verdicts.len());
        let failed: Vec<String> = self.verdicts.iter().filter(|v| !v.passed).map(|v| v.id.to_string()).collect();
        if !failed.is_empty() {
            let _ = write!(s, "; failed: {}", failed.join(", "));
        }
        s
    }
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.detail
        )
    }
}

/// `value` agrees with `reference` when both round to the same `digits`
/// significant figures (half a unit in the last place).
pub fn matches_sig_figs(value: f64, reference: f64, digits: i32) -> bool {
    if reference == 0.0 {
        return value == 0.0;
    }
    let exponent = reference.abs().log10().floor() as i32;
    let half_ulp = 0.5 * 10f64.powi(exponent - digits + 1);
    (value - reference).abs() <= half_ulp
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig_figs() {
        assert!(matches_sig_figs(0.31498, 0.3150, 4));
        assert!(!matches_sig_figs(0.3156, 0.3150, 4));
        assert!(matches_sig_figs(-1.36000001, -1.36, 4));
        assert!(matches_sig_figs(16.0004, 16.0, 4));
        assert!(!matches_sig_figs(16.006, 16.0, 4));
    }

    #[test]
    fn report_tracks_failures() {
        let mut r = Report::new();
        r.criterion(1, "a", || (true, "ok".into()));
        r.criterion(2, "b", || (false, "no".into()));
        assert!(!r.all_passed());
        assert_eq!(r.summary(), "acceptance: 1/2 criteria passed; failed: 2");
        assert!(r.verdicts()[1].line().starts_with("criterion  2 FAIL b"));
    }
}

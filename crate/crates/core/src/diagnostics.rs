use serde::Serialize;

/// One named pass/fail check with its residuals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub grid: String,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub residuals: Vec<f64>,
}

impl CheckResult {
    /// `pass` is derived: `max_residual ≤ tolerance`. An empty residual set
    /// passes vacuously with max residual `0`.
    pub fn new(name: impl Into<String>, grid: impl Into<String>, tolerance: f64, residuals: Vec<f64>) -> Self {
        let max_residual = if residuals.is_empty() {
            0.0
        } else if residuals.iter().any(|r| r.is_nan()) {
            f64::INFINITY
        } else {
            residuals.iter().copied().fold(f64::NEG_INFINITY, f64::max)
        };
        Self {
            name: name.into(),
            grid: grid.into(),
            max_residual,
            tolerance,
            pass: max_residual <= tolerance,
            residuals,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DiagnosticsReport {
    pub checks: Vec<CheckResult>,
}

impl DiagnosticsReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn extend(&mut self, other: DiagnosticsReport) {
        self.checks.extend(other.checks);
    }

    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }

    /// Fixed-width pass/fail table.
    pub fn render_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(5).max(5);
        let mut out = format!(
            "{:<width$}  {:>6}  {:>14}  {:>10}\n",
            "check", "result", "max residual", "tolerance"
        );
        for c in &self.checks {
            out.push_str(&format!(
                "{:<width$}  {:>6}  {:>14.6e}  {:>10.1e}\n",
                c.name,
                if c.pass { "PASS" } else { "FAIL" },
                c.max_residual,
                c.tolerance
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_iff_residual_within_tolerance() {
        let c = CheckResult::new("a", "g", 1e-6, vec![-3.0, 5e-7]);
        assert!(c.pass);
        assert_eq!(c.max_residual, 5e-7);
        let c = CheckResult::new("b", "g", 1e-6, vec![2e-6]);
        assert!(!c.pass);
        let c = CheckResult::new("c", "g", 1e-6, vec![-1.0, -2.0]);
        assert_eq!(c.max_residual, -1.0);
        assert!(c.pass);
        let c = CheckResult::new("nan", "g", 1e-6, vec![0.0, f64::NAN]);
        assert!(!c.pass);
    }

    #[test]
    fn table_lists_every_check() {
        let mut r = DiagnosticsReport::new();
        r.push(CheckResult::new("first", "g", 1.0, vec![0.0]));
        r.push(CheckResult::new("second", "g", 1.0, vec![2.0]));
        let t = r.render_table();
        assert!(t.contains("first") && t.contains("PASS"));
        assert!(t.contains("second") && t.contains("FAIL"));
        assert!(!r.pass());
    }
}

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub threshold: f64,
    pub measured: f64,
}

impl Row {
    /// NaN never passes.
    pub fn passed(&self) -> bool {
        self.measured < self.threshold
    }
}

/// Verification table: one invariant per row, plus free-form notes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Report {
    rows: Vec<Row>,
    notes: Vec<String>,
}

impl Report {
    pub fn row(&mut self, name: &str, threshold: f64, measured: f64) {
        self.rows.push(Row { name: name.to_string(), threshold, measured });
    }

    pub fn note(&mut self, text: String) {
        self.notes.push(text);
    }

    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(Row::passed)
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.rows.iter().map(|r| r.name.len()).chain(["invariant".len()]).max().unwrap_or(0);
        writeln!(f, "{:<width$}  {:>10}  {:>11}  result", "invariant", "threshold", "measured")?;
        for r in &self.rows {
            let status = if r.passed() { "PASS" } else { "FAIL" };
            writeln!(f, "{:<width$}  {:>10.1e}  {:>11.3e}  {status}", r.name, r.threshold, r.measured)?;
        }
        for n in &self.notes {
            writeln!(f, "# {n}")?;
        }
        let failed = self.rows.iter().filter(|r| !r.passed()).count();
        write!(f, "{} invariants, {failed} failed", self.rows.len())
    }
}

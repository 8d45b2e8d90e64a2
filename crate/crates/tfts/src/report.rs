//! Structured experiment records shared by the library checks and the CLI.

use serde::Serialize;

/// One compared quantity.
#[derive(Debug, Clone, Serialize)]
pub struct ReportRow {
    pub label: String,
    pub computed: f64,
    pub reference: f64,
    pub error: f64,
    pub tolerance: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub seed: Option<u64>,
    pub rows: Vec<ReportRow>,
    pub notes: Vec<String>,
    pub pass: bool,
}

impl ExperimentReport {
    pub fn new(name: impl Into<String>) -> Self {
        ExperimentReport { name: name.into(), params: Vec::new(), seed: None, rows: Vec::new(), notes: Vec::new(), pass: true }
    }

    pub fn param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    /// Records a relative-error comparison.
    pub fn relative(&mut self, label: impl Into<String>, computed: f64, reference: f64, tol: f64) -> bool {
        let err = if reference == 0.0 { computed.abs() } else { (computed / reference - 1.0).abs() };
        self.push(label, computed, reference, err, tol)
    }

    /// Records an absolute-error comparison.
    pub fn absolute(&mut self, label: impl Into<String>, computed: f64, reference: f64, tol: f64) -> bool {
        self.push(label, computed, reference, (computed - reference).abs(), tol)
    }

    /// Records a row with a precomputed error measure.
    pub fn push(&mut self, label: impl Into<String>, computed: f64, reference: f64, error: f64, tol: f64) -> bool {
        let pass = error <= tol;
        self.pass &= pass;
        self.rows.push(ReportRow { label: label.into(), computed, reference, error, tolerance: tol, pass });
        pass
    }

    /// Records a condition that has no numeric reference.
    pub fn check(&mut self, label: impl Into<String>, ok: bool) -> bool {
        let v = if ok { 1.0 } else { 0.0 };
        self.push(label, v, 1.0, 1.0 - v, 0.0)
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    pub fn max_error(&self) -> f64 {
        self.rows.iter().map(|r| r.error).fold(0.0, f64::max)
    }

    /// Replaces the tolerance of every numeric comparison (rows with a finite,
    /// nonzero tolerance) and re-evaluates the verdict.
    pub fn retolerance(&mut self, tol: f64) {
        for r in self.rows.iter_mut() {
            if r.tolerance.is_finite() && r.tolerance > 0.0 {
                r.tolerance = tol;
                r.pass = r.error <= tol;
            }
        }
        self.pass = self.rows.iter().all(|r| r.pass);
    }

    /// Rows as CSV with 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        let num = |v: f64| format!("{v:.16e}");
        w.write_record(["label", "computed", "reference", "error", "tolerance", "pass"]).expect("in-memory write");
        for r in &self.rows {
            w.write_record([r.label.clone(), num(r.computed), num(r.reference), num(r.error), num(r.tolerance), r.pass.to_string()])
                .expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
    }

    pub fn merge(&mut self, other: ExperimentReport) {
        self.pass &= other.pass;
        for mut r in other.rows {
            r.label = format!("{}: {}", other.name, r.label);
            self.rows.push(r);
        }
        self.notes.extend(other.notes);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trips_seventeen_digits() {
        let mut r = ExperimentReport::new("x");
        r.relative("a, quoted", 0.1, 0.3, 1e-3);
        let text = r.to_csv();
        let mut rd = csv::Reader::from_reader(text.as_bytes());
        let row = rd.records().next().unwrap().unwrap();
        assert_eq!(&row[0], "a, quoted");
        assert_eq!(row[1].parse::<f64>().unwrap(), 0.1);
        assert_eq!(&row[5], "false");
    }

    #[test]
    fn retolerance_reevaluates() {
        let mut r = ExperimentReport::new("x");
        r.relative("a", 1.01, 1.0, 1e-3);
        r.check("ok", true);
        assert!(!r.pass);
        r.retolerance(0.02);
        assert!(r.pass);
        assert_eq!(r.rows[1].tolerance, 0.0);
    }
}

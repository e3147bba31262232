//! Reports and their text, CSV and JSON renderings.

use std::fs;
use std::path::Path;

use fpplab_core::tiling::DecayRow;
use serde_json::{json, Value};

/// Version of the `report.txt` layout.
pub const REPORT_FORMAT_VERSION: u32 = 1;
/// Version of the `report.json` schema.
pub const SCHEMA_VERSION: u32 = 1;

pub const CSV_HEADER: &str = "experiment,d,estimate,se,n,contamination";
pub const DECAY_HEADER: &str = "R,estimate,ci_lo,ci_hi,N";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok,
    Inconclusive,
    BudgetExceeded,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Ok => 0,
            Status::Inconclusive => 3,
            Status::BudgetExceeded => 4,
        }
    }

    fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Inconclusive => "inconclusive",
            Status::BudgetExceeded => "budget-exceeded",
        }
    }

    /// The more severe of two statuses.
    pub fn worst(self, other: Status) -> Status {
        let rank = |s: Status| match s {
            Status::Ok => 0,
            Status::Inconclusive => 1,
            Status::BudgetExceeded => 2,
        };
        if rank(other) > rank(self) {
            other
        } else {
            self
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub d: usize,
    pub estimate: f64,
    pub se: f64,
    pub n: usize,
    /// Fraction of replicates (or items) affected by the truncation frontier.
    pub contamination: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub experiment: String,
    pub config_echo: String,
    pub rows: Vec<Row>,
    /// Human-readable findings, one per line.
    pub notes: Vec<String>,
    /// Experiment-specific structured record.
    pub record: Value,
    pub decay: Vec<DecayRow>,
    /// Extra output files, by name.
    pub files: Vec<(String, String)>,
    pub flags: Vec<String>,
    pub status: Status,
}

impl Report {
    pub fn new(experiment: &str, config_echo: String) -> Self {
        Report {
            experiment: experiment.to_string(),
            config_echo,
            rows: Vec::new(),
            notes: Vec::new(),
            record: Value::Null,
            decay: Vec::new(),
            files: Vec::new(),
            flags: Vec::new(),
            status: Status::Ok,
        }
    }

    pub fn note(&mut self, line: impl Into<String>) {
        self.notes.push(line.into());
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{},{},{},{},{},{}\n", self.experiment, r.d, r.estimate, r.se, r.n, r.contamination));
        }
        out
    }

    pub fn decay_csv(&self) -> String {
        let mut out = String::from(DECAY_HEADER);
        out.push('\n');
        for r in &self.decay {
            out.push_str(&r.csv());
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| json!({ "d": r.d, "estimate": r.estimate, "se": r.se, "n": r.n, "contamination": r.contamination }))
            .collect();
        let decay: Vec<Value> = self
            .decay
            .iter()
            .map(|r| json!({ "R": r.radius, "estimate": r.estimate, "ci_lo": r.ci_lo, "ci_hi": r.ci_hi, "N": r.n, "successes": r.successes }))
            .collect();
        let doc = json!({
            "schema_version": SCHEMA_VERSION,
            "experiment": self.experiment,
            "status": self.status.name(),
            "config": self.config_echo,
            "rows": rows,
            "decay": decay,
            "flags": self.flags,
            "notes": self.notes,
            "record": self.record,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("reports serialize");
        s.push('\n');
        s
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("fpplab report (format {REPORT_FORMAT_VERSION})\nexperiment: {}\nstatus: {}\n", self.experiment, self.status.name());
        for f in &self.flags {
            out.push_str(&format!("FLAG: {f}\n"));
        }
        out.push_str("\n[config]\n");
        out.push_str(&self.config_echo);
        if !self.config_echo.ends_with('\n') {
            out.push('\n');
        }
        if !self.rows.is_empty() {
            out.push_str("\n[estimates]\n");
            out.push_str(&format!("{:>6} {:>14} {:>12} {:>8} {:>13}\n", "d", "estimate", "se", "n", "contamination"));
            for r in &self.rows {
                out.push_str(&format!(
                    "{:>6} {:>14.6} {:>12.6} {:>8} {:>13.4}\n",
                    r.d, r.estimate, r.se, r.n, r.contamination
                ));
            }
        }
        if !self.decay.is_empty() {
            out.push_str("\n[decay]\n");
            for r in &self.decay {
                out.push_str(&format!("R={} estimate={:.6} ci=[{:.6}, {:.6}] N={}\n", r.radius, r.estimate, r.ci_lo, r.ci_hi, r.n));
            }
        }
        if !self.notes.is_empty() {
            out.push_str("\n[findings]\n");
            for n in &self.notes {
                out.push_str(n);
                out.push('\n');
            }
        }
        out
    }

    /// Writes `report.txt`, `report.csv`, `report.json`, `decay.csv` when
    /// there are decay rows, and any extra files.
    pub fn write_to(&self, dir: &Path) -> std::io::Result<()> {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("report.txt"), self.to_text())?;
        fs::write(dir.join("report.csv"), self.to_csv())?;
        fs::write(dir.join("report.json"), self.to_json())?;
        if !self.decay.is_empty() {
            fs::write(dir.join("decay.csv"), self.decay_csv())?;
        }
        for (name, body) in &self.files {
            fs::write(dir.join(name), body)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renderings_agree() {
        let mut r = Report::new("time-constant", "seed = 1\n".into());
        r.rows.push(Row { d: 20, estimate: 1.5, se: 0.001, n: 100, contamination: 0.0 });
        assert_eq!(r.to_csv(), "experiment,d,estimate,se,n,contamination\ntime-constant,20,1.5,0.001,100,0\n");
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rows"][0]["estimate"], 1.5);
        assert_eq!(v["schema_version"], SCHEMA_VERSION);
        assert!(r.to_text().contains("seed = 1"));
        assert_eq!(r.to_json(), r.clone().to_json());
    }

    #[test]
    fn statuses() {
        assert_eq!(Status::Ok.worst(Status::Inconclusive), Status::Inconclusive);
        assert_eq!(Status::BudgetExceeded.worst(Status::Inconclusive), Status::BudgetExceeded);
        assert_eq!(Status::BudgetExceeded.exit_code(), 4);
    }
}

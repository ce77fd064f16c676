use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const SCHEMA: &str = "sp4cert-report";
pub const SCHEMA_VERSION: u32 = 1;

/// One checked instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub instance: String,
    pub p: Option<u32>,
    pub i: Option<u32>,
    pub j: Option<u32>,
    /// Size of the enumerated object: tuples, group order or table cells.
    pub order: Option<u64>,
    /// Name of the measured quantity, e.g. `max_abs` or `violations`.
    pub quantity: String,
    pub measured: f64,
    pub bound: Option<f64>,
    pub margin: Option<f64>,
    pub mode: String,
    pub pass: bool,
    pub detail: serde_json::Value,
}

impl Record {
    fn key(&self) -> (String, Option<u32>, Option<u32>, Option<u32>, String) {
        (self.suite.clone(), self.p, self.i, self.j, self.instance.clone())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub suite: String,
    pub instance: String,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Environment {
    pub tool: String,
    pub version: String,
    pub os: String,
    pub arch: String,
}

impl Environment {
    pub fn current() -> Self {
        Environment {
            tool: "sp4cert".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            os: std::env::consts::OS.into(),
            arch: std::env::consts::ARCH.into(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Timing {
    pub total_ms: u64,
    pub per_suite_ms: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub schema: String,
    pub schema_version: u32,
    pub suites: Vec<String>,
    pub config: RunConfig,
    pub records: Vec<Record>,
    pub skipped: Vec<Skipped>,
    pub pass: bool,
    pub environment: Environment,
    pub timing: Timing,
}

impl SuiteReport {
    pub fn new(config: RunConfig) -> Self {
        SuiteReport {
            schema: SCHEMA.into(),
            schema_version: SCHEMA_VERSION,
            suites: Vec::new(),
            config,
            records: Vec::new(),
            skipped: Vec::new(),
            pass: true,
            environment: Environment::current(),
            timing: Timing::default(),
        }
    }

    /// Appends another report's records and restores the canonical order.
    pub fn merge(&mut self, other: SuiteReport) {
        for s in other.suites {
            if !self.suites.contains(&s) {
                self.suites.push(s);
            }
        }
        self.records.extend(other.records);
        self.skipped.extend(other.skipped);
        self.timing.per_suite_ms.extend(other.timing.per_suite_ms);
        self.timing.total_ms += other.timing.total_ms;
        self.finish();
    }

    /// Sorts by instance key and recomputes the global flag.
    pub fn finish(&mut self) {
        self.suites.sort();
        self.records.sort_by_key(|r| r.key());
        self.skipped.sort_by(|a, b| (&a.suite, &a.instance).cmp(&(&b.suite, &b.instance)));
        self.pass = self.records.iter().all(|r| r.pass);
    }

    pub fn failures(&self) -> usize {
        self.records.iter().filter(|r| !r.pass).count()
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).map_err(|e| CliError::Internal(e.to_string()))?;
                s.push('\n');
                Ok(s)
            }
            Format::Csv => self.to_csv(),
            Format::Text => Ok(self.to_text()),
        }
    }

    pub fn from_json(text: &str) -> Result<SuiteReport, CliError> {
        let r: SuiteReport = serde_json::from_str(text).map_err(|e| CliError::Config(format!("not a report: {e}")))?;
        if r.schema != SCHEMA || r.schema_version != SCHEMA_VERSION {
            return Err(CliError::Config(format!("unsupported schema {} v{}", r.schema, r.schema_version)));
        }
        Ok(r)
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let quantity = match self.records.first() {
            Some(first) if self.records.iter().all(|r| r.quantity == first.quantity) => first.quantity.clone(),
            _ => "measured".to_string(),
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| CliError::Internal(e.to_string());
        w.write_record(["suite", "instance", "p", "i", "j", "order", &quantity, "bound", "margin", "mode", "pass"]).map_err(err)?;
        let opt = |x: Option<u32>| x.map(|v| v.to_string()).unwrap_or_default();
        for r in &self.records {
            w.write_record([
                r.suite.clone(),
                r.instance.clone(),
                opt(r.p),
                opt(r.i),
                opt(r.j),
                r.order.map(|v| v.to_string()).unwrap_or_default(),
                r.measured.to_string(),
                r.bound.map(|v| v.to_string()).unwrap_or_default(),
                r.margin.map(|v| v.to_string()).unwrap_or_default(),
                r.mode.clone(),
                r.pass.to_string(),
            ])
            .map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
    }

    fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} v{} ({} {})", SCHEMA, SCHEMA_VERSION, self.environment.tool, self.environment.version);
        let _ = writeln!(out, "{:<10} {:>8} {:>8} {:>14}", "suite", "records", "failed", "worst margin");
        let mut suites: BTreeMap<&str, (usize, usize, Option<f64>)> = BTreeMap::new();
        for s in &self.suites {
            suites.entry(s.as_str()).or_default();
        }
        for r in &self.records {
            let e = suites.entry(r.suite.as_str()).or_default();
            e.0 += 1;
            e.1 += usize::from(!r.pass);
            if let Some(m) = r.margin {
                e.2 = Some(e.2.map_or(m, |w: f64| w.min(m)));
            }
        }
        for (s, (n, bad, worst)) in &suites {
            let worst = worst.map(|w| format!("{w:.6e}")).unwrap_or_else(|| "-".into());
            let _ = writeln!(out, "{s:<10} {n:>8} {bad:>8} {worst:>14}");
        }
        for r in self.records.iter().filter(|r| !r.pass) {
            let _ = writeln!(out, "FAIL {} {}: {} = {}", r.suite, r.instance, r.quantity, r.measured);
        }
        for s in &self.skipped {
            let _ = writeln!(out, "skipped {} {}: {}", s.suite, s.instance, s.reason);
        }
        let _ = writeln!(out, "{}", if self.pass { "PASS" } else { "FAIL" });
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn record(suite: &str, i: u32, pass: bool) -> Record {
        Record {
            suite: suite.into(),
            instance: format!("({i},1)"),
            p: Some(3),
            i: Some(i),
            j: Some(1),
            order: Some(27),
            quantity: "max_abs".into(),
            measured: 0.1 * i as f64,
            bound: Some(1.0),
            margin: Some(1.0 - 0.1 * i as f64),
            mode: "exhaustive".into(),
            pass,
            detail: serde_json::json!({ "note": i }),
        }
    }

    #[test]
    fn empty_report_is_a_valid_document() {
        let mut r = SuiteReport::new(RunConfig::default());
        r.finish();
        let js = r.render(Format::Json).unwrap();
        let back = SuiteReport::from_json(&js).unwrap();
        assert_eq!(back, r);
        assert!(back.pass && back.records.is_empty());
        assert!(js.contains("\"schema_version\": 1"));
        let csv = r.render(Format::Csv).unwrap();
        assert!(csv.starts_with("suite,instance,p,i,j,order,measured,bound,margin,mode,pass"));
    }

    #[test]
    fn merge_is_order_stable() {
        let mut a = SuiteReport::new(RunConfig::default());
        a.suites.push("gauss".into());
        a.records = vec![record("gauss", 3, true), record("gauss", 1, true)];
        let mut b = SuiteReport::new(RunConfig::default());
        b.suites.push("gauss".into());
        b.records = vec![record("gauss", 2, false)];
        let mut ab = a.clone();
        ab.merge(b.clone());
        let mut ba = b;
        ba.merge(a);
        assert_eq!(ab.records, ba.records);
        assert_eq!(ab.records.iter().map(|r| r.i.unwrap()).collect::<Vec<_>>(), [1, 2, 3]);
        assert!(!ab.pass);
        let js = ab.render(Format::Json).unwrap();
        assert_eq!(SuiteReport::from_json(&js).unwrap(), ab);
        let csv = ab.render(Format::Csv).unwrap();
        assert!(csv.starts_with("suite,instance,p,i,j,order,max_abs,bound,margin,mode,pass"));
        assert!(ab.render(Format::Text).unwrap().contains("FAIL gauss (2,1)"));
    }
}

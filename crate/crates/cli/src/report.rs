use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::Duration;

use lctrs::confluence::{Criterion, Report, Verdict};

/// The human-readable report. The first line is the verdict.
pub fn text(report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "{}", report.verdict.label()).unwrap();
    if let Verdict::Yes(proof) = &report.verdict {
        writeln!(out, "{}", proof.criterion).unwrap();
    }
    if !report.critical_pairs.is_empty() || !matches!(report.verdict, Verdict::Timeout) {
        writeln!(out, "critical pairs: {}", report.critical_pairs.len()).unwrap();
        for (i, cp) in report.critical_pairs.iter().enumerate() {
            writeln!(out, "  {}. {cp}", i + 1).unwrap();
        }
    }
    match &report.verdict {
        Verdict::Yes(proof) => {
            writeln!(out, "proof:").unwrap();
            out.push_str(&proof.to_string());
        }
        Verdict::Maybe(reasons) => {
            writeln!(out, "reasons:").unwrap();
            for r in reasons {
                writeln!(out, "  {r}").unwrap();
            }
        }
        Verdict::Timeout => {}
    }
    writeln!(out, "time: {} ms", report.elapsed.as_millis()).unwrap();
    out
}

/// One `key=value` line per fact.
pub fn kv(report: &Report) -> String {
    let mut out = String::new();
    writeln!(out, "verdict={}", report.verdict.label()).unwrap();
    if let Some(c) = report.verdict.criterion() {
        writeln!(out, "method={c}").unwrap();
    }
    writeln!(out, "critical_pairs={}", report.critical_pairs.len()).unwrap();
    for (c, r) in &report.outcomes {
        if let Err(reasons) = r {
            for why in reasons {
                writeln!(out, "reason.{}={why}", c.code()).unwrap();
            }
        }
    }
    writeln!(out, "time_ms={}", report.elapsed.as_millis()).unwrap();
    out
}

pub enum BenchOutcome {
    Verdict(&'static str, Option<Criterion>),
    Error(String),
}

pub struct BenchRow {
    pub name: String,
    pub outcome: BenchOutcome,
    pub elapsed: Duration,
}

/// Per-file lines followed by counts per verdict and per method.
pub fn bench(rows: &[BenchRow], kv: bool) -> String {
    let mut out = String::new();
    let mut verdicts: BTreeMap<&str, usize> = BTreeMap::new();
    let mut methods: BTreeMap<String, usize> = BTreeMap::new();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
    for row in rows {
        let ms = row.elapsed.as_millis();
        let (verdict, method) = match &row.outcome {
            BenchOutcome::Verdict(v, c) => (*v, c.map(|c| c.name().to_string()).unwrap_or_default()),
            BenchOutcome::Error(_) => ("ERROR", String::new()),
        };
        *verdicts.entry(verdict).or_default() += 1;
        if !method.is_empty() {
            *methods.entry(method.clone()).or_default() += 1;
        }
        if kv {
            writeln!(out, "file={} verdict={verdict} method={method} time_ms={ms}", row.name).unwrap();
        } else {
            writeln!(out, "{:width$}  {verdict:7}  {method:24}  {ms} ms", row.name).unwrap();
        }
        if let BenchOutcome::Error(msg) = &row.outcome {
            for line in msg.lines() {
                writeln!(out, "  {line}").unwrap();
            }
        }
    }
    if kv {
        writeln!(out, "total={}", rows.len()).unwrap();
        for (v, n) in &verdicts {
            writeln!(out, "verdict.{v}={n}").unwrap();
        }
        for (m, n) in &methods {
            writeln!(out, "method.{}={n}", m.replace(' ', "_")).unwrap();
        }
    } else {
        writeln!(out, "total: {}", rows.len()).unwrap();
        for (v, n) in &verdicts {
            writeln!(out, "  {v}: {n}").unwrap();
        }
        for (m, n) in &methods {
            writeln!(out, "  {m}: {n}").unwrap();
        }
    }
    out
}

//! Line-oriented `key=value` serialization of explanations.
//!
//! Clause values use DIMACS literal lists terminated by `0`. Keys starting
//! with `time.` carry wall-clock data and are the only fields that differ
//! between repeated runs.

use std::fmt::Write as _;

use thiserror::Error;

use crate::formula::{parse_dimacs, Clause, Literal, Normalized};

use super::{Explanation, Mode, VerificationReport};

pub const RECORD_FORMAT: &str = "reconcile-explanation/1";

fn clause_value(c: &Clause) -> String {
    let mut s = String::new();
    for l in c.lits() {
        write!(s, "{} ", l.to_dimacs()).unwrap();
    }
    s.push('0');
    s
}

/// Structured records for `e`, optionally with its verification outcome.
pub fn write_records(e: &Explanation, verification: Option<&VerificationReport>) -> String {
    let mut out = String::new();
    let mut kv = |k: &str, v: &dyn std::fmt::Display| writeln!(out, "{k}={v}").unwrap();
    kv("format", &RECORD_FORMAT);
    kv("mode", &e.mode);
    kv("support_size", &e.support.len());
    kv("update_size", &e.update.len());
    kv("removed_size", &e.removed_from_kb_h.len());
    kv("iterations", &e.stats.iterations);
    kv("mcs_count", &e.stats.mcs_count);
    kv("oracle_calls", &e.stats.oracle_calls);
    let seeds: Vec<String> = e.stats.seed_sizes.iter().map(|s| s.to_string()).collect();
    kv("seed_sizes", &seeds.join(" "));
    for c in &e.support {
        kv("support", &clause_value(c));
    }
    for c in &e.update {
        kv("update", &clause_value(c));
    }
    for c in &e.removed_from_kb_h {
        kv("removed", &clause_value(c));
    }
    if let Some(v) = verification {
        kv("verify.entailment", &v.entailment);
        kv("verify.minimality", &v.minimality);
        kv("verify.consistency", &v.consistency);
    }
    kv("time.elapsed_ms", &format!("{:.3}", e.stats.elapsed.as_secs_f64() * 1e3));
    out
}

/// Human-readable summary of `e`.
pub fn write_text(e: &Explanation, verification: Option<&VerificationReport>) -> String {
    let mut out = String::new();
    let list = |out: &mut String, title: &str, cs: &[Clause]| {
        writeln!(out, "{title} ({}):", cs.len()).unwrap();
        for c in cs {
            let lits: Vec<String> = c.lits().iter().map(|l| l.to_dimacs().to_string()).collect();
            writeln!(out, "  ({})", lits.join(" ∨ ")).unwrap();
        }
    };
    writeln!(out, "mode: {}", e.mode).unwrap();
    list(&mut out, "support", &e.support);
    list(&mut out, "update", &e.update);
    if !e.removed_from_kb_h.is_empty() {
        list(&mut out, "removed from human KB", &e.removed_from_kb_h);
    }
    writeln!(
        out,
        "iterations: {}, MCSes: {}, oracle calls: {}, elapsed: {:.3}s",
        e.stats.iterations,
        e.stats.mcs_count,
        e.stats.oracle_calls,
        e.stats.elapsed.as_secs_f64()
    )
    .unwrap();
    if let Some(v) = verification {
        writeln!(out, "verification: {v}").unwrap();
    }
    out
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RecordError {
    #[error("line {line}: expected key=value")]
    NotKeyValue { line: usize },
    #[error("line {line}: malformed clause `{value}`")]
    BadClause { line: usize, value: String },
    #[error("line {line}: unsupported format `{value}`")]
    UnknownFormat { line: usize, value: String },
    #[error("explanation file has neither records nor a DIMACS header")]
    Unrecognized,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ParsedExplanation {
    pub mode: Option<Mode>,
    pub support: Vec<Clause>,
    pub update: Vec<Clause>,
    pub removed: Vec<Clause>,
}

fn parse_clause(value: &str, line: usize) -> Result<Clause, RecordError> {
    let bad = || RecordError::BadClause {
        line,
        value: value.to_string(),
    };
    let nums: Vec<i32> = value
        .split_whitespace()
        .map(str::parse)
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    match nums.split_last() {
        Some((0, lits)) if lits.iter().all(|&l| l != 0) => {
            match Clause::normalize(lits.iter().map(|&l| Literal::from_dimacs(l))) {
                Normalized::Clause(c) => Ok(c),
                Normalized::Tautology => Err(bad()),
            }
        }
        _ => Err(bad()),
    }
}

/// Read an explanation written by [`write_records`]. A plain DIMACS file is
/// also accepted and taken as the support.
pub fn parse_explanation_records(text: &str) -> Result<ParsedExplanation, RecordError> {
    if !text.lines().any(|l| l.starts_with("format=")) {
        if text.lines().any(|l| l.trim_start().starts_with("p ")) {
            let f = parse_dimacs(text).map_err(|_| RecordError::Unrecognized)?;
            return Ok(ParsedExplanation {
                support: f.clauses().to_vec(),
                ..Default::default()
            });
        }
        return Err(RecordError::Unrecognized);
    }
    let mut out = ParsedExplanation::default();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let raw = raw.trim();
        if raw.is_empty() || raw.starts_with('#') {
            continue;
        }
        let (key, value) = raw.split_once('=').ok_or(RecordError::NotKeyValue { line })?;
        match key {
            "format" if value != RECORD_FORMAT => {
                return Err(RecordError::UnknownFormat {
                    line,
                    value: value.to_string(),
                })
            }
            "mode" => out.mode = value.parse().ok(),
            "support" => out.support.push(parse_clause(value, line)?),
            "update" => out.update.push(parse_clause(value, line)?),
            "removed" => out.removed.push(parse_clause(value, line)?),
            _ => {}
        }
    }
    Ok(out)
}

/// Drop `time.*` records, leaving the deterministic part of a report.
pub fn strip_timing(records: &str) -> String {
    records
        .lines()
        .filter(|l| !l.starts_with("time.") && !l.contains(".time."))
        .map(|l| format!("{l}\n"))
        .collect()
}

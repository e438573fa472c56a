//! Rendering reports, corpus scoring, and per-pattern feature records.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::detectors::{DetectionReport, PatternId};
use crate::semantics::{DetectionContext, FileFacts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Text,
}

/// Render a report. JSON output is newline-terminated and has a fixed key order.
pub fn emit_report(report: &DetectionReport, format: Format) -> String {
    match format {
        Format::Json => to_json_line(report),
        Format::Text => report_table(report),
    }
}

fn to_json_line<T: Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string(value).expect("report types serialize");
    out.push('\n');
    out
}

fn report_table(report: &DetectionReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pair: {}", report.pair_id);
    if report.unanalyzable {
        let _ = writeln!(out, "status: unanalyzable");
    }
    let classes: Vec<&str> = report.classes_considered.iter().map(|c| c.as_str()).collect();
    let _ = writeln!(out, "classes: {}", if classes.is_empty() { "-".to_string() } else { classes.join(", ") });
    let _ = writeln!(out, "{:<26} {:<8} evidence", "pattern", "detected");
    for v in &report.verdicts {
        let evidence = v
            .evidence
            .iter()
            .map(|e| format!("{}:{} {}", e.file, e.line, e.note))
            .collect::<Vec<_>>()
            .join("; ");
        let mark = if v.detected { "yes" } else { "no" };
        let _ = writeln!(out, "{:<26} {:<8} {}", v.pattern.as_str(), mark, evidence);
    }
    if !report.warnings.is_empty() {
        let _ = writeln!(out, "warnings:");
        for w in &report.warnings {
            let _ = writeln!(out, "  {w}");
        }
    }
    // Trailing spaces come from empty evidence columns.
    out.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

/// Numeric summary of a pair. Deltas are fixed minus buggy unless noted.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Features {
    pub gate_call_count_delta: i64,
    /// Loop-expanded measurement totals.
    pub measure_count_delta: i64,
    /// Qubit slots whose Hadamard parity differs between the files.
    pub hadamard_parity_flips: i64,
    /// Buggy minus fixed.
    pub opaque_delta: i64,
    pub composite_delta: i64,
    /// Distinct circuit names over both files.
    pub circuit_count: i64,
    /// Distinct register names over both files.
    pub register_count: i64,
}

impl Features {
    pub const KEYS: [&'static str; 7] = [
        "gate_call_count_delta",
        "measure_count_delta",
        "hadamard_parity_flips",
        "opaque_delta",
        "composite_delta",
        "circuit_count",
        "register_count",
    ];

    pub fn of(ctx: &DetectionContext) -> Self {
        let (b, f) = (&ctx.buggy, &ctx.fixed);
        let total = |facts: &FileFacts| facts.measurement_totals().values().sum::<u64>() as i64;
        let parity_flips = b
            .hadamards
            .counts
            .iter()
            .flat_map(|(circuit, slots)| slots.iter().map(move |(q, n)| (circuit, q, n)))
            .filter(|(circuit, q, n)| {
                f.hadamards
                    .counts
                    .get(*circuit)
                    .and_then(|s| s.get(q))
                    .is_some_and(|m| *m % 2 != **n % 2)
            })
            .count();
        let circuits: BTreeSet<&String> =
            b.circuits.entries.keys().chain(f.circuits.entries.keys()).collect();
        let registers: BTreeSet<&String> =
            b.registers.entries.keys().chain(f.registers.entries.keys()).collect();
        Features {
            gate_call_count_delta: f.gate_calls.len() as i64 - b.gate_calls.len() as i64,
            measure_count_delta: total(f) - total(b),
            hadamard_parity_flips: parity_flips as i64,
            opaque_delta: b.opaque.count as i64 - f.opaque.count as i64,
            composite_delta: f.composite_wraps.len() as i64 - b.composite_wraps.len() as i64,
            circuit_count: circuits.len() as i64,
            register_count: registers.len() as i64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRecord {
    pub pair_id: String,
    pub pattern: PatternId,
    pub detected: bool,
    pub features: Features,
}

/// One record per pattern, in [`PatternId::ALL`] order.
pub fn feature_records(ctx: &DetectionContext, report: &DetectionReport) -> Vec<FeatureRecord> {
    let features = Features::of(ctx);
    PatternId::ALL
        .into_iter()
        .map(|pattern| FeatureRecord {
            pair_id: report.pair_id.clone(),
            pattern,
            detected: report.verdict(pattern).is_some_and(|v| v.detected),
            features,
        })
        .collect()
}

/// Newline-delimited JSON for a batch of records.
pub fn emit_feature_records(records: &[FeatureRecord]) -> String {
    records.iter().map(to_json_line).collect()
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternScore {
    pub true_pos: usize,
    pub false_pos: usize,
    pub true_neg: usize,
    pub false_neg: usize,
}

impl PatternScore {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_pos + self.true_neg + self.false_neg
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseDiff {
    pub case: String,
    pub expected: BTreeSet<PatternId>,
    pub detected: BTreeSet<PatternId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseError {
    pub case: String,
    pub message: String,
}

/// What a single corpus case produced.
#[derive(Debug, Clone)]
pub enum CaseOutcome {
    Scored {
        case: String,
        expected: BTreeSet<PatternId>,
        report: DetectionReport,
    },
    Failed(CaseError),
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusScore {
    pub cases: usize,
    pub scores: BTreeMap<PatternId, PatternScore>,
    pub mismatches: Vec<CaseDiff>,
    pub errors: Vec<CaseError>,
}

impl CorpusScore {
    /// Tally outcomes, which must already be ordered by case name.
    pub fn tally(outcomes: &[CaseOutcome]) -> Self {
        let mut score = CorpusScore {
            scores: PatternId::ALL.into_iter().map(|p| (p, PatternScore::default())).collect(),
            ..CorpusScore::default()
        };
        for outcome in outcomes {
            score.cases += 1;
            let (case, expected, report) = match outcome {
                CaseOutcome::Failed(err) => {
                    score.errors.push(err.clone());
                    continue;
                }
                CaseOutcome::Scored { case, expected, report } => (case, expected, report),
            };
            let detected = report.detected();
            for (pattern, s) in score.scores.iter_mut() {
                match (expected.contains(pattern), detected.contains(pattern)) {
                    (true, true) => s.true_pos += 1,
                    (false, true) => s.false_pos += 1,
                    (false, false) => s.true_neg += 1,
                    (true, false) => s.false_neg += 1,
                }
            }
            if &detected != expected {
                score.mismatches.push(CaseDiff {
                    case: case.clone(),
                    expected: expected.clone(),
                    detected,
                });
            }
        }
        score
    }

    pub fn is_clean(&self) -> bool {
        self.mismatches.is_empty() && self.errors.is_empty()
    }

    pub fn emit(&self, format: Format) -> String {
        match format {
            Format::Json => to_json_line(self),
            Format::Text => self.table(),
        }
    }

    fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "cases: {}", self.cases);
        let _ = writeln!(out, "{:<26} {:>4} {:>4} {:>4} {:>4}", "pattern", "tp", "fp", "tn", "fn");
        for (p, s) in &self.scores {
            let _ = writeln!(
                out,
                "{:<26} {:>4} {:>4} {:>4} {:>4}",
                p.as_str(),
                s.true_pos,
                s.false_pos,
                s.true_neg,
                s.false_neg
            );
        }
        let names = |set: &BTreeSet<PatternId>| {
            if set.is_empty() {
                "{}".to_string()
            } else {
                set.iter().map(|p| p.as_str()).collect::<Vec<_>>().join(", ")
            }
        };
        for m in &self.mismatches {
            let _ = writeln!(
                out,
                "mismatch {}: expected {} detected {}",
                m.case,
                names(&m.expected),
                names(&m.detected)
            );
        }
        for e in &self.errors {
            let _ = writeln!(out, "error {}: {}", e.case, e.message);
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::detectors::detect_all;
    use crate::pairio::CodePair;
    use crate::semantics::{build_context, StandardGateTable};

    fn ctx(buggy: &str, fixed: &str) -> DetectionContext {
        build_context(&CodePair::from_sources("p", buggy, fixed), &StandardGateTable::default())
    }

    #[test]
    fn json_key_order_and_round_trip() {
        let c = ctx("qc = QuantumCircuit(2)\nqc.h(0)\n", "qc = QuantumCircuit(2)\nqc.h(1)\n");
        let report = detect_all(&c);
        let json = emit_report(&report, Format::Json);
        assert!(json.ends_with('\n'));
        let keys = ["\"pair_id\"", "\"unanalyzable\"", "\"classes_considered\"", "\"patterns\"", "\"warnings\""];
        let at: Vec<usize> = keys.iter().map(|k| json.find(k).unwrap()).collect();
        assert!(at.windows(2).all(|w| w[0] < w[1]));
        let back: DetectionReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn all_false_report_has_seven_entries() {
        let src = "qc = QuantumCircuit(2)\nqc.h(0)\n";
        let json = emit_report(&detect_all(&ctx(src, src)), Format::Json);
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        let patterns = v["patterns"].as_array().unwrap();
        assert_eq!(patterns.len(), 7);
        assert!(patterns.iter().all(|p| p["detected"] == false));
    }

    #[test]
    fn text_table_lists_every_pattern() {
        let text = emit_report(&detect_all(&ctx("", "")), Format::Text);
        for id in PatternId::ALL {
            assert!(text.contains(id.as_str()));
        }
        assert!(text.lines().all(|l| l == l.trim_end()));
    }

    #[test]
    fn features_of_identical_files_are_zero_deltas() {
        let src = "qr = QuantumRegister(2)\nqc = QuantumCircuit(qr)\nqc.h(0)\nqc.measure_all()\n";
        let c = ctx(src, src);
        let records = feature_records(&c, &detect_all(&c));
        assert_eq!(records.len(), 7);
        let f = records[0].features;
        assert_eq!((f.gate_call_count_delta, f.measure_count_delta, f.hadamard_parity_flips), (0, 0, 0));
        assert_eq!((f.opaque_delta, f.composite_delta), (0, 0));
        assert_eq!((f.circuit_count, f.register_count), (1, 1));
    }

    #[test]
    fn feature_keys_are_fixed() {
        let line = emit_feature_records(&feature_records(&ctx("", ""), &detect_all(&ctx("", ""))));
        for l in line.lines() {
            let v: serde_json::Value = serde_json::from_str(l).unwrap();
            let keys: Vec<&str> = v["features"].as_object().unwrap().keys().map(String::as_str).collect();
            let mut expected = Features::KEYS.to_vec();
            expected.sort_unstable();
            assert_eq!(keys, expected);
        }
    }

    #[test]
    fn tally_counts_and_mismatches() {
        let src = "qc = QuantumCircuit(2)\nqc.h(0)\n";
        let clean = detect_all(&ctx(src, src));
        let outcomes = vec![
            CaseOutcome::Scored { case: "a".into(), expected: BTreeSet::new(), report: clean.clone() },
            CaseOutcome::Scored {
                case: "b".into(),
                expected: BTreeSet::from([PatternId::UnequalBits]),
                report: clean,
            },
            CaseOutcome::Failed(CaseError { case: "c".into(), message: "boom".into() }),
        ];
        let score = CorpusScore::tally(&outcomes);
        assert_eq!(score.cases, 3);
        assert_eq!(score.mismatches.len(), 1);
        assert_eq!(score.mismatches[0].case, "b");
        assert_eq!(score.scores[&PatternId::UnequalBits].false_neg, 1);
        assert!(score.scores.values().all(|s| s.total() == 2));
        assert!(!score.is_clean());
        assert!(CorpusScore::tally(&[]).is_clean());
    }
}

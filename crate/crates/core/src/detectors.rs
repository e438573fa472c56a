//! The seven bug-fix pattern detectors and the report assembler.
//!
//! Every detector is a pure function of a [`DetectionContext`]. A detector
//! whose pattern class was pruned by the coarse filter reports `false`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::filters::PatternClass;
use crate::pyast::{unparse_expr, Expr};
use crate::semantics::{DetectionContext, FileFacts, GateCall, MeasureCall};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternId {
    IncorrectInitialization,
    UnequalBits,
    IncorrectStandardGate,
    IncorrectOpaqueGate,
    IncorrectHadamard,
    IncorrectMeasurement,
    ExcessiveMeasurement,
}

impl PatternId {
    pub const ALL: [PatternId; 7] = [
        PatternId::IncorrectInitialization,
        PatternId::UnequalBits,
        PatternId::IncorrectStandardGate,
        PatternId::IncorrectOpaqueGate,
        PatternId::IncorrectHadamard,
        PatternId::IncorrectMeasurement,
        PatternId::ExcessiveMeasurement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternId::IncorrectInitialization => "incorrect_initialization",
            PatternId::UnequalBits => "unequal_bits",
            PatternId::IncorrectStandardGate => "incorrect_standard_gate",
            PatternId::IncorrectOpaqueGate => "incorrect_opaque_gate",
            PatternId::IncorrectHadamard => "incorrect_hadamard",
            PatternId::IncorrectMeasurement => "incorrect_measurement",
            PatternId::ExcessiveMeasurement => "excessive_measurement",
        }
    }

    pub fn class(self) -> PatternClass {
        match self {
            PatternId::IncorrectInitialization | PatternId::UnequalBits => {
                PatternClass::Initialization
            }
            PatternId::IncorrectStandardGate
            | PatternId::IncorrectOpaqueGate
            | PatternId::IncorrectHadamard => PatternClass::Operation,
            PatternId::IncorrectMeasurement | PatternId::ExcessiveMeasurement => {
                PatternClass::Measurement
            }
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown pattern id '{0}'")]
pub struct UnknownPattern(pub String);

impl FromStr for PatternId {
    type Err = UnknownPattern;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PatternId::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| UnknownPattern(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Buggy,
    Fixed,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Buggy => "buggy",
            Side::Fixed => "fixed",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evidence {
    pub file: Side,
    pub line: usize,
    pub note: String,
}

impl Evidence {
    fn new(file: Side, line: usize, note: impl Into<String>) -> Self {
        Evidence {
            file,
            line,
            note: note.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternVerdict {
    #[serde(rename = "id")]
    pub pattern: PatternId,
    pub detected: bool,
    pub evidence: Vec<Evidence>,
}

impl PatternVerdict {
    pub fn negative(pattern: PatternId) -> Self {
        PatternVerdict {
            pattern,
            detected: false,
            evidence: Vec::new(),
        }
    }

    fn from_evidence(pattern: PatternId, evidence: Vec<Evidence>) -> Self {
        PatternVerdict {
            pattern,
            detected: !evidence.is_empty(),
            evidence,
        }
    }
}

/// One verdict per pattern, in [`PatternId::ALL`] order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub pair_id: String,
    pub unanalyzable: bool,
    pub classes_considered: BTreeSet<PatternClass>,
    #[serde(rename = "patterns")]
    pub verdicts: Vec<PatternVerdict>,
    pub warnings: Vec<String>,
}

impl DetectionReport {
    pub fn verdict(&self, id: PatternId) -> Option<&PatternVerdict> {
        self.verdicts.iter().find(|v| v.pattern == id)
    }

    pub fn detected(&self) -> BTreeSet<PatternId> {
        self.verdicts
            .iter()
            .filter(|v| v.detected)
            .map(|v| v.pattern)
            .collect()
    }

    /// Keep only the listed patterns' verdicts.
    pub fn restrict_to(&mut self, keep: &BTreeSet<PatternId>) {
        self.verdicts.retain(|v| keep.contains(&v.pattern));
    }
}

fn call_text(call: &GateCall) -> String {
    format!("{}.{}({})", call.circuit, call.gate, args_text(&call.qubit_args))
}

fn args_text(args: &[Expr]) -> String {
    args.iter().map(unparse_expr).collect::<Vec<_>>().join(", ")
}

fn measure_text(m: &MeasureCall) -> String {
    format!("{}.{}({})", m.circuit, m.variant, args_text(&m.args))
}

/// Gates acting on different qubits, or circuits built with a different
/// number of qubits.
pub fn detect_incorrect_initialization(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::IncorrectInitialization;
    if !should_run(ctx, id) {
        return PatternVerdict::negative(id);
    }
    let (b, f) = (&ctx.buggy, &ctx.fixed);
    let mut evidence = Vec::new();

    if !(b.gate_lines.is_empty() && f.gate_lines.is_empty()) {
        let by_gate = |facts: &FileFacts| {
            let mut groups: BTreeMap<String, Vec<GateCall>> = BTreeMap::new();
            for call in &facts.gate_calls {
                groups.entry(call.gate.clone()).or_default().push(call.clone());
            }
            groups
        };
        let (bg, fg) = (by_gate(b), by_gate(f));
        for (gate, buggy_calls) in &bg {
            let Some(fixed_calls) = fg.get(gate) else {
                continue;
            };
            for (bc, fc) in buggy_calls.iter().zip(fixed_calls) {
                if bc.qubit_args != fc.qubit_args {
                    evidence.push(Evidence::new(Side::Buggy, bc.line, call_text(bc)));
                    evidence.push(Evidence::new(Side::Fixed, fc.line, call_text(fc)));
                }
            }
        }
    }

    for (name, bc) in &b.circuits.entries {
        if let Some(fc) = f.circuits.get(name) {
            if bc.qubits != fc.qubits {
                evidence.push(Evidence::new(
                    Side::Buggy,
                    bc.line,
                    format!("circuit '{name}' has {} qubits", bc.qubits),
                ));
                evidence.push(Evidence::new(
                    Side::Fixed,
                    fc.line,
                    format!("circuit '{name}' has {} qubits", fc.qubits),
                ));
            }
        }
    }
    evidence.sort_by_key(|e| (e.file, e.line));
    evidence.dedup();
    PatternVerdict::from_evidence(id, evidence)
}

/// A circuit whose qubit and clbit counts differ in the buggy file and agree
/// in the fix.
pub fn detect_unequal_bits(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::UnequalBits;
    if !should_run(ctx, id) {
        return PatternVerdict::negative(id);
    }
    let mut evidence = Vec::new();
    for (name, bc) in &ctx.buggy.circuits.entries {
        let Some(fc) = ctx.fixed.circuits.get(name) else {
            continue;
        };
        if bc.qubits != bc.clbits && fc.qubits == fc.clbits {
            evidence.push(Evidence::new(
                Side::Buggy,
                bc.line,
                format!("circuit '{name}': {} qubits, {} clbits", bc.qubits, bc.clbits),
            ));
            evidence.push(Evidence::new(
                Side::Fixed,
                fc.line,
                format!("circuit '{name}': {} qubits, {} clbits", fc.qubits, fc.clbits),
            ));
        }
    }
    PatternVerdict::from_evidence(id, evidence)
}

/// Positionally paired gate calls naming two different built-in gates.
/// Circuit names are ignored.
pub fn detect_incorrect_standard_gate(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::IncorrectStandardGate;
    if !should_run(ctx, id) || (ctx.buggy.gate_lines.is_empty() && ctx.fixed.gate_lines.is_empty())
    {
        return PatternVerdict::negative(id);
    }
    let mut evidence = Vec::new();
    for (bc, fc) in ctx.buggy.gate_calls.iter().zip(&ctx.fixed.gate_calls) {
        if bc.gate != fc.gate && ctx.gates.contains(&bc.gate) && ctx.gates.contains(&fc.gate) {
            evidence.push(Evidence::new(Side::Buggy, bc.line, call_text(bc)));
            evidence.push(Evidence::new(Side::Fixed, fc.line, call_text(fc)));
        }
    }
    PatternVerdict::from_evidence(id, evidence)
}

/// Wide opaque gates removed and at least as many composite gates added.
pub fn detect_incorrect_opaque_gate(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::IncorrectOpaqueGate;
    if !should_run(ctx, id) {
        return PatternVerdict::negative(id);
    }
    let (b, f) = (&ctx.buggy, &ctx.fixed);
    let opaque_drop = b.opaque.count as i64 - f.opaque.count as i64;
    let composite_gain = f.composite_wraps.len() as i64 - b.composite_wraps.len() as i64;
    if opaque_drop <= 0 || composite_gain < opaque_drop {
        return PatternVerdict::negative(id);
    }
    let mut evidence: Vec<Evidence> = b
        .opaque
        .lines
        .iter()
        .map(|&l| Evidence::new(Side::Buggy, l, "opaque gate on three or more qubits"))
        .collect();
    evidence.extend(
        f.composite_wraps
            .iter()
            .map(|&l| Evidence::new(Side::Fixed, l, "composite gate from to_instruction()")),
    );
    PatternVerdict::from_evidence(id, evidence)
}

/// Whether the Hadamard parity change between the files repairs a wire.
///
/// Fires when some qubit goes from an odd to a nonzero even count and no
/// qubit goes from even to odd. Moving a single Hadamard between qubits is
/// not a repair, and neither is dropping a wire's only Hadamard: that is a
/// gate substitution or deletion, and the wire no longer rotates its basis.
pub fn hadamard_repaired(
    buggy: &BTreeMap<(String, i64), u32>,
    fixed: &BTreeMap<(String, i64), u32>,
) -> (Vec<(String, i64)>, bool) {
    let mut repaired = Vec::new();
    let mut broken = false;
    for (slot, &bc) in buggy {
        let Some(&fc) = fixed.get(slot) else {
            continue;
        };
        match (bc % 2, fc % 2) {
            (1, 0) if fc > 0 => repaired.push(slot.clone()),
            (0, 1) => broken = true,
            _ => {}
        }
    }
    let detected = !repaired.is_empty() && !broken;
    (repaired, detected)
}

fn flatten_ledger(facts: &FileFacts) -> BTreeMap<(String, i64), u32> {
    facts
        .hadamards
        .counts
        .iter()
        .flat_map(|(c, slots)| slots.iter().map(move |(q, n)| ((c.clone(), *q), *n)))
        .collect()
}

pub fn detect_incorrect_hadamard(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::IncorrectHadamard;
    if !should_run(ctx, id) {
        return PatternVerdict::negative(id);
    }
    let (b, f) = (flatten_ledger(&ctx.buggy), flatten_ledger(&ctx.fixed));
    let (repaired, detected) = hadamard_repaired(&b, &f);
    if !detected {
        return PatternVerdict::negative(id);
    }
    let mut evidence = Vec::new();
    for slot in &repaired {
        let (circuit, qubit) = slot;
        for (side, facts, count) in [(Side::Buggy, &ctx.buggy, b[slot]), (Side::Fixed, &ctx.fixed, f[slot])] {
            let sites = facts.hadamards.sites.get(slot).cloned().unwrap_or_default();
            let note = format!("'{circuit}' qubit {qubit}: {count} Hadamard(s)");
            if sites.is_empty() {
                let line = facts.circuits.get(circuit).map_or(0, |c| c.line);
                evidence.push(Evidence::new(side, line, note));
            } else {
                evidence.extend(sites.into_iter().map(|l| Evidence::new(side, l, note.clone())));
            }
        }
    }
    PatternVerdict::from_evidence(id, evidence)
}

fn filtered_measures(facts: &FileFacts) -> Vec<&MeasureCall> {
    facts
        .measure_calls
        .iter()
        .filter(|m| facts.measure_lines.entries.contains_key(&m.line))
        .collect()
}

type Differs = fn(&MeasureCall, &MeasureCall) -> bool;

/// Four-stage comparison of measurement calls: total count, variant order,
/// arguments, then position within each circuit's call sequence.
pub fn detect_incorrect_measurement(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::IncorrectMeasurement;
    if !should_run(ctx, id)
        || (ctx.buggy.measure_lines.is_empty() && ctx.fixed.measure_lines.is_empty())
    {
        return PatternVerdict::negative(id);
    }
    let (b, f) = (filtered_measures(&ctx.buggy), filtered_measures(&ctx.fixed));

    if b.len() != f.len() {
        let note = |m: &MeasureCall| format!("{} (measure calls: {} vs {})", measure_text(m), b.len(), f.len());
        let mut evidence: Vec<Evidence> =
            b.iter().map(|m| Evidence::new(Side::Buggy, m.line, note(m))).collect();
        evidence.extend(f.iter().map(|m| Evidence::new(Side::Fixed, m.line, note(m))));
        return PatternVerdict::from_evidence(id, evidence);
    }

    let pairs: Vec<(&MeasureCall, &MeasureCall)> = b.iter().copied().zip(f.iter().copied()).collect();
    let stages: [(&str, Differs); 3] = [
        ("measurement variant differs", |x, y| x.variant != y.variant),
        ("measurement arguments differ", |x, y| x.args != y.args),
        ("measurement moved within the circuit", |x, y| x.position != y.position),
    ];
    for (label, differs) in stages {
        let evidence: Vec<Evidence> = pairs
            .iter()
            .filter(|(x, y)| differs(x, y))
            .flat_map(|(x, y)| {
                [
                    Evidence::new(Side::Buggy, x.line, format!("{label}: {}", measure_text(x))),
                    Evidence::new(Side::Fixed, y.line, format!("{label}: {}", measure_text(y))),
                ]
            })
            .collect();
        if !evidence.is_empty() {
            return PatternVerdict::from_evidence(id, evidence);
        }
    }
    PatternVerdict::negative(id)
}

/// A circuit present in both files whose loop-expanded measurement count drops.
pub fn detect_excessive_measurement(ctx: &DetectionContext) -> PatternVerdict {
    let id = PatternId::ExcessiveMeasurement;
    if !should_run(ctx, id) {
        return PatternVerdict::negative(id);
    }
    let (bt, ft) = (ctx.buggy.measurement_totals(), ctx.fixed.measurement_totals());
    let mut evidence = Vec::new();
    for (circuit, &before) in &bt {
        let Some(&after) = ft.get(circuit) else {
            continue;
        };
        if after >= before {
            continue;
        }
        let note = format!("'{circuit}': {before} measurements reduced to {after}");
        for (side, facts) in [(Side::Buggy, &ctx.buggy), (Side::Fixed, &ctx.fixed)] {
            let lines: BTreeSet<usize> = facts
                .measure_calls
                .iter()
                .filter(|m| &m.circuit == circuit)
                .map(|m| m.line)
                .collect();
            if lines.is_empty() {
                let line = facts.circuits.get(circuit).map_or(0, |c| c.line);
                evidence.push(Evidence::new(side, line, note.clone()));
            }
            evidence.extend(lines.into_iter().map(|l| Evidence::new(side, l, note.clone())));
        }
    }
    PatternVerdict::from_evidence(id, evidence)
}

fn should_run(ctx: &DetectionContext, id: PatternId) -> bool {
    ctx.is_analyzable() && ctx.classes.contains(&id.class())
}

/// Run one detector.
pub fn run_detector(ctx: &DetectionContext, id: PatternId) -> PatternVerdict {
    match id {
        PatternId::IncorrectInitialization => detect_incorrect_initialization(ctx),
        PatternId::UnequalBits => detect_unequal_bits(ctx),
        PatternId::IncorrectStandardGate => detect_incorrect_standard_gate(ctx),
        PatternId::IncorrectOpaqueGate => detect_incorrect_opaque_gate(ctx),
        PatternId::IncorrectHadamard => detect_incorrect_hadamard(ctx),
        PatternId::IncorrectMeasurement => detect_incorrect_measurement(ctx),
        PatternId::ExcessiveMeasurement => detect_excessive_measurement(ctx),
    }
}

/// Run all seven detectors and report every detected pattern.
pub fn detect_all(ctx: &DetectionContext) -> DetectionReport {
    detect_all_in_order(ctx, &PatternId::ALL)
}

/// [`detect_all`] with an explicit execution order. Patterns missing from
/// `order` still run; the report layout does not depend on the order.
pub fn detect_all_in_order(ctx: &DetectionContext, order: &[PatternId]) -> DetectionReport {
    let mut by_id: BTreeMap<PatternId, PatternVerdict> = BTreeMap::new();
    for &id in order.iter().chain(PatternId::ALL.iter()) {
        by_id.entry(id).or_insert_with(|| run_detector(ctx, id));
    }

    let mut warnings = Vec::new();
    if let Some(failure) = &ctx.failure {
        warnings.push(failure.clone());
    }
    warnings.extend(ctx.warnings());
    if ctx.is_analyzable() {
        warnings.extend(
            PatternId::ALL
                .into_iter()
                .filter(|id| !ctx.classes.contains(&id.class()))
                .map(|id| format!("{id}: pruned by coarse filter")),
        );
    }

    DetectionReport {
        pair_id: ctx.pair_id.clone(),
        unanalyzable: !ctx.is_analyzable(),
        classes_considered: ctx.classes.clone(),
        verdicts: by_id.into_values().collect(),
        warnings,
    }
}

//! Regex passes over raw source text.
//!
//! The coarse filter decides which pattern classes are worth analyzing. The
//! fine filters pull line-level tables (gate calls, registers, measure calls,
//! Hadamard applications) that the semantic layer combines with the ASTs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::LazyLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::pairio::CodePair;
use crate::pyast::{fold_constants, parse_expr, ExprKind};
use crate::semantics::HadamardLedger;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PatternClass {
    Initialization,
    Operation,
    Measurement,
}

impl PatternClass {
    pub const ALL: [PatternClass; 3] = [
        PatternClass::Initialization,
        PatternClass::Operation,
        PatternClass::Measurement,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            PatternClass::Initialization => "initialization",
            PatternClass::Operation => "operation",
            PatternClass::Measurement => "measurement",
        }
    }
}

impl fmt::Display for PatternClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn re(pattern: &str) -> Regex {
    Regex::new(pattern).expect("static regex")
}

static COARSE_INIT: LazyLock<Regex> =
    LazyLock::new(|| re(r".+(QuantumCircuit|QuantumRegister|ClassicalRegister).*"));
static COARSE_OPERATION: LazyLock<Regex> = LazyLock::new(|| re(r".+\..*"));
static COARSE_MEASURE: LazyLock<Regex> = LazyLock::new(|| re(r".+measure.*"));

static GATE_LINE: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*(\w+)\.(\w+)\((.*)\)"));
static REGISTER_HINT: LazyLock<Regex> =
    LazyLock::new(|| re(r".+(ClassicalRegister|QuantumRegister).*"));
static REGISTER_DECL: LazyLock<Regex> =
    LazyLock::new(|| re(r"^\s*(\w+)\s*=\s*(QuantumRegister|ClassicalRegister)\((.*)\)"));
static MEASURE_LINE: LazyLock<Regex> = LazyLock::new(|| re(r".+\.measure.*"));
static HADAMARD_CIRCUIT: LazyLock<Regex> = LazyLock::new(|| re(r"^\s*(\w+)\.h\("));
static HADAMARD_QUBIT: LazyLock<Regex> = LazyLock::new(|| re(r"\.h\((.*)\)"));

/// Drop a trailing `#` comment, ignoring `#` inside string literals.
pub fn strip_comment(line: &str) -> &str {
    let mut quote: Option<char> = None;
    let mut escaped = false;
    for (i, c) in line.char_indices() {
        match quote {
            Some(q) => {
                if escaped {
                    escaped = false;
                } else if c == '\\' {
                    escaped = true;
                } else if c == q {
                    quote = None;
                }
            }
            None if c == '"' || c == '\'' => quote = Some(c),
            None if c == '#' => return &line[..i],
            None => {}
        }
    }
    line
}

/// Numbered code lines with comments removed; comment-only lines are dropped.
fn code_lines(source: &str) -> impl Iterator<Item = (usize, &str)> {
    source
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, strip_comment(l).trim_end()))
        .filter(|(_, l)| !l.trim().is_empty())
}

/// Decide which pattern classes a pair could exhibit. A class is kept when
/// its regex matches any line of either file.
pub fn coarse_classify(pair: &CodePair) -> BTreeSet<PatternClass> {
    let rules = [
        (PatternClass::Initialization, &*COARSE_INIT),
        (PatternClass::Operation, &*COARSE_OPERATION),
        (PatternClass::Measurement, &*COARSE_MEASURE),
    ];
    let lines: Vec<&str> = pair
        .buggy_source
        .lines()
        .chain(pair.fixed_source.lines())
        .collect();
    rules
        .into_iter()
        .filter(|(_, regex)| lines.iter().any(|l| regex.is_match(l)))
        .map(|(class, _)| class)
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateLine {
    pub line: usize,
    pub receiver: String,
    pub method: String,
    pub raw_args: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GateLineTable {
    pub entries: Vec<GateLine>,
}

impl GateLineTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Lines shaped like `receiver.method(args)`.
pub fn filter_gate_lines(source: &str) -> GateLineTable {
    let entries = code_lines(source)
        .filter(|(_, l)| COARSE_OPERATION.is_match(l))
        .filter_map(|(line, l)| {
            let caps = GATE_LINE.captures(l)?;
            Some(GateLine {
                line,
                receiver: caps[1].to_string(),
                method: caps[2].to_string(),
                raw_args: caps[3].to_string(),
            })
        })
        .collect();
    GateLineTable { entries }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegisterKind {
    Quantum,
    Classical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Register {
    pub kind: RegisterKind,
    pub size: i64,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RegisterTable {
    pub entries: BTreeMap<String, Register>,
}

impl RegisterTable {
    pub fn get(&self, name: &str) -> Option<&Register> {
        self.entries.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Register declarations and their sizes (first positional argument, or `size=`).
pub fn filter_registers(source: &str, warnings: &mut Vec<String>) -> RegisterTable {
    let mut entries = BTreeMap::new();
    for (line, text) in code_lines(source) {
        if !REGISTER_HINT.is_match(text) {
            continue;
        }
        let Some(caps) = REGISTER_DECL.captures(text) else {
            continue;
        };
        let kind = if &caps[2] == "QuantumRegister" {
            RegisterKind::Quantum
        } else {
            RegisterKind::Classical
        };
        match register_size(&caps[3]) {
            Some(size) if size >= 0 => {
                entries.insert(caps[1].to_string(), Register { kind, size, line });
            }
            _ => warnings.push(format!(
                "line {line}: register '{}' has no constant size; skipped",
                &caps[1]
            )),
        }
    }
    RegisterTable { entries }
}

fn register_size(raw_args: &str) -> Option<i64> {
    let call = parse_expr(&format!("Register({raw_args})")).ok()?;
    let call = fold_constants(&call);
    let (_, args, keywords) = call.as_name_call()?;
    match args.first() {
        Some(first) => first.as_int(),
        None => keywords
            .iter()
            .find(|k| k.name == "size")
            .and_then(|k| k.value.as_int()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MeasureLineTable {
    pub entries: BTreeMap<usize, String>,
}

impl MeasureLineTable {
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn filter_measures(source: &str) -> MeasureLineTable {
    let entries = code_lines(source)
        .filter(|(_, l)| MEASURE_LINE.is_match(l))
        .map(|(line, l)| (line, l.trim().to_string()))
        .collect();
    MeasureLineTable { entries }
}

/// Add one to the ledger slot of every Hadamard application in `source`.
///
/// The ledger must already hold the circuits and their qubit slots; unknown
/// circuits and non-constant or out-of-range targets are reported, not counted.
pub fn count_hadamards(
    source: &str,
    mut ledger: HadamardLedger,
    warnings: &mut Vec<String>,
) -> HadamardLedger {
    for (line, text) in code_lines(source) {
        let Some(circuit) = HADAMARD_CIRCUIT.captures(text) else {
            continue;
        };
        let circuit = &circuit[1];
        let Some(qubit_text) = HADAMARD_QUBIT.captures(text) else {
            continue;
        };
        if !ledger.counts.contains_key(circuit) {
            warnings.push(format!("line {line}: Hadamard on unknown circuit '{circuit}'"));
            continue;
        }
        let targets = parse_expr(&qubit_text[1])
            .ok()
            .map(|e| fold_constants(&e))
            .and_then(|e| match e.kind {
                ExprKind::Int(q) => Some(vec![q]),
                ExprKind::List(items) => items.iter().map(|i| i.as_int()).collect(),
                _ => None,
            });
        let Some(targets) = targets else {
            warnings.push(format!(
                "line {line}: Hadamard target on '{circuit}' is not a constant qubit index"
            ));
            continue;
        };
        for q in targets {
            match ledger.counts.get_mut(circuit).and_then(|s| s.get_mut(&q)) {
                Some(count) => {
                    *count += 1;
                    ledger
                        .sites
                        .entry((circuit.to_string(), q))
                        .or_default()
                        .push(line);
                }
                None => warnings.push(format!(
                    "line {line}: Hadamard qubit {q} out of range for '{circuit}'"
                )),
            }
        }
    }
    ledger
}

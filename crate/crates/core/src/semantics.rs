//! AST-driven program facts and the per-pair [`DetectionContext`].

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use crate::filters::{
    coarse_classify, count_hadamards, filter_gate_lines, filter_measures, filter_registers,
    GateLineTable, MeasureLineTable, PatternClass, RegisterKind, RegisterTable,
};
use crate::pairio::CodePair;
use crate::pyast::{self, fold_constants, Expr, ExprKind, ModuleAst, Stmt, StmtKind};

/// Environment variable naming a replacement standard-gate file.
pub const GATE_TABLE_ENV: &str = "QPAC_GATE_TABLE";

const DEFAULT_GATES: &str = include_str!("../data/standard_gates.txt");

/// Names of Qiskit's built-in gate methods. Case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StandardGateTable {
    names: BTreeSet<String>,
}

#[derive(Debug, thiserror::Error)]
#[error("cannot read gate table {}: {source}", path.display())]
pub struct GateTableError {
    pub path: PathBuf,
    #[source]
    pub source: std::io::Error,
}

impl Default for StandardGateTable {
    fn default() -> Self {
        Self::from_text(DEFAULT_GATES)
    }
}

impl StandardGateTable {
    /// Newline-delimited names; `#` comments and blank lines are ignored.
    pub fn from_text(text: &str) -> Self {
        let names = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or("").trim())
            .filter(|l| !l.is_empty())
            .map(str::to_string)
            .collect();
        StandardGateTable { names }
    }

    pub fn load(path: &Path) -> Result<Self, GateTableError> {
        std::fs::read_to_string(path)
            .map(|t| Self::from_text(&t))
            .map_err(|source| GateTableError {
                path: path.to_path_buf(),
                source,
            })
    }

    /// The table named by `QPAC_GATE_TABLE`, or the embedded default.
    pub fn from_env() -> Result<Self, GateTableError> {
        match std::env::var_os(GATE_TABLE_ENV) {
            Some(path) if !path.is_empty() => Self::load(Path::new(&path)),
            _ => Ok(Self::default()),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.names.contains(name)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CircuitInfo {
    pub qubits: i64,
    pub clbits: i64,
    pub line: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CircuitTable {
    pub entries: BTreeMap<String, CircuitInfo>,
}

impl CircuitTable {
    pub fn get(&self, name: &str) -> Option<&CircuitInfo> {
        self.entries.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// True when `name` is a circuit defined at or before `line`.
    fn defined_by(&self, name: &str, line: usize) -> bool {
        self.get(name).is_some_and(|c| c.line <= line)
    }
}

/// A method call on a known circuit, with constant-folded arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GateCall {
    pub circuit: String,
    pub gate: String,
    pub qubit_args: Vec<Expr>,
    pub line: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureVariant {
    Measure,
    MeasureAll,
    MeasureInactive,
}

impl MeasureVariant {
    pub fn from_method(name: &str) -> Option<Self> {
        match name {
            "measure" => Some(MeasureVariant::Measure),
            "measure_all" => Some(MeasureVariant::MeasureAll),
            "measure_inactive" => Some(MeasureVariant::MeasureInactive),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            MeasureVariant::Measure => "measure",
            MeasureVariant::MeasureAll => "measure_all",
            MeasureVariant::MeasureInactive => "measure_inactive",
        }
    }
}

impl fmt::Display for MeasureVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasureCall {
    pub circuit: String,
    pub variant: MeasureVariant,
    pub args: Vec<Expr>,
    pub line: usize,
    /// Product of the iteration counts of enclosing loops.
    pub multiplier: u64,
    /// Index of this call among all method calls on the same receiver.
    pub position: usize,
}

/// Per-circuit, per-qubit Hadamard application counts.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HadamardLedger {
    pub counts: BTreeMap<String, BTreeMap<i64, u32>>,
    /// Lines of the counted applications, per circuit and qubit.
    pub sites: BTreeMap<(String, i64), Vec<usize>>,
}

impl HadamardLedger {
    /// A ledger with a zeroed slot for every qubit of every circuit.
    pub fn for_circuits(circuits: &CircuitTable) -> Self {
        let counts = circuits
            .entries
            .iter()
            .map(|(name, c)| (name.clone(), (0..c.qubits).map(|q| (q, 0)).collect()))
            .collect();
        HadamardLedger {
            counts,
            sites: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OpaqueGates {
    pub count: usize,
    pub names: BTreeSet<String>,
    pub lines: Vec<usize>,
}

/// Resolve every `QuantumCircuit(...)` assignment to qubit and clbit counts.
///
/// Integer arguments are read positionally (`(qubits[, clbits])`); register
/// arguments are summed per kind. The first definition of a name wins.
pub fn extract_circuits(
    ast: &ModuleAst,
    regs: &RegisterTable,
    warnings: &mut Vec<String>,
) -> CircuitTable {
    let mut entries = BTreeMap::new();
    for stmt in ast.walk() {
        let StmtKind::Assign { targets, value } = &stmt.kind else {
            continue;
        };
        let Some(("QuantumCircuit", args, _)) = value.as_name_call() else {
            continue;
        };
        let args: Vec<Expr> = args.iter().map(fold_constants).collect();
        let Some((qubits, clbits)) = resolve_counts(&args, regs) else {
            warnings.push(format!(
                "line {}: cannot resolve qubit/clbit counts of circuit '{}'",
                stmt.line,
                targets.join(", ")
            ));
            continue;
        };
        for target in targets {
            if entries.contains_key(target) {
                warnings.push(format!(
                    "line {}: circuit '{target}' redefined; keeping the first definition",
                    stmt.line
                ));
                continue;
            }
            entries.insert(
                target.clone(),
                CircuitInfo {
                    qubits,
                    clbits,
                    line: stmt.line,
                },
            );
        }
    }
    CircuitTable { entries }
}

fn resolve_counts(args: &[Expr], regs: &RegisterTable) -> Option<(i64, i64)> {
    if args.iter().all(|a| a.as_int().is_some()) {
        return match args {
            [] => Some((0, 0)),
            [q] => Some((q.as_int()?, 0)),
            [q, c] => Some((q.as_int()?, c.as_int()?)),
            _ => None,
        };
    }
    let (mut qubits, mut clbits) = (0, 0);
    for arg in args {
        let reg = regs.get(arg.as_name()?)?;
        match reg.kind {
            RegisterKind::Quantum => qubits += reg.size,
            RegisterKind::Classical => clbits += reg.size,
        }
    }
    Some((qubits, clbits))
}

fn is_measure_like(method: &str) -> bool {
    method.starts_with("measure")
}

/// Method calls on known circuits, excluding measurements, in source order.
pub fn extract_gate_calls(ast: &ModuleAst, circuits: &CircuitTable) -> Vec<GateCall> {
    ast.walk()
        .filter_map(|stmt| {
            let StmtKind::Expr(call) = &stmt.kind else {
                return None;
            };
            let (recv, method, args, _) = call.as_method_call()?;
            let circuit = recv.as_name()?;
            if is_measure_like(method) || !circuits.defined_by(circuit, stmt.line) {
                return None;
            }
            Some(GateCall {
                circuit: circuit.to_string(),
                gate: method.to_string(),
                qubit_args: args.iter().map(fold_constants).collect(),
                line: stmt.line,
            })
        })
        .collect()
}

/// Opaque `Gate(name, n, params)` instantiations acting on three or more qubits.
pub fn extract_opaque_gates(ast: &ModuleAst, warnings: &mut Vec<String>) -> OpaqueGates {
    let mut found = OpaqueGates::default();
    for stmt in ast.walk() {
        let StmtKind::Assign { targets, value } = &stmt.kind else {
            continue;
        };
        let Some(("Gate", args, keywords)) = value.as_name_call() else {
            continue;
        };
        let width = args
            .get(1)
            .or_else(|| {
                keywords
                    .iter()
                    .find(|k| k.name == "num_qubits")
                    .map(|k| &k.value)
            })
            .map(fold_constants);
        match width.as_ref().and_then(Expr::as_int) {
            Some(n) if n >= 3 => {
                found.count += 1;
                found.names.extend(targets.iter().cloned());
                found.lines.push(stmt.line);
            }
            Some(_) => {}
            None => warnings.push(format!(
                "line {}: opaque gate without a constant qubit count ignored",
                stmt.line
            )),
        }
    }
    found
}

/// Number of assignments of the form `name = circuit.to_instruction()`.
pub fn extract_composite_wraps(ast: &ModuleAst) -> usize {
    composite_wrap_lines(ast).len()
}

pub fn composite_wrap_lines(ast: &ModuleAst) -> Vec<usize> {
    ast.walk()
        .filter(|stmt| match &stmt.kind {
            StmtKind::Assign { value, .. } => matches!(
                value.as_method_call(),
                Some((_, "to_instruction", [], []))
            ),
            _ => false,
        })
        .map(|stmt| stmt.line)
        .collect()
}

/// Iteration count of a `for` loop over `range(...)` or a list literal.
pub fn expand_loop_multiplier(iter: &Expr) -> Result<u64, String> {
    let iter = fold_constants(iter);
    if let ExprKind::List(items) = &iter.kind {
        return Ok(items.len() as u64);
    }
    let Some(("range", args, [])) = iter.as_name_call() else {
        return Err("loop is not over range(...) or a list literal".to_string());
    };
    let bounds: Option<Vec<i64>> = args.iter().map(Expr::as_int).collect();
    let bounds = bounds.ok_or_else(|| "range bounds are not constant".to_string())?;
    let (start, stop, step) = match bounds.as_slice() {
        [stop] => (0, *stop, 1),
        [start, stop] => (*start, *stop, 1),
        [start, stop, step] => (*start, *stop, *step),
        _ => return Err("range takes one to three arguments".to_string()),
    };
    let (span, stride) = match step {
        0 => return Err("range step is zero".to_string()),
        s if s > 0 => (i128::from(stop) - i128::from(start), i128::from(s)),
        s => (i128::from(start) - i128::from(stop), -i128::from(s)),
    };
    let count = if span <= 0 { 0 } else { (span + stride - 1) / stride };
    Ok(count as u64)
}

/// Calls to `measure`, `measure_all`, and `measure_inactive`, in source order.
/// Calls inside loops appear once, carrying the loop iteration count.
pub fn extract_measure_calls(ast: &ModuleAst, warnings: &mut Vec<String>) -> Vec<MeasureCall> {
    let mut out = Vec::new();
    let mut positions: BTreeMap<String, usize> = BTreeMap::new();
    collect_measures(&ast.body, 1, &mut positions, &mut out, warnings);
    out
}

fn collect_measures(
    body: &[Stmt],
    multiplier: u64,
    positions: &mut BTreeMap<String, usize>,
    out: &mut Vec<MeasureCall>,
    warnings: &mut Vec<String>,
) {
    for stmt in body {
        match &stmt.kind {
            StmtKind::For { iter, body, .. } => {
                let n = expand_loop_multiplier(iter).unwrap_or_else(|msg| {
                    warnings.push(format!("line {}: {msg}; counting one iteration", stmt.line));
                    1
                });
                collect_measures(body, multiplier.saturating_mul(n), positions, out, warnings);
            }
            StmtKind::Expr(call) => {
                let Some((recv, method, args, _)) = call.as_method_call() else {
                    continue;
                };
                let Some(receiver) = recv.as_name() else {
                    continue;
                };
                let slot = positions.entry(receiver.to_string()).or_insert(0);
                let position = *slot;
                *slot += 1;
                if !is_measure_like(method) {
                    continue;
                }
                let Some(variant) = MeasureVariant::from_method(method) else {
                    warnings.push(format!(
                        "line {}: unrecognized measurement '{method}' ignored",
                        stmt.line
                    ));
                    continue;
                };
                out.push(MeasureCall {
                    circuit: receiver.to_string(),
                    variant,
                    args: args.iter().map(fold_constants).collect(),
                    line: stmt.line,
                    multiplier,
                    position,
                });
            }
            _ => {}
        }
    }
}

/// Everything extracted from one side of a pair.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FileFacts {
    pub ast: ModuleAst,
    pub registers: RegisterTable,
    pub circuits: CircuitTable,
    pub gate_lines: GateLineTable,
    pub gate_calls: Vec<GateCall>,
    pub measure_lines: MeasureLineTable,
    pub measure_calls: Vec<MeasureCall>,
    pub hadamards: HadamardLedger,
    pub opaque: OpaqueGates,
    /// Lines of `to_instruction()` wraps.
    pub composite_wraps: Vec<usize>,
    pub warnings: Vec<String>,
}

impl FileFacts {
    fn analyze(source: &str) -> Result<Self, pyast::ParseError> {
        let ast = pyast::parse(source)?;
        let mut warnings: Vec<String> = ast.warnings.iter().map(ToString::to_string).collect();
        let registers = filter_registers(source, &mut warnings);
        let circuits = extract_circuits(&ast, &registers, &mut warnings);
        let gate_lines = filter_gate_lines(source);
        let gate_calls = extract_gate_calls(&ast, &circuits);
        let measure_lines = filter_measures(source);
        let mut measure_calls = extract_measure_calls(&ast, &mut warnings);
        measure_calls.retain(|m| {
            let forward = circuits
                .get(&m.circuit)
                .is_some_and(|c| c.line > m.line);
            if forward {
                warnings.push(format!(
                    "line {}: measurement on '{}' before it is created ignored",
                    m.line, m.circuit
                ));
            }
            !forward
        });
        let hadamards = count_hadamards(
            source,
            HadamardLedger::for_circuits(&circuits),
            &mut warnings,
        );
        let opaque = extract_opaque_gates(&ast, &mut warnings);
        let composite_wraps = composite_wrap_lines(&ast);
        Ok(FileFacts {
            ast,
            registers,
            circuits,
            gate_lines,
            gate_calls,
            measure_lines,
            measure_calls,
            hadamards,
            opaque,
            composite_wraps,
            warnings,
        })
    }

    /// Loop-expanded measurement count for each known circuit.
    pub fn measurement_totals(&self) -> BTreeMap<String, u64> {
        let mut totals: BTreeMap<String, u64> =
            self.circuits.entries.keys().map(|k| (k.clone(), 0)).collect();
        for m in &self.measure_calls {
            if let Some(total) = totals.get_mut(&m.circuit) {
                *total = total.saturating_add(m.multiplier);
            }
        }
        totals
    }
}

/// Both sides of a pair, analyzed once and shared by every detector.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionContext {
    pub pair_id: String,
    pub buggy: FileFacts,
    pub fixed: FileFacts,
    pub classes: BTreeSet<PatternClass>,
    pub gates: StandardGateTable,
    /// Set when either file failed to parse; the facts are then empty.
    pub failure: Option<String>,
}

impl DetectionContext {
    pub fn is_analyzable(&self) -> bool {
        self.failure.is_none()
    }

    /// Warnings from both files, prefixed with their side.
    pub fn warnings(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .buggy
            .warnings
            .iter()
            .map(|w| format!("buggy: {w}"))
            .collect();
        out.extend(self.fixed.warnings.iter().map(|w| format!("fixed: {w}")));
        out
    }
}

/// Parse both files once and run every filter and extraction.
pub fn build_context(pair: &CodePair, gates: &StandardGateTable) -> DetectionContext {
    let classes = coarse_classify(pair);
    let analyzed = FileFacts::analyze(&pair.buggy_source)
        .map_err(|e| format!("buggy: parse error at {e}"))
        .and_then(|b| {
            FileFacts::analyze(&pair.fixed_source)
                .map(|f| (b, f))
                .map_err(|e| format!("fixed: parse error at {e}"))
        });
    let (buggy, fixed, failure) = match analyzed {
        Ok((b, f)) => (b, f, None),
        Err(msg) => (FileFacts::default(), FileFacts::default(), Some(msg)),
    };
    DetectionContext {
        pair_id: pair.pair_id.clone(),
        buggy,
        fixed,
        classes,
        gates: gates.clone(),
        failure,
    }
}

use std::path::Path;

use proptest::prelude::*;
use qpac::detectors::{detect_all, detect_incorrect_standard_gate, PatternId};
use qpac::filters::PatternClass;
use qpac::pairio::{scan_corpus, CodePair};
use qpac::pyast::{parse, Expr, ExprKind, StmtKind};
use qpac::semantics::{build_context, StandardGateTable};

fn ctx(pair: &CodePair) -> qpac::semantics::DetectionContext {
    build_context(pair, &StandardGateTable::default())
}

fn shipped_pairs() -> Vec<CodePair> {
    ["golden", "negatives"]
        .iter()
        .flat_map(|dir| {
            scan_corpus(&Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(dir)).unwrap()
        })
        .map(|e| e.outcome.unwrap().pair)
        .collect()
}

#[test]
fn pruning_never_hides_a_detection() {
    for pair in shipped_pairs() {
        let pruned = ctx(&pair);
        let mut full = pruned.clone();
        full.classes = PatternClass::ALL.into_iter().collect();
        assert_eq!(detect_all(&full).detected(), detect_all(&pruned).detected(), "{}", pair.pair_id);
    }
}

#[test]
fn identical_sides_are_clean() {
    for pair in shipped_pairs() {
        for src in [&pair.buggy_source, &pair.fixed_source] {
            let same = CodePair::from_sources("same", src.clone(), src.clone());
            assert!(detect_all(&ctx(&same)).detected().is_empty(), "{}", pair.pair_id);
        }
    }
}

#[test]
fn every_shipped_case_analyzes() {
    for pair in shipped_pairs() {
        let report = detect_all(&ctx(&pair));
        assert!(!report.unanalyzable, "{}: {:?}", pair.pair_id, report.warnings);
        assert_eq!(report.verdicts.len(), PatternId::ALL.len());
        assert!(report.verdicts.iter().all(|v| v.detected || v.evidence.is_empty()));
    }
}

/// First source token of an expression, used to check line fidelity.
fn leading_token(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::Int(v) => v.abs().to_string(),
        ExprKind::Str(_) => "'".to_string(),
        ExprKind::List(_) => "[".to_string(),
        ExprKind::Call { func, .. } => leading_token(func),
        ExprKind::Attribute { base, .. } | ExprKind::Subscript { base, .. } => leading_token(base),
        ExprKind::BinOp { left, .. } => leading_token(left),
    }
}

fn statement() -> impl Strategy<Value = String> {
    let target = prop_oneof![Just("qc"), Just("qreg"), Just("sub")];
    let int = 0i64..25;
    prop_oneof![
        (target.clone(), int.clone()).prop_map(|(t, n)| format!("{t} = QuantumCircuit({n}, {n})")),
        (target.clone(), int.clone()).prop_map(|(t, n)| format!("{t}.h({n})")),
        (target.clone(), int.clone(), int.clone()).prop_map(|(t, a, b)| format!("{t}.cx({a}, {b} + 1)")),
        (target.clone(), int.clone()).prop_map(|(t, n)| format!("for i in range({n}):\n    {t}.measure(i, i)")),
        target.clone().prop_map(|t| format!("{t}.measure([0, 1],\n    [1, 0])")),
        Just("# comment".to_string()),
        Just("...".to_string()),
        Just(String::new()),
        Just("def helper():\n    return 1".to_string()),
    ]
}

proptest! {
    #[test]
    fn nodes_point_at_their_first_token(stmts in prop::collection::vec(statement(), 0..12)) {
        let src = stmts.join("\n");
        let lines: Vec<&str> = src.lines().collect();
        let m = parse(&src).unwrap();
        let mut previous = 0;
        for stmt in m.walk() {
            prop_assert!(stmt.line > previous);
            previous = stmt.line;
            let text = lines[stmt.line - 1];
            let token = match &stmt.kind {
                StmtKind::Assign { targets, .. } => targets[0].clone(),
                StmtKind::Expr(e) => {
                    prop_assert_eq!(e.line, stmt.line);
                    leading_token(e)
                }
                StmtKind::For { .. } => "for".to_string(),
                StmtKind::Pass => "pass".to_string(),
                StmtKind::Ellipsis => "...".to_string(),
            };
            prop_assert!(text.trim_start().starts_with(&token), "line {} {:?} lacks {:?}", stmt.line, text, token);
        }
    }

    #[test]
    fn renaming_a_circuit_keeps_the_gate_verdict(
        gates in prop::collection::vec(prop_oneof![Just("h"), Just("x"), Just("sdg"), Just("tdg"), Just("oracle")], 1..6),
        swap in 0usize..6,
        name in "[a-z]{1,6}",
    ) {
        prop_assume!(!["for", "in", "if", "def", "as", "is", "or", "and", "not", "pass"].contains(&name.as_str()));
        let render = |circ: &str, gates: &[&str]| {
            let mut s = format!("{circ} = QuantumCircuit(2)\n");
            for (i, g) in gates.iter().enumerate() {
                s.push_str(&format!("{circ}.{g}({})\n", i % 2));
            }
            s
        };
        let mut fixed = gates.clone();
        let i = swap % fixed.len();
        fixed[i] = if fixed[i] == "x" { "h" } else { "x" };
        let buggy = render("qc", &gates);
        let plain = CodePair::from_sources("p", buggy.clone(), render("qc", &fixed));
        let renamed = CodePair::from_sources("p", buggy, render(&name, &fixed));
        prop_assert_eq!(
            detect_incorrect_standard_gate(&ctx(&plain)).detected,
            detect_incorrect_standard_gate(&ctx(&renamed)).detected
        );
    }
}

//! Per-qubit Hadamard counts and the parity verdict.

use qpac::detectors::detect_incorrect_hadamard;
use qpac::pairio::CodePair;
use qpac::semantics::{build_context, StandardGateTable};

fn main() {
    let buggy = "qc = QuantumCircuit(3, 3)\nqc.h(0)\nqc.h(1)\nqc.x(2)\nqc.h(1)\n";
    let fixed = format!("{buggy}qc.h(0)\n");
    let ctx = build_context(&CodePair::from_sources("h", buggy, fixed), &StandardGateTable::default());
    println!("buggy counts: {:?}", ctx.buggy.hadamards.counts);
    println!("fixed counts: {:?}", ctx.fixed.hadamards.counts);

    let verdict = detect_incorrect_hadamard(&ctx);
    println!("detected: {}", verdict.detected);
    for e in &verdict.evidence {
        println!("  {}:{} {}", e.file, e.line, e.note);
    }
}

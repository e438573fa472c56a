//! Feature records for one pair, one line per pattern.

use qpac::detectors::detect_all;
use qpac::pairio::CodePair;
use qpac::report::{emit_feature_records, feature_records};
use qpac::semantics::{build_context, StandardGateTable};

fn main() {
    let head = "qreg = QuantumRegister(10)\ncreg = ClassicalRegister(10)\ncirc = QuantumCircuit(qreg, creg)\n";
    let pair = CodePair::from_sources(
        "loop",
        format!("{head}for i in range(10):\n    circ.measure(qreg[i], creg[i])\n"),
        format!("{head}for i in range(5):\n    circ.measure(qreg[i], creg[i])\n"),
    );
    let ctx = build_context(&pair, &StandardGateTable::default());
    print!("{}", emit_feature_records(&feature_records(&ctx, &detect_all(&ctx))));
}

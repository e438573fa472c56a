//! Which pattern classes survive the regex pre-pass, and what the fine filters see.

use qpac::filters::{coarse_classify, filter_gate_lines, filter_measures, filter_registers};
use qpac::pairio::CodePair;

fn main() {
    let buggy = "qreg = QuantumRegister(3)\ncreg = ClassicalRegister(2)\nqc = QuantumCircuit(qreg, creg)\nqc.h(0)\nqc.measure([0, 1, 2], [0, 1, 2])\n";
    let fixed = buggy.replace("ClassicalRegister(2)", "ClassicalRegister(3)");
    let pair = CodePair::from_sources("bits", buggy, fixed);
    println!("classes: {:?}", coarse_classify(&pair));

    let plain = CodePair::from_sources("plain", "x = 1\n", "x = 2\n");
    println!("classes without circuit code: {:?}", coarse_classify(&plain));

    let mut warnings = Vec::new();
    for (name, reg) in &filter_registers(buggy, &mut warnings).entries {
        println!("register {name}: {:?} size {} (line {})", reg.kind, reg.size, reg.line);
    }
    for g in &filter_gate_lines(buggy).entries {
        println!("gate line {}: {}.{}({})", g.line, g.receiver, g.method, g.raw_args);
    }
    println!("measure lines: {:?}", filter_measures(buggy).entries);
}

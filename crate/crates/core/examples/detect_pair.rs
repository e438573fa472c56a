//! Run every detector on one pair and print both report formats.
//!
//! With two arguments, reads the buggy and fixed files from disk.

use std::env;
use std::path::Path;

use qpac::detectors::detect_all;
use qpac::pairio::{load_pair, CodePair};
use qpac::report::{emit_report, Format};
use qpac::semantics::{build_context, StandardGateTable};

fn main() {
    let args: Vec<String> = env::args().skip(1).collect();
    let pair = match args.as_slice() {
        [b, f] => load_pair(Path::new(b), Path::new(f)).expect("readable pair"),
        _ => CodePair::from_sources(
            "inline",
            "qc = QuantumCircuit(3,3)\nqc.x(0)\nqc.barrier()\nqc.measure([0,1,2],[0,1,2])\n",
            "qc = QuantumCircuit(3,3)\nqc.x(0)\nqc.barrier()\nqc.measure([0,1,2],[1,0,2])\n",
        ),
    };
    let report = detect_all(&build_context(&pair, &StandardGateTable::default()));
    print!("{}", emit_report(&report, Format::Text));
    print!("{}", emit_report(&report, Format::Json));
}

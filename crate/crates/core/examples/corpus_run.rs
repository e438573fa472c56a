//! Score a labeled corpus directory (defaults to the shipped golden cases).

use std::env;
use std::path::PathBuf;

use qpac::cli::run_corpus;
use qpac::pairio::scan_corpus;
use qpac::report::{CorpusScore, Format};
use qpac::semantics::StandardGateTable;

fn main() {
    let root = env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus/golden"));
    let entries = scan_corpus(&root).expect("corpus root readable");
    let score = CorpusScore::tally(&run_corpus(entries, &StandardGateTable::default()));
    print!("{}", score.emit(Format::Text));
    println!("clean: {}", score.is_clean());
}

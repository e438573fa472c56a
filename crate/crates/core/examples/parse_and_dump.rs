//! Parse a small program, print its tree, then fold a constant expression.

use qpac::pyast::{dump, fold_constants, parse, parse_expr, unparse_expr};

fn main() {
    let src = "qc = QuantumCircuit(3, 3)\nfor i in range(2 * 3):\n    qc.measure(i, i)\n";
    let module = parse(src).expect("subset program");
    println!("{}", dump(&module));

    let e = parse_expr("2 * (1 + 2) - 0").unwrap();
    println!("{} => {}", unparse_expr(&e), unparse_expr(&fold_constants(&e)));
}

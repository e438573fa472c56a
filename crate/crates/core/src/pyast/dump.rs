use super::{BinOp, Expr, ExprKind, ModuleAst, Stmt, StmtKind};

/// Intermediate tree for the indented dump.
enum Node {
    Ast(&'static str, Vec<(&'static str, Node)>),
    List(Vec<Node>),
    Repr(String),
}

const INDENT: &str = "  ";

/// Render a module as an indented tree in the style of Python's
/// `ast.dump(..., indent=2)`, without context and type-ignore fields.
pub fn dump(m: &ModuleAst) -> String {
    let node = Node::Ast(
        "Module",
        vec![("body", Node::List(m.body.iter().map(stmt_node).collect()))],
    );
    format_node(&node, 0).0
}

fn format_node(node: &Node, level: usize) -> (String, bool) {
    let level = level + 1;
    let prefix = format!("\n{}", INDENT.repeat(level));
    let sep = format!(",\n{}", INDENT.repeat(level));
    match node {
        Node::Ast(name, fields) => {
            let mut all_simple = true;
            let args: Vec<String> = fields
                .iter()
                .map(|(field, value)| {
                    let (text, simple) = format_node(value, level);
                    all_simple &= simple;
                    format!("{field}={text}")
                })
                .collect();
            if all_simple && args.len() <= 3 {
                (format!("{name}({})", args.join(", ")), args.is_empty())
            } else {
                (format!("{name}({prefix}{})", args.join(&sep)), false)
            }
        }
        Node::List(items) if items.is_empty() => ("[]".to_string(), true),
        Node::List(items) => {
            let parts: Vec<String> = items.iter().map(|i| format_node(i, level).0).collect();
            (format!("[{prefix}{}]", parts.join(&sep)), false)
        }
        Node::Repr(s) => (s.clone(), true),
    }
}

fn name_node(id: &str) -> Node {
    Node::Ast("Name", vec![("id", Node::Repr(py_repr(id)))])
}

fn stmt_node(s: &Stmt) -> Node {
    match &s.kind {
        StmtKind::Assign { targets, value } => Node::Ast(
            "Assign",
            vec![
                (
                    "targets",
                    Node::List(targets.iter().map(|t| name_node(t)).collect()),
                ),
                ("value", expr_node(value)),
            ],
        ),
        StmtKind::Expr(e) => Node::Ast("Expr", vec![("value", expr_node(e))]),
        StmtKind::For { var, iter, body } => Node::Ast(
            "For",
            vec![
                ("target", name_node(var)),
                ("iter", expr_node(iter)),
                ("body", Node::List(body.iter().map(stmt_node).collect())),
            ],
        ),
        StmtKind::Pass => Node::Ast("Pass", vec![]),
        StmtKind::Ellipsis => Node::Ast(
            "Expr",
            vec![(
                "value",
                Node::Ast("Constant", vec![("value", Node::Repr("Ellipsis".into()))]),
            )],
        ),
    }
}

fn expr_node(e: &Expr) -> Node {
    match &e.kind {
        ExprKind::Name(n) => name_node(n),
        ExprKind::Int(v) => Node::Ast("Constant", vec![("value", Node::Repr(v.to_string()))]),
        ExprKind::Str(s) => Node::Ast("Constant", vec![("value", Node::Repr(py_repr(s)))]),
        ExprKind::List(items) => Node::Ast(
            "List",
            vec![("elts", Node::List(items.iter().map(expr_node).collect()))],
        ),
        ExprKind::Call {
            func,
            args,
            keywords,
        } => Node::Ast(
            "Call",
            vec![
                ("func", expr_node(func)),
                ("args", Node::List(args.iter().map(expr_node).collect())),
                (
                    "keywords",
                    Node::List(
                        keywords
                            .iter()
                            .map(|k| {
                                Node::Ast(
                                    "keyword",
                                    vec![
                                        ("arg", Node::Repr(py_repr(&k.name))),
                                        ("value", expr_node(&k.value)),
                                    ],
                                )
                            })
                            .collect(),
                    ),
                ),
            ],
        ),
        ExprKind::Attribute { base, attr } => Node::Ast(
            "Attribute",
            vec![("value", expr_node(base)), ("attr", Node::Repr(py_repr(attr)))],
        ),
        ExprKind::BinOp { op, left, right } => {
            let op_name = match op {
                BinOp::Add => "Add",
                BinOp::Sub => "Sub",
                BinOp::Mul => "Mult",
            };
            Node::Ast(
                "BinOp",
                vec![
                    ("left", expr_node(left)),
                    ("op", Node::Ast(op_name, vec![])),
                    ("right", expr_node(right)),
                ],
            )
        }
        ExprKind::Subscript { base, index } => Node::Ast(
            "Subscript",
            vec![("value", expr_node(base)), ("slice", expr_node(index))],
        ),
    }
}

/// Python-style `repr` of a string.
fn py_repr(s: &str) -> String {
    let quote = if s.contains('\'') && !s.contains('"') {
        '"'
    } else {
        '\''
    };
    let mut out = String::with_capacity(s.len() + 2);
    out.push(quote);
    for c in s.chars() {
        match c {
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\t' => out.push_str("\\t"),
            c if c == quote => {
                out.push('\\');
                out.push(c);
            }
            c => out.push(c),
        }
    }
    out.push(quote);
    out
}

/// Render a module back to source text in the parsed subset.
pub fn unparse(m: &ModuleAst) -> String {
    let mut out = String::new();
    for s in &m.body {
        unparse_stmt(s, 0, &mut out);
    }
    out
}

fn unparse_stmt(s: &Stmt, depth: usize, out: &mut String) {
    let pad = "    ".repeat(depth);
    match &s.kind {
        StmtKind::Assign { targets, value } => {
            out.push_str(&format!("{pad}{} = {}\n", targets.join(" = "), unparse_expr(value)))
        }
        StmtKind::Expr(e) => out.push_str(&format!("{pad}{}\n", unparse_expr(e))),
        StmtKind::For { var, iter, body } => {
            out.push_str(&format!("{pad}for {var} in {}:\n", unparse_expr(iter)));
            for b in body {
                unparse_stmt(b, depth + 1, out);
            }
        }
        StmtKind::Pass => out.push_str(&format!("{pad}pass\n")),
        StmtKind::Ellipsis => out.push_str(&format!("{pad}...\n")),
    }
}

fn precedence(e: &Expr) -> u8 {
    match &e.kind {
        ExprKind::BinOp { op: BinOp::Mul, .. } => 2,
        ExprKind::BinOp { .. } => 1,
        ExprKind::Int(v) if *v < 0 => 3,
        _ => 4,
    }
}

/// Render an expression as source text.
pub fn unparse_expr(e: &Expr) -> String {
    match &e.kind {
        ExprKind::Name(n) => n.clone(),
        ExprKind::Int(v) => v.to_string(),
        ExprKind::Str(s) => py_repr(s),
        ExprKind::List(items) => format!(
            "[{}]",
            items.iter().map(unparse_expr).collect::<Vec<_>>().join(", ")
        ),
        ExprKind::Call {
            func,
            args,
            keywords,
        } => {
            let mut parts: Vec<String> = args.iter().map(unparse_expr).collect();
            parts.extend(
                keywords
                    .iter()
                    .map(|k| format!("{}={}", k.name, unparse_expr(&k.value))),
            );
            format!("{}({})", operand(func, 4), parts.join(", "))
        }
        ExprKind::Attribute { base, attr } => {
            let base_text = match base.kind {
                ExprKind::Int(_) => format!("({})", unparse_expr(base)),
                _ => operand(base, 4),
            };
            format!("{base_text}.{attr}")
        }
        ExprKind::Subscript { base, index } => {
            format!("{}[{}]", operand(base, 4), unparse_expr(index))
        }
        ExprKind::BinOp { op, left, right } => {
            let own = precedence(e);
            // Left-associative: the right operand needs parentheses at equal precedence.
            format!(
                "{} {} {}",
                operand(left, own),
                op.symbol(),
                operand(right, own + 1)
            )
        }
    }
}

fn operand(e: &Expr, min_precedence: u8) -> String {
    if precedence(e) < min_precedence {
        format!("({})", unparse_expr(e))
    } else {
        unparse_expr(e)
    }
}

#[cfg(test)]
mod tests {
    use super::super::parse;
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn empty_module() {
        assert_eq!(dump(&ModuleAst::default()), "Module(body=[])");
    }

    #[test]
    fn circuit_constructor_shape() {
        let expected = "\
Module(
  body=[
    Assign(
      targets=[
        Name(id='qc')],
      value=Call(
        func=Name(id='QuantumCircuit'),
        args=[
          Constant(value=3),
          Constant(value=3)],
        keywords=[]))])";
        assert_eq!(dump(&parse("qc = QuantumCircuit(3, 3)").unwrap()), expected);
    }

    #[test]
    fn unparse_parenthesizes_by_precedence() {
        let src = "x = (a + 1) * 2 - (3 - b)\ny = a - (b - c) + -1\n";
        let m = parse(src).unwrap();
        assert_eq!(unparse(&m), "x = (a + 1) * 2 - (3 - b)\ny = a - (b - c) + -1\n");
    }

    fn arb_expr() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![
            (-20i64..20).prop_map(|v| v.to_string()),
            "[a-z]{1,3}".prop_filter("keyword", |s| !["in", "for", "if", "def", "as", "is", "or", "and", "not"].contains(&s.as_str())),
            "[a-z ]{0,4}".prop_map(|s| format!("'{s}'")),
        ];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("({a}) + {b}")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} * ({b})")),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("{a} - {b}")),
                prop::collection::vec(inner.clone(), 0..3).prop_map(|v| format!("[{}]", v.join(", "))),
                prop::collection::vec(inner.clone(), 0..3).prop_map(|v| format!("qc.h({})", v.join(", "))),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| format!("Gate({a}, name={b})")),
                inner.clone().prop_map(|a| format!("reg[{a}]")),
            ]
        })
    }

    fn arb_program() -> impl Strategy<Value = String> {
        let stmt = prop_oneof![
            arb_expr().prop_map(|e| format!("x = {e}\n")),
            arb_expr().prop_map(|e| format!("{e}\n")),
            (1i64..6, arb_expr()).prop_map(|(n, e)| format!("for i in range({n}):\n    {e}\n")),
            Just("...\n".to_string()),
            Just("pass\n".to_string()),
        ];
        prop::collection::vec(stmt, 0..6).prop_map(|v| v.concat())
    }

    proptest! {
        #[test]
        fn dump_is_stable_through_source_round_trip(src in arb_program()) {
            let m = parse(&src).unwrap();
            let again = parse(&unparse(&m)).unwrap();
            prop_assert_eq!(&again, &m);
            prop_assert_eq!(dump(&again), dump(&m));
        }
    }
}

use super::{Expr, ExprKind, Keyword};

/// Reduce every integer-only `+ - *` subtree to a constant.
///
/// Non-constant subtrees are rebuilt with folded children; an operation that
/// would overflow `i64` is left in place.
pub fn fold_constants(e: &Expr) -> Expr {
    let kind = match &e.kind {
        ExprKind::Name(_) | ExprKind::Int(_) | ExprKind::Str(_) => e.kind.clone(),
        ExprKind::List(items) => ExprKind::List(items.iter().map(fold_constants).collect()),
        ExprKind::Call {
            func,
            args,
            keywords,
        } => ExprKind::Call {
            func: Box::new(fold_constants(func)),
            args: args.iter().map(fold_constants).collect(),
            keywords: keywords
                .iter()
                .map(|k| Keyword {
                    name: k.name.clone(),
                    value: fold_constants(&k.value),
                })
                .collect(),
        },
        ExprKind::Attribute { base, attr } => ExprKind::Attribute {
            base: Box::new(fold_constants(base)),
            attr: attr.clone(),
        },
        ExprKind::Subscript { base, index } => ExprKind::Subscript {
            base: Box::new(fold_constants(base)),
            index: Box::new(fold_constants(index)),
        },
        ExprKind::BinOp { op, left, right } => {
            let left = fold_constants(left);
            let right = fold_constants(right);
            match (left.as_int(), right.as_int()) {
                (Some(l), Some(r)) => match op.apply(l, r) {
                    Some(v) => ExprKind::Int(v),
                    None => ExprKind::BinOp {
                        op: *op,
                        left: Box::new(left),
                        right: Box::new(right),
                    },
                },
                _ => ExprKind::BinOp {
                    op: *op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
            }
        }
    };
    Expr::new(kind, e.line)
}

#[cfg(test)]
mod tests {
    use super::super::{parse_expr, BinOp};
    use super::*;
    use proptest::prelude::*;

    /// Independent evaluator: walks the tree with wide arithmetic.
    fn eval(e: &Expr) -> Option<i128> {
        match &e.kind {
            ExprKind::Int(v) => Some(i128::from(*v)),
            ExprKind::BinOp { op, left, right } => {
                let (l, r) = (eval(left)?, eval(right)?);
                Some(match op {
                    BinOp::Add => l + r,
                    BinOp::Sub => l - r,
                    BinOp::Mul => l * r,
                })
            }
            _ => None,
        }
    }

    fn folded(src: &str) -> ExprKind {
        fold_constants(&parse_expr(src).unwrap()).kind
    }

    #[test]
    fn listed_examples() {
        assert_eq!(folded("0+1"), ExprKind::Int(1));
        assert_eq!(folded("5"), ExprKind::Int(5));
        assert_eq!(folded("2*(1+2)"), ExprKind::Int(6));
    }

    #[test]
    fn folds_inside_calls_and_lists() {
        assert_eq!(
            fold_constants(&parse_expr("qc.measure([0+1, 2], [3*1, i+1])").unwrap()),
            parse_expr("qc.measure([1, 2], [3, i+1])").unwrap()
        );
    }

    #[test]
    fn overflow_is_left_alone() {
        let e = parse_expr("9223372036854775807 + 1").unwrap();
        assert_eq!(fold_constants(&e), e);
    }

    fn arb_int_expr() -> impl Strategy<Value = Expr> {
        let leaf = (-50i64..50).prop_map(|v| Expr::new(ExprKind::Int(v), 1));
        leaf.prop_recursive(5, 40, 2, |inner| {
            (
                prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul)],
                inner.clone(),
                inner,
            )
                .prop_map(|(op, l, r)| {
                    Expr::new(
                        ExprKind::BinOp {
                            op,
                            left: Box::new(l),
                            right: Box::new(r),
                        },
                        1,
                    )
                })
        })
    }

    proptest! {
        #[test]
        fn fold_matches_evaluator(e in arb_int_expr()) {
            let f = fold_constants(&e);
            prop_assert_eq!(f.as_int().map(i128::from), eval(&e));
        }

        #[test]
        fn fold_is_idempotent(e in arb_int_expr(), name in "[a-z]{1,3}") {
            let mixed = Expr::new(ExprKind::BinOp {
                op: BinOp::Add,
                left: Box::new(Expr::new(ExprKind::Name(name), 1)),
                right: Box::new(e),
            }, 1);
            let once = fold_constants(&mixed);
            prop_assert_eq!(fold_constants(&once), once);
        }
    }
}

use super::lexer::{lex, LogicalLine, Tok, Token};
use super::{BinOp, Expr, ExprKind, Keyword, ModuleAst, ParseError, Stmt, StmtKind, Warning};

/// Statement heads the subset does not model. Their lines (and indented
/// blocks) are skipped with a warning.
const UNMODELED: &[&str] = &[
    "def", "class", "if", "elif", "else", "while", "with", "try", "except", "finally", "import",
    "from", "return", "async", "await", "global", "nonlocal", "del", "assert", "raise", "yield",
    "break", "continue", "lambda", "match", "case",
];

pub(crate) fn parse_module(source: &str) -> Result<ModuleAst, ParseError> {
    let lexed = lex(source)?;
    let mut warnings = lexed.warnings;
    let lines = lexed.lines;
    let mut pos = 0;
    let base = lines.first().map_or(0, |l| l.indent);
    let mut body = Vec::new();
    while pos < lines.len() {
        // A dedent below the first statement's column still belongs to the module.
        let indent = lines[pos].indent.min(base);
        parse_block(&lines, &mut pos, indent, &mut body, &mut warnings);
    }
    warnings.sort_by_key(|w| w.line);
    Ok(ModuleAst { body, warnings })
}

/// Parse one expression from source text, e.g. a call argument captured by
/// a regex filter.
pub fn parse_expr(text: &str) -> Result<Expr, String> {
    let lexed = lex(text).map_err(|e| e.message)?;
    let [line] = lexed.lines.as_slice() else {
        return Err("expected a single expression".to_string());
    };
    let mut warnings = Vec::new();
    let mut p = ExprParser::new(&line.tokens, &mut warnings);
    let expr = p.expr()?;
    p.expect_end()?;
    Ok(expr)
}

fn parse_block(
    lines: &[LogicalLine],
    pos: &mut usize,
    indent: usize,
    out: &mut Vec<Stmt>,
    warnings: &mut Vec<Warning>,
) {
    while *pos < lines.len() {
        let line = &lines[*pos];
        if line.indent < indent {
            return;
        }
        if line.indent > indent {
            warnings.push(Warning {
                line: line.line,
                message: "unexpected indent".to_string(),
            });
        }
        *pos += 1;
        let opens_block = matches!(line.tokens.last(), Some(Token { tok: Tok::Colon, .. }));
        let head = match &line.tokens[0].tok {
            Tok::Name(n) => Some(n.as_str()),
            _ => None,
        };

        if let Some(kw) = head.filter(|h| UNMODELED.contains(h)) {
            warnings.push(Warning {
                line: line.line,
                message: format!("unsupported '{kw}' statement skipped"),
            });
            if opens_block {
                skip_body(lines, pos, line.indent);
            }
            continue;
        }

        if head == Some("for") {
            match parse_for_header(line, warnings) {
                Ok((var, iter, inline)) => {
                    let mut body = Vec::new();
                    if let Some(stmt) = inline {
                        body.push(stmt);
                    } else if *pos < lines.len() && lines[*pos].indent > line.indent {
                        let inner = lines[*pos].indent;
                        parse_block(lines, pos, inner, &mut body, warnings);
                    }
                    if body.is_empty() {
                        warnings.push(Warning {
                            line: line.line,
                            message: "for loop without a recognized body skipped".to_string(),
                        });
                    } else {
                        out.push(Stmt {
                            kind: StmtKind::For { var, iter, body },
                            line: line.line,
                        });
                    }
                }
                Err(message) => {
                    warnings.push(Warning {
                        line: line.line,
                        message,
                    });
                    skip_body(lines, pos, line.indent);
                }
            }
            continue;
        }

        match parse_simple(&line.tokens, line.line, warnings) {
            Ok(stmt) => out.push(stmt),
            Err(message) => {
                warnings.push(Warning {
                    line: line.line,
                    message: format!("unrecognized statement skipped: {message}"),
                });
                if opens_block {
                    skip_body(lines, pos, line.indent);
                }
            }
        }
    }
}

fn skip_body(lines: &[LogicalLine], pos: &mut usize, indent: usize) {
    while *pos < lines.len() && lines[*pos].indent > indent {
        *pos += 1;
    }
}

type ForHeader = (String, Expr, Option<Stmt>);

fn parse_for_header(line: &LogicalLine, warnings: &mut Vec<Warning>) -> Result<ForHeader, String> {
    let toks = &line.tokens;
    let var = match (toks.get(1).map(|t| &t.tok), toks.get(2).map(|t| &t.tok)) {
        (Some(Tok::Name(v)), Some(Tok::Name(kw))) if kw == "in" => v.clone(),
        _ => return Err("unsupported for-loop target".to_string()),
    };
    let colon = top_level_position(toks, |t| *t == Tok::Colon)
        .ok_or_else(|| "for loop header without ':'".to_string())?;
    let mut p = ExprParser::new(&toks[3..colon], warnings);
    let iter = p.expr()?;
    p.expect_end()?;
    let rest = &toks[colon + 1..];
    let inline = if rest.is_empty() {
        None
    } else {
        Some(parse_simple(rest, rest[0].line, warnings)?)
    };
    Ok((var, iter, inline))
}

fn top_level_position(toks: &[Token], pred: impl Fn(&Tok) -> bool) -> Option<usize> {
    let mut depth = 0usize;
    for (i, t) in toks.iter().enumerate() {
        match t.tok {
            Tok::LParen | Tok::LBrack | Tok::LBrace => depth += 1,
            Tok::RParen | Tok::RBrack | Tok::RBrace => depth = depth.saturating_sub(1),
            _ if depth == 0 && pred(&t.tok) => return Some(i),
            _ => {}
        }
    }
    None
}

fn parse_simple(toks: &[Token], line: usize, warnings: &mut Vec<Warning>) -> Result<Stmt, String> {
    match toks {
        [Token { tok: Tok::Name(n), .. }] if n == "pass" => {
            return Ok(Stmt {
                kind: StmtKind::Pass,
                line,
            })
        }
        [Token {
            tok: Tok::Ellipsis, ..
        }] => {
            return Ok(Stmt {
                kind: StmtKind::Ellipsis,
                line,
            })
        }
        _ => {}
    }

    let mut segments = Vec::new();
    let mut start = 0;
    while let Some(off) = top_level_position(&toks[start..], |t| *t == Tok::Assign) {
        segments.push(&toks[start..start + off]);
        start += off + 1;
    }
    let value_toks = &toks[start..];
    if value_toks.is_empty() {
        return Err("missing assigned value".to_string());
    }
    let mut p = ExprParser::new(value_toks, warnings);
    let value = p.expr()?;
    p.expect_end()?;

    if segments.is_empty() {
        return Ok(Stmt {
            kind: StmtKind::Expr(value),
            line,
        });
    }
    let targets = segments
        .into_iter()
        .map(|seg| match seg {
            [Token { tok: Tok::Name(n), .. }] => Ok(n.clone()),
            _ => Err("assignment target is not a plain name".to_string()),
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Stmt {
        kind: StmtKind::Assign { targets, value },
        line,
    })
}

struct ExprParser<'t, 'w> {
    toks: &'t [Token],
    pos: usize,
    warnings: &'w mut Vec<Warning>,
}

impl<'t, 'w> ExprParser<'t, 'w> {
    fn new(toks: &'t [Token], warnings: &'w mut Vec<Warning>) -> Self {
        ExprParser {
            toks,
            pos: 0,
            warnings,
        }
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn peek_at(&self, ahead: usize) -> Option<&'t Tok> {
        self.toks.get(self.pos + ahead).map(|t| &t.tok)
    }

    fn line(&self) -> usize {
        self.toks
            .get(self.pos)
            .or(self.toks.last())
            .map_or(0, |t| t.line)
    }

    fn bump(&mut self) -> Option<&'t Tok> {
        let t = self.peek();
        self.pos += 1;
        t
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == Some(want) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: &Tok) -> Result<(), String> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.unexpected())
        }
    }

    fn expect_end(&self) -> Result<(), String> {
        match self.peek() {
            None => Ok(()),
            Some(_) => Err(self.unexpected()),
        }
    }

    fn unexpected(&self) -> String {
        match self.peek() {
            Some(t) => format!("unexpected {}", t.describe()),
            None => "unexpected end of statement".to_string(),
        }
    }

    fn expr(&mut self) -> Result<Expr, String> {
        let mut left = self.term()?;
        loop {
            let op = match self.peek() {
                Some(Tok::Plus) => BinOp::Add,
                Some(Tok::Minus) => BinOp::Sub,
                _ => return Ok(left),
            };
            self.pos += 1;
            let right = self.term()?;
            let line = left.line;
            left = Expr::new(
                ExprKind::BinOp {
                    op,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                line,
            );
        }
    }

    fn term(&mut self) -> Result<Expr, String> {
        let mut left = self.unary()?;
        while self.eat(&Tok::Star) {
            let right = self.unary()?;
            let line = left.line;
            left = Expr::new(
                ExprKind::BinOp {
                    op: BinOp::Mul,
                    left: Box::new(left),
                    right: Box::new(right),
                },
                line,
            );
        }
        Ok(left)
    }

    fn unary(&mut self) -> Result<Expr, String> {
        let line = self.line();
        if self.eat(&Tok::Minus) {
            let operand = self.unary()?;
            return Ok(match operand.kind {
                ExprKind::Int(v) => Expr::new(ExprKind::Int(-v), line),
                _ => Expr::new(
                    ExprKind::BinOp {
                        op: BinOp::Sub,
                        left: Box::new(Expr::new(ExprKind::Int(0), line)),
                        right: Box::new(operand),
                    },
                    line,
                ),
            });
        }
        if self.eat(&Tok::Plus) {
            return self.unary();
        }
        self.postfix()
    }

    fn postfix(&mut self) -> Result<Expr, String> {
        let mut e = self.atom()?;
        loop {
            match self.peek() {
                Some(Tok::Dot) => match self.peek_at(1) {
                    Some(Tok::Name(attr)) => {
                        self.pos += 2;
                        let line = e.line;
                        e = Expr::new(
                            ExprKind::Attribute {
                                base: Box::new(e),
                                attr: attr.clone(),
                            },
                            line,
                        );
                    }
                    // `[..]. [..]`: handled as a separator by the argument list.
                    Some(Tok::LBrack) if matches!(e.kind, ExprKind::List(_)) => return Ok(e),
                    _ => {
                        self.pos += 1;
                        return Err(self.unexpected());
                    }
                },
                Some(Tok::LParen) => {
                    if !matches!(e.kind, ExprKind::Name(_) | ExprKind::Attribute { .. }) {
                        return Err("call target is not a name or attribute".to_string());
                    }
                    self.pos += 1;
                    let (args, keywords) = self.call_args()?;
                    let line = e.line;
                    e = Expr::new(
                        ExprKind::Call {
                            func: Box::new(e),
                            args,
                            keywords,
                        },
                        line,
                    );
                }
                Some(Tok::LBrack) => {
                    self.pos += 1;
                    let index = self.expr()?;
                    self.expect(&Tok::RBrack)?;
                    let line = e.line;
                    e = Expr::new(
                        ExprKind::Subscript {
                            base: Box::new(e),
                            index: Box::new(index),
                        },
                        line,
                    );
                }
                _ => return Ok(e),
            }
        }
    }

    fn call_args(&mut self) -> Result<(Vec<Expr>, Vec<Keyword>), String> {
        let mut args = Vec::new();
        let mut keywords: Vec<Keyword> = Vec::new();
        loop {
            if self.eat(&Tok::RParen) {
                return Ok((args, keywords));
            }
            if let (Some(Tok::Name(name)), Some(Tok::Assign)) = (self.peek(), self.peek_at(1)) {
                self.pos += 2;
                let value = self.expr()?;
                keywords.push(Keyword {
                    name: name.clone(),
                    value,
                });
            } else {
                if !keywords.is_empty() {
                    return Err("positional argument after keyword argument".to_string());
                }
                args.push(self.expr()?);
            }
            match self.peek() {
                Some(Tok::Comma) => self.pos += 1,
                Some(Tok::RParen) => {}
                Some(Tok::Dot)
                    if self.peek_at(1) == Some(&Tok::LBrack)
                        && matches!(args.last().map(|a| &a.kind), Some(ExprKind::List(_))) =>
                {
                    self.warnings.push(Warning {
                        line: self.line(),
                        message: "'.' between list arguments read as ','".to_string(),
                    });
                    self.pos += 1;
                }
                _ => return Err(self.unexpected()),
            }
        }
    }

    fn atom(&mut self) -> Result<Expr, String> {
        let line = self.line();
        let Some(tok) = self.bump() else {
            return Err("unexpected end of statement".to_string());
        };
        let kind = match tok {
            Tok::Name(n) => ExprKind::Name(n.clone()),
            Tok::Int(v) => ExprKind::Int(*v),
            Tok::Str(s) => {
                let mut s = s.clone();
                // Adjacent literals concatenate.
                while let Some(Tok::Str(more)) = self.peek() {
                    s.push_str(more);
                    self.pos += 1;
                }
                ExprKind::Str(s)
            }
            Tok::LBrack => {
                let mut items = Vec::new();
                loop {
                    if self.eat(&Tok::RBrack) {
                        break;
                    }
                    items.push(self.expr()?);
                    if !self.eat(&Tok::Comma) {
                        self.expect(&Tok::RBrack)?;
                        break;
                    }
                }
                ExprKind::List(items)
            }
            Tok::LParen => {
                let inner = self.expr()?;
                self.expect(&Tok::RParen)?;
                return Ok(inner);
            }
            other => {
                self.pos -= 1;
                return Err(format!("unexpected {}", other.describe()));
            }
        };
        Ok(Expr::new(kind, line))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn int(v: i64) -> ExprKind {
        ExprKind::Int(v)
    }

    fn kinds(args: &[Expr]) -> Vec<ExprKind> {
        args.iter().map(|a| a.kind.clone()).collect()
    }

    #[test]
    fn circuit_constructor() {
        let m = parse_module("qc = QuantumCircuit(3, 3)").unwrap();
        assert_eq!(m.body.len(), 1);
        let StmtKind::Assign { targets, value } = &m.body[0].kind else {
            panic!("not an assignment");
        };
        assert_eq!(targets, &["qc".to_string()]);
        let (callee, args, kw) = value.as_name_call().unwrap();
        assert_eq!(callee, "QuantumCircuit");
        assert_eq!(kinds(args), vec![int(3), int(3)]);
        assert!(kw.is_empty());
    }

    #[test]
    fn empty_source() {
        let m = parse_module("").unwrap();
        assert!(m.body.is_empty());
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn measure_loop() {
        let m = parse_module("for i in range(10):\n    circ.measure(qreg[i], mreg[i])").unwrap();
        let StmtKind::For { var, iter, body } = &m.body[0].kind else {
            panic!("not a loop");
        };
        assert_eq!(var, "i");
        let (callee, args, _) = iter.as_name_call().unwrap();
        assert_eq!((callee, kinds(args)), ("range", vec![int(10)]));
        assert_eq!(body.len(), 1);
        assert_eq!(body[0].line, 2);
        let StmtKind::Expr(call) = &body[0].kind else {
            panic!("not an expression statement");
        };
        let (recv, method, args, _) = call.as_method_call().unwrap();
        assert_eq!(recv.as_name(), Some("circ"));
        assert_eq!(method, "measure");
        assert!(matches!(args[0].kind, ExprKind::Subscript { .. }));
        assert!(matches!(args[1].kind, ExprKind::Subscript { .. }));
    }

    #[test]
    fn inline_for_body() {
        let m = parse_module("for q in [0, 1]: qc.h(q)\n").unwrap();
        let StmtKind::For { body, .. } = &m.body[0].kind else {
            panic!("not a loop");
        };
        assert_eq!(body.len(), 1);
    }

    #[test]
    fn dotted_list_separator() {
        let m = parse_module("qc.measure([0, 1, 2]. [0, 1, 2])").unwrap();
        let StmtKind::Expr(call) = &m.body[0].kind else {
            panic!();
        };
        let (_, _, args, _) = call.as_method_call().unwrap();
        assert_eq!(args.len(), 2);
        assert_eq!(m.warnings.len(), 1);
    }

    #[test]
    fn keywords_and_strings() {
        let m = parse_module("qr = QuantumRegister(2, name='qreg')").unwrap();
        let StmtKind::Assign { value, .. } = &m.body[0].kind else {
            panic!();
        };
        let (_, args, kw) = value.as_name_call().unwrap();
        assert_eq!(kinds(args), vec![int(2)]);
        assert_eq!(kw[0].name, "name");
        assert_eq!(kw[0].value.kind, ExprKind::Str("qreg".into()));
    }

    #[test]
    fn unary_minus_is_a_negative_constant() {
        assert_eq!(parse_expr("-3").unwrap().kind, int(-3));
        assert_eq!(parse_expr("(-1)+1").unwrap().kind, ExprKind::BinOp {
            op: BinOp::Add,
            left: Box::new(Expr::new(int(-1), 1)),
            right: Box::new(Expr::new(int(1), 1)),
        });
    }

    #[test]
    fn skips_unmodeled_blocks_with_warning() {
        let src = "import numpy as np\ndef f(x):\n    qc.h(0)\n    return x\nqc = QuantumCircuit(1)\n";
        let m = parse_module(src).unwrap();
        assert_eq!(m.body.len(), 1);
        assert_eq!(m.body[0].line, 5);
        assert_eq!(m.warnings.len(), 2);
    }

    #[test]
    fn unsupported_expressions_are_warnings() {
        let m = parse_module("qc.rx(0.5, 0)\nx = a / b\nqc.h(0)\n").unwrap();
        assert_eq!(m.body.len(), 1);
        assert_eq!(m.body[0].line, 3);
        assert_eq!(m.warnings.len(), 2);
    }

    #[test]
    fn comments_and_ellipsis_lines() {
        let m = parse_module("# Buggy Code:\nqc = QuantumCircuit(2)\n...\n... # more\n").unwrap();
        assert_eq!(m.body.len(), 3);
        assert!(matches!(m.body[1].kind, StmtKind::Ellipsis));
        assert!(m.warnings.is_empty());
    }

    #[test]
    fn tuple_targets_are_skipped() {
        let m = parse_module("a, b = 1, 2\nx = y = 3\n").unwrap();
        assert_eq!(m.body.len(), 1);
        let StmtKind::Assign { targets, .. } = &m.body[0].kind else {
            panic!();
        };
        assert_eq!(targets.len(), 2);
    }

    #[test]
    fn call_of_call_rejected() {
        assert!(parse_expr("f()(1)").is_err());
        assert!(parse_expr("a[0](1)").is_err());
    }
}

use super::{ParseError, Warning};

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Name(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBrack,
    RBrack,
    LBrace,
    RBrace,
    Comma,
    Dot,
    Colon,
    Assign,
    Plus,
    Minus,
    Star,
    Ellipsis,
    /// Anything outside the subset (floats, comparison operators, ...).
    Other(String),
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("name '{n}'"),
            Tok::Int(_) => "integer".to_string(),
            Tok::Str(_) => "string".to_string(),
            Tok::LParen => "'('".to_string(),
            Tok::RParen => "')'".to_string(),
            Tok::LBrack => "'['".to_string(),
            Tok::RBrack => "']'".to_string(),
            Tok::LBrace => "'{'".to_string(),
            Tok::RBrace => "'}'".to_string(),
            Tok::Comma => "','".to_string(),
            Tok::Dot => "'.'".to_string(),
            Tok::Colon => "':'".to_string(),
            Tok::Assign => "'='".to_string(),
            Tok::Plus => "'+'".to_string(),
            Tok::Minus => "'-'".to_string(),
            Tok::Star => "'*'".to_string(),
            Tok::Ellipsis => "'...'".to_string(),
            Tok::Other(kind) => kind.clone(),
        }
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
}

/// One logical line: a statement's tokens after bracket and backslash joining.
#[derive(Debug, Clone)]
pub(crate) struct LogicalLine {
    pub line: usize,
    pub indent: usize,
    pub tokens: Vec<Token>,
}

pub(crate) struct Lexed {
    pub lines: Vec<LogicalLine>,
    pub warnings: Vec<Warning>,
}

struct Lexer {
    chars: Vec<char>,
    pos: usize,
    line: usize,
    lines: Vec<LogicalLine>,
    warnings: Vec<Warning>,
    current: Option<LogicalLine>,
    brackets: Vec<(char, usize)>,
    backslash: bool,
}

pub(crate) fn lex(source: &str) -> Result<Lexed, ParseError> {
    let mut lx = Lexer {
        chars: source.chars().collect(),
        pos: 0,
        line: 1,
        lines: Vec::new(),
        warnings: Vec::new(),
        current: None,
        brackets: Vec::new(),
        backslash: false,
    };
    lx.run()?;
    Ok(Lexed {
        lines: lx.lines,
        warnings: lx.warnings,
    })
}

impl Lexer {
    fn peek(&self, ahead: usize) -> Option<char> {
        self.chars.get(self.pos + ahead).copied()
    }

    fn run(&mut self) -> Result<(), ParseError> {
        while self.pos < self.chars.len() {
            self.line_start();
            self.scan_line()?;
        }
        self.finish_statement();
        Ok(())
    }

    fn in_continuation(&self) -> bool {
        self.current.is_some() && (!self.brackets.is_empty() || self.backslash)
    }

    /// Measure indentation and decide whether this physical line continues
    /// the open statement.
    fn line_start(&mut self) {
        let mut indent = 0;
        while let Some(c) = self.peek(0) {
            match c {
                ' ' => indent += 1,
                '\t' => indent = (indent / 8 + 1) * 8,
                '\x0c' => indent = 0,
                _ => break,
            }
            self.pos += 1;
        }
        let first = self.peek(0);
        let blank = matches!(first, None | Some('\n') | Some('\r') | Some('#'));
        if blank {
            return;
        }
        if self.in_continuation() {
            let closes = matches!(first, Some(')') | Some(']') | Some('}'));
            let start_indent = self.current.as_ref().map_or(0, |l| l.indent);
            if self.backslash || closes || indent > start_indent {
                self.backslash = false;
                return;
            }
            self.finish_statement();
        }
        self.backslash = false;
        if self.current.is_none() {
            self.current = Some(LogicalLine {
                line: self.line,
                indent,
                tokens: Vec::new(),
            });
        }
    }

    /// Close the current logical line, supplying any missing closing brackets.
    fn finish_statement(&mut self) {
        let Some(mut current) = self.current.take() else {
            self.brackets.clear();
            return;
        };
        if let Some(&(_, opened)) = self.brackets.first() {
            self.warnings.push(Warning {
                line: opened,
                message: "unclosed bracket closed at end of statement".to_string(),
            });
            let last = current.tokens.last().map_or(current.line, |t| t.line);
            while let Some((open, _)) = self.brackets.pop() {
                let tok = match open {
                    '(' => Tok::RParen,
                    '[' => Tok::RBrack,
                    _ => Tok::RBrace,
                };
                current.tokens.push(Token { tok, line: last });
            }
        }
        self.backslash = false;
        if !current.tokens.is_empty() {
            self.lines.push(current);
        }
    }

    fn push(&mut self, tok: Tok, line: usize) {
        if self.current.is_none() {
            self.current = Some(LogicalLine {
                line,
                indent: 0,
                tokens: Vec::new(),
            });
        }
        if let Some(cur) = self.current.as_mut() {
            cur.tokens.push(Token { tok, line });
        }
    }

    fn scan_line(&mut self) -> Result<(), ParseError> {
        while let Some(c) = self.peek(0) {
            match c {
                '\n' => {
                    self.pos += 1;
                    self.line += 1;
                    if self.brackets.is_empty() && !self.backslash {
                        self.finish_statement();
                    }
                    return Ok(());
                }
                ' ' | '\t' | '\r' | '\x0c' => self.pos += 1,
                '#' => {
                    while !matches!(self.peek(0), None | Some('\n')) {
                        self.pos += 1;
                    }
                }
                '\\' if matches!(self.peek(1), Some('\n')) => {
                    self.backslash = true;
                    self.pos += 1;
                }
                '"' | '\'' => self.string(String::new())?,
                c if c.is_alphabetic() || c == '_' => self.word()?,
                c if c.is_ascii_digit() => self.number(),
                _ => self.punct()?,
            }
        }
        Ok(())
    }

    fn word(&mut self) -> Result<(), ParseError> {
        let start = self.pos;
        while matches!(self.peek(0), Some(c) if c.is_alphanumeric() || c == '_') {
            self.pos += 1;
        }
        let word: String = self.chars[start..self.pos].iter().collect();
        let is_prefix = word.len() <= 2 && word.chars().all(|c| "rRbBuUfF".contains(c));
        if is_prefix && matches!(self.peek(0), Some('"') | Some('\'')) {
            return self.string(word);
        }
        self.push(Tok::Name(word), self.line);
        Ok(())
    }

    fn number(&mut self) {
        let line = self.line;
        let start = self.pos;
        while matches!(self.peek(0), Some(c) if c.is_ascii_digit() || c == '_') {
            self.pos += 1;
        }
        let digits: String = self.chars[start..self.pos]
            .iter()
            .filter(|c| **c != '_')
            .collect();
        let is_float = self.peek(0) == Some('.') && self.peek(1) != Some('.');
        let has_suffix = matches!(self.peek(0), Some(c) if c.is_alphanumeric() || c == '_');
        if is_float || has_suffix {
            if is_float {
                self.pos += 1;
            }
            while matches!(self.peek(0), Some(c) if c.is_alphanumeric() || c == '_' || c == '.') {
                self.pos += 1;
            }
            self.push(Tok::Other("non-integer number".to_string()), line);
            return;
        }
        match digits.parse::<i64>() {
            Ok(v) => self.push(Tok::Int(v), line),
            Err(_) => self.push(Tok::Other("integer out of range".to_string()), line),
        }
    }

    fn string(&mut self, prefix: String) -> Result<(), ParseError> {
        let line = self.line;
        let quote = self.peek(0).unwrap_or('"');
        let triple = self.peek(1) == Some(quote) && self.peek(2) == Some(quote);
        let raw = prefix.contains(['r', 'R']);
        self.pos += if triple { 3 } else { 1 };
        let mut value = String::new();
        loop {
            let Some(c) = self.peek(0) else {
                self.push(Tok::Other("unterminated string".to_string()), line);
                return Ok(());
            };
            if c == quote {
                if !triple {
                    self.pos += 1;
                    break;
                }
                if self.peek(1) == Some(quote) && self.peek(2) == Some(quote) {
                    self.pos += 3;
                    break;
                }
            }
            if c == '\n' {
                if !triple {
                    self.push(Tok::Other("unterminated string".to_string()), line);
                    return Ok(());
                }
                self.line += 1;
            }
            if c == '\\' && !raw {
                if let Some(next) = self.peek(1) {
                    self.pos += 2;
                    match next {
                        'n' => value.push('\n'),
                        't' => value.push('\t'),
                        '\\' | '\'' | '"' => value.push(next),
                        '\n' => self.line += 1,
                        other => {
                            value.push('\\');
                            value.push(other);
                        }
                    }
                    continue;
                }
            }
            value.push(c);
            self.pos += 1;
        }
        if prefix.contains(['f', 'F']) {
            self.push(Tok::Other("f-string".to_string()), line);
        } else {
            self.push(Tok::Str(value), line);
        }
        Ok(())
    }

    fn punct(&mut self) -> Result<(), ParseError> {
        let line = self.line;
        let c = self.peek(0).unwrap_or('\0');
        let next = self.peek(1);
        self.pos += 1;
        let tok = match c {
            '(' | '[' | '{' => {
                self.brackets.push((c, line));
                match c {
                    '(' => Tok::LParen,
                    '[' => Tok::LBrack,
                    _ => Tok::LBrace,
                }
            }
            ')' | ']' | '}' => {
                let want = match c {
                    ')' => '(',
                    ']' => '[',
                    _ => '{',
                };
                match self.brackets.pop() {
                    Some((open, _)) if open == want => {}
                    Some((open, opened)) => {
                        return Err(ParseError {
                            line,
                            message: format!(
                                "'{c}' does not match '{open}' opened on line {opened}"
                            ),
                        })
                    }
                    None => {
                        return Err(ParseError {
                            line,
                            message: format!("unmatched '{c}'"),
                        })
                    }
                }
                match c {
                    ')' => Tok::RParen,
                    ']' => Tok::RBrack,
                    _ => Tok::RBrace,
                }
            }
            ',' => Tok::Comma,
            '.' if next == Some('.') && self.peek(1) == Some('.') => {
                self.pos += 2;
                Tok::Ellipsis
            }
            '.' => Tok::Dot,
            ':' if next == Some('=') => {
                self.pos += 1;
                Tok::Other("':='".to_string())
            }
            ':' => Tok::Colon,
            '=' if next == Some('=') => {
                self.pos += 1;
                Tok::Other("'=='".to_string())
            }
            '=' => Tok::Assign,
            '+' | '-' | '*' if next == Some('=') => {
                self.pos += 1;
                Tok::Other(format!("'{c}='"))
            }
            '*' if next == Some('*') => {
                self.pos += 1;
                Tok::Other("'**'".to_string())
            }
            '-' if next == Some('>') => {
                self.pos += 1;
                Tok::Other("'->'".to_string())
            }
            '+' => Tok::Plus,
            '-' => Tok::Minus,
            '*' => Tok::Star,
            other => Tok::Other(format!("'{other}'")),
        };
        self.push(tok, line);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(src: &str) -> Vec<Vec<Tok>> {
        lex(src)
            .unwrap()
            .lines
            .into_iter()
            .map(|l| l.tokens.into_iter().map(|t| t.tok).collect())
            .collect()
    }

    #[test]
    fn joins_bracketed_continuations() {
        let lines = lex("qc = QuantumCircuit(\n    2,\n    2\n)\nqc.h(0)\n").unwrap().lines;
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].line, 1);
        assert_eq!(lines[1].line, 5);
    }

    #[test]
    fn closes_truncated_call_at_dedent() {
        let lexed = lex("for i in range(3):\n    qc.measure(q[i], c[i]\n...\n").unwrap();
        assert_eq!(lexed.lines.len(), 3);
        assert_eq!(lexed.warnings.len(), 1);
        assert_eq!(lexed.warnings[0].line, 2);
        assert_eq!(lexed.lines[1].tokens.last().unwrap().tok, Tok::RParen);
    }

    #[test]
    fn mismatched_closer_is_fatal() {
        let err = lex("qc.h(0]\n").err().unwrap();
        assert_eq!(err.line, 1);
    }

    #[test]
    fn comments_and_strings() {
        assert_eq!(
            toks("x = 'a#b'  # trailing\n"),
            vec![vec![
                Tok::Name("x".into()),
                Tok::Assign,
                Tok::Str("a#b".into())
            ]]
        );
        assert!(toks("# only a comment\n\n").is_empty());
    }

    #[test]
    fn numbers() {
        assert_eq!(toks("1_000")[0], vec![Tok::Int(1000)]);
        assert!(matches!(toks("0.5")[0][0], Tok::Other(_)));
        assert!(matches!(toks("0x1f")[0][0], Tok::Other(_)));
        assert_eq!(toks("...")[0], vec![Tok::Ellipsis]);
    }

    #[test]
    fn triple_quoted_string_spans_lines() {
        let lexed = lex("\"\"\"doc\nstring\"\"\"\nqc.h(0)\n").unwrap();
        assert_eq!(lexed.lines.len(), 2);
        assert_eq!(lexed.lines[1].line, 3);
    }
}

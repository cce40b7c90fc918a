//! Surface syntax: a hand-written lexer and recursive-descent parser, plus the
//! canonical printer.
//!
//! ```text
//! spec    := decl*
//! decl    := "input" IDENT | "output" IDENT "@" pacing ":=" expr
//! pacing  := pterm ("|" pterm)*
//! pterm   := patom ("&" patom)*
//! patom   := "true" | IDENT | "(" pacing ")"
//! expr    := sum (("<" | "==") sum)?
//! sum     := prod (("+" | "-") prod)*
//! prod    := access ("*" access)*
//! access  := atom | IDENT "." ("prev" | "hold") "(" "or" ":" expr ")"
//! atom    := INT | "-" INT | IDENT | "(" expr ")"
//! ```
//!
//! `//` starts a line comment.

use std::fmt;

use thiserror::Error;

use crate::ast::{validate, BinOp, DeclSite, Equation, Ident, Pacing, Spec, StreamExpr, WellFormednessError};

/// Nesting limit for parentheses and defaults.
const MAX_NESTING: usize = 200;

/// 1-based line and column (columns count characters).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct SourcePos {
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found}")]
    Syntax { expected: String, found: String },
    #[error("{0}")]
    Invalid(WellFormednessError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{pos}: {kind}")]
pub struct ParseError {
    pub pos: SourcePos,
    pub kind: ParseErrorKind,
}

impl ParseError {
    fn syntax(pos: SourcePos, expected: impl Into<String>, found: impl Into<String>) -> Self {
        ParseError { pos, kind: ParseErrorKind::Syntax { expected: expected.into(), found: found.into() } }
    }

    /// `file:line:col: message`.
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{self}")
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Int(u64),
    Input,
    Output,
    Prev,
    Hold,
    Or,
    True,
    At,
    Assign,
    Colon,
    Pipe,
    Amp,
    LParen,
    RParen,
    Dot,
    Plus,
    Minus,
    Star,
    Lt,
    EqEq,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Int(v) => format!("integer `{v}`"),
            Tok::Eof => "end of input".to_string(),
            other => format!("`{}`", other.text()),
        }
    }

    fn text(&self) -> &'static str {
        match self {
            Tok::Input => "input",
            Tok::Output => "output",
            Tok::Prev => "prev",
            Tok::Hold => "hold",
            Tok::Or => "or",
            Tok::True => "true",
            Tok::At => "@",
            Tok::Assign => ":=",
            Tok::Colon => ":",
            Tok::Pipe => "|",
            Tok::Amp => "&",
            Tok::LParen => "(",
            Tok::RParen => ")",
            Tok::Dot => ".",
            Tok::Plus => "+",
            Tok::Minus => "-",
            Tok::Star => "*",
            Tok::Lt => "<",
            Tok::EqEq => "==",
            Tok::Ident(_) | Tok::Int(_) | Tok::Eof => "",
        }
    }
}

struct Lexer<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    pos: SourcePos,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { chars: text.chars().peekable(), pos: SourcePos { line: 1, column: 1 } }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.pos.line += 1;
            self.pos.column = 1;
        } else {
            self.pos.column += 1;
        }
        Some(c)
    }

    fn tokenize(mut self) -> Result<Vec<(Tok, SourcePos)>, ParseError> {
        let mut out = Vec::new();
        loop {
            self.skip_trivia();
            let start = self.pos;
            let Some(c) = self.bump() else {
                out.push((Tok::Eof, start));
                return Ok(out);
            };
            let tok = match c {
                '@' => Tok::At,
                '|' => Tok::Pipe,
                '&' => Tok::Amp,
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '.' => Tok::Dot,
                '+' => Tok::Plus,
                '-' => Tok::Minus,
                '*' => Tok::Star,
                '<' => Tok::Lt,
                ':' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::Assign
                    } else {
                        Tok::Colon
                    }
                }
                '=' => {
                    if self.chars.peek() == Some(&'=') {
                        self.bump();
                        Tok::EqEq
                    } else {
                        return Err(ParseError::syntax(start, "`==` or `:=`", "`=`"));
                    }
                }
                c if c.is_ascii_digit() => {
                    let mut lexeme = String::from(c);
                    while let Some(&d) = self.chars.peek() {
                        if !d.is_ascii_alphanumeric() && d != '_' {
                            break;
                        }
                        lexeme.push(d);
                        self.bump();
                    }
                    match lexeme.parse::<u64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => {
                            return Err(ParseError::syntax(
                                start,
                                "an integer literal",
                                format!("`{lexeme}`"),
                            ))
                        }
                    }
                }
                c if c == '_' || c.is_ascii_alphabetic() => {
                    let mut lexeme = String::from(c);
                    while let Some(&d) = self.chars.peek() {
                        if !d.is_ascii_alphanumeric() && d != '_' {
                            break;
                        }
                        lexeme.push(d);
                        self.bump();
                    }
                    match lexeme.as_str() {
                        "input" => Tok::Input,
                        "output" => Tok::Output,
                        "prev" => Tok::Prev,
                        "hold" => Tok::Hold,
                        "or" => Tok::Or,
                        "true" => Tok::True,
                        _ => Tok::Ident(lexeme),
                    }
                }
                other => {
                    return Err(ParseError::syntax(start, "a token", format!("`{other}`")));
                }
            };
            out.push((tok, start));
        }
    }

    fn skip_trivia(&mut self) {
        loop {
            match self.chars.peek() {
                Some(c) if c.is_whitespace() => {
                    self.bump();
                }
                Some('/') => {
                    let mut ahead = self.chars.clone();
                    ahead.next();
                    if ahead.peek() != Some(&'/') {
                        return;
                    }
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }
}

struct Parser {
    toks: Vec<(Tok, SourcePos)>,
    at: usize,
    depth: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn pos(&self) -> SourcePos {
        self.toks[self.at].1
    }

    fn advance(&mut self) -> Tok {
        let tok = self.toks[self.at].0.clone();
        if tok != Tok::Eof {
            self.at += 1;
        }
        tok
    }

    fn error(&self, expected: &str) -> ParseError {
        ParseError::syntax(self.pos(), expected, self.peek().describe())
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.advance();
            Ok(())
        } else {
            Err(self.error(&format!("`{}`", tok.text())))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, ParseError> {
        match self.peek() {
            Tok::Ident(name) => {
                // The lexer only produces valid, non-reserved names.
                let id = Ident::new(name.clone()).expect("lexer produced an invalid identifier");
                self.advance();
                Ok(id)
            }
            _ => Err(self.error(what)),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_NESTING {
            return Err(ParseError::syntax(
                self.pos(),
                format!("at most {MAX_NESTING} nested levels"),
                "deeper nesting",
            ));
        }
        Ok(())
    }

    fn leave(&mut self) {
        self.depth -= 1;
    }

    fn pacing(&mut self) -> Result<Pacing, ParseError> {
        let mut lhs = self.pacing_term()?;
        while *self.peek() == Tok::Pipe {
            self.advance();
            let rhs = self.pacing_term()?;
            lhs = Pacing::or(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pacing_term(&mut self) -> Result<Pacing, ParseError> {
        let mut lhs = self.pacing_atom()?;
        while *self.peek() == Tok::Amp {
            self.advance();
            let rhs = self.pacing_atom()?;
            lhs = Pacing::and(lhs, rhs);
        }
        Ok(lhs)
    }

    fn pacing_atom(&mut self) -> Result<Pacing, ParseError> {
        match self.peek() {
            Tok::True => {
                self.advance();
                Ok(Pacing::Top)
            }
            Tok::Ident(_) => Ok(Pacing::In(self.ident("an input name")?)),
            Tok::LParen => {
                self.enter()?;
                self.advance();
                let inner = self.pacing()?;
                self.expect(Tok::RParen)?;
                self.leave();
                Ok(inner)
            }
            _ => Err(self.error("a pacing annotation")),
        }
    }

    fn expr(&mut self) -> Result<StreamExpr, ParseError> {
        let lhs = self.sum()?;
        let op = match self.peek() {
            Tok::Lt => BinOp::Lt,
            Tok::EqEq => BinOp::Eq,
            _ => return Ok(lhs),
        };
        self.advance();
        let rhs = self.sum()?;
        if matches!(self.peek(), Tok::Lt | Tok::EqEq) {
            return Err(ParseError::syntax(
                self.pos(),
                "end of comparison (comparisons do not chain)",
                self.peek().describe(),
            ));
        }
        Ok(StreamExpr::binop(op, lhs, rhs))
    }

    fn sum(&mut self) -> Result<StreamExpr, ParseError> {
        let mut lhs = self.prod()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.advance();
            let rhs = self.prod()?;
            lhs = StreamExpr::binop(op, lhs, rhs);
        }
    }

    fn prod(&mut self) -> Result<StreamExpr, ParseError> {
        let mut lhs = self.access()?;
        while *self.peek() == Tok::Star {
            self.advance();
            let rhs = self.access()?;
            lhs = StreamExpr::binop(BinOp::Mul, lhs, rhs);
        }
        Ok(lhs)
    }

    fn access(&mut self) -> Result<StreamExpr, ParseError> {
        if !matches!(self.peek(), Tok::Ident(_)) || self.toks[self.at + 1].0 != Tok::Dot {
            return self.atom();
        }
        let target = self.ident("a stream name")?;
        self.expect(Tok::Dot)?;
        let hold = match self.peek() {
            Tok::Prev => false,
            Tok::Hold => true,
            _ => return Err(self.error("`prev` or `hold`")),
        };
        self.advance();
        self.expect(Tok::LParen)?;
        self.expect(Tok::Or)?;
        self.expect(Tok::Colon)?;
        self.enter()?;
        let default = self.expr()?;
        self.leave();
        self.expect(Tok::RParen)?;
        Ok(if hold { StreamExpr::hold(target, default) } else { StreamExpr::prev(target, default) })
    }

    fn atom(&mut self) -> Result<StreamExpr, ParseError> {
        match self.peek().clone() {
            Tok::Int(v) => {
                let pos = self.pos();
                self.advance();
                i64::try_from(v)
                    .map(StreamExpr::Const)
                    .map_err(|_| ParseError::syntax(pos, "a 64-bit integer", format!("`{v}`")))
            }
            Tok::Minus => {
                let pos = self.pos();
                self.advance();
                let Tok::Int(v) = *self.peek() else {
                    return Err(self.error("an integer literal after `-`"));
                };
                self.advance();
                0i64.checked_sub_unsigned(v)
                    .map(StreamExpr::Const)
                    .ok_or_else(|| ParseError::syntax(pos, "a 64-bit integer", format!("`-{v}`")))
            }
            Tok::Ident(_) => Ok(StreamExpr::Var(self.ident("a stream name")?)),
            Tok::LParen => {
                self.enter()?;
                self.advance();
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                self.leave();
                Ok(inner)
            }
            _ => Err(self.error("an expression")),
        }
    }
}

/// Parses and validates a specification.
pub fn parse_spec(text: &str) -> Result<Spec, ParseError> {
    let toks = Lexer::new(text).tokenize()?;
    let mut p = Parser { toks, at: 0, depth: 0 };
    let mut spec = Spec::default();
    let mut input_pos = Vec::new();
    let mut equation_pos = Vec::new();
    loop {
        let pos = p.pos();
        match p.peek() {
            Tok::Eof => break,
            Tok::Input => {
                p.advance();
                spec.inputs.push(p.ident("an input name")?);
                input_pos.push(pos);
            }
            Tok::Output => {
                p.advance();
                let output = p.ident("an output name")?;
                p.expect(Tok::At)?;
                let pacing = p.pacing()?;
                p.expect(Tok::Assign)?;
                let body = p.expr()?;
                spec.equations.push(Equation::new(output, pacing, body));
                equation_pos.push(pos);
            }
            _ => return Err(p.error("`input` or `output`")),
        }
    }
    validate(&spec).map_err(|err| {
        let pos = match err.site() {
            DeclSite::Input(i) => input_pos[i],
            DeclSite::Equation(i) => equation_pos[i],
        };
        ParseError { pos, kind: ParseErrorKind::Invalid(err) }
    })?;
    Ok(spec)
}

// Printer precedence levels.
const PREC_CMP: u8 = 0;
const PREC_SUM: u8 = 1;
const PREC_PROD: u8 = 2;

fn op_prec(op: BinOp) -> u8 {
    match op {
        BinOp::Lt | BinOp::Eq => PREC_CMP,
        BinOp::Add | BinOp::Sub => PREC_SUM,
        BinOp::Mul => PREC_PROD,
    }
}

fn write_expr(out: &mut String, e: &StreamExpr, min_prec: u8) {
    match e {
        StreamExpr::Const(v) => out.push_str(&v.to_string()),
        StreamExpr::Var(x) => out.push_str(x.as_str()),
        StreamExpr::Prev { target, default } | StreamExpr::Hold { target, default } => {
            let kind = if matches!(e, StreamExpr::Prev { .. }) { "prev" } else { "hold" };
            out.push_str(&format!("{target}.{kind}(or: "));
            write_expr(out, default, PREC_CMP);
            out.push(')');
        }
        StreamExpr::BinOp { op, lhs, rhs } => {
            let prec = op_prec(*op);
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            // Comparisons do not associate; both operands sit one level up.
            let lhs_prec = if prec == PREC_CMP { PREC_SUM } else { prec };
            write_expr(out, lhs, lhs_prec);
            out.push_str(&format!(" {op} "));
            write_expr(out, rhs, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

/// Canonical surface form of an expression.
pub fn print_expr(e: &StreamExpr) -> String {
    let mut out = String::new();
    write_expr(&mut out, e, PREC_CMP);
    out
}

fn write_pacing(out: &mut String, p: &Pacing, min_prec: u8) {
    match p {
        Pacing::Top => out.push_str("true"),
        Pacing::In(x) => out.push_str(x.as_str()),
        Pacing::And(l, r) | Pacing::Or(l, r) => {
            let (prec, sym) = if matches!(p, Pacing::Or(..)) { (0, " | ") } else { (1, " & ") };
            let paren = prec < min_prec;
            if paren {
                out.push('(');
            }
            write_pacing(out, l, prec);
            out.push_str(sym);
            write_pacing(out, r, prec + 1);
            if paren {
                out.push(')');
            }
        }
    }
}

/// Canonical surface form of a pacing annotation.
pub fn print_pacing(p: &Pacing) -> String {
    let mut out = String::new();
    write_pacing(&mut out, p, 0);
    out
}

impl fmt::Display for StreamExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_expr(self))
    }
}

impl fmt::Display for Pacing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_pacing(self))
    }
}

/// Canonical text: all inputs first, then one line per equation.
pub fn print_spec(spec: &Spec) -> String {
    let mut out = String::new();
    for input in &spec.inputs {
        out.push_str(&format!("input {input}\n"));
    }
    for eq in &spec.equations {
        out.push_str(&format!("output {} @ {} := {}\n", eq.output, eq.pacing, eq.body));
    }
    out
}

impl fmt::Display for Spec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_spec(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ast::ident;

    fn var(x: &str) -> StreamExpr {
        StreamExpr::Var(ident(x))
    }

    fn pin(x: &str) -> Pacing {
        Pacing::In(ident(x))
    }

    #[test]
    fn parses_simple_equation() {
        let spec = parse_spec("input a\noutput x @ a := a").unwrap();
        assert_eq!(spec, Spec::new(vec![ident("a")], vec![Equation::new(ident("x"), pin("a"), var("a"))]));
    }

    #[test]
    fn undeclared_body_stream_is_reported_at_declaration() {
        let err = parse_spec("input b\noutput y @ b := x.hold(or: b)").unwrap_err();
        assert_eq!(err.pos, SourcePos { line: 2, column: 1 });
        match err.kind {
            ParseErrorKind::Invalid(WellFormednessError::UndeclaredInBody { name, .. }) => {
                assert_eq!(name, ident("x"))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn disjunctive_pacing() {
        let spec = parse_spec("input a\ninput b\noutput w @ a | b := a.hold(or: 0) + b.hold(or: 0)").unwrap();
        assert_eq!(spec.equations[0].pacing, Pacing::or(pin("a"), pin("b")));
        assert_eq!(
            spec.equations[0].body,
            StreamExpr::binop(
                BinOp::Add,
                StreamExpr::hold(ident("a"), StreamExpr::Const(0)),
                StreamExpr::hold(ident("b"), StreamExpr::Const(0)),
            )
        );
    }

    #[test]
    fn precedence() {
        let spec = parse_spec("input a input b input c output x @ a | b & c := 1 + 2 * 3").unwrap();
        let eq = &spec.equations[0];
        assert_eq!(eq.pacing, Pacing::or(pin("a"), Pacing::and(pin("b"), pin("c"))));
        assert_eq!(
            eq.body,
            StreamExpr::binop(
                BinOp::Add,
                StreamExpr::Const(1),
                StreamExpr::binop(BinOp::Mul, StreamExpr::Const(2), StreamExpr::Const(3)),
            )
        );
    }

    #[test]
    fn chained_comparison_is_rejected() {
        let err = parse_spec("input a output x @ a := a < 1 < 2").unwrap_err();
        assert_eq!(err.pos, SourcePos { line: 1, column: 31 });
    }

    #[test]
    fn formal_prev_syntax_and_type_ascriptions_are_rejected() {
        assert!(parse_spec("input a output x @ a := a.prev(0)").is_err());
        assert!(parse_spec("input a: Int").is_err());
        assert!(parse_spec("input a output x := a").is_err());
    }

    #[test]
    fn truncated_equation() {
        let err = parse_spec("input a\noutput x @ a :=").unwrap_err();
        assert_eq!(err.pos, SourcePos { line: 2, column: 16 });
        assert_eq!(
            err.kind,
            ParseErrorKind::Syntax { expected: "an expression".into(), found: "end of input".into() }
        );
        assert_eq!(err.render("t.lola"), "t.lola:2:16: expected an expression, found end of input");
    }

    #[test]
    fn comments_and_negative_literals() {
        let spec = parse_spec(
            "// battery\ninput a // level\noutput x @ a := a - -3 // drop\noutput y @ true := -9223372036854775808",
        )
        .unwrap();
        assert_eq!(spec.equations[0].body, StreamExpr::binop(BinOp::Sub, var("a"), StreamExpr::Const(-3)));
        assert_eq!(spec.equations[1].body, StreamExpr::Const(i64::MIN));
        assert!(parse_spec("input a output x @ a := 9223372036854775808").is_err());
    }

    #[test]
    fn deep_nesting_is_an_error_not_a_crash() {
        let text = format!("input a output x @ a := {}1{}", "(".repeat(5000), ")".repeat(5000));
        assert!(parse_spec(&text).is_err());
    }

    #[test]
    fn canonical_printing() {
        let spec = Spec::new(vec![ident("a")], vec![Equation::new(ident("x"), pin("a"), var("a"))]);
        assert_eq!(print_spec(&spec), "input a\noutput x @ a := a\n");

        let p = Pacing::and(Pacing::or(pin("a"), pin("b")), pin("c"));
        assert_eq!(print_pacing(&p), "(a | b) & c");
        let p = Pacing::or(pin("a"), Pacing::or(pin("b"), pin("c")));
        assert_eq!(print_pacing(&p), "a | (b | c)");

        let e = StreamExpr::binop(
            BinOp::Mul,
            StreamExpr::binop(BinOp::Lt, var("a"), StreamExpr::Const(0)),
            StreamExpr::binop(BinOp::Sub, var("b"), StreamExpr::binop(BinOp::Sub, var("c"), var("a"))),
        );
        assert_eq!(print_expr(&e), "(a < 0) * (b - (c - a))");
    }
}

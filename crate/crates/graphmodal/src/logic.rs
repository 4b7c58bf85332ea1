//! Formula and sequent syntax: AST, parser, and printer.
//!
//! The concrete syntax is plain ASCII:
//!
//! | text          | meaning                    |
//! |---------------|----------------------------|
//! | `0` or `bot`  | falsum                     |
//! | `1` or `top`  | verum                      |
//! | `p`, `q2`, …  | proposition letters        |
//! | `&`, `\|`     | meet, join                 |
//! | `[]`, `<>`    | box, diamond               |
//! | `[b]`, `<b>`  | black box, black diamond   |
//! | `\|-`         | sequent turnstile          |
//!
//! Unary operators bind tighter than `&`, which binds tighter than `|`;
//! binary connectives associate to the left; parentheses override.  The
//! printer emits the minimal parenthesisation that parses back to the same
//! tree, so `parse(print(f)) == f` holds for every formula.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// A modal formula over the lattice connectives and the four modalities.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Bot,
    Top,
    Prop(String),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Box(Box<Formula>),
    Dia(Box<Formula>),
    BlackBox(Box<Formula>),
    BlackDia(Box<Formula>),
}

impl Formula {
    pub fn prop(name: impl Into<String>) -> Self {
        Formula::Prop(name.into())
    }

    pub fn and(l: Formula, r: Formula) -> Self {
        Formula::And(Box::new(l), Box::new(r))
    }

    pub fn or(l: Formula, r: Formula) -> Self {
        Formula::Or(Box::new(l), Box::new(r))
    }

    pub fn box_of(f: Formula) -> Self {
        Formula::Box(Box::new(f))
    }

    pub fn dia_of(f: Formula) -> Self {
        Formula::Dia(Box::new(f))
    }

    pub fn black_box_of(f: Formula) -> Self {
        Formula::BlackBox(Box::new(f))
    }

    pub fn black_dia_of(f: Formula) -> Self {
        Formula::BlackDia(Box::new(f))
    }

    /// Proposition letters occurring in the formula, sorted.
    pub fn props_of(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_props(&mut out);
        out
    }

    fn collect_props(&self, out: &mut BTreeSet<String>) {
        match self {
            Formula::Bot | Formula::Top => {}
            Formula::Prop(name) => {
                out.insert(name.clone());
            }
            Formula::And(l, r) | Formula::Or(l, r) => {
                l.collect_props(out);
                r.collect_props(out);
            }
            Formula::Box(f)
            | Formula::Dia(f)
            | Formula::BlackBox(f)
            | Formula::BlackDia(f) => f.collect_props(out),
        }
    }

    /// Maximum nesting depth of modal operators (black ones included).
    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Bot | Formula::Top | Formula::Prop(_) => 0,
            Formula::And(l, r) | Formula::Or(l, r) => l.modal_depth().max(r.modal_depth()),
            Formula::Box(f)
            | Formula::Dia(f)
            | Formula::BlackBox(f)
            | Formula::BlackDia(f) => 1 + f.modal_depth(),
        }
    }

    /// Binding strength used by both the parser and the printer:
    /// `|` < `&` < unary < atoms.
    fn prec(&self) -> u8 {
        match self {
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            Formula::Box(_) | Formula::Dia(_) | Formula::BlackBox(_) | Formula::BlackDia(_) => 3,
            Formula::Bot | Formula::Top | Formula::Prop(_) => 4,
        }
    }

    /// Print `self` assuming the context only accepts precedence >= `ctx`.
    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, ctx: u8) -> fmt::Result {
        let parens = self.prec() < ctx;
        if parens {
            write!(f, "(")?;
        }
        match self {
            Formula::Bot => write!(f, "0")?,
            Formula::Top => write!(f, "1")?,
            Formula::Prop(name) => write!(f, "{name}")?,
            // Binary connectives are left-associative, so a right-nested
            // child of the same strength keeps its parentheses.
            Formula::And(l, r) => {
                l.fmt_at(f, 2)?;
                write!(f, " & ")?;
                r.fmt_at(f, 3)?;
            }
            Formula::Or(l, r) => {
                l.fmt_at(f, 1)?;
                write!(f, " | ")?;
                r.fmt_at(f, 2)?;
            }
            Formula::Box(g) => {
                write!(f, "[]")?;
                g.fmt_at(f, 3)?;
            }
            Formula::Dia(g) => {
                write!(f, "<>")?;
                g.fmt_at(f, 3)?;
            }
            Formula::BlackBox(g) => {
                write!(f, "[b]")?;
                g.fmt_at(f, 3)?;
            }
            Formula::BlackDia(g) => {
                write!(f, "<b>")?;
                g.fmt_at(f, 3)?;
            }
        }
        if parens {
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}

impl FromStr for Formula {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_formula(s)
    }
}

/// A sequent `lhs |- rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub lhs: Formula,
    pub rhs: Formula,
}

impl Sequent {
    pub fn new(lhs: Formula, rhs: Formula) -> Self {
        Sequent { lhs, rhs }
    }

    pub fn props_of(&self) -> BTreeSet<String> {
        let mut out = self.lhs.props_of();
        out.extend(self.rhs.props_of());
        out
    }

    pub fn modal_depth(&self) -> usize {
        self.lhs.modal_depth().max(self.rhs.modal_depth())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} |- {}", self.lhs, self.rhs)
    }
}

impl FromStr for Sequent {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, ParseError> {
        parse_sequent(s)
    }
}

/// Syntax error with the byte offset where it was detected.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    LParen,
    RParen,
    Amp,
    Pipe,
    Turnstile,
    BoxOp,
    DiaOp,
    BlackBoxOp,
    BlackDiaOp,
    Zero,
    One,
    Ident(String),
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::LParen => write!(f, "\"(\""),
            Tok::RParen => write!(f, "\")\""),
            Tok::Amp => write!(f, "\"&\""),
            Tok::Pipe => write!(f, "\"|\""),
            Tok::Turnstile => write!(f, "\"|-\""),
            Tok::BoxOp => write!(f, "\"[]\""),
            Tok::DiaOp => write!(f, "\"<>\""),
            Tok::BlackBoxOp => write!(f, "\"[b]\""),
            Tok::BlackDiaOp => write!(f, "\"<b>\""),
            Tok::Zero => write!(f, "\"0\""),
            Tok::One => write!(f, "\"1\""),
            Tok::Ident(name) => write!(f, "\"{name}\""),
        }
    }
}

fn lex(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let cs: Vec<(usize, char)> = src.char_indices().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let (pos, c) = cs[i];
        let at = |k: usize| cs.get(i + k).map(|&(_, c)| c);
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((pos, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((pos, Tok::RParen));
                i += 1;
            }
            '&' => {
                toks.push((pos, Tok::Amp));
                i += 1;
            }
            '|' => {
                if at(1) == Some('-') {
                    toks.push((pos, Tok::Turnstile));
                    i += 2;
                } else {
                    toks.push((pos, Tok::Pipe));
                    i += 1;
                }
            }
            '[' => {
                if at(1) == Some(']') {
                    toks.push((pos, Tok::BoxOp));
                    i += 2;
                } else if at(1) == Some('b') && at(2) == Some(']') {
                    toks.push((pos, Tok::BlackBoxOp));
                    i += 3;
                } else {
                    return Err(ParseError::new(pos, "expected \"[]\" or \"[b]\""));
                }
            }
            '<' => {
                if at(1) == Some('>') {
                    toks.push((pos, Tok::DiaOp));
                    i += 2;
                } else if at(1) == Some('b') && at(2) == Some('>') {
                    toks.push((pos, Tok::BlackDiaOp));
                    i += 3;
                } else {
                    return Err(ParseError::new(pos, "expected \"<>\" or \"<b>\""));
                }
            }
            '0' => {
                toks.push((pos, Tok::Zero));
                i += 1;
            }
            '1' => {
                toks.push((pos, Tok::One));
                i += 1;
            }
            c if c.is_ascii_alphabetic() => {
                let mut name = String::new();
                while let Some(&(_, c)) = cs.get(i) {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        name.push(c);
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((pos, Tok::Ident(name)));
            }
            _ => {
                return Err(ParseError::new(pos, format!("unexpected character {c:?}")));
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    i: usize,
    /// Offset reported for errors at end of input.
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, i: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.i).map(|(_, t)| t)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.i).map_or(self.end, |&(p, _)| p)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.i).map(|(_, t)| t.clone());
        if t.is_some() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn parse_or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.parse_and()?;
        while self.eat(&Tok::Pipe) {
            f = Formula::or(f, self.parse_and()?);
        }
        Ok(f)
    }

    fn parse_and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.parse_unary()?;
        while self.eat(&Tok::Amp) {
            f = Formula::and(f, self.parse_unary()?);
        }
        Ok(f)
    }

    fn parse_unary(&mut self) -> Result<Formula, ParseError> {
        match self.peek() {
            Some(Tok::BoxOp) => {
                self.i += 1;
                Ok(Formula::box_of(self.parse_unary()?))
            }
            Some(Tok::DiaOp) => {
                self.i += 1;
                Ok(Formula::dia_of(self.parse_unary()?))
            }
            Some(Tok::BlackBoxOp) => {
                self.i += 1;
                Ok(Formula::black_box_of(self.parse_unary()?))
            }
            Some(Tok::BlackDiaOp) => {
                self.i += 1;
                Ok(Formula::black_dia_of(self.parse_unary()?))
            }
            _ => self.parse_atom(),
        }
    }

    fn parse_atom(&mut self) -> Result<Formula, ParseError> {
        let pos = self.pos();
        match self.bump() {
            Some(Tok::Zero) => Ok(Formula::Bot),
            Some(Tok::One) => Ok(Formula::Top),
            Some(Tok::Ident(name)) => match name.as_str() {
                "bot" => Ok(Formula::Bot),
                "top" => Ok(Formula::Top),
                _ => Ok(Formula::Prop(name)),
            },
            Some(Tok::LParen) => {
                let f = self.parse_or()?;
                if self.eat(&Tok::RParen) {
                    Ok(f)
                } else {
                    Err(ParseError::new(self.pos(), "expected \")\""))
                }
            }
            Some(t) => Err(ParseError::new(pos, format!("expected a formula, found {t}"))),
            None => Err(ParseError::new(pos, "expected a formula, found end of input")),
        }
    }

    fn expect_end(&self) -> Result<(), ParseError> {
        match self.peek() {
            None => Ok(()),
            Some(t) => Err(ParseError::new(self.pos(), format!("unexpected {t} after formula"))),
        }
    }
}

/// Parse a single formula; the whole input must be consumed.
pub fn parse_formula(src: &str) -> Result<Formula, ParseError> {
    let mut p = Parser::new(src)?;
    let f = p.parse_or()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a sequent of the form `formula |- formula`.
pub fn parse_sequent(src: &str) -> Result<Sequent, ParseError> {
    let mut p = Parser::new(src)?;
    let lhs = p.parse_or()?;
    if !p.eat(&Tok::Turnstile) {
        return Err(ParseError::new(p.pos(), "expected \"|-\""));
    }
    let rhs = p.parse_or()?;
    p.expect_end()?;
    Ok(Sequent::new(lhs, rhs))
}

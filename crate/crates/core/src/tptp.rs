//! Reader and printer for the `fof` fragment of TPTP.
//!
//! Supported: `fof(label, axiom|conjecture, formula).` units and `%` line
//! comments. Quantifier bodies extend as far to the right as possible, so
//! `![X] : p(X) <=> q(X)` reads as `![X] : (p(X) <=> q(X))`. Binding strength,
//! tightest first: `~`, `=`/`!=`, `&`/`|` (not mixable without parentheses),
//! `=>`, `<=>`. Neither `=>` nor `<=>` chains without parentheses.

use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::syntax::{free_variables, Formula, Signature, SignatureError, Symbol, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Role {
    Axiom,
    Conjecture,
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Role::Axiom => "axiom",
            Role::Conjecture => "conjecture",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedFormula {
    pub label: Symbol,
    pub role: Role,
    pub formula: Formula,
}

impl NamedFormula {
    pub fn axiom(label: impl Into<Symbol>, formula: Formula) -> Self {
        NamedFormula {
            label: label.into(),
            role: Role::Axiom,
            formula,
        }
    }

    pub fn conjecture(label: impl Into<Symbol>, formula: Formula) -> Self {
        NamedFormula {
            label: label.into(),
            role: Role::Conjecture,
            formula,
        }
    }

    /// The formula whose satisfiability this unit contributes: axioms as
    /// stated, conjectures negated.
    pub fn as_assumption(&self) -> Formula {
        match self.role {
            Role::Axiom => self.formula.clone(),
            Role::Conjecture => self.formula.clone().not(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Problem {
    pub signature: Signature,
    pub units: Vec<NamedFormula>,
}

impl Problem {
    pub fn conjecture(&self) -> Option<&NamedFormula> {
        self.units.iter().find(|u| u.role == Role::Conjecture)
    }

    pub fn axioms(&self) -> impl Iterator<Item = &NamedFormula> {
        self.units.iter().filter(|u| u.role == Role::Axiom)
    }

    /// Builds a problem from units, checking the same invariants as the parser.
    pub fn from_units(units: Vec<NamedFormula>) -> Result<Problem, ParseError> {
        let mut signature = Signature::new();
        let mut seen = std::collections::HashSet::new();
        let mut conjectures = 0;
        for u in &units {
            if !seen.insert(u.label) {
                return Err(ParseError::DuplicateLabel {
                    label: u.label.to_string(),
                    line: 0,
                });
            }
            if u.role == Role::Conjecture {
                conjectures += 1;
                if conjectures > 1 {
                    return Err(ParseError::MultipleConjectures { line: 0 });
                }
            }
            if let Some(v) = free_variables(&u.formula).into_iter().next() {
                return Err(ParseError::UnboundVariable {
                    label: u.label.to_string(),
                    variable: v.to_string(),
                });
            }
            signature
                .add_formula(&u.formula)
                .map_err(|source| ParseError::Arity {
                    line: 0,
                    column: 0,
                    source,
                })?;
        }
        Ok(Problem { signature, units })
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{column}: syntax error: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        column: usize,
        expected: String,
        found: String,
    },
    #[error("{line}:{column}: {source}")]
    Arity {
        line: usize,
        column: usize,
        source: SignatureError,
    },
    #[error("line {line}: duplicate label `{label}`")]
    DuplicateLabel { label: String, line: usize },
    #[error("line {line}: more than one conjecture")]
    MultipleConjectures { line: usize },
    #[error("unit `{label}`: variable {variable} is not bound by a quantifier")]
    UnboundVariable { label: String, variable: String },
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Lower(String),
    Upper(String),
    Dollar(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Dot,
    Colon,
    Bang,
    Question,
    Tilde,
    Amp,
    Pipe,
    Implies,
    Iff,
    Eq,
    Neq,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Lower(s) | Tok::Upper(s) => write!(f, "`{s}`"),
            Tok::Dollar(s) => write!(f, "`${s}`"),
            Tok::LParen => f.write_str("`(`"),
            Tok::RParen => f.write_str("`)`"),
            Tok::LBracket => f.write_str("`[`"),
            Tok::RBracket => f.write_str("`]`"),
            Tok::Comma => f.write_str("`,`"),
            Tok::Dot => f.write_str("`.`"),
            Tok::Colon => f.write_str("`:`"),
            Tok::Bang => f.write_str("`!`"),
            Tok::Question => f.write_str("`?`"),
            Tok::Tilde => f.write_str("`~`"),
            Tok::Amp => f.write_str("`&`"),
            Tok::Pipe => f.write_str("`|`"),
            Tok::Implies => f.write_str("`=>`"),
            Tok::Iff => f.write_str("`<=>`"),
            Tok::Eq => f.write_str("`=`"),
            Tok::Neq => f.write_str("`!=`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0usize, 1usize, 1usize);
    let word = |start: usize| {
        let mut j = start;
        while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_') {
            j += 1;
        }
        j
    };
    while i < chars.len() {
        let c = chars[i];
        let (l, col) = (line, column);
        let mut push = |tok: Tok, len: usize, i: &mut usize, column: &mut usize| {
            out.push(Spanned {
                tok,
                line: l,
                column: col,
            });
            *i += len;
            *column += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                column = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                column += 1;
            }
            '%' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut column),
            ')' => push(Tok::RParen, 1, &mut i, &mut column),
            '[' => push(Tok::LBracket, 1, &mut i, &mut column),
            ']' => push(Tok::RBracket, 1, &mut i, &mut column),
            ',' => push(Tok::Comma, 1, &mut i, &mut column),
            '.' => push(Tok::Dot, 1, &mut i, &mut column),
            ':' => push(Tok::Colon, 1, &mut i, &mut column),
            '?' => push(Tok::Question, 1, &mut i, &mut column),
            '~' => push(Tok::Tilde, 1, &mut i, &mut column),
            '&' => push(Tok::Amp, 1, &mut i, &mut column),
            '|' => push(Tok::Pipe, 1, &mut i, &mut column),
            '!' if chars.get(i + 1) == Some(&'=') => push(Tok::Neq, 2, &mut i, &mut column),
            '!' => push(Tok::Bang, 1, &mut i, &mut column),
            '=' if chars.get(i + 1) == Some(&'>') => push(Tok::Implies, 2, &mut i, &mut column),
            '=' => push(Tok::Eq, 1, &mut i, &mut column),
            '<' if chars.get(i + 1) == Some(&'=') && chars.get(i + 2) == Some(&'>') => {
                push(Tok::Iff, 3, &mut i, &mut column)
            }
            '$' => {
                let end = word(i + 1);
                let name: String = chars[i + 1..end].iter().collect();
                push(Tok::Dollar(name), end - i, &mut i, &mut column);
            }
            c if c.is_ascii_lowercase() || c.is_ascii_digit() => {
                let end = word(i);
                let name: String = chars[i..end].iter().collect();
                push(Tok::Lower(name), end - i, &mut i, &mut column);
            }
            c if c.is_ascii_uppercase() => {
                let end = word(i);
                let name: String = chars[i..end].iter().collect();
                push(Tok::Upper(name), end - i, &mut i, &mut column);
            }
            other => {
                return Err(ParseError::Syntax {
                    line,
                    column,
                    expected: "a token".into(),
                    found: format!("`{other}`"),
                })
            }
        }
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    signature: Signature,
}

type PResult<T> = Result<T, ParseError>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn here(&self) -> (usize, usize) {
        let s = &self.toks[self.pos];
        (s.line, s.column)
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, expected: &str) -> PResult<T> {
        let (line, column) = self.here();
        Err(ParseError::Syntax {
            line,
            column,
            expected: expected.to_string(),
            found: self.peek().to_string(),
        })
    }

    fn expect(&mut self, tok: Tok) -> PResult<()> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            self.error(&tok.to_string())
        }
    }

    fn problem(&mut self) -> PResult<Problem> {
        let mut units: Vec<NamedFormula> = Vec::new();
        while *self.peek() != Tok::Eof {
            let (line, _) = self.here();
            let unit = self.unit()?;
            if units.iter().any(|u| u.label == unit.label) {
                return Err(ParseError::DuplicateLabel {
                    label: unit.label.to_string(),
                    line,
                });
            }
            if unit.role == Role::Conjecture && units.iter().any(|u| u.role == Role::Conjecture) {
                return Err(ParseError::MultipleConjectures { line });
            }
            units.push(unit);
        }
        Ok(Problem {
            signature: std::mem::take(&mut self.signature),
            units,
        })
    }

    fn unit(&mut self) -> PResult<NamedFormula> {
        match self.peek() {
            Tok::Lower(w) if w == "fof" => {
                self.bump();
            }
            _ => return self.error("`fof`"),
        }
        self.expect(Tok::LParen)?;
        let label = match self.bump() {
            Tok::Lower(w) | Tok::Upper(w) => Symbol::intern(&w),
            _ => {
                self.pos -= 1;
                return self.error("a unit label");
            }
        };
        self.expect(Tok::Comma)?;
        let role = match self.peek() {
            Tok::Lower(w) if w == "axiom" => Role::Axiom,
            Tok::Lower(w) if w == "conjecture" => Role::Conjecture,
            _ => return self.error("`axiom` or `conjecture`"),
        };
        self.bump();
        self.expect(Tok::Comma)?;
        let formula = self.formula()?;
        self.expect(Tok::RParen)?;
        self.expect(Tok::Dot)?;
        if let Some(v) = free_variables(&formula).into_iter().next() {
            return Err(ParseError::UnboundVariable {
                label: label.to_string(),
                variable: v.to_string(),
            });
        }
        Ok(NamedFormula {
            label,
            role,
            formula,
        })
    }

    fn formula(&mut self) -> PResult<Formula> {
        let lhs = self.implication()?;
        if *self.peek() != Tok::Iff {
            return Ok(lhs);
        }
        self.bump();
        let rhs = self.implication()?;
        if matches!(self.peek(), Tok::Iff | Tok::Implies) {
            return self.error("`)` (`<=>` does not associate; add parentheses)");
        }
        Ok(lhs.iff(rhs))
    }

    fn implication(&mut self) -> PResult<Formula> {
        let lhs = self.junction()?;
        if *self.peek() != Tok::Implies {
            return Ok(lhs);
        }
        self.bump();
        let rhs = self.junction()?;
        if *self.peek() == Tok::Implies {
            return self.error("`)` (`=>` does not associate; add parentheses)");
        }
        Ok(lhs.implies(rhs))
    }

    fn junction(&mut self) -> PResult<Formula> {
        let mut acc = self.unary()?;
        let op = match self.peek() {
            Tok::Amp => Tok::Amp,
            Tok::Pipe => Tok::Pipe,
            _ => return Ok(acc),
        };
        while *self.peek() == op {
            self.bump();
            let rhs = self.unary()?;
            acc = if op == Tok::Amp {
                acc.and(rhs)
            } else {
                acc.or(rhs)
            };
        }
        if matches!(self.peek(), Tok::Amp | Tok::Pipe) {
            return self.error("parentheses (`&` and `|` do not mix)");
        }
        Ok(acc)
    }

    fn unary(&mut self) -> PResult<Formula> {
        match self.peek().clone() {
            Tok::Tilde => {
                self.bump();
                Ok(self.unary()?.not())
            }
            Tok::Bang | Tok::Question => {
                let universal = *self.peek() == Tok::Bang;
                self.bump();
                self.expect(Tok::LBracket)?;
                let mut vars = Vec::new();
                loop {
                    match self.bump() {
                        Tok::Upper(v) => vars.push(Symbol::intern(&v)),
                        _ => {
                            self.pos -= 1;
                            return self.error("a variable");
                        }
                    }
                    match self.peek() {
                        Tok::Comma => {
                            self.bump();
                        }
                        Tok::RBracket => {
                            self.bump();
                            break;
                        }
                        _ => return self.error("`,` or `]`"),
                    }
                }
                self.expect(Tok::Colon)?;
                let body = self.formula()?;
                Ok(vars.into_iter().rev().fold(body, |b, v| {
                    if universal {
                        Formula::forall(v, b)
                    } else {
                        Formula::exists(v, b)
                    }
                }))
            }
            Tok::LParen => {
                self.bump();
                let f = self.formula()?;
                self.expect(Tok::RParen)?;
                Ok(f)
            }
            Tok::Dollar(w) if w == "true" => {
                self.bump();
                Ok(Formula::True)
            }
            Tok::Dollar(w) if w == "false" => {
                self.bump();
                Ok(Formula::False)
            }
            Tok::Lower(w) if (w == "true" || w == "false") && !self.next_is_arg_start() => {
                self.bump();
                Ok(if w == "true" {
                    Formula::True
                } else {
                    Formula::False
                })
            }
            Tok::Lower(_) | Tok::Upper(_) => self.atomic(),
            _ => self.error("a formula"),
        }
    }

    fn next_is_arg_start(&self) -> bool {
        matches!(
            self.toks.get(self.pos + 1).map(|s| &s.tok),
            Some(Tok::LParen | Tok::Eq | Tok::Neq)
        )
    }

    fn atomic(&mut self) -> PResult<Formula> {
        let (line, column) = self.here();
        let is_var = matches!(self.peek(), Tok::Upper(_));
        let (name, args) = self.symbol_application()?;
        match self.peek() {
            Tok::Eq | Tok::Neq => {
                let negated = *self.peek() == Tok::Neq;
                self.bump();
                let lhs = self.finish_term(name, args, is_var, line, column)?;
                let rhs = self.term()?;
                let eq = Formula::equal(lhs, rhs);
                Ok(if negated { eq.not() } else { eq })
            }
            _ if is_var => self.error("`=` or `!=` after a variable"),
            _ => {
                let sym = Symbol::intern(&name);
                self.signature
                    .add_predicate(sym, args.len())
                    .map_err(|source| ParseError::Arity {
                        line,
                        column,
                        source,
                    })?;
                Ok(Formula::atom(sym, args))
            }
        }
    }

    fn symbol_application(&mut self) -> PResult<(String, Vec<Term>)> {
        let (name, is_var) = match self.bump() {
            Tok::Lower(w) => (w, false),
            Tok::Upper(w) => (w, true),
            _ => {
                self.pos -= 1;
                return self.error("an identifier");
            }
        };
        let mut args = Vec::new();
        if !is_var && *self.peek() == Tok::LParen {
            self.bump();
            loop {
                args.push(self.term()?);
                match self.peek() {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => {
                        self.bump();
                        break;
                    }
                    _ => return self.error("`,` or `)`"),
                }
            }
        }
        Ok((name, args))
    }

    fn finish_term(
        &mut self,
        name: String,
        args: Vec<Term>,
        is_var: bool,
        line: usize,
        column: usize,
    ) -> PResult<Term> {
        if is_var {
            return Ok(Term::var(name.as_str()));
        }
        let sym = Symbol::intern(&name);
        self.signature
            .add_function(sym, args.len())
            .map_err(|source| ParseError::Arity {
                line,
                column,
                source,
            })?;
        Ok(Term::app(sym, args))
    }

    fn term(&mut self) -> PResult<Term> {
        let (line, column) = self.here();
        let is_var = matches!(self.peek(), Tok::Upper(_));
        let (name, args) = self.symbol_application()?;
        self.finish_term(name, args, is_var, line, column)
    }
}

pub fn parse_tptp(text: &str) -> Result<Problem, ParseError> {
    let toks = lex(text)?;
    Parser {
        toks,
        pos: 0,
        signature: Signature::new(),
    }
    .problem()
}

/// Parses a single formula in the same syntax as a unit body.
pub fn parse_formula(text: &str) -> Result<Formula, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser {
        toks,
        pos: 0,
        signature: Signature::new(),
    };
    let f = p.formula()?;
    if *p.peek() != Tok::Eof {
        return p.error("end of input");
    }
    Ok(f)
}

pub fn print_tptp(problem: &Problem) -> String {
    let mut out = String::new();
    for u in &problem.units {
        let _ = writeln!(
            out,
            "fof({}, {}, {}).",
            u.label,
            u.role,
            formula_to_string(&u.formula)
        );
    }
    out
}

pub fn formula_to_string(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, 0, true, &mut out);
    out
}

const IFF: u8 = 0;
const IMPLIES: u8 = 1;
const JUNCTION: u8 = 2;
const UNARY: u8 = 3;

fn level(f: &Formula) -> u8 {
    match f {
        Formula::Iff(..) => IFF,
        Formula::Implies(..) => IMPLIES,
        Formula::And(..) | Formula::Or(..) => JUNCTION,
        _ => UNARY,
    }
}

/// True when printing `f` ends in a quantifier whose body would swallow
/// anything written after it.
fn open_right(f: &Formula) -> bool {
    match f {
        Formula::Forall(..) | Formula::Exists(..) => true,
        Formula::Not(g) => !matches!(**g, Formula::Equal(..)) && open_right(g),
        _ => false,
    }
}

fn write_formula(f: &Formula, min: u8, rightmost: bool, out: &mut String) {
    if level(f) < min || (!rightmost && open_right(f)) {
        out.push('(');
        write_formula(f, 0, true, out);
        out.push(')');
        return;
    }
    match f {
        Formula::True => out.push_str("$true"),
        Formula::False => out.push_str("$false"),
        Formula::Atom(p, args) => {
            out.push_str(p.as_str());
            write_args(args, out);
        }
        Formula::Equal(a, b) => {
            write_term(a, out);
            out.push_str(" = ");
            write_term(b, out);
        }
        Formula::Not(g) => match &**g {
            Formula::Equal(a, b) => {
                write_term(a, out);
                out.push_str(" != ");
                write_term(b, out);
            }
            _ => {
                out.push('~');
                write_formula(g, UNARY, rightmost, out);
            }
        },
        Formula::And(a, b) | Formula::Or(a, b) => {
            let is_and = matches!(f, Formula::And(..));
            let same = |g: &Formula| {
                if is_and {
                    matches!(g, Formula::And(..))
                } else {
                    matches!(g, Formula::Or(..))
                }
            };
            write_formula(a, if same(a) { JUNCTION } else { UNARY }, false, out);
            out.push_str(if is_and { " & " } else { " | " });
            write_formula(b, UNARY, rightmost, out);
        }
        Formula::Implies(a, b) => {
            write_formula(a, JUNCTION, false, out);
            out.push_str(" => ");
            write_formula(b, JUNCTION, rightmost, out);
        }
        Formula::Iff(a, b) => {
            write_formula(a, IMPLIES, false, out);
            out.push_str(" <=> ");
            write_formula(b, IMPLIES, rightmost, out);
        }
        Formula::Forall(v, body) | Formula::Exists(v, body) => {
            out.push_str(if matches!(f, Formula::Forall(..)) {
                "!["
            } else {
                "?["
            });
            out.push_str(&variable_name(*v));
            out.push_str("] : ");
            write_formula(body, 0, true, out);
        }
    }
}

fn write_args(args: &[Term], out: &mut String) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_term(a, out);
    }
    out.push(')');
}

fn write_term(t: &Term, out: &mut String) {
    match t {
        Term::Var(v) => out.push_str(&variable_name(*v)),
        Term::App(f, args) => {
            out.push_str(f.as_str());
            write_args(args, out);
        }
    }
}

/// TPTP variables must start with an uppercase letter.
fn variable_name(v: Symbol) -> String {
    let s = v.as_str();
    if s.starts_with(|c: char| c.is_ascii_uppercase()) {
        s.to_string()
    } else {
        format!("V_{s}")
    }
}

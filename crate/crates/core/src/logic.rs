//! Intuitionistic propositional formulas evaluated in Heyting algebras.
//!
//! Grammar, by decreasing precedence: `~`, `&`, `|`, `->` (right
//! associative), `<->`. Atoms match `[a-zA-Z_][a-zA-Z0-9_]*`; `top` and `bot`
//! are the constants. `~p` is stored as `p -> bot` and `p <-> q` as
//! `(p -> q) & (q -> p)`.

use crate::catalog::{self, NamedAlgebra};
use crate::exec::{self, Exec};
use crate::lattice::{Elem, HeytingAlgebra};
use crate::line::OpenRegion;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LogicError {
    #[error("syntax error at offset {offset}: {message}")]
    SyntaxError { offset: usize, message: String },
    #[error("atom `{0}` has no assigned value")]
    UnassignedAtom(String),
    #[error("{valuations} valuations exceed the budget of {budget}")]
    TooManyAtoms { valuations: u128, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(String),
    Top,
    Bot,
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Imp(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(name: &str) -> Self {
        Formula::Atom(name.to_string())
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn imp(a: Formula, b: Formula) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn negation(a: Formula) -> Self {
        Formula::imp(a, Formula::Bot)
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::imp(a.clone(), b.clone()), Formula::imp(b, a))
    }

    /// Atoms in order of first occurrence.
    pub fn atoms(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut Vec<String>) {
        match self {
            Formula::Atom(a) => {
                if !out.contains(a) {
                    out.push(a.clone());
                }
            }
            Formula::Top | Formula::Bot => {}
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Imp(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Imp(_, b) if **b == Formula::Bot => 4,
            Formula::Atom(_) | Formula::Top | Formula::Bot => 5,
            Formula::And(..) => 3,
            Formula::Or(..) => 2,
            Formula::Imp(..) => 1,
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, sub: &Formula, min: u8| {
            if sub.precedence() < min {
                write!(f, "({sub})")
            } else {
                write!(f, "{sub}")
            }
        };
        match self {
            Formula::Atom(a) => write!(f, "{a}"),
            Formula::Top => write!(f, "top"),
            Formula::Bot => write!(f, "bot"),
            Formula::Imp(a, b) if **b == Formula::Bot => {
                write!(f, "~")?;
                wrap(f, a, 4)
            }
            Formula::And(a, b) => {
                wrap(f, a, 3)?;
                write!(f, " & ")?;
                wrap(f, b, 4)
            }
            Formula::Or(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " | ")?;
                wrap(f, b, 3)
            }
            Formula::Imp(a, b) => {
                wrap(f, a, 2)?;
                write!(f, " -> ")?;
                wrap(f, b, 1)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Ident(String),
    Not,
    And,
    Or,
    Imp,
    Iff,
    LParen,
    RParen,
}

fn lex(text: &str) -> Result<Vec<(usize, Token)>, LogicError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let tok = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'~' => Token::Not,
            b'&' => Token::And,
            b'|' => Token::Or,
            b'(' => Token::LParen,
            b')' => Token::RParen,
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((i, Token::Imp));
                i += 2;
                continue;
            }
            b'<' if text[i..].starts_with("<->") => {
                out.push((i, Token::Iff));
                i += 3;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((start, Token::Ident(text[start..i].to_string())));
                continue;
            }
            _ => {
                return Err(LogicError::SyntaxError {
                    offset: i,
                    message: format!("unexpected character `{}`", text[i..].chars().next().unwrap_or('?')),
                })
            }
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(o, _)| *o)
    }

    fn error(&self, message: &str) -> LogicError {
        LogicError::SyntaxError {
            offset: self.offset(),
            message: message.to_string(),
        }
    }

    fn eat(&mut self, t: &Token) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn iff(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.imp()?;
        if self.eat(&Token::Iff) {
            let rhs = self.iff()?;
            return Ok(Formula::iff(lhs, rhs));
        }
        Ok(lhs)
    }

    fn imp(&mut self) -> Result<Formula, LogicError> {
        let lhs = self.or()?;
        if self.eat(&Token::Imp) {
            let rhs = self.imp()?;
            return Ok(Formula::imp(lhs, rhs));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.and()?;
        while self.eat(&Token::Or) {
            lhs = Formula::or(lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Formula, LogicError> {
        let mut lhs = self.unary()?;
        while self.eat(&Token::And) {
            lhs = Formula::and(lhs, self.unary()?);
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula, LogicError> {
        match self.peek().cloned() {
            Some(Token::Not) => {
                self.pos += 1;
                Ok(Formula::negation(self.unary()?))
            }
            Some(Token::LParen) => {
                self.pos += 1;
                let inner = self.iff()?;
                if !self.eat(&Token::RParen) {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(Token::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "top" => Formula::Top,
                    "bot" => Formula::Bot,
                    _ => Formula::Atom(name),
                })
            }
            Some(_) => Err(self.error("expected a formula")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

pub fn parse(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser {
        tokens: lex(text)?,
        pos: 0,
        end: text.len(),
    };
    let f = p.iff()?;
    if p.pos != p.tokens.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(f)
}

/// A bounded lattice with implication: the target of evaluation.
pub trait Heyting {
    type Value: Clone + PartialEq;
    fn top(&self) -> Self::Value;
    fn bottom(&self) -> Self::Value;
    fn meet(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn join(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn implies(&self, a: &Self::Value, b: &Self::Value) -> Self::Value;
}

impl Heyting for HeytingAlgebra {
    type Value = Elem;

    fn top(&self) -> Elem {
        HeytingAlgebra::top(self)
    }

    fn bottom(&self) -> Elem {
        HeytingAlgebra::bottom(self)
    }

    fn meet(&self, a: &Elem, b: &Elem) -> Elem {
        HeytingAlgebra::meet(self, *a, *b)
    }

    fn join(&self, a: &Elem, b: &Elem) -> Elem {
        HeytingAlgebra::join(self, *a, *b)
    }

    fn implies(&self, a: &Elem, b: &Elem) -> Elem {
        HeytingAlgebra::implies(self, *a, *b)
    }
}

/// The frame of open regions of the line.
#[derive(Debug, Clone, Copy, Default)]
pub struct LineFrame;

impl Heyting for LineFrame {
    type Value = OpenRegion;

    fn top(&self) -> OpenRegion {
        OpenRegion::top()
    }

    fn bottom(&self) -> OpenRegion {
        OpenRegion::empty()
    }

    fn meet(&self, a: &OpenRegion, b: &OpenRegion) -> OpenRegion {
        a.meet(b)
    }

    fn join(&self, a: &OpenRegion, b: &OpenRegion) -> OpenRegion {
        a.join(b)
    }

    fn implies(&self, a: &OpenRegion, b: &OpenRegion) -> OpenRegion {
        a.implies(b)
    }
}

pub fn eval<H: Heyting>(
    phi: &Formula,
    target: &H,
    assignment: &BTreeMap<String, H::Value>,
) -> Result<H::Value, LogicError> {
    Ok(match phi {
        Formula::Atom(a) => assignment
            .get(a)
            .cloned()
            .ok_or_else(|| LogicError::UnassignedAtom(a.clone()))?,
        Formula::Top => target.top(),
        Formula::Bot => target.bottom(),
        Formula::And(a, b) => target.meet(&eval(a, target, assignment)?, &eval(b, target, assignment)?),
        Formula::Or(a, b) => target.join(&eval(a, target, assignment)?, &eval(b, target, assignment)?),
        Formula::Imp(a, b) => {
            target.implies(&eval(a, target, assignment)?, &eval(b, target, assignment)?)
        }
    })
}

pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// A valuation under which a formula is not `top`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterValuation {
    /// `(atom, element name)` in order of first occurrence.
    pub assignment: Vec<(String, String)>,
    /// Name of the value the formula takes.
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Validity {
    Valid,
    Invalid(CounterValuation),
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid)
    }
}

/// Exhaustive validity check. Valuations are enumerated with the first atom
/// varying slowest and elements in algebra order; the first refuting one is
/// reported.
pub fn is_valid(
    phi: &Formula,
    algebra: &HeytingAlgebra,
    budget: u64,
    exec: Exec,
) -> Result<Validity, LogicError> {
    let atoms = phi.atoms();
    let n = algebra.len() as u128;
    let total = n
        .checked_pow(atoms.len() as u32)
        .unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(LogicError::TooManyAtoms {
            valuations: total,
            budget,
        });
    }
    let k = atoms.len();
    let found = exec::find_map_first(exec, total as usize, |mut idx| {
        let mut choice = vec![0usize; k];
        for slot in choice.iter_mut().rev() {
            *slot = idx % n as usize;
            idx /= n as usize;
        }
        let assignment: BTreeMap<String, Elem> = atoms
            .iter()
            .zip(&choice)
            .map(|(a, &c)| (a.clone(), algebra.elem(c)))
            .collect();
        let value = eval(phi, algebra, &assignment).expect("all atoms assigned");
        (value != algebra.top()).then(|| CounterValuation {
            assignment: atoms
                .iter()
                .zip(&choice)
                .map(|(a, &c)| (a.clone(), algebra.names()[c].clone()))
                .collect(),
            value: algebra.name(value).to_string(),
        })
    });
    Ok(found.map_or(Validity::Valid, Validity::Invalid))
}

#[derive(Debug, Clone)]
pub struct Countermodel {
    pub algebra: NamedAlgebra,
    pub valuation: CounterValuation,
}

/// Smallest refuting algebra: chains of size `2..=max_size` first, then the
/// catalogued non-chain distributive lattices up to `max_size`.
pub fn find_countermodel(
    phi: &Formula,
    max_size: usize,
    budget: u64,
    exec: Exec,
) -> Result<Option<Countermodel>, LogicError> {
    let chains = (2..=max_size).map(|n| NamedAlgebra {
        name: format!("chain{n}"),
        algebra: catalog::chain(n),
    });
    for candidate in chains.chain(catalog::non_chains(max_size)) {
        if let Validity::Invalid(valuation) = is_valid(phi, &candidate.algebra, budget, exec)? {
            return Ok(Some(Countermodel {
                algebra: candidate,
                valuation,
            }));
        }
    }
    Ok(None)
}

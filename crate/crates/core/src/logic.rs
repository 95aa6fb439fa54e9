//! The property language: nesting-free `A<>`, `E<>`, `A[]`, `E[]` formulas
//! with a closed time window, their CTL form, and 3-valued verdicts.

use std::fmt;

use thiserror::Error;

use crate::trace::{Interval, Quantum, Time, TraceError};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LogicError {
    #[error("parse error at {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("unsupported at {pos}: {msg}")]
    Unsupported { pos: usize, msg: String },
    #[error("definition error: {0}")]
    Definition(String),
    #[error(transparent)]
    Quantization(#[from] TraceError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClockOp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl ClockOp {
    fn symbol(self) -> &'static str {
        match self {
            ClockOp::Lt => "<",
            ClockOp::Le => "<=",
            ClockOp::Gt => ">",
            ClockOp::Ge => ">=",
        }
    }
}

/// `T op bound` over the single global clock.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ClockConstraint {
    pub op: ClockOp,
    pub bound: Time,
}

impl ClockConstraint {
    pub fn holds(&self, t: Time) -> bool {
        match self.op {
            ClockOp::Lt => t < self.bound,
            ClockOp::Le => t <= self.bound,
            ClockOp::Gt => t > self.bound,
            ClockOp::Ge => t >= self.bound,
        }
    }
}

/// Boolean state predicate with leaves of type `L` (names while parsing,
/// resolved ids afterwards).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Expr<L> {
    True,
    False,
    Leaf(L),
    Clock(ClockConstraint),
    Not(Box<Expr<L>>),
    And(Box<Expr<L>>, Box<Expr<L>>),
    Or(Box<Expr<L>>, Box<Expr<L>>),
    Implies(Box<Expr<L>>, Box<Expr<L>>),
    /// The observed part of a CTL state formula. At the suffix location it is
    /// replaced as a whole by the suffix polarity.
    Observed(Box<Expr<L>>),
}

impl<L> Expr<L> {
    pub fn negate(e: Expr<L>) -> Self {
        Expr::Not(Box::new(e))
    }

    pub fn and(a: Expr<L>, b: Expr<L>) -> Self {
        Expr::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Expr<L>, b: Expr<L>) -> Self {
        Expr::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Expr<L>, b: Expr<L>) -> Self {
        Expr::Implies(Box::new(a), Box::new(b))
    }

    pub fn try_map<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<Expr<M>, E> {
        Ok(match self {
            Expr::True => Expr::True,
            Expr::False => Expr::False,
            Expr::Leaf(l) => Expr::Leaf(f(l)?),
            Expr::Clock(c) => Expr::Clock(*c),
            Expr::Not(e) => Expr::Not(Box::new(e.try_map(f)?)),
            Expr::And(a, b) => Expr::And(Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Expr::Or(a, b) => Expr::Or(Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Expr::Implies(a, b) => Expr::Implies(Box::new(a.try_map(f)?), Box::new(b.try_map(f)?)),
            Expr::Observed(e) => Expr::Observed(Box::new(e.try_map(f)?)),
        })
    }

    fn try_map_clocks<E>(&self, f: &mut impl FnMut(Time) -> Result<Time, E>) -> Result<Expr<L>, E>
    where
        L: Clone,
    {
        Ok(match self {
            Expr::Clock(c) => Expr::Clock(ClockConstraint { op: c.op, bound: f(c.bound)? }),
            Expr::Not(e) => Expr::Not(Box::new(e.try_map_clocks(f)?)),
            Expr::And(a, b) => Expr::And(Box::new(a.try_map_clocks(f)?), Box::new(b.try_map_clocks(f)?)),
            Expr::Or(a, b) => Expr::Or(Box::new(a.try_map_clocks(f)?), Box::new(b.try_map_clocks(f)?)),
            Expr::Implies(a, b) => {
                Expr::Implies(Box::new(a.try_map_clocks(f)?), Box::new(b.try_map_clocks(f)?))
            }
            Expr::Observed(e) => Expr::Observed(Box::new(e.try_map_clocks(f)?)),
            other => other.clone(),
        })
    }

    pub fn leaves(&self) -> Vec<&L> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Leaf(l) = e {
                out.push(l);
            }
        });
        out
    }

    pub fn clock_bounds(&self) -> Vec<Time> {
        let mut out = Vec::new();
        self.visit(&mut |e| {
            if let Expr::Clock(c) = e {
                out.push(c.bound);
            }
        });
        out
    }

    fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Expr<L>)) {
        f(self);
        match self {
            Expr::Not(e) | Expr::Observed(e) => e.visit(f),
            Expr::And(a, b) | Expr::Or(a, b) | Expr::Implies(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Evaluates with a leaf resolver; `Observed` is transparent.
    pub fn eval_with<E>(&self, t: Time, leaf: &mut impl FnMut(&L) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            Expr::True => true,
            Expr::False => false,
            Expr::Leaf(l) => leaf(l)?,
            Expr::Clock(c) => c.holds(t),
            Expr::Not(e) => !e.eval_with(t, leaf)?,
            Expr::And(a, b) => a.eval_with(t, leaf)? && b.eval_with(t, leaf)?,
            Expr::Or(a, b) => a.eval_with(t, leaf)? || b.eval_with(t, leaf)?,
            Expr::Implies(a, b) => !a.eval_with(t, leaf)? || b.eval_with(t, leaf)?,
            Expr::Observed(e) => e.eval_with(t, leaf)?,
        })
    }
}

impl<L: fmt::Display> fmt::Display for Expr<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::True => write!(f, "true"),
            Expr::False => write!(f, "false"),
            Expr::Leaf(l) => write!(f, "{l}"),
            Expr::Clock(c) => write!(f, "T{}{}", c.op.symbol(), c.bound),
            Expr::Not(e) => write!(f, "!{e}"),
            Expr::And(a, b) => write!(f, "({a} && {b})"),
            Expr::Or(a, b) => write!(f, "({a} || {b})"),
            Expr::Implies(a, b) => write!(f, "({a} -> {b})"),
            Expr::Observed(e) => write!(f, "{e}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Modality {
    Eventually,
    Always,
}

fn modal_symbol(q: Quantifier, m: Modality) -> &'static str {
    match (q, m) {
        (Quantifier::Forall, Modality::Eventually) => "A<>",
        (Quantifier::Exists, Modality::Eventually) => "E<>",
        (Quantifier::Forall, Modality::Always) => "A[]",
        (Quantifier::Exists, Modality::Always) => "E[]",
    }
}

/// `Q M^window phi`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Formula<L = String> {
    pub quantifier: Quantifier,
    pub modality: Modality,
    pub window: Interval,
    pub phi: Expr<L>,
}

impl<L: Clone> Formula<L> {
    /// Converts window and clock bounds from raw units into ticks.
    pub fn quantize(&self, q: Quantum) -> Result<Formula<L>, LogicError> {
        let mut to_ticks = |v: Time| q.to_ticks(v);
        Ok(Formula {
            quantifier: self.quantifier,
            modality: self.modality,
            window: Interval::new(to_ticks(self.window.lo)?, to_ticks(self.window.hi)?),
            phi: self.phi.try_map_clocks(&mut to_ticks)?,
        })
    }

    pub fn try_map_leaves<M, E>(&self, f: &mut impl FnMut(&L) -> Result<M, E>) -> Result<Formula<M>, E> {
        Ok(Formula {
            quantifier: self.quantifier,
            modality: self.modality,
            window: self.window,
            phi: self.phi.try_map(f)?,
        })
    }

    /// Largest time constant mentioned by the formula.
    pub fn max_constant(&self) -> Time {
        self.phi.clock_bounds().into_iter().fold(self.window.hi, Time::max)
    }
}

impl<L: fmt::Display> fmt::Display for Formula<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}[{},{}] {}",
            modal_symbol(self.quantifier, self.modality),
            self.window.lo,
            self.window.hi,
            self.phi
        )
    }
}

/// CTL state formula obtained by folding the window into clock constraints.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtlFormula<L = String> {
    pub quantifier: Quantifier,
    pub modality: Modality,
    pub psi: Expr<L>,
}

impl<L: fmt::Display> fmt::Display for CtlFormula<L> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", modal_symbol(self.quantifier, self.modality), self.psi)
    }
}

fn window_constraint<L>(w: Interval) -> Expr<L> {
    let upper = Expr::Clock(ClockConstraint { op: ClockOp::Le, bound: w.hi });
    if w.lo == 0 {
        upper
    } else {
        Expr::and(Expr::Clock(ClockConstraint { op: ClockOp::Ge, bound: w.lo }), upper)
    }
}

/// `<>^J phi` becomes `<>(T in J && phi)`, `[]^J phi` becomes `[](T in J -> phi)`.
pub fn to_ctl<L: Clone>(f: &Formula<L>) -> CtlFormula<L> {
    let window = window_constraint(f.window);
    let observed = Expr::Observed(Box::new(f.phi.clone()));
    let psi = match f.modality {
        Modality::Eventually => Expr::and(window, observed),
        Modality::Always => Expr::implies(window, observed),
    };
    CtlFormula { quantifier: f.quantifier, modality: f.modality, psi }
}

/// Index of a CGS predicate.
pub type PredId = usize;

/// Set of predicate ids, at most [`LabelSet::CAPACITY`] predicates.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct LabelSet(u128);

impl LabelSet {
    pub const CAPACITY: usize = 128;

    pub fn insert(&mut self, p: PredId) {
        assert!(p < Self::CAPACITY, "predicate id {p} out of range");
        self.0 |= 1 << p;
    }

    pub fn contains(&self, p: PredId) -> bool {
        p < Self::CAPACITY && self.0 & (1 << p) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = PredId> + '_ {
        (0..Self::CAPACITY).filter(|p| self.contains(*p))
    }
}

impl FromIterator<PredId> for LabelSet {
    fn from_iter<I: IntoIterator<Item = PredId>>(iter: I) -> Self {
        let mut s = LabelSet::default();
        for p in iter {
            s.insert(p);
        }
        s
    }
}

/// Which infinite suffix the extra location stands for.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Polarity {
    /// Every future location satisfies the observed predicate.
    Top,
    /// No future location satisfies it.
    Bot,
}

impl Polarity {
    pub fn value(self) -> bool {
        matches!(self, Polarity::Top)
    }
}

/// Evaluates a resolved state predicate at a location with the given labels
/// and clock value.
///
/// At the suffix location, predicate leaves take the polarity value and an
/// `Observed` subtree takes it as a whole; clock leaves outside `Observed`
/// always read `t`. Without a polarity, predicate leaves cannot be resolved
/// there.
pub fn eval_state_pred(
    phi: &Expr<PredId>,
    labels: &LabelSet,
    t: Time,
    at_loc_inf: bool,
    polarity: Option<Polarity>,
) -> Result<bool, LogicError> {
    Ok(match phi {
        Expr::True => true,
        Expr::False => false,
        Expr::Leaf(p) => {
            if at_loc_inf {
                match polarity {
                    Some(pol) => pol.value(),
                    None => {
                        return Err(LogicError::Definition(format!(
                            "predicate #{p} has no value at the suffix location"
                        )))
                    }
                }
            } else {
                labels.contains(*p)
            }
        }
        Expr::Clock(c) => c.holds(t),
        Expr::Not(e) => !eval_state_pred(e, labels, t, at_loc_inf, polarity)?,
        Expr::And(a, b) => {
            eval_state_pred(a, labels, t, at_loc_inf, polarity)?
                && eval_state_pred(b, labels, t, at_loc_inf, polarity)?
        }
        Expr::Or(a, b) => {
            eval_state_pred(a, labels, t, at_loc_inf, polarity)?
                || eval_state_pred(b, labels, t, at_loc_inf, polarity)?
        }
        Expr::Implies(a, b) => {
            !eval_state_pred(a, labels, t, at_loc_inf, polarity)?
                || eval_state_pred(b, labels, t, at_loc_inf, polarity)?
        }
        Expr::Observed(e) => match (at_loc_inf, polarity) {
            (true, Some(pol)) => pol.value(),
            _ => eval_state_pred(e, labels, t, at_loc_inf, polarity)?,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict3 {
    Top,
    Bot,
    Unknown,
}

impl Verdict3 {
    pub fn is_conclusive(self) -> bool {
        !matches!(self, Verdict3::Unknown)
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Verdict3::Top => "⊤",
            Verdict3::Bot => "⊥",
            Verdict3::Unknown => "?",
        }
    }
}

impl fmt::Display for Verdict3 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            Verdict3::Top => "TRUE",
            Verdict3::Bot => "FALSE",
            Verdict3::Unknown => "INCONCLUSIVE",
        })
    }
}

pub fn combine_verdicts(v_top: bool, v_bot: bool) -> Verdict3 {
    match (v_top, v_bot) {
        (true, true) => Verdict3::Top,
        (false, false) => Verdict3::Bot,
        _ => Verdict3::Unknown,
    }
}

pub fn not3(v: Verdict3) -> Verdict3 {
    match v {
        Verdict3::Top => Verdict3::Bot,
        Verdict3::Bot => Verdict3::Top,
        Verdict3::Unknown => Verdict3::Unknown,
    }
}

// ---------------------------------------------------------------------------
// Surface syntax

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    LParen,
    RParen,
    LBrack,
    RBrack,
    Comma,
    Bang,
    AndAnd,
    OrOr,
    Arrow,
    Cmp(ClockOp),
    Modal(Quantifier, Modality),
    Assign,
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, LogicError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    let err = |pos: usize, msg: &str| LogicError::Parse { pos, msg: msg.to_string() };
    while i < bytes.len() {
        let c = bytes[i];
        let rest = &src[i..];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let modal = [
            ("A<>", Quantifier::Forall, Modality::Eventually),
            ("E<>", Quantifier::Exists, Modality::Eventually),
            ("A[]", Quantifier::Forall, Modality::Always),
            ("E[]", Quantifier::Exists, Modality::Always),
        ]
        .into_iter()
        .find(|(s, _, _)| rest.starts_with(s));
        if let Some((s, q, m)) = modal {
            out.push((i, Tok::Modal(q, m)));
            i += s.len();
            continue;
        }
        let two = [
            ("&&", Tok::AndAnd),
            ("||", Tok::OrOr),
            ("->", Tok::Arrow),
            ("<=", Tok::Cmp(ClockOp::Le)),
            (">=", Tok::Cmp(ClockOp::Ge)),
            (":=", Tok::Assign),
        ]
        .into_iter()
        .find(|(s, _)| rest.starts_with(s));
        if let Some((s, t)) = two {
            out.push((i, t));
            i += s.len();
            continue;
        }
        let tok = match c {
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b'[' => Tok::LBrack,
            b']' => Tok::RBrack,
            b',' => Tok::Comma,
            b'!' => Tok::Bang,
            b'<' => Tok::Cmp(ClockOp::Lt),
            b'>' => Tok::Cmp(ClockOp::Gt),
            b'0'..=b'9' => {
                let end = rest.find(|ch: char| !ch.is_ascii_digit()).unwrap_or(rest.len());
                let n = rest[..end].parse().map_err(|_| err(i, "number out of range"))?;
                out.push((i, Tok::Num(n)));
                i += end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let end = rest
                    .find(|ch: char| !(ch.is_ascii_alphanumeric() || ch == '_' || ch == '.'))
                    .unwrap_or(rest.len());
                out.push((i, Tok::Ident(rest[..end].to_string())));
                i += end;
                continue;
            }
            _ => return Err(err(i, &format!("unexpected character {:?}", c as char))),
        };
        out.push((i, tok));
        i += 1;
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn new(src: &str) -> Result<Self, LogicError> {
        Ok(Parser { toks: tokenize(src)?, pos: 0, end: src.len() })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, LogicError> {
        Err(LogicError::Parse { pos: self.offset(), msg: msg.into() })
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), LogicError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            self.error(format!("expected {what}"))
        }
    }

    fn number(&mut self) -> Result<u64, LogicError> {
        match self.peek() {
            Some(Tok::Num(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            Some(Tok::Ident(s)) if s == "inf" => Err(LogicError::Unsupported {
                pos: self.offset(),
                msg: "unbounded time windows are not supported".into(),
            }),
            _ => self.error("expected a natural number"),
        }
    }

    fn finish(&self) -> Result<(), LogicError> {
        if self.pos < self.toks.len() {
            return self.error("unexpected trailing input");
        }
        Ok(())
    }

    fn formula(&mut self) -> Result<Formula, LogicError> {
        let (quantifier, modality) = match self.bump() {
            Some(Tok::Modal(q, m)) => (q, m),
            _ => {
                self.pos = self.pos.saturating_sub(1);
                return self.error("expected A<>, E<>, A[] or E[]");
            }
        };
        self.expect(Tok::LBrack, "'['")?;
        let lo = self.number()?;
        self.expect(Tok::Comma, "','")?;
        let hi = self.number()?;
        self.expect(Tok::RBrack, "']'")?;
        if lo > hi {
            return self.error(format!("empty time window [{lo},{hi}]"));
        }
        let phi = self.implication()?;
        Ok(Formula { quantifier, modality, window: Interval::new(lo, hi), phi })
    }

    fn implication(&mut self) -> Result<Expr<String>, LogicError> {
        let lhs = self.disjunction()?;
        if self.peek() == Some(&Tok::Arrow) {
            self.pos += 1;
            let rhs = self.implication()?;
            return Ok(Expr::implies(lhs, rhs));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Expr<String>, LogicError> {
        let mut e = self.conjunction()?;
        while self.peek() == Some(&Tok::OrOr) {
            self.pos += 1;
            e = Expr::or(e, self.conjunction()?);
        }
        Ok(e)
    }

    fn conjunction(&mut self) -> Result<Expr<String>, LogicError> {
        let mut e = self.unary()?;
        while self.peek() == Some(&Tok::AndAnd) {
            self.pos += 1;
            e = Expr::and(e, self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> Result<Expr<String>, LogicError> {
        if self.peek() == Some(&Tok::Bang) {
            self.pos += 1;
            return Ok(Expr::negate(self.unary()?));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr<String>, LogicError> {
        let at = self.offset();
        match self.bump() {
            Some(Tok::LParen) => {
                let e = self.implication()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Modal(..)) => Err(LogicError::Unsupported {
                pos: at,
                msg: "nested modal operators are not supported".into(),
            }),
            Some(Tok::Ident(name)) => match name.as_str() {
                "true" => Ok(Expr::True),
                "false" => Ok(Expr::False),
                "T" if matches!(self.peek(), Some(Tok::Cmp(_))) => {
                    let Some(Tok::Cmp(op)) = self.bump() else { unreachable!() };
                    let bound = self.number()?;
                    Ok(Expr::Clock(ClockConstraint { op, bound }))
                }
                _ => Ok(Expr::Leaf(name)),
            },
            _ => {
                self.pos -= 1;
                self.error("expected a predicate, clock constraint or '('")
            }
        }
    }
}

/// Parses `A<>[lo,hi] expr`, `E<>[lo,hi] expr`, `A[][lo,hi] expr` or
/// `E[][lo,hi] expr`.
pub fn parse_formula(text: &str) -> Result<Formula, LogicError> {
    let mut p = Parser::new(text)?;
    let f = p.formula()?;
    p.finish()?;
    Ok(f)
}

/// Parses a bare state predicate (no modality).
pub fn parse_expr(text: &str) -> Result<Expr<String>, LogicError> {
    let mut p = Parser::new(text)?;
    let e = p.implication()?;
    p.finish()?;
    Ok(e)
}

/// Contents of a property file: predicate definitions (`name := expr`) and
/// formulas, one per line, `#` starting a comment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PropertySet {
    pub predicates: Vec<(String, Expr<String>)>,
    pub formulas: Vec<(String, Formula)>,
}

impl PropertySet {
    pub fn parse(text: &str) -> Result<Self, LogicError> {
        let mut set = PropertySet::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            set.add_line(line).map_err(|e| match e {
                LogicError::Parse { pos, msg } => {
                    LogicError::Parse { pos, msg: format!("line {}: {msg}", lineno + 1) }
                }
                other => other,
            })?;
        }
        Ok(set)
    }

    /// Adds one definition or formula line.
    pub fn add_line(&mut self, line: &str) -> Result<(), LogicError> {
        if let Some((name, body)) = line.split_once(":=") {
            let name = name.trim();
            if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
                return Err(LogicError::Parse { pos: 0, msg: format!("bad predicate name {name:?}") });
            }
            let expr = parse_expr(body)?;
            self.predicates.push((name.to_string(), expr));
        } else {
            let f = parse_formula(line)?;
            let id = format!("PHI_{}", self.formulas.len() + 1);
            self.formulas.push((id, f));
        }
        Ok(())
    }
}

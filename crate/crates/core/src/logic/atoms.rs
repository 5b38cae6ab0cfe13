use std::fmt;

use crate::error::{Error, Result};
use crate::formula::{parse_formula_with, parse_param, resolve_operator, Cursor, Family, Leaf, OperatorSymbol, Prop, PropAtom, SimilarityType, Tok};
use crate::formula::lex;
use crate::semantics::StateSet;

/// `L(A_1, …, A_n)` for subsets `A_i` of a finite carrier.
///
/// Atoms order by operator (family, then parameter), then by arguments
/// with subsets compared as binary numbers.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OneStepAtom {
    op: OperatorSymbol,
    args: Vec<StateSet>,
    carrier: usize,
}

/// Boolean combination of one-step atoms.
pub type OneStepFormula = Prop<OneStepAtom>;

impl OneStepAtom {
    pub fn new(op: OperatorSymbol, args: Vec<StateSet>, carrier: usize) -> Result<Self> {
        if args.len() != op.arity() {
            return Err(Error::Arity { op: op.to_string(), expected: op.arity(), got: args.len() });
        }
        if let Some(a) = args.iter().find(|a| a.bound() > carrier) {
            return Err(Error::AtomUniverseMismatch(format!("{a:?} is not a subset of a {carrier}-element carrier")));
        }
        Ok(OneStepAtom { op, args, carrier })
    }

    pub fn op(&self) -> &OperatorSymbol {
        &self.op
    }

    pub fn args(&self) -> &[StateSet] {
        &self.args
    }

    pub fn carrier(&self) -> usize {
        self.carrier
    }
}

impl PropAtom for OneStepAtom {
    fn universe(&self) -> u64 {
        self.carrier as u64
    }
}

fn set_str(s: &StateSet) -> String {
    let items: Vec<String> = s.iter().map(|x| format!("s{x}")).collect();
    format!("{{{}}}", items.join(","))
}

impl fmt::Display for OneStepAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.op.family() {
            Family::Box => write!(f, "[]{}", set_str(&self.args[0])),
            Family::Cond => write!(f, "({} => {})", set_str(&self.args[0]), set_str(&self.args[1])),
            _ => {
                let args: Vec<String> = self.args.iter().map(set_str).collect();
                write!(f, "{}({})", self.op, args.join(", "))
            }
        }
    }
}

impl fmt::Debug for OneStepAtom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Renders a one-step formula with the connectives of the surface syntax.
pub fn render_one_step(f: &OneStepFormula) -> String {
    match f {
        Prop::Atom(a) => a.to_string(),
        Prop::Bottom => "false".into(),
        Prop::Not(a) => match &**a {
            Prop::Bottom => "true".into(),
            Prop::And(x, y) => match (&**x, &**y) {
                (Prop::Not(x), Prop::Not(y)) => format!("({} | {})", render_one_step(x), render_one_step(y)),
                (x, Prop::Not(y)) => format!("({} -> {})", render_one_step(x), render_one_step(y)),
                _ => format!("!{}", render_one_step(a)),
            },
            _ => format!("!{}", render_one_step(a)),
        },
        Prop::And(a, b) => format!("({} & {})", render_one_step(a), render_one_step(b)),
    }
}

/// Parse tree node: either a set expression or a one-step formula.
#[derive(Clone)]
enum Node {
    Set(StateSet),
    Formula(OneStepFormula),
    Invalid(usize, String),
}

struct OneStepSyntax<'a> {
    sig: &'a SimilarityType,
    carrier: usize,
}

impl OneStepSyntax<'_> {
    fn formula(&self, n: Node) -> Result<OneStepFormula> {
        match n {
            Node::Formula(f) => Ok(f),
            Node::Set(s) => Err(Error::Syntax { pos: 0, msg: format!("set {} used as a formula", set_str(&s)) }),
            Node::Invalid(pos, msg) => Err(Error::Syntax { pos, msg }),
        }
    }

    fn set(&self, pos: usize, n: Node) -> Result<StateSet> {
        match n {
            Node::Set(s) => Ok(s),
            Node::Formula(_) => Err(Error::Syntax { pos, msg: "expected a set of states".into() }),
            Node::Invalid(pos, msg) => Err(Error::Syntax { pos, msg }),
        }
    }

    fn atom(&self, op: OperatorSymbol, args: Vec<StateSet>) -> Result<Node> {
        Ok(Node::Formula(Prop::atom(OneStepAtom::new(op, args, self.carrier)?)))
    }

    fn set_literal(&self, cur: &mut Cursor) -> Result<StateSet> {
        let mut s = StateSet::new();
        if cur.eat(&Tok::RBrace) {
            return Ok(s);
        }
        loop {
            let pos = cur.pos();
            let i = match cur.bump() {
                Tok::Num(i) => i as usize,
                Tok::Ident(id) => id
                    .strip_prefix('s')
                    .and_then(|d| d.parse::<usize>().ok())
                    .ok_or_else(|| Error::Syntax { pos, msg: format!("state ids are written s0, s1, …, got `{id}`") })?,
                _ => return Err(Error::Syntax { pos, msg: "expected a state id".into() }),
            };
            if i >= self.carrier {
                return Err(Error::UnknownState(format!("s{i}")));
            }
            s.insert(i);
            if cur.eat(&Tok::RBrace) {
                return Ok(s);
            }
            cur.expect(&Tok::Comma, "`,` or `}`")?;
        }
    }

    fn boxed(&self, pos: usize, a: StateSet) -> Result<Node> {
        if self.sig.has(Family::Box) {
            self.atom(OperatorSymbol::boxed(), vec![a])
        } else if self.sig.has(Family::Geq) {
            let n = self.atom(OperatorSymbol::geq(1), vec![a.complement(self.carrier)])?;
            Ok(Node::Formula(Prop::not(self.formula(n)?)))
        } else {
            Err(Error::Syntax { pos, msg: "no box operator in this signature".into() })
        }
    }

    fn dia(&self, pos: usize, a: StateSet) -> Result<Node> {
        if self.sig.has(Family::Box) {
            let n = self.atom(OperatorSymbol::boxed(), vec![a.complement(self.carrier)])?;
            Ok(Node::Formula(Prop::not(self.formula(n)?)))
        } else if self.sig.has(Family::Geq) {
            self.atom(OperatorSymbol::geq(1), vec![a])
        } else {
            Err(Error::Syntax { pos, msg: "no diamond operator in this signature".into() })
        }
    }
}

impl Leaf for OneStepSyntax<'_> {
    type Node = Node;

    fn bottom(&self) -> Node {
        Node::Formula(Prop::Bottom)
    }

    fn not(&self, a: Node) -> Node {
        match a {
            Node::Set(s) => Node::Set(s.complement(self.carrier)),
            Node::Formula(f) => Node::Formula(Prop::not(f)),
            e => e,
        }
    }

    fn and(&self, a: Node, b: Node) -> Node {
        match (a, b) {
            (Node::Set(x), Node::Set(y)) => Node::Set(x.intersection(&y)),
            (Node::Formula(x), Node::Formula(y)) => Node::Formula(Prop::and(x, y)),
            (e @ Node::Invalid(..), _) | (_, e @ Node::Invalid(..)) => e,
            _ => Node::Invalid(0, "sets and formulas cannot be combined".into()),
        }
    }

    fn leaf(&mut self, cur: &mut Cursor) -> Result<Node> {
        let pos = cur.pos();
        match cur.bump() {
            Tok::LBrace => Ok(Node::Set(self.set_literal(cur)?)),
            Tok::BoxOp => {
                let a = crate::formula::parse_unary_with(self, cur)?;
                let a = self.set(pos, a)?;
                self.boxed(pos, a)
            }
            Tok::DiaOp => {
                let a = crate::formula::parse_unary_with(self, cur)?;
                let a = self.set(pos, a)?;
                self.dia(pos, a)
            }
            Tok::Ident(name) => {
                let param = if cur.eat(&Tok::LBrack) {
                    let p = parse_param(cur)?;
                    cur.expect(&Tok::RBrack, "`]`")?;
                    Some(p)
                } else {
                    None
                };
                let mut args = Vec::new();
                if cur.eat(&Tok::LParen) {
                    loop {
                        let apos = cur.pos();
                        let a = parse_formula_with(self, cur)?;
                        args.push(self.set(apos, a)?);
                        if cur.eat(&Tok::RParen) {
                            break;
                        }
                        cur.expect(&Tok::Comma, "`,` or `)`")?;
                    }
                } else if cur.eat(&Tok::LBrace) {
                    args.push(self.set_literal(cur)?);
                } else {
                    return Err(Error::Syntax { pos, msg: format!("`{name}` needs set arguments") });
                }
                match (name.as_str(), param, args.len()) {
                    ("dia", None, 1) => self.dia(pos, args.pop().expect("one argument")),
                    ("box", None, 1) if !self.sig.has(Family::Box) => self.boxed(pos, args.pop().expect("one argument")),
                    _ => {
                        let op = resolve_operator(self.sig, &name, param)?;
                        self.atom(op, args)
                    }
                }
            }
            other => Err(Error::Syntax { pos, msg: format!("unexpected token {other:?}") }),
        }
    }

    fn cond(&mut self, pos: usize, a: Node, b: Node) -> Result<Node> {
        if !self.sig.has(Family::Cond) {
            return Err(Error::Syntax { pos, msg: "`=>` needs the conditional in the signature".into() });
        }
        let a = self.set(pos, a)?;
        let b = self.set(pos, b)?;
        self.atom(OperatorSymbol::cond(), vec![a, b])
    }
}

/// Parses a one-step formula over a carrier `{s0, …, s(n-1)}`. Sets are
/// written `{s0, s2}` and may be combined with `!`, `&`, `|`.
pub fn parse_one_step(text: &str, sig: &SimilarityType, carrier: usize) -> Result<OneStepFormula> {
    let mut cur = Cursor::new(lex(text)?);
    let mut syn = OneStepSyntax { sig, carrier };
    let n = parse_formula_with(&mut syn, &mut cur)?;
    if *cur.peek() != Tok::Eof {
        return Err(cur.error("trailing input".into()));
    }
    syn.formula(n)
}

//! Surface syntax for formulas.
//!
//! ```text
//! formula := cond
//! cond    := iff ("=>" cond)?            # binary conditional, right-assoc
//! iff     := imp ("<->" imp)*
//! imp     := or ("->" or)*
//! or      := and ("|" and)*
//! and     := unary ("&" unary)*
//! unary   := "!" unary | "[]" unary | "<>" unary | modal
//!          | "(" formula ")" | atom | "true" | "false"
//! modal   := IDENT ("[" PARAM "]")? "(" formula ("," formula)* ")"
//! atom    := "p" NUMBER | IDENT
//! PARAM   := NUMBER | NUMBER "/" NUMBER
//! ```
//!
//! Registered operator names are `box`, `dia`, `geq[k]`, `L[p/q]`, `E[m]`,
//! `E` and `cond`. Any other identifier is an atom alias and receives the
//! smallest index not used explicitly in the text.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;

use super::ast::{Family, Formula, OperatorSymbol, ParamDomain, Rational, Scalar, SimilarityType};
use super::lexer::{indexed_atom, lex, Cursor, Tok, RESERVED};
use crate::error::{Error, Result};

/// Boolean skeleton shared by the formula and one-step syntaxes.
pub(crate) trait Leaf {
    type Node: Clone;
    fn bottom(&self) -> Self::Node;
    fn not(&self, a: Self::Node) -> Self::Node;
    fn and(&self, a: Self::Node, b: Self::Node) -> Self::Node;
    /// Everything in `unary` other than `!`, parentheses and constants.
    fn leaf(&mut self, cur: &mut Cursor) -> Result<Self::Node>;
    fn cond(&mut self, pos: usize, a: Self::Node, b: Self::Node) -> Result<Self::Node>;
}

pub(crate) fn formula<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    let a = iff(l, cur)?;
    let pos = cur.pos();
    if cur.eat(&Tok::DArrow) {
        let b = formula(l, cur)?;
        return l.cond(pos, a, b);
    }
    Ok(a)
}

fn iff<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    let mut a = imp(l, cur)?;
    while cur.eat(&Tok::Iff) {
        let b = imp(l, cur)?;
        let ab = l.not(l.and(a.clone(), l.not(b.clone())));
        let ba = l.not(l.and(b, l.not(a)));
        a = l.and(ab, ba);
    }
    Ok(a)
}

fn imp<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    let mut a = or(l, cur)?;
    while cur.eat(&Tok::Arrow) {
        let b = or(l, cur)?;
        a = l.not(l.and(a, l.not(b)));
    }
    Ok(a)
}

fn or<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    let mut a = and(l, cur)?;
    while cur.eat(&Tok::Bar) {
        let b = and(l, cur)?;
        a = l.not(l.and(l.not(a), l.not(b)));
    }
    Ok(a)
}

fn and<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    let mut a = unary(l, cur)?;
    while cur.eat(&Tok::Amp) {
        let b = unary(l, cur)?;
        a = l.and(a, b);
    }
    Ok(a)
}

pub(crate) fn unary<L: Leaf>(l: &mut L, cur: &mut Cursor) -> Result<L::Node> {
    match cur.peek().clone() {
        Tok::Bang => {
            cur.bump();
            let a = unary(l, cur)?;
            Ok(l.not(a))
        }
        Tok::LParen => {
            cur.bump();
            let a = formula(l, cur)?;
            cur.expect(&Tok::RParen, "`)`")?;
            Ok(a)
        }
        Tok::Ident(name) if name == "true" => {
            cur.bump();
            Ok(l.not(l.bottom()))
        }
        Tok::Ident(name) if name == "false" => {
            cur.bump();
            Ok(l.bottom())
        }
        Tok::Eof => Err(cur.error("unexpected end of input".into())),
        _ => l.leaf(cur),
    }
}

pub(crate) fn parse_param(cur: &mut Cursor) -> Result<(u64, Option<u64>)> {
    let n = match cur.bump() {
        Tok::Num(n) => n,
        _ => return Err(cur.error("expected numeric parameter".into())),
    };
    if cur.eat(&Tok::Slash) {
        match cur.bump() {
            Tok::Num(0) => Err(cur.error("zero denominator".into())),
            Tok::Num(d) => Ok((n, Some(d))),
            _ => Err(cur.error("expected denominator".into())),
        }
    } else {
        Ok((n, None))
    }
}

/// Resolves a surface operator name and parameter against a signature.
pub(crate) fn resolve_operator(
    sig: &SimilarityType,
    name: &str,
    param: Option<(u64, Option<u64>)>,
) -> Result<OperatorSymbol> {
    let family = match (name, param.is_some()) {
        ("box", false) => Family::Box,
        ("cond", false) => Family::Cond,
        ("geq", true) => Family::Geq,
        ("L", true) => Family::Prob,
        ("E", true) => Family::Exact,
        ("E", false) => Family::Measurable,
        _ => return Err(Error::UnknownOperator(name.to_string())),
    };
    let dom = sig.domain(family).ok_or_else(|| Error::UnknownOperator(name.to_string()))?;
    let out_of_domain = |p: &str| Error::ParamOutOfDomain { family: name.to_string(), param: p.to_string() };
    let scalar = match param {
        None => None,
        Some((n, den)) => {
            let shown = match den {
                Some(d) => format!("{n}/{d}"),
                None => n.to_string(),
            };
            if dom.is_rational() {
                let d = den.unwrap_or(1);
                Some(Scalar::Rat(Rational::new(BigInt::from(n), BigInt::from(d))))
            } else {
                match den {
                    None => Some(Scalar::Nat(n)),
                    Some(d) if d != 0 && n % d == 0 => Some(Scalar::Nat(n / d)),
                    Some(_) => return Err(out_of_domain(&shown)),
                }
            }
            .filter(|s| dom.contains(Some(s)))
            .map(Some)
            .ok_or_else(|| out_of_domain(&shown))?
        }
    };
    if *dom == ParamDomain::None && scalar.is_some() {
        return Err(Error::UnknownOperator(name.to_string()));
    }
    OperatorSymbol::new(family, scalar)
}

struct FormulaSyntax<'a> {
    sig: &'a SimilarityType,
    aliases: &'a mut BTreeMap<String, u32>,
    used: BTreeSet<u32>,
}

impl FormulaSyntax<'_> {
    fn alias(&mut self, name: &str) -> u32 {
        if let Some(i) = self.aliases.get(name) {
            return *i;
        }
        let mut i = 0;
        while self.used.contains(&i) {
            i += 1;
        }
        self.used.insert(i);
        self.aliases.insert(name.to_string(), i);
        i
    }

    fn box_of(&self, pos: usize, f: Formula) -> Result<Formula> {
        if self.sig.has(Family::Box) {
            Ok(Formula::boxed(f))
        } else if self.sig.has(Family::Geq) {
            Ok(Formula::not(Formula::geq(1, Formula::not(f))))
        } else {
            Err(Error::Syntax { pos, msg: "no box operator in this signature".into() })
        }
    }

    fn dia_of(&self, pos: usize, f: Formula) -> Result<Formula> {
        if self.sig.has(Family::Box) {
            Ok(Formula::dia(f))
        } else if self.sig.has(Family::Geq) {
            Ok(Formula::geq(1, f))
        } else {
            Err(Error::Syntax { pos, msg: "no diamond operator in this signature".into() })
        }
    }
}

impl Leaf for FormulaSyntax<'_> {
    type Node = Formula;

    fn bottom(&self) -> Formula {
        Formula::Bottom
    }

    fn not(&self, a: Formula) -> Formula {
        Formula::not(a)
    }

    fn and(&self, a: Formula, b: Formula) -> Formula {
        Formula::and(a, b)
    }

    fn leaf(&mut self, cur: &mut Cursor) -> Result<Formula> {
        let pos = cur.pos();
        match cur.bump() {
            Tok::BoxOp => {
                let a = unary(self, cur)?;
                self.box_of(pos, a)
            }
            Tok::DiaOp => {
                let a = unary(self, cur)?;
                self.dia_of(pos, a)
            }
            Tok::Ident(name) => {
                if let Some(i) = indexed_atom(&name) {
                    return Ok(Formula::Atom(i));
                }
                let applied = matches!(cur.peek(), Tok::LParen | Tok::LBrack);
                if !RESERVED.contains(&name.as_str()) {
                    if applied {
                        return Err(Error::UnknownOperator(name));
                    }
                    return Ok(Formula::Atom(self.alias(&name)));
                }
                let param = if cur.eat(&Tok::LBrack) {
                    let p = parse_param(cur)?;
                    cur.expect(&Tok::RBrack, "`]`")?;
                    Some(p)
                } else {
                    None
                };
                if !matches!(cur.peek(), Tok::LParen) {
                    return Err(cur.error(format!("expected `(` after `{name}`")));
                }
                cur.bump();
                let mut args = vec![formula(self, cur)?];
                while cur.eat(&Tok::Comma) {
                    args.push(formula(self, cur)?);
                }
                cur.expect(&Tok::RParen, "`)`")?;
                match name.as_str() {
                    "dia" if param.is_none() && args.len() == 1 => {
                        self.dia_of(pos, args.pop().expect("one argument"))
                    }
                    "box" if !self.sig.has(Family::Box) && param.is_none() && args.len() == 1 => {
                        self.box_of(pos, args.pop().expect("one argument"))
                    }
                    _ => {
                        let op = resolve_operator(self.sig, &name, param)?;
                        Formula::modal(op, args)
                    }
                }
            }
            other => Err(Error::Syntax { pos, msg: format!("unexpected token {other:?}") }),
        }
    }

    fn cond(&mut self, pos: usize, a: Formula, b: Formula) -> Result<Formula> {
        if !self.sig.has(Family::Cond) {
            return Err(Error::Syntax { pos, msg: "`=>` needs the conditional in the signature".into() });
        }
        Ok(Formula::cond(a, b))
    }
}

/// Parses `text` over `sig`. Symbolic atom names are aliased to fresh
/// indices.
pub fn parse(text: &str, sig: &SimilarityType) -> Result<Formula> {
    let mut aliases = BTreeMap::new();
    parse_with_aliases(text, sig, &mut aliases)
}

/// Like [`parse`], reusing and extending an alias table.
pub fn parse_with_aliases(
    text: &str,
    sig: &SimilarityType,
    aliases: &mut BTreeMap<String, u32>,
) -> Result<Formula> {
    let toks = lex(text)?;
    let mut used: BTreeSet<u32> = aliases.values().copied().collect();
    for t in &toks {
        if let Tok::Ident(name) = &t.tok {
            if let Some(i) = indexed_atom(name) {
                used.insert(i);
            }
        }
    }
    let mut cur = Cursor::new(toks);
    let mut syn = FormulaSyntax { sig, aliases, used };
    let f = formula(&mut syn, &mut cur)?;
    if *cur.peek() != Tok::Eof {
        return Err(cur.error("trailing input".into()));
    }
    Ok(f)
}

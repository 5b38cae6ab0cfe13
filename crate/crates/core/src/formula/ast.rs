use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use crate::error::{Error, Result};

/// Exact rational number used for probabilities and measures.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn rat_to_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// A parameter of an operator symbol or a measure value.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scalar {
    Nat(u64),
    Rat(Rational),
}

impl Scalar {
    pub fn as_nat(&self) -> Option<u64> {
        match self {
            Scalar::Nat(n) => Some(*n),
            Scalar::Rat(_) => None,
        }
    }

    pub fn as_rat(&self) -> Option<&Rational> {
        match self {
            Scalar::Rat(r) => Some(r),
            Scalar::Nat(_) => None,
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Nat(n) => write!(f, "{n}"),
            Scalar::Rat(r) => f.write_str(&rat_to_string(r)),
        }
    }
}

/// Operator families. The declaration order is the family order used when
/// atoms are sorted.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Family {
    /// Kripke box.
    Box,
    /// Binary conditional.
    Cond,
    /// Graded modality `geq[k]`.
    Geq,
    /// Probabilistic `L[p]`: probability at least `p`.
    Prob,
    /// `E[m]`: measure exactly `m`.
    Exact,
    /// `E`: measurability.
    Measurable,
}

impl Family {
    pub fn arity(self) -> usize {
        match self {
            Family::Cond => 2,
            _ => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Family::Box => "box",
            Family::Cond => "cond",
            Family::Geq => "geq",
            Family::Prob => "L",
            Family::Exact | Family::Measurable => "E",
        }
    }

    pub fn has_param(self) -> bool {
        matches!(self, Family::Geq | Family::Prob | Family::Exact)
    }
}

/// A modal operator: a family together with its parameter.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct OperatorSymbol {
    family: Family,
    param: Option<Scalar>,
}

impl OperatorSymbol {
    pub fn new(family: Family, param: Option<Scalar>) -> Result<Self> {
        if family.has_param() != param.is_some() {
            return Err(Error::ParamOutOfDomain {
                family: family.name().into(),
                param: param.map(|p| p.to_string()).unwrap_or_else(|| "<none>".into()),
            });
        }
        let ok = match (family, &param) {
            (Family::Geq, Some(Scalar::Nat(_))) => true,
            (Family::Prob, Some(Scalar::Rat(_))) => true,
            (Family::Exact, Some(_)) => true,
            (_, None) => true,
            _ => false,
        };
        if !ok {
            return Err(Error::ParamOutOfDomain {
                family: family.name().into(),
                param: param.map(|p| p.to_string()).unwrap_or_default(),
            });
        }
        Ok(OperatorSymbol { family, param })
    }

    pub fn boxed() -> Self {
        OperatorSymbol { family: Family::Box, param: None }
    }

    pub fn cond() -> Self {
        OperatorSymbol { family: Family::Cond, param: None }
    }

    pub fn geq(k: u64) -> Self {
        OperatorSymbol { family: Family::Geq, param: Some(Scalar::Nat(k)) }
    }

    pub fn prob(p: Rational) -> Self {
        OperatorSymbol { family: Family::Prob, param: Some(Scalar::Rat(p)) }
    }

    pub fn exact(m: Scalar) -> Self {
        OperatorSymbol { family: Family::Exact, param: Some(m) }
    }

    pub fn measurable() -> Self {
        OperatorSymbol { family: Family::Measurable, param: None }
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn param(&self) -> Option<&Scalar> {
        self.param.as_ref()
    }

    pub fn arity(&self) -> usize {
        self.family.arity()
    }

    pub fn grade(&self) -> Option<u64> {
        self.param.as_ref().and_then(Scalar::as_nat)
    }
}

impl fmt::Display for OperatorSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.param {
            None => f.write_str(self.family.name()),
            Some(p) => write!(f, "{}[{}]", self.family.name(), p),
        }
    }
}

/// Admissible parameter values of a family.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParamDomain {
    None,
    Nat,
    PositiveNat,
    /// Rationals in `[0, 1]`.
    UnitRational,
    /// Residues `0..n`.
    ZMod(u64),
    NonNegRational,
}

impl ParamDomain {
    pub fn contains(&self, p: Option<&Scalar>) -> bool {
        match (self, p) {
            (ParamDomain::None, None) => true,
            (ParamDomain::Nat, Some(Scalar::Nat(_))) => true,
            (ParamDomain::PositiveNat, Some(Scalar::Nat(n))) => *n > 0,
            (ParamDomain::ZMod(m), Some(Scalar::Nat(n))) => n < m,
            (ParamDomain::UnitRational, Some(Scalar::Rat(r))) => {
                !r.is_negative() && *r <= Rational::one()
            }
            (ParamDomain::NonNegRational, Some(Scalar::Rat(r))) => !r.is_negative(),
            _ => false,
        }
    }

    pub fn is_rational(&self) -> bool {
        matches!(self, ParamDomain::UnitRational | ParamDomain::NonNegRational)
    }
}

/// A finite list of operator families with parameter domains.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimilarityType {
    families: Vec<(Family, ParamDomain)>,
}

impl SimilarityType {
    pub fn new(families: Vec<(Family, ParamDomain)>) -> Self {
        SimilarityType { families }
    }

    pub fn families(&self) -> &[(Family, ParamDomain)] {
        &self.families
    }

    pub fn domain(&self, family: Family) -> Option<&ParamDomain> {
        self.families.iter().find(|(f, _)| *f == family).map(|(_, d)| d)
    }

    pub fn has(&self, family: Family) -> bool {
        self.domain(family).is_some()
    }

    pub fn contains(&self, op: &OperatorSymbol) -> bool {
        self.domain(op.family()).is_some_and(|d| d.contains(op.param()))
    }

    /// The first symbols of the signature in its fixed enumeration order:
    /// families in declaration order, natural parameters ascending up to
    /// `nat_cap`, rationals by denominator then numerator up to `den_cap`.
    pub fn symbols(&self, nat_cap: u64, den_cap: u64) -> Vec<OperatorSymbol> {
        let mut out = Vec::new();
        for (fam, dom) in &self.families {
            match dom {
                ParamDomain::None => out.push(OperatorSymbol { family: *fam, param: None }),
                ParamDomain::Nat | ParamDomain::PositiveNat | ParamDomain::ZMod(_) => {
                    let lo = u64::from(matches!(dom, ParamDomain::PositiveNat));
                    let hi = match dom {
                        ParamDomain::ZMod(m) => (*m - 1).min(nat_cap),
                        _ => nat_cap,
                    };
                    for k in lo..=hi {
                        out.push(OperatorSymbol { family: *fam, param: Some(Scalar::Nat(k)) });
                    }
                }
                ParamDomain::UnitRational | ParamDomain::NonNegRational => {
                    for r in unit_grid(den_cap) {
                        out.push(OperatorSymbol { family: *fam, param: Some(Scalar::Rat(r)) });
                    }
                }
            }
        }
        out
    }
}

/// Rationals in `[0, 1]` with denominator at most `den_cap`, ascending.
pub fn unit_grid(den_cap: u64) -> Vec<Rational> {
    let mut v: Vec<Rational> = Vec::new();
    for d in 1..=den_cap.max(1) {
        for n in 0..=d {
            v.push(rat(n as i64, d as i64));
        }
    }
    v.sort();
    v.dedup();
    v
}

/// Modal formulas over indexed atoms `p0, p1, …`.
///
/// The core grammar is `⊥ | p | ¬φ | φ ∧ ψ | L(φ1, …, φn)`; every other
/// connective is built from these by the helper constructors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    Atom(u32),
    Bottom,
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Modal(OperatorSymbol, Vec<Formula>),
}

impl Formula {
    pub fn atom(i: u32) -> Self {
        Formula::Atom(i)
    }

    pub fn top() -> Self {
        Formula::Not(Box::new(Formula::Bottom))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(Formula::not(a), Formula::not(b)))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::and(a, Formula::not(b)))
    }

    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    /// Conjunction of a list; `⊤` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::top(),
            Some(first) => it.fold(first, Formula::and),
        }
    }

    /// Disjunction of a list; `⊥` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Formula::Bottom,
            Some(first) => it.fold(first, Formula::or),
        }
    }

    pub fn modal(op: OperatorSymbol, args: Vec<Formula>) -> Result<Self> {
        if args.len() != op.arity() {
            return Err(Error::Arity { op: op.to_string(), expected: op.arity(), got: args.len() });
        }
        Ok(Formula::Modal(op, args))
    }

    pub fn boxed(f: Formula) -> Self {
        Formula::Modal(OperatorSymbol::boxed(), vec![f])
    }

    pub fn dia(f: Formula) -> Self {
        Formula::not(Formula::boxed(Formula::not(f)))
    }

    pub fn cond(a: Formula, b: Formula) -> Self {
        Formula::Modal(OperatorSymbol::cond(), vec![a, b])
    }

    pub fn geq(k: u64, f: Formula) -> Self {
        Formula::Modal(OperatorSymbol::geq(k), vec![f])
    }

    pub fn modal_depth(&self) -> usize {
        match self {
            Formula::Atom(_) | Formula::Bottom => 0,
            Formula::Not(a) => a.modal_depth(),
            Formula::And(a, b) => a.modal_depth().max(b.modal_depth()),
            Formula::Modal(_, args) => 1 + args.iter().map(Formula::modal_depth).max().unwrap_or(0),
        }
    }

    /// Simultaneous substitution of atoms; unmapped atoms stay.
    pub fn substitute(&self, sigma: &dyn Fn(u32) -> Option<Formula>) -> Formula {
        match self {
            Formula::Atom(i) => sigma(*i).unwrap_or(Formula::Atom(*i)),
            Formula::Bottom => Formula::Bottom,
            Formula::Not(a) => Formula::not(a.substitute(sigma)),
            Formula::And(a, b) => Formula::and(a.substitute(sigma), b.substitute(sigma)),
            Formula::Modal(op, args) => {
                Formula::Modal(op.clone(), args.iter().map(|a| a.substitute(sigma)).collect())
            }
        }
    }

    /// Atom indices occurring in the formula, ascending.
    pub fn atoms(&self) -> Vec<u32> {
        let mut out = Vec::new();
        self.collect_atoms(&mut out);
        out.sort_unstable();
        out.dedup();
        out
    }

    fn collect_atoms(&self, out: &mut Vec<u32>) {
        match self {
            Formula::Atom(i) => out.push(*i),
            Formula::Bottom => {}
            Formula::Not(a) => a.collect_atoms(out),
            Formula::And(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
            Formula::Modal(_, args) => args.iter().for_each(|a| a.collect_atoms(out)),
        }
    }

    /// Operator symbols occurring in the formula.
    pub fn operators(&self) -> Vec<OperatorSymbol> {
        let mut out = Vec::new();
        self.collect_ops(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect_ops(&self, out: &mut Vec<OperatorSymbol>) {
        match self {
            Formula::Atom(_) | Formula::Bottom => {}
            Formula::Not(a) => a.collect_ops(out),
            Formula::And(a, b) => {
                a.collect_ops(out);
                b.collect_ops(out);
            }
            Formula::Modal(op, args) => {
                out.push(op.clone());
                args.iter().for_each(|a| a.collect_ops(out));
            }
        }
    }

    /// Maximal modal depth at which atom `p` occurs, if it occurs.
    pub fn atom_depth(&self, p: u32) -> Option<usize> {
        match self {
            Formula::Atom(i) => (*i == p).then_some(0),
            Formula::Bottom => None,
            Formula::Not(a) => a.atom_depth(p),
            Formula::And(a, b) => match (a.atom_depth(p), b.atom_depth(p)) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Formula::Modal(_, args) => {
                args.iter().filter_map(|a| a.atom_depth(p)).max().map(|d| d + 1)
            }
        }
    }

    /// Every atom sits under exactly one modal operator and operators do
    /// not nest.
    pub fn is_rank_one(&self) -> bool {
        match self {
            Formula::Atom(_) => false,
            Formula::Bottom => true,
            Formula::Not(a) => a.is_rank_one(),
            Formula::And(a, b) => a.is_rank_one() && b.is_rank_one(),
            Formula::Modal(_, args) => args.iter().all(|a| a.modal_depth() == 0),
        }
    }
}

//! Propositional formulas over arbitrary atoms and the entailment engine.

use std::collections::BTreeMap;
use std::fmt::Debug;

use super::sat;
use crate::error::{Error, Result};

/// Atoms of propositional formulas. Atoms of different universes (for
/// instance subsets of carriers of different size) must not be mixed.
pub trait PropAtom: Clone + Ord + Debug {
    fn universe(&self) -> u64 {
        0
    }
}

impl PropAtom for u32 {}
impl PropAtom for usize {}

/// Boolean formula over atoms of type `A`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Prop<A> {
    Atom(A),
    Bottom,
    Not(Box<Prop<A>>),
    And(Box<Prop<A>>, Box<Prop<A>>),
}

impl<A: Clone> Prop<A> {
    pub fn atom(a: A) -> Self {
        Prop::Atom(a)
    }

    pub fn top() -> Self {
        Prop::Not(Box::new(Prop::Bottom))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(p: Prop<A>) -> Self {
        match p {
            Prop::Not(inner) => *inner,
            p => Prop::Not(Box::new(p)),
        }
    }

    pub fn and(a: Prop<A>, b: Prop<A>) -> Self {
        Prop::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Prop<A>, b: Prop<A>) -> Self {
        Prop::not(Prop::and(Prop::not(a), Prop::not(b)))
    }

    pub fn implies(a: Prop<A>, b: Prop<A>) -> Self {
        Prop::not(Prop::and(a, Prop::not(b)))
    }

    pub fn iff(a: Prop<A>, b: Prop<A>) -> Self {
        Prop::and(Prop::implies(a.clone(), b.clone()), Prop::implies(b, a))
    }

    pub fn and_all(items: impl IntoIterator<Item = Prop<A>>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Prop::top(),
            Some(first) => it.fold(first, Prop::and),
        }
    }

    pub fn or_all(items: impl IntoIterator<Item = Prop<A>>) -> Self {
        let mut it = items.into_iter();
        match it.next() {
            None => Prop::Bottom,
            Some(first) => it.fold(first, Prop::or),
        }
    }

    /// A literal: the atom or its negation.
    pub fn literal(a: A, positive: bool) -> Self {
        if positive {
            Prop::Atom(a)
        } else {
            Prop::Not(Box::new(Prop::Atom(a)))
        }
    }

    pub fn eval(&self, val: &mut dyn FnMut(&A) -> bool) -> bool {
        match self {
            Prop::Atom(a) => val(a),
            Prop::Bottom => false,
            Prop::Not(p) => !p.eval(val),
            Prop::And(p, q) => p.eval(val) && q.eval(val),
        }
    }

    pub fn try_eval<E>(&self, val: &mut dyn FnMut(&A) -> Result<bool, E>) -> Result<bool, E> {
        Ok(match self {
            Prop::Atom(a) => val(a)?,
            Prop::Bottom => false,
            Prop::Not(p) => !p.try_eval(val)?,
            Prop::And(p, q) => p.try_eval(val)? && q.try_eval(val)?,
        })
    }

    pub fn map<B: Clone>(&self, f: &mut dyn FnMut(&A) -> B) -> Prop<B> {
        match self {
            Prop::Atom(a) => Prop::Atom(f(a)),
            Prop::Bottom => Prop::Bottom,
            Prop::Not(p) => Prop::Not(Box::new(p.map(f))),
            Prop::And(p, q) => Prop::And(Box::new(p.map(f)), Box::new(q.map(f))),
        }
    }

    pub fn for_each_atom(&self, f: &mut dyn FnMut(&A)) {
        match self {
            Prop::Atom(a) => f(a),
            Prop::Bottom => {}
            Prop::Not(p) => p.for_each_atom(f),
            Prop::And(p, q) => {
                p.for_each_atom(f);
                q.for_each_atom(f);
            }
        }
    }
}

impl<A: Clone + Ord> Prop<A> {
    /// Distinct atoms in ascending order.
    pub fn atoms(&self) -> Vec<A> {
        let mut out = Vec::new();
        self.for_each_atom(&mut |a| out.push(a.clone()));
        out.sort();
        out.dedup();
        out
    }
}

/// Largest atom count handled by truth tables.
pub const TRUTH_TABLE_LIMIT: usize = 20;

/// Decision backend for [`prop_entails_with`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    /// Truth tables up to [`TRUTH_TABLE_LIMIT`] atoms, DPLL beyond.
    Auto,
    TruthTable,
    Dpll,
}

/// Dense atom numbering shared by a set of formulas.
#[derive(Clone, Debug)]
pub struct AtomIndex<A> {
    atoms: Vec<A>,
    pos: BTreeMap<A, usize>,
}

impl<A: PropAtom> AtomIndex<A> {
    pub fn new() -> Self {
        AtomIndex { atoms: Vec::new(), pos: BTreeMap::new() }
    }

    pub fn from_formulas<'a>(fs: impl IntoIterator<Item = &'a Prop<A>>) -> Result<Self>
    where
        A: 'a,
    {
        let mut idx = AtomIndex::new();
        for f in fs {
            idx.add_formula(f);
        }
        idx.atoms.sort();
        idx.pos = idx.atoms.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        idx.check_universe()?;
        Ok(idx)
    }

    fn add_formula(&mut self, f: &Prop<A>) {
        f.for_each_atom(&mut |a| {
            if !self.pos.contains_key(a) {
                self.pos.insert(a.clone(), self.atoms.len());
                self.atoms.push(a.clone());
            }
        });
    }

    pub fn insert(&mut self, a: A) -> usize {
        if let Some(i) = self.pos.get(&a) {
            return *i;
        }
        self.pos.insert(a.clone(), self.atoms.len());
        self.atoms.push(a);
        self.atoms.len() - 1
    }

    fn check_universe(&self) -> Result<()> {
        if let Some(first) = self.atoms.first() {
            let u = first.universe();
            if let Some(bad) = self.atoms.iter().find(|a| a.universe() != u) {
                return Err(Error::AtomUniverseMismatch(format!(
                    "{first:?} and {bad:?} belong to different universes"
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn get(&self, a: &A) -> Option<usize> {
        self.pos.get(a).copied()
    }

    pub fn atoms(&self) -> &[A] {
        &self.atoms
    }
}

impl<A: PropAtom> Default for AtomIndex<A> {
    fn default() -> Self {
        Self::new()
    }
}

/// A set of assignments to `n` atoms stored as a bit table of size `2^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Table {
    n: usize,
    words: Vec<u64>,
}

impl Table {
    fn words_for(n: usize) -> usize {
        if n <= 6 {
            1
        } else {
            1 << (n - 6)
        }
    }

    fn mask(n: usize) -> u64 {
        if n >= 6 {
            u64::MAX
        } else {
            (1u64 << (1u64 << n)) - 1
        }
    }

    pub fn full(n: usize) -> Self {
        let mut words = vec![u64::MAX; Self::words_for(n)];
        words[0] &= Self::mask(n);
        Table { n, words }
    }

    pub fn empty(n: usize) -> Self {
        Table { n, words: vec![0; Self::words_for(n)] }
    }

    /// Assignments in which atom `i` is true.
    pub fn column(n: usize, i: usize) -> Self {
        let mut t = Table::empty(n);
        if i < 6 {
            const PATTERNS: [u64; 6] = [
                0xAAAA_AAAA_AAAA_AAAA,
                0xCCCC_CCCC_CCCC_CCCC,
                0xF0F0_F0F0_F0F0_F0F0,
                0xFF00_FF00_FF00_FF00,
                0xFFFF_0000_FFFF_0000,
                0xFFFF_FFFF_0000_0000,
            ];
            let m = Self::mask(n);
            for w in t.words.iter_mut() {
                *w = PATTERNS[i] & m;
            }
        } else {
            let stride = 1usize << (i - 6);
            for (k, w) in t.words.iter_mut().enumerate() {
                if (k / stride) % 2 == 1 {
                    *w = u64::MAX;
                }
            }
        }
        t
    }

    pub fn not(&self) -> Self {
        let m = Self::mask(self.n);
        Table { n: self.n, words: self.words.iter().map(|w| !w & m).collect() }
    }

    pub fn and_assign(&mut self, other: &Table) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn intersects(&self, other: &Table) -> bool {
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    pub fn count(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Row indices (assignments as bit masks) in the table.
    pub fn rows(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(k, w)| {
            let mut w = *w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(k as u64 * 64 + b)
            })
        })
    }
}

/// Evaluates a formula to the table of its models.
pub fn table_of<A: PropAtom>(f: &Prop<A>, idx: &AtomIndex<A>, cols: &mut Vec<Option<Table>>) -> Table {
    let n = idx.len();
    match f {
        Prop::Atom(a) => {
            let i = idx.get(a).expect("atom indexed");
            if cols.len() < n {
                cols.resize(n, None);
            }
            cols[i].get_or_insert_with(|| Table::column(n, i)).clone()
        }
        Prop::Bottom => Table::empty(n),
        Prop::Not(p) => table_of(p, idx, cols).not(),
        Prop::And(p, q) => {
            let mut t = table_of(p, idx, cols);
            if !t.is_empty() {
                t.and_assign(&table_of(q, idx, cols));
            }
            t
        }
    }
}

/// `assumptions ⊨ goal` over the atoms occurring in either.
pub fn prop_entails<A: PropAtom>(assumptions: &[Prop<A>], goal: &Prop<A>) -> Result<bool> {
    prop_entails_with(assumptions, goal, Backend::Auto)
}

pub fn prop_entails_with<A: PropAtom>(
    assumptions: &[Prop<A>],
    goal: &Prop<A>,
    backend: Backend,
) -> Result<bool> {
    let idx = AtomIndex::from_formulas(assumptions.iter().chain(std::iter::once(goal)))?;
    let use_table = match backend {
        Backend::Auto => idx.len() <= TRUTH_TABLE_LIMIT,
        Backend::TruthTable => {
            if idx.len() > TRUTH_TABLE_LIMIT {
                return Err(Error::Budget(format!(
                    "{} atoms exceed the truth-table limit {TRUTH_TABLE_LIMIT}",
                    idx.len()
                )));
            }
            true
        }
        Backend::Dpll => false,
    };
    if use_table {
        let mut cols = Vec::new();
        let mut models = Table::full(idx.len());
        for a in assumptions {
            models.and_assign(&table_of(a, &idx, &mut cols));
            if models.is_empty() {
                return Ok(true);
            }
        }
        let counter = table_of(&Prop::not(goal.clone()), &idx, &mut cols);
        Ok(!models.intersects(&counter))
    } else {
        let mut cnf = sat::Cnf::new(idx.len());
        for a in assumptions {
            let l = cnf.encode(a, &idx);
            cnf.add(vec![l]);
        }
        let g = cnf.encode(goal, &idx);
        cnf.add(vec![-g]);
        Ok(!cnf.solve())
    }
}

/// `Φ` is consistent: `¬⋀Φ` is not a tautology.
pub fn prop_satisfiable<A: PropAtom>(fs: &[Prop<A>]) -> Result<bool> {
    prop_entails(fs, &Prop::Bottom).map(|e| !e)
}

/// A fixed theory whose models are cached, for many consistency queries
/// against the same assumptions.
#[derive(Clone, Debug)]
pub struct CompiledTheory<A> {
    idx: AtomIndex<A>,
    models: Table,
    cols: Vec<Option<Table>>,
}

impl<A: PropAtom> CompiledTheory<A> {
    /// Compiles `theory` over its own atoms together with `extra_atoms`.
    pub fn new(theory: &[Prop<A>], extra_atoms: impl IntoIterator<Item = A>) -> Result<Self> {
        let mut atoms: Vec<A> = Vec::new();
        for f in theory {
            f.for_each_atom(&mut |a| atoms.push(a.clone()));
        }
        atoms.extend(extra_atoms);
        atoms.sort();
        atoms.dedup();
        let mut idx = AtomIndex::new();
        for a in atoms {
            idx.insert(a);
        }
        idx.check_universe()?;
        if idx.len() > TRUTH_TABLE_LIMIT {
            return Err(Error::Budget(format!(
                "{} one-step atoms exceed the truth-table limit {TRUTH_TABLE_LIMIT}",
                idx.len()
            )));
        }
        let mut cols = Vec::new();
        let mut models = Table::full(idx.len());
        for f in theory {
            models.and_assign(&table_of(f, &idx, &mut cols));
        }
        Ok(CompiledTheory { idx, models, cols })
    }

    pub fn atoms(&self) -> &[A] {
        self.idx.atoms()
    }

    /// Models of the theory.
    pub fn models(&self) -> &Table {
        &self.models
    }

    pub fn table(&mut self, f: &Prop<A>) -> Result<Table> {
        let mut missing = None;
        f.for_each_atom(&mut |a| {
            if self.idx.get(a).is_none() {
                missing = Some(a.clone());
            }
        });
        if let Some(a) = missing {
            return Err(Error::AtomUniverseMismatch(format!("{a:?} not in the compiled theory")));
        }
        Ok(table_of(f, &self.idx, &mut self.cols))
    }

    /// Theory together with `fs` is satisfiable.
    pub fn consistent_with(&mut self, fs: &[Prop<A>]) -> Result<bool> {
        let mut m = self.models.clone();
        for f in fs {
            m.and_assign(&self.table(f)?);
            if m.is_empty() {
                return Ok(false);
            }
        }
        Ok(!m.is_empty())
    }

    /// Theory entails `goal`.
    pub fn entails(&mut self, goal: &Prop<A>) -> Result<bool> {
        let t = self.table(goal)?;
        Ok(!self.models.intersects(&t.not()))
    }

    /// Restricts the cached models to those of `f`.
    pub fn assume(&mut self, f: &Prop<A>) -> Result<()> {
        let t = self.table(f)?;
        self.models.and_assign(&t);
        Ok(())
    }

    /// Value of atom `a` in model row `row`.
    pub fn atom_in_row(&self, a: &A, row: u64) -> Option<bool> {
        self.idx.get(a).map(|i| row >> i & 1 == 1)
    }
}

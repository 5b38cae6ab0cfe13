use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::formula::{Family, Formula, OperatorSymbol};
use crate::logic::{Logic, OneStepAtom};
use crate::onestep::all_atoms;
use num_integer::Integer;

use crate::semantics::{enumerate_tvalues, Caps, FunctorKind, Monoid, StateSet, TValue};

/// Default bound on closure size and on the atoms of a single level.
pub const CLOSURE_CAP: usize = 1 << 16;
/// Default bound on the values scanned when realizing one level.
pub const VALUE_CAP: usize = 1 << 20;

/// The formulas of modal depth at most `depth` over `p0, …, p{props-1}`
/// built from `ops`.
#[derive(Clone, Debug)]
pub struct Fragment {
    pub logic: Logic,
    pub ops: Vec<OperatorSymbol>,
    pub props: u32,
    pub depth: usize,
    /// Enumeration caps; `mult` also bounds grades and `den` denominators
    /// of the operator budget.
    pub caps: Caps,
    /// Conditions enforced on every instance that fits in the fragment.
    pub frame_conditions: Vec<Formula>,
    pub closure_cap: usize,
    pub value_cap: usize,
}

impl Fragment {
    /// Operators of the logic within `caps`, frame conditions of the logic
    /// with graded families up to `caps.mult`.
    pub fn new(logic: Logic, props: u32, depth: usize, caps: Caps) -> Self {
        let ops = fragment_operators(&logic, &caps);
        let frame_conditions = logic.frame_conditions(caps.mult);
        Fragment { logic, ops, props, depth, caps, frame_conditions, closure_cap: CLOSURE_CAP, value_cap: VALUE_CAP }
    }

    /// Caps under which enumerating values over `n` states realizes every
    /// combination of the fragment's atoms: natural measures need values
    /// past the largest index on each of `n` states, probabilities need
    /// points strictly between grid points. The probabilistic cases are
    /// exact for two states and cap-relative beyond.
    pub fn realization_caps(&self, n: usize) -> Caps {
        let c = &self.caps;
        let grid_lcm = (1..=c.den.max(1)).fold(1u64, |acc, d| acc.lcm(&d));
        match &self.logic.functor {
            FunctorKind::AddMeasure(Monoid::Nat) | FunctorKind::BoundedMeasure => {
                Caps { mult: (c.mult + 1) * n.max(1) as u64, ..c.clone() }
            }
            FunctorKind::Distribution => Caps { den: 2 * grid_lcm, ..c.clone() },
            FunctorKind::ExactProb => Caps { den: grid_lcm, ..c.clone() },
            _ => c.clone(),
        }
    }

    /// The same budgets at another depth.
    pub fn at_depth(&self, depth: usize) -> Fragment {
        Fragment { depth, ..self.clone() }
    }
}

/// Operators of the logic's signature within `caps`; `≥0` is dropped as it
/// holds everywhere.
pub fn fragment_operators(logic: &Logic, caps: &Caps) -> Vec<OperatorSymbol> {
    logic
        .sig
        .symbols(caps.mult, caps.den)
        .into_iter()
        .filter(|op| logic.functor.interprets(op))
        .filter(|op| !(op.family() == Family::Geq && op.grade() == Some(0)))
        .collect()
}

/// A maximally consistent set of a level: the true propositions and the
/// true modal atoms, indexed into the level's atom list.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mcs {
    pub props: StateSet,
    pub profile: StateSet,
}

/// One level `S_k` of the tower.
#[derive(Clone, Debug)]
pub struct Level {
    pub states: Vec<Mcs>,
    /// Modal atoms over `S_{k-1}`, sorted; empty at level 0.
    pub atoms: Vec<OneStepAtom>,
    index: HashMap<OneStepAtom, usize>,
    /// `p_k: S_k → S_{k-1}`; empty at level 0.
    pub projection: Vec<usize>,
    /// Profiles realized by some value over `S_{k-1}`, in order of first
    /// realization; the first and last realizing values in enumeration
    /// order.
    pub profiles: Vec<(StateSet, TValue, TValue)>,
    lookup: HashMap<Mcs, usize>,
}

impl Level {
    fn new(states: Vec<Mcs>, atoms: Vec<OneStepAtom>, projection: Vec<usize>, profiles: Vec<(StateSet, TValue, TValue)>) -> Self {
        let index = atoms.iter().cloned().enumerate().map(|(i, a)| (a, i)).collect();
        let lookup = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        Level { states, atoms, index, projection, profiles, lookup }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn atom_index(&self, a: &OneStepAtom) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn position(&self, m: &Mcs) -> Option<usize> {
        self.lookup.get(m).copied()
    }

    /// Preimage of a set of the level below.
    pub fn preimage(&self, a: &StateSet) -> StateSet {
        a.preimage(&self.projection)
    }

    /// Fibers of the projection, one per state of the level below.
    pub fn fibers(&self, below: usize) -> Vec<StateSet> {
        let mut out = vec![StateSet::new(); below];
        for (i, p) in self.projection.iter().enumerate() {
            out[*p].insert(i);
        }
        out
    }

    fn retain(&mut self, keep: &[bool]) {
        let mut states = Vec::new();
        let mut projection = Vec::new();
        for (i, s) in self.states.iter().enumerate() {
            if keep[i] {
                states.push(s.clone());
                if !self.projection.is_empty() {
                    projection.push(self.projection[i]);
                }
            }
        }
        self.lookup = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        self.states = states;
        self.projection = projection;
    }
}

/// The levels `S_0, …, S_n` of a fragment.
#[derive(Clone, Debug)]
pub struct Tower {
    pub fragment: Fragment,
    levels: Vec<Level>,
}

/// `S_0 … S_n`: prop assignments at level 0; at level `k+1` every
/// combination of a prop assignment with a one-step profile realized over
/// `S_k`, kept when it restricts to a member of `S_k` and satisfies the
/// frame-condition instances that fit at that depth.
pub fn enumerate_mcs(fragment: &Fragment) -> Result<Tower> {
    if fragment.props > 16 {
        return Err(Error::Budget(format!("{} propositions", fragment.props)));
    }
    let mut tower = Tower { fragment: fragment.clone(), levels: Vec::new() };
    let states: Vec<Mcs> = (0..1u64 << fragment.props)
        .map(|m| Mcs { props: StateSet::from_mask(m), profile: StateSet::new() })
        .collect();
    tower.levels.push(Level::new(states, vec![], vec![], vec![]));
    tower.filter_frames(0)?;
    for k in 1..=fragment.depth {
        let level = tower.realize(k)?;
        tower.levels.push(level);
        tower.filter_frames(k)?;
    }
    Ok(tower)
}

impl Tower {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn level(&self, k: usize) -> &Level {
        &self.levels[k]
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    /// `|S_0|, …, |S_n|`.
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Level::len).collect()
    }

    fn realize(&self, k: usize) -> Result<Level> {
        let f = &self.fragment;
        let below = &self.levels[k - 1];
        let n = below.len();
        let mut total: usize = 0;
        for op in &f.ops {
            let bits = n.checked_mul(op.arity()).filter(|b| *b < 40);
            total = bits
                .and_then(|b| total.checked_add(1usize << b))
                .filter(|t| *t <= f.closure_cap)
                .ok_or_else(|| Error::Budget(format!("level {k} has more than {} modal atoms", f.closure_cap)))?;
        }
        let atoms = all_atoms(&f.ops, n)?;
        let mut seen: HashMap<StateSet, usize> = HashMap::new();
        let mut profiles: Vec<(StateSet, TValue, TValue)> = Vec::new();
        for (scanned, t) in enumerate_tvalues(&f.logic.functor, n, &f.realization_caps(n))?.enumerate() {
            if scanned >= f.value_cap {
                return Err(Error::Budget(format!("more than {} values over {n} states", f.value_cap)));
            }
            let mut profile = StateSet::new();
            for (i, a) in atoms.iter().enumerate() {
                if f.logic.functor.lifting_contains(a.op(), a.args(), &t)? {
                    profile.insert(i);
                }
            }
            match seen.get(&profile) {
                Some(&j) => profiles[j].2 = t,
                None => {
                    seen.insert(profile.clone(), profiles.len());
                    profiles.push((profile, t.clone(), t));
                }
            }
        }
        let mut level = Level::new(vec![], atoms, vec![], profiles);
        let mut states = Vec::new();
        let mut projection = Vec::new();
        for props in 0..1u64 << f.props {
            for (profile, _, _) in &level.profiles {
                let m = Mcs { props: StateSet::from_mask(props), profile: profile.clone() };
                if let Some(p) = self.restrict(k, &level, &m)? {
                    states.push(m);
                    projection.push(p);
                }
            }
        }
        level.lookup = states.iter().cloned().enumerate().map(|(i, s)| (s, i)).collect();
        level.states = states;
        level.projection = projection;
        Ok(level)
    }

    /// Index in `S_{k-1}` of the restriction of `m ∈ S_k` to the smaller
    /// fragment, or `None` when the restriction is not a member.
    fn restrict(&self, k: usize, level: &Level, m: &Mcs) -> Result<Option<usize>> {
        let below = &self.levels[k - 1];
        let mut profile = StateSet::new();
        if k >= 2 {
            let n = below.len();
            for (i, a) in below.atoms.iter().enumerate() {
                let args = a.args().iter().map(|s| below.preimage(s)).collect();
                let lifted = OneStepAtom::new(a.op().clone(), args, n)?;
                let j = level
                    .atom_index(&lifted)
                    .ok_or_else(|| Error::Precondition(format!("{lifted} is missing from level {k}")))?;
                if m.profile.contains(j) {
                    profile.insert(i);
                }
            }
        }
        Ok(below.position(&Mcs { props: m.props.clone(), profile }))
    }

    /// Drops members of `S_k` falsifying a frame-condition instance whose
    /// substituted variables range over definable sets of the deepest
    /// level that keeps the instance inside the fragment.
    fn filter_frames(&mut self, k: usize) -> Result<()> {
        let conditions = self.fragment.frame_conditions.clone();
        let mut keep = vec![true; self.levels[k].len()];
        for theta in &conditions {
            let d = theta.modal_depth();
            if d > k {
                continue;
            }
            let j = k - d;
            let vars = theta.atoms();
            let m = self.levels[j].len();
            let per_var = 1u64.checked_shl(m as u32).filter(|_| m < 32);
            let count = per_var
                .and_then(|p| p.checked_pow(vars.len() as u32))
                .filter(|c| *c <= self.fragment.closure_cap as u64)
                .ok_or_else(|| Error::Budget(format!("too many instances of a frame condition at level {k}")))?;
            for code in 0..count {
                let mut c = code;
                let mut sigma = HashMap::new();
                for v in &vars {
                    sigma.insert(*v, StateSet::from_mask(c % per_var.expect("checked")));
                    c /= per_var.expect("checked");
                }
                let ext = Eval::with_sigma(self, j, sigma).extension(k, theta)?;
                for (i, flag) in keep.iter_mut().enumerate() {
                    if !ext.contains(i) {
                        *flag = false;
                    }
                }
            }
        }
        self.levels[k].retain(&keep);
        Ok(())
    }

    /// `φ̂ ∩ S_k`: members of `S_k` containing `φ`.
    pub fn extension(&self, k: usize, f: &Formula) -> Result<StateSet> {
        Eval::new(self).extension(k, f)
    }

    /// Whether member `i` of `S_k` contains `φ`.
    pub fn contains(&self, k: usize, i: usize, f: &Formula) -> Result<bool> {
        Ok(self.extension(k, f)?.contains(i))
    }

    /// Image of member `i` of `S_k` in `S_j`, for `j ≤ k`.
    pub fn project(&self, k: usize, i: usize, j: usize) -> Result<usize> {
        if j > k || k > self.depth() {
            return Err(Error::Precondition(format!("cannot project level {k} to level {j}")));
        }
        if i >= self.levels[k].len() {
            return Err(Error::UnknownState(format!("#{i} of level {k}")));
        }
        let mut x = i;
        for l in (j + 1..=k).rev() {
            x = self.levels[l].projection[x];
        }
        Ok(x)
    }

    /// Whether `p_k: S_k → S_{k-1}` is onto.
    pub fn surjective(&self, k: usize) -> bool {
        k == 0 || self.levels[k].fibers(self.levels[k - 1].len()).iter().all(|f| !f.is_empty())
    }

    /// Whether `c ⊆ S_k` is the preimage of a set of `S_{k-1}`.
    fn from_below(&self, k: usize, c: &StateSet) -> Option<StateSet> {
        if k == 0 {
            return None;
        }
        let level = &self.levels[k];
        let image = c.image(&level.projection);
        (level.preimage(&image) == *c).then_some(image)
    }

    /// Canonical formula defining `c ⊆ S_k`: `⊥`, `⊤`, the representative of
    /// the set below when `c` is a preimage, else the disjunction of the
    /// characteristic conjunctions of its members.
    pub fn representative(&self, k: usize, c: &StateSet) -> Formula {
        let n = self.levels[k].len();
        if c.is_empty() {
            return Formula::Bottom;
        }
        if *c == StateSet::full(n) {
            return Formula::top();
        }
        if let Some(below) = self.from_below(k, c) {
            return self.representative(k - 1, &below);
        }
        Formula::or_all(c.iter().map(|i| self.characteristic(k, i)))
    }

    /// Conjunction of the literals deciding member `i` of `S_k`.
    pub fn characteristic(&self, k: usize, i: usize) -> Formula {
        let level = &self.levels[k];
        let m = &level.states[i];
        let mut lits: Vec<Formula> = (0..self.fragment.props)
            .map(|p| {
                let a = Formula::atom(p);
                if m.props.contains(p as usize) {
                    a
                } else {
                    Formula::not(a)
                }
            })
            .collect();
        for (j, a) in level.atoms.iter().enumerate() {
            let args = a.args().iter().map(|s| self.representative(k - 1, s)).collect();
            let f = Formula::Modal(a.op().clone(), args);
            lits.push(if m.profile.contains(j) { f } else { Formula::not(f) });
        }
        Formula::and_all(lits)
    }

    /// The atoms every fragment formula is a boolean combination of:
    /// propositions, then per level the modal atoms over representatives
    /// that do not already occur at a lower level.
    pub fn closure(&self) -> Result<Vec<Formula>> {
        let mut out: Vec<Formula> = (0..self.fragment.props).map(Formula::atom).collect();
        for k in 1..=self.depth() {
            for a in &self.levels[k].atoms {
                if k >= 2 && a.args().iter().all(|s| self.from_below(k - 1, s).is_some()) {
                    continue;
                }
                let args = a.args().iter().map(|s| self.representative(k - 1, s)).collect();
                out.push(Formula::Modal(a.op().clone(), args));
                if out.len() > self.fragment.closure_cap {
                    return Err(Error::Budget(format!("closure exceeds {} formulas", self.fragment.closure_cap)));
                }
            }
        }
        Ok(out)
    }
}

/// The fragment's closure atoms.
pub fn closure(fragment: &Fragment) -> Result<Vec<Formula>> {
    enumerate_mcs(fragment)?.closure()
}

/// Membership of formulas in the members of each level.
struct Eval<'a> {
    tower: &'a Tower,
    /// Variables read as definable sets of the given level.
    sigma: Option<(usize, HashMap<u32, StateSet>)>,
    cache: HashMap<(usize, Formula), StateSet>,
}

impl<'a> Eval<'a> {
    fn new(tower: &'a Tower) -> Self {
        Eval { tower, sigma: None, cache: HashMap::new() }
    }

    fn with_sigma(tower: &'a Tower, level: usize, sigma: HashMap<u32, StateSet>) -> Self {
        Eval { tower, sigma: Some((level, sigma)), cache: HashMap::new() }
    }

    fn extension(&mut self, k: usize, f: &Formula) -> Result<StateSet> {
        if k > self.tower.depth() {
            return Err(Error::Precondition(format!("level {k} is beyond the fragment")));
        }
        let level = &self.tower.levels[k];
        let n = level.len();
        let s = match f {
            Formula::Atom(p) => match &self.sigma {
                Some((j, sigma)) => {
                    let target = sigma.get(p).ok_or(Error::UndefinedProp(*p))?;
                    if k < *j {
                        return Err(Error::Precondition(format!("p{p} is read below level {j}")));
                    }
                    let mut out = StateSet::new();
                    for i in 0..n {
                        if target.contains(self.tower.project(k, i, *j)?) {
                            out.insert(i);
                        }
                    }
                    out
                }
                None => {
                    if *p >= self.tower.fragment.props {
                        return Err(Error::UndefinedProp(*p));
                    }
                    (0..n).filter(|i| level.states[*i].props.contains(*p as usize)).collect()
                }
            },
            Formula::Bottom => StateSet::new(),
            Formula::Not(a) => self.extension(k, a)?.complement(n),
            Formula::And(a, b) => self.extension(k, a)?.intersection(&self.extension(k, b)?),
            Formula::Modal(op, args) => {
                if k == 0 {
                    return Err(Error::Precondition(format!("{op} exceeds the fragment's depth")));
                }
                let sets = args.iter().map(|a| self.argument(k - 1, a)).collect::<Result<Vec<_>>>()?;
                let atom = OneStepAtom::new(op.clone(), sets, self.tower.levels[k - 1].len())?;
                let j = level
                    .atom_index(&atom)
                    .ok_or_else(|| Error::Precondition(format!("{op} is outside the fragment's operators")))?;
                (0..n).filter(|i| level.states[*i].profile.contains(j)).collect()
            }
        };
        Ok(s)
    }

    /// Modal arguments recur across atoms, so only they are cached.
    fn argument(&mut self, k: usize, f: &Formula) -> Result<StateSet> {
        let key = (k, f.clone());
        if let Some(s) = self.cache.get(&key) {
            return Ok(s.clone());
        }
        let s = self.extension(k, f)?;
        self.cache.insert(key, s.clone());
        Ok(s)
    }
}

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use super::stateset::StateSet;
use crate::error::{Error, Result};
use crate::formula::{rat_to_string, Rational, Scalar};

/// Multiplicity in `ℕ ∪ {∞}`. `Inf` compares above every natural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Mult {
    Fin(u64),
    Inf,
}

impl Mult {
    pub fn add(self, other: Mult) -> Mult {
        match (self, other) {
            (Mult::Fin(a), Mult::Fin(b)) => a.checked_add(b).map_or(Mult::Inf, Mult::Fin),
            _ => Mult::Inf,
        }
    }

    pub fn at_least(self, k: u64) -> bool {
        match self {
            Mult::Fin(n) => n >= k,
            Mult::Inf => true,
        }
    }

    pub fn is_zero(self) -> bool {
        self == Mult::Fin(0)
    }
}

impl fmt::Display for Mult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mult::Fin(n) => write!(f, "{n}"),
            Mult::Inf => f.write_str("inf"),
        }
    }
}

fn local_mask(support: &[usize], b: &StateSet) -> u64 {
    let mut m = 0;
    for (i, x) in support.iter().enumerate() {
        if b.contains(*x) {
            m |= 1 << i;
        }
    }
    m
}

fn expand(support: &[usize], mask: u64) -> StateSet {
    support.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, x)| *x).collect()
}

/// Splits `f ∘ support` into its sorted distinct image and the map from
/// local positions into that image.
fn collapse(support: &[usize], f: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let mut image: Vec<usize> = support.iter().map(|x| f[*x]).collect();
    image.sort_unstable();
    image.dedup();
    let g = support.iter().map(|x| image.binary_search(&f[*x]).expect("in image")).collect();
    (image, g)
}

/// Largest support for which tables over all subsets are materialized.
pub const MAX_TABLE_SUPPORT: usize = 20;

/// A selection function `P(X) → P(X)` that only depends on, and only
/// returns, states in `support`.
///
/// `table[m]` is the local mask of `f(B)` for the local mask `m` of
/// `B ∩ support`. Explicit selection functions over `X` use the whole
/// carrier as support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Selection {
    support: Vec<usize>,
    table: Vec<u64>,
}

impl Selection {
    pub fn new(support: Vec<usize>, table: Vec<u64>) -> Result<Self> {
        if support.len() > MAX_TABLE_SUPPORT {
            return Err(Error::Budget(format!("selection over {} states", support.len())));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidValue("selection support must be strictly increasing".into()));
        }
        if table.len() != 1 << support.len() {
            return Err(Error::InvalidValue(format!(
                "selection table needs {} entries, got {}",
                1u64 << support.len(),
                table.len()
            )));
        }
        let full = (1u64 << support.len()) - 1;
        if table.iter().any(|m| m & !full != 0) {
            return Err(Error::InvalidValue("selection value outside its support".into()));
        }
        Ok(Selection { support, table })
    }

    /// Selection over `{0, …, n-1}` given by `table[mask(B)] = mask(f(B))`.
    pub fn explicit(n: usize, table: Vec<u64>) -> Result<Self> {
        Selection::new((0..n).collect(), table)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    pub fn table(&self) -> &[u64] {
        &self.table
    }

    pub fn apply(&self, b: &StateSet) -> StateSet {
        expand(&self.support, self.table[local_mask(&self.support, b) as usize])
    }

    /// `𝒮(f)(s)(B) = f[s(f⁻¹[B])]`.
    pub fn push(&self, f: &[usize]) -> Selection {
        let (image, g) = collapse(&self.support, f);
        let k = image.len();
        let mut table = vec![0u64; 1 << k];
        for (c, out) in table.iter_mut().enumerate() {
            let mut pre = 0u64;
            for (i, gi) in g.iter().enumerate() {
                if c >> gi & 1 == 1 {
                    pre |= 1 << i;
                }
            }
            let val = self.table[pre as usize];
            let mut img = 0u64;
            for (i, gi) in g.iter().enumerate() {
                if val >> i & 1 == 1 {
                    img |= 1 << gi;
                }
            }
            *out = img;
        }
        Selection { support: image, table }
    }

    /// The same function with support `{0, …, n-1}`.
    pub fn to_explicit(&self, n: usize) -> Result<Selection> {
        if n > MAX_TABLE_SUPPORT {
            return Err(Error::Budget(format!("explicit selection over {n} states")));
        }
        let table = (0..1u64 << n)
            .map(|m| self.apply(&StateSet::from_mask(m)).mask())
            .collect();
        Ok(Selection { support: (0..n).collect(), table })
    }
}

/// A partial measure: `B` is measurable iff the local mask of `B ∩ support`
/// is in `domain`, and then has that measure.
///
/// Explicit measures over `X` use the whole carrier as support; the
/// pushforward along a map keeps the support small.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Measure {
    support: Vec<usize>,
    domain: BTreeMap<u64, Scalar>,
}

impl Measure {
    pub fn new(support: Vec<usize>, domain: BTreeMap<u64, Scalar>) -> Result<Self> {
        if support.len() > 63 {
            return Err(Error::Budget(format!("measure over {} states", support.len())));
        }
        if support.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidValue("measure support must be strictly increasing".into()));
        }
        let full = (1u64 << support.len()) - 1;
        if domain.keys().any(|m| m & !full != 0) {
            return Err(Error::InvalidValue("measurable set outside the support".into()));
        }
        Ok(Measure { support, domain })
    }

    pub fn explicit(n: usize, domain: BTreeMap<u64, Scalar>) -> Result<Self> {
        Measure::new((0..n).collect(), domain)
    }

    pub fn support(&self) -> &[usize] {
        &self.support
    }

    /// Local masks of the measurable sets with their measures.
    pub fn domain(&self) -> &BTreeMap<u64, Scalar> {
        &self.domain
    }

    pub fn measure_of(&self, b: &StateSet) -> Option<&Scalar> {
        self.domain.get(&local_mask(&self.support, b))
    }

    /// Measurable sets as subsets of the carrier, with measures.
    pub fn sets(&self) -> impl Iterator<Item = (StateSet, &Scalar)> + '_ {
        self.domain.iter().map(|(m, v)| (expand(&self.support, *m), v))
    }

    /// `T f(𝔄, μ) = ({C | f⁻¹[C] ∈ 𝔄}, C ↦ μ(f⁻¹[C]))`.
    pub fn push(&self, f: &[usize]) -> Measure {
        let (image, g) = collapse(&self.support, f);
        let k = image.len();
        let mut domain = BTreeMap::new();
        for c in 0..1u64 << k {
            let mut pre = 0u64;
            for (i, gi) in g.iter().enumerate() {
                if c >> gi & 1 == 1 {
                    pre |= 1 << i;
                }
            }
            if let Some(v) = self.domain.get(&pre) {
                domain.insert(c, v.clone());
            }
        }
        Measure { support: image, domain }
    }

    pub fn to_explicit(&self, n: usize) -> Result<Measure> {
        if n > MAX_TABLE_SUPPORT {
            return Err(Error::Budget(format!("explicit measure over {n} states")));
        }
        let mut domain = BTreeMap::new();
        for m in 0..1u64 << n {
            if let Some(v) = self.measure_of(&StateSet::from_mask(m)) {
                domain.insert(m, v.clone());
            }
        }
        Ok(Measure { support: (0..n).collect(), domain })
    }
}

/// An element of `TX` for one of the supported functors.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum TValue {
    Subset(StateSet),
    /// Multiplicities; absent states have multiplicity 0.
    Multiset(BTreeMap<usize, Mult>),
    Selection(Selection),
    /// Weights; absent states have weight 0.
    Distribution(BTreeMap<usize, Rational>),
    Measure(Measure),
}

impl TValue {
    pub fn multiset(entries: impl IntoIterator<Item = (usize, Mult)>) -> TValue {
        TValue::Multiset(entries.into_iter().filter(|(_, m)| !m.is_zero()).collect())
    }

    /// Distribution from weights; fails unless they are non-negative and
    /// sum to exactly 1.
    pub fn distribution(entries: impl IntoIterator<Item = (usize, Rational)>) -> Result<TValue> {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (x, w) in entries {
            if w < Rational::zero() {
                return Err(Error::InvalidValue(format!("negative weight at state {x}")));
            }
            *map.entry(x).or_insert_with(Rational::zero) += w;
        }
        map.retain(|_, w| !w.is_zero());
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::InvalidValue(format!(
                "distribution weights sum to {}",
                rat_to_string(&total)
            )));
        }
        Ok(TValue::Distribution(map))
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TValue::Subset(_) => "subset",
            TValue::Multiset(_) => "multiset",
            TValue::Selection(_) => "selection",
            TValue::Distribution(_) => "distribution",
            TValue::Measure(_) => "measure",
        }
    }

    /// Pushforward along `f`, given as the table of a map from the carrier
    /// into `{0, …, m-1}`.
    pub fn push(&self, f: &[usize]) -> TValue {
        match self {
            TValue::Subset(s) => TValue::Subset(s.image(f)),
            TValue::Multiset(ms) => {
                let mut out: BTreeMap<usize, Mult> = BTreeMap::new();
                for (x, m) in ms {
                    let e = out.entry(f[*x]).or_insert(Mult::Fin(0));
                    *e = e.add(*m);
                }
                TValue::Multiset(out)
            }
            TValue::Selection(s) => TValue::Selection(s.push(f)),
            TValue::Distribution(d) => {
                let mut out: BTreeMap<usize, Rational> = BTreeMap::new();
                for (x, w) in d {
                    *out.entry(f[*x]).or_insert_with(Rational::zero) += w;
                }
                TValue::Distribution(out)
            }
            TValue::Measure(m) => TValue::Measure(m.push(f)),
        }
    }

    /// Largest state index mentioned, plus one.
    pub fn bound(&self) -> usize {
        match self {
            TValue::Subset(s) => s.bound(),
            TValue::Multiset(m) => m.keys().next_back().map_or(0, |x| x + 1),
            TValue::Distribution(d) => d.keys().next_back().map_or(0, |x| x + 1),
            TValue::Selection(s) => s.support().last().map_or(0, |x| x + 1),
            TValue::Measure(m) => m.support().last().map_or(0, |x| x + 1),
        }
    }

    /// Equality as elements of `TX` for a carrier of `n` states.
    pub fn same_as(&self, other: &TValue, n: usize) -> Result<bool> {
        Ok(match (self, other) {
            (TValue::Selection(a), TValue::Selection(b)) if a.support != b.support => {
                a.to_explicit(n)? == b.to_explicit(n)?
            }
            (TValue::Measure(a), TValue::Measure(b)) if a.support != b.support => {
                a.to_explicit(n)? == b.to_explicit(n)?
            }
            _ => self == other,
        })
    }
}

impl fmt::Display for TValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |s: &StateSet| {
            let items: Vec<String> = s.iter().map(|x| format!("s{x}")).collect();
            format!("{{{}}}", items.join(","))
        };
        match self {
            TValue::Subset(s) => f.write_str(&set(s)),
            TValue::Multiset(m) => {
                let items: Vec<String> = m.iter().map(|(x, v)| format!("s{x}:{v}")).collect();
                write!(f, "[{}]", items.join(", "))
            }
            TValue::Distribution(d) => {
                let items: Vec<String> =
                    d.iter().map(|(x, w)| format!("s{x}:{}", rat_to_string(w))).collect();
                write!(f, "[{}]", items.join(", "))
            }
            TValue::Selection(s) => {
                let k = s.support().len();
                let items: Vec<String> = (0..1u64 << k)
                    .map(|m| {
                        format!(
                            "{}->{}",
                            set(&expand(s.support(), m)),
                            set(&expand(s.support(), s.table()[m as usize]))
                        )
                    })
                    .collect();
                write!(f, "<{}>", items.join(", "))
            }
            TValue::Measure(m) => {
                let items: Vec<String> =
                    m.sets().map(|(b, v)| format!("{}:{v}", set(&b))).collect();
                if m.support().len() < m.bound_hint() {
                    write!(f, "({} on {})", items.join(", "), set(&m.support().iter().copied().collect()))
                } else {
                    write!(f, "({})", items.join(", "))
                }
            }
        }
    }
}

impl Measure {
    fn bound_hint(&self) -> usize {
        self.support.last().map_or(0, |x| x + 1)
    }
}

//! Finite families that are satisfiable piecewise but not as a whole.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use coalgml::formula::{rat, rat_to_string, Formula, OperatorSymbol, Prop, Rational};
use coalgml::logic::{get_logic, OneStepAtom, OneStepFormula};
use coalgml::onestep::satisfies_all;
use coalgml::semantics::{enumerate_tvalues, Caps, Coalgebra, FunctorKind, Model, Mult, StateSet, TValue};
use coalgml::{Error, Result};
use serde_json::{json, Value};

/// Largest `N` accepted unless the caller raises it.
pub const DEFAULT_PROBE_BOUND: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Scenario {
    FinbranchK,
    ImagefiniteGml,
    Pml,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::FinbranchK => "finbranch-K",
            Scenario::ImagefiniteGml => "imagefinite-GML",
            Scenario::Pml => "PML",
        }
    }

    fn resource(self) -> &'static str {
        match self {
            Scenario::FinbranchK => "minimal branching",
            Scenario::ImagefiniteGml => "minimal total multiplicity",
            Scenario::Pml => "minimal probability of p0",
        }
    }

    fn first(self) -> usize {
        match self {
            Scenario::Pml => 2,
            _ => 1,
        }
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "finbranch-K" => Ok(Scenario::FinbranchK),
            "imagefinite-GML" => Ok(Scenario::ImagefiniteGml),
            "PML" => Ok(Scenario::Pml),
            _ => Err(Error::Precondition(format!("unknown scenario `{s}` (finbranch-K, imagefinite-GML, PML)"))),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The finite subset of the family up to `n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeRow {
    pub n: usize,
    /// Some value satisfies the subset's one-step problem.
    pub satisfiable: bool,
    /// Least resource over all one-step witnesses.
    pub resource: Rational,
    /// An explicit model using exactly that resource satisfies the subset.
    pub model_checked: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProbeReport {
    pub scenario: Scenario,
    /// How the `n`-th subset is written.
    pub schema: String,
    pub rows: Vec<ProbeRow>,
    /// `(denominator cap, first n whose subset fails within the cap)` for
    /// the probabilistic family.
    pub obstruction: Vec<(u64, Option<usize>)>,
    pub notes: Vec<String>,
}

impl ProbeReport {
    pub fn monotone(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].resource <= w[1].resource)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "scenario": self.scenario.name(),
            "schema": self.schema,
            "resource": self.scenario.resource(),
            "rows": self.rows.iter().map(|r| json!({
                "n": r.n,
                "satisfiable": r.satisfiable,
                "resource": rat_to_string(&r.resource),
                "model_checked": r.model_checked,
            })).collect::<Vec<_>>(),
            "monotone": self.monotone(),
            "obstruction": self.obstruction.iter().map(|(d, n)| json!({"den_cap": d, "fails_from": n})).collect::<Vec<_>>(),
            "notes": self.notes,
        })
    }
}

impl fmt::Display for ProbeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "probe {}", self.scenario)?;
        writeln!(f, "subset n: {}", self.schema)?;
        writeln!(f, "{:>4}  {:<5}  {:<28}  model check", "n", "sat", self.scenario.resource())?;
        for r in &self.rows {
            writeln!(
                f,
                "{:>4}  {:<5}  {:<28}  {}",
                r.n,
                if r.satisfiable { "yes" } else { "no" },
                rat_to_string(&r.resource),
                if r.model_checked { "pass" } else { "FAIL" }
            )?;
        }
        writeln!(f, "monotone: {}", if self.monotone() { "yes" } else { "no" })?;
        for (d, n) in &self.obstruction {
            match n {
                Some(n) => writeln!(f, "denominator cap {d}: no value satisfies the subset for n = {n} (cap-relative)")?,
                None => writeln!(f, "denominator cap {d}: every subset up to the bound is satisfiable")?,
            }
        }
        for note in &self.notes {
            writeln!(f, "{note}")?;
        }
        Ok(())
    }
}

/// Checks the finite subsets `1..=n` (from 2 for the probabilistic family)
/// of the scenario's family.
pub fn compactness_probe(scenario: Scenario, n: usize, bound: usize) -> Result<ProbeReport> {
    if n > bound {
        return Err(Error::Budget(format!("N = {n} exceeds the probe bound {bound}")));
    }
    if n < scenario.first() {
        return Err(Error::Precondition(format!("{scenario} needs N ≥ {}", scenario.first())));
    }
    match scenario {
        Scenario::FinbranchK => finbranch(n),
        Scenario::ImagefiniteGml => image_finite(n),
        Scenario::Pml => probabilistic(n),
    }
}

fn nat(k: usize) -> Rational {
    rat(k as i64, 1)
}

fn model(functor: FunctorKind, names: &[&str], transitions: Vec<TValue>, valuation: &[(u32, &[usize])]) -> Result<Model> {
    let coalgebra = Coalgebra::new(functor, names.iter().map(|s| s.to_string()).collect(), transitions)?;
    let valuation: BTreeMap<u32, StateSet> =
        valuation.iter().map(|(p, xs)| (*p, xs.iter().copied().collect())).collect();
    Model::new(coalgebra, valuation)
}

fn all_hold(m: &Model, state: usize, fs: &[Formula]) -> Result<bool> {
    for f in fs {
        if !m.check(state, f)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `q_i` is `p{i-1}`; the `i`-th successor type makes exactly `q_i` true.
fn successor_type(i: u32, k: u32) -> Formula {
    Formula::and_all((0..k).map(|j| if j == i { Formula::atom(j) } else { Formula::not(Formula::atom(j)) }))
}

fn finbranch(n: usize) -> Result<ProbeReport> {
    let k_logic = get_logic("K")?;
    let mut rows = Vec::new();
    for k in 1..=n {
        // One step over the k successor types: ◇{t_i} for every i.
        let phi: Vec<OneStepFormula> = (0..k)
            .map(|i| {
                let rest = StateSet::full(k).difference(&StateSet::singleton(i));
                OneStepAtom::new(OperatorSymbol::boxed(), vec![rest], k).map(|a| Prop::not(Prop::atom(a)))
            })
            .collect::<Result<_>>()?;
        let mut least: Option<usize> = None;
        for s in StateSet::all_subsets(k) {
            if least.is_some_and(|l| s.len() >= l) {
                continue;
            }
            if satisfies_all(&k_logic.functor, &phi, &TValue::Subset(s.clone()))? {
                least = Some(s.len());
            }
        }
        let phi_k = Formula::and_all((0..k as u32).map(|i| Formula::dia(successor_type(i, k as u32))));
        let mut names = vec!["r".to_string()];
        names.extend((1..=k).map(|i| format!("s{i}")));
        let names: Vec<&str> = names.iter().map(String::as_str).collect();
        let mut transitions = vec![TValue::Subset((1..=k).collect())];
        transitions.extend((0..k).map(|_| TValue::Subset(StateSet::new())));
        let singles: Vec<[usize; 1]> = (1..=k).map(|i| [i]).collect();
        let valuation: Vec<(u32, &[usize])> = (0..k).map(|i| (i as u32, &singles[i][..])).collect();
        let m = model(k_logic.functor.clone(), &names, transitions, &valuation)?;
        rows.push(ProbeRow {
            n: k,
            satisfiable: least.is_some(),
            resource: nat(least.unwrap_or(0)),
            model_checked: least == Some(k) && all_hold(&m, 0, &[phi_k])?,
        });
    }
    Ok(ProbeReport {
        scenario: Scenario::FinbranchK,
        schema: "AND_{i=1..n} <>(q_i & AND_{j!=i} !q_j) with q_i = p{i-1}".into(),
        rows,
        obstruction: vec![],
        notes: vec!["the n successors make pairwise exclusive propositions true, so none can be shared".into()],
    })
}

fn image_finite(n: usize) -> Result<ProbeReport> {
    let gml = get_logic("GML")?;
    let a = StateSet::singleton(0);
    let mut rows = Vec::new();
    for k in 1..=n {
        let phi: Vec<OneStepFormula> = (1..=k as u64)
            .map(|j| OneStepAtom::new(OperatorSymbol::geq(j), vec![a.clone()], 2).map(Prop::atom))
            .collect::<Result<_>>()?;
        // Finite multiplicities over {p0-states, others}.
        let mut least: Option<u64> = None;
        for t in enumerate_tvalues(&FunctorKind::FinMultiset, 2, &Caps::new(k as u64, 1))? {
            let TValue::Multiset(b) = &t else { unreachable!("multiset enumeration") };
            let total: u64 = b.values().map(|m| if let Mult::Fin(x) = m { *x } else { 0 }).sum();
            if least.is_some_and(|l| total >= l) {
                continue;
            }
            if satisfies_all(&gml.functor, &phi, &t)? {
                least = Some(total);
            }
        }
        let formulas = graded_family(k);
        let transitions = vec![TValue::multiset([(1, Mult::Fin(k as u64))]), TValue::multiset([])];
        let m = model(gml.functor.clone(), &["r", "x"], transitions, &[(0, &[1])])?;
        rows.push(ProbeRow {
            n: k,
            satisfiable: least.is_some(),
            resource: nat(least.unwrap_or(0) as usize),
            model_checked: least == Some(k as u64) && all_hold(&m, 0, &formulas)?,
        });
    }
    let looped = model(gml.functor.clone(), &["w"], vec![TValue::multiset([(0, Mult::Inf)])], &[(0, &[0])])?;
    let infinite = all_hold(&looped, 0, &graded_family(n))?;
    Ok(ProbeReport {
        scenario: Scenario::ImagefiniteGml,
        schema: "geq[j](p0) for j = 1..n".into(),
        rows,
        obstruction: vec![],
        notes: vec![format!(
            "a single p0 state with an inf self-loop satisfies geq[j](p0) for j = 1..{n}: {}",
            if infinite { "yes" } else { "no" }
        )],
    })
}

fn graded_family(k: usize) -> Vec<Formula> {
    (1..=k as u64).map(|j| Formula::geq(j, Formula::atom(0))).collect()
}

fn lower_bound(j: usize) -> Rational {
    rat(1, 2) - rat(1, j as i64)
}

/// `L[1/2 - 1/j](p0)` for `j = 2..=k` and `!L[1/2](p0)`.
fn probability_family(k: usize) -> Vec<Formula> {
    let a = Formula::atom(0);
    let mut out: Vec<Formula> = (2..=k).map(|j| prob(lower_bound(j), a.clone())).collect();
    out.push(Formula::not(prob(rat(1, 2), a)));
    out
}

fn prob(p: Rational, f: Formula) -> Formula {
    Formula::Modal(OperatorSymbol::prob(p), vec![f])
}

fn one_step_probability_family(k: usize) -> Result<Vec<OneStepFormula>> {
    let a = StateSet::singleton(0);
    let atom = |p: Rational| OneStepAtom::new(OperatorSymbol::prob(p), vec![a.clone()], 2);
    let mut out: Vec<OneStepFormula> = (2..=k).map(|j| atom(lower_bound(j)).map(Prop::atom)).collect::<Result<_>>()?;
    out.push(Prop::not(Prop::atom(atom(rat(1, 2))?)));
    Ok(out)
}

fn probabilistic(n: usize) -> Result<ProbeReport> {
    let pml = get_logic("PML")?;
    let mut rows = Vec::new();
    for k in 2..=n {
        let phi = one_step_probability_family(k)?;
        // Every weight with denominator up to 2k on {p0-states, others}.
        let mut least: Option<Rational> = None;
        for t in enumerate_tvalues(&FunctorKind::Distribution, 2, &Caps::new(1, 2 * k as u64))? {
            let TValue::Distribution(d) = &t else { unreachable!("distribution enumeration") };
            let w = d.get(&0).cloned().unwrap_or_else(|| rat(0, 1));
            if least.as_ref().is_some_and(|l| w >= *l) {
                continue;
            }
            if satisfies_all(&pml.functor, &phi, &t)? {
                least = Some(w);
            }
        }
        let model_checked = match &least {
            Some(w) => {
                let root = TValue::distribution([(1, w.clone()), (2, rat(1, 1) - w.clone())])?;
                let stay = |x: usize| TValue::distribution([(x, rat(1, 1))]);
                let m = model(pml.functor.clone(), &["r", "x", "y"], vec![root, stay(1)?, stay(2)?], &[(0, &[1])])?;
                *w == lower_bound(k) && all_hold(&m, 0, &probability_family(k))?
            }
            None => false,
        };
        rows.push(ProbeRow { n: k, satisfiable: least.is_some(), resource: least.unwrap_or_else(|| rat(0, 1)), model_checked });
    }
    // Within denominators up to d the largest weight below 1/2 is at most
    // 1/2 - 1/(2d), so the subset for 2d + 1 already fails.
    let mut obstruction = Vec::new();
    for d in 2..=n.max(2) as u64 {
        let values: Vec<TValue> = enumerate_tvalues(&FunctorKind::Distribution, 2, &Caps::new(1, d))?.collect();
        let mut fails = None;
        for k in 2..=(2 * d as usize + 1) {
            let phi = one_step_probability_family(k)?;
            let mut any = false;
            for t in &values {
                if satisfies_all(&pml.functor, &phi, t)? {
                    any = true;
                    break;
                }
            }
            if !any {
                fails = Some(k);
                break;
            }
        }
        obstruction.push((d, fails));
    }
    Ok(ProbeReport {
        scenario: Scenario::Pml,
        schema: "L[1/2 - 1/j](p0) for j = 2..n, and !L[1/2](p0)".into(),
        rows,
        obstruction,
        notes: vec![
            "the whole family forces a weight of p0 that is at least every 1/2 - 1/j and below 1/2".into(),
            "no finite denominator cap admitting 1/2 contains such a weight".into(),
        ],
    })
}

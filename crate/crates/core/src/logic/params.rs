use num_traits::{One, Zero};

use crate::formula::{Family, Formula, OperatorSymbol, Rational, Scalar};
use crate::semantics::{common_denominator, FunctorKind, Monoid};

use super::registry::{params_of, AxiomScheme, SchemeFamily};

/// Finite set of operator parameters that parametric axiom families are
/// instantiated over.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ParamUniverse {
    /// Grades of `geq`, ascending.
    pub grades: Vec<u64>,
    /// Thresholds of `L`, ascending.
    pub probs: Vec<Rational>,
    /// Values of `E[m]`, ascending.
    pub values: Vec<Scalar>,
}

fn grid(den: u64, max: &Rational) -> Vec<Rational> {
    let mut out = Vec::new();
    let mut k = 0i64;
    loop {
        let r = Rational::new(k.into(), (den as i64).into());
        if r > *max {
            return out;
        }
        out.push(r);
        k += 1;
    }
}

impl ParamUniverse {
    /// The universe needed for a query mentioning `ops`:
    ///
    /// - grades `0..=g`, `g` the largest grade (at least 1);
    /// - probabilities and exact probabilities on the grid `k/L` in `[0, 1]`,
    ///   `L` the least common denominator;
    /// - natural measure values `0..=B` (`1..=B` without `E_0`), all
    ///   residues for `ℤ/mℤ`.
    pub fn for_query<'a>(functor: &FunctorKind, ops: impl IntoIterator<Item = &'a OperatorSymbol>) -> Self {
        let ops: Vec<&OperatorSymbol> = ops.into_iter().collect();
        let mut u = ParamUniverse::default();
        match functor {
            FunctorKind::InfMultiset | FunctorKind::FinMultiset => {
                let g = params_of(ops.iter().copied(), Family::Geq).iter().filter_map(Scalar::as_nat).max().unwrap_or(1).max(1);
                u.grades = (0..=g).collect();
            }
            FunctorKind::Distribution => {
                let ps = params_of(ops.iter().copied(), Family::Prob);
                let den = common_denominator(ps.iter().filter_map(Scalar::as_rat));
                u.probs = grid(den, &Rational::one());
            }
            FunctorKind::AddMeasure(mon) => {
                let vs = params_of(ops.iter().copied(), Family::Exact);
                u.values = match mon {
                    Monoid::Nat => {
                        let b = vs.iter().filter_map(Scalar::as_nat).max().unwrap_or(1).max(1);
                        (0..=b).map(Scalar::Nat).collect()
                    }
                    Monoid::ZMod(m) => (0..*m).map(Scalar::Nat).collect(),
                    Monoid::NonNegRat => {
                        let rs: Vec<&Rational> = vs.iter().filter_map(Scalar::as_rat).collect();
                        let den = common_denominator(rs.iter().copied());
                        let max = rs.iter().map(|r| (*r).clone()).max().unwrap_or_else(Rational::one).max(Rational::one());
                        grid(den, &max).into_iter().map(Scalar::Rat).collect()
                    }
                };
            }
            FunctorKind::BoundedMeasure => {
                let vs = params_of(ops.iter().copied(), Family::Exact);
                let b = vs.iter().filter_map(Scalar::as_nat).max().unwrap_or(1).max(1);
                u.values = (1..=b).map(Scalar::Nat).collect();
            }
            FunctorKind::ExactProb => {
                let vs = params_of(ops.iter().copied(), Family::Exact);
                let den = common_denominator(vs.iter().filter_map(Scalar::as_rat));
                u.values = grid(den, &Rational::one()).into_iter().map(Scalar::Rat).collect();
            }
            FunctorKind::Powerset { .. } | FunctorKind::Selection | FunctorKind::SubSelection(_) => {}
        }
        u
    }

    /// Parametric operators of the universe; `Box`, `Cond` and `E` are
    /// not included.
    pub fn operators(&self) -> Vec<OperatorSymbol> {
        let mut out: Vec<OperatorSymbol> = self.grades.iter().map(|k| OperatorSymbol::geq(*k)).collect();
        out.extend(self.probs.iter().map(|p| OperatorSymbol::prob(p.clone())));
        out.extend(self.values.iter().map(|v| OperatorSymbol::exact(v.clone())));
        out
    }

    pub(crate) fn generate(&self, family: SchemeFamily, functor: &FunctorKind) -> Vec<AxiomScheme> {
        let a = Formula::atom(0);
        let b = Formula::atom(1);
        let mut out = Vec::new();
        let mut push = |f: Formula| out.push(AxiomScheme::new(f).expect("generated axioms are rank 1"));
        match family {
            SchemeFamily::Graded => {
                let boxed = |f: Formula| Formula::not(Formula::geq(1, Formula::not(f)));
                for &k in &self.grades {
                    if k == 0 {
                        push(Formula::geq(0, a.clone()));
                    }
                    for &l in self.grades.iter().filter(|l| **l < k) {
                        push(Formula::implies(Formula::geq(k, a.clone()), Formula::geq(l, a.clone())));
                    }
                    let split = Formula::or_all((0..=k).map(|i| {
                        Formula::and(
                            Formula::geq(i, Formula::and(a.clone(), b.clone())),
                            Formula::geq(k - i, Formula::and(a.clone(), Formula::not(b.clone()))),
                        )
                    }));
                    push(Formula::iff(Formula::geq(k, a.clone()), split));
                    push(Formula::implies(
                        boxed(Formula::implies(a.clone(), b.clone())),
                        Formula::implies(Formula::geq(k, a.clone()), Formula::geq(k, b.clone())),
                    ));
                }
            }
            SchemeFamily::Additive => {
                let mon = match functor {
                    FunctorKind::AddMeasure(m) => m.clone(),
                    FunctorKind::BoundedMeasure => Monoid::Nat,
                    _ => Monoid::NonNegRat,
                };
                let e = |m: &Scalar, f: Formula| Formula::Modal(OperatorSymbol::exact(m.clone()), vec![f]);
                for m in &self.values {
                    for n in self.values.iter().filter(|n| *n != m) {
                        push(Formula::implies(e(m, a.clone()), Formula::not(e(n, a.clone()))));
                    }
                }
                for m in &self.values {
                    for n in &self.values {
                        let premise = Formula::and(
                            e(m, Formula::and(a.clone(), b.clone())),
                            e(n, Formula::and(a.clone(), Formula::not(b.clone()))),
                        );
                        let sum = mon.add(m, n).expect("values lie in the monoid");
                        let conclusion = if self.values.contains(&sum) {
                            e(&sum, a.clone())
                        } else {
                            // The sum lies outside the universe: `a` has none of
                            // its measures.
                            Formula::and_all(self.values.iter().map(|j| Formula::not(e(j, a.clone()))))
                        };
                        push(Formula::implies(premise, conclusion));
                    }
                }
            }
            SchemeFamily::BoundedMeasure => {
                let e = |m: u64, f: Formula| Formula::Modal(OperatorSymbol::exact(Scalar::Nat(m)), vec![f]);
                let measurable = |f: Formula| Formula::Modal(OperatorSymbol::measurable(), vec![f]);
                let ns: Vec<u64> = self.values.iter().filter_map(Scalar::as_nat).collect();
                for &n in &ns {
                    push(Formula::implies(e(n, a.clone()), measurable(a.clone())));
                    let ab = Formula::and(a.clone(), b.clone());
                    let anb = Formula::and(a.clone(), Formula::not(b.clone()));
                    let mut options = vec![e(n, ab.clone()), e(n, anb.clone())];
                    for k in 1..n {
                        options.push(Formula::and(e(k, ab.clone()), e(n - k, anb.clone())));
                    }
                    push(Formula::implies(
                        Formula::and(e(n, a.clone()), measurable(b.clone())),
                        Formula::or_all(options),
                    ));
                }
            }
            SchemeFamily::ExactProb => {
                let e = |p: &Rational, f: Formula| Formula::Modal(OperatorSymbol::exact(Scalar::Rat(p.clone())), vec![f]);
                push(e(&Rational::one(), Formula::top()));
                let ps: Vec<&Rational> = self.values.iter().filter_map(Scalar::as_rat).collect();
                for p in &ps {
                    for q in &ps {
                        let premise = Formula::and(e(p, a.clone()), e(q, Formula::and(a.clone(), b.clone())));
                        let d = *p - *q;
                        let conclusion = if d < Rational::zero() {
                            Formula::Bottom
                        } else {
                            e(&d, Formula::and(a.clone(), Formula::not(b.clone())))
                        };
                        push(Formula::implies(premise, conclusion));
                    }
                }
            }
            SchemeFamily::Probabilistic => {
                let l = |p: &Rational, f: Formula| Formula::Modal(OperatorSymbol::prob(p.clone()), vec![f]);
                let ps = &self.probs;
                let ab = Formula::and(a.clone(), b.clone());
                let anb = Formula::and(a.clone(), Formula::not(b.clone()));
                for p in ps {
                    if p.is_zero() {
                        push(l(p, a.clone()));
                    } else {
                        push(Formula::not(l(p, Formula::Bottom)));
                    }
                    if p.is_one() {
                        push(l(p, Formula::top()));
                    }
                    push(Formula::implies(l(p, ab.clone()), l(p, a.clone())));
                    for q in ps {
                        if q < p {
                            push(Formula::implies(l(p, a.clone()), l(q, a.clone())));
                        }
                        let s = p + q;
                        if s > Rational::one() {
                            push(Formula::implies(l(p, a.clone()), Formula::not(l(q, Formula::not(a.clone())))));
                        } else if ps.contains(&s) {
                            push(Formula::implies(Formula::and(l(p, ab.clone()), l(q, anb.clone())), l(&s, a.clone())));
                            push(Formula::implies(
                                Formula::and(Formula::not(l(p, ab.clone())), Formula::not(l(q, anb.clone()))),
                                Formula::not(l(&s, a.clone())),
                            ));
                        }
                    }
                }
            }
        }
        out
    }
}

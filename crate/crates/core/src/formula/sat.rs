//! DPLL over a Tseitin encoding, used when truth tables get too large.

use super::prop::{AtomIndex, Prop, PropAtom};

/// Clause set over variables `1..=vars`; literals are signed indices.
#[derive(Clone, Debug, Default)]
pub struct Cnf {
    vars: usize,
    clauses: Vec<Vec<i32>>,
}

impl Cnf {
    /// A clause set whose first `atoms` variables stand for atoms.
    pub fn new(atoms: usize) -> Self {
        Cnf { vars: atoms, clauses: Vec::new() }
    }

    fn fresh(&mut self) -> i32 {
        self.vars += 1;
        self.vars as i32
    }

    pub fn add(&mut self, clause: Vec<i32>) {
        self.clauses.push(clause);
    }

    /// Returns a literal equivalent to `f`, adding defining clauses.
    pub fn encode<A: PropAtom>(&mut self, f: &Prop<A>, idx: &AtomIndex<A>) -> i32 {
        match f {
            Prop::Atom(a) => idx.get(a).expect("atom indexed") as i32 + 1,
            Prop::Bottom => {
                let v = self.fresh();
                self.add(vec![-v]);
                v
            }
            Prop::Not(p) => -self.encode(p, idx),
            Prop::And(p, q) => {
                let a = self.encode(p, idx);
                let b = self.encode(q, idx);
                let v = self.fresh();
                self.add(vec![-v, a]);
                self.add(vec![-v, b]);
                self.add(vec![v, -a, -b]);
                v
            }
        }
    }

    pub fn solve(&self) -> bool {
        let mut assign = vec![0i8; self.vars + 1];
        dpll(&self.clauses, &mut assign)
    }
}

fn value(assign: &[i8], lit: i32) -> i8 {
    let v = assign[lit.unsigned_abs() as usize];
    if lit > 0 {
        v
    } else {
        -v
    }
}

fn dpll(clauses: &[Vec<i32>], assign: &mut Vec<i8>) -> bool {
    let mut trail = Vec::new();
    let ok = propagate(clauses, assign, &mut trail);
    if ok {
        match pick(clauses, assign) {
            None => return true,
            Some(lit) => {
                for l in [lit, -lit] {
                    assign[l.unsigned_abs() as usize] = if l > 0 { 1 } else { -1 };
                    if dpll(clauses, assign) {
                        return true;
                    }
                    assign[l.unsigned_abs() as usize] = 0;
                }
            }
        }
    }
    for v in trail {
        assign[v] = 0;
    }
    false
}

/// Unit propagation to fixpoint; false on conflict.
fn propagate(clauses: &[Vec<i32>], assign: &mut [i8], trail: &mut Vec<usize>) -> bool {
    loop {
        let mut changed = false;
        for c in clauses {
            let mut unassigned = None;
            let mut open = 0;
            let mut sat = false;
            for &l in c {
                match value(assign, l) {
                    1 => {
                        sat = true;
                        break;
                    }
                    0 => {
                        open += 1;
                        unassigned = Some(l);
                    }
                    _ => {}
                }
            }
            if sat {
                continue;
            }
            match (open, unassigned) {
                (0, _) => return false,
                (1, Some(l)) => {
                    let v = l.unsigned_abs() as usize;
                    assign[v] = if l > 0 { 1 } else { -1 };
                    trail.push(v);
                    changed = true;
                }
                _ => {}
            }
        }
        if !changed {
            return true;
        }
    }
}

/// First unassigned literal of the first unsatisfied clause.
fn pick(clauses: &[Vec<i32>], assign: &[i8]) -> Option<i32> {
    for c in clauses {
        if c.iter().any(|&l| value(assign, l) == 1) {
            continue;
        }
        if let Some(&l) = c.iter().find(|&&l| value(assign, l) == 0) {
            return Some(l);
        }
    }
    None
}

use num_traits::{Signed, Zero};

use crate::formula::{rat, Rational, Scalar};

/// Commutative monoids available as measure value domains.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Monoid {
    /// `(ℕ, +, 0)`.
    Nat,
    /// `(ℤ/nℤ, +, 0)`.
    ZMod(u64),
    /// `(ℚ≥0, +, 0)`.
    NonNegRat,
}

impl Monoid {
    pub fn zero(&self) -> Scalar {
        match self {
            Monoid::Nat | Monoid::ZMod(_) => Scalar::Nat(0),
            Monoid::NonNegRat => Scalar::Rat(Rational::zero()),
        }
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        match (self, v) {
            (Monoid::Nat, Scalar::Nat(_)) => true,
            (Monoid::ZMod(m), Scalar::Nat(n)) => n < m,
            (Monoid::NonNegRat, Scalar::Rat(r)) => !r.is_negative(),
            _ => false,
        }
    }

    /// Sum, or `None` if an operand lies outside the monoid.
    pub fn add(&self, a: &Scalar, b: &Scalar) -> Option<Scalar> {
        if !self.contains(a) || !self.contains(b) {
            return None;
        }
        Some(match (self, a, b) {
            (Monoid::Nat, Scalar::Nat(x), Scalar::Nat(y)) => Scalar::Nat(x.checked_add(*y)?),
            (Monoid::ZMod(m), Scalar::Nat(x), Scalar::Nat(y)) => Scalar::Nat((x + y) % m),
            (Monoid::NonNegRat, Scalar::Rat(x), Scalar::Rat(y)) => Scalar::Rat(x + y),
            _ => return None,
        })
    }

    pub fn sum<'a>(&self, items: impl IntoIterator<Item = &'a Scalar>) -> Option<Scalar> {
        items.into_iter().try_fold(self.zero(), |acc, v| self.add(&acc, v))
    }

    /// Finite enumeration of elements: all residues for `ℤ/nℤ`, `0..=cap`
    /// for `ℕ`, and fractions `k/den_cap` up to `cap` for `ℚ≥0`.
    pub fn elements(&self, cap: u64, den_cap: u64) -> Vec<Scalar> {
        match self {
            Monoid::Nat => (0..=cap).map(Scalar::Nat).collect(),
            Monoid::ZMod(m) => (0..*m).map(Scalar::Nat).collect(),
            Monoid::NonNegRat => {
                let d = den_cap.max(1);
                (0..=cap * d).map(|k| Scalar::Rat(rat(k as i64, d as i64))).collect()
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            Monoid::Nat => "N".into(),
            Monoid::ZMod(m) => format!("Z{m}"),
            Monoid::NonNegRat => "Q".into(),
        }
    }

    pub fn from_name(s: &str) -> Option<Monoid> {
        match s {
            "N" | "ℕ" | "Nat" => Some(Monoid::Nat),
            "Q" | "ℚ" | "Q+" | "ℚ≥0" => Some(Monoid::NonNegRat),
            "Z2" | "ℤ/2ℤ" | "Z/2Z" | "Z/2" => Some(Monoid::ZMod(2)),
            _ => {
                let m = s.strip_prefix('Z').or_else(|| s.strip_prefix('ℤ'))?;
                let m = m.strip_prefix('/').unwrap_or(m);
                let m = m.trim_end_matches("Z").trim_end_matches('ℤ').trim_end_matches('/');
                m.parse().ok().filter(|m| *m > 0).map(Monoid::ZMod)
            }
        }
    }

    /// Checks identity, commutativity and associativity on all triples of
    /// `samples`; returns the first failing triple.
    pub fn check_laws(&self, samples: &[Scalar]) -> Option<(Scalar, Scalar, Scalar)> {
        let z = self.zero();
        for a in samples {
            for b in samples {
                for c in samples {
                    let id = self.add(a, &z).as_ref() == Some(a);
                    let comm = self.add(a, b) == self.add(b, a);
                    let assoc = self.add(a, b).and_then(|ab| self.add(&ab, c))
                        == self.add(b, c).and_then(|bc| self.add(a, &bc));
                    if !(id && comm && assoc) {
                        return Some((a.clone(), b.clone(), c.clone()));
                    }
                }
            }
        }
        None
    }
}

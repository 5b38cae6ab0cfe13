use std::collections::BTreeMap;
use std::fmt;

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::formula::{parse_with_aliases, render, Family, Formula, OperatorSymbol, ParamDomain, Scalar, SimilarityType};
use crate::semantics::{FunctorKind, Monoid, SelectionAxioms};

use super::params::ParamUniverse;

/// A rank-1 axiom over scheme variables `p0, p1, …`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AxiomScheme {
    formula: Formula,
}

impl AxiomScheme {
    pub fn new(formula: Formula) -> Result<Self> {
        if !formula.is_rank_one() {
            return Err(Error::NotRankOne(render(&formula)));
        }
        Ok(AxiomScheme { formula })
    }

    pub fn formula(&self) -> &Formula {
        &self.formula
    }

    pub fn vars(&self) -> Vec<u32> {
        self.formula.atoms()
    }
}

impl fmt::Display for AxiomScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&render(&self.formula))
    }
}

/// Axiom families indexed by operator parameters; instantiated over a
/// finite [`ParamUniverse`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchemeFamily {
    /// Grade monotonicity, splitting, monotonicity under `□` and `≥0`.
    Graded,
    /// Uniqueness and additivity of `E_m`.
    Additive,
    /// Measurability axioms and the splitting axiom without `E_0`.
    BoundedMeasure,
    /// `E_1 ⊤` and relative complements.
    ExactProb,
    /// A sound fragment of probabilistic reasoning over a grid.
    Probabilistic,
}

/// Frame conditions, possibly indexed by a grade.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FrameScheme {
    Fixed(Formula),
    /// `≥1 ≥n p → ≥n p` for `n = 1, …, cap`.
    GradedTransitivity,
}

/// `(Λ, A, Θ)` together with the functor interpreting it.
#[derive(Clone, Debug)]
pub struct Logic {
    pub name: String,
    pub sig: SimilarityType,
    pub functor: FunctorKind,
    pub axioms: Vec<AxiomScheme>,
    pub families: Vec<SchemeFamily>,
    pub frames: Vec<FrameScheme>,
}

/// Grade used for parametric frame conditions when none is given.
pub const DEFAULT_FRAME_GRADE: u64 = 2;

impl Logic {
    /// Checks that every operator of the axioms and frame conditions is in
    /// the signature and interpreted by the functor.
    pub fn new(
        name: impl Into<String>,
        sig: SimilarityType,
        functor: FunctorKind,
        axioms: Vec<AxiomScheme>,
        families: Vec<SchemeFamily>,
        frames: Vec<FrameScheme>,
    ) -> Result<Self> {
        let logic = Logic { name: name.into(), sig, functor, axioms, families, frames };
        for a in &logic.axioms {
            logic.check_operators(a.formula())?;
        }
        for f in logic.frame_conditions(DEFAULT_FRAME_GRADE) {
            logic.check_operators(&f)?;
        }
        Ok(logic)
    }

    pub fn check_operators(&self, f: &Formula) -> Result<()> {
        for op in f.operators() {
            self.check_operator(&op)?;
        }
        Ok(())
    }

    pub fn check_operator(&self, op: &OperatorSymbol) -> Result<()> {
        if !self.sig.contains(op) {
            return Err(Error::UnknownOperator(op.to_string()));
        }
        if !self.functor.interprets(op) {
            return Err(Error::FunctorMismatch { op: op.to_string(), functor: self.functor.to_string() });
        }
        Ok(())
    }

    pub fn is_rank_one(&self) -> bool {
        self.frames.is_empty()
    }

    /// Frame conditions, with graded families up to `grade`.
    pub fn frame_conditions(&self, grade: u64) -> Vec<Formula> {
        let p = Formula::atom(0);
        let mut out = Vec::new();
        for fr in &self.frames {
            match fr {
                FrameScheme::Fixed(f) => out.push(f.clone()),
                FrameScheme::GradedTransitivity => {
                    for n in 1..=grade.max(1) {
                        out.push(Formula::implies(Formula::geq(1, Formula::geq(n, p.clone())), Formula::geq(n, p.clone())));
                    }
                }
            }
        }
        out
    }

    /// All axiom schemes for the operators of `universe`.
    pub fn axioms_for(&self, universe: &ParamUniverse) -> Vec<AxiomScheme> {
        let mut out = self.axioms.clone();
        for fam in &self.families {
            out.extend(universe.generate(*fam, &self.functor));
        }
        out
    }

    /// Parses a formula in this logic's signature.
    pub fn parse(&self, text: &str) -> Result<Formula> {
        let f = crate::formula::parse(text, &self.sig)?;
        self.check_operators(&f)?;
        Ok(f)
    }
}

fn scheme(text: &str, sig: &SimilarityType) -> AxiomScheme {
    let mut aliases = BTreeMap::new();
    let f = parse_with_aliases(text, sig, &mut aliases).unwrap_or_else(|e| panic!("built-in axiom `{text}`: {e}"));
    AxiomScheme::new(f).unwrap_or_else(|e| panic!("built-in axiom `{text}`: {e}"))
}

fn frame(text: &str, sig: &SimilarityType) -> FrameScheme {
    FrameScheme::Fixed(crate::formula::parse(text, sig).unwrap_or_else(|e| panic!("built-in frame condition `{text}`: {e}")))
}

fn kripke_sig() -> SimilarityType {
    SimilarityType::new(vec![(Family::Box, ParamDomain::None)])
}

fn cond_sig() -> SimilarityType {
    SimilarityType::new(vec![(Family::Cond, ParamDomain::None)])
}

fn graded_sig() -> SimilarityType {
    SimilarityType::new(vec![(Family::Geq, ParamDomain::Nat)])
}

fn measure_sig(mon: &Monoid) -> SimilarityType {
    let dom = match mon {
        Monoid::Nat => ParamDomain::Nat,
        Monoid::ZMod(m) => ParamDomain::ZMod(*m),
        Monoid::NonNegRat => ParamDomain::NonNegRational,
    };
    SimilarityType::new(vec![(Family::Exact, dom)])
}

/// Names accepted by [`get_logic`].
pub fn logic_names() -> Vec<&'static str> {
    vec![
        "K",
        "KT",
        "K4",
        "S4",
        "KB",
        "CK",
        "CK+ID",
        "CK+ID+DIS",
        "SystemC",
        "GML",
        "GML+refl",
        "GML+symm",
        "GML+trans",
        "GML+refl+trans",
        "PML",
        "AddMeasure(N)",
        "AddMeasure(Z2)",
        "GMLminus",
        "ExactProb",
    ]
}

/// Looks up a registered logic.
pub fn get_logic(name: &str) -> Result<Logic> {
    let unknown = || Error::UnknownLogic(name.to_string());
    let kripke = |frames: &[&str]| {
        let sig = kripke_sig();
        let axioms = vec![scheme("[]true", &sig), scheme("[](p0 -> p1) -> ([]p0 -> []p1)", &sig)];
        let frames = frames.iter().map(|f| frame(f, &sig)).collect();
        Logic::new(name, sig, FunctorKind::Powerset { fin_branching: false }, axioms, vec![], frames)
    };
    let conditional = |extra: &[&str], functor: FunctorKind| {
        let sig = cond_sig();
        let mut axioms = vec![scheme("p0 => true", &sig), scheme("(p0 => (p1 -> p2)) -> ((p0 => p1) -> (p0 => p2))", &sig)];
        axioms.extend(extra.iter().map(|a| scheme(a, &sig)));
        Logic::new(name, sig, functor, axioms, vec![], vec![])
    };
    const ID: &str = "p0 => p0";
    const DIS: &str = "(p0 => p2) & (p1 => p2) -> ((p0 | p1) => p2)";
    const CM: &str = "(p0 => p2) & (p0 => p1) -> ((p0 & p1) => p2)";
    match name {
        "K" => kripke(&[]),
        "KT" | "T" => kripke(&["[]p0 -> p0"]),
        "K4" => kripke(&["[]p0 -> [][]p0"]),
        "S4" => kripke(&["[]p0 -> p0", "[]p0 -> [][]p0"]),
        "KB" => kripke(&["p0 -> []<>p0"]),
        "CK" => conditional(&[], FunctorKind::Selection),
        "CK+ID" => conditional(&[ID], FunctorKind::SubSelection(SelectionAxioms::Id)),
        "CK+ID+DIS" => conditional(&[ID, DIS], FunctorKind::SubSelection(SelectionAxioms::IdDis)),
        "SystemC" | "CK+ID+DIS+CM" => conditional(&[ID, DIS, CM], FunctorKind::SubSelection(SelectionAxioms::IdDisCm)),
        "PML" => {
            let sig = SimilarityType::new(vec![(Family::Prob, ParamDomain::UnitRational)]);
            Logic::new(name, sig, FunctorKind::Distribution, vec![], vec![SchemeFamily::Probabilistic], vec![])
        }
        "GMLminus" => {
            let sig = SimilarityType::new(vec![(Family::Exact, ParamDomain::PositiveNat), (Family::Measurable, ParamDomain::None)]);
            let axioms = vec![
                scheme("E(true)", &sig),
                scheme("E(p0) -> E(!p0)", &sig),
                scheme("E(p0) & E(p1) -> E(p0 & p1)", &sig),
            ];
            let families = vec![SchemeFamily::Additive, SchemeFamily::BoundedMeasure];
            Logic::new(name, sig, FunctorKind::BoundedMeasure, axioms, families, vec![])
        }
        "ExactProb" => {
            let sig = SimilarityType::new(vec![(Family::Exact, ParamDomain::UnitRational)]);
            let families = vec![SchemeFamily::Additive, SchemeFamily::ExactProb];
            Logic::new(name, sig, FunctorKind::ExactProb, vec![], families, vec![])
        }
        _ => {
            if let Some(rest) = name.strip_prefix("GML") {
                return graded(name, rest).ok_or_else(unknown)?;
            }
            if let Some(m) = name.strip_prefix("AddMeasure(").and_then(|r| r.strip_suffix(')')) {
                let mon = Monoid::from_name(m).ok_or_else(unknown)?;
                let sig = measure_sig(&mon);
                return Logic::new(name, sig, FunctorKind::AddMeasure(mon), vec![], vec![SchemeFamily::Additive], vec![]);
            }
            Err(unknown())
        }
    }
}

/// `GML` with any combination of `+refl`, `+symm`, `+trans`.
fn graded(name: &str, suffix: &str) -> Option<Result<Logic>> {
    let sig = graded_sig();
    let mut frames = Vec::new();
    for part in suffix.split('+').skip(1) {
        match part {
            "refl" => frames.push(frame("p0 -> geq[1](p0)", &sig)),
            "symm" => frames.push(frame("p0 -> [](geq[1](p0))", &sig)),
            "trans" => frames.push(FrameScheme::GradedTransitivity),
            _ => return None,
        }
    }
    if !suffix.is_empty() && !suffix.starts_with('+') {
        return None;
    }
    let axioms = vec![scheme("[](p0 -> p1) -> ([]p0 -> []p1)", &sig), scheme("[]true", &sig)];
    Some(Logic::new(name, sig, FunctorKind::InfMultiset, axioms, vec![SchemeFamily::Graded], frames))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LogicFile {
    name: String,
    functor: String,
    #[serde(default)]
    families: Option<Vec<String>>,
    #[serde(default)]
    axioms: Vec<String>,
    #[serde(default)]
    frame_conditions: Vec<String>,
}

/// The operator families a functor interprets, with parameter domains.
pub fn default_signature(functor: &FunctorKind) -> SimilarityType {
    match functor {
        FunctorKind::Powerset { .. } => kripke_sig(),
        FunctorKind::InfMultiset | FunctorKind::FinMultiset => graded_sig(),
        FunctorKind::Selection | FunctorKind::SubSelection(_) => cond_sig(),
        FunctorKind::Distribution => SimilarityType::new(vec![(Family::Prob, ParamDomain::UnitRational)]),
        FunctorKind::AddMeasure(m) => measure_sig(m),
        FunctorKind::BoundedMeasure => {
            SimilarityType::new(vec![(Family::Exact, ParamDomain::PositiveNat), (Family::Measurable, ParamDomain::None)])
        }
        FunctorKind::ExactProb => SimilarityType::new(vec![(Family::Exact, ParamDomain::UnitRational)]),
    }
}

/// Reads a logic from TOML:
///
/// ```toml
/// name = "K-variant"
/// functor = "Powerset"
/// families = ["box"]          # optional; defaults to all the functor interprets
/// axioms = ["[]true", "[](v0 -> v1) -> ([]v0 -> []v1)"]
/// frame_conditions = ["[]v0 -> v0"]
/// ```
///
/// Scheme variables are written `v0, v1, …` (any atom name works).
pub fn load_logic(text: &str) -> Result<Logic> {
    let file: LogicFile = toml::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    let functor = FunctorKind::from_name(&file.functor, None)?;
    let full = default_signature(&functor);
    let sig = match &file.families {
        None => full,
        Some(names) => {
            let mut fams = Vec::new();
            for n in names {
                let fam = match n.as_str() {
                    "box" => Family::Box,
                    "cond" => Family::Cond,
                    "geq" => Family::Geq,
                    "L" => Family::Prob,
                    "E[]" | "E_m" | "Em" => Family::Exact,
                    "E" => Family::Measurable,
                    _ => return Err(Error::UnknownOperator(n.clone())),
                };
                let dom = full
                    .domain(fam)
                    .cloned()
                    .ok_or_else(|| Error::FunctorMismatch { op: n.clone(), functor: functor.to_string() })?;
                fams.push((fam, dom));
            }
            SimilarityType::new(fams)
        }
    };
    let mut axioms = Vec::new();
    for a in &file.axioms {
        let mut aliases = BTreeMap::new();
        axioms.push(AxiomScheme::new(parse_with_aliases(a, &sig, &mut aliases)?)?);
    }
    let mut frames = Vec::new();
    for t in &file.frame_conditions {
        let mut aliases = BTreeMap::new();
        frames.push(FrameScheme::Fixed(parse_with_aliases(t, &sig, &mut aliases)?));
    }
    Logic::new(file.name, sig, functor, axioms, vec![], frames)
}

/// Scalar parameters of an operator list, by family.
pub(crate) fn params_of<'a>(ops: impl IntoIterator<Item = &'a OperatorSymbol>, family: Family) -> Vec<Scalar> {
    ops.into_iter().filter(|o| o.family() == family).filter_map(|o| o.param().cloned()).collect()
}

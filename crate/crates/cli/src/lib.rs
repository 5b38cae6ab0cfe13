//! Command-line front end: every verb is a function from arguments to an
//! exit code and the text it prints.

pub mod probes;

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use coalgml::canonical::{
    build_quasi_canonical, check_coherence, enumerate_mcs, frame_report, mutate, verify_truth_lemma, Choice,
    FrameStatus, Fragment, Tower,
};
use coalgml::formula::{parse_with_aliases, prop_entails, rat_to_string, render, Formula, Prop, SimilarityType};
use coalgml::logic::{default_signature, get_logic, load_logic, one_step_consistent, one_step_derivable, parse_one_step, Logic};
use coalgml::onestep::{caps_for, one_step_witness, Provenance};
use coalgml::semantics::{
    frame_violation, model_to_json, read_model, write_model, Caps, Model, StateSet, TValue, FRAME_CHECK_BUDGET,
};
use coalgml::{Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use probes::{compactness_probe, Scenario, DEFAULT_PROBE_BOUND};

#[derive(Parser, Debug)]
#[command(name = "coalgml", version, about = "Coalgebraic modal logic workbench")]
struct Cli {
    /// Registered logic name, or a path to a logic file.
    #[arg(long, global = true)]
    logic: Option<String>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Work bound: values scanned per level, valuations per frame check,
    /// or the largest probe size.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse and print a formula.
    Parse {
        #[arg(long)]
        formula: String,
    },
    /// Propositional validity, or one-step derivability with --carrier.
    Taut {
        #[arg(long)]
        formula: String,
        #[arg(long)]
        carrier: Option<usize>,
    },
    /// Truth of a formula at a state of a model file.
    Modelcheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        state: String,
        #[arg(long)]
        formula: String,
    },
    /// Frame conditions on the coalgebra of a model file; the logic's own
    /// conditions when no --formula is given.
    Framecheck {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        formula: Vec<String>,
        #[arg(long, default_value_t = 2)]
        grade_cap: u64,
    },
    /// One-step satisfiability over the states s0, ..., s{carrier-1}.
    OnestepSat {
        #[arg(long)]
        carrier: usize,
        #[arg(long, required = true)]
        phi: Vec<String>,
        #[arg(long, default_value_t = 2)]
        grade_cap: u64,
        #[arg(long, default_value_t = 4)]
        den_cap: u64,
    },
    /// The levels of maximally consistent sets of a fragment.
    Mcs {
        #[command(flatten)]
        fragment: FragmentArgs,
        /// Print the members of the top level.
        #[arg(long)]
        list: bool,
    },
    /// A model on the top level of a fragment, with its checks.
    BuildCanonical {
        #[command(flatten)]
        fragment: FragmentArgs,
        /// constructed, min or max.
        #[arg(long, default_value = "constructed")]
        choice: String,
        /// Also print the transition structure as a DOT graph.
        #[arg(long)]
        dot: bool,
        /// Corrupt this many transitions and report detection.
        #[arg(long, default_value_t = 0)]
        mutate: usize,
    },
    /// Finite subsets of a family with no model as a whole.
    Probe {
        /// finbranch-K, imagefinite-GML or PML.
        #[arg(long)]
        scenario: String,
        #[arg(long, default_value_t = 5)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct FragmentArgs {
    #[arg(long, default_value_t = 1)]
    props: u32,
    #[arg(long, default_value_t = 1)]
    depth: usize,
    #[arg(long, default_value_t = 2)]
    grade_cap: u64,
    #[arg(long, default_value_t = 4)]
    den_cap: u64,
}

/// What a command prints and how it exits: 0 success or true, 1 false,
/// unsatisfiable or a violation, 2 usage or budget errors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn new(ok: bool, stdout: String) -> Self {
        Outcome { code: if ok { 0 } else { 1 }, stdout, stderr: String::new() }
    }

    fn error(msg: String) -> Self {
        Outcome { code: 2, stdout: String::new(), stderr: format!("error: {msg}\n") }
    }
}

/// Runs one command line; `args` excludes the program name.
pub fn run<I, S>(args: I) -> Outcome
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv = std::iter::once(std::ffi::OsString::from("coalgml")).chain(args.into_iter().map(Into::into));
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => Outcome::new(true, text),
                _ => Outcome { code: 2, stdout: String::new(), stderr: text },
            };
        }
    };
    match dispatch(&cli) {
        Ok((ok, text)) => Outcome::new(ok, text),
        Err(e) => Outcome::error(e.to_string()),
    }
}

type Report = (bool, String);

fn dispatch(cli: &Cli) -> Result<Report> {
    match &cli.command {
        Command::Parse { formula } => cmd_parse(cli, formula),
        Command::Taut { formula, carrier } => cmd_taut(cli, formula, *carrier),
        Command::Modelcheck { model, state, formula } => cmd_modelcheck(cli, model, state, formula),
        Command::Framecheck { model, formula, grade_cap } => cmd_framecheck(cli, model, formula, *grade_cap),
        Command::OnestepSat { carrier, phi, grade_cap, den_cap } => {
            cmd_onestep_sat(cli, *carrier, phi, &Caps::new(*grade_cap, *den_cap))
        }
        Command::Mcs { fragment, list } => cmd_mcs(cli, fragment, *list),
        Command::BuildCanonical { fragment, choice, dot, mutate } => {
            cmd_build_canonical(cli, fragment, &choice.parse()?, *dot, *mutate)
        }
        Command::Probe { scenario, n } => {
            let bound = cli.budget.map_or(DEFAULT_PROBE_BOUND, |b| b as usize);
            let report = compactness_probe(scenario.parse::<Scenario>()?, *n, bound)?;
            let ok = report.rows.iter().all(|r| r.satisfiable && r.model_checked) && report.monotone();
            Ok((ok, if cli.json { json_text(&report.to_json()) } else { report.to_string() }))
        }
    }
}

fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

/// A registered name, or a logic file when the argument names one.
fn resolve_logic(name: Option<&str>) -> Result<Logic> {
    let name = name.unwrap_or("K");
    if Path::new(name).is_file() {
        let text = std::fs::read_to_string(name).map_err(|e| Error::Format(format!("{name}: {e}")))?;
        return load_logic(&text);
    }
    get_logic(name)
}

fn logic(cli: &Cli) -> Result<Logic> {
    resolve_logic(cli.logic.as_deref())
}

fn read_model_file(path: &Path) -> Result<(Model, BTreeMap<String, u32>)> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    read_model(&text)
}

fn cmd_parse(cli: &Cli, text: &str) -> Result<Report> {
    let l = logic(cli)?;
    let f = l.parse(text)?;
    let rendered = render(&f);
    Ok((
        true,
        if cli.json {
            json_text(&json!({"formula": rendered, "depth": f.modal_depth(), "rank_one": f.is_rank_one()}))
        } else {
            format!("{rendered}\ndepth {}\n", f.modal_depth())
        },
    ))
}

/// Boolean structure over propositions and outermost modal subformulas.
fn skeleton(f: &Formula, atoms: &mut Vec<Formula>) -> Prop<u32> {
    let mut index = |g: &Formula| match atoms.iter().position(|a| a == g) {
        Some(i) => i as u32,
        None => {
            atoms.push(g.clone());
            (atoms.len() - 1) as u32
        }
    };
    match f {
        Formula::Bottom => Prop::not(Prop::top()),
        Formula::Not(a) => Prop::not(skeleton(a, atoms)),
        Formula::And(a, b) => {
            let a = skeleton(a, atoms);
            Prop::and(a, skeleton(b, atoms))
        }
        Formula::Atom(_) | Formula::Modal(..) => Prop::atom(index(f)),
    }
}

fn cmd_taut(cli: &Cli, text: &str, carrier: Option<usize>) -> Result<Report> {
    let l = logic(cli)?;
    let (valid, what) = match carrier {
        None => {
            let f = l.parse(text)?;
            let mut atoms = Vec::new();
            let p = skeleton(&f, &mut atoms);
            (prop_entails(&[], &p)?, "a propositional tautology")
        }
        Some(n) => {
            let f = parse_one_step(text, &l.sig, n)?;
            (one_step_derivable(&l, n, &f)?, "derivable from the one-step axiom instances")
        }
    };
    Ok((
        valid,
        if cli.json {
            json_text(&json!({"formula": text, "logic": l.name, "carrier": carrier, "valid": valid}))
        } else {
            format!("{} {}\n", if valid { "is" } else { "is not" }, what)
        },
    ))
}

/// The logic's signature when given, else the model functor's own.
fn model_signature(cli: &Cli, m: &Model) -> Result<SimilarityType> {
    match &cli.logic {
        Some(_) => Ok(logic(cli)?.sig),
        None => Ok(default_signature(m.coalgebra.functor())),
    }
}

fn cmd_modelcheck(cli: &Cli, path: &Path, state: &str, text: &str) -> Result<Report> {
    let (m, mut aliases) = read_model_file(path)?;
    let sig = model_signature(cli, &m)?;
    let f = parse_with_aliases(text, &sig, &mut aliases)?;
    let holds = m.check(m.coalgebra.index_of(state)?, &f)?;
    Ok((
        holds,
        if cli.json {
            json_text(&json!({"state": state, "formula": render(&f), "holds": holds}))
        } else {
            format!("{} at {state}\n", if holds { "holds" } else { "fails" })
        },
    ))
}

fn cmd_framecheck(cli: &Cli, path: &Path, texts: &[String], grade: u64) -> Result<Report> {
    let (m, mut aliases) = read_model_file(path)?;
    let conditions: Vec<Formula> = if texts.is_empty() {
        logic(cli)?.frame_conditions(grade)
    } else {
        let sig = model_signature(cli, &m)?;
        texts.iter().map(|t| parse_with_aliases(t, &sig, &mut aliases)).collect::<Result<_>>()?
    };
    let budget = cli.budget.unwrap_or(FRAME_CHECK_BUDGET);
    let c = &m.coalgebra;
    let mut rows = Vec::new();
    let mut ok = true;
    for theta in &conditions {
        let vars = theta.atoms();
        let violation = frame_violation(c, std::slice::from_ref(theta), &vars, budget)?;
        ok &= violation.is_none();
        rows.push((render(theta), violation.map(|v| {
            let val: BTreeMap<String, Vec<&str>> = v
                .valuation
                .iter()
                .map(|(p, s)| (format!("p{p}"), s.iter().map(|x| c.states()[x].as_str()).collect()))
                .collect();
            (c.states()[v.state].clone(), val)
        })));
    }
    let text = if cli.json {
        json_text(&json!({
            "holds": ok,
            "conditions": rows.iter().map(|(f, v)| match v {
                None => json!({"condition": f, "holds": true}),
                Some((s, val)) => json!({"condition": f, "holds": false, "state": s, "valuation": val}),
            }).collect::<Vec<_>>(),
        }))
    } else {
        let mut out = String::new();
        if rows.is_empty() {
            out.push_str("no frame conditions\n");
        }
        for (f, v) in &rows {
            match v {
                None => writeln!(out, "{f}: holds").unwrap(),
                Some((s, val)) => {
                    let val: Vec<String> = val.iter().map(|(p, xs)| format!("{p} = {{{}}}", xs.join(","))).collect();
                    writeln!(out, "{f}: fails at {s} when {}", val.join(", ")).unwrap()
                }
            }
        }
        out
    };
    Ok((ok, text))
}

fn state_names(n: usize) -> String {
    (0..n).map(|i| format!("s{i}")).collect::<Vec<_>>().join(", ")
}

/// One line per argument set for selection functions, the value otherwise.
fn witness_table(t: &TValue, n: usize) -> Vec<String> {
    let set = |s: &StateSet| format!("{{{}}}", s.iter().map(|x| format!("s{x}")).collect::<Vec<_>>().join(","));
    match t {
        TValue::Selection(f) if n <= 6 => {
            StateSet::all_subsets(n).map(|a| format!("{} -> {}", set(&a), set(&f.apply(&a)))).collect()
        }
        _ => vec![t.to_string()],
    }
}

fn cmd_onestep_sat(cli: &Cli, n: usize, texts: &[String], caps: &Caps) -> Result<Report> {
    let l = logic(cli)?;
    let phi = texts.iter().map(|t| parse_one_step(t, &l.sig, n)).collect::<Result<Vec<_>>>()?;
    let consistent = one_step_consistent(&l, n, &phi)?;
    let witness = match one_step_witness(&l, n, &phi, None, &caps_for(&phi, caps)) {
        Ok(w) => Some(w),
        Err(Error::NoWitness(_)) | Err(Error::Inconsistent(_)) => None,
        Err(e) => return Err(e),
    };
    let how = |p: Provenance| match p {
        Provenance::Constructed => "constructed",
        Provenance::BruteForce => "scan",
    };
    let text = if cli.json {
        json_text(&json!({
            "logic": l.name,
            "carrier": n,
            "consistent": consistent,
            "satisfiable": witness.is_some(),
            "witness": witness.as_ref().map(|w| w.t.to_string()),
            "provenance": witness.as_ref().map(|w| how(w.provenance)),
        }))
    } else {
        let mut out = format!("carrier {}\nconsistent: {}\n", state_names(n), if consistent { "yes" } else { "no" });
        match &witness {
            Some(w) => {
                writeln!(out, "witness ({}):", how(w.provenance)).unwrap();
                for line in witness_table(&w.t, n) {
                    writeln!(out, "  {line}").unwrap();
                }
            }
            None => out.push_str("no witness\n"),
        }
        out
    };
    Ok((witness.is_some(), text))
}

fn fragment(cli: &Cli, a: &FragmentArgs) -> Result<Fragment> {
    let mut f = Fragment::new(logic(cli)?, a.props, a.depth, Caps::new(a.grade_cap, a.den_cap));
    if let Some(b) = cli.budget {
        f.value_cap = b as usize;
        f.closure_cap = b as usize;
    }
    Ok(f)
}

fn describe(f: &Fragment) -> String {
    format!(
        "logic {}, {} prop(s), depth {}, grade cap {}, denominator cap {}",
        f.logic.name, f.props, f.depth, f.caps.mult, f.caps.den
    )
}

fn member_line(tower: &Tower, i: usize) -> String {
    let level = tower.level(tower.depth());
    let m = &level.states[i];
    let props: Vec<String> = m.props.iter().map(|p| format!("p{p}")).collect();
    let atoms: Vec<String> = m.profile.iter().map(|j| level.atoms[j].to_string()).collect();
    format!("#{i}: props {{{}}} atoms {{{}}}", props.join(","), atoms.join(", "))
}

fn cmd_mcs(cli: &Cli, a: &FragmentArgs, list: bool) -> Result<Report> {
    let frag = fragment(cli, a)?;
    let tower = enumerate_mcs(&frag)?;
    let counts = tower.counts();
    let closure_len = tower.closure()?.len();
    let text = if cli.json {
        let members: Vec<String> =
            if list { (0..tower.level(tower.depth()).len()).map(|i| member_line(&tower, i)).collect() } else { vec![] };
        json_text(&json!({"logic": frag.logic.name, "counts": counts, "closure": closure_len, "members": members}))
    } else {
        let mut out = format!("{}\n", describe(&frag));
        for (k, c) in counts.iter().enumerate() {
            writeln!(out, "|S_{k}| = {c}").unwrap();
        }
        writeln!(out, "closure atoms: {closure_len}").unwrap();
        if list {
            for i in 0..tower.level(tower.depth()).len() {
                writeln!(out, "{}", member_line(&tower, i)).unwrap();
            }
        }
        out
    };
    Ok((true, text))
}

/// Edges of the transition structure with an optional weight label.
fn edges(t: &TValue) -> Vec<(usize, Option<String>)> {
    match t {
        TValue::Subset(s) => s.iter().map(|x| (x, None)).collect(),
        TValue::Multiset(b) => b.iter().map(|(x, m)| (*x, Some(m.to_string()))).collect(),
        TValue::Distribution(d) => d.iter().map(|(x, w)| (*x, Some(rat_to_string(w)))).collect(),
        TValue::Selection(f) => f.support().iter().map(|x| (*x, None)).collect(),
        TValue::Measure(m) => m.support().iter().map(|x| (*x, None)).collect(),
    }
}

fn dot(m: &Model) -> String {
    let c = &m.coalgebra;
    let mut out = String::from("digraph model {\n");
    for (i, name) in c.states().iter().enumerate() {
        let props: Vec<String> =
            m.valuation.iter().filter(|(_, s)| s.contains(i)).map(|(p, _)| format!("p{p}")).collect();
        writeln!(out, "  {name} [label=\"{name}\\n{}\"];", props.join(",")).unwrap();
    }
    for (i, name) in c.states().iter().enumerate() {
        for (x, label) in edges(c.transition(i)) {
            match label {
                Some(l) => writeln!(out, "  {name} -> {} [label=\"{l}\"];", c.states()[x]).unwrap(),
                None => writeln!(out, "  {name} -> {};", c.states()[x]).unwrap(),
            }
        }
    }
    out.push_str("}\n");
    out
}

fn cmd_build_canonical(cli: &Cli, a: &FragmentArgs, choice: &Choice, with_dot: bool, mutations: usize) -> Result<Report> {
    let frag = fragment(cli, a)?;
    let tower = enumerate_mcs(&frag)?;
    let q = build_quasi_canonical(&tower, *choice)?;
    let closure_len = tower.closure()?.len();
    let violations = verify_truth_lemma(&tower, &q.model)?;
    let incoherent = check_coherence(&tower, &q.model)?;
    let frames = frame_report(&tower, &q.model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    let mut detected = Vec::new();
    for _ in 0..mutations {
        match mutate(&tower, &q.model, &mut rng)? {
            Some((state, corrupted)) => detected.push((state, verify_truth_lemma(&tower, &corrupted)?.len())),
            None => break,
        }
    }
    let ok = violations.is_empty() && incoherent.is_empty() && detected.iter().all(|(_, v)| *v > 0);
    let label = if frag.frame_conditions.is_empty() { "quasi-canonical" } else { "truncated-canonical" };
    let names: BTreeMap<u32, String> = BTreeMap::new();
    let status = |s: &FrameStatus| match s {
        FrameStatus::Holds => "holds".to_string(),
        FrameStatus::Fails(i) => format!("fails at G{i}"),
        FrameStatus::Skipped(msg) => format!("skipped ({msg})"),
    };
    let pass = |b: bool| if b { "PASS" } else { "FAIL" };
    let text = if cli.json {
        json_text(&json!({
            "logic": frag.logic.name,
            "kind": label,
            "counts": tower.counts(),
            "closure": closure_len,
            "constructed": q.constructed(),
            "coherence": incoherent.len(),
            "truth_lemma": violations.iter().map(|v| json!({
                "state": format!("G{}", v.state), "formula": v.formula, "member": v.member, "holds": v.holds,
            })).collect::<Vec<_>>(),
            "frame_conditions": frames.iter().map(|(f, s)| json!({"condition": render(f), "status": status(s)})).collect::<Vec<_>>(),
            "mutations": detected.iter().map(|(s, v)| json!({"state": format!("G{s}"), "violations": v})).collect::<Vec<_>>(),
            "model": model_to_json(&q.model, &names),
            "dot": with_dot.then(|| dot(&q.model)),
        }))
    } else {
        let mut out = format!("{} ({label})\n", describe(&frag));
        let counts: Vec<String> = tower.counts().iter().enumerate().map(|(k, c)| format!("|S_{k}| = {c}")).collect();
        writeln!(out, "levels: {}", counts.join(", ")).unwrap();
        writeln!(out, "closure atoms: {closure_len}").unwrap();
        if *choice == Choice::Constructed {
            writeln!(out, "witnesses: {} constructed, {} by scan", q.constructed(), q.model.coalgebra.len() - q.constructed())
                .unwrap();
        }
        writeln!(out, "coherence: {}", pass(incoherent.is_empty())).unwrap();
        writeln!(out, "truth lemma: {} ({} violations)", pass(violations.is_empty()), violations.len()).unwrap();
        for v in violations.iter().take(10) {
            writeln!(out, "  G{}: {} member {} holds {}", v.state, v.formula, v.member, v.holds).unwrap();
        }
        if frames.is_empty() {
            out.push_str("frame conditions: none\n");
        }
        for (f, s) in &frames {
            writeln!(out, "frame condition {}: {}", render(f), status(s)).unwrap();
        }
        for (s, v) in &detected {
            writeln!(out, "mutation at G{s}: {v} violation(s) ({})", if *v > 0 { "detected" } else { "missed" }).unwrap();
        }
        out.push_str("model:\n");
        out.push_str(&write_model(&q.model, &names));
        if !out.ends_with('\n') {
            out.push('\n');
        }
        if with_dot {
            out.push_str(&dot(&q.model));
        }
        out
    };
    Ok((ok, text))
}

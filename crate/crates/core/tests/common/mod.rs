//! Random instance generators and brute-force oracles shared by the
//! integration suites.
#![allow(dead_code, clippy::result_large_err)]

use std::collections::{BTreeSet, HashMap};

use cafcoal::af::{naive, AcceptanceMode, ArgumentId, ArgumentationFramework, Semantics};
use cafcoal::caf::{ControlFramework, QueryMode, TargetQuery};
use cafcoal::catl::{AgentId, CafAtsSystem, Formula, JointAction};
use rand::seq::SliceRandom;
use rand::Rng;

/// Proptest settings without failure files (the suites run from a workspace).
pub fn cases(n: u32) -> proptest::test_runner::Config {
    proptest::test_runner::Config {
        cases: n,
        failure_persistence: None,
        ..Default::default()
    }
}

pub fn id(s: &str) -> ArgumentId {
    ArgumentId::new(s).unwrap()
}

/// Framework over `a0..a{n-1}` whose attack relation is the bit pattern `mask`
/// over the `n * n` ordered pairs.
pub fn af_from_mask(n: usize, mask: u64) -> ArgumentationFramework {
    let names: Vec<ArgumentId> = (0..n).map(|i| id(&format!("a{i}"))).collect();
    let mut attacks = Vec::new();
    for bit in 0..n * n {
        if mask & (1 << bit) != 0 {
            attacks.push((names[bit / n].clone(), names[bit % n].clone()));
        }
    }
    ArgumentationFramework::new(names, attacks).unwrap()
}

pub fn random_af(rng: &mut impl Rng, n: usize) -> ArgumentationFramework {
    let density: f64 = rng.gen_range(0.05..0.5);
    let names: Vec<ArgumentId> = (0..n).map(|i| id(&format!("a{i}"))).collect();
    let mut attacks = Vec::new();
    for a in &names {
        for b in &names {
            if rng.gen_bool(density) {
                attacks.push((a.clone(), b.clone()));
            }
        }
    }
    ArgumentationFramework::new(names, attacks).unwrap()
}

/// Sizes of each component of a random control framework.
#[derive(Debug, Clone, Copy)]
pub struct CafShape {
    pub fixed: usize,
    pub uncertain: usize,
    pub control: usize,
    pub uncertain_attacks: usize,
    pub symmetric_attacks: usize,
    pub certain_density: f64,
}

impl CafShape {
    pub fn small(rng: &mut impl Rng) -> Self {
        Self {
            fixed: rng.gen_range(1..=4),
            uncertain: rng.gen_range(0..=3),
            control: rng.gen_range(0..=3),
            uncertain_attacks: rng.gen_range(0..=3),
            symmetric_attacks: rng.gen_range(0..=2),
            certain_density: rng.gen_range(0.1..0.4),
        }
    }
}

pub fn random_caf(rng: &mut impl Rng, shape: CafShape) -> ControlFramework {
    let fixed: Vec<String> = (0..shape.fixed).map(|i| format!("f{i}")).collect();
    let uncertain: Vec<String> = (0..shape.uncertain).map(|i| format!("u{i}")).collect();
    let control: Vec<String> = (0..shape.control).map(|i| format!("c{i}")).collect();
    let mut b = ControlFramework::builder();
    for a in &fixed {
        b.fixed(a).unwrap();
    }
    for a in &uncertain {
        b.uncertain(a).unwrap();
    }
    for a in &control {
        b.control(a).unwrap();
    }
    let non_control: Vec<&String> = fixed.iter().chain(&uncertain).collect();
    let all: Vec<&String> = non_control.iter().copied().chain(&control).collect();
    let mut used: BTreeSet<(String, String)> = BTreeSet::new();

    let mut pairs: Vec<(&String, &String)> = non_control
        .iter()
        .flat_map(|a| non_control.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| a < b)
        .collect();
    pairs.shuffle(rng);
    for (p, q) in pairs.into_iter().take(shape.symmetric_attacks) {
        let (x, y) = if rng.gen_bool(0.5) { (p, q) } else { (q, p) };
        assert!(b.symmetric_attack(x, y).unwrap());
        used.insert((p.clone(), q.clone()));
        used.insert((q.clone(), p.clone()));
    }
    let mut pairs: Vec<(&String, &String)> = non_control
        .iter()
        .flat_map(|a| non_control.iter().map(move |b| (*a, *b)))
        .filter(|(a, b)| !used.contains(&((*a).clone(), (*b).clone())))
        .collect();
    pairs.shuffle(rng);
    for (p, q) in pairs.into_iter().take(shape.uncertain_attacks) {
        b.uncertain_attack(p, q).unwrap();
        used.insert((p.clone(), q.clone()));
    }
    for a in &all {
        for c in &all {
            if !used.contains(&((*a).clone(), (*c).clone())) && rng.gen_bool(shape.certain_density) {
                b.attack(a, c).unwrap();
            }
        }
    }
    b.build().unwrap()
}

pub fn small_caf(rng: &mut impl Rng) -> ControlFramework {
    let shape = CafShape::small(rng);
    random_caf(rng, shape)
}

/// One completion as computed by the oracle: present uncertain arguments and
/// the non-control attacks that are in force.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct OracleCompletion {
    pub present: BTreeSet<ArgumentId>,
    pub attacks: BTreeSet<(ArgumentId, ArgumentId)>,
}

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    (0..1u64 << items.len())
        .map(|m| {
            items
                .iter()
                .enumerate()
                .filter(|(i, _)| m & (1 << i) != 0)
                .map(|(_, x)| x.clone())
                .collect()
        })
        .collect()
}

/// All completions by direct enumeration, deduplicated.
pub fn oracle_completions(caf: &ControlFramework) -> BTreeSet<OracleCompletion> {
    let uncertain: Vec<ArgumentId> = caf.uncertain_arguments().iter().cloned().collect();
    let mut out = BTreeSet::new();
    for chosen in subsets(&uncertain) {
        let present: BTreeSet<ArgumentId> = chosen.into_iter().collect();
        let here = |a: &ArgumentId| caf.fixed_arguments().contains(a) || present.contains(a);
        let relevant: Vec<(ArgumentId, ArgumentId)> = caf
            .uncertain_attacks()
            .iter()
            .filter(|(a, b)| here(a) && here(b))
            .cloned()
            .collect();
        let symmetric: Vec<(ArgumentId, ArgumentId)> = caf
            .symmetric_attacks()
            .iter()
            .filter(|(a, b)| here(a) && here(b))
            .cloned()
            .collect();
        let base: BTreeSet<(ArgumentId, ArgumentId)> = caf
            .fixed_attacks()
            .iter()
            .filter(|(a, b)| here(a) && here(b))
            .cloned()
            .collect();
        for on in subsets(&relevant) {
            let mut choice = vec![0usize; symmetric.len()];
            loop {
                let mut attacks = base.clone();
                attacks.extend(on.iter().cloned());
                for ((a, b), &c) in symmetric.iter().zip(&choice) {
                    if c != 1 {
                        attacks.insert((a.clone(), b.clone()));
                    }
                    if c != 0 {
                        attacks.insert((b.clone(), a.clone()));
                    }
                }
                out.insert(OracleCompletion {
                    present: present.clone(),
                    attacks,
                });
                // base-3 counter
                let mut i = 0;
                while i < choice.len() && choice[i] == 2 {
                    choice[i] = 0;
                    i += 1;
                }
                if i == choice.len() {
                    break;
                }
                choice[i] += 1;
            }
        }
    }
    out
}

pub fn oracle_framework(
    caf: &ControlFramework,
    c: &OracleCompletion,
    config: &BTreeSet<ArgumentId>,
) -> ArgumentationFramework {
    let args: Vec<ArgumentId> = caf
        .fixed_arguments()
        .iter()
        .chain(&c.present)
        .chain(config)
        .cloned()
        .collect();
    let set: BTreeSet<&ArgumentId> = args.iter().collect();
    let mut attacks: Vec<(ArgumentId, ArgumentId)> = c.attacks.iter().cloned().collect();
    attacks.extend(
        caf.control_attacks()
            .iter()
            .filter(|(a, b)| set.contains(a) && set.contains(b))
            .cloned(),
    );
    ArgumentationFramework::new(args, attacks).unwrap()
}

pub fn oracle_holds(af: &ArgumentationFramework, q: &TargetQuery) -> bool {
    let idx = af.index_of(q.target.as_str()).unwrap();
    naive::is_accepted(af, idx, q.semantics, q.mode.acceptance()) == q.mode.wants_acceptance()
}

/// Configurations smallest first, lexicographic within a size.
pub fn oracle_configurations(caf: &ControlFramework) -> Vec<BTreeSet<ArgumentId>> {
    let control: Vec<ArgumentId> = caf.control_arguments().iter().cloned().collect();
    let mut all: Vec<Vec<ArgumentId>> = subsets(&control);
    all.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    all.into_iter().map(|v| v.into_iter().collect()).collect()
}

pub fn oracle_check(caf: &ControlFramework, config: &BTreeSet<ArgumentId>, q: &TargetQuery) -> bool {
    oracle_completions(caf)
        .iter()
        .all(|c| oracle_holds(&oracle_framework(caf, c, config), q))
}

/// The ∃∀ search written as a plain double loop.
pub fn oracle_control(caf: &ControlFramework, q: &TargetQuery) -> Option<BTreeSet<ArgumentId>> {
    let completions = oracle_completions(caf);
    oracle_configurations(caf).into_iter().find(|config| {
        completions
            .iter()
            .all(|c| oracle_holds(&oracle_framework(caf, c, config), q))
    })
}

pub fn random_query(rng: &mut impl Rng, caf: &ControlFramework) -> TargetQuery {
    let fixed: Vec<&ArgumentId> = caf.fixed_arguments().iter().collect();
    TargetQuery::new(
        (*fixed.choose(rng).unwrap()).clone(),
        *Semantics::ALL.choose(rng).unwrap(),
        *QueryMode::ALL.choose(rng).unwrap(),
    )
}

pub const PROPS: [&str; 2] = ["p", "r"];

/// A control framework source used by generated systems.
pub const CAF_SOURCES: [(&str, &str); 2] = [
    ("k0.caf", "farg(t). uarg(u). carg(c). uatt(u,t). att(c,u).\n"),
    (
        "k1.caf",
        "farg(t). uarg(u). carg(c). uarg(v). uatt(u,t). uatt(v,t). att(c,u).\n",
    ),
];

pub fn caf_loader(path: &str) -> Result<String, String> {
    CAF_SOURCES
        .iter()
        .find(|(p, _)| *p == path)
        .map(|(_, text)| text.to_string())
        .ok_or_else(|| format!("no file `{path}`"))
}

pub fn load_caf(path: &str) -> ControlFramework {
    cafcoal::formats::parse_caf(&caf_loader(path).unwrap()).unwrap().value
}

/// A random total system: up to `max_states` states, up to `max_agents`
/// agents and at most `max_moves` moves per agent and state.
pub fn random_system(rng: &mut impl Rng, max_states: usize, max_agents: u32, max_moves: u32) -> CafAtsSystem {
    let n = rng.gen_range(1..=max_agents);
    let states: Vec<String> = (0..rng.gen_range(1..=max_states)).map(|i| format!("s{i}")).collect();
    let mut b = CafAtsSystem::builder(n).unwrap();
    for s in &states {
        b.state(s).unwrap();
    }
    b.initial(states.choose(rng).unwrap()).unwrap();
    let cafs = rng.gen_range(1..=CAF_SOURCES.len());
    for (k, (path, _)) in CAF_SOURCES.iter().enumerate().take(cafs) {
        b.caf(k, *path, load_caf(path)).unwrap();
    }
    let mut updates = BTreeSet::new();
    for p in PROPS {
        // every proposition labels at least one state, so formulas over
        // PROPS are always well formed
        b.label(states.choose(rng).unwrap(), p).unwrap();
    }
    for s in &states {
        for p in PROPS {
            if rng.gen_bool(0.3) {
                b.label(s, p).unwrap();
            }
        }
        if rng.gen_bool(0.3) {
            b.state_caf(s, rng.gen_range(0..cafs)).unwrap();
        }
        let counts: Vec<u32> = (0..n).map(|_| rng.gen_range(1..=max_moves)).collect();
        for (i, &k) in counts.iter().enumerate() {
            b.moves(s, i as u32 + 1, k).unwrap();
        }
        for action in product(&counts) {
            let k = rng.gen_range(0..cafs);
            if rng.gen_bool(0.2) && cafs > 1 && updates.insert((k, action.clone())) {
                b.model_update(k, action.clone(), rng.gen_range(0..cafs)).unwrap();
            }
            b.transition(s, action, states.choose(rng).unwrap()).unwrap();
        }
    }
    b.build().unwrap()
}

/// Every move vector with `moves[i]` in `1..=counts[i]`, lexicographic.
pub fn product(counts: &[u32]) -> Vec<JointAction> {
    let mut out = vec![vec![]];
    for &k in counts {
        out = out
            .into_iter()
            .flat_map(|prefix: Vec<u32>| {
                (1..=k).map(move |m| {
                    let mut v = prefix.clone();
                    v.push(m);
                    v
                })
            })
            .collect();
    }
    out.into_iter().map(JointAction::new).collect()
}

pub fn random_coalition(rng: &mut impl Rng, agents: u32) -> BTreeSet<AgentId> {
    (1..=agents)
        .filter(|_| rng.gen_bool(0.5))
        .map(|i| AgentId::new(i).unwrap())
        .collect()
}

pub fn random_formula(rng: &mut impl Rng, agents: u32, depth: usize, zeta: bool) -> Formula {
    let leaf = depth == 0 || rng.gen_bool(0.3);
    if leaf {
        return if zeta && rng.gen_bool(0.25) {
            Formula::zeta(id("t"))
        } else {
            Formula::prop(*PROPS.choose(rng).unwrap())
        };
    }
    let sub = |rng: &mut _| random_formula(rng, agents, depth - 1, zeta);
    match rng.gen_range(0..5) {
        0 => Formula::not(sub(rng)),
        1 => Formula::and(sub(rng), sub(rng)),
        2 => Formula::implies(sub(rng), sub(rng)),
        3 => Formula::or(sub(rng), sub(rng)),
        _ => Formula::Coalition(random_coalition(rng, agents), Box::new(sub(rng))),
    }
}

/// Pretty much `Display`, but with redundant parentheses sprinkled in and
/// disjunctions written with `|` where the shape allows it.
pub fn noisy_formula(rng: &mut impl Rng, f: &Formula) -> String {
    let inner = match f {
        Formula::Prop(p) => p.clone(),
        Formula::Zeta(a) => format!("zeta( {a} )"),
        Formula::Not(x) => match x.as_ref() {
            Formula::And(a, b) => match (a.as_ref(), b.as_ref()) {
                (Formula::Not(l), Formula::Not(r)) if rng.gen_bool(0.5) => {
                    format!("({} | {})", noisy_formula(rng, l), noisy_formula(rng, r))
                }
                _ => format!("!({})", noisy_formula(rng, x)),
            },
            _ => format!("!({})", noisy_formula(rng, x)),
        },
        Formula::And(a, b) => format!("({}) & ({})", noisy_formula(rng, a), noisy_formula(rng, b)),
        Formula::Implies(a, b) => format!("({})->({})", noisy_formula(rng, a), noisy_formula(rng, b)),
        Formula::Coalition(agents, x) => {
            let list: Vec<String> = agents.iter().map(|a| a.to_string()).collect();
            format!("<< {} >>({})", list.join(" , "), noisy_formula(rng, x))
        }
    };
    if rng.gen_bool(0.3) {
        format!("({inner})")
    } else {
        inner
    }
}

/// Writes `facts` in random order with random spacing and comments.
pub fn scramble(rng: &mut impl Rng, mut facts: Vec<String>) -> String {
    facts.shuffle(rng);
    let mut out = String::new();
    if rng.gen_bool(0.3) {
        out.push_str("% generated\n");
    }
    for f in facts {
        let spaced = if rng.gen_bool(0.3) {
            f.replace(',', " , ").replace('(', "( ")
        } else {
            f
        };
        out.push_str(&spaced);
        out.push_str(match rng.gen_range(0..4) {
            0 => " ",
            1 => "  % note\n",
            2 => "\n\n",
            _ => "\n",
        });
    }
    out
}

/// Facts of a system in a fresh, non-canonical order.
pub fn system_facts(sys: &CafAtsSystem) -> Vec<String> {
    let mut facts = Vec::new();
    for a in sys.agents() {
        facts.push(format!("agent({a})."));
    }
    for (i, q) in sys.states().iter().enumerate() {
        facts.push(format!("state({q})."));
        if sys.state_caf(i) != 0 {
            facts.push(format!("statecaf({q},{}).", sys.state_caf(i)));
        }
        for a in sys.agents() {
            if sys.move_count(i, a) != 1 {
                facts.push(format!("moves({q},{a},{}).", sys.move_count(i, a)));
            }
        }
        for p in sys.label(i) {
            facts.push(format!("prop({q},{p})."));
        }
        for action in sys.legal_joint_actions(q.as_str()).unwrap() {
            let (next, _) = sys.step(q.as_str(), &action, 0).unwrap();
            facts.push(format!("trans({q},{action},{next})."));
        }
    }
    facts.push(format!("init({}).", sys.initial_state()));
    for (k, e) in sys.cafs().iter().enumerate() {
        facts.push(format!("caf({k}, \"{}\").", e.source));
    }
    for ((k, action), next) in sys.model_updates() {
        facts.push(format!("upsilon({k},{action},{next})."));
    }
    facts
}

pub fn caf_facts(caf: &ControlFramework, rng: &mut impl Rng) -> Vec<String> {
    let mut facts = Vec::new();
    facts.extend(caf.fixed_arguments().iter().map(|a| format!("farg({a}).")));
    facts.extend(caf.uncertain_arguments().iter().map(|a| format!("uarg({a}).")));
    facts.extend(caf.control_arguments().iter().map(|a| format!("carg({a}).")));
    facts.extend(
        caf.fixed_attacks()
            .iter()
            .chain(caf.control_attacks())
            .map(|(a, b)| format!("att({a},{b}).")),
    );
    facts.extend(caf.uncertain_attacks().iter().map(|(a, b)| format!("uatt({a},{b}).")));
    for (a, b) in caf.symmetric_attacks() {
        facts.push(if rng.gen_bool(0.5) {
            format!("satt({a},{b}).")
        } else {
            format!("satt({b},{a}).")
        });
    }
    facts
}

/// Successor states of `state` under every legal joint action, via the
/// public step function.
pub fn successors(sys: &CafAtsSystem, state: &str) -> Vec<(JointAction, String)> {
    sys.legal_joint_actions(state)
        .unwrap()
        .into_iter()
        .map(|a| {
            let (next, _) = sys.step(state, &a, 0).unwrap();
            (a, next.to_string())
        })
        .collect()
}

/// Names drawn for generated APX/TGF frameworks, including numeric ones.
pub fn random_names(rng: &mut impl Rng, n: usize) -> Vec<String> {
    let mut pool: Vec<String> = (0..12)
        .map(|i| match i % 3 {
            0 => format!("a{i}"),
            1 => format!("{i}"),
            _ => format!("x_{i}"),
        })
        .collect();
    pool.shuffle(rng);
    pool.truncate(n);
    pool
}

pub fn random_named_af(rng: &mut impl Rng) -> (Vec<String>, Vec<(String, String)>) {
    let n = rng.gen_range(1..=8);
    let names = random_names(rng, n);
    let mut attacks = Vec::new();
    for a in &names {
        for b in &names {
            if rng.gen_bool(0.2) {
                attacks.push((a.clone(), b.clone()));
            }
        }
    }
    (names, attacks)
}

pub fn index_map(af: &ArgumentationFramework) -> HashMap<String, usize> {
    af.arguments()
        .iter()
        .enumerate()
        .map(|(i, a)| (a.to_string(), i))
        .collect()
}

pub fn accepts_naive(af: &ArgumentationFramework, a: usize, sem: Semantics, mode: AcceptanceMode) -> bool {
    naive::is_accepted(af, a, sem, mode)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Apx,
    Tgf,
    Caf,
    Catl,
    Formula,
}

impl Format {
    pub const ALL: [Format; 5] = [Format::Apx, Format::Tgf, Format::Caf, Format::Catl, Format::Formula];
}

/// A random valid input in a non-canonical layout.
pub fn valid_text(format: Format, rng: &mut impl Rng) -> String {
    match format {
        Format::Apx => {
            let (names, attacks) = random_named_af(rng);
            let mut facts: Vec<String> = names.iter().map(|a| format!("arg({a}).")).collect();
            facts.extend(attacks.iter().map(|(a, b)| format!("att({a},{b}).")));
            scramble(rng, facts)
        }
        Format::Tgf => {
            let (mut names, mut attacks) = random_named_af(rng);
            names.shuffle(rng);
            attacks.shuffle(rng);
            let mut out = String::new();
            for n in names {
                out.push_str(&n);
                out.push_str(if rng.gen_bool(0.2) { "  % node\n\n" } else { "\n" });
            }
            out.push_str("#\n");
            for (a, b) in attacks {
                out.push_str(&format!("{a}{}{b}\n", if rng.gen_bool(0.2) { "   " } else { " " }));
            }
            out
        }
        Format::Caf => {
            let caf = small_caf(rng);
            let facts = caf_facts(&caf, rng);
            scramble(rng, facts)
        }
        Format::Catl => {
            let sys = random_system(rng, 4, 3, 3);
            scramble(rng, system_facts(&sys))
        }
        Format::Formula => {
            let f = random_formula(rng, 3, 4, true);
            noisy_formula(rng, &f)
        }
    }
}

/// Parses, serializes and reparses `text`, reporting any difference.
pub fn round_trip(format: Format, text: &str) -> Result<(), String> {
    use cafcoal::formats::*;
    fn check<T: PartialEq + std::fmt::Debug, E: std::fmt::Display>(
        text: &str,
        parse: impl Fn(&str) -> Result<T, E>,
        serialize: impl Fn(&T) -> String,
    ) -> Result<(), String> {
        let first = parse(text).map_err(|e| format!("valid input rejected: {e}\n{text}"))?;
        let canonical = serialize(&first);
        let second = parse(&canonical).map_err(|e| format!("canonical form rejected: {e}\n{canonical}"))?;
        if first != second {
            return Err(format!("reparse differs\n{text}\n---\n{canonical}"));
        }
        if serialize(&second) != canonical {
            return Err(format!("serialization not idempotent\n{canonical}"));
        }
        Ok(())
    }
    match format {
        Format::Apx => check(text, parse_apx, serialize_apx),
        Format::Tgf => check(text, parse_tgf, serialize_tgf),
        Format::Caf => check(text, |t| parse_caf(t).map(|p| p.value), serialize_caf),
        Format::Catl => check(
            text,
            |t| parse_catl_with(t, &mut caf_loader).map(|p| p.value),
            serialize_catl,
        ),
        Format::Formula => check(text, parse_formula, serialize_formula),
    }
}

/// Applies one to three random edits.
pub fn mutate(rng: &mut impl Rng, text: &str) -> String {
    const JUNK: &[&str] = &[
        "(", ")", ".", ",", "#", "\"", "%", "\n", "é", "0", "x", "<<", ">>", "->", "!", "&", " ", "att(", "((", "\t",
    ];
    let mut s: Vec<char> = text.chars().collect();
    for _ in 0..rng.gen_range(1..=3) {
        let at = rng.gen_range(0..=s.len());
        match rng.gen_range(0..4) {
            0 if !s.is_empty() => {
                s.remove(at.min(s.len() - 1));
            }
            1 => {
                let junk = JUNK.choose(rng).unwrap();
                for (k, c) in junk.chars().enumerate() {
                    s.insert(at + k, c);
                }
            }
            2 => s.truncate(at),
            _ if !s.is_empty() => {
                let i = at.min(s.len() - 1);
                s[i] = JUNK.choose(rng).unwrap().chars().next().unwrap();
            }
            _ => s.push(')'),
        }
    }
    s.into_iter().collect()
}

/// Outcome of feeding one (possibly) malformed input to a parser.
pub enum Malformed {
    /// Still valid after mutation.
    Accepted,
    /// Rejected with a location inside the input.
    Located,
    /// Rejected, but the location points outside the input.
    BadLocation(String),
    Panicked,
}

pub fn feed_malformed(format: Format, text: &str) -> Malformed {
    use cafcoal::formats::*;
    let text_owned = text.to_string();
    let outcome = std::panic::catch_unwind(move || -> Result<(), ParseDiagnostic> {
        let t = text_owned.as_str();
        match format {
            Format::Apx => parse_apx(t).map(drop),
            Format::Tgf => parse_tgf(t).map(drop),
            Format::Caf => parse_caf(t).map(drop),
            Format::Catl => parse_catl_with(t, &mut caf_loader).map(drop),
            Format::Formula => parse_formula(t).map(drop),
        }
    });
    match outcome {
        Err(_) => Malformed::Panicked,
        Ok(Ok(())) => Malformed::Accepted,
        Ok(Err(d)) => {
            let lines: Vec<&str> = text.split('\n').collect();
            let (line, col) = (d.location.line, d.location.column);
            let ok = line >= 1 && line <= lines.len() && col >= 1 && col <= lines[line - 1].len() + 1;
            if ok {
                Malformed::Located
            } else {
                Malformed::BadLocation(format!("{d} for {text:?}"))
            }
        }
    }
}

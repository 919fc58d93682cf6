//! Control argumentation frameworks.
//!
//! A control framework splits its arguments into a fixed part (always
//! present), an uncertain part (may or may not be present, as may some
//! attacks) and a control part (arguments the agent chooses to put forward).
//! A *completion* resolves all uncertainty; a *configuration* picks control
//! arguments. A target is controlled when one configuration yields the wanted
//! status in every completion.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::af::{AcceptanceMode, AfError, ArgumentId, ArgumentationFramework, Semantics};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CafError {
    #[error("argument `{0}` declared in more than one part")]
    PartOverlap(ArgumentId),
    #[error("argument `{0}` is not declared")]
    UnknownArgument(String),
    #[error("uncertain attack ({0},{1}) touches a control argument")]
    IllegalUncertainControlAttack(ArgumentId, ArgumentId),
    #[error("symmetric attack on `{0}` with itself")]
    ReflexiveSymmetricAttack(ArgumentId),
    #[error("attack ({0},{1}) declared in more than one attack set")]
    OverlappingAttack(ArgumentId, ArgumentId),
    #[error("control framework has no fixed arguments")]
    EmptyFixedPart,
    #[error("target `{0}` is not a fixed argument")]
    TargetNotFixed(String),
    #[error("completion count exceeds the budget of {limit}")]
    CompletionBudgetExceeded { limit: u64 },
    #[error("configuration count exceeds the budget of {limit}")]
    ConfigurationBudgetExceeded { limit: u64 },
    #[error("completion does not belong to this control framework")]
    ForeignCompletion,
    #[error("configuration does not belong to this control framework")]
    ForeignConfiguration,
    #[error(transparent)]
    Af(#[from] AfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Fixed,
    Uncertain,
    Control,
}

/// How a symmetric attack `{a, b}` (stored with `a < b`) is resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
    Both,
}

impl Direction {
    const ALL: [Direction; 3] = [Direction::Forward, Direction::Backward, Direction::Both];
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QueryMode {
    CredulousAccept,
    SkepticalAccept,
    CredulousReject,
    SkepticalReject,
}

impl QueryMode {
    pub const ALL: [QueryMode; 4] = [
        QueryMode::CredulousAccept,
        QueryMode::SkepticalAccept,
        QueryMode::CredulousReject,
        QueryMode::SkepticalReject,
    ];

    pub fn acceptance(self) -> AcceptanceMode {
        match self {
            QueryMode::CredulousAccept | QueryMode::CredulousReject => AcceptanceMode::Credulous,
            QueryMode::SkepticalAccept | QueryMode::SkepticalReject => AcceptanceMode::Skeptical,
        }
    }

    /// Reject modes hold exactly when the matching accept test fails.
    pub fn wants_acceptance(self) -> bool {
        matches!(self, QueryMode::CredulousAccept | QueryMode::SkepticalAccept)
    }

    pub fn name(self) -> &'static str {
        match self {
            QueryMode::CredulousAccept => "credulous-accept",
            QueryMode::SkepticalAccept => "skeptical-accept",
            QueryMode::CredulousReject => "credulous-reject",
            QueryMode::SkepticalReject => "skeptical-reject",
        }
    }
}

impl fmt::Display for QueryMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        QueryMode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| format!("unknown mode `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetQuery {
    pub target: ArgumentId,
    pub semantics: Semantics,
    pub mode: QueryMode,
}

impl TargetQuery {
    pub fn new(target: ArgumentId, semantics: Semantics, mode: QueryMode) -> Self {
        Self {
            target,
            semantics,
            mode,
        }
    }
}

/// Caps on the exponential searches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub max_completions: u64,
    pub max_configurations: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            max_completions: 1 << 20,
            max_configurations: 1 << 16,
        }
    }
}

/// A set of selected control arguments.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Configuration {
    selected: BTreeSet<ArgumentId>,
}

impl Configuration {
    pub fn new(selected: impl IntoIterator<Item = ArgumentId>) -> Self {
        Self {
            selected: selected.into_iter().collect(),
        }
    }

    pub fn selected(&self) -> &BTreeSet<ArgumentId> {
        &self.selected
    }

    pub fn contains(&self, arg: &str) -> bool {
        self.selected.contains(arg)
    }

    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.selected.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

/// One resolution of all uncertainty.
///
/// Vectors are indexed like the sorted uncertain arguments, uncertain attacks
/// and symmetric attacks of the owning framework. Attack choices whose
/// endpoints are absent are `false` / `None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Completion {
    present: Vec<bool>,
    attacks: Vec<bool>,
    directions: Vec<Option<Direction>>,
}

impl Completion {
    pub fn included_uncertain<'a>(&'a self, caf: &'a ControlFramework) -> impl Iterator<Item = &'a ArgumentId> + 'a {
        caf.uncertain
            .iter()
            .zip(&self.present)
            .filter(|(_, &p)| p)
            .map(|(a, _)| a)
    }

    pub fn included_uncertain_attacks<'a>(
        &'a self,
        caf: &'a ControlFramework,
    ) -> impl Iterator<Item = &'a (ArgumentId, ArgumentId)> + 'a {
        caf.uncertain_attacks
            .iter()
            .zip(&self.attacks)
            .filter(|(_, &p)| p)
            .map(|(a, _)| a)
    }

    pub fn direction_choices<'a>(
        &'a self,
        caf: &'a ControlFramework,
    ) -> impl Iterator<Item = (&'a (ArgumentId, ArgumentId), Direction)> + 'a {
        caf.symmetric_attacks
            .iter()
            .zip(&self.directions)
            .filter_map(|(pair, d)| d.map(|d| (pair, d)))
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ControlFramework {
    fixed: BTreeSet<ArgumentId>,
    uncertain: BTreeSet<ArgumentId>,
    control: BTreeSet<ArgumentId>,
    fixed_attacks: BTreeSet<(ArgumentId, ArgumentId)>,
    control_attacks: BTreeSet<(ArgumentId, ArgumentId)>,
    uncertain_attacks: BTreeSet<(ArgumentId, ArgumentId)>,
    symmetric_attacks: BTreeSet<(ArgumentId, ArgumentId)>,
}

/// Incremental, validating constructor for [`ControlFramework`].
///
/// Arguments must be declared before attacks that mention them.
#[derive(Debug, Clone, Default)]
pub struct ControlFrameworkBuilder {
    parts: HashMap<ArgumentId, Part>,
    caf: ControlFramework,
}

impl ControlFrameworkBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn argument(&mut self, name: ArgumentId, part: Part) -> Result<&mut Self, CafError> {
        match self.parts.get(&name) {
            Some(&p) if p == part => return Ok(self),
            Some(_) => return Err(CafError::PartOverlap(name)),
            None => {}
        }
        self.parts.insert(name.clone(), part);
        match part {
            Part::Fixed => self.caf.fixed.insert(name),
            Part::Uncertain => self.caf.uncertain.insert(name),
            Part::Control => self.caf.control.insert(name),
        };
        Ok(self)
    }

    pub fn fixed(&mut self, name: &str) -> Result<&mut Self, CafError> {
        self.argument(ArgumentId::new(name)?, Part::Fixed)
    }

    pub fn uncertain(&mut self, name: &str) -> Result<&mut Self, CafError> {
        self.argument(ArgumentId::new(name)?, Part::Uncertain)
    }

    pub fn control(&mut self, name: &str) -> Result<&mut Self, CafError> {
        self.argument(ArgumentId::new(name)?, Part::Control)
    }

    fn part(&self, name: &str) -> Result<(ArgumentId, Part), CafError> {
        let id = ArgumentId::new(name)?;
        match self.parts.get(&id) {
            Some(&p) => Ok((id, p)),
            None => Err(CafError::UnknownArgument(name.to_string())),
        }
    }

    fn overlaps(&self, from: &ArgumentId, to: &ArgumentId) -> bool {
        let pair = (from.clone(), to.clone());
        let caf = &self.caf;
        caf.fixed_attacks.contains(&pair)
            || caf.control_attacks.contains(&pair)
            || caf.uncertain_attacks.contains(&pair)
            || caf.symmetric_attacks.contains(&ordered(from, to))
    }

    /// A certain attack. Goes to the control part when an endpoint is a
    /// control argument, to the fixed part otherwise.
    pub fn attack(&mut self, from: &str, to: &str) -> Result<&mut Self, CafError> {
        let (f, fp) = self.part(from)?;
        let (t, tp) = self.part(to)?;
        let control = fp == Part::Control || tp == Part::Control;
        let pair = (f.clone(), t.clone());
        let target = if control {
            &self.caf.control_attacks
        } else {
            &self.caf.fixed_attacks
        };
        if !target.contains(&pair) && self.overlaps(&f, &t) {
            return Err(CafError::OverlappingAttack(f, t));
        }
        if control {
            self.caf.control_attacks.insert(pair);
        } else {
            self.caf.fixed_attacks.insert(pair);
        }
        Ok(self)
    }

    pub fn uncertain_attack(&mut self, from: &str, to: &str) -> Result<&mut Self, CafError> {
        let (f, fp) = self.part(from)?;
        let (t, tp) = self.part(to)?;
        if fp == Part::Control || tp == Part::Control {
            return Err(CafError::IllegalUncertainControlAttack(f, t));
        }
        let pair = (f.clone(), t.clone());
        if !self.caf.uncertain_attacks.contains(&pair) && self.overlaps(&f, &t) {
            return Err(CafError::OverlappingAttack(f, t));
        }
        self.caf.uncertain_attacks.insert(pair);
        Ok(self)
    }

    /// Declares the unordered pair `{a, b}`. Returns `false` when the pair was
    /// already declared (in either orientation).
    pub fn symmetric_attack(&mut self, a: &str, b: &str) -> Result<bool, CafError> {
        let (x, xp) = self.part(a)?;
        let (y, yp) = self.part(b)?;
        if x == y {
            return Err(CafError::ReflexiveSymmetricAttack(x));
        }
        if xp == Part::Control || yp == Part::Control {
            return Err(CafError::IllegalUncertainControlAttack(x, y));
        }
        let pair = ordered(&x, &y);
        if self.caf.symmetric_attacks.contains(&pair) {
            return Ok(false);
        }
        if self.overlaps(&x, &y) || self.overlaps(&y, &x) {
            return Err(CafError::OverlappingAttack(x, y));
        }
        self.caf.symmetric_attacks.insert(pair);
        Ok(true)
    }

    pub fn build(self) -> Result<ControlFramework, CafError> {
        if self.caf.fixed.is_empty() {
            return Err(CafError::EmptyFixedPart);
        }
        Ok(self.caf)
    }
}

fn ordered(a: &ArgumentId, b: &ArgumentId) -> (ArgumentId, ArgumentId) {
    if a <= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    }
}

impl ControlFramework {
    pub fn builder() -> ControlFrameworkBuilder {
        ControlFrameworkBuilder::new()
    }

    pub fn fixed_arguments(&self) -> &BTreeSet<ArgumentId> {
        &self.fixed
    }

    pub fn uncertain_arguments(&self) -> &BTreeSet<ArgumentId> {
        &self.uncertain
    }

    pub fn control_arguments(&self) -> &BTreeSet<ArgumentId> {
        &self.control
    }

    pub fn fixed_attacks(&self) -> &BTreeSet<(ArgumentId, ArgumentId)> {
        &self.fixed_attacks
    }

    pub fn control_attacks(&self) -> &BTreeSet<(ArgumentId, ArgumentId)> {
        &self.control_attacks
    }

    pub fn uncertain_attacks(&self) -> &BTreeSet<(ArgumentId, ArgumentId)> {
        &self.uncertain_attacks
    }

    /// Unordered pairs, each stored with the smaller name first.
    pub fn symmetric_attacks(&self) -> &BTreeSet<(ArgumentId, ArgumentId)> {
        &self.symmetric_attacks
    }

    pub fn part_of(&self, name: &str) -> Option<Part> {
        if self.fixed.contains(name) {
            Some(Part::Fixed)
        } else if self.uncertain.contains(name) {
            Some(Part::Uncertain)
        } else if self.control.contains(name) {
            Some(Part::Control)
        } else {
            None
        }
    }

    /// Positions of the uncertain endpoints of a pair, `None` for fixed ones.
    fn uncertain_positions(&self, pair: &(ArgumentId, ArgumentId)) -> [Option<usize>; 2] {
        let pos = |a: &ArgumentId| self.uncertain.iter().position(|u| u == a);
        [pos(&pair.0), pos(&pair.1)]
    }

    fn endpoints_present(positions: &[Option<usize>; 2], mask: u64) -> bool {
        positions.iter().all(|p| p.is_none_or(|i| mask & (1 << i) != 0))
    }

    /// Number of distinct completions, or an error once it passes the budget.
    pub fn completion_count(&self, limits: &Limits) -> Result<u64, CafError> {
        let cap = limits.max_completions;
        let exceeded = CafError::CompletionBudgetExceeded { limit: cap };
        let k = self.uncertain.len();
        if k >= 63 || (1u64 << k) > cap {
            return Err(exceeded);
        }
        let attack_pos: Vec<_> = self
            .uncertain_attacks
            .iter()
            .map(|p| self.uncertain_positions(p))
            .collect();
        let sym_pos: Vec<_> = self
            .symmetric_attacks
            .iter()
            .map(|p| self.uncertain_positions(p))
            .collect();
        let mut total: u64 = 0;
        for mask in 0..(1u64 << k) {
            let r = attack_pos.iter().filter(|p| Self::endpoints_present(p, mask)).count() as u32;
            let s = sym_pos.iter().filter(|p| Self::endpoints_present(p, mask)).count() as u32;
            let here = 2u64
                .checked_pow(r)
                .and_then(|x| 3u64.checked_pow(s).and_then(|y| x.checked_mul(y)));
            total = match here.and_then(|h| total.checked_add(h)) {
                Some(t) if t <= cap => t,
                _ => return Err(exceeded),
            };
        }
        Ok(total)
    }

    /// Lazily walks every completion: uncertain arguments in binary counting
    /// order, then uncertain attacks likewise, then symmetric pairs as base-3
    /// counters over forward, backward, both.
    pub fn completions(&self) -> Completions<'_> {
        Completions::new(self)
    }

    pub fn enumerate_completions(&self, limits: &Limits) -> Result<Vec<Completion>, CafError> {
        self.completion_count(limits)?;
        Ok(self.completions().collect())
    }

    fn check_completion(&self, completion: &Completion) -> Result<(), CafError> {
        if completion.present.len() != self.uncertain.len()
            || completion.attacks.len() != self.uncertain_attacks.len()
            || completion.directions.len() != self.symmetric_attacks.len()
        {
            return Err(CafError::ForeignCompletion);
        }
        let mask = completion
            .present
            .iter()
            .enumerate()
            .fold(0u64, |m, (i, &p)| if p { m | 1 << i } else { m });
        for (pair, &on) in self.uncertain_attacks.iter().zip(&completion.attacks) {
            if on && !Self::endpoints_present(&self.uncertain_positions(pair), mask) {
                return Err(CafError::ForeignCompletion);
            }
        }
        for (pair, d) in self.symmetric_attacks.iter().zip(&completion.directions) {
            if d.is_some() != Self::endpoints_present(&self.uncertain_positions(pair), mask) {
                return Err(CafError::ForeignCompletion);
            }
        }
        Ok(())
    }

    fn check_configuration_membership(&self, config: &Configuration) -> Result<(), CafError> {
        if config.selected.iter().all(|c| self.control.contains(c)) {
            Ok(())
        } else {
            Err(CafError::ForeignConfiguration)
        }
    }

    /// The plain framework a completion and a configuration give rise to.
    ///
    /// Arguments are ordered fixed, then present uncertain, then selected
    /// control, each group by name. Attacks with an absent endpoint are dropped.
    pub fn induced_framework(
        &self,
        completion: &Completion,
        config: &Configuration,
    ) -> Result<ArgumentationFramework, CafError> {
        self.check_completion(completion)?;
        self.check_configuration_membership(config)?;
        Ok(self.induce(completion, config))
    }

    fn induce(&self, completion: &Completion, config: &Configuration) -> ArgumentationFramework {
        let names: Vec<ArgumentId> = self
            .fixed
            .iter()
            .chain(completion.included_uncertain(self))
            .chain(config.selected.iter())
            .cloned()
            .collect();
        let index: HashMap<&ArgumentId, usize> = names.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let both = |pair: &(ArgumentId, ArgumentId)| Some((*index.get(&pair.0)?, *index.get(&pair.1)?));
        let mut attacks = Vec::new();
        attacks.extend(self.fixed_attacks.iter().filter_map(both));
        attacks.extend(self.control_attacks.iter().filter_map(both));
        attacks.extend(completion.included_uncertain_attacks(self).filter_map(both));
        for ((a, b), direction) in completion.direction_choices(self) {
            let (x, y) = (index[a], index[b]);
            if direction != Direction::Backward {
                attacks.push((x, y));
            }
            if direction != Direction::Forward {
                attacks.push((y, x));
            }
        }
        ArgumentationFramework::from_parts(names, attacks)
    }

    fn check_target(&self, query: &TargetQuery) -> Result<(), CafError> {
        if self.fixed.contains(&query.target) {
            Ok(())
        } else if self.part_of(query.target.as_str()).is_some() {
            Err(CafError::TargetNotFixed(query.target.to_string()))
        } else {
            Err(CafError::UnknownArgument(query.target.to_string()))
        }
    }

    fn satisfied_in(&self, completion: &Completion, config: &Configuration, query: &TargetQuery) -> bool {
        let af = self.induce(completion, config);
        let target = af
            .index_of(query.target.as_str())
            .expect("fixed arguments are always present");
        af.accepts(target, query.semantics, query.mode.acceptance()) == query.mode.wants_acceptance()
    }

    /// True iff the query holds under `config` in every completion.
    pub fn check_configuration(
        &self,
        config: &Configuration,
        query: &TargetQuery,
        limits: &Limits,
    ) -> Result<bool, CafError> {
        self.check_target(query)?;
        self.check_configuration_membership(config)?;
        self.completion_count(limits)?;
        Ok(self.completions().all(|c| self.satisfied_in(&c, config, query)))
    }

    /// Every configuration, smallest first and lexicographic within a size.
    pub fn configurations(&self, limits: &Limits) -> Result<Vec<Configuration>, CafError> {
        let n = self.control.len();
        if n >= 63 || (1u64 << n) > limits.max_configurations {
            return Err(CafError::ConfigurationBudgetExceeded {
                limit: limits.max_configurations,
            });
        }
        let control: Vec<&ArgumentId> = self.control.iter().collect();
        let mut out = Vec::with_capacity(1 << n);
        for size in 0..=n {
            combinations(n, size, &mut |picked| {
                out.push(Configuration::new(picked.iter().map(|&i| control[i].clone())));
            });
        }
        Ok(out)
    }

    /// The first configuration (in [`configurations`](Self::configurations)
    /// order) that controls the query, if any.
    pub fn find_controlling_configuration(
        &self,
        query: &TargetQuery,
        limits: &Limits,
    ) -> Result<Option<Configuration>, CafError> {
        self.check_target(query)?;
        let configs = self.configurations(limits)?;
        self.completion_count(limits)?;
        let completions: Vec<Completion> = self.completions().collect();
        Ok(configs
            .into_iter()
            .find(|config| completions.iter().all(|c| self.satisfied_in(c, config, query))))
    }
}

/// Calls `visit` with each `size`-subset of `0..n` in lexicographic order.
fn combinations(n: usize, size: usize, visit: &mut dyn FnMut(&[usize])) {
    fn go(start: usize, n: usize, size: usize, acc: &mut Vec<usize>, visit: &mut dyn FnMut(&[usize])) {
        if acc.len() == size {
            visit(acc);
            return;
        }
        for i in start..n {
            if n - i < size - acc.len() {
                break;
            }
            acc.push(i);
            go(i + 1, n, size, acc, visit);
            acc.pop();
        }
    }
    go(0, n, size, &mut Vec::with_capacity(size), visit);
}

pub struct Completions<'a> {
    caf: &'a ControlFramework,
    attack_pos: Vec<[Option<usize>; 2]>,
    sym_pos: Vec<[Option<usize>; 2]>,
    mask: u64,
    relevant_attacks: Vec<usize>,
    relevant_syms: Vec<usize>,
    attack_mask: u64,
    directions: Vec<usize>,
    done: bool,
}

impl<'a> Completions<'a> {
    fn new(caf: &'a ControlFramework) -> Self {
        let attack_pos = caf
            .uncertain_attacks
            .iter()
            .map(|p| caf.uncertain_positions(p))
            .collect();
        let sym_pos = caf
            .symmetric_attacks
            .iter()
            .map(|p| caf.uncertain_positions(p))
            .collect();
        let mut it = Self {
            caf,
            attack_pos,
            sym_pos,
            mask: 0,
            relevant_attacks: vec![],
            relevant_syms: vec![],
            attack_mask: 0,
            directions: vec![],
            done: false,
        };
        it.enter_mask();
        it
    }

    fn enter_mask(&mut self) {
        let mask = self.mask;
        self.relevant_attacks = (0..self.attack_pos.len())
            .filter(|&i| ControlFramework::endpoints_present(&self.attack_pos[i], mask))
            .collect();
        self.relevant_syms = (0..self.sym_pos.len())
            .filter(|&i| ControlFramework::endpoints_present(&self.sym_pos[i], mask))
            .collect();
        self.attack_mask = 0;
        self.directions = vec![0; self.relevant_syms.len()];
    }

    fn current(&self) -> Completion {
        let k = self.caf.uncertain.len();
        let mut attacks = vec![false; self.attack_pos.len()];
        for (bit, &i) in self.relevant_attacks.iter().enumerate() {
            attacks[i] = self.attack_mask & (1 << bit) != 0;
        }
        let mut directions = vec![None; self.sym_pos.len()];
        for (slot, &i) in self.relevant_syms.iter().enumerate() {
            directions[i] = Some(Direction::ALL[self.directions[slot]]);
        }
        Completion {
            present: (0..k).map(|i| self.mask & (1 << i) != 0).collect(),
            attacks,
            directions,
        }
    }

    fn advance(&mut self) {
        // innermost counter: symmetric directions, last pair fastest
        for d in self.directions.iter_mut().rev() {
            if *d < 2 {
                *d += 1;
                return;
            }
            *d = 0;
        }
        self.attack_mask += 1;
        if self.attack_mask < (1 << self.relevant_attacks.len()) {
            return;
        }
        self.mask += 1;
        if self.mask < (1 << self.caf.uncertain.len()) {
            self.enter_mask();
        } else {
            self.done = true;
        }
    }
}

impl Iterator for Completions<'_> {
    type Item = Completion;

    fn next(&mut self) -> Option<Completion> {
        if self.done {
            return None;
        }
        let out = self.current();
        self.advance();
        Some(out)
    }
}

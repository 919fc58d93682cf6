//! Dung abstract argumentation frameworks.
//!
//! A framework is a finite, non-empty set of arguments together with an attack
//! relation. Arguments keep the order in which they were declared; that order
//! drives every enumeration so output is reproducible run to run.

use std::borrow::Borrow;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use thiserror::Error;

pub mod naive;
mod search;

use search::{Base, Search};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AfError {
    #[error("argumentation framework has no arguments")]
    EmptyFramework,
    #[error("invalid argument name `{0}`")]
    InvalidArgumentName(String),
    #[error("argument `{0}` declared twice")]
    DuplicateArgument(String),
    #[error("argument `{0}` is not in the framework")]
    MemberNotInFramework(String),
}

/// Name of an argument: a non-empty token of ASCII letters, digits and `_`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ArgumentId(String);

impl ArgumentId {
    pub fn new(name: impl Into<String>) -> Result<Self, AfError> {
        let name = name.into();
        if Self::is_valid(&name) {
            Ok(Self(name))
        } else {
            Err(AfError::InvalidArgumentName(name))
        }
    }

    pub fn is_valid(name: &str) -> bool {
        !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for ArgumentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Borrow<str> for ArgumentId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

impl FromStr for ArgumentId {
    type Err = AfError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::new(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Semantics {
    Admissible,
    Complete,
    Grounded,
    Preferred,
    Stable,
}

impl Semantics {
    pub const ALL: [Semantics; 5] = [
        Semantics::Admissible,
        Semantics::Complete,
        Semantics::Grounded,
        Semantics::Preferred,
        Semantics::Stable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Semantics::Admissible => "admissible",
            Semantics::Complete => "complete",
            Semantics::Grounded => "grounded",
            Semantics::Preferred => "preferred",
            Semantics::Stable => "stable",
        }
    }
}

impl fmt::Display for Semantics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Semantics {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "admissible" | "ad" | "ADM" => Ok(Semantics::Admissible),
            "complete" | "co" | "CO" => Ok(Semantics::Complete),
            "grounded" | "gr" | "GR" => Ok(Semantics::Grounded),
            "preferred" | "pr" | "PR" => Ok(Semantics::Preferred),
            "stable" | "st" | "ST" => Ok(Semantics::Stable),
            other => Err(format!("unknown semantics `{other}`")),
        }
    }
}

/// Credulous: member of some extension. Skeptical: member of every extension,
/// which holds vacuously when there is no extension at all.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AcceptanceMode {
    Credulous,
    Skeptical,
}

/// A set of arguments of one framework, stored by argument index.
///
/// Extensions order by cardinality first, then lexicographically by the
/// sorted list of member indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Extension {
    members: FixedBitSet,
}

impl Extension {
    pub fn empty(universe: usize) -> Self {
        Self {
            members: FixedBitSet::with_capacity(universe),
        }
    }

    pub fn from_indices(universe: usize, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut ext = Self::empty(universe);
        for i in indices {
            ext.insert(i);
        }
        ext
    }

    /// Number of arguments of the framework the extension was built for.
    pub fn universe(&self) -> usize {
        self.members.len()
    }

    pub fn contains(&self, index: usize) -> bool {
        self.members.contains(index)
    }

    pub(crate) fn insert(&mut self, index: usize) {
        self.members.grow(index + 1);
        self.members.insert(index);
    }

    pub fn len(&self) -> usize {
        self.members.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_clear()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.ones()
    }

    pub fn is_subset(&self, other: &Extension) -> bool {
        self.iter().all(|i| other.contains(i))
    }

    pub fn names<'a>(&'a self, af: &'a ArgumentationFramework) -> impl Iterator<Item = &'a ArgumentId> + 'a {
        self.iter().map(move |i| af.name(i))
    }

    /// Renders as `{a, c}` using the framework's argument names.
    pub fn display<'a>(&'a self, af: &'a ArgumentationFramework) -> ExtensionDisplay<'a> {
        ExtensionDisplay { ext: self, af }
    }
}

impl PartialOrd for Extension {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Extension {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.iter().cmp(other.iter()))
    }
}

pub struct ExtensionDisplay<'a> {
    ext: &'a Extension,
    af: &'a ArgumentationFramework,
}

impl fmt::Display for ExtensionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, name) in self.ext.names(self.af).enumerate() {
            if k > 0 {
                f.write_str(", ")?;
            }
            f.write_str(name.as_str())?;
        }
        f.write_str("}")
    }
}

/// Result of a capped enumeration.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    pub extensions: Vec<Extension>,
    /// Set when the cap cut the list short.
    pub truncated: bool,
}

#[derive(Debug, Clone)]
pub struct ArgumentationFramework {
    names: Vec<ArgumentId>,
    index: HashMap<ArgumentId, usize>,
    attacks: BTreeSet<(usize, usize)>,
    attackers: Vec<Vec<usize>>,
    targets: Vec<Vec<usize>>,
}

/// Frameworks are equal when they have the same arguments and attacks,
/// regardless of declaration order.
impl PartialEq for ArgumentationFramework {
    fn eq(&self, other: &Self) -> bool {
        self.len() == other.len()
            && self.names.iter().all(|n| other.index.contains_key(n))
            && self.attack_names().collect::<BTreeSet<_>>() == other.attack_names().collect::<BTreeSet<_>>()
    }
}

impl Eq for ArgumentationFramework {}

impl ArgumentationFramework {
    pub fn new(
        arguments: impl IntoIterator<Item = ArgumentId>,
        attacks: impl IntoIterator<Item = (ArgumentId, ArgumentId)>,
    ) -> Result<Self, AfError> {
        let mut names = Vec::new();
        let mut index = HashMap::new();
        for arg in arguments {
            if index.contains_key(&arg) {
                return Err(AfError::DuplicateArgument(arg.0));
            }
            index.insert(arg.clone(), names.len());
            names.push(arg);
        }
        if names.is_empty() {
            return Err(AfError::EmptyFramework);
        }
        let mut pairs = Vec::new();
        for (from, to) in attacks {
            let f = *index
                .get(&from)
                .ok_or_else(|| AfError::MemberNotInFramework(from.0.clone()))?;
            let t = *index
                .get(&to)
                .ok_or_else(|| AfError::MemberNotInFramework(to.0.clone()))?;
            pairs.push((f, t));
        }
        Ok(Self::from_indexed(names, index, pairs))
    }

    /// Convenience constructor from string slices.
    pub fn from_names(arguments: &[&str], attacks: &[(&str, &str)]) -> Result<Self, AfError> {
        let args = arguments
            .iter()
            .map(|a| ArgumentId::new(*a))
            .collect::<Result<Vec<_>, _>>()?;
        let atts = attacks
            .iter()
            .map(|(a, b)| Ok((ArgumentId::new(*a)?, ArgumentId::new(*b)?)))
            .collect::<Result<Vec<_>, AfError>>()?;
        Self::new(args, atts)
    }

    /// Builds from already-validated, duplicate-free names and in-range pairs.
    pub(crate) fn from_parts(names: Vec<ArgumentId>, attacks: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let index = names.iter().enumerate().map(|(i, n)| (n.clone(), i)).collect();
        Self::from_indexed(names, index, attacks)
    }

    fn from_indexed(
        names: Vec<ArgumentId>,
        index: HashMap<ArgumentId, usize>,
        attacks: impl IntoIterator<Item = (usize, usize)>,
    ) -> Self {
        let n = names.len();
        let attacks: BTreeSet<(usize, usize)> = attacks.into_iter().collect();
        let mut attackers = vec![Vec::new(); n];
        let mut targets = vec![Vec::new(); n];
        for &(f, t) in &attacks {
            attackers[t].push(f);
            targets[f].push(t);
        }
        Self {
            names,
            index,
            attacks,
            attackers,
            targets,
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    /// Always false for a constructed framework; present for API symmetry.
    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn arguments(&self) -> &[ArgumentId] {
        &self.names
    }

    pub fn name(&self, index: usize) -> &ArgumentId {
        &self.names[index]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    fn require(&self, name: &str) -> Result<usize, AfError> {
        self.index_of(name)
            .ok_or_else(|| AfError::MemberNotInFramework(name.to_string()))
    }

    /// Attack pairs by index, sorted.
    pub fn attacks(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.attacks.iter().copied()
    }

    pub fn attack_count(&self) -> usize {
        self.attacks.len()
    }

    pub fn attack_names(&self) -> impl Iterator<Item = (&ArgumentId, &ArgumentId)> + '_ {
        self.attacks.iter().map(|&(f, t)| (&self.names[f], &self.names[t]))
    }

    pub fn attacks_between(&self, from: usize, to: usize) -> bool {
        self.attacks.contains(&(from, to))
    }

    pub fn attackers_of(&self, index: usize) -> &[usize] {
        &self.attackers[index]
    }

    pub fn targets_of(&self, index: usize) -> &[usize] {
        &self.targets[index]
    }

    /// Builds an extension of this framework from argument names.
    pub fn extension<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Result<Extension, AfError> {
        let mut ext = Extension::empty(self.len());
        for name in names {
            ext.insert(self.require(name)?);
        }
        Ok(ext)
    }

    fn check_members(&self, s: &Extension) -> Result<(), AfError> {
        match s.iter().find(|&i| i >= self.len()) {
            Some(i) => Err(AfError::MemberNotInFramework(format!("#{i}"))),
            None => Ok(()),
        }
    }

    pub fn is_conflict_free(&self, s: &Extension) -> Result<bool, AfError> {
        self.check_members(s)?;
        Ok(self.conflict_free(s))
    }

    pub fn is_acceptable(&self, s: &Extension, argument: &str) -> Result<bool, AfError> {
        self.check_members(s)?;
        let a = self.require(argument)?;
        Ok(self.defends(s, a))
    }

    /// The defence operator: every argument whose attackers are all attacked by `s`.
    pub fn characteristic_step(&self, s: &Extension) -> Result<Extension, AfError> {
        self.check_members(s)?;
        Ok(self.defended_by(s))
    }

    pub fn is_admissible(&self, s: &Extension) -> Result<bool, AfError> {
        self.check_members(s)?;
        Ok(self.admissible(s))
    }

    pub fn is_complete(&self, s: &Extension) -> Result<bool, AfError> {
        self.check_members(s)?;
        Ok(self.complete(s))
    }

    pub fn is_stable(&self, s: &Extension) -> Result<bool, AfError> {
        self.check_members(s)?;
        Ok(self.stable(s))
    }

    pub(crate) fn conflict_free(&self, s: &Extension) -> bool {
        s.iter().all(|x| self.targets[x].iter().all(|&y| !s.contains(y)))
    }

    pub(crate) fn defends(&self, s: &Extension, a: usize) -> bool {
        self.attackers[a]
            .iter()
            .all(|&b| self.attackers[b].iter().any(|&c| s.contains(c)))
    }

    fn defended_by(&self, s: &Extension) -> Extension {
        Extension::from_indices(self.len(), (0..self.len()).filter(|&a| self.defends(s, a)))
    }

    pub(crate) fn admissible(&self, s: &Extension) -> bool {
        self.conflict_free(s) && s.iter().all(|a| self.defends(s, a))
    }

    pub(crate) fn complete(&self, s: &Extension) -> bool {
        self.admissible(s) && (0..self.len()).all(|a| s.contains(a) || !self.defends(s, a))
    }

    pub(crate) fn stable(&self, s: &Extension) -> bool {
        self.conflict_free(s)
            && (0..self.len()).all(|a| s.contains(a) || self.attackers[a].iter().any(|&b| s.contains(b)))
    }

    /// Least fixpoint of the defence operator, reached from the empty set.
    pub fn grounded_extension(&self) -> Extension {
        let mut current = Extension::empty(self.len());
        loop {
            let next = self.defended_by(&current);
            if next == current {
                return current;
            }
            current = next;
        }
    }

    /// All extensions under `semantics`, ordered by cardinality then lexicographically.
    pub fn enumerate_extensions(&self, semantics: Semantics) -> Vec<Extension> {
        self.enumerate_extensions_capped(semantics, usize::MAX).extensions
    }

    /// Like [`enumerate_extensions`](Self::enumerate_extensions) but stops after `limit`
    /// extensions. The returned prefix is the same prefix the full enumeration would yield.
    pub fn enumerate_extensions_capped(&self, semantics: Semantics, limit: usize) -> Enumeration {
        match semantics {
            Semantics::Grounded => Enumeration {
                extensions: if limit == 0 {
                    vec![]
                } else {
                    vec![self.grounded_extension()]
                },
                truncated: limit == 0,
            },
            Semantics::Admissible => self.layered(Base::Admissible, limit),
            Semantics::Complete => self.layered(Base::Complete, limit),
            Semantics::Stable => self.layered(Base::Stable, limit),
            Semantics::Preferred => {
                let complete = self.layered(Base::Complete, usize::MAX).extensions;
                let mut preferred: Vec<Extension> = complete
                    .iter()
                    .enumerate()
                    .filter(|(i, e)| {
                        complete[i + 1..]
                            .iter()
                            .all(|bigger| bigger.len() == e.len() || !e.is_subset(bigger))
                    })
                    .map(|(_, e)| e.clone())
                    .collect();
                let truncated = preferred.len() > limit;
                preferred.truncate(limit);
                Enumeration {
                    extensions: preferred,
                    truncated,
                }
            }
        }
    }

    /// Searches one cardinality at a time so results come out already sorted.
    fn layered(&self, base: Base, limit: usize) -> Enumeration {
        let mut extensions = Vec::new();
        let mut truncated = false;
        for size in 0..=self.len() {
            let flow = Search::new(self, base).with_size(size).run(&mut |ext| {
                if extensions.len() == limit {
                    truncated = true;
                    return std::ops::ControlFlow::Break(());
                }
                extensions.push(ext);
                std::ops::ControlFlow::Continue(())
            });
            if flow.is_break() {
                break;
            }
        }
        Enumeration { extensions, truncated }
    }

    pub fn is_accepted(&self, argument: &str, semantics: Semantics, mode: AcceptanceMode) -> Result<bool, AfError> {
        let a = self.require(argument)?;
        Ok(self.accepts(a, semantics, mode))
    }

    /// Acceptance by argument index. Panics when `a` is out of range.
    pub fn accepts(&self, a: usize, semantics: Semantics, mode: AcceptanceMode) -> bool {
        assert!(a < self.len(), "argument index {a} out of range");
        use AcceptanceMode::*;
        match (semantics, mode) {
            (Semantics::Grounded, _) => self.grounded_extension().contains(a),
            // every admissible set extends to a preferred one, so all three agree
            (Semantics::Admissible | Semantics::Complete | Semantics::Preferred, Credulous) => {
                Search::new(self, Base::Admissible).forcing(a, true).exists()
            }
            (Semantics::Stable, Credulous) => Search::new(self, Base::Stable).forcing(a, true).exists(),
            // the grounded extension is the intersection of all complete ones
            (Semantics::Complete, Skeptical) => self.grounded_extension().contains(a),
            (Semantics::Admissible, Skeptical) => !Search::new(self, Base::Admissible).forcing(a, false).exists(),
            (Semantics::Stable, Skeptical) => !Search::new(self, Base::Stable).forcing(a, false).exists(),
            (Semantics::Preferred, Skeptical) => self
                .enumerate_extensions(Semantics::Preferred)
                .iter()
                .all(|e| e.contains(a)),
        }
    }
}

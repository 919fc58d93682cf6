//! Multi-agent coalition transition systems over control argumentation
//! frameworks, their one-step coalition logic, and trace simulation.
//!
//! A system has agents `1..=n`, named states labelled with propositions, a
//! per-state move count for every agent, and a deterministic transition for
//! every joint action. Each state is bound to one control framework from an
//! indexed collection; joint actions also update the agents' current
//! framework through the model-update table.

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::af::Semantics;
use crate::caf::{CafError, ControlFramework, QueryMode};
use crate::formats::is_identifier;

mod check;
mod formula;

pub use check::{ModelChecker, Trace, TraceRecord};
pub use formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatlError {
    #[error("system declares no agents")]
    NoAgents,
    #[error("system declares no states")]
    NoStates,
    #[error("invalid identifier `{0}`")]
    InvalidIdentifier(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown proposition `{0}`")]
    UnknownProposition(String),
    #[error("unknown agent {0}")]
    UnknownAgent(u32),
    #[error("unknown caf index {0}")]
    UnknownCafIndex(usize),
    #[error("caf index {0} is not declared; indices must run 0..m without gaps")]
    MissingCaf(usize),
    #[error("caf index {0} declared twice")]
    DuplicateCaf(usize),
    #[error("argument `{argument}` is not a fixed argument of caf {caf}")]
    UnknownArgument { caf: usize, argument: String },
    #[error("action has {found} moves but the system has {expected} agents")]
    ArityMismatch { expected: usize, found: usize },
    #[error("move {index} of agent {agent} at `{state}` is out of range 1..={available}")]
    MoveOutOfRange {
        state: String,
        agent: u32,
        index: u32,
        available: u32,
    },
    #[error("move count for agent {agent} at `{state}` must be at least 1")]
    ZeroMoves { state: String, agent: u32 },
    #[error("no transition from `{state}` for action {action}")]
    NonTotalTransition { state: String, action: JointAction },
    #[error("conflicting definitions: {0}")]
    Conflict(String),
    #[error("illegal move{}: {action} at `{state}`: {reason}", step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    IllegalMove {
        step: Option<usize>,
        state: String,
        action: JointAction,
        reason: String,
    },
    #[error(transparent)]
    Caf(#[from] CafError),
}

/// Agents are numbered densely from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(u32);

impl AgentId {
    pub fn new(index: u32) -> Option<Self> {
        (index >= 1).then_some(Self(index))
    }

    pub fn get(self) -> u32 {
        self.0
    }

    fn slot(self) -> usize {
        self.0 as usize - 1
    }
}

impl fmt::Display for AgentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StateId(String);

impl StateId {
    pub fn new(name: impl Into<String>) -> Result<Self, CatlError> {
        let name = name.into();
        if is_identifier(&name) {
            Ok(Self(name))
        } else {
            Err(CatlError::InvalidIdentifier(name))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for StateId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// One move index per agent, agent 1 first. Moves count from 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JointAction(Vec<u32>);

impl JointAction {
    pub fn new(moves: Vec<u32>) -> Self {
        Self(moves)
    }

    pub fn moves(&self) -> &[u32] {
        &self.0
    }

    pub fn move_of(&self, agent: AgentId) -> Option<u32> {
        self.0.get(agent.slot()).copied()
    }
}

impl From<Vec<u32>> for JointAction {
    fn from(moves: Vec<u32>) -> Self {
        Self(moves)
    }
}

impl fmt::Display for JointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, m) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{m}")?;
        }
        f.write_str(")")
    }
}

/// Moves fixed for the members of a coalition only.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PartialJointAction(BTreeMap<AgentId, u32>);

impl PartialJointAction {
    pub fn new(moves: impl IntoIterator<Item = (AgentId, u32)>) -> Self {
        Self(moves.into_iter().collect())
    }

    pub fn moves(&self) -> &BTreeMap<AgentId, u32> {
        &self.0
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Whether `action` agrees with every bound move.
    pub fn is_part_of(&self, action: &JointAction) -> bool {
        self.0.iter().all(|(&a, &m)| action.move_of(a) == Some(m))
    }
}

impl fmt::Display for PartialJointAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (a, m)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}->{m}")?;
        }
        f.write_str("}")
    }
}

/// How a `zeta(a)` atom is decided: `a` must be controllable for this
/// semantics and mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ZetaPolicy {
    pub semantics: Semantics,
    pub mode: QueryMode,
}

impl Default for ZetaPolicy {
    fn default() -> Self {
        Self {
            semantics: Semantics::Stable,
            mode: QueryMode::SkepticalAccept,
        }
    }
}

impl FromStr for ZetaPolicy {
    type Err = String;

    /// Parses `semantics:mode`, e.g. `grounded:skeptical-accept`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (sem, mode) = s
            .split_once(':')
            .ok_or_else(|| format!("expected `semantics:mode`, got `{s}`"))?;
        Ok(Self {
            semantics: sem.parse()?,
            mode: mode.parse()?,
        })
    }
}

impl fmt::Display for ZetaPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.semantics, self.mode)
    }
}

/// A control framework together with the path it was loaded from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CafEntry {
    pub source: String,
    pub framework: ControlFramework,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CafAtsSystem {
    agents: u32,
    // sorted by name
    states: Vec<StateId>,
    initial: usize,
    propositions: BTreeSet<String>,
    labels: Vec<BTreeSet<String>>,
    move_counts: Vec<Vec<u32>>,
    // per state, indexed by the rank of the joint action
    transitions: Vec<Vec<usize>>,
    cafs: Vec<CafEntry>,
    model_update: BTreeMap<(usize, JointAction), usize>,
    state_caf: Vec<usize>,
    zeta_policy: ZetaPolicy,
}

impl CafAtsSystem {
    pub fn builder(agents: u32) -> Result<SystemBuilder, CatlError> {
        SystemBuilder::new(agents)
    }

    pub fn agent_count(&self) -> u32 {
        self.agents
    }

    pub fn agents(&self) -> impl Iterator<Item = AgentId> {
        (1..=self.agents).map(AgentId)
    }

    pub fn states(&self) -> &[StateId] {
        &self.states
    }

    pub fn state_index(&self, name: &str) -> Result<usize, CatlError> {
        self.states
            .binary_search_by(|s| s.as_str().cmp(name))
            .map_err(|_| CatlError::UnknownState(name.to_string()))
    }

    pub fn initial_state(&self) -> &StateId {
        &self.states[self.initial]
    }

    pub fn propositions(&self) -> &BTreeSet<String> {
        &self.propositions
    }

    pub fn label(&self, state: usize) -> &BTreeSet<String> {
        &self.labels[state]
    }

    /// True when every proposition in `props` holds at `state`.
    pub fn satisfies_all<'a>(&self, state: &str, props: impl IntoIterator<Item = &'a str>) -> Result<bool, CatlError> {
        let q = self.state_index(state)?;
        let mut all = true;
        for p in props {
            if !self.propositions.contains(p) {
                return Err(CatlError::UnknownProposition(p.to_string()));
            }
            all &= self.labels[q].contains(p);
        }
        Ok(all)
    }

    pub fn move_count(&self, state: usize, agent: AgentId) -> u32 {
        self.move_counts[state][agent.slot()]
    }

    pub fn cafs(&self) -> &[CafEntry] {
        &self.cafs
    }

    pub fn caf(&self, index: usize) -> Result<&ControlFramework, CatlError> {
        self.cafs
            .get(index)
            .map(|e| &e.framework)
            .ok_or(CatlError::UnknownCafIndex(index))
    }

    pub fn state_caf(&self, state: usize) -> usize {
        self.state_caf[state]
    }

    pub fn model_updates(&self) -> &BTreeMap<(usize, JointAction), usize> {
        &self.model_update
    }

    pub fn zeta_policy(&self) -> ZetaPolicy {
        self.zeta_policy
    }

    pub fn with_zeta_policy(mut self, policy: ZetaPolicy) -> Self {
        self.zeta_policy = policy;
        self
    }

    pub(crate) fn action_count(&self, state: usize) -> usize {
        self.move_counts[state].iter().map(|&k| k as usize).product()
    }

    pub(crate) fn action_at(&self, state: usize, mut rank: usize) -> JointAction {
        let counts = &self.move_counts[state];
        let mut moves = vec![0; counts.len()];
        for (slot, &k) in counts.iter().enumerate().rev() {
            moves[slot] = (rank % k as usize) as u32 + 1;
            rank /= k as usize;
        }
        JointAction(moves)
    }

    fn rank_of(counts: &[u32], action: &JointAction) -> usize {
        action
            .0
            .iter()
            .zip(counts)
            .fold(0, |acc, (&m, &k)| acc * k as usize + (m as usize - 1))
    }

    /// Checks arity and move ranges of `action` at `state`, returning its rank.
    pub(crate) fn validate_action(&self, state: usize, action: &JointAction) -> Result<usize, CatlError> {
        let illegal = |reason: String| CatlError::IllegalMove {
            step: None,
            state: self.states[state].to_string(),
            action: action.clone(),
            reason,
        };
        if action.0.len() != self.agents as usize {
            return Err(illegal(format!(
                "expected {} moves, found {}",
                self.agents,
                action.0.len()
            )));
        }
        let counts = &self.move_counts[state];
        for (slot, (&m, &k)) in action.0.iter().zip(counts).enumerate() {
            if m < 1 || m > k {
                return Err(illegal(format!("agent {} has moves 1..={k}", slot + 1)));
            }
        }
        Ok(Self::rank_of(counts, action))
    }

    /// Every joint action at `state`, lexicographic by agent then move.
    pub fn legal_joint_actions(&self, state: &str) -> Result<Vec<JointAction>, CatlError> {
        let q = self.state_index(state)?;
        Ok((0..self.action_count(q)).map(|r| self.action_at(q, r)).collect())
    }

    pub(crate) fn successor(&self, state: usize, rank: usize) -> usize {
        self.transitions[state][rank]
    }

    /// The framework index after `action` is carried out under framework `caf`.
    /// Pairs without an entry leave the framework unchanged.
    pub fn update_model(&self, caf: usize, action: &JointAction) -> usize {
        self.model_update.get(&(caf, action.clone())).copied().unwrap_or(caf)
    }

    /// One transition: next state and updated framework index.
    pub fn step(&self, state: &str, action: &JointAction, caf: usize) -> Result<(StateId, usize), CatlError> {
        let q = self.state_index(state)?;
        if caf >= self.cafs.len() {
            return Err(CatlError::UnknownCafIndex(caf));
        }
        let rank = self.validate_action(q, action)?;
        let next = self.successor(q, rank);
        Ok((self.states[next].clone(), self.update_model(caf, action)))
    }

    /// `(framework, action)` pairs reachable from any state under its bound
    /// framework that have no model-update entry.
    pub fn unlisted_model_updates(&self) -> Vec<(usize, JointAction)> {
        let mut seen = HashSet::new();
        let mut queue: VecDeque<(usize, usize)> = (0..self.states.len()).map(|q| (q, self.state_caf[q])).collect();
        let mut missing = BTreeSet::new();
        while let Some((q, k)) = queue.pop_front() {
            if !seen.insert((q, k)) {
                continue;
            }
            for rank in 0..self.action_count(q) {
                let action = self.action_at(q, rank);
                let next_caf = match self.model_update.get(&(k, action.clone())) {
                    Some(&next) => next,
                    None => {
                        missing.insert((k, action));
                        k
                    }
                };
                queue.push_back((self.successor(q, rank), next_caf));
            }
        }
        missing.into_iter().collect()
    }
}

/// Validating constructor for [`CafAtsSystem`].
///
/// States must be declared before they are referenced, and move counts before
/// transitions that use them. Unspecified move counts default to 1 and
/// unspecified state bindings to framework 0.
#[derive(Debug, Clone)]
pub struct SystemBuilder {
    agents: u32,
    states: BTreeSet<StateId>,
    initial: Option<StateId>,
    labels: BTreeMap<StateId, BTreeSet<String>>,
    moves: BTreeMap<(StateId, u32), u32>,
    transitions: BTreeMap<(StateId, JointAction), StateId>,
    cafs: BTreeMap<usize, CafEntry>,
    state_caf: BTreeMap<StateId, usize>,
    model_update: BTreeMap<(usize, JointAction), usize>,
}

impl SystemBuilder {
    pub fn new(agents: u32) -> Result<Self, CatlError> {
        if agents == 0 {
            return Err(CatlError::NoAgents);
        }
        Ok(Self {
            agents,
            states: BTreeSet::new(),
            initial: None,
            labels: BTreeMap::new(),
            moves: BTreeMap::new(),
            transitions: BTreeMap::new(),
            cafs: BTreeMap::new(),
            state_caf: BTreeMap::new(),
            model_update: BTreeMap::new(),
        })
    }

    fn known(&self, name: &str) -> Result<StateId, CatlError> {
        let id = StateId::new(name)?;
        if self.states.contains(&id) {
            Ok(id)
        } else {
            Err(CatlError::UnknownState(name.to_string()))
        }
    }

    fn agent(&self, index: u32) -> Result<AgentId, CatlError> {
        match AgentId::new(index) {
            Some(a) if index <= self.agents => Ok(a),
            _ => Err(CatlError::UnknownAgent(index)),
        }
    }

    fn check_arity(&self, action: &JointAction) -> Result<(), CatlError> {
        if action.0.len() == self.agents as usize {
            Ok(())
        } else {
            Err(CatlError::ArityMismatch {
                expected: self.agents as usize,
                found: action.0.len(),
            })
        }
    }

    fn moves_at(&self, state: &StateId, agent: u32) -> u32 {
        self.moves.get(&(state.clone(), agent)).copied().unwrap_or(1)
    }

    fn check_range(&self, state: &StateId, action: &JointAction) -> Result<(), CatlError> {
        for (slot, &m) in action.0.iter().enumerate() {
            let agent = slot as u32 + 1;
            let available = self.moves_at(state, agent);
            if m < 1 || m > available {
                return Err(CatlError::MoveOutOfRange {
                    state: state.to_string(),
                    agent,
                    index: m,
                    available,
                });
            }
        }
        Ok(())
    }

    pub fn state(&mut self, name: &str) -> Result<&mut Self, CatlError> {
        self.states.insert(StateId::new(name)?);
        Ok(self)
    }

    pub fn initial(&mut self, name: &str) -> Result<&mut Self, CatlError> {
        let id = self.known(name)?;
        match &self.initial {
            Some(prev) if *prev != id => return Err(CatlError::Conflict(format!("initial state `{prev}` and `{id}`"))),
            _ => self.initial = Some(id),
        }
        Ok(self)
    }

    pub fn label(&mut self, state: &str, proposition: &str) -> Result<&mut Self, CatlError> {
        let id = self.known(state)?;
        if !is_identifier(proposition) {
            return Err(CatlError::InvalidIdentifier(proposition.to_string()));
        }
        self.labels.entry(id).or_default().insert(proposition.to_string());
        Ok(self)
    }

    pub fn moves(&mut self, state: &str, agent: u32, count: u32) -> Result<&mut Self, CatlError> {
        let id = self.known(state)?;
        self.agent(agent)?;
        if count == 0 {
            return Err(CatlError::ZeroMoves {
                state: id.to_string(),
                agent,
            });
        }
        match self.moves.insert((id.clone(), agent), count) {
            Some(prev) if prev != count => Err(CatlError::Conflict(format!(
                "agent {agent} at `{id}` has {prev} and {count} moves"
            ))),
            _ => Ok(self),
        }
    }

    pub fn transition(
        &mut self,
        state: &str,
        action: impl Into<JointAction>,
        target: &str,
    ) -> Result<&mut Self, CatlError> {
        let action = action.into();
        let from = self.known(state)?;
        let to = self.known(target)?;
        self.check_arity(&action)?;
        self.check_range(&from, &action)?;
        match self.transitions.insert((from.clone(), action.clone()), to.clone()) {
            Some(prev) if prev != to => Err(CatlError::Conflict(format!(
                "`{from}` under {action} leads to both `{prev}` and `{to}`"
            ))),
            _ => Ok(self),
        }
    }

    pub fn caf(
        &mut self,
        index: usize,
        source: impl Into<String>,
        framework: ControlFramework,
    ) -> Result<&mut Self, CatlError> {
        if self.cafs.contains_key(&index) {
            return Err(CatlError::DuplicateCaf(index));
        }
        self.cafs.insert(
            index,
            CafEntry {
                source: source.into(),
                framework,
            },
        );
        Ok(self)
    }

    pub fn state_caf(&mut self, state: &str, caf: usize) -> Result<&mut Self, CatlError> {
        let id = self.known(state)?;
        match self.state_caf.insert(id.clone(), caf) {
            Some(prev) if prev != caf => Err(CatlError::Conflict(format!("`{id}` bound to caf {prev} and {caf}"))),
            _ => Ok(self),
        }
    }

    pub fn model_update(
        &mut self,
        caf: usize,
        action: impl Into<JointAction>,
        next: usize,
    ) -> Result<&mut Self, CatlError> {
        let action = action.into();
        self.check_arity(&action)?;
        if action.0.contains(&0) {
            return Err(CatlError::Conflict(format!("moves count from 1 in {action}")));
        }
        match self.model_update.insert((caf, action.clone()), next) {
            Some(prev) if prev != next => Err(CatlError::Conflict(format!(
                "caf {caf} under {action} updates to both {prev} and {next}"
            ))),
            _ => Ok(self),
        }
    }

    pub fn has_caf(&self, index: usize) -> bool {
        self.cafs.contains_key(&index)
    }

    pub fn build(self) -> Result<CafAtsSystem, CatlError> {
        if self.states.is_empty() {
            return Err(CatlError::NoStates);
        }
        for (i, (&k, _)) in self.cafs.iter().enumerate() {
            if k != i {
                return Err(CatlError::MissingCaf(i));
            }
        }
        if self.cafs.is_empty() {
            return Err(CatlError::MissingCaf(0));
        }
        let caf_count = self.cafs.len();
        let states: Vec<StateId> = self.states.iter().cloned().collect();
        let index = |s: &StateId| states.binary_search(s).expect("declared state");

        let move_counts: Vec<Vec<u32>> = states
            .iter()
            .map(|s| (1..=self.agents).map(|a| self.moves_at(s, a)).collect())
            .collect();

        let mut transitions = Vec::with_capacity(states.len());
        for (q, state) in states.iter().enumerate() {
            let total: usize = move_counts[q].iter().map(|&k| k as usize).product();
            let mut row = vec![usize::MAX; total];
            for ((from, action), to) in self.transitions.range((state.clone(), JointAction(vec![]))..) {
                if from != state {
                    break;
                }
                self.check_range(from, action)?;
                row[CafAtsSystem::rank_of(&move_counts[q], action)] = index(to);
            }
            transitions.push(row);
        }

        let mut state_caf = vec![0; states.len()];
        for (s, &k) in &self.state_caf {
            if k >= caf_count {
                return Err(CatlError::UnknownCafIndex(k));
            }
            state_caf[index(s)] = k;
        }
        for (&(k, _), &next) in &self.model_update {
            if k >= caf_count {
                return Err(CatlError::UnknownCafIndex(k));
            }
            if next >= caf_count {
                return Err(CatlError::UnknownCafIndex(next));
            }
        }

        let system = CafAtsSystem {
            agents: self.agents,
            initial: self.initial.as_ref().map_or(0, index),
            propositions: self.labels.values().flatten().cloned().collect(),
            labels: states
                .iter()
                .map(|s| self.labels.get(s).cloned().unwrap_or_default())
                .collect(),
            move_counts,
            transitions,
            cafs: self.cafs.into_values().collect(),
            model_update: self.model_update,
            state_caf,
            zeta_policy: ZetaPolicy::default(),
            states,
        };
        for (q, row) in system.transitions.iter().enumerate() {
            if let Some(rank) = row.iter().position(|&t| t == usize::MAX) {
                return Err(CatlError::NonTotalTransition {
                    state: system.states[q].to_string(),
                    action: system.action_at(q, rank),
                });
            }
        }
        Ok(system)
    }
}

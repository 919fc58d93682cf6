//! Satisfaction checking and simulation.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use super::{AgentId, CafAtsSystem, CatlError, Formula, JointAction, PartialJointAction, StateId};
use crate::af::ArgumentId;
use crate::caf::{Limits, TargetQuery};

/// Evaluates formulas over one system.
///
/// Controllability verdicts for `zeta` atoms are cached per (framework,
/// argument); the cache only saves work and never changes an answer.
pub struct ModelChecker<'a> {
    sys: &'a CafAtsSystem,
    limits: Limits,
    zeta_memo: HashMap<(usize, ArgumentId), bool>,
}

enum Node {
    Prop(String),
    Zeta(ArgumentId),
    Not(usize),
    And(usize, usize),
    Implies(usize, usize),
    Coalition(Vec<AgentId>, usize),
}

/// A formula flattened into an arena so results can be cached per node.
struct Compiled {
    nodes: Vec<Node>,
}

impl Compiled {
    fn new(phi: &Formula) -> (Self, usize) {
        let mut c = Compiled { nodes: Vec::new() };
        let root = c.add(phi);
        (c, root)
    }

    fn add(&mut self, phi: &Formula) -> usize {
        let node = match phi {
            Formula::Prop(p) => Node::Prop(p.clone()),
            Formula::Zeta(a) => Node::Zeta(a.clone()),
            Formula::Not(x) => Node::Not(self.add(x)),
            Formula::And(x, y) => {
                let (x, y) = (self.add(x), self.add(y));
                Node::And(x, y)
            }
            Formula::Implies(x, y) => {
                let (x, y) = (self.add(x), self.add(y));
                Node::Implies(x, y)
            }
            Formula::Coalition(agents, x) => Node::Coalition(agents.iter().copied().collect(), self.add(x)),
        };
        self.nodes.push(node);
        self.nodes.len() - 1
    }
}

struct Evaluation<'c, 'a> {
    checker: &'c mut ModelChecker<'a>,
    formula: &'c Compiled,
    memo: Vec<Vec<Option<bool>>>,
}

impl Evaluation<'_, '_> {
    fn eval(&mut self, node: usize, q: usize) -> Result<bool, CatlError> {
        if let Some(v) = self.memo[node][q] {
            return Ok(v);
        }
        let sys = self.checker.sys;
        let value = match &self.formula.nodes[node] {
            Node::Prop(p) => sys.labels[q].contains(p),
            Node::Zeta(a) => {
                let caf = sys.state_caf[q];
                self.checker.zeta_at(caf, a)?
            }
            Node::Not(x) => !self.eval(*x, q)?,
            Node::And(x, y) => self.eval(*x, q)? && self.eval(*y, q)?,
            Node::Implies(x, y) => {
                let (x, y) = (*x, *y);
                let mut holds = true;
                for other in 0..sys.states.len() {
                    if self.eval(x, other)? && !self.eval(y, other)? {
                        holds = false;
                        break;
                    }
                }
                // state-independent, so fill every slot at once
                self.memo[node].iter_mut().for_each(|m| *m = Some(holds));
                holds
            }
            Node::Coalition(agents, x) => {
                let (agents, x) = (agents.clone(), *x);
                self.coalition_witness(q, &agents, x)?.is_some()
            }
        };
        self.memo[node][q] = Some(value);
        Ok(value)
    }

    /// First partial action of `agents` (lexicographic, agent order) such that
    /// every full action extending it leads to a state satisfying `x`.
    fn coalition_witness(
        &mut self,
        q: usize,
        agents: &[AgentId],
        x: usize,
    ) -> Result<Option<PartialJointAction>, CatlError> {
        let sys = self.checker.sys;
        let total = sys.action_count(q);
        let mut good = Vec::with_capacity(total);
        let mut actions = Vec::with_capacity(total);
        for rank in 0..total {
            good.push(self.eval(x, sys.successor(q, rank))?);
            actions.push(sys.action_at(q, rank));
        }
        let counts: Vec<u32> = agents.iter().map(|&a| sys.move_count(q, a)).collect();
        let mut choice = vec![1u32; agents.len()];
        loop {
            let partial = PartialJointAction::new(agents.iter().copied().zip(choice.iter().copied()));
            let forced = actions
                .iter()
                .zip(&good)
                .filter(|(a, _)| partial.is_part_of(a))
                .all(|(_, &g)| g);
            if forced {
                return Ok(Some(partial));
            }
            // odometer over the coalition's moves, last agent fastest
            let mut slot = choice.len();
            loop {
                if slot == 0 {
                    return Ok(None);
                }
                slot -= 1;
                if choice[slot] < counts[slot] {
                    choice[slot] += 1;
                    choice[slot + 1..].iter_mut().for_each(|c| *c = 1);
                    break;
                }
            }
        }
    }
}

impl<'a> ModelChecker<'a> {
    pub fn new(sys: &'a CafAtsSystem) -> Self {
        Self::with_limits(sys, Limits::default())
    }

    pub fn with_limits(sys: &'a CafAtsSystem, limits: Limits) -> Self {
        Self {
            sys,
            limits,
            zeta_memo: HashMap::new(),
        }
    }

    pub fn system(&self) -> &'a CafAtsSystem {
        self.sys
    }

    /// Whether acceptance of `argument` is controllable in framework `caf`
    /// under the system's zeta policy.
    pub fn zeta_at(&mut self, caf: usize, argument: &ArgumentId) -> Result<bool, CatlError> {
        if let Some(&v) = self.zeta_memo.get(&(caf, argument.clone())) {
            return Ok(v);
        }
        let framework = self.sys.caf(caf)?;
        if !framework.fixed_arguments().contains(argument) {
            return Err(CatlError::UnknownArgument {
                caf,
                argument: argument.to_string(),
            });
        }
        let policy = self.sys.zeta_policy;
        let query = TargetQuery::new(argument.clone(), policy.semantics, policy.mode);
        let value = framework
            .find_controlling_configuration(&query, &self.limits)?
            .is_some();
        self.zeta_memo.insert((caf, argument.clone()), value);
        Ok(value)
    }

    /// `zeta(argument)` at `state`, using the state's bound framework.
    pub fn eval_zeta(&mut self, state: &str, argument: &str) -> Result<bool, CatlError> {
        let q = self.sys.state_index(state)?;
        let arg = ArgumentId::new(argument).map_err(|_| CatlError::UnknownArgument {
            caf: self.sys.state_caf[q],
            argument: argument.to_string(),
        })?;
        self.zeta_at(self.sys.state_caf[q], &arg)
    }

    fn validate(&self, phi: &Formula) -> Result<(), CatlError> {
        match phi {
            Formula::Prop(p) if !self.sys.propositions.contains(p) => Err(CatlError::UnknownProposition(p.clone())),
            Formula::Prop(_) | Formula::Zeta(_) => Ok(()),
            Formula::Not(x) => self.validate(x),
            Formula::And(x, y) | Formula::Implies(x, y) => {
                self.validate(x)?;
                self.validate(y)
            }
            Formula::Coalition(agents, x) => {
                if let Some(a) = agents.iter().find(|a| a.get() > self.sys.agents) {
                    return Err(CatlError::UnknownAgent(a.get()));
                }
                self.validate(x)
            }
        }
    }

    fn evaluation<'c>(&'c mut self, compiled: &'c Compiled) -> Evaluation<'c, 'a> {
        let states = self.sys.states.len();
        Evaluation {
            memo: vec![vec![None; states]; compiled.nodes.len()],
            checker: self,
            formula: compiled,
        }
    }

    pub fn satisfies(&mut self, state: &str, phi: &Formula) -> Result<bool, CatlError> {
        let q = self.sys.state_index(state)?;
        self.validate(phi)?;
        let (compiled, root) = Compiled::new(phi);
        self.evaluation(&compiled).eval(root, q)
    }

    /// The set of states where `phi` holds, in state order.
    pub fn satisfying_states(&mut self, phi: &Formula) -> Result<Vec<StateId>, CatlError> {
        self.validate(phi)?;
        let (compiled, root) = Compiled::new(phi);
        let sys = self.sys;
        let mut eval = self.evaluation(&compiled);
        let mut out = Vec::new();
        for q in 0..sys.states.len() {
            if eval.eval(root, q)? {
                out.push(sys.states[q].clone());
            }
        }
        Ok(out)
    }

    /// The first partial action by which `coalition` forces `phi` in one step,
    /// or `None` when `<<coalition>> phi` is false at `state`.
    pub fn witness_coalition_action(
        &mut self,
        state: &str,
        coalition: &BTreeSet<AgentId>,
        phi: &Formula,
    ) -> Result<Option<PartialJointAction>, CatlError> {
        let q = self.sys.state_index(state)?;
        let wrapped = Formula::Coalition(coalition.clone(), Box::new(phi.clone()));
        self.validate(&wrapped)?;
        let (compiled, root) = Compiled::new(phi);
        let agents: Vec<AgentId> = coalition.iter().copied().collect();
        self.evaluation(&compiled).coalition_witness(q, &agents, root)
    }

    /// Runs `script` from `start`. The current framework starts as the one
    /// bound to `start` and then follows the model-update table; `zeta`
    /// verdicts in the trace use that evolving framework.
    pub fn simulate(&mut self, start: &str, script: &[JointAction]) -> Result<Trace, CatlError> {
        let sys = self.sys;
        let mut q = sys.state_index(start)?;
        let mut caf = sys.state_caf[q];
        let mut records = vec![self.record(0, q, caf)?];
        for (i, action) in script.iter().enumerate() {
            let rank = sys.validate_action(q, action).map_err(|e| match e {
                CatlError::IllegalMove {
                    state, action, reason, ..
                } => CatlError::IllegalMove {
                    step: Some(i + 1),
                    state,
                    action,
                    reason,
                },
                other => other,
            })?;
            caf = sys.update_model(caf, action);
            q = sys.successor(q, rank);
            records.push(self.record(i + 1, q, caf)?);
        }
        Ok(Trace { records })
    }

    fn record(&mut self, step: usize, q: usize, caf: usize) -> Result<TraceRecord, CatlError> {
        let sys = self.sys;
        let mut controlled = Vec::new();
        for arg in sys.caf(caf)?.fixed_arguments() {
            if self.zeta_at(caf, arg)? {
                controlled.push(arg.clone());
            }
        }
        Ok(TraceRecord {
            step,
            state: sys.states[q].clone(),
            caf,
            propositions: sys.labels[q].iter().cloned().collect(),
            controlled,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRecord {
    pub step: usize,
    pub state: StateId,
    pub caf: usize,
    pub propositions: Vec<String>,
    /// Fixed arguments of the current framework whose `zeta` atom holds.
    pub controlled: Vec<ArgumentId>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
}

fn braced<T: fmt::Display>(items: &[T]) -> String {
    let inner: Vec<String> = items.iter().map(|i| i.to_string()).collect();
    format!("{{{}}}", inner.join(", "))
}

/// One tab-separated line per record: step, state, caf, propositions, controlled.
impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.records {
            writeln!(
                f,
                "{}\t{}\t{}\t{}\t{}",
                r.step,
                r.state,
                r.caf,
                braced(&r.propositions),
                braced(&r.controlled)
            )?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::sys1;
    use super::*;
    use crate::af::Semantics;
    use crate::caf::{ControlFramework, QueryMode};
    use crate::catl::ZetaPolicy;

    fn agents(ids: &[u32]) -> BTreeSet<AgentId> {
        ids.iter().map(|&i| AgentId::new(i).unwrap()).collect()
    }

    fn p() -> Formula {
        Formula::prop("p")
    }

    fn three_completion() -> ControlFramework {
        let mut b = ControlFramework::builder();
        b.fixed("t").unwrap().uncertain("u").unwrap().control("c").unwrap();
        b.uncertain_attack("u", "t").unwrap();
        b.attack("c", "u").unwrap();
        b.build().unwrap()
    }

    fn with_extra_attacker() -> ControlFramework {
        let mut b = ControlFramework::builder();
        b.fixed("t")
            .unwrap()
            .uncertain("u")
            .unwrap()
            .uncertain("v")
            .unwrap()
            .control("c")
            .unwrap();
        b.uncertain_attack("u", "t").unwrap();
        b.uncertain_attack("v", "t").unwrap();
        b.attack("c", "u").unwrap();
        b.build().unwrap()
    }

    fn uncontrollable() -> ControlFramework {
        let mut b = ControlFramework::builder();
        b.fixed("t").unwrap().fixed("b").unwrap();
        b.uncertain_attack("b", "t").unwrap();
        b.build().unwrap()
    }

    /// SYS1 with frameworks bound per state and an update on (1,1).
    fn sys1_with_update() -> CafAtsSystem {
        let mut b = CafAtsSystem::builder(2).unwrap();
        for s in ["q0", "q1", "q2"] {
            b.state(s).unwrap();
        }
        b.initial("q0").unwrap().label("q1", "p").unwrap();
        b.moves("q0", 1, 2).unwrap().moves("q0", 2, 2).unwrap();
        for m1 in 1..=2 {
            for m2 in 1..=2 {
                b.transition("q0", vec![m1, m2], if m1 == m2 { "q1" } else { "q2" })
                    .unwrap();
            }
        }
        b.transition("q1", vec![1, 1], "q1").unwrap();
        b.transition("q2", vec![1, 1], "q2").unwrap();
        b.caf(0, "k0.caf", three_completion()).unwrap();
        b.caf(1, "k1.caf", with_extra_attacker()).unwrap();
        b.caf(2, "k2.caf", uncontrollable()).unwrap();
        b.state_caf("q2", 2).unwrap();
        b.model_update(0, vec![1, 1], 1).unwrap();
        b.build().unwrap()
    }

    #[test]
    fn sys1_coalition_verdicts() {
        let sys = sys1();
        let mut mc = ModelChecker::new(&sys);
        assert!(mc.satisfies("q0", &Formula::coalition(agents(&[1, 2]), p())).unwrap());
        assert!(!mc.satisfies("q0", &Formula::coalition(agents(&[1]), p())).unwrap());
        assert!(!mc.satisfies("q0", &Formula::coalition(agents(&[]), p())).unwrap());
    }

    #[test]
    fn sys1_witnesses() {
        let sys = sys1();
        let mut mc = ModelChecker::new(&sys);
        let w = mc.witness_coalition_action("q0", &agents(&[1, 2]), &p()).unwrap();
        assert_eq!(w.unwrap().to_string(), "{1->1, 2->1}");
        assert_eq!(mc.witness_coalition_action("q0", &agents(&[1]), &p()).unwrap(), None);
        // from q1 every successor satisfies p
        let w = mc.witness_coalition_action("q1", &agents(&[]), &p()).unwrap();
        assert_eq!(w, Some(PartialJointAction::default()));
    }

    #[test]
    fn implication_is_global() {
        let sys = sys1();
        let mut mc = ModelChecker::new(&sys);
        // p -> p holds everywhere; p -> !p fails at q1, hence at every state
        let taut = Formula::implies(p(), p());
        let bad = Formula::implies(p(), Formula::not(p()));
        for q in ["q0", "q1", "q2"] {
            assert!(mc.satisfies(q, &taut).unwrap());
            assert!(!mc.satisfies(q, &bad).unwrap());
        }
        // material reading would make !p -> p true at q1 only
        let converse = Formula::implies(Formula::not(p()), p());
        assert!(!mc.satisfies("q1", &converse).unwrap());
    }

    #[test]
    fn negation_and_conjunction() {
        let sys = sys1();
        let mut mc = ModelChecker::new(&sys);
        assert!(mc.satisfies("q0", &Formula::not(p())).unwrap());
        assert!(!mc.satisfies("q1", &Formula::and(p(), Formula::not(p()))).unwrap());
        assert!(mc.satisfies("q1", &Formula::or(p(), Formula::not(p()))).unwrap());
        assert_eq!(mc.satisfying_states(&p()).unwrap(), vec![StateId::new("q1").unwrap()]);
    }

    #[test]
    fn unknown_symbols_are_errors() {
        let sys = sys1();
        let mut mc = ModelChecker::new(&sys);
        assert_eq!(
            mc.satisfies("q0", &Formula::prop("nope")),
            Err(CatlError::UnknownProposition("nope".into()))
        );
        assert_eq!(
            mc.satisfies("q0", &Formula::coalition(agents(&[3]), p())),
            Err(CatlError::UnknownAgent(3))
        );
        assert_eq!(mc.satisfies("zz", &p()), Err(CatlError::UnknownState("zz".into())));
        assert!(matches!(
            mc.eval_zeta("q0", "zz"),
            Err(CatlError::UnknownArgument { .. })
        ));
    }

    #[test]
    fn zeta_follows_state_binding() {
        let sys = sys1_with_update().with_zeta_policy(ZetaPolicy {
            semantics: Semantics::Grounded,
            mode: QueryMode::SkepticalAccept,
        });
        let mut mc = ModelChecker::new(&sys);
        assert!(mc.eval_zeta("q0", "t").unwrap());
        assert!(!mc.eval_zeta("q2", "t").unwrap());
        assert!(ModelChecker::new(&sys1()).eval_zeta("q0", "t").unwrap());
        let zeta_t = Formula::zeta(ArgumentId::new("t").unwrap());
        // (1,2) reaches q2, whose framework leaves t uncontrollable
        assert!(!mc
            .satisfies("q0", &Formula::coalition(agents(&[]), zeta_t.clone()))
            .unwrap());
        assert!(mc
            .satisfies("q0", &Formula::coalition(agents(&[1, 2]), zeta_t))
            .unwrap());
    }

    #[test]
    fn simulation_tracks_model_updates() {
        let sys = sys1_with_update();
        let mut mc = ModelChecker::new(&sys);
        let trace = mc.simulate("q0", &[vec![1, 1].into()]).unwrap();
        assert_eq!(trace.to_string(), "0\tq0\t0\t{}\t{t}\n1\tq1\t1\t{p}\t{}\n");

        let single = mc.simulate("q0", &[]).unwrap();
        assert_eq!(single.records.len(), 1);

        let err = mc.simulate("q0", &[vec![1, 2].into(), vec![2, 1].into()]).unwrap_err();
        assert!(matches!(err, CatlError::IllegalMove { step: Some(2), .. }));
        let err = mc.simulate("q0", &[vec![9, 9].into()]).unwrap_err();
        assert!(matches!(err, CatlError::IllegalMove { step: Some(1), .. }));
    }

    #[test]
    fn repeated_evaluation_is_stable() {
        let sys = sys1_with_update();
        let mut mc = ModelChecker::new(&sys);
        let phi = Formula::coalition(agents(&[1]), Formula::zeta(ArgumentId::new("t").unwrap()));
        let first = mc.satisfies("q0", &phi).unwrap();
        let second = mc.satisfies("q0", &phi).unwrap();
        let fresh = ModelChecker::new(&sys).satisfies("q0", &phi).unwrap();
        assert_eq!(first, second);
        assert_eq!(first, fresh);
    }
}

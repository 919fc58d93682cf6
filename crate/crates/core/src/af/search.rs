//! Backtracking search over in/out labellings.
//!
//! Arguments are decided in index order, `in` before `out`. With a fixed
//! target cardinality this visits extensions in lexicographic order. Every
//! leaf is re-checked against the exact definition, so the pruning rules only
//! have to be sound (never cut a branch holding a solution).

use std::ops::ControlFlow;

use super::{ArgumentationFramework, Extension};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Base {
    Admissible,
    Complete,
    Stable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Label {
    Undec,
    In,
    Out,
}

pub(crate) struct Search<'a> {
    af: &'a ArgumentationFramework,
    base: Base,
    size: Option<usize>,
    forced: Option<(usize, bool)>,
    labels: Vec<Label>,
    in_count: usize,
}

impl<'a> Search<'a> {
    pub(crate) fn new(af: &'a ArgumentationFramework, base: Base) -> Self {
        Self {
            af,
            base,
            size: None,
            forced: None,
            labels: vec![Label::Undec; af.len()],
            in_count: 0,
        }
    }

    /// Only report extensions with exactly `size` members.
    pub(crate) fn with_size(mut self, size: usize) -> Self {
        self.size = Some(size);
        self
    }

    /// Only report extensions that contain (`inside`) or omit `arg`.
    pub(crate) fn forcing(mut self, arg: usize, inside: bool) -> Self {
        self.forced = Some((arg, inside));
        self
    }

    pub(crate) fn exists(mut self) -> bool {
        self.run_inner(&mut |_| ControlFlow::Break(())).is_break()
    }

    pub(crate) fn run(mut self, visit: &mut dyn FnMut(Extension) -> ControlFlow<()>) -> ControlFlow<()> {
        self.run_inner(visit)
    }

    fn run_inner(&mut self, visit: &mut dyn FnMut(Extension) -> ControlFlow<()>) -> ControlFlow<()> {
        if let Some(size) = self.size {
            if size > self.af.len() {
                return ControlFlow::Continue(());
            }
        }
        self.descend(0, visit)
    }

    fn descend(&mut self, next: usize, visit: &mut dyn FnMut(Extension) -> ControlFlow<()>) -> ControlFlow<()> {
        let n = self.af.len();
        if next == n {
            let ext = Extension::from_indices(n, (0..n).filter(|&i| self.labels[i] == Label::In));
            let ok = match self.base {
                Base::Admissible => self.af.admissible(&ext),
                Base::Complete => self.af.complete(&ext),
                Base::Stable => self.af.stable(&ext),
            };
            return if ok { visit(ext) } else { ControlFlow::Continue(()) };
        }
        for label in [Label::In, Label::Out] {
            if !self.may_assign(next, label) {
                continue;
            }
            self.labels[next] = label;
            if label == Label::In {
                self.in_count += 1;
            }
            let flow = if self.consistent() {
                self.descend(next + 1, visit)
            } else {
                ControlFlow::Continue(())
            };
            if label == Label::In {
                self.in_count -= 1;
            }
            self.labels[next] = Label::Undec;
            flow?;
        }
        ControlFlow::Continue(())
    }

    fn may_assign(&self, arg: usize, label: Label) -> bool {
        if let Some((forced, inside)) = self.forced {
            if forced == arg && inside != (label == Label::In) {
                return false;
            }
        }
        let remaining = self.af.len() - arg - 1;
        match label {
            Label::In => {
                if self.size.is_some_and(|k| self.in_count + 1 > k) {
                    return false;
                }
                let af = self.af;
                !af.attacks_between(arg, arg)
                    && af.attackers_of(arg).iter().all(|&b| self.labels[b] != Label::In)
                    && af.targets_of(arg).iter().all(|&b| self.labels[b] != Label::In)
            }
            Label::Out => !self.size.is_some_and(|k| self.in_count + remaining < k),
            Label::Undec => unreachable!(),
        }
    }

    fn could_be_in(&self, arg: usize) -> bool {
        self.labels[arg] != Label::Out
    }

    fn consistent(&self) -> bool {
        let af = self.af;
        for x in 0..af.len() {
            match (self.labels[x], self.base) {
                (Label::In, Base::Admissible | Base::Complete) => {
                    // every attacker must still be counter-attackable
                    let defensible = af
                        .attackers_of(x)
                        .iter()
                        .all(|&b| af.attackers_of(b).iter().any(|&c| self.could_be_in(c)));
                    if !defensible {
                        return false;
                    }
                }
                (Label::Out, Base::Complete) => {
                    // already defended by the current in-set, so it would have to be in
                    let defended = af
                        .attackers_of(x)
                        .iter()
                        .all(|&b| af.attackers_of(b).iter().any(|&c| self.labels[c] == Label::In));
                    if defended {
                        return false;
                    }
                }
                (Label::Out, Base::Stable) if !af.attackers_of(x).iter().any(|&b| self.could_be_in(b)) => {
                    return false;
                }
                _ => {}
            }
        }
        true
    }
}

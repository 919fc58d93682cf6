//! Reference semantics by exhaustive subset enumeration.
//!
//! Every subset of the arguments is tested directly against the textbook
//! definitions, using only the raw attack pairs. Exponential in the number of
//! arguments; it exists to cross-check the search on small frameworks.

use super::{AcceptanceMode, ArgumentationFramework, Extension, Semantics};

pub const MAX_ARGUMENTS: usize = 20;

struct Oracle {
    n: usize,
    attacks: Vec<(usize, usize)>,
}

impl Oracle {
    fn new(af: &ArgumentationFramework) -> Self {
        assert!(
            af.len() <= MAX_ARGUMENTS,
            "subset oracle limited to {MAX_ARGUMENTS} arguments"
        );
        Self {
            n: af.len(),
            attacks: af.attacks().collect(),
        }
    }

    fn has(set: u32, a: usize) -> bool {
        set & (1 << a) != 0
    }

    fn conflict_free(&self, set: u32) -> bool {
        !self
            .attacks
            .iter()
            .any(|&(x, y)| Self::has(set, x) && Self::has(set, y))
    }

    fn acceptable(&self, set: u32, a: usize) -> bool {
        self.attacks
            .iter()
            .filter(|&&(_, t)| t == a)
            .all(|&(b, _)| self.attacks.iter().any(|&(c, t)| t == b && Self::has(set, c)))
    }

    fn admissible(&self, set: u32) -> bool {
        self.conflict_free(set)
            && (0..self.n)
                .filter(|&a| Self::has(set, a))
                .all(|a| self.acceptable(set, a))
    }

    fn complete(&self, set: u32) -> bool {
        self.admissible(set) && (0..self.n).all(|a| !self.acceptable(set, a) || Self::has(set, a))
    }

    fn stable(&self, set: u32) -> bool {
        self.conflict_free(set)
            && (0..self.n)
                .filter(|&a| !Self::has(set, a))
                .all(|a| self.attacks.iter().any(|&(b, t)| t == a && Self::has(set, b)))
    }

    fn subsets(&self) -> impl Iterator<Item = u32> {
        0..(1u32 << self.n)
    }

    fn sets(&self, semantics: Semantics) -> Vec<u32> {
        let subset = |x: u32, y: u32| x & !y == 0;
        match semantics {
            Semantics::Admissible => self.subsets().filter(|&s| self.admissible(s)).collect(),
            Semantics::Stable => self.subsets().filter(|&s| self.stable(s)).collect(),
            Semantics::Complete => self.subsets().filter(|&s| self.complete(s)).collect(),
            Semantics::Grounded => {
                let complete = self.sets(Semantics::Complete);
                complete
                    .iter()
                    .copied()
                    .filter(|&s| complete.iter().all(|&t| subset(s, t)))
                    .collect()
            }
            Semantics::Preferred => {
                let complete = self.sets(Semantics::Complete);
                complete
                    .iter()
                    .copied()
                    .filter(|&s| !complete.iter().any(|&t| t != s && subset(s, t)))
                    .collect()
            }
        }
    }
}

/// All `semantics` extensions, sorted like the production enumeration.
pub fn extensions(af: &ArgumentationFramework, semantics: Semantics) -> Vec<Extension> {
    let oracle = Oracle::new(af);
    let mut out: Vec<Extension> = oracle
        .sets(semantics)
        .into_iter()
        .map(|s| Extension::from_indices(oracle.n, (0..oracle.n).filter(|&a| Oracle::has(s, a))))
        .collect();
    out.sort();
    out
}

pub fn is_accepted(af: &ArgumentationFramework, a: usize, semantics: Semantics, mode: AcceptanceMode) -> bool {
    let all = extensions(af, semantics);
    match mode {
        AcceptanceMode::Credulous => all.iter().any(|e| e.contains(a)),
        AcceptanceMode::Skeptical => all.iter().all(|e| e.contains(a)),
    }
}

pub fn is_conflict_free(af: &ArgumentationFramework, s: &Extension) -> bool {
    let oracle = Oracle::new(af);
    oracle.conflict_free(s.iter().fold(0, |m, i| m | 1 << i))
}

//! Systems `(S, Ineq)` with tagged members and fresh-name counters.

use std::fmt;

use crate::syntax::{Inequality, QuasiInequality, Side, Sign, Term};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TaggedInequality {
    pub ineq: Inequality,
    /// Introduced as the side condition of a regular residuation.
    pub side_condition: bool,
}

impl TaggedInequality {
    pub fn plain(ineq: Inequality) -> Self {
        TaggedInequality { ineq, side_condition: false }
    }

    pub fn side_condition(ineq: Inequality) -> Self {
        TaggedInequality { ineq, side_condition: true }
    }

    pub fn is_pure(&self) -> bool {
        self.ineq.is_pure()
    }
}

impl fmt::Display for TaggedInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.ineq)?;
        let mut tags = Vec::new();
        if self.side_condition {
            tags.push("SIDE_CONDITION");
        }
        if self.is_pure() {
            tags.push("PURE");
        }
        if !tags.is_empty() {
            write!(f, "  [{}]", tags.join(","))?;
        }
        Ok(())
    }
}

/// Root sign of a side of an S-member: members are read as `−ξ ≤ +χ`.
pub fn member_root_sign(side: Side) -> Sign {
    side.root_sign().flip()
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct System {
    pub s: Vec<TaggedInequality>,
    pub goal: Inequality,
    pub next_nominal: usize,
    pub next_conominal: usize,
}

fn max_index(t: &Term, nominal: bool) -> usize {
    t.atoms()
        .iter()
        .filter_map(|a| match (a, nominal) {
            (Term::Nominal(n), true) => n.strip_prefix('j')?.parse::<usize>().ok(),
            (Term::Conominal(n), false) => n.strip_prefix('m')?.parse::<usize>().ok(),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

impl System {
    /// The initial system `(∅, ineq)`, with counters past every index in use.
    pub fn initial(goal: Inequality) -> Self {
        let next_nominal = max_index(&goal.lhs, true).max(max_index(&goal.rhs, true)) + 1;
        let next_conominal = max_index(&goal.lhs, false).max(max_index(&goal.rhs, false)) + 1;
        System { s: Vec::new(), goal, next_nominal, next_conominal }
    }

    pub fn fresh_nominal(&mut self) -> Term {
        let t = Term::nominal(&format!("j{}", self.next_nominal));
        self.next_nominal += 1;
        t
    }

    pub fn fresh_conominal(&mut self) -> Term {
        let t = Term::conominal(&format!("m{}", self.next_conominal));
        self.next_conominal += 1;
        t
    }

    pub fn is_pure(&self) -> bool {
        self.goal.is_pure() && self.s.iter().all(|m| m.is_pure())
    }

    /// Variables of the whole system, sorted.
    pub fn vars(&self) -> std::collections::BTreeSet<String> {
        let mut out = self.goal.vars();
        for m in &self.s {
            out.extend(m.ineq.vars());
        }
        out
    }

    /// `⋀ S ⇒ Ineq` with premises sorted by printed form.
    pub fn to_quasi(&self) -> QuasiInequality {
        let mut premises: Vec<Inequality> = self.s.iter().map(|m| m.ineq.clone()).collect();
        premises.sort_by_key(|p| p.to_string());
        QuasiInequality::new(premises, self.goal.clone())
    }
}

impl fmt::Display for System {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, m) in self.s.iter().enumerate() {
            writeln!(f, "  S{}: {}", i, m)?;
        }
        writeln!(f, "  goal: {}", self.goal)
    }
}

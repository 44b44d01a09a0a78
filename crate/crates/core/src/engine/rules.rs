//! Reduction rules as pure functions on systems.

use std::fmt;
use std::sync::Arc;

use super::system::{System, TaggedInequality};
use super::EngineError;
use crate::gentree::{classify_node, path_string, NodeClass};
use crate::syntax::{Connective, Inequality, Path, Polarity, Side, Sign, Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Flavor {
    LPos,
    LNeg,
    RPos,
    RNeg,
}

impl Flavor {
    pub fn new(side: Side, sign: Sign) -> Flavor {
        match (side, sign) {
            (Side::Lhs, Sign::Pos) => Flavor::LPos,
            (Side::Lhs, Sign::Neg) => Flavor::LNeg,
            (Side::Rhs, Sign::Pos) => Flavor::RPos,
            (Side::Rhs, Sign::Neg) => Flavor::RNeg,
        }
    }

    pub fn side(self) -> Side {
        match self {
            Flavor::LPos | Flavor::LNeg => Side::Lhs,
            Flavor::RPos | Flavor::RNeg => Side::Rhs,
        }
    }

    /// Sign of the approximated node in the signed tree of its side.
    pub fn sign(self) -> Sign {
        match self {
            Flavor::LPos | Flavor::RPos => Sign::Pos,
            Flavor::LNeg | Flavor::RNeg => Sign::Neg,
        }
    }

    pub fn code(self) -> &'static str {
        match self {
            Flavor::LPos => "L+",
            Flavor::LNeg => "L-",
            Flavor::RPos => "R+",
            Flavor::RNeg => "R-",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AckSide {
    /// Minimal valuation from members `α ≤ p`.
    Right,
    /// Maximal valuation from members `p ≤ α`.
    Left,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Rule {
    Approximation { flavor: Flavor, path: Path },
    Residuation { member: usize, side: Side, coordinate: usize },
    Split { member: usize, side: Side },
    Ackermann { var: String, side: AckSide },
    /// Adjunction on a pure goal, used by the output stage.
    GoalResiduation { side: Side, coordinate: usize },
    /// `∀x (x ≤ A ⇒ x ≤ B)` collapses to `A ≤ B`; dually for conominals.
    NominalElimination { atom: Term },
}

fn side_code(s: Side) -> &'static str {
    match s {
        Side::Lhs => "lhs",
        Side::Rhs => "rhs",
    }
}

impl Rule {
    pub fn name(&self) -> String {
        match self {
            Rule::Approximation { flavor, .. } => format!("approx-{}", flavor.code()),
            Rule::Residuation { .. } => "residuation".into(),
            Rule::Split { .. } => "split".into(),
            Rule::Ackermann { side: AckSide::Right, .. } => "ackermann-right".into(),
            Rule::Ackermann { side: AckSide::Left, .. } => "ackermann-left".into(),
            Rule::GoalResiduation { .. } => "goal-residuation".into(),
            Rule::NominalElimination { .. } => "nominal-elimination".into(),
        }
    }

    pub fn position(&self) -> String {
        match self {
            Rule::Approximation { flavor, path } => format!("goal.{}.{}", side_code(flavor.side()), path_string(path)),
            Rule::Residuation { member, side, coordinate } => format!("S{}.{}.{}", member, side_code(*side), coordinate),
            Rule::Split { member, side } => format!("S{}.{}", member, side_code(*side)),
            Rule::Ackermann { var, .. } => var.clone(),
            Rule::GoalResiduation { side, coordinate } => format!("goal.{}.{}", side_code(*side), coordinate),
            Rule::NominalElimination { atom } => atom.to_string(),
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at {}", self.name(), self.position())
    }
}

/// A rule application's result and its bookkeeping.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Applied {
    pub system: System,
    /// For approximations: whether the SAC branch above the node is maximal.
    pub pivotal: Option<bool>,
    /// Whether a side-condition member was modified other than by substitution.
    pub touched_side_condition: bool,
}

impl Applied {
    fn plain(system: System) -> Self {
        Applied { system, pivotal: None, touched_side_condition: false }
    }
}

pub fn apply_rule(sys: &System, rule: &Rule, sig: &Signature, pivotal_required: bool) -> Result<Applied, EngineError> {
    match rule {
        Rule::Approximation { flavor, path } => apply_approximation(sys, *flavor, path, pivotal_required),
        Rule::Residuation { member, side, coordinate } => apply_residuation(sys, *member, *side, *coordinate, sig),
        Rule::Split { member, side } => apply_split(sys, *member, *side),
        Rule::Ackermann { var, side } => apply_ackermann(sys, var, *side),
        Rule::GoalResiduation { side, coordinate } => apply_goal_residuation(sys, *side, *coordinate, sig),
        Rule::NominalElimination { atom } => apply_nominal_elimination(sys, atom),
    }
}

/// Whether a node is SAC given its sign.
fn is_sac(t: &Term, s: Sign) -> bool {
    classify_node(t, s) == NodeClass::Sac
}

/// Checks that every proper ancestor of `path` is SAC; returns the node's sign.
pub fn sac_branch_sign(t: &Term, root: Sign, path: &[usize]) -> Option<Sign> {
    let mut cur = t;
    let mut s = root;
    for &i in path {
        if !is_sac(cur, s) {
            return None;
        }
        let child = *cur.children().get(i)?;
        s = cur.child_sign(s, i);
        cur = child;
    }
    Some(s)
}

pub fn gamma_admissible(g: &Term) -> bool {
    g.is_base_language() || matches!(g, Term::Nominal(_) | Term::Conominal(_))
}

pub fn apply_approximation(sys: &System, flavor: Flavor, path: &[usize], pivotal_required: bool) -> Result<Applied, EngineError> {
    let side = flavor.side();
    let t = sys.goal.side(side);
    let gamma = t
        .subterm(path)
        .ok_or_else(|| EngineError::BadPosition(format!("goal.{}.{}", side_code(side), path_string(path))))?
        .clone();
    let pos = || path_string(path);
    match sac_branch_sign(t, side.root_sign(), path) {
        Some(s) if s == flavor.sign() => {}
        _ => return Err(EngineError::NotSacBranch(pos())),
    }
    let pivotal = !is_sac(&gamma, flavor.sign());
    if pivotal_required && !pivotal {
        return Err(EngineError::NotPivotal(pos()));
    }
    if !gamma_admissible(&gamma) {
        return Err(EngineError::GammaNotAdmissible(gamma.to_string()));
    }
    let mut next = sys.clone();
    let (fresh, member) = match flavor.sign() {
        Sign::Pos => {
            let j = next.fresh_nominal();
            (j.clone(), Inequality::new(j, gamma))
        }
        Sign::Neg => {
            let m = next.fresh_conominal();
            (m.clone(), Inequality::new(gamma, m))
        }
    };
    let replaced = t.replace(path, fresh).expect("valid path");
    next.goal = next.goal.with_side(side, replaced);
    next.s.push(TaggedInequality::plain(member));
    Ok(Applied { system: next, pivotal: Some(pivotal), touched_side_condition: false })
}

fn other(side: Side) -> Side {
    match side {
        Side::Lhs => Side::Rhs,
        Side::Rhs => Side::Lhs,
    }
}

/// The head connective of `t` when it can be residuated on `side` of an inequality.
fn residuable_head(t: &Term, side: Side) -> Option<(&Arc<Connective>, &[Term])> {
    match t {
        Term::Apply(c, args) if !args.is_empty() && c.family.is_f() == (side == Side::Lhs) => Some((c, args)),
        _ => None,
    }
}

/// Residuates a normal head in coordinate `i`; `None` if no residual is available.
fn residuate_normal(ineq: &Inequality, side: Side, i: usize, sig: &Signature) -> Result<Inequality, EngineError> {
    let t = ineq.side(side);
    let not = || EngineError::HeadNotResiduable(format!("{} in coordinate {}", t, i));
    let (c, args) = residuable_head(t, side).ok_or_else(not)?;
    if i >= args.len() || c.family.is_regular() {
        return Err(not());
    }
    let r = sig.residual(c, i).ok_or_else(not)?;
    let mut new_args = args.to_vec();
    new_args[i] = ineq.side(other(side)).clone();
    let res = Term::apply(r, new_args);
    let phi = args[i].clone();
    let one = c.order_type.get(i) == Polarity::One;
    Ok(match (side, one) {
        (Side::Lhs, true) | (Side::Rhs, false) => Inequality::new(phi, res),
        (Side::Lhs, false) | (Side::Rhs, true) => Inequality::new(res, phi),
    })
}

/// Side condition and main inequality of a regular residuation.
fn residuate_regular(ineq: &Inequality, side: Side, sig: &Signature) -> Result<(Inequality, Inequality), EngineError> {
    let t = ineq.side(side);
    let not = || EngineError::HeadNotResiduable(t.to_string());
    let (c, args) = residuable_head(t, side).ok_or_else(not)?;
    if !c.family.is_regular() {
        return Err(not());
    }
    let black = sig.black_adjoint(c).ok_or_else(not)?;
    let phi = args[0].clone();
    let psi = ineq.side(other(side)).clone();
    let one = c.order_type.get(0) == Polarity::One;
    let unit = if one == c.family.is_f() { Term::Bottom } else { Term::Top };
    let at_unit = Term::apply(c, vec![unit]);
    let adj = Term::apply(black, vec![psi.clone()]);
    Ok(match (side, one) {
        (Side::Lhs, true) => (Inequality::new(at_unit, psi), Inequality::new(phi, adj)),
        (Side::Lhs, false) => (Inequality::new(at_unit, psi), Inequality::new(adj, phi)),
        (Side::Rhs, true) => (Inequality::new(psi, at_unit), Inequality::new(adj, phi)),
        (Side::Rhs, false) => (Inequality::new(psi, at_unit), Inequality::new(phi, adj)),
    })
}

fn member_at(sys: &System, member: usize) -> Result<&TaggedInequality, EngineError> {
    sys.s.get(member).ok_or_else(|| EngineError::BadPosition(format!("S{}", member)))
}

pub fn apply_residuation(sys: &System, member: usize, side: Side, coordinate: usize, sig: &Signature) -> Result<Applied, EngineError> {
    let m = member_at(sys, member)?;
    let mut next = sys.clone();
    let regular = matches!(residuable_head(m.ineq.side(side), side), Some((c, _)) if c.family.is_regular());
    if regular {
        if coordinate != 0 {
            return Err(EngineError::HeadNotResiduable(format!("coordinate {}", coordinate)));
        }
        let (sc, main) = residuate_regular(&m.ineq, side, sig)?;
        next.s.splice(
            member..=member,
            [TaggedInequality::side_condition(sc), TaggedInequality { ineq: main, side_condition: m.side_condition }],
        );
    } else {
        next.s[member].ineq = residuate_normal(&m.ineq, side, coordinate, sig)?;
    }
    Ok(Applied { system: next, pivotal: None, touched_side_condition: m.side_condition })
}

pub fn apply_split(sys: &System, member: usize, side: Side) -> Result<Applied, EngineError> {
    let m = member_at(sys, member)?;
    let (a, b) = match (side, m.ineq.side(side)) {
        (Side::Lhs, Term::Join(a, b)) => (Inequality::new((**a).clone(), m.ineq.rhs.clone()), Inequality::new((**b).clone(), m.ineq.rhs.clone())),
        (Side::Rhs, Term::Meet(a, b)) => (Inequality::new(m.ineq.lhs.clone(), (**a).clone()), Inequality::new(m.ineq.lhs.clone(), (**b).clone())),
        _ => return Err(EngineError::NotSplittable(m.ineq.to_string())),
    };
    let mut next = sys.clone();
    let tag = m.side_condition;
    next.s.splice(
        member..=member,
        [TaggedInequality { ineq: a, side_condition: tag }, TaggedInequality { ineq: b, side_condition: tag }],
    );
    Ok(Applied { system: next, pivotal: None, touched_side_condition: tag })
}

/// Members supplying the valuation, or the first offending member.
pub fn ackermann_partition(sys: &System, var: &str, side: AckSide) -> Result<(Vec<usize>, Vec<usize>), EngineError> {
    let offending = |m: &TaggedInequality| EngineError::NotAckermannReady { var: var.to_string(), member: m.ineq.to_string() };
    if sys.goal.contains_var(var) {
        return Err(EngineError::NotAckermannReady { var: var.to_string(), member: format!("goal {}", sys.goal) });
    }
    let v = Term::var(var);
    let mut alphas = Vec::new();
    let mut rest = Vec::new();
    for (i, m) in sys.s.iter().enumerate() {
        let (l, r) = (&m.ineq.lhs, &m.ineq.rhs);
        let is_alpha = match side {
            AckSide::Right => *r == v && !l.contains_var(var),
            AckSide::Left => *l == v && !r.contains_var(var),
        };
        if is_alpha {
            alphas.push(i);
            continue;
        }
        let ok = match side {
            AckSide::Right => l.polarity(var).is_positive() && r.polarity(var).is_negative(),
            AckSide::Left => l.polarity(var).is_negative() && r.polarity(var).is_positive(),
        };
        if !ok {
            return Err(offending(m));
        }
        rest.push(i);
    }
    Ok((alphas, rest))
}

pub fn apply_ackermann(sys: &System, var: &str, side: AckSide) -> Result<Applied, EngineError> {
    let (alphas, rest) = ackermann_partition(sys, var, side)?;
    let vals: Vec<Term> = alphas
        .iter()
        .map(|&i| {
            let m = &sys.s[i].ineq;
            match side {
                AckSide::Right => m.lhs.clone(),
                AckSide::Left => m.rhs.clone(),
            }
        })
        .collect();
    let val = match side {
        AckSide::Right => Term::join_all(vals),
        AckSide::Left => Term::meet_all(vals),
    };
    let mut next = sys.clone();
    next.s = rest
        .iter()
        .map(|&i| {
            let m = &sys.s[i];
            TaggedInequality { ineq: m.ineq.substitute(var, &val), side_condition: m.side_condition }
        })
        .collect();
    let touched = alphas.iter().any(|&i| sys.s[i].side_condition);
    Ok(Applied { system: next, pivotal: None, touched_side_condition: touched })
}

pub fn apply_goal_residuation(sys: &System, side: Side, coordinate: usize, sig: &Signature) -> Result<Applied, EngineError> {
    if !sys.goal.is_pure() {
        return Err(EngineError::NotIsolable(format!("goal {} is not pure", sys.goal)));
    }
    let mut next = sys.clone();
    next.goal = residuate_normal(&sys.goal, side, coordinate, sig)?;
    Ok(Applied::plain(next))
}

/// Members mentioning `atom`, checked to be its upper (nominal) or lower
/// (conominal) bounds; `None` if the shape does not permit elimination.
pub fn elimination_bounds(sys: &System, atom: &Term) -> Option<(Term, Vec<usize>)> {
    let nominal = match atom {
        Term::Nominal(_) => true,
        Term::Conominal(_) => false,
        _ => return None,
    };
    let (own, rest) = if nominal { (&sys.goal.lhs, &sys.goal.rhs) } else { (&sys.goal.rhs, &sys.goal.lhs) };
    if own != atom || rest.contains_atom(atom) || !sys.is_pure() {
        return None;
    }
    let mut idx = Vec::new();
    for (i, m) in sys.s.iter().enumerate() {
        if !(m.ineq.lhs.contains_atom(atom) || m.ineq.rhs.contains_atom(atom)) {
            continue;
        }
        let (own, bound) = if nominal { (&m.ineq.lhs, &m.ineq.rhs) } else { (&m.ineq.rhs, &m.ineq.lhs) };
        if m.side_condition || own != atom || bound.contains_atom(atom) {
            return None;
        }
        idx.push(i);
    }
    if idx.is_empty() {
        return None;
    }
    Some((rest.clone(), idx))
}

pub fn apply_nominal_elimination(sys: &System, atom: &Term) -> Result<Applied, EngineError> {
    let (rest, idx) = elimination_bounds(sys, atom).ok_or_else(|| EngineError::NotIsolable(atom.to_string()))?;
    let nominal = matches!(atom, Term::Nominal(_));
    let bounds: Vec<Term> = idx
        .iter()
        .map(|&i| if nominal { sys.s[i].ineq.rhs.clone() } else { sys.s[i].ineq.lhs.clone() })
        .collect();
    let mut next = sys.clone();
    next.goal = if nominal {
        Inequality::new(Term::meet_all(bounds), rest)
    } else {
        Inequality::new(rest, Term::join_all(bounds))
    };
    next.s = sys.s.iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, m)| m.clone()).collect();
    Ok(Applied::plain(next))
}

/// Coordinates of `t`'s head that can be residuated on `side`.
pub fn residuable_coordinates(t: &Term, side: Side, sig: &Signature) -> Vec<usize> {
    match residuable_head(t, side) {
        Some((c, _)) if c.family.is_regular() => {
            if sig.black_adjoint(c).is_some() {
                vec![0]
            } else {
                Vec::new()
            }
        }
        Some((c, args)) => (0..args.len()).filter(|&i| sig.residual(c, i).is_some()).collect(),
        None => Vec::new(),
    }
}

//! The three-stage driver: strategic and exhaustive reduction, traces and replay.

use std::collections::HashSet;
use std::fmt::Write as _;

use super::checks::has_critical;
use super::preprocess::preprocess;
use super::rules::{
    ackermann_partition, apply_rule, elimination_bounds, residuable_coordinates, AckSide, Flavor, Rule,
};
use super::system::{member_root_sign, System};
use super::EngineError;
use crate::classify::{find_inductive_certificate, Certificate};
use crate::gentree::{build_signed_tree, classify_node, critical_leaves, NodeClass};
use crate::syntax::{Inequality, Path, Polarity, QuasiInequality, Side, Signature, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    /// Certificate-driven pipeline for inductive inequalities.
    Strategic,
    /// Depth-bounded backtracking over all applicable rules.
    Exhaustive,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EngineConfig {
    pub mode: Mode,
    /// Restrict approximations to maximal SAC branches.
    pub pivotal: bool,
    pub depth_cap: usize,
    /// Bound on systems visited by the exhaustive search, per system.
    pub node_budget: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { mode: Mode::Strategic, pivotal: true, depth_cap: 64, node_budget: 20_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub rule: Rule,
    pub before: System,
    pub after: System,
    pub pivotal: Option<bool>,
    pub touched_side_condition: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemTrace {
    pub initial: System,
    pub steps: Vec<Step>,
}

impl SystemTrace {
    pub fn final_system(&self) -> &System {
        self.steps.last().map(|s| &s.after).unwrap_or(&self.initial)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub input: Inequality,
    pub preprocessed: Vec<Inequality>,
    pub systems: Vec<SystemTrace>,
}

impl Trace {
    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.systems.iter().flat_map(|t| t.steps.iter())
    }

    /// Every approximation step is flagged pivotal.
    pub fn all_pivotal(&self) -> bool {
        self.steps().all(|s| s.pivotal != Some(false))
    }

    /// Line-oriented rendering: each step header followed by the system after it.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "input {}", self.input);
        let mut n = 0;
        for (k, t) in self.systems.iter().enumerate() {
            let _ = writeln!(out, "system {}", k + 1);
            let _ = write!(out, "{}", t.initial);
            for s in &t.steps {
                n += 1;
                let _ = writeln!(out, "step {} rule {} at {}", n, s.rule.name(), s.rule.position());
                let _ = write!(out, "{}", s.after);
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunStatus {
    Success(Vec<QuasiInequality>),
    Failure(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunResult {
    pub status: RunStatus,
    pub trace: Trace,
    pub certificate: Option<Certificate>,
}

impl RunResult {
    pub fn is_success(&self) -> bool {
        matches!(self.status, RunStatus::Success(_))
    }

    pub fn outputs(&self) -> Option<&[QuasiInequality]> {
        match &self.status {
            RunStatus::Success(q) => Some(q),
            RunStatus::Failure(_) => None,
        }
    }
}

struct Recorder<'a> {
    sig: &'a Signature,
    pivotal: bool,
    initial: System,
    cur: System,
    steps: Vec<Step>,
}

impl<'a> Recorder<'a> {
    fn new(sys: System, sig: &'a Signature, pivotal: bool) -> Self {
        Recorder { sig, pivotal, initial: sys.clone(), cur: sys, steps: Vec::new() }
    }

    fn apply(&mut self, rule: Rule) -> Result<(), EngineError> {
        let a = apply_rule(&self.cur, &rule, self.sig, self.pivotal)?;
        self.steps.push(Step {
            rule,
            before: self.cur.clone(),
            after: a.system.clone(),
            pivotal: a.pivotal,
            touched_side_condition: a.touched_side_condition,
        });
        self.cur = a.system;
        Ok(())
    }

    fn finish(self) -> SystemTrace {
        SystemTrace { initial: self.initial, steps: self.steps }
    }
}

/// First position, in preorder over the lhs then the rhs, reached through SAC
/// nodes only, that is itself not SAC and still contains a variable.
pub fn next_strip_position(goal: &Inequality) -> Option<(Flavor, Path)> {
    fn go(t: &Term, sign: crate::syntax::Sign, path: &mut Path) -> Option<(crate::syntax::Sign, Path)> {
        if t.is_pure() {
            return None;
        }
        if classify_node(t, sign) != NodeClass::Sac {
            return Some((sign, path.clone()));
        }
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            let hit = go(c, t.child_sign(sign, i), path);
            path.pop();
            if hit.is_some() {
                return hit;
            }
        }
        None
    }
    for side in [Side::Lhs, Side::Rhs] {
        if let Some((sign, path)) = go(goal.side(side), side.root_sign(), &mut Vec::new()) {
            return Some((Flavor::new(side, sign), path));
        }
    }
    None
}

fn omega_minimal(vars: &std::collections::BTreeSet<String>, cert: &Certificate) -> Option<String> {
    vars.iter().find(|v| !vars.iter().any(|u| cert.less(u, v))).cloned()
}

/// The next rule bringing the system closer to Ackermann-readiness for `v`.
fn readiness_move(sys: &System, v: &str, eps: Polarity, sig: &Signature) -> Result<Option<Rule>, String> {
    let var = Term::var(v);
    for (i, m) in sys.s.iter().enumerate() {
        let (l, r) = (&m.ineq.lhs, &m.ineq.rhs);
        let form1 = match eps {
            Polarity::One => *r == var && l.is_pure(),
            Polarity::Partial => *l == var && r.is_pure(),
        };
        if form1 || !has_critical(&m.ineq, v, eps) {
            continue;
        }
        let e = std::collections::BTreeMap::from([(v.to_string(), eps)]);
        for side in [Side::Lhs, Side::Rhs] {
            let t = m.ineq.side(side);
            let tree = build_signed_tree(t, member_root_sign(side));
            let Some((_, path, _)) = critical_leaves(&tree, &e).into_iter().next() else { continue };
            if path.is_empty() {
                return Err(format!("member {} cannot be solved for {}", m.ineq, v));
            }
            return match (side, t) {
                (Side::Lhs, Term::Join(..)) | (Side::Rhs, Term::Meet(..)) => Ok(Some(Rule::Split { member: i, side })),
                _ if residuable_coordinates(t, side, sig).contains(&path[0]) => {
                    Ok(Some(Rule::Residuation { member: i, side, coordinate: path[0] }))
                }
                _ => Err(format!("cannot isolate {} in {}", v, m.ineq)),
            };
        }
    }
    Ok(None)
}

fn strategic(sys: System, cert: &Certificate, sig: &Signature, pivotal: bool) -> (SystemTrace, Result<(), String>) {
    let mut rec = Recorder::new(sys, sig, pivotal);
    let res = strategic_steps(&mut rec, cert, sig);
    let res = res.and_then(|_| output_stage(&mut rec).map_err(|e| e.to_string()));
    (rec.finish(), res)
}

fn strategic_steps(rec: &mut Recorder, cert: &Certificate, sig: &Signature) -> Result<(), String> {
    while let Some((flavor, path)) = next_strip_position(&rec.cur.goal) {
        rec.apply(Rule::Approximation { flavor, path }).map_err(|e| e.to_string())?;
    }
    loop {
        let vars = rec.cur.vars();
        let Some(v) = omega_minimal(&vars, cert) else { return Ok(()) };
        let eps = cert.eps(&v).unwrap_or(Polarity::One);
        let mut guard = 0;
        while let Some(rule) = readiness_move(&rec.cur, &v, eps, sig)? {
            rec.apply(rule).map_err(|e| e.to_string())?;
            guard += 1;
            if guard > 10_000 {
                return Err(format!("no progress isolating {}", v));
            }
        }
        let side = if eps == Polarity::One { AckSide::Right } else { AckSide::Left };
        rec.apply(Rule::Ackermann { var: v, side }).map_err(|e| e.to_string())?;
    }
}

fn count_atom(t: &Term, atom: &Term) -> usize {
    if t == atom {
        return 1;
    }
    t.children().into_iter().map(|c| count_atom(c, atom)).sum()
}

/// Goal residuations isolating `atom`, followed by its elimination.
fn isolation_plan(sys: &System, atom: &Term, sig: &Signature) -> Option<Vec<Rule>> {
    let mut cur = sys.clone();
    let mut rules = Vec::new();
    for _ in 0..64 {
        if elimination_bounds(&cur, atom).is_some() {
            rules.push(Rule::NominalElimination { atom: atom.clone() });
            return Some(rules);
        }
        let side = if cur.goal.lhs.contains_atom(atom) { Side::Lhs } else { Side::Rhs };
        let t = cur.goal.side(side);
        let coordinate = t.children().iter().position(|c| c.contains_atom(atom))?;
        let rule = Rule::GoalResiduation { side, coordinate };
        cur = apply_rule(&cur, &rule, sig, false).ok()?.system;
        rules.push(rule);
    }
    None
}

/// Eliminates nominals and conominals whose only role is to be bounded by S.
fn output_stage(rec: &mut Recorder) -> Result<(), EngineError> {
    if !rec.cur.is_pure() {
        return Ok(());
    }
    loop {
        let goal = rec.cur.goal.clone();
        let candidates: Vec<Term> = goal
            .atoms()
            .into_iter()
            .filter(|a| matches!(a, Term::Nominal(_) | Term::Conominal(_)))
            .filter(|a| count_atom(&goal.lhs, a) + count_atom(&goal.rhs, a) == 1)
            .filter(|a| rec.cur.s.iter().any(|m| m.ineq.lhs.contains_atom(a) || m.ineq.rhs.contains_atom(a)))
            .collect();
        let plan = candidates.iter().find_map(|a| isolation_plan(&rec.cur, a, rec.sig));
        let Some(plan) = plan else { return Ok(()) };
        for rule in plan {
            rec.apply(rule)?;
        }
    }
}

fn system_key(sys: &System) -> String {
    let mut s: Vec<String> = sys.s.iter().map(|m| m.to_string()).collect();
    s.sort();
    format!("{} | {}", s.join(" ; "), sys.goal)
}

/// All rules that apply to `sys`, in search order.
pub fn candidate_moves(sys: &System, sig: &Signature, pivotal: bool) -> Vec<Rule> {
    let mut out = Vec::new();
    for v in sys.vars() {
        for side in [AckSide::Right, AckSide::Left] {
            if ackermann_partition(sys, &v, side).is_ok() {
                out.push(Rule::Ackermann { var: v.clone(), side });
            }
        }
    }
    for side in [Side::Lhs, Side::Rhs] {
        let t = sys.goal.side(side);
        for path in t.paths() {
            if t.subterm(&path).is_none_or(|s| s.is_pure()) {
                continue;
            }
            let sign = t.sign_at(side.root_sign(), &path).expect("valid path");
            let rule = Rule::Approximation { flavor: Flavor::new(side, sign), path };
            if apply_rule(sys, &rule, sig, pivotal).is_ok() {
                out.push(rule);
            }
        }
    }
    for (i, m) in sys.s.iter().enumerate() {
        if m.is_pure() {
            continue;
        }
        if matches!(m.ineq.lhs, Term::Join(..)) {
            out.push(Rule::Split { member: i, side: Side::Lhs });
        }
        if matches!(m.ineq.rhs, Term::Meet(..)) {
            out.push(Rule::Split { member: i, side: Side::Rhs });
        }
    }
    for (i, m) in sys.s.iter().enumerate() {
        for side in [Side::Lhs, Side::Rhs] {
            let t = m.ineq.side(side);
            for c in residuable_coordinates(t, side, sig) {
                if !t.children()[c].is_pure() {
                    out.push(Rule::Residuation { member: i, side, coordinate: c });
                }
            }
        }
    }
    out
}

struct Search<'a> {
    sig: &'a Signature,
    config: &'a EngineConfig,
    visited: HashSet<String>,
    nodes: usize,
    hit_cap: bool,
}

impl Search<'_> {
    fn dfs(&mut self, sys: &System, path: &mut Vec<Step>) -> bool {
        if sys.is_pure() {
            return true;
        }
        if path.len() >= self.config.depth_cap {
            self.hit_cap = true;
            return false;
        }
        for rule in candidate_moves(sys, self.sig, self.config.pivotal) {
            if self.nodes >= self.config.node_budget {
                return false;
            }
            let Ok(a) = apply_rule(sys, &rule, self.sig, self.config.pivotal) else { continue };
            if !self.visited.insert(system_key(&a.system)) {
                continue;
            }
            self.nodes += 1;
            path.push(Step {
                rule,
                before: sys.clone(),
                after: a.system.clone(),
                pivotal: a.pivotal,
                touched_side_condition: a.touched_side_condition,
            });
            if self.dfs(&a.system, path) {
                return true;
            }
            path.pop();
        }
        false
    }
}

fn exhaustive(sys: System, sig: &Signature, config: &EngineConfig) -> (SystemTrace, Result<(), String>) {
    let mut search = Search { sig, config, visited: HashSet::new(), nodes: 0, hit_cap: false };
    search.visited.insert(system_key(&sys));
    let mut path = Vec::new();
    let found = search.dfs(&sys, &mut path);
    let mut rec = Recorder::new(sys, sig, config.pivotal);
    if let Some(last) = path.last() {
        rec.cur = last.after.clone();
    }
    rec.steps = path;
    if !found {
        let reason = if search.nodes >= config.node_budget {
            "search budget exhausted".to_string()
        } else if search.hit_cap {
            format!("depth cap {} reached", config.depth_cap)
        } else {
            "no rule sequence purifies the system".to_string()
        };
        return (rec.finish(), Err(reason));
    }
    let res = output_stage(&mut rec).map_err(|e| e.to_string());
    (rec.finish(), res)
}

/// Runs ALBA on a base-language inequality.
pub fn run(ineq: &Inequality, sig: &Signature, config: &EngineConfig) -> RunResult {
    let sig = sig.expand();
    let pieces = preprocess(ineq);
    let mut trace = Trace { input: ineq.clone(), preprocessed: pieces.clone(), systems: Vec::new() };
    let certificate = match config.mode {
        Mode::Strategic => match find_inductive_certificate(ineq) {
            Ok(Some(c)) => Some(c),
            Ok(None) => {
                return RunResult { status: RunStatus::Failure("not inductive".into()), trace, certificate: None }
            }
            Err(e) => return RunResult { status: RunStatus::Failure(e.to_string()), trace, certificate: None },
        },
        Mode::Exhaustive => None,
    };
    let mut outputs = Vec::new();
    for (k, piece) in pieces.into_iter().enumerate() {
        let sys = System::initial(piece);
        let (t, res) = match &certificate {
            Some(cert) => strategic(sys, cert, &sig, config.pivotal),
            None => exhaustive(sys, &sig, config),
        };
        let fin = t.final_system().clone();
        trace.systems.push(t);
        if let Err(reason) = res {
            let status = RunStatus::Failure(format!("system {}: {}", k + 1, reason));
            return RunResult { status, trace, certificate };
        }
        if !fin.is_pure() {
            let status = RunStatus::Failure(format!("system {} is not purified", k + 1));
            return RunResult { status, trace, certificate };
        }
        outputs.push(fin.to_quasi());
    }
    RunResult { status: RunStatus::Success(outputs), trace, certificate }
}

/// Re-applies every recorded rule from each initial system and checks that
/// each intermediate system is reproduced. Returns the final systems.
pub fn replay(trace: &Trace, sig: &Signature) -> Result<Vec<System>, EngineError> {
    let sig = sig.expand();
    let mut finals = Vec::new();
    for t in &trace.systems {
        let mut cur = t.initial.clone();
        for (n, s) in t.steps.iter().enumerate() {
            let a = apply_rule(&cur, &s.rule, &sig, false)?;
            if a.system != s.after {
                return Err(EngineError::ReplayMismatch(n + 1));
            }
            cur = a.system;
        }
        finals.push(cur);
    }
    Ok(finals)
}

/// Renames nominals and conominals by order of first occurrence so that
/// outputs can be compared up to the choice of fresh names.
pub fn canonical_names(q: &QuasiInequality) -> QuasiInequality {
    use std::collections::BTreeMap;
    fn collect(t: &Term, seen: &mut Vec<Term>) {
        if matches!(t, Term::Nominal(_) | Term::Conominal(_)) && !seen.contains(t) {
            seen.push(t.clone());
        }
        for c in t.children() {
            collect(c, seen);
        }
    }
    fn rename(t: &Term, map: &BTreeMap<Term, Term>) -> Term {
        if let Some(n) = map.get(t) {
            return n.clone();
        }
        match t {
            Term::Meet(a, b) => Term::meet(rename(a, map), rename(b, map)),
            Term::Join(a, b) => Term::join(rename(a, map), rename(b, map)),
            Term::Apply(c, args) => Term::Apply(c.clone(), args.iter().map(|a| rename(a, map)).collect()),
            other => other.clone(),
        }
    }
    let mut seen = Vec::new();
    for i in std::iter::once(&q.conclusion).chain(q.premises.iter()) {
        collect(&i.lhs, &mut seen);
        collect(&i.rhs, &mut seen);
    }
    let map: BTreeMap<Term, Term> = seen
        .into_iter()
        .enumerate()
        .map(|(k, t)| {
            let n = match t {
                Term::Nominal(_) => Term::nominal(&format!("x{}", k + 1)),
                _ => Term::conominal(&format!("x{}", k + 1)),
            };
            (t, n)
        })
        .collect();
    let ren = |i: &Inequality| Inequality::new(rename(&i.lhs, &map), rename(&i.rhs, &map));
    QuasiInequality::new(q.premises.iter().map(ren).collect(), ren(&q.conclusion))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{equivalence_oracle, ModelPool, OracleVerdict};
    use crate::syntax::{parse_inequality, ConnectiveDecl, Family};

    fn sig() -> Signature {
        Signature::new(vec![
            ConnectiveDecl::new("dia", Family::FNormal, "1"),
            ConnectiveDecl::new("box", Family::GNormal, "1"),
            ConnectiveDecl::new("->", Family::GNormal, "d1"),
        ])
        .unwrap()
    }

    fn ineq(s: &str) -> Inequality {
        parse_inequality(s, &sig()).unwrap()
    }

    #[test]
    fn frege_strategic() {
        let r = run(&ineq("p -> (q -> r) <= (p -> q) -> (p -> r)"), &sig(), &EngineConfig::default());
        let out = r.outputs().expect("success");
        assert_eq!(out.len(), 1);
        assert!(r.trace.all_pivotal());
        assert!(crate::engine::check_safety(&r.trace));
        assert_eq!(replay(&r.trace, &sig()).unwrap()[0], *r.trace.systems[0].final_system());
    }

    #[test]
    fn trivial_and_modal() {
        let r = run(&ineq("top <= top"), &sig(), &EngineConfig::default());
        assert!(r.is_success());
        let input = ineq("dia(box(p)) <= box(dia(p))");
        let r = run(&input, &sig(), &EngineConfig::default());
        let out = r.outputs().expect("success").to_vec();
        let pool = ModelPool::generate(&sig(), 5, 30, 7).unwrap();
        for m in &pool.models {
            let v = equivalence_oracle(&input, &out, m).unwrap();
            assert!(matches!(v, OracleVerdict::Equivalent { .. }), "{:?}", v);
        }
    }

    #[test]
    fn exhaustive_modal() {
        let cfg = EngineConfig { mode: Mode::Exhaustive, ..EngineConfig::default() };
        let r = run(&ineq("dia(box(p)) <= box(dia(p))"), &sig(), &cfg);
        assert!(r.is_success(), "{:?}", r.status);
    }

    #[test]
    fn exhaustive_failure_is_in_band() {
        let cfg = EngineConfig { mode: Mode::Exhaustive, depth_cap: 8, node_budget: 2_000, ..EngineConfig::default() };
        let r = run(&ineq("box(dia(p)) <= dia(box(p))"), &sig(), &cfg);
        match &r.status {
            RunStatus::Failure(reason) => assert!(!reason.is_empty()),
            other => panic!("unexpected {:?}", other),
        }
        assert!(replay(&r.trace, &sig()).is_ok());
    }

    #[test]
    fn canonical_names_ignore_fresh_indices() {
        let s = sig().expand();
        let a = QuasiInequality::new(vec![], parse_inequality("#j4 <= box(@m7)", &s).unwrap());
        let b = QuasiInequality::new(vec![], parse_inequality("#j1 <= box(@m2)", &s).unwrap());
        assert_eq!(canonical_names(&a), canonical_names(&b));
        let c = QuasiInequality::new(vec![], parse_inequality("#j1 <= box(#j1)", &s).unwrap());
        assert_ne!(canonical_names(&a), canonical_names(&c));
    }

    #[test]
    fn non_inductive_fails() {
        let r = run(&ineq("box(dia(p)) <= dia(box(p))"), &sig(), &EngineConfig::default());
        assert!(!r.is_success());
    }
}

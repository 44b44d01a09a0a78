//! Inductive and Sahlqvist recognition, certificate search, definiteness.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::gentree::{analyze_branch, build_signed_tree, critical_leaves, is_critical, BranchReport, NodeClass, SignedTree};
use crate::syntax::{Inequality, Path, Polarity, Side, Sign, Term};

pub const DEFAULT_VARIABLE_CAP: usize = 16;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ClassifyError {
    #[error("variable `{0}` is not covered by the order-type")]
    UncoveredVariable(String),
    #[error("{0} variables exceed the search cap of {1}")]
    TooManyVariables(usize, usize),
    #[error("inequality is not inductive for the given certificate")]
    NotInductive,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Certificate {
    pub epsilon: BTreeMap<String, Polarity>,
    /// Strict order as pairs `(a, b)` meaning `a < b`.
    pub omega: BTreeSet<(String, String)>,
}

impl Certificate {
    pub fn new(epsilon: BTreeMap<String, Polarity>, omega: BTreeSet<(String, String)>) -> Self {
        Certificate { epsilon, omega }
    }

    pub fn less(&self, a: &str, b: &str) -> bool {
        self.omega.contains(&(a.to_string(), b.to_string()))
    }

    pub fn eps(&self, v: &str) -> Option<Polarity> {
        self.epsilon.get(v).copied()
    }

    /// Irreflexive and transitive.
    pub fn omega_is_strict_order(&self) -> bool {
        self.omega.iter().all(|(a, b)| a != b)
            && self.omega.iter().all(|(a, b)| {
                self.omega.iter().filter(|(c, _)| c == b).all(|(_, d)| self.less(a, d))
            })
    }
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "eps")?;
        for (v, e) in &self.epsilon {
            write!(f, " {}={}", v, e)?;
        }
        write!(f, " omega")?;
        for (a, b) in &self.omega {
            write!(f, " {}<{}", a, b)?;
        }
        Ok(())
    }
}

/// Condition 2 check at one SRR node for one non-branch argument.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SrrCheck {
    pub side: Side,
    pub node: Path,
    pub critical_var: String,
    pub argument: usize,
    /// Every variable leaf of the argument agrees with the opposite order-type.
    pub agrees: bool,
    /// Variables of the argument that must lie strictly below the critical variable.
    pub below: BTreeSet<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    pub side: Side,
    pub path: Path,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub branches: Vec<(Side, String, BranchReport)>,
    pub srr_checks: Vec<SrrCheck>,
    pub failure: Option<Failure>,
}

struct TreeAnalysis {
    branches: Vec<(String, BranchReport)>,
    srr: Vec<SrrCheck>,
}

fn analyze_tree(tree: &SignedTree, side: Side, eps: &BTreeMap<String, Polarity>) -> TreeAnalysis {
    let mut branches = Vec::new();
    let mut srr = Vec::new();
    for (var, leaf, _) in critical_leaves(tree, eps) {
        let report = analyze_branch(tree, &leaf).expect("variable leaf");
        for node_path in &report.p1_nodes {
            let node = tree.node(node_path).unwrap();
            if node.class != NodeClass::Srr {
                continue;
            }
            let on_branch = leaf[node_path.len()];
            for (h, &child) in node.children.iter().enumerate() {
                if h == on_branch {
                    continue;
                }
                let cpath = &tree.nodes[child].path;
                let sub = tree.subterm(cpath).unwrap();
                let mut agrees = true;
                let mut below = BTreeSet::new();
                sub.visit_signed(tree.nodes[child].sign, &mut |t, s| {
                    if let Term::Var(v) = t {
                        let e = eps[v];
                        agrees &= is_critical(e.opposite(), s);
                        below.insert(v.clone());
                    }
                });
                srr.push(SrrCheck {
                    side,
                    node: node_path.clone(),
                    critical_var: var.clone(),
                    argument: h,
                    agrees,
                    below,
                });
            }
        }
        branches.push((var, report));
    }
    TreeAnalysis { branches, srr }
}

fn check_cover(ineq: &Inequality, eps: &BTreeMap<String, Polarity>) -> Result<(), ClassifyError> {
    match ineq.vars().into_iter().find(|v| !eps.contains_key(v)) {
        Some(v) => Err(ClassifyError::UncoveredVariable(v)),
        None => Ok(()),
    }
}

fn trees(ineq: &Inequality) -> [(Side, SignedTree); 2] {
    [
        (Side::Lhs, build_signed_tree(&ineq.lhs, Sign::Pos)),
        (Side::Rhs, build_signed_tree(&ineq.rhs, Sign::Neg)),
    ]
}

fn inductive_verdict(parts: Vec<(Side, TreeAnalysis)>, cert: &Certificate) -> Verdict {
    let mut failure = None;
    let mut branches = Vec::new();
    let mut srr_checks = Vec::new();
    for (side, a) in parts {
        for (var, b) in a.branches {
            if failure.is_none() && !b.good {
                failure = Some(Failure {
                    side,
                    path: b.leaf.clone(),
                    reason: format!("critical branch of {} is not good", var),
                });
            }
            branches.push((side, var, b));
        }
        for c in a.srr {
            if failure.is_none() {
                if !c.agrees {
                    failure = Some(Failure {
                        side,
                        path: c.node.clone(),
                        reason: format!("argument {} does not agree with the opposite order-type", c.argument),
                    });
                } else if let Some(v) = c.below.iter().find(|v| !cert.less(v, &c.critical_var)) {
                    failure = Some(Failure {
                        side,
                        path: c.node.clone(),
                        reason: format!("requires {} < {}", v, c.critical_var),
                    });
                }
            }
            srr_checks.push(c);
        }
    }
    Verdict { holds: failure.is_none(), branches, srr_checks, failure }
}

pub fn is_inductive(ineq: &Inequality, cert: &Certificate) -> Result<Verdict, ClassifyError> {
    check_cover(ineq, &cert.epsilon)?;
    let parts = trees(ineq)
        .into_iter()
        .map(|(side, t)| (side, analyze_tree(&t, side, &cert.epsilon)))
        .collect();
    Ok(inductive_verdict(parts, cert))
}

/// Inductiveness of a single signed term, as used for the sides of system members.
pub fn term_is_inductive(t: &Term, sign: Sign, cert: &Certificate) -> bool {
    if t.vars().iter().any(|v| !cert.epsilon.contains_key(v)) {
        return false;
    }
    let tree = build_signed_tree(t, sign);
    let side = if sign == Sign::Pos { Side::Lhs } else { Side::Rhs };
    inductive_verdict(vec![(side, analyze_tree(&tree, side, &cert.epsilon))], cert).holds
}

pub fn is_sahlqvist(ineq: &Inequality, eps: &BTreeMap<String, Polarity>) -> Result<Verdict, ClassifyError> {
    check_cover(ineq, eps)?;
    let mut failure = None;
    let mut branches = Vec::new();
    for (side, t) in trees(ineq) {
        for (var, b) in analyze_tree(&t, side, eps).branches {
            if failure.is_none() && !b.excellent {
                failure = Some(Failure {
                    side,
                    path: b.leaf.clone(),
                    reason: format!("critical branch of {} is not excellent", var),
                });
            }
            branches.push((side, var, b));
        }
    }
    Ok(Verdict { holds: failure.is_none(), branches, srr_checks: Vec::new(), failure })
}

fn transitive_closure(vars: &[String], edges: &BTreeSet<(String, String)>) -> Option<BTreeSet<(String, String)>> {
    let n = vars.len();
    let idx: BTreeMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (v.as_str(), i)).collect();
    let mut r = vec![vec![false; n]; n];
    for (a, b) in edges {
        r[idx[a.as_str()]][idx[b.as_str()]] = true;
    }
    for k in 0..n {
        let row_k = r[k].clone();
        for row in r.iter_mut() {
            if row[k] {
                for (cell, &via) in row.iter_mut().zip(&row_k) {
                    *cell |= via;
                }
            }
        }
    }
    if (0..n).any(|i| r[i][i]) {
        return None;
    }
    let mut out = BTreeSet::new();
    for i in 0..n {
        for j in 0..n {
            if r[i][j] {
                out.insert((vars[i].clone(), vars[j].clone()));
            }
        }
    }
    Some(out)
}

/// Enumerates order-types over the sorted variables lexicographically with
/// `d` before `1`, returning the first whose constraints are acyclic.
pub fn find_inductive_certificate(ineq: &Inequality) -> Result<Option<Certificate>, ClassifyError> {
    find_inductive_certificate_capped(ineq, DEFAULT_VARIABLE_CAP)
}

pub fn find_inductive_certificate_capped(ineq: &Inequality, cap: usize) -> Result<Option<Certificate>, ClassifyError> {
    let vars: Vec<String> = ineq.vars().into_iter().collect();
    let n = vars.len();
    if n > cap {
        return Err(ClassifyError::TooManyVariables(n, cap));
    }
    let [(ls, lt), (rs, rt)] = trees(ineq);
    'eps: for k in 0u64..(1u64 << n) {
        let epsilon: BTreeMap<String, Polarity> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let bit = (k >> (n - 1 - i)) & 1;
                (v.clone(), if bit == 0 { Polarity::Partial } else { Polarity::One })
            })
            .collect();
        let mut edges = BTreeSet::new();
        for (side, t) in [(ls, &lt), (rs, &rt)] {
            let a = analyze_tree(t, side, &epsilon);
            if a.branches.iter().any(|(_, b)| !b.good) || a.srr.iter().any(|c| !c.agrees) {
                continue 'eps;
            }
            for c in a.srr {
                for v in c.below {
                    edges.insert((v, c.critical_var.clone()));
                }
            }
        }
        if let Some(omega) = transitive_closure(&vars, &edges) {
            return Ok(Some(Certificate { epsilon, omega }));
        }
    }
    Ok(None)
}

pub fn is_definite(ineq: &Inequality, cert: &Certificate) -> Result<bool, ClassifyError> {
    let v = is_inductive(ineq, cert)?;
    if !v.holds {
        return Err(ClassifyError::NotInductive);
    }
    let [(_, lt), (_, rt)] = trees(ineq);
    Ok(v.branches.iter().all(|(side, _, b)| {
        let t = if *side == Side::Lhs { &lt } else { &rt };
        b.p2_nodes.iter().all(|p| t.node(p).unwrap().class != NodeClass::DeltaAdjoint)
    }))
}

//! Signed generation trees, node classification and branch analysis.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{Inequality, Path, Polarity, Side, Sign, Term};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeClass {
    /// `+∨`, `−∧`.
    DeltaAdjoint,
    /// `+f`, `−g`.
    Sac,
    /// `+g` with `g ∈ G_n`, `−f` with `f ∈ F_n`, arity at least two.
    Srr,
    /// `+∧`, `−∨`, unary `+g`, unary `−f`.
    Smp,
    Leaf,
}

impl NodeClass {
    pub fn is_skeleton(self) -> bool {
        matches!(self, NodeClass::DeltaAdjoint | NodeClass::Sac)
    }

    pub fn is_pia(self) -> bool {
        matches!(self, NodeClass::Srr | NodeClass::Smp)
    }

    pub fn code(self) -> &'static str {
        match self {
            NodeClass::DeltaAdjoint => "DELTA",
            NodeClass::Sac => "SAC",
            NodeClass::Srr => "SRR",
            NodeClass::Smp => "SMP",
            NodeClass::Leaf => "LEAF",
        }
    }
}

/// Class of a node given its term and sign.
pub fn classify_node(t: &Term, sign: Sign) -> NodeClass {
    match (t, sign) {
        (Term::Join(..), Sign::Pos) | (Term::Meet(..), Sign::Neg) => NodeClass::DeltaAdjoint,
        (Term::Meet(..), Sign::Pos) | (Term::Join(..), Sign::Neg) => NodeClass::Smp,
        (Term::Apply(_, args), _) if args.is_empty() => NodeClass::Leaf,
        (Term::Apply(c, args), s) => {
            let additive = c.family.is_f() == (s == Sign::Pos);
            if additive {
                NodeClass::Sac
            } else if args.len() == 1 {
                NodeClass::Smp
            } else {
                NodeClass::Srr
            }
        }
        _ => NodeClass::Leaf,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedNode {
    pub path: Path,
    pub sign: Sign,
    pub class: NodeClass,
    pub label: String,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SignedTree {
    pub term: Term,
    pub nodes: Vec<SignedNode>,
    index: BTreeMap<Path, usize>,
}

fn label(t: &Term) -> String {
    match t {
        Term::Meet(..) => "/\\".into(),
        Term::Join(..) => "\\/".into(),
        Term::Apply(c, _) => c.name.clone(),
        other => other.to_string(),
    }
}

pub fn build_signed_tree(t: &Term, root_sign: Sign) -> SignedTree {
    fn go(t: &Term, sign: Sign, path: &mut Path, parent: Option<usize>, nodes: &mut Vec<SignedNode>) -> usize {
        let idx = nodes.len();
        nodes.push(SignedNode {
            path: path.clone(),
            sign,
            class: classify_node(t, sign),
            label: label(t),
            parent,
            children: Vec::new(),
        });
        for (i, c) in t.children().into_iter().enumerate() {
            path.push(i);
            let ci = go(c, t.child_sign(sign, i), path, Some(idx), nodes);
            path.pop();
            nodes[idx].children.push(ci);
        }
        idx
    }
    let mut nodes = Vec::new();
    go(t, root_sign, &mut Vec::new(), None, &mut nodes);
    let index = nodes.iter().enumerate().map(|(i, n)| (n.path.clone(), i)).collect();
    SignedTree { term: t.clone(), nodes, index }
}

pub fn path_string(p: &[usize]) -> String {
    if p.is_empty() {
        "root".into()
    } else {
        p.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(".")
    }
}

impl SignedTree {
    pub fn root(&self) -> &SignedNode {
        &self.nodes[0]
    }

    pub fn node(&self, path: &[usize]) -> Option<&SignedNode> {
        self.index.get(path).map(|&i| &self.nodes[i])
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        self.term.subterm(path)
    }

    /// Ancestors of the node at `path`, nearest first.
    pub fn ancestors(&self, path: &[usize]) -> Vec<&SignedNode> {
        let mut out = Vec::new();
        let mut cur = self.index.get(path).and_then(|&i| self.nodes[i].parent);
        while let Some(i) = cur {
            out.push(&self.nodes[i]);
            cur = self.nodes[i].parent;
        }
        out
    }

    /// Variable leaves as `(variable, path, sign)`.
    pub fn var_leaves(&self) -> Vec<(String, Path, Sign)> {
        self.nodes
            .iter()
            .filter_map(|n| match self.term.subterm(&n.path) {
                Some(Term::Var(v)) => Some((v.clone(), n.path.clone(), n.sign)),
                _ => None,
            })
            .collect()
    }

    /// `path sign class label`, one line per node.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for n in &self.nodes {
            out.push_str(&format!("{} {} {} {}\n", path_string(&n.path), n.sign, n.class.code(), n.label));
        }
        out
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TreeError {
    #[error("no variable leaf at {0}")]
    NotALeaf(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BranchReport {
    pub leaf: Path,
    pub good: bool,
    pub excellent: bool,
    pub skeleton: bool,
    pub definite_sac: bool,
    /// Paths of the PIA prefix, nearest the leaf first.
    pub p1_nodes: Vec<Path>,
    /// Paths of the Skeleton suffix.
    pub p2_nodes: Vec<Path>,
}

pub fn analyze_branch(tree: &SignedTree, leaf: &[usize]) -> Result<BranchReport, TreeError> {
    match tree.subterm(leaf) {
        Some(Term::Var(_)) => {}
        _ => return Err(TreeError::NotALeaf(path_string(leaf))),
    }
    let anc = tree.ancestors(leaf);
    let split = anc.iter().position(|n| !n.class.is_pia()).unwrap_or(anc.len());
    let (p1, p2) = anc.split_at(split);
    let good = p2.iter().all(|n| n.class.is_skeleton());
    let excellent = good && p1.iter().all(|n| n.class == NodeClass::Smp);
    Ok(BranchReport {
        leaf: leaf.to_vec(),
        good,
        excellent,
        skeleton: good && p1.is_empty(),
        definite_sac: good && p2.iter().all(|n| n.class == NodeClass::Sac),
        p1_nodes: p1.iter().map(|n| n.path.clone()).collect(),
        p2_nodes: p2.iter().map(|n| n.path.clone()).collect(),
    })
}

/// Shared sign of all occurrences of `v` in `+lhs` and `−rhs`, if any and uniform.
pub fn uniform_sign(ineq: &Inequality, v: &str) -> Option<Sign> {
    let mut seen: Option<Sign> = None;
    let mut mixed = false;
    for side in [Side::Lhs, Side::Rhs] {
        ineq.side(side).visit_signed(side.root_sign(), &mut |t, s| {
            if matches!(t, Term::Var(n) if n == v) {
                match seen {
                    None => seen = Some(s),
                    Some(prev) if prev != s => mixed = true,
                    _ => {}
                }
            }
        });
    }
    if mixed {
        None
    } else {
        seen
    }
}

/// An ε-critical leaf occurrence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct CriticalOccurrence {
    pub side: Side,
    pub var: String,
    pub path: Path,
    pub sign: Sign,
}

pub fn is_critical(eps: Polarity, sign: Sign) -> bool {
    matches!((eps, sign), (Polarity::One, Sign::Pos) | (Polarity::Partial, Sign::Neg))
}

/// Critical leaves of one signed tree; variables missing from `eps` are skipped.
pub fn critical_leaves(tree: &SignedTree, eps: &BTreeMap<String, Polarity>) -> Vec<(String, Path, Sign)> {
    tree.var_leaves()
        .into_iter()
        .filter(|(v, _, s)| eps.get(v).map(|&e| is_critical(e, *s)).unwrap_or(false))
        .collect()
}

pub fn critical_occurrences(ineq: &Inequality, eps: &BTreeMap<String, Polarity>) -> Vec<CriticalOccurrence> {
    let mut out = Vec::new();
    for side in [Side::Lhs, Side::Rhs] {
        let tree = build_signed_tree(ineq.side(side), side.root_sign());
        for (var, path, sign) in critical_leaves(&tree, eps) {
            out.push(CriticalOccurrence { side, var, path, sign });
        }
    }
    out
}

impl fmt::Display for SignedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.dump())
    }
}

//! Terms, inequalities, substitution, polarity and the closed/open predicates.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::signature::{Connective, Polarity, Signature};

/// A path is the sequence of child indices from the root.
pub type Path = Vec<usize>;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Nominal(String),
    Conominal(String),
    Top,
    Bottom,
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Apply(Arc<Connective>, Vec<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    /// Sign of a child in a coordinate with the given order-type entry.
    pub fn under(self, p: Polarity) -> Sign {
        match p {
            Polarity::One => self,
            Polarity::Partial => self.flip(),
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Result of [`Term::polarity`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Occurrence {
    Positive,
    Negative,
    Both,
    Absent,
}

impl Occurrence {
    fn add(self, s: Sign) -> Occurrence {
        match (self, s) {
            (Occurrence::Absent, Sign::Pos) | (Occurrence::Positive, Sign::Pos) => Occurrence::Positive,
            (Occurrence::Absent, Sign::Neg) | (Occurrence::Negative, Sign::Neg) => Occurrence::Negative,
            _ => Occurrence::Both,
        }
    }

    /// No negative occurrence.
    pub fn is_positive(self) -> bool {
        matches!(self, Occurrence::Positive | Occurrence::Absent)
    }

    /// No positive occurrence.
    pub fn is_negative(self) -> bool {
        matches!(self, Occurrence::Negative | Occurrence::Absent)
    }
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(name.to_string())
    }

    pub fn nominal(name: &str) -> Term {
        Term::Nominal(name.to_string())
    }

    pub fn conominal(name: &str) -> Term {
        Term::Conominal(name.to_string())
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    pub fn apply(c: &Arc<Connective>, args: Vec<Term>) -> Term {
        assert_eq!(c.arity(), args.len(), "arity of `{}`", c.name);
        Term::Apply(c.clone(), args)
    }

    /// Left-nested join; the empty join is bottom.
    pub fn join_all(items: Vec<Term>) -> Term {
        items.into_iter().reduce(Term::join).unwrap_or(Term::Bottom)
    }

    /// Left-nested meet; the empty meet is top.
    pub fn meet_all(items: Vec<Term>) -> Term {
        items.into_iter().reduce(Term::meet).unwrap_or(Term::Top)
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Meet(a, b) | Term::Join(a, b) => vec![a, b],
            Term::Apply(_, args) => args.iter().collect(),
            _ => Vec::new(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.children().is_empty()
    }

    /// Sign of child `i` given the sign of this node.
    pub fn child_sign(&self, sign: Sign, i: usize) -> Sign {
        match self {
            Term::Apply(c, _) => sign.under(c.order_type.get(i)),
            _ => sign,
        }
    }

    pub fn subterm(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Replaces the subterm at `path`; `None` if the path is invalid.
    pub fn replace(&self, path: &[usize], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        match self {
            Term::Meet(a, b) | Term::Join(a, b) => {
                let (a, b) = match i {
                    0 => (a.replace(rest, new)?, (**b).clone()),
                    1 => ((**a).clone(), b.replace(rest, new)?),
                    _ => return None,
                };
                Some(if matches!(self, Term::Meet(..)) { Term::meet(a, b) } else { Term::join(a, b) })
            }
            Term::Apply(c, args) => {
                let mut args = args.clone();
                let slot = args.get_mut(i)?;
                *slot = slot.replace(rest, new)?;
                Some(Term::Apply(c.clone(), args))
            }
            _ => None,
        }
    }

    /// Sign of the node at `path` when the root has sign `root`.
    pub fn sign_at(&self, root: Sign, path: &[usize]) -> Option<Sign> {
        let mut t = self;
        let mut s = root;
        for &i in path {
            let child = *t.children().get(i)?;
            s = t.child_sign(s, i);
            t = child;
        }
        Some(s)
    }

    pub fn substitute(&self, v: &str, u: &Term) -> Term {
        match self {
            Term::Var(n) if n == v => u.clone(),
            Term::Meet(a, b) => Term::meet(a.substitute(v, u), b.substitute(v, u)),
            Term::Join(a, b) => Term::join(a.substitute(v, u), b.substitute(v, u)),
            Term::Apply(c, args) => Term::Apply(c.clone(), args.iter().map(|a| a.substitute(v, u)).collect()),
            _ => self.clone(),
        }
    }

    pub fn visit_signed<'a>(&'a self, sign: Sign, f: &mut impl FnMut(&'a Term, Sign)) {
        f(self, sign);
        for (i, c) in self.children().into_iter().enumerate() {
            c.visit_signed(self.child_sign(sign, i), f);
        }
    }

    pub fn polarity(&self, v: &str) -> Occurrence {
        let mut occ = Occurrence::Absent;
        self.visit_signed(Sign::Pos, &mut |t, s| {
            if matches!(t, Term::Var(n) if n == v) {
                occ = occ.add(s);
            }
        });
        occ
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut |t| {
            if let Term::Var(n) = t {
                out.insert(n.clone());
            }
        });
        out
    }

    fn collect_atoms(&self, f: &mut impl FnMut(&Term)) {
        match self {
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_atoms(f);
                b.collect_atoms(f);
            }
            Term::Apply(_, args) => args.iter().for_each(|a| a.collect_atoms(f)),
            _ => f(self),
        }
    }

    /// All variables, nominals and conominals.
    pub fn atoms(&self) -> BTreeSet<Term> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut |t| {
            if matches!(t, Term::Var(_) | Term::Nominal(_) | Term::Conominal(_)) {
                out.insert(t.clone());
            }
        });
        out
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(n) => n == v,
            Term::Meet(a, b) | Term::Join(a, b) => a.contains_var(v) || b.contains_var(v),
            Term::Apply(_, args) => args.iter().any(|a| a.contains_var(v)),
            _ => false,
        }
    }

    pub fn contains_atom(&self, atom: &Term) -> bool {
        if self == atom {
            return true;
        }
        self.children().into_iter().any(|c| c.contains_atom(atom))
    }

    pub fn is_pure(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Meet(a, b) | Term::Join(a, b) => a.is_pure() && b.is_pure(),
            Term::Apply(_, args) => args.iter().all(|a| a.is_pure()),
            _ => true,
        }
    }

    /// No nominals, conominals or connectives outside the base signature.
    pub fn is_base_language(&self) -> bool {
        match self {
            Term::Nominal(_) | Term::Conominal(_) => false,
            Term::Meet(a, b) | Term::Join(a, b) => a.is_base_language() && b.is_base_language(),
            Term::Apply(c, args) => c.is_base() && args.iter().all(|a| a.is_base_language()),
            _ => true,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn depth(&self) -> usize {
        1 + self.children().into_iter().map(|c| c.depth()).max().unwrap_or(0)
    }

    /// Every path of the term in preorder.
    pub fn paths(&self) -> Vec<Path> {
        fn go(t: &Term, cur: &mut Path, out: &mut Vec<Path>) {
            out.push(cur.clone());
            for (i, c) in t.children().into_iter().enumerate() {
                cur.push(i);
                go(c, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Reads the term in the order dual, with connectives taken from `dual_sig`.
    pub fn dual(&self, dual_sig: &Signature) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::Nominal(n) => Term::Conominal(n.clone()),
            Term::Conominal(n) => Term::Nominal(n.clone()),
            Term::Top => Term::Bottom,
            Term::Bottom => Term::Top,
            Term::Meet(a, b) => Term::join(a.dual(dual_sig), b.dual(dual_sig)),
            Term::Join(a, b) => Term::meet(a.dual(dual_sig), b.dual(dual_sig)),
            Term::Apply(c, args) => {
                let d = dual_sig.get(&c.name).expect("connective present in dual signature");
                Term::Apply(d.clone(), args.iter().map(|a| a.dual(dual_sig)).collect())
            }
        }
    }
}

/// Constraint kinds used by the closed/open predicates: an atom or connective
/// that must occur with a fixed sign.
fn closed_required_sign(t: &Term) -> Option<Sign> {
    match t {
        Term::Nominal(_) => Some(Sign::Pos),
        Term::Conominal(_) => Some(Sign::Neg),
        Term::Apply(c, _) if c.is_adjoint_like() => {
            Some(if c.family.is_f() { Sign::Pos } else { Sign::Neg })
        }
        _ => None,
    }
}

/// Nominals and F-type adjoints occur only positively; conominals and
/// G-type adjoints only negatively.
pub fn syntactic_closed(t: &Term) -> bool {
    let mut ok = true;
    t.visit_signed(Sign::Pos, &mut |n, s| {
        if let Some(req) = closed_required_sign(n) {
            ok &= s == req;
        }
    });
    ok
}

/// The dual of [`syntactic_closed`].
pub fn syntactic_open(t: &Term) -> bool {
    let mut ok = true;
    t.visit_signed(Sign::Pos, &mut |n, s| {
        if let Some(req) = closed_required_sign(n) {
            ok &= s == req.flip();
        }
    });
    ok
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Lhs,
    Rhs,
}

impl Side {
    /// Root sign of the generation tree of this side.
    pub fn root_sign(self) -> Sign {
        match self {
            Side::Lhs => Sign::Pos,
            Side::Rhs => Sign::Neg,
        }
    }
}

impl Inequality {
    pub fn new(lhs: Term, rhs: Term) -> Self {
        Inequality { lhs, rhs }
    }

    pub fn side(&self, s: Side) -> &Term {
        match s {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    pub fn with_side(&self, s: Side, t: Term) -> Inequality {
        match s {
            Side::Lhs => Inequality::new(t, self.rhs.clone()),
            Side::Rhs => Inequality::new(self.lhs.clone(), t),
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut v = self.lhs.vars();
        v.extend(self.rhs.vars());
        v
    }

    pub fn atoms(&self) -> BTreeSet<Term> {
        let mut v = self.lhs.atoms();
        v.extend(self.rhs.atoms());
        v
    }

    pub fn is_pure(&self) -> bool {
        self.lhs.is_pure() && self.rhs.is_pure()
    }

    pub fn contains_var(&self, v: &str) -> bool {
        self.lhs.contains_var(v) || self.rhs.contains_var(v)
    }

    pub fn substitute(&self, v: &str, u: &Term) -> Inequality {
        Inequality::new(self.lhs.substitute(v, u), self.rhs.substitute(v, u))
    }

    /// `s <= t` becomes `t^d <= s^d`.
    pub fn dual(&self, dual_sig: &Signature) -> Inequality {
        Inequality::new(self.rhs.dual(dual_sig), self.lhs.dual(dual_sig))
    }
}

/// `FORALL atoms : premises => conclusion`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuasiInequality {
    pub premises: Vec<Inequality>,
    pub conclusion: Inequality,
}

impl QuasiInequality {
    pub fn new(premises: Vec<Inequality>, conclusion: Inequality) -> Self {
        QuasiInequality { premises, conclusion }
    }

    pub fn atoms(&self) -> BTreeSet<Term> {
        let mut out = self.conclusion.atoms();
        for p in &self.premises {
            out.extend(p.atoms());
        }
        out
    }

    pub fn is_pure(&self) -> bool {
        self.conclusion.is_pure() && self.premises.iter().all(|p| p.is_pure())
    }
}

impl From<Inequality> for QuasiInequality {
    fn from(i: Inequality) -> Self {
        QuasiInequality::new(Vec::new(), i)
    }
}

impl fmt::Display for QuasiInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut atoms: Vec<String> = self.atoms().iter().map(|a| a.to_string()).collect();
        atoms.sort();
        write!(f, "FORALL {} :", atoms.join(" "))?;
        let prem: Vec<String> = self.premises.iter().map(|p| p.to_string()).collect();
        if !prem.is_empty() {
            write!(f, " {}", prem.join(" & "))?;
        }
        write!(f, " => {}", self.conclusion)
    }
}

fn is_infix(t: &Term) -> bool {
    matches!(t, Term::Apply(c, args) if args.len() == 2 && c.is_symbolic())
}

fn needs_parens_as_operand(t: &Term) -> bool {
    matches!(t, Term::Meet(..) | Term::Join(..)) || is_infix(t)
}

struct Paren<'a>(&'a Term, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(n) => write!(f, "{}", n),
            Term::Nominal(n) => write!(f, "#{}", n),
            Term::Conominal(n) => write!(f, "@{}", n),
            Term::Top => write!(f, "top"),
            Term::Bottom => write!(f, "bot"),
            Term::Join(a, b) => {
                write!(f, "{} \\/ {}", a, Paren(b, matches!(**b, Term::Join(..))))
            }
            Term::Meet(a, b) => {
                let pa = matches!(**a, Term::Join(..));
                let pb = matches!(**b, Term::Join(..) | Term::Meet(..));
                write!(f, "{} /\\ {}", Paren(a, pa), Paren(b, pb))
            }
            Term::Apply(c, args) if is_infix(self) => write!(
                f,
                "{} {} {}",
                Paren(&args[0], needs_parens_as_operand(&args[0])),
                c.name,
                Paren(&args[1], needs_parens_as_operand(&args[1]))
            ),
            Term::Apply(c, args) => {
                write!(f, "{}(", c.name)?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{}", a)?;
                }
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::signature::{ConnectiveDecl, Family};

    fn sig() -> Signature {
        Signature::new(vec![ConnectiveDecl::new("->", Family::GNormal, "d1")]).unwrap().expand()
    }

    fn imp(a: Term, b: Term) -> Term {
        Term::apply(sig().get("->").unwrap(), vec![a, b])
    }

    #[test]
    fn substitution_examples() {
        let t = Term::meet(Term::var("p"), Term::var("q"));
        assert_eq!(t.substitute("p", &Term::Top), Term::meet(Term::Top, Term::var("q")));
        assert_eq!(Term::Bottom.substitute("p", &Term::var("x")), Term::Bottom);
    }

    #[test]
    fn polarity_examples() {
        let p = Term::var("p");
        let q = Term::var("q");
        assert_eq!(imp(p.clone(), q.clone()).polarity("p"), Occurrence::Negative);
        assert_eq!(imp(p.clone(), imp(q.clone(), p.clone())).polarity("p"), Occurrence::Both);
        assert_eq!(q.polarity("p"), Occurrence::Absent);
    }

    #[test]
    fn closed_and_open() {
        let t = Term::meet(Term::nominal("j1"), Term::var("p"));
        assert!(syntactic_closed(&t));
        assert!(!syntactic_open(&t));
        let p = Term::var("p");
        assert!(syntactic_closed(&p) && syntactic_open(&p));
        assert!(syntactic_open(&Term::join(Term::conominal("m1"), Term::var("q"))));
    }

    #[test]
    fn adjoint_connectives_in_closed_terms() {
        let s = sig();
        let fusion = s.get("->b2").unwrap();
        let t = Term::apply(fusion, vec![Term::nominal("j"), Term::nominal("h")]);
        assert!(syntactic_closed(&t));
        assert!(!syntactic_open(&t));
        let left = s.get("->b1").unwrap();
        let u = Term::apply(left, vec![Term::nominal("h"), Term::conominal("m")]);
        assert!(syntactic_open(&u));
    }

    #[test]
    fn replace_and_subterm() {
        let t = imp(Term::var("p"), imp(Term::var("q"), Term::var("r")));
        assert_eq!(t.subterm(&[1, 0]), Some(&Term::var("q")));
        let u = t.replace(&[1, 0], Term::nominal("j")).unwrap();
        assert_eq!(u.subterm(&[1, 0]), Some(&Term::nominal("j")));
        assert_eq!(t.replace(&[3], Term::Top), None);
        assert_eq!(t.sign_at(Sign::Pos, &[1, 0]), Some(Sign::Neg));
    }

    #[test]
    fn printing() {
        let t = imp(Term::var("p"), imp(Term::var("q"), Term::var("r")));
        assert_eq!(t.to_string(), "p -> (q -> r)");
        let m = Term::meet(Term::join(Term::var("a"), Term::var("b")), Term::var("c"));
        assert_eq!(m.to_string(), "(a \\/ b) /\\ c");
    }
}

//! Executable finite instances of the distribution and Ackermann lemmas.

use super::eval::{eval, Assignment};
use super::lattice::Elem;
use super::model::FiniteLE;
use super::ModelError;
use crate::gentree::{classify_node, NodeClass};
use crate::syntax::{Sign, Term};

/// Every subterm of `t` (under `root`) paired with a variable leaf reached
/// through SAC nodes only, the leaf replaced by `Var(fresh)`. Each result
/// carries the sign of the subterm.
pub fn sac_instances(t: &Term, root: Sign, fresh: &str) -> Vec<(Term, Sign)> {
    let mut out = Vec::new();
    for start in t.paths() {
        let sub = t.subterm(&start).expect("path from paths()");
        let s = t.sign_at(root, &start).expect("path from paths()");
        for leaf in sub.paths() {
            if leaf.is_empty() || !matches!(sub.subterm(&leaf), Some(Term::Var(_))) {
                continue;
            }
            let sac = (0..leaf.len()).all(|k| {
                let node = sub.subterm(&leaf[..k]).expect("prefix");
                classify_node(node, sub.sign_at(s, &leaf[..k]).expect("prefix")) == NodeClass::Sac
            });
            if sac {
                out.push((sub.replace(&leaf, Term::var(fresh)).expect("valid leaf"), s));
            }
        }
    }
    out
}

fn sign_of(phi: &Term, x: &str, root: Sign) -> Option<Sign> {
    let mut found = None;
    phi.visit_signed(root, &mut |t, s| {
        if matches!(t, Term::Var(n) if n == x) {
            found = Some(s);
        }
    });
    found
}

/// Checks the distribution clause selected by the signs of the root and of
/// the unique `x` leaf: a join (positive leaf) or meet (negative leaf) of
/// `family` substituted for `x` equals the join (positive root) or meet
/// (negative root) of the pointwise values.
pub fn distribution_holds(
    m: &FiniteLE,
    phi: &Term,
    x: &str,
    root: Sign,
    family: &[Elem],
    base: &Assignment,
) -> Result<bool, ModelError> {
    let leaf = sign_of(phi, x, root).ok_or_else(|| ModelError::UnboundAtom(x.to_string()))?;
    let lat = &m.lattice;
    let input = match leaf {
        Sign::Pos => lat.join_all(family.iter().copied()),
        Sign::Neg => lat.meet_all(family.iter().copied()),
    };
    let at = |e: Elem| {
        let mut a = base.clone();
        a.set(Term::var(x), e);
        eval(m, phi, &a)
    };
    let lhs = at(input)?;
    let values = family.iter().map(|&e| at(e)).collect::<Result<Vec<_>, _>>()?;
    let rhs = match root {
        Sign::Pos => lat.join_all(values),
        Sign::Neg => lat.meet_all(values),
    };
    Ok(lhs == rhs)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AckermannSide {
    /// `α_i ≤ p`, substitution `⋁α`.
    Right,
    /// `p ≤ α_i`, substitution `⋀α`.
    Left,
}

/// Both sides of an Ackermann biconditional under `v`: the substituted
/// inequalities hold, and some value of `p` satisfies the bounds together
/// with the unsubstituted inequalities. Returns the pair of truth values.
pub fn ackermann_sides(
    m: &FiniteLE,
    side: AckermannSide,
    p: &str,
    alphas: &[Term],
    pairs: &[(Term, Term)],
    v: &Assignment,
) -> Result<(bool, bool), ModelError> {
    let lat = &m.lattice;
    let bound = match side {
        AckermannSide::Right => Term::join_all(alphas.to_vec()),
        AckermannSide::Left => Term::meet_all(alphas.to_vec()),
    };
    let mut top = true;
    for (b, g) in pairs {
        let (bv, gv) = (eval(m, &b.substitute(p, &bound), v)?, eval(m, &g.substitute(p, &bound), v)?);
        top &= lat.leq(bv, gv);
    }
    let mut bottom = false;
    for x in lat.elements() {
        let mut w = v.clone();
        w.set(Term::var(p), x);
        let mut ok = true;
        for a in alphas {
            let av = eval(m, a, &w)?;
            ok &= match side {
                AckermannSide::Right => lat.leq(av, x),
                AckermannSide::Left => lat.leq(x, av),
            };
        }
        for (b, g) in pairs {
            ok &= lat.leq(eval(m, b, &w)?, eval(m, g, &w)?);
        }
        if ok {
            bottom = true;
            break;
        }
    }
    Ok((top, bottom))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{interpret_expanded, validate_model, Lattice, OpTable};
    use crate::syntax::{parse_term, ConnectiveDecl, Family, Signature};
    use std::collections::BTreeMap;

    fn setup() -> (Signature, FiniteLE) {
        let sig = Signature::new(vec![
            ConnectiveDecl::new("dia", Family::FNormal, "1"),
            ConnectiveDecl::new("box", Family::GNormal, "1"),
        ])
        .unwrap();
        let lat = Lattice::diamond();
        // dia sends atoms 1, 2 to 3; box is its right adjoint.
        let dia = OpTable::new(1, 4, vec![0, 3, 3, 3]);
        let boxt = OpTable::new(1, 4, vec![0, 0, 0, 3]);
        let ops = BTreeMap::from([("dia".to_string(), dia), ("box".to_string(), boxt)]);
        let m = interpret_expanded(&validate_model(lat, &sig, ops).unwrap()).unwrap();
        (sig, m)
    }

    #[test]
    fn sac_instances_of_box_dia() {
        let (sig, _) = setup();
        let t = parse_term("dia(p /\\ box(q))", &sig).unwrap();
        // The meet under +dia blocks every branch.
        assert!(sac_instances(&t, Sign::Pos, "x").is_empty());
        let u = parse_term("box(p) /\\ q", &sig).unwrap();
        let inst = sac_instances(&u, Sign::Neg, "x");
        assert_eq!(inst, vec![(parse_term("box(x)", &sig).unwrap(), Sign::Neg)]);
    }

    #[test]
    fn distribution_and_failure_off_branch() {
        let (sig, m) = setup();
        let mut base = Assignment::new();
        base.set(Term::var("q"), 2);
        let dia = parse_term("dia(x)", &sig).unwrap();
        for fam in [vec![1, 2], vec![0], vec![1, 3]] {
            assert!(distribution_holds(&m, &dia, "x", Sign::Pos, &fam, &base).unwrap());
        }
        // box is not join-preserving, so the clause fails for the join 1 v 2 = 3.
        let boxed = parse_term("box(x)", &sig).unwrap();
        assert!(!distribution_holds(&m, &boxed, "x", Sign::Pos, &[1, 2], &base).unwrap());
    }

    #[test]
    fn ackermann_on_diamond() {
        let (sig, m) = setup();
        let alphas = vec![parse_term("dia(q)", &sig).unwrap()];
        let pairs = vec![(parse_term("dia(p)", &sig).unwrap(), parse_term("box(q)", &sig).unwrap())];
        for q in 0..4 {
            let mut v = Assignment::new();
            v.set(Term::var("q"), q);
            let (a, b) = ackermann_sides(&m, AckermannSide::Right, "p", &alphas, &pairs, &v).unwrap();
            assert_eq!(a, b);
        }
    }
}

//! Invariant checkers over systems and traces.

use std::collections::BTreeMap;

use super::run::Trace;
use super::system::{member_root_sign, System};
use crate::classify::{term_is_inductive, Certificate};
use crate::gentree::{analyze_branch, build_signed_tree, critical_leaves};
use crate::syntax::{syntactic_closed, syntactic_open, Inequality, Origin, Polarity, Side, Signature, Term};

/// No step modifies a side condition except through Ackermann substitution.
pub fn check_safety(trace: &Trace) -> bool {
    trace.systems.iter().all(|t| t.steps.iter().all(|s| !s.touched_side_condition))
}

/// The side condition each black-adjoint member requires, if the member has one at its head.
fn required_side_condition(ineq: &Inequality, sig: &Signature) -> Option<Inequality> {
    let head = |t: &Term| match t {
        Term::Apply(c, args) if args.len() == 1 => match &c.origin {
            Origin::Adjoint { parent } => sig.get(parent).map(|p| (p.clone(), args[0].clone())),
            _ => None,
        },
        _ => None,
    };
    // Lhs heads: bdia (G, 1) and btl (F, d). Rhs heads: bbox (F, 1) and btr (G, d).
    if let Some((p, arg)) = head(&ineq.lhs) {
        let one = p.order_type.get(0) == Polarity::One;
        match (p.family.is_f(), one) {
            (false, true) => return Some(Inequality::new(arg, Term::apply(&p, vec![Term::Top]))),
            (true, false) => return Some(Inequality::new(Term::apply(&p, vec![Term::Top]), arg)),
            _ => {}
        }
    }
    if let Some((p, arg)) = head(&ineq.rhs) {
        let one = p.order_type.get(0) == Polarity::One;
        match (p.family.is_f(), one) {
            (true, true) => return Some(Inequality::new(Term::apply(&p, vec![Term::Bottom]), arg)),
            (false, false) => return Some(Inequality::new(arg, Term::apply(&p, vec![Term::Bottom]))),
            _ => {}
        }
    }
    None
}

/// Every member headed by a black adjoint has its side condition in S.
pub fn check_topological_adequacy(sys: &System, sig: &Signature) -> bool {
    sys.s.iter().all(|m| match required_side_condition(&m.ineq, sig) {
        Some(req) => sys.s.iter().any(|o| o.ineq == req),
        None => true,
    })
}

/// Each non-pure member has a syntactically closed lhs and open rhs.
pub fn check_compact_appropriate(sys: &System) -> bool {
    sys.s
        .iter()
        .filter(|m| !m.is_pure())
        .all(|m| syntactic_closed(&m.ineq.lhs) && syntactic_open(&m.ineq.rhs))
}

/// Pure goal; each member has one pure side and one inductive side, and
/// every critical branch in `−ξ` and `+χ` is entirely PIA.
pub fn is_stripped(sys: &System, cert: &Certificate) -> bool {
    if !sys.goal.is_pure() {
        return false;
    }
    sys.s.iter().all(|m| {
        let sides = [Side::Lhs, Side::Rhs];
        let pure_one = sides.iter().any(|&s| m.ineq.side(s).is_pure());
        let inductive = sides.iter().all(|&s| {
            let t = m.ineq.side(s);
            t.is_pure() || term_is_inductive(t, member_root_sign(s), cert)
        });
        let pia = sides.iter().all(|&s| {
            let tree = build_signed_tree(m.ineq.side(s), member_root_sign(s));
            critical_leaves(&tree, &cert.epsilon)
                .iter()
                .all(|(_, path, _)| analyze_branch(&tree, path).map(|b| b.p2_nodes.is_empty()).unwrap_or(false))
        });
        pure_one && inductive && pia
    })
}

/// Whether `v` has a critical occurrence in `−lhs` or `+rhs` of the member.
pub fn has_critical(ineq: &Inequality, v: &str, eps: Polarity) -> bool {
    let e = BTreeMap::from([(v.to_string(), eps)]);
    [Side::Lhs, Side::Rhs].iter().any(|&s| {
        let tree = build_signed_tree(ineq.side(s), member_root_sign(s));
        !critical_leaves(&tree, &e).is_empty()
    })
}

/// Members are `ξ ≤ v` with `ξ` pure (`v ≤ χ` for `∂`), or free of critical `v` leaves.
pub fn is_ackermann_ready(sys: &System, v: &str, eps: Polarity) -> bool {
    let var = Term::var(v);
    sys.s.iter().all(|m| {
        let (l, r) = (&m.ineq.lhs, &m.ineq.rhs);
        let form1 = match eps {
            Polarity::One => *r == var && l.is_pure(),
            Polarity::Partial => *l == var && r.is_pure(),
        };
        form1 || !has_critical(&m.ineq, v, eps)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::rules::{apply_rule, AckSide, Rule};
    use crate::engine::run::{Step, SystemTrace};
    use crate::engine::system::TaggedInequality;
    use crate::syntax::{parse_inequality, ConnectiveDecl, Family};

    fn sig() -> Signature {
        Signature::new(vec![
            ConnectiveDecl::new("dia", Family::FNormal, "1"),
            ConnectiveDecl::new("->", Family::GNormal, "d1"),
            ConnectiveDecl::new("fr", Family::FRegular, "1"),
        ])
        .unwrap()
        .expand()
    }

    fn ineq(s: &str) -> Inequality {
        parse_inequality(s, &sig()).unwrap()
    }

    fn system(members: &[TaggedInequality], goal: &str) -> System {
        let mut sys = System::initial(ineq(goal));
        sys.s = members.to_vec();
        sys
    }

    fn plain(s: &str) -> TaggedInequality {
        TaggedInequality::plain(ineq(s))
    }

    fn trace_of(sys: &System, rules: &[Rule]) -> Trace {
        let mut cur = sys.clone();
        let mut steps = Vec::new();
        for r in rules {
            let a = apply_rule(&cur, r, &sig(), false).unwrap();
            steps.push(Step {
                rule: r.clone(),
                before: cur.clone(),
                after: a.system.clone(),
                pivotal: a.pivotal,
                touched_side_condition: a.touched_side_condition,
            });
            cur = a.system;
        }
        Trace { input: sys.goal.clone(), preprocessed: vec![], systems: vec![SystemTrace { initial: sys.clone(), steps }] }
    }

    #[test]
    fn safety() {
        let sc = TaggedInequality::side_condition(ineq("fr(bot) <= q"));
        let bad = trace_of(&system(&[sc], "top <= top"), &[Rule::Residuation { member: 0, side: Side::Lhs, coordinate: 0 }]);
        assert!(!check_safety(&bad));
        let sc = TaggedInequality::side_condition(ineq("fr(bot) <= p -> @m1"));
        let ok = trace_of(&system(&[plain("#j1 <= p"), sc], "top <= top"), &[Rule::Ackermann { var: "p".into(), side: AckSide::Right }]);
        assert!(check_safety(&ok));
        assert_eq!(ok.systems[0].steps[0].after.s[0].ineq, ineq("fr(bot) <= #j1 -> @m1"));
    }

    #[test]
    fn adequacy() {
        let s = sig();
        let both = system(&[plain("fr(bot) <= q"), plain("p <= bbox_fr(q)")], "top <= top");
        assert!(check_topological_adequacy(&both, &s));
        let alone = system(&[plain("p <= bbox_fr(q)")], "top <= top");
        assert!(!check_topological_adequacy(&alone, &s));
        let plain_sys = system(&[plain("#j1 <= p -> q")], "top <= top");
        assert!(check_topological_adequacy(&plain_sys, &s));
    }

    #[test]
    fn compact_appropriate() {
        assert!(check_compact_appropriate(&system(&[plain("#j1 <= p -> q")], "top <= top")));
        assert!(!check_compact_appropriate(&system(&[plain("bbox_fr(p) <= q")], "top <= top")));
        assert!(check_compact_appropriate(&system(&[plain("bbox_fr(#j1) <= @m1")], "top <= top")));
    }

    #[test]
    fn stripped_and_ready() {
        let cert = Certificate::new(
            BTreeMap::from([("p".into(), Polarity::One), ("q".into(), Polarity::One), ("r".into(), Polarity::Partial)]),
            [("r", "p"), ("p", "q"), ("r", "q")].iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        );
        let sys = system(
            &[plain("#j1 <= p -> (q -> r)"), plain("#j2 <= p -> q"), plain("#j3 <= p"), plain("r <= @m1")],
            "#j1 <= #j2 -> (#j3 -> @m1)",
        );
        assert!(is_stripped(&sys, &cert));
        assert!(is_ackermann_ready(&sys, "r", Polarity::Partial));
        assert!(!is_ackermann_ready(&sys, "q", Polarity::One));
        // +dia is SAC on the critical branch of the rhs; on the lhs it is read negatively.
        assert!(!is_stripped(&system(&[plain("#j1 <= dia(p)")], "top <= top"), &cert));
        assert!(is_stripped(&system(&[plain("dia(p) <= @m1")], "top <= top"), &cert));
    }
}

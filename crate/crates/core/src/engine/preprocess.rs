//! Stage one: elimination of uniform variables, distribution and splitting.

use crate::gentree::{classify_node, uniform_sign, NodeClass};
use crate::syntax::{Inequality, Side, Sign, Term};

/// Substitutes `⊤` for uniformly positive and `⊥` for uniformly negative
/// variables until none remain.
pub fn eliminate_uniform(ineq: &Inequality) -> Inequality {
    let mut cur = ineq.clone();
    loop {
        let found = cur.vars().into_iter().find_map(|v| uniform_sign(&cur, &v).map(|s| (v, s)));
        match found {
            Some((v, Sign::Pos)) => cur = cur.substitute(&v, &Term::Top),
            Some((v, Sign::Neg)) => cur = cur.substitute(&v, &Term::Bottom),
            None => return cur,
        }
    }
}

/// Pushes SAC nodes below `+∨` / `−∧` children so the latter surface.
pub fn distribute(t: &Term, sign: Sign) -> Term {
    let t = match t {
        Term::Meet(a, b) => Term::meet(distribute(a, sign), distribute(b, sign)),
        Term::Join(a, b) => Term::join(distribute(a, sign), distribute(b, sign)),
        Term::Apply(c, args) => Term::Apply(
            c.clone(),
            args.iter().enumerate().map(|(i, a)| distribute(a, sign.under(c.order_type.get(i)))).collect(),
        ),
        other => return other.clone(),
    };
    if classify_node(&t, sign) != NodeClass::Sac {
        return t;
    }
    let Term::Apply(c, args) = &t else { return t };
    let hit = args
        .iter()
        .enumerate()
        .find(|(i, a)| classify_node(a, sign.under(c.order_type.get(*i))) == NodeClass::DeltaAdjoint);
    let Some((i, child)) = hit else { return t };
    let (x, y) = match child {
        Term::Join(x, y) | Term::Meet(x, y) => ((**x).clone(), (**y).clone()),
        _ => unreachable!("delta-adjoint nodes are binary lattice operations"),
    };
    let mut ax = args.clone();
    ax[i] = x;
    let mut ay = args.clone();
    ay[i] = y;
    let (l, r) = (Term::Apply(c.clone(), ax), Term::Apply(c.clone(), ay));
    let out = if c.family.is_f() { Term::join(l, r) } else { Term::meet(l, r) };
    distribute(&out, sign)
}

/// Splits `+∨` roots on the left and `−∧` roots on the right, recursively.
pub fn split_all(ineq: &Inequality) -> Vec<Inequality> {
    match (&ineq.lhs, &ineq.rhs) {
        (Term::Join(a, b), r) => {
            let mut out = split_all(&Inequality::new((**a).clone(), r.clone()));
            out.extend(split_all(&Inequality::new((**b).clone(), r.clone())));
            out
        }
        (l, Term::Meet(a, b)) => {
            let mut out = split_all(&Inequality::new(l.clone(), (**a).clone()));
            out.extend(split_all(&Inequality::new(l.clone(), (**b).clone())));
            out
        }
        _ => vec![ineq.clone()],
    }
}

pub fn preprocess(ineq: &Inequality) -> Vec<Inequality> {
    let u = eliminate_uniform(ineq);
    let d = Inequality::new(distribute(&u.lhs, Side::Lhs.root_sign()), distribute(&u.rhs, Side::Rhs.root_sign()));
    split_all(&d)
}

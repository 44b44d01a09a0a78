//! Table-level law checks: complete distribution, adjunction, normalization
//! identities and the degeneracy of σ/π-extensions on finite models.

use super::lattice::{Elem, Lattice};
use super::model::{tuples, FiniteLE, OpTable};
use super::ModelError;
use crate::syntax::{Connective, Origin, Polarity};

fn with(args: &[Elem], i: usize, x: Elem) -> Vec<Elem> {
    let mut v = args.to_vec();
    v[i] = x;
    v
}

/// `a ≤ b` in the product order twisted by the order-type.
fn leq_eps(l: &Lattice, ot: &[Polarity], a: &[Elem], b: &[Elem]) -> bool {
    ot.iter().zip(a.iter().zip(b)).all(|(p, (&x, &y))| match p {
        Polarity::One => l.leq(x, y),
        Polarity::Partial => l.leq(y, x),
    })
}

/// Computes f^σ (for F) or g^π (for G) by the closed/open double formula with
/// every element both closed and open, and compares with the table.
pub fn sigma_pi_degeneracy(m: &FiniteLE) -> bool {
    let l = &m.lattice;
    let n = l.size();
    m.signature.connectives().all(|c| {
        let Some(t) = m.op(&c.name) else { return true };
        let ot = c.order_type.entries();
        let k = c.arity();
        let all: Vec<Vec<Elem>> = tuples(n, k).collect();
        let inner: Vec<Elem> = all
            .iter()
            .map(|x| {
                let above = all.iter().filter(|a| leq_eps(l, ot, x, a)).map(|a| t.get(a));
                let below = all.iter().filter(|a| leq_eps(l, ot, a, x)).map(|a| t.get(a));
                if c.family.is_f() {
                    l.meet_all(above)
                } else {
                    l.join_all(below)
                }
            })
            .collect();
        all.iter().all(|u| {
            let outer = if c.family.is_f() {
                l.join_all(all.iter().zip(&inner).filter(|(x, _)| leq_eps(l, ot, x, u)).map(|(_, &v)| v))
            } else {
                l.meet_all(all.iter().zip(&inner).filter(|(x, _)| leq_eps(l, ot, u, x)).map(|(_, &v)| v))
            };
            outer == t.get(u)
        })
    })
}

fn subsets(n: usize) -> impl Iterator<Item = Vec<Elem>> {
    (0u32..(1 << n)).map(move |mask| (0..n).filter(|i| mask & (1 << i) != 0).collect())
}

/// Complete distribution laws for every connective over all subsets of the
/// carrier (nonempty subsets for regular connectives).
pub fn quasi_perfect_laws(m: &FiniteLE) -> Result<(), ModelError> {
    let l = &m.lattice;
    let n = l.size();
    for c in m.signature.connectives() {
        let Some(t) = m.op(&c.name) else { continue };
        let f = c.family.is_f();
        for i in 0..c.arity() {
            let one = c.order_type.get(i) == Polarity::One;
            // F: 1-coordinates take joins, ∂ meets; output is a join. G dually.
            let inner_join = f == one;
            for args in tuples(n, c.arity()).filter(|a| a[i] == 0) {
                for s in subsets(n) {
                    if s.is_empty() && c.family.is_regular() {
                        continue;
                    }
                    let agg = if inner_join { l.join_all(s.iter().copied()) } else { l.meet_all(s.iter().copied()) };
                    let lhs = t.get(&with(&args, i, agg));
                    let images = s.iter().map(|&x| t.get(&with(&args, i, x)));
                    let rhs = if f { l.join_all(images) } else { l.meet_all(images) };
                    if lhs != rhs {
                        return Err(ModelError::LawViolation {
                            connective: c.name.clone(),
                            coordinate: i,
                            witness: format!("args {:?} with subset {:?}", args, s),
                        });
                    }
                }
            }
        }
    }
    Ok(())
}

fn biconditional(l: &Lattice, src: &Connective, st: &OpTable, i: usize, rt: &OpTable) -> Option<String> {
    let one = src.order_type.get(i) == Polarity::One;
    for args in tuples(l.size(), src.arity()) {
        let b = args[i];
        let r = rt.get(&args);
        for x in l.elements() {
            let v = st.get(&with(&args, i, x));
            let left = if src.family.is_f() { l.leq(v, b) } else { l.leq(b, v) };
            let right = match (src.family.is_f(), one) {
                (true, true) | (false, false) => l.leq(x, r),
                _ => l.leq(r, x),
            };
            if left != right {
                return Some(format!("args {:?}, element {}", args, x));
            }
        }
    }
    None
}

/// Re-verifies each residual and black adjoint table against its source.
pub fn adjunction_biconditionals(m: &FiniteLE) -> Result<(), ModelError> {
    for c in m.signature.connectives().filter(|c| c.is_adjoint_like()) {
        let (src, i) = m.signature.adjoint_source(c).expect("adjoint source");
        let (Some(st), Some(rt)) = (m.op(&src.name), m.op(&c.name)) else {
            return Err(ModelError::BadTable(c.name.clone()));
        };
        if let Some(w) = biconditional(&m.lattice, src, st, i, rt) {
            return Err(ModelError::AdjointMissing { connective: c.name.clone(), witness: w });
        }
    }
    Ok(())
}

/// Each regular connective equals its value at the empty argument combined
/// with its normalization: `f(u) = f(⊥) ∨ dia_f(u)`, `f(u) = f(⊤) ∨ tri_f(u)`,
/// `g(u) = g(⊤) ∧ box_g(u)`, `g(u) = g(⊥) ∧ trr_g(u)`.
pub fn normalization_identities(m: &FiniteLE) -> Result<(), ModelError> {
    let l = &m.lattice;
    for c in m.signature.connectives() {
        let Origin::Normalization { parent } = &c.origin else { continue };
        let src = m.signature.get(parent).expect("parent");
        let (Some(st), Some(nt)) = (m.op(parent), m.op(&c.name)) else {
            return Err(ModelError::BadTable(c.name.clone()));
        };
        let one = src.order_type.get(0) == Polarity::One;
        let f = src.family.is_f();
        let base = if f == one { l.bot() } else { l.top() };
        for u in l.elements() {
            let rhs = if f { l.join(st.get(&[base]), nt.get(&[u])) } else { l.meet(st.get(&[base]), nt.get(&[u])) };
            if st.get(&[u]) != rhs {
                return Err(ModelError::LawViolation {
                    connective: c.name.clone(),
                    coordinate: 0,
                    witness: format!("element {}", u),
                });
            }
        }
    }
    Ok(())
}

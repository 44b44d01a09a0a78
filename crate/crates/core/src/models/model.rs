//! Finite lattice expansions: operation tables, law validation, the model
//! file format, and brute-force interpretation of the expanded signature.

use std::collections::BTreeMap;
use std::sync::Arc;

use super::lattice::{Elem, Lattice};
use super::ModelError;
use crate::syntax::{Connective, Origin, Polarity, Signature};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OpTable {
    arity: usize,
    n: usize,
    values: Vec<Elem>,
}

impl OpTable {
    pub fn new(arity: usize, n: usize, values: Vec<Elem>) -> Self {
        assert_eq!(values.len(), n.pow(arity as u32));
        OpTable { arity, n, values }
    }

    pub fn from_fn(arity: usize, n: usize, f: impl Fn(&[Elem]) -> Elem) -> Self {
        let values = tuples(n, arity).map(|t| f(&t)).collect();
        OpTable { arity, n, values }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn index(&self, args: &[Elem]) -> usize {
        args.iter().fold(0, |acc, &a| acc * self.n + a)
    }

    pub fn get(&self, args: &[Elem]) -> Elem {
        self.values[self.index(args)]
    }

    pub fn values(&self) -> &[Elem] {
        &self.values
    }
}

/// All tuples over `0..n` of length `k` in mixed-radix order.
pub fn tuples(n: usize, k: usize) -> impl Iterator<Item = Vec<Elem>> {
    let total = n.pow(k as u32);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; k];
        for slot in t.iter_mut().rev() {
            *slot = idx % n;
            idx /= n;
        }
        t
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteLE {
    pub lattice: Lattice,
    pub signature: Signature,
    pub ops: BTreeMap<String, OpTable>,
}

impl FiniteLE {
    pub fn size(&self) -> usize {
        self.lattice.size()
    }

    pub fn op(&self, name: &str) -> Option<&OpTable> {
        self.ops.get(name)
    }
}

fn with(args: &[Elem], i: usize, x: Elem) -> Vec<Elem> {
    let mut v = args.to_vec();
    v[i] = x;
    v
}

/// Checks the distribution laws of an F-type table over `lat`; G-type tables
/// are checked by passing the dual lattice.
fn check_additive(lat: &Lattice, t: &OpTable, c: &Connective, normal: bool) -> Result<(), ModelError> {
    let n = lat.size();
    let viol = |i: usize, w: String| ModelError::LawViolation { connective: c.name.clone(), coordinate: i, witness: w };
    for i in 0..c.arity() {
        let one = c.order_type.get(i) == Polarity::One;
        for args in tuples(n, c.arity()) {
            if args[i] != 0 {
                continue;
            }
            if normal {
                let unit = if one { lat.bot() } else { lat.top() };
                if t.get(&with(&args, i, unit)) != lat.bot() {
                    return Err(viol(i, format!("empty case at {:?}", with(&args, i, unit))));
                }
            }
            for a in 0..n {
                for b in 0..n {
                    let x = if one { lat.join(a, b) } else { lat.meet(a, b) };
                    let lhs = t.get(&with(&args, i, x));
                    let rhs = lat.join(t.get(&with(&args, i, a)), t.get(&with(&args, i, b)));
                    if lhs != rhs {
                        return Err(viol(i, format!("args {:?} with {} and {} in slot {}", args, a, b, i)));
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_table_shape(lat: &Lattice, c: &Connective, t: Option<&OpTable>) -> Result<(), ModelError> {
    match t {
        Some(t) if t.arity == c.arity() && t.n == lat.size() && t.values.iter().all(|&v| v < lat.size()) => Ok(()),
        _ => Err(ModelError::BadTable(c.name.clone())),
    }
}

fn check_laws(lat: &Lattice, dual: &Lattice, c: &Connective, t: &OpTable) -> Result<(), ModelError> {
    let normal = !c.family.is_regular();
    if c.family.is_f() {
        check_additive(lat, t, c, normal)
    } else {
        check_additive(dual, t, c, normal)
    }
}

/// Whether a single table satisfies the laws of its connective's family.
pub fn table_satisfies_laws(lat: &Lattice, c: &Connective, t: &OpTable) -> bool {
    check_table_shape(lat, c, Some(t)).is_ok() && check_laws(lat, &lat.dual(), c, t).is_ok()
}

/// Validates the tables of every base connective against the lattice laws.
pub fn validate_model(lattice: Lattice, signature: &Signature, ops: BTreeMap<String, OpTable>) -> Result<FiniteLE, ModelError> {
    let base = if signature.is_expanded() {
        let decls = signature
            .base_connectives()
            .map(|c| crate::syntax::ConnectiveDecl {
                name: c.name.clone(),
                family: c.family,
                arity: c.arity(),
                order_type: c.order_type.clone(),
            })
            .collect();
        Signature::new(decls).expect("base part of a valid signature")
    } else {
        signature.clone()
    };
    let dual = lattice.dual();
    for c in base.connectives() {
        let t = ops.get(&c.name);
        check_table_shape(&lattice, c, t)?;
        check_laws(&lattice, &dual, c, t.unwrap())?;
    }
    let ops = ops.into_iter().filter(|(k, _)| base.get(k).is_some()).collect();
    Ok(FiniteLE { lattice, signature: base, ops })
}

/// Parses `size`, `leq` and `op` lines.
pub fn parse_model(text: &str, signature: &Signature) -> Result<FiniteLE, ModelError> {
    let mut size = None;
    let mut pairs = Vec::new();
    let mut entries: BTreeMap<String, BTreeMap<Vec<Elem>, Elem>> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") || line.starts_with('%') {
            continue;
        }
        let syn = |msg: &str| ModelError::Syntax { line: idx + 1, msg: msg.to_string() };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<Elem>().map_err(|_| syn(&format!("bad element `{}`", s)));
        match parts[0] {
            "size" if parts.len() == 2 => size = Some(num(parts[1])?),
            "leq" if parts.len() == 3 => pairs.push((num(parts[1])?, num(parts[2])?)),
            "op" => {
                let eq = parts.iter().position(|&p| p == "=").ok_or_else(|| syn("missing `=`"))?;
                if eq < 2 || eq + 2 != parts.len() {
                    return Err(syn("expected `op <name> <args...> = <value>`"));
                }
                let args = parts[2..eq].iter().map(|s| num(s)).collect::<Result<Vec<_>, _>>()?;
                let val = num(parts[eq + 1])?;
                entries.entry(parts[1].to_string()).or_default().insert(args, val);
            }
            _ => return Err(syn("unrecognized line")),
        }
    }
    let n = size.ok_or(ModelError::Syntax { line: 0, msg: "missing `size`".into() })?;
    let lattice = Lattice::from_pairs(n, &pairs)?;
    let mut ops = BTreeMap::new();
    for c in signature.base_connectives() {
        let table = entries.remove(&c.name).ok_or_else(|| ModelError::BadTable(c.name.clone()))?;
        let mut values = Vec::with_capacity(n.pow(c.arity() as u32));
        for t in tuples(n, c.arity()) {
            values.push(*table.get(&t).ok_or_else(|| ModelError::BadTable(c.name.clone()))?);
        }
        ops.insert(c.name.clone(), OpTable::new(c.arity(), n, values));
    }
    if let Some(extra) = entries.keys().next() {
        return Err(ModelError::BadTable(extra.clone()));
    }
    validate_model(lattice, signature, ops)
}

/// Renders a model in the file format.
pub fn render_model(m: &FiniteLE) -> String {
    let mut out = format!("size {}\n", m.size());
    for (a, b) in m.lattice.covers() {
        out.push_str(&format!("leq {} {}\n", a, b));
    }
    for c in m.signature.base_connectives() {
        let t = &m.ops[&c.name];
        for args in tuples(m.size(), c.arity()) {
            let a: Vec<String> = args.iter().map(|x| x.to_string()).collect();
            out.push_str(&format!("op {} {} = {}\n", c.name, a.join(" "), t.get(&args)).replace("  ", " "));
        }
    }
    out
}

fn normalization_table(lat: &Lattice, c: &Connective, t: &OpTable) -> OpTable {
    let one = c.order_type.get(0) == Polarity::One;
    OpTable::from_fn(1, lat.size(), |a| {
        let u = a[0];
        match (c.family.is_f(), one) {
            (true, true) if u == lat.bot() => lat.bot(),
            (true, false) if u == lat.top() => lat.bot(),
            (false, true) if u == lat.top() => lat.top(),
            (false, false) if u == lat.bot() => lat.top(),
            _ => t.get(a),
        }
    })
}

/// The adjoint of `src` in coordinate `i`, computed as an extremum and
/// verified against its biconditional.
pub(crate) fn adjoint_table(lat: &Lattice, src: &Connective, t: &OpTable, i: usize, name: &str) -> Result<OpTable, ModelError> {
    let n = lat.size();
    let is_f = src.family.is_f();
    let upper = is_f == (src.order_type.get(i) == Polarity::One);
    let cond = |args: &[Elem], c: Elem| {
        let v = t.get(&with(args, i, c));
        let b = args[i];
        if is_f {
            lat.leq(v, b)
        } else {
            lat.leq(b, v)
        }
    };
    let mut values = Vec::with_capacity(n.pow(src.arity() as u32));
    for args in tuples(n, src.arity()) {
        let set: Vec<Elem> = lat.elements().filter(|&c| cond(&args, c)).collect();
        let r = if upper { lat.join_all(set.iter().copied()) } else { lat.meet_all(set.iter().copied()) };
        for c in lat.elements() {
            let expected = if upper { lat.leq(c, r) } else { lat.leq(r, c) };
            if cond(&args, c) != expected {
                return Err(ModelError::AdjointMissing {
                    connective: name.to_string(),
                    witness: format!("args {:?}, element {}", args, c),
                });
            }
        }
        values.push(r);
    }
    Ok(OpTable::new(src.arity(), n, values))
}

/// Extends a validated model with tables for every connective of the expanded signature.
pub fn interpret_expanded(m: &FiniteLE) -> Result<FiniteLE, ModelError> {
    let sig = m.signature.expand();
    let mut ops = m.ops.clone();
    let mut pending: Vec<&Arc<Connective>> = sig.connectives().filter(|c| !ops.contains_key(&c.name)).collect();
    // Normalizations first: black adjoints are computed from them.
    pending.sort_by_key(|c| !matches!(c.origin, Origin::Normalization { .. }));
    for c in pending {
        let table = match &c.origin {
            Origin::Normalization { parent } => normalization_table(&m.lattice, sig.get(parent).unwrap(), &ops[parent]),
            Origin::Residual { .. } | Origin::Adjoint { .. } => {
                let (src, i) = sig.adjoint_source(c).expect("adjoint source");
                adjoint_table(&m.lattice, src, &ops[&src.name], i, &c.name)?
            }
            Origin::Base => unreachable!("base tables are present"),
        };
        ops.insert(c.name.clone(), table);
    }
    Ok(FiniteLE { lattice: m.lattice.clone(), signature: sig, ops })
}

//! Term evaluation, validity of (quasi-)inequalities and the input/output oracle.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::lattice::Elem;
use super::model::{FiniteLE, OpTable};
use super::ModelError;
use crate::syntax::{Inequality, QuasiInequality, Term};

/// Values of variables, nominals and conominals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment(pub BTreeMap<Term, Elem>);

impl Assignment {
    pub fn new() -> Self {
        Assignment(BTreeMap::new())
    }

    pub fn set(&mut self, atom: Term, x: Elem) {
        self.0.insert(atom, x);
    }

    pub fn get(&self, atom: &Term) -> Option<Elem> {
        self.0.get(atom).copied()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|(k, v)| format!("{}={}", k, v)).collect();
        write!(f, "{}", parts.join(" "))
    }
}

pub fn eval(m: &FiniteLE, t: &Term, a: &Assignment) -> Result<Elem, ModelError> {
    let l = &m.lattice;
    Ok(match t {
        Term::Var(_) | Term::Nominal(_) | Term::Conominal(_) => {
            a.get(t).ok_or_else(|| ModelError::UnboundAtom(t.to_string()))?
        }
        Term::Top => l.top(),
        Term::Bottom => l.bot(),
        Term::Meet(x, y) => l.meet(eval(m, x, a)?, eval(m, y, a)?),
        Term::Join(x, y) => l.join(eval(m, x, a)?, eval(m, y, a)?),
        Term::Apply(c, args) => {
            let table = m.op(&c.name).ok_or_else(|| ModelError::BadTable(c.name.clone()))?;
            let vals = args.iter().map(|x| eval(m, x, a)).collect::<Result<Vec<_>, _>>()?;
            table.get(&vals)
        }
    })
}

#[derive(Clone, Debug)]
enum Instr<'m> {
    Atom(usize),
    Const(Elem),
    Meet(usize, usize),
    Join(usize, usize),
    Apply(&'m OpTable, Vec<usize>),
}

/// A term flattened into postfix slots over indexed atoms.
#[derive(Clone, Debug)]
struct Compiled<'m> {
    code: Vec<Instr<'m>>,
}

impl<'m> Compiled<'m> {
    fn new(m: &'m FiniteLE, t: &Term, atoms: &[Term]) -> Result<Self, ModelError> {
        let mut code = Vec::new();
        Self::emit(m, t, atoms, &mut code)?;
        Ok(Compiled { code })
    }

    fn emit(m: &'m FiniteLE, t: &Term, atoms: &[Term], code: &mut Vec<Instr<'m>>) -> Result<usize, ModelError> {
        let ins = match t {
            Term::Var(_) | Term::Nominal(_) | Term::Conominal(_) => {
                let i = atoms.iter().position(|x| x == t).ok_or_else(|| ModelError::UnboundAtom(t.to_string()))?;
                Instr::Atom(i)
            }
            Term::Top => Instr::Const(m.lattice.top()),
            Term::Bottom => Instr::Const(m.lattice.bot()),
            Term::Meet(x, y) => Instr::Meet(Self::emit(m, x, atoms, code)?, Self::emit(m, y, atoms, code)?),
            Term::Join(x, y) => Instr::Join(Self::emit(m, x, atoms, code)?, Self::emit(m, y, atoms, code)?),
            Term::Apply(c, args) => {
                let table = m.op(&c.name).ok_or_else(|| ModelError::BadTable(c.name.clone()))?;
                let slots = args.iter().map(|x| Self::emit(m, x, atoms, code)).collect::<Result<Vec<_>, _>>()?;
                Instr::Apply(table, slots)
            }
        };
        code.push(ins);
        Ok(code.len() - 1)
    }

    fn run(&self, m: &FiniteLE, vals: &[Elem], buf: &mut Vec<Elem>) -> Elem {
        buf.clear();
        let mut args = Vec::new();
        for ins in &self.code {
            let v = match ins {
                Instr::Atom(i) => vals[*i],
                Instr::Const(c) => *c,
                Instr::Meet(a, b) => m.lattice.meet(buf[*a], buf[*b]),
                Instr::Join(a, b) => m.lattice.join(buf[*a], buf[*b]),
                Instr::Apply(t, slots) => {
                    args.clear();
                    args.extend(slots.iter().map(|&s| buf[s]));
                    t.get(&args)
                }
            };
            buf.push(v);
        }
        *buf.last().expect("nonempty program")
    }
}

struct CompiledIneq<'m> {
    lhs: Compiled<'m>,
    rhs: Compiled<'m>,
    /// Index of the last atom the constraint depends on, or `None` for closed constraints.
    last_atom: Option<usize>,
}

impl<'m> CompiledIneq<'m> {
    fn new(m: &'m FiniteLE, ineq: &Inequality, atoms: &[Term]) -> Result<Self, ModelError> {
        let last_atom = ineq.atoms().iter().filter_map(|a| atoms.iter().position(|x| x == a)).max();
        Ok(CompiledIneq { lhs: Compiled::new(m, &ineq.lhs, atoms)?, rhs: Compiled::new(m, &ineq.rhs, atoms)?, last_atom })
    }

    fn holds(&self, m: &FiniteLE, vals: &[Elem], buf: &mut Vec<Elem>) -> bool {
        let a = self.lhs.run(m, vals, buf);
        let b = self.rhs.run(m, vals, buf);
        m.lattice.leq(a, b)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Validity {
    /// Holds under all `assignments` assignments.
    Valid { assignments: u64 },
    /// The least failing assignment in enumeration order.
    Invalid { counterexample: Assignment },
}

impl Validity {
    pub fn is_valid(&self) -> bool {
        matches!(self, Validity::Valid { .. })
    }
}

/// Atoms in the order they are enumerated: sorted by printed form.
pub fn enumeration_order(atoms: &BTreeSet<Term>) -> Vec<Term> {
    let mut v: Vec<Term> = atoms.iter().cloned().collect();
    v.sort_by_key(|a| a.to_string());
    v
}

/// Exhaustive check of a quasi-inequality over all assignments, in mixed-radix
/// order over the atoms. Assignments falsifying a premise are pruned as soon
/// as the premise's atoms are all fixed.
pub fn check_validity(target: &QuasiInequality, m: &FiniteLE) -> Result<Validity, ModelError> {
    let atoms = enumeration_order(&target.atoms());
    let n = m.size();
    let k = atoms.len();
    let premises = target
        .premises
        .iter()
        .map(|p| CompiledIneq::new(m, p, &atoms))
        .collect::<Result<Vec<_>, _>>()?;
    let conclusion = CompiledIneq::new(m, &target.conclusion, &atoms)?;
    // Premises grouped by the depth at which they become decidable.
    let mut at_depth: Vec<Vec<&CompiledIneq>> = vec![Vec::new(); k + 1];
    for p in &premises {
        at_depth[p.last_atom.map_or(0, |i| i + 1)].push(p);
    }
    let mut vals = vec![0; k];
    let mut buf = Vec::new();
    let total = (n as u64).pow(k as u32);
    let fail = search(m, &at_depth, &conclusion, &mut vals, 0, &mut buf);
    Ok(match fail {
        false => Validity::Valid { assignments: total },
        true => {
            let mut a = Assignment::new();
            for (atom, v) in atoms.into_iter().zip(vals) {
                a.set(atom, v);
            }
            Validity::Invalid { counterexample: a }
        }
    })
}

/// Returns true on finding a counterexample, leaving it in `vals`.
fn search(
    m: &FiniteLE,
    at_depth: &[Vec<&CompiledIneq>],
    conclusion: &CompiledIneq,
    vals: &mut Vec<Elem>,
    depth: usize,
    buf: &mut Vec<Elem>,
) -> bool {
    if at_depth[depth].iter().any(|p| !p.holds(m, vals, buf)) {
        return false;
    }
    if depth == vals.len() {
        return !conclusion.holds(m, vals, buf);
    }
    for x in 0..m.size() {
        vals[depth] = x;
        if search(m, at_depth, conclusion, vals, depth + 1, buf) {
            return true;
        }
    }
    vals[depth] = 0;
    false
}

pub fn check_inequality(target: &Inequality, m: &FiniteLE) -> Result<Validity, ModelError> {
    check_validity(&QuasiInequality::from(target.clone()), m)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleVerdict {
    /// Input and output agree; `assignments` counts the input's assignment space.
    Equivalent { assignments: u64, input_valid: bool },
    Discrepant { input_valid: bool, witness: Assignment, detail: String },
}

impl OracleVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, OracleVerdict::Equivalent { .. })
    }
}

/// Compares validity of the input with validity of the conjunction of outputs on `m`.
/// The witness is the counterexample on whichever side fails.
pub fn equivalence_oracle(input: &Inequality, output: &[QuasiInequality], m: &FiniteLE) -> Result<OracleVerdict, ModelError> {
    let inp = check_inequality(input, m)?;
    let mut out_fail = None;
    for (i, q) in output.iter().enumerate() {
        if let Validity::Invalid { counterexample } = check_validity(q, m)? {
            out_fail = Some((i, counterexample));
            break;
        }
    }
    Ok(match (inp, out_fail) {
        (Validity::Valid { assignments }, None) => OracleVerdict::Equivalent { assignments, input_valid: true },
        (Validity::Invalid { .. }, Some(_)) => {
            let assignments = (m.size() as u64).pow(input.atoms().len() as u32);
            OracleVerdict::Equivalent { assignments, input_valid: false }
        }
        (Validity::Valid { .. }, Some((i, w))) => OracleVerdict::Discrepant {
            input_valid: true,
            witness: w,
            detail: format!("input valid but output {} fails", i + 1),
        },
        (Validity::Invalid { counterexample }, None) => OracleVerdict::Discrepant {
            input_valid: false,
            witness: counterexample,
            detail: "output valid but input fails".into(),
        },
    })
}

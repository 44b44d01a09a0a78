//! Seeded generator of random inductive inequalities.
//!
//! Terms are built top-down from a random certificate: Skeleton nodes near
//! the root, then a PIA spine ending in a critical leaf, with every side
//! argument of the spine drawn from variables strictly below that leaf.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classify::{is_inductive, Certificate};
use crate::syntax::{Connective, ConnectiveDecl, Family, Inequality, Polarity, Sign, Signature, Term};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub size: usize,
    pub seed: u64,
    /// Maximum term depth, counting leaves as depth one.
    pub max_depth: usize,
    pub max_vars: usize,
    /// Number of distinct signatures the items are spread over.
    pub signatures: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { size: 500, seed: 0, max_depth: 5, max_vars: 4, signatures: 4 }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusItem {
    /// Index into [`Corpus::signatures`].
    pub signature: usize,
    pub inequality: Inequality,
    /// The certificate the item was generated from.
    pub certificate: Certificate,
}

#[derive(Clone, Debug)]
pub struct Corpus {
    pub signatures: Vec<Signature>,
    pub items: Vec<CorpusItem>,
}

/// One to two connectives per family with random order-types; normal ones
/// have arity one or two, regular ones are unary.
pub fn random_signature(rng: &mut impl Rng) -> Signature {
    let mut decls = Vec::new();
    for (family, prefix) in [
        (Family::FNormal, "f"),
        (Family::FRegular, "fr"),
        (Family::GNormal, "g"),
        (Family::GRegular, "gr"),
    ] {
        for k in 1..=rng.gen_range(1..=2) {
            let arity = if family.is_regular() { 1 } else { rng.gen_range(1..=2) };
            let ot: String = (0..arity).map(|_| if rng.gen_bool(0.5) { '1' } else { 'd' }).collect();
            decls.push(ConnectiveDecl::new(&format!("{}{}", prefix, k), family, &ot));
        }
    }
    Signature::new(decls).expect("generated names are valid")
}

fn critical_sign(p: Polarity) -> Sign {
    match p {
        Polarity::One => Sign::Pos,
        Polarity::Partial => Sign::Neg,
    }
}

struct Gen<'a, R: Rng> {
    rng: &'a mut R,
    conns: Vec<Arc<Connective>>,
    vars: Vec<String>,
    cert: Certificate,
}

impl<R: Rng> Gen<'_, R> {
    fn pick_conn(&mut self, f: bool) -> Option<Arc<Connective>> {
        let pool: Vec<_> = self.conns.iter().filter(|c| c.family.is_f() == f).cloned().collect();
        pool.choose(self.rng).cloned()
    }

    fn constant(&mut self) -> Term {
        if self.rng.gen_bool(0.5) {
            Term::Top
        } else {
            Term::Bottom
        }
    }

    /// A term under `sign` whose variable occurrences are all non-critical.
    fn uniform(&mut self, sign: Sign, budget: usize, allowed: &[String]) -> Term {
        if budget <= 1 || self.rng.gen_bool(0.6) {
            let ok: Vec<&String> = allowed
                .iter()
                .filter(|v| critical_sign(self.cert.eps(v).unwrap_or(Polarity::One)) != sign)
                .collect();
            return match ok.choose(self.rng) {
                Some(v) => Term::var(v),
                None => self.constant(),
            };
        }
        match self.rng.gen_range(0..3) {
            0 => Term::meet(self.uniform(sign, budget - 1, allowed), self.uniform(sign, budget - 1, allowed)),
            1 => Term::join(self.uniform(sign, budget - 1, allowed), self.uniform(sign, budget - 1, allowed)),
            _ => {
                let f = self.rng.gen_bool(0.5);
                let c = self.pick_conn(f).expect("every family is inhabited");
                let args = (0..c.arity())
                    .map(|i| self.uniform(sign.under(c.order_type.get(i)), budget - 1, allowed))
                    .collect();
                Term::apply(&c, args)
            }
        }
    }

    /// A PIA spine under `sign`; returns the term and its critical leaf, if any.
    fn pia(&mut self, sign: Sign, budget: usize) -> (Term, Option<String>) {
        if budget <= 1 || self.rng.gen_bool(0.35) {
            let crit: Vec<String> = self
                .vars
                .iter()
                .filter(|v| critical_sign(self.cert.eps(v).unwrap_or(Polarity::One)) == sign)
                .cloned()
                .collect();
            return match crit.choose(self.rng) {
                Some(v) => (Term::var(v), Some(v.clone())),
                None => (self.uniform(sign, 1, &self.vars.clone()), None),
            };
        }
        let lattice_node = self.rng.gen_bool(0.3);
        let c = if lattice_node { None } else { self.pick_conn(sign == Sign::Neg) };
        let Some(c) = c else {
            let (cont, leaf) = self.pia(sign, budget - 1);
            let allowed = self.below(leaf.as_deref());
            let other = self.uniform(sign, budget - 1, &allowed);
            let (a, b) = if self.rng.gen_bool(0.5) { (cont, other) } else { (other, cont) };
            let t = if sign == Sign::Pos { Term::meet(a, b) } else { Term::join(a, b) };
            return (t, leaf);
        };
        let k = self.rng.gen_range(0..c.arity());
        let (cont, leaf) = self.pia(sign.under(c.order_type.get(k)), budget - 1);
        let allowed = self.below(leaf.as_deref());
        let args = (0..c.arity())
            .map(|i| if i == k { cont.clone() } else { self.uniform(sign.under(c.order_type.get(i)), budget - 1, &allowed) })
            .collect();
        (Term::apply(&c, args), leaf)
    }

    fn below(&self, v: Option<&str>) -> Vec<String> {
        match v {
            Some(v) => self.vars.iter().filter(|u| self.cert.less(u, v)).cloned().collect(),
            None => self.vars.clone(),
        }
    }

    /// Skeleton nodes under `sign`, with PIA spines or plain variables at the bottom.
    fn skeleton(&mut self, sign: Sign, budget: usize) -> Term {
        if budget <= 1 || self.rng.gen_bool(0.3) {
            if budget >= 2 && self.rng.gen_bool(0.6) {
                return self.pia(sign, budget).0;
            }
            let v = self.vars.choose(self.rng).expect("at least one variable").clone();
            return Term::var(&v);
        }
        let c = if self.rng.gen_bool(0.3) { None } else { self.pick_conn(sign == Sign::Pos) };
        match c {
            None => {
                let (a, b) = (self.skeleton(sign, budget - 1), self.skeleton(sign, budget - 1));
                if sign == Sign::Pos {
                    Term::join(a, b)
                } else {
                    Term::meet(a, b)
                }
            }
            Some(c) => {
                let args = (0..c.arity()).map(|i| self.skeleton(sign.under(c.order_type.get(i)), budget - 1)).collect();
                Term::apply(&c, args)
            }
        }
    }
}

/// A random certificate over `nvars` variables with a random linear Ω.
pub fn random_certificate(rng: &mut impl Rng, nvars: usize) -> Certificate {
    let mut vars: Vec<String> = ["p", "q", "r", "s", "t", "u"][..nvars.min(6)].iter().map(|s| s.to_string()).collect();
    let epsilon: BTreeMap<String, Polarity> = vars
        .iter()
        .map(|v| (v.clone(), if rng.gen_bool(0.5) { Polarity::One } else { Polarity::Partial }))
        .collect();
    vars.shuffle(rng);
    let mut omega = BTreeSet::new();
    for i in 0..vars.len() {
        for j in i + 1..vars.len() {
            omega.insert((vars[i].clone(), vars[j].clone()));
        }
    }
    Certificate::new(epsilon, omega)
}

/// One inductive inequality over `sig`, together with a certificate it satisfies.
pub fn random_inductive(sig: &Signature, rng: &mut impl Rng, max_depth: usize, max_vars: usize) -> (Inequality, Certificate) {
    let conns: Vec<Arc<Connective>> = sig.base_connectives().cloned().collect();
    loop {
        let nvars = rng.gen_range(1..=max_vars.max(1));
        let cert = random_certificate(rng, nvars);
        let vars: Vec<String> = cert.epsilon.keys().cloned().collect();
        let mut g = Gen { rng: &mut *rng, conns: conns.clone(), vars, cert };
        let lhs = g.skeleton(Sign::Pos, max_depth);
        let rhs = g.skeleton(Sign::Neg, max_depth);
        let cert = g.cert;
        let ineq = Inequality::new(lhs, rhs);
        if ineq.vars().is_empty() || ineq.lhs.size() + ineq.rhs.size() < 4 {
            continue;
        }
        if is_inductive(&ineq, &cert).map(|v| v.holds).unwrap_or(false) {
            return (ineq, cert);
        }
    }
}

pub fn generate(config: &CorpusConfig) -> Corpus {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let signatures: Vec<Signature> = (0..config.signatures.max(1)).map(|_| random_signature(&mut rng)).collect();
    let items = (0..config.size)
        .map(|i| {
            let k = i % signatures.len();
            let (inequality, certificate) = random_inductive(&signatures[k], &mut rng, config.max_depth, config.max_vars);
            CorpusItem { signature: k, inequality, certificate }
        })
        .collect();
    Corpus { signatures, items }
}

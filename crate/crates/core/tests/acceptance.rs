//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use alba_core::classify::{find_inductive_certificate, is_inductive, is_sahlqvist};
use alba_core::corpus::{generate, Corpus, CorpusConfig};
use alba_core::engine::{
    canonical_names, check_compact_appropriate, check_safety, check_topological_adequacy, replay, run, EngineConfig,
};
use alba_core::models::{
    ackermann_sides, adjunction_biconditionals, distribution_holds, equivalence_oracle, normalization_identities,
    quasi_perfect_laws, sac_instances, sigma_pi_degeneracy, Assignment, AckermannSide, FiniteLE, ModelPool,
    OracleVerdict,
};
use alba_core::syntax::{
    parse_inequality, ConnectiveDecl, Family, Inequality, Occurrence, Polarity, QuasiInequality, Sign, Signature, Term,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

const FREGE_BUDGET: Duration = Duration::from_millis(100);
const CLASSIFY_BUDGET: Duration = Duration::from_millis(50);
const CORPUS_BUDGET: Duration = Duration::from_secs(300);
const ORACLE_BUDGET: Duration = Duration::from_secs(600);
const CORPUS_SIZE: usize = 500;
const CORPUS_SEED: u64 = 2024;
const ORACLE_MAX_SIZE: usize = 4;
const MIN_MODELS_PER_SIGNATURE: usize = 20;
const LEMMA_MAX_SIZE: usize = 5;
const MAX_FAMILY: usize = 3;
const ACKERMANN_INSTANCES: usize = 1000;

type Outcome = Result<String, String>;
type Criterion<'a> = (&'static str, Box<dyn Fn() -> Outcome + 'a>);

fn frege_sig() -> Signature {
    Signature::new(vec![ConnectiveDecl::new("->", Family::GNormal, "d1")]).unwrap()
}

fn frege() -> Inequality {
    parse_inequality("p -> (q -> r) <= (p -> q) -> (p -> r)", &frege_sig()).unwrap()
}

fn corpus() -> Corpus {
    generate(&CorpusConfig { size: CORPUS_SIZE, seed: CORPUS_SEED, ..CorpusConfig::default() })
}

fn golden_frege() -> Outcome {
    let sig = frege_sig();
    let start = Instant::now();
    let r = run(&frege(), &sig, &EngineConfig::default());
    let elapsed = start.elapsed();
    let out = r.outputs().ok_or_else(|| format!("run failed: {:?}", r.status))?;
    // j⇀(m↼(j•h)) ≤ (j⇀m)↼h, with a↼b written as ->b1(b, a) and j•h as ->b2(j, h).
    let expected = parse_inequality("#j -> ->b1(->b2(#j, #h), @m) <= ->b1(#h, #j -> @m)", &sig.expand()).unwrap();
    let expected = canonical_names(&QuasiInequality::new(vec![], expected));
    if out.len() != 1 || canonical_names(&out[0]) != expected {
        return Err(format!("output {:?} differs from {}", out.iter().map(|q| q.to_string()).collect::<Vec<_>>(), expected));
    }
    if !r.trace.all_pivotal() || !check_safety(&r.trace) {
        return Err("trace not pivotal or not safe".into());
    }
    if elapsed > FREGE_BUDGET {
        return Err(format!("took {:?}", elapsed));
    }
    Ok(format!("{} in {:?}", out[0], elapsed))
}

fn classifier_fidelity() -> Outcome {
    let f = frege();
    let start = Instant::now();
    let cert = find_inductive_certificate(&f).unwrap().ok_or("no certificate")?;
    if !is_inductive(&f, &cert).unwrap().holds {
        return Err(format!("certificate {} does not replay", cert));
    }
    let vars = ["p", "q", "r"];
    for k in 0..8u32 {
        let eps: BTreeMap<String, Polarity> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| (v.to_string(), if k >> i & 1 == 1 { Polarity::Partial } else { Polarity::One }))
            .collect();
        if is_sahlqvist(&f, &eps).unwrap().holds {
            return Err(format!("Sahlqvist under {:?}", eps));
        }
    }
    let elapsed = start.elapsed();
    if elapsed > CLASSIFY_BUDGET {
        return Err(format!("took {:?}", elapsed));
    }
    Ok(format!("{} and 0/8 Sahlqvist in {:?}", cert, elapsed))
}

fn corpus_success(c: &Corpus) -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = c
        .items
        .par_iter()
        .filter_map(|it| {
            let r = run(&it.inequality, &c.signatures[it.signature], &EngineConfig::default());
            let ok = r.is_success() && check_safety(&r.trace) && r.trace.all_pivotal();
            (!ok).then(|| format!("{}: {:?}", it.inequality, r.status))
        })
        .collect();
    let elapsed = start.elapsed();
    if let Some(f) = failures.first() {
        return Err(format!("{}/{} failed, first {}", failures.len(), c.items.len(), f));
    }
    if elapsed > CORPUS_BUDGET {
        return Err(format!("took {:?}", elapsed));
    }
    Ok(format!("{}/{} safe pivotal successes in {:?}", c.items.len(), c.items.len(), elapsed))
}

fn pools(c: &Corpus, max_size: usize, target: usize) -> Vec<Vec<FiniteLE>> {
    c.signatures
        .iter()
        .enumerate()
        .map(|(i, s)| ModelPool::generate(s, max_size, target, i as u64).unwrap().models)
        .collect()
}

fn oracle_agreement(c: &Corpus) -> Outcome {
    let start = Instant::now();
    let pools = pools(c, ORACLE_MAX_SIZE, 2 * MIN_MODELS_PER_SIGNATURE);
    if let Some(p) = pools.iter().find(|p| p.len() < MIN_MODELS_PER_SIGNATURE) {
        return Err(format!("only {} models for a signature", p.len()));
    }
    let checks: Vec<Result<usize, String>> = c
        .items
        .par_iter()
        .map(|it| {
            let r = run(&it.inequality, &c.signatures[it.signature], &EngineConfig::default());
            let out = r.outputs().ok_or_else(|| format!("{} failed", it.inequality))?;
            for m in &pools[it.signature] {
                match equivalence_oracle(&it.inequality, out, m).map_err(|e| e.to_string())? {
                    OracleVerdict::Equivalent { .. } => {}
                    v => return Err(format!("{}: {:?}", it.inequality, v)),
                }
            }
            Ok(pools[it.signature].len())
        })
        .collect();
    let elapsed = start.elapsed();
    let mut total = 0;
    for ch in checks {
        total += ch?;
    }
    if elapsed > ORACLE_BUDGET {
        return Err(format!("took {:?}", elapsed));
    }
    let sizes: Vec<usize> = pools.iter().map(|p| p.len()).collect();
    Ok(format!("{} EQUIVALENT verdicts, models per signature {:?}, in {:?}", total, sizes, elapsed))
}

fn families(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for a in 0..n {
        out.push(vec![a]);
        for b in a + 1..n {
            out.push(vec![a, b]);
            if MAX_FAMILY >= 3 {
                for d in b + 1..n {
                    out.push(vec![a, b, d]);
                }
            }
        }
    }
    out
}

fn random_assignment(t: &Term, m: &FiniteLE, rng: &mut impl Rng) -> Assignment {
    let mut a = Assignment::new();
    for v in t.vars() {
        a.set(Term::var(&v), rng.gen_range(0..m.size()));
    }
    a
}

fn distribution(c: &Corpus) -> Outcome {
    let pools = pools(c, LEMMA_MAX_SIZE, 12);
    let mut instances: Vec<(usize, Term, Sign)> = Vec::new();
    for it in &c.items {
        for (t, s) in [(&it.inequality.lhs, Sign::Pos), (&it.inequality.rhs, Sign::Neg)] {
            for (phi, sign) in sac_instances(t, s, "x!") {
                if !instances.iter().any(|(k, p, g)| *k == it.signature && *p == phi && *g == sign) {
                    instances.push((it.signature, phi, sign));
                }
            }
        }
    }
    let results: Vec<Result<usize, String>> = instances
        .par_iter()
        .enumerate()
        .map(|(i, (k, phi, sign))| {
            let mut rng = ChaCha8Rng::seed_from_u64(i as u64);
            let mut n = 0;
            for m in &pools[*k] {
                for _ in 0..4 {
                    let base = random_assignment(phi, m, &mut rng);
                    for fam in families(m.size()) {
                        if !distribution_holds(m, phi, "x!", *sign, &fam, &base).map_err(|e| e.to_string())? {
                            return Err(format!("{} ({:?}) family {:?}", phi, sign, fam));
                        }
                        n += 1;
                    }
                }
            }
            Ok(n)
        })
        .collect();
    let mut total = 0;
    for r in results {
        total += r?;
    }
    Ok(format!("{} SAC instances, {} checks, zero violations", instances.len(), total))
}

fn random_term(conns: &[std::sync::Arc<alba_core::syntax::Connective>], vars: &[&str], depth: usize, rng: &mut impl Rng) -> Term {
    if depth <= 1 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..vars.len() + 1) {
            0 if rng.gen_bool(0.5) => Term::Top,
            0 => Term::Bottom,
            k => Term::var(vars[k - 1]),
        };
    }
    match rng.gen_range(0..4) {
        0 => Term::meet(random_term(conns, vars, depth - 1, rng), random_term(conns, vars, depth - 1, rng)),
        1 => Term::join(random_term(conns, vars, depth - 1, rng), random_term(conns, vars, depth - 1, rng)),
        _ => {
            let c = conns.choose(rng).unwrap();
            Term::apply(c, (0..c.arity()).map(|_| random_term(conns, vars, depth - 1, rng)).collect())
        }
    }
}

fn term_with(
    conns: &[std::sync::Arc<alba_core::syntax::Connective>],
    want: &[Occurrence],
    rng: &mut impl Rng,
) -> Term {
    loop {
        let t = random_term(conns, &["p", "q", "r"], 4, rng);
        if want.contains(&t.polarity("p")) {
            return t;
        }
    }
}

fn ackermann(c: &Corpus) -> Outcome {
    let pools = pools(c, LEMMA_MAX_SIZE, 12);
    let mut summary = Vec::new();
    for side in [AckermannSide::Right, AckermannSide::Left] {
        let mut rng = ChaCha8Rng::seed_from_u64(7 + side as u64);
        let (mut holds, mut top_true) = (0, 0);
        for _ in 0..ACKERMANN_INSTANCES {
            let k = rng.gen_range(0..c.signatures.len());
            let conns: Vec<_> = c.signatures[k].base_connectives().cloned().collect();
            let m = pools[k].choose(&mut rng).unwrap();
            let alphas: Vec<Term> = (0..rng.gen_range(0..=2)).map(|_| term_with(&conns, &[Occurrence::Absent], &mut rng)).collect();
            let (b_occ, g_occ) = match side {
                AckermannSide::Right => ([Occurrence::Positive, Occurrence::Absent], [Occurrence::Negative, Occurrence::Absent]),
                AckermannSide::Left => ([Occurrence::Negative, Occurrence::Absent], [Occurrence::Positive, Occurrence::Absent]),
            };
            let pairs: Vec<(Term, Term)> = (0..rng.gen_range(1..=2))
                .map(|_| (term_with(&conns, &b_occ, &mut rng), term_with(&conns, &g_occ, &mut rng)))
                .collect();
            let mut v = Assignment::new();
            for name in ["p", "q", "r"] {
                v.set(Term::var(name), rng.gen_range(0..m.size()));
            }
            let (top, bottom) = ackermann_sides(m, side, "p", &alphas, &pairs, &v).map_err(|e| e.to_string())?;
            if top != bottom {
                return Err(format!("{:?}: alphas {:?} pairs {:?} under {}", side, alphas, pairs, v));
            }
            holds += 1;
            top_true += top as usize;
        }
        summary.push(format!("{:?} {}/{} ({} satisfied)", side, holds, ACKERMANN_INSTANCES, top_true));
    }
    Ok(summary.join(", "))
}

fn invariance(c: &Corpus) -> Outcome {
    let results: Vec<Result<usize, String>> = c
        .items
        .par_iter()
        .map(|it| {
            let sig = &c.signatures[it.signature];
            let exp = sig.expand();
            let r = run(&it.inequality, sig, &EngineConfig::default());
            for t in &r.trace.systems {
                for sys in std::iter::once(&t.initial).chain(t.steps.iter().map(|s| &s.after)) {
                    if !check_topological_adequacy(sys, &exp) {
                        return Err(format!("adequacy fails for {}:\n{}", it.inequality, sys));
                    }
                    if !check_compact_appropriate(sys) {
                        return Err(format!("compact-appropriateness fails for {}:\n{}", it.inequality, sys));
                    }
                }
            }
            let finals = replay(&r.trace, sig).map_err(|e| e.to_string())?;
            if finals.iter().zip(&r.trace.systems).any(|(f, t)| f != t.final_system()) {
                return Err(format!("replay diverges for {}", it.inequality));
            }
            Ok(r.trace.steps().count())
        })
        .collect();
    let mut steps = 0;
    for r in results {
        steps += r?;
    }
    Ok(format!("{} steps checked", steps))
}

fn algebra_laws(c: &Corpus) -> Outcome {
    let mut sigs = c.signatures.clone();
    sigs.push(frege_sig());
    sigs.push(
        Signature::new(vec![
            ConnectiveDecl::new("dia", Family::FNormal, "1"),
            ConnectiveDecl::new("box", Family::GNormal, "1"),
            ConnectiveDecl::new("*", Family::FNormal, "11"),
        ])
        .unwrap(),
    );
    let models: Vec<FiniteLE> = sigs
        .iter()
        .enumerate()
        .flat_map(|(i, s)| ModelPool::generate(s, LEMMA_MAX_SIZE, 40, 100 + i as u64).unwrap().models)
        .collect();
    let bad: Vec<String> = models
        .par_iter()
        .filter_map(|m| {
            let r = quasi_perfect_laws(m)
                .and_then(|_| adjunction_biconditionals(m))
                .and_then(|_| normalization_identities(m));
            match r {
                Err(e) => Some(e.to_string()),
                Ok(()) if !sigma_pi_degeneracy(m) => Some("sigma/pi extension differs".into()),
                Ok(()) => None,
            }
        })
        .collect();
    match bad.first() {
        Some(e) => Err(format!("{} violations, first: {}", bad.len(), e)),
        None => Ok(format!("{} models, zero violations", models.len())),
    }
}

#[test]
fn acceptance() {
    let c = corpus();
    let criteria: Vec<Criterion> = vec![
        ("1 golden Frege run", Box::new(golden_frege)),
        ("2 classifier fidelity", Box::new(classifier_fidelity)),
        ("3 corpus success", Box::new(|| corpus_success(&c))),
        ("4 oracle agreement", Box::new(|| oracle_agreement(&c))),
        ("5 distribution lemma", Box::new(|| distribution(&c))),
        ("6 ackermann lemmas", Box::new(|| ackermann(&c))),
        ("7 adequacy and compact-appropriateness", Box::new(|| invariance(&c))),
        ("8 algebra laws", Box::new(|| algebra_laws(&c))),
    ];
    let mut failed = Vec::new();
    for (name, f) in &criteria {
        match f() {
            Ok(detail) => println!("PASS {} :: {}", name, detail),
            Err(detail) => {
                println!("FAIL {} :: {}", name, detail);
                failed.push(*name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {:?}", failed);
}

use std::collections::BTreeSet;

use alba_core::classify::{find_inductive_certificate, is_inductive, is_sahlqvist, Certificate};
use alba_core::corpus::{random_inductive, random_signature};
use alba_core::engine::{is_stripped, replay, run, EngineConfig, Rule};
use alba_core::models::{equivalence_oracle, ModelPool, OracleVerdict};
use alba_core::syntax::{parse_inequality, parse_term, QuasiInequality, Sign, Signature};
use alba_core::Inequality;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn sample(seed: u64) -> (Signature, Inequality, Certificate) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sig = random_signature(&mut rng);
    let (ineq, cert) = random_inductive(&sig, &mut rng, 5, 4);
    (sig, ineq, cert)
}

fn flip(cert: &Certificate) -> Certificate {
    Certificate::new(cert.epsilon.iter().map(|(v, p)| (v.clone(), p.opposite())).collect(), cert.omega.clone())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>()) {
        let (sig, ineq, _) = sample(seed);
        prop_assert_eq!(parse_inequality(&ineq.to_string(), &sig).unwrap(), ineq.clone());
        prop_assert_eq!(parse_term(&ineq.lhs.to_string(), &sig).unwrap(), ineq.lhs);
    }

    #[test]
    fn sign_flip_is_involutive(pos in any::<bool>()) {
        let s = if pos { Sign::Pos } else { Sign::Neg };
        prop_assert_eq!(s.flip().flip(), s);
        prop_assert_ne!(s.flip(), s);
    }

    #[test]
    fn generated_items_replay_their_certificate(seed in any::<u64>()) {
        let (_, ineq, cert) = sample(seed);
        prop_assert!(is_inductive(&ineq, &cert).unwrap().holds);
        let found = find_inductive_certificate(&ineq).unwrap().expect("inductive");
        prop_assert!(is_inductive(&ineq, &found).unwrap().holds);
        prop_assert!(found.omega_is_strict_order());
    }

    #[test]
    fn sahlqvist_implies_inductive(seed in any::<u64>()) {
        let (_, ineq, cert) = sample(seed);
        if is_sahlqvist(&ineq, &cert.epsilon).unwrap().holds {
            let bare = Certificate::new(cert.epsilon.clone(), BTreeSet::new());
            prop_assert!(is_inductive(&ineq, &bare).unwrap().holds);
        }
    }

    #[test]
    fn order_dual_flips_epsilon(seed in any::<u64>()) {
        let (sig, ineq, cert) = sample(seed);
        let dsig = sig.dual();
        let d = ineq.dual(&dsig);
        prop_assert!(is_inductive(&d, &flip(&cert)).unwrap().holds);
        prop_assert_eq!(d.dual(&sig), ineq);
    }

    #[test]
    fn extending_omega_preserves_inductiveness(seed in any::<u64>()) {
        let (_, ineq, _) = sample(seed);
        let found = find_inductive_certificate(&ineq).unwrap().expect("inductive");
        // Sorting by predecessor count yields a linear extension of the harvested order.
        let mut vars: Vec<String> = found.epsilon.keys().cloned().collect();
        vars.sort_by_key(|v| found.omega.iter().filter(|(_, b)| b == v).count());
        let mut omega = BTreeSet::new();
        for i in 0..vars.len() {
            for j in i + 1..vars.len() {
                omega.insert((vars[i].clone(), vars[j].clone()));
            }
        }
        let linear = Certificate::new(found.epsilon.clone(), omega);
        prop_assert!(found.omega.is_subset(&linear.omega));
        prop_assert!(is_inductive(&ineq, &linear).unwrap().holds);
    }

    #[test]
    fn runs_are_deterministic_and_replayable(seed in any::<u64>()) {
        let (sig, ineq, _) = sample(seed);
        let a = run(&ineq, &sig, &EngineConfig::default());
        let b = run(&ineq, &sig, &EngineConfig::default());
        prop_assert_eq!(&a, &b);
        let finals = replay(&a.trace, &sig).unwrap();
        for (f, t) in finals.iter().zip(&a.trace.systems) {
            prop_assert_eq!(f, t.final_system());
        }
        for q in a.outputs().expect("inductive inputs succeed") {
            prop_assert!(q.premises.iter().all(|p| p.is_pure()) && q.conclusion.is_pure());
        }
    }

    #[test]
    fn stripped_after_each_ackermann_step(seed in any::<u64>()) {
        let (sig, ineq, _) = sample(seed);
        let r = run(&ineq, &sig, &EngineConfig::default());
        let cert = r.certificate.clone().expect("strategic run has a certificate");
        for s in r.trace.steps() {
            if matches!(s.rule, Rule::Ackermann { .. }) {
                prop_assert!(is_stripped(&s.after, &cert), "not stripped after {}:\n{}", s.rule, s.after);
            }
        }
    }

    #[test]
    fn oracle_agrees_with_itself(seed in any::<u64>()) {
        let (sig, ineq, _) = sample(seed);
        let pool = ModelPool::generate(&sig, 3, 4, seed).unwrap();
        let own = QuasiInequality::new(vec![], ineq.clone());
        for m in &pool.models {
            let v = equivalence_oracle(&ineq, std::slice::from_ref(&own), m).unwrap();
            prop_assert!(v.is_equivalent(), "{:?}", v);
        }
    }
}

#[test]
fn oracle_detects_wrong_outputs() {
    let sig = Signature::new(vec![
        alba_core::syntax::ConnectiveDecl::new("dia", alba_core::syntax::Family::FNormal, "1"),
    ])
    .unwrap();
    let input = parse_inequality("dia(p) <= p", &sig).unwrap();
    let wrong = QuasiInequality::new(vec![], parse_inequality("top <= bot", &sig).unwrap());
    let pool = ModelPool::generate(&sig, 3, 10, 1).unwrap();
    let discrepant = pool
        .models
        .iter()
        .filter(|m| !matches!(equivalence_oracle(&input, std::slice::from_ref(&wrong), m).unwrap(), OracleVerdict::Equivalent { .. }))
        .count();
    assert!(discrepant > 0);
}

mod common;

use std::collections::{BTreeSet, VecDeque};

use common::*;
use lctrs::confluence::{check, is_trivial, replay_proof, Criterion, ProofStep, SearchConfig, Verdict};
use lctrs::frontend::Lctrs;
use lctrs::rewrite::{rewrite_one, Rewriter};
use lctrs::smt::{SmtResult, Solver, SolverConfig};
use lctrs::terms::{Sort, Term};
use lctrs::theory::{eval_ground, Op, Value};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

const ALL: [Criterion; 6] = [
    Criterion::Orthogonal,
    Criterion::WeaklyOrthogonal,
    Criterion::StronglyClosed,
    Criterion::ParallelClosed,
    Criterion::AlmostParallelClosed,
    Criterion::Joinable,
];

#[test]
fn every_proof_in_the_corpus_replays() {
    let mut proofs = 0;
    for (name, sys) in all_corpus() {
        let solver = solver_for(&sys);
        let rw = Rewriter::new(&sys.rules, &solver);
        let cps = critical_pairs(&sys, &solver);
        for c in ALL {
            let Ok(proof) = check(c, &sys, &cps, &rw, &SearchConfig::default()).unwrap() else { continue };
            replay_proof(&proof, &cps, &rw).unwrap_or_else(|e| panic!("{name}, {}: {e}", c.name()));
            for d in proof.cps.iter().flat_map(|p| &p.closings).map(|c| &c.derivation) {
                assert!(is_trivial(d.end(), &solver).unwrap(), "{name}: {} ends non-trivially", d.start);
            }
            proofs += 1;
        }
    }
    assert!(proofs >= 8, "only {proofs} proofs found");
}

#[test]
fn tampered_proofs_are_rejected() {
    let sys = corpus("max");
    let solver = solver_for(&sys);
    let rw = Rewriter::new(&sys.rules, &solver);
    let cps = critical_pairs(&sys, &solver);
    let mut proof = check(Criterion::StronglyClosed, &sys, &cps, &rw, &SearchConfig::default()).unwrap().unwrap();
    let step = proof
        .cps
        .iter_mut()
        .flat_map(|p| &mut p.closings)
        .flat_map(|c| &mut c.derivation.steps)
        .find_map(|s| match s {
            ProofStep::Single(s) => Some(s),
            ProofStep::Parallel(_) => None,
        })
        .expect("a single step");
    // point the step at the other max rule
    step.redex.kind = match step.redex.kind {
        lctrs::rewrite::StepKind::Rule(0) => lctrs::rewrite::StepKind::Rule(1),
        _ => lctrs::rewrite::StepKind::Rule(0),
    };
    assert!(replay_proof(&proof, &cps, &rw).is_err());

    let mut proof = check(Criterion::StronglyClosed, &sys, &cps, &rw, &SearchConfig::default()).unwrap().unwrap();
    proof.cps.pop();
    assert!(replay_proof(&proof, &cps, &rw).is_err(), "missing pair accepted");
}

#[test]
fn overlays_come_in_mirrored_pairs() {
    for (name, sys) in all_corpus() {
        let solver = solver_for(&sys);
        let cps = critical_pairs(&sys, &solver);
        let keys: BTreeSet<String> = cps.iter().filter(|c| c.overlay).map(|c| c.equation.canonical_key()).collect();
        for cp in cps.iter().filter(|c| c.overlay) {
            assert!(keys.contains(&cp.equation.swap().canonical_key()), "{name}: no mirror for {}", cp.equation);
        }
    }
}

/// Ground terms over the user symbols of `sys` with small integer values.
fn ground_term(rng: &mut StdRng, sys: &Lctrs, sort: &Sort, depth: usize) -> Term {
    let syms: Vec<_> = sys.signature.iter().filter(|f| f.sort() == sort && !f.is_theory()).collect();
    let leaves: Vec<_> = syms.iter().filter(|f| f.arity() == 0).collect();
    let pick_value = syms.is_empty() || rng.gen_bool(0.4);
    if *sort == Sort::int() && (pick_value || (depth == 0 && leaves.is_empty())) {
        if rng.gen_bool(0.2) {
            let a = Term::int(rng.gen_range(0..=2));
            let b = Term::int(rng.gen_range(0..=2));
            return Term::op(Op::Add, vec![a, b]);
        }
        return Term::int(rng.gen_range(-1..=2));
    }
    if depth == 0 {
        return Term::constant(leaves[rng.gen_range(0..leaves.len())]);
    }
    let f = syms[rng.gen_range(0..syms.len())];
    let args = f.arg_sorts().iter().map(|s| ground_term(rng, sys, s, depth - 1)).collect();
    Term::app_unchecked(f.clone(), args)
}

/// Terms reachable from `t` in at most `depth` steps, capped in number.
fn reducts(t: &Term, sys: &Lctrs, depth: usize, cap: usize) -> (BTreeSet<Term>, bool) {
    let mut seen = BTreeSet::from([t.clone()]);
    let mut queue = VecDeque::from([(t.clone(), 0)]);
    while let Some((u, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for s in rewrite_one(&u, &sys.rules) {
            if seen.len() >= cap {
                return (seen, true);
            }
            if seen.insert(s.result.clone()) {
                queue.push_back((s.result, d + 1));
            }
        }
    }
    (seen, false)
}

#[test]
fn peaks_of_confluent_systems_join() {
    let mut rng = StdRng::seed_from_u64(50);
    let mut peaks = 0;
    for (name, sys) in all_corpus() {
        let report = analyze_seq(&sys);
        if !matches!(report.verdict, Verdict::Yes(_)) {
            continue;
        }
        for _ in 0..50 {
            let t = ground_term(&mut rng, &sys, &Sort::int(), 2);
            let (tops, _) = reducts(&t, &sys, 3, 40);
            let tops: Vec<Term> = tops.into_iter().collect();
            let below: Vec<BTreeSet<Term>> = tops
                .iter()
                .map(|u| {
                    let (r, capped) = reducts(u, &sys, 10, 4000);
                    assert!(!capped, "{name}: reducts of {u} exceed the cap");
                    r
                })
                .collect();
            for i in 0..tops.len() {
                for j in i + 1..tops.len() {
                    assert!(
                        !below[i].is_disjoint(&below[j]),
                        "{name}: {} and {} from {t} do not join in 10 steps",
                        tops[i],
                        tops[j]
                    );
                    peaks += 1;
                }
            }
        }
    }
    assert!(peaks > 100, "only {peaks} peaks examined");
}

fn random_formula(rng: &mut StdRng, depth: usize) -> Term {
    fn num(rng: &mut StdRng, depth: usize) -> Term {
        if depth == 0 || rng.gen_bool(0.3) {
            return Term::int(rng.gen_range(-4..=4));
        }
        let op = [Op::Add, Op::Sub, Op::Mul, Op::Neg][rng.gen_range(0..4)];
        let args = (0..op.arity()).map(|_| num(rng, depth - 1)).collect();
        Term::op(op, args)
    }
    if depth == 0 || rng.gen_bool(0.4) {
        let op = [Op::Le, Op::Ge, Op::Lt, Op::Gt, Op::Eq][rng.gen_range(0..5)];
        return Term::op(op, vec![num(rng, 2), num(rng, 2)]);
    }
    let op = [Op::Not, Op::And, Op::Or, Op::Implies][rng.gen_range(0..4)];
    let args = (0..op.arity()).map(|_| random_formula(rng, depth - 1)).collect();
    Term::op(op, args)
}

#[test]
fn evaluation_agrees_with_the_solver() {
    let mut rng = StdRng::seed_from_u64(100);
    let phis: Vec<Term> = (0..100).map(|_| random_formula(&mut rng, 3)).collect();
    let solver = Solver::new(SolverConfig::default().with_logic(lctrs::theory::Logic::QF_NIA));
    let answers = solver.check_sat_all(&phis).unwrap();
    let mut truths = 0;
    for (phi, answer) in phis.iter().zip(answers) {
        let value = eval_ground(phi).unwrap();
        let expected = if value == Value::Bool(true) { SmtResult::Sat } else { SmtResult::Unsat };
        assert_eq!(answer, expected, "{phi}");
        truths += (value == Value::Bool(true)) as usize;
    }
    assert!((20..=80).contains(&truths), "{truths} of 100 formulas true");
}

#[test]
fn concurrent_and_sequential_verdicts_agree() {
    for (name, sys) in all_corpus() {
        let seq = analyze_seq(&sys);
        let config = lctrs::confluence::AnalysisConfig {
            timeout: std::time::Duration::from_secs(60),
            ..Default::default()
        };
        let conc = lctrs::confluence::analyze(&sys, &config).unwrap();
        assert_eq!(seq.verdict.label(), conc.verdict.label(), "{name}");
    }
}

#[test]
fn calc_symbols_only_from_left_hand_sides() {
    let sys = corpus("ackermann");
    let calc: Vec<String> = lctrs::confluence::overlap_rules(&sys)
        .into_iter()
        .filter_map(|(r, _)| match r {
            lctrs::confluence::RuleRef::Calc(f) => Some(f.name().to_string()),
            lctrs::confluence::RuleRef::User(_) => None,
        })
        .collect();
    assert!(calc.is_empty(), "{calc:?}");
}

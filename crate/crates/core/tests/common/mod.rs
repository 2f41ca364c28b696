#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use lctrs::confluence::{analyze, AnalysisConfig, CriticalPair, Derivation, Report};
use lctrs::frontend::{load, Lctrs};
use lctrs::rewrite::{ConstrainedEquation, Rewriter, Side};
use lctrs::smt::{Solver, SolverConfig};
use lctrs::terms::{Substitution, Term, Var};
use lctrs::theory::{eval_ground, Value};

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus(name: &str) -> Lctrs {
    let path = corpus_dir().join(format!("{name}.lctrs"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    load(&text).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// Every system in the corpus, by file stem, in name order.
pub fn all_corpus() -> Vec<(String, Lctrs)> {
    let mut names: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| {
            let p = e.unwrap().path();
            (p.extension()? == "lctrs").then(|| p.file_stem().unwrap().to_string_lossy().into_owned())
        })
        .collect();
    names.sort();
    names.into_iter().map(|n| (n.clone(), corpus(&n))).collect()
}

pub fn solver_for(sys: &Lctrs) -> Solver {
    Solver::new(SolverConfig::default().with_logic(sys.theory.logic))
}

/// Sequential analysis with a generous deadline so that results do not
/// depend on machine speed.
pub fn analyze_seq(sys: &Lctrs) -> Report {
    let config = AnalysisConfig { sequential: true, timeout: std::time::Duration::from_secs(60), ..Default::default() };
    analyze(sys, &config).expect("solver available")
}

pub fn critical_pairs(sys: &Lctrs, solver: &Solver) -> Vec<CriticalPair> {
    lctrs::confluence::critical_pairs(sys, solver, true).expect("solver available")
}

/// Parses a term against a signature given in file syntax.
pub fn term(signature: &str, text: &str) -> Term {
    let src = format!("SIGNATURE {signature} probe : Int -> Int; RULES probe(probe_arg) -> {text};");
    load(&src).unwrap_or_else(|e| panic!("{text}: {e}")).rules[0].rhs.clone()
}

/// All assignments of `vars` to integers in `lo..=hi`.
pub fn assignments(vars: &[Var], lo: i64, hi: i64) -> Vec<Substitution> {
    let mut out = vec![Substitution::new()];
    for x in vars {
        out = out
            .into_iter()
            .flat_map(|s| {
                (lo..=hi).map(move |n| {
                    let mut s = s.clone();
                    s.insert(x.clone(), Term::int(n));
                    s
                })
            })
            .collect();
    }
    out
}

pub fn holds(phi: &Term) -> bool {
    matches!(eval_ground(phi), Ok(Value::Bool(true)))
}

/// One contraction inside a derivation, with the equation it applies to.
pub struct LoggedStep {
    pub before: ConstrainedEquation,
    pub side: Side,
    pub redex: lctrs::rewrite::Redex,
    pub after: ConstrainedEquation,
}

/// Breaks a derivation into single contractions; parallel steps are
/// replayed redex by redex.
pub fn single_steps(rw: &Rewriter<'_>, d: &Derivation) -> Vec<LoggedStep> {
    use lctrs::confluence::ProofStep;
    let mut out = Vec::new();
    let mut cur = d.start.clone();
    for step in &d.steps {
        match step {
            ProofStep::Single(s) => {
                let side = s.side.unwrap_or(Side::Left);
                out.push(LoggedStep { before: cur.clone(), side, redex: s.redex.clone(), after: s.result.clone() });
                cur = s.result.clone();
            }
            ProofStep::Parallel(p) => {
                for r in &p.redexes {
                    let (t, phi) = rw.replay_redex(cur.side(p.side), &cur.constraint, r).expect("replayable");
                    let next = cur.with_side(p.side, t, phi);
                    out.push(LoggedStep { before: cur.clone(), side: p.side, redex: r.clone(), after: next.clone() });
                    cur = next;
                }
            }
        }
    }
    out
}

/// Extends an assignment by the values the defining equations `z = e`
/// of `extension` force on the fresh variables.
pub fn extend_assignment(gamma: &Substitution, extension: &[Term]) -> Option<Substitution> {
    let mut g = gamma.clone();
    for e in extension {
        let args = e.args();
        let x = args.first()?.as_var()?.clone();
        if args[1].as_var() == Some(&x) {
            // `x = x` leaves x free; the caller enumerates it
            continue;
        }
        let v = eval_ground(&g.apply(&args[1])).ok()?;
        g.insert(x, Term::Val(v));
    }
    Some(g)
}

pub fn count_by<K: Ord, I: IntoIterator<Item = K>>(items: I) -> BTreeMap<K, usize> {
    let mut m = BTreeMap::new();
    for k in items {
        *m.entry(k).or_insert(0) += 1;
    }
    m
}

/// Parses one rule against a signature given in file syntax.
pub fn rule(signature: &str, text: &str) -> lctrs::terms::Rule {
    let src = format!("SIGNATURE {signature} RULES {text};");
    load(&src).unwrap_or_else(|e| panic!("{text}: {e}")).rules[0].clone()
}

/// Reads `l -> r [c]` as the equation `l ≈ r [c]`.
pub fn equation(signature: &str, text: &str) -> ConstrainedEquation {
    let r = rule(signature, text);
    ConstrainedEquation::new(r.lhs, r.rhs, r.constraint)
}

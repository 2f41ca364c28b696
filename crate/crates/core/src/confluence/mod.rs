//! Critical pairs, triviality, and the confluence criteria with their
//! bounded closing searches.

mod criteria;
mod overlap;
mod search;
mod trivial;

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::frontend::Lctrs;
use crate::rewrite::{Rewriter, DEFAULT_EVAR_CAP};
use crate::smt::{SmtError, Solver, SolverConfig};

pub use criteria::{
    check, replay_proof, Closing, CpProof, Criterion, CriterionResult, Proof, ProofError, SearchConfig,
    UnknownCriterion, ALMOST_PARALLEL, JOIN, PARALLEL, STRONG_LEFT, STRONG_RIGHT, TRIVIAL,
};
pub use overlap::{compute_overlaps, critical_pair, critical_pairs, overlap_rules, CriticalPair, Overlap, RuleRef};
pub use search::{close_by_search, Derivation, ProofStep, SearchLimits, SearchOutcome};
pub use trivial::{equation_formula, is_trivial, trivial_many, triviality_formula};

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    /// Wall-clock limit for the whole analysis.
    pub timeout: Duration,
    pub search: SearchConfig,
    /// Adds the joinability criterion, which is only sound for terminating
    /// systems.
    pub assume_terminating: bool,
    pub criteria: Vec<Criterion>,
    /// The logic is taken from the system.
    pub solver: SolverConfig,
    /// Leaving out the dummy equations for extra variables is unsound;
    /// the switch exists to demonstrate that.
    pub include_psi: bool,
    /// Run criteria one after another in a fixed order instead of
    /// concurrently.
    pub sequential: bool,
    pub evar_cap: usize,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            timeout: Duration::from_secs(5),
            search: SearchConfig::default(),
            assume_terminating: false,
            criteria: Criterion::DEFAULT.to_vec(),
            solver: SolverConfig::default(),
            include_psi: true,
            sequential: false,
            evar_cap: DEFAULT_EVAR_CAP,
        }
    }
}

impl AnalysisConfig {
    /// The criteria to run, deduplicated, in the fixed order.
    pub fn enabled_criteria(&self) -> Vec<Criterion> {
        let mut out = self.criteria.clone();
        if self.assume_terminating {
            out.push(Criterion::Joinable);
        }
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug)]
pub enum Verdict {
    Yes(Proof),
    Maybe(Vec<String>),
    Timeout,
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Yes(_) => "YES",
            Verdict::Maybe(_) => "MAYBE",
            Verdict::Timeout => "TIMEOUT",
        }
    }

    pub fn criterion(&self) -> Option<Criterion> {
        match self {
            Verdict::Yes(p) => Some(p.criterion),
            _ => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub verdict: Verdict,
    /// Empty when the analysis timed out before they were computed.
    pub critical_pairs: Vec<CriticalPair>,
    /// Results of the criteria that finished, in the fixed order.
    pub outcomes: BTreeMap<Criterion, CriterionResult>,
    pub elapsed: Duration,
}

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("solver failure: {0}")]
    Solver(#[from] SmtError),
}

enum Message {
    Pairs(Result<Vec<CriticalPair>, SmtError>),
    Outcome(Criterion, Result<CriterionResult, SmtError>),
}

fn run_criterion(
    criterion: Criterion,
    sys: &Lctrs,
    cps: &[CriticalPair],
    solver: &Solver,
    config: &AnalysisConfig,
) -> Result<CriterionResult, SmtError> {
    let rw = Rewriter::new(&sys.rules, solver).with_evar_cap(config.evar_cap);
    check(criterion, sys, cps, &rw, &config.search)
}

/// Computes the critical pairs and runs the enabled criteria under the
/// configured deadline. The first criterion to succeed decides the
/// verdict and cancels the others.
pub fn analyze(sys: &Lctrs, config: &AnalysisConfig) -> Result<Report, AnalysisError> {
    let start = Instant::now();
    let deadline = start + config.timeout;
    let cancel = Arc::new(AtomicBool::new(false));
    let solver_config = config.solver.clone().with_logic(sys.theory.logic);
    let sys = Arc::new(sys.clone());
    let config = Arc::new(config.clone());
    let (tx, rx) = mpsc::channel::<Message>();

    let finish = |verdict, critical_pairs, outcomes| {
        cancel.store(true, Ordering::Relaxed);
        Ok(Report { verdict, critical_pairs, outcomes, elapsed: start.elapsed() })
    };

    {
        let (tx, sys, config, cancel, solver_config) =
            (tx.clone(), sys.clone(), config.clone(), cancel.clone(), solver_config.clone());
        thread::spawn(move || {
            let solver = Solver::with_cancel(solver_config, cancel);
            let _ = tx.send(Message::Pairs(critical_pairs(&sys, &solver, config.include_psi)));
        });
    }
    let cps = match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
        Ok(Message::Pairs(Ok(cps))) => Arc::new(cps),
        Ok(Message::Pairs(Err(e))) => {
            cancel.store(true, Ordering::Relaxed);
            return Err(e.into());
        }
        Ok(Message::Outcome(..)) => unreachable!("criteria start after the critical pairs"),
        Err(_) => return finish(Verdict::Timeout, Vec::new(), BTreeMap::new()),
    };

    let criteria = config.enabled_criteria();
    let spawn = |order: Vec<Criterion>| {
        let (tx, sys, config, cancel, solver_config, cps) =
            (tx.clone(), sys.clone(), config.clone(), cancel.clone(), solver_config.clone(), cps.clone());
        thread::spawn(move || {
            let solver = Solver::with_cancel(solver_config, cancel);
            for c in order {
                let result = run_criterion(c, &sys, &cps, &solver, &config);
                let success = matches!(result, Ok(Ok(_)));
                if tx.send(Message::Outcome(c, result)).is_err() || success {
                    break;
                }
            }
        });
    };
    if config.sequential {
        spawn(criteria.clone());
    } else {
        for c in &criteria {
            spawn(vec![*c]);
        }
    }
    drop(tx);

    let mut outcomes = BTreeMap::new();
    while outcomes.len() < criteria.len() {
        let message = match rx.recv_timeout(deadline.saturating_duration_since(Instant::now())) {
            Ok(m) => m,
            Err(mpsc::RecvTimeoutError::Timeout) => return finish(Verdict::Timeout, cps.to_vec(), outcomes),
            Err(mpsc::RecvTimeoutError::Disconnected) => break,
        };
        let Message::Outcome(c, result) = message else { continue };
        match result {
            Ok(Ok(proof)) => return finish(Verdict::Yes(proof), cps.to_vec(), outcomes),
            Ok(Err(reasons)) => {
                outcomes.insert(c, Err(reasons));
            }
            Err(SmtError::Cancelled) => {
                outcomes.insert(c, Err(vec!["cancelled".to_string()]));
            }
            Err(e) => {
                cancel.store(true, Ordering::Relaxed);
                return Err(e.into());
            }
        }
    }
    let reasons = outcomes
        .iter()
        .flat_map(|(c, r)| r.as_ref().err().into_iter().flatten().map(move |why| format!("{c}: {why}")))
        .collect();
    finish(Verdict::Maybe(reasons), cps.to_vec(), outcomes)
}

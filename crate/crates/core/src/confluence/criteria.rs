use std::fmt;
use std::str::FromStr;

use super::overlap::CriticalPair;
use super::search::{close_by_search, Derivation, ProofStep, SearchLimits, SearchOutcome};
use super::trivial::{is_trivial, trivial_many};
use crate::frontend::Lctrs;
use crate::rewrite::{ConstrainedEquation, ReplayError, Rewriter, Side, DEFAULT_MAX_REDEXES, DEFAULT_PARALLEL_BUDGET};
use crate::smt::SmtError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Criterion {
    Orthogonal,
    WeaklyOrthogonal,
    StronglyClosed,
    ParallelClosed,
    AlmostParallelClosed,
    /// Joinability of all critical pairs, sound only for terminating
    /// systems.
    Joinable,
}

impl Criterion {
    /// The criteria tried by default, in the order used by sequential runs.
    pub const DEFAULT: [Criterion; 5] = [
        Criterion::Orthogonal,
        Criterion::WeaklyOrthogonal,
        Criterion::StronglyClosed,
        Criterion::ParallelClosed,
        Criterion::AlmostParallelClosed,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Criterion::Orthogonal => "orthogonal",
            Criterion::WeaklyOrthogonal => "weakly orthogonal",
            Criterion::StronglyClosed => "strongly closed",
            Criterion::ParallelClosed => "parallel closed",
            Criterion::AlmostParallelClosed => "almost parallel closed",
            Criterion::Joinable => "joinable CPs under termination assumption",
        }
    }

    /// Short name used on the command line.
    pub fn code(self) -> &'static str {
        match self {
            Criterion::Orthogonal => "o",
            Criterion::WeaklyOrthogonal => "wo",
            Criterion::StronglyClosed => "sc",
            Criterion::ParallelClosed => "pc",
            Criterion::AlmostParallelClosed => "apc",
            Criterion::Joinable => "join",
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown criterion `{0}` (expected o, wo, sc, pc, apc or join)")]
pub struct UnknownCriterion(pub String);

impl FromStr for Criterion {
    type Err = UnknownCriterion;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Criterion::Orthogonal,
            Criterion::WeaklyOrthogonal,
            Criterion::StronglyClosed,
            Criterion::ParallelClosed,
            Criterion::AlmostParallelClosed,
            Criterion::Joinable,
        ]
        .into_iter()
        .find(|c| c.code() == s.trim())
        .ok_or_else(|| UnknownCriterion(s.to_string()))
    }
}

/// Bounds for the closing searches.
#[derive(Clone, Copy, Debug)]
pub struct SearchConfig {
    /// Steps on the many-step side of strongly closed and almost parallel
    /// closed derivations.
    pub step_bound: usize,
    /// Total steps when joining under the termination assumption.
    pub join_bound: usize,
    pub max_redexes: usize,
    pub parallel_budget: usize,
    /// Equations visited per bounded search.
    pub node_cap: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            step_bound: 5,
            join_bound: 100,
            max_redexes: DEFAULT_MAX_REDEXES,
            parallel_budget: DEFAULT_PARALLEL_BUDGET,
            node_cap: 2000,
        }
    }
}

/// One closing derivation of a critical pair.
#[derive(Clone, Debug)]
pub struct Closing {
    pub label: &'static str,
    pub derivation: Derivation,
}

#[derive(Clone, Debug)]
pub struct CpProof {
    /// Index into the critical pairs.
    pub cp: usize,
    pub closings: Vec<Closing>,
}

/// Why a criterion succeeded: a closing for every critical pair.
#[derive(Clone, Debug)]
pub struct Proof {
    pub criterion: Criterion,
    pub cps: Vec<CpProof>,
    /// An assumption the result depends on.
    pub assumption: Option<&'static str>,
}

/// A proof, or the reasons the criterion did not apply.
pub type CriterionResult = Result<Proof, Vec<String>>;

pub const STRONG_LEFT: &str = "→*≥1 · →=≥2";
pub const STRONG_RIGHT: &str = "→*≥2 · →=≥1";
pub const PARALLEL: &str = "⫽≥1";
pub const ALMOST_PARALLEL: &str = "⫽≥1 · →*≥2";
pub const JOIN: &str = "joined";
pub const TRIVIAL: &str = "trivial";

fn proof(criterion: Criterion, cps: Vec<CpProof>) -> CriterionResult {
    Ok(Proof { criterion, cps, assumption: None })
}

fn not_applicable(why: &str) -> CriterionResult {
    Err(vec![why.to_string()])
}

fn unclosed(i: usize, cp: &CriticalPair, how: &str, truncated: bool) -> String {
    let cut = if truncated { " (search space cap reached)" } else { "" };
    format!("critical pair {} {} not closed by {how}{cut}", i + 1, cp.equation)
}

/// Runs one criterion on precomputed critical pairs.
pub fn check(
    criterion: Criterion,
    sys: &Lctrs,
    cps: &[CriticalPair],
    rw: &Rewriter<'_>,
    cfg: &SearchConfig,
) -> Result<CriterionResult, SmtError> {
    match criterion {
        Criterion::Orthogonal => {
            if !sys.is_left_linear() {
                return Ok(not_applicable("not left-linear"));
            }
            if !cps.is_empty() {
                return Ok(Err(vec![format!("{} critical pairs", cps.len())]));
            }
            Ok(proof(criterion, Vec::new()))
        }
        Criterion::WeaklyOrthogonal => {
            if !sys.is_left_linear() {
                return Ok(not_applicable("not left-linear"));
            }
            let eqs: Vec<&ConstrainedEquation> = cps.iter().map(|c| &c.equation).collect();
            let mut out = Vec::new();
            let mut reasons = Vec::new();
            for (i, (cp, t)) in cps.iter().zip(trivial_many(&eqs, rw.solver())?).enumerate() {
                match t {
                    Some(formula) => out.push(CpProof {
                        cp: i,
                        closings: vec![Closing {
                            label: TRIVIAL,
                            derivation: Derivation { start: cp.equation.clone(), steps: Vec::new(), formula },
                        }],
                    }),
                    None => reasons.push(format!("critical pair {} {} is not trivial", i + 1, cp.equation)),
                }
            }
            if reasons.is_empty() {
                Ok(proof(criterion, out))
            } else {
                Ok(Err(reasons))
            }
        }
        Criterion::StronglyClosed => {
            if !sys.is_linear() {
                return Ok(not_applicable("not linear"));
            }
            let limits = SearchLimits { depth: cfg.step_bound, node_cap: cfg.node_cap };
            let mut out = Vec::new();
            for (i, cp) in cps.iter().enumerate() {
                let mut closings = Vec::new();
                for (label, many, one) in [(STRONG_LEFT, Side::Left, Side::Right), (STRONG_RIGHT, Side::Right, Side::Left)] {
                    let start = vec![(cp.equation.clone(), Vec::new())];
                    match close_by_search(rw, &cp.equation, start, &[many], Some(one), limits)? {
                        SearchOutcome::Closed(derivation) => closings.push(Closing { label, derivation }),
                        SearchOutcome::Open { truncated } => return Ok(Err(vec![unclosed(i, cp, label, truncated)])),
                    }
                }
                out.push(CpProof { cp: i, closings });
            }
            Ok(proof(criterion, out))
        }
        Criterion::ParallelClosed | Criterion::AlmostParallelClosed => {
            if !sys.is_left_linear() {
                return Ok(not_applicable("not left-linear"));
            }
            let almost = criterion == Criterion::AlmostParallelClosed;
            let mut out = Vec::new();
            for (i, cp) in cps.iter().enumerate() {
                let par = rw.parallel_steps(&cp.equation, Side::Left, cfg.max_redexes, cfg.parallel_budget)?;
                if almost && cp.overlay {
                    let starts = par
                        .steps
                        .iter()
                        .map(|p| (p.result.clone(), vec![ProofStep::Parallel(p.clone())]))
                        .collect();
                    let limits = SearchLimits { depth: cfg.step_bound, node_cap: cfg.node_cap };
                    match close_by_search(rw, &cp.equation, starts, &[Side::Right], None, limits)? {
                        SearchOutcome::Closed(derivation) => {
                            out.push(CpProof { cp: i, closings: vec![Closing { label: ALMOST_PARALLEL, derivation }] })
                        }
                        SearchOutcome::Open { truncated } => {
                            return Ok(Err(vec![unclosed(i, cp, ALMOST_PARALLEL, truncated || par.capped)]))
                        }
                    }
                    continue;
                }
                let eqs: Vec<&ConstrainedEquation> = par.steps.iter().map(|p| &p.result).collect();
                let found = par.steps.iter().zip(trivial_many(&eqs, rw.solver())?).find_map(|(p, t)| t.map(|f| (p, f)));
                match found {
                    Some((p, formula)) => out.push(CpProof {
                        cp: i,
                        closings: vec![Closing {
                            label: PARALLEL,
                            derivation: Derivation {
                                start: cp.equation.clone(),
                                steps: vec![ProofStep::Parallel(p.clone())],
                                formula,
                            },
                        }],
                    }),
                    None => return Ok(Err(vec![unclosed(i, cp, PARALLEL, par.capped)])),
                }
            }
            Ok(proof(criterion, out))
        }
        Criterion::Joinable => {
            let limits = SearchLimits { depth: cfg.join_bound, node_cap: cfg.node_cap };
            let mut out = Vec::new();
            for (i, cp) in cps.iter().enumerate() {
                let start = vec![(cp.equation.clone(), Vec::new())];
                match close_by_search(rw, &cp.equation, start, &[Side::Left, Side::Right], None, limits)? {
                    SearchOutcome::Closed(derivation) => {
                        out.push(CpProof { cp: i, closings: vec![Closing { label: JOIN, derivation }] })
                    }
                    SearchOutcome::Open { truncated } => return Ok(Err(vec![unclosed(i, cp, "joining", truncated)])),
                }
            }
            Ok(Ok(Proof { criterion, cps: out, assumption: Some("the system is terminating") }))
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ProofError {
    #[error("proof refers to critical pair {0}, which does not exist")]
    UnknownPair(usize),
    #[error("derivation for critical pair {0} starts from a different equation")]
    WrongStart(usize),
    #[error("critical pair {cp}, step {step}: {source}")]
    Step { cp: usize, step: usize, source: ReplayError },
    #[error("critical pair {0}: derivation ends in a non-trivial equation")]
    NotTrivial(usize),
    #[error("critical pair {0} has no closing")]
    Missing(usize),
    #[error(transparent)]
    Smt(#[from] SmtError),
}

/// Re-executes every derivation of a proof and checks that each ends in a
/// trivial equation and that every critical pair is covered.
pub fn replay_proof(proof: &Proof, cps: &[CriticalPair], rw: &Rewriter<'_>) -> Result<(), ProofError> {
    for i in 0..cps.len() {
        if !proof.cps.iter().any(|p| p.cp == i) {
            return Err(ProofError::Missing(i + 1));
        }
    }
    for cp_proof in &proof.cps {
        let cp = cps.get(cp_proof.cp).ok_or(ProofError::UnknownPair(cp_proof.cp + 1))?;
        for closing in &cp_proof.closings {
            let d = &closing.derivation;
            if d.start.canonical_key() != cp.equation.canonical_key() {
                return Err(ProofError::WrongStart(cp_proof.cp + 1));
            }
            let mut cur = d.start.clone();
            for (k, step) in d.steps.iter().enumerate() {
                let wrap = |source| ProofError::Step { cp: cp_proof.cp + 1, step: k + 1, source };
                cur = match step {
                    ProofStep::Single(s) => rw.replay_step(&cur, s).map_err(wrap)?,
                    ProofStep::Parallel(p) => rw.replay_parallel(&cur, p).map_err(wrap)?,
                };
            }
            if !is_trivial(&cur, rw.solver())? {
                return Err(ProofError::NotTrivial(cp_proof.cp + 1));
            }
        }
    }
    Ok(())
}

impl fmt::Display for Proof {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(a) = self.assumption {
            writeln!(f, "assuming {a}")?;
        }
        for p in &self.cps {
            let Some(first) = p.closings.first() else { continue };
            writeln!(f, "CP {}: {}", p.cp + 1, first.derivation.start)?;
            for c in &p.closings {
                writeln!(f, "  {}:", c.label)?;
                writeln!(f, "{}", c.derivation)?;
            }
        }
        Ok(())
    }
}

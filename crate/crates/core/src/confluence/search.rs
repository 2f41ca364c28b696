use std::collections::HashSet;
use std::fmt;

use super::trivial::trivial_many;
use crate::rewrite::{ConstrainedEquation, ParallelStep, Rewriter, Side, StepRecord};
use crate::smt::SmtError;

/// A step in a closing derivation.
#[derive(Clone, Debug)]
pub enum ProofStep {
    Single(StepRecord<ConstrainedEquation>),
    Parallel(ParallelStep),
}

impl ProofStep {
    pub fn result(&self) -> &ConstrainedEquation {
        match self {
            ProofStep::Single(s) => &s.result,
            ProofStep::Parallel(p) => &p.result,
        }
    }
}

/// A derivation from a critical pair to a trivial equation.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub start: ConstrainedEquation,
    pub steps: Vec<ProofStep>,
    /// The triviality formula of the last equation.
    pub formula: crate::terms::Term,
}

impl Derivation {
    pub fn end(&self) -> &ConstrainedEquation {
        self.steps.last().map_or(&self.start, ProofStep::result)
    }
}

fn write_redex(f: &mut fmt::Formatter<'_>, side: Side, r: &crate::rewrite::Redex) -> fmt::Result {
    write!(f, "{}/{}/{}/{}", side.index(), r.position, r.kind, r.subst)?;
    if !r.extension.is_empty() {
        let ext: Vec<String> = r.extension.iter().map(ToString::to_string).collect();
        write!(f, " with {}", ext.join(", "))?;
    }
    Ok(())
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            write!(f, "    {}. ", i + 1)?;
            match step {
                ProofStep::Single(s) => {
                    write_redex(f, s.side.unwrap_or(Side::Left), &s.redex)?;
                    writeln!(f)?;
                }
                ProofStep::Parallel(p) if p.redexes.is_empty() => writeln!(f, "{}/parallel/no redexes", p.side.index())?,
                ProofStep::Parallel(p) => {
                    writeln!(f, "parallel:")?;
                    for r in &p.redexes {
                        f.write_str("       ")?;
                        write_redex(f, p.side, r)?;
                        writeln!(f)?;
                    }
                }
            }
            writeln!(f, "       = {}", step.result())?;
        }
        write!(f, "    trivial by {} ⇒ {}", self.end().constraint, self.formula)
    }
}

/// Limits of one breadth-first search.
#[derive(Clone, Copy, Debug)]
pub struct SearchLimits {
    /// Steps allowed on the searched sides.
    pub depth: usize,
    /// Equations kept per search; exceeding it ends the search.
    pub node_cap: usize,
}

#[derive(Clone, Debug)]
#[allow(clippy::large_enum_variant)]
pub enum SearchOutcome {
    Closed(Derivation),
    /// No closing within the limits; the flag tells whether the node cap
    /// cut the search short.
    Open { truncated: bool },
}

struct Node {
    eq: ConstrainedEquation,
    path: Vec<ProofStep>,
}

/// Breadth-first search from `starts` (each with the steps leading to it
/// from `origin`) by steps on `sides`, up to the depth limit. Every equation reached is
/// tested for triviality; with `finish`, so are its one-step successors on
/// that side.
pub fn close_by_search(
    rw: &Rewriter<'_>,
    origin: &ConstrainedEquation,
    starts: Vec<(ConstrainedEquation, Vec<ProofStep>)>,
    sides: &[Side],
    finish: Option<Side>,
    limits: SearchLimits,
) -> Result<SearchOutcome, SmtError> {
    let solver = rw.solver();
    let mut seen: HashSet<String> = HashSet::new();
    let mut layer: Vec<Node> = Vec::new();
    for (eq, path) in starts {
        if seen.insert(eq.canonical_key()) {
            layer.push(Node { eq, path });
        }
    }
    let mut truncated = false;
    for depth in 0..=limits.depth {
        if solver.is_cancelled() {
            return Err(SmtError::Cancelled);
        }
        let eqs: Vec<&ConstrainedEquation> = layer.iter().map(|n| &n.eq).collect();
        for (node, t) in layer.iter().zip(trivial_many(&eqs, solver)?) {
            if let Some(formula) = t {
                return Ok(SearchOutcome::Closed(Derivation { start: origin.clone(), steps: node.path.clone(), formula }));
            }
        }
        if let Some(side) = finish {
            let jobs: Vec<(&ConstrainedEquation, Side)> = layer.iter().map(|n| (&n.eq, side)).collect();
            let succs = rw.steps_many(&jobs)?;
            let flat: Vec<(&Node, &StepRecord<ConstrainedEquation>)> =
                layer.iter().zip(&succs).flat_map(|(n, ss)| ss.iter().map(move |s| (n, s))).collect();
            let eqs: Vec<&ConstrainedEquation> = flat.iter().map(|(_, s)| &s.result).collect();
            for ((node, step), t) in flat.iter().zip(trivial_many(&eqs, solver)?) {
                if let Some(formula) = t {
                    let mut steps = node.path.clone();
                    steps.push(ProofStep::Single((*step).clone()));
                    return Ok(SearchOutcome::Closed(Derivation { start: origin.clone(), steps, formula }));
                }
            }
        }
        if depth == limits.depth || layer.is_empty() {
            break;
        }
        let mut jobs: Vec<(&ConstrainedEquation, Side)> = Vec::new();
        let mut owners = Vec::new();
        for (i, n) in layer.iter().enumerate() {
            for s in sides {
                jobs.push((&n.eq, *s));
                owners.push(i);
            }
        }
        let succs = rw.steps_many(&jobs)?;
        let mut next = Vec::new();
        'expand: for (&owner, steps) in owners.iter().zip(succs) {
            let parent = &layer[owner];
            for step in steps {
                if !seen.insert(step.result.canonical_key()) {
                    continue;
                }
                if seen.len() > limits.node_cap {
                    truncated = true;
                    break 'expand;
                }
                let mut path = parent.path.clone();
                path.push(ProofStep::Single(step.clone()));
                next.push(Node { eq: step.result, path });
            }
        }
        layer = next;
    }
    Ok(SearchOutcome::Open { truncated })
}

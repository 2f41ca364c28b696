use super::constrained::apply_redex;
use super::{ConstrainedEquation, Redex, Rewriter, Side};
use crate::smt::SmtError;

pub const DEFAULT_MAX_REDEXES: usize = 4;
/// Redex sets enumerated per parallel step before giving up.
pub const DEFAULT_PARALLEL_BUDGET: usize = 256;

/// Simultaneous contraction of pairwise parallel redexes on one side.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ParallelStep {
    pub side: Side,
    /// Left to right.
    pub redexes: Vec<Redex>,
    pub result: ConstrainedEquation,
}

#[derive(Clone, Debug)]
pub struct ParallelSteps {
    pub steps: Vec<ParallelStep>,
    /// Set when more redex sets existed than the budget allowed.
    pub capped: bool,
}

/// Index sets of pairwise parallel redexes, smallest first, at most
/// `budget` of them. The flag tells whether enumeration stopped early.
fn antichains(redexes: &[Redex], max_size: usize, budget: usize) -> (Vec<Vec<usize>>, bool) {
    let mut out: Vec<Vec<usize>> = vec![Vec::new()];
    let mut layer: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..max_size {
        let mut next = Vec::new();
        for set in &layer {
            let start = set.last().map_or(0, |&i| i + 1);
            for j in start..redexes.len() {
                if set.iter().all(|&i| redexes[i].position.is_parallel_to(&redexes[j].position)) {
                    let mut s = set.clone();
                    s.push(j);
                    if out.len() >= budget {
                        return (out, true);
                    }
                    out.push(s.clone());
                    next.push(s);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        layer = next;
    }
    (out, false)
}

impl Rewriter<'_> {
    /// All parallel steps on one side of `eq` contracting at most
    /// `max_redexes` redexes, the empty step first.
    pub fn parallel_steps(
        &self,
        eq: &ConstrainedEquation,
        side: Side,
        max_redexes: usize,
        budget: usize,
    ) -> Result<ParallelSteps, SmtError> {
        let term = eq.side(side);
        let redexes = self.redexes(term, &eq.constraint, &eq.values())?;
        let (sets, capped) = antichains(&redexes, max_redexes, budget.max(1));
        let steps = sets
            .into_iter()
            .map(|set| {
                let chosen: Vec<Redex> = set.into_iter().map(|i| redexes[i].clone()).collect();
                let (mut t, mut phi) = (term.clone(), eq.constraint.clone());
                for r in &chosen {
                    (t, phi) = apply_redex(&t, &phi, r);
                }
                ParallelStep { side, result: eq.with_side(side, t, phi), redexes: chosen }
            })
            .collect();
        Ok(ParallelSteps { steps, capped })
    }
}

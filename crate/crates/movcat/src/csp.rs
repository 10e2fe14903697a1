//! A small solver for systems of functional constraints `x_t = r . x_s`
//! over morphism-valued variables with finite domains.
//!
//! Uniform movability reduces to such a system: one variable per
//! morphism into the target, one constraint per commuting triangle.
//! The solver runs arc-consistency propagation to a fixpoint and then
//! backtracks, trying variables and values in declaration order, so
//! both solutions and failure certificates are deterministic.

use crate::fincat::{FinCategory, MorId};

/// `vars[target] = via . vars[source]`, where `.` is composition in the
/// host category.
#[derive(Debug, Clone, Copy)]
pub struct FunctionalConstraint {
    pub target: usize,
    pub source: usize,
    pub via: MorId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CspOutcome {
    Solution(Vec<MorId>),
    /// A variable's domain was empty before any propagation.
    EmptyDomain { variable: usize },
    /// Propagating this constraint emptied a domain.
    Contradiction { constraint: usize },
    /// Every assignment conflicts somewhere, but no single constraint
    /// is refutable by propagation alone.
    Exhausted,
}

pub fn solve(
    cat: &FinCategory,
    domains: &[Vec<MorId>],
    constraints: &[FunctionalConstraint],
) -> CspOutcome {
    if let Some(variable) = domains.iter().position(|d| d.is_empty()) {
        return CspOutcome::EmptyDomain { variable };
    }
    let mut domains: Vec<Vec<MorId>> = domains.to_vec();
    if let Err(c) = propagate(cat, &mut domains, constraints) {
        return CspOutcome::Contradiction { constraint: c };
    }
    match assign(cat, &domains, constraints) {
        Some(solution) => CspOutcome::Solution(solution),
        None => CspOutcome::Exhausted,
    }
}

/// Shrink all domains to arc consistency. On success every remaining
/// value of a source has its image in the target's domain and every
/// target value has a preimage; returns the index of the constraint
/// that emptied a domain otherwise.
fn propagate(
    cat: &FinCategory,
    domains: &mut [Vec<MorId>],
    constraints: &[FunctionalConstraint],
) -> Result<(), usize> {
    let mut dirty = true;
    while dirty {
        dirty = false;
        for (ci, c) in constraints.iter().enumerate() {
            let before_t = domains[c.target].len();
            let images: Vec<Option<MorId>> = domains[c.source]
                .iter()
                .map(|&w| cat.compose_opt(c.via, w))
                .collect();
            domains[c.target].retain(|&v| images.contains(&Some(v)));
            if domains[c.target].is_empty() {
                return Err(ci);
            }
            let target_vals = domains[c.target].clone();
            let before_s = domains[c.source].len();
            domains[c.source].retain(|&w| {
                cat.compose_opt(c.via, w)
                    .is_some_and(|v| target_vals.contains(&v))
            });
            if domains[c.source].is_empty() {
                return Err(ci);
            }
            if domains[c.target].len() != before_t || domains[c.source].len() != before_s {
                dirty = true;
            }
        }
    }
    Ok(())
}

fn assign(
    cat: &FinCategory,
    domains: &[Vec<MorId>],
    constraints: &[FunctionalConstraint],
) -> Option<Vec<MorId>> {
    fn consistent(
        cat: &FinCategory,
        partial: &[Option<MorId>],
        constraints: &[FunctionalConstraint],
    ) -> bool {
        constraints.iter().all(|c| {
            match (partial[c.target], partial[c.source]) {
                (Some(v), Some(w)) => cat.compose_opt(c.via, w) == Some(v),
                _ => true,
            }
        })
    }

    fn go(
        cat: &FinCategory,
        domains: &[Vec<MorId>],
        constraints: &[FunctionalConstraint],
        partial: &mut Vec<Option<MorId>>,
        next: usize,
    ) -> bool {
        if next == domains.len() {
            return true;
        }
        for &v in &domains[next] {
            partial[next] = Some(v);
            if consistent(cat, partial, constraints)
                && go(cat, domains, constraints, partial, next + 1)
            {
                return true;
            }
        }
        partial[next] = None;
        false
    }

    let mut partial = vec![None; domains.len()];
    if go(cat, domains, constraints, &mut partial, 0) {
        Some(partial.into_iter().map(|v| v.expect("assigned")).collect())
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn forced_chain_solves() {
        let cat = fixtures::fix_a();
        let id_s2 = cat.morphism("id_s2").unwrap();
        let swap = cat.morphism("swap").unwrap();
        let const_a = cat.morphism("const_a").unwrap();
        let const_b = cat.morphism("const_b").unwrap();
        // x1 free over the endomorphisms, x0 = swap . x1.
        let domains = vec![
            vec![id_s2, swap, const_a, const_b],
            vec![id_s2, swap, const_a, const_b],
        ];
        let constraints = vec![FunctionalConstraint { target: 0, source: 1, via: swap }];
        match solve(&cat, &domains, &constraints) {
            CspOutcome::Solution(s) => {
                assert_eq!(s, vec![id_s2, swap]);
            }
            other => panic!("expected solution, got {other:?}"),
        }
    }

    #[test]
    fn propagation_reports_the_offending_constraint() {
        let cat = fixtures::fix_a();
        let id_s2 = cat.morphism("id_s2").unwrap();
        let swap = cat.morphism("swap").unwrap();
        let const_a = cat.morphism("const_a").unwrap();
        // x0 must be id_s2 but must also equal const_a . x1, whose image
        // is {const_a, const_b}.
        let domains = vec![vec![id_s2], vec![id_s2, swap]];
        let constraints = vec![FunctionalConstraint { target: 0, source: 1, via: const_a }];
        assert_eq!(
            solve(&cat, &domains, &constraints),
            CspOutcome::Contradiction { constraint: 0 }
        );
    }

    #[test]
    fn empty_domain_wins_over_propagation() {
        let cat = fixtures::fix_a();
        let domains = vec![vec![], vec![cat.morphism("id_s2").unwrap()]];
        assert_eq!(
            solve(&cat, &domains, &[]),
            CspOutcome::EmptyDomain { variable: 0 }
        );
    }
}

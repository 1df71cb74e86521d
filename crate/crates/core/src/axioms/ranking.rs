use rayon::prelude::*;

use super::witness::{RankingManipulation, Witness};
use super::{Axiom, AxiomVerdict, CheckOptions, Coverage};
use crate::election::RankingSpace;
use crate::error::{Error, Result};
use crate::ranking::SingleWinnerRule;

/// Winners on every profile of the space, in canonical order.
fn winners(rule: &dyn SingleWinnerRule, space: &RankingSpace) -> Result<Vec<usize>> {
    (0..space.len())
        .into_par_iter()
        .map(|idx| rule.winner(&space.profile(idx)))
        .collect()
}

fn ranking_space(m: usize, n: usize, extra_per_profile: u128, cap: u64) -> Result<RankingSpace> {
    let space = RankingSpace::new(m, n)?;
    let needed = space.len() as u128 * extra_per_profile.max(1);
    if needed > cap as u128 {
        return Err(Error::CapExceeded { needed, cap });
    }
    Ok(space)
}

/// Onto: every alternative wins on some profile. Always exhaustive.
pub fn check_onto(
    rule: &dyn SingleWinnerRule,
    m: usize,
    n: usize,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let space = ranking_space(m, n, 1, opts.eval_cap)?;
    let w = winners(rule, &space)?;
    let mut reached = vec![false; m];
    for &a in &w {
        reached[a] = true;
    }
    let unreached: Vec<usize> = (0..m).filter(|&a| !reached[a]).collect();
    let witness = (!unreached.is_empty()).then_some(Witness::NotOnto { unreached });
    Ok(AxiomVerdict::new(
        Axiom::Onto,
        witness,
        Coverage::Exhaustive,
        space.len() as u128,
    ))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DictatorshipVerdict {
    /// Agents whose top choice always wins (empty when none).
    pub dictators: Vec<usize>,
    pub coverage: Coverage,
}

/// Finds every agent whose top choice wins on all profiles.
pub fn check_dictatorship(
    rule: &dyn SingleWinnerRule,
    m: usize,
    n: usize,
    opts: &CheckOptions,
) -> Result<DictatorshipVerdict> {
    let space = ranking_space(m, n, n as u128, opts.eval_cap)?;
    let w = winners(rule, &space)?;
    let dictators = (0..n)
        .filter(|&i| {
            (0..space.len()).all(|idx| space.ranking_of(idx, i).top() == w[idx as usize])
        })
        .collect();
    Ok(DictatorshipVerdict {
        dictators,
        coverage: Coverage::Exhaustive,
    })
}

/// Non-dictatorship as an axiom verdict; the witness names a dictator.
pub fn check_non_dictatorship(
    rule: &dyn SingleWinnerRule,
    m: usize,
    n: usize,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let d = check_dictatorship(rule, m, n, opts)?;
    let witness = d.dictators.first().map(|&agent| Witness::Dictatorial { agent });
    let evaluations = RankingSpace::new(m, n)?.len() as u128 * n as u128;
    Ok(AxiomVerdict::new(Axiom::NonDictatorship, witness, d.coverage, evaluations))
}

/// Strategyproofness for rankings: no agent can obtain a winner she strictly
/// prefers by reporting another ranking. Always exhaustive.
pub fn check_sp_ranking(
    rule: &dyn SingleWinnerRule,
    m: usize,
    n: usize,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let per_profile = n as u128 * (RankingSpace::new(m, 1)?.len() as u128 - 1);
    let space = ranking_space(m, n, per_profile, opts.eval_cap)?;
    let w = winners(rule, &space)?;
    let nr = space.rankings().len();
    let found = (0..space.len()).into_par_iter().find_map_first(|idx| {
        let before = w[idx as usize];
        for agent in 0..n {
            let truth = space.ranking_of(idx, agent);
            for r in 0..nr {
                let didx = space.replace(idx, agent, r);
                let after = w[didx as usize];
                if truth.prefers(after, before) {
                    return Some(RankingManipulation {
                        profile: space.profile(idx),
                        agent,
                        misreport: space.rankings()[r].clone(),
                        before,
                        after,
                    });
                }
            }
        }
        None
    });
    Ok(AxiomVerdict::new(
        Axiom::SpRanking,
        found.map(Witness::Ranking),
        Coverage::Exhaustive,
        space.len() as u128 * per_profile,
    ))
}

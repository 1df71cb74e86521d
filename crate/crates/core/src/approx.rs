//! Worst-case approximation of the minimax objective.
//!
//! The cost of a committee on a profile is its largest Hamming distance to a
//! ballot. A rule's ratio is the supremum, over the profiles visited, of its
//! cost divided by the optimal cost, with `0/0 = 1` and `c/0 = ∞` for `c > 0`.

use std::fmt;

use num_rational::Ratio;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::axioms::{CheckMode, CheckOptions, Coverage, DEFAULT_SAMPLES, DEFAULT_SEED};
use crate::election::{hamming, AltSet, ApprovalProfile, Committee, ElectionParams, ProfileSpace};
use crate::error::{Error, Result};
use crate::rules::RuleSpec;

/// A nonnegative rational or infinity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtRatio {
    Finite(Ratio<u64>),
    Infinite,
}

impl ExtRatio {
    pub fn of(rule_cost: usize, optimal_cost: usize) -> ExtRatio {
        match (rule_cost, optimal_cost) {
            (0, 0) => ExtRatio::Finite(Ratio::from_integer(1)),
            (_, 0) => ExtRatio::Infinite,
            (r, o) => ExtRatio::Finite(Ratio::new(r as u64, o as u64)),
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, ExtRatio::Finite(_))
    }
}

impl fmt::Display for ExtRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtRatio::Finite(r) => write!(f, "{r}"),
            ExtRatio::Infinite => write!(f, "inf"),
        }
    }
}

/// The bound `3 - 2/(k+1)` on the ratio of dictatorship-like rules.
pub fn completion_bound(k: usize) -> ExtRatio {
    ExtRatio::Finite(Ratio::from_integer(3) - Ratio::new(2, k as u64 + 1))
}

#[derive(Clone, Debug)]
pub struct ApproxReport {
    pub ratio: ExtRatio,
    /// First profile (in visiting order) attaining the ratio.
    pub worst_profile: ApprovalProfile,
    pub rule_outcome: Committee,
    pub optimal: Committee,
    pub rule_cost: usize,
    pub optimal_cost: usize,
    pub coverage: Coverage,
    pub profiles: u64,
}

fn cost(c: AltSet, ballots: &[AltSet]) -> usize {
    ballots.iter().map(|&b| hamming(c, b)).max().unwrap_or(0)
}

/// Measures the approximation ratio of `rule` over the profile space.
pub fn approx_ratio(rule: &RuleSpec, params: &ElectionParams, opts: &CheckOptions) -> Result<ApproxReport> {
    let prepared = rule.prepare(params)?;
    let optimum = RuleSpec::minimax().prepare(params)?;
    let space = ProfileSpace::new(*params, opts.restriction)?;
    let per_profile = 1 + optimum.committees().len() as u128;
    let needed = space.len() as u128 * per_profile;
    let cap = opts.eval_cap;
    let sample = |count: u64, seed: u64| -> Vec<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| rng.gen_range(0..space.len())).collect()
    };
    let (indices, coverage): (Vec<u64>, Coverage) = match opts.mode {
        CheckMode::Exhaustive if needed > cap as u128 => {
            return Err(Error::CapExceeded { needed, cap })
        }
        CheckMode::Exhaustive => ((0..space.len()).collect(), Coverage::Exhaustive),
        CheckMode::Auto if needed <= cap as u128 => ((0..space.len()).collect(), Coverage::Exhaustive),
        CheckMode::Auto => {
            let count = DEFAULT_SAMPLES.min((cap as u128 / per_profile).max(1) as u64);
            (
                sample(count, DEFAULT_SEED),
                Coverage::Sampled {
                    count,
                    seed: DEFAULT_SEED,
                },
            )
        }
        CheckMode::Sampled { count, seed } => (sample(count, seed), Coverage::Sampled { count, seed }),
    };
    if indices.is_empty() {
        return Err(Error::InvalidParams("no profiles to measure".into()));
    }
    let evaluate = |pos: usize| -> Result<(ExtRatio, std::cmp::Reverse<usize>)> {
        let ballots = space.ballots_of(indices[pos]);
        let got = prepared.apply(&ballots)?;
        let best = optimum.apply(&ballots)?;
        Ok((
            ExtRatio::of(cost(got.set(), &ballots), cost(best.set(), &ballots)),
            std::cmp::Reverse(pos),
        ))
    };
    let (_, std::cmp::Reverse(worst)) = (0..indices.len())
        .into_par_iter()
        .map(evaluate)
        .try_reduce_with(|a, b| Ok(a.max(b)))
        .expect("nonempty index list")?;
    let ballots = space.ballots_of(indices[worst]);
    let rule_outcome = prepared.apply(&ballots)?;
    let optimal = optimum.apply(&ballots)?;
    let (rule_cost, optimal_cost) = (cost(rule_outcome.set(), &ballots), cost(optimal.set(), &ballots));
    Ok(ApproxReport {
        ratio: ExtRatio::of(rule_cost, optimal_cost),
        worst_profile: space.profile(indices[worst]),
        rule_outcome,
        optimal,
        rule_cost,
        optimal_cost,
        coverage,
        profiles: indices.len() as u64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{k_completion, TieOrder};

    #[test]
    fn ratio_conventions() {
        assert_eq!(ExtRatio::of(0, 0), ExtRatio::Finite(Ratio::from_integer(1)));
        assert_eq!(ExtRatio::of(2, 0), ExtRatio::Infinite);
        assert_eq!(ExtRatio::of(4, 6), ExtRatio::Finite(Ratio::new(2, 3)));
        assert!(ExtRatio::Infinite > ExtRatio::of(100, 1));
        assert_eq!(completion_bound(2), ExtRatio::Finite(Ratio::new(7, 3)));
        assert_eq!(ExtRatio::of(7, 3).to_string(), "7/3");
    }

    #[test]
    fn minimax_has_ratio_one() {
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let r = approx_ratio(&RuleSpec::minimax(), &p, &CheckOptions::exhaustive()).unwrap();
        assert_eq!(r.ratio, ExtRatio::of(1, 1));
    }

    #[test]
    fn constant_rule_is_unbounded() {
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let r = approx_ratio(&RuleSpec::constant(AltSet::from_indices([0])), &p, &CheckOptions::exhaustive())
            .unwrap();
        assert_eq!(r.ratio, ExtRatio::Infinite);
        assert_eq!(r.optimal_cost, 0);
    }

    #[test]
    fn k_completion_ratio_on_small_space() {
        // P_0 = {}, P_1 = {1,2}: padding picks {0} at cost 3, while {1} costs 1.
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let r = approx_ratio(&k_completion(0, TieOrder::Canonical), &p, &CheckOptions::exhaustive()).unwrap();
        assert_eq!(r.ratio, ExtRatio::of(3, 1));
        assert_eq!((r.rule_cost, r.optimal_cost), (3, 1));
        let r = approx_ratio(&RuleSpec::minisum(), &p, &CheckOptions::exhaustive()).unwrap();
        assert!(r.ratio <= completion_bound(1));
    }
}

//! Executable axioms. Every check returns an [`AxiomVerdict`]; a failing
//! verdict always carries a [`Witness`] that can be replayed against the rule.
//!
//! A verdict that holds is a proof only when its coverage is
//! [`Coverage::Exhaustive`] (or [`Coverage::BoundedCoalition`] for the stated
//! coalition bound); sampled verdicts mean "no violation found".
//!
//! Strategyproofness for rankings is read as: no misreport yields an outcome
//! the agent strictly prefers to the truthful outcome.

mod approval;
mod ranking;
mod witness;

use std::fmt;

pub use approval::{
    check_committee_onto, check_manipulation, check_pareto, check_sp, check_strong_gsp,
    check_unanimity, check_unanimity_on, check_weak_gsp, pareto_dominator, pareto_efficient_committees,
};
pub(crate) use approval::{dominator_of, masks_of_size};
pub use ranking::{
    check_dictatorship, check_non_dictatorship, check_onto, check_sp_ranking,
    DictatorshipVerdict,
};
pub use witness::{Manipulation, RankingManipulation, Witness};

use crate::election::{hamming, AltSet, BallotRestriction};
use crate::error::{Error, Result};

/// Default seed for sampled checks.
pub const DEFAULT_SEED: u64 = 0x5eed_0a11;
/// Default ceiling on rule evaluations for exhaustive checks.
pub const DEFAULT_EVAL_CAP: u64 = 100_000_000;
/// Profiles sampled by default when an automatic check falls back to sampling.
pub const DEFAULT_SAMPLES: u64 = 10_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axiom {
    Unanimity,
    Pareto,
    Sp,
    WeakGsp,
    StrongGsp,
    Onto,
    NonDictatorship,
    SpRanking,
}

impl Axiom {
    pub const ALL: [Axiom; 8] = [
        Axiom::Unanimity,
        Axiom::Pareto,
        Axiom::Sp,
        Axiom::WeakGsp,
        Axiom::StrongGsp,
        Axiom::Onto,
        Axiom::NonDictatorship,
        Axiom::SpRanking,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Axiom::Unanimity => "unanimity",
            Axiom::Pareto => "pareto",
            Axiom::Sp => "sp",
            Axiom::WeakGsp => "weak-gsp",
            Axiom::StrongGsp => "strong-gsp",
            Axiom::Onto => "onto",
            Axiom::NonDictatorship => "non-dictatorship",
            Axiom::SpRanking => "sp-ranking",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Axiom::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| Error::InvalidParams(format!("unknown axiom `{s}`")))
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How much of the declared space a verdict covers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coverage {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
    /// Every profile, but only coalitions of at most this many agents.
    BoundedCoalition(usize),
}

impl fmt::Display for Coverage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Coverage::Exhaustive => write!(f, "exhaustive"),
            Coverage::Sampled { count, seed } => write!(f, "sampled:{count}:{seed}"),
            Coverage::BoundedCoalition(c) => write!(f, "bounded-coalition:{c}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub holds: bool,
    pub witness: Option<Witness>,
    pub coverage: Coverage,
    /// Rule evaluations (or deviation comparisons) budgeted for the check.
    pub evaluations: u128,
}

impl AxiomVerdict {
    pub(crate) fn new(axiom: Axiom, witness: Option<Witness>, coverage: Coverage, evaluations: u128) -> Self {
        AxiomVerdict {
            axiom,
            holds: witness.is_none(),
            witness,
            coverage,
            evaluations,
        }
    }

    /// True when the verdict holds over the whole declared space.
    pub fn is_proof(&self) -> bool {
        self.holds && self.coverage == Coverage::Exhaustive
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CheckMode {
    /// Exhaustive when within the evaluation cap, sampled otherwise.
    #[default]
    Auto,
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

impl CheckMode {
    /// Parses `auto`, `exhaustive` or `sample:<count>:<seed>`.
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(CheckMode::Auto),
            "exhaustive" => Ok(CheckMode::Exhaustive),
            _ => {
                let parts: Vec<_> = s.split(':').collect();
                match parts.as_slice() {
                    ["sample", count, seed] => Ok(CheckMode::Sampled {
                        count: count
                            .parse()
                            .map_err(|_| Error::InvalidParams(format!("bad sample count `{count}`")))?,
                        seed: seed
                            .parse()
                            .map_err(|_| Error::InvalidParams(format!("bad seed `{seed}`")))?,
                    }),
                    _ => Err(Error::InvalidParams(format!("unknown mode `{s}`"))),
                }
            }
        }
    }
}

/// Ballots coalition members may switch to.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DeviationSpace {
    /// Any subset of the alternatives.
    #[default]
    Full,
    /// The same restricted ballot space the profiles are drawn from.
    Restricted,
}

#[derive(Clone, Debug)]
pub struct CheckOptions {
    pub restriction: BallotRestriction,
    pub deviations: DeviationSpace,
    /// Largest coalition considered; `None` means all agents.
    pub max_coalition: Option<usize>,
    pub mode: CheckMode,
    pub eval_cap: u64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            restriction: BallotRestriction::All,
            deviations: DeviationSpace::Full,
            max_coalition: None,
            mode: CheckMode::Auto,
            eval_cap: DEFAULT_EVAL_CAP,
        }
    }
}

impl CheckOptions {
    pub fn exhaustive() -> Self {
        CheckOptions {
            mode: CheckMode::Exhaustive,
            ..CheckOptions::default()
        }
    }

    pub fn with_restriction(mut self, r: BallotRestriction) -> Self {
        self.restriction = r;
        self
    }

    pub fn with_max_coalition(mut self, c: usize) -> Self {
        self.max_coalition = Some(c);
        self
    }

    pub fn with_deviations(mut self, d: DeviationSpace) -> Self {
        self.deviations = d;
        self
    }
}

/// The coalitional notions of manipulation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ManipulationKind {
    /// One agent strictly gains.
    Sp,
    /// Every coalition member strictly gains.
    WeakGsp,
    /// Every member weakly gains and one strictly gains.
    StrongGsp,
}

impl ManipulationKind {
    pub fn axiom(self) -> Axiom {
        match self {
            ManipulationKind::Sp => Axiom::Sp,
            ManipulationKind::WeakGsp => Axiom::WeakGsp,
            ManipulationKind::StrongGsp => Axiom::StrongGsp,
        }
    }

    pub fn from_axiom(axiom: Axiom) -> Option<Self> {
        match axiom {
            Axiom::Sp => Some(ManipulationKind::Sp),
            Axiom::WeakGsp => Some(ManipulationKind::WeakGsp),
            Axiom::StrongGsp => Some(ManipulationKind::StrongGsp),
            _ => None,
        }
    }
}

/// Decides whether moving from truthful `truth` to a profile where exactly
/// the agents in `changed` report differently (and the outcome moves from
/// `before` to `after`) is a successful manipulation by some coalition of at
/// most `max_coalition` agents. Returns the coalition as a bit mask.
///
/// For strong GSP the coalition may include agents who report truthfully:
/// when no changed agent strictly gains, the lowest-indexed unchanged agent
/// who does is added if the bound allows.
pub(crate) fn manipulating_coalition(
    kind: ManipulationKind,
    max_coalition: usize,
    truth: &[AltSet],
    changed: u64,
    before: AltSet,
    after: AltSet,
) -> Option<u64> {
    let size = changed.count_ones() as usize;
    if changed == 0 || before == after {
        return None;
    }
    let bound = if kind == ManipulationKind::Sp { 1 } else { max_coalition };
    if size > bound {
        return None;
    }
    let gain = |i: usize| hamming(truth[i], before) as isize - hamming(truth[i], after) as isize;
    let members = || (0..truth.len()).filter(|&i| changed >> i & 1 == 1);
    match kind {
        ManipulationKind::Sp | ManipulationKind::WeakGsp => {
            members().all(|i| gain(i) > 0).then_some(changed)
        }
        ManipulationKind::StrongGsp => {
            if !members().all(|i| gain(i) >= 0) {
                return None;
            }
            if members().any(|i| gain(i) > 0) {
                return Some(changed);
            }
            if size < bound {
                (0..truth.len())
                    .find(|&j| changed >> j & 1 == 0 && gain(j) > 0)
                    .map(|j| changed | 1 << j)
            } else {
                None
            }
        }
    }
}

/// Number of deviation profiles reachable from one profile when coalitions
/// of up to `c` of `n` agents each switch to one of `alternatives` other
/// ballots.
pub(crate) fn deviations_per_profile(n: usize, c: usize, alternatives: u128) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for s in 1..=c.min(n) {
        binom = binom * (n - s + 1) as u128 / s as u128;
        total = total.saturating_add(binom.saturating_mul(alternatives.saturating_pow(s as u32)));
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AltSet {
        AltSet::from_indices(v.iter().copied())
    }

    #[test]
    fn coalition_predicate() {
        // Agent 0 true {0,1,3}, agent 1 true {0,3}; outcome {0,1} -> {0,3}.
        let truth = [set(&[0, 1, 3]), set(&[0, 3])];
        let (before, after) = (set(&[0, 1]), set(&[0, 3]));
        use ManipulationKind::*;
        assert_eq!(manipulating_coalition(StrongGsp, 2, &truth, 0b01, before, after), Some(0b11));
        assert_eq!(manipulating_coalition(StrongGsp, 1, &truth, 0b01, before, after), None);
        assert_eq!(manipulating_coalition(WeakGsp, 2, &truth, 0b01, before, after), None);
        assert_eq!(manipulating_coalition(StrongGsp, 2, &truth, 0b11, before, after), Some(0b11));
        assert_eq!(manipulating_coalition(Sp, 2, &truth, 0b10, before, after), Some(0b10));
        assert_eq!(manipulating_coalition(Sp, 2, &truth, 0b11, before, after), None);
        assert_eq!(manipulating_coalition(StrongGsp, 2, &truth, 0, before, after), None);
    }

    #[test]
    fn deviation_counts() {
        assert_eq!(deviations_per_profile(2, 2, 7), 2 * 7 + 49);
        assert_eq!(deviations_per_profile(3, 1, 7), 21);
    }

    #[test]
    fn modes_parse() {
        assert_eq!(CheckMode::parse("sample:10:3").unwrap(), CheckMode::Sampled { count: 10, seed: 3 });
        assert!(CheckMode::parse("sample:10").is_err());
        assert_eq!(Axiom::parse("strong-gsp").unwrap(), Axiom::StrongGsp);
    }
}

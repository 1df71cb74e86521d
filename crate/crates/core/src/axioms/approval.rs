use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::witness::{Manipulation, Witness};
use super::{
    deviations_per_profile, manipulating_coalition, Axiom, AxiomVerdict, CheckMode,
    CheckOptions, Coverage, DeviationSpace, ManipulationKind, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use crate::election::{
    enumerate_committees, hamming, AltSet, ApprovalProfile, BallotRestriction, Committee,
    ElectionParams, ProfileSpace,
};
use crate::error::{Error, Result};
use crate::rules::{PreparedRule, RuleSpec};

/// Deviation spaces up to this many profiles get their outcomes tabulated.
const TABLE_LIMIT: u64 = 1 << 22;

/// Unanimity: on each of the `C(m,k)` unanimous profiles the common ballot
/// must be elected.
pub fn check_unanimity(rule: &RuleSpec, params: &ElectionParams) -> Result<AxiomVerdict> {
    check_unanimity_on(rule, params, BallotRestriction::All)
}

/// Unanimity over the unanimous profiles a restricted ballot space contains.
pub fn check_unanimity_on(
    rule: &RuleSpec,
    params: &ElectionParams,
    restriction: BallotRestriction,
) -> Result<AxiomVerdict> {
    let prepared = rule.prepare(params)?;
    let committees: Vec<Committee> = enumerate_committees(params)
        .into_iter()
        .filter(|c| restriction.admits(c.set(), params.m()))
        .collect();
    let evaluations = committees.len() as u128;
    for c in &committees {
        let ballots = vec![c.set(); params.n()];
        let got = prepared.apply(&ballots)?;
        if got != *c {
            let profile = ApprovalProfile::new(*params, ballots)?;
            return Ok(AxiomVerdict::new(
                Axiom::Unanimity,
                Some(Witness::Unanimity {
                    profile,
                    outcome: got,
                }),
                Coverage::Exhaustive,
                evaluations,
            ));
        }
    }
    Ok(AxiomVerdict::new(Axiom::Unanimity, None, Coverage::Exhaustive, evaluations))
}

/// Onto for committees: every committee is elected on some profile of the
/// space. The witness lists unreached committees by canonical index.
pub fn check_committee_onto(
    rule: &RuleSpec,
    params: &ElectionParams,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let prepared = rule.prepare(params)?;
    let space = ProfileSpace::new(*params, opts.restriction)?;
    if space.len() as u128 > opts.eval_cap as u128 {
        return Err(Error::CapExceeded {
            needed: space.len() as u128,
            cap: opts.eval_cap,
        });
    }
    let committees = enumerate_committees(params);
    let reached = (0..space.len())
        .into_par_iter()
        .map(|idx| prepared.apply(&space.ballots_of(idx)).map(|c| c.set().bits()))
        .try_fold(std::collections::BTreeSet::new, |mut acc, r| {
            acc.insert(r?);
            Ok::<_, Error>(acc)
        })
        .try_reduce(std::collections::BTreeSet::new, |mut a, b| {
            a.extend(b);
            Ok(a)
        })?;
    let unreached: Vec<usize> = committees
        .iter()
        .enumerate()
        .filter(|(_, c)| !reached.contains(&c.set().bits()))
        .map(|(i, _)| i)
        .collect();
    let witness = (!unreached.is_empty()).then_some(Witness::NotOnto { unreached });
    Ok(AxiomVerdict::new(Axiom::Onto, witness, Coverage::Exhaustive, space.len() as u128))
}

/// A committee that Pareto-dominates `outcome` on `ballots`, first in
/// canonical order.
pub(crate) fn dominator_of(
    committees: &[Committee],
    ballots: &[AltSet],
    outcome: AltSet,
) -> Option<Committee> {
    committees.iter().copied().find(|c| {
        let mut strict = false;
        for &b in ballots {
            let (o, d) = (hamming(b, outcome), hamming(b, c.set()));
            if d > o {
                return false;
            }
            strict |= d < o;
        }
        strict
    })
}

/// A committee Pareto-dominating `outcome` on `profile`, if any.
pub fn pareto_dominator(profile: &ApprovalProfile, outcome: Committee) -> Option<Committee> {
    dominator_of(
        &enumerate_committees(profile.params()),
        profile.ballots(),
        outcome.set(),
    )
}

/// Every committee not Pareto-dominated on `profile`, in canonical order.
pub fn pareto_efficient_committees(profile: &ApprovalProfile) -> Vec<Committee> {
    let all = enumerate_committees(profile.params());
    all.iter()
        .copied()
        .filter(|c| dominator_of(&all, profile.ballots(), c.set()).is_none())
        .collect()
}

/// Sampling plan shared by the profile-walking checks.
enum Plan {
    Exhaustive,
    Sampled { count: u64, seed: u64 },
}

fn plan(mode: CheckMode, needed: u128, per_profile: u128, cap: u64) -> Result<Plan> {
    match mode {
        CheckMode::Exhaustive if needed > cap as u128 => Err(Error::CapExceeded { needed, cap }),
        CheckMode::Exhaustive => Ok(Plan::Exhaustive),
        CheckMode::Auto if needed <= cap as u128 => Ok(Plan::Exhaustive),
        CheckMode::Auto => {
            let affordable = (cap as u128 / per_profile.max(1)).max(1);
            Ok(Plan::Sampled {
                count: (DEFAULT_SAMPLES as u128).min(affordable) as u64,
                seed: DEFAULT_SEED,
            })
        }
        CheckMode::Sampled { count, seed } => Ok(Plan::Sampled { count, seed }),
    }
}

/// Profile indices to visit under a sampling plan; generated sequentially so
/// the list does not depend on the number of workers.
fn sample_indices(space: &ProfileSpace, count: u64, seed: u64) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| rng.gen_range(0..space.len())).collect()
}

/// Pareto efficiency over the profile space.
pub fn check_pareto(
    rule: &RuleSpec,
    params: &ElectionParams,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let prepared = rule.prepare(params)?;
    let space = ProfileSpace::new(*params, opts.restriction)?;
    let committees = enumerate_committees(params);
    let per_profile = committees.len() as u128;
    let needed = space.len() as u128 * per_profile;
    let probe = |idx: u64| -> Result<Option<Witness>> {
        let ballots = space.ballots_of(idx);
        let outcome = prepared.apply(&ballots)?;
        let Some(dom) = dominator_of(&committees, &ballots, outcome.set()) else {
            return Ok(None);
        };
        let distances = ballots
            .iter()
            .map(|&b| (hamming(b, outcome.set()), hamming(b, dom.set())))
            .collect();
        Ok(Some(Witness::Pareto {
            profile: space.profile(idx),
            outcome,
            dominating: dom,
            distances,
        }))
    };
    let (found, coverage, evaluations) = match plan(opts.mode, needed, per_profile, opts.eval_cap)? {
        Plan::Exhaustive => (
            (0..space.len())
                .into_par_iter()
                .map(probe)
                .find_first(|r| !matches!(r, Ok(None)))
                .unwrap_or(Ok(None))?,
            Coverage::Exhaustive,
            needed,
        ),
        Plan::Sampled { count, seed } => (
            sample_indices(&space, count, seed)
                .into_par_iter()
                .map(probe)
                .find_first(|r| !matches!(r, Ok(None)))
                .unwrap_or(Ok(None))?,
            Coverage::Sampled { count, seed },
            count as u128 * per_profile,
        ),
    };
    Ok(AxiomVerdict::new(Axiom::Pareto, found, coverage, evaluations))
}

pub fn check_sp(rule: &RuleSpec, params: &ElectionParams, opts: &CheckOptions) -> Result<AxiomVerdict> {
    check_manipulation(ManipulationKind::Sp, rule, params, opts)
}

pub fn check_weak_gsp(
    rule: &RuleSpec,
    params: &ElectionParams,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    check_manipulation(ManipulationKind::WeakGsp, rule, params, opts)
}

pub fn check_strong_gsp(
    rule: &RuleSpec,
    params: &ElectionParams,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    check_manipulation(ManipulationKind::StrongGsp, rule, params, opts)
}

/// Outcomes over the deviation space, tabulated when small enough.
struct Outcomes<'a> {
    rule: &'a PreparedRule,
    space: &'a ProfileSpace,
    table: Option<Vec<AltSet>>,
}

impl<'a> Outcomes<'a> {
    fn new(rule: &'a PreparedRule, space: &'a ProfileSpace, tabulate: bool) -> Result<Self> {
        let table = if tabulate && space.len() <= TABLE_LIMIT {
            Some(
                (0..space.len())
                    .into_par_iter()
                    .map(|idx| rule.apply(&space.ballots_of(idx)).map(|c| c.set()))
                    .collect::<Result<Vec<_>>>()?,
            )
        } else {
            None
        };
        Ok(Outcomes { rule, space, table })
    }

    fn get(&self, idx: u64, scratch: &mut Vec<AltSet>) -> Result<AltSet> {
        match &self.table {
            Some(t) => Ok(t[idx as usize]),
            None => {
                scratch.clear();
                scratch.extend((0..self.space.params().n()).map(|i| self.space.ballot_of(idx, i)));
                self.rule.apply(scratch).map(|c| c.set())
            }
        }
    }
}

/// Searches coalition deviations of size at most the configured bound for a
/// manipulation of the given kind. In exhaustive mode the reported witness
/// is the one at the smallest profile index, then the first deviation in
/// (coalition size, coalition mask, ballot odometer) order.
pub fn check_manipulation(
    kind: ManipulationKind,
    rule: &RuleSpec,
    params: &ElectionParams,
    opts: &CheckOptions,
) -> Result<AxiomVerdict> {
    let n = params.n();
    if n > 63 {
        return Err(Error::InvalidParams("coalition search supports at most 63 agents".into()));
    }
    let bound = match kind {
        ManipulationKind::Sp => 1,
        _ => opts.max_coalition.unwrap_or(n).clamp(1, n),
    };
    let prepared = rule.prepare(params)?;
    let profiles = ProfileSpace::new(*params, opts.restriction)?;
    let dev_restriction = match opts.deviations {
        DeviationSpace::Full => BallotRestriction::All,
        DeviationSpace::Restricted => opts.restriction,
    };
    let devs = ProfileSpace::new(*params, dev_restriction)?;
    let per_profile = deviations_per_profile(n, bound, devs.ballots().len() as u128 - 1);
    let needed = profiles.len() as u128 * per_profile;

    let plan = plan(opts.mode, needed, per_profile, opts.eval_cap)?;
    let (indices, coverage, evaluations) = match plan {
        Plan::Exhaustive => {
            let cov = if bound < n && kind != ManipulationKind::Sp {
                Coverage::BoundedCoalition(bound)
            } else {
                Coverage::Exhaustive
            };
            (None, cov, needed)
        }
        Plan::Sampled { count, seed } => (
            Some(sample_indices(&profiles, count, seed)),
            Coverage::Sampled { count, seed },
            count as u128 * per_profile,
        ),
    };
    let outcomes = Outcomes::new(&prepared, &devs, indices.is_none())?;
    let search = |pidx: u64| search_from(kind, bound, &profiles, &devs, &outcomes, pidx);
    let found = match indices {
        None => (0..profiles.len())
            .into_par_iter()
            .map(search)
            .find_first(|r| !matches!(r, Ok(None)))
            .unwrap_or(Ok(None))?,
        Some(list) => list
            .into_par_iter()
            .map(search)
            .find_first(|r| !matches!(r, Ok(None)))
            .unwrap_or(Ok(None))?,
    };
    Ok(AxiomVerdict::new(
        kind.axiom(),
        found.map(Witness::Manipulation),
        coverage,
        evaluations,
    ))
}

fn search_from(
    kind: ManipulationKind,
    bound: usize,
    profiles: &ProfileSpace,
    devs: &ProfileSpace,
    outcomes: &Outcomes<'_>,
    pidx: u64,
) -> Result<Option<Manipulation>> {
    let n = profiles.params().n();
    let truth = profiles.ballots_of(pidx);
    let didx = devs.index_of(&truth).expect("profile space lies inside deviation space");
    let mut scratch = Vec::with_capacity(n);
    let before = outcomes.get(didx, &mut scratch)?;
    let zero: u64 = truth
        .iter()
        .enumerate()
        .filter(|(_, &b)| hamming(b, before) == 0)
        .fold(0, |m, (i, _)| m | 1 << i);
    if zero.count_ones() as usize == n {
        // Nobody can gain.
        return Ok(None);
    }
    let digits: Vec<usize> = truth
        .iter()
        .map(|&b| devs.ballot_index(b).expect("ballot in deviation space"))
        .collect();
    let nb = devs.ballots().len();
    let radix = devs.radix();

    for size in 1..=bound {
        for mask in masks_of_size(n, size) {
            // Agents who must strictly gain cannot already be at distance 0.
            if kind != ManipulationKind::StrongGsp && mask & zero != 0 {
                continue;
            }
            let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
            // Odometer over the other ballots of each member.
            let mut choice = vec![0usize; size];
            loop {
                let mut idx = didx;
                let mut valid = true;
                for (slot, &agent) in members.iter().enumerate() {
                    let b = skip_index(choice[slot], digits[agent]);
                    if b >= nb {
                        valid = false;
                        break;
                    }
                    idx = idx - digits[agent] as u64 * radix.stride(agent) + b as u64 * radix.stride(agent);
                }
                if valid {
                    let after = outcomes.get(idx, &mut scratch)?;
                    if let Some(coalition) =
                        manipulating_coalition(kind, bound, &truth, mask, before, after)
                    {
                        let deviated = devs.ballots_of(idx);
                        return Ok(Some(Manipulation::build(
                            kind.axiom(),
                            profiles.profile(pidx),
                            coalition,
                            &deviated,
                            Committee::from_set(before),
                            Committee::from_set(after),
                        )));
                    }
                }
                if !advance(&mut choice, nb - 1) {
                    break;
                }
            }
        }
    }
    Ok(None)
}

/// Maps `0..nb-1` onto the ballot indices other than `current`.
#[inline]
fn skip_index(choice: usize, current: usize) -> usize {
    if choice >= current {
        choice + 1
    } else {
        choice
    }
}

fn advance(choice: &mut [usize], radix: usize) -> bool {
    for c in choice.iter_mut().rev() {
        *c += 1;
        if *c < radix {
            return true;
        }
        *c = 0;
    }
    false
}

/// `n`-bit masks with `size` bits set, in increasing numeric order.
pub(crate) fn masks_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    (0u64..1 << n).filter(move |m| m.count_ones() as usize == size)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::{k_completion, serial_dictatorship, TieOrder};

    fn set(v: &[usize]) -> AltSet {
        AltSet::from_indices(v.iter().copied())
    }

    #[test]
    fn unanimity_examples() {
        let p = ElectionParams::new(3, 2, 2).unwrap();
        assert!(check_unanimity(&RuleSpec::minisum(), &p).unwrap().is_proof());
        assert!(check_unanimity(&k_completion(1, TieOrder::Canonical), &p).unwrap().holds);
        let v = check_unanimity(&RuleSpec::constant(set(&[0, 1])), &p).unwrap();
        assert!(!v.holds);
        match v.witness.as_ref().unwrap() {
            Witness::Unanimity { profile, outcome } => {
                assert_eq!(profile.common_ballot(), Some(set(&[0, 2])));
                assert_eq!(outcome.set(), set(&[0, 1]));
            }
            other => panic!("{other:?}"),
        }
        v.witness.unwrap().replay(&RuleSpec::constant(set(&[0, 1]))).unwrap();
    }

    #[test]
    fn pareto_examples() {
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let opts = CheckOptions::exhaustive();
        assert!(check_pareto(&RuleSpec::minisum(), &p, &opts).unwrap().is_proof());
        let rule = RuleSpec::constant(set(&[0]));
        let v = check_pareto(&rule, &p, &opts).unwrap();
        assert!(!v.holds);
        v.witness.unwrap().replay(&rule).unwrap();
    }

    #[test]
    fn constant_is_strategyproof() {
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let rule = RuleSpec::constant(set(&[2]));
        let opts = CheckOptions::exhaustive();
        assert!(check_sp(&rule, &p, &opts).unwrap().is_proof());
        assert!(check_weak_gsp(&rule, &p, &opts).unwrap().is_proof());
        assert!(check_strong_gsp(&rule, &p, &opts).unwrap().is_proof());
    }

    #[test]
    fn k_completion_weak_but_not_strong() {
        let p = ElectionParams::new(3, 1, 2).unwrap();
        let rule = k_completion(0, TieOrder::Canonical);
        let opts = CheckOptions::exhaustive();
        assert!(check_weak_gsp(&rule, &p, &opts).unwrap().is_proof());
        let v = check_strong_gsp(&rule, &p, &opts).unwrap();
        assert!(!v.holds);
        let w = v.witness.unwrap();
        w.replay(&rule).unwrap();
        if let Witness::Manipulation(m) = &w {
            assert!(m.coalition.contains(&0));
        }
    }

    #[test]
    fn serial_dictatorship_two_agents_strong() {
        for k in [1, 2] {
            let p = ElectionParams::new(3, k, 2).unwrap();
            let v = check_strong_gsp(&serial_dictatorship(vec![0, 1]), &p, &CheckOptions::exhaustive())
                .unwrap();
            assert!(v.is_proof(), "k={k}: {:?}", v.witness);
        }
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let p = ElectionParams::new(3, 1, 3).unwrap();
        let opts = CheckOptions {
            mode: CheckMode::Sampled { count: 50, seed: 9 },
            ..CheckOptions::default()
        };
        let rule = RuleSpec::minimax();
        let a = check_sp(&rule, &p, &opts).unwrap();
        let b = check_sp(&rule, &p, &opts).unwrap();
        assert_eq!(a.witness, b.witness);
        assert_eq!(a.coverage, Coverage::Sampled { count: 50, seed: 9 });
    }

    #[test]
    fn cap_exceeded_in_exhaustive_mode() {
        let p = ElectionParams::new(3, 1, 3).unwrap();
        let opts = CheckOptions {
            eval_cap: 10,
            ..CheckOptions::exhaustive()
        };
        assert!(matches!(
            check_sp(&RuleSpec::minisum(), &p, &opts),
            Err(Error::CapExceeded { .. })
        ));
        let auto = CheckOptions {
            eval_cap: 1000,
            ..CheckOptions::default()
        };
        let v = check_sp(&RuleSpec::minisum(), &p, &auto).unwrap();
        assert!(matches!(v.coverage, Coverage::Sampled { seed: DEFAULT_SEED, .. }));
    }

    #[test]
    fn pareto_efficient_sets() {
        // All tops equal to a=1 after reduction: ballots {1,3},{1,0,3}.
        let p = ElectionParams::new(4, 2, 2).unwrap();
        let prof = ApprovalProfile::new(p, vec![set(&[1, 3]), set(&[0, 1, 3])]).unwrap();
        let eff = pareto_efficient_committees(&prof);
        assert_eq!(eff.iter().map(|c| c.set()).collect::<Vec<_>>(), vec![set(&[1, 3])]);
    }
}

//! From ranking elections to approval elections.
//!
//! Each ranking agent `i` is replaced by `m-1` copies; copy `(i,j)` approves
//! the top `j` alternatives of agent `i` plus `k-1` dummy alternatives that
//! everybody approves. A rule that is Pareto-efficient on such profiles
//! elects the dummies plus exactly one real alternative, which defines an
//! induced single-winner rule.
//!
//! Dummies take the indices `m..m+k-1`, so real alternatives keep their
//! indices. Copy `(i,j)` (1-based `j`) is approval agent `i*(m-1) + j-1`.

use std::fmt::Write;

use crate::axioms::{
    check_dictatorship, check_onto, check_sp_ranking, AxiomVerdict, CheckOptions, Manipulation,
    Witness,
};
use crate::election::{
    hamming, AltSet, ApprovalProfile, Committee, ElectionParams, Ranking, RankingProfile,
};
use crate::error::{Error, Result};
use crate::ranking::SingleWinnerRule;
use crate::rules::{apply_rule, RuleSpec};

#[derive(Clone, Debug)]
pub struct ReductionOutput {
    pub approval: ApprovalProfile,
    /// The `k-1` dummy alternatives.
    pub dummies: AltSet,
    /// Approval agent index -> (source agent, copy level `1..m-1`).
    pub copy_map: Vec<(usize, usize)>,
    pub source_m: usize,
    pub source_n: usize,
    pub k: usize,
}

impl ReductionOutput {
    pub fn copy_index(&self, agent: usize, level: usize) -> usize {
        agent * (self.source_m - 1) + level - 1
    }
}

fn reduced_params(m: usize, n: usize, k: usize) -> Result<ElectionParams> {
    if m < 2 {
        return Err(Error::InvalidParams(format!(
            "the ranking side needs at least 2 alternatives, got {m}"
        )));
    }
    if k == 0 {
        return Err(Error::InvalidParams("k must be at least 1".into()));
    }
    ElectionParams::new(m + k - 1, k, (m - 1) * n)
}

fn dummies(m: usize, k: usize) -> AltSet {
    AltSet::from_indices(m..m + k - 1)
}

/// Ballots of the copies of one ranking agent.
fn copy_ballots(r: &Ranking, d: AltSet) -> impl Iterator<Item = AltSet> + '_ {
    (1..r.m()).map(move |j| r.top_set(j).union(d))
}

pub fn build_approval_election(ranking: &RankingProfile, k: usize) -> Result<ReductionOutput> {
    let (m, n) = (ranking.m(), ranking.n());
    let params = reduced_params(m, n, k)?;
    let d = dummies(m, k);
    let mut ballots = Vec::with_capacity(params.n());
    let mut copy_map = Vec::with_capacity(params.n());
    for (i, r) in ranking.rankings().iter().enumerate() {
        ballots.extend(copy_ballots(r, d));
        copy_map.extend((1..m).map(|j| (i, j)));
    }
    Ok(ReductionOutput {
        approval: ApprovalProfile::new(params, ballots)?,
        dummies: d,
        copy_map,
        source_m: m,
        source_n: n,
        k,
    })
}

/// The single real alternative elected by `rule` on the reduced profile.
pub fn induced_winner(rule: &RuleSpec, ranking: &RankingProfile, k: usize) -> Result<usize> {
    let red = build_approval_election(ranking, k)?;
    let elected = apply_rule(rule, &red.approval)?;
    let real = elected.set().difference(red.dummies);
    if real.len() != 1 {
        return Err(Error::NotSingleton {
            committee: elected.set(),
            non_dummy: real.len(),
        });
    }
    Ok(real.iter().next().expect("singleton"))
}

/// The single-winner rule induced by a multi-winner rule through the reduction.
#[derive(Clone, Debug)]
pub struct InducedRule {
    pub base: RuleSpec,
    pub k: usize,
}

impl InducedRule {
    pub fn new(base: RuleSpec, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidParams("k must be at least 1".into()));
        }
        Ok(InducedRule { base, k })
    }
}

impl SingleWinnerRule for InducedRule {
    fn winner(&self, profile: &RankingProfile) -> Result<usize> {
        induced_winner(&self.base, profile, self.k)
    }

    fn name(&self) -> String {
        format!("induced({}, k={})", self.base, self.k)
    }
}

#[derive(Clone, Debug)]
pub struct TransferReport {
    pub onto: AxiomVerdict,
    pub sp: AxiomVerdict,
    /// Agents of the ranking side who dictate the induced rule.
    pub dictators: Vec<usize>,
    /// The ranking-side manipulation lifted to a coalition of copies.
    pub gsp_witness: Option<Manipulation>,
}

/// Checks onto and strategyproofness of the induced rule over all ranking
/// profiles with `m` alternatives and `n` agents. A ranking manipulation by
/// agent `i` is lifted to a deviation of all copies `(i,1..m-1)` in the
/// approval election, which is a strong-GSP violation of `rule`.
pub fn transfer_check(
    rule: &RuleSpec,
    m: usize,
    n: usize,
    k: usize,
    opts: &CheckOptions,
) -> Result<TransferReport> {
    let induced = InducedRule::new(rule.clone(), k)?;
    let onto = check_onto(&induced, m, n, opts)?;
    let sp = check_sp_ranking(&induced, m, n, opts)?;
    let dictators = check_dictatorship(&induced, m, n, opts)?.dictators;
    let gsp_witness = match &sp.witness {
        Some(Witness::Ranking(w)) => Some(lift_ranking_manipulation(
            rule,
            k,
            &w.profile,
            w.agent,
            &w.misreport,
        )?),
        _ => None,
    };
    Ok(TransferReport {
        onto,
        sp,
        dictators,
        gsp_witness,
    })
}

/// Builds the approval-side deviation of agent `agent`'s copies from
/// `P(profile)` to `P(misreport, profile_-agent)`.
pub fn lift_ranking_manipulation(
    rule: &RuleSpec,
    k: usize,
    profile: &RankingProfile,
    agent: usize,
    misreport: &Ranking,
) -> Result<Manipulation> {
    let truthful = build_approval_election(profile, k)?;
    let deviated = build_approval_election(&profile.with_ranking(agent, misreport.clone()), k)?;
    let before = apply_rule(rule, &truthful.approval)?;
    let after = apply_rule(rule, &deviated.approval)?;
    let m = profile.m();
    let coalition: Vec<usize> = (1..m).map(|j| truthful.copy_index(agent, j)).collect();
    let misreports = coalition.iter().map(|&c| deviated.approval.ballot(c)).collect();
    let distances = coalition
        .iter()
        .map(|&c| {
            let t = truthful.approval.ballot(c);
            (hamming(t, before.set()), hamming(t, after.set()))
        })
        .collect();
    Ok(Manipulation {
        axiom: crate::axioms::Axiom::StrongGsp,
        profile: truthful.approval,
        coalition,
        misreports,
        outcome_before: before,
        outcome_after: after,
        distances,
    })
}

/// The three approval profiles of the final step, built from three ranking
/// agents with rankings `x > y > rest` and `y > x > rest` (rest in index
/// order).
#[derive(Clone, Debug)]
pub struct FinalStepProfiles {
    pub p_x: ApprovalProfile,
    pub p_y: ApprovalProfile,
    pub p_xy: ApprovalProfile,
    pub dummies: AltSet,
    pub x: usize,
    pub y: usize,
    /// Alternatives on the ranking side (`m' - k + 1`).
    pub source_m: usize,
}

impl FinalStepProfiles {
    /// Approval index of copy `(i, 1)` for 1-based source agent `i`.
    pub fn first_copy(&self, source_agent: usize) -> usize {
        (source_agent - 1) * (self.source_m - 1)
    }

    pub fn x_committee(&self) -> AltSet {
        self.dummies.with(self.x)
    }

    pub fn y_committee(&self) -> AltSet {
        self.dummies.with(self.y)
    }
}

pub fn final_step_profiles(m_prime: usize, k: usize, x: usize, y: usize) -> Result<FinalStepProfiles> {
    if m_prime < 3 || k == 0 || k + 2 > m_prime {
        return Err(Error::InvalidParams(format!(
            "need m' >= 3 and 1 <= k <= m'-2, got m'={m_prime}, k={k}"
        )));
    }
    let m = m_prime - k + 1;
    if x == y || x >= m || y >= m {
        return Err(Error::InvalidParams(format!(
            "x and y must be distinct real alternatives below {m}"
        )));
    }
    let rest: Vec<usize> = (0..m).filter(|&a| a != x && a != y).collect();
    let rank_x = Ranking::new([x, y].into_iter().chain(rest.iter().copied()).collect())?;
    let rank_y = Ranking::new([y, x].into_iter().chain(rest.iter().copied()).collect())?;
    let src_x = RankingProfile::new(m, vec![rank_x.clone(), rank_x.clone(), rank_y.clone()])?;
    let src_y = RankingProfile::new(m, vec![rank_y.clone(), rank_x, rank_y])?;
    let red_x = build_approval_election(&src_x, k)?;
    let red_y = build_approval_election(&src_y, k)?;
    let p_xy = red_x
        .approval
        .with_ballot(0, AltSet::from_indices([x, y]).union(red_x.dummies))?;
    Ok(FinalStepProfiles {
        p_x: red_x.approval,
        p_y: red_y.approval,
        p_xy,
        dummies: red_x.dummies,
        x,
        y,
        source_m: m,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Branch {
    /// `R(P_xy)` is not `{x} ∪ D`: copies (1,1) and (2,1) move to `P_x`.
    NotX,
    /// `R(P_xy) = {x} ∪ D`: copies (1,1) and (3,1) move to `P_y`.
    IsX,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Premise {
    /// `R(P_x) = {x} ∪ D`
    Px,
    /// `R(P_y) = {y} ∪ D`
    Py,
}

#[derive(Clone, Debug)]
pub enum CounterexampleOutcome {
    /// Both premises hold; the deviation for the applicable branch. Once the
    /// premises hold a violation always exists.
    Violation {
        profiles: FinalStepProfiles,
        /// Outcomes on `P_x`, `P_y`, `P_xy`.
        outcomes: [Committee; 3],
        branch: Branch,
        witness: Manipulation,
    },
    /// The rule does not behave like a dictatorship of agent 1 on `P_x`/`P_y`.
    PremiseFailed {
        profiles: FinalStepProfiles,
        premise: Premise,
        expected: AltSet,
        got: Committee,
    },
}

/// Runs the final step with `x = 0`, `y = 1`.
pub fn counterexample_run(rule: &RuleSpec, m_prime: usize, k: usize) -> Result<CounterexampleOutcome> {
    counterexample_run_with(rule, m_prime, k, 0, 1)
}

pub fn counterexample_run_with(
    rule: &RuleSpec,
    m_prime: usize,
    k: usize,
    x: usize,
    y: usize,
) -> Result<CounterexampleOutcome> {
    let profiles = final_step_profiles(m_prime, k, x, y)?;
    let out_x = apply_rule(rule, &profiles.p_x)?;
    if out_x.set() != profiles.x_committee() {
        return Ok(CounterexampleOutcome::PremiseFailed {
            expected: profiles.x_committee(),
            got: out_x,
            premise: Premise::Px,
            profiles,
        });
    }
    let out_y = apply_rule(rule, &profiles.p_y)?;
    if out_y.set() != profiles.y_committee() {
        return Ok(CounterexampleOutcome::PremiseFailed {
            expected: profiles.y_committee(),
            got: out_y,
            premise: Premise::Py,
            profiles,
        });
    }
    let out_xy = apply_rule(rule, &profiles.p_xy)?;
    let (branch, partner, target, after) = if out_xy.set() != profiles.x_committee() {
        (Branch::NotX, profiles.first_copy(2), profiles.x_committee(), out_x)
    } else {
        (Branch::IsX, profiles.first_copy(3), profiles.y_committee(), out_y)
    };
    let coalition = vec![0, partner];
    let distances = coalition
        .iter()
        .map(|&i| {
            let t = profiles.p_xy.ballot(i);
            (hamming(t, out_xy.set()), hamming(t, after.set()))
        })
        .collect();
    let witness = Manipulation {
        axiom: crate::axioms::Axiom::StrongGsp,
        profile: profiles.p_xy.clone(),
        coalition,
        misreports: vec![target, target],
        outcome_before: out_xy,
        outcome_after: after,
        distances,
    };
    Ok(CounterexampleOutcome::Violation {
        outcomes: [out_x, out_y, out_xy],
        profiles,
        branch,
        witness,
    })
}

/// Names real alternatives `x`, `y` and the rest by index, and writes a set
/// as `{..} ∪ D` when it contains all dummies.
fn describe(set: AltSet, p: &FinalStepProfiles) -> String {
    let name = |a: usize| {
        if a == p.x {
            "x".to_string()
        } else if a == p.y {
            "y".to_string()
        } else {
            format!("a{a}")
        }
    };
    let real: Vec<String> = set.difference(p.dummies).iter().map(name).collect();
    let extra_dummies: Vec<String> = set.intersection(p.dummies).iter().map(|d| format!("d{}", d - p.source_m + 1)).collect();
    if p.dummies.is_subset(set) {
        format!("{{{}}} ∪ D", real.join(","))
    } else {
        let mut all = real;
        all.extend(extra_dummies);
        format!("{{{}}}", all.join(","))
    }
}

impl CounterexampleOutcome {
    pub fn profiles(&self) -> &FinalStepProfiles {
        match self {
            CounterexampleOutcome::Violation { profiles, .. } => profiles,
            CounterexampleOutcome::PremiseFailed { profiles, .. } => profiles,
        }
    }

    /// One row per copy with its ballot in `P_x`, `P_y`, `P_xy`, then the outcomes.
    pub fn render_table(&self) -> String {
        let p = self.profiles();
        let mut rows: Vec<[String; 4]> = vec![[
            "agent".into(),
            "P_x".into(),
            "P_y".into(),
            "P_xy".into(),
        ]];
        for a in 0..p.p_x.params().n() {
            let (i, j) = (a / (p.source_m - 1) + 1, a % (p.source_m - 1) + 1);
            rows.push([
                format!("({i},{j})"),
                describe(p.p_x.ballot(a), p),
                describe(p.p_y.ballot(a), p),
                describe(p.p_xy.ballot(a), p),
            ]);
        }
        let outcome_row = match self {
            CounterexampleOutcome::Violation { outcomes, .. } => [
                "outcome".into(),
                describe(outcomes[0].set(), p),
                describe(outcomes[1].set(), p),
                describe(outcomes[2].set(), p),
            ],
            CounterexampleOutcome::PremiseFailed { premise, got, .. } => match premise {
                Premise::Px => ["outcome".into(), describe(got.set(), p), "-".into(), "-".into()],
                Premise::Py => [
                    "outcome".into(),
                    describe(p.x_committee(), p),
                    describe(got.set(), p),
                    "-".into(),
                ],
            },
        };
        rows.push(outcome_row);
        let widths: Vec<usize> = (0..4)
            .map(|c| rows.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
            .collect();
        let mut s = String::new();
        for (ri, r) in rows.iter().enumerate() {
            let line: Vec<String> = r
                .iter()
                .zip(&widths)
                .map(|(cell, &w)| format!("{cell:<w$}"))
                .collect();
            let _ = writeln!(s, "{}", line.join(" | ").trim_end());
            if ri == 0 || ri + 2 == rows.len() {
                let _ = writeln!(s, "{}", widths.iter().map(|&w| "-".repeat(w)).collect::<Vec<_>>().join("-+-"));
            }
        }
        s
    }
}

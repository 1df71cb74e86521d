//! Participatory budgeting with equal project costs. With room for `k`
//! projects the maximal feasible sets are the `k`-subsets, so a budgeting
//! mechanism that always funds a maximal set is a committee rule.

use crate::election::{AltSet, ApprovalProfile, BallotRestriction, Committee, ElectionParams};
use crate::error::{Error, Result};
use crate::rules::{apply_rule, RuleSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BudgetInstance {
    pub projects: usize,
    /// Projects the budget can fund.
    pub slots: usize,
    pub ballots: Vec<AltSet>,
    /// Require every ballot to fit in the budget.
    pub feasible_ballots: bool,
}

impl BudgetInstance {
    pub fn new(projects: usize, slots: usize, ballots: Vec<AltSet>, feasible_ballots: bool) -> Result<Self> {
        ElectionParams::new(projects, slots, ballots.len().max(1))?;
        if let Some(b) = ballots.iter().find(|b| !b.within(projects)) {
            return Err(Error::InvalidParams(format!("ballot {b} names a project beyond {projects}")));
        }
        if feasible_ballots {
            if let Some(b) = ballots.iter().find(|b| b.len() > slots) {
                return Err(Error::NotAllowable(format!(
                    "ballot {b} approves more than the {slots} fundable projects"
                )));
            }
        }
        Ok(BudgetInstance {
            projects,
            slots,
            ballots,
            feasible_ballots,
        })
    }

    /// Ballot space to search over for this regime.
    pub fn restriction(&self) -> BallotRestriction {
        if self.feasible_ballots {
            BallotRestriction::AtMost(self.slots)
        } else {
            BallotRestriction::All
        }
    }

    pub fn to_profile(&self) -> Result<ApprovalProfile> {
        ApprovalProfile::new(
            ElectionParams::new(self.projects, self.slots, self.ballots.len())?,
            self.ballots.clone(),
        )
    }

    pub fn from_profile(profile: &ApprovalProfile, feasible_ballots: bool) -> Result<Self> {
        let p = profile.params();
        BudgetInstance::new(p.m(), p.k(), profile.ballots().to_vec(), feasible_ballots)
    }

    /// Funds projects with the committee chosen by `rule`.
    pub fn fund(&self, rule: &RuleSpec) -> Result<Committee> {
        apply_rule(rule, &self.to_profile()?)
    }
}

/// Encodes the instance as a profile and decodes it again.
pub fn pb_roundtrip(instance: &BudgetInstance) -> Result<BudgetInstance> {
    BudgetInstance::from_profile(&instance.to_profile()?, instance.feasible_ballots)
}

/// Inclusion-maximal sets of at most `slots` projects, in bit order.
pub fn maximal_feasible_sets(projects: usize, slots: usize) -> Vec<AltSet> {
    let feasible: Vec<AltSet> = (0..1u64 << projects)
        .map(AltSet::from_bits)
        .filter(|s| s.len() <= slots)
        .collect();
    feasible
        .iter()
        .copied()
        .filter(|s| !feasible.iter().any(|t| t != s && s.is_subset(*t)))
        .collect()
}

//! Minimax approval voting: a rule that is not unanimous has an unbounded
//! approximation ratio, because on a unanimous profile the optimum has cost 0.

use crate::axioms::{check_unanimity, Witness};
use crate::election::{ApprovalProfile, Committee, ElectionParams};
use crate::error::Result;
use crate::rules::{apply_rule, max_distance, RuleSpec};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MinimaxVerdict {
    /// The rule misses the common ballot of `profile`, so its cost there is
    /// positive while the optimum costs nothing.
    Infinite {
        profile: ApprovalProfile,
        outcome: Committee,
        rule_cost: usize,
    },
    /// The rule is unanimous; the argument gives no bound.
    NotApplicable,
}

impl MinimaxVerdict {
    /// Recomputes the certificate: optimal cost 0 (the common ballot) and a
    /// positive cost for the rule's outcome.
    pub fn replay(&self, rule: &RuleSpec) -> std::result::Result<(), String> {
        match self {
            MinimaxVerdict::NotApplicable => Ok(()),
            MinimaxVerdict::Infinite {
                profile,
                outcome,
                rule_cost,
            } => {
                let common = profile.common_ballot().ok_or("profile is not unanimous")?;
                let best = Committee::new(common, profile.params()).map_err(|e| e.to_string())?;
                if max_distance(best, profile) != 0 {
                    return Err("common ballot does not cost 0".into());
                }
                let got = apply_rule(rule, profile).map_err(|e| e.to_string())?;
                if got != *outcome || max_distance(got, profile) != *rule_cost || *rule_cost == 0 {
                    return Err("rule outcome does not have the certified positive cost".into());
                }
                Ok(())
            }
        }
    }
}

pub fn minimax_infinite_ratio_check(rule: &RuleSpec, params: &ElectionParams) -> Result<MinimaxVerdict> {
    let verdict = check_unanimity(rule, params)?;
    match verdict.witness {
        Some(Witness::Unanimity { profile, outcome }) => {
            let rule_cost = max_distance(outcome, &profile);
            Ok(MinimaxVerdict::Infinite {
                profile,
                outcome,
                rule_cost,
            })
        }
        _ => Ok(MinimaxVerdict::NotApplicable),
    }
}

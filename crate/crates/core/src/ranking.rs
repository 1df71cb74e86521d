//! Single-winner rules over ranking profiles.

use std::fmt;
use std::sync::Arc;

use crate::election::RankingProfile;
use crate::error::{Error, Result};
use crate::reduction::InducedRule;
use crate::search::table::RankingTable;

/// A single-winner rule: maps a ranking profile to one alternative.
pub trait SingleWinnerRule: Sync {
    fn winner(&self, profile: &RankingProfile) -> Result<usize>;

    fn name(&self) -> String;
}

#[derive(Clone, Debug)]
pub enum RankingRule {
    /// The top choice of one agent.
    Dictatorship(usize),
    Constant(usize),
    /// Most first places; ties go to the lowest index.
    Plurality,
    /// Borda count; ties go to the lowest index.
    Borda,
    Table(Arc<RankingTable>),
}

impl SingleWinnerRule for RankingRule {
    fn winner(&self, profile: &RankingProfile) -> Result<usize> {
        let m = profile.m();
        match self {
            RankingRule::Dictatorship(i) => {
                if *i >= profile.n() {
                    return Err(Error::DimensionMismatch(format!(
                        "dictator {i} is not one of {} agents",
                        profile.n()
                    )));
                }
                Ok(profile.ranking(*i).top())
            }
            RankingRule::Constant(a) => {
                if *a >= m {
                    return Err(Error::DimensionMismatch(format!(
                        "constant winner {a} is not one of {m} alternatives"
                    )));
                }
                Ok(*a)
            }
            RankingRule::Plurality => {
                let mut score = vec![0usize; m];
                for r in profile.rankings() {
                    score[r.top()] += 1;
                }
                Ok(argmax_low_index(&score))
            }
            RankingRule::Borda => {
                let mut score = vec![0usize; m];
                for r in profile.rankings() {
                    for (pos, &a) in r.order().iter().enumerate() {
                        score[a] += m - 1 - pos;
                    }
                }
                Ok(argmax_low_index(&score))
            }
            RankingRule::Table(t) => t.lookup(profile),
        }
    }

    fn name(&self) -> String {
        self.to_string()
    }
}

impl RankingRule {
    /// Parses `dictator:<i>`, `constant:<a>`, `plurality`, `borda`. Induced
    /// rules are built with [`RankingRule::parse_with_k`].
    pub fn parse(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let index = |what: &str| -> Result<usize> {
            let a = arg.ok_or_else(|| Error::InvalidParams(format!("`{head}` needs {what}")))?;
            a.parse()
                .map_err(|_| Error::InvalidParams(format!("`{a}` is not an index")))
        };
        match head {
            "dictator" => Ok(RankingRule::Dictatorship(index("an agent index")?)),
            "constant" => Ok(RankingRule::Constant(index("an alternative index")?)),
            "plurality" => Ok(RankingRule::Plurality),
            "borda" => Ok(RankingRule::Borda),
            other => Err(Error::InvalidParams(format!("unknown ranking rule `{other}`"))),
        }
    }

    /// Like [`RankingRule::parse`], additionally accepting
    /// `induced:<approval rule>` which is reduced with committee size `k`.
    pub fn parse_with_k(s: &str, k: usize) -> Result<Box<dyn SingleWinnerRule>> {
        if let Some(base) = s.strip_prefix("induced:") {
            let base = crate::rules::RuleSpec::parse(base)?;
            return Ok(Box::new(InducedRule::new(base, k)?));
        }
        Ok(Box::new(RankingRule::parse(s)?))
    }
}

impl fmt::Display for RankingRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RankingRule::Dictatorship(i) => write!(f, "dictator:{i}"),
            RankingRule::Constant(a) => write!(f, "constant:{a}"),
            RankingRule::Plurality => write!(f, "plurality"),
            RankingRule::Borda => write!(f, "borda"),
            RankingRule::Table(_) => write!(f, "table"),
        }
    }
}

fn argmax_low_index(score: &[usize]) -> usize {
    let best = *score.iter().max().expect("m >= 1");
    score.iter().position(|&s| s == best).expect("max exists")
}

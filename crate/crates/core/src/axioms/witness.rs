use std::fmt::Write;

use itertools::Itertools;

use super::{manipulating_coalition, Axiom, ManipulationKind};
use crate::election::{hamming, AltSet, ApprovalProfile, Committee, ElectionParams, Ranking, RankingProfile};
use crate::error::{Error, Result};
use crate::ranking::SingleWinnerRule;
use crate::rules::{apply_rule, RuleSpec};

/// A coalition deviation in an approval election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Manipulation {
    pub axiom: Axiom,
    /// Truthful profile.
    pub profile: ApprovalProfile,
    /// Coalition members in increasing order.
    pub coalition: Vec<usize>,
    /// Reported ballot of each coalition member (may equal the truthful one).
    pub misreports: Vec<AltSet>,
    pub outcome_before: Committee,
    pub outcome_after: Committee,
    /// `(before, after)` distance of each member to the outcomes, measured
    /// against the truthful ballot.
    pub distances: Vec<(usize, usize)>,
}

impl Manipulation {
    pub(crate) fn build(
        axiom: Axiom,
        profile: ApprovalProfile,
        coalition_mask: u64,
        deviated: &[AltSet],
        before: Committee,
        after: Committee,
    ) -> Self {
        let coalition: Vec<usize> = (0..profile.params().n())
            .filter(|&i| coalition_mask >> i & 1 == 1)
            .collect();
        let misreports = coalition.iter().map(|&i| deviated[i]).collect();
        let distances = coalition
            .iter()
            .map(|&i| {
                let t = profile.ballot(i);
                (hamming(t, before.set()), hamming(t, after.set()))
            })
            .collect();
        Manipulation {
            axiom,
            profile,
            coalition,
            misreports,
            outcome_before: before,
            outcome_after: after,
            distances,
        }
    }

    /// The profile after the coalition's reports are substituted.
    pub fn deviated_profile(&self) -> Result<ApprovalProfile> {
        let mut ballots = self.profile.ballots().to_vec();
        for (&i, &b) in self.coalition.iter().zip(&self.misreports) {
            *ballots.get_mut(i).ok_or_else(|| {
                Error::DimensionMismatch(format!("coalition member {i} is not an agent"))
            })? = b;
        }
        ApprovalProfile::new(*self.profile.params(), ballots)
    }

    /// Whether the recorded distance pairs certify a violation of the axiom.
    pub fn certifies(&self) -> bool {
        if self.distances.is_empty() {
            return false;
        }
        let weak = self.distances.iter().all(|&(b, a)| a <= b);
        let strict_all = self.distances.iter().all(|&(b, a)| a < b);
        let strict_one = self.distances.iter().any(|&(b, a)| a < b);
        match self.axiom {
            Axiom::Sp => self.coalition.len() == 1 && strict_all,
            Axiom::WeakGsp => strict_all,
            Axiom::StrongGsp => weak && strict_one,
            _ => false,
        }
    }

    /// Re-evaluates both profiles with `rule` and checks that outcomes,
    /// distances and the violation all match what was recorded.
    pub fn replay(&self, rule: &RuleSpec) -> std::result::Result<(), String> {
        let before = apply_rule(rule, &self.profile).map_err(|e| e.to_string())?;
        let deviated = self.deviated_profile().map_err(|e| e.to_string())?;
        let after = apply_rule(rule, &deviated).map_err(|e| e.to_string())?;
        if before != self.outcome_before {
            return Err(format!("truthful outcome is {before}, witness says {}", self.outcome_before));
        }
        if after != self.outcome_after {
            return Err(format!("deviated outcome is {after}, witness says {}", self.outcome_after));
        }
        if self.coalition.len() != self.misreports.len() || self.coalition.len() != self.distances.len() {
            return Err("coalition, misreports and distances differ in length".into());
        }
        for (&i, &(db, da)) in self.coalition.iter().zip(&self.distances) {
            let t = self.profile.ballot(i);
            if hamming(t, before.set()) != db || hamming(t, after.set()) != da {
                return Err(format!("distance pair of agent {i} does not match"));
            }
        }
        if !self.certifies() {
            return Err(format!("distance pairs do not certify a {} violation", self.axiom));
        }
        // The coalition must contain every agent whose report changed.
        let changed = self
            .profile
            .ballots()
            .iter()
            .zip(deviated.ballots())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .all(|(i, _)| self.coalition.contains(&i));
        if !changed {
            return Err("an agent outside the coalition changed its report".into());
        }
        Ok(())
    }

    /// True when the deviation is a violation of `kind` for coalitions of at
    /// most `max_coalition` agents.
    pub fn is_violation(&self, kind: ManipulationKind, max_coalition: usize) -> bool {
        let Ok(dev) = self.deviated_profile() else {
            return false;
        };
        let changed = self
            .profile
            .ballots()
            .iter()
            .zip(dev.ballots())
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .fold(0u64, |m, (i, _)| m | 1 << i);
        manipulating_coalition(
            kind,
            max_coalition,
            self.profile.ballots(),
            changed,
            self.outcome_before.set(),
            self.outcome_after.set(),
        )
        .is_some()
    }
}

/// A single-agent misreport in a ranking election.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RankingManipulation {
    pub profile: RankingProfile,
    pub agent: usize,
    pub misreport: Ranking,
    pub before: usize,
    pub after: usize,
}

impl RankingManipulation {
    pub fn replay(&self, rule: &dyn SingleWinnerRule) -> std::result::Result<(), String> {
        let before = rule.winner(&self.profile).map_err(|e| e.to_string())?;
        let dev = self.profile.with_ranking(self.agent, self.misreport.clone());
        let after = rule.winner(&dev).map_err(|e| e.to_string())?;
        if before != self.before || after != self.after {
            return Err(format!(
                "replay gives {before} -> {after}, witness says {} -> {}",
                self.before, self.after
            ));
        }
        if !self.profile.ranking(self.agent).prefers(after, before) {
            return Err("agent does not strictly prefer the manipulated outcome".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    Manipulation(Manipulation),
    /// A unanimous profile whose common ballot was not elected.
    Unanimity {
        profile: ApprovalProfile,
        outcome: Committee,
    },
    /// `dominating` makes every agent weakly and one agent strictly closer.
    Pareto {
        profile: ApprovalProfile,
        outcome: Committee,
        dominating: Committee,
        distances: Vec<(usize, usize)>,
    },
    Ranking(RankingManipulation),
    /// Outcomes no profile elects: alternatives on the ranking side,
    /// canonical committee indices on the approval side.
    NotOnto { unreached: Vec<usize> },
    /// The rule always elects this agent's top choice.
    Dictatorial { agent: usize },
}

impl Witness {
    /// Replays an approval-side witness against `rule`.
    pub fn replay(&self, rule: &RuleSpec) -> std::result::Result<(), String> {
        match self {
            Witness::Manipulation(m) => m.replay(rule),
            Witness::Unanimity { profile, outcome } => {
                let got = apply_rule(rule, profile).map_err(|e| e.to_string())?;
                let common = profile.common_ballot().ok_or("profile is not unanimous")?;
                if common.len() != profile.params().k() {
                    return Err("common ballot is not a committee".into());
                }
                if got != *outcome || got.set() == common {
                    return Err(format!("rule elects {got}, witness says {outcome}"));
                }
                Ok(())
            }
            Witness::Pareto {
                profile,
                outcome,
                dominating,
                distances,
            } => {
                let got = apply_rule(rule, profile).map_err(|e| e.to_string())?;
                if got != *outcome {
                    return Err(format!("rule elects {got}, witness says {outcome}"));
                }
                let recomputed: Vec<_> = profile
                    .ballots()
                    .iter()
                    .map(|&b| (hamming(b, outcome.set()), hamming(b, dominating.set())))
                    .collect();
                if recomputed != *distances {
                    return Err("distance pairs do not match".into());
                }
                let weak = distances.iter().all(|&(o, d)| d <= o);
                let strict = distances.iter().any(|&(o, d)| d < o);
                if weak && strict {
                    Ok(())
                } else {
                    Err("dominating committee does not Pareto-improve".into())
                }
            }
            _ => Err("not an approval-side witness".into()),
        }
    }

    pub fn replay_ranking(&self, rule: &dyn SingleWinnerRule) -> std::result::Result<(), String> {
        match self {
            Witness::Ranking(r) => r.replay(rule),
            _ => Err("not a ranking-side witness".into()),
        }
    }

    /// `key=value` records, keys prefixed with `witness.`.
    pub fn to_records(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let mut put = |k: &str, v: String| out.push((format!("witness.{k}"), v));
        let params = |put: &mut dyn FnMut(&str, String), p: &ElectionParams| {
            put("m", p.m().to_string());
            put("k", p.k().to_string());
            put("n", p.n().to_string());
        };
        let bits = |p: &ApprovalProfile| {
            p.ballots()
                .iter()
                .map(|b| b.to_bitstring(p.params().m()))
                .join(",")
        };
        let pairs = |d: &[(usize, usize)]| d.iter().map(|(a, b)| format!("{a}:{b}")).join(",");
        match self {
            Witness::Manipulation(w) => {
                let m = w.profile.params().m();
                put("kind", "manipulation".into());
                put("axiom", w.axiom.name().into());
                params(&mut put, w.profile.params());
                put("profile", bits(&w.profile));
                put("coalition", w.coalition.iter().join(","));
                put("misreports", w.misreports.iter().map(|b| b.to_bitstring(m)).join(","));
                put("before", w.outcome_before.to_bitstring(m));
                put("after", w.outcome_after.to_bitstring(m));
                put("distances", pairs(&w.distances));
            }
            Witness::Unanimity { profile, outcome } => {
                put("kind", "unanimity".into());
                params(&mut put, profile.params());
                put("profile", bits(profile));
                put("outcome", outcome.to_bitstring(profile.params().m()));
            }
            Witness::Pareto {
                profile,
                outcome,
                dominating,
                distances,
            } => {
                let m = profile.params().m();
                put("kind", "pareto".into());
                params(&mut put, profile.params());
                put("profile", bits(profile));
                put("outcome", outcome.to_bitstring(m));
                put("dominating", dominating.to_bitstring(m));
                put("distances", pairs(distances));
            }
            Witness::Ranking(r) => {
                put("kind", "ranking-manipulation".into());
                put("m", r.profile.m().to_string());
                put("n", r.profile.n().to_string());
                put(
                    "profile",
                    r.profile.rankings().iter().map(|x| x.order().iter().join(">")).join(","),
                );
                put("agent", r.agent.to_string());
                put("misreport", r.misreport.order().iter().join(">"));
                put("before", r.before.to_string());
                put("after", r.after.to_string());
            }
            Witness::NotOnto { unreached } => {
                put("kind", "not-onto".into());
                put("unreached", unreached.iter().join(","));
            }
            Witness::Dictatorial { agent } => {
                put("kind", "dictatorial".into());
                put("agent", agent.to_string());
            }
        }
        out
    }

    /// Parses the records written by [`Witness::to_records`]. Records with
    /// other prefixes are ignored.
    pub fn from_records(records: &[(String, String)]) -> Result<Witness> {
        let get = |k: &str| -> Result<&str> {
            let key = format!("witness.{k}");
            records
                .iter()
                .find(|(rk, _)| *rk == key)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| Error::Parse {
                    line: 0,
                    msg: format!("missing record `{key}`"),
                })
        };
        let bad = |what: &str| Error::Parse {
            line: 0,
            msg: format!("malformed witness record `{what}`"),
        };
        let num = |k: &str| -> Result<usize> { get(k)?.parse().map_err(|_| bad(k)) };
        let list = |k: &str| -> Result<Vec<usize>> {
            let v = get(k)?;
            if v.is_empty() {
                return Ok(vec![]);
            }
            v.split(',').map(|t| t.parse().map_err(|_| bad(k))).collect()
        };
        let approval = || -> Result<(ElectionParams, ApprovalProfile)> {
            let p = ElectionParams::new(num("m")?, num("k")?, num("n")?)?;
            let ballots = get("profile")?
                .split(',')
                .map(|b| AltSet::parse_bitstring(b, p.m()).map_err(|_| bad("profile")))
                .collect::<Result<Vec<_>>>()?;
            Ok((p, ApprovalProfile::new(p, ballots)?))
        };
        let committee = |k: &str, p: &ElectionParams| -> Result<Committee> {
            let s = AltSet::parse_bitstring(get(k)?, p.m()).map_err(|_| bad(k))?;
            Committee::new(s, p)
        };
        let pairs = |k: &str| -> Result<Vec<(usize, usize)>> {
            get(k)?
                .split(',')
                .map(|t| {
                    let (a, b) = t.split_once(':').ok_or_else(|| bad(k))?;
                    Ok((a.parse().map_err(|_| bad(k))?, b.parse().map_err(|_| bad(k))?))
                })
                .collect()
        };
        let ranking = |s: &str| -> Result<Ranking> {
            let order = s
                .split('>')
                .map(|t| t.parse().map_err(|_| bad("ranking")))
                .collect::<Result<Vec<usize>>>()?;
            Ranking::new(order)
        };
        match get("kind")? {
            "manipulation" => {
                let (p, profile) = approval()?;
                Ok(Witness::Manipulation(Manipulation {
                    axiom: Axiom::parse(get("axiom")?)?,
                    coalition: list("coalition")?,
                    misreports: get("misreports")?
                        .split(',')
                        .map(|b| AltSet::parse_bitstring(b, p.m()).map_err(|_| bad("misreports")))
                        .collect::<Result<Vec<_>>>()?,
                    outcome_before: committee("before", &p)?,
                    outcome_after: committee("after", &p)?,
                    distances: pairs("distances")?,
                    profile,
                }))
            }
            "unanimity" => {
                let (p, profile) = approval()?;
                Ok(Witness::Unanimity {
                    outcome: committee("outcome", &p)?,
                    profile,
                })
            }
            "pareto" => {
                let (p, profile) = approval()?;
                Ok(Witness::Pareto {
                    outcome: committee("outcome", &p)?,
                    dominating: committee("dominating", &p)?,
                    distances: pairs("distances")?,
                    profile,
                })
            }
            "ranking-manipulation" => {
                let m = num("m")?;
                let rankings = get("profile")?
                    .split(',')
                    .map(ranking)
                    .collect::<Result<Vec<_>>>()?;
                Ok(Witness::Ranking(RankingManipulation {
                    profile: RankingProfile::new(m, rankings)?,
                    agent: num("agent")?,
                    misreport: ranking(get("misreport")?)?,
                    before: num("before")?,
                    after: num("after")?,
                }))
            }
            "not-onto" => Ok(Witness::NotOnto {
                unreached: list("unreached")?,
            }),
            "dictatorial" => Ok(Witness::Dictatorial { agent: num("agent")? }),
            other => Err(bad(other)),
        }
    }

    /// Human-readable transcript.
    pub fn transcript(&self) -> String {
        let mut s = String::new();
        match self {
            Witness::Manipulation(w) => {
                let m = w.profile.params().m();
                let _ = writeln!(s, "{} violation", w.axiom);
                for (i, b) in w.profile.ballots().iter().enumerate() {
                    let mark = match w.coalition.iter().position(|&c| c == i) {
                        Some(pos) => format!(
                            "  reports {}  distance {} -> {}",
                            w.misreports[pos].to_bitstring(m),
                            w.distances[pos].0,
                            w.distances[pos].1
                        ),
                        None => String::new(),
                    };
                    let _ = writeln!(s, "  agent {i}: {}{mark}", b.to_bitstring(m));
                }
                let _ = writeln!(
                    s,
                    "  outcome {} -> {}",
                    w.outcome_before.to_bitstring(m),
                    w.outcome_after.to_bitstring(m)
                );
            }
            Witness::Unanimity { profile, outcome } => {
                let m = profile.params().m();
                let _ = writeln!(
                    s,
                    "unanimity violation: all {} agents approve {}, rule elects {}",
                    profile.params().n(),
                    profile.ballot(0).to_bitstring(m),
                    outcome.to_bitstring(m)
                );
            }
            Witness::Pareto {
                profile,
                outcome,
                dominating,
                distances,
            } => {
                let m = profile.params().m();
                let _ = writeln!(
                    s,
                    "pareto violation: {} dominates elected {}",
                    dominating.to_bitstring(m),
                    outcome.to_bitstring(m)
                );
                for (i, (b, (o, d))) in profile.ballots().iter().zip(distances).enumerate() {
                    let _ = writeln!(s, "  agent {i}: {}  distance {o} vs {d}", b.to_bitstring(m));
                }
            }
            Witness::Ranking(r) => {
                let _ = writeln!(s, "sp-ranking violation");
                for (i, x) in r.profile.rankings().iter().enumerate() {
                    let _ = writeln!(s, "  agent {i}: {x:?}");
                }
                let _ = writeln!(
                    s,
                    "  agent {} reports {:?}; winner {} -> {}",
                    r.agent, r.misreport, r.before, r.after
                );
            }
            Witness::NotOnto { unreached } => {
                let _ = writeln!(s, "never elected: {}", unreached.iter().join(","));
            }
            Witness::Dictatorial { agent } => {
                let _ = writeln!(s, "agent {agent} is a dictator");
            }
        }
        s
    }
}

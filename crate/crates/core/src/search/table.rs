//! Explicit rule tables: one outcome per profile of an enumerated space.

use std::fmt::Write;

use crate::election::{
    AltSet, BallotRestriction, Committee, ElectionParams, ProfileSpace, RankingProfile,
    RankingSpace,
};
use crate::error::{parse_err, Error, Result};
use crate::format::{content_lines, parse_usizes};
use crate::ranking::SingleWinnerRule;

/// An approval rule given by its value on every profile of a ballot space.
#[derive(Clone, Debug)]
pub struct RuleTable {
    space: ProfileSpace,
    outcomes: Vec<Committee>,
}

impl RuleTable {
    pub fn new(space: ProfileSpace, outcomes: Vec<Committee>) -> Result<Self> {
        if outcomes.len() as u64 != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} outcomes for a space of {} profiles",
                outcomes.len(),
                space.len()
            )));
        }
        for c in &outcomes {
            Committee::new(c.set(), space.params())?;
        }
        Ok(RuleTable { space, outcomes })
    }

    pub fn params(&self) -> &ElectionParams {
        self.space.params()
    }

    pub fn restriction(&self) -> BallotRestriction {
        self.space.restriction()
    }

    pub fn space(&self) -> &ProfileSpace {
        &self.space
    }

    pub fn outcomes(&self) -> &[Committee] {
        &self.outcomes
    }

    pub fn outcome(&self, index: u64) -> Committee {
        self.outcomes[index as usize]
    }

    pub fn lookup(&self, ballots: &[AltSet]) -> Result<Committee> {
        let idx = self.space.index_of(ballots).ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "profile {} lies outside the table's `{}` ballot space",
                ballots.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(" "),
                self.restriction().name()
            ))
        })?;
        Ok(self.outcomes[idx as usize])
    }
}

/// Writes a table as `m k n restriction` followed by one line per profile:
/// the ballots as bit-strings, then `->` and the outcome.
pub fn format_rule_table(table: &RuleTable) -> String {
    let p = table.params();
    let mut s = format!("{} {} {} {}\n", p.m(), p.k(), p.n(), table.restriction().name());
    for (idx, c) in table.outcomes.iter().enumerate() {
        for b in table.space.ballots_of(idx as u64) {
            let _ = write!(s, "{} ", b.to_bitstring(p.m()));
        }
        let _ = writeln!(s, "-> {}", c.to_bitstring(p.m()));
    }
    s
}

/// Parses the output of [`format_rule_table`]. Lines may come in any order but
/// every profile of the space must appear exactly once.
pub fn parse_rule_table(text: &str) -> Result<RuleTable> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty rule table"))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let (sizes, restriction) = match fields.len() {
        3 => (header, BallotRestriction::All),
        4 => (
            header.rsplit_once(char::is_whitespace).expect("four fields").0,
            BallotRestriction::parse(fields[3])
                .ok_or_else(|| parse_err(hl, format!("unknown ballot restriction `{}`", fields[3])))?,
        ),
        _ => return Err(parse_err(hl, "expected `m k n [restriction]`")),
    };
    let v = parse_usizes(hl, sizes, 3)?;
    let params = ElectionParams::new(v[0], v[1], v[2]).map_err(|e| parse_err(hl, e.to_string()))?;
    let space = ProfileSpace::new(params, restriction)?;
    let mut outcomes: Vec<Option<Committee>> = vec![None; space.len() as usize];
    for (ln, line) in lines {
        let (lhs, rhs) = line
            .split_once("->")
            .ok_or_else(|| parse_err(ln, "expected `<ballots> -> <outcome>`"))?;
        let ballots = lhs
            .split_whitespace()
            .map(|b| AltSet::parse_bitstring(b, params.m()))
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| parse_err(ln, e))?;
        if ballots.len() != params.n() {
            return Err(parse_err(ln, format!("expected {} ballots, found {}", params.n(), ballots.len())));
        }
        let outcome = AltSet::parse_bitstring(rhs.trim(), params.m()).map_err(|e| parse_err(ln, e))?;
        let outcome = Committee::new(outcome, &params).map_err(|e| parse_err(ln, e.to_string()))?;
        let idx = space
            .index_of(&ballots)
            .ok_or_else(|| parse_err(ln, "profile outside the declared ballot space"))?;
        if outcomes[idx as usize].replace(outcome).is_some() {
            return Err(parse_err(ln, "profile listed twice"));
        }
    }
    let outcomes = outcomes
        .into_iter()
        .enumerate()
        .map(|(idx, o)| {
            o.ok_or_else(|| {
                Error::InvalidParams(format!("rule table has no outcome for profile {idx}"))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RuleTable::new(space, outcomes)
}

/// A single-winner ranking rule given by its winner on every ranking profile.
#[derive(Clone, Debug)]
pub struct RankingTable {
    space: RankingSpace,
    winners: Vec<usize>,
}

impl RankingTable {
    pub fn new(space: RankingSpace, winners: Vec<usize>) -> Result<Self> {
        if winners.len() as u64 != space.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} winners for a space of {} profiles",
                winners.len(),
                space.len()
            )));
        }
        if let Some(&w) = winners.iter().find(|&&w| w >= space.m()) {
            return Err(Error::InvalidParams(format!("winner {w} out of range")));
        }
        Ok(RankingTable { space, winners })
    }

    pub fn space(&self) -> &RankingSpace {
        &self.space
    }

    pub fn winners(&self) -> &[usize] {
        &self.winners
    }

    pub fn lookup(&self, profile: &RankingProfile) -> Result<usize> {
        let idx = self.space.index_of(profile).ok_or_else(|| {
            Error::DimensionMismatch(format!(
                "ranking profile with m = {}, n = {} is outside the table",
                profile.m(),
                profile.n()
            ))
        })?;
        Ok(self.winners[idx as usize])
    }
}

impl SingleWinnerRule for RankingTable {
    fn winner(&self, profile: &RankingProfile) -> Result<usize> {
        self.lookup(profile)
    }

    fn name(&self) -> String {
        format!("table(m={}, n={})", self.space.m(), self.space.n())
    }
}

/// One line per ranking profile: the rankings as `a>b>c`, then `->` and the winner.
pub fn format_ranking_table(table: &RankingTable) -> String {
    let mut s = format!("{} {}\n", table.space.m(), table.space.n());
    for (idx, w) in table.winners.iter().enumerate() {
        let p = table.space.profile(idx as u64);
        for r in p.rankings() {
            let order: Vec<String> = r.order().iter().map(|a| a.to_string()).collect();
            let _ = write!(s, "{} ", order.join(">"));
        }
        let _ = writeln!(s, "-> {w}");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip() {
        let params = ElectionParams::new(2, 1, 1).unwrap();
        let space = ProfileSpace::new(params, BallotRestriction::Nonempty).unwrap();
        let a = Committee::new(AltSet::from_indices([0]), &params).unwrap();
        let b = Committee::new(AltSet::from_indices([1]), &params).unwrap();
        let t = RuleTable::new(space, vec![a, b, a]).unwrap();
        let text = format_rule_table(&t);
        assert!(text.starts_with("2 1 1 nonempty\n"));
        let back = parse_rule_table(&text).unwrap();
        assert_eq!(back.outcomes(), t.outcomes());
        assert_eq!(back.lookup(&[AltSet::from_indices([1])]).unwrap(), b);
        assert!(back.lookup(&[AltSet::EMPTY]).is_err());
    }

    #[test]
    fn missing_and_duplicate_rows() {
        assert!(parse_rule_table("2 1 1\n00 -> 10\n").is_err());
        let dup = "2 1 1\n00 -> 10\n00 -> 10\n10 -> 10\n01 -> 01\n11 -> 10\n";
        assert!(matches!(parse_rule_table(dup), Err(Error::Parse { line: 3, .. })));
    }

    #[test]
    fn ranking_table_lookup() {
        let space = RankingSpace::new(2, 1).unwrap();
        let t = RankingTable::new(space, vec![0, 1]).unwrap();
        let p = RankingProfile::from_orders(2, &[&[1, 0]]).unwrap();
        assert_eq!(t.winner(&p).unwrap(), 1);
        assert!(format_ranking_table(&t).contains("1>0 -> 1"));
        assert!(RankingTable::new(RankingSpace::new(2, 1).unwrap(), vec![0, 2]).is_err());
    }
}

//! Multi-winner approval rules.
//!
//! A [`RuleSpec`] names a procedure together with the committee tie order it
//! uses. [`RuleSpec::prepare`] binds it to election sizes once, after which
//! [`PreparedRule::apply`] is cheap enough to tabulate whole profile spaces.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use itertools::Itertools;

use crate::election::{
    enumerate_committees, hamming, lex_cmp, AltSet, ApprovalProfile, Committee, ElectionParams,
};
use crate::error::{Error, Result};
use crate::search::table::RuleTable;

/// A strict total order over committees used to break ties.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum TieOrder {
    /// Lexicographic over sorted member lists (the order of
    /// [`enumerate_committees`]).
    #[default]
    Canonical,
    /// Alternatives listed from highest to lowest priority; committees are
    /// compared lexicographically on their members' priority ranks.
    Priority(Vec<usize>),
    /// An explicit list of every committee, first = most preferred.
    Explicit(Vec<AltSet>),
}

impl TieOrder {
    pub fn compare(&self, a: AltSet, b: AltSet) -> Ordering {
        match self {
            TieOrder::Canonical => lex_cmp(a, b),
            TieOrder::Priority(prio) => {
                let ranks = |s: AltSet| {
                    s.iter()
                        .map(|x| prio.iter().position(|&p| p == x).unwrap_or(usize::MAX))
                        .sorted()
                        .collect::<Vec<_>>()
                };
                ranks(a).cmp(&ranks(b))
            }
            TieOrder::Explicit(list) => {
                let pos = |s: AltSet| list.iter().position(|&c| c == s).unwrap_or(usize::MAX);
                pos(a).cmp(&pos(b))
            }
        }
    }

    /// All committees for `params`, sorted by this order.
    pub fn sorted_committees(&self, params: &ElectionParams) -> Result<Vec<Committee>> {
        let mut all = enumerate_committees(params);
        match self {
            TieOrder::Canonical => {}
            TieOrder::Priority(prio) => {
                let mut seen = prio.clone();
                seen.sort_unstable();
                if seen != (0..params.m()).collect::<Vec<_>>() {
                    return Err(Error::InvalidParams(format!(
                        "priority order {prio:?} is not a permutation of 0..{}",
                        params.m()
                    )));
                }
                all.sort_by(|a, b| self.compare(a.set(), b.set()));
            }
            TieOrder::Explicit(list) => {
                if list.len() != all.len() || all.iter().any(|c| !list.contains(&c.set())) {
                    return Err(Error::InvalidParams(
                        "explicit tie order must list every committee exactly once".into(),
                    ));
                }
                return list
                    .iter()
                    .map(|&s| Committee::new(s, params))
                    .collect();
            }
        }
        Ok(all)
    }

    pub fn parse(s: &str) -> Result<Self> {
        if s == "canonical" {
            return Ok(TieOrder::Canonical);
        }
        if let Some(rest) = s.strip_prefix("priority:") {
            let prio = parse_index_list(rest)?;
            return Ok(TieOrder::Priority(prio));
        }
        Err(Error::InvalidParams(format!(
            "unknown tie order `{s}` (expected `canonical` or `priority:<a,b,..>`)"
        )))
    }
}

impl fmt::Display for TieOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TieOrder::Canonical => write!(f, "canonical"),
            TieOrder::Priority(p) => write!(f, "priority:{}", p.iter().join(",")),
            TieOrder::Explicit(l) => write!(f, "explicit:{}", l.iter().join(";")),
        }
    }
}

#[derive(Clone, Debug)]
pub enum RuleKind {
    /// Committees of maximal total approval score.
    Minisum,
    /// Committees of minimal maximum Hamming distance to the ballots.
    Minimax,
    /// Pads or trims the dictator's ballot to `k` members.
    KCompletion { dictator: usize },
    /// Keeps the committees closest to each agent in turn.
    SerialDictatorship { order: Vec<usize> },
    Constant(AltSet),
    Table(Arc<RuleTable>),
}

/// A voting rule: a procedure plus its tie order.
#[derive(Clone, Debug)]
pub struct RuleSpec {
    pub kind: RuleKind,
    pub tie: TieOrder,
}

impl RuleSpec {
    pub fn new(kind: RuleKind) -> Self {
        RuleSpec {
            kind,
            tie: TieOrder::Canonical,
        }
    }

    pub fn minisum() -> Self {
        RuleSpec::new(RuleKind::Minisum)
    }

    pub fn minimax() -> Self {
        RuleSpec::new(RuleKind::Minimax)
    }

    pub fn constant(committee: AltSet) -> Self {
        RuleSpec::new(RuleKind::Constant(committee))
    }

    pub fn table(table: RuleTable) -> Self {
        RuleSpec::new(RuleKind::Table(Arc::new(table)))
    }

    pub fn with_tie(mut self, tie: TieOrder) -> Self {
        self.tie = tie;
        self
    }

    /// Validates the rule against election sizes and precomputes the tie order.
    pub fn prepare(&self, params: &ElectionParams) -> Result<PreparedRule> {
        match &self.kind {
            RuleKind::KCompletion { dictator } if *dictator >= params.n() => {
                return Err(Error::DimensionMismatch(format!(
                    "dictator {dictator} is not an agent of an election with n = {}",
                    params.n()
                )));
            }
            RuleKind::SerialDictatorship { order } => {
                let mut sorted = order.clone();
                sorted.sort_unstable();
                if sorted != (0..params.n()).collect::<Vec<_>>() {
                    return Err(Error::DimensionMismatch(format!(
                        "serial order {order:?} is not a permutation of the {} agents",
                        params.n()
                    )));
                }
            }
            RuleKind::Constant(c) => {
                Committee::new(*c, params)?;
            }
            RuleKind::Table(t) if t.params() != params => {
                return Err(Error::DimensionMismatch(format!(
                    "rule table is defined for {}, election has {params}",
                    t.params()
                )));
            }
            _ => {}
        }
        Ok(PreparedRule {
            kind: self.kind.clone(),
            params: *params,
            ordered: self.tie.sorted_committees(params)?,
        })
    }

    pub fn parse(s: &str) -> Result<Self> {
        let (head, arg) = match s.split_once(':') {
            Some((h, a)) => (h, Some(a)),
            None => (s, None),
        };
        let need = |what: &str| {
            arg.ok_or_else(|| Error::InvalidParams(format!("rule `{head}` needs {what}")))
        };
        let kind = match head {
            "minisum" => RuleKind::Minisum,
            "minimax" => RuleKind::Minimax,
            "kcompletion" => {
                let a = need("a dictator index")?;
                RuleKind::KCompletion {
                    dictator: a.parse().map_err(|_| {
                        Error::InvalidParams(format!("bad dictator index `{a}`"))
                    })?,
                }
            }
            "serial" => RuleKind::SerialDictatorship {
                order: parse_index_list(need("an agent order")?)?,
            },
            "constant" => {
                let bits = need("a committee bit-string")?;
                let set = AltSet::parse_bitstring(bits, bits.chars().count())
                    .map_err(Error::InvalidParams)?;
                RuleKind::Constant(set)
            }
            "table" => {
                let path = need("a file path")?;
                let text = std::fs::read_to_string(path)?;
                RuleKind::Table(Arc::new(crate::search::table::parse_rule_table(&text)?))
            }
            other => {
                return Err(Error::InvalidParams(format!("unknown rule `{other}`")));
            }
        };
        Ok(RuleSpec::new(kind))
    }
}

impl fmt::Display for RuleSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            RuleKind::Minisum => write!(f, "minisum")?,
            RuleKind::Minimax => write!(f, "minimax")?,
            RuleKind::KCompletion { dictator } => write!(f, "kcompletion:{dictator}")?,
            RuleKind::SerialDictatorship { order } => {
                write!(f, "serial:{}", order.iter().join(","))?
            }
            RuleKind::Constant(c) => {
                let m = 64 - c.bits().leading_zeros() as usize;
                write!(f, "constant:{}", c.to_bitstring(m.max(1)))?
            }
            RuleKind::Table(_) => write!(f, "table")?,
        }
        if self.tie != TieOrder::Canonical {
            write!(f, " [tie {}]", self.tie)?;
        }
        Ok(())
    }
}

pub(crate) fn parse_index_list(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParams(format!("`{t}` is not an index")))
        })
        .collect()
}

/// A rule bound to election sizes.
#[derive(Clone, Debug)]
pub struct PreparedRule {
    kind: RuleKind,
    params: ElectionParams,
    ordered: Vec<Committee>,
}

impl PreparedRule {
    pub fn params(&self) -> &ElectionParams {
        &self.params
    }

    /// Committees in tie order.
    pub fn committees(&self) -> &[Committee] {
        &self.ordered
    }

    /// Evaluates the rule on raw ballots (one per agent).
    pub fn apply(&self, ballots: &[AltSet]) -> Result<Committee> {
        if ballots.len() != self.params.n() {
            return Err(Error::DimensionMismatch(format!(
                "{} ballots for a rule prepared for n = {}",
                ballots.len(),
                self.params.n()
            )));
        }
        match &self.kind {
            RuleKind::Minisum => Ok(self.minisum(ballots)),
            RuleKind::Minimax => Ok(self.minimax(ballots)),
            RuleKind::KCompletion { dictator } => Ok(self.complete(ballots[*dictator])),
            RuleKind::SerialDictatorship { order } => Ok(self.serial(order, ballots)),
            RuleKind::Constant(c) => Ok(Committee::from_set(*c)),
            RuleKind::Table(t) => t.lookup(ballots),
        }
    }

    fn minisum(&self, ballots: &[AltSet]) -> Committee {
        let mut scores = vec![0usize; self.params.m()];
        for b in ballots {
            for a in b.iter() {
                scores[a] += 1;
            }
        }
        let total = |c: &Committee| c.set().iter().map(|a| scores[a]).sum::<usize>();
        first_extreme(&self.ordered, |c| std::cmp::Reverse(total(c)))
    }

    fn minimax(&self, ballots: &[AltSet]) -> Committee {
        first_extreme(&self.ordered, |c| distance_max(c.set(), ballots))
    }

    fn complete(&self, ballot: AltSet) -> Committee {
        let k = self.params.k();
        match ballot.len().cmp(&k) {
            Ordering::Equal => Committee::from_set(ballot),
            Ordering::Less => *self
                .ordered
                .iter()
                .find(|c| ballot.is_subset(c.set()))
                .expect("some committee contains a ballot smaller than k"),
            Ordering::Greater => *self
                .ordered
                .iter()
                .find(|c| c.set().is_subset(ballot))
                .expect("some committee lies inside a ballot larger than k"),
        }
    }

    fn serial(&self, order: &[usize], ballots: &[AltSet]) -> Committee {
        let mut pool: Vec<Committee> = self.ordered.clone();
        for &agent in order {
            let best = pool
                .iter()
                .map(|c| hamming(c.set(), ballots[agent]))
                .min()
                .expect("nonempty pool");
            pool.retain(|c| hamming(c.set(), ballots[agent]) == best);
            if pool.len() == 1 {
                break;
            }
        }
        pool[0]
    }
}

/// First committee (in the given order) minimizing `key`.
fn first_extreme<K: Ord>(ordered: &[Committee], key: impl Fn(&Committee) -> K) -> Committee {
    let mut best = ordered[0];
    let mut best_key = key(&best);
    for c in &ordered[1..] {
        let k = key(c);
        if k < best_key {
            best = *c;
            best_key = k;
        }
    }
    best
}

fn distance_max(c: AltSet, ballots: &[AltSet]) -> usize {
    ballots.iter().map(|&b| hamming(c, b)).max().unwrap_or(0)
}

/// Applies `rule` to `profile`.
pub fn apply_rule(rule: &RuleSpec, profile: &ApprovalProfile) -> Result<Committee> {
    rule.prepare(profile.params())?.apply(profile.ballots())
}

pub fn minisum(profile: &ApprovalProfile, tie: &TieOrder) -> Result<Committee> {
    apply_rule(&RuleSpec::minisum().with_tie(tie.clone()), profile)
}

pub fn minimax(profile: &ApprovalProfile, tie: &TieOrder) -> Result<Committee> {
    apply_rule(&RuleSpec::minimax().with_tie(tie.clone()), profile)
}

/// Largest Hamming distance from `c` to any ballot of `profile`.
pub fn max_distance(c: Committee, profile: &ApprovalProfile) -> usize {
    distance_max(c.set(), profile.ballots())
}

/// Total approval score of a committee.
pub fn approval_score(c: Committee, profile: &ApprovalProfile) -> usize {
    profile
        .ballots()
        .iter()
        .map(|b| b.intersection(c.set()).len())
        .sum()
}

pub fn k_completion(dictator: usize, tie: TieOrder) -> RuleSpec {
    RuleSpec::new(RuleKind::KCompletion { dictator }).with_tie(tie)
}

pub fn serial_dictatorship(order: Vec<usize>) -> RuleSpec {
    RuleSpec::new(RuleKind::SerialDictatorship { order })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AltSet {
        AltSet::from_indices(v.iter().copied())
    }

    fn profile(m: usize, k: usize, ballots: &[&[usize]]) -> ApprovalProfile {
        let p = ElectionParams::new(m, k, ballots.len()).unwrap();
        ApprovalProfile::new(p, ballots.iter().map(|b| set(b)).collect()).unwrap()
    }

    // Final-step profiles with x=0, y=1, z=2, D={3}.
    fn table1(first: &[usize]) -> ApprovalProfile {
        profile(
            4,
            2,
            &[first, &[0, 1, 3], &[0, 3], &[0, 1, 3], &[1, 3], &[0, 1, 3]],
        )
    }

    #[test]
    fn constant_ignores_input() {
        let rule = RuleSpec::constant(set(&[0, 1]));
        let p = profile(3, 2, &[&[2], &[0, 2]]);
        assert_eq!(apply_rule(&rule, &p).unwrap().set(), set(&[0, 1]));
    }

    #[test]
    fn minisum_examples() {
        let tie = TieOrder::Canonical;
        assert_eq!(minisum(&profile(3, 2, &[&[1usize, 2][..]; 3]), &tie).unwrap().set(), set(&[1, 2]));
        assert_eq!(minisum(&profile(3, 1, &[&[0], &[0], &[1]]), &tie).unwrap().set(), set(&[0]));
        assert_eq!(minisum(&profile(3, 1, &[&[0], &[1]]), &tie).unwrap().set(), set(&[0]));
        assert_eq!(minisum(&table1(&[0, 3]), &tie).unwrap().set(), set(&[0, 3]));
    }

    #[test]
    fn minimax_examples() {
        let tie = TieOrder::Canonical;
        let p = profile(4, 2, &[&[0usize, 3][..]; 3]);
        let c = minimax(&p, &tie).unwrap();
        assert_eq!(c.set(), set(&[0, 3]));
        assert_eq!(max_distance(c, &p), 0);
        let pxy = table1(&[0, 1, 3]);
        assert_eq!(max_distance(Committee::from_set(set(&[0, 3])), &pxy), 2);
        let single = profile(4, 2, &[&[1, 2, 3]]);
        let c = Committee::from_set(set(&[0, 1]));
        assert_eq!(max_distance(c, &single), hamming(c.set(), set(&[1, 2, 3])));
    }

    #[test]
    fn k_completion_examples() {
        let rule = k_completion(0, TieOrder::Canonical);
        assert_eq!(apply_rule(&rule, &profile(3, 1, &[&[2], &[0]])).unwrap().set(), set(&[2]));
        assert_eq!(apply_rule(&rule, &profile(3, 2, &[&[], &[2]])).unwrap().set(), set(&[0, 1]));
        assert_eq!(apply_rule(&rule, &profile(4, 2, &[&[2], &[]])).unwrap().set(), set(&[0, 2]));
        // Trimming {x,y}∪D with a priority order that favours D then x.
        let rule = k_completion(0, TieOrder::Priority(vec![3, 0, 1, 2]));
        assert_eq!(apply_rule(&rule, &table1(&[0, 1, 3])).unwrap().set(), set(&[0, 3]));
        let rule = k_completion(0, TieOrder::Priority(vec![3, 1, 0, 2]));
        assert_eq!(apply_rule(&rule, &table1(&[0, 1, 3])).unwrap().set(), set(&[1, 3]));
        assert!(apply_rule(&k_completion(7, TieOrder::Canonical), &table1(&[0])).is_err());
    }

    #[test]
    fn serial_dictatorship_examples() {
        let rule = serial_dictatorship(vec![0]);
        assert_eq!(apply_rule(&rule, &profile(3, 2, &[&[0, 2]])).unwrap().set(), set(&[0, 2]));
        let rule = serial_dictatorship(vec![0, 1]);
        assert_eq!(apply_rule(&rule, &profile(2, 1, &[&[0], &[1]])).unwrap().set(), set(&[0]));
        assert_eq!(
            apply_rule(&rule, &profile(3, 1, &[&[0, 1], &[1]])).unwrap().set(),
            set(&[1])
        );
        assert!(apply_rule(&serial_dictatorship(vec![0, 0]), &profile(3, 1, &[&[0], &[1]])).is_err());
    }

    #[test]
    fn priority_order_equals_canonical_for_identity() {
        let p = ElectionParams::new(5, 2, 1).unwrap();
        let a = TieOrder::Canonical.sorted_committees(&p).unwrap();
        let b = TieOrder::Priority(vec![0, 1, 2, 3, 4]).sorted_committees(&p).unwrap();
        assert_eq!(a, b);
        assert!(TieOrder::Priority(vec![0, 1]).sorted_committees(&p).is_err());
    }

    #[test]
    fn parse_rule_names() {
        assert!(matches!(RuleSpec::parse("minisum").unwrap().kind, RuleKind::Minisum));
        assert!(matches!(
            RuleSpec::parse("kcompletion:2").unwrap().kind,
            RuleKind::KCompletion { dictator: 2 }
        ));
        match RuleSpec::parse("serial:1,0").unwrap().kind {
            RuleKind::SerialDictatorship { order } => assert_eq!(order, vec![1, 0]),
            other => panic!("{other:?}"),
        }
        match RuleSpec::parse("constant:110").unwrap().kind {
            RuleKind::Constant(c) => assert_eq!(c, set(&[0, 1])),
            other => panic!("{other:?}"),
        }
        assert!(RuleSpec::parse("borda").is_err());
        assert!(RuleSpec::parse("kcompletion").is_err());
        assert_eq!(RuleSpec::parse("serial:0,1").unwrap().to_string(), "serial:0,1");
    }
}

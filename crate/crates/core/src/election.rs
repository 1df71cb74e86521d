//! Election primitives: alternative sets, committees, profiles and the
//! enumerated profile spaces that the checkers and the synthesizer walk.
//!
//! Alternatives are the integers `0..m`. A set of alternatives is a bit
//! vector in a `u64`, so `m` is limited to 64; the enumerating code paths
//! impose tighter limits of their own.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;

use crate::error::{Error, Result};

/// Largest `m` for which ballot spaces (all subsets) are enumerated.
pub const MAX_ENUM_ALTERNATIVES: usize = 16;

/// A subset of alternatives stored as a bit vector (bit `a` = alternative `a`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct AltSet(u64);

impl AltSet {
    pub const EMPTY: AltSet = AltSet(0);

    pub const fn from_bits(bits: u64) -> Self {
        AltSet(bits)
    }

    pub const fn bits(self) -> u64 {
        self.0
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(indices: I) -> Self {
        let mut bits = 0u64;
        for a in indices {
            assert!(a < 64, "alternative index {a} out of range");
            bits |= 1 << a;
        }
        AltSet(bits)
    }

    /// The set `{0, .., m-1}`.
    pub fn full(m: usize) -> Self {
        if m >= 64 {
            AltSet(u64::MAX)
        } else {
            AltSet((1u64 << m) - 1)
        }
    }

    pub fn contains(self, a: usize) -> bool {
        a < 64 && self.0 >> a & 1 == 1
    }

    pub fn with(self, a: usize) -> Self {
        AltSet(self.0 | 1 << a)
    }

    pub fn without(self, a: usize) -> Self {
        AltSet(self.0 & !(1 << a))
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn union(self, other: AltSet) -> AltSet {
        AltSet(self.0 | other.0)
    }

    pub fn intersection(self, other: AltSet) -> AltSet {
        AltSet(self.0 & other.0)
    }

    pub fn difference(self, other: AltSet) -> AltSet {
        AltSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: AltSet) -> bool {
        self.0 & !other.0 == 0
    }

    /// True when every member is below `m`.
    pub fn within(self, m: usize) -> bool {
        self.is_subset(AltSet::full(m))
    }

    /// Members in increasing index order.
    pub fn iter(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let a = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(a)
            }
        })
    }

    pub fn members(self) -> Vec<usize> {
        self.iter().collect()
    }

    /// Renders the set as `m` characters; character `a` is `1` iff `a` is a member.
    pub fn to_bitstring(self, m: usize) -> String {
        (0..m)
            .map(|a| if self.contains(a) { '1' } else { '0' })
            .collect()
    }

    /// Parses the format produced by [`AltSet::to_bitstring`]. The string must
    /// have exactly `m` characters from `{0,1}`.
    pub fn parse_bitstring(s: &str, m: usize) -> std::result::Result<AltSet, String> {
        if s.chars().count() != m {
            return Err(format!(
                "bit-string `{s}` has length {}, expected {m}",
                s.chars().count()
            ));
        }
        let mut set = AltSet::EMPTY;
        for (a, c) in s.chars().enumerate() {
            match c {
                '1' => set = set.with(a),
                '0' => {}
                other => return Err(format!("bit-string `{s}` contains `{other}`")),
            }
        }
        Ok(set)
    }
}

impl fmt::Debug for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AltSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.iter().join(","))
    }
}

/// Hamming distance between two sets: `|q \ t| + |t \ q|`.
pub fn hamming(q: AltSet, t: AltSet) -> usize {
    (q.0 ^ t.0).count_ones() as usize
}

/// Sizes of an approval election: `m` alternatives, committees of size `k`,
/// `n` agents.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ElectionParams {
    m: usize,
    k: usize,
    n: usize,
}

impl ElectionParams {
    pub fn new(m: usize, k: usize, n: usize) -> Result<Self> {
        if m == 0 || m > 64 {
            return Err(Error::InvalidParams(format!("m = {m} must be in 1..=64")));
        }
        if k == 0 || k > m {
            return Err(Error::InvalidParams(format!("k = {k} must be in 1..={m}")));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        Ok(ElectionParams { m, k, n })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        ElectionParams::new(self.m, self.k, n)
    }
}

impl fmt::Display for ElectionParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "m={} k={} n={}", self.m, self.k, self.n)
    }
}

/// A set of exactly `k` alternatives.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Committee(AltSet);

impl Committee {
    pub fn new(set: AltSet, params: &ElectionParams) -> Result<Self> {
        if !set.within(params.m()) {
            return Err(Error::DimensionMismatch(format!(
                "committee {set} indexes alternatives outside 0..{}",
                params.m()
            )));
        }
        if set.len() != params.k() {
            return Err(Error::DimensionMismatch(format!(
                "committee {set} has {} members, expected k = {}",
                set.len(),
                params.k()
            )));
        }
        Ok(Committee(set))
    }

    /// Wraps a set whose size has already been checked by the caller.
    pub(crate) fn from_set(set: AltSet) -> Self {
        Committee(set)
    }

    pub fn set(self) -> AltSet {
        self.0
    }

    pub fn contains(self, a: usize) -> bool {
        self.0.contains(a)
    }

    pub fn to_bitstring(self, m: usize) -> String {
        self.0.to_bitstring(m)
    }
}

impl fmt::Debug for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for Committee {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Compares two committees by their sorted member lists.
pub fn lex_cmp(a: AltSet, b: AltSet) -> std::cmp::Ordering {
    a.iter().cmp(b.iter())
}

/// All `k`-subsets of `0..m`, lexicographic by sorted member list.
pub fn enumerate_committees(params: &ElectionParams) -> Vec<Committee> {
    (0..params.m())
        .combinations(params.k())
        .map(|c| Committee(AltSet::from_indices(c)))
        .collect()
}

/// Which ballots a ballot space contains.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum BallotRestriction {
    #[default]
    All,
    Nonempty,
    /// Neither empty nor the full set.
    ProperNonempty,
    /// At most this many approvals (budget-feasible ballots).
    AtMost(usize),
}

impl BallotRestriction {
    pub fn admits(self, ballot: AltSet, m: usize) -> bool {
        match self {
            BallotRestriction::All => true,
            BallotRestriction::Nonempty => !ballot.is_empty(),
            BallotRestriction::ProperNonempty => !ballot.is_empty() && ballot != AltSet::full(m),
            BallotRestriction::AtMost(cap) => ballot.len() <= cap,
        }
    }

    pub fn name(self) -> String {
        match self {
            BallotRestriction::All => "all".into(),
            BallotRestriction::Nonempty => "nonempty".into(),
            BallotRestriction::ProperNonempty => "proper".into(),
            BallotRestriction::AtMost(cap) => format!("atmost:{cap}"),
        }
    }

    /// Parses `all`, `nonempty`, `proper` or `atmost:<count>`.
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "all" => Some(BallotRestriction::All),
            "nonempty" => Some(BallotRestriction::Nonempty),
            "proper" | "proper-nonempty" => Some(BallotRestriction::ProperNonempty),
            _ => s
                .strip_prefix("atmost:")
                .and_then(|c| c.parse().ok())
                .map(BallotRestriction::AtMost),
        }
    }
}

/// All ballots over `m` alternatives admitted by `restriction`, ordered by
/// their bit-vector value.
pub fn enumerate_ballot_space(m: usize, restriction: BallotRestriction) -> Result<Vec<AltSet>> {
    if m == 0 || m > MAX_ENUM_ALTERNATIVES {
        return Err(Error::InvalidParams(format!(
            "ballot spaces are enumerated only for 1 <= m <= {MAX_ENUM_ALTERNATIVES}, got {m}"
        )));
    }
    Ok((0..1u64 << m)
        .map(AltSet)
        .filter(|&b| restriction.admits(b, m))
        .collect())
}

/// An approval profile: one ballot per agent.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ApprovalProfile {
    params: ElectionParams,
    ballots: Vec<AltSet>,
}

impl ApprovalProfile {
    pub fn new(params: ElectionParams, ballots: Vec<AltSet>) -> Result<Self> {
        if ballots.len() != params.n() {
            return Err(Error::DimensionMismatch(format!(
                "profile has {} ballots, expected n = {}",
                ballots.len(),
                params.n()
            )));
        }
        if let Some((i, b)) = ballots.iter().enumerate().find(|(_, b)| !b.within(params.m())) {
            return Err(Error::DimensionMismatch(format!(
                "ballot {b} of agent {i} indexes alternatives outside 0..{}",
                params.m()
            )));
        }
        Ok(ApprovalProfile { params, ballots })
    }

    /// Every agent approves exactly `set`.
    pub fn unanimous(params: ElectionParams, set: AltSet) -> Result<Self> {
        ApprovalProfile::new(params, vec![set; params.n()])
    }

    pub fn params(&self) -> &ElectionParams {
        &self.params
    }

    pub fn ballots(&self) -> &[AltSet] {
        &self.ballots
    }

    pub fn ballot(&self, agent: usize) -> AltSet {
        self.ballots[agent]
    }

    /// The profile with `agent`'s ballot replaced.
    pub fn with_ballot(&self, agent: usize, ballot: AltSet) -> Result<Self> {
        let mut ballots = self.ballots.clone();
        if agent >= ballots.len() {
            return Err(Error::DimensionMismatch(format!("no agent {agent}")));
        }
        ballots[agent] = ballot;
        ApprovalProfile::new(self.params, ballots)
    }

    /// The common ballot when all agents report the same set.
    pub fn common_ballot(&self) -> Option<AltSet> {
        let first = self.ballots[0];
        self.ballots.iter().all(|&b| b == first).then_some(first)
    }
}

/// A strict ranking of `0..m`, most preferred first.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Ranking {
    order: Vec<usize>,
    position: Vec<usize>,
}

impl Ranking {
    pub fn new(order: Vec<usize>) -> Result<Self> {
        let m = order.len();
        let mut position = vec![usize::MAX; m];
        for (pos, &a) in order.iter().enumerate() {
            if a >= m || position[a] != usize::MAX {
                return Err(Error::InvalidParams(format!(
                    "{order:?} is not a permutation of 0..{m}"
                )));
            }
            position[a] = pos;
        }
        Ok(Ranking { order, position })
    }

    pub fn m(&self) -> usize {
        self.order.len()
    }

    pub fn order(&self) -> &[usize] {
        &self.order
    }

    pub fn top(&self) -> usize {
        self.order[0]
    }

    /// 0-based position of `a` (0 = most preferred).
    pub fn position(&self, a: usize) -> usize {
        self.position[a]
    }

    pub fn prefers(&self, a: usize, b: usize) -> bool {
        self.position[a] < self.position[b]
    }

    /// The `j` most preferred alternatives.
    pub fn top_set(&self, j: usize) -> AltSet {
        AltSet::from_indices(self.order[..j].iter().copied())
    }
}

impl fmt::Debug for Ranking {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.order.iter().join(">"))
    }
}

/// A profile of strict rankings over `m` alternatives.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RankingProfile {
    m: usize,
    rankings: Vec<Ranking>,
}

impl RankingProfile {
    pub fn new(m: usize, rankings: Vec<Ranking>) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidParams("m must be at least 1".into()));
        }
        if rankings.is_empty() {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if let Some(r) = rankings.iter().find(|r| r.m() != m) {
            return Err(Error::DimensionMismatch(format!(
                "ranking {r:?} does not cover exactly {m} alternatives"
            )));
        }
        Ok(RankingProfile { m, rankings })
    }

    pub fn from_orders(m: usize, orders: &[&[usize]]) -> Result<Self> {
        let rankings = orders
            .iter()
            .map(|o| Ranking::new(o.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        RankingProfile::new(m, rankings)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.rankings.len()
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub fn ranking(&self, agent: usize) -> &Ranking {
        &self.rankings[agent]
    }

    pub fn with_ranking(&self, agent: usize, ranking: Ranking) -> Self {
        let mut rankings = self.rankings.clone();
        rankings[agent] = ranking;
        RankingProfile {
            m: self.m,
            rankings,
        }
    }
}

/// Mixed-radix indexing of `n`-tuples over `base` symbols; agent 0 is the
/// most significant digit.
#[derive(Clone, Debug)]
pub(crate) struct Radix {
    base: usize,
    strides: Vec<u64>,
    len: u64,
}

impl Radix {
    fn new(base: usize, n: usize) -> Result<Self> {
        let mut strides = vec![0u64; n];
        let mut acc: u64 = 1;
        for i in (0..n).rev() {
            strides[i] = acc;
            acc = acc.checked_mul(base as u64).ok_or_else(|| Error::CapExceeded {
                needed: (base as u128).saturating_pow(n as u32),
                cap: u64::MAX,
            })?;
        }
        Ok(Radix {
            base,
            strides,
            len: acc,
        })
    }

    #[inline]
    pub(crate) fn digit(&self, index: u64, agent: usize) -> usize {
        ((index / self.strides[agent]) % self.base as u64) as usize
    }

    #[inline]
    pub(crate) fn stride(&self, agent: usize) -> u64 {
        self.strides[agent]
    }
}

/// Every approval profile whose ballots all come from a restricted ballot
/// space, in a fixed canonical order (agent 0 most significant, ballots
/// ordered as in [`enumerate_ballot_space`]).
#[derive(Clone, Debug)]
pub struct ProfileSpace {
    params: ElectionParams,
    restriction: BallotRestriction,
    ballots: Vec<AltSet>,
    lookup: Vec<u32>,
    radix: Radix,
}

impl ProfileSpace {
    pub fn new(params: ElectionParams, restriction: BallotRestriction) -> Result<Self> {
        let ballots = enumerate_ballot_space(params.m(), restriction)?;
        let mut lookup = vec![u32::MAX; 1 << params.m()];
        for (i, b) in ballots.iter().enumerate() {
            lookup[b.bits() as usize] = i as u32;
        }
        let radix = Radix::new(ballots.len(), params.n())?;
        Ok(ProfileSpace {
            params,
            restriction,
            ballots,
            lookup,
            radix,
        })
    }

    pub fn params(&self) -> &ElectionParams {
        &self.params
    }

    pub fn restriction(&self) -> BallotRestriction {
        self.restriction
    }

    /// Number of profiles.
    pub fn len(&self) -> u64 {
        self.radix.len
    }

    pub fn is_empty(&self) -> bool {
        self.radix.len == 0
    }

    pub fn ballots(&self) -> &[AltSet] {
        &self.ballots
    }

    pub fn ballot_index(&self, ballot: AltSet) -> Option<usize> {
        if !ballot.within(self.params.m()) {
            return None;
        }
        match self.lookup[ballot.bits() as usize] {
            u32::MAX => None,
            i => Some(i as usize),
        }
    }

    pub(crate) fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn ballot_of(&self, index: u64, agent: usize) -> AltSet {
        self.ballots[self.radix.digit(index, agent)]
    }

    pub fn ballots_of(&self, index: u64) -> Vec<AltSet> {
        (0..self.params.n())
            .map(|i| self.ballot_of(index, i))
            .collect()
    }

    pub fn profile(&self, index: u64) -> ApprovalProfile {
        ApprovalProfile {
            params: self.params,
            ballots: self.ballots_of(index),
        }
    }

    pub fn index_of(&self, ballots: &[AltSet]) -> Option<u64> {
        if ballots.len() != self.params.n() {
            return None;
        }
        let mut idx = 0u64;
        for (agent, &b) in ballots.iter().enumerate() {
            idx += self.ballot_index(b)? as u64 * self.radix.stride(agent);
        }
        Some(idx)
    }

    /// Index of the profile obtained by giving `agent` ballot number `ballot`.
    pub fn replace(&self, index: u64, agent: usize, ballot: usize) -> u64 {
        let s = self.radix.stride(agent);
        let cur = self.radix.digit(index, agent) as u64;
        index - cur * s + ballot as u64 * s
    }
}

/// All permutations of `0..m` in lexicographic order.
pub fn enumerate_rankings(m: usize) -> Vec<Ranking> {
    (0..m)
        .permutations(m)
        .map(|p| Ranking::new(p).expect("permutation"))
        .collect()
}

/// Every ranking profile over `m` alternatives and `n` agents, agent 0 most
/// significant, rankings in lexicographic order.
#[derive(Clone, Debug)]
pub struct RankingSpace {
    m: usize,
    n: usize,
    rankings: Vec<Ranking>,
    lookup: HashMap<Vec<usize>, usize>,
    radix: Radix,
}

impl RankingSpace {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m == 0 || m > 8 {
            return Err(Error::InvalidParams(format!(
                "ranking spaces are enumerated only for 1 <= m <= 8, got {m}"
            )));
        }
        if n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        let rankings = enumerate_rankings(m);
        let lookup = rankings
            .iter()
            .enumerate()
            .map(|(i, r)| (r.order().to_vec(), i))
            .collect();
        let radix = Radix::new(rankings.len(), n)?;
        Ok(RankingSpace {
            m,
            n,
            rankings,
            lookup,
            radix,
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> u64 {
        self.radix.len
    }

    pub fn is_empty(&self) -> bool {
        self.radix.len == 0
    }

    pub fn rankings(&self) -> &[Ranking] {
        &self.rankings
    }

    pub(crate) fn radix(&self) -> &Radix {
        &self.radix
    }

    pub fn ranking_of(&self, index: u64, agent: usize) -> &Ranking {
        &self.rankings[self.radix.digit(index, agent)]
    }

    pub fn profile(&self, index: u64) -> RankingProfile {
        RankingProfile {
            m: self.m,
            rankings: (0..self.n)
                .map(|i| self.ranking_of(index, i).clone())
                .collect(),
        }
    }

    pub fn ranking_index(&self, ranking: &Ranking) -> Option<usize> {
        self.lookup.get(ranking.order()).copied()
    }

    pub fn index_of(&self, profile: &RankingProfile) -> Option<u64> {
        if profile.n() != self.n || profile.m() != self.m {
            return None;
        }
        let mut idx = 0u64;
        for (agent, r) in profile.rankings().iter().enumerate() {
            idx += self.ranking_index(r)? as u64 * self.radix.stride(agent);
        }
        Some(idx)
    }

    pub fn replace(&self, index: u64, agent: usize, ranking: usize) -> u64 {
        let s = self.radix.stride(agent);
        let cur = self.radix.digit(index, agent) as u64;
        index - cur * s + ranking as u64 * s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> AltSet {
        AltSet::from_indices(v.iter().copied())
    }

    #[test]
    fn hamming_examples() {
        // x=0, y=1, D={3}
        assert_eq!(hamming(set(&[0]), set(&[0])), 0);
        assert_eq!(hamming(set(&[0, 1, 3]), set(&[0, 3])), 1);
        assert_eq!(hamming(set(&[0, 3]), set(&[1, 3])), 2);
        assert_eq!(hamming(AltSet::EMPTY, set(&[2, 4, 5])), 3);
    }

    #[test]
    fn committees_in_lex_order() {
        let p = ElectionParams::new(3, 3, 1).unwrap();
        assert_eq!(enumerate_committees(&p).len(), 1);
        let p = ElectionParams::new(3, 1, 1).unwrap();
        let c: Vec<_> = enumerate_committees(&p).iter().map(|c| c.set()).collect();
        assert_eq!(c, vec![set(&[0]), set(&[1]), set(&[2])]);
        let p = ElectionParams::new(4, 2, 1).unwrap();
        let c = enumerate_committees(&p);
        assert_eq!(c.len(), 6);
        assert_eq!(c[0].set(), set(&[0, 1]));
        assert_eq!(c[5].set(), set(&[2, 3]));
        assert!(c
            .windows(2)
            .all(|w| lex_cmp(w[0].set(), w[1].set()).is_lt()));
    }

    #[test]
    fn ballot_space_sizes() {
        assert_eq!(enumerate_ballot_space(2, BallotRestriction::All).unwrap().len(), 4);
        assert_eq!(enumerate_ballot_space(3, BallotRestriction::Nonempty).unwrap().len(), 7);
        assert_eq!(
            enumerate_ballot_space(3, BallotRestriction::ProperNonempty)
                .unwrap()
                .len(),
            6
        );
    }

    #[test]
    fn params_reject_bad_k() {
        assert!(ElectionParams::new(3, 0, 1).is_err());
        assert!(ElectionParams::new(3, 4, 1).is_err());
        assert!(ElectionParams::new(3, 2, 0).is_err());
    }

    #[test]
    fn committee_checks_size() {
        let p = ElectionParams::new(3, 2, 1).unwrap();
        assert!(Committee::new(set(&[0, 1]), &p).is_ok());
        assert!(Committee::new(set(&[0]), &p).is_err());
        assert!(Committee::new(set(&[0, 5]), &p).is_err());
    }

    #[test]
    fn profile_space_indexing_round_trips() {
        let p = ElectionParams::new(3, 1, 3).unwrap();
        let space = ProfileSpace::new(p, BallotRestriction::Nonempty).unwrap();
        assert_eq!(space.len(), 343);
        for idx in [0u64, 1, 48, 342] {
            let b = space.ballots_of(idx);
            assert_eq!(space.index_of(&b), Some(idx));
        }
        let idx = space.replace(0, 1, 4);
        assert_eq!(space.ballot_of(idx, 1), space.ballots()[4]);
        assert_eq!(space.ballot_of(idx, 0), space.ballots()[0]);
        assert_eq!(space.index_of(&[AltSet::EMPTY; 3]), None);
    }

    #[test]
    fn rankings_enumerated() {
        let space = RankingSpace::new(3, 2).unwrap();
        assert_eq!(space.len(), 36);
        assert_eq!(space.rankings()[0].order(), &[0, 1, 2]);
        let prof = space.profile(35);
        assert_eq!(space.index_of(&prof), Some(35));
        assert!(Ranking::new(vec![0, 0, 1]).is_err());
    }

    #[test]
    fn bitstrings() {
        assert_eq!(set(&[0, 2]).to_bitstring(3), "101");
        assert_eq!(AltSet::parse_bitstring("101", 3).unwrap(), set(&[0, 2]));
        assert!(AltSet::parse_bitstring("10", 3).is_err());
        assert!(AltSet::parse_bitstring("1x1", 3).is_err());
    }
}

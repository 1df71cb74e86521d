//! Facility location on the `m`-dimensional hypercube. Nodes are subsets of
//! the coordinates, shortest paths have Hamming length, and restricting the
//! facility to nodes with exactly `k` ones turns the problem into committee
//! selection.

use crate::approx::ExtRatio;
use crate::axioms::{check_unanimity, Witness};
use crate::election::{hamming, AltSet, ApprovalProfile, ElectionParams};
use crate::error::{parse_err, Error, Result};
use crate::format::{content_lines, parse_usizes};
use crate::rules::{apply_rule, RuleSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Allowable {
    /// Nodes with exactly `k` ones.
    Weight(usize),
    /// Every node.
    All,
}

impl Allowable {
    pub fn admits(self, node: AltSet) -> bool {
        match self {
            Allowable::Weight(k) => node.len() == k,
            Allowable::All => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacilityInstance {
    pub dimension: usize,
    pub allowable: Allowable,
    pub agents: Vec<AltSet>,
}

impl FacilityInstance {
    pub fn new(dimension: usize, allowable: Allowable, agents: Vec<AltSet>) -> Result<Self> {
        if dimension == 0 || dimension > 63 {
            return Err(Error::InvalidParams(format!("dimension {dimension} out of range")));
        }
        if let Allowable::Weight(k) = allowable {
            if k == 0 || k > dimension {
                return Err(Error::InvalidParams(format!("weight {k} out of range")));
            }
        }
        if agents.is_empty() {
            return Err(Error::InvalidParams("at least one agent is required".into()));
        }
        if let Some(a) = agents.iter().find(|a| !a.within(dimension)) {
            return Err(Error::InvalidParams(format!("node {a} outside the {dimension}-cube")));
        }
        Ok(FacilityInstance {
            dimension,
            allowable,
            agents,
        })
    }

    pub fn to_profile(&self) -> Result<ApprovalProfile> {
        let Allowable::Weight(k) = self.allowable else {
            return Err(Error::InvalidParams(
                "only weight-restricted instances correspond to committee elections".into(),
            ));
        };
        ApprovalProfile::new(ElectionParams::new(self.dimension, k, self.agents.len())?, self.agents.clone())
    }

    fn nodes(&self) -> impl Iterator<Item = AltSet> + '_ {
        (0..1u64 << self.dimension)
            .map(AltSet::from_bits)
            .filter(|&v| self.allowable.admits(v))
    }

    /// Optimal (max cost, total cost) over allowable nodes, each minimized separately.
    pub fn optimal_costs(&self) -> (usize, usize) {
        self.nodes()
            .map(|v| costs_at(&self.agents, v))
            .fold((usize::MAX, usize::MAX), |(a, b), (c, d)| (a.min(c), b.min(d)))
    }
}

fn costs_at(agents: &[AltSet], node: AltSet) -> (usize, usize) {
    agents.iter().fold((0, 0), |(mx, tot), &a| {
        let d = hamming(a, node);
        (mx.max(d), tot + d)
    })
}

/// Maximum and total shortest-path distance from the agents to `node`.
pub fn facility_costs(inst: &FacilityInstance, node: AltSet) -> Result<(usize, usize)> {
    if !node.within(inst.dimension) || !inst.allowable.admits(node) {
        return Err(Error::NotAllowable(format!("node {node} is not an allowable location")));
    }
    Ok(costs_at(&inst.agents, node))
}

#[derive(Clone, Debug)]
pub struct FacilityMechanism {
    pub rule: RuleSpec,
}

pub fn facility_adapter(rule: RuleSpec) -> FacilityMechanism {
    FacilityMechanism { rule }
}

/// All agents sit on one allowable node, yet the mechanism places the
/// facility elsewhere: optimum 0, positive cost under both objectives.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FacilityCertificate {
    pub instance: FacilityInstance,
    pub location: AltSet,
    pub max_cost: usize,
    pub total_cost: usize,
}

impl FacilityCertificate {
    pub fn replay(&self, rule: &RuleSpec) -> std::result::Result<(), String> {
        let got = facility_adapter(rule.clone())
            .locate(&self.instance)
            .map_err(|e| e.to_string())?;
        if got != self.location {
            return Err(format!("mechanism places {got}, certificate says {}", self.location));
        }
        let costs = facility_costs(&self.instance, got).map_err(|e| e.to_string())?;
        if costs != (self.max_cost, self.total_cost) {
            return Err("costs do not match".into());
        }
        if self.instance.optimal_costs() != (0, 0) || self.max_cost == 0 || self.total_cost == 0 {
            return Err("certificate does not separate the mechanism from the optimum".into());
        }
        Ok(())
    }
}

impl FacilityMechanism {
    pub fn locate(&self, inst: &FacilityInstance) -> Result<AltSet> {
        Ok(apply_rule(&self.rule, &inst.to_profile()?)?.set())
    }

    /// A zero-optimum instance the mechanism gets wrong, if the rule is not unanimous.
    pub fn infinite_ratio_certificate(&self, dimension: usize, k: usize, n: usize) -> Result<Option<FacilityCertificate>> {
        let params = ElectionParams::new(dimension, k, n)?;
        let Some(Witness::Unanimity { profile, outcome }) = check_unanimity(&self.rule, &params)?.witness else {
            return Ok(None);
        };
        let instance = FacilityInstance::new(dimension, Allowable::Weight(k), profile.ballots().to_vec())?;
        let (max_cost, total_cost) = facility_costs(&instance, outcome.set())?;
        Ok(Some(FacilityCertificate {
            instance,
            location: outcome.set(),
            max_cost,
            total_cost,
        }))
    }
}

/// Worst-case ratios of placing the facility at agent `dictator`'s node when
/// every node is allowable, over all instances with `n` agents.
pub fn dictatorship_ratios(dimension: usize, n: usize, dictator: usize) -> Result<(ExtRatio, ExtRatio)> {
    if dictator >= n {
        return Err(Error::InvalidParams(format!("dictator {dictator} is not one of {n} agents")));
    }
    let nodes = 1u64 << dimension;
    let total = nodes
        .checked_pow(n as u32)
        .filter(|&t| t <= 1 << 24)
        .ok_or_else(|| Error::CapExceeded {
            needed: (nodes as u128).saturating_pow(n as u32),
            cap: 1 << 24,
        })?;
    let mut worst = (ExtRatio::of(0, 0), ExtRatio::of(0, 0));
    let mut agents = vec![AltSet::EMPTY; n];
    for idx in 0..total {
        let mut rest = idx;
        for a in agents.iter_mut().rev() {
            *a = AltSet::from_bits(rest % nodes);
            rest /= nodes;
        }
        let inst = FacilityInstance::new(dimension, Allowable::All, agents.clone())?;
        let (opt_max, opt_total) = inst.optimal_costs();
        let (mx, tot) = costs_at(&agents, agents[dictator]);
        worst.0 = worst.0.max(ExtRatio::of(mx, opt_max));
        worst.1 = worst.1.max(ExtRatio::of(tot, opt_total));
    }
    Ok(worst)
}

/// Parses `m k n` followed by `n` node bit-strings.
pub fn parse_facility_instance(text: &str) -> Result<FacilityInstance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty facility file"))?;
    let v = parse_usizes(hl, header, 3)?;
    let (m, k, n) = (v[0], v[1], v[2]);
    let mut agents = Vec::with_capacity(n);
    let mut last = hl;
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(last + 1, format!("expected {n} agent nodes")))?;
        last = ln;
        agents.push(AltSet::parse_bitstring(line, m).map_err(|e| parse_err(ln, e))?);
    }
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected trailing content"));
    }
    FacilityInstance::new(m, Allowable::Weight(k), agents).map_err(|e| parse_err(hl, e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::VecDeque;

    fn bfs(m: usize, from: u64) -> Vec<usize> {
        let mut dist = vec![usize::MAX; 1 << m];
        dist[from as usize] = 0;
        let mut q = VecDeque::from([from]);
        while let Some(v) = q.pop_front() {
            for i in 0..m {
                let w = v ^ 1 << i;
                if dist[w as usize] == usize::MAX {
                    dist[w as usize] = dist[v as usize] + 1;
                    q.push_back(w);
                }
            }
        }
        dist
    }

    #[test]
    fn path_length_is_hamming() {
        for m in 1..=6 {
            for from in 0..1u64 << m {
                let d = bfs(m, from);
                for to in 0..1u64 << m {
                    assert_eq!(d[to as usize], hamming(AltSet::from_bits(from), AltSet::from_bits(to)));
                }
            }
        }
    }

    #[test]
    fn costs_and_allowability() {
        let inst = FacilityInstance::new(3, Allowable::Weight(1), vec![AltSet::from_indices([0]); 2]).unwrap();
        assert_eq!(facility_costs(&inst, AltSet::from_indices([0])).unwrap(), (0, 0));
        assert_eq!(facility_costs(&inst, AltSet::from_indices([2])).unwrap(), (2, 4));
        assert!(matches!(
            facility_costs(&inst, AltSet::from_indices([0, 1])),
            Err(Error::NotAllowable(_))
        ));
        assert_eq!(facility_adapter(RuleSpec::minisum()).locate(&inst).unwrap(), AltSet::from_indices([0]));
    }

    #[test]
    fn constant_rule_certificate() {
        let rule = RuleSpec::constant(AltSet::from_indices([0, 1]));
        let cert = facility_adapter(rule.clone()).infinite_ratio_certificate(4, 2, 3).unwrap().unwrap();
        cert.replay(&rule).unwrap();
    }

    #[test]
    fn unrestricted_dictatorship_is_finite() {
        let (mx, tot) = dictatorship_ratios(3, 2, 0).unwrap();
        assert!(mx.is_finite() && tot.is_finite());
        assert_eq!(mx, ExtRatio::of(2, 1));
    }

    #[test]
    fn file_format() {
        let inst = parse_facility_instance("# cube\n3 1 2\n100\n001\n").unwrap();
        assert_eq!(inst.agents[1], AltSet::from_indices([2]));
        assert!(matches!(parse_facility_instance("3 1 2\n100\n0012\n"), Err(Error::Parse { line: 3, .. })));
    }
}

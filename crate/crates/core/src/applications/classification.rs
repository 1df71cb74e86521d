//! Binary classification with shared inputs. Points are alternatives, a
//! classifier labelling exactly `k` points positive is a committee, and an
//! agent's labelling is the ballot of its positive points. An agent's loss is
//! then the Hamming distance between classifier and ballot.

use std::str::FromStr;

use num_rational::Ratio;

use crate::axioms::{check_unanimity, Witness};
use crate::election::{hamming, AltSet, ApprovalProfile, Committee, ElectionParams};
use crate::error::{parse_err, Error, Result};
use crate::format::{content_lines, parse_usizes};
use crate::rules::{apply_rule, RuleSpec, TieOrder};

pub type Weight = Ratio<u64>;

/// Positive points of a labelling (`true` = `+`).
pub fn positive_set(labels: &[bool]) -> AltSet {
    AltSet::from_indices(labels.iter().enumerate().filter(|(_, &l)| l).map(|(i, _)| i))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationInstance {
    points: usize,
    k: usize,
    labelings: Vec<Vec<bool>>,
    weights: Vec<Weight>,
    /// Reject labellings that no classifier realizes.
    pub realizable_only: bool,
}

impl ClassificationInstance {
    pub fn new(points: usize, k: usize, labelings: Vec<Vec<bool>>, weights: Vec<Weight>) -> Result<Self> {
        ElectionParams::new(points, k, labelings.len().max(1))?;
        if labelings.is_empty() {
            return Err(Error::InvalidParams("at least one agent is required".into()));
        }
        if let Some(l) = labelings.iter().find(|l| l.len() != points) {
            return Err(Error::DimensionMismatch(format!(
                "labelling of length {} for {points} points",
                l.len()
            )));
        }
        if weights.len() != labelings.len() {
            return Err(Error::InvalidWeights(format!(
                "{} weights for {} agents",
                weights.len(),
                labelings.len()
            )));
        }
        if weights.iter().any(|w| *w == Ratio::from_integer(0)) {
            return Err(Error::InvalidWeights("weights must be positive".into()));
        }
        let total: Weight = weights.iter().sum();
        if total != Ratio::from_integer(1) {
            return Err(Error::InvalidWeights(format!("weights sum to {total}, not 1")));
        }
        Ok(ClassificationInstance {
            points,
            k,
            labelings,
            weights,
            realizable_only: false,
        })
    }

    pub fn with_equal_weights(points: usize, k: usize, labelings: Vec<Vec<bool>>) -> Result<Self> {
        let n = labelings.len().max(1) as u64;
        let w = vec![Ratio::new(1, n); labelings.len()];
        Self::new(points, k, labelings, w)
    }

    pub fn from_profile(profile: &ApprovalProfile) -> Result<Self> {
        let p = profile.params();
        let labelings = profile
            .ballots()
            .iter()
            .map(|b| (0..p.m()).map(|i| b.contains(i)).collect())
            .collect();
        Self::with_equal_weights(p.m(), p.k(), labelings)
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn labelings(&self) -> &[Vec<bool>] {
        &self.labelings
    }

    pub fn weights(&self) -> &[Weight] {
        &self.weights
    }

    pub fn params(&self) -> ElectionParams {
        ElectionParams::new(self.points, self.k, self.labelings.len()).expect("validated")
    }

    /// Every labelling has exactly `k` positive points.
    pub fn is_realizable(&self) -> bool {
        self.labelings.iter().all(|l| positive_set(l).len() == self.k)
    }

    pub fn to_profile(&self) -> Result<ApprovalProfile> {
        ApprovalProfile::new(self.params(), self.labelings.iter().map(|l| positive_set(l)).collect())
    }
}

/// Points where classifier `h` and labelling `y` disagree.
pub fn agent_loss(h: AltSet, y: &[bool]) -> usize {
    hamming(h, positive_set(y))
}

/// Weighted sum of agent losses.
pub fn global_risk(h: AltSet, inst: &ClassificationInstance) -> Weight {
    inst.labelings
        .iter()
        .zip(&inst.weights)
        .map(|(y, w)| w * agent_loss(h, y) as u64)
        .sum()
}

/// A risk-minimizing classifier; among minimizers the first in `tie`.
pub fn erm(inst: &ClassificationInstance, tie: &TieOrder) -> Result<Committee> {
    let committees = tie.sorted_committees(&inst.params())?;
    let mut best = committees[0];
    let mut best_risk = global_risk(best.set(), inst);
    for &c in &committees[1..] {
        let r = global_risk(c.set(), inst);
        if r < best_risk {
            best = c;
            best_risk = r;
        }
    }
    Ok(best)
}

/// A multi-winner rule used as a classification mechanism. Weights are not
/// passed to the rule.
#[derive(Clone, Debug)]
pub struct ClassificationMechanism {
    pub rule: RuleSpec,
}

pub fn classification_adapter(rule: RuleSpec) -> ClassificationMechanism {
    ClassificationMechanism { rule }
}

/// A dataset on which the mechanism has positive risk while ERM has none.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationCertificate {
    pub dataset: ClassificationInstance,
    pub classifier: Committee,
    pub mechanism_risk: Weight,
    pub erm_risk: Weight,
}

impl ClassificationCertificate {
    pub fn replay(&self, rule: &RuleSpec) -> std::result::Result<(), String> {
        let got = classification_adapter(rule.clone())
            .classify(&self.dataset)
            .map_err(|e| e.to_string())?;
        if got != self.classifier {
            return Err(format!("mechanism returns {got}, certificate says {}", self.classifier));
        }
        let risk = global_risk(got.set(), &self.dataset);
        let best = erm(&self.dataset, &TieOrder::Canonical).map_err(|e| e.to_string())?;
        let erm_risk = global_risk(best.set(), &self.dataset);
        if risk != self.mechanism_risk || erm_risk != self.erm_risk {
            return Err("risks do not match".into());
        }
        if erm_risk != Ratio::from_integer(0) || risk == Ratio::from_integer(0) {
            return Err("certificate does not separate the mechanism from ERM".into());
        }
        Ok(())
    }
}

impl ClassificationMechanism {
    pub fn classify(&self, inst: &ClassificationInstance) -> Result<Committee> {
        if inst.realizable_only && !inst.is_realizable() {
            return Err(Error::NotAllowable(format!(
                "dataset has a labelling without exactly {} positive points",
                inst.k
            )));
        }
        apply_rule(&self.rule, &inst.to_profile()?)
    }

    /// If the rule is not unanimous, the dataset where every agent reports
    /// the missed committee, with equal weights.
    pub fn infinite_ratio_certificate(&self, points: usize, k: usize, n: usize) -> Result<Option<ClassificationCertificate>> {
        let params = ElectionParams::new(points, k, n)?;
        let Some(Witness::Unanimity { profile, outcome }) = check_unanimity(&self.rule, &params)?.witness else {
            return Ok(None);
        };
        let dataset = ClassificationInstance::from_profile(&profile)?;
        let best = erm(&dataset, &TieOrder::Canonical)?;
        Ok(Some(ClassificationCertificate {
            mechanism_risk: global_risk(outcome.set(), &dataset),
            erm_risk: global_risk(best.set(), &dataset),
            classifier: outcome,
            dataset,
        }))
    }
}

/// Parses `m k n`, then `n` sign strings over `+`/`-`, then `n` weights `p/q`.
pub fn parse_classification_instance(text: &str) -> Result<ClassificationInstance> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty classification file"))?;
    let v = parse_usizes(hl, header, 3)?;
    let (m, k, n) = (v[0], v[1], v[2]);
    let mut labelings = Vec::with_capacity(n);
    let mut last_line = hl;
    for _ in 0..n {
        let (ln, line) = lines
            .next()
            .ok_or_else(|| parse_err(last_line + 1, format!("expected {n} labellings")))?;
        last_line = ln;
        if line.chars().count() != m {
            return Err(parse_err(ln, format!("labelling must have {m} signs")));
        }
        let labels = line
            .chars()
            .map(|c| match c {
                '+' => Ok(true),
                '-' => Ok(false),
                other => Err(parse_err(ln, format!("unexpected sign `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()?;
        labelings.push(labels);
    }
    let (wl, wline) = lines
        .next()
        .ok_or_else(|| parse_err(last_line + 1, "missing weight line"))?;
    let weights = wline
        .split_whitespace()
        .map(|t| Ratio::<u64>::from_str(t).map_err(|_| parse_err(wl, format!("bad weight `{t}`"))))
        .collect::<Result<Vec<_>>>()?;
    if let Some((ln, _)) = lines.next() {
        return Err(parse_err(ln, "unexpected trailing content"));
    }
    ClassificationInstance::new(m, k, labelings, weights).map_err(|e| match e {
        Error::InvalidWeights(msg) => parse_err(wl, msg),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(s: &str) -> Vec<bool> {
        s.chars().map(|c| c == '+').collect()
    }

    #[test]
    fn loss_and_risk() {
        assert_eq!(agent_loss(AltSet::from_indices([0, 1]), &labels("++-")), 0);
        assert_eq!(agent_loss(AltSet::from_indices([0, 1]), &labels("---")), 2);
        let inst = ClassificationInstance::new(
            3,
            1,
            vec![labels("+--"), labels("-++")],
            vec![Ratio::new(1, 3), Ratio::new(2, 3)],
        )
        .unwrap();
        // h = {0}: losses 0 and 3.
        assert_eq!(global_risk(AltSet::from_indices([0]), &inst), Ratio::from_integer(2));
        // h = {1}: losses 2 and 1.
        assert_eq!(global_risk(AltSet::from_indices([1]), &inst), Ratio::new(4, 3));
        assert_eq!(erm(&inst, &TieOrder::Canonical).unwrap().set(), AltSet::from_indices([1]));
    }

    #[test]
    fn weights_are_validated() {
        let l = vec![labels("+-"), labels("-+")];
        assert!(ClassificationInstance::new(2, 1, l.clone(), vec![Ratio::new(1, 2), Ratio::new(1, 3)]).is_err());
        assert!(ClassificationInstance::new(2, 1, l, vec![Ratio::new(1, 1), Ratio::new(0, 1)]).is_err());
    }

    #[test]
    fn file_format() {
        let inst = parse_classification_instance("3 1 2\n+--\n-++\n1/3 2/3\n").unwrap();
        assert_eq!(inst.weights()[1], Ratio::new(2, 3));
        let err = parse_classification_instance("3 1 2\n+--\n-x+\n1/3 2/3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
        let err = parse_classification_instance("3 1 2\n+--\n-++\n1/3 1/3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }));
    }

    #[test]
    fn realizability_flag() {
        let mut inst = ClassificationInstance::with_equal_weights(3, 1, vec![labels("++-")]).unwrap();
        let mech = classification_adapter(RuleSpec::minisum());
        assert!(mech.classify(&inst).is_ok());
        inst.realizable_only = true;
        assert!(matches!(mech.classify(&inst), Err(Error::NotAllowable(_))));
    }

    #[test]
    fn constant_rule_certificate() {
        let rule = RuleSpec::constant(AltSet::from_indices([2]));
        let cert = classification_adapter(rule.clone())
            .infinite_ratio_certificate(3, 1, 2)
            .unwrap()
            .unwrap();
        cert.replay(&rule).unwrap();
        assert!(classification_adapter(RuleSpec::minisum())
            .infinite_ratio_certificate(3, 1, 2)
            .unwrap()
            .is_none());
    }
}

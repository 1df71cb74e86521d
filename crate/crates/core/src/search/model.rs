//! The constraint model shared by the backtracking search and the CNF
//! encoder: one variable per profile, one value per possible outcome.

use crate::axioms::{dominator_of, manipulating_coalition, masks_of_size, Axiom, ManipulationKind};
use crate::election::{enumerate_committees, AltSet, Committee, ProfileSpace, RankingSpace};
use crate::error::{Error, Result};

use super::{SearchSpec, Side};

/// Values per variable are kept in a `u64` bit mask.
pub(crate) const MAX_VALUES: usize = 64;

pub(crate) enum Binary {
    None,
    /// Coalition deviations inside the approval profile space.
    Approval {
        space: ProfileSpace,
        /// Ballots of every profile, flattened `nvars * n`.
        truths: Vec<AltSet>,
        kinds: Vec<ManipulationKind>,
        bound: usize,
    },
    /// Single-agent misreports between ranking profiles.
    Ranking { space: RankingSpace },
}

pub(crate) struct Model {
    pub nvars: usize,
    /// Outcome behind each value index: committees in canonical order, or
    /// singletons `{a}` on the ranking side.
    pub values: Vec<AltSet>,
    /// Unary constraints already applied.
    pub initial: Vec<u64>,
    pub binary: Binary,
    pub onto: bool,
    /// `tops[agent][var]`: value index of the agent's top choice, present
    /// when non-dictatorship is required.
    pub tops: Option<Vec<Vec<u8>>>,
}

impl Model {
    pub fn build(spec: &SearchSpec) -> Result<Model> {
        match spec.side {
            Side::Approval => Self::approval(spec),
            Side::Ranking => Self::ranking(spec),
        }
    }

    fn approval(spec: &SearchSpec) -> Result<Model> {
        let params = spec.params()?;
        let space = ProfileSpace::new(params, spec.restriction)?;
        let committees: Vec<Committee> = enumerate_committees(&params);
        if committees.len() > MAX_VALUES {
            return Err(Error::InvalidParams(format!(
                "{} committees exceed the {MAX_VALUES}-value domain limit",
                committees.len()
            )));
        }
        let nvars = usize::try_from(space.len())
            .map_err(|_| Error::InvalidParams("profile space too large".into()))?;
        let n = params.n();
        let mut truths = Vec::with_capacity(nvars * n);
        for idx in 0..space.len() {
            truths.extend(space.ballots_of(idx));
        }
        let full = full_mask(committees.len());
        let mut initial = vec![full; nvars];
        let mut kinds = Vec::new();
        let mut onto = false;
        for &a in &spec.axioms {
            match a {
                Axiom::Unanimity => {
                    for (v, c) in committees.iter().enumerate() {
                        if let Some(idx) = space.index_of(&vec![c.set(); n]) {
                            initial[idx as usize] &= 1 << v;
                        }
                    }
                }
                Axiom::Pareto => {
                    for (x, d) in initial.iter_mut().enumerate() {
                        let ballots = &truths[x * n..(x + 1) * n];
                        for (v, c) in committees.iter().enumerate() {
                            if dominator_of(&committees, ballots, c.set()).is_some() {
                                *d &= !(1 << v);
                            }
                        }
                    }
                }
                Axiom::Sp | Axiom::WeakGsp | Axiom::StrongGsp => {
                    kinds.push(ManipulationKind::from_axiom(a).expect("manipulation axiom"));
                }
                Axiom::Onto => onto = true,
                other => {
                    return Err(Error::UnsupportedAxiom {
                        axiom: other.name().into(),
                        side: "approval",
                    })
                }
            }
        }
        let only_sp = kinds.iter().all(|&k| k == ManipulationKind::Sp);
        let bound = if only_sp { 1 } else { spec.max_coalition.unwrap_or(n).clamp(1, n) };
        let binary = if kinds.is_empty() {
            Binary::None
        } else {
            Binary::Approval {
                space,
                truths,
                kinds,
                bound,
            }
        };
        Ok(Model {
            nvars,
            values: committees.iter().map(|c| c.set()).collect(),
            initial,
            binary,
            onto,
            tops: None,
        })
    }

    fn ranking(spec: &SearchSpec) -> Result<Model> {
        let space = RankingSpace::new(spec.m, spec.n)?;
        let nvars = space.len() as usize;
        let mut sp = false;
        let mut onto = false;
        let mut tops = None;
        for &a in &spec.axioms {
            match a {
                Axiom::SpRanking => sp = true,
                Axiom::Onto => onto = true,
                Axiom::NonDictatorship => {
                    tops = Some(
                        (0..spec.n)
                            .map(|i| {
                                (0..space.len())
                                    .map(|x| space.ranking_of(x, i).top() as u8)
                                    .collect()
                            })
                            .collect(),
                    )
                }
                other => {
                    return Err(Error::UnsupportedAxiom {
                        axiom: other.name().into(),
                        side: "ranking",
                    })
                }
            }
        }
        Ok(Model {
            nvars,
            values: (0..spec.m).map(|a| AltSet::EMPTY.with(a)).collect(),
            initial: vec![full_mask(spec.m); nvars],
            binary: if sp { Binary::Ranking { space } } else { Binary::None },
            onto,
            tops,
        })
    }

    pub fn nvals(&self) -> usize {
        self.values.len()
    }

    /// Profiles one deviation away from `x`, each with the mask of agents
    /// whose report differs.
    pub fn neighbors(&self, x: usize, out: &mut Vec<(usize, u64)>) {
        out.clear();
        match &self.binary {
            Binary::None => {}
            Binary::Ranking { space } => {
                let nr = space.rankings().len();
                for agent in 0..space.n() {
                    let cur = space.radix().digit(x as u64, agent);
                    for r in (0..nr).filter(|&r| r != cur) {
                        out.push((space.replace(x as u64, agent, r) as usize, 1 << agent));
                    }
                }
            }
            Binary::Approval { space, bound, .. } => {
                let n = space.params().n();
                let radix = space.radix();
                let nb = space.ballots().len();
                if nb < 2 {
                    return;
                }
                let digits: Vec<usize> = (0..n).map(|i| radix.digit(x as u64, i)).collect();
                for size in 1..=*bound {
                    for mask in masks_of_size(n, size) {
                        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
                        let mut choice = vec![0usize; size];
                        'odometer: loop {
                            let mut idx = x as u64;
                            for (slot, &agent) in members.iter().enumerate() {
                                let b = if choice[slot] >= digits[agent] {
                                    choice[slot] + 1
                                } else {
                                    choice[slot]
                                };
                                idx = idx - digits[agent] as u64 * radix.stride(agent)
                                    + b as u64 * radix.stride(agent);
                            }
                            out.push((idx as usize, mask));
                            for c in choice.iter_mut().rev() {
                                *c += 1;
                                if *c < nb - 1 {
                                    continue 'odometer;
                                }
                                *c = 0;
                            }
                            break;
                        }
                    }
                }
            }
        }
    }

    /// Whether outcome `a` at `x` and `b` at `y` can coexist, where `mask`
    /// marks the agents whose reports differ. Symmetric: a deviation in
    /// either direction is checked.
    pub fn compatible(&self, x: usize, a: usize, y: usize, b: usize, mask: u64) -> bool {
        if a == b {
            return true;
        }
        match &self.binary {
            Binary::None => true,
            Binary::Ranking { space } => {
                let agent = mask.trailing_zeros() as usize;
                !space.ranking_of(x as u64, agent).prefers(b, a)
                    && !space.ranking_of(y as u64, agent).prefers(a, b)
            }
            Binary::Approval {
                space,
                truths,
                kinds,
                bound,
            } => {
                let n = space.params().n();
                let (tx, ty) = (&truths[x * n..(x + 1) * n], &truths[y * n..(y + 1) * n]);
                let (va, vb) = (self.values[a], self.values[b]);
                kinds.iter().all(|&k| {
                    manipulating_coalition(k, *bound, tx, mask, va, vb).is_none()
                        && manipulating_coalition(k, *bound, ty, mask, vb, va).is_none()
                })
            }
        }
    }
}

pub(crate) fn full_mask(nvals: usize) -> u64 {
    if nvals >= 64 {
        u64::MAX
    } else {
        (1u64 << nvals) - 1
    }
}

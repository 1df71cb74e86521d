//! DIMACS export of a synthesis instance and decoding of external models.
//!
//! Variable `1 + x * nvals + v` selects value `v` (a committee, or an
//! alternative on the ranking side) at profile `x`. The sidecar map starts
//! with a `# key=value ...` header describing the instance and then lists
//! `v <id> profile <index> outcome <bitstring>` for every variable.

use std::fmt::Write;

use crate::axioms::Axiom;
use crate::election::{AltSet, Committee, ProfileSpace, RankingSpace};
use crate::error::{Error, Result};

use super::model::Model;
use super::table::{RankingTable, RuleTable};
use super::{verify_table, SearchSpec, Side, Table};

/// Default ceiling on emitted clauses.
pub const DEFAULT_CLAUSE_CAP: u64 = 50_000_000;

#[derive(Clone, Debug)]
pub struct CnfExport {
    pub dimacs: String,
    pub map: String,
    pub variables: usize,
    pub clauses: usize,
}

impl CnfExport {
    /// Clauses as signed literals, for handing to an in-process solver.
    pub fn clause_list(&self) -> Vec<Vec<i64>> {
        self.dimacs
            .lines()
            .filter(|l| !l.starts_with('c') && !l.starts_with('p') && !l.trim().is_empty())
            .map(|l| {
                l.split_whitespace()
                    .map(|t| t.parse::<i64>().expect("emitted literal"))
                    .take_while(|&lit| lit != 0)
                    .collect()
            })
            .collect()
    }
}

fn var(model: &Model, x: usize, v: usize) -> i64 {
    (1 + x * model.nvals() + v) as i64
}

pub fn export_cnf(spec: &SearchSpec, clause_cap: u64) -> Result<CnfExport> {
    let model = Model::build(spec)?;
    let nvals = model.nvals();
    let mut clauses: Vec<Vec<i64>> = Vec::new();
    let push = |c: Vec<i64>, clauses: &mut Vec<Vec<i64>>| -> Result<()> {
        if clauses.len() as u64 >= clause_cap {
            return Err(Error::CapExceeded {
                needed: clauses.len() as u128 + 1,
                cap: clause_cap,
            });
        }
        clauses.push(c);
        Ok(())
    };
    for x in 0..model.nvars {
        push((0..nvals).map(|v| var(&model, x, v)).collect(), &mut clauses)?;
        for a in 0..nvals {
            for b in a + 1..nvals {
                push(vec![-var(&model, x, a), -var(&model, x, b)], &mut clauses)?;
            }
        }
        let d = model.initial[x];
        if d.count_ones() == 1 {
            push(vec![var(&model, x, d.trailing_zeros() as usize)], &mut clauses)?;
        } else {
            for v in (0..nvals).filter(|&v| d >> v & 1 == 0) {
                push(vec![-var(&model, x, v)], &mut clauses)?;
            }
        }
    }
    let mut nb = Vec::new();
    for x in 0..model.nvars {
        model.neighbors(x, &mut nb);
        for &(y, mask) in nb.iter().filter(|(y, _)| *y > x) {
            for a in 0..nvals {
                for b in 0..nvals {
                    if !model.compatible(x, a, y, b, mask) {
                        push(vec![-var(&model, x, a), -var(&model, y, b)], &mut clauses)?;
                    }
                }
            }
        }
    }
    if model.onto {
        for v in 0..nvals {
            push((0..model.nvars).map(|x| var(&model, x, v)).collect(), &mut clauses)?;
        }
    }
    if let Some(tops) = &model.tops {
        for agent_tops in tops {
            push(
                (0..model.nvars)
                    .map(|x| -var(&model, x, agent_tops[x] as usize))
                    .collect(),
                &mut clauses,
            )?;
        }
    }

    let variables = model.nvars * nvals;
    let mut dimacs = format!("c {}\np cnf {variables} {}\n", spec.describe(), clauses.len());
    for c in &clauses {
        for lit in c {
            let _ = write!(dimacs, "{lit} ");
        }
        dimacs.push_str("0\n");
    }
    let width = spec.m;
    let mut map = format!("# {}\n", spec.header());
    for x in 0..model.nvars {
        for (v, value) in model.values.iter().enumerate() {
            let _ = writeln!(
                map,
                "v {} profile {x} outcome {}",
                var(&model, x, v),
                value.to_bitstring(width)
            );
        }
    }
    Ok(CnfExport {
        dimacs,
        map,
        variables,
        clauses: clauses.len(),
    })
}

/// Reads the header of a map file back into a search specification.
pub fn parse_map_header(map: &str) -> Result<SearchSpec> {
    let header = map
        .lines()
        .next()
        .and_then(|l| l.strip_prefix('#'))
        .ok_or_else(|| Error::Parse {
            line: 1,
            msg: "map file must start with a `# key=value` header".into(),
        })?;
    SearchSpec::from_header(header)
}

/// Turns a solver assignment (signed literals; positive = true) into a rule
/// table using the map file, then re-verifies it against the map's axioms.
pub fn decode_model(assignment: &[i64], map: &str) -> Result<Table> {
    let spec = parse_map_header(map)?;
    let mut entries: Vec<(usize, u64, AltSet)> = Vec::new();
    let mut nprofiles = 0u64;
    for (i, line) in map.lines().enumerate().skip(1) {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let t: Vec<&str> = line.split_whitespace().collect();
        let bad = || Error::Parse {
            line: i + 1,
            msg: "expected `v <id> profile <index> outcome <bitstring>`".into(),
        };
        if t.len() != 6 || t[0] != "v" || t[2] != "profile" || t[4] != "outcome" {
            return Err(bad());
        }
        let id: usize = t[1].parse().map_err(|_| bad())?;
        let profile: u64 = t[3].parse().map_err(|_| bad())?;
        let outcome = AltSet::parse_bitstring(t[5], spec.m).map_err(|e| Error::Parse {
            line: i + 1,
            msg: e,
        })?;
        nprofiles = nprofiles.max(profile + 1);
        entries.push((id, profile, outcome));
    }
    let max_id = entries.iter().map(|e| e.0).max().unwrap_or(0);
    let mut truth = vec![false; max_id + 1];
    for &lit in assignment {
        let id = lit.unsigned_abs() as usize;
        if id < truth.len() && lit > 0 {
            truth[id] = true;
        }
    }
    let mut chosen: Vec<Option<AltSet>> = vec![None; nprofiles as usize];
    for &(id, profile, outcome) in &entries {
        if truth[id] {
            if let Some(prev) = chosen[profile as usize].replace(outcome) {
                return Err(Error::InconsistentAssignment(format!(
                    "profile {profile} has outcomes {prev} and {outcome}"
                )));
            }
        }
    }
    let chosen = chosen
        .into_iter()
        .enumerate()
        .map(|(p, c)| {
            c.ok_or_else(|| Error::InconsistentAssignment(format!("profile {p} has no outcome")))
        })
        .collect::<Result<Vec<_>>>()?;
    let table = match spec.side {
        Side::Approval => {
            let params = spec.params()?;
            let space = ProfileSpace::new(params, spec.restriction)?;
            let outcomes = chosen
                .into_iter()
                .map(|c| Committee::new(c, &params))
                .collect::<Result<Vec<_>>>()?;
            Table::Approval(RuleTable::new(space, outcomes)?)
        }
        Side::Ranking => {
            let space = RankingSpace::new(spec.m, spec.n)?;
            let winners = chosen
                .into_iter()
                .map(|c| {
                    if c.len() == 1 {
                        Ok(c.iter().next().expect("singleton"))
                    } else {
                        Err(Error::InconsistentAssignment(format!("{c} is not a single alternative")))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            Table::Ranking(RankingTable::new(space, winners)?)
        }
    };
    verify_table(&spec, &table)?;
    Ok(table)
}

/// Parses solver output in the usual `v 1 -2 3 ... 0` form (lines starting
/// with `v`), or bare whitespace-separated literals.
pub fn parse_assignment(text: &str) -> Result<Vec<i64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('c') || line.starts_with('s') {
            continue;
        }
        let body = line.strip_prefix('v').unwrap_or(line);
        for tok in body.split_whitespace() {
            let lit: i64 = tok.parse().map_err(|_| Error::Parse {
                line: i + 1,
                msg: format!("bad literal `{tok}`"),
            })?;
            if lit != 0 {
                out.push(lit);
            }
        }
    }
    Ok(out)
}

pub(crate) fn axioms_field(axioms: &[Axiom]) -> String {
    axioms.iter().map(|a| a.name()).collect::<Vec<_>>().join(",")
}

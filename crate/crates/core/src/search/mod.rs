//! Synthesis of rules satisfying a set of axioms over a fully enumerated
//! election space.
//!
//! A rule is a table with one outcome per profile. The search assigns those
//! outcomes by backtracking: unanimity and Pareto efficiency restrict single
//! cells, manipulation axioms become binary constraints between profiles one
//! (coalition) deviation apart, and onto / non-dictatorship are global.
//! Deviations range over the same ballot space as the profiles, since a
//! table has no outcome elsewhere. Every table returned is re-checked with
//! the independent checkers in [`crate::axioms`].

pub mod cnf;
mod engine;
mod model;
pub mod table;

use std::fmt;
use std::time::{Duration, Instant};

use crate::axioms::{
    check_committee_onto, check_manipulation, check_non_dictatorship, check_onto, check_pareto,
    check_sp_ranking, check_unanimity_on, Axiom, CheckMode, CheckOptions, DeviationSpace,
    ManipulationKind,
};
use crate::election::{BallotRestriction, Committee, ElectionParams};
use crate::error::{Error, Result};
use crate::rules::RuleSpec;

pub use cnf::{decode_model, export_cnf, parse_assignment, parse_map_header, CnfExport, DEFAULT_CLAUSE_CAP};
pub use table::{format_ranking_table, format_rule_table, parse_rule_table, RankingTable, RuleTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Approval,
    Ranking,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Approval => "approval",
            Side::Ranking => "ranking",
        }
    }

    pub fn parse(s: &str) -> Result<Side> {
        match s {
            "approval" => Ok(Side::Approval),
            "ranking" => Ok(Side::Ranking),
            _ => Err(Error::InvalidParams(format!("unknown side `{s}`"))),
        }
    }
}

/// The instance: which space, which axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchSpec {
    pub side: Side,
    pub axioms: Vec<Axiom>,
    pub m: usize,
    /// Committee size; ignored on the ranking side.
    pub k: usize,
    pub n: usize,
    pub restriction: BallotRestriction,
    /// Largest manipulating coalition; `None` means all agents.
    pub max_coalition: Option<usize>,
}

impl SearchSpec {
    pub fn approval(axioms: &[Axiom], m: usize, k: usize, n: usize) -> Self {
        SearchSpec {
            side: Side::Approval,
            axioms: axioms.to_vec(),
            m,
            k,
            n,
            restriction: BallotRestriction::All,
            max_coalition: None,
        }
    }

    pub fn ranking(axioms: &[Axiom], m: usize, n: usize) -> Self {
        SearchSpec {
            side: Side::Ranking,
            axioms: axioms.to_vec(),
            m,
            k: 1,
            n,
            restriction: BallotRestriction::All,
            max_coalition: None,
        }
    }

    pub fn with_restriction(mut self, r: BallotRestriction) -> Self {
        self.restriction = r;
        self
    }

    pub fn with_max_coalition(mut self, c: usize) -> Self {
        self.max_coalition = Some(c);
        self
    }

    pub fn params(&self) -> Result<ElectionParams> {
        ElectionParams::new(self.m, self.k, self.n)
    }

    /// `key=value` fields, also used as the CNF map header.
    pub fn header(&self) -> String {
        let mut s = format!("side={} m={}", self.side.name(), self.m);
        if self.side == Side::Approval {
            s += &format!(" k={}", self.k);
        }
        s += &format!(" n={}", self.n);
        if self.side == Side::Approval {
            s += &format!(" ballots={}", self.restriction.name());
        }
        s += &format!(" axioms={}", cnf::axioms_field(&self.axioms));
        if let Some(c) = self.max_coalition {
            s += &format!(" coalition={c}");
        }
        s
    }

    pub fn describe(&self) -> String {
        self.header()
    }

    pub fn from_header(header: &str) -> Result<SearchSpec> {
        let bad = |msg: String| Error::Parse { line: 1, msg };
        let mut side = None;
        let (mut m, mut k, mut n) = (None, 1, None);
        let mut restriction = BallotRestriction::All;
        let mut axioms = Vec::new();
        let mut max_coalition = None;
        for field in header.split_whitespace() {
            let (key, value) = field
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, found `{field}`")))?;
            let num = |v: &str| v.parse::<usize>().map_err(|_| bad(format!("bad number in `{field}`")));
            match key {
                "side" => side = Some(Side::parse(value)?),
                "m" => m = Some(num(value)?),
                "k" => k = num(value)?,
                "n" => n = Some(num(value)?),
                "ballots" => {
                    restriction = BallotRestriction::parse(value)
                        .ok_or_else(|| bad(format!("unknown ballot restriction `{value}`")))?
                }
                "axioms" => {
                    axioms = value
                        .split(',')
                        .filter(|a| !a.is_empty())
                        .map(Axiom::parse)
                        .collect::<Result<_>>()?
                }
                "coalition" => max_coalition = Some(num(value)?),
                _ => return Err(bad(format!("unknown header key `{key}`"))),
            }
        }
        Ok(SearchSpec {
            side: side.ok_or_else(|| bad("header lacks `side`".into()))?,
            axioms,
            m: m.ok_or_else(|| bad("header lacks `m`".into()))?,
            k,
            n: n.ok_or_else(|| bad("header lacks `n`".into()))?,
            restriction,
            max_coalition,
        })
    }
}

impl fmt::Display for SearchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.header())
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    pub node_budget: Option<u64>,
    pub time_budget: Option<Duration>,
    /// Branch on the profile with the fewest remaining outcomes.
    pub first_fail: bool,
    /// Arc-consistency and global propagation; when off, constraints are
    /// only checked against assigned neighbors.
    pub propagate: bool,
    /// Stop after this many models (at least one).
    pub max_models: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            node_budget: None,
            time_budget: None,
            first_fail: false,
            propagate: true,
            max_models: 1,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    pub revisions: u64,
    pub prunings: u64,
    pub max_depth: usize,
    pub models: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Timeout,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Sat => "sat",
            Status::Unsat => "unsat",
            Status::Timeout => "timeout",
        }
    }
}

/// A synthesized rule.
#[derive(Clone, Debug)]
pub enum Table {
    Approval(RuleTable),
    Ranking(RankingTable),
}

impl Table {
    pub fn format(&self) -> String {
        match self {
            Table::Approval(t) => format_rule_table(t),
            Table::Ranking(t) => format_ranking_table(t),
        }
    }

    pub fn as_approval(&self) -> Option<&RuleTable> {
        match self {
            Table::Approval(t) => Some(t),
            Table::Ranking(_) => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SearchResult {
    pub spec: SearchSpec,
    pub status: Status,
    /// Verified models, in the order found.
    pub models: Vec<Table>,
    /// True when the search tree was exhausted, so `models` lists every
    /// model (or proves there are none).
    pub complete: bool,
    pub stats: SearchStats,
    pub wall: Duration,
}

/// Runs the backtracking search. Tables found are verified before being
/// returned; a table failing verification is reported as an error.
pub fn synthesize(spec: &SearchSpec, opts: &SearchOptions) -> Result<SearchResult> {
    let start = Instant::now();
    let model = model::Model::build(spec)?;
    let mut eng = engine::Engine::new(&model, opts);
    let finish = eng.run();
    let mut models = Vec::with_capacity(eng.models.len());
    for values in &eng.models {
        let table = to_table(spec, &model, values)?;
        verify_table(spec, &table)?;
        models.push(table);
    }
    let status = match (&finish, models.is_empty()) {
        (_, false) => Status::Sat,
        (engine::Finish::Timeout, true) => Status::Timeout,
        _ => Status::Unsat,
    };
    Ok(SearchResult {
        spec: spec.clone(),
        status,
        models,
        complete: matches!(finish, engine::Finish::Complete),
        stats: eng.stats,
        wall: start.elapsed(),
    })
}

fn to_table(spec: &SearchSpec, model: &model::Model, values: &[usize]) -> Result<Table> {
    match spec.side {
        Side::Approval => {
            let params = spec.params()?;
            let space = crate::election::ProfileSpace::new(params, spec.restriction)?;
            let outcomes = values
                .iter()
                .map(|&v| Committee::new(model.values[v], &params))
                .collect::<Result<Vec<_>>>()?;
            Ok(Table::Approval(RuleTable::new(space, outcomes)?))
        }
        Side::Ranking => {
            let space = crate::election::RankingSpace::new(spec.m, spec.n)?;
            Ok(Table::Ranking(RankingTable::new(space, values.to_vec())?))
        }
    }
}

/// Checks a table against every axiom of `spec` using the exhaustive
/// checkers, with deviations inside the table's ballot space.
pub fn verify_table(spec: &SearchSpec, table: &Table) -> Result<()> {
    let opts = CheckOptions {
        restriction: spec.restriction,
        deviations: DeviationSpace::Restricted,
        max_coalition: spec.max_coalition,
        mode: CheckMode::Exhaustive,
        eval_cap: u64::MAX,
    };
    for &axiom in &spec.axioms {
        let verdict = match table {
            Table::Approval(t) => {
                let rule = RuleSpec::table(t.clone());
                let params = *t.params();
                match axiom {
                    Axiom::Unanimity => check_unanimity_on(&rule, &params, spec.restriction)?,
                    Axiom::Pareto => check_pareto(&rule, &params, &opts)?,
                    Axiom::Onto => check_committee_onto(&rule, &params, &opts)?,
                    Axiom::Sp | Axiom::WeakGsp | Axiom::StrongGsp => check_manipulation(
                        ManipulationKind::from_axiom(axiom).expect("manipulation axiom"),
                        &rule,
                        &params,
                        &opts,
                    )?,
                    other => {
                        return Err(Error::UnsupportedAxiom {
                            axiom: other.name().into(),
                            side: "approval",
                        })
                    }
                }
            }
            Table::Ranking(t) => {
                let (m, n) = (t.space().m(), t.space().n());
                match axiom {
                    Axiom::SpRanking => check_sp_ranking(t, m, n, &opts)?,
                    Axiom::Onto => check_onto(t, m, n, &opts)?,
                    Axiom::NonDictatorship => check_non_dictatorship(t, m, n, &opts)?,
                    other => {
                        return Err(Error::UnsupportedAxiom {
                            axiom: other.name().into(),
                            side: "ranking",
                        })
                    }
                }
            }
        };
        if !verdict.holds {
            return Err(Error::VerificationFailed(format!(
                "table violates {axiom}: {}",
                verdict
                    .witness
                    .map(|w| w.transcript())
                    .unwrap_or_default()
                    .trim_end()
            )));
        }
    }
    Ok(())
}

/// Regimes the impossibility result leaves open.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OpenCase {
    /// Committees of all but one alternative: m = 3, k = 2, n in {2, 3}.
    KEqualsMMinusOne,
    /// Few agents: n in {3, 4, 5} with small m and k.
    SmallN,
}

impl OpenCase {
    pub fn parse(s: &str) -> Result<OpenCase> {
        match s {
            "k-equals-m-minus-1" => Ok(OpenCase::KEqualsMMinusOne),
            "small-n" => Ok(OpenCase::SmallN),
            _ => Err(Error::InvalidParams(format!("unknown open case `{s}`"))),
        }
    }

    /// The (m, k, n) instances probed, in order.
    pub fn instances(self) -> &'static [(usize, usize, usize)] {
        match self {
            OpenCase::KEqualsMMinusOne => &[(3, 2, 2), (3, 2, 3)],
            OpenCase::SmallN => &[(3, 1, 3), (3, 1, 4), (2, 1, 5)],
        }
    }
}

/// Runs {unanimity, strong-gsp} on each instance of an open regime. The
/// results describe the enumerated spaces only.
pub fn explore_open_cases(case: OpenCase, opts: &SearchOptions) -> Result<Vec<SearchResult>> {
    case.instances()
        .iter()
        .map(|&(m, k, n)| {
            synthesize(
                &SearchSpec::approval(&[Axiom::Unanimity, Axiom::StrongGsp], m, k, n),
                opts,
            )
        })
        .collect()
}

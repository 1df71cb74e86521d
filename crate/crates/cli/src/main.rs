//! `agsp`: command-line front end for the approval-gsp toolkit.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use approval_gsp::applications::classification::{
    classification_adapter, erm, global_risk, parse_classification_instance,
};
use approval_gsp::applications::facility::{facility_adapter, facility_costs, parse_facility_instance};
use approval_gsp::applications::budgeting::BudgetInstance;
use approval_gsp::applications::minimax::{minimax_infinite_ratio_check, MinimaxVerdict};
use approval_gsp::approx::approx_ratio;
use approval_gsp::axioms::{
    check_committee_onto, check_dictatorship, check_non_dictatorship, check_onto, check_pareto,
    check_sp, check_sp_ranking, check_strong_gsp, check_unanimity_on, check_weak_gsp, Axiom,
    AxiomVerdict, CheckMode, CheckOptions, DeviationSpace, Witness, DEFAULT_EVAL_CAP, DEFAULT_SEED,
};
use approval_gsp::election::{BallotRestriction, ElectionParams};
use approval_gsp::format::{format_approval_profile, parse_approval_profile, parse_ranking_profile};
use approval_gsp::ranking::RankingRule;
use approval_gsp::reduction::{counterexample_run_with, build_approval_election, CounterexampleOutcome};
use approval_gsp::rules::{apply_rule, RuleSpec, TieOrder};
use approval_gsp::search::{
    decode_model, explore_open_cases, export_cnf, parse_assignment, synthesize, OpenCase, SearchOptions,
    SearchResult, SearchSpec, Side, Status, DEFAULT_CLAUSE_CAP,
};
use approval_gsp::Error;
use clap::{Args, Parser, Subcommand};
use itertools::Itertools;

use report::{Format, RunReport};

#[derive(Parser, Debug)]
#[command(name = "agsp", version, about = "Strategyproofness tools for approval-based committee elections")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Human)]
    format: Format,
    /// Seed for sampled checks given as `sample:<count>`.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Ceiling on rule evaluations before a check samples or gives up.
    #[arg(long, global = true, default_value_t = DEFAULT_EVAL_CAP)]
    eval_cap: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a rule to an approval profile file.
    Eval {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        tie: Option<String>,
    },
    /// Check one axiom over an election space.
    Check(CheckArgs),
    /// Turn a ranking profile into the approval election with dummies.
    Reduce {
        #[arg(long)]
        ranking: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        emit_approval: Option<PathBuf>,
    },
    /// Run the final-step construction against a rule.
    Counterexample {
        #[arg(long)]
        rule: String,
        /// Alternatives of the ranking side.
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        x: usize,
        #[arg(long, default_value_t = 1)]
        y: usize,
        #[arg(long)]
        tie: Option<String>,
    },
    /// Search for a rule table satisfying a set of axioms.
    Search(SearchArgs),
    /// Decode an external solver's model through a variable map.
    Decode {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        table_out: Option<PathBuf>,
    },
    /// Worst-case ratio of a rule against the minimax optimum.
    Approx {
        #[arg(long)]
        rule: String,
        #[command(flatten)]
        space: SpaceArgs,
        #[arg(long)]
        tie: Option<String>,
    },
    /// Application adapters.
    #[command(subcommand)]
    Apps(AppsCommand),
}

#[derive(Args, Debug, Clone)]
struct SpaceArgs {
    #[arg(long)]
    m: usize,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// all, nonempty, proper or atmost:<c>.
    #[arg(long, default_value = "all")]
    ballots: String,
    /// auto, exhaustive, sample:<count> or sample:<count>:<seed>.
    #[arg(long, default_value = "auto")]
    mode: String,
}

#[derive(Args, Debug)]
struct CheckArgs {
    /// sp, weak-gsp, strong-gsp, unanimity, pareto, onto, dictatorship,
    /// non-dictatorship or sp-ranking.
    #[arg(long)]
    axiom: String,
    #[arg(long)]
    rule: String,
    #[command(flatten)]
    space: SpaceArgs,
    #[arg(long)]
    max_coalition: Option<usize>,
    /// full or restricted.
    #[arg(long, default_value = "full")]
    deviations: String,
    /// Force the approval or ranking side (onto exists on both).
    #[arg(long)]
    side: Option<String>,
    #[arg(long)]
    tie: Option<String>,
}

#[derive(Args, Debug)]
struct SearchArgs {
    #[arg(long, default_value = "approval")]
    side: String,
    #[arg(long, default_value = "")]
    axioms: String,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 1)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    #[arg(long, default_value = "all")]
    ballots: String,
    #[arg(long)]
    max_coalition: Option<usize>,
    #[arg(long)]
    budget_nodes: Option<u64>,
    #[arg(long)]
    budget_secs: Option<f64>,
    #[arg(long)]
    first_fail: bool,
    #[arg(long)]
    no_propagate: bool,
    #[arg(long, default_value_t = 1)]
    max_models: usize,
    /// Write DIMACS to this path and the variable map next to it instead of searching.
    #[arg(long)]
    emit_cnf: Option<PathBuf>,
    #[arg(long)]
    table_out: Option<PathBuf>,
    /// Sweep an open case (k-equals-m-minus-1 or small-n) with unanimity and strong-gsp.
    #[arg(long)]
    open_case: Option<String>,
}

#[derive(Subcommand, Debug)]
enum AppsCommand {
    /// Unbounded minimax ratio certificate for a non-unanimous rule.
    Minimax {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Fund projects from an approval profile file (`k` = fundable projects).
    Pb {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        feasible_ballots: bool,
    },
    /// Classify a dataset, or certify an unbounded risk ratio when no instance is given.
    Classify {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        realizable_only: bool,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
    /// Place a facility on the hypercube, or certify an unbounded ratio when no instance is given.
    Facility {
        #[arg(long)]
        rule: String,
        #[arg(long)]
        instance: Option<PathBuf>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2)]
        n: usize,
    },
}

/// What a successful run found.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Finding {
    Clean,
    Violation,
    Timeout,
}

#[derive(Debug)]
struct Failure {
    error: Error,
    path: Option<PathBuf>,
}

impl From<Error> for Failure {
    fn from(error: Error) -> Self {
        Failure { error, path: None }
    }
}

type Run = std::result::Result<Finding, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Error::InvalidParams(msg.into()).into()
}

fn read_input(path: &Path, report: &mut RunReport) -> std::result::Result<String, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        error: e.into(),
        path: Some(path.to_path_buf()),
    })?;
    report.input(&text);
    Ok(text)
}

/// Attributes parse errors to the file they came from.
fn in_file<T>(path: &Path, r: approval_gsp::Result<T>) -> std::result::Result<T, Failure> {
    r.map_err(|error| Failure {
        error,
        path: Some(path.to_path_buf()),
    })
}

fn write_output(path: &Path, content: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, content).map_err(|e| Failure {
        error: e.into(),
        path: Some(path.to_path_buf()),
    })
}

fn parse_rule(spec: &str, tie: Option<&str>, report: &mut RunReport) -> std::result::Result<RuleSpec, Failure> {
    if let Some(path) = spec.strip_prefix("table:") {
        read_input(Path::new(path), report)?;
    }
    let rule = RuleSpec::parse(spec).map_err(|error| match spec.strip_prefix("table:") {
        Some(path) => Failure {
            error,
            path: Some(path.into()),
        },
        None => error.into(),
    })?;
    report.put("rule", spec);
    Ok(match tie {
        Some(t) => {
            report.put("tie", t);
            rule.with_tie(TieOrder::parse(t)?)
        }
        None => rule,
    })
}

fn parse_restriction(s: &str) -> std::result::Result<BallotRestriction, Failure> {
    BallotRestriction::parse(s).ok_or_else(|| usage(format!("unknown ballot space `{s}`")))
}

fn parse_mode(s: &str, seed: u64) -> std::result::Result<CheckMode, Failure> {
    if let Some(count) = s.strip_prefix("sample:").filter(|c| !c.contains(':')) {
        let count = count
            .parse()
            .map_err(|_| usage(format!("bad sample count `{count}`")))?;
        return Ok(CheckMode::Sampled { count, seed });
    }
    Ok(CheckMode::parse(s)?)
}

fn check_options(cli: &Cli, space: &SpaceArgs) -> std::result::Result<CheckOptions, Failure> {
    Ok(CheckOptions {
        restriction: parse_restriction(&space.ballots)?,
        mode: parse_mode(&space.mode, cli.seed)?,
        eval_cap: cli.eval_cap,
        ..CheckOptions::default()
    })
}

fn need_k(k: Option<usize>) -> std::result::Result<usize, Failure> {
    k.ok_or_else(|| usage("--k is required for approval elections"))
}

fn put_verdict(report: &mut RunReport, v: &AxiomVerdict) -> Finding {
    report.put("axiom", v.axiom);
    report.put("holds", v.holds);
    report.put("coverage", v.coverage);
    report.put("evaluations", v.evaluations);
    put_witness(report, v.witness.as_ref())
}

fn put_witness(report: &mut RunReport, w: Option<&Witness>) -> Finding {
    match w {
        Some(w) => {
            report.extend(w.to_records());
            report.block(w.transcript());
            Finding::Violation
        }
        None => Finding::Clean,
    }
}

fn cmd_eval(rule: &str, profile: &Path, tie: Option<&str>, report: &mut RunReport) -> Run {
    let rule = parse_rule(rule, tie, report)?;
    let text = read_input(profile, report)?;
    let profile_ = in_file(profile, parse_approval_profile(&text))?;
    let c = apply_rule(&rule, &profile_)?;
    report.put("params", profile_.params());
    report.put("outcome", c.to_bitstring(profile_.params().m()));
    Ok(Finding::Clean)
}

fn ranking_side(args: &CheckArgs, axiom: Option<Axiom>) -> std::result::Result<bool, Failure> {
    match args.side.as_deref() {
        Some(s) => Ok(Side::parse(s)? == Side::Ranking),
        None => Ok(match axiom {
            Some(Axiom::SpRanking | Axiom::NonDictatorship) | None => true,
            Some(Axiom::Onto) => RuleSpec::parse(&args.rule).is_err(),
            _ => false,
        }),
    }
}

fn cmd_check(cli: &Cli, args: &CheckArgs, report: &mut RunReport) -> Run {
    // `dictatorship` lists dictators; every other name is an axiom.
    let axiom = match args.axiom.as_str() {
        "dictatorship" => None,
        a => Some(Axiom::parse(a)?),
    };
    let mut opts = check_options(cli, &args.space)?;
    let n = args.space.n;
    if ranking_side(args, axiom)? {
        let k = args.space.k.unwrap_or(1);
        let rule = RankingRule::parse_with_k(&args.rule, k)?;
        let m = args.space.m;
        report.put("rule", &args.rule);
        report.put("side", "ranking");
        report.put("space", format!("m={m} n={n}"));
        let Some(axiom) = axiom else {
            let d = check_dictatorship(rule.as_ref(), m, n, &opts)?;
            report.put("dictators", d.dictators.iter().join(","));
            report.put("coverage", d.coverage);
            return Ok(Finding::Clean);
        };
        let v = match axiom {
            Axiom::Onto => check_onto(rule.as_ref(), m, n, &opts)?,
            Axiom::NonDictatorship => check_non_dictatorship(rule.as_ref(), m, n, &opts)?,
            Axiom::SpRanking => check_sp_ranking(rule.as_ref(), m, n, &opts)?,
            other => return Err(Error::UnsupportedAxiom { axiom: other.name().into(), side: "ranking" }.into()),
        };
        return Ok(put_verdict(report, &v));
    }
    let Some(axiom) = axiom else {
        return Err(usage("dictatorship is a ranking-side check"));
    };
    let params = ElectionParams::new(args.space.m, need_k(args.space.k)?, n)?;
    let rule = parse_rule(&args.rule, args.tie.as_deref(), report)?;
    opts.max_coalition = args.max_coalition;
    opts.deviations = match args.deviations.as_str() {
        "full" => DeviationSpace::Full,
        "restricted" => DeviationSpace::Restricted,
        other => return Err(usage(format!("unknown deviation space `{other}`"))),
    };
    report.put("side", "approval");
    report.put("space", format!("{params} ballots={}", opts.restriction.name()));
    if let Some(c) = opts.max_coalition {
        report.put("max_coalition", c);
    }
    let v = match axiom {
        Axiom::Unanimity => check_unanimity_on(&rule, &params, opts.restriction)?,
        Axiom::Pareto => check_pareto(&rule, &params, &opts)?,
        Axiom::Sp => check_sp(&rule, &params, &opts)?,
        Axiom::WeakGsp => check_weak_gsp(&rule, &params, &opts)?,
        Axiom::StrongGsp => check_strong_gsp(&rule, &params, &opts)?,
        Axiom::Onto => check_committee_onto(&rule, &params, &opts)?,
        other => return Err(Error::UnsupportedAxiom { axiom: other.name().into(), side: "approval" }.into()),
    };
    Ok(put_verdict(report, &v))
}

fn cmd_reduce(ranking: &Path, k: usize, emit: Option<&Path>, report: &mut RunReport) -> Run {
    let text = read_input(ranking, report)?;
    let profile = in_file(ranking, parse_ranking_profile(&text))?;
    let out = build_approval_election(&profile, k)?;
    let m = out.approval.params().m();
    let rendered = format_approval_profile(&out.approval);
    report.put("params", out.approval.params());
    report.put("dummies", out.dummies.to_bitstring(m));
    report.put(
        "ballots",
        out.approval.ballots().iter().map(|b| b.to_bitstring(m)).join(","),
    );
    report.put(
        "copies",
        out.copy_map.iter().map(|(i, j)| format!("{}.{}", i + 1, j)).join(","),
    );
    if let Some(path) = emit {
        write_output(path, &rendered)?;
        report.put("emitted", path.display());
    }
    report.block(rendered);
    Ok(Finding::Clean)
}

fn cmd_counterexample(
    rule: &str,
    m: usize,
    k: usize,
    (x, y): (usize, usize),
    tie: Option<&str>,
    report: &mut RunReport,
) -> Run {
    let rule = parse_rule(rule, tie, report)?;
    let out = counterexample_run_with(&rule, m, k, x, y)?;
    let p = out.profiles();
    report.put("params", p.p_x.params());
    report.block(format!(
        "P_x\n{}\nP_y\n{}\nP_xy\n{}",
        format_approval_profile(&p.p_x),
        format_approval_profile(&p.p_y),
        format_approval_profile(&p.p_xy)
    ));
    report.block(out.render_table());
    let mm = p.p_x.params().m();
    match &out {
        CounterexampleOutcome::Violation {
            outcomes,
            branch,
            witness,
            ..
        } => {
            report.put("status", "violation");
            report.put("branch", format!("{branch:?}").to_lowercase());
            report.put("outcomes", outcomes.iter().map(|c| c.to_bitstring(mm)).join(","));
            Ok(put_witness(report, Some(&Witness::Manipulation(witness.clone()))))
        }
        CounterexampleOutcome::PremiseFailed {
            premise,
            expected,
            got,
            ..
        } => {
            report.put("status", "premise-failed");
            report.put("premise", format!("{premise:?}").to_lowercase());
            report.put("expected", expected.to_bitstring(mm));
            report.put("got", got.to_bitstring(mm));
            Ok(Finding::Clean)
        }
    }
}

fn parse_axiom_list(s: &str) -> std::result::Result<Vec<Axiom>, Failure> {
    Ok(s.split(',')
        .filter(|t| !t.is_empty())
        .map(Axiom::parse)
        .collect::<approval_gsp::Result<_>>()?)
}

fn put_search(report: &mut RunReport, prefix: &str, r: &SearchResult) {
    let key = |k: &str| format!("{prefix}{k}");
    report.put(key("spec"), r.spec.header());
    report.put(key("status"), r.status.name());
    report.put(key("complete"), r.complete);
    report.put(key("models"), r.models.len());
    let s = &r.stats;
    report.put(key("nodes"), s.nodes);
    report.put(key("backtracks"), s.backtracks);
    report.put(key("revisions"), s.revisions);
    report.put(key("prunings"), s.prunings);
    report.put(key("max_depth"), s.max_depth);
}

fn cmd_search(cli: &Cli, a: &SearchArgs, report: &mut RunReport) -> Run {
    let opts = SearchOptions {
        node_budget: a.budget_nodes,
        time_budget: a
            .budget_secs
            .map(|s| Duration::try_from_secs_f64(s).map_err(|_| usage(format!("bad time budget `{s}`"))))
            .transpose()?,
        first_fail: a.first_fail,
        propagate: !a.no_propagate,
        max_models: a.max_models,
    };
    if let Some(case) = &a.open_case {
        let results = explore_open_cases(OpenCase::parse(case)?, &opts)?;
        let mut finding = Finding::Clean;
        for (i, r) in results.iter().enumerate() {
            put_search(report, &format!("case{i}."), r);
            if r.status == Status::Timeout {
                finding = Finding::Timeout;
            }
        }
        return Ok(finding);
    }
    let side = Side::parse(&a.side)?;
    let axioms = parse_axiom_list(&a.axioms)?;
    let mut spec = match side {
        Side::Approval => SearchSpec::approval(&axioms, a.m, a.k, a.n),
        Side::Ranking => SearchSpec::ranking(&axioms, a.m, a.n),
    }
    .with_restriction(parse_restriction(&a.ballots)?);
    if let Some(c) = a.max_coalition {
        spec = spec.with_max_coalition(c);
    }
    if let Some(path) = &a.emit_cnf {
        let cnf = export_cnf(&spec, DEFAULT_CLAUSE_CAP.min(cli.eval_cap.max(1)))?;
        let mut map_path = path.clone().into_os_string();
        map_path.push(".map");
        let map_path = PathBuf::from(map_path);
        write_output(path, &cnf.dimacs)?;
        write_output(&map_path, &cnf.map)?;
        report.put("spec", spec.header());
        report.put("variables", cnf.variables);
        report.put("clauses", cnf.clauses);
        report.put("cnf", path.display());
        report.put("map", map_path.display());
        return Ok(Finding::Clean);
    }
    let r = synthesize(&spec, &opts)?;
    put_search(report, "", &r);
    if let Some(t) = r.models.first() {
        if let Some(path) = &a.table_out {
            write_output(path, &t.format())?;
            report.put("table", path.display());
        }
        report.block(t.format());
    }
    Ok(if r.status == Status::Timeout { Finding::Timeout } else { Finding::Clean })
}

fn cmd_decode(map: &Path, model: &Path, table_out: Option<&Path>, report: &mut RunReport) -> Run {
    let map_text = read_input(map, report)?;
    let model_text = read_input(model, report)?;
    let assignment = in_file(model, parse_assignment(&model_text))?;
    let table = decode_model(&assignment, &map_text)?;
    report.put("status", "verified");
    if let Some(path) = table_out {
        write_output(path, &table.format())?;
        report.put("table", path.display());
    }
    report.block(table.format());
    Ok(Finding::Clean)
}

fn cmd_approx(cli: &Cli, rule: &str, space: &SpaceArgs, tie: Option<&str>, report: &mut RunReport) -> Run {
    let rule = parse_rule(rule, tie, report)?;
    let params = ElectionParams::new(space.m, need_k(space.k)?, space.n)?;
    let opts = check_options(cli, space)?;
    let r = approx_ratio(&rule, &params, &opts)?;
    let m = params.m();
    report.put("space", format!("{params} ballots={}", opts.restriction.name()));
    report.put("ratio", r.ratio);
    report.put("coverage", r.coverage);
    report.put("profiles", r.profiles);
    report.put(
        "worst_profile",
        r.worst_profile.ballots().iter().map(|b| b.to_bitstring(m)).join(","),
    );
    report.put("rule_outcome", r.rule_outcome.to_bitstring(m));
    report.put("rule_cost", r.rule_cost);
    report.put("optimal", r.optimal.to_bitstring(m));
    report.put("optimal_cost", r.optimal_cost);
    Ok(Finding::Clean)
}

fn certificate_dims(m: Option<usize>, k: Option<usize>) -> std::result::Result<(usize, usize), Failure> {
    match (m, k) {
        (Some(m), Some(k)) => Ok((m, k)),
        _ => Err(usage("give --instance, or --m and --k for a certificate")),
    }
}

fn cmd_apps(cmd: &AppsCommand, report: &mut RunReport) -> Run {
    match cmd {
        AppsCommand::Minimax { rule, m, k, n } => {
            let rule = parse_rule(rule, None, report)?;
            let params = ElectionParams::new(*m, *k, *n)?;
                    report.put("params", params);
            match minimax_infinite_ratio_check(&rule, &params)? {
                MinimaxVerdict::NotApplicable => {
                    report.put("ratio", "not-applicable");
                    Ok(Finding::Clean)
                }
                MinimaxVerdict::Infinite {
                    profile,
                    outcome,
                    rule_cost,
                } => {
                    report.put("ratio", "inf");
                    report.put("profile", profile.ballots().iter().map(|b| b.to_bitstring(*m)).join(","));
                    report.put("outcome", outcome.to_bitstring(*m));
                    report.put("rule_cost", rule_cost);
                    report.put("optimal_cost", 0);
                    Ok(Finding::Violation)
                }
            }
        }
        AppsCommand::Pb {
            rule,
            profile,
            feasible_ballots,
        } => {
            let rule = parse_rule(rule, None, report)?;
            let text = read_input(profile, report)?;
            let p = in_file(profile, parse_approval_profile(&text))?;
            let inst = BudgetInstance::from_profile(&p, *feasible_ballots)?;
            let funded = inst.fund(&rule)?;
                    report.put("projects", inst.projects);
            report.put("slots", inst.slots);
            report.put("ballots", inst.restriction().name());
            report.put("funded", funded.to_bitstring(inst.projects));
            Ok(Finding::Clean)
        }
        AppsCommand::Classify {
            rule,
            instance,
            realizable_only,
            m,
            k,
            n,
        } => {
            let rule = parse_rule(rule, None, report)?;
                    let mech = classification_adapter(rule.clone());
            let Some(path) = instance else {
                let (m, k) = certificate_dims(*m, *k)?;
                let Some(cert) = mech.infinite_ratio_certificate(m, k, *n)? else {
                    report.put("ratio", "not-applicable");
                    return Ok(Finding::Clean);
                };
                let labels = cert
                    .dataset
                    .labelings()
                    .iter()
                    .map(|l| l.iter().map(|&b| if b { '+' } else { '-' }).collect::<String>())
                    .join(",");
                report.put("ratio", "inf");
                report.put("dataset", labels);
                report.put("classifier", cert.classifier.to_bitstring(m));
                report.put("mechanism_risk", cert.mechanism_risk);
                report.put("erm_risk", cert.erm_risk);
                return Ok(Finding::Violation);
            };
            let text = read_input(path, report)?;
            let mut inst = in_file(path, parse_classification_instance(&text))?;
            inst.realizable_only = *realizable_only;
            let h = mech.classify(&inst)?;
            let best = erm(&inst, &TieOrder::Canonical)?;
            let m = inst.points();
            report.put("classifier", h.to_bitstring(m));
            report.put("risk", global_risk(h.set(), &inst));
            report.put("erm", best.to_bitstring(m));
            report.put("erm_risk", global_risk(best.set(), &inst));
            Ok(Finding::Clean)
        }
        AppsCommand::Facility { rule, instance, m, k, n } => {
            let rule = parse_rule(rule, None, report)?;
                    let mech = facility_adapter(rule.clone());
            let Some(path) = instance else {
                let (m, k) = certificate_dims(*m, *k)?;
                let Some(cert) = mech.infinite_ratio_certificate(m, k, *n)? else {
                    report.put("ratio", "not-applicable");
                    return Ok(Finding::Clean);
                };
                report.put("ratio", "inf");
                report.put("agents", cert.instance.agents.iter().map(|a| a.to_bitstring(m)).join(","));
                report.put("location", cert.location.to_bitstring(m));
                report.put("max_cost", cert.max_cost);
                report.put("total_cost", cert.total_cost);
                return Ok(Finding::Violation);
            };
            let text = read_input(path, report)?;
            let inst = in_file(path, parse_facility_instance(&text))?;
            let loc = mech.locate(&inst)?;
            let (mx, tot) = facility_costs(&inst, loc)?;
            let (omx, otot) = inst.optimal_costs();
            report.put("location", loc.to_bitstring(inst.dimension));
            report.put("max_cost", mx);
            report.put("total_cost", tot);
            report.put("optimal_max_cost", omx);
            report.put("optimal_total_cost", otot);
            Ok(Finding::Clean)
        }
    }
}

fn dispatch(cli: &Cli, report: &mut RunReport) -> Run {
    match &cli.command {
        Command::Eval { rule, profile, tie } => cmd_eval(rule, profile, tie.as_deref(), report),
        Command::Check(args) => cmd_check(cli, args, report),
        Command::Reduce {
            ranking,
            k,
            emit_approval,
        } => cmd_reduce(ranking, *k, emit_approval.as_deref(), report),
        Command::Counterexample { rule, m, k, x, y, tie } => {
            cmd_counterexample(rule, *m, *k, (*x, *y), tie.as_deref(), report)
        }
        Command::Search(args) => cmd_search(cli, args, report),
        Command::Decode { map, model, table_out } => cmd_decode(map, model, table_out.as_deref(), report),
        Command::Approx { rule, space, tie } => cmd_approx(cli, rule, space, tie.as_deref(), report),
        Command::Apps(cmd) => cmd_apps(cmd, report),
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Parse { .. }
        | Error::InvalidParams(_)
        | Error::DimensionMismatch(_)
        | Error::InvalidWeights(_)
        | Error::UnsupportedAxiom { .. } => 2,
        Error::CapExceeded { .. } => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = std::env::args().skip(1).join(" ");
    let mut report = RunReport::new(&command, cli.seed);
    let start = Instant::now();
    let result = dispatch(&cli, &mut report);
    eprintln!("wall: {:.3}s", start.elapsed().as_secs_f64());
    match result {
        Ok(finding) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(match finding {
                Finding::Clean => 0,
                Finding::Violation => 10,
                Finding::Timeout => 4,
            })
        }
        Err(Failure { error, path }) => {
            match path {
                Some(p) => eprintln!("error: {}: {error}", p.display()),
                None => eprintln!("error: {error}"),
            }
            ExitCode::from(exit_code(&error))
        }
    }
}

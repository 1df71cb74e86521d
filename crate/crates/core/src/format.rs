//! Plain-text election files.
//!
//! Approval profile: header `m k n`, then one bit-string of length `m` per
//! agent. Ranking profile: header `m n`, then one space-separated
//! permutation of `0..m` per agent, most preferred first. Blank lines and
//! lines starting with `#` are ignored; line numbers in errors are 1-based
//! physical lines.

use std::fmt::Write;

use itertools::Itertools;

use crate::election::{AltSet, ApprovalProfile, ElectionParams, Ranking, RankingProfile};
use crate::error::{parse_err, Result};

/// Non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_usizes(line_no: usize, line: &str, expected: usize) -> Result<Vec<usize>> {
    let vals = line
        .split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| parse_err(line_no, format!("`{t}` is not a nonnegative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    if vals.len() != expected {
        return Err(parse_err(
            line_no,
            format!("expected {expected} integers, found {}", vals.len()),
        ));
    }
    Ok(vals)
}

pub fn parse_approval_profile(text: &str) -> Result<ApprovalProfile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `m k n` header"))?;
    let h = parse_usizes(hl, header, 3)?;
    let params =
        ElectionParams::new(h[0], h[1], h[2]).map_err(|e| parse_err(hl, e.to_string()))?;
    let mut ballots = Vec::with_capacity(params.n());
    let mut last = hl;
    for (ln, line) in lines {
        if ballots.len() == params.n() {
            return Err(parse_err(ln, format!("more than n = {} ballots", params.n())));
        }
        let b = AltSet::parse_bitstring(line, params.m()).map_err(|e| parse_err(ln, e))?;
        ballots.push(b);
        last = ln;
    }
    if ballots.len() != params.n() {
        return Err(parse_err(
            last + 1,
            format!("found {} ballots, expected n = {}", ballots.len(), params.n()),
        ));
    }
    ApprovalProfile::new(params, ballots).map_err(|e| parse_err(hl, e.to_string()))
}

pub fn format_approval_profile(profile: &ApprovalProfile) -> String {
    let p = profile.params();
    let mut out = format!("{} {} {}\n", p.m(), p.k(), p.n());
    for b in profile.ballots() {
        let _ = writeln!(out, "{}", b.to_bitstring(p.m()));
    }
    out
}

pub fn parse_ranking_profile(text: &str) -> Result<RankingProfile> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "missing `m n` header"))?;
    let h = parse_usizes(hl, header, 2)?;
    let (m, n) = (h[0], h[1]);
    if m == 0 || n == 0 {
        return Err(parse_err(hl, "m and n must be positive"));
    }
    let mut rankings = Vec::with_capacity(n);
    let mut last = hl;
    for (ln, line) in lines {
        if rankings.len() == n {
            return Err(parse_err(ln, format!("more than n = {n} rankings")));
        }
        let order = parse_usizes(ln, line, m)?;
        rankings.push(Ranking::new(order).map_err(|e| parse_err(ln, e.to_string()))?);
        last = ln;
    }
    if rankings.len() != n {
        return Err(parse_err(
            last + 1,
            format!("found {} rankings, expected n = {n}", rankings.len()),
        ));
    }
    RankingProfile::new(m, rankings).map_err(|e| parse_err(hl, e.to_string()))
}

pub fn format_ranking_profile(profile: &RankingProfile) -> String {
    let mut out = format!("{} {}\n", profile.m(), profile.n());
    for r in profile.rankings() {
        let _ = writeln!(out, "{}", r.order().iter().join(" "));
    }
    out
}

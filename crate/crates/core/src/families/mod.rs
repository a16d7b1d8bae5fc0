//! Parameterised families of rational and pretzel links with predicted
//! unlinking numbers, and a harness that checks the predictions against the
//! engines point by point.
//!
//! The registry is the embedded file `data/families.toml`; its header
//! documents the record format and the formula language.

pub mod expr;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::RangeInclusive;
use std::str::FromStr;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bj::BjEngine;
use crate::bounds::pretzel_bounds;
use crate::conway::{PretzelWord, RationalWord};
use crate::error::{Error, Result};
use crate::pretzel::{
    pretzel_components, pretzel_diagram_unlink, pretzel_is_trivial, PretzelEngine,
};
use crate::rational::{crossing_number, key_of};

pub use expr::{Cond, Env, Expr, Piecewise};

const REGISTRY_TEXT: &str = include_str!("../../data/families.toml");

/// Instances must have fewer crossings than this to be checked.
pub const DEFAULT_BUDGET: u64 = 48;

const DEFAULT_RANGE: RangeInclusive<i64> = 0..=5;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    #[default]
    Verified,
    Suspect,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    /// Entries with an optional repeat count.
    Rational(Vec<(Expr, Option<Expr>)>),
    Pretzel([Expr; 3]),
}

impl Template {
    fn parse(src: &str) -> Result<Self> {
        let src = src.trim();
        if let Some(inner) = src.strip_prefix("P(").and_then(|s| s.strip_suffix(')')) {
            let cols = inner
                .split(',')
                .map(Expr::parse)
                .collect::<Result<Vec<_>>>()?;
            return <[Expr; 3]>::try_from(cols)
                .map(Template::Pretzel)
                .map_err(|_| Error::Registry(format!("pretzel template {src:?} needs 3 columns")));
        }
        let entries = src
            .split_whitespace()
            .map(|tok| match split_repeat(tok) {
                Some((e, n)) => Ok((Expr::parse(e)?, Some(Expr::parse(n)?))),
                None => Ok((Expr::parse(tok)?, None)),
            })
            .collect::<Result<Vec<_>>>()?;
        if entries.is_empty() {
            return Err(Error::Registry("empty template".into()));
        }
        Ok(Template::Rational(entries))
    }

    /// Parameters in order of first appearance.
    fn params(&self) -> Vec<String> {
        let exprs: Vec<&Expr> = match self {
            Template::Rational(es) => es
                .iter()
                .flat_map(|(e, n)| std::iter::once(e).chain(n.as_ref()))
                .collect(),
            Template::Pretzel(cols) => cols.iter().collect(),
        };
        let mut seen = Vec::new();
        for v in exprs.into_iter().flat_map(|e| e.vars()) {
            if !seen.contains(&v) {
                seen.push(v);
            }
        }
        seen
    }

    fn is_pretzel(&self) -> bool {
        matches!(self, Template::Pretzel(_))
    }
}

fn split_repeat(tok: &str) -> Option<(&str, &str)> {
    let mut depth = 0i32;
    for (i, c) in tok.char_indices() {
        match c {
            '(' => depth += 1,
            ')' => depth -= 1,
            '^' if depth == 0 => return Some((&tok[..i], &tok[i + 1..])),
            _ => {}
        }
    }
    None
}

/// Parameter ranges, written `k=1..5,m=0..6` (a single value `k=3` is allowed).
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Grid(pub BTreeMap<String, RangeInclusive<i64>>);

impl Grid {
    pub fn range(&self, param: &str) -> RangeInclusive<i64> {
        self.0.get(param).cloned().unwrap_or(DEFAULT_RANGE)
    }

    /// `self` with the ranges of `other` taking precedence.
    pub fn overlay(&self, other: &Grid) -> Grid {
        let mut g = self.clone();
        g.0.extend(other.0.iter().map(|(k, v)| (k.clone(), v.clone())));
        g
    }
}

impl FromStr for Grid {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Registry(format!("bad grid {s:?}"));
        let mut map = BTreeMap::new();
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (name, range) = part.split_once('=').ok_or_else(bad)?;
            let num = |t: &str| t.trim().parse::<i64>().map_err(|_| bad());
            let r = match range.split_once("..") {
                Some((lo, hi)) => num(lo)?..=num(hi.trim_start_matches('='))?,
                None => num(range)?..=num(range)?,
            };
            map.insert(name.trim().to_string(), r);
        }
        Ok(Grid(map))
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|(k, r)| format!("{k}={}..{}", r.start(), r.end()))
            .collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    id: String,
    template: String,
    #[serde(default)]
    domain: Vec<String>,
    components: u8,
    u_bj: Option<String>,
    u_m: Option<String>,
    delta: Option<String>,
    grid: Option<String>,
    #[serde(default)]
    status: Status,
    note: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRegistry {
    family: Vec<RawEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyEntry {
    pub id: String,
    pub template_text: String,
    pub template: Template,
    pub params: Vec<String>,
    pub domain: Vec<Cond>,
    pub components: u8,
    pub u_bj: Option<Piecewise>,
    pub u_m: Option<Piecewise>,
    pub delta: Option<Piecewise>,
    pub grid: Grid,
    pub status: Status,
    pub note: Option<String>,
}

/// Predicted values at one parameter point; `None` where nothing is stated.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Predicted {
    pub u_bj: Option<i64>,
    pub u_m: Option<i64>,
    pub delta: Option<i64>,
}

impl FamilyEntry {
    fn from_raw(raw: RawEntry) -> Result<Self> {
        let ctx = |e: Error| Error::Registry(format!("{}: {e}", raw.id));
        let template = Template::parse(&raw.template).map_err(ctx)?;
        let params = template.params();
        let domain = raw
            .domain
            .iter()
            .map(|c| Cond::parse(c))
            .collect::<Result<Vec<_>>>()
            .map_err(ctx)?;
        let formula = |s: &Option<String>| s.as_deref().map(Piecewise::parse).transpose();
        let u_bj = formula(&raw.u_bj).map_err(ctx)?;
        let u_m = formula(&raw.u_m).map_err(ctx)?;
        let delta = formula(&raw.delta).map_err(ctx)?;
        let grid = raw
            .grid
            .as_deref()
            .map(str::parse)
            .transpose()
            .map_err(ctx)?
            .unwrap_or_default();
        let entry = FamilyEntry {
            id: raw.id,
            template_text: raw.template,
            template,
            params,
            domain,
            components: raw.components,
            u_bj,
            u_m,
            delta,
            grid,
            status: raw.status,
            note: raw.note,
        };
        entry.validate()?;
        Ok(entry)
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Registry(format!("{}: {msg}", self.id)));
        let max_components = if self.template.is_pretzel() { 3 } else { 2 };
        if !(1..=max_components).contains(&self.components) {
            return fail(format!("component count {}", self.components));
        }
        if self.u_bj.is_none() && self.u_m.is_none() && self.delta.is_none() {
            return fail("no prediction".into());
        }
        let known: BTreeSet<&String> = self.params.iter().collect();
        let mut used = BTreeSet::new();
        for c in &self.domain {
            used.extend(c.vars());
        }
        for p in [&self.u_bj, &self.u_m, &self.delta].into_iter().flatten() {
            used.extend(p.vars());
        }
        used.extend(self.grid.0.keys().cloned());
        if let Some(v) = used.iter().find(|v| !known.contains(v)) {
            return fail(format!("{v} is not a template parameter"));
        }
        Ok(())
    }

    pub fn is_pretzel(&self) -> bool {
        self.template.is_pretzel()
    }

    pub fn in_domain(&self, env: &Env) -> Result<bool> {
        for c in &self.domain {
            if !c.holds(env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The stated values at `env`. A missing gap formula is `u_m - u_bj`.
    pub fn predict(&self, env: &Env) -> Result<Predicted> {
        let at = |p: &Option<Piecewise>| p.as_ref().map_or(Ok(None), |p| p.eval(env));
        let u_bj = at(&self.u_bj)?;
        let u_m = at(&self.u_m)?;
        let delta = match &self.delta {
            Some(p) => p.eval(env)?,
            None => u_m.zip(u_bj).map(|(m, b)| m - b),
        };
        Ok(Predicted { u_bj, u_m, delta })
    }

    /// Every parameter point of `grid` (over the entry's own grid), in order,
    /// split into those inside and outside the domain.
    fn points(&self, grid: &Grid) -> Result<(Vec<Env>, usize)> {
        let grid = self.grid.overlay(grid);
        let mut points = vec![Env::new()];
        for p in &self.params {
            points = points
                .into_iter()
                .flat_map(|env| {
                    grid.range(p).map(move |v| {
                        let mut e = env.clone();
                        e.insert(p.clone(), v);
                        e
                    })
                })
                .collect();
        }
        let mut inside = Vec::new();
        let mut outside = 0;
        for env in points {
            if self.in_domain(&env)? {
                inside.push(env);
            } else {
                outside += 1;
            }
        }
        Ok((inside, outside))
    }
}

/// Parses and validates a registry in the format of `data/families.toml`.
pub fn parse_registry(text: &str) -> Result<Vec<FamilyEntry>> {
    let raw: RawRegistry = toml::from_str(text).map_err(|e| Error::Registry(e.to_string()))?;
    let entries = raw
        .family
        .into_iter()
        .map(FamilyEntry::from_raw)
        .collect::<Result<Vec<_>>>()?;
    let mut ids = BTreeSet::new();
    if let Some(dup) = entries.iter().find(|e| !ids.insert(&e.id)) {
        return Err(Error::Registry(format!("duplicate id {}", dup.id)));
    }
    Ok(entries)
}

/// The embedded registry, parsed once.
pub fn registry() -> &'static [FamilyEntry] {
    static REGISTRY: OnceLock<Vec<FamilyEntry>> = OnceLock::new();
    REGISTRY.get_or_init(|| parse_registry(REGISTRY_TEXT).expect("embedded registry is valid"))
}

pub fn find(id: &str) -> Option<&'static FamilyEntry> {
    registry().iter().find(|e| e.id == id)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Instance {
    Rational(RationalWord),
    Pretzel(PretzelWord),
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Rational(w) => write!(f, "{w}"),
            Instance::Pretzel(w) => write!(f, "P({w})"),
        }
    }
}

fn show_env(env: &Env) -> String {
    env.iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(",")
}

pub fn instantiate(entry: &FamilyEntry, params: &Env) -> Result<Instance> {
    let out = |msg: String| Error::OutOfDomain(format!("{}: {msg}", entry.id));
    if let Some(p) = entry.params.iter().find(|p| !params.contains_key(*p)) {
        return Err(out(format!("missing parameter {p}")));
    }
    if let Some(p) = params.keys().find(|p| !entry.params.contains(p)) {
        return Err(out(format!("unknown parameter {p}")));
    }
    if let Some(c) = entry
        .domain
        .iter()
        .find(|c| !c.holds(params).unwrap_or(false))
    {
        return Err(out(format!("{c} fails at {}", show_env(params))));
    }
    match &entry.template {
        Template::Rational(entries) => {
            let mut word = Vec::new();
            for (e, n) in entries {
                let v = e.eval(params)?;
                let times = match n {
                    Some(n) => usize::try_from(n.eval(params)?)
                        .map_err(|_| out(format!("negative repeat count {n}")))?,
                    None => 1,
                };
                word.extend(std::iter::repeat_n(v, times));
            }
            RationalWord::new(word)
                .map(Instance::Rational)
                .map_err(|e| out(e.to_string()))
        }
        Template::Pretzel(cols) => {
            let c = [
                cols[0].eval(params)?,
                cols[1].eval(params)?,
                cols[2].eval(params)?,
            ];
            Ok(Instance::Pretzel(PretzelWord(c)))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Match,
    Mismatch,
    Skip,
}

/// Values computed by the engines at one point.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Computed {
    pub components: Option<u8>,
    /// `None` for pretzels whose columns are not all odd.
    pub u_bj: Option<u64>,
    pub u_m: Option<u64>,
    pub delta: Option<u64>,
    /// Lower bound from linking numbers and signature (pretzels only).
    pub lower_bound: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PointReport {
    pub params: Env,
    pub instance: Option<String>,
    pub crossings: Option<u64>,
    pub computed: Computed,
    pub predicted: Predicted,
    pub outcome: Outcome,
    pub notes: Vec<String>,
}

impl PointReport {
    fn skip(params: Env, reason: String) -> Self {
        PointReport {
            params,
            instance: None,
            crossings: None,
            computed: Computed::default(),
            predicted: Predicted::default(),
            outcome: Outcome::Skip,
            notes: vec![reason],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub id: String,
    pub status: Status,
    pub grid: String,
    pub points: Vec<PointReport>,
    /// Grid points rejected by the domain conditions.
    pub outside_domain: usize,
}

impl VerificationReport {
    fn count(&self, o: Outcome) -> usize {
        self.points.iter().filter(|p| p.outcome == o).count()
    }

    pub fn matches(&self) -> usize {
        self.count(Outcome::Match)
    }

    pub fn mismatches(&self) -> usize {
        self.count(Outcome::Mismatch)
    }

    pub fn skips(&self) -> usize {
        self.count(Outcome::Skip)
    }

    /// No mismatches; skips are allowed.
    pub fn is_clean(&self) -> bool {
        self.mismatches() == 0
    }

    /// One summary line.
    pub fn summary(&self) -> String {
        let tag = match self.status {
            Status::Verified => "",
            Status::Suspect => " (suspect)",
        };
        format!(
            "{}{tag}: {} match, {} mismatch, {} skip",
            self.id,
            self.matches(),
            self.mismatches(),
            self.skips()
        )
    }
}

fn compare(
    notes: &mut Vec<String>,
    what: &str,
    predicted: Option<i64>,
    computed: Option<u64>,
) -> bool {
    match (predicted, computed) {
        (Some(p), Some(c)) if p != c as i64 => {
            notes.push(format!("{what}: predicted {p}, computed {c}"));
            false
        }
        _ => true,
    }
}

/// Checks registry entries against the engines. Engines and their caches are
/// shared across all points and entries.
#[derive(Debug, Default)]
pub struct Verifier {
    pretzels: PretzelEngine,
    budget: Option<u64>,
}

impl Verifier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_engine(bj: BjEngine) -> Self {
        Verifier {
            pretzels: PretzelEngine::with_engine(bj),
            budget: None,
        }
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn budget(&self) -> u64 {
        self.budget.unwrap_or(DEFAULT_BUDGET)
    }

    pub fn pretzels(&self) -> &PretzelEngine {
        &self.pretzels
    }

    pub fn rational(&self) -> &BjEngine {
        self.pretzels.rational()
    }

    /// Checks every in-domain point of the entry's grid overlaid with `grid`.
    pub fn verify(&self, entry: &FamilyEntry, grid: &Grid) -> VerificationReport {
        let effective = entry.grid.overlay(grid);
        let (points, outside_domain) = match entry.points(grid) {
            Ok(p) => p,
            Err(e) => (Vec::new(), {
                log::warn!("{}: {e}", entry.id);
                0
            }),
        };
        let points = points
            .into_par_iter()
            .map(|env| self.check(entry, env))
            .collect();
        VerificationReport {
            id: entry.id.clone(),
            status: entry.status,
            grid: entry
                .params
                .iter()
                .map(|p| {
                    let r = effective.range(p);
                    format!("{p}={}..{}", r.start(), r.end())
                })
                .collect::<Vec<_>>()
                .join(","),
            points,
            outside_domain,
        }
    }

    pub fn verify_all(&self, grid: &Grid) -> Vec<VerificationReport> {
        registry().iter().map(|e| self.verify(e, grid)).collect()
    }

    fn check(&self, entry: &FamilyEntry, env: Env) -> PointReport {
        let instance = match instantiate(entry, &env) {
            Ok(i) => i,
            Err(e) => return PointReport::skip(env, e.to_string()),
        };
        let predicted = match entry.predict(&env) {
            Ok(p) => p,
            Err(e) => return PointReport::skip(env, e.to_string()),
        };
        let mut report = PointReport {
            instance: Some(instance.to_string()),
            predicted,
            ..PointReport::skip(env, String::new())
        };
        report.notes.clear();
        let result = match &instance {
            Instance::Rational(w) => self.check_rational(w, &mut report),
            Instance::Pretzel(w) => self.check_pretzel(w, &mut report),
        };
        if let Err(e) = result {
            report.outcome = Outcome::Skip;
            report.notes.push(e.to_string());
            return report;
        }
        if report.outcome == Outcome::Skip {
            return report;
        }
        let notes = &mut report.notes;
        let c = report.computed;
        let mut ok = true;
        if c.components != Some(entry.components) {
            notes.push(format!(
                "components: declared {}, computed {}",
                entry.components,
                c.components.map_or("?".into(), |n| n.to_string())
            ));
            ok = false;
        }
        ok &= compare(notes, "u_bj", predicted.u_bj, c.u_bj);
        ok &= compare(notes, "u_m", predicted.u_m, c.u_m);
        ok &= compare(notes, "delta", predicted.delta, c.delta);
        if c.u_bj.is_none() {
            // Without a computed u_BJ the prediction is held to the bounds.
            if let (Some(p), Some(lower), Some(u_m)) = (predicted.u_bj, c.lower_bound, c.u_m) {
                if p < lower as i64 || p > u_m as i64 {
                    notes.push(format!("u_bj: predicted {p} outside [{lower}, {u_m}]"));
                    ok = false;
                }
                if let Some(d) = predicted.delta {
                    if d != u_m as i64 - p {
                        notes.push(format!(
                            "delta: predicted {d}, u_m - predicted u_bj is {}",
                            u_m as i64 - p
                        ));
                        ok = false;
                    }
                }
                notes.push("u_bj checked against bounds only".into());
            }
        }
        for (what, p) in [
            ("u_bj", predicted.u_bj),
            ("u_m", predicted.u_m),
            ("delta", predicted.delta),
        ] {
            let stated = match what {
                "u_bj" => &entry.u_bj,
                "u_m" => &entry.u_m,
                _ => &entry.delta,
            };
            if p.is_none() && stated.is_some() {
                notes.push(format!("{what}: no formula branch applies"));
            }
        }
        report.outcome = if ok {
            Outcome::Match
        } else {
            Outcome::Mismatch
        };
        report
    }

    fn check_rational(&self, w: &RationalWord, report: &mut PointReport) -> Result<()> {
        let key = key_of(w);
        report.computed.components = Some(key.component_count());
        if key.is_trivial() {
            report.crossings = Some(0);
            report.computed.u_bj = Some(0);
            report.computed.u_m = Some(0);
            report.computed.delta = Some(0);
            report.outcome = Outcome::Match;
            return Ok(());
        }
        let n = crossing_number(&key)?;
        report.crossings = Some(n);
        if n >= self.budget() {
            report.outcome = Outcome::Skip;
            report
                .notes
                .push(format!("{n} crossings, budget {}", self.budget()));
            return Ok(());
        }
        let gap = self.rational().gap(&key)?;
        let replayed = gap.replay();
        if !replayed {
            report.notes.push("witness replay failed".into());
        }
        report.computed.u_bj = Some(gap.u_bj);
        report.computed.u_m = Some(gap.u_m);
        report.computed.delta = Some(gap.delta_bj);
        report.outcome = if replayed {
            Outcome::Match
        } else {
            Outcome::Mismatch
        };
        Ok(())
    }

    fn check_pretzel(&self, w: &PretzelWord, report: &mut PointReport) -> Result<()> {
        let n: u64 = w.columns().iter().map(|a| a.unsigned_abs()).sum();
        report.crossings = Some(n);
        report.computed.components = Some(pretzel_components(w));
        if n >= self.budget() {
            report.outcome = Outcome::Skip;
            report
                .notes
                .push(format!("{n} crossings, budget {}", self.budget()));
            return Ok(());
        }
        let unlink = pretzel_diagram_unlink(w)?;
        let cols = w.columns();
        let changed = PretzelWord(std::array::from_fn(|i| {
            cols[i] - 2 * unlink.witness.0[i] as i64 * cols[i].signum()
        }));
        let replayed = pretzel_is_trivial(&changed)?;
        if !replayed {
            report.notes.push("witness replay failed".into());
        }
        report.computed.u_m = Some(unlink.u_d);
        report.computed.lower_bound = Some(pretzel_bounds(w).lower_bound);
        if cols.iter().all(|a| a % 2 != 0 && *a > 0) {
            let u_bj = self.pretzels.u_bj_odd_pretzel(w)?;
            report.computed.u_bj = Some(u_bj);
            report.computed.delta = unlink.u_d.checked_sub(u_bj);
        }
        report.outcome = if replayed {
            Outcome::Match
        } else {
            Outcome::Mismatch
        };
        Ok(())
    }
}

/// [`Verifier::verify`] with fresh engines and the default budget.
pub fn verify(entry: &FamilyEntry, grid: &Grid) -> VerificationReport {
    Verifier::new().verify(entry, grid)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(pairs: &[(&str, i64)]) -> Env {
        pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
    }

    fn word(entry: &str, pairs: &[(&str, i64)]) -> String {
        instantiate(find(entry).unwrap(), &env(pairs))
            .unwrap()
            .to_string()
    }

    #[test]
    fn registry_is_complete() {
        let reg = registry();
        let count = |prefix: &str| reg.iter().filter(|e| e.id.starts_with(prefix)).count();
        assert_eq!(count("table-"), 68);
        assert_eq!(count("prop2.2"), 2);
        assert_eq!(count("lemma4.2"), 3);
        assert_eq!(count("lemma4.3"), 6);
        assert_eq!(count("cor4.4"), 2);
        assert_eq!(count("thm4.5"), 1);
        assert_eq!(count("item-"), 5);
        assert_eq!(count("thm4.7"), 4);
        assert_eq!(reg.len(), 91);
        for n in 1..=68 {
            assert!(find(&format!("table-{n}")).is_some(), "table-{n}");
        }
        let suspect: Vec<&str> = reg
            .iter()
            .filter(|e| e.status == Status::Suspect)
            .map(|e| e.id.as_str())
            .collect();
        assert_eq!(
            suspect,
            ["table-44", "table-52", "table-57", "table-60", "thm4.7-1"]
        );
    }

    #[test]
    fn entry_examples() {
        let t1 = find("table-1").unwrap();
        assert_eq!(t1.components, 2);
        assert_eq!(t1.params, ["k"]);
        let p = t1.predict(&env(&[("k", 3)])).unwrap();
        assert_eq!((p.u_bj, p.delta, p.u_m), (Some(4), Some(3), None));

        let t = find("thm4.5").unwrap();
        assert_eq!(t.params, ["k", "m", "n"]);
        let p = t.predict(&env(&[("k", 2), ("m", 4), ("n", 1)])).unwrap();
        assert_eq!((p.u_bj, p.u_m, p.delta), (Some(3), Some(3), Some(0)));

        let c = find("cor4.4a").unwrap();
        let at = |k, l, m| {
            c.predict(&env(&[("k", k), ("l", l), ("m", m)]))
                .unwrap()
                .delta
        };
        assert_eq!(at(3, 0, 3), Some(2));
        assert_eq!(at(5, 2, 4), Some(2));

        let l5 = find("lemma4.3-5").unwrap();
        let p = l5.predict(&env(&[("k", 3), ("l", 0), ("m", 3)])).unwrap();
        assert_eq!((p.u_bj, p.u_m, p.delta), (Some(3), Some(5), Some(2)));
        let gap_region = l5.predict(&env(&[("k", 1), ("l", 2), ("m", 4)])).unwrap();
        assert_eq!(gap_region.u_m, None);

        assert_eq!(find("item-5").unwrap().params, ["k", "i"]);
    }

    #[test]
    fn instantiation() {
        assert_eq!(word("table-1", &[("k", 1)]), "4 1 4");
        assert_eq!(word("thm4.5", &[("k", 2), ("m", 2), ("n", 1)]), "4 4 1 2");
        assert_eq!(word("table-24", &[("k", 2)]), "9 1 5 4");
        assert_eq!(word("item-3", &[("k", 1)]), "8 1 5 2");
        assert_eq!(word("item-2", &[("k", 2)]), "6 1 6 3");
        assert_eq!(word("item-5", &[("k", 2), ("i", 2)]), "4 4 4 4 1 4");
        assert_eq!(
            word("thm4.7-3", &[("k", 2), ("l", 1), ("m", 1)]),
            "P(5,2,3)"
        );

        let t1 = find("table-1").unwrap();
        for bad in [env(&[("k", 0)]), env(&[]), env(&[("k", 1), ("q", 1)])] {
            assert!(matches!(instantiate(t1, &bad), Err(Error::OutOfDomain(_))));
        }
        let l = find("thm4.7-1").unwrap();
        let e = instantiate(l, &env(&[("k", 1), ("l", 2), ("m", 1)]));
        assert!(matches!(e, Err(Error::OutOfDomain(_))));
    }

    #[test]
    fn grids() {
        let g: Grid = "k=1..5, m=0..=6,n=3".parse().unwrap();
        assert_eq!(g.range("k"), 1..=5);
        assert_eq!(g.range("m"), 0..=6);
        assert_eq!(g.range("n"), 3..=3);
        assert_eq!(g.range("z"), DEFAULT_RANGE);
        assert!("k".parse::<Grid>().is_err());
        assert!("k=a..2".parse::<Grid>().is_err());
        let o = g.overlay(&"k=2..2".parse().unwrap());
        assert_eq!(o.range("k"), 2..=2);
        assert_eq!(o.range("m"), 0..=6);
    }

    #[test]
    fn registry_validation() {
        let ok = "[[family]]\nid = \"a\"\ntemplate = \"(2k) 1\"\ncomponents = 1\nu_bj = \"k\"\n";
        assert_eq!(parse_registry(ok).unwrap().len(), 1);
        let cases = [
            ok.replace("u_bj = \"k\"", "u_bj = \"j\""),
            ok.replace("u_bj = \"k\"\n", ""),
            ok.replace("components = 1", "components = 3"),
            format!("{ok}{ok}"),
            ok.replace("(2k) 1", "(2k 1"),
            ok.replace("u_bj", "u_xx"),
            format!("{ok}grid = \"z=1..2\"\n"),
        ];
        for c in cases {
            assert!(matches!(parse_registry(&c), Err(Error::Registry(_))), "{c}");
        }
    }

    #[test]
    fn spec_verification_examples() {
        let v = Verifier::new();
        let r = v.verify(find("table-1").unwrap(), &"k=1..5".parse().unwrap());
        assert_eq!((r.matches(), r.points.len()), (5, 5), "{r:#?}");
        let r = v.verify(find("table-24").unwrap(), &"k=1..4".parse().unwrap());
        assert!(r.is_clean() && r.matches() == 4, "{r:#?}");
        let r = v.verify(find("prop2.2a").unwrap(), &"p=1..5,q=1..5".parse().unwrap());
        assert_eq!(r.matches(), 25, "{r:#?}");
    }

    #[test]
    fn mismatches_and_skips_are_reported() {
        let text =
            "[[family]]\nid = \"x\"\ntemplate = \"(2k+2) 1 (2k+2)\"\ndomain = [\"k >= 1\"]\n\
                    components = 1\nu_bj = \"k\"\n";
        let entry = &parse_registry(text).unwrap()[0];
        let r = Verifier::new()
            .with_budget(12)
            .verify(entry, &"k=0..5".parse().unwrap());
        assert_eq!(r.outside_domain, 1);
        assert_eq!(r.points.len(), 5);
        // Only k=1 (9 crossings) stays under the budget.
        assert_eq!(r.mismatches(), 1);
        assert_eq!(r.skips(), 4);
        assert!(r.points[1].notes[0].contains("budget 12"));
        let first = &r.points[0];
        assert!(first.notes.iter().any(|n| n.starts_with("components")));
        assert!(first
            .notes
            .iter()
            .any(|n| n.starts_with("u_bj: predicted 1, computed 2")));
    }

    #[test]
    fn pretzel_entries_use_bounds() {
        let r = verify(
            find("thm4.7-4").unwrap(),
            &"k=1..3,l=0..2,m=1..3".parse().unwrap(),
        );
        assert!(r.is_clean(), "{r:#?}");
        assert!(r
            .points
            .iter()
            .all(|p| p.notes.iter().any(|n| n.contains("bounds only"))));
        let r = verify(
            find("thm4.7-1").unwrap(),
            &"k=1..3,l=1..3,m=1..3".parse().unwrap(),
        );
        assert_eq!(r.matches(), 0);
        assert!(r.mismatches() > 0);
    }

    #[test]
    fn monotone_gap_growth() {
        let v = Verifier::new();
        for e in registry().iter().filter(|e| {
            e.id.starts_with("table-") && e.delta.as_ref().is_some_and(|d| d.to_string() == "k")
        }) {
            let r = v.verify(e, &"k=1..4".parse().unwrap());
            let deltas: Vec<u64> = r.points.iter().filter_map(|p| p.computed.delta).collect();
            assert_eq!(deltas.len(), 4, "{}", e.id);
            assert!(
                deltas.windows(2).all(|w| w[1] > w[0]),
                "{}: {deltas:?}",
                e.id
            );
        }
    }
}

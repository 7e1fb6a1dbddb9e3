//! Running every ranking method over one environment and comparing the
//! orderings they produce.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::backlink::{eigen_rank, BacklinkMode, DEFAULT_TOLERANCE};
use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::num::{render_exact, render_truncated, to_f64};
use crate::relation::{baseline_page_score, rank, Method, RankReport, RankValue, ScoredPage};
use crate::virtual_links::{real_page_score, virtual_page_score, Variant, VirtualConfig};

/// Decimal places in text output.
pub const DISPLAY_PLACES: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankOptions {
    pub virtual_config: VirtualConfig,
    pub backlink_mode: BacklinkMode,
    pub tolerance: f64,
}

impl Default for RankOptions {
    fn default() -> Self {
        Self {
            virtual_config: VirtualConfig::default(),
            backlink_mode: BacklinkMode::default(),
            tolerance: DEFAULT_TOLERANCE,
        }
    }
}

/// Scores and orders every page of `env` with one method.
pub fn rank_environment(
    env: &Environment,
    method: Method,
    opts: &RankOptions,
) -> Result<RankReport> {
    let score_all = |f: &(dyn Fn(&crate::model::PageSubgraph) -> Result<ScoredPage> + Sync)| {
        env.pages.par_iter().map(f).collect::<Result<Vec<_>>>()
    };
    let scored = match method {
        Method::Old => {
            let query = env.query.as_ref().ok_or(Error::MissingQuery("old"))?;
            score_all(&|p| baseline_page_score(&env.ontology, p, query))?
        }
        Method::Real => score_all(&|p| real_page_score(&env.ontology, p))?,
        Method::Nodes | Method::Edges | Method::Combined => {
            let variant = match method {
                Method::Nodes => Variant::Nodes,
                Method::Edges => Variant::Edges,
                _ => Variant::Combined,
            };
            score_all(&|p| virtual_page_score(&env.ontology, p, opts.virtual_config, variant))?
        }
        Method::Eigen => {
            if env.pages.is_empty() {
                return Ok(rank(Method::Eigen, Vec::new()));
            }
            return eigen_rank(&env.pages, opts.backlink_mode, opts.tolerance);
        }
    };
    Ok(rank(method, scored))
}

/// Kendall tau-a between two orderings of the same items, from an
/// inversion count.
pub fn kendall_tau(a: &[&str], b: &[&str]) -> f64 {
    assert_eq!(a.len(), b.len(), "orderings must cover the same items");
    let n = a.len();
    if n < 2 {
        return 1.0;
    }
    let mut seq: Vec<usize> = a
        .iter()
        .map(|id| b.iter().position(|x| x == id).expect("same item set"))
        .collect();
    let inversions = count_inversions(&mut seq);
    let pairs = (n * (n - 1) / 2) as i64;
    (pairs - 2 * inversions as i64) as f64 / pairs as f64
}

fn count_inversions(v: &mut [usize]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = count_inversions(&mut v[..mid]) + count_inversions(&mut v[mid..]);
    let mut merged = Vec::with_capacity(n);
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[i] <= v[j] {
            merged.push(v[i]);
            i += 1;
        } else {
            merged.push(v[j]);
            count += (mid - i) as u64;
            j += 1;
        }
    }
    merged.extend_from_slice(&v[i..mid]);
    merged.extend_from_slice(&v[j..]);
    v.copy_from_slice(&merged);
    count
}

#[derive(Debug, Clone, PartialEq)]
pub struct MethodColumn {
    pub method: Method,
    pub outcome: std::result::Result<RankReport, String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Agreement {
    pub first: Method,
    pub second: Method,
    pub kendall_tau: f64,
    pub same_top1: bool,
    /// Same two pages on top, in either order.
    pub same_top2: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub columns: Vec<MethodColumn>,
    pub agreements: Vec<Agreement>,
}

/// Runs the five compared methods; a failing method becomes an error column.
pub fn compare(env: &Environment, opts: &RankOptions) -> ComparisonReport {
    let columns: Vec<MethodColumn> = Method::COMPARED
        .iter()
        .map(|&method| MethodColumn {
            method,
            outcome: rank_environment(env, method, opts).map_err(|e| e.to_string()),
        })
        .collect();
    let mut agreements = Vec::new();
    for (i, a) in columns.iter().enumerate() {
        for b in &columns[i + 1..] {
            if let (Ok(ra), Ok(rb)) = (&a.outcome, &b.outcome) {
                let (oa, ob) = (ra.order(), rb.order());
                let top = |o: &[&str], k: usize| {
                    let mut t: Vec<String> = o.iter().take(k).map(|s| s.to_string()).collect();
                    t.sort();
                    t
                };
                agreements.push(Agreement {
                    first: a.method,
                    second: b.method,
                    kendall_tau: kendall_tau(&oa, &ob),
                    same_top1: oa.first() == ob.first(),
                    same_top2: top(&oa, 2) == top(&ob, 2),
                });
            }
        }
    }
    ComparisonReport {
        columns,
        agreements,
    }
}

fn display_value(value: &RankValue) -> String {
    match value {
        RankValue::Exact(s) => render_truncated(&s.score, DISPLAY_PLACES),
        RankValue::Eigen(v) => format!("{:.*}", DISPLAY_PLACES, v),
    }
}

/// One line per page: rank, id, score, relevance class, probability, bonuses.
pub fn render_listing(report: &RankReport) -> String {
    let mut out = String::new();
    for (i, entry) in report.entries.iter().enumerate() {
        let score = display_value(&entry.value);
        let (class, prob, bonuses) = match &entry.value {
            RankValue::Exact(s) => (
                format!("l={}", s.chosen_length),
                format!("P={}", render_truncated(&s.probability, DISPLAY_PLACES)),
                bonus_text(s),
            ),
            RankValue::Eigen(_) => ("-".to_owned(), "-".to_owned(), "-".to_owned()),
        };
        let _ = writeln!(
            out,
            "{}  {}  {}  {}  {}  {}",
            i + 1,
            entry.page_id,
            score,
            class,
            prob,
            bonuses
        );
    }
    out
}

fn bonus_text(s: &ScoredPage) -> String {
    match s.method {
        Method::Nodes => format!("nodes={}", render_truncated(&s.bonus_nodes, DISPLAY_PLACES)),
        Method::Edges => format!("edges={}", render_truncated(&s.bonus_edges, DISPLAY_PLACES)),
        Method::Combined => format!(
            "nodes={} edges={}",
            render_truncated(&s.bonus_nodes, DISPLAY_PLACES),
            render_truncated(&s.bonus_edges, DISPLAY_PLACES)
        ),
        _ => "-".to_owned(),
    }
}

/// Side-by-side columns, one `PS[page] = score` cell per rank.
pub fn render_table(report: &ComparisonReport) -> String {
    let headers: Vec<String> = report
        .columns
        .iter()
        .map(|c| c.method.name().to_owned())
        .collect();
    let cells: Vec<Vec<String>> = report
        .columns
        .iter()
        .map(|c| match &c.outcome {
            Ok(r) => r
                .entries
                .iter()
                .map(|e| format!("PS[{}] = {}", e.page_id, display_value(&e.value)))
                .collect(),
            Err(msg) => vec![format!("error: {msg}")],
        })
        .collect();
    let widths: Vec<usize> = headers
        .iter()
        .zip(&cells)
        .map(|(h, col)| {
            col.iter()
                .map(String::len)
                .chain([h.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let rows = cells.iter().map(Vec::len).max().unwrap_or(0);
    let mut out = String::new();
    let line = |parts: Vec<&str>| {
        parts
            .iter()
            .zip(&widths)
            .map(|(p, &w)| format!("{p:<w$}"))
            .collect::<Vec<_>>()
            .join("  ")
            .trim_end()
            .to_owned()
    };
    let _ = writeln!(
        out,
        "{}",
        line(headers.iter().map(String::as_str).collect())
    );
    let _ = writeln!(
        out,
        "{}",
        widths
            .iter()
            .map(|&w| "-".repeat(w))
            .collect::<Vec<_>>()
            .join("  ")
    );
    for r in 0..rows {
        let _ = writeln!(
            out,
            "{}",
            line(
                cells
                    .iter()
                    .map(|c| c.get(r).map(String::as_str).unwrap_or(""))
                    .collect()
            )
        );
    }
    if !report.agreements.is_empty() {
        let _ = writeln!(out);
        let pairs: Vec<String> = report
            .agreements
            .iter()
            .map(|a| format!("{}/{}", a.first, a.second))
            .collect();
        let w = pairs
            .iter()
            .map(String::len)
            .max()
            .unwrap_or(0)
            .max("agreement".len());
        let _ = writeln!(out, "{:<w$}  kendall_tau  top1  top2", "agreement");
        for (a, pair) in report.agreements.iter().zip(&pairs) {
            let _ = writeln!(
                out,
                "{pair:<w$}  {:<+11.5}  {:<4}  {}",
                a.kendall_tau,
                yes_no(a.same_top1),
                yes_no(a.same_top2)
            );
        }
    }
    out
}

fn yes_no(flag: bool) -> &'static str {
    if flag {
        "yes"
    } else {
        "no"
    }
}

fn exact_fields(value: &RankValue) -> [String; 5] {
    match value {
        RankValue::Exact(s) => [
            render_exact(&s.score),
            s.chosen_length.to_string(),
            render_exact(&s.probability),
            render_exact(&s.bonus_nodes),
            render_exact(&s.bonus_edges),
        ],
        RankValue::Eigen(_) => Default::default(),
    }
}

const CSV_HEADER: &str =
    "method,rank,page_id,score,score_exact,chosen_length,probability,bonus_nodes,bonus_edges,error\n";

fn push_csv_rows(out: &mut String, report: &RankReport) {
    for (i, e) in report.entries.iter().enumerate() {
        let [exact, l, p, bn, be] = exact_fields(&e.value);
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},",
            report.method,
            i + 1,
            e.page_id,
            e.value.as_f64(),
            exact,
            l,
            p,
            bn,
            be
        );
    }
}

/// Full-precision CSV for a single ranking.
pub fn render_report_csv(report: &RankReport) -> String {
    let mut out = String::from(CSV_HEADER);
    push_csv_rows(&mut out, report);
    out
}

/// Full-precision CSV: a score section, a blank line, an agreement section.
pub fn render_csv(report: &ComparisonReport) -> String {
    let mut out = String::from(CSV_HEADER);
    for col in &report.columns {
        match &col.outcome {
            Ok(r) => push_csv_rows(&mut out, r),
            Err(msg) => {
                let _ = writeln!(
                    out,
                    "{},,,,,,,,,\"{}\"",
                    col.method,
                    msg.replace('"', "\"\"")
                );
            }
        }
    }
    out.push_str("\nfirst,second,kendall_tau,same_top1,same_top2\n");
    for a in &report.agreements {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            a.first, a.second, a.kendall_tau, a.same_top1, a.same_top2
        );
    }
    out
}

pub fn report_json(report: &RankReport) -> Value {
    let entries: Vec<Value> = report
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| match &e.value {
            RankValue::Exact(s) => json!({
                "rank": i + 1,
                "page_id": e.page_id,
                "score": to_f64(&s.score),
                "score_exact": render_exact(&s.score),
                "chosen_length": s.chosen_length,
                "probability": render_exact(&s.probability),
                "bonus_nodes": render_exact(&s.bonus_nodes),
                "bonus_edges": render_exact(&s.bonus_edges),
            }),
            RankValue::Eigen(v) => json!({
                "rank": i + 1,
                "page_id": e.page_id,
                "score": v,
            }),
        })
        .collect();
    let mut value = json!({
        "method": report.method.name(),
        "entries": entries,
        "ties": report.tie_groups,
    });
    if let Some(eig) = &report.eigen {
        value["eigen"] = json!({
            "eigenvalue": eig.eigenvalue,
            "iterations": eig.iterations,
            "residual": eig.residual,
            "last_entry_normalized": eig.last_entry_normalized,
        });
    }
    value
}

pub fn render_report_json(report: &RankReport) -> String {
    let mut text =
        serde_json::to_string_pretty(&report_json(report)).expect("json values serialize");
    text.push('\n');
    text
}

pub fn render_json(report: &ComparisonReport) -> String {
    let columns: Vec<Value> = report
        .columns
        .iter()
        .map(|c| match &c.outcome {
            Ok(r) => report_json(r),
            Err(msg) => json!({ "method": c.method.name(), "error": msg }),
        })
        .collect();
    let agreements: Vec<Value> = report
        .agreements
        .iter()
        .map(|a| {
            json!({
                "first": a.first.name(),
                "second": a.second.name(),
                "kendall_tau": a.kendall_tau,
                "same_top1": a.same_top1,
                "same_top2": a.same_top2,
            })
        })
        .collect();
    let mut text =
        serde_json::to_string_pretty(&json!({ "columns": columns, "agreements": agreements }))
            .expect("json values serialize");
    text.push('\n');
    text
}

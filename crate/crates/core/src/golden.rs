//! Reference checks over the embedded fixtures.
//!
//! Each check recomputes a published value from scratch and compares it
//! against the expected value, either exactly or within a stated tolerance.

use std::fmt;

use crate::backlink::{
    build_matrix, matrix_from_counts, power_iteration, BacklinkMode, DEFAULT_MAX_ITERATIONS,
    DEFAULT_TOLERANCE,
};
use crate::compare::{rank_environment, RankOptions};
use crate::environment::Environment;
use crate::error::Result;
use crate::fixtures;
use crate::forest;
use crate::model::{query_candidates, PageSubgraph};
use crate::num::{ratio, render_exact, render_truncated, Rational};
use crate::relation::{baseline_page_score, Method};
use crate::virtual_links::{real_page_score, virtual_page_score, Variant, VirtualConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub tolerance: String,
    pub passed: bool,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}  {}  expected={}  actual={}  tolerance={}",
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.expected,
            self.actual,
            self.tolerance
        )
    }
}

fn exact(name: &str, expected: Rational, actual: Rational) -> Check {
    Check {
        name: name.to_owned(),
        passed: expected == actual,
        expected: render_exact(&expected),
        actual: render_exact(&actual),
        tolerance: "exact".to_owned(),
    }
}

fn rendered(name: &str, expected: &str, actual: &Rational) -> Check {
    let shown = render_truncated(actual, 5);
    Check {
        name: name.to_owned(),
        passed: shown == expected,
        expected: expected.to_owned(),
        actual: shown,
        tolerance: "5dp".to_owned(),
    }
}

fn close(name: &str, expected: f64, actual: f64, tol: f64) -> Check {
    Check {
        name: name.to_owned(),
        passed: (expected - actual).abs() <= tol,
        expected: expected.to_string(),
        actual: format!("{actual:.9}"),
        tolerance: format!("{tol:e}"),
    }
}

fn order(name: &str, expected: &[&str], actual: Vec<&str>) -> Check {
    Check {
        name: name.to_owned(),
        passed: actual == expected,
        expected: expected.join(">"),
        actual: actual.join(">"),
        tolerance: "exact".to_owned(),
    }
}

fn failed(name: &str, err: impl fmt::Display) -> Check {
    Check {
        name: name.to_owned(),
        expected: "a value".to_owned(),
        actual: format!("error: {err}"),
        tolerance: "-".to_owned(),
        passed: false,
    }
}

/// Cuts the first page that has relations down to its first relation.
/// Used to confirm that the checks notice a changed fixture.
pub fn perturb(env: &Environment) -> Environment {
    let mut env = env.clone();
    if let Some(idx) = env.pages.iter().position(|p| p.relation_count() > 0) {
        let page = &env.pages[idx];
        let kept: Vec<String> = page.relation_ids().iter().take(1).cloned().collect();
        let extras: Vec<usize> = page.extra_concepts().iter().map(|c| c.index()).collect();
        env.pages[idx] = PageSubgraph::new(&env.ontology, page.id().to_owned(), kept, extras)
            .expect("a subset of a valid page is valid");
    }
    env
}

struct Loader<'a> {
    perturbed: Option<&'a str>,
}

impl Loader<'_> {
    fn load(&self, name: &str) -> Environment {
        let env = fixtures::by_name(name).expect("known fixture");
        if self.perturbed == Some(name) {
            perturb(&env)
        } else {
            env
        }
    }
}

fn page<'e>(env: &'e Environment, id: &str) -> &'e PageSubgraph {
    env.page(id).expect("fixture page exists")
}

/// Runs every reference check. `perturbed` names a fixture to alter first.
pub fn run_checks(perturbed: Option<&str>) -> Vec<Check> {
    let loader = Loader { perturbed };
    let mut checks = Vec::new();
    let mut push = |name: &str, r: Result<Vec<Check>>| match r {
        Ok(cs) => checks.extend(cs),
        Err(e) => checks.push(failed(name, e)),
    };

    push("joint", joint_checks(&loader.load("travel_joint")));
    push("baseline", baseline_checks(&loader.load("travel_forest")));
    push("virtual", virtual_checks(&loader.load("travel_virtual")));
    push("components", component_checks(&loader.load("components")));
    push(
        "ties",
        tie_checks(&loader.load("tie_nodes"), &loader.load("tie_edges")),
    );
    push("backlink_1", backlink_1_checks(&loader.load("backlink_1")));
    push("backlink_2", backlink_2_checks(&loader.load("backlink_2")));
    push("backlink_3", backlink_3_checks(&loader.load("backlink_3")));
    push("link_cycle", link_cycle_checks());
    checks
}

fn joint_checks(env: &Environment) -> Result<Vec<Check>> {
    let q = env.query.as_ref().expect("fixture has a query");
    let mut out = Vec::new();
    for (id, expected) in [("p1", ratio(1, 4)), ("p2", ratio(0, 1))] {
        let c = query_candidates(&env.ontology, page(env, id), q);
        let l = forest::max_structural_length(&c, false)?;
        let agg = forest::aggregate(&c, l)?;
        out.push(exact(
            &format!("travel joint {id}"),
            expected,
            agg.weight_sum,
        ));
    }
    Ok(out)
}

fn baseline_checks(env: &Environment) -> Result<Vec<Check>> {
    let q = env.query.as_ref().expect("fixture has a query");
    let s = baseline_page_score(&env.ontology, page(env, "p1"), q)?;
    Ok(vec![
        rendered("travel baseline p1", "2.16666", &s.score),
        exact("travel baseline p1 exact", ratio(13, 6), s.score),
    ])
}

fn virtual_checks(env: &Environment) -> Result<Vec<Check>> {
    let cfg = VirtualConfig::default();
    let p1 = virtual_page_score(&env.ontology, page(env, "p1"), cfg, Variant::Combined)?;
    let p2 = virtual_page_score(&env.ontology, page(env, "p2"), cfg, Variant::Combined)?;
    let ranked = rank_environment(env, Method::Combined, &RankOptions::default())?;
    Ok(vec![
        exact("travel virtual p1 base", ratio(13, 6), p1.base()),
        exact("travel virtual p2 base", ratio(25, 12), p2.base()),
        rendered("travel virtual p2 base 5dp", "2.08333", &p2.base()),
        order(
            "travel virtual combined order",
            &["p1", "p2"],
            ranked.order(),
        ),
    ])
}

fn component_checks(env: &Environment) -> Result<Vec<Check>> {
    let p1 = real_page_score(&env.ontology, page(env, "p1"))?;
    let p2 = real_page_score(&env.ontology, page(env, "p2"))?;
    let v2 = virtual_page_score(
        &env.ontology,
        page(env, "p2"),
        VirtualConfig::default(),
        Variant::Combined,
    )?;
    let opts = RankOptions::default();
    let before = rank_environment(env, Method::Real, &opts)?;
    let after = rank_environment(env, Method::Combined, &opts)?;
    Ok(vec![
        exact("components p1 pre-virtual", ratio(25, 8), p1.score),
        exact("components p2 pre-virtual", ratio(9, 4), p2.score),
        exact("components p2 post-virtual base", ratio(321, 64), v2.base()),
        order(
            "components order pre-virtual",
            &["p1", "p2"],
            before.order(),
        ),
        order(
            "components order post-virtual",
            &["p2", "p1"],
            after.order(),
        ),
    ])
}

fn tie_checks(nodes_env: &Environment, edges_env: &Environment) -> Result<Vec<Check>> {
    let opts = RankOptions::default();
    let old = rank_environment(nodes_env, Method::Old, &opts)?;
    let tie_score = old.entries[0]
        .value
        .scored()
        .map(|s| s.score.clone())
        .unwrap_or_default();
    let tied = old.tie_groups == vec![vec!["p1".to_owned(), "p2".to_owned()]];
    let nodes = rank_environment(nodes_env, Method::Nodes, &opts)?;
    let edges = rank_environment(edges_env, Method::Edges, &opts)?;
    Ok(vec![
        exact("tie baseline score", ratio(2, 1), tie_score),
        Check {
            name: "tie baseline group".to_owned(),
            expected: "p1=p2".to_owned(),
            actual: format!("{:?}", old.tie_groups),
            tolerance: "exact".to_owned(),
            passed: tied,
        },
        order("tie baseline order by id", &["p1", "p2"], old.order()),
        order("tie broken by node bonus", &["p1", "p2"], nodes.order()),
        order("tie broken by edge bonus", &["p2", "p1"], edges.order()),
    ])
}

const EIGEN_TOL: f64 = 1e-4;

fn eigen_of(env: &Environment) -> Result<crate::backlink::EigenResult> {
    let h = build_matrix(&env.pages, BacklinkMode::ReciprocalShared)?;
    power_iteration(&h, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)
}

fn residual_check(name: &str, residual: f64) -> Check {
    Check {
        name: name.to_owned(),
        expected: "< 1e-6".to_owned(),
        actual: format!("{residual:e}"),
        tolerance: "1e-6".to_owned(),
        passed: residual < 1e-6,
    }
}

fn backlink_1_checks(env: &Environment) -> Result<Vec<Check>> {
    let r = eigen_of(env)?;
    let mut out = vec![close(
        "backlink 1 eigenvalue",
        2.48113,
        r.eigenvalue,
        EIGEN_TOL,
    )];
    let expected = [1.43173, 0.727415, 1.11926, 1.20564, 1.0];
    for (i, (e, a)) in expected.iter().zip(&r.vector).enumerate() {
        out.push(close(
            &format!("backlink 1 vector[{}]", i + 1),
            *e,
            *a,
            EIGEN_TOL,
        ));
    }
    out.push(residual_check("backlink 1 residual", r.residual));
    let ranked = rank_environment(env, Method::Eigen, &RankOptions::default())?;
    out.push(order(
        "backlink 1 order",
        &["p1", "p4", "p3", "p5", "p2"],
        ranked.order(),
    ));
    Ok(out)
}

fn backlink_2_checks(env: &Environment) -> Result<Vec<Check>> {
    let r = eigen_of(env)?;
    Ok(vec![
        close("backlink 2 eigenvalue", 3.04681, r.eigenvalue, EIGEN_TOL),
        residual_check("backlink 2 residual", r.residual),
    ])
}

fn backlink_3_checks(env: &Environment) -> Result<Vec<Check>> {
    let r = eigen_of(env)?;
    let ranked = rank_environment(env, Method::Eigen, &RankOptions::default())?;
    Ok(vec![
        close("backlink 3 eigenvalue", 1.12237, r.eigenvalue, EIGEN_TOL),
        residual_check("backlink 3 residual", r.residual),
        order(
            "backlink 3 order",
            &["p1", "p5", "p4", "p3", "p2"],
            ranked.order(),
        ),
    ])
}

fn link_cycle_checks() -> Result<Vec<Check>> {
    let h = matrix_from_counts(&fixtures::cycle_links(), BacklinkMode::ColumnNormalized);
    let r = power_iteration(&h, DEFAULT_TOLERANCE, DEFAULT_MAX_ITERATIONS)?;
    Ok(vec![
        close("link cycle eigenvalue", 1.0, r.eigenvalue, 1e-6),
        residual_check("link cycle residual", r.residual),
    ])
}

/// Plain-text report, one line per check plus a summary line.
pub fn render(checks: &[Check]) -> String {
    let mut out: String = checks.iter().map(|c| format!("{c}\n")).collect();
    let passed = checks.iter().filter(|c| c.passed).count();
    out.push_str(&format!("{passed}/{} checks passed\n", checks.len()));
    out
}

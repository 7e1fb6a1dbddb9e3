//! Baseline relation-based scoring over the query subgraph.
//!
//! The probability of length `l` is the mean, over all trees with `l` edges,
//! of the product of edge probabilities. A page scores `P + l` for the
//! longest `l` with `P > 0`, which puts it in the relevance class `[l, l+1]`.
//! When no length has positive probability the page keeps its structural
//! length with `P = 0`.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::Result;
use crate::forest;
use crate::model::{query_candidates, CandidateEdgeSet, OntologyGraph, PageSubgraph, Query};
use crate::num::{int, to_f64, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Query-restricted relation scoring.
    Old,
    /// Page-wide relation scoring without virtual links.
    Real,
    Nodes,
    Edges,
    Combined,
    Eigen,
}

impl Method {
    pub const COMPARED: [Method; 5] = [
        Method::Old,
        Method::Nodes,
        Method::Edges,
        Method::Combined,
        Method::Eigen,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Old => "old",
            Method::Real => "real",
            Method::Nodes => "nodes",
            Method::Edges => "edges",
            Method::Combined => "combined",
            Method::Eigen => "eigen",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        [
            Method::Old,
            Method::Real,
            Method::Nodes,
            Method::Edges,
            Method::Combined,
            Method::Eigen,
        ]
        .into_iter()
        .find(|m| m.name() == s)
        .ok_or_else(|| format!("unknown method {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScoredPage {
    pub page_id: String,
    pub method: Method,
    pub chosen_length: usize,
    pub probability: Rational,
    pub score: Rational,
    pub bonus_nodes: Rational,
    pub bonus_edges: Rational,
}

impl ScoredPage {
    /// Score before bonuses: `probability + chosen_length`.
    pub fn base(&self) -> Rational {
        &self.probability + int(self.chosen_length as i64)
    }

    /// True when no length had positive probability.
    pub fn is_fallback(&self) -> bool {
        self.probability.is_zero()
    }
}

/// Mean tree weight at `length`; zero when there are no trees.
pub fn constrained_score(candidates: &CandidateEdgeSet, length: usize) -> Result<Rational> {
    Ok(forest::aggregate(candidates, length)?.mean_weight())
}

/// `(chosen_length, probability)` by scanning down from the longest tree.
pub fn scan_lengths(candidates: &CandidateEdgeSet) -> Result<(usize, Rational)> {
    let max_len = forest::max_structural_length(candidates, false)?;
    if max_len == 0 {
        return Ok((0, Rational::zero()));
    }
    let profile = forest::profile(candidates)?;
    for l in (1..=max_len).rev() {
        let p = profile.at(l).mean_weight();
        if !p.is_zero() {
            return Ok((l, p));
        }
    }
    Ok((max_len, Rational::zero()))
}

/// Scores a page on an arbitrary candidate view, without bonuses.
pub fn score_candidates(
    page_id: &str,
    method: Method,
    candidates: &CandidateEdgeSet,
) -> Result<ScoredPage> {
    let (chosen_length, probability) = scan_lengths(candidates)?;
    let score = &probability + int(chosen_length as i64);
    Ok(ScoredPage {
        page_id: page_id.to_owned(),
        method,
        chosen_length,
        probability,
        score,
        bonus_nodes: Rational::zero(),
        bonus_edges: Rational::zero(),
    })
}

pub fn baseline_page_score(
    ontology: &OntologyGraph,
    page: &PageSubgraph,
    query: &Query,
) -> Result<ScoredPage> {
    let candidates = query_candidates(ontology, page, query);
    score_candidates(page.id(), Method::Old, &candidates)
}

#[derive(Debug, Clone, PartialEq)]
#[allow(clippy::large_enum_variant)]
pub enum RankValue {
    Exact(ScoredPage),
    Eigen(f64),
}

impl RankValue {
    pub fn as_f64(&self) -> f64 {
        match self {
            RankValue::Exact(s) => to_f64(&s.score),
            RankValue::Eigen(v) => *v,
        }
    }

    pub fn scored(&self) -> Option<&ScoredPage> {
        match self {
            RankValue::Exact(s) => Some(s),
            RankValue::Eigen(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankEntry {
    pub page_id: String,
    pub value: RankValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenSummary {
    pub eigenvalue: f64,
    pub iterations: usize,
    pub residual: f64,
    /// False when the vector was scaled by its largest entry because the
    /// last entry was (near) zero.
    pub last_entry_normalized: bool,
}

/// Pages in descending score order; equal scores are listed by page id.
#[derive(Debug, Clone, PartialEq)]
pub struct RankReport {
    pub method: Method,
    pub entries: Vec<RankEntry>,
    /// Groups of two or more page ids sharing a score.
    pub tie_groups: Vec<Vec<String>>,
    pub eigen: Option<EigenSummary>,
}

impl RankReport {
    pub fn order(&self) -> Vec<&str> {
        self.entries.iter().map(|e| e.page_id.as_str()).collect()
    }

    pub fn position(&self, page_id: &str) -> Option<usize> {
        self.entries.iter().position(|e| e.page_id == page_id)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }
}

/// Orders exact scores. All entries must carry `method`.
pub fn rank(method: Method, mut scored: Vec<ScoredPage>) -> RankReport {
    debug_assert!(scored.iter().all(|s| s.method == method));
    scored.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then_with(|| a.page_id.cmp(&b.page_id))
    });
    let mut tie_groups = Vec::new();
    let mut start = 0;
    while start < scored.len() {
        let end = start
            + scored[start..]
                .iter()
                .take_while(|s| s.score == scored[start].score)
                .count();
        if end - start > 1 {
            tie_groups.push(
                scored[start..end]
                    .iter()
                    .map(|s| s.page_id.clone())
                    .collect(),
            );
        }
        start = end;
    }
    RankReport {
        method,
        entries: scored
            .into_iter()
            .map(|s| RankEntry {
                page_id: s.page_id.clone(),
                value: RankValue::Exact(s),
            })
            .collect(),
        tie_groups,
        eigen: None,
    }
}

/// Orders real-valued scores, treating values within `rel_tol` as tied.
pub(crate) fn rank_real(method: Method, values: Vec<(String, f64)>, rel_tol: f64) -> RankReport {
    let mut values = values;
    values.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal));
    let close = |x: f64, y: f64| (x - y).abs() <= rel_tol * x.abs().max(y.abs()).max(1.0);
    let mut groups: Vec<Vec<(String, f64)>> = Vec::new();
    for item in values {
        match groups.last_mut() {
            Some(g) if close(g[0].1, item.1) => g.push(item),
            _ => groups.push(vec![item]),
        }
    }
    let mut entries = Vec::new();
    let mut tie_groups = Vec::new();
    for mut g in groups {
        g.sort_by(|a, b| a.0.cmp(&b.0));
        if g.len() > 1 {
            tie_groups.push(g.iter().map(|(id, _)| id.clone()).collect());
        }
        entries.extend(g.into_iter().map(|(page_id, v)| RankEntry {
            page_id,
            value: RankValue::Eigen(v),
        }));
    }
    RankReport {
        method,
        entries,
        tie_groups,
        eigen: None,
    }
}

/// True when every candidate is certain (T = 1).
pub fn all_certain(candidates: &CandidateEdgeSet) -> bool {
    candidates
        .edges()
        .iter()
        .all(|e| e.probability() == Rational::one())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{CandidateEdge, PairKey};
    use crate::num::ratio;

    fn set(edges: &[(usize, usize, u32, u32)]) -> CandidateEdgeSet {
        CandidateEdgeSet::new(
            edges
                .iter()
                .map(|&(a, b, d, e)| {
                    CandidateEdge::real(PairKey::from_indices(a, b).unwrap(), d, e)
                })
                .collect(),
        )
        .unwrap()
    }

    fn scored(id: &str, score: Rational) -> ScoredPage {
        ScoredPage {
            page_id: id.into(),
            method: Method::Old,
            chosen_length: 0,
            probability: Rational::zero(),
            score,
            bonus_nodes: Rational::zero(),
            bonus_edges: Rational::zero(),
        }
    }

    #[test]
    fn constrained_score_examples() {
        let forest_triangle = set(&[(1, 2, 1, 2), (2, 3, 2, 2), (1, 3, 0, 2)]);
        assert_eq!(constrained_score(&forest_triangle, 2).unwrap(), ratio(1, 6));
        let chord = set(&[(0, 1, 1, 2), (1, 2, 1, 2), (2, 3, 1, 2), (1, 3, 1, 2)]);
        assert_eq!(constrained_score(&chord, 3).unwrap(), ratio(1, 8));
        let zeros = set(&[(0, 1, 0, 2), (1, 2, 0, 2), (0, 2, 0, 1)]);
        for l in 1..=4 {
            assert!(constrained_score(&zeros, l).unwrap().is_zero());
        }
    }

    #[test]
    fn all_zero_triangle_falls_back_to_structural_length() {
        let zeros = set(&[(1, 2, 0, 1), (2, 3, 0, 1), (1, 3, 0, 1)]);
        let s = score_candidates("p", Method::Old, &zeros).unwrap();
        assert_eq!(s.chosen_length, 2);
        assert!(s.is_fallback());
        assert_eq!(s.score, int(2));
    }

    #[test]
    fn fallback_breaks_naive_monotonicity() {
        // Raising one delta moves the page out of the fallback into class 1.
        let before = score_candidates(
            "p",
            Method::Old,
            &set(&[(1, 2, 0, 2), (2, 3, 0, 2), (1, 3, 0, 2)]),
        )
        .unwrap();
        let after = score_candidates(
            "p",
            Method::Old,
            &set(&[(1, 2, 1, 2), (2, 3, 0, 2), (1, 3, 0, 2)]),
        )
        .unwrap();
        assert_eq!(before.score, int(2));
        assert_eq!(after.score, ratio(7, 6));
    }

    #[test]
    fn empty_candidates_score_zero() {
        let s = score_candidates("p", Method::Old, &CandidateEdgeSet::default()).unwrap();
        assert_eq!(s.chosen_length, 0);
        assert!(s.score.is_zero());
    }

    #[test]
    fn certain_edges_have_probability_one() {
        let c = set(&[(0, 1, 2, 2), (1, 2, 1, 1), (0, 2, 3, 3), (2, 3, 1, 1)]);
        assert!(all_certain(&c));
        for l in 1..=3 {
            assert_eq!(constrained_score(&c, l).unwrap(), Rational::one());
        }
    }

    #[test]
    fn rank_orders_and_records_ties() {
        let report = rank(
            Method::Old,
            vec![scored("p2", int(0)), scored("p1", ratio(1, 4))],
        );
        assert_eq!(report.order(), ["p1", "p2"]);
        assert!(report.tie_groups.is_empty());

        let report = rank(
            Method::Old,
            vec![scored("p2", int(2)), scored("p1", int(2))],
        );
        assert_eq!(report.order(), ["p1", "p2"]);
        assert_eq!(
            report.tie_groups,
            vec![vec!["p1".to_owned(), "p2".to_owned()]]
        );

        assert!(rank(Method::Old, vec![]).is_empty());
    }

    #[test]
    fn real_ranking_groups_near_ties() {
        let r = rank_real(
            Method::Eigen,
            vec![
                ("p4".into(), 3.959_447_98),
                ("p1".into(), 3.959_447_980_000_1),
                ("p2".into(), 4.083),
            ],
            1e-9,
        );
        assert_eq!(r.order(), ["p2", "p1", "p4"]);
        assert_eq!(r.tie_groups.len(), 1);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::COMPARED {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("bogus".parse::<Method>().is_err());
    }
}

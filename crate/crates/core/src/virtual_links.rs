//! Page-wide scoring with virtual links and the node/edge bonuses.
//!
//! A virtual link fills a concept pair of the page that the ontology relates
//! but the page itself does not annotate. It carries a reduced weight, so it
//! can bridge components and lengthen trees without ever beating a real
//! annotation on the same pair.

use num_traits::Zero;

use crate::error::Result;
use crate::model::{
    page_candidates, CandidateEdge, CandidateEdgeSet, EdgeKind, OntologyGraph, PageSubgraph,
    PairKey,
};
use crate::num::{int, ratio, Rational};
use crate::relation::{score_candidates, Method, ScoredPage};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VirtualDeltaMode {
    /// Virtual delta 1/2.
    #[default]
    ConstantHalf,
    /// Virtual delta 1/2 divided by the page's relation count (at least 1).
    HalfOverPageRelations,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct VirtualConfig {
    pub mode: VirtualDeltaMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Nodes,
    Edges,
    Combined,
}

impl Variant {
    pub fn method(self) -> Method {
        match self {
            Variant::Nodes => Method::Nodes,
            Variant::Edges => Method::Edges,
            Variant::Combined => Method::Combined,
        }
    }
}

fn virtual_delta(page: &PageSubgraph, mode: VirtualDeltaMode) -> Rational {
    match mode {
        VirtualDeltaMode::ConstantHalf => ratio(1, 2),
        VirtualDeltaMode::HalfOverPageRelations => {
            ratio(1, 2 * page.relation_count().max(1) as i64)
        }
    }
}

/// Page candidates plus one virtual edge for every unannotated pair inside
/// the page's concept set that the ontology relates.
pub fn inject_virtual_links(
    ontology: &OntologyGraph,
    page: &PageSubgraph,
    config: VirtualConfig,
) -> CandidateEdgeSet {
    let mut edges = page_candidates(ontology, page).edges().to_vec();
    let delta = virtual_delta(page, config.mode);
    let concepts: Vec<_> = page.concepts().iter().copied().collect();
    for (i, &a) in concepts.iter().enumerate() {
        for &b in &concepts[i + 1..] {
            let pair = PairKey::new(a, b).expect("distinct concepts");
            let eta = ontology.eta(pair);
            if eta > 0 && page.delta(pair) == 0 {
                edges.push(CandidateEdge {
                    pair,
                    delta: delta.clone(),
                    eta,
                    kind: EdgeKind::Virtual,
                });
            }
        }
    }
    edges.sort_by_key(|e| e.pair);
    CandidateEdgeSet::from_sorted_unchecked(edges)
}

/// Page concepts over ontology concepts.
pub fn node_fraction(page: &PageSubgraph, ontology: &OntologyGraph) -> Rational {
    if ontology.concept_count() == 0 {
        return Rational::zero();
    }
    ratio(
        page.concepts().len() as i64,
        ontology.concept_count() as i64,
    )
}

/// Annotated concept pairs over related ontology pairs.
pub fn edge_fraction(page: &PageSubgraph, ontology: &OntologyGraph) -> Rational {
    if ontology.pair_count() == 0 {
        return Rational::zero();
    }
    let annotated = page.annotated_pairs().count();
    ratio(annotated as i64, ontology.pair_count() as i64)
}

/// Page-wide score on real relations only.
pub fn real_page_score(ontology: &OntologyGraph, page: &PageSubgraph) -> Result<ScoredPage> {
    score_candidates(page.id(), Method::Real, &page_candidates(ontology, page))
}

pub fn virtual_page_score(
    ontology: &OntologyGraph,
    page: &PageSubgraph,
    config: VirtualConfig,
    variant: Variant,
) -> Result<ScoredPage> {
    let candidates = inject_virtual_links(ontology, page, config);
    let mut scored = score_candidates(page.id(), variant.method(), &candidates)?;
    let nodes = node_fraction(page, ontology);
    let edges = edge_fraction(page, ontology);
    match variant {
        Variant::Nodes => scored.bonus_nodes = nodes,
        Variant::Edges => scored.bonus_edges = edges,
        Variant::Combined => {
            scored.bonus_nodes = nodes;
            scored.bonus_edges = edges;
        }
    }
    scored.score = &scored.probability
        + int(scored.chosen_length as i64)
        + &scored.bonus_nodes
        + &scored.bonus_edges;
    Ok(scored)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forest;

    fn onto(n: usize, rels: &[(&str, usize, usize)]) -> OntologyGraph {
        OntologyGraph::new(
            (0..n).map(|i| format!("C{i}")).collect(),
            rels.iter().map(|&(id, a, b)| (id, a, b)),
        )
        .unwrap()
    }

    /// D-Act twice, Act-Acc three times, no D-Acc relation.
    fn travel() -> OntologyGraph {
        onto(
            3,
            &[
                ("a", 0, 1),
                ("b", 0, 1),
                ("c", 1, 2),
                ("d", 1, 2),
                ("e", 1, 2),
            ],
        )
    }

    #[test]
    fn virtual_link_fills_unannotated_pair_only() {
        let o = travel();
        let p2 = PageSubgraph::new(&o, "p2", ["a"], [2]).unwrap();
        let c = inject_virtual_links(&o, &p2, VirtualConfig::default());
        assert_eq!(c.len(), 2);
        let v = c.get(PairKey::from_indices(1, 2).unwrap()).unwrap();
        assert_eq!(v.kind, EdgeKind::Virtual);
        assert_eq!(v.probability(), ratio(1, 6));
        assert!(c.get(PairKey::from_indices(0, 2).unwrap()).is_none());

        let s = virtual_page_score(&o, &p2, VirtualConfig::default(), Variant::Nodes).unwrap();
        assert_eq!(s.base(), ratio(25, 12));
        assert_eq!(s.bonus_nodes, int(1));
    }

    #[test]
    fn half_over_page_relations_mode() {
        let o = travel();
        let p = PageSubgraph::new(&o, "p", ["a", "b"], [2]).unwrap();
        let cfg = VirtualConfig {
            mode: VirtualDeltaMode::HalfOverPageRelations,
        };
        let c = inject_virtual_links(&o, &p, cfg);
        let v = c.get(PairKey::from_indices(1, 2).unwrap()).unwrap();
        assert_eq!(v.delta, ratio(1, 4));
        let empty = PageSubgraph::new(&o, "e", Vec::<String>::new(), [1, 2]).unwrap();
        let c = inject_virtual_links(&o, &empty, cfg);
        assert_eq!(c.edges()[0].delta, ratio(1, 2));
    }

    #[test]
    fn fully_annotated_page_gets_no_virtual_links() {
        let o = travel();
        let p = PageSubgraph::new(&o, "p", ["a", "c"], []).unwrap();
        assert_eq!(
            inject_virtual_links(&o, &p, VirtualConfig::default()).virtual_count(),
            0
        );
    }

    #[test]
    fn bridging_two_components() {
        let o = onto(4, &[("ab", 0, 1), ("bc", 1, 2), ("cd", 2, 3)]);
        let p = PageSubgraph::new(&o, "p", ["ab", "cd"], []).unwrap();
        let before = page_candidates(&o, &p);
        let after = inject_virtual_links(&o, &p, VirtualConfig::default());
        assert_eq!(after.virtual_count(), 1);
        assert_eq!(forest::max_structural_length(&before, false).unwrap(), 1);
        assert_eq!(forest::max_structural_length(&after, false).unwrap(), 3);
    }

    #[test]
    fn fractions() {
        let o = onto(6, &[("a", 0, 1), ("b", 0, 1), ("c", 1, 2), ("d", 3, 5)]);
        let full = PageSubgraph::new(&o, "f", ["a", "b", "c", "d"], [4]).unwrap();
        assert_eq!(node_fraction(&full, &o), int(1));
        assert_eq!(edge_fraction(&full, &o), int(1));
        let lone = PageSubgraph::new(&o, "l", Vec::<String>::new(), [4]).unwrap();
        assert_eq!(node_fraction(&lone, &o), ratio(1, 6));
        assert!(edge_fraction(&lone, &o).is_zero());
        // Multiplicity does not count: one of two parallel relations is one pair.
        let half = PageSubgraph::new(&o, "h", ["a", "c"], [3]).unwrap();
        assert_eq!(edge_fraction(&half, &o), ratio(2, 3));
        assert_eq!(node_fraction(&half, &o), ratio(4, 6));
    }

    #[test]
    fn lone_concept_still_scores() {
        let o = onto(4, &[("a", 0, 1)]);
        let p = PageSubgraph::new(&o, "p", Vec::<String>::new(), [3]).unwrap();
        let s = virtual_page_score(&o, &p, VirtualConfig::default(), Variant::Combined).unwrap();
        assert_eq!(s.score, ratio(1, 4));
        assert_eq!(s.chosen_length, 0);
    }

    #[test]
    fn real_scope_scores_largest_component() {
        let o = onto(4, &[("ab", 0, 1), ("bc", 1, 2), ("cd", 2, 3)]);
        let p = PageSubgraph::new(&o, "p", ["ab", "cd"], []).unwrap();
        let s = real_page_score(&o, &p).unwrap();
        assert_eq!(s.method, Method::Real);
        assert_eq!(s.score, int(2));
    }
}

//! Ontology graphs, annotated page subgraphs, queries, and the weighted
//! candidate-edge views the rankers work on.
//!
//! Concepts are dense indices. An ontology is an undirected multigraph whose
//! relations carry unique ids; `eta(i, j)` counts the relations between two
//! concepts. A page annotates a subset of those relations (by id), so its
//! `delta(i, j)` is derived rather than stored, and two pages can be compared
//! relation-by-relation for back-links.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use num_traits::{One, Zero};

use crate::error::ValidationError;
use crate::num::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ConceptId(pub usize);

impl ConceptId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for ConceptId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Unordered concept pair, stored with `lo < hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PairKey {
    lo: ConceptId,
    hi: ConceptId,
}

impl PairKey {
    /// Returns `None` for a self-pair.
    pub fn new(a: ConceptId, b: ConceptId) -> Option<Self> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Self { lo: a, hi: b }),
            std::cmp::Ordering::Greater => Some(Self { lo: b, hi: a }),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn from_indices(a: usize, b: usize) -> Option<Self> {
        Self::new(ConceptId(a), ConceptId(b))
    }

    pub fn lo(self) -> ConceptId {
        self.lo
    }

    pub fn hi(self) -> ConceptId {
        self.hi
    }

    pub fn contains(self, c: ConceptId) -> bool {
        self.lo == c || self.hi == c
    }
}

impl fmt::Display for PairKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.lo, self.hi)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationEdge {
    pub id: String,
    pub pair: PairKey,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OntologyGraph {
    concept_labels: Vec<String>,
    relations: Vec<RelationEdge>,
    by_id: HashMap<String, usize>,
    eta: BTreeMap<PairKey, u32>,
}

impl OntologyGraph {
    /// Builds an ontology from labels and `(id, source, target)` triples.
    /// Relations are kept sorted by id.
    pub fn new<I, S>(concept_labels: Vec<String>, relations: I) -> Result<Self, ValidationError>
    where
        I: IntoIterator<Item = (S, usize, usize)>,
        S: Into<String>,
    {
        let count = concept_labels.len();
        let mut edges = Vec::new();
        for (id, source, target) in relations {
            let id = id.into();
            for endpoint in [source, target] {
                if endpoint >= count {
                    return Err(ValidationError::DanglingConcept {
                        context: format!("relation {id:?}"),
                        index: endpoint,
                        count,
                    });
                }
            }
            let pair = PairKey::from_indices(source, target)
                .ok_or_else(|| ValidationError::SelfLoop(id.clone()))?;
            edges.push(RelationEdge { id, pair });
        }
        edges.sort_by(|a, b| a.id.cmp(&b.id));

        let mut by_id = HashMap::with_capacity(edges.len());
        let mut eta = BTreeMap::new();
        for (idx, edge) in edges.iter().enumerate() {
            if by_id.insert(edge.id.clone(), idx).is_some() {
                return Err(ValidationError::DuplicateRelation(edge.id.clone()));
            }
            *eta.entry(edge.pair).or_insert(0) += 1;
        }
        Ok(Self {
            concept_labels,
            relations: edges,
            by_id,
            eta,
        })
    }

    pub fn concept_count(&self) -> usize {
        self.concept_labels.len()
    }

    pub fn concept_labels(&self) -> &[String] {
        &self.concept_labels
    }

    pub fn label(&self, c: ConceptId) -> Option<&str> {
        self.concept_labels.get(c.0).map(String::as_str)
    }

    pub fn relations(&self) -> &[RelationEdge] {
        &self.relations
    }

    pub fn relation(&self, id: &str) -> Option<&RelationEdge> {
        self.by_id.get(id).map(|&idx| &self.relations[idx])
    }

    pub fn contains_concept(&self, c: ConceptId) -> bool {
        c.0 < self.concept_labels.len()
    }

    /// Number of relations between the pair's concepts.
    pub fn eta(&self, pair: PairKey) -> u32 {
        self.eta.get(&pair).copied().unwrap_or(0)
    }

    /// Concept pairs with at least one relation, ascending.
    pub fn pairs(&self) -> impl Iterator<Item = (PairKey, u32)> + '_ {
        self.eta.iter().map(|(&pair, &eta)| (pair, eta))
    }

    pub fn pair_count(&self) -> usize {
        self.eta.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageSubgraph {
    id: String,
    relation_ids: BTreeSet<String>,
    extra_concepts: BTreeSet<ConceptId>,
    delta: BTreeMap<PairKey, u32>,
    concepts: BTreeSet<ConceptId>,
}

impl PageSubgraph {
    pub fn new<R, S>(
        ontology: &OntologyGraph,
        id: impl Into<String>,
        relation_ids: R,
        extra_concepts: impl IntoIterator<Item = usize>,
    ) -> Result<Self, ValidationError>
    where
        R: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let id = id.into();
        let mut ids = BTreeSet::new();
        let mut delta = BTreeMap::new();
        let mut concepts = BTreeSet::new();
        for rel in relation_ids {
            let rel = rel.into();
            let edge = ontology
                .relation(&rel)
                .ok_or_else(|| ValidationError::UnknownRelation {
                    page: id.clone(),
                    relation: rel.clone(),
                })?;
            *delta.entry(edge.pair).or_insert(0u32) += 1;
            concepts.insert(edge.pair.lo());
            concepts.insert(edge.pair.hi());
            if !ids.insert(rel.clone()) {
                return Err(ValidationError::RepeatedPageRelation {
                    page: id,
                    relation: rel,
                });
            }
        }

        let mut extra = BTreeSet::new();
        for c in extra_concepts {
            if c >= ontology.concept_count() {
                return Err(ValidationError::DanglingConcept {
                    context: format!("page {id:?}"),
                    index: c,
                    count: ontology.concept_count(),
                });
            }
            if concepts.contains(&ConceptId(c)) {
                return Err(ValidationError::ConceptNotIsolated {
                    page: id,
                    concept: c,
                });
            }
            extra.insert(ConceptId(c));
        }
        concepts.extend(extra.iter().copied());

        Ok(Self {
            id,
            relation_ids: ids,
            extra_concepts: extra,
            delta,
            concepts,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn relation_ids(&self) -> &BTreeSet<String> {
        &self.relation_ids
    }

    pub fn extra_concepts(&self) -> &BTreeSet<ConceptId> {
        &self.extra_concepts
    }

    /// Page concept set: relation endpoints plus isolated concepts.
    pub fn concepts(&self) -> &BTreeSet<ConceptId> {
        &self.concepts
    }

    pub fn delta(&self, pair: PairKey) -> u32 {
        self.delta.get(&pair).copied().unwrap_or(0)
    }

    /// Pairs the page annotates at least once.
    pub fn annotated_pairs(&self) -> impl Iterator<Item = (PairKey, u32)> + '_ {
        self.delta.iter().map(|(&p, &d)| (p, d))
    }

    pub fn relation_count(&self) -> usize {
        self.relation_ids.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Association {
    pub term: String,
    pub concept: ConceptId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Query {
    associations: Vec<Association>,
    concepts: BTreeSet<ConceptId>,
}

impl Query {
    pub fn new<I, S>(ontology: &OntologyGraph, associations: I) -> Result<Self, ValidationError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut list = Vec::new();
        for (term, concept) in associations {
            if concept >= ontology.concept_count() {
                return Err(ValidationError::DanglingConcept {
                    context: "query".to_owned(),
                    index: concept,
                    count: ontology.concept_count(),
                });
            }
            list.push(Association {
                term: term.into(),
                concept: ConceptId(concept),
            });
        }
        if list.is_empty() {
            return Err(ValidationError::EmptyQuery);
        }
        let concepts = list.iter().map(|a| a.concept).collect();
        Ok(Self {
            associations: list,
            concepts,
        })
    }

    pub fn associations(&self) -> &[Association] {
        &self.associations
    }

    pub fn concepts(&self) -> &BTreeSet<ConceptId> {
        &self.concepts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    Real,
    Virtual,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateEdge {
    pub pair: PairKey,
    pub delta: Rational,
    pub eta: u32,
    pub kind: EdgeKind,
}

impl CandidateEdge {
    pub fn real(pair: PairKey, delta: u32, eta: u32) -> Self {
        Self {
            pair,
            delta: int(i64::from(delta)),
            eta,
            kind: EdgeKind::Real,
        }
    }

    /// Edge probability `delta / eta`.
    pub fn probability(&self) -> Rational {
        &self.delta / int(i64::from(self.eta))
    }
}

/// One weighted candidate edge per concept pair, ordered by pair.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CandidateEdgeSet {
    edges: Vec<CandidateEdge>,
}

impl CandidateEdgeSet {
    pub fn new(mut edges: Vec<CandidateEdge>) -> Result<Self, ValidationError> {
        edges.sort_by_key(|e| e.pair);
        for edge in &edges {
            let (lo, hi) = (edge.pair.lo().0, edge.pair.hi().0);
            if edge.eta == 0 {
                return Err(ValidationError::InvalidCandidate(
                    lo,
                    hi,
                    "eta must be positive",
                ));
            }
            if edge.delta < Rational::zero() || edge.probability() > Rational::one() {
                return Err(ValidationError::InvalidCandidate(
                    lo,
                    hi,
                    "delta outside [0, eta]",
                ));
            }
        }
        if let Some(w) = edges.windows(2).find(|w| w[0].pair == w[1].pair) {
            return Err(ValidationError::DuplicateCandidate(
                w[0].pair.lo().0,
                w[0].pair.hi().0,
            ));
        }
        Ok(Self { edges })
    }

    pub fn edges(&self) -> &[CandidateEdge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn get(&self, pair: PairKey) -> Option<&CandidateEdge> {
        self.edges
            .binary_search_by_key(&pair, |e| e.pair)
            .ok()
            .map(|i| &self.edges[i])
    }

    pub fn virtual_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.kind == EdgeKind::Virtual)
            .count()
    }

    /// Distinct concepts touched by any edge.
    pub fn concepts(&self) -> BTreeSet<ConceptId> {
        self.edges
            .iter()
            .flat_map(|e| [e.pair.lo(), e.pair.hi()])
            .collect()
    }

    pub(crate) fn from_sorted_unchecked(edges: Vec<CandidateEdge>) -> Self {
        debug_assert!(edges.windows(2).all(|w| w[0].pair < w[1].pair));
        Self { edges }
    }
}

/// Baseline view: every query concept pair the ontology relates, weighted by
/// the page's annotation count (possibly zero).
pub fn query_candidates(
    ontology: &OntologyGraph,
    page: &PageSubgraph,
    query: &Query,
) -> CandidateEdgeSet {
    let concepts: Vec<_> = query.concepts().iter().copied().collect();
    let mut edges = Vec::new();
    for (i, &a) in concepts.iter().enumerate() {
        for &b in &concepts[i + 1..] {
            let pair = PairKey::new(a, b).expect("distinct concepts");
            let eta = ontology.eta(pair);
            if eta > 0 {
                edges.push(CandidateEdge::real(pair, page.delta(pair), eta));
            }
        }
    }
    CandidateEdgeSet::from_sorted_unchecked(edges)
}

/// Full-page view: one real edge per pair the page annotates.
pub fn page_candidates(ontology: &OntologyGraph, page: &PageSubgraph) -> CandidateEdgeSet {
    let edges = page
        .annotated_pairs()
        .map(|(pair, delta)| CandidateEdge::real(pair, delta, ontology.eta(pair)))
        .collect();
    CandidateEdgeSet::from_sorted_unchecked(edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::ratio;

    fn travel() -> OntologyGraph {
        OntologyGraph::new(
            vec![
                "Destination".into(),
                "Activity".into(),
                "Accommodation".into(),
            ],
            [
                ("r01a", 0, 1),
                ("r01b", 0, 1),
                ("r02a", 0, 2),
                ("r02b", 0, 2),
                ("r12a", 1, 2),
                ("r12b", 1, 2),
            ],
        )
        .unwrap()
    }

    fn all_terms(o: &OntologyGraph) -> Query {
        Query::new(o, (0..o.concept_count()).map(|i| (format!("t{i}"), i))).unwrap()
    }

    #[test]
    fn eta_counts_multi_edges() {
        let o = travel();
        assert_eq!(o.eta(PairKey::from_indices(1, 0).unwrap()), 2);
        assert_eq!(o.pair_count(), 3);
        assert_eq!(o.relations().len(), 6);
    }

    #[test]
    fn rejects_self_loops_and_duplicates() {
        let err = OntologyGraph::new(vec!["a".into(), "b".into()], [("x", 1, 1)]).unwrap_err();
        assert_eq!(err, ValidationError::SelfLoop("x".into()));
        let err = OntologyGraph::new(vec!["a".into(), "b".into()], [("x", 0, 1), ("x", 1, 0)])
            .unwrap_err();
        assert_eq!(err, ValidationError::DuplicateRelation("x".into()));
        let err = OntologyGraph::new(vec!["a".into()], [("x", 0, 3)]).unwrap_err();
        assert!(matches!(
            err,
            ValidationError::DanglingConcept { index: 3, .. }
        ));
    }

    #[test]
    fn page_validation() {
        let o = travel();
        let err = PageSubgraph::new(&o, "p", ["r99"], []).unwrap_err();
        assert!(err.to_string().contains("r99"));
        let err = PageSubgraph::new(&o, "p", ["r01a", "r01a"], []).unwrap_err();
        assert!(matches!(err, ValidationError::RepeatedPageRelation { .. }));
        let err = PageSubgraph::new(&o, "p", ["r01a"], [1]).unwrap_err();
        assert!(matches!(
            err,
            ValidationError::ConceptNotIsolated { concept: 1, .. }
        ));
        let err = PageSubgraph::new(&o, "p", Vec::<String>::new(), [7]).unwrap_err();
        assert!(matches!(
            err,
            ValidationError::DanglingConcept { index: 7, .. }
        ));
    }

    #[test]
    fn query_needs_a_concept() {
        let o = travel();
        let err = Query::new(&o, Vec::<(String, usize)>::new()).unwrap_err();
        assert_eq!(err, ValidationError::EmptyQuery);
    }

    #[test]
    fn query_candidates_table_one_page_one() {
        let o = travel();
        let p1 = PageSubgraph::new(&o, "p1", ["r01a", "r02a"], []).unwrap();
        let c = query_candidates(&o, &p1, &all_terms(&o));
        let t: Vec<_> = c.edges().iter().map(CandidateEdge::probability).collect();
        assert_eq!(t, vec![ratio(1, 2), ratio(1, 2), ratio(0, 1)]);
        assert!(c.edges().iter().all(|e| e.kind == EdgeKind::Real));
    }

    #[test]
    fn single_concept_query_has_no_pairs() {
        let o = travel();
        let p = PageSubgraph::new(&o, "p", ["r01a"], []).unwrap();
        let q = Query::new(&o, [("Rome", 0)]).unwrap();
        assert!(query_candidates(&o, &p, &q).is_empty());
    }

    #[test]
    fn fully_annotated_page_is_certain() {
        let o = travel();
        let ids: Vec<_> = o.relations().iter().map(|r| r.id.clone()).collect();
        let p = PageSubgraph::new(&o, "p", ids, []).unwrap();
        for c in [
            query_candidates(&o, &p, &all_terms(&o)),
            page_candidates(&o, &p),
        ] {
            assert_eq!(c.len(), 3);
            assert!(c.edges().iter().all(|e| e.probability() == Rational::one()));
        }
    }

    #[test]
    fn isolated_concept_page() {
        let o = travel();
        let p = PageSubgraph::new(&o, "p", Vec::<String>::new(), [2]).unwrap();
        assert!(page_candidates(&o, &p).is_empty());
        assert_eq!(p.concepts().len(), 1);
    }

    #[test]
    fn absent_ontology_pairs_are_never_candidates() {
        let o = OntologyGraph::new(
            vec!["a".into(), "b".into(), "c".into()],
            [("ab", 0, 1), ("bc", 1, 2)],
        )
        .unwrap();
        let p = PageSubgraph::new(&o, "p", ["ab"], []).unwrap();
        let c = query_candidates(&o, &p, &all_terms(&o));
        assert_eq!(c.len(), 2);
        assert!(c.get(PairKey::from_indices(0, 2).unwrap()).is_none());
    }

    #[test]
    fn candidate_set_rejects_duplicates_and_bad_weights() {
        let pair = PairKey::from_indices(0, 1).unwrap();
        let err = CandidateEdgeSet::new(vec![
            CandidateEdge::real(pair, 1, 2),
            CandidateEdge::real(pair, 0, 2),
        ])
        .unwrap_err();
        assert_eq!(err, ValidationError::DuplicateCandidate(0, 1));
        assert!(CandidateEdgeSet::new(vec![CandidateEdge::real(pair, 3, 2)]).is_err());
        assert!(CandidateEdgeSet::new(vec![CandidateEdge::real(pair, 0, 0)]).is_err());
    }
}

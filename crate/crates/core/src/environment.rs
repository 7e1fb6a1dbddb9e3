//! Environment files: one JSON document holding an ontology, its annotated
//! pages, and an optional query.
//!
//! ```json
//! {
//!   "ontology": { "concepts": ["A", "B"], "relations": [{"id": "r1", "source": 0, "target": 1}] },
//!   "pages": [{"id": "p1", "relations": ["r1"], "concepts": []}],
//!   "query": {"terms": [{"term": "rome", "concept": 0}]}
//! }
//! ```
//!
//! Writing always produces the canonical form: relations sorted by id with
//! `source < target`, pages sorted by id, page relation ids and isolated
//! concepts sorted, two-space indentation and a trailing newline.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ValidationError};
use crate::model::{OntologyGraph, PageSubgraph, Query};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Environment {
    pub ontology: OntologyGraph,
    pub pages: Vec<PageSubgraph>,
    pub query: Option<Query>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct EnvironmentFile {
    ontology: OntologyFile,
    #[serde(default)]
    pages: Vec<PageFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    query: Option<QueryFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct OntologyFile {
    concepts: Vec<String>,
    #[serde(default)]
    relations: Vec<RelationFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RelationFile {
    id: String,
    source: usize,
    target: usize,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PageFile {
    id: String,
    #[serde(default)]
    relations: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    concepts: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryFile {
    terms: Vec<TermFile>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TermFile {
    term: String,
    concept: usize,
}

impl Environment {
    pub fn new(
        ontology: OntologyGraph,
        mut pages: Vec<PageSubgraph>,
        query: Option<Query>,
    ) -> Result<Self, ValidationError> {
        pages.sort_by(|a, b| a.id().cmp(b.id()));
        if let Some(w) = pages.windows(2).find(|w| w[0].id() == w[1].id()) {
            return Err(ValidationError::DuplicatePage(w[0].id().to_owned()));
        }
        Ok(Self {
            ontology,
            pages,
            query,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: EnvironmentFile = serde_json::from_str(text)?;
        Ok(Self::from_file(file)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_file())
            .expect("environment serialization is infallible");
        text.push('\n');
        text
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn page(&self, id: &str) -> Option<&PageSubgraph> {
        self.pages.iter().find(|p| p.id() == id)
    }

    fn from_file(file: EnvironmentFile) -> Result<Self, ValidationError> {
        let ontology = OntologyGraph::new(
            file.ontology.concepts,
            file.ontology
                .relations
                .into_iter()
                .map(|r| (r.id, r.source, r.target)),
        )?;
        let mut seen = HashSet::new();
        let mut pages = Vec::with_capacity(file.pages.len());
        for page in file.pages {
            if !seen.insert(page.id.clone()) {
                return Err(ValidationError::DuplicatePage(page.id));
            }
            pages.push(PageSubgraph::new(
                &ontology,
                page.id,
                page.relations,
                page.concepts,
            )?);
        }
        let query = file
            .query
            .map(|q| Query::new(&ontology, q.terms.into_iter().map(|t| (t.term, t.concept))))
            .transpose()?;
        Self::new(ontology, pages, query)
    }

    fn to_file(&self) -> EnvironmentFile {
        EnvironmentFile {
            ontology: OntologyFile {
                concepts: self.ontology.concept_labels().to_vec(),
                relations: self
                    .ontology
                    .relations()
                    .iter()
                    .map(|r| RelationFile {
                        id: r.id.clone(),
                        source: r.pair.lo().index(),
                        target: r.pair.hi().index(),
                    })
                    .collect(),
            },
            pages: self
                .pages
                .iter()
                .map(|p| PageFile {
                    id: p.id().to_owned(),
                    relations: p.relation_ids().iter().cloned().collect(),
                    concepts: p.extra_concepts().iter().map(|c| c.index()).collect(),
                })
                .collect(),
            query: self.query.as_ref().map(|q| QueryFile {
                terms: q
                    .associations()
                    .iter()
                    .map(|a| TermFile {
                        term: a.term.clone(),
                        concept: a.concept.index(),
                    })
                    .collect(),
            }),
        }
    }
}

//! Seeded generation of controlled ontologies and page sets.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::environment::Environment;
use crate::error::{Error, Result};
use crate::model::{OntologyGraph, PageSubgraph, Query};

#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorParams {
    pub seed: u64,
    pub concept_count: usize,
    /// Fraction of the `n(n-1)/2` concept pairs that get relations.
    pub ontology_pair_density: f64,
    /// Relations per related pair are drawn from `1..=max_multiplicity`.
    pub max_multiplicity: u32,
    pub page_count: usize,
    /// Probability that a page annotates any given relation.
    pub page_relation_rate: f64,
}

impl Default for GeneratorParams {
    /// Six concepts, 14 of 15 pairs related, up to five relations per pair,
    /// ten pages.
    fn default() -> Self {
        Self {
            seed: 1,
            concept_count: 6,
            ontology_pair_density: 14.0 / 15.0,
            max_multiplicity: 5,
            page_count: 10,
            page_relation_rate: 0.3,
        }
    }
}

impl GeneratorParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.concept_count < 2 {
            return bad(format!(
                "concept_count must be at least 2, got {}",
                self.concept_count
            ));
        }
        if !(self.ontology_pair_density > 0.0 && self.ontology_pair_density <= 1.0) {
            return bad(format!(
                "density must be in (0, 1], got {}",
                self.ontology_pair_density
            ));
        }
        if self.max_multiplicity < 1 {
            return bad("max_multiplicity must be at least 1".to_owned());
        }
        if self.page_count < 1 {
            return bad("page_count must be at least 1".to_owned());
        }
        if !(0.0..=1.0).contains(&self.page_relation_rate) {
            return bad(format!(
                "page relation rate must be in [0, 1], got {}",
                self.page_relation_rate
            ));
        }
        Ok(())
    }

    pub fn pair_target(&self) -> usize {
        let total = self.concept_count * (self.concept_count - 1) / 2;
        ((self.ontology_pair_density * total as f64).round() as usize).clamp(1, total)
    }
}

/// Builds an environment; identical params give identical environments.
///
/// Every page ends up with at least one concept: a page that drew no
/// relations gets one isolated concept instead. The query pairs every
/// concept with a term.
pub fn generate(params: &GeneratorParams) -> Result<Environment> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.concept_count;

    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(&mut rng);
    pairs.truncate(params.pair_target());
    pairs.sort_unstable();

    let width = digits(n);
    let mut relations = Vec::new();
    for &(a, b) in &pairs {
        let eta = rng.random_range(1..=params.max_multiplicity);
        for k in 1..=eta {
            relations.push((format!("r{a:0width$}-{b:0width$}-{k}"), a, b));
        }
    }
    let labels = (0..n).map(|i| format!("C{i}")).collect();
    let ontology = OntologyGraph::new(
        labels,
        relations.iter().map(|(id, a, b)| (id.clone(), *a, *b)),
    )?;

    let page_width = digits(params.page_count);
    let mut pages = Vec::with_capacity(params.page_count);
    for p in 1..=params.page_count {
        let chosen: Vec<String> = relations
            .iter()
            .filter(|_| rng.random_bool(params.page_relation_rate))
            .map(|(id, _, _)| id.clone())
            .collect();
        let extra = if chosen.is_empty() {
            vec![rng.random_range(0..n)]
        } else {
            Vec::new()
        };
        pages.push(PageSubgraph::new(
            &ontology,
            format!("p{p:0page_width$}"),
            chosen,
            extra,
        )?);
    }
    let query = Query::new(&ontology, (0..n).map(|i| (format!("t{i}"), i)))?;
    Ok(Environment::new(ontology, pages, Some(query))?)
}

fn digits(n: usize) -> usize {
    n.max(1).to_string().len()
}

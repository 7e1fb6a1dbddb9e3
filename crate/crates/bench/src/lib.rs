//! Inputs shared by the benchmarks.

use semrank_core::backlink::{build_matrix, BacklinkMatrix, BacklinkMode};
use semrank_core::generator::{generate, GeneratorParams};
use semrank_core::{CandidateEdge, CandidateEdgeSet, Environment, PairKey};

/// Complete graph on `n` concepts with mixed weights `delta / 3`.
pub fn complete_candidates(n: usize) -> CandidateEdgeSet {
    let edges = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .enumerate()
        .map(|(i, (a, b))| {
            CandidateEdge::real(PairKey::from_indices(a, b).unwrap(), (i % 4) as u32, 3)
        })
        .collect();
    CandidateEdgeSet::new(edges).unwrap()
}

pub fn environment(seed: u64, pages: usize) -> Environment {
    generate(&GeneratorParams {
        seed,
        page_count: pages,
        ..GeneratorParams::default()
    })
    .unwrap()
}

pub fn backlink_matrix(seed: u64, pages: usize) -> BacklinkMatrix {
    build_matrix(
        &environment(seed, pages).pages,
        BacklinkMode::ReciprocalShared,
    )
    .unwrap()
}

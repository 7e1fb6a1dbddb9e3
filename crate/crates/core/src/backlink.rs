//! Back-link ranking: pages that annotate the same ontology relation are
//! linked (undirected, one back-link per shared relation), and pages are
//! ranked by the dominant eigenvector of the resulting matrix.

use num_traits::Zero;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::PageSubgraph;
use crate::num::{ratio, to_f64, Rational};
use crate::relation::{rank_real, EigenSummary, Method, RankReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BacklinkMode {
    /// `1 / shared` for every page pair sharing at least one relation.
    #[default]
    ReciprocalShared,
    /// Counts scaled so every nonzero column sums to one.
    ColumnNormalized,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BacklinkMatrix {
    pub mode: BacklinkMode,
    entries: Vec<Vec<Rational>>,
}

impl BacklinkMatrix {
    pub fn order(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, row: usize, col: usize) -> &Rational {
        &self.entries[row][col]
    }

    pub fn rows(&self) -> &[Vec<Rational>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().flatten().all(Zero::is_zero)
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.entries
            .iter()
            .map(|row| row.iter().map(to_f64).collect())
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenResult {
    pub eigenvalue: f64,
    pub vector: Vec<f64>,
    pub iterations: usize,
    /// `max |H v - lambda v|` for the max-norm-scaled vector.
    pub residual: f64,
    pub last_entry_normalized: bool,
}

/// Number of relation ids two pages share.
pub fn shared_relation_count(a: &PageSubgraph, b: &PageSubgraph) -> usize {
    a.relation_ids().intersection(b.relation_ids()).count()
}

/// Shared-relation counts for every page pair; the diagonal is zero.
pub fn shared_counts(pages: &[PageSubgraph]) -> Vec<Vec<u64>> {
    (0..pages.len())
        .into_par_iter()
        .map(|i| {
            pages
                .iter()
                .enumerate()
                .map(|(j, other)| {
                    if i == j {
                        0
                    } else {
                        shared_relation_count(&pages[i], other) as u64
                    }
                })
                .collect()
        })
        .collect()
}

/// Builds `H` from a link-count matrix: `counts[i][j]` links between page
/// `j` and page `i` (column = source page). The diagonal is ignored.
pub fn matrix_from_counts(counts: &[Vec<u64>], mode: BacklinkMode) -> BacklinkMatrix {
    let n = counts.len();
    let mut entries = vec![vec![Rational::zero(); n]; n];
    match mode {
        BacklinkMode::ReciprocalShared => {
            for i in 0..n {
                for j in 0..n {
                    if i != j && counts[i][j] > 0 {
                        entries[i][j] = ratio(1, counts[i][j] as i64);
                    }
                }
            }
        }
        BacklinkMode::ColumnNormalized => {
            for j in 0..n {
                let total: u64 = (0..n).filter(|&i| i != j).map(|i| counts[i][j]).sum();
                if total == 0 {
                    continue;
                }
                for i in (0..n).filter(|&i| i != j) {
                    entries[i][j] = ratio(counts[i][j] as i64, total as i64);
                }
            }
        }
    }
    BacklinkMatrix { mode, entries }
}

pub fn build_matrix(pages: &[PageSubgraph], mode: BacklinkMode) -> Result<BacklinkMatrix> {
    if pages.len() < 2 {
        return Err(Error::TooFewPages(pages.len()));
    }
    Ok(matrix_from_counts(&shared_counts(pages), mode))
}

fn multiply(h: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    h.iter()
        .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
        .collect()
}

/// Index of the entry with the largest magnitude (first on ties).
fn dominant_index(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// Dominant eigenpair by power iteration with max-norm rescaling.
///
/// The start vector is positive and non-uniform so a symmetric two-cycle
/// shows up as an oscillation instead of converging by accident. Stops when
/// successive scaled vectors differ by less than `tolerance` in max-norm.
pub fn power_iteration(
    h: &BacklinkMatrix,
    tolerance: f64,
    max_iterations: usize,
) -> Result<EigenResult> {
    if tolerance <= 0.0 || !tolerance.is_finite() {
        return Err(Error::InvalidParams(format!(
            "tolerance must be positive, got {tolerance}"
        )));
    }
    if h.order() == 0 || h.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let m = h.to_f64();
    let n = m.len();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i + 1) as f64 / n as f64).collect();
    let top = v[dominant_index(&v)];
    v.iter_mut().for_each(|x| *x /= top);

    let mut change = f64::INFINITY;
    for iteration in 1..=max_iterations {
        let w = multiply(&m, &v);
        let k = dominant_index(&w);
        let scale = w[k];
        if scale == 0.0 {
            return Err(Error::ZeroMatrix);
        }
        let next: Vec<f64> = w.iter().map(|x| x / scale).collect();
        change = next
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        v = next;
        if change < tolerance {
            let hv = multiply(&m, &v);
            let lambda = hv[k] / v[k];
            let residual = hv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - lambda * b).abs())
                .fold(0.0, f64::max);
            let last = v[n - 1];
            let last_entry_normalized = last.abs() >= 1e-12;
            let divisor = if last_entry_normalized {
                last
            } else {
                v[dominant_index(&v)]
            };
            let vector = v.iter().map(|x| x / divisor).collect();
            return Ok(EigenResult {
                eigenvalue: lambda,
                vector,
                iterations: iteration,
                residual,
                last_entry_normalized,
            });
        }
    }
    Err(Error::NonConvergence {
        iterations: max_iterations,
        change,
    })
}

pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_MAX_ITERATIONS: usize = 100_000;
/// Relative gap under which two eigenvector entries count as tied.
pub const EIGEN_TIE_TOLERANCE: f64 = 1e-9;

/// Ranks pages by their eigenvector entry.
pub fn eigen_rank(
    pages: &[PageSubgraph],
    mode: BacklinkMode,
    tolerance: f64,
) -> Result<RankReport> {
    if pages.len() == 1 {
        let mut report = rank_real(Method::Eigen, vec![(pages[0].id().to_owned(), 1.0)], 0.0);
        report.eigen = Some(EigenSummary {
            eigenvalue: 0.0,
            iterations: 0,
            residual: 0.0,
            last_entry_normalized: true,
        });
        return Ok(report);
    }
    let h = build_matrix(pages, mode)?;
    let result = power_iteration(&h, tolerance, DEFAULT_MAX_ITERATIONS)?;
    let values = pages
        .iter()
        .zip(&result.vector)
        .map(|(p, &v)| (p.id().to_owned(), v))
        .collect();
    let mut report = rank_real(Method::Eigen, values, EIGEN_TIE_TOLERANCE);
    report.eigen = Some(EigenSummary {
        eigenvalue: result.eigenvalue,
        iterations: result.iterations,
        residual: result.residual,
        last_entry_normalized: result.last_entry_normalized,
    });
    Ok(report)
}

/// Integer helper for hand-written count matrices.
pub fn counts_from_rows(rows: &[&[u64]]) -> Vec<Vec<u64>> {
    rows.iter().map(|r| r.to_vec()).collect()
}

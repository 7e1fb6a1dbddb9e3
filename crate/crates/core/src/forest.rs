//! Enumeration of connected acyclic edge subsets ("constrained spanning
//! forests") of a candidate edge set.
//!
//! Trees are grown from their lowest-indexed edge with an exclusive
//! neighbourhood extension over the line graph, so every tree is produced
//! exactly once without a dedup pass. An edge whose endpoints are both
//! already in the growing tree would close a cycle and is skipped together
//! with every superset through it. [`brute_force_trees`] is the independent
//! check: it filters every fixed-size subset with a union-find.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::model::{CandidateEdgeSet, ConceptId, PairKey};
use crate::num::Rational;

/// Largest candidate set the enumerator accepts.
pub const ENUMERATION_CAP: usize = 24;
/// Largest candidate set the brute-force oracle accepts.
pub const ORACLE_CAP: usize = 16;

/// A connected acyclic edge subset; edges sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeSubset {
    edges: Vec<PairKey>,
}

impl TreeSubset {
    pub fn edges(&self) -> &[PairKey] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn concepts(&self) -> std::collections::BTreeSet<ConceptId> {
        self.edges.iter().flat_map(|p| [p.lo(), p.hi()]).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LengthAggregate {
    pub length: usize,
    /// Sum over trees of the product of edge probabilities.
    pub weight_sum: Rational,
    pub tree_count: u64,
}

impl LengthAggregate {
    fn empty(length: usize) -> Self {
        Self {
            length,
            weight_sum: Rational::zero(),
            tree_count: 0,
        }
    }

    /// `weight_sum / tree_count`, or zero when there are no trees.
    pub fn mean_weight(&self) -> Rational {
        if self.tree_count == 0 {
            Rational::zero()
        } else {
            &self.weight_sum / Rational::from_integer(self.tree_count.into())
        }
    }
}

/// Aggregates for every length from 1 up to the longest tree, from a single
/// enumeration pass.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreeProfile {
    by_length: Vec<LengthAggregate>,
}

impl TreeProfile {
    pub fn max_length(&self) -> usize {
        self.by_length.len()
    }

    pub fn at(&self, length: usize) -> LengthAggregate {
        match length {
            0 => LengthAggregate::empty(0),
            l if l <= self.by_length.len() => self.by_length[l - 1].clone(),
            l => LengthAggregate::empty(l),
        }
    }

    pub fn lengths(&self) -> &[LengthAggregate] {
        &self.by_length
    }
}

struct LineGraph {
    /// Edges sharing an endpoint with each edge.
    adj: Vec<u32>,
    /// Local endpoint indices of each edge.
    ends: Vec<(u32, u32)>,
}

impl LineGraph {
    fn new(candidates: &CandidateEdgeSet, cap: usize) -> Result<Self> {
        let n = candidates.len();
        if n > cap {
            return Err(Error::EnumerationCap { edges: n, cap });
        }
        let concepts: Vec<ConceptId> = candidates.concepts().into_iter().collect();
        let local = |c: ConceptId| concepts.binary_search(&c).expect("edge endpoint") as u32;
        let ends: Vec<(u32, u32)> = candidates
            .edges()
            .iter()
            .map(|e| (local(e.pair.lo()), local(e.pair.hi())))
            .collect();
        let mut adj = vec![0u32; n];
        for i in 0..n {
            for j in i + 1..n {
                let (a, b) = ends[i];
                let (c, d) = ends[j];
                if a == c || a == d || b == c || b == d {
                    adj[i] |= 1 << j;
                    adj[j] |= 1 << i;
                }
            }
        }
        Ok(Self { adj, ends })
    }

    /// Calls `visit(edge_mask, length, acc)` once per tree of at most
    /// `max_len` edges. `step(acc, edge)` folds an edge into the accumulator.
    fn for_each_tree<A, S, V>(&self, max_len: usize, init: A, step: &S, visit: &mut V)
    where
        S: Fn(&A, usize) -> A,
        V: FnMut(u32, usize, &A),
    {
        if max_len == 0 {
            return;
        }
        let n = self.adj.len();
        let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        for root in 0..n {
            let above = if root + 1 >= 32 {
                0
            } else {
                full & (u32::MAX << (root + 1))
            };
            let (a, b) = self.ends[root];
            let frame = Frame {
                sub: 1 << root,
                nodes: (1u64 << a) | (1u64 << b),
                ext: self.adj[root] & above,
                closed: self.adj[root] | (1 << root),
                depth: 1,
            };
            self.grow(frame, above, max_len, &step(&init, root), step, visit);
        }
    }

    fn grow<A, S, V>(&self, f: Frame, above: u32, max_len: usize, acc: &A, step: &S, visit: &mut V)
    where
        S: Fn(&A, usize) -> A,
        V: FnMut(u32, usize, &A),
    {
        visit(f.sub, f.depth, acc);
        if f.depth == max_len {
            return;
        }
        let mut ext = f.ext;
        while ext != 0 {
            let w = ext.trailing_zeros() as usize;
            ext &= ext - 1;
            let (a, b) = self.ends[w];
            let (ma, mb) = (1u64 << a, 1u64 << b);
            if f.nodes & ma != 0 && f.nodes & mb != 0 {
                continue;
            }
            let next = Frame {
                sub: f.sub | (1 << w),
                nodes: f.nodes | ma | mb,
                ext: ext | (self.adj[w] & !f.closed & above),
                closed: f.closed | self.adj[w],
                depth: f.depth + 1,
            };
            self.grow(next, above, max_len, &step(acc, w), step, visit);
        }
    }
}

#[derive(Clone, Copy)]
struct Frame {
    sub: u32,
    nodes: u64,
    ext: u32,
    closed: u32,
    depth: usize,
}

fn subset_from_mask(candidates: &CandidateEdgeSet, mask: u32) -> TreeSubset {
    let edges = candidates
        .edges()
        .iter()
        .enumerate()
        .filter(|(i, _)| mask & (1 << i) != 0)
        .map(|(_, e)| e.pair)
        .collect();
    TreeSubset { edges }
}

/// All trees with exactly `length` edges, in lexicographic order.
pub fn enumerate_trees(candidates: &CandidateEdgeSet, length: usize) -> Result<Vec<TreeSubset>> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let graph = LineGraph::new(candidates, ENUMERATION_CAP)?;
    let mut out = Vec::new();
    graph.for_each_tree(length, (), &|_, _| (), &mut |mask, depth, _| {
        if depth == length {
            out.push(subset_from_mask(candidates, mask));
        }
    });
    out.sort();
    Ok(out)
}

pub fn aggregate(candidates: &CandidateEdgeSet, length: usize) -> Result<LengthAggregate> {
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let graph = LineGraph::new(candidates, ENUMERATION_CAP)?;
    let weights = probabilities(candidates);
    let mut sum = Weight::ZERO;
    let mut count = 0u64;
    graph.for_each_tree(
        length,
        Weight::ONE,
        &|acc: &Weight, e| acc.mul(&weights[e]),
        &mut |_, depth, product| {
            if depth == length {
                sum.add_assign(product);
                count += 1;
            }
        },
    );
    Ok(LengthAggregate {
        length,
        weight_sum: sum.to_rational(),
        tree_count: count,
    })
}

/// Aggregates for all lengths in one pass.
pub fn profile(candidates: &CandidateEdgeSet) -> Result<TreeProfile> {
    let graph = LineGraph::new(candidates, ENUMERATION_CAP)?;
    let weights = probabilities(candidates);
    let mut sums: Vec<(Weight, u64)> = Vec::new();
    graph.for_each_tree(
        candidates.len(),
        Weight::ONE,
        &|acc: &Weight, e| acc.mul(&weights[e]),
        &mut |_, depth, product| {
            if sums.len() < depth {
                sums.resize(depth, (Weight::ZERO, 0));
            }
            let slot = &mut sums[depth - 1];
            slot.0.add_assign(product);
            slot.1 += 1;
        },
    );
    let by_length = sums
        .into_iter()
        .enumerate()
        .map(|(i, (sum, count))| LengthAggregate {
            length: i + 1,
            weight_sum: sum.to_rational(),
            tree_count: count,
        })
        .collect();
    Ok(TreeProfile { by_length })
}

/// Longest tree over all candidates, or only those with positive weight.
/// Equals the largest connected component's size minus one.
pub fn max_structural_length(candidates: &CandidateEdgeSet, positive_only: bool) -> Result<usize> {
    if candidates.len() > ENUMERATION_CAP {
        return Err(Error::EnumerationCap {
            edges: candidates.len(),
            cap: ENUMERATION_CAP,
        });
    }
    let concepts: Vec<ConceptId> = candidates.concepts().into_iter().collect();
    let local = |c: ConceptId| concepts.binary_search(&c).expect("edge endpoint");
    let mut sets = UnionFind::new(concepts.len());
    let mut any = false;
    for edge in candidates.edges() {
        if positive_only && edge.delta.is_zero() {
            continue;
        }
        any = true;
        sets.union(local(edge.pair.lo()), local(edge.pair.hi()));
    }
    if !any {
        return Ok(0);
    }
    let mut sizes = vec![0usize; concepts.len()];
    let mut best = 0;
    for (c, edge_touched) in touched(candidates, &concepts, positive_only)
        .into_iter()
        .enumerate()
    {
        if edge_touched {
            let root = sets.find(c);
            sizes[root] += 1;
            best = best.max(sizes[root]);
        }
    }
    Ok(best.saturating_sub(1))
}

fn touched(
    candidates: &CandidateEdgeSet,
    concepts: &[ConceptId],
    positive_only: bool,
) -> Vec<bool> {
    let mut seen = vec![false; concepts.len()];
    for edge in candidates.edges() {
        if positive_only && edge.delta.is_zero() {
            continue;
        }
        for c in [edge.pair.lo(), edge.pair.hi()] {
            seen[concepts.binary_search(&c).expect("edge endpoint")] = true;
        }
    }
    seen
}

/// Exhaustive oracle: every `length`-subset, kept when acyclic and connected.
pub fn brute_force_trees(candidates: &CandidateEdgeSet, length: usize) -> Result<Vec<TreeSubset>> {
    let n = candidates.len();
    if n > ORACLE_CAP {
        return Err(Error::OracleSize {
            edges: n,
            cap: ORACLE_CAP,
        });
    }
    if length == 0 {
        return Err(Error::ZeroLength);
    }
    let concepts: Vec<ConceptId> = candidates.concepts().into_iter().collect();
    let local = |c: ConceptId| concepts.binary_search(&c).expect("edge endpoint");
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        if mask.count_ones() as usize != length {
            continue;
        }
        let mut sets = UnionFind::new(concepts.len());
        let mut nodes = std::collections::BTreeSet::new();
        let mut acyclic = true;
        for (i, edge) in candidates.edges().iter().enumerate() {
            if mask & (1 << i) == 0 {
                continue;
            }
            let (a, b) = (local(edge.pair.lo()), local(edge.pair.hi()));
            nodes.insert(a);
            nodes.insert(b);
            if !sets.union(a, b) {
                acyclic = false;
                break;
            }
        }
        // An acyclic graph with l edges has |V| - l components.
        if acyclic && nodes.len() == length + 1 {
            out.push(subset_from_mask(candidates, mask));
        }
    }
    out.sort();
    Ok(out)
}

fn probabilities(candidates: &CandidateEdgeSet) -> Vec<Weight> {
    candidates
        .edges()
        .iter()
        .map(|e| Weight::from_rational(&e.probability()))
        .collect()
}

/// Non-negative weight held as a reduced `u128` fraction, promoted to an
/// arbitrary-precision rational only when that overflows. Tree products of
/// small `delta / eta` values almost never leave the fast path.
#[derive(Debug, Clone)]
enum Weight {
    Small(u128, u128),
    Big(Rational),
}

impl Weight {
    const ZERO: Weight = Weight::Small(0, 1);
    const ONE: Weight = Weight::Small(1, 1);

    fn from_rational(r: &Rational) -> Self {
        match (r.numer().to_u128(), r.denom().to_u128()) {
            (Some(n), Some(d)) => Weight::Small(n, d),
            _ => Weight::Big(r.clone()),
        }
    }

    fn to_rational(&self) -> Rational {
        match self {
            Weight::Small(n, d) => Rational::new(BigInt::from(*n), BigInt::from(*d)),
            Weight::Big(r) => r.clone(),
        }
    }

    fn is_zero(&self) -> bool {
        match self {
            Weight::Small(n, _) => *n == 0,
            Weight::Big(r) => r.is_zero(),
        }
    }

    fn mul(&self, other: &Weight) -> Weight {
        if self.is_zero() || other.is_zero() {
            return Weight::ZERO;
        }
        if let (Weight::Small(a, b), Weight::Small(c, d)) = (self, other) {
            let (g1, g2) = (a.gcd(d), c.gcd(b));
            if let (Some(n), Some(m)) = ((a / g1).checked_mul(c / g2), (b / g2).checked_mul(d / g1))
            {
                return Weight::Small(n, m);
            }
        }
        Weight::Big(self.to_rational() * other.to_rational())
    }

    fn add_assign(&mut self, other: &Weight) {
        if other.is_zero() {
            return;
        }
        if let (Weight::Small(a, b), Weight::Small(c, d)) = (&*self, other) {
            let g = b.gcd(d);
            let sum = (b / g)
                .checked_mul(*d)
                .and_then(|l| Some((a.checked_mul(l / b)?.checked_add(c.checked_mul(l / d)?)?, l)));
            if let Some((n, l)) = sum {
                let r = n.gcd(&l).max(1);
                *self = Weight::Small(n / r, l / r);
                return;
            }
        }
        *self = Weight::Big(self.to_rational() + other.to_rational());
    }
}

struct UnionFind {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// False if `a` and `b` were already joined.
    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

//! Simple undirected graphs on bitset adjacency.
//!
//! Vertex sets cross the public API as sorted `Vec<usize>`; the algorithms
//! inside the crate work on [`FixedBitSet`]s sized to the whole graph so
//! that recursive extractors can keep original vertex indices throughout.

use fixedbitset::FixedBitSet;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionGraph {
    labels: Vec<String>,
    adj: Vec<FixedBitSet>,
    edges: usize,
}

impl IntersectionGraph {
    /// Edgeless graph on `n` vertices labelled `"0"`, `"1"`, ...
    pub fn empty(n: usize) -> Self {
        Self::with_labels((0..n).map(|i| i.to_string()).collect())
    }

    pub fn with_labels(labels: Vec<String>) -> Self {
        let n = labels.len();
        IntersectionGraph { labels, adj: vec![FixedBitSet::with_capacity(n); n], edges: 0 }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Self::empty(n);
        for &(u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`; returns false if it was already present.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<bool> {
        let n = self.vertex_count();
        if u >= n {
            return Err(Error::UnknownVertex(u));
        }
        if v >= n {
            return Err(Error::UnknownVertex(v));
        }
        if u == v {
            return Err(Error::InvalidParameter(format!("self-loop at vertex {u}")));
        }
        Ok(self.insert_edge(u, v))
    }

    pub(crate) fn insert_edge(&mut self, u: usize, v: usize) -> bool {
        if self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.edges += 1;
        true
    }

    pub fn vertex_count(&self) -> usize {
        self.labels.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges
    }

    pub fn label(&self, v: usize) -> &str {
        &self.labels[v]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn neighbors(&self, v: usize) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count_ones(..)
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, nb)| nb.ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// The subgraph induced by `set`. New vertex `i` is the `i`-th smallest
    /// element of `set`; labels carry over.
    pub fn induced_subgraph(&self, set: &[usize]) -> Result<IntersectionGraph> {
        let mut verts = set.to_vec();
        verts.sort_unstable();
        verts.dedup();
        if let Some(&bad) = verts.iter().find(|&&v| v >= self.vertex_count()) {
            return Err(Error::UnknownVertex(bad));
        }
        let mut sub = Self::with_labels(verts.iter().map(|&v| self.labels[v].clone()).collect());
        for (i, &u) in verts.iter().enumerate() {
            for (j, &v) in verts.iter().enumerate().skip(i + 1) {
                if self.adj[u].contains(v) {
                    sub.insert_edge(i, j);
                }
            }
        }
        Ok(sub)
    }

    pub fn complement(&self) -> IntersectionGraph {
        let n = self.vertex_count();
        let mut h = Self::with_labels(self.labels.clone());
        for u in 0..n {
            for v in u + 1..n {
                if !self.adj[u].contains(v) {
                    h.insert_edge(u, v);
                }
            }
        }
        h
    }

    /// `2m / n`.
    pub fn average_degree(&self) -> Result<Ratio<u64>> {
        let n = self.vertex_count() as u64;
        if n == 0 {
            return Err(Error::DegenerateGraph("average degree needs at least one vertex".into()));
        }
        Ok(Ratio::new(2 * self.edges as u64, n))
    }

    /// `m / C(n, 2)`.
    pub fn edge_density(&self) -> Result<Ratio<u64>> {
        let n = self.vertex_count() as u64;
        if n < 2 {
            return Err(Error::DegenerateGraph("edge density needs at least two vertices".into()));
        }
        Ok(Ratio::new(self.edges as u64, n * (n - 1) / 2))
    }

    pub fn full_set(&self) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.vertex_count());
        s.insert_range(..);
        s
    }

    /// Bitset of `verts`; panics on out-of-range indices.
    pub fn set_of(&self, verts: &[usize]) -> FixedBitSet {
        let mut s = FixedBitSet::with_capacity(self.vertex_count());
        for &v in verts {
            s.insert(v);
        }
        s
    }

    pub fn edges_within(&self, set: &FixedBitSet) -> usize {
        set.ones().map(|v| self.adj[v].intersection_count(set)).sum::<usize>() / 2
    }

    pub fn degree_within(&self, v: usize, set: &FixedBitSet) -> usize {
        self.adj[v].intersection_count(set)
    }

    pub fn is_independent(&self, verts: &[usize]) -> bool {
        let set = self.set_of(verts);
        verts.iter().all(|&v| self.adj[v].is_disjoint(&set))
    }

    pub fn is_clique(&self, verts: &[usize]) -> bool {
        verts.iter().enumerate().all(|(i, &u)| verts[i + 1..].iter().all(|&v| u != v && self.adj[u].contains(v)))
    }

    /// Connected components of the subgraph induced by `set`, each sorted,
    /// listed by smallest vertex.
    pub fn components_within(&self, set: &FixedBitSet) -> Vec<Vec<usize>> {
        let mut unseen = set.clone();
        let mut comps = Vec::new();
        while let Some(start) = unseen.minimum() {
            let mut comp = Vec::new();
            let mut stack = vec![start];
            unseen.set(start, false);
            while let Some(v) = stack.pop() {
                comp.push(v);
                let mut fresh = self.adj[v].clone();
                fresh.intersect_with(&unseen);
                for w in fresh.ones() {
                    unseen.set(w, false);
                    stack.push(w);
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    pub fn components(&self) -> Vec<Vec<usize>> {
        self.components_within(&self.full_set())
    }
}

/// Vertices of `set` in increasing order.
pub(crate) fn to_vec(set: &FixedBitSet) -> Vec<usize> {
    set.ones().collect()
}

/// A `k`-clique of `g`, or `None` if `g` has none. Exact.
pub fn find_clique(g: &IntersectionGraph, k: usize) -> Option<Vec<usize>> {
    find_clique_in(g, &g.full_set(), k)
}

/// A `k`-clique inside `set`. Branch and bound over candidate sets ordered
/// by a greedy colouring; the colour count bounds the clique size.
pub fn find_clique_in(g: &IntersectionGraph, set: &FixedBitSet, k: usize) -> Option<Vec<usize>> {
    if k == 0 {
        return Some(Vec::new());
    }
    let mut current = Vec::with_capacity(k);
    if extend_clique(g, &mut current, set.clone(), k) {
        current.sort_unstable();
        Some(current)
    } else {
        None
    }
}

fn extend_clique(g: &IntersectionGraph, current: &mut Vec<usize>, mut cand: FixedBitSet, k: usize) -> bool {
    if current.len() == k {
        return true;
    }
    if current.len() + cand.count_ones(..) < k {
        return false;
    }
    let (order, colours) = colour_sort(g, &cand);
    for i in (0..order.len()).rev() {
        if current.len() + colours[i] < k {
            return false;
        }
        let v = order[i];
        let mut next = cand.clone();
        next.intersect_with(&g.adj[v]);
        current.push(v);
        if extend_clique(g, current, next, k) {
            return true;
        }
        current.pop();
        cand.set(v, false);
    }
    false
}

/// Greedy sequential colouring of `cand` in index order. Returns the
/// vertices sorted by colour together with the (1-based) colour of each.
fn colour_sort(g: &IntersectionGraph, cand: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    let mut uncoloured = cand.clone();
    let mut order = Vec::with_capacity(cand.count_ones(..));
    let mut colours = Vec::with_capacity(order.capacity());
    let mut colour = 0;
    while !uncoloured.is_clear() {
        colour += 1;
        let mut available = uncoloured.clone();
        while let Some(v) = available.minimum() {
            available.set(v, false);
            available.difference_with(&g.adj[v]);
            uncoloured.set(v, false);
            order.push(v);
            colours.push(colour);
        }
    }
    (order, colours)
}

/// Largest clique inside `set`, exact.
pub fn max_clique_in(g: &IntersectionGraph, set: &FixedBitSet) -> Vec<usize> {
    let mut best = Vec::new();
    let mut k = 1;
    while let Some(c) = find_clique_in(g, set, k) {
        best = c;
        k += 1;
    }
    best
}

/// Cheap lower bound on the clique number: grow a clique greedily from each
/// of the `seeds` highest-degree vertices of `set`.
pub fn greedy_clique_in(g: &IntersectionGraph, set: &FixedBitSet, seeds: usize) -> Vec<usize> {
    let mut by_degree: Vec<usize> = set.ones().collect();
    by_degree.sort_by_key(|&v| (std::cmp::Reverse(g.degree_within(v, set)), v));
    let mut best = Vec::new();
    for &seed in by_degree.iter().take(seeds) {
        let mut clique = vec![seed];
        let mut cand = g.adj[seed].clone();
        cand.intersect_with(set);
        while !cand.is_clear() {
            let v = cand.ones().max_by_key(|&v| (g.adj[v].intersection_count(&cand), std::cmp::Reverse(v))).unwrap();
            clique.push(v);
            cand.intersect_with(&g.adj[v]);
        }
        if clique.len() > best.len() {
            clique.sort_unstable();
            best = clique;
        }
    }
    best
}

/// A partition of the vertex set into independent colour classes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coloring {
    pub classes: Vec<Vec<usize>>,
}

impl Coloring {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn validate(&self, g: &IntersectionGraph) -> std::result::Result<(), String> {
        let mut seen = FixedBitSet::with_capacity(g.vertex_count());
        for (i, class) in self.classes.iter().enumerate() {
            for &v in class {
                if v >= g.vertex_count() {
                    return Err(format!("class {i} names unknown vertex {v}"));
                }
                if seen.put(v) {
                    return Err(format!("vertex {v} appears in two classes"));
                }
            }
            if !g.is_independent(class) {
                return Err(format!("class {i} is not independent"));
            }
        }
        if seen.count_ones(..) != g.vertex_count() {
            return Err("classes do not cover every vertex".into());
        }
        Ok(())
    }
}

/// Colours `g` by repeatedly asking `extractor` for an independent subset of
/// the still-uncoloured vertices. Each answer is checked before it is used.
pub fn greedy_color<F>(g: &IntersectionGraph, mut extractor: F) -> Result<Coloring>
where
    F: FnMut(&[usize]) -> Result<Vec<usize>>,
{
    let mut remaining = g.full_set();
    let mut classes = Vec::new();
    let mut round = 0;
    while !remaining.is_clear() {
        round += 1;
        let rest = to_vec(&remaining);
        let mut class = extractor(&rest)?;
        class.sort_unstable();
        class.dedup();
        if class.is_empty() {
            return Err(Error::ExtractorViolation { round, reason: "returned an empty set".into() });
        }
        if let Some(v) = class.iter().find(|&&v| v >= g.vertex_count() || !remaining.contains(v)) {
            return Err(Error::ExtractorViolation { round, reason: format!("vertex {v} is not uncoloured") });
        }
        if !g.is_independent(&class) {
            return Err(Error::ExtractorViolation { round, reason: "returned a non-independent set".into() });
        }
        for &v in &class {
            remaining.set(v, false);
        }
        classes.push(class);
    }
    Ok(Coloring { classes })
}

/// Standard small graphs, handy for examples and tests.
pub mod named {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::IntersectionGraph;

    pub fn complete(n: usize) -> IntersectionGraph {
        let mut g = IntersectionGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.insert_edge(u, v);
            }
        }
        g
    }

    pub fn path(n: usize) -> IntersectionGraph {
        let mut g = IntersectionGraph::empty(n);
        for v in 1..n {
            g.insert_edge(v - 1, v);
        }
        g
    }

    pub fn cycle(n: usize) -> IntersectionGraph {
        let mut g = path(n);
        if n > 2 {
            g.insert_edge(n - 1, 0);
        }
        g
    }

    pub fn star(leaves: usize) -> IntersectionGraph {
        let mut g = IntersectionGraph::empty(leaves + 1);
        for v in 1..=leaves {
            g.insert_edge(0, v);
        }
        g
    }

    /// Parts are consecutive index ranges; every cross-part pair is an edge.
    pub fn complete_multipartite(sizes: &[usize]) -> IntersectionGraph {
        let n = sizes.iter().sum();
        let mut part = Vec::with_capacity(n);
        for (i, &s) in sizes.iter().enumerate() {
            part.extend(std::iter::repeat_n(i, s));
        }
        let mut g = IntersectionGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if part[u] != part[v] {
                    g.insert_edge(u, v);
                }
            }
        }
        g
    }

    pub fn complete_bipartite(a: usize, b: usize) -> IntersectionGraph {
        complete_multipartite(&[a, b])
    }

    /// Outer 5-cycle on 0..5, inner pentagram on 5..10, spokes i -- i+5.
    pub fn petersen() -> IntersectionGraph {
        let mut g = IntersectionGraph::empty(10);
        for i in 0..5 {
            g.insert_edge(i, (i + 1) % 5);
            g.insert_edge(5 + i, 5 + (i + 2) % 5);
            g.insert_edge(i, i + 5);
        }
        g
    }

    /// `k x k` grid; vertex `(i, j)` has index `i * k + j`.
    pub fn grid(k: usize) -> IntersectionGraph {
        let mut g = IntersectionGraph::empty(k * k);
        for i in 0..k {
            for j in 0..k {
                if i + 1 < k {
                    g.insert_edge(i * k + j, (i + 1) * k + j);
                }
                if j + 1 < k {
                    g.insert_edge(i * k + j, i * k + j + 1);
                }
            }
        }
        g
    }

    /// Erdős–Rényi `G(n, p)` from a seeded ChaCha stream.
    pub fn gnp(n: usize, p: f64, seed: u64) -> IntersectionGraph {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = IntersectionGraph::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                if rng.random::<f64>() < p {
                    g.insert_edge(u, v);
                }
            }
        }
        g
    }
}

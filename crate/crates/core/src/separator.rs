//! Balanced vertex separators.
//!
//! A partition `(S, V1, V2)` of the vertex set is valid when neither side
//! exceeds `ceil(2n/3)` vertices and no edge joins `V1` to `V2`. Such a
//! partition exists for a given `S` exactly when every connected component
//! of `G - S` fits within the bound (two-way longest-first packing then
//! always succeeds), so the finders below only search over `S`.
//!
//! Size is best effort: the heuristics make no `O(sqrt(m))` promise.

use std::fmt;
use std::str::FromStr;

use fixedbitset::FixedBitSet;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generate::{generate, GeneratorSpec};
use crate::graph::{to_vec, IntersectionGraph};

/// Largest `n` accepted by [`Strategy::Exact`].
pub const EXACT_LIMIT: usize = 14;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    /// `Exact` up to [`EXACT_LIMIT`] vertices, else the better heuristic.
    #[default]
    Auto,
    Exact,
    BfsLayer,
    DegreePeel,
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "auto" => Ok(Strategy::Auto),
            "exact" => Ok(Strategy::Exact),
            "bfs_layer" | "bfs-layer" => Ok(Strategy::BfsLayer),
            "degree_peel" | "degree-peel" => Ok(Strategy::DegreePeel),
            other => Err(Error::InvalidParameter(format!("unknown separator strategy `{other}`"))),
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Auto => "auto",
            Strategy::Exact => "exact",
            Strategy::BfsLayer => "bfs_layer",
            Strategy::DegreePeel => "degree_peel",
        })
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparatorPartition {
    pub separator: Vec<usize>,
    pub left: Vec<usize>,
    pub right: Vec<usize>,
}

/// `ceil(2n / 3)`.
pub fn balance_limit(n: usize) -> usize {
    (2 * n).div_ceil(3)
}

impl SeparatorPartition {
    /// Checks the partition against the whole of `g`.
    pub fn validate(&self, g: &IntersectionGraph) -> std::result::Result<(), String> {
        self.validate_within(g, &g.full_set())
    }

    /// Checks the partition against the subgraph induced by `set`.
    pub fn validate_within(&self, g: &IntersectionGraph, set: &FixedBitSet) -> std::result::Result<(), String> {
        let n = set.count_ones(..);
        let mut seen = FixedBitSet::with_capacity(g.vertex_count());
        for (name, part) in [("S", &self.separator), ("V1", &self.left), ("V2", &self.right)] {
            for &v in part.iter() {
                if v >= g.vertex_count() || !set.contains(v) {
                    return Err(format!("{name} contains vertex {v} outside the graph"));
                }
                if seen.put(v) {
                    return Err(format!("vertex {v} is in two parts"));
                }
            }
        }
        if seen.count_ones(..) != n {
            return Err("parts do not cover the vertex set".into());
        }
        let limit = balance_limit(n);
        if self.left.len() > limit || self.right.len() > limit {
            return Err(format!(
                "unbalanced: |V1| = {}, |V2| = {}, limit {limit}",
                self.left.len(),
                self.right.len()
            ));
        }
        let right = g.set_of(&self.right);
        if let Some(&u) = self.left.iter().find(|&&u| !g.neighbors(u).is_disjoint(&right)) {
            return Err(format!("V1 vertex {u} has a neighbour in V2"));
        }
        Ok(())
    }
}

pub fn find_balanced_separator(g: &IntersectionGraph, strategy: Strategy) -> Result<SeparatorPartition> {
    separate_within(g, &g.full_set(), strategy)
}

/// Separator of the subgraph induced by `set`, in `g`'s vertex indices.
pub fn separate_within(g: &IntersectionGraph, set: &FixedBitSet, strategy: Strategy) -> Result<SeparatorPartition> {
    let n = set.count_ones(..);
    let cut = match strategy {
        Strategy::Exact if n > EXACT_LIMIT => {
            return Err(Error::TooLarge { what: "exact separator search", n, cap: EXACT_LIMIT })
        }
        Strategy::Exact => exact_cut(g, set),
        Strategy::Auto if n <= EXACT_LIMIT => exact_cut(g, set),
        Strategy::BfsLayer => bfs_layer_cut(g, set),
        Strategy::DegreePeel => degree_peel_cut(g, set),
        Strategy::Auto => {
            let bfs = bfs_layer_cut(g, set);
            let peel = degree_peel_cut(g, set);
            if peel.count_ones(..) < bfs.count_ones(..) {
                peel
            } else {
                bfs
            }
        }
    };
    Ok(assign_sides(g, set, &cut))
}

fn rest_of(set: &FixedBitSet, cut: &FixedBitSet) -> FixedBitSet {
    let mut rest = set.clone();
    rest.difference_with(cut);
    rest
}

fn largest_component(g: &IntersectionGraph, rest: &FixedBitSet) -> usize {
    g.components_within(rest).iter().map(Vec::len).max().unwrap_or(0)
}

fn is_valid_cut(g: &IntersectionGraph, set: &FixedBitSet, cut: &FixedBitSet, limit: usize) -> bool {
    largest_component(g, &rest_of(set, cut)) <= limit
}

/// Smallest cut, first in lexicographic order among those of that size.
fn exact_cut(g: &IntersectionGraph, set: &FixedBitSet) -> FixedBitSet {
    let verts = to_vec(set);
    let limit = balance_limit(verts.len());
    for size in 0..=verts.len() {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let cut = g.set_of(&idx.iter().map(|&i| verts[i]).collect::<Vec<_>>());
            if is_valid_cut(g, set, &cut, limit) {
                return cut;
            }
            if !next_combination(&mut idx, verts.len()) {
                break;
            }
        }
    }
    set.clone()
}

/// Advances `idx` to the next `k`-combination of `0..n` in lexicographic order.
pub(crate) fn next_combination(idx: &mut [usize], n: usize) -> bool {
    let k = idx.len();
    for i in (0..k).rev() {
        if idx[i] < n - k + i {
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

fn bfs_layers(g: &IntersectionGraph, within: &FixedBitSet, start: usize) -> Vec<Vec<usize>> {
    let mut unseen = within.clone();
    unseen.set(start, false);
    let mut layers = vec![vec![start]];
    loop {
        let mut next = FixedBitSet::with_capacity(g.vertex_count());
        for &v in layers.last().unwrap() {
            next.union_with(g.neighbors(v));
        }
        next.intersect_with(&unseen);
        if next.is_clear() {
            return layers;
        }
        unseen.difference_with(&next);
        layers.push(to_vec(&next));
    }
}

fn pseudo_peripheral(g: &IntersectionGraph, comp: &FixedBitSet) -> usize {
    let mut start = comp.minimum().expect("non-empty component");
    let mut ecc = bfs_layers(g, comp, start).len();
    for _ in 0..8 {
        let far = bfs_layers(g, comp, start).last().unwrap()[0];
        let far_ecc = bfs_layers(g, comp, far).len();
        if far_ecc <= ecc {
            break;
        }
        start = far;
        ecc = far_ecc;
    }
    start
}

fn bfs_layer_cut(g: &IntersectionGraph, set: &FixedBitSet) -> FixedBitSet {
    let n = set.count_ones(..);
    let limit = balance_limit(n);
    let empty = FixedBitSet::with_capacity(g.vertex_count());
    let comps = g.components_within(set);
    let Some(big) = comps.iter().find(|c| c.len() > limit) else {
        return empty;
    };
    let big = g.set_of(big);
    let start = pseudo_peripheral(g, &big);
    let mut best: Option<FixedBitSet> = None;
    for layer in bfs_layers(g, &big, start) {
        if best.as_ref().is_some_and(|b| b.count_ones(..) <= layer.len()) {
            continue;
        }
        let cut = g.set_of(&layer);
        if is_valid_cut(g, set, &cut, limit) {
            best = Some(cut);
        }
    }
    prune_cut(g, set, best.unwrap_or_else(|| set.clone()), limit)
}

fn degree_peel_cut(g: &IntersectionGraph, set: &FixedBitSet) -> FixedBitSet {
    let n = set.count_ones(..);
    let limit = balance_limit(n);
    let mut cut = FixedBitSet::with_capacity(g.vertex_count());
    let mut rest = set.clone();
    let mut degree: Vec<usize> = (0..g.vertex_count()).map(|v| if set.contains(v) { g.degree_within(v, set) } else { 0 }).collect();
    while largest_component(g, &rest) > limit {
        let v = rest.ones().max_by_key(|&v| (degree[v], std::cmp::Reverse(v))).unwrap();
        rest.set(v, false);
        cut.insert(v);
        for u in g.neighbors(v).intersection(&rest) {
            degree[u] -= 1;
        }
    }
    prune_cut(g, set, cut, limit)
}

/// Drops cut vertices, smallest first, whenever the cut stays valid without them.
fn prune_cut(g: &IntersectionGraph, set: &FixedBitSet, mut cut: FixedBitSet, limit: usize) -> FixedBitSet {
    for v in to_vec(&cut) {
        cut.set(v, false);
        if !is_valid_cut(g, set, &cut, limit) {
            cut.insert(v);
        }
    }
    cut
}

/// Packs the components of `set - cut` into two sides, largest first onto
/// the lighter side.
fn assign_sides(g: &IntersectionGraph, set: &FixedBitSet, cut: &FixedBitSet) -> SeparatorPartition {
    let mut comps = g.components_within(&rest_of(set, cut));
    comps.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for c in comps {
        if left.len() <= right.len() {
            left.extend(c);
        } else {
            right.extend(c);
        }
    }
    left.sort_unstable();
    right.sort_unstable();
    SeparatorPartition { separator: to_vec(cut), left, right }
}

/// One row of a separator-size survey.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurveyRow {
    pub n: usize,
    pub trials: usize,
    pub median_edges: f64,
    pub median_separator: f64,
}

/// For each size, generates `trials` instances (trial `t` uses seed
/// `spec.seed + t`), separates each and records the medians of `m` and `|S|`.
pub fn separator_size_survey(
    spec: &GeneratorSpec,
    sizes: &[usize],
    trials: usize,
    strategy: Strategy,
) -> Result<Vec<SurveyRow>> {
    if trials == 0 {
        return Err(Error::InvalidParameter("survey needs at least one trial".into()));
    }
    sizes
        .iter()
        .map(|&n| {
            let samples: Vec<(usize, usize)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let trial = GeneratorSpec { count: n, seed: spec.seed.wrapping_add(t as u64), ..spec.clone() };
                    let g = generate(&trial)?.graph()?;
                    let part = find_balanced_separator(&g, strategy)?;
                    Ok((g.edge_count(), part.separator.len()))
                })
                .collect::<Result<_>>()?;
            let edges: Vec<f64> = samples.iter().map(|s| s.0 as f64).collect();
            let seps: Vec<f64> = samples.iter().map(|s| s.1 as f64).collect();
            Ok(SurveyRow { n, trials, median_edges: median(edges), median_separator: median(seps) })
        })
        .collect()
}

pub fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let k = xs.len();
    if k == 0 {
        f64::NAN
    } else if k % 2 == 1 {
        xs[k / 2]
    } else {
        (xs[k / 2 - 1] + xs[k / 2]) / 2.0
    }
}

/// Least-squares fit of `y = K x^beta` on log-log axes, skipping
/// non-positive points. Returns `(K, beta)`.
pub fn fit_power_law(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let logs: Vec<(f64, f64)> =
        points.iter().filter(|(x, y)| *x > 0.0 && *y > 0.0).map(|(x, y)| (x.ln(), y.ln())).collect();
    if logs.len() < 2 {
        return None;
    }
    let k = logs.len() as f64;
    let mx = logs.iter().map(|p| p.0).sum::<f64>() / k;
    let my = logs.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = logs.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let beta = sxy / sxx;
    Some(((my - beta * mx).exp(), beta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn check(g: &IntersectionGraph, s: Strategy) -> SeparatorPartition {
        let p = find_balanced_separator(g, s).unwrap();
        p.validate(g).unwrap();
        p
    }

    #[test]
    fn path_three() {
        // With the ceil(2n/3) bound an end vertex already separates P3.
        let p = check(&path(3), Strategy::Exact);
        assert_eq!(p.separator, vec![0]);
        assert_eq!((p.left, p.right), (vec![1, 2], vec![]));
    }

    #[test]
    fn small_components_need_no_separator() {
        let mut g = IntersectionGraph::empty(9);
        for (u, v) in [(0, 1), (1, 2), (3, 4), (4, 5), (6, 7), (7, 8)] {
            g.add_edge(u, v).unwrap();
        }
        for s in [Strategy::Auto, Strategy::Exact, Strategy::BfsLayer, Strategy::DegreePeel] {
            assert!(check(&g, s).separator.is_empty(), "{s}");
        }
    }

    #[test]
    fn complete_six_needs_two() {
        assert_eq!(check(&complete(6), Strategy::Exact).separator.len(), 2);
        assert_eq!(balance_limit(6), 4);
    }

    #[test]
    fn heuristics_are_valid_on_varied_graphs() {
        for seed in 0..20 {
            for (n, p) in [(30, 0.1), (60, 0.05), (40, 0.5)] {
                let g = gnp(n, p, seed);
                for s in [Strategy::Auto, Strategy::BfsLayer, Strategy::DegreePeel] {
                    check(&g, s);
                }
            }
        }
        for n in 1..6 {
            check(&complete(n), Strategy::Auto);
            check(&IntersectionGraph::empty(n), Strategy::Auto);
        }
    }

    #[test]
    fn grid_separator_is_a_line() {
        for k in 4..=12 {
            let p = check(&grid(k), Strategy::BfsLayer);
            assert!(p.separator.len() <= k, "k = {k}: |S| = {}", p.separator.len());
        }
    }

    #[test]
    fn exact_refuses_large_inputs() {
        assert!(matches!(
            find_balanced_separator(&path(15), Strategy::Exact),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn separation_within_subset_uses_original_indices() {
        let g = path(7);
        let set = g.set_of(&[2, 3, 4]);
        let p = separate_within(&g, &set, Strategy::Auto).unwrap();
        assert_eq!(p.separator, vec![2]);
        assert_eq!(p.left, vec![3, 4]);
        p.validate_within(&g, &set).unwrap();
    }

    #[test]
    fn strategies_parse() {
        assert_eq!("bfs_layer".parse::<Strategy>().unwrap(), Strategy::BfsLayer);
        assert!("nope".parse::<Strategy>().is_err());
        assert_eq!(Strategy::DegreePeel.to_string(), "degree_peel");
    }

    #[test]
    fn power_law_fit_recovers_exponent() {
        let pts: Vec<(f64, f64)> = [10.0, 100.0, 1000.0].iter().map(|&x: &f64| (x, 3.0 * x.powf(0.5))).collect();
        let (k, beta) = fit_power_law(&pts).unwrap();
        assert!((beta - 0.5).abs() < 1e-12 && (k - 3.0).abs() < 1e-9);
        assert_eq!(median(vec![3.0, 1.0, 2.0, 10.0]), 2.5);
    }

    #[test]
    fn combinations_in_order() {
        let mut idx = vec![0, 1];
        let mut all = vec![idx.clone()];
        while next_combination(&mut idx, 4) {
            all.push(idx.clone());
        }
        assert_eq!(all, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
    }
}

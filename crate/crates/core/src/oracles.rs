//! Exact exponential-time references for validating the extractors. Each
//! oracle refuses inputs above its size cap instead of running slowly, and
//! breaks ties lexicographically.
//!
//! These work on `u64` adjacency masks and share no search code with the
//! rest of the crate.

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{Point, StringFamily};
use crate::graph::IntersectionGraph;
use crate::quasiplanar::Drawing;
use crate::separator::{balance_limit, SeparatorPartition};

pub const MIS_CAP: usize = 40;
pub const CLIQUE_CAP: usize = 60;
pub const KP_FREE_CAP: usize = 18;
pub const SEPARATOR_CAP: usize = 14;
pub const BICLIQUE_CAP: usize = 16;
pub const CROSSING_SUBSETS_CAP: u128 = 1_000_000;

fn masks(g: &IntersectionGraph, cap: usize, what: &'static str) -> Result<Vec<u64>> {
    let n = g.vertex_count();
    if n > cap {
        return Err(Error::TooLarge { what, n, cap });
    }
    Ok((0..n).map(|u| (0..n).filter(|&v| g.has_edge(u, v)).fold(0u64, |m, v| m | 1 << v)).collect())
}

fn bits(mut m: u64) -> Vec<usize> {
    let mut out = Vec::new();
    while m != 0 {
        out.push(m.trailing_zeros() as usize);
        m &= m - 1;
    }
    out
}

fn all(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Size of a maximum independent set inside `mask`.
fn mis_size(adj: &[u64], mask: u64) -> u32 {
    if mask == 0 {
        return 0;
    }
    let mut pick = None;
    let mut heavy = (0, 0);
    for v in bits(mask) {
        let d = (adj[v] & mask).count_ones();
        if d <= 1 {
            pick = Some(v);
            break;
        }
        if d > heavy.1 {
            heavy = (v, d);
        }
    }
    if let Some(v) = pick {
        // A vertex of degree at most one lies in some maximum independent set.
        return 1 + mis_size(adj, mask & !(adj[v] | 1 << v));
    }
    let v = heavy.0;
    let without = mis_size(adj, mask & !(1 << v));
    let with = 1 + mis_size(adj, mask & !(adj[v] | 1 << v));
    without.max(with)
}

/// Lexicographically smallest maximum independent set of `mask`.
fn lex_mis(adj: &[u64], mask: u64) -> Vec<usize> {
    let target = mis_size(adj, mask);
    let mut chosen = Vec::new();
    let mut avail = mask;
    for v in bits(mask) {
        if avail & 1 << v == 0 {
            continue;
        }
        let rest = avail & !(adj[v] | 1 << v) & !all(v + 1);
        if 1 + chosen.len() as u32 + mis_size(adj, rest) == target {
            chosen.push(v);
            avail = rest;
        } else {
            avail &= !(1 << v);
        }
        if chosen.len() as u32 == target {
            break;
        }
    }
    chosen
}

pub fn max_independent_set_exact(g: &IntersectionGraph) -> Result<Vec<usize>> {
    let adj = masks(g, MIS_CAP, "exact maximum independent set")?;
    Ok(lex_mis(&adj, all(adj.len())))
}

pub fn max_clique_exact(g: &IntersectionGraph) -> Result<Vec<usize>> {
    let adj = masks(g, CLIQUE_CAP, "exact maximum clique")?;
    let full = all(adj.len());
    let comp: Vec<u64> = adj.iter().enumerate().map(|(v, &m)| !m & full & !(1 << v)).collect();
    Ok(lex_mis(&comp, full))
}

fn has_clique(adj: &[u64], cand: u64, k: u32) -> bool {
    if k == 0 {
        return true;
    }
    if cand.count_ones() < k {
        return false;
    }
    let mut rest = cand;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        if has_clique(adj, rest & adj[v], k - 1) {
            return true;
        }
    }
    false
}

/// Largest vertex set spanning no `p`-clique, first in lexicographic order
/// among those of that size.
pub fn max_kp_free_subset_exact(g: &IntersectionGraph, p: usize) -> Result<Vec<usize>> {
    let adj = masks(g, KP_FREE_CAP, "exact K_p-free subset")?;
    let n = adj.len();
    if p == 0 {
        return Err(Error::InvalidParameter("p must be at least 1".into()));
    }
    for k in (0..=n).rev() {
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let mask = idx.iter().fold(0u64, |m, &v| m | 1 << v);
            if !has_clique(&adj, mask, p as u32) {
                return Ok(idx);
            }
            if !crate::separator::next_combination(&mut idx, n) {
                break;
            }
        }
    }
    unreachable!("the empty set spans no clique")
}

/// Minimum separator over all labellings of the vertices as `S`, `V1`, `V2`.
pub fn min_balanced_separator_exact(g: &IntersectionGraph) -> Result<SeparatorPartition> {
    let adj = masks(g, SEPARATOR_CAP, "exact separator search")?;
    let n = adj.len();
    let full = all(n);
    let limit = balance_limit(n) as u32;
    let mut reach = vec![0u64; 1 << n];
    for m in 1..(1usize << n) {
        let low = m.trailing_zeros() as usize;
        reach[m] = reach[m & (m - 1)] | adj[low];
    }
    let mut best: Option<(u32, u64, u64)> = None;
    for a in 0..=full {
        if a.count_ones() > limit {
            continue;
        }
        let free = full & !a & !reach[a as usize];
        // Submasks of the vertices with no neighbour in A.
        let mut b = free;
        loop {
            if b.count_ones() <= limit {
                let s = n as u32 - a.count_ones() - b.count_ones();
                if best.is_none_or(|(bs, _, _)| s < bs) {
                    best = Some((s, a, b));
                }
            }
            if b == 0 {
                break;
            }
            b = (b - 1) & free;
        }
    }
    let (_, a, b) = best.expect("putting every vertex in S is valid");
    Ok(SeparatorPartition { separator: bits(full & !a & !b), left: bits(a), right: bits(b) })
}

/// Maximum `t` with disjoint `A`, `B`, `|A| = |B| = t`, `A` complete to `B`.
pub fn max_balanced_biclique_exact(g: &IntersectionGraph) -> Result<(Vec<usize>, Vec<usize>)> {
    let adj = masks(g, BICLIQUE_CAP, "exact balanced biclique")?;
    let n = adj.len();
    let full = all(n);
    let mut best = (0u32, 0u64, 0u64);
    for a in 1..=full {
        let common = bits(a).iter().fold(full, |m, &v| m & adj[v]);
        let t = a.count_ones().min(common.count_ones());
        if t > best.0 {
            best = (t, a, common);
        }
    }
    let t = best.0 as usize;
    Ok((bits(best.1)[..t].to_vec(), bits(best.2)[..t].to_vec()))
}

fn cross(o: &Point, a: &Point, b: &Point) -> BigRational {
    (&a.x - &o.x) * (&b.y - &o.y) - (&a.y - &o.y) * (&b.x - &o.x)
}

/// Contact of closed segments by solving `a0 + s (a1 - a0) = b0 + t (b1 - b0)`.
/// Returns `None` when disjoint, otherwise one contact point and whether
/// the contact is a collinear overlap of positive length.
fn contact(a0: &Point, a1: &Point, b0: &Point, b1: &Point) -> Option<(Point, bool)> {
    let zero = BigRational::zero();
    let one = BigRational::one();
    let (dax, day) = (&a1.x - &a0.x, &a1.y - &a0.y);
    let (dbx, dby) = (&b1.x - &b0.x, &b1.y - &b0.y);
    let den = &dax * &dby - &day * &dbx;
    if !den.is_zero() {
        let (ex, ey) = (&b0.x - &a0.x, &b0.y - &a0.y);
        let s = (&ex * &dby - &ey * &dbx) / &den;
        let t = (&ex * &day - &ey * &dax) / &den;
        if s < zero || s > one || t < zero || t > one {
            return None;
        }
        return Some((Point::new(&a0.x + &s * &dax, &a0.y + &s * &day), false));
    }
    if !cross(a0, a1, b0).is_zero() {
        return None;
    }
    // Collinear: project onto the direction of a and intersect the intervals.
    let len2 = &dax * &dax + &day * &day;
    let param = |p: &Point| ((&p.x - &a0.x) * &dax + (&p.y - &a0.y) * &day) / &len2;
    let (t0, t1) = (param(b0), param(b1));
    let (lo, hi) = if t0 <= t1 { (t0, t1) } else { (t1, t0) };
    let lo = if lo > zero { lo } else { zero };
    let hi = if hi < one { hi } else { one };
    if lo > hi {
        return None;
    }
    let at = |t: &BigRational| Point::new(&a0.x + t * &dax, &a0.y + t * &day);
    Some((at(&lo), lo != hi))
}

/// All-pairs intersection test over every segment pair, no shortcuts.
pub fn intersection_graph_brute(fam: &StringFamily) -> IntersectionGraph {
    let strings = fam.strings();
    let mut g = IntersectionGraph::with_labels(strings.iter().map(|s| s.id().to_string()).collect());
    for i in 0..strings.len() {
        for j in i + 1..strings.len() {
            let meet = strings[i].segments().any(|(a0, a1)| strings[j].segments().any(|(b0, b1)| contact(a0, a1, b0, b1).is_some()));
            if meet {
                g.add_edge(i, j).expect("indices in range");
            }
        }
    }
    g
}

/// Whether two drawn edges cross, judged on the full curves: any common
/// point counts except a lone touch at a shared endpoint vertex.
fn edges_cross(d: &Drawing, i: usize, j: usize) -> bool {
    let (e, f) = (&d.edges()[i], &d.edges()[j]);
    let shared: Vec<&Point> =
        [e.u, e.v].into_iter().filter(|&w| w == f.u || w == f.v).map(|w| &d.vertices()[w]).collect();
    e.points.windows(2).any(|a| {
        f.points.windows(2).any(|b| match contact(&a[0], &a[1], &b[0], &b[1]) {
            None => false,
            Some((_, true)) => true,
            Some((p, false)) => !shared.contains(&&p),
        })
    })
}

/// Pairwise crossing relation of a drawing's edges on the untruncated curves.
pub fn crossing_pairs(d: &Drawing) -> Vec<Vec<bool>> {
    let m = d.edges().len();
    let upper: Vec<Vec<bool>> = (0..m).map(|i| (i + 1..m).map(|j| edges_cross(d, i, j)).collect()).collect();
    (0..m)
        .map(|i| (0..m).map(|j| if i < j { upper[i][j - i - 1] } else if j < i { upper[j][i - j - 1] } else { false }).collect())
        .collect()
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    (0..k as u128).fold(1u128, |acc, i| acc * (n as u128 - i) / (i + 1))
}

/// First `r` edges (lexicographically) that pairwise cross, if any.
pub fn pairwise_crossing_exact(d: &Drawing, r: usize) -> Result<Option<Vec<usize>>> {
    let m = d.edges().len();
    let subsets = binomial(m, r);
    if subsets > CROSSING_SUBSETS_CAP {
        return Err(Error::TooLarge { what: "pairwise crossing enumeration", n: m, cap: r });
    }
    if r > m {
        return Ok(None);
    }
    let cross = crossing_pairs(d);
    let mut idx: Vec<usize> = (0..r).collect();
    loop {
        if idx.iter().enumerate().all(|(a, &i)| idx[a + 1..].iter().all(|&j| cross[i][j])) {
            return Ok(Some(idx));
        }
        if !crate::separator::next_combination(&mut idx, m) {
            return Ok(None);
        }
    }
}

/// The chord-interleaving graph of `K_n` on `n` points in circular order,
/// vertices numbered like the edges of a convex complete drawing.
pub fn interleaving_graph(n: usize) -> IntersectionGraph {
    let chords: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
    let mut g = IntersectionGraph::with_labels(chords.iter().map(|(u, v)| format!("{u}-{v}")).collect());
    for (i, &(a, b)) in chords.iter().enumerate() {
        for (j, &(c, d)) in chords.iter().enumerate().skip(i + 1) {
            let inside = |x: usize| a < x && x < b;
            let distinct = a != c && a != d && b != c && b != d;
            if distinct && inside(c) != inside(d) {
                g.add_edge(i, j).expect("indices in range");
            }
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;
    use crate::graph::find_clique;

    #[test]
    fn mis_examples() {
        assert_eq!(max_independent_set_exact(&cycle(5)).unwrap(), vec![0, 2]);
        assert_eq!(max_independent_set_exact(&complete_bipartite(3, 3)).unwrap(), vec![0, 1, 2]);
        assert_eq!(max_independent_set_exact(&petersen()).unwrap().len(), 4);
        assert!(matches!(max_independent_set_exact(&path(41)), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn clique_examples() {
        assert_eq!(max_clique_exact(&complete(6)).unwrap().len(), 6);
        assert_eq!(max_clique_exact(&cycle(7)).unwrap(), vec![0, 1]);
        let g = gnp(15, 0.5, 1);
        let size = max_clique_exact(&g).unwrap().len();
        // Full subset enumeration.
        let brute = (0u32..1 << 15)
            .filter(|m| g.is_clique(&(0..15).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>()))
            .map(|m| m.count_ones() as usize)
            .max()
            .unwrap();
        assert_eq!(size, brute);
        assert!(find_clique(&g, size).is_some() && find_clique(&g, size + 1).is_none());
    }

    #[test]
    fn kp_free_examples() {
        assert_eq!(max_kp_free_subset_exact(&cycle(6), 3).unwrap().len(), 6);
        assert_eq!(max_kp_free_subset_exact(&complete(4), 3).unwrap(), vec![0, 1]);
        assert_eq!(max_kp_free_subset_exact(&petersen(), 2).unwrap().len(), 4);
    }

    #[test]
    fn separator_examples() {
        assert_eq!(min_balanced_separator_exact(&path(3)).unwrap().separator.len(), 1);
        assert_eq!(min_balanced_separator_exact(&IntersectionGraph::empty(6)).unwrap().separator.len(), 0);
        let k6 = complete(6);
        let p = min_balanced_separator_exact(&k6).unwrap();
        assert_eq!(p.separator.len(), 2);
        p.validate(&k6).unwrap();
    }

    #[test]
    fn biclique_examples() {
        assert_eq!(max_balanced_biclique_exact(&complete_bipartite(3, 3)).unwrap(), (vec![0, 1, 2], vec![3, 4, 5]));
        assert_eq!(max_balanced_biclique_exact(&IntersectionGraph::empty(4)).unwrap().0.len(), 0);
        assert_eq!(max_balanced_biclique_exact(&cycle(8)).unwrap().0.len(), 1);
    }

    #[test]
    fn interleaving_of_five_points() {
        let g = interleaving_graph(5);
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 5));
        assert_eq!(max_independent_set_exact(&g).unwrap().len(), 7);
        // Three long diagonals of a hexagon pairwise interleave.
        assert!(find_clique(&interleaving_graph(6), 3).is_some());
    }
}

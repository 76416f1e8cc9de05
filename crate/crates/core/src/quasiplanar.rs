//! Topological graph drawings, their crossing string graphs and
//! quasiplanarity.
//!
//! Edges sharing an endpoint are kept apart geometrically: every edge is cut
//! back near both ends before intersections are computed, so contact at a
//! common vertex never registers while genuine crossings do.

use std::collections::HashSet;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extract::{lg, q_independent_set, AlgorithmParams};
use crate::geometry::{intersection_graph, point_on_segment, point_segment_dist2, segment_contact, Point, Polyline, SegmentContact, StringFamily};
use crate::graph::{find_clique, find_clique_in, IntersectionGraph};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DrawingEdge {
    pub u: usize,
    pub v: usize,
    /// Polyline from `vertex(u)` to `vertex(v)`.
    pub points: Vec<Point>,
    pub id: Option<String>,
}

impl DrawingEdge {
    pub fn straight(vertices: &[Point], u: usize, v: usize) -> DrawingEdge {
        DrawingEdge { u, v, points: vec![vertices[u].clone(), vertices[v].clone()], id: None }
    }

    /// The id if one was given, else `"u-v"`.
    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| format!("{}-{}", self.u, self.v))
    }

    fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.points.windows(2).map(|w| (&w[0], &w[1]))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Drawing {
    vertices: Vec<Point>,
    edges: Vec<DrawingEdge>,
}

impl Drawing {
    /// Validates distinct vertex points, edge endpoints and that no edge
    /// touches a vertex point except at its own two ends.
    pub fn new(vertices: Vec<Point>, edges: Vec<DrawingEdge>) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidDrawing(msg));
        let mut points = HashSet::new();
        for (i, p) in vertices.iter().enumerate() {
            if !points.insert(p) {
                return bad(format!("vertex {i} repeats an earlier vertex point"));
            }
        }
        let mut pairs = HashSet::new();
        let mut labels = HashSet::new();
        for (i, e) in edges.iter().enumerate() {
            if e.u >= vertices.len() || e.v >= vertices.len() {
                return bad(format!("edge {i} names a missing vertex"));
            }
            if e.u == e.v {
                return bad(format!("edge {i} is a loop"));
            }
            if !pairs.insert((e.u.min(e.v), e.u.max(e.v))) {
                return bad(format!("edge {i} duplicates an earlier edge"));
            }
            if !labels.insert(e.label()) {
                return bad(format!("edge label `{}` is not unique", e.label()));
            }
            if e.points.len() < 2 || e.points.windows(2).any(|w| w[0] == w[1]) {
                return bad(format!("edge {i} needs at least two points and no repeated consecutive points"));
            }
            if e.points[0] != vertices[e.u] || e.points[e.points.len() - 1] != vertices[e.v] {
                return bad(format!("edge {i} does not run from its endpoint u to v"));
            }
            let last = e.points.len() - 1;
            if e.points[1..last].iter().any(|p| p == &vertices[e.u] || p == &vertices[e.v]) {
                return bad(format!("edge {i} revisits one of its endpoints"));
            }
            for (w, p) in vertices.iter().enumerate() {
                let touches = e.segments().any(|(a, b)| point_on_segment(p, a, b));
                if touches && w != e.u && w != e.v {
                    return bad(format!("edge {i} passes through vertex {w}"));
                }
            }
            for (k, (a, b)) in e.segments().enumerate() {
                let inner = |p: &Point| point_on_segment(p, a, b);
                if (k > 0 && inner(&vertices[e.u])) || (k + 1 < last && inner(&vertices[e.v])) {
                    return bad(format!("edge {i} passes through one of its endpoints"));
                }
            }
        }
        Ok(Drawing { vertices, edges })
    }

    /// Straight-line drawing of the given edges.
    pub fn straight_line(vertices: Vec<Point>, pairs: &[(usize, usize)]) -> Result<Self> {
        for &(u, v) in pairs {
            if u >= vertices.len() || v >= vertices.len() {
                return Err(Error::InvalidDrawing(format!("edge {u}-{v} names a missing vertex")));
            }
        }
        let edges = pairs.iter().map(|&(u, v)| DrawingEdge::straight(&vertices, u, v)).collect();
        Drawing::new(vertices, edges)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn edges(&self) -> &[DrawingEdge] {
        &self.edges
    }

    /// The drawing restricted to the listed edges.
    pub fn restricted(&self, edges: &[usize]) -> Drawing {
        Drawing { vertices: self.vertices.clone(), edges: edges.iter().map(|&i| self.edges[i].clone()).collect() }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Radius {
    /// Half the smallest clearance around the vertices.
    Auto,
    Fixed(BigRational),
}

/// Smallest squared distance `R^2` from a vertex to anything it must stay
/// clear of: non-incident edges, crossings on its incident edges (other than
/// at itself) and half the distance to another vertex.
pub fn clearance2(d: &Drawing) -> Result<Option<BigRational>> {
    let mut best: Option<BigRational> = None;
    let mut offer = |x: BigRational| {
        if best.as_ref().is_none_or(|b| &x < b) {
            best = Some(x);
        }
    };
    let verts = &d.vertices;
    let used: Vec<usize> = {
        let mut u: Vec<usize> = d.edges.iter().flat_map(|e| [e.u, e.v]).collect();
        u.sort_unstable();
        u.dedup();
        u
    };
    for (i, &a) in used.iter().enumerate() {
        for &b in &used[i + 1..] {
            offer(verts[a].dist2(&verts[b]) / BigRational::from_integer(4.into()));
        }
    }
    for &w in &used {
        for e in d.edges.iter().filter(|e| e.u != w && e.v != w) {
            for (a, b) in e.segments() {
                offer(point_segment_dist2(&verts[w], a, b));
            }
        }
    }
    for (i, e) in d.edges.iter().enumerate() {
        for f in &d.edges[i + 1..] {
            let ends: Vec<usize> = [e.u, e.v, f.u, f.v].into_iter().collect();
            let shared: Vec<usize> = [e.u, e.v].into_iter().filter(|&x| x == f.u || x == f.v).collect();
            for (a0, a1) in e.segments() {
                for (b0, b1) in f.segments() {
                    match segment_contact(a0, a1, b0, b1) {
                        SegmentContact::Disjoint => {}
                        SegmentContact::Point(p) => {
                            for &w in &ends {
                                if p != verts[w] {
                                    offer(p.dist2(&verts[w]));
                                }
                            }
                        }
                        SegmentContact::Overlap(lo, hi) => {
                            if let Some(&w) = shared.iter().find(|&&w| point_on_segment(&verts[w], &lo, &hi)) {
                                return Err(Error::DegenerateDrawing(format!(
                                    "edges {} and {} overlap at their common vertex {w}",
                                    e.label(),
                                    f.label()
                                )));
                            }
                            for &w in &ends {
                                offer(point_segment_dist2(&verts[w], &lo, &hi));
                            }
                        }
                    }
                }
            }
        }
    }
    if let Some(b) = &best {
        if b.is_zero() {
            return Err(Error::DegenerateDrawing("a crossing coincides with a vertex point".into()));
        }
    }
    Ok(best)
}

/// Removes the part of every edge near its endpoints. The cut near each end
/// lies at distance in `[r, 2r)` from that end. `Auto` uses `r = R / 2` with
/// `R` the clearance of [`clearance2`], so only contacts at shared vertices
/// disappear. A fixed `r` must satisfy `4r <= |uv|` for every edge.
pub fn truncate_edges(d: &Drawing, radius: &Radius) -> Result<StringFamily> {
    let r2 = match radius {
        Radius::Auto => match clearance2(d)? {
            Some(big) => big / BigRational::from_integer(4.into()),
            None => BigRational::one(),
        },
        Radius::Fixed(r) => {
            if !r.is_positive() {
                return Err(Error::InvalidParameter("truncation radius must be positive".into()));
            }
            let r2 = r * r;
            let sixteen = BigRational::from_integer(16.into());
            if d.edges.iter().any(|e| d.vertices[e.u].dist2(&d.vertices[e.v]) < &sixteen * &r2) {
                return Err(Error::InvalidParameter("truncation radius exceeds a quarter of an edge's span".into()));
            }
            r2
        }
    };
    let four_r2 = BigRational::from_integer(4.into()) * &r2;
    let strings = d
        .edges
        .iter()
        .map(|e| {
            let pts = &e.points;
            let k = pts.len() - 1;
            let (cu, cv) = (&d.vertices[e.u], &d.vertices[e.v]);
            // First segment leaving the disk around u, last one entering v's.
            let i = (0..k).find(|&i| pts[i + 1].dist2(cu) >= r2).expect("edge leaves its start disk");
            let j = (0..k).rev().find(|&j| pts[j].dist2(cv) >= r2).expect("edge enters its end disk");
            let start = cut_point(cu, &pts[i], &pts[i + 1], &r2, &four_r2);
            let end = cut_point(cv, &pts[j + 1], &pts[j], &r2, &four_r2);
            let mut out = vec![start];
            for p in pts[i + 1..=j].iter().chain(std::iter::once(&end)) {
                if out.last() != Some(p) {
                    out.push(p.clone());
                }
            }
            Polyline::new(e.label(), out)
        })
        .collect::<Result<Vec<_>>>()?;
    StringFamily::new(strings)
}

/// A point of segment `inside-outside` at squared distance in `[r2, 4 r2)`
/// from `c`, where `inside` is closer than `r` and `outside` at least `r`.
fn cut_point(c: &Point, inside: &Point, outside: &Point, r2: &BigRational, four_r2: &BigRational) -> Point {
    if &outside.dist2(c) < four_r2 {
        return outside.clone();
    }
    let half = BigRational::new(1.into(), 2.into());
    let (mut a, mut b) = (inside.clone(), outside.clone());
    loop {
        let mid = Point::new((&a.x + &b.x) * &half, (&a.y + &b.y) * &half);
        let d2 = mid.dist2(c);
        if &d2 < r2 {
            a = mid;
        } else if &d2 >= four_r2 {
            b = mid;
        } else {
            return mid;
        }
    }
}

/// Intersection graph of the truncated edges, labelled by edge labels.
pub fn crossing_graph(d: &Drawing) -> Result<IntersectionGraph> {
    if d.edges.is_empty() {
        return Ok(IntersectionGraph::empty(0));
    }
    intersection_graph(&truncate_edges(d, &Radius::Auto)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuasiplanarCheck {
    pub r: usize,
    pub quasiplanar: bool,
    /// Edge indices of `r` pairwise crossing edges when not quasiplanar.
    pub witness: Option<Vec<usize>>,
}

/// True iff no `r` edges pairwise cross.
pub fn is_r_quasiplanar(d: &Drawing, r: usize) -> Result<QuasiplanarCheck> {
    if r < 2 {
        return Err(Error::InvalidParameter(format!("r must be at least 2, got {r}")));
    }
    let witness = find_clique(&crossing_graph(d)?, r);
    Ok(QuasiplanarCheck { r, quasiplanar: witness.is_none(), witness })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseSubgraph {
    /// Indices of the kept edges.
    pub edges: Vec<usize>,
    pub total_edges: usize,
    /// `(c' (s - 1) / log |E|)^(2s - 4)`.
    pub guaranteed_fraction: f64,
}

/// Edge subset of a `2^s`-quasiplanar drawing that is 4-quasiplanar.
pub fn sparse_subgraph(d: &Drawing, s: u32, params: &AlgorithmParams) -> Result<SparseSubgraph> {
    if !(3..=62).contains(&s) {
        return Err(Error::InvalidParameter(format!("s must lie in 3..=62, got {s}")));
    }
    let cg = crossing_graph(d)?;
    let m = cg.vertex_count();
    let guaranteed_fraction = (params.c_prime * (s - 1) as f64 / lg(m)).powi(2 * s as i32 - 4);
    if m == 0 {
        return Ok(SparseSubgraph { edges: Vec::new(), total_edges: 0, guaranteed_fraction });
    }
    if let Some(clique) = find_clique(&cg, 1 << s) {
        return Err(Error::PreconditionViolated { clique });
    }
    let edges = q_independent_set(&cg, s, 2, params)?.vertices();
    if let Some(clique) = find_clique_in(&cg, &cg.set_of(&edges), 4) {
        return Err(Error::InternalBoundViolation(format!("kept edges {clique:?} pairwise cross")));
    }
    Ok(SparseSubgraph { edges, total_edges: m, guaranteed_fraction })
}

/// `n (C log n / s)^(2s - 4)`, the edge bound for `2^s`-quasiplanar drawings.
pub fn edge_bound(n: u64, s: u32, c: f64) -> Result<f64> {
    if s < 3 || !(c.is_finite() && c > 0.0) {
        return Err(Error::DomainError(format!("need s >= 3 and C > 0, got s = {s}, C = {c}")));
    }
    if s >= 64 || n < (1u64 << s) {
        return Err(Error::DomainError(format!("need n >= 2^s, got n = {n}, s = {s}")));
    }
    let n = n as f64;
    Ok(n * (c * n.log2() / s as f64).powi(2 * s as i32 - 4))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeBoundCheck {
    pub n: u64,
    pub m: u64,
    pub bound: f64,
    pub within_bound: bool,
    /// `3 n^(1 + epsilon)`.
    pub threshold: f64,
    pub above_threshold: bool,
}

/// Compares an edge count against [`edge_bound`] and `3 n^(1 + epsilon)`.
pub fn check_edge_bound(n: u64, m: u64, s: u32, c: f64, epsilon: f64) -> Result<EdgeBoundCheck> {
    let bound = edge_bound(n, s, c)?;
    let threshold = 3.0 * (n as f64).powf(1.0 + epsilon);
    Ok(EdgeBoundCheck { n, m, bound, within_bound: m as f64 <= bound, threshold, above_threshold: m as f64 > threshold })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::convex_points;
    use crate::graph::named::petersen;

    fn p(x: i64, y: i64) -> Point {
        Point::from_ints(x, y)
    }

    fn convex_complete(n: usize) -> Drawing {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        Drawing::straight_line(convex_points(n, &Point::from_ints(0, 0), &BigRational::one()).unwrap(), &pairs).unwrap()
    }

    #[test]
    fn validation() {
        let v = vec![p(0, 0), p(2, 0), p(1, 0)];
        assert!(Drawing::straight_line(v.clone(), &[(0, 1)]).is_err());
        assert!(Drawing::straight_line(v.clone(), &[(0, 2), (2, 0)]).is_err());
        assert!(Drawing::straight_line(v.clone(), &[(0, 0)]).is_err());
        assert!(Drawing::straight_line(vec![p(0, 0), p(0, 0)], &[]).is_err());
        let bent = DrawingEdge { u: 0, v: 1, points: vec![p(0, 0), p(1, 1), p(2, 0)], id: None };
        Drawing::new(v, vec![bent]).unwrap();
    }

    #[test]
    fn shared_endpoint_is_not_a_crossing() {
        let d = Drawing::straight_line(vec![p(0, 0), p(4, 0), p(0, 4)], &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(crossing_graph(&d).unwrap().edge_count(), 0);
    }

    #[test]
    fn far_crossing_survives() {
        let d = Drawing::straight_line(vec![p(0, 0), p(4, 4), p(0, 4), p(4, 0)], &[(0, 1), (2, 3)]).unwrap();
        let g = crossing_graph(&d).unwrap();
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.labels(), &["0-1".to_string(), "2-3".to_string()]);
    }

    #[test]
    fn convex_k4_has_one_crossing() {
        let g = crossing_graph(&convex_complete(4)).unwrap();
        assert_eq!(g.vertex_count(), 6);
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn convex_k5_gives_a_pentagram() {
        // Sides of the pentagon cross nothing; the five diagonals form a 5-cycle.
        let g = crossing_graph(&convex_complete(5)).unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (10, 5));
        let diagonals: Vec<usize> = (0..10).filter(|&v| g.degree(v) == 2).collect();
        assert_eq!(diagonals.len(), 5);
        let labels: Vec<&str> = diagonals.iter().map(|&v| g.label(v)).collect();
        assert_eq!(labels, ["0-2", "0-3", "1-3", "1-4", "2-4"]);
        assert!(find_clique(&g, 3).is_none());
        assert_ne!(g.edge_count(), petersen().edge_count());
    }

    #[test]
    fn single_edge_and_planar() {
        let d = Drawing::straight_line(vec![p(0, 0), p(1, 0)], &[(0, 1)]).unwrap();
        assert_eq!(crossing_graph(&d).unwrap().vertex_count(), 1);
        let square = Drawing::straight_line(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]).unwrap();
        assert_eq!(crossing_graph(&square).unwrap().edge_count(), 0);
        for r in 2..5 {
            assert!(is_r_quasiplanar(&square, r).unwrap().quasiplanar);
        }
    }

    #[test]
    fn quasiplanarity_of_convex_k5() {
        let d = convex_complete(5);
        let two = is_r_quasiplanar(&d, 2).unwrap();
        assert!(!two.quasiplanar);
        assert_eq!(two.witness.as_ref().unwrap().len(), 2);
        assert!(is_r_quasiplanar(&d, 3).unwrap().quasiplanar);
        assert!(is_r_quasiplanar(&d, 1).is_err());
    }

    #[test]
    fn overlap_at_shared_vertex_is_degenerate() {
        let d = Drawing::straight_line(vec![p(0, 0), p(2, 0), p(4, 1)], &[(0, 1), (0, 2)]).unwrap();
        crossing_graph(&d).unwrap();
        let e1 = DrawingEdge { u: 0, v: 1, points: vec![p(0, 0), p(1, 0), p(2, 1)], id: None };
        let e2 = DrawingEdge { u: 0, v: 2, points: vec![p(0, 0), p(1, 0), p(3, -1)], id: None };
        let d = Drawing::new(vec![p(0, 0), p(2, 1), p(3, -1)], vec![e1, e2]).unwrap();
        assert!(matches!(crossing_graph(&d), Err(Error::DegenerateDrawing(_))));
    }

    #[test]
    fn smaller_radius_keeps_crossings() {
        let d = convex_complete(6);
        let auto = crossing_graph(&d).unwrap();
        let r2 = clearance2(&d).unwrap().unwrap();
        // A radius of R / 8 bounded above by a rational: r = R2 / 8 when R2 < 1.
        let r = if r2 < BigRational::one() { r2 / BigRational::from_integer(8.into()) } else { BigRational::new(1.into(), 8.into()) };
        let smaller = intersection_graph(&truncate_edges(&d, &Radius::Fixed(r)).unwrap()).unwrap();
        assert_eq!(auto.edges().collect::<Vec<_>>(), smaller.edges().collect::<Vec<_>>());
    }

    #[test]
    fn sparse_subgraph_examples() {
        let square = Drawing::straight_line(vec![p(0, 0), p(1, 0), p(1, 1), p(0, 1)], &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let out = sparse_subgraph(&square, 3, &AlgorithmParams::default()).unwrap();
        assert_eq!(out.edges, vec![0, 1, 2, 3]);
        let d = convex_complete(6);
        let out = sparse_subgraph(&d, 3, &AlgorithmParams::default()).unwrap();
        assert!(is_r_quasiplanar(&d.restricted(&out.edges), 4).unwrap().quasiplanar);
        let one = Drawing::straight_line(vec![p(0, 0), p(4, 4), p(0, 4), p(4, 0), p(9, 9)], &[(0, 1), (2, 3), (1, 4)]).unwrap();
        assert!(sparse_subgraph(&one, 3, &AlgorithmParams::default()).unwrap().edges.len() >= 2);
    }

    #[test]
    fn edge_bound_examples() {
        assert!((edge_bound(256, 3, 1.0).unwrap() - 16384.0 / 9.0).abs() < 1e-9);
        assert!((edge_bound(8, 3, 1.0).unwrap() - 8.0).abs() < 1e-12);
        assert!(matches!(edge_bound(7, 3, 1.0), Err(Error::DomainError(_))));
        assert!(edge_bound(64, 2, 1.0).is_err());
    }

    #[test]
    fn planar_counts_against_the_bound() {
        // 3n - 6 <= n (log n / 3)^2 first holds at n = 33 and then for good.
        let holds = |n: u64| check_edge_bound(n, 3 * n - 6, 3, 1.0, 0.5).unwrap().within_bound;
        assert!(!holds(16));
        assert!(!holds(32));
        assert!((33..5000).all(holds));
        assert!((33..200).all(|n| check_edge_bound(n, 3 * n - 6, 3, 2.0, 0.5).unwrap().within_bound));
    }
}

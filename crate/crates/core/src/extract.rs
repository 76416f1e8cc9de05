//! Constructive extraction procedures on (string) graphs: neighbourhood
//! covers, half-clique-free subgraphs, dense cores, complete multipartite
//! covers, independent and `2^q`-independent sets, and the colour-or-clique
//! dichotomy.
//!
//! Recursions run on vertex subsets of the input graph, so every witness is
//! expressed in the input's own vertex indices. Each operation re-verifies
//! its witness before returning it.

use fixedbitset::FixedBitSet;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{find_clique, find_clique_in, greedy_clique_in, greedy_color, to_vec, Coloring, IntersectionGraph};
use crate::separator::{separate_within, Strategy};

/// Tunable constants. Witness correctness never depends on them; only the
/// sizes that are guaranteed do. The proofs suggest `c = c'' * c' / 30`,
/// which is not enforced.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlgorithmParams {
    /// Separator constant, `|S| <= c1 * sqrt(m)`.
    pub c1: f64,
    /// Biclique constant.
    pub c2: f64,
    /// Master extraction constant.
    pub c: f64,
    /// Density threshold constant in `alpha = c' (s / log n)^2`.
    pub c_prime: f64,
    /// Part-size constant of multipartite covers.
    pub c_dblprime: f64,
    pub epsilon: f64,
    /// Overrides the computed exponent of color-or-clique.
    pub delta: Option<f64>,
    pub strategy: Strategy,
    /// Inputs up to this size have their clique-freeness precondition
    /// checked exactly; larger ones get a greedy spot check.
    pub precheck_limit: usize,
    /// Greedily extend extracted sets while they keep their property.
    pub maximalize: bool,
}

impl Default for AlgorithmParams {
    fn default() -> Self {
        AlgorithmParams {
            c1: 2.0,
            c2: 1.0,
            c: 0.01,
            c_prime: 0.01,
            c_dblprime: 0.05,
            epsilon: 0.5,
            delta: None,
            strategy: Strategy::Auto,
            precheck_limit: 64,
            maximalize: true,
        }
    }
}

impl AlgorithmParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c1", self.c1),
            ("c2", self.c2),
            ("c", self.c),
            ("c_prime", self.c_prime),
            ("c_dblprime", self.c_dblprime),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        check_exponent("epsilon", self.epsilon)?;
        if let Some(d) = self.delta {
            check_exponent("delta", d)?;
        }
        Ok(())
    }

    /// `max((12 c1)^2, 4 c1^2 / eps^2)`.
    pub fn c_refine(&self, epsilon: f64) -> f64 {
        (12.0 * self.c1).powi(2).max(4.0 * self.c1 * self.c1 / (epsilon * epsilon))
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} must lie in (0, 1), got {v}")))
    }
}

/// Binary logarithm floored at `log2 2 = 1`.
pub fn lg(n: usize) -> f64 {
    (n.max(2) as f64).log2()
}

fn pow2(s: u32) -> Result<usize> {
    if s > 62 {
        return Err(Error::InvalidParameter(format!("s = {s} is too large")));
    }
    Ok(1usize << s)
}

/// Members of a neighbourhood cover. With an apex, every member is adjacent
/// to it; without one the group is a single isolated vertex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverGroup {
    pub apex: Option<usize>,
    pub members: Vec<usize>,
}

/// Disjoint parts, each complete to every other.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MultipartiteCover {
    pub parts: Vec<Vec<usize>>,
    pub alpha: f64,
    /// `c'' * alpha * n / t^2` for the working set the cover came from.
    pub min_part_size: f64,
}

impl MultipartiteCover {
    pub fn validate(&self, g: &IntersectionGraph) -> std::result::Result<(), String> {
        if self.parts.len() < 2 {
            return Err("a cover needs at least two parts".into());
        }
        let mut seen = FixedBitSet::with_capacity(g.vertex_count());
        let mut sets = Vec::with_capacity(self.parts.len());
        for (i, part) in self.parts.iter().enumerate() {
            check_vertices(g, part)?;
            for &v in part {
                if seen.put(v) {
                    return Err(format!("vertex {v} lies in two parts"));
                }
            }
            if (part.len() as f64) < self.min_part_size {
                return Err(format!("part {i} has {} vertices, below {}", part.len(), self.min_part_size));
            }
            sets.push(g.set_of(part));
        }
        for (i, part) in self.parts.iter().enumerate() {
            for (j, other) in sets.iter().enumerate().skip(i + 1) {
                if let Some(&v) = part.iter().find(|&&v| g.neighbors(v).intersection_count(other) != other.count_ones(..)) {
                    return Err(format!("vertex {v} of part {i} is not complete to part {j}"));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExtractionWitness {
    Independent {
        vertices: Vec<usize>,
        /// Dense steps that fell back to the separator branch.
        cover_fallbacks: usize,
    },
    QIndependent {
        vertices: Vec<usize>,
        /// The set spans no clique of this size (`2^q`).
        clique_bound: usize,
        cover_fallbacks: usize,
    },
    KpFree {
        vertices: Vec<usize>,
        p: usize,
    },
    NeighborhoodCover {
        groups: Vec<CoverGroup>,
    },
    DenseCore {
        vertices: Vec<usize>,
        epsilon: f64,
        c_refine: f64,
    },
    Multipartite(MultipartiteCover),
    Coloring(Coloring),
    Clique {
        vertices: Vec<usize>,
    },
}

fn check_vertices(g: &IntersectionGraph, verts: &[usize]) -> std::result::Result<(), String> {
    let mut seen = FixedBitSet::with_capacity(g.vertex_count());
    for &v in verts {
        if v >= g.vertex_count() {
            return Err(format!("unknown vertex {v}"));
        }
        if seen.put(v) {
            return Err(format!("vertex {v} listed twice"));
        }
    }
    Ok(())
}

fn exact(v: f64) -> BigRational {
    BigRational::from_float(v).unwrap_or_else(BigRational::zero)
}

fn avg_degree(edges: usize, n: usize) -> BigRational {
    BigRational::new((2 * edges).into(), n.max(1).into())
}

impl ExtractionWitness {
    /// The chosen vertex set, or all covered vertices for covers and colourings.
    pub fn vertices(&self) -> Vec<usize> {
        let mut out = match self {
            ExtractionWitness::Independent { vertices, .. }
            | ExtractionWitness::QIndependent { vertices, .. }
            | ExtractionWitness::KpFree { vertices, .. }
            | ExtractionWitness::DenseCore { vertices, .. }
            | ExtractionWitness::Clique { vertices } => vertices.clone(),
            ExtractionWitness::NeighborhoodCover { groups } => groups.iter().flat_map(|g| g.members.clone()).collect(),
            ExtractionWitness::Multipartite(cover) => cover.parts.concat(),
            ExtractionWitness::Coloring(c) => c.classes.concat(),
        };
        out.sort_unstable();
        out
    }

    pub fn kind(&self) -> &'static str {
        match self {
            ExtractionWitness::Independent { .. } => "independent",
            ExtractionWitness::QIndependent { .. } => "q_independent",
            ExtractionWitness::KpFree { .. } => "kp_free",
            ExtractionWitness::NeighborhoodCover { .. } => "neighborhood_cover",
            ExtractionWitness::DenseCore { .. } => "dense_core",
            ExtractionWitness::Multipartite(_) => "multipartite",
            ExtractionWitness::Coloring(_) => "coloring",
            ExtractionWitness::Clique { .. } => "clique",
        }
    }

    /// Re-checks the claimed property against `g`.
    pub fn validate(&self, g: &IntersectionGraph) -> std::result::Result<(), String> {
        match self {
            ExtractionWitness::Independent { vertices, .. } => {
                check_vertices(g, vertices)?;
                if !g.is_independent(vertices) {
                    return Err("set is not independent".into());
                }
            }
            ExtractionWitness::QIndependent { vertices, clique_bound: p, .. } | ExtractionWitness::KpFree { vertices, p } => {
                check_vertices(g, vertices)?;
                if let Some(c) = find_clique_in(g, &g.set_of(vertices), *p) {
                    return Err(format!("set contains the {p}-clique {c:?}"));
                }
            }
            ExtractionWitness::NeighborhoodCover { groups } => validate_cover(g, groups)?,
            ExtractionWitness::DenseCore { vertices, epsilon, c_refine } => {
                check_vertices(g, vertices)?;
                if vertices.is_empty() {
                    return Err("dense core is empty".into());
                }
                let d = avg_degree(g.edge_count(), g.vertex_count());
                let inner = avg_degree(g.edges_within(&g.set_of(vertices)), vertices.len());
                if inner < (BigRational::one() - exact(*epsilon)) * &d {
                    return Err(format!("average degree {inner} is below (1 - {epsilon}) * {d}"));
                }
                let cap = (exact(*c_refine) * &inner).max(BigRational::one());
                if BigRational::from_integer(vertices.len().into()) > cap {
                    return Err(format!("{} vertices exceed max(1, {c_refine} * {inner})", vertices.len()));
                }
            }
            ExtractionWitness::Multipartite(cover) => cover.validate(g)?,
            ExtractionWitness::Coloring(col) => col.validate(g)?,
            ExtractionWitness::Clique { vertices } => {
                check_vertices(g, vertices)?;
                if vertices.is_empty() || !g.is_clique(vertices) {
                    return Err("set is not a non-empty clique".into());
                }
            }
        }
        Ok(())
    }
}

fn validate_cover(g: &IntersectionGraph, groups: &[CoverGroup]) -> std::result::Result<(), String> {
    let all: Vec<usize> = groups.iter().flat_map(|gr| gr.members.iter().copied()).collect();
    check_vertices(g, &all)?;
    let mut owner = vec![usize::MAX; g.vertex_count()];
    for (i, gr) in groups.iter().enumerate() {
        if let Some(a) = gr.apex {
            if a >= g.vertex_count() {
                return Err(format!("unknown apex {a}"));
            }
            if let Some(&v) = gr.members.iter().find(|&&v| !g.has_edge(a, v)) {
                return Err(format!("member {v} is not adjacent to apex {a}"));
            }
        }
        for &v in &gr.members {
            owner[v] = i;
        }
    }
    for comp in g.components_within(&g.set_of(&all)) {
        if comp.len() == 1 {
            continue;
        }
        let i = owner[comp[0]];
        if groups[i].apex.is_none() || comp.iter().any(|&v| owner[v] != i) {
            return Err(format!("component containing {} has no apex", comp[0]));
        }
    }
    Ok(())
}

/// Recursion state shared by the extractors.
struct Extractor<'a> {
    g: &'a IntersectionGraph,
    params: &'a AlgorithmParams,
    cover_fallbacks: usize,
}

impl<'a> Extractor<'a> {
    fn new(g: &'a IntersectionGraph, params: &'a AlgorithmParams) -> Result<Self> {
        params.validate()?;
        Ok(Extractor { g, params, cover_fallbacks: 0 })
    }

    fn empty(&self) -> FixedBitSet {
        FixedBitSet::with_capacity(self.g.vertex_count())
    }

    /// Fails with a `k`-clique witness if `set` visibly contains one.
    fn precheck_free(&self, set: &FixedBitSet, k: usize) -> Result<()> {
        let clique = if set.count_ones(..) <= self.params.precheck_limit {
            find_clique_in(self.g, set, k)
        } else {
            let c = greedy_clique_in(self.g, set, 16);
            (c.len() >= k).then(|| c[..k].to_vec())
        };
        match clique {
            Some(clique) => Err(Error::PreconditionViolated { clique }),
            None => Ok(()),
        }
    }

    /// Separator split of `w`, or `None` when it makes no progress.
    fn split(&self, w: &FixedBitSet) -> Result<Option<(FixedBitSet, FixedBitSet)>> {
        let part = separate_within(self.g, w, self.params.strategy)?;
        if part.left.is_empty() && part.right.is_empty() {
            return Ok(None);
        }
        Ok(Some((self.g.set_of(&part.left), self.g.set_of(&part.right))))
    }

    fn cover(&self, w: &FixedBitSet) -> Result<Vec<CoverGroup>> {
        let n = w.count_ones(..);
        if n == 0 {
            return Ok(Vec::new());
        }
        let threshold = (self.params.c * n as f64 / lg(n).powi(2)).max(1.0);
        let (apex, degree) =
            w.ones().map(|v| (v, self.g.degree_within(v, w))).max_by_key(|&(v, d)| (d, std::cmp::Reverse(v))).unwrap();
        let neighbourhood = || {
            let mut m = self.g.neighbors(apex).clone();
            m.intersect_with(w);
            vec![CoverGroup { apex: Some(apex), members: to_vec(&m) }]
        };
        if degree == 0 {
            return Ok(w.ones().map(|v| CoverGroup { apex: None, members: vec![v] }).collect());
        }
        if degree as f64 >= threshold {
            return Ok(neighbourhood());
        }
        match self.split(w)? {
            None => Ok(neighbourhood()),
            Some((left, right)) => {
                let mut groups = self.cover(&left)?;
                groups.extend(self.cover(&right)?);
                Ok(groups)
            }
        }
    }

    fn half_free(&self, w: &FixedBitSet, h: usize) -> Result<FixedBitSet> {
        let n = w.count_ones(..);
        if n <= 1 || find_clique_in(self.g, w, h).is_none() {
            return Ok(w.clone());
        }
        let (g, p) = (self.g, self.params);
        let m = g.edges_within(w) as f64;
        let nf = n as f64;
        if m >= p.c * p.c2 * nf * nf / lg(n).powi(2) {
            let t_min = (p.c * nf / lg(n).powi(3)).ceil().max(1.0) as usize;
            if let Some((a, b)) = biclique_within(g, w, t_min, n <= BICLIQUE_EXACT_LIMIT) {
                let (sa, sb) = (g.set_of(&a), g.set_of(&b));
                let ca = match find_clique_in(g, &sa, h) {
                    None => return Ok(sa),
                    Some(c) => c,
                };
                let cb = match find_clique_in(g, &sb, h) {
                    None => return Ok(sb),
                    Some(c) => c,
                };
                let mut clique = [ca, cb].concat();
                clique.sort_unstable();
                return Err(Error::PreconditionViolated { clique });
            }
        }
        let mut out = match self.split(w)? {
            None => self.empty(),
            Some((left, right)) => {
                let mut out = self.half_free(&left, h)?;
                out.union_with(&self.half_free(&right, h)?);
                out
            }
        };
        if out.is_clear() {
            out.insert(w.minimum().unwrap());
        }
        Ok(out)
    }

    /// Complement peeling: drop the vertex of largest complement degree
    /// until the complement of `G[W]` falls apart, then pack its components
    /// into `2^p` groups for the smallest `p <= max_p` meeting the size bound.
    fn multipartite(&self, w: &FixedBitSet, alpha: f64, max_p: u32) -> Result<MultipartiteCover> {
        let g = self.g;
        let n = w.count_ones(..);
        let mut work = w.clone();
        while work.count_ones(..) >= 2 {
            let comps = complement_components(g, &work);
            if comps.len() >= 2 {
                for p in 1..=max_p.min(62) {
                    let t = 1usize << p;
                    if comps.len() < t {
                        break;
                    }
                    let parts = pack_groups(&comps, t);
                    let min_part_size = self.params.c_dblprime * alpha * n as f64 / (t * t) as f64;
                    if parts.iter().all(|x| x.len() as f64 >= min_part_size) {
                        let cover = MultipartiteCover { parts, alpha, min_part_size };
                        cover.validate(g).map_err(Error::InternalBoundViolation)?;
                        return Ok(cover);
                    }
                }
            }
            let size = work.count_ones(..);
            let v = work
                .ones()
                .max_by_key(|&v| (size - 1 - g.degree_within(v, &work), std::cmp::Reverse(v)))
                .unwrap();
            work.set(v, false);
        }
        Err(Error::NoCoverFound(format!("peeling exhausted a working set of {n} vertices")))
    }

    /// `2^q`-independent subset of `w`, assuming `G[W]` is `K_{2^s}`-free.
    /// Sets of at most `base` vertices are handled directly.
    fn q_independent(&mut self, w: &FixedBitSet, s: u32, q: u32, base: usize) -> Result<FixedBitSet> {
        let g = self.g;
        let n = w.count_ones(..);
        if n == 0 || s <= q {
            return Ok(w.clone());
        }
        let kq = pow2(q)?;
        if find_clique_in(g, w, kq).is_none() {
            return Ok(w.clone());
        }
        if n <= base {
            return Ok(g.set_of(&w.ones().take(kq - 1).collect::<Vec<_>>()));
        }
        let alpha = self.params.c_prime * ((s + 1 - q) as f64 / lg(n)).powi(2);
        if g.edges_within(w) as f64 >= alpha * (n * n) as f64 {
            match self.multipartite(w, alpha, s - 1) {
                Ok(cover) => {
                    let p = cover.parts.len().trailing_zeros();
                    let k = pow2(s - p)?;
                    let mut cliques = Vec::new();
                    for part in &cover.parts {
                        let set = g.set_of(part);
                        match find_clique_in(g, &set, k) {
                            None if s - p <= q => return Ok(set),
                            None => return self.q_independent(&set, s - p, q, base),
                            Some(c) => cliques.push(c),
                        }
                    }
                    let mut clique = cliques.concat();
                    clique.sort_unstable();
                    return Err(Error::PreconditionViolated { clique });
                }
                Err(Error::NoCoverFound(_)) => self.cover_fallbacks += 1,
                Err(e) => return Err(e),
            }
        }
        let mut out = match self.split(w)? {
            None => self.empty(),
            Some((left, right)) => {
                let mut out = self.q_independent(&left, s, q, base)?;
                out.union_with(&self.q_independent(&right, s, q, base)?);
                out
            }
        };
        if out.is_clear() {
            out = g.set_of(&w.ones().take(kq - 1).collect::<Vec<_>>());
        }
        Ok(out)
    }

    /// Adds vertices of `within`, smallest first, while `set` stays free of
    /// `k`-cliques.
    fn maximalize(&self, set: &mut FixedBitSet, within: &FixedBitSet, k: usize) {
        if !self.params.maximalize {
            return;
        }
        for v in within.ones() {
            if set.contains(v) {
                continue;
            }
            let mut nb = self.g.neighbors(v).clone();
            nb.intersect_with(set);
            let blocked = if k == 2 { !nb.is_clear() } else { find_clique_in(self.g, &nb, k - 1).is_some() };
            if !blocked {
                set.insert(v);
            }
        }
    }
}

fn complement_components(g: &IntersectionGraph, work: &FixedBitSet) -> Vec<Vec<usize>> {
    let mut unseen = work.clone();
    let mut comps = Vec::new();
    while let Some(start) = unseen.minimum() {
        unseen.set(start, false);
        let mut comp = vec![start];
        let mut i = 0;
        while i < comp.len() {
            let mut fresh = unseen.clone();
            fresh.difference_with(g.neighbors(comp[i]));
            unseen.difference_with(&fresh);
            comp.extend(fresh.ones());
            i += 1;
        }
        comp.sort_unstable();
        comps.push(comp);
    }
    comps
}

/// Longest-first packing of components into `t` groups.
fn pack_groups(comps: &[Vec<usize>], t: usize) -> Vec<Vec<usize>> {
    let mut order: Vec<&Vec<usize>> = comps.iter().collect();
    order.sort_by_key(|c| (std::cmp::Reverse(c.len()), c[0]));
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); t];
    for c in order {
        let i = (0..t).min_by_key(|&i| (groups[i].len(), i)).unwrap();
        groups[i].extend(c);
    }
    for gr in &mut groups {
        gr.sort_unstable();
    }
    groups
}

pub fn neighborhood_cover_subgraph(g: &IntersectionGraph, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    if g.vertex_count() == 0 {
        return Err(Error::DegenerateGraph("neighbourhood cover needs at least one vertex".into()));
    }
    let ex = Extractor::new(g, params)?;
    let groups = ex.cover(&g.full_set())?;
    finish(g, ExtractionWitness::NeighborhoodCover { groups })
}

fn finish(g: &IntersectionGraph, w: ExtractionWitness) -> Result<ExtractionWitness> {
    w.validate(g).map_err(Error::InternalBoundViolation)?;
    Ok(w)
}

/// `K_{r-1}`-free induced subgraph of a `K_r`-free graph, `r >= 3`.
pub fn kr1_free_subgraph(g: &IntersectionGraph, r: usize, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    if r < 3 {
        return Err(Error::InvalidParameter(format!("r must be at least 3, got {r}")));
    }
    if g.vertex_count() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let ex = Extractor::new(g, params)?;
    let full = g.full_set();
    ex.precheck_free(&full, r)?;
    let groups = ex.cover(&full)?;
    for gr in &groups {
        if let Some(mut clique) = find_clique_in(g, &g.set_of(&gr.members), r - 1) {
            clique.extend(gr.apex);
            clique.sort_unstable();
            return Err(Error::PreconditionViolated { clique });
        }
    }
    let mut set = g.set_of(&groups.iter().flat_map(|gr| gr.members.clone()).collect::<Vec<_>>());
    ex.maximalize(&mut set, &full, r - 1);
    finish(g, ExtractionWitness::KpFree { vertices: to_vec(&set), p: r - 1 })
}

/// Largest `n` for which [`find_balanced_biclique`] searches exhaustively.
pub const BICLIQUE_EXACT_LIMIT: usize = 20;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BicliqueMode {
    /// Exact up to [`BICLIQUE_EXACT_LIMIT`] vertices, greedy above.
    #[default]
    Auto,
    Exact,
    Greedy,
}

/// Disjoint `A`, `B` of equal size at least `t_min` with `A` complete to `B`.
/// Exact mode returns a maximum one. `None` from the greedy search does not
/// rule a biclique out.
pub fn find_balanced_biclique(
    g: &IntersectionGraph,
    t_min: usize,
    mode: BicliqueMode,
) -> Result<Option<(Vec<usize>, Vec<usize>)>> {
    if t_min == 0 {
        return Err(Error::InvalidParameter("t_min must be at least 1".into()));
    }
    let n = g.vertex_count();
    let exact = match mode {
        BicliqueMode::Exact if n > BICLIQUE_EXACT_LIMIT => {
            return Err(Error::TooLarge { what: "exact biclique search", n, cap: BICLIQUE_EXACT_LIMIT })
        }
        BicliqueMode::Exact => true,
        BicliqueMode::Greedy => false,
        BicliqueMode::Auto => n <= BICLIQUE_EXACT_LIMIT,
    };
    Ok(biclique_within(g, &g.full_set(), t_min, exact))
}

fn biclique_within(g: &IntersectionGraph, set: &FixedBitSet, t_min: usize, exact: bool) -> Option<(Vec<usize>, Vec<usize>)> {
    let (a, common) = if exact { exact_biclique(g, set) } else { greedy_biclique(g, set) };
    let t = a.len().min(common.len());
    (t >= t_min.max(1)).then(|| (a[..t].to_vec(), common[..t].to_vec()))
}

/// Best `(A, common neighbourhood of A)` by `min(|A|, |N(A)|)`, first found
/// in lexicographic order of `A`.
fn exact_biclique(g: &IntersectionGraph, set: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    fn dfs(
        g: &IntersectionGraph,
        verts: &[usize],
        from: usize,
        a: &mut Vec<usize>,
        common: &FixedBitSet,
        best: &mut (usize, Vec<usize>, Vec<usize>),
    ) {
        for i in from..verts.len() {
            let v = verts[i];
            let mut next = common.clone();
            next.intersect_with(g.neighbors(v));
            let size = next.count_ones(..);
            if size <= best.0 {
                continue;
            }
            a.push(v);
            if a.len().min(size) > best.0 {
                *best = (a.len().min(size), a.clone(), to_vec(&next));
            }
            if a.len() + verts.len() - i - 1 > best.0 {
                dfs(g, verts, i + 1, a, &next, best);
            }
            a.pop();
        }
    }
    let verts = to_vec(set);
    let mut best = (0, Vec::new(), Vec::new());
    dfs(g, &verts, 0, &mut Vec::new(), set, &mut best);
    (best.1, best.2)
}

/// Alternating completion from the 64 edges of largest degree sum.
fn greedy_biclique(g: &IntersectionGraph, set: &FixedBitSet) -> (Vec<usize>, Vec<usize>) {
    let mut seeds: Vec<(usize, usize)> =
        set.ones().flat_map(|u| g.neighbors(u).intersection(set).filter(move |&v| u < v).map(move |v| (u, v))).collect();
    seeds.sort_by_key(|&(u, v)| (std::cmp::Reverse(g.degree_within(u, set) + g.degree_within(v, set)), u, v));
    let mut best: (Vec<usize>, Vec<usize>) = (Vec::new(), Vec::new());
    for &(u, v) in seeds.iter().take(64) {
        let (mut a, mut b) = (vec![u], vec![v]);
        let mut for_b = g.neighbors(u).clone();
        for_b.intersect_with(set);
        let mut for_a = g.neighbors(v).clone();
        for_a.intersect_with(set);
        for_a.set(u, false);
        for_b.set(v, false);
        loop {
            let pick = |cand: &FixedBitSet, other: &FixedBitSet| {
                cand.ones().max_by_key(|&x| (g.neighbors(x).intersection_count(other), std::cmp::Reverse(x)))
            };
            let Some(x) = pick(&for_a, &for_b) else { break };
            a.push(x);
            for_a.set(x, false);
            for_b.set(x, false);
            for_b.intersect_with(g.neighbors(x));
            let Some(y) = pick(&for_b, &for_a) else { break };
            b.push(y);
            for_a.set(y, false);
            for_b.set(y, false);
            for_a.intersect_with(g.neighbors(y));
        }
        if a.len().min(b.len()) > best.0.len().min(best.1.len()) {
            a.sort_unstable();
            b.sort_unstable();
            best = (a, b);
        }
    }
    best
}

/// `K_{ceil(r/2)}`-free induced subgraph of a `K_r`-free graph, `r >= 3`.
pub fn half_clique_free_subgraph(g: &IntersectionGraph, r: usize, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    if r < 3 {
        return Err(Error::InvalidParameter(format!("r must be at least 3, got {r}")));
    }
    if g.vertex_count() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let ex = Extractor::new(g, params)?;
    let full = g.full_set();
    ex.precheck_free(&full, r)?;
    let h = r.div_ceil(2);
    let mut set = ex.half_free(&full, h)?;
    ex.maximalize(&mut set, &full, h);
    finish(g, ExtractionWitness::KpFree { vertices: to_vec(&set), p: h })
}

/// A vertex subset whose average degree stays within a `1 - epsilon` factor
/// of the whole graph's while its size is at most `C_refine(epsilon)` times
/// that degree.
pub fn dense_core(g: &IntersectionGraph, epsilon: f64, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    check_exponent("epsilon", epsilon)?;
    params.validate()?;
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let c_refine = params.c_refine(epsilon);
    if g.edge_count() == 0 {
        return finish(g, ExtractionWitness::DenseCore { vertices: vec![0], epsilon, c_refine });
    }
    let mut current = g.full_set();
    loop {
        let size = current.count_ones(..);
        let degree = 2.0 * g.edges_within(&current) as f64 / size as f64;
        if degree >= size as f64 / c_refine {
            break;
        }
        let part = separate_within(g, &current, params.strategy)?;
        let side = |half: &[usize]| {
            let mut s = g.set_of(half);
            s.union_with(&g.set_of(&part.separator));
            let k = s.count_ones(..);
            let d = if k == 0 { 0.0 } else { 2.0 * g.edges_within(&s) as f64 / k as f64 };
            (s, d)
        };
        let (u1, d1) = side(&part.left);
        let (u2, d2) = side(&part.right);
        let next = if d2 > d1 { u2 } else { u1 };
        if next.count_ones(..) >= size || next.is_clear() {
            break;
        }
        current = next;
    }
    let w = ExtractionWitness::DenseCore { vertices: to_vec(&current), epsilon, c_refine };
    w.validate(g).map_err(Error::RefinementFailed)?;
    Ok(w)
}

/// Complete multipartite cover of a graph with at least `alpha * n^2` edges.
pub fn multipartite_cover(g: &IntersectionGraph, alpha: f64, params: &AlgorithmParams) -> Result<MultipartiteCover> {
    if !(alpha.is_finite() && alpha >= 0.0) {
        return Err(Error::InvalidParameter(format!("alpha must be non-negative, got {alpha}")));
    }
    let ex = Extractor::new(g, params)?;
    let n = g.vertex_count();
    // Relative slack so that alpha = m / n^2 computed in floating point is accepted.
    if (g.edge_count() as f64) < alpha * (n * n) as f64 * (1.0 - 1e-12) || g.edge_count() == 0 {
        return Err(Error::NoCoverFound(format!("{} edges is below alpha * n^2", g.edge_count())));
    }
    ex.multipartite(&g.full_set(), alpha, u32::MAX)
}

/// `max(1, floor(n (c s / log n)^(2s - 2)))`.
pub fn independent_set_floor(n: usize, s: u32, c: f64) -> usize {
    let f = n as f64 * (c * s as f64 / lg(n)).powi(2 * s as i32 - 2);
    (f.floor() as usize).max(1)
}

/// Independent set of a `K_{2^s}`-free graph.
pub fn independent_set(g: &IntersectionGraph, s: u32, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    if s == 0 {
        return Err(Error::InvalidParameter("s must be at least 1".into()));
    }
    if g.vertex_count() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let mut ex = Extractor::new(g, params)?;
    let full = g.full_set();
    ex.precheck_free(&full, pow2(s)?)?;
    let mut set = ex.q_independent(&full, s, 1, 10)?;
    if s == 1 && !g.is_independent(&to_vec(&set)) {
        return Err(Error::PreconditionViolated { clique: find_clique(g, 2).unwrap_or_default() });
    }
    ex.maximalize(&mut set, &full, 2);
    finish(g, ExtractionWitness::Independent { vertices: to_vec(&set), cover_fallbacks: ex.cover_fallbacks })
}

/// `2^q`-independent set (no `2^q`-clique) of a `K_{2^s}`-free graph.
pub fn q_independent_set(g: &IntersectionGraph, s: u32, q: u32, params: &AlgorithmParams) -> Result<ExtractionWitness> {
    if q == 0 || s < q {
        return Err(Error::InvalidParameter(format!("need s >= q >= 1, got s = {s}, q = {q}")));
    }
    if g.vertex_count() == 0 {
        return Err(Error::DegenerateGraph("empty graph".into()));
    }
    let mut ex = Extractor::new(g, params)?;
    let full = g.full_set();
    let (ks, kq) = (pow2(s)?, pow2(q)?);
    ex.precheck_free(&full, ks)?;
    let mut set = ex.q_independent(&full, s, q, ks)?;
    if let Some(clique) = find_clique_in(g, &set, kq) {
        // Only reachable when s = q and the input was not K_{2^s}-free after all.
        return Err(Error::PreconditionViolated { clique });
    }
    ex.maximalize(&mut set, &full, kq);
    finish(g, ExtractionWitness::QIndependent { vertices: to_vec(&set), clique_bound: kq, cover_fallbacks: ex.cover_fallbacks })
}

/// Result of [`color_or_clique`]: the witness (a colouring or a clique)
/// with the exponent used and both thresholds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Dichotomy {
    pub witness: ExtractionWitness,
    pub delta: f64,
    pub s: u32,
    /// `n^epsilon`.
    pub max_colors: f64,
    /// `n^delta`.
    pub min_clique: f64,
}

impl Dichotomy {
    pub fn validate(&self, g: &IntersectionGraph) -> std::result::Result<(), String> {
        self.witness.validate(g)?;
        match &self.witness {
            ExtractionWitness::Coloring(c) if c.class_count() as f64 <= self.max_colors => Ok(()),
            ExtractionWitness::Clique { vertices } if vertices.len() as f64 >= self.min_clique => Ok(()),
            ExtractionWitness::Coloring(c) => Err(format!("{} colours exceed {}", c.class_count(), self.max_colors)),
            ExtractionWitness::Clique { vertices } => {
                Err(format!("clique of size {} is below {}", vertices.len(), self.min_clique))
            }
            other => Err(format!("unexpected witness kind {}", other.kind())),
        }
    }
}

/// Largest `delta` (to 1e-12) with `2 delta log(1 / (c delta)) < epsilon / 2`,
/// additionally below `1 / log n` when `log n >= n^(epsilon / 2)`.
pub fn choose_delta(n: usize, epsilon: f64, c: f64) -> f64 {
    let f = |d: f64| 2.0 * d * (1.0 / (c * d)).log2();
    // f increases up to 1 / (c e); stay on that branch and below 1.
    let (mut lo, mut hi) = (0.0f64, (1.0 / (c * std::f64::consts::E)).min(1.0));
    if f(hi) < epsilon / 2.0 {
        lo = hi;
    } else {
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            if f(mid) < epsilon / 2.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
    }
    let log_n = lg(n);
    if log_n >= (n.max(1) as f64).powf(epsilon / 2.0) {
        lo = lo.min(next_below(1.0 / log_n));
    }
    lo
}

fn next_below(x: f64) -> f64 {
    f64::from_bits(x.to_bits() - 1)
}

/// Either a proper colouring with at most `n^epsilon` classes or a clique
/// of at least `n^delta` vertices.
pub fn color_or_clique(g: &IntersectionGraph, epsilon: f64, params: &AlgorithmParams) -> Result<Dichotomy> {
    check_exponent("epsilon", epsilon)?;
    let mut ex = Extractor::new(g, params)?;
    let n = g.vertex_count();
    let delta = params.delta.unwrap_or_else(|| choose_delta(n, epsilon, params.c));
    let s = ((delta * lg(n)).ceil() as u32).max(1);
    let ks = pow2(s)?;
    let max_colors = (n as f64).powf(epsilon);
    let min_clique = (n as f64).powf(delta);
    let outcome = greedy_color(g, |rest| {
        let set = g.set_of(rest);
        if let Some(clique) = find_clique_in(g, &set, ks) {
            return Err(Error::PreconditionViolated { clique });
        }
        let mut found = ex.q_independent(&set, s, 1, 10)?;
        ex.maximalize(&mut found, &set, 2);
        Ok(to_vec(&found))
    });
    let found = match outcome {
        Ok(coloring) if coloring.class_count() as f64 <= max_colors => {
            let result = Dichotomy { witness: ExtractionWitness::Coloring(coloring), delta, s, max_colors, min_clique };
            result.validate(g).map_err(Error::InternalBoundViolation)?;
            return Ok(result);
        }
        Ok(_) => None,
        Err(Error::PreconditionViolated { clique }) => Some(clique),
        Err(e) => return Err(e),
    };
    let clique = match found {
        Some(clique) if clique.len() as f64 >= min_clique => clique,
        _ => find_clique(g, min_clique.ceil() as usize).ok_or_else(|| {
            Error::InternalBoundViolation(format!(
                "no colouring with at most {max_colors} classes and no clique of size {min_clique}"
            ))
        })?,
    };
    let vertices = extend_clique(g, clique);
    let result = Dichotomy { witness: ExtractionWitness::Clique { vertices }, delta, s, max_colors, min_clique };
    result.validate(g).map_err(Error::InternalBoundViolation)?;
    Ok(result)
}

/// Grows a clique by adding common neighbours, smallest first.
fn extend_clique(g: &IntersectionGraph, mut clique: Vec<usize>) -> Vec<usize> {
    let mut common = g.full_set();
    for &v in &clique {
        common.intersect_with(g.neighbors(v));
    }
    while let Some(v) = common.minimum() {
        clique.push(v);
        common.intersect_with(g.neighbors(v));
    }
    clique.sort_unstable();
    clique
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::*;

    fn params() -> AlgorithmParams {
        AlgorithmParams::default()
    }

    #[test]
    fn c_refine_defaults() {
        let p = params();
        assert_eq!(p.c_refine(0.5), 576.0);
        assert!(p.c_refine(0.01) > 576.0);
        assert!(AlgorithmParams { c: 0.0, ..params() }.validate().is_err());
        assert!(AlgorithmParams { epsilon: 1.0, ..params() }.validate().is_err());
    }

    #[test]
    fn neighborhood_cover_examples() {
        let w = neighborhood_cover_subgraph(&star(5), &params()).unwrap();
        assert_eq!(
            w,
            ExtractionWitness::NeighborhoodCover { groups: vec![CoverGroup { apex: Some(0), members: vec![1, 2, 3, 4, 5] }] }
        );
        let w = neighborhood_cover_subgraph(&IntersectionGraph::empty(4), &params()).unwrap();
        assert_eq!(w.vertices(), vec![0, 1, 2, 3]);
        let g = path(8);
        let w = neighborhood_cover_subgraph(&g, &params()).unwrap();
        w.validate(&g).unwrap();
        assert!(!w.vertices().is_empty());
    }

    #[test]
    fn cover_validator_rejects_missing_apex() {
        let g = path(3);
        let bad = ExtractionWitness::NeighborhoodCover { groups: vec![CoverGroup { apex: None, members: vec![0, 1] }] };
        assert!(bad.validate(&g).is_err());
        let bad = ExtractionWitness::NeighborhoodCover { groups: vec![CoverGroup { apex: Some(2), members: vec![0, 1] }] };
        assert!(bad.validate(&g).is_err());
        let ok = ExtractionWitness::NeighborhoodCover { groups: vec![CoverGroup { apex: Some(1), members: vec![0, 2] }] };
        ok.validate(&g).unwrap();
    }

    #[test]
    fn kr1_free_examples() {
        let g = cycle(5);
        let w = kr1_free_subgraph(&g, 3, &params()).unwrap();
        assert!(g.is_independent(&w.vertices()));
        let g = complete(3);
        let w = kr1_free_subgraph(&g, 4, &params()).unwrap();
        assert!(find_clique_in(&g, &g.set_of(&w.vertices()), 3).is_none());
        assert!(matches!(kr1_free_subgraph(&complete(4), 4, &params()), Err(Error::PreconditionViolated { .. })));
        assert!(kr1_free_subgraph(&g, 2, &params()).is_err());
    }

    #[test]
    fn biclique_examples() {
        let (a, b) = find_balanced_biclique(&complete_bipartite(3, 3), 3, BicliqueMode::Auto).unwrap().unwrap();
        assert_eq!((a, b), (vec![0, 1, 2], vec![3, 4, 5]));
        assert_eq!(find_balanced_biclique(&IntersectionGraph::empty(5), 1, BicliqueMode::Auto).unwrap(), None);
        let (a, b) = find_balanced_biclique(&complete_bipartite(3, 3), 1, BicliqueMode::Greedy).unwrap().unwrap();
        assert_eq!(a.len(), 3);
        assert_eq!(b.len(), 3);
        assert!(find_balanced_biclique(&complete(3), 0, BicliqueMode::Auto).is_err());
    }

    #[test]
    fn half_clique_free_examples() {
        let g = complete_bipartite(3, 3);
        let w = half_clique_free_subgraph(&g, 4, &params()).unwrap();
        assert!(g.is_independent(&w.vertices()));
        assert_eq!(w.vertices().len(), 3);
        let g = IntersectionGraph::empty(6);
        assert_eq!(half_clique_free_subgraph(&g, 5, &params()).unwrap().vertices(), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn dense_core_examples() {
        let g = complete(7);
        let w = dense_core(&g, 0.5, &params()).unwrap();
        assert_eq!(w.vertices(), (0..7).collect::<Vec<_>>());
        let w = dense_core(&IntersectionGraph::empty(5), 0.5, &params()).unwrap();
        assert_eq!(w.vertices(), vec![0]);
    }

    #[test]
    fn dense_core_finds_a_clique_side() {
        // Two K10s joined through a 30-vertex path.
        let mut edges = Vec::new();
        for base in [0, 10] {
            for u in base..base + 10 {
                for v in u + 1..base + 10 {
                    edges.push((u, v));
                }
            }
        }
        for v in 20..49 {
            edges.push((v, v + 1));
        }
        edges.push((9, 20));
        edges.push((49, 10));
        let g = IntersectionGraph::from_edges(50, &edges).unwrap();
        let p = AlgorithmParams { c1: 0.1, ..params() };
        let w = dense_core(&g, 0.5, &p).unwrap();
        w.validate(&g).unwrap();
        let core = w.vertices();
        let d = 2.0 * g.edge_count() as f64 / 50.0;
        let inner = 2.0 * g.edges_within(&g.set_of(&core)) as f64 / core.len() as f64;
        assert!(inner >= 0.5 * d);
        let holds = |lo: usize| (lo..lo + 10).all(|v| core.contains(&v));
        let touches = |lo: usize| (lo..lo + 10).any(|v| core.contains(&v));
        assert!((holds(0) && !touches(10)) || (holds(10) && !touches(0)), "{core:?}");
    }

    #[test]
    fn multipartite_examples() {
        let g = complete_multipartite(&[2, 2, 2]);
        let cover = multipartite_cover(&g, 0.1, &params()).unwrap();
        cover.validate(&g).unwrap();
        let g = complete(6);
        let cover = multipartite_cover(&g, 0.1, &params()).unwrap();
        assert_eq!(cover.parts, vec![vec![0, 2, 4], vec![1, 3, 5]]);
        assert!(matches!(multipartite_cover(&IntersectionGraph::empty(4), 0.1, &params()), Err(Error::NoCoverFound(_))));
    }

    #[test]
    fn independent_set_examples() {
        let g = IntersectionGraph::empty(7);
        let w = independent_set(&g, 1, &params()).unwrap();
        assert_eq!(w.vertices().len(), 7);
        let g = cycle(5);
        let w = independent_set(&g, 2, &params()).unwrap();
        assert!(!w.vertices().is_empty() && w.vertices().len() <= 2);
        let w = independent_set(&complete(3), 2, &params()).unwrap();
        assert_eq!(w.vertices().len(), 1);
        assert!(matches!(independent_set(&complete(4), 2, &params()), Err(Error::PreconditionViolated { .. })));
        assert!(matches!(independent_set(&path(2), 1, &params()), Err(Error::PreconditionViolated { .. })));
    }

    #[test]
    fn independent_set_on_larger_graphs() {
        for seed in 0..10 {
            let g = gnp(60, 0.3, seed);
            let w = independent_set(&g, 4, &params()).unwrap();
            assert!(g.is_independent(&w.vertices()));
            assert!(w.vertices().len() >= independent_set_floor(60, 4, 0.01));
        }
        let g = complete_multipartite(&[5, 5, 5, 5, 5, 5, 5, 5]);
        let w = independent_set(&g, 4, &params()).unwrap();
        assert_eq!(w.vertices().len(), 5);
    }

    #[test]
    fn q_independent_examples() {
        let g = complete(7);
        let w = q_independent_set(&g, 3, 3, &params()).unwrap();
        assert_eq!(w.vertices().len(), 7);
        let w = q_independent_set(&g, 3, 2, &params()).unwrap();
        assert_eq!(w.vertices().len(), 3);
        let w = q_independent_set(&cycle(5), 2, 1, &params()).unwrap();
        assert!(cycle(5).is_independent(&w.vertices()));
        assert!(q_independent_set(&g, 1, 2, &params()).is_err());
    }

    #[test]
    fn floor_formula() {
        assert_eq!(independent_set_floor(10, 1, 0.01), 10);
        assert_eq!(independent_set_floor(16, 2, 0.01), 1);
        assert_eq!(independent_set_floor(1 << 20, 2, 0.5), 2621);
    }

    #[test]
    fn delta_choice() {
        let d = choose_delta(1 << 30, 0.5, 0.01);
        assert!(2.0 * d * (1.0 / (0.01 * d)).log2() < 0.25);
        let bigger = d * 1.001;
        assert!(2.0 * bigger * (1.0 / (0.01 * bigger)).log2() >= 0.25);
        let small = choose_delta(100, 0.5, 0.01);
        assert!(small < 1.0 / 100f64.log2());
    }

    #[test]
    fn color_or_clique_examples() {
        let g = IntersectionGraph::empty(9);
        let r = color_or_clique(&g, 0.5, &params()).unwrap();
        assert!(matches!(&r.witness, ExtractionWitness::Coloring(c) if c.class_count() == 1));
        let g = complete(6);
        let r = color_or_clique(&g, 0.5, &params()).unwrap();
        assert_eq!(r.witness, ExtractionWitness::Clique { vertices: (0..6).collect() });
        let g = gnp(50, 0.1, 3);
        color_or_clique(&g, 0.8, &params()).unwrap().validate(&g).unwrap();
    }
}

//! Seeded instance generators. The output depends only on the spec.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{intersection_graph, Point, Polyline, StringFamily};
use crate::graph::IntersectionGraph;
use crate::quasiplanar::{crossing_graph, Drawing};

/// Random coordinates are drawn from a lattice this fine per unit of region.
const LATTICE: i64 = 10_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    RandomSegments,
    RandomPolylines { bends: usize },
    /// Straight-line drawing of `K_count` on a circle.
    ConvexChords,
    /// Plus shapes whose arms touch their grid neighbours.
    GridPaths,
    DisjointSegments,
    AllCrossingSegments,
}

/// Integer bounding box `[x0, x1] x [y0, y1]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Region {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
}

impl Default for Region {
    fn default() -> Self {
        Region { x0: 0, y0: 0, x1: 1, y1: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub count: usize,
    pub seed: u64,
    #[serde(default)]
    pub region: Region,
}

impl GeneratorSpec {
    pub fn new(kind: GeneratorKind, count: usize, seed: u64) -> Self {
        GeneratorSpec { kind, count, seed, region: Region::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.count == 0 {
            return Err(Error::BadSpec("count must be at least 1".into()));
        }
        let r = self.region;
        if r.x0 >= r.x1 || r.y0 >= r.y1 {
            return Err(Error::BadSpec("region must have positive width and height".into()));
        }
        if r.x0.abs().max(r.x1.abs()).max(r.y0.abs()).max(r.y1.abs()) > 1 << 40 {
            return Err(Error::BadSpec("region coordinates must stay below 2^40".into()));
        }
        if let GeneratorKind::RandomPolylines { bends } = self.kind {
            if bends > 1000 {
                return Err(Error::BadSpec("at most 1000 bends".into()));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    Family(StringFamily),
    Drawing(Drawing),
}

impl Instance {
    /// Intersection graph of a family, crossing graph of a drawing.
    pub fn graph(&self) -> Result<IntersectionGraph> {
        match self {
            Instance::Family(f) => intersection_graph(f),
            Instance::Drawing(d) => crossing_graph(d),
        }
    }
}

pub fn generate(spec: &GeneratorSpec) -> Result<Instance> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let r = spec.region;
    let (w, h) = (r.x1 - r.x0, r.y1 - r.y0);
    let lattice_point = |rng: &mut ChaCha8Rng| {
        let (i, j) = (rng.random_range(0..=LATTICE), rng.random_range(0..=LATTICE));
        Point::new(
            BigRational::from_integer(r.x0.into()) + BigRational::new(BigInt::from(i) * w, LATTICE.into()),
            BigRational::from_integer(r.y0.into()) + BigRational::new(BigInt::from(j) * h, LATTICE.into()),
        )
    };
    let n = spec.count;
    let rat = |num: i64, den: i64| BigRational::new(num.into(), den.into());
    let center = Point::new(rat(r.x0 + r.x1, 2), rat(r.y0 + r.y1, 2));
    let radius = rat(w.min(h), 2);
    let strings = match spec.kind {
        GeneratorKind::RandomSegments | GeneratorKind::RandomPolylines { .. } => {
            let len = match spec.kind {
                GeneratorKind::RandomPolylines { bends } => bends + 2,
                _ => 2,
            };
            (0..n)
                .map(|i| {
                    let mut pts: Vec<Point> = Vec::with_capacity(len);
                    while pts.len() < len {
                        let p = lattice_point(&mut rng);
                        if pts.last() != Some(&p) {
                            pts.push(p);
                        }
                    }
                    Polyline::new(format!("s{i}"), pts)
                })
                .collect::<Result<Vec<_>>>()?
        }
        GeneratorKind::ConvexChords => {
            let pts = convex_points(n, &center, &radius)?;
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
            return Ok(Instance::Drawing(Drawing::straight_line(pts, &pairs)?));
        }
        GeneratorKind::GridPaths => {
            let k = (n as f64).sqrt().ceil() as i64;
            // Cell pitch p; arms of length p/2 meet the neighbouring arms.
            let (px, py) = (rat(w, k), rat(h, k));
            let half = rat(1, 2);
            (0..n as i64)
                .map(|i| {
                    let cx = BigRational::from_integer(r.x0.into()) + &px * (BigRational::from_integer((i % k).into()) + &half);
                    let cy = BigRational::from_integer(r.y0.into()) + &py * (BigRational::from_integer((i / k).into()) + &half);
                    let (ax, ay) = (&px * &half, &py * &half);
                    let pts = vec![
                        Point::new(&cx - &ax, cy.clone()),
                        Point::new(&cx + &ax, cy.clone()),
                        Point::new(cx.clone(), cy.clone()),
                        Point::new(cx.clone(), &cy + &ay),
                        Point::new(cx.clone(), &cy - &ay),
                    ];
                    Polyline::new(format!("s{i}"), pts)
                })
                .collect::<Result<Vec<_>>>()?
        }
        GeneratorKind::DisjointSegments => (0..n as i64)
            .map(|i| {
                let y = BigRational::from_integer(r.y0.into()) + rat(h * (i + 1), n as i64 + 1);
                Polyline::new(
                    format!("s{i}"),
                    vec![
                        Point::new(BigRational::from_integer(r.x0.into()), y.clone()),
                        Point::new(BigRational::from_integer(r.x1.into()), y),
                    ],
                )
            })
            .collect::<Result<Vec<_>>>()?,
        GeneratorKind::AllCrossingSegments => {
            // Chords i -> i + n among 2n points in circular order all interleave.
            let ts: Vec<BigRational> = (0..2 * n)
                .map(|k| {
                    let base = circle_parameter(k, 2 * n);
                    let jitter = rng.random_range(-100i64..=100);
                    base + rat(jitter, 1_000_000_000)
                })
                .collect();
            let pts: Vec<Point> = ts.iter().map(|t| circle_point(t, &center, &radius)).collect();
            (0..n)
                .map(|i| Polyline::new(format!("s{i}"), vec![pts[i].clone(), pts[i + n].clone()]))
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(Instance::Family(StringFamily::new(strings)?))
}

/// Parameter `t = tan(theta / 2)` of the `k`-th of `n` evenly spread angles,
/// rounded to four decimals. Increasing in `k`.
fn circle_parameter(k: usize, n: usize) -> BigRational {
    let theta = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * (k as f64 + 0.5) / n as f64;
    let t = (theta / 2.0).tan();
    BigRational::new(BigInt::from((t * 10_000.0).round() as i64), BigInt::from(10_000))
}

/// The rational point `((1 - t^2) / (1 + t^2), 2t / (1 + t^2))` scaled and shifted.
fn circle_point(t: &BigRational, center: &Point, radius: &BigRational) -> Point {
    let one = BigRational::one();
    let t2 = t * t;
    let den = &one + &t2;
    let x = (&one - &t2) / &den;
    let y = (BigRational::from_integer(2.into()) * t) / &den;
    Point::new(&center.x + radius * x, &center.y + radius * y)
}

/// `n` distinct rational points in convex position on a circle, in angular order.
pub fn convex_points(n: usize, center: &Point, radius: &BigRational) -> Result<Vec<Point>> {
    let ts: Vec<BigRational> = (0..n).map(|k| circle_parameter(k, n)).collect();
    if ts.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::BadSpec(format!("{n} points are too many to place on the circle")));
    }
    Ok(ts.iter().map(|t| circle_point(t, center, radius)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::named::complete;

    #[test]
    fn disjoint_and_crossing_families() {
        let g = generate(&GeneratorSpec::new(GeneratorKind::DisjointSegments, 5, 0)).unwrap().graph().unwrap();
        assert_eq!((g.vertex_count(), g.edge_count()), (5, 0));
        for seed in 0..20 {
            let g = generate(&GeneratorSpec::new(GeneratorKind::AllCrossingSegments, 4, seed)).unwrap().graph().unwrap();
            assert_eq!(g.edges().collect::<Vec<_>>(), complete(4).edges().collect::<Vec<_>>());
        }
    }

    #[test]
    fn convex_chords_is_a_drawing_of_kn() {
        let Instance::Drawing(d) = generate(&GeneratorSpec::new(GeneratorKind::ConvexChords, 5, 0)).unwrap() else {
            panic!("expected a drawing");
        };
        assert_eq!(d.vertices().len(), 5);
        assert_eq!(d.edges().len(), 10);
        let origin = Point::from_ints(0, 0);
        for p in convex_points(7, &origin, &BigRational::one()).unwrap() {
            assert_eq!(p.dist2(&origin), BigRational::one());
        }
    }

    #[test]
    fn grid_paths_form_a_grid_graph() {
        let g = generate(&GeneratorSpec::new(GeneratorKind::GridPaths, 9, 0)).unwrap().graph().unwrap();
        assert_eq!(g.edge_count(), 12);
        assert!(g.has_edge(0, 1) && g.has_edge(0, 3) && !g.has_edge(0, 4));
    }

    #[test]
    fn random_kinds_are_deterministic() {
        for kind in [GeneratorKind::RandomSegments, GeneratorKind::RandomPolylines { bends: 3 }] {
            let spec = GeneratorSpec { kind, count: 12, seed: 7, region: Region { x0: -5, y0: 0, x1: 5, y1: 3 } };
            let a = generate(&spec).unwrap();
            assert_eq!(a, generate(&spec).unwrap());
            let Instance::Family(f) = a else { panic!() };
            for s in f.strings() {
                for p in s.points() {
                    assert!(p.x >= BigRational::from_integer((-5).into()) && p.y <= BigRational::from_integer(3.into()));
                }
            }
        }
    }

    #[test]
    fn bad_specs() {
        assert!(matches!(generate(&GeneratorSpec::new(GeneratorKind::RandomSegments, 0, 0)), Err(Error::BadSpec(_))));
        let spec = GeneratorSpec { region: Region { x0: 1, y0: 0, x1: 1, y1: 1 }, ..GeneratorSpec::new(GeneratorKind::GridPaths, 3, 0) };
        assert!(generate(&spec).is_err());
    }
}

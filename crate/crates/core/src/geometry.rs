//! Planar polylines with exact rational coordinates and the intersection
//! graph of a family of them.
//!
//! Every predicate is evaluated exactly. Coordinates are [`BigRational`]s;
//! [`intersection_graph`] rescales a whole family onto a common integer
//! lattice first, so that the all-pairs test runs on `i64` coordinates with
//! `i128` orientation determinants whenever the lattice fits, on [`BigInt`]
//! when it does not, and on unreduced fractions when the denominators are
//! so unrelated that the common scale itself explodes.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::graph::IntersectionGraph;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Point {
    pub x: BigRational,
    pub y: BigRational,
}

impl Point {
    pub fn new(x: BigRational, y: BigRational) -> Self {
        Point { x, y }
    }

    pub fn from_ints(x: i64, y: i64) -> Self {
        Point { x: BigRational::from_integer(x.into()), y: BigRational::from_integer(y.into()) }
    }

    /// Exact conversion of two doubles. Every finite double is a dyadic
    /// rational, so nothing is rounded here.
    pub fn from_f64(x: f64, y: f64) -> Result<Self> {
        let conv = |v: f64| BigRational::from_float(v).ok_or(Error::NonFinite);
        Ok(Point { x: conv(x)?, y: conv(y)? })
    }

    pub fn translated(&self, dx: &BigRational, dy: &BigRational) -> Point {
        Point { x: &self.x + dx, y: &self.y + dy }
    }

    pub fn dist2(&self, other: &Point) -> BigRational {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (self.x.to_f64().unwrap_or(f64::NAN), self.y.to_f64().unwrap_or(f64::NAN))
    }
}

/// An open curve given by its vertices. Self-intersections are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polyline {
    id: String,
    points: Vec<Point>,
}

impl Polyline {
    pub fn new(id: impl Into<String>, points: Vec<Point>) -> Result<Self> {
        let id = id.into();
        if points.len() < 2 {
            return Err(Error::InvalidPolyline { id, reason: "needs at least two points".into() });
        }
        if let Some(i) = points.windows(2).position(|w| w[0] == w[1]) {
            return Err(Error::InvalidPolyline {
                id,
                reason: format!("points {} and {} coincide", i, i + 1),
            });
        }
        Ok(Polyline { id, points })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn segments(&self) -> impl Iterator<Item = (&Point, &Point)> {
        self.points.windows(2).map(|w| (&w[0], &w[1]))
    }

    pub fn translated(&self, dx: &BigRational, dy: &BigRational) -> Polyline {
        Polyline { id: self.id.clone(), points: self.points.iter().map(|p| p.translated(dx, dy)).collect() }
    }
}

/// An ordered family of strings with unique ids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StringFamily {
    strings: Vec<Polyline>,
}

impl StringFamily {
    pub fn new(strings: Vec<Polyline>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(strings.len());
        for s in &strings {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::DuplicateId(s.id.clone()));
            }
        }
        Ok(StringFamily { strings })
    }

    pub fn strings(&self) -> &[Polyline] {
        &self.strings
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    pub fn translated(&self, dx: &BigRational, dy: &BigRational) -> StringFamily {
        StringFamily { strings: self.strings.iter().map(|s| s.translated(dx, dy)).collect() }
    }
}

/// Coordinates that support an exact orientation test.
trait ExactCoord: Ord + Clone {
    /// Sign of the cross product `(b - a) x (c - a)`.
    fn orient(a: &[Self; 2], b: &[Self; 2], c: &[Self; 2]) -> Ordering;
}

impl ExactCoord for i64 {
    fn orient(a: &[i64; 2], b: &[i64; 2], c: &[i64; 2]) -> Ordering {
        // Lattice coordinates are bounded by 2^62, so every difference fits
        // in 63 bits and the determinant in 127.
        let bx = b[0] as i128 - a[0] as i128;
        let by = b[1] as i128 - a[1] as i128;
        let cx = c[0] as i128 - a[0] as i128;
        let cy = c[1] as i128 - a[1] as i128;
        (bx * cy).cmp(&(by * cx))
    }
}

impl ExactCoord for BigInt {
    fn orient(a: &[BigInt; 2], b: &[BigInt; 2], c: &[BigInt; 2]) -> Ordering {
        let lhs = (&b[0] - &a[0]) * (&c[1] - &a[1]);
        let rhs = (&b[1] - &a[1]) * (&c[0] - &a[0]);
        lhs.cmp(&rhs)
    }
}

impl ExactCoord for BigRational {
    fn orient(a: &[BigRational; 2], b: &[BigRational; 2], c: &[BigRational; 2]) -> Ordering {
        let lhs = (&b[0] - &a[0]) * (&c[1] - &a[1]);
        let rhs = (&b[1] - &a[1]) * (&c[0] - &a[0]);
        lhs.cmp(&rhs)
    }
}

/// Unreduced fraction with a positive denominator. Skipping the gcd makes
/// orientation tests on unrelated denominators far cheaper than `BigRational`.
#[derive(Clone, Debug)]
struct Frac {
    num: BigInt,
    den: BigInt,
}

impl Frac {
    fn of(v: &BigRational) -> Frac {
        Frac { num: v.numer().clone(), den: v.denom().clone() }
    }

    fn sub(&self, o: &Frac) -> Frac {
        Frac { num: &self.num * &o.den - &o.num * &self.den, den: &self.den * &o.den }
    }

    fn mul(&self, o: &Frac) -> Frac {
        Frac { num: &self.num * &o.num, den: &self.den * &o.den }
    }
}

impl Ord for Frac {
    fn cmp(&self, o: &Frac) -> Ordering {
        (&self.num * &o.den).cmp(&(&o.num * &self.den))
    }
}

impl PartialOrd for Frac {
    fn partial_cmp(&self, o: &Frac) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

impl PartialEq for Frac {
    fn eq(&self, o: &Frac) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}

impl Eq for Frac {}

impl ExactCoord for Frac {
    fn orient(a: &[Frac; 2], b: &[Frac; 2], c: &[Frac; 2]) -> Ordering {
        let lhs = b[0].sub(&a[0]).mul(&c[1].sub(&a[1]));
        let rhs = b[1].sub(&a[1]).mul(&c[0].sub(&a[0]));
        lhs.cmp(&rhs)
    }
}

/// `p` lies in the bounding box of `a`-`b` (used only when the three are collinear).
fn within_box<T: Ord>(a: &[T; 2], b: &[T; 2], p: &[T; 2]) -> bool {
    (0..2).all(|k| {
        let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
        lo <= &p[k] && &p[k] <= hi
    })
}

fn closed_segments_meet<T: ExactCoord>(a0: &[T; 2], a1: &[T; 2], b0: &[T; 2], b1: &[T; 2]) -> bool {
    use Ordering::*;
    let d1 = T::orient(b0, b1, a0);
    let d2 = T::orient(b0, b1, a1);
    let d3 = T::orient(a0, a1, b0);
    let d4 = T::orient(a0, a1, b1);
    let straddles = |x: Ordering, y: Ordering| matches!((x, y), (Less, Greater) | (Greater, Less));
    if straddles(d1, d2) && straddles(d3, d4) {
        return true;
    }
    (d1 == Equal && within_box(b0, b1, a0))
        || (d2 == Equal && within_box(b0, b1, a1))
        || (d3 == Equal && within_box(a0, a1, b0))
        || (d4 == Equal && within_box(a0, a1, b1))
}

fn rational_pair(p: &Point) -> [BigRational; 2] {
    [p.x.clone(), p.y.clone()]
}

/// True iff the closed segments `a0-a1` and `b0-b1` share a point.
/// Touching at an endpoint counts.
pub fn segments_intersect(a0: &Point, a1: &Point, b0: &Point, b1: &Point) -> bool {
    closed_segments_meet(&rational_pair(a0), &rational_pair(a1), &rational_pair(b0), &rational_pair(b1))
}

/// True iff some segment of `p` meets some segment of `q`.
pub fn polylines_intersect(p: &Polyline, q: &Polyline) -> bool {
    if !Bounds::of(p.points()).overlaps(&Bounds::of(q.points())) {
        return false;
    }
    p.segments().any(|(a0, a1)| q.segments().any(|(b0, b1)| segments_intersect(a0, a1, b0, b1)))
}

struct Bounds {
    min: [BigRational; 2],
    max: [BigRational; 2],
}

impl Bounds {
    fn of(points: &[Point]) -> Bounds {
        let mut min = rational_pair(&points[0]);
        let mut max = min.clone();
        for p in &points[1..] {
            for (k, v) in [&p.x, &p.y].into_iter().enumerate() {
                if *v < min[k] {
                    min[k] = v.clone();
                }
                if *v > max[k] {
                    max[k] = v.clone();
                }
            }
        }
        Bounds { min, max }
    }

    fn overlaps(&self, other: &Bounds) -> bool {
        (0..2).all(|k| self.min[k] <= other.max[k] && other.min[k] <= self.max[k])
    }
}

/// A family rescaled onto a common integer lattice.
struct Lattice<T> {
    curves: Vec<Vec<[T; 2]>>,
    boxes: Vec<([T; 2], [T; 2])>,
}

impl<T: ExactCoord> Lattice<T> {
    fn new(curves: Vec<Vec<[T; 2]>>) -> Self {
        let boxes = curves
            .iter()
            .map(|c| {
                let mut lo = c[0].clone();
                let mut hi = c[0].clone();
                for p in &c[1..] {
                    for k in 0..2 {
                        if p[k] < lo[k] {
                            lo[k] = p[k].clone();
                        }
                        if p[k] > hi[k] {
                            hi[k] = p[k].clone();
                        }
                    }
                }
                (lo, hi)
            })
            .collect();
        Lattice { curves, boxes }
    }

    fn boxes_overlap(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.boxes[i], &self.boxes[j]);
        (0..2).all(|k| a.0[k] <= b.1[k] && b.0[k] <= a.1[k])
    }

    fn curves_meet(&self, i: usize, j: usize) -> bool {
        if !self.boxes_overlap(i, j) {
            return false;
        }
        let (p, q) = (&self.curves[i], &self.curves[j]);
        p.windows(2).any(|a| q.windows(2).any(|b| closed_segments_meet(&a[0], &a[1], &b[0], &b[1])))
    }

    fn graph(&self, labels: Vec<String>) -> IntersectionGraph {
        let n = self.curves.len();
        let mut g = IntersectionGraph::with_labels(labels);
        for i in 0..n {
            for j in i + 1..n {
                if self.curves_meet(i, j) {
                    g.insert_edge(i, j);
                }
            }
        }
        g
    }
}

const LATTICE_LIMIT: u64 = 1 << 62;
const SCALE_BITS_LIMIT: u64 = 512;

/// Builds the string graph of `fam`: one vertex per string (labelled by its
/// id), an edge between two strings iff they share a point.
pub fn intersection_graph(fam: &StringFamily) -> Result<IntersectionGraph> {
    if fam.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let labels: Vec<String> = fam.strings.iter().map(|s| s.id.clone()).collect();

    let mut scale = BigInt::one();
    for s in &fam.strings {
        for p in &s.points {
            scale = scale.lcm(p.x.denom()).lcm(p.y.denom());
            if scale.bits() > SCALE_BITS_LIMIT {
                // Unrelated denominators: a common lattice would be huge, so
                // compare pairs with unreduced fractions instead.
                let curves = fam.strings.iter().map(|s| s.points.iter().map(|p| [Frac::of(&p.x), Frac::of(&p.y)]).collect()).collect();
                return Ok(Lattice::<Frac>::new(curves).graph(labels));
            }
        }
    }
    let to_lattice = |v: &BigRational| -> BigInt { v.numer() * (&scale / v.denom()) };
    let big: Vec<Vec<[BigInt; 2]>> = fam
        .strings
        .iter()
        .map(|s| s.points.iter().map(|p| [to_lattice(&p.x), to_lattice(&p.y)]).collect())
        .collect();

    let limit = BigInt::from(LATTICE_LIMIT);
    let fits = big.iter().flatten().flatten().all(|v| v.abs() < limit);
    if fits {
        let small = big
            .iter()
            .map(|c| c.iter().map(|p| [p[0].to_i64().unwrap(), p[1].to_i64().unwrap()]).collect())
            .collect();
        Ok(Lattice::<i64>::new(small).graph(labels))
    } else {
        Ok(Lattice::new(big).graph(labels))
    }
}

/// How two closed segments meet.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SegmentContact {
    Disjoint,
    Point(Point),
    /// Collinear overlap along a segment with distinct ends.
    Overlap(Point, Point),
}

/// Exact intersection set of two closed segments.
pub fn segment_contact(a0: &Point, a1: &Point, b0: &Point, b1: &Point) -> SegmentContact {
    if !segments_intersect(a0, a1, b0, b1) {
        return SegmentContact::Disjoint;
    }
    let ax = &a1.x - &a0.x;
    let ay = &a1.y - &a0.y;
    let bx = &b1.x - &b0.x;
    let by = &b1.y - &b0.y;
    let denom = &ax * &by - &ay * &bx;
    if !denom.is_zero() {
        let t = ((&b0.x - &a0.x) * &by - (&b0.y - &a0.y) * &bx) / denom;
        return SegmentContact::Point(Point::new(&a0.x + &t * &ax, &a0.y + &t * &ay));
    }
    // Parallel and touching, hence collinear: order the ends along the line.
    let mut a = [a0.clone(), a1.clone()];
    let mut b = [b0.clone(), b1.clone()];
    a.sort();
    b.sort();
    let lo = a[0].clone().max(b[0].clone());
    let hi = a[1].clone().min(b[1].clone());
    if lo == hi {
        SegmentContact::Point(lo)
    } else {
        SegmentContact::Overlap(lo, hi)
    }
}

/// Squared distance from `p` to the closed segment `a-b`.
pub fn point_segment_dist2(p: &Point, a: &Point, b: &Point) -> BigRational {
    let dx = &b.x - &a.x;
    let dy = &b.y - &a.y;
    let len2 = &dx * &dx + &dy * &dy;
    if len2.is_zero() {
        return p.dist2(a);
    }
    let t = ((&p.x - &a.x) * &dx + (&p.y - &a.y) * &dy) / len2;
    if !t.is_positive() {
        p.dist2(a)
    } else if t >= BigRational::one() {
        p.dist2(b)
    } else {
        p.dist2(&Point::new(&a.x + &t * &dx, &a.y + &t * &dy))
    }
}

/// True iff `p` lies on the closed segment `a-b`.
pub fn point_on_segment(p: &Point, a: &Point, b: &Point) -> bool {
    let (pa, aa, bb) = (rational_pair(p), rational_pair(a), rational_pair(b));
    BigRational::orient(&aa, &bb, &pa) == Ordering::Equal && within_box(&aa, &bb, &pa)
}

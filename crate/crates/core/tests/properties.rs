use num_rational::BigRational;
use proptest::prelude::*;

use stringgraph::extract::{self, AlgorithmParams, BicliqueMode, ExtractionWitness};
use stringgraph::formats;
use stringgraph::generate::{convex_points, generate, GeneratorKind, GeneratorSpec, Instance, Region};
use stringgraph::geometry::{intersection_graph, Point, Polyline, StringFamily};
use stringgraph::graph::IntersectionGraph;
use stringgraph::oracles;
use stringgraph::quasiplanar::{crossing_graph, is_r_quasiplanar, Drawing};
use stringgraph::separator::{balance_limit, find_balanced_separator, Strategy as Sep};
use stringgraph::Error;

fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(num.into(), den.into())
}

/// Polylines on a coarse grid so that touches, overlaps and collinear runs are common.
fn family(max_strings: usize, den: i64) -> impl Strategy<Value = StringFamily> {
    let point = (0i64..7, 0i64..7).prop_map(move |(x, y)| Point::new(rat(x, den), rat(y, den)));
    let string = prop::collection::vec(point, 2..5);
    prop::collection::vec(string, 1..=max_strings).prop_filter_map("coincident consecutive points", |strings| {
        let lines: Result<Vec<_>, _> =
            strings.into_iter().enumerate().map(|(i, pts)| Polyline::new(format!("s{i}"), pts)).collect();
        StringFamily::new(lines.ok()?).ok()
    })
}

fn graph(max_n: usize) -> impl Strategy<Value = IntersectionGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        (Just(n), prop::collection::vec(any::<bool>(), pairs), 0.0f64..1.0)
    })
    .prop_map(|(n, bits, keep)| {
        let mut g = IntersectionGraph::empty(n);
        let mut k = 0;
        for u in 0..n {
            for v in u + 1..n {
                // Thin out by `keep` so sparse and dense graphs both appear.
                if bits[k] && (k as f64 / bits.len().max(1) as f64) < keep.max(0.3) {
                    g.add_edge(u, v).unwrap();
                }
                k += 1;
            }
        }
        g
    })
}

/// Straight-line drawing of a random edge subset of `K_n` on convex points.
fn convex_drawing() -> impl Strategy<Value = Drawing> {
    (4usize..9).prop_flat_map(|n| (Just(n), prop::collection::vec(any::<bool>(), n * (n - 1) / 2))).prop_map(|(n, bits)| {
        let pts = convex_points(n, &Point::from_ints(0, 0), &rat(1, 1)).unwrap();
        let pairs: Vec<(usize, usize)> =
            (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).zip(&bits).filter(|(_, &b)| b).map(|(p, _)| p).collect();
        Drawing::straight_line(pts, &pairs).unwrap()
    })
}

fn edge_list(g: &IntersectionGraph) -> Vec<(usize, usize)> {
    g.edges().collect()
}

fn accept_precondition(g: &IntersectionGraph, e: Error, min: usize) -> Result<(), TestCaseError> {
    match e {
        Error::PreconditionViolated { clique } => {
            prop_assert!(g.is_clique(&clique), "{clique:?} is not a clique");
            prop_assert!(clique.len() >= min, "clique {clique:?} smaller than {min}");
            Ok(())
        }
        other => Err(TestCaseError::fail(format!("unexpected error {other}"))),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn intersection_graph_matches_brute_force(f in family(8, 1)) {
        prop_assert_eq!(edge_list(&intersection_graph(&f).unwrap()), edge_list(&oracles::intersection_graph_brute(&f)));
    }

    #[test]
    fn intersection_graph_ignores_translation_and_scale(f in family(6, 3), dx in -50i64..50, dy in -50i64..50) {
        let g = intersection_graph(&f).unwrap();
        let moved = f.translated(&rat(dx, 7), &rat(dy, 11));
        prop_assert_eq!(edge_list(&g), edge_list(&intersection_graph(&moved).unwrap()));
    }

    #[test]
    fn family_text_round_trips(f in family(6, 8)) {
        let text = formats::emit_family(&f);
        let back = formats::parse_family(&text, false).unwrap();
        prop_assert_eq!(&back, &f);
        prop_assert_eq!(formats::emit_family(&back), text);
    }

    #[test]
    fn family_with_non_decimal_coordinates_round_trips(f in family(4, 3)) {
        let text = formats::emit_family(&f);
        prop_assert_eq!(formats::parse_family(&text, false).unwrap(), f);
    }

    #[test]
    fn graph_text_round_trips(g in graph(20)) {
        let text = formats::emit_graph(&g);
        let back = formats::parse_graph(&text).unwrap();
        prop_assert_eq!(edge_list(&back), edge_list(&g));
        prop_assert_eq!(formats::emit_graph(&back), text);
    }

    #[test]
    fn drawing_text_round_trips(d in convex_drawing()) {
        let text = formats::emit_drawing(&d);
        prop_assert_eq!(formats::parse_drawing(&text, false).unwrap(), d);
    }

    #[test]
    fn every_strategy_returns_a_valid_partition(g in graph(40)) {
        for strategy in [Sep::Auto, Sep::BfsLayer, Sep::DegreePeel] {
            let part = find_balanced_separator(&g, strategy).unwrap();
            prop_assert_eq!(part.validate(&g), Ok(()));
        }
    }

    #[test]
    fn exact_separator_is_minimum(g in graph(10)) {
        let part = find_balanced_separator(&g, Sep::Exact).unwrap();
        prop_assert_eq!(part.validate(&g), Ok(()));
        let best = oracles::min_balanced_separator_exact(&g).unwrap();
        prop_assert_eq!(part.separator.len(), best.separator.len());
        prop_assert!(best.left.len().max(best.right.len()) <= balance_limit(g.vertex_count()));
    }

    #[test]
    fn clique_number_is_independence_number_of_complement(g in graph(16)) {
        let w = oracles::max_clique_exact(&g).unwrap();
        prop_assert!(g.is_clique(&w));
        prop_assert_eq!(w.len(), oracles::max_independent_set_exact(&g.complement()).unwrap().len());
    }

    #[test]
    fn triangle_free_subsets_generalise_independent_sets(g in graph(12)) {
        let mis = oracles::max_independent_set_exact(&g).unwrap();
        prop_assert!(g.is_independent(&mis));
        prop_assert_eq!(oracles::max_kp_free_subset_exact(&g, 2).unwrap().len(), mis.len());
        prop_assert!(oracles::max_kp_free_subset_exact(&g, 1).unwrap().is_empty());
        prop_assert!(oracles::max_kp_free_subset_exact(&g, 3).unwrap().len() >= mis.len());
    }

    #[test]
    fn extractor_witnesses_validate(g in graph(24)) {
        let p = AlgorithmParams::default();
        for s in 1..=2 {
            match extract::independent_set(&g, s, &p) {
                Ok(w) => prop_assert_eq!(w.validate(&g), Ok(())),
                Err(e) => accept_precondition(&g, e, 2)?,
            }
        }
        match extract::q_independent_set(&g, 2, 1, &p) {
            Ok(w) => prop_assert_eq!(w.validate(&g), Ok(())),
            Err(e) => accept_precondition(&g, e, 2)?,
        }
        for r in 3..=5 {
            match extract::kr1_free_subgraph(&g, r, &p) {
                Ok(w) => prop_assert_eq!(w.validate(&g), Ok(())),
                Err(e) => accept_precondition(&g, e, r)?,
            }
            match extract::half_clique_free_subgraph(&g, r, &p) {
                Ok(w) => prop_assert_eq!(w.validate(&g), Ok(())),
                Err(e) => accept_precondition(&g, e, r)?,
            }
        }
        match extract::dense_core(&g, 0.5, &p) {
            Ok(w) => prop_assert_eq!(w.validate(&g), Ok(())),
            Err(e) => prop_assert!(matches!(e, Error::RefinementFailed(_)), "{e}"),
        }
        if g.edge_count() > 0 {
            let n = g.vertex_count() as f64;
            let cover = extract::multipartite_cover(&g, g.edge_count() as f64 / (n * n), &p).unwrap();
            prop_assert_eq!(cover.validate(&g), Ok(()));
        }
    }

    #[test]
    fn extractor_sizes_never_beat_the_oracle(g in graph(14)) {
        let p = AlgorithmParams::default();
        let mis = oracles::max_independent_set_exact(&g).unwrap().len();
        if let Ok(w) = extract::independent_set(&g, 2, &p) {
            prop_assert!(w.vertices().len() <= mis);
            prop_assert!(w.vertices().len() >= extract::independent_set_floor(g.vertex_count(), 2, p.c));
        }
        if let Ok(w) = extract::kr1_free_subgraph(&g, 4, &p) {
            prop_assert!(w.vertices().len() <= oracles::max_kp_free_subset_exact(&g, 3).unwrap().len());
        }
    }

    #[test]
    fn exact_biclique_matches_oracle(g in graph(12)) {
        let (a, b) = oracles::max_balanced_biclique_exact(&g).unwrap();
        let found = extract::find_balanced_biclique(&g, 1, BicliqueMode::Exact).unwrap();
        let t = found.as_ref().map_or(0, |(x, _)| x.len());
        prop_assert_eq!(t, a.len());
        prop_assert_eq!(a.len(), b.len());
        if let Some((x, y)) = found {
            prop_assert!(x.iter().all(|&u| y.iter().all(|&v| g.has_edge(u, v))));
        }
    }

    #[test]
    fn color_or_clique_returns_a_verified_branch(g in graph(30), eps in prop::sample::select(vec![0.5, 0.8])) {
        let d = extract::color_or_clique(&g, eps, &AlgorithmParams::default()).unwrap();
        prop_assert_eq!(d.validate(&g), Ok(()));
    }

    #[test]
    fn crossing_graph_matches_untruncated_crossings(d in convex_drawing()) {
        let g = crossing_graph(&d).unwrap();
        for (i, row) in oracles::crossing_pairs(&d).iter().enumerate() {
            for (j, &c) in row.iter().enumerate().skip(i + 1) {
                prop_assert_eq!(g.has_edge(i, j), c);
            }
        }
    }

    #[test]
    fn quasiplanarity_matches_subset_enumeration(d in convex_drawing(), r in 2usize..5) {
        let res = is_r_quasiplanar(&d, r).unwrap();
        let found = oracles::pairwise_crossing_exact(&d, r).unwrap();
        prop_assert_eq!(res.quasiplanar, found.is_none());
        prop_assert_eq!(res.witness.is_some(), found.is_some());
    }

    #[test]
    fn generation_is_deterministic(seed in any::<u64>(), count in 1usize..30, kind in 0usize..6) {
        let kind = [
            GeneratorKind::RandomSegments,
            GeneratorKind::RandomPolylines { bends: 2 },
            GeneratorKind::ConvexChords,
            GeneratorKind::GridPaths,
            GeneratorKind::DisjointSegments,
            GeneratorKind::AllCrossingSegments,
        ][kind].clone();
        let spec = GeneratorSpec { kind, count, seed, region: Region { x0: -3, y0: 0, x1: 4, y1: 2 } };
        let emit = |i: Instance| match i {
            Instance::Family(f) => formats::emit_family(&f),
            Instance::Drawing(d) => formats::emit_drawing(&d),
        };
        prop_assert_eq!(emit(generate(&spec).unwrap()), emit(generate(&spec).unwrap()));
    }
}

#[test]
fn witnesses_survive_serialization() {
    let g = stringgraph::graph::named::grid(4);
    let w = extract::independent_set(&g, 1, &AlgorithmParams::default()).unwrap_err();
    assert!(matches!(w, Error::PreconditionViolated { .. }));
    let w = extract::kr1_free_subgraph(&g, 3, &AlgorithmParams::default()).unwrap();
    let text = serde_json::to_string(&w).unwrap();
    let back: ExtractionWitness = serde_json::from_str(&text).unwrap();
    assert_eq!(back, w);
    assert_eq!(back.validate(&g), Ok(()));
}

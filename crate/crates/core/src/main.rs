use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use stringgraph::extract::{self, AlgorithmParams, ExtractionWitness};
use stringgraph::formats::{self, Input};
use stringgraph::generate::{generate, GeneratorKind, GeneratorSpec, Instance, Region};
use stringgraph::geometry::{intersection_graph, StringFamily};
use stringgraph::graph::{find_clique, find_clique_in, IntersectionGraph};
use stringgraph::oracles;
use stringgraph::quasiplanar::{self, crossing_graph, Drawing};
use stringgraph::report::{emit_report, labelled, Check, ErrorInfo, InputInfo, RunReport, Verification};
use stringgraph::separator::{self, find_balanced_separator, fit_power_law, Strategy};
use stringgraph::{Error, Result};

#[derive(Parser)]
#[command(name = "stringgraph", version, about = "String graphs, separators, extractors and quasiplanar drawings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Seed for generators and surveys.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// JSON file of algorithm parameters; missing fields keep their defaults.
    #[arg(long, global = true)]
    params: Option<PathBuf>,
    /// Separator strategy: auto, exact, bfs_layer or degree_peel.
    #[arg(long, global = true, value_parser = parse_strategy)]
    strategy: Option<Strategy>,
    /// Output file (default stdout).
    #[arg(short = 'o', long, global = true)]
    output: Option<PathBuf>,
    /// Re-run the exponential exact checks on the witness.
    #[arg(long, global = true, value_enum, default_value_t = Toggle::On)]
    verify: Toggle,
    /// Read JSON numbers as doubles instead of exact decimals.
    #[arg(long, global = true)]
    inexact: bool,
    /// Report file. For gen and build-graph it defaults to stderr, for
    /// everything else the report is the output.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    /// Include wall-clock timings in the report.
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Toggle {
    On,
    Off,
}

fn parse_strategy(s: &str) -> std::result::Result<Strategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Subcommand)]
enum Command {
    /// Generate a seeded string family or drawing.
    Gen(GenArgs),
    /// Intersection graph of a family (crossing graph of a drawing) as an edge list.
    BuildGraph { input: PathBuf },
    /// Balanced separator of a graph.
    Separator { input: PathBuf },
    #[command(subcommand)]
    Extract(ExtractCmd),
    /// Proper colouring with at most n^eps colours or a clique of at least n^delta vertices.
    ColorOrClique {
        input: PathBuf,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Quasiplanarity of drawings.
    #[command(subcommand)]
    Qp(QpCmd),
    /// Exact exponential-time references.
    #[command(subcommand)]
    Oracle(OracleCmd),
    /// Median separator size against edge count over seeded instances.
    Survey(SurveyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum KindArg {
    RandomSegments,
    RandomPolylines,
    ConvexChords,
    GridPaths,
    DisjointSegments,
    AllCrossingSegments,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    kind: KindArg,
    /// Number of strings (vertices for convex_chords).
    #[arg(long)]
    count: usize,
    /// Interior points per polyline for random_polylines.
    #[arg(long, default_value_t = 1)]
    bends: usize,
    /// Integer bounding box `x0,y0,x1,y1`.
    #[arg(long, default_value = "0,0,1,1")]
    region: String,
}

#[derive(Subcommand)]
enum ExtractCmd {
    /// Independent set of a K_{2^s}-free graph.
    Independent {
        input: PathBuf,
        #[arg(long)]
        s: u32,
    },
    /// Set spanning no 2^q-clique in a K_{2^s}-free graph.
    Qindep {
        input: PathBuf,
        #[arg(long)]
        s: u32,
        #[arg(long)]
        q: u32,
    },
    /// K_{r-1}-free subset of a K_r-free graph.
    Kr1free {
        input: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// K_{ceil(r/2)}-free subset of a K_r-free graph.
    Halfclique {
        input: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// Small subgraph keeping most of the average degree.
    Densecore {
        input: PathBuf,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
    /// Pairwise complete parts; alpha defaults to m / n^2.
    Multipartite {
        input: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
    },
}

#[derive(Subcommand)]
enum QpCmd {
    /// Whether no r edges pairwise cross.
    Check {
        input: PathBuf,
        #[arg(long)]
        r: usize,
    },
    /// 4-quasiplanar edge subset of a 2^s-quasiplanar drawing.
    Sparse {
        input: PathBuf,
        #[arg(long)]
        s: u32,
    },
    /// Edge bound n (C log n / s)^(2s-4); n and m come from the drawing if given.
    Bound {
        input: Option<PathBuf>,
        #[arg(long)]
        n: Option<u64>,
        #[arg(long)]
        m: Option<u64>,
        #[arg(long)]
        s: u32,
        #[arg(long = "c", default_value_t = 1.0)]
        c: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
    },
}

#[derive(Subcommand)]
enum OracleCmd {
    Mis { input: PathBuf },
    Clique { input: PathBuf },
    Kpfree {
        input: PathBuf,
        #[arg(long)]
        p: usize,
    },
    Sep { input: PathBuf },
    Biclique { input: PathBuf },
    Crossings {
        input: PathBuf,
        #[arg(long)]
        r: usize,
    },
}

#[derive(Args)]
struct SurveyArgs {
    #[arg(long, value_enum, default_value = "random_segments")]
    kind: KindArg,
    #[arg(long, default_value_t = 1)]
    bends: usize,
    /// Comma-separated instance sizes.
    #[arg(long, default_value = "50,100,200,400")]
    sizes: String,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value = "0,0,1,1")]
    region: String,
}

struct Loaded {
    graph: IntersectionGraph,
    drawing: Option<Drawing>,
    family: Option<StringFamily>,
}

struct Ctx<'a> {
    common: &'a Common,
    params: AlgorithmParams,
    report: RunReport,
    graph: Option<IntersectionGraph>,
    timings: BTreeMap<String, f64>,
}

impl Ctx<'_> {
    fn exhaustive(&self) -> bool {
        self.common.verify == Toggle::On
    }

    fn time<T>(&mut self, phase: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        *self.timings.entry(phase.into()).or_default() += start.elapsed().as_secs_f64() * 1e3;
        out
    }

    fn read(&mut self, path: &Path) -> Result<String> {
        let mut data = Vec::new();
        if path == Path::new("-") {
            std::io::stdin().read_to_end(&mut data)?;
        } else {
            data = std::fs::read(path)?;
        }
        self.report.input = Some(InputInfo::new(&path.display().to_string(), &data));
        String::from_utf8(data).map_err(|e| Error::Parse { line: 1, column: 1, message: e.to_string() })
    }

    fn load(&mut self, path: &Path) -> Result<Loaded> {
        let text = self.read(path)?;
        let inexact = self.common.inexact;
        let input = self.time("parse", || formats::parse_any(&text, inexact))?;
        let loaded = match input {
            Input::Graph(graph) => Loaded { graph, drawing: None, family: None },
            Input::Family(f) => {
                Loaded { graph: self.time("build_graph", || intersection_graph(&f))?, drawing: None, family: Some(f) }
            }
            Input::Drawing(d) => {
                Loaded { graph: self.time("build_graph", || crossing_graph(&d))?, drawing: Some(d), family: None }
            }
        };
        self.graph = Some(loaded.graph.clone());
        Ok(loaded)
    }

    fn load_drawing(&mut self, path: &Path) -> Result<Drawing> {
        let loaded = self.load(path)?;
        loaded.drawing.ok_or_else(|| Error::schema("$", "expected a drawing (`vertices` and `edges`)"))
    }

    fn set_params(&mut self, extra: Value) {
        let mut p = json!({ "algorithm": self.params });
        if let (Some(obj), Value::Object(more)) = (p.as_object_mut(), extra) {
            obj.extend(more);
        }
        self.report.params = p;
    }

    fn finish(&mut self, witness: Value, checks: Vec<Check>) {
        self.report.witness = witness;
        self.report.verification = Verification::new(checks);
    }

    /// A check needing exact exponential search, skipped under `--verify off`.
    fn exact_check(&self, name: &str, f: impl FnOnce() -> std::result::Result<(), String>) -> Check {
        if self.exhaustive() {
            Check::from_result(name, f())
        } else {
            Check::skipped(name, "--verify off")
        }
    }
}

fn load_params(common: &Common) -> Result<AlgorithmParams> {
    let mut params = match &common.params {
        None => AlgorithmParams::default(),
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            serde_json::from_str(&text).map_err(|e| match e.classify() {
                serde_json::error::Category::Data => Error::schema("params", e.to_string()),
                _ => Error::Parse { line: e.line(), column: e.column(), message: e.to_string() },
            })?
        }
    };
    if let Some(s) = common.strategy {
        params.strategy = s;
    }
    params.validate()?;
    Ok(params)
}

fn kind_of(k: KindArg, bends: usize) -> GeneratorKind {
    match k {
        KindArg::RandomSegments => GeneratorKind::RandomSegments,
        KindArg::RandomPolylines => GeneratorKind::RandomPolylines { bends },
        KindArg::ConvexChords => GeneratorKind::ConvexChords,
        KindArg::GridPaths => GeneratorKind::GridPaths,
        KindArg::DisjointSegments => GeneratorKind::DisjointSegments,
        KindArg::AllCrossingSegments => GeneratorKind::AllCrossingSegments,
    }
}

fn region_of(text: &str) -> Result<Region> {
    match formats::parse_int_list(text).as_deref() {
        Some(&[x0, y0, x1, y1]) => Ok(Region { x0, y0, x1, y1 }),
        _ => Err(Error::BadSpec(format!("region `{text}` is not four integers x0,y0,x1,y1"))),
    }
}

fn emit_instance(inst: &Instance) -> String {
    match inst {
        Instance::Family(f) => formats::emit_family(f),
        Instance::Drawing(d) => formats::emit_drawing(d),
    }
}

fn cmd_gen(ctx: &mut Ctx, a: &GenArgs) -> Result<Option<String>> {
    let spec = GeneratorSpec { kind: kind_of(a.kind, a.bends), count: a.count, seed: ctx.common.seed, region: region_of(&a.region)? };
    ctx.set_params(json!({ "generator": spec }));
    let inst = ctx.time("generate", || generate(&spec))?;
    let text = emit_instance(&inst);
    let again = emit_instance(&generate(&spec)?);
    let parsed_back = match &inst {
        Instance::Family(f) => formats::parse_family(&text, false).map(|p| &p == f),
        Instance::Drawing(d) => formats::parse_drawing(&text, false).map(|p| &p == d),
    };
    let checks = vec![
        Check::from_result("deterministic", if again == text { Ok(()) } else { Err("regeneration differs".into()) }),
        Check::from_result(
            "round_trip",
            match parsed_back {
                Ok(true) => Ok(()),
                Ok(false) => Err("parsed output differs".into()),
                Err(e) => Err(e.to_string()),
            },
        ),
    ];
    let (kind, size) = match &inst {
        Instance::Family(f) => ("family", f.len()),
        Instance::Drawing(d) => ("drawing", d.edges().len()),
    };
    let digest = InputInfo::new("-", text.as_bytes()).sha256;
    ctx.finish(json!({ "kind": kind, "size": size, "sha256": digest }), checks);
    Ok(Some(text))
}

fn cmd_build_graph(ctx: &mut Ctx, input: &Path) -> Result<Option<String>> {
    ctx.set_params(json!({}));
    let loaded = ctx.load(input)?;
    let g = &loaded.graph;
    let mut checks = Vec::new();
    if let Some(f) = &loaded.family {
        checks.push(ctx.exact_check("all_pairs_brute_force", || {
            let brute = oracles::intersection_graph_brute(f);
            if brute.edges().eq(g.edges()) {
                Ok(())
            } else {
                Err("edge sets differ".into())
            }
        }));
    }
    if let Some(d) = &loaded.drawing {
        checks.push(ctx.exact_check("untruncated_crossings", || {
            let cross = oracles::crossing_pairs(d);
            let expected: Vec<(usize, usize)> =
                (0..cross.len()).flat_map(|i| (i + 1..cross.len()).map(move |j| (i, j))).filter(|&(i, j)| cross[i][j]).collect();
            if expected.into_iter().eq(g.edges()) {
                Ok(())
            } else {
                Err("edge sets differ".into())
            }
        }));
    }
    let text = formats::emit_graph(g);
    checks.push(Check::from_result(
        "round_trip",
        match formats::parse_graph(&text) {
            Ok(back) if back.edges().eq(g.edges()) => Ok(()),
            Ok(_) => Err("parsed graph differs".into()),
            Err(e) => Err(e.to_string()),
        },
    ));
    ctx.finish(json!({ "n": g.vertex_count(), "m": g.edge_count(), "labels": g.labels() }), checks);
    Ok(Some(text))
}

fn cmd_separator(ctx: &mut Ctx, input: &Path) -> Result<Option<String>> {
    ctx.set_params(json!({ "strategy": ctx.params.strategy }));
    let g = ctx.load(input)?.graph;
    let strategy = ctx.params.strategy;
    let part = ctx.time("separate", || find_balanced_separator(&g, strategy))?;
    let mut checks = vec![Check::from_result("partition", part.validate(&g))];
    let n = g.vertex_count();
    if n <= oracles::SEPARATOR_CAP {
        let exact_expected = matches!(strategy, Strategy::Exact | Strategy::Auto);
        checks.push(ctx.exact_check("oracle_minimum", || {
            let best = oracles::min_balanced_separator_exact(&g).map_err(|e| e.to_string())?.separator.len();
            match part.separator.len() {
                k if k == best => Ok(()),
                k if !exact_expected && k > best => Ok(()),
                k => Err(format!("separator has {k} vertices, minimum is {best}")),
            }
        }));
    }
    let witness = json!({
        "separator": labelled(&g, &part.separator),
        "left": labelled(&g, &part.left),
        "right": labelled(&g, &part.right),
        "size": part.separator.len(),
        "n": n,
        "m": g.edge_count(),
        "balance_limit": separator::balance_limit(n),
    });
    ctx.finish(witness, checks);
    Ok(None)
}

fn witness_json(g: &IntersectionGraph, w: &ExtractionWitness) -> Value {
    let mut v = serde_json::to_value(w).expect("witnesses serialize");
    let verts = w.vertices();
    v["size"] = json!(verts.len());
    v["labels"] = json!(verts.iter().map(|&x| g.label(x)).collect::<Vec<_>>());
    v
}

/// Witness check; the clique-freeness kinds need exponential search.
fn witness_check(ctx: &Ctx, g: &IntersectionGraph, w: &ExtractionWitness) -> Check {
    match w {
        ExtractionWitness::KpFree { .. } | ExtractionWitness::QIndependent { .. } => ctx.exact_check(w.kind(), || w.validate(g)),
        _ => Check::from_result(w.kind(), w.validate(g)),
    }
}

fn dominance(ctx: &Ctx, g: &IntersectionGraph, size: usize, oracle: impl FnOnce() -> Result<Vec<usize>>) -> Option<Check> {
    (g.vertex_count() <= oracles::KP_FREE_CAP).then(|| {
        ctx.exact_check("oracle_dominance", || {
            let best = oracle().map_err(|e| e.to_string())?.len();
            if size <= best {
                Ok(())
            } else {
                Err(format!("{size} exceeds the exact maximum {best}"))
            }
        })
    })
}

fn cmd_extract(ctx: &mut Ctx, cmd: &ExtractCmd) -> Result<Option<String>> {
    let (input, extra) = match cmd {
        ExtractCmd::Independent { input, s } => (input, json!({ "operation": "independent", "s": s })),
        ExtractCmd::Qindep { input, s, q } => (input, json!({ "operation": "qindep", "s": s, "q": q })),
        ExtractCmd::Kr1free { input, r } => (input, json!({ "operation": "kr1free", "r": r })),
        ExtractCmd::Halfclique { input, r } => (input, json!({ "operation": "halfclique", "r": r })),
        ExtractCmd::Densecore { input, epsilon } => (input, json!({ "operation": "densecore", "epsilon": epsilon })),
        ExtractCmd::Multipartite { input, alpha } => (input, json!({ "operation": "multipartite", "alpha": alpha })),
    };
    ctx.set_params(extra);
    let g = ctx.load(input)?.graph;
    let p = ctx.params.clone();
    let w = ctx.time("extract", || match cmd {
        ExtractCmd::Independent { s, .. } => extract::independent_set(&g, *s, &p),
        ExtractCmd::Qindep { s, q, .. } => extract::q_independent_set(&g, *s, *q, &p),
        ExtractCmd::Kr1free { r, .. } => extract::kr1_free_subgraph(&g, *r, &p),
        ExtractCmd::Halfclique { r, .. } => extract::half_clique_free_subgraph(&g, *r, &p),
        ExtractCmd::Densecore { epsilon, .. } => extract::dense_core(&g, *epsilon, &p),
        ExtractCmd::Multipartite { alpha, .. } => {
            let n = g.vertex_count().max(1) as f64;
            let alpha = alpha.unwrap_or(g.edge_count() as f64 / (n * n));
            extract::multipartite_cover(&g, alpha, &p).map(ExtractionWitness::Multipartite)
        }
    })?;
    let size = w.vertices().len();
    let mut checks = vec![witness_check(ctx, &g, &w)];
    match cmd {
        ExtractCmd::Independent { s, .. } => {
            let floor = extract::independent_set_floor(g.vertex_count(), *s, p.c);
            checks.push(Check::from_result(
                "size_floor",
                if size >= floor { Ok(()) } else { Err(format!("{size} is below the floor {floor}")) },
            ));
            checks.extend(dominance(ctx, &g, size, || oracles::max_independent_set_exact(&g)));
        }
        ExtractCmd::Qindep { q, .. } => {
            let k = 1usize << q;
            checks.extend(dominance(ctx, &g, size, || oracles::max_kp_free_subset_exact(&g, k)));
        }
        ExtractCmd::Kr1free { r, .. } => {
            checks.extend(dominance(ctx, &g, size, || oracles::max_kp_free_subset_exact(&g, r - 1)));
        }
        ExtractCmd::Halfclique { r, .. } => {
            checks.extend(dominance(ctx, &g, size, || oracles::max_kp_free_subset_exact(&g, r.div_ceil(2))));
        }
        _ => {}
    }
    ctx.finish(witness_json(&g, &w), checks);
    Ok(None)
}

fn cmd_color_or_clique(ctx: &mut Ctx, input: &Path, epsilon: Option<f64>) -> Result<Option<String>> {
    let eps = epsilon.unwrap_or(ctx.params.epsilon);
    ctx.set_params(json!({ "epsilon": eps }));
    let g = ctx.load(input)?.graph;
    let p = ctx.params.clone();
    let d = ctx.time("color_or_clique", || extract::color_or_clique(&g, eps, &p))?;
    let mut witness = witness_json(&g, &d.witness);
    witness["delta"] = json!(d.delta);
    witness["s"] = json!(d.s);
    witness["max_colors"] = json!(d.max_colors);
    witness["min_clique"] = json!(d.min_clique);
    let checks = vec![Check::from_result("dichotomy", d.validate(&g))];
    ctx.finish(witness, checks);
    Ok(None)
}

fn edge_labels(d: &Drawing, edges: &[usize]) -> Value {
    json!({ "edges": edges, "labels": edges.iter().map(|&e| d.edges()[e].label()).collect::<Vec<_>>() })
}

fn cmd_qp(ctx: &mut Ctx, cmd: &QpCmd) -> Result<Option<String>> {
    match cmd {
        QpCmd::Check { input, r } => {
            ctx.set_params(json!({ "r": r }));
            let d = ctx.load_drawing(input)?;
            let res = ctx.time("check", || quasiplanar::is_r_quasiplanar(&d, *r))?;
            let g = ctx.graph.clone().expect("loaded");
            let mut checks = Vec::new();
            if let Some(w) = &res.witness {
                checks.push(Check::from_result(
                    "pairwise_crossing",
                    if g.is_clique(w) { Ok(()) } else { Err("witness edges do not pairwise cross".into()) },
                ));
            }
            let subsets_ok = oracles::pairwise_crossing_exact(&d, *r).map(|o| o.is_some());
            checks.push(ctx.exact_check("brute_force_agreement", || match subsets_ok {
                Ok(found) if found != res.quasiplanar => Ok(()),
                Ok(_) => Err("brute force disagrees".into()),
                Err(e) => Err(e.to_string()),
            }));
            let witness = json!({
                "quasiplanar": res.quasiplanar,
                "r": r,
                "pairwise_crossing": res.witness.as_ref().map(|w| edge_labels(&d, w)),
            });
            ctx.finish(witness, checks);
        }
        QpCmd::Sparse { input, s } => {
            ctx.set_params(json!({ "s": s }));
            let d = ctx.load_drawing(input)?;
            let p = ctx.params.clone();
            let out = ctx.time("sparse", || quasiplanar::sparse_subgraph(&d, *s, &p))?;
            let g = ctx.graph.clone().expect("loaded");
            let kept = out.edges.clone();
            let checks = vec![ctx.exact_check("four_quasiplanar", || match find_clique_in(&g, &g.set_of(&kept), 4) {
                None => Ok(()),
                Some(c) => Err(format!("edges {c:?} pairwise cross")),
            })];
            let mut witness = edge_labels(&d, &out.edges);
            witness["size"] = json!(out.edges.len());
            witness["total_edges"] = json!(out.total_edges);
            witness["guaranteed_fraction"] = json!(out.guaranteed_fraction);
            ctx.finish(witness, checks);
        }
        QpCmd::Bound { input, n, m, s, c, epsilon } => {
            let (mut n, mut m) = (*n, *m);
            if let Some(path) = input {
                let d = ctx.load_drawing(path)?;
                n = n.or(Some(d.vertices().len() as u64));
                m = m.or(Some(d.edges().len() as u64));
            }
            ctx.set_params(json!({ "n": n, "m": m, "s": s, "c": c, "epsilon": epsilon }));
            let n = n.ok_or_else(|| Error::InvalidParameter("give --n or a drawing".into()))?;
            let res = quasiplanar::check_edge_bound(n, m.unwrap_or(0), *s, *c, *epsilon)?;
            let witness = serde_json::to_value(&res).expect("serializable");
            ctx.finish(witness, vec![Check::from_result("bound_finite", if res.bound.is_finite() { Ok(()) } else { Err("bound overflowed".into()) })]);
        }
    }
    Ok(None)
}

fn cmd_oracle(ctx: &mut Ctx, cmd: &OracleCmd) -> Result<Option<String>> {
    if let OracleCmd::Crossings { input, r } = cmd {
        ctx.set_params(json!({ "oracle": "crossings", "r": r }));
        let d = ctx.load_drawing(input)?;
        let found = ctx.time("oracle", || oracles::pairwise_crossing_exact(&d, *r))?;
        let cross = oracles::crossing_pairs(&d);
        let checks = match &found {
            Some(w) => vec![Check::from_result(
                "pairwise_crossing",
                if w.iter().all(|&a| w.iter().all(|&b| a == b || cross[a][b])) { Ok(()) } else { Err("not pairwise crossing".into()) },
            )],
            None => Vec::new(),
        };
        ctx.finish(json!({ "found": found.is_some(), "pairwise_crossing": found.as_ref().map(|w| edge_labels(&d, w)) }), checks);
        return Ok(None);
    }
    let (input, name) = match cmd {
        OracleCmd::Mis { input } => (input, "mis"),
        OracleCmd::Clique { input } => (input, "clique"),
        OracleCmd::Kpfree { input, .. } => (input, "kpfree"),
        OracleCmd::Sep { input } => (input, "sep"),
        OracleCmd::Biclique { input } => (input, "biclique"),
        OracleCmd::Crossings { .. } => unreachable!(),
    };
    let p = if let OracleCmd::Kpfree { p, .. } = cmd { Some(*p) } else { None };
    ctx.set_params(json!({ "oracle": name, "p": p }));
    let g = ctx.load(input)?.graph;
    let (witness, check) = ctx.time("oracle", || -> Result<(Value, Check)> {
        Ok(match cmd {
            OracleCmd::Mis { .. } => {
                let s = oracles::max_independent_set_exact(&g)?;
                let ok = g.is_independent(&s);
                (labelled(&g, &s), Check::from_result("independent", if ok { Ok(()) } else { Err("not independent".into()) }))
            }
            OracleCmd::Clique { .. } => {
                let s = oracles::max_clique_exact(&g)?;
                let ok = g.is_clique(&s);
                (labelled(&g, &s), Check::from_result("clique", if ok { Ok(()) } else { Err("not a clique".into()) }))
            }
            OracleCmd::Kpfree { p, .. } => {
                let s = oracles::max_kp_free_subset_exact(&g, *p)?;
                let w = ExtractionWitness::KpFree { vertices: s.clone(), p: *p };
                (labelled(&g, &s), Check::from_result("kp_free", w.validate(&g)))
            }
            OracleCmd::Sep { .. } => {
                let part = oracles::min_balanced_separator_exact(&g)?;
                let w = json!({
                    "separator": labelled(&g, &part.separator),
                    "left": labelled(&g, &part.left),
                    "right": labelled(&g, &part.right),
                    "size": part.separator.len(),
                });
                (w, Check::from_result("partition", part.validate(&g)))
            }
            OracleCmd::Biclique { .. } => {
                let (a, b) = oracles::max_balanced_biclique_exact(&g)?;
                let ok = a.iter().all(|&x| b.iter().all(|&y| g.has_edge(x, y)));
                let w = json!({ "t": a.len(), "a": labelled(&g, &a), "b": labelled(&g, &b) });
                (w, Check::from_result("complete_bipartite", if ok { Ok(()) } else { Err("not complete".into()) }))
            }
            OracleCmd::Crossings { .. } => unreachable!(),
        })
    })?;
    ctx.finish(witness, vec![check]);
    Ok(None)
}

fn cmd_survey(ctx: &mut Ctx, a: &SurveyArgs) -> Result<Option<String>> {
    let sizes: Vec<usize> = a
        .sizes
        .split(',')
        .map(|t| t.trim().parse().map_err(|_| Error::InvalidParameter(format!("bad size `{t}`"))))
        .collect::<Result<_>>()?;
    let spec = GeneratorSpec { kind: kind_of(a.kind, a.bends), count: 1, seed: ctx.common.seed, region: region_of(&a.region)? };
    ctx.set_params(json!({ "generator": spec, "sizes": sizes, "trials": a.trials, "strategy": ctx.params.strategy }));
    let strategy = ctx.params.strategy;
    let rows = ctx.time("survey", || separator::separator_size_survey(&spec, &sizes, a.trials, strategy))?;
    let fit = fit_power_law(&rows.iter().map(|r| (r.median_edges, r.median_separator)).collect::<Vec<_>>());
    let checks = vec![Check::from_result("fit", if fit.is_some() { Ok(()) } else { Err("too few usable points".into()) })];
    ctx.finish(json!({ "rows": rows, "fit": fit.map(|(k, beta)| json!({ "k": k, "beta": beta })) }), checks);
    Ok(None)
}

fn operation_name(cmd: &Command) -> String {
    match cmd {
        Command::Gen(_) => "gen".into(),
        Command::BuildGraph { .. } => "build-graph".into(),
        Command::Separator { .. } => "separator".into(),
        Command::Extract(e) => format!(
            "extract {}",
            match e {
                ExtractCmd::Independent { .. } => "independent",
                ExtractCmd::Qindep { .. } => "qindep",
                ExtractCmd::Kr1free { .. } => "kr1free",
                ExtractCmd::Halfclique { .. } => "halfclique",
                ExtractCmd::Densecore { .. } => "densecore",
                ExtractCmd::Multipartite { .. } => "multipartite",
            }
        ),
        Command::ColorOrClique { .. } => "color-or-clique".into(),
        Command::Qp(q) => format!(
            "qp {}",
            match q {
                QpCmd::Check { .. } => "check",
                QpCmd::Sparse { .. } => "sparse",
                QpCmd::Bound { .. } => "bound",
            }
        ),
        Command::Oracle(o) => format!(
            "oracle {}",
            match o {
                OracleCmd::Mis { .. } => "mis",
                OracleCmd::Clique { .. } => "clique",
                OracleCmd::Kpfree { .. } => "kpfree",
                OracleCmd::Sep { .. } => "sep",
                OracleCmd::Biclique { .. } => "biclique",
                OracleCmd::Crossings { .. } => "crossings",
            }
        ),
        Command::Survey(_) => "survey".into(),
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::DuplicateId(_) => "duplicate_id",
        Error::InvalidPolyline { .. } => "invalid_polyline",
        Error::NonFinite => "non_finite",
        Error::EmptyFamily => "empty_family",
        Error::UnknownVertex(_) => "unknown_vertex",
        Error::DegenerateGraph(_) => "degenerate_graph",
        Error::ExtractorViolation { .. } => "extractor_violation",
        Error::PreconditionViolated { .. } => "precondition_violated",
        Error::NoCoverFound(_) => "no_cover_found",
        Error::RefinementFailed(_) => "refinement_failed",
        Error::InternalBoundViolation(_) => "internal_bound_violation",
        Error::DegenerateDrawing(_) => "degenerate_drawing",
        Error::InvalidDrawing(_) => "invalid_drawing",
        Error::DomainError(_) => "domain_error",
        Error::TooLarge { .. } => "too_large",
        Error::Parse { .. } => "parse_error",
        Error::Schema { .. } => "schema_error",
        Error::BadSpec(_) => "bad_spec",
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::Io(_) => "io_error",
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::PreconditionViolated { .. } => 3,
        Error::Parse { .. }
        | Error::Schema { .. }
        | Error::DuplicateId(_)
        | Error::InvalidPolyline { .. }
        | Error::NonFinite
        | Error::InvalidDrawing(_)
        | Error::BadSpec(_) => 4,
        Error::TooLarge { .. } => 5,
        _ => 1,
    }
}

fn write_to(path: Option<&Path>, text: &str, stderr: bool) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None if stderr => std::io::stderr().write_all(text.as_bytes()),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let common = &cli.common;
    let mut ctx = Ctx {
        common,
        params: AlgorithmParams::default(),
        report: RunReport::new(&operation_name(&cli.command)),
        graph: None,
        timings: BTreeMap::new(),
    };
    let result = load_params(common).and_then(|p| {
        ctx.params = p;
        match &cli.command {
            Command::Gen(a) => cmd_gen(&mut ctx, a),
            Command::BuildGraph { input } => cmd_build_graph(&mut ctx, input),
            Command::Separator { input } => cmd_separator(&mut ctx, input),
            Command::Extract(e) => cmd_extract(&mut ctx, e),
            Command::ColorOrClique { input, epsilon } => cmd_color_or_clique(&mut ctx, input, *epsilon),
            Command::Qp(q) => cmd_qp(&mut ctx, q),
            Command::Oracle(o) => cmd_oracle(&mut ctx, o),
            Command::Survey(a) => cmd_survey(&mut ctx, a),
        }
    });
    let (artifact, code) = match result {
        Ok(artifact) => {
            let code = if ctx.report.verification.passed { 0 } else { 2 };
            (artifact, code)
        }
        Err(e) => {
            if let (Error::PreconditionViolated { clique }, Some(g)) = (&e, &ctx.graph) {
                let mut w = labelled(g, clique);
                w["kind"] = json!("clique");
                ctx.report.witness = w;
                let ok = g.is_clique(clique) && find_clique(g, clique.len()).is_some();
                ctx.report.verification = Verification::new(vec![Check::from_result(
                    "clique",
                    if ok { Ok(()) } else { Err("witness is not a clique".into()) },
                )]);
            } else {
                ctx.report.verification = Verification { passed: false, checks: Vec::new() };
            }
            ctx.report.error = Some(ErrorInfo { kind: error_kind(&e).into(), message: e.to_string() });
            eprintln!("error: {e}");
            (None, exit_code(&e))
        }
    };
    if common.timings {
        ctx.report.timings_ms = Some(std::mem::take(&mut ctx.timings));
    }
    let text = emit_report(&ctx.report);
    // Commands producing an artifact keep the report off stdout even when they fail.
    let produces_artifact = matches!(cli.command, Command::Gen(_) | Command::BuildGraph { .. });
    let written = if produces_artifact {
        artifact
            .map_or(Ok(()), |a| write_to(common.output.as_deref(), &a, false))
            .and_then(|_| write_to(common.report.as_deref(), &text, true))
    } else {
        write_to(common.report.as_deref().or(common.output.as_deref()), &text, false)
    };
    if let Err(e) = written {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}

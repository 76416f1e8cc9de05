//! File formats.
//!
//! * String family: `{"strings":[{"id":"s1","points":[[x,y],...]},...]}`
//! * Drawing: `{"vertices":[[x,y],...],"edges":[{"u":0,"v":3,"points":[[x,y],...]},...]}`,
//!   where an edge may carry an `"id"` and may omit `"points"` to mean the
//!   straight segment.
//! * Graph: first line `n m`, then `m` lines `u v` (0-indexed).
//!
//! Coordinates are JSON numbers read as exact decimals, or strings holding
//! a decimal or a fraction `"p/q"`. With `inexact` set, JSON numbers are
//! read as doubles first. The emitters write the canonical form: one string
//! or edge per line, and each coordinate as the shortest exact decimal, or
//! as a `"p/q"` string when no finite decimal exists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::geometry::{Point, Polyline, StringFamily};
use crate::graph::IntersectionGraph;
use crate::quasiplanar::{Drawing, DrawingEdge};

/// Largest decimal exponent accepted in a number literal.
const MAX_EXPONENT: i64 = 4096;

fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::parse(e.line(), e.column(), e.to_string()))
}

fn schema(field: &str, msg: impl Into<String>) -> Error {
    Error::schema(field, msg)
}

/// Exact value of a decimal literal such as `-12.5e-3`.
pub fn parse_decimal(text: &str) -> Option<BigRational> {
    let (neg, body) = match text.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, text.strip_prefix('+').unwrap_or(text)),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (int, frac) = match mantissa.split_once('.') {
        Some((a, b)) => (a, b),
        None => (mantissa, ""),
    };
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int.is_empty() && frac.is_empty() || !digits_ok(int) || !digits_ok(frac) || exp.abs() > MAX_EXPONENT {
        return None;
    }
    let mut value: BigInt = format!("{int}{frac}").trim_start_matches('0').parse().unwrap_or_default();
    if neg {
        value = -value;
    }
    let shift = exp - frac.len() as i64;
    let ten = BigInt::from(10);
    Some(if shift >= 0 {
        BigRational::from_integer(value * num_traits::pow(ten, shift as usize))
    } else {
        BigRational::new(value, num_traits::pow(ten, (-shift) as usize))
    })
}

/// Exact value of a decimal or a fraction `p/q`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    match text.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            (!q.is_zero()).then(|| BigRational::new(p, q))
        }
        None => parse_decimal(text),
    }
}

fn parse_number(v: &Value, inexact: bool, field: &str) -> Result<BigRational> {
    match v {
        Value::Number(n) => {
            let text = n.to_string();
            if inexact {
                let f: f64 = text.parse().map_err(|_| schema(field, format!("`{text}` is not a number")))?;
                BigRational::from_float(f).ok_or_else(|| schema(field, "number is not finite"))
            } else {
                parse_decimal(&text).ok_or_else(|| schema(field, format!("`{text}` is not a decimal number")))
            }
        }
        Value::String(s) => parse_rational(s).ok_or_else(|| schema(field, format!("`{s}` is not a decimal or p/q fraction"))),
        _ => Err(schema(field, "expected a number or a numeric string")),
    }
}

fn parse_point(v: &Value, inexact: bool, field: &str) -> Result<Point> {
    match v.as_array().map(Vec::as_slice) {
        Some([x, y]) => {
            Ok(Point::new(parse_number(x, inexact, &format!("{field}[0]"))?, parse_number(y, inexact, &format!("{field}[1]"))?))
        }
        _ => Err(schema(field, "expected a point [x, y]")),
    }
}

fn parse_points(v: Option<&Value>, inexact: bool, field: &str) -> Result<Vec<Point>> {
    let arr = v.and_then(Value::as_array).ok_or_else(|| schema(field, "expected an array of points"))?;
    arr.iter().enumerate().map(|(i, p)| parse_point(p, inexact, &format!("{field}[{i}]"))).collect()
}

fn object<'a>(v: &'a Value, field: &str, allowed: &[&str]) -> Result<&'a Map<String, Value>> {
    let obj = v.as_object().ok_or_else(|| schema(field, "expected an object"))?;
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(schema(&format!("{field}.{k}"), "unknown field"));
    }
    Ok(obj)
}

fn index(v: Option<&Value>, field: &str) -> Result<usize> {
    v.and_then(Value::as_u64)
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| schema(field, "expected a non-negative integer"))
}

pub fn parse_family(text: &str, inexact: bool) -> Result<StringFamily> {
    family_from_value(&parse_json(text)?, inexact)
}

fn family_from_value(root: &Value, inexact: bool) -> Result<StringFamily> {
    let obj = object(root, "$", &["strings"])?;
    let strings = obj.get("strings").and_then(Value::as_array).ok_or_else(|| schema("strings", "expected an array"))?;
    let polylines = strings
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let field = format!("strings[{i}]");
            let o = object(s, &field, &["id", "points"])?;
            let id = o.get("id").and_then(Value::as_str).ok_or_else(|| schema(&format!("{field}.id"), "expected a string"))?;
            Polyline::new(id, parse_points(o.get("points"), inexact, &format!("{field}.points"))?)
        })
        .collect::<Result<Vec<_>>>()?;
    StringFamily::new(polylines)
}

pub fn parse_drawing(text: &str, inexact: bool) -> Result<Drawing> {
    drawing_from_value(&parse_json(text)?, inexact)
}

fn drawing_from_value(root: &Value, inexact: bool) -> Result<Drawing> {
    let obj = object(root, "$", &["vertices", "edges"])?;
    let vertices = parse_points(obj.get("vertices"), inexact, "vertices")?;
    let edges = obj.get("edges").and_then(Value::as_array).ok_or_else(|| schema("edges", "expected an array"))?;
    let edges = edges
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let field = format!("edges[{i}]");
            let o = object(e, &field, &["u", "v", "points", "id"])?;
            let u = index(o.get("u"), &format!("{field}.u"))?;
            let v = index(o.get("v"), &format!("{field}.v"))?;
            for (name, x) in [("u", u), ("v", v)] {
                if x >= vertices.len() {
                    return Err(schema(&format!("{field}.{name}"), format!("vertex {x} does not exist")));
                }
            }
            let points = match o.get("points") {
                None => vec![vertices[u].clone(), vertices[v].clone()],
                Some(p) => parse_points(Some(p), inexact, &format!("{field}.points"))?,
            };
            let id = match o.get("id") {
                None => None,
                Some(Value::String(s)) => Some(s.clone()),
                Some(_) => return Err(schema(&format!("{field}.id"), "expected a string")),
            };
            Ok(DrawingEdge { u, v, points, id })
        })
        .collect::<Result<Vec<_>>>()?;
    Drawing::new(vertices, edges)
}

/// A parsed input file of any of the three formats.
pub enum Input {
    Family(StringFamily),
    Drawing(Drawing),
    Graph(IntersectionGraph),
}

/// Detects the format: JSON with `strings` or `vertices`, else graph text.
pub fn parse_any(text: &str, inexact: bool) -> Result<Input> {
    if !text.trim_start().starts_with('{') {
        return parse_graph(text).map(Input::Graph);
    }
    let root = parse_json(text)?;
    match root.as_object() {
        Some(o) if o.contains_key("strings") => family_from_value(&root, inexact).map(Input::Family),
        Some(o) if o.contains_key("vertices") => drawing_from_value(&root, inexact).map(Input::Drawing),
        _ => Err(schema("$", "expected a string family (`strings`) or a drawing (`vertices`)")),
    }
}

/// Canonical text of a number: shortest exact decimal if one exists.
pub fn format_number(x: &BigRational) -> String {
    let (num, den) = (x.numer(), x.denom());
    if den.is_one() {
        return num.to_string();
    }
    let (mut twos, mut fives, mut rest) = (0usize, 0usize, den.clone());
    let (two, five) = (BigInt::from(2), BigInt::from(5));
    while rest.is_even() {
        rest /= &two;
        twos += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        fives += 1;
    }
    if !rest.is_one() {
        return format!("\"{num}/{den}\"");
    }
    let k = twos.max(fives);
    let scaled = num.abs() * num_traits::pow(BigInt::from(10), k) / den;
    let digits = format!("{scaled:0>width$}", width = k + 1);
    let (int, frac) = digits.split_at(digits.len() - k);
    format!("{}{int}.{frac}", if num.is_negative() { "-" } else { "" })
}

fn format_point(p: &Point) -> String {
    format!("[{},{}]", format_number(&p.x), format_number(&p.y))
}

fn format_points(ps: &[Point]) -> String {
    let inner: Vec<String> = ps.iter().map(format_point).collect();
    format!("[{}]", inner.join(","))
}

fn json_string(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

fn lines_block(head: &str, lines: Vec<String>, tail: &str) -> String {
    if lines.is_empty() {
        return format!("{head}{tail}\n");
    }
    format!("{head}\n{}\n{tail}\n", lines.join(",\n"))
}

pub fn emit_family(fam: &StringFamily) -> String {
    let lines = fam
        .strings()
        .iter()
        .map(|s| format!("  {{\"id\":{},\"points\":{}}}", json_string(s.id()), format_points(s.points())))
        .collect();
    lines_block("{\"strings\":[", lines, "]}")
}

pub fn emit_drawing(d: &Drawing) -> String {
    let lines = d
        .edges()
        .iter()
        .map(|e| {
            let id = e.id.as_ref().map(|s| format!(",\"id\":{}", json_string(s))).unwrap_or_default();
            format!("  {{\"u\":{},\"v\":{},\"points\":{}{id}}}", e.u, e.v, format_points(&e.points))
        })
        .collect();
    lines_block(&format!("{{\"vertices\":{},\"edges\":[", format_points(d.vertices())), lines, "]}")
}

pub fn parse_graph(text: &str) -> Result<IntersectionGraph> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let tokens = |(no, line): (usize, &str), what: &str| -> Result<(usize, usize)> {
        let mut out = Vec::new();
        let mut col = 0;
        for tok in line.split_whitespace() {
            col = line[col..].find(tok).unwrap() + col;
            let v = tok.parse::<usize>().map_err(|_| Error::parse(no + 1, col + 1, format!("`{tok}` is not a {what}")))?;
            out.push((v, col + 1));
            col += tok.len();
        }
        match out.as_slice() {
            [a, b] => Ok((a.0, b.0)),
            _ => Err(Error::parse(no + 1, 1, format!("expected two {what}s, found {}", out.len()))),
        }
    };
    let header = lines.next().ok_or_else(|| Error::parse(1, 1, "missing header `n m`"))?;
    let (n, m) = tokens(header, "count")?;
    let mut g = IntersectionGraph::empty(n);
    for i in 0..m {
        let line = lines.next().ok_or_else(|| {
            let last = text.lines().count();
            Error::parse(last.max(1), 1, format!("expected {m} edges, found {i}"))
        })?;
        let (u, v) = tokens(line, "vertex index")?;
        let field = format!("edges[{i}]");
        if u >= n || v >= n {
            return Err(schema(&field, format!("edge {u} {v} leaves the vertex range 0..{n}")));
        }
        if u == v {
            return Err(schema(&field, format!("self-loop at {u}")));
        }
        if !g.add_edge(u, v)? {
            return Err(schema(&field, format!("duplicate edge {u} {v}")));
        }
    }
    if let Some((no, _)) = lines.next() {
        return Err(Error::parse(no + 1, 1, format!("unexpected content after {m} edges")));
    }
    Ok(g)
}

pub fn emit_graph(g: &IntersectionGraph) -> String {
    let mut out = format!("{} {}\n", g.vertex_count(), g.edge_count());
    for (u, v) in g.edges() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Parses `x0,y0,x1,y1` style integer lists.
pub fn parse_int_list(text: &str) -> Option<Vec<i64>> {
    text.split(',').map(|t| t.trim().parse().ok()).collect()
}

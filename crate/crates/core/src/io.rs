//! GML and GraphML readers, a GML writer, and the JSON shape used by the
//! viewer.

use std::collections::HashMap;
use std::fmt::Write as _;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;
use crate::graph::{Drawing, Graph, GraphError};

#[derive(Debug, Error, PartialEq)]
pub enum IoError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("node {node} has no coordinates")]
    MissingCoordinates { node: String },
    #[error("coordinates missing on nodes: {}", .nodes.join(", "))]
    PartialCoordinates { nodes: Vec<String> },
    #[error("xml: {0}")]
    Xml(String),
    #[error("input is not valid UTF-8")]
    Utf8,
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A parsed graph file. `original_ids[i]` is the file's id for vertex `i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Loaded {
    pub graph: Graph,
    pub drawing: Option<Drawing>,
    pub original_ids: Vec<String>,
    pub warnings: Vec<String>,
}

/// Reads GML or GraphML, going by the first non-blank byte.
pub fn read_any(bytes: &[u8]) -> Result<Loaded, IoError> {
    let first = bytes.iter().find(|b| !b.is_ascii_whitespace());
    if first == Some(&b'<') {
        read_graphml(bytes)
    } else {
        read_gml_graph(bytes)
    }
}

/// GML with a drawing: every node needs `graphics [ x .. y .. ]`.
pub fn read_gml(bytes: &[u8]) -> Result<(Graph, Drawing, Loaded), IoError> {
    let loaded = parse_gml(bytes, true)?;
    let drawing = loaded.drawing.clone().unwrap_or_default();
    Ok((loaded.graph.clone(), drawing, loaded))
}

/// GML where coordinates are optional (all or nothing).
pub fn read_gml_graph(bytes: &[u8]) -> Result<Loaded, IoError> {
    parse_gml(bytes, false)
}

// ---- GML lexer / tree ----

#[derive(Clone, Debug, PartialEq)]
enum Value {
    Int(i64),
    Real(f64),
    Str(String),
    List(Vec<Entry>),
}

#[derive(Clone, Debug, PartialEq)]
struct Entry {
    key: String,
    value: Value,
    line: usize,
}

#[derive(Debug, PartialEq)]
enum Tok {
    Key(String),
    Num(String),
    Str(String),
    Open,
    Close,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, IoError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let mut line = 1;
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                line += 1;
                chars.next();
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    chars.next();
                }
            }
            '[' => {
                chars.next();
                out.push((Tok::Open, line));
            }
            ']' => {
                chars.next();
                out.push((Tok::Close, line));
            }
            '"' => {
                let start = line;
                chars.next();
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => return Err(IoError::Parse { line: start, msg: "unterminated string".into() }),
                        Some('"') => break,
                        Some(c) => {
                            if c == '\n' {
                                line += 1;
                            }
                            s.push(c);
                        }
                    }
                }
                out.push((Tok::Str(unescape(&s)), start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || c == '_' {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Key(s), line));
            }
            c if c.is_ascii_digit() || matches!(c, '-' | '+' | '.') => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_ascii_alphanumeric() || matches!(c, '-' | '+' | '.') {
                        s.push(c);
                        chars.next();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Num(s), line));
            }
            c => return Err(IoError::Parse { line, msg: format!("unexpected character {c:?}") }),
        }
    }
    Ok(out)
}

fn parse_list(
    toks: &mut std::iter::Peekable<std::vec::IntoIter<(Tok, usize)>>,
    open_line: Option<usize>,
) -> Result<Vec<Entry>, IoError> {
    let mut entries = Vec::new();
    loop {
        let Some((tok, line)) = toks.next() else {
            return match open_line {
                Some(l) => Err(IoError::Parse { line: l, msg: "unclosed '['".into() }),
                None => Ok(entries),
            };
        };
        let key = match tok {
            Tok::Key(k) => k,
            Tok::Close if open_line.is_some() => return Ok(entries),
            Tok::Close => return Err(IoError::Parse { line, msg: "unmatched ']'".into() }),
            other => return Err(IoError::Parse { line, msg: format!("expected a key, found {other:?}") }),
        };
        let Some((tok, vline)) = toks.next() else {
            return Err(IoError::Parse { line, msg: format!("key {key} has no value") });
        };
        let value = match tok {
            Tok::Open => Value::List(parse_list(toks, Some(vline))?),
            Tok::Str(s) => Value::Str(s),
            Tok::Num(n) => {
                number(&n).ok_or_else(|| IoError::Parse { line: vline, msg: format!("bad number {n:?}") })?
            }
            other => return Err(IoError::Parse { line: vline, msg: format!("bad value {other:?} for {key}") }),
        };
        entries.push(Entry { key, value, line });
    }
}

fn number(s: &str) -> Option<Value> {
    if let Ok(i) = s.parse::<i64>() {
        return Some(Value::Int(i));
    }
    s.parse::<f64>().ok().filter(|f| f.is_finite()).map(Value::Real)
}

fn unescape(s: &str) -> String {
    s.replace("&quot;", "\"").replace("&lt;", "<").replace("&gt;", ">").replace("&amp;", "&")
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('"', "&quot;")
}

fn as_f64(v: &Value) -> Option<f64> {
    match *v {
        Value::Int(i) => Some(i as f64),
        Value::Real(f) => Some(f),
        _ => None,
    }
}

fn id_string(v: &Value) -> Option<String> {
    match v {
        Value::Int(i) => Some(i.to_string()),
        Value::Str(s) => Some(s.clone()),
        _ => None,
    }
}

fn parse_gml(bytes: &[u8], require_coords: bool) -> Result<Loaded, IoError> {
    let text = std::str::from_utf8(bytes).map_err(|_| IoError::Utf8)?;
    let toks = lex(text)?;
    let top = parse_list(&mut toks.into_iter().peekable(), None)?;
    let Some(graph) = top.iter().find(|e| e.key == "graph") else {
        return Err(IoError::Parse { line: 1, msg: "no graph block".into() });
    };
    let Value::List(body) = &graph.value else {
        return Err(IoError::Parse { line: graph.line, msg: "graph is not a list".into() });
    };

    let mut warnings = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids = Vec::new();
    let mut labels = Vec::new();
    let mut coords: Vec<Option<Point>> = Vec::new();
    let mut edges = Vec::new();
    let mut seen_edges = HashMap::new();

    for e in body {
        match (e.key.as_str(), &e.value) {
            ("directed", v) if as_f64(v) == Some(1.0) => {
                warnings.push(format!("line {}: directed graph read as undirected", e.line));
            }
            ("node", Value::List(fields)) => {
                let id = fields
                    .iter()
                    .find(|f| f.key == "id")
                    .and_then(|f| id_string(&f.value))
                    .ok_or_else(|| IoError::Parse { line: e.line, msg: "node without id".into() })?;
                if index.insert(id.clone(), ids.len()).is_some() {
                    return Err(IoError::Parse { line: e.line, msg: format!("duplicate node id {id}") });
                }
                let label = fields.iter().find(|f| f.key == "label").and_then(|f| match &f.value {
                    Value::Str(s) => Some(s.clone()),
                    _ => None,
                });
                let gfx = fields.iter().find_map(|f| match (&*f.key, &f.value) {
                    ("graphics", Value::List(g)) => Some(g),
                    _ => None,
                });
                let coord = |k: &str| gfx.and_then(|g| g.iter().find(|f| f.key == k)).and_then(|f| as_f64(&f.value));
                let p = match (coord("x"), coord("y")) {
                    (Some(x), Some(y)) => Some(Point::new(x, y)),
                    _ => None,
                };
                if p.is_none() && require_coords {
                    return Err(IoError::MissingCoordinates { node: id });
                }
                ids.push(id);
                labels.push(label);
                coords.push(p);
            }
            ("edge", Value::List(fields)) => {
                let end = |k: &str| {
                    fields
                        .iter()
                        .find(|f| f.key == k)
                        .and_then(|f| id_string(&f.value))
                        .ok_or_else(|| IoError::Parse { line: e.line, msg: format!("edge without {k}") })
                };
                edges.push((end("source")?, end("target")?, e.line));
            }
            ("node" | "edge", _) => {
                return Err(IoError::Parse { line: e.line, msg: format!("{} is not a list", e.key) })
            }
            _ => {}
        }
    }

    let mut pairs = Vec::with_capacity(edges.len());
    for (s, t, line) in edges {
        let lookup = |id: &str| {
            index
                .get(id)
                .copied()
                .ok_or_else(|| IoError::Parse { line, msg: format!("edge refers to unknown node {id}") })
        };
        let (u, v) = (lookup(&s)?, lookup(&t)?);
        if u == v {
            return Err(IoError::Parse { line, msg: format!("self-loop on node {s}") });
        }
        let key = (u.min(v), u.max(v));
        if let Some(first) = seen_edges.insert(key, line) {
            warnings.push(format!("line {line}: duplicate edge {s}-{t} (first on line {first}) ignored"));
            continue;
        }
        pairs.push(key);
    }

    let drawing = finish_coords(&ids, coords)?;
    let graph = Graph::new(ids.len(), pairs)?.with_labels(labels);
    Ok(Loaded { graph, drawing, original_ids: ids, warnings })
}

fn finish_coords(ids: &[String], coords: Vec<Option<Point>>) -> Result<Option<Drawing>, IoError> {
    let missing: Vec<String> = ids.iter().zip(&coords).filter(|(_, c)| c.is_none()).map(|(id, _)| id.clone()).collect();
    if missing.is_empty() {
        let d: Drawing = coords.into_iter().flatten().collect();
        if let Some(i) = d.positions().iter().position(|p| !p.is_finite()) {
            return Err(GraphError::NonFinite(i).into());
        }
        Ok(Some(d))
    } else if missing.len() == ids.len() {
        Ok(None)
    } else {
        Err(IoError::PartialCoordinates { nodes: missing })
    }
}

/// Shortest decimal that parses back to the same `f64`, always with a
/// decimal point.
fn real(f: f64) -> String {
    let s = format!("{f:?}");
    match s.find('e') {
        Some(i) if !s[..i].contains('.') => format!("{}.0{}", &s[..i], &s[i..]),
        _ => s,
    }
}

pub fn write_gml(graph: &Graph, drawing: &Drawing) -> Result<String, GraphError> {
    drawing.validate(graph)?;
    let mut out = String::from("graph [\n  directed 0\n");
    for v in 0..graph.vertex_count() {
        let p = drawing.position(v);
        let _ = writeln!(out, "  node [\n    id {v}");
        if let Some(l) = graph.label(v) {
            let _ = writeln!(out, "    label \"{}\"", escape(l));
        }
        let _ = writeln!(out, "    graphics [\n      x {}\n      y {}\n    ]\n  ]", real(p.x), real(p.y));
    }
    for &(u, v) in graph.edges() {
        let _ = writeln!(out, "  edge [\n    source {u}\n    target {v}\n  ]");
    }
    out.push_str("]\n");
    Ok(out)
}

// ---- GraphML ----

fn attr(e: &BytesStart, name: &[u8]) -> Result<Option<String>, IoError> {
    for a in e.attributes() {
        let a = a.map_err(|err| IoError::Xml(err.to_string()))?;
        if a.key.local_name().as_ref() == name {
            let v = a.unescape_value().map_err(|err| IoError::Xml(err.to_string()))?;
            return Ok(Some(v.into_owned()));
        }
    }
    Ok(None)
}

#[derive(Clone, Copy, PartialEq)]
enum Field {
    X,
    Y,
    Label,
}

pub fn read_graphml(bytes: &[u8]) -> Result<Loaded, IoError> {
    let mut reader = Reader::from_reader(bytes);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();

    let mut keys: HashMap<String, Field> = HashMap::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut ids: Vec<String> = Vec::new();
    let mut xs: Vec<Option<f64>> = Vec::new();
    let mut ys: Vec<Option<f64>> = Vec::new();
    let mut labels: Vec<Option<String>> = Vec::new();
    let mut raw_edges: Vec<(String, String)> = Vec::new();
    let mut current_node: Option<usize> = None;
    let mut current_data: Option<Field> = None;
    let mut saw_root = false;
    let mut warnings = Vec::new();

    loop {
        let ev = reader
            .read_event_into(&mut buf)
            .map_err(|e| IoError::Xml(format!("at byte {}: {e}", reader.buffer_position())))?;
        match ev {
            Event::Eof => break,
            Event::Start(ref e) | Event::Empty(ref e) => {
                let empty = matches!(ev, Event::Empty(_));
                match e.local_name().as_ref() {
                    b"graphml" => saw_root = true,
                    b"key" => {
                        let for_ok = matches!(attr(e, b"for")?.as_deref(), None | Some("node") | Some("all"));
                        let name = attr(e, b"attr.name")?.unwrap_or_default().to_ascii_lowercase();
                        let field = match name.as_str() {
                            "x" => Some(Field::X),
                            "y" => Some(Field::Y),
                            "label" | "name" => Some(Field::Label),
                            _ => None,
                        };
                        if let (true, Some(f), Some(id)) = (for_ok, field, attr(e, b"id")?) {
                            keys.insert(id, f);
                        }
                    }
                    b"node" => {
                        let id = attr(e, b"id")?.ok_or_else(|| IoError::Xml("node without id".into()))?;
                        if index.insert(id.clone(), ids.len()).is_some() {
                            return Err(IoError::Xml(format!("duplicate node id {id}")));
                        }
                        ids.push(id);
                        xs.push(None);
                        ys.push(None);
                        labels.push(None);
                        if !empty {
                            current_node = Some(ids.len() - 1);
                        }
                    }
                    b"edge" => {
                        let s = attr(e, b"source")?.ok_or_else(|| IoError::Xml("edge without source".into()))?;
                        let t = attr(e, b"target")?.ok_or_else(|| IoError::Xml("edge without target".into()))?;
                        raw_edges.push((s, t));
                    }
                    b"data" if current_node.is_some() && !empty => {
                        current_data = attr(e, b"key")?.and_then(|k| keys.get(&k).copied());
                    }
                    _ => {}
                }
            }
            Event::Text(t) => {
                if let (Some(v), Some(f)) = (current_node, current_data) {
                    let text = t.unescape().map_err(|e| IoError::Xml(e.to_string()))?;
                    let text = text.trim();
                    let num = || {
                        text.parse::<f64>()
                            .map_err(|_| IoError::Xml(format!("node {}: bad coordinate {text:?}", ids[v])))
                    };
                    match f {
                        Field::X => xs[v] = Some(num()?),
                        Field::Y => ys[v] = Some(num()?),
                        Field::Label => labels[v] = Some(text.to_string()),
                    }
                }
            }
            Event::End(e) => match e.local_name().as_ref() {
                b"node" => current_node = None,
                b"data" => current_data = None,
                _ => {}
            },
            _ => {}
        }
        buf.clear();
    }
    if !saw_root {
        return Err(IoError::Xml("no <graphml> element".into()));
    }

    let mut pairs = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for (s, t) in raw_edges {
        let lookup =
            |id: &str| index.get(id).copied().ok_or_else(|| IoError::Xml(format!("edge refers to unknown node {id}")));
        let (u, v) = (lookup(&s)?, lookup(&t)?);
        if u == v {
            return Err(IoError::Xml(format!("self-loop on node {s}")));
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            warnings.push(format!("duplicate edge {s}-{t} ignored"));
            continue;
        }
        pairs.push(key);
    }
    let coords = xs
        .into_iter()
        .zip(ys)
        .map(|(x, y)| match (x, y) {
            (Some(x), Some(y)) => Some(Point::new(x, y)),
            _ => None,
        })
        .collect();
    let drawing = finish_coords(&ids, coords)?;
    let graph = Graph::new(ids.len(), pairs)?.with_labels(labels);
    Ok(Loaded { graph, drawing, original_ids: ids, warnings })
}

// ---- JSON ----

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonVertex {
    pub id: usize,
    pub x: f64,
    pub y: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

/// `{"vertices":[{"id":0,"x":..,"y":..}],"edges":[[0,1],..]}`
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<JsonVertex>,
    pub edges: Vec<[usize; 2]>,
}

impl GraphJson {
    pub fn new(graph: &Graph, drawing: &Drawing) -> Self {
        let vertices = (0..graph.vertex_count())
            .map(|v| {
                let p = drawing.position(v);
                JsonVertex { id: v, x: p.x, y: p.y, label: graph.label(v).map(str::to_string) }
            })
            .collect();
        let edges = graph.edges().iter().map(|&(u, v)| [u, v]).collect();
        Self { vertices, edges }
    }

    /// Vertex ids must be exactly `0..n` in some order.
    pub fn into_parts(self) -> Result<(Graph, Drawing), GraphError> {
        let n = self.vertices.len();
        let mut pos = vec![None; n];
        let mut labels = vec![None; n];
        for v in self.vertices {
            if v.id >= n {
                return Err(GraphError::MissingPosition(v.id.min(n)));
            }
            pos[v.id] = Some(Point::new(v.x, v.y));
            labels[v.id] = v.label;
        }
        if let Some(i) = pos.iter().position(Option::is_none) {
            return Err(GraphError::MissingPosition(i));
        }
        let graph = Graph::new(n, self.edges.iter().map(|e| (e[0], e[1])))?.with_labels(labels);
        let drawing: Drawing = pos.into_iter().flatten().collect();
        drawing.validate(&graph)?;
        Ok((graph, drawing))
    }
}

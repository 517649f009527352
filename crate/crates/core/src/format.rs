//! Text formats: graph6 and a plain edge list.
//!
//! The edge list is one `u v` pair of 0-based ids per line; `#` starts a
//! comment. The vertex count is one more than the largest id unless a
//! `# n=<count>` comment says otherwise, which [`emit_graph`] writes only
//! when the edges alone would lose trailing isolated vertices.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::GraphError;
use crate::graph::Graph;

const GRAPH6_HEADER: &str = ">>graph6<<";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Graph6,
    EdgeList,
}

impl Format {
    /// Guesses the format from a file extension: `.g6` is graph6, `.edges`,
    /// `.el` and `.txt` are edge lists.
    pub fn sniff(path: &Path) -> Option<Format> {
        match path.extension()?.to_str()? {
            "g6" | "graph6" => Some(Format::Graph6),
            "edges" | "el" | "txt" => Some(Format::EdgeList),
            _ => None,
        }
    }
}

impl std::str::FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "graph6" | "g6" => Ok(Format::Graph6),
            "edge_list" | "edges" | "edge-list" => Ok(Format::EdgeList),
            other => Err(format!("unknown format {other:?}")),
        }
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        reason: reason.into(),
    }
}

/// Parses exactly one graph.
pub fn parse_graph(text: &[u8], format: Format) -> Result<Graph, GraphError> {
    match format {
        Format::Graph6 => {
            let mut graphs = parse_graphs(text, format)?;
            match graphs.len() {
                1 => Ok(graphs.pop().unwrap()),
                0 => Err(parse_err(1, "no graph6 record")),
                k => Err(parse_err(2, format!("expected one graph6 record, found {k}"))),
            }
        }
        Format::EdgeList => parse_edge_list(text),
    }
}

/// Parses a corpus. For graph6 that is one graph per non-empty line; an
/// edge list always holds a single graph.
pub fn parse_graphs(text: &[u8], format: Format) -> Result<Vec<Graph>, GraphError> {
    match format {
        Format::EdgeList => Ok(vec![parse_edge_list(text)?]),
        Format::Graph6 => {
            let text = std::str::from_utf8(text).map_err(|_| parse_err(1, "not valid UTF-8"))?;
            let mut out = Vec::new();
            for (i, line) in text.lines().enumerate() {
                let line = line.trim();
                let line = line.strip_prefix(GRAPH6_HEADER).unwrap_or(line);
                if line.is_empty() {
                    continue;
                }
                out.push(decode_graph6(line.as_bytes()).map_err(|reason| parse_err(i + 1, reason))?);
            }
            Ok(out)
        }
    }
}

pub fn emit_graph(g: &Graph, format: Format) -> Vec<u8> {
    match format {
        Format::Graph6 => {
            let mut s = to_graph6(g).into_bytes();
            s.push(b'\n');
            s
        }
        Format::EdgeList => emit_edge_list(g).into_bytes(),
    }
}

/// graph6 string without the trailing newline.
pub fn to_graph6(g: &Graph) -> String {
    let n = g.n();
    let mut out: Vec<u8> = Vec::new();
    if n <= 62 {
        out.push(n as u8 + 63);
    } else if n <= 258_047 {
        out.push(126);
        for shift in [12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        out.push(126);
        out.push(126);
        for shift in [30, 24, 18, 12, 6, 0] {
            out.push(((n >> shift) & 63) as u8 + 63);
        }
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for j in 1..n {
        for i in 0..j {
            acc = (acc << 1) | g.has_edge(i, j) as u8;
            filled += 1;
            if filled == 6 {
                out.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        out.push((acc << (6 - filled)) + 63);
    }
    String::from_utf8(out).expect("graph6 bytes are printable ASCII")
}

fn decode_graph6(bytes: &[u8]) -> Result<Graph, String> {
    if let Some(&b) = bytes.iter().find(|&&b| !(63..=126).contains(&b)) {
        return Err(format!("byte {b:#04x} outside the graph6 range"));
    }
    let (n, rest) = match bytes {
        [] => return Err("empty record".into()),
        [126, 126, tail @ ..] => {
            if tail.len() < 6 {
                return Err("truncated 36-bit size header".into());
            }
            let n = tail[..6].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
            (n, &tail[6..])
        }
        [126, tail @ ..] => {
            if tail.len() < 3 {
                return Err("truncated 18-bit size header".into());
            }
            let n = tail[..3].iter().fold(0usize, |acc, &b| (acc << 6) | (b - 63) as usize);
            (n, &tail[3..])
        }
        [b, tail @ ..] => ((b - 63) as usize, tail),
    };
    let bits = n * n.saturating_sub(1) / 2;
    let need = bits.div_ceil(6);
    if rest.len() != need {
        return Err(format!("expected {need} adjacency bytes for n={n}, found {}", rest.len()));
    }
    let mut edges = Vec::new();
    let mut k = 0;
    for j in 1..n {
        for i in 0..j {
            let byte = rest[k / 6] - 63;
            if (byte >> (5 - k % 6)) & 1 == 1 {
                edges.push((i, j));
            }
            k += 1;
        }
    }
    if k % 6 != 0 {
        let pad = (rest[k / 6] - 63) & ((1 << (6 - k % 6)) - 1);
        if pad != 0 {
            return Err("nonzero padding bits".into());
        }
    }
    Graph::from_edges(n, &edges).map_err(|e| e.to_string())
}

fn parse_pragma(comment: &str) -> Option<usize> {
    let body = comment.trim();
    let value = body.strip_prefix('n')?.trim_start().strip_prefix('=')?;
    value.trim().parse().ok()
}

fn parse_edge_list(text: &[u8]) -> Result<Graph, GraphError> {
    let text = std::str::from_utf8(text).map_err(|_| parse_err(1, "not valid UTF-8"))?;
    let mut declared = None;
    let mut edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        let (body, comment) = match raw.split_once('#') {
            Some((b, c)) => (b, Some(c)),
            None => (raw, None),
        };
        if let Some(n) = comment.and_then(parse_pragma) {
            declared = Some(n);
        }
        let mut tokens = body.split_whitespace();
        let Some(a) = tokens.next() else { continue };
        let b = tokens
            .next()
            .ok_or_else(|| parse_err(lineno, "expected two vertex ids"))?;
        if tokens.next().is_some() {
            return Err(parse_err(lineno, "trailing tokens after the edge"));
        }
        let u: usize = a.parse().map_err(|_| parse_err(lineno, format!("bad vertex id {a:?}")))?;
        let v: usize = b.parse().map_err(|_| parse_err(lineno, format!("bad vertex id {b:?}")))?;
        edges.push((u, v));
    }
    let implied = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(implied);
    Graph::from_edges(n, &edges)
}

fn emit_edge_list(g: &Graph) -> String {
    let edges = g.edge_list();
    let implied = edges.iter().map(|&(_, v)| v + 1).max().unwrap_or(0);
    let mut out = String::new();
    if implied != g.n() {
        out.push_str(&format!("# n={}\n", g.n()));
    }
    for (u, v) in edges {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// Graph with arbitrary integer ids, self-loops and parallel edges, as read
/// by the lenient parser.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawMultigraph {
    pub n: usize,
    /// Dense edges, loops and repeats kept.
    pub edges: Vec<(usize, usize)>,
    /// `original_ids[dense] = id as written in the input`.
    pub original_ids: Vec<i64>,
}

/// Lenient edge-list parse: ids may be sparse, negative or 1-based and are
/// remapped densely in increasing order; self-loops and repeated edges are
/// kept for [`crate::engine::preprocess_multigraph`].
pub fn parse_multigraph(text: &[u8]) -> Result<RawMultigraph, GraphError> {
    let text = std::str::from_utf8(text).map_err(|_| parse_err(1, "not valid UTF-8"))?;
    let mut raw_edges = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let body = raw.split('#').next().unwrap_or("");
        let toks: Vec<&str> = body.split_whitespace().collect();
        match toks.as_slice() {
            [] => continue,
            [a, b] => {
                let u: i64 = a.parse().map_err(|_| parse_err(i + 1, format!("bad vertex id {a:?}")))?;
                let v: i64 = b.parse().map_err(|_| parse_err(i + 1, format!("bad vertex id {b:?}")))?;
                raw_edges.push((u, v));
            }
            _ => return Err(parse_err(i + 1, "expected two vertex ids")),
        }
    }
    let mut ids: Vec<i64> = raw_edges.iter().flat_map(|&(u, v)| [u, v]).collect();
    ids.sort_unstable();
    ids.dedup();
    let index = |x: i64| ids.binary_search(&x).unwrap();
    let edges = raw_edges.iter().map(|&(u, v)| (index(u), index(v))).collect();
    Ok(RawMultigraph {
        n: ids.len(),
        edges,
        original_ids: ids,
    })
}

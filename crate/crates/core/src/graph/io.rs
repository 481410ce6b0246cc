//! Plain-text edge lists.
//!
//! ```text
//! v <vertex count> d <degree, 0 when irregular> family <Family display form>
//! u v
//! ...
//! ```
//! Vertices are 0-indexed, each edge appears once with `u < v`, and edges
//! are sorted ascending.

use std::io::{BufRead, Write};

use super::{Family, Graph, Vertex};
use crate::error::{Error, Result};

pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> Result<()> {
    writeln!(
        out,
        "v {} d {} family {}",
        graph.vertex_count(),
        graph.degree().unwrap_or(0),
        graph.family()
    )?;
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph> {
    let mut lines = input.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let header = header?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 6 || fields[0] != "v" || fields[2] != "d" || fields[4] != "family" {
        return Err(Error::Parse {
            line: 1,
            msg: format!("expected 'v <n> d <deg> family <name>', got '{header}'"),
        });
    }
    let parse_num = |s: &str| {
        s.parse::<usize>().map_err(|_| Error::Parse { line: 1, msg: format!("bad number '{s}'") })
    };
    let n = parse_num(fields[1])?;
    let deg = parse_num(fields[3])?;
    let family = Family::parse(fields[5]).map_err(|e| Error::Parse { line: 1, msg: e.to_string() })?;

    let mut edges = Vec::new();
    for (idx, line) in lines {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let bad = || Error::Parse { line: idx + 1, msg: format!("expected 'u v', got '{line}'") };
        let mut it = line.split_whitespace();
        let u: Vertex = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        let v: Vertex = it.next().and_then(|s| s.parse().ok()).ok_or_else(bad)?;
        if it.next().is_some() {
            return Err(bad());
        }
        edges.push((u, v));
    }
    let g = Graph::from_edges(n, &edges, family)?;
    if g.degree().unwrap_or(0) != deg {
        return Err(Error::Parse {
            line: 1,
            msg: format!("header degree {deg} does not match edges ({:?})", g.degree()),
        });
    }
    Ok(g)
}

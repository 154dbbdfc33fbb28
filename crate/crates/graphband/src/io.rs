//! Edge-list files and persisted subgraph pools.
//!
//! A pool directory holds `index.txt`, one `<file> <node count>` line per
//! member, and one file of directed `u v` pairs per member graph. Self-loops
//! are implicit and not written.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use graphband_core::graph::{FeedbackGraph, UndirectedEdgeList};

use crate::error::io_err;
use crate::{Error, Result};

pub const POOL_INDEX: &str = "index.txt";

fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_pair(path: &Path, line: usize, text: &str) -> Result<(u64, u64)> {
    let bad = |message: String| Error::Parse { path: path.to_owned(), line, message };
    let mut fields = text.split_whitespace();
    let mut next = || -> Result<u64> {
        let f = fields.next().ok_or_else(|| bad(format!("expected two node ids, got {text:?}")))?;
        f.parse().map_err(|_| bad(format!("invalid node id {f:?}")))
    };
    let pair = (next()?, next()?);
    match fields.next() {
        Some(extra) => Err(bad(format!("unexpected trailing field {extra:?}"))),
        None => Ok(pair),
    }
}

pub fn parse_edge_list(path: &Path, text: &str) -> Result<UndirectedEdgeList> {
    let pairs = data_lines(text).map(|(n, l)| parse_pair(path, n, l)).collect::<Result<Vec<_>>>()?;
    Ok(UndirectedEdgeList::from_raw_pairs(pairs)?)
}

/// Reads whitespace-separated `u v` lines; `#` starts a comment line.
pub fn load_edge_list(path: impl AsRef<Path>) -> Result<UndirectedEdgeList> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    parse_edge_list(path, &text)
}

fn member_file(i: usize) -> String {
    format!("subgraph_{i:03}.txt")
}

pub fn save_pool(dir: impl AsRef<Path>, pool: &[FeedbackGraph]) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut index = String::new();
    for (i, g) in pool.iter().enumerate() {
        let name = member_file(i);
        let mut body = String::new();
        for (u, v) in g.edges() {
            writeln!(body, "{u} {v}").unwrap();
        }
        let path = dir.join(&name);
        fs::write(&path, body).map_err(io_err(path))?;
        writeln!(index, "{name} {}", g.node_count()).unwrap();
    }
    let path = dir.join(POOL_INDEX);
    fs::write(&path, index).map_err(io_err(path))
}

pub fn load_pool(dir: impl AsRef<Path>) -> Result<Vec<FeedbackGraph>> {
    let dir = dir.as_ref();
    let index_path = dir.join(POOL_INDEX);
    let index = fs::read_to_string(&index_path).map_err(io_err(&index_path))?;
    let mut pool = Vec::new();
    for (line, text) in data_lines(&index) {
        let bad = |message: String| Error::Parse { path: index_path.clone(), line, message };
        let (name, n) = match text.split_whitespace().collect::<Vec<_>>()[..] {
            [name, n] => (name, n.parse::<usize>().map_err(|_| bad(format!("invalid node count {n:?}")))?),
            _ => return Err(bad(format!("expected `<file> <node count>`, got {text:?}"))),
        };
        let path = dir.join(name);
        let body = fs::read_to_string(&path).map_err(io_err(&path))?;
        let mut edges = Vec::new();
        for (l, t) in data_lines(&body) {
            let (u, v) = parse_pair(&path, l, t)?;
            if u >= n as u64 || v >= n as u64 {
                return Err(Error::Parse { path: path.clone(), line: l, message: format!("node id out of range for {n} nodes") });
            }
            edges.push((u as usize, v as usize));
        }
        pool.push(FeedbackGraph::from_directed_edges(n, edges)?);
    }
    if pool.is_empty() {
        return Err(Error::Parse { path: index_path, line: 0, message: "pool index lists no graphs".into() });
    }
    Ok(pool)
}

//! KONECT bipartite edge lists: `%` comment lines, then `u v [weight [time]]`
//! with 1-based indices counted separately on each side.

use std::io::BufRead;

use super::{parse_error, InstanceMeta, IoError, Source};
use crate::bipgraph::BipartiteGraph;

/// Parses an edge list. Multi-edges collapse, extra columns are ignored, and
/// the side sizes are the largest indices seen.
pub fn parse_konect<R: BufRead>(
    reader: R,
    name: &str,
) -> Result<(BipartiteGraph, InstanceMeta), IoError> {
    let mut edges = Vec::new();
    let (mut n_u, mut n_v) = (0usize, 0usize);
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let u = endpoint(fields.next(), lineno)?;
        let v = endpoint(fields.next(), lineno)?;
        n_u = n_u.max(u);
        n_v = n_v.max(v);
        edges.push((u - 1, v - 1));
    }
    let g = BipartiteGraph::new(n_u, n_v, edges)?;
    let meta = InstanceMeta::describe(&g, name, Source::File);
    Ok((g, meta))
}

fn endpoint(field: Option<&str>, line: usize) -> Result<usize, IoError> {
    let field = field.ok_or_else(|| parse_error(line, "expected two vertex indices"))?;
    match field.parse::<usize>() {
        Ok(0) => Err(parse_error(line, "vertex indices are 1-based; found 0")),
        Ok(i) => Ok(i),
        Err(_) => Err(parse_error(line, format!("`{field}` is not a positive integer"))),
    }
}

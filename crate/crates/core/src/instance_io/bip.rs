//! Native `.bip` format:
//!
//! ```text
//! c optional comments
//! p bip <nU> <nV> <m>
//! e <u> <v>        (m lines, 1-based within each side)
//! ```

use std::io::{BufRead, Write};

use super::{parse_error, InstanceMeta, IoError, Source};
use crate::bipgraph::BipartiteGraph;

pub fn parse_bip<R: BufRead>(
    reader: R,
    name: &str,
) -> Result<(BipartiteGraph, InstanceMeta), IoError> {
    let mut header: Option<(usize, usize, usize)> = None;
    let mut edges = Vec::new();
    let mut last_line = 0;
    for (k, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = k + 1;
        last_line = lineno;
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields.first().copied() {
            None | Some("c") => {}
            Some("p") => {
                if header.is_some() {
                    return Err(parse_error(lineno, "duplicate header"));
                }
                if fields.len() != 5 || fields[1] != "bip" {
                    return Err(parse_error(lineno, "expected `p bip <nU> <nV> <m>`"));
                }
                let n_u = number(fields[2], lineno)?;
                let n_v = number(fields[3], lineno)?;
                let m = number(fields[4], lineno)?;
                header = Some((n_u, n_v, m));
            }
            Some("e") => {
                let (n_u, n_v, _) =
                    header.ok_or_else(|| parse_error(lineno, "edge before header"))?;
                if fields.len() != 3 {
                    return Err(parse_error(lineno, "expected `e <u> <v>`"));
                }
                let u = number(fields[1], lineno)?;
                let v = number(fields[2], lineno)?;
                if u == 0 || u > n_u || v == 0 || v > n_v {
                    return Err(parse_error(
                        lineno,
                        format!("edge ({u}, {v}) outside 1..={n_u} x 1..={n_v}"),
                    ));
                }
                edges.push((u - 1, v - 1));
            }
            Some(other) => {
                return Err(parse_error(lineno, format!("unknown line type `{other}`")));
            }
        }
    }
    let (n_u, n_v, m) = header.ok_or_else(|| parse_error(last_line.max(1), "missing header"))?;
    if edges.len() != m {
        return Err(parse_error(
            last_line.max(1),
            format!("header announces {m} edges, found {}", edges.len()),
        ));
    }
    let g = BipartiteGraph::new(n_u, n_v, edges)?;
    let meta = InstanceMeta::describe(&g, name, Source::File);
    Ok((g, meta))
}

fn number(field: &str, line: usize) -> Result<usize, IoError> {
    field
        .parse()
        .map_err(|_| parse_error(line, format!("`{field}` is not a non-negative integer")))
}

/// Writes the alive part of `g`, keeping every vertex id.
pub fn write_bip<W: Write>(g: &BipartiteGraph, mut out: W) -> std::io::Result<()> {
    writeln!(out, "p bip {} {} {}", g.n_u(), g.n_v(), g.alive_edge_count())?;
    for i in 0..g.n_u() {
        let u = g.u(i);
        if !g.is_alive(u) {
            continue;
        }
        for &w in g.adjacency(u) {
            if g.is_alive(w) {
                writeln!(out, "e {} {}", i + 1, g.local_index(w) + 1)?;
            }
        }
    }
    out.flush()
}

//! Binary program for the problem in CPLEX LP format:
//!
//! ```text
//! max  sum_{i in U} x_i
//! s.t. x_i + x_j <= 1       for every non-adjacent pair (i, j) in U x V
//!      sum_U x_i - sum_V x_j = 0
//!      x binary
//! ```
//!
//! Variables are `xU_<i>` and `xV_<j>`, 1-based within each side. Only alive
//! vertices get variables, so a peeled graph exports its residual program.

use std::io::Write;

use serde::{Deserialize, Serialize};

use super::IoError;
use crate::bipgraph::{BipartiteGraph, Side, VertexId};

/// Largest number of non-edge constraints written by [`export_lp`].
pub const DEFAULT_LP_CAP: u128 = 10_000_000;

const TERMS_PER_LINE: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LpSummary {
    pub variables: usize,
    pub pairwise_constraints: u128,
    pub equalities: usize,
}

pub fn export_lp<W: Write>(g: &BipartiteGraph, out: W) -> Result<LpSummary, IoError> {
    export_lp_with_cap(g, out, DEFAULT_LP_CAP)
}

pub fn export_lp_with_cap<W: Write>(
    g: &BipartiteGraph,
    mut out: W,
    cap: u128,
) -> Result<LpSummary, IoError> {
    let us: Vec<VertexId> = alive_side(g, Side::U);
    let vs: Vec<VertexId> = alive_side(g, Side::V);
    let complement = us.len() as u128 * vs.len() as u128 - g.alive_edge_count() as u128;
    if complement > cap {
        return Err(IoError::LpTooLarge { complement, cap });
    }
    let name = |v: VertexId| match g.side(v) {
        Side::U => format!("xU_{}", g.local_index(v) + 1),
        Side::V => format!("xV_{}", g.local_index(v) + 1),
    };

    writeln!(out, "\\ maximum balanced biclique")?;
    writeln!(out, "Maximize")?;
    write!(out, " obj:")?;
    if us.is_empty() {
        write!(out, " 0")?;
    }
    write_terms(&mut out, us.iter().map(|&u| (true, name(u))))?;

    writeln!(out, "Subject To")?;
    let mut k = 0u64;
    for &u in &us {
        let nu = name(u);
        for &v in &vs {
            if !g.has_edge(u, v) {
                k += 1;
                writeln!(out, " n{k}: {nu} + {} <= 1", name(v))?;
            }
        }
    }
    let equalities = usize::from(!(us.is_empty() && vs.is_empty()));
    if equalities == 1 {
        write!(out, " balance:")?;
        let terms = us
            .iter()
            .map(|&u| (true, name(u)))
            .chain(vs.iter().map(|&v| (false, name(v))));
        write_terms_inline(&mut out, terms)?;
        writeln!(out, " = 0")?;
    }

    writeln!(out, "Binary")?;
    for chunk in us.iter().chain(vs.iter()).collect::<Vec<_>>().chunks(TERMS_PER_LINE) {
        let names: Vec<String> = chunk.iter().map(|&&v| name(v)).collect();
        writeln!(out, " {}", names.join(" "))?;
    }
    writeln!(out, "End")?;
    out.flush()?;
    Ok(LpSummary {
        variables: us.len() + vs.len(),
        pairwise_constraints: complement,
        equalities,
    })
}

fn alive_side(g: &BipartiteGraph, side: Side) -> Vec<VertexId> {
    let ids: Vec<VertexId> = match side {
        Side::U => (0..g.n_u()).map(|i| g.u(i)).collect(),
        Side::V => (0..g.n_v()).map(|j| g.v(j)).collect(),
    };
    ids.into_iter().filter(|&v| g.is_alive(v)).collect()
}

fn write_terms<W: Write>(
    out: &mut W,
    terms: impl Iterator<Item = (bool, String)>,
) -> std::io::Result<()> {
    write_terms_inline(out, terms)?;
    writeln!(out)
}

/// Signed sum, wrapped so that no line grows too long for LP readers.
fn write_terms_inline<W: Write>(
    out: &mut W,
    terms: impl Iterator<Item = (bool, String)>,
) -> std::io::Result<()> {
    for (k, (positive, term)) in terms.enumerate() {
        if k > 0 && k % TERMS_PER_LINE == 0 {
            write!(out, "\n   ")?;
        }
        match (k, positive) {
            (0, true) => write!(out, " {term}")?,
            (_, true) => write!(out, " + {term}")?,
            (_, false) => write!(out, " - {term}")?,
        }
    }
    Ok(())
}

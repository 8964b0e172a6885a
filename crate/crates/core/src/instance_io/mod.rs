//! Reading, writing, generating and downloading instances.

mod bip;
mod fetch;
mod generate;
mod konect;
mod lp;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bipgraph::{BipartiteGraph, GraphError};

pub use bip::{parse_bip, write_bip};
pub use fetch::{fetch_konect, known_datasets, Fetcher, KONECT_BASE_URL};
pub use generate::{gen_random, generated_instance};
pub use konect::parse_konect;
pub use lp::{export_lp, export_lp_with_cap, LpSummary, DEFAULT_LP_CAP};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    Generated,
    File,
    Fetched,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceMeta {
    pub name: String,
    pub n_u: usize,
    pub n_v: usize,
    /// Distinct edges.
    pub edge_count: usize,
    pub source: Source,
}

impl InstanceMeta {
    pub fn describe(g: &BipartiteGraph, name: impl Into<String>, source: Source) -> Self {
        InstanceMeta {
            name: name.into(),
            n_u: g.n_u(),
            n_v: g.n_v(),
            edge_count: g.edge_count(),
            source,
        }
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("complement has {complement} non-edges, above the cap of {cap}")]
    LpTooLarge { complement: u128, cap: u128 },
    #[error("unknown dataset `{name}`; known datasets: {known}")]
    UnknownDataset { name: String, known: String },
    #[error("download failed: {0}")]
    Fetch(String),
    #[error("archive for `{0}` contains no out.* edge list")]
    MissingEdgeList(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn parse_error(line: usize, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

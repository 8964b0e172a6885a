//! Maximum balanced biclique search on bipartite graphs.
//!
//! The solver alternates random construction and a constraint-based tabu
//! search over bicliques whose sides differ by at most two vertices. The best
//! size found so far drives two reductions: peeling low-degree vertices and
//! solving small components exactly. When one side of the residual graph is
//! no larger than the incumbent, the incumbent is optimal.
//!
//! ```
//! use mbbp::{solve, BipartiteGraph, SolverParams};
//!
//! // K_{3,3} minus one edge
//! let edges = (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).filter(|&e| e != (2, 2));
//! let g = BipartiteGraph::new(3, 3, edges).unwrap();
//! let report = solve(&g, &SolverParams::default()).unwrap();
//! assert_eq!(report.omega, 2);
//! assert!(report.proven_optimal);
//! ```

pub mod bipgraph;
pub mod cbts;
pub mod exact;
pub mod harness;
pub mod instance_io;
pub mod reduce;
pub mod solution;
pub mod solver;

pub use bipgraph::{BipartiteGraph, GraphError, Side, VertexId};
pub use cbts::{cbts_improve, tabu_tenure, SearchError, SearchState, TabuParams, UnbalanceVariant};
pub use exact::{exact_search, exact_search_with, ExactError, ExactOptions, ExactOutcome};
pub use harness::{
    run_campaign, run_variants, CampaignConfig, CampaignReport, Emit, FileFormat, InstanceEntry,
    InstanceReport, InstanceSpec, Study,
};
pub use instance_io::{
    export_lp, fetch_konect, gen_random, parse_bip, parse_konect, write_bip, InstanceMeta,
    IoError,
};
pub use reduce::{peel, reduce_by_exact, ExactReduction};
pub use solution::{
    balance_deviation, balanced_size, is_biclique, make_balance, Biclique, BicliqueError,
};
pub use solver::{
    random_init_solution, solve, ReductionVariant, RunReport, SolveError, SolverParams,
};

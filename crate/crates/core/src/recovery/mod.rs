//! Value recovery given a support: the lifted program, its noise-aware
//! variant, the exact path through the collision graph `H(U)`, rank-one
//! extraction, the full pipelines, and the Fienup baseline.

mod completion;
mod fienup;
mod graph;
mod lifted;
mod pipeline;
mod rank_one;
mod sdp;

pub use completion::complete_diagonal;
pub use fienup::{sparse_fienup, FienupParams, FienupResult};
pub use graph::{collision_graph, direct_applicable, direct_solve, entries_from_edges, SupportGraph};
pub use lifted::LiftedMatrix;
pub use pipeline::{recover_on_support, relative_residual, tspr, tspr_noisy, NoisyOptions, TsprOptions};
pub use rank_one::{leading_eigenpair, rank_one_approx};
pub use sdp::{
    solve_sdp_equality, solve_sdp_equality_report, solve_sdp_noisy, solve_sdp_noisy_report, SdpMethod, SdpSettings,
    SolveReport,
};

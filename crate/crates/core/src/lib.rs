//! Lower-tail variational problems for subgraph densities in random graphs.
//!
//! The crate evaluates homomorphism densities of step graphons exactly,
//! provides the entropy costs `I_p` and `h`, checks tangent-line conditions
//! that certify the constant graphon as the unique minimizer, searches the
//! two-block family `BIP_{a,b}` for symmetry-breaking witnesses, traces the
//! resulting phase boundaries, and cross-checks everything against a
//! discretized constrained solver and Monte-Carlo samples of `G(n, p)`.
//!
//! ```
//! use lowertail::{density, Graph, StepGraphon};
//!
//! let triangle = Graph::complete(3)?;
//! let w = StepGraphon::bip(0.2, 0.4)?;
//! // ¼a³ + ¾ab²
//! assert!((density(&triangle, &w)? - 0.026).abs() < 1e-15);
//! # Ok::<(), lowertail::Error>(())
//! ```

pub mod breaking;
pub mod empirics;
pub mod entropy;
pub mod error;
pub mod graph;
pub mod kernel;
pub mod numeric;
pub mod oracle;
pub mod phase;
pub mod symcheck;

pub use breaking::{bip_gap, bip_gap_sparse, find_breaking, find_breaking_sparse, BreakingWitness};
pub use empirics::{lower_tail_estimate, sample_subgraph_density, TailEstimate};
pub use entropy::{relative_entropy, sparse_entropy, Entropy, Order};
pub use error::{Error, Result};
pub use graph::{graph_library, Graph};
pub use kernel::{density, functional_derivative, StepGraphon, StepKernel};
pub use oracle::{solve_lt, OracleSolution, SolverOptions};
pub use phase::{lower_q_curve, r_m, sparse_constants, upper_q_curve, ut_boundary_k3};
pub use symcheck::{
    lt_h_general_certificate, lt_h_k3_certificate, lt_k3_certificate, tangent_gap,
    ut_k3_certificate, Certificate, GapKind, Verdict,
};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/densities.md")]
    mod densities {}
    #[doc = include_str!("../../../book/src/entropy.md")]
    mod entropy {}
    #[doc = include_str!("../../../book/src/certificates.md")]
    mod certificates {}
    #[doc = include_str!("../../../book/src/breaking.md")]
    mod breaking {}
    #[doc = include_str!("../../../book/src/phase.md")]
    mod phase {}
    #[doc = include_str!("../../../book/src/oracle.md")]
    mod oracle {}
    #[doc = include_str!("../../../book/src/empirics.md")]
    mod empirics {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

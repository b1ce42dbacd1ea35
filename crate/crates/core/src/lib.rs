//! Binary-optimization encodings and solvers for balanced k-way hypergraph
//! partitioning.
//!
//! ```
//! use hyperqubo::{CutFunction, EncodingSpec, Hypergraph};
//!
//! let h = Hypergraph::new(4, vec![vec![0, 1, 2], vec![1, 2, 3]]).unwrap();
//! let problem = EncodingSpec::new(2, 1.0, CutFunction::Aon).encode(&h).unwrap();
//! let best = hyperqubo::solvers::solve_exact(&problem).unwrap();
//! assert_eq!(best.cut_value, Some(2.0));
//! ```

pub mod cut;
pub mod error;
pub mod harness;
pub mod hypergraph;
pub mod pbo;
pub mod solvers;

pub use cut::{total_cut, CutFunction, CutKind, TransitionMatrix};
pub use error::{Error, Result};
pub use harness::{emit_report, run_experiment, ExperimentConfig, ExperimentReport, ReportFormat};
pub use hypergraph::{generate_random_uniform, parse_hmetis, serialize_hmetis, Hypergraph, NodePartition};
pub use pbo::{BinaryPolynomial, EncodedProblem, EncodingSpec, IsingModel};
pub use solvers::{SolveResult, SolverKind};

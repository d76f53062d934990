//! Invertible Gram-Schmidt orthogonalization.
//!
//! The forward kernels turn a set of linearly independent vectors (or matrix
//! blocks) into a pairwise-orthogonal set plus a packed list of projection
//! coefficients; the inverse kernels rebuild the original set exactly from
//! those two pieces. Around that sit reconstruction metrics, an experiment
//! harness, plain-text file formats and the `egsp` command-line tool.

pub mod cli;
pub mod coeffs;
pub mod error;
pub mod io;
pub mod lab;
pub mod metrics;
pub mod ortho;
pub mod prune;
pub mod sets;

pub use coeffs::{gfbr, pack_index, packed_len, PackedCoefficients, TriangularFactor};
pub use error::{Error, Result};
pub use metrics::{compare, mae, mse, po, psnr, MetricsReport, PoVector};
pub use ortho::{egsp, egsp2d, gsp, iegsp, iegsp2d, igsp, mgs_strict, Method, Tolerance};
pub use prune::prune_reconstruct;
pub use sets::{BlockSet, ItemSet, VectorSet};

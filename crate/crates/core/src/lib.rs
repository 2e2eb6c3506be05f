//! Truncated Hamburger, Stieltjes and Hausdorff moment problems through the boundary-control
//! operators of discrete-time Jacobi dynamics.
//!
//! Moments `s_k` are mapped to response data `r = Λ s` ([`chebyshev`]), from which the
//! connecting operator `C^N` and the companion operator `B^N` are assembled
//! ([`bc_operators`]). The pencil `B^N f = λ C^N f` ([`pencil`]) yields the atoms and weights of
//! an `N`-atom solution ([`recovery`]). [`jacobi_sim`] simulates the dynamics forward and serves
//! as an independent oracle, [`debranges`] evaluates reproducing kernels, and [`determinacy`]
//! tabulates finite-order determinacy diagnostics.

pub mod bc_operators;
pub mod chebyshev;
pub mod debranges;
pub mod determinacy;
pub mod error;
pub mod jacobi_sim;
pub mod matrix;
pub mod moments;
pub mod pencil;
pub mod recovery;
pub mod scalar;

pub use error::{Diagnostic, Error, Result};
pub use matrix::Matrix;
pub use moments::MomentSequence;
pub use recovery::DiscreteMeasure;
pub use scalar::{Backend, Rational, Scalar};

//! Exact finite-dimensional models of partial Poisson geometry.
//!
//! Tensor fields have polynomial coefficients over the rationals, so every
//! defining identity (Jacobi, compatibility, vanishing torsion, closedness)
//! is decided by an exact zero test rather than a tolerance.

pub mod bistructures;
pub mod error;
pub mod fields;
pub mod geomops;
pub mod kdvlab;
pub mod liepoisson;
pub mod linalg;
pub mod partial;
pub mod polycore;
pub mod schouten;
pub mod verdict;

pub use bistructures::{POmegaStructure, PnStructure};
pub use error::{Error, Result};
pub use fields::{Antisym3, Bivector, OneForm, OneOneTensor, TwoForm, VecField};
pub use geomops::{AffineImmersion, LinearSubmersion, Outcome, RankReport};
pub use kdvlab::{Grid, Hamiltonian, KdvPair};
pub use liepoisson::{CocycleForm, LieAlgebraSpec, MagriChain};
pub use partial::{Admissibility, CoflatBasis, PartialAnchor};
pub use polycore::{frac, parse_polynomial, rat, Polynomial, Rational, VarSpace};
pub use schouten::{SchoutenTensor, SymbolicPencilAnchor};
pub use verdict::{Verdict, Witness};

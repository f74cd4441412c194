//! Chern–Moser–Weyl tensor at a Levi-nondegenerate point and the null-cone sign test.
//!
//! Conventions: prepared coordinates `(z_1, …, z_n, w)` with `w = u + iv`, and the surface is the
//! graph `v = |z|²_ℓ − Q(z, z̄) + (3,1)+(1,3) terms + O(5)` where `|z|²_ℓ = −Σ_{j≤ℓ}|z_j|² + Σ_{j>ℓ}|z_j|²`.
//! The stored tensor satisfies `Σ s_{αβ̄γδ̄} z_α z̄_β z_γ z̄_δ = 4·N` with `N` the traceless part of `Q`.

mod cone;
mod graph;
mod harmonic;
mod obstruction;
mod prepare;
mod tensor;

use thiserror::Error;

use crate::hermpoly::PolyError;
use crate::levi::LeviError;

pub use cone::{
    cone_definiteness, cone_residual, cone_sample, project_tangent, retract, ConeConfig, ConeWitness, Definiteness,
    DefinitenessVerdict, FloatTensor,
};
pub use harmonic::{harmonic_decompose, laplacian_ell, signed_norm_sq, HarmonicDecomposition};
pub use obstruction::{hyperquadric_obstruction, ObstructionConfig, ObstructionOutcome, ObstructionReport};
pub use prepare::{prepare_at_point, PreparedSurface, ReplayReport, MAX_PASSES};
pub use tensor::{cmw_tensor, trace_contract, Quartic22Tensor, TensorEntryJson, TensorJson};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmwError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Levi(#[from] LeviError),
    #[error("point is not on the hypersurface: rho(p) = {0}")]
    NotOnSurface(String),
    #[error("the gradient of rho vanishes at p")]
    SingularPoint,
    #[error("Levi form is degenerate at p (rank {rank} of {n})")]
    LeviDegenerateAtPoint { rank: usize, n: usize },
    #[error("normalization to weight 4 did not converge; remaining terms: {}", terms.join(", "))]
    NonRigidOrder4 { terms: Vec<String> },
    #[error("expected a bidegree (2,2) polynomial: {0}")]
    NotBidegree22(String),
    #[error("harmonic decomposition system is singular: {0}")]
    SingularSystem(String),
    #[error("{0}")]
    InvalidInput(String),
}

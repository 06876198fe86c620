//! Spectral Schwartz distributions of operators.
//!
//! Smeared resolvent boundary values, Jordan/residue data extracted by
//! contour integration, and the generalized eigen-decomposition of the
//! rank-one perturbed multiplication operator `H = Ω + |g⟩⟨h|`, each paired
//! with a numerical verification of the distributional identities it should
//! satisfy (multiplicativity, orthogonality, completeness).

pub mod poly;
pub mod quad;
pub mod testfn;
pub mod distcore;
pub mod matspec;
pub mod krein;

pub use num_complex::Complex64 as C64;

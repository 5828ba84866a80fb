//! Numerical laboratory for radial weights on the unit disc: Bergman
//! reproducing kernels, their L^p means and weighted norms, and the integral
//! conditions deciding boundedness of the Bergman projection between
//! weighted L^p spaces.
//!
//! Everything is organized around a handful of derived functionals of a
//! radial weight w (tail, moments, associated weight, distortion psi), a
//! boundary-aware quadrature engine, and a sup-verdict trichotomy that turns
//! "sup over r of F(r) < infinity" statements into grid decisions.

pub mod conditions;
pub mod error;
pub mod kernel;
pub mod operators;
pub mod oracle;
pub mod quad;
pub mod special;
pub mod weights;

pub use conditions::{CondConfig, ConditionId, ConditionReport, Overall};
pub use error::{Error, Result};
pub use kernel::{KernelCoeffs, KernelConfig};
pub use quad::{DyadicGrid, SupConfig, SupVerdict, Verdict};
pub use weights::{ClassificationReport, FamilyKind, RadialWeight, WeightClass};

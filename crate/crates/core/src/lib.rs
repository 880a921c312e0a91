//! Laguerre's method applied to `p_n(z) = z^n - 1`.
//!
//! The crate covers the closed-form and general-form iteration steps, the
//! characteristic function describing where `|L_p(z)| = 1/|z|`, orbit
//! classification against the proven basins, a search for periodic cycles in
//! the fundamental sector, and basin rendering.

pub mod basin;
pub mod characteristic;
pub mod complex;
pub mod cycles;
pub mod dynamics;
mod error;
pub mod format;
pub mod iteration;
pub mod verify;

pub use basin::{BasinImage, Formulation, RenderConfig};
pub use characteristic::{annulus_bounds, char_fn, classify, radial_zeros};
pub use characteristic::{AnnulusBounds, RadialProfile, RegionLabel};
pub use complex::{principal_sqrt, ComplexPoint, Degree, ExtendedPoint};
pub use cycles::{find_cycles, CycleCandidate, CycleRecord};
pub use dynamics::{iterate_orbit, nearest_root, OrbitConfig, OrbitOutcome, OrbitTrace, OutcomeKind};
pub use error::{Error, Result};
pub use iteration::{laguerre_general, laguerre_simplified, modulus_squared_formula, PolynomialCoeffs};
pub use num_complex::Complex64;

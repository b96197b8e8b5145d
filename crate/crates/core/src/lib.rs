//! Numerical toolkit for radially symmetric power-law aggregation dynamics:
//! the interaction kernel phi and its sign functional psi, power-series and
//! closed-form cross-checks, multi delta-ring similarity configurations, ring
//! collapse dynamics, and a verification sweep over parameter grids.

pub mod dynamics;
pub mod error;
pub mod kernel;
pub mod params;
pub mod quad;
pub mod rings;
pub mod series;
pub mod special;
pub mod verify;

pub use error::{Error, Result};
pub use params::{KernelParams, RegimeTag};
pub use quad::{QuadConfig, QuadratureResult};

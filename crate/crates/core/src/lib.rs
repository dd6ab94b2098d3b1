//! Phase-space quasi-probability distributions on periodic spectral grids.
//!
//! The crate computes the Wigner distribution and the complex Sobouti-Nasiri
//! distribution of a quantum state, converts between them, takes their marginals and
//! phase-space averages, and evolves Wigner functions under the Wigner (Moyal) equation
//! for polynomial potentials. Every quantity has an independent route (trace formulas,
//! momentum-space densities, a split-step Schrödinger propagator) used by [`verify`].

pub mod distribution;
pub mod dynamics;
pub mod error;
pub mod grid;
pub mod observables;
pub mod spectral;
pub mod state;
pub mod states;
pub mod transforms;
pub mod verify;

pub use distribution::{DistributionKind, MarginalAxis, MarginalVector, PhaseSpaceDistribution};
pub use dynamics::{EvolutionConfig, PolynomialPotential};
pub use error::{Error, Result};
pub use grid::{MomentumGrid, PhysicalConstants, PositionGrid};
pub use observables::{OperatorKernel, WeylSymbol};
pub use state::{DensityMatrix, Wavefunction};
pub use states::{StateSpec, StateVariant};

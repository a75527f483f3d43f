//! From a one-parameter bifurcating map to the spectral density of the
//! tridiagonal operator built from one of its orbits.
//!
//! The pipeline runs in four stages:
//!
//! * [`maps`]: iterate an orbit, detect the limit cycle it settles into and
//!   scan parameter grids for period doublings.
//! * [`operator`]: interleave the orbit into a symmetric tridiagonal
//!   (Jacobi) operator and read off its periodic tail from the cycle.
//! * [`spectra`]: close the continued fraction of the `(0,0)` resolvent with
//!   the periodic terminator, evaluate the density of states and locate the
//!   band edges as roots of the terminator discriminant.
//! * [`orthopoly`]: first- and second-kind polynomials of the three-term
//!   recursion, their Gram matrix against the spectral measure, and the
//!   `-Q_n/P_n` resolvent representation.

pub mod error;
pub mod maps;
pub mod operator;
pub mod orthopoly;
pub mod pipeline;
pub mod poly;
pub mod quadrature;
pub mod roots;
pub mod spectra;

pub use error::{Error, Result};
pub use maps::{
    detect_limit_cycle, evaluate_map, iterate_orbit, scan_bifurcation, settle_cycle,
    BifurcationDiagram, CycleSearch, LimitCycle, MapFamily, Orbit,
};
pub use operator::{
    build_tridiagonal, convergence_diagnostics, extract_tail_coefficients, ConvergenceReport,
    ExtendedChain, JacobiChain, Parity, TailCoefficients, TridiagonalOperator,
};
pub use pipeline::Setup;
pub use spectra::{
    band_edges, compose_period, density, density_profile, discriminant_polynomial, resolvent,
    solve_terminator, BandStructure, DensityProfile, GridSpec, MoebiusCoefficients, PointMass,
    ResolventModel, SpectralMeasure,
};

/// Default depth of the explicit part of the continued fraction.
pub const DEFAULT_DEPTH: usize = 100;

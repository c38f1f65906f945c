//! Numerical verification of the sharp-interface energy expansion for
//! anisotropic phase-field functionals.
//!
//! The library builds every object in the second-order expansion
//!
//!   min E_ε = n κ_Φ c_W r^{n-1} + o(ε)
//!
//! of the anisotropic Allen–Cahn/Modica–Mortola energy with a degenerate
//! (sub-quadratic) double well, and verifies at desk scale that the
//! first-order coefficient is the anisotropic perimeter and that the
//! second-order term vanishes.  The pieces:
//!
//! * [`anisotropy`] — gauges Φ, polars Φ°, Wulff volumes κ_Φ;
//! * [`potential`] — the double well W with polynomial bridge, constants
//!   c_W and τ_W;
//! * [`profile`] — the optimal transition profile z and its minimality;
//! * [`radial`] — the constrained radial minimization producing the
//!   liminf-side excess, multiplier λ_ε, and shift δ_ε;
//! * [`recovery`] — the limsup-side recovery construction with exact mass
//!   correction;
//! * [`rearrange`] — grid-based gauge-radial decreasing rearrangement with
//!   Pólya–Szegő checks;
//! * [`sweep`] — the ε-sweep driver, rate fitting, and report emission;
//! * [`config`] — run configuration parsing and validation;
//! * [`acceptance`] — the executable acceptance criteria tying the pieces
//!   together at the reference configuration.
//!
//! Supporting numerics live in [`quad`] (adaptive Gauss–Kronrod and fixed
//! composite Gauss–Legendre rules), [`interp`] (monotone cubic
//! interpolation), and [`tridiag`] (symmetric tridiagonal solves).

pub mod acceptance;
pub mod anisotropy;
pub mod error;
pub mod interp;
pub mod potential;
pub mod profile;
pub mod quad;
pub mod config;
pub mod radial;
pub mod rearrange;
pub mod recovery;
pub mod report;
pub mod sweep;
pub mod tridiag;

pub use error::{Error, Result};

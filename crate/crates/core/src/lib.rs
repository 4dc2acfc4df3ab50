//! Numerical laboratory for the dynamical time operator of a free Dirac
//! electron, T = alpha.r / c + beta tau0, and for attoclock tunneling-time
//! estimates built on it.
//!
//! Everything except [`tunneling`] and [`units`] works in natural units
//! (hbar = c = m0 = 1) in the Dirac-Pauli representation. Spinor fields live
//! on periodic 1D or 3D lattices and are evolved exactly, mode by mode, with
//! the closed-form free propagator.
//!
//! ```
//! use dirac_timeop::grid::GridSpec;
//! use dirac_timeop::observables::{expect_all, TAU0};
//! use dirac_timeop::wavepacket::{build_packet, PacketSpec};
//!
//! let grid = GridSpec::new(1, 1024, 400.0).unwrap();
//! let psi = build_packet(&PacketSpec::default(), &grid).unwrap();
//! let e = expect_all(&psi, TAU0).unwrap();
//! assert!((e.t2_mean - e.r2_mean - TAU0 * TAU0).abs() < 1e-10);
//! ```

pub mod config;
pub mod dirac;
pub mod error;
pub mod evolution;
pub mod fit;
pub mod grid;
pub mod numeric;
pub mod observables;
pub mod run;
pub mod selfcheck;
pub mod tunneling;
pub mod units;
pub mod wavepacket;

pub use error::{Error, Result};

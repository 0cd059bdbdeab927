//! Vortex-blob simulation and kernel evaluation for the helically symmetric
//! 3D Euler equations reduced to the plane.
//!
//! A helical vortex filament is modelled as a planar vorticity blob of unit
//! circulation and width epsilon transported by a nonlocal velocity field.
//! The crate provides the periodic Green's function on R^2 x T in two
//! cross-validated representations, the induced velocity and auxiliary
//! kernels, a particle discretization with RK4 time stepping, conservation
//! diagnostics, and experiment drivers that check the leading-order rotation
//! law omega(eps) ~ -(sqrt(2)/8 pi) log(1/eps) and the concentration of the
//! blob around its center.
//!
//! Every capability has a runnable example:
//!
//! ```text
//! cargo run --release --example greens_check       # series vs image sums
//! cargo run --release --example kernel_asymptotics # K1/K2 log bands, antisymmetry
//! cargo run --release --example conservation_run   # invariants along a flow
//! cargo run --release --example rotation_sweep     # rotation-law slope fit
//! cargo run --release --example straight_filament  # confinement at sigma = 0
//! cargo run --release --example sigma_sweep        # translation-to-rotation limit
//! ```
//!
//! The same drivers are reachable through the thin `helix-vortex` binary,
//! e.g. `helix-vortex simulate --config sim.json --out runs/demo`.

pub mod biot_savart;
pub mod diagnostics;
pub mod error;
pub mod geometry;
pub mod greens;
pub mod harness;
pub mod numerics;
pub mod vortex_sim;

pub use error::{Error, Result};

//! Non-selfsimilar Riemann solutions of scalar balance laws
//! `u_t + Σ f_i(u)_{x_i} = g(u)` with continuous, right-Lipschitz sources.
//!
//! The crate follows the data from source term to audited solution:
//!
//! - [`source`], [`zeroset`], [`flux`], [`surface`], [`catalog`]: problem
//!   ingredients and the structural analysis of `g`.
//! - [`charflow`]: the characteristic ODE `dū/dt = g(ū)` with finite-time
//!   absorption, and the shifts `χ_i`, `[χ_i]`.
//! - [`riemann`]: Condition (H), wave classification, and evaluation of the
//!   shock or rarefaction solution.
//! - [`verify`]: weak-form, Kruzkov, Rankine-Hugoniot, geometric-entropy and
//!   L¹-contraction audits on sampled fields.
//! - [`viscous`]: a monotone finite-difference solver of the viscous
//!   regularisation, used as an independent oracle.
//! - [`closed_form`]: explicit solutions for `g = ∓u^{1/3}` with the
//!   `(u²/2, u⁴/4)` flux, including non-unique branches.
//!
//! Without the default `std` feature the crate is `no_std` (it needs
//! `alloc`). The `parallel` feature runs grid sweeps on rayon.

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod catalog;
pub mod charflow;
pub mod closed_form;
pub mod error;
pub mod flux;
pub mod grid;
pub mod math;
pub mod quad;
pub mod riemann;
pub mod roots;
pub mod source;
pub mod surface;
pub mod verify;
pub mod viscous;
pub mod zeroset;

pub use charflow::{AbsorptionRecord, CharFlow, FlowOptions, Trajectory};
pub use error::{Error, Result};
pub use flux::{FluxComponent, FluxSet};
pub use grid::{GridField, Provenance};
pub use source::{KnownZero, SourceTerm};
pub use surface::InitialSurface;
pub use zeroset::ZeroSetDecomposition;

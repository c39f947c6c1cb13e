//! Channel models for free-space quantum links between ground stations and
//! low-altitude drones.
//!
//! * [`turbulence`]: refractive-index structure profiles and derived
//!   quantities (Rytov variance, Fresnel number).
//! * [`attenuation`]: fog/rain scattering and slant-path extinction.
//! * [`beam`]: Gaussian beam propagation and aperture transmissivity.
//! * [`elliptic`]: the elliptic-beam fading channel and its transmittance
//!   distribution.
//! * [`link_budget`]: classical optical link margins.
//! * [`repeater`]: event-driven entanglement swapping over a drone chain.

// NaN must fail validation, so `!(x > 0.0)` is intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod attenuation;
pub mod beam;
pub mod elliptic;
pub mod error;
pub mod geometry;
pub mod link_budget;
pub mod quadrature;
pub mod repeater;
pub mod turbulence;

pub use error::{Error, Result};
pub use geometry::{ChannelGeometry, Extinction};
pub use turbulence::TurbulenceModel;
pub use link_budget::{link_margin, margin_sweep, LinkBudgetSpec, LinkMargin};

//! Lyapunov spectra of linear cocycles over a compact genus-2 hyperbolic surface.
//!
//! The surface is the quotient of the Poincaré disc by the side pairings of a
//! regular octagon. Cocycles come from representations of its fundamental
//! group, and their exponents are estimated along Brownian paths, along
//! geodesic rays and through heat-diffusion expectations.

pub mod cocycle;
pub mod diffusion;
pub mod error;
pub mod hypgeo;
pub mod lyapunov;
pub mod quadrature;
pub mod rng;
pub mod surface;

pub use error::{Error, Result};
pub use hypgeo::{dist_p, r_for_radius, radius_for_r, DiscPoint, GeodesicRay, MobiusMap};
pub use rng::{McEstimate, RngStream};

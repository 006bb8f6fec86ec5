//! Plane-wave stability toolkit for the logarithmic Schrödinger–Langevin
//! equation on the torus.
//!
//! See the guide under `book/` for a walk through the modules.

pub mod error;
pub mod experiments;
pub mod integrator;
pub mod linear;
pub mod resonance;
pub mod spectral;
pub mod verify;

pub use num_complex;

pub type C64 = num_complex::Complex<f64>;

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/spectral.md")]
    mod spectral {}
    #[doc = include_str!("../../../book/src/linear.md")]
    mod linear {}
    #[doc = include_str!("../../../book/src/integrator.md")]
    mod integrator {}
    #[doc = include_str!("../../../book/src/resonance.md")]
    mod resonance {}
    #[doc = include_str!("../../../book/src/experiments.md")]
    mod experiments {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}

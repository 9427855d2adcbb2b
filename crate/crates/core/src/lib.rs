//! Simulation and verification toolkit for diminishing convex-body processes.
//!
//! Starting from a convex body `K_0`, each step draws a uniform point `p` in
//! the current body and replaces it by `K_n ∩ (p + K)`. This crate provides
//! exact engines for the interval, the cube, the regular simplex and regular
//! polygons, the limit laws those processes converge to, and a statistical
//! harness that checks the limit theorems at desk scale.
//!
//! Module map:
//! - [`distributions`]: the limit laws and their samplers.
//! - [`interval`], [`cube`], [`simplex`], [`polygon`]: process engines.
//! - [`stats`]: goodness of fit, moments, envelopes and replica orchestration.
//! - [`verify`]: named theorem checks built on top of the above.

#[cfg(test)]
macro_rules! assert_close {
    ($a:expr, $b:expr, $tol:expr) => {{
        let (a, b): (f64, f64) = ($a, $b);
        assert!((a - b).abs() <= $tol, "{} vs {} (tol {})", a, b, $tol);
    }};
}

pub mod cube;
pub mod distributions;
mod error;
pub mod geometry;
pub mod interval;
pub mod invariants;
pub mod polygon;
mod rng;
pub mod simplex;
pub mod stats;
pub mod verify;

pub use error::{Error, Result};
pub use rng::RngStream;

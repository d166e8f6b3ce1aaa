//! Heat kernels, Schrödinger semigroup traces and Feynman-Kac path sampling
//! on finite weighted graphs and flat tori, with the small-time
//! (semiclassical) limit checks that tie them together.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod heat_kernel;
pub mod linalg;
pub mod potential_class;
pub mod sampler;
pub mod schrodinger;
pub mod torus;

pub use error::{Error, Result};

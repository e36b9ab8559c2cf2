//! Two identical two-level atoms in a cavity with two parametrically coupled
//! modes and a Kerr medium: closed-form block dynamics, a Runge–Kutta
//! reference integrator and atom–field entanglement measures.

pub mod amplitudes;
pub mod config;
pub mod cubic;
pub mod error;
pub mod linalg;
pub mod model;
pub mod measures;
pub mod oracle;
pub mod run;
pub mod state;

pub use error::{Error, Result};

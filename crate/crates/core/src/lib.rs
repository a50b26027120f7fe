//! Radial solutions of the coupled system `Δu = g(|x|, v)`, `Δv = f(|x|, |∇u|)`.
//!
//! * [`model`]: problem descriptors and hypothesis checks
//! * [`radial`]: shooting from the origin, blow-up detection, Picard oracle
//! * [`criteria`]: integral growth conditions and regime classification
//! * [`dynsys`]: the autonomous `(Y, Z, W)` flow, equilibria and stability
//! * [`asymptotics`]: whole-space growth rates, predicted and fitted
//! * [`cli`]: the `radlab` command-line front end

pub mod asymptotics;
pub mod cli;
pub mod criteria;
pub mod dynsys;
pub mod error;
pub mod fit;
pub mod model;
pub mod ode;
pub mod quad;
pub mod radial;
pub mod registry;

pub use error::{LabError, Result};

//! Analytic and Monte Carlo models of air-to-ground link quality for a
//! user served by hovering UAVs, under human, building and self
//! blockage.

pub mod availability;
pub mod blockage;
pub mod error;
pub mod harness;
pub mod mathkit;
pub mod oracle;
pub mod qos;
pub mod scenario;
pub mod simcore;

pub use error::{Error, Result};
pub use scenario::ScenarioParams;

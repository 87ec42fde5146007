//! Monte Carlo simulation of the cell: UAV placement and jitter, moving
//! human blockers, random buildings, and trial-based estimators.

mod estimate;
mod links;
mod onoff;
mod world;

pub use estimate::{estimate_metric, AvailabilityBackend, EstimateOptions, Metric, PhiMode, TrialEstimate};
pub use links::{link_dynamic_blocked, link_self_blocked, link_static_blocked, segment_hits_rectangle};
pub use onoff::{link_blockage_rate, onoff_simulate, OnOffState};
pub use world::{sample_world, trial_rng, Blocker, Building, PlacementSpec, SimConfig, Uav, WorldState};

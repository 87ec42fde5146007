use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::blockage::ScenarioParams;
use crate::error::{Error, Result};
use crate::qos::UavPlacement;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Blocker body width (m).
    pub blocker_width: f64,
    /// Mobility time step (s).
    pub dt: f64,
    /// Upper end of the uniform leg duration (s).
    pub leg_max: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            blocker_width: 0.4,
            dt: 0.01,
            leg_max: 60.0,
        }
    }
}

/// How UAV central positions are drawn.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlacementSpec {
    /// Poisson count, uniform over the cell disc.
    Ppp { mu_h: f64 },
    /// Poisson count, area-uniform over an annulus.
    Ring { r_in: f64, r_out: f64, mu_h: f64 },
    /// Exactly these central positions `[x, y, h]`.
    Fixed { uavs: Vec<[f64; 3]> },
}

impl PlacementSpec {
    /// A single UAV at horizontal distance `mu_r` on the positive x-axis.
    pub fn single(mu_r: f64, mu_h: f64) -> Self {
        PlacementSpec::Fixed {
            uavs: vec![[mu_r, 0.0, mu_h]],
        }
    }

    pub fn validate(&self, p: &ScenarioParams) -> Result<()> {
        let height = |h: f64| {
            if h.is_finite() && h > p.h_b {
                Ok(())
            } else {
                Err(Error::InvalidPlacement(format!("height {h} must exceed h_B = {}", p.h_b)))
            }
        };
        match self {
            PlacementSpec::Ppp { mu_h } => height(*mu_h),
            PlacementSpec::Ring { r_in, r_out, mu_h } => {
                if !(*r_in >= 0.0 && r_out >= r_in && r_out.is_finite()) {
                    return Err(Error::InvalidPlacement(format!("ring [{r_in}, {r_out}]")));
                }
                height(*mu_h)
            }
            PlacementSpec::Fixed { uavs } => {
                if uavs.is_empty() {
                    return Err(Error::EmptyPlacements);
                }
                uavs.iter().try_for_each(|u| height(u[2]))
            }
        }
    }

    /// Mean distances and heights for the analytic models. Random
    /// layouts are represented by `k` deterministic placements.
    pub fn analytic_placements(&self, p: &ScenarioParams) -> Result<Vec<UavPlacement>> {
        match self {
            PlacementSpec::Ppp { mu_h } => crate::qos::ring_placements(0.0, p.r_cell, *mu_h, p.k),
            PlacementSpec::Ring { r_in, r_out, mu_h } => crate::qos::ring_placements(*r_in, *r_out, *mu_h, p.k),
            PlacementSpec::Fixed { uavs } => Ok(uavs.iter().map(|u| UavPlacement::new(u[0].hypot(u[1]), u[2])).collect()),
        }
    }

    pub(crate) fn sample_one(&self, p: &ScenarioParams, rng: &mut ChaCha8Rng) -> [f64; 3] {
        match self {
            PlacementSpec::Ppp { mu_h } => annulus_point(0.0, p.r_cell, *mu_h, rng),
            PlacementSpec::Ring { r_in, r_out, mu_h } => annulus_point(*r_in, *r_out, *mu_h, rng),
            PlacementSpec::Fixed { uavs } => uavs[0],
        }
    }

    pub(crate) fn sample_all(&self, p: &ScenarioParams, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
        match self {
            PlacementSpec::Fixed { uavs } => uavs.clone(),
            _ => {
                let n = poisson_count(p.mean_uav_count(), rng);
                (0..n).map(|_| self.sample_one(p, rng)).collect()
            }
        }
    }

    /// Centrals for the multi-UAV metrics: a Poisson count, with a fixed
    /// list assigned cyclically as in the analytic model.
    pub(crate) fn sample_multi(&self, p: &ScenarioParams, rng: &mut ChaCha8Rng) -> Vec<[f64; 3]> {
        match self {
            PlacementSpec::Fixed { uavs } => {
                let n = poisson_count(p.mean_uav_count(), rng);
                (0..n).map(|i| uavs[i % uavs.len()]).collect()
            }
            _ => self.sample_all(p, rng),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uav {
    pub central: [f64; 3],
    pub position: [f64; 3],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Blocker {
    pub position: [f64; 2],
    pub heading: f64,
    pub leg_remaining: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Building {
    pub center: [f64; 2],
    pub length: f64,
    pub width: f64,
    /// Angle of the length axis (rad).
    pub orientation: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct WorldState {
    pub time: f64,
    pub uavs: Vec<Uav>,
    pub blockers: Vec<Blocker>,
    pub buildings: Vec<Building>,
    pub rng: ChaCha8Rng,
}

/// Independent stream `index` of the generator seeded by `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn poisson_count(mean: f64, rng: &mut ChaCha8Rng) -> usize {
    if mean <= 0.0 {
        return 0;
    }
    Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0)
}

fn annulus_point(r_in: f64, r_out: f64, h: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let u: f64 = rng.random();
    let r = (r_in * r_in + u * (r_out * r_out - r_in * r_in)).sqrt();
    let a = 2.0 * PI * rng.random::<f64>();
    [r * a.cos(), r * a.sin(), h]
}

pub(crate) fn jitter(c: [f64; 3], sigma: f64, rng: &mut ChaCha8Rng) -> [f64; 3] {
    let mut out = c;
    for v in out.iter_mut() {
        let z: f64 = rng.sample(StandardNormal);
        *v += sigma * z;
    }
    out
}

pub(crate) fn sample_buildings(p: &ScenarioParams, rng: &mut ChaCha8Rng) -> Vec<Building> {
    let reach = p.r_cell + p.e_l.hypot(p.e_w);
    let n = poisson_count(p.lambda_s * PI * reach * reach, rng);
    (0..n)
        .map(|_| {
            let c = annulus_point(0.0, reach, 0.0, rng);
            Building {
                center: [c[0], c[1]],
                length: p.e_l,
                width: p.e_w,
                orientation: PI * rng.random::<f64>(),
            }
        })
        .collect()
}

fn new_leg(sim: &SimConfig, rng: &mut ChaCha8Rng) -> (f64, f64) {
    (2.0 * PI * rng.random::<f64>(), sim.leg_max * rng.random::<f64>())
}

pub(crate) fn sample_blockers(p: &ScenarioParams, sim: &SimConfig, rng: &mut ChaCha8Rng) -> Vec<Blocker> {
    let n = poisson_count(p.mean_blocker_count(), rng);
    (0..n)
        .map(|_| {
            let c = annulus_point(0.0, p.r_cell, 0.0, rng);
            let (heading, leg_remaining) = new_leg(sim, rng);
            Blocker {
                position: [c[0], c[1]],
                heading,
                leg_remaining,
            }
        })
        .collect()
}

/// Draws a full world: jittered UAVs, blockers and buildings.
pub fn sample_world(p: &ScenarioParams, placements: &PlacementSpec, seed: u64, sim: &SimConfig) -> Result<WorldState> {
    p.validate()?;
    placements.validate(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uavs = placements
        .sample_all(p, &mut rng)
        .into_iter()
        .map(|c| Uav {
            central: c,
            position: jitter(c, p.sigma, &mut rng),
        })
        .collect();
    let blockers = sample_blockers(p, sim, &mut rng);
    let buildings = sample_buildings(p, &mut rng);
    Ok(WorldState {
        time: 0.0,
        uavs,
        blockers,
        buildings,
        rng,
    })
}

// Moves `pos` a path length `dist` along `dir`, reflecting specularly
// off the circle of radius `r`.
fn travel(pos: &mut [f64; 2], dir: &mut [f64; 2], mut dist: f64, r: f64) {
    for _ in 0..16 {
        let nx = pos[0] + dist * dir[0];
        let ny = pos[1] + dist * dir[1];
        if nx * nx + ny * ny <= r * r {
            *pos = [nx, ny];
            return;
        }
        // Exit point: |pos + s dir| = r with s in (0, dist].
        let b = pos[0] * dir[0] + pos[1] * dir[1];
        let c = pos[0] * pos[0] + pos[1] * pos[1] - r * r;
        let s = (-b + (b * b - c).max(0.0).sqrt()).clamp(0.0, dist);
        let qx = pos[0] + s * dir[0];
        let qy = pos[1] + s * dir[1];
        let norm = qx.hypot(qy);
        let (ux, uy) = (qx / norm, qy / norm);
        let dot = dir[0] * ux + dir[1] * uy;
        *dir = [dir[0] - 2.0 * dot * ux, dir[1] - 2.0 * dot * uy];
        *pos = [ux * r, uy * r];
        dist -= s;
    }
}

impl WorldState {
    /// Advances every blocker by `dt` seconds of random-waypoint motion.
    pub fn step_blockers(&mut self, dt: f64, p: &ScenarioParams, sim: &SimConfig) {
        for b in self.blockers.iter_mut() {
            let mut left = dt;
            while left > 0.0 {
                let seg = left.min(b.leg_remaining);
                let mut dir = [b.heading.cos(), b.heading.sin()];
                travel(&mut b.position, &mut dir, p.v * seg, p.r_cell);
                b.heading = dir[1].atan2(dir[0]);
                b.leg_remaining -= seg;
                left -= seg;
                if b.leg_remaining <= 0.0 {
                    let (h, l) = new_leg(sim, &mut self.rng);
                    b.heading = h;
                    b.leg_remaining = l;
                }
            }
        }
        self.time += dt;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_same_world() {
        let p = ScenarioParams::default();
        let spec = PlacementSpec::Ring { r_in: 10.0, r_out: 15.0, mu_h: 25.0 };
        let a = sample_world(&p, &spec, 42, &SimConfig::default()).unwrap();
        let b = sample_world(&p, &spec, 42, &SimConfig::default()).unwrap();
        assert_eq!(a, b);
        let c = sample_world(&p, &spec, 43, &SimConfig::default()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn step_moves_v_dt_in_interior() {
        let p = ScenarioParams::default();
        let sim = SimConfig::default();
        let mut w = sample_world(&p, &PlacementSpec::single(10.0, 25.0), 1, &sim).unwrap();
        let before = w.blockers.clone();
        w.step_blockers(sim.dt, &p, &sim);
        for (a, b) in before.iter().zip(&w.blockers) {
            let r = b.position[0].hypot(b.position[1]);
            if a.leg_remaining > sim.dt && r < p.r_cell - 1.0 {
                let d = (b.position[0] - a.position[0]).hypot(b.position[1] - a.position[1]);
                assert!((d - p.v * sim.dt).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn reflection_stays_in_disc() {
        let mut pos = [9.9, 0.0];
        let mut dir = [1.0, 0.0];
        travel(&mut pos, &mut dir, 0.3, 10.0);
        assert!((pos[0] - 9.8).abs() < 1e-12 && pos[1].abs() < 1e-12);
        assert!((dir[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_low_or_empty_placements() {
        let p = ScenarioParams::default();
        assert!(PlacementSpec::single(10.0, 1.0).validate(&p).is_err());
        assert!(matches!(PlacementSpec::Fixed { uavs: vec![] }.validate(&p), Err(Error::EmptyPlacements)));
    }
}

use std::f64::consts::PI;

use super::world::{Blocker, Building, SimConfig};
use crate::blockage::ScenarioParams;
use crate::error::{Error, Result};

/// The user's body blocks azimuths in `[pi - theta/2, pi + theta/2)`.
pub fn link_self_blocked(uav: [f64; 3], p: &ScenarioParams) -> bool {
    let az = uav[1].atan2(uav[0]).rem_euclid(2.0 * PI);
    let half = 0.5 * p.theta;
    az >= PI - half && az < PI + half
}

/// Whether the segment `a -> b` meets the (filled) building footprint.
pub fn segment_hits_rectangle(a: [f64; 2], b: [f64; 2], bd: &Building) -> bool {
    let (s, c) = bd.orientation.sin_cos();
    let local = |q: [f64; 2]| {
        let dx = q[0] - bd.center[0];
        let dy = q[1] - bd.center[1];
        [c * dx + s * dy, -s * dx + c * dy]
    };
    let p0 = local(a);
    let p1 = local(b);
    let half = [0.5 * bd.length, 0.5 * bd.width];
    let mut t0 = 0.0f64;
    let mut t1 = 1.0f64;
    for k in 0..2 {
        let d = p1[k] - p0[k];
        if d == 0.0 {
            if p0[k].abs() > half[k] {
                return false;
            }
            continue;
        }
        let mut ta = (-half[k] - p0[k]) / d;
        let mut tb = (half[k] - p0[k]) / d;
        if ta > tb {
            std::mem::swap(&mut ta, &mut tb);
        }
        t0 = t0.max(ta);
        t1 = t1.min(tb);
        if t0 > t1 {
            return false;
        }
    }
    true
}

/// Whether any building footprint crosses the ground projection of the link.
pub fn link_static_blocked(uav: [f64; 3], buildings: &[Building]) -> bool {
    buildings
        .iter()
        .any(|b| segment_hits_rectangle([0.0, 0.0], [uav[0], uav[1]], b))
}

/// Whether a blocker body stands inside the strip of ground where a
/// person of height `h_B` cuts the link.
///
/// The strip runs along the link azimuth for the effective length
/// `(h_B - h_R)/(h - h_R) r`, widened by the body width on every side.
pub fn link_dynamic_blocked(uav: [f64; 3], blockers: &[Blocker], p: &ScenarioParams, sim: &SimConfig) -> Result<bool> {
    let h = uav[2];
    if !(h > p.h_b) {
        return Err(Error::Domain {
            what: "link_dynamic_blocked",
            value: h,
            expected: "UAV height > h_B",
        });
    }
    let r = uav[0].hypot(uav[1]);
    let r_eff = (p.h_b - p.h_r) / (h - p.h_r) * r;
    let u = if r > 0.0 { [uav[0] / r, uav[1] / r] } else { [1.0, 0.0] };
    let w = 0.5 * sim.blocker_width;
    Ok(blockers.iter().any(|b| {
        let along = b.position[0] * u[0] + b.position[1] * u[1];
        let across = b.position[0] * u[1] - b.position[1] * u[0];
        along >= -w && along <= r_eff + w && across.abs() <= w
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(cx: f64, cy: f64, side: f64, orientation: f64) -> Building {
        Building {
            center: [cx, cy],
            length: side,
            width: side,
            orientation,
        }
    }

    #[test]
    fn self_sector_boundaries() {
        let p = ScenarioParams::default();
        assert!(link_self_blocked([-10.0, 0.0, 25.0], &p));
        assert!(!link_self_blocked([10.0, 0.0, 25.0], &p));
        let a = PI - PI / 6.0;
        assert!(link_self_blocked([a.cos(), a.sin() - 1e-12, 25.0], &p));
        let a = PI + PI / 6.0 + 1e-9;
        assert!(!link_self_blocked([a.cos(), a.sin(), 25.0], &p));
    }

    #[test]
    fn rectangle_hits() {
        assert!(segment_hits_rectangle([0.0, 0.0], [10.0, 0.0], &square(5.0, 0.0, 1.0, 0.3)));
        assert!(!segment_hits_rectangle([0.0, 0.0], [10.0, 0.0], &square(5.0, 3.0, 1.0, 0.0)));
        // Diamond corner just reaching the segment.
        let d = square(5.0, 0.70, 1.0, PI / 4.0);
        assert!(segment_hits_rectangle([0.0, 0.0], [10.0, 0.0], &d));
        let d = square(5.0, 0.72, 1.0, PI / 4.0);
        assert!(!segment_hits_rectangle([0.0, 0.0], [10.0, 0.0], &d));
        // User inside a building.
        assert!(segment_hits_rectangle([0.0, 0.0], [30.0, 5.0], &square(0.0, 0.0, 2.0, 0.0)));
    }

    #[test]
    fn blocker_strip() {
        let p = ScenarioParams::default();
        let sim = SimConfig::default();
        let uav = [47.0, 0.0, 25.0];
        // r_eff = 0.4 / 23.6 * 47 ~ 0.797
        let at = |x: f64, y: f64| Blocker { position: [x, y], heading: 0.0, leg_remaining: 1.0 };
        assert!(link_dynamic_blocked(uav, &[at(0.5, 0.1)], &p, &sim).unwrap());
        assert!(!link_dynamic_blocked(uav, &[at(1.1, 0.0)], &p, &sim).unwrap());
        assert!(!link_dynamic_blocked(uav, &[at(0.5, 0.25)], &p, &sim).unwrap());
        assert!(link_dynamic_blocked([10.0, 0.0, 1.0], &[], &p, &sim).is_err());
    }
}

use rand::Rng;
use rand_distr::{Distribution, Exp};
use serde::{Deserialize, Serialize};

use crate::blockage::{derived_rates, ScenarioParams};

/// Alternating renewal process: unblocked periods end at rate `eta`,
/// blocked periods end at rate `omega`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OnOffState {
    pub blocked: bool,
    pub eta: f64,
    pub omega: f64,
}

impl OnOffState {
    pub fn stationary_blocked(&self) -> f64 {
        self.eta / (self.eta + self.omega)
    }
}

/// Rate at which blockers start cutting a link at height `h` and
/// horizontal distance `r`.
pub fn link_blockage_rate(h: f64, r: f64, p: &ScenarioParams) -> f64 {
    derived_rates(p).rho * r / (h - p.h_r)
}

/// Fraction of `[0, horizon]` spent blocked, starting from the
/// stationary state.
pub fn onoff_simulate<R: Rng + ?Sized>(eta: f64, omega: f64, horizon: f64, rng: &mut R) -> f64 {
    if eta <= 0.0 || horizon <= 0.0 {
        return 0.0;
    }
    let up = Exp::new(eta).expect("eta > 0");
    let down = Exp::new(omega).expect("omega > 0");
    let mut blocked = rng.random::<f64>() < eta / (eta + omega);
    let mut t = 0.0;
    let mut acc = 0.0;
    while t < horizon {
        let d: f64 = if blocked { down.sample(rng) } else { up.sample(rng) };
        let end = (t + d).min(horizon);
        if blocked {
            acc += end - t;
        }
        t = end;
        blocked = !blocked;
    }
    acc / horizon
}

//! Mechanical similarity of the homogeneous quartic potential.

use super::hamiltonian::PhaseSpaceState;
use super::integrate::Trajectory;
use crate::{Error, Result};

fn ratio(e_from: f64, e_to: f64) -> Result<f64> {
    if !(e_from > 0.0 && e_to > 0.0) {
        return Err(Error::Domain(format!("energies must be positive, got {e_from} -> {e_to}")));
    }
    Ok(e_to / e_from)
}

pub fn scale_state(s: &PhaseSpaceState, e_from: f64, e_to: f64) -> Result<PhaseSpaceState> {
    let r = ratio(e_from, e_to)?;
    let (q, p) = (r.powf(0.25), r.sqrt());
    Ok(PhaseSpaceState::new(s.x * q, s.y * q, s.px * p, s.py * p))
}

pub fn scale_action(action: f64, e_from: f64, e_to: f64) -> Result<f64> {
    Ok(action * ratio(e_from, e_to)?.powf(0.75))
}

pub fn scale_time(t: f64, e_from: f64, e_to: f64) -> Result<f64> {
    Ok(t * ratio(e_from, e_to)?.powf(-0.25))
}

/// Maps a whole trajectory to another energy; winding samples are invariant.
pub fn scale_trajectory(tr: &Trajectory, e_from: f64, e_to: f64) -> Result<Trajectory> {
    let r = ratio(e_from, e_to)?;
    let (q, p, s, t) = (r.powf(0.25), r.sqrt(), r.powf(0.75), r.powf(-0.25));
    Ok(Trajectory {
        times: tr.times.iter().map(|v| v * t).collect(),
        states: tr.states.iter().map(|v| PhaseSpaceState::new(v.x * q, v.y * q, v.px * p, v.py * p)).collect(),
        action_samples: tr.action_samples.iter().map(|v| v * s).collect(),
        winding_samples: tr.winding_samples.clone(),
    })
}

use super::hamiltonian::{PhaseSpaceState, Potential};
use crate::{Error, Result};

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

const MAX_STEPS: usize = 50_000_000;

/// Where the solver reports the solution.
pub(crate) enum Output<'a> {
    /// Every accepted step.
    Steps,
    /// Exactly at the given increasing times (steps are clipped to hit them).
    Times(&'a [f64]),
}

/// Adaptive Dormand–Prince integration of y' = f(y) from t = 0 to `t_end`.
/// `observe` receives (t, y) at the initial point and at each output point.
pub(crate) fn dopri<const N: usize>(
    f: impl Fn(&[f64; N]) -> [f64; N],
    y0: [f64; N],
    t_end: f64,
    tol: f64,
    output: Output<'_>,
    mut observe: impl FnMut(f64, &[f64; N]),
) -> Result<[f64; N]> {
    let mut t = 0.0;
    let mut y = y0;
    observe(t, &y);
    if t_end <= 0.0 {
        return Ok(y);
    }
    let stops: &[f64] = match output {
        Output::Steps => &[],
        Output::Times(ts) => ts,
    };
    let mut next_stop = stops.iter().position(|&s| s > 0.0).unwrap_or(stops.len());
    let mut k = [[0.0; N]; 7];
    k[0] = f(&y);
    let mut h = (tol.powf(0.2) * 0.1).min(t_end);
    let mut steps = 0;
    while t < t_end {
        steps += 1;
        if steps > MAX_STEPS {
            return Err(Error::Integration { t, reason: "step budget exhausted".into() });
        }
        let mut target = t_end;
        if next_stop < stops.len() {
            target = target.min(stops[next_stop]);
        }
        let clipped = t + h >= target;
        let hh = if clipped { target - t } else { h };
        if hh < 1e-13 * t_end.max(1.0) && !clipped {
            return Err(Error::Integration { t, reason: "step size underflow".into() });
        }
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += hh * a * kj[i];
                    }
                }
            }
            k[s] = f(&ys);
        }
        let mut y5 = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut d5 = 0.0;
            let mut d4 = 0.0;
            for s in 0..7 {
                d5 += B5[s] * k[s][i];
                d4 += B4[s] * k[s][i];
            }
            y5[i] += hh * d5;
            let sc = tol * (1.0 + y[i].abs().max(y5[i].abs()));
            err = err.max((hh * (d5 - d4)).abs() / sc);
        }
        if !err.is_finite() {
            return Err(Error::Integration { t, reason: "non-finite state".into() });
        }
        if err <= 1.0 {
            t = if clipped { target } else { t + hh };
            y = y5;
            // FSAL: the last stage is f(y5).
            k[0] = k[6];
            match output {
                Output::Steps => observe(t, &y),
                Output::Times(_) => {
                    if clipped && next_stop < stops.len() && target == stops[next_stop] {
                        observe(t, &y);
                        next_stop += 1;
                    }
                }
            }
            if clipped && target >= t_end {
                break;
            }
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        if !clipped || err > 1.0 {
            h = hh * factor;
        } else {
            h = h.max(hh * factor);
        }
    }
    Ok(y)
}

/// Right-hand side of Hamilton's equations augmented with the action
/// integrand p·q̇ = px² + py².
pub(crate) fn flow_rhs<P: Potential>(pot: &P) -> impl Fn(&[f64; 5]) -> [f64; 5] + '_ {
    move |u: &[f64; 5]| {
        let g = pot.gradient(u[0], u[1]);
        [u[2], u[3], -g[0], -g[1], u[2] * u[2] + u[3] * u[3]]
    }
}

/// Flow + action + 4×4 tangent map (row-major, entries 5..21).
pub(crate) fn variational_rhs<P: Potential>(pot: &P) -> impl Fn(&[f64; 21]) -> [f64; 21] + '_ {
    move |u: &[f64; 21]| {
        let g = pot.gradient(u[0], u[1]);
        let hs = pot.hessian(u[0], u[1]);
        let mut d = [0.0; 21];
        d[0] = u[2];
        d[1] = u[3];
        d[2] = -g[0];
        d[3] = -g[1];
        d[4] = u[2] * u[2] + u[3] * u[3];
        let m = |r: usize, c: usize| u[5 + 4 * r + c];
        for c in 0..4 {
            d[5 + c] = m(2, c);
            d[5 + 4 + c] = m(3, c);
            d[5 + 8 + c] = -(hs[0][0] * m(0, c) + hs[0][1] * m(1, c));
            d[5 + 12 + c] = -(hs[1][0] * m(0, c) + hs[1][1] * m(1, c));
        }
        d
    }
}

pub(crate) fn identity_augmented(s: &PhaseSpaceState) -> [f64; 21] {
    let mut u = [0.0; 21];
    u[..4].copy_from_slice(&s.to_array());
    for i in 0..4 {
        u[5 + 5 * i] = 1.0;
    }
    u
}

/// Time-ordered samples of a classical trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<PhaseSpaceState>,
    /// Accumulated action ∫ p·dq at each sample.
    pub action_samples: Vec<f64>,
    /// Accumulated winding μ_t at each sample; present for periodic-orbit paths.
    pub winding_samples: Option<Vec<f64>>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn duration(&self) -> f64 {
        self.times.last().copied().unwrap_or(0.0) - self.times.first().copied().unwrap_or(0.0)
    }

    pub fn max_energy_drift<P: Potential>(&self, pot: &P) -> f64 {
        let Some(first) = self.states.first() else { return 0.0 };
        let e0 = pot.energy(first);
        self.states.iter().map(|s| (pot.energy(s) - e0).abs()).fold(0.0, f64::max)
    }
}

fn run<P: Potential>(pot: &P, state: &PhaseSpaceState, t_final: f64, ode_tol: f64, times: Option<&[f64]>) -> Result<Trajectory> {
    let mut traj = Trajectory { times: vec![], states: vec![], action_samples: vec![], winding_samples: None };
    let y0 = [state.x, state.y, state.px, state.py, 0.0];
    let output = match times {
        Some(ts) => Output::Times(ts),
        None => Output::Steps,
    };
    dopri(flow_rhs(pot), y0, t_final, ode_tol, output, |t, u| {
        traj.times.push(t);
        traj.states.push(PhaseSpaceState::new(u[0], u[1], u[2], u[3]));
        traj.action_samples.push(u[4]);
    })?;
    Ok(traj)
}

fn check_inputs(state: &PhaseSpaceState, t_final: f64, tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(t_final >= 0.0 && t_final.is_finite()) {
        return Err(Error::Domain(format!("t_final must be finite and non-negative, got {t_final}")));
    }
    if !state.is_finite() {
        return Err(Error::Domain("initial state is not finite".into()));
    }
    Ok(())
}

fn with_drift_control<P: Potential>(
    pot: &P,
    state: &PhaseSpaceState,
    t_final: f64,
    tol: f64,
    times: Option<&[f64]>,
) -> Result<Trajectory> {
    check_inputs(state, t_final, tol)?;
    let e0 = pot.energy(state);
    let allowed = tol * e0.abs().max(f64::MIN_POSITIVE);
    let mut ode_tol = (tol * 1e-2).max(1e-15);
    loop {
        let traj = run(pot, state, t_final, ode_tol, times)?;
        let drift = traj.max_energy_drift(pot);
        if drift <= allowed || ode_tol <= 1e-15 {
            if drift > allowed && drift > 1e-13 * e0.abs() {
                return Err(Error::Integration {
                    t: t_final,
                    reason: format!("energy drift {drift:e} exceeds tolerance {allowed:e}"),
                });
            }
            return Ok(traj);
        }
        ode_tol = (ode_tol * 1e-2).max(1e-15);
    }
}

/// Integrates Hamilton's equations from `state` over [0, t_final], recording
/// every accepted step. The relative energy drift stays below `tol`.
pub fn integrate<P: Potential>(pot: &P, state: &PhaseSpaceState, t_final: f64, tol: f64) -> Result<Trajectory> {
    with_drift_control(pot, state, t_final, tol, None)
}

/// Like [`integrate`] but samples on a uniform mesh of `n` intervals
/// (n + 1 samples including both endpoints).
pub fn integrate_uniform<P: Potential>(
    pot: &P,
    state: &PhaseSpaceState,
    t_final: f64,
    n: usize,
    tol: f64,
) -> Result<Trajectory> {
    let n = n.max(1);
    let times: Vec<f64> = (1..=n).map(|k| t_final * k as f64 / n as f64).collect();
    with_drift_control(pot, state, t_final, tol, Some(&times))
}

/// Final state, action and 4×4 tangent map after time `t`.
pub fn propagate_tangent<P: Potential>(
    pot: &P,
    state: &PhaseSpaceState,
    t: f64,
    tol: f64,
) -> Result<(PhaseSpaceState, f64, [[f64; 4]; 4])> {
    let u = dopri(variational_rhs(pot), identity_augmented(state), t, tol, Output::Steps, |_, _| {})?;
    Ok(unpack(&u))
}

pub(crate) fn unpack(u: &[f64; 21]) -> (PhaseSpaceState, f64, [[f64; 4]; 4]) {
    let mut m = [[0.0; 4]; 4];
    for (r, row) in m.iter_mut().enumerate() {
        row.copy_from_slice(&u[5 + 4 * r..9 + 4 * r]);
    }
    (PhaseSpaceState::new(u[0], u[1], u[2], u[3]), u[4], m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::HamiltonianParams;

    #[test]
    fn zero_duration_is_single_sample() {
        let p = HamiltonianParams::default();
        let s = PhaseSpaceState::new(0.0, 0.0, 1.0, 1.0);
        let tr = integrate(&p, &s, 0.0, 1e-10).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr.action_samples[0], 0.0);
    }

    #[test]
    fn solver_matches_exponential() {
        let y = dopri(|u: &[f64; 1]| [-u[0]], [1.0], 3.0, 1e-12, Output::Steps, |_, _| {}).unwrap();
        assert!((y[0] - (-3.0f64).exp()).abs() < 1e-11);
    }

    #[test]
    fn uniform_sampling_hits_mesh() {
        let p = HamiltonianParams::default();
        let s = PhaseSpaceState::new(0.0, 0.0, 1.0, 1.0);
        let tr = integrate_uniform(&p, &s, 2.0, 8, 1e-10).unwrap();
        assert_eq!(tr.len(), 9);
        for (k, t) in tr.times.iter().enumerate() {
            assert!((t - 0.25 * k as f64).abs() < 1e-15);
        }
    }

    #[test]
    fn tangent_map_matches_finite_differences() {
        let p = HamiltonianParams::default();
        let s = PhaseSpaceState::new(0.3, -0.2, 1.1, 0.7);
        let (_, _, m) = propagate_tangent(&p, &s, 3.0, 1e-13).unwrap();
        let h = 1e-6;
        for c in 0..4 {
            let mut a = s.to_array();
            let mut b = s.to_array();
            a[c] += h;
            b[c] -= h;
            let fa = propagate_tangent(&p, &PhaseSpaceState::from_array(a), 3.0, 1e-13).unwrap().0.to_array();
            let fb = propagate_tangent(&p, &PhaseSpaceState::from_array(b), 3.0, 1e-13).unwrap().0.to_array();
            for r in 0..4 {
                let fd = (fa[r] - fb[r]) / (2.0 * h);
                assert!((fd - m[r][c]).abs() < 1e-5, "r{r} c{c}: {fd} vs {}", m[r][c]);
            }
        }
    }

    #[test]
    fn action_is_non_decreasing() {
        let p = HamiltonianParams::default();
        let s = PhaseSpaceState::new(0.5, 0.0, 0.9, 1.0);
        let tr = integrate(&p, &s, 20.0, 1e-10).unwrap();
        assert!(tr.action_samples.windows(2).all(|w| w[1] >= w[0]));
        assert!(tr.times.windows(2).all(|w| w[1] > w[0]));
    }
}

use nalgebra::{DMatrix, DVector};

use super::hamiltonian::{PhaseSpaceState, Potential};
use super::integrate::{dopri, identity_augmented, propagate_tangent, unpack, variational_rhs, Output, Trajectory};
use super::monodromy::{analyze_monodromy, flow_vector, winding_from_tangent_maps, MonodromyResult};
use crate::{Error, Result};

/// Closed classical orbit with its Table-style metadata.
#[derive(Debug, Clone)]
pub struct PeriodicOrbit {
    pub id: u32,
    pub initial_state: PhaseSpaceState,
    pub energy: f64,
    pub period: f64,
    pub action: f64,
    pub lambda: f64,
    pub mu: u32,
    pub n_s: u32,
    pub n_t: u32,
    /// Uniform samples over one period, t = 0 and t = T included, with
    /// action and winding samples.
    pub path: Trajectory,
    pub monodromy: MonodromyResult,
    pub closure_error: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct OrbitOptions {
    /// Target energy of the refined orbit.
    pub energy: f64,
    /// Closure tolerance in phase-space norm.
    pub closure_tol: f64,
    pub max_iterations: usize,
    /// Local error tolerance of the variational integration.
    pub ode_tol: f64,
    /// Path samples per period (also the winding resolution).
    pub samples: usize,
}

impl Default for OrbitOptions {
    fn default() -> Self {
        Self { energy: 1.0, closure_tol: 1e-9, max_iterations: 50, ode_tol: 1e-13, samples: 4000 }
    }
}

#[derive(Debug, Clone)]
pub struct Refinement {
    pub orbit: PeriodicOrbit,
    pub iterations: usize,
}

fn closure<P: Potential>(pot: &P, z0: &PhaseSpaceState, period: f64, tol: f64) -> Result<(f64, [f64; 4], [[f64; 4]; 4], PhaseSpaceState)> {
    let (zt, _, m) = propagate_tangent(pot, z0, period, tol)?;
    let a = zt.to_array();
    let b = z0.to_array();
    let r = [a[0] - b[0], a[1] - b[1], a[2] - b[2], a[3] - b[3]];
    let n = r.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok((n, r, m, zt))
}

/// Newton iteration on the return map φ_T(z) − z = 0 with the correction
/// kept orthogonal to the flow and the energy pinned to `opts.energy`.
pub fn refine_periodic_orbit<P: Potential>(
    pot: &P,
    id: u32,
    guess: &PhaseSpaceState,
    period_guess: f64,
    opts: &OrbitOptions,
) -> Result<Refinement> {
    if !(period_guess > 0.0) || !guess.is_finite() {
        return Err(Error::Domain("refinement needs a finite guess and positive period".into()));
    }
    let mut z = *guess;
    let mut t = period_guess;
    let mut iterations = 0;
    loop {
        let (err, r, m, zt) = closure(pot, &z, t, opts.ode_tol)?;
        let de = opts.energy - pot.energy(&z);
        if err <= opts.closure_tol && de.abs() <= opts.closure_tol {
            break;
        }
        if iterations >= opts.max_iterations {
            return Err(Error::Refinement { iterations, closure: err });
        }
        iterations += 1;
        let f0 = flow_vector(pot, &z);
        let ft = flow_vector(pot, &zt);
        let g = pot.gradient(z.x, z.y);
        let grad = [g[0], g[1], z.px, z.py];
        let mut jac = DMatrix::<f64>::zeros(6, 5);
        let mut rhs = DVector::<f64>::zeros(6);
        for i in 0..4 {
            for j in 0..4 {
                jac[(i, j)] = m[i][j] - if i == j { 1.0 } else { 0.0 };
            }
            jac[(i, 4)] = ft[i];
            rhs[i] = -r[i];
            jac[(4, i)] = f0[i];
            jac[(5, i)] = grad[i];
        }
        rhs[5] = de;
        let svd = jac.svd(true, true);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > 1e-12 * smax) {
            return Err(Error::DegenerateGuess);
        }
        let dx = svd.solve(&rhs, 0.0).map_err(|e| Error::Numeric(e.to_string()))?;
        let mut a = z.to_array();
        for i in 0..4 {
            a[i] += dx[i];
        }
        z = PhaseSpaceState::from_array(a);
        t += dx[4];
        if !(t > 0.0) || !z.is_finite() {
            return Err(Error::Refinement { iterations, closure: err });
        }
    }
    let orbit = PeriodicOrbit::from_initial(pot, 0, &z, t, opts)?;
    if orbit.monodromy.low_confidence {
        return Err(Error::MarginalOrbit { trace: orbit.monodromy.trace() });
    }
    Ok(Refinement { orbit: PeriodicOrbit { id, ..orbit }, iterations })
}

impl PeriodicOrbit {
    /// Builds the sampled path, monodromy, winding and symmetry counts of the
    /// orbit starting at `state` with period `period`; no refinement.
    pub fn from_initial<P: Potential>(pot: &P, id: u32, state: &PhaseSpaceState, period: f64, opts: &OrbitOptions) -> Result<Self> {
        let n = opts.samples.max(2000);
        let times: Vec<f64> = (1..=n).map(|k| period * k as f64 / n as f64).collect();
        let mut path = Trajectory { times: vec![], states: vec![], action_samples: vec![], winding_samples: None };
        let mut maps = Vec::with_capacity(n + 1);
        dopri(variational_rhs(pot), identity_augmented(state), period, opts.ode_tol, Output::Times(&times), |t, u| {
            let (s, a, m) = unpack(u);
            path.times.push(t);
            path.states.push(s);
            path.action_samples.push(a);
            maps.push(m);
        })?;
        let last = *path.states.last().expect("path has samples");
        let closure_error = last.distance(state);
        let monodromy = analyze_monodromy(pot, state, period, *maps.last().expect("path has samples"))?;
        let (mu, winding) = if monodromy.low_confidence {
            (0, vec![0.0; path.len()])
        } else {
            let w = winding_from_tangent_maps(pot, &monodromy, &path.times, &path.states, &maps, true)?;
            let total = *w.last().expect("non-empty");
            (total.round().max(0.0) as u32, w)
        };
        path.winding_samples = Some(winding);
        let (n_s, n_t) = symmetry_counts(&path.states);
        Ok(Self {
            id,
            initial_state: *state,
            energy: pot.energy(state),
            period,
            action: *path.action_samples.last().expect("non-empty"),
            lambda: monodromy.lambda,
            mu,
            n_s,
            n_t,
            path,
            monodromy,
            closure_error,
        })
    }

    /// Gutzwiller-type relevance λ·T·N_s·N_t with T = (3/4)S/E.
    pub fn relevance(&self) -> f64 {
        relevance(self.lambda, self.action, self.energy, self.n_s, self.n_t)
    }
}

pub fn relevance(lambda: f64, action: f64, energy: f64, n_s: u32, n_t: u32) -> f64 {
    lambda * 0.75 * action / energy * n_s as f64 * n_t as f64
}

/// Images of a configuration point under the eight C4v elements.
pub(crate) const C4V_CONFIG: [fn(f64, f64) -> (f64, f64); 8] = [
    |x, y| (x, y),
    |x, y| (-y, x),
    |x, y| (-x, -y),
    |x, y| (y, -x),
    |x, y| (x, -y),
    |x, y| (-x, y),
    |x, y| (y, x),
    |x, y| (-y, -x),
];

fn directed_hausdorff(a: &[[f64; 4]], b: &[[f64; 4]], dims: usize) -> f64 {
    a.iter()
        .map(|p| b.iter().map(|q| (0..dims).map(|i| (p[i] - q[i]).powi(2)).sum::<f64>()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
        .sqrt()
}

/// (N_s, N_t): number of distinct configuration-space images under C4v and
/// whether the time-reversed orbit is a distinct phase-space curve.
pub fn symmetry_counts(states: &[PhaseSpaceState]) -> (u32, u32) {
    let full: Vec<[f64; 4]> = states.iter().map(|s| s.to_array()).collect();
    let spacing = full
        .windows(2)
        .map(|w| (0..4).map(|i| (w[1][i] - w[0][i]).powi(2)).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let thresh = spacing + 1e-9;
    let stride = (full.len() / 400).max(1);
    let probe: Vec<[f64; 4]> = full.iter().step_by(stride).copied().collect();

    // N_s = |C4v| / |stabilizer of the configuration curve|.
    let stabilizer = C4V_CONFIG
        .iter()
        .filter(|g| {
            let img: Vec<[f64; 4]> = probe
                .iter()
                .map(|p| {
                    let (x, y) = g(p[0], p[1]);
                    [x, y, 0.0, 0.0]
                })
                .collect();
            directed_hausdorff(&img, &full, 2) < thresh
        })
        .count();
    let reversed: Vec<[f64; 4]> = probe.iter().map(|p| [p[0], p[1], -p[2], -p[3]]).collect();
    let n_t = if directed_hausdorff(&reversed, &full, 4) < thresh { 1 } else { 2 };
    ((8 / stabilizer.max(1)) as u32, n_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::HamiltonianParams;

    #[test]
    fn relevance_examples() {
        assert!((relevance(0.1014, 22.1111, 1.0, 2, 1) - 3.363).abs() < 1e-3);
        assert!((relevance(0.7669, 8.2945, 1.0, 2, 1) - 9.54).abs() < 5e-3);
        assert_eq!(relevance(0.0, 10.0, 1.0, 4, 2), 0.0);
    }

    #[test]
    fn diagonal_orbit_from_exact_guess() {
        let p = HamiltonianParams::default();
        let z = PhaseSpaceState::new(0.0, 0.0, 1.0, 1.0);
        let r = refine_periodic_orbit(&p, 3, &z, 6.220844869384598, &OrbitOptions::default()).unwrap();
        assert!(r.iterations <= 1);
        let o = r.orbit;
        assert_eq!(o.id, 3);
        assert!((o.action - 8.2945).abs() < 1e-4);
        assert!((o.lambda - 0.7669).abs() < 1e-3);
        assert_eq!(o.mu, 2);
        assert_eq!((o.n_s, o.n_t), (2, 1));
        assert!((o.period - 0.75 * o.action).abs() < 1e-4);
    }
}

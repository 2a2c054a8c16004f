use super::hamiltonian::{PhaseSpaceState, Potential};
use super::integrate::Trajectory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SectionCoordinate {
    X,
    Y,
}

/// Crossing condition `coordinate = 0` with the conjugate momentum of sign `sign`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SectionPlane {
    pub coordinate: SectionCoordinate,
    pub positive: bool,
}

impl Default for SectionPlane {
    fn default() -> Self {
        Self { coordinate: SectionCoordinate::Y, positive: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub time: f64,
    pub state: PhaseSpaceState,
}

fn deriv<P: Potential>(pot: &P, s: &PhaseSpaceState) -> [f64; 4] {
    let g = pot.gradient(s.x, s.y);
    [s.px, s.py, -g[0], -g[1]]
}

// Cubic Hermite interpolation of one component on [0, h].
fn hermite(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, tau: f64) -> f64 {
    let s = tau / h;
    let (s2, s3) = (s * s, s * s * s);
    (2.0 * s3 - 3.0 * s2 + 1.0) * y0 + (s3 - 2.0 * s2 + s) * h * d0 + (-2.0 * s3 + 3.0 * s2) * y1 + (s3 - s2) * h * d1
}

/// Interpolated crossings of the configured plane, located on the cubic
/// Hermite interpolant between consecutive samples.
pub fn poincare_section<P: Potential>(pot: &P, traj: &Trajectory, plane: SectionPlane) -> Vec<SectionPoint> {
    let idx = match plane.coordinate {
        SectionCoordinate::X => 0,
        SectionCoordinate::Y => 1,
    };
    let mut out = Vec::new();
    for k in 1..traj.len() {
        let (a, b) = (traj.states[k - 1].to_array(), traj.states[k].to_array());
        let crosses = if plane.positive { a[idx] < 0.0 && b[idx] >= 0.0 } else { a[idx] > 0.0 && b[idx] <= 0.0 };
        if !crosses {
            continue;
        }
        let h = traj.times[k] - traj.times[k - 1];
        let (da, db) = (deriv(pot, &traj.states[k - 1]), deriv(pot, &traj.states[k]));
        let comp = |i: usize, tau: f64| hermite(a[i], b[i], da[i], db[i], h, tau);
        let (mut lo, mut hi) = (0.0, h);
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            let v = comp(idx, mid);
            if (v < 0.0) == plane.positive {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let tau = 0.5 * (lo + hi);
        let mut s = [comp(0, tau), comp(1, tau), comp(2, tau), comp(3, tau)];
        s[idx] = 0.0;
        out.push(SectionPoint { time: traj.times[k - 1] + tau, state: PhaseSpaceState::from_array(s) });
    }
    out
}

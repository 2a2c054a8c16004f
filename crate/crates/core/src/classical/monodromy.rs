use num_complex::Complex64;

use super::hamiltonian::{PhaseSpaceState, Potential};
use crate::{Error, Result};

/// Linearized return map of a closed orbit restricted to the energy shell
/// modulo the flow direction.
#[derive(Debug, Clone, PartialEq)]
pub struct MonodromyResult {
    pub transversal_matrix: [[f64; 2]; 2],
    /// (unstable, stable) eigenvalues; real for hyperbolic orbits.
    pub eigenvalues: (f64, f64),
    pub lambda: f64,
    pub hyperbolic_with_reflection: bool,
    /// Set when |trace| is within 1e-6 of 2 or below it (no hyperbolic splitting).
    pub low_confidence: bool,
    /// Full 4×4 tangent map over one period.
    pub full_matrix: [[f64; 4]; 4],
    /// Orthonormal transversal basis (w₁, w₂) used for `transversal_matrix`.
    pub transversal_basis: [[f64; 4]; 2],
}

pub(crate) fn flow_vector<P: Potential>(pot: &P, s: &PhaseSpaceState) -> [f64; 4] {
    let g = pot.gradient(s.x, s.y);
    [s.px, s.py, -g[0], -g[1]]
}

fn energy_gradient<P: Potential>(pot: &P, s: &PhaseSpaceState) -> [f64; 4] {
    let g = pot.gradient(s.x, s.y);
    [g[0], g[1], s.px, s.py]
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(u, v)| u * v).sum()
}

fn axpy(y: &mut [f64; 4], a: f64, x: &[f64; 4]) {
    for i in 0..4 {
        y[i] += a * x[i];
    }
}

fn normalized(mut v: [f64; 4]) -> Option<[f64; 4]> {
    let n = dot(&v, &v).sqrt();
    if n < 1e-12 {
        return None;
    }
    v.iter_mut().for_each(|c| *c /= n);
    Some(v)
}

pub(crate) fn mat_vec(m: &[[f64; 4]; 4], v: &[f64; 4]) -> [f64; 4] {
    let mut out = [0.0; 4];
    for r in 0..4 {
        out[r] = dot(&m[r], v);
    }
    out
}

/// Orthonormal pair spanning the energy-shell tangent space orthogonal to the flow.
fn transversal_basis<P: Potential>(pot: &P, s: &PhaseSpaceState) -> Result<[[f64; 4]; 2]> {
    let n = normalized(energy_gradient(pot, s)).ok_or(Error::DegenerateGuess)?;
    let f = normalized(flow_vector(pot, s)).ok_or(Error::DegenerateGuess)?;
    let mut basis = Vec::with_capacity(2);
    for k in 0..4 {
        let mut v = [0.0; 4];
        v[k] = 1.0;
        for e in [&n, &f].into_iter().chain(basis.iter()) {
            let c = dot(&v, e);
            axpy(&mut v, -c, e);
        }
        if let Some(w) = normalized(v) {
            if dot(&w, &w) > 0.5 && basis.len() < 2 {
                // Re-orthogonalize once for stability.
                let mut w2 = w;
                for e in [&n, &f].into_iter().chain(basis.iter()) {
                    let c = dot(&w2, e);
                    axpy(&mut w2, -c, e);
                }
                if let Some(w2) = normalized(w2) {
                    basis.push(w2);
                }
            }
        }
        if basis.len() == 2 {
            break;
        }
    }
    if basis.len() < 2 {
        return Err(Error::DegenerateGuess);
    }
    Ok([basis[0], basis[1]])
}

/// Monodromy analysis from the full tangent map `m` of a closed orbit
/// starting at `s` with period `period`.
pub fn analyze_monodromy<P: Potential>(pot: &P, s: &PhaseSpaceState, period: f64, m: [[f64; 4]; 4]) -> Result<MonodromyResult> {
    let w = transversal_basis(pot, s)?;
    let mut b = [[0.0; 2]; 2];
    for i in 0..2 {
        let mw = mat_vec(&m, &w[i]);
        for k in 0..2 {
            b[k][i] = dot(&w[k], &mw);
        }
    }
    let tr = b[0][0] + b[1][1];
    let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
    let disc = tr * tr - 4.0 * det;
    let low_confidence = tr.abs() < 2.0 + 1e-6;
    let (eigenvalues, lambda) = if disc > 0.0 {
        let r = disc.sqrt();
        let (l1, l2) = ((tr + r) / 2.0, (tr - r) / 2.0);
        let (u, st) = if l1.abs() >= l2.abs() { (l1, l2) } else { (l2, l1) };
        ((u, st), u.abs().ln() / period)
    } else {
        // Elliptic: unit-modulus complex pair; report the real part twice.
        ((tr / 2.0, tr / 2.0), 0.0)
    };
    Ok(MonodromyResult {
        transversal_matrix: b,
        eigenvalues,
        lambda,
        hyperbolic_with_reflection: tr < -2.0,
        low_confidence,
        full_matrix: m,
        transversal_basis: w,
    })
}

impl MonodromyResult {
    pub fn determinant(&self) -> f64 {
        let b = &self.transversal_matrix;
        b[0][0] * b[1][1] - b[0][1] * b[1][0]
    }

    pub fn trace(&self) -> f64 {
        self.transversal_matrix[0][0] + self.transversal_matrix[1][1]
    }

    /// Phase-space vector of the unstable (`unstable = true`) or stable direction.
    pub fn manifold_direction(&self, unstable: bool) -> Option<[f64; 4]> {
        if self.low_confidence {
            return None;
        }
        let lam = if unstable { self.eigenvalues.0 } else { self.eigenvalues.1 };
        let b = &self.transversal_matrix;
        let c1 = [b[0][1], lam - b[0][0]];
        let c2 = [lam - b[1][1], b[1][0]];
        let c = if c1[0].hypot(c1[1]) >= c2[0].hypot(c2[1]) { c1 } else { c2 };
        let mut v = [0.0; 4];
        axpy(&mut v, c[0], &self.transversal_basis[0]);
        axpy(&mut v, c[1], &self.transversal_basis[1]);
        normalized(v)
    }
}

/// Continuous winding μ_t of the Lagrangian plane spanned by the flow vector
/// and the rescaled manifold direction ξ̃(t) = e^{∓λt} M(t) ξ, in half turns.
pub fn winding_from_tangent_maps<P: Potential>(
    pot: &P,
    mono: &MonodromyResult,
    times: &[f64],
    states: &[PhaseSpaceState],
    maps: &[[[f64; 4]; 4]],
    unstable: bool,
) -> Result<Vec<f64>> {
    let xi = mono.manifold_direction(unstable).ok_or(Error::MarginalOrbit { trace: mono.trace() })?;
    let rate = if unstable { -mono.lambda } else { mono.lambda };
    let mut out = Vec::with_capacity(times.len());
    let mut prev = 0.0;
    let mut acc = 0.0;
    for k in 0..times.len() {
        let f = flow_vector(pot, &states[k]);
        let mut u = mat_vec(&maps[k], &xi);
        let scale = (rate * times[k]).exp();
        u.iter_mut().for_each(|c| *c *= scale);
        // Columns (F, u); q-part minus i times p-part.
        let z = |i: usize, v: &[f64; 4]| Complex64::new(v[i], -v[i + 2]);
        let d = z(0, &f) * z(1, &u) - z(1, &f) * z(0, &u);
        let arg = d.arg();
        if k == 0 {
            prev = arg;
            out.push(0.0);
            continue;
        }
        let mut da = arg - prev;
        while da > std::f64::consts::PI {
            da -= 2.0 * std::f64::consts::PI;
        }
        while da < -std::f64::consts::PI {
            da += 2.0 * std::f64::consts::PI;
        }
        if da.abs() > std::f64::consts::FRAC_PI_2 {
            return Err(Error::WindingResolution { sample: k, jump: da });
        }
        acc += da;
        prev = arg;
        out.push(acc / std::f64::consts::PI);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transversal_basis_is_orthonormal_and_on_shell() {
        let p = crate::classical::HamiltonianParams::default();
        let s = PhaseSpaceState::new(0.4, -0.3, 1.0, 0.9);
        let w = transversal_basis(&p, &s).unwrap();
        let f = flow_vector(&p, &s);
        let n = energy_gradient(&p, &s);
        for a in &w {
            assert!((dot(a, a) - 1.0).abs() < 1e-14);
            assert!(dot(a, &f).abs() < 1e-14);
            assert!(dot(a, &n).abs() < 1e-14);
        }
        assert!(dot(&w[0], &w[1]).abs() < 1e-14);
    }
}

use std::f64::consts::PI;

use super::Irrep;
use crate::classical::HamiltonianParams;
use crate::quad::adaptive_simpson;

/// Smooth state counting N_sc(E) = c E^{3/2} + b E^{3/4} for one symmetry class.
///
/// The bulk constant comes from the phase-space volume of the fundamental
/// domain (1/8 of the plane for the one-dimensional irreps, 1/4 for each E
/// partner). The E^{3/4} term is the perimeter correction of the symmetry
/// lines: +1/(4πħ)∫p dl for Neumann edges, −1/(4πħ)∫p dl for Dirichlet ones.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeylLaw {
    pub irrep: Irrep,
    pub bulk: f64,
    pub boundary: f64,
}

/// ∫_0^1 sqrt(1 − s⁴) ds via s = sin θ.
fn quartic_arc() -> f64 {
    adaptive_simpson(&|t: f64| t.cos().powi(2) * (1.0 + t.sin().powi(2)).sqrt(), 0.0, PI / 2.0, 1e-15)
}

/// ∫ p dl at E = 1 along the half axis and the half diagonal.
pub fn symmetry_line_actions(params: &HamiltonianParams) -> (f64, f64) {
    let k = quartic_arc() * 2f64.sqrt();
    let axis = (4.0 / params.beta).powf(0.25);
    let diag = (8.0 / (1.0 + params.beta)).powf(0.25);
    (axis * k, diag * k)
}

/// (1/3)∫_0^{π/4} dφ / sqrt(v(φ)), v the angular part of the potential.
pub fn wedge_integral(params: &HamiltonianParams) -> f64 {
    let b = params.beta;
    let v = move |phi: f64| {
        let (c, s) = (phi.cos(), phi.sin());
        0.5 * c * c * s * s + 0.25 * b * (c.powi(4) + s.powi(4))
    };
    adaptive_simpson(&|phi: f64| 1.0 / (3.0 * v(phi).sqrt()), 0.0, PI / 4.0, 1e-14)
}

impl WeylLaw {
    pub fn new(irrep: Irrep, params: &HamiltonianParams) -> Self {
        let hbar = params.hbar;
        let c8 = wedge_integral(params) / (2.0 * PI * hbar * hbar);
        let (j_axis, j_diag) = symmetry_line_actions(params);
        let (bulk, edges) = match irrep {
            // (axis edge sign, diagonal edge sign)
            Irrep::A1 => (c8, (1.0, 1.0)),
            Irrep::A2 => (c8, (-1.0, -1.0)),
            Irrep::B1 => (c8, (1.0, -1.0)),
            Irrep::B2 => (c8, (-1.0, 1.0)),
            // One Neumann and one Dirichlet half axis: the corrections cancel.
            Irrep::E1 | Irrep::E2 => (2.0 * c8, (0.0, 0.0)),
        };
        let boundary = (edges.0 * j_axis + edges.1 * j_diag) / (4.0 * PI * hbar);
        Self { irrep, bulk, boundary }
    }

    pub fn bulk_count(&self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        self.bulk * e.powf(1.5)
    }

    pub fn count(&self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        (self.bulk * e.powf(1.5) + self.boundary * e.powf(0.75)).max(0.0)
    }

    pub fn density(&self, e: f64) -> f64 {
        if e <= 0.0 {
            return 0.0;
        }
        (1.5 * self.bulk * e.sqrt() + 0.75 * self.boundary * e.powf(-0.25)).max(0.0)
    }
}

pub fn weyl_count(e: f64, irrep: Irrep, params: &HamiltonianParams) -> f64 {
    WeylLaw::new(irrep, params).count(e)
}

pub fn density_of_states(e: f64, irrep: Irrep, params: &HamiltonianParams) -> f64 {
    WeylLaw::new(irrep, params).density(e)
}

//! Classical mechanics of the quartic oscillator.

mod hamiltonian;
mod integrate;
mod monodromy;
mod orbit;
mod scaling;
mod section;
mod table;

pub use hamiltonian::{eval_hamiltonian, HamiltonianParams, PhaseSpaceState, Potential};
pub use integrate::{integrate, integrate_uniform, propagate_tangent, Trajectory};
pub use monodromy::{analyze_monodromy, winding_from_tangent_maps, MonodromyResult};
pub use orbit::{refine_periodic_orbit, relevance, symmetry_counts, OrbitOptions, PeriodicOrbit, Refinement};
pub use scaling::{scale_action, scale_state, scale_time, scale_trajectory};
pub use section::{poincare_section, SectionCoordinate, SectionPlane, SectionPoint};
pub use table::{format_orbit_table, parse_orbit_table, read_orbit_table, write_orbit_table, OrbitRecord, DEFAULT_ORBIT_TABLE};

/// Monodromy of a built orbit (recomputed from its initial state).
pub fn compute_monodromy<P: Potential>(pot: &P, po: &PeriodicOrbit, tol: f64) -> crate::Result<MonodromyResult> {
    let (_, _, m) = propagate_tangent(pot, &po.initial_state, po.period, tol)?;
    analyze_monodromy(pot, &po.initial_state, po.period, m)
}

/// Winding samples μ_t along the orbit path and the integer μ = μ_T.
pub fn compute_winding(po: &PeriodicOrbit) -> (Vec<f64>, u32) {
    let w = po.path.winding_samples.clone().unwrap_or_else(|| vec![0.0; po.path.len()]);
    (w, po.mu)
}

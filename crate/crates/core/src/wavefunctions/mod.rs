//! Grid wavefunctions: frozen Gaussians, tube and scar functions,
//! split-operator propagation and C4v projection.

mod gaussian;
mod grid;
mod nodes;
mod propagate;
mod scar;
mod spectral;
mod symmetry;
mod tube;
mod wavefunction;

pub use gaussian::frozen_gaussian;
pub use grid::Grid2D;
pub use nodes::{count_sign_changes, interpolate_real};
pub use propagate::{propagate, Propagator, PropagatorConfig, SplitOrder};
pub use scar::{
    ehrenfest_time, ehrenfest_time_with, scar_function, semiclassical_dispersion, EhrenfestConstants, ScarFunction, ScarOptions, S1,
};
pub use spectral::GridHamiltonian;
pub use symmetry::{apply_op, project, symmetry_defect, SymOp};
pub use tube::{phase_along_orbit, scaled_path, tube_function, tube_integral, TubeOptions};
pub use wavefunction::{inner_product, WaveFunction};

/// σ = sqrt(⟨ψ|(Ĥ − E_ref)²|ψ⟩).
pub fn energy_dispersion(wf: &WaveFunction, e_ref: f64, ham: &GridHamiltonian) -> crate::Result<f64> {
    ham.energy_dispersion(wf, e_ref)
}

/// ⟨a|Ĥ|b⟩ on the grid.
pub fn h_element(a: &WaveFunction, b: &WaveFunction, ham: &GridHamiltonian) -> crate::Result<num_complex::Complex64> {
    ham.h_element(a, b)
}

use num_complex::Complex64;

use super::gaussian::add_gaussian;
use super::symmetry::project;
use super::wavefunction::inner_product;
use super::{Grid2D, WaveFunction};
use crate::classical::{scale_trajectory, PeriodicOrbit, Trajectory};
use crate::quantization::BSLevel;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TubeOptions {
    /// Frozen-Gaussian width parameter (α_x = α_y).
    pub alpha: f64,
    /// Minimum number of Gaussians per period.
    pub min_steps: usize,
    /// Projections retaining less than this fraction of the norm are rejected.
    pub null_tol: f64,
}

impl Default for TubeOptions {
    fn default() -> Self {
        Self { alpha: 1.0, min_steps: 1000, null_tol: 1e-6 }
    }
}

/// γ_t = S_t/ħ − (π/2)μ_t on the orbit's time mesh.
pub fn phase_along_orbit(path: &Trajectory, hbar: f64) -> Vec<f64> {
    let w = path.winding_samples.as_deref();
    path.action_samples
        .iter()
        .enumerate()
        .map(|(k, s)| s / hbar - std::f64::consts::FRAC_PI_2 * w.map_or(0.0, |w| w[k]))
        .collect()
}

/// Orbit path at the level's energy.
pub fn scaled_path(po: &PeriodicOrbit, energy: f64) -> Result<Trajectory> {
    scale_trajectory(&po.path, po.energy, energy)
}

/// Raw tube integral ∫₀ᵀ dt e^{iγ_t} φ_t over one period, with the frozen
/// Gaussian φ_t following the orbit scaled to `energy`.
///
/// The packet carries the Lagrangian phase S_t − E t; the e^{iEt} factor of
/// the tube integral cancels its −Et part, leaving e^{iγ_t}.
pub fn tube_integral(po: &PeriodicOrbit, energy: f64, grid: &Grid2D, hbar: f64, opts: &TubeOptions) -> Result<WaveFunction> {
    let path = scaled_path(po, energy)?;
    let n = path.len() - 1;
    if n < opts.min_steps {
        return Err(Error::Domain(format!("orbit path has {n} samples per period, need {}", opts.min_steps)));
    }
    let margin = 3.0 / opts.alpha.sqrt();
    if let Some(s) = path.states.iter().find(|s| !grid.contains(s.x, s.y, margin)) {
        return Err(Error::Coverage(format!("orbit {} reaches ({:.3}, {:.3}) at E = {energy}, too close to the grid edge", po.id, s.x, s.y)));
    }
    let gamma = phase_along_orbit(&path, hbar);
    let (xs, ys) = (grid.xs(), grid.ys());
    let mut values = vec![Complex64::new(0.0, 0.0); grid.len()];
    let w = path.duration() / n as f64;
    // Periodic trapezoid: the t = T sample duplicates t = 0.
    for k in 0..n {
        add_gaussian(grid, &xs, &ys, &mut values, &path.states[k], Complex64::from_polar(w, gamma[k]), opts.alpha, hbar);
    }
    WaveFunction::from_values(*grid, values)
}

/// Best real function in span{Re ψ, Im ψ}: the combination of largest norm,
/// i.e. the real superposition of the two running directions of the orbit.
pub(crate) fn realify(wf: &WaveFunction) -> Result<WaveFunction> {
    let g = wf.grid;
    let re = WaveFunction::from_real(g, &wf.values.iter().map(|v| v.re).collect::<Vec<_>>())?;
    let im = WaveFunction::from_real(g, &wf.values.iter().map(|v| v.im).collect::<Vec<_>>())?;
    let a = re.norm_sqr();
    let c = im.norm_sqr();
    let b = inner_product(&re, &im)?.re;
    // Leading eigenvector of [[a, b], [b, c]].
    let theta = 0.5 * (2.0 * b).atan2(a - c);
    let (u, v) = (theta.cos(), theta.sin());
    let values = re.values.iter().zip(&im.values).map(|(r, i)| Complex64::new(u * r.re + v * i.re, 0.0)).collect();
    WaveFunction::from_values(g, values)
}

/// Symmetry-adapted, real, normalized tube function of a BS level.
pub fn tube_function(po: &PeriodicOrbit, level: &BSLevel, grid: &Grid2D, hbar: f64, opts: &TubeOptions) -> Result<WaveFunction> {
    if po.id != level.orbit {
        return Err(Error::Domain(format!("level belongs to orbit {}, not {}", level.orbit, po.id)));
    }
    let raw = tube_integral(po, level.energy, grid, hbar, opts)?;
    let projected = project(&raw, level.irrep)?;
    let fraction = projected.norm() / raw.norm();
    if !(fraction > opts.null_tol) {
        return Err(Error::NullProjection { fraction });
    }
    let mut real = realify(&projected)?;
    real.normalize()?;
    Ok(real)
}

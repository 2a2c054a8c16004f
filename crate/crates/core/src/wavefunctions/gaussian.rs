use num_complex::Complex64;

use super::{Grid2D, WaveFunction};
use crate::classical::PhaseSpaceState;
use crate::{Error, Result};

/// Amplitude cutoff radius of a frozen Gaussian, in units of 1/√α.
pub(crate) const CUTOFF: f64 = 6.5;

/// 1D factor exp(−α(x − x0)² + i p (x − x0)/ħ) on the grid points with
/// |x − x0| ≤ CUTOFF/√α; returns the first index and the values.
pub(crate) fn factor(xs: &[f64], spacing: f64, x0: f64, p: f64, alpha: f64, hbar: f64) -> (usize, Vec<Complex64>) {
    let half = CUTOFF / alpha.sqrt();
    let lo_x = xs[0];
    let n = xs.len();
    let lo = (((x0 - half - lo_x) / spacing).floor().max(0.0)) as usize;
    let hi = ((((x0 + half - lo_x) / spacing).ceil()).max(0.0) as usize).min(n - 1);
    if lo > hi || lo >= n {
        return (0, Vec::new());
    }
    let vals = xs[lo..=hi]
        .iter()
        .map(|&x| {
            let d = x - x0;
            Complex64::from_polar((-alpha * d * d).exp(), p * d / hbar)
        })
        .collect();
    (lo, vals)
}

/// Adds c·exp(−α|r − r0|² + i p·(r − r0)/ħ) to `values` (truncated at the cutoff).
pub(crate) fn add_gaussian(grid: &Grid2D, xs: &[f64], ys: &[f64], values: &mut [Complex64], s: &PhaseSpaceState, c: Complex64, alpha: f64, hbar: f64) {
    let (i0, fx) = factor(xs, grid.dx, s.x, s.px, alpha, hbar);
    let (j0, fy) = factor(ys, grid.dy, s.y, s.py, alpha, hbar);
    for (dj, gy) in fy.iter().enumerate() {
        let row = (j0 + dj) * grid.nx + i0;
        let cy = c * gy;
        for (di, gx) in fx.iter().enumerate() {
            values[row + di] += cy * gx;
        }
    }
}

/// Normalized frozen Gaussian centred on a phase-space point with phase e^{iγ}.
pub fn frozen_gaussian(grid: &Grid2D, point: &PhaseSpaceState, gamma: f64, alpha: f64, hbar: f64) -> Result<WaveFunction> {
    if !(alpha > 0.0) {
        return Err(Error::Domain(format!("Gaussian width parameter must be positive, got {alpha}")));
    }
    let margin = 3.0 / alpha.sqrt();
    if !grid.contains(point.x, point.y, margin) {
        return Err(Error::Coverage(format!("Gaussian centre ({}, {}) is within {margin} of the grid edge", point.x, point.y)));
    }
    let mut wf = WaveFunction::zeros(*grid);
    add_gaussian(grid, &grid.xs(), &grid.ys(), &mut wf.values, point, Complex64::from_polar(1.0, gamma), alpha, hbar);
    wf.normalize()?;
    Ok(wf)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::HamiltonianParams;
    use crate::wavefunctions::{inner_product, GridHamiltonian};

    #[test]
    fn origin_gaussian_is_real_and_peaked() {
        let g = Grid2D::square(64, 6.0).unwrap();
        let w = frozen_gaussian(&g, &PhaseSpaceState::default(), 0.0, 1.0, 1.0).unwrap();
        assert!(w.values.iter().all(|v| v.im == 0.0 && v.re >= 0.0));
        let peak = w.values.iter().map(|v| v.re).fold(0.0, f64::max);
        assert_eq!(peak, w.at(31, 31).re);
    }

    #[test]
    fn moments() {
        let g = Grid2D::square(128, 8.0).unwrap();
        let pt = PhaseSpaceState::new(0.8, -1.1, 1.7, -0.6);
        let w = frozen_gaussian(&g, &pt, 0.4, 1.0, 1.0).unwrap();
        let (mut mx, mut vx) = (0.0, 0.0);
        for j in 0..g.ny {
            for i in 0..g.nx {
                let d = w.at(i, j).norm_sqr() * g.cell_area();
                mx += d * g.x(i);
                vx += d * (g.x(i) - pt.x).powi(2);
            }
        }
        assert!((mx - pt.x).abs() < 1e-10);
        assert!((vx - 0.25).abs() < 1e-10);
        let h = GridHamiltonian::new(g, HamiltonianParams::default());
        let (px, py) = h.momentum_expectation(&w);
        assert!((px - pt.px).abs() < 1e-10 && (py - pt.py).abs() < 1e-10);
        let t = inner_product(&w, &h.apply_kinetic(&w)).unwrap().re;
        assert!((t - (pt.px * pt.px + pt.py * pt.py + 2.0) / 2.0).abs() < 1e-9);
    }

    #[test]
    fn centre_near_edge_is_rejected() {
        let g = Grid2D::square(64, 6.0).unwrap();
        assert!(matches!(frozen_gaussian(&g, &PhaseSpaceState::new(5.5, 0.0, 0.0, 0.0), 0.0, 1.0, 1.0), Err(Error::Coverage(_))));
    }
}

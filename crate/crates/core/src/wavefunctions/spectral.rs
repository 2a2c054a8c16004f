use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use super::wavefunction::{check_same_grid, inner_product};
use super::{Grid2D, WaveFunction};
use crate::classical::{HamiltonianParams, Potential};
use crate::Result;

/// Grid representation of H: potential on the grid, kinetic energy through
/// the discrete Fourier transform.
///
/// Plans are shared read-only; every operation allocates its own scratch so
/// one instance can serve concurrent tasks.
pub struct GridHamiltonian {
    pub grid: Grid2D,
    pub params: HamiltonianParams,
    pub(crate) potential: Vec<f64>,
    /// ħ²|k|²/2 in the transposed spectral layout (index ix_k · ny + iy_k).
    pub(crate) kinetic: Vec<f64>,
    fx: Arc<dyn Fft<f64>>,
    fx_inv: Arc<dyn Fft<f64>>,
    fy: Arc<dyn Fft<f64>>,
    fy_inv: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for GridHamiltonian {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GridHamiltonian").field("grid", &self.grid).field("params", &self.params).finish()
    }
}

/// Per-task buffers for spectral transforms.
pub(crate) struct Workspace {
    pub(crate) spectral: Vec<Complex64>,
    scratch: Vec<Complex64>,
}

fn transpose(src: &[Complex64], dst: &mut [Complex64], rows: usize, cols: usize) {
    const B: usize = 32;
    for r0 in (0..rows).step_by(B) {
        for c0 in (0..cols).step_by(B) {
            for r in r0..(r0 + B).min(rows) {
                for c in c0..(c0 + B).min(cols) {
                    dst[c * rows + r] = src[r * cols + c];
                }
            }
        }
    }
}

impl GridHamiltonian {
    pub fn new(grid: Grid2D, params: HamiltonianParams) -> Self {
        let mut planner = FftPlanner::new();
        let fx = planner.plan_fft_forward(grid.nx);
        let fx_inv = planner.plan_fft_inverse(grid.nx);
        let fy = planner.plan_fft_forward(grid.ny);
        let fy_inv = planner.plan_fft_inverse(grid.ny);
        let mut potential = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                potential.push(params.value(grid.x(i), grid.y(j)));
            }
        }
        let kx = Grid2D::wavenumbers(grid.nx, grid.dx);
        let ky = Grid2D::wavenumbers(grid.ny, grid.dy);
        let h2 = 0.5 * params.hbar * params.hbar;
        let mut kinetic = Vec::with_capacity(grid.len());
        for a in &kx {
            for b in &ky {
                kinetic.push(h2 * (a * a + b * b));
            }
        }
        Self { grid, params, potential, kinetic, fx, fx_inv, fy, fy_inv }
    }

    pub(crate) fn workspace(&self) -> Workspace {
        let n = self.grid.len();
        let s = self
            .fx
            .get_inplace_scratch_len()
            .max(self.fy.get_inplace_scratch_len())
            .max(self.fx_inv.get_inplace_scratch_len())
            .max(self.fy_inv.get_inplace_scratch_len());
        Workspace { spectral: vec![Complex64::new(0.0, 0.0); n], scratch: vec![Complex64::new(0.0, 0.0); s] }
    }

    /// Real-space `values` → `ws.spectral` (transposed layout). `values` is
    /// used as scratch and left holding the x-transformed rows.
    pub(crate) fn forward(&self, values: &mut [Complex64], ws: &mut Workspace) {
        let g = &self.grid;
        self.fx.process_with_scratch(values, &mut ws.scratch);
        transpose(values, &mut ws.spectral, g.ny, g.nx);
        self.fy.process_with_scratch(&mut ws.spectral, &mut ws.scratch);
    }

    /// `ws.spectral` → real-space `values`, including the 1/N normalization.
    pub(crate) fn inverse(&self, values: &mut [Complex64], ws: &mut Workspace) {
        let g = &self.grid;
        self.fy_inv.process_with_scratch(&mut ws.spectral, &mut ws.scratch);
        transpose(&ws.spectral, values, g.nx, g.ny);
        self.fx_inv.process_with_scratch(values, &mut ws.scratch);
        let s = 1.0 / g.len() as f64;
        values.iter_mut().for_each(|v| *v *= s);
    }

    pub fn apply_kinetic(&self, wf: &WaveFunction) -> WaveFunction {
        let mut ws = self.workspace();
        let mut v = wf.values.clone();
        self.forward(&mut v, &mut ws);
        ws.spectral.iter_mut().zip(&self.kinetic).for_each(|(c, t)| *c *= t);
        self.inverse(&mut v, &mut ws);
        WaveFunction { grid: wf.grid, values: v }
    }

    /// (⟨p̂x⟩, ⟨p̂y⟩) of the normalized state.
    pub fn momentum_expectation(&self, wf: &WaveFunction) -> (f64, f64) {
        let g = &self.grid;
        let mut ws = self.workspace();
        let mut v = wf.values.clone();
        self.forward(&mut v, &mut ws);
        let kx = Grid2D::wavenumbers(g.nx, g.dx);
        let ky = Grid2D::wavenumbers(g.ny, g.dy);
        let (mut px, mut py, mut n) = (0.0, 0.0, 0.0);
        for (a, k1) in kx.iter().enumerate() {
            for (b, k2) in ky.iter().enumerate() {
                let w = ws.spectral[a * g.ny + b].norm_sqr();
                px += w * k1;
                py += w * k2;
                n += w;
            }
        }
        (self.params.hbar * px / n, self.params.hbar * py / n)
    }

    /// Ĥψ on the grid.
    pub fn apply(&self, wf: &WaveFunction) -> Result<WaveFunction> {
        if wf.grid != self.grid {
            return Err(crate::Error::GridMismatch);
        }
        let mut out = self.apply_kinetic(wf);
        out.values.iter_mut().zip(&wf.values).zip(&self.potential).for_each(|((o, w), v)| *o += w * v);
        Ok(out)
    }

    /// ⟨a|Ĥ|b⟩.
    pub fn h_element(&self, a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
        check_same_grid(a, b)?;
        inner_product(a, &self.apply(b)?)
    }

    /// ⟨ψ|Ĥ|ψ⟩/⟨ψ|ψ⟩.
    pub fn expectation(&self, wf: &WaveFunction) -> Result<f64> {
        Ok(self.h_element(wf, wf)?.re / wf.norm_sqr())
    }

    /// sqrt(⟨ψ|(Ĥ − E_ref)²|ψ⟩) for the normalized state.
    pub fn energy_dispersion(&self, wf: &WaveFunction, e_ref: f64) -> Result<f64> {
        let mut hw = self.apply(wf)?;
        hw.axpy(Complex64::new(-e_ref, 0.0), wf)?;
        Ok((hw.norm_sqr() / wf.norm_sqr()).sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn packet(g: Grid2D) -> WaveFunction {
        WaveFunction::from_fn(g, |x, y| {
            let r = (-(x - 0.5).powi(2) - (y + 0.3).powi(2)).exp();
            Complex64::from_polar(r, 1.3 * x - 0.4 * y)
        })
        .normalized()
        .unwrap()
    }

    #[test]
    fn kinetic_energy_of_gaussian() {
        // ψ ∝ exp(−|r|² + i p·r): ⟨T⟩ = (|p|² + 2)/2 with α = 1 (ħ = 1).
        let g = Grid2D::square(128, 8.0).unwrap();
        let h = GridHamiltonian::new(g, HamiltonianParams::default());
        let w = packet(g);
        let t = inner_product(&w, &h.apply_kinetic(&w)).unwrap().re;
        assert!((t - (1.3f64.powi(2) + 0.4f64.powi(2) + 2.0) / 2.0).abs() < 1e-10, "{t}");
    }

    #[test]
    fn hermitian_elements() {
        let g = Grid2D::square(64, 7.0).unwrap();
        let h = GridHamiltonian::new(g, HamiltonianParams::default());
        let a = packet(g);
        let b = WaveFunction::from_fn(g, |x, y| Complex64::new((-(x * x + 2.0 * y * y)).exp() * (1.0 + x), 0.2 * y)).normalized().unwrap();
        let hab = h.h_element(&a, &b).unwrap();
        let hba = h.h_element(&b, &a).unwrap();
        assert!((hab - hba.conj()).norm() < 1e-12);
        assert!(h.h_element(&a, &a).unwrap().im.abs() < 1e-13);
    }

    #[test]
    fn dispersion_minimized_at_mean() {
        let g = Grid2D::square(64, 7.0).unwrap();
        let h = GridHamiltonian::new(g, HamiltonianParams::default());
        let a = packet(g);
        let e = h.expectation(&a).unwrap();
        let s0 = h.energy_dispersion(&a, e).unwrap();
        assert!(h.energy_dispersion(&a, e + 0.1).unwrap() > s0);
        assert!(h.energy_dispersion(&a, e - 0.1).unwrap() > s0);
    }
}

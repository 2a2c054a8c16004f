use std::f64::consts::PI;

use num_complex::Complex64;

use super::propagate::{check_leakage, Propagator, SplitOrder};
use super::{GridHamiltonian, WaveFunction};
use crate::quantization::{BSLevel, Irrep};
use crate::{Error, Result};

/// Semiclassical constants of the Ehrenfest-time estimate at E = 1:
/// area of the desymmetrized surface of section and mean Lyapunov exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EhrenfestConstants {
    pub area_1d: f64,
    pub area_e: f64,
    pub lyapunov: f64,
}

impl Default for EhrenfestConstants {
    fn default() -> Self {
        Self { area_1d: 5.5278, area_e: 11.0555, lyapunov: 0.3848 }
    }
}

impl EhrenfestConstants {
    pub fn area(&self, e: f64, irrep: Irrep) -> f64 {
        let a = if irrep.is_one_dimensional() { self.area_1d } else { self.area_e };
        a * e.powf(0.75)
    }

    pub fn mean_lyapunov(&self, e: f64) -> f64 {
        self.lyapunov * e.powf(0.25)
    }
}

/// T_E = ln(A_tr/ħ)/(2λ̄).
pub fn ehrenfest_time(e: f64, irrep: Irrep, hbar: f64) -> f64 {
    ehrenfest_time_with(&EhrenfestConstants::default(), e, irrep, hbar)
}

pub fn ehrenfest_time_with(c: &EhrenfestConstants, e: f64, irrep: Irrep, hbar: f64) -> f64 {
    (c.area(e, irrep) / hbar).ln() / (2.0 * c.mean_lyapunov(e))
}

pub const S1: f64 = 1.06078;

/// σ̄ = (π/2)ħλ(s₂ + λT_E)/[(s₁ + λT_E)(s₂ + λT_E) + s₂²], s₂ = π/√2 − s₁.
pub fn semiclassical_dispersion(lambda: f64, t_e: f64, hbar: f64) -> f64 {
    let s2 = PI / 2f64.sqrt() - S1;
    let lt = lambda * t_e;
    0.5 * PI * hbar * lambda * (s2 + lt) / ((S1 + lt) * (s2 + lt) + s2 * s2)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScarOptions {
    pub order: SplitOrder,
    /// Upper bound on E·dt/ħ for the time quadrature.
    pub phase_step: f64,
    pub leakage_tol: f64,
}

impl Default for ScarOptions {
    fn default() -> Self {
        Self { order: SplitOrder::Second, phase_step: PI / 8.0, leakage_tol: 1e-6 }
    }
}

/// Tube function refined by a cos-windowed Fourier transform of its evolution.
#[derive(Debug, Clone)]
pub struct ScarFunction {
    pub wavefunction: WaveFunction,
    pub orbit: u32,
    pub n: u32,
    pub irrep: Irrep,
    pub bs_energy: f64,
    pub sigma: f64,
    pub ehrenfest_time: f64,
}

impl ScarFunction {
    pub fn level(&self) -> BSLevel {
        BSLevel { orbit: self.orbit, n: self.n, irrep: self.irrep, energy: self.bs_energy }
    }
}

/// ∫_{−T_E}^{T_E} dt cos(πt/2T_E) e^{−i(Ĥ − E_n)t/ħ} ψ_tube, trapezoid rule,
/// normalized, with the dispersion about E_n attached.
pub fn scar_function(tube: &WaveFunction, level: &BSLevel, t_e: f64, ham: &GridHamiltonian, opts: &ScarOptions) -> Result<ScarFunction> {
    if tube.grid != ham.grid {
        return Err(Error::GridMismatch);
    }
    let e = level.energy;
    let hbar = ham.params.hbar;
    let mut wf = tube.clone();
    let max_dt = opts.phase_step * hbar / e;
    if t_e > 0.0 && t_e >= 1e-3 * max_dt {
        let n = (t_e / max_dt).ceil().max(1.0) as usize;
        let dt = t_e / n as f64;
        let weight = |k: usize| {
            let t = k as f64 * dt;
            let end = if k == n { 0.5 } else { 1.0 };
            Complex64::from_polar(end * (PI * t / (2.0 * t_e)).cos() * dt, e * t / hbar)
        };
        let real_tube = tube.imaginary_fraction() < 1e-12;
        let run = |sign: f64| -> Result<Vec<Complex64>> {
            let mut prop = Propagator::new(ham, sign * dt, opts.order);
            let mut cur = tube.values.clone();
            let mut acc: Vec<Complex64> = cur.iter().map(|v| v * (0.5 * dt)).collect();
            for k in 1..=n {
                prop.step(&mut cur);
                let w = weight(k);
                let w = if sign > 0.0 { w } else { w.conj() };
                acc.iter_mut().zip(&cur).for_each(|(a, c)| *a += w * c);
            }
            Ok(acc)
        };
        let fwd = run(1.0)?;
        let values = if real_tube {
            // Real Ĥ and real ψ: the t < 0 half is the complex conjugate.
            fwd.iter().map(|v| Complex64::new(2.0 * v.re, 0.0)).collect()
        } else {
            let bwd = run(-1.0)?;
            let half = 0.5 * dt;
            fwd.iter().zip(&bwd).zip(&tube.values).map(|((a, b), t)| a + b - t * half).collect()
        };
        wf = WaveFunction::from_values(tube.grid, values)?;
    }
    wf.normalize()?;
    // The evolving tube may reach the edges through its high-energy tail;
    // the energy filter removes that part, so only the result is checked.
    check_leakage(&wf, opts.leakage_tol)?;
    let sigma = ham.energy_dispersion(&wf, e)?;
    Ok(ScarFunction { wavefunction: wf, orbit: level.orbit, n: level.n, irrep: level.irrep, bs_energy: e, sigma, ehrenfest_time: t_e })
}

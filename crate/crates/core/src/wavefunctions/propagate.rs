use num_complex::Complex64;

use super::spectral::{GridHamiltonian, Workspace};
use super::WaveFunction;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SplitOrder {
    /// Strang splitting, second order.
    Second,
    /// Triple-jump composition of Strang steps, fourth order.
    Fourth,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagatorConfig {
    /// Upper bound on the time step; the actual step divides the interval evenly.
    pub dt: f64,
    pub order: SplitOrder,
    /// Probability allowed in the outer cells before reporting leakage.
    pub leakage_tol: f64,
}

impl Default for PropagatorConfig {
    fn default() -> Self {
        Self { dt: 0.01, order: SplitOrder::Second, leakage_tol: 1e-10 }
    }
}

impl PropagatorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::Domain(format!("time step must be positive, got {}", self.dt)));
        }
        Ok(())
    }
}

/// Width of the boundary strip used for leakage checks.
pub(crate) fn boundary_cells(n: usize) -> usize {
    (n / 32).max(2)
}

/// Split-operator evolution e^{−iĤt/ħ} on a fixed grid with a fixed step.
pub struct Propagator<'a> {
    ham: &'a GridHamiltonian,
    ws: Workspace,
    /// Phases for the (sub)steps: (half potential, full kinetic) per stage.
    stages: Vec<(Vec<Complex64>, Vec<Complex64>)>,
    pub dt: f64,
}

impl<'a> Propagator<'a> {
    pub fn new(ham: &'a GridHamiltonian, dt: f64, order: SplitOrder) -> Self {
        let weights: Vec<f64> = match order {
            SplitOrder::Second => vec![1.0],
            SplitOrder::Fourth => {
                let c = 2f64.powf(1.0 / 3.0);
                let w1 = 1.0 / (2.0 - c);
                vec![w1, -c * w1, w1]
            }
        };
        let hbar = ham.params.hbar;
        let stages = weights
            .iter()
            .map(|w| {
                let h = w * dt;
                let v = ham.potential.iter().map(|v| Complex64::from_polar(1.0, -0.5 * h * v / hbar)).collect();
                let t = ham.kinetic.iter().map(|t| Complex64::from_polar(1.0, -h * t / hbar)).collect();
                (v, t)
            })
            .collect();
        Self { ham, ws: ham.workspace(), stages, dt }
    }

    pub fn step(&mut self, values: &mut [Complex64]) {
        for k in 0..self.stages.len() {
            let (v, t) = &self.stages[k];
            values.iter_mut().zip(v).for_each(|(a, p)| *a *= p);
            self.ham.forward(values, &mut self.ws);
            self.ws.spectral.iter_mut().zip(t).for_each(|(a, p)| *a *= p);
            self.ham.inverse(values, &mut self.ws);
            values.iter_mut().zip(v).for_each(|(a, p)| *a *= p);
        }
    }
}

/// Evolves `wf` for time `t` (either sign) with steps no longer than `config.dt`.
pub fn propagate(wf: &WaveFunction, t: f64, ham: &GridHamiltonian, config: &PropagatorConfig) -> Result<WaveFunction> {
    config.validate()?;
    if wf.grid != ham.grid {
        return Err(Error::GridMismatch);
    }
    if t == 0.0 {
        return Ok(wf.clone());
    }
    let n = (t.abs() / config.dt).ceil().max(1.0) as usize;
    let mut prop = Propagator::new(ham, t / n as f64, config.order);
    let mut out = wf.clone();
    for _ in 0..n {
        prop.step(&mut out.values);
    }
    check_leakage(&out, config.leakage_tol)?;
    Ok(out)
}

pub(crate) fn check_leakage(wf: &WaveFunction, tol: f64) -> Result<()> {
    let p = wf.boundary_probability(boundary_cells(wf.grid.nx.min(wf.grid.ny))) / wf.norm_sqr();
    if p > tol {
        return Err(Error::Leakage { probability: p });
    }
    Ok(())
}

/// Point in the four-dimensional phase space of the oscillator.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PhaseSpaceState {
    pub x: f64,
    pub y: f64,
    pub px: f64,
    pub py: f64,
}

impl PhaseSpaceState {
    pub const fn new(x: f64, y: f64, px: f64, py: f64) -> Self {
        Self { x, y, px, py }
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.x, self.y, self.px, self.py]
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    /// Euclidean phase-space distance.
    pub fn distance(&self, other: &Self) -> f64 {
        let a = self.to_array();
        let b = other.to_array();
        a.iter().zip(b.iter()).map(|(u, v)| (u - v) * (u - v)).sum::<f64>().sqrt()
    }
}

/// Configuration-space potential with the derivatives needed for the flow
/// and its linearization.
pub trait Potential: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
    fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2];

    fn energy(&self, s: &PhaseSpaceState) -> f64 {
        0.5 * (s.px * s.px + s.py * s.py) + self.value(s.x, s.y)
    }
}

/// Parameters of H = (px² + py²)/2 + x²y²/2 + β(x⁴ + y⁴)/4.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianParams {
    pub beta: f64,
    pub hbar: f64,
}

impl Default for HamiltonianParams {
    fn default() -> Self {
        Self { beta: 0.01, hbar: 1.0 }
    }
}

impl HamiltonianParams {
    pub fn new(beta: f64, hbar: f64) -> crate::Result<Self> {
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(crate::Error::Domain(format!("beta must be positive, got {beta}")));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(crate::Error::Domain(format!("hbar must be positive, got {hbar}")));
        }
        Ok(Self { beta, hbar })
    }
}

impl Potential for HamiltonianParams {
    fn value(&self, x: f64, y: f64) -> f64 {
        let (x2, y2) = (x * x, y * y);
        0.5 * x2 * y2 + 0.25 * self.beta * (x2 * x2 + y2 * y2)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let (x2, y2) = (x * x, y * y);
        [x * y2 + self.beta * x2 * x, y * x2 + self.beta * y2 * y]
    }

    fn hessian(&self, x: f64, y: f64) -> [[f64; 2]; 2] {
        let (x2, y2) = (x * x, y * y);
        let xy = 2.0 * x * y;
        [[y2 + 3.0 * self.beta * x2, xy], [xy, x2 + 3.0 * self.beta * y2]]
    }
}

pub fn eval_hamiltonian(state: &PhaseSpaceState, params: &HamiltonianParams) -> f64 {
    params.energy(state)
}

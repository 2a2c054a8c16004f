use std::f64::consts::PI;

use crate::classical::HamiltonianParams;
use crate::{Error, Result};

/// Uniform cell-centred grid on [−x_extent, x_extent] × [−y_extent, y_extent].
///
/// Cell centring makes the C4v reflections map grid points onto grid points
/// (index reversal and transposition).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    pub x_extent: f64,
    pub y_extent: f64,
    pub dx: f64,
    pub dy: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, x_extent: f64, y_extent: f64) -> Result<Self> {
        if !nx.is_power_of_two() || !ny.is_power_of_two() || nx < 4 || ny < 4 {
            return Err(Error::Domain(format!("grid sizes must be powers of two ≥ 4, got {nx}×{ny}")));
        }
        if !(x_extent > 0.0 && y_extent > 0.0) {
            return Err(Error::Domain("grid extents must be positive".into()));
        }
        Ok(Self { nx, ny, x_extent, y_extent, dx: 2.0 * x_extent / nx as f64, dy: 2.0 * y_extent / ny as f64 })
    }

    pub fn square(n: usize, extent: f64) -> Result<Self> {
        Self::new(n, n, extent, extent)
    }

    /// Grid resolving states up to energy `e`: half-extent 1.4× the axis
    /// turning point and at least six points per shortest de Broglie
    /// wavelength at momentum √(2.4 e).
    pub fn for_energy(e: f64, params: &HamiltonianParams) -> Result<Self> {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("grid energy must be positive, got {e}")));
        }
        let extent = 1.4 * (4.0 * e / params.beta).powf(0.25);
        let p_max = (2.0 * e * 1.2).sqrt();
        let dx_max = 2.0 * PI * params.hbar / p_max / 6.0;
        let n = ((2.0 * extent / dx_max).ceil() as usize).next_power_of_two().max(4);
        Self::square(n, extent)
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.x_extent + (i as f64 + 0.5) * self.dx
    }

    pub fn y(&self, j: usize) -> f64 {
        -self.y_extent + (j as f64 + 0.5) * self.dy
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x(i)).collect()
    }

    pub fn ys(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.y(j)).collect()
    }

    pub fn cell_area(&self) -> f64 {
        self.dx * self.dy
    }

    /// Row-major index (rows are y).
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn is_square(&self) -> bool {
        self.nx == self.ny && self.x_extent == self.y_extent
    }

    /// Angular wavenumbers in FFT ordering for a periodic axis of n points.
    pub(crate) fn wavenumbers(n: usize, spacing: f64) -> Vec<f64> {
        let l = n as f64 * spacing;
        (0..n)
            .map(|k| {
                let m = if k < n / 2 { k as f64 } else { k as f64 - n as f64 };
                2.0 * PI * m / l
            })
            .collect()
    }

    /// Whether the point lies at least `margin` inside the grid edges.
    pub fn contains(&self, x: f64, y: f64, margin: f64) -> bool {
        x.abs() <= self.x_extent - margin && y.abs() <= self.y_extent - margin
    }
}

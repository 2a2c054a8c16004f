use std::io::{Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::Grid2D;
use crate::{Error, Result};

/// Complex field on a [`Grid2D`], row-major with rows along y.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    pub grid: Grid2D,
    pub values: Vec<Complex64>,
}

impl WaveFunction {
    pub fn zeros(grid: Grid2D) -> Self {
        Self { grid, values: vec![Complex64::new(0.0, 0.0); grid.len()] }
    }

    pub fn from_values(grid: Grid2D, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::GridMismatch);
        }
        if values.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::Numeric("wavefunction has non-finite values".into()));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid2D, f: impl Fn(f64, f64) -> Complex64) -> Self {
        let mut values = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let y = grid.y(j);
            for i in 0..grid.nx {
                values.push(f(grid.x(i), y));
            }
        }
        Self { grid, values }
    }

    pub fn from_real(grid: Grid2D, re: &[f64]) -> Result<Self> {
        Self::from_values(grid, re.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn at(&self, i: usize, j: usize) -> Complex64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn norm_sqr(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.cell_area()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Scales to unit norm and returns the previous norm.
    pub fn normalize(&mut self) -> Result<f64> {
        let n = self.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::Numeric("cannot normalize a zero or non-finite state".into()));
        }
        self.scale(Complex64::new(1.0 / n, 0.0));
        Ok(n)
    }

    pub fn normalized(mut self) -> Result<Self> {
        self.normalize()?;
        Ok(self)
    }

    pub fn scale(&mut self, a: Complex64) {
        self.values.iter_mut().for_each(|v| *v *= a);
    }

    /// self += a · other
    pub fn axpy(&mut self, a: Complex64, other: &WaveFunction) -> Result<()> {
        check_same_grid(self, other)?;
        self.values.iter_mut().zip(&other.values).for_each(|(s, o)| *s += a * o);
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest |Im| relative to the largest |ψ|.
    pub fn imaginary_fraction(&self) -> f64 {
        let m = self.max_abs();
        if m == 0.0 {
            return 0.0;
        }
        self.values.iter().map(|v| v.im.abs()).fold(0.0, f64::max) / m
    }

    pub fn real_part(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    /// Probability contained in the outer `cells` rows/columns.
    pub fn boundary_probability(&self, cells: usize) -> f64 {
        let g = &self.grid;
        let c = cells.min(g.nx / 2).min(g.ny / 2);
        let mut p = 0.0;
        for j in 0..g.ny {
            for i in 0..g.nx {
                if i < c || j < c || i >= g.nx - c || j >= g.ny - c {
                    p += self.values[g.index(i, j)].norm_sqr();
                }
            }
        }
        p * g.cell_area()
    }

    /// Binary snapshot: magic, nx, ny (u64), extents and reference energy
    /// (f64), metadata length + UTF-8 text, then little-endian complex64 values.
    pub fn write_snapshot(&self, path: &Path, e_ref: f64, metadata: &str) -> Result<()> {
        let mut buf = Vec::with_capacity(64 + metadata.len() + 8 * self.values.len());
        buf.extend_from_slice(b"QSWF0001");
        buf.extend_from_slice(&(self.grid.nx as u64).to_le_bytes());
        buf.extend_from_slice(&(self.grid.ny as u64).to_le_bytes());
        buf.extend_from_slice(&self.grid.x_extent.to_le_bytes());
        buf.extend_from_slice(&self.grid.y_extent.to_le_bytes());
        buf.extend_from_slice(&e_ref.to_le_bytes());
        buf.extend_from_slice(&(metadata.len() as u64).to_le_bytes());
        buf.extend_from_slice(metadata.as_bytes());
        for v in &self.values {
            buf.extend_from_slice(&(v.re as f32).to_le_bytes());
            buf.extend_from_slice(&(v.im as f32).to_le_bytes());
        }
        std::fs::File::create(path)?.write_all(&buf)?;
        Ok(())
    }

    /// Reads a snapshot written by [`write_snapshot`](Self::write_snapshot);
    /// returns the state, its reference energy and metadata.
    pub fn read_snapshot(path: &Path) -> Result<(Self, f64, String)> {
        let mut buf = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut buf)?;
        let bad = || Error::parse(0, "malformed wavefunction snapshot");
        if buf.len() < 56 || &buf[..8] != b"QSWF0001" {
            return Err(bad());
        }
        let u64_at = |o: usize| u64::from_le_bytes(buf[o..o + 8].try_into().expect("8 bytes"));
        let f64_at = |o: usize| f64::from_le_bytes(buf[o..o + 8].try_into().expect("8 bytes"));
        let (nx, ny) = (u64_at(8) as usize, u64_at(16) as usize);
        let grid = Grid2D::new(nx, ny, f64_at(24), f64_at(32))?;
        let e_ref = f64_at(40);
        let mlen = u64_at(48) as usize;
        let start = 56 + mlen;
        if buf.len() != start + 8 * nx * ny {
            return Err(bad());
        }
        let meta = String::from_utf8(buf[56..start].to_vec()).map_err(|_| bad())?;
        let f32_at = |o: usize| f32::from_le_bytes(buf[o..o + 4].try_into().expect("4 bytes")) as f64;
        let values = (0..nx * ny).map(|k| Complex64::new(f32_at(start + 8 * k), f32_at(start + 8 * k + 4))).collect();
        Ok((Self { grid, values }, e_ref, meta))
    }

    /// `x,y,density` lines for plotting.
    pub fn density_csv(&self) -> String {
        let mut s = String::from("x,y,density\n");
        for j in 0..self.grid.ny {
            for i in 0..self.grid.nx {
                s.push_str(&format!("{:.17e},{:.17e},{:.17e}\n", self.grid.x(i), self.grid.y(j), self.at(i, j).norm_sqr()));
            }
        }
        s
    }
}

pub(crate) fn check_same_grid(a: &WaveFunction, b: &WaveFunction) -> Result<()> {
    if a.grid != b.grid {
        return Err(Error::GridMismatch);
    }
    Ok(())
}

/// Quadrature inner product ⟨a|b⟩.
pub fn inner_product(a: &WaveFunction, b: &WaveFunction) -> Result<Complex64> {
    check_same_grid(a, b)?;
    let s: Complex64 = a.values.iter().zip(&b.values).map(|(u, v)| u.conj() * v).sum();
    Ok(s * a.grid.cell_area())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gaussian(g: Grid2D) -> WaveFunction {
        WaveFunction::from_fn(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.3 * x))
    }

    #[test]
    fn normalization() {
        let g = Grid2D::square(64, 5.0).unwrap();
        let mut w = gaussian(g);
        w.normalize().unwrap();
        assert!((inner_product(&w, &w).unwrap().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn grid_mismatch_detected() {
        let a = WaveFunction::zeros(Grid2D::square(16, 2.0).unwrap());
        let b = WaveFunction::zeros(Grid2D::square(32, 2.0).unwrap());
        assert!(matches!(inner_product(&a, &b), Err(Error::GridMismatch)));
    }

    #[test]
    fn snapshot_round_trip() {
        let g = Grid2D::new(16, 8, 2.0, 1.5).unwrap();
        let w = gaussian(g);
        let dir = std::env::temp_dir().join(format!("qscar-snap-{}", std::process::id()));
        w.write_snapshot(&dir, 3.5, "po=5 n=2").unwrap();
        let (r, e, m) = WaveFunction::read_snapshot(&dir).unwrap();
        std::fs::remove_file(&dir).ok();
        assert_eq!(e, 3.5);
        assert_eq!(m, "po=5 n=2");
        assert_eq!(r.grid, g);
        for (a, b) in r.values.iter().zip(&w.values) {
            assert!((a - b).norm() < 1e-6);
        }
    }
}

//! Variational eigenpairs in a symmetry-adapted harmonic-oscillator product
//! basis. Used as the exact oracle for the scar-basis spectra.

use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::classical::HamiltonianParams;
use crate::quantization::Irrep;
use crate::wavefunctions::{Grid2D, WaveFunction};
use crate::{Error, Result};

/// Largest symmetry-adapted block accepted for dense diagonalization.
pub const MAX_BLOCK: usize = 4000;

/// States whose eigenvalue moves less than this under n_max → n_max + 4
/// are flagged converged.
pub const CONVERGENCE_TOL: f64 = 1e-5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HOBasisSpec {
    pub omega: f64,
    /// Product states |i j⟩ with i + j ≤ n_max.
    pub n_max: u32,
    pub irrep: Irrep,
}

impl HOBasisSpec {
    pub fn new(omega: f64, n_max: u32, irrep: Irrep) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return Err(Error::Domain(format!("oscillator frequency must be positive, got {omega}")));
        }
        Ok(Self { omega, n_max, irrep })
    }

    /// Representative product states (i, j) and the swap sign s of
    /// (|ij⟩ + s|ji⟩)/norm. s = 0 means no swap partner (E blocks).
    pub fn states(&self) -> (Vec<(u32, u32)>, i8) {
        let (px, py, s) = block_rule(self.irrep);
        let mut out = Vec::new();
        for i in (px..=self.n_max).step_by(2) {
            for j in (py..=self.n_max - i).step_by(2) {
                let keep = match s {
                    0 => true,
                    1 => i >= j,
                    _ => i > j,
                };
                if keep {
                    out.push((i, j));
                }
            }
        }
        (out, s)
    }

    pub fn len(&self) -> usize {
        self.states().0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Parity of (i, j) and swap sign per irrep.
fn block_rule(irrep: Irrep) -> (u32, u32, i8) {
    match irrep {
        Irrep::A1 => (0, 0, 1),
        Irrep::B1 => (0, 0, -1),
        Irrep::A2 => (1, 1, -1),
        Irrep::B2 => (1, 1, 1),
        Irrep::E1 => (1, 0, 0),
        Irrep::E2 => (0, 1, 0),
    }
}

fn x2(m: u32, n: u32) -> f64 {
    let (lo, hi) = (m.min(n) as f64, m.max(n));
    match hi - m.min(n) {
        0 => 2.0 * lo + 1.0,
        2 => ((lo + 1.0) * (lo + 2.0)).sqrt(),
        _ => 0.0,
    }
}

fn p2(m: u32, n: u32) -> f64 {
    let (lo, hi) = (m.min(n) as f64, m.max(n));
    match hi - m.min(n) {
        0 => 2.0 * lo + 1.0,
        2 => -((lo + 1.0) * (lo + 2.0)).sqrt(),
        _ => 0.0,
    }
}

fn x4(m: u32, n: u32) -> f64 {
    let (lo, hi) = (m.min(n) as f64, m.max(n));
    match hi - m.min(n) {
        0 => 6.0 * lo * lo + 6.0 * lo + 3.0,
        2 => (4.0 * lo + 6.0) * ((lo + 1.0) * (lo + 2.0)).sqrt(),
        4 => ((lo + 1.0) * (lo + 2.0) * (lo + 3.0) * (lo + 4.0)).sqrt(),
        _ => 0.0,
    }
}

/// ⟨i j|Ĥ|k l⟩ between HO product states of frequency ω.
pub fn ho_matrix_element(a: (u32, u32), b: (u32, u32), omega: f64, params: &HamiltonianParams) -> f64 {
    let h = params.hbar;
    let lx = h / (2.0 * omega);
    let lp = h * omega / 2.0;
    let ((i, j), (k, l)) = (a, b);
    let dik = if i == k { 1.0 } else { 0.0 };
    let djl = if j == l { 1.0 } else { 0.0 };
    0.5 * lp * (p2(i, k) * djl + p2(j, l) * dik)
        + 0.5 * lx * lx * x2(i, k) * x2(j, l)
        + 0.25 * params.beta * lx * lx * (x4(i, k) * djl + x4(j, l) * dik)
}

fn state_norm(s: i8, (i, j): (u32, u32)) -> f64 {
    match (s, i == j) {
        (0, _) => 1.0,
        (_, true) => 2.0,
        _ => std::f64::consts::SQRT_2,
    }
}

/// Dense Hamiltonian of one symmetry block.
pub fn hamiltonian_block(spec: &HOBasisSpec, params: &HamiltonianParams) -> Result<(DMatrix<f64>, Vec<(u32, u32)>)> {
    let (states, s) = spec.states();
    let n = states.len();
    if n > MAX_BLOCK {
        return Err(Error::Size { elements: n, limit: MAX_BLOCK });
    }
    let w = spec.omega;
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|r| {
            let a = states[r];
            states
                .iter()
                .map(|&b| {
                    if s == 0 {
                        ho_matrix_element(a, b, w, params)
                    } else {
                        let direct = ho_matrix_element(a, b, w, params);
                        let swapped = ho_matrix_element(a, (b.1, b.0), w, params);
                        2.0 * (direct + f64::from(s) * swapped) / (state_norm(s, a) * state_norm(s, b))
                    }
                })
                .collect()
        })
        .collect();
    Ok((DMatrix::from_fn(n, n, |r, c| rows[r][c]), states))
}

#[derive(Debug, Clone)]
pub struct ReferenceSpectrum {
    pub spec: HOBasisSpec,
    pub states: Vec<(u32, u32)>,
    pub eigenvalues: Vec<f64>,
    /// Column k holds the coefficients of eigenstate k.
    pub coefficients: DMatrix<f64>,
    pub converged: Vec<bool>,
    pub hbar: f64,
}

fn diagonalize(h: DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = DMatrix::from_fn(eig.eigenvectors.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (vals, vecs)
}

/// Diagonalizes the block at n_max and n_max + 4 and flags states whose
/// eigenvalue is stable between the two.
pub fn build_reference_spectrum(spec: &HOBasisSpec, params: &HamiltonianParams) -> Result<ReferenceSpectrum> {
    let (h, states) = hamiltonian_block(spec, params)?;
    let (eigenvalues, coefficients) = diagonalize(h);
    let bigger = HOBasisSpec { n_max: spec.n_max + 4, ..*spec };
    let (hb, _) = hamiltonian_block(&bigger, params)?;
    let check = SymmetricEigen::new(hb).eigenvalues;
    let mut check: Vec<f64> = check.iter().copied().collect();
    check.sort_by(f64::total_cmp);
    let converged = eigenvalues.iter().zip(&check).map(|(a, b)| (a - b).abs() < CONVERGENCE_TOL).collect();
    Ok(ReferenceSpectrum { spec: *spec, states, eigenvalues, coefficients, converged, hbar: params.hbar })
}

/// HO eigenfunctions φ_0..φ_n at the points `xs` via the stable recurrence.
/// Row-major: `out[n * xs.len() + k]`.
fn ho_functions(n_max: u32, omega: f64, hbar: f64, xs: &[f64]) -> Vec<f64> {
    let m = xs.len();
    let mut out = vec![0.0; (n_max as usize + 1) * m];
    let c0 = (omega / (std::f64::consts::PI * hbar)).powf(0.25);
    let scale = (omega / hbar).sqrt();
    for (k, &x) in xs.iter().enumerate() {
        let xi = scale * x;
        let mut prev = 0.0;
        let mut cur = c0 * (-0.5 * xi * xi).exp();
        out[k] = cur;
        for n in 0..n_max as usize {
            let next = (2.0 / (n as f64 + 1.0)).sqrt() * xi * cur - (n as f64 / (n as f64 + 1.0)).sqrt() * prev;
            prev = cur;
            cur = next;
            out[(n + 1) * m + k] = cur;
        }
    }
    out
}

impl ReferenceSpectrum {
    pub fn irrep(&self) -> Irrep {
        self.spec.irrep
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// Coefficient matrix M with ψ(x, y) = Σ M_ij φ_i(x) φ_j(y).
    fn product_coefficients(&self, k: usize) -> DMatrix<f64> {
        let n = self.spec.n_max as usize + 1;
        let (_, s) = self.spec.states();
        let mut m = DMatrix::zeros(n, n);
        for (r, &(i, j)) in self.states.iter().enumerate() {
            let c = self.coefficients[(r, k)] / state_norm(s, (i, j));
            m[(i as usize, j as usize)] += c;
            if s != 0 {
                m[(j as usize, i as usize)] += f64::from(s) * c;
            }
        }
        m
    }

    /// Eigenstate `k` sampled on the grid and normalized. Fails when more
    /// than 1e-4 of its norm lies outside the grid.
    pub fn project_to_grid(&self, k: usize, grid: &Grid2D) -> Result<WaveFunction> {
        if k >= self.len() {
            return Err(Error::Domain(format!("state {k} out of range ({} states)", self.len())));
        }
        let m = self.product_coefficients(k);
        let n = m.nrows();
        let (xs, ys) = (grid.xs(), grid.ys());
        let fx = ho_functions(self.spec.n_max, self.spec.omega, self.hbar, &xs);
        let fy = ho_functions(self.spec.n_max, self.spec.omega, self.hbar, &ys);
        let (nx, ny) = (grid.nx, grid.ny);
        // t[i][jy] = Σ_j M_ij φ_j(y)
        let mut t = vec![0.0; n * ny];
        for i in 0..n {
            for j in 0..n {
                let c = m[(i, j)];
                if c != 0.0 {
                    let row = &fy[j * ny..(j + 1) * ny];
                    t[i * ny..(i + 1) * ny].iter_mut().zip(row).for_each(|(a, b)| *a += c * b);
                }
            }
        }
        let values: Vec<Complex64> = (0..ny)
            .into_par_iter()
            .flat_map_iter(|jy| {
                let t = &t;
                let fx = &fx;
                (0..nx).map(move |ix| {
                    let mut v = 0.0;
                    for i in 0..n {
                        v += fx[i * nx + ix] * t[i * ny + jy];
                    }
                    Complex64::new(v, 0.0)
                })
            })
            .collect();
        let mut wf = WaveFunction::from_values(*grid, values)?;
        let norm2 = wf.norm_sqr();
        if norm2 < 0.9999 {
            return Err(Error::Coverage(format!("grid captures only {norm2:.6} of reference state {k}")));
        }
        wf.normalize()?;
        Ok(wf)
    }

    /// `index,energy,sigma,converged` rows; σ is empty for the reference.
    pub fn csv(&self) -> String {
        let mut s = String::from("index,energy,sigma,converged\n");
        for (k, (e, c)) in self.eigenvalues.iter().zip(&self.converged).enumerate() {
            let _ = writeln!(s, "{},{:.17e},,{}", k + 1, e, u8::from(*c));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::GridHamiltonian;

    fn p() -> HamiltonianParams {
        HamiltonianParams::default()
    }

    #[test]
    fn one_dimensional_moments() {
        // ⟨0|x⁴|0⟩ = 3/4 at ω = ħ = 1.
        assert_eq!(x4(0, 0) / 4.0, 0.75);
        // ⟨00|Ĥ|00⟩ = ω/2 + 1/(8ω²) + 3β/(8ω²)
        let w = 1.3;
        let want = 0.5 * w + 1.0 / (8.0 * w * w) + 3.0 * 0.01 / (8.0 * w * w);
        assert!((ho_matrix_element((0, 0), (0, 0), w, &p()) - want).abs() < 1e-15);
    }

    #[test]
    fn hermitian_with_selection_rules() {
        for a in [(0, 0), (3, 1), (2, 5), (6, 0)] {
            for b in [(0, 0), (1, 1), (4, 2), (2, 9), (7, 3), (6, 4)] {
                let h = ho_matrix_element(a, b, 1.0, &p());
                assert_eq!(h, ho_matrix_element(b, a, 1.0, &p()));
                let allowed = |d: i64| [0, 2, 4].contains(&d.abs());
                if !allowed(a.0 as i64 - b.0 as i64) || !allowed(a.1 as i64 - b.1 as i64) {
                    assert_eq!(h, 0.0);
                }
            }
        }
    }

    #[test]
    fn block_sizes() {
        assert_eq!(HOBasisSpec::new(1.0, 60, Irrep::A1).unwrap().len(), 256);
        assert_eq!(HOBasisSpec::new(1.0, 140, Irrep::A1).unwrap().len(), 1296);
        assert!(HOBasisSpec::new(0.0, 4, Irrep::A1).is_err());
        let big = HOBasisSpec::new(1.0, 400, Irrep::A1).unwrap();
        assert!(matches!(hamiltonian_block(&big, &p()), Err(Error::Size { .. })));
    }

    #[test]
    fn ground_states() {
        for (irrep, e0, tol) in [(Irrep::A1, 0.56323, 1e-4), (Irrep::E1, 1.2241, 1e-3), (Irrep::E2, 1.2241, 1e-3), (Irrep::A2, 4.1023, 1e-3)] {
            let r = build_reference_spectrum(&HOBasisSpec::new(1.0, 40, irrep).unwrap(), &p()).unwrap();
            assert!((r.eigenvalues[0] - e0).abs() < tol, "{irrep} {}", r.eigenvalues[0]);
            assert!(r.converged[0]);
        }
    }

    #[test]
    fn variational_and_frequency_independent() {
        let e = |w: f64, n: u32| build_reference_spectrum(&HOBasisSpec::new(w, n, Irrep::B1).unwrap(), &p()).unwrap().eigenvalues;
        let (a, b) = (e(1.0, 24), e(1.0, 32));
        for k in 0..a.len().min(10) {
            assert!(b[k] <= a[k] + 1e-12);
        }
        let (c, d) = (e(0.8, 80), e(1.5, 80));
        for k in 0..5 {
            assert!((c[k] - d[k]).abs() < 1e-5);
        }
    }

    #[test]
    fn grid_projection_matches_energy() {
        let r = build_reference_spectrum(&HOBasisSpec::new(1.0, 40, Irrep::A1).unwrap(), &p()).unwrap();
        let g = Grid2D::for_energy(10.0, &p()).unwrap();
        let ham = GridHamiltonian::new(g, p());
        let w0 = r.project_to_grid(0, &g).unwrap();
        let sign = w0.values[g.index(g.nx / 2, g.ny / 2)].re.signum();
        let m = w0.max_abs();
        assert!(w0.values.iter().all(|v| sign * v.re > -1e-6 * m));
        for k in [0, 3] {
            let w = r.project_to_grid(k, &g).unwrap();
            let e = ham.expectation(&w).unwrap();
            assert!(((e - r.eigenvalues[k]) / r.eigenvalues[k]).abs() < 1e-5, "{e} {}", r.eigenvalues[k]);
        }
    }
}

//! Selective Gram–Schmidt construction of a scar-function basis for an
//! energy window, and diagonalization of Ĥ in it.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::classical::{HamiltonianParams, OrbitRecord, PeriodicOrbit};
use crate::quantization::{enumerate_levels, BSLevel, DesymTable, Irrep, WeylLaw};
use crate::wavefunctions::{
    ehrenfest_time, inner_product, scar_function, semiclassical_dispersion, tube_function, EhrenfestConstants, Grid2D, GridHamiltonian,
    ScarFunction, ScarOptions, TubeOptions, WaveFunction,
};
use crate::{Error, Result};

/// Residual norms below this are treated as linearly dependent.
pub const RANK_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionWindow {
    pub e_minus: f64,
    pub e_plus: f64,
    pub sigma_bar: f64,
    pub c_b: f64,
    pub irrep: Irrep,
}

impl SelectionWindow {
    /// σ̄ from the semiclassical dispersion at E⁺ with the mean Lyapunov
    /// exponent.
    pub fn new(e_minus: f64, e_plus: f64, c_b: f64, irrep: Irrep, hbar: f64) -> Result<Self> {
        let c = EhrenfestConstants::default();
        let sigma_bar = if e_plus > 0.0 {
            semiclassical_dispersion(c.mean_lyapunov(e_plus), ehrenfest_time(e_plus, irrep, hbar), hbar)
        } else {
            0.0
        };
        Self::with_sigma_bar(e_minus, e_plus, sigma_bar, c_b, irrep)
    }

    pub fn with_sigma_bar(e_minus: f64, e_plus: f64, sigma_bar: f64, c_b: f64, irrep: Irrep) -> Result<Self> {
        if !(e_minus <= e_plus) || !(c_b >= 0.0) || !(sigma_bar >= 0.0) {
            return Err(Error::Domain(format!("invalid window ({e_minus}, {e_plus}), c_b = {c_b}, σ̄ = {sigma_bar}")));
        }
        Ok(Self { e_minus, e_plus, sigma_bar, c_b, irrep })
    }

    /// Distance to the window; edges count as inside.
    pub fn delta_e(&self, e: f64) -> f64 {
        if e < self.e_minus {
            self.e_minus - e
        } else if e > self.e_plus {
            e - self.e_plus
        } else {
            0.0
        }
    }

    pub fn contains(&self, e: f64) -> bool {
        e > self.e_minus && e < self.e_plus
    }

    /// (E⁻ − 2σ̄, E⁺ + 2σ̄)
    pub fn enlarged(&self) -> (f64, f64) {
        (self.e_minus - 2.0 * self.sigma_bar, self.e_plus + 2.0 * self.sigma_bar)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.e_minus + self.e_plus)
    }
}

/// η = ρ [σ² + δE²]^{1/2} T N_s N_t
pub fn selection_parameter(rho: f64, sigma: f64, delta_e: f64, period: f64, n_s: u32, n_t: u32) -> f64 {
    rho * sigma.hypot(delta_e) * period * f64::from(n_s) * f64::from(n_t)
}

/// N_b = N(E⁺ + 2σ̄) − N(E⁻ − 2σ̄) + c_b σ̄ ρ(midpoint), rounded up.
pub fn basis_size(window: &SelectionWindow, weyl: &WeylLaw) -> usize {
    let (lo, hi) = window.enlarged();
    let n = weyl.count(hi) - weyl.count(lo) + window.c_b * window.sigma_bar * weyl.density(window.midpoint());
    // Guard against 25.000000001 rounding up to 26.
    (n - 1e-9).ceil().max(0.0) as usize
}

/// BS levels of the given orbits inside the enlarged window.
pub fn candidate_levels(orbits: &[OrbitRecord], desym: &DesymTable, window: &SelectionWindow, hbar: f64) -> Vec<BSLevel> {
    let (lo, hi) = window.enlarged();
    enumerate_levels(orbits, desym, window.irrep, lo, hi, hbar)
}

#[derive(Debug, Clone)]
pub struct Candidate {
    pub scar: ScarFunction,
    pub eta: f64,
    pub delta_e: f64,
    pub rho: f64,
    pub period: f64,
    pub n_s: u32,
    pub n_t: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CandidateOptions {
    pub tube: TubeOptions,
    pub scar: ScarOptions,
}

/// Builds the scar function of every level concurrently and scores it.
/// `orbits` must contain the orbit of every level (computed at E = 1).
pub fn build_candidates(
    orbits: &[PeriodicOrbit],
    levels: &[BSLevel],
    window: &SelectionWindow,
    ham: &GridHamiltonian,
    opts: &CandidateOptions,
) -> Result<Vec<Candidate>> {
    let by_id: BTreeMap<u32, &PeriodicOrbit> = orbits.iter().map(|o| (o.id, o)).collect();
    let weyl = WeylLaw::new(window.irrep, &ham.params);
    let hbar = ham.params.hbar;
    levels
        .par_iter()
        .map(|lvl| {
            let po = by_id.get(&lvl.orbit).ok_or_else(|| Error::Domain(format!("orbit {} not loaded", lvl.orbit)))?;
            let e = lvl.energy;
            let tube = tube_function(po, lvl, &ham.grid, hbar, &opts.tube)?;
            let scar = scar_function(&tube, lvl, ehrenfest_time(e, lvl.irrep, hbar), ham, &opts.scar)?;
            let rho = weyl.density(e);
            let period = po.period * (po.energy / e).powf(0.25);
            let delta_e = window.delta_e(e);
            let eta = selection_parameter(rho, scar.sigma, delta_e, period, po.n_s, po.n_t);
            Ok(Candidate { scar, eta, delta_e, rho, period, n_s: po.n_s, n_t: po.n_t })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BasisSelection {
    /// Candidate indices in selection order.
    pub selected: Vec<usize>,
    /// Orthonormal auxiliary functions, one per selected candidate.
    pub auxiliaries: Vec<WaveFunction>,
    /// Residual norm of each pick at the time it was selected.
    pub residual_norms: Vec<f64>,
    /// Score |ψ^{(n−1)}|²/η of each pick (1/η for the first).
    pub scores: Vec<f64>,
}

impl BasisSelection {
    pub fn len(&self) -> usize {
        self.selected.len()
    }

    pub fn is_empty(&self) -> bool {
        self.selected.is_empty()
    }

    /// max |⟨φ_i|φ_k⟩ − δ_ik|
    pub fn gram_error(&self) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for (i, a) in self.auxiliaries.iter().enumerate() {
            for (k, b) in self.auxiliaries.iter().enumerate().skip(i) {
                let g = inner_product(a, b)?;
                let target = if i == k { 1.0 } else { 0.0 };
                worst = worst.max((g - target).norm());
            }
        }
        Ok(worst)
    }
}

/// Sequential selection: the first pick minimizes η, every later pick
/// maximizes |residual|²/η after deflation against the auxiliaries chosen
/// so far. Ties go to the lowest index.
pub fn sgsm_select_functions(functions: &[WaveFunction], etas: &[f64], n_b: usize) -> Result<BasisSelection> {
    if functions.len() != etas.len() {
        return Err(Error::Domain("one η per candidate required".into()));
    }
    if functions.len() < n_b {
        return Err(Error::InsufficientCandidates { pool: functions.len(), needed: n_b });
    }
    if let Some(bad) = etas.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
        return Err(Error::Domain(format!("selection parameter must be positive, got {bad}")));
    }
    let mut residuals: Vec<WaveFunction> = functions.to_vec();
    let mut norms2: Vec<f64> = residuals.iter().map(|r| r.norm_sqr()).collect();
    let mut taken = vec![false; functions.len()];
    let mut out = BasisSelection { selected: Vec::new(), auxiliaries: Vec::new(), residual_norms: Vec::new(), scores: Vec::new() };
    for step in 0..n_b {
        let mut best: Option<(usize, f64)> = None;
        for (j, (&n2, &eta)) in norms2.iter().zip(etas).enumerate() {
            if taken[j] || n2.sqrt() < RANK_TOL {
                continue;
            }
            let score = if step == 0 { 1.0 / eta } else { n2 / eta };
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((j, score)) = best else {
            return Err(Error::RankDeficient { selected: step, needed: n_b });
        };
        let mut phi = residuals[j].clone();
        // Second Gram–Schmidt pass keeps the auxiliaries orthonormal to round-off.
        for a in &out.auxiliaries {
            let c = inner_product(a, &phi)?;
            phi.axpy(-c, a)?;
        }
        phi.normalize()?;
        taken[j] = true;
        out.selected.push(j);
        out.residual_norms.push(norms2[j].sqrt());
        out.scores.push(score);
        residuals
            .par_iter_mut()
            .zip(norms2.par_iter_mut())
            .zip(taken.par_iter())
            .try_for_each(|((r, n2), &t)| -> Result<()> {
                if !t {
                    let c = inner_product(&phi, r)?;
                    r.axpy(-c, &phi)?;
                    *n2 = r.norm_sqr();
                }
                Ok(())
            })?;
        out.auxiliaries.push(phi);
    }
    Ok(out)
}

pub fn sgsm_select(candidates: &[Candidate], n_b: usize) -> Result<BasisSelection> {
    let funcs: Vec<WaveFunction> = candidates.iter().map(|c| c.scar.wavefunction.clone()).collect();
    let etas: Vec<f64> = candidates.iter().map(|c| c.eta).collect();
    sgsm_select_functions(&funcs, &etas, n_b)
}

/// `step,orbit,n,energy,eta,residual_norm`
pub fn selection_csv(selection: &BasisSelection, candidates: &[Candidate]) -> String {
    let mut s = String::from("step,orbit,n,energy,eta,residual_norm\n");
    for (k, (&j, r)) in selection.selected.iter().zip(&selection.residual_norms).enumerate() {
        let c = &candidates[j];
        let _ = writeln!(s, "{},{},{},{:.17e},{:.17e},{:.17e}", k + 1, c.scar.orbit, c.scar.n, c.scar.bs_energy, c.eta, r);
    }
    s
}

/// H_ik = ⟨φ_i|Ĥ|φ_k⟩ (real part) in the auxiliary basis. Returns the
/// matrix and its largest asymmetry relative to max |H_ik|.
pub fn assemble_hamiltonian(functions: &[WaveFunction], ham: &GridHamiltonian) -> Result<(DMatrix<f64>, f64)> {
    let n = functions.len();
    let applied: Vec<WaveFunction> = functions.par_iter().map(|f| ham.apply(f)).collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = functions
        .par_iter()
        .map(|a| applied.iter().map(|hb| inner_product(a, hb).map(|c| c.re)).collect::<Result<Vec<f64>>>())
        .collect::<Result<_>>()?;
    let h = DMatrix::from_fn(n, n, |i, k| rows[i][k]);
    let scale = h.amax().max(f64::MIN_POSITIVE);
    let asym = (&h - h.transpose()).amax() / scale;
    Ok(((&h + h.transpose()) * 0.5, asym))
}

#[derive(Debug, Clone)]
pub struct SpectrumResult {
    pub irrep: Irrep,
    pub window: SelectionWindow,
    pub eigenvalues: Vec<f64>,
    /// Column k: eigenstate k in the auxiliary basis.
    pub eigenvectors: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub in_window: Vec<bool>,
}

impl SpectrumResult {
    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    /// `index,energy,sigma,converged`
    pub fn csv(&self) -> String {
        let mut s = String::from("index,energy,sigma,converged\n");
        for k in 0..self.len() {
            let _ = writeln!(s, "{},{:.17e},{:.17e},{}", k + 1, self.eigenvalues[k], self.sigma[k], u8::from(self.in_window[k]));
        }
        s
    }
}

/// Σ_i c_i φ_i
pub fn combine(functions: &[WaveFunction], coefficients: &[f64]) -> Result<WaveFunction> {
    let first = functions.first().ok_or_else(|| Error::Domain("empty basis".into()))?;
    let mut out = WaveFunction::zeros(first.grid);
    for (f, &c) in functions.iter().zip(coefficients) {
        out.axpy(Complex64::new(c, 0.0), f)?;
    }
    Ok(out)
}

/// Eigenstate `k` of a spectrum on the grid.
pub fn eigenstate(spectrum: &SpectrumResult, selection: &BasisSelection, k: usize) -> Result<WaveFunction> {
    let c: Vec<f64> = spectrum.eigenvectors.column(k).iter().copied().collect();
    combine(&selection.auxiliaries, &c)
}

/// Full symmetric eigendecomposition plus the grid dispersion of every
/// eigenstate about its eigenvalue.
pub fn diagonalize(h: &DMatrix<f64>, selection: &BasisSelection, window: &SelectionWindow, ham: &GridHamiltonian) -> Result<SpectrumResult> {
    if h.nrows() != selection.len() || !h.iter().all(|v| v.is_finite()) {
        return Err(Error::Numeric("Hamiltonian matrix does not match the basis or is not finite".into()));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 0).ok_or_else(|| Error::Numeric("eigensolver did not converge".into()))?;
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = DMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    let mut out = SpectrumResult {
        irrep: window.irrep,
        window: *window,
        in_window: eigenvalues.iter().map(|&e| window.contains(e)).collect(),
        eigenvalues,
        eigenvectors,
        sigma: Vec::new(),
    };
    out.sigma = (0..out.len())
        .into_par_iter()
        .map(|k| {
            let mut psi = eigenstate(&out, selection, k)?;
            psi.normalize()?;
            ham.energy_dispersion(&psi, out.eigenvalues[k])
        })
        .collect::<Result<_>>()?;
    Ok(out)
}

/// Everything a window run produces.
#[derive(Debug, Clone)]
pub struct WindowRun {
    pub window: SelectionWindow,
    pub n_b: usize,
    pub candidates: Vec<Candidate>,
    pub selection: BasisSelection,
    pub hamiltonian: DMatrix<f64>,
    pub asymmetry: f64,
    pub spectrum: SpectrumResult,
}

/// Levels → candidates → selection → matrix → spectrum.
pub fn run_window(
    orbits: &[PeriodicOrbit],
    desym: &DesymTable,
    window: &SelectionWindow,
    ham: &GridHamiltonian,
    opts: &CandidateOptions,
) -> Result<WindowRun> {
    let records: Vec<OrbitRecord> = orbits.iter().map(OrbitRecord::from_orbit).collect();
    let levels = candidate_levels(&records, desym, window, ham.params.hbar);
    let n_b = basis_size(window, &WeylLaw::new(window.irrep, &ham.params));
    if levels.len() < n_b {
        return Err(Error::InsufficientCandidates { pool: levels.len(), needed: n_b });
    }
    let candidates = build_candidates(orbits, &levels, window, ham, opts)?;
    let selection = sgsm_select(&candidates, n_b)?;
    let (hamiltonian, asymmetry) = assemble_hamiltonian(&selection.auxiliaries, ham)?;
    let spectrum = diagonalize(&hamiltonian, &selection, window, ham)?;
    Ok(WindowRun { window: *window, n_b, candidates, selection, hamiltonian, asymmetry, spectrum })
}

/// Lowest sizing energy of [`window_grid`]. Below it the fixed packet width
/// no longer fits between the turning point and the grid edge.
pub const MIN_GRID_ENERGY: f64 = 10.0;

/// Grid for a window: sized for the top of the enlarged window.
pub fn window_grid(window: &SelectionWindow, params: &HamiltonianParams) -> Result<Grid2D> {
    Grid2D::for_energy(window.enlarged().1.max(MIN_GRID_ENERGY), params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DVector;
    use proptest::prelude::*;

    fn grid() -> Grid2D {
        Grid2D::square(4, 1.0).unwrap()
    }

    fn vector(v: &[f64]) -> WaveFunction {
        let g = grid();
        let mut full = vec![0.0; g.len()];
        full[..v.len()].copy_from_slice(v);
        WaveFunction::from_real(g, &full).unwrap().normalized().unwrap()
    }

    fn unit(k: usize) -> WaveFunction {
        let mut v = vec![0.0; 16];
        v[k] = 1.0;
        vector(&v)
    }

    #[test]
    fn window_logic() {
        let w = SelectionWindow::with_sigma_bar(10.0, 12.0, 0.4, 2.0, Irrep::A1).unwrap();
        assert_eq!(w.delta_e(11.0), 0.0);
        assert_eq!(w.delta_e(10.0), 0.0);
        assert_eq!(w.delta_e(12.0), 0.0);
        assert!((w.delta_e(9.5) - 0.5).abs() < 1e-15);
        assert!((w.delta_e(12.25) - 0.25).abs() < 1e-15);
        assert!(SelectionWindow::with_sigma_bar(3.0, 2.0, 0.1, 2.0, Irrep::A1).is_err());
        assert!(SelectionWindow::with_sigma_bar(1.0, 2.0, 0.1, -1.0, Irrep::A1).is_err());
    }

    #[test]
    fn eta_is_linear_in_counts() {
        let a = selection_parameter(2.0, 0.3, 0.0, 5.0, 8, 1);
        assert!((a - 2.0 * 0.3 * 5.0 * 8.0).abs() < 1e-12);
        assert_eq!(selection_parameter(2.0, 0.3, 0.0, 5.0, 8, 2), 2.0 * a);
        assert!((selection_parameter(1.0, 0.3, 0.4, 1.0, 1, 1) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn basis_sizes() {
        let p = HamiltonianParams::default();
        let weyl = WeylLaw::new(Irrep::A1, &p);
        let w = SelectionWindow::with_sigma_bar(20.0, 20.0, 0.0, 0.0, Irrep::A1).unwrap();
        assert_eq!(basis_size(&w, &weyl), 0);
        let w = SelectionWindow::with_sigma_bar(100.0, 103.0, 0.5433, 2.0, Irrep::A1).unwrap();
        assert_eq!(basis_size(&w, &weyl), 25);
        let w = SelectionWindow::new(0.0, 135.0, 2.0, Irrep::A1, 1.0).unwrap();
        let n = basis_size(&w, &weyl) as f64;
        assert!((n / 420.0 - 1.0).abs() < 0.02, "{n}");
        let w = SelectionWindow::new(100.0, 103.0, 2.0, Irrep::A1, 1.0).unwrap();
        assert!(basis_size(&w, &weyl).abs_diff(25) <= 1);
    }

    #[test]
    fn orthogonal_pool_selects_by_eta() {
        let f: Vec<_> = (0..5).map(unit).collect();
        let s = sgsm_select_functions(&f, &[3.0, 1.0, 2.0, 1.0, 5.0], 5).unwrap();
        assert_eq!(s.selected, vec![1, 3, 2, 0, 4]);
        assert!(s.gram_error().unwrap() < 1e-14);
    }

    #[test]
    fn duplicates_are_never_selected() {
        let f = vec![unit(0), unit(1), unit(0), unit(2)];
        let s = sgsm_select_functions(&f, &[1.0, 2.0, 0.5, 3.0], 3).unwrap();
        assert_eq!(s.selected, vec![2, 1, 3]);
        assert!(matches!(sgsm_select_functions(&f, &[1.0, 2.0, 0.5, 3.0], 4), Err(Error::RankDeficient { selected: 3, needed: 4 })));
        assert!(matches!(sgsm_select_functions(&f, &[1.0; 4], 5), Err(Error::InsufficientCandidates { .. })));
    }

    #[test]
    fn near_duplicate_skipped() {
        let a = vector(&[1.0, 0.0]);
        let b = vector(&[1.0, 0.05]);
        let c = vector(&[0.0, 1.0]);
        let s = sgsm_select_functions(&[a, b, c], &[1.0, 1.0, 1.5], 2).unwrap();
        assert_eq!(s.selected, vec![0, 2]);
    }

    /// Independent oracle: residual of each candidate against the span of the
    /// originals picked so far, by least squares on the raw vectors.
    fn oracle_scores(f: &[WaveFunction], etas: &[f64], picked: &[usize]) -> Vec<Option<f64>> {
        let g = grid();
        let w = g.cell_area().sqrt();
        let col = |k: usize| DVector::from_iterator(g.len(), f[k].values.iter().map(|v| v.re * w));
        (0..f.len())
            .map(|j| {
                if picked.contains(&j) {
                    return None;
                }
                let v = col(j);
                let r2 = if picked.is_empty() {
                    v.norm_squared()
                } else {
                    let a = nalgebra::DMatrix::from_columns(&picked.iter().map(|&k| col(k)).collect::<Vec<_>>());
                    let x = a.clone().svd(true, true).solve(&v, 1e-14).unwrap();
                    (v - a * x).norm_squared()
                };
                if r2.sqrt() < RANK_TOL {
                    return None;
                }
                Some(if picked.is_empty() { 1.0 / etas[j] } else { r2 / etas[j] })
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn greedy_matches_oracle(
            raw in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 6), 3..=8),
            etas in prop::collection::vec(0.1f64..3.0, 8),
        ) {
            prop_assume!(raw.iter().all(|v| v.iter().map(|x| x * x).sum::<f64>() > 1e-2));
            let f: Vec<_> = raw.iter().map(|v| vector(v)).collect();
            let etas = &etas[..f.len()];
            let n_b = f.len().min(6);
            let s = sgsm_select_functions(&f, etas, n_b);
            prop_assume!(s.is_ok());
            let s = s.unwrap();
            prop_assert!(s.gram_error().unwrap() < 1e-10);
            for step in 0..n_b {
                let scores = oracle_scores(&f, etas, &s.selected[..step]);
                let best = scores.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
                let chosen = scores[s.selected[step]].unwrap();
                prop_assert!(chosen >= best * (1.0 - 1e-9), "step {step}: chose {chosen}, best {best}");
            }
            let again = sgsm_select_functions(&f, etas, n_b).unwrap();
            prop_assert_eq!(&again.selected, &s.selected);
        }
    }

    #[test]
    fn one_element_hamiltonian() {
        let p = HamiltonianParams::default();
        let g = Grid2D::square(32, 4.0).unwrap();
        let ham = GridHamiltonian::new(g, p);
        let f = WaveFunction::from_fn(g, |x, y| Complex64::new((-(x * x + y * y)).exp(), 0.0)).normalized().unwrap();
        let (h, asym) = assemble_hamiltonian(std::slice::from_ref(&f), &ham).unwrap();
        assert_eq!(h.shape(), (1, 1));
        assert!((h[(0, 0)] - ham.expectation(&f).unwrap()).abs() < 1e-12);
        assert!(asym < 1e-9);
    }

    #[test]
    fn diagonal_matrix_eigenvalues() {
        let p = HamiltonianParams::default();
        let g = Grid2D::square(32, 4.0).unwrap();
        let ham = GridHamiltonian::new(g, p);
        let sel = BasisSelection {
            selected: vec![0, 1],
            auxiliaries: vec![unit_on(g, 0), unit_on(g, 5)],
            residual_norms: vec![1.0, 1.0],
            scores: vec![1.0, 1.0],
        };
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0]));
        let w = SelectionWindow::with_sigma_bar(0.0, 5.0, 0.1, 2.0, Irrep::A1).unwrap();
        let s = diagonalize(&h, &sel, &w, &ham).unwrap();
        assert_eq!(s.eigenvalues, vec![-1.0, 3.0]);
        assert_eq!(s.in_window, vec![false, true]);
    }

    fn unit_on(g: Grid2D, k: usize) -> WaveFunction {
        let mut w = WaveFunction::zeros(g);
        w.values[k] = Complex64::new(1.0 / g.cell_area().sqrt(), 0.0);
        w
    }
}

//! Eigenstate analysis in the scar basis: local representation, scar
//! intensities, participation ratios and their statistics, error bounds.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::quantization::Irrep;
use crate::wavefunctions::{inner_product, WaveFunction};
use crate::{Error, Result};

/// Deflated candidates with norm below this are dropped from the
/// local representation.
pub const DEFLATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct LocalRepresentation {
    /// Index into the scar list of each element, in construction order.
    pub order: Vec<usize>,
    /// x_n = |⟨ψ^{(n−1)}_{j_n}|N⟩|² at the time of each pick.
    pub intensities: Vec<f64>,
    /// C_Nn = ⟨φ_n^loc|N⟩
    pub coefficients: Vec<f64>,
    /// Σ_{k ≤ n} C_Nk²
    pub cumulative: Vec<f64>,
}

impl LocalRepresentation {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Intensities sorted in decreasing order.
    pub fn sorted_intensities(&self) -> Vec<f64> {
        let mut x = self.intensities.clone();
        x.sort_by(|a, b| b.total_cmp(a));
        x
    }

    /// True when x₁ ≥ x₂ ≥ … holds in construction order (to `tol`).
    pub fn is_ordered(&self, tol: f64) -> bool {
        self.intensities.windows(2).all(|w| w[0] + tol >= w[1])
    }

    pub fn participation_ratio(&self) -> Result<f64> {
        participation_ratio(&self.coefficients)
    }
}

fn overlap(a: &WaveFunction, b: &WaveFunction) -> Result<f64> {
    let c = inner_product(a, b)?;
    // Real functions throughout; fall back to the modulus if a complex
    // residue shows up.
    Ok(if c.im.abs() > 1e-10 * c.norm().max(1.0) { c.norm() * c.re.signum() } else { c.re })
}

/// Greedy reconstruction of `state` from `scars`: repeatedly take the
/// deflated scar with the largest overlap with the state, normalize it and
/// deflate the rest against it. Stops once the state is captured to within
/// [`DEFLATION_TOL`] or every remaining residual is below that norm.
pub fn local_representation(state: &WaveFunction, scars: &[WaveFunction]) -> Result<LocalRepresentation> {
    let mut res: Vec<Option<WaveFunction>> = scars.iter().map(|s| Some(s.clone())).collect();
    let mut out = LocalRepresentation { order: Vec::new(), intensities: Vec::new(), coefficients: Vec::new(), cumulative: Vec::new() };
    let total = state.norm_sqr();
    let mut acc = 0.0;
    while total - acc > DEFLATION_TOL * total {
        let mut best: Option<(usize, f64)> = None;
        for (j, r) in res.iter().enumerate() {
            let Some(r) = r else { continue };
            if r.norm() < DEFLATION_TOL {
                continue;
            }
            let x = overlap(r, state)?.powi(2);
            if best.is_none_or(|(_, b)| x > b) {
                best = Some((j, x));
            }
        }
        let Some((j, x)) = best else { break };
        let mut phi = res[j].take().expect("candidate present");
        phi.normalize()?;
        let c = overlap(&phi, state)?;
        acc += c * c;
        out.order.push(j);
        out.intensities.push(x);
        out.coefficients.push(c);
        out.cumulative.push(acc);
        for r in res.iter_mut().flatten() {
            let p = inner_product(&phi, r)?;
            r.axpy(-p, &phi)?;
        }
    }
    Ok(out)
}

pub const Z_BAR: [f64; 2] = [0.577, 13.0 / 48.0];
pub const C_FIT: [f64; 2] = [0.30, -0.30];

/// Semiclassical average of the j-th largest scar intensity (j = 1, 2)
/// as a function of the reduced dispersion σ̄_r = ρσ, with the optional
/// correction c_j inside the logarithm.
pub fn scar_intensity_average(j: usize, sigma_bar_r: f64, c_j: f64) -> Result<f64> {
    if !(1..=2).contains(&j) {
        return Err(Error::Domain(format!("only the two largest intensities are modelled, got j = {j}")));
    }
    let arg = 2f64.sqrt() * sigma_bar_r / j as f64 + c_j;
    if !(sigma_bar_r > 0.0) || !(arg > 0.0) {
        return Err(Error::Singularity(format!("log argument {arg} at σ̄_r = {sigma_bar_r}")));
    }
    let alpha = Z_BAR[j - 1] + arg.ln();
    if !(alpha + 9.0 / 8.0 > 0.0) || !(alpha + 287.0 / 128.0 > 0.0) {
        return Err(Error::Singularity(format!("α_{j} = {alpha} at σ̄_r = {sigma_bar_r}")));
    }
    let b = (alpha + 287.0 / 128.0).ln() / (alpha + 17.0 / 8.0);
    Ok((2.0 / PI).sqrt() / sigma_bar_r * (alpha - (alpha + 9.0 / 8.0).ln() + b + 0.5 * b * b))
}

/// R = Σ C²/Σ C⁴ after normalizing Σ C² = 1.
pub fn participation_ratio(coefficients: &[f64]) -> Result<f64> {
    let s2: f64 = coefficients.iter().map(|c| c * c).sum();
    if !(s2 > 0.0) {
        return Err(Error::Domain("participation ratio of a zero vector".into()));
    }
    let s4: f64 = coefficients.iter().map(|c| (c * c / s2).powi(2)).sum();
    Ok(1.0 / s4)
}

/// R̄ = ζσ̄_r with ζ = 8/3 (one-dimensional irreps) or 2 (E).
pub fn mean_pr_estimate(sigma_bar_r: f64, irrep: Irrep) -> f64 {
    let zeta = if irrep.is_one_dimensional() { 8.0 / 3.0 } else { 2.0 };
    zeta * sigma_bar_r
}

/// R_sc = A_tr/(4πħ)
pub fn semiclassical_pr(area: f64, hbar: f64) -> f64 {
    area / (4.0 * PI * hbar)
}

/// r = (R − 1)/R̄
pub fn adimensional_pr(r: f64, r_bar: f64) -> f64 {
    (r - 1.0) / r_bar
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FitMethod {
    MaximumLikelihood,
    LeastSquaresCdf,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeibullFit {
    pub k: f64,
    pub l: f64,
    pub method: FitMethod,
}

pub fn weibull_cdf(r: f64, k: f64, l: f64) -> f64 {
    if r <= 0.0 {
        0.0
    } else {
        1.0 - (-(r / l).powf(k)).exp()
    }
}

pub fn weibull_pdf(x: f64, k: f64, l: f64) -> f64 {
    if x < 0.0 {
        return 0.0;
    }
    k / l * (x / l).powf(k - 1.0) * (-(x / l).powf(k)).exp()
}

/// Weibull parameters by maximum likelihood; falls back to a straight-line
/// fit of ln(−ln(1 − F)) against ln r on the empirical CDF when some
/// samples are zero or the likelihood equation has no root.
pub fn weibull_fit(samples: &[f64]) -> Result<WeibullFit> {
    if samples.len() < 20 {
        return Err(Error::Fit(format!("need at least 20 samples, got {}", samples.len())));
    }
    if samples.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::Fit("samples must be finite and non-negative".into()));
    }
    let lo = samples.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        return Err(Error::Fit("degenerate samples".into()));
    }
    if lo > 0.0 {
        if let Some(fit) = weibull_mle(samples) {
            return Ok(fit);
        }
    }
    weibull_lsq(samples)
}

fn weibull_mle(x: &[f64]) -> Option<WeibullFit> {
    let n = x.len() as f64;
    let mean_ln = x.iter().map(|v| v.ln()).sum::<f64>() / n;
    // Profile score g(k) = Σ x^k ln x / Σ x^k − 1/k − mean(ln x), increasing in k.
    // Powers are taken relative to the largest sample to avoid overflow.
    let xmax = x.iter().copied().fold(0.0, f64::max);
    let g = |k: f64| {
        let (mut a, mut b) = (0.0, 0.0);
        for v in x {
            let w = (v / xmax).powf(k);
            a += w * v.ln();
            b += w;
        }
        a / b - 1.0 / k - mean_ln
    };
    let (mut lo, mut hi) = (1e-3, 1.0);
    while g(hi) < 0.0 {
        hi *= 2.0;
        if hi > 1e4 {
            return None;
        }
    }
    if g(lo) > 0.0 {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-13 * hi {
            break;
        }
    }
    let k = 0.5 * (lo + hi);
    let l = xmax * (x.iter().map(|v| (v / xmax).powf(k)).sum::<f64>() / n).powf(1.0 / k);
    (k.is_finite() && l.is_finite() && l > 0.0).then_some(WeibullFit { k, l, method: FitMethod::MaximumLikelihood })
}

fn weibull_lsq(x: &[f64]) -> Result<WeibullFit> {
    let mut s: Vec<f64> = x.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len() as f64;
    // Median-rank plotting positions.
    let pts: Vec<(f64, f64)> = s
        .iter()
        .enumerate()
        .filter(|(_, v)| **v > 0.0)
        .map(|(i, v)| {
            let f = (i as f64 + 0.7) / (n + 0.4);
            (v.ln(), (-(1.0 - f).ln()).ln())
        })
        .collect();
    if pts.len() < 2 {
        return Err(Error::Fit("fewer than two positive samples".into()));
    }
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (u, v)| (a + u, b + v));
    let (mx, my) = (sx / m, sy / m);
    let (sxx, sxy) = pts.iter().fold((0.0, 0.0), |(a, b), (u, v)| (a + (u - mx).powi(2), b + (u - mx) * (v - my)));
    if !(sxx > 0.0) {
        return Err(Error::Fit("degenerate samples".into()));
    }
    let k = sxy / sxx;
    if !(k > 0.0) {
        return Err(Error::Fit(format!("non-positive shape {k}")));
    }
    let l = (mx - my / k).exp();
    Ok(WeibullFit { k, l, method: FitMethod::LeastSquaresCdf })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorBounds {
    /// ΔE_r ≤ σ_r^{2.5}/4
    pub energy: f64,
    /// 1 − ⟨N|N′⟩² ≤ σ_r^{2.5}/100
    pub overlap_deficit: f64,
    /// The power law is only claimed for σ_r < 0.3.
    pub valid: bool,
}

pub fn error_bounds(sigma_r: f64) -> ErrorBounds {
    let s = sigma_r.max(0.0).powf(2.5);
    ErrorBounds { energy: s / 4.0, overlap_deficit: s / 100.0, valid: sigma_r < 0.3 }
}

/// Centred moving average over `window` points. Near the ends the window
/// shrinks symmetrically so every output stays centred on its point.
pub fn mobile_mean(series: &[f64], window: usize) -> Vec<f64> {
    let half = window.max(1) / 2;
    let even = window.max(1) % 2 == 0;
    let n = series.len();
    (0..n)
        .map(|i| {
            let h = half.min(i).min(n - 1 - i);
            // An even window of w points spans w/2 on one side and w/2 − 1 on
            // the other; average the two placements to stay centred.
            if even && h == half && half > 0 {
                let a: f64 = series[i + 1 - half..=i + half].iter().sum::<f64>() / window as f64;
                let b: f64 = series[i - half..i + half].iter().sum::<f64>() / window as f64;
                0.5 * (a + b)
            } else {
                series[i - h..=i + h].iter().sum::<f64>() / (2 * h + 1) as f64
            }
        })
        .collect()
}

/// Compared eigenstate: scar-basis result against the reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateComparison {
    pub index: usize,
    pub energy: f64,
    pub reference_index: usize,
    pub reference_energy: f64,
    pub rho: f64,
    pub sigma_r: f64,
    pub delta_e_r: f64,
    pub overlap_deficit: f64,
}

impl StateComparison {
    pub fn bounds(&self) -> ErrorBounds {
        error_bounds(self.sigma_r)
    }

    pub fn within_bounds(&self) -> bool {
        let b = self.bounds();
        self.delta_e_r <= b.energy && self.overlap_deficit <= b.overlap_deficit
    }
}

/// Pairs every state with the reference state of largest overlap.
pub fn compare_states(
    states: &[(usize, f64, f64, WaveFunction)],
    reference: &[(usize, f64, WaveFunction)],
    density: impl Fn(f64) -> f64,
) -> Result<Vec<StateComparison>> {
    states
        .iter()
        .map(|(index, energy, sigma, psi)| {
            let mut best = None::<(usize, f64, f64)>;
            for (ri, re, rw) in reference {
                let o = inner_product(rw, psi)?.norm_sqr();
                if best.is_none_or(|(_, _, b)| o > b) {
                    best = Some((*ri, *re, o));
                }
            }
            let (reference_index, reference_energy, ov) = best.ok_or_else(|| Error::Domain("empty reference set".into()))?;
            let rho = density(*energy);
            Ok(StateComparison {
                index: *index,
                energy: *energy,
                reference_index,
                reference_energy,
                rho,
                sigma_r: sigma * rho,
                delta_e_r: (energy - reference_energy).abs() * rho,
                overlap_deficit: (1.0 - ov).max(0.0),
            })
        })
        .collect()
}

pub fn comparison_csv(rows: &[StateComparison]) -> String {
    let mut s = String::from("index,energy,reference_index,reference_energy,sigma_r,delta_e_r,overlap_deficit,energy_bound,overlap_bound,bound_valid,within_bounds\n");
    for r in rows {
        let b = r.bounds();
        let _ = writeln!(
            s,
            "{},{:.17e},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{},{}",
            r.index,
            r.energy,
            r.reference_index,
            r.reference_energy,
            r.sigma_r,
            r.delta_e_r,
            r.overlap_deficit,
            b.energy,
            b.overlap_deficit,
            u8::from(b.valid),
            u8::from(r.within_bounds())
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::Grid2D;
    use num_complex::Complex64;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Weibull};

    fn basis_vec(g: Grid2D, k: usize) -> WaveFunction {
        let mut w = WaveFunction::zeros(g);
        w.values[k] = Complex64::new(1.0 / g.cell_area().sqrt(), 0.0);
        w
    }

    #[test]
    fn representation_of_a_scar_is_itself() {
        let g = Grid2D::square(4, 1.0).unwrap();
        let scars: Vec<_> = (0..5).map(|k| basis_vec(g, k)).collect();
        let rep = local_representation(&scars[3], &scars).unwrap();
        assert_eq!(rep.order, vec![3]);
        assert!((rep.intensities[0] - 1.0).abs() < 1e-12);
        assert!((rep.participation_ratio().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn representation_sums_to_one_over_full_basis() {
        let g = Grid2D::square(4, 1.0).unwrap();
        let mut rng = rand::rngs::StdRng::seed_from_u64(3);
        let d = rand_distr::StandardNormal;
        let scars: Vec<_> = (0..16)
            .map(|_| {
                let v: Vec<f64> = (0..16).map(|_| d.sample(&mut rng)).collect();
                WaveFunction::from_real(g, &v).unwrap().normalized().unwrap()
            })
            .collect();
        let state = WaveFunction::from_fn(g, |x, y| Complex64::new(x * x - y + 0.3, 0.0)).normalized().unwrap();
        let rep = local_representation(&state, &scars).unwrap();
        assert!((rep.cumulative.last().unwrap() - 1.0).abs() < 1e-8);
        assert!(rep.cumulative.windows(2).all(|w| w[1] >= w[0]));
        let sx: f64 = rep.intensities.iter().sum();
        assert!(sx <= 1.0 + 1e-8);
        let r = rep.participation_ratio().unwrap();
        assert!((1.0..=16.0).contains(&r));
    }

    #[test]
    fn intensity_averages() {
        let big = scar_intensity_average(1, 1e6, 0.0).unwrap();
        assert!(big < 1e-4);
        let a = scar_intensity_average(1, 50.0, 0.0).unwrap();
        let b = scar_intensity_average(1, 50.0, 0.3).unwrap();
        assert!((a - b).abs() / a < 0.01);
        let a = scar_intensity_average(1, 0.5, 0.0).unwrap();
        let b = scar_intensity_average(1, 0.5, 0.3).unwrap();
        assert!((a - b).abs() / a > 0.05);
        assert!(matches!(scar_intensity_average(2, 0.1, -0.3), Err(Error::Singularity(_))));
        assert!(scar_intensity_average(3, 1.0, 0.0).is_err());
    }

    #[test]
    fn participation_extremes() {
        assert_eq!(participation_ratio(&[0.0, 1.0, 0.0]).unwrap(), 1.0);
        let n = 7;
        let c = vec![1.0 / (n as f64).sqrt(); n];
        assert!((participation_ratio(&c).unwrap() - n as f64).abs() < 1e-12);
        assert!(participation_ratio(&[0.0; 3]).is_err());
    }

    #[test]
    fn pr_estimates() {
        assert!((mean_pr_estimate(3.0, Irrep::A1) - 8.0).abs() < 1e-12);
        assert!((mean_pr_estimate(3.0, Irrep::E1) - 6.0).abs() < 1e-12);
        assert!((semiclassical_pr(4.0 * PI, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(adimensional_pr(1.0, 2.0), 0.0);
    }

    #[test]
    fn weibull_distribution() {
        assert!((weibull_cdf(2.8323, 1.2030, 2.8323) - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        for r in [0.1, 1.0, 3.0] {
            assert!((weibull_cdf(r, 1.0, 1.0) - (1.0 - (-r).exp())).abs() < 1e-15);
        }
        // ∫₀^r pdf = cdf
        let (k, l, r) = (1.203, 2.8323, 4.0);
        let n = 20000;
        let h = r / n as f64;
        let mut s = 0.0;
        for i in 0..n {
            let x = (i as f64 + 0.5) * h;
            s += weibull_pdf(x, k, l) * h;
        }
        assert!((s - weibull_cdf(r, k, l)).abs() < 1e-6);
    }

    #[test]
    fn weibull_fit_recovers_parameters() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let d = Weibull::new(2.8323, 1.2030).unwrap();
        let x: Vec<f64> = (0..2000).map(|_| d.sample(&mut rng)).collect();
        let f = weibull_fit(&x).unwrap();
        assert_eq!(f.method, FitMethod::MaximumLikelihood);
        assert!((f.k / 1.2030 - 1.0).abs() < 0.05 && (f.l / 2.8323 - 1.0).abs() < 0.05, "{f:?}");
        let mut with_zero = x.clone();
        with_zero[0] = 0.0;
        let f = weibull_fit(&with_zero).unwrap();
        assert_eq!(f.method, FitMethod::LeastSquaresCdf);
        assert!((f.k / 1.2030 - 1.0).abs() < 0.1 && (f.l / 2.8323 - 1.0).abs() < 0.1, "{f:?}");
        assert!(weibull_fit(&[1.0; 30]).is_err());
        assert!(weibull_fit(&[1.0, 2.0]).is_err());
    }

    #[test]
    fn bounds() {
        let b = error_bounds(0.0);
        assert_eq!((b.energy, b.overlap_deficit), (0.0, 0.0));
        let b = error_bounds(0.1);
        assert!((b.energy - 7.905694150420949e-4).abs() < 1e-15);
        assert!((b.overlap_deficit - 3.1622776601683795e-5).abs() < 1e-15);
        assert!(b.valid && !error_bounds(0.3).valid);
    }

    #[test]
    fn mobile_mean_cases() {
        let c = vec![2.5; 30];
        assert!(mobile_mean(&c, 20).iter().all(|v| (v - 2.5).abs() < 1e-12));
        let s: Vec<f64> = (0..30).map(|i| (i as f64).sin()).collect();
        assert_eq!(mobile_mean(&s, 1), s);
        let ramp: Vec<f64> = (0..50).map(|i| 0.3 * i as f64 - 1.0).collect();
        let m = mobile_mean(&ramp, 20);
        for i in 0..50 {
            assert!((m[i] - ramp[i]).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn participation_ratio_bounds(c in prop::collection::vec(-1.0f64..1.0, 1..40)) {
            prop_assume!(c.iter().any(|v| v.abs() > 1e-3));
            let r = participation_ratio(&c).unwrap();
            prop_assert!(r >= 1.0 - 1e-12 && r <= c.len() as f64 + 1e-9);
        }

        #[test]
        fn mobile_mean_stays_in_range(s in prop::collection::vec(-5.0f64..5.0, 1..60), w in 1usize..25) {
            let m = mobile_mean(&s, w);
            let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(m.iter().all(|v| *v >= lo - 1e-12 && *v <= hi + 1e-12));
        }
    }
}

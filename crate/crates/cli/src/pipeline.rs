//! Pipeline stages behind the subcommands.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use qscar::analysis::{
    adimensional_pr, compare_states, comparison_csv, local_representation, mean_pr_estimate, mobile_mean, scar_intensity_average, weibull_fit,
    StateComparison, C_FIT,
};
use qscar::basis::{
    basis_size, build_candidates, candidate_levels, eigenstate, run_window, selection_csv, window_grid, CandidateOptions, Candidate, SelectionWindow,
    WindowRun,
};
use qscar::classical::{parse_orbit_table, HamiltonianParams, OrbitOptions, OrbitRecord, PeriodicOrbit, DEFAULT_ORBIT_TABLE};
use qscar::quantization::{enumerate_levels, levels_csv, DesymTable, Irrep, WeylLaw};
use qscar::reference::{build_reference_spectrum, HOBasisSpec, ReferenceSpectrum};
use qscar::wavefunctions::{ehrenfest_time, semiclassical_dispersion, EhrenfestConstants, Grid2D, GridHamiltonian, ScarOptions};
use serde_json::json;

use crate::config::RunConfig;

/// Error tagged with the pipeline stage that produced it.
#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[{}] {}", self.stage, self.message)
    }
}

pub type StageResult<T> = Result<T, StageError>;

trait Tag<T> {
    fn stage(self, stage: &'static str) -> StageResult<T>;
}

impl<T, E: std::fmt::Display> Tag<T> for Result<T, E> {
    fn stage(self, stage: &'static str) -> StageResult<T> {
        self.map_err(|e| StageError { stage, message: e.to_string() })
    }
}

/// Collects written files for the manifest.
pub struct Outputs {
    dir: PathBuf,
    files: Vec<String>,
}

impl Outputs {
    pub fn new(dir: &Path) -> StageResult<Self> {
        fs::create_dir_all(dir).stage("output")?;
        Ok(Self { dir: dir.to_path_buf(), files: Vec::new() })
    }

    fn write(&mut self, name: &str, text: &str) -> StageResult<()> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).stage("output")?;
        }
        fs::write(&p, text).stage("output")?;
        self.files.push(name.to_string());
        Ok(())
    }

    fn path(&mut self, name: &str) -> StageResult<PathBuf> {
        let p = self.dir.join(name);
        if let Some(parent) = p.parent() {
            fs::create_dir_all(parent).stage("output")?;
        }
        self.files.push(name.to_string());
        Ok(p)
    }

    pub fn manifest(&mut self, command: &str, cfg: &RunConfig, extra: serde_json::Value) -> StageResult<()> {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
        let mut files = self.files.clone();
        files.sort();
        let m = json!({
            "command": command,
            "version": env!("CARGO_PKG_VERSION"),
            "config": cfg.to_text().lines().collect::<Vec<_>>(),
            "tolerances": {
                "orbit_closure": OrbitOptions::default().closure_tol,
                "orbit_ode": OrbitOptions::default().ode_tol,
                "rank": qscar::basis::RANK_TOL,
                "leakage": cfg.leakage_tol,
                "reference_convergence": qscar::reference::CONVERGENCE_TOL,
                "deflation": qscar::analysis::DEFLATION_TOL,
                "time_step_phase": ScarOptions::default().phase_step,
            },
            "seeds": {},
            "results": extra,
            "outputs": files,
            "generated_unix": now,
        });
        let text = serde_json::to_string_pretty(&m).stage("output")?;
        fs::write(self.dir.join("manifest.json"), text + "\n").stage("output")
    }
}

pub fn load_records(cfg: &RunConfig) -> StageResult<Vec<OrbitRecord>> {
    let text = match &cfg.orbits {
        Some(p) => fs::read_to_string(p).stage("orbits")?,
        None => DEFAULT_ORBIT_TABLE.to_string(),
    };
    let mut recs = parse_orbit_table(&text).stage("orbits")?;
    if !cfg.orbit_ids.is_empty() {
        for id in &cfg.orbit_ids {
            if !recs.iter().any(|r| r.id == *id) {
                return Err(StageError { stage: "orbits", message: format!("orbit {id} not in table") });
            }
        }
        recs.retain(|r| cfg.orbit_ids.contains(&r.id));
    }
    Ok(recs)
}

pub fn load_desym(cfg: &RunConfig) -> StageResult<DesymTable> {
    match &cfg.desym {
        Some(p) => DesymTable::load(p).stage("quantize"),
        None => Ok(DesymTable::shipped()),
    }
}

fn build_orbits(recs: &[OrbitRecord], params: &HamiltonianParams) -> StageResult<Vec<PeriodicOrbit>> {
    recs.iter().map(|r| r.to_orbit(params, &OrbitOptions::default())).collect::<Result<_, _>>().stage("orbits")
}

fn window(cfg: &RunConfig, irrep: Irrep) -> StageResult<SelectionWindow> {
    SelectionWindow::new(cfg.window.0, cfg.window.1, cfg.c_b, irrep, cfg.hbar).stage("window")
}

fn grid_for(cfg: &RunConfig, w: &SelectionWindow, params: &HamiltonianParams) -> StageResult<Grid2D> {
    let g = window_grid(w, params).stage("grid")?;
    match cfg.grid {
        Some(n) => Grid2D::new(n, n, g.x_extent, g.y_extent).stage("grid"),
        None => Ok(g),
    }
}

fn candidate_options(cfg: &RunConfig) -> CandidateOptions {
    CandidateOptions { scar: ScarOptions { order: cfg.order, leakage_tol: cfg.leakage_tol, ..Default::default() }, ..Default::default() }
}

pub fn orbits(cfg: &RunConfig) -> StageResult<()> {
    let params = cfg.params().stage("config")?;
    let recs = load_records(cfg)?;
    let pos = build_orbits(&recs, &params)?;
    let mut out = Outputs::new(&cfg.out)?;
    let mut s = String::from("id,action,lambda,mu,n_s,n_t,relevance,period,closure_error,trace\n");
    for po in &pos {
        let _ = writeln!(
            s,
            "{},{:.17e},{:.17e},{},{},{},{:.17e},{:.17e},{:.17e},{:.17e}",
            po.id,
            po.action,
            po.lambda,
            po.mu,
            po.n_s,
            po.n_t,
            po.relevance(),
            po.period,
            po.closure_error,
            po.monodromy.transversal_matrix[0][0] + po.monodromy.transversal_matrix[1][1]
        );
    }
    out.write("orbits.csv", &s)?;
    let table: Vec<OrbitRecord> = pos.iter().map(OrbitRecord::from_orbit).collect();
    out.write("orbits.dat", &qscar::classical::format_orbit_table(&table))?;
    out.manifest("orbits", cfg, json!({ "orbits": pos.len() }))
}

pub fn quantize(cfg: &RunConfig) -> StageResult<()> {
    let recs = load_records(cfg)?;
    let desym = load_desym(cfg)?;
    let mut out = Outputs::new(&cfg.out)?;
    let mut counts = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let levels = enumerate_levels(&recs, &desym, irrep, cfg.window.0, cfg.window.1, cfg.hbar);
        counts.insert(irrep.to_string(), json!(levels.len()));
        out.write(&format!("levels_{irrep}.csv"), &levels_csv(&levels))?;
    }
    out.manifest("quantize", cfg, json!({ "levels": counts }))
}

fn candidates(cfg: &RunConfig, irrep: Irrep) -> StageResult<(SelectionWindow, GridHamiltonian, Vec<Candidate>)> {
    let params = cfg.params().stage("config")?;
    let recs = load_records(cfg)?;
    let desym = load_desym(cfg)?;
    let w = window(cfg, irrep)?;
    let g = grid_for(cfg, &w, &params)?;
    let ham = GridHamiltonian::new(g, params);
    let pos = build_orbits(&recs, &params)?;
    let levels = candidate_levels(&recs, &desym, &w, cfg.hbar);
    let c = build_candidates(&pos, &levels, &w, &ham, &candidate_options(cfg)).stage("scars")?;
    Ok((w, ham, c))
}

fn candidates_csv(c: &[Candidate], hbar: f64) -> String {
    let lyap = EhrenfestConstants::default();
    let mut s = String::from("orbit,n,irrep,energy,sigma,sigma_semiclassical,eta,delta_e,ehrenfest_time\n");
    for c in c {
        let e = c.scar.bs_energy;
        let sbar = semiclassical_dispersion(lyap.mean_lyapunov(e), ehrenfest_time(e, c.scar.irrep, hbar), hbar);
        let _ = writeln!(
            s,
            "{},{},{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
            c.scar.orbit, c.scar.n, c.scar.irrep, e, c.scar.sigma, sbar, c.eta, c.delta_e, c.scar.ehrenfest_time
        );
    }
    s
}

pub fn scars(cfg: &RunConfig) -> StageResult<()> {
    let mut out = Outputs::new(&cfg.out)?;
    let mut counts = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let (_, _, c) = candidates(cfg, irrep)?;
        counts.insert(irrep.to_string(), json!(c.len()));
        out.write(&format!("scars_{irrep}.csv"), &candidates_csv(&c, cfg.hbar))?;
        if cfg.snapshots {
            for c in &c {
                let p = out.path(&format!("scars_{irrep}/po{}_n{}.qswf", c.scar.orbit, c.scar.n))?;
                let meta = format!("scar orbit={} n={} irrep={} sigma={:?}", c.scar.orbit, c.scar.n, irrep, c.scar.sigma);
                c.scar.wavefunction.write_snapshot(&p, c.scar.bs_energy, &meta).stage("output")?;
            }
        }
    }
    out.manifest("scars", cfg, json!({ "scars": counts }))
}

pub fn select(cfg: &RunConfig) -> StageResult<()> {
    let mut out = Outputs::new(&cfg.out)?;
    let mut info = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let (w, ham, c) = candidates(cfg, irrep)?;
        let n_b = basis_size(&w, &WeylLaw::new(irrep, &ham.params));
        let sel = qscar::basis::sgsm_select(&c, n_b).stage("select")?;
        let gram = sel.gram_error().stage("select")?;
        info.insert(irrep.to_string(), json!({ "n_b": n_b, "pool": c.len(), "sigma_bar": w.sigma_bar, "gram_error": gram }));
        out.write(&format!("scars_{irrep}.csv"), &candidates_csv(&c, cfg.hbar))?;
        out.write(&format!("selection_{irrep}.csv"), &selection_csv(&sel, &c))?;
    }
    out.manifest("select", cfg, serde_json::Value::Object(info))
}

fn solve_one(cfg: &RunConfig, irrep: Irrep) -> StageResult<WindowRun> {
    let params = cfg.params().stage("config")?;
    let recs = load_records(cfg)?;
    let desym = load_desym(cfg)?;
    let w = window(cfg, irrep)?;
    let g = grid_for(cfg, &w, &params)?;
    let ham = GridHamiltonian::new(g, params);
    let pos = build_orbits(&recs, &params)?;
    run_window(&pos, &desym, &w, &ham, &candidate_options(cfg)).stage("solve")
}

fn write_run(out: &mut Outputs, cfg: &RunConfig, irrep: Irrep, run: &WindowRun) -> StageResult<serde_json::Value> {
    out.write(&format!("scars_{irrep}.csv"), &candidates_csv(&run.candidates, cfg.hbar))?;
    out.write(&format!("selection_{irrep}.csv"), &selection_csv(&run.selection, &run.candidates))?;
    out.write(&format!("spectrum_{irrep}.csv"), &run.spectrum.csv())?;
    if cfg.snapshots {
        for k in (0..run.spectrum.len()).filter(|&k| run.spectrum.in_window[k]) {
            let mut psi = eigenstate(&run.spectrum, &run.selection, k).stage("output")?;
            psi.normalize().stage("output")?;
            let p = out.path(&format!("states_{irrep}/state{:04}.qswf", k + 1))?;
            psi.write_snapshot(&p, run.spectrum.eigenvalues[k], &format!("eigenstate {} irrep={irrep}", k + 1)).stage("output")?;
        }
    }
    Ok(json!({
        "n_b": run.n_b,
        "pool": run.candidates.len(),
        "sigma_bar": run.window.sigma_bar,
        "gram_error": run.selection.gram_error().stage("solve")?,
        "asymmetry": run.asymmetry,
        "grid": run.selection.auxiliaries.first().map(|a| a.grid.nx),
        "states_in_window": run.spectrum.in_window.iter().filter(|b| **b).count(),
    }))
}

pub fn solve(cfg: &RunConfig) -> StageResult<()> {
    let mut out = Outputs::new(&cfg.out)?;
    let mut info = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let run = solve_one(cfg, irrep)?;
        info.insert(irrep.to_string(), write_run(&mut out, cfg, irrep, &run)?);
    }
    out.manifest("solve", cfg, serde_json::Value::Object(info))
}

fn reference_one(cfg: &RunConfig, irrep: Irrep) -> StageResult<ReferenceSpectrum> {
    let params = cfg.params().stage("config")?;
    let spec = HOBasisSpec::new(cfg.omega, cfg.n_max, irrep).stage("reference")?;
    build_reference_spectrum(&spec, &params).stage("reference")
}

pub fn reference(cfg: &RunConfig) -> StageResult<()> {
    let mut out = Outputs::new(&cfg.out)?;
    let mut info = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let r = reference_one(cfg, irrep)?;
        info.insert(irrep.to_string(), json!({ "block": r.len(), "converged": r.converged.iter().filter(|c| **c).count() }));
        out.write(&format!("reference_{irrep}.csv"), &r.csv())?;
    }
    out.manifest("reference", cfg, serde_json::Value::Object(info))
}

/// In-window states of a run joined with the reference states.
pub fn compare_run(run: &WindowRun, r: &ReferenceSpectrum, params: &HamiltonianParams) -> StageResult<Vec<StateComparison>> {
    let g = run.selection.auxiliaries.first().map(|a| a.grid).ok_or_else(|| StageError { stage: "compare", message: "empty basis".into() })?;
    let (lo, hi) = run.window.enlarged();
    let mut refs = Vec::new();
    for k in 0..r.len() {
        let e = r.eigenvalues[k];
        if e > lo - 1.0 && e < hi + 1.0 {
            if !r.converged[k] {
                return Err(StageError { stage: "compare", message: format!("reference state {} (E = {e}) not converged; raise n_max", k + 1) });
            }
            refs.push((k + 1, e, r.project_to_grid(k, &g).stage("compare")?));
        }
    }
    let mut states = Vec::new();
    for k in (0..run.spectrum.len()).filter(|&k| run.spectrum.in_window[k]) {
        let mut psi = eigenstate(&run.spectrum, &run.selection, k).stage("compare")?;
        psi.normalize().stage("compare")?;
        states.push((k + 1, run.spectrum.eigenvalues[k], run.spectrum.sigma[k], psi));
    }
    let weyl = WeylLaw::new(run.window.irrep, params);
    compare_states(&states, &refs, |e| weyl.density(e)).stage("compare")
}

pub fn compare(cfg: &RunConfig) -> StageResult<()> {
    let params = cfg.params().stage("config")?;
    let mut out = Outputs::new(&cfg.out)?;
    let mut info = serde_json::Map::new();
    for &irrep in &cfg.irreps {
        let run = solve_one(cfg, irrep)?;
        let mut v = write_run(&mut out, cfg, irrep, &run)?;
        let r = reference_one(cfg, irrep)?;
        out.write(&format!("reference_{irrep}.csv"), &r.csv())?;
        let rows = compare_run(&run, &r, &params)?;
        out.write(&format!("comparison_{irrep}.csv"), &comparison_csv(&rows))?;
        let applicable: Vec<_> = rows.iter().filter(|c| c.bounds().valid).collect();
        v["bound_applicable"] = json!(applicable.len());
        v["bound_satisfied"] = json!(applicable.iter().filter(|c| c.within_bounds()).count());
        info.insert(irrep.to_string(), v);
    }
    out.manifest("compare", cfg, serde_json::Value::Object(info))
}

pub fn analyze(cfg: &RunConfig) -> StageResult<()> {
    let mut out = Outputs::new(&cfg.out)?;
    let mut info = serde_json::Map::new();
    let lyap = EhrenfestConstants::default();
    for &irrep in &cfg.irreps {
        let run = solve_one(cfg, irrep)?;
        let mut v = write_run(&mut out, cfg, irrep, &run)?;
        let weyl = WeylLaw::new(irrep, &cfg.params().stage("config")?);
        let scars: Vec<_> = run.selection.selected.iter().map(|&j| run.candidates[j].scar.wavefunction.clone()).collect();
        let labels: Vec<(u32, u32)> = run.selection.selected.iter().map(|&j| (run.candidates[j].scar.orbit, run.candidates[j].scar.n)).collect();
        let mut table = String::from("index,energy,R,entries\n");
        let mut plot = String::from("index,energy,x1,x2,R,r,x1_mobile,x2_mobile,R_mobile,x1_semiclassical,x1_semiclassical_c,x2_semiclassical,x2_semiclassical_c,R_mean\n");
        let mut rows = Vec::new();
        let mut ordered = 0;
        for k in (0..run.spectrum.len()).filter(|&k| run.spectrum.in_window[k]) {
            let mut psi = eigenstate(&run.spectrum, &run.selection, k).stage("analyze")?;
            psi.normalize().stage("analyze")?;
            let rep = local_representation(&psi, &scars).stage("analyze")?;
            if rep.is_ordered(1e-12) {
                ordered += 1;
            }
            let r = rep.participation_ratio().stage("analyze")?;
            let e = run.spectrum.eigenvalues[k];
            let entries: Vec<String> =
                rep.order.iter().zip(&rep.cumulative).take(4).map(|(&j, c)| format!("({};{};{:.1})", labels[j].0, labels[j].1, 100.0 * c)).collect();
            let _ = writeln!(table, "{},{:.17e},{:.17e},{}", k + 1, e, r, entries.join(" "));
            let x = rep.sorted_intensities();
            rows.push((k + 1, e, x.first().copied().unwrap_or(0.0), x.get(1).copied().unwrap_or(0.0), r));
        }
        let x1: Vec<f64> = rows.iter().map(|r| r.2).collect();
        let x2: Vec<f64> = rows.iter().map(|r| r.3).collect();
        let rr: Vec<f64> = rows.iter().map(|r| r.4).collect();
        let (m1, m2, mr) = (mobile_mean(&x1, 20), mobile_mean(&x2, 20), mobile_mean(&rr, 20));
        let mut rs = Vec::new();
        for (i, &(idx, e, a, b, r)) in rows.iter().enumerate() {
            let sbar_r = weyl.density(e) * semiclassical_dispersion(lyap.mean_lyapunov(e), ehrenfest_time(e, irrep, cfg.hbar), cfg.hbar);
            let r_bar = mean_pr_estimate(sbar_r, irrep);
            let radim = adimensional_pr(r, r_bar);
            rs.push(radim);
            let f = |j: usize, c: f64| scar_intensity_average(j, sbar_r, c).map(|v| format!("{v:.17e}")).unwrap_or_default();
            let _ = writeln!(
                plot,
                "{idx},{e:.17e},{a:.17e},{b:.17e},{r:.17e},{radim:.17e},{:.17e},{:.17e},{:.17e},{},{},{},{},{r_bar:.17e}",
                m1[i],
                m2[i],
                mr[i],
                f(1, 0.0),
                f(1, C_FIT[0]),
                f(2, 0.0),
                f(2, C_FIT[1])
            );
        }
        out.write(&format!("reconstruction_{irrep}.csv"), &table)?;
        out.write(&format!("intensities_{irrep}.csv"), &plot)?;
        v["states"] = json!(rows.len());
        v["intensity_ordered_states"] = json!(ordered);
        if let Ok(fit) = weibull_fit(&rs) {
            v["weibull"] = json!({ "k": fit.k, "l": fit.l, "method": format!("{:?}", fit.method) });
        }
        info.insert(irrep.to_string(), v);
    }
    out.manifest("analyze", cfg, serde_json::Value::Object(info))
}

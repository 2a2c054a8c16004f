use qscar::classical::{parse_orbit_table, HamiltonianParams, OrbitOptions, PeriodicOrbit, DEFAULT_ORBIT_TABLE};
use qscar::quantization::{bs_energy, BSLevel, DesymTable, Irrep};
use qscar::wavefunctions::{
    count_sign_changes, ehrenfest_time, inner_product, scaled_path, scar_function, symmetry_defect, tube_function, Grid2D, GridHamiltonian,
    ScarOptions, TubeOptions, WaveFunction,
};

fn orbit(id: u32) -> PeriodicOrbit {
    let recs = parse_orbit_table(DEFAULT_ORBIT_TABLE).unwrap();
    recs.iter().find(|r| r.id == id).unwrap().to_orbit(&HamiltonianParams::default(), &OrbitOptions::default()).unwrap()
}

fn scar(po: &PeriodicOrbit, irrep: Irrep, n: u32, ham: &GridHamiltonian) -> Option<(f64, WaveFunction)> {
    let recs = parse_orbit_table(DEFAULT_ORBIT_TABLE).unwrap();
    let rec = recs.iter().find(|r| r.id == po.id).unwrap();
    let e = bs_energy(rec, &DesymTable::shipped(), irrep, n, 1.0).ok()?;
    let level = BSLevel { orbit: po.id, n, irrep, energy: e };
    let tube = tube_function(po, &level, &ham.grid, 1.0, &TubeOptions::default()).ok()?;
    let s = scar_function(&tube, &level, ehrenfest_time(e, irrep, 1.0), ham, &ScarOptions::default()).unwrap();
    Some((e, s.wavefunction))
}

#[test]
fn scars_of_different_irreps_are_orthogonal() {
    let p = HamiltonianParams::default();
    let ham = GridHamiltonian::new(Grid2D::for_energy(25.0, &p).unwrap(), p);
    let po = orbit(5);
    let irreps = [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2, Irrep::E1];
    let scars: Vec<(Irrep, WaveFunction)> = irreps.iter().map(|&r| (r, scar(&po, r, 2, &ham).unwrap().1)).collect();
    for (r, wf) in &scars {
        assert!(symmetry_defect(wf, *r).unwrap() < 1e-10, "{r}");
    }
    for i in 0..scars.len() {
        for j in i + 1..scars.len() {
            let o = inner_product(&scars[i].1, &scars[j].1).unwrap().norm();
            assert!(o < 1e-10, "{} vs {}: {o:e}", scars[i].0, scars[j].0);
        }
    }
}

#[test]
fn node_count_law_on_po6() {
    let p = HamiltonianParams::default();
    let ham = GridHamiltonian::new(Grid2D::for_energy(25.0, &p).unwrap(), p);
    let desym = DesymTable::shipped();
    // PO 3 retraces itself, so sign counting along it is ambiguous.
    for id in [6u32] {
        let po = orbit(id);
        for irrep in [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2, Irrep::E1] {
            let Ok(entry) = desym.applicable(id, irrep) else { continue };
            let Some((e, wf)) = scar(&po, irrep, 2, &ham) else { continue };
            let law = entry.p * po.n_t * (4 + entry.n_dirichlet().unwrap()) / 2;
            let path = scaled_path(&po, e).unwrap();
            let pts: Vec<(f64, f64)> = path.states[..path.states.len() - 1].iter().map(|s| (s.x, s.y)).collect();
            assert_eq!(count_sign_changes(&wf, &pts) as u32, law, "PO {id} {irrep}");
        }
    }
}

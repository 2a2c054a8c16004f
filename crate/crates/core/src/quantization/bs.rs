use std::f64::consts::PI;
use std::fmt::Write as _;

use super::{DesymEntry, DesymTable, Irrep};
use crate::classical::OrbitRecord;
use crate::{Error, Result};

/// A Bohr–Sommerfeld level of one desymmetrized orbit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BSLevel {
    pub orbit: u32,
    pub n: u32,
    pub irrep: Irrep,
    pub energy: f64,
}

/// E_n^{3/4} = 2πħ p/S · [n + μ/(4p) + N_D/2], with S and μ of the full orbit at E = 1.
pub fn bs_energy_from(action: f64, mu: u32, entry: &DesymEntry, n: u32, hbar: f64) -> Option<f64> {
    let (nd, _) = entry.counts?;
    let p = entry.p as f64;
    let e34 = 2.0 * PI * hbar * p / action * (n as f64 + mu as f64 / (4.0 * p) + nd as f64 / 2.0);
    Some(e34.powf(4.0 / 3.0))
}

pub fn bs_energy(orbit: &OrbitRecord, desym: &DesymTable, irrep: Irrep, n: u32, hbar: f64) -> Result<f64> {
    let entry = desym.applicable(orbit.id, irrep)?;
    let e = bs_energy_from(orbit.action, orbit.mu, entry, n, hbar).ok_or(Error::Inapplicable { orbit: orbit.id, irrep })?;
    if !(e > 0.0) {
        return Err(Error::Domain(format!("orbit {} level {n} has non-positive energy", orbit.id)));
    }
    Ok(e)
}

/// All levels with e_lo < E_n < e_hi, sorted by energy (ties by orbit, then n).
pub fn enumerate_levels(orbits: &[OrbitRecord], desym: &DesymTable, irrep: Irrep, e_lo: f64, e_hi: f64, hbar: f64) -> Vec<BSLevel> {
    let mut out = Vec::new();
    if !(e_lo < e_hi) {
        return out;
    }
    for o in orbits {
        let Some(entry) = desym.get(o.id, irrep).filter(|e| e.is_applicable()) else { continue };
        for n in 0.. {
            let Some(e) = bs_energy_from(o.action, o.mu, entry, n, hbar) else { break };
            if e >= e_hi {
                break;
            }
            if e > e_lo {
                out.push(BSLevel { orbit: o.id, n, irrep, energy: e });
            }
        }
    }
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy).then(a.orbit.cmp(&b.orbit)).then(a.n.cmp(&b.n)));
    out
}

pub fn levels_csv(levels: &[BSLevel]) -> String {
    let mut s = String::from("orbit,n,irrep,energy\n");
    for l in levels {
        writeln!(s, "{},{},{},{:.17e}", l.orbit, l.n, l.irrep, l.energy).expect("writing to a String cannot fail");
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{parse_orbit_table, PhaseSpaceState, DEFAULT_ORBIT_TABLE};

    fn table_row(id: u32, action: f64, mu: u32) -> OrbitRecord {
        OrbitRecord { id, action, lambda: 0.5, mu, n_s: 2, n_t: 1, initial_state: PhaseSpaceState::default(), period: 0.75 * action }
    }

    #[test]
    fn diagonal_orbit_ground_level() {
        let t = DesymTable::shipped();
        let e = bs_energy(&table_row(3, 8.2945, 2), &t, Irrep::A1, 0, 1.0).unwrap();
        // (2π/4.14725 · 0.25)^{4/3}
        let expect = (2.0 * PI / 4.14725 * 0.25f64).powf(4.0 / 3.0);
        assert!((e - expect).abs() < 1e-12);
        assert!((e - 0.2740).abs() < 1e-4);
        let e1 = bs_energy(&table_row(3, 8.2945, 2), &t, Irrep::A1, 1, 1.0).unwrap();
        assert!(e1 > e);
    }

    #[test]
    fn inapplicable_pair_is_an_error() {
        let t = DesymTable::shipped();
        assert!(matches!(bs_energy(&table_row(1, 22.1111, 16), &t, Irrep::A2, 0, 1.0), Err(Error::Inapplicable { .. })));
    }

    #[test]
    fn enumeration_sorted_and_bounded() {
        let orbits = parse_orbit_table(DEFAULT_ORBIT_TABLE).unwrap();
        let t = DesymTable::shipped();
        assert!(enumerate_levels(&orbits, &t, Irrep::A1, 5.0, 5.0, 1.0).is_empty());
        let lv = enumerate_levels(&orbits, &t, Irrep::A1, 0.0, 30.0, 1.0);
        assert!(lv.windows(2).all(|w| w[0].energy <= w[1].energy));
        assert!(lv.iter().all(|l| l.energy > 0.0 && l.energy < 30.0));
        let mut keys: Vec<(u32, u32)> = lv.iter().map(|l| (l.orbit, l.n)).collect();
        keys.sort();
        keys.dedup();
        assert_eq!(keys.len(), lv.len());
        assert!(levels_csv(&lv).lines().count() == lv.len() + 1);
    }
}

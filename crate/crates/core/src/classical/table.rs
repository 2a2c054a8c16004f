//! Line-oriented orbit table: `id S lambda mu N_s N_t x0 y0 px0 py0 T`.

use std::fmt::Write as _;
use std::path::Path;

use super::hamiltonian::{PhaseSpaceState, Potential};
use super::orbit::{OrbitOptions, PeriodicOrbit};
use crate::{Error, Result};

/// One row of the orbit table (all values at E = 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrbitRecord {
    pub id: u32,
    pub action: f64,
    pub lambda: f64,
    pub mu: u32,
    pub n_s: u32,
    pub n_t: u32,
    pub initial_state: PhaseSpaceState,
    pub period: f64,
}

/// The eighteen shortest-orbit initial conditions shipped with the crate.
pub const DEFAULT_ORBIT_TABLE: &str = include_str!("../../data/orbits.dat");

impl OrbitRecord {
    pub fn from_orbit(po: &PeriodicOrbit) -> Self {
        Self {
            id: po.id,
            action: po.action,
            lambda: po.lambda,
            mu: po.mu,
            n_s: po.n_s,
            n_t: po.n_t,
            initial_state: po.initial_state,
            period: po.period,
        }
    }

    /// Rebuilds path, monodromy and winding from the stored initial condition.
    pub fn to_orbit<P: Potential>(&self, pot: &P, opts: &OrbitOptions) -> Result<PeriodicOrbit> {
        PeriodicOrbit::from_initial(pot, self.id, &self.initial_state, self.period, opts)
    }

    pub fn relevance(&self) -> f64 {
        super::orbit::relevance(self.lambda, self.action, 1.0, self.n_s, self.n_t)
    }
}

pub fn parse_orbit_table(text: &str) -> Result<Vec<OrbitRecord>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 11 {
            return Err(Error::parse(i + 1, format!("expected 11 fields, found {}", f.len())));
        }
        let num = |k: usize| -> Result<f64> { f[k].parse::<f64>().map_err(|e| Error::parse(i + 1, format!("field {}: {e}", k + 1))) };
        let int = |k: usize| -> Result<u32> { f[k].parse::<u32>().map_err(|e| Error::parse(i + 1, format!("field {}: {e}", k + 1))) };
        let rec = OrbitRecord {
            id: int(0)?,
            action: num(1)?,
            lambda: num(2)?,
            mu: int(3)?,
            n_s: int(4)?,
            n_t: int(5)?,
            initial_state: PhaseSpaceState::new(num(6)?, num(7)?, num(8)?, num(9)?),
            period: num(10)?,
        };
        if !(rec.period > 0.0 && rec.action > 0.0) {
            return Err(Error::parse(i + 1, "period and action must be positive"));
        }
        out.push(rec);
    }
    Ok(out)
}

/// Formats with the shortest representation that parses back to the same bits.
pub fn format_orbit_table(records: &[OrbitRecord]) -> String {
    let mut s = String::from("# id S lambda mu N_s N_t x0 y0 px0 py0 T   (E = 1)\n");
    for r in records {
        let z = r.initial_state;
        let _ = writeln!(
            s,
            "{} {:?} {:?} {} {} {} {:?} {:?} {:?} {:?} {:?}",
            r.id, r.action, r.lambda, r.mu, r.n_s, r.n_t, z.x, z.y, z.px, z.py, r.period
        );
    }
    s
}

pub fn read_orbit_table(path: &Path) -> Result<Vec<OrbitRecord>> {
    parse_orbit_table(&std::fs::read_to_string(path)?)
}

pub fn write_orbit_table(path: &Path, records: &[OrbitRecord]) -> Result<()> {
    std::fs::write(path, format_orbit_table(records))?;
    Ok(())
}

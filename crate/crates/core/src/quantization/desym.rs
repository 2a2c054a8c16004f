use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::Irrep;
use crate::{Error, Result};

/// Boundary-condition bookkeeping of one desymmetrized orbit in one irrep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesymEntry {
    /// Ratio between the full period and the desymmetrized one.
    pub p: u32,
    /// Dirichlet and Neumann reflections; `None` when the orbit does not
    /// support this irrep.
    pub counts: Option<(u32, u32)>,
}

impl DesymEntry {
    pub fn is_applicable(&self) -> bool {
        self.counts.is_some()
    }

    pub fn n_dirichlet(&self) -> Option<u32> {
        self.counts.map(|c| c.0)
    }

    pub fn n_neumann(&self) -> Option<u32> {
        self.counts.map(|c| c.1)
    }

    pub fn n_reflections(&self) -> Option<u32> {
        self.counts.map(|(d, n)| d + n)
    }
}

/// Period ratios and Dirichlet/Neumann counts for every (orbit, irrep).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DesymTable {
    entries: BTreeMap<(u32, Irrep), DesymEntry>,
}

pub const DEFAULT_DESYM_TABLE: &str = include_str!("../../data/desym.dat");

impl DesymTable {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 5 {
                return Err(Error::parse(i + 1, format!("expected 5 fields, found {}", f.len())));
            }
            let po = f[0].parse::<u32>().map_err(|e| Error::parse(i + 1, e.to_string()))?;
            let irrep = f[1].parse::<Irrep>().map_err(|e| Error::parse(i + 1, e))?;
            let p = f[2].parse::<u32>().map_err(|e| Error::parse(i + 1, e.to_string()))?;
            if ![1, 2, 4].contains(&p) {
                return Err(Error::parse(i + 1, format!("period ratio must be 1, 2 or 4, got {p}")));
            }
            let counts = match (f[3], f[4]) {
                ("-", "-") => None,
                (d, n) => Some((
                    d.parse::<u32>().map_err(|e| Error::parse(i + 1, e.to_string()))?,
                    n.parse::<u32>().map_err(|e| Error::parse(i + 1, e.to_string()))?,
                )),
            };
            if entries.insert((po, irrep), DesymEntry { p, counts }).is_some() {
                return Err(Error::parse(i + 1, format!("duplicate entry for orbit {po} {irrep}")));
            }
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn shipped() -> Self {
        Self::parse(DEFAULT_DESYM_TABLE).expect("shipped desymmetrization table parses")
    }

    pub fn get(&self, orbit: u32, irrep: Irrep) -> Option<&DesymEntry> {
        self.entries.get(&(orbit, irrep))
    }

    /// Entry for an applicable (orbit, irrep) pair.
    pub fn applicable(&self, orbit: u32, irrep: Irrep) -> Result<&DesymEntry> {
        match self.get(orbit, irrep) {
            Some(e) if e.is_applicable() => Ok(e),
            _ => Err(Error::Inapplicable { orbit, irrep }),
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Irrep, &DesymEntry)> {
        self.entries.iter().map(|(&(o, r), e)| (o, r, e))
    }

    pub fn format(&self) -> String {
        let mut s = String::from("# po irrep p N_D N_N\n");
        for (o, r, e) in self.iter() {
            match e.counts {
                Some((d, n)) => writeln!(s, "{o} {r} {} {d} {n}", e.p),
                None => writeln!(s, "{o} {r} {} - -", e.p),
            }
            .expect("writing to a String cannot fail");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shipped_table_invariants() {
        let t = DesymTable::shipped();
        assert_eq!(t.iter().count(), 18 * 6);
        for (o, r, e) in t.iter() {
            if r == Irrep::A1 {
                assert_eq!(e.n_dirichlet(), Some(0), "orbit {o}");
            }
            if let Some((d, n)) = e.counts {
                assert_eq!(e.n_reflections(), Some(d + n));
            }
        }
        assert!(!t.get(1, Irrep::A2).unwrap().is_applicable());
        assert!(t.applicable(3, Irrep::B1).is_err());
        assert_eq!(t.get(7, Irrep::E1).unwrap().p, 1);
    }

    #[test]
    fn format_round_trip() {
        let t = DesymTable::shipped();
        assert_eq!(DesymTable::parse(&t.format()).unwrap(), t);
    }

    #[test]
    fn rejects_bad_ratio() {
        assert!(DesymTable::parse("1 A1 3 0 1\n").is_err());
    }
}

//! Run configuration: `key = value` file, then command-line overrides.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use qscar::classical::HamiltonianParams;
use qscar::quantization::Irrep;
use qscar::wavefunctions::SplitOrder;

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub beta: f64,
    pub hbar: f64,
    /// None means the shipped table.
    pub orbits: Option<PathBuf>,
    pub desym: Option<PathBuf>,
    /// Restrict to these orbit ids (all when empty).
    pub orbit_ids: Vec<u32>,
    pub irreps: Vec<Irrep>,
    pub window: (f64, f64),
    pub c_b: f64,
    /// Grid points per axis; None uses the sizing rule.
    pub grid: Option<usize>,
    pub order: SplitOrder,
    pub leakage_tol: f64,
    pub n_max: u32,
    pub omega: f64,
    pub snapshots: bool,
    pub out: PathBuf,
    pub threads: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            beta: 0.01,
            hbar: 1.0,
            orbits: None,
            desym: None,
            orbit_ids: Vec::new(),
            irreps: vec![Irrep::A1],
            window: (0.0, 25.0),
            c_b: 2.0,
            grid: None,
            order: SplitOrder::Second,
            leakage_tol: 1e-6,
            n_max: 140,
            omega: 1.0,
            snapshots: false,
            out: PathBuf::from("qscar-out"),
            threads: None,
        }
    }
}

pub fn parse_window(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or_else(|| format!("window must be LO:HI, got '{s}'"))?;
    let lo: f64 = a.trim().parse().map_err(|_| format!("bad window edge '{a}'"))?;
    let hi: f64 = b.trim().parse().map_err(|_| format!("bad window edge '{b}'"))?;
    if !(lo < hi) {
        return Err(format!("window needs LO < HI, got {lo}:{hi}"));
    }
    Ok((lo, hi))
}

pub fn parse_irreps(s: &str) -> Result<Vec<Irrep>, String> {
    s.split(',').map(|t| Irrep::from_str(t.trim())).collect()
}

pub fn parse_ids(s: &str) -> Result<Vec<u32>, String> {
    s.split(',').map(|t| t.trim().parse::<u32>().map_err(|_| format!("bad orbit id '{t}'"))).collect()
}

pub fn parse_order(s: &str) -> Result<SplitOrder, String> {
    match s.trim() {
        "2" | "second" => Ok(SplitOrder::Second),
        "4" | "fourth" => Ok(SplitOrder::Fourth),
        other => Err(format!("split order must be 2 or 4, got '{other}'")),
    }
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.trim() {
        "1" | "true" | "yes" => Ok(true),
        "0" | "false" | "no" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

fn num<T: FromStr>(key: &str, v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("bad value '{v}' for {key}"))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let v = value.trim();
        match key.trim() {
            "beta" => self.beta = num(key, v)?,
            "hbar" => self.hbar = num(key, v)?,
            "orbits" => self.orbits = Some(PathBuf::from(v)),
            "desym" => self.desym = Some(PathBuf::from(v)),
            "orbit_ids" => self.orbit_ids = parse_ids(v)?,
            "irrep" => self.irreps = parse_irreps(v)?,
            "window" => self.window = parse_window(v)?,
            "cb" => self.c_b = num(key, v)?,
            "grid" => self.grid = Some(num(key, v)?),
            "order" => self.order = parse_order(v)?,
            "leakage_tol" => self.leakage_tol = num(key, v)?,
            "n_max" => self.n_max = num(key, v)?,
            "omega" => self.omega = num(key, v)?,
            "snapshots" => self.snapshots = parse_bool(v)?,
            "out" => self.out = PathBuf::from(v),
            "threads" => self.threads = Some(num(key, v)?),
            other => return Err(format!("unknown key '{other}'")),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), String> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| format!("line {}: expected key = value", i + 1))?;
            self.set(k, v).map_err(|e| format!("line {}: {e}", i + 1))?;
        }
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        let mut c = Self::default();
        c.apply_text(&text)?;
        Ok(c)
    }

    pub fn params(&self) -> Result<HamiltonianParams, String> {
        HamiltonianParams::new(self.beta, self.hbar).map_err(|e| e.to_string())
    }

    pub fn validate(&self) -> Result<(), String> {
        self.params()?;
        for p in [&self.orbits, &self.desym].into_iter().flatten() {
            if !p.is_file() {
                return Err(format!("{} is not a readable file", p.display()));
            }
        }
        if !(self.window.0 < self.window.1) {
            return Err(format!("window needs LO < HI, got {}:{}", self.window.0, self.window.1));
        }
        if !(self.c_b >= 0.0) {
            return Err(format!("c_b must be non-negative, got {}", self.c_b));
        }
        if self.irreps.is_empty() {
            return Err("no irrep given".into());
        }
        Ok(())
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn to_text(&self) -> String {
        let ids: Vec<String> = self.orbit_ids.iter().map(u32::to_string).collect();
        let irreps: Vec<String> = self.irreps.iter().map(Irrep::to_string).collect();
        let mut s = String::new();
        s += &format!("beta = {:?}\nhbar = {:?}\n", self.beta, self.hbar);
        if let Some(p) = &self.orbits {
            s += &format!("orbits = {}\n", p.display());
        }
        if let Some(p) = &self.desym {
            s += &format!("desym = {}\n", p.display());
        }
        if !ids.is_empty() {
            s += &format!("orbit_ids = {}\n", ids.join(","));
        }
        s += &format!("irrep = {}\nwindow = {:?}:{:?}\ncb = {:?}\n", irreps.join(","), self.window.0, self.window.1, self.c_b);
        if let Some(g) = self.grid {
            s += &format!("grid = {g}\n");
        }
        let order = match self.order {
            SplitOrder::Second => 2,
            SplitOrder::Fourth => 4,
        };
        s += &format!("order = {order}\nleakage_tol = {:?}\nn_max = {}\nomega = {:?}\nsnapshots = {}\nout = {}\n", self.leakage_tol, self.n_max, self.omega, self.snapshots, self.out.display());
        if let Some(t) = self.threads {
            s += &format!("threads = {t}\n");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let mut c = RunConfig::default();
        c.apply_text("# desk run\nirrep = A1, E\nwindow = 0:25\norbit_ids = 1,2,3,5,7\ncb=2.5\ngrid = 128\norder = 4\n").unwrap();
        assert_eq!(c.irreps, vec![Irrep::A1, Irrep::E1]);
        assert_eq!(c.window, (0.0, 25.0));
        assert_eq!(c.orbit_ids, vec![1, 2, 3, 5, 7]);
        assert_eq!(c.grid, Some(128));
        assert_eq!(c.order, SplitOrder::Fourth);
        let mut d = RunConfig::default();
        d.apply_text(&c.to_text()).unwrap();
        assert_eq!(c, d);
    }

    #[test]
    fn rejects_bad_input() {
        let mut c = RunConfig::default();
        assert!(c.apply_text("window = 5:1").is_err());
        assert!(c.apply_text("colour = red").is_err());
        assert!(c.apply_text("just text").is_err());
        assert!(parse_order("3").is_err());
    }
}

use std::fmt;
use std::str::FromStr;

/// Irreducible representations of C4v; E is split into its two real partners.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Irrep {
    A1,
    A2,
    B1,
    B2,
    E1,
    E2,
}

impl Irrep {
    pub const ALL: [Irrep; 6] = [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2, Irrep::E1, Irrep::E2];

    pub fn dimension(self) -> usize {
        match self {
            Irrep::E1 | Irrep::E2 => 2,
            _ => 1,
        }
    }

    pub fn is_one_dimensional(self) -> bool {
        self.dimension() == 1
    }

    /// Eigenvalues under (σ_x: y→−y, σ_y: x→−x, σ_d: x↔y). The E partners are
    /// not eigenfunctions of σ_d and report `None` for it.
    pub fn reflection_signs(self) -> (f64, f64, Option<f64>) {
        match self {
            Irrep::A1 => (1.0, 1.0, Some(1.0)),
            Irrep::A2 => (-1.0, -1.0, Some(-1.0)),
            Irrep::B1 => (1.0, 1.0, Some(-1.0)),
            Irrep::B2 => (-1.0, -1.0, Some(1.0)),
            Irrep::E1 => (1.0, -1.0, None),
            Irrep::E2 => (-1.0, 1.0, None),
        }
    }
}

impl fmt::Display for Irrep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Irrep::A1 => "A1",
            Irrep::A2 => "A2",
            Irrep::B1 => "B1",
            Irrep::B2 => "B2",
            Irrep::E1 => "E1",
            Irrep::E2 => "E2",
        };
        f.write_str(s)
    }
}

impl FromStr for Irrep {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_uppercase().as_str() {
            "A1" => Ok(Irrep::A1),
            "A2" => Ok(Irrep::A2),
            "B1" => Ok(Irrep::B1),
            "B2" => Ok(Irrep::B2),
            "E1" | "E" => Ok(Irrep::E1),
            "E2" => Ok(Irrep::E2),
            other => Err(format!("unknown irreducible representation '{other}'")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display_round_trip() {
        for r in Irrep::ALL {
            assert_eq!(r.to_string().parse::<Irrep>().unwrap(), r);
        }
        assert_eq!("e".parse::<Irrep>().unwrap(), Irrep::E1);
        assert!("C3".parse::<Irrep>().is_err());
    }

    #[test]
    fn dimensions() {
        assert_eq!(Irrep::A1.dimension(), 1);
        assert_eq!(Irrep::E2.dimension(), 2);
    }
}

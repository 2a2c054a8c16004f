use num_complex::Complex64;

use super::WaveFunction;
use crate::quantization::Irrep;
use crate::{Error, Result};

/// Elements of C4v acting on functions, (gψ)(r) = ψ(g⁻¹r).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SymOp {
    Identity,
    /// Rotation by +90°.
    C4,
    C2,
    /// Rotation by −90°.
    C4Inv,
    /// Reflection y → −y.
    SigmaX,
    /// Reflection x → −x.
    SigmaY,
    /// Reflection x ↔ y.
    SigmaD,
    /// Reflection (x, y) → (−y, −x).
    SigmaDPrime,
}

impl SymOp {
    pub const ALL: [SymOp; 8] =
        [SymOp::Identity, SymOp::C4, SymOp::C2, SymOp::C4Inv, SymOp::SigmaX, SymOp::SigmaY, SymOp::SigmaD, SymOp::SigmaDPrime];

    /// Grid indices (i, j) of g⁻¹ applied to point (i, j) on an n×n grid.
    fn source(self, i: usize, j: usize, n: usize) -> (usize, usize) {
        let r = |k: usize| n - 1 - k;
        match self {
            SymOp::Identity => (i, j),
            SymOp::C4 => (j, r(i)),
            SymOp::C2 => (r(i), r(j)),
            SymOp::C4Inv => (r(j), i),
            SymOp::SigmaX => (i, r(j)),
            SymOp::SigmaY => (r(i), j),
            SymOp::SigmaD => (j, i),
            SymOp::SigmaDPrime => (r(j), r(i)),
        }
    }

    /// Character of this element in a one-dimensional irrep, or the
    /// eigenvalue of the E partner when it is an eigenfunction.
    pub fn character(self, irrep: Irrep) -> Option<f64> {
        use SymOp::*;
        let v = match (irrep, self) {
            (_, Identity) => 1.0,
            (Irrep::A1, _) => 1.0,
            (Irrep::A2, C4 | C2 | C4Inv) => 1.0,
            (Irrep::A2, _) => -1.0,
            (Irrep::B1 | Irrep::B2, C2) => 1.0,
            (Irrep::B1 | Irrep::B2, C4 | C4Inv) => -1.0,
            (Irrep::B1, SigmaX | SigmaY) => 1.0,
            (Irrep::B1, _) => -1.0,
            (Irrep::B2, SigmaX | SigmaY) => -1.0,
            (Irrep::B2, _) => 1.0,
            (Irrep::E1 | Irrep::E2, C2) => -1.0,
            (Irrep::E1, SigmaX) | (Irrep::E2, SigmaY) => 1.0,
            (Irrep::E1, SigmaY) | (Irrep::E2, SigmaX) => -1.0,
            (Irrep::E1 | Irrep::E2, _) => return None,
        };
        Some(v)
    }
}

fn require_square(wf: &WaveFunction) -> Result<usize> {
    if !wf.grid.is_square() {
        return Err(Error::Domain("symmetry operations need a square grid".into()));
    }
    Ok(wf.grid.nx)
}

pub fn apply_op(op: SymOp, wf: &WaveFunction) -> Result<WaveFunction> {
    let n = require_square(wf)?;
    let mut out = WaveFunction::zeros(wf.grid);
    for j in 0..n {
        for i in 0..n {
            let (si, sj) = op.source(i, j, n);
            out.values[j * n + i] = wf.values[sj * n + si];
        }
    }
    Ok(out)
}

/// Projection onto the irrep: the C4v character projector for the
/// one-dimensional irreps, the parity projector for the E partners.
pub fn project(wf: &WaveFunction, irrep: Irrep) -> Result<WaveFunction> {
    let n = require_square(wf)?;
    let terms: Vec<(SymOp, f64)> = match irrep {
        Irrep::E1 | Irrep::E2 => [SymOp::Identity, SymOp::SigmaX, SymOp::SigmaY, SymOp::C2]
            .iter()
            .map(|&g| (g, g.character(irrep).expect("defined for parity operations") / 4.0))
            .collect(),
        _ => SymOp::ALL.iter().map(|&g| (g, g.character(irrep).expect("one-dimensional") / 8.0)).collect(),
    };
    let mut out = WaveFunction::zeros(wf.grid);
    for j in 0..n {
        for i in 0..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(g, c) in &terms {
                let (si, sj) = g.source(i, j, n);
                acc += wf.values[sj * n + si] * c;
            }
            out.values[j * n + i] = acc;
        }
    }
    Ok(out)
}

/// Largest deviation max_g ‖gψ − χ(g)ψ‖/‖ψ‖ over the elements where the
/// state should be an eigenfunction.
pub fn symmetry_defect(wf: &WaveFunction, irrep: Irrep) -> Result<f64> {
    let norm = wf.norm();
    let mut worst = 0.0f64;
    for g in SymOp::ALL {
        let Some(c) = g.character(irrep) else { continue };
        let mut gw = apply_op(g, wf)?;
        gw.axpy(Complex64::new(-c, 0.0), wf)?;
        worst = worst.max(gw.norm() / norm);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::{inner_product, Grid2D};

    fn generic(n: usize) -> WaveFunction {
        let g = Grid2D::square(n, 4.0).unwrap();
        WaveFunction::from_fn(g, |x, y| {
            let r = (-(x - 0.7).powi(2) - (y - 0.2).powi(2)).exp();
            Complex64::new(r * (1.0 + x * y * y), 0.3 * r * y)
        })
    }

    #[test]
    fn ops_match_coordinates() {
        let g = Grid2D::square(8, 2.0).unwrap();
        let w = WaveFunction::from_fn(g, |x, y| Complex64::new(x + 10.0 * y, 0.0));
        let r = apply_op(SymOp::C4, &w).unwrap();
        // (C4 ψ)(x, y) = ψ(y, −x)
        for j in 0..8 {
            for i in 0..8 {
                let (x, y) = (g.x(i), g.y(j));
                assert!((r.at(i, j).re - (y - 10.0 * x)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn projectors_idempotent_and_closed() {
        let w = generic(32);
        for irrep in Irrep::ALL {
            let p1 = project(&w, irrep).unwrap();
            let p2 = project(&p1, irrep).unwrap();
            let mut d = p2.clone();
            d.axpy(Complex64::new(-1.0, 0.0), &p1).unwrap();
            assert!(d.norm() < 1e-12 * p1.norm().max(1.0));
            assert!(symmetry_defect(&p1, irrep).unwrap() < 1e-12, "{irrep}");
        }
    }

    #[test]
    fn projections_resolve_identity_and_are_orthogonal() {
        let w = generic(32);
        let parts: Vec<WaveFunction> = [Irrep::A1, Irrep::A2, Irrep::B1, Irrep::B2, Irrep::E1, Irrep::E2]
            .iter()
            .map(|&r| project(&w, r).unwrap())
            .collect();
        let mut rest = w.clone();
        for p in &parts {
            rest.axpy(Complex64::new(-1.0, 0.0), p).unwrap();
        }
        assert!(rest.norm() < 1e-12);
        for a in 0..parts.len() {
            for b in (a + 1)..parts.len() {
                assert!(inner_product(&parts[a], &parts[b]).unwrap().norm() < 1e-12);
            }
        }
    }
}

use super::WaveFunction;

fn catmull_rom(p: [f64; 4], t: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    0.5 * ((2.0 * p[1]) + (-p[0] + p[2]) * t + (2.0 * p[0] - 5.0 * p[1] + 4.0 * p[2] - p[3]) * t2 + (-p[0] + 3.0 * p[1] - 3.0 * p[2] + p[3]) * t3)
}

/// Bicubic (Catmull–Rom) interpolation of the real part at (x, y).
pub fn interpolate_real(wf: &WaveFunction, x: f64, y: f64) -> f64 {
    let g = &wf.grid;
    let fx = (x + g.x_extent) / g.dx - 0.5;
    let fy = (y + g.y_extent) / g.dy - 0.5;
    let i = (fx.floor() as isize).clamp(1, g.nx as isize - 3);
    let j = (fy.floor() as isize).clamp(1, g.ny as isize - 3);
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let mut rows = [0.0; 4];
    for (r, row) in rows.iter_mut().enumerate() {
        let jj = (j - 1 + r as isize) as usize;
        let mut p = [0.0; 4];
        for (c, v) in p.iter_mut().enumerate() {
            *v = wf.at((i - 1 + c as isize) as usize, jj).re;
        }
        *row = catmull_rom(p, tx);
    }
    catmull_rom(rows, ty)
}

/// Sign changes of the real part along a closed polyline. Samples with
/// |ψ| below `1e-8·max` are skipped so that points sitting on a nodal line
/// are not double counted.
pub fn count_sign_changes(wf: &WaveFunction, points: &[(f64, f64)]) -> usize {
    let vals: Vec<f64> = points.iter().map(|&(x, y)| interpolate_real(wf, x, y)).collect();
    let m = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let kept: Vec<f64> = vals.into_iter().filter(|v| v.abs() > 1e-8 * m).collect();
    if kept.len() < 2 {
        return 0;
    }
    let mut n = 0;
    for k in 0..kept.len() {
        let next = kept[(k + 1) % kept.len()];
        if (kept[k] > 0.0) != (next > 0.0) {
            n += 1;
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wavefunctions::Grid2D;
    use num_complex::Complex64;

    #[test]
    fn interpolation_reproduces_smooth_field() {
        let g = Grid2D::square(64, 4.0).unwrap();
        let w = WaveFunction::from_fn(g, |x, y| Complex64::new((0.7 * x).sin() * (0.4 * y).cos(), 0.0));
        let v = interpolate_real(&w, 0.33, -1.27);
        assert!((v - (0.7 * 0.33f64).sin() * (0.4 * -1.27f64).cos()).abs() < 1e-4);
    }

    #[test]
    fn counts_angular_nodes_on_circle() {
        let g = Grid2D::square(64, 4.0).unwrap();
        // cos(3φ) has six sign changes around a circle.
        let w = WaveFunction::from_fn(g, |x, y| Complex64::new(x * x * x - 3.0 * x * y * y, 0.0));
        let pts: Vec<(f64, f64)> = (0..500).map(|k| {
            let a = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / 500.0;
            (2.0 * a.cos(), 2.0 * a.sin())
        }).collect();
        assert_eq!(count_sign_changes(&w, &pts), 6);
    }
}

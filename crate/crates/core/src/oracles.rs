//! Brute-force reference values for the test suites.
//!
//! Nothing here calls into the estimators it is meant to check: norms are
//! re-derived from their defining sums and suprema are taken over explicit
//! grids.

use crate::spaces::{SpaceKind, SpaceSpec};

/// `sum_i g_i(eta_i)` form of a norm raised to its exponent, valid for
/// non-increasing `eta` where no rearrangement is needed.
struct Additive {
    exponent: f64,
    weights: Vec<f64>,
}

fn additive(space: &SpaceSpec, len: usize) -> Option<Additive> {
    match space.kind() {
        SpaceKind::Schatten { p } => Some(Additive {
            exponent: *p,
            weights: vec![1.0; len],
        }),
        SpaceKind::Lorentz { weights, p } if weights.len() >= len => Some(Additive {
            exponent: *p,
            weights: weights.weights()[..len].to_vec(),
        }),
        _ => None,
    }
}

/// Supremum of `||xi* eta||_F / ||eta||_G` over the grid of non-increasing
/// `eta` with `eta_1 = 1` and remaining entries in `{0, 1/k, ..., 1}`.
///
/// `F` and `G` must be Schatten or Lorentz spaces. Every grid point is
/// feasible after rescaling, so the result never exceeds the true supremum.
pub fn grid_multiplier_sup(f: &SpaceSpec, g: &SpaceSpec, xi: &[f64], k: usize) -> f64 {
    let mut xs: Vec<f64> = xi.iter().map(|v| v.abs()).collect();
    xs.sort_by(|a, b| b.partial_cmp(a).unwrap());
    while xs.last() == Some(&0.0) {
        xs.pop();
    }
    let len = xs.len();
    if len == 0 {
        return 0.0;
    }
    let fa = additive(f, len).expect("grid oracle needs Schatten or Lorentz F");
    let ga = additive(g, len).expect("grid oracle needs Schatten or Lorentz G");
    let levels: Vec<f64> = (0..=k).map(|l| l as f64 / k as f64).collect();
    let ftab: Vec<Vec<f64>> = (0..len)
        .map(|i| {
            levels
                .iter()
                .map(|&e| (xs[i] * e).powf(fa.exponent) * fa.weights[i])
                .collect()
        })
        .collect();
    let gtab: Vec<Vec<f64>> = (0..len)
        .map(|i| {
            levels
                .iter()
                .map(|&e| e.powf(ga.exponent) * ga.weights[i])
                .collect()
        })
        .collect();

    let mut best = 0.0f64;
    let mut visit = |fsum: f64, gsum: f64| {
        let r = fsum.powf(1.0 / fa.exponent) / gsum.powf(1.0 / ga.exponent);
        best = best.max(r);
    };
    fn dfs(
        i: usize,
        cap: usize,
        fsum: f64,
        gsum: f64,
        ftab: &[Vec<f64>],
        gtab: &[Vec<f64>],
        visit: &mut dyn FnMut(f64, f64),
    ) {
        if i == ftab.len() {
            visit(fsum, gsum);
            return;
        }
        for l in 0..=cap {
            dfs(
                i + 1,
                l,
                fsum + ftab[i][l],
                gsum + gtab[i][l],
                ftab,
                gtab,
                visit,
            );
        }
    }
    let k_top = levels.len() - 1;
    dfs(
        1,
        k_top,
        ftab[0][k_top],
        gtab[0][k_top],
        &ftab,
        &gtab,
        &mut visit,
    );
    best
}

/// Singular values of a real 2x2 matrix from its Frobenius norm and
/// determinant.
pub fn singular_values_2x2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let det = (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs();
    let disc = (fro2 * fro2 - 4.0 * det * det).max(0.0).sqrt();
    (
        ((fro2 + disc) / 2.0).sqrt(),
        ((fro2 - disc) / 2.0).max(0.0).sqrt(),
    )
}

fn schatten_2(p: f64, s: (f64, f64)) -> f64 {
    (s.0.powf(p) + s.1.powf(p)).powf(1.0 / p)
}

/// `sup ||[a, x]||_{C_q}` over real 2x2 `x` on the Hilbert-Schmidt unit
/// sphere, sampled on a hyperspherical angle grid of spacing `step`.
pub fn grid_derivation_norm_2x2(a: [[f64; 2]; 2], q: f64, step: f64) -> f64 {
    use std::f64::consts::PI;
    let n1 = (PI / step).ceil() as usize;
    let n3 = (2.0 * PI / step).ceil() as usize;
    let mut best = 0.0f64;
    for i in 0..=n1 {
        let t1 = i as f64 * step;
        for j in 0..=n1 {
            let t2 = j as f64 * step;
            for l in 0..n3 {
                let t3 = l as f64 * step;
                let x = [
                    [t1.cos(), t1.sin() * t2.cos()],
                    [
                        t1.sin() * t2.sin() * t3.cos(),
                        t1.sin() * t2.sin() * t3.sin(),
                    ],
                ];
                let mut c = [[0.0; 2]; 2];
                for r in 0..2 {
                    for s in 0..2 {
                        c[r][s] = (0..2).map(|m| a[r][m] * x[m][s] - x[r][m] * a[m][s]).sum();
                    }
                }
                best = best.max(schatten_2(q, singular_values_2x2(c)));
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_oracle_on_holder_example() {
        let s1 = SpaceSpec::schatten(1.0).unwrap();
        let s2 = SpaceSpec::schatten(2.0).unwrap();
        // optimum eta = (1,1)/sqrt 2 lies on the grid
        let v = grid_multiplier_sup(&s1, &s2, &[1.0, 1.0], 40);
        assert!((v - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn closed_form_2x2_singular_values() {
        let (a, b) = singular_values_2x2([[0.0, 2.0], [0.0, 0.0]]);
        assert!((a - 2.0).abs() < 1e-15 && b.abs() < 1e-15);
        let (a, b) = singular_values_2x2([[3.0, 0.0], [0.0, -4.0]]);
        assert!((a - 4.0).abs() < 1e-12 && (b - 3.0).abs() < 1e-12);
    }
}

//! Supremum search kernels shared by the multiplier and derivation estimators.
//!
//! Restarts run in parallel; each owns a ChaCha stream keyed by its restart
//! id, and results are merged in restart order, so the outcome depends only
//! on the seed.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::Result;
use crate::multipliers::SearchBudget;
use crate::operators::{complex_gaussian, sample_matrix, Ensemble, Matrix, C64};
use crate::pava::project_decreasing_nonneg;

/// Best point found by a search, together with the number of objective
/// evaluations spent.
#[derive(Clone, Debug)]
pub(crate) struct Found<T> {
    pub point: T,
    pub value: f64,
    pub evaluations: u64,
}

pub(crate) fn restart_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64 + 1);
    rng
}

/// Keeps the first maximum so that ties resolve to the lowest restart id.
fn merge<T>(results: Vec<Found<T>>) -> Option<Found<T>> {
    let evaluations = results.iter().map(|f| f.evaluations).sum();
    let best = results
        .into_iter()
        .reduce(|b, f| if f.value > b.value { f } else { b });
    best.map(|mut b| {
        b.evaluations = evaluations;
        b
    })
}

/// Maximizes a scale-invariant `ratio` over non-negative non-increasing
/// vectors of length `len`, by coordinate and prefix-block moves, each
/// followed by pool-adjacent-violators projection. `normalize` rescales a
/// nonzero cone point onto the unit sphere of the constraint norm.
pub(crate) fn decreasing_cone_sup(
    ratio: &(dyn Fn(&[f64]) -> f64 + Sync),
    normalize: &(dyn Fn(&mut [f64]) + Sync),
    seeds: &[Vec<f64>],
    len: usize,
    budget: &SearchBudget,
) -> Found<Vec<f64>> {
    let runs: Vec<Found<Vec<f64>>> = (0..budget.restarts())
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(budget.seed(), r);
            let start = match seeds.get(r) {
                Some(s) => s.clone(),
                None => random_decreasing(&mut rng, len),
            };
            cone_ascent(ratio, normalize, start, budget.steps(), &mut rng)
        })
        .collect();
    merge(runs).expect("at least one restart")
}

fn random_decreasing(rng: &mut ChaCha8Rng, len: usize) -> Vec<f64> {
    let shape: f64 = rng.random_range(0.2..3.0);
    let mut v: Vec<f64> = (0..len)
        .map(|_| rng.random_range(0.0f64..1.0).powf(shape))
        .collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v[0] = v[0].max(1e-3);
    v
}

fn cone_ascent(
    ratio: &(dyn Fn(&[f64]) -> f64 + Sync),
    normalize: &(dyn Fn(&mut [f64]) + Sync),
    start: Vec<f64>,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Found<Vec<f64>> {
    let len = start.len();
    let mut evaluations = 0u64;
    let mut eval = |cand: &mut Vec<f64>| -> Option<f64> {
        let projected = project_decreasing_nonneg(cand);
        if projected.iter().all(|&v| v == 0.0) {
            return None;
        }
        *cand = projected;
        normalize(cand);
        evaluations += 1;
        Some(ratio(cand))
    };

    let mut point = start;
    let mut value = eval(&mut point).unwrap_or(0.0);
    let mut step = 0.5;
    for _ in 0..steps {
        let mut improved = false;
        // coordinates 0..len, then prefix blocks 1..=len, then one random direction
        for mv in 0..(2 * len + 1) {
            for sign in [1.0, -1.0] {
                let mut cand = point.clone();
                if mv < len {
                    cand[mv] += sign * step;
                } else if mv < 2 * len {
                    cand[..=mv - len].iter_mut().for_each(|v| *v += sign * step);
                } else {
                    cand.iter_mut().for_each(|v| {
                        let g: f64 = rng.sample(StandardNormal);
                        *v += sign * step * g;
                    });
                }
                if let Some(val) = eval(&mut cand) {
                    if val > value {
                        value = val;
                        point = cand;
                        improved = true;
                        break;
                    }
                }
            }
        }
        if !improved {
            step *= 0.5;
            if step < 1e-12 {
                break;
            }
        }
    }
    Found {
        point,
        value,
        evaluations,
    }
}

fn random_start(rng: &mut ChaCha8Rng, n: usize, restart: usize) -> Matrix {
    match restart % 4 {
        1 => sample_matrix(rng, n, Ensemble::Gaussian),
        2 => {
            let u = nalgebra::DVector::from_fn(n, |_, _| complex_gaussian(rng));
            let v = nalgebra::DVector::from_fn(n, |_, _| complex_gaussian(rng));
            Matrix::outer(&u, &v).expect("equal lengths")
        }
        3 => sample_matrix(rng, n, Ensemble::Unitary),
        _ => sample_matrix(rng, n, Ensemble::Diagonal),
    }
}

/// Hill-climbs a scale-invariant matrix `ratio` from each seed (restart `r`
/// uses `seeds[r]`, later restarts draw from the random ensembles).
pub(crate) fn matrix_sup(
    ratio: &(dyn Fn(&Matrix) -> Result<f64> + Sync),
    n: usize,
    seeds: &[Matrix],
    budget: &SearchBudget,
) -> Result<Found<Matrix>> {
    let runs: Vec<Found<Matrix>> = (0..budget.restarts())
        .into_par_iter()
        .map(|r| {
            let mut rng = restart_rng(budget.seed(), r);
            let start = match seeds.get(r) {
                Some(s) => s.clone(),
                None => random_start(&mut rng, n, r),
            };
            matrix_climb(ratio, start, budget.steps(), &mut rng)
        })
        .collect::<Result<_>>()?;
    Ok(merge(runs).expect("at least one restart"))
}

fn matrix_climb(
    ratio: &(dyn Fn(&Matrix) -> Result<f64> + Sync),
    start: Matrix,
    steps: usize,
    rng: &mut ChaCha8Rng,
) -> Result<Found<Matrix>> {
    let n = start.dim();
    let unit = |m: DMatrix<C64>| {
        let f = m.norm();
        if f > 0.0 {
            m / C64::new(f, 0.0)
        } else {
            m
        }
    };
    let mut point = unit(start.into_dmatrix());
    let mut value = ratio(&Matrix::from_dmatrix(point.clone())?)?;
    let mut evaluations = 1u64;
    let mut t = 0.3;
    for _ in 0..steps {
        let g = unit(DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng)));
        let cand = unit(&point + g * C64::new(t, 0.0));
        let val = ratio(&Matrix::from_dmatrix(cand.clone())?)?;
        evaluations += 1;
        if val > value {
            value = val;
            point = cand;
            t = (t * 1.5).min(1.0);
        } else {
            t = (t * 0.7).max(1e-6);
        }
    }
    Ok(Found {
        point: Matrix::from_dmatrix(point)?,
        value,
        evaluations,
    })
}

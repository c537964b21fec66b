//! Multiplier norms `||xi||_{F:G} = sup { ||xi eta||_F : ||eta||_G <= 1 }` and
//! their operator counterparts `||a||_{J:I} = sup { ||a x||_J : ||x||_I <= 1 }`.
//!
//! Closed forms are used where they exist (Holder pairs, Lorentz against
//! Marcinkiewicz, embeddings); everything else is a supremum search and
//! therefore a lower bound.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::operators::{ideal_norm, svd, Matrix, C64};
use crate::search::{decreasing_cone_sup, matrix_sup};
use crate::sequences::{decreasing_rearrangement, Sequence};
use crate::spaces::{analytic_multiplier_space, MultiplierSpace, SpaceKind, SpaceSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    ExactAnalytic,
    LowerBound,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Witness {
    Sequence(Sequence),
    Matrix(Matrix),
}

impl Witness {
    /// First 16 hex digits of SHA-256 over the little-endian entry bytes.
    pub fn digest(&self) -> String {
        let mut hasher = Sha256::new();
        match self {
            Witness::Sequence(s) => {
                hasher.update(b"seq");
                s.as_slice()
                    .iter()
                    .for_each(|v| hasher.update(v.to_le_bytes()));
            }
            Witness::Matrix(m) => {
                hasher.update(b"mat");
                m.as_dmatrix().iter().for_each(|z| {
                    hasher.update(z.re.to_le_bytes());
                    hasher.update(z.im.to_le_bytes());
                });
            }
        }
        hex::encode(hasher.finalize())[..16].to_string()
    }
}

/// A supremum estimate with the point that achieves it.
#[derive(Clone, Debug, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub witness: Witness,
    pub status: Status,
    pub method: String,
    pub evaluations: u64,
    /// Analytic identification of the multiplier space, when one is known.
    pub multiplier_space: Option<MultiplierSpace>,
}

/// Flat serializable view of a [`NormEstimate`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub value: f64,
    pub status: Status,
    pub method: String,
    pub evaluations: u64,
    #[serde(rename = "witness-digest")]
    pub witness_digest: String,
    pub whole_space: bool,
}

impl NormEstimate {
    pub fn record(&self) -> EstimateRecord {
        EstimateRecord {
            value: self.value,
            status: self.status,
            method: self.method.clone(),
            evaluations: self.evaluations,
            witness_digest: self.witness.digest(),
            whole_space: self.multiplier_space == Some(MultiplierSpace::WholeSpace),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.status == Status::ExactAnalytic
    }
}

/// Restarts, ascent steps per restart, and the RNG seed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchBudget {
    restarts: usize,
    steps: usize,
    seed: u64,
}

impl SearchBudget {
    pub fn new(restarts: usize, steps: usize, seed: u64) -> Result<Self> {
        if restarts == 0 || steps == 0 {
            return Err(Error::invalid(format!(
                "search budget needs positive restarts and steps, got {restarts}x{steps}"
            )));
        }
        Ok(SearchBudget {
            restarts,
            steps,
            seed,
        })
    }

    pub fn restarts(&self) -> usize {
        self.restarts
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(self, seed: u64) -> Self {
        SearchBudget { seed, ..self }
    }
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            restarts: 32,
            steps: 200,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Closed form when one applies, search otherwise.
    #[default]
    Auto,
    /// Always search, even when a closed form exists.
    Search,
}

/// Multiplication side: `a x` or `x a`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Side {
    #[default]
    Left,
    Right,
}

fn check_len(space: &SpaceSpec, len: usize) -> Result<()> {
    match space.max_len() {
        Some(max) if len > max => Err(Error::invalid(format!(
            "{space} has {max} weights, needs at least {len}"
        ))),
        _ => Ok(()),
    }
}

/// `||xi||_q` with `1/q = 1/r - 1/p`: the exact value of the `l_r : l_p`
/// multiplier norm.
pub fn holder_oracle(r: f64, p: f64, xi: &Sequence) -> Result<f64> {
    let q = crate::spaces::holder_exponent(r, p)?;
    SpaceSpec::schatten(q)?.norm(xi)
}

/// `||xi* eta||_F / ||eta||_G` for decreasing `eta` of the same length.
fn seq_ratio(f: &SpaceSpec, g: &SpaceSpec, xs: &[f64], eta: &[f64]) -> f64 {
    let den = g.norm_of_decreasing(eta);
    if den == 0.0 {
        return 0.0;
    }
    let prod: Vec<f64> = xs.iter().zip(eta).map(|(a, b)| a * b).collect();
    f.norm_of_decreasing(&prod) / den
}

fn normalize_in(g: &SpaceSpec, eta: &mut [f64]) {
    let n = g.norm_of_decreasing(eta);
    if n > 0.0 {
        eta.iter_mut().for_each(|v| *v /= n);
    }
}

/// Closed-form supremum and a maximizing `eta`, for decreasing `xs` with
/// nonzero leading entry.
fn analytic_seq(f: &SpaceSpec, g: &SpaceSpec, xs: &[f64]) -> Option<(f64, Vec<f64>, &'static str)> {
    let len = xs.len();
    let space = analytic_multiplier_space(f, g)?;
    let mut eta = match (&space, f.kind(), g.kind()) {
        (MultiplierSpace::WholeSpace, _, _) => Sequence::unit(len, 0).into_vec(),
        (MultiplierSpace::Space(_), SpaceKind::Schatten { .. }, SpaceKind::Schatten { p }) => {
            let q = f
                .schatten_exponent()
                .and_then(|r| crate::spaces::holder_exponent(r, *p).ok())?;
            xs.iter().map(|&v| v.powf(q / p)).collect()
        }
        (MultiplierSpace::Space(m), _, SpaceKind::Lorentz { weights, p }) => {
            // the extreme points of the decreasing Lorentz ball are prefix indicators
            let mut best = (0usize, f64::MIN);
            let mut acc = 0.0;
            for (k, (&v, w)) in xs.iter().zip(weights.partial_sums()).enumerate() {
                acc += v.powf(*p);
                if acc / w > best.1 {
                    best = (k + 1, acc / w);
                }
            }
            debug_assert!(matches!(m.kind(), SpaceKind::Marcinkiewicz { .. }));
            Sequence::prefix_indicator(len, best.0).into_vec()
        }
        _ => return None,
    };
    normalize_in(g, &mut eta);
    let (value, method) = match &space {
        MultiplierSpace::WholeSpace => (xs[0], "analytic:whole-space"),
        MultiplierSpace::Space(m) => (
            m.norm_of_decreasing(xs),
            match m.kind() {
                SpaceKind::Marcinkiewicz { .. } => "analytic:marcinkiewicz",
                _ => "analytic:holder",
            },
        ),
    };
    Some((value, eta, method))
}

/// `||xi||_{F:G}` with the default [`Strategy::Auto`].
pub fn multiplier_norm_seq(
    f: &SpaceSpec,
    g: &SpaceSpec,
    xi: &Sequence,
    budget: &SearchBudget,
) -> Result<NormEstimate> {
    estimate_multiplier_norm_seq(f, g, xi, budget, Strategy::Auto)
}

/// Supremum of `||xi* eta||_F` over non-negative non-increasing `eta` with
/// `||eta||_G <= 1`; restricting to such `eta` loses nothing because both
/// norms are symmetric.
pub fn estimate_multiplier_norm_seq(
    f: &SpaceSpec,
    g: &SpaceSpec,
    xi: &Sequence,
    budget: &SearchBudget,
    strategy: Strategy,
) -> Result<NormEstimate> {
    check_len(f, xi.len())?;
    check_len(g, xi.len())?;
    let multiplier_space = analytic_multiplier_space(f, g);
    let full_len = xi.len();
    let xs_full = decreasing_rearrangement(xi);
    let support = xs_full.as_slice().iter().take_while(|&&v| v > 0.0).count();
    if support == 0 {
        return Ok(NormEstimate {
            value: 0.0,
            witness: Witness::Sequence(Sequence::unit(full_len.max(1), 0).truncated(full_len)),
            status: if multiplier_space.is_some() {
                Status::ExactAnalytic
            } else {
                Status::LowerBound
            },
            method: "trivial:zero".into(),
            evaluations: 0,
            multiplier_space,
        });
    }
    let xs = &xs_full.as_slice()[..support];
    let pad = |eta: Vec<f64>| Sequence::from_finite(eta).truncated(full_len);

    if strategy == Strategy::Auto {
        if let Some((value, eta, method)) = analytic_seq(f, g, xs) {
            return Ok(NormEstimate {
                value,
                witness: Witness::Sequence(pad(eta)),
                status: Status::ExactAnalytic,
                method: method.into(),
                evaluations: 1,
                multiplier_space,
            });
        }
    }

    let ratio = |eta: &[f64]| seq_ratio(f, g, xs, eta);
    let normalize = |eta: &mut [f64]| normalize_in(g, eta);

    // e_1, the support indicator and every prefix indicator in between
    let mut family: Vec<(f64, Vec<f64>)> = (1..=support)
        .map(|k| {
            let mut eta = Sequence::prefix_indicator(support, k).into_vec();
            normalize(&mut eta);
            (ratio(&eta), eta)
        })
        .collect();
    let family_evals = family.len() as u64;
    let best_family = family
        .iter()
        .enumerate()
        .fold(0, |b, (i, (v, _))| if *v > family[b].0 { i } else { b });
    let seed_point = family.swap_remove(best_family);

    let found = decreasing_cone_sup(
        &ratio,
        &normalize,
        std::slice::from_ref(&seed_point.1),
        support,
        budget,
    );
    let (mut eta, _) = if found.value > seed_point.0 {
        (found.point, found.value)
    } else {
        (seed_point.1, seed_point.0)
    };
    normalize(&mut eta);
    let value = ratio(&eta);
    Ok(NormEstimate {
        value,
        witness: Witness::Sequence(pad(eta)),
        status: Status::LowerBound,
        method: "search:coordinate-ascent".into(),
        evaluations: found.evaluations + family_evals,
        multiplier_space,
    })
}

fn diag_c(eta: &[f64]) -> DMatrix<C64> {
    DMatrix::from_diagonal(&DVector::from_iterator(
        eta.len(),
        eta.iter().map(|&v| C64::new(v, 0.0)),
    ))
}

/// `||a x||_J / ||x||_I` (or `||x a||_J / ||x||_I`); zero on the zero matrix.
pub fn multiplier_ratio(
    j: &SpaceSpec,
    i: &SpaceSpec,
    a: &Matrix,
    x: &Matrix,
    side: Side,
) -> Result<f64> {
    let den = ideal_norm(i, x)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    let image = match side {
        Side::Left => a.try_mul(x)?,
        Side::Right => x.try_mul(a)?,
    };
    Ok(ideal_norm(j, &image)? / den)
}

/// `||a||_{J:I}` with [`Strategy::Auto`] and left multiplication.
pub fn multiplier_norm_op(
    j: &SpaceSpec,
    i: &SpaceSpec,
    a: &Matrix,
    budget: &SearchBudget,
) -> Result<NormEstimate> {
    estimate_multiplier_norm_op(j, i, a, budget, Strategy::Auto, Side::Left)
}

/// Supremum of `||a x||_J` over `||x||_I <= 1`.
///
/// Seeded with `x = v diag(eta) v^*` where `a = u diag(s) v^*` and `eta` is
/// the sequence estimate for `s(a)`; then random ensembles and hill-climbing
/// refinements. With [`Strategy::Auto`] and a closed form for the sequence
/// pair, the closed form is returned: Horn's inequality
/// `s(ax) <_log s(a) s(x)` makes the operator value equal to the sequence
/// value of `s(a)` for every such pair, diagonal or not.
pub fn estimate_multiplier_norm_op(
    j: &SpaceSpec,
    i: &SpaceSpec,
    a: &Matrix,
    budget: &SearchBudget,
    strategy: Strategy,
    side: Side,
) -> Result<NormEstimate> {
    let n = a.dim();
    check_len(j, n)?;
    check_len(i, n)?;
    let dec = svd(a)?;
    let s = Sequence::from_finite(dec.s.clone());
    let seq = estimate_multiplier_norm_seq(j, i, &s, budget, strategy)?;
    let eta = match &seq.witness {
        Witness::Sequence(eta) => eta.as_slice().to_vec(),
        Witness::Matrix(_) => unreachable!("sequence estimate carries a sequence witness"),
    };
    let basis = match side {
        Side::Left => &dec.v,
        Side::Right => &dec.u,
    };
    let aligned = Matrix::from_dmatrix(basis * diag_c(&eta) * basis.adjoint())?;
    let ratio = |x: &Matrix| multiplier_ratio(j, i, a, x, side);
    let aligned_value = ratio(&aligned)?;

    if seq.status == Status::ExactAnalytic {
        return Ok(NormEstimate {
            value: seq.value,
            witness: Witness::Matrix(aligned),
            status: Status::ExactAnalytic,
            method: seq.method,
            evaluations: seq.evaluations + 1,
            multiplier_space: seq.multiplier_space,
        });
    }

    let found = matrix_sup(&ratio, n, std::slice::from_ref(&aligned), budget)?;
    let (witness, value) = if found.value > aligned_value {
        (found.point, found.value)
    } else {
        (aligned, aligned_value)
    };
    Ok(NormEstimate {
        value,
        witness: Witness::Matrix(witness),
        status: Status::LowerBound,
        method: "search:matrix-hill-climb".into(),
        evaluations: seq.evaluations + found.evaluations + 1,
        multiplier_space: seq.multiplier_space,
    })
}

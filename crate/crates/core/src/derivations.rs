//! Inner derivations `delta_a(x) = [a, x]` between ideals.
//!
//! A derivation `delta` is recovered from its action on rank-one operators
//! through a fixed unit vector `phi0`: `a z phi0 = delta(z p0) phi0` for the
//! projection `p0` onto `phi0`. The result is the gauge-fixed generator
//! `a - (a phi0, phi0) 1`, whose operator norm bounds `||delta||` from below.

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::multipliers::{
    multiplier_norm_op, EstimateRecord, NormEstimate, SearchBudget, Status, Witness,
};
use crate::operators::{
    commutator, complex_gaussian, ideal_norm, sample_matrix, svd, Ensemble, Matrix, C64,
};
use crate::search::matrix_sup;
use crate::spaces::SpaceSpec;

/// Superposition probes used to accept a black-box map as linear.
pub const LINEARITY_PROBES: usize = 8;
pub const LINEARITY_TOL: f64 = 1e-8;
/// Random probes used to measure the reconstruction residual.
pub const RESIDUAL_PROBES: usize = 50;
const PROBE_SEED: u64 = 0xde1a;

/// The unit vector `phi0` that fixes the scalar gauge of a generator.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum Gauge {
    /// `phi0 = e_1`.
    #[default]
    First,
    Vector(DVector<C64>),
}

impl Gauge {
    /// Normalizes `v`; rejects the zero vector.
    pub fn vector(v: DVector<C64>) -> Result<Self> {
        let norm = v.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::invalid("gauge vector must be nonzero and finite"));
        }
        Ok(Gauge::Vector(v / C64::new(norm, 0.0)))
    }

    pub fn phi0(&self, n: usize) -> Result<DVector<C64>> {
        match self {
            Gauge::First => {
                let mut e = DVector::zeros(n);
                e[0] = C64::new(1.0, 0.0);
                Ok(e)
            }
            Gauge::Vector(v) if v.len() == n => Ok(v.clone()),
            Gauge::Vector(v) => Err(Error::invalid(format!(
                "gauge vector has length {}, dimension is {n}",
                v.len()
            ))),
        }
    }
}

/// `delta_a` given by its generator `a`.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationSpec {
    generator: Matrix,
}

impl DerivationSpec {
    pub fn new(generator: Matrix) -> Self {
        DerivationSpec { generator }
    }

    pub fn generator(&self) -> &Matrix {
        &self.generator
    }

    pub fn dim(&self) -> usize {
        self.generator.dim()
    }

    pub fn apply(&self, x: &Matrix) -> Result<Matrix> {
        commutator(&self.generator, x)
    }

    /// Generators `a_re = (a - a^*)/2` and `a_im = (a + a^*)/(2i)`; both are
    /// skew-Hermitian, so `delta_{a_re}` and `delta_{a_im}` commute with the
    /// adjoint and `delta_a = delta_{a_re} + i delta_{a_im}`.
    pub fn split_star(&self) -> (DerivationSpec, DerivationSpec) {
        let a = self.generator.as_dmatrix();
        let a_star = a.adjoint();
        let re = (a - &a_star) * C64::new(0.5, 0.0);
        let im = (a + &a_star) * C64::new(0.0, -0.5);
        (
            DerivationSpec::new(Matrix::from_dmatrix(re).expect("same shape")),
            DerivationSpec::new(Matrix::from_dmatrix(im).expect("same shape")),
        )
    }

    /// `a - (a phi0, phi0) 1`.
    pub fn gauge_generator(&self, gauge: &Gauge) -> Result<Matrix> {
        let phi0 = gauge.phi0(self.dim())?;
        let a = self.generator.as_dmatrix();
        let shift = match gauge {
            Gauge::First => a[(0, 0)],
            Gauge::Vector(_) => phi0.dotc(&(a * &phi0)),
        };
        Ok(self.generator.shifted(-shift))
    }
}

/// Estimate of `||delta_a||_{I -> J}` with the sandwich quantities around it.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivationNormReport {
    pub estimate: NormEstimate,
    pub gauge_generator: Matrix,
    /// `||a_hat||_op`, a certified lower bound for the derivation norm.
    pub op_norm_gauge: f64,
    /// `2 C_J ||a||_{J:I}`.
    pub upper_bound: f64,
    /// Whether `upper_bound` comes from an exact multiplier value.
    pub upper_bound_status: Status,
    pub multiplier: NormEstimate,
}

impl DerivationNormReport {
    pub fn lower_margin(&self) -> f64 {
        self.estimate.value - self.op_norm_gauge
    }

    pub fn upper_margin(&self) -> f64 {
        self.upper_bound - self.estimate.value
    }

    /// Both sandwich inequalities at `tol`; the upper one only when certified.
    pub fn passes(&self, tol: f64) -> bool {
        self.lower_margin() >= -tol
            && (self.upper_bound_status != Status::ExactAnalytic || self.upper_margin() >= -tol)
    }

    pub fn record(&self, space_i: &SpaceSpec, space_j: &SpaceSpec, seed: u64) -> ReportRecord {
        ReportRecord {
            space_i: space_i.to_string(),
            space_j: space_j.to_string(),
            n: self.gauge_generator.dim(),
            seed,
            estimate: self.estimate.record(),
            op_norm_gauge: self.op_norm_gauge,
            upper_bound: self.upper_bound,
            upper_bound_status: self.upper_bound_status,
            margins: Margins {
                lower: self.lower_margin(),
                upper: self.upper_margin(),
            },
            pass: self.passes(1e-8),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Margins {
    pub lower: f64,
    pub upper: f64,
}

/// Serialized form of a [`DerivationNormReport`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportRecord {
    #[serde(rename = "space_I")]
    pub space_i: String,
    #[serde(rename = "space_J")]
    pub space_j: String,
    pub n: usize,
    pub seed: u64,
    pub estimate: EstimateRecord,
    pub op_norm_gauge: f64,
    pub upper_bound: f64,
    pub upper_bound_status: Status,
    pub margins: Margins,
    pub pass: bool,
}

fn check_len(space: &SpaceSpec, n: usize) -> Result<()> {
    match space.max_len() {
        Some(max) if n > max => Err(Error::invalid(format!(
            "{space} has {max} weights, dimension is {n}"
        ))),
        _ => Ok(()),
    }
}

/// `||[a, x]||_J / ||x||_I`; zero on the zero matrix.
pub fn derivation_ratio(
    d: &DerivationSpec,
    space_i: &SpaceSpec,
    space_j: &SpaceSpec,
    x: &Matrix,
) -> Result<f64> {
    let den = ideal_norm(space_i, x)?;
    if den == 0.0 {
        return Ok(0.0);
    }
    Ok(ideal_norm(space_j, &d.apply(x)?)? / den)
}

pub fn norm_estimate(
    d: &DerivationSpec,
    space_i: &SpaceSpec,
    space_j: &SpaceSpec,
    budget: &SearchBudget,
) -> Result<DerivationNormReport> {
    norm_estimate_with(d, space_i, space_j, budget, &Gauge::First)
}

/// Supremum of `||[a, x]||_J` over `||x||_I <= 1`.
///
/// The first restart starts at `x = v phi0^*`, with `v` the top right
/// singular vector of the gauge generator `a_hat`. Since
/// `[a, v phi0^*] phi0 = a_hat v`, that single point already certifies
/// `estimate >= ||a_hat||_op`.
pub fn norm_estimate_with(
    d: &DerivationSpec,
    space_i: &SpaceSpec,
    space_j: &SpaceSpec,
    budget: &SearchBudget,
    gauge: &Gauge,
) -> Result<DerivationNormReport> {
    let n = d.dim();
    check_len(space_i, n)?;
    check_len(space_j, n)?;
    let phi0 = gauge.phi0(n)?;
    let a_hat = d.gauge_generator(gauge)?;
    let dec = svd(&a_hat)?;
    let op_norm_gauge = dec.s[0];
    let top = dec.v.column(0).into_owned();
    let rank_one = Matrix::outer(&top, &phi0)?;

    let ratio = |x: &Matrix| derivation_ratio(d, space_i, space_j, x);
    let seeded = ratio(&rank_one)?;
    let found = matrix_sup(&ratio, n, std::slice::from_ref(&rank_one), budget)?;
    let (witness, value) = if found.value > seeded {
        (found.point, found.value)
    } else {
        (rank_one, seeded)
    };
    let estimate = NormEstimate {
        value,
        witness: Witness::Matrix(witness),
        status: Status::LowerBound,
        method: "search:commutator-hill-climb".into(),
        evaluations: found.evaluations + 1,
        multiplier_space: None,
    };

    let multiplier = multiplier_norm_op(space_j, space_i, d.generator(), budget)?;
    Ok(DerivationNormReport {
        estimate,
        gauge_generator: a_hat,
        op_norm_gauge,
        upper_bound: 2.0 * space_j.concavity_modulus() * multiplier.value,
        upper_bound_status: multiplier.status,
        multiplier,
    })
}

/// Generator reconstructed from a black-box derivation.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    /// Gauge-fixed generator `a_hat`.
    pub generator: Matrix,
    /// `max ||delta(x) - [a_hat, x]||_F` over the residual probes.
    pub residual: f64,
    pub probes: usize,
}

pub fn recover_generator(delta: impl Fn(&Matrix) -> Matrix, n: usize) -> Result<Recovery> {
    recover_generator_with(delta, n, &Gauge::First)
}

fn apply_checked(delta: &impl Fn(&Matrix) -> Matrix, x: &Matrix) -> Result<Matrix> {
    let y = delta(x);
    if y.dim() != x.dim() {
        return Err(Error::invalid(format!(
            "black-box map returned a {0}x{0} matrix for a {1}x{1} input",
            y.dim(),
            x.dim()
        )));
    }
    Ok(y)
}

/// Column `k` of `a_hat` is `delta(e_k phi0^*) phi0`.
pub fn recover_generator_with(
    delta: impl Fn(&Matrix) -> Matrix,
    n: usize,
    gauge: &Gauge,
) -> Result<Recovery> {
    if n == 0 {
        return Err(Error::invalid("dimension must be at least 1"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..LINEARITY_PROBES {
        let x = sample_matrix(&mut rng, n, Ensemble::Gaussian);
        let y = sample_matrix(&mut rng, n, Ensemble::Gaussian);
        let alpha = complex_gaussian(&mut rng);
        let beta = complex_gaussian(&mut rng);
        let combo = &x.scale(alpha) + &y.scale(beta);
        let lhs = apply_checked(&delta, &combo)?;
        let dx = apply_checked(&delta, &x)?;
        let dy = apply_checked(&delta, &y)?;
        let rhs = &dx.scale(alpha) + &dy.scale(beta);
        let residual = (&lhs - &rhs).frobenius_norm();
        let scale = 1.0
            + lhs.frobenius_norm()
            + alpha.norm() * dx.frobenius_norm()
            + beta.norm() * dy.frobenius_norm();
        if residual.is_nan() || residual > LINEARITY_TOL * scale {
            return Err(Error::NotLinear {
                residual: residual / scale,
                tolerance: LINEARITY_TOL,
            });
        }
    }

    let phi0 = gauge.phi0(n)?;
    let mut a_hat = nalgebra::DMatrix::<C64>::zeros(n, n);
    for k in 0..n {
        let mut e_k = DVector::zeros(n);
        e_k[k] = C64::new(1.0, 0.0);
        let z = Matrix::outer(&e_k, &phi0)?;
        let col = apply_checked(&delta, &z)?.as_dmatrix() * &phi0;
        a_hat.set_column(k, &col);
    }
    let generator = Matrix::from_dmatrix(a_hat)?;

    let mut residual: f64 = 0.0;
    for _ in 0..RESIDUAL_PROBES {
        let x = sample_matrix(&mut rng, n, Ensemble::Gaussian);
        let diff = &apply_checked(&delta, &x)? - &commutator(&generator, &x)?;
        residual = residual.max(diff.frobenius_norm());
    }
    Ok(Recovery {
        generator,
        residual,
        probes: RESIDUAL_PROBES,
    })
}

/// A random unit vector, for exercising non-default gauges.
pub fn random_gauge<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Gauge {
    let v = DVector::from_fn(n, |_, _| complex_gaussian(rng));
    Gauge::vector(v).expect("gaussian vector is nonzero")
}

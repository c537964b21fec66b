//! Dense complex matrices as truncations of compact operators.
//!
//! Singular values come from nalgebra's Golub-Kahan SVD, with one-sided
//! Jacobi as a fallback. Both are backward stable: the computed values are
//! exact for a perturbation of relative size `O(n eps)`. Values below that
//! noise floor are reported as zero.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use nalgebra::{Complex, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::sequences::Sequence;
use crate::spaces::SpaceSpec;

pub type C64 = Complex<f64>;

/// Singular values at or below `n * eps * s_1 * NOISE_FLOOR_FACTOR` are
/// indistinguishable from zero after a backward-stable decomposition.
const NOISE_FLOOR_FACTOR: f64 = 8.0;

/// Square complex matrix, `n >= 1`, all entries finite.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix(DMatrix<C64>);

impl Matrix {
    pub fn from_dmatrix(m: DMatrix<C64>) -> Result<Self> {
        if m.nrows() == 0 || m.nrows() != m.ncols() {
            return Err(Error::invalid(format!(
                "matrix must be square with n >= 1, got {}x{}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(Error::invalid("matrix has non-finite entries"));
        }
        Ok(Matrix(m))
    }

    pub fn from_fn(n: usize, f: impl FnMut(usize, usize) -> C64) -> Result<Self> {
        Matrix::from_dmatrix(DMatrix::from_fn(n, n, f))
    }

    /// Real matrix from row vectors.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::invalid("rows must all have length n"));
        }
        Matrix::from_fn(n, |i, j| C64::new(rows[i][j], 0.0))
    }

    pub fn identity(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Matrix(DMatrix::identity(n, n))
    }

    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        Matrix(DMatrix::zeros(n, n))
    }

    /// Matrix unit `E_{jk}`: maps `e_k` to `e_j`, zero-based.
    pub fn unit(n: usize, j: usize, k: usize) -> Self {
        let mut m = Matrix::zeros(n);
        m.0[(j, k)] = C64::new(1.0, 0.0);
        m
    }

    /// Rank-one operator `u v^*`.
    pub fn outer(u: &DVector<C64>, v: &DVector<C64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::invalid("outer product of vectors of unequal length"));
        }
        Matrix::from_dmatrix(u * v.adjoint())
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.0
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.0[(i, j)]
    }

    pub fn adjoint(&self) -> Matrix {
        Matrix(self.0.adjoint())
    }

    pub fn scale(&self, z: C64) -> Matrix {
        Matrix(&self.0 * z)
    }

    pub fn scale_real(&self, t: f64) -> Matrix {
        Matrix(&self.0 * C64::new(t, 0.0))
    }

    /// `self + lambda * 1`.
    pub fn shifted(&self, lambda: C64) -> Matrix {
        let mut m = self.0.clone();
        for i in 0..m.nrows() {
            m[(i, i)] += lambda;
        }
        Matrix(m)
    }

    fn check_dims(&self, other: &Matrix, what: &str) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::invalid(format!(
                "{what}: dimension mismatch {} vs {}",
                self.dim(),
                other.dim()
            )));
        }
        Ok(())
    }

    pub fn try_mul(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dims(other, "product")?;
        Ok(Matrix(&self.0 * &other.0))
    }

    pub fn try_add(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dims(other, "sum")?;
        Ok(Matrix(&self.0 + &other.0))
    }

    pub fn try_sub(&self, other: &Matrix) -> Result<Matrix> {
        self.check_dims(other, "difference")?;
        Ok(Matrix(&self.0 - &other.0))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, z| m.max(z.norm()))
    }

    pub fn is_diagonal(&self) -> bool {
        let n = self.dim();
        (0..n).all(|i| (0..n).all(|j| i == j || self.0[(i, j)] == C64::new(0.0, 0.0)))
    }

    pub fn diagonal_entries(&self) -> Vec<C64> {
        (0..self.dim()).map(|i| self.0[(i, i)]).collect()
    }

    /// Operator norm `s_1(x)`.
    pub fn op_norm(&self) -> Result<f64> {
        Ok(singular_values(self)?.op_norm())
    }

    /// `|x| = (x^* x)^{1/2}`, assembled as `v diag(s) v^*`.
    pub fn modulus(&self) -> Result<Matrix> {
        let svd = svd(self)?;
        let s = DMatrix::from_diagonal(&DVector::from_iterator(
            svd.s.len(),
            svd.s.iter().map(|&v| C64::new(v, 0.0)),
        ));
        Ok(Matrix(&svd.v * s * svd.v.adjoint()))
    }

    pub fn conjugate_by(&self, u: &Matrix) -> Result<Matrix> {
        u.try_mul(self)?.try_mul(&u.adjoint())
    }

    /// Whitespace-separated text: `n`, then `n` rows of `2n` reals given as
    /// `re im` pairs.
    pub fn to_text(&self) -> String {
        let n = self.dim();
        let mut out = format!("{n}\n");
        for i in 0..n {
            let row: Vec<String> = (0..n)
                .map(|j| {
                    let z = self.0[(i, j)];
                    format!("{} {}", z.re, z.im)
                })
                .collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn parse_text(text: &str) -> Result<Matrix> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first token must be the dimension n".into()))?;
        if n == 0 {
            return Err(Error::Parse("dimension must be at least 1".into()));
        }
        let values: Vec<f64> = tokens
            .map(|t| {
                t.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("not a real number: {t:?}")))
            })
            .collect::<Result<_>>()?;
        if values.len() != 2 * n * n {
            return Err(Error::Parse(format!(
                "expected {} reals for n={n}, found {}",
                2 * n * n,
                values.len()
            )));
        }
        Matrix::from_fn(n, |i, j| {
            let at = 2 * (i * n + j);
            C64::new(values[at], values[at + 1])
        })
        .map_err(|e| Error::Parse(e.to_string()))
    }
}

impl<'a> Mul<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    /// Panics on dimension mismatch; see [`Matrix::try_mul`].
    fn mul(self, rhs: &'a Matrix) -> Matrix {
        self.try_mul(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Add<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn add(self, rhs: &'a Matrix) -> Matrix {
        self.try_add(rhs).expect("matrix dimensions must agree")
    }
}

impl<'a> Sub<&'a Matrix> for &'a Matrix {
    type Output = Matrix;

    fn sub(self, rhs: &'a Matrix) -> Matrix {
        self.try_sub(rhs).expect("matrix dimensions must agree")
    }
}

/// Non-increasing singular values of a matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct SingularValues(Sequence);

impl SingularValues {
    pub fn as_sequence(&self) -> &Sequence {
        &self.0
    }

    pub fn into_sequence(self) -> Sequence {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        self.0.as_slice()
    }

    pub fn op_norm(&self) -> f64 {
        self.0.get(0)
    }
}

/// `x = u diag(s) v^*` with `s` non-increasing.
#[derive(Clone, Debug)]
pub struct Svd {
    pub u: DMatrix<C64>,
    pub s: Vec<f64>,
    pub v: DMatrix<C64>,
}

fn numeric_failure(routine: &'static str, x: &Matrix) -> Error {
    Error::NumericFailure {
        routine,
        dim: x.dim(),
        frobenius: x.frobenius_norm(),
        max_abs: x.max_abs(),
        finite: x.0.iter().all(|z| z.re.is_finite() && z.im.is_finite()),
    }
}

/// Unsorted `(u, s, v)` with `x = u diag(s) v^*`.
type RawSvd = (DMatrix<C64>, Vec<f64>, DMatrix<C64>);

fn frobenius_consistent(x: &Matrix, s: &[f64]) -> bool {
    let fro2 = x.0.norm_squared();
    let sum2: f64 = s.iter().map(|v| v * v).sum();
    (sum2 - fro2).abs() <= 1e-10 * fro2
}

fn golub_kahan(x: &Matrix) -> Option<RawSvd> {
    let raw = nalgebra::SVD::try_new(x.0.clone(), true, true, 5.0 * f64::EPSILON, 0)?;
    let s: Vec<f64> = raw.singular_values.iter().copied().collect();
    if !frobenius_consistent(x, &s) {
        return None;
    }
    Some((raw.u?, s, raw.v_t?.adjoint()))
}

/// One-sided (Hestenes) Jacobi: rotate column pairs of `x v` until they are
/// mutually orthogonal; the column norms are then the singular values.
fn jacobi(x: &Matrix) -> Option<RawSvd> {
    let n = x.dim();
    let mut a = x.0.clone();
    let mut v = DMatrix::<C64>::identity(n, n);
    for _sweep in 0..60 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for m in [&mut a, &mut v] {
                    for i in 0..n {
                        let xp = m[(i, p)];
                        let xq = m[(i, q)] * phase.conj();
                        m[(i, p)] = xp * c - xq * s;
                        m[(i, q)] = xp * s + xq * c;
                    }
                }
            }
        }
        if !rotated {
            let s: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
            let top = s.iter().cloned().fold(0.0, f64::max);
            let mut u = DMatrix::<C64>::zeros(n, n);
            let mut filled = vec![false; n];
            for k in 0..n {
                if s[k] > top * f64::EPSILON * n as f64 {
                    u.set_column(k, &(a.column(k) / C64::new(s[k], 0.0)));
                    filled[k] = true;
                }
            }
            complete_orthonormal(&mut u, &mut filled);
            if !frobenius_consistent(x, &s) {
                return None;
            }
            return Some((u, s, v));
        }
    }
    None
}

/// Fill the unset columns of `u` with an orthonormal completion drawn from
/// the standard basis (modified Gram-Schmidt, applied twice).
fn complete_orthonormal(u: &mut DMatrix<C64>, filled: &mut [bool]) {
    let n = u.nrows();
    let mut candidate = 0;
    for k in 0..n {
        if filled[k] {
            continue;
        }
        while candidate < n {
            let mut w = DVector::<C64>::zeros(n);
            w[candidate] = C64::new(1.0, 0.0);
            candidate += 1;
            for _ in 0..2 {
                for j in (0..n).filter(|&j| filled[j]) {
                    let col = u.column(j).into_owned();
                    let proj = col.dotc(&w);
                    w -= col * proj;
                }
            }
            let norm = w.norm();
            if norm > 1e-8 {
                u.set_column(k, &(w / C64::new(norm, 0.0)));
                filled[k] = true;
                break;
            }
        }
    }
}

pub fn svd(x: &Matrix) -> Result<Svd> {
    let n = x.dim();
    // nalgebra first; a Jacobi sweep when its values fail the Frobenius
    // identity, which happens on some nearly rank-deficient input
    let (u, values, v) = golub_kahan(x)
        .or_else(|| jacobi(x))
        .ok_or_else(|| numeric_failure("svd", x))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        values[b]
            .partial_cmp(&values[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let top = values[order[0]];
    if !top.is_finite() {
        return Err(numeric_failure("svd", x));
    }
    let floor = top * n as f64 * f64::EPSILON * NOISE_FLOOR_FACTOR;
    let s = order
        .iter()
        .map(|&k| if values[k] <= floor { 0.0 } else { values[k] })
        .collect();
    let u = DMatrix::from_fn(n, n, |i, j| u[(i, order[j])]);
    let v = DMatrix::from_fn(n, n, |i, j| v[(i, order[j])]);
    Ok(Svd { u, s, v })
}

pub fn singular_values(x: &Matrix) -> Result<SingularValues> {
    let s = svd(x)?.s;
    Ok(SingularValues(Sequence::from_finite(s)))
}

/// `||x||_{C_E}`: the sequence norm of the singular values.
pub fn ideal_norm(space: &SpaceSpec, x: &Matrix) -> Result<f64> {
    space.norm(singular_values(x)?.as_sequence())
}

/// `[a, x] = a x - x a`.
pub fn commutator(a: &Matrix, x: &Matrix) -> Result<Matrix> {
    a.check_dims(x, "commutator")?;
    Ok(Matrix(&a.0 * &x.0 - &x.0 * &a.0))
}

/// Diagonal operator with `xi` on the diagonal.
pub fn diagonal(xi: &Sequence) -> Result<Matrix> {
    if xi.is_empty() {
        return Err(Error::invalid("diagonal of an empty sequence"));
    }
    Ok(Matrix(DMatrix::from_diagonal(&DVector::from_iterator(
        xi.len(),
        xi.as_slice().iter().map(|&v| C64::new(v, 0.0)),
    ))))
}

pub fn diagonal_complex(entries: &[C64]) -> Result<Matrix> {
    if entries.is_empty() {
        return Err(Error::invalid("diagonal of an empty sequence"));
    }
    Matrix::from_dmatrix(DMatrix::from_diagonal(&DVector::from_column_slice(entries)))
}

/// Random matrix ensembles used by the test harness and the CLI.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ensemble {
    /// i.i.d. standard complex Gaussian entries.
    Gaussian,
    /// Haar-distributed unitary.
    Unitary,
    /// Diagonal with i.i.d. standard complex Gaussian entries.
    Diagonal,
}

impl Ensemble {
    pub const ALL: [Ensemble; 3] = [Ensemble::Gaussian, Ensemble::Unitary, Ensemble::Diagonal];
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Ensemble::Gaussian => "gaussian",
            Ensemble::Unitary => "unitary",
            Ensemble::Diagonal => "diagonal",
        })
    }
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "gaussian" => Ok(Ensemble::Gaussian),
            "unitary" => Ok(Ensemble::Unitary),
            "diagonal" => Ok(Ensemble::Diagonal),
            other => Err(Error::Parse(format!("unknown ensemble {other:?}"))),
        }
    }
}

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// Haar unitary: QR of a complex Gaussian matrix with the phases of `r`'s
/// diagonal pushed into `q`.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Matrix {
    let g = DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng));
    let qr = g.qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..n {
            q[(i, j)] *= phase;
        }
    }
    Matrix(q)
}

pub fn sample_matrix<R: Rng + ?Sized>(rng: &mut R, n: usize, ensemble: Ensemble) -> Matrix {
    assert!(n >= 1, "dimension must be at least 1");
    match ensemble {
        Ensemble::Gaussian => Matrix(DMatrix::from_fn(n, n, |_, _| complex_gaussian(rng))),
        Ensemble::Unitary => random_unitary(rng, n),
        Ensemble::Diagonal => {
            let d: Vec<C64> = (0..n).map(|_| complex_gaussian(rng)).collect();
            Matrix(DMatrix::from_diagonal(&DVector::from_vec(d)))
        }
    }
}

/// Deterministic draw from `ensemble`, parameterized by `(seed, n)`.
pub fn random_matrix(seed: u64, n: usize, ensemble: Ensemble) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_matrix(&mut rng, n, ensemble)
}

//! Symmetric sequence spaces in `c0` and their quasi-norms.
//!
//! Every space here is symmetric (the norm depends on `xi*` only), solid, and
//! normalized so that `||e_1|| = 1` unless built through one of the
//! `*_unnormalized` constructors.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sequences::{decreasing_rearrangement, Sequence};

/// Named weight families accepted in the canonical textual form.
#[derive(Clone, Debug, PartialEq)]
pub enum WeightFamily {
    /// `w_n = 1/n`
    Harmonic,
    /// `w_n = n^-alpha`, `0 < alpha < 1`
    Power(f64),
    /// `w_n = 1`
    Ones,
    /// User-supplied list; has no textual form.
    Custom,
}

/// Positive non-increasing weights `w_n` with partial sums `W(j)`.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    family: WeightFamily,
    weights: Vec<f64>,
    partial_sums: Vec<f64>,
}

impl WeightSequence {
    pub fn harmonic(n: usize) -> Result<Self> {
        Self::build(
            WeightFamily::Harmonic,
            (1..=n).map(|k| 1.0 / k as f64).collect(),
        )
    }

    pub fn power(alpha: f64, n: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::invalid(format!(
                "power weights need 0 < alpha < 1, got {alpha}"
            )));
        }
        Self::build(
            WeightFamily::Power(alpha),
            (1..=n).map(|k| (k as f64).powf(-alpha)).collect(),
        )
    }

    pub fn ones(n: usize) -> Result<Self> {
        Self::build(WeightFamily::Ones, vec![1.0; n])
    }

    pub fn custom(weights: Vec<f64>) -> Result<Self> {
        Self::build(WeightFamily::Custom, weights)
    }

    pub fn from_family(family: &WeightFamily, n: usize) -> Result<Self> {
        match family {
            WeightFamily::Harmonic => Self::harmonic(n),
            WeightFamily::Power(alpha) => Self::power(*alpha, n),
            WeightFamily::Ones => Self::ones(n),
            WeightFamily::Custom => Err(Error::invalid(
                "custom weights cannot be regenerated from the family tag",
            )),
        }
    }

    fn build(family: WeightFamily, weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight sequence must be non-empty"));
        }
        if let Some(i) = weights.iter().position(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(Error::invalid(format!(
                "weight {i} must be finite and strictly positive, got {}",
                weights[i]
            )));
        }
        if let Some(i) = weights.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::invalid(format!(
                "weights must be non-increasing (w[{}] < w[{}])",
                i,
                i + 1
            )));
        }
        let partial_sums = weights
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        Ok(WeightSequence {
            family,
            weights,
            partial_sums,
        })
    }

    pub fn family(&self) -> &WeightFamily {
        &self.family
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `W(1), W(2), ...`
    pub fn partial_sums(&self) -> &[f64] {
        &self.partial_sums
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum SpaceKind {
    Schatten { p: f64 },
    Lorentz { weights: WeightSequence, p: f64 },
    Marcinkiewicz { weights: WeightSequence, p: f64 },
    Uniform,
}

/// A validated symmetric sequence space.
#[derive(Clone, Debug, PartialEq)]
pub struct SpaceSpec {
    kind: SpaceKind,
    normalized: bool,
}

/// Analytic description of a multiplier space `F:G`.
#[derive(Clone, Debug, PartialEq)]
pub enum MultiplierSpace {
    /// `G` embeds into `F`, so every bounded sequence multiplies `G` into `F`.
    WholeSpace,
    Space(SpaceSpec),
}

impl SpaceSpec {
    pub fn schatten(p: f64) -> Result<Self> {
        if !(p.is_finite() && p > 0.0) {
            return Err(Error::invalid(format!(
                "Schatten exponent must be finite and > 0, got {p}"
            )));
        }
        Ok(SpaceSpec {
            kind: SpaceKind::Schatten { p },
            normalized: true,
        })
    }

    pub fn uniform() -> Self {
        SpaceSpec {
            kind: SpaceKind::Uniform,
            normalized: true,
        }
    }

    /// Lorentz space `l_w^p`; requires `w_1 = 1`.
    pub fn lorentz(weights: WeightSequence, p: f64) -> Result<Self> {
        Self::weighted(weights, p, true, |weights, p| SpaceKind::Lorentz {
            weights,
            p,
        })
    }

    pub fn lorentz_unnormalized(weights: WeightSequence, p: f64) -> Result<Self> {
        Self::weighted(weights, p, false, |weights, p| SpaceKind::Lorentz {
            weights,
            p,
        })
    }

    /// Marcinkiewicz space `m_W^p`; requires `w_1 = 1`.
    pub fn marcinkiewicz(weights: WeightSequence, p: f64) -> Result<Self> {
        Self::weighted(weights, p, true, |weights, p| SpaceKind::Marcinkiewicz {
            weights,
            p,
        })
    }

    pub fn marcinkiewicz_unnormalized(weights: WeightSequence, p: f64) -> Result<Self> {
        Self::weighted(weights, p, false, |weights, p| SpaceKind::Marcinkiewicz {
            weights,
            p,
        })
    }

    fn weighted(
        weights: WeightSequence,
        p: f64,
        normalized: bool,
        make: impl FnOnce(WeightSequence, f64) -> SpaceKind,
    ) -> Result<Self> {
        if !(p.is_finite() && p >= 1.0) {
            return Err(Error::invalid(format!(
                "Lorentz/Marcinkiewicz exponent must satisfy 1 <= p < inf, got {p}"
            )));
        }
        if normalized && weights.weights[0] != 1.0 {
            return Err(Error::invalid(format!(
                "normalized weighted space needs w_1 = 1, got {}",
                weights.weights[0]
            )));
        }
        Ok(SpaceSpec {
            kind: make(weights, p),
            normalized,
        })
    }

    pub fn kind(&self) -> &SpaceKind {
        &self.kind
    }

    /// `||e_1|| = 1` holds exactly.
    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    /// Longest sequence the space can measure, `None` when unbounded.
    pub fn max_len(&self) -> Option<usize> {
        match &self.kind {
            SpaceKind::Lorentz { weights, .. } | SpaceKind::Marcinkiewicz { weights, .. } => {
                Some(weights.len())
            }
            _ => None,
        }
    }

    /// The quasi-norm of `xi`.
    pub fn norm(&self, xi: &Sequence) -> Result<f64> {
        if let Some(max) = self.max_len() {
            if xi.len() > max {
                return Err(Error::invalid(format!(
                    "sequence of length {} exceeds the {} weights of {}",
                    xi.len(),
                    max,
                    self
                )));
            }
        }
        Ok(self.norm_of_decreasing(decreasing_rearrangement(xi).as_slice()))
    }

    /// Norm of an already non-increasing, non-negative slice whose length
    /// fits the weights. Skips validation; used on hot paths.
    pub(crate) fn norm_of_decreasing(&self, xs: &[f64]) -> f64 {
        let top = xs.first().copied().unwrap_or(0.0);
        if top == 0.0 {
            return 0.0;
        }
        match &self.kind {
            SpaceKind::Uniform => top,
            SpaceKind::Schatten { p } => {
                let s: f64 = xs.iter().map(|&v| (v / top).powf(*p)).sum();
                top * s.powf(1.0 / p)
            }
            SpaceKind::Lorentz { weights, p } => {
                let s: f64 = xs
                    .iter()
                    .zip(&weights.weights)
                    .map(|(&v, w)| (v / top).powf(*p) * w)
                    .sum();
                top * s.powf(1.0 / p)
            }
            SpaceKind::Marcinkiewicz { weights, p } => {
                let mut acc = 0.0;
                let mut best: f64 = 0.0;
                for (&v, big_w) in xs.iter().zip(&weights.partial_sums) {
                    acc += (v / top).powf(*p);
                    best = best.max(acc / big_w);
                }
                top * best.powf(1.0 / p)
            }
        }
    }

    /// Modulus of concavity `C`: `2^(1/p - 1)` for Schatten `p < 1`, else 1.
    pub fn concavity_modulus(&self) -> f64 {
        match self.kind {
            SpaceKind::Schatten { p } if p < 1.0 => 2f64.powf(1.0 / p - 1.0),
            _ => 1.0,
        }
    }

    /// Bound on `||sigma_m||` from iterating the quasi-triangle inequality
    /// over the `m` interleaved copies: `C + C^2 + ... + C^(m-1) + C^(m-1)`.
    pub fn dilation_norm_bound(&self, m: usize) -> f64 {
        let c = self.concavity_modulus();
        if m <= 1 {
            return 1.0;
        }
        (1..m).map(|k| c.powi(k as i32)).sum::<f64>() + c.powi(m as i32 - 1)
    }

    pub fn schatten_exponent(&self) -> Option<f64> {
        match self.kind {
            SpaceKind::Schatten { p } => Some(p),
            _ => None,
        }
    }
}

/// `||xi||_E`; free-function form of [`SpaceSpec::norm`].
pub fn seq_norm(space: &SpaceSpec, xi: &Sequence) -> Result<f64> {
    space.norm(xi)
}

pub fn concavity_modulus(space: &SpaceSpec) -> f64 {
    space.concavity_modulus()
}

/// `sum |xi_n|^p`, the p-additive functional of `l_p`.
pub fn schatten_power_sum(p: f64, xi: &Sequence) -> f64 {
    xi.as_slice().iter().map(|v| v.abs().powf(p)).sum()
}

/// Exponent `q` with `1/q = 1/r - 1/p`, for `0 < r < p`.
pub fn holder_exponent(r: f64, p: f64) -> Result<f64> {
    if !(r > 0.0 && p > r && r.is_finite() && p.is_finite()) {
        return Err(Error::invalid(format!(
            "Holder exponent needs 0 < r < p, got r={r}, p={p}"
        )));
    }
    Ok(r * p / (p - r))
}

/// Closed-form identification of the multiplier space `F:G`, when known.
pub fn analytic_multiplier_space(f: &SpaceSpec, g: &SpaceSpec) -> Option<MultiplierSpace> {
    use SpaceKind::*;
    match (&f.kind, &g.kind) {
        (Schatten { p: r }, Schatten { p }) => Some(if r < p {
            MultiplierSpace::Space(SpaceSpec::schatten(holder_exponent(*r, *p).ok()?).ok()?)
        } else {
            MultiplierSpace::WholeSpace
        }),
        (Schatten { p: pf }, Lorentz { weights, p }) if pf == p => {
            Some(MultiplierSpace::Space(SpaceSpec {
                kind: Marcinkiewicz {
                    weights: weights.clone(),
                    p: *p,
                },
                normalized: g.normalized,
            }))
        }
        _ if f == g => Some(MultiplierSpace::WholeSpace),
        (Uniform, _) if g.normalized => Some(MultiplierSpace::WholeSpace),
        _ => None,
    }
}

fn fmt_weights(f: &mut fmt::Formatter<'_>, kind: &str, w: &WeightSequence, p: f64) -> fmt::Result {
    write!(f, "{kind}:p={p}:w=")?;
    match w.family {
        WeightFamily::Harmonic => write!(f, "harmonic")?,
        WeightFamily::Power(alpha) => write!(f, "power:{alpha}")?,
        WeightFamily::Ones => write!(f, "ones")?,
        WeightFamily::Custom => write!(f, "custom")?,
    }
    write!(f, ":n={}", w.len())
}

/// Canonical textual form, e.g. `schatten:p=0.5` or
/// `lorentz:p=1:w=harmonic:n=64`.
impl fmt::Display for SpaceSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            SpaceKind::Schatten { p } => write!(f, "schatten:p={p}")?,
            SpaceKind::Uniform => write!(f, "uniform")?,
            SpaceKind::Lorentz { weights, p } => fmt_weights(f, "lorentz", weights, *p)?,
            SpaceKind::Marcinkiewicz { weights, p } => {
                fmt_weights(f, "marcinkiewicz", weights, *p)?
            }
        }
        if !self.normalized {
            write!(f, ":unnormalized")?;
        }
        Ok(())
    }
}

fn parse_real(s: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("not a number: {s:?}"));
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            a / b
        }
        None => s.trim().parse().map_err(|_| bad())?,
    };
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

impl FromStr for SpaceSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut tokens = s.trim().split(':').map(str::trim);
        let kind = tokens.next().unwrap_or("").to_ascii_lowercase();
        let mut p = None;
        let mut family = None;
        let mut n = None;
        let mut normalized = true;
        while let Some(tok) = tokens.next() {
            match tok.split_once('=') {
                Some(("p", v)) => p = Some(parse_real(v)?),
                Some(("n", v)) => {
                    n = Some(
                        v.parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad weight length {v:?}")))?,
                    )
                }
                Some(("w", "harmonic")) => family = Some(WeightFamily::Harmonic),
                Some(("w", "ones")) => family = Some(WeightFamily::Ones),
                Some(("w", "power")) => {
                    let alpha = tokens
                        .next()
                        .ok_or_else(|| Error::Parse("w=power needs an exponent".into()))?;
                    family = Some(WeightFamily::Power(parse_real(alpha)?));
                }
                Some(("w", other)) => {
                    return Err(Error::Parse(format!("unknown weight family {other:?}")))
                }
                None if tok == "unnormalized" => normalized = false,
                _ => return Err(Error::Parse(format!("unexpected token {tok:?} in {s:?}"))),
            }
        }
        let need_p = || p.ok_or_else(|| Error::Parse(format!("{s:?} is missing p=")));
        let weights = || -> Result<WeightSequence> {
            let family = family
                .clone()
                .ok_or_else(|| Error::Parse(format!("{s:?} is missing w=")))?;
            let n = n.ok_or_else(|| Error::Parse(format!("{s:?} is missing n=")))?;
            WeightSequence::from_family(&family, n)
        };
        match kind.as_str() {
            "uniform" => Ok(SpaceSpec::uniform()),
            "schatten" => SpaceSpec::schatten(need_p()?),
            "lorentz" if normalized => SpaceSpec::lorentz(weights()?, need_p()?),
            "lorentz" => SpaceSpec::lorentz_unnormalized(weights()?, need_p()?),
            "marcinkiewicz" if normalized => SpaceSpec::marcinkiewicz(weights()?, need_p()?),
            "marcinkiewicz" => SpaceSpec::marcinkiewicz_unnormalized(weights()?, need_p()?),
            other => Err(Error::Parse(format!("unknown space kind {other:?}"))),
        }
    }
}

//! Finite sequences standing for finitely supported elements of `c0`.
//!
//! All binary operations zero-pad the shorter operand to the longer length,
//! which is the embedding of finitely supported sequences into `c0`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::SLACK_TOL;

/// A finite list of real scalars. Entries are always finite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Sequence {
    entries: Vec<f64>,
}

impl Sequence {
    pub fn new(entries: Vec<f64>) -> Result<Self> {
        if let Some(bad) = entries.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(format!(
                "sequence entry {bad} is not finite ({})",
                entries[bad]
            )));
        }
        Ok(Sequence { entries })
    }

    /// Reduces complex entries to their absolute values.
    pub fn from_complex(entries: &[nalgebra::Complex<f64>]) -> Result<Self> {
        Sequence::new(entries.iter().map(|z| z.norm()).collect())
    }

    /// Caller guarantees every entry is finite.
    pub(crate) fn from_finite(entries: Vec<f64>) -> Self {
        debug_assert!(entries.iter().all(|v| v.is_finite()));
        Sequence { entries }
    }

    pub fn zeros(len: usize) -> Self {
        Sequence {
            entries: vec![0.0; len],
        }
    }

    /// The unit vector `e_{k+1}` of length `len` (zero-based `k`).
    pub fn unit(len: usize, k: usize) -> Self {
        let mut entries = vec![0.0; len.max(k + 1)];
        entries[k] = 1.0;
        Sequence { entries }
    }

    /// Indicator of the first `k` indices, padded to `len`.
    pub fn prefix_indicator(len: usize, k: usize) -> Self {
        let mut entries = vec![0.0; len.max(k)];
        entries[..k].iter_mut().for_each(|v| *v = 1.0);
        Sequence { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.entries
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.entries
    }

    pub fn get(&self, i: usize) -> f64 {
        self.entries.get(i).copied().unwrap_or(0.0)
    }

    /// `entries[i] >= entries[i+1] >= 0` for all `i`.
    pub fn is_decreasing(&self) -> bool {
        self.entries.iter().all(|&v| v >= 0.0) && self.entries.windows(2).all(|w| w[0] >= w[1])
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&v| v == 0.0)
    }

    /// `sup |xi_n|`.
    pub fn sup_norm(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn abs(&self) -> Sequence {
        Sequence::from_finite(self.entries.iter().map(|v| v.abs()).collect())
    }

    pub fn scale(&self, alpha: f64) -> Sequence {
        Sequence::from_finite(self.entries.iter().map(|v| v * alpha).collect())
    }

    /// Zero-pads (never truncates) to `len`.
    pub fn padded(&self, len: usize) -> Sequence {
        let mut entries = self.entries.clone();
        if entries.len() < len {
            entries.resize(len, 0.0);
        }
        Sequence { entries }
    }

    /// Keeps the first `len` entries, zero-padding if shorter.
    pub fn truncated(&self, len: usize) -> Sequence {
        let mut entries = self.entries.clone();
        entries.resize(len, 0.0);
        Sequence { entries }
    }

    pub fn add(&self, other: &Sequence) -> Sequence {
        zip_padded(self, other, |a, b| a + b)
    }

    /// Entrywise `self <= other + tol` on the zero-padded common range.
    pub fn dominated_by(&self, other: &Sequence, tol: f64) -> bool {
        min_slack(self, other) >= -tol
    }

    pub fn permuted(&self, perm: &[usize]) -> Result<Sequence> {
        if perm.len() != self.len() {
            return Err(Error::invalid("permutation length differs from sequence"));
        }
        let mut seen = vec![false; perm.len()];
        for &p in perm {
            if p >= perm.len() || std::mem::replace(&mut seen[p], true) {
                return Err(Error::invalid("not a permutation"));
            }
        }
        Ok(Sequence::from_finite(
            perm.iter().map(|&p| self.entries[p]).collect(),
        ))
    }
}

impl TryFrom<Vec<f64>> for Sequence {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Sequence::new(v)
    }
}

impl AsRef<[f64]> for Sequence {
    fn as_ref(&self) -> &[f64] {
        &self.entries
    }
}

fn zip_padded(a: &Sequence, b: &Sequence, f: impl Fn(f64, f64) -> f64) -> Sequence {
    let len = a.len().max(b.len());
    Sequence::from_finite((0..len).map(|i| f(a.get(i), b.get(i))).collect())
}

/// `min_i (rhs_i - lhs_i)` over the zero-padded common range; `0` for two
/// empty sequences.
pub fn min_slack(lhs: &Sequence, rhs: &Sequence) -> f64 {
    let len = lhs.len().max(rhs.len());
    (0..len)
        .map(|i| rhs.get(i) - lhs.get(i))
        .fold(None, |m: Option<f64>, s| Some(m.map_or(s, |m| m.min(s))))
        .unwrap_or(0.0)
}

/// `|xi|` sorted non-increasingly.
pub fn decreasing_rearrangement(xi: &Sequence) -> Sequence {
    let mut entries: Vec<f64> = xi.entries.iter().map(|v| v.abs()).collect();
    entries.sort_unstable_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    Sequence::from_finite(entries)
}

/// `sigma_m`: repeats every entry `m` times.
pub fn dilate(xi: &Sequence, m: usize) -> Result<Sequence> {
    if m == 0 {
        return Err(Error::invalid("dilation factor must be at least 1"));
    }
    Ok(Sequence::from_finite(
        xi.entries
            .iter()
            .flat_map(|&v| std::iter::repeat_n(v, m))
            .collect(),
    ))
}

/// Entrywise product; the shorter operand is zero-padded.
pub fn hadamard(xi: &Sequence, eta: &Sequence) -> Sequence {
    zip_padded(xi, eta, |a, b| a * b)
}

/// Outcome of an entrywise inequality `lhs <= rhs`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub holds: bool,
    /// Minimum of `rhs - lhs` over the compared range.
    pub slack: f64,
}

impl InequalityCheck {
    pub fn from_slack(slack: f64) -> Self {
        InequalityCheck {
            holds: slack >= -SLACK_TOL,
            slack,
        }
    }

    /// Compares `lhs <= rhs` on the first `lhs.len()` entries of `rhs`.
    pub fn entrywise(lhs: &Sequence, rhs: &Sequence) -> Self {
        InequalityCheck::from_slack(min_slack(lhs, &rhs.truncated(lhs.len())))
    }
}

/// `(xi + eta)* <= sigma_2(xi* + eta*)` on the first `len` indices.
pub fn check_sum_rearrangement(xi: &Sequence, eta: &Sequence) -> InequalityCheck {
    let len = xi.len().max(eta.len());
    let lhs = decreasing_rearrangement(&xi.add(eta));
    let rhs = decreasing_rearrangement(xi).add(&decreasing_rearrangement(eta));
    let rhs = dilate(&rhs, 2).expect("m = 2");
    InequalityCheck::entrywise(&lhs.truncated(len), &rhs)
}

/// `(xi eta)* <= sigma_2(xi* eta*)` on the first `len` indices.
pub fn check_product_rearrangement(xi: &Sequence, eta: &Sequence) -> InequalityCheck {
    let len = xi.len().max(eta.len());
    let lhs = decreasing_rearrangement(&hadamard(xi, eta));
    let rhs = hadamard(
        &decreasing_rearrangement(xi),
        &decreasing_rearrangement(eta),
    );
    let rhs = dilate(&rhs, 2).expect("m = 2");
    InequalityCheck::entrywise(&lhs.truncated(len), &rhs)
}

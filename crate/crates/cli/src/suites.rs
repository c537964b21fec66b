//! The named check suites.
//!
//! Every suite expands into independent units (one per space or pair,
//! dimension, ensemble and sample), each with its own derived seed, so the
//! records do not depend on how the units are scheduled.

use idealcalc::derivations::{norm_estimate, recover_generator, DerivationSpec};
use idealcalc::multipliers::{
    estimate_multiplier_norm_op, estimate_multiplier_norm_seq, holder_oracle,
};
use idealcalc::operators::{diagonal, ideal_norm, sample_matrix, singular_values, C64};
use idealcalc::sequences::{decreasing_rearrangement, dilate, hadamard};
use idealcalc::spaces::schatten_power_sum;
use idealcalc::{
    Ensemble, Matrix, Result, Sequence, Side, SpaceKind, SpaceSpec, Status, Strategy, EQ_REL_TOL,
    SLACK_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{SuiteConfig, SuiteName};
use crate::report::Record;

/// Additive slack on the derivation and multiplier sandwiches.
pub const SANDWICH_TOL: f64 = 1e-8;
/// Allowed relative deviation of a search from a closed-form value.
pub const DUALITY_REL_TOL: f64 = 0.02;
/// Generator recovery and probe residual.
pub const RECOVERY_TOL: f64 = 1e-9;
/// Recovery from a shifted generator, generic (non-dyadic) entries.
pub const SHIFT_TOL: f64 = 1e-12;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn unit_seed(base: u64, tags: &[u64]) -> u64 {
    tags.iter()
        .fold(splitmix(base), |acc, &t| splitmix(acc ^ t))
}

/// One unit of work: where it sits in the sweep and how to label it.
#[derive(Clone)]
struct Unit {
    slot: usize,
    n: usize,
    ensemble: Ensemble,
    sample: usize,
    label: String,
    seed: u64,
}

impl Unit {
    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    fn params(&self, check: &str) -> String {
        format!("{} check={check}", self.label)
    }
}

fn width(count: usize) -> usize {
    count.saturating_sub(1).to_string().len().max(2)
}

/// Cartesian product of slots, dimensions, ensembles and samples.
fn units(s: &SuiteConfig, slots: &[String], ensembles: &[Ensemble]) -> Vec<Unit> {
    let nw = width(s.dims.iter().copied().max().unwrap_or(1) + 1);
    let sw = width(s.samples);
    let mut out = Vec::new();
    for (slot, slot_label) in slots.iter().enumerate() {
        for &n in &s.dims {
            for (ei, &ensemble) in ensembles.iter().enumerate() {
                for sample in 0..s.samples {
                    let mut label = String::new();
                    if !slot_label.is_empty() {
                        label.push_str(slot_label);
                        label.push(' ');
                    }
                    if ensembles.len() > 1 || s.name == SuiteName::SvInequalities {
                        label.push_str(&format!("ensemble={ensemble} "));
                    }
                    label.push_str(&format!("n={n:0nw$} sample={sample:0sw$}"));
                    let tags = [slot as u64, n as u64, ei as u64, sample as u64];
                    out.push(Unit {
                        slot,
                        n,
                        ensemble,
                        sample,
                        label,
                        seed: unit_seed(s.seed, &tags),
                    });
                }
            }
        }
    }
    out
}

fn space_labels(spaces: &[SpaceSpec], key: &str) -> Vec<String> {
    spaces.iter().map(|e| format!("{key}={e}")).collect()
}

fn pair_labels(pairs: &[(SpaceSpec, SpaceSpec)], a: &str, b: &str) -> Vec<String> {
    pairs
        .iter()
        .map(|(x, y)| format!("{a}={x} {b}={y}"))
        .collect()
}

fn random_seq<R: Rng>(rng: &mut R, n: usize) -> Sequence {
    Sequence::new((0..n).map(|_| rng.random_range(-1.0..1.0)).collect()).expect("finite")
}

/// The index where `rhs - lhs` is smallest, as a single record.
fn entrywise(suite: &str, params: String, lhs: &Sequence, rhs: &Sequence, tol: f64) -> Record {
    let (mut l, mut r) = (0.0, 0.0);
    let mut worst = f64::INFINITY;
    for i in 0..lhs.len() {
        let m = rhs.get(i) - lhs.get(i);
        if m < worst {
            worst = m;
            l = lhs.get(i);
            r = rhs.get(i);
        }
    }
    Record::le(suite, params, l, r, tol)
}

fn rel(scale: f64, tol: f64) -> f64 {
    tol * scale.abs().max(1.0)
}

pub fn run_suite(s: &SuiteConfig) -> Vec<Record> {
    let name = s.name.as_str();
    let (slots, ensembles): (Vec<String>, Vec<Ensemble>) = match s.name {
        SuiteName::Rearrangement | SuiteName::GeneratorRecovery => {
            (vec![String::new()], vec![Ensemble::Gaussian])
        }
        SuiteName::SvInequalities => (vec![String::new()], s.ensembles.clone()),
        SuiteName::QuasiNormAxioms | SuiteName::CalkinRoundtrip => {
            (space_labels(&s.spaces, "space"), vec![Ensemble::Gaussian])
        }
        SuiteName::LorentzMarcinkiewiczDuality => {
            (space_labels(&s.spaces, "space"), vec![Ensemble::Gaussian])
        }
        SuiteName::ZsidoBound => (space_labels(&s.spaces, "space"), s.ensembles.clone()),
        SuiteName::HolderDuality | SuiteName::MultiplierSandwich => {
            (pair_labels(&s.pairs, "F", "G"), vec![Ensemble::Diagonal])
        }
        SuiteName::DerivationSandwich => (pair_labels(&s.pairs, "I", "J"), s.ensembles.clone()),
    };
    units(s, &slots, &ensembles)
        .into_par_iter()
        .flat_map_iter(|u| {
            run_unit(s, &u).unwrap_or_else(|e| vec![Record::failure(name, u.params("all"), &e)])
        })
        .collect()
}

fn run_unit(s: &SuiteConfig, u: &Unit) -> Result<Vec<Record>> {
    let name = s.name.as_str();
    let mut rng = u.rng();
    let budget = s.budget.with_seed(u.seed);
    let n = u.n;
    let mut out = Vec::new();
    match s.name {
        SuiteName::Rearrangement => {
            let xi = random_seq(&mut rng, n);
            let eta = random_seq(&mut rng, n);
            let sum = xi.add(&eta);
            let lhs = decreasing_rearrangement(&sum);
            let rhs = dilate(
                &decreasing_rearrangement(&xi).add(&decreasing_rearrangement(&eta)),
                2,
            )?;
            out.push(entrywise(name, u.params("sum"), &lhs, &rhs, SLACK_TOL));
            let prod = hadamard(&xi, &eta);
            let lhs = decreasing_rearrangement(&prod);
            let rhs = dilate(
                &hadamard(
                    &decreasing_rearrangement(&xi),
                    &decreasing_rearrangement(&eta),
                ),
                2,
            )?;
            out.push(entrywise(name, u.params("product"), &lhs, &rhs, SLACK_TOL));
            let once = decreasing_rearrangement(&xi);
            let twice = decreasing_rearrangement(&once);
            let diff = once
                .as_slice()
                .iter()
                .zip(twice.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            out.push(Record::le(name, u.params("idempotent"), diff, 0.0, 0.0));
            let alpha: f64 = rng.random_range(-3.0..3.0);
            let lhs = decreasing_rearrangement(&xi.scale(alpha));
            let rhs = once.scale(alpha.abs());
            let diff = lhs
                .as_slice()
                .iter()
                .zip(rhs.as_slice())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            out.push(Record::le(name, u.params("homogeneous"), diff, 0.0, 0.0));
        }

        SuiteName::QuasiNormAxioms => {
            let e = &s.spaces[u.slot];
            let x = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let y = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let a = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let b = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let nx = ideal_norm(e, &x)?;
            let axb = ideal_norm(e, &(&(&a * &x) * &b))?;
            let bound = a.op_norm()? * nx * b.op_norm()?;
            out.push(Record::le(
                name,
                u.params("ideal"),
                axb,
                bound,
                rel(bound, SLACK_TOL),
            ));
            let adj = ideal_norm(e, &x.adjoint())?;
            out.push(Record::close(
                name,
                u.params("adjoint"),
                nx,
                adj,
                EQ_REL_TOL * nx,
            ));
            let modulus = ideal_norm(e, &x.modulus()?)?;
            out.push(Record::close(
                name,
                u.params("modulus"),
                nx,
                modulus,
                EQ_REL_TOL * nx,
            ));
            out.push(Record::le(
                name,
                u.params("op-below"),
                x.op_norm()?,
                nx,
                rel(nx, SLACK_TOL),
            ));
            let ny = ideal_norm(e, &y)?;
            let nsum = ideal_norm(e, &(&x + &y))?;
            let qt = e.concavity_modulus() * (nx + ny);
            out.push(Record::le(
                name,
                u.params("quasi-triangle"),
                nsum,
                qt,
                rel(qt, SLACK_TOL),
            ));
            if let Some(p) = e.schatten_exponent().filter(|&p| p <= 1.0) {
                let sx = singular_values(&x)?.into_sequence();
                let sy = singular_values(&y)?.into_sequence();
                let ss = singular_values(&(&x + &y))?.into_sequence();
                let lhs = schatten_power_sum(p, &ss);
                let rhs = schatten_power_sum(p, &sx) + schatten_power_sum(p, &sy);
                out.push(Record::le(
                    name,
                    u.params("p-additive"),
                    lhs,
                    rhs,
                    rel(rhs, SLACK_TOL),
                ));
            }
            let xi = singular_values(&x)?.into_sequence();
            for &m in &s.orders {
                let lhs = e.norm(&dilate(&xi, m)?)?;
                let rhs = e.dilation_norm_bound(m) * nx;
                let check = format!("dilation-m{m}");
                out.push(Record::le(name, u.params(&check), lhs, rhs, SLACK_TOL));
            }
            if u.sample == 0 {
                let p = ideal_norm(e, &Matrix::unit(n, 0, 0))?;
                out.push(Record::close(name, u.params("rank-one-e1"), p, 1.0, 0.0));
                let v = idealcalc::nalgebra::DVector::from_fn(n, |_, _| {
                    idealcalc::operators::complex_gaussian(&mut rng)
                });
                let v = &v / C64::new(v.norm(), 0.0);
                let q = ideal_norm(e, &Matrix::outer(&v, &v)?)?;
                out.push(Record::close(
                    name,
                    u.params("rank-one-random"),
                    q,
                    1.0,
                    1e-14,
                ));
            }
        }

        SuiteName::SvInequalities => {
            let x = sample_matrix(&mut rng, n, u.ensemble);
            let y = sample_matrix(&mut rng, n, u.ensemble);
            let sx = singular_values(&x)?.into_sequence();
            let sy = singular_values(&y)?.into_sequence();
            let sum = singular_values(&(&x + &y))?.into_sequence();
            let rhs = dilate(&sx.add(&sy), 2)?;
            out.push(entrywise(name, u.params("sum"), &sum, &rhs, SLACK_TOL));
            let prod = singular_values(&(&x * &y))?.into_sequence();
            let rhs = dilate(&hadamard(&sx, &sy), 2)?;
            out.push(entrywise(name, u.params("product"), &prod, &rhs, SLACK_TOL));
        }

        SuiteName::CalkinRoundtrip => {
            let e = &s.spaces[u.slot];
            let xi = random_seq(&mut rng, n);
            let op = ideal_norm(e, &diagonal(&xi)?)?;
            let seq = e.norm(&xi)?;
            out.push(Record::close(
                name,
                u.params("diagonal"),
                op,
                seq,
                rel(seq, 1e-10),
            ));
            let x = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let w = sample_matrix(&mut rng, n, Ensemble::Unitary);
            let nx = ideal_norm(e, &x)?;
            let conj = ideal_norm(e, &x.conjugate_by(&w)?)?;
            out.push(Record::close(
                name,
                u.params("unitary"),
                nx,
                conj,
                EQ_REL_TOL * nx,
            ));
        }

        SuiteName::HolderDuality => {
            let (f, g) = &s.pairs[u.slot];
            let xi = random_seq(&mut rng, n);
            let est = estimate_multiplier_norm_seq(f, g, &xi, &budget, Strategy::Search)?;
            let (r, p) = (
                f.schatten_exponent().unwrap(),
                g.schatten_exponent().unwrap(),
            );
            let exact = if r < p {
                holder_oracle(r, p, &xi)?
            } else {
                xi.sup_norm()
            };
            let dev = if exact > 0.0 {
                (est.value - exact).abs() / exact
            } else {
                est.value
            };
            out.push(Record::le(
                name,
                u.params("deviation"),
                dev,
                DUALITY_REL_TOL,
                0.0,
            ));
            out.push(Record::le(
                name,
                u.params("below-exact"),
                est.value,
                exact,
                rel(exact, 1e-9),
            ));
        }

        SuiteName::LorentzMarcinkiewiczDuality => {
            let g = &s.spaces[u.slot];
            let SpaceKind::Lorentz { weights, p } = g.kind() else {
                unreachable!("validated as Lorentz")
            };
            let f = SpaceSpec::schatten(*p)?;
            let m = SpaceSpec::marcinkiewicz(weights.clone(), *p)?;
            let xi = random_seq(&mut rng, n);
            let est = estimate_multiplier_norm_seq(&f, g, &xi, &budget, Strategy::Search)?;
            let mv = m.norm(&xi)?;
            let (lo, hi) = if *p == 1.0 {
                (1.0 - DUALITY_REL_TOL, 1.0 + DUALITY_REL_TOL)
            } else {
                (0.25, 4.0)
            };
            out.push(Record::le(name, u.params("lower"), lo * mv, est.value, 0.0));
            out.push(Record::le(name, u.params("upper"), est.value, hi * mv, 0.0));
        }

        SuiteName::MultiplierSandwich => {
            let (f, g) = &s.pairs[u.slot];
            let a = sample_matrix(&mut rng, n, Ensemble::Diagonal);
            let entries = Sequence::from_complex(&a.diagonal_entries())?;
            let restricted =
                estimate_multiplier_norm_seq(f, g, &entries, &budget, Strategy::Search)?;
            let full =
                estimate_multiplier_norm_op(f, g, &a, &budget, Strategy::Search, Side::Left)?;
            let tol = rel(full.value, SLACK_TOL);
            out.push(Record::le(
                name,
                u.params("restricted-below-full"),
                restricted.value,
                full.value,
                tol,
            ));
            let exact = estimate_multiplier_norm_seq(f, g, &entries, &budget, Strategy::Auto)?;
            if exact.status == Status::ExactAnalytic {
                let bound = 2.0 * f.concavity_modulus() * exact.value;
                out.push(Record::le(
                    name,
                    u.params("full-below-bound"),
                    full.value,
                    bound,
                    SANDWICH_TOL,
                ));
            }
        }

        SuiteName::DerivationSandwich => {
            let (i, j) = &s.pairs[u.slot];
            let a = sample_matrix(&mut rng, n, u.ensemble);
            let rep = norm_estimate(&DerivationSpec::new(a), i, j, &budget)?;
            let est = rep.estimate.value;
            out.push(Record::le(
                name,
                u.params("lower"),
                rep.op_norm_gauge,
                est,
                SANDWICH_TOL,
            ));
            if rep.upper_bound_status == Status::ExactAnalytic {
                out.push(Record::le(
                    name,
                    u.params("upper"),
                    est,
                    rep.upper_bound,
                    SANDWICH_TOL,
                ));
            }
        }

        SuiteName::ZsidoBound => {
            let e = &s.spaces[u.slot];
            let a = sample_matrix(&mut rng, n, u.ensemble);
            let bound = 2.0 * e.concavity_modulus() * a.op_norm()?;
            let rep = norm_estimate(&DerivationSpec::new(a), e, e, &budget)?;
            out.push(Record::le(
                name,
                u.params("bound"),
                rep.estimate.value,
                bound,
                SANDWICH_TOL,
            ));
        }

        SuiteName::GeneratorRecovery => {
            let a = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let d = DerivationSpec::new(a.clone());
            let rec = recover_generator(|x| d.apply(x).expect("same dimension"), n)?;
            let back = rec.generator.shifted(a.get(0, 0));
            out.push(Record::le(
                name,
                u.params("generator"),
                (&back - &a).max_abs(),
                0.0,
                RECOVERY_TOL,
            ));
            out.push(Record::le(
                name,
                u.params("residual"),
                rec.residual,
                0.0,
                RECOVERY_TOL,
            ));
            let lambda = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let ds = DerivationSpec::new(a.shifted(lambda));
            let shifted = recover_generator(|x| ds.apply(x).expect("same dimension"), n)?;
            let diff = (&shifted.generator - &rec.generator).max_abs();
            out.push(Record::le(name, u.params("shift"), diff, 0.0, SHIFT_TOL));
        }
    }
    Ok(out)
}

//! Acceptance criteria, one test each. Every test prints a single
//! `criterion NN <name>: PASS|FAIL ...` line and then asserts.

use std::time::{Duration, Instant};

use idealcalc::derivations::{norm_estimate, recover_generator, DerivationSpec, RESIDUAL_PROBES};
use idealcalc::multipliers::{
    estimate_multiplier_norm_op, estimate_multiplier_norm_seq, holder_oracle, SearchBudget, Side,
    Status, Strategy,
};
use idealcalc::nalgebra::DVector;
use idealcalc::operators::{
    complex_gaussian, diagonal, ideal_norm, sample_matrix, singular_values, Ensemble, Matrix, C64,
};
use idealcalc::oracles::grid_multiplier_sup;
use idealcalc::sequences::{dilate, hadamard, Sequence};
use idealcalc::spaces::{schatten_power_sum, SpaceSpec, WeightSequence};
use idealcalc_cli::{default_config, run, Format};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SUITE_TIME_LIMIT: Duration = Duration::from_secs(60);

const SV_SLACK: f64 = 1e-10;
const AXIOM_REL: f64 = 1e-8;
const IDEAL_REL_SLACK: f64 = 1e-10;
const ROUNDTRIP_TOL: f64 = 1e-10;
const CONJUGATION_REL: f64 = 1e-8;
const DUALITY_REL: f64 = 0.02;
const LM_FACTOR_P2: f64 = 4.0;
const SANDWICH_ADD: f64 = 1e-8;
const RESTRICTED_REL: f64 = 1e-10;
const RECOVERY_TOL: f64 = 1e-9;
const SHIFT_GENERIC_TOL: f64 = 1e-12;
const DILATION_ADD: f64 = 1e-10;
const RANK_ONE_RANDOM_TOL: f64 = 4.0 * f64::EPSILON;

fn report(id: u32, name: &str, ok: bool, started: Instant, detail: String) {
    let elapsed = started.elapsed();
    let ok = ok && elapsed < SUITE_TIME_LIMIT;
    println!(
        "criterion {id:02} {name}: {} ({detail}; {:.2}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64()
    );
    assert!(ok, "criterion {id} {name} failed: {detail}");
}

fn s(p: f64) -> SpaceSpec {
    SpaceSpec::schatten(p).unwrap()
}

/// Every space the artifact registers by default.
fn registry() -> Vec<SpaceSpec> {
    let h = WeightSequence::harmonic(64).unwrap();
    let pw = WeightSequence::power(0.5, 64).unwrap();
    vec![
        s(0.5),
        s(2.0 / 3.0),
        s(1.0),
        s(2.0),
        SpaceSpec::uniform(),
        SpaceSpec::lorentz(h.clone(), 1.0).unwrap(),
        SpaceSpec::lorentz(pw.clone(), 2.0).unwrap(),
        SpaceSpec::marcinkiewicz(h, 1.0).unwrap(),
        SpaceSpec::marcinkiewicz(pw, 2.0).unwrap(),
    ]
}

fn random_seq(rng: &mut ChaCha8Rng, len: usize) -> Sequence {
    Sequence::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn min_margin(lhs: &Sequence, rhs: &Sequence) -> f64 {
    (0..lhs.len())
        .map(|i| rhs.get(i) - lhs.get(i))
        .fold(f64::INFINITY, f64::min)
}

#[test]
fn criterion_01_singular_value_inequalities() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    let (mut checks, mut worst) = (0, f64::INFINITY);
    for ensemble in Ensemble::ALL {
        for _ in 0..200 {
            let x = sample_matrix(&mut rng, 8, ensemble);
            let y = sample_matrix(&mut rng, 8, ensemble);
            let sx = singular_values(&x).unwrap().into_sequence();
            let sy = singular_values(&y).unwrap().into_sequence();
            let sum = singular_values(&(&x + &y)).unwrap().into_sequence();
            let prod = singular_values(&(&x * &y)).unwrap().into_sequence();
            worst = worst.min(min_margin(&sum, &dilate(&sx.add(&sy), 2).unwrap()));
            worst = worst.min(min_margin(&prod, &dilate(&hadamard(&sx, &sy), 2).unwrap()));
            checks += 2;
        }
    }
    let ok = worst >= -SV_SLACK;
    report(
        1,
        "singular-value inequalities",
        ok,
        t,
        format!("{checks} checks, min slack {worst:.3e}"),
    );
}

#[test]
fn criterion_02_quasi_norm_axioms() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    let mut failures = Vec::new();
    let mut checks = 0;
    for e in registry() {
        for k in 0..100 {
            let n = 8;
            let x = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let u = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let v = sample_matrix(&mut rng, n, Ensemble::Gaussian);
            let nx = ideal_norm(&e, &x).unwrap();
            let lhs = ideal_norm(&e, &(&(&u * &x) * &v)).unwrap();
            let rhs = u.op_norm().unwrap() * nx * v.op_norm().unwrap();
            if lhs > rhs * (1.0 + IDEAL_REL_SLACK) {
                failures.push(format!("{e} #{k} ideal {lhs} > {rhs}"));
            }
            let adj = ideal_norm(&e, &x.adjoint()).unwrap();
            let modulus = ideal_norm(&e, &x.modulus().unwrap()).unwrap();
            if (adj - nx).abs() > AXIOM_REL * nx || (modulus - nx).abs() > AXIOM_REL * nx {
                failures.push(format!("{e} #{k} adjoint/modulus"));
            }
            if x.op_norm().unwrap() > nx * (1.0 + IDEAL_REL_SLACK) {
                failures.push(format!("{e} #{k} op norm above ideal norm"));
            }
            checks += 4;
        }
        for n in [1, 4, 8] {
            let p = ideal_norm(&e, &Matrix::unit(n, 0, 0)).unwrap();
            if p != 1.0 {
                failures.push(format!("{e} coordinate projection n={n} has norm {p}"));
            }
            let w = DVector::from_fn(n, |_, _| complex_gaussian(&mut rng));
            let w = &w / C64::new(w.norm(), 0.0);
            let q = ideal_norm(&e, &Matrix::outer(&w, &w).unwrap()).unwrap();
            if (q - 1.0).abs() > RANK_ONE_RANDOM_TOL {
                failures.push(format!("{e} random rank-one projection n={n} has norm {q}"));
            }
            checks += 2;
        }
    }
    let ok = failures.is_empty();
    report(
        2,
        "quasi-norm axioms",
        ok,
        t,
        format!("{checks} checks, failures {failures:?}"),
    );
}

#[test]
fn criterion_03_quasi_triangle_and_p_additivity() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    let (mut checks, mut worst) = (0, f64::INFINITY);
    for p in [0.5, 2.0 / 3.0, 1.0, 2.0] {
        let e = s(p);
        let c = e.concavity_modulus();
        for _ in 0..200 {
            let x = sample_matrix(&mut rng, 8, Ensemble::Gaussian);
            let y = sample_matrix(&mut rng, 8, Ensemble::Gaussian);
            let sx = singular_values(&x).unwrap().into_sequence();
            let sy = singular_values(&y).unwrap().into_sequence();
            let ss = singular_values(&(&x + &y)).unwrap().into_sequence();
            let rhs = c * (e.norm(&sx).unwrap() + e.norm(&sy).unwrap());
            worst = worst.min((rhs - e.norm(&ss).unwrap()) / rhs);
            checks += 1;
            if p <= 1.0 {
                let rhs = schatten_power_sum(p, &sx) + schatten_power_sum(p, &sy);
                worst = worst.min((rhs - schatten_power_sum(p, &ss)) / rhs);
                checks += 1;
            }
        }
    }
    let ok = worst >= -IDEAL_REL_SLACK;
    report(
        3,
        "quasi-triangle and p-additivity",
        ok,
        t,
        format!("{checks} checks, min relative slack {worst:.3e}"),
    );
}

#[test]
fn criterion_04_calkin_round_trip() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut diag_err, mut conj_err) = (0.0f64, 0.0f64);
    for e in registry() {
        for _ in 0..100 {
            let len = rng.random_range(1..=16);
            let xi = random_seq(&mut rng, len);
            let a = ideal_norm(&e, &diagonal(&xi).unwrap()).unwrap();
            let b = e.norm(&xi).unwrap();
            diag_err = diag_err.max((a - b).abs());
            let x = sample_matrix(&mut rng, 8, Ensemble::Gaussian);
            let w = sample_matrix(&mut rng, 8, Ensemble::Unitary);
            let nx = ideal_norm(&e, &x).unwrap();
            let nc = ideal_norm(&e, &x.conjugate_by(&w).unwrap()).unwrap();
            conj_err = conj_err.max((nx - nc).abs() / nx);
        }
    }
    let ok = diag_err <= ROUNDTRIP_TOL && conj_err <= CONJUGATION_REL;
    report(
        4,
        "Calkin round-trip",
        ok,
        t,
        format!("max |diag - seq| {diag_err:.3e}, max relative conjugation change {conj_err:.3e}"),
    );
}

#[test]
fn criterion_05_holder_duality() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let budget = SearchBudget::new(8, 100, 5).unwrap();
    let (mut dev_exact, mut dev_grid, mut auto_err) = (0.0f64, 0.0f64, 0.0f64);
    for (r, p) in [(1.0, 2.0), (1.0, 3.0), (0.5, 1.0), (2.0, 3.0)] {
        for k in 0..20 {
            let len = 1 + k % 8;
            let xi = random_seq(&mut rng, len);
            let exact = holder_oracle(r, p, &xi).unwrap();
            let b = budget.with_seed(k as u64);
            let est =
                estimate_multiplier_norm_seq(&s(r), &s(p), &xi, &b, Strategy::Search).unwrap();
            dev_exact = dev_exact.max((est.value - exact).abs() / exact);
            let auto = estimate_multiplier_norm_seq(&s(r), &s(p), &xi, &b, Strategy::Auto).unwrap();
            auto_err = auto_err.max((auto.value - exact).abs() / exact);
            if len <= 6 {
                let grid = grid_multiplier_sup(&s(r), &s(p), xi.as_slice(), 40);
                dev_grid = dev_grid.max((est.value - grid).abs() / grid);
            }
        }
    }
    let ok = dev_exact <= DUALITY_REL && dev_grid <= DUALITY_REL && auto_err <= 1e-12;
    report(5, "Hoelder duality", ok, t, format!("max deviation: closed form {dev_exact:.3e}, grid {dev_grid:.3e}, analytic path {auto_err:.1e}"));
}

#[test]
fn criterion_06_lorentz_marcinkiewicz_duality() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(106);
    let budget = SearchBudget::new(8, 100, 6).unwrap();
    let w = WeightSequence::harmonic(8).unwrap();
    let mut ratios = [(f64::INFINITY, 0.0f64); 2];
    for (slot, p) in [1.0, 2.0].into_iter().enumerate() {
        let l = SpaceSpec::lorentz(w.clone(), p).unwrap();
        let m = SpaceSpec::marcinkiewicz(w.clone(), p).unwrap();
        for k in 0..20 {
            let xi = random_seq(&mut rng, 1 + k % 8);
            let b = budget.with_seed(k as u64);
            let est = estimate_multiplier_norm_seq(&s(p), &l, &xi, &b, Strategy::Search).unwrap();
            let ratio = est.value / m.norm(&xi).unwrap();
            ratios[slot].0 = ratios[slot].0.min(ratio);
            ratios[slot].1 = ratios[slot].1.max(ratio);
        }
    }
    let ok = ratios[0].0 >= 1.0 - DUALITY_REL
        && ratios[0].1 <= 1.0 + DUALITY_REL
        && ratios[1].0 >= 1.0 / LM_FACTOR_P2
        && ratios[1].1 <= LM_FACTOR_P2;
    report(
        6,
        "Lorentz-Marcinkiewicz duality",
        ok,
        t,
        format!(
            "estimate/m range p=1 [{:.4}, {:.4}], p=2 [{:.4}, {:.4}]",
            ratios[0].0, ratios[0].1, ratios[1].0, ratios[1].1
        ),
    );
}

#[test]
fn criterion_07_multiplier_sandwich() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(107);
    let budget = SearchBudget::new(4, 60, 7).unwrap();
    let mut failures = Vec::new();
    let mut checks = 0;
    for (r, p) in [(1.0, 2.0), (0.5, 1.0), (2.0, 2.0), (0.5, 2.0)] {
        let (j, i) = (s(r), s(p));
        for k in 0..50 {
            let n = rng.random_range(1..=8);
            let a = sample_matrix(&mut rng, n, Ensemble::Diagonal);
            let entries = Sequence::from_complex(&a.diagonal_entries()).unwrap();
            let b = budget.with_seed(k);
            let restricted = estimate_multiplier_norm_seq(&j, &i, &entries, &b, Strategy::Search)
                .unwrap()
                .value;
            let full = estimate_multiplier_norm_op(&j, &i, &a, &b, Strategy::Search, Side::Left)
                .unwrap()
                .value;
            let exact = estimate_multiplier_norm_seq(&j, &i, &entries, &b, Strategy::Auto).unwrap();
            assert_eq!(exact.status, Status::ExactAnalytic);
            let bound = 2.0 * j.concavity_modulus() * exact.value + SANDWICH_ADD;
            if restricted > full * (1.0 + RESTRICTED_REL) || full > bound {
                failures.push(format!("({r},{p}) n={n}: {restricted} / {full} / {bound}"));
            }
            checks += 2;
        }
    }
    let ok = failures.is_empty();
    report(
        7,
        "multiplier sandwich",
        ok,
        t,
        format!("{checks} checks, failures {failures:?}"),
    );
}

#[test]
fn criterion_08_derivation_sandwich() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let budget = SearchBudget::new(4, 40, 8).unwrap();
    let (mut lower, mut upper, mut upper_checks) = (f64::INFINITY, f64::INFINITY, 0);
    let mut trials = 0;
    for (i, j) in [(2.0, 1.0), (1.0, 0.5), (2.0, 2.0)] {
        for ensemble in [Ensemble::Diagonal, Ensemble::Gaussian] {
            for k in 0..50 {
                let n = rng.random_range(2..=8);
                let a = sample_matrix(&mut rng, n, ensemble);
                let rep =
                    norm_estimate(&DerivationSpec::new(a), &s(i), &s(j), &budget.with_seed(k))
                        .unwrap();
                lower = lower.min(rep.estimate.value - (rep.op_norm_gauge - SANDWICH_ADD));
                if rep.upper_bound_status == Status::ExactAnalytic {
                    upper = upper.min(rep.upper_bound + SANDWICH_ADD - rep.estimate.value);
                    upper_checks += 1;
                }
                trials += 1;
            }
        }
    }
    let ok = lower >= 0.0 && upper >= 0.0 && upper_checks == trials;
    report(8, "derivation sandwich", ok, t, format!("{trials} trials, {upper_checks} analytic upper checks, min lower margin {lower:.3e}, min upper margin {upper:.3e}"));
}

#[test]
fn criterion_09_zsido_bound() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(109);
    let budget = SearchBudget::new(4, 40, 9).unwrap();
    let mut worst = f64::INFINITY;
    for e in [s(1.0), s(2.0), s(0.5), SpaceSpec::uniform()] {
        for k in 0..50 {
            let a = sample_matrix(&mut rng, 6, Ensemble::Gaussian);
            let bound = 2.0 * e.concavity_modulus() * a.op_norm().unwrap() + SANDWICH_ADD;
            let rep = norm_estimate(&DerivationSpec::new(a), &e, &e, &budget.with_seed(k)).unwrap();
            worst = worst.min(bound - rep.estimate.value);
        }
    }
    report(
        9,
        "Zsido bound",
        worst >= 0.0,
        t,
        format!("200 trials, min margin {worst:.3e}"),
    );
}

fn dyadic(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(-64i32..=64) as f64 / 16.0
}

#[test]
fn criterion_10_generator_recovery() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(110);
    let (mut gen_err, mut residual, mut generic_shift) = (0.0f64, 0.0f64, 0.0f64);
    let mut bitwise_shift = true;
    let mut probes_ok = true;
    for _ in 0..50 {
        let a = sample_matrix(&mut rng, 8, Ensemble::Gaussian);
        let d = DerivationSpec::new(a.clone());
        let rec = recover_generator(|x| d.apply(x).unwrap(), 8).unwrap();
        probes_ok &= rec.probes == RESIDUAL_PROBES;
        gen_err = gen_err.max((&rec.generator.shifted(a.get(0, 0)) - &a).max_abs());
        residual = residual.max(rec.residual);
        let lambda = C64::new(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
        let ds = DerivationSpec::new(a.shifted(lambda));
        let rs = recover_generator(|x| ds.apply(x).unwrap(), 8).unwrap();
        generic_shift = generic_shift.max((&rs.generator - &rec.generator).max_abs());

        // entries and shift on a dyadic grid: every operation is exact
        let g = Matrix::from_fn(8, |_, _| C64::new(dyadic(&mut rng), dyadic(&mut rng))).unwrap();
        let mu = C64::new(dyadic(&mut rng), dyadic(&mut rng));
        let dg = DerivationSpec::new(g.clone());
        let dgs = DerivationSpec::new(g.shifted(mu));
        let r1 = recover_generator(|x| dg.apply(x).unwrap(), 8).unwrap();
        let r2 = recover_generator(|x| dgs.apply(x).unwrap(), 8).unwrap();
        bitwise_shift &= r1.generator == r2.generator;
    }
    let ok = gen_err <= RECOVERY_TOL
        && residual <= RECOVERY_TOL
        && probes_ok
        && bitwise_shift
        && generic_shift <= SHIFT_GENERIC_TOL;
    report(10, "generator recovery", ok, t, format!("max generator error {gen_err:.3e}, max residual {residual:.3e}, shift: bitwise on dyadic grid {bitwise_shift}, generic max diff {generic_shift:.3e}"));
}

#[test]
fn criterion_11_dilation_bound() {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(111);
    let (mut checks, mut failures, mut worst) = (0, 0, f64::INFINITY);
    let mut corrected_failures = 0;
    for e in registry() {
        let c = e.concavity_modulus();
        for m in [2usize, 3, 4] {
            let stated: f64 = (1..m).map(|k| c.powi(k as i32)).sum();
            for _ in 0..100 {
                let len = rng.random_range(1..=16);
                let xi = random_seq(&mut rng, len);
                let lhs = e.norm(&dilate(&xi, m).unwrap()).unwrap();
                let base = e.norm(&xi).unwrap();
                let margin = stated * base + DILATION_ADD - lhs;
                worst = worst.min(margin);
                failures += (margin < 0.0) as usize;
                corrected_failures +=
                    (lhs > e.dilation_norm_bound(m) * base + DILATION_ADD) as usize;
                checks += 1;
            }
        }
    }
    let ok = failures == 0;
    report(11, "dilation bound", ok, t, format!("{checks} checks, {failures} violate the stated sum C+...+C^(m-1) (min margin {worst:.3e}); {corrected_failures} violate C+...+C^(m-1)+C^(m-1)"));
}

#[test]
fn criterion_12_cli_determinism() {
    let t = Instant::now();
    let config = default_config();
    let first = run(&config);
    let second = run(&config);
    let same = first == second
        && first.to_string(Format::Json) == second.to_string(Format::Json)
        && first.to_string(Format::Csv) == second.to_string(Format::Csv);
    let ok = same && first.summary.total > 0;
    report(
        12,
        "CLI determinism",
        ok,
        t,
        format!(
            "{} records, {} passed, reports identical {same}",
            first.summary.total, first.summary.passed
        ),
    );
}

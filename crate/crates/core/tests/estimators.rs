use idealcalc::derivations::{norm_estimate, recover_generator, DerivationSpec};
use idealcalc::multipliers::{
    estimate_multiplier_norm_op, estimate_multiplier_norm_seq, holder_oracle, multiplier_norm_op,
    multiplier_norm_seq, multiplier_ratio, SearchBudget, Side, Status, Strategy, Witness,
};
use idealcalc::operators::{diagonal, ideal_norm, random_matrix, Ensemble, Matrix};
use idealcalc::oracles::{grid_derivation_norm_2x2, grid_multiplier_sup};
use idealcalc::sequences::{hadamard, Sequence};
use idealcalc::spaces::{SpaceSpec, WeightSequence};
use nalgebra::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn s(p: f64) -> SpaceSpec {
    SpaceSpec::schatten(p).unwrap()
}

fn random_xi(rng: &mut ChaCha8Rng, len: usize) -> Sequence {
    Sequence::new((0..len).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap()
}

fn budget(seed: u64) -> SearchBudget {
    SearchBudget::new(8, 120, seed).unwrap()
}

/// Recompute the value a witness claims, with no help from the estimator.
fn recompute_seq(f: &SpaceSpec, g: &SpaceSpec, xi: &Sequence, w: &Witness) -> f64 {
    let Witness::Sequence(eta) = w else {
        panic!("sequence estimate with a matrix witness")
    };
    let xs = idealcalc::sequences::decreasing_rearrangement(xi);
    let den = g.norm(eta).unwrap();
    if den == 0.0 {
        return 0.0;
    }
    f.norm(&hadamard(&xs, eta)).unwrap() / den
}

#[test]
fn holder_search_matches_grid_and_closed_form() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for (r, p) in [(1.0, 2.0), (1.0, 3.0), (0.5, 1.0), (2.0, 3.0)] {
        for t in 0..6 {
            let len = 1 + t % 6;
            let xi = random_xi(&mut rng, len);
            let est = estimate_multiplier_norm_seq(
                &s(r),
                &s(p),
                &xi,
                &budget(t as u64),
                Strategy::Search,
            )
            .unwrap();
            let exact = holder_oracle(r, p, &xi).unwrap();
            let grid = grid_multiplier_sup(&s(r), &s(p), xi.as_slice(), 40);
            assert!(grid <= exact * (1.0 + 1e-12));
            assert!(
                est.value <= exact * (1.0 + 1e-9),
                "search above closed form"
            );
            assert!(
                est.value >= 0.98 * exact,
                "({r},{p}) {} vs {exact}",
                est.value
            );
            assert!(est.value >= 0.98 * grid);
            let again = recompute_seq(&s(r), &s(p), &xi, &est.witness);
            assert!((again - est.value).abs() <= 1e-9 * est.value.max(1.0));
        }
    }
}

#[test]
fn lorentz_search_matches_grid_and_marcinkiewicz() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for p in [1.0, 2.0] {
        let w = WeightSequence::harmonic(8).unwrap();
        let l = SpaceSpec::lorentz(w.clone(), p).unwrap();
        let m = SpaceSpec::marcinkiewicz(w, p).unwrap();
        for t in 0..6 {
            let xi = random_xi(&mut rng, 1 + t % 6);
            let est =
                estimate_multiplier_norm_seq(&s(p), &l, &xi, &budget(t as u64), Strategy::Search)
                    .unwrap();
            let exact = m.norm(&xi).unwrap();
            let grid = grid_multiplier_sup(&s(p), &l, xi.as_slice(), 40);
            assert!(grid <= exact * (1.0 + 1e-12));
            assert!(est.value >= 0.98 * exact && est.value <= exact * (1.0 + 1e-9));
            let auto = multiplier_norm_seq(&s(p), &l, &xi, &budget(0)).unwrap();
            assert_eq!(auto.status, Status::ExactAnalytic);
            assert!((auto.value - exact).abs() <= 1e-12 * exact.max(1.0));
            let again = recompute_seq(&s(p), &l, &xi, &auto.witness);
            assert!((again - auto.value).abs() <= 1e-9 * auto.value.max(1.0));
        }
    }
}

#[test]
fn derivation_search_matches_2x2_grid() {
    let a = [[0.7, -0.4], [0.2, -0.5]];
    let am = Matrix::from_real_rows(&[a[0].to_vec(), a[1].to_vec()]).unwrap();
    let d = DerivationSpec::new(am);
    let big = SearchBudget::new(16, 300, 5).unwrap();
    // the grid normalizes x in Hilbert-Schmidt norm, so I = C_2
    for (i, j) in [(2.0, 2.0), (2.0, 1.0)] {
        let grid = grid_derivation_norm_2x2(a, j, 0.02);
        let rep = norm_estimate(&d, &s(i), &s(j), &big).unwrap();
        assert!(
            (rep.estimate.value - grid).abs() <= 0.02 * grid,
            "({i},{j}) {} vs grid {grid}",
            rep.estimate.value
        );
    }
}

#[test]
fn hilbert_schmidt_derivation_norm_of_projection() {
    // delta_p on C_2 for a rank-one projection p has norm 1 (spread of spectrum)
    let d = DerivationSpec::new(Matrix::unit(4, 0, 0));
    let rep = norm_estimate(&d, &s(2.0), &s(2.0), &budget(3)).unwrap();
    assert!(
        (rep.estimate.value - 1.0).abs() <= 1e-6,
        "{}",
        rep.estimate.value
    );
    let oracle = grid_derivation_norm_2x2([[1.0, 0.0], [0.0, 0.0]], 2.0, 0.02);
    assert!((oracle - 1.0).abs() <= 1e-3);
}

#[test]
fn operator_multiplier_sandwich_and_side_agreement() {
    let pairs = [(1.0, 2.0), (0.5, 1.0), (2.0, 2.0), (1.0, 1.0)];
    for seed in 0..8u64 {
        let a = random_matrix(seed, 4, Ensemble::Gaussian);
        for (r, p) in pairs {
            let (j, i) = (s(r), s(p));
            let b = budget(seed);
            let exact = multiplier_norm_op(&j, &i, &a, &b).unwrap();
            assert_eq!(exact.status, Status::ExactAnalytic);
            let left =
                estimate_multiplier_norm_op(&j, &i, &a, &b, Strategy::Search, Side::Left).unwrap();
            let right =
                estimate_multiplier_norm_op(&j, &i, &a, &b, Strategy::Search, Side::Right).unwrap();
            assert!(
                left.value <= exact.value * (1.0 + 1e-9) + 1e-12,
                "({r},{p}) seed {seed}: {} > {}",
                left.value,
                exact.value
            );
            assert!(right.value <= exact.value * (1.0 + 1e-9) + 1e-12);
            assert!((left.value - right.value).abs() <= 0.05 * exact.value);
            let Witness::Matrix(x) = &exact.witness else {
                panic!()
            };
            let again = multiplier_ratio(&j, &i, &a, x, Side::Left).unwrap();
            assert!((again - exact.value).abs() <= 1e-9 * exact.value.max(1.0));
            if r == p {
                let op = a.op_norm().unwrap();
                assert!(exact.value <= op * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn diagonal_multiplier_matches_sequence_multiplier() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let xi = random_xi(&mut rng, 6);
        let a = diagonal(&xi).unwrap();
        let seq = multiplier_norm_seq(&s(1.0), &s(3.0), &xi, &budget(1)).unwrap();
        let op = multiplier_norm_op(&s(1.0), &s(3.0), &a, &budget(1)).unwrap();
        assert!((seq.value - op.value).abs() <= 1e-9 * seq.value);
    }
}

#[test]
fn submultiplicative_contract() {
    // ||a x||_J <= ||a||_{J:I} ||x||_I for any probe x
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for seed in 0..10u64 {
        let a = random_matrix(seed, 5, Ensemble::Gaussian);
        let (j, i) = (s(0.5), s(1.0));
        let m = multiplier_norm_op(&j, &i, &a, &budget(seed)).unwrap();
        for _ in 0..10 {
            let x = idealcalc::operators::sample_matrix(&mut rng, 5, Ensemble::Gaussian);
            let lhs = ideal_norm(&j, &(&a * &x)).unwrap();
            assert!(lhs <= m.value * ideal_norm(&i, &x).unwrap() * (1.0 + 1e-9));
        }
    }
}

#[test]
fn derivation_sandwich_and_zsido_bound() {
    let pairs = [(2.0, 1.0), (1.0, 0.5), (2.0, 2.0)];
    for seed in 0..6u64 {
        for ens in [Ensemble::Gaussian, Ensemble::Diagonal] {
            let a = random_matrix(seed, 5, ens);
            let d = DerivationSpec::new(a.clone());
            for (i, j) in pairs {
                let rep = norm_estimate(&d, &s(i), &s(j), &budget(seed)).unwrap();
                assert!(rep.lower_margin() >= -1e-8);
                assert_eq!(rep.upper_bound_status, Status::ExactAnalytic);
                assert!(rep.upper_margin() >= -1e-8);
            }
            for e in [s(1.0), s(2.0), s(0.5), SpaceSpec::uniform()] {
                let rep = norm_estimate(&d, &e, &e, &budget(seed)).unwrap();
                let bound = 2.0 * e.concavity_modulus() * a.op_norm().unwrap();
                assert!(rep.estimate.value <= bound + 1e-8, "{e}");
            }
        }
    }
}

#[test]
fn derivation_is_shift_invariant() {
    let a = random_matrix(4, 4, Ensemble::Gaussian);
    let lam = Complex::new(0.5, -0.25);
    let d = DerivationSpec::new(a.clone());
    let ds = DerivationSpec::new(a.shifted(lam));
    let x = random_matrix(9, 4, Ensemble::Gaussian);
    let diff = &d.apply(&x).unwrap() - &ds.apply(&x).unwrap();
    assert!(diff.max_abs() <= 1e-14);
    let r1 = norm_estimate(&d, &s(2.0), &s(1.0), &budget(2)).unwrap();
    let r2 = norm_estimate(&ds, &s(2.0), &s(1.0), &budget(2)).unwrap();
    assert!((r1.op_norm_gauge - r2.op_norm_gauge).abs() <= 1e-12);
}

#[test]
fn recovery_round_trip_and_star_property() {
    for seed in 0..10u64 {
        let a = random_matrix(seed, 6, Ensemble::Gaussian);
        let d = DerivationSpec::new(a.clone());
        let rec = recover_generator(|x| d.apply(x).unwrap(), 6).unwrap();
        let back = rec.generator.shifted(a.get(0, 0));
        assert!((&back - &a).max_abs() <= 1e-9);
        assert!(rec.residual <= 1e-9);

        let (re, im) = d.split_star();
        // skew-adjoint generators give *-derivations
        for part in [&re, &im] {
            let x = random_matrix(seed + 100, 6, Ensemble::Gaussian);
            let lhs = part.apply(&x.adjoint()).unwrap();
            let rhs = part.apply(&x).unwrap().adjoint();
            assert!((&lhs - &rhs).max_abs() <= 1e-12);
        }
        let i = Complex::new(0.0, 1.0);
        let sum = re.generator() + &im.generator().scale(i);
        assert!((&sum - &a).max_abs() <= 1e-12);
    }
}

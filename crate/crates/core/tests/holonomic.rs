use std::time::Instant;

use proptest::prelude::*;
use urn_core::exact::{int, Assignment, Poly, Rational, Var};
use urn_core::holonomic::{
    eval_forward, eval_forward_traced, guess_bivariate, guess_univariate, theorem1, theorem2,
    theorem2_raw, verify_recurrence, DataSource, GuessOutcome, GuessSpec, Recurrence, Region,
};
use urn_core::urnproc::{Quantity, ValueTable};

fn e_table(max: u32) -> ValueTable {
    ValueTable::build(Quantity::ExpectedRounds, max, max).unwrap()
}

#[test]
fn theorem1_holds_away_from_the_zero_column() {
    let t = e_table(34);
    let report = verify_recurrence(
        &theorem1(),
        DataSource::Table(&t),
        &Region::Rect {
            m: 1..=30,
            n: 0..=34,
        },
    )
    .unwrap();
    assert!(report.all_zero(), "{:?}", report.witness);
}

#[test]
fn theorem1_residual_on_zero_column() {
    let t = e_table(30);
    for n in 1..=30 {
        let report = verify_recurrence(
            &theorem1(),
            DataSource::Table(&t),
            &Region::Rect { m: 0..=0, n: n..=n },
        )
        .unwrap();
        assert_eq!(report.witness.unwrap().residual, int(-6 * (7 * n + 9)));
    }
}

#[test]
fn theorem2_and_corruptions() {
    let t = e_table(30);
    let diag = t.diagonal();
    let data = DataSource::Sequence {
        first_index: 1,
        values: &diag,
    };
    assert!(
        verify_recurrence(&theorem2(), data, &Region::Indices(1..=27))
            .unwrap()
            .all_zero()
    );
    for i in 0..=3 {
        let mut coefs = theorem2_raw().coefficients().to_vec();
        coefs[i] = coefs[i].clone() + Poly::one();
        let bad = Recurrence::new(Var::N, vec![], coefs).unwrap();
        let report = verify_recurrence(&bad, data, &Region::Indices(1..=27)).unwrap();
        let w = report.witness.expect("corrupted recurrence must fail");
        assert_eq!(w.n, 1);
        assert_eq!(w.residual, diag[i]);
    }
}

#[test]
fn forward_evaluation_matches_dp_columns() {
    let t = ValueTable::build(Quantity::ExpectedRounds, 120, 10).unwrap();
    for n in [1u32, 2, 5, 10] {
        let initial: Vec<Rational> = (1..=4).map(|m| t.get(m, n).unwrap().clone()).collect();
        let params = Assignment::new().with(Var::N, int(n.into()));
        for target in [1i64, 4, 5, 17, 60, 120] {
            let (value, trace) =
                eval_forward_traced(&theorem1(), &params, &initial, 1, target).unwrap();
            assert_eq!(&value, t.get(target as u32, n).unwrap(), "E({target},{n})");
            assert!(trace.peak_window <= 4);
        }
    }
}

#[test]
fn forward_evaluation_of_the_diagonal() {
    let diag = e_table(25).diagonal();
    let initial = [
        int(1),
        Rational::new(17.into(), 9.into()),
        Rational::new(143.into(), 50.into()),
    ];
    for target in 1..=25 {
        let v = eval_forward(&theorem2(), &Assignment::new(), &initial, 1, target).unwrap();
        assert_eq!(v, diag[target as usize - 1]);
    }
}

#[test]
fn leading_coefficient_never_vanishes() {
    let lead = theorem1().leading().clone();
    for m in 0..=200 {
        for n in 1..=200 {
            assert_ne!(
                lead.eval(&Assignment::mn(m, n)).unwrap(),
                int(0),
                "({m},{n})"
            );
        }
    }
}

fn assert_closure(rec: &Recurrence, table: &ValueTable) {
    // every starting point with room for the recurrence, fitted or not
    let r = rec.order() as i64;
    let region = match rec.shift() {
        Var::M => Region::Rect {
            m: 1..=table.max_m() as i64 - r,
            n: 1..=table.max_n() as i64,
        },
        Var::N => Region::Rect {
            m: 1..=table.max_m() as i64,
            n: 1..=table.max_n() as i64 - r,
        },
    };
    assert!(verify_recurrence(rec, DataSource::Table(table), &region)
        .unwrap()
        .all_zero());
}

#[test]
fn rediscovers_theorem2() {
    let diag = e_table(40).diagonal();
    let spec = GuessSpec::univariate(3, 7).with_margin(5);
    let outcome = guess_univariate(&diag, Var::N, 1, &spec);
    assert_eq!(outcome, GuessOutcome::Found(theorem2()));
    // forty terms cannot hold out the default margin at order two
    assert_eq!(
        guess_univariate(&diag, Var::N, 1, &GuessSpec::univariate(3, 7)),
        GuessOutcome::InsufficientData {
            order: 2,
            unknowns: 24,
            equations: 38
        }
    );
}

#[test]
fn rediscovers_theorem1() {
    let t = e_table(40);
    let start = Instant::now();
    let outcome = guess_bivariate(&t, &GuessSpec::bivariate(4, 4, 3), Var::M);
    let elapsed = start.elapsed();
    let rec = outcome.recurrence().expect("recurrence found").clone();
    assert_eq!(rec, theorem1());
    assert_closure(&rec, &t);
    assert!(elapsed.as_secs() < 300, "{elapsed:?}");
}

#[test]
fn constant_table_at_minimal_spec() {
    let t = ValueTable::build(Quantity::WinProb, 20, 20).unwrap();
    let rec = guess_bivariate(&t, &GuessSpec::bivariate(1, 0, 0), Var::M)
        .recurrence()
        .unwrap()
        .clone();
    assert_eq!(
        rec.coefficients(),
        &[Poly::parse("-1").unwrap(), Poly::one()]
    );
    assert_closure(&rec, &t);
}

#[test]
fn simple_variant_probability_recurrence_in_n() {
    // m/(m+n) satisfies (m+n+1) a(n+1) = (m+n) a(n)
    let t = ValueTable::build(Quantity::SimpleProb, 20, 20).unwrap();
    let rec = guess_bivariate(&t, &GuessSpec::bivariate(2, 1, 1), Var::N)
        .recurrence()
        .unwrap()
        .clone();
    assert_eq!(
        rec.coefficients(),
        &[
            Poly::parse("-m - n").unwrap(),
            Poly::parse("m + n + 1").unwrap()
        ]
    );
    assert_closure(&rec, &t);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    // geometric-times-polynomial sequences are recovered and the result
    // holds on every index
    #[test]
    fn guess_verify_closure(r in 1i64..6, c0 in -3i64..4, c1 in 1i64..4) {
        let seq: Vec<Rational> = (1..=40i64)
            .map(|k| int(c1 * k + c0) * num_traits::pow(int(r), k as usize))
            .collect();
        let outcome = guess_univariate(&seq, Var::N, 1, &GuessSpec::univariate(2, 1));
        let rec = outcome.recurrence().expect("found").clone();
        prop_assert!(rec.is_canonical());
        prop_assert_eq!(rec.order(), 1);
        let last = 40 - rec.order() as i64;
        let report = verify_recurrence(
            &rec,
            DataSource::Sequence { first_index: 1, values: &seq },
            &Region::Indices(1..=last),
        ).unwrap();
        prop_assert!(report.all_zero());
    }
}

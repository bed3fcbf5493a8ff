//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.
//!
//! Exact criteria use zero tolerance. Statistical criteria use three standard
//! errors. Runtime limits are wall-clock on the test profile.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use urn_core::exact::{int, rat, Assignment, Rational, Var};
use urn_core::holonomic::{
    eval_forward_traced, guess_bivariate, guess_univariate, theorem1, theorem2, verify_recurrence,
    DataSource, GuessOutcome, GuessSpec, Region,
};
use urn_core::montecarlo::{simulate, SimConfig};
use urn_core::urnproc::{
    simple_win_probability, verify_trivial_identity, Quantity, UrnState, ValueTable, Variant,
};

const SIGMAS: f64 = 3.0;
/// Held-out equations for the diagonal guess; forty terms cannot spare the
/// default twenty at order three.
const DIAGONAL_MARGIN: usize = 5;

type Check = fn() -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn within(elapsed: Duration, limit_secs: u64) -> bool {
    elapsed < Duration::from_secs(limit_secs)
}

fn e_table(max_m: u32, max_n: u32) -> ValueTable {
    ValueTable::build(Quantity::ExpectedRounds, max_m, max_n).unwrap()
}

fn c1_probability_constancy() -> Outcome {
    let start = Instant::now();
    let t = ValueTable::build(Quantity::WinProb, 50, 50).unwrap();
    let half = rat(1, 2);
    let bad = (1..=50u32)
        .flat_map(|m| (1..=50u32).map(move |n| (m, n)))
        .find(|&(m, n)| t.get(m, n) != Some(&half));
    let elapsed = start.elapsed();
    match bad {
        None => outcome(
            within(elapsed, 10),
            format!("2500 cells equal 1/2 in {elapsed:.2?}"),
        ),
        Some((m, n)) => outcome(false, format!("P({m},{n}) = {:?}", t.get(m, n))),
    }
}

fn c2_known_values() -> Outcome {
    let t = e_table(3, 3);
    let got: Vec<&Rational> = (1..=3).map(|k| t.get(k, k).unwrap()).collect();
    let want = [int(1), rat(17, 9), rat(143, 50)];
    let pass = got.iter().zip(&want).all(|(g, w)| *g == w);
    outcome(
        pass,
        format!(
            "E(1,1), E(2,2), E(3,3) = {}, {}, {}",
            got[0], got[1], got[2]
        ),
    )
}

fn c3_identity() -> Outcome {
    let bad = (1..=50u32)
        .flat_map(|m| (1..=50u32).map(move |n| (m, n)))
        .find(|&(m, n)| verify_trivial_identity(m, n) != Ok(true));
    match bad {
        None => outcome(true, "identity holds on 1..=50 x 1..=50"),
        Some((m, n)) => outcome(false, format!("identity fails at ({m},{n})")),
    }
}

fn c4_theorem1() -> Outcome {
    let start = Instant::now();
    let t = e_table(30, 30);
    let report = verify_recurrence(
        &theorem1(),
        DataSource::Table(&t),
        &Region::Rect {
            m: 0..=26,
            n: 1..=30,
        },
    )
    .unwrap();
    let elapsed = start.elapsed();
    let interior = verify_recurrence(
        &theorem1(),
        DataSource::Table(&t),
        &Region::Rect {
            m: 1..=26,
            n: 1..=30,
        },
    )
    .unwrap();
    let note = format!(
        "m = 1..=26 alone: {} of {} residuals zero",
        if interior.all_zero() {
            "all"
        } else {
            "not all"
        },
        interior.points_checked
    );
    match report.witness {
        None => outcome(
            within(elapsed, 30),
            format!("{} residuals zero in {elapsed:.2?}", report.points_checked),
        ),
        Some(w) => outcome(
            false,
            format!(
                "residual {} at (m,n) = ({},{}); {note}",
                w.residual, w.m, w.n
            ),
        ),
    }
}

fn c5_theorem2() -> Outcome {
    let diag = e_table(30, 30).diagonal();
    let report = verify_recurrence(
        &theorem2(),
        DataSource::Sequence {
            first_index: 1,
            values: &diag,
        },
        &Region::Indices(1..=27),
    )
    .unwrap();
    outcome(
        report.all_zero(),
        format!(
            "{} residuals checked, witness {:?}",
            report.points_checked, report.witness
        ),
    )
}

fn c6_rediscovery() -> Outcome {
    let start = Instant::now();
    let t = e_table(40, 40);
    let diag = t.diagonal();
    let uni = guess_univariate(
        &diag,
        Var::N,
        1,
        &GuessSpec::univariate(3, 7).with_margin(DIAGONAL_MARGIN),
    );
    let bi = guess_bivariate(&t, &GuessSpec::bivariate(4, 4, 3), Var::M);
    let elapsed = start.elapsed();
    let uni_ok = uni == GuessOutcome::Found(theorem2());
    let bi_ok = bi == GuessOutcome::Found(theorem1());
    outcome(
        uni_ok && bi_ok && within(elapsed, 300),
        format!("diagonal {uni_ok}, table {bi_ok}, {elapsed:.2?}"),
    )
}

fn c7_fast_evaluation() -> Outcome {
    let n = 5u32;
    let t = e_table(200, n);
    let initial: Vec<Rational> = (1..=4).map(|m| t.get(m, n).unwrap().clone()).collect();
    let params = Assignment::new().with(Var::N, int(n.into()));
    let mut peak = 0;
    for m in 1..=200u32 {
        let (v, trace) = eval_forward_traced(&theorem1(), &params, &initial, 1, m.into()).unwrap();
        peak = peak.max(trace.peak_window);
        if &v != t.get(m, n).unwrap() {
            return outcome(false, format!("E({m},{n}) differs"));
        }
    }
    // m = 0 is the boundary value itself
    let zero_ok = t.get(0, n) == Some(&int(0));
    outcome(
        zero_ok && peak <= 4,
        format!("E(1..=200, 5) match, peak window {peak}"),
    )
}

fn c8_simple_closed_form() -> Outcome {
    let bad = (1..=30u32)
        .flat_map(|m| (1..=30u32).map(move |n| (m, n)))
        .find(|&(m, n)| simple_win_probability(m, n) != Ok(rat(m.into(), (m + n).into())));
    outcome(bad.is_none(), format!("first mismatch {bad:?}"))
}

fn c9_monte_carlo() -> Outcome {
    let start = Instant::now();
    let trials = 100_000;
    let a = simulate(&SimConfig::new(
        UrnState::new(3, 3),
        Variant::Returning,
        trials,
        42,
    ))
    .unwrap();
    let b = simulate(&SimConfig::new(
        UrnState::new(2, 3),
        Variant::Simple,
        trials,
        42,
    ))
    .unwrap();
    let elapsed = start.elapsed();
    let za = (a.win_frequency() - 0.5).abs() / a.win_std_error(0.5);
    let zm = (a.mean_rounds - 143.0 / 50.0).abs() / a.std_error_mean;
    let zb = (b.win_frequency() - 0.4).abs() / b.win_std_error(0.4);
    outcome(
        za <= SIGMAS && zm <= SIGMAS && zb <= SIGMAS && within(elapsed, 10),
        format!("z = {za:.2}, {zm:.2}, {zb:.2} in {elapsed:.2?}"),
    )
}

fn c10_oracle() -> Outcome {
    let tables: Vec<ValueTable> = [
        Quantity::ExpectedRounds,
        Quantity::SecondMoment,
        Quantity::SimpleExpected,
        Quantity::SimpleSecondMoment,
    ]
    .into_iter()
    .map(|q| ValueTable::build(q, 7, 7).unwrap())
    .collect();
    let mut checked = 0;
    for m in 0..=7u32 {
        for n in 0..=7 - m {
            let r = common::summarize(m, n, true);
            let s = common::summarize(m, n, false);
            let want = [&r.expected, &r.second_moment, &s.expected, &s.second_moment];
            for (t, w) in tables.iter().zip(want) {
                if t.get(m, n) != Some(w) {
                    return outcome(false, format!("{} differs at ({m},{n})", t.quantity()));
                }
                checked += 1;
            }
        }
    }
    outcome(true, format!("{checked} values match the game tree"))
}

fn c11_determinism() -> Outcome {
    let runs: [&[&str]; 4] = [
        &[
            "simulate", "--m", "3", "--n", "3", "--trials", "100000", "--seed", "42",
        ],
        &["expect", "--m", "3", "--n", "3"],
        &[
            "table",
            "--quantity",
            "expected_rounds",
            "--max-m",
            "6",
            "--max-n",
            "6",
        ],
        &["verify", "--theorem", "2", "--up-to", "27"],
    ];
    for args in runs {
        let out: Vec<Vec<u8>> = (0..2)
            .map(|_| {
                Command::new(env!("CARGO_BIN_EXE_urn"))
                    .args(args)
                    .output()
                    .expect("binary runs")
                    .stdout
            })
            .collect();
        if out[0] != out[1] || out[0].is_empty() {
            return outcome(false, format!("{args:?} differs between runs"));
        }
    }
    outcome(true, "4 invocations repeat byte for byte")
}

fn main() {
    let criteria: [(&str, Check); 11] = [
        ("win probability is 1/2 on 1..=50", c1_probability_constancy),
        ("E(1,1), E(2,2), E(3,3)", c2_known_values),
        ("binomial identity on 1..=50", c3_identity),
        (
            "theorem 1 residuals, 0 <= m <= 26, 1 <= n <= 30",
            c4_theorem1,
        ),
        ("theorem 2 residuals, n = 1..=27", c5_theorem2),
        ("rediscovery of both recurrences", c6_rediscovery),
        ("forward evaluation along n = 5", c7_fast_evaluation),
        ("simple variant probability m/(m+n)", c8_simple_closed_form),
        ("Monte Carlo agreement", c9_monte_carlo),
        ("DP equals game-tree enumeration", c10_oracle),
        ("CLI determinism", c11_determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.pass {
            failed += 1;
        }
        println!(
            "criterion {:>2} {} {name}: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

//! The two known recurrences for the expected number of rounds `E(m,n)` of
//! the returning game, and linear-time evaluation built on them.

use num_traits::Zero;

use super::{eval_forward, Recurrence};
use crate::exact::{int, Assignment, Poly, Rational, Var};
use crate::urnproc::{Quantity, ValueTable};

/// Coefficients of `E(m,n), E(m+1,n), ..., E(m+4,n)`.
const THEOREM1: [&str; 5] = [
    "2*(m+2)*(m+1)*(2*m*n+2*m+7*n+9)*(3+m)",
    "-(3+m)*(m+2)*(14*m^2*n+6*m*n^2+14*m^2+83*m*n+21*n^2+91*m+123*n+128)",
    "(3+m)*(18*m^3*n+16*m^2*n^2+2*m*n^3+18*m^3+167*m^2*n+94*m*n^2\
     +7*n^3+169*m^2+521*m*n+132*n^2+511*m+537*n+508)",
    "-10*m^4*n-14*m^3*n^2-4*m^2*n^3-10*m^4-135*m^3*n-129*m^2*n^2-24*m*n^3-131*m^3\
     -684*m^2*n-393*m*n^2-34*n^3-639*m^2-1535*m*n-396*n^2-1380*m-1286*n-1116",
    "(3+m)*(2*m*n+2*m+5*n+7)*(n+4+m)*(n+3+m)",
];

/// Coefficients of `E(n,n), ..., E(n+3,n+3)`.
const THEOREM2: [&str; 4] = [
    "-2*(18*n^4+159*n^3+528*n^2+779*n+428)*(n+1)^2*(n+2)",
    "(n+2)*(216*n^6+2358*n^5+10485*n^4+24174*n^3+30251*n^2+19276*n+4800)",
    "-324*n^7-4032*n^6-21015*n^5-59334*n^4-97813*n^3-93898*n^2-48288*n-10080",
    "2*(n+2)*(18*n^4+87*n^3+159*n^2+128*n+36)*(2*n+5)^2",
];

fn transcribe(shift: Var, params: Vec<Var>, coefficients: &[&str]) -> Recurrence {
    let polys = coefficients
        .iter()
        .map(|c| Poly::parse(c).expect("transcribed coefficient parses"))
        .collect();
    Recurrence::new(shift, params, polys).expect("transcribed recurrence is well formed")
}

/// Order-4 recurrence in `m` (parameter `n`) in the published form.
pub fn theorem1_raw() -> Recurrence {
    transcribe(Var::M, vec![Var::N], &THEOREM1)
}

/// Order-4 recurrence in `m` for `E(m,n)`, canonical. Holds for `m >= 1`
/// and every `n >= 0`; at `m = 0` the residual is `-6(7n+9)` because the
/// boundary column is zero.
pub fn theorem1() -> Recurrence {
    theorem1_raw().canonical()
}

/// [`theorem1`] with `m` and `n` exchanged, using `E(m,n) = E(n,m)`.
pub fn theorem1_in_n() -> Recurrence {
    theorem1().swap_vars().canonical()
}

/// Order-3 recurrence in `n` for the diagonal `E(n,n)` in the published form.
pub fn theorem2_raw() -> Recurrence {
    transcribe(Var::N, vec![], &THEOREM2)
}

pub fn theorem2() -> Recurrence {
    theorem2_raw().canonical()
}

/// `E(n,n)` from `E(1,1) = 1, E(2,2) = 17/9, E(3,3) = 143/50` in `O(n)`
/// recurrence steps.
pub fn fast_diagonal(n: u32) -> Rational {
    if n == 0 {
        return Rational::zero();
    }
    let initial = [
        int(1),
        Rational::new(17.into(), 9.into()),
        Rational::new(143.into(), 50.into()),
    ];
    eval_forward(&theorem2(), &Assignment::new(), &initial, 1, n.into())
        .expect("theorem 2 leading coefficient is positive for n >= 0")
}

/// `E(m,n)` in `O(m + n)` recurrence steps with a constant number of stored
/// values: a 4x4 seed table, then [`theorem1_in_n`] up the columns
/// `m = 1..=4`, then [`theorem1`] along `m`.
pub fn fast_expected_rounds(m: u32, n: u32) -> Rational {
    if m == 0 || n == 0 {
        return Rational::zero();
    }
    let seed = ValueTable::build(Quantity::ExpectedRounds, 4, 4).expect("tiny table");
    if m <= 4 && n <= 4 {
        return seed.get(m, n).unwrap().clone();
    }
    let column: Vec<Rational> = (1..=4)
        .map(|j| {
            let initial: Vec<Rational> = (1..=4).map(|k| seed.get(j, k).unwrap().clone()).collect();
            let params = Assignment::new().with(Var::M, int(j.into()));
            eval_forward(&theorem1_in_n(), &params, &initial, 1, n.into())
                .expect("leading coefficient is positive on m, n >= 0")
        })
        .collect();
    if m <= 4 {
        return column[m as usize - 1].clone();
    }
    let params = Assignment::new().with(Var::N, int(n.into()));
    eval_forward(&theorem1(), &params, &column, 1, m.into())
        .expect("leading coefficient is positive on m, n >= 0")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders() {
        assert_eq!(theorem1().order(), 4);
        assert_eq!(theorem2().order(), 3);
        assert_eq!(theorem1().params(), &[Var::N]);
        assert!(theorem2().params().is_empty());
    }

    #[test]
    fn raw_coefficients_at_points() {
        let t1 = theorem1_raw();
        assert_eq!(t1.leading().eval(&Assignment::mn(0, 1)).unwrap(), int(720));
        assert_eq!(
            t1.coefficient(0).eval(&Assignment::mn(0, 0)).unwrap(),
            int(108)
        );
        let t2 = theorem2_raw();
        let at = Assignment::new().with(Var::N, int(0));
        assert_eq!(t2.coefficient(0).eval(&at).unwrap(), int(-1712));
    }

    #[test]
    fn transcriptions_are_already_canonical() {
        assert_eq!(theorem1(), theorem1_raw());
        assert_eq!(theorem2(), theorem2_raw());
        assert!(theorem1_in_n().is_canonical());
    }

    #[test]
    fn degrees() {
        let t1 = theorem1();
        assert!(t1
            .coefficients()
            .iter()
            .all(|c| c.degree(Var::M).unwrap() <= 4));
        assert!(t1
            .coefficients()
            .iter()
            .all(|c| c.degree(Var::N).unwrap() <= 3));
        assert!(theorem2()
            .coefficients()
            .iter()
            .all(|c| c.degree(Var::N) == Some(7)));
    }

    #[test]
    fn fast_paths_match_small_dp() {
        let t = ValueTable::build(Quantity::ExpectedRounds, 12, 12).unwrap();
        for m in 0..=12 {
            for n in 0..=12 {
                assert_eq!(
                    &fast_expected_rounds(m, n),
                    t.get(m, n).unwrap(),
                    "({m},{n})"
                );
            }
        }
        for (k, e) in t.diagonal().into_iter().enumerate() {
            assert_eq!(fast_diagonal(k as u32 + 1), e);
        }
    }
}

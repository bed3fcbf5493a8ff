use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{HolonomicError, Recurrence};
use crate::exact::{Assignment, Poly, Rational};

/// Bookkeeping from a forward evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ForwardTrace {
    /// Recurrence steps taken.
    pub steps: u64,
    /// Most sequence values held at once.
    pub peak_window: usize,
}

/// Value at `target` of the sequence whose values at
/// `start, start + 1, ..., start + order - 1` are `initial`, obtained by
/// solving the recurrence for its highest-shift term one step at a time.
///
/// Only the last `order` values are kept, as integer numerators over one
/// shared denominator that is reduced every few steps.
pub fn eval_forward(
    rec: &Recurrence,
    params: &Assignment,
    initial: &[Rational],
    start: i64,
    target: i64,
) -> Result<Rational, HolonomicError> {
    eval_forward_traced(rec, params, initial, start, target).map(|(v, _)| v)
}

pub fn eval_forward_traced(
    rec: &Recurrence,
    params: &Assignment,
    initial: &[Rational],
    start: i64,
    target: i64,
) -> Result<(Rational, ForwardTrace), HolonomicError> {
    let r = rec.order();
    if initial.len() != r {
        return Err(HolonomicError::InitialLength {
            expected: r,
            got: initial.len(),
        });
    }
    if target < start {
        return Err(HolonomicError::TargetBeforeStart { start, target });
    }
    let shift = rec.shift();
    let mut trace = ForwardTrace {
        steps: 0,
        peak_window: r,
    };
    if target < start + r as i64 {
        return Ok((initial[(target - start) as usize].clone(), trace));
    }
    // coefficients as polynomials in the shift variable alone
    let coefs: Vec<Poly> = rec
        .coefficients()
        .iter()
        .map(|c| {
            rec.params().iter().try_fold(c.clone(), |acc, &v| {
                let value = params
                    .get(v)
                    .ok_or(crate::exact::ExactError::MissingVariable(v))?;
                Ok::<_, HolonomicError>(acc.specialize(v, value))
            })
        })
        .collect::<Result<_, _>>()?;
    // window values are `nums[i] / den`, with `den > 0` shared
    let mut den = initial
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let mut nums: VecDeque<BigInt> = initial
        .iter()
        .map(|v| v.numer() * (&den / v.denom()))
        .collect();
    let mut k = start;
    while k + (r as i64) <= target {
        let cs = integer_coefficients(&coefs, shift, k);
        let lead = &cs[r];
        if lead.is_zero() {
            return Err(HolonomicError::SingularStep {
                var: shift,
                index: k,
            });
        }
        let mut acc = BigInt::zero();
        for (c, v) in cs[..r].iter().zip(&nums) {
            if !c.is_zero() && !v.is_zero() {
                acc += c * v;
            }
        }
        nums.pop_front();
        for v in nums.iter_mut() {
            *v *= lead;
        }
        nums.push_back(-acc);
        den *= lead;
        if den.is_negative() {
            den = -den;
            for v in nums.iter_mut() {
                *v = -&*v;
            }
        }
        trace.steps += 1;
        if trace.steps.is_multiple_of(REDUCE_EVERY) {
            reduce(&mut nums, &mut den);
        }
        trace.peak_window = trace.peak_window.max(nums.len());
        k += 1;
    }
    Ok((Rational::new(nums.pop_back().unwrap(), den), trace))
}

/// Steps between common-factor reductions of the window.
const REDUCE_EVERY: u64 = 8;

/// Coefficients at `k`, scaled by a common positive factor to integers.
fn integer_coefficients(coefs: &[Poly], shift: crate::exact::Var, k: i64) -> Vec<BigInt> {
    let values: Vec<Rational> = coefs.iter().map(|c| c.eval_univariate(shift, k)).collect();
    let l = values
        .iter()
        .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    values
        .iter()
        .map(|v| v.numer() * (&l / v.denom()))
        .collect()
}

fn reduce(nums: &mut VecDeque<BigInt>, den: &mut BigInt) {
    let g = nums.iter().fold(den.clone(), |acc, v| acc.gcd(v));
    if !g.is_one() {
        for v in nums.iter_mut() {
            *v /= &g;
        }
        *den /= &g;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, Var};

    fn fibonacci() -> Recurrence {
        let p = |s: &str| Poly::parse(s).unwrap();
        Recurrence::new(Var::N, vec![], vec![p("-1"), p("-1"), p("1")]).unwrap()
    }

    #[test]
    fn fibonacci_values() {
        let none = Assignment::new();
        let init = [int(0), int(1)];
        assert_eq!(
            eval_forward(&fibonacci(), &none, &init, 0, 10).unwrap(),
            int(55)
        );
        assert_eq!(
            eval_forward(&fibonacci(), &none, &init, 0, 1).unwrap(),
            int(1)
        );
        assert_eq!(
            eval_forward(&fibonacci(), &none, &init, 0, 0).unwrap(),
            int(0)
        );
        let (v, trace) = eval_forward_traced(&fibonacci(), &none, &init, 0, 90).unwrap();
        assert_eq!(v.to_string(), "2880067194370816120");
        assert_eq!(trace.steps, 89);
        assert_eq!(trace.peak_window, 2);
    }

    #[test]
    fn argument_errors() {
        let none = Assignment::new();
        assert_eq!(
            eval_forward(&fibonacci(), &none, &[int(0)], 0, 5),
            Err(HolonomicError::InitialLength {
                expected: 2,
                got: 1
            })
        );
        assert!(matches!(
            eval_forward(&fibonacci(), &none, &[int(0), int(1)], 3, 2),
            Err(HolonomicError::TargetBeforeStart { .. })
        ));
    }

    #[test]
    fn singular_step_is_reported() {
        // (n - 3) a(n+1) = a(n) cannot be solved for a(4)
        let p = |s: &str| Poly::parse(s).unwrap();
        let rec = Recurrence::new(Var::N, vec![], vec![p("-1"), p("n - 3")]).unwrap();
        let err = eval_forward(&rec, &Assignment::new(), &[int(1)], 1, 10).unwrap_err();
        assert_eq!(
            err,
            HolonomicError::SingularStep {
                var: Var::N,
                index: 3
            }
        );
    }

    #[test]
    fn missing_parameter() {
        let p = |s: &str| Poly::parse(s).unwrap();
        let rec = Recurrence::new(Var::M, vec![Var::N], vec![p("-n"), p("1")]).unwrap();
        assert!(eval_forward(&rec, &Assignment::new(), &[int(1)], 0, 4).is_err());
        let at = Assignment::new().with(Var::N, int(2));
        assert_eq!(eval_forward(&rec, &at, &[int(1)], 0, 4).unwrap(), int(16));
    }
}

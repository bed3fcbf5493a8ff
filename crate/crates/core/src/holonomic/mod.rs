//! Linear recurrences with polynomial coefficients.
//!
//! A [`Recurrence`] in shift variable `s` with coefficients `c_0..c_r` states
//! `sum_i c_i(point) * a(point + i * e_s) = 0`, where `e_s` is the unit step
//! in `s` and the coefficients may also depend on a parameter variable.

mod forward;
mod guess;
mod theorems;
mod verify;

pub use forward::{eval_forward, eval_forward_traced, ForwardTrace};
pub use guess::{guess_bivariate, guess_univariate, GuessOutcome, GuessSpec};
pub use theorems::{
    fast_diagonal, fast_expected_rounds, theorem1, theorem1_in_n, theorem1_raw, theorem2,
    theorem2_raw,
};
pub use verify::{verify_recurrence, DataSource, Region, VerificationReport, Witness};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{Assignment, ExactError, Poly, Rational, Var};
use crate::urnproc::ValueTable;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HolonomicError {
    #[error("leading coefficient vanishes at {var} = {index}")]
    SingularStep { var: Var, index: i64 },
    #[error("expected {expected} initial values, got {got}")]
    InitialLength { expected: usize, got: usize },
    #[error("target index {target} lies before the first initial index {start}")]
    TargetBeforeStart { start: i64, target: i64 },
    #[error("no data at ({m},{n}), needed by the recurrence")]
    InsufficientData { m: i64, n: i64 },
    #[error("invalid recurrence: {0}")]
    Invalid(String),
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// `sum_{i=0}^{r} c_i * a(point + i)` along `shift`, `c_r` not identically zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Recurrence {
    shift: Var,
    params: Vec<Var>,
    order: usize,
    coefficients: Vec<Poly>,
}

#[derive(Deserialize)]
struct RecurrenceRecord {
    shift: Var,
    params: Vec<Var>,
    order: usize,
    coefficients: Vec<Poly>,
}

impl<'de> Deserialize<'de> for Recurrence {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = RecurrenceRecord::deserialize(d)?;
        if r.coefficients.len() != r.order + 1 {
            return Err(serde::de::Error::custom(format!(
                "order {} needs {} coefficients, got {}",
                r.order,
                r.order + 1,
                r.coefficients.len()
            )));
        }
        Recurrence::new(r.shift, r.params, r.coefficients).map_err(serde::de::Error::custom)
    }
}

impl Recurrence {
    pub fn new(
        shift: Var,
        params: Vec<Var>,
        coefficients: Vec<Poly>,
    ) -> Result<Self, HolonomicError> {
        if coefficients.len() < 2 {
            return Err(HolonomicError::Invalid("order must be at least one".into()));
        }
        if coefficients.last().unwrap().is_zero() {
            return Err(HolonomicError::Invalid(
                "highest-shift coefficient is zero".into(),
            ));
        }
        if params.contains(&shift) {
            return Err(HolonomicError::Invalid(format!(
                "{shift} cannot be both shift and parameter"
            )));
        }
        for c in &coefficients {
            for (e, _) in c.terms() {
                let stray = [Var::M, Var::N]
                    .into_iter()
                    .find(|&v| e[v.index()] > 0 && v != shift && !params.contains(&v));
                if let Some(v) = stray {
                    return Err(HolonomicError::Invalid(format!(
                        "coefficient uses {v}, which is neither shift nor parameter"
                    )));
                }
            }
        }
        Ok(Self {
            shift,
            params,
            order: coefficients.len() - 1,
            coefficients,
        })
    }

    pub fn shift(&self) -> Var {
        self.shift
    }

    pub fn params(&self) -> &[Var] {
        &self.params
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn coefficients(&self) -> &[Poly] {
        &self.coefficients
    }

    pub fn coefficient(&self, i: usize) -> &Poly {
        &self.coefficients[i]
    }

    pub fn leading(&self) -> &Poly {
        &self.coefficients[self.order]
    }

    /// Largest total degree over all coefficients.
    pub fn total_degree(&self) -> u32 {
        self.coefficients
            .iter()
            .filter_map(Poly::total_degree)
            .max()
            .unwrap_or(0)
    }

    /// Scale so that all coefficients are integers with joint content one and
    /// the lexicographically leading term of `c_r` is positive.
    pub fn canonical(&self) -> Self {
        let lcm = self
            .coefficients
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(&c.denominator_lcm()));
        let scaled: Vec<Poly> = self
            .coefficients
            .iter()
            .map(|c| c.scale(&Rational::from_integer(lcm.clone())))
            .collect();
        let content = scaled
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(&c.numerator_gcd()));
        let mut factor = Rational::new(BigInt::one(), content);
        if self.leading().leading_term().unwrap().1.is_negative() {
            factor = -factor;
        }
        Self {
            shift: self.shift,
            params: self.params.clone(),
            order: self.order,
            coefficients: scaled.iter().map(|c| c.scale(&factor)).collect(),
        }
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical() == *self
    }

    /// The same recurrence with the roles of `m` and `n` exchanged.
    pub fn swap_vars(&self) -> Self {
        Self {
            shift: self.shift.other(),
            params: self.params.iter().map(|v| v.other()).collect(),
            order: self.order,
            coefficients: self.coefficients.iter().map(Poly::swap_vars).collect(),
        }
    }

    /// Coefficients evaluated at a point.
    pub fn coefficients_at(&self, at: &Assignment) -> Result<Vec<Rational>, HolonomicError> {
        Ok(self
            .coefficients
            .iter()
            .map(|c| c.eval(at))
            .collect::<Result<_, _>>()?)
    }

    /// `sum_i c_i(point) * values[i]` for the `order + 1` consecutive values
    /// starting at `point`.
    pub fn residual(
        &self,
        at: &Assignment,
        values: &[&Rational],
    ) -> Result<Rational, HolonomicError> {
        assert_eq!(values.len(), self.order + 1);
        let cs = self.coefficients_at(at)?;
        Ok(cs
            .iter()
            .zip(values)
            .filter(|(c, v)| !c.is_zero() && !v.is_zero())
            .fold(Rational::zero(), |acc, (c, v)| acc + c * *v))
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("recurrences always serialize")
    }
}

impl fmt::Display for Recurrence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.shift.name();
        for (i, c) in self.coefficients.iter().enumerate() {
            if i > 0 {
                f.write_str("\n  + ")?;
            }
            let at = if i == 0 {
                s.to_string()
            } else {
                format!("{s}+{i}")
            };
            write!(f, "({c}) * a({at})")?;
        }
        f.write_str(" = 0")
    }
}

/// Values at `(1,1), (2,2), ...` of a table.
pub fn diagonal(table: &ValueTable) -> Vec<Rational> {
    table.diagonal()
}

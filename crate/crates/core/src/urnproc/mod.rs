//! Dynamic programs over urn states `(m, n)` = (green, red).
//!
//! A round from a state holding both colours is a run of `k >= 1` balls of
//! one colour ended by a single ball of the other colour. In the returning
//! variant the ending ball goes back into the urn; in the simple variant it
//! is removed as well. Play stops once at most one colour is left.

mod table;

pub use table::{Quantity, ValueTable, DEFAULT_CELL_CAP};

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::exact::{binomial, rat, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UrnError {
    #[error("state ({m},{n}) has no defined value (no ball is ever drawn)")]
    UndefinedState { m: u32, n: u32 },
    #[error("{0}")]
    Domain(String),
    #[error("table of {cells} cells exceeds the cap of {cap}")]
    CellCap { cells: u64, cap: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    Green,
    Red,
}

impl Color {
    pub fn opposite(self) -> Color {
        match self {
            Color::Green => Color::Red,
            Color::Red => Color::Green,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Green => "green",
            Color::Red => "red",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// The ball that ends a round is put back.
    Returning,
    /// The ball that ends a round is kept out.
    Simple,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Returning => "returning",
            Variant::Simple => "simple",
        })
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "returning" => Ok(Variant::Returning),
            "simple" => Ok(Variant::Simple),
            other => Err(format!(
                "unknown variant `{other}` (expected returning or simple)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct UrnState {
    pub green: u32,
    pub red: u32,
}

impl UrnState {
    pub fn new(green: u32, red: u32) -> Self {
        Self { green, red }
    }

    pub fn count(&self, c: Color) -> u32 {
        match c {
            Color::Green => self.green,
            Color::Red => self.red,
        }
    }

    pub fn total(&self) -> u32 {
        self.green + self.red
    }

    /// True when a round can still be played.
    pub fn is_mixed(&self) -> bool {
        self.green > 0 && self.red > 0
    }

    /// `self` with `k` balls of colour `c` taken out. Panics on underflow.
    pub fn remove(self, c: Color, k: u32) -> Self {
        match c {
            Color::Green => Self::new(self.green - k, self.red),
            Color::Red => Self::new(self.green, self.red - k),
        }
    }
}

impl fmt::Display for UrnState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.green, self.red)
    }
}

/// One possible round out of a mixed state.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub run_color: Color,
    pub run_length: u32,
    pub weight: Rational,
    pub next: UrnState,
}

impl Transition {
    /// Colour of the ball that ended the round.
    pub fn ending_color(&self) -> Color {
        self.run_color.opposite()
    }
}

/// Probability that a round from `(m, n)` is exactly `k` balls of `color`
/// followed by one ball of the other colour:
/// `C(c,k) / C(m+n,k) * o / (m+n-k)`.
pub fn transition_weight(m: u32, n: u32, k: u32, color: Color) -> Result<Rational, UrnError> {
    if m == 0 || n == 0 {
        return Err(UrnError::Domain(format!(
            "no round can be played from ({m},{n}): both colours must be present"
        )));
    }
    let state = UrnState::new(m, n);
    let (c, o) = (state.count(color), state.count(color.opposite()));
    if k == 0 || k > c {
        return Err(UrnError::Domain(format!(
            "run length {k} of {color} is outside 1..={c} at ({m},{n})"
        )));
    }
    let total = u64::from(m + n);
    let ratio = Rational::new(binomial(c.into(), k.into()), binomial(total, k.into()));
    Ok(ratio * rat(o.into(), (total - u64::from(k)) as i64))
}

/// All rounds out of a mixed state, green runs first, with exact weights.
///
/// Weights are built incrementally from `C(c,k)/C(m+n,k) = prod (c-i)/(m+n-i)`.
pub fn transitions(state: UrnState, variant: Variant) -> Vec<Transition> {
    if !state.is_mixed() {
        return Vec::new();
    }
    let total = state.total();
    let mut out = Vec::with_capacity(total as usize);
    for run_color in [Color::Green, Color::Red] {
        let c = state.count(run_color);
        let o = state.count(run_color.opposite());
        let mut ratio = Rational::one();
        for k in 1..=c {
            ratio *= rat((c - k + 1).into(), (total - k + 1).into());
            let weight = &ratio * rat(o.into(), (total - k).into());
            let mut next = state.remove(run_color, k);
            if variant == Variant::Simple {
                next = next.remove(run_color.opposite(), 1);
            }
            out.push(Transition {
                run_color,
                run_length: k,
                weight,
                next,
            });
        }
    }
    out
}

/// Bottom-up table of `quantity` on `0..=max_m x 0..=max_n`, capped at
/// [`DEFAULT_CELL_CAP`] cells.
pub fn build_table(quantity: Quantity, max_m: u32, max_n: u32) -> Result<ValueTable, UrnError> {
    ValueTable::build(quantity, max_m, max_n)
}

/// Win probability (last ball green) in the returning variant.
pub fn win_probability(m: u32, n: u32) -> Result<Rational, UrnError> {
    single_value(Quantity::WinProb, m, n)
}

/// Expected number of rounds in the returning variant.
pub fn expected_rounds(m: u32, n: u32) -> Rational {
    single_value(Quantity::ExpectedRounds, m, n).expect("expectations are total")
}

/// Second moment of the round count, `E[R^2]`.
pub fn rounds_second_moment(m: u32, n: u32, variant: Variant) -> Rational {
    rounds_moments(m, n, variant).second_moment
}

/// Expected number of rounds in the simple variant.
pub fn simple_expected_rounds(m: u32, n: u32) -> Rational {
    single_value(Quantity::SimpleExpected, m, n).expect("expectations are total")
}

/// Win probability (last ball green) in the simple variant.
pub fn simple_win_probability(m: u32, n: u32) -> Result<Rational, UrnError> {
    single_value(Quantity::SimpleProb, m, n)
}

/// First two moments of the round count.
#[derive(Debug, Clone, PartialEq)]
pub struct Moments {
    pub expected: Rational,
    pub second_moment: Rational,
}

impl Moments {
    pub fn variance(&self) -> Rational {
        &self.second_moment - &self.expected * &self.expected
    }
}

pub fn rounds_moments(m: u32, n: u32, variant: Variant) -> Moments {
    let (first, second) = match variant {
        Variant::Returning => (Quantity::ExpectedRounds, Quantity::SecondMoment),
        Variant::Simple => (Quantity::SimpleExpected, Quantity::SimpleSecondMoment),
    };
    let tables = table::build_pair(first, second, m, n, DEFAULT_CELL_CAP)
        .expect("single-state tables stay under the cap");
    Moments {
        expected: tables.0.get(m, n).cloned().unwrap(),
        second_moment: tables.1.get(m, n).cloned().unwrap(),
    }
}

fn single_value(q: Quantity, m: u32, n: u32) -> Result<Rational, UrnError> {
    if m == 0 && n == 0 && q.is_probability() {
        return Err(UrnError::UndefinedState { m, n });
    }
    let t = table::build_table_capped(q, m, n, DEFAULT_CELL_CAP)?;
    Ok(t.get(m, n).cloned().expect("cell is defined"))
}

/// Checks, in exact arithmetic, that `P = 1/2` on the interior satisfies the
/// returning-variant probability recurrence at `(m, n)`:
///
/// `1/2 = 1/2 sum_{k=1}^{m-1} C(m,k)/C(m+n,k) n/(m+n-k)
///      + 1/2 sum_{k=1}^{n-1} C(n,k)/C(m+n,k) m/(m+n-k) + 1/C(m+n,n)`.
pub fn verify_trivial_identity(m: u32, n: u32) -> Result<bool, UrnError> {
    if m == 0 || n == 0 {
        return Err(UrnError::Domain(format!(
            "the identity needs m, n > 0, got ({m},{n})"
        )));
    }
    let total = u64::from(m + n);
    let half = rat(1, 2);
    let partial = |c: u32, o: u32| {
        (1..c).fold(Rational::zero(), |acc, k| {
            let b = Rational::new(binomial(c.into(), k.into()), binomial(total, k.into()));
            acc + b * rat(o.into(), (total - u64::from(k)) as i64)
        })
    };
    let rhs = &half * partial(m, n)
        + &half * partial(n, m)
        + Rational::new(BigInt::one(), binomial(total, n.into()));
    Ok(rhs == half)
}

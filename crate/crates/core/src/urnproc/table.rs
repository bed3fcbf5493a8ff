use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{transitions, Color, Transition, UrnError, UrnState, Variant};
use crate::exact::{format_rational, int, parse_rational, Rational};

/// Largest table (in cells) built unless the caller raises the cap.
pub const DEFAULT_CELL_CAP: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    WinProb,
    ExpectedRounds,
    SecondMoment,
    SimpleExpected,
    SimpleProb,
    SimpleSecondMoment,
}

impl Quantity {
    pub const ALL: [Quantity; 6] = [
        Quantity::WinProb,
        Quantity::ExpectedRounds,
        Quantity::SecondMoment,
        Quantity::SimpleExpected,
        Quantity::SimpleProb,
        Quantity::SimpleSecondMoment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Quantity::WinProb => "win_prob",
            Quantity::ExpectedRounds => "expected_rounds",
            Quantity::SecondMoment => "second_moment",
            Quantity::SimpleExpected => "simple_expected",
            Quantity::SimpleProb => "simple_prob",
            Quantity::SimpleSecondMoment => "simple_second_moment",
        }
    }

    pub fn variant(self) -> Variant {
        match self {
            Quantity::WinProb | Quantity::ExpectedRounds | Quantity::SecondMoment => {
                Variant::Returning
            }
            _ => Variant::Simple,
        }
    }

    /// Probabilities are undefined at the empty urn.
    pub fn is_probability(self) -> bool {
        matches!(self, Quantity::WinProb | Quantity::SimpleProb)
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.name() == s)
            .ok_or_else(|| {
                let names: Vec<_> = Quantity::ALL.iter().map(|q| q.name()).collect();
                format!(
                    "unknown quantity `{s}` (expected one of {})",
                    names.join(", ")
                )
            })
    }
}

/// Exact values of one quantity on the rectangle `0..=max_m x 0..=max_n`.
///
/// Every cell is filled; the only `None` is the empty urn `(0,0)` for the
/// probability quantities.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueTable {
    quantity: Quantity,
    max_m: u32,
    max_n: u32,
    values: Vec<Option<Rational>>,
}

#[derive(Serialize, Deserialize)]
struct TableRecord {
    quantity: Quantity,
    max_m: u32,
    max_n: u32,
    values: Vec<Option<String>>,
}

impl ValueTable {
    pub fn build(quantity: Quantity, max_m: u32, max_n: u32) -> Result<Self, UrnError> {
        build_table_capped(quantity, max_m, max_n, DEFAULT_CELL_CAP)
    }

    pub fn build_capped(
        quantity: Quantity,
        max_m: u32,
        max_n: u32,
        cap: u64,
    ) -> Result<Self, UrnError> {
        build_table_capped(quantity, max_m, max_n, cap)
    }

    pub fn quantity(&self) -> Quantity {
        self.quantity
    }

    pub fn max_m(&self) -> u32 {
        self.max_m
    }

    pub fn max_n(&self) -> u32 {
        self.max_n
    }

    /// `None` when out of range or undefined.
    pub fn get(&self, m: u32, n: u32) -> Option<&Rational> {
        if m > self.max_m || n > self.max_n {
            return None;
        }
        self.values[self.index(m, n)].as_ref()
    }

    /// Values at `(1,1), (2,2), ...` up to the smaller bound.
    pub fn diagonal(&self) -> Vec<Rational> {
        (1..=self.max_m.min(self.max_n))
            .map(|k| self.get(k, k).cloned().expect("diagonal cells are defined"))
            .collect()
    }

    fn index(&self, m: u32, n: u32) -> usize {
        m as usize * (self.max_n as usize + 1) + n as usize
    }

    /// `{"quantity", "max_m", "max_n", "values"}` with `values` row-major
    /// (index `m * (max_n + 1) + n`) as `"p/q"` strings; `null` marks an
    /// undefined cell.
    pub fn to_json(&self) -> serde_json::Value {
        let record = TableRecord {
            quantity: self.quantity,
            max_m: self.max_m,
            max_n: self.max_n,
            values: self
                .values
                .iter()
                .map(|v| v.as_ref().map(format_rational))
                .collect(),
        };
        serde_json::to_value(record).expect("table records always serialize")
    }

    pub fn from_json(value: serde_json::Value) -> Result<Self, String> {
        let record: TableRecord = serde_json::from_value(value).map_err(|e| e.to_string())?;
        let cells = (record.max_m as usize + 1) * (record.max_n as usize + 1);
        if record.values.len() != cells {
            return Err(format!(
                "expected {cells} values for a {}x{} table, got {}",
                record.max_m,
                record.max_n,
                record.values.len()
            ));
        }
        let values = record
            .values
            .iter()
            .map(|v| v.as_deref().map(parse_rational).transpose())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| e.to_string())?;
        Ok(Self {
            quantity: record.quantity,
            max_m: record.max_m,
            max_n: record.max_n,
            values,
        })
    }

    /// Header `m,n,value`, one row per cell in row-major order.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,n,value\n");
        for m in 0..=self.max_m {
            for n in 0..=self.max_n {
                let v = self.get(m, n).map(format_rational).unwrap_or_default();
                out.push_str(&format!("{m},{n},{v}\n"));
            }
        }
        out
    }
}

pub(super) fn build_table_capped(
    quantity: Quantity,
    max_m: u32,
    max_n: u32,
    cap: u64,
) -> Result<ValueTable, UrnError> {
    check_cap(max_m, max_n, cap)?;
    let variant = quantity.variant();
    let values = match quantity {
        Quantity::WinProb | Quantity::SimpleProb => fill_probability(max_m, max_n, variant),
        Quantity::ExpectedRounds | Quantity::SimpleExpected => {
            fill_expectation(max_m, max_n, variant)
        }
        Quantity::SecondMoment | Quantity::SimpleSecondMoment => {
            let first = fill_expectation(max_m, max_n, variant);
            fill_second_moment(max_m, max_n, variant, &first)
        }
    };
    Ok(ValueTable {
        quantity,
        max_m,
        max_n,
        values,
    })
}

/// Expectation and second-moment tables sharing one expectation pass.
pub(super) fn build_pair(
    first: Quantity,
    second: Quantity,
    max_m: u32,
    max_n: u32,
    cap: u64,
) -> Result<(ValueTable, ValueTable), UrnError> {
    check_cap(max_m, max_n, cap)?;
    let variant = first.variant();
    let e = fill_expectation(max_m, max_n, variant);
    let m2 = fill_second_moment(max_m, max_n, variant, &e);
    let wrap = |quantity, values| ValueTable {
        quantity,
        max_m,
        max_n,
        values,
    };
    Ok((wrap(first, e), wrap(second, m2)))
}

fn check_cap(max_m: u32, max_n: u32, cap: u64) -> Result<(), UrnError> {
    let cells = (u64::from(max_m) + 1) * (u64::from(max_n) + 1);
    if cells > cap {
        return Err(UrnError::CellCap { cells, cap });
    }
    Ok(())
}

/// Read access to the part of a table filled so far.
#[derive(Clone, Copy)]
struct Cells<'a> {
    values: &'a [Option<Rational>],
    width: usize,
}

impl<'a> Cells<'a> {
    fn get(&self, s: UrnState) -> Option<&'a Rational> {
        self.values[s.green as usize * self.width + s.red as usize].as_ref()
    }
}

/// Row-major bottom-up fill: every successor `(m', n')` of `(m, n)` has
/// `m' <= m`, `n' <= n` and `(m', n') != (m, n)`, so it is already computed.
fn fill<B, I>(
    max_m: u32,
    max_n: u32,
    variant: Variant,
    boundary: B,
    mut interior: I,
) -> Vec<Option<Rational>>
where
    B: Fn(UrnState) -> Option<Rational>,
    I: FnMut(&[Transition], Cells<'_>) -> Rational,
{
    let width = max_n as usize + 1;
    let mut values: Vec<Option<Rational>> = Vec::with_capacity((max_m as usize + 1) * width);
    for m in 0..=max_m {
        for n in 0..=max_n {
            let state = UrnState::new(m, n);
            let v = if state.is_mixed() {
                let ts = transitions(state, variant);
                Some(interior(
                    &ts,
                    Cells {
                        values: &values,
                        width,
                    },
                ))
            } else {
                boundary(state)
            };
            values.push(v);
        }
    }
    values
}

fn fill_probability(max_m: u32, max_n: u32, variant: Variant) -> Vec<Option<Rational>> {
    let boundary = |s: UrnState| match (s.green, s.red) {
        (0, 0) => None,
        (_, 0) => Some(Rational::one()),
        _ => Some(Rational::zero()),
    };
    fill(max_m, max_n, variant, boundary, |ts, value| {
        let mut acc = Rational::zero();
        for t in ts {
            // only the simple variant can empty the urn; the last ball drawn
            // is then the one that ended the round
            let p = if t.next.total() == 0 {
                if t.ending_color() == Color::Green {
                    Rational::one()
                } else {
                    Rational::zero()
                }
            } else {
                value
                    .get(t.next)
                    .expect("nonempty states are defined")
                    .clone()
            };
            if !p.is_zero() {
                acc += &t.weight * p;
            }
        }
        acc
    })
}

fn fill_expectation(max_m: u32, max_n: u32, variant: Variant) -> Vec<Option<Rational>> {
    fill(
        max_m,
        max_n,
        variant,
        |_| Some(Rational::zero()),
        |ts, value| {
            let mut acc = Rational::one();
            for t in ts {
                let e = value.get(t.next).unwrap();
                if !e.is_zero() {
                    acc += &t.weight * e;
                }
            }
            acc
        },
    )
}

/// `M2(s) = sum_t w_t (1 + 2 E(next_t) + M2(next_t))`.
fn fill_second_moment(
    max_m: u32,
    max_n: u32,
    variant: Variant,
    expectation: &[Option<Rational>],
) -> Vec<Option<Rational>> {
    let width = max_n as usize + 1;
    let two = int(2);
    fill(
        max_m,
        max_n,
        variant,
        |_| Some(Rational::zero()),
        |ts, value| {
            let mut acc = Rational::one();
            for t in ts {
                let e = expectation[t.next.green as usize * width + t.next.red as usize]
                    .as_ref()
                    .unwrap();
                let m2 = value.get(t.next).unwrap();
                if !e.is_zero() || !m2.is_zero() {
                    acc += &t.weight * (&two * e + m2);
                }
            }
            acc
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn win_prob_table_is_half_inside() {
        let t = ValueTable::build(Quantity::WinProb, 3, 3).unwrap();
        for m in 0..=3 {
            for n in 0..=3 {
                let expected = match (m, n) {
                    (0, 0) => None,
                    (_, 0) => Some(int(1)),
                    (0, _) => Some(int(0)),
                    _ => Some(rat(1, 2)),
                };
                assert_eq!(t.get(m, n).cloned(), expected, "({m},{n})");
            }
        }
    }

    #[test]
    fn expected_rounds_small_tables() {
        let t = ValueTable::build(Quantity::ExpectedRounds, 1, 1).unwrap();
        assert_eq!(t.get(1, 1), Some(&int(1)));
        assert_eq!(t.get(1, 0), Some(&int(0)));
        assert_eq!(t.get(0, 1), Some(&int(0)));
        assert_eq!(t.get(0, 0), Some(&int(0)));
        let t = ValueTable::build(Quantity::ExpectedRounds, 3, 3).unwrap();
        assert_eq!(t.diagonal(), vec![int(1), rat(17, 9), rat(143, 50)]);
        assert_eq!(t.get(4, 0), None);
    }

    #[test]
    fn cell_cap() {
        let err = ValueTable::build_capped(Quantity::ExpectedRounds, 9, 9, 99).unwrap_err();
        assert_eq!(
            err,
            UrnError::CellCap {
                cells: 100,
                cap: 99
            }
        );
        assert!(ValueTable::build_capped(Quantity::ExpectedRounds, 9, 9, 100).is_ok());
        assert!(ValueTable::build(Quantity::WinProb, 100_000, 100_000).is_err());
    }

    #[test]
    fn simple_probability_closed_form() {
        let t = ValueTable::build(Quantity::SimpleProb, 12, 12).unwrap();
        for m in 0..=12u32 {
            for n in 0..=12u32 {
                if m + n > 0 {
                    assert_eq!(t.get(m, n), Some(&rat(m.into(), (m + n).into())));
                }
            }
        }
    }

    #[test]
    fn json_and_csv() {
        let t = ValueTable::build(Quantity::WinProb, 1, 2).unwrap();
        let j = t.to_json();
        assert_eq!(
            j.to_string(),
            r#"{"max_m":1,"max_n":2,"quantity":"win_prob","values":[null,"0","0","1","1/2","1/2"]}"#
        );
        assert_eq!(ValueTable::from_json(j).unwrap(), t);
        assert_eq!(
            t.to_csv(),
            "m,n,value\n0,0,\n0,1,0\n0,2,0\n1,0,1\n1,1,1/2\n1,2,1/2\n"
        );
        let bad =
            serde_json::json!({"quantity": "win_prob", "max_m": 1, "max_n": 1, "values": ["1"]});
        assert!(ValueTable::from_json(bad).is_err());
    }

    #[test]
    fn quantity_names_round_trip() {
        for q in Quantity::ALL {
            assert_eq!(q.name().parse::<Quantity>().unwrap(), q);
            assert_eq!(
                serde_json::to_string(&q).unwrap(),
                format!("\"{}\"", q.name())
            );
        }
        assert!("nope".parse::<Quantity>().is_err());
    }

    #[test]
    fn variances_are_nonnegative() {
        for (e, m2) in [
            (Quantity::ExpectedRounds, Quantity::SecondMoment),
            (Quantity::SimpleExpected, Quantity::SimpleSecondMoment),
        ] {
            let (te, tm) = build_pair(e, m2, 10, 10, DEFAULT_CELL_CAP).unwrap();
            for m in 0..=10 {
                for n in 0..=10 {
                    let ev = te.get(m, n).unwrap();
                    let var = tm.get(m, n).unwrap() - ev * ev;
                    assert!(var >= Rational::zero(), "({m},{n})");
                }
            }
        }
    }
}

use std::ops::RangeInclusive;

use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;

use super::{HolonomicError, Recurrence};
use crate::exact::{format_rational, int, Assignment, Rational, Var};
use crate::urnproc::ValueTable;

/// Where the values a recurrence is checked against come from.
#[derive(Debug, Clone, Copy)]
pub enum DataSource<'a> {
    /// A bivariate table indexed by `(m, n)`.
    Table(&'a ValueTable),
    /// A sequence whose first element has index `first_index`; the index is
    /// the recurrence's shift variable.
    Sequence {
        first_index: i64,
        values: &'a [Rational],
    },
}

/// Starting points at which residuals are evaluated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Region {
    Rect {
        m: RangeInclusive<i64>,
        n: RangeInclusive<i64>,
    },
    Indices(RangeInclusive<i64>),
}

impl Region {
    fn points(&self, shift: Var) -> Vec<(i64, i64)> {
        match self {
            Region::Rect { m, n } => m
                .clone()
                .flat_map(|i| n.clone().map(move |j| (i, j)))
                .collect(),
            Region::Indices(k) => k
                .clone()
                .map(|i| match shift {
                    Var::M => (i, 0),
                    Var::N => (0, i),
                })
                .collect(),
        }
    }
}

/// A point with a nonzero residual.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub m: i64,
    pub n: i64,
    pub residual: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub points_checked: usize,
    /// The first failing point in region order, if any.
    pub witness: Option<Witness>,
}

impl VerificationReport {
    pub fn all_zero(&self) -> bool {
        self.witness.is_none()
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "points_checked": self.points_checked,
            "all_zero": self.all_zero(),
            "witness": self.witness.as_ref().map(|w| json!({
                "m": w.m,
                "n": w.n,
                "residual": format_rational(&w.residual),
            })),
        })
    }
}

fn lookup<'a>(data: &DataSource<'a>, m: i64, n: i64, shift: Var) -> Option<&'a Rational> {
    match *data {
        DataSource::Table(t) => {
            let (m, n) = (u32::try_from(m).ok()?, u32::try_from(n).ok()?);
            t.get(m, n)
        }
        DataSource::Sequence {
            first_index,
            values,
        } => {
            let k = match shift {
                Var::M => m,
                Var::N => n,
            };
            let at = usize::try_from(k - first_index).ok()?;
            values.get(at)
        }
    }
}

/// Exact residual of `rec` at `(m, n)`, or the first missing cell it needs.
pub(super) fn residual_at(
    rec: &Recurrence,
    data: &DataSource<'_>,
    m: i64,
    n: i64,
) -> Result<Rational, HolonomicError> {
    let shift = rec.shift();
    let mut values = Vec::with_capacity(rec.order() + 1);
    for i in 0..=rec.order() as i64 {
        let (pm, pn) = match shift {
            Var::M => (m + i, n),
            Var::N => (m, n + i),
        };
        values.push(
            lookup(data, pm, pn, shift).ok_or(HolonomicError::InsufficientData { m: pm, n: pn })?,
        );
    }
    let at = match data {
        DataSource::Table(_) => Assignment::mn(m, n),
        DataSource::Sequence { .. } => match shift {
            Var::M => Assignment::new().with(Var::M, int(m)),
            Var::N => Assignment::new().with(Var::N, int(n)),
        },
    };
    rec.residual(&at, &values)
}

/// Evaluates `sum_i c_i(point) * data(point + i)` at every point of `region`.
pub fn verify_recurrence(
    rec: &Recurrence,
    data: DataSource<'_>,
    region: &Region,
) -> Result<VerificationReport, HolonomicError> {
    if matches!(data, DataSource::Sequence { .. }) && !rec.params().is_empty() {
        return Err(HolonomicError::Invalid(
            "a sequence cannot supply values for recurrence parameters".into(),
        ));
    }
    let points = region.points(rec.shift());
    let residuals: Vec<Result<Rational, HolonomicError>> = points
        .par_iter()
        .map(|&(m, n)| residual_at(rec, &data, m, n))
        .collect();
    let mut witness = None;
    for (&(m, n), r) in points.iter().zip(residuals) {
        let r = r?;
        if witness.is_none() && !r.is_zero() {
            witness = Some(Witness { m, n, residual: r });
        }
    }
    Ok(VerificationReport {
        points_checked: points.len(),
        witness,
    })
}

//! Recurrence discovery: fit unknown polynomial coefficients to data by an
//! exact nullspace computation, then confirm on held-out points.

use num_traits::{One, Zero};
use rayon::prelude::*;

use super::Recurrence;
use crate::exact::{int, Assignment, Matrix, Poly, Rational, Var};
use crate::urnproc::ValueTable;

/// Fitting equations used beyond the number of unknowns, when available.
const FIT_SLACK: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GuessSpec {
    pub order_max: usize,
    /// Degree bound in the shift variable.
    pub deg_shift: u32,
    /// Degree bound in the parameter; ignored for sequences.
    pub deg_param: u32,
    /// Number of fitting equations; by default the unknown count plus a small
    /// slack, capped so that `confirmation_margin` points stay held out.
    pub fit_equations: Option<usize>,
    pub confirmation_margin: usize,
}

impl GuessSpec {
    pub const DEFAULT_MARGIN: usize = 20;

    pub fn univariate(order_max: usize, degree: u32) -> Self {
        Self::bivariate(order_max, degree, 0)
    }

    pub fn bivariate(order_max: usize, deg_shift: u32, deg_param: u32) -> Self {
        Self {
            order_max,
            deg_shift,
            deg_param,
            fit_equations: None,
            confirmation_margin: Self::DEFAULT_MARGIN,
        }
    }

    pub fn with_margin(mut self, margin: usize) -> Self {
        self.confirmation_margin = margin;
        self
    }

    pub fn with_fit_equations(mut self, count: usize) -> Self {
        self.fit_equations = Some(count);
        self
    }

    fn monomials(&self, bivariate: bool) -> usize {
        let p = if bivariate {
            self.deg_param as usize + 1
        } else {
            1
        };
        (self.deg_shift as usize + 1) * p
    }

    /// Unknown coefficient count at a given order.
    pub fn unknowns(&self, order: usize, bivariate: bool) -> usize {
        (order + 1) * self.monomials(bivariate)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GuessOutcome {
    Found(Recurrence),
    NotFound,
    /// Too few data points for `order`: fitting needs `unknowns` equations
    /// plus the confirmation margin, only `equations` exist.
    InsufficientData {
        order: usize,
        unknowns: usize,
        equations: usize,
    },
}

impl GuessOutcome {
    pub fn recurrence(&self) -> Option<&Recurrence> {
        match self {
            GuessOutcome::Found(r) => Some(r),
            _ => None,
        }
    }
}

/// The shape of the data being fitted.
struct Problem<'a> {
    shift: Var,
    param: Option<Var>,
    /// Starting points `(shift index, param value)` in fitting order.
    points: Vec<(i64, i64)>,
    value: Box<dyn Fn(i64, i64) -> Option<&'a Rational> + Sync + 'a>,
}

impl Problem<'_> {
    /// Exponent pairs `(shift degree, param degree)` in column order.
    fn exponents(&self, spec: &GuessSpec) -> Vec<(u32, u32)> {
        let dp = if self.param.is_some() {
            spec.deg_param
        } else {
            0
        };
        (0..=spec.deg_shift)
            .flat_map(|j| (0..=dp).map(move |l| (j, l)))
            .collect()
    }

    fn exponent(&self, j: u32, l: u32) -> [u32; 2] {
        let mut e = [0; 2];
        e[self.shift.index()] = j;
        if let Some(p) = self.param {
            e[p.index()] = l;
        }
        e
    }

    fn usable(&self, order: usize) -> Vec<(i64, i64)> {
        self.points
            .iter()
            .copied()
            .filter(|&(s, p)| (0..=order as i64).all(|i| (self.value)(s + i, p).is_some()))
            .collect()
    }

    fn row(&self, order: usize, exps: &[(u32, u32)], (s, p): (i64, i64)) -> Vec<Rational> {
        let (s_r, p_r) = (int(s), int(p));
        let monos: Vec<Rational> = exps
            .iter()
            .map(|&(j, l)| {
                num_traits::pow(s_r.clone(), j as usize) * num_traits::pow(p_r.clone(), l as usize)
            })
            .collect();
        let mut row = Vec::with_capacity((order + 1) * exps.len());
        for i in 0..=order as i64 {
            let a = (self.value)(s + i, p).expect("usable point");
            row.extend(monos.iter().map(|x| x * a));
        }
        row
    }

    fn coefficients(&self, order: usize, exps: &[(u32, u32)], v: &[Rational]) -> Vec<Poly> {
        v.chunks(exps.len())
            .take(order + 1)
            .map(|chunk| {
                Poly::from_terms(
                    exps.iter()
                        .zip(chunk)
                        .filter(|(_, c)| !c.is_zero())
                        .map(|(&(j, l), c)| (self.exponent(j, l), c.clone())),
                )
            })
            .collect()
    }

    fn holds_at(&self, coefs: &[Poly], (s, p): (i64, i64)) -> bool {
        let mut at = Assignment::new().with(self.shift, int(s));
        if let Some(v) = self.param {
            at = at.with(v, int(p));
        }
        let total = coefs
            .iter()
            .enumerate()
            .fold(Rational::zero(), |acc, (i, c)| {
                let a = (self.value)(s + i as i64, p).expect("usable point");
                acc + c.eval(&at).expect("all variables assigned") * a
            });
        total.is_zero()
    }

    fn guess(&self, spec: &GuessSpec) -> GuessOutcome {
        let exps = self.exponents(spec);
        for order in 1..=spec.order_max {
            let unknowns = spec.unknowns(order, self.param.is_some());
            let points = self.usable(order);
            let available = points.len().saturating_sub(spec.confirmation_margin);
            let fit = spec
                .fit_equations
                .unwrap_or(unknowns + FIT_SLACK)
                .min(available);
            if spec.confirmation_margin == 0 || fit < unknowns {
                return GuessOutcome::InsufficientData {
                    order,
                    unknowns,
                    equations: points.len(),
                };
            }
            let (fitting, held_out) = points.split_at(fit);
            let rows: Vec<Vec<Rational>> = fitting
                .par_iter()
                .map(|&pt| self.row(order, &exps, pt))
                .collect();
            let basis = Matrix::from_rows(rows, unknowns).nullspace();
            for v in candidates(basis, order, &exps) {
                let coefs = self.coefficients(order, &exps, &v);
                if !held_out.par_iter().all(|&pt| self.holds_at(&coefs, pt)) {
                    continue;
                }
                if let Some(rec) = self.trimmed(coefs) {
                    return GuessOutcome::Found(rec.canonical());
                }
            }
        }
        GuessOutcome::NotFound
    }

    /// Drops vanishing coefficients at both ends, re-indexing so that the
    /// lowest surviving term sits at shift zero.
    fn trimmed(&self, coefs: Vec<Poly>) -> Option<Recurrence> {
        let lo = coefs.iter().position(|c| !c.is_zero())?;
        let hi = coefs.iter().rposition(|c| !c.is_zero())?;
        if lo == hi {
            return None;
        }
        let kept = coefs[lo..=hi]
            .iter()
            .map(|c| c.shift(self.shift, -(lo as i64)))
            .collect();
        Recurrence::new(self.shift, self.param.into_iter().collect(), kept).ok()
    }
}

/// Nullspace vectors reduced so that each has a distinct leading column under
/// the priority (shift index, total degree, exponent), ordered from the
/// smallest leading column. The first is the minimal recurrence in the span.
fn candidates(
    mut basis: Vec<Vec<Rational>>,
    order: usize,
    exps: &[(u32, u32)],
) -> Vec<Vec<Rational>> {
    let width = exps.len();
    let mut priority: Vec<usize> = (0..(order + 1) * width).collect();
    priority.sort_by_key(|&c| {
        let (j, l) = exps[c % width];
        std::cmp::Reverse((c / width, j + l, j, l))
    });
    let mut lead = Vec::with_capacity(basis.len());
    let mut done = 0;
    for (rank, &c) in priority.iter().enumerate() {
        let Some(p) = (done..basis.len()).find(|&i| !basis[i][c].is_zero()) else {
            continue;
        };
        basis.swap(done, p);
        let inv = Rational::one() / &basis[done][c];
        let pivot: Vec<Rational> = basis[done].iter().map(|x| x * &inv).collect();
        for (i, row) in basis.iter_mut().enumerate() {
            if i != done && !row[c].is_zero() {
                let f = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &f * y;
                }
            }
        }
        basis[done] = pivot;
        lead.push(rank);
        done += 1;
        if done == basis.len() {
            break;
        }
    }
    let mut ordered: Vec<(usize, Vec<Rational>)> = lead.into_iter().zip(basis).collect();
    ordered.sort_by_key(|(rank, _)| std::cmp::Reverse(*rank));
    ordered.into_iter().map(|(_, v)| v).collect()
}

/// Searches for a recurrence `sum_i c_i(k) a(k+i) = 0` satisfied by `seq`,
/// where `seq[0]` is `a(first_index)` and `k` is written as `shift`.
pub fn guess_univariate(
    seq: &[Rational],
    shift: Var,
    first_index: i64,
    spec: &GuessSpec,
) -> GuessOutcome {
    let last = first_index + seq.len() as i64 - 1;
    let problem = Problem {
        shift,
        param: None,
        points: (first_index..=last).map(|k| (k, 0)).collect(),
        value: Box::new(move |k, _| {
            usize::try_from(k - first_index)
                .ok()
                .and_then(|i| seq.get(i))
        }),
    };
    problem.guess(spec)
}

/// Searches for a recurrence in `shift` with coefficients polynomial in both
/// variables. Equations come from points with both coordinates at least one,
/// taken in order of `m + n` so the smallest values are fitted first.
pub fn guess_bivariate(table: &ValueTable, spec: &GuessSpec, shift: Var) -> GuessOutcome {
    let (max_s, max_p) = match shift {
        Var::M => (table.max_m() as i64, table.max_n() as i64),
        Var::N => (table.max_n() as i64, table.max_m() as i64),
    };
    let mut points: Vec<(i64, i64)> = (1..=max_s)
        .flat_map(|s| (1..=max_p).map(move |p| (s, p)))
        .collect();
    points.sort_by_key(|&(s, p)| (s + p, s));
    let problem = Problem {
        shift,
        param: Some(shift.other()),
        points,
        value: Box::new(move |s, p| {
            let (m, n) = match shift {
                Var::M => (s, p),
                Var::N => (p, s),
            };
            table.get(u32::try_from(m).ok()?, u32::try_from(n).ok()?)
        }),
    };
    problem.guess(spec)
}

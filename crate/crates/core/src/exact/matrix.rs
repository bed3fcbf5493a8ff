use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::rational::Rational;
use super::ExactError;

/// Dense row-major matrix of rationals.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    entries: Vec<Rational>,
}

/// Fraction-free reduced echelon form of an integer matrix.
///
/// Every pivot entry equals `pivot_value`; row `i` has its pivot in column
/// `pivots[i]`, and all other pivot columns of that row are zero.
struct Echelon {
    rows: Vec<Vec<BigInt>>,
    pivots: Vec<usize>,
    pivot_value: BigInt,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Rational>) -> Result<Self, ExactError> {
        if entries.len() != rows * cols {
            return Err(ExactError::Shape {
                expected: rows * cols,
                got: entries.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            entries,
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Rational::zero(); rows * cols],
        }
    }

    /// Panics if the rows have different lengths.
    pub fn from_rows(rows: Vec<Vec<Rational>>, cols: usize) -> Self {
        let n = rows.len();
        let mut entries = Vec::with_capacity(n * cols);
        for row in rows {
            assert_eq!(row.len(), cols, "ragged matrix row");
            entries.extend(row);
        }
        Self {
            rows: n,
            cols,
            entries,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Rational) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[Rational] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn mul_vec(&self, v: &[Rational]) -> Vec<Rational> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .filter(|(a, x)| !a.is_zero() && !x.is_zero())
                    .fold(Rational::zero(), |acc, (a, x)| acc + a * x)
            })
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.echelon().pivots.len()
    }

    /// Basis of `{ v : self * v = 0 }`, one vector per non-pivot column.
    ///
    /// Each basis vector is a primitive integer vector whose entry at its own
    /// free column is positive and whose entries at the other free columns are
    /// zero, so the basis is determined by the matrix alone.
    pub fn nullspace(&self) -> Vec<Vec<Rational>> {
        let ech = self.echelon();
        let mut is_pivot = vec![false; self.cols];
        for &p in &ech.pivots {
            is_pivot[p] = true;
        }
        let mut basis = Vec::new();
        for free in (0..self.cols).filter(|&c| !is_pivot[c]) {
            let mut v = vec![BigInt::zero(); self.cols];
            v[free] = ech.pivot_value.clone();
            for (row, &p) in ech.rows.iter().zip(&ech.pivots) {
                v[p] = -&row[free];
            }
            let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
            if v[free].is_negative() {
                for x in &mut v {
                    *x = -&*x;
                }
            }
            basis.push(
                v.into_iter()
                    .map(|x| Rational::from_integer(x / &g))
                    .collect(),
            );
        }
        basis
    }

    /// Each row scaled by the lcm of its denominators.
    fn integer_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| {
                let row = self.row(i);
                let l = row.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
                row.iter().map(|x| x.numer() * (&l / x.denom())).collect()
            })
            .collect()
    }

    /// Fraction-free Gauss-Jordan elimination. Each update
    /// `a[i][j] <- (p * a[i][j] - a[i][c] * a[r][j]) / prev` divides exactly
    /// because every entry is a minor of the integer input.
    fn echelon(&self) -> Echelon {
        let mut a = self.integer_rows();
        let nrows = a.len();
        let mut prev = BigInt::one();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..self.cols {
            if r == nrows {
                break;
            }
            let Some(p) = (r..nrows)
                .filter(|&i| !a[i][c].is_zero())
                .min_by_key(|&i| (a[i][c].bits(), i))
            else {
                continue;
            };
            a.swap(r, p);
            let (head, tail) = a.split_at_mut(r);
            let (pivot_row, below) = tail.split_first_mut().unwrap();
            let piv = pivot_row[c].clone();
            for (i, row) in head.iter_mut().chain(below.iter_mut()).enumerate() {
                let above = i < r;
                let f = std::mem::take(&mut row[c]);
                let from = if above { 0 } else { c + 1 };
                for j in from..self.cols {
                    if j == c {
                        continue;
                    }
                    let mut x = &piv * &row[j];
                    if !f.is_zero() && !pivot_row[j].is_zero() {
                        x -= &f * &pivot_row[j];
                    }
                    if !prev.is_one() {
                        debug_assert!((&x % &prev).is_zero());
                        x /= &prev;
                    }
                    row[j] = x;
                }
            }
            prev = piv;
            pivots.push(c);
            r += 1;
        }
        a.truncate(r);
        Echelon {
            rows: a,
            pivots,
            pivot_value: prev,
        }
    }
}

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::rational::{int, Rational};
use super::ExactError;

/// The two urn variables. The order `(m, n)` is the exponent-vector order
/// everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Var {
    M,
    N,
}

impl Var {
    pub fn index(self) -> usize {
        match self {
            Var::M => 0,
            Var::N => 1,
        }
    }

    pub fn other(self) -> Var {
        match self {
            Var::M => Var::N,
            Var::N => Var::M,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::M => "m",
            Var::N => "n",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "m" => Ok(Var::M),
            "n" => Ok(Var::N),
            other => Err(format!("unknown variable `{other}` (expected m or n)")),
        }
    }
}

/// Exponents of `(m, n)`.
pub type Exponent = [u32; 2];

/// Values for some of the variables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Assignment {
    values: [Option<Rational>; 2],
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn mn(m: i64, n: i64) -> Self {
        Self::new().with(Var::M, int(m)).with(Var::N, int(n))
    }

    pub fn with(mut self, var: Var, value: Rational) -> Self {
        self.values[var.index()] = Some(value);
        self
    }

    pub fn get(&self, var: Var) -> Option<&Rational> {
        self.values[var.index()].as_ref()
    }
}

/// Sparse polynomial over the rationals in `m` and `n`.
///
/// No stored coefficient is zero, so structural equality is polynomial
/// equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Exponent, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial([0, 0], c)
    }

    pub fn var(v: Var) -> Self {
        let mut exp = [0, 0];
        exp[v.index()] = 1;
        Self::monomial(exp, Rational::one())
    }

    pub fn monomial(exp: Exponent, coef: Rational) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coef);
        p
    }

    pub fn from_terms<I: IntoIterator<Item = (Exponent, Rational)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (exp, coef) in terms {
            p.add_term(exp, coef);
        }
        p
    }

    pub fn add_term(&mut self, exp: Exponent, coef: Rational) {
        if coef.is_zero() {
            return;
        }
        let slot = self.terms.entry(exp).or_insert_with(Rational::zero);
        *slot += coef;
        if slot.is_zero() {
            self.terms.remove(&exp);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, exp: Exponent) -> Rational {
        self.terms.get(&exp).cloned().unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending lexicographic exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Exponent, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// The term with the lexicographically greatest exponent vector.
    pub fn leading_term(&self) -> Option<(&Exponent, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn degree(&self, v: Var) -> Option<u32> {
        self.terms.keys().map(|e| e[v.index()]).max()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1]).max()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(e, a)| (*e, a * c)).collect(),
        }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Exact evaluation. Only variables that actually occur must be assigned.
    pub fn eval(&self, at: &Assignment) -> Result<Rational, ExactError> {
        let mut used = [false, false];
        for e in self.terms.keys() {
            used[0] |= e[0] > 0;
            used[1] |= e[1] > 0;
        }
        let zero = Rational::zero();
        let mut point = [&zero, &zero];
        for v in [Var::M, Var::N] {
            if used[v.index()] {
                point[v.index()] = at.get(v).ok_or(ExactError::MissingVariable(v))?;
            }
        }
        let mut acc = Rational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (x, k) in point.iter().zip(e) {
                if *k > 0 {
                    t *= num_traits::pow::pow((*x).clone(), *k as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Substitute a value for one variable, leaving a polynomial in the other.
    pub fn specialize(&self, v: Var, value: &Rational) -> Self {
        let i = v.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[i] = 0;
            out.add_term(rest, c * num_traits::pow::pow(value.clone(), e[i] as usize));
        }
        out
    }

    /// Evaluate a polynomial in a single variable `v` at an integer point by
    /// Horner's rule. Panics if the other variable occurs.
    pub fn eval_univariate(&self, v: Var, at: i64) -> Rational {
        let i = v.index();
        let deg = self.degree(v).unwrap_or(0);
        let mut dense = vec![Rational::zero(); deg as usize + 1];
        for (e, c) in &self.terms {
            assert_eq!(e[1 - i], 0, "polynomial is not univariate in {v}");
            dense[e[i] as usize] = c.clone();
        }
        let x = int(at);
        dense
            .into_iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * &x + c)
    }

    /// Exchange the roles of `m` and `n`.
    pub fn swap_vars(&self) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(e, c)| ([e[1], e[0]], c.clone()))
                .collect(),
        }
    }

    /// Substitute `v -> v + shift`.
    pub fn shift(&self, v: Var, shift: i64) -> Self {
        let i = v.index();
        let moved = Poly::var(v) + Poly::constant(int(shift));
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[i] = 0;
            out = out + &Poly::monomial(rest, c.clone()) * &moved.pow(e[i]);
        }
        out
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Gcd of the numerators; meaningful once all coefficients are integers.
    pub fn numerator_gcd(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c.numer()))
    }

    /// Parse a polynomial written with `+ - * ^`, parentheses, integer
    /// literals and the variables `m` and `n`, e.g. `2*(m+2)*(2*m*n+7*n+9)`.
    pub fn parse(text: &str) -> Result<Self, ExactError> {
        let mut parser = Parser {
            src: text.as_bytes(),
            pos: 0,
        };
        let p = parser.expr()?;
        parser.skip_ws();
        if parser.pos != parser.src.len() {
            return Err(parser.error("unexpected trailing input"));
        }
        Ok(p)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (e, c)) in self.terms.iter().rev().enumerate() {
            let mag = c.abs();
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut parts = Vec::new();
            if !mag.is_one() || (e[0] == 0 && e[1] == 0) {
                parts.push(mag.to_string());
            }
            for (name, k) in ["m", "n"].iter().zip(e) {
                match k {
                    0 => {}
                    1 => parts.push(name.to_string()),
                    k => parts.push(format!("{name}^{k}")),
                }
            }
            f.write_str(&parts.join("*"))?;
        }
        Ok(())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(mut self, rhs: Poly) -> Poly {
        for (e, c) in rhs.terms {
            self.add_term(e, c);
        }
        self
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        self.clone() + rhs.clone()
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(),
        }
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        self + (-rhs)
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        self.clone() - rhs.clone()
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1]], ca * cb);
            }
        }
        out
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    exp: Exponent,
    #[serde(with = "super::rational::rational_str")]
    coef: Rational,
}

/// JSON form: list of `{"exp": [e_m, e_n], "coef": "p/q"}`, exponents in
/// descending lexicographic order.
impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let records: Vec<TermRecord> = self
            .terms
            .iter()
            .rev()
            .map(|(e, c)| TermRecord {
                exp: *e,
                coef: c.clone(),
            })
            .collect();
        records.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let records = Vec::<TermRecord>::deserialize(d)?;
        Ok(Poly::from_terms(
            records.into_iter().map(|r| (r.exp, r.coef)),
        ))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, msg: &str) -> ExactError {
        ExactError::BadPoly {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<Poly, ExactError> {
        let mut acc = self.term()?;
        while let Some(op @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if op == b'+' { acc + rhs } else { acc - rhs };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly, ExactError> {
        let mut acc = self.unary()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = acc * self.unary()?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Poly, ExactError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let k = self.integer()?;
            let k = u32::try_from(k).map_err(|_| self.error("exponent out of range"))?;
            return Ok(base.pow(k));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ExactError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        Ok(digits.parse().unwrap())
    }

    fn atom(&mut self) -> Result<Poly, ExactError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(b'm') => {
                self.pos += 1;
                Ok(Poly::var(Var::M))
            }
            Some(b'n') => {
                self.pos += 1;
                Ok(Poly::var(Var::N))
            }
            Some(c) if c.is_ascii_digit() => {
                let k = self.integer()?;
                Ok(Poly::constant(Rational::from_integer(k)))
            }
            _ => Err(self.error("expected `(`, a variable or an integer")),
        }
    }
}

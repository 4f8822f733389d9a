//! Lattice generators and transition matrices with exact entries.
//!
//! An entry is a finite sum of terms `q·√d·πᵏ` with `q` rational and `d`
//! squarefree. Such sums are zero only when every coefficient is, so an
//! entry is rational exactly when its only term has `d = 1, k = 0`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::domain::DomainSpec;
use crate::error::{NshError, Result};

/// Largest squarefree radicand kept after a product.
pub const RADICAND_LIMIT: u64 = 1_000_000_000_000;

const MAX_EXPONENT: i64 = 64;
const MAX_DEPTH: usize = 64;
const MAX_TERMS: usize = 256;
const MAX_BITS: u64 = 1 << 16;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ExactReal {
    /// `(radicand, power of π) -> coefficient`, no zero coefficients.
    terms: BTreeMap<(u64, i32), BigRational>,
}

/// `n = s²·d` with `d` squarefree, returned as `(s, d)`.
fn squarefree_split(mut n: u64) -> (u64, u64) {
    let (mut s, mut d) = (1u64, 1u64);
    let mut p = 2u64;
    while p * p <= n {
        let mut e = 0;
        while n.is_multiple_of(p) {
            n /= p;
            e += 1;
        }
        s *= p.pow(e / 2);
        if e % 2 == 1 {
            d *= p;
        }
        p += if p == 2 { 1 } else { 2 };
    }
    (s, d * n)
}

impl ExactReal {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::rational(BigRational::one())
    }

    pub fn integer(n: i64) -> Self {
        Self::rational(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn rational(q: BigRational) -> Self {
        Self::term(q, 1, 0)
    }

    pub fn fraction(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(NshError::Exact("division by zero".into()));
        }
        Ok(Self::rational(BigRational::new(num.into(), den.into())))
    }

    /// `√n`, reduced so that the radicand is squarefree.
    pub fn sqrt(n: u64) -> Result<Self> {
        if n > RADICAND_LIMIT {
            return Err(NshError::Exact(format!("radicand {n} exceeds {RADICAND_LIMIT}")));
        }
        let (s, d) = squarefree_split(n);
        Ok(Self::term(BigRational::from_integer(BigInt::from(s)), d, 0))
    }

    pub fn pi() -> Self {
        Self::term(BigRational::one(), 1, 1)
    }

    fn term(q: BigRational, radicand: u64, pi: i32) -> Self {
        let mut terms = BTreeMap::new();
        if !q.is_zero() && radicand != 0 {
            terms.insert((radicand, pi), q);
        }
        Self { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_rational(&self) -> bool {
        self.terms.keys().all(|&k| k == (1, 0))
    }

    pub fn as_rational(&self) -> Option<BigRational> {
        if self.is_rational() {
            Some(self.terms.get(&(1, 0)).cloned().unwrap_or_else(BigRational::zero))
        } else {
            None
        }
    }

    pub fn is_integer(&self) -> bool {
        self.as_rational().is_some_and(|q| q.is_integer())
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(&(d, k), q)| q.to_f64().unwrap_or(f64::NAN) * (d as f64).sqrt() * std::f64::consts::PI.powi(k))
            .sum()
    }

    pub fn neg(&self) -> Self {
        Self {
            terms: self.terms.iter().map(|(k, q)| (*k, -q)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (k, q) in &other.terms {
            let sum = terms.get(k).cloned().unwrap_or_else(BigRational::zero) + q;
            if sum.is_zero() {
                terms.remove(k);
            } else {
                terms.insert(*k, sum);
            }
        }
        Self { terms }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero();
        for (&(d1, k1), q1) in &self.terms {
            for (&(d2, k2), q2) in &other.terms {
                let g = d1.gcd(&d2);
                let d = (d1 / g) as u128 * (d2 / g) as u128;
                if d > RADICAND_LIMIT as u128 {
                    return Err(NshError::Exact(format!("radicand {d} exceeds {RADICAND_LIMIT}")));
                }
                let k = k1
                    .checked_add(k2)
                    .filter(|k| k.abs() as i64 <= MAX_EXPONENT)
                    .ok_or_else(|| NshError::Exact("power of pi out of range".into()))?;
                let q = q1 * q2 * BigRational::from_integer(BigInt::from(g));
                if q.numer().bits() + q.denom().bits() > MAX_BITS {
                    return Err(NshError::Exact("coefficient too large".into()));
                }
                out = out.add(&Self::term(q, d as u64, k));
            }
        }
        if out.terms.len() > MAX_TERMS {
            return Err(NshError::Exact(format!("more than {MAX_TERMS} terms")));
        }
        Ok(out)
    }

    /// Reciprocal of a single term; sums of several terms are not inverted.
    pub fn recip(&self) -> Result<Self> {
        let mut it = self.terms.iter();
        match (it.next(), it.next()) {
            (None, _) => Err(NshError::Exact("division by zero".into())),
            (Some((&(d, k), q)), None) => {
                let den = q * BigRational::from_integer(BigInt::from(d));
                Ok(Self::term(den.recip(), d, -k))
            }
            _ => Err(NshError::Exact(format!("cannot divide by the sum `{self}`"))),
        }
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.mul(&other.recip()?)
    }

    fn pow(&self, e: i64) -> Result<Self> {
        if e.abs() > MAX_EXPONENT {
            return Err(NshError::Exact(format!("exponent {e} out of range")));
        }
        let mut acc = Self::one();
        for _ in 0..e.abs() {
            acc = acc.mul(self)?;
        }
        if e < 0 {
            acc.recip()
        } else {
            Ok(acc)
        }
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (&(d, k), q)) in self.terms.iter().enumerate() {
            if q.is_negative() {
                write!(f, "-")?;
            } else if i > 0 {
                write!(f, "+")?;
            }
            let a = q.abs();
            let mut parts = Vec::new();
            if !a.is_one() || (d == 1 && k == 0) {
                parts.push(a.to_string());
            }
            if d != 1 {
                parts.push(format!("sqrt{d}"));
            }
            match k {
                0 => {}
                1 => parts.push("pi".into()),
                _ => parts.push(format!("pi^{k}")),
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    depth: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Self {
            src,
            chars: src.chars().collect(),
            pos: 0,
            depth: 0,
        }
    }

    fn err(&self, what: &str) -> NshError {
        NshError::Parse(format!("{what} at offset {} in `{}`", self.pos, self.src))
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn eat_word(&mut self, w: &str) -> bool {
        self.skip_ws();
        let end = self.pos + w.chars().count();
        if end <= self.chars.len() && self.chars[self.pos..end].iter().copied().eq(w.chars()) {
            self.pos = end;
            true
        } else {
            false
        }
    }

    fn unsigned(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected an integer"));
        }
        if matches!(self.chars.get(self.pos), Some('.' | 'e' | 'E')) {
            return Err(NshError::Exact(format!(
                "floating-point entry in `{}` has no exact meaning; write it as a fraction or radical",
                self.src
            )));
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().map_err(|_| self.err("integer too large"))
    }

    fn matrix(&mut self) -> Result<Vec<Vec<ExactReal>>> {
        self.expect('[')?;
        let mut rows = vec![self.row()?];
        while self.eat(',') {
            rows.push(self.row()?);
        }
        self.expect(']')?;
        if self.peek().is_some() {
            return Err(self.err("trailing input"));
        }
        Ok(rows)
    }

    fn row(&mut self) -> Result<Vec<ExactReal>> {
        self.expect('[')?;
        let mut row = vec![self.expr()?];
        while self.eat(',') {
            row.push(self.expr()?);
        }
        self.expect(']')?;
        Ok(row)
    }

    fn expr(&mut self) -> Result<ExactReal> {
        let mut acc = self.product()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.product()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.product()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn product(&mut self) -> Result<ExactReal> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?)?;
            } else if self.eat('/') {
                acc = acc.div(&self.unary()?)?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<ExactReal> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.err("expression nested too deeply"));
        }
        let v = self.unary_inner();
        self.depth -= 1;
        v
    }

    fn unary_inner(&mut self) -> Result<ExactReal> {
        if self.eat('-') {
            Ok(self.unary()?.neg())
        } else if self.eat('+') {
            self.unary()
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<ExactReal> {
        let base = self.atom()?;
        if self.eat('^') {
            let neg = self.eat('-');
            let e = self.unsigned()?;
            let e = i64::try_from(e).map_err(|_| self.err("exponent too large"))?;
            base.pow(if neg { -e } else { e })
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ExactReal> {
        match self.peek() {
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                self.expect(')')?;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.unsigned()?;
                let n = i64::try_from(n).map_err(|_| self.err("integer too large"))?;
                Ok(ExactReal::integer(n))
            }
            Some('√') => {
                self.pos += 1;
                self.radicand()
            }
            Some(_) if self.eat_word("sqrt") => self.radicand(),
            Some(_) if self.eat_word("pi") || self.eat_word("π") => Ok(ExactReal::pi()),
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }

    fn radicand(&mut self) -> Result<ExactReal> {
        let n = if self.eat('(') {
            let n = self.unsigned()?;
            self.expect(')')?;
            n
        } else {
            self.unsigned()?
        };
        ExactReal::sqrt(n)
    }
}

/// Parse a single exact expression such as `8*pi` or `sqrt3/2`.
pub fn parse_exact(s: &str) -> Result<ExactReal> {
    let mut p = Parser::new(s);
    let v = p.expr()?;
    if p.peek().is_some() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

/// Square matrix with exact entries, stored row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactMatrix {
    n: usize,
    entries: Vec<ExactReal>,
}

impl ExactMatrix {
    pub fn from_rows(rows: Vec<Vec<ExactReal>>) -> Result<Self> {
        let n = rows.len();
        if n == 0 || rows.iter().any(|r| r.len() != n) {
            return Err(NshError::MalformedGenerators(format!(
                "expected a square matrix, got {} rows of lengths {:?}",
                n,
                rows.iter().map(Vec::len).collect::<Vec<_>>()
            )));
        }
        Ok(Self {
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    /// Parse `"[[3/2,0],[0,1]]"`, `"[[sqrt2,0],[0,1]]"`, `"[[1,1/2],[0,sqrt3/2]]"`.
    /// Entries may combine integers, `sqrtN` / `sqrt(N)` / `√N`, `pi` with
    /// `+ - * / ^` and parentheses; decimal literals are rejected.
    pub fn parse(s: &str) -> Result<Self> {
        Self::from_rows(Parser::new(s).matrix()?)
    }

    pub fn identity(n: usize) -> Self {
        let entries = (0..n * n)
            .map(|i| if i / n == i % n { ExactReal::one() } else { ExactReal::zero() })
            .collect();
        Self { n, entries }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &ExactReal {
        &self.entries[i * self.n + j]
    }

    fn minor(&self, row: usize, col: usize) -> Self {
        let n = self.n;
        let entries = (0..n * n)
            .filter(|k| k / n != row && k % n != col)
            .map(|k| self.entries[k].clone())
            .collect();
        Self { n: n - 1, entries }
    }

    pub fn det(&self) -> Result<ExactReal> {
        if self.n == 1 {
            return Ok(self.entries[0].clone());
        }
        let mut acc = ExactReal::zero();
        for j in 0..self.n {
            let a = self.get(0, j);
            if a.is_zero() {
                continue;
            }
            let t = a.mul(&self.minor(0, j).det()?)?;
            acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
        }
        Ok(acc)
    }

    /// Inverse by the adjugate; the determinant must be a single term.
    pub fn inverse(&self) -> Result<Self> {
        let det = self.det()?;
        if det.is_zero() {
            return Err(NshError::SingularGenerators(0.0));
        }
        let inv_det = det.recip()?;
        let n = self.n;
        if n == 1 {
            return Ok(Self { n, entries: vec![inv_det] });
        }
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = self.minor(j, i).det()?;
                let c = if (i + j) % 2 == 0 { c } else { c.neg() };
                entries.push(c.mul(&inv_det)?);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(NshError::LengthMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let n = self.n;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = ExactReal::zero();
                for k in 0..n {
                    acc = acc.add(&self.get(i, k).mul(other.get(k, j))?);
                }
                entries.push(acc);
            }
        }
        Ok(Self { n, entries })
    }

    pub fn is_rational(&self) -> bool {
        self.entries.iter().all(ExactReal::is_rational)
    }

    pub fn is_integer(&self) -> bool {
        self.entries.iter().all(ExactReal::is_integer)
    }

    pub fn to_f64_rows(&self) -> Vec<Vec<f64>> {
        self.entries.chunks(self.n).map(|r| r.iter().map(ExactReal::to_f64).collect()).collect()
    }
}

impl fmt::Display for ExactMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.entries.chunks(self.n).enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for (j, e) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{e}")?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Lattice generated by the columns of an exact matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LatticeSpec {
    generators: ExactMatrix,
}

impl LatticeSpec {
    pub fn new(generators: ExactMatrix) -> Result<Self> {
        if generators.det()?.is_zero() {
            return Err(NshError::SingularGenerators(0.0));
        }
        Ok(Self { generators })
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::new(ExactMatrix::parse(s)?)
    }

    pub fn generators(&self) -> &ExactMatrix {
        &self.generators
    }

    /// `M` with `(h₁′, …, hₙ′) = (h₁, …, hₙ) M`.
    pub fn transition_to(&self, other: &LatticeSpec) -> Result<ExactMatrix> {
        self.generators.inverse()?.mul(&other.generators)
    }

    pub fn to_domain(&self, stretch: f64) -> Result<DomainSpec> {
        let rows = self.generators.to_f64_rows();
        let n = rows.len();
        let cols: Vec<Vec<f64>> = (0..n).map(|j| (0..n).map(|i| rows[i][j]).collect()).collect();
        DomainSpec::skew_torus(&cols, stretch)
    }
}

/// True iff `M` and `M⁻¹` are both integer matrices, so the two generator
/// sets span the same lattice.
pub fn lattice_same(m: &ExactMatrix) -> Result<bool> {
    if let Some((i, e)) = m.entries.iter().enumerate().find(|(_, e)| !e.is_rational()) {
        return Err(NshError::Exact(format!(
            "entry ({}, {}) = {e} is irrational; the same-lattice test needs rational entries",
            i / m.n,
            i % m.n
        )));
    }
    let det = m.det()?;
    if det.is_zero() {
        return Err(NshError::SingularGenerators(0.0));
    }
    Ok(m.is_integer() && det.as_rational().is_some_and(|d| d.abs().is_one()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DistinctnessVerdict {
    /// `(row, column)` of every irrational entry.
    pub irrational_entries: Vec<[usize; 2]>,
    /// An irrational entry is present, which suffices for the two entire
    /// solutions to be essentially different.
    pub sufficient_condition_holds: bool,
}

pub fn distinctness_condition(m: &ExactMatrix) -> DistinctnessVerdict {
    let irrational_entries: Vec<[usize; 2]> = m
        .entries
        .iter()
        .enumerate()
        .filter(|(_, e)| !e.is_rational())
        .map(|(i, _)| [i / m.n, i % m.n])
        .collect();
    DistinctnessVerdict {
        sufficient_condition_holds: !irrational_entries.is_empty(),
        irrational_entries,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(s: &str) -> ExactMatrix {
        ExactMatrix::parse(s).unwrap()
    }

    #[test]
    fn squarefree_reduction() {
        assert_eq!(squarefree_split(72), (6, 2));
        assert_eq!(squarefree_split(1), (1, 1));
        assert_eq!(squarefree_split(97), (1, 97));
        assert_eq!(ExactReal::sqrt(12).unwrap().to_string(), "2*sqrt3");
        assert!(ExactReal::sqrt(49).unwrap().is_integer());
        assert!(ExactReal::sqrt(0).unwrap().is_zero());
    }

    #[test]
    fn radical_products_cancel() {
        let s2 = ExactReal::sqrt(2).unwrap();
        let s6 = ExactReal::sqrt(6).unwrap();
        assert_eq!(s2.mul(&s2).unwrap(), ExactReal::integer(2));
        assert_eq!(s2.mul(&s6).unwrap(), ExactReal::sqrt(12).unwrap());
        let x = s2.add(&ExactReal::one());
        assert_eq!(x.sub(&s2), ExactReal::one());
        assert_eq!(s2.recip().unwrap().to_string(), "1/2*sqrt2");
    }

    #[test]
    fn parse_and_display_round_trip() {
        for s in ["[[3/2,0],[0,1]]", "[[sqrt2,0],[0,1]]", "[[1,1/2],[0,1/2*sqrt3]]", "[[2*pi,-1],[1+sqrt5,pi^-2]]"] {
            let a = m(s);
            assert_eq!(m(&a.to_string()), a, "{s}");
        }
        assert_eq!(m("[[√2]]"), m("[[sqrt(2)]]"));
        assert_eq!(m("[[ (1 + 1) ^ 3 / 4 ]]"), m("[[2]]"));
        assert_eq!(parse_exact("8*pi").unwrap().to_f64(), 8.0 * std::f64::consts::PI);
        assert!(parse_exact("8*pi]").is_err());
    }

    #[test]
    fn floats_and_garbage_are_rejected() {
        assert!(matches!(ExactMatrix::parse("[[1.5,0],[0,1]]"), Err(NshError::Exact(_))));
        assert!(matches!(ExactMatrix::parse("[[1e3]]"), Err(NshError::Exact(_))));
        assert!(ExactMatrix::parse("[[1,0],[0]]").is_err());
        assert!(ExactMatrix::parse("[[1,0],[0,1]] x").is_err());
        assert!(ExactMatrix::parse("[[1/0]]").is_err());
        assert!(ExactMatrix::parse("[[1/(1+sqrt2)]]").is_err());
    }

    #[test]
    fn same_lattice_examples() {
        assert!(lattice_same(&m("[[1,1],[0,1]]")).unwrap());
        assert!(!lattice_same(&m("[[2,0],[0,1]]")).unwrap());
        assert!(lattice_same(&m("[[1,0],[0,1]]")).unwrap());
        assert!(!lattice_same(&m("[[1/2,0],[0,2]]")).unwrap());
        assert!(lattice_same(&m("[[sqrt2,0],[0,1]]")).is_err());
        assert!(lattice_same(&m("[[1,2],[2,4]]")).is_err());
    }

    #[test]
    fn distinctness_examples() {
        let v = distinctness_condition(&m("[[sqrt2,0],[0,1]]"));
        assert!(v.sufficient_condition_holds);
        assert_eq!(v.irrational_entries, vec![[0, 0]]);
        assert!(!distinctness_condition(&m("[[3/2,0],[0,1]]")).sufficient_condition_holds);
    }

    #[test]
    fn transition_between_rectangles_and_hex() {
        let square = LatticeSpec::parse("[[1,0],[0,1]]").unwrap();
        let rect = LatticeSpec::parse("[[1,0],[0,sqrt2]]").unwrap();
        let t = square.transition_to(&rect).unwrap();
        assert!(distinctness_condition(&t).sufficient_condition_holds);
        let hex = LatticeSpec::parse("[[1,1/2],[0,sqrt3/2]]").unwrap();
        let other = LatticeSpec::parse("[[1,3/2],[0,sqrt3/2]]").unwrap();
        let t = hex.transition_to(&other).unwrap();
        assert_eq!(t, m("[[1,1],[0,1]]"));
        assert!(lattice_same(&t).unwrap());
        let back = hex.generators().mul(&t).unwrap();
        assert_eq!(&back, other.generators());
        let d = hex.to_domain(1.0).unwrap();
        assert!((d.volume() - 3f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn three_dimensional_inverse() {
        let a = m("[[2,1,0],[0,1,sqrt3],[1,0,1]]");
        assert_eq!(a.det().unwrap(), m("[[2+sqrt3]]").get(0, 0).clone());
        assert!(a.inverse().is_err());
        let b = m("[[1,0,0],[0,2,0],[0,0,sqrt5]]");
        assert_eq!(b.mul(&b.inverse().unwrap()).unwrap(), ExactMatrix::identity(3));
    }
}

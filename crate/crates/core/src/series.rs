//! Exact coefficient engines.
//!
//! Exponential series are stored e.g.f.-normalized: `values[n]` is the
//! coefficient of `x^n/n!`. The reciprocal of `F_{A,B}` then has integer
//! coefficients given by the binomial convolution
//!
//! ```text
//! c_0 = 1,   c_n = sum_{a in A, a <= n} C(n,a) c_{n-a} - sum_{k in B, k <= n} C(n,k) c_{n-k}
//! ```
//!
//! No division happens anywhere on the integer paths. Rationals only show up
//! in [`certificate_product`].

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spec::ThinnedSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeriesKind {
    /// Coefficients of `x^n/n!`.
    Egf,
    /// Coefficients of `x^n`.
    Ogf,
}

/// A truncated power series with exact integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffSeq {
    kind: SeriesKind,
    values: Vec<BigInt>,
}

impl CoeffSeq {
    pub fn new(kind: SeriesKind, values: Vec<BigInt>) -> Self {
        CoeffSeq { kind, values }
    }

    pub fn egf<T: Into<BigInt>, I: IntoIterator<Item = T>>(values: I) -> Self {
        CoeffSeq::new(SeriesKind::Egf, values.into_iter().map(Into::into).collect())
    }

    pub fn ogf<T: Into<BigInt>, I: IntoIterator<Item = T>>(values: I) -> Self {
        CoeffSeq::new(SeriesKind::Ogf, values.into_iter().map(Into::into).collect())
    }

    pub fn kind(&self) -> SeriesKind {
        self.kind
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigInt> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Coefficient `n`, zero past the stored prefix.
    pub fn coeff(&self, n: usize) -> BigInt {
        self.values.get(n).cloned().unwrap_or_default()
    }

    pub fn first_negative(&self) -> Option<(usize, &BigInt)> {
        self.values.iter().enumerate().find(|(_, v)| v.is_negative())
    }

    /// OEIS b-file body: `n value` per line.
    pub fn to_bfile(&self) -> String {
        let mut out = String::new();
        for (n, v) in self.values.iter().enumerate() {
            writeln!(out, "{n} {v}").unwrap();
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,c_n\n");
        for (n, v) in self.values.iter().enumerate() {
            writeln!(out, "{n},{v}").unwrap();
        }
        out
    }

    /// JSON array of decimal strings.
    pub fn to_json(&self) -> String {
        let strings: Vec<String> = self.values.iter().map(BigInt::to_string).collect();
        serde_json::to_string(&strings).expect("strings serialize")
    }

    /// Parses a b-file; indices must run `0, 1, 2, ...`. Lines starting with
    /// `#` are comments.
    pub fn from_bfile(kind: SeriesKind, text: &str) -> Result<Self> {
        let mut values = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (idx, val) = line
                .split_once(' ')
                .ok_or_else(|| Error::InvalidSeries(format!("b-file line without separator: {line:?}")))?;
            let idx: usize = idx.parse().map_err(|_| Error::InvalidSeries(format!("bad index in {line:?}")))?;
            if idx != values.len() {
                return Err(Error::InvalidSeries(format!("expected index {}, found {idx}", values.len())));
            }
            let val: BigInt = val.trim().parse().map_err(|_| Error::InvalidSeries(format!("bad value in {line:?}")))?;
            values.push(val);
        }
        Ok(CoeffSeq { kind, values })
    }
}

/// Row `n` of Pascal's triangle, advanced one row at a time by addition.
#[derive(Clone, Debug)]
pub struct PascalRow {
    row: Vec<BigInt>,
}

impl Default for PascalRow {
    fn default() -> Self {
        PascalRow { row: vec![BigInt::one()] }
    }
}

impl PascalRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn n(&self) -> usize {
        self.row.len() - 1
    }

    pub fn advance(&mut self) {
        let n = self.row.len();
        for k in (1..n).rev() {
            let prev = self.row[k - 1].clone();
            self.row[k] += prev;
        }
        self.row.push(BigInt::one());
    }

    pub fn get(&self, k: usize) -> &BigInt {
        &self.row[k]
    }
}

/// `C(n, k)` by the multiplicative recurrence.
pub fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// `n!` for `n = 0..=max`.
pub fn factorials(max: usize) -> Vec<BigInt> {
    let mut out = Vec::with_capacity(max + 1);
    let mut acc = BigInt::one();
    out.push(acc.clone());
    for i in 1..=max {
        acc *= i;
        out.push(acc.clone());
    }
    out
}

/// e.g.f.-normalized coefficients of `F_{A,B}` up to degree `n`.
pub fn spec_series(spec: &ThinnedSpec, n: usize) -> CoeffSeq {
    CoeffSeq::egf((0..=n as u64).map(|k| BigInt::from(spec.egf_coefficient(k))))
}

/// `(c_0, ..., c_n)` with `1/F_{A,B}(x) = sum c_k x^k/k!`.
pub fn egf_reciprocal_coeffs(spec: &ThinnedSpec, n: usize) -> CoeffSeq {
    // (k, +1) for k in A, (k, -1) for k in B: the sign each C(n,k) c_{n-k} carries
    let contributions: Vec<(usize, bool)> = (1..=n)
        .filter_map(|k| match spec.egf_coefficient(k as u64) {
            -1 => Some((k, true)),
            1 => Some((k, false)),
            _ => None,
        })
        .collect();
    let mut c: Vec<BigInt> = Vec::with_capacity(n + 1);
    c.push(BigInt::one());
    let mut row = PascalRow::new();
    for m in 1..=n {
        row.advance();
        let mut acc = BigInt::zero();
        for &(k, plus) in contributions.iter().take_while(|(k, _)| *k <= m) {
            let term = row.get(k) * &c[m - k];
            if plus {
                acc += term;
            } else {
                acc -= term;
            }
        }
        c.push(acc);
    }
    CoeffSeq::egf(c)
}

/// Reciprocal of a series with constant term 1, in its own normalization.
pub fn reciprocal(seq: &CoeffSeq, n: usize) -> Result<CoeffSeq> {
    if seq.values.first().is_none_or(|v| !v.is_one()) {
        return Err(Error::InvalidSeries("reciprocal needs constant term 1".into()));
    }
    let mut out: Vec<BigInt> = Vec::with_capacity(n + 1);
    out.push(BigInt::one());
    let mut row = PascalRow::new();
    for m in 1..=n {
        if seq.kind == SeriesKind::Egf {
            row.advance();
        }
        let mut acc = BigInt::zero();
        for k in 1..=m.min(seq.len().saturating_sub(1)) {
            let a = &seq.values[k];
            if a.is_zero() {
                continue;
            }
            let mut term = a * &out[m - k];
            if seq.kind == SeriesKind::Egf {
                term *= row.get(k);
            }
            acc -= term;
        }
        out.push(acc);
    }
    Ok(CoeffSeq::new(seq.kind, out))
}

/// Ordinary reciprocal `w` with `sum_k a_k w_{n-k} = [n = 0]`.
pub fn ogf_reciprocal(a: &CoeffSeq, n: usize) -> Result<CoeffSeq> {
    if a.kind != SeriesKind::Ogf {
        return Err(Error::InvalidSeries("ogf_reciprocal needs an ordinary series".into()));
    }
    reciprocal(a, n)
}

/// Truncated product; binomial convolution for e.g.f.s.
pub fn series_product(p: &CoeffSeq, q: &CoeffSeq, n: usize) -> Result<CoeffSeq> {
    if p.kind != q.kind {
        return Err(Error::InvalidSeries("cannot multiply an e.g.f. by an o.g.f.".into()));
    }
    let mut out = Vec::with_capacity(n + 1);
    let mut row = PascalRow::new();
    for m in 0..=n {
        if m > 0 && p.kind == SeriesKind::Egf {
            row.advance();
        }
        let mut acc = BigInt::zero();
        for k in 0..=m {
            let (Some(x), Some(y)) = (p.values.get(k), q.values.get(m - k)) else {
                continue;
            };
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let mut term = x * y;
            if p.kind == SeriesKind::Egf {
                term *= row.get(k);
            }
            acc += term;
        }
        out.push(acc);
    }
    Ok(CoeffSeq::new(p.kind, out))
}

/// Ordinary coefficients of the reduced-family series
///
/// ```text
/// f_m(x) = 1 + sum_{k=1}^{2m-1} (-1)^k x^k/k! + sum_{k >= m+1} x^{2k}/(2k)!
/// ```
pub fn certificate_f(m: u32, n: usize) -> Vec<BigRational> {
    let fact = factorials(n);
    let m = m as usize;
    (0..=n)
        .map(|k| {
            let inv = BigRational::new(BigInt::one(), fact[k].clone());
            if k < 2 * m {
                if k % 2 == 1 {
                    -inv
                } else {
                    inv
                }
            } else if k > 2 * m && k % 2 == 0 {
                inv
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

/// Companion series `g`: `sum a^k x^k` for `m = 1`; for `m >= 2` the
/// exponential series through degree `2m - 1` followed by `a^k x^k`.
pub fn certificate_g(m: u32, a: &BigRational, n: usize) -> Vec<BigRational> {
    let fact = factorials(n);
    let m = m as usize;
    let mut power = BigRational::one();
    let mut out = Vec::with_capacity(n + 1);
    for k in 0..=n {
        if m >= 2 && k < 2 * m {
            out.push(BigRational::new(BigInt::one(), fact[k].clone()));
        } else {
            out.push(power.clone());
        }
        power *= a;
    }
    out
}

/// Ordinary coefficients of `f_m(x) g(x)` through degree `n`.
pub fn certificate_fg(m: u32, a: &BigRational, n: usize) -> Result<Vec<BigRational>> {
    if m == 0 {
        return Err(Error::Precondition("certificate family needs m >= 1".into()));
    }
    if !a.is_positive() {
        return Err(Error::Precondition(format!("certificate parameter a = {a} must be positive")));
    }
    let f = certificate_f(m, n);
    let g = certificate_g(m, a, n);
    let nonzero_f: Vec<(usize, &BigRational)> = f.iter().enumerate().filter(|(_, v)| !v.is_zero()).collect();
    Ok((0..=n)
        .map(|d| {
            nonzero_f
                .iter()
                .take_while(|(k, _)| *k <= d)
                .fold(BigRational::zero(), |acc, (k, fk)| acc + *fk * &g[d - k])
        })
        .collect())
}

/// Coefficients of `1 - f_m(x) g(x)` through degree `n`.
pub fn certificate_product(m: u32, a: &BigRational, n: usize) -> Result<Vec<BigRational>> {
    let fg = certificate_fg(m, a, n)?;
    Ok(fg
        .into_iter()
        .enumerate()
        .map(|(d, v)| if d == 0 { BigRational::one() - v } else { -v })
        .collect())
}

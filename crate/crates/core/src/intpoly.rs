//! Exact integer polynomials and binary forms.
//!
//! Everything here is arbitrary precision. A [`BinaryForm`] stores
//! `c_0, ..., c_d` with `F(x, y) = sum_j c_j x^(d-j) y^j`, so `c_0 = F(1, 0)`.
//! Resultants use the Sylvester matrix with the rows of the first argument
//! on top, evaluated by fraction-free (Bareiss) elimination.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nt;
use crate::polymod::PolyMod;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("polynomial must be monic")]
    NotMonic,
    #[error("discriminant needs degree >= 2, got {0}")]
    DegreeTooSmall(usize),
    #[error("binary form needs degree >= 1 and a nonzero coefficient")]
    InvalidForm,
    #[error("form is reducible: {0}")]
    Reducible(ReducibleWitness),
    #[error("cannot parse form: {0}")]
    Parse(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReducibleWitness {
    /// `y` divides a form of degree at least 2.
    DivisibleByY,
    /// The monic dehomogenization has this integer root.
    IntegerRoot(BigInt),
}

impl fmt::Display for ReducibleWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReducibleWitness::DivisibleByY => write!(f, "y divides F"),
            ReducibleWitness::IntegerRoot(r) => write!(f, "monic form has integer root {r}"),
        }
    }
}

/// Integer polynomial, coefficients lowest degree first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs
            .iter()
            .rev()
            .fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    /// Value at `x` modulo `m`, in [0, m).
    pub fn eval_mod(&self, x: u64, m: u64) -> u64 {
        let m_big = BigInt::from(m);
        let mut acc = 0u64;
        for c in self.coeffs.iter().rev() {
            let cm = c.mod_floor(&m_big).to_u64().unwrap();
            acc = ((nt::mul_mod(acc, x % m, m) as u128 + cm as u128) % m as u128) as u64;
        }
        acc
    }

    pub fn derivative(&self) -> IntPolynomial {
        IntPolynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    /// Reduction modulo a prime.
    pub fn to_mod_p(&self, p: u64) -> PolyMod {
        let pb = BigInt::from(p);
        PolyMod::new(
            p,
            self.coeffs
                .iter()
                .map(|c| c.mod_floor(&pb).to_u64().unwrap())
                .collect(),
        )
    }

    /// Coefficients as i128 when they all fit.
    pub fn to_i128(&self) -> Option<Vec<i128>> {
        self.coeffs.iter().map(|c| c.to_i128()).collect()
    }

    /// Monic gcd over Q, returned as a primitive integer polynomial.
    pub fn gcd_over_q(&self, other: &IntPolynomial) -> IntPolynomial {
        let (mut a, mut b) = (self.primitive_part(), other.primitive_part());
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    fn content(&self) -> BigInt {
        self.coeffs
            .iter()
            .fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    fn primitive_part(&self) -> IntPolynomial {
        if self.is_zero() {
            return self.clone();
        }
        let mut g = self.content();
        if self.leading().is_negative() {
            g = -g;
        }
        IntPolynomial::new(self.coeffs.iter().map(|c| c / &g).collect())
    }

    fn pseudo_rem(&self, divisor: &IntPolynomial) -> IntPolynomial {
        let dd = divisor.degree().expect("nonzero divisor");
        let lead = divisor.leading();
        let mut rem = self.coeffs.clone();
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let top = rem.last().unwrap().clone();
            for c in rem.iter_mut() {
                *c *= &lead;
            }
            for (j, d) in divisor.coeffs.iter().enumerate() {
                rem[shift + j] -= &top * d;
            }
            while rem.last().is_some_and(|c| c.is_zero()) {
                rem.pop();
            }
        }
        IntPolynomial::new(rem)
    }
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let a = c.abs();
            match (i, a.is_one()) {
                (0, _) => write!(f, "{a}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{a}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{a}x^{i}")?,
            }
        }
        Ok(())
    }
}

/// Determinant of a square integer matrix by Bareiss elimination.
pub fn determinant(mut m: Vec<Vec<BigInt>>) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return BigInt::zero();
            };
            m.swap(k, swap);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    sign * &m[n - 1][n - 1]
}

/// Sylvester matrix of `f` (deg m) and `g` (deg n): n shifted rows of f
/// followed by m shifted rows of g, coefficients highest degree first.
pub fn sylvester_matrix(f: &IntPolynomial, g: &IntPolynomial) -> Vec<Vec<BigInt>> {
    let m = f.degree().unwrap_or(0);
    let n = g.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for (count, poly, deg) in [(n, f, m), (m, g, n)] {
        for shift in 0..count {
            let mut row = vec![BigInt::zero(); size];
            for (k, c) in poly.coeffs.iter().rev().enumerate() {
                row[shift + k] = c.clone();
            }
            debug_assert_eq!(poly.coeffs.len(), deg + 1);
            rows.push(row);
        }
    }
    rows
}

pub fn resultant(f: &IntPolynomial, g: &IntPolynomial) -> Result<BigInt, PolyError> {
    if f.is_zero() || g.is_zero() {
        return Err(PolyError::ZeroPolynomial);
    }
    Ok(determinant(sylvester_matrix(f, g)))
}

/// Resultant of two binary forms, taken with their formal degrees; zero iff
/// they share a linear factor over an algebraic closure.
pub fn form_resultant(f: &BinaryForm, g: &BinaryForm) -> BigInt {
    let (m, n) = (f.degree(), g.degree());
    let size = m + n;
    if size == 0 {
        return BigInt::from(1);
    }
    let mut rows = Vec::with_capacity(size);
    for (count, form) in [(n, f), (m, g)] {
        for shift in 0..count {
            let mut row = vec![BigInt::zero(); size];
            for (k, c) in form.coeffs().iter().enumerate() {
                row[shift + k] = c.clone();
            }
            rows.push(row);
        }
    }
    determinant(rows)
}

/// Discriminant of a monic polynomial: (-1)^(d(d-1)/2) res(f, f').
pub fn discriminant(f: &IntPolynomial) -> Result<BigInt, PolyError> {
    let d = f.degree().ok_or(PolyError::ZeroPolynomial)?;
    if !f.is_monic() {
        return Err(PolyError::NotMonic);
    }
    if d < 2 {
        return Err(PolyError::DegreeTooSmall(d));
    }
    let r = resultant(f, &f.derivative())?;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -r } else { r })
}

/// Homogeneous binary form with integer coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryForm {
    coeffs: Vec<BigInt>,
    small: Option<Vec<i128>>,
}

impl BinaryForm {
    pub fn new(coeffs: Vec<BigInt>) -> Result<Self, PolyError> {
        if coeffs.len() < 2 || coeffs.iter().all(|c| c.is_zero()) {
            return Err(PolyError::InvalidForm);
        }
        let small = coeffs.iter().map(|c| c.to_i128()).collect();
        Ok(BinaryForm { coeffs, small })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self, PolyError> {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// F(1, 0).
    pub fn leading(&self) -> &BigInt {
        &self.coeffs[0]
    }

    pub fn eval(&self, s: &BigInt, t: &BigInt) -> BigInt {
        // acc_j = acc_{j-1} * s + c_j t^j, so c_j picks up s^(d-j).
        let mut acc = BigInt::zero();
        let mut tpow = BigInt::one();
        for c in &self.coeffs {
            acc = acc * s + c * &tpow;
            tpow *= t;
        }
        acc
    }

    /// Checked fast evaluation; `None` on overflow or oversized coefficients.
    pub fn eval_i128(&self, s: i64, t: i64) -> Option<i128> {
        let c = self.small.as_ref()?;
        let (s, t) = (s as i128, t as i128);
        let mut acc: i128 = 0;
        let mut tpow: i128 = 1;
        for (j, cj) in c.iter().enumerate() {
            acc = acc.checked_mul(s)?.checked_add(cj.checked_mul(tpow)?)?;
            if j + 1 < c.len() {
                tpow = tpow.checked_mul(t)?;
            }
        }
        Some(acc)
    }

    /// F(x, 1) as a polynomial in x.
    pub fn dehomogenize(&self) -> IntPolynomial {
        IntPolynomial::new(self.coeffs.iter().rev().cloned().collect())
    }

    pub fn coeff_vec_i64(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| c.to_i64()).collect()
    }
}

impl fmt::Display for BinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for BinaryForm {
    type Err = PolyError;

    /// Parses "[c0,c1,...,cd]".
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| PolyError::Parse(s.to_string()))?;
        let coeffs = inner
            .split(',')
            .map(|c| c.trim().parse::<BigInt>().map_err(|_| PolyError::Parse(s.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        BinaryForm::new(coeffs)
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoeffRepr {
    Int(i64),
    Text(String),
}

impl Serialize for BinaryForm {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let v: Vec<CoeffRepr> = self
            .coeffs
            .iter()
            .map(|c| match c.to_i64() {
                Some(x) => CoeffRepr::Int(x),
                None => CoeffRepr::Text(c.to_string()),
            })
            .collect();
        v.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for BinaryForm {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let raw = Vec::<CoeffRepr>::deserialize(de)?;
        let coeffs = raw
            .into_iter()
            .map(|c| match c {
                CoeffRepr::Int(x) => Ok(BigInt::from(x)),
                CoeffRepr::Text(s) => s.parse::<BigInt>().map_err(serde::de::Error::custom),
            })
            .collect::<Result<Vec<_>, _>>()?;
        BinaryForm::new(coeffs).map_err(serde::de::Error::custom)
    }
}

/// The monic companion of a form together with `b = F(1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonicFormData {
    pub tilde_form: BinaryForm,
    pub b: BigInt,
    /// Set when F = c*y; then `tilde_form` is x + c*y so that theta = -c.
    pub is_degenerate_y: bool,
}

impl MonicFormData {
    /// c with F = c*y, for the degenerate case.
    pub fn degenerate_constant(&self) -> Option<&BigInt> {
        self.is_degenerate_y.then(|| &self.tilde_form.coeffs()[1])
    }
}

/// Builds `b^(d-1) F(x/b, y)`, whose coefficients are `c_j b^(j-1)`.
pub fn make_monic_form(form: &BinaryForm) -> Result<MonicFormData, PolyError> {
    let d = form.degree();
    let b = form.leading().clone();
    if b.is_zero() {
        if d == 1 {
            let c = form.coeffs()[1].clone();
            return Ok(MonicFormData {
                tilde_form: BinaryForm::new(vec![BigInt::one(), c])?,
                b,
                is_degenerate_y: true,
            });
        }
        return Err(PolyError::Reducible(ReducibleWitness::DivisibleByY));
    }
    let mut coeffs = Vec::with_capacity(d + 1);
    coeffs.push(BigInt::one());
    let mut bpow = BigInt::one();
    for c in form.coeffs().iter().skip(1) {
        coeffs.push(c * &bpow);
        bpow *= &b;
    }
    let tilde_form = BinaryForm::new(coeffs)?;
    if d >= 2 {
        if let Some(r) = integer_root(&tilde_form.dehomogenize()) {
            return Err(PolyError::Reducible(ReducibleWitness::IntegerRoot(r)));
        }
    }
    Ok(MonicFormData {
        tilde_form,
        b,
        is_degenerate_y: false,
    })
}

/// An integer root of a monic polynomial, searched among divisors of the
/// constant term when that term is at most 10^12 in size.
fn integer_root(f: &IntPolynomial) -> Option<BigInt> {
    let c0 = f.coeffs().first()?.clone();
    if c0.is_zero() {
        return Some(BigInt::zero());
    }
    let c = c0.abs().to_u64().filter(|&c| c <= 1_000_000_000_000)?;
    let fac = nt::factor(c as u128).ok()?;
    let mut divisors = vec![1u64];
    for (p, e) in fac {
        let current = divisors.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divisors.extend(current.iter().map(|d| d * pk));
        }
    }
    divisors.sort();
    for d in divisors {
        for r in [BigInt::from(d), -BigInt::from(d)] {
            if f.eval(&r).is_zero() {
                return Some(r);
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Irreducibility {
    /// Irreducible modulo `prime` (or degree 1, with `prime = None`).
    Proven { prime: Option<u64> },
    Unknown,
}

/// Sufficient test: the monic dehomogenization is irreducible modulo a
/// good prime up to `prime_bound`.
pub fn irreducibility_witness(form: &BinaryForm, prime_bound: u64) -> Irreducibility {
    if form.degree() == 1 {
        return Irreducibility::Proven { prime: None };
    }
    let Ok(monic) = make_monic_form(form) else {
        return Irreducibility::Unknown;
    };
    let f = monic.tilde_form.dehomogenize();
    let Ok(disc) = discriminant(&f) else {
        return Irreducibility::Unknown;
    };
    if disc.is_zero() {
        return Irreducibility::Unknown;
    }
    for p in nt::primes_up_to(prime_bound) {
        if (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        if f.to_mod_p(p).is_irreducible() {
            return Irreducibility::Proven { prime: Some(p) };
        }
    }
    Irreducibility::Unknown
}

use std::cmp::Ordering;
use std::collections::BTreeSet;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::nt;
use crate::polymod::PolyMod;

/// A prime ideal above an unramified rational prime.
///
/// For residue degree 1, `key` is the root `n` with the ideal equal to
/// `(p, theta - n)`. For higher degree it encodes the monic irreducible factor
/// `g` of the minimal polynomial mod `p` as `sum_i g_i p^i` over its
/// non-leading coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrimeIdeal {
    pub p: u64,
    pub f: u32,
    pub e: u32,
    pub key: u128,
}

impl PrimeIdeal {
    pub fn degree_one(p: u64, root: u64) -> Self {
        PrimeIdeal { p, f: 1, e: 1, key: root as u128 }
    }

    pub(crate) fn from_factor(g: &PolyMod) -> Self {
        let p = g.modulus();
        let f = g.degree().expect("nonzero factor") as u32;
        let key = if f == 1 {
            ((p - g.coeffs()[0]) % p) as u128
        } else {
            g.coeffs()[..f as usize]
                .iter()
                .rev()
                .fold(0u128, |acc, &c| acc * p as u128 + c as u128)
        };
        PrimeIdeal { p, f, e: 1, key }
    }

    pub fn root(&self) -> Option<u64> {
        (self.f == 1).then_some(self.key as u64)
    }

    /// p^f, saturating.
    pub fn norm(&self) -> u128 {
        (self.p as u128).checked_pow(self.f).unwrap_or(u128::MAX)
    }

    /// The monic irreducible factor mod p that defines the ideal.
    pub fn residue_poly(&self) -> PolyMod {
        let p = self.p;
        let mut coeffs = Vec::with_capacity(self.f as usize + 1);
        let mut k = self.key;
        if self.f == 1 {
            coeffs.push((p - (k as u64) % p) % p);
        } else {
            for _ in 0..self.f {
                coeffs.push((k % p as u128) as u64);
                k /= p as u128;
            }
        }
        coeffs.push(1);
        PolyMod::new(p, coeffs)
    }
}

impl Ord for PrimeIdeal {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.norm(), self.p, self.key, self.e).cmp(&(other.norm(), other.p, other.key, other.e))
    }
}

impl PartialOrd for PrimeIdeal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// A product of prime ideals with positive exponents, kept sorted by
/// norm and then key with no repeated prime.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct IdealFactorization {
    factors: Vec<(PrimeIdeal, u32)>,
}

impl IdealFactorization {
    pub fn one() -> Self {
        Self::default()
    }

    pub fn new(mut factors: Vec<(PrimeIdeal, u32)>) -> Self {
        factors.retain(|&(_, e)| e > 0);
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(PrimeIdeal, u32)> = Vec::with_capacity(factors.len());
        for (q, e) in factors {
            match merged.last_mut() {
                Some((r, v)) if *r == q => *v += e,
                _ => merged.push((q, e)),
            }
        }
        IdealFactorization { factors: merged }
    }

    pub fn prime(q: PrimeIdeal) -> Self {
        IdealFactorization { factors: vec![(q, 1)] }
    }

    pub fn factors(&self) -> &[(PrimeIdeal, u32)] {
        &self.factors
    }

    pub fn is_one(&self) -> bool {
        self.factors.is_empty()
    }

    /// Absolute norm, saturating at u128::MAX.
    pub fn norm(&self) -> u128 {
        self.factors.iter().fold(1u128, |acc, &(q, e)| {
            acc.saturating_mul(q.norm().checked_pow(e).unwrap_or(u128::MAX))
        })
    }

    /// Number of prime factors with multiplicity.
    pub fn big_omega(&self) -> u32 {
        self.factors.iter().map(|&(_, e)| e).sum()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Rational primes below the ideal, ascending and distinct.
    pub fn rational_primes(&self) -> Vec<u64> {
        self.factors
            .iter()
            .map(|(q, _)| q.p)
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Every prime factor has residue degree 1.
    pub fn in_p_circ(&self) -> bool {
        self.factors.iter().all(|(q, _)| q.f == 1)
    }

    /// In the degree-1 class and no two factors lie above the same prime.
    pub fn in_p(&self) -> bool {
        self.in_p_circ() && self.rational_primes().len() == self.factors.len()
    }

    pub fn mul(&self, other: &IdealFactorization) -> IdealFactorization {
        let mut all = self.factors.clone();
        all.extend_from_slice(&other.factors);
        IdealFactorization::new(all)
    }

    /// The norms share no rational prime.
    pub fn norm_coprime(&self, other: &IdealFactorization) -> bool {
        let mine = self.rational_primes();
        other.factors.iter().all(|(q, _)| mine.binary_search(&q.p).is_err())
    }

    /// Drops every factor above a prime `p <= w`.
    pub fn without_primes_up_to(&self, w: u64) -> IdealFactorization {
        IdealFactorization {
            factors: self.factors.iter().copied().filter(|(q, _)| q.p > w).collect(),
        }
    }
}

impl Serialize for IdealFactorization {
    fn serialize<S: Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<(u64, u32, u128, u32)> =
            self.factors.iter().map(|&(q, e)| (q.p, q.f, q.key, e)).collect();
        rows.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for IdealFactorization {
    fn deserialize<D: Deserializer<'de>>(de: D) -> Result<Self, D::Error> {
        let rows = Vec::<(u64, u32, u128, u32)>::deserialize(de)?;
        for &(p, f, key, _) in &rows {
            if f == 0 || !nt::is_prime(p) {
                return Err(D::Error::custom(format!("invalid prime ideal ({p}, {f}, {key})")));
            }
        }
        Ok(IdealFactorization::new(
            rows.into_iter()
                .map(|(p, f, key, e)| (PrimeIdeal { p, f, e: 1, key }, e))
                .collect(),
        ))
    }
}

/// Rational primes whose ideals are left out of a factorization.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PrimeExclusion {
    /// Every prime `p <= w` is excluded.
    pub w: u64,
    pub extra: BTreeSet<u64>,
}

impl PrimeExclusion {
    pub fn none() -> Self {
        Self::default()
    }

    /// Excludes the prime divisors of `m`.
    pub fn from_modulus(m: u128) -> Result<Self, nt::NtError> {
        Ok(PrimeExclusion {
            w: 0,
            extra: nt::prime_divisors(m)?.into_iter().collect(),
        })
    }

    /// Excludes `p <= w` and the prime divisors of `q`.
    pub fn up_to_and_dividing(w: u64, q: u128) -> Result<Self, nt::NtError> {
        let mut ex = Self::from_modulus(q)?;
        ex.w = w;
        Ok(ex)
    }

    pub fn with_primes<I: IntoIterator<Item = u64>>(mut self, primes: I) -> Self {
        self.extra.extend(primes);
        self
    }

    pub fn excludes(&self, p: u64) -> bool {
        p <= self.w || self.extra.contains(&p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ordering_is_by_norm_then_key() {
        let inert3 = PrimeIdeal { p: 3, f: 2, e: 1, key: 1 };
        let a = PrimeIdeal::degree_one(5, 3);
        let b = PrimeIdeal::degree_one(5, 2);
        let fac = IdealFactorization::new(vec![(inert3, 1), (a, 1), (b, 2)]);
        let order: Vec<_> = fac.factors().iter().map(|(q, _)| (q.p, q.key)).collect();
        assert_eq!(order, vec![(5, 2), (5, 3), (3, 1)]);
        assert_eq!(fac.norm(), 9 * 5 * 25);
        assert_eq!(fac.big_omega(), 4);
        assert!(!fac.in_p_circ());
    }

    #[test]
    fn classes() {
        let a = PrimeIdeal::degree_one(5, 2);
        let b = PrimeIdeal::degree_one(5, 3);
        let c = PrimeIdeal::degree_one(13, 5);
        assert!(IdealFactorization::new(vec![(a, 2), (c, 1)]).in_p());
        let ab = IdealFactorization::new(vec![(a, 1), (b, 1)]);
        assert!(ab.in_p_circ() && !ab.in_p());
        assert!(IdealFactorization::one().in_p());
    }

    #[test]
    fn residue_poly_round_trip() {
        let g = PolyMod::new(7, vec![3, 5, 1]);
        let q = PrimeIdeal::from_factor(&g);
        assert_eq!(q.key, 3 + 5 * 7);
        assert_eq!(q.residue_poly(), g);
        let lin = PolyMod::new(5, vec![3, 1]);
        let q = PrimeIdeal::from_factor(&lin);
        assert_eq!(q.root(), Some(2));
        assert_eq!(q.residue_poly(), lin);
    }

    #[test]
    fn json_shape() {
        let fac = IdealFactorization::new(vec![(PrimeIdeal::degree_one(5, 3), 1)]);
        let js = serde_json::to_string(&fac).unwrap();
        assert_eq!(js, "[[5,1,3,1]]");
        let back: IdealFactorization = serde_json::from_str(&js).unwrap();
        assert_eq!(back, fac);
        assert!(serde_json::from_str::<IdealFactorization>("[[4,1,0,1]]").is_err());
    }
}

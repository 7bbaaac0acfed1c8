//! The number field attached to a binary form, its unramified primes, and
//! factorization of the principal ideals `(b s - theta t)`.
//!
//! With `b = F(1, 0)` and `theta` a root of `F~(x, 1)`, the element
//! `b s - theta t` has norm `b^(d-1) F(s, t)`. Away from the primes of
//! `D = 2 b Delta` every prime dividing that norm splits off a single
//! degree-1 ideal, whose root is `b s / t mod p`.

mod ideal;
pub mod membership;

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, RwLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

pub use ideal::{IdealFactorization, PrimeExclusion, PrimeIdeal};

use crate::intpoly::{
    discriminant, irreducibility_witness, make_monic_form, BinaryForm, IntPolynomial,
    Irreducibility, MonicFormData, PolyError,
};
use crate::nt::{self, NtError};

/// Primes up to this bound are tried when certifying irreducibility.
pub const IRREDUCIBILITY_PRIME_BOUND: u64 = 1000;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("no irreducibility certificate for {0} with primes up to {IRREDUCIBILITY_PRIME_BOUND}")]
    NotCertified(String),
    #[error("prime {0} divides the discriminant")]
    BadPrime(u64),
    #[error("prime {0} divides D but is not excluded")]
    BadPrimeNotExcluded(u64),
    #[error("({0}, {1}) is not primitive")]
    NotPrimitive(i64, i64),
    #[error("form vanishes at ({0}, {1})")]
    ZeroValue(i64, i64),
    #[error("ideal is not a product of degree-1 primes above distinct rational primes")]
    NotInP,
    #[error("value does not fit in 128 bits")]
    Overflow,
    #[error(transparent)]
    Factor(#[from] NtError),
}

pub struct NumberField {
    source_form: BinaryForm,
    monic: MonicFormData,
    min_poly: IntPolynomial,
    degree: usize,
    delta_theta: BigInt,
    big_d: BigInt,
    bad_primes: Vec<u64>,
    splits: RwLock<HashMap<u64, Arc<Vec<PrimeIdeal>>>>,
}

impl fmt::Debug for NumberField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NumberField")
            .field("form", &self.source_form.to_string())
            .field("min_poly", &self.min_poly.to_string())
            .field("delta_theta", &self.delta_theta)
            .field("D", &self.big_d)
            .finish()
    }
}

impl NumberField {
    /// Builds the field; the form must carry an irreducibility certificate.
    pub fn new(form: BinaryForm) -> Result<Self, FieldError> {
        let monic = make_monic_form(&form)?;
        if irreducibility_witness(&form, IRREDUCIBILITY_PRIME_BOUND) == Irreducibility::Unknown {
            return Err(FieldError::NotCertified(form.to_string()));
        }
        let min_poly = monic.tilde_form.dehomogenize();
        let degree = form.degree();
        let delta_theta = if degree >= 2 {
            discriminant(&min_poly)?
        } else {
            BigInt::one()
        };
        let big_d = match monic.degenerate_constant() {
            Some(c) => BigInt::from(2) * c,
            None => BigInt::from(2) * &monic.b * &delta_theta,
        };
        let abs_d = big_d.abs().to_u128().ok_or(FieldError::Overflow)?;
        let bad_primes = nt::prime_divisors(abs_d)?;
        Ok(NumberField {
            source_form: form,
            monic,
            min_poly,
            degree,
            delta_theta,
            big_d,
            bad_primes,
            splits: RwLock::new(HashMap::new()),
        })
    }

    pub fn source_form(&self) -> &BinaryForm {
        &self.source_form
    }

    pub fn monic_data(&self) -> &MonicFormData {
        &self.monic
    }

    pub fn min_poly(&self) -> &IntPolynomial {
        &self.min_poly
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn b(&self) -> &BigInt {
        &self.monic.b
    }

    pub fn delta_theta(&self) -> &BigInt {
        &self.delta_theta
    }

    /// `2 b Delta`, or `2c` when the form is `c y`.
    pub fn big_d(&self) -> &BigInt {
        &self.big_d
    }

    /// Prime divisors of `D`.
    pub fn bad_primes(&self) -> &[u64] {
        &self.bad_primes
    }

    fn divides_delta(&self, p: u64) -> bool {
        (&self.delta_theta % BigInt::from(p)).is_zero()
    }

    /// Prime ideals above `p`, sorted by norm then key. Memoized.
    pub fn split_prime(&self, p: u64) -> Result<Arc<Vec<PrimeIdeal>>, FieldError> {
        if self.divides_delta(p) {
            return Err(FieldError::BadPrime(p));
        }
        if let Some(hit) = self.splits.read().unwrap().get(&p) {
            return Ok(hit.clone());
        }
        let mut ideals: Vec<PrimeIdeal> = self
            .min_poly
            .to_mod_p(p)
            .factor_squarefree()
            .iter()
            .map(|(g, _)| PrimeIdeal::from_factor(g))
            .collect();
        ideals.sort();
        let ideals = Arc::new(ideals);
        self.splits
            .write()
            .unwrap()
            .entry(p)
            .or_insert_with(|| ideals.clone());
        Ok(ideals)
    }

    /// `b^(d-1) F(s, t)`, the norm of `b s - theta t`.
    pub fn value(&self, s: i64, t: i64) -> Result<i128, FieldError> {
        let b = self.monic.b.to_i64();
        if let Some(b) = b {
            if let Some(bs) = b.checked_mul(s) {
                if let Some(v) = self.monic.tilde_form.eval_i128(bs, t) {
                    return Ok(v);
                }
            }
        }
        let bs = &self.monic.b * BigInt::from(s);
        self.monic
            .tilde_form
            .eval(&bs, &BigInt::from(t))
            .to_i128()
            .ok_or(FieldError::Overflow)
    }

    fn degree_one_root(&self, p: u64, s: i64, t: i64) -> u64 {
        if self.degree == 1 {
            let c = self.min_poly.coeffs()[0].mod_floor(&BigInt::from(p));
            return (p - c.to_u64().unwrap()) % p;
        }
        let pm = p as i128;
        let b = self.monic.b.mod_floor(&BigInt::from(p)).to_i128().unwrap();
        let t_inv = nt::mod_inv(t as i128, pm).expect("t is a unit at good primes");
        ((b * (s as i128).rem_euclid(pm)).rem_euclid(pm) * t_inv).rem_euclid(pm) as u64
    }

    /// Factorization of `(b s - theta t)` away from the excluded primes.
    ///
    /// Every prime of `D` must be excluded.
    pub fn factor_principal(
        &self,
        s: i64,
        t: i64,
        excluded: &PrimeExclusion,
    ) -> Result<IdealFactorization, FieldError> {
        if let Some(&p) = self.bad_primes.iter().find(|&&p| !excluded.excludes(p)) {
            return Err(FieldError::BadPrimeNotExcluded(p));
        }
        if (s as i128).gcd(&(t as i128)) != 1 {
            return Err(FieldError::NotPrimitive(s, t));
        }
        let v = self.value(s, t)?;
        if v == 0 {
            return Err(FieldError::ZeroValue(s, t));
        }
        let factors = nt::factor(v.unsigned_abs())?
            .into_iter()
            .filter(|&(p, _)| !excluded.excludes(p))
            .map(|(p, e)| (PrimeIdeal::degree_one(p, self.degree_one_root(p, s, t)), e))
            .collect();
        Ok(IdealFactorization::new(factors))
    }

    /// The `k mod N(a)` with `a | (b s - theta t)` iff `b s = k t mod N(a)`.
    pub fn congruence_parameter(&self, a: &IdealFactorization) -> Result<(u64, u64), FieldError> {
        if !a.in_p() {
            return Err(FieldError::NotInP);
        }
        let mut parts = Vec::with_capacity(a.factors().len());
        for &(q, e) in a.factors() {
            if self.divides_delta(q.p) {
                return Err(FieldError::BadPrime(q.p));
            }
            let modulus = (q.p as u128).checked_pow(e).filter(|&m| m <= u64::MAX as u128);
            let modulus = modulus.ok_or(FieldError::Overflow)? as u64;
            parts.push((self.hensel_lift(q.root().unwrap(), q.p, modulus) as i128, modulus as i128));
        }
        let (k, n) = nt::crt(&parts).ok_or(FieldError::Overflow)?;
        u64::try_from(n)
            .map(|n| (k as u64, n))
            .map_err(|_| FieldError::Overflow)
    }

    /// Lifts a simple root mod `p` to a root mod `target` (a power of `p`).
    fn hensel_lift(&self, root: u64, p: u64, target: u64) -> u64 {
        let deriv = self.min_poly.derivative();
        let mut k = root % p;
        let mut m = p;
        while m < target {
            m = m.saturating_mul(m).min(target);
            let fv = self.min_poly.eval_mod(k, m) as i128;
            let dv = deriv.eval_mod(k, m) as i128;
            let inv = nt::mod_inv(dv, m as i128).expect("simple root");
            k = ((k as i128 - fv * inv % m as i128).rem_euclid(m as i128)) as u64;
        }
        k
    }

    /// Ideals of norm at most `x`, sorted by norm then factors.
    pub fn enumerate_ideals(&self, x: u64, opts: &EnumerateOptions) -> Vec<IdealFactorization> {
        let mut groups: Vec<Vec<PrimeIdeal>> = Vec::new();
        for p in nt::primes_up_to(x) {
            if opts.coprime_to % p as u128 == 0 {
                continue;
            }
            let Ok(above) = self.split_prime(p) else { continue };
            let usable: Vec<PrimeIdeal> = above
                .iter()
                .copied()
                .filter(|q| q.norm() <= x as u128)
                .filter(|q| opts.class == IdealClass::All || q.f == 1)
                .collect();
            if !usable.is_empty() {
                groups.push(usable);
            }
        }
        let mut out = Vec::new();
        let mut current = Vec::new();
        enumerate_groups(&groups, 0, 1, x as u128, opts, &mut current, &mut out);
        out.sort_by(|a: &IdealFactorization, b| {
            (a.norm(), a.factors().iter().map(|(q, e)| (*q, *e)).collect::<Vec<_>>())
                .cmp(&(b.norm(), b.factors().iter().map(|(q, e)| (*q, *e)).collect::<Vec<_>>()))
        });
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum IdealClass {
    #[default]
    All,
    /// Products of degree-1 primes.
    PCirc,
    /// Products of degree-1 primes above pairwise distinct rational primes.
    P,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub squarefree: bool,
    /// Only ideals whose norm is coprime to this.
    pub coprime_to: u128,
    pub class: IdealClass,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions { squarefree: false, coprime_to: 1, class: IdealClass::All }
    }
}

fn enumerate_groups(
    groups: &[Vec<PrimeIdeal>],
    idx: usize,
    norm: u128,
    x: u128,
    opts: &EnumerateOptions,
    current: &mut Vec<(PrimeIdeal, u32)>,
    out: &mut Vec<IdealFactorization>,
) {
    if idx == groups.len() || norm.saturating_mul(groups[idx][0].p as u128) > x {
        out.push(IdealFactorization::new(current.clone()));
        return;
    }
    let group = &groups[idx];
    let mut within = Vec::new();
    enumerate_within(group, 0, norm, x, opts, false, &mut Vec::new(), &mut within);
    for (n, chosen) in within {
        let base = current.len();
        current.extend_from_slice(&chosen);
        enumerate_groups(groups, idx + 1, n, x, opts, current, out);
        current.truncate(base);
    }
}

/// All exponent choices for the ideals above one rational prime.
#[allow(clippy::too_many_arguments)]
fn enumerate_within(
    group: &[PrimeIdeal],
    j: usize,
    norm: u128,
    x: u128,
    opts: &EnumerateOptions,
    used: bool,
    chosen: &mut Vec<(PrimeIdeal, u32)>,
    out: &mut Vec<(u128, Vec<(PrimeIdeal, u32)>)>,
) {
    if j == group.len() {
        out.push((norm, chosen.clone()));
        return;
    }
    enumerate_within(group, j + 1, norm, x, opts, used, chosen, out);
    if opts.class == IdealClass::P && used {
        return;
    }
    let q = group[j];
    let max_e = if opts.squarefree { 1 } else { u32::MAX };
    let mut n = norm;
    let mut e = 0;
    while e < max_e {
        n = n.saturating_mul(q.norm());
        if n > x {
            break;
        }
        e += 1;
        chosen.push((q, e));
        enumerate_within(group, j + 1, n, x, opts, true, chosen, out);
        chosen.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use membership::{ideal_contains, linear_element, prime_power_lattice, valuation};
    use proptest::prelude::*;

    fn field(c: &[i64]) -> NumberField {
        NumberField::new(BinaryForm::from_i64(c).unwrap()).unwrap()
    }

    fn ex(m: u128) -> PrimeExclusion {
        PrimeExclusion::from_modulus(m).unwrap()
    }

    #[test]
    fn gaussian_data() {
        let k = field(&[1, 0, 1]);
        assert_eq!(k.degree(), 2);
        assert_eq!(k.delta_theta(), &BigInt::from(-4));
        assert_eq!(k.big_d(), &BigInt::from(-8));
        assert_eq!(k.bad_primes(), &[2]);
    }

    #[test]
    fn split_examples() {
        let k = field(&[1, 0, 1]);
        let five = k.split_prime(5).unwrap();
        let roots: Vec<_> = five.iter().map(|q| q.root().unwrap()).collect();
        assert_eq!(roots, vec![2, 3]);
        let three = k.split_prime(3).unwrap();
        assert_eq!(three.len(), 1);
        assert_eq!(three[0].f, 2);
        assert_eq!(k.split_prime(2).unwrap_err(), FieldError::BadPrime(2));
    }

    #[test]
    fn cache_returns_same_allocation() {
        let k = field(&[1, 0, 1]);
        let a = k.split_prime(13).unwrap();
        let b = k.split_prime(13).unwrap();
        assert!(Arc::ptr_eq(&a, &b));
    }

    #[test]
    fn factor_principal_examples() {
        let k = field(&[1, 0, 1]);
        let fac = k.factor_principal(1, 2, &ex(8)).unwrap();
        assert_eq!(fac.factors(), &[(PrimeIdeal::degree_one(5, 3), 1)]);
        assert!(k.factor_principal(1, 0, &ex(8)).unwrap().is_one());
        assert_eq!(k.factor_principal(2, 4, &ex(8)), Err(FieldError::NotPrimitive(2, 4)));
        assert_eq!(k.factor_principal(0, 0, &ex(8)), Err(FieldError::NotPrimitive(0, 0)));
        assert_eq!(
            k.factor_principal(1, 2, &PrimeExclusion::none()),
            Err(FieldError::BadPrimeNotExcluded(2))
        );
        // 7^2 + 24^2 = 625
        let fac = k.factor_principal(7, 24, &ex(8)).unwrap();
        assert_eq!(fac.factors().len(), 1);
        assert_eq!(fac.factors()[0].1, 4);
    }

    #[test]
    fn degenerate_linear_form() {
        let k = field(&[0, 7]);
        assert_eq!(k.degree(), 1);
        assert_eq!(k.big_d(), &BigInt::from(14));
        let fac = k.factor_principal(4, 15, &ex(14)).unwrap();
        // value is 7 * 15 with 7 excluded
        let primes: Vec<_> = fac.factors().iter().map(|(q, e)| (q.p, q.root(), *e)).collect();
        assert_eq!(primes, vec![(3, Some(3 - 7 % 3), 1), (5, Some(5 - 7 % 5), 1)]);
    }

    #[test]
    fn congruence_parameter_examples() {
        let k = field(&[1, 0, 1]);
        let p = PrimeIdeal::degree_one(5, 2);
        assert_eq!(k.congruence_parameter(&IdealFactorization::prime(p)).unwrap(), (2, 5));
        let p2 = IdealFactorization::new(vec![(p, 2)]);
        assert_eq!(k.congruence_parameter(&p2).unwrap(), (7, 25));
        assert_eq!(k.congruence_parameter(&IdealFactorization::one()).unwrap(), (0, 1));
        let both = IdealFactorization::new(vec![(p, 1), (PrimeIdeal::degree_one(5, 3), 1)]);
        assert_eq!(k.congruence_parameter(&both), Err(FieldError::NotInP));
        let inert = IdealFactorization::prime(k.split_prime(3).unwrap()[0]);
        assert_eq!(k.congruence_parameter(&inert), Err(FieldError::NotInP));
        let bad = IdealFactorization::prime(PrimeIdeal::degree_one(2, 1));
        assert_eq!(k.congruence_parameter(&bad), Err(FieldError::BadPrime(2)));
    }

    #[test]
    fn enumerate_gaussian_up_to_10() {
        let k = field(&[1, 0, 1]);
        let opts = EnumerateOptions { coprime_to: 2, ..Default::default() };
        let ideals = k.enumerate_ideals(10, &opts);
        let norms: Vec<u128> = ideals.iter().map(|a| a.norm()).collect();
        assert_eq!(norms, vec![1, 5, 5, 9]);
        assert_eq!(ideals[1].factors()[0].0.root(), Some(2));
        assert_eq!(ideals[2].factors()[0].0.root(), Some(3));
    }

    #[test]
    fn enumerate_classes_against_filter() {
        let k = field(&[1, 0, -1, -1]);
        let all = k.enumerate_ideals(300, &EnumerateOptions { coprime_to: 46, ..Default::default() });
        for (class, pred) in [
            (IdealClass::PCirc, IdealFactorization::in_p_circ as fn(&IdealFactorization) -> bool),
            (IdealClass::P, IdealFactorization::in_p),
        ] {
            for squarefree in [false, true] {
                let opts = EnumerateOptions { squarefree, coprime_to: 46, class };
                let got = k.enumerate_ideals(300, &opts);
                let want: Vec<_> = all
                    .iter()
                    .filter(|a| pred(a) && (!squarefree || a.is_squarefree()))
                    .cloned()
                    .collect();
                assert_eq!(got, want);
            }
        }
    }

    #[test]
    fn residue_degrees_sum_to_degree() {
        let k = field(&[1, 0, -1, -1]);
        for p in nt::primes_up_to(10_000) {
            if p == 23 {
                continue;
            }
            let sum: u32 = k.split_prime(p).unwrap().iter().map(|q| q.e * q.f).sum();
            assert_eq!(sum, 3, "p = {p}");
        }
    }

    #[test]
    fn parameter_matches_membership() {
        for c in [[1i64, 0, 1].as_slice(), &[1, 0, -1, -1], &[2, 1, 3]] {
            let k = field(c);
            let excl: u128 = k.big_d().abs().to_u128().unwrap();
            let ideals = k.enumerate_ideals(
                200,
                &EnumerateOptions { coprime_to: excl, class: IdealClass::P, squarefree: false },
            );
            let b = k.b().to_i64().unwrap();
            for a in &ideals {
                let (kk, n) = k.congruence_parameter(a).unwrap();
                for s in -12i64..=12 {
                    for t in -12i64..=12 {
                        let cong = (b * s - kk as i64 * t).rem_euclid(n as i64) == 0;
                        let member = ideal_contains(&k, a, &linear_element(&k, s, t));
                        assert_eq!(cong, member, "{c:?} {a:?} ({s},{t})");
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn norm_identity(s in -30i64..=30, t in -30i64..=30) {
            let k = field(&[2, 1, 3]);
            prop_assume!(s.gcd(&t) == 1);
            let excl = ex(k.big_d().abs().to_u128().unwrap());
            let fac = k.factor_principal(s, t, &excl).unwrap();
            let v = k.value(s, t).unwrap().unsigned_abs();
            let excluded_part: u128 = nt::factor(v).unwrap().iter()
                .filter(|(p, _)| excl.excludes(*p))
                .map(|&(p, e)| (p as u128).pow(e)).product();
            prop_assert_eq!(fac.norm() * excluded_part, v);
        }

        #[test]
        fn one_degree_one_prime_divides(s in -40i64..=40, t in -40i64..=40) {
            let k = field(&[1, 0, -1, -1]);
            prop_assume!(s.gcd(&t) == 1);
            let excl = ex(46);
            let fac = k.factor_principal(s, t, &excl).unwrap();
            let elem = linear_element(&k, s, t);
            for &(q, e) in fac.factors() {
                let above = k.split_prime(q.p).unwrap();
                let dividing: Vec<_> = above.iter()
                    .filter(|r| prime_power_lattice(&k, r, 1).contains(&elem))
                    .collect();
                prop_assert_eq!(dividing.len(), 1);
                prop_assert_eq!(*dividing[0], q);
                prop_assert_eq!(valuation(&k, &q, &elem, e + 1), e);
            }
        }
    }
}

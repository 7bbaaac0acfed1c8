//! Elementary number theory on machine integers: primes, factorization,
//! modular inverses, CRT and a few classical arithmetic functions.
//!
//! Factorization uses a smallest-prime-factor table for small inputs and
//! deterministic trial division by the primes below 10^6 beyond it. A
//! cofactor left after trial division is accepted when it is below 10^12
//! (it is then prime) or passes a deterministic Miller-Rabin test.

use std::sync::OnceLock;

use thiserror::Error;

/// Primes used for trial division go up to this bound.
pub const TRIAL_DIVISION_BOUND: u64 = 1_000_000;

const SPF_LIMIT: usize = 1 << 22;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NtError {
    #[error("cannot factor {0}: composite cofactor beyond the trial division range")]
    Unfactored(u128),
    #[error("cannot factor zero")]
    Zero,
}

/// Sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit inputs.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut r = 0;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Extended Euclid on signed 128-bit integers: returns (g, x, y) with ax + by = g >= 0.
pub fn ext_gcd(a: i128, b: i128) -> (i128, i128, i128) {
    let (mut old_r, mut r) = (a, b);
    let (mut old_s, mut s) = (1i128, 0i128);
    let (mut old_t, mut t) = (0i128, 1i128);
    while r != 0 {
        let q = old_r.div_euclid(r);
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
        (old_t, t) = (t, old_t - q * t);
    }
    if old_r < 0 {
        (-old_r, -old_s, -old_t)
    } else {
        (old_r, old_s, old_t)
    }
}

pub fn gcd_i128(a: i128, b: i128) -> i128 {
    ext_gcd(a, b).0
}

pub fn gcd_u64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` (m >= 1), reduced into [0, m).
pub fn mod_inv(a: i128, m: i128) -> Option<i128> {
    if m == 1 {
        return Some(0);
    }
    let (g, x, _) = ext_gcd(a.rem_euclid(m), m);
    (g == 1).then(|| x.rem_euclid(m))
}

/// Combines congruences x = r_i mod m_i with pairwise coprime moduli.
pub fn crt(parts: &[(i128, i128)]) -> Option<(i128, i128)> {
    let mut acc = (0i128, 1i128);
    for &(r, m) in parts {
        let (r0, m0) = acc;
        let inv = mod_inv(m0, m)?;
        let k = ((r - r0).rem_euclid(m) * inv).rem_euclid(m);
        let modulus = m0.checked_mul(m)?;
        acc = ((r0 + m0 * k).rem_euclid(modulus), modulus);
    }
    Some(acc)
}

struct SmallFactorTable {
    spf: Vec<u32>,
    primes: Vec<u64>,
}

fn table() -> &'static SmallFactorTable {
    static TABLE: OnceLock<SmallFactorTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut spf = vec![0u32; SPF_LIMIT];
        for i in 2..SPF_LIMIT {
            if spf[i] == 0 {
                let mut j = i;
                while j < SPF_LIMIT {
                    if spf[j] == 0 {
                        spf[j] = i as u32;
                    }
                    j += i;
                }
            }
        }
        let primes = (2..=TRIAL_DIVISION_BOUND as usize)
            .filter(|&i| spf[i] as usize == i)
            .map(|i| i as u64)
            .collect();
        SmallFactorTable { spf, primes }
    })
}

/// The primes below 10^6, shared.
pub fn small_primes() -> &'static [u64] {
    &table().primes
}

/// Prime factorization of `n` as ascending (prime, exponent) pairs.
pub fn factor(n: u128) -> Result<Vec<(u64, u32)>, NtError> {
    if n == 0 {
        return Err(NtError::Zero);
    }
    let tab = table();
    let mut out: Vec<(u64, u32)> = Vec::new();
    let push = |p: u64, out: &mut Vec<(u64, u32)>| match out.last_mut() {
        Some((q, e)) if *q == p => *e += 1,
        _ => out.push((p, 1)),
    };
    let mut m = n;
    if m < SPF_LIMIT as u128 {
        let mut k = m as usize;
        while k > 1 {
            let p = tab.spf[k] as usize;
            push(p as u64, &mut out);
            k /= p;
        }
        return Ok(out);
    }
    for &p in &tab.primes {
        let pp = p as u128;
        if pp * pp > m {
            break;
        }
        while m % pp == 0 {
            push(p, &mut out);
            m /= pp;
        }
        if m < SPF_LIMIT as u128 {
            let mut k = m as usize;
            while k > 1 {
                let q = tab.spf[k] as usize;
                push(q as u64, &mut out);
                k /= q;
            }
            return Ok(out);
        }
    }
    if m > 1 {
        let bound = TRIAL_DIVISION_BOUND as u128;
        let certified = m < bound * bound || (m <= u64::MAX as u128 && is_prime(m as u64));
        if !certified || m > u64::MAX as u128 {
            return Err(NtError::Unfactored(n));
        }
        push(m as u64, &mut out);
    }
    Ok(out)
}

/// Number of divisors.
pub fn tau(n: u64) -> u64 {
    factor(n as u128)
        .map(|f| f.iter().map(|&(_, e)| e as u64 + 1).product())
        .unwrap_or(0)
}

pub fn mobius(n: u64) -> i32 {
    match factor(n as u128) {
        Ok(f) if f.iter().all(|&(_, e)| e == 1) => {
            if f.len() % 2 == 0 {
                1
            } else {
                -1
            }
        }
        _ => 0,
    }
}

/// Distinct prime divisors of |n| (empty for 0 and 1).
pub fn prime_divisors(n: u128) -> Result<Vec<u64>, NtError> {
    if n == 0 {
        return Ok(Vec::new());
    }
    Ok(factor(n)?.into_iter().map(|(p, _)| p).collect())
}

/// Riemann zeta(2).
pub const ZETA_2: f64 = std::f64::consts::PI * std::f64::consts::PI / 6.0;

/// Neumaier's compensated summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(other.sum);
        self.add(other.comp);
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

impl std::iter::FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = CompensatedSum::new();
        for x in iter {
            s.add(x);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_small_and_large() {
        assert_eq!(factor(1).unwrap(), vec![]);
        assert_eq!(factor(3072).unwrap(), vec![(2, 10), (3, 1)]);
        let big = 999_983u128 * 1_000_003u128;
        assert_eq!(factor(big).unwrap(), vec![(999_983, 1), (1_000_003, 1)]);
        let p = 1_000_000_007u128;
        assert_eq!(factor(p * 4).unwrap(), vec![(2, 2), (1_000_000_007, 1)]);
        assert_eq!(factor(0), Err(NtError::Zero));
    }

    #[test]
    fn composite_cofactor_beyond_range_errors() {
        let p = 1_000_000_007u128;
        let q = 1_000_000_009u128;
        assert!(matches!(factor(p * q), Err(NtError::Unfactored(_))));
    }

    #[test]
    fn crt_and_inverse() {
        assert_eq!(mod_inv(4, 25), Some(19));
        assert_eq!(mod_inv(5, 25), None);
        assert_eq!(crt(&[(2, 5), (3, 7)]), Some((17, 35)));
        assert_eq!(crt(&[]), Some((0, 1)));
    }

    #[test]
    fn arithmetic_functions() {
        assert_eq!(tau(12), 6);
        assert_eq!(mobius(30), -1);
        assert_eq!(mobius(12), 0);
        assert_eq!(mobius(1), 1);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(561));
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let mut s = CompensatedSum::new();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.value(), 10.0);
    }
}

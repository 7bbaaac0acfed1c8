//! Dense univariate polynomials over the prime field F_p.
//!
//! Coefficients are stored lowest degree first and kept normalized (no
//! trailing zeros). Factorization is distinct-degree followed by a
//! deterministic equal-degree split, so every result is reproducible.

use num_bigint::BigUint;

use crate::nt::{mul_mod, pow_mod};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PolyMod {
    p: u64,
    coeffs: Vec<u64>,
}

impl PolyMod {
    pub fn new(p: u64, mut coeffs: Vec<u64>) -> Self {
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        PolyMod { p, coeffs }
    }

    pub fn zero(p: u64) -> Self {
        PolyMod { p, coeffs: Vec::new() }
    }

    pub fn one(p: u64) -> Self {
        PolyMod::new(p, vec![1])
    }

    /// The monomial x.
    pub fn x(p: u64) -> Self {
        PolyMod::new(p, vec![0, 1])
    }

    pub fn modulus(&self) -> u64 {
        self.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| (mul_mod(acc, x, self.p) + c) % self.p)
    }

    pub fn add(&self, other: &PolyMod) -> PolyMod {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + b) % self.p
            })
            .collect();
        PolyMod::new(self.p, v)
    }

    pub fn sub(&self, other: &PolyMod) -> PolyMod {
        let n = self.coeffs.len().max(other.coeffs.len());
        let v = (0..n)
            .map(|i| {
                let a = self.coeffs.get(i).copied().unwrap_or(0);
                let b = other.coeffs.get(i).copied().unwrap_or(0);
                (a + self.p - b) % self.p
            })
            .collect();
        PolyMod::new(self.p, v)
    }

    pub fn mul(&self, other: &PolyMod) -> PolyMod {
        if self.is_zero() || other.is_zero() {
            return PolyMod::zero(self.p);
        }
        let mut v = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                v[i + j] = (v[i + j] + mul_mod(a, b, self.p)) % self.p;
            }
        }
        PolyMod::new(self.p, v)
    }

    fn scale(&self, k: u64) -> PolyMod {
        PolyMod::new(
            self.p,
            self.coeffs.iter().map(|&c| mul_mod(c, k, self.p)).collect(),
        )
    }

    /// Quotient and remainder; panics on a zero divisor.
    pub fn div_rem(&self, divisor: &PolyMod) -> (PolyMod, PolyMod) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        let inv_lead = pow_mod(divisor.leading(), self.p - 2, self.p);
        let mut rem = self.coeffs.clone();
        let mut quot = vec![0u64; rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = mul_mod(*rem.last().unwrap(), inv_lead, self.p);
            quot[shift] = c;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let t = mul_mod(c, d, self.p);
                rem[shift + j] = (rem[shift + j] + self.p - t) % self.p;
            }
            while rem.last() == Some(&0) {
                rem.pop();
            }
        }
        (PolyMod::new(self.p, quot), PolyMod::new(self.p, rem))
    }

    pub fn rem(&self, divisor: &PolyMod) -> PolyMod {
        self.div_rem(divisor).1
    }

    pub fn monic(&self) -> PolyMod {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(pow_mod(self.leading(), self.p - 2, self.p))
    }

    /// Monic gcd.
    pub fn gcd(&self, other: &PolyMod) -> PolyMod {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn mul_mod(&self, other: &PolyMod, modulus: &PolyMod) -> PolyMod {
        self.mul(other).rem(modulus)
    }

    pub fn pow_mod_u64(&self, exp: u64, modulus: &PolyMod) -> PolyMod {
        let mut acc = PolyMod::one(self.p).rem(modulus);
        let mut base = self.rem(modulus);
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul_mod(&base, modulus);
            }
            base = base.mul_mod(&base, modulus);
            e >>= 1;
        }
        acc
    }

    pub fn pow_mod_big(&self, exp: &BigUint, modulus: &PolyMod) -> PolyMod {
        let mut acc = PolyMod::one(self.p).rem(modulus);
        let base = self.rem(modulus);
        for i in (0..exp.bits()).rev() {
            acc = acc.mul_mod(&acc, modulus);
            if exp.bit(i) {
                acc = acc.mul_mod(&base, modulus);
            }
        }
        acc
    }

    /// Roots in F_p by exhaustive evaluation; only sensible for small p.
    pub fn roots_brute_force(&self) -> Vec<u64> {
        (0..self.p).filter(|&x| self.eval(x) == 0).collect()
    }

    /// Distinct-degree factorization of a squarefree monic polynomial:
    /// pairs (product of all irreducible factors of degree k, k).
    pub fn distinct_degree_factors(&self) -> Vec<(PolyMod, usize)> {
        let p = self.p;
        let mut out = Vec::new();
        let mut rest = self.monic();
        let x = PolyMod::x(p);
        let mut h = x.rem(&rest);
        let mut k = 1;
        while rest.degree().unwrap_or(0) >= 2 * k {
            h = h.pow_mod_u64(p, &rest);
            let g = h.sub(&x).gcd(&rest);
            if g.degree().unwrap_or(0) > 0 {
                rest = rest.div_rem(&g).0;
                h = h.rem(&rest);
                out.push((g, k));
            }
            k += 1;
        }
        if let Some(d) = rest.degree() {
            if d > 0 {
                out.push((rest, d));
            }
        }
        out
    }

    /// Splits a monic product of distinct irreducibles of common degree `k`
    /// into its factors, sorted by coefficient vector.
    pub fn equal_degree_factors(&self, k: usize) -> Vec<PolyMod> {
        let mut out = Vec::new();
        self.edf_into(k, &mut out);
        out.sort_by(|a, b| a.coeffs.iter().rev().cmp(b.coeffs.iter().rev()));
        out
    }

    fn edf_into(&self, k: usize, out: &mut Vec<PolyMod>) {
        let n = self.degree().unwrap_or(0);
        if n == k {
            out.push(self.monic());
            return;
        }
        if k == 1 && self.p <= 64 {
            for r in self.roots_brute_force() {
                out.push(PolyMod::new(self.p, vec![self.p - r, 1]));
            }
            return;
        }
        let p = self.p;
        let exponent = (BigUint::from(p).pow(k as u32) - 1u32) / 2u32;
        let mut idx: u64 = p;
        loop {
            let cand = index_poly(p, idx, n);
            idx += 1;
            if cand.degree().unwrap_or(0) == 0 {
                continue;
            }
            let t = if p == 2 {
                let mut acc = cand.rem(self);
                let mut term = acc.clone();
                for _ in 1..k {
                    term = term.mul_mod(&term, self);
                    acc = acc.add(&term);
                }
                acc
            } else {
                cand.pow_mod_big(&exponent, self).sub(&PolyMod::one(p))
            };
            let g = t.gcd(self);
            let dg = g.degree().unwrap_or(0);
            if dg > 0 && dg < n {
                let other = self.div_rem(&g).0;
                g.edf_into(k, out);
                other.monic().edf_into(k, out);
                return;
            }
        }
    }

    /// Irreducible factors with their degrees, for a squarefree polynomial.
    pub fn factor_squarefree(&self) -> Vec<(PolyMod, usize)> {
        let mut out = Vec::new();
        for (g, k) in self.distinct_degree_factors() {
            for h in g.equal_degree_factors(k) {
                out.push((h, k));
            }
        }
        out.sort_by(|a, b| (a.1, a.0.coeffs.iter().rev().collect::<Vec<_>>())
            .cmp(&(b.1, b.0.coeffs.iter().rev().collect::<Vec<_>>())));
        out
    }

    /// True iff the polynomial has positive degree and no nontrivial factor.
    pub fn is_irreducible(&self) -> bool {
        let Some(n) = self.degree() else { return false };
        if n == 0 {
            return false;
        }
        let f = self.monic();
        let deriv = f.derivative();
        if f.gcd(&deriv).degree() != Some(0) {
            return false;
        }
        let ddf = f.distinct_degree_factors();
        ddf.len() == 1 && ddf[0].1 == n
    }

    pub fn derivative(&self) -> PolyMod {
        let v = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| mul_mod(c, i as u64 % self.p, self.p))
            .collect();
        PolyMod::new(self.p, v)
    }
}

/// Polynomial whose coefficients are the base-p digits of `idx`, truncated below degree `n`.
fn index_poly(p: u64, mut idx: u64, n: usize) -> PolyMod {
    let mut v = Vec::new();
    while idx > 0 && v.len() < n {
        v.push(idx % p);
        idx /= p;
    }
    PolyMod::new(p, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x2_plus_1_mod_5_splits() {
        let f = PolyMod::new(5, vec![1, 0, 1]);
        let fac = f.factor_squarefree();
        assert_eq!(fac.len(), 2);
        let roots: Vec<u64> = fac.iter().map(|(g, _)| (5 - g.coeffs()[0]) % 5).collect();
        let mut r = roots.clone();
        r.sort();
        assert_eq!(r, vec![2, 3]);
    }

    #[test]
    fn irreducibility_mod_p() {
        assert!(PolyMod::new(3, vec![1, 0, 1]).is_irreducible());
        assert!(!PolyMod::new(5, vec![1, 0, 1]).is_irreducible());
        // x^3 - x - 1 over F_2 is x^3 + x + 1
        assert!(PolyMod::new(2, vec![1, 1, 0, 1]).is_irreducible());
    }

    #[test]
    fn quartic_with_two_quadratic_factors() {
        // -1 and -2 are nonresidues mod 7
        let a = PolyMod::new(7, vec![1, 0, 1]);
        let b = PolyMod::new(7, vec![2, 0, 1]);
        let f = a.mul(&b);
        let fac = f.factor_squarefree();
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().all(|(_, k)| *k == 2));
        let prod = fac[0].0.mul(&fac[1].0);
        assert_eq!(prod, f);
    }

    #[test]
    fn edf_over_f2() {
        // the two irreducible cubics over F_2
        let a = PolyMod::new(2, vec![1, 1, 0, 1]);
        let b = PolyMod::new(2, vec![1, 0, 1, 1]);
        let fac = a.mul(&b).equal_degree_factors(3);
        assert_eq!(fac.len(), 2);
        assert!(fac.contains(&a) && fac.contains(&b));
    }

    #[test]
    fn linear_split_large_prime() {
        let p = 1_000_003u64;
        // (x - 5)(x - 77)(x - 1000)
        let f = PolyMod::new(p, vec![p - 5, 1])
            .mul(&PolyMod::new(p, vec![p - 77, 1]))
            .mul(&PolyMod::new(p, vec![p - 1000, 1]));
        let fac = f.factor_squarefree();
        let mut roots: Vec<u64> = fac.iter().map(|(g, _)| (p - g.coeffs()[0]) % p).collect();
        roots.sort();
        assert_eq!(roots, vec![5, 77, 1000]);
    }
}

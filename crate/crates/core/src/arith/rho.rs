use num_bigint::BigInt;
use num_traits::Zero;

use super::ArithError;
use crate::intpoly::{resultant, BinaryForm, IntPolynomial};
use crate::nt;
use crate::polymod::PolyMod;

/// Counts roots of a fixed integer polynomial modulo k.
///
/// At primes not dividing `res(P, P')` (equivalently neither the leading
/// coefficient nor the discriminant) each simple root mod p lifts uniquely,
/// so the count mod p^e equals the count mod p. Elsewhere roots are lifted
/// one power at a time by checking all p candidates above each root.
#[derive(Debug, Clone)]
pub struct RootCounter {
    poly: IntPolynomial,
    res: BigInt,
}

impl RootCounter {
    pub fn new(poly: IntPolynomial) -> Self {
        let res = if poly.degree().unwrap_or(0) >= 1 {
            resultant(&poly, &poly.derivative()).unwrap_or_default()
        } else {
            BigInt::zero()
        };
        RootCounter { poly, res }
    }

    pub fn poly(&self) -> &IntPolynomial {
        &self.poly
    }

    fn is_good(&self, p: u64) -> bool {
        !(&self.res % BigInt::from(p)).is_zero()
    }

    pub fn count(&self, k: u64) -> u64 {
        assert!(k >= 1, "modulus must be positive");
        nt::factor(k as u128)
            .expect("k fits the factoring range")
            .into_iter()
            .map(|(p, e)| self.count_prime_power(p, e))
            .product()
    }

    pub fn count_prime_power(&self, p: u64, e: u32) -> u64 {
        let pe = p.pow(e);
        match self.poly.degree() {
            None => return pe,
            Some(0) => {
                let c = &self.poly.coeffs()[0];
                return if (c % BigInt::from(pe)).is_zero() { pe } else { 0 };
            }
            _ => {}
        }
        if self.is_good(p) {
            return self.roots_mod_p(p);
        }
        let mut roots: Vec<u64> = (0..p).filter(|&x| self.poly.eval_mod(x, p) == 0).collect();
        let mut m = p;
        for _ in 1..e {
            let next = m * p;
            roots = roots
                .iter()
                .flat_map(|&r| (0..p).map(move |t| r + t * m))
                .filter(|&x| self.poly.eval_mod(x, next) == 0)
                .collect();
            m = next;
        }
        roots.len() as u64
    }

    fn roots_mod_p(&self, p: u64) -> u64 {
        if p <= 1000 {
            return (0..p).filter(|&x| self.poly.eval_mod(x, p) == 0).count() as u64;
        }
        let f = self.poly.to_mod_p(p).monic();
        let xp = PolyMod::x(p).pow_mod_u64(p, &f);
        let g = xp.sub(&PolyMod::x(p)).gcd(&f);
        g.degree().unwrap_or(0) as u64
    }
}

/// Number of x mod k with P(x) = 0 mod k.
pub fn rho_p(poly: &IntPolynomial, k: u64) -> u64 {
    RootCounter::new(poly.clone()).count(k)
}

/// Root count of F(x, 1), or 1 when F(1, 0) = 0.
pub fn rho_bar(form: &BinaryForm, k: u64) -> u64 {
    if form.leading().is_zero() {
        return 1;
    }
    rho_p(&form.dehomogenize(), k)
}

fn counters(forms: &[BinaryForm]) -> Vec<Option<RootCounter>> {
    forms
        .iter()
        .map(|f| (!f.leading().is_zero()).then(|| RootCounter::new(f.dehomogenize())))
        .collect()
}

fn rho_bar_sum(counters: &[Option<RootCounter>], p: u64) -> u64 {
    counters
        .iter()
        .map(|c| c.as_ref().map_or(1, |c| c.count_prime_power(p, 1)))
        .sum()
}

fn euler_factor(p: u64, numerator: u64) -> Result<f64, ArithError> {
    let denom = 1.0 - numerator as f64 / (p as f64 + 1.0);
    if denom <= 0.0 {
        return Err(ArithError::Pole(p));
    }
    Ok(1.0 / denom)
}

/// prod over p | k of (1 - sum_i rho_bar_i(p) / (p + 1))^-1.
pub fn h_star(forms: &[BinaryForm], k: u64) -> Result<f64, ArithError> {
    h_star_w(forms, k, 0)
}

/// `h_star` with the primes p <= w left out.
pub fn h_star_w(forms: &[BinaryForm], k: u64, w: u64) -> Result<f64, ArithError> {
    let cs = counters(forms);
    let mut acc = 1.0;
    for p in nt::prime_divisors(k as u128).expect("k fits the factoring range") {
        if p > w {
            acc *= euler_factor(p, rho_bar_sum(&cs, p))?;
        }
    }
    Ok(acc)
}

/// prod over p | k of (1 - (d_1 + ... + d_N) / (1 + p))^-1.
pub fn h_dagger(degrees: &[usize], k: u64) -> Result<f64, ArithError> {
    let total: u64 = degrees.iter().map(|&d| d as u64).sum();
    nt::prime_divisors(k as u128)
        .expect("k fits the factoring range")
        .into_iter()
        .try_fold(1.0, |acc, p| Ok(acc * euler_factor(p, total)?))
}

/// prod over p | d of (1 + 1/p)^-1.
pub fn h_small(d: u64) -> f64 {
    nt::prime_divisors(d as u128)
        .expect("d fits the factoring range")
        .into_iter()
        .map(|p| p as f64 / (p as f64 + 1.0))
        .product()
}

/// 1 - sum_i rho_bar_i(p) / (p + 1).
pub fn c_p(forms: &[BinaryForm], p: u64) -> f64 {
    1.0 - rho_bar_sum(&counters(forms), p) as f64 / (p as f64 + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(c)
    }

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn brute(p: &IntPolynomial, k: u64) -> u64 {
        (0..k).filter(|&x| p.eval_mod(x, k) == 0).count() as u64
    }

    #[test]
    fn rho_examples() {
        let f = poly(&[1, 0, 1]);
        assert_eq!(rho_p(&f, 5), 2);
        assert_eq!(rho_p(&f, 1), 1);
        assert_eq!(rho_p(&f, 4), 0);
        assert_eq!(rho_p(&f, 2), 1);
        assert_eq!(rho_bar(&form(&[1, 0, 1]), 13), 2);
        assert_eq!(rho_bar(&form(&[1, 0, 1]), 7), 0);
        assert_eq!(rho_bar(&form(&[0, 7]), 7), 1);
        assert_eq!(rho_bar(&form(&[0, 7]), 1234), 1);
    }

    #[test]
    fn rho_large_good_prime() {
        // x^2 + 1 splits iff p = 1 mod 4
        assert_eq!(rho_p(&poly(&[1, 0, 1]), 1_000_033), 2);
        assert_eq!(rho_p(&poly(&[1, 0, 1]), 1_000_003), 0);
    }

    #[test]
    fn rho_at_bad_prime_powers() {
        // x^2 - 4 = (x-2)(x+2) shares roots mod 2
        let f = poly(&[-4, 0, 1]);
        for k in [2, 4, 8, 16, 32, 64, 3, 9, 27] {
            assert_eq!(rho_p(&f, k), brute(&f, k), "k = {k}");
        }
        // non-monic: 2x + 1 has no root mod 2
        assert_eq!(rho_p(&poly(&[1, 2]), 8), 0);
        assert_eq!(rho_p(&poly(&[6]), 3), 3);
    }

    #[test]
    fn euler_products() {
        let g = [form(&[1, 0, 1])];
        assert!((h_star(&g, 5).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(h_star(&g, 1).unwrap(), 1.0);
        assert_eq!(h_star_w(&g, 5, 5).unwrap(), 1.0);
        assert!((h_dagger(&[2], 5).unwrap() - 1.5).abs() < 1e-12);
        assert!((h_small(5) - 5.0 / 6.0).abs() < 1e-12);
        assert!((c_p(&g, 5) - (1.0 - 2.0 / 6.0)).abs() < 1e-12);
        assert_eq!(h_dagger(&[2, 1], 2), Err(ArithError::Pole(2)));
        // rho_bar sums to 2 + 2 = p + 1 at p = 3 for two copies of x^2 + 2y^2
        let pair = [form(&[1, 0, 2]), form(&[1, 0, 2])];
        assert_eq!(h_star(&pair, 3), Err(ArithError::Pole(3)));
    }

    proptest! {
        #[test]
        fn multiplicative_on_coprime(m in 1u64..=500, n in 1u64..=500) {
            prop_assume!(nt::gcd_u64(m, n) == 1);
            for f in [poly(&[1, 0, 1]), poly(&[-1, -1, 0, 1]), poly(&[3, 1, 2]), poly(&[-4, 0, 1])] {
                let c = RootCounter::new(f.clone());
                prop_assert_eq!(c.count(m * n), c.count(m) * c.count(n));
                prop_assert_eq!(c.count(m * n), brute(&f, m * n));
            }
        }
    }

    #[test]
    fn hensel_stability() {
        for coeffs in [[1i64, 0, 1].as_slice(), &[-1, -1, 0, 1], &[6, 1, 1]] {
            let f = poly(coeffs);
            let c = RootCounter::new(f.clone());
            let bad = resultant(&f, &f.derivative()).unwrap();
            for p in nt::primes_up_to(10_000) {
                if (&bad % BigInt::from(p)).is_zero() {
                    continue;
                }
                let base = c.count(p);
                let mut pl = p * p;
                while pl <= 10_000 {
                    assert_eq!(c.count(pl), base);
                    assert_eq!(brute(&f, pl), base);
                    pl *= p;
                }
            }
        }
    }
}

use serde::Serialize;

use super::{eval_fn, h_dagger, restrict_w, ArithError, IdealFn, WModulus};
use crate::nt::{self, CompensatedSum};
use crate::numfield::{EnumerateOptions, IdealClass, IdealFactorization, NumberField};

fn check_good_above_w(field: &NumberField, w: &WModulus, x: u64) -> Result<(), ArithError> {
    for &p in field.bad_primes() {
        if p > w.w && p <= x && field.split_prime(p).is_err() {
            return Err(ArithError::BadPrimeAboveW(p));
        }
    }
    Ok(())
}

/// The size of the f-weighted sum over ideals of norm up to x prime to W.
///
/// Submultiplicative f: exp of the sum of f(p)/N(p) over degree-1 primes with
/// w < N(p) <= x. Otherwise the sum of f(a)/N(a) over squarefree products of
/// degree-1 primes with N(a) <= x and N(a) prime to W.
pub fn e_f(f: &IdealFn, field: &NumberField, x: f64, w: &WModulus) -> Result<f64, ArithError> {
    let xi = if x < 1.0 { 0 } else { x.floor() as u64 };
    check_good_above_w(field, w, xi)?;
    let mut sum = CompensatedSum::new();
    if f.submultiplicative {
        for p in nt::primes_up_to(xi) {
            if p <= w.w {
                continue;
            }
            for q in field.split_prime(p)?.iter().filter(|q| q.f == 1) {
                sum.add(f.rule_at(q, 1)? / p as f64);
            }
        }
        return Ok(sum.value().exp());
    }
    let opts = EnumerateOptions {
        squarefree: true,
        coprime_to: w.value().ok_or(ArithError::WOverflow(w.w))?,
        class: IdealClass::PCirc,
    };
    for a in field.enumerate_ideals(xi, &opts) {
        sum.add(eval_fn(f, &a)? / a.norm() as f64);
    }
    Ok(sum.value())
}

/// The multiplicative function u on integers up to a cap, zero off the
/// integers prime to W.
///
/// u(p^k) sums f_i(a) h_dagger(p^k) over the fields i and the products a of
/// degree-1 primes of K_i with norm p^k.
#[derive(Debug, Clone)]
pub struct UTable {
    cap: u64,
    w: u64,
    values: Vec<f64>,
    largest_prime: Vec<u32>,
    /// (p, k, u(p^k)) for p > w and p^k <= cap.
    prime_powers: Vec<(u64, u32, f64)>,
}

impl UTable {
    pub fn build(
        fs: &[IdealFn],
        fields: &[&NumberField],
        w: &WModulus,
        cap: u64,
    ) -> Result<Self, ArithError> {
        assert_eq!(fs.len(), fields.len(), "one function per field");
        let degrees: Vec<usize> = fields.iter().map(|k| k.degree()).collect();
        for k in fields {
            check_good_above_w(k, w, cap)?;
        }
        let n = cap as usize;
        let mut values = vec![0.0; n + 1];
        let mut largest_prime = vec![0u32; n + 1];
        let mut smallest_prime = vec![0u32; n + 1];
        for i in 2..=n {
            if smallest_prime[i] == 0 {
                for j in (i..=n).step_by(i) {
                    if smallest_prime[j] == 0 {
                        smallest_prime[j] = i as u32;
                    }
                    largest_prime[j] = i as u32;
                }
            }
        }
        if n >= 1 {
            values[1] = 1.0;
            largest_prime[1] = 1;
        }
        let mut prime_powers = Vec::new();
        let mut local: std::collections::HashMap<(u64, u32), f64> = Default::default();
        for p in nt::primes_up_to(cap) {
            if p <= w.w {
                continue;
            }
            let hd = h_dagger(&degrees, p)?;
            let mut max_k = 0u32;
            let mut pk = 1u64;
            while pk.saturating_mul(p) <= cap {
                pk *= p;
                max_k += 1;
            }
            let mut totals = vec![0.0; max_k as usize + 1];
            for (f, field) in fs.iter().zip(fields) {
                let primes: Vec<_> = field.split_prime(p)?.iter().copied().filter(|q| q.f == 1).collect();
                // coefficient k of prod_j sum_e f(q_j^e) X^e
                let mut conv = vec![0.0; max_k as usize + 1];
                conv[0] = 1.0;
                for q in primes {
                    let series: Vec<f64> =
                        (0..=max_k).map(|e| f.rule_at(&q, e)).collect::<Result<_, _>>()?;
                    let mut next = vec![0.0; max_k as usize + 1];
                    for (i, &c) in conv.iter().enumerate() {
                        for (e, &s) in series.iter().enumerate().take(max_k as usize + 1 - i) {
                            next[i + e] += c * s;
                        }
                    }
                    conv = next;
                }
                for k in 1..=max_k as usize {
                    totals[k] += conv[k];
                }
            }
            for k in 1..=max_k {
                let v = totals[k as usize] * hd;
                local.insert((p, k), v);
                prime_powers.push((p, k, v));
            }
        }
        for i in 2..=n {
            let p = smallest_prime[i] as usize;
            let mut m = i;
            let mut k = 0u32;
            while m % p == 0 {
                m /= p;
                k += 1;
            }
            values[i] = local.get(&(p as u64, k)).copied().unwrap_or(0.0) * values[m];
        }
        Ok(UTable { cap, w: w.w, values, largest_prime, prime_powers })
    }

    pub fn cap(&self) -> u64 {
        self.cap
    }

    pub fn get(&self, a: u64) -> Option<f64> {
        self.values.get(a as usize).copied()
    }

    /// Largest prime factor, with P+(1) = 1.
    pub fn largest_prime(&self, a: u64) -> u64 {
        self.largest_prime[a as usize] as u64
    }

    pub fn prime_powers(&self) -> &[(u64, u32, f64)] {
        &self.prime_powers
    }

    pub fn w(&self) -> u64 {
        self.w
    }
}

/// Smallest C with u(p^k) <= C^k over the tabulated prime powers.
pub fn empirical_c(table: &UTable) -> f64 {
    table
        .prime_powers()
        .iter()
        .map(|&(_, k, v)| v.powf(1.0 / k as f64))
        .fold(1.0, f64::max)
}

/// u(a) by enumerating tuples of ideals directly.
pub fn u_direct(fs: &[IdealFn], fields: &[&NumberField], a: u64) -> Result<f64, ArithError> {
    let degrees: Vec<usize> = fields.iter().map(|k| k.degree()).collect();
    let opts = EnumerateOptions { class: IdealClass::PCirc, ..Default::default() };
    let per_field: Vec<Vec<IdealFactorization>> = fields
        .iter()
        .map(|k| {
            k.enumerate_ideals(a, &opts)
                .into_iter()
                .filter(|i| a as u128 % i.norm() == 0)
                .collect()
        })
        .collect();
    fn go(
        i: usize,
        remaining: u64,
        used_norm: u64,
        fs: &[IdealFn],
        per_field: &[Vec<IdealFactorization>],
        degrees: &[usize],
        acc: f64,
        total: &mut CompensatedSum,
    ) -> Result<(), ArithError> {
        if i == per_field.len() {
            if remaining == 1 {
                total.add(acc);
            }
            return Ok(());
        }
        for ideal in &per_field[i] {
            let n = ideal.norm() as u64;
            if remaining % n != 0 || nt::gcd_u64(n, used_norm) != 1 {
                continue;
            }
            let weight = eval_fn(&fs[i], ideal)? * h_dagger(degrees, n)?;
            go(i + 1, remaining / n, used_norm * n, fs, per_field, degrees, acc * weight, total)?;
        }
        Ok(())
    }
    let mut total = CompensatedSum::new();
    go(0, a, 1, fs, &per_field, &degrees, 1.0, &mut total)?;
    Ok(total.value())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EstResult {
    /// Sum of u(a)/a over a > S with P+(a) < T, a prime to W, a <= cap.
    pub e: f64,
    /// Sum of u(b)/b over b <= T prime to W.
    pub partial: f64,
    /// The support of the first sum may extend past the cap.
    pub truncated: bool,
}

pub fn e_st(table: &UTable, s: f64, t: f64) -> EstResult {
    let mut e = CompensatedSum::new();
    let mut partial = CompensatedSum::new();
    for a in 1..=table.cap {
        let u = table.values[a as usize];
        if u == 0.0 {
            continue;
        }
        let af = a as f64;
        if af <= t {
            partial.add(u / af);
        }
        if af > s && (table.largest_prime(a) as f64) < t {
            e.add(u / af);
        }
    }
    let truncated = table
        .prime_powers
        .iter()
        .any(|&(p, k, v)| k == 1 && v > 0.0 && (p as f64) < t);
    EstResult { e: e.value(), partial: partial.value(), truncated }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KnutPoint {
    pub x: u64,
    pub numerator: f64,
    pub denominator: f64,
    pub ratio: f64,
}

/// Weighted full sum over squarefree W-coprime sum, at each x.
///
/// Numerator: f(a_W) f_dagger(a_W) / N(a) over all ideals of norm <= x.
/// Denominator: f(b) / N(b) over squarefree b of norm <= x prime to W.
/// Only ideals above primes not dividing the discriminant are enumerated.
pub fn knut_ratio(
    f: &IdealFn,
    f_dagger: &IdealFn,
    m: f64,
    field: &NumberField,
    w: &WModulus,
    xs: &[u64],
) -> Result<Vec<KnutPoint>, ArithError> {
    let needed = 2.0 * (f.class.a + m);
    if (w.w as f64) <= needed {
        return Err(ArithError::WTooSmall { w: w.w, needed });
    }
    let big_w = w.value().ok_or(ArithError::WOverflow(w.w))?;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let mut num = CompensatedSum::new();
        for a in field.enumerate_ideals(x, &EnumerateOptions::default()) {
            let aw = restrict_w(&a, w);
            num.add(eval_fn(f, &aw)? * eval_fn(f_dagger, &aw)? / a.norm() as f64);
        }
        let opts = EnumerateOptions { squarefree: true, coprime_to: big_w, class: IdealClass::All };
        let mut den = CompensatedSum::new();
        for b in field.enumerate_ideals(x, &opts) {
            den.add(eval_fn(f, &b)? / b.norm() as f64);
        }
        let (numerator, denominator) = (num.value(), den.value());
        out.push(KnutPoint { x, numerator, denominator, ratio: numerator / denominator });
    }
    Ok(out)
}

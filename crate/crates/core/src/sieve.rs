//! Smooth/rough splitting of form values, the four-way case classifier,
//! truncated upper-bound sieve weights, and exact counts over lattice points.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::arith::{eval_fn, ArithError, IdealFn, WModulus};
use crate::lattice2d::{self, congruence_lattice, Lattice2, LatticeError, PointOptions, ROW_CHUNK};
use crate::nt::{self, CompensatedSum, NtError};
use crate::numfield::{FieldError, IdealFactorization, NumberField, PrimeExclusion};
use crate::region::Region;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SieveError {
    #[error("invalid plan: {0}")]
    Plan(String),
    #[error("prime {0} of a field discriminant exceeds w and does not divide q_G")]
    BadPrimeAboveW(u64),
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Factor(#[from] NtError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

#[derive(Debug, Clone)]
pub struct SievePlan {
    pub z: f64,
    pub omega: f64,
    pub eta: f64,
    pub gamma: f64,
    pub w: WModulus,
    pub q_g: u64,
}

pub const DEFAULT_ETA: f64 = 2.0 / 3.0;

impl SievePlan {
    /// `z = V^omega`; `gamma` defaults to `eta / 2`.
    pub fn new(vol: f64, omega: f64, eta: f64, w: WModulus, q_g: u64) -> Result<Self, SieveError> {
        if !(omega > 0.0 && omega < 1.0) {
            return Err(SieveError::Plan(format!("omega must lie in (0, 1), got {omega}")));
        }
        if !(eta > 0.0 && eta < 1.0) {
            return Err(SieveError::Plan(format!("eta must lie in (0, 1), got {eta}")));
        }
        if !(vol >= 1.0) {
            return Err(SieveError::Plan(format!("volume must be at least 1, got {vol}")));
        }
        if q_g == 0 {
            return Err(SieveError::Plan("q_G must be positive".into()));
        }
        Ok(SievePlan { z: vol.powf(omega), omega, eta, gamma: eta / 2.0, w, q_g })
    }

    /// Primes left out of every value: those up to w and those dividing q_G.
    pub fn exclusion(&self) -> PrimeExclusion {
        PrimeExclusion::up_to_and_dividing(self.w.w, self.q_g as u128).expect("q_G fits the factoring range")
    }

    /// `ln z * ln ln z`, clamped to 0 when `z <= e^e`.
    pub fn small_threshold(&self) -> f64 {
        small_threshold(self.z)
    }
}

fn small_threshold(z: f64) -> f64 {
    if z <= std::f64::consts::E.powf(std::f64::consts::E) {
        0.0
    } else {
        z.ln() * z.ln().ln()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Case {
    I,
    II,
    III,
    IV,
}

impl Case {
    pub const ALL: [Case; 4] = [Case::I, Case::II, Case::III, Case::IV];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// `n = a b` with `a` the longest prefix product (primes ascending) at most z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SmoothRoughSplit {
    pub a: u128,
    pub b: u128,
    /// Largest prime of `a`; 1 when `a = 1`.
    pub p_plus_a: u64,
    /// Smallest prime of `b`; `None` (infinity) when `b = 1`.
    pub p_minus_b: Option<u64>,
}

/// Split from a factorization with primes in increasing order.
pub fn split_factored(factors: &[(u64, u32)], z: f64) -> SmoothRoughSplit {
    debug_assert!(factors.windows(2).all(|w| w[0].0 < w[1].0));
    let mut a: u128 = 1;
    let mut p_plus_a = 1;
    let mut cut = factors.len();
    for (i, &(p, e)) in factors.iter().enumerate() {
        let next = (p as u128).checked_pow(e).and_then(|pe| a.checked_mul(pe));
        match next {
            Some(v) if (v as f64) <= z => {
                a = v;
                p_plus_a = p;
            }
            _ => {
                cut = i;
                break;
            }
        }
    }
    let b = factors[cut..].iter().fold(1u128, |acc, &(p, e)| acc * (p as u128).pow(e));
    SmoothRoughSplit { a, b, p_plus_a, p_minus_b: factors.get(cut).map(|&(p, _)| p) }
}

pub fn split_smooth_rough(n: u128, z: f64) -> Result<SmoothRoughSplit, SieveError> {
    if n == 0 {
        return Err(SieveError::Hypothesis("n must be positive".into()));
    }
    Ok(split_factored(&nt::factor(n)?, z))
}

/// Precedence I, II, III, IV:
///
/// | label | P-(b)                        | a                    |
/// |-------|------------------------------|----------------------|
/// | I     | `>= z^(eta/2)`               | any                  |
/// | II    | `< z^(eta/2)`                | `<= z^(1-eta)`       |
/// | III   | `<= ln z ln ln z`            | `> z^(1-eta)`        |
/// | IV    | in `(ln z ln ln z, z^(eta/2))` | `> z^(1-eta)`      |
///
/// Since `a <= z` always, the rows cover every split.
pub fn classify_case(split: &SmoothRoughSplit, z: f64, eta: f64) -> Case {
    let rough = z.powf(eta / 2.0);
    let Some(pm) = split.p_minus_b else { return Case::I };
    let pm = pm as f64;
    if pm >= rough {
        Case::I
    } else if split.a as f64 <= z.powf(1.0 - eta) {
        Case::II
    } else if pm <= small_threshold(z) {
        Case::III
    } else {
        Case::IV
    }
}

/// Upper-bound sieve weights: `mu(d)` on squarefree `d | P(z_level)` with at
/// most `r` prime factors, `r` the largest even number for which every such
/// `d` is at most `level_d`. Truncating inclusion-exclusion after an even
/// number of terms gives sums over divisors that dominate `[n = 1]`.
pub fn lambda_plus(z_level: f64, level_d: f64) -> BTreeMap<u64, i8> {
    let primes: Vec<u64> = if z_level <= 2.0 {
        vec![]
    } else {
        nt::primes_up_to(z_level.ceil() as u64).into_iter().filter(|&p| (p as f64) < z_level).collect()
    };
    let mut r = 0;
    loop {
        let next = r + 2;
        if next > primes.len() {
            break;
        }
        let largest: f64 = primes.iter().rev().take(next).map(|&p| p as f64).product();
        if largest > level_d {
            break;
        }
        r = next;
    }
    let mut out = BTreeMap::new();
    fn extend(primes: &[u64], start: usize, d: u64, k: usize, r: usize, out: &mut BTreeMap<u64, i8>) {
        out.insert(d, if k % 2 == 0 { 1 } else { -1 });
        if k == r {
            return;
        }
        for i in start..primes.len() {
            extend(primes, i + 1, d * primes[i], k + 1, r, out);
        }
    }
    extend(&primes, 0, 1, 0, r, &mut out);
    out
}

/// Fields, functions, region and lattice of one computation.
pub struct SieveContext<'a> {
    pub fields: Vec<&'a NumberField>,
    pub fns: Vec<IdealFn>,
    pub region: &'a Region,
    pub lattice: &'a Lattice2,
    pub plan: &'a SievePlan,
}

/// One primitive point: its value parts away from q_G W, split and weight.
#[derive(Debug, Clone, PartialEq)]
pub struct PointRecord {
    pub s: i64,
    pub t: i64,
    pub parts: Vec<IdealFactorization>,
    pub split: SmoothRoughSplit,
    pub case: Case,
    pub weight: f64,
}

impl<'a> SieveContext<'a> {
    fn check(&self) -> Result<PrimeExclusion, SieveError> {
        if self.fields.len() != self.fns.len() {
            return Err(SieveError::Hypothesis("one function per field".into()));
        }
        let ex = self.plan.exclusion();
        for k in &self.fields {
            if let Some(&p) = k.bad_primes().iter().find(|&&p| !ex.excludes(p)) {
                return Err(SieveError::BadPrimeAboveW(p));
            }
        }
        Ok(ex)
    }

    /// `None` when some form vanishes at the point.
    fn evaluate(&self, ex: &PrimeExclusion, s: i64, t: i64) -> Result<Option<PointRecord>, SieveError> {
        let mut parts = Vec::with_capacity(self.fields.len());
        for k in &self.fields {
            if k.value(s, t)? == 0 {
                return Ok(None);
            }
            parts.push(k.factor_principal(s, t, ex)?);
        }
        let mut primes: BTreeMap<u64, u32> = BTreeMap::new();
        for part in &parts {
            for (q, e) in part.factors() {
                *primes.entry(q.p).or_default() += e;
            }
        }
        let factors: Vec<(u64, u32)> = primes.into_iter().collect();
        let split = split_factored(&factors, self.plan.z);
        let case = classify_case(&split, self.plan.z, self.plan.eta);
        let mut weight = 1.0;
        for (f, part) in self.fns.iter().zip(&parts) {
            weight *= eval_fn(f, part)?;
        }
        Ok(Some(PointRecord { s, t, parts, split, case, weight }))
    }

    /// Classifies every primitive point of region and lattice, row-major.
    pub fn records(&self) -> Result<Vec<PointRecord>, SieveError> {
        let ex = self.check()?;
        let opts = PointOptions { primitive: true, residue: None };
        let mut out = Vec::new();
        for (s, t) in lattice2d::enumerate_points(self.lattice, self.region, &opts) {
            if let Some(r) = self.evaluate(&ex, s, t)? {
                out.push(r);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CaseTotals {
    pub totals: [f64; 4],
    pub counts: [u64; 4],
    /// Primitive points at which some form vanishes; excluded from the sums.
    pub zero_points: u64,
}

impl CaseTotals {
    /// Sum of the four totals in case order.
    pub fn lhs(&self) -> f64 {
        self.totals.iter().fold(0.0, |acc, x| acc + x)
    }

    pub fn points(&self) -> u64 {
        self.counts.iter().sum()
    }
}

#[derive(Default)]
struct CaseAccumulator {
    sums: [CompensatedSum; 4],
    counts: [u64; 4],
    zero_points: u64,
}

impl CaseAccumulator {
    fn merge(&mut self, other: &CaseAccumulator) {
        for i in 0..4 {
            self.sums[i].merge(&other.sums[i]);
            self.counts[i] += other.counts[i];
        }
        self.zero_points += other.zero_points;
    }
}

/// Per-case sums of the product of the restricted functions over primitive
/// points, sharded over fixed row chunks merged in row order.
pub fn case_sums(ctx: &SieveContext) -> Result<CaseTotals, SieveError> {
    let ex = ctx.check()?;
    let opts = PointOptions { primitive: true, residue: None };
    let chunks = lattice2d::row_chunks(ctx.region, ROW_CHUNK);
    let partials: Vec<Result<CaseAccumulator, SieveError>> = chunks
        .into_par_iter()
        .map(|rows| {
            let mut acc = CaseAccumulator::default();
            let mut err = None;
            lattice2d::for_each_point_in_rows(ctx.lattice, ctx.region, &opts, rows, |s, t| {
                if err.is_some() {
                    return;
                }
                match ctx.evaluate(&ex, s, t) {
                    Ok(Some(r)) => {
                        acc.sums[r.case.index()].add(r.weight);
                        acc.counts[r.case.index()] += 1;
                    }
                    Ok(None) => acc.zero_points += 1,
                    Err(e) => err = Some(e),
                }
            });
            err.map_or(Ok(acc), Err)
        })
        .collect();
    let mut total = CaseAccumulator::default();
    for p in partials {
        total.merge(&p?);
    }
    Ok(CaseTotals {
        totals: [0, 1, 2, 3].map(|i| total.sums[i].value()),
        counts: total.counts,
        zero_points: total.zero_points,
    })
}

/// Membership test for the point sets counted by `u_gamma_count`.
fn meets_u_conditions(
    rec: &PointRecord,
    ideals: &[IdealFactorization],
    threshold: f64,
) -> bool {
    for (part, a) in rec.parts.iter().zip(ideals) {
        if !part.in_p() {
            return false;
        }
        // a | part with a and part / a coprime: exponents agree on a's support
        for (q, e) in a.factors() {
            match part.factors().iter().find(|(r, _)| r == q) {
                Some((_, f)) if f == e => {}
                _ => return false,
            }
        }
        for (q, _) in part.factors() {
            if !a.factors().iter().any(|(r, _)| r == q) {
                if (q.p as f64) < threshold {
                    return false;
                }
            }
        }
    }
    true
}

fn check_u_ideals(ctx: &SieveContext, ideals: &[IdealFactorization]) -> Result<(), SieveError> {
    if ideals.len() != ctx.fields.len() {
        return Err(SieveError::Hypothesis("one ideal per field".into()));
    }
    let qw = ctx.plan.exclusion();
    for a in ideals {
        if !a.in_p() {
            return Err(SieveError::Hypothesis("ideals must lie in the class P".into()));
        }
        if a.rational_primes().iter().any(|&p| qw.excludes(p)) {
            return Err(SieveError::Hypothesis("ideal norms must be prime to q_G W".into()));
        }
    }
    Ok(())
}

/// Primitive points of region and lattice whose value parts away from q_G W
/// lie in P, are divisible by `a_i` with cofactor prime to `a_i`, and whose
/// remaining primes are all at least `z^gamma`.
pub fn u_gamma_count(ctx: &SieveContext, ideals: &[IdealFactorization], gamma: f64) -> Result<u64, SieveError> {
    check_u_ideals(ctx, ideals)?;
    let ex = ctx.check()?;
    let lambda = congruence_lattice(&ctx.fields, ideals, ctx.lattice)?;
    let threshold = ctx.plan.z.powf(gamma);
    let opts = PointOptions { primitive: true, residue: None };
    let mut n = 0;
    for (s, t) in lattice2d::enumerate_points(&lambda, ctx.region, &opts) {
        if let Some(rec) = ctx.evaluate(&ex, s, t)? {
            if meets_u_conditions(&rec, ideals, threshold) {
                n += 1;
            }
        }
    }
    Ok(n)
}

/// The same points at threshold `z^(eta/2)`, each weighted by
/// `prod_i A_i^Omega(part_i / a_i)`.
pub fn u_weighted(ctx: &SieveContext, ideals: &[IdealFactorization]) -> Result<f64, SieveError> {
    check_u_ideals(ctx, ideals)?;
    let ex = ctx.check()?;
    let lambda = congruence_lattice(&ctx.fields, ideals, ctx.lattice)?;
    let threshold = ctx.plan.z.powf(ctx.plan.eta / 2.0);
    let opts = PointOptions { primitive: true, residue: None };
    let mut sum = CompensatedSum::new();
    for (s, t) in lattice2d::enumerate_points(&lambda, ctx.region, &opts) {
        if let Some(rec) = ctx.evaluate(&ex, s, t)? {
            if meets_u_conditions(&rec, ideals, threshold) {
                let mut wgt = 1.0;
                for ((part, a), f) in rec.parts.iter().zip(ideals).zip(&ctx.fns) {
                    let omega = part.big_omega() - a.big_omega();
                    wgt *= f.class.a.powi(omega as i32);
                }
                sum.add(wgt);
            }
        }
    }
    Ok(sum.value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::BinaryForm;
    use crate::numfield::PrimeIdeal;

    fn field(c: &[i64]) -> NumberField {
        NumberField::new(BinaryForm::from_i64(c).unwrap()).unwrap()
    }

    #[test]
    fn split_examples() {
        let s = split_smooth_rough(3072, 100.0).unwrap();
        assert_eq!((s.a, s.b), (1, 3072));
        assert_eq!((s.p_plus_a, s.p_minus_b), (1, Some(2)));
        let s = split_smooth_rough(65, 100.0).unwrap();
        assert_eq!((s.a, s.b, s.p_minus_b), (65, 1, None));
        let s = split_smooth_rough(1, 100.0).unwrap();
        assert_eq!((s.a, s.b, s.p_plus_a, s.p_minus_b), (1, 1, 1, None));
        // 2^3 * 3 * 7 * 11: prefix 24 fits, 168 does not
        let s = split_smooth_rough(8 * 3 * 7 * 11, 100.0).unwrap();
        assert_eq!((s.a, s.b), (24, 77));
        assert!(split_smooth_rough(0, 10.0).is_err());
    }

    #[test]
    fn case_examples() {
        let z = 100.0;
        let eta = DEFAULT_ETA;
        let sp = |a, b, pm| SmoothRoughSplit { a, b, p_plus_a: 1, p_minus_b: pm };
        assert_eq!(classify_case(&sp(65, 1, None), z, eta), Case::I);
        assert_eq!(classify_case(&sp(1, 3072, Some(2)), z, eta), Case::II);
        assert_eq!(classify_case(&sp(97, 1, None), z, eta), Case::I);
        // z^(1/3) ~ 4.64 < a, P-(b) = 2 <= ln 100 ln ln 100 ~ 7.03
        assert_eq!(classify_case(&sp(5, 2, Some(2)), z, eta), Case::III);
        // threshold clamps to 0 for z <= e^e, so III is empty there
        assert_eq!(classify_case(&sp(5, 2, Some(2)), 15.0, 0.9), Case::IV);
        let big: f64 = 1e12;
        let t = big.ln() * big.ln().ln();
        assert!(t > 80.0 && t < 100.0);
        let a_big = 1e9 as u128;
        assert_eq!(classify_case(&sp(a_big, 101, Some(101)), big, eta), Case::IV);
        assert_eq!(classify_case(&sp(a_big, 79, Some(79)), big, eta), Case::III);
    }

    #[test]
    fn split_laws_exhaustive() {
        for z in [10.0, 100.0, 1000.0] {
            for n in 1..=100_000u128 {
                let fac = nt::factor(n).unwrap();
                let s = split_factored(&fac, z);
                assert_eq!(s.a * s.b, n);
                assert_eq!(nt::gcd_i128(s.a as i128, s.b as i128), 1);
                assert!(s.p_minus_b.is_none_or(|p| p > s.p_plus_a));
                assert!(s.a as f64 <= z);
                if let Some(p) = s.p_minus_b {
                    let e = fac.iter().find(|f| f.0 == p).unwrap().1;
                    assert!((s.a * (p as u128).pow(e)) as f64 > z, "n = {n}, z = {z}");
                }
                let c = classify_case(&s, z, DEFAULT_ETA);
                assert!(Case::ALL.contains(&c));
            }
        }
    }

    fn divisor_sum(weights: &BTreeMap<u64, i8>, n: u64) -> i64 {
        weights.iter().filter(|(d, _)| n % **d == 0).map(|(_, &w)| w as i64).sum()
    }

    fn squarefree_divisors(primes: &[u64]) -> Vec<u64> {
        let mut out = vec![1u64];
        for &p in primes {
            let more: Vec<u64> = out.iter().map(|d| d * p).collect();
            out.extend(more);
        }
        out
    }

    #[test]
    fn sieve_weights_examples() {
        assert_eq!(lambda_plus(1.5, 100.0), BTreeMap::from([(1, 1)]));
        let w = lambda_plus(20.0, 400.0);
        assert_eq!(w[&1], 1);
        assert!(w.keys().all(|&d| d <= 400));
        assert!(w.values().all(|v| v.abs() <= 1));
        let primes = nt::primes_up_to(19);
        for n in squarefree_divisors(&primes) {
            let s = divisor_sum(&w, n);
            if n == 1 {
                assert_eq!(s, 1);
            } else {
                assert!(s >= 0, "n = {n}");
            }
        }
    }

    #[test]
    fn sieve_inequality_exhaustive() {
        for z in 2..=30u64 {
            for level in [1.0, 10.0, 100.0, (z * z) as f64, 1e6] {
                let w = lambda_plus(z as f64, level);
                assert!(w.keys().all(|&d| d as f64 <= level.max(1.0)));
                let primes: Vec<u64> = nt::primes_up_to(z).into_iter().filter(|&p| p < z).collect();
                for n in squarefree_divisors(&primes) {
                    let s = divisor_sum(&w, n);
                    let mobius_sum = if n == 1 { 1 } else { 0 };
                    assert!(s >= mobius_sum, "z = {z}, D = {level}, n = {n}");
                }
            }
        }
    }

    fn gaussian_setup() -> (NumberField, Region, Lattice2, SievePlan) {
        let k = field(&[1, 0, 1]);
        let r = Region::annulus(0.0, 0.0, 1.0, 40.0).unwrap();
        let g = Lattice2::standard();
        let plan = SievePlan::new(r.vol(), 0.3, DEFAULT_ETA, WModulus::new(11), 1).unwrap();
        (k, r, g, plan)
    }

    #[test]
    fn case_sums_partition_and_constant_function() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::one()], region: &r, lattice: &g, plan: &plan };
        let totals = case_sums(&ctx).unwrap();
        let prim = lattice2d::count_points(&g, &r, &PointOptions { primitive: true, residue: None });
        assert_eq!(totals.zero_points, 0);
        assert_eq!(totals.points(), prim);
        assert_eq!(totals.lhs(), prim as f64);
        assert!((0..4).all(|i| totals.totals[i] == totals.counts[i] as f64));
    }

    /// Classifies each point from scratch: trial division of x^2 + y^2.
    fn reference_case_sums(radius_in: f64, radius_out: f64, w: u64, z: f64, eta: f64) -> [f64; 4] {
        let mut out = [0.0; 4];
        let r = radius_out.ceil() as i64;
        for t in -r..=r {
            for s in -r..=r {
                let n2 = (s * s + t * t) as f64;
                if n2 < radius_in * radius_in || n2 > radius_out * radius_out || nt::gcd_i128(s as i128, t as i128) != 1 {
                    continue;
                }
                let mut n = (s * s + t * t) as u64;
                let mut fac = vec![];
                let mut p = 2;
                while p * p <= n {
                    let mut e = 0;
                    while n % p == 0 {
                        n /= p;
                        e += 1;
                    }
                    if e > 0 {
                        fac.push((p, e));
                    }
                    p += 1;
                }
                if n > 1 {
                    fac.push((n, 1));
                }
                let fac: Vec<(u64, u32)> = fac.into_iter().filter(|&(p, _)| p > w).collect();
                // tau over Z[i]: each split p^e contributes e + 1
                let weight: f64 = fac.iter().map(|&(_, e)| (e + 1) as f64).product();
                let sp = split_factored(&fac, z);
                out[classify_case(&sp, z, eta).index()] += weight;
            }
        }
        out
    }

    #[test]
    fn case_sums_match_reference_for_tau() {
        let k = field(&[1, 0, 1]);
        let radius = (1e4 / std::f64::consts::PI + 1.0).sqrt();
        let r = Region::annulus(0.0, 0.0, 1.0, radius).unwrap();
        assert!((r.vol() - 1e4).abs() < 1e-6);
        let g = Lattice2::standard();
        // w = 11 leaves only primes >= 13 > z^(1/3), so all points fall in case I
        for (w, omega, eta, min_cases) in [(11, 0.3, DEFAULT_ETA, 1), (2, 0.6, 0.9, 2)] {
            let plan = SievePlan::new(r.vol(), omega, eta, WModulus::new(w), 1).unwrap();
            let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::tau_k()], region: &r, lattice: &g, plan: &plan };
            let got = case_sums(&ctx).unwrap();
            let want = reference_case_sums(1.0, radius, w, plan.z, plan.eta);
            assert_eq!(got.totals, want, "w = {w}");
            assert!(got.counts.iter().filter(|&&c| c > 0).count() >= min_cases, "{got:?}");
        }
    }

    #[test]
    fn records_give_every_point_one_label() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::tau_k()], region: &r, lattice: &g, plan: &plan };
        let recs = ctx.records().unwrap();
        let totals = case_sums(&ctx).unwrap();
        let mut counts = [0u64; 4];
        for rec in &recs {
            counts[rec.case.index()] += 1;
            assert_eq!(classify_case(&rec.split, plan.z, plan.eta), rec.case);
        }
        assert_eq!(counts, totals.counts);
    }

    #[test]
    fn u_gamma_matches_double_loop() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::one()], region: &r, lattice: &g, plan: &plan };
        let a = IdealFactorization::prime(PrimeIdeal::degree_one(13, 5));
        for gamma in [0.0, 0.1, plan.eta / 2.0, 0.5] {
            let got = u_gamma_count(&ctx, std::slice::from_ref(&a), gamma).unwrap();
            let threshold = plan.z.powf(gamma);
            let mut want = 0;
            for t in -40i64..=40 {
                for s in -40i64..=40 {
                    let n = (s * s + t * t) as u64;
                    if !(1..=1600).contains(&n) || nt::gcd_i128(s as i128, t as i128) != 1 {
                        continue;
                    }
                    if (s - 5 * t).rem_euclid(13) != 0 {
                        continue;
                    }
                    let mut m = n;
                    let mut v13 = 0;
                    while m % 13 == 0 {
                        m /= 13;
                        v13 += 1;
                    }
                    if v13 != 1 {
                        continue;
                    }
                    let rough = nt::factor(m as u128)
                        .unwrap()
                        .into_iter()
                        .filter(|&(p, _)| p > 11)
                        .all(|(p, _)| p as f64 >= threshold);
                    if rough {
                        want += 1;
                    }
                }
            }
            assert_eq!(got, want, "gamma = {gamma}");
            let all = lattice2d::count_points(
                &congruence_lattice(&[&k], std::slice::from_ref(&a), &g).unwrap(),
                &r,
                &PointOptions { primitive: true, residue: None },
            );
            assert!(got <= all);
        }
    }

    #[test]
    fn u_gamma_trivial_ideals_extreme_threshold() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::one()], region: &r, lattice: &g, plan: &plan };
        let got = u_gamma_count(&ctx, &[IdealFactorization::one()], 1e6).unwrap();
        let want = ctx.records().unwrap().iter().filter(|rec| rec.parts[0].is_one()).count() as u64;
        assert_eq!(got, want);
        assert!(want > 0);
    }

    #[test]
    fn u_gamma_monotone_and_dominates_weighted() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::tau_k()], region: &r, lattice: &g, plan: &plan };
        // |F| <= 1600 on the region bounds Omega of the rough part
        let rough = plan.z.powf(plan.eta / 2.0);
        let omega_max = (1600f64.ln() / rough.ln()).floor() as i32;
        let opts = crate::numfield::EnumerateOptions {
            squarefree: false,
            coprime_to: 11 * 7 * 5 * 3 * 2,
            class: crate::numfield::IdealClass::P,
        };
        for a in k.enumerate_ideals(60, &opts) {
            let a = [a];
            let counts: Vec<u64> = [0.0, 0.1, 0.2, plan.eta / 2.0]
                .iter()
                .map(|&gm| u_gamma_count(&ctx, &a, gm).unwrap())
                .collect();
            assert!(counts.windows(2).all(|w| w[0] >= w[1]), "{counts:?}");
            let weighted = u_weighted(&ctx, &a).unwrap();
            assert!(weighted >= counts[3] as f64);
            assert!(weighted <= 2f64.powi(omega_max) * counts[3] as f64);
        }
    }

    #[test]
    fn u_gamma_rejects_ideals_meeting_w() {
        let (k, r, g, plan) = gaussian_setup();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::one()], region: &r, lattice: &g, plan: &plan };
        let a = IdealFactorization::prime(PrimeIdeal::degree_one(5, 2));
        assert!(matches!(u_gamma_count(&ctx, &[a], 0.1), Err(SieveError::Hypothesis(_))));
    }

    #[test]
    fn bad_prime_above_w_is_an_error() {
        let k = field(&[1, 0, -1, -1]);
        let r = Region::rect(-30.0, -1.0, 1.0, 30.0).unwrap();
        let g = Lattice2::standard();
        let plan = SievePlan::new(r.vol(), 0.3, DEFAULT_ETA, WModulus::new(11), 1).unwrap();
        let ctx = SieveContext { fields: vec![&k], fns: vec![IdealFn::one()], region: &r, lattice: &g, plan: &plan };
        assert_eq!(case_sums(&ctx).unwrap_err(), SieveError::BadPrimeAboveW(23));
    }

    #[test]
    fn plan_validation() {
        assert!(SievePlan::new(100.0, 0.0, 0.5, WModulus::new(3), 1).is_err());
        assert!(SievePlan::new(100.0, 0.3, 1.0, WModulus::new(3), 1).is_err());
        let p = SievePlan::new(1e4, 0.5, 0.5, WModulus::new(3), 1).unwrap();
        assert!((p.z - 100.0).abs() < 1e-9);
        assert_eq!(p.gamma, 0.25);
    }
}

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{HarnessError, Scenario};
use crate::arith::{e_st, empirical_c, knut_ratio, IdealFn, UTable};
use crate::lattice2d::{count_and_mainterm, count_points, PointOptions};
use crate::nt;
use crate::numfield::membership::{linear_element, prime_power_lattice, IdealLattice};
use crate::numfield::{EnumerateOptions, IdealClass, NumberField, PrimeExclusion, PrimeIdeal};
use crate::region::Region;
use crate::sieve::{classify_case, lambda_plus, split_factored, Case, SieveContext, SievePlan};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Suite {
    L21,
    L22,
    L23,
    L24,
    L32,
    #[serde(rename = "SIEVE")]
    Sieve,
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_uppercase().as_str() {
            "L21" => Ok(Suite::L21),
            "L22" => Ok(Suite::L22),
            "L23" => Ok(Suite::L23),
            "L24" => Ok(Suite::L24),
            "L32" => Ok(Suite::L32),
            "SIEVE" => Ok(Suite::Sieve),
            _ => Err(format!("unknown suite {s}; expected L21, L22, L23, L24, L32 or SIEVE")),
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Suite::L21 => "L21",
            Suite::L22 => "L22",
            Suite::L23 => "L23",
            Suite::L24 => "L24",
            Suite::L32 => "L32",
            Suite::Sieve => "SIEVE",
        };
        f.write_str(s)
    }
}

/// Witnesses kept per report.
pub const MAX_WITNESSES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub suite: Suite,
    pub passed: bool,
    pub checks: u64,
    pub exceptions: u64,
    pub witnesses: Vec<Value>,
    pub metrics: BTreeMap<String, Value>,
}

impl LemmaReport {
    fn new(suite: Suite) -> Self {
        LemmaReport { suite, passed: true, checks: 0, exceptions: 0, witnesses: Vec::new(), metrics: BTreeMap::new() }
    }

    fn check(&mut self, ok: bool, witness: impl FnOnce() -> Value) {
        self.checks += 1;
        if !ok {
            self.exceptions += 1;
            self.passed = false;
            if self.witnesses.len() < MAX_WITNESSES {
                self.witnesses.push(witness());
            }
        }
    }

    fn metric(&mut self, key: &str, v: Value) {
        self.metrics.insert(key.to_string(), v);
    }
}

pub fn run_lemma_suite(which: Suite, sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    match which {
        Suite::L21 => lattice_counts(sc),
        Suite::L22 => weighted_ideal_sums(sc),
        Suite::L23 => unique_prime_above(sc),
        Suite::L24 => congruence_law(sc),
        Suite::L32 => smooth_tail(sc),
        Suite::Sieve => sieve_checks(sc),
    }
}

/// Exact primitive counts in origin-centred discs against the main term,
/// normalized by the error scale.
fn lattice_counts(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let p = &sc.config.lemma;
    let g = &sc.lattice;
    if !g.is_primitive() {
        return Err(HarnessError::Config("G not primitive".into()));
    }
    let mut rep = LemmaReport::new(Suite::L21);
    let mut rows = Vec::new();
    for &q in &p.moduli {
        let mut errs = Vec::with_capacity(p.radii.len());
        for &radius in &p.radii {
            let disc = Region::disc(0.0, 0.0, radius).map_err(|e| HarnessError::Config(e.to_string()))?;
            let c = count_and_mainterm(g, &disc, p.residue, q).map_err(|e| HarnessError::Config(e.to_string()))?;
            let err = c.normalized_error();
            rep.check(err.is_finite() && err <= p.lattice_constant, || {
                json!({"q": q, "radius": radius, "normalized_error": err})
            });
            rows.push(json!({"q": q, "radius": radius, "exact": c.exact, "main": c.main,
                             "error_scale": c.error_scale, "normalized_error": err}));
            errs.push(err);
        }
        // non-increasing trend: the largest radius is no worse than the smallest
        if let (Some(first), Some(last)) = (errs.first(), errs.last()) {
            rep.check(last <= first, || json!({"q": q, "trend": errs}));
        }
    }
    rep.metric("det_G", json!(g.det()));
    rep.metric("rungs", Value::Array(rows));
    Ok(rep)
}

/// Full weighted ideal sums against the squarefree W-coprime sums, for each
/// function paired with the companion `dagger(M)`.
fn weighted_ideal_sums(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let p = &sc.config.lemma;
    let mut rep = LemmaReport::new(Suite::L22);
    let dagger = IdealFn::dagger(p.dagger_m);
    let mut per_form = Vec::new();
    for (i, (f, k)) in sc.fns.iter().zip(&sc.fields).enumerate() {
        let points = knut_ratio(f, &dagger, p.dagger_m, k, &sc.w, &p.xs)?;
        for pt in &points {
            rep.check(pt.ratio.is_finite() && pt.ratio <= p.knut_cap, || json!({"form": i, "x": pt.x, "ratio": pt.ratio}));
        }
        for w in points.windows(2) {
            let growth = w[1].ratio / w[0].ratio;
            rep.check(growth <= p.knut_growth, || json!({"form": i, "x": w[1].x, "growth": growth}));
        }
        per_form.push(serde_json::to_value(&points).expect("plain numbers"));
    }
    rep.metric("cap", json!(p.knut_cap));
    rep.metric("max_growth", json!(p.knut_growth));
    rep.metric("points", Value::Array(per_form));
    Ok(rep)
}

struct LatticeCache<'a> {
    field: &'a NumberField,
    map: HashMap<(PrimeIdeal, u32), IdealLattice>,
}

impl<'a> LatticeCache<'a> {
    fn new(field: &'a NumberField) -> Self {
        LatticeCache { field, map: HashMap::new() }
    }

    fn contains(&mut self, q: &PrimeIdeal, a: u32, elem: &[i128]) -> bool {
        let field = self.field;
        self.map
            .entry((*q, a))
            .or_insert_with(|| prime_power_lattice(field, q, a))
            .contains(elem)
    }

    fn valuation(&mut self, q: &PrimeIdeal, elem: &[i128], cap: u32) -> u32 {
        let mut v = 0;
        while v < cap && self.contains(q, v + 1, elem) {
            v += 1;
        }
        v
    }
}

/// For every primitive point of the box and every good prime p with
/// `p^a || b^(d-1) F(s, t)`: exactly one prime above p divides
/// `b s - theta t`, it has degree 1, it divides to order a, and it is the one
/// `factor_principal` names.
fn unique_prime_above(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let half = sc.config.lemma.box_size;
    let mut rep = LemmaReport::new(Suite::L23);
    let mut zero_values = 0u64;
    for (i, k) in sc.fields.iter().enumerate() {
        let mut cache = LatticeCache::new(k);
        let ex = PrimeExclusion::none().with_primes(k.bad_primes().iter().copied());
        for t in -half..=half {
            for s in -half..=half {
                if nt::gcd_i128(s as i128, t as i128) != 1 {
                    continue;
                }
                let v = k.value(s, t)?;
                if v == 0 {
                    zero_values += 1;
                    continue;
                }
                let named = k.factor_principal(s, t, &ex)?;
                let elem = linear_element(k, s, t);
                for (p, a) in nt::factor(v.unsigned_abs()).map_err(|e| HarnessError::Compute(e.to_string()))? {
                    if ex.excludes(p) {
                        continue;
                    }
                    let mut dividing = Vec::new();
                    for q in k.split_prime(p)?.iter() {
                        let val = cache.valuation(q, &elem, a + 1);
                        if val > 0 {
                            dividing.push((*q, val));
                        }
                    }
                    let ok = match dividing.as_slice() {
                        [(q, val)] => {
                            q.f == 1 && *val == a && named.factors().iter().any(|(r, e)| r == q && *e == a)
                        }
                        _ => false,
                    };
                    rep.check(ok, || {
                        json!({"form": i, "s": s, "t": t, "p": p, "a": a,
                               "dividing": dividing.iter().map(|(q, v)| json!([q.p, q.f, q.key.to_string(), v])).collect::<Vec<_>>()})
                    });
                }
            }
        }
    }
    rep.metric("box", json!(half));
    rep.metric("zero_values", json!(zero_values));
    Ok(rep)
}

/// For every ideal in P of norm up to the bound: divisibility of
/// `b s - theta t` by the ideal agrees with `b s = k t mod N` on all residue
/// pairs.
fn congruence_law(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let bound = sc.config.lemma.norm_bound;
    let mut rep = LemmaReport::new(Suite::L24);
    let mut ideals_checked = 0u64;
    for (i, k) in sc.fields.iter().enumerate() {
        let opts = EnumerateOptions { squarefree: false, coprime_to: 1, class: IdealClass::P };
        let ideals = k.enumerate_ideals(bound, &opts);
        ideals_checked += ideals.len() as u64;
        let b = k.b().clone();
        let results: Vec<Result<(u64, Vec<(i64, i64)>), HarnessError>> = ideals
            .par_iter()
            .map(|a| {
                let (kk, n) = k.congruence_parameter(a)?;
                let lattices: Vec<IdealLattice> =
                    a.factors().iter().map(|(q, e)| prime_power_lattice(k, q, *e)).collect();
                let n_i = n as i128;
                let b_mod = num_integer::Integer::mod_floor(&b, &n.into());
                let b_mod: i128 = num_traits::ToPrimitive::to_i128(&b_mod).expect("reduced mod N");
                let mut bad = Vec::new();
                for s in 0..n as i64 {
                    for t in 0..n as i64 {
                        let elem = linear_element(k, s, t);
                        let divides = lattices.iter().all(|l| l.contains(&elem));
                        let congruent = (b_mod * s as i128 - kk as i128 * t as i128).rem_euclid(n_i) == 0;
                        if divides != congruent {
                            bad.push((s, t));
                        }
                    }
                }
                Ok((n * n, bad))
            })
            .collect();
        for (a, r) in ideals.iter().zip(results) {
            let (pairs, bad) = r?;
            rep.checks += pairs - 1;
            rep.check(bad.is_empty(), || {
                json!({"form": i, "ideal": a.factors().iter().map(|(q, e)| json!([q.p, q.f, q.key.to_string(), e])).collect::<Vec<_>>(),
                       "mismatches": bad.iter().take(5).collect::<Vec<_>>(), "count": bad.len()})
            });
            if !bad.is_empty() {
                rep.exceptions += bad.len() as u64 - 1;
            }
        }
    }
    rep.metric("norm_bound", json!(bound));
    rep.metric("ideals", json!(ideals_checked));
    Ok(rep)
}

/// Smooth tail `E(S, T)` of the u-weighted sum against
/// `exp(-kappa ln S / ln T) * sum_{b <= T} u(b) / b`.
fn smooth_tail(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let p = &sc.config.lemma;
    let fields = sc.field_refs();
    let table = UTable::build(&sc.fns, &fields, &sc.w, p.u_cap)?;
    let c = empirical_c(&table);
    if !(p.t > (c / 10.0).exp()) {
        return Err(HarnessError::Config(format!("T = {} must exceed exp(C/10) with C = {c}", p.t)));
    }
    let (lo, hi) = (0.1, p.t.ln() / c);
    if !(hi > lo) {
        return Err(HarnessError::Config(format!("empty kappa range (0.1, {hi})")));
    }
    let kappa = (lo + hi) / 2.0;
    let est = e_st(&table, p.s, p.t);
    let bound = (-kappa * p.s.ln() / p.t.ln()).exp() * est.partial;
    let ratio = est.e / bound;
    let mut rep = LemmaReport::new(Suite::L32);
    rep.check(ratio.is_finite() && ratio <= p.l32_cap, || json!({"ratio": ratio}));
    rep.metric("C_emp", json!(c));
    rep.metric("kappa", json!(kappa));
    rep.metric("kappa_range", json!([lo, hi]));
    rep.metric("E", json!(est.e));
    rep.metric("partial", json!(est.partial));
    rep.metric("bound", json!(bound));
    rep.metric("ratio", json!(ratio));
    rep.metric("truncated", json!(est.truncated));
    rep.metric("u_cap", json!(p.u_cap));
    Ok(rep)
}

/// Levels of the sieve inequality check, as powers of the sifting range.
const SIEVE_Z: u64 = 30;
const SIEVE_LEVEL_POWERS: [i32; 4] = [1, 2, 4, 8];
const SPLIT_LIMIT: u64 = 100_000;
const SPLIT_LEVELS: [f64; 3] = [10.0, 100.0, 1000.0];

/// Disjoint case predicates, written without precedence.
fn case_predicates(split: &crate::sieve::SmoothRoughSplit, z: f64, eta: f64, small: f64) -> [bool; 4] {
    let rough = z.powf(eta / 2.0);
    let pm = split.p_minus_b.map_or(f64::INFINITY, |p| p as f64);
    let big_a = split.a as f64 > z.powf(1.0 - eta);
    [
        pm >= rough,
        pm < rough && !big_a,
        pm < rough && big_a && pm <= small,
        pm < rough && big_a && pm > small,
    ]
}

/// Sieve inequality for the upper weights, the smooth-rough split laws, and
/// one case label per point of the scenario.
fn sieve_checks(sc: &Scenario) -> Result<LemmaReport, HarnessError> {
    let mut rep = LemmaReport::new(Suite::Sieve);

    let primes = nt::primes_up_to(SIEVE_Z - 1);
    let divisors: Vec<u64> = (0u32..1 << primes.len())
        .map(|mask| primes.iter().enumerate().filter(|(j, _)| mask >> j & 1 == 1).map(|(_, &p)| p).product())
        .collect();
    for pow in SIEVE_LEVEL_POWERS {
        let level = (SIEVE_Z as f64).powi(pow);
        let weights = lambda_plus(SIEVE_Z as f64, level);
        for &n in &divisors {
            let sum: i64 = weights.iter().filter(|(d, _)| n % **d == 0).map(|(_, &l)| l as i64).sum();
            let want = i64::from(n == 1);
            rep.check(sum >= want, || json!({"law": "sieve", "level": level, "n": n, "sum": sum}));
        }
    }

    for z in SPLIT_LEVELS {
        for n in 1..=SPLIT_LIMIT {
            let f = nt::factor(n as u128).map_err(|e| HarnessError::Compute(e.to_string()))?;
            let sp = split_factored(&f, z);
            let p_minus = sp.p_minus_b;
            let maximal = match p_minus {
                None => true,
                Some(p) => {
                    let e = f.iter().find(|(q, _)| *q == p).map(|x| x.1).unwrap_or(0);
                    (sp.a as f64) * (p as f64).powi(e as i32) > z
                }
            };
            let ok = sp.a * sp.b == n as u128
                && nt::gcd_i128(sp.a as i128, sp.b as i128) == 1
                && (sp.a as f64) <= z
                && p_minus.is_none_or(|p| p > sp.p_plus_a)
                && maximal;
            rep.check(ok, || json!({"law": "split", "z": z, "n": n, "a": sp.a.to_string(), "b": sp.b.to_string()}));
        }
    }

    let v = sc.region.vol();
    let cfg = &sc.config;
    let plan = SievePlan::new(v, cfg.omega, cfg.eta, sc.w.clone(), sc.lattice.det() as u64)?;
    let ctx = SieveContext {
        fields: sc.field_refs(),
        fns: sc.fns.clone(),
        region: &sc.region,
        lattice: &sc.lattice,
        plan: &plan,
    };
    let records = ctx.records()?;
    let small = plan.small_threshold();
    let mut counts = [0u64; 4];
    for r in &records {
        let preds = case_predicates(&r.split, plan.z, plan.eta, small);
        let hits: Vec<Case> = Case::ALL.iter().copied().filter(|c| preds[c.index()]).collect();
        let ok = hits.len() == 1 && hits[0] == r.case && classify_case(&r.split, plan.z, plan.eta) == r.case;
        counts[r.case.index()] += 1;
        rep.check(ok, || json!({"law": "case", "s": r.s, "t": r.t, "labels": format!("{hits:?}")}));
    }
    let primitive = count_points(&sc.lattice, &sc.region, &PointOptions { primitive: true, residue: None });
    let zero_points = primitive - records.len() as u64;
    rep.check(counts.iter().sum::<u64>() == records.len() as u64, || json!({"law": "case totals"}));
    rep.metric("z", json!(plan.z));
    rep.metric("case_counts", json!(counts));
    rep.metric("zero_points", json!(zero_points));
    rep.metric("sieve_z", json!(SIEVE_Z));
    rep.metric("split_limit", json!(SPLIT_LIMIT));
    Ok(rep)
}

use std::collections::BTreeMap;
use std::time::Instant;

use serde_json::json;

use super::{HarnessError, Report, Scenario};
use crate::arith::{e_f, h_star_w};
use crate::sieve::{case_sums, SieveContext, SievePlan};

/// `max(1 + 4/c1, 4 (5 + 3 max eps_i) / c1) * sum d_i eps_i`.
pub fn epsilon_zero(c1: f64, degrees: &[usize], epsilons: &[f64]) -> f64 {
    assert_eq!(degrees.len(), epsilons.len(), "one epsilon per form");
    let weight: f64 = degrees.iter().zip(epsilons).map(|(&d, &e)| d as f64 * e).sum();
    if weight == 0.0 {
        return 0.0;
    }
    let max_eps = epsilons.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (1.0 + 4.0 / c1).max(4.0 * (5.0 + 3.0 * max_eps) / c1) * weight
}

/// Runs `f` on a dedicated pool of `n` threads.
pub fn with_workers<T: Send>(n: usize, f: impl FnOnce() -> T + Send) -> Result<T, HarnessError> {
    if n == 0 {
        return Err(HarnessError::Config("workers must be positive".into()));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build()
        .map_err(|e| HarnessError::Compute(e.to_string()))?;
    Ok(pool.install(f))
}

/// Weighted sum over the primitive points of region and lattice, set against
/// main and secondary term.
pub fn run_theorem_check(sc: &Scenario, timing: bool) -> Result<Report, HarnessError> {
    let start = Instant::now();
    let reg = sc.check_theorem_hypotheses()?;
    let cfg = &sc.config;
    let v = sc.region.vol();
    let q_g = u64::try_from(sc.lattice.det()).map_err(|_| HarnessError::Config("det(G) must be positive".into()))?;
    let plan = SievePlan::new(v, cfg.omega, cfg.eta, sc.w.clone(), q_g)?;
    let ctx = SieveContext {
        fields: sc.field_refs(),
        fns: sc.fns.clone(),
        region: &sc.region,
        lattice: &sc.lattice,
        plan: &plan,
    };
    let totals = case_sums(&ctx)?;

    let h = h_star_w(&cfg.forms, q_g, cfg.w)?;
    let e_fs = sc
        .fns
        .iter()
        .zip(&sc.fields)
        .map(|(f, k)| e_f(f, k, v, &sc.w))
        .collect::<Result<Vec<f64>, _>>()?;
    let n = cfg.forms.len() as i32;
    let main = v / v.ln().powi(n) * h / q_g as f64 * e_fs.iter().product::<f64>();

    let stats = sc.region.stats();
    let epsilons: Vec<f64> = sc.fns.iter().map(|f| f.class.eps).collect();
    let eps0 = epsilon_zero(cfg.c1, &sc.degrees(), &epsilons);
    let lambda_g = sc.lattice.lambda1();
    let secondary = stats.k_r.powf(1.0 + eps0 + cfg.epsilon) / lambda_g;

    let lhs = totals.lhs();
    let ratio = lhs / (main + secondary);
    for (name, x) in [("lhs", lhs), ("main term", main), ("secondary term", secondary), ("ratio", ratio)] {
        if !x.is_finite() {
            return Err(HarnessError::Compute(format!("{name} is not finite ({x})")));
        }
    }

    let diagnostics = BTreeMap::from([
        ("q_G".to_string(), json!(q_g)),
        ("lambda_G".to_string(), json!(lambda_g)),
        ("K_R".to_string(), json!(stats.k_r)),
        ("K_R_pow_c1".to_string(), json!(reg.k_r_pow_c1)),
        ("epsilon_0".to_string(), json!(eps0)),
        ("z".to_string(), json!(plan.z)),
        ("gamma".to_string(), json!(plan.gamma)),
        ("case_counts".to_string(), json!(totals.counts)),
        ("points".to_string(), json!(totals.points())),
        ("zero_points".to_string(), json!(totals.zero_points)),
        ("h_star_W".to_string(), json!(h)),
        ("E_f".to_string(), json!(e_fs)),
        ("lhs_over_main".to_string(), json!(lhs / main)),
    ]);
    Ok(Report {
        scenario: cfg.name.clone(),
        w: cfg.w,
        volume: v,
        lhs,
        main_term: main,
        secondary_term: secondary,
        ratio,
        per_case: totals.totals,
        diagnostics,
        runtime: timing.then(|| start.elapsed().as_secs_f64()),
    })
}

/// One report per volume, region rescaled and everything else fixed.
pub fn run_ladder(sc: &Scenario, volumes: &[f64], timing: bool) -> Result<Vec<Report>, HarnessError> {
    volumes
        .iter()
        .map(|&v| run_theorem_check(&sc.at_volume(v)?, timing))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderSummary {
    /// Largest `max(r1/r0, r0/r1)` over consecutive rungs.
    pub max_step: f64,
    /// Largest step up, `r1/r0`.
    pub max_growth: f64,
    pub max_ratio: f64,
}

pub fn ladder_steps(reports: &[Report]) -> LadderSummary {
    let mut s = LadderSummary { max_step: 1.0, max_growth: 0.0, max_ratio: 0.0 };
    for r in reports {
        s.max_ratio = s.max_ratio.max(r.ratio);
    }
    for w in reports.windows(2) {
        let g = w[1].ratio / w[0].ratio;
        s.max_growth = s.max_growth.max(g);
        s.max_step = s.max_step.max(g).max(1.0 / g);
    }
    s
}

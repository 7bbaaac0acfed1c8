//! Multiplicative functions on ideals and the scalar arithmetic built on
//! them: root counts, local Euler factors, and the weighted sums that make
//! up the main term.

mod rho;
mod sums;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use rho::{c_p, h_dagger, h_small, h_star, h_star_w, rho_bar, rho_p, RootCounter};
pub use sums::{
    e_f, e_st, empirical_c, knut_ratio, u_direct, EstResult, KnutPoint, UTable,
};

use crate::nt;
use crate::numfield::{EnumerateOptions, FieldError, IdealFactorization, NumberField, PrimeIdeal};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ArithError {
    #[error("Euler factor has a pole at p = {0}")]
    Pole(u64),
    #[error("rule of {name} is undefined at ({p}, {nu})")]
    RuleUndefined { name: String, p: u64, nu: u32 },
    #[error("prime {0} above w is bad for one of the fields")]
    BadPrimeAboveW(u64),
    #[error("w = {w} must exceed {needed}")]
    WTooSmall { w: u64, needed: f64 },
    #[error("unknown function preset {0}")]
    UnknownPreset(String),
    #[error("{0} does not fit the product of primes up to w")]
    WOverflow(u64),
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// Constants `(A, B, eps)` of the class the function is claimed to lie in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassParams {
    pub a: f64,
    pub b: f64,
    pub eps: f64,
}

/// Exponent used where a class needs some positive epsilon but any works.
pub const SMALL_EPS: f64 = 0.01;

type CustomRule = Arc<dyn Fn(&PrimeIdeal, u32) -> Option<f64> + Send + Sync>;

/// Value of a multiplicative function on a prime power.
#[derive(Clone)]
pub enum PrimePowerRule {
    One,
    /// nu + 1.
    DivisorCount,
    /// a^nu.
    OmegaPower(f64),
    /// 1 for nu <= 1, else 0.
    SquarefreeIndicator,
    /// min(N(p)^(nu eps), cap).
    NormPower { eps: f64, cap: f64 },
    /// 1 + m / N(p), independent of nu.
    Dagger { m: f64 },
    Custom(CustomRule),
}

impl fmt::Debug for PrimePowerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimePowerRule::One => write!(f, "One"),
            PrimePowerRule::DivisorCount => write!(f, "DivisorCount"),
            PrimePowerRule::OmegaPower(a) => write!(f, "OmegaPower({a})"),
            PrimePowerRule::SquarefreeIndicator => write!(f, "SquarefreeIndicator"),
            PrimePowerRule::NormPower { eps, cap } => write!(f, "NormPower({eps}, {cap})"),
            PrimePowerRule::Dagger { m } => write!(f, "Dagger({m})"),
            PrimePowerRule::Custom(_) => write!(f, "Custom"),
        }
    }
}

impl PrimePowerRule {
    pub fn eval(&self, q: &PrimeIdeal, nu: u32) -> Option<f64> {
        if nu == 0 {
            return Some(1.0);
        }
        let norm = q.norm() as f64;
        Some(match self {
            PrimePowerRule::One => 1.0,
            PrimePowerRule::DivisorCount => nu as f64 + 1.0,
            PrimePowerRule::OmegaPower(a) => a.powi(nu as i32),
            PrimePowerRule::SquarefreeIndicator => (nu <= 1) as u8 as f64,
            PrimePowerRule::NormPower { eps, cap } => norm.powf(nu as f64 * eps).min(*cap),
            PrimePowerRule::Dagger { m } => 1.0 + m / norm,
            PrimePowerRule::Custom(rule) => return rule(q, nu).filter(|v| v.is_finite() && *v >= 0.0),
        })
    }
}

#[derive(Debug, Clone)]
pub struct IdealFn {
    pub name: String,
    pub rule: PrimePowerRule,
    pub class: ClassParams,
    pub submultiplicative: bool,
}

impl IdealFn {
    pub fn one() -> Self {
        IdealFn {
            name: "one".into(),
            rule: PrimePowerRule::One,
            class: ClassParams { a: 1.0, b: 1.0, eps: SMALL_EPS },
            submultiplicative: true,
        }
    }

    pub fn tau_k() -> Self {
        IdealFn {
            name: "tau_K".into(),
            rule: PrimePowerRule::DivisorCount,
            class: ClassParams { a: 2.0, b: 4.0, eps: 0.5 },
            submultiplicative: true,
        }
    }

    /// A^Omega; needs eps >= log2 A for the norm bound.
    pub fn omega_pow(a: f64) -> Self {
        IdealFn {
            name: "omega_pow_A".into(),
            rule: PrimePowerRule::OmegaPower(a),
            class: ClassParams { a, b: 1.0, eps: a.log2().max(SMALL_EPS) },
            submultiplicative: true,
        }
    }

    pub fn sqfree_ind() -> Self {
        IdealFn {
            name: "sqfree_ind".into(),
            rule: PrimePowerRule::SquarefreeIndicator,
            class: ClassParams { a: 1.0, b: 1.0, eps: SMALL_EPS },
            submultiplicative: true,
        }
    }

    pub fn norm_eps(eps: f64, cap: f64) -> Self {
        IdealFn {
            name: "norm_eps".into(),
            rule: PrimePowerRule::NormPower { eps, cap },
            class: ClassParams { a: cap.max(1.0), b: 1.0, eps },
            submultiplicative: true,
        }
    }

    /// The weight 1 + M/N(p) on every prime power.
    pub fn dagger(m: f64) -> Self {
        IdealFn {
            name: "dagger".into(),
            rule: PrimePowerRule::Dagger { m },
            class: ClassParams { a: 1.0 + m, b: 1.0 + m, eps: SMALL_EPS },
            submultiplicative: false,
        }
    }

    pub fn rule_at(&self, q: &PrimeIdeal, nu: u32) -> Result<f64, ArithError> {
        self.rule.eval(q, nu).ok_or_else(|| ArithError::RuleUndefined {
            name: self.name.clone(),
            p: q.p,
            nu,
        })
    }
}

/// Function preset as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FnSpec {
    pub name: String,
    #[serde(default, rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<f64>,
    #[serde(default, rename = "M", skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    /// Overrides the preset's (A, B, eps).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub submultiplicative: Option<bool>,
}

impl FnSpec {
    pub fn named(name: &str) -> Self {
        FnSpec {
            name: name.into(),
            a: None,
            eps: None,
            cap: None,
            m: None,
            class: None,
            submultiplicative: None,
        }
    }

    pub fn build(&self) -> Result<IdealFn, ArithError> {
        let mut f = match self.name.as_str() {
            "one" => IdealFn::one(),
            "tau_K" => IdealFn::tau_k(),
            "omega_pow_A" => IdealFn::omega_pow(self.a.unwrap_or(2.0)),
            "sqfree_ind" => IdealFn::sqfree_ind(),
            "norm_eps" => IdealFn::norm_eps(self.eps.unwrap_or(0.25), self.cap.unwrap_or(4.0)),
            "dagger" => IdealFn::dagger(self.m.unwrap_or(1.0)),
            other => return Err(ArithError::UnknownPreset(other.into())),
        };
        if let Some([a, b, eps]) = self.class {
            f.class = ClassParams { a, b, eps };
        }
        if let Some(flag) = self.submultiplicative {
            f.submultiplicative = flag;
        }
        Ok(f)
    }
}

/// `W`, the product of the primes up to `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WModulus {
    pub w: u64,
    primes: Vec<u64>,
}

impl WModulus {
    pub fn new(w: u64) -> Self {
        WModulus { w, primes: nt::primes_up_to(w) }
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    /// W itself, when it fits.
    pub fn value(&self) -> Option<u128> {
        self.primes
            .iter()
            .try_fold(1u128, |acc, &p| acc.checked_mul(p as u128))
    }

    pub fn coprime(&self, n: u64) -> bool {
        self.primes.iter().all(|&p| n % p != 0)
    }
}

/// Multiplicative extension of the prime-power rule.
pub fn eval_fn(f: &IdealFn, a: &IdealFactorization) -> Result<f64, ArithError> {
    a.factors()
        .iter()
        .try_fold(1.0, |acc, (q, nu)| Ok(acc * f.rule_at(q, *nu)?))
}

pub fn restrict_w(a: &IdealFactorization, w: &WModulus) -> IdealFactorization {
    a.without_primes_up_to(w.w)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoViolation {
    pub a: IdealFactorization,
    pub b: IdealFactorization,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PseudoReport {
    pub pairs_checked: u64,
    pub violations: Vec<PseudoViolation>,
}

/// Checks `f(ab) <= f(a) min(A^Omega(b), B N(b)^eps)` over coprime pairs
/// with `N(a) N(b) <= x`.
pub fn check_pseudomultiplicative(
    f: &IdealFn,
    field: &NumberField,
    x: u64,
) -> Result<PseudoReport, ArithError> {
    let ideals = field.enumerate_ideals(x, &EnumerateOptions::default());
    let values: Vec<f64> = ideals.iter().map(|a| eval_fn(f, a)).collect::<Result<_, _>>()?;
    let ClassParams { a: ca, b: cb, eps } = f.class;
    let mut report = PseudoReport { pairs_checked: 0, violations: Vec::new() };
    for (i, a) in ideals.iter().enumerate() {
        let na = a.norm();
        for b in &ideals {
            let nb = b.norm();
            if na.saturating_mul(nb) > x as u128 {
                break;
            }
            if a.factors().iter().any(|(q, _)| b.factors().iter().any(|(r, _)| q == r)) {
                continue;
            }
            report.pairs_checked += 1;
            let lhs = eval_fn(f, &a.mul(b))?;
            let bound = ca.powi(b.big_omega() as i32).min(cb * (nb as f64).powf(eps));
            let rhs = values[i] * bound;
            if lhs > rhs * (1.0 + 1e-12) {
                report.violations.push(PseudoViolation { a: a.clone(), b: b.clone(), lhs, rhs });
            }
        }
    }
    Ok(report)
}

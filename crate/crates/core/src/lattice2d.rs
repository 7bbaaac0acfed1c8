//! Rank-2 sublattices of Z^2 with row-vector bases in Hermite normal form
//! `[[a, b], [0, c]]`, `a, c > 0`, `0 <= b < c`.

use num_bigint::BigInt;
use num_integer::Integer;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::nt;
use crate::numfield::{FieldError, IdealFactorization, NumberField};
use crate::region::Region;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("singular basis")]
    Singular,
    #[error("integer overflow")]
    Overflow,
    #[error("lattice is not primitive")]
    NotPrimitive,
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct Lattice2 {
    basis: [[i64; 2]; 2],
    det: i64,
    shortest: [i64; 2],
    lambda1_sq: i128,
}

impl TryFrom<[[i64; 2]; 2]> for Lattice2 {
    type Error = LatticeError;
    fn try_from(m: [[i64; 2]; 2]) -> Result<Self, LatticeError> {
        hnf(m)
    }
}

impl From<Lattice2> for [[i64; 2]; 2] {
    fn from(l: Lattice2) -> Self {
        l.basis
    }
}

fn narrow(x: i128) -> Result<i64, LatticeError> {
    i64::try_from(x).map_err(|_| LatticeError::Overflow)
}

fn hnf_i128(m: [[i128; 2]; 2]) -> Result<[[i64; 2]; 2], LatticeError> {
    let [r0, r1] = m;
    let (g, x, y) = nt::ext_gcd(r0[0], r1[0]);
    if g == 0 {
        // first column zero: the rows span at most a line
        return Err(LatticeError::Singular);
    }
    let (u, v) = (r1[0] / g, r0[0] / g);
    let top = [g, x * r0[1] + y * r1[1]];
    let bottom = u.checked_mul(r0[1]).ok_or(LatticeError::Overflow)?
        - v.checked_mul(r1[1]).ok_or(LatticeError::Overflow)?;
    let c = bottom.abs();
    if c == 0 {
        return Err(LatticeError::Singular);
    }
    Ok([[narrow(top[0])?, narrow(top[1].rem_euclid(c))?], [0, narrow(c)?]])
}

/// Lagrange-Gauss reduction; returns a shortest nonzero vector.
fn shortest_vector(basis: [[i64; 2]; 2]) -> ([i64; 2], i128) {
    let norm = |v: [i128; 2]| v[0] * v[0] + v[1] * v[1];
    let dot = |u: [i128; 2], v: [i128; 2]| u[0] * v[0] + u[1] * v[1];
    let mut u = [basis[0][0] as i128, basis[0][1] as i128];
    let mut v = [basis[1][0] as i128, basis[1][1] as i128];
    if norm(u) > norm(v) {
        std::mem::swap(&mut u, &mut v);
    }
    loop {
        let nu = norm(u);
        let mu = Integer::div_floor(&(2 * dot(u, v) + nu), &(2 * nu));
        v = [v[0] - mu * u[0], v[1] - mu * u[1]];
        if norm(v) < nu {
            std::mem::swap(&mut u, &mut v);
        } else {
            break;
        }
    }
    ([u[0] as i64, u[1] as i64], norm(u))
}

/// Canonical HNF of the lattice spanned by the two rows.
pub fn hnf(m: [[i64; 2]; 2]) -> Result<Lattice2, LatticeError> {
    let wide = m.map(|r| r.map(|x| x as i128));
    let basis = hnf_i128(wide)?;
    let det = narrow(basis[0][0] as i128 * basis[1][1] as i128)?;
    let (shortest, lambda1_sq) = shortest_vector(basis);
    Ok(Lattice2 { basis, det, shortest, lambda1_sq })
}

/// Shortest vector length (Euclidean).
pub fn first_minimum(g: &Lattice2) -> f64 {
    g.lambda1()
}

pub fn is_primitive(g: &Lattice2) -> bool {
    g.is_primitive()
}

impl Lattice2 {
    pub fn standard() -> Self {
        hnf([[1, 0], [0, 1]]).unwrap()
    }

    pub fn basis(&self) -> [[i64; 2]; 2] {
        self.basis
    }

    pub fn det(&self) -> i64 {
        self.det
    }

    pub fn lambda1(&self) -> f64 {
        (self.lambda1_sq as f64).sqrt()
    }

    pub fn lambda1_sq(&self) -> i128 {
        self.lambda1_sq
    }

    pub fn shortest(&self) -> [i64; 2] {
        self.shortest
    }

    pub fn is_primitive(&self) -> bool {
        let [[a, b], [_, c]] = self.basis;
        nt::gcd_i128(nt::gcd_i128(a as i128, b as i128), c as i128) == 1
    }

    pub fn contains(&self, s: i64, t: i64) -> bool {
        let [[a, b], [_, c]] = self.basis;
        if s.rem_euclid(a) != 0 {
            return false;
        }
        let m = (s / a) as i128;
        (t as i128 - m * b as i128).rem_euclid(c as i128) == 0
    }

    /// Points with second coordinate `t`: `None`, or `(s0, h)` meaning
    /// exactly the `s = s0 mod h`.
    pub fn row_progression(&self, t: i64) -> Option<(i64, i64)> {
        let [[a, b], [_, c]] = self.basis;
        let (g, x, _) = nt::ext_gcd(b as i128, c as i128);
        if (t as i128) % g != 0 {
            return None;
        }
        let h = a as i128 * c as i128 / g;
        let m0 = (x * (t as i128 / g)).rem_euclid(c as i128 / g);
        Some(((m0 * a as i128).rem_euclid(h) as i64, h as i64))
    }

    /// Sublattice of points with `b s = k t mod n`.
    fn with_congruence(&self, b_mod: u64, k: u64, n: u64) -> Result<Lattice2, LatticeError> {
        let n = n as i128;
        let [[a, b], [_, c]] = self.basis.map(|r| r.map(|x| x as i128));
        let (bm, k) = (b_mod as i128, k as i128);
        // condition on m r1 + n r2 reads alpha m + beta n = 0 mod N
        let alpha = (bm * a - k * b).rem_euclid(n);
        let beta = (-k * c).rem_euclid(n);
        let g = nt::gcd_i128(beta, n);
        let c2 = n / g;
        let a2 = g / nt::gcd_i128(alpha, g);
        let b2 = if c2 == 1 {
            0
        } else {
            let inv = nt::mod_inv(beta / g, c2).expect("unit after dividing out the gcd");
            ((-alpha * a2 / g).rem_euclid(c2) * inv).rem_euclid(c2)
        };
        hnf(hnf_i128([[a2 * a, a2 * b + b2 * c], [0, c2 * c]])?)
    }
}

/// `{(s, t) in G : b_i s = theta_i t mod c_i for all i}`.
pub fn congruence_lattice(
    fields: &[&NumberField],
    ideals: &[IdealFactorization],
    g: &Lattice2,
) -> Result<Lattice2, LatticeError> {
    if fields.len() != ideals.len() {
        return Err(LatticeError::Hypothesis("one ideal per field".into()));
    }
    let norms: Vec<u128> = ideals.iter().map(|c| c.norm()).collect();
    for i in 0..norms.len() {
        for j in i + 1..norms.len() {
            if nt::gcd_i128(norms[i] as i128, norms[j] as i128) != 1 {
                return Err(LatticeError::Hypothesis("ideal norms must be pairwise coprime".into()));
            }
        }
        if nt::gcd_i128(norms[i] as i128, g.det() as i128) != 1 {
            return Err(LatticeError::Hypothesis("ideal norm shares a prime with det(G)".into()));
        }
        for k in fields {
            if k.big_d().gcd(&BigInt::from(norms[i])) != BigInt::from(1) {
                return Err(LatticeError::Hypothesis("ideal norm shares a prime with D".into()));
            }
        }
    }
    let mut out = g.clone();
    for (k, c) in fields.iter().zip(ideals) {
        if c.is_one() {
            continue;
        }
        let (kp, n) = k.congruence_parameter(c)?;
        let b_mod = k.b().mod_floor(&BigInt::from(n));
        let b_mod: u64 = b_mod.try_into().map_err(|_| LatticeError::Overflow)?;
        out = out.with_congruence(b_mod, kp, n)?;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct PointOptions {
    /// Keep only gcd(s, t) = 1.
    pub primitive: bool,
    /// Keep only `(s, t) = (sigma, tau) mod q`.
    pub residue: Option<((i64, i64), u64)>,
}

/// Rows of `t` handled per parallel task.
pub const ROW_CHUNK: i64 = 64;

fn scan_row<F: FnMut(i64, i64)>(g: &Lattice2, region: &Region, opts: &PointOptions, t: i64, f: &mut F) {
    let Some((s0, h)) = g.row_progression(t) else { return };
    if let Some(((_, tau), q)) = opts.residue {
        if (t as i128 - tau as i128).rem_euclid(q as i128) != 0 {
            return;
        }
    }
    if opts.primitive && t == 0 {
        // only (+-1, 0) can be primitive on this row
        for s in [-1, 1] {
            if (s - s0).rem_euclid(h) == 0 && region.contains(s, 0) && residue_ok(opts, s) {
                f(s, 0);
            }
        }
        return;
    }
    for (lo, hi) in region.row_spans(t) {
        let mut s = lo + (s0 - lo).rem_euclid(h);
        while s <= hi {
            if residue_ok(opts, s) && (!opts.primitive || nt::gcd_i128(s as i128, t as i128) == 1) {
                f(s, t);
            }
            s += h;
        }
    }
}

fn residue_ok(opts: &PointOptions, s: i64) -> bool {
    match opts.residue {
        Some(((sigma, _), q)) => (s as i128 - sigma as i128).rem_euclid(q as i128) == 0,
        None => true,
    }
}

/// Lattice points of `g` in `region`, row-major (t ascending, then s).
pub fn enumerate_points(g: &Lattice2, region: &Region, opts: &PointOptions) -> Vec<(i64, i64)> {
    let (t0, t1) = region.row_range();
    let mut out = Vec::new();
    for t in t0..=t1 {
        scan_row(g, region, opts, t, &mut |s, t| out.push((s, t)));
    }
    out
}

/// Visits the points of the rows `t` in `rows`, row-major.
pub fn for_each_point_in_rows<F: FnMut(i64, i64)>(
    g: &Lattice2,
    region: &Region,
    opts: &PointOptions,
    rows: std::ops::RangeInclusive<i64>,
    mut f: F,
) {
    for t in rows {
        scan_row(g, region, opts, t, &mut f);
    }
}

/// Row chunks of the region, in ascending order.
pub fn row_chunks(region: &Region, chunk: i64) -> Vec<std::ops::RangeInclusive<i64>> {
    let (t0, t1) = region.row_range();
    let mut out = Vec::new();
    let mut t = t0;
    while t <= t1 {
        let end = (t + chunk - 1).min(t1);
        out.push(t..=end);
        t = end + 1;
    }
    out
}

/// Number of points, sharded over row chunks.
pub fn count_points(g: &Lattice2, region: &Region, opts: &PointOptions) -> u64 {
    row_chunks(region, ROW_CHUNK)
        .into_par_iter()
        .map(|rows| {
            let mut n = 0u64;
            for_each_point_in_rows(g, region, opts, rows, |_, _| n += 1);
            n
        })
        .sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountComparison {
    pub exact: u64,
    pub main: f64,
    pub error_scale: f64,
}

impl CountComparison {
    /// |exact - main| / error_scale.
    pub fn normalized_error(&self) -> f64 {
        (self.exact as f64 - self.main).abs() / self.error_scale
    }
}

/// Primitive points of `g` in `region` congruent to `x0` mod `q`, with the
/// predicted main term and the scale of the error.
pub fn count_and_mainterm(
    g: &Lattice2,
    region: &Region,
    x0: (i64, i64),
    q: u64,
) -> Result<CountComparison, LatticeError> {
    if !g.is_primitive() {
        return Err(LatticeError::NotPrimitive);
    }
    if q == 0 {
        return Err(LatticeError::Hypothesis("q must be positive".into()));
    }
    let det = g.det() as i128;
    let content = nt::gcd_i128(nt::gcd_i128(det * x0.0 as i128, det * x0.1 as i128), q as i128);
    if content != 1 {
        return Err(LatticeError::Hypothesis("gcd(det(G) x0, q) must be 1".into()));
    }
    let opts = PointOptions {
        primitive: true,
        residue: (q > 1).then_some((x0, q)),
    };
    let exact = count_points(g, region, &opts);
    let stats = region.stats();
    let det_f = g.det() as f64;
    let qf = q as f64;
    let det_primes = nt::prime_divisors(g.det() as u128).expect("det fits the factoring range");
    let q_primes = nt::prime_divisors(q as u128).expect("q fits the factoring range");
    let det_factor: f64 = det_primes.iter().map(|&p| p as f64 / (p as f64 + 1.0)).product();
    let q_factor: f64 = q_primes.iter().map(|&p| 1.0 / (1.0 - 1.0 / (p as f64 * p as f64))).product();
    let main = stats.vol / (nt::ZETA_2 * det_f * qf * qf) * det_factor * q_factor;
    let error_scale = nt::tau(g.det() as u64) as f64 * stats.k_r / g.lambda1();
    Ok(CountComparison { exact, main, error_scale })
}

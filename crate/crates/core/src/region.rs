//! Plane regions: closed-form statistics, exact point membership, row spans
//! for lattice scanning, and the regularity check against binary forms.
//!
//! A line through the origin meets a convex region that avoids the origin
//! iff it meets the chord between the region's two angularly extreme points.
//! The zero-line test therefore reduces to real roots of `F` restricted to
//! that chord, a univariate polynomial counted exactly with a Sturm chain.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::intpoly::BinaryForm;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RegionError {
    #[error("degenerate region: {0}")]
    Degenerate(String),
    #[error("coordinates must be finite")]
    NotFinite,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum Region {
    #[serde(rename = "rect")]
    Rectangle { x: [f64; 2], y: [f64; 2] },
    Disc { center: [f64; 2], radius: f64 },
    /// Convex, counterclockwise, no repeated vertices.
    Polygon { vertices: Vec<[f64; 2]> },
    Annulus { center: [f64; 2], inner: f64, outer: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegionStats {
    pub vol: f64,
    pub sup_norm: f64,
    pub boundary_len: f64,
    pub k_r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegularityReport {
    pub regular: bool,
    pub contains_origin: bool,
    /// Indices of the forms with a real zero-line meeting the region.
    pub zero_line_hits: Vec<usize>,
    pub volume_ok: bool,
    pub vol: f64,
    pub k_r_pow_c1: f64,
}

fn exact(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite coordinate")
}

fn cross(a: [f64; 2], b: [f64; 2]) -> BigRational {
    exact(a[0]) * exact(b[1]) - exact(a[1]) * exact(b[0])
}

/// Sides used to circumscribe a disc when the exact test needs vertices.
const DISC_POLYGON_SIDES: usize = 64;

impl Region {
    pub fn rect(x0: f64, x1: f64, y0: f64, y1: f64) -> Result<Self, RegionError> {
        Region::Rectangle { x: [x0, x1], y: [y0, y1] }.validated()
    }

    pub fn disc(cx: f64, cy: f64, r: f64) -> Result<Self, RegionError> {
        Region::Disc { center: [cx, cy], radius: r }.validated()
    }

    pub fn polygon(vertices: Vec<[f64; 2]>) -> Result<Self, RegionError> {
        Region::Polygon { vertices }.validated()
    }

    pub fn annulus(cx: f64, cy: f64, inner: f64, outer: f64) -> Result<Self, RegionError> {
        Region::Annulus { center: [cx, cy], inner, outer }.validated()
    }

    pub fn validated(self) -> Result<Self, RegionError> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), RegionError> {
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        match self {
            Region::Rectangle { x, y } => {
                if !finite(x) || !finite(y) {
                    return Err(RegionError::NotFinite);
                }
                if !(x[0] < x[1] && y[0] < y[1]) {
                    return Err(RegionError::Degenerate("rectangle needs x0 < x1 and y0 < y1".into()));
                }
            }
            Region::Disc { center, radius } => {
                if !finite(center) || !radius.is_finite() {
                    return Err(RegionError::NotFinite);
                }
                if *radius <= 0.0 {
                    return Err(RegionError::Degenerate("radius must be positive".into()));
                }
            }
            Region::Polygon { vertices } => {
                if vertices.iter().any(|v| !finite(v)) {
                    return Err(RegionError::NotFinite);
                }
                let n = vertices.len();
                if n < 3 {
                    return Err(RegionError::Degenerate("polygon needs three vertices".into()));
                }
                for i in 0..n {
                    let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
                    if a == b {
                        return Err(RegionError::Degenerate("repeated vertex".into()));
                    }
                    let turn = cross([b[0] - a[0], b[1] - a[1]], [c[0] - b[0], c[1] - b[1]]);
                    if turn.is_negative() {
                        return Err(RegionError::Degenerate("polygon must be convex and counterclockwise".into()));
                    }
                }
                if self.vol() <= 0.0 {
                    return Err(RegionError::Degenerate("polygon has no interior".into()));
                }
            }
            Region::Annulus { center, inner, outer } => {
                if !finite(center) || !inner.is_finite() || !outer.is_finite() {
                    return Err(RegionError::NotFinite);
                }
                if !(0.0 < *inner && inner < outer) {
                    return Err(RegionError::Degenerate("annulus needs 0 < inner < outer".into()));
                }
            }
        }
        Ok(())
    }

    pub fn vol(&self) -> f64 {
        match self {
            Region::Rectangle { x, y } => (x[1] - x[0]) * (y[1] - y[0]),
            Region::Disc { radius, .. } => PI * radius * radius,
            Region::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        a[0] * b[1] - a[1] * b[0]
                    })
                    .sum::<f64>()
                    / 2.0
            }
            Region::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
        }
    }

    pub fn sup_norm(&self) -> f64 {
        let m = |p: [f64; 2]| p[0].abs().max(p[1].abs());
        match self {
            Region::Rectangle { x, y } => x[0].abs().max(x[1].abs()).max(y[0].abs()).max(y[1].abs()),
            Region::Disc { center, radius } => m(*center) + radius,
            Region::Polygon { vertices } => vertices.iter().map(|&v| m(v)).fold(0.0, f64::max),
            Region::Annulus { center, outer, .. } => m(*center) + outer,
        }
    }

    pub fn boundary_len(&self) -> f64 {
        match self {
            Region::Rectangle { x, y } => 2.0 * ((x[1] - x[0]) + (y[1] - y[0])),
            Region::Disc { radius, .. } => 2.0 * PI * radius,
            Region::Polygon { vertices } => {
                let n = vertices.len();
                (0..n)
                    .map(|i| {
                        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                        (b[0] - a[0]).hypot(b[1] - a[1])
                    })
                    .sum()
            }
            Region::Annulus { inner, outer, .. } => 2.0 * PI * (inner + outer),
        }
    }

    pub fn stats(&self) -> RegionStats {
        let (vol, sup, bd) = (self.vol(), self.sup_norm(), self.boundary_len());
        RegionStats {
            vol,
            sup_norm: sup,
            boundary_len: bd,
            k_r: 1.0 + sup + bd * (1.0 + sup).ln() + vol / (1.0 + sup),
        }
    }

    /// The image under (s, t) -> (lambda s, lambda t).
    pub fn scaled(&self, lambda: f64) -> Region {
        let sc = |p: [f64; 2]| [p[0] * lambda, p[1] * lambda];
        match self {
            Region::Rectangle { x, y } => Region::Rectangle {
                x: [x[0] * lambda, x[1] * lambda],
                y: [y[0] * lambda, y[1] * lambda],
            },
            Region::Disc { center, radius } => Region::Disc { center: sc(*center), radius: radius * lambda },
            Region::Polygon { vertices } => Region::Polygon { vertices: vertices.iter().map(|&v| sc(v)).collect() },
            Region::Annulus { center, inner, outer } => Region::Annulus {
                center: sc(*center),
                inner: inner * lambda,
                outer: outer * lambda,
            },
        }
    }

    /// Uniformly rescaled to the given area.
    pub fn with_volume(&self, vol: f64) -> Region {
        self.scaled((vol / self.vol()).sqrt())
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bbox(&self) -> [f64; 4] {
        match self {
            Region::Rectangle { x, y } => [x[0], x[1], y[0], y[1]],
            Region::Disc { center, radius: r } | Region::Annulus { center, outer: r, .. } => {
                [center[0] - r, center[0] + r, center[1] - r, center[1] + r]
            }
            Region::Polygon { vertices } => {
                let xs = vertices.iter().map(|v| v[0]);
                let ys = vertices.iter().map(|v| v[1]);
                [
                    xs.clone().fold(f64::INFINITY, f64::min),
                    xs.fold(f64::NEG_INFINITY, f64::max),
                    ys.clone().fold(f64::INFINITY, f64::min),
                    ys.fold(f64::NEG_INFINITY, f64::max),
                ]
            }
        }
    }

    /// Exact closed membership of a rational point given by f64 coordinates.
    pub fn contains_point(&self, s: f64, t: f64) -> bool {
        let in_disc = |c: [f64; 2], r: f64, inside: bool| {
            let (dx, dy) = (exact(s) - exact(c[0]), exact(t) - exact(c[1]));
            let lhs = &dx * &dx + &dy * &dy;
            let r2 = exact(r) * exact(r);
            if inside {
                lhs <= r2
            } else {
                lhs >= r2
            }
        };
        match self {
            Region::Rectangle { x, y } => x[0] <= s && s <= x[1] && y[0] <= t && t <= y[1],
            Region::Disc { center, radius } => in_disc(*center, *radius, true),
            Region::Polygon { vertices } => {
                let n = vertices.len();
                (0..n).all(|i| {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let e = (exact(b[0]) - exact(a[0])) * (exact(t) - exact(a[1]))
                        - (exact(b[1]) - exact(a[1])) * (exact(s) - exact(a[0]));
                    !e.is_negative()
                })
            }
            Region::Annulus { center, inner, outer } => {
                in_disc(*center, *outer, true) && in_disc(*center, *inner, false)
            }
        }
    }

    pub fn contains(&self, s: i64, t: i64) -> bool {
        self.contains_point(s as f64, t as f64)
    }

    /// Real intervals of the horizontal line at height t inside the region,
    /// computed in floating point; callers confirm endpoints exactly.
    fn float_spans(&self, t: f64) -> Vec<(f64, f64)> {
        let chord = |c: [f64; 2], r: f64| -> Option<(f64, f64)> {
            let dy = t - c[1];
            let h2 = r * r - dy * dy;
            (h2 >= 0.0).then(|| {
                let h = h2.sqrt();
                (c[0] - h, c[0] + h)
            })
        };
        match self {
            Region::Rectangle { x, y } => {
                if y[0] <= t && t <= y[1] {
                    vec![(x[0], x[1])]
                } else {
                    vec![]
                }
            }
            Region::Disc { center, radius } => chord(*center, *radius).into_iter().collect(),
            Region::Polygon { vertices } => {
                let n = vertices.len();
                let mut lo = f64::INFINITY;
                let mut hi = f64::NEG_INFINITY;
                for i in 0..n {
                    let (a, b) = (vertices[i], vertices[(i + 1) % n]);
                    let (ylo, yhi) = (a[1].min(b[1]), a[1].max(b[1]));
                    if t < ylo || t > yhi {
                        continue;
                    }
                    if a[1] == b[1] {
                        lo = lo.min(a[0].min(b[0]));
                        hi = hi.max(a[0].max(b[0]));
                    } else {
                        let x = a[0] + (t - a[1]) * (b[0] - a[0]) / (b[1] - a[1]);
                        lo = lo.min(x);
                        hi = hi.max(x);
                    }
                }
                if lo <= hi {
                    vec![(lo, hi)]
                } else {
                    vec![]
                }
            }
            Region::Annulus { center, inner, outer } => {
                let Some((lo, hi)) = chord(*center, *outer) else { return vec![] };
                match chord(*center, *inner) {
                    Some((ilo, ihi)) => vec![(lo, ilo), (ihi, hi)],
                    None => vec![(lo, hi)],
                }
            }
        }
    }

    /// Integer s-ranges `[lo, hi]` with (s, t) in the region, ascending.
    pub fn row_spans(&self, t: i64) -> Vec<(i64, i64)> {
        let tf = t as f64;
        let mut out: Vec<(i64, i64)> = Vec::new();
        for (lo, hi) in self.float_spans(tf) {
            let slack = 1e-9 * (1.0 + lo.abs().max(hi.abs()));
            let mut a = (lo - slack).floor() as i64;
            let mut b = (hi + slack).ceil() as i64;
            while a <= b && !self.contains(a, t) {
                a += 1;
            }
            while b >= a && !self.contains(b, t) {
                b -= 1;
            }
            if a > b {
                continue;
            }
            match out.last_mut() {
                Some(last) if last.1 + 1 >= a => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        out
    }

    /// Integer rows `t` that can meet the region.
    pub fn row_range(&self) -> (i64, i64) {
        let [_, _, y0, y1] = self.bbox();
        (y0.floor() as i64, y1.ceil() as i64)
    }

    /// Vertices of a convex polygon containing the region's convex hull.
    fn hull_vertices(&self) -> Vec<[f64; 2]> {
        match self {
            Region::Rectangle { x, y } => vec![[x[0], y[0]], [x[1], y[0]], [x[1], y[1]], [x[0], y[1]]],
            Region::Polygon { vertices } => vertices.clone(),
            Region::Disc { center, radius: r } | Region::Annulus { center, outer: r, .. } => {
                let n = DISC_POLYGON_SIDES;
                // circumradius r / cos(pi/n), rounded up so the polygon covers the disc
                let rr = r / (PI / n as f64).cos() * (1.0 + 1e-12);
                (0..n)
                    .map(|k| {
                        let a = 2.0 * PI * k as f64 / n as f64;
                        [center[0] + rr * a.cos(), center[1] + rr * a.sin()]
                    })
                    .collect()
            }
        }
    }

    /// Whether some real zero-line of the form meets the region.
    pub fn meets_zero_line(&self, form: &BinaryForm) -> bool {
        if self.contains_point(0.0, 0.0) {
            return true;
        }
        if let Region::Annulus { center, inner, .. } = self {
            // origin strictly inside the hole: every line through it meets the annulus
            let (cx, cy) = (exact(center[0]), exact(center[1]));
            if &cx * &cx + &cy * &cy < exact(*inner) * exact(*inner) {
                return has_real_zero_line(form);
            }
        }
        let vs = self.hull_vertices();
        let (mut a, mut b) = (vs[0], vs[0]);
        for &v in &vs[1..] {
            if cross(a, v).is_negative() {
                a = v;
            }
            if cross(v, b).is_negative() {
                b = v;
            }
        }
        let g = restrict_to_segment(form, a, b);
        real_root_in_unit_interval(&g)
    }

    pub fn is_regular(&self, forms: &[BinaryForm], c1: f64) -> RegularityReport {
        let st = self.stats();
        let contains_origin = self.contains_point(0.0, 0.0);
        let zero_line_hits: Vec<usize> = forms
            .iter()
            .enumerate()
            .filter(|(_, f)| self.meets_zero_line(f))
            .map(|(i, _)| i)
            .collect();
        let k_r_pow_c1 = st.k_r.powf(c1);
        let volume_ok = st.vol >= k_r_pow_c1;
        RegularityReport {
            regular: !contains_origin && zero_line_hits.is_empty() && volume_ok,
            contains_origin,
            zero_line_hits,
            volume_ok,
            vol: st.vol,
            k_r_pow_c1,
        }
    }
}

type QPoly = Vec<BigRational>;

fn qtrim(mut p: QPoly) -> QPoly {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
    p
}

fn qmul(a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![BigRational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    qtrim(out)
}

fn qrem(a: &QPoly, b: &QPoly) -> QPoly {
    let mut r = a.clone();
    let db = b.len() - 1;
    let lead = b.last().unwrap();
    while r.len() > db && !r.is_empty() {
        let shift = r.len() - 1 - db;
        let q = r.last().unwrap() / lead;
        for (i, c) in b.iter().enumerate() {
            r[shift + i] -= &q * c;
        }
        r.pop();
        r = qtrim(r);
    }
    r
}

fn qeval(p: &QPoly, x: &BigRational) -> BigRational {
    p.iter().rev().fold(BigRational::zero(), |acc, c| acc * x + c)
}

/// F((1 - l) a + l b) as a polynomial in l.
fn restrict_to_segment(form: &BinaryForm, a: [f64; 2], b: [f64; 2]) -> QPoly {
    let xs: QPoly = qtrim(vec![exact(a[0]), exact(b[0]) - exact(a[0])]);
    let ys: QPoly = qtrim(vec![exact(a[1]), exact(b[1]) - exact(a[1])]);
    let d = form.degree();
    let one: QPoly = vec![BigRational::from_integer(BigInt::from(1))];
    let pow = |p: &QPoly, k: usize| (0..k).fold(one.clone(), |acc, _| qmul(&acc, p));
    let mut total: QPoly = vec![];
    for (j, c) in form.coeffs().iter().enumerate() {
        let term = qmul(&qmul(&pow(&xs, d - j), &pow(&ys, j)), &vec![BigRational::from_integer(c.clone())]);
        let n = total.len().max(term.len());
        total.resize(n, BigRational::zero());
        for (i, v) in term.into_iter().enumerate() {
            total[i] += v;
        }
    }
    qtrim(total)
}

fn sign_changes(seq: &[QPoly], x: &BigRational) -> usize {
    let signs: Vec<i32> = seq
        .iter()
        .map(|p| {
            let v = qeval(p, x);
            if v.is_positive() {
                1
            } else if v.is_negative() {
                -1
            } else {
                0
            }
        })
        .filter(|&s| s != 0)
        .collect();
    signs.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Exact test for a real root of `g` in [0, 1].
fn real_root_in_unit_interval(g: &QPoly) -> bool {
    if g.is_empty() {
        return true;
    }
    let zero = BigRational::zero();
    let one = BigRational::from_integer(BigInt::from(1));
    if qeval(g, &zero).is_zero() {
        return true;
    }
    if g.len() == 1 {
        return false;
    }
    let deriv: QPoly = qtrim(
        g.iter()
            .enumerate()
            .skip(1)
            .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
            .collect(),
    );
    let mut seq = vec![g.clone(), deriv];
    while seq.last().is_some_and(|p| p.len() > 1) {
        let n = seq.len();
        let r: QPoly = qrem(&seq[n - 2], &seq[n - 1]).into_iter().map(|c| -c).collect();
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    sign_changes(&seq, &zero) > sign_changes(&seq, &one)
}

/// True iff F has a real zero-line: y | F or F(x, 1) has a real root.
pub fn has_real_zero_line(form: &BinaryForm) -> bool {
    if form.leading().is_zero() {
        return true;
    }
    let g: QPoly = form
        .dehomogenize()
        .coeffs()
        .iter()
        .map(|c| BigRational::from_integer(c.clone()))
        .collect();
    // all real roots lie in (-B, B) with B = 1 + max |c_i / c_d|
    let lead = g.last().unwrap().abs();
    let bound = g.iter().map(|c| c.abs() / &lead).fold(BigRational::zero(), |m, c| if c > m { c } else { m })
        + BigRational::from_integer(BigInt::from(1));
    // substitute x = B (2l - 1) to map [0, 1] onto [-B, B]
    let two_b = &bound * BigRational::from_integer(BigInt::from(2));
    let lin: QPoly = vec![-bound.clone(), two_b];
    let mut acc: QPoly = vec![];
    for c in g.iter().rev() {
        acc = qmul(&acc, &lin);
        if acc.is_empty() {
            acc = vec![c.clone()];
        } else {
            acc[0] += c;
        }
        acc = qtrim(acc);
    }
    real_root_in_unit_interval(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn form(c: &[i64]) -> BinaryForm {
        BinaryForm::from_i64(c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn stats_examples() {
        let sq = Region::rect(0.0, 10.0, 0.0, 10.0).unwrap().stats();
        assert_eq!((sq.vol, sq.sup_norm, sq.boundary_len), (100.0, 10.0, 40.0));
        assert!(close(sq.k_r, 11.0 + 40.0 * 11f64.ln() + 100.0 / 11.0, 1e-12));
        assert!(close(sq.k_r, 116.007, 1e-5));
        let unit = Region::rect(0.0, 1.0, 0.0, 1.0).unwrap().stats();
        assert!(close(unit.k_r, 2.5 + 4.0 * 2f64.ln(), 1e-12));
        assert!(close(unit.k_r, 5.27259, 1e-5));
        let d = Region::disc(0.0, 0.0, 3.0).unwrap().stats();
        assert_eq!(d.sup_norm, 3.0);
        assert!(close(d.vol, 9.0 * PI, 1e-12) && close(d.boundary_len, 6.0 * PI, 1e-12));
    }

    #[test]
    fn degenerate_shapes_rejected() {
        assert!(Region::rect(1.0, 1.0, 0.0, 1.0).is_err());
        assert!(Region::disc(0.0, 0.0, 0.0).is_err());
        assert!(Region::polygon(vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]]).is_err());
        assert!(Region::polygon(vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]]).is_err());
        assert!(Region::annulus(0.0, 0.0, 2.0, 1.0).is_err());
        assert!(Region::rect(0.0, f64::NAN, 0.0, 1.0).is_err());
    }

    #[test]
    fn membership_is_closed() {
        let unit = Region::disc(0.0, 0.0, 1.0).unwrap();
        assert!(unit.contains(0, 0));
        assert!(unit.contains(1, 0));
        assert!(!unit.contains(2, 0));
        assert!(Region::rect(0.0, 10.0, 0.0, 10.0).unwrap().contains(10, 10));
        let tri = Region::polygon(vec![[0.0, 0.0], [4.0, 0.0], [0.0, 4.0]]).unwrap();
        assert!(tri.contains(2, 2) && tri.contains(0, 4) && !tri.contains(3, 2));
        let ann = Region::annulus(0.0, 0.0, 2.0, 3.0).unwrap();
        assert!(ann.contains(2, 0) && ann.contains(3, 0) && !ann.contains(1, 1) && !ann.contains(3, 1));
    }

    #[test]
    fn row_spans_match_membership() {
        let shapes = [
            Region::disc(0.3, -0.7, 5.5).unwrap(),
            Region::polygon(vec![[-3.0, -1.0], [4.5, -2.0], [5.0, 3.0], [-1.0, 4.2]]).unwrap(),
            Region::annulus(0.5, 0.0, 2.5, 6.0).unwrap(),
            Region::rect(-2.5, 3.0, 1.0, 4.0).unwrap(),
        ];
        for r in &shapes {
            for t in -10..=10 {
                let from_spans: Vec<i64> = r.row_spans(t).into_iter().flat_map(|(a, b)| a..=b).collect();
                let direct: Vec<i64> = (-12..=12).filter(|&s| r.contains(s, t)).collect();
                assert_eq!(from_spans, direct, "{r:?} row {t}");
            }
        }
    }

    #[test]
    fn regularity_examples() {
        let circle = [form(&[1, 0, 1])];
        let r = Region::rect(1.0, 10.0, 1.0, 10.0).unwrap();
        // vol 81 against K_R^c1 with K_R = 11 + 36 ln 11 + 81/11
        let k_r = 11.0 + 36.0 * 11f64.ln() + 81.0 / 11.0;
        assert!(close(r.stats().k_r, k_r, 1e-12));
        assert!(r.is_regular(&circle, 0.5).regular);
        assert!(r.is_regular(&circle, 0.25).regular);
        assert!(!r.is_regular(&circle, 1.0).regular);
        let through_origin = Region::disc(0.5, 0.5, 2.0).unwrap();
        let rep = through_origin.is_regular(&circle, 0.0);
        assert!(rep.contains_origin && !rep.regular);
        // x^2 - 2y^2 vanishes on s = sqrt(2) t, which crosses [1,2]^2
        let pell = [form(&[1, 0, -2])];
        let sq = Region::rect(1.0, 2.0, 1.0, 2.0).unwrap();
        assert_eq!(sq.is_regular(&pell, 0.0).zero_line_hits, vec![0]);
        let away = Region::rect(1.5, 2.0, 1.0, 1.05).unwrap();
        assert!(away.is_regular(&pell, 0.0).zero_line_hits.is_empty());
    }

    #[test]
    fn zero_lines_of_cubic_and_linear() {
        // x^3 - x y^2 - y^3 has one real zero-line, slope about 1.3247
        let cubic = form(&[1, 0, -1, -1]);
        assert!(has_real_zero_line(&cubic));
        assert!(!has_real_zero_line(&form(&[1, 0, 1])));
        assert!(Region::rect(13.0, 14.0, 9.0, 11.0).unwrap().meets_zero_line(&cubic));
        assert!(!Region::rect(-20.0, -1.0, 1.0, 20.0).unwrap().meets_zero_line(&cubic));
        // 7y vanishes on t = 0
        let y = form(&[0, 7]);
        assert!(Region::rect(1.0, 2.0, -1.0, 1.0).unwrap().meets_zero_line(&y));
        assert!(!Region::rect(1.0, 2.0, 0.5, 1.0).unwrap().meets_zero_line(&y));
        let ann = Region::annulus(0.0, 0.0, 2.0, 5.0).unwrap();
        assert!(ann.meets_zero_line(&cubic));
        assert!(!ann.meets_zero_line(&form(&[1, 0, 1])));
    }

    #[test]
    fn disc_zero_line_is_conservative_only_near_tangency() {
        let pell = form(&[1, 0, -2]);
        // centre on the zero-line direction
        let d = Region::disc(14.142135623730951, 10.0, 1.0).unwrap();
        assert!(d.meets_zero_line(&pell));
        // far from both lines s = +-sqrt(2) t
        let d = Region::disc(0.0, 10.0, 1.0).unwrap();
        assert!(!d.meets_zero_line(&pell));
    }

    fn arb_region() -> impl Strategy<Value = Region> {
        let coord = -50.0f64..50.0;
        prop_oneof![
            (coord.clone(), 0.1f64..40.0, coord.clone(), 0.1f64..40.0)
                .prop_map(|(x, w, y, h)| Region::rect(x, x + w, y, y + h).unwrap()),
            (coord.clone(), coord.clone(), 0.1f64..40.0).prop_map(|(x, y, r)| Region::disc(x, y, r).unwrap()),
            (coord.clone(), coord.clone(), 0.1f64..20.0, 0.1f64..20.0)
                .prop_map(|(x, y, a, b)| Region::annulus(x, y, a, a + b).unwrap()),
            (coord.clone(), coord, 0.5f64..30.0, 3usize..9).prop_map(|(x, y, r, n)| {
                let vs = (0..n)
                    .map(|k| {
                        let a = 2.0 * PI * k as f64 / n as f64;
                        [x + r * a.cos(), y + r * a.sin()]
                    })
                    .collect();
                Region::polygon(vs).unwrap()
            }),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]
        #[test]
        fn volume_chain(r in arb_region()) {
            let st = r.stats();
            prop_assert!(st.vol <= 4.0 * st.sup_norm * st.sup_norm * (1.0 + 1e-12));
            prop_assert!(4.0 * st.sup_norm.powi(2) <= (1.0 + st.sup_norm).powi(4));
            prop_assert!((1.0 + st.sup_norm).powi(4) <= st.k_r.powi(4));
            prop_assert!(st.k_r >= 1.0);
        }

        #[test]
        fn scale_covariance(r in arb_region(), lambda in 0.1f64..10.0) {
            let (a, b) = (r.stats(), r.scaled(lambda).stats());
            prop_assert!(close(b.vol, a.vol * lambda * lambda, 1e-9));
            prop_assert!(close(b.sup_norm, a.sup_norm * lambda, 1e-9));
            prop_assert!(close(b.boundary_len, a.boundary_len * lambda, 1e-9));
            let k = 1.0 + b.sup_norm + b.boundary_len * (1.0 + b.sup_norm).ln() + b.vol / (1.0 + b.sup_norm);
            prop_assert!(close(b.k_r, k, 1e-12));
        }
    }

    #[test]
    fn json_shapes() {
        let r: Region = serde_json::from_str(r#"{"shape":"rect","x":[1,2],"y":[3,4]}"#).unwrap();
        assert_eq!(r, Region::rect(1.0, 2.0, 3.0, 4.0).unwrap());
        let a: Region = serde_json::from_str(r#"{"shape":"annulus","center":[0,0],"inner":1,"outer":2}"#).unwrap();
        assert!(matches!(a, Region::Annulus { .. }));
        assert!(serde_json::from_str::<Region>(r#"{"shape":"blob"}"#).is_err());
    }
}

//! Ideals of the order Z[theta] as integer lattices in Z^d.
//!
//! This is an independent route to divisibility: an element lies in an
//! ideal iff its coordinate vector in the basis 1, theta, ..., theta^(d-1)
//! reduces to zero against the ideal's Hermite basis. It never looks at
//! norms or roots, only at generators, so it can check the factorization
//! code without sharing its logic.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{IdealFactorization, NumberField, PrimeIdeal};
use crate::intpoly::determinant;
use crate::nt;

/// Upper-triangular basis of a full-rank sublattice containing `P Z^d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdealLattice {
    rows: Vec<Vec<i128>>,
}

impl IdealLattice {
    /// The lattice generated by `gens` together with `modulus * Z^d`.
    pub fn generated(d: usize, modulus: i128, gens: &[Vec<i128>]) -> Self {
        let mut rows: Vec<Vec<i128>> = (0..d)
            .map(|i| {
                let mut r = vec![0; d];
                r[i] = modulus;
                r
            })
            .collect();
        for g in gens {
            let mut v: Vec<i128> = g.iter().map(|c| c.rem_euclid(modulus)).collect();
            for i in 0..d {
                if v[i] == 0 {
                    continue;
                }
                let (a, b) = (rows[i][i], v[i]);
                let (g, x, y) = nt::ext_gcd(a, b);
                let (a_g, b_g) = (a / g, b / g);
                let new_row: Vec<i128> = (0..d).map(|k| x * rows[i][k] + y * v[k]).collect();
                let rest: Vec<i128> = (0..d)
                    .map(|k| (a_g * v[k] - b_g * rows[i][k]).rem_euclid(modulus))
                    .collect();
                rows[i] = new_row;
                v = rest;
                Self::reduce_row(&mut rows, i);
            }
        }
        for i in (0..d).rev() {
            Self::reduce_row(&mut rows, i);
        }
        IdealLattice { rows }
    }

    /// Reduces entries right of the diagonal in row `i` by the rows below.
    fn reduce_row(rows: &mut [Vec<i128>], i: usize) {
        let d = rows.len();
        for j in i + 1..d {
            let q = rows[i][j].div_euclid(rows[j][j]);
            if q != 0 {
                for k in j..d {
                    rows[i][k] -= q * rows[j][k];
                }
            }
        }
    }

    pub fn rows(&self) -> &[Vec<i128>] {
        &self.rows
    }

    /// Index in Z^d, which is the ideal norm.
    pub fn index(&self) -> i128 {
        self.rows.iter().enumerate().map(|(i, r)| r[i]).product()
    }

    pub fn contains(&self, v: &[i128]) -> bool {
        let mut u = v.to_vec();
        for (i, row) in self.rows.iter().enumerate() {
            if u[i].rem_euclid(row[i]) != 0 {
                return false;
            }
            let q = u[i] / row[i];
            for k in i..u.len() {
                u[k] -= q * row[k];
            }
        }
        true
    }
}

/// Arithmetic in Z[theta] / (P), elements as coefficient vectors.
struct Order<'a> {
    min_poly: &'a [i128],
    modulus: i128,
}

impl Order<'_> {
    fn d(&self) -> usize {
        self.min_poly.len() - 1
    }

    fn mul(&self, a: &[i128], b: &[i128]) -> Vec<i128> {
        let d = self.d();
        let m = self.modulus;
        let mut prod = vec![0i128; 2 * d];
        for (i, &x) in a.iter().enumerate() {
            for (j, &y) in b.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y).rem_euclid(m);
            }
        }
        for k in (d..2 * d).rev() {
            let c = prod[k];
            if c == 0 {
                continue;
            }
            for i in 0..d {
                prod[k - d + i] = (prod[k - d + i] - c * self.min_poly[i]).rem_euclid(m);
            }
            prod[k] = 0;
        }
        prod.truncate(d);
        prod
    }

    fn theta_power(&self, j: usize) -> Vec<i128> {
        let d = self.d();
        let mut theta = vec![0i128; d];
        if d == 1 {
            theta[0] = (-self.min_poly[0]).rem_euclid(self.modulus);
        } else {
            theta[1] = 1;
        }
        let mut acc = vec![0i128; d];
        acc[0] = 1 % self.modulus;
        for _ in 0..j {
            acc = self.mul(&acc, &theta);
        }
        acc
    }
}

fn min_poly_i128(field: &NumberField) -> Vec<i128> {
    field
        .min_poly()
        .to_i128()
        .expect("minimal polynomial coefficients fit in i128")
}

/// Hermite basis of `q^a` for an unramified prime `q`.
pub fn prime_power_lattice(field: &NumberField, q: &PrimeIdeal, a: u32) -> IdealLattice {
    let d = field.degree();
    let modulus = (q.p as i128).pow(a);
    let mp = min_poly_i128(field);
    let order = Order { min_poly: &mp, modulus };
    let mut g = vec![0i128; d];
    let residue = q.residue_poly();
    for (i, &c) in residue.coeffs().iter().enumerate() {
        let term: Vec<i128> = order.theta_power(i).iter().map(|x| x * c as i128).collect();
        for k in 0..d {
            g[k] = (g[k] + term[k]).rem_euclid(modulus);
        }
    }
    let mut gens = Vec::new();
    let mut gpow = order.theta_power(0);
    let mut g_powers = vec![gpow.clone()];
    for _ in 0..a {
        gpow = order.mul(&gpow, &g);
        g_powers.push(gpow.clone());
    }
    for i in 0..=a {
        let pi = (q.p as i128).pow(i);
        let base: Vec<i128> = g_powers[(a - i) as usize].iter().map(|x| x * pi).collect();
        for j in 0..d {
            gens.push(order.mul(&base, &order.theta_power(j)));
        }
    }
    IdealLattice::generated(d, modulus, &gens)
}

/// Coordinates of `b s - theta t`.
pub fn linear_element(field: &NumberField, s: i64, t: i64) -> Vec<i128> {
    let d = field.degree();
    let b = field.b().to_i128().expect("leading coefficient fits in i128");
    let mut v = vec![0i128; d];
    if d == 1 {
        let theta = -field.min_poly().coeffs()[0].to_i128().expect("small root");
        v[0] = b * s as i128 - theta * t as i128;
    } else {
        v[0] = b * s as i128;
        v[1] = -(t as i128);
    }
    v
}

/// Divisibility by an ideal, checked prime power by prime power.
pub fn ideal_contains(field: &NumberField, ideal: &IdealFactorization, elem: &[i128]) -> bool {
    ideal
        .factors()
        .iter()
        .all(|(q, a)| prime_power_lattice(field, q, *a).contains(elem))
}

/// Exact valuation of `elem` at `q`, capped at `cap`.
pub fn valuation(field: &NumberField, q: &PrimeIdeal, elem: &[i128], cap: u32) -> u32 {
    let mut v = 0;
    while v < cap && prime_power_lattice(field, q, v + 1).contains(elem) {
        v += 1;
    }
    v
}

/// Norm of an element as the determinant of multiplication by it.
pub fn element_norm(field: &NumberField, elem: &[i128]) -> BigInt {
    let d = field.degree();
    let mp: Vec<BigInt> = field.min_poly().coeffs().to_vec();
    // column j = elem * theta^j, reduced by the monic minimal polynomial
    let mut cols: Vec<Vec<BigInt>> = Vec::with_capacity(d);
    let mut cur: Vec<BigInt> = elem.iter().map(|&c| BigInt::from(c)).collect();
    for _ in 0..d {
        cols.push(cur.clone());
        if d == 1 {
            break;
        }
        let top = cur[d - 1].clone();
        let mut next = vec![BigInt::from(0); d];
        for i in (1..d).rev() {
            next[i] = cur[i - 1].clone();
        }
        for i in 0..d {
            next[i] -= &top * &mp[i];
        }
        cur = next;
    }
    if d == 1 {
        return cols[0][0].clone();
    }
    let matrix: Vec<Vec<BigInt>> = (0..d).map(|i| (0..d).map(|j| cols[j][i].clone()).collect()).collect();
    determinant(matrix)
}

/// gcd of the entries, used to decide whether `p` divides the element.
pub fn content(elem: &[i128]) -> i128 {
    elem.iter().fold(0i128, |g, &c| g.gcd(&c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::intpoly::BinaryForm;

    fn gaussian() -> NumberField {
        NumberField::new(BinaryForm::from_i64(&[1, 0, 1]).unwrap()).unwrap()
    }

    #[test]
    fn prime_lattice_has_norm_index() {
        let k = gaussian();
        let q = PrimeIdeal::degree_one(5, 2);
        assert_eq!(prime_power_lattice(&k, &q, 1).index(), 5);
        assert_eq!(prime_power_lattice(&k, &q, 2).index(), 25);
        let inert = k.split_prime(3).unwrap()[0];
        assert_eq!(prime_power_lattice(&k, &inert, 1).index(), 9);
    }

    #[test]
    fn gaussian_membership() {
        let k = gaussian();
        // 1 - 2i = 1*1 - theta*2 lies in (5, theta - 3): 1 - 2*3 = -5
        let e = linear_element(&k, 1, 2);
        assert!(prime_power_lattice(&k, &PrimeIdeal::degree_one(5, 3), 1).contains(&e));
        assert!(!prime_power_lattice(&k, &PrimeIdeal::degree_one(5, 2), 1).contains(&e));
        // norm of 1 - 2i is 5
        assert_eq!(element_norm(&k, &e), BigInt::from(5));
    }

    #[test]
    fn cubic_norm_matches_form() {
        let k = NumberField::new(BinaryForm::from_i64(&[1, 0, -1, -1]).unwrap()).unwrap();
        for (s, t) in [(1, 2), (3, -5), (7, 4)] {
            let e = linear_element(&k, s, t);
            let val = k.source_form().eval(&s.into(), &t.into());
            assert_eq!(element_norm(&k, &e), val);
        }
    }
}

//! Finite quadratic forms `q: A → Q/2Z` on finite abelian groups, presented
//! on generators of given orders.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::{BigRational, Ratio};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{is_prime, DiscriminantData, IntegralLattice};

pub type Q64 = Ratio<i64>;

/// Largest group handled by the Gauss sum directly.
const GAUSS_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteQuadraticForm {
    orders: Vec<u64>,
    q: Vec<Q64>,
    b: Vec<Vec<Q64>>,
}

fn reduce(x: Q64, m: i64) -> Q64 {
    let m = Q64::from_integer(m);
    x - (x / m).floor() * m
}

fn big_to_q64(x: &BigRational) -> Result<Q64> {
    let n = x.numer().to_i64().ok_or(Error::EntryTooLarge)?;
    let d = x.denom().to_i64().ok_or(Error::EntryTooLarge)?;
    Ok(Q64::new(n, d))
}

/// Legendre symbol of `a` modulo the odd prime `p` (0 if `p | a`).
pub fn legendre(a: i64, p: u64) -> i8 {
    let p = p as i64;
    let a = a.rem_euclid(p);
    if a == 0 {
        return 0;
    }
    let mut r: i64 = 1;
    let mut base = a;
    let mut e = (p - 1) / 2;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as i128 * base as i128 % p as i128) as i64;
        }
        base = (base as i128 * base as i128 % p as i128) as i64;
        e >>= 1;
    }
    if r == 1 {
        1
    } else {
        -1
    }
}

fn inv_mod(a: i64, p: i64) -> i64 {
    let g = a.rem_euclid(p).extended_gcd(&p);
    g.x.rem_euclid(p)
}

/// Invariants at one prime.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeInvariants {
    pub p: u64,
    pub length: usize,
    /// Legendre symbol of the determinant of the diagonalized `F_p` form (odd `p`).
    pub det_class: Option<i8>,
    /// Even type of the 2-elementary part (`p = 2`).
    pub even_type: Option<bool>,
    pub signature: u8,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormInvariants {
    pub primes: Vec<PrimeInvariants>,
}

impl FiniteQuadraticForm {
    pub fn new(orders: Vec<u64>, q: Vec<Q64>, b: Vec<Vec<Q64>>) -> Result<Self> {
        let k = orders.len();
        if q.len() != k || b.len() != k || b.iter().any(|r| r.len() != k) {
            return Err(Error::InvalidParams("finite form shape mismatch".into()));
        }
        let q: Vec<Q64> = q.into_iter().map(|x| reduce(x, 2)).collect();
        let b: Vec<Vec<Q64>> = b.into_iter().map(|r| r.into_iter().map(|x| reduce(x, 1)).collect()).collect();
        for i in 0..k {
            let n = orders[i] as i64;
            if orders[i] < 2 {
                return Err(Error::InvalidParams("generator orders must exceed 1".into()));
            }
            if reduce(q[i], 1) != b[i][i] {
                return Err(Error::InvalidParams("q and b disagree on a generator".into()));
            }
            if !(q[i] * Q64::from_integer(n * n) / 2).is_integer() {
                return Err(Error::InvalidParams("q(n·g) must vanish".into()));
            }
            for j in 0..k {
                if b[i][j] != b[j][i] || !(b[i][j] * Q64::from_integer(n)).is_integer() {
                    return Err(Error::InvalidParams("b is not a symmetric pairing on the group".into()));
                }
            }
        }
        Ok(FiniteQuadraticForm { orders, q, b })
    }

    pub fn trivial() -> Self {
        FiniteQuadraticForm { orders: vec![], q: vec![], b: vec![] }
    }

    pub fn from_discriminant(d: &DiscriminantData) -> Result<Self> {
        let orders = d
            .elementary_divisors
            .iter()
            .map(|x| x.to_u64().ok_or(Error::EntryTooLarge))
            .collect::<Result<Vec<_>>>()?;
        let q = d.q_values.iter().map(big_to_q64).collect::<Result<Vec<_>>>()?;
        let b = d
            .b_values
            .iter()
            .map(|r| r.iter().map(big_to_q64).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteQuadraticForm::new(orders, q, b)
    }

    pub fn of_lattice(l: &IntegralLattice) -> Result<Self> {
        if !l.is_even() {
            return Err(Error::UnsupportedShape("discriminant form of an odd lattice".into()));
        }
        FiniteQuadraticForm::from_discriminant(&l.discriminant_group())
    }

    pub fn orders(&self) -> &[u64] {
        &self.orders
    }

    pub fn q_values(&self) -> &[Q64] {
        &self.q
    }

    pub fn b_matrix(&self) -> &[Vec<Q64>] {
        &self.b
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn order(&self) -> BigUint {
        self.orders.iter().fold(BigUint::one(), |a, &n| a * BigUint::from(n))
    }

    fn order_u64(&self) -> Option<u64> {
        self.orders.iter().try_fold(1u64, |a, &n| a.checked_mul(n))
    }

    /// `q(x)` for coordinates `x` on the generators, in `[0, 2)`.
    pub fn value(&self, x: &[i64]) -> Q64 {
        let mut s = Q64::zero();
        for i in 0..self.len() {
            let xi = x[i].rem_euclid(self.orders[i] as i64);
            if xi == 0 {
                continue;
            }
            s = reduce(s + self.q[i] * Q64::from_integer(xi * xi), 2);
            for j in i + 1..self.len() {
                let xj = x[j].rem_euclid(self.orders[j] as i64);
                s = reduce(s + self.b[i][j] * Q64::from_integer(2 * xi * xj), 2);
            }
        }
        s
    }

    pub fn bilinear(&self, x: &[i64], y: &[i64]) -> Q64 {
        let mut s = Q64::zero();
        for i in 0..self.len() {
            for j in 0..self.len() {
                let t = (x[i].rem_euclid(self.orders[i] as i64)) * (y[j].rem_euclid(self.orders[j] as i64));
                s = reduce(s + self.b[i][j] * Q64::from_integer(t), 1);
            }
        }
        s
    }

    pub fn direct_sum(&self, other: &FiniteQuadraticForm) -> FiniteQuadraticForm {
        let (k1, k2) = (self.len(), other.len());
        let mut b = vec![vec![Q64::zero(); k1 + k2]; k1 + k2];
        for i in 0..k1 {
            for j in 0..k1 {
                b[i][j] = self.b[i][j];
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                b[k1 + i][k1 + j] = other.b[i][j];
            }
        }
        FiniteQuadraticForm {
            orders: self.orders.iter().chain(&other.orders).copied().collect(),
            q: self.q.iter().chain(&other.q).copied().collect(),
            b,
        }
    }

    pub fn negate(&self) -> FiniteQuadraticForm {
        FiniteQuadraticForm {
            orders: self.orders.clone(),
            q: self.q.iter().map(|&x| reduce(-x, 2)).collect(),
            b: self.b.iter().map(|r| r.iter().map(|&x| reduce(-x, 1)).collect()).collect(),
        }
    }

    /// Restriction to the `p`-Sylow subgroup.
    pub fn p_part(&self, p: u64) -> FiniteQuadraticForm {
        let mut idx = Vec::new();
        let mut mult = Vec::new();
        let mut orders = Vec::new();
        for (i, &n) in self.orders.iter().enumerate() {
            let mut pk = 1u64;
            let mut m = n;
            while m % p == 0 {
                m /= p;
                pk *= p;
            }
            if pk > 1 {
                idx.push(i);
                mult.push(m as i64);
                orders.push(pk);
            }
        }
        let q = idx
            .iter()
            .zip(&mult)
            .map(|(&i, &m)| reduce(self.q[i] * Q64::from_integer(m * m), 2))
            .collect();
        let b = idx
            .iter()
            .zip(&mult)
            .map(|(&i, &mi)| {
                idx.iter()
                    .zip(&mult)
                    .map(|(&j, &mj)| reduce(self.b[i][j] * Q64::from_integer(mi * mj), 1))
                    .collect()
            })
            .collect();
        FiniteQuadraticForm { orders, q, b }
    }

    pub fn primes(&self) -> Vec<u64> {
        let mut ps = Vec::new();
        for &n in &self.orders {
            let mut m = n;
            let mut d = 2;
            while d * d <= m {
                if m % d == 0 {
                    if !ps.contains(&d) {
                        ps.push(d);
                    }
                    while m % d == 0 {
                        m /= d;
                    }
                }
                d += 1;
            }
            if m > 1 && !ps.contains(&m) {
                ps.push(m);
            }
        }
        ps.sort_unstable();
        ps
    }

    /// New presentation on generators `h_j = Σ_i images[j][i]·g_i`, each
    /// assumed to have the same order as `g_j`.
    pub fn rebased(&self, images: &[Vec<i64>]) -> Result<FiniteQuadraticForm> {
        let q = images.iter().map(|h| self.value(h)).collect();
        let b = images.iter().map(|h| images.iter().map(|k| self.bilinear(h, k)).collect()).collect();
        FiniteQuadraticForm::new(self.orders.clone(), q, b)
    }

    /// Iterates over all group elements as coordinate vectors.
    fn for_each_element<F: FnMut(&[i64])>(&self, mut f: F) {
        let k = self.len();
        let mut x = vec![0i64; k];
        loop {
            f(&x);
            let mut i = 0;
            loop {
                if i == k {
                    return;
                }
                x[i] += 1;
                if x[i] < self.orders[i] as i64 {
                    break;
                }
                x[i] = 0;
                i += 1;
            }
        }
    }

    /// `Σ exp(πi·q(x))` as (re, im).
    fn gauss_sum(&self) -> (f64, f64) {
        // common denominator: q(x) = num / den mod 2
        let den = self
            .q
            .iter()
            .map(|x| *x.denom())
            .chain(self.b.iter().flatten().map(|x| *x.denom()))
            .fold(1i64, |a, d| a.lcm(&d));
        let m = 2 * den as i128;
        let qn: Vec<i128> = self.q.iter().map(|x| (x * Q64::from_integer(den)).to_integer() as i128).collect();
        let bn: Vec<Vec<i128>> = self
            .b
            .iter()
            .map(|r| r.iter().map(|x| (x * Q64::from_integer(den)).to_integer() as i128).collect())
            .collect();
        let k = self.len();
        let (mut re, mut im) = (0f64, 0f64);
        self.for_each_element(|x| {
            let mut s: i128 = 0;
            for i in 0..k {
                if x[i] == 0 {
                    continue;
                }
                let xi = x[i] as i128;
                s += xi * xi * qn[i];
                for j in i + 1..k {
                    s += 2 * xi * x[j] as i128 * bn[i][j];
                }
                s %= m;
            }
            let ang = PI * s as f64 / den as f64;
            re += ang.cos();
            im += ang.sin();
        });
        (re, im)
    }

    fn gauss_signature(&self) -> Result<u8> {
        let n = self.order_u64().ok_or(Error::TooLarge(u64::MAX))? as f64;
        let (re, im) = self.gauss_sum();
        let mag = (re * re + im * im).sqrt();
        if (mag - n.sqrt()).abs() > 1e-6 * n.sqrt().max(1.0) {
            return Err(Error::DegenerateForm);
        }
        let octant = (im.atan2(re) / (PI / 4.0)).round() as i64;
        Ok(octant.rem_euclid(8) as u8)
    }

    /// Signature mod 8 via the Gauss sum, split into `p`-parts when large.
    pub fn milgram_signature(&self) -> Result<u8> {
        if self.is_empty() {
            return Ok(0);
        }
        if self.order_u64().is_some_and(|n| n <= GAUSS_LIMIT) {
            return self.gauss_signature();
        }
        let mut total = 0u8;
        for p in self.primes() {
            let part = self.p_part(p);
            let s = if part.order_u64().is_some_and(|n| n <= GAUSS_LIMIT) {
                part.gauss_signature()?
            } else if p != 2 {
                part.elementary_odd(p)?.signature
            } else {
                return Err(Error::UnsupportedShape("2-part too large for the Gauss sum".into()));
            };
            total = (total + s) % 8;
        }
        Ok(total)
    }

    /// The symmetric matrix `p·b mod p` of a `p`-elementary form.
    pub fn fp_bilinear(&self, p: u64) -> Result<Vec<Vec<i64>>> {
        if self.orders.iter().any(|&n| n != p) {
            return Err(Error::UnsupportedShape(format!("not {p}-elementary")));
        }
        let pi = p as i64;
        Ok(self
            .b
            .iter()
            .map(|r| r.iter().map(|x| (x * Q64::from_integer(pi)).to_integer().rem_euclid(pi)).collect())
            .collect())
    }

    /// Length, determinant class and signature of an odd `p`-elementary form
    /// from a diagonalization over `F_p`.
    fn elementary_odd(&self, p: u64) -> Result<PrimeInvariants> {
        let diag = diagonalize_fp(self.fp_bilinear(p)?, p)?;
        let pi = p as i64;
        let half = inv_mod(2, pi);
        let mut det_class = 1i8;
        let mut sig = 0u8;
        for c in &diag {
            // diagonal entry c ↔ q(x) = 2a·x²/p with a = c/2
            let a = c * half % pi;
            let chi = legendre(a, p);
            det_class *= chi;
            sig += match (p % 4 == 1, chi == 1) {
                (true, true) => 0,
                (true, false) => 4,
                (false, true) => 2,
                (false, false) => 6,
            };
        }
        Ok(PrimeInvariants { p, length: diag.len(), det_class: Some(det_class), even_type: None, signature: sig % 8 })
    }

    pub fn invariants(&self) -> Result<FormInvariants> {
        let mut primes = Vec::new();
        for p in self.primes() {
            let part = self.p_part(p);
            if part.orders.iter().any(|&n| n != p) {
                return Err(Error::UnsupportedShape(format!("{p}-part is not {p}-elementary")));
            }
            if p == 2 {
                let even = part.q.iter().all(|x| x.is_integer());
                if !even {
                    return Err(Error::UnsupportedShape("odd-type 2-elementary part".into()));
                }
                let signature = part.gauss_signature()?;
                primes.push(PrimeInvariants { p, length: part.len(), det_class: None, even_type: Some(true), signature });
            } else {
                primes.push(part.elementary_odd(p)?);
            }
        }
        Ok(FormInvariants { primes })
    }

    /// The Witt type `ε = χ((−1)^σ·d)` of a `p`-elementary form of length `2σ`.
    pub fn witt_epsilon(&self, p: u64) -> Result<i8> {
        if self.len() % 2 == 1 {
            return Err(Error::OddLength(self.len()));
        }
        let diag = diagonalize_fp(self.fp_bilinear(p)?, p)?;
        let pi = p as i64;
        let d = diag.iter().fold(1i64, |a, c| a * c % pi);
        let sigma = self.len() / 2;
        let sign = if sigma % 2 == 0 { 1 } else { pi - 1 };
        Ok(legendre(d * sign % pi, p))
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            orders: self.orders.clone(),
            q_num: self.q.iter().map(|x| *x.numer()).collect(),
            q_den: self.q.iter().map(|x| *x.denom()).collect(),
            b: self.b.iter().map(|r| r.iter().map(|x| format!("{}/{}", x.numer(), x.denom())).collect()).collect(),
        }
    }

    pub fn from_json(j: &FormJson) -> Result<Self> {
        if j.q_num.len() != j.q_den.len() || j.q_den.contains(&0) {
            return Err(Error::Parse("q_num/q_den mismatch".into()));
        }
        let q = j.q_num.iter().zip(&j.q_den).map(|(&n, &d)| Q64::new(n, d)).collect();
        let b = j
            .b
            .iter()
            .map(|r| r.iter().map(|s| parse_fraction(s)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        FiniteQuadraticForm::new(j.orders.clone(), q, b)
    }
}

fn parse_fraction(s: &str) -> Result<Q64> {
    let bad = || Error::Parse(format!("bad fraction {s}"));
    match s.split_once('/') {
        Some((n, d)) => {
            let d: i64 = d.trim().parse().map_err(|_| bad())?;
            if d == 0 {
                return Err(bad());
            }
            Ok(Q64::new(n.trim().parse().map_err(|_| bad())?, d))
        }
        None => Ok(Q64::from_integer(s.trim().parse().map_err(|_| bad())?)),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormJson {
    pub orders: Vec<u64>,
    pub q_num: Vec<i64>,
    pub q_den: Vec<i64>,
    pub b: Vec<Vec<String>>,
}

/// Diagonal entries of a symmetric matrix over `F_p` (odd `p`) after
/// congruence diagonalization. Fails on a degenerate form.
pub fn diagonalize_fp(mut m: Vec<Vec<i64>>, p: u64) -> Result<Vec<i64>> {
    let p = p as i64;
    let n = m.len();
    let mut diag = Vec::with_capacity(n);
    for k in 0..n {
        // find an anisotropic vector among the remaining basis
        if m[k][k].rem_euclid(p) == 0 {
            let mut fixed = false;
            if let Some(j) = (k + 1..n).find(|&j| m[j][j].rem_euclid(p) != 0) {
                m.swap(k, j);
                for row in m.iter_mut() {
                    row.swap(k, j);
                }
                fixed = true;
            } else if let Some(j) = (k + 1..n).find(|&j| m[k][j].rem_euclid(p) != 0) {
                // e_k ← e_k + e_j has norm 2·m[k][j] ≠ 0
                for c in 0..n {
                    m[k][c] = (m[k][c] + m[j][c]).rem_euclid(p);
                }
                for r in 0..n {
                    m[r][k] = (m[r][k] + m[r][j]).rem_euclid(p);
                }
                fixed = true;
            }
            if !fixed {
                return Err(Error::DegenerateForm);
            }
        }
        let d = m[k][k].rem_euclid(p);
        let di = inv_mod(d, p);
        for j in k + 1..n {
            let f = m[j][k].rem_euclid(p) * di % p;
            if f == 0 {
                continue;
            }
            for c in 0..n {
                m[j][c] = (m[j][c] - f * m[k][c]).rem_euclid(p);
            }
            for r in 0..n {
                m[r][j] = (m[r][j] - f * m[r][k]).rem_euclid(p);
            }
        }
        diag.push(d);
    }
    Ok(diag)
}

pub fn form_invariants(q: &FiniteQuadraticForm) -> Result<FormInvariants> {
    q.invariants()
}

pub fn forms_isomorphic(a: &FiniteQuadraticForm, b: &FiniteQuadraticForm) -> Result<bool> {
    Ok(a.order() == b.order() && a.invariants()? == b.invariants()?)
}

/// `|O(V)|` for a nondegenerate quadratic space of dimension `2σ` and Witt
/// type `ε` over `F_p`.
pub fn orthogonal_group_order(p: u64, sigma: u32, epsilon: i8) -> BigUint {
    let pb = BigInt::from(p);
    let mut r = BigInt::from(2) * pb.pow(sigma * (sigma - 1)) * (pb.pow(sigma) - BigInt::from(epsilon));
    for i in 1..sigma {
        r *= pb.pow(2 * i) - BigInt::one();
    }
    r.to_biguint().expect("positive order")
}

/// All automorphisms of the group preserving `q`, as the coordinate images
/// of the generators.
pub fn brute_force_orthogonal_group(q: &FiniteQuadraticForm) -> Result<Vec<Vec<Vec<i64>>>> {
    let total = q.order_u64().unwrap_or(u64::MAX);
    if total > 10_000 {
        return Err(Error::TooLarge(total));
    }
    let k = q.len();
    let mut elements: Vec<Vec<i64>> = Vec::new();
    q.for_each_element(|x| elements.push(x.to_vec()));
    let killed_by = |x: &[i64], n: u64| (0..k).all(|i| (x[i] * n as i64).rem_euclid(q.orders[i] as i64) == 0);
    let cands: Vec<Vec<usize>> = (0..k)
        .map(|i| {
            (0..elements.len())
                .filter(|&e| killed_by(&elements[e], q.orders[i]) && q.value(&elements[e]) == q.q[i])
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut assign: Vec<usize> = Vec::new();
    brute_rec(q, &elements, &cands, &mut assign, &mut out);
    Ok(out)
}

fn brute_rec(
    q: &FiniteQuadraticForm,
    elements: &[Vec<i64>],
    cands: &[Vec<usize>],
    assign: &mut Vec<usize>,
    out: &mut Vec<Vec<Vec<i64>>>,
) {
    let d = assign.len();
    let k = q.len();
    if d == k {
        let imgs: Vec<Vec<i64>> = assign.iter().map(|&e| elements[e].clone()).collect();
        // bijective iff the image of every element is distinct
        let mut seen: BTreeMap<Vec<i64>, ()> = BTreeMap::new();
        for x in elements {
            let y: Vec<i64> = (0..k)
                .map(|c| (0..k).map(|i| x[i] * imgs[i][c]).sum::<i64>().rem_euclid(q.orders[c] as i64))
                .collect();
            if seen.insert(y, ()).is_some() {
                return;
            }
        }
        out.push(imgs);
        return;
    }
    for &e in &cands[d] {
        if (0..d).all(|j| q.bilinear(&elements[e], &elements[assign[j]]) == q.b[d][j]) {
            assign.push(e);
            brute_rec(q, elements, cands, assign, out);
            assign.pop();
        }
    }
}

/// The `p`-elementary form `⊕ (Z/p, 2a_i/p)`.
pub fn diagonal_elementary(p: u64, a: &[i64]) -> Result<FiniteQuadraticForm> {
    if p == 2 || !is_prime(p) {
        return Err(Error::UnsupportedParameter(format!("{p} is not an odd prime")));
    }
    let pi = p as i64;
    let k = a.len();
    let q = a.iter().map(|&x| Q64::new(2 * x, pi)).collect();
    let b = (0..k)
        .map(|i| (0..k).map(|j| if i == j { Q64::new(2 * a[i], pi) } else { Q64::zero() }).collect())
        .collect();
    FiniteQuadraticForm::new(vec![p; k], q, b)
}

/// The even 2-elementary blocks `u` (hyperbolic) and `v` (anisotropic).
pub fn two_block(anisotropic: bool) -> FiniteQuadraticForm {
    let half = Q64::new(1, 2);
    let d = if anisotropic { Q64::one() } else { Q64::zero() };
    FiniteQuadraticForm::new(vec![2, 2], vec![d, d], vec![vec![d, half], vec![half, d]]).expect("valid block")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{standard_lattice, StandardLattice};

    #[test]
    fn examples() {
        let k = standard_lattice(StandardLattice::K2(3)).unwrap();
        let q = FiniteQuadraticForm::of_lattice(&k).unwrap();
        assert_eq!(q.milgram_signature().unwrap(), 6);
        let u2 = standard_lattice(StandardLattice::U).unwrap().twist(2).unwrap();
        let qu = FiniteQuadraticForm::of_lattice(&u2).unwrap();
        assert_eq!(qu.milgram_signature().unwrap(), 0);
        assert_eq!(two_block(true).milgram_signature().unwrap(), 4);
        assert!(!forms_isomorphic(&two_block(false), &two_block(true)).unwrap());
        assert!(forms_isomorphic(&qu, &qu.negate()).unwrap());
        assert_eq!(FiniteQuadraticForm::trivial().milgram_signature().unwrap(), 0);
    }

    #[test]
    fn group_orders() {
        assert_eq!(orthogonal_group_order(3, 1, 1), BigUint::from(4u32));
        assert_eq!(orthogonal_group_order(3, 1, -1), BigUint::from(8u32));
        assert_eq!(orthogonal_group_order(5, 1, -1), BigUint::from(12u32));
        assert_eq!(orthogonal_group_order(3, 2, -1), BigUint::from(1440u32));
        let z3 = diagonal_elementary(3, &[2]).unwrap();
        assert_eq!(brute_force_orthogonal_group(&z3).unwrap().len(), 2);
        assert_eq!(brute_force_orthogonal_group(&FiniteQuadraticForm::trivial()).unwrap().len(), 1);
    }

    #[test]
    fn witt_types() {
        // x² − y² is split over F_3
        let split = diagonal_elementary(3, &[1, 2]).unwrap();
        assert_eq!(split.witt_epsilon(3).unwrap(), 1);
        assert_eq!(brute_force_orthogonal_group(&split).unwrap().len(), 4);
        assert_eq!(diagonal_elementary(3, &[1]).unwrap().witt_epsilon(3), Err(Error::OddLength(1)));
    }

    #[test]
    fn rejects_nonelementary() {
        let z9 = FiniteQuadraticForm::new(vec![9], vec![Q64::new(2, 9)], vec![vec![Q64::new(2, 9)]]).unwrap();
        assert!(matches!(z9.invariants(), Err(Error::UnsupportedShape(_))));
    }

    #[test]
    fn json_roundtrip() {
        let q = diagonal_elementary(5, &[1, 2]).unwrap().direct_sum(&two_block(false));
        assert_eq!(FiniteQuadraticForm::from_json(&q.to_json()).unwrap(), q);
    }
}

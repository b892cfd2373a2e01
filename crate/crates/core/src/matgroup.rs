//! Orders of matrix groups over `F_p` by the Schreier–Sims algorithm, with
//! the standard basis vectors as base points.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FpMatrix {
    k: usize,
    p: u64,
    a: Vec<u64>,
}

impl FpMatrix {
    pub fn new(k: usize, p: u64, a: Vec<i64>) -> Result<Self> {
        if a.len() != k * k {
            return Err(Error::Internal("matrix data has the wrong length".into()));
        }
        let pi = p as i64;
        Ok(FpMatrix { k, p, a: a.into_iter().map(|x| x.rem_euclid(pi) as u64).collect() })
    }

    pub fn identity(k: usize, p: u64) -> Self {
        let mut a = vec![0; k * k];
        for i in 0..k {
            a[i * k + i] = 1;
        }
        FpMatrix { k, p, a }
    }

    pub fn is_identity(&self) -> bool {
        (0..self.k).all(|i| (0..self.k).all(|j| self.a[i * self.k + j] == u64::from(i == j)))
    }

    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.a[i * self.k + j]
    }

    pub fn mul(&self, o: &FpMatrix) -> FpMatrix {
        let k = self.k;
        let mut a = vec![0u64; k * k];
        for i in 0..k {
            for l in 0..k {
                let x = self.a[i * k + l];
                if x == 0 {
                    continue;
                }
                for j in 0..k {
                    a[i * k + j] += x * o.a[l * k + j];
                }
            }
            for j in 0..k {
                a[i * k + j] %= self.p;
            }
        }
        FpMatrix { k, p: self.p, a }
    }

    pub fn apply(&self, v: &[u64]) -> Vec<u64> {
        (0..self.k)
            .map(|i| (0..self.k).map(|j| self.a[i * self.k + j] * v[j]).sum::<u64>() % self.p)
            .collect()
    }

    /// Inverse by Gauss–Jordan elimination; `None` if singular.
    pub fn inverse(&self) -> Option<FpMatrix> {
        let (k, p) = (self.k, self.p);
        let mut m = self.a.clone();
        let mut inv = FpMatrix::identity(k, p).a;
        for c in 0..k {
            let r = (c..k).find(|&r| m[r * k + c] != 0)?;
            for j in 0..k {
                m.swap(c * k + j, r * k + j);
                inv.swap(c * k + j, r * k + j);
            }
            let f = pow_mod(m[c * k + c], p - 2, p);
            for j in 0..k {
                m[c * k + j] = m[c * k + j] * f % p;
                inv[c * k + j] = inv[c * k + j] * f % p;
            }
            for r in 0..k {
                if r != c && m[r * k + c] != 0 {
                    let f = m[r * k + c];
                    for j in 0..k {
                        m[r * k + j] = (m[r * k + j] + (p - f) * m[c * k + j]) % p;
                        inv[r * k + j] = (inv[r * k + j] + (p - f) * inv[c * k + j]) % p;
                    }
                }
            }
        }
        Some(FpMatrix { k, p, a: inv })
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = r * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    r
}

struct Level {
    base: Vec<u64>,
    gens: Vec<FpMatrix>,
    /// Orbit point key → index into `points`.
    index: HashMap<u64, usize>,
    /// Orbit points with transversal elements `u` (`u·base = point`) and inverses.
    points: Vec<(Vec<u64>, FpMatrix, FpMatrix)>,
    /// Per generator, the number of orbit points whose Schreier generator was sifted.
    checked: Vec<usize>,
}

fn key(v: &[u64], p: u64) -> u64 {
    v.iter().rev().fold(0u64, |acc, &x| acc * p + x)
}

impl Level {
    fn new(k: usize, p: u64, i: usize) -> Self {
        let mut base = vec![0; k];
        base[i] = 1;
        let mut index = HashMap::new();
        index.insert(key(&base, p), 0);
        let id = FpMatrix::identity(k, p);
        Level { base: base.clone(), gens: vec![], index, points: vec![(base, id.clone(), id)], checked: vec![] }
    }

    /// Extend the orbit after `gens` grew, keeping existing transversals.
    fn extend_orbit(&mut self, p: u64, first_new_gen: usize) {
        let mut queue_start = 0;
        loop {
            let end = self.points.len();
            if queue_start >= end && first_new_gen >= self.gens.len() {
                break;
            }
            let mut added = false;
            for idx in 0..end {
                let range = if idx < queue_start { first_new_gen..self.gens.len() } else { 0..self.gens.len() };
                for g in range {
                    let img = self.gens[g].apply(&self.points[idx].0);
                    let kk = key(&img, p);
                    if !self.index.contains_key(&kk) {
                        let u = self.gens[g].mul(&self.points[idx].1);
                        let uinv = self.points[idx].2.mul(&self.gens[g].inverse().expect("invertible generator"));
                        self.index.insert(kk, self.points.len());
                        self.points.push((img, u, uinv));
                        added = true;
                    }
                }
            }
            queue_start = end;
            if !added {
                break;
            }
        }
    }
}

/// Order of the subgroup of `GL_k(F_p)` generated by `gens`.
pub fn group_order(gens: &[FpMatrix], k: usize, p: u64) -> Result<BigUint> {
    let mut levels: Vec<Level> = (0..k).map(|i| Level::new(k, p, i)).collect();
    for g in gens {
        if g.k != k || g.p != p {
            return Err(Error::Internal("generator shape mismatch".into()));
        }
        if g.inverse().is_none() {
            return Err(Error::Internal("singular generator".into()));
        }
    }
    // seed level 0 with all nontrivial generators, deeper levels with those fixing the base prefix
    for g in gens.iter().filter(|g| !g.is_identity()) {
        add_generator(&mut levels, 0, g.clone(), p);
    }
    let mut i = k as isize - 1;
    while i >= 0 {
        let lvl = i as usize;
        match find_unsifted(&mut levels, lvl, p) {
            Some((residue, j)) => {
                for l in lvl + 1..=j {
                    add_generator(&mut levels, l, residue.clone(), p);
                }
                i = j as isize;
            }
            None => i -= 1,
        }
    }
    Ok(levels.iter().fold(BigUint::one(), |acc, l| acc * BigUint::from(l.points.len())))
}

fn add_generator(levels: &mut [Level], l: usize, g: FpMatrix, p: u64) {
    let lv = &mut levels[l];
    let first = lv.gens.len();
    lv.gens.push(g);
    lv.checked.push(0);
    lv.extend_orbit(p, first);
}

/// Sift `h` through levels `from..`: the residue and the level where it
/// stopped (`k` if it passed every level).
fn strip(levels: &[Level], from: usize, mut h: FpMatrix, p: u64) -> (FpMatrix, usize) {
    for (l, lv) in levels.iter().enumerate().skip(from) {
        let img = h.apply(&lv.base);
        match lv.index.get(&key(&img, p)) {
            Some(&idx) => h = lv.points[idx].2.mul(&h),
            None => return (h, l),
        }
    }
    (h, levels.len())
}

/// First Schreier generator at level `lvl` whose sift through the deeper
/// levels is nontrivial, with the level its residue must join up to.
fn find_unsifted(levels: &mut [Level], lvl: usize, p: u64) -> Option<(FpMatrix, usize)> {
    let k = levels.len();
    loop {
        let ngens = levels[lvl].gens.len();
        let npts = levels[lvl].points.len();
        let mut work = None;
        for g in 0..ngens {
            if levels[lvl].checked[g] < npts {
                work = Some((g, levels[lvl].checked[g]));
                break;
            }
        }
        let (g, idx) = work?;
        levels[lvl].checked[g] += 1;
        let lv = &levels[lvl];
        let x = &lv.gens[g];
        let (pt, u, _) = &lv.points[idx];
        let img = x.apply(pt);
        let &target = lv.index.get(&key(&img, p)).expect("orbit is closed");
        let h = lv.points[target].2.mul(&x.mul(u));
        if h.is_identity() {
            continue;
        }
        let (res, j) = strip(levels, lvl + 1, h, p);
        if j < k || !res.is_identity() {
            let j = j.min(k - 1);
            return Some((res, j));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl2_f3() {
        let a = FpMatrix::new(2, 3, vec![1, 1, 0, 1]).unwrap();
        let b = FpMatrix::new(2, 3, vec![0, 1, 2, 0]).unwrap();
        let c = FpMatrix::new(2, 3, vec![2, 0, 0, 1]).unwrap();
        assert_eq!(group_order(&[a.clone(), b.clone(), c], 2, 3).unwrap(), BigUint::from(48u32));
        assert_eq!(group_order(&[a, b], 2, 3).unwrap(), BigUint::from(24u32));
        assert_eq!(group_order(&[], 3, 5).unwrap(), BigUint::one());
    }

    #[test]
    fn cyclic_and_sign() {
        let minus = FpMatrix::new(2, 5, vec![4, 0, 0, 4]).unwrap();
        assert_eq!(group_order(&[minus], 2, 5).unwrap(), BigUint::from(2u32));
    }
}

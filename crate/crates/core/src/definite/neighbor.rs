//! Kneser `ℓ`-neighbours of even positive-definite lattices.
//!
//! A neighbour is `L_v + Z·v/ℓ` where `L_v = {x : ⟨x,v⟩ ≡ 0 mod ℓ}` and `v`
//! is a lift of an isotropic line of `L/ℓL` adjusted to `⟨v,v⟩ ≡ 0 mod 2ℓ²`.

use std::collections::HashMap;

use super::gram::Gram;
use crate::error::{Error, Result};
use crate::lattice::{is_prime, IntegralLattice};

/// Projective representatives (last nonzero coordinate 1, entries in
/// `[0, ℓ)`) of the lines `[v]` with `⟨v,v⟩ ≡ 0` and `G·v ≢ 0 mod ℓ`,
/// in increasing order of their base-`ℓ` index.
pub fn isotropic_lines(g: &Gram, ell: u64) -> Vec<Vec<i64>> {
    let n = g.dim();
    let l = ell as i64;
    let gm: Vec<i64> = g.data().iter().map(|x| x.rem_euclid(l)).collect();
    let mut out = Vec::new();
    let mut v = vec![0i64; n];
    for lead in (0..n).rev() {
        // v = e_lead + (free coordinates below lead); base-ℓ index grows with lead
        v.iter_mut().for_each(|x| *x = 0);
        v[lead] = 1;
        loop {
            let mut gv_zero = true;
            let mut norm = 0i64;
            for i in 0..n {
                let row = &gm[i * n..(i + 1) * n];
                let s = row.iter().zip(&v).map(|(a, b)| a * b).sum::<i64>() % l;
                if s != 0 {
                    gv_zero = false;
                }
                norm += s * v[i];
            }
            if !gv_zero && norm % l == 0 {
                out.push(v.clone());
            }
            // increment the coordinates before `lead`
            let mut i = 0;
            while i < lead {
                v[i] += 1;
                if v[i] < l {
                    break;
                }
                v[i] = 0;
                i += 1;
            }
            if i == lead {
                break;
            }
        }
    }
    out.sort_by_key(|v| line_key(v, ell));
    out
}

fn line_key(v: &[i64], ell: u64) -> u64 {
    v.iter().rev().fold(0u64, |acc, &x| acc * ell + x as u64)
}

/// Scale so the last nonzero coordinate is 1 (matching `isotropic_lines`).
fn normalize(v: &mut [i64], ell: i64) {
    if let Some(&lead) = v.iter().rev().find(|&&x| x != 0) {
        let inv = inv_mod(lead, ell);
        for x in v.iter_mut() {
            *x = (*x * inv).rem_euclid(ell);
        }
    }
}

fn inv_mod(a: i64, m: i64) -> i64 {
    let (mut r0, mut r1) = (a.rem_euclid(m), m);
    let (mut s0, mut s1) = (1i64, 0i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (s0, s1) = (s1, s0 - q * s1);
    }
    s0.rem_euclid(m)
}

/// Unreduced Gram of the `ℓ`-neighbour along the line of `v`.
pub fn neighbor_gram(g: &Gram, v: &[i64], ell: u64) -> Result<Gram> {
    let n = g.dim();
    let l = ell as i64;
    let w = g.apply(v);
    let k = (0..n).find(|&i| w[i].rem_euclid(l) != 0).ok_or(Error::TrivialFunctional(ell))?;
    let vv: i64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
    if vv.rem_euclid(2 * l) != 0 {
        return Err(Error::InvalidParams("line is not isotropic".into()));
    }
    let t = vv / (2 * l);
    let wk_inv = inv_mod(w[k], l);
    let c = (-t * wk_inv).rem_euclid(l);
    let mut vp = v.to_vec();
    vp[k] += l * c;
    debug_assert_eq!(g.norm(&vp).rem_euclid(2 * l * l), 0);
    // basis of L_v: b_j = e_j − s_j e_k (j ≠ k), b_k = ℓ e_k
    let s: Vec<i64> = (0..n).map(|j| (w[j] * wk_inv).rem_euclid(l)).collect();
    let mut alpha = vec![0i64; n];
    let mut m = vp[k];
    for j in 0..n {
        if j != k {
            alpha[j] = vp[j];
            m += vp[j] * s[j];
        }
    }
    debug_assert_eq!(m.rem_euclid(l), 0);
    alpha[k] = m / l;
    let i = (0..n).find(|&i| alpha[i].rem_euclid(l) != 0).ok_or(Error::Internal("v/ℓ lies in L_v".into()))?;
    let lambda = inv_mod(alpha[i], l);
    let basis_vec = |j: usize| -> Vec<i64> {
        let mut b = vec![0i64; n];
        if j == k {
            b[k] = l;
        } else {
            b[j] = 1;
            b[k] = -s[j];
        }
        b
    };
    // column i becomes U = ℓ·u'' = λ v' − (λ α_i − 1) b_i
    let bi = basis_vec(i);
    let f = (lambda * alpha[i] - 1) / l;
    let mut cols: Vec<Vec<i64>> = (0..n).map(basis_vec).collect();
    cols[i] = (0..n).map(|r| lambda * vp[r] - f * l * bi[r]).collect();
    let mut t_mat = vec![0i64; n * n];
    for (c, col) in cols.iter().enumerate() {
        for r in 0..n {
            t_mat[r * n + c] = col[r];
        }
    }
    let h = g.congruence(&t_mat)?;
    let mut a = h.data().to_vec();
    for r in 0..n {
        for c in 0..n {
            let den = (if r == i { l } else { 1 }) * (if c == i { l } else { 1 });
            let x = a[r * n + c];
            if x % den != 0 {
                return Err(Error::Internal("neighbour Gram is not integral".into()));
            }
            a[r * n + c] = x / den;
        }
    }
    Gram::new(n, a)
}

/// LLL-reduced neighbour Gram.
pub fn reduced_neighbor(g: &Gram, v: &[i64], ell: u64) -> Result<Gram> {
    neighbor_gram(g, v, ell)?.lll()
}

/// Orbit representatives of `lines` under the matrices `gens` acting by
/// `v ↦ X·v mod ℓ`: the smallest line of each orbit (in `lines` order),
/// with the orbit size.
pub fn line_orbit_representatives(lines: &[Vec<i64>], gens: &[Vec<i64>], ell: u64) -> Result<Vec<(usize, usize)>> {
    let count = lines.len();
    if gens.is_empty() {
        return Ok((0..count).map(|i| (i, 1)).collect());
    }
    let n = lines.first().map_or(0, |v| v.len());
    let l = ell as i64;
    let index: HashMap<u64, u32> = lines.iter().enumerate().map(|(i, v)| (line_key(v, ell), i as u32)).collect();
    let mut parent: Vec<u32> = (0..count as u32).collect();
    fn find(parent: &mut [u32], mut x: u32) -> u32 {
        while parent[x as usize] != x {
            let p = parent[parent[x as usize] as usize];
            parent[x as usize] = p;
            x = p;
        }
        x
    }
    let mut img = vec![0i64; n];
    for x in gens {
        let xm: Vec<i64> = x.iter().map(|a| a.rem_euclid(l)).collect();
        for (i, v) in lines.iter().enumerate() {
            for (r, out) in img.iter_mut().enumerate() {
                *out = xm[r * n..(r + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum::<i64>() % l;
            }
            normalize(&mut img, l);
            let j = *index.get(&line_key(&img, ell)).ok_or(Error::NotAnIsometry)?;
            let (a, b) = (find(&mut parent, i as u32), find(&mut parent, j));
            if a != b {
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi as usize] = lo;
            }
        }
    }
    let mut size = vec![0usize; count];
    for i in 0..count as u32 {
        let r = find(&mut parent, i);
        size[r as usize] += 1;
    }
    Ok((0..count).filter(|&i| parent[i] == i as u32).map(|i| (i, size[i])).collect())
}

/// Validates `ell` for the classical neighbour method: odd prime, coprime to
/// `2·det`, rank at least 3.
pub fn check_neighbor_prime(g: &Gram, ell: u64) -> Result<()> {
    if ell == 2 || !is_prime(ell) {
        return Err(Error::BadPrime(ell, "not an odd prime".into()));
    }
    if g.dim() < 3 {
        return Err(Error::BadPrime(ell, "rank below 3".into()));
    }
    let det = g.to_matrix().determinant();
    if (det % num_bigint::BigInt::from(ell)) == num_bigint::BigInt::from(0) {
        return Err(Error::BadPrime(ell, "divides the determinant".into()));
    }
    Ok(())
}

/// All `ℓ`-neighbours of an even positive-definite lattice, one per
/// isotropic line, reduced.
pub fn p_neighbors(l: &IntegralLattice, ell: u64) -> Result<Vec<IntegralLattice>> {
    if !l.is_even() {
        return Err(Error::InvalidParams("lattice must be even".into()));
    }
    let g = Gram::from_matrix(l.gram())?;
    if !g.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    check_neighbor_prime(&g, ell)?;
    isotropic_lines(&g, ell)
        .iter()
        .map(|v| IntegralLattice::from_gram(&reduced_neighbor(&g, v, ell)?))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn a2_sum_neighbours_keep_determinant() {
        let a2 = Gram::new(2, vec![2, -1, -1, 2]).unwrap();
        let mut data = vec![0i64; 16];
        for i in 0..2 {
            for j in 0..2 {
                data[i * 4 + j] = a2.at(i, j);
                data[(i + 2) * 4 + j + 2] = a2.at(i, j);
            }
        }
        let g = Gram::new(4, data).unwrap();
        let lines = isotropic_lines(&g, 5);
        assert!(!lines.is_empty());
        for v in &lines {
            let nb = reduced_neighbor(&g, v, 5).unwrap();
            assert!(nb.is_even());
            assert_eq!(nb.to_matrix().determinant(), 9.into());
        }
    }

    #[test]
    fn bad_primes() {
        let g = Gram::diagonal(&[2, 2, 6]);
        assert!(check_neighbor_prime(&g, 3).is_err());
        assert!(check_neighbor_prime(&g, 9).is_err());
        assert!(check_neighbor_prime(&g, 5).is_ok());
    }
}

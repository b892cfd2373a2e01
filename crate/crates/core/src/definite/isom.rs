//! Automorphism groups and isometry tests of positive-definite lattices by
//! backtracking over short vectors (Plesken–Souvignier).
//!
//! A basis vector `b_i` can only map to a vector of norm `G_ii`, so the search
//! runs over the finite set of vectors of norm at most `max G_ii`. Candidate
//! lists of deeper levels are filtered by inner products with the images
//! already chosen, and automorphisms are collected along a stabilizer chain
//! whose orbit lengths multiply to the group order.

use std::collections::HashMap;

use num_bigint::BigUint;
use num_traits::One;

use super::gram::Gram;
use super::profile::ProbeSet;
use super::short::for_each_short_vector;
use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

/// All nonzero vectors of norm at most `bound`, closed under negation.
#[derive(Clone, Debug)]
pub struct VectorSet {
    n: usize,
    bound: i64,
    coords: Vec<i64>,
    norms: Vec<i64>,
    gv: Vec<i64>,
    index: HashMap<Vec<i64>, u32>,
}

impl VectorSet {
    pub fn new(g: &Gram, bound: i64) -> Result<Self> {
        let n = g.dim();
        let mut coords = Vec::new();
        let mut norms = Vec::new();
        for_each_short_vector(g, bound, |x, nrm| {
            coords.extend_from_slice(x);
            norms.push(nrm);
            coords.extend(x.iter().map(|c| -c));
            norms.push(nrm);
        })?;
        let len = norms.len();
        if len > u32::MAX as usize / 2 {
            return Err(Error::TooLarge(len as u64));
        }
        let mut gv = Vec::with_capacity(coords.len());
        let mut index = HashMap::with_capacity(len);
        for i in 0..len {
            let v = &coords[i * n..(i + 1) * n];
            gv.extend(g.apply(v));
            index.insert(v.to_vec(), i as u32);
        }
        Ok(VectorSet { n, bound, coords, norms, gv, index })
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    pub fn bound(&self) -> i64 {
        self.bound
    }

    pub fn vector(&self, i: u32) -> &[i64] {
        let i = i as usize;
        &self.coords[i * self.n..(i + 1) * self.n]
    }

    pub fn norm(&self, i: u32) -> i64 {
        self.norms[i as usize]
    }

    fn gvec(&self, i: u32) -> &[i64] {
        let i = i as usize;
        &self.gv[i * self.n..(i + 1) * self.n]
    }

    #[inline]
    fn ip(&self, i: u32, j: u32) -> i64 {
        self.vector(i).iter().zip(self.gvec(j)).map(|(a, b)| a * b).sum()
    }

    /// `(v_i, e_k)`.
    #[inline]
    fn ip_basis(&self, i: u32, k: usize) -> i64 {
        self.gv[i as usize * self.n + k]
    }

    pub fn find(&self, v: &[i64]) -> Option<u32> {
        self.index.get(v).copied()
    }

    /// Permutation induced by `x ↦ X·x` (`X` row-major).
    fn permutation(&self, x: &[i64]) -> Result<Vec<u32>> {
        let n = self.n;
        let mut img = vec![0i64; n];
        (0..self.len() as u32)
            .map(|i| {
                let v = self.vector(i);
                for (r, out) in img.iter_mut().enumerate() {
                    *out = (0..n).map(|c| x[r * n + c] * v[c]).sum();
                }
                self.find(&img).ok_or(Error::NotAnIsometry)
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AutomorphismGroup {
    pub dim: usize,
    /// Row-major `n×n` integer matrices `X` with `Xᵀ·G·X = G`.
    pub generators: Vec<Vec<i64>>,
    pub order: BigUint,
    /// Stabilizer-chain orbit lengths, base level first.
    pub orbit_lengths: Vec<u64>,
}

/// Backtracking search for images of the source basis in a vector set.
struct Search<'a> {
    n: usize,
    src: &'a Gram,
    order: Vec<usize>,
    tgt: &'a VectorSet,
    nodes: u64,
}

/// Per source basis vector, the target vectors of the same norm and profile.
fn candidates_by_index(src: &Gram, src_profiles: &[u64], tgt: &VectorSet, tgt_profiles: &[u64]) -> Vec<Vec<u32>> {
    (0..src.dim())
        .map(|i| {
            (0..tgt.len() as u32)
                .filter(|&v| tgt.norm(v) == src.at(i, i) && tgt_profiles[v as usize] == src_profiles[i])
                .collect()
        })
        .collect()
}

fn basis_profiles(g: &Gram, probes: &ProbeSet) -> Vec<u64> {
    (0..g.dim()).map(|i| probes.profile(g.row(i))).collect()
}

fn vector_profiles(vs: &VectorSet, probes: &ProbeSet) -> Vec<u64> {
    (0..vs.len() as u32).map(|v| probes.profile(vs.gvec(v))).collect()
}

impl Search<'_> {

    /// Restrict the candidate lists of levels `> depth` to vectors with the
    /// right inner product against `x` placed at `depth`.
    fn filter(&self, depth: usize, x: u32, cands: &[Vec<u32>]) -> Option<Vec<Vec<u32>>> {
        let mut next = vec![Vec::new(); self.n];
        let sd = self.order[depth];
        for m in depth + 1..self.n {
            let want = self.src.at(self.order[m], sd);
            let list: Vec<u32> = cands[m].iter().copied().filter(|&v| self.tgt.ip(v, x) == want).collect();
            if list.is_empty() {
                return None;
            }
            next[m] = list;
        }
        Some(next)
    }

    fn run(&mut self, depth: usize, cands: &[Vec<u32>], assign: &mut Vec<u32>) -> bool {
        if depth == self.n {
            return true;
        }
        for &x in &cands[depth] {
            self.nodes += 1;
            if let Some(next) = self.filter(depth, x, cands) {
                assign.push(x);
                if self.run(depth + 1, &next, assign) {
                    return true;
                }
                assign.pop();
            }
        }
        false
    }

    /// Matrix sending source basis vector `order[d]` to `assign[d]`.
    fn matrix(&self, assign: &[u32]) -> Vec<i64> {
        let n = self.n;
        let mut x = vec![0i64; n * n];
        for (d, &img) in assign.iter().enumerate() {
            let col = self.order[d];
            for (r, &c) in self.tgt.vector(img).iter().enumerate() {
                x[r * n + col] = c;
            }
        }
        x
    }
}

/// Greedy level order: each step picks the basis vector with the fewest
/// candidates given the inner products with the levels already chosen.
fn fingerprint_order(g: &Gram, vs: &VectorSet, by_index: &[Vec<u32>]) -> Vec<usize> {
    let n = g.dim();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    let mut alive: Vec<Vec<u32>> = by_index.to_vec();
    while chosen.len() < n {
        let next = (0..n)
            .filter(|i| !chosen.contains(i))
            .min_by_key(|&i| (alive[i].len(), i))
            .expect("unchosen index");
        chosen.push(next);
        for (i, list) in alive.iter_mut().enumerate() {
            if !chosen.contains(&i) {
                list.retain(|&v| vs.ip_basis(v, next) == g.at(i, next));
            }
        }
    }
    chosen
}

fn orbit(start: u32, perms: &[Vec<u32>], len: usize) -> Vec<u32> {
    let mut seen = vec![false; len];
    let mut out = vec![start];
    seen[start as usize] = true;
    let mut k = 0;
    while k < out.len() {
        let x = out[k];
        for p in perms {
            let y = p[x as usize];
            if !seen[y as usize] {
                seen[y as usize] = true;
                out.push(y);
            }
        }
        k += 1;
    }
    out
}

/// Automorphism group of a positive-definite Gram matrix in its own basis.
pub fn automorphism_group(g: &Gram) -> Result<AutomorphismGroup> {
    let n = g.dim();
    if n == 0 {
        return Ok(AutomorphismGroup { dim: 0, generators: vec![], order: BigUint::one(), orbit_lengths: vec![] });
    }
    let (red, t) = g.lll_with_transform()?;
    let aut = automorphisms_in_basis(&red)?;
    let tm = IntMatrix::from_i64(n, n, &t);
    let tinv = tm
        .inverse_rational()?
        .to_int()
        .and_then(|m| m.to_i64())
        .ok_or(Error::Internal("reduction transform is not unimodular".into()))?;
    let generators = aut
        .generators
        .iter()
        .map(|x| {
            let y = IntMatrix::from_i64(n, n, x);
            tm.mul(&y)
                .mul(&IntMatrix::from_i64(n, n, &tinv))
                .to_i64()
                .ok_or(Error::EntryTooLarge)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(AutomorphismGroup { generators, ..aut })
}

fn automorphisms_in_basis(g: &Gram) -> Result<AutomorphismGroup> {
    let n = g.dim();
    let vs = VectorSet::new(g, g.max_diagonal())?;
    let probes = ProbeSet::new(g)?;
    let by_index = candidates_by_index(g, &basis_profiles(g, &probes), &vs, &vector_profiles(&vs, &probes));
    let order = fingerprint_order(g, &vs, &by_index);
    let mut search = Search { n, src: g, order: order.clone(), tgt: &vs, nodes: 0 };
    let base: Vec<u32> = order
        .iter()
        .map(|&s| {
            let mut e = vec![0i64; n];
            e[s] = 1;
            vs.find(&e).ok_or(Error::Internal("basis vector missing from vector set".into()))
        })
        .collect::<Result<_>>()?;
    let initial: Vec<Vec<u32>> = order.iter().map(|&i| by_index[i].clone()).collect();
    let mut generators: Vec<Vec<i64>> = Vec::new();
    let mut perms: Vec<Vec<u32>> = Vec::new();
    let mut orbit_lengths = vec![0u64; n];
    for level in (0..n).rev() {
        // fix the base prefix and filter every level accordingly
        let mut cands = initial.clone();
        for d in 0..level {
            cands = match search.filter(d, base[d], &cands) {
                Some(mut next) => {
                    next[..=d].clone_from_slice(&cands[..=d]);
                    next
                }
                None => return Err(Error::Internal("identity does not extend".into())),
            };
        }
        let mut orb = orbit(base[level], &perms, vs.len());
        let mut in_orbit = vec![false; vs.len()];
        for &x in &orb {
            in_orbit[x as usize] = true;
        }
        let mut failed = vec![false; vs.len()];
        for &c in &cands[level].clone() {
            if in_orbit[c as usize] || failed[c as usize] {
                continue;
            }
            let mut assign: Vec<u32> = base[..level].to_vec();
            let found = match search.filter(level, c, &cands) {
                Some(next) => {
                    assign.push(c);
                    search.run(level + 1, &next, &mut assign)
                }
                None => false,
            };
            if found {
                let x = search.matrix(&assign);
                perms.push(vs.permutation(&x)?);
                generators.push(x);
                orb = orbit(base[level], &perms, vs.len());
                for &y in &orb {
                    in_orbit[y as usize] = true;
                }
            } else {
                for y in orbit(c, &perms, vs.len()) {
                    failed[y as usize] = true;
                }
            }
        }
        orbit_lengths[level] = orb.len() as u64;
    }
    let order_val = orbit_lengths.iter().fold(BigUint::one(), |acc, &l| acc * BigUint::from(l));
    Ok(AutomorphismGroup { dim: n, generators, order: order_val, orbit_lengths })
}

/// Target side of repeated isometry tests: vectors of the target up to some
/// bound and, optionally, the orbits of its automorphism group on them.
#[derive(Clone, Debug)]
pub struct IsometryTarget {
    gram: Gram,
    vectors: VectorSet,
    probes: ProbeSet,
    profiles: Vec<u64>,
    orbit_rep: Option<Vec<u32>>,
}

impl IsometryTarget {
    pub fn new(gram: &Gram, bound: i64, aut: Option<&AutomorphismGroup>) -> Result<Self> {
        let vectors = VectorSet::new(gram, bound)?;
        let probes = ProbeSet::new(gram)?;
        let profiles = vector_profiles(&vectors, &probes);
        let orbit_rep = match aut {
            Some(a) => {
                let perms = a
                    .generators
                    .iter()
                    .map(|x| vectors.permutation(x))
                    .collect::<Result<Vec<_>>>()?;
                let mut rep = vec![u32::MAX; vectors.len()];
                for v in 0..vectors.len() as u32 {
                    if rep[v as usize] == u32::MAX {
                        for y in orbit(v, &perms, vectors.len()) {
                            rep[y as usize] = v;
                        }
                    }
                }
                Some(rep)
            }
            None => None,
        };
        Ok(IsometryTarget { gram: gram.clone(), vectors, probes, profiles, orbit_rep })
    }

    pub fn gram(&self) -> &Gram {
        &self.gram
    }

    pub fn bound(&self) -> i64 {
        self.vectors.bound
    }
}

/// An isometry `X` with `Xᵀ·B·X = A` (columns of `X` are the images of the
/// basis of `A`, written in the basis of `B`), or `None`.
pub fn isometry(a: &Gram, b: &Gram) -> Result<Option<Vec<i64>>> {
    let target = IsometryTarget::new(b, a.max_diagonal(), None)?;
    isometry_to(a, &target)
}

pub fn isometry_to(a: &Gram, target: &IsometryTarget) -> Result<Option<Vec<i64>>> {
    let n = a.dim();
    if n != target.gram.dim() {
        return Ok(None);
    }
    if n == 0 {
        return Ok(Some(vec![]));
    }
    if a.max_diagonal() > target.bound() {
        let wider = IsometryTarget::new(&target.gram, a.max_diagonal(), None)?;
        return isometry_to(a, &wider);
    }
    if a.to_matrix().determinant() != target.gram.to_matrix().determinant() {
        return Ok(None);
    }
    let vs = &target.vectors;
    let probes = ProbeSet::new(a)?;
    if probes.len() != target.probes.len() {
        return Ok(None);
    }
    let by_index = candidates_by_index(a, &basis_profiles(a, &probes), vs, &target.profiles);
    let order = proxy_order(a, &by_index);
    let mut cands: Vec<Vec<u32>> = order.iter().map(|&i| by_index[i].clone()).collect();
    let mut search = Search { n, src: a, order, tgt: vs, nodes: 0 };
    if let Some(rep) = &target.orbit_rep {
        cands[0].retain(|&v| rep[v as usize] == v);
    }
    if cands.iter().any(|c| c.is_empty()) {
        return Ok(None);
    }
    let mut assign = Vec::with_capacity(n);
    if search.run(0, &cands, &mut assign) {
        Ok(Some(search.matrix(&assign)))
    } else {
        Ok(None)
    }
}

/// Level order for an isometry search when only the target vectors are at
/// hand: fewest candidates first, then stay connected to chosen levels.
fn proxy_order(a: &Gram, by_index: &[Vec<u32>]) -> Vec<usize> {
    let n = a.dim();
    let counts: Vec<usize> = by_index.iter().map(Vec::len).collect();
    let mut chosen: Vec<usize> = Vec::with_capacity(n);
    while chosen.len() < n {
        let next = (0..n)
            .filter(|i| !chosen.contains(i))
            .min_by_key(|&i| {
                let links = chosen.iter().filter(|&&c| a.at(i, c) != 0).count();
                (usize::MAX - links, counts[i], i)
            })
            .expect("unchosen index");
        chosen.push(next);
    }
    chosen
}

pub fn is_isometric(a: &Gram, b: &Gram) -> Result<bool> {
    Ok(isometry(a, b)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_generators(g: &Gram, aut: &AutomorphismGroup) {
        for x in &aut.generators {
            assert_eq!(&g.congruence(x).unwrap(), g);
        }
    }

    #[test]
    fn small_groups() {
        let a2 = Gram::new(2, vec![2, -1, -1, 2]).unwrap();
        let aut = automorphism_group(&a2).unwrap();
        assert_eq!(aut.order, BigUint::from(12u32));
        check_generators(&a2, &aut);
        let d = Gram::diagonal(&[2, 4]);
        assert_eq!(automorphism_group(&d).unwrap().order, BigUint::from(4u32));
        let z3 = Gram::diagonal(&[1, 1, 1]);
        assert_eq!(automorphism_group(&z3).unwrap().order, BigUint::from(48u32));
    }

    #[test]
    fn isometry_examples() {
        let a2 = Gram::new(2, vec![2, -1, -1, 2]).unwrap();
        let other = Gram::new(2, vec![2, 1, 1, 2]).unwrap();
        let x = isometry(&other, &a2).unwrap().unwrap();
        assert_eq!(a2.congruence(&x).unwrap(), other);
        assert!(is_isometric(&Gram::diagonal(&[2, 6]), &Gram::diagonal(&[6, 2])).unwrap());
        assert!(!is_isometric(&Gram::diagonal(&[2, 8]), &Gram::new(2, vec![4, 2, 2, 5]).unwrap()).unwrap());
    }
}

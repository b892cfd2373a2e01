//! Per-vector invariants for pruning isometry searches: for a vector `x`,
//! the number of short vectors `w` with each value of `(⟨w,w⟩, |⟨x,w⟩|)`.
//! Isometries preserve these counts, so an image of `x` must carry the
//! same profile.

use super::gram::Gram;
use super::short::for_each_short_vector;
use crate::error::Result;

/// Norm bound of the probe vectors `w`.
pub const PROFILE_BOUND: i64 = 4;

/// Inner products above this share one bucket.
const IP_CAP: usize = 31;

/// One representative per `±` pair of vectors of norm at most `PROFILE_BOUND`.
#[derive(Clone, Debug)]
pub struct ProbeSet {
    n: usize,
    coords: Vec<i64>,
    norms: Vec<i64>,
}

impl ProbeSet {
    pub fn new(g: &Gram) -> Result<Self> {
        let mut coords = Vec::new();
        let mut norms = Vec::new();
        for_each_short_vector(g, PROFILE_BOUND, |x, nrm| {
            coords.extend_from_slice(x);
            norms.push(nrm);
        })?;
        Ok(ProbeSet { n: g.dim(), coords, norms })
    }

    pub fn len(&self) -> usize {
        self.norms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.norms.is_empty()
    }

    /// Profile of the vector `x`, given `G·x`.
    pub fn profile(&self, gx: &[i64]) -> u64 {
        let mut counts = [0u32; (PROFILE_BOUND as usize + 1) * (IP_CAP + 1)];
        for (w, &nrm) in self.coords.chunks_exact(self.n).zip(&self.norms) {
            let ip = w.iter().zip(gx).map(|(a, b)| a * b).sum::<i64>().unsigned_abs() as usize;
            counts[nrm as usize * (IP_CAP + 1) + ip.min(IP_CAP)] += 1;
        }
        fnv(counts.iter().enumerate().filter(|(_, &c)| c > 0).flat_map(|(i, &c)| [i as u64, c as u64]))
    }

    /// Isometry invariant of the lattice: the multiset of `(norm, profile)`
    /// over the probe vectors.
    pub fn lattice_profile(&self, g: &Gram) -> u64 {
        let mut all: Vec<(i64, u64)> = self
            .coords
            .chunks_exact(self.n)
            .zip(&self.norms)
            .map(|(w, &nrm)| (nrm, self.profile(&g.apply(w))))
            .collect();
        all.sort_unstable();
        fnv(all.into_iter().flat_map(|(a, b)| [a as u64, b]))
    }
}

/// 64-bit FNV-1a over a word stream.
fn fnv(words: impl Iterator<Item = u64>) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for w in words {
        for byte in w.to_le_bytes() {
            h ^= byte as u64;
            h = h.wrapping_mul(0x0000_0100_0000_01b3);
        }
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profiles_are_basis_independent() {
        let g = Gram::new(3, vec![2, -1, 0, -1, 2, -1, 0, -1, 4]).unwrap();
        let t = vec![1, 1, 0, 0, 1, 2, 0, 0, 1];
        let h = g.congruence(&t).unwrap();
        let (pg, ph) = (ProbeSet::new(&g).unwrap(), ProbeSet::new(&h).unwrap());
        assert_eq!(pg.len(), ph.len());
        assert_eq!(pg.lattice_profile(&g), ph.lattice_profile(&h));
        // column j of t is the image of e_j, so h's basis vector e_j has g's profile of t·e_j
        for j in 0..3 {
            let col: Vec<i64> = (0..3).map(|r| t[r * 3 + j]).collect();
            assert_eq!(ph.profile(h.row(j)), pg.profile(&g.apply(&col)));
        }
    }

    #[test]
    fn profile_separates_roots_from_norm_four() {
        let g = Gram::diagonal(&[2, 4]);
        let p = ProbeSet::new(&g).unwrap();
        assert_ne!(p.profile(g.row(0)), p.profile(g.row(1)));
    }
}

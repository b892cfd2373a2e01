//! Short-vector enumeration (Fincke–Pohst over the `LDLᵀ` cone).
//!
//! Pruning uses floating point with a safety margin; every emitted vector is
//! re-checked with exact integer arithmetic, so the margin only ever admits
//! extra search nodes, never wrong answers.

use serde::{Deserialize, Serialize};

use super::gram::Gram;
use crate::error::Result;

/// One representative per `±` pair of nonzero vectors with `0 < vᵀGv ≤ bound`,
/// sorted lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortVectorList {
    pub bound: i64,
    pub vectors: Vec<(Vec<i64>, i64)>,
}

impl ShortVectorList {
    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Number of `±` pairs of each norm `1..=bound`.
    pub fn norm_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.bound.max(0) as usize + 1];
        for (_, nrm) in &self.vectors {
            counts[*nrm as usize] += 1;
        }
        counts
    }
}

/// Calls `f(x, norm)` for one representative of each `±` pair with
/// `0 < norm ≤ bound`. The representative has its last nonzero coordinate
/// positive.
pub fn for_each_short_vector<F: FnMut(&[i64], i64)>(g: &Gram, bound: i64, mut f: F) -> Result<()> {
    let n = g.dim();
    if n == 0 || bound <= 0 {
        return Ok(());
    }
    let (b, mu) = g.float_ldl()?;
    let slack = 1e-7 * (bound as f64).max(1.0);
    let limit = bound as f64 + slack;
    let mut x = vec![0i64; n];
    let mut partial = vec![0f64; n + 1];
    let mut state = Enum { n, b: &b, mu: &mu, limit, bound, g, x: &mut x, partial: &mut partial };
    state.rec(n - 1, true, &mut f);
    Ok(())
}

struct Enum<'a> {
    n: usize,
    b: &'a [f64],
    mu: &'a [f64],
    limit: f64,
    bound: i64,
    g: &'a Gram,
    x: &'a mut [i64],
    partial: &'a mut [f64],
}

impl Enum<'_> {
    fn rec<F: FnMut(&[i64], i64)>(&mut self, i: usize, zero_above: bool, f: &mut F) {
        let n = self.n;
        let mut c = 0f64;
        for j in i + 1..n {
            c -= self.mu[j * n + i] * self.x[j] as f64;
        }
        let rem = self.limit - self.partial[i + 1];
        if rem < 0.0 {
            return;
        }
        let r = (rem / self.b[i]).sqrt();
        let mut lo = (c - r).ceil() as i64;
        let hi = (c + r).floor() as i64;
        if zero_above {
            lo = lo.max(0);
        }
        for v in lo..=hi {
            let t = v as f64 - c;
            let p = self.partial[i + 1] + self.b[i] * t * t;
            if p > self.limit {
                continue;
            }
            self.x[i] = v;
            self.partial[i] = p;
            let za = zero_above && v == 0;
            if i == 0 {
                if !za {
                    let nrm = self.g.norm(self.x);
                    if nrm > 0 && nrm <= self.bound {
                        f(self.x, nrm);
                    }
                }
            } else {
                self.rec(i - 1, za, f);
            }
        }
        self.x[i] = 0;
    }
}

pub fn short_vectors(g: &Gram, bound: i64) -> Result<ShortVectorList> {
    let mut vectors = Vec::new();
    for_each_short_vector(g, bound, |x, nrm| vectors.push((x.to_vec(), nrm)))?;
    vectors.sort();
    Ok(ShortVectorList { bound, vectors })
}

/// Counts of `±` pairs per norm `0..=bound` (index 0 unused).
pub fn theta_prefix(g: &Gram, bound: i64) -> Result<Vec<u64>> {
    let mut counts = vec![0u64; bound.max(0) as usize + 1];
    for_each_short_vector(g, bound, |_, nrm| counts[nrm as usize] += 1)?;
    Ok(counts)
}

/// Least nonzero norm. Bounds are tried in increasing stages; the smallest
/// diagonal entry of the reduced basis caps the last stage.
pub fn minimum(g: &Gram) -> Result<i64> {
    if g.dim() == 0 {
        return Ok(0);
    }
    let red = g.lll()?;
    let cap = (0..red.dim()).map(|i| red.at(i, i)).min().unwrap_or(0);
    let mut stage = 2.min(cap);
    loop {
        let mut best: Option<i64> = None;
        for_each_short_vector(&red, stage, |_, nrm| best = Some(best.map_or(nrm, |b| b.min(nrm))))?;
        if let Some(m) = best {
            return Ok(m);
        }
        stage = (stage * 2).min(cap);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_examples() {
        let g = Gram::diagonal(&[4, 6]);
        assert!(short_vectors(&g, 2).unwrap().is_empty());
        assert_eq!(minimum(&g).unwrap(), 4);
        let g = Gram::diagonal(&[2, 2]);
        let sv = short_vectors(&g, 2).unwrap();
        assert_eq!(sv.len(), 2);
        assert_eq!(sv.vectors, vec![(vec![0, 1], 2), (vec![1, 0], 2)]);
    }

    #[test]
    fn a2_minimal_vectors() {
        let g = Gram::new(2, vec![2, -1, -1, 2]).unwrap();
        assert_eq!(short_vectors(&g, 2).unwrap().len(), 3);
        assert_eq!(minimum(&g).unwrap(), 2);
    }
}

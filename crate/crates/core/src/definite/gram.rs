//! Machine-word Gram matrices for the hot loops of definite-lattice
//! algorithms. All integer updates are exact and overflow-checked; floating
//! point is only used to steer reduction and enumeration decisions.

use crate::error::{Error, Result};
use crate::matrix::IntMatrix;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Gram {
    n: usize,
    a: Vec<i64>,
}

impl Gram {
    pub fn new(n: usize, a: Vec<i64>) -> Result<Self> {
        if a.len() != n * n {
            return Err(Error::Internal(format!("gram data has {} entries, expected {}", a.len(), n * n)));
        }
        let g = Gram { n, a };
        for i in 0..n {
            for j in 0..i {
                if g.at(i, j) != g.at(j, i) {
                    return Err(Error::NotSymmetric);
                }
            }
        }
        Ok(g)
    }

    pub fn from_matrix(m: &IntMatrix) -> Result<Self> {
        let a = m.to_i64().ok_or(Error::EntryTooLarge)?;
        Gram::new(m.rows(), a)
    }

    pub fn to_matrix(&self) -> IntMatrix {
        IntMatrix::from_i64(self.n, self.n, &self.a)
    }

    pub fn diagonal(d: &[i64]) -> Self {
        let n = d.len();
        let mut a = vec![0; n * n];
        for (i, &x) in d.iter().enumerate() {
            a[i * n + i] = x;
        }
        Gram { n, a }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> i64 {
        self.a[i * self.n + j]
    }

    pub fn data(&self) -> &[i64] {
        &self.a
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.a[i * self.n..(i + 1) * self.n]
    }

    pub fn neg(&self) -> Gram {
        Gram { n: self.n, a: self.a.iter().map(|x| -x).collect() }
    }

    pub fn max_diagonal(&self) -> i64 {
        (0..self.n).map(|i| self.at(i, i)).max().unwrap_or(0)
    }

    pub fn is_even(&self) -> bool {
        (0..self.n).all(|i| self.at(i, i) % 2 == 0)
    }

    /// `G·x`.
    pub fn apply(&self, x: &[i64]) -> Vec<i64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn inner(&self, x: &[i64], y: &[i64]) -> i64 {
        let gy = self.apply(y);
        x.iter().zip(&gy).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self, x: &[i64]) -> i64 {
        self.inner(x, x)
    }

    /// `Tᵀ·G·T` for a column-major-meaning matrix `t` given row-major `n×n`.
    pub fn congruence(&self, t: &[i64]) -> Result<Gram> {
        let n = self.n;
        let mut gt = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for k in 0..n {
                    s += self.a[i * n + k] as i128 * t[k * n + j] as i128;
                }
                gt[i * n + j] = i64::try_from(s).map_err(|_| Error::Overflow("congruence"))?;
            }
        }
        let mut out = vec![0i64; n * n];
        for i in 0..n {
            for j in 0..n {
                let mut s: i128 = 0;
                for k in 0..n {
                    s += t[k * n + i] as i128 * gt[k * n + j] as i128;
                }
                out[i * n + j] = i64::try_from(s).map_err(|_| Error::Overflow("congruence"))?;
            }
        }
        Ok(Gram { n, a: out })
    }

    /// Floating-point `LDLᵀ` data: pivots `b[i]` and unit lower factor
    /// `mu[i*n + j]` (`j < i`). Fails if a pivot is not positive.
    pub fn float_ldl(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.n;
        let mut mu = vec![0f64; n * n];
        let mut b = vec![0f64; n];
        for i in 0..n {
            for j in 0..i {
                let mut s = self.at(i, j) as f64;
                for l in 0..j {
                    s -= mu[j * n + l] * mu[i * n + l] * b[l];
                }
                mu[i * n + j] = s / b[j];
            }
            let mut s = self.at(i, i) as f64;
            for l in 0..i {
                s -= mu[i * n + l] * mu[i * n + l] * b[l];
            }
            if !(s > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            b[i] = s;
            mu[i * n + i] = 1.0;
        }
        Ok((b, mu))
    }

    pub fn is_positive_definite(&self) -> bool {
        // Sylvester's criterion with exact leading minors
        let m = self.to_matrix();
        (1..=self.n).all(|k| {
            let mut sub = IntMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    sub.set(i, j, m.get(i, j).clone());
                }
            }
            sub.determinant() > 0.into()
        })
    }

    /// LLL reduction (δ = 0.99). Returns the reduced Gram and the transform
    /// `T` (row-major, columns are the new basis) with `G' = Tᵀ·G·T`.
    pub fn lll_with_transform(&self) -> Result<(Gram, Vec<i64>)> {
        let n = self.n;
        let mut g = self.clone();
        let mut t = vec![0i64; n * n];
        for i in 0..n {
            t[i * n + i] = 1;
        }
        if n <= 1 {
            if n == 1 && g.a[0] <= 0 {
                return Err(Error::NotPositiveDefinite);
            }
            return Ok((g, t));
        }
        const DELTA: f64 = 0.99;
        let mut mu = vec![0f64; n * n];
        let mut b = vec![0f64; n];
        let gso_row = |g: &Gram, mu: &mut [f64], b: &mut [f64], k: usize| -> Result<()> {
            for j in 0..k {
                let mut s = g.at(k, j) as f64;
                for l in 0..j {
                    s -= mu[j * n + l] * mu[k * n + l] * b[l];
                }
                mu[k * n + j] = s / b[j];
            }
            let mut s = g.at(k, k) as f64;
            for l in 0..k {
                s -= mu[k * n + l] * mu[k * n + l] * b[l];
            }
            if !(s > 0.0) {
                return Err(Error::NotPositiveDefinite);
            }
            b[k] = s;
            Ok(())
        };
        gso_row(&g, &mut mu, &mut b, 0)?;
        let mut k = 1;
        let mut iterations = 0usize;
        while k < n {
            iterations += 1;
            if iterations > 1_000_000 {
                return Err(Error::Internal("LLL did not converge".into()));
            }
            gso_row(&g, &mut mu, &mut b, k)?;
            // size reduction
            let mut changed = false;
            for j in (0..k).rev() {
                let q = mu[k * n + j].round();
                if q != 0.0 {
                    let qi = q as i64;
                    g.sub_multiple(k, j, qi)?;
                    for r in 0..n {
                        let v = t[r * n + j]
                            .checked_mul(qi)
                            .and_then(|x| t[r * n + k].checked_sub(x))
                            .ok_or(Error::Overflow("lll transform"))?;
                        t[r * n + k] = v;
                    }
                    for l in 0..j {
                        mu[k * n + l] -= q * mu[j * n + l];
                    }
                    mu[k * n + j] -= q;
                    changed = true;
                }
            }
            if changed {
                gso_row(&g, &mut mu, &mut b, k)?;
            }
            let m = mu[k * n + k - 1];
            if b[k] < (DELTA - m * m) * b[k - 1] {
                g.swap_basis(k, k - 1);
                for r in 0..n {
                    t.swap(r * n + k, r * n + k - 1);
                }
                k = if k > 1 { k - 1 } else { 1 };
                // rows < k are unchanged; recompute row k-1 (now swapped)
                gso_row(&g, &mut mu, &mut b, k - 1)?;
            } else {
                k += 1;
            }
        }
        Ok((g, t))
    }

    pub fn lll(&self) -> Result<Gram> {
        Ok(self.lll_with_transform()?.0)
    }

    /// Basis vector `k` minus `q` times basis vector `j`.
    fn sub_multiple(&mut self, k: usize, j: usize, q: i64) -> Result<()> {
        let n = self.n;
        for i in 0..n {
            let v = self.a[i * n + j]
                .checked_mul(q)
                .and_then(|x| self.a[i * n + k].checked_sub(x))
                .ok_or(Error::Overflow("lll"))?;
            self.a[i * n + k] = v;
        }
        for i in 0..n {
            let v = self.a[j * n + i]
                .checked_mul(q)
                .and_then(|x| self.a[k * n + i].checked_sub(x))
                .ok_or(Error::Overflow("lll"))?;
            self.a[k * n + i] = v;
        }
        Ok(())
    }

    fn swap_basis(&mut self, a: usize, b: usize) {
        let n = self.n;
        for j in 0..n {
            self.a.swap(a * n + j, b * n + j);
        }
        for i in 0..n {
            self.a.swap(i * n + a, i * n + b);
        }
    }

    /// Permute the basis: new basis vector `i` is old basis vector `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Gram {
        let n = self.n;
        let mut a = vec![0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = self.at(perm[i], perm[j]);
            }
        }
        Gram { n, a }
    }
}

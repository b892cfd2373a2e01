//! Exact integer and rational matrices.
//!
//! Everything here works over arbitrary-precision integers; the hot loops of
//! the definite-lattice algorithms use the machine-word Gram type in
//! [`crate::definite::gram`] instead.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense integer matrix stored row-major.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut entries = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged row");
            entries.extend(row.iter().cloned().map(Into::into));
        }
        IntMatrix { rows: r, cols: c, entries }
    }

    pub fn from_i64(rows: usize, cols: usize, data: &[i64]) -> Self {
        assert_eq!(data.len(), rows * cols);
        IntMatrix { rows, cols, entries: data.iter().map(|&x| BigInt::from(x)).collect() }
    }

    pub fn diagonal<T: Into<BigInt> + Clone>(diag: &[T]) -> Self {
        let n = diag.len();
        let mut m = Self::zeros(n, n);
        for (i, d) in diag.iter().enumerate() {
            m.entries[i * n + i] = d.clone().into();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Entries as `i64`, or `None` if any entry does not fit.
    pub fn to_i64(&self) -> Option<Vec<i64>> {
        self.entries.iter().map(|x| x.to_i64()).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.entries[j * self.rows + i] = self.get(i, j).clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&self, a: &BigInt) -> IntMatrix {
        IntMatrix {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|x| x * a).collect(),
        }
    }

    pub fn neg(&self) -> IntMatrix {
        self.scale(&BigInt::from(-1))
    }

    /// `Tᵀ·self·T`.
    pub fn congruence(&self, t: &IntMatrix) -> IntMatrix {
        t.transpose().mul(self).mul(t)
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn block_diagonal(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
        let mut out = Self::zeros(a.rows + b.rows, a.cols + b.cols);
        for i in 0..a.rows {
            for j in 0..a.cols {
                out.set(i, j, a.get(i, j).clone());
            }
        }
        for i in 0..b.rows {
            for j in 0..b.cols {
                out.set(a.rows + i, a.cols + j, b.get(i, j).clone());
            }
        }
        out
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] -= q * row[src]
    fn row_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let s = self.entries[src * self.cols + j].clone();
            if !s.is_zero() {
                self.entries[dst * self.cols + j] -= q * s;
            }
        }
    }

    /// col[dst] -= q * col[src]
    fn col_axpy(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let s = self.entries[i * self.cols + src].clone();
            if !s.is_zero() {
                self.entries[i * self.cols + dst] -= q * s;
            }
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.entries[i * self.cols + j]);
            self.entries[i * self.cols + j] = v;
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square(), "determinant of non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    pub fn is_unimodular(&self) -> bool {
        self.is_square() && self.determinant().abs().is_one()
    }

    /// Exact inverse over the rationals.
    pub fn inverse_rational(&self) -> Result<RatMatrix> {
        RatMatrix::from_int(self).inverse()
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Dense rational matrix, entries always in lowest terms.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigRational>,
}

impl RatMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RatMatrix { rows, cols, entries: vec![BigRational::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigRational::one());
        }
        m
    }

    pub fn from_int(m: &IntMatrix) -> Self {
        RatMatrix {
            rows: m.rows,
            cols: m.cols,
            entries: m.entries.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigRational {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigRational) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j).clone());
            }
        }
        t
    }

    pub fn mul(&self, other: &RatMatrix) -> RatMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * other.cols + j;
                        out.entries[idx] = &out.entries[idx] + a * b;
                    }
                }
            }
        }
        out
    }

    /// Least common denominator of all entries.
    pub fn common_denominator(&self) -> BigInt {
        self.entries.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()))
    }

    /// `(d, N)` with `self = N / d` and `N` integral.
    pub fn to_scaled_int(&self) -> (BigInt, IntMatrix) {
        let d = self.common_denominator();
        let entries = self
            .entries
            .iter()
            .map(|x| x.numer() * (&d / x.denom()))
            .collect();
        (d, IntMatrix { rows: self.rows, cols: self.cols, entries })
    }

    pub fn to_int(&self) -> Option<IntMatrix> {
        if self.entries.iter().all(|x| x.is_integer()) {
            Some(IntMatrix {
                rows: self.rows,
                cols: self.cols,
                entries: self.entries.iter().map(|x| x.to_integer()).collect(),
            })
        } else {
            None
        }
    }

    /// Gauss–Jordan inverse.
    pub fn inverse(&self) -> Result<RatMatrix> {
        assert_eq!(self.rows, self.cols, "inverse of non-square matrix");
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Self::identity(n);
        for c in 0..n {
            let p = (c..n).find(|&r| !a.get(r, c).is_zero()).ok_or(Error::SingularMatrix)?;
            if p != c {
                for j in 0..n {
                    a.entries.swap(p * n + j, c * n + j);
                    inv.entries.swap(p * n + j, c * n + j);
                }
            }
            let piv = a.get(c, c).clone();
            for j in 0..n {
                let x = a.get(c, j) / &piv;
                a.set(c, j, x);
                let y = inv.get(c, j) / &piv;
                inv.set(c, j, y);
            }
            for r in 0..n {
                if r == c || a.get(r, c).is_zero() {
                    continue;
                }
                let f = a.get(r, c).clone();
                for j in 0..n {
                    let x = a.get(r, j) - &f * a.get(c, j);
                    a.set(r, j, x);
                    let y = inv.get(r, j) - &f * inv.get(c, j);
                    inv.set(r, j, y);
                }
            }
        }
        Ok(inv)
    }
}

/// Result of [`smith_normal_form`]: `s = u·m·v`.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// The diagonal `d_1 | d_2 | …` of `s`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with unimodular transforms, choosing the entry of least
/// absolute value as pivot each round.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = s.get(i, j);
                    if !x.is_zero()
                        && best.is_none_or(|(bi, bj)| x.abs() < s.get(bi, bj).abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                // remaining block is zero
                return finish_smith(s, u, v);
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut clean = true;
            for i in t + 1..r {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = round_div(s.get(i, t), s.get(t, t));
                s.row_axpy(i, t, &q);
                u.row_axpy(i, t, &q);
                if !s.get(i, t).is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..c {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = round_div(s.get(t, j), s.get(t, t));
                s.col_axpy(j, t, &q);
                v.col_axpy(j, t, &q);
                if !s.get(t, j).is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // divisibility condition on the trailing block
            let piv = s.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.get(i, j).is_multiple_of(&piv)));
            match bad {
                Some(i) => {
                    let one = BigInt::from(-1);
                    s.row_axpy(t, i, &one);
                    u.row_axpy(t, i, &one);
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    finish_smith(s, u, v)
}

fn finish_smith(mut s: IntMatrix, mut u: IntMatrix, v: IntMatrix) -> SmithForm {
    for t in 0..s.rows().min(s.cols()) {
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { s, u, v }
}

/// Nearest-integer quotient, which keeps remainders small.
fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    let (q, r) = a.div_mod_floor(b);
    let twice = &r * 2;
    if b.is_positive() {
        if twice > *b {
            q + 1
        } else {
            q
        }
    } else if twice < *b {
        q + 1
    } else {
        q
    }
}

/// Inertia `(n_plus, n_minus)` of a nonsingular symmetric matrix, computed by
/// exact symmetric elimination. A zero diagonal is handled by a 2×2
/// hyperbolic pivot.
pub fn symmetric_signature(g: &IntMatrix) -> Result<(usize, usize)> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let mut a = RatMatrix::from_int(g);
    let mut active: Vec<usize> = (0..g.rows()).collect();
    let (mut plus, mut minus) = (0usize, 0usize);

    while !active.is_empty() {
        // largest-magnitude diagonal pivot
        let diag_pivot = active
            .iter()
            .copied()
            .filter(|&i| !a.get(i, i).is_zero())
            .max_by(|&i, &j| a.get(i, i).abs().cmp(&a.get(j, j).abs()));
        if let Some(k) = diag_pivot {
            let d = a.get(k, k).clone();
            if d.is_positive() {
                plus += 1;
            } else {
                minus += 1;
            }
            active.retain(|&i| i != k);
            for &i in &active {
                let f = a.get(i, k) / &d;
                if f.is_zero() {
                    continue;
                }
                for &j in &active {
                    let x = a.get(i, j) - &f * a.get(k, j);
                    a.set(i, j, x);
                }
            }
            continue;
        }
        // all diagonal entries vanish: find an off-diagonal pair
        let pair = active
            .iter()
            .flat_map(|&i| active.iter().map(move |&j| (i, j)))
            .find(|&(i, j)| i < j && !a.get(i, j).is_zero());
        let Some((k, l)) = pair else {
            return Err(Error::SingularMatrix);
        };
        // the block [[0,b],[b,0]] has inertia (1,1)
        plus += 1;
        minus += 1;
        let b = a.get(k, l).clone();
        active.retain(|&i| i != k && i != l);
        // Schur complement: A' = A - [a_ik a_il] B^{-1} [a_kj a_lj]^T,
        // with B^{-1} = [[0, 1/b], [1/b, 0]]
        let rows: Vec<(usize, BigRational, BigRational)> = active
            .iter()
            .map(|&i| (i, a.get(i, k).clone(), a.get(i, l).clone()))
            .collect();
        for (i, aik, ail) in &rows {
            for (j, ajk, ajl) in &rows {
                let corr = (aik * ajl + ail * ajk) / &b;
                if !corr.is_zero() {
                    let x = a.get(*i, *j) - corr;
                    a.set(*i, *j, x);
                }
            }
        }
    }
    Ok((plus, minus))
}

/// Exact `G = L·D·Lᵀ` for a positive definite `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LdlDecomposition {
    /// Unit lower-triangular factor.
    pub lower: RatMatrix,
    /// Positive pivots, the diagonal of `D`.
    pub pivots: Vec<BigRational>,
}

impl LdlDecomposition {
    pub fn reconstruct(&self) -> RatMatrix {
        let n = self.pivots.len();
        let mut d = RatMatrix::zeros(n, n);
        for (i, p) in self.pivots.iter().enumerate() {
            d.set(i, i, p.clone());
        }
        self.lower.mul(&d).mul(&self.lower.transpose())
    }
}

pub fn rational_cholesky(g: &IntMatrix) -> Result<LdlDecomposition> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = g.rows();
    let a = RatMatrix::from_int(g);
    let mut lower = RatMatrix::identity(n);
    let mut pivots: Vec<BigRational> = Vec::with_capacity(n);
    for j in 0..n {
        let mut d = a.get(j, j).clone();
        for k in 0..j {
            d -= lower.get(j, k) * lower.get(j, k) * &pivots[k];
        }
        if !d.is_positive() {
            return Err(Error::NotPositiveDefinite);
        }
        for i in j + 1..n {
            let mut x = a.get(i, j).clone();
            for k in 0..j {
                x -= lower.get(i, k) * lower.get(j, k) * &pivots[k];
            }
            lower.set(i, j, x / &d);
        }
        pivots.push(d);
    }
    Ok(LdlDecomposition { lower, pivots })
}

/// LLL-reduce a positive definite Gram matrix. Returns `(G', T)` with
/// `G' = Tᵀ·G·T`, checked exactly.
pub fn basis_reduce(g: &IntMatrix) -> Result<(IntMatrix, IntMatrix)> {
    if !g.is_symmetric() {
        return Err(Error::NotSymmetric);
    }
    let n = g.rows();
    let data = g.to_i64().ok_or(Error::EntryTooLarge)?;
    let gram = crate::definite::gram::Gram::new(n, data)?;
    let (reduced, t) = gram.lll_with_transform()?;
    let g2 = IntMatrix::from_i64(n, n, reduced.data());
    let t = IntMatrix::from_i64(n, n, &t);
    // exact certificate
    debug_assert!(t.is_unimodular());
    if g.congruence(&t) != g2 {
        return Err(Error::Internal("basis reduction certificate failed".into()));
    }
    Ok((g2, t))
}

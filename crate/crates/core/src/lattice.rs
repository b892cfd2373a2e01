//! Integral lattices given by Gram matrices, their discriminant groups and a
//! few constructions (twists, orthogonal sums, index-p sublattices).

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::definite::Gram;
use crate::error::{Error, Result};
use crate::matrix::{smith_normal_form, symmetric_signature, IntMatrix, RatMatrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntegralLattice {
    gram: IntMatrix,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StandardLattice {
    U,
    E8,
    A2,
    A2Neg,
    D4,
    K2(u64),
}

impl std::str::FromStr for StandardLattice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "U" => Ok(StandardLattice::U),
            "E8" => Ok(StandardLattice::E8),
            "A2" => Ok(StandardLattice::A2),
            "A2neg" => Ok(StandardLattice::A2Neg),
            "D4" => Ok(StandardLattice::D4),
            _ => {
                let p = s
                    .strip_prefix("K2(")
                    .and_then(|r| r.strip_suffix(')'))
                    .and_then(|r| r.parse::<u64>().ok())
                    .ok_or_else(|| Error::UnsupportedParameter(format!("unknown lattice {s}")))?;
                Ok(StandardLattice::K2(p))
            }
        }
    }
}

/// Negative-definite E8 (Cartan matrix of the Dynkin diagram, negated).
const E8_CARTAN: [[i64; 8]; 8] = [
    [2, -1, 0, 0, 0, 0, 0, 0],
    [-1, 2, -1, 0, 0, 0, 0, 0],
    [0, -1, 2, -1, 0, 0, 0, -1],
    [0, 0, -1, 2, -1, 0, 0, 0],
    [0, 0, 0, -1, 2, -1, 0, 0],
    [0, 0, 0, 0, -1, 2, -1, 0],
    [0, 0, 0, 0, 0, -1, 2, 0],
    [0, 0, -1, 0, 0, 0, 0, 2],
];

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

pub fn standard_lattice(name: StandardLattice) -> Result<IntegralLattice> {
    let rows: Vec<Vec<i64>> = match name {
        StandardLattice::U => vec![vec![0, 1], vec![1, 0]],
        StandardLattice::E8 => E8_CARTAN.iter().map(|r| r.iter().map(|x| -x).collect()).collect(),
        StandardLattice::A2 => vec![vec![2, -1], vec![-1, 2]],
        StandardLattice::A2Neg => vec![vec![-2, 1], vec![1, -2]],
        StandardLattice::D4 => vec![vec![2, -1, 0, 0], vec![-1, 2, -1, -1], vec![0, -1, 2, 0], vec![0, -1, 0, 2]],
        StandardLattice::K2(p) => {
            if !is_prime(p) || p % 4 != 3 {
                return Err(Error::UnsupportedParameter(format!(
                    "K2({p}) needs a prime p = 3 mod 4; no even binary lattice of determinant {p} exists otherwise"
                )));
            }
            let c = (p as i64 + 1) / 2;
            vec![vec![-2, 1], vec![1, -c]]
        }
    };
    IntegralLattice::new(IntMatrix::from_rows(&rows))
}

impl IntegralLattice {
    pub fn new(gram: IntMatrix) -> Result<Self> {
        if !gram.is_square() || !gram.is_symmetric() {
            return Err(Error::NotSymmetric);
        }
        if gram.rows() > 0 && gram.determinant().is_zero() {
            return Err(Error::SingularMatrix);
        }
        Ok(IntegralLattice { gram })
    }

    pub fn from_i64(n: usize, data: &[i64]) -> Result<Self> {
        IntegralLattice::new(IntMatrix::from_i64(n, n, data))
    }

    pub fn from_gram(g: &Gram) -> Result<Self> {
        IntegralLattice::new(g.to_matrix())
    }

    pub fn gram(&self) -> &IntMatrix {
        &self.gram
    }

    pub fn rank(&self) -> usize {
        self.gram.rows()
    }

    pub fn determinant(&self) -> BigInt {
        self.gram.determinant()
    }

    pub fn signature(&self) -> (usize, usize) {
        if self.rank() == 0 {
            return (0, 0);
        }
        symmetric_signature(&self.gram).expect("nondegenerate by construction")
    }

    pub fn is_even(&self) -> bool {
        (0..self.rank()).all(|i| self.gram.get(i, i).is_even())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.signature().1 == 0
    }

    pub fn is_negative_definite(&self) -> bool {
        self.signature().0 == 0
    }

    /// Machine-word Gram of the positive-definite lattice `±L`.
    pub fn positive_gram(&self) -> Result<Gram> {
        let (pos, neg) = self.signature();
        if neg == 0 {
            Gram::from_matrix(&self.gram)
        } else if pos == 0 {
            Gram::from_matrix(&self.gram.neg())
        } else {
            Err(Error::NotDefinite)
        }
    }

    pub fn twist(&self, a: i64) -> Result<IntegralLattice> {
        if a == 0 {
            return Err(Error::InvalidParams("twist by zero".into()));
        }
        Ok(IntegralLattice { gram: self.gram.scale(&BigInt::from(a)) })
    }

    pub fn direct_sum(&self, other: &IntegralLattice) -> IntegralLattice {
        IntegralLattice { gram: IntMatrix::block_diagonal(&self.gram, &other.gram) }
    }

    pub fn direct_sum_all(parts: &[IntegralLattice]) -> IntegralLattice {
        parts
            .iter()
            .fold(IntegralLattice { gram: IntMatrix::zeros(0, 0) }, |acc, l| acc.direct_sum(l))
    }

    /// Gram of the basis given by the columns of `b`.
    pub fn sublattice(&self, b: &IntMatrix) -> Result<IntegralLattice> {
        IntegralLattice::new(self.gram.congruence(b))
    }

    pub fn discriminant_group(&self) -> DiscriminantData {
        DiscriminantData::of(self)
    }

    /// `⟨x, y⟩` for rational coordinate vectors.
    pub fn inner_rational(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        let n = self.rank();
        let mut s = BigRational::zero();
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            let mut t = BigRational::zero();
            for j in 0..n {
                if !y[j].is_zero() {
                    t += &y[j] * BigRational::from_integer(self.gram.get(i, j).clone());
                }
            }
            s += &x[i] * t;
        }
        s
    }

    pub fn to_json(&self) -> String {
        let rows: Vec<Vec<String>> = self.gram.to_rows().iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect();
        let body: Vec<String> = rows.iter().map(|r| format!("[{}]", r.join(", "))).collect();
        format!("{{\"rank\": {}, \"gram\": [{}]}}\n", self.rank(), body.join(", "))
    }

    /// Accepts the JSON exchange format or whitespace-delimited text
    /// (`n` followed by `n²` integers; brackets and commas are ignored).
    pub fn parse(text: &str) -> Result<IntegralLattice> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            #[derive(Deserialize)]
            struct Doc {
                rank: usize,
                gram: Vec<Vec<serde_json::Value>>,
            }
            let doc: Doc = serde_json::from_str(trimmed).map_err(|e| Error::Parse(e.to_string()))?;
            if doc.gram.len() != doc.rank || doc.gram.iter().any(|r| r.len() != doc.rank) {
                return Err(Error::Parse("gram shape does not match rank".into()));
            }
            let rows = doc
                .gram
                .iter()
                .map(|r| r.iter().map(json_int).collect::<Result<Vec<BigInt>>>())
                .collect::<Result<Vec<_>>>()?;
            return IntegralLattice::new(IntMatrix::from_rows(&rows));
        }
        let mut toks = trimmed
            .split(|c: char| c.is_whitespace() || c == ',' || c == '[' || c == ']')
            .filter(|t| !t.is_empty());
        let n: usize = toks
            .next()
            .ok_or(Error::Parse("empty input".into()))?
            .parse()
            .map_err(|_| Error::Parse("rank is not an integer".into()))?;
        let vals = toks
            .map(|t| t.parse::<BigInt>().map_err(|_| Error::Parse(format!("bad entry {t}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != n * n {
            return Err(Error::Parse(format!("expected {} entries, found {}", n * n, vals.len())));
        }
        let rows: Vec<Vec<BigInt>> = vals.chunks(n.max(1)).map(|c| c.to_vec()).collect();
        IntegralLattice::new(IntMatrix::from_rows(&rows[..n]))
    }
}

fn json_int(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n.to_string().parse().map_err(|_| Error::Parse(format!("non-integer {n}"))),
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("non-integer {s}"))),
        _ => Err(Error::Parse("gram entries must be integers".into())),
    }
}

/// `L^∨/L` on Smith-adapted generators `g_i = V·e_i / d_i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiscriminantData {
    pub elementary_divisors: Vec<BigInt>,
    pub generator_coords: Vec<Vec<BigRational>>,
    /// `q(g_i)` in `[0, 2)`.
    pub q_values: Vec<BigRational>,
    /// `b(g_i, g_j)` in `[0, 1)`.
    pub b_values: Vec<Vec<BigRational>>,
    /// Row `i` of `U·G` for each generator: the coordinate of `x ∈ L^∨` on
    /// `g_i` is this row applied to `x`, reduced mod `d_i`.
    pub coord_rows: Vec<Vec<BigInt>>,
}

pub fn mod_rational(x: &BigRational, m: i64) -> BigRational {
    let m = BigRational::from_integer(BigInt::from(m));
    let q = (x / &m).floor();
    x - q * m
}

impl DiscriminantData {
    fn of(l: &IntegralLattice) -> Self {
        let n = l.rank();
        let snf = smith_normal_form(&l.gram);
        let diag = snf.diagonal();
        let ug = snf.u.mul(&l.gram);
        let mut elementary_divisors = Vec::new();
        let mut generator_coords = Vec::new();
        let mut coord_rows = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            let d = d.abs();
            if d <= BigInt::one() {
                continue;
            }
            let coords: Vec<BigRational> =
                (0..n).map(|r| BigRational::new(snf.v.get(r, i).clone(), d.clone())).collect();
            elementary_divisors.push(d);
            generator_coords.push(coords);
            coord_rows.push(ug.row(i).to_vec());
        }
        let k = generator_coords.len();
        let q_values = (0..k)
            .map(|i| mod_rational(&l.inner_rational(&generator_coords[i], &generator_coords[i]), 2))
            .collect();
        let b_values = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| mod_rational(&l.inner_rational(&generator_coords[i], &generator_coords[j]), 1))
                    .collect()
            })
            .collect();
        DiscriminantData { elementary_divisors, generator_coords, q_values, b_values, coord_rows }
    }

    pub fn order(&self) -> BigInt {
        self.elementary_divisors.iter().fold(BigInt::one(), |a, d| a * d)
    }

    /// Coordinates of a dual vector on the generators.
    pub fn coordinates(&self, x: &[BigRational]) -> Result<Vec<BigInt>> {
        self.coord_rows
            .iter()
            .zip(&self.elementary_divisors)
            .map(|(row, d)| {
                let s: BigRational = row
                    .iter()
                    .zip(x)
                    .map(|(a, b)| BigRational::from_integer(a.clone()) * b)
                    .fold(BigRational::zero(), |acc, t| acc + t);
                if !s.is_integer() {
                    return Err(Error::Internal("vector is not in the dual lattice".into()));
                }
                Ok(s.to_integer().mod_floor(d))
            })
            .collect()
    }
}

/// Kernel of `x ↦ ⟨x, v⟩ mod p` together with the embedding (basis of the
/// kernel as columns in the basis of `L`).
pub fn index_p_sublattice_with_basis(l: &IntegralLattice, v: &[BigInt], p: u64) -> Result<(IntegralLattice, IntMatrix)> {
    let n = l.rank();
    let pb = BigInt::from(p);
    let w: Vec<BigInt> = (0..n)
        .map(|i| {
            let s: BigInt = (0..n).map(|j| l.gram.get(i, j) * &v[j]).sum();
            s.mod_floor(&pb)
        })
        .collect();
    let k = w.iter().position(|x| !x.is_zero()).ok_or(Error::TrivialFunctional(p))?;
    let inv = mod_inverse(&w[k], &pb).ok_or(Error::Internal("non-invertible pivot".into()))?;
    let mut b = IntMatrix::zeros(n, n);
    for j in 0..n {
        if j == k {
            b.set(k, k, pb.clone());
        } else {
            b.set(j, j, BigInt::one());
            let s = (&w[j] * &inv).mod_floor(&pb);
            b.set(k, j, -s);
        }
    }
    Ok((l.sublattice(&b)?, b))
}

pub fn index_p_sublattice(l: &IntegralLattice, v: &[BigInt], p: u64) -> Result<IntegralLattice> {
    Ok(index_p_sublattice_with_basis(l, v, p)?.0)
}

pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let g = a.extended_gcd(m);
    if g.gcd.is_one() {
        Some(g.x.mod_floor(m))
    } else if (-&g.gcd).is_one() {
        Some((-g.x).mod_floor(m))
    } else {
        None
    }
}

/// A basis (as columns, possibly rational) of the lattice generated by the
/// given rational vectors.
pub fn lattice_basis(gens: &[Vec<BigRational>], n: usize) -> Result<RatMatrix> {
    let den = gens
        .iter()
        .flat_map(|g| g.iter().map(|x| x.denom().clone()))
        .fold(BigInt::one(), |a, d| a.lcm(&d));
    let mut a = IntMatrix::zeros(n, gens.len());
    for (c, g) in gens.iter().enumerate() {
        for r in 0..n {
            a.set(r, c, (&g[r] * BigRational::from_integer(den.clone())).to_integer());
        }
    }
    let snf = smith_normal_form(&a);
    let uinv = RatMatrix::from_int(&snf.u).inverse()?;
    let diag = snf.diagonal();
    let rank = diag.iter().filter(|d| !d.is_zero()).count();
    if rank != n {
        return Err(Error::SingularMatrix);
    }
    let mut basis = RatMatrix::zeros(n, n);
    let scale = BigRational::from_integer(den);
    for c in 0..n {
        let d = BigRational::from_integer(diag[c].clone());
        for r in 0..n {
            basis.set(r, c, uinv.get(r, c) * &d / &scale);
        }
    }
    Ok(basis)
}

/// For a lattice `M` whose discriminant group is `(Z/2)^a ⊕ (Z/p)^b`, the
/// lattice `(M + 2M^∨)(p)`: the overlattice carrying the `p`-part, rescaled
/// by `p`. Its discriminant group is `(Z/2)^a ⊕ (Z/p)^(rank−b)`. Returns the
/// new lattice and its basis (columns) in rational coordinates of `M`.
pub fn p_dual_rescaled(m: &IntegralLattice, p: u64) -> Result<(IntegralLattice, RatMatrix)> {
    let n = m.rank();
    let disc = m.discriminant_group();
    let two = BigRational::from_integer(BigInt::from(2));
    let mut gens: Vec<Vec<BigRational>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for g in &disc.generator_coords {
        gens.push(g.iter().map(|x| x * &two).collect());
    }
    let basis = lattice_basis(&gens, n)?;
    let gram_q = basis.transpose().mul(&RatMatrix::from_int(&m.gram)).mul(&basis);
    let pr = BigRational::from_integer(BigInt::from(p));
    let mut g = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let x = gram_q.get(i, j) * &pr;
            if !x.is_integer() {
                return Err(Error::UnsupportedShape("p-part is not p-elementary".into()));
            }
            g.set(i, j, x.to_integer());
        }
    }
    Ok((IntegralLattice::new(g)?, basis))
}

/// Valuation of `x` at `p`.
pub fn valuation(x: &BigInt, p: u64) -> u32 {
    let pb = BigInt::from(p);
    let mut x = x.abs();
    let mut v = 0;
    while !x.is_zero() && (&x % &pb).is_zero() {
        x /= &pb;
        v += 1;
    }
    v
}

pub fn to_u64(x: &BigInt) -> Option<u64> {
    x.to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(rows: &[Vec<i64>]) -> IntegralLattice {
        IntegralLattice::new(IntMatrix::from_rows(rows)).unwrap()
    }

    #[test]
    fn standard_examples() {
        let u = standard_lattice(StandardLattice::U).unwrap();
        assert_eq!(u.determinant(), BigInt::from(-1));
        assert_eq!(u.signature(), (1, 1));
        assert!(u.is_even());
        let e8 = standard_lattice(StandardLattice::E8).unwrap();
        assert_eq!(e8.determinant(), BigInt::one());
        assert_eq!(e8.signature(), (0, 8));
        let k = standard_lattice(StandardLattice::K2(3)).unwrap();
        assert_eq!(k.gram(), &IntMatrix::from_rows(&[vec![-2, 1], vec![1, -2]]));
        assert_eq!(k.determinant(), BigInt::from(3));
        assert!(standard_lattice(StandardLattice::K2(5)).is_err());
        assert_eq!(standard_lattice(StandardLattice::D4).unwrap().determinant(), BigInt::from(4));
    }

    #[test]
    fn discriminant_examples() {
        let u2 = standard_lattice(StandardLattice::U).unwrap().twist(2).unwrap();
        let d = u2.discriminant_group();
        assert_eq!(d.elementary_divisors, vec![BigInt::from(2), BigInt::from(2)]);
        let k = standard_lattice(StandardLattice::K2(3)).unwrap();
        let d = k.discriminant_group();
        assert_eq!(d.elementary_divisors, vec![BigInt::from(3)]);
        assert_eq!(d.q_values[0], BigRational::new(4.into(), 3.into()));
        assert!(standard_lattice(StandardLattice::E8).unwrap().discriminant_group().elementary_divisors.is_empty());
    }

    #[test]
    fn index_p_examples() {
        let u = standard_lattice(StandardLattice::U).unwrap();
        let v = vec![BigInt::one(), BigInt::zero()];
        let (sub, b) = index_p_sublattice_with_basis(&u, &v, 3).unwrap();
        assert_eq!(sub.determinant(), BigInt::from(-9));
        assert_eq!(u.gram().congruence(&b), *sub.gram());
        let v3 = vec![BigInt::from(3), BigInt::zero()];
        assert_eq!(index_p_sublattice(&u, &v3, 3), Err(Error::TrivialFunctional(3)));
    }

    #[test]
    fn parse_formats() {
        let l = lat(&[vec![2, 1], vec![1, 2]]);
        assert_eq!(IntegralLattice::parse(&l.to_json()).unwrap(), l);
        assert_eq!(IntegralLattice::parse("2\n2 1\n1 2\n").unwrap(), l);
        assert!(IntegralLattice::parse("2 1 2 3").is_err());
    }

    #[test]
    fn p_dual_of_k2_pair() {
        // K2(3)(2) ⊕ K2(3)(2) has disc (Z/2)^4 ⊕ (Z/3)^2; the p-dual drops the 3-part
        let k = standard_lattice(StandardLattice::K2(3)).unwrap().twist(2).unwrap();
        let m = k.direct_sum(&k);
        let (d, _) = p_dual_rescaled(&m, 3).unwrap();
        assert_eq!(d.determinant().abs(), BigInt::from(16 * 9));
        assert!(d.is_even());
    }
}

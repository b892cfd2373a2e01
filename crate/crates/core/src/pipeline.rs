//! Supersingular K3 lattices, the Enriques lattice `Γ(2)`, the complement
//! genus `(0, 12, δ)` and the resulting lower and upper bounds for the
//! number of Enriques quotients.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::definite::genus::{enumerate_genus, GenusClass, GenusClassCatalog, GenusStrategy};
use crate::definite::Gram;
use crate::error::{Error, Result};
use crate::form::{form_invariants, forms_isomorphic, legendre, orthogonal_group_order, FiniteQuadraticForm};
use crate::lattice::{
    index_p_sublattice, is_prime, p_dual_rescaled, standard_lattice, IntegralLattice, StandardLattice,
};
use crate::matgroup::{group_order, FpMatrix};
use crate::matrix::{IntMatrix, RatMatrix};

/// Rank of the complement of `Γ(2)` in the Néron–Severi lattice.
pub const COMPLEMENT_RANK: usize = 12;

/// `image_order` refuses orbit spaces `(Z/p)^{2σ}` larger than this.
pub const ORBIT_SPACE_LIMIT: u64 = 1_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SupersingularParams {
    pub p: u64,
    pub sigma: u32,
}

impl SupersingularParams {
    pub fn new(p: u64, sigma: u32) -> Result<Self> {
        if p < 3 || !is_prime(p) {
            return Err(Error::InvalidParams(format!("p = {p} is not an odd prime")));
        }
        if !(1..=10).contains(&sigma) {
            return Err(Error::InvalidParams(format!("sigma = {sigma} is outside 1..=10")));
        }
        Ok(SupersingularParams { p, sigma })
    }

    pub fn to_json(&self) -> Value {
        json!({"p": self.p, "sigma": self.sigma})
    }

    fn with_sigma(&self, sigma: u32) -> SupersingularParams {
        SupersingularParams { p: self.p, sigma }
    }
}

fn std_lat(name: StandardLattice) -> IntegralLattice {
    standard_lattice(name).expect("standard lattice")
}

/// Small integer vectors in a fixed order: unit vectors, then `e_i ± e_j`,
/// then `e_i ± 2e_j`, then three-term `±1` combinations.
fn sweep_vectors(n: usize) -> impl Iterator<Item = Vec<BigInt>> {
    let unit = (0..n).map(move |i| {
        let mut v = vec![BigInt::zero(); n];
        v[i] = BigInt::one();
        v
    });
    let pairs = [(1, 1), (1, -1), (1, 2), (1, -2), (2, 1), (2, -1)].into_iter().flat_map(move |(a, b)| {
        (0..n).flat_map(move |i| {
            (i + 1..n).map(move |j| {
                let mut v = vec![BigInt::zero(); n];
                v[i] = BigInt::from(a);
                v[j] = BigInt::from(b);
                v
            })
        })
    });
    let triples = (0..n).flat_map(move |i| {
        (i + 1..n).flat_map(move |j| {
            (j + 1..n).flat_map(move |k| {
                [(1, 1), (1, -1), (-1, 1), (-1, -1)].into_iter().map(move |(b, c)| {
                    let mut v = vec![BigInt::zero(); n];
                    v[i] = BigInt::one();
                    v[j] = BigInt::from(b);
                    v[k] = BigInt::from(c);
                    v
                })
            })
        })
    });
    unit.chain(pairs).chain(triples)
}

/// One step of the Artin-invariant descent: the first index-`p` sublattice
/// `{x : ⟨x,v⟩ ≡ 0 mod p}` passing `accept`, over `v` with `⟨v,v⟩ ≡ 0` and
/// `G·v ≢ 0 mod p`. Each such `v` gives a `p`-elementary sublattice whose
/// `p`-length grows by 2. Candidates are sweep vectors `u` themselves when
/// isotropic, else the roots `x·u + e_j` of the quadratic `Q(x·u + e_j) ≡ 0`.
fn descend(l: &IntegralLattice, p: u64, accept: impl Fn(&IntegralLattice) -> Result<bool>, budget: usize) -> Result<IntegralLattice> {
    let n = l.rank();
    let pi = p as i128;
    let gm: Vec<i128> = (0..n * n)
        .map(|k| {
            let x = l.gram().get(k / n, k % n) % BigInt::from(p);
            x.to_i128().expect("residue").rem_euclid(pi)
        })
        .collect();
    let gv = |v: &[i128]| -> Vec<i128> {
        (0..n).map(|i| (0..n).map(|j| gm[i * n + j] * v[j]).sum::<i128>().rem_euclid(pi)).collect()
    };
    let ip = |a: &[i128], gb: &[i128]| a.iter().zip(gb).map(|(x, y)| x * y).sum::<i128>().rem_euclid(pi);
    let tried = std::cell::Cell::new(0usize);
    let attempt = |v: Vec<i128>| -> Result<Option<IntegralLattice>> {
        let w = gv(&v);
        if ip(&v, &w) != 0 || w.iter().all(|&x| x == 0) {
            return Ok(None);
        }
        tried.set(tried.get() + 1);
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        let sub = index_p_sublattice(l, &big, p)?;
        Ok(if accept(&sub)? { Some(sub) } else { None })
    };
    for u in sweep_vectors(n).take(budget) {
        let u: Vec<i128> = u.iter().map(|x| x.to_i128().expect("small").rem_euclid(pi)).collect();
        if let Some(sub) = attempt(u.clone())? {
            return Ok(sub);
        }
        let gu = gv(&u);
        let a = ip(&u, &gu);
        if a == 0 {
            continue;
        }
        for j in 0..n {
            let b = gu[j];
            let c = gm[j * n + j];
            // a x² + 2 b x + c ≡ 0
            for x in 0..pi {
                if (a * x % pi * x + 2 * b * x + c).rem_euclid(pi) != 0 {
                    continue;
                }
                let mut v: Vec<i128> = u.iter().map(|&ui| ui * x % pi).collect();
                v[j] = (v[j] + 1) % pi;
                if let Some(sub) = attempt(v)? {
                    return Ok(sub);
                }
            }
        }
        if tried.get() >= budget {
            break;
        }
    }
    Err(Error::ConstructionFailed(format!("no index-{p} sublattice among {} isotropic candidates", tried.get())))
}

fn elementary_divisors_u64(l: &IntegralLattice) -> Vec<u64> {
    l.discriminant_group()
        .elementary_divisors
        .iter()
        .map(|d| d.to_u64().unwrap_or(u64::MAX))
        .collect()
}

/// Checks the defining properties of a supersingular K3 lattice.
pub fn verify_ns(l: &IntegralLattice, params: &SupersingularParams) -> Result<()> {
    let fail = |m: &str| Err(Error::ConstructionFailed(format!("NS lattice check: {m}")));
    if l.rank() != 22 {
        return fail("rank is not 22");
    }
    if !l.is_even() {
        return fail("not even");
    }
    if l.signature() != (1, 21) {
        return fail("signature is not (1,21)");
    }
    if elementary_divisors_u64(l) != vec![params.p; 2 * params.sigma as usize] {
        return fail("discriminant group is not (Z/p)^{2σ}");
    }
    let q = FiniteQuadraticForm::of_lattice(l)?;
    if q.milgram_signature()? != 4 {
        return fail("Milgram signature is not 4 mod 8");
    }
    Ok(())
}

/// Bounded search for a reduced even positive-definite rank-4 Gram matrix
/// (diagonal `2a_i`, `a_1 ≤ … ≤ a_4 ≤ amax`, `|b_ij| ≤ min(a_i, a_j)`)
/// with the given nontrivial elementary divisors passing `accept`.
fn search_rank4(divisors: &[u64], amax: i64, accept: &dyn Fn(&IntegralLattice) -> Result<bool>) -> Result<Option<IntegralLattice>> {
    let det: u64 = divisors.iter().product();
    for a4 in 1..=amax {
        for a3 in 1..=a4 {
            for a2 in 1..=a3 {
                for a1 in 1..=a2 {
                    let a = [a1, a2, a3, a4];
                    // a4 is the largest: only visit tuples whose maximum is a4
                    let mut g = [[0i64; 4]; 4];
                    for i in 0..4 {
                        g[i][i] = 2 * a[i];
                    }
                    if let Some(l) = search_offdiag(&mut g, &a, 0, det, divisors, accept)? {
                        return Ok(Some(l));
                    }
                }
            }
        }
    }
    Ok(None)
}

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (1, 2), (0, 3), (1, 3), (2, 3)];

fn leading_minor(g: &[[i64; 4]; 4], k: usize) -> i64 {
    let rows: Vec<Vec<i64>> = (0..k).map(|i| g[i][..k].to_vec()).collect();
    IntMatrix::from_rows(&rows).determinant().to_i64().unwrap_or(i64::MAX)
}

fn search_offdiag(
    g: &mut [[i64; 4]; 4],
    a: &[i64; 4],
    pos: usize,
    det: u64,
    divisors: &[u64],
    accept: &dyn Fn(&IntegralLattice) -> Result<bool>,
) -> Result<Option<IntegralLattice>> {
    // minors become checkable once their block is filled: after pairs 0, 2, 5
    let check = |g: &[[i64; 4]; 4], filled: usize| -> bool {
        match filled {
            1 => leading_minor(g, 2) > 0,
            3 => leading_minor(g, 3) > 0,
            _ => true,
        }
    };
    if pos == PAIRS.len() {
        if leading_minor(g, 4) != det as i64 {
            return Ok(None);
        }
        let rows: Vec<Vec<i64>> = g.iter().map(|r| r.to_vec()).collect();
        let l = IntegralLattice::new(IntMatrix::from_rows(&rows))?;
        if elementary_divisors_u64(&l) == divisors && accept(&l)? {
            return Ok(Some(l));
        }
        return Ok(None);
    }
    let (i, j) = PAIRS[pos];
    let bound = a[i].min(a[j]);
    for b in 0..=2 * bound {
        // 0, -1, 1, -2, 2, ...
        let v = if b % 2 == 0 { b / 2 } else { -(b + 1) / 2 };
        if v.abs() > bound {
            continue;
        }
        g[i][j] = v;
        g[j][i] = v;
        if check(g, pos + 1) {
            if let Some(l) = search_offdiag(g, a, pos + 1, det, divisors, accept)? {
                return Ok(Some(l));
            }
        }
    }
    g[i][j] = 0;
    g[j][i] = 0;
    Ok(None)
}

fn base_ns(p: u64) -> Result<IntegralLattice> {
    let u = std_lat(StandardLattice::U);
    let e8 = std_lat(StandardLattice::E8);
    let tail = if p % 4 == 3 {
        let k = standard_lattice(StandardLattice::K2(p))?;
        k.direct_sum(&k)
    } else {
        let found = search_rank4(&[p, p], 2 * p as i64, &|_| Ok(true))?
            .ok_or_else(|| Error::ConstructionFailed(format!("no rank-4 block of determinant {p}²")))?;
        found.twist(-1)?
    };
    Ok(IntegralLattice::direct_sum_all(&[u, e8.clone(), e8, tail]))
}

/// The supersingular K3 lattice of Artin invariant `σ`: rank 22, even,
/// signature `(1, 21)`, discriminant group `(Z/p)^{2σ}`.
pub fn ns_lattice(params: &SupersingularParams) -> Result<IntegralLattice> {
    let mut l = base_ns(params.p)?;
    verify_ns(&l, &params.with_sigma(1))?;
    for s in 2..=params.sigma {
        let want = vec![params.p; 2 * s as usize];
        l = descend(&l, params.p, |sub| Ok(elementary_divisors_u64(sub) == want), 10_000)?;
    }
    verify_ns(&l, params)?;
    Ok(l)
}

/// `Γ(2) = (U ⊕ E8)(2)`.
pub fn gamma_twisted() -> IntegralLattice {
    std_lat(StandardLattice::U)
        .direct_sum(&std_lat(StandardLattice::E8))
        .twist(2)
        .expect("nonzero twist")
}

/// `δ = −q_NS ⊕ q_Γ(2)`, the discriminant form of the complement genus.
pub fn delta_form(params: &SupersingularParams) -> Result<FiniteQuadraticForm> {
    let ns = FiniteQuadraticForm::of_lattice(&ns_lattice(params)?)?;
    let g2 = FiniteQuadraticForm::of_lattice(&gamma_twisted())?;
    let delta = ns.negate().direct_sum(&g2);
    let sig = delta.milgram_signature()?;
    if sig != 4 {
        return Err(Error::Internal(format!("Milgram signature of δ is {sig}, expected 4")));
    }
    Ok(delta)
}

/// Checks that `l` lies in the complement genus `(0, 12, δ)`.
pub fn verify_complement(l: &IntegralLattice, delta: &FiniteQuadraticForm) -> Result<()> {
    let reject = |m: String| Err(Error::SeedRejected(m));
    if l.rank() != COMPLEMENT_RANK {
        return reject(format!("rank {} is not 12", l.rank()));
    }
    if !l.is_even() {
        return reject("not even".into());
    }
    if l.signature() != (0, 12) {
        return reject(format!("signature {:?} is not (0,12)", l.signature()));
    }
    let q = FiniteQuadraticForm::of_lattice(l)?;
    match forms_isomorphic(&q, delta) {
        Ok(true) => Ok(()),
        Ok(false) => reject("discriminant form is not isomorphic to δ".into()),
        Err(e) => reject(format!("discriminant form: {e}")),
    }
}

/// A reason why the genus `(0, 12, δ)` is empty, if one of the two
/// local obstructions applies.
///
/// If the `p`-length `2σ` equals the rank, the lattice is `M(p)` for an
/// even `M` of determinant `2^10`, so the `F_p` form on the `p`-part is
/// `M mod p` and its determinant class must be `χ(2^10) = 1`.
pub fn genus_obstruction(params: &SupersingularParams) -> Result<Option<String>> {
    let len = 2 * params.sigma as usize;
    if len > COMPLEMENT_RANK {
        return Ok(Some(format!("p-length {len} exceeds the rank {COMPLEMENT_RANK}")));
    }
    if len == COMPLEMENT_RANK {
        let delta = delta_form(params)?;
        let inv = form_invariants(&delta.p_part(params.p))?;
        let class = inv.primes.iter().find(|x| x.p == params.p).and_then(|x| x.det_class).unwrap_or(0);
        let forced = legendre(1 << 10, params.p);
        if class != forced {
            return Ok(Some(format!(
                "p-length equals the rank, which forces determinant class {forced} on the p-part, but δ has {class}"
            )));
        }
    }
    Ok(None)
}

fn reduce_negative(l: &IntegralLattice) -> Result<IntegralLattice> {
    IntegralLattice::from_gram(&l.positive_gram()?.lll()?.neg())
}

/// A lattice in the complement genus `(0, 12, δ)`; not necessarily root-free.
pub fn seed_complement(params: &SupersingularParams) -> Result<IntegralLattice> {
    if let Some(reason) = genus_obstruction(params)? {
        return Err(Error::SeedNotFound(format!("genus (0,12,δ) is empty: {reason}")));
    }
    let p = params.p;
    let delta1 = delta_form(&params.with_sigma(1))?;
    let u_type = |x: &IntegralLattice| -> Result<bool> {
        let q = FiniteQuadraticForm::of_lattice(x)?.p_part(2);
        Ok(q.q_values().iter().all(|v| v.is_integer()) && q.milgram_signature()? == 0)
    };
    let block = search_rank4(&[2 * p, 2 * p], 2 * p as i64, &u_type)?
        .ok_or_else(|| Error::SeedNotFound(format!("no rank-4 block with discriminant (Z/2)² ⊕ (Z/{p})²")))?;
    let e8_2 = std_lat(StandardLattice::E8).twist(2)?;
    let mut l = reduce_negative(&e8_2.direct_sum(&block.twist(-1)?))?;
    verify_complement(&l, &delta1).map_err(|e| Error::SeedNotFound(e.to_string()))?;
    for s in 2..=params.sigma {
        let delta = delta_form(&params.with_sigma(s))?;
        let sub = descend(&l, p, |c| Ok(verify_complement(c, &delta).is_ok()), 10_000)
            .map_err(|e| Error::SeedNotFound(e.to_string()))?;
        l = reduce_negative(&sub)?;
    }
    Ok(l)
}

/// How the class list of a complement genus is obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RepMethod {
    /// Empty genus.
    Empty,
    /// Neighbour closure at `ℓ`.
    Closure(u64),
    /// Image of the catalog for `σ' = 6 − σ` under `M ↦ (M + 2M^∨)(p)`.
    Dual(u32),
}

pub fn rep_method(params: &SupersingularParams) -> Result<RepMethod> {
    if genus_obstruction(params)?.is_some() {
        return Ok(RepMethod::Empty);
    }
    if params.sigma > 3 {
        return Ok(RepMethod::Dual(6 - params.sigma));
    }
    // ℓ = 3 is the cheapest prime; for p = 3 the complement is 3-elementary
    Ok(RepMethod::Closure(3))
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepOptions {
    /// Neighbour primes; empty selects the default for the parameters.
    pub primes: Vec<u64>,
    pub cross_check: bool,
    pub max_classes: Option<usize>,
}

fn empty_catalog() -> GenusClassCatalog {
    GenusClassCatalog { sign: -1, classes: vec![], primes: vec![], lines_visited: 0, lines_total: 0 }
}

/// All classes of the complement genus with root-free flags;
/// `Rep(p, σ)` is the number of root-free classes.
pub fn rep_classes(params: &SupersingularParams, opts: &RepOptions) -> Result<GenusClassCatalog> {
    match rep_method(params)? {
        RepMethod::Empty => Ok(empty_catalog()),
        RepMethod::Dual(from) => {
            let src = rep_classes(&params.with_sigma(from), opts)?;
            dual_catalog(&src, params)
        }
        RepMethod::Closure(ell) => {
            let seed = seed_complement(params)?;
            let mut primes = if opts.primes.is_empty() { vec![ell] } else { opts.primes.clone() };
            if opts.cross_check && primes.len() < 2 {
                let second = (primes[0] + 2..).find(|&q| is_prime(q) && q != params.p).expect("primes are infinite");
                primes.push(second);
            }
            let strategy = GenusStrategy { primes, cross_check: opts.cross_check, max_classes: opts.max_classes };
            let cat = enumerate_genus(&seed, &strategy)?;
            let delta = delta_form(params)?;
            for i in 0..cat.len() {
                verify_complement(&IntegralLattice::from_gram(&cat.signed_gram(i))?, &delta)
                    .map_err(|e| Error::Internal(format!("catalog class {i} left the genus: {e}")))?;
            }
            Ok(cat)
        }
    }
}

/// Maps every class of the genus for `σ'` to the genus for `6 − σ'` by
/// `M ↦ (M + 2M^∨)(p)`, which is a bijection on isometry classes that
/// preserves automorphism groups. Root-freeness is recomputed.
pub fn dual_catalog(src: &GenusClassCatalog, params: &SupersingularParams) -> Result<GenusClassCatalog> {
    let delta = delta_form(params)?;
    let classes = src
        .classes
        .par_iter()
        .map(|c| dual_class(c, params.p, &delta))
        .collect::<Result<Vec<_>>>()?;
    let mut cat = GenusClassCatalog {
        sign: -1,
        classes,
        primes: src.primes.clone(),
        lines_visited: src.lines_visited,
        lines_total: src.lines_total,
    };
    cat.sort_canonical();
    Ok(cat)
}

fn dual_class(c: &GenusClass, p: u64, delta: &FiniteQuadraticForm) -> Result<GenusClass> {
    let n = c.gram.dim();
    let m = IntegralLattice::from_gram(&c.gram)?;
    let (d, basis) = p_dual_rescaled(&m, p)?;
    let dg = Gram::from_matrix(d.gram())?;
    let (red, t) = dg.lll_with_transform()?;
    // full change of basis from the old class basis to the reduced dual basis
    let b = basis.mul(&RatMatrix::from_int(&IntMatrix::from_i64(n, n, &t)));
    let binv = b.inverse()?;
    let generators = c
        .aut
        .generators
        .iter()
        .map(|x| {
            let y = binv.mul(&RatMatrix::from_int(&IntMatrix::from_i64(n, n, x))).mul(&b);
            let yi = y
                .to_int()
                .and_then(|m| m.to_i64())
                .ok_or(Error::Internal("automorphism does not preserve the dual lattice".into()))?;
            if red.congruence(&yi)? != red {
                return Err(Error::NotAnIsometry);
            }
            Ok(yi)
        })
        .collect::<Result<Vec<_>>>()?;
    verify_complement(&IntegralLattice::from_gram(&red.neg())?, delta)
        .map_err(|e| Error::Internal(format!("dual class left the genus: {e}")))?;
    let fingerprint = crate::definite::Fingerprint::of(&red)?;
    Ok(GenusClass {
        root_free: fingerprint.roots() == 0,
        gram: red,
        fingerprint,
        aut: crate::definite::AutomorphismGroup { generators, ..c.aut.clone() },
    })
}

/// The action of an isometry `T` (`Tᵀ·G·T = G`, row-major) of `l` on the
/// `p`-part of its discriminant group, as a matrix on the Smith generators.
pub fn discriminant_action(t: &[i64], l: &IntegralLattice, p: u64) -> Result<FpMatrix> {
    let n = l.rank();
    let tm = IntMatrix::from_i64(n, n, t);
    if l.gram().congruence(&tm) != *l.gram() {
        return Err(Error::NotAnIsometry);
    }
    let disc = l.discriminant_group();
    let pb = BigInt::from(p);
    // p-part generators h_i = m_i g_i for generators with p | d_i
    let mut idx = Vec::new();
    for (i, d) in disc.elementary_divisors.iter().enumerate() {
        if (d % &pb).is_zero() {
            if (d % (&pb * &pb)).is_zero() {
                return Err(Error::UnsupportedShape("p-part is not p-elementary".into()));
            }
            idx.push((i, d / &pb));
        }
    }
    let k = idx.len();
    let mut a = vec![0i64; k * k];
    for (col, (i, m)) in idx.iter().enumerate() {
        let mr = BigRational::from_integer(m.clone());
        let h: Vec<BigRational> = disc.generator_coords[*i].iter().map(|x| x * &mr).collect();
        let th: Vec<BigRational> = (0..n)
            .map(|r| {
                (0..n).fold(BigRational::zero(), |acc, c| acc + BigRational::from_integer(BigInt::from(t[r * n + c])) * &h[c])
            })
            .collect();
        let coords = disc.coordinates(&th)?;
        for (row, (j, mj)) in idx.iter().enumerate() {
            // coordinate on g_j is a multiple of m_j for p-part elements
            let c = &coords[*j];
            if !(c % mj).is_zero() {
                return Err(Error::Internal("image leaves the p-part".into()));
            }
            a[row * k + col] = ((c / mj) % &pb).to_i64().expect("small residue");
        }
    }
    let mat = FpMatrix::new(k, p, a)?;
    let qp = FiniteQuadraticForm::from_discriminant(&disc)?.p_part(p);
    for i in 0..k {
        let ci: Vec<i64> = (0..k).map(|r| mat.get(r, i) as i64).collect();
        for j in 0..k {
            let cj: Vec<i64> = (0..k).map(|r| mat.get(r, j) as i64).collect();
            if qp.bilinear(&ci, &cj) != qp.b_matrix()[i][j] {
                return Err(Error::Internal("discriminant action does not preserve the form".into()));
            }
        }
        if qp.value(&ci) != qp.q_values()[i] {
            return Err(Error::Internal("discriminant action does not preserve q".into()));
        }
    }
    Ok(mat)
}

/// Order of the image of `⟨gens⟩ ⊆ O(l)` in `O((q_l)_p)`.
pub fn image_order(l: &IntegralLattice, gens: &[Vec<i64>], p: u64) -> Result<BigUint> {
    let k = l.discriminant_group().elementary_divisors.iter().filter(|d| (*d % BigInt::from(p)).is_zero()).count();
    let space = (p as f64).powi(k as i32);
    if space > ORBIT_SPACE_LIMIT as f64 {
        return Err(Error::Infeasible(format!("orbit space {p}^{k} exceeds {ORBIT_SPACE_LIMIT}")));
    }
    let mats = gens.iter().map(|t| discriminant_action(t, l, p)).collect::<Result<Vec<_>>>()?;
    group_order(&mats, k, p)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassReport {
    pub gram: Gram,
    pub aut_order: BigUint,
    pub orthogonal_order: BigUint,
    pub image_order: BigUint,
    pub quotient: BigUint,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnriquesReport {
    pub params: SupersingularParams,
    pub genus_classes: usize,
    pub lower_bound: u64,
    pub classes: Vec<ClassReport>,
    pub upper_bound: BigUint,
    pub equality: bool,
    pub method: RepMethod,
    pub note: Option<String>,
}

impl EnriquesReport {
    pub fn to_json(&self) -> Value {
        let method = match self.method {
            RepMethod::Empty => json!({"kind": "empty"}),
            RepMethod::Closure(ell) => json!({"kind": "neighbour-closure", "prime": ell}),
            RepMethod::Dual(s) => json!({"kind": "p-dual", "from_sigma": s}),
        };
        let classes: Vec<Value> = self
            .classes
            .iter()
            .map(|c| {
                let rows: Vec<&[i64]> = (0..c.gram.dim()).map(|r| c.gram.row(r)).collect();
                json!({
                    "gram": rows,
                    "aut_order": c.aut_order.to_string(),
                    "orthogonal_order": c.orthogonal_order.to_string(),
                    "image_order": c.image_order.to_string(),
                    "quotient": c.quotient.to_string(),
                })
            })
            .collect();
        json!({
            "params": self.params.to_json(),
            "genus_classes": self.genus_classes,
            "lower_bound": self.lower_bound.to_string(),
            "upper_bound": self.upper_bound.to_string(),
            "equality": self.equality,
            "method": method,
            "note": self.note,
            "classes": classes,
        })
    }
}

/// `|O(q_p)|` for the `p`-part of `δ`.
pub fn p_part_orthogonal_order(params: &SupersingularParams) -> Result<BigUint> {
    let delta = delta_form(params)?;
    let eps = delta.p_part(params.p).witt_epsilon(params.p)?;
    Ok(orthogonal_group_order(params.p, params.sigma, eps))
}

/// Upper bound `Σ |O(q_p)| / |im_j|` over the root-free classes.
pub fn upper_bound(params: &SupersingularParams, cat: &GenusClassCatalog) -> Result<(BigUint, Vec<ClassReport>)> {
    let o = p_part_orthogonal_order(params)?;
    let reports = (0..cat.len())
        .filter(|&i| cat.classes[i].root_free)
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&i| {
            let c = &cat.classes[i];
            let g = cat.signed_gram(i);
            let l = IntegralLattice::from_gram(&g)?;
            let im = image_order(&l, &c.aut.generators, params.p)?;
            if (&o % &im) != BigUint::zero() {
                return Err(Error::Internal("image order does not divide |O(q_p)|".into()));
            }
            Ok(ClassReport {
                gram: g,
                aut_order: c.aut.order.clone(),
                orthogonal_order: o.clone(),
                quotient: &o / &im,
                image_order: im,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total = reports.iter().fold(BigUint::zero(), |a, r| a + &r.quotient);
    Ok((total, reports))
}

pub fn report_from_catalog(params: &SupersingularParams, cat: &GenusClassCatalog) -> Result<EnriquesReport> {
    let method = rep_method(params)?;
    let (upper, classes) = if cat.root_free_count() == 0 { (BigUint::zero(), vec![]) } else { upper_bound(params, cat)? };
    let lower = cat.root_free_count() as u64;
    let note = match method {
        RepMethod::Empty => genus_obstruction(params)?,
        _ => None,
    };
    Ok(EnriquesReport {
        params: *params,
        genus_classes: cat.len(),
        lower_bound: lower,
        equality: BigUint::from(lower) == upper,
        upper_bound: upper,
        classes,
        method,
        note,
    })
}

pub fn full_report(params: &SupersingularParams, opts: &RepOptions) -> Result<EnriquesReport> {
    let cat = rep_classes(params, opts)?;
    report_from_catalog(params, &cat)
}

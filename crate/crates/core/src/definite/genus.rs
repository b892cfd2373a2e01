//! Genus enumeration by breadth-first closure of the neighbour graph.
//!
//! Neighbours of one class are built and compared against a snapshot of the
//! registry in parallel; new classes are then committed serially in line
//! order, so the result does not depend on the number of workers.

use std::collections::HashMap;

use num_bigint::BigUint;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::gram::Gram;
use super::isom::{automorphism_group, isometry_to, AutomorphismGroup, IsometryTarget};
use super::neighbor::{isotropic_lines, line_orbit_representatives, reduced_neighbor};
use super::profile::ProbeSet;
use super::short::{for_each_short_vector, minimum};
use crate::error::{Error, Result};
use crate::lattice::{is_prime, IntegralLattice};

/// Largest norm entering the fingerprint.
pub const FINGERPRINT_BOUND: i64 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Fingerprint {
    pub minimum: i64,
    /// `theta[k]` counts `±` pairs of norm `k + 1`.
    pub theta: Vec<u64>,
    /// Multiset of the short-vector profiles.
    pub profile: u64,
}

impl Fingerprint {
    pub fn of(g: &Gram) -> Result<Self> {
        let mut theta = vec![0u64; FINGERPRINT_BOUND as usize];
        for_each_short_vector(g, FINGERPRINT_BOUND, |_, nrm| theta[nrm as usize - 1] += 1)?;
        let minimum = match theta.iter().position(|&c| c > 0) {
            Some(k) => k as i64 + 1,
            None => minimum(g)?,
        };
        let profile = ProbeSet::new(g)?.lattice_profile(g);
        Ok(Fingerprint { minimum, theta, profile })
    }

    pub fn roots(&self) -> u64 {
        self.theta.get(1).copied().unwrap_or(0)
    }
}

#[derive(Clone, Debug)]
pub struct GenusClass {
    /// Positive-definite reduced Gram (the negative of the class when the
    /// genus is negative definite).
    pub gram: Gram,
    pub fingerprint: Fingerprint,
    pub root_free: bool,
    pub aut: AutomorphismGroup,
}

impl GenusClass {
    pub fn new(gram: Gram) -> Result<Self> {
        let fingerprint = Fingerprint::of(&gram)?;
        let aut = automorphism_group(&gram)?;
        Ok(GenusClass { root_free: fingerprint.roots() == 0, gram, fingerprint, aut })
    }

    pub fn aut_order(&self) -> &BigUint {
        &self.aut.order
    }

    fn sort_key(&self) -> (u64, i64, &[u64], &[i64]) {
        (self.fingerprint.roots(), self.fingerprint.minimum, &self.fingerprint.theta, self.gram.data())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GenusStrategy {
    pub primes: Vec<u64>,
    pub cross_check: bool,
    /// Abort with `Infeasible` once the registry exceeds this many classes.
    pub max_classes: Option<usize>,
}

impl GenusStrategy {
    pub fn single(ell: u64) -> Self {
        GenusStrategy { primes: vec![ell], cross_check: false, max_classes: None }
    }
}

#[derive(Clone, Debug)]
pub struct GenusClassCatalog {
    /// `+1` for a positive-definite genus, `−1` for a negative-definite one.
    pub sign: i8,
    pub classes: Vec<GenusClass>,
    pub primes: Vec<u64>,
    /// Orbit representatives of isotropic lines processed.
    pub lines_visited: u64,
    /// All isotropic lines over all classes (orbits expanded).
    pub lines_total: u64,
}

impl GenusClassCatalog {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn root_free_count(&self) -> usize {
        self.classes.iter().filter(|c| c.root_free).count()
    }

    pub fn sort_canonical(&mut self) {
        self.classes.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
    }

    /// The class Gram in the sign of the genus.
    pub fn signed_gram(&self, i: usize) -> Gram {
        let g = &self.classes[i].gram;
        if self.sign < 0 {
            g.neg()
        } else {
            g.clone()
        }
    }

    pub fn to_json(&self, params: Value) -> Value {
        let classes: Vec<Value> = (0..self.len())
            .map(|i| {
                let c = &self.classes[i];
                let g = self.signed_gram(i);
                let n = g.dim();
                let rows: Vec<&[i64]> = (0..n).map(|r| g.row(r)).collect();
                json!({
                    "gram": rows,
                    "root_free": c.root_free,
                    "aut_order": c.aut.order.to_string(),
                    "aut_generators": c.aut.generators,
                    "aut_orbits": c.aut.orbit_lengths,
                    "fingerprint": {
                        "minimum": c.fingerprint.minimum,
                        "theta": c.fingerprint.theta,
                        "profile": format!("{:016x}", c.fingerprint.profile),
                    },
                })
            })
            .collect();
        json!({
            "params": params,
            "sign": self.sign,
            "classes": classes,
            "closure": {"primes": self.primes, "lines_visited": self.lines_visited, "lines_total": self.lines_total},
        })
    }

    /// Reads a catalog written by `to_json`, re-checking every stored
    /// generator and fingerprint.
    pub fn from_json(v: &Value) -> Result<Self> {
        #[derive(Deserialize)]
        struct FpDoc {
            minimum: i64,
            theta: Vec<u64>,
            profile: String,
        }
        #[derive(Deserialize)]
        struct ClassDoc {
            gram: Vec<Vec<i64>>,
            root_free: bool,
            aut_order: String,
            aut_generators: Vec<Vec<i64>>,
            aut_orbits: Vec<u64>,
            fingerprint: FpDoc,
        }
        #[derive(Deserialize)]
        struct ClosureDoc {
            primes: Vec<u64>,
            lines_visited: u64,
            lines_total: u64,
        }
        #[derive(Deserialize)]
        struct Doc {
            sign: i8,
            classes: Vec<ClassDoc>,
            closure: ClosureDoc,
        }
        let doc: Doc = serde_json::from_value(v.clone()).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
        if doc.sign != 1 && doc.sign != -1 {
            return Err(Error::CacheCorrupt("sign must be ±1".into()));
        }
        let mut classes = Vec::with_capacity(doc.classes.len());
        for c in doc.classes {
            let n = c.gram.len();
            let flat: Vec<i64> = c.gram.into_iter().flatten().collect();
            let mut gram = Gram::new(n, flat).map_err(|e| Error::CacheCorrupt(e.to_string()))?;
            if doc.sign < 0 {
                gram = gram.neg();
            }
            let profile = u64::from_str_radix(&c.fingerprint.profile, 16)
                .map_err(|_| Error::CacheCorrupt("bad fingerprint profile".into()))?;
            let fingerprint = Fingerprint { minimum: c.fingerprint.minimum, theta: c.fingerprint.theta, profile };
            if Fingerprint::of(&gram)? != fingerprint || c.root_free != (fingerprint.roots() == 0) {
                return Err(Error::CacheCorrupt("fingerprint does not match gram".into()));
            }
            for x in &c.aut_generators {
                if x.len() != n * n || gram.congruence(x)? != gram {
                    return Err(Error::CacheCorrupt("stored generator is not an automorphism".into()));
                }
            }
            let order: BigUint = c.aut_order.parse().map_err(|_| Error::CacheCorrupt("bad aut_order".into()))?;
            let product = c.aut_orbits.iter().fold(BigUint::from(1u32), |a, &l| a * BigUint::from(l));
            if product != order {
                return Err(Error::CacheCorrupt("aut_order disagrees with orbit lengths".into()));
            }
            classes.push(GenusClass {
                gram,
                root_free: c.root_free,
                fingerprint,
                aut: AutomorphismGroup { dim: n, generators: c.aut_generators, order, orbit_lengths: c.aut_orbits },
            });
        }
        Ok(GenusClassCatalog {
            sign: doc.sign,
            classes,
            primes: doc.closure.primes,
            lines_visited: doc.closure.lines_visited,
            lines_total: doc.closure.lines_total,
        })
    }
}

/// Classes found so far, bucketed by fingerprint.
struct Registry {
    classes: Vec<GenusClass>,
    targets: Vec<IsometryTarget>,
    buckets: HashMap<Fingerprint, Vec<usize>>,
}

impl Registry {
    fn new() -> Self {
        Registry { classes: Vec::new(), targets: Vec::new(), buckets: HashMap::new() }
    }

    fn add(&mut self, class: GenusClass) -> Result<()> {
        let target = IsometryTarget::new(&class.gram, class.gram.max_diagonal(), Some(&class.aut))?;
        self.buckets.entry(class.fingerprint.clone()).or_default().push(self.classes.len());
        self.classes.push(class);
        self.targets.push(target);
        Ok(())
    }

    /// Index of a class in `lo..hi` isometric to `g`.
    fn find(&self, g: &Gram, fp: &Fingerprint, lo: usize, hi: usize) -> Result<Option<usize>> {
        let Some(bucket) = self.buckets.get(fp) else { return Ok(None) };
        for &c in bucket.iter().filter(|&&c| c >= lo && c < hi) {
            if isometry_to(g, &self.targets[c])?.is_some() {
                return Ok(Some(c));
            }
        }
        Ok(None)
    }
}

enum Outcome {
    Known,
    New(Gram, Fingerprint),
}

struct Closure {
    classes: Vec<GenusClass>,
    lines_visited: u64,
    lines_total: u64,
}

/// Neighbour primes may divide the determinant only when the lattice is
/// `ℓ`-elementary; then every line with `G·v ≢ 0 mod ℓ` stays in the genus.
fn check_prime(g: &Gram, ell: u64) -> Result<()> {
    if ell == 2 || !is_prime(ell) {
        return Err(Error::BadPrime(ell, "not an odd prime".into()));
    }
    if g.dim() < 3 {
        return Err(Error::BadPrime(ell, "rank below 3".into()));
    }
    let l = IntegralLattice::from_gram(g)?;
    let disc = l.discriminant_group();
    let lb = num_bigint::BigInt::from(ell);
    for d in &disc.elementary_divisors {
        if (d % (&lb * &lb)) == num_bigint::BigInt::from(0) {
            return Err(Error::BadPrime(ell, "lattice is not ℓ-elementary".into()));
        }
    }
    Ok(())
}

fn closure(seed: &Gram, ell: u64, max_classes: Option<usize>) -> Result<Closure> {
    let mut reg = Registry::new();
    reg.add(GenusClass::new(seed.lll()?)?)?;
    let mut lines_visited = 0u64;
    let mut lines_total = 0u64;
    let mut q = 0;
    while q < reg.classes.len() {
        let g = reg.classes[q].gram.clone();
        let lines = isotropic_lines(&g, ell);
        let reps = line_orbit_representatives(&lines, &reg.classes[q].aut.generators, ell)?;
        lines_visited += reps.len() as u64;
        lines_total += lines.len() as u64;
        let snapshot = reg.classes.len();
        let outcomes: Vec<Result<Outcome>> = reps
            .par_iter()
            .map(|&(i, _)| {
                let nb = reduced_neighbor(&g, &lines[i], ell)?;
                let fp = Fingerprint::of(&nb)?;
                Ok(match reg.find(&nb, &fp, 0, snapshot)? {
                    Some(_) => Outcome::Known,
                    None => Outcome::New(nb, fp),
                })
            })
            .collect();
        for o in outcomes {
            if let Outcome::New(nb, fp) = o? {
                let len = reg.classes.len();
                if reg.find(&nb, &fp, snapshot, len)?.is_none() {
                    reg.add(GenusClass::new(nb)?)?;
                    if max_classes.is_some_and(|m| reg.classes.len() > m) {
                        return Err(Error::Infeasible(format!("genus has more than {} classes", max_classes.unwrap())));
                    }
                }
            }
        }
        q += 1;
    }
    Ok(Closure { classes: reg.classes, lines_visited, lines_total })
}

/// All isometry classes in the genus of an even definite lattice.
pub fn enumerate_genus(seed: &IntegralLattice, strategy: &GenusStrategy) -> Result<GenusClassCatalog> {
    if !seed.is_even() {
        return Err(Error::InvalidParams("seed must be even".into()));
    }
    let sign = if seed.is_positive_definite() { 1 } else { -1 };
    let g = seed.positive_gram()?;
    let ell = *strategy.primes.first().ok_or(Error::InvalidParams("no neighbour prime".into()))?;
    for &p in &strategy.primes {
        check_prime(&g, p)?;
    }
    let main = closure(&g, ell, strategy.max_classes)?;
    if strategy.cross_check {
        let &second = strategy
            .primes
            .get(1)
            .ok_or(Error::InvalidParams("cross-check needs a second prime".into()))?;
        let other = closure(&g, second, strategy.max_classes)?;
        if !same_class_set(&main.classes, &other.classes)? {
            return Err(Error::Internal(format!("closures at {ell} and {second} disagree")));
        }
    }
    let mut cat = GenusClassCatalog {
        sign,
        classes: main.classes,
        primes: strategy.primes.clone(),
        lines_visited: main.lines_visited,
        lines_total: main.lines_total,
    };
    cat.sort_canonical();
    Ok(cat)
}

/// Whether two lists of pairwise non-isometric classes represent the same
/// set of isometry classes.
pub fn same_class_set(a: &[GenusClass], b: &[GenusClass]) -> Result<bool> {
    if a.len() != b.len() {
        return Ok(false);
    }
    let mut reg = Registry::new();
    for c in b {
        reg.add(c.clone())?;
    }
    for c in a {
        if reg.find(&c.gram, &c.fingerprint, 0, b.len())?.is_none() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Runs `f` on a pool of `jobs` worker threads.
pub fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    Ok(pool.install(f))
}

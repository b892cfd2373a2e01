use std::collections::BTreeSet;

use enriques_core::definite::neighbor::{isotropic_lines, reduced_neighbor};
use enriques_core::definite::{automorphism_group, is_isometric, short_vectors, Gram};
use enriques_core::form::{form_invariants, forms_isomorphic, FiniteQuadraticForm};
use enriques_core::lattice::IntegralLattice;
use enriques_core::matrix::symmetric_signature;
use proptest::prelude::*;

/// Symmetric matrices with even diagonal and entries in `-r..=r`.
fn even_symmetric(n: usize, r: i64) -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-r..=r, n * (n + 1) / 2).prop_map(move |t| {
        let mut a = vec![0i64; n * n];
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                let x = if i == j { 2 * t[k] } else { t[k] };
                a[i * n + j] = x;
                a[j * n + i] = x;
                k += 1;
            }
        }
        a
    })
}

/// Positive-definite Grams `BᵀB + D` of rank `n ≤ 4`.
fn positive_gram() -> impl Strategy<Value = Gram> {
    (1usize..=4).prop_flat_map(|n| {
        (prop::collection::vec(-3i64..=3, n * n), prop::collection::vec(1i64..=3, n)).prop_map(move |(b, d)| {
            let mut a = vec![0i64; n * n];
            for i in 0..n {
                for j in 0..n {
                    a[i * n + j] = (0..n).map(|k| b[k * n + i] * b[k * n + j]).sum::<i64>();
                }
                a[i * n + i] += d[i];
            }
            Gram::new(n, a).unwrap()
        })
    })
}

/// Independent oracle: every integer vector in the box
/// `|x_i| ≤ √(bound·(G⁻¹)_ii)`, which contains the ellipsoid.
fn box_enumeration(g: &Gram, bound: i64) -> BTreeSet<(Vec<i64>, i64)> {
    let n = g.dim();
    let inv = g.to_matrix().inverse_rational().unwrap();
    let radius: Vec<i64> = (0..n)
        .map(|i| {
            let d = inv.get(i, i);
            let x = (bound as f64) * num_traits::ToPrimitive::to_f64(d).unwrap();
            x.sqrt().floor() as i64 + 1
        })
        .collect();
    let mut out = BTreeSet::new();
    let mut x: Vec<i64> = radius.iter().map(|r| -r).collect();
    loop {
        let norm = g.norm(&x);
        if norm > 0 && norm <= bound {
            // keep the representative whose last nonzero coordinate is positive
            if x.iter().rev().find(|&&c| c != 0).is_some_and(|&c| c > 0) {
                out.insert((x.clone(), norm));
            }
        }
        let mut i = 0;
        while i < n {
            x[i] += 1;
            if x[i] <= radius[i] {
                break;
            }
            x[i] = -radius[i];
            i += 1;
        }
        if i == n {
            return out;
        }
    }
}

/// Independent oracle: all `X` whose columns are vectors of the right norms
/// with `XᵀGX = G`.
fn brute_force_aut_order(g: &Gram) -> u64 {
    let n = g.dim();
    let bound = g.max_diagonal();
    let mut vecs: Vec<Vec<i64>> = Vec::new();
    for (v, _) in box_enumeration(g, bound) {
        vecs.push(v.iter().map(|x| -x).collect());
        vecs.push(v);
    }
    let mut count = 0;
    let mut cols: Vec<usize> = Vec::new();
    fn rec(g: &Gram, vecs: &[Vec<i64>], cols: &mut Vec<usize>, count: &mut u64) {
        let j = cols.len();
        if j == g.dim() {
            *count += 1;
            return;
        }
        for (k, v) in vecs.iter().enumerate() {
            if g.norm(v) != g.at(j, j) {
                continue;
            }
            if cols.iter().enumerate().all(|(i, &c)| g.inner(&vecs[c], v) == g.at(i, j)) {
                cols.push(k);
                rec(g, vecs, cols, count);
                cols.pop();
            }
        }
    }
    rec(g, &vecs, &mut cols, &mut count);
    let _ = n;
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn short_vectors_match_box_enumeration(g in positive_gram(), bound in 1i64..=12) {
        let list = short_vectors(&g, bound).unwrap();
        let got: BTreeSet<(Vec<i64>, i64)> = list.vectors.iter().cloned().collect();
        prop_assert_eq!(got.len(), list.vectors.len());
        prop_assert_eq!(got, box_enumeration(&g, bound));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn milgram_matches_signature(n in 1usize..=5, seed in even_symmetric(5, 3)) {
        let a: Vec<i64> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| seed[i * 5 + j]).collect();
        let l = match IntegralLattice::from_i64(n, &a) { Ok(l) => l, Err(_) => return Ok(()) };
        let (pos, neg) = symmetric_signature(l.gram()).unwrap();
        let q = FiniteQuadraticForm::of_lattice(&l).unwrap();
        let expected = ((pos as i64 - neg as i64).rem_euclid(8)) as u8;
        prop_assert_eq!(q.milgram_signature().unwrap(), expected);
    }

    #[test]
    fn automorphism_order_matches_brute_force(g in positive_gram()) {
        prop_assume!(g.dim() <= 3);
        let aut = automorphism_group(&g).unwrap();
        for x in &aut.generators {
            prop_assert_eq!(&g.congruence(x).unwrap(), &g);
        }
        prop_assert_eq!(aut.order, brute_force_aut_order(&g).into());
    }

    #[test]
    fn isometry_found_after_random_basis_change(g in positive_gram(), t in prop::collection::vec(-2i64..=2, 16)) {
        let n = g.dim();
        // unipotent upper triangular change of basis
        let mut u = vec![0i64; n * n];
        for i in 0..n {
            u[i * n + i] = 1;
            for j in i + 1..n {
                u[i * n + j] = t[i * 4 + j];
            }
        }
        let h = g.congruence(&u).unwrap();
        prop_assert!(is_isometric(&g, &h).unwrap());
    }

    #[test]
    fn form_invariants_survive_rebasing(a in 1i64..=2, b in 1i64..=2, c in 1i64..=2, m in prop::collection::vec(0i64..3, 9)) {
        // random element of GL_3(F_3) applied to a 3-elementary form
        let q = enriques_core::form::diagonal_elementary(3, &[a, b, c]).unwrap();
        let images: Vec<Vec<i64>> = (0..3).map(|i| (0..3).map(|j| m[i * 3 + j]).collect()).collect();
        let det = images[0][0] * (images[1][1] * images[2][2] - images[1][2] * images[2][1])
            - images[0][1] * (images[1][0] * images[2][2] - images[1][2] * images[2][0])
            + images[0][2] * (images[1][0] * images[2][1] - images[1][1] * images[2][0]);
        prop_assume!(det.rem_euclid(3) != 0);
        let r = q.rebased(&images).unwrap();
        prop_assert_eq!(form_invariants(&r).unwrap(), form_invariants(&q).unwrap());
        prop_assert!(forms_isomorphic(&r, &q).unwrap());
    }
}

fn a2_a2_a2() -> Gram {
    let mut a = vec![0i64; 36];
    for k in 0..3 {
        let o = 2 * k;
        a[o * 6 + o] = 2;
        a[(o + 1) * 6 + o + 1] = 2;
        a[o * 6 + o + 1] = -1;
        a[(o + 1) * 6 + o] = -1;
    }
    Gram::new(6, a).unwrap()
}

#[test]
fn neighbours_share_genus_invariants() {
    let g = a2_a2_a2();
    let q = FiniteQuadraticForm::of_lattice(&IntegralLattice::from_gram(&g).unwrap()).unwrap();
    let lines = isotropic_lines(&g, 5);
    assert!(!lines.is_empty());
    for v in lines.iter().step_by(7) {
        let nb = reduced_neighbor(&g, v, 5).unwrap();
        assert!(nb.is_even());
        assert!(nb.is_positive_definite());
        let l = IntegralLattice::from_gram(&nb).unwrap();
        assert_eq!(l.determinant(), 27.into());
        assert!(forms_isomorphic(&FiniteQuadraticForm::of_lattice(&l).unwrap(), &q).unwrap());
    }
}

#[test]
fn neighbour_relation_is_symmetric() {
    let g = a2_a2_a2();
    for v in isotropic_lines(&g, 5).iter().step_by(41).take(5) {
        let nb = reduced_neighbor(&g, v, 5).unwrap();
        let back = isotropic_lines(&nb, 5).iter().any(|w| is_isometric(&reduced_neighbor(&nb, w, 5).unwrap(), &g).unwrap());
        assert!(back, "no neighbour of the neighbour along {v:?} is isometric to the start");
    }
}

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use carnot_core::algebra::LieVec;
use carnot_core::free_lie::{FreeLie, Tree};
use carnot_core::group::Group;
use carnot_core::prolongation::prolong;
use carnot_core::rational::{frac, int};
use carnot_core::{ExtremalFamily, GradedLieAlgebra, MultiIndex, Poly, Rational};
use num_traits::Zero;
use proptest::prelude::*;

fn free24() -> &'static FreeLie {
    static F: OnceLock<FreeLie> = OnceLock::new();
    F.get_or_init(|| FreeLie::build(2, 4).unwrap())
}

fn rat() -> impl Strategy<Value = Rational> {
    (-6i64..=6, 1i64..=4).prop_map(|(p, q)| frac(p, q))
}

fn dense(n: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(rat(), n)
}

fn to_map(v: &[Rational]) -> LieVec {
    v.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(|(k, c)| (k as i64 + 1, c.clone())).collect()
}

fn add(a: &LieVec, b: &LieVec, s: &Rational) -> LieVec {
    let mut out = a.clone();
    for (k, c) in b {
        let e = out.entry(*k).or_insert_with(Rational::zero);
        *e += c * s;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn tree(r: usize) -> impl Strategy<Value = Tree> {
    let leaf = (1..=r).prop_map(Tree::Gen);
    leaf.prop_recursive(3, 8, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| Tree::br(a, b)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bracket_bilinear_antisymmetric(u in dense(8), w in dense(8), z in dense(8), s in rat()) {
        let g = &free24().algebra;
        let (u, w, z) = (to_map(&u), to_map(&w), to_map(&z));
        let lhs = g.bracket(&add(&u, &z, &s), &w).unwrap();
        let rhs = add(&g.bracket(&u, &w).unwrap(), &g.bracket(&z, &w).unwrap(), &s);
        prop_assert_eq!(lhs, rhs);
        let neg = g.bracket(&w, &u).unwrap();
        prop_assert_eq!(g.bracket(&u, &w).unwrap(), add(&BTreeMap::new(), &neg, &int(-1)));
    }

    #[test]
    fn group_law(x in dense(8), y in dense(8), z in dense(8)) {
        let g = Group::new(&free24().algebra).unwrap();
        let left = g.mul(&g.mul(&x, &y), &z);
        let right = g.mul(&x, &g.mul(&y, &z));
        prop_assert_eq!(left, right);
        prop_assert_eq!(g.to_second_kind(&g.from_second_kind(&x)), x.clone());
        prop_assert!(g.mul(&x, &g.inverse(&x)).iter().all(|c| c.is_zero()));
    }

    #[test]
    fn hall_reduction_is_a_homomorphism(a in tree(2), b in tree(2), c in tree(2)) {
        let f = free24();
        let red = |t: &Tree| f.reduce_to_hall(t).unwrap();
        let br = Tree::br(a.clone(), b.clone());
        prop_assert_eq!(red(&br), f.algebra.bracket(&red(&a), &red(&b)).unwrap());
        let jac = [
            Tree::br(a.clone(), Tree::br(b.clone(), c.clone())),
            Tree::br(b.clone(), Tree::br(c.clone(), a.clone())),
            Tree::br(c.clone(), Tree::br(a.clone(), b.clone())),
        ];
        let total = jac.iter().fold(BTreeMap::new(), |acc, t| add(&acc, &red(t), &int(1)));
        prop_assert!(total.is_empty());
    }

    #[test]
    fn gsc_matches_iterated_commutators(i in 1i64..=8, e in prop::collection::vec(0u8..=2, 8)) {
        let g = &free24().algebra;
        let alpha = MultiIndex::from(e);
        let gsc = g.generalized_structure_constants(i).unwrap();
        let direct = g.iterated_commutator(i, &alpha).unwrap();
        for k in 1..=8 {
            let want = direct.get(&k).cloned().unwrap_or_else(Rational::zero);
            let got = gsc.get(&(alpha.clone(), k)).cloned().unwrap_or_else(Rational::zero);
            prop_assert_eq!(got, want, "alpha {:?} k {}", alpha, k);
        }
    }

    #[test]
    fn family_linear_in_v(v in dense(8), w in dense(8), s in rat(), x in dense(8)) {
        let fam = family24();
        for j in fam.indices() {
            let vw: Vec<Rational> = v.iter().zip(&w).map(|(a, b)| a + b * &s).collect();
            let lhs = fam.eval_p(j, &vw, &x).unwrap();
            let rhs = fam.eval_p(j, &v, &x).unwrap() + fam.eval_p(j, &w, &x).unwrap() * &s;
            prop_assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn poly_product_and_division(a in prop::collection::vec((prop::collection::vec(0u8..=2, 3), rat()), 1..5),
                                 b in prop::collection::vec((prop::collection::vec(0u8..=2, 3), rat()), 1..4),
                                 x in dense(3)) {
        let p = Poly::from_terms(3, a.into_iter().map(|(e, c)| (MultiIndex::from(e), c))).unwrap();
        let q = Poly::from_terms(3, b.into_iter().map(|(e, c)| (MultiIndex::from(e), c))).unwrap();
        let pq = p.try_mul(&q).unwrap();
        prop_assert_eq!(pq.evaluate(&x).unwrap(), p.evaluate(&x).unwrap() * q.evaluate(&x).unwrap());
        if !q.is_zero() {
            prop_assert_eq!(pq.exact_div(&q).unwrap(), p);
        }
    }
}

fn family24() -> &'static ExtremalFamily {
    static F: OnceLock<ExtremalFamily> = OnceLock::new();
    F.get_or_init(|| ExtremalFamily::build(&common::free24(carnot_core::prolongation::Action::Right)).unwrap())
}

/// Quotient of free(2,4) by the span of the top-layer indices in `drop`.
fn quotient(drop: &[i64]) -> GradedLieAlgebra {
    let g = &free24().algebra;
    let keep: Vec<i64> = (1..=8).filter(|k| !drop.contains(k)).collect();
    let pos = |k: i64| keep.iter().position(|&x| x == k).map(|p| p as i64 + 1);
    let degrees = keep.iter().map(|&k| g.degree(k).unwrap()).collect();
    let mut entries = Vec::new();
    for &i in &keep {
        for &j in &keep {
            for (k, c) in g.bracket_basis(i, j).unwrap() {
                if let Some(pk) = pos(k) {
                    entries.push((pos(i).unwrap(), pos(j).unwrap(), pk, c));
                }
            }
        }
    }
    GradedLieAlgebra::new(degrees, entries).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(5))]

    #[test]
    fn quotients_satisfy_structure_identity(mask in 0u8..7) {
        let drop: Vec<i64> = (0..3).filter(|b| mask >> b & 1 == 1).map(|b| 6 + b as i64).collect();
        let q = quotient(&drop);
        prop_assert!(q.validate().is_empty());
        let p = prolong(&q, 1).unwrap();
        let fam = ExtremalFamily::build(&p).unwrap();
        prop_assert!(fam.verify_structure().is_empty());
    }
}

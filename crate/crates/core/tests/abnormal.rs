mod common;

use carnot_core::abnormal::{
    bareiss_det, detect_abnormal, goh_check_exact, laplace_det, membership, minor_system, nonvanishing_certificate,
    product_group, solve_covector, variety_generators,
};
use carnot_core::extremal::ExtremalFamily;
use carnot_core::free_lie::FreeLie;
use carnot_core::prolongation::{prolong, Action, ProlongedAlgebra};
use carnot_core::rational::{frac, int};
use carnot_core::{GradedLieAlgebra, MultiIndex, Poly, Rational};
use common::{free24, mono};

fn e(n: usize, k: usize) -> Vec<Rational> {
    (1..=n).map(|i| if i == k { int(1) } else { int(0) }).collect()
}

fn line(n: usize, t: Rational) -> Vec<Rational> {
    let mut x = vec![int(0); n];
    x[1] = t;
    x
}

#[test]
fn minors_of_rank_two_step_four() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let ms = minor_system(&fam, true).unwrap();
    assert_eq!(ms.rows, vec![-3, -2, -1, 0, 1, 2, 3]);
    assert_eq!(ms.cols, vec![4, 5, 6, 7, 8]);
    assert_eq!(ms.minors.len(), 21);
    let target = ms.minors.iter().find(|m| m.rows == vec![-1, 0, 1, 2, 3]).unwrap();
    assert_eq!(target.det.weighted_degree(&ms.weights), Some(14));
    assert!(target.det.is_homogeneous(&ms.weights));
    let key = MultiIndex::from(vec![1, 0, 1, 1, 0, 1, 0, 1]);
    assert_eq!(target.det.coeff(&key), int(-2));
    let sub: Vec<Vec<Poly>> = (2..7).map(|r| ms.matrix[r].clone()).collect();
    assert_eq!(laplace_det(&sub), target.det);
    let certs = nonvanishing_certificate(&ms);
    for (m, c) in ms.minors.iter().zip(&certs) {
        match c {
            Some(c) => assert_eq!(m.det.coeff(&c.monomial), c.coeff),
            None => assert!(m.det.is_zero()),
        }
        if !m.det.is_zero() {
            let expected: i64 = m.cols.iter().map(|&k| ms.weights[(k - 1) as usize] as i64).sum::<i64>()
                - m.rows.iter().map(|&j| fam.algebra().degree(j).unwrap() as i64).sum::<i64>();
            assert_eq!(m.det.weighted_degree(&ms.weights), Some(expected));
        }
    }
}

#[test]
fn left_action_keeps_the_certificate() {
    let fam = ExtremalFamily::build(&free24(Action::Left)).unwrap();
    let ms = minor_system(&fam, true).unwrap();
    let target = ms.minors.iter().find(|m| m.rows == vec![-1, 0, 1, 2, 3]).unwrap();
    assert_eq!(target.det.coeff(&MultiIndex::from(vec![1, 0, 1, 1, 0, 1, 0, 1])), int(-2));
}

#[test]
fn generators_for_e4() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let gens = variety_generators(&fam, &e(8, 4), true).unwrap();
    let get = |j: i64| gens.iter().find(|(i, _)| *i == j).unwrap().1.clone();
    let m = |c, d, p: &[(usize, u8)]| mono(8, c, d, p);
    assert_eq!(get(3), m(-1, 1, &[(1, 1)]));
    assert_eq!(get(1), m(1, 1, &[(3, 1)]));
    assert_eq!(get(2), m(1, 2, &[(1, 2)]));
    assert_eq!(get(-2), m(1, 1, &[(4, 1)]));
    assert_eq!(get(-3), &m(1, 1, &[(2, 1), (3, 1)]) + &m(1, 1, &[(5, 1)]));
    let on_line: Vec<_> = [frac(1, 3), int(1), int(-5)].into_iter().map(|t| line(8, t)).collect();
    assert_eq!(membership(&fam, &e(8, 4), &on_line).unwrap(), (true, int(0)));
    assert_eq!(membership(&fam, &e(8, 4), &[e(8, 1)]).unwrap(), (false, frac(1, 2)));
}

#[test]
fn abnormal_line_has_corank_three() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let samples: Vec<_> = [frac(1, 2), int(1), int(2), int(3)].into_iter().map(|t| line(8, t)).collect();
    let d = detect_abnormal(&fam, &samples).unwrap();
    assert_eq!(d.basis, vec![e(8, 4), e(8, 6), e(8, 7)]);
    assert_eq!(d.corank_lower_bound, 3);
    assert!(!d.few_samples);
    let mut rows = Vec::new();
    for j in -3..=1 {
        for x in std::iter::once(vec![int(0); 8]).chain(samples.iter().cloned()) {
            rows.push((1..=8).map(|k| fam.q(j, k).unwrap().evaluate(&x).unwrap()).collect());
        }
    }
    assert_eq!(common::dense_null_space(rows, 8), 3);
}

#[test]
fn bareiss_agrees_with_laplace_on_all_minors() {
    let fam = ExtremalFamily::build(&free24(Action::Right)).unwrap();
    let ms = minor_system(&fam, true).unwrap();
    for m in ms.minors.iter().take(6) {
        let rows: Vec<usize> = m.rows.iter().map(|j| ms.rows.iter().position(|r| r == j).unwrap()).collect();
        let sub: Vec<Vec<Poly>> = rows.iter().map(|&r| ms.matrix[r].clone()).collect();
        assert_eq!(bareiss_det(&sub).unwrap(), laplace_det(&sub));
    }
}

#[test]
fn heisenberg_square() {
    let h = ProlongedAlgebra::trivial(&GradedLieAlgebra::heisenberg());
    let p = product_group(&h, &h).unwrap();
    let g = p.algebra.algebra();
    assert_eq!((g.n(), g.rank(), g.step()), (6, 4, 2));
    assert_eq!(p.embed_a, vec![1, 2, 5]);
    assert_eq!(p.embed_b, vec![3, 4, 6]);
    for a in [1, 2, 5] {
        for b in [3, 4, 6] {
            assert!(g.bracket_basis(a, b).unwrap().is_empty());
        }
    }
    assert_eq!(g.bracket_basis(2, 1).unwrap(), [(5, int(1))].into_iter().collect());
    assert!(g.validate().is_empty());
    let fam = ExtremalFamily::build(&p.algebra).unwrap();
    for j in [1, 2, 5] {
        for k in 1..=6 {
            let q = fam.q(j, k).unwrap();
            assert!(q.terms().all(|(a, _)| [2, 3, 5].iter().all(|&z| a.get(z) == 0)));
        }
    }
    assert!(fam.verify_structure().is_empty());
}

#[test]
fn rank_three_covector() {
    let f = FreeLie::build(3, 4).unwrap();
    let fam = ExtremalFamily::of_algebra(&f.algebra).unwrap();
    let n = 32;
    let target = &mono(n, 1, 1, &[(2, 2)]) - &mono(n, 1, 1, &[(1, 1)]);
    let zero = Poly::zero(n);
    let v = solve_covector(&fam, &[(4, target.clone()), (5, zero.clone()), (6, zero)], 3).unwrap().unwrap();
    let mut expected = vec![int(0); n];
    expected[6] = int(1);
    expected[17] = int(2);
    assert_eq!(v, expected);
    assert_eq!(fam.polynomial(4, &v).unwrap(), target);
    assert!(fam.polynomial(5, &v).unwrap().is_zero());
    assert!(fam.polynomial(6, &v).unwrap().is_zero());
    // on a point of the variety y_1 = y_2^2 with everything else free
    let mut x: Vec<Rational> = (1..=n as i64).map(|i| frac(i, 7)).collect();
    x[0] = &x[1] * &x[1];
    assert!(goh_check_exact(&fam, &v, &[vec![int(0); n]]).unwrap());
    assert_eq!(fam.polynomial(4, &v).unwrap().evaluate(&x).unwrap(), int(0));
    let p = prolong(&f.algebra, 1).unwrap();
    assert_eq!(p.dims(), vec![9, 0]);
}
